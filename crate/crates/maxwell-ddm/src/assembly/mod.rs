//! Global and subdomain assembly of the curl-curl system.
//!
//! The assembled operator is `A = K - omega^2 M + i B` with
//!
//! - `K = int (Lambda_c curl N_i) . curl N_j`
//! - `M = int eps_sigma mu0 (Lambda_m N_i) . N_j`
//! - `B = (omega/c) int_Gamma (N_i x n) . (N_j x n)` over impedance faces
//!
//! using the unconjugated bilinear form throughout, so `A` is complex
//! symmetric. Quadrature is 2x2x2 Gauss per cell with coefficients evaluated
//! per quadrature point; PEC faces are eliminated symmetrically afterwards.
//!
//! Cells are visited in a canonical order (linear cell index ascending,
//! volume terms first, then faces ordered by axis and side), so per-entry
//! summation order is fixed and two assemblies of the same problem agree
//! bit for bit regardless of how the element matrices were scheduled.

pub mod element;

pub use element::{edge_shapes, GAUSS2};

use crate::grid::{EdgeBox, GlobalBc, Mesh};
use crate::linalg::sparse::CsrMatrix;
use crate::physics::PhysicsSpec;
use crate::pml::{pml_tensors, stretch_factor, PmlTensors, SigmaKind, StretchProfile, StretchState};
use crate::{Error, C64};
use rayon::prelude::*;

/// Condition applied to one face of the assembled (sub)domain box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceCondition {
    /// Do-nothing face: natural boundary condition of the weak form.
    Natural,
    /// First-order absorbing (Robin) face: adds `i (omega/c) (ExN, vxN)`.
    Impedance,
    /// Perfect electric conductor: tangential E eliminated.
    Pec,
}

/// Everything the assembler needs besides mesh and physics: the stretching
/// profiles per direction (any number per axis; inactive outside their
/// layers) and the condition on each of the six box faces, indexed
/// `[axis][side]` with side 0 the minus face.
#[derive(Debug, Clone)]
pub struct AssemblyOptions {
    pub profiles: [Vec<StretchProfile>; 3],
    pub faces: [[FaceCondition; 2]; 3],
}

impl AssemblyOptions {
    pub fn impedance_everywhere() -> Self {
        Self {
            profiles: Default::default(),
            faces: [[FaceCondition::Impedance; 2]; 3],
        }
    }

    /// Options matching a global boundary choice: either impedance on all six
    /// faces, or the PML collar with PEC closure everywhere except the
    /// excitation face z = z_min, which keeps the Robin term.
    pub fn for_global_bc(mesh: &Mesh, bc: GlobalBc, kind: SigmaKind) -> Self {
        match bc {
            GlobalBc::Impedance => Self::impedance_everywhere(),
            GlobalBc::Pml => {
                let mut faces = [[FaceCondition::Pec; 2]; 3];
                faces[2][0] = FaceCondition::Impedance;
                Self {
                    profiles: global_profiles(mesh, kind),
                    faces,
                }
            }
        }
    }
}

/// Stretching profiles of the global PML collar, anchored at the physical
/// region: each layer starts at the physical boundary and has its pole on the
/// outer mesh boundary.
pub fn global_profiles(mesh: &Mesh, kind: SigmaKind) -> [Vec<StretchProfile>; 3] {
    let mut profiles: [Vec<StretchProfile>; 3] = Default::default();
    let h = mesh.h();
    let collar = mesh.collar_layers();
    let cells = mesh.cells_per_dir();
    let origin = mesh.origin();
    for d in 0..3 {
        if collar[d] == 0 {
            continue;
        }
        let outer_min = origin[d];
        let outer_max = origin[d] + cells[d] as f64 * h;
        let phys_min = outer_min + collar[d] as f64 * h;
        let phys_max = outer_max - collar[d] as f64 * h;
        // minus side decreases toward its pole at the outer boundary
        profiles[d].push(StretchProfile::new(kind, phys_min, outer_min));
        profiles[d].push(StretchProfile::new(kind, phys_max, outer_max));
    }
    profiles
}

/// Assembled linear system with its Dirichlet bookkeeping.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<C64>,
    pub dirichlet: Vec<bool>,
    /// The unconjugated forms keep `A = A^T`; recorded for consumers.
    pub complex_symmetric: bool,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Install a right-hand side, zeroing eliminated entries.
    pub fn set_rhs(&mut self, mut rhs: Vec<C64>) {
        assert_eq!(rhs.len(), self.dim());
        for (i, &m) in self.dirichlet.iter().enumerate() {
            if m {
                rhs[i] = C64::new(0.0, 0.0);
            }
        }
        self.rhs = rhs;
    }

    /// Symmetric elimination of additional unknowns: unit diagonal, zero row,
    /// column and right-hand side entry (homogeneous tangential data).
    pub fn apply_dirichlet(&mut self, mask: &[bool]) {
        assert_eq!(mask.len(), self.dim());
        self.matrix.eliminate(mask);
        for (i, &m) in mask.iter().enumerate() {
            if m {
                self.rhs[i] = C64::new(0.0, 0.0);
                self.dirichlet[i] = true;
            }
        }
    }
}

#[derive(Clone, Copy)]
struct TermScales {
    /// factor on the curl-curl term (1 for the full operator)
    curl: C64,
    /// factor multiplying `eps_sigma(cell)` on the mass term
    /// (`-omega^2 mu0` for the full operator)
    mass: C64,
    /// factor on the impedance surface term (`i omega/c` for the full operator)
    surface: C64,
    /// whether PEC faces are eliminated after accumulation
    eliminate: bool,
}

/// Assemble the operator over the whole mesh.
pub fn assemble_with_options(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    opts: &AssemblyOptions,
) -> Result<AssembledSystem, Error> {
    assemble_over_box(mesh, phys, opts, [0; 3], mesh.cells_per_dir())
}

/// Assemble the global system for one of the two global boundary choices.
/// `profiles` are the global stretching layers; they must be empty for the
/// impedance boundary.
pub fn assemble_global(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    profiles: [Vec<StretchProfile>; 3],
    bc: GlobalBc,
) -> Result<AssembledSystem, Error> {
    if bc == GlobalBc::Impedance && profiles.iter().any(|p| !p.is_empty()) {
        return Err(Error::Assembly(
            "impedance boundary takes no global stretch profiles".into(),
        ));
    }
    let mut opts = match bc {
        GlobalBc::Impedance => AssemblyOptions::impedance_everywhere(),
        GlobalBc::Pml => {
            let mut faces = [[FaceCondition::Pec; 2]; 3];
            faces[2][0] = FaceCondition::Impedance;
            AssemblyOptions {
                profiles: Default::default(),
                faces,
            }
        }
    };
    opts.profiles = profiles;
    assemble_with_options(mesh, phys, &opts)
}

/// Assemble the operator over an axis-aligned cell box of the mesh, with the
/// face conditions of `opts` applied to the box faces. Degrees of freedom are
/// the edges incident to the box, numbered as in [`EdgeBox`].
pub fn assemble_over_box(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    opts: &AssemblyOptions,
    lo: [usize; 3],
    hi: [usize; 3],
) -> Result<AssembledSystem, Error> {
    phys.validate()?;
    let omega = phys.omega();
    let scales = TermScales {
        curl: C64::new(1.0, 0.0),
        mass: C64::new(-omega * omega * phys.mu0, 0.0),
        surface: C64::new(0.0, omega / phys.wave_speed),
        eliminate: true,
    };
    let (matrix, dirichlet) = assemble_core(mesh, phys, opts, lo, hi, scales)?;
    let n = matrix.dim();
    Ok(AssembledSystem {
        matrix,
        rhs: vec![C64::new(0.0, 0.0); n],
        dirichlet,
        complex_symmetric: true,
    })
}

/// The three operator parts assembled separately (no elimination):
/// `(K, M, B)` with `A = K - omega^2 M + i B` on unconstrained unknowns.
pub fn assemble_parts(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    opts: &AssemblyOptions,
) -> Result<(CsrMatrix, CsrMatrix, CsrMatrix), Error> {
    let zero = C64::new(0.0, 0.0);
    let whole = ([0; 3], mesh.cells_per_dir());
    let k = assemble_core(
        mesh,
        phys,
        opts,
        whole.0,
        whole.1,
        TermScales {
            curl: C64::new(1.0, 0.0),
            mass: zero,
            surface: zero,
            eliminate: false,
        },
    )?
    .0;
    let m = assemble_core(
        mesh,
        phys,
        opts,
        whole.0,
        whole.1,
        TermScales {
            curl: zero,
            mass: C64::new(phys.mu0, 0.0),
            surface: zero,
            eliminate: false,
        },
    )?
    .0;
    let b = assemble_core(
        mesh,
        phys,
        opts,
        whole.0,
        whole.1,
        TermScales {
            curl: zero,
            mass: zero,
            surface: C64::new(phys.omega() / phys.wave_speed, 0.0),
            eliminate: false,
        },
    )?
    .0;
    Ok((k, m, b))
}

fn assemble_core(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    opts: &AssemblyOptions,
    lo: [usize; 3],
    hi: [usize; 3],
    scales: TermScales,
) -> Result<(CsrMatrix, Vec<bool>), Error> {
    for d in 0..3 {
        if lo[d] >= hi[d] || hi[d] > mesh.cells_per_dir()[d] {
            return Err(Error::Assembly(format!(
                "cell box {lo:?}..{hi:?} does not fit the mesh {:?}",
                mesh.cells_per_dir()
            )));
        }
    }
    let ebox = EdgeBox::new(mesh, lo, hi);
    let n = ebox.edge_count();
    let h = mesh.h();
    let omega = phys.omega();

    // sparsity pattern, one row at a time
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|local| {
            let global = ebox.local_to_global(local);
            let mut nbrs = Vec::with_capacity(33);
            for cell in mesh.edge_incident_cells(global) {
                if (0..3).any(|d| cell[d] < lo[d] || cell[d] >= hi[d]) {
                    continue;
                }
                for e in mesh.cell_edges(cell) {
                    // every edge of an in-box cell is in the box
                    nbrs.push(ebox.global_to_local(e).expect("edge of in-box cell"));
                }
            }
            nbrs.sort_unstable();
            nbrs.dedup();
            nbrs
        })
        .collect();
    let mut matrix = CsrMatrix::from_pattern(n, &rows);
    drop(rows);

    // constant-coefficient element matrices reused wherever no layer is active
    let (ke_id, me_id) = element::element_matrices(h, |_| PmlTensors::identity());

    let tensors_at = |corner: [f64; 3], r: [f64; 3]| -> PmlTensors {
        let mut s = StretchState::identity();
        for d in 0..3 {
            let coord = corner[d] + r[d] * h;
            let mut sigma = 0.0;
            for p in &opts.profiles[d] {
                sigma += p.sigma(coord);
            }
            if sigma != 0.0 {
                s.s[d] = stretch_factor(sigma, omega);
            }
        }
        pml_tensors(&s)
    };

    // volume terms, canonical cell order
    for cell in ebox.cells() {
        let corner = mesh.cell_corner(cell);
        let active = (0..3).any(|d| {
            opts.profiles[d]
                .iter()
                .any(|p| p.active_on(corner[d], corner[d] + h))
        });
        let eps = phys.eps_sigma(mesh.eps_r(mesh.cell_linear(cell), phys.eps_r_background));
        let mass_coeff = scales.mass * eps;
        let locals = local_edge_ids(&ebox, cell);
        if active {
            let (ke, me) = element::element_matrices(h, |r| tensors_at(corner, r));
            scatter(&mut matrix, &locals, &ke, &me, scales.curl, mass_coeff);
        } else {
            scatter(&mut matrix, &locals, &ke_id, &me_id, scales.curl, mass_coeff);
        }
    }

    // impedance surface terms, faces ordered by axis then side
    if scales.surface != C64::new(0.0, 0.0) {
        for axis in 0..3 {
            for side in 0..2 {
                if opts.faces[axis][side] != FaceCondition::Impedance {
                    continue;
                }
                let bf = element::face_mass(h, axis, side);
                for cell in face_cells(&ebox, axis, side) {
                    let locals = local_edge_ids(&ebox, cell);
                    for i in 0..12 {
                        for j in 0..12 {
                            if bf[i][j] != 0.0 {
                                matrix.add_at(
                                    locals[i],
                                    locals[j],
                                    scales.surface * bf[i][j],
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    // PEC faces: tangential edges on the face planes
    let mut mask = vec![false; n];
    for axis in 0..3 {
        for side in 0..2 {
            if opts.faces[axis][side] != FaceCondition::Pec {
                continue;
            }
            let plane = if side == 0 { lo[axis] } else { hi[axis] };
            for local in 0..n {
                let (dir, ijk) = mesh.edge_decompose(ebox.local_to_global(local));
                if dir != axis && ijk[axis] == plane {
                    mask[local] = true;
                }
            }
        }
    }
    if scales.eliminate {
        matrix.eliminate(&mask);
    }
    Ok((matrix, mask))
}

#[inline]
fn local_edge_ids(ebox: &EdgeBox<'_>, cell: [usize; 3]) -> [usize; 12] {
    let globals = ebox.mesh().cell_edges(cell);
    let mut out = [0usize; 12];
    for (o, g) in out.iter_mut().zip(globals) {
        *o = ebox.global_to_local(g).expect("edge of in-box cell");
    }
    out
}

#[inline]
fn scatter(
    matrix: &mut CsrMatrix,
    locals: &[usize; 12],
    ke: &element::ElementMatrix,
    me: &element::ElementMatrix,
    curl_scale: C64,
    mass_coeff: C64,
) {
    for i in 0..12 {
        for j in 0..12 {
            let v = curl_scale * ke[i][j] + mass_coeff * me[i][j];
            matrix.add_at(locals[i], locals[j], v);
        }
    }
}

/// Cells of the box touching one of its faces, in canonical order.
fn face_cells<'a>(
    ebox: &'a EdgeBox<'_>,
    axis: usize,
    side: usize,
) -> impl Iterator<Item = [usize; 3]> + 'a {
    let layer = if side == 0 {
        ebox.cell_lo()[axis]
    } else {
        ebox.cell_hi()[axis] - 1
    };
    ebox.cells().filter(move |c| c[axis] == layer)
}

/// Robin trace of the incident plane wave `pol * e^{-ikz}` on the z = z0
/// face with outward normal -z:
/// `g = (curl E_inc) x n + i (omega/c) n x (E_inc x n) = 2 i k e^{-ikz0} pol`.
pub fn planewave_trace(k: f64, z0: f64, pol: [f64; 3]) -> [C64; 3] {
    let factor = C64::new(0.0, 2.0 * k) * (C64::new(0.0, -k * z0)).exp();
    [factor * pol[0], factor * pol[1], factor * pol[2]]
}

/// Surface load of the incident plane wave on the minimum-z boundary face of
/// the mesh. The polarization must be tangential to that face.
pub fn assemble_rhs_planewave(
    mesh: &Mesh,
    phys: &PhysicsSpec,
    polarization: [f64; 3],
) -> Result<Vec<C64>, Error> {
    if polarization[2] != 0.0 {
        return Err(Error::Assembly(
            "plane-wave polarization must be tangential to the z = const excitation face".into(),
        ));
    }
    let norm = (polarization[0] * polarization[0] + polarization[1] * polarization[1]).sqrt();
    if norm == 0.0 {
        return Err(Error::Assembly("plane-wave polarization must be nonzero".into()));
    }
    let pol = [polarization[0] / norm, polarization[1] / norm, 0.0];
    let k = phys.wavenumber();
    let z0 = mesh.origin()[2];
    let g = planewave_trace(k, z0, pol);
    let h = mesh.h();
    let load = element::face_load(h, 2, 0, g);
    let mut b = vec![C64::new(0.0, 0.0); mesh.edge_count()];
    let ebox = EdgeBox::whole(mesh);
    for cell in face_cells(&ebox, 2, 0) {
        let edges = mesh.cell_edges(cell);
        for (i, &e) in edges.iter().enumerate() {
            if load[i] != C64::new(0.0, 0.0) {
                b[e] += load[i];
            }
        }
    }
    Ok(b)
}

/// Seeded random right-hand side: real and imaginary parts uniform in
/// [-1, 1), drawn from a splitmix64 stream (64-bit state; the next state is
/// `s + 0x9E3779B97F4A7C15` and the output is the bit-mixed state). Eliminated
/// entries are zeroed when the vector is installed into a system.
pub fn assemble_rhs_random(mesh: &Mesh, seed: u64) -> Vec<C64> {
    let mut state = seed;
    let mut next = move || -> f64 {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        // 53 uniform bits -> [0, 1) -> [-1, 1)
        ((z >> 11) as f64) * (2.0 / 9_007_199_254_740_992.0) - 1.0
    };
    (0..mesh.edge_count())
        .map(|_| {
            let re = next();
            let im = next();
            C64::new(re, im)
        })
        .collect()
}

/// Reconstructed field at a cell center: the sum of the 12 edge functions
/// weighted by the solution coefficients.
pub fn eval_at_cell_center(mesh: &Mesh, solution: &[C64], cell: [usize; 3]) -> [C64; 3] {
    let shapes = edge_shapes([0.5, 0.5, 0.5], mesh.h());
    let edges = mesh.cell_edges(cell);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (i, &e) in edges.iter().enumerate() {
        let v = shapes[i].0;
        for d in 0..3 {
            out[d] += solution[e] * v[d];
        }
    }
    out
}
