//! Overlapping decomposition into cuboid subdomains and the local problems
//! of the restricted additive Schwarz preconditioner.
//!
//! Core boxes partition the cell grid exactly; extended boxes grow each core
//! by `overlap_layers` cell layers per face, clipped at the mesh. A degree of
//! freedom is owned (partition-of-unity weight 1) by the subdomain whose core
//! contains its lowest-indexed incident cell, weight 0 anywhere else, so that
//! `sum_s R_s^T D_s R_s = I` holds exactly.
//!
//! Local matrices are fresh assemblies over the extended boxes. Faces lying
//! on the global boundary inherit the global condition; interior interface
//! faces carry the selected transmission condition, either the impedance
//! surface term or an interface PML of `l_pmli_layers` cells closed by PEC.

use crate::assembly::{assemble_over_box, AssemblyOptions, FaceCondition};
use crate::grid::{EdgeBox, GlobalBc, Mesh};
use crate::linalg::lu::{lu_factor, LuFactorization};
use crate::linalg::sparse::CsrMatrix;
use crate::physics::PhysicsSpec;
use crate::pml::{SigmaKind, StretchProfile};
use crate::Error;

/// Transmission condition on interior subdomain interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceCondition {
    Impedance,
    Pml,
}

/// Cuboid decomposition of the cell grid.
#[derive(Debug, Clone)]
pub struct DecompositionPlan {
    pub subdomain_grid: [usize; 3],
    pub overlap_layers: usize,
    /// Disjoint core boxes, `[lo, hi)` per axis, subdomain-major order with
    /// the x index fastest.
    pub cores: Vec<([usize; 3], [usize; 3])>,
    /// Cores grown by `overlap_layers` per face, clipped at the mesh.
    pub extended: Vec<([usize; 3], [usize; 3])>,
}

impl DecompositionPlan {
    pub fn subdomain_count(&self) -> usize {
        self.cores.len()
    }
}

/// Split `n` cells into `p` consecutive parts as evenly as possible, the
/// remainder going to the lowest-index parts.
fn split_even(n: usize, p: usize) -> Vec<(usize, usize)> {
    let base = n / p;
    let rem = n % p;
    let mut out = Vec::with_capacity(p);
    let mut start = 0;
    for i in 0..p {
        let len = base + usize::from(i < rem);
        out.push((start, start + len));
        start += len;
    }
    out
}

pub fn plan_decomposition(
    mesh: &Mesh,
    subdomain_grid: [usize; 3],
    overlap_layers: usize,
) -> Result<DecompositionPlan, Error> {
    if overlap_layers < 1 {
        return Err(Error::Decomposition("overlap_layers must be >= 1".into()));
    }
    let cells = mesh.cells_per_dir();
    for d in 0..3 {
        if subdomain_grid[d] < 1 {
            return Err(Error::Decomposition(format!(
                "subdomain grid must be >= 1 along axis {d}"
            )));
        }
        if subdomain_grid[d] > cells[d] {
            return Err(Error::Decomposition(format!(
                "{} subdomains along axis {d} exceed the {} cells available",
                subdomain_grid[d], cells[d]
            )));
        }
    }
    let splits: [Vec<(usize, usize)>; 3] = [
        split_even(cells[0], subdomain_grid[0]),
        split_even(cells[1], subdomain_grid[1]),
        split_even(cells[2], subdomain_grid[2]),
    ];
    let mut cores = Vec::new();
    let mut extended = Vec::new();
    for sz in 0..subdomain_grid[2] {
        for sy in 0..subdomain_grid[1] {
            for sx in 0..subdomain_grid[0] {
                let parts = [splits[0][sx], splits[1][sy], splits[2][sz]];
                let lo = [parts[0].0, parts[1].0, parts[2].0];
                let hi = [parts[0].1, parts[1].1, parts[2].1];
                let elo = [
                    lo[0].saturating_sub(overlap_layers),
                    lo[1].saturating_sub(overlap_layers),
                    lo[2].saturating_sub(overlap_layers),
                ];
                let ehi = [
                    (hi[0] + overlap_layers).min(cells[0]),
                    (hi[1] + overlap_layers).min(cells[1]),
                    (hi[2] + overlap_layers).min(cells[2]),
                ];
                cores.push((lo, hi));
                extended.push((elo, ehi));
            }
        }
    }
    Ok(DecompositionPlan {
        subdomain_grid,
        overlap_layers,
        cores,
        extended,
    })
}

/// Global ids of the degrees of freedom of subdomain `s` (edges incident to
/// its extended box), ascending. Gathering by this list realizes `R_s`,
/// scatter-add its transpose.
pub fn build_restriction(plan: &DecompositionPlan, mesh: &Mesh, s: usize) -> Vec<usize> {
    let (lo, hi) = plan.extended[s];
    EdgeBox::new(mesh, lo, hi).dof_ids()
}

/// Whether core `s` owns a global edge: its lowest-indexed incident cell
/// (linear cell index) lies in the core. Cores partition the cells, so every
/// edge has exactly one owner.
fn core_owns_edge(plan: &DecompositionPlan, mesh: &Mesh, s: usize, edge: usize) -> bool {
    let cells = mesh.edge_incident_cells(edge);
    let lowest = cells
        .iter()
        .map(|&c| mesh.cell_linear(c))
        .min()
        .expect("edge with no incident cell");
    let c = mesh.cell_from_linear(lowest);
    let (lo, hi) = plan.cores[s];
    (0..3).all(|d| c[d] >= lo[d] && c[d] < hi[d])
}

/// Boolean partition-of-unity weights, one vector per subdomain in local
/// (restriction) ordering.
pub fn build_partition_of_unity(plan: &DecompositionPlan, mesh: &Mesh) -> Vec<Vec<f64>> {
    (0..plan.subdomain_count())
        .map(|s| {
            build_restriction(plan, mesh, s)
                .iter()
                .map(|&g| {
                    if core_owns_edge(plan, mesh, s, g) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// One subdomain's piece of the preconditioner. Immutable once factorized.
#[derive(Debug)]
pub struct SubdomainProblem {
    pub index: usize,
    /// Global dof ids in local order; realizes the restriction matrix.
    pub restriction: Vec<usize>,
    /// Partition-of-unity weights in {0, 1}, local order.
    pub weights: Vec<f64>,
    pub matrix: CsrMatrix,
    pub factorization: LuFactorization,
    pub ic: InterfaceCondition,
    /// The assembly options the local matrix was built with (inherited global
    /// conditions plus interface terms).
    pub local_options: AssemblyOptions,
    /// Set when the interface PML is at least as wide as the overlap; the
    /// problem still builds and runs.
    pub pml_wider_than_overlap: bool,
}

impl SubdomainProblem {
    pub fn local_dof_count(&self) -> usize {
        self.restriction.len()
    }
}

/// Build and factorize the local problem of subdomain `s`.
#[allow(clippy::too_many_arguments)]
pub fn build_local_problem(
    plan: &DecompositionPlan,
    mesh: &Mesh,
    phys: &PhysicsSpec,
    s: usize,
    ic: InterfaceCondition,
    sigma_kind: SigmaKind,
    l_pmli_layers: usize,
    global_bc: GlobalBc,
) -> Result<SubdomainProblem, Error> {
    let (lo, hi) = plan.extended[s];
    let cells = mesh.cells_per_dir();
    let h = mesh.h();
    let origin = mesh.origin();
    let global = AssemblyOptions::for_global_bc(mesh, global_bc, sigma_kind);

    if ic == InterfaceCondition::Pml && l_pmli_layers < 1 {
        return Err(Error::Decomposition(
            "PML interface condition requires l_pmli_layers >= 1".into(),
        ));
    }

    let mut faces = [[FaceCondition::Natural; 2]; 3];
    let mut opts = AssemblyOptions {
        profiles: global.profiles.clone(),
        faces: global.faces,
    };
    let mut any_interface = false;
    for axis in 0..3 {
        for side in 0..2 {
            let on_boundary = if side == 0 {
                lo[axis] == 0
            } else {
                hi[axis] == cells[axis]
            };
            if on_boundary {
                faces[axis][side] = global.faces[axis][side];
                continue;
            }
            any_interface = true;
            match ic {
                InterfaceCondition::Impedance => {
                    faces[axis][side] = FaceCondition::Impedance;
                }
                InterfaceCondition::Pml => {
                    if l_pmli_layers > hi[axis] - lo[axis] {
                        return Err(Error::Decomposition(format!(
                            "interface PML of {l_pmli_layers} layers exceeds the \
                             {}-cell extended range of subdomain {s} along axis {axis}",
                            hi[axis] - lo[axis]
                        )));
                    }
                    faces[axis][side] = FaceCondition::Pec;
                    let width = l_pmli_layers as f64 * h;
                    let profile = if side == 0 {
                        // pole on the local minus face, absorbing downward
                        let pole = origin[axis] + lo[axis] as f64 * h;
                        StretchProfile::new(sigma_kind, pole + width, pole)
                    } else {
                        let pole = origin[axis] + hi[axis] as f64 * h;
                        StretchProfile::new(sigma_kind, pole - width, pole)
                    };
                    opts.profiles[axis].push(profile);
                }
            }
        }
    }
    opts.faces = faces;

    let warn = ic == InterfaceCondition::Pml && any_interface && plan.overlap_layers <= l_pmli_layers;
    if warn {
        log::warn!(
            "subdomain {s}: interface PML of {l_pmli_layers} layers is not narrower than \
             the {}-layer overlap; transmission quality may degrade",
            plan.overlap_layers
        );
    }

    let system = assemble_over_box(mesh, phys, &opts, lo, hi)?;
    let factorization = lu_factor(&system.matrix)?;
    let restriction = build_restriction(plan, mesh, s);
    let weights = restriction
        .iter()
        .map(|&g| {
            if core_owns_edge(plan, mesh, s, g) {
                1.0
            } else {
                0.0
            }
        })
        .collect();

    Ok(SubdomainProblem {
        index: s,
        restriction,
        weights,
        matrix: system.matrix,
        factorization,
        ic,
        local_options: opts,
        pml_wider_than_overlap: warn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_global;
    use crate::grid::{build_grid, DiscretizationSpec};
    use crate::C64;

    fn phys() -> PhysicsSpec {
        PhysicsSpec::new(0.5, 1.0)
    }

    fn mesh_with_cells(cells: [usize; 3]) -> Mesh {
        let h = 0.4;
        let disc = DiscretizationSpec {
            domain_lengths: [
                cells[0] as f64 * h,
                cells[1] as f64 * h,
                cells[2] as f64 * h,
            ],
            n_lambda: 5.0,
            l_pml_lambda: 0.0,
            l_pmli_layers: 0,
            overlap_layers: 1,
        };
        build_grid(&disc, &phys(), None, GlobalBc::Impedance).unwrap()
    }

    #[test]
    fn split_matches_worked_example() {
        // 10 cells, two parts, overlap 1: cores [0,5), [5,10);
        // extended [0,6), [4,10)
        let mesh = mesh_with_cells([10, 1, 1]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 1).unwrap();
        assert_eq!(plan.cores[0], ([0, 0, 0], [5, 1, 1]));
        assert_eq!(plan.cores[1], ([5, 0, 0], [10, 1, 1]));
        assert_eq!(plan.extended[0], ([0, 0, 0], [6, 1, 1]));
        assert_eq!(plan.extended[1], ([4, 0, 0], [10, 1, 1]));
    }

    #[test]
    fn single_subdomain_covers_everything() {
        let mesh = mesh_with_cells([3, 2, 2]);
        let plan = plan_decomposition(&mesh, [1, 1, 1], 2).unwrap();
        assert_eq!(plan.extended[0], ([0, 0, 0], [3, 2, 2]));
        assert_eq!(plan.cores[0], plan.extended[0]);
        let r = build_restriction(&plan, &mesh, 0);
        // identity permutation over all dofs
        for (l, &g) in r.iter().enumerate() {
            assert_eq!(l, g);
        }
        let pou = build_partition_of_unity(&plan, &mesh);
        assert!(pou[0].iter().all(|&w| w == 1.0));
    }

    #[test]
    fn rejects_oversubscribed_axis() {
        let mesh = mesh_with_cells([3, 2, 2]);
        assert!(plan_decomposition(&mesh, [4, 1, 1], 1).is_err());
        assert!(plan_decomposition(&mesh, [2, 1, 1], 0).is_err());
    }

    #[test]
    fn cores_partition_cells() {
        let mesh = mesh_with_cells([7, 5, 6]);
        let plan = plan_decomposition(&mesh, [3, 2, 2], 2).unwrap();
        let mut seen = vec![0u8; mesh.cell_count()];
        for (lo, hi) in &plan.cores {
            for k in lo[2]..hi[2] {
                for j in lo[1]..hi[1] {
                    for i in lo[0]..hi[0] {
                        seen[mesh.cell_linear([i, j, k])] += 1;
                    }
                }
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn overlap_edges_restricted_to_both() {
        let mesh = mesh_with_cells([10, 2, 2]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 1).unwrap();
        let r0 = build_restriction(&plan, &mesh, 0);
        let r1 = build_restriction(&plan, &mesh, 1);
        let s0: std::collections::HashSet<_> = r0.iter().collect();
        let shared = r1.iter().filter(|g| s0.contains(g)).count();
        assert!(shared > 0, "overlap region must appear in both lists");
        // gather-then-scatter is the identity on local vectors
        let n = mesh.edge_count();
        let mut global = vec![C64::new(0.0, 0.0); n];
        for (l, &g) in r0.iter().enumerate() {
            global[g] = C64::new(l as f64, -1.0);
        }
        for (l, &g) in r0.iter().enumerate() {
            assert_eq!(global[g], C64::new(l as f64, -1.0));
        }
    }

    #[test]
    fn partition_identity_exact() {
        let mesh = mesh_with_cells([6, 5, 4]);
        for grid in [[2, 1, 1], [2, 2, 1], [3, 2, 2]] {
            for overlap in [1, 2] {
                let plan = plan_decomposition(&mesh, grid, overlap).unwrap();
                let pou = build_partition_of_unity(&plan, &mesh);
                let v = crate::assembly::assemble_rhs_random(&mesh, 11);
                let mut acc = vec![C64::new(0.0, 0.0); mesh.edge_count()];
                for s in 0..plan.subdomain_count() {
                    let r = build_restriction(&plan, &mesh, s);
                    for (l, &g) in r.iter().enumerate() {
                        acc[g] += v[g] * pou[s][l];
                    }
                }
                for (a, b) in acc.iter().zip(&v) {
                    assert_eq!(a, b, "partition identity must hold exactly");
                }
            }
        }
    }

    #[test]
    fn interface_edges_owned_once_1d() {
        // 4x1x1 cells, two subdomains: exhaustive ownership check
        let mesh = mesh_with_cells([4, 1, 1]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 1).unwrap();
        let pou = build_partition_of_unity(&plan, &mesh);
        let mut owners = vec![0usize; mesh.edge_count()];
        for s in 0..2 {
            let r = build_restriction(&plan, &mesh, s);
            for (l, &g) in r.iter().enumerate() {
                if pou[s][l] == 1.0 {
                    owners[g] += 1;
                }
            }
        }
        assert!(owners.iter().all(|&c| c == 1), "every edge owned exactly once");
    }

    #[test]
    fn single_subdomain_matches_global_matrix() {
        let mesh = mesh_with_cells([3, 3, 3]);
        let plan = plan_decomposition(&mesh, [1, 1, 1], 2).unwrap();
        let global =
            assemble_global(&mesh, &phys(), Default::default(), GlobalBc::Impedance).unwrap();
        for ic in [InterfaceCondition::Impedance, InterfaceCondition::Pml] {
            let sp = build_local_problem(
                &plan,
                &mesh,
                &phys(),
                0,
                ic,
                SigmaKind::M2,
                2,
                GlobalBc::Impedance,
            )
            .unwrap();
            assert_eq!(sp.matrix, global.matrix, "no interior interfaces: A_s == A");
            assert!(!sp.pml_wider_than_overlap);
        }
    }

    #[test]
    fn interface_pml_layer_extent() {
        // 8x2x2 cells, two subdomains along x, interface PML of 2 layers:
        // exactly the outermost 2 cell layers of each extended box toward the
        // interface carry active stretching.
        let mesh = mesh_with_cells([8, 2, 2]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 2).unwrap();
        let sp = build_local_problem(
            &plan,
            &mesh,
            &phys(),
            0,
            InterfaceCondition::Pml,
            SigmaKind::M2,
            2,
            GlobalBc::Impedance,
        )
        .unwrap();
        // subdomain 0 extends to cell 6; its x+ face is the only interface
        assert_eq!(plan.extended[0], ([0, 0, 0], [6, 2, 2]));
        let h = mesh.h();
        let mut active_layers = Vec::new();
        for i in 0..6 {
            let x0 = mesh.origin()[0] + i as f64 * h;
            let active = sp.local_options.profiles[0]
                .iter()
                .any(|p| p.active_on(x0, x0 + h));
            if active {
                active_layers.push(i);
            }
        }
        assert_eq!(active_layers, vec![4, 5], "exactly two layers at the interface");
        // warning only when the overlap is not wider than the PML
        assert!(sp.pml_wider_than_overlap); // overlap 2 <= l_pmli 2
        // interface PML never alters directions without an interface
        assert!(sp.local_options.profiles[1].is_empty());
        assert!(sp.local_options.profiles[2].is_empty());
    }

    #[test]
    fn interface_pml_rejects_oversized_layer() {
        let mesh = mesh_with_cells([8, 2, 2]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 1).unwrap();
        // extended range is 5 cells; 6 layers cannot fit
        let res = build_local_problem(
            &plan,
            &mesh,
            &phys(),
            0,
            InterfaceCondition::Pml,
            SigmaKind::M2,
            6,
            GlobalBc::Impedance,
        );
        assert!(res.is_err());
    }

    #[test]
    fn impedance_ic_differs_only_on_interface_rows() {
        let mesh = mesh_with_cells([6, 2, 2]);
        let plan = plan_decomposition(&mesh, [2, 1, 1], 1).unwrap();
        let global =
            assemble_global(&mesh, &phys(), Default::default(), GlobalBc::Impedance).unwrap();
        let sp = build_local_problem(
            &plan,
            &mesh,
            &phys(),
            0,
            InterfaceCondition::Impedance,
            SigmaKind::M2,
            0,
            GlobalBc::Impedance,
        )
        .unwrap();
        let (lo, hi) = plan.extended[0];
        let ebox = EdgeBox::new(&mesh, lo, hi);
        // the x+ face at cell plane hi[0] is the single interface
        for local in 0..sp.local_dof_count() {
            let g = sp.restriction[local];
            let (dir, ijk) = mesh.edge_decompose(g);
            let on_interface_plane = ijk[0] == hi[0] && dir != 0;
            let onface_normal_touch = ijk[0] == hi[0] && dir == 0; // x-edges starting at the plane are outside
            if on_interface_plane || onface_normal_touch {
                continue;
            }
            // interior rows: identical entries over in-box columns, and the
            // global row has no columns outside the box
            let (gcols, gvals) = global.matrix.row(g);
            let (lcols, lvals) = sp.matrix.row(local);
            let has_outside = gcols.iter().any(|&c| ebox.global_to_local(c).is_none());
            if has_outside {
                // such rows border the interface; they may differ
                continue;
            }
            assert_eq!(gcols.len(), lcols.len(), "row pattern differs at edge {g}");
            for (p, (&lc, &lv)) in lcols.iter().zip(lvals).enumerate() {
                assert_eq!(ebox.local_to_global(lc), gcols[p]);
                assert_eq!(lv, gvals[p], "row value differs at edge {g}");
            }
        }
    }
}
