//! Structured hexahedral mesh with global edge degrees of freedom.
//!
//! The grid covers the requested physical box, extended outward by a PML
//! collar on all six faces when the global boundary condition is PML. Cells
//! are uniform cubes of size `h = lambda / n_lambda`; cell counts per
//! direction are `round(length / h)`, so the realized lengths may differ from
//! the request by less than `h/2`.
//!
//! Degrees of freedom sit on edges. Enumeration is x-directed edges first,
//! then y, then z, each block lexicographic with the first index fastest.
//! Every edge is oriented from its lower to its higher lexicographic vertex,
//! which on a structured grid means along the positive axis; shared edges
//! therefore agree in sign between neighboring cells without an orientation
//! table.

use crate::physics::PhysicsSpec;
use crate::Error;

/// Per-cell region tag. A cell may carry several PML direction tags at the
/// collar corners, plus the material-box marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Region(u8);

impl Region {
    const MATERIAL: u8 = 1 << 6;

    pub const INTERIOR: Region = Region(0);

    fn pml_bit(axis: usize, side: usize) -> u8 {
        1 << (2 * axis + side)
    }

    pub fn is_interior(self) -> bool {
        self.0 == 0
    }

    /// PML tag along `axis` on `side` (0 = minus, 1 = plus).
    pub fn has_pml(self, axis: usize, side: usize) -> bool {
        self.0 & Self::pml_bit(axis, side) != 0
    }

    pub fn pml_direction_count(self) -> usize {
        (0..3)
            .filter(|&a| self.has_pml(a, 0) || self.has_pml(a, 1))
            .count()
    }

    pub fn in_material_box(self) -> bool {
        self.0 & Self::MATERIAL != 0
    }

    fn with_pml(self, axis: usize, side: usize) -> Region {
        Region(self.0 | Self::pml_bit(axis, side))
    }

    fn with_material(self) -> Region {
        Region(self.0 | Self::MATERIAL)
    }
}

/// Global boundary condition choice; decides whether the mesh grows a PML
/// collar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalBc {
    Impedance,
    Pml,
}

/// Mesh resolution parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationSpec {
    /// Physical box lengths (m), before the PML collar.
    pub domain_lengths: [f64; 3],
    /// Points per wavelength; `h = lambda / n_lambda`.
    pub n_lambda: f64,
    /// Global PML thickness in wavelengths; collar layers are
    /// `ceil(l_pml_lambda * n_lambda)` cells.
    pub l_pml_lambda: f64,
    /// Interface PML thickness in element layers (subdomain problems).
    pub l_pmli_layers: usize,
    /// Default overlap width in element layers (sweeps override per row).
    pub overlap_layers: usize,
}

impl DiscretizationSpec {
    pub fn validate(&self) -> Result<(), Error> {
        for (d, &len) in self.domain_lengths.iter().enumerate() {
            if !(len > 0.0) {
                return Err(Error::Geometry(format!(
                    "domain length along axis {d} must be positive, got {len}"
                )));
            }
        }
        if !(self.n_lambda >= 2.0) {
            return Err(Error::Geometry(format!(
                "n_lambda must be >= 2, got {}",
                self.n_lambda
            )));
        }
        if self.l_pml_lambda < 0.0 {
            return Err(Error::Geometry("l_pml_lambda must be >= 0".into()));
        }
        if self.overlap_layers < 1 {
            return Err(Error::Geometry("overlap_layers must be >= 1".into()));
        }
        Ok(())
    }
}

/// An axis-aligned block of different permittivity inside the physical
/// region. Extents are given in physical coordinates (the physical box spans
/// `[0, L_d]` per axis) and are snapped to the nearest cell boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialBox {
    pub eps_r: f64,
    pub extents: [[f64; 2]; 3],
}

/// Structured hexahedral mesh with edge enumeration and region tags.
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Mesh {
    cells: [usize; 3],
    h: f64,
    origin: [f64; 3],
    collar: [usize; 3],
    regions: Vec<Region>,
    material_eps_r: Option<f64>,
}

/// Closed-form edge count of an `nx x ny x nz` cell grid.
pub fn count_dofs(cells: [usize; 3]) -> usize {
    let [nx, ny, nz] = cells;
    nx * (ny + 1) * (nz + 1) + (nx + 1) * ny * (nz + 1) + (nx + 1) * (ny + 1) * nz
}

/// Number of collar layers for a PML of `l_pml_lambda` wavelengths at
/// `n_lambda` points per wavelength.
pub fn collar_layers(l_pml_lambda: f64, n_lambda: f64) -> usize {
    let layers = l_pml_lambda * n_lambda;
    let nearest = layers.round();
    if (layers - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        layers.ceil() as usize
    }
}

/// Build the global mesh: physical box, optional PML collar, region tags.
pub fn build_grid(
    disc: &DiscretizationSpec,
    phys: &PhysicsSpec,
    material: Option<&MaterialBox>,
    bc: GlobalBc,
) -> Result<Mesh, Error> {
    disc.validate()?;
    phys.validate()?;
    if bc == GlobalBc::Pml && !(disc.l_pml_lambda > 0.0) {
        return Err(Error::Geometry(
            "global PML boundary requires l_pml_lambda > 0".into(),
        ));
    }

    let h = phys.wavelength() / disc.n_lambda;
    let collar_n = match bc {
        GlobalBc::Impedance => 0,
        GlobalBc::Pml => collar_layers(disc.l_pml_lambda, disc.n_lambda),
    };

    let mut phys_cells = [0usize; 3];
    for d in 0..3 {
        let n = (disc.domain_lengths[d] / h).round().max(1.0) as usize;
        phys_cells[d] = n;
    }
    let cells = [
        phys_cells[0] + 2 * collar_n,
        phys_cells[1] + 2 * collar_n,
        phys_cells[2] + 2 * collar_n,
    ];
    let origin = [
        -(collar_n as f64) * h,
        -(collar_n as f64) * h,
        -(collar_n as f64) * h,
    ];

    // snap the material box to cell boundaries and check it stays inside the
    // physical region (never in the collar)
    let mut box_cells: Option<[[usize; 2]; 3]> = None;
    if let Some(mb) = material {
        if !(mb.eps_r >= 1.0) {
            return Err(Error::Geometry(format!(
                "material box eps_r must be >= 1, got {}",
                mb.eps_r
            )));
        }
        let mut snapped = [[0usize; 2]; 3];
        for d in 0..3 {
            let lo = (mb.extents[d][0] / h).round() as i64;
            let hi = (mb.extents[d][1] / h).round() as i64;
            if lo < 0 || hi > phys_cells[d] as i64 {
                return Err(Error::Geometry(format!(
                    "material box extent [{}, {}] along axis {d} leaves the physical region",
                    mb.extents[d][0], mb.extents[d][1]
                )));
            }
            if hi <= lo {
                return Err(Error::Geometry(format!(
                    "material box is empty along axis {d} after snapping to the grid"
                )));
            }
            snapped[d] = [lo as usize + collar_n, hi as usize + collar_n];
        }
        box_cells = Some(snapped);
    }

    let mut regions = vec![Region::INTERIOR; cells[0] * cells[1] * cells[2]];
    for k in 0..cells[2] {
        for j in 0..cells[1] {
            for i in 0..cells[0] {
                let idx = [i, j, k];
                let mut r = Region::INTERIOR;
                for d in 0..3 {
                    if idx[d] < collar_n {
                        r = r.with_pml(d, 0);
                    }
                    if idx[d] >= collar_n + phys_cells[d] {
                        r = r.with_pml(d, 1);
                    }
                }
                if let Some(b) = &box_cells {
                    if (0..3).all(|d| idx[d] >= b[d][0] && idx[d] < b[d][1]) {
                        r = r.with_material();
                    }
                }
                regions[i + cells[0] * (j + cells[1] * k)] = r;
            }
        }
    }

    Ok(Mesh {
        cells,
        h,
        origin,
        collar: [collar_n; 3],
        regions,
        material_eps_r: material.map(|m| m.eps_r),
    })
}

/// Region tag of one cell, by 3D index.
pub fn region_at(mesh: &Mesh, cell: [usize; 3]) -> Result<Region, Error> {
    for d in 0..3 {
        if cell[d] >= mesh.cells[d] {
            return Err(Error::Geometry(format!(
                "cell index {cell:?} out of range {:?}",
                mesh.cells
            )));
        }
    }
    Ok(mesh.regions[mesh.cell_linear(cell)])
}

impl Mesh {
    /// Cell counts per direction, collar included.
    pub fn cells_per_dir(&self) -> [usize; 3] {
        self.cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Coordinate of vertex (0,0,0); negative when a collar is present.
    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    /// Collar layer count per direction (same on both sides).
    pub fn collar_layers(&self) -> [usize; 3] {
        self.collar
    }

    /// Cell-index range of the physical (non-collar) region per axis.
    pub fn physical_cell_range(&self) -> [std::ops::Range<usize>; 3] {
        [
            self.collar[0]..self.cells[0] - self.collar[0],
            self.collar[1]..self.cells[1] - self.collar[1],
            self.collar[2]..self.cells[2] - self.collar[2],
        ]
    }

    /// Side lengths actually meshed for the physical region.
    pub fn realized_lengths(&self) -> [f64; 3] {
        let r = self.physical_cell_range();
        [
            (r[0].len()) as f64 * self.h,
            (r[1].len()) as f64 * self.h,
            (r[2].len()) as f64 * self.h,
        ]
    }

    pub fn cell_count(&self) -> usize {
        self.cells[0] * self.cells[1] * self.cells[2]
    }

    pub fn cell_linear(&self, [i, j, k]: [usize; 3]) -> usize {
        i + self.cells[0] * (j + self.cells[1] * k)
    }

    pub fn cell_from_linear(&self, c: usize) -> [usize; 3] {
        let i = c % self.cells[0];
        let j = (c / self.cells[0]) % self.cells[1];
        let k = c / (self.cells[0] * self.cells[1]);
        [i, j, k]
    }

    pub fn region(&self, cell: usize) -> Region {
        self.regions[cell]
    }

    /// Relative permittivity of a cell (material box or background).
    pub fn eps_r(&self, cell: usize, background: f64) -> f64 {
        if self.regions[cell].in_material_box() {
            self.material_eps_r.unwrap_or(background)
        } else {
            background
        }
    }

    pub fn material_eps_r(&self) -> Option<f64> {
        self.material_eps_r
    }

    /// Lower corner coordinates of a cell.
    pub fn cell_corner(&self, [i, j, k]: [usize; 3]) -> [f64; 3] {
        [
            self.origin[0] + self.h * i as f64,
            self.origin[1] + self.h * j as f64,
            self.origin[2] + self.h * k as f64,
        ]
    }

    pub fn cell_center(&self, idx: [usize; 3]) -> [f64; 3] {
        let c = self.cell_corner(idx);
        [
            c[0] + 0.5 * self.h,
            c[1] + 0.5 * self.h,
            c[2] + 0.5 * self.h,
        ]
    }

    /// Edge-grid dimensions for edges directed along `dir`.
    pub fn edge_grid_dims(&self, dir: usize) -> [usize; 3] {
        let [nx, ny, nz] = self.cells;
        match dir {
            0 => [nx, ny + 1, nz + 1],
            1 => [nx + 1, ny, nz + 1],
            2 => [nx + 1, ny + 1, nz],
            _ => unreachable!(),
        }
    }

    fn edge_block_offset(&self, dir: usize) -> usize {
        let mut off = 0;
        for d in 0..dir {
            let [a, b, c] = self.edge_grid_dims(d);
            off += a * b * c;
        }
        off
    }

    pub fn edge_count(&self) -> usize {
        count_dofs(self.cells)
    }

    /// Global id of the edge directed along `dir` starting at vertex (i,j,k).
    pub fn edge_id(&self, dir: usize, [i, j, k]: [usize; 3]) -> usize {
        let dims = self.edge_grid_dims(dir);
        debug_assert!(i < dims[0] && j < dims[1] && k < dims[2]);
        self.edge_block_offset(dir) + i + dims[0] * (j + dims[1] * k)
    }

    /// Direction and start-vertex index of a global edge id.
    pub fn edge_decompose(&self, id: usize) -> (usize, [usize; 3]) {
        let mut rest = id;
        for dir in 0..3 {
            let dims = self.edge_grid_dims(dir);
            let n = dims[0] * dims[1] * dims[2];
            if rest < n {
                let i = rest % dims[0];
                let j = (rest / dims[0]) % dims[1];
                let k = rest / (dims[0] * dims[1]);
                return (dir, [i, j, k]);
            }
            rest -= n;
        }
        panic!("edge id {id} out of range");
    }

    /// The 12 edges of a cell in the local order used by
    /// `assembly::edge_shapes`: four x-edges, four y-edges, four z-edges,
    /// each sub-block ordered by the two transverse offsets (0,0), (1,0),
    /// (0,1), (1,1).
    pub fn cell_edges(&self, [i, j, k]: [usize; 3]) -> [usize; 12] {
        let mut out = [0usize; 12];
        let offs = [(0, 0), (1, 0), (0, 1), (1, 1)];
        for (n, &(b, c)) in offs.iter().enumerate() {
            out[n] = self.edge_id(0, [i, j + b, k + c]);
            out[4 + n] = self.edge_id(1, [i + b, j, k + c]);
            out[8 + n] = self.edge_id(2, [i + b, j + c, k]);
        }
        out
    }

    /// Cells incident to an edge (1, 2 or 4 of them).
    pub fn edge_incident_cells(&self, id: usize) -> Vec<[usize; 3]> {
        let (dir, [i, j, k]) = self.edge_decompose(id);
        let (t1, t2) = match dir {
            0 => (1, 2),
            1 => (0, 2),
            2 => (0, 1),
            _ => unreachable!(),
        };
        let along = [i, j, k][dir];
        let c1 = [i, j, k][t1];
        let c2 = [i, j, k][t2];
        let mut cells = Vec::with_capacity(4);
        for d1 in [c1.wrapping_sub(1), c1] {
            if d1 >= self.cells[t1] {
                continue;
            }
            for d2 in [c2.wrapping_sub(1), c2] {
                if d2 >= self.cells[t2] {
                    continue;
                }
                let mut cell = [0usize; 3];
                cell[dir] = along;
                cell[t1] = d1;
                cell[t2] = d2;
                cells.push(cell);
            }
        }
        cells
    }
}

/// View of the edges incident to an axis-aligned cell box of a mesh, with a
/// local enumeration that follows the global one (direction blocks, first
/// index fastest). Because both orders agree, local ids are sorted by global
/// id.
#[derive(Debug, Clone)]
pub struct EdgeBox<'a> {
    mesh: &'a Mesh,
    lo: [usize; 3],
    hi: [usize; 3],
}

impl<'a> EdgeBox<'a> {
    /// `lo..hi` are half-open cell-index ranges per axis.
    pub fn new(mesh: &'a Mesh, lo: [usize; 3], hi: [usize; 3]) -> Self {
        for d in 0..3 {
            assert!(lo[d] < hi[d] && hi[d] <= mesh.cells_per_dir()[d]);
        }
        Self { mesh, lo, hi }
    }

    pub fn whole(mesh: &'a Mesh) -> Self {
        Self::new(mesh, [0; 3], mesh.cells_per_dir())
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn cell_lo(&self) -> [usize; 3] {
        self.lo
    }

    pub fn cell_hi(&self) -> [usize; 3] {
        self.hi
    }

    pub fn cell_extent(&self, d: usize) -> usize {
        self.hi[d] - self.lo[d]
    }

    /// Edge-grid index ranges (start, dims) of this box for direction `dir`.
    fn edge_window(&self, dir: usize) -> ([usize; 3], [usize; 3]) {
        let mut start = self.lo;
        let mut dims = [
            self.hi[0] - self.lo[0],
            self.hi[1] - self.lo[1],
            self.hi[2] - self.lo[2],
        ];
        for t in 0..3 {
            if t != dir {
                dims[t] += 1;
            }
        }
        start[dir] = self.lo[dir];
        (start, dims)
    }

    fn block_len(&self, dir: usize) -> usize {
        let (_, d) = self.edge_window(dir);
        d[0] * d[1] * d[2]
    }

    pub fn edge_count(&self) -> usize {
        (0..3).map(|d| self.block_len(d)).sum()
    }

    /// Local index of the edge `(dir, ijk)` if it lies in the box.
    pub fn local_id(&self, dir: usize, ijk: [usize; 3]) -> Option<usize> {
        let (start, dims) = self.edge_window(dir);
        let mut rel = [0usize; 3];
        for t in 0..3 {
            if ijk[t] < start[t] || ijk[t] >= start[t] + dims[t] {
                return None;
            }
            rel[t] = ijk[t] - start[t];
        }
        let mut off = 0;
        for d in 0..dir {
            off += self.block_len(d);
        }
        Some(off + rel[0] + dims[0] * (rel[1] + dims[1] * rel[2]))
    }

    pub fn global_to_local(&self, global: usize) -> Option<usize> {
        let (dir, ijk) = self.mesh.edge_decompose(global);
        self.local_id(dir, ijk)
    }

    pub fn local_to_global(&self, local: usize) -> usize {
        let mut rest = local;
        for dir in 0..3 {
            let n = self.block_len(dir);
            if rest < n {
                let (start, dims) = self.edge_window(dir);
                let i = rest % dims[0];
                let j = (rest / dims[0]) % dims[1];
                let k = rest / (dims[0] * dims[1]);
                return self
                    .mesh
                    .edge_id(dir, [start[0] + i, start[1] + j, start[2] + k]);
            }
            rest -= n;
        }
        panic!("local edge id {local} out of range");
    }

    /// All global edge ids of the box, ascending.
    pub fn dof_ids(&self) -> Vec<usize> {
        let n = self.edge_count();
        let mut out = Vec::with_capacity(n);
        for local in 0..n {
            out.push(self.local_to_global(local));
        }
        out
    }

    /// Iterate cells of the box in canonical (linear) order.
    pub fn cells(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let lo = self.lo;
        let hi = self.hi;
        (lo[2]..hi[2]).flat_map(move |k| {
            (lo[1]..hi[1]).flat_map(move |j| (lo[0]..hi[0]).map(move |i| [i, j, k]))
        })
    }
}
