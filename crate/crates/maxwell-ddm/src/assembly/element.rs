//! Lowest-order edge element kernels on the reference hexahedron.
//!
//! The reference cell is `[0,1]^3` mapped to a physical cube of side `h`.
//! Basis functions are indexed 0..12 in the order of
//! [`crate::grid::Mesh::cell_edges`]: four x-directed, four y-directed, four
//! z-directed, the transverse offsets ordered (0,0), (1,0), (0,1), (1,1).
//! Values are scaled so the defining property holds in physical coordinates:
//! the tangential line integral of basis `e` along edge `e'` is the Kronecker
//! delta. All edges point along the positive axes (lower to higher vertex),
//! so no sign bookkeeping is needed between neighboring cells.

use crate::pml::PmlTensors;
use crate::C64;

/// 2-point Gauss abscissae on [0, 1]; weights are 1/2 each.
pub const GAUSS2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

#[inline]
fn l(b: usize, t: f64) -> f64 {
    if b == 0 {
        1.0 - t
    } else {
        t
    }
}

#[inline]
fn dl(b: usize) -> f64 {
    if b == 0 {
        -1.0
    } else {
        1.0
    }
}

const OFFS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// Value and curl of the 12 edge basis functions at a reference point, in
/// physical components for a cell of size `h`.
pub fn edge_shapes(p: [f64; 3], h: f64) -> [([f64; 3], [f64; 3]); 12] {
    let [x, y, z] = p;
    let h2 = h * h;
    let mut out = [([0.0; 3], [0.0; 3]); 12];
    for (n, &(b, c)) in OFFS.iter().enumerate() {
        // x-directed edge at transverse offsets (y=b, z=c)
        out[n] = (
            [l(b, y) * l(c, z) / h, 0.0, 0.0],
            [0.0, l(b, y) * dl(c) / h2, -dl(b) * l(c, z) / h2],
        );
        // y-directed edge at (x=b, z=c)
        out[4 + n] = (
            [0.0, l(b, x) * l(c, z) / h, 0.0],
            [-l(b, x) * dl(c) / h2, 0.0, dl(b) * l(c, z) / h2],
        );
        // z-directed edge at (x=b, y=c)
        out[8 + n] = (
            [0.0, 0.0, l(b, x) * l(c, y) / h],
            [l(b, x) * dl(c) / h2, -dl(b) * l(c, y) / h2, 0.0],
        );
    }
    out
}

/// Complex 12x12 element matrix pair.
pub type ElementMatrix = [[C64; 12]; 12];

/// Curl-curl and mass element matrices with diagonal material tensors
/// evaluated per quadrature point (2x2x2 Gauss).
///
/// `ke[i][j] = sum_q w_q (Lambda_c(q) curl N_i) . curl N_j`
/// `me[i][j] = sum_q w_q (Lambda_m(q) N_i) . N_j`
///
/// The mass matrix excludes the `eps_sigma * mu0` factor, which is constant
/// per cell and applied by the caller.
pub fn element_matrices(
    h: f64,
    tensors_at: impl Fn([f64; 3]) -> PmlTensors,
) -> (ElementMatrix, ElementMatrix) {
    let zero = C64::new(0.0, 0.0);
    let mut ke = [[zero; 12]; 12];
    let mut me = [[zero; 12]; 12];
    let w = h * h * h / 8.0;
    for &gz in &GAUSS2 {
        for &gy in &GAUSS2 {
            for &gx in &GAUSS2 {
                let t = tensors_at([gx, gy, gz]);
                let shapes = edge_shapes([gx, gy, gz], h);
                for i in 0..12 {
                    let (vi, ci) = shapes[i];
                    // tensor applied to the test function once per (i, q)
                    let tci = [t.curl[0] * ci[0], t.curl[1] * ci[1], t.curl[2] * ci[2]];
                    let tvi = [t.mass[0] * vi[0], t.mass[1] * vi[1], t.mass[2] * vi[2]];
                    for j in 0..12 {
                        let (vj, cj) = shapes[j];
                        ke[i][j] += (tci[0] * cj[0] + tci[1] * cj[1] + tci[2] * cj[2]) * w;
                        me[i][j] += (tvi[0] * vj[0] + tvi[1] * vj[1] + tvi[2] * vj[2]) * w;
                    }
                }
            }
        }
    }
    (ke, me)
}

/// Tangential face mass matrix for the impedance surface term on the face of
/// a cell: `bf[i][j] = int_face (N_i x n) . (N_j x n) dS`, which equals the
/// dot product of the tangential components. Real-valued; entries vanish for
/// basis functions without tangential trace on that face.
pub fn face_mass(h: f64, axis: usize, side: usize) -> [[f64; 12]; 12] {
    let mut bf = [[0.0; 12]; 12];
    let w = h * h / 4.0;
    let coord = side as f64;
    for &g1 in &GAUSS2 {
        for &g2 in &GAUSS2 {
            let mut p = [0.0; 3];
            p[axis] = coord;
            let (t1, t2) = transverse(axis);
            p[t1] = g1;
            p[t2] = g2;
            let shapes = edge_shapes(p, h);
            for i in 0..12 {
                let vi = tangential(shapes[i].0, axis);
                for j in 0..12 {
                    let vj = tangential(shapes[j].0, axis);
                    bf[i][j] += (vi[0] * vj[0] + vi[1] * vj[1] + vi[2] * vj[2]) * w;
                }
            }
        }
    }
    bf
}

/// Surface load `b_i = int_face g . N_i dS` for a constant tangential vector
/// `g` on the face of one cell.
pub fn face_load(h: f64, axis: usize, side: usize, g: [C64; 3]) -> [C64; 12] {
    let zero = C64::new(0.0, 0.0);
    let mut out = [zero; 12];
    let w = h * h / 4.0;
    let coord = side as f64;
    for &g1 in &GAUSS2 {
        for &g2 in &GAUSS2 {
            let mut p = [0.0; 3];
            p[axis] = coord;
            let (t1, t2) = transverse(axis);
            p[t1] = g1;
            p[t2] = g2;
            let shapes = edge_shapes(p, h);
            for i in 0..12 {
                let v = tangential(shapes[i].0, axis);
                out[i] += (g[0] * v[0] + g[1] * v[1] + g[2] * v[2]) * w;
            }
        }
    }
    out
}

#[inline]
fn transverse(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => unreachable!(),
    }
}

#[inline]
fn tangential(mut v: [f64; 3], axis: usize) -> [f64; 3] {
    v[axis] = 0.0;
    v
}

/// Local start/end vertices (reference coordinates) of the 12 edges, matching
/// the basis ordering.
pub fn edge_endpoints() -> [([f64; 3], [f64; 3]); 12] {
    let mut out = [([0.0; 3], [0.0; 3]); 12];
    for (n, &(b, c)) in OFFS.iter().enumerate() {
        let (bf, cf) = (b as f64, c as f64);
        out[n] = ([0.0, bf, cf], [1.0, bf, cf]);
        out[4 + n] = ([bf, 0.0, cf], [bf, 1.0, cf]);
        out[8 + n] = ([bf, cf, 0.0], [bf, cf, 1.0]);
    }
    out
}
