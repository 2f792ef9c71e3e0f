//! Perfectly matched layers via singular coordinate stretching.
//!
//! A layer occupies the interval between `a` (inner edge, where absorption
//! starts) and `a_star` (outer edge, where the stretching function has its
//! pole). Two profiles are provided:
//!
//! - `sigma_m1(t) = 1 / (a_star - t)`
//! - `sigma_m2(t) = 2 / (a_star - t)^2`
//!
//! both zero outside the layer and unbounded at the pole. The complex stretch
//! factor is `s = 1 - (i/omega) * sigma`, and the stretched curl-curl form is
//! realized through the equivalent anisotropic material tensors
//! `Lambda_m = diag(s_y s_z / s_x, s_z s_x / s_y, s_x s_y / s_z)` (mass) and
//! its inverse (curl), so assembly only sees diagonal complex coefficients.
//! Layers in two or three directions at a corner simply multiply out
//! component-wise.

use crate::C64;

/// Which stretching function a layer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaKind {
    /// `1 / (a_star - t)`
    M1,
    /// `scale / (a_star - t)^2`, scale defaulting to 2
    M2,
    /// No stretching; the profile evaluates to zero everywhere.
    None,
}

/// Orientation of a layer along its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Absorption grows with the coordinate; pole at `a_star > a`.
    Increasing,
    /// Absorption grows against the coordinate; pole at `a_star < a`.
    Decreasing,
}

/// One PML layer along one axis.
///
/// `a` is the layer start (interior side), `a_star` the layer end (pole).
/// The orientation is implied by their order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchProfile {
    pub kind: SigmaKind,
    pub a: f64,
    pub a_star: f64,
    /// Numerator of the `M2` profile; kept configurable, 2 as written.
    pub m2_scale: f64,
}

impl StretchProfile {
    pub fn new(kind: SigmaKind, a: f64, a_star: f64) -> Self {
        if kind != SigmaKind::None {
            assert!(
                a != a_star,
                "PML layer must have positive thickness (a = a_star = {a})"
            );
        }
        Self {
            kind,
            a,
            a_star,
            m2_scale: 2.0,
        }
    }

    /// A profile that never stretches.
    pub fn none() -> Self {
        Self {
            kind: SigmaKind::None,
            a: 0.0,
            a_star: 0.0,
            m2_scale: 2.0,
        }
    }

    pub fn orientation(&self) -> Orientation {
        if self.a_star >= self.a {
            Orientation::Increasing
        } else {
            Orientation::Decreasing
        }
    }

    /// Layer thickness `|a_star - a|`.
    pub fn thickness(&self) -> f64 {
        (self.a_star - self.a).abs()
    }

    /// Whether the active interval intersects `[lo, hi]`.
    pub fn active_on(&self, lo: f64, hi: f64) -> bool {
        if self.kind == SigmaKind::None {
            return false;
        }
        let (a, b) = match self.orientation() {
            Orientation::Increasing => (self.a, self.a_star),
            Orientation::Decreasing => (self.a_star, self.a),
        };
        hi > a && lo < b
    }

    /// Evaluate the stretching function at coordinate `t`.
    ///
    /// Zero outside the layer, positive inside, unbounded toward the pole.
    /// Evaluation exactly at the pole `t == a_star` is rejected; quadrature
    /// points lie strictly inside cells and never land there.
    pub fn sigma(&self, t: f64) -> f64 {
        if self.kind == SigmaKind::None {
            return 0.0;
        }
        assert!(
            t != self.a_star,
            "stretching function evaluated at its pole t = a_star = {t}"
        );
        // distance to the pole, measured into the layer
        let depth = match self.orientation() {
            Orientation::Increasing => {
                if t < self.a || t > self.a_star {
                    return 0.0;
                }
                self.a_star - t
            }
            Orientation::Decreasing => {
                if t > self.a || t < self.a_star {
                    return 0.0;
                }
                t - self.a_star
            }
        };
        match self.kind {
            SigmaKind::M1 => 1.0 / depth,
            SigmaKind::M2 => self.m2_scale / (depth * depth),
            SigmaKind::None => unreachable!(),
        }
    }
}

/// Complex stretch factor `s = 1 - (i/omega) * sigma`.
///
/// The derivative mapping uses `1/s`; `Re(s) = 1` always, so `s` never
/// vanishes.
pub fn stretch_factor(sigma_value: f64, omega: f64) -> C64 {
    debug_assert!(omega > 0.0);
    C64::new(1.0, -sigma_value / omega)
}

/// Per-direction stretch factors at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchState {
    pub s: [C64; 3],
}

impl StretchState {
    pub fn identity() -> Self {
        Self {
            s: [C64::new(1.0, 0.0); 3],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.s.iter().all(|s| s.im == 0.0 && s.re == 1.0)
    }
}

/// Diagonal material tensors realizing the stretched curl-curl form.
///
/// The assembled operator is `curl(curl_tensor curl E) - omega^2 eps_sigma
/// mu0 mass_tensor E`, with `curl_tensor = mass_tensor^-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlTensors {
    pub curl: [C64; 3],
    pub mass: [C64; 3],
}

impl PmlTensors {
    pub fn identity() -> Self {
        Self {
            curl: [C64::new(1.0, 0.0); 3],
            mass: [C64::new(1.0, 0.0); 3],
        }
    }
}

/// Material tensors for a given stretch state.
pub fn pml_tensors(state: &StretchState) -> PmlTensors {
    if state.is_identity() {
        // keeps assembly outside all layers bit-identical to the unstretched path
        return PmlTensors::identity();
    }
    let [sx, sy, sz] = state.s;
    let mass = [sy * sz / sx, sz * sx / sy, sx * sy / sz];
    let curl = [sx / (sy * sz), sy / (sz * sx), sz / (sx * sy)];
    PmlTensors { curl, mass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_m1_direct_value() {
        // 1 / (1 - 0.5) = 2
        let p = StretchProfile::new(SigmaKind::M1, 0.0, 1.0);
        assert!((p.sigma(0.5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_m2_direct_value() {
        // 2 / 1^2 = 2
        let p = StretchProfile::new(SigmaKind::M2, 0.0, 1.0);
        assert!((p.sigma(0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_zero_outside_layer() {
        let p = StretchProfile::new(SigmaKind::M1, 0.0, 1.0);
        assert_eq!(p.sigma(-0.25), 0.0);
        assert_eq!(p.sigma(1.5), 0.0);
        let q = StretchProfile::new(SigmaKind::M2, 1.0, 0.0); // decreasing
        assert_eq!(q.sigma(1.5), 0.0);
        assert!((q.sigma(0.5) - 8.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "pole")]
    fn sigma_rejects_pole() {
        let p = StretchProfile::new(SigmaKind::M1, 0.0, 1.0);
        let _ = p.sigma(1.0);
    }

    #[test]
    fn stretch_factor_values() {
        assert_eq!(stretch_factor(0.0, 1.0), C64::new(1.0, 0.0));
        assert_eq!(stretch_factor(2.0, 1.0), C64::new(1.0, -2.0));
        assert_eq!(stretch_factor(4.0, 2.0), C64::new(1.0, -2.0));
    }

    #[test]
    fn tensors_identity_when_unstretched() {
        let t = pml_tensors(&StretchState::identity());
        assert_eq!(t, PmlTensors::identity());
    }

    #[test]
    fn tensors_single_direction() {
        // s = (1-i, 1, 1): mass = (1/(1-i), 1-i, 1-i) = ((1+i)/2, 1-i, 1-i)
        let st = StretchState {
            s: [C64::new(1.0, -1.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        };
        let t = pml_tensors(&st);
        let half = C64::new(0.5, 0.5);
        assert!((t.mass[0] - half).norm() < 1e-15);
        assert!((t.mass[1] - C64::new(1.0, -1.0)).norm() < 1e-15);
        assert!((t.mass[2] - C64::new(1.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn sigma_monotone_toward_pole() {
        for kind in [SigmaKind::M1, SigmaKind::M2] {
            let p = StretchProfile::new(kind, 0.0, 1.0);
            let mut last = 0.0;
            for i in 0..50 {
                let t = 0.001 + 0.99 * (i as f64) / 50.0;
                let v = p.sigma(t);
                assert!(v >= last, "sigma not nondecreasing toward pole");
                last = v;
            }
            let q = StretchProfile::new(kind, 1.0, 0.0);
            let mut last = 0.0;
            for i in 0..50 {
                let t = 0.999 - 0.99 * (i as f64) / 50.0;
                let v = q.sigma(t);
                assert!(v >= last, "decreasing-orientation sigma not monotone");
                last = v;
            }
        }
    }

    #[test]
    fn corner_tensors_match_componentwise_products() {
        // two and three stretched directions against independent evaluation
        let vals = [
            [0.7, -0.3, 0.0],
            [1.3, -2.0, -0.5],
            [2.2, 0.0, -1.7],
            [0.4, -0.9, -3.1],
            [1.1, -0.1, -0.2],
            [3.0, -2.5, 0.0],
            [0.9, 0.0, -4.0],
            [1.7, -1.2, -0.8],
            [2.8, -0.6, -2.2],
            [0.5, -3.3, -1.1],
        ];
        for v in vals {
            let v0: f64 = v[0];
            let s = [
                C64::new(1.0, v0.fract() - 1.0), // arbitrary negative imag
                C64::new(1.0, v[1]),
                C64::new(1.0, v[2]),
            ];
            let st = StretchState { s };
            let t = pml_tensors(&st);
            for d in 0..3 {
                let (e, f) = ((d + 1) % 3, (d + 2) % 3);
                let mass = s[e] * s[f] / s[d];
                let curl = s[d] / (s[e] * s[f]);
                assert!((t.mass[d] - mass).norm() < 1e-14);
                assert!((t.curl[d] - curl).norm() < 1e-14);
                // definitional inverse
                assert!((t.mass[d] * t.curl[d] - C64::new(1.0, 0.0)).norm() < 1e-13);
            }
        }
    }
}
