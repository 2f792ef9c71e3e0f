//! Physical constants of a time-harmonic run.

use crate::{Error, C64};

/// Frequency, wave speed and material data for one run.
///
/// The permeability is fixed so that `omega^2 * eps0 * mu0 == (omega/c)^2`
/// with relative permittivity 1, i.e. `eps0 * mu0 == 1/c^2`. All experiments
/// use the convention `c = 1`, but nothing below depends on it.
///
/// The symbol sigma is used both for the physical conductivity and for the
/// PML stretching function in the underlying model; here the former is named
/// `conductivity` (default 0) and the latter lives in [`crate::pml`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsSpec {
    /// Frequency f (Hz).
    pub frequency: f64,
    /// Wave speed c (m/s).
    pub wave_speed: f64,
    /// Background relative permittivity.
    pub eps_r_background: f64,
    /// Electrical conductivity (S/m). Enters the complex permittivity as
    /// `eps_sigma = eps0 * eps_r - i * conductivity / omega`.
    pub conductivity: f64,
    /// Permeability of free space; kept explicit so the assembled operator
    /// reads exactly as written, with `mu0 = 1` under the `c = 1` convention.
    pub mu0: f64,
}

impl PhysicsSpec {
    pub fn new(frequency: f64, wave_speed: f64) -> Self {
        Self {
            frequency,
            wave_speed,
            eps_r_background: 1.0,
            conductivity: 0.0,
            mu0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.frequency > 0.0) {
            return Err(Error::Physics(format!(
                "frequency must be positive, got {}",
                self.frequency
            )));
        }
        if !(self.wave_speed > 0.0) {
            return Err(Error::Physics(format!(
                "wave speed must be positive, got {}",
                self.wave_speed
            )));
        }
        if !(self.eps_r_background >= 1.0) {
            return Err(Error::Physics(format!(
                "background eps_r must be >= 1, got {}",
                self.eps_r_background
            )));
        }
        if self.conductivity < 0.0 {
            return Err(Error::Physics("conductivity must be >= 0".into()));
        }
        Ok(())
    }

    /// Angular frequency `omega = 2 pi f`.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency
    }

    /// Wavelength `lambda = c / f`.
    pub fn wavelength(&self) -> f64 {
        self.wave_speed / self.frequency
    }

    /// Wavenumber `k = omega / c = 2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        self.omega() / self.wave_speed
    }

    /// Vacuum permittivity implied by `eps0 * mu0 = 1 / c^2`.
    pub fn eps0(&self) -> f64 {
        1.0 / (self.wave_speed * self.wave_speed * self.mu0)
    }

    /// Complex permittivity `eps_sigma = eps0 * eps_r - i * conductivity / omega`
    /// for a given relative permittivity.
    pub fn eps_sigma(&self, eps_r: f64) -> C64 {
        C64::new(self.eps0() * eps_r, -self.conductivity / self.omega())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = PhysicsSpec::new(0.5, 1.0);
        assert!((p.wavelength() - 2.0).abs() < 1e-15);
        assert!((p.omega() - std::f64::consts::PI).abs() < 1e-15);
        assert!((p.wavenumber() - std::f64::consts::PI).abs() < 1e-15);
        // omega^2 eps0 mu0 == (omega/c)^2
        let lhs = p.omega().powi(2) * p.eps0() * p.mu0;
        assert!((lhs - p.wavenumber().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn eps_sigma_lossless_default() {
        let p = PhysicsSpec::new(1.0, 1.0);
        let e = p.eps_sigma(1.0);
        assert_eq!(e, C64::new(1.0, 0.0));
        let e4 = p.eps_sigma(4.0);
        assert_eq!(e4, C64::new(4.0, 0.0));
    }

    #[test]
    fn eps_sigma_with_conductivity() {
        let mut p = PhysicsSpec::new(1.0, 1.0);
        p.conductivity = 0.5;
        let e = p.eps_sigma(1.0);
        assert!((e.re - 1.0).abs() < 1e-15);
        assert!((e.im + 0.5 / p.omega()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PhysicsSpec::new(0.0, 1.0).validate().is_err());
        assert!(PhysicsSpec::new(1.0, 0.0).validate().is_err());
        let mut p = PhysicsSpec::new(1.0, 1.0);
        p.conductivity = -1.0;
        assert!(p.validate().is_err());
    }
}
