//! Physical parameters and their dimensionless groups.
//!
//! Lengths are scaled by `L_x`, time by `L_x^2 / alpha`, velocity by
//! `alpha / L_x`, pressure by `rho_0 alpha^2 / L_x^2` and temperature as
//! `theta = (T - T_c) / (T_h - T_c)`. Buoyancy acts along `+y`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("hot wall temperature {hot} is below cold wall temperature {cold}")]
    InvertedWalls { hot: f64, cold: f64 },
}

/// Dimensional description of the cavity and the fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScales {
    /// Gravitational acceleration.
    pub g: f64,
    /// Thermal expansion coefficient.
    pub beta: f64,
    /// Thermal diffusivity.
    pub alpha: f64,
    /// Kinematic viscosity.
    pub nu: f64,
    pub rho0: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    /// Cavity extents; `lengths[0]` is the reference length.
    pub lengths: [f64; 3],
}

/// The dimensionless groups that fully determine the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub ra: f64,
    pub pr: f64,
    /// `(A_x, A_y, A_z)`, lengths over `L_x`; `A_x = 1`.
    pub aspect: [f64; 3],
}

impl DimensionlessParams {
    pub fn cube(ra: f64, pr: f64) -> Self {
        Self {
            ra,
            pr,
            aspect: [1.0; 3],
        }
    }
}

impl PhysicalScales {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [("alpha", self.alpha), ("nu", self.nu), ("L_x", self.lengths[0])] {
            if !(v > 0.0) {
                return Err(ModelError::NonPositive(name, v));
            }
        }
        for (name, v) in [("L_y", self.lengths[1]), ("L_z", self.lengths[2])] {
            if !(v > 0.0) {
                return Err(ModelError::NonPositive(name, v));
            }
        }
        if self.t_hot < self.t_cold {
            return Err(ModelError::InvertedWalls {
                hot: self.t_hot,
                cold: self.t_cold,
            });
        }
        Ok(())
    }

    /// Velocity scale `alpha / L_x`.
    pub fn velocity_scale(&self) -> f64 {
        self.alpha / self.lengths[0]
    }

    /// Time scale `L_x^2 / alpha`.
    pub fn time_scale(&self) -> f64 {
        self.lengths[0] * self.lengths[0] / self.alpha
    }

    /// Pressure scale `rho_0 alpha^2 / L_x^2`.
    pub fn pressure_scale(&self) -> f64 {
        self.rho0 * self.alpha * self.alpha / (self.lengths[0] * self.lengths[0])
    }

    /// Dimensionless temperature of `t`.
    pub fn theta(&self, t: f64) -> f64 {
        (t - self.t_cold) / (self.t_hot - self.t_cold)
    }
}

/// `Ra = g beta (T_h - T_c) L_x^3 / (nu alpha)`, `Pr = nu / alpha`.
pub fn nondimensionalize(s: &PhysicalScales) -> Result<DimensionlessParams, ModelError> {
    s.validate()?;
    let l = s.lengths[0];
    Ok(DimensionlessParams {
        ra: s.g * s.beta * (s.t_hot - s.t_cold) * l * l * l / (s.nu * s.alpha),
        pr: s.nu / s.alpha,
        aspect: s.lengths.map(|v| v / l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air() -> PhysicalScales {
        PhysicalScales {
            g: 9.81,
            beta: 3.4e-3,
            alpha: 2.2e-5,
            nu: 0.71 * 2.2e-5,
            rho0: 1.2,
            t_hot: 300.0,
            t_cold: 290.0,
            lengths: [0.1; 3],
        }
    }

    #[test]
    fn air_has_prandtl_0_71() {
        let d = nondimensionalize(&air()).unwrap();
        assert!((d.pr - 0.71).abs() < 1e-12);
        assert_eq!(d.aspect, [1.0; 3]);
    }

    #[test]
    fn equal_walls_give_zero_rayleigh() {
        let mut s = air();
        s.t_hot = s.t_cold;
        assert_eq!(nondimensionalize(&s).unwrap().ra, 0.0);
    }

    #[test]
    fn doubling_length_multiplies_ra_by_eight() {
        let a = nondimensionalize(&air()).unwrap().ra;
        let mut s = air();
        s.lengths = [0.2; 3];
        let b = nondimensionalize(&s).unwrap().ra;
        assert!((b / a - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_scales() {
        let mut s = air();
        s.nu = 0.0;
        assert_eq!(nondimensionalize(&s), Err(ModelError::NonPositive("nu", 0.0)));
        let mut s = air();
        s.alpha = -1.0;
        assert!(nondimensionalize(&s).is_err());
        let mut s = air();
        s.t_hot = 280.0;
        assert!(matches!(nondimensionalize(&s), Err(ModelError::InvertedWalls { .. })));
    }

    #[test]
    fn theta_maps_walls_to_zero_and_one() {
        let s = air();
        assert_eq!(s.theta(s.t_hot), 1.0);
        assert_eq!(s.theta(s.t_cold), 0.0);
    }
}
