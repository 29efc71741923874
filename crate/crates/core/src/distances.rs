//! Nearest-base-station distance laws.
//!
//! Terrestrial tier: the void probability of the inhomogeneous PPP gives the
//! CDF of the horizontal distance to the closest surviving TBS; the survival
//! function is always computed as `exp(-exponent)` directly so the deep tail
//! never suffers `1 - CDF` cancellation.
//!
//! Aerial tier: the single-UAV distance law is the lens-area ratio, and the
//! fleet minimum follows by order statistics.

use crate::geometry::{angular_splits, lens_area, lens_area_deriv, r_omega, radial_crossings};
use crate::quadrature::{integrate_with_splits, DiagCell, QuadConfig};
use crate::scenario::Scenario;
use crate::Error;
use std::f64::consts::PI;

/// Evaluable CDF/PDF bundle for the nearest-distance laws of one scenario.
///
/// Supports: the terrestrial law lives on `[0, inf)`; the aerial laws live
/// on `[max(0, r_u - r_d), r_u + r_d]` and are constant outside.
#[derive(Debug, Clone)]
pub struct DistanceLaws<'a> {
    s: &'a Scenario,
    cfg: QuadConfig,
}

impl<'a> DistanceLaws<'a> {
    pub fn new(s: &'a Scenario, cfg: QuadConfig) -> Self {
        DistanceLaws { s, cfg }
    }

    pub fn scenario(&self) -> &Scenario {
        self.s
    }

    /// Support of the aerial horizontal distances `[max(0, r_u - r_d), r_u + r_d]`.
    pub fn support_a(&self) -> (f64, f64) {
        ((self.s.r_u - self.s.r_d).max(0.0), self.s.r_u + self.s.r_d)
    }

    /// Mean number of surviving TBSs within horizontal distance `z` of the
    /// UE: the double integral of the intensity over the UE-centered disc.
    pub fn void_exponent(&self, z: f64) -> Result<f64, Error> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let s = self.s;
        let inner_cfg = self.cfg.tightened(1e-2);
        let diag = DiagCell::new();
        let inner = |beta: f64| {
            let splits: Vec<f64> = radial_crossings(s.r_u, s.r_d, beta)
                .into_iter()
                .flatten()
                .collect();
            diag.absorb(integrate_with_splits(
                |w| s.lambda_t(r_omega(s.r_u, w, beta)) * w,
                0.0,
                z,
                &splits,
                &inner_cfg,
            ))
        };
        let outer = integrate_with_splits(
            inner,
            0.0,
            PI,
            &angular_splits(s.r_u, s.r_d, z),
            &self.cfg,
        );
        let d = diag.take();
        match outer {
            Ok(q) if !d.nonconverged => Ok(2.0 * q.value),
            Ok(q) => Err(Error::NonConvergence { value: 2.0 * q.value, err: 2.0 * d.worst_err }),
            Err(e) => Err(e.into()),
        }
    }

    /// CDF of the horizontal distance to the closest surviving TBS.
    pub fn cdf_zt(&self, z: f64) -> Result<f64, Error> {
        Ok(1.0 - self.sf_zt(z)?)
    }

    /// Survival function of the terrestrial nearest distance, computed as
    /// `exp(-exponent)` directly.
    pub fn sf_zt(&self, z: f64) -> Result<f64, Error> {
        Ok((-self.void_exponent(z)?).exp())
    }

    /// PDF of the terrestrial nearest distance: survival times the angular
    /// intensity integral on the circle of radius `z`.
    pub fn pdf_zt(&self, z: f64) -> Result<f64, Error> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let s = self.s;
        let sf = self.sf_zt(z)?;
        let ang = integrate_with_splits(
            |beta| s.lambda_t(r_omega(s.r_u, z, beta)),
            0.0,
            PI,
            &angular_splits(s.r_u, s.r_d, z),
            &self.cfg,
        )?;
        Ok(z * sf * 2.0 * ang.value)
    }

    /// Radius beyond which the remaining terrestrial probability mass is at
    /// most `mass`, from the homogeneous annulus bound
    /// `sf_zt(z) <= exp(-lambda0 pi (z^2 - r_d^2))`.
    pub fn zt_tail_radius(&self, mass: f64) -> f64 {
        let s = self.s;
        let q = -(mass.min(1.0)).ln() / (s.lambda0 * PI);
        (s.r_d * s.r_d + q).sqrt()
    }

    /// CDF of the horizontal distance between the UE and one uniformly
    /// placed UAV: lens area over disaster-disc area.
    pub fn cdf_omega_a(&self, omega: f64) -> f64 {
        let s = self.s;
        (lens_area(s.r_u, s.r_d, omega) / (PI * s.r_d * s.r_d)).clamp(0.0, 1.0)
    }

    pub fn sf_omega_a(&self, omega: f64) -> f64 {
        1.0 - self.cdf_omega_a(omega)
    }

    /// PDF of the single-UAV horizontal distance.
    pub fn pdf_omega_a(&self, omega: f64) -> f64 {
        let s = self.s;
        lens_area_deriv(s.r_u, s.r_d, omega) / (PI * s.r_d * s.r_d)
    }

    /// CDF of the closest-UAV horizontal distance. With no UAVs deployed the
    /// law is identically zero so downstream sums stay well-defined.
    pub fn cdf_za(&self, z: f64) -> f64 {
        if self.s.n_a == 0 {
            return 0.0;
        }
        1.0 - self.sf_za(z)
    }

    pub fn sf_za(&self, z: f64) -> f64 {
        self.sf_omega_a(z).powi(self.s.n_a as i32)
    }

    /// PDF of the closest-UAV horizontal distance (order statistic of the
    /// fleet minimum).
    pub fn pdf_za(&self, z: f64) -> f64 {
        let n = self.s.n_a;
        if n == 0 {
            return 0.0;
        }
        n as f64 * self.sf_omega_a(z).powi(n as i32 - 1) * self.pdf_omega_a(z)
    }
}
