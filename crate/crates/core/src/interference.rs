//! Conditional Laplace transforms of the interference and the s-derivatives
//! needed by the exact coverage expression.
//!
//! Terrestrial interferers form an inhomogeneous PPP outside the exclusion
//! radius; the probability generating functional turns their aggregate into
//! an exponential of a planar integral. Aerial interferers are the remaining
//! BPP points, conditionally iid outside the exclusion radius, so their
//! transform is a single truncated integral raised to the interferer count.
//!
//! Derivatives in `s` (orders up to 4) come from closed-form derivatives of
//! the fading kernels pushed under the integrals, combined through the
//! product/exponential recurrences. That covers every Nakagami shape the
//! exact coverage sum supports.

use crate::distances::DistanceLaws;
use crate::geometry::{
    angular_splits, exclusion_z, r_omega, radial_crossings, ExclusionPair,
};
use crate::quadrature::{
    integrate_semi_infinite, integrate_with_splits, DiagCell, QuadConfig,
};
use crate::scenario::{Scenario, Tier};
use crate::Error;
use std::f64::consts::PI;

/// Highest Laplace derivative order implemented analytically.
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Evaluator of the conditional interference Laplace transforms for one
/// tagged configuration (tier `b` at horizontal distance `z`).
///
/// Exclusion radii and the aerial truncation normalizer are cached at
/// construction; the evaluator itself is immutable and freely shareable.
#[derive(Debug, Clone)]
pub struct LaplaceEval<'a> {
    s: &'a Scenario,
    cfg: QuadConfig,
    pub b: Tier,
    pub z: f64,
    /// Horizontal exclusion radius for terrestrial interferers.
    pub z_bt: f64,
    /// Horizontal exclusion radius for aerial interferers.
    pub z_ba: f64,
    /// Effective aerial interferer count: the fleet minus the server if the
    /// server is aerial.
    pub n_eff: u32,
    /// Upper end of the aerial support, `r_u + r_d`.
    r_plus: f64,
    /// Aerial truncation normalizer `sf_omega_a(z_ba)`.
    sf_norm: f64,
}

/// Rising factorial `(m)_j = m (m+1) ... (m+j-1)`.
fn rising(m: u32, j: usize) -> f64 {
    (0..j).map(|i| (m as f64) + i as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Generalized Leibniz rule: derivatives of a product from the derivative
/// arrays of its factors.
fn leibniz(a: &[f64], b: &[f64]) -> Vec<f64> {
    let k = a.len() - 1;
    let mut out = vec![0.0; k + 1];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..=i {
            *o += binom(i, j) * a[j] * b[i - j];
        }
    }
    out
}

impl<'a> LaplaceEval<'a> {
    pub fn new(s: &'a Scenario, cfg: QuadConfig, b: Tier, z: f64) -> Self {
        let z_bt = exclusion_z(ExclusionPair::new(b, Tier::T), s, z);
        let z_ba = exclusion_z(ExclusionPair::new(b, Tier::A), s, z);
        let n_eff = match b {
            Tier::A => s.n_a.saturating_sub(1),
            Tier::T => s.n_a,
        };
        let laws = DistanceLaws::new(s, cfg);
        LaplaceEval {
            s,
            cfg,
            b,
            z,
            z_bt,
            z_ba,
            n_eff,
            r_plus: s.r_u + s.r_d,
            sf_norm: laws.sf_omega_a(z_ba),
        }
    }

    /// Conditional PDF of one aerial interferer's horizontal distance:
    /// the single-UAV law truncated to `[z_ba, r_u + r_d]` and renormalized.
    pub fn cond_interferer_pdf(&self, omega_chk: f64) -> Result<f64, Error> {
        if self.sf_norm <= 0.0 {
            return Err(Error::DegenerateTruncation { z_ba: self.z_ba });
        }
        if omega_chk < self.z_ba || omega_chk > self.r_plus {
            return Ok(0.0);
        }
        let laws = DistanceLaws::new(self.s, self.cfg);
        Ok(laws.pdf_omega_a(omega_chk) / self.sf_norm)
    }

    /// Fading kernel of terrestrial interferers and its s-derivatives.
    /// Order 0 is `1 - (1 + xi_T s w^-alpha / m)^-m`; higher orders are the
    /// closed-form derivatives with the rising-factorial coefficient.
    fn kernel_t(&self, j: usize, s_arg: f64, w: f64) -> f64 {
        let tp = &self.s.tier_t;
        let m = tp.m;
        let c = tp.xi() * w.powf(-tp.alpha) / m as f64;
        let base = 1.0 + c * s_arg;
        if j == 0 {
            1.0 - base.powi(-(m as i32))
        } else {
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            sign * rising(m, j) * c.powi(j as i32) * base.powi(-(m as i32) - j as i32)
        }
    }

    /// Fading kernel of aerial interferers and its s-derivatives. Order 0 is
    /// the gamma MGF factor `(1 + xi_A s D^-alpha / m)^-m` with `D` the
    /// Euclidean distance lifted by the altitude.
    fn kernel_a(&self, j: usize, s_arg: f64, w: f64) -> f64 {
        let tp = &self.s.tier_a;
        let m = tp.m;
        let d2 = w * w + self.s.h * self.s.h;
        let c = tp.xi() * d2.powf(-0.5 * tp.alpha) / m as f64;
        let base = 1.0 + c * s_arg;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * rising(m, j) * c.powi(j as i32) * base.powi(-(m as i32) - j as i32)
    }

    /// j-th derivative of the (negative) exponent of the terrestrial
    /// transform: the planar integral of intensity times kernel, split into
    /// the inhomogeneous annulus and the homogeneous semi-infinite tail.
    fn exponent_deriv(&self, j: usize, s_arg: f64, diag: &DiagCell) -> f64 {
        let s = self.s;
        let r0 = self.z_bt.max(self.r_plus);
        let inner_cfg = self.cfg.tightened(1e-2);

        let mut total = 0.0;
        if self.z_bt < r0 {
            let inner = |beta: f64| {
                let mut splits: Vec<f64> = radial_crossings(s.r_u, s.r_d, beta)
                    .into_iter()
                    .flatten()
                    .collect();
                splits.retain(|w| *w > self.z_bt && *w < r0);
                diag.absorb(integrate_with_splits(
                    |w| s.lambda_t(r_omega(s.r_u, w, beta)) * self.kernel_t(j, s_arg, w) * w,
                    self.z_bt,
                    r0,
                    &splits,
                    &inner_cfg,
                ))
            };
            let mut ang = angular_splits(s.r_u, s.r_d, self.z_bt);
            ang.extend(angular_splits(s.r_u, s.r_d, r0));
            total += 2.0
                * diag.absorb(integrate_with_splits(inner, 0.0, PI, &ang, &self.cfg));
        }
        // Beyond r0 the intensity is homogeneous and the angle integrates
        // to 2 pi.
        total += 2.0
            * PI
            * s.lambda0
            * diag.absorb(integrate_semi_infinite(
                |w| self.kernel_t(j, s_arg, w) * w,
                r0,
                &self.cfg,
            ));
        -total
    }

    /// Derivatives (orders 0..=k) of the terrestrial interference transform.
    pub fn lap_t_derivs(&self, s_arg: f64, k: usize) -> Result<Vec<f64>, Error> {
        check_order(k)?;
        if s_arg < 0.0 {
            panic!("Laplace argument must be nonnegative, got {s_arg}");
        }
        let diag = DiagCell::new();
        let g: Vec<f64> = (0..=k)
            .map(|j| self.exponent_deriv(j, s_arg, &diag))
            .collect();
        let mut l = vec![0.0; k + 1];
        l[0] = g[0].exp();
        for n in 1..=k {
            l[n] = (0..n).map(|j| binom(n - 1, j) * g[n - j] * l[j]).sum();
        }
        finish_vec(l, diag)
    }

    /// k-th derivative of the terrestrial interference transform.
    pub fn lap_t(&self, s_arg: f64, k: usize) -> Result<f64, Error> {
        Ok(self.lap_t_derivs(s_arg, k)?[k])
    }

    /// Derivatives (orders 0..=j) of the single-interferer aerial factor.
    fn upsilon_derivs(&self, s_arg: f64, k: usize, diag: &DiagCell) -> Vec<f64> {
        let s = self.s;
        let laws = DistanceLaws::new(s, self.cfg);
        // Kinks of the single-UAV pdf inside the truncated support.
        let mut splits = vec![(s.r_u - s.r_d).abs()];
        splits.retain(|w| *w > self.z_ba && *w < self.r_plus);
        (0..=k)
            .map(|j| {
                diag.absorb(integrate_with_splits(
                    |w| self.kernel_a(j, s_arg, w) * laws.pdf_omega_a(w) / self.sf_norm,
                    self.z_ba,
                    self.r_plus,
                    &splits,
                    &self.cfg,
                ))
            })
            .collect()
    }

    /// Derivatives (orders 0..=k) of the aerial interference transform
    /// `Upsilon^n_eff`. With no effective interferers, or with the whole
    /// fleet excluded (degenerate normalizer), the transform is identically
    /// one: the associated weight in the coverage integral is zero there, so
    /// the convention only removes a 0/0.
    pub fn lap_a_derivs(&self, s_arg: f64, k: usize) -> Result<Vec<f64>, Error> {
        check_order(k)?;
        let mut unit = vec![0.0; k + 1];
        unit[0] = 1.0;
        if self.n_eff == 0 || self.sf_norm <= 1e-300 || self.z_ba >= self.r_plus {
            return Ok(unit);
        }
        let diag = DiagCell::new();
        let u = self.upsilon_derivs(s_arg, k, &diag);
        let mut p = unit;
        for _ in 0..self.n_eff {
            p = leibniz(&u, &p);
        }
        finish_vec(p, diag)
    }

    /// k-th derivative of the aerial interference transform.
    pub fn lap_a(&self, s_arg: f64, k: usize) -> Result<f64, Error> {
        Ok(self.lap_a_derivs(s_arg, k)?[k])
    }

    /// Derivatives (orders 0..=k) of the noise-folded aggregate transform
    /// `exp(-s sigma_n^2) * lap_t * lap_a`.
    pub fn lap_total_derivs(&self, s_arg: f64, k: usize) -> Result<Vec<f64>, Error> {
        check_order(k)?;
        let lt = self.lap_t_derivs(s_arg, k)?;
        let la = self.lap_a_derivs(s_arg, k)?;
        let sn2 = self.s.sigma_n2;
        let noise: Vec<f64> = (0..=k)
            .map(|j| (-sn2).powi(j as i32) * (-s_arg * sn2).exp())
            .collect();
        Ok(leibniz(&leibniz(&lt, &la), &noise))
    }

    /// k-th derivative of the aggregate (noise-folded) transform.
    pub fn lap_total(&self, s_arg: f64, k: usize) -> Result<f64, Error> {
        Ok(self.lap_total_derivs(s_arg, k)?[k])
    }
}

fn check_order(k: usize) -> Result<(), Error> {
    if k > MAX_DERIVATIVE_ORDER {
        Err(Error::DerivativeOrder(k))
    } else {
        Ok(())
    }
}

fn finish_vec(v: Vec<f64>, diag: DiagCell) -> Result<Vec<f64>, Error> {
    let d = diag.take();
    if d.nonconverged {
        Err(Error::NonConvergence { value: v[0], err: d.worst_err })
    } else {
        Ok(v)
    }
}
