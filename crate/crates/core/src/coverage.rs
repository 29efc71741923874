//! Conditional and total downlink coverage probability.
//!
//! With integer Nakagami shapes the gamma CCDF of the serving link's fading
//! gain is a finite sum, so the conditional coverage probability is an
//! alternating sum of Laplace-transform derivatives evaluated at
//! `mu_B(z)` (exact route), or a binomial combination of transform values at
//! scaled arguments via the exponential bound on the gamma CDF (approximate
//! route, exact for m = 1). The total coverage probability integrates the
//! conditional one against the association-weighted nearest-distance laws.

use crate::association;
use crate::distances::DistanceLaws;
use crate::interference::{LaplaceEval, MAX_DERIVATIVE_ORDER};
use crate::quadrature::{integrate, integrate_with_splits, DiagCell, Quad, QuadConfig, QuadError};
use crate::scenario::{Scenario, Tier};
use crate::Error;

/// Evaluation route for the coverage probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Approximate,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approximate => "approximate",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// Coverage probability with its evaluation metadata.
#[derive(Debug, Clone)]
pub struct CoverageResult {
    pub p_c: f64,
    pub method: Method,
    /// Association-weighted per-tier contributions; they sum to `p_c`.
    pub contrib_a: f64,
    pub contrib_t: f64,
    /// Total association probabilities.
    pub assoc_a: f64,
    pub assoc_t: f64,
    /// Wilson 95% interval, Monte Carlo only.
    pub ci: Option<(f64, f64)>,
    /// Trial count, Monte Carlo only.
    pub trials: Option<u64>,
    /// Worst quadrature error estimate, analytic routes only.
    pub quad_err: f64,
    /// Set when some inner integral returned a best estimate without
    /// converging; the value is then indicative rather than certified.
    pub nonconverged: bool,
}

/// Gamma-CCDF threshold `mu_B(z) = m_B (tau / xi_B) D_BB(z)^alpha_B`.
pub fn mu_b(s: &Scenario, b: Tier, z: f64) -> f64 {
    let tp = s.tier(b);
    let d = crate::geometry::exclusion_d(crate::geometry::ExclusionPair::new(b, b), s, z);
    tp.m as f64 * (s.tau / tp.xi()) * d.powf(tp.alpha)
}

/// Exact conditional coverage probability (finite gamma-CCDF sum over
/// Laplace derivatives). Requires `m_B <= 4`.
pub fn cond_cov_exact(s: &Scenario, cfg: &QuadConfig, b: Tier, z: f64) -> Result<f64, Error> {
    let m = s.tier(b).m;
    if m as usize > MAX_DERIVATIVE_ORDER {
        return Err(Error::ShapeTooLarge(m));
    }
    let mu = mu_b(s, b, z);
    let ev = LaplaceEval::new(s, *cfg, b, z);
    let derivs = ev.lap_total_derivs(mu, m as usize - 1)?;
    let mut p = 0.0;
    let mut coeff = 1.0; // (-mu)^k / k!
    for (k, d) in derivs.iter().enumerate() {
        p += coeff * d;
        coeff *= -mu / (k as f64 + 1.0);
    }
    Ok(p)
}

/// Approximate conditional coverage probability: the binomial sum from the
/// exponential upper bound on the gamma CDF. Coincides with the exact value
/// at m = 1, where the bound is tight.
pub fn cond_cov_approx(s: &Scenario, cfg: &QuadConfig, b: Tier, z: f64) -> Result<f64, Error> {
    let m = s.tier(b).m;
    let mu = mu_b(s, b, z);
    let ev = LaplaceEval::new(s, *cfg, b, z);
    let eps2 = alzer_eps2(m);
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=m {
        p += sign * binom_u32(m, k) * ev.lap_total(k as f64 * eps2 * mu, 0)?;
        sign = -sign;
    }
    Ok(p)
}

/// Tightness constant of the gamma-CDF upper bound: `(m!)^(-1/m)`.
pub fn alzer_eps2(m: u32) -> f64 {
    let mut log_fact = 0.0;
    for i in 1..=m {
        log_fact += (i as f64).ln();
    }
    (-log_fact / m as f64).exp()
}

fn binom_u32(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Total coverage probability: association-weighted quadrature of the
/// conditional coverage over both tiers' nearest-distance laws.
///
/// `Method::MonteCarlo` delegates to the simulation oracle with its default
/// configuration; use [`crate::montecarlo::estimate`] directly for control
/// over trials and seed.
pub fn total_coverage(s: &Scenario, cfg: &QuadConfig, method: Method) -> Result<CoverageResult, Error> {
    if method == Method::MonteCarlo {
        let mc = crate::montecarlo::MCConfig::default();
        return Ok(crate::montecarlo::estimate(s, &mc).result);
    }
    s.validate()?;

    let laws = DistanceLaws::new(s, *cfg);
    let diag = DiagCell::new();
    let absorb = |r: Result<f64, Error>| -> f64 {
        diag.absorb(r.map(|v| Quad { value: v, err: 0.0 }).map_err(|e| match e {
            Error::NonConvergence { value, err } => QuadError::NonConvergence { value, err },
            other => panic!("unexpected analytic error inside integrand: {other}"),
        }))
    };
    let cond = |b: Tier, z: f64| -> Result<f64, Error> {
        match method {
            Method::Exact => cond_cov_exact(s, cfg, b, z),
            Method::Approximate => cond_cov_approx(s, cfg, b, z),
            Method::MonteCarlo => unreachable!(),
        }
    };

    // Aerial tier over its bounded support; skipped without UAVs.
    let contrib_a = if s.n_a == 0 {
        0.0
    } else {
        let (lo, hi) = laws.support_a();
        let f = |z: f64| {
            let a = absorb(association::cond_assoc(s, cfg, Tier::A, z));
            if a <= 0.0 {
                return 0.0;
            }
            let pdf = laws.pdf_za(z);
            if pdf <= 0.0 {
                return 0.0;
            }
            a * pdf * absorb(cond(Tier::A, z))
        };
        diag.absorb(integrate(f, lo, hi, cfg))
    };

    // Terrestrial tier over [0, z_max]; beyond z_max the remaining mass is
    // bounded by the homogeneous annulus tail and is negligible.
    let z_max = laws.zt_tail_radius(1e-14);
    let f = |z: f64| {
        let pdf = absorb(laws.pdf_zt(z));
        if pdf <= 0.0 {
            return 0.0;
        }
        let a = association::cond_assoc(s, cfg, Tier::T, z).expect("closed-form");
        if a <= 0.0 {
            return 0.0;
        }
        pdf * a * absorb(cond(Tier::T, z))
    };
    let splits = association::terrestrial_domain_splits(s, z_max);
    let contrib_t = diag.absorb(integrate_with_splits(f, 0.0, z_max, &splits, cfg));

    let assoc = association::report(s, cfg)?;
    let d = diag.take();
    Ok(CoverageResult {
        p_c: contrib_a + contrib_t,
        method,
        contrib_a,
        contrib_t,
        assoc_a: assoc.a_a,
        assoc_t: assoc.a_t,
        ci: None,
        trials: None,
        quad_err: d.worst_err.max(assoc.quad_err),
        nonconverged: d.nonconverged,
    })
}
