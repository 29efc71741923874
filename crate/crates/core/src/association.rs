//! Tier-association probabilities under max-average-received-power
//! association.
//!
//! The conditional probability that a tier-B station at horizontal distance
//! `z` actually serves the UE is the probability that the competing tier has
//! nobody inside its exclusion zone; the total probability integrates that
//! against the tier's nearest-distance PDF. Ties in average received power
//! are probability-zero events and resolve to the terrestrial tier.

use crate::distances::DistanceLaws;
use crate::geometry::{exclusion_z, ExclusionPair};
use crate::quadrature::{integrate, integrate_with_splits, DiagCell, Quad, QuadConfig, QuadError};
use crate::scenario::{Scenario, Tier};
use crate::Error;

/// Total association probabilities of one scenario. They are complementary;
/// both are computed by their own integral so the sum doubles as a
/// correctness check.
#[derive(Debug, Clone, Copy)]
pub struct AssociationReport {
    pub a_a: f64,
    pub a_t: f64,
    /// Worst quadrature error estimate among the two integrals.
    pub quad_err: f64,
}

/// Conditional B-association probability `a_B(z)`: the chance that no
/// station of the competing tier undercuts the tagged one at horizontal
/// distance `z`.
pub fn cond_assoc(s: &Scenario, cfg: &QuadConfig, b: Tier, z: f64) -> Result<f64, Error> {
    let laws = DistanceLaws::new(s, *cfg);
    match b {
        Tier::T => {
            let zc = exclusion_z(ExclusionPair::new(Tier::T, Tier::A), s, z);
            Ok(laws.sf_za(zc))
        }
        Tier::A => {
            let zc = exclusion_z(ExclusionPair::new(Tier::A, Tier::T), s, z);
            laws.sf_zt(zc)
        }
    }
}

/// Total B-association probability: quadrature of `pdf_zb * a_B` over the
/// tier's domain. Returns 0 for the aerial tier of a UAV-free scenario.
pub fn assoc_prob(s: &Scenario, cfg: &QuadConfig, b: Tier) -> Result<f64, Error> {
    Ok(assoc_prob_quad(s, cfg, b)?.0)
}

pub(crate) fn assoc_prob_quad(
    s: &Scenario,
    cfg: &QuadConfig,
    b: Tier,
) -> Result<(f64, f64), Error> {
    let laws = DistanceLaws::new(s, *cfg);
    let diag = DiagCell::new();
    let absorb = |r: Result<f64, Error>| -> f64 {
        diag.absorb(r.map(|v| Quad { value: v, err: 0.0 }).map_err(quad_err_from))
    };
    match b {
        Tier::A => {
            if s.n_a == 0 {
                return Ok((0.0, 0.0));
            }
            let (lo, hi) = laws.support_a();
            let f = |z: f64| {
                let zc = exclusion_z(ExclusionPair::new(Tier::A, Tier::T), s, z);
                laws.pdf_za(z) * absorb(laws.sf_zt(zc))
            };
            finish(integrate(f, lo, hi, cfg), diag)
        }
        Tier::T => {
            let hi = laws.zt_tail_radius(1e-14);
            let f = |z: f64| {
                let zc = exclusion_z(ExclusionPair::new(Tier::T, Tier::A), s, z);
                absorb(laws.pdf_zt(z)) * laws.sf_za(zc)
            };
            // The integrand changes regime at a few known radii; pre-split.
            let splits = terrestrial_domain_splits(s, hi);
            finish(integrate_with_splits(f, 0.0, hi, &splits, cfg), diag)
        }
    }
}

fn quad_err_from(e: Error) -> QuadError {
    match e {
        Error::NonConvergence { value, err } => QuadError::NonConvergence { value, err },
        // Only quadrature errors can flow out of the distance laws.
        other => panic!("unexpected analytic error inside integrand: {other}"),
    }
}

fn finish(q: Result<Quad, QuadError>, diag: DiagCell) -> Result<(f64, f64), Error> {
    let d = diag.take();
    match q {
        Ok(quad) if !d.nonconverged => Ok((quad.value, quad.err.max(d.worst_err))),
        Ok(quad) => Err(Error::NonConvergence {
            value: quad.value,
            err: quad.err.max(d.worst_err),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Radii where the terrestrial outer integrand changes regime: the disaster
/// edge, the aerial-exclusion branch point and the radii mapping onto the
/// aerial support endpoints.
pub(crate) fn terrestrial_domain_splits(s: &Scenario, hi: f64) -> Vec<f64> {
    let mut splits = vec![s.r_d, crate::geometry::d_at_zero(s)];
    let (lo_a, hi_a) = ((s.r_u - s.r_d).max(0.0), s.r_u + s.r_d);
    for target in [lo_a, hi_a] {
        if let Some(z) = invert_ta_exclusion(s, target) {
            splits.push(z);
        }
    }
    splits.retain(|z| z.is_finite() && *z > 0.0 && *z < hi);
    splits
}

/// Solve `exclusion_z(TA, z) = target` for z, if a solution exists beyond
/// the altitude-floor branch.
fn invert_ta_exclusion(s: &Scenario, target: f64) -> Option<f64> {
    if target <= 0.0 {
        return None;
    }
    let (al_a, al_t) = (s.tier_a.alpha, s.tier_t.alpha);
    let d = (target * target + s.h * s.h).sqrt();
    let z = (d / (s.tier_a.xi() / s.tier_t.xi()).powf(1.0 / al_a)).powf(al_a / al_t);
    if z > crate::geometry::d_at_zero(s) {
        Some(z)
    } else {
        None
    }
}

/// Compute both association probabilities.
pub fn report(s: &Scenario, cfg: &QuadConfig) -> Result<AssociationReport, Error> {
    let (a_a, ea) = assoc_prob_quad(s, cfg, Tier::A)?;
    let (a_t, et) = assoc_prob_quad(s, cfg, Tier::T)?;
    Ok(AssociationReport { a_a, a_t, quad_err: ea.max(et) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ResilienceProfile;
    use approx::assert_relative_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn no_uav_network_is_all_terrestrial() {
        let mut s = Scenario::lap();
        s.n_a = 0;
        for z in [10.0, 500.0, 3000.0] {
            assert_eq!(cond_assoc(&s, &cfg(), Tier::T, z).unwrap(), 1.0);
        }
        assert_eq!(assoc_prob(&s, &cfg(), Tier::A).unwrap(), 0.0);
        assert_relative_eq!(assoc_prob(&s, &cfg(), Tier::T).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn close_terrestrial_station_cannot_be_beaten() {
        let mut s = Scenario::lap();
        s.n_a = 3;
        let z0 = crate::geometry::d_at_zero(&s);
        for z in [0.0, 0.5 * z0, z0 * 0.999] {
            assert_eq!(cond_assoc(&s, &cfg(), Tier::T, z).unwrap(), 1.0);
        }
    }

    #[test]
    fn hap_overhead_association_matches_sf_at_exclusion() {
        // UE at the epicenter of a destroyed zone: conditional A-association
        // at z = 0 equals the terrestrial survival at the exclusion radius.
        let s = Scenario::hap();
        let a = cond_assoc(&s, &cfg(), Tier::A, 0.0).unwrap();
        let laws = DistanceLaws::new(&s, cfg());
        let z0 = crate::geometry::d_at_zero(&s);
        assert_relative_eq!(a, laws.sf_zt(z0).unwrap(), max_relative = 1e-10);
        // With chi = 0 the whole exclusion disc sits inside the void, so the
        // survival there is exactly 1.
        assert_relative_eq!(a, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complementarity_on_parameter_grid() {
        for r_d in [500.0, 2000.0] {
            for r_u_frac in [0.0, 0.5, 1.2] {
                for n_a in [1u32, 4] {
                    let mut s = Scenario::lap();
                    s.r_d = r_d;
                    s.r_u = r_u_frac * r_d;
                    s.n_a = n_a;
                    s.chi = ResilienceProfile::constant(0.2);
                    let rep = report(&s, &cfg()).unwrap();
                    assert!(
                        (rep.a_a + rep.a_t - 1.0).abs() < 1e-6,
                        "complementarity violated: {} + {} at r_d={r_d}, r_u={}, n_a={n_a}",
                        rep.a_a,
                        rep.a_t,
                        s.r_u
                    );
                }
            }
        }
    }

    #[test]
    fn aerial_association_grows_with_fleet_size() {
        let mut prev = -1.0;
        for n_a in [0u32, 1, 2, 4, 8] {
            let mut s = Scenario::lap();
            s.n_a = n_a;
            let a_a = assoc_prob(&s, &cfg(), Tier::A).unwrap();
            assert!(a_a >= prev - 1e-9, "a_a decreased at n_a={n_a}: {a_a} < {prev}");
            assert!((0.0..=1.0).contains(&a_a));
            prev = a_a;
        }
    }

    #[test]
    fn conditional_probabilities_stay_in_unit_interval() {
        let mut s = Scenario::hap();
        s.r_u = 12_000.0;
        s.n_a = 3;
        s.chi = ResilienceProfile::constant(0.1);
        let laws = DistanceLaws::new(&s, cfg());
        let (lo, hi) = laws.support_a();
        for i in 0..50 {
            let z = lo + (hi - lo) * (i as f64 + 0.5) / 50.0;
            let a = cond_assoc(&s, &cfg(), Tier::A, z).unwrap();
            assert!((0.0..=1.0).contains(&a));
        }
        for i in 0..50 {
            let z = 4000.0 * (i as f64 + 0.5) / 50.0;
            let a = cond_assoc(&s, &cfg(), Tier::T, z).unwrap();
            assert!((0.0..=1.0).contains(&a));
        }
    }
}
