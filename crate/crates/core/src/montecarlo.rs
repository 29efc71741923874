//! Monte Carlo simulation oracle.
//!
//! Replays the network model generatively: TBS positions from a homogeneous
//! PPP thinned by the QoR profile, UAV positions uniform over the disaster
//! disc, gamma fading on every link, max-average-power association, SINR
//! tally. Nothing here reuses the analytical machinery, so agreement between
//! the two routes is meaningful evidence.
//!
//! The TBS window is a finite disc around the epicenter. Interference from
//! beyond the window is a sum of very many weak terms whose fluctuation is
//! negligible but whose mean is not; the mean is computed once per run by
//! direct integration of the path-loss field and added to every trial's
//! interference. The window default is sized so the *fluctuation* lost this
//! way sits two orders below the interference scale that decides coverage
//! for a median link (see `default_r_max`).
//!
//! Reproducibility: trials are grouped into batches; batch `i` draws from
//! ChaCha12 stream `i` of the master seed and results are reduced in batch
//! order, so a run is bit-identical for a fixed seed and batch size
//! regardless of how many threads execute it.

use crate::coverage::{CoverageResult, Method};
use crate::quadrature::{integrate, integrate_semi_infinite, DiagCell, QuadConfig};
use crate::scenario::{Scenario, Tier};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Simulation configuration.
#[derive(Debug, Clone, Copy)]
pub struct MCConfig {
    /// Number of independent network realizations.
    pub trials: u64,
    /// TBS window radius around the epicenter; `None` picks
    /// [`default_r_max`]. Values below `r_u + r_d` are raised to it.
    pub r_max: Option<f64>,
    /// Master seed; batch `i` uses ChaCha12 stream `i`.
    pub seed: u64,
    /// Trials per reduction block.
    pub batch: u64,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig { trials: 100_000, r_max: None, seed: 42, batch: 2048 }
    }
}

/// Outcome of a single network realization.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub covered: bool,
    /// Serving tier; `None` when the window held no station at all (counted
    /// and reported, never silently dropped).
    pub served_tier: Option<Tier>,
    pub sinr: f64,
    /// Horizontal distance to the serving station (m).
    pub tagged_distance: f64,
}

/// Full simulation report: the coverage estimate plus the empirical
/// nearest-distance samples used by distribution tests.
#[derive(Debug, Clone)]
pub struct McReport {
    pub result: CoverageResult,
    /// Trials in which neither tier had a station inside the window.
    pub unserved: u64,
    /// Per-trial nearest TBS horizontal distance (inf when none).
    pub nearest_t: Vec<f64>,
    /// Per-trial nearest UAV horizontal distance (empty when n_a = 0).
    pub nearest_a: Vec<f64>,
    /// Window radius actually used.
    pub r_max: f64,
    /// Mean far-field interference added to every trial (W).
    pub tail_mean: f64,
    pub seed: u64,
}

/// Default TBS window radius.
///
/// The window must contain the disaster disc as seen from the UE
/// (`r_u + r_d`). Beyond that, it is sized so the standard deviation of the
/// far-field interference it discards is below 1% of the interference level
/// `xi_T z_med^(-alpha_T) / tau` that decides coverage for a median tagged
/// link in the worst (fully destroyed, epicentral) case; the discarded mean
/// is added back deterministically, so only that fluctuation matters.
pub fn default_r_max(s: &Scenario) -> f64 {
    let a_t = s.tier_t.alpha;
    let z_med2 = s.r_d * s.r_d + std::f64::consts::LN_2 / (PI * s.lambda0);
    let z_med = z_med2.sqrt();
    let m = s.tier_t.m as f64;
    let fluct = (2.0 * PI * s.lambda0 * (m + 1.0) / (m * (2.0 * a_t - 2.0))).sqrt();
    // sigma_tail(M) = xi_T * fluct * M^(1 - alpha_T) == 1e-2 * xi_T * z_med^(-alpha_T) / tau
    let margin = (1e2 * s.tau * fluct * z_med.powf(a_t)).powf(1.0 / (a_t - 1.0));
    s.r_u + margin.max(2.0 * z_med).max(s.r_d)
}

/// Mean interference received from TBSs beyond the window: the intensity out
/// there is homogeneous and the fading has unit mean, so this is a plain
/// path-loss integral over the exterior of the window disc.
pub fn tail_mean(s: &Scenario, r_max: f64) -> f64 {
    let a_t = s.tier_t.alpha;
    if a_t <= 2.0 {
        // The far field does not integrate; coverage is zero in this regime.
        return f64::INFINITY;
    }
    let cfg = QuadConfig::default();
    let diag = DiagCell::new();
    let outer = integrate_semi_infinite(
        |r| {
            let ang = integrate(
                |phi| {
                    let d2 = r * r + s.r_u * s.r_u - 2.0 * r * s.r_u * phi.cos();
                    d2.powf(-0.5 * a_t)
                },
                0.0,
                PI,
                &cfg.tightened(1e-2),
            );
            2.0 * r * diag.absorb(ang)
        },
        r_max,
        &cfg,
    );
    let diag2 = DiagCell::new();
    let v = diag2.absorb(outer);
    s.lambda0 * s.tier_t.xi() * v
}

/// Sample the surviving-TBS process on the window disc: a homogeneous PPP of
/// the original density, thinned inside the disaster by the QoR profile.
/// Points are epicenter-centered Cartesian coordinates.
pub fn sample_tbs<R: Rng>(s: &Scenario, r_max: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    sample_tbs_into(s, r_max, rng, &mut out);
    out
}

fn sample_tbs_into<R: Rng>(s: &Scenario, r_max: f64, rng: &mut R, out: &mut Vec<[f64; 2]>) {
    out.clear();
    let mean = s.lambda0 * PI * r_max * r_max;
    let n = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
    out.reserve(n as usize);
    for _ in 0..n {
        let r = r_max * rng.gen::<f64>().sqrt();
        if r <= s.r_d {
            let keep = s.chi.eval(r, s.r_d);
            if keep <= 0.0 || (keep < 1.0 && rng.gen::<f64>() >= keep) {
                continue;
            }
        }
        let th = 2.0 * PI * rng.gen::<f64>();
        out.push([r * th.cos(), r * th.sin()]);
    }
}

/// Sample the UAV fleet: `n_a` points uniform over the disaster disc
/// (altitude `h` implicit). Epicenter-centered Cartesian coordinates.
pub fn sample_abs<R: Rng>(s: &Scenario, rng: &mut R) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    sample_abs_into(s, rng, &mut out);
    out
}

fn sample_abs_into<R: Rng>(s: &Scenario, rng: &mut R, out: &mut Vec<[f64; 2]>) {
    out.clear();
    out.reserve(s.n_a as usize);
    for _ in 0..s.n_a {
        let r = s.r_d * rng.gen::<f64>().sqrt();
        let th = 2.0 * PI * rng.gen::<f64>();
        out.push([r * th.cos(), r * th.sin()]);
    }
}

/// Unit-mean Nakagami-m power gain sampler: Gamma(shape m, scale 1/m).
fn gain_sampler(m: u32) -> Gamma<f64> {
    Gamma::new(m as f64, 1.0 / m as f64).expect("valid gamma shape")
}

/// Run one trial with freshly sampled processes.
pub fn run_trial<R: Rng>(s: &Scenario, cfg: &MCConfig, rng: &mut R) -> TrialOutcome {
    let r_max = resolve_r_max(s, cfg);
    let tail = tail_mean(s, r_max);
    let mut tbs = Vec::new();
    let mut abs = Vec::new();
    sample_tbs_into(s, r_max, rng, &mut tbs);
    sample_abs_into(s, rng, &mut abs);
    trial_from_points(s, &tbs, &abs, tail, rng).0
}

pub(crate) fn resolve_r_max(s: &Scenario, cfg: &MCConfig) -> f64 {
    cfg.r_max.unwrap_or_else(|| default_r_max(s)).max(s.r_u + s.r_d)
}

/// Association + SINR tally for a fixed set of stations. Returns the outcome
/// together with the nearest horizontal distance per tier (inf when the tier
/// is absent).
fn trial_from_points<R: Rng>(
    s: &Scenario,
    tbs: &[[f64; 2]],
    abs: &[[f64; 2]],
    tail: f64,
    rng: &mut R,
) -> (TrialOutcome, f64, f64) {
    let ue = [s.r_u, 0.0];
    let h2 = s.h * s.h;

    let mut zt2 = f64::INFINITY;
    let mut t_idx = usize::MAX;
    for (i, p) in tbs.iter().enumerate() {
        let dx = p[0] - ue[0];
        let dy = p[1] - ue[1];
        let d2 = dx * dx + dy * dy;
        if d2 < zt2 {
            zt2 = d2;
            t_idx = i;
        }
    }
    let mut za2 = f64::INFINITY;
    let mut a_idx = usize::MAX;
    for (i, p) in abs.iter().enumerate() {
        let dx = p[0] - ue[0];
        let dy = p[1] - ue[1];
        let d2 = dx * dx + dy * dy;
        if d2 < za2 {
            za2 = d2;
            a_idx = i;
        }
    }

    let xi_t = s.tier_t.xi();
    let xi_a = s.tier_a.xi();
    let q_t = if t_idx != usize::MAX { xi_t * zt2.powf(-0.5 * s.tier_t.alpha) } else { f64::NEG_INFINITY };
    let q_a = if a_idx != usize::MAX { xi_a * (za2 + h2).powf(-0.5 * s.tier_a.alpha) } else { f64::NEG_INFINITY };

    // Ties (probability-zero events) resolve to the terrestrial tier.
    let served = if t_idx == usize::MAX && a_idx == usize::MAX {
        None
    } else if q_t >= q_a {
        Some(Tier::T)
    } else {
        Some(Tier::A)
    };

    let (z_t, z_a) = (zt2.sqrt(), za2.sqrt());
    let Some(b) = served else {
        return (
            TrialOutcome { covered: false, served_tier: None, sinr: 0.0, tagged_distance: f64::NAN },
            z_t,
            z_a,
        );
    };

    let gam_t = gain_sampler(s.tier_t.m);
    let gam_a = gain_sampler(s.tier_a.m);
    let exp_t = -0.5 * s.tier_t.alpha;
    let exp_a = -0.5 * s.tier_a.alpha;

    let mut interference = tail;
    let mut signal = 0.0;
    for (i, p) in tbs.iter().enumerate() {
        let dx = p[0] - ue[0];
        let dy = p[1] - ue[1];
        let d2 = dx * dx + dy * dy;
        let q = xi_t * gam_t.sample(rng) * d2.powf(exp_t);
        if b == Tier::T && i == t_idx {
            signal = q;
        } else {
            interference += q;
        }
    }
    for (i, p) in abs.iter().enumerate() {
        let dx = p[0] - ue[0];
        let dy = p[1] - ue[1];
        let d2 = dx * dx + dy * dy + h2;
        let q = xi_a * gam_a.sample(rng) * d2.powf(exp_a);
        if b == Tier::A && i == a_idx {
            signal = q;
        } else {
            interference += q;
        }
    }

    let sinr = signal / (s.sigma_n2 + interference);
    (
        TrialOutcome {
            covered: sinr > s.tau,
            served_tier: served,
            sinr,
            tagged_distance: if b == Tier::T { z_t } else { z_a },
        },
        z_t,
        z_a,
    )
}

#[derive(Default)]
struct BatchAcc {
    covered: u64,
    covered_a: u64,
    covered_t: u64,
    served_a: u64,
    served_t: u64,
    unserved: u64,
    nearest_t: Vec<f64>,
    nearest_a: Vec<f64>,
}

/// Run the full simulation and summarize it.
///
/// Deterministic for a fixed seed and batch size: batch `i` draws from
/// ChaCha12 stream `i` and the reduction walks batches in index order.
pub fn estimate(s: &Scenario, cfg: &MCConfig) -> McReport {
    let trials = cfg.trials.max(1);
    let batch = cfg.batch.max(1);
    let r_max = resolve_r_max(s, cfg);
    let tail = tail_mean(s, r_max);
    let n_batches = trials.div_ceil(batch);

    let accs: Vec<BatchAcc> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(bi);
            let n = batch.min(trials - bi * batch);
            let mut acc = BatchAcc::default();
            acc.nearest_t.reserve(n as usize);
            if s.n_a > 0 {
                acc.nearest_a.reserve(n as usize);
            }
            let mut tbs = Vec::new();
            let mut abs = Vec::new();
            for _ in 0..n {
                sample_tbs_into(s, r_max, &mut rng, &mut tbs);
                sample_abs_into(s, &mut rng, &mut abs);
                let (out, z_t, z_a) = trial_from_points(s, &tbs, &abs, tail, &mut rng);
                acc.nearest_t.push(z_t);
                if s.n_a > 0 {
                    acc.nearest_a.push(z_a);
                }
                match out.served_tier {
                    Some(Tier::A) => {
                        acc.served_a += 1;
                        if out.covered {
                            acc.covered += 1;
                            acc.covered_a += 1;
                        }
                    }
                    Some(Tier::T) => {
                        acc.served_t += 1;
                        if out.covered {
                            acc.covered += 1;
                            acc.covered_t += 1;
                        }
                    }
                    None => acc.unserved += 1,
                }
            }
            acc
        })
        .collect();

    let mut total = BatchAcc::default();
    for mut a in accs {
        total.covered += a.covered;
        total.covered_a += a.covered_a;
        total.covered_t += a.covered_t;
        total.served_a += a.served_a;
        total.served_t += a.served_t;
        total.unserved += a.unserved;
        total.nearest_t.append(&mut a.nearest_t);
        total.nearest_a.append(&mut a.nearest_a);
    }

    let n = trials as f64;
    let p_c = total.covered as f64 / n;
    let ci = wilson_ci(total.covered, trials);
    McReport {
        result: CoverageResult {
            p_c,
            method: Method::MonteCarlo,
            contrib_a: total.covered_a as f64 / n,
            contrib_t: total.covered_t as f64 / n,
            assoc_a: total.served_a as f64 / n,
            assoc_t: total.served_t as f64 / n,
            ci: Some(ci),
            trials: Some(trials),
            quad_err: 0.0,
            nonconverged: false,
        },
        unserved: total.unserved,
        nearest_t: total.nearest_t,
        nearest_a: total.nearest_a,
        r_max,
        tail_mean: tail,
        seed: cfg.seed,
    }
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_ci(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959_963_984_540_054_f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// `samples` need not be sorted.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max((f - (i as f64 + 1.0) / n).abs());
    }
    ks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ResilienceProfile;
    use approx::assert_relative_eq;

    #[test]
    fn window_default_respects_invariant() {
        let mut s = Scenario::hap();
        s.r_u = 12_000.0;
        let r = default_r_max(&s);
        assert!(r >= s.r_u + s.r_d);
    }

    #[test]
    fn thinning_statistics() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let r_max = 4000.0;

        // Intact network: retained count is Poisson with the full mean.
        let mut s = Scenario::lap();
        s.chi = ResilienceProfile::constant(1.0);
        let mean = s.lambda0 * PI * r_max * r_max;
        let reps = 1000;
        let mut count = 0usize;
        for _ in 0..reps {
            count += sample_tbs(&s, r_max, &mut rng).len();
        }
        let avg = count as f64 / reps as f64;
        let sd = (mean / reps as f64).sqrt();
        assert!((avg - mean).abs() < 3.0 * sd, "avg {avg} vs mean {mean}");

        // Fully destroyed center: never a point inside r_d.
        let s0 = Scenario::lap();
        for _ in 0..200 {
            for p in sample_tbs(&s0, r_max, &mut rng) {
                assert!(p[0] * p[0] + p[1] * p[1] > s0.r_d * s0.r_d);
            }
        }

        // Constant half thinning: interior retention ratio near 0.5.
        let mut s5 = Scenario::lap();
        s5.chi = ResilienceProfile::constant(0.5);
        let mut inside = 0usize;
        let mut outside = 0usize;
        for _ in 0..2000 {
            for p in sample_tbs(&s5, r_max, &mut rng) {
                if p[0] * p[0] + p[1] * p[1] <= s5.r_d * s5.r_d {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        // Expected inside/outside ratio: 0.5 * r_d^2 / (r_max^2 - r_d^2).
        let want = 0.5 * s5.r_d * s5.r_d / (r_max * r_max - s5.r_d * s5.r_d);
        let got = inside as f64 / outside as f64;
        assert_relative_eq!(got, want, max_relative = 0.1);
    }

    #[test]
    fn abs_sampling_moments_and_law() {
        let mut s = Scenario::lap();
        s.n_a = 0;
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        assert!(sample_abs(&s, &mut rng).is_empty());

        s.n_a = 4;
        let draws = 50_000;
        let mut sum_r2 = 0.0;
        for _ in 0..draws {
            for p in sample_abs(&s, &mut rng) {
                sum_r2 += p[0] * p[0] + p[1] * p[1];
            }
        }
        let n = (draws * s.n_a as usize) as f64;
        let mean_r2 = sum_r2 / n;
        // E[r^2] = r_d^2 / 2, Var[r^2] = r_d^4 / 12.
        let sd = (s.r_d.powi(4) / 12.0 / n).sqrt();
        assert!((mean_r2 - s.r_d * s.r_d / 2.0).abs() < 3.0 * sd);

        // Single-point horizontal distance law for an off-center UE.
        s.r_u = 500.0;
        s.n_a = 1;
        let laws = crate::distances::DistanceLaws::new(&s, QuadConfig::default());
        let mut dists = Vec::with_capacity(100_000);
        for _ in 0..100_000 {
            let p = sample_abs(&s, &mut rng)[0];
            let dx = p[0] - s.r_u;
            let dy = p[1];
            dists.push((dx * dx + dy * dy).sqrt());
        }
        let ks = ks_statistic(&dists, |w| laws.cdf_omega_a(w));
        assert!(ks < 0.01, "KS = {ks}");
    }

    #[test]
    fn unit_mean_gains() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for m in [1u32, 2, 3] {
            let g = gain_sampler(m);
            let n = 100_000;
            let mut sum = 0.0;
            for _ in 0..n {
                sum += g.sample(&mut rng);
            }
            let mean = sum / n as f64;
            let sd = (1.0 / m as f64 / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 3.0 * sd, "m={m}: mean {mean}");
        }
    }

    #[test]
    fn overwhelming_noise_kills_coverage() {
        let mut s = Scenario::lap();
        s.sigma_n2 = 1e30;
        s.n_a = 2;
        let cfg = MCConfig { trials: 64, ..Default::default() };
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..64 {
            assert!(!run_trial(&s, &cfg, &mut rng).covered);
        }
    }

    #[test]
    fn single_link_coverage_matches_gamma_ccdf() {
        // One TBS at a known distance, no interferers, no tail: coverage is
        // the regularized upper incomplete gamma at mu = m tau d^alpha / xi.
        let mut s = Scenario::lap();
        s.n_a = 0;
        s.sigma_n2 = 1e-10;
        s.tier_t.m = 2;
        let d = 700.0;
        let tbs = [[d, 0.0]];
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let trials = 200_000;
        let mut covered = 0u64;
        for _ in 0..trials {
            let (out, _, _) = trial_from_points(&s, &tbs, &[], 0.0, &mut rng);
            assert_eq!(out.served_tier, Some(Tier::T));
            if out.covered {
                covered += 1;
            }
        }
        let p_hat = covered as f64 / trials as f64;
        let x = crate::coverage::mu_b(&s, Tier::T, d) * s.sigma_n2;
        let mut want = 0.0;
        let mut term = 1.0;
        for k in 0..s.tier_t.m {
            want += term;
            term *= x / (k as f64 + 1.0);
        }
        want *= (-x).exp();
        let se = (want * (1.0 - want) / trials as f64).sqrt();
        assert!((p_hat - want).abs() < 3.0 * se, "p_hat {p_hat} vs {want}");
    }

    #[test]
    fn estimate_is_seed_deterministic() {
        let mut s = Scenario::lap();
        s.n_a = 1;
        let cfg = MCConfig { trials: 2000, seed: 7, batch: 128, ..Default::default() };
        let a = estimate(&s, &cfg);
        let b = estimate(&s, &cfg);
        assert_eq!(a.result.p_c.to_bits(), b.result.p_c.to_bits());
        assert_eq!(a.result.assoc_a.to_bits(), b.result.assoc_a.to_bits());
        assert_eq!(a.nearest_t.len(), b.nearest_t.len());
        for (x, y) in a.nearest_t.iter().zip(b.nearest_t.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        // A different seed must actually change the draw.
        let c = estimate(&s, &MCConfig { seed: 8, ..cfg });
        assert_ne!(a.nearest_t[0].to_bits(), c.nearest_t[0].to_bits());
    }

    #[test]
    fn ci_width_scales_with_trials() {
        let mut s = Scenario::lap();
        s.n_a = 1;
        let small = estimate(&s, &MCConfig { trials: 4000, seed: 9, ..Default::default() });
        let large = estimate(&s, &MCConfig { trials: 16_000, seed: 9, ..Default::default() });
        let w_small = small.result.ci.unwrap().1 - small.result.ci.unwrap().0;
        let w_large = large.result.ci.unwrap().1 - large.result.ci.unwrap().0;
        let ratio = w_small / w_large;
        assert!((ratio - 2.0).abs() < 0.4, "CI ratio {ratio}");
    }

    #[test]
    fn tier_splits_are_consistent() {
        let mut s = Scenario::lap();
        s.n_a = 2;
        let rep = estimate(&s, &MCConfig { trials: 5000, seed: 10, ..Default::default() });
        let r = &rep.result;
        assert_relative_eq!(r.contrib_a + r.contrib_t, r.p_c, epsilon = 1e-12);
        let served = r.assoc_a + r.assoc_t + rep.unserved as f64 / 5000.0;
        assert_relative_eq!(served, 1.0, epsilon = 1e-12);
        assert!(r.ci.unwrap().0 <= r.p_c && r.p_c <= r.ci.unwrap().1);
    }

    #[test]
    fn wilson_interval_sanity() {
        let (lo, hi) = wilson_ci(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        assert_relative_eq!(hi - 0.5, 0.5 - lo, max_relative = 1e-12);
        let (lo0, _) = wilson_ci(0, 100);
        assert_eq!(lo0, 0.0);
    }
}
