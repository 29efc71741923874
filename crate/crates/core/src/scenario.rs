//! Scenario definition: network geometry, per-tier radio constants, the
//! quality-of-resilience (QoR) profile and validation.
//!
//! Everything is stored in linear SI units (metres, watts). Decibel values
//! are converted at the file-format boundary, never here.

/// Base-station tier: aerial (UAV-mounted) or terrestrial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    A,
    T,
}

impl Tier {
    pub fn other(self) -> Tier {
        match self {
            Tier::A => Tier::T,
            Tier::T => Tier::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tier::A => "A",
            Tier::T => "T",
        }
    }
}

/// Per-tier radio constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    /// Transmit power (W, linear).
    pub rho: f64,
    /// Mean additional transmit loss, a linear factor in (0, 1].
    pub eta: f64,
    /// Path-loss exponent, >= 2.
    pub alpha: f64,
    /// Nakagami shape parameter (positive integer).
    pub m: u32,
}

impl TierParams {
    /// Effective transmit power `xi = eta * rho`.
    pub fn xi(&self) -> f64 {
        self.eta * self.rho
    }
}

/// Parametric family of the QoR profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiFamily {
    Constant,
    Linear,
    Sqrt,
    Exponential,
}

impl ChiFamily {
    pub fn name(self) -> &'static str {
        match self {
            ChiFamily::Constant => "constant",
            ChiFamily::Linear => "linear",
            ChiFamily::Sqrt => "sqrt",
            ChiFamily::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Option<ChiFamily> {
        match s {
            "constant" => Some(ChiFamily::Constant),
            "linear" => Some(ChiFamily::Linear),
            "sqrt" => Some(ChiFamily::Sqrt),
            "exponential" => Some(ChiFamily::Exponential),
            _ => None,
        }
    }
}

/// QoR profile chi(r): the fraction of the original TBS density surviving at
/// ground distance `r` from the epicenter.
///
/// The non-constant families rise from `chi0` at the epicenter to 1 at the
/// disaster edge, so damage fades with distance and the intensity is
/// continuous at `r_d`. The published curves fix only the shapes (constant,
/// square-root-like, linear, exponential); the endpoint normalization used
/// here is the natural one that makes the families comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResilienceProfile {
    pub family: ChiFamily,
    /// Base QoR level in [0, 1]; the profile value at the epicenter.
    pub chi0: f64,
}

impl ResilienceProfile {
    pub fn constant(chi0: f64) -> Self {
        ResilienceProfile { family: ChiFamily::Constant, chi0 }
    }

    /// Evaluate chi(r). Outside the disaster (`r > r_d`) the network is
    /// intact and the value is 1. Tiny negative `r` from rounding clamps to 0.
    pub fn eval(&self, r: f64, r_d: f64) -> f64 {
        let r = r.max(0.0);
        if r > r_d {
            return 1.0;
        }
        let x = (r / r_d).clamp(0.0, 1.0);
        let c = self.chi0;
        match self.family {
            ChiFamily::Constant => c,
            ChiFamily::Linear => c + (1.0 - c) * x,
            ChiFamily::Sqrt => c + (1.0 - c) * x.sqrt(),
            ChiFamily::Exponential => c + (1.0 - c) * (x.exp() - 1.0) / (std::f64::consts::E - 1.0),
        }
    }
}

/// Complete parameterization of one network scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Original (pre-disaster) TBS density, TBS per square metre.
    pub lambda0: f64,
    /// Disaster radius (m).
    pub r_d: f64,
    /// UE distance from the disaster epicenter (m).
    pub r_u: f64,
    /// ABS altitude (m).
    pub h: f64,
    /// Number of deployed UAVs.
    pub n_a: u32,
    pub tier_a: TierParams,
    pub tier_t: TierParams,
    pub chi: ResilienceProfile,
    /// SINR threshold (linear).
    pub tau: f64,
    /// Noise power (W).
    pub sigma_n2: f64,
}

/// Validation failure listing every violated constraint.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{}", violations.join("; "))]
pub struct ValidationError {
    pub violations: Vec<String>,
}

impl Scenario {
    pub fn tier(&self, t: Tier) -> &TierParams {
        match t {
            Tier::A => &self.tier_a,
            Tier::T => &self.tier_t,
        }
    }

    /// Surviving-TBS intensity at ground distance `r` from the epicenter:
    /// `lambda0 * chi(r)` inside the disaster, `lambda0` outside.
    pub fn lambda_t(&self, r: f64) -> f64 {
        if r > self.r_d {
            self.lambda0
        } else {
            self.lambda0 * self.chi.eval(r, self.r_d)
        }
    }

    /// Check every type invariant. Returns warnings (non-fatal oddities such
    /// as dB-looking magnitudes) on success; the error lists all violations.
    pub fn validate(&self) -> Result<Vec<String>, ValidationError> {
        let mut violations = Vec::new();
        let mut warnings = Vec::new();

        if !(self.lambda0 > 0.0) {
            violations.push(format!("lambda0 must be > 0 (got {})", self.lambda0));
        }
        if !(self.r_d > 0.0) {
            violations.push(format!("r_d must be > 0 (got {})", self.r_d));
        }
        if !(self.r_u >= 0.0) {
            violations.push(format!("r_u must be >= 0 (got {})", self.r_u));
        }
        if !(self.h > 0.0) {
            violations.push(format!("h must be > 0 (got {})", self.h));
        }
        if !(self.tau > 0.0) {
            violations.push(format!("tau must be > 0 linear (got {})", self.tau));
        }
        if self.tau < 0.0 {
            warnings.push(format!(
                "tau = {} is negative and looks like a dB value; use tau_db in scenario files",
                self.tau
            ));
        }
        if !(self.sigma_n2 >= 0.0) {
            violations.push(format!("sigma_n2 must be >= 0 (got {})", self.sigma_n2));
            warnings.push(format!(
                "sigma_n2 = {} is negative and looks like a dB value; use sigma_n2_db",
                self.sigma_n2
            ));
        }
        if !(0.0..=1.0).contains(&self.chi.chi0) {
            violations.push(format!("chi0 must lie in [0, 1] (got {})", self.chi.chi0));
        }

        for (name, tp) in [("tier_a", &self.tier_a), ("tier_t", &self.tier_t)] {
            if !(tp.rho > 0.0) {
                violations.push(format!("{name}.rho must be > 0 (got {})", tp.rho));
            }
            if !(tp.eta > 0.0 && tp.eta <= 1.0) {
                violations.push(format!("{name}.eta must lie in (0, 1] (got {})", tp.eta));
                if tp.eta < 0.0 {
                    warnings.push(format!(
                        "{name}.eta = {} is negative and looks like a dB value; use eta_db",
                        tp.eta
                    ));
                }
            }
            if !(tp.alpha >= 2.0) {
                violations.push(format!("{name}.alpha: alpha >= 2 violated (got {})", tp.alpha));
            }
            if tp.m < 1 {
                violations.push(format!("{name}.m must be a positive integer (got {})", tp.m));
            }
        }

        if violations.is_empty() {
            Ok(warnings)
        } else {
            Err(ValidationError { violations })
        }
    }

    /// Standard low-altitude-platform parameter set.
    pub fn lap() -> Scenario {
        Scenario {
            lambda0: 3e-6,
            r_d: 1_000.0,
            r_u: 0.0,
            h: 200.0,
            n_a: 1,
            tier_a: TierParams { rho: 5.0, eta: db_to_linear(-1.6), alpha: 3.0, m: 2 },
            tier_t: TierParams { rho: 10.0, eta: db_to_linear(-2.0), alpha: 3.5, m: 1 },
            chi: ResilienceProfile::constant(0.0),
            tau: db_to_linear(-5.0),
            sigma_n2: 1e-12,
        }
    }

    /// Standard high-altitude-platform parameter set.
    pub fn hap() -> Scenario {
        Scenario {
            lambda0: 3e-6,
            r_d: 10_000.0,
            r_u: 0.0,
            h: 20_000.0,
            n_a: 1,
            tier_a: TierParams { rho: 50.0, eta: db_to_linear(-1.6), alpha: 2.5, m: 2 },
            tier_t: TierParams { rho: 10.0, eta: db_to_linear(-2.0), alpha: 3.5, m: 1 },
            chi: ResilienceProfile::constant(0.0),
            tau: db_to_linear(-5.0),
            sigma_n2: 1e-12,
        }
    }
}

/// Power ratio in dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lap_preset_is_valid_and_matches_standard_values() {
        let s = Scenario::lap();
        assert!(s.validate().is_ok());
        assert_relative_eq!(s.tau, 0.3162, max_relative = 1e-3);
        assert_relative_eq!(s.tier_a.eta, 0.6918, max_relative = 1e-3);
        assert_relative_eq!(s.tier_t.eta, 0.631, max_relative = 1e-3);
        assert_relative_eq!(s.tier_a.xi(), 0.6918 * 5.0, max_relative = 1e-3);
    }

    #[test]
    fn shallow_path_loss_exponent_is_rejected() {
        let mut s = Scenario::lap();
        s.tier_t.alpha = 1.5;
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("alpha >= 2 violated"));
    }

    #[test]
    fn no_uav_baseline_is_valid() {
        let mut s = Scenario::lap();
        s.n_a = 0;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn all_violations_are_listed() {
        let mut s = Scenario::lap();
        s.lambda0 = 0.0;
        s.r_d = -5.0;
        s.tier_a.m = 0;
        let err = s.validate().unwrap_err();
        assert_eq!(err.violations.len(), 3);
    }

    #[test]
    fn negative_tau_is_error_and_db_warning() {
        let mut s = Scenario::lap();
        s.tau = -5.0;
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("tau"));
    }

    #[test]
    fn chi_families_hit_both_endpoints() {
        for family in [ChiFamily::Linear, ChiFamily::Sqrt, ChiFamily::Exponential] {
            let p = ResilienceProfile { family, chi0: 0.3 };
            assert_relative_eq!(p.eval(0.0, 1000.0), 0.3);
            assert_relative_eq!(p.eval(1000.0, 1000.0), 1.0, max_relative = 1e-12);
            assert_relative_eq!(p.eval(1500.0, 1000.0), 1.0);
        }
    }

    #[test]
    fn chi_examples() {
        let c = ResilienceProfile::constant(0.0);
        assert_eq!(c.eval(500.0, 1000.0), 0.0);

        let l = ResilienceProfile { family: ChiFamily::Linear, chi0: 0.0 };
        assert_relative_eq!(l.eval(1000.0, 1000.0), 1.0);

        let s = ResilienceProfile { family: ChiFamily::Sqrt, chi0: 0.2 };
        assert_relative_eq!(s.eval(250.0, 1000.0), 0.2 + 0.8 * 0.5, max_relative = 1e-12);
    }

    #[test]
    fn intensity_examples() {
        let mut s = Scenario::lap();
        assert_eq!(s.lambda_t(500.0), 0.0); // chi == 0 inside
        assert_eq!(s.lambda_t(2.0 * s.r_d), 3e-6);
        s.chi = ResilienceProfile::constant(0.5);
        assert_relative_eq!(s.lambda_t(300.0), 1.5e-6);
    }

    #[test]
    fn intensity_right_continuous_at_disaster_edge() {
        let mut s = Scenario::lap();
        s.chi = ResilienceProfile::constant(0.25);
        let eps = 1e-9;
        assert_eq!(s.lambda_t(s.r_d + eps), s.lambda0);
        assert_eq!(s.lambda_t(s.r_d), 0.25 * s.lambda0);
    }

    proptest::proptest! {
        #[test]
        fn chi_range_and_monotonicity(
            fam in 0usize..4,
            chi0 in 0.0f64..=1.0,
            r1 in 0.0f64..2000.0,
            r2 in 0.0f64..2000.0,
        ) {
            let family = [ChiFamily::Constant, ChiFamily::Linear, ChiFamily::Sqrt, ChiFamily::Exponential][fam];
            let p = ResilienceProfile { family, chi0 };
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let v_lo = p.eval(lo, 1000.0);
            let v_hi = p.eval(hi, 1000.0);
            proptest::prop_assert!((0.0..=1.0).contains(&v_lo));
            proptest::prop_assert!((0.0..=1.0).contains(&v_hi));
            if family != ChiFamily::Constant {
                proptest::prop_assert!(v_hi >= v_lo - 1e-12);
            }
        }

        #[test]
        fn chi0_one_degenerates_to_intact_network(fam in 0usize..4, r in 0.0f64..3000.0) {
            let family = [ChiFamily::Constant, ChiFamily::Linear, ChiFamily::Sqrt, ChiFamily::Exponential][fam];
            let p = ResilienceProfile { family, chi0: 1.0 };
            proptest::prop_assert!((p.eval(r, 1000.0) - 1.0).abs() < 1e-12);
        }
    }
}
