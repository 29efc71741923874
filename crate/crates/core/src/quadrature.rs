//! Adaptive one-dimensional quadrature.
//!
//! A 15-point Gauss–Kronrod rule drives globally-adaptive bisection: the
//! worst segment (largest error estimate) is split until the summed error
//! estimate meets the tolerance or the subdivision budget runs out. Two
//! extensions cover everything the analytical modules need:
//!
//! * known integrand kinks can be supplied as pre-split points, which
//!   restores fast convergence on piecewise-smooth integrands;
//! * semi-infinite tails are folded onto `[0, 1)` with the rational map
//!   `x = a + scale * u / (1 - u)`, suited to power-law decay.
//!
//! Two-dimensional polar integrals are expressed by nesting: the angular
//! integrand evaluates a radial integral per angle. [`QuadDiag`] collects
//! inner-integral error estimates across such nests so the outer caller can
//! report a single diagnostic.

use std::cell::RefCell;

/// Nodes of the 15-point Kronrod rule on [-1, 1] (non-negative half; the
/// rule is symmetric). Odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_7,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Weights of the embedded 7-point Gauss rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Mapping used by [`integrate_semi_infinite`] to fold `[a, inf)` onto a
/// finite interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiInfiniteMap {
    /// `x = a + scale * u / (1 - u)`, `u` in `[0, 1)`. `scale = None` picks
    /// `max(a, 1)`, which spends half of the unit interval below `a + scale`.
    Rational { scale: Option<f64> },
}

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub semi_infinite_map: SemiInfiniteMap,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            semi_infinite_map: SemiInfiniteMap::Rational { scale: None },
        }
    }
}

impl QuadConfig {
    /// Copy with tolerances scaled by `factor` (< 1 tightens). Used for the
    /// inner integral of a nested pair so its error stays subordinate.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadConfig {
            rel_tol: (self.rel_tol * factor).max(1e-14),
            abs_tol: (self.abs_tol * factor).max(1e-300),
            ..*self
        }
    }
}

/// Value plus error estimate of one integral.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub err: f64,
}

/// Non-convergence carries the best estimate; callers may keep it and flag
/// the result instead of discarding the whole computation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum QuadError {
    #[error("integral did not converge after the subdivision budget (best {value:.6e}, err {err:.3e})")]
    NonConvergence { value: f64, err: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// One 15-point Gauss-Kronrod pass over [a, b]; error from |Kronrod - Gauss|.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;

    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }

    Segment {
        a,
        b,
        value: kron * half,
        err: ((kron - gauss) * half).abs(),
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quad, QuadError> {
    integrate_with_splits(f, a, b, &[], cfg)
}

/// Integrate `f` over `[a, b]` with the interval pre-split at `splits`
/// (points outside `(a, b)` are ignored). Use for integrands with known
/// kinks, e.g. where a radius crosses the disaster boundary.
pub fn integrate_with_splits<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    splits: &[f64],
    cfg: &QuadConfig,
) -> Result<Quad, QuadError> {
    if a == b {
        return Ok(Quad { value: 0.0, err: 0.0 });
    }
    assert!(a < b, "integration bounds must be ordered: {a} > {b}");

    let mut edges: Vec<f64> = Vec::with_capacity(splits.len() + 2);
    edges.push(a);
    for &s in splits {
        if s > a && s < b {
            edges.push(s);
        }
    }
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut segs: Vec<Segment> = Vec::with_capacity(edges.len().saturating_sub(1) + 8);
    for w in edges.windows(2) {
        segs.push(gk15(&f, w[0], w[1]));
    }

    let mut splits_left = cfg.max_subdivisions;
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(Quad { value, err });
        }
        if splits_left == 0 {
            return Err(QuadError::NonConvergence { value, err });
        }
        splits_left -= 1;

        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segs.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // At floating-point resolution; accept the current estimate.
            segs.push(seg);
            let value: f64 = segs.iter().map(|s| s.value).sum();
            let err: f64 = segs.iter().map(|s| s.err).sum();
            return Ok(Quad { value, err });
        }
        segs.push(gk15(&f, seg.a, mid));
        segs.push(gk15(&f, mid, seg.b));
    }
}

/// Integrate `f` over `[a, inf)` via the configured variable transform.
///
/// Intended for integrands with power-law (or faster) decay; every
/// terrestrial-interference tail integrand decays like `x^(1 - alpha_T)`
/// with `alpha_T > 2`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cfg: &QuadConfig,
) -> Result<Quad, QuadError> {
    let SemiInfiniteMap::Rational { scale } = cfg.semi_infinite_map;
    let scale = scale.unwrap_or_else(|| a.abs().max(1.0));
    let g = |u: f64| {
        let om = 1.0 - u;
        f(a + scale * u / om) * scale / (om * om)
    };
    integrate(g, 0.0, 1.0, cfg)
}

/// Shared diagnostics for nested integrals: accumulates the worst relative
/// error estimate and whether any inner integral failed to converge.
#[derive(Debug, Default, Clone, Copy)]
pub struct QuadDiag {
    pub worst_err: f64,
    pub nonconverged: bool,
}

impl QuadDiag {
    /// Record the outcome of one inner integral and hand back its value
    /// (the best estimate when non-converged).
    pub fn absorb(&mut self, r: Result<Quad, QuadError>) -> f64 {
        match r {
            Ok(q) => {
                self.worst_err = self.worst_err.max(q.err);
                q.value
            }
            Err(QuadError::NonConvergence { value, err }) => {
                self.worst_err = self.worst_err.max(err);
                self.nonconverged = true;
                value
            }
        }
    }

    pub fn merge(&mut self, other: QuadDiag) {
        self.worst_err = self.worst_err.max(other.worst_err);
        self.nonconverged |= other.nonconverged;
    }
}

/// Thread-local-style cell wrapper so `Fn` integrands can record inner
/// diagnostics without interior-mutability noise at every call site.
pub struct DiagCell(RefCell<QuadDiag>);

impl DiagCell {
    pub fn new() -> Self {
        DiagCell(RefCell::new(QuadDiag::default()))
    }

    pub fn absorb(&self, r: Result<Quad, QuadError>) -> f64 {
        self.0.borrow_mut().absorb(r)
    }

    pub fn take(&self) -> QuadDiag {
        *self.0.borrow()
    }
}

impl Default for DiagCell {
    fn default() -> Self {
        Self::new()
    }
}
