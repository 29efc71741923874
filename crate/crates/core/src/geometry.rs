//! Planar geometry kernels: UE-centered polar distance to the epicenter,
//! circle-circle lens area and its radial derivative, and the minimum
//! interferer distances induced by max-average-power association.
//!
//! All arccos arguments are clamped to [-1, 1] to absorb rounding at
//! tangency configurations.

use crate::scenario::{Scenario, Tier};
use std::f64::consts::PI;

/// Ground distance from the epicenter of a point at polar coordinates
/// `(omega, beta)` centered on the UE, with the UE at distance `r_u` from
/// the epicenter: `sqrt(r_u^2 + omega^2 - 2 r_u omega cos(beta))`.
pub fn r_omega(r_u: f64, omega: f64, beta: f64) -> f64 {
    let sq = r_u * r_u + omega * omega - 2.0 * r_u * omega * beta.cos();
    sq.max(0.0).sqrt()
}

/// Area of the intersection of the disaster disc (radius `r_d`, centered on
/// the epicenter) and the disc of radius `omega` centered on the UE at
/// distance `r_u` from the epicenter.
pub fn lens_area(r_u: f64, r_d: f64, omega: f64) -> f64 {
    if omega <= 0.0 || r_d <= 0.0 {
        return 0.0;
    }
    if omega >= r_u + r_d {
        // Disaster disc fully contained in the UE disc.
        return PI * r_d * r_d;
    }
    if omega <= r_u - r_d {
        // Discs disjoint (UE far outside).
        return 0.0;
    }
    if omega <= r_d - r_u {
        // UE disc fully inside the disaster disc.
        return PI * omega * omega;
    }
    // Proper lens. r_u > 0 is guaranteed here: the containment branches
    // exhaust r_u == 0.
    let d2 = r_u * r_u;
    let a1 = ((d2 + r_d * r_d - omega * omega) / (2.0 * r_u * r_d)).clamp(-1.0, 1.0);
    let a2 = ((d2 + omega * omega - r_d * r_d) / (2.0 * r_u * omega)).clamp(-1.0, 1.0);
    let tri = (-r_u + r_d + omega) * (r_u + r_d - omega) * (r_u - r_d + omega) * (r_u + r_d + omega);
    r_d * r_d * a1.acos() + omega * omega * a2.acos() - 0.5 * tri.max(0.0).sqrt()
}

/// Radial derivative of [`lens_area`] with respect to `omega`: the arc
/// length of the circle of radius `omega` around the UE lying inside the
/// disaster disc.
pub fn lens_area_deriv(r_u: f64, r_d: f64, omega: f64) -> f64 {
    if omega <= 0.0 || r_d <= 0.0 || omega >= r_u + r_d || omega <= r_u - r_d {
        return 0.0;
    }
    if omega <= r_d - r_u {
        return 2.0 * PI * omega;
    }
    let cosb = ((r_u * r_u + omega * omega - r_d * r_d) / (2.0 * r_u * omega)).clamp(-1.0, 1.0);
    2.0 * omega * cosb.acos()
}

/// Radii at which the ray leaving the UE at angle `beta` crosses the
/// disaster boundary, in increasing order. These are the kink locations of
/// radial integrands involving the surviving-TBS intensity; pre-splitting
/// the radial interval there keeps adaptive quadrature fast.
pub fn radial_crossings(r_u: f64, r_d: f64, beta: f64) -> [Option<f64>; 2] {
    let cb = beta.cos();
    let disc = r_d * r_d - r_u * r_u * (1.0 - cb * cb);
    if disc < 0.0 {
        return [None, None];
    }
    let sq = disc.sqrt();
    let lo = r_u * cb - sq;
    let hi = r_u * cb + sq;
    [
        if lo > 0.0 { Some(lo) } else { None },
        if hi > 0.0 { Some(hi) } else { None },
    ]
}

/// Angles in `(0, pi)` at which angular integrands over the circle of radius
/// `z` around the UE change regime: where that circle crosses the disaster
/// boundary, and (for a UE outside the disaster) the tangent direction at
/// which radial crossings appear.
pub fn angular_splits(r_u: f64, r_d: f64, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2);
    if r_u > 0.0 && z > 0.0 {
        let arg = (r_u * r_u + z * z - r_d * r_d) / (2.0 * r_u * z);
        if arg.abs() < 1.0 {
            out.push(arg.acos());
        }
    }
    if r_u > r_d {
        out.push((r_d / r_u).asin());
    }
    out
}

/// Tagged/interferer tier pair for the minimum-distance lookup: `b` is the
/// tier of the serving station, `c` the tier of the interferer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExclusionPair {
    pub b: Tier,
    pub c: Tier,
}

impl ExclusionPair {
    pub fn new(b: Tier, c: Tier) -> Self {
        ExclusionPair { b, c }
    }
}

/// Euclidean distance below which no terrestrial interferer can exist when
/// the serving ABS hovers straight overhead (horizontal distance 0). Also
/// the branch point of the aerial exclusion for terrestrial association.
pub fn d_at_zero(s: &Scenario) -> f64 {
    let xi_t = s.tier_t.xi();
    let xi_a = s.tier_a.xi();
    (xi_t / xi_a).powf(1.0 / s.tier_t.alpha) * s.h.powf(s.tier_a.alpha / s.tier_t.alpha)
}

/// Minimum Euclidean distance of any tier-`c` interferer when the UE is
/// served by a tier-`b` station at horizontal distance `z`.
///
/// The value solves "average received power of the interferer equals that of
/// the server", except that aerial interferers can never be closer than the
/// altitude `h`.
pub fn exclusion_d(pair: ExclusionPair, s: &Scenario, z: f64) -> f64 {
    let xi_a = s.tier_a.xi();
    let xi_t = s.tier_t.xi();
    let (al_a, al_t) = (s.tier_a.alpha, s.tier_t.alpha);
    match (pair.b, pair.c) {
        (Tier::T, Tier::T) => z,
        (Tier::A, Tier::A) => (z * z + s.h * s.h).sqrt(),
        (Tier::A, Tier::T) => {
            (xi_t / xi_a).powf(1.0 / al_t) * (z * z + s.h * s.h).sqrt().powf(al_a / al_t)
        }
        (Tier::T, Tier::A) => {
            if z > d_at_zero(s) {
                (xi_a / xi_t).powf(1.0 / al_a) * z.powf(al_t / al_a)
            } else {
                s.h
            }
        }
    }
}

/// Horizontal projection of [`exclusion_d`]: aerial distances are lifted by
/// the altitude, terrestrial ones are already planar.
pub fn exclusion_z(pair: ExclusionPair, s: &Scenario, z: f64) -> f64 {
    let d = exclusion_d(pair, s, z);
    match pair.c {
        Tier::A => (d * d - s.h * s.h).max(0.0).sqrt(),
        Tier::T => d,
    }
}
