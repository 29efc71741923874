//! Coverage analysis for UAV-aided post-disaster cellular networks.
//!
//! The crate models a downlink network in which the surviving terrestrial
//! base stations (TBSs) form an inhomogeneous Poisson point process around a
//! circular disaster zone and a fixed fleet of UAV-mounted aerial base
//! stations (ABSs) hovers uniformly above that zone. The downlink coverage
//! probability of a ground user is computed two independent ways:
//!
//! * analytically, through nearest-distance laws, tier-association
//!   probabilities and conditional Laplace transforms of the interference
//!   ([`distances`], [`association`], [`interference`], [`coverage`]);
//! * generatively, through a Monte Carlo simulator that replays the same
//!   network model sample by sample ([`montecarlo`]).
//!
//! Agreement between the two routes is the correctness contract; the
//! `validate` machinery of the companion CLI exercises it end to end.
//!
//! All quantities are kept in linear SI units (metres, watts). Decibel
//! conversion is a concern of the file-format layer, never of the math.

pub mod association;
pub mod coverage;
pub mod distances;
pub mod geometry;
pub mod interference;
pub mod montecarlo;
pub mod quadrature;
pub mod scenario;

pub use coverage::{total_coverage, CoverageResult, Method};
pub use montecarlo::{estimate, MCConfig};

pub use quadrature::QuadConfig;
pub use scenario::{ChiFamily, ResilienceProfile, Scenario, Tier, TierParams};

/// Errors produced by the analytical evaluation pipeline.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Adaptive quadrature hit its subdivision budget. Carries the best
    /// estimate so callers can decide whether to use it anyway.
    #[error("quadrature did not converge (best estimate {value:.6e}, error {err:.3e})")]
    NonConvergence { value: f64, err: f64 },
    /// Derivative orders above 4 are not implemented analytically.
    #[error("Laplace derivative order {0} exceeds the supported maximum of 4")]
    DerivativeOrder(usize),
    /// The exact coverage sum needs m_B - 1 Laplace derivatives, capped at 4.
    #[error("Nakagami shape m = {0} exceeds the exact-method cap of 4; use the approximate method")]
    ShapeTooLarge(u32),
    /// Every UAV is excluded, so the truncated interferer law is undefined.
    #[error("degenerate aerial truncation: no UAV can lie beyond z = {z_ba}")]
    DegenerateTruncation { z_ba: f64 },
    /// Scenario failed validation.
    #[error("invalid scenario: {0}")]
    Validation(#[from] scenario::ValidationError),
}

impl From<quadrature::QuadError> for Error {
    fn from(e: quadrature::QuadError) -> Self {
        let quadrature::QuadError::NonConvergence { value, err } = e;
        Error::NonConvergence { value, err }
    }
}
