//! Error types shared by every pricing method.

use thiserror::Error;

/// Errors surfaced by the pricing routines.
///
/// Every variant corresponds to a violated precondition of a specific
/// method; none of them indicate an internal fault.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// Zero volatility makes the uptick and downtick factors coincide, so the
    /// risk-neutral probability is undefined.
    #[error("degenerate volatility: sigma = 0 makes the risk-neutral probability undefined")]
    DegenerateVolatility,

    /// The risk-neutral probability fell outside [0, 1], i.e. the one-period
    /// risk-free return 1+r is not bracketed by the downtick/uptick factors.
    #[error("arbitrage violation: risk-neutral probability {p} outside [0, 1]")]
    ArbitrageViolation { p: f64 },

    /// Exhaustive enumeration was requested for a tree too deep to enumerate.
    #[error("instance too large for exact enumeration: {steps} path steps exceeds limit {max}")]
    InstanceTooLarge { steps: u32, max: u32 },

    /// The Monte Carlo variance bound is vacuous: lambda0 <= 2*sigma_max*sqrt(m),
    /// so the requested accuracy is unattainable for this volatility/basket size.
    #[error(
        "variance bound vacuous: lambda0 = {lambda0} <= 2*sigma_max*sqrt(m) = {sigma_term}; \
         requested epsilon is unattainable at this volatility"
    )]
    VarianceBoundVacuous { lambda0: f64, sigma_term: f64 },

    /// The initial price already meets or exceeds the barrier, so bucketed
    /// traversal does not apply (the price is deterministic-exercise).
    #[error("initial price {s0} is at or above the barrier {barrier}")]
    RootAboveBarrier { s0: f64, barrier: f64 },

    /// The recursion parameter of the recursive bucketing scheme must exceed 2.
    #[error("invalid recursion parameter R = {r}: must be an integer > 2")]
    InvalidR { r: u32 },

    /// Bucket transfer between sibling subtrees only tolerates price ratios
    /// up to 2; beyond that a fresh traversal is required.
    #[error("price ratio alpha = {alpha} outside [1, 2]; run a fresh traversal instead")]
    AlphaOutOfRange { alpha: f64 },

    /// Two bucket arrays that must share bucket count and barrier do not.
    #[error("bucket shape mismatch: {detail}")]
    BucketShapeMismatch { detail: String },

    /// A recursion schedule called for more buckets than is sane to allocate.
    #[error("recursion schedule requires {buckets} buckets per node; limit is {max}")]
    ScheduleTooLarge { buckets: usize, max: usize },

    /// Catch-all for invalid market or method parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, PricingError>;
