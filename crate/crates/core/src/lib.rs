//! Pricing engine for European Asian calls (single-stock and basket) on
//! recombinant binomial trees.
//!
//! Four pricing routes are provided, each with an explicit, provable error
//! characterization:
//!
//! * [`path_oracle`] — exact prices by exhaustive path enumeration, the
//!   ground truth for everything else (feasible up to 2^24 paths);
//! * [`monte_carlo`] — seeded Monte Carlo whose sample count is derived
//!   from a concentration analysis, with a deep-in-the-money closed-form
//!   branch and a priori error bounds;
//! * [`bucket_btt`] / [`rec_btt`] — bucketed tree traversal and its
//!   recursive refinement, returning one-sided containment intervals;
//! * [`basket_pricer`] — per-stock bucketed trees combined through
//!   FFT polynomial products for baskets of independent stocks.
//!
//! All heavy loops parallelize over fixed work partitions when the
//! `parallel` feature (default) is enabled; partitioning and reduction
//! order never depend on thread count, so results are bit-identical across
//! pool sizes and with the feature disabled.

pub mod basket_pricer;
pub mod bucket_btt;
mod compensated;
pub mod convolution;
mod error;
mod estimate;
mod exec;
pub mod monte_carlo;
pub mod path_oracle;
pub mod rec_btt;
pub mod tree_model;

pub use compensated::CompensatedSum;
pub use error::{PricingError, Result};
pub use estimate::{
    BasketDiagnostics, Branch, BttDiagnostics, Diagnostics, ErrorKind, McDiagnostics, Method,
    PriceEstimate, RecBttDiagnostics,
};
