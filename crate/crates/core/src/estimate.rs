//! The common result record produced by every pricing method.

use serde::{Deserialize, Serialize};

use crate::rec_btt::{BaseSolver, RecursionSchedule};

/// How the reported `error_value` of a [`PriceEstimate`] is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// `|price - true price| <= error_value` with probability `confidence`.
    AbsoluteBound,
    /// The estimator's standard deviation is at most `error_value`,
    /// with probability `confidence` that this bound applies.
    StdDevBound,
    /// One-sided containment: the true price lies in
    /// `[price, price + error_value]` deterministically.
    Interval,
}

/// Which pricing method produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    StrongMc,
    Btt,
    RecBtt,
    BasketBtt,
    Exact,
}

/// Which branch the Monte Carlo pricer took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Few sampled totals fell below the barrier: the closed-form
    /// expected-total formula was returned.
    DeepInMoney,
    /// The sampled payoff mean was returned.
    Sampled,
}

/// Monte Carlo run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McDiagnostics {
    /// Number of sampled paths N.
    pub n_samples: u64,
    /// Fraction Z/N of samples with running total at or below the barrier.
    pub z_fraction: f64,
    pub branch: Branch,
    /// lambda0 = sqrt(2 ln(2/epsilon)).
    pub lambda0: f64,
    /// True when the deep-in-the-money formula produced a negative value
    /// that was clamped to zero (the branch test was statistically
    /// misleading for this instance).
    pub deep_value_clamped: bool,
}

/// Bucketed-tree-traversal diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BttDiagnostics {
    pub k: usize,
    pub barrier: f64,
    /// Probability mass sitting in leaf overflow buckets.
    pub overflow_mass: f64,
    /// True when the initial price already met the barrier and the exact
    /// deterministic-exercise price was returned.
    pub deterministic_exercise: bool,
}

/// Recursive-scheme diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecBttDiagnostics {
    pub schedule: RecursionSchedule,
    pub base_solver: BaseSolver,
    /// Analytic bound on the payoff-scale underestimation, computed from the
    /// recursion schedule. Divide by n+1 for the price-scale bound.
    pub e0_payoff_bound: f64,
    pub fresh_solves: u64,
    pub estimate_reuses: u64,
    /// True when the schedule collapsed to a single level and the plain
    /// bucketed traversal was used instead.
    pub degenerate: bool,
    pub deterministic_exercise: bool,
    /// One-sided containment only holds for deterministic base solvers; a
    /// Monte Carlo base adds two-sided sampling noise.
    pub bound_is_guaranteed: bool,
}

/// Basket-pricer diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketDiagnostics {
    /// Payoff-scale analytic bound per stock, from each stock's schedule.
    pub per_stock_e0: Vec<f64>,
    /// Probability that two or more stocks land in their overflow
    /// superbucket. Such events are counted once per overflowing stock by
    /// the overflow term, so they bound the possible overcount.
    pub multi_overflow_probability: f64,
    /// Price-scale upper bound on the multi-overflow overcount, from the
    /// pairwise inclusion-exclusion of the bucketed per-stock distributions.
    pub overcount_bound: f64,
    pub deterministic_exercise: bool,
}

/// Method-specific diagnostics attached to a [`PriceEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostics {
    Exact { paths_enumerated: u64 },
    StrongMc(McDiagnostics),
    Btt(BttDiagnostics),
    RecBtt(RecBttDiagnostics),
    Basket(BasketDiagnostics),
}

/// A price together with its provable error characterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceEstimate {
    pub price: f64,
    pub error_kind: ErrorKind,
    /// The bound named by `error_kind`; always >= 0.
    pub error_value: f64,
    /// 1 - delta for probabilistic bounds; absent for deterministic ones.
    pub confidence: Option<f64>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}
