//! Basket pricing through per-stock bucketed trees and FFT polynomial
//! products.
//!
//! Each stock runs its own recursive bucketed traversal against the shared
//! barrier `B = (n+1)X`; if any single stock's running total reaches `B`,
//! exercise is certain no matter what the others do. Leaf buckets of each
//! stock collapse into `k+1` superbuckets (same-index buckets summed across
//! leaves). The overflow superbuckets contribute a closed-form term; the
//! core superbuckets combine through one polynomial product across stocks,
//! whose coefficient of degree `j` is the joint probability that every stock
//! stayed below `B` and the bucketed totals sum into `[j*B/k, (j+1)*B/k)`.
//!
//! The overflow term counts sample points where several stocks overflow once
//! per overflowing stock, while the product term excludes them entirely.
//! Diagnostics report the probability of such events and a price-scale
//! bound on the resulting overcount.

use serde::{Deserialize, Serialize};

use crate::bucket_btt::NodeBuckets;
use crate::convolution::{product_tree, MassPolynomial};
use crate::error::{PricingError, Result};
use crate::estimate::{BasketDiagnostics, Diagnostics, ErrorKind, Method, PriceEstimate};
use crate::exec::map_indexed;
use crate::rec_btt::{rec_btt_leaf_buckets, BaseSolver, RecBttConfig, RecBttRun};
use crate::tree_model::{derive_lattice, expected_total, MarketParams};

/// A basket pricing request: `m` stocks sharing the same period count, one
/// strike, and the recursion controls for the per-stock traversals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketSpec {
    pub stocks: Vec<MarketParams>,
    pub strike: f64,
    pub k0: usize,
    pub r: u32,
}

impl BasketSpec {
    pub fn new(stocks: Vec<MarketParams>, strike: f64, k0: usize, r: u32) -> Result<Self> {
        if stocks.is_empty() {
            return Err(PricingError::InvalidParameter(
                "basket must contain at least one stock".to_string(),
            ));
        }
        let n = stocks[0].n;
        for s in &stocks {
            s.validate()?;
            if s.n != n {
                return Err(PricingError::InvalidParameter(
                    "all basket stocks must share the same number of periods".to_string(),
                ));
            }
        }
        if !(strike >= 0.0) || !strike.is_finite() {
            return Err(PricingError::InvalidParameter(format!(
                "strike must be finite and >= 0, got {strike}"
            )));
        }
        Ok(Self { stocks, strike, k0, r })
    }

    pub fn n(&self) -> u32 {
        self.stocks[0].n
    }
}

/// Per-stock aggregation of same-index leaf buckets across all leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperbucketArray {
    /// Mass of core superbucket `j` (representative value `j*B/k`).
    pub core_masses: Vec<f64>,
    pub overflow_mass: f64,
    /// Mass-weighted average of leaf overflow values.
    pub overflow_value: f64,
    pub k: usize,
    pub barrier: f64,
}

impl SuperbucketArray {
    pub fn core_value(&self, j: usize) -> f64 {
        j as f64 * self.barrier / self.k as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.core_masses.iter().sum::<f64>() + self.overflow_mass
    }
}

/// Collapses per-leaf buckets into superbuckets: core masses summed by
/// index, overflow mass summed with a mass-weighted average value.
pub fn superbuckets(leaf_buckets: &[NodeBuckets]) -> Result<SuperbucketArray> {
    let first = leaf_buckets.first().ok_or_else(|| PricingError::BucketShapeMismatch {
        detail: "no leaf buckets to aggregate".to_string(),
    })?;
    let k = first.k();
    let barrier = first.barrier();
    if leaf_buckets.iter().any(|b| !b.shape_matches(first)) {
        return Err(PricingError::BucketShapeMismatch {
            detail: "leaves disagree on (k, barrier)".to_string(),
        });
    }
    let mut core_masses = vec![0.0; k];
    let mut overflow_mass = 0.0;
    let mut overflow_value = 0.0;
    for leaf in leaf_buckets {
        for (j, mass) in core_masses.iter_mut().enumerate() {
            *mass += leaf.core_mass(j);
        }
        let of = leaf.overflow();
        if of.mass > 0.0 {
            let new_mass = overflow_mass + of.mass;
            overflow_value += (of.mass / new_mass) * (of.value - overflow_value);
            overflow_mass = new_mass;
        }
    }
    Ok(SuperbucketArray {
        core_masses,
        overflow_mass,
        overflow_value,
        k,
        barrier,
    })
}

/// Prices a European Asian basket call, with full recursion knobs.
pub fn basket_price_with(
    spec: &BasketSpec,
    base_solver: BaseSolver,
    seed: u64,
) -> Result<PriceEstimate> {
    let m = spec.stocks.len();
    let n = spec.n();
    let n1 = n as f64 + 1.0;
    let barrier = n1 * spec.strike;
    let expected: Vec<f64> = spec.stocks.iter().map(expected_total).collect();
    let expected_sum: f64 = expected.iter().sum();

    // Any stock opening at or above the barrier exercises the call on every
    // path, so the price is the closed form exactly.
    if spec.stocks.iter().any(|s| s.s0 >= barrier) {
        return Ok(PriceEstimate {
            price: (expected_sum - barrier) / n1,
            error_kind: ErrorKind::Interval,
            error_value: 0.0,
            confidence: None,
            method: Method::BasketBtt,
            diagnostics: Diagnostics::Basket(BasketDiagnostics {
                per_stock_e0: vec![0.0; m],
                multi_overflow_probability: 0.0,
                overcount_bound: 0.0,
                deterministic_exercise: true,
            }),
        });
    }

    // independent per-stock traversals against the shared barrier
    let runs: Vec<Result<RecBttRun>> = map_indexed(m, |i| {
        let stock = &spec.stocks[i];
        let lattice = derive_lattice(stock)?;
        let mut cfg = RecBttConfig::new(spec.k0, spec.r, base_solver);
        cfg.seed = seed.wrapping_add(i as u64);
        rec_btt_leaf_buckets(stock, &lattice, barrier, &cfg)
    });
    let runs: Vec<RecBttRun> = runs.into_iter().collect::<Result<_>>()?;

    let supers: Vec<SuperbucketArray> = runs
        .iter()
        .map(|run| superbuckets(&run.leaf_buckets))
        .collect::<Result<_>>()?;

    // overflow term: stock i overflowing exercises the call, so the other
    // stocks enter at their exact expected totals
    let mut overflow_term = 0.0;
    for (i, sb) in supers.iter().enumerate() {
        if sb.overflow_mass > 0.0 {
            overflow_term +=
                sb.overflow_mass * (sb.overflow_value + (expected_sum - expected[i]) - barrier);
        }
    }

    // core term: product of per-stock core-mass polynomials; degree j >= k
    // means the bucketed totals sum past the barrier
    let polys: Vec<MassPolynomial> = supers
        .iter()
        .map(|sb| MassPolynomial::new(sb.core_masses.clone()))
        .collect();
    let joint = product_tree(&polys);
    debug_assert_eq!(joint.len(), m * (spec.k0 - 1) + 1);
    let width = barrier / spec.k0 as f64;
    let mut core_term = 0.0;
    for (j, &mass) in joint.coeffs.iter().enumerate().skip(spec.k0) {
        if mass != 0.0 {
            core_term += mass * (j as f64 * width - barrier);
        }
    }

    let price = (overflow_term + core_term) / n1;

    let per_stock_e0: Vec<f64> = runs.iter().map(|r| r.e0_payoff_bound).collect();
    let worst_e0 = per_stock_e0.iter().fold(0.0, |a: f64, &b| a.max(b));
    let error_value = m as f64 * worst_e0 / n1;

    // multi-overflow accounting: probability that >= 2 stocks overflow, and
    // a pairwise bound on the payoff overcounted by the overflow term
    let betas: Vec<f64> = supers.iter().map(|sb| sb.overflow_mass).collect();
    let none: f64 = betas.iter().map(|b| 1.0 - b).product();
    let exactly_one: f64 = (0..m)
        .map(|i| {
            betas[i]
                * betas
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, b)| 1.0 - b)
                    .product::<f64>()
        })
        .sum();
    let multi_overflow_probability = (1.0 - none - exactly_one).max(0.0);

    let mut overcount = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            if betas[i] > 0.0 && betas[j] > 0.0 {
                let others: f64 = expected_sum - expected[i] - expected[j];
                overcount += betas[i]
                    * betas[j]
                    * (supers[i].overflow_value + supers[j].overflow_value + others - barrier);
            }
        }
    }
    let overcount_bound = overcount.max(0.0) / n1;

    let bound_is_guaranteed = base_solver != BaseSolver::StrongMc;
    let _ = bound_is_guaranteed;

    Ok(PriceEstimate {
        price,
        error_kind: ErrorKind::Interval,
        error_value,
        confidence: None,
        method: Method::BasketBtt,
        diagnostics: Diagnostics::Basket(BasketDiagnostics {
            per_stock_e0,
            multi_overflow_probability,
            overcount_bound,
            deterministic_exercise: false,
        }),
    })
}

/// Prices a European Asian basket call with the default (plain bucketed)
/// base solver.
pub fn basket_price(spec: &BasketSpec) -> Result<PriceEstimate> {
    basket_price_with(spec, BaseSolver::Btt, 0)
}
