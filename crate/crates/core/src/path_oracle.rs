//! Exact pricing by exhaustive path enumeration.
//!
//! This is the trusted ground-truth oracle: no pruning, no approximation.
//! Paths are enumerated in lexicographic order over step vectors (downtick
//! before uptick) and the expectation is accumulated with compensated
//! summation. Enumeration is partitioned across threads by path prefix with
//! a partition rule that depends only on the depth, and partial sums are
//! combined sequentially in prefix order, so results are bit-identical run
//! to run regardless of thread count.

use serde::{Deserialize, Serialize};

use crate::compensated::CompensatedSum;
use crate::error::{PricingError, Result};
use crate::exec::map_indexed;
use crate::tree_model::{derive_lattice, LatticeParams, MarketParams};

/// Default cap on enumerated path steps (single stock: n; basket: m*n).
pub const DEFAULT_MAX_STEPS: u32 = 24;

/// Exact price of a European Asian call, with the undiscounted total-payoff
/// expectation it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPrice {
    /// `E((A_n - X)^+)`.
    pub price: f64,
    /// `E((T_n - (n+1)X)^+)`; `price = total_payoff / (n+1)`.
    pub total_payoff: f64,
    /// `2^n` for a single stock, `2^(m*n)` for a basket of m stocks.
    pub paths_enumerated: u64,
}

/// One partition's contribution to the expectation sums.
#[derive(Debug, Clone, Copy, Default)]
struct PartitionSums {
    payoff: CompensatedSum,
    measure: CompensatedSum,
}

/// Prefix depth used to split enumeration into partitions. Fixed as a
/// function of the depth alone so that the reduction order never changes.
fn prefix_depth(n: u32) -> u32 {
    if n <= 8 {
        0
    } else {
        (n - 6).min(12)
    }
}

/// Walks every extension of the given prefix, accumulating the probability
/// mass and the positive part of `T_n - barrier`.
fn enumerate_tail(
    lattice: &LatticeParams,
    price: f64,
    total: f64,
    prob: f64,
    steps_left: u32,
    barrier: f64,
    sums: &mut PartitionSums,
) {
    if steps_left == 0 {
        sums.measure.add(prob);
        let payoff = total - barrier;
        if payoff > 0.0 {
            sums.payoff.add(prob * payoff);
        }
        return;
    }
    let down = price * lattice.d;
    enumerate_tail(
        lattice,
        down,
        total + down,
        prob * lattice.q,
        steps_left - 1,
        barrier,
        sums,
    );
    let up = price * lattice.u;
    enumerate_tail(
        lattice,
        up,
        total + up,
        prob * lattice.p,
        steps_left - 1,
        barrier,
        sums,
    );
}

/// Exhaustive sweep of all `2^n` paths; returns (payoff expectation,
/// total enumerated probability mass).
fn sweep(params: &MarketParams, lattice: &LatticeParams, barrier: f64) -> (f64, f64) {
    let n = params.n;
    let p_depth = prefix_depth(n);
    let partitions = 1usize << p_depth;

    let partials = map_indexed(partitions, |prefix| {
        let mut sums = PartitionSums::default();
        // decode the prefix most-significant-step first: bit = 1 is an uptick
        let mut price = params.s0;
        let mut total = price;
        let mut prob = 1.0;
        for level in 0..p_depth {
            let bit = (prefix >> (p_depth - 1 - level)) & 1;
            if bit == 1 {
                price *= lattice.u;
                prob *= lattice.p;
            } else {
                price *= lattice.d;
                prob *= lattice.q;
            }
            total += price;
        }
        enumerate_tail(lattice, price, total, prob, n - p_depth, barrier, &mut sums);
        sums
    });

    let mut payoff = CompensatedSum::new();
    let mut measure = CompensatedSum::new();
    for part in &partials {
        payoff.merge(&part.payoff);
        measure.merge(&part.measure);
    }
    (payoff.total(), measure.total())
}

fn check_steps(steps: u32, max: u32) -> Result<()> {
    if steps > max || steps >= 63 {
        return Err(PricingError::InstanceTooLarge { steps, max });
    }
    Ok(())
}

/// Exact call price by enumerating all `2^n` paths, with `n` capped at
/// `max_steps`.
pub fn exact_price_with_max(
    params: &MarketParams,
    strike: f64,
    max_steps: u32,
) -> Result<ExactPrice> {
    check_steps(params.n, max_steps)?;
    let lattice = derive_lattice(params)?;
    let barrier = (params.n as f64 + 1.0) * strike;
    let (total_payoff, _) = sweep(params, &lattice, barrier);
    Ok(ExactPrice {
        price: total_payoff / (params.n as f64 + 1.0),
        total_payoff,
        paths_enumerated: 1u64 << params.n,
    })
}

/// Exact call price with the default depth cap of [`DEFAULT_MAX_STEPS`].
pub fn exact_price(params: &MarketParams, strike: f64) -> Result<ExactPrice> {
    exact_price_with_max(params, strike, DEFAULT_MAX_STEPS)
}

/// Exact undiscounted total-payoff expectation `E((T_n - barrier)^+)`.
pub fn exact_total_payoff(params: &MarketParams, barrier: f64) -> Result<f64> {
    check_steps(params.n, DEFAULT_MAX_STEPS)?;
    let lattice = derive_lattice(params)?;
    Ok(sweep(params, &lattice, barrier).0)
}

/// Per-path table for one stock: (final running total, path probability),
/// in lexicographic path order.
fn path_table(params: &MarketParams, lattice: &LatticeParams) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(1 << params.n);
    fn rec(
        lattice: &LatticeParams,
        price: f64,
        total: f64,
        prob: f64,
        steps_left: u32,
        out: &mut Vec<(f64, f64)>,
    ) {
        if steps_left == 0 {
            out.push((total, prob));
            return;
        }
        let down = price * lattice.d;
        rec(lattice, down, total + down, prob * lattice.q, steps_left - 1, out);
        let up = price * lattice.u;
        rec(lattice, up, total + up, prob * lattice.p, steps_left - 1, out);
    }
    rec(lattice, params.s0, params.s0, 1.0, params.n, &mut out);
    out
}

/// Exact basket price by enumerating the product space of all per-stock
/// paths (`2^(m*n)` combinations, capped at [`DEFAULT_MAX_STEPS`] total
/// steps). All stocks must share the same `n`.
pub fn exact_basket_price(stocks: &[MarketParams], strike: f64) -> Result<ExactPrice> {
    if stocks.is_empty() {
        return Err(PricingError::InvalidParameter(
            "basket must contain at least one stock".to_string(),
        ));
    }
    let n = stocks[0].n;
    if stocks.iter().any(|s| s.n != n) {
        return Err(PricingError::InvalidParameter(
            "all basket stocks must share the same number of periods".to_string(),
        ));
    }
    let m = stocks.len() as u32;
    check_steps(m * n, DEFAULT_MAX_STEPS)?;

    let tables: Vec<Vec<(f64, f64)>> = stocks
        .iter()
        .map(|s| {
            let lattice = derive_lattice(s)?;
            Ok(path_table(s, &lattice))
        })
        .collect::<Result<_>>()?;

    let barrier = (n as f64 + 1.0) * strike;

    // Cross product over per-stock path tables, partitioned by the first
    // stock's path index. Stocks after the first are folded recursively in
    // fixed lexicographic order.
    fn cross(
        tables: &[Vec<(f64, f64)>],
        total: f64,
        prob: f64,
        barrier: f64,
        sums: &mut PartitionSums,
    ) {
        match tables.split_first() {
            None => {
                sums.measure.add(prob);
                let payoff = total - barrier;
                if payoff > 0.0 {
                    sums.payoff.add(prob * payoff);
                }
            }
            Some((first, rest)) => {
                for &(t, pr) in first {
                    cross(rest, total + t, prob * pr, barrier, sums);
                }
            }
        }
    }

    let first = &tables[0];
    let partials = map_indexed(first.len(), |idx| {
        let (t0, p0) = first[idx];
        let mut sums = PartitionSums::default();
        cross(&tables[1..], t0, p0, barrier, &mut sums);
        sums
    });

    let mut payoff = CompensatedSum::new();
    for part in &partials {
        payoff.merge(&part.payoff);
    }
    let total_payoff = payoff.total();
    Ok(ExactPrice {
        price: total_payoff / (n as f64 + 1.0),
        total_payoff,
        paths_enumerated: 1u64 << (m * n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_model::expected_total;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(s0: f64, sigma: f64, r: f64, n: u32) -> MarketParams {
        MarketParams::new(s0, sigma, r, n).unwrap()
    }

    /// Independent oracle for E((T_n - barrier)^+): level-by-level dynamic
    /// programming over per-node lists of exact attainable running totals.
    fn dp_total_payoff(params: &MarketParams, barrier: f64) -> f64 {
        let l = derive_lattice(params).unwrap();
        // state[i] = list of (total, prob) for paths ending at node (t, i)
        let mut state: Vec<Vec<(f64, f64)>> = vec![vec![(params.s0, 1.0)]];
        let mut prices = vec![params.s0];
        for _ in 0..params.n {
            let mut next_prices = Vec::with_capacity(prices.len() + 1);
            next_prices.push(prices[0] * l.d);
            for &pr in &prices {
                next_prices.push(pr * l.u);
            }
            let mut next: Vec<Vec<(f64, f64)>> = vec![Vec::new(); state.len() + 1];
            for (i, entries) in state.iter().enumerate() {
                for &(total, prob) in entries {
                    next[i].push((total + next_prices[i], prob * l.q));
                    next[i + 1].push((total + next_prices[i + 1], prob * l.p));
                }
            }
            state = next;
            prices = next_prices;
        }
        let mut sum = CompensatedSum::new();
        for entries in &state {
            for &(total, prob) in entries {
                if total > barrier {
                    sum.add(prob * (total - barrier));
                }
            }
        }
        sum.total()
    }

    #[test]
    fn zero_strike_recovers_expected_average() {
        let p = params(100.0, 0.3, 0.0, 8);
        let e = exact_price(&p, 0.0).unwrap();
        assert_relative_eq!(e.price, 100.0, max_relative = 1e-12);
        assert_eq!(e.paths_enumerated, 256);
        assert_relative_eq!(e.price, e.total_payoff / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn two_path_instance_by_hand() {
        // u = 2, d = 0.5, r = 0 gives p = 1/3; up: A = 150, down: A = 75.
        let p = params(100.0, std::f64::consts::LN_2, 0.0, 1);
        let e = exact_price(&p, 120.0).unwrap();
        assert_relative_eq!(e.price, 10.0, max_relative = 1e-12);
        assert_eq!(e.paths_enumerated, 2);
    }

    #[test]
    fn instance_too_large_rejected() {
        let p = params(100.0, 0.3, 0.0, 25);
        assert!(matches!(
            exact_price(&p, 100.0),
            Err(PricingError::InstanceTooLarge { .. })
        ));
        assert!(exact_price_with_max(&p, 100.0, 25).is_ok());
    }

    #[test]
    fn unreachable_barrier_pays_zero() {
        let p = params(100.0, 0.3, 0.0, 10);
        let l = derive_lattice(&p).unwrap();
        let max_total: f64 = (0..=10).map(|t| 100.0 * l.u.powi(t)).sum();
        assert_eq!(exact_total_payoff(&p, max_total + 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_barrier_recovers_expected_total() {
        let p = params(100.0, 0.3, 0.02, 10);
        assert_relative_eq!(
            exact_total_payoff(&p, 0.0).unwrap(),
            expected_total(&p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn total_payoff_matches_dp_oracle() {
        let p = params(100.0, 0.35, 0.01, 10);
        let barrier = 11.0 * 100.0;
        assert_relative_eq!(
            exact_total_payoff(&p, barrier).unwrap(),
            dp_total_payoff(&p, barrier),
            max_relative = 1e-11
        );
    }

    #[test]
    fn enumeration_measure_sums_to_one() {
        for &(sigma, r, n) in &[(0.2, 0.0, 6u32), (0.45, 0.03, 11), (0.8, 0.01, 14)] {
            let p = params(100.0, sigma, r, n);
            let l = derive_lattice(&p).unwrap();
            let (_, measure) = sweep(&p, &l, 0.0);
            assert!((measure - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn basket_of_one_matches_single_stock() {
        let p = params(100.0, 0.3, 0.01, 9);
        let single = exact_price(&p, 95.0).unwrap();
        let basket = exact_basket_price(&[p], 95.0).unwrap();
        assert_eq!(single.price.to_bits(), basket.price.to_bits());
        assert_eq!(single.paths_enumerated, basket.paths_enumerated);
    }

    #[test]
    fn basket_zero_strike_two_identical_stocks() {
        let p = params(100.0, 0.3, 0.0, 6);
        let e = exact_basket_price(&[p, p], 0.0).unwrap();
        assert_relative_eq!(e.price, 200.0, max_relative = 1e-12);
        assert_eq!(e.paths_enumerated, 1 << 12);
    }

    #[test]
    fn basket_heterogeneous_periods_rejected() {
        let a = params(100.0, 0.3, 0.0, 6);
        let b = params(100.0, 0.3, 0.0, 7);
        assert!(matches!(
            exact_basket_price(&[a, b], 100.0),
            Err(PricingError::InvalidParameter(_))
        ));
    }

    #[test]
    fn deterministic_across_runs() {
        let p = params(123.4, 0.42, 0.015, 14);
        let a = exact_price(&p, 117.0).unwrap();
        let b = exact_price(&p, 117.0).unwrap();
        assert_eq!(a.price.to_bits(), b.price.to_bits());
        assert_eq!(a.total_payoff.to_bits(), b.total_payoff.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn price_monotone_and_lipschitz_in_strike(
            sigma in 0.1f64..0.6,
            r in 0.0f64..0.04,
            strike in 50.0f64..150.0,
            delta in 0.1f64..20.0,
        ) {
            let p = params(100.0, sigma, r, 8);
            let a = exact_price(&p, strike).unwrap().price;
            let b = exact_price(&p, strike + delta).unwrap().price;
            prop_assert!(b <= a + 1e-12);
            prop_assert!(a - b <= delta + 1e-9);
        }

        #[test]
        fn total_payoff_dominates_linear_part(
            sigma in 0.1f64..0.6,
            barrier in 0.0f64..2000.0,
        ) {
            let p = params(100.0, sigma, 0.01, 8);
            let payoff = exact_total_payoff(&p, barrier).unwrap();
            prop_assert!(payoff >= expected_total(&p) - barrier - 1e-9);
            prop_assert!(payoff >= 0.0);
        }
    }
}
