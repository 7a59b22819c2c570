//! Monte Carlo pricing with analytic error bounds.
//!
//! The sample count is derived from a concentration analysis rather than an
//! estimated payoff variance, so the reported bounds hold a priori: with N
//! samples, either the instance is deep in the money (few sampled totals at
//! or below the barrier) and the closed-form expected total prices the call
//! within `4*epsilon*X` with probability `1-delta`, or the sampled payoff
//! mean has standard deviation at most `epsilon*X`.
//!
//! Sampling is split into fixed-size chunks with one counter-mode RNG
//! substream per chunk, and the reduction walks chunks in index order, so a
//! given seed produces bit-identical estimates regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compensated::CompensatedSum;
use crate::error::{PricingError, Result};
use crate::estimate::{Branch, Diagnostics, ErrorKind, McDiagnostics, Method, PriceEstimate};
use crate::exec::map_indexed;
use crate::tree_model::{derive_lattice, expected_total, LatticeParams, MarketParams, Path, Step};

/// Paths per RNG substream. Fixed so that results do not depend on the
/// number of worker threads.
const CHUNK: u64 = 8192;

/// Requested accuracy: relative price error `epsilon` and failure
/// probability `delta`, both in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracySpec {
    pub epsilon: f64,
    pub delta: f64,
}

impl AccuracySpec {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(PricingError::InvalidParameter(format!(
                "epsilon must be in (0, 1), got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(PricingError::InvalidParameter(format!(
                "delta must be in (0, 1), got {delta}"
            )));
        }
        Ok(Self { epsilon, delta })
    }
}

/// Multipliers on the two terms of the sample-count formula.
///
/// The defaults realize the analysis exactly:
/// * branch-test term `ceil(c1 * ln(2/delta) / (2*epsilon^2))` — the
///   additive Chernoff-Hoeffding count that estimates the below-barrier
///   probability to within `epsilon`, which separates the `2*epsilon`
///   branch threshold from both `epsilon` and `4*epsilon` (c1 = 1);
/// * variance term `ceil(c2 * (1/epsilon^2) * e^(4*sigma*lambda0*sqrt(m))
///   * (1 + 2*sigma*epsilon*sqrt(m)) / (lambda0 - 2*sigma*sqrt(m)))` — the
///   count that caps the payoff-mean standard deviation at
///   `epsilon*(n+1)*X` (c2 = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffConstants {
    pub c1: f64,
    pub c2: f64,
}

impl Default for ChernoffConstants {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0 }
    }
}

/// `lambda0 = sqrt(2 ln(2/epsilon))`, the tail cutoff satisfying
/// `2 e^(-lambda0^2 / 2) = epsilon`.
pub fn lambda0(epsilon: f64) -> f64 {
    debug_assert!(epsilon > 0.0 && epsilon < 1.0);
    (2.0 * (2.0 / epsilon).ln()).sqrt()
}

/// Number of samples required for the stated bounds, with explicit
/// constants. `sigma_max` is the largest volatility in the basket and `m`
/// the number of stocks (`m = 1` for a single stock).
pub fn required_samples_with(
    spec: &AccuracySpec,
    sigma_max: f64,
    m: u32,
    consts: &ChernoffConstants,
) -> Result<u64> {
    let lam = lambda0(spec.epsilon);
    let sm = sigma_max * (m as f64).sqrt();
    if lam <= 2.0 * sm {
        return Err(PricingError::VarianceBoundVacuous {
            lambda0: lam,
            sigma_term: 2.0 * sm,
        });
    }
    let eps = spec.epsilon;
    let branch_term = (consts.c1 * (2.0 / spec.delta).ln() / (2.0 * eps * eps)).ceil();
    let variance_term = (consts.c2 * (1.0 / (eps * eps)) * (4.0 * sm * lam).exp()
        * (1.0 + 2.0 * sm * eps)
        / (lam - 2.0 * sm))
        .ceil();
    let n = branch_term + variance_term;
    if !n.is_finite() || n >= u64::MAX as f64 {
        return Err(PricingError::InvalidParameter(
            "required sample count overflows".to_string(),
        ));
    }
    Ok(n as u64)
}

/// [`required_samples_with`] using the default constants.
pub fn required_samples(spec: &AccuracySpec, sigma_max: f64, m: u32) -> Result<u64> {
    required_samples_with(spec, sigma_max, m, &ChernoffConstants::default())
}

/// Samples one path: each step is an uptick with probability `p`.
pub fn sample_path<R: Rng>(rng: &mut R, lattice: &LatticeParams, n: u32) -> Path {
    let steps = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < lattice.p {
                Step::Up
            } else {
                Step::Down
            }
        })
        .collect();
    Path::new(steps)
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkSums {
    z_count: u64,
    payoff: CompensatedSum,
}

/// Walks `count` samples of the summed running total over `stocks`,
/// tallying below-barrier counts and positive-part payoffs.
fn run_chunk(
    stocks: &[(MarketParams, LatticeParams)],
    barrier: f64,
    count: u64,
    rng: &mut ChaCha8Rng,
) -> ChunkSums {
    let mut sums = ChunkSums::default();
    for _ in 0..count {
        let mut total = 0.0;
        for (params, lattice) in stocks {
            let mut price = params.s0;
            let mut stock_total = price;
            for _ in 0..params.n {
                if rng.gen::<f64>() < lattice.p {
                    price *= lattice.u;
                } else {
                    price *= lattice.d;
                }
                stock_total += price;
            }
            total += stock_total;
        }
        if total <= barrier {
            sums.z_count += 1;
        }
        let payoff = total - barrier;
        if payoff > 0.0 {
            sums.payoff.add(payoff);
        }
    }
    sums
}

fn mc_estimate(
    stocks: &[(MarketParams, LatticeParams)],
    expected_total_sum: f64,
    n: u32,
    strike: f64,
    spec: &AccuracySpec,
    seed: u64,
    n_samples: u64,
) -> PriceEstimate {
    let barrier = (n as f64 + 1.0) * strike;
    let chunks = n_samples.div_ceil(CHUNK) as usize;

    let partials = map_indexed(chunks, |c| {
        let start = c as u64 * CHUNK;
        let count = CHUNK.min(n_samples - start);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        run_chunk(stocks, barrier, count, &mut rng)
    });

    let mut z_count = 0u64;
    let mut payoff = CompensatedSum::new();
    for part in &partials {
        z_count += part.z_count;
        payoff.merge(&part.payoff);
    }

    let z_fraction = z_count as f64 / n_samples as f64;
    let lam = lambda0(spec.epsilon);
    let deep = z_fraction <= 2.0 * spec.epsilon;

    let (price, error_kind, error_value, clamped) = if deep {
        let raw = (expected_total_sum - barrier) / (n as f64 + 1.0);
        let clamped = raw < 0.0;
        (
            raw.max(0.0),
            ErrorKind::AbsoluteBound,
            4.0 * spec.epsilon * strike,
            clamped,
        )
    } else {
        let mean = payoff.total() / n_samples as f64;
        (
            mean / (n as f64 + 1.0),
            ErrorKind::StdDevBound,
            spec.epsilon * strike,
            false,
        )
    };

    PriceEstimate {
        price,
        error_kind,
        error_value,
        confidence: Some(1.0 - spec.delta),
        method: Method::StrongMc,
        diagnostics: Diagnostics::StrongMc(McDiagnostics {
            n_samples,
            z_fraction,
            branch: if deep { Branch::DeepInMoney } else { Branch::Sampled },
            lambda0: lam,
            deep_value_clamped: clamped,
        }),
    }
}

/// Prices a single-stock European Asian call by seeded Monte Carlo with
/// explicit constants.
pub fn strong_mc_price_with(
    params: &MarketParams,
    strike: f64,
    spec: &AccuracySpec,
    seed: u64,
    consts: &ChernoffConstants,
) -> Result<PriceEstimate> {
    let lattice = derive_lattice(params)?;
    let n_samples = required_samples_with(spec, params.sigma, 1, consts)?;
    Ok(mc_estimate(
        &[(*params, lattice)],
        expected_total(params),
        params.n,
        strike,
        spec,
        seed,
        n_samples,
    ))
}

/// Prices a single-stock European Asian call by seeded Monte Carlo.
pub fn strong_mc_price(
    params: &MarketParams,
    strike: f64,
    spec: &AccuracySpec,
    seed: u64,
) -> Result<PriceEstimate> {
    strong_mc_price_with(params, strike, spec, seed, &ChernoffConstants::default())
}

/// Prices a basket of independently moving stocks. The sample count uses
/// the maximum volatility in the basket and grows with `sqrt(m)` in the
/// exponent; all stocks must share the same number of periods.
pub fn strong_mc_basket_price_with(
    stocks: &[MarketParams],
    strike: f64,
    spec: &AccuracySpec,
    seed: u64,
    consts: &ChernoffConstants,
) -> Result<PriceEstimate> {
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
    let pairs: Vec<(MarketParams, LatticeParams)> = stocks
        .iter()
        .map(|s| Ok((*s, derive_lattice(s)?)))
        .collect::<Result<_>>()?;
    let sigma_max = stocks.iter().map(|s| s.sigma).fold(0.0, f64::max);
    let n_samples = required_samples_with(spec, sigma_max, stocks.len() as u32, consts)?;
    let expected_sum: f64 = stocks.iter().map(expected_total).sum();
    Ok(mc_estimate(&pairs, expected_sum, n, strike, spec, seed, n_samples))
}

/// [`strong_mc_basket_price_with`] using the default constants.
pub fn strong_mc_basket_price(
    stocks: &[MarketParams],
    strike: f64,
    spec: &AccuracySpec,
    seed: u64,
) -> Result<PriceEstimate> {
    strong_mc_basket_price_with(stocks, strike, spec, seed, &ChernoffConstants::default())
}
