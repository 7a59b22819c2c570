//! The recombinant binomial tree: coordinates, node prices, path running
//! totals, risk-neutral parameters, and the closed form for the expected
//! running total.
//!
//! Node `(t, i)` is the `i`-th node at level `t`, where `i` counts upticks,
//! so its price is `s0 * u^(2i - t)`. A path is a sequence of n upticks and
//! downticks; its running total at day `t` is the sum of the prices visited
//! through day `t` (day 0 included).

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// One stock's lattice inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Initial price, > 0.
    pub s0: f64,
    /// Volatility over the whole n-period horizon, >= 0.
    pub sigma: f64,
    /// Per-period risk-free rate, >= 0.
    pub r: f64,
    /// Number of periods, >= 1.
    pub n: u32,
}

impl MarketParams {
    pub fn new(s0: f64, sigma: f64, r: f64, n: u32) -> Result<Self> {
        let p = Self { s0, sigma, r, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0) || !self.s0.is_finite() {
            return Err(PricingError::InvalidParameter(format!(
                "s0 must be finite and > 0, got {}",
                self.s0
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(PricingError::InvalidParameter(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(PricingError::InvalidParameter(format!(
                "r must be finite and >= 0, got {}",
                self.r
            )));
        }
        if self.n < 1 {
            return Err(PricingError::InvalidParameter(
                "n must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Derived uptick/downtick factors and risk-neutral probabilities.
///
/// Satisfies `u = 1/d`, `p + q = 1`, and the risk-neutral return identity
/// `p*u + q*d = 1 + r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub u: f64,
    pub d: f64,
    pub p: f64,
    pub q: f64,
}

/// Node coordinate: level `t` in `0..=n`, uptick count `i` in `0..=t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCoord {
    pub t: u32,
    pub i: u32,
}

impl TreeCoord {
    pub fn new(t: u32, i: u32) -> Self {
        debug_assert!(i <= t);
        Self { t, i }
    }
}

/// One step of a path: uptick (+1) or downtick (-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Down,
    Up,
}

impl Step {
    pub fn signum(self) -> i32 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
        }
    }
}

/// A full path down the tree: exactly `n` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    steps: Vec<Step>,
}

impl Path {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of upticks in the whole path.
    pub fn upticks(&self) -> u32 {
        self.steps.iter().filter(|s| **s == Step::Up).count() as u32
    }
}

/// Derives `(u, d, p, q)` from market parameters:
/// `u = 1/d = e^(sigma/sqrt(n))` and `p = ((1+r) - d) / (u - d)`.
pub fn derive_lattice(params: &MarketParams) -> Result<LatticeParams> {
    params.validate()?;
    if params.sigma == 0.0 {
        return Err(PricingError::DegenerateVolatility);
    }
    let step_vol = params.sigma / (params.n as f64).sqrt();
    let u = step_vol.exp();
    let d = (-step_vol).exp();
    let p = ((1.0 + params.r) - d) / (u - d);
    if !(0.0..=1.0).contains(&p) {
        return Err(PricingError::ArbitrageViolation { p });
    }
    Ok(LatticeParams { u, d, p, q: 1.0 - p })
}

/// Price at node `(t, i)`: `s0 * u^(2i - t)`.
pub fn node_price(params: &MarketParams, lattice: &LatticeParams, coord: TreeCoord) -> f64 {
    debug_assert!(coord.i <= coord.t && coord.t <= params.n);
    params.s0 * lattice.u.powi(2 * coord.i as i32 - coord.t as i32)
}

/// Running totals `T_0..T_n` of the prices along `path`. `T_0 = s0`.
pub fn path_totals(params: &MarketParams, lattice: &LatticeParams, path: &Path) -> Vec<f64> {
    debug_assert_eq!(path.len(), params.n as usize);
    let mut totals = Vec::with_capacity(path.len() + 1);
    let mut price = params.s0;
    let mut total = price;
    totals.push(total);
    for step in path.steps() {
        price *= match step {
            Step::Up => lattice.u,
            Step::Down => lattice.d,
        };
        total += price;
        totals.push(total);
    }
    totals
}

/// Closed form for `E(T_n)`: `(n+1)*s0` when `r = 0`, else
/// `s0 * ((1+r)^(n+1) - 1) / r`.
///
/// The power is a sequential product rather than `powi`: the intrinsic's
/// constant-folded and runtime lowerings can differ by a few ulps, which
/// breaks bit-level reproducibility of the deep-in-the-money branch.
pub fn expected_total(params: &MarketParams) -> f64 {
    if params.r == 0.0 {
        (params.n as f64 + 1.0) * params.s0
    } else {
        let mut growth = 1.0;
        for _ in 0..=params.n {
            growth *= 1.0 + params.r;
        }
        params.s0 * (growth - 1.0) / params.r
    }
}
