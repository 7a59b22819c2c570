//! Bucketed tree traversal: level-by-level propagation of bucketed
//! running-total distributions.
//!
//! Each node carries `k` core buckets subdividing `[0, B)` plus one overflow
//! bucket. A core bucket stores the probability mass of path prefixes whose
//! estimated running total falls in `[j*B/k, (j+1)*B/k)`, represented by the
//! left endpoint `j*B/k`. The overflow bucket stores the mass and the
//! mass-weighted average of estimated totals that reached the barrier `B`;
//! once a prefix overflows, every extension stays in overflow because prices
//! are positive. Left-endpoint representation makes the final payoff a
//! systematic underestimate: the true expectation lies within `n*B/k` above
//! the estimate.

use crate::error::{PricingError, Result};
use crate::estimate::{BttDiagnostics, Diagnostics, ErrorKind, Method, PriceEstimate};
use crate::tree_model::{
    derive_lattice, expected_total, node_price, LatticeParams, MarketParams, TreeCoord,
};

/// Read-only view of one bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bucket {
    pub mass: f64,
    pub value: f64,
}

/// The `k+1` buckets attached to one tree node.
///
/// Core bucket values are implicit (`j*B/k`), so only masses are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeBuckets {
    k: usize,
    barrier: f64,
    core: Vec<f64>,
    overflow_mass: f64,
    overflow_value: f64,
}

impl NodeBuckets {
    pub fn new(k: usize, barrier: f64) -> Self {
        assert!(k >= 1, "bucket count must be >= 1");
        assert!(barrier > 0.0, "barrier must be positive");
        Self {
            k,
            barrier,
            core: vec![0.0; k],
            overflow_mass: 0.0,
            overflow_value: 0.0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn barrier(&self) -> f64 {
        self.barrier
    }

    /// Width of one core bucket, `B/k`.
    pub fn width(&self) -> f64 {
        self.barrier / self.k as f64
    }

    pub fn core_mass(&self, j: usize) -> f64 {
        self.core[j]
    }

    pub fn core_masses(&self) -> &[f64] {
        &self.core
    }

    /// Representative value of core bucket `j`: the left endpoint `j*B/k`.
    pub fn core_value(&self, j: usize) -> f64 {
        j as f64 * self.barrier / self.k as f64
    }

    pub fn overflow(&self) -> Bucket {
        Bucket {
            mass: self.overflow_mass,
            value: self.overflow_value,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.core.iter().sum::<f64>() + self.overflow_mass
    }

    pub(crate) fn shape_matches(&self, other: &NodeBuckets) -> bool {
        self.k == other.k && self.barrier == other.barrier
    }

    /// Index of the core bucket containing `value`; requires `value < B`.
    #[inline]
    fn core_index(&self, value: f64) -> usize {
        debug_assert!(value < self.barrier);
        let raw = (value * self.k as f64 / self.barrier) as usize;
        // value just below B can round up to k under floating point
        raw.min(self.k - 1)
    }

    /// Adds mass directly to core bucket `j`.
    pub fn add_to_core(&mut self, j: usize, mass: f64) {
        self.core[j] += mass;
    }

    /// Mass-weighted average update, in the incremental form
    /// `value += (M / (mass + M)) * (V - value)` to avoid cancellation when
    /// many small masses accumulate.
    pub fn add_to_overflow(&mut self, value: f64, mass: f64) {
        if mass == 0.0 {
            return;
        }
        let new_mass = self.overflow_mass + mass;
        self.overflow_value += (mass / new_mass) * (value - self.overflow_value);
        self.overflow_mass = new_mass;
    }

    /// Routes an estimated running total: below the barrier it lands in the
    /// core bucket containing it, otherwise it joins the overflow average.
    pub fn add_total(&mut self, value: f64, mass: f64) {
        if mass == 0.0 {
            return;
        }
        if value < self.barrier {
            let j = self.core_index(value);
            self.core[j] += mass;
        } else {
            self.add_to_overflow(value, mass);
        }
    }

    /// Combines groups of `self.k / coarse_k` consecutive fine buckets into
    /// coarse buckets (masses summed, representative = coarse left
    /// endpoint). The overflow bucket carries over unchanged.
    pub(crate) fn regroup(&self, coarse_k: usize) -> NodeBuckets {
        assert!(
            self.k % coarse_k == 0,
            "fine bucket count {} not a multiple of coarse count {}",
            self.k,
            coarse_k
        );
        let h = self.k / coarse_k;
        let mut out = NodeBuckets::new(coarse_k, self.barrier);
        for j in 0..coarse_k {
            out.core[j] = self.core[j * h..(j + 1) * h].iter().sum();
        }
        out.overflow_mass = self.overflow_mass;
        out.overflow_value = self.overflow_value;
        out
    }
}

/// Output of a full bucketed traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketedTreeResult {
    /// Buckets at the `n+1` leaves, in node-index order.
    pub leaf_buckets: Vec<NodeBuckets>,
    /// `sum over leaves of overflow.mass * (overflow.value - B)`, the
    /// estimate of `E((T_n - B)^+)`.
    pub payoff_estimate: f64,
}

/// Payoff estimate read off leaf overflow buckets.
pub fn payoff_from_leaves(leaves: &[NodeBuckets], barrier: f64) -> f64 {
    leaves
        .iter()
        .map(|b| b.overflow_mass * (b.overflow_value - barrier))
        .filter(|x| *x != 0.0)
        .sum()
}

/// Propagates bucket state one level down a subtree rooted at `root`.
///
/// `state[i]` holds the buckets of subtree node `(tau, i)`, i.e. tree node
/// `(root.t + tau, root.i + i)`; the result covers subtree level `tau + 1`.
pub(crate) fn propagate_level(
    state: &[NodeBuckets],
    params: &MarketParams,
    lattice: &LatticeParams,
    root: TreeCoord,
    tau: u32,
) -> Vec<NodeBuckets> {
    let k = state[0].k;
    let barrier = state[0].barrier;
    let child_level = root.t + tau + 1;
    let child_prices: Vec<f64> = (0..=tau + 1)
        .map(|i| node_price(params, lattice, TreeCoord::new(child_level, root.i + i)))
        .collect();

    let mut next: Vec<NodeBuckets> = (0..state.len() + 1)
        .map(|_| NodeBuckets::new(k, barrier))
        .collect();

    for (i, node) in state.iter().enumerate() {
        for (child, prob) in [(i, lattice.q), (i + 1, lattice.p)] {
            let price = child_prices[child];
            for j in 0..k {
                let mass = node.core[j];
                if mass == 0.0 {
                    continue;
                }
                next[child].add_total(node.core_value(j) + price, mass * prob);
            }
            if node.overflow_mass > 0.0 {
                next[child].add_total(node.overflow_value + price, node.overflow_mass * prob);
            }
        }
    }
    next
}

/// Runs the bucketed traversal over the depth-`depth` subtree rooted at
/// `root`, returning the buckets at its `depth+1` leaves.
///
/// With `zero_root` the root price is treated as 0 (used when a subtree's
/// prefix already counted the root price); otherwise the initial unit mass
/// goes into the bucket containing the root price, which must be below the
/// barrier.
pub(crate) fn traverse_subtree(
    params: &MarketParams,
    lattice: &LatticeParams,
    root: TreeCoord,
    depth: u32,
    zero_root: bool,
    barrier: f64,
    k: usize,
) -> Result<Vec<NodeBuckets>> {
    let root_value = if zero_root {
        0.0
    } else {
        node_price(params, lattice, root)
    };
    if root_value >= barrier {
        return Err(PricingError::RootAboveBarrier {
            s0: root_value,
            barrier,
        });
    }
    let mut state = vec![NodeBuckets::new(k, barrier)];
    let j = state[0].core_index(root_value);
    state[0].add_to_core(j, 1.0);
    for tau in 0..depth {
        state = propagate_level(&state, params, lattice, root, tau);
    }
    Ok(state)
}

/// Full-tree bucketed traversal with `k` core buckets against `barrier`.
///
/// Requires `s0 < barrier`; otherwise exercise is certain and the caller
/// should price via the closed form (see [`btt_price`]).
pub fn btt_traverse(
    params: &MarketParams,
    lattice: &LatticeParams,
    barrier: f64,
    k: usize,
) -> Result<BucketedTreeResult> {
    params.validate()?;
    if k < 1 {
        return Err(PricingError::InvalidParameter(
            "bucket count k must be >= 1".to_string(),
        ));
    }
    if !(barrier > 0.0) {
        return Err(PricingError::RootAboveBarrier {
            s0: params.s0,
            barrier,
        });
    }
    let leaf_buckets = traverse_subtree(
        params,
        lattice,
        TreeCoord::new(0, 0),
        params.n,
        false,
        barrier,
        k,
    )?;
    let payoff_estimate = payoff_from_leaves(&leaf_buckets, barrier);
    Ok(BucketedTreeResult {
        leaf_buckets,
        payoff_estimate,
    })
}

/// Prices a European Asian call by bucketed traversal with barrier
/// `B = (n+1)*strike`.
///
/// The true price lies in `[price, price + n*strike/k]`. When `s0 >= B`
/// exercise is certain on every path and the exact deterministic-exercise
/// price `(E(T_n) - B)/(n+1)` is returned with a zero-width interval.
pub fn btt_price(params: &MarketParams, strike: f64, k: usize) -> Result<PriceEstimate> {
    params.validate()?;
    if k < 1 {
        return Err(PricingError::InvalidParameter(
            "bucket count k must be >= 1".to_string(),
        ));
    }
    let n1 = params.n as f64 + 1.0;
    let barrier = n1 * strike;
    if params.s0 >= barrier {
        return Ok(PriceEstimate {
            price: (expected_total(params) - barrier) / n1,
            error_kind: ErrorKind::Interval,
            error_value: 0.0,
            confidence: None,
            method: Method::Btt,
            diagnostics: Diagnostics::Btt(BttDiagnostics {
                k,
                barrier,
                overflow_mass: 1.0,
                deterministic_exercise: true,
            }),
        });
    }
    let lattice = derive_lattice(params)?;
    let result = btt_traverse(params, &lattice, barrier, k)?;
    let overflow_mass = result
        .leaf_buckets
        .iter()
        .map(|b| b.overflow().mass)
        .sum();
    Ok(PriceEstimate {
        price: result.payoff_estimate / n1,
        error_kind: ErrorKind::Interval,
        error_value: params.n as f64 * strike / k as f64,
        confidence: None,
        method: Method::Btt,
        diagnostics: Diagnostics::Btt(BttDiagnostics {
            k,
            barrier,
            overflow_mass,
            deterministic_exercise: false,
        }),
    })
}
