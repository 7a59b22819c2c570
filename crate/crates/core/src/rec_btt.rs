//! Recursive bucketed tree traversal.
//!
//! Instead of propagating buckets one level at a time, the recursive scheme
//! jumps whole blocks: it solves depth-`n1` subtrees rooted at the current
//! boundary level with finer buckets, regroups them to the coarse
//! granularity, and merges their leaf buckets into the boundary `n1` levels
//! down. Two ideas make this cheap:
//!
//! * subtree solutions at the same level are reused sideways — sibling
//!   roots differ by a uniform price factor `alpha = u^(2*di)`, so one
//!   solved subtree serves every sibling with `alpha <= 2` via a bucket
//!   rescaling pass ([`estimate_leaves`]);
//! * merging a node's prefix distribution with a subtree's suffix
//!   distribution is a convolution of core-bucket masses, done through the
//!   FFT kernel ([`merge`], with [`merge_direct`] as the quadratic
//!   reference).
//!
//! The subproblem sizes follow a fixed schedule `(n_i, k_i)` derived from
//! the recursion parameter `R`; the schedule also yields an exact
//! recurrence for the worst-case payoff underestimation, reported in the
//! estimate's diagnostics.

use std::sync::atomic::{AtomicU64, Ordering::Relaxed};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bucket_btt::{
    btt_traverse, payoff_from_leaves, propagate_level, traverse_subtree, NodeBuckets,
};
use crate::convolution::convolve_slices;
use crate::error::{PricingError, Result};
use crate::estimate::{Diagnostics, ErrorKind, Method, PriceEstimate, RecBttDiagnostics};
use crate::exec::map_indexed;
use crate::tree_model::{
    derive_lattice, expected_total, node_price, LatticeParams, MarketParams, TreeCoord,
};

/// Recursion stops once a subproblem is at most this deep (the depth-1
/// default matches the schedule formulas, which drive the final depth to 1).
pub const DEFAULT_BASE_CASE_DEPTH: u32 = 1;

/// Refusal threshold for schedules whose bucket counts explode.
const MAX_SCHEDULE_BUCKETS: usize = 1 << 26;

/// How base-case subproblems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSolver {
    /// Plain bucketed traversal of the base subtree.
    Btt,
    /// Exhaustive enumeration of the base subtree's paths (exact masses).
    Exact,
    /// Sampled bucket masses from seeded Monte Carlo paths. Cheap for deep
    /// base cases but forfeits the one-sided containment guarantee.
    StrongMc,
}

/// One recursion level: subproblem depth and buckets per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleLevel {
    pub depth: u32,
    pub buckets: usize,
}

/// The sequence of subproblem sizes `(n_i, k_i)`.
///
/// Level 0 is the full contract; for `i >= 1`,
/// `n_i = round((n0/sigma^2)^(1/2 - i*gamma))` clamped to at least 1 and
/// `k_i = ceil(4^i * k0 * (n0/sigma^2)^(i*gamma))` rounded up to a multiple
/// of `k_(i-1)` so regrouping is exact. Depths decrease strictly; the last
/// level is at most the base-case depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionSchedule {
    pub levels: Vec<ScheduleLevel>,
    /// `1/R`.
    pub gamma: f64,
    pub r: u32,
    /// Largest sibling index gap bridgeable by [`estimate_leaves`]:
    /// `floor(sqrt(n) * ln 2 / (2 sigma))`, which keeps `u^(2*gap) <= 2`.
    pub spacing: u32,
}

impl RecursionSchedule {
    /// True when the formulas produced no useful first subproblem
    /// (`n_1 >= n_0`) and the plain traversal should be used instead.
    pub fn is_degenerate(&self) -> bool {
        self.levels.len() == 1
    }
}

/// Builds the recursion schedule with an explicit base-case depth.
pub fn build_schedule_with(
    n0: u32,
    k0: usize,
    sigma: f64,
    r: u32,
    base_case_depth: u32,
) -> Result<RecursionSchedule> {
    if r <= 2 {
        return Err(PricingError::InvalidR { r });
    }
    if k0 < 1 {
        return Err(PricingError::InvalidParameter(
            "k0 must be >= 1".to_string(),
        ));
    }
    if !(sigma > 0.0) {
        return Err(PricingError::DegenerateVolatility);
    }
    let base_case_depth = base_case_depth.max(1);
    let gamma = 1.0 / r as f64;
    let ratio = n0 as f64 / (sigma * sigma);
    let spacing = ((n0 as f64).sqrt() * std::f64::consts::LN_2 / (2.0 * sigma)).floor() as u32;

    let mut levels = vec![ScheduleLevel {
        depth: n0,
        buckets: k0,
    }];
    if n0 <= base_case_depth {
        return Ok(RecursionSchedule { levels, gamma, r, spacing });
    }
    for i in 1u32..=64 {
        let depth_f = ratio.powf(0.5 - i as f64 * gamma);
        let mut depth = if depth_f.is_finite() {
            (depth_f + 0.5).floor().max(1.0) as u32
        } else {
            1
        };
        let prev = *levels.last().unwrap();
        if i == 1 && depth >= n0 {
            // no useful first subproblem: fall back to plain traversal
            return Ok(RecursionSchedule { levels, gamma, r, spacing });
        }
        if depth >= prev.depth {
            depth = prev.depth - 1;
        }
        let buckets_f = 4f64.powi(i as i32) * k0 as f64 * ratio.powf(i as f64 * gamma);
        if !buckets_f.is_finite() || buckets_f > MAX_SCHEDULE_BUCKETS as f64 {
            return Err(PricingError::ScheduleTooLarge {
                buckets: buckets_f as usize,
                max: MAX_SCHEDULE_BUCKETS,
            });
        }
        let mut buckets = buckets_f.ceil() as usize;
        let rem = buckets % prev.buckets;
        if rem != 0 {
            buckets += prev.buckets - rem;
        }
        if buckets > MAX_SCHEDULE_BUCKETS {
            return Err(PricingError::ScheduleTooLarge {
                buckets,
                max: MAX_SCHEDULE_BUCKETS,
            });
        }
        levels.push(ScheduleLevel { depth, buckets });
        if depth <= base_case_depth {
            break;
        }
    }
    Ok(RecursionSchedule { levels, gamma, r, spacing })
}

/// Builds the recursion schedule with the default base-case depth.
pub fn build_schedule(n0: u32, k0: usize, sigma: f64, r: u32) -> Result<RecursionSchedule> {
    build_schedule_with(n0, k0, sigma, r, DEFAULT_BASE_CASE_DEPTH)
}

fn check_merge_shapes(
    parent: &NodeBuckets,
    leaf: &NodeBuckets,
    into: &NodeBuckets,
) -> Result<()> {
    if !parent.shape_matches(leaf) || !parent.shape_matches(into) {
        return Err(PricingError::BucketShapeMismatch {
            detail: format!(
                "merge requires matching (k, barrier): parent ({}, {}), leaf ({}, {}), target ({}, {})",
                parent.k(),
                parent.barrier(),
                leaf.k(),
                leaf.barrier(),
                into.k(),
                into.barrier()
            ),
        });
    }
    Ok(())
}

/// Reference merge: the literal double loop over all bucket pairs.
///
/// For two core buckets the summed representative is `(j0+j1)*B/k` exactly,
/// so the pair routes by index: core bucket `j0+j1` when below `k`, else
/// overflow. Pairs involving an overflow bucket route by value and always
/// land in overflow (the overflow value already meets the barrier).
pub fn merge_direct(
    parent: &NodeBuckets,
    leaf: &NodeBuckets,
    into: &mut NodeBuckets,
) -> Result<()> {
    check_merge_shapes(parent, leaf, into)?;
    let k = parent.k();
    let width = parent.width();
    for j0 in 0..=k {
        let (m0, v0) = if j0 < k {
            (parent.core_mass(j0), parent.core_value(j0))
        } else {
            let of = parent.overflow();
            (of.mass, of.value)
        };
        if m0 == 0.0 {
            continue;
        }
        for j1 in 0..=k {
            let (m1, v1) = if j1 < k {
                (leaf.core_mass(j1), leaf.core_value(j1))
            } else {
                let of = leaf.overflow();
                (of.mass, of.value)
            };
            if m1 == 0.0 {
                continue;
            }
            let mass = m0 * m1;
            if j0 < k && j1 < k {
                if j0 + j1 < k {
                    into.add_to_core(j0 + j1, mass);
                } else {
                    into.add_to_overflow((j0 + j1) as f64 * width, mass);
                }
            } else {
                into.add_to_overflow(v0 + v1, mass);
            }
        }
    }
    Ok(())
}

#[cfg(debug_assertions)]
static MERGE_SPOT_CHECK: AtomicU64 = AtomicU64::new(0);

/// Merges a node's bucketed prefix distribution with a subtree's bucketed
/// suffix distribution into the target node.
///
/// Core x core pairs are one polynomial product of the mass vectors: the
/// coefficient of degree `j` is added to core bucket `j` when `j < k` and
/// folded into the overflow average with representative `j*B/k` otherwise.
/// Pairs involving an overflow bucket always land in overflow because the
/// overflow value already meets the barrier.
pub fn merge(parent: &NodeBuckets, leaf: &NodeBuckets, into: &mut NodeBuckets) -> Result<()> {
    check_merge_shapes(parent, leaf, into)?;

    #[cfg(debug_assertions)]
    let reference = if MERGE_SPOT_CHECK.fetch_add(1, Relaxed) % 17 == 0 && parent.k() <= 256 {
        let mut r = into.clone();
        merge_direct(parent, leaf, &mut r)?;
        Some(r)
    } else {
        None
    };

    let k = parent.k();
    let width = parent.width();
    let parent_core_live = parent.core_masses().iter().any(|&m| m != 0.0);
    let leaf_core_live = leaf.core_masses().iter().any(|&m| m != 0.0);

    if parent_core_live && leaf_core_live {
        let prod = convolve_slices(parent.core_masses(), leaf.core_masses());
        for (j, &mass) in prod.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            if j < k {
                into.add_to_core(j, mass);
            } else {
                into.add_to_overflow(j as f64 * width, mass);
            }
        }
    }

    let po = parent.overflow();
    let lo = leaf.overflow();
    if po.mass > 0.0 {
        for j1 in 0..k {
            let m1 = leaf.core_mass(j1);
            if m1 != 0.0 {
                into.add_total(po.value + leaf.core_value(j1), po.mass * m1);
            }
        }
    }
    if lo.mass > 0.0 {
        for j0 in 0..k {
            let m0 = parent.core_mass(j0);
            if m0 != 0.0 {
                into.add_total(parent.core_value(j0) + lo.value, m0 * lo.mass);
            }
        }
    }
    if po.mass > 0.0 && lo.mass > 0.0 {
        into.add_total(po.value + lo.value, po.mass * lo.mass);
    }

    #[cfg(debug_assertions)]
    if let Some(reference) = reference {
        for j in 0..k {
            debug_assert!(
                (into.core_mass(j) - reference.core_mass(j)).abs() <= 1e-12,
                "merge spot check: core mass {j} differs from direct merge"
            );
        }
        let (a, b) = (into.overflow(), reference.overflow());
        debug_assert!((a.mass - b.mass).abs() <= 1e-12);
        // near-zero masses carry meaningless averages, so compare the
        // payoff-relevant product instead of the raw value
        debug_assert!(
            (a.mass * a.value - b.mass * b.value).abs()
                <= 1e-9 * parent.barrier().max(1.0)
        );
    }

    Ok(())
}

/// Rescales one subtree's leaf buckets onto a sibling subtree whose node
/// prices are uniformly `alpha` times larger (`1 <= alpha <= 2`).
///
/// Every bucket's representative value is multiplied by `alpha` and
/// rerouted by the barrier test. Beyond `alpha = 2` a rescaled bucket can
/// span more than two target buckets and the error bound breaks down, so
/// the caller must run a fresh traversal instead.
pub fn estimate_leaves(source: &[NodeBuckets], alpha: f64) -> Result<Vec<NodeBuckets>> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(PricingError::AlphaOutOfRange { alpha });
    }
    if alpha == 1.0 {
        return Ok(source.to_vec());
    }
    Ok(source
        .iter()
        .map(|node| {
            let mut out = NodeBuckets::new(node.k(), node.barrier());
            for j in 0..node.k() {
                let mass = node.core_mass(j);
                if mass != 0.0 {
                    out.add_total(alpha * node.core_value(j), mass);
                }
            }
            let of = node.overflow();
            if of.mass > 0.0 {
                out.add_total(alpha * of.value, of.mass);
            }
            out
        })
        .collect())
}

/// Worst-case payoff-scale underestimation of the recursive scheme,
/// evaluated exactly from the schedule.
///
/// Per level `i`, each of the `floor(n_i/n_(i+1))` blocks charges the
/// sideways-reuse worst case `2*E_(i+1) + 4*B/k_i` plus `B/k_i` for the
/// merge; leftover levels (`n_(i+1)` not dividing `n_i`) are propagated
/// plainly at `B/k_i` each. The base case charges one bucket width per
/// propagated level (a single bucketing for the exact solver), and the top
/// level adds one `B/k_0` for rounding the root price into its bucket.
pub fn error_bound(schedule: &RecursionSchedule, barrier: f64, base_solver: BaseSolver) -> f64 {
    let levels = &schedule.levels;
    let top = levels[0];
    if schedule.is_degenerate() {
        return top.depth as f64 * barrier / top.buckets as f64;
    }
    let last = levels[levels.len() - 1];
    let base_width = barrier / last.buckets as f64;
    let mut e = match base_solver {
        BaseSolver::Btt => last.depth as f64 * base_width,
        // exact enumeration buckets each path total once; the sampled
        // solver shares that deterministic part (its noise is two-sided
        // and not covered by this bound)
        BaseSolver::Exact | BaseSolver::StrongMc => base_width,
    };
    for i in (0..levels.len() - 1).rev() {
        let li = levels[i];
        let blocks = (li.depth / levels[i + 1].depth) as f64;
        let leftover = (li.depth % levels[i + 1].depth) as f64;
        let width = barrier / li.buckets as f64;
        e = blocks * (5.0 * width + 2.0 * e) + leftover * width;
    }
    e + barrier / top.buckets as f64
}

/// Tuning knobs for the recursive pricer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecBttConfig {
    pub k0: usize,
    pub r: u32,
    pub base_solver: BaseSolver,
    pub base_case_depth: u32,
    /// Sample count per base subproblem when `base_solver` is `StrongMc`.
    pub mc_base_samples: u64,
    /// Seed for the sampled base solver.
    pub seed: u64,
}

impl RecBttConfig {
    pub fn new(k0: usize, r: u32, base_solver: BaseSolver) -> Self {
        Self {
            k0,
            r,
            base_solver,
            base_case_depth: DEFAULT_BASE_CASE_DEPTH,
            mc_base_samples: 4096,
            seed: 0,
        }
    }
}

/// Outcome of a recursive traversal: the leaf buckets plus accounting.
#[derive(Debug, Clone)]
pub struct RecBttRun {
    pub leaf_buckets: Vec<NodeBuckets>,
    pub schedule: RecursionSchedule,
    /// Payoff-scale analytic bound from [`error_bound`].
    pub e0_payoff_bound: f64,
    pub fresh_solves: u64,
    pub estimate_reuses: u64,
}

struct Solver<'a> {
    params: &'a MarketParams,
    lattice: &'a LatticeParams,
    schedule: &'a RecursionSchedule,
    barrier: f64,
    base_solver: BaseSolver,
    mc_base_samples: u64,
    seed: u64,
    fresh: AtomicU64,
    reuses: AtomicU64,
}

impl Solver<'_> {
    /// Leaf buckets of the depth-`levels[level].depth` subtree at `root`.
    fn solve(&self, level: usize, root: TreeCoord, zero_root: bool) -> Vec<NodeBuckets> {
        let here = self.schedule.levels[level];
        if level + 1 == self.schedule.levels.len() {
            return self.base_solve(root, here.depth, here.buckets, zero_root);
        }
        let next = self.schedule.levels[level + 1];
        let blocks = here.depth / next.depth;
        let leftover = here.depth % next.depth;

        let root_value = if zero_root {
            0.0
        } else {
            node_price(self.params, self.lattice, root)
        };
        debug_assert!(root_value < self.barrier);
        let mut state = vec![NodeBuckets::new(here.buckets, self.barrier)];
        state[0].add_total(root_value, 1.0);

        let mut tau = 0u32;
        for _ in 0..blocks {
            state = self.advance_block(level, root, tau, &state, next);
            tau += next.depth;
        }
        for _ in 0..leftover {
            state = propagate_level(&state, self.params, self.lattice, root, tau);
            tau += 1;
        }
        state
    }

    /// One block: solve/reuse the depth-`next.depth` subtrees rooted at
    /// boundary level `tau` and merge their leaves into level
    /// `tau + next.depth`.
    fn advance_block(
        &self,
        level: usize,
        root: TreeCoord,
        tau: u32,
        state: &[NodeBuckets],
        next: ScheduleLevel,
    ) -> Vec<NodeBuckets> {
        let k = state[0].k();
        let nodes = state.len();
        let stride = self.schedule.spacing as usize + 1;
        let fresh_count = nodes.div_ceil(stride);

        // fresh subtree solves at indices 0, stride, 2*stride, ...
        let fresh: Vec<Vec<NodeBuckets>> = map_indexed(fresh_count, |fi| {
            self.fresh.fetch_add(1, Relaxed);
            let i = (fi * stride) as u32;
            let sub_root = TreeCoord::new(root.t + tau, root.i + i);
            self.solve(level + 1, sub_root, true)
                .into_iter()
                .map(|nb| nb.regroup(k))
                .collect()
        });

        // remaining nodes reuse the nearest fresh solve below them
        let leaves: Vec<Vec<NodeBuckets>> = map_indexed(nodes, |i| {
            let fi = i / stride;
            let offset = i % stride;
            if offset == 0 {
                fresh[fi].clone()
            } else {
                self.reuses.fetch_add(1, Relaxed);
                let alpha = self.lattice.u.powi(2 * offset as i32);
                debug_assert!(alpha <= 2.0 + 1e-9, "spacing rule violated: alpha {alpha}");
                estimate_leaves(&fresh[fi], alpha.min(2.0))
                    .expect("alpha within [1, 2] by the spacing rule")
            }
        });

        // merge; each target accumulates its contributing (node, leaf)
        // pairs in ascending node order so results are order-independent
        let new_nodes = nodes + next.depth as usize;
        map_indexed(new_nodes, |j| {
            let mut nb = NodeBuckets::new(k, self.barrier);
            let lo = j.saturating_sub(next.depth as usize);
            let hi = j.min(nodes - 1);
            for i in lo..=hi {
                merge(&state[i], &leaves[i][j - i], &mut nb).expect("shapes match");
            }
            nb
        })
    }

    fn base_solve(
        &self,
        root: TreeCoord,
        depth: u32,
        k: usize,
        zero_root: bool,
    ) -> Vec<NodeBuckets> {
        match self.base_solver {
            BaseSolver::Btt => traverse_subtree(
                self.params,
                self.lattice,
                root,
                depth,
                zero_root,
                self.barrier,
                k,
            )
            .expect("base subtree root is below the barrier"),
            BaseSolver::Exact => {
                let mut leaves: Vec<NodeBuckets> = (0..=depth)
                    .map(|_| NodeBuckets::new(k, self.barrier))
                    .collect();
                let root_value = if zero_root {
                    0.0
                } else {
                    node_price(self.params, self.lattice, root)
                };
                for mask in 0..(1u64 << depth) {
                    let mut total = root_value;
                    let mut prob = 1.0;
                    let mut ups = 0u32;
                    for level in 0..depth {
                        let up = (mask >> (depth - 1 - level)) & 1 == 1;
                        if up {
                            ups += 1;
                            prob *= self.lattice.p;
                        } else {
                            prob *= self.lattice.q;
                        }
                        total += node_price(
                            self.params,
                            self.lattice,
                            TreeCoord::new(root.t + level + 1, root.i + ups),
                        );
                    }
                    leaves[ups as usize].add_total(total, prob);
                }
                leaves
            }
            BaseSolver::StrongMc => {
                let mut leaves: Vec<NodeBuckets> = (0..=depth)
                    .map(|_| NodeBuckets::new(k, self.barrier))
                    .collect();
                let root_value = if zero_root {
                    0.0
                } else {
                    node_price(self.params, self.lattice, root)
                };
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(
                    (root.t as u64) << 40 | (root.i as u64) << 16 | depth as u64,
                );
                let n = self.mc_base_samples.max(1);
                let w = 1.0 / n as f64;
                for _ in 0..n {
                    let mut total = root_value;
                    let mut ups = 0u32;
                    for level in 0..depth {
                        if rng.gen::<f64>() < self.lattice.p {
                            ups += 1;
                        }
                        total += node_price(
                            self.params,
                            self.lattice,
                            TreeCoord::new(root.t + level + 1, root.i + ups),
                        );
                    }
                    leaves[ups as usize].add_total(total, w);
                }
                leaves
            }
        }
    }
}

/// Runs the recursive traversal over the whole tree against `barrier`,
/// returning leaf buckets plus the analytic error accounting. Falls back to
/// the plain traversal when the schedule is degenerate.
pub fn rec_btt_leaf_buckets(
    params: &MarketParams,
    lattice: &LatticeParams,
    barrier: f64,
    cfg: &RecBttConfig,
) -> Result<RecBttRun> {
    params.validate()?;
    let schedule = build_schedule_with(params.n, cfg.k0, params.sigma, cfg.r, cfg.base_case_depth)?;
    if schedule.is_degenerate() {
        let result = btt_traverse(params, lattice, barrier, cfg.k0)?;
        let e0 = error_bound(&schedule, barrier, cfg.base_solver);
        return Ok(RecBttRun {
            leaf_buckets: result.leaf_buckets,
            schedule,
            e0_payoff_bound: e0,
            fresh_solves: 0,
            estimate_reuses: 0,
        });
    }
    if params.s0 >= barrier {
        return Err(PricingError::RootAboveBarrier {
            s0: params.s0,
            barrier,
        });
    }
    let solver = Solver {
        params,
        lattice,
        schedule: &schedule,
        barrier,
        base_solver: cfg.base_solver,
        mc_base_samples: cfg.mc_base_samples,
        seed: cfg.seed,
        fresh: AtomicU64::new(0),
        reuses: AtomicU64::new(0),
    };
    let leaf_buckets = solver.solve(0, TreeCoord::new(0, 0), false);
    let e0 = error_bound(&schedule, barrier, cfg.base_solver);
    let fresh_solves = solver.fresh.load(Relaxed);
    let estimate_reuses = solver.reuses.load(Relaxed);
    Ok(RecBttRun {
        leaf_buckets,
        schedule,
        e0_payoff_bound: e0,
        fresh_solves,
        estimate_reuses,
    })
}

/// Prices a European Asian call with the recursive scheme, full knobs.
pub fn rec_btt_price_with(
    params: &MarketParams,
    strike: f64,
    cfg: &RecBttConfig,
) -> Result<PriceEstimate> {
    params.validate()?;
    let n1 = params.n as f64 + 1.0;
    let barrier = n1 * strike;
    if params.s0 >= barrier {
        let schedule = RecursionSchedule {
            levels: vec![ScheduleLevel {
                depth: params.n,
                buckets: cfg.k0,
            }],
            gamma: 1.0 / cfg.r as f64,
            r: cfg.r,
            spacing: 0,
        };
        return Ok(PriceEstimate {
            price: (expected_total(params) - barrier) / n1,
            error_kind: ErrorKind::Interval,
            error_value: 0.0,
            confidence: None,
            method: Method::RecBtt,
            diagnostics: Diagnostics::RecBtt(RecBttDiagnostics {
                schedule,
                base_solver: cfg.base_solver,
                e0_payoff_bound: 0.0,
                fresh_solves: 0,
                estimate_reuses: 0,
                degenerate: false,
                deterministic_exercise: true,
                bound_is_guaranteed: true,
            }),
        });
    }
    let lattice = derive_lattice(params)?;
    let run = rec_btt_leaf_buckets(params, &lattice, barrier, cfg)?;
    let payoff = payoff_from_leaves(&run.leaf_buckets, barrier);
    let degenerate = run.schedule.is_degenerate();
    let bound_is_guaranteed = cfg.base_solver != BaseSolver::StrongMc || degenerate;
    Ok(PriceEstimate {
        price: payoff / n1,
        error_kind: ErrorKind::Interval,
        error_value: run.e0_payoff_bound / n1,
        confidence: None,
        method: Method::RecBtt,
        diagnostics: Diagnostics::RecBtt(RecBttDiagnostics {
            schedule: run.schedule,
            base_solver: cfg.base_solver,
            e0_payoff_bound: run.e0_payoff_bound,
            fresh_solves: run.fresh_solves,
            estimate_reuses: run.estimate_reuses,
            degenerate,
            deterministic_exercise: false,
            bound_is_guaranteed,
        }),
    })
}

/// Prices a European Asian call with the recursive scheme: `k0` top-level
/// buckets, recursion parameter `r > 2`, and the given base-case solver.
pub fn rec_btt_price(
    params: &MarketParams,
    strike: f64,
    k0: usize,
    r: u32,
    base_solver: BaseSolver,
) -> Result<PriceEstimate> {
    rec_btt_price_with(params, strike, &RecBttConfig::new(k0, r, base_solver))
}
