//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured runtime (run with `--nocapture` to see the lines).
//!
//! Every tolerance is pinned here, in code. Criterion A6 is a soft
//! comparison (accuracy-per-runtime is machine-dependent); it emits a CSV
//! report and warns instead of failing.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use asian_lattice::basket_pricer::{basket_price, BasketSpec};
use asian_lattice::bucket_btt::btt_price;
use asian_lattice::convolution::MassPolynomial;
use asian_lattice::monte_carlo::{lambda0, strong_mc_price, AccuracySpec};
use asian_lattice::path_oracle::{exact_basket_price, exact_price};
use asian_lattice::rec_btt::{merge, merge_direct, rec_btt_price, BaseSolver};
use asian_lattice::tree_model::{derive_lattice, expected_total, MarketParams, TreeCoord};
use asian_lattice::{Branch, Diagnostics};

fn report(name: &str, budget: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) => {
            println!("{name}: PASS ({detail}; {elapsed:.2?} / budget {budget:.2?})");
            assert!(
                elapsed <= budget,
                "{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}"
            );
        }
        Err(detail) => {
            println!("{name}: FAIL ({detail}; {elapsed:.2?})");
            panic!("{name} failed: {detail}");
        }
    }
}

/// Largest admissible per-period rate for a given (sigma, n): keeps
/// 1 + r strictly inside [d, u].
fn admissible_rate(rng: &mut ChaCha8Rng, sigma: f64, n: u32, cap: f64) -> f64 {
    let u = (sigma / (n as f64).sqrt()).exp();
    rng.gen::<f64>() * cap.min(0.8 * (u - 1.0))
}

fn artifact_path(file: &str) -> std::path::PathBuf {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("create artifact dir");
    dir.join(file)
}

/// A1: bucketed traversal prices stay inside the one-sided oracle interval
/// `[exact - n*X/k, exact]` on randomized instances.
#[test]
fn a1_btt_containment() {
    report("A1 BTT containment", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
        let mut worst_margin = f64::INFINITY;
        for i in 0..100 {
            let sigma = 0.05 + 0.45 * rng.gen::<f64>();
            let n = rng.gen_range(4u32..=16);
            let r = admissible_rate(&mut rng, sigma, n, 0.05);
            let strike = 70.0 + 60.0 * rng.gen::<f64>();
            let p = MarketParams::new(100.0, sigma, r, n).map_err(|e| e.to_string())?;
            let oracle = exact_price(&p, strike).map_err(|e| e.to_string())?.price;
            for &k in &[4usize, 16, 64] {
                let est = btt_price(&p, strike, k).map_err(|e| e.to_string())?;
                let slack = n as f64 * strike / k as f64;
                if est.price > oracle + 1e-9 {
                    return Err(format!(
                        "instance {i} k {k}: price {} above oracle {}",
                        est.price, oracle
                    ));
                }
                if oracle - est.price > slack + 1e-9 {
                    return Err(format!(
                        "instance {i} k {k}: underestimate {} beyond slack {slack}",
                        oracle - est.price
                    ));
                }
                worst_margin = worst_margin.min(slack - (oracle - est.price));
            }
        }
        Ok(format!(
            "100 instances x 3 bucket counts, worst slack margin {worst_margin:.3e}"
        ))
    });
}

/// A2: the recursive scheme is one-sided and its computed error recurrence
/// bounds the underestimate.
#[test]
fn a2_recbtt_one_sided_with_analytic_bound() {
    report("A2 RecBTT bound", Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
        let mut worst_ratio: f64 = 0.0;
        for i in 0..50 {
            let sigma = 0.1 + 0.4 * rng.gen::<f64>();
            let n = 16u32;
            let r = admissible_rate(&mut rng, sigma, n, 0.05);
            let strike = 80.0 + 40.0 * rng.gen::<f64>();
            let k0 = if i % 2 == 0 { 4 } else { 8 };
            let base = if i % 4 < 2 { BaseSolver::Btt } else { BaseSolver::Exact };
            let p = MarketParams::new(100.0, sigma, r, n).map_err(|e| e.to_string())?;
            let oracle = exact_price(&p, strike).map_err(|e| e.to_string())?.price;
            let est = rec_btt_price(&p, strike, k0, 3, base).map_err(|e| e.to_string())?;
            let e0 = match &est.diagnostics {
                Diagnostics::RecBtt(d) => d.e0_payoff_bound,
                _ => return Err("missing recursive diagnostics".to_string()),
            };
            if est.price > oracle + 1e-9 {
                return Err(format!(
                    "instance {i}: price {} above oracle {}",
                    est.price, oracle
                ));
            }
            let under = oracle - est.price;
            let bound = e0 / (n as f64 + 1.0);
            if under > bound + 1e-9 {
                return Err(format!(
                    "instance {i}: underestimate {under} beyond analytic bound {bound}"
                ));
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(under / bound);
            }
        }
        Ok(format!(
            "50 instances (k0 in {{4,8}}, R=3), worst used fraction of bound {worst_ratio:.3}"
        ))
    });
}

/// A3: deep-in-the-money branch — with the strike placed at the lower tail
/// of the total's distribution, the closed-form branch fires and its price
/// is within 4*eps*X of exact in at least 95% of seeded runs.
#[test]
fn a3_strong_mc_deep_branch() {
    report("A3 StrongMC deep branch", Duration::from_secs(60), || {
        let p = MarketParams::new(100.0, 0.2, 0.01, 12).map_err(|e| e.to_string())?;
        let lattice = derive_lattice(&p).map_err(|e| e.to_string())?;
        let spec = AccuracySpec::new(0.05, 0.05).map_err(|e| e.to_string())?;

        // exact lower quantile of T_n by enumeration
        let mut totals: Vec<(f64, f64)> = Vec::with_capacity(1 << 12);
        for mask in 0u32..(1 << 12) {
            let mut price = p.s0;
            let mut total = price;
            let mut prob = 1.0;
            for level in 0..12 {
                if (mask >> (11 - level)) & 1 == 1 {
                    price *= lattice.u;
                    prob *= lattice.p;
                } else {
                    price *= lattice.d;
                    prob *= lattice.q;
                }
                total += price;
            }
            totals.push((total, prob));
        }
        totals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cum = 0.0;
        let mut t_star = totals[0].0;
        for &(t, pr) in &totals {
            if cum + pr > 0.01 {
                break;
            }
            cum += pr;
            t_star = t;
        }
        let strike = t_star / 13.0; // Pr(T <= 13X) ~ 1% << 2*eps
        let oracle = exact_price(&p, strike).map_err(|e| e.to_string())?.price;

        let mut deep_runs = 0u32;
        let mut within = 0u32;
        for seed in 0..200u64 {
            let est = strong_mc_price(&p, strike, &spec, seed).map_err(|e| e.to_string())?;
            let d = match &est.diagnostics {
                Diagnostics::StrongMc(d) => *d,
                _ => return Err("missing MC diagnostics".to_string()),
            };
            if d.branch == Branch::DeepInMoney {
                deep_runs += 1;
                if (est.price - oracle).abs() <= 4.0 * spec.epsilon * strike {
                    within += 1;
                }
            }
        }
        if deep_runs < 190 {
            return Err(format!("deep branch fired in only {deep_runs}/200 runs"));
        }
        let frac = within as f64 / deep_runs as f64;
        if frac < 0.95 {
            return Err(format!(
                "only {frac:.3} of deep-branch runs within 4*eps*X"
            ));
        }
        Ok(format!(
            "deep branch in {deep_runs}/200 runs, {within} within 4*eps*X (X = {strike:.2})"
        ))
    });
}

/// A4: sampled branch at the money — estimator spread obeys the standard
/// deviation bound and the grand mean tracks the exact price.
#[test]
fn a4_strong_mc_sampled_branch() {
    report("A4 StrongMC sampled branch", Duration::from_secs(120), || {
        let p = MarketParams::new(100.0, 0.2, 0.01, 12).map_err(|e| e.to_string())?;
        let spec = AccuracySpec::new(0.05, 0.05).map_err(|e| e.to_string())?;
        let strike = 100.0;
        let oracle = exact_price(&p, strike).map_err(|e| e.to_string())?.price;

        let mut prices = Vec::with_capacity(200);
        for seed in 1000..1200u64 {
            let est = strong_mc_price(&p, strike, &spec, seed).map_err(|e| e.to_string())?;
            match &est.diagnostics {
                Diagnostics::StrongMc(d) if d.branch == Branch::Sampled => {}
                _ => return Err(format!("seed {seed} did not take the sampled branch")),
            }
            prices.push(est.price);
        }
        let n = prices.len() as f64;
        let mean = prices.iter().sum::<f64>() / n;
        let var = prices.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        let std_cap = 1.2 * spec.epsilon * strike;
        if std > std_cap {
            return Err(format!("empirical std {std:.4} above cap {std_cap:.4}"));
        }
        let mean_tol = 3.0 * spec.epsilon * strike / n.sqrt();
        if (mean - oracle).abs() > mean_tol {
            return Err(format!(
                "grand mean {mean:.4} departs from exact {oracle:.4} by more than {mean_tol:.4}"
            ));
        }
        Ok(format!(
            "200 runs: std {std:.3} <= {std_cap:.3}, |mean-exact| {:.4} <= {mean_tol:.4}",
            (mean - oracle).abs()
        ))
    });
}

/// A5: two-stock baskets track the exhaustive oracle within the analytic
/// per-stock bound plus the measured multi-overflow allowance; the worst
/// observed deviation is recorded as a report artifact.
#[test]
fn a5_basket_against_oracle() {
    report("A5 Basket vs oracle", Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
        let mut worst_dev: f64 = 0.0;
        let mut worst_frac: f64 = 0.0;
        let mut lines = String::from("instance,deviation,allowance,fraction\n");
        for i in 0..50 {
            let n = 8u32;
            let mut stocks = Vec::new();
            for _ in 0..2 {
                let sigma = 0.1 + 0.4 * rng.gen::<f64>();
                let s0 = 80.0 + 40.0 * rng.gen::<f64>();
                let r = admissible_rate(&mut rng, sigma, n, 0.05);
                stocks.push(MarketParams::new(s0, sigma, r, n).map_err(|e| e.to_string())?);
            }
            let mean_s0 = (stocks[0].s0 + stocks[1].s0) / 2.0;
            let strike = mean_s0 * (1.6 + 0.8 * rng.gen::<f64>());
            let spec =
                BasketSpec::new(stocks.clone(), strike, 64, 3).map_err(|e| e.to_string())?;
            let est = basket_price(&spec).map_err(|e| e.to_string())?;
            let oracle = exact_basket_price(&stocks, strike)
                .map_err(|e| e.to_string())?
                .price;
            let d = match &est.diagnostics {
                Diagnostics::Basket(d) => d.clone(),
                _ => return Err("missing basket diagnostics".to_string()),
            };
            let allowance = est.error_value + d.overcount_bound + 1e-9;
            let dev = (est.price - oracle).abs();
            if dev > allowance {
                return Err(format!(
                    "instance {i}: |{} - {}| = {dev} beyond allowance {allowance}",
                    est.price, oracle
                ));
            }
            worst_dev = worst_dev.max(dev);
            worst_frac = worst_frac.max(dev / allowance);
            let _ = writeln!(lines, "{i},{dev:.6e},{allowance:.6e},{:.4}", dev / allowance);
        }
        let path = artifact_path("a5_basket_deviation.csv");
        std::fs::write(&path, lines).map_err(|e| e.to_string())?;
        Ok(format!(
            "50 instances, worst |deviation| {worst_dev:.4e} ({:.1}% of allowance); report: {}",
            100.0 * worst_frac,
            path.display()
        ))
    });
}

/// A6: accuracy-per-runtime comparison at n = 64 under equalized wall-clock
/// budgets, emitted as CSV. Asserted softly: a warning is printed when the
/// recursive scheme's interval is not at least as tight as the plain
/// traversal's in the two largest budget cells.
#[test]
fn a6_budget_dominance_report() {
    report("A6 budget report", Duration::from_secs(120), || {
        let p = MarketParams::new(100.0, 0.3, 0.01, 64).map_err(|e| e.to_string())?;
        let strike = 100.0;
        let mut csv = String::from("method,n,k_or_n,sigma,price,error_bound,runtime_ns,seed\n");

        fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
            let start = Instant::now();
            let out = f();
            (out, start.elapsed().as_nanos())
        }

        // reference cost per bucket for the plain traversal
        let k_ref = 256usize;
        let (_, t_ref) = timed(|| btt_price(&p, strike, k_ref).unwrap());
        let per_bucket = (t_ref as f64 / k_ref as f64).max(1.0);

        let mut cells = Vec::new();
        for &k0 in &[8usize, 16, 32, 64] {
            let (rec, rec_ns) =
                timed(|| rec_btt_price(&p, strike, k0, 3, BaseSolver::Btt).unwrap());
            let _ = writeln!(
                csv,
                "recbtt,64,{k0},0.3,{:.10},{:.6e},{rec_ns},0",
                rec.price, rec.error_value
            );

            let k_budget = ((rec_ns as f64 / per_bucket) as usize).clamp(4, 1 << 20);
            let (btt, btt_ns) = timed(|| btt_price(&p, strike, k_budget).unwrap());
            let _ = writeln!(
                csv,
                "btt,64,{k_budget},0.3,{:.10},{:.6e},{btt_ns},0",
                btt.price, btt.error_value
            );
            cells.push((k0, rec.error_value, k_budget, btt.error_value));
        }

        let path = artifact_path("a6_budget_dominance.csv");
        std::fs::write(&path, &csv).map_err(|e| e.to_string())?;

        let mut dominated = 0;
        for &(k0, rec_width, k_budget, btt_width) in cells.iter().rev().take(2) {
            if rec_width <= btt_width {
                dominated += 1;
            } else {
                println!(
                    "A6 warning: recbtt(k0={k0}) width {rec_width:.3e} exceeds \
                     btt(k={k_budget}) width {btt_width:.3e} at equal budget \
                     (constants dominate at this scale)"
                );
            }
        }
        Ok(format!(
            "4 budget cells emitted to {}; dominance held in {dominated}/2 largest cells (soft)",
            path.display()
        ))
    });
}

/// A7: the FFT convolution kernel against the quadratic reference, and the
/// convolution-based merge against the double-loop merge.
#[test]
fn a7_convolution_kernel() {
    report("A7 convolution kernel", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let la = rng.gen_range(1..=4096);
            let lb = rng.gen_range(1..=4096);
            let a: Vec<f64> = (0..la).map(|_| rng.gen::<f64>() / la as f64).collect();
            let b: Vec<f64> = (0..lb).map(|_| rng.gen::<f64>() / lb as f64).collect();
            let pa = MassPolynomial::new(a.clone());
            let pb = MassPolynomial::new(b.clone());
            let fast = asian_lattice::convolution::convolve(&pa, &pb);
            // quadratic reference
            let mut naive = vec![0.0; la + lb - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    naive[i + j] += x * y;
                }
            }
            for (x, y) in fast.coeffs.iter().zip(&naive) {
                worst = worst.max((x - y).abs());
            }
        }
        if worst > 1e-9 {
            return Err(format!("fft-vs-naive deviation {worst:.3e} above 1e-9"));
        }

        // merge equivalence at k = 32
        let barrier = 130.0;
        let mut worst_mass = 0.0f64;
        let mut worst_value = 0.0f64;
        for _ in 0..100 {
            let random_node = |rng: &mut ChaCha8Rng| {
                let mut nb = asian_lattice::bucket_btt::NodeBuckets::new(32, barrier);
                let mut remaining = 1.0;
                for j in 0..32 {
                    let m = rng.gen::<f64>() * remaining * 0.15;
                    nb.add_total(nb.core_value(j), m);
                    remaining -= m;
                }
                nb.add_total(barrier * (1.0 + rng.gen::<f64>()), remaining);
                nb
            };
            let parent = random_node(&mut rng);
            let leaf = random_node(&mut rng);
            let mut fast = asian_lattice::bucket_btt::NodeBuckets::new(32, barrier);
            let mut slow = asian_lattice::bucket_btt::NodeBuckets::new(32, barrier);
            merge(&parent, &leaf, &mut fast).map_err(|e| e.to_string())?;
            merge_direct(&parent, &leaf, &mut slow).map_err(|e| e.to_string())?;
            for j in 0..32 {
                worst_mass = worst_mass.max((fast.core_mass(j) - slow.core_mass(j)).abs());
            }
            let (af, asl) = (fast.overflow(), slow.overflow());
            worst_value =
                worst_value.max((af.value - asl.value).abs() / asl.value.abs().max(1.0));
        }
        if worst_mass > 1e-12 {
            return Err(format!("merge core-mass deviation {worst_mass:.3e} above 1e-12"));
        }
        if worst_value > 1e-9 {
            return Err(format!(
                "merge overflow-value relative deviation {worst_value:.3e} above 1e-9"
            ));
        }
        Ok(format!(
            "20 fft-vs-naive pairs (worst {worst:.2e}), 100 merges (mass {worst_mass:.2e}, value {worst_value:.2e})"
        ))
    });
}

/// A8: closed forms — expected running total versus the full tree sweep,
/// and the lambda0 defining identity.
#[test]
fn a8_closed_forms() {
    report("A8 closed forms", Duration::from_secs(1), || {
        for n in 1..=12u32 {
            for &r in &[0.0, 0.01, 0.1] {
                // sigma = 0.5 keeps the lattice arbitrage-free at r = 0.1
                let p = MarketParams::new(100.0, 0.5, r, n).map_err(|e| e.to_string())?;
                let l = derive_lattice(&p).map_err(|e| e.to_string())?;
                let mut masses = vec![1.0f64];
                let mut sweep = 0.0;
                for t in 0..=n {
                    for (i, &m) in masses.iter().enumerate() {
                        sweep += m
                            * asian_lattice::tree_model::node_price(
                                &p,
                                &l,
                                TreeCoord::new(t, i as u32),
                            );
                    }
                    let mut next = vec![0.0; masses.len() + 1];
                    for (i, &m) in masses.iter().enumerate() {
                        next[i] += m * l.q;
                        next[i + 1] += m * l.p;
                    }
                    masses = next;
                }
                let closed = expected_total(&p);
                let rel = (closed - sweep).abs() / sweep.abs();
                if rel > 1e-10 {
                    return Err(format!(
                        "n {n} r {r}: closed form {closed} vs sweep {sweep} (rel {rel:.2e})"
                    ));
                }
            }
        }
        for &eps in &[0.5, 0.1, 0.01, 0.001] {
            let lam = lambda0(eps);
            let err = (2.0 * (-lam * lam / 2.0).exp() - eps).abs();
            if err > 1e-12 {
                return Err(format!("lambda0 identity off by {err:.2e} at eps {eps}"));
            }
        }
        Ok("36 tree sweeps + 4 lambda0 identities".to_string())
    });
}
