//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use vmk2::bench::{self, BenchConfig, Family, GeneratorSpec};
use vmk2::clp::{self, IterationBudget, Sampler};
use vmk2::mk::{self, FirstFitOrder};
use vmk2::model::{check_solution, Configuration, Item};
use vmk2::rng::{trial_seed, RngHandle};
use vmk2::solvers::{self, Algorithm, HybridParams, MkMode};
use vmk2::Vmk2Instance;

const ORACLE_TOL: f64 = 1e-9;
const LP_TOL: f64 = 1e-7;
const SIGMAS: f64 = 3.0;
const HYBRID_FLOOR: f64 = 0.653;
const EPS: f64 = 0.01;
const NODE_CAP: u64 = 50_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Suite {
    instances: Vec<Vmk2Instance>,
    opt: Vec<f64>,
    /// Time spent on the enumeration oracle.
    naive_time: Duration,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    bench::mean_sd(xs)
}

fn lp(inst: &Vmk2Instance) -> clp::FractionalSolution {
    clp::solve_clp(inst, EPS, IterationBudget::default()).expect("LP converges")
}

fn oracle_agreement(suite: &Suite) -> Outcome {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    for (k, (inst, &naive)) in suite.instances.iter().zip(&suite.opt).enumerate() {
        let exact = solvers::solve_exact(inst, NODE_CAP).unwrap();
        let (mck_sol, _) = solvers::solve_via_mck(inst, NODE_CAP).unwrap();
        let mck = mck_sol.profit(inst);
        let feasible = check_solution(inst, &exact.solution).unwrap().is_feasible()
            && check_solution(inst, &mck_sol).unwrap().is_feasible();
        if !exact.complete || !feasible || (exact.profit - naive).abs() > ORACLE_TOL || (mck - naive).abs() > ORACLE_TOL {
            mismatches.push(format!("#{k}: exact {} mck {} naive {}", exact.profit, mck, naive));
        }
    }
    let elapsed = started.elapsed() + suite.naive_time;
    outcome(
        mismatches.is_empty() && elapsed <= Duration::from_secs(120),
        format!("{} instances, {} mismatches {:?}, {:.1}s", suite.instances.len(), mismatches.len(), mismatches, elapsed.as_secs_f64()),
    )
}

fn lp_upper_bound(suite: &Suite) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut unconverged = 0;
    for (inst, &opt) in suite.instances.iter().zip(&suite.opt) {
        match clp::solve_clp(inst, EPS, IterationBudget::default()) {
            Ok(fs) => worst = worst.min(fs.value - opt),
            Err(_) => unconverged += 1,
        }
    }
    outcome(
        unconverged == 0 && worst >= -LP_TOL,
        format!("min x* - OPT = {worst:.3e}, unconverged {unconverged}"),
    )
}

fn reduction_guarantee(suite: &Suite) -> Outcome {
    let mut worst = f64::INFINITY;
    for (inst, &opt) in suite.instances.iter().zip(&suite.opt) {
        let (sol, report) = solvers::solve_reduction(inst, MkMode::Exact).unwrap();
        assert!(check_solution(inst, &sol).unwrap().is_feasible());
        if opt > 0.0 {
            worst = worst.min(report.profit / opt);
        }
    }
    let mut rng = RngHandle::new(31);
    let mut split_failures = 0;
    for trial in 0..10_000 {
        let n = 2 + rng.below(14);
        let items: Vec<Item> = (0..n)
            .map(|k| {
                let scale = rng.uniform(0.05, 1.0);
                Item::new(format!("s{k:02}"), rng.uniform(0.0, scale), rng.uniform(0.0, scale), 1.0)
            })
            .collect();
        let inst = Vmk2Instance::new(items, 1).unwrap();
        let (mut l1, mut l2) = (0.0, 0.0);
        let mut chosen = Vec::new();
        for i in 0..n {
            let it = inst.item(i);
            if l1 + it.w1 <= 1.0 && l2 + it.w2 <= 1.0 {
                l1 += it.w1;
                l2 += it.w2;
                chosen.push(i);
            }
        }
        let c = Configuration::new(chosen);
        let ok = match mk::split_configuration(&inst, &c) {
            Ok((a, b)) => {
                let mut union: Vec<usize> = a.iter().chain(b.iter()).collect();
                union.sort_unstable();
                a.iter().all(|i| !b.contains(i))
                    && union == c.items()
                    && mk::associated_weight(&inst, &a) <= 1.0 + 1e-9
                    && mk::associated_weight(&inst, &b) <= 1.0 + 1e-9
            }
            Err(_) => false,
        };
        if !ok {
            split_failures += 1;
            eprintln!("split failure at trial {trial}");
        }
    }
    outcome(
        worst >= 0.5 - ORACLE_TOL && split_failures == 0,
        format!("min reduction/OPT = {worst:.4}, split failures {split_failures}/10000"),
    )
}

fn sampling_marginals() -> Outcome {
    let inst = bench::generate(&GeneratorSpec::new(Family::Uniform, 20, 4, 77)).unwrap();
    let fs = lp(&inst);
    let sampler = Sampler::new(&fs);
    let draws = 100_000;
    let mut rng = RngHandle::new(4);
    let mut hits = vec![0usize; inst.len()];
    for _ in 0..draws {
        for i in sampler.sample(&mut rng).iter() {
            hits[i] += 1;
        }
    }
    let coverage = fs.item_coverage(inst.len());
    let mut worst_z: f64 = 0.0;
    for (i, &h) in hits.iter().enumerate() {
        let q = coverage[i] / inst.m() as f64;
        let se = (q * (1.0 - q) / draws as f64).sqrt();
        let diff = (h as f64 / draws as f64 - q).abs();
        let z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        worst_z = worst_z.max(z);
    }
    outcome(worst_z <= SIGMAS, format!("{} items, max |z| = {worst_z:.2}", inst.len()))
}

fn coverage_bounds() -> Outcome {
    let started = Instant::now();
    let inst = bench::generate(&GeneratorSpec::new(Family::Uniform, 60, 10, 55)).unwrap();
    let fs = lp(&inst);
    let sampler = Sampler::new(&fs);
    let m = inst.m();
    let ell = solvers::default_ell(m);
    let trials = 500;
    let profit_of = |ell: usize, seed: u64| {
        let mut rng = RngHandle::new(seed);
        let (_, t) = sampler.sample_t(ell, &mut rng);
        inst.profit_of(&t)
    };
    let hybrid: Vec<f64> = (0..trials).map(|t| profit_of(ell, trial_seed(500, t))).collect();
    let baseline: Vec<f64> = (0..trials).map(|t| profit_of(m, trial_seed(600, t))).collect();
    let (mh, sh) = mean_sd(&hybrid);
    let (mb, sb) = mean_sd(&baseline);
    let root = (trials as f64).sqrt();
    let want_h = (1.0 - (-(ell as f64) / m as f64).exp()) * fs.value - SIGMAS * sh / root;
    let want_b = (1.0 - (1.0 - 1.0 / m as f64).powi(m as i32)) * fs.value - SIGMAS * sb / root;
    let elapsed = started.elapsed();
    outcome(
        mh >= want_h && mb >= want_b && elapsed <= Duration::from_secs(300),
        format!(
            "x* {:.4}; E p(T) {mh:.4} >= {want_h:.4}; baseline {mb:.4} >= {want_b:.4}; {:.1}s",
            fs.value,
            elapsed.as_secs_f64()
        ),
    )
}

fn hybrid_vs_baseline() -> Outcome {
    let suite = GeneratorSpec::suite(Family::Uniform, 60, 10, 2024, 20);
    let config = BenchConfig {
        algos: vec![Algorithm::Hybrid, Algorithm::Baseline],
        trials: 10,
        eps: EPS,
        mk_mode: MkMode::Auto,
        ..Default::default()
    };
    let res = bench::run_ratio_bench(&suite, &config).unwrap();
    let d = res.paired.expect("paired rows");
    let (lo, hi) = (d.mean - 1.96 * d.se, d.mean + 1.96 * d.se);
    outcome(
        d.mean >= -d.se,
        format!("hybrid - baseline = {:+.4} (se {:.4}, 95% CI [{lo:+.4}, {hi:+.4}], {} pairs)", d.mean, d.se, d.pairs),
    )
}

fn hybrid_floor(suite: &Suite) -> Outcome {
    let trials = 200;
    let mut failures = Vec::new();
    let mut overall = Vec::new();
    for (k, (inst, &opt)) in suite.instances.iter().zip(&suite.opt).enumerate() {
        if opt <= 0.0 {
            continue;
        }
        let fs = lp(inst);
        let ratios: Vec<f64> = (0..trials)
            .map(|t| {
                let seed = trial_seed(k as u64, t);
                let params = HybridParams {
                    seed,
                    mk_mode: MkMode::Exact,
                    ..Default::default()
                };
                let sol = solvers::hybrid_from_lp(inst, &fs, &params, &mut RngHandle::new(seed)).unwrap();
                sol.profit(inst) / opt
            })
            .collect();
        let (mean, sd) = mean_sd(&ratios);
        overall.push(mean);
        if mean < HYBRID_FLOOR - SIGMAS * sd / (trials as f64).sqrt() {
            failures.push(format!("#{k}: {mean:.4}"));
        }
    }
    let (grand, _) = mean_sd(&overall);
    let worst = overall.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        failures.len() <= 1,
        format!("mean ratio {grand:.4}, worst instance {worst:.4}, failures {}/50 {:?}", failures.len(), failures),
    )
}

fn first_fit_invariant() -> Outcome {
    let mut rng = RngHandle::new(8);
    let mut violations = 0;
    let mut pairs = 0;
    for _ in 0..1000 {
        let n = 1 + rng.below(40);
        let items: Vec<Item> = (0..n)
            .map(|k| Item::new(format!("f{k:02}"), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), 1.0))
            .collect();
        let inst = Vmk2Instance::new(items, 1).unwrap();
        let list: Vec<usize> = (0..n).collect();
        let bins = mk::first_fit_2d(&inst, &list, FirstFitOrder::Given);
        for w in bins.windows(2) {
            pairs += 1;
            let union = Configuration::new(w[0].iter().chain(w[1].iter()));
            let (a, b) = union.load(&inst);
            if a + b <= 1.0 {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{pairs} consecutive pairs, {violations} violations"))
}

fn concentration() -> Outcome {
    let specs = [
        GeneratorSpec::new(Family::Uniform, 40, 10, 91),
        GeneratorSpec::new(Family::Uniform, 200, 100, 92),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for spec in specs {
        let inst = bench::generate(&spec).unwrap();
        let fs = lp(&inst);
        let ell = solvers::default_ell(inst.m());
        // pilot run for the mean, then t values with bounds near 0.5, 0.1, 0.01
        let pilot = bench::run_concentration(&inst, &fs, ell, 1000, &[0.0], 1).unwrap();
        let ts: Vec<f64> = [0.5, 0.1, 0.01].iter().map(|&b| bench::t_for_bound(b, pilot.mean, pilot.eta)).collect();
        let rep = bench::run_concentration(&inst, &fs, ell, 10_000, &ts, 2).unwrap();
        pass &= rep.all_ok();
        for p in &rep.points {
            lines.push(format!("m={} t={:.2}: {:.4} <= {:.4}", inst.m(), p.t, p.empirical, p.bound));
        }
    }
    outcome(pass, lines.join("; "))
}

fn degenerate_identities(suite: &Suite) -> Outcome {
    let mut reduction_mismatch = 0;
    let mut baseline_mismatch = 0;
    for (k, inst) in suite.instances.iter().enumerate() {
        let seed = 40 + k as u64;
        let zero = HybridParams {
            seed,
            ell_override: Some(0),
            mk_mode: MkMode::Exact,
            ..Default::default()
        };
        let (_, h0) = solvers::solve_hybrid(inst, &zero).unwrap();
        let (_, red) = solvers::solve_reduction(inst, MkMode::Exact).unwrap();
        if (h0.profit - red.profit).abs() > ORACLE_TOL {
            reduction_mismatch += 1;
        }
        let full = HybridParams {
            ell_override: Some(inst.m()),
            ..zero
        };
        let (hm, _) = solvers::solve_hybrid(inst, &full).unwrap();
        let (base, _) = solvers::solve_sampling_baseline(inst, EPS, seed).unwrap();
        if hm != base {
            baseline_mismatch += 1;
        }
    }
    outcome(
        reduction_mismatch == 0 && baseline_mismatch == 0,
        format!("ell=0 vs reduction mismatches {reduction_mismatch}, ell=m vs baseline mismatches {baseline_mismatch}"),
    )
}

fn main() {
    let instances = common::exact_suite();
    let started = Instant::now();
    let opt = instances.iter().map(common::naive_opt).collect();
    let suite = Suite {
        instances,
        opt,
        naive_time: started.elapsed(),
    };

    let criteria: Vec<Criterion> = vec![
        ("1 oracle agreement", Box::new(|| oracle_agreement(&suite))),
        ("2 LP upper bound", Box::new(|| lp_upper_bound(&suite))),
        ("3 reduction guarantee", Box::new(|| reduction_guarantee(&suite))),
        ("4 sampling marginals", Box::new(sampling_marginals)),
        ("5 coverage lower bounds", Box::new(coverage_bounds)),
        ("6 hybrid vs baseline", Box::new(hybrid_vs_baseline)),
        ("7 hybrid absolute floor", Box::new(|| hybrid_floor(&suite))),
        ("8 first-fit invariant", Box::new(first_fit_invariant)),
        ("9 concentration", Box::new(concentration)),
        ("10 degenerate identities", Box::new(|| degenerate_identities(&suite))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
