//! Instance generators and experiment runners: approximation ratios against
//! the exact optimum and the LP bound, marginal profit of successive LP
//! samples, and lower-tail concentration of the sampled profit.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand_distr::{Distribution, Normal, Zipf};
use rayon::prelude::*;
use serde::Serialize;

use crate::clp::{FractionalSolution, IterationBudget, Sampler, TAU_LP};
use crate::error::{Error, Result};
use crate::model::{save_solution, Item, Vmk2Instance, Vmk2Solution};
use crate::pricing::{self, ValueAssignment};
use crate::rng::{trial_seed, RngHandle, RNG_ALGORITHM};
use crate::solvers::{self, Algorithm, HybridParams, MkMode};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "VMK_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    /// `w1, w2 ~ U[0.05, 0.95]`, `p ~ U[0.1, 1]`.
    Uniform,
    /// Uniform weights, `p = w1 + w2 + U[0, 0.2]`.
    Correlated,
    /// Uniform weights, `p = 1 / k` with `k` Zipf-distributed on `1..=n`.
    ZipfProfit,
    /// Weights scattered around a few random centres, profit proportional
    /// to `w1 + w2` up to a ±20% factor.
    Clustered,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "correlated" => Ok(Family::Correlated),
            "zipfProfit" | "zipf-profit" | "zipf" => Ok(Family::ZipfProfit),
            "clustered" => Ok(Family::Clustered),
            other => Err(Error::InvalidParameter(format!("unknown generator family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams {
    pub zipf_exponent: f64,
    pub clusters: usize,
    pub cluster_spread: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            zipf_exponent: 1.0,
            clusters: 3,
            cluster_spread: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub params: FamilyParams,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, m: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            m,
            seed,
            params: FamilyParams::default(),
        }
    }

    /// `count` specs with seeds derived from `base_seed`.
    pub fn suite(family: Family, n: usize, m: usize, base_seed: u64, count: usize) -> Vec<Self> {
        (0..count).map(|k| GeneratorSpec::new(family, n, m, trial_seed(base_seed, k as u64))).collect()
    }
}

/// Deterministic given the seed. Ids are `i0000`, `i0001`, ...
pub fn generate(spec: &GeneratorSpec) -> Result<Vmk2Instance> {
    let mut rng = RngHandle::new(spec.seed);
    let width = spec.n.saturating_sub(1).to_string().len().max(4);
    let id = |k: usize| format!("i{k:0width$}");
    let mut items = Vec::with_capacity(spec.n);
    match spec.family {
        Family::Uniform | Family::Correlated | Family::ZipfProfit => {
            let zipf = match spec.family {
                Family::ZipfProfit => Some(
                    Zipf::new(spec.n.max(1) as f64, spec.params.zipf_exponent)
                        .map_err(|e| Error::InvalidParameter(format!("zipf: {e}")))?,
                ),
                _ => None,
            };
            for k in 0..spec.n {
                let w1 = rng.uniform(0.05, 0.95);
                let w2 = rng.uniform(0.05, 0.95);
                let p = match spec.family {
                    Family::Uniform => rng.uniform(0.1, 1.0),
                    Family::Correlated => w1 + w2 + rng.uniform(0.0, 0.2),
                    _ => 1.0 / zipf.as_ref().map_or(1.0, |z| z.sample(&mut rng)),
                };
                items.push(Item::new(id(k), w1, w2, p));
            }
        }
        Family::Clustered => {
            let clusters = spec.params.clusters.max(1);
            let centres: Vec<(f64, f64)> =
                (0..clusters).map(|_| (rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85))).collect();
            let noise = Normal::new(0.0, spec.params.cluster_spread)
                .map_err(|e| Error::InvalidParameter(format!("cluster spread: {e}")))?;
            for k in 0..spec.n {
                let (c1, c2) = centres[rng.below(clusters)];
                let w1 = (c1 + noise.sample(&mut rng)).clamp(0.01, 1.0);
                let w2 = (c2 + noise.sample(&mut rng)).clamp(0.01, 1.0);
                let p = (w1 + w2) * rng.uniform(0.8, 1.2);
                items.push(Item::new(id(k), w1, w2, p));
            }
        }
    }
    Vmk2Instance::new(items, spec.m)
}

/// Runs `f` on a rayon pool sized by `VMK_THREADS` (or rayon's default).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algos: Vec<Algorithm>,
    pub trials: usize,
    pub eps: f64,
    pub mk_mode: MkMode,
    /// Compute the exact optimum for ratios against OPT.
    pub exact: bool,
    pub exact_node_cap: u64,
    pub clp_budget: IterationBudget,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algos: vec![Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction],
            trials: 10,
            eps: 0.01,
            mk_mode: MkMode::Auto,
            exact: false,
            exact_node_cap: solvers::DEFAULT_EXACT_NODE_CAP,
            clp_budget: IterationBudget::default(),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algo: Algorithm,
    pub seed: u64,
    pub trial: usize,
    pub n: usize,
    pub m: usize,
    pub profit: f64,
    pub x_star: f64,
    pub exact_opt: Option<f64>,
    pub ratio_opt: Option<f64>,
    pub ratio_lp: f64,
    pub wall_ms: f64,
    pub bins_used: usize,
    pub converged: bool,
    #[serde(skip)]
    pub solution: Vmk2Solution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoSummary {
    pub algo: Algorithm,
    pub runs: usize,
    pub mean_ratio_lp: f64,
    pub sd_ratio_lp: f64,
    pub mean_ratio_opt: Option<f64>,
    pub sd_ratio_opt: Option<f64>,
}

/// Mean and standard error of `ratio(a) - ratio(b)` over matched
/// (instance, trial) pairs. Uses ratios against OPT where every pair has
/// one, against `x*` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDelta {
    pub a: Algorithm,
    pub b: Algorithm,
    pub pairs: usize,
    pub against_opt: bool,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub rng: &'static str,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<AlgoSummary>,
    pub paired: Option<PairedDelta>,
    /// Instances whose exact optimum was requested but not proven.
    pub oracle_incomplete: Vec<u64>,
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn ratio(profit: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        profit / reference
    } else {
        1.0
    }
}

/// Runs every algorithm on every instance of the suite. Randomized
/// algorithms run `trials` times with seeds derived from the instance
/// seed; trial `t` of the hybrid and the baseline share their seed.
/// Instances fan out across the worker pool; rows come back in suite order.
pub fn run_ratio_bench(suite: &[GeneratorSpec], config: &BenchConfig) -> Result<ExperimentResult> {
    let per_instance: Vec<Result<(Vec<BenchRow>, bool)>> =
        with_pool(|| suite.par_iter().map(|spec| bench_instance(spec, config)).collect())?;
    let mut rows = Vec::new();
    let mut oracle_incomplete = Vec::new();
    for (spec, r) in suite.iter().zip(per_instance) {
        let (mut r, incomplete) = r?;
        if incomplete {
            oracle_incomplete.push(spec.seed);
        }
        rows.append(&mut r);
    }
    let aggregates = config
        .algos
        .iter()
        .map(|&algo| {
            let lp: Vec<f64> = rows.iter().filter(|r| r.algo == algo).map(|r| r.ratio_lp).collect();
            let opt: Vec<f64> = rows.iter().filter(|r| r.algo == algo).filter_map(|r| r.ratio_opt).collect();
            let (mean_ratio_lp, sd_ratio_lp) = mean_sd(&lp);
            let opt_stats = (!opt.is_empty() && opt.len() == lp.len()).then(|| mean_sd(&opt));
            AlgoSummary {
                algo,
                runs: lp.len(),
                mean_ratio_lp,
                sd_ratio_lp,
                mean_ratio_opt: opt_stats.map(|s| s.0),
                sd_ratio_opt: opt_stats.map(|s| s.1),
            }
        })
        .collect();
    let paired = paired_delta(&rows, Algorithm::Hybrid, Algorithm::Baseline);
    Ok(ExperimentResult {
        rng: RNG_ALGORITHM,
        rows,
        aggregates,
        paired,
        oracle_incomplete,
    })
}

pub fn paired_delta(rows: &[BenchRow], a: Algorithm, b: Algorithm) -> Option<PairedDelta> {
    let pairs: Vec<(&BenchRow, &BenchRow)> = rows
        .iter()
        .filter(|r| r.algo == a)
        .filter_map(|ra| {
            rows.iter()
                .find(|rb| rb.algo == b && rb.seed == ra.seed && rb.trial == ra.trial)
                .map(|rb| (ra, rb))
        })
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let against_opt = pairs.iter().all(|(x, y)| x.ratio_opt.is_some() && y.ratio_opt.is_some());
    let deltas: Vec<f64> = pairs
        .iter()
        .map(|(x, y)| {
            if against_opt {
                x.ratio_opt.unwrap_or(0.0) - y.ratio_opt.unwrap_or(0.0)
            } else {
                x.ratio_lp - y.ratio_lp
            }
        })
        .collect();
    let (mean, sd) = mean_sd(&deltas);
    Some(PairedDelta {
        a,
        b,
        pairs: deltas.len(),
        against_opt,
        mean,
        se: sd / (deltas.len() as f64).sqrt(),
    })
}

fn bench_instance(spec: &GeneratorSpec, config: &BenchConfig) -> Result<(Vec<BenchRow>, bool)> {
    let inst = generate(spec)?;
    let fs = solvers::solve_lp(&inst, config.eps, config.clp_budget)?;
    let (exact_opt, incomplete) = if config.exact {
        let r = solvers::solve_exact(&inst, config.exact_node_cap)?;
        if r.complete {
            (Some(r.profit), false)
        } else {
            (None, true)
        }
    } else {
        (None, false)
    };
    let mut rows = Vec::new();
    for &algo in &config.algos {
        let randomized = matches!(algo, Algorithm::Hybrid | Algorithm::Baseline);
        let trials = if randomized { config.trials } else { 1 };
        for trial in 0..trials {
            let seed = trial_seed(spec.seed, trial as u64);
            let started = std::time::Instant::now();
            let solution = run_algorithm(&inst, &fs, algo, seed, config)?;
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let profit = solution.profit(&inst);
            rows.push(BenchRow {
                algo,
                seed: spec.seed,
                trial,
                n: inst.len(),
                m: inst.m(),
                profit,
                x_star: fs.value,
                exact_opt,
                ratio_opt: exact_opt.map(|o| ratio(profit, o)),
                ratio_lp: ratio(profit, fs.value),
                wall_ms,
                bins_used: solution.bins_used(),
                converged: fs.converged,
                solution,
            });
        }
    }
    Ok((rows, incomplete))
}

fn run_algorithm(
    inst: &Vmk2Instance,
    fs: &FractionalSolution,
    algo: Algorithm,
    seed: u64,
    config: &BenchConfig,
) -> Result<Vmk2Solution> {
    let mut rng = RngHandle::new(seed);
    let params = HybridParams {
        eps: config.eps,
        seed,
        ell_override: None,
        clp_budget: config.clp_budget,
        mk_mode: config.mk_mode,
    };
    Ok(match algo {
        Algorithm::Hybrid => solvers::hybrid_from_lp(inst, fs, &params, &mut rng)?,
        Algorithm::Baseline => solvers::baseline_from_lp(inst, fs, &mut rng),
        Algorithm::Reduction => solvers::solve_reduction(inst, config.mk_mode)?.0,
        Algorithm::Exact => solvers::solve_exact(inst, config.exact_node_cap)?.solution,
        Algorithm::Mck => solvers::solve_via_mck(inst, config.exact_node_cap)?.0,
        Algorithm::EpsNice => {
            let mk_mode = config.mk_mode;
            solvers::eps_nice_wrap(inst, config.eps, None, |res| Ok(solvers::solve_reduction(res, mk_mode)?.0))?.0
        }
    })
}

impl ExperimentResult {
    /// Violated checks: any profit above `x*`, any reduction ratio below
    /// one half, the hybrid more than one paired standard error behind the
    /// baseline, or a ratio outside `[0, 1 + τ]`.
    pub fn check(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for r in &self.rows {
            if r.converged && r.profit > r.x_star + TAU_LP {
                failures.push(format!("{} seed {} trial {}: profit {} above x* {}", r.algo, r.seed, r.trial, r.profit, r.x_star));
            }
            if r.ratio_lp < 0.0 || (r.converged && r.ratio_lp > 1.0 + TAU_LP) {
                failures.push(format!("{} seed {}: ratio vs x* {} out of range", r.algo, r.seed, r.ratio_lp));
            }
            if let Some(q) = r.ratio_opt {
                if !(0.0..=1.0 + TAU_LP).contains(&q) {
                    failures.push(format!("{} seed {}: ratio vs OPT {} out of range", r.algo, r.seed, q));
                }
                if r.algo == Algorithm::Reduction && q < 0.5 - 1e-9 {
                    failures.push(format!("reduction seed {}: ratio {} below 1/2", r.seed, q));
                }
            }
        }
        if let Some(d) = &self.paired {
            if d.pairs > 1 && d.mean < -d.se {
                failures.push(format!("hybrid behind baseline: paired delta {} (se {})", d.mean, d.se));
            }
        }
        failures
    }

    /// Writes `ratio.csv`, `ratio.json` and one solution file per row
    /// under `solutions/`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("solutions"))?;
        let mut w = csv::Writer::from_path(dir.join("ratio.csv"))?;
        w.write_record([
            "algo", "seed", "trial", "n", "m", "profit", "x_star", "exact_opt", "ratio_opt", "ratio_lp", "wall_ms",
            "bins_used", "converged",
        ])?;
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                r.algo.to_string(),
                r.seed.to_string(),
                r.trial.to_string(),
                r.n.to_string(),
                r.m.to_string(),
                r.profit.to_string(),
                r.x_star.to_string(),
                opt(r.exact_opt),
                opt(r.ratio_opt),
                r.ratio_lp.to_string(),
                format!("{:.3}", r.wall_ms),
                r.bins_used.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush()?;
        fs::write(dir.join("ratio.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Solution files need the instances to map indices back to ids.
    pub fn write_solutions(&self, dir: &Path, suite: &[GeneratorSpec]) -> Result<()> {
        let sol_dir = dir.join("solutions");
        fs::create_dir_all(&sol_dir)?;
        for spec in suite {
            let inst = generate(spec)?;
            for r in self.rows.iter().filter(|r| r.seed == spec.seed) {
                save_solution(sol_dir.join(solution_file_name(r)), &inst, &r.solution)?;
            }
        }
        Ok(())
    }
}

pub fn solution_file_name(row: &BenchRow) -> String {
    format!("{}_{}_{}.json", row.algo, row.seed, row.trial)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalPoint {
    pub j: usize,
    /// Mean gain of the `j`-th draw.
    pub q_hat: f64,
    pub se: f64,
    /// Mean profit of the union of the first `j` draws.
    pub cumulative: f64,
    /// `(x* / m) · e^{-j/m}`.
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalCurve {
    pub m: usize,
    pub x_star: f64,
    pub trials: usize,
    pub seed: u64,
    pub points: Vec<MarginalPoint>,
    /// Every trial's union profit was nondecreasing in `j`.
    pub monotone: bool,
}

/// Solves the LP and estimates the marginal profit of each of `m`
/// successive draws.
pub fn run_marginal_curve(inst: &Vmk2Instance, trials: usize, seed: u64, eps: f64) -> Result<MarginalCurve> {
    let fs = crate::clp::solve_clp(inst, eps, IterationBudget::default())?;
    marginal_curve_from_lp(inst, &fs, trials, seed)
}

pub fn marginal_curve_from_lp(inst: &Vmk2Instance, fs: &FractionalSolution, trials: usize, seed: u64) -> Result<MarginalCurve> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let m = inst.m();
    let sampler = Sampler::new(fs);
    let runs: Vec<(Vec<f64>, bool)> = with_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngHandle::new(trial_seed(seed, t as u64));
                let mut covered = vec![false; inst.len()];
                let mut total = 0.0;
                let mut gains = Vec::with_capacity(m);
                let mut monotone = true;
                for _ in 0..m {
                    let mut gain = 0.0;
                    for i in sampler.sample(&mut rng).iter() {
                        if !covered[i] {
                            covered[i] = true;
                            gain += inst.item(i).profit;
                        }
                    }
                    let next = total + gain;
                    monotone &= next >= total;
                    total = next;
                    gains.push(gain);
                }
                (gains, monotone)
            })
            .collect()
    })?;
    let mut cumulative = 0.0;
    let points = (0..m)
        .map(|j| {
            let g: Vec<f64> = runs.iter().map(|r| r.0[j]).collect();
            let (q_hat, sd) = mean_sd(&g);
            cumulative += q_hat;
            MarginalPoint {
                j: j + 1,
                q_hat,
                se: sd / (trials as f64).sqrt(),
                cumulative,
                analytic: fs.value / m as f64 * (-((j + 1) as f64) / m as f64).exp(),
            }
        })
        .collect();
    Ok(MarginalCurve {
        m,
        x_star: fs.value,
        trials,
        seed,
        points,
        monotone: runs.iter().all(|r| r.1),
    })
}

impl MarginalCurve {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["j", "q_hat", "se", "cumulative", "analytic"])?;
        for p in &self.points {
            w.write_record([p.j.to_string(), p.q_hat.to_string(), p.se.to_string(), p.cumulative.to_string(), p.analytic.to_string()])?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPoint {
    pub t: f64,
    /// `mean - t · η`.
    pub threshold: f64,
    pub empirical: f64,
    /// `exp(-t² / (2 · mean / η))`.
    pub bound: f64,
    /// Binomial standard error at the bound.
    pub se: f64,
    /// `empirical <= bound + 3 · se`.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub ell: usize,
    pub trials: usize,
    pub seed: u64,
    /// `max_C p(C)`.
    pub eta: f64,
    /// Empirical mean of `p(T)`.
    pub mean: f64,
    pub points: Vec<TailPoint>,
}

impl ConcentrationReport {
    pub fn all_ok(&self) -> bool {
        self.points.iter().all(|p| p.ok)
    }
}

/// `exp(-t² / (2 · mean / η))`.
pub fn tail_bound(t: f64, mean: f64, eta: f64) -> f64 {
    if mean <= 0.0 || eta <= 0.0 {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    (-t * t / (2.0 * mean / eta)).exp()
}

/// The `t` at which [`tail_bound`] equals `target`.
pub fn t_for_bound(target: f64, mean: f64, eta: f64) -> f64 {
    (2.0 * mean / eta * (1.0 / target).ln()).sqrt()
}

/// `max_C p(C)` by exact pricing, or its upper bound if pricing runs out
/// of nodes.
pub fn max_configuration_profit(inst: &Vmk2Instance) -> Result<f64> {
    match pricing::price_exact(inst, &ValueAssignment::profits(inst)) {
        Ok(c) => Ok(c.value),
        Err(Error::PricingBudgetExceeded { upper_bound, .. }) => Ok(upper_bound),
        Err(e) => Err(e),
    }
}

/// Empirical lower tail of `p(T)` for `T` the union of `ell` draws.
pub fn run_concentration(
    inst: &Vmk2Instance,
    fs: &FractionalSolution,
    ell: usize,
    trials: usize,
    ts: &[f64],
    seed: u64,
) -> Result<ConcentrationReport> {
    if ell > inst.m() {
        return Err(Error::InvalidParameter(format!("ell {ell} exceeds bin count {}", inst.m())));
    }
    if trials < 100 {
        return Err(Error::InvalidParameter("concentration needs at least 100 trials".into()));
    }
    let eta = max_configuration_profit(inst)?;
    let sampler = Sampler::new(fs);
    let profits: Vec<f64> = with_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngHandle::new(trial_seed(seed, t as u64));
                let (_, covered) = sampler.sample_t(ell, &mut rng);
                covered.iter().map(|&i| inst.item(i).profit).sum()
            })
            .collect()
    })?;
    let mean = profits.iter().sum::<f64>() / trials as f64;
    let points = ts
        .iter()
        .map(|&t| {
            let threshold = mean - t * eta;
            let hits = profits.iter().filter(|&&p| p <= threshold).count();
            let empirical = hits as f64 / trials as f64;
            let bound = tail_bound(t, mean, eta);
            let se = (bound * (1.0 - bound) / trials as f64).sqrt();
            TailPoint {
                t,
                threshold,
                empirical,
                bound,
                se,
                ok: empirical <= bound + 3.0 * se,
            }
        })
        .collect();
    Ok(ConcentrationReport {
        ell,
        trials,
        seed,
        eta,
        mean,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_solution, Configuration};

    #[test]
    fn generation_is_deterministic_and_valid() {
        for family in [Family::Uniform, Family::Correlated, Family::ZipfProfit, Family::Clustered] {
            let spec = GeneratorSpec::new(family, 50, 3, 17);
            let a = generate(&spec).unwrap();
            assert_eq!(a, generate(&spec).unwrap());
            assert_eq!(a.len(), 50);
            assert!(a.items().iter().all(|i| i.profit > 0.0));
        }
        assert!(generate(&GeneratorSpec::new(Family::Uniform, 0, 2, 1)).unwrap().is_empty());
    }

    #[test]
    fn uniform_weight_mean() {
        let inst = generate(&GeneratorSpec::new(Family::Uniform, 1000, 1, 3)).unwrap();
        let mean = inst.items().iter().map(|i| i.w1).sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.03, "{mean}");
        assert!(inst.items().iter().all(|i| (0.05..=0.95).contains(&i.w1) && (0.1..=1.0).contains(&i.profit)));
    }

    #[test]
    fn correlated_profit_tracks_weight() {
        let inst = generate(&GeneratorSpec::new(Family::Correlated, 200, 1, 4)).unwrap();
        for i in inst.items() {
            let extra = i.profit - i.w1 - i.w2;
            assert!((0.0..=0.2 + 1e-12).contains(&extra));
        }
    }

    #[test]
    fn trivial_suite_gives_ratio_one() {
        let suite = [GeneratorSpec::new(Family::Uniform, 1, 1, 9)];
        let config = BenchConfig {
            algos: vec![Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction, Algorithm::Exact],
            trials: 1,
            exact: true,
            ..Default::default()
        };
        let res = run_ratio_bench(&suite, &config).unwrap();
        assert_eq!(res.rows.len(), 4);
        for r in &res.rows {
            assert_eq!(r.ratio_opt, Some(1.0));
        }
        assert!(res.check().is_empty());
    }

    #[test]
    fn bench_rows_are_feasible_and_reproducible() {
        let suite = GeneratorSpec::suite(Family::Uniform, 12, 2, 5, 3);
        let config = BenchConfig {
            trials: 3,
            exact: true,
            ..Default::default()
        };
        let a = run_ratio_bench(&suite, &config).unwrap();
        let b = run_ratio_bench(&suite, &config).unwrap();
        let key = |r: &ExperimentResult| r.rows.iter().map(|x| (x.algo, x.seed, x.trial, x.profit)).collect::<Vec<_>>();
        assert_eq!(key(&a), key(&b));
        assert_eq!(a.rows.len(), 3 * (3 + 3 + 1));
        for spec in &suite {
            let inst = generate(spec).unwrap();
            for r in a.rows.iter().filter(|r| r.seed == spec.seed) {
                assert!(check_solution(&inst, &r.solution).unwrap().is_feasible());
            }
        }
        assert!(a.check().is_empty(), "{:?}", a.check());
        assert!(a.paired.is_some());
    }

    #[test]
    fn check_flags_doctored_rows() {
        let suite = [GeneratorSpec::new(Family::Uniform, 8, 2, 2)];
        let config = BenchConfig {
            algos: vec![Algorithm::Reduction],
            exact: true,
            ..Default::default()
        };
        let mut res = run_ratio_bench(&suite, &config).unwrap();
        assert!(res.check().is_empty());
        res.rows[0].profit = res.rows[0].x_star + 1.0;
        res.rows[0].ratio_opt = Some(0.4);
        assert_eq!(res.check().len(), 2);
    }

    #[test]
    fn marginal_curve_first_point_and_monotonicity() {
        let inst = generate(&GeneratorSpec::new(Family::Uniform, 20, 4, 6)).unwrap();
        let curve = run_marginal_curve(&inst, 2000, 1, 0.01).unwrap();
        assert!(curve.monotone);
        assert_eq!(curve.points.len(), 4);
        let p1 = &curve.points[0];
        assert!((p1.q_hat - curve.x_star / 4.0).abs() <= 4.0 * p1.se + 1e-9);
        for w in curve.points.windows(2) {
            assert!(w[1].cumulative >= w[0].cumulative);
        }
    }

    #[test]
    fn degenerate_concentration_has_empty_tail() {
        let inst = Vmk2Instance::new(vec![Item::new("a", 0.5, 0.5, 1.0)], 1).unwrap();
        let fs = FractionalSolution {
            m: 1,
            pool: vec![Configuration::new([0])],
            mass: vec![1.0],
            value: 1.0,
            dual_bin_price: 0.0,
            dual_item_prices: vec![1.0],
            converged: true,
            certified_gap: 0.0,
            upper_bound: 1.0,
            rounds: 0,
        };
        let rep = run_concentration(&inst, &fs, 1, 200, &[0.0, 0.5, 1.0], 3).unwrap();
        assert_eq!(rep.points[0].bound, 1.0);
        assert_eq!(rep.points[1].empirical, 0.0);
        assert_eq!(rep.points[2].empirical, 0.0);
        assert!(rep.all_ok());
        assert!(run_concentration(&inst, &fs, 2, 200, &[0.0], 3).is_err());
        assert!(run_concentration(&inst, &fs, 1, 10, &[0.0], 3).is_err());
    }

    #[test]
    fn t_for_bound_inverts() {
        let t = t_for_bound(0.1, 12.0, 1.5);
        assert!((tail_bound(t, 12.0, 1.5) - 0.1).abs() < 1e-12);
    }
}
