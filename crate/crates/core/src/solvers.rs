//! Top-level 2VMK algorithms.
//!
//! * [`solve_hybrid`]: solve the configuration LP, sample `ℓ = ⌈m ln 2⌉`
//!   configurations from it, and fill the remaining `m - ℓ` bins by solving
//!   the 1-associated MK instance of the items not yet covered.
//! * [`solve_sampling_baseline`]: sample all `m` bins from the LP.
//! * [`solve_reduction`]: solve the 1-associated MK instance and lift it.
//! * [`eps_nice_wrap`]: peel off a dense prefix packed by First-Fit and hand
//!   the rest to another solver, keeping the `m` most profitable bins.
//! * [`reduce_to_mck`] / [`solve_mck_exact`]: exact solve through
//!   `2m`-dimensional multiple-choice knapsack.
//! * [`solve_exact`]: branch and bound oracle for small instances.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::clp::{self, FractionalSolution, IterationBudget, Sampler};
use crate::error::{Error, Result};
use crate::mk::{self, FirstFitOrder, DEFAULT_MK_NODE_CAP};
use crate::model::{dedup_solution, Configuration, Vmk2Instance, Vmk2Solution};
use crate::pricing::{self, ValueAssignment};
use crate::rng::{RngHandle, RNG_ALGORITHM};

pub const DEFAULT_EXACT_NODE_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Hybrid,
    Baseline,
    Reduction,
    Exact,
    Mck,
    EpsNice,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Hybrid => "hybrid",
            Algorithm::Baseline => "baseline",
            Algorithm::Reduction => "reduction",
            Algorithm::Exact => "exact",
            Algorithm::Mck => "mck",
            Algorithm::EpsNice => "eps-nice",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hybrid" => Algorithm::Hybrid,
            "baseline" => Algorithm::Baseline,
            "reduction" => Algorithm::Reduction,
            "exact" => Algorithm::Exact,
            "mck" => Algorithm::Mck,
            "eps-nice" => Algorithm::EpsNice,
            other => return Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MkMode {
    Exact,
    Heuristic,
    /// Exact for at most 18 items or at most 2 bins, heuristic otherwise.
    Auto,
}

impl FromStr for MkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MkMode::Exact),
            "heuristic" => Ok(MkMode::Heuristic),
            "auto" => Ok(MkMode::Auto),
            other => Err(Error::InvalidParameter(format!("unknown mk mode `{other}`"))),
        }
    }
}

/// Per-run record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub profit: f64,
    /// LP value `x*` when the algorithm solved the configuration LP.
    pub lp_bound: Option<f64>,
    pub lp_converged: Option<bool>,
    pub exact_opt: Option<f64>,
    pub wall_time_ms: f64,
    pub bins_used: usize,
    pub trial_index: usize,
    pub rng: &'static str,
}

impl SolveReport {
    fn new(algorithm: Algorithm, inst: &Vmk2Instance, sol: &Vmk2Solution, started: Instant) -> Self {
        SolveReport {
            algorithm,
            seed: 0,
            profit: sol.profit(inst),
            lp_bound: None,
            lp_converged: None,
            exact_opt: None,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            bins_used: sol.bins_used(),
            trial_index: 0,
            rng: RNG_ALGORITHM,
        }
    }

    fn with_lp(mut self, fs: &FractionalSolution) -> Self {
        self.lp_bound = Some(fs.value);
        self.lp_converged = Some(fs.converged);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams {
    pub eps: f64,
    pub seed: u64,
    pub ell_override: Option<usize>,
    pub clp_budget: IterationBudget,
    pub mk_mode: MkMode,
}

impl Default for HybridParams {
    fn default() -> Self {
        HybridParams {
            eps: 0.01,
            seed: 0,
            ell_override: None,
            clp_budget: IterationBudget::default(),
            mk_mode: MkMode::Auto,
        }
    }
}

impl HybridParams {
    fn validate(&self, m: usize) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 0.5), got {}", self.eps)));
        }
        if let Some(ell) = self.ell_override {
            if ell > m {
                return Err(Error::InvalidParameter(format!("ell {ell} exceeds bin count {m}")));
            }
        }
        Ok(())
    }
}

/// `⌈m · ln 2⌉`.
pub fn default_ell(m: usize) -> usize {
    (m as f64 * std::f64::consts::LN_2).ceil() as usize
}

/// Solves the configuration LP, keeping a non-converged solution when the
/// round budget runs out.
pub fn solve_lp(inst: &Vmk2Instance, eps: f64, budget: IterationBudget) -> Result<FractionalSolution> {
    match clp::solve_clp(inst, eps, budget) {
        Ok(fs) => Ok(fs),
        Err(Error::BudgetExhausted(fs)) => Ok(*fs),
        Err(e) => Err(e),
    }
}

pub fn solve_mk(mk: &mk::MkInstance, mode: MkMode) -> Result<mk::MkSolution> {
    match mode {
        MkMode::Exact => match mk::solve_mk_exact(mk, DEFAULT_MK_NODE_CAP) {
            Err(Error::MkBudgetExceeded { best, .. }) => Ok(*best),
            other => other,
        },
        MkMode::Heuristic => Ok(mk::solve_mk_heuristic(mk)),
        MkMode::Auto => Ok(mk::solve_mk_auto(mk)),
    }
}

/// The hybrid algorithm end to end.
pub fn solve_hybrid(inst: &Vmk2Instance, params: &HybridParams) -> Result<(Vmk2Solution, SolveReport)> {
    params.validate(inst.m())?;
    let started = Instant::now();
    let fs = solve_lp(inst, params.eps, params.clp_budget)?;
    let sol = hybrid_from_lp(inst, &fs, params, &mut RngHandle::new(params.seed))?;
    let mut report = SolveReport::new(Algorithm::Hybrid, inst, &sol, started).with_lp(&fs);
    report.seed = params.seed;
    Ok((sol, report))
}

/// Sampling and residual steps of the hybrid algorithm on a given LP solution.
pub fn hybrid_from_lp(
    inst: &Vmk2Instance,
    fs: &FractionalSolution,
    params: &HybridParams,
    rng: &mut RngHandle,
) -> Result<Vmk2Solution> {
    params.validate(inst.m())?;
    let m = inst.m();
    let ell = params.ell_override.unwrap_or_else(|| default_ell(m)).min(m);
    let sampler = Sampler::new(fs);
    let (mut bins, covered) = sampler.sample_t(ell, rng);
    let residual: Vec<usize> = (0..inst.len()).filter(|i| covered.binary_search(i).is_err()).collect();
    let mk_inst = mk::associate_subset(inst, &residual, m - ell)?;
    bins.extend(solve_mk(&mk_inst, params.mk_mode)?.lift());
    Ok(dedup_solution(&Vmk2Solution::new(bins)))
}

/// `m` independent draws from the LP solution.
pub fn solve_sampling_baseline(inst: &Vmk2Instance, eps: f64, seed: u64) -> Result<(Vmk2Solution, SolveReport)> {
    let started = Instant::now();
    let fs = solve_lp(inst, eps, IterationBudget::default())?;
    let sol = baseline_from_lp(inst, &fs, &mut RngHandle::new(seed));
    let mut report = SolveReport::new(Algorithm::Baseline, inst, &sol, started).with_lp(&fs);
    report.seed = seed;
    Ok((sol, report))
}

pub fn baseline_from_lp(inst: &Vmk2Instance, fs: &FractionalSolution, rng: &mut RngHandle) -> Vmk2Solution {
    let (bins, _) = Sampler::new(fs).sample_t(inst.m(), rng);
    dedup_solution(&Vmk2Solution::new(bins))
}

/// Solves the 1-associated MK instance with `m` bins and returns its bins.
pub fn solve_reduction(inst: &Vmk2Instance, mk_mode: MkMode) -> Result<(Vmk2Solution, SolveReport)> {
    let started = Instant::now();
    let mk_inst = mk::associate(inst, 1)?;
    let sol = Vmk2Solution::new(solve_mk(&mk_inst, mk_mode)?.lift());
    let report = SolveReport::new(Algorithm::Reduction, inst, &sol, started);
    Ok((sol, report))
}

/// Default prefix budget `min(eps^-40, 0.1 · Σ (w1 + w2))`.
pub fn default_prefix_budget(inst: &Vmk2Instance, eps: f64) -> f64 {
    let total: f64 = inst.items().iter().map(|i| i.total_weight()).sum();
    eps.powi(-40).min(0.1 * total)
}

/// Sorts items by `p / (w1 + w2)`, moves the densest prefix of total
/// weight `prefix_budget` into First-Fit bins, solves the rest with `inner`
/// on `m` bins and returns the `m` most profitable of all bins.
pub fn eps_nice_wrap<F>(
    inst: &Vmk2Instance,
    eps: f64,
    prefix_budget: Option<f64>,
    mut inner: F,
) -> Result<(Vmk2Solution, SolveReport)>
where
    F: FnMut(&Vmk2Instance) -> Result<Vmk2Solution>,
{
    let started = Instant::now();
    if let Some(b) = prefix_budget {
        if b.is_nan() || b <= 0.0 {
            return Err(Error::InvalidParameter(format!("prefix budget must be positive, got {b}")));
        }
    }
    // an instance without weight gets an empty prefix
    let budget = prefix_budget.unwrap_or_else(|| default_prefix_budget(inst, eps));
    let prefix = dense_prefix(inst, budget);
    let mut bins = mk::first_fit_2d(inst, &prefix, FirstFitOrder::Given);

    let rest: Vec<usize> = {
        let mut in_prefix = vec![false; inst.len()];
        prefix.iter().for_each(|&i| in_prefix[i] = true);
        (0..inst.len()).filter(|&i| !in_prefix[i]).collect()
    };
    let (residual, back) = inst.restrict(&rest, inst.m())?;
    let inner_sol = dedup_solution(&inner(&residual)?);
    bins.extend(
        inner_sol
            .bins
            .iter()
            .map(|b| Configuration::new(b.iter().map(|k| back[k]))),
    );

    // stable: earlier bins win ties
    let mut ranked: Vec<(f64, Configuration)> = bins.into_iter().map(|b| (b.profit(inst), b)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut chosen: Vec<Configuration> = ranked.into_iter().take(inst.m()).map(|(_, b)| b).collect();
    chosen.resize(inst.m(), Configuration::empty());
    let sol = Vmk2Solution::new(chosen);
    let report = SolveReport::new(Algorithm::EpsNice, inst, &sol, started);
    Ok((sol, report))
}

/// Items taken, in density order, while the running `Σ (w1 + w2)` is below
/// `budget`.
pub fn dense_prefix(inst: &Vmk2Instance, budget: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (inst.item(a), inst.item(b));
        ib.density()
            .total_cmp(&ia.density())
            .then(ib.profit.total_cmp(&ia.profit))
            .then(a.cmp(&b))
    });
    let mut used = 0.0;
    let mut prefix = Vec::new();
    for i in order {
        if used >= budget {
            break;
        }
        used += inst.item(i).total_weight();
        prefix.push(i);
    }
    prefix
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NiceReport {
    pub nice: bool,
    /// `max_C p(C)` (an upper bound if pricing ran out of nodes).
    pub max_config_profit_bound: f64,
    /// `ln ln ln` of the bin-count threshold, i.e. `eps^-30`.
    pub m_threshold_log3: f64,
    /// `ln ln ln m`, or `-inf` when undefined.
    pub m_log3: f64,
    pub profit_condition: bool,
    pub bin_condition: bool,
}

/// Checks both conditions of ε-niceness: `m >= exp(exp(exp(eps^-30))))`
/// and `p(C) <= eps^20 · OPT` for every configuration, with
/// `opt_estimate` standing in for OPT.
pub fn is_eps_nice(inst: &Vmk2Instance, eps: f64, opt_estimate: f64) -> Result<NiceReport> {
    if opt_estimate.is_nan() || opt_estimate <= 0.0 {
        return Err(Error::InvalidParameter("opt estimate must be positive".into()));
    }
    let max_config = match pricing::price_exact(inst, &ValueAssignment::profits(inst)) {
        Ok(c) => c.value,
        Err(Error::PricingBudgetExceeded { upper_bound, .. }) => upper_bound,
        Err(e) => return Err(e),
    };
    let threshold = eps.powi(-30);
    let m = inst.m() as f64;
    let m_log3 = if m > std::f64::consts::E.exp() { m.ln().ln().ln() } else { f64::NEG_INFINITY };
    let bin_condition = m_log3 >= threshold;
    let profit_condition = max_config <= eps.powi(20) * opt_estimate;
    Ok(NiceReport {
        nice: bin_condition && profit_condition,
        max_config_profit_bound: max_config,
        m_threshold_log3: threshold,
        m_log3,
        profit_condition,
        bin_condition,
    })
}

/// A copy of item `item` placed in bin `bin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MckItem {
    pub item: usize,
    pub bin: usize,
    pub weight: Vec<f64>,
    pub profit: f64,
}

/// Multiple-choice knapsack in `dims` unit dimensions; at most one item per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McKInstance {
    pub dims: usize,
    pub classes: Vec<Vec<MckItem>>,
}

/// Chosen option per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MckSolution {
    pub chosen: Vec<Option<usize>>,
}

impl MckSolution {
    pub fn profit(&self, mck: &McKInstance) -> f64 {
        self.chosen
            .iter()
            .zip(&mck.classes)
            .filter_map(|(c, class)| c.map(|k| class[k].profit))
            .sum()
    }

    pub fn is_feasible(&self, mck: &McKInstance) -> bool {
        let mut load = vec![0.0; mck.dims];
        for (c, class) in self.chosen.iter().zip(&mck.classes) {
            if let Some(k) = c {
                for (l, w) in load.iter_mut().zip(&class[*k].weight) {
                    *l += w;
                }
            }
        }
        load.iter().all(|&l| l <= 1.0 + crate::model::TAU_FEAS)
    }

    /// Bin `r` receives every item whose copy `(i, r)` was chosen.
    pub fn to_solution(&self, mck: &McKInstance, m: usize) -> Vmk2Solution {
        let mut bins = vec![Vec::new(); m];
        for (c, class) in self.chosen.iter().zip(&mck.classes) {
            if let Some(k) = c {
                bins[class[*k].bin].push(class[*k].item);
            }
        }
        Vmk2Solution::new(bins.into_iter().map(Configuration::new).collect())
    }
}

/// One class per item with `m` copies; copy `r` carries `(w1, w2)` in
/// coordinates `2r, 2r + 1` (zero-based) and zero elsewhere.
pub fn reduce_to_mck(inst: &Vmk2Instance) -> McKInstance {
    let m = inst.m();
    let dims = 2 * m;
    let classes = inst
        .items()
        .iter()
        .enumerate()
        .map(|(i, it)| {
            (0..m)
                .map(|r| {
                    let mut weight = vec![0.0; dims];
                    weight[2 * r] = it.w1;
                    weight[2 * r + 1] = it.w2;
                    MckItem {
                        item: i,
                        bin: r,
                        weight,
                        profit: it.profit,
                    }
                })
                .collect()
        })
        .collect();
    McKInstance { dims, classes }
}

/// Exact multiple-choice knapsack by depth-first search over classes with
/// a fractional bound on the summed residual capacity.
pub fn solve_mck_exact(mck: &McKInstance, node_cap: u64) -> Result<MckSolution> {
    let summary: Vec<(f64, f64)> = mck
        .classes
        .iter()
        .map(|class| {
            let p = class.iter().map(|o| o.profit).fold(0.0, f64::max);
            let w = class.iter().map(|o| o.weight.iter().sum::<f64>()).fold(f64::INFINITY, f64::min);
            (p, w)
        })
        .collect();
    let mut order: Vec<usize> = (0..mck.classes.len()).filter(|&c| summary[c].0 > 0.0).collect();
    order.sort_by(|&a, &b| {
        crate::model::density(summary[b].0, summary[b].1)
            .total_cmp(&crate::model::density(summary[a].0, summary[a].1))
            .then(a.cmp(&b))
    });
    let mut s = MckSearch {
        mck,
        summary,
        order,
        load: vec![0.0; mck.dims],
        chosen: vec![None; mck.classes.len()],
        best: 0.0,
        best_chosen: vec![None; mck.classes.len()],
        nodes: 0,
        node_cap,
        aborted: false,
    };
    s.dfs(0, 0.0);
    let sol = MckSolution { chosen: s.best_chosen };
    if s.aborted {
        return Err(Error::DegenerateInstance(format!("mck search exceeded {} nodes", s.nodes)));
    }
    Ok(sol)
}

struct MckSearch<'a> {
    mck: &'a McKInstance,
    summary: Vec<(f64, f64)>,
    order: Vec<usize>,
    load: Vec<f64>,
    chosen: Vec<Option<usize>>,
    best: f64,
    best_chosen: Vec<Option<usize>>,
    nodes: u64,
    node_cap: u64,
    aborted: bool,
}

impl MckSearch<'_> {
    fn fits(&self, option: &MckItem) -> bool {
        option.weight.iter().zip(&self.load).all(|(w, l)| l + w <= 1.0 + 1e-12)
    }

    fn bound(&self, k: usize) -> f64 {
        let mut cap: f64 = self.load.iter().map(|l| (1.0 - l).max(0.0)).sum();
        let mut total = 0.0;
        for &c in &self.order[k..] {
            if !self.mck.classes[c].iter().any(|o| self.fits(o)) {
                continue;
            }
            let (p, w) = self.summary[c];
            if w <= cap {
                cap -= w;
                total += p;
            } else {
                total += p * cap / w;
                break;
            }
        }
        total
    }

    fn dfs(&mut self, k: usize, value: f64) {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.aborted = true;
            return;
        }
        if value > self.best + 1e-12 {
            self.best = value;
            self.best_chosen = self.chosen.clone();
        }
        if k == self.order.len() || value + self.bound(k) <= self.best + 1e-12 {
            return;
        }
        let c = self.order[k];
        for o in 0..self.mck.classes[c].len() {
            let option = &self.mck.classes[c][o];
            if !self.fits(option) {
                continue;
            }
            let profit = option.profit;
            for (l, w) in self.load.iter_mut().zip(&self.mck.classes[c][o].weight) {
                *l += w;
            }
            self.chosen[c] = Some(o);
            self.dfs(k + 1, value + profit);
            self.chosen[c] = None;
            for (l, w) in self.load.iter_mut().zip(&self.mck.classes[c][o].weight) {
                *l -= w;
            }
            if self.aborted {
                return;
            }
        }
        self.dfs(k + 1, value);
    }
}

/// Exact 2VMK through the multiple-choice reduction.
pub fn solve_via_mck(inst: &Vmk2Instance, node_cap: u64) -> Result<(Vmk2Solution, SolveReport)> {
    let started = Instant::now();
    let mck = reduce_to_mck(inst);
    let chosen = solve_mck_exact(&mck, node_cap)?;
    let sol = chosen.to_solution(&mck, inst.m());
    let report = SolveReport::new(Algorithm::Mck, inst, &sol, started);
    Ok((sol, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub solution: Vmk2Solution,
    pub profit: f64,
    /// `true` when the search finished, so `profit` is optimal.
    pub complete: bool,
    pub nodes: u64,
}

/// Branch and bound over "assign each item to a bin or skip it", items in
/// density order, bins opened in index order, pruned by fractional bounds
/// and stopped early once the incumbent meets the LP value.
pub fn solve_exact(inst: &Vmk2Instance, node_cap: u64) -> Result<ExactResult> {
    let m = inst.m();
    let lp_bound = match clp::solve_clp(inst, 0.01, IterationBudget::default()) {
        Ok(fs) => fs.upper_bound,
        Err(Error::BudgetExhausted(fs)) => fs.upper_bound,
        Err(e) => return Err(e),
    };
    let mut order: Vec<usize> = (0..inst.len()).filter(|&i| inst.item(i).profit > 0.0).collect();
    order.sort_by(|&a, &b| inst.item(b).density().total_cmp(&inst.item(a).density()).then(a.cmp(&b)));
    let (free, items): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&i| inst.item(i).total_weight() == 0.0);

    let by_dim = |dim: usize| {
        let mut o = items.clone();
        let w = |i: usize| if dim == 1 { inst.item(i).w1 } else { inst.item(i).w2 };
        o.sort_by(|&a, &b| {
            crate::model::density(inst.item(b).profit, w(b)).total_cmp(&crate::model::density(inst.item(a).profit, w(a)))
        });
        o
    };
    let mut position = vec![usize::MAX; inst.len()];
    for (k, &i) in items.iter().enumerate() {
        position[i] = k;
    }
    let base: f64 = free.iter().map(|&i| inst.item(i).profit).sum();
    let mut s = ExactSearch {
        inst,
        order_d1: by_dim(1),
        order_d2: by_dim(2),
        items,
        position,
        loads: vec![(0.0, 0.0); m],
        bins: vec![Vec::new(); m],
        best: f64::NEG_INFINITY,
        best_bins: vec![Vec::new(); m],
        free,
        lp_bound,
        nodes: 0,
        node_cap,
        aborted: false,
        proven: false,
    };
    // greedy incumbent
    s.greedy_incumbent(base);
    s.dfs(0, 0, base);
    let mut bins = s.best_bins.clone();
    bins[0].extend(s.free.iter().copied());
    let solution = Vmk2Solution::new(bins.into_iter().map(Configuration::new).collect());
    Ok(ExactResult {
        profit: solution.profit(inst),
        solution,
        complete: !s.aborted,
        nodes: s.nodes,
    })
}

struct ExactSearch<'a> {
    inst: &'a Vmk2Instance,
    items: Vec<usize>,
    order_d1: Vec<usize>,
    order_d2: Vec<usize>,
    position: Vec<usize>,
    loads: Vec<(f64, f64)>,
    bins: Vec<Vec<usize>>,
    best: f64,
    best_bins: Vec<Vec<usize>>,
    free: Vec<usize>,
    lp_bound: f64,
    nodes: u64,
    node_cap: u64,
    aborted: bool,
    proven: bool,
}

impl ExactSearch<'_> {
    fn greedy_incumbent(&mut self, base: f64) {
        let mut value = base;
        for &i in &self.items {
            let it = self.inst.item(i);
            if let Some(b) = (0..self.loads.len())
                .find(|&b| self.loads[b].0 + it.w1 <= 1.0 + 1e-12 && self.loads[b].1 + it.w2 <= 1.0 + 1e-12)
            {
                self.loads[b].0 += it.w1;
                self.loads[b].1 += it.w2;
                self.bins[b].push(i);
                value += it.profit;
            }
        }
        self.best = value;
        self.best_bins = std::mem::take(&mut self.bins);
        self.bins = vec![Vec::new(); self.loads.len()];
        self.loads.iter_mut().for_each(|l| *l = (0.0, 0.0));
        self.proven = self.best >= self.lp_bound - 1e-9;
    }

    fn fits_somewhere(&self, i: usize) -> bool {
        let it = self.inst.item(i);
        self.loads.iter().any(|&(a, b)| a + it.w1 <= 1.0 + 1e-12 && b + it.w2 <= 1.0 + 1e-12)
    }

    fn bound(&self, k: usize) -> f64 {
        let frac = |order: &[usize], weight: &dyn Fn(usize) -> f64, cap: f64| {
            let mut cap = cap;
            let mut total = 0.0;
            for &i in order {
                if self.position[i] < k || !self.fits_somewhere(i) {
                    continue;
                }
                let w = weight(i);
                let p = self.inst.item(i).profit;
                if w <= cap {
                    cap -= w;
                    total += p;
                } else {
                    total += p * cap / w;
                    break;
                }
            }
            total
        };
        let r1: f64 = self.loads.iter().map(|l| (1.0 - l.0).max(0.0)).sum();
        let r2: f64 = self.loads.iter().map(|l| (1.0 - l.1).max(0.0)).sum();
        let inst = self.inst;
        let agg = frac(&self.items, &|i| inst.item(i).total_weight(), r1 + r2);
        let d1 = frac(&self.order_d1, &|i| inst.item(i).w1, r1);
        let d2 = frac(&self.order_d2, &|i| inst.item(i).w2, r2);
        agg.min(d1).min(d2)
    }

    fn dfs(&mut self, k: usize, opened: usize, value: f64) {
        if self.proven {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.aborted = true;
            return;
        }
        if value > self.best + 1e-12 {
            self.best = value;
            self.best_bins = self.bins.clone();
            if self.best >= self.lp_bound - 1e-9 {
                self.proven = true;
                return;
            }
        }
        if k == self.items.len() || value + self.bound(k) <= self.best + 1e-12 {
            return;
        }
        let i = self.items[k];
        let (w1, w2, p) = {
            let it = self.inst.item(i);
            (it.w1, it.w2, it.profit)
        };
        let limit = (opened + 1).min(self.loads.len());
        for b in 0..limit {
            let (l1, l2) = self.loads[b];
            if l1 + w1 > 1.0 + 1e-12 || l2 + w2 > 1.0 + 1e-12 {
                continue;
            }
            if (0..b).any(|c| self.loads[c] == self.loads[b]) {
                continue;
            }
            self.loads[b] = (l1 + w1, l2 + w2);
            self.bins[b].push(i);
            self.dfs(k + 1, opened.max(b + 1), value + p);
            self.bins[b].pop();
            self.loads[b] = (l1, l2);
            if self.aborted || self.proven {
                return;
            }
        }
        self.dfs(k + 1, opened, value);
    }
}

/// [`solve_exact`] wrapped with a report.
pub fn solve_exact_report(inst: &Vmk2Instance, node_cap: u64) -> Result<(Vmk2Solution, SolveReport, bool)> {
    let started = Instant::now();
    let res = solve_exact(inst, node_cap)?;
    let mut report = SolveReport::new(Algorithm::Exact, inst, &res.solution, started);
    if res.complete {
        report.exact_opt = Some(res.profit);
    }
    Ok((res.solution, report, res.complete))
}
