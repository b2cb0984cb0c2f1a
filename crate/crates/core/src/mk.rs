//! One-dimensional machinery: associated multiple knapsack (MK) instances,
//! the two-way split of a 2-D configuration, exact and heuristic MK
//! solvers, and 2-D First-Fit.
//!
//! The `k`-associated MK instance of a 2VMK instance keeps items and
//! profits, uses `w'(i) = max(w1(i), w2(i))` as the weight and has `k·m`
//! unit bins. Every MK-feasible bin is 2-D feasible, and every 2-D
//! configuration splits into two MK-feasible bins by the dominant weight
//! coordinate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{density, Configuration, Vmk2Instance, TAU_FEAS};

pub const DEFAULT_MK_NODE_CAP: u64 = 20_000_000;

const MAX_LOCAL_MOVES: usize = 100_000;
const FIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MkItem {
    /// Caller-chosen identifier; for associated instances, the item's index
    /// in the originating 2VMK instance.
    pub id: usize,
    pub weight: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MkInstance {
    items: Vec<MkItem>,
    bins: usize,
}

impl MkInstance {
    pub fn new(items: Vec<MkItem>, bins: usize) -> Result<Self> {
        for it in &items {
            if !(0.0..=1.0).contains(&it.weight) {
                return Err(Error::validation(Some(&it.id.to_string()), "weight", format!("{} outside [0, 1]", it.weight)));
            }
            if !(it.profit.is_finite() && it.profit >= 0.0) {
                return Err(Error::validation(Some(&it.id.to_string()), "p", "profit must be finite and nonnegative"));
            }
        }
        let mut ids: Vec<usize> = items.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation(None, "id", "duplicate MK item id"));
        }
        Ok(MkInstance { items, bins })
    }

    pub fn items(&self) -> &[MkItem] {
        &self.items
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    fn position_of(&self, id: usize) -> Option<usize> {
        self.items.iter().position(|i| i.id == id)
    }
}

/// Item ids per bin. Associated instances use 2VMK item indices as ids.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MkSolution {
    pub bins: Vec<Vec<usize>>,
}

impl MkSolution {
    pub fn empty(bins: usize) -> Self {
        MkSolution {
            bins: vec![Vec::new(); bins],
        }
    }

    pub fn profit(&self, mk: &MkInstance) -> f64 {
        let mut ids: Vec<usize> = self.bins.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        ids.iter()
            .filter_map(|&id| mk.position_of(id))
            .map(|p| mk.items[p].profit)
            .sum()
    }

    pub fn is_feasible(&self, mk: &MkInstance) -> bool {
        self.bins.len() == mk.bins
            && self.bins.iter().all(|b| {
                b.iter()
                    .map(|&id| mk.position_of(id).map_or(f64::INFINITY, |p| mk.items[p].weight))
                    .sum::<f64>()
                    <= 1.0 + TAU_FEAS
            })
    }

    /// Bins as 2-D configurations, when ids are 2VMK item indices.
    pub fn lift(&self) -> Vec<Configuration> {
        self.bins.iter().map(|b| Configuration::new(b.iter().copied())).collect()
    }

    /// Sorts ids within bins and orders bins by smallest id, empty bins last.
    fn canonicalize(&mut self) {
        for b in &mut self.bins {
            b.sort_unstable();
        }
        self.bins.sort_by_key(|b| b.first().copied().unwrap_or(usize::MAX));
    }
}

/// The `k`-associated MK instance with `k·m` bins.
pub fn associate(inst: &Vmk2Instance, k: usize) -> Result<MkInstance> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let all: Vec<usize> = (0..inst.len()).collect();
    associate_subset(inst, &all, k * inst.m())
}

/// MK instance on a subset of items with an explicit bin count (zero allowed).
pub fn associate_subset(inst: &Vmk2Instance, items: &[usize], bins: usize) -> Result<MkInstance> {
    MkInstance::new(
        items
            .iter()
            .map(|&i| {
                let it = inst.item(i);
                MkItem {
                    id: i,
                    weight: it.max_weight(),
                    profit: it.profit,
                }
            })
            .collect(),
        bins,
    )
}

/// Splits a feasible configuration into the items with `w1 >= w2` and
/// those with `w1 < w2`. Each part has associated weight at most 1.
pub fn split_configuration(inst: &Vmk2Instance, c: &Configuration) -> Result<(Configuration, Configuration)> {
    let (l1, l2) = c.load(inst);
    for (dimension, load) in [(1, l1), (2, l2)] {
        if load > 1.0 + TAU_FEAS {
            return Err(Error::InfeasibleInput { dimension, load });
        }
    }
    let (first, second): (Vec<usize>, Vec<usize>) = c.iter().partition(|&i| inst.item(i).w1 >= inst.item(i).w2);
    Ok((Configuration::new(first), Configuration::new(second)))
}

/// Associated weight `Σ max(w1, w2)` of a configuration.
pub fn associated_weight(inst: &Vmk2Instance, c: &Configuration) -> f64 {
    c.iter().map(|i| inst.item(i).max_weight()).sum()
}

/// Positions of the items in decreasing `p / w` order; ties prefer higher
/// profit, then smaller id.
fn density_order(mk: &MkInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mk.items.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&mk.items[a], &mk.items[b]);
        density(ib.profit, ib.weight)
            .total_cmp(&density(ia.profit, ia.weight))
            .then(ib.profit.total_cmp(&ia.profit))
            .then(ia.id.cmp(&ib.id))
    });
    order
}

/// Exact MK by depth-first assignment with bin symmetry breaking and a
/// fractional-knapsack bound over the total residual capacity.
pub fn solve_mk_exact(mk: &MkInstance, node_cap: u64) -> Result<MkSolution> {
    if mk.bins == 0 {
        return Ok(MkSolution::empty(0));
    }
    let order: Vec<usize> = density_order(mk)
        .into_iter()
        .filter(|&p| mk.items[p].profit > 0.0 || mk.items[p].weight == 0.0)
        .collect();
    let (free, search_items): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&p| mk.items[p].weight == 0.0);

    let incumbent = solve_mk_heuristic(mk);
    let mut search = MkSearch {
        mk,
        items: search_items,
        loads: vec![0.0; mk.bins],
        assign: Vec::new(),
        best: incumbent.profit(mk),
        best_solution: incumbent,
        base: free.iter().map(|&p| mk.items[p].profit).sum(),
        nodes: 0,
        node_cap,
        aborted: false,
    };
    let root_bound = search.base + search.bound(0);
    search.dfs(0, 0, search.base);

    let mut sol = search.best_solution;
    sol.canonicalize();
    if search.aborted {
        return Err(Error::MkBudgetExceeded {
            nodes: search.nodes,
            upper_bound: root_bound.max(search.best),
            best: Box::new(sol),
        });
    }
    Ok(sol)
}

struct MkSearch<'a> {
    mk: &'a MkInstance,
    items: Vec<usize>,
    loads: Vec<f64>,
    assign: Vec<(usize, usize)>,
    best: f64,
    best_solution: MkSolution,
    base: f64,
    nodes: u64,
    node_cap: u64,
    aborted: bool,
}

impl MkSearch<'_> {
    fn bound(&self, k: usize) -> f64 {
        let max_room = self.loads.iter().map(|l| 1.0 - l).fold(0.0, f64::max);
        let mut cap: f64 = self.loads.iter().map(|l| (1.0 - l).max(0.0)).sum();
        let mut total = 0.0;
        for &p in &self.items[k..] {
            let it = &self.mk.items[p];
            if it.weight > max_room + FIT_TOL {
                continue;
            }
            if it.weight <= cap {
                cap -= it.weight;
                total += it.profit;
            } else {
                total += it.profit * cap / it.weight;
                break;
            }
        }
        total
    }

    fn record(&mut self, value: f64) {
        if value > self.best + 1e-12 {
            self.best = value;
            let mut sol = MkSolution::empty(self.mk.bins);
            for p in self.items_free() {
                sol.bins[0].push(self.mk.items[p].id);
            }
            for &(p, b) in &self.assign {
                sol.bins[b].push(self.mk.items[p].id);
            }
            self.best_solution = sol;
        }
    }

    fn items_free(&self) -> Vec<usize> {
        (0..self.mk.items.len()).filter(|&p| self.mk.items[p].weight == 0.0).collect()
    }

    fn dfs(&mut self, k: usize, opened: usize, value: f64) {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.aborted = true;
            return;
        }
        self.record(value);
        if k == self.items.len() || value + self.bound(k) <= self.best + 1e-12 {
            return;
        }
        let p = self.items[k];
        let (w, profit) = (self.mk.items[p].weight, self.mk.items[p].profit);
        let limit = (opened + 1).min(self.mk.bins);
        for b in 0..limit {
            if self.loads[b] + w > 1.0 + FIT_TOL {
                continue;
            }
            // bins with equal load are interchangeable
            if (0..b).any(|c| (self.loads[c] - self.loads[b]).abs() < 1e-15) {
                continue;
            }
            self.loads[b] += w;
            self.assign.push((p, b));
            self.dfs(k + 1, opened.max(b + 1), value + profit);
            self.assign.pop();
            self.loads[b] -= w;
            if self.aborted {
                return;
            }
        }
        self.dfs(k + 1, opened, value);
    }
}

/// First-fit decreasing by density followed by insert / swap / move
/// local search. Every accepted move strictly increases profit.
pub fn solve_mk_heuristic(mk: &MkInstance) -> MkSolution {
    let bins = mk.bins;
    if bins == 0 {
        return MkSolution::empty(0);
    }
    let n = mk.items.len();
    // where[p] = bin of item position p
    let mut place: Vec<Option<usize>> = vec![None; n];
    let mut loads = vec![0.0; bins];
    let order = density_order(mk);
    for &p in &order {
        let w = mk.items[p].weight;
        if w == 0.0 {
            place[p] = Some(0);
            continue;
        }
        if mk.items[p].profit <= 0.0 {
            continue;
        }
        if let Some(b) = (0..bins).find(|&b| loads[b] + w <= 1.0 + FIT_TOL) {
            loads[b] += w;
            place[p] = Some(b);
        }
    }

    let weight = |p: usize| mk.items[p].weight;
    let profit = |p: usize| mk.items[p].profit;
    let mut moves = 0;
    'search: while moves < MAX_LOCAL_MOVES {
        for &u in &order {
            if place[u].is_some() || profit(u) <= 0.0 {
                continue;
            }
            // insert
            if let Some(b) = (0..bins).find(|&b| loads[b] + weight(u) <= 1.0 + FIT_TOL) {
                loads[b] += weight(u);
                place[u] = Some(b);
                moves += 1;
                continue 'search;
            }
            for x in 0..n {
                let Some(b) = place[x] else { continue };
                // swap a cheaper packed item out for u
                if profit(u) > profit(x) + 1e-12 && loads[b] - weight(x) + weight(u) <= 1.0 + FIT_TOL {
                    loads[b] += weight(u) - weight(x);
                    place[x] = None;
                    place[u] = Some(b);
                    moves += 1;
                    continue 'search;
                }
                // move x elsewhere to make room for u
                if loads[b] - weight(x) + weight(u) <= 1.0 + FIT_TOL {
                    if let Some(b2) = (0..bins).find(|&b2| b2 != b && loads[b2] + weight(x) <= 1.0 + FIT_TOL) {
                        loads[b2] += weight(x);
                        place[x] = Some(b2);
                        loads[b] += weight(u) - weight(x);
                        place[u] = Some(b);
                        moves += 1;
                        continue 'search;
                    }
                }
            }
        }
        break;
    }

    let mut sol = MkSolution::empty(bins);
    for (p, b) in place.iter().enumerate() {
        if let Some(b) = b {
            sol.bins[*b].push(mk.items[p].id);
        }
    }
    sol.canonicalize();
    sol
}

/// Exact when the instance is small, heuristic otherwise.
pub fn solve_mk_auto(mk: &MkInstance) -> MkSolution {
    if mk.items.len() <= 18 || mk.bins <= 2 {
        match solve_mk_exact(mk, DEFAULT_MK_NODE_CAP) {
            Ok(s) => s,
            Err(Error::MkBudgetExceeded { best, .. }) => *best,
            Err(_) => solve_mk_heuristic(mk),
        }
    } else {
        solve_mk_heuristic(mk)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FirstFitOrder {
    Given,
    /// Decreasing `p / (w1 + w2)`; ties prefer higher profit, then smaller id.
    ByDensityDesc,
}

/// 2-D First-Fit of `items` (instance indices) into as many unit bins as needed.
pub fn first_fit_2d(inst: &Vmk2Instance, items: &[usize], order: FirstFitOrder) -> Vec<Configuration> {
    let mut seq = items.to_vec();
    if order == FirstFitOrder::ByDensityDesc {
        seq.sort_by(|&a, &b| {
            let (ia, ib) = (inst.item(a), inst.item(b));
            ib.density()
                .total_cmp(&ia.density())
                .then(ib.profit.total_cmp(&ia.profit))
                .then(a.cmp(&b))
        });
    }
    let mut bins: Vec<(Vec<usize>, f64, f64)> = Vec::new();
    for i in seq {
        let it = inst.item(i);
        match bins
            .iter_mut()
            .find(|(_, l1, l2)| *l1 + it.w1 <= 1.0 + FIT_TOL && *l2 + it.w2 <= 1.0 + FIT_TOL)
        {
            Some((b, l1, l2)) => {
                b.push(i);
                *l1 += it.w1;
                *l2 += it.w2;
            }
            None => bins.push((vec![i], it.w1, it.w2)),
        }
    }
    bins.into_iter().map(|(b, _, _)| Configuration::new(b)).collect()
}
