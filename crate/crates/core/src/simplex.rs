//! Dense revised simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The all-slack basis is feasible, so no phase one is needed. Columns can
//! be appended between solves and the previous basis is reused (column
//! generation warm start). The basis inverse is kept explicitly and
//! refactorized periodically.

const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
/// Consecutive degenerate pivots after which pricing switches to Bland's rule.
const DEGENERATE_SWITCH: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub cost: f64,
    /// `(row, coefficient)` pairs.
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Structural(usize),
    Slack(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct DenseSimplex {
    rows: usize,
    rhs: Vec<f64>,
    columns: Vec<Column>,
    basis: Vec<Var>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl DenseSimplex {
    pub fn new(rhs: Vec<f64>) -> Self {
        assert!(rhs.iter().all(|&b| b >= 0.0), "right-hand side must be nonnegative");
        let rows = rhs.len();
        let mut binv = vec![0.0; rows * rows];
        for r in 0..rows {
            binv[r * rows + r] = 1.0;
        }
        DenseSimplex {
            rows,
            xb: rhs.clone(),
            rhs,
            columns: Vec::new(),
            basis: (0..rows).map(Var::Slack).collect(),
            in_basis: Vec::new(),
            binv,
            pivots: 0,
            since_refactor: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn add_column(&mut self, column: Column) -> usize {
        debug_assert!(column.entries.iter().all(|&(r, _)| r < self.rows));
        self.columns.push(column);
        self.in_basis.push(false);
        self.columns.len() - 1
    }

    fn cost(&self, v: Var) -> f64 {
        match v {
            Var::Structural(j) => self.columns[j].cost,
            Var::Slack(_) => 0.0,
        }
    }

    fn global_index(&self, v: Var) -> usize {
        match v {
            Var::Structural(j) => j,
            Var::Slack(r) => self.columns.len() + r,
        }
    }

    /// Simplex multipliers `y = c_B B^-1`.
    pub fn duals(&self) -> Vec<f64> {
        let n = self.rows;
        let mut y = vec![0.0; n];
        for (i, &v) in self.basis.iter().enumerate() {
            let c = self.cost(v);
            if c != 0.0 {
                let row = &self.binv[i * n..(i + 1) * n];
                for (yj, bij) in y.iter_mut().zip(row) {
                    *yj += c * bij;
                }
            }
        }
        y
    }

    pub fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        let col = &self.columns[j];
        col.cost - col.entries.iter().map(|&(r, a)| y[r] * a).sum::<f64>()
    }

    /// Values of the structural variables.
    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.columns.len()];
        for (i, &v) in self.basis.iter().enumerate() {
            if let Var::Structural(j) = v {
                x[j] = self.xb[i].max(0.0);
            }
        }
        x
    }

    pub fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).map(|(&v, &x)| self.cost(v) * x.max(0.0)).sum()
    }

    /// Runs primal simplex pivots until optimality, unboundedness or
    /// `max_pivots` pivots in this call.
    pub fn solve(&mut self, max_pivots: usize) -> LpStatus {
        let mut degenerate = 0usize;
        for _ in 0..max_pivots {
            let y = self.duals();
            let bland = degenerate >= DEGENERATE_SWITCH;
            let Some(entering) = self.choose_entering(&y, bland) else {
                return LpStatus::Optimal;
            };
            let u = self.ftran(entering);
            let Some(leave) = self.ratio_test(&u) else {
                return LpStatus::Unbounded;
            };
            let step = self.xb[leave] / u[leave];
            if step < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(entering, leave, &u, step);
        }
        LpStatus::IterationLimit
    }

    fn choose_entering(&self, y: &[f64], bland: bool) -> Option<Var> {
        let mut best: Option<(Var, f64)> = None;
        let candidates = (0..self.columns.len())
            .filter(|&j| !self.in_basis[j])
            .map(|j| (Var::Structural(j), self.reduced_cost(j, y)))
            .chain(
                (0..self.rows)
                    .filter(|&r| !self.basis.contains(&Var::Slack(r)))
                    .map(|r| (Var::Slack(r), -y[r])),
            );
        for (v, d) in candidates {
            if d <= OPT_TOL {
                continue;
            }
            if bland {
                // candidates are produced in increasing global index order
                return Some(v);
            }
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((v, d));
            }
        }
        best.map(|(v, _)| v)
    }

    /// `B^-1 a_q` for the entering variable.
    fn ftran(&self, v: Var) -> Vec<f64> {
        let n = self.rows;
        let mut u = vec![0.0; n];
        match v {
            Var::Structural(j) => {
                for &(r, a) in &self.columns[j].entries {
                    for (i, ui) in u.iter_mut().enumerate() {
                        *ui += self.binv[i * n + r] * a;
                    }
                }
            }
            Var::Slack(r) => {
                for (i, ui) in u.iter_mut().enumerate() {
                    *ui = self.binv[i * n + r];
                }
            }
        }
        u
    }

    /// Minimum ratio row; ties go to the basic variable of smallest index.
    fn ratio_test(&self, u: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &ui) in u.iter().enumerate() {
            if ui <= PIVOT_TOL {
                continue;
            }
            let t = self.xb[i].max(0.0) / ui;
            best = match best {
                None => Some((i, t)),
                Some((bi, bt)) => {
                    if t < bt - 1e-12
                        || (t <= bt + 1e-12 && self.global_index(self.basis[i]) < self.global_index(self.basis[bi]))
                    {
                        Some((i, t))
                    } else {
                        Some((bi, bt))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, entering: Var, leave: usize, u: &[f64], step: f64) {
        let n = self.rows;
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != leave {
                *x -= step * u[i];
                if x.abs() < 1e-13 {
                    *x = 0.0;
                }
            }
        }
        self.xb[leave] = step;

        let pr = u[leave];
        for k in 0..n {
            self.binv[leave * n + k] /= pr;
        }
        for (i, &f) in u.iter().enumerate() {
            if i == leave || f == 0.0 {
                continue;
            }
            for k in 0..n {
                self.binv[i * n + k] -= f * self.binv[leave * n + k];
            }
        }

        if let Var::Structural(j) = self.basis[leave] {
            self.in_basis[j] = false;
        }
        if let Var::Structural(j) = entering {
            self.in_basis[j] = true;
        }
        self.basis[leave] = entering;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Recomputes `B^-1` and the basic solution from scratch.
    pub fn refactor(&mut self) {
        let n = self.rows;
        let mut a = vec![0.0; n * n];
        for (c, &v) in self.basis.iter().enumerate() {
            match v {
                Var::Structural(j) => {
                    for &(r, val) in &self.columns[j].entries {
                        a[r * n + c] += val;
                    }
                }
                Var::Slack(r) => a[r * n + c] = 1.0,
            }
        }
        if let Some(inv) = invert(&a, n) {
            self.binv = inv;
            for i in 0..n {
                let row = &self.binv[i * n..(i + 1) * n];
                let x: f64 = row.iter().zip(&self.rhs).map(|(b, r)| b * r).sum();
                self.xb[i] = if x.abs() < 1e-13 { 0.0 } else { x };
            }
        }
        self.since_refactor = 0;
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `n x n` matrix.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))?;
        if m[p * n + col].abs() < 1e-12 {
            return None;
        }
        if p != col {
            for k in 0..n {
                m.swap(p * n + k, col * n + k);
                inv.swap(p * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        m[r * n + k] -= f * m[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngHandle;

    fn dense_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> DenseSimplex {
        let mut lp = DenseSimplex::new(b.to_vec());
        for (j, &cj) in c.iter().enumerate() {
            let entries = a.iter().enumerate().filter(|(_, row)| row[j] != 0.0).map(|(r, row)| (r, row[j])).collect();
            lp.add_column(Column { cost: cj, entries });
        }
        lp
    }

    /// Optimum by enumerating every vertex of a 2-variable polygon.
    fn vertex_oracle(c: &[f64; 2], a: &[Vec<f64>], b: &[f64]) -> f64 {
        let mut lines: Vec<([f64; 2], f64)> = a.iter().zip(b).map(|(r, &bi)| ([r[0], r[1]], bi)).collect();
        lines.push(([-1.0, 0.0], 0.0));
        lines.push(([0.0, -1.0], 0.0));
        let mut best = f64::NEG_INFINITY;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ([a1, b1], c1) = lines[i];
                let ([a2, b2], c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if lines.iter().all(|&([p, q], r)| p * x + q * y <= r + 1e-9) {
                    best = best.max(c[0] * x + c[1] * y);
                }
            }
        }
        best
    }

    #[test]
    fn textbook_lp() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0]];
        let mut lp = dense_lp(&[3.0, 2.0], &a, &[4.0, 6.0, 3.0]);
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert!((lp.objective() - 11.0).abs() < 1e-9);
        let x = lp.primal();
        assert!((x[0] - 3.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
        let y = lp.duals();
        let dual_obj: f64 = y.iter().zip([4.0, 6.0, 3.0]).map(|(y, b)| y * b).sum();
        assert!((dual_obj - 11.0).abs() < 1e-9);
        assert!(y.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = dense_lp(&[1.0, 1.0], &[vec![1.0, -1.0]], &[1.0]);
        assert_eq!(lp.solve(100), LpStatus::Unbounded);
    }

    #[test]
    fn random_two_variable_lps_match_vertex_enumeration() {
        let mut rng = RngHandle::new(3);
        for _ in 0..200 {
            let c = [rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0)];
            let rows = 2 + rng.below(4);
            // first row keeps the polygon bounded
            let mut a = vec![vec![rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)]];
            for _ in 1..rows {
                a.push(vec![rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0)]);
            }
            let b: Vec<f64> = (0..rows).map(|_| rng.uniform(0.0, 3.0)).collect();
            let mut lp = dense_lp(&c, &a, &b);
            assert_eq!(lp.solve(1000), LpStatus::Optimal);
            let want = vertex_oracle(&c, &a, &b);
            assert!((lp.objective() - want).abs() < 1e-7, "{} vs {want}", lp.objective());
        }
    }

    #[test]
    fn warm_start_after_adding_columns() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 3.0]];
        let mut lp = dense_lp(&[1.0, 1.0], &a, &[4.0, 6.0]);
        lp.solve(100);
        assert!((lp.objective() - 4.0).abs() < 1e-9);
        lp.add_column(Column {
            cost: 3.0,
            entries: vec![(0, 1.0)],
        });
        assert_eq!(lp.solve(100), LpStatus::Optimal);
        assert!((lp.objective() - 12.0).abs() < 1e-9);
        lp.refactor();
        assert!((lp.objective() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_lp_terminates() {
        // many tied ratios at the origin
        let a = vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0], vec![-1.0, 0.0, 1.0]];
        let mut lp = dense_lp(&[1.0, 1.0, 1.0], &a, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(lp.solve(1000), LpStatus::Optimal);
        assert!((lp.objective() - 1.0).abs() < 1e-9);
    }
}
