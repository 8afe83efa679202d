//! Dense revised simplex for `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Columns are stored sparse, the basis inverse dense. Problems here have at
//! most a few hundred rows, so an explicit `B⁻¹` with product-form updates and
//! periodic Gauss–Jordan refactorization is both simple and fast enough.
//!
//! Pricing is Dantzig (most negative reduced cost, lowest index on ties) and
//! switches to Bland's rule after a run of degenerate pivots, which rules out
//! cycling. Every choice is index-ordered, so repeated solves of the same
//! program return the same vertex.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const RC_TOL: f64 = 1e-11;
const RATIO_TIE: f64 = 1e-12;
const DEGENERATE_RUN: usize = 64;
const REFACTOR_EVERY: usize = 64;

/// Sparse column: `(row, coefficient)` pairs.
pub type Column = Vec<(usize, f64)>;

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    rows: usize,
    columns: Vec<Column>,
    costs: Vec<f64>,
    rhs: Vec<f64>,
}

/// Basic column per row; indices `>= num_columns()` are artificial slacks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis(pub Vec<usize>);

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y` with reduced costs `c_j - y·A_j ≥ 0` at optimality.
    pub duals: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(rows: usize, rhs: Vec<f64>) -> LinearProgram {
        assert_eq!(rows, rhs.len(), "rhs length must equal row count");
        LinearProgram {
            rows,
            columns: Vec::new(),
            costs: Vec::new(),
            rhs,
        }
    }

    /// Appends a column and returns its index. Duplicate rows are summed.
    pub fn add_column(&mut self, cost: f64, mut entries: Column) -> usize {
        entries.sort_by_key(|&(r, _)| r);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        debug_assert!(entries.iter().all(|&(r, _)| r < self.rows));
        self.columns.push(entries);
        self.costs.push(cost);
        self.columns.len() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn set_costs(&mut self, costs: Vec<f64>) {
        assert_eq!(costs.len(), self.columns.len());
        self.costs = costs;
    }

    /// Same constraints, restricted to the listed columns (in that order).
    pub fn restrict(&self, keep: &[usize]) -> LinearProgram {
        LinearProgram {
            rows: self.rows,
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            costs: keep.iter().map(|&j| self.costs[j]).collect(),
            rhs: self.rhs.clone(),
        }
    }

    pub fn reduced_costs(&self, duals: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .zip(&self.costs)
            .map(|(col, &c)| c - col.iter().map(|&(r, a)| duals[r] * a).sum::<f64>())
            .collect()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let mut t = Tableau::cold(self);
        t.run(Phase::One)?;
        let infeasibility: f64 = t
            .basis
            .iter()
            .zip(&t.xb)
            .filter(|(&j, _)| j >= self.columns.len())
            .map(|(_, &v)| v)
            .sum();
        let scale = 1.0 + self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if infeasibility > FEAS_TOL * scale {
            return Err(Error::Infeasible);
        }
        t.drive_out_artificials();
        t.run(Phase::Two)?;
        Ok(t.solution())
    }

    /// Phase II from a basis that is primal feasible for these constraints.
    /// Falls back to a cold start when the basis is singular or infeasible.
    pub fn solve_warm(&self, basis: &Basis) -> Result<LpSolution> {
        match Tableau::warm(self, basis) {
            Some(mut t) => {
                t.run(Phase::Two)?;
                Ok(t.solution())
            }
            None => self.solve(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Tableau<'a> {
    lp: &'a LinearProgram,
    signs: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl<'a> Tableau<'a> {
    fn cold(lp: &'a LinearProgram) -> Tableau<'a> {
        let m = lp.rows;
        let signs: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let rhs: Vec<f64> = lp.rhs.iter().zip(&signs).map(|(b, s)| b * s).collect();
        let n = lp.columns.len();
        let mut is_basic = vec![false; n + m];
        let basis: Vec<usize> = (0..m).map(|i| n + i).collect();
        for &j in &basis {
            is_basic[j] = true;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Tableau {
            lp,
            signs,
            xb: rhs.clone(),
            rhs,
            basis,
            is_basic,
            binv,
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn warm(lp: &'a LinearProgram, basis: &Basis) -> Option<Tableau<'a>> {
        let m = lp.rows;
        let n = lp.columns.len();
        if basis.0.len() != m || basis.0.iter().any(|&j| j >= n + m) {
            return None;
        }
        let mut t = Tableau::cold(lp);
        t.is_basic = vec![false; n + m];
        for &j in &basis.0 {
            if t.is_basic[j] {
                return None;
            }
            t.is_basic[j] = true;
        }
        t.basis = basis.0.clone();
        if !t.refactor() {
            return None;
        }
        let scale = 1.0 + t.rhs.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        let feasible = t.xb.iter().all(|&v| v >= -FEAS_TOL * scale)
            && t.basis
                .iter()
                .zip(&t.xb)
                .all(|(&j, &v)| j < n || v.abs() <= FEAS_TOL * scale);
        feasible.then_some(t)
    }

    fn m(&self) -> usize {
        self.lp.rows
    }

    fn n(&self) -> usize {
        self.lp.columns.len()
    }

    fn cost(&self, j: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if j >= self.n() {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if j >= self.n() {
                    0.0
                } else {
                    self.lp.costs[j]
                }
            }
        }
    }

    /// `B⁻¹ A_j` for a real or artificial column.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        let mut alpha = vec![0.0; m];
        if j >= self.n() {
            let r = j - self.n();
            for (i, a) in alpha.iter_mut().enumerate() {
                *a = self.binv[i * m + r];
            }
        } else {
            for &(r, a) in &self.lp.columns[j] {
                let a = a * self.signs[r];
                for (i, out) in alpha.iter_mut().enumerate() {
                    *out += self.binv[i * m + r] * a;
                }
            }
        }
        alpha
    }

    fn duals(&self, phase: Phase) -> Vec<f64> {
        let m = self.m();
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = self.cost(j, phase);
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, &b) in y.iter_mut().zip(row) {
                    *yk += cb * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase: Phase) -> f64 {
        let dot: f64 = self.lp.columns[j].iter().map(|&(r, a)| y[r] * a * self.signs[r]).sum();
        self.cost(j, phase) - dot
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[f64]) {
        let m = self.m();
        let piv = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r && alpha[i] != 0.0 {
                let f = alpha[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.since_refactor += 1;
    }

    /// Rebuilds `B⁻¹` and `x_B` from the basis. Returns false if singular.
    fn refactor(&mut self) -> bool {
        let m = self.m();
        let mut b = vec![0.0; m * m];
        for (i, &j) in self.basis.iter().enumerate() {
            if j >= self.n() {
                b[(j - self.n()) * m + i] = 1.0;
            } else {
                for &(r, a) in &self.lp.columns[j] {
                    b[r * m + i] = a * self.signs[r];
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut best = col;
            for row in col + 1..m {
                if b[row * m + col].abs() > b[best * m + col].abs() {
                    best = row;
                }
            }
            if b[best * m + col].abs() < 1e-12 {
                return false;
            }
            if best != col {
                for k in 0..m {
                    b.swap(best * m + k, col * m + k);
                    inv.swap(best * m + k, col * m + k);
                }
            }
            let p = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for row in 0..m {
                if row != col {
                    let f = b[row * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            b[row * m + k] -= f * b[col * m + k];
                            inv[row * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        for i in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[i * m + k] * self.rhs[k]).sum();
            self.xb[i] = if v < 0.0 && v > -FEAS_TOL { 0.0 } else { v };
        }
        self.since_refactor = 0;
        true
    }

    fn run(&mut self, phase: Phase) -> Result<()> {
        let limit = 50 * (self.m() + self.n()) + 10_000;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            self.iterations += 1;
            if self.iterations > limit {
                return Err(Error::IterationLimit(limit));
            }
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return Err(Error::DomainError("singular simplex basis".into()));
            }
            let y = self.duals(phase);
            let mut entering = None;
            let mut best = -RC_TOL;
            for j in 0..self.n() {
                if self.is_basic[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y, phase);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let alpha = self.ftran(q);

            let mut leave: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                let artificial = self.basis[i] >= self.n();
                let ratio = if phase == Phase::Two && artificial && a.abs() > PIVOT_TOL {
                    0.0
                } else if a > PIVOT_TOL {
                    self.xb[i].max(0.0) / a
                } else {
                    continue;
                };
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        if ratio < best_ratio - RATIO_TIE {
                            Some((i, ratio))
                        } else if ratio <= best_ratio + RATIO_TIE {
                            let better = if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                a.abs() > alpha[r].abs()
                            };
                            if better {
                                Some((i, ratio.min(best_ratio)))
                            } else {
                                Some((r, best_ratio.min(ratio)))
                            }
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return match phase {
                    Phase::Two => Err(Error::Unbounded),
                    Phase::One => Err(Error::DomainError("phase one unbounded".into())),
                };
            };

            for (i, &a) in alpha.iter().enumerate() {
                if i != r {
                    self.xb[i] -= theta * a;
                    if self.xb[i] < 0.0 && self.xb[i] > -FEAS_TOL {
                        self.xb[i] = 0.0;
                    }
                }
            }
            self.xb[r] = theta;
            self.pivot(r, q, &alpha);

            if theta <= RATIO_TIE {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
        }
    }

    /// Pivots zero-valued artificials out of the basis where a real column
    /// can replace them. Artificials left behind sit on redundant rows.
    fn drive_out_artificials(&mut self) {
        let m = self.m();
        for r in 0..m {
            if self.basis[r] < self.n() {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let candidate = (0..self.n()).find(|&j| {
                !self.is_basic[j]
                    && self.lp.columns[j]
                        .iter()
                        .map(|&(k, a)| row[k] * a * self.signs[k])
                        .sum::<f64>()
                        .abs()
                        > 1e-7
            });
            if let Some(j) = candidate {
                let alpha = self.ftran(j);
                let theta = self.xb[r] / alpha[r];
                for (i, &a) in alpha.iter().enumerate() {
                    if i != r {
                        self.xb[i] -= theta * a;
                    }
                }
                self.xb[r] = theta;
                self.pivot(r, j, &alpha);
            }
        }
        self.refactor();
    }

    fn solution(mut self) -> LpSolution {
        self.refactor();
        let n = self.n();
        let mut x = vec![0.0; n];
        for (&j, &v) in self.basis.iter().zip(&self.xb) {
            if j < n {
                x[j] = v.max(0.0);
            }
        }
        let objective = x.iter().zip(&self.lp.costs).map(|(a, c)| a * c).sum();
        let duals = self
            .duals(Phase::Two)
            .iter()
            .zip(&self.signs)
            .map(|(y, s)| y * s)
            .collect();
        LpSolution {
            x,
            objective,
            duals,
            basis: Basis(self.basis),
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let mut lp = LinearProgram::new(2, vec![4.0, 6.0]);
        lp.add_column(-1.0, vec![(0, 1.0), (1, 3.0)]);
        lp.add_column(-1.0, vec![(0, 2.0), (1, 1.0)]);
        lp.add_column(0.0, vec![(0, 1.0)]);
        lp.add_column(0.0, vec![(1, 1.0)]);
        let sol = lp.solve().unwrap();
        assert!((sol.objective + 2.8).abs() < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12);
        assert!((sol.x[1] - 1.2).abs() < 1e-12);
        let rc = lp.reduced_costs(&sol.duals);
        assert!(rc.iter().all(|&d| d > -1e-12));
    }

    #[test]
    fn detects_infeasible() {
        // x = 1 and x = 2
        let mut lp = LinearProgram::new(2, vec![1.0, 2.0]);
        lp.add_column(0.0, vec![(0, 1.0), (1, 1.0)]);
        assert_eq!(lp.solve().unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x  s.t. x - y = 0
        let mut lp = LinearProgram::new(1, vec![0.0]);
        lp.add_column(-1.0, vec![(0, 1.0)]);
        lp.add_column(0.0, vec![(0, -1.0)]);
        assert_eq!(lp.solve().unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // 2x2 transportation: 4 equality rows, rank 3.
        let mut lp = LinearProgram::new(4, vec![0.5, 0.5, 0.5, 0.5]);
        let cost = [[0.0, 1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                lp.add_column(cost[i][j], vec![(i, 1.0), (2 + j, 1.0)]);
            }
        }
        let sol = lp.solve().unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!((sol.x[0] - 0.5).abs() < 1e-12 && (sol.x[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x  s.t. -x = -3
        let mut lp = LinearProgram::new(1, vec![-3.0]);
        lp.add_column(1.0, vec![(0, -1.0)]);
        let sol = lp.solve().unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.duals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn warm_start_reaches_same_optimum() {
        let mut lp = LinearProgram::new(2, vec![4.0, 6.0]);
        lp.add_column(-1.0, vec![(0, 1.0), (1, 3.0)]);
        lp.add_column(-1.0, vec![(0, 2.0), (1, 1.0)]);
        lp.add_column(0.0, vec![(0, 1.0)]);
        lp.add_column(0.0, vec![(1, 1.0)]);
        let first = lp.solve().unwrap();
        lp.set_costs(vec![-1.0, -3.0, 0.0, 0.0]);
        let warm = lp.solve_warm(&first.basis).unwrap();
        let cold = lp.solve().unwrap();
        assert!((warm.objective - cold.objective).abs() < 1e-12);
        assert!((warm.objective + 6.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_on_degenerate_problem() {
        let build = || {
            let n = 4;
            let mut lp = LinearProgram::new(2 * n, vec![0.25; 2 * n]);
            for i in 0..n {
                for j in 0..n {
                    lp.add_column(((i + j) % 2) as f64, vec![(i, 1.0), (n + j, 1.0)]);
                }
            }
            lp
        };
        let a = build().solve().unwrap();
        let b = build().solve().unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.basis, b.basis);
    }
}
