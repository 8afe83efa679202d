//! Primal transportation simplex (MODI / stepping-stone) on a spanning-tree
//! basis.
//!
//! Costs are lexicographic pairs `(infinite arcs, finite cost)`: an infinite
//! arc costs `(1, 0)` and a finite arc `(0, c)`. Minimizing lexicographically
//! first drives mass off infinite arcs and then minimizes the finite cost,
//! which is exactly "remove ∞ arcs, report infeasibility if needed" without a
//! separate phase.

use crate::error::{Error, Result};
use crate::ext::Ext;

const FLOW_TOL: f64 = 1e-15;
const RC_TOL: f64 = 1e-12;
const DEGENERATE_RUN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Lex(f64, f64);

impl Lex {
    fn of(c: Ext) -> Lex {
        match c {
            Ext::Finite(x) => Lex(0.0, x),
            Ext::Infinite => Lex(1.0, 0.0),
        }
    }

    fn sub(self, o: Lex) -> Lex {
        Lex(self.0 - o.0, self.1 - o.1)
    }

    fn add(self, o: Lex) -> Lex {
        Lex(self.0 + o.0, self.1 + o.1)
    }

    fn is_negative(self) -> bool {
        // The first component is an integer combination, so exact.
        self.0 < -0.5 || (self.0.abs() < 0.5 && self.1 < -RC_TOL)
    }

    fn less(self, o: Lex) -> bool {
        self.0 < o.0 - 0.5 || ((self.0 - o.0).abs() < 0.5 && self.1 < o.1)
    }
}

/// Basic flows of an optimal basis: `(row, column, mass)` with zero flows
/// dropped. `infinite_mass` is the mass forced onto infinite arcs.
pub(crate) struct TransportSolution {
    pub flows: Vec<(usize, usize, f64)>,
    pub infinite_mass: f64,
}

/// Solves the balanced transportation problem `supply × demand` with
/// `cost(i, j)`. Both vectors must be positive and carry equal totals.
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: impl Fn(usize, usize) -> Ext) -> Result<TransportSolution> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::InvalidMeasure("empty marginal".into()));
    }
    let costs: Vec<Lex> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| Lex::of(cost(i, j)))
        .collect();
    let c = |i: usize, j: usize| costs[i * n + j];

    let mut basis = northwest_corner(supply, demand);
    let mut in_basis = vec![false; m * n];
    for b in &basis {
        in_basis[b.0 * n + b.1] = true;
    }

    let mut pivots = 0;
    let mut degenerate_run = 0;
    let mut bland = false;
    let limit = 200 * (m + n) * (m + n) + 10_000;
    loop {
        let (u, v) = potentials(&basis, m, n, &c);
        let mut entering: Option<(usize, usize, Lex)> = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if in_basis[i * n + j] {
                    continue;
                }
                let rc = c(i, j).sub(u[i].add(v[j]));
                if rc.is_negative() && entering.is_none_or(|(_, _, best)| rc.less(best)) {
                    entering = Some((i, j, rc));
                    if bland {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej, _)) = entering else {
            break;
        };
        pivots += 1;
        if pivots > limit {
            return Err(Error::IterationLimit(limit));
        }

        let path = tree_path(&basis, m, n, ei, ej);
        // Path cells alternate − + − … starting next to row `ei`.
        let mut leave: Option<usize> = None;
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let (fl, fc) = (basis[l].2, basis[cell].2);
                        fc < fl - FLOW_TOL
                            || (fc <= fl + FLOW_TOL && (basis[cell].0, basis[cell].1) < (basis[l].0, basis[l].1))
                    }
                };
                if better {
                    leave = Some(cell);
                }
            }
        }
        let leave = leave.expect("cycle has a decreasing cell");
        let theta = basis[leave].2.max(0.0);
        for (k, &cell) in path.iter().enumerate() {
            if k % 2 == 0 {
                basis[cell].2 = (basis[cell].2 - theta).max(0.0);
            } else {
                basis[cell].2 += theta;
            }
        }
        let (li, lj, _) = basis[leave];
        in_basis[li * n + lj] = false;
        in_basis[ei * n + ej] = true;
        basis[leave] = (ei, ej, theta);

        if theta <= FLOW_TOL {
            degenerate_run += 1;
            if degenerate_run >= DEGENERATE_RUN {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
    }

    let mut infinite_mass = 0.0;
    let mut flows = Vec::new();
    for &(i, j, f) in &basis {
        if f > FLOW_TOL {
            if c(i, j).0 > 0.5 {
                infinite_mass += f;
            }
            flows.push((i, j, f));
        }
    }
    flows.sort_by_key(|&(i, j, _)| (i, j));
    Ok(TransportSolution { flows, infinite_mass })
}

/// Staircase initial basis with exactly `m + n − 1` cells (a spanning tree).
fn northwest_corner(supply: &[f64], demand: &[f64]) -> Vec<(usize, usize, f64)> {
    let (m, n) = (supply.len(), demand.len());
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut cells = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let x = s[i].min(d[j]).max(0.0);
        cells.push((i, j, x));
        s[i] -= x;
        d[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if j == n - 1 || (i < m - 1 && s[i] <= d[j]) {
            i += 1;
        } else {
            j += 1;
        }
    }
    // Rounding residue lands on the last cell.
    if let Some(last) = cells.last_mut() {
        last.2 = (last.2 + s[m - 1].min(d[n - 1]).max(0.0)).max(0.0);
    }
    cells
}

/// Dual potentials with `u_i + v_j = c_ij` on every basic cell, `u_0 = 0`.
fn potentials(
    basis: &[(usize, usize, f64)],
    m: usize,
    n: usize,
    c: &impl Fn(usize, usize) -> Lex,
) -> (Vec<Lex>, Vec<Lex>) {
    let adj = adjacency(basis, m, n);
    let mut u = vec![None; m];
    let mut v = vec![None; n];
    u[0] = Some(Lex(0.0, 0.0));
    let mut stack = vec![0usize];
    while let Some(node) = stack.pop() {
        for &cell in &adj[node] {
            let (i, j, _) = basis[cell];
            if node < m {
                if v[j].is_none() {
                    v[j] = Some(c(i, j).sub(u[i].expect("visited")));
                    stack.push(m + j);
                }
            } else if u[i].is_none() {
                u[i] = Some(c(i, j).sub(v[j].expect("visited")));
                stack.push(i);
            }
        }
    }
    (
        u.into_iter().map(|x| x.expect("basis spans rows")).collect(),
        v.into_iter().map(|x| x.expect("basis spans columns")).collect(),
    )
}

fn adjacency(basis: &[(usize, usize, f64)], m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m + n];
    for (k, &(i, j, _)) in basis.iter().enumerate() {
        adj[i].push(k);
        adj[m + j].push(k);
    }
    adj
}

/// Basis cells on the tree path from row node `i` to column node `j`,
/// ordered from the row end.
fn tree_path(basis: &[(usize, usize, f64)], m: usize, n: usize, i: usize, j: usize) -> Vec<usize> {
    let adj = adjacency(basis, m, n);
    let mut parent: Vec<Option<usize>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    let target = m + j;
    let mut stack = vec![i];
    seen[i] = true;
    while let Some(node) = stack.pop() {
        if node == target {
            break;
        }
        for &cell in &adj[node] {
            let (ci, cj, _) = basis[cell];
            let other = if node < m { m + cj } else { ci };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some(cell);
                stack.push(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = target;
    while node != i {
        let cell = parent[node].expect("basis is a spanning tree");
        path.push(cell);
        let (ci, cj, _) = basis[cell];
        node = if node < m { m + cj } else { ci };
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let cost = |i: usize, j: usize| Ext::Finite(if i == j { 0.0 } else { 1.0 });
        let sol = solve(&[0.7, 0.3], &[0.4, 0.6], cost).unwrap();
        let total: f64 = sol.flows.iter().map(|&(i, j, f)| f * cost(i, j).to_f64()).sum();
        assert!((total - 0.3).abs() < 1e-15);
        assert_eq!(sol.infinite_mass, 0.0);
    }

    #[test]
    fn avoids_infinite_arcs_when_possible() {
        // NW corner starts on the infinite (0,0) arc.
        let cost = |i: usize, j: usize| {
            if i == 0 && j == 0 {
                Ext::Infinite
            } else {
                Ext::Finite(1.0)
            }
        };
        let sol = solve(&[0.5, 0.5], &[0.5, 0.5], cost).unwrap();
        assert_eq!(sol.infinite_mass, 0.0);
        assert!(sol.flows.iter().all(|&(i, j, _)| (i, j) != (0, 0)));
    }

    #[test]
    fn reports_forced_infinite_mass() {
        let cost = |i: usize, j: usize| if i == j { Ext::Finite(0.0) } else { Ext::Infinite };
        let sol = solve(&[1.0, 0.0 + 1e-300], &[1e-300, 1.0], cost).unwrap();
        assert!(sol.infinite_mass > 0.99);
    }
}
