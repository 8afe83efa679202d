//! The joint barycenter LP: one coupling per component, all sharing a free
//! target marginal `ν`, plus an optional entropy pass over the optimal face.

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, BarycenterSolution, Mixture, Mode, Route};
use crate::error::{Error, Result};
use crate::lp::{Basis, LinearProgram, LpSolution};
use crate::measure::DiscreteMeasure;
use crate::space::{barycenter_argmin_set, Caps};
use crate::tuples;

pub const FW_MAX_STEPS: usize = 200;

/// Reduced costs below this (relative to the largest cost) count as zero
/// when carving out the optimal face.
const FACE_TOL: f64 = 1e-9;
const FW_GAP_TOL: f64 = 1e-14;
/// Stand-in for `ln 0` in the entropy gradient.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrankWolfeStats {
    pub steps: usize,
    /// Final Frank–Wolfe duality gap (an upper bound on the entropy excess).
    pub gap: f64,
}

/// Points that can carry barycenter mass: the union of the barycenter sets
/// of all support tuples. Every optimal `ν` lives there, since gluing its
/// couplings gives a multi-marginal plan whose cost is optimal only if each
/// tuple is sent to one of its barycenters. Falls back to the whole space
/// when the tuple product is over the cap.
fn candidate_points(omega: &Mixture, caps: Caps) -> Result<Vec<usize>> {
    let space = omega.space();
    let supports: Vec<Vec<usize>> = omega.components().iter().map(DiscreteMeasure::support).collect();
    let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
    let Ok(total) = tuples::count(&sizes, caps.tuples) else {
        return Ok((0..space.len()).collect());
    };
    let marks = (0..total)
        .into_par_iter()
        .fold(
            || vec![false; space.len()],
            |mut acc, k| {
                let t = tuples::nth(k, &supports);
                if let Ok((set, _)) = barycenter_argmin_set(space, &t, omega.lambdas()) {
                    for y in set {
                        acc[y] = true;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![false; space.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        );
    Ok((0..space.len()).filter(|&y| marks[y]).collect())
}

struct JointLp {
    lp: LinearProgram,
    /// Column index of `ν_y` for each candidate `y`.
    nu_cols: Vec<usize>,
    candidates: Vec<usize>,
}

fn build(omega: &Mixture, candidates: Vec<usize>, caps: Caps) -> Result<JointLp> {
    let space = omega.space();
    let supports: Vec<Vec<usize>> = omega.components().iter().map(DiscreteMeasure::support).collect();
    let nb = candidates.len();
    let columns = supports.iter().map(|s| s.len() * nb).sum::<usize>() + nb;
    if columns > caps.tuples {
        return Err(Error::TooLarge {
            what: "lp columns",
            size: columns,
            cap: caps.tuples,
        });
    }
    // Rows: per component its support rows then its candidate rows, then Σν.
    let mut rhs = Vec::new();
    let mut support_row = Vec::new();
    let mut target_row = Vec::new();
    for (mu, s) in omega.components().iter().zip(&supports) {
        support_row.push(rhs.len());
        rhs.extend(s.iter().map(|&x| mu.weights()[x]));
        target_row.push(rhs.len());
        rhs.extend(std::iter::repeat_n(0.0, nb));
    }
    let total_row = rhs.len();
    rhs.push(1.0);

    let mut lp = LinearProgram::new(rhs.len(), rhs);
    for (i, s) in supports.iter().enumerate() {
        let l = omega.lambdas()[i];
        for (a, &x) in s.iter().enumerate() {
            for (b, &y) in candidates.iter().enumerate() {
                if let Some(d2) = space.dist_sq(x, y).finite() {
                    lp.add_column(l * d2, vec![(support_row[i] + a, 1.0), (target_row[i] + b, 1.0)]);
                }
            }
        }
    }
    let nu_cols = (0..nb)
        .map(|b| {
            let mut entries: Vec<(usize, f64)> = target_row.iter().map(|&r| (r + b, -1.0)).collect();
            entries.push((total_row, 1.0));
            lp.add_column(0.0, entries)
        })
        .collect();
    Ok(JointLp {
        lp,
        nu_cols,
        candidates,
    })
}

fn nu_from(sol: &LpSolution, nu_cols: &[usize]) -> Vec<f64> {
    nu_cols.iter().map(|&j| sol.x[j].max(0.0)).collect()
}

/// Fixed-support Wasserstein barycenter by a single LP.
///
/// In `MinEntropy` mode the LP optimum is followed by conditional-gradient
/// descent of the relative entropy over the optimal face, which is exactly
/// the set of feasible points using only zero-reduced-cost columns.
pub fn barycenter_lp(omega: &Mixture, mode: Mode, caps: Caps) -> Result<BarycenterSolution> {
    let space = omega.space().clone();
    if space.len() > caps.points {
        return Err(Error::TooLarge {
            what: "points",
            size: space.len(),
            cap: caps.points,
        });
    }
    let canon = omega.canonical();
    let candidates = candidate_points(&canon, caps)?;
    if candidates.is_empty() {
        return Err(Error::Infeasible);
    }
    let joint = build(&canon, candidates, caps)?;
    let sol = joint.lp.solve()?;
    let lp_objective = sol.objective;

    let expand = |local: &[f64]| -> Result<DiscreteMeasure> {
        let mut w = vec![0.0; space.len()];
        for (&y, &v) in joint.candidates.iter().zip(local) {
            w[y] = v;
        }
        DiscreteMeasure::normalized(space.clone(), w)
    };
    let vertex = expand(&nu_from(&sol, &joint.nu_cols))?;

    let (barycenter, vertex_barycenter, frank_wolfe) = match mode {
        Mode::Vertex => (vertex, None, None),
        Mode::MinEntropy => {
            let (nu, stats) = min_entropy(&joint, &sol, space.ref_mass())?;
            (expand(&nu)?, Some(vertex), Some(stats))
        }
    };

    let (objective, component_w2, component_couplings) = evaluate(omega, &barycenter)?;
    Ok(BarycenterSolution {
        barycenter,
        objective,
        component_w2,
        lambdas: omega.lambdas().to_vec(),
        route: Route::Lp,
        mode,
        lp_objective: Some(lp_objective),
        mmot_plan: None,
        selection: None,
        chain_gap: None,
        component_couplings,
        vertex_barycenter,
        frank_wolfe,
    })
}

fn entropy_grad(nu: &[f64], m: &[f64]) -> Vec<f64> {
    nu.iter()
        .zip(m)
        .map(|(&v, &mi)| (v.max(LOG_FLOOR) / mi).ln() + 1.0)
        .collect()
}

/// Frank–Wolfe on `Ent(ν) = Σ ν ln(ν/m)` over the optimal face, with exact
/// line search (bisection on the directional derivative).
fn min_entropy(joint: &JointLp, sol: &LpSolution, ref_mass: &[f64]) -> Result<(Vec<f64>, FrankWolfeStats)> {
    let lp = &joint.lp;
    let scale = 1.0 + lp.costs().iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let rc = lp.reduced_costs(&sol.duals);
    let keep: Vec<usize> = (0..lp.num_columns()).filter(|&j| rc[j] <= FACE_TOL * scale).collect();
    let mut local = vec![usize::MAX; lp.num_columns()];
    for (k, &j) in keep.iter().enumerate() {
        local[j] = k;
    }
    let mut face = lp.restrict(&keep);
    let (n_all, n_face) = (lp.num_columns(), face.num_columns());
    let mut basis = Basis(
        sol.basis
            .0
            .iter()
            .map(|&j| if j < n_all { local[j] } else { j - n_all + n_face })
            .collect(),
    );
    if basis.0.contains(&usize::MAX) {
        // A basic column outside the face means the tolerance was too tight;
        // a cold start on the face is still correct.
        basis = Basis(Vec::new());
    }

    let m: Vec<f64> = joint.candidates.iter().map(|&y| ref_mass[y]).collect();
    let mut nu = nu_from(sol, &joint.nu_cols);
    let mut gap = f64::INFINITY;
    let mut steps = 0;
    while steps < FW_MAX_STEPS {
        let g = entropy_grad(&nu, &m);
        let mut costs = vec![0.0; n_face];
        for (b, &j) in joint.nu_cols.iter().enumerate() {
            if local[j] != usize::MAX {
                costs[local[j]] = g[b];
            }
        }
        face.set_costs(costs);
        let lmo = face.solve_warm(&basis)?;
        basis = lmo.basis.clone();
        let s: Vec<f64> = joint
            .nu_cols
            .iter()
            .map(|&j| {
                if local[j] == usize::MAX {
                    0.0
                } else {
                    lmo.x[local[j]].max(0.0)
                }
            })
            .collect();
        gap = g.iter().zip(nu.iter().zip(&s)).map(|(gi, (v, si))| gi * (v - si)).sum();
        if gap <= FW_GAP_TOL {
            break;
        }
        let gamma = line_search(&nu, &s, &m);
        for (v, si) in nu.iter_mut().zip(&s) {
            *v += gamma * (si - *v);
        }
        steps += 1;
    }
    Ok((
        nu,
        FrankWolfeStats {
            steps,
            gap: gap.max(0.0),
        },
    ))
}

/// Minimizer over `γ ∈ [0, 1]` of the entropy along `ν + γ (s − ν)`.
fn line_search(nu: &[f64], s: &[f64], m: &[f64]) -> f64 {
    let slope = |gamma: f64| -> f64 {
        nu.iter()
            .zip(s)
            .zip(m)
            .map(|((&v, &si), &mi)| {
                let d = si - v;
                if d == 0.0 {
                    0.0
                } else {
                    let p = v + gamma * d;
                    d * ((p.max(LOG_FLOOR) / mi).ln() + 1.0)
                }
            })
            .sum()
    };
    if slope(1.0) <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
