//! Entropically regularized transport (log-domain Sinkhorn with ε-scaling).

use serde::Serialize;

use super::{check_pair, Coupling};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::DiscreteMeasure;

#[derive(Clone, Debug, Serialize)]
pub struct EntropicResult {
    /// Unregularized cost `Σ π d²` of the regularized plan.
    pub cost: f64,
    pub coupling: Coupling,
    pub converged: bool,
    pub iterations: usize,
    /// `Σ |row sum − μ|` after the last iteration.
    pub marginal_error: f64,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Sinkhorn scaling on the kernel `exp(−d²/ε)` restricted to the supports.
///
/// Potentials are kept in the log domain and the regularization is annealed
/// from the largest finite cost down to `epsilon`, warm-starting each stage.
/// `max_iter` bounds the total number of (row, column) update pairs.
pub fn w2_entropic(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<EntropicResult> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::BadParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let space = check_pair(mu, nu)?;
    let rows = mu.support();
    let cols = nu.support();
    let a: Vec<f64> = rows.iter().map(|&i| mu.weights()[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| nu.weights()[j]).collect();
    let (m, n) = (rows.len(), cols.len());

    // Infinite entries stay at +inf and drop out of every log-sum-exp.
    let cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| space.dist_sq(i, j).to_f64())
        .collect();
    let c = |i: usize, j: usize| cost[i * n + j];
    let row_ok = (0..m).all(|i| (0..n).any(|j| c(i, j).is_finite()));
    let col_ok = (0..n).all(|j| (0..m).any(|i| c(i, j).is_finite()));
    if !row_ok || !col_ok {
        return Err(Error::InfiniteCost);
    }

    let c_max = cost.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
    let mut schedule = vec![epsilon];
    while let Some(&last) = schedule.last() {
        if last * 2.0 >= c_max.max(epsilon) {
            break;
        }
        schedule.push(last * 2.0);
    }
    schedule.reverse();

    let ln_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    let ln_b: Vec<f64> = b.iter().map(|x| x.ln()).collect();
    let mut f = vec![0.0; m];
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    let mut err = f64::INFINITY;

    let row_error = |f: &[f64], g: &[f64], eps: f64| -> f64 {
        (0..m)
            .map(|i| {
                let s: f64 = (0..n).map(|j| ((f[i] + g[j] - c(i, j)) / eps).exp()).sum();
                (s - a[i]).abs()
            })
            .sum()
    };

    for (stage, &eps) in schedule.iter().enumerate() {
        let last_stage = stage + 1 == schedule.len();
        loop {
            if iterations >= max_iter {
                break;
            }
            for i in 0..m {
                f[i] = eps * ln_a[i] - eps * log_sum_exp((0..n).map(|j| (g[j] - c(i, j)) / eps));
            }
            for j in 0..n {
                g[j] = eps * ln_b[j] - eps * log_sum_exp((0..m).map(|i| (f[i] - c(i, j)) / eps));
            }
            iterations += 1;
            err = row_error(&f, &g, eps);
            if err <= tol {
                break;
            }
        }
        if iterations >= max_iter && !last_stage {
            err = row_error(&f, &g, epsilon);
            break;
        }
    }

    let mut entries = Vec::new();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            let cij = c(i, j);
            if cij.is_finite() {
                let p = ((f[i] + g[j] - cij) / epsilon).exp();
                if p > 0.0 {
                    entries.push((rows[i], cols[j], p));
                    total += p * cij;
                }
            }
        }
    }
    let coupling = Coupling::new(space, entries, mu.weights().to_vec(), nu.weights().to_vec())?;
    debug_assert!(matches!(coupling.cost, Ext::Finite(_)));
    Ok(EntropicResult {
        cost: total,
        coupling,
        converged: err <= tol,
        iterations,
        marginal_error: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::Finite;
    use crate::space::MetricMeasureSpace;
    use crate::transport::w2_exact;
    use std::sync::Arc;

    fn two_point() -> Arc<MetricMeasureSpace> {
        Arc::new(
            MetricMeasureSpace::new(
                vec![vec![Finite(0.0), Finite(1.0)], vec![Finite(1.0), Finite(0.0)]],
                vec![0.5, 0.5],
            )
            .unwrap(),
        )
    }

    #[test]
    fn dirac_to_itself() {
        let s = two_point();
        let d = DiscreteMeasure::dirac(s, 1).unwrap();
        let r = w2_entropic(&d, &d, 0.1, 100, 1e-9).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn approaches_exact_at_small_epsilon() {
        let s = two_point();
        let mu = DiscreteMeasure::new(s.clone(), vec![0.7, 0.3]).unwrap();
        let nu = DiscreteMeasure::new(s, vec![0.4, 0.6]).unwrap();
        let exact = w2_exact(&mu, &nu).unwrap().w2_squared.to_f64();
        let r = w2_entropic(&mu, &nu, 1e-3, 10_000, 1e-10).unwrap();
        assert!(r.converged, "marginal error {}", r.marginal_error);
        assert!((r.cost - exact).abs() < 1e-3, "{} vs {exact}", r.cost);
    }

    #[test]
    fn iteration_budget_exhausted() {
        let s = two_point();
        let mu = DiscreteMeasure::new(s.clone(), vec![0.7, 0.3]).unwrap();
        let nu = DiscreteMeasure::new(s, vec![0.4, 0.6]).unwrap();
        let r = w2_entropic(&mu, &nu, 1e-3, 1, 1e-12).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn infinite_cost_between_classes() {
        let s = Arc::new(
            MetricMeasureSpace::new(
                vec![vec![Finite(0.0), Ext::Infinite], vec![Ext::Infinite, Finite(0.0)]],
                vec![1.0, 1.0],
            )
            .unwrap(),
        );
        let a = DiscreteMeasure::dirac(s.clone(), 0).unwrap();
        let b = DiscreteMeasure::dirac(s, 1).unwrap();
        assert_eq!(w2_entropic(&a, &b, 0.1, 10, 1e-9).unwrap_err(), Error::InfiniteCost);
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        let d = DiscreteMeasure::dirac(two_point(), 0).unwrap();
        assert!(w2_entropic(&d, &d, 0.0, 10, 1e-9).is_err());
    }
}
