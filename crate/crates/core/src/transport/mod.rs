//! Two-marginal optimal transport with quadratic cost `d²`.

mod entropic;
mod monge;
pub(crate) mod simplex;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::{same_space, DiscreteMeasure};
use crate::space::MetricMeasureSpace;

pub use entropic::{w2_entropic, EntropicResult};
pub use monge::{extract_monge, MongeReport, OffendingRow};

/// Marginal feasibility tolerance per atom.
pub const MARGINAL_TOL: f64 = 1e-9;

/// A coupling of two measures stored as sparse `(source, target, mass)`
/// triplets sorted by `(source, target)`.
#[derive(Clone, Debug, Serialize)]
pub struct Coupling {
    #[serde(skip)]
    space: Arc<MetricMeasureSpace>,
    pub entries: Vec<(usize, usize, f64)>,
    #[serde(skip)]
    pub source: Vec<f64>,
    #[serde(skip)]
    pub target: Vec<f64>,
    pub cost: Ext,
}

impl Coupling {
    pub fn new(
        space: Arc<MetricMeasureSpace>,
        mut entries: Vec<(usize, usize, f64)>,
        source: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Coupling> {
        entries.retain(|e| e.2 > 0.0);
        entries.sort_by_key(|&(i, j, _)| (i, j));
        for &(i, j, w) in &entries {
            space.check_index(i)?;
            space.check_index(j)?;
            if !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("coupling mass {w}")));
            }
        }
        let mut cost = Ext::ZERO;
        for &(i, j, w) in &entries {
            cost = cost + space.dist_sq(i, j).scale(w)?;
        }
        Ok(Coupling {
            space,
            entries,
            source,
            target,
            cost,
        })
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.space.len()];
        for &(i, _, w) in &self.entries {
            r[i] += w;
        }
        r
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.space.len()];
        for &(_, j, w) in &self.entries {
            c[j] += w;
        }
        c
    }

    /// Largest deviation of either marginal from its prescribed weights.
    pub fn marginal_error(&self) -> f64 {
        let rows = self.row_sums();
        let cols = self.column_sums();
        let r = rows.iter().zip(&self.source).map(|(a, b)| (a - b).abs());
        let c = cols.iter().zip(&self.target).map(|(a, b)| (a - b).abs());
        r.chain(c).fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.entries.iter().all(|e| e.2 >= 0.0) && self.marginal_error() <= MARGINAL_TOL
    }

    /// Mass of the cell `(i, j)`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
            .map(|k| self.entries[k].2)
            .unwrap_or(0.0)
    }
}

/// Exact `W₂`, its square, and an optimal basic coupling.
#[derive(Clone, Debug, Serialize)]
pub struct W2Result {
    pub w2: Ext,
    pub w2_squared: Ext,
    /// `None` when every coupling has infinite cost.
    pub coupling: Option<Coupling>,
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Arc<MetricMeasureSpace>> {
    if !same_space(mu.space(), nu.space()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(mu.space().clone())
}

/// Exact quadratic Wasserstein distance via the transportation simplex on
/// the product of the two supports.
pub fn w2_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<W2Result> {
    let space = check_pair(mu, nu)?;
    let rows = mu.support();
    let cols = nu.support();
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weights()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weights()[j]).collect();
    let sol = simplex::solve(&supply, &demand, |a, b| space.dist_sq(rows[a], cols[b]))?;
    if sol.infinite_mass > MARGINAL_TOL {
        return Ok(W2Result {
            w2: Ext::Infinite,
            w2_squared: Ext::Infinite,
            coupling: None,
        });
    }
    let entries = sol
        .flows
        .iter()
        .filter(|&&(a, b, _)| space.dist(rows[a], cols[b]).is_finite())
        .map(|&(a, b, f)| (rows[a], cols[b], f))
        .collect();
    let coupling = Coupling::new(space, entries, mu.weights().to_vec(), nu.weights().to_vec())?;
    Ok(W2Result {
        w2: coupling.cost.sqrt(),
        w2_squared: coupling.cost,
        coupling: Some(coupling),
    })
}

/// `W₂²` only.
pub fn w2_squared(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Ext> {
    Ok(w2_exact(mu, nu)?.w2_squared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::Finite;
    use crate::generate::{grid1d, NodeMass};

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
    fn identical_measures() {
        let g = Arc::new(grid1d(0.0, 1.0, 5, NodeMass::Trapezoid).unwrap());
        let mu = DiscreteMeasure::new(g, vec![0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        let r = w2_exact(&mu, &mu).unwrap();
        assert_eq!(r.w2, Finite(0.0));
        let c = r.coupling.unwrap();
        assert!(c.entries.iter().all(|&(i, j, _)| i == j));
        assert!(c.is_valid());
    }

    #[test]
    fn diracs() {
        let g = Arc::new(grid1d(0.0, 1.0, 5, NodeMass::Trapezoid).unwrap());
        let a = DiscreteMeasure::dirac(g.clone(), 1).unwrap();
        let b = DiscreteMeasure::dirac(g, 4).unwrap();
        let r = w2_exact(&a, &b).unwrap();
        assert_eq!(r.w2, Finite(0.75));
        assert_eq!(r.coupling.unwrap().entries, vec![(1, 4, 1.0)]);
    }

    #[test]
    fn two_point_brute_force() {
        // Couplings of (0.7, 0.3) and (0.4, 0.6) form a segment
        // π₀₁ = s ∈ [0.3, 0.6] with cost π₀₁ + π₁₀ = s + (s − 0.3).
        let oracle = (0..=3000)
            .map(|k| 0.3 + 0.3 * k as f64 / 3000.0)
            .map(|s| s + (s - 0.3))
            .fold(f64::INFINITY, f64::min);
        assert!((oracle - 0.3).abs() < 1e-12);

        let s = two_point();
        let mu = DiscreteMeasure::new(s.clone(), vec![0.7, 0.3]).unwrap();
        let nu = DiscreteMeasure::new(s, vec![0.4, 0.6]).unwrap();
        let r = w2_exact(&mu, &nu).unwrap();
        assert!((r.w2_squared.to_f64() - oracle).abs() < 1e-12);
    }

    #[test]
    fn space_mismatch() {
        let a = DiscreteMeasure::dirac(two_point(), 0).unwrap();
        let g = Arc::new(grid1d(0.0, 1.0, 2, NodeMass::Trapezoid).unwrap());
        let b = DiscreteMeasure::dirac(g, 0).unwrap();
        assert_eq!(w2_exact(&a, &b).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn disconnected_supports_are_infinite() {
        let s = Arc::new(
            MetricMeasureSpace::new(
                vec![vec![Finite(0.0), Ext::Infinite], vec![Ext::Infinite, Finite(0.0)]],
                vec![1.0, 1.0],
            )
            .unwrap(),
        );
        let a = DiscreteMeasure::dirac(s.clone(), 0).unwrap();
        let b = DiscreteMeasure::dirac(s.clone(), 1).unwrap();
        let r = w2_exact(&a, &b).unwrap();
        assert_eq!(r.w2, Ext::Infinite);
        assert!(r.coupling.is_none());
        assert_eq!(w2_exact(&a, &a).unwrap().w2, Finite(0.0));
    }

    #[test]
    fn deterministic_couplings() {
        let g = Arc::new(grid1d(0.0, 1.0, 9, NodeMass::Trapezoid).unwrap());
        let mu = DiscreteMeasure::uniform_on(g.clone(), &[0, 2, 4, 6]).unwrap();
        let nu = DiscreteMeasure::uniform_on(g, &[1, 3, 5, 7]).unwrap();
        let a = w2_exact(&mu, &nu).unwrap().coupling.unwrap();
        let b = w2_exact(&mu, &nu).unwrap().coupling.unwrap();
        assert_eq!(a.entries, b.entries);
    }
}
