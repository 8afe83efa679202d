//! Probability measures on a finite space and the entropy functionals.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::space::MetricMeasureSpace;

/// Total-mass tolerance for a probability weight vector.
pub const MASS_TOL: f64 = 1e-10;

/// Weights below this are treated as exact zeros (`0 ln 0 = 0`).
const NEGLIGIBLE: f64 = 1e-300;

/// A probability weight vector over the points of a space.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    space: Arc<MetricMeasureSpace>,
    weights: Vec<f64>,
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &DiscreteMeasure) -> bool {
        same_space(&self.space, &other.space) && self.weights == other.weights
    }
}

pub fn same_space(a: &Arc<MetricMeasureSpace>, b: &Arc<MetricMeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl DiscreteMeasure {
    /// Validates without renormalizing.
    pub fn new(space: Arc<MetricMeasureSpace>, weights: Vec<f64>) -> Result<DiscreteMeasure> {
        if weights.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} weights for a space of {} points",
                weights.len(),
                space.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::InvalidMeasure(format!("weight {w} at point {i}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(DiscreteMeasure { space, weights })
    }

    /// Scales a nonnegative vector with positive total to a probability.
    pub fn normalized(space: Arc<MetricMeasureSpace>, weights: Vec<f64>) -> Result<DiscreteMeasure> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure(format!("cannot normalize total {total}")));
        }
        Self::new(space, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn dirac(space: Arc<MetricMeasureSpace>, i: usize) -> Result<DiscreteMeasure> {
        space.check_index(i)?;
        let mut w = vec![0.0; space.len()];
        w[i] = 1.0;
        Self::new(space, w)
    }

    /// Uniform on the listed points (duplicates ignored).
    pub fn uniform_on(space: Arc<MetricMeasureSpace>, points: &[usize]) -> Result<DiscreteMeasure> {
        let mut w = vec![0.0; space.len()];
        for &i in points {
            space.check_index(i)?;
            w[i] = 1.0;
        }
        Self::normalized(space, w)
    }

    /// The reference measure normalized to a probability.
    pub fn reference(space: Arc<MetricMeasureSpace>) -> Result<DiscreteMeasure> {
        let m = space.ref_mass().to_vec();
        Self::normalized(space, m)
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Indices with positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `(1 − s)·self + s·other`.
    pub fn blend(&self, other: &DiscreteMeasure, s: f64) -> Result<DiscreteMeasure> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let w = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect();
        Self::new(self.space.clone(), w)
    }

    pub fn pushforward(&self, phi: &[usize]) -> Result<DiscreteMeasure> {
        pushforward_to(self, phi, self.space.clone())
    }
}

/// `(φ♯μ)(y) = Σ_{x: φ(x) = y} μ(x)`.
pub fn pushforward_to(mu: &DiscreteMeasure, phi: &[usize], target: Arc<MetricMeasureSpace>) -> Result<DiscreteMeasure> {
    if phi.len() != mu.weights.len() {
        return Err(Error::BadParams(format!(
            "map has {} entries for {} points",
            phi.len(),
            mu.weights.len()
        )));
    }
    let mut out = vec![0.0; target.len()];
    for (&w, &y) in mu.weights.iter().zip(phi) {
        target.check_index(y)?;
        out[y] += w;
    }
    DiscreteMeasure::new(target, out)
}

/// `min_x Σ_z μ(z) d²(x, z)` with the lowest-index minimizer.
pub fn variance(mu: &DiscreteMeasure) -> (Ext, usize) {
    let space = mu.space();
    let support = mu.support();
    let mut best = (Ext::Infinite, 0);
    for x in 0..space.len() {
        let v: Ext = support
            .iter()
            .map(|&z| space.dist_sq(x, z).scale(mu.weights[z]).expect("positive weight"))
            .sum();
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

/// `Σ wᵢ ln(wᵢ / mᵢ)` with `0 ln 0 = 0`, natural log.
///
/// Always finite on a finite space with full-support reference measure; the
/// return type is extended so that the `+∞` branch can flow through the
/// certifiers unchanged.
pub fn relative_entropy(mu: &DiscreteMeasure) -> Ext {
    let m = mu.space.ref_mass();
    let total = mu
        .weights
        .iter()
        .zip(m)
        .filter(|(&w, _)| w > NEGLIGIBLE)
        .map(|(&w, &mi)| w * (w / mi).ln())
        .sum();
    Ext::Finite(total)
}

/// `Σ_{wᵢ>0} wᵢ^{1−1/N} mᵢ^{1/N}` for `N ≥ 1`.
pub fn renyi_entropy(mu: &DiscreteMeasure, n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::BadParams(format!("Renyi exponent needs N >= 1, got {n}")));
    }
    let m = mu.space.ref_mass();
    Ok(mu
        .weights
        .iter()
        .zip(m)
        .filter(|(&w, _)| w > NEGLIGIBLE)
        .map(|(&w, &mi)| w.powf(1.0 - 1.0 / n) * mi.powf(1.0 / n))
        .sum())
}

/// `exp(−Ent/N)`, with `0` for the `+∞` entropy sentinel.
pub fn u_n_from_entropy(entropy: Ext, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::BadParams(format!("U_N needs N > 0, got {n}")));
    }
    Ok(match entropy {
        Ext::Finite(e) => (-e / n).exp(),
        Ext::Infinite => 0.0,
    })
}

pub fn u_n(mu: &DiscreteMeasure, n: f64) -> Result<f64> {
    u_n_from_entropy(relative_entropy(mu), n)
}
