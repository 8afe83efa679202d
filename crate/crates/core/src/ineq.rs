//! Set and function inequalities implied by barycentric curvature bounds:
//! multi-marginal Brunn–Minkowski (plain and logarithmic) and a functional
//! Blaschke–Santaló inequality.

use rayon::prelude::*;
use serde::Serialize;

use crate::barycenter::check_lambdas;
use crate::error::{Error, Result};
use crate::report::{real, CertificationReport, Inequality, Witness};
use crate::space::{barycenter_argmin_set, barycenter_scan, Caps, MetricMeasureSpace};
use crate::tuples;

/// Default tolerance for the set inequalities.
pub const SET_TOL: f64 = 1e-12;
/// Admissibility slack for the Blaschke–Santaló hypothesis.
pub const ADMISSIBLE_TOL: f64 = 1e-12;
/// Allowed deviation of `Σ m` from 1 for the Blaschke–Santaló check.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// A nonempty set of point indices, sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointSet {
    indices: Vec<usize>,
}

impl PointSet {
    pub fn new(space: &MetricMeasureSpace, mut indices: Vec<usize>) -> Result<PointSet> {
        if indices.is_empty() {
            return Err(Error::BadParams("point set is empty".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadParams("point set has duplicate indices".into()));
        }
        for &i in &indices {
            space.check_index(i)?;
        }
        Ok(PointSet { indices })
    }

    /// Points `lo..=hi`.
    pub fn range(space: &MetricMeasureSpace, lo: usize, hi: usize) -> Result<PointSet> {
        PointSet::new(space, (lo..=hi).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `m(E)`.
    pub fn mass(&self, space: &MetricMeasureSpace) -> f64 {
        self.indices.iter().map(|&i| space.ref_mass()[i]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarycenterSet {
    pub set: Option<PointSet>,
    /// Tuples with no finite-cost barycenter.
    pub skipped_infinite: usize,
}

/// Every barycenter (all minimizers, not only the lowest index) of every
/// tuple in `E₁ × … × Eₙ`.
pub fn barycenter_set(
    space: &MetricMeasureSpace,
    sets: &[PointSet],
    weights: &[f64],
    caps: Caps,
) -> Result<BarycenterSet> {
    check_lambdas(weights)?;
    if sets.len() != weights.len() {
        return Err(Error::BadParams("one weight per set is required".into()));
    }
    let lists: Vec<Vec<usize>> = sets.iter().map(|s| s.indices.clone()).collect();
    let total = tuples::count(&lists.iter().map(Vec::len).collect::<Vec<_>>(), caps.tuples)?;
    let n = space.len();
    let (marks, skipped) = (0..total)
        .into_par_iter()
        .fold(
            || (vec![false; n], 0usize),
            |(mut marks, mut skipped), k| {
                match barycenter_argmin_set(space, &tuples::nth(k, &lists), weights) {
                    Ok((set, _)) => set.into_iter().for_each(|y| marks[y] = true),
                    Err(_) => skipped += 1,
                }
                (marks, skipped)
            },
        )
        .reduce(
            || (vec![false; n], 0),
            |(mut a, sa), (b, sb)| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                (a, sa + sb)
            },
        );
    let indices: Vec<usize> = (0..n).filter(|&y| marks[y]).collect();
    Ok(BarycenterSet {
        set: (!indices.is_empty()).then_some(PointSet { indices }),
        skipped_infinite: skipped,
    })
}

fn set_witness(space: &MetricMeasureSpace, sets: &[PointSet], weights: &[f64], bary: &BarycenterSet) -> Witness {
    let mut w = Witness {
        lambdas: Some(weights.to_vec()),
        indices: bary.set.as_ref().map(|s| s.indices.clone()),
        ..Witness::default()
    };
    for (i, s) in sets.iter().enumerate() {
        w.value(&format!("mass_{i}"), s.mass(space));
    }
    w.value("barycenter_set_size", bary.set.as_ref().map_or(0, PointSet::len) as f64);
    if bary.skipped_infinite > 0 {
        w.note(format!("{} tuples have no finite barycenter", bary.skipped_infinite));
    }
    w
}

/// `m(E) ≥ (Σ λᵢ m(Eᵢ)^{1/N})^N` with `E` the barycenter set.
pub fn bm_check(
    space: &MetricMeasureSpace,
    sets: &[PointSet],
    weights: &[f64],
    n: f64,
    tolerance: f64,
    caps: Caps,
) -> Result<CertificationReport> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::BadParams(format!(
            "dimension must be finite and at least 1, got {n}"
        )));
    }
    let bary = barycenter_set(space, sets, weights, caps)?;
    let lhs = sets
        .iter()
        .zip(weights)
        .map(|(s, l)| l * s.mass(space).powf(1.0 / n))
        .sum::<f64>()
        .powf(n);
    let rhs = bary.set.as_ref().map_or(0.0, |s| s.mass(space));
    let mut w = set_witness(space, sets, weights, &bary);
    w.value("N", n);
    Ok(CertificationReport::compare(
        Inequality::BrunnMinkowski,
        None,
        lhs,
        rhs,
        tolerance,
        w,
    ))
}

/// `m(E) ≥ Π m(Eᵢ)^{λᵢ}`.
pub fn log_bm_check(
    space: &MetricMeasureSpace,
    sets: &[PointSet],
    weights: &[f64],
    tolerance: f64,
    caps: Caps,
) -> Result<CertificationReport> {
    let bary = barycenter_set(space, sets, weights, caps)?;
    let lhs = sets
        .iter()
        .zip(weights)
        .map(|(s, l)| l * s.mass(space).ln())
        .sum::<f64>()
        .exp();
    let rhs = bary.set.as_ref().map_or(0.0, |s| s.mass(space));
    let w = set_witness(space, sets, weights, &bary);
    Ok(CertificationReport::compare(
        Inequality::LogBrunnMinkowski,
        None,
        lhs,
        rhs,
        tolerance,
        w,
    ))
}

/// `½ min_x Σ d²(x, xᵢ)`, or `None` if every candidate is infinitely far.
fn half_cost(space: &MetricMeasureSpace, tuple: &[usize]) -> Option<f64> {
    let ones = vec![1.0; tuple.len()];
    barycenter_scan(space, tuple, &ones).ok().map(|(_, v)| 0.5 * v)
}

fn check_functions(space: &MetricMeasureSpace, fns: &[Vec<f64>]) -> Result<()> {
    if fns.is_empty() {
        return Err(Error::BadParams("at least one function is required".into()));
    }
    for f in fns {
        if f.len() != space.len() {
            return Err(Error::BadParams(format!(
                "function has {} values for {} points",
                f.len(),
                space.len()
            )));
        }
        if f.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::BadParams("function values must be real or -inf".into()));
        }
    }
    Ok(())
}

/// Largest violation of `Σ fᵢ(xᵢ) ≤ ½ min_x Σ d²(x, xᵢ)` over all tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisDefect {
    /// `−∞` when no tuple has a finite left side and finite cost.
    #[serde(serialize_with = "real")]
    pub defect: f64,
    pub witness: Option<Vec<usize>>,
}

impl HypothesisDefect {
    pub fn admissible(&self) -> bool {
        self.defect <= ADMISSIBLE_TOL
    }
}

fn finite_points(f: &[f64]) -> Vec<usize> {
    (0..f.len()).filter(|&i| f[i] > f64::NEG_INFINITY).collect()
}

pub fn bs_hypothesis_defect(space: &MetricMeasureSpace, fns: &[Vec<f64>], caps: Caps) -> Result<HypothesisDefect> {
    check_functions(space, fns)?;
    let lists: Vec<Vec<usize>> = fns.iter().map(|f| finite_points(f)).collect();
    let total = tuples::count(&lists.iter().map(Vec::len).collect::<Vec<_>>(), caps.tuples)?;
    let best = (0..total)
        .into_par_iter()
        .filter_map(|k| {
            let t = tuples::nth(k, &lists);
            let c = half_cost(space, &t)?;
            let s: f64 = t.iter().zip(fns).map(|(&x, f)| f[x]).sum();
            Some((s - c, k))
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    Ok(match best {
        Some((defect, k)) => HypothesisDefect {
            defect,
            witness: Some(tuples::nth(k, &lists)),
        },
        None => HypothesisDefect {
            defect: f64::NEG_INFINITY,
            witness: None,
        },
    })
}

/// The largest `f_k` keeping the family admissible:
/// `f_k(y) = min over (x₁…x_{k−1}) of [½ min_x Σ d²(x, ·) − Σ fᵢ(xᵢ)]`.
pub fn bs_complete(space: &MetricMeasureSpace, fns: &[Vec<f64>], caps: Caps) -> Result<Vec<f64>> {
    check_functions(space, fns)?;
    let lists: Vec<Vec<usize>> = fns.iter().map(|f| finite_points(f)).collect();
    let per_y = tuples::count(&lists.iter().map(Vec::len).collect::<Vec<_>>(), caps.tuples)?;
    tuples::count(&[per_y, space.len()], caps.tuples.saturating_mul(space.len()))?;
    (0..space.len())
        .into_par_iter()
        .map(|y| {
            let mut best = f64::INFINITY;
            let mut t = Vec::with_capacity(fns.len() + 1);
            for k in 0..per_y {
                t.clear();
                t.extend(tuples::nth(k, &lists));
                let s: f64 = t.iter().zip(fns).map(|(&x, f)| f[x]).sum();
                t.push(y);
                if let Some(c) = half_cost(space, &t) {
                    best = best.min(c - s);
                }
            }
            if best.is_finite() {
                Ok(best)
            } else {
                Err(Error::DomainError(format!(
                    "point {y} is infinitely far from every admissible tuple"
                )))
            }
        })
        .collect()
}

/// `Π ∫ e^{fᵢ} dm ≤ 1` for an admissible family on a probability space.
pub fn bs_check(
    space: &MetricMeasureSpace,
    fns: &[Vec<f64>],
    tolerance: f64,
    caps: Caps,
) -> Result<CertificationReport> {
    let total = space.total_mass();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::NotProbability(total));
    }
    let hyp = bs_hypothesis_defect(space, fns, caps)?;
    if !hyp.admissible() {
        return Err(Error::Inadmissible { defect: hyp.defect });
    }
    let integrals: Vec<f64> = fns
        .iter()
        .map(|f| f.iter().zip(space.ref_mass()).map(|(v, m)| v.exp() * m).sum())
        .collect();
    let lhs: f64 = integrals.iter().product();
    let mut w = Witness::default();
    for (i, v) in integrals.iter().enumerate() {
        w.value(&format!("integral_{i}"), *v);
    }
    if hyp.defect.is_finite() {
        w.value("hypothesis_defect", hyp.defect);
    }
    Ok(CertificationReport::compare(
        Inequality::BlaschkeSantalo,
        None,
        lhs,
        1.0,
        tolerance,
        w,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{circle, graph, grid1d, NodeMass};

    #[test]
    fn singleton_sets() {
        let g = grid1d(0.0, 1.0, 5, NodeMass::Trapezoid).unwrap();
        let e = PointSet::new(&g, vec![3]).unwrap();
        let b = barycenter_set(&g, &[e.clone(), e], &[0.5, 0.5], Caps::default()).unwrap();
        assert_eq!(b.set.unwrap().indices(), &[3]);
    }

    #[test]
    fn circle_ties() {
        let c = circle(3.0, 3).unwrap();
        let sets = [PointSet::new(&c, vec![0]).unwrap(), PointSet::new(&c, vec![1]).unwrap()];
        let b = barycenter_set(&c, &sets, &[0.5, 0.5], Caps::default()).unwrap();
        assert_eq!(b.set.unwrap().indices(), &[0, 1]);
    }

    #[test]
    fn grid_intervals() {
        let g = grid1d(0.0, 1.0, 65, NodeMass::Uniform).unwrap();
        let sets = [PointSet::range(&g, 0, 16).unwrap(), PointSet::range(&g, 0, 32).unwrap()];
        let b = barycenter_set(&g, &sets, &[0.5, 0.5], Caps::default()).unwrap();
        assert_eq!(
            b.set.as_ref().unwrap().indices(),
            (0..=24).collect::<Vec<_>>().as_slice()
        );
        let r = bm_check(&g, &sets, &[0.5, 0.5], 1.0, SET_TOL, Caps::default()).unwrap();
        assert!(r.passed());
        assert!(r.slack.unwrap().abs() < 1e-15);
        let l = log_bm_check(&g, &sets, &[0.5, 0.5], SET_TOL, Caps::default()).unwrap();
        assert!((l.lhs.unwrap() - (17.0f64 * 33.0).sqrt() / 65.0).abs() < 1e-15);
        assert!(l.passed());
    }

    #[test]
    fn collapsing_star_fails() {
        let (s, _) = graph(3, &[(0, 1, 1.0), (0, 2, 1.0)], vec![0.01, 1.0, 1.0]).unwrap();
        let sets = [PointSet::new(&s, vec![1]).unwrap(), PointSet::new(&s, vec![2]).unwrap()];
        let r = bm_check(&s, &sets, &[0.5, 0.5], 1.0, SET_TOL, Caps::default()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witness.indices.as_deref(), Some(&[0][..]));
    }

    #[test]
    fn zero_functions() {
        let g = grid1d(0.0, 1.0, 5, NodeMass::Uniform).unwrap();
        let zeros = vec![vec![0.0; 5]; 3];
        let d = bs_hypothesis_defect(&g, &zeros, Caps::default()).unwrap();
        assert_eq!(d.defect, 0.0);
        let c = bs_complete(&g, &zeros[..1], Caps::default()).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
        let r = bs_check(&g, &zeros, 1e-12, Caps::default()).unwrap();
        assert!((r.lhs.unwrap() - 1.0).abs() < 1e-12);
        let pos = vec![vec![0.1; 5]; 2];
        let d = bs_hypothesis_defect(&g, &pos, Caps::default()).unwrap();
        assert!((d.defect - 0.2).abs() < 1e-15);
        assert!(matches!(
            bs_check(&g, &pos, 1e-12, Caps::default()),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn completion_matches_brute_force() {
        let g = grid1d(0.0, 1.0, 7, NodeMass::Uniform).unwrap();
        let p = 2;
        let f1: Vec<f64> = (0..7).map(|x| -g.dist_sq(x, p).to_f64()).collect();
        let f2 = bs_complete(&g, std::slice::from_ref(&f1), Caps::default()).unwrap();
        for y in 0..7 {
            let mut best = f64::INFINITY;
            for x1 in 0..7 {
                for x in 0..7 {
                    let c = 0.5 * (g.dist_sq(x, x1).to_f64() + g.dist_sq(x, y).to_f64());
                    best = best.min(c - f1[x1]);
                }
            }
            assert!((f2[y] - best).abs() < 1e-15);
        }
        let d = bs_hypothesis_defect(&g, &[f1, f2], Caps::default()).unwrap();
        assert!(d.admissible());
    }

    #[test]
    fn minus_infinity_excludes_points() {
        let g = grid1d(0.0, 1.0, 3, NodeMass::Uniform).unwrap();
        let f = vec![f64::NEG_INFINITY; 3];
        let d = bs_hypothesis_defect(&g, &[f.clone(), vec![0.0; 3]], Caps::default()).unwrap();
        assert_eq!(d.defect, f64::NEG_INFINITY);
        assert!(d.admissible());
    }

    #[test]
    fn not_a_probability() {
        let g = grid1d(0.0, 2.0, 3, NodeMass::Trapezoid).unwrap();
        assert!(matches!(
            bs_check(&g, &[vec![0.0; 3]], 1e-12, Caps::default()),
            Err(Error::NotProbability(_))
        ));
    }
}
