//! Finite extended metric measure spaces `(X, d, m)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Ext;

pub const DEFAULT_POINT_CAP: usize = 4096;
pub const DEFAULT_TUPLE_CAP: usize = 200_000;

/// Relative slack used when comparing barycentric objectives for ties.
pub const ARGMIN_TIE: f64 = 1e-12;

/// Size caps for dense solvers and tuple enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub tuples: usize,
    pub points: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            tuples: DEFAULT_TUPLE_CAP,
            points: DEFAULT_POINT_CAP,
        }
    }
}

/// A finite point set with a symmetric extended distance matrix and a
/// strictly positive reference measure (total mass need not be 1).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMeasureSpace {
    n: usize,
    labels: Vec<Option<String>>,
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<Ext>,
    ref_mass: Vec<f64>,
}

impl MetricMeasureSpace {
    /// Builds a space from a square distance matrix and a reference mass.
    ///
    /// Only structural checks happen here (shape, no NaN, no negative
    /// distances, finite masses). The metric axioms are reported by
    /// [`MetricMeasureSpace::validate`].
    pub fn new(dist: Vec<Vec<Ext>>, ref_mass: Vec<f64>) -> Result<MetricMeasureSpace> {
        Self::with_cap(dist, ref_mass, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(dist: Vec<Vec<Ext>>, ref_mass: Vec<f64>, point_cap: usize) -> Result<MetricMeasureSpace> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::BadParams("space has no points".into()));
        }
        if n > point_cap {
            return Err(Error::TooLarge {
                what: "points",
                size: n,
                cap: point_cap,
            });
        }
        if ref_mass.len() != n {
            return Err(Error::BadParams(format!(
                "reference mass has {} entries for {n} points",
                ref_mass.len()
            )));
        }
        if let Some(m) = ref_mass.iter().find(|m| !m.is_finite()) {
            return Err(Error::BadParams(format!("reference mass {m} is not finite")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in dist.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadParams(format!(
                    "distance row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for d in row {
                if let Ext::Finite(x) = d {
                    if !(x >= 0.0) {
                        return Err(Error::BadParams(format!("negative distance {x} in row {i}")));
                    }
                }
                flat.push(d);
            }
        }
        Ok(MetricMeasureSpace {
            n,
            labels: vec![None; n],
            coords: None,
            dist: flat,
            ref_mass,
        })
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::BadParams("label count differs from point count".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::BadParams("coordinate count differs from point count".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Ext {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn dist_sq(&self, i: usize, j: usize) -> Ext {
        self.dist(i, j).square()
    }

    pub fn ref_mass(&self) -> &[f64] {
        &self.ref_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.ref_mass.iter().sum()
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.n })
        }
    }

    /// Copy with every distance multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> MetricMeasureSpace {
        assert!(s > 0.0 && s.is_finite());
        let mut out = self.clone();
        for d in &mut out.dist {
            if let Ext::Finite(x) = d {
                *x *= s;
            }
        }
        out
    }

    /// Copy with a different reference measure.
    pub fn with_ref_mass(&self, ref_mass: Vec<f64>) -> Result<MetricMeasureSpace> {
        if ref_mass.len() != self.n {
            return Err(Error::BadParams("reference mass length mismatch".into()));
        }
        let mut out = self.clone();
        out.ref_mass = ref_mass;
        Ok(out)
    }

    /// Finite-distance class id of every point, numbered 0, 1, … in order of
    /// each class's lowest member.
    pub fn finite_classes(&self) -> Vec<usize> {
        let mut class = vec![usize::MAX; self.n];
        let mut next = 0;
        for i in 0..self.n {
            if class[i] != usize::MAX {
                continue;
            }
            let mut stack = vec![i];
            class[i] = next;
            while let Some(a) = stack.pop() {
                for b in 0..self.n {
                    if class[b] == usize::MAX && self.dist(a, b).is_finite() {
                        class[b] = next;
                        stack.push(b);
                    }
                }
            }
            next += 1;
        }
        class
    }

    /// Largest finite distance and the lowest-index pair attaining it.
    pub fn finite_diameter(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if let Ext::Finite(d) = self.dist(i, j) {
                    if d > best.0 {
                        best = (d, i, j);
                    }
                }
            }
        }
        best
    }

    /// Checks the extended metric and full-support axioms.
    pub fn validate(&self) -> ValidationReport {
        validate_space(self)
    }
}

/// One violated axiom with its witness indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub indices: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NonzeroDiagonal,
    Symmetry,
    ZeroOffDiagonal,
    Triangle,
    NonpositiveMass,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_space(space: &MetricMeasureSpace) -> ValidationReport {
    let n = space.len();
    let mut violations = Vec::new();
    let mut push = |rule, indices: Vec<usize>| violations.push(Violation { rule, indices });
    for i in 0..n {
        if space.dist(i, i) != Ext::ZERO {
            push(Rule::NonzeroDiagonal, vec![i]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if space.dist(i, j) != space.dist(j, i) {
                push(Rule::Symmetry, vec![i, j]);
            }
            if space.dist(i, j) == Ext::ZERO || space.dist(j, i) == Ext::ZERO {
                push(Rule::ZeroOffDiagonal, vec![i, j]);
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            let Ext::Finite(direct) = space.dist(i, k) else {
                continue;
            };
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if let Ext::Finite(via) = space.dist(i, j) + space.dist(j, k) {
                    if direct > via + 1e-12 * via.max(1.0) {
                        push(Rule::Triangle, vec![i, j, k]);
                    }
                }
            }
        }
    }
    for (i, &m) in space.ref_mass().iter().enumerate() {
        if !(m > 0.0) {
            push(Rule::NonpositiveMass, vec![i]);
        }
    }
    ValidationReport { violations }
}

/// Finitely supported probability `Σ λᵢ δ_{xᵢ}` with distinct points.
///
/// Entries are kept sorted by point index so that objective sums do not
/// depend on the order the caller listed them in.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointSet {
    entries: Vec<(usize, f64)>,
}

impl WeightedPointSet {
    pub fn new(space: &MetricMeasureSpace, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidMeasure("empty point set".into()));
        }
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidMeasure(format!("duplicate point {}", w[0].0)));
            }
        }
        let mut total = 0.0;
        for &(i, w) in &entries {
            space.check_index(i)?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("weight {w} at point {i}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(WeightedPointSet { entries })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }
}

/// `Σ λᵢ d²(xᵢ, y)` for one candidate `y`.
pub fn barycentric_objective(space: &MetricMeasureSpace, points: &[usize], weights: &[f64], y: usize) -> Ext {
    let mut total = 0.0;
    for (&x, &w) in points.iter().zip(weights) {
        match space.dist(x, y) {
            Ext::Finite(d) => total += w * d * d,
            Ext::Infinite => return Ext::Infinite,
        }
    }
    Ext::Finite(total)
}

/// Lowest-index minimizer of `y ↦ Σ λᵢ d²(xᵢ, y)` and the minimum.
///
/// Values within [`ARGMIN_TIE`] of the optimum count as ties, so rounding in
/// the weights cannot move the selection off the lowest index. `points` may
/// repeat (tuples of a multi-marginal plan do).
pub fn barycenter_scan(space: &MetricMeasureSpace, points: &[usize], weights: &[f64]) -> Result<(usize, f64)> {
    let (set, best) = barycenter_argmin_set(space, points, weights)?;
    Ok((set[0], best))
}

/// Every minimizer within [`ARGMIN_TIE`] (relative) of the optimum.
pub fn barycenter_argmin_set(
    space: &MetricMeasureSpace,
    points: &[usize],
    weights: &[f64],
) -> Result<(Vec<usize>, f64)> {
    let values: Vec<Ext> = (0..space.len())
        .map(|y| barycentric_objective(space, points, weights, y))
        .collect();
    let best = values.iter().filter_map(|v| v.finite()).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::AllInfinite);
    }
    let cutoff = best + ARGMIN_TIE * best.abs().max(1.0);
    let set = values
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v, Ext::Finite(x) if *x <= cutoff))
        .map(|(y, _)| y)
        .collect();
    Ok((set, best))
}

/// Barycenter of a weighted point set: deterministic selection (lowest index
/// among minimizers) and the attained value.
pub fn point_barycenter(space: &MetricMeasureSpace, input: &WeightedPointSet) -> Result<(usize, f64)> {
    let (points, weights): (Vec<usize>, Vec<f64>) = input.entries.iter().copied().unzip();
    barycenter_scan(space, &points, &weights)
}

/// Point `z` minimizing `max(|d(i,z) − d(i,j)/2|, |d(z,j) − d(i,j)/2|)` and
/// that minimum. A zero defect means an exact midpoint exists.
pub fn midpoint_search(space: &MetricMeasureSpace, i: usize, j: usize) -> Result<(usize, f64)> {
    space.check_index(i)?;
    space.check_index(j)?;
    let Ext::Finite(dij) = space.dist(i, j) else {
        return Err(Error::InfiniteDistance(i, j));
    };
    let half = dij / 2.0;
    let mut best: Option<(usize, f64)> = None;
    for z in 0..space.len() {
        if let (Ext::Finite(a), Ext::Finite(b)) = (space.dist(i, z), space.dist(z, j)) {
            let defect = (a - half).abs().max((b - half).abs());
            if best.is_none_or(|(_, d)| defect < d) {
                best = Some((z, defect));
            }
        }
    }
    // z = i is always a finite candidate.
    Ok(best.expect("i is its own finite candidate"))
}

/// Distance and covering defects of a map `phi: source → target`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproximationDefect {
    pub distance_defect: f64,
    pub covering_defect: Ext,
}

impl ApproximationDefect {
    /// The `ε` for which `phi` is an ε-approximation.
    pub fn epsilon(&self) -> Ext {
        Ext::Finite(self.distance_defect).max(self.covering_defect)
    }
}

pub fn eps_approximation_defect(
    source: &MetricMeasureSpace,
    target: &MetricMeasureSpace,
    phi: &[usize],
) -> Result<ApproximationDefect> {
    if phi.len() != source.len() {
        return Err(Error::BadParams(format!(
            "map has {} entries for {} source points",
            phi.len(),
            source.len()
        )));
    }
    for &y in phi {
        target.check_index(y)?;
    }
    let mut distance_defect: f64 = 0.0;
    for x in 0..source.len() {
        for y in x + 1..source.len() {
            match (source.dist(x, y), target.dist(phi[x], phi[y])) {
                (Ext::Finite(a), Ext::Finite(b)) => distance_defect = distance_defect.max((a - b).abs()),
                (Ext::Infinite, Ext::Infinite) => {}
                _ => return Err(Error::MixedFiniteness(x, y)),
            }
        }
    }
    let mut covering_defect = Ext::ZERO;
    for x2 in 0..target.len() {
        let nearest = phi
            .iter()
            .map(|&img| target.dist(img, x2))
            .fold(Ext::Infinite, Ext::min);
        covering_defect = covering_defect.max(nearest);
    }
    Ok(ApproximationDefect {
        distance_defect,
        covering_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{Finite, Infinite};
    use crate::generate::{circle, grid1d, NodeMass};

    fn two_point(d01: f64, d10: f64) -> MetricMeasureSpace {
        MetricMeasureSpace::new(
            vec![vec![Finite(0.0), Finite(d01)], vec![Finite(d10), Finite(0.0)]],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    fn matrix(d: &[&[f64]], m: Vec<f64>) -> MetricMeasureSpace {
        let rows = d.iter().map(|r| r.iter().map(|&x| Ext::from(x)).collect()).collect();
        MetricMeasureSpace::new(rows, m).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(two_point(1.0, 1.0).validate().is_clean());

        let asym = two_point(1.0, 2.0).validate();
        assert_eq!(
            asym.violations,
            vec![Violation {
                rule: Rule::Symmetry,
                indices: vec![0, 1]
            }]
        );

        let tri = matrix(&[&[0.0, 1.0, 5.0], &[1.0, 0.0, 1.0], &[5.0, 1.0, 0.0]], vec![1.0; 3]).validate();
        assert_eq!(
            tri.violations,
            vec![Violation {
                rule: Rule::Triangle,
                indices: vec![0, 1, 2]
            }]
        );
    }

    #[test]
    fn validate_flags_mass_and_zero_distance() {
        let s = matrix(&[&[0.0, 0.0], &[0.0, 0.0]], vec![1.0, 0.0]);
        let rules: Vec<Rule> = s.validate().violations.iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::ZeroOffDiagonal, Rule::NonpositiveMass]);
    }

    #[test]
    fn infinite_triples_are_vacuous() {
        let s = MetricMeasureSpace::new(
            vec![
                vec![Finite(0.0), Finite(1.0), Infinite],
                vec![Finite(1.0), Finite(0.0), Infinite],
                vec![Infinite, Infinite, Finite(0.0)],
            ],
            vec![1.0; 3],
        )
        .unwrap();
        assert!(s.validate().is_clean());
        assert_eq!(s.finite_classes(), vec![0, 0, 1]);
    }

    #[test]
    fn point_barycenter_examples() {
        let g = grid1d(0.0, 1.0, 3, NodeMass::Trapezoid).unwrap();
        let set = WeightedPointSet::new(&g, vec![(2, 0.5), (0, 0.5)]).unwrap();
        assert_eq!(point_barycenter(&g, &set).unwrap(), (1, 0.25));

        let single = WeightedPointSet::new(&g, vec![(2, 1.0)]).unwrap();
        assert_eq!(point_barycenter(&g, &single).unwrap(), (2, 0.0));

        let tri = circle(3.0, 3).unwrap();
        let third = 1.0 / 3.0;
        let set = WeightedPointSet::new(&tri, vec![(0, third), (1, third), (2, 1.0 - 2.0 * third)]).unwrap();
        let (y, v) = point_barycenter(&tri, &set).unwrap();
        assert_eq!(y, 0);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn point_barycenter_all_infinite() {
        let s = MetricMeasureSpace::new(
            vec![vec![Finite(0.0), Infinite], vec![Infinite, Finite(0.0)]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let set = WeightedPointSet::new(&s, vec![(0, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(point_barycenter(&s, &set).unwrap_err(), Error::AllInfinite);
    }

    #[test]
    fn weighted_point_set_rejects_bad_input() {
        let g = grid1d(0.0, 1.0, 3, NodeMass::Trapezoid).unwrap();
        assert!(WeightedPointSet::new(&g, vec![(0, 0.5), (0, 0.5)]).is_err());
        assert!(WeightedPointSet::new(&g, vec![(0, 0.4), (1, 0.5)]).is_err());
        assert!(WeightedPointSet::new(&g, vec![(3, 1.0)]).is_err());
        assert!(WeightedPointSet::new(&g, vec![(0, 1.5), (1, -0.5)]).is_err());
    }

    #[test]
    fn midpoint_examples() {
        let g = grid1d(0.0, 1.0, 3, NodeMass::Trapezoid).unwrap();
        assert_eq!(midpoint_search(&g, 0, 2).unwrap(), (1, 0.0));
        assert_eq!(midpoint_search(&g, 1, 1).unwrap(), (1, 0.0));
        let (_, defect) = midpoint_search(&two_point(1.0, 1.0), 0, 1).unwrap();
        assert_eq!(defect, 0.5);

        let s = MetricMeasureSpace::new(
            vec![vec![Finite(0.0), Infinite], vec![Infinite, Finite(0.0)]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(midpoint_search(&s, 0, 1).unwrap_err(), Error::InfiniteDistance(0, 1));
    }

    #[test]
    fn eps_approximation_examples() {
        let g = grid1d(0.0, 1.0, 5, NodeMass::Trapezoid).unwrap();
        let id: Vec<usize> = (0..5).collect();
        let d = eps_approximation_defect(&g, &g, &id).unwrap();
        assert_eq!((d.distance_defect, d.covering_defect), (0.0, Finite(0.0)));

        let reflect: Vec<usize> = (0..5).rev().collect();
        let d = eps_approximation_defect(&g, &g, &reflect).unwrap();
        assert_eq!((d.distance_defect, d.covering_defect), (0.0, Finite(0.0)));

        let two = two_point(1.0, 1.0);
        let d = eps_approximation_defect(&two, &two, &[0, 0]).unwrap();
        assert_eq!((d.distance_defect, d.covering_defect), (1.0, Finite(1.0)));
        assert_eq!(d.epsilon(), Finite(1.0));
    }

    #[test]
    fn eps_approximation_mixed_finiteness() {
        let split = MetricMeasureSpace::new(
            vec![vec![Finite(0.0), Infinite], vec![Infinite, Finite(0.0)]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let joined = two_point(1.0, 1.0);
        assert_eq!(
            eps_approximation_defect(&split, &joined, &[0, 1]).unwrap_err(),
            Error::MixedFiniteness(0, 1)
        );
    }
}
