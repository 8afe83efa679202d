//! Barycenter sets, Brunn–Minkowski and Blaschke–Santaló checks.

mod common;

use std::sync::Arc;

use barycd_core::ineq::{
    barycenter_set, bm_check, bs_check, bs_complete, bs_hypothesis_defect, log_bm_check, PointSet,
};
use barycd_core::{Caps, MetricMeasureSpace};
use common::planar_space;
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

/// Index masks for `k` nonempty subsets of an `n`-point space.
fn masks(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    prop::collection::vec(
        prop::collection::vec(any::<bool>(), n).prop_filter("nonempty", |m| m.iter().any(|&b| b)),
        k,
    )
}

fn to_set(space: &MetricMeasureSpace, mask: &[bool]) -> PointSet {
    PointSet::new(space, (0..mask.len()).filter(|&i| mask[i]).collect()).unwrap()
}

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1..1.0f64, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        let mut l: Vec<f64> = w.iter().map(|x| x / s).collect();
        let rest: f64 = l[1..].iter().sum();
        l[0] = 1.0 - rest;
        l
    })
}

/// Space, base set masks, extra masks to union in, and weights.
type SetsCase = (Arc<MetricMeasureSpace>, Vec<Vec<bool>>, Vec<Vec<bool>>, Vec<f64>);

fn sets_case() -> impl Strategy<Value = SetsCase> {
    (planar_space(7), 2..=3usize).prop_flat_map(|(s, k)| {
        let n = s.len();
        (Just(s), masks(n, k), masks(n, k), weights(k))
    })
}

fn probability(space: &MetricMeasureSpace) -> MetricMeasureSpace {
    let t = space.total_mass();
    space
        .with_ref_mass(space.ref_mass().iter().map(|m| m / t).collect())
        .unwrap()
}

fn functions(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), k)
}

proptest! {
    #[test]
    fn enlarging_a_set_never_shrinks_the_barycenter_set((s, a, extra, l) in sets_case()) {
        let small: Vec<PointSet> = a.iter().map(|m| to_set(&s, m)).collect();
        let large: Vec<PointSet> = a
            .iter()
            .zip(&extra)
            .map(|(m, e)| to_set(&s, &m.iter().zip(e).map(|(x, y)| *x || *y).collect::<Vec<_>>()))
            .collect();
        let e_small = barycenter_set(&s, &small, &l, caps()).unwrap().set.unwrap();
        let e_large = barycenter_set(&s, &large, &l, caps()).unwrap().set.unwrap();
        for i in e_small.indices() {
            prop_assert!(e_large.indices().contains(i));
        }
    }

    #[test]
    fn equal_sets_satisfy_linear_bm((s, a, _, l) in sets_case()) {
        let set = to_set(&s, &a[0]);
        let sets = vec![set; l.len()];
        let r = bm_check(&s, &sets, &l, 1.0, 1e-12, caps()).unwrap();
        prop_assert!(r.slack.unwrap() >= -1e-12);
    }

    #[test]
    fn log_bm_lhs_is_below_the_largest_mass((s, a, _, l) in sets_case()) {
        let sets: Vec<PointSet> = a.iter().map(|m| to_set(&s, m)).collect();
        let r = log_bm_check(&s, &sets, &l, 1e-12, caps()).unwrap();
        let max = sets.iter().map(|e| e.mass(&s)).fold(0.0, f64::max);
        prop_assert!(r.lhs.unwrap() <= max * (1.0 + 1e-12));
    }

    #[test]
    fn completion_is_always_admissible(
        (s, fs) in (planar_space(7), 1..=2usize).prop_flat_map(|(s, k)| {
            let n = s.len();
            (Just(s), functions(n, k))
        })
    ) {
        let mut fs = fs;
        fs.push(bs_complete(&s, &fs, caps()).unwrap());
        let d = bs_hypothesis_defect(&s, &fs, caps()).unwrap();
        prop_assert!(d.defect <= 1e-12, "defect {}", d.defect);
    }

    #[test]
    fn balanced_shifts_change_nothing(
        (s, fs, c) in planar_space(7).prop_flat_map(|s| {
            let n = s.len();
            (Just(s), functions(n, 1), prop::collection::vec(-1.0..1.0f64, 1))
        })
    ) {
        let s = probability(&s);
        let mut fs = fs;
        fs.push(bs_complete(&s, &fs, caps()).unwrap());
        let shifted: Vec<Vec<f64>> = vec![
            fs[0].iter().map(|v| v + c[0]).collect(),
            fs[1].iter().map(|v| v - c[0]).collect(),
        ];
        let d0 = bs_hypothesis_defect(&s, &fs, caps()).unwrap().defect;
        let d1 = bs_hypothesis_defect(&s, &shifted, caps()).unwrap().defect;
        prop_assert!((d0 - d1).abs() <= 1e-12);
        let r0 = bs_check(&s, &fs, 1e-9, caps()).unwrap();
        let r1 = bs_check(&s, &shifted, 1e-9, caps()).unwrap();
        prop_assert!((r0.lhs.unwrap() - r1.lhs.unwrap()).abs() <= 1e-12 * r0.lhs.unwrap().max(1.0));
    }
}

#[test]
fn indicator_style_functions() {
    let g = barycd_core::generate::grid1d(0.0, 1.0, 5, barycd_core::generate::NodeMass::Uniform).unwrap();
    let ninf = f64::NEG_INFINITY;
    // Only points 0 and 4 count; the completion is the worst case over them.
    let f = vec![0.0, ninf, ninf, ninf, 0.0];
    let done = bs_complete(&g, std::slice::from_ref(&f), caps()).unwrap();
    assert_eq!(done[0], 0.0);
    assert_eq!(done[4], 0.0);
    // Half of d²/2 with d = ½.
    assert_eq!(done[2], 0.0625);
    let r = bs_check(&g, &[f, done], 1e-12, caps()).unwrap();
    assert!(r.passed());
    // All points excluded: no tuples, defect is −∞.
    let none = vec![ninf; 5];
    assert_eq!(
        bs_hypothesis_defect(&g, &[none.clone(), none], caps()).unwrap().defect,
        ninf
    );
}

#[test]
fn bad_inputs() {
    let g = barycd_core::generate::grid1d(0.0, 2.0, 3, barycd_core::generate::NodeMass::Trapezoid).unwrap();
    assert!(PointSet::new(&g, vec![]).is_err());
    assert!(PointSet::new(&g, vec![1, 1]).is_err());
    assert!(PointSet::new(&g, vec![3]).is_err());
    // Total mass 2 is not a probability.
    let f = vec![vec![0.0; 3], vec![0.0; 3]];
    assert!(matches!(
        bs_check(&g, &f, 1e-12, caps()),
        Err(barycd_core::Error::NotProbability(_))
    ));
    let p = probability(&g);
    let big = vec![vec![5.0; 3], vec![5.0; 3]];
    assert!(matches!(
        bs_check(&p, &big, 1e-12, caps()),
        Err(barycd_core::Error::Inadmissible { .. })
    ));
}
