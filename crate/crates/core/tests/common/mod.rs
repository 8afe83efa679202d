//! Strategies and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use barycd_core::generate::euclidean;
use barycd_core::{DiscreteMeasure, MetricMeasureSpace};
use proptest::prelude::*;

/// A planar point cloud with the Euclidean metric and random positive masses.
pub fn planar_space(max_points: usize) -> impl Strategy<Value = Arc<MetricMeasureSpace>> {
    (2..=max_points)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), n),
                prop::collection::vec(0.1..2.0f64, n),
            )
        })
        .prop_map(|(pts, mass)| {
            let coords: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
            Arc::new(MetricMeasureSpace::new(euclidean(&coords), mass).unwrap())
        })
}

/// Points on a line, returned together with their coordinates.
pub fn line_space(max_points: usize) -> impl Strategy<Value = (Arc<MetricMeasureSpace>, Vec<f64>)> {
    prop::collection::vec(-2.0..2.0f64, 2..=max_points).prop_map(|xs| {
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let space = MetricMeasureSpace::new(euclidean(&coords), vec![1.0; xs.len()]).unwrap();
        (Arc::new(space), xs)
    })
}

/// Raw nonnegative weights with at least one positive entry.
pub fn raw_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.05..1.0f64], n)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0.0))
}

pub fn measure_on(space: &Arc<MetricMeasureSpace>, raw: Vec<f64>) -> DiscreteMeasure {
    DiscreteMeasure::normalized(space.clone(), raw).unwrap()
}

/// A space plus `k` random probability measures on it.
pub fn space_with_measures(
    max_points: usize,
    k: usize,
) -> impl Strategy<Value = (Arc<MetricMeasureSpace>, Vec<DiscreteMeasure>)> {
    planar_space(max_points).prop_flat_map(move |s| {
        let n = s.len();
        prop::collection::vec(raw_weights(n), k).prop_map(move |ws| {
            let ms = ws.into_iter().map(|w| measure_on(&s, w)).collect();
            (s.clone(), ms)
        })
    })
}

/// `W₂²` on the real line by integrating the squared difference of the
/// quantile functions; independent of any LP.
pub fn quantile_w2_squared(xs: &[f64], mu: &[f64], nu: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let atoms =
        |w: &[f64]| -> Vec<(f64, f64)> { order.iter().filter(|&&i| w[i] > 0.0).map(|&i| (xs[i], w[i])).collect() };
    let (a, b) = (atoms(mu), atoms(nu));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let step = ra.min(rb);
        total += step * (a[i].0 - b[j].0).powi(2);
        ra -= step;
        rb -= step;
        if ra <= 1e-15 {
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        }
        if rb <= 1e-15 {
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    total
}
