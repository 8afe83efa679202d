//! Entropies and pushforwards of discrete measures.

mod common;

use barycd_core::measure::{pushforward_to, relative_entropy, renyi_entropy, u_n};
use barycd_core::{DiscreteMeasure, Ext};
use common::{measure_on, planar_space, raw_weights};
use proptest::prelude::*;

fn space_and_weights() -> impl Strategy<Value = (std::sync::Arc<barycd_core::MetricMeasureSpace>, Vec<f64>, Vec<f64>)> {
    planar_space(9).prop_flat_map(|s| {
        let n = s.len();
        (Just(s), raw_weights(n), raw_weights(n))
    })
}

proptest! {
    #[test]
    fn entropy_is_bounded_below_by_log_total_mass((s, w, _) in space_and_weights()) {
        let mu = measure_on(&s, w);
        let floor = -s.total_mass().ln();
        prop_assert!(relative_entropy(&mu).to_f64() >= floor - 1e-12);
        let m = DiscreteMeasure::reference(s.clone()).unwrap();
        prop_assert!((relative_entropy(&m).to_f64() - floor).abs() < 1e-12);
    }

    #[test]
    fn renyi_is_midpoint_concave((s, a, b) in space_and_weights(), n in 1.0..20.0f64) {
        let (mu, nu) = (measure_on(&s, a), measure_on(&s, b));
        let mid = mu.blend(&nu, 0.5).unwrap();
        let avg = 0.5 * (renyi_entropy(&mu, n).unwrap() + renyi_entropy(&nu, n).unwrap());
        prop_assert!(renyi_entropy(&mid, n).unwrap() >= avg - 1e-12);
    }

    #[test]
    fn u_n_bounded_by_total_mass((s, w, _) in space_and_weights(), n in 1.0..50.0f64) {
        let mu = measure_on(&s, w);
        let u = u_n(&mu, n).unwrap();
        prop_assert!(u > 0.0);
        prop_assert!(u <= s.total_mass().powf(1.0 / n) * (1.0 + 1e-12));
    }

    #[test]
    fn pushforward_keeps_mass_and_composes(
        (s, w, _) in space_and_weights(),
        f in prop::collection::vec(0..9usize, 9),
        g in prop::collection::vec(0..9usize, 9),
    ) {
        let n = s.len();
        let f: Vec<usize> = f[..n].iter().map(|i| i % n).collect();
        let g: Vec<usize> = g[..n].iter().map(|i| i % n).collect();
        let mu = measure_on(&s, w);
        let once = mu.pushforward(&f).unwrap();
        let total: f64 = once.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-14);
        let twice = once.pushforward(&g).unwrap();
        let gf: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        let direct = pushforward_to(&mu, &gf, s.clone()).unwrap();
        for (a, b) in twice.weights().iter().zip(direct.weights()) {
            prop_assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn dirac_entropy_is_minus_log_mass() {
    let s = std::sync::Arc::new(
        barycd_core::generate::grid1d(0.0, 1.0, 5, barycd_core::generate::NodeMass::Trapezoid).unwrap(),
    );
    // End nodes carry half a step.
    let d = DiscreteMeasure::dirac(s.clone(), 0).unwrap();
    assert!((relative_entropy(&d).to_f64() - 8f64.ln()).abs() < 1e-14);
    let mid = DiscreteMeasure::dirac(s, 2).unwrap();
    assert_eq!(relative_entropy(&mid), Ext::Finite(4f64.ln()));
    assert!((u_n(&mid, 2.0).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn invalid_measures_are_rejected() {
    let s = std::sync::Arc::new(barycd_core::generate::circle(4.0, 4).unwrap());
    assert!(DiscreteMeasure::new(s.clone(), vec![0.5, 0.5, 0.0, 0.1]).is_err());
    assert!(DiscreteMeasure::dirac(s.clone(), 4).is_err());
    assert!(DiscreteMeasure::uniform_on(s, &[]).is_err());
}
