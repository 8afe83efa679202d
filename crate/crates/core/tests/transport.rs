//! Exact and entropic W₂ against oracles and metric properties.

mod common;

use std::sync::Arc;

use barycd_core::generate::{graph, grid1d, NodeMass};
use barycd_core::transport::{extract_monge, w2_entropic, w2_exact, w2_squared};
use barycd_core::{DiscreteMeasure, Ext};
use common::{line_space, measure_on, quantile_w2_squared, raw_weights, space_with_measures};
use proptest::prelude::*;

fn w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    w2_exact(mu, nu).unwrap().w2.to_f64()
}

proptest! {
    #[test]
    fn matches_quantile_oracle_on_the_line(
        (space, xs, a, b) in line_space(9).prop_flat_map(|(s, xs)| {
            let n = xs.len();
            (Just(s), Just(xs), raw_weights(n), raw_weights(n))
        })
    ) {
        let (mu, nu) = (measure_on(&space, a), measure_on(&space, b));
        let exact = w2_squared(&mu, &nu).unwrap().to_f64();
        let oracle = quantile_w2_squared(&xs, mu.weights(), nu.weights());
        prop_assert!((exact - oracle).abs() < 1e-9, "lp {} vs quantile {}", exact, oracle);
    }

    #[test]
    fn symmetric_and_zero_on_the_diagonal((_, ms) in space_with_measures(7, 2)) {
        let (mu, nu) = (&ms[0], &ms[1]);
        prop_assert!((w2(mu, nu) - w2(nu, mu)).abs() < 1e-8);
        prop_assert_eq!(w2(mu, mu), 0.0);
        if mu.weights().iter().zip(nu.weights()).any(|(a, b)| (a - b).abs() > 1e-6) {
            prop_assert!(w2(mu, nu) > 0.0);
        }
    }

    #[test]
    fn triangle_inequality((_, ms) in space_with_measures(7, 3)) {
        let (a, b, c) = (&ms[0], &ms[1], &ms[2]);
        prop_assert!(w2(a, c) <= w2(a, b) + w2(b, c) + 1e-8);
    }

    #[test]
    fn squared_distance_is_convex_in_the_second_argument(
        (_, ms) in space_with_measures(7, 3),
        l in 0.01..0.99f64,
    ) {
        let (mu, n1, n2) = (&ms[0], &ms[1], &ms[2]);
        let mix = n2.blend(n1, l).unwrap();
        let lhs = w2_squared(mu, &mix).unwrap().to_f64();
        let rhs = l * w2_squared(mu, n1).unwrap().to_f64() + (1.0 - l) * w2_squared(mu, n2).unwrap().to_f64();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn couplings_have_the_right_marginals((_, ms) in space_with_measures(8, 2)) {
        let r = w2_exact(&ms[0], &ms[1]).unwrap();
        let c = r.coupling.unwrap();
        prop_assert!(c.is_valid());
        prop_assert!(c.entries.iter().all(|e| e.2 > 0.0));
    }

    #[test]
    fn entropic_cost_approaches_exact((_, ms) in space_with_measures(6, 2)) {
        let exact = w2_squared(&ms[0], &ms[1]).unwrap().to_f64();
        let reg = w2_entropic(&ms[0], &ms[1], 1e-3, 100_000, 1e-10).unwrap();
        prop_assert!(reg.marginal_error < 1e-6);
        prop_assert!(reg.cost >= exact - 1e-6);
        prop_assert!(reg.cost <= exact + 2e-2, "entropic {} exact {}", reg.cost, exact);
    }
}

#[test]
fn known_values() {
    let g = Arc::new(grid1d(0.0, 1.0, 5, NodeMass::Uniform).unwrap());
    let d0 = DiscreteMeasure::dirac(g.clone(), 0).unwrap();
    let d4 = DiscreteMeasure::dirac(g.clone(), 4).unwrap();
    assert_eq!(w2(&d0, &d4), 1.0);
    // Half the mass moves a quarter.
    let u01 = DiscreteMeasure::uniform_on(g.clone(), &[0, 1]).unwrap();
    assert!((w2_squared(&d0, &u01).unwrap().to_f64() - 0.5 * 0.0625).abs() < 1e-15);
    // Shifting a uniform block by one step costs one step squared.
    let a = DiscreteMeasure::uniform_on(g.clone(), &[0, 1, 2]).unwrap();
    let b = DiscreteMeasure::uniform_on(g, &[1, 2, 3]).unwrap();
    assert!((w2_squared(&a, &b).unwrap().to_f64() - 0.0625).abs() < 1e-15);
}

#[test]
fn separated_classes_cost_infinity() {
    let (g, _) = graph(4, &[(0, 1, 1.0), (2, 3, 1.0)], vec![0.25; 4]).unwrap();
    let g = Arc::new(g);
    let a = DiscreteMeasure::uniform_on(g.clone(), &[0, 1]).unwrap();
    let b = DiscreteMeasure::uniform_on(g.clone(), &[1, 2]).unwrap();
    let r = w2_exact(&a, &b).unwrap();
    assert_eq!(r.w2, Ext::Infinite);
    assert!(r.coupling.is_none());
    let c = DiscreteMeasure::dirac(g, 0).unwrap();
    assert_eq!(w2_squared(&a, &c).unwrap(), Ext::Finite(0.5));
}

#[test]
fn monotone_line_plans_are_maps() {
    let g = Arc::new(grid1d(0.0, 1.0, 9, NodeMass::Uniform).unwrap());
    let a = DiscreteMeasure::uniform_on(g.clone(), &[0, 2, 4]).unwrap();
    let b = DiscreteMeasure::uniform_on(g.clone(), &[5, 6, 8]).unwrap();
    let report = extract_monge(&w2_exact(&a, &b).unwrap().coupling.unwrap(), 1e-9);
    assert!(report.is_map);
    assert_eq!(report.map, vec![(0, 5), (2, 6), (4, 8)]);
    // One atom must split in two.
    let d = DiscreteMeasure::dirac(g.clone(), 0).unwrap();
    let split = DiscreteMeasure::uniform_on(g, &[3, 7]).unwrap();
    let report = extract_monge(&w2_exact(&d, &split).unwrap().coupling.unwrap(), 1e-9);
    assert!(!report.is_map);
    assert_eq!(report.offending[0].row, 0);
}
