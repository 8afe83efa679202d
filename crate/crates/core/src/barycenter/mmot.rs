//! Multi-marginal transport with the barycentric cost and the pushforward
//! construction `ν̄ = T♯π`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_lambdas, evaluate, BarycenterSolution, Mixture, Mode, Route};
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::measure::{same_space, DiscreteMeasure};
use crate::space::{barycenter_scan, Caps, MetricMeasureSpace};
use crate::transport::MARGINAL_TOL;
use crate::tuples;

/// Plan atoms at or below this mass are dropped.
pub const ATOM_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiAtom {
    pub tuple: Vec<usize>,
    pub mass: f64,
}

/// Sparse joint measure on `Xⁿ` with prescribed one-dimensional marginals.
#[derive(Clone, Debug, Serialize)]
pub struct MultiCoupling {
    #[serde(skip)]
    space: Arc<MetricMeasureSpace>,
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub marginals: Vec<DiscreteMeasure>,
    pub atoms: Vec<MultiAtom>,
    /// `Σ mass · c(tuple)`.
    pub cost: f64,
}

impl MultiCoupling {
    /// Validates shapes and recomputes the cost. Atoms of infinite cost are
    /// rejected.
    pub fn new(marginals: Vec<DiscreteMeasure>, weights: Vec<f64>, mut atoms: Vec<MultiAtom>) -> Result<MultiCoupling> {
        check_lambdas(&weights)?;
        if marginals.len() != weights.len() {
            return Err(Error::BadParams("one weight per marginal is required".into()));
        }
        let space = marginals[0].space().clone();
        if marginals.iter().any(|m| !same_space(m.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        atoms.retain(|a| a.mass > 0.0);
        let mut cost = 0.0;
        for a in &atoms {
            if a.tuple.len() != marginals.len() || !a.mass.is_finite() {
                return Err(Error::BadParams("atom does not match the marginal count".into()));
            }
            for &x in &a.tuple {
                space.check_index(x)?;
            }
            let (c, _) = mmot_cost(&space, &weights, &a.tuple).map_err(|_| Error::InfiniteCost)?;
            cost += a.mass * c;
        }
        Ok(MultiCoupling {
            space,
            weights,
            marginals,
            atoms,
            cost,
        })
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    /// Largest deviation of any one-dimensional marginal.
    pub fn marginal_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, mu) in self.marginals.iter().enumerate() {
            let mut sums = vec![0.0; self.space.len()];
            for a in &self.atoms {
                sums[a.tuple[i]] += a.mass;
            }
            for (s, w) in sums.iter().zip(mu.weights()) {
                worst = worst.max((s - w).abs());
            }
        }
        worst
    }

    pub fn is_valid(&self) -> bool {
        self.marginal_error() <= MARGINAL_TOL
    }
}

/// `min_y Σ λᵢ d²(xᵢ, y)` and its lowest-index minimizer.
pub fn mmot_cost(space: &MetricMeasureSpace, weights: &[f64], tuple: &[usize]) -> Result<(f64, usize)> {
    let (y, v) = barycenter_scan(space, tuple, weights)?;
    Ok((v, y))
}

/// Exact multi-marginal plan over the product of the marginal supports.
///
/// Tuples of infinite cost are not variables; if the remaining ones cannot
/// carry the marginals the problem is `Infeasible`.
pub fn solve_mmot(measures: &[DiscreteMeasure], weights: &[f64], caps: Caps) -> Result<MultiCoupling> {
    check_lambdas(weights)?;
    if measures.len() != weights.len() {
        return Err(Error::BadParams("one weight per marginal is required".into()));
    }
    let space = measures[0].space().clone();
    if measures.iter().any(|m| !same_space(m.space(), &space)) {
        return Err(Error::SpaceMismatch);
    }
    let supports: Vec<Vec<usize>> = measures.iter().map(DiscreteMeasure::support).collect();
    let total = tuples::count(&supports.iter().map(Vec::len).collect::<Vec<_>>(), caps.tuples)?;

    let costs: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|k| {
            let t = tuples::nth(k, &supports);
            mmot_cost(&space, weights, &t).ok().map(|(c, _)| c)
        })
        .collect();

    let mut offsets = Vec::with_capacity(supports.len());
    let mut rows = 0;
    for s in &supports {
        offsets.push(rows);
        rows += s.len();
    }
    let mut rhs = Vec::with_capacity(rows);
    for (mu, s) in measures.iter().zip(&supports) {
        rhs.extend(s.iter().map(|&x| mu.weights()[x]));
    }
    let sizes: Vec<usize> = supports.iter().map(Vec::len).collect();
    let mut lp = LinearProgram::new(rows, rhs);
    let mut tuple_of = Vec::new();
    let mut pos = vec![0; supports.len()];
    for (k, c) in costs.iter().enumerate() {
        if let Some(c) = c {
            tuples::decode(k, &sizes, &mut pos);
            let entries = pos.iter().zip(&offsets).map(|(&p, &o)| (o + p, 1.0)).collect();
            lp.add_column(*c, entries);
            tuple_of.push(k);
        }
    }
    if tuple_of.is_empty() {
        return Err(Error::Infeasible);
    }
    let sol = lp.solve()?;
    let atoms = sol
        .x
        .iter()
        .zip(&tuple_of)
        .filter(|(&m, _)| m > ATOM_FLOOR)
        .map(|(&mass, &k)| MultiAtom {
            tuple: tuples::nth(k, &supports),
            mass,
        })
        .collect();
    MultiCoupling::new(measures.to_vec(), weights.to_vec(), atoms)
}

/// `ν̄ = T♯π` for the lowest-index barycenter selection `T`.
///
/// The objective is recomputed from scratch with the two-marginal solver;
/// `chain_gap` records how far it lands from the plan cost.
pub fn barycenter_from_mmot(plan: &MultiCoupling) -> Result<BarycenterSolution> {
    let space = plan.space();
    let mut nu = vec![0.0; space.len()];
    let mut selection = Vec::with_capacity(plan.atoms.len());
    for a in &plan.atoms {
        let (_, y) = mmot_cost(space, &plan.weights, &a.tuple)?;
        nu[y] += a.mass;
        selection.push(y);
    }
    let barycenter = DiscreteMeasure::normalized(space.clone(), nu)?;
    let omega = Mixture::new(
        plan.weights
            .iter()
            .copied()
            .zip(plan.marginals.iter().cloned())
            .collect(),
    )?;
    let (objective, component_w2, component_couplings) = evaluate(&omega, &barycenter)?;
    Ok(BarycenterSolution {
        barycenter,
        objective,
        component_w2,
        lambdas: plan.weights.clone(),
        route: Route::Mmot,
        mode: Mode::Vertex,
        lp_objective: None,
        mmot_plan: Some(plan.clone()),
        selection: Some(selection),
        chain_gap: Some(objective - plan.cost),
        component_couplings,
        vertex_barycenter: None,
        frank_wolfe: None,
    })
}
