//! Wasserstein barycenters of finitely supported mixtures `Ω = Σ λᵢ δ_{μᵢ}`.
//!
//! Two routes compute the same optimum: a multi-marginal plan pushed forward
//! by the pointwise barycenter selection, and a single joint LP over one
//! coupling per component sharing a free target marginal.

mod diagnostics;
mod direct;
mod mmot;

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::{same_space, DiscreteMeasure};
use crate::space::MetricMeasureSpace;
use crate::transport::{w2_exact, Coupling};

pub use diagnostics::{
    joint_plan, mixture_variance, superposition_check, superposition_check_plan, uniqueness_gap, JointAtom, JointPlan,
    PlanSource, UniquenessGap, SUPERPOSITION_TOL,
};
pub use direct::{barycenter_lp, FrankWolfeStats, FW_MAX_STEPS};
pub use mmot::{barycenter_from_mmot, mmot_cost, solve_mmot, MultiAtom, MultiCoupling, ATOM_FLOOR};

/// Tolerance on `Σ λᵢ = 1`.
pub const LAMBDA_TOL: f64 = 1e-12;

/// `Ω = Σ λᵢ δ_{μᵢ}` with every `μᵢ` on one space.
#[derive(Clone, Debug)]
pub struct Mixture {
    space: Arc<MetricMeasureSpace>,
    lambdas: Vec<f64>,
    components: Vec<DiscreteMeasure>,
}

pub(crate) fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::BadParams("at least one weight is required".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(Error::BadParams(format!("weight {l} is not positive")));
    }
    let total: f64 = lambdas.iter().sum();
    if (total - 1.0).abs() > LAMBDA_TOL {
        return Err(Error::BadParams(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

impl Mixture {
    pub fn new(components: Vec<(f64, DiscreteMeasure)>) -> Result<Mixture> {
        let (lambdas, components): (Vec<f64>, Vec<DiscreteMeasure>) = components.into_iter().unzip();
        check_lambdas(&lambdas)?;
        let space = components[0].space().clone();
        if components.iter().any(|c| !same_space(c.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Mixture {
            space,
            lambdas,
            components,
        })
    }

    /// `Ω = δ_μ`.
    pub fn single(mu: DiscreteMeasure) -> Mixture {
        Mixture {
            space: mu.space().clone(),
            lambdas: vec![1.0],
            components: vec![mu],
        }
    }

    pub fn space(&self) -> &Arc<MetricMeasureSpace> {
        &self.space
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn components(&self) -> &[DiscreteMeasure] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components sorted by weight vector, then by `λ`. Solvers work on this
    /// order so that the caller's listing order cannot change the result.
    pub(crate) fn canonical(&self) -> Mixture {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let wa = self.components[a].weights();
            let wb = self.components[b].weights();
            wa.iter()
                .zip(wb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
                .then(self.lambdas[a].total_cmp(&self.lambdas[b]))
        });
        Mixture {
            space: self.space.clone(),
            lambdas: order.iter().map(|&i| self.lambdas[i]).collect(),
            components: order.iter().map(|&i| self.components[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Lp,
    Mmot,
}

/// Which point of the optimal face to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The deterministic simplex vertex.
    Vertex,
    /// The optimal barycenter of least relative entropy.
    MinEntropy,
}

fn weights_of<S: Serializer>(mu: &DiscreteMeasure, s: S) -> std::result::Result<S::Ok, S::Error> {
    mu.weights().serialize(s)
}

fn opt_weights_of<S: Serializer>(mu: &Option<DiscreteMeasure>, s: S) -> std::result::Result<S::Ok, S::Error> {
    mu.as_ref().map(|m| m.weights()).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct BarycenterSolution {
    #[serde(serialize_with = "weights_of")]
    pub barycenter: DiscreteMeasure,
    /// `Σ λᵢ W₂²(μᵢ, ν̄)`, recomputed with the exact two-marginal solver.
    pub objective: f64,
    /// `W₂(μᵢ, ν̄)` in the caller's component order.
    pub component_w2: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub route: Route,
    pub mode: Mode,
    /// Optimal value of the joint LP (LP route).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mmot_plan: Option<MultiCoupling>,
    /// Barycenter index chosen for each atom of `mmot_plan`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<usize>>,
    /// `objective − plan cost` (MMOT route).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_gap: Option<f64>,
    /// Optimal couplings `(μᵢ, ν̄)` in the caller's component order.
    pub component_couplings: Vec<Coupling>,
    /// The LP vertex before the entropy pass.
    #[serde(serialize_with = "opt_weights_of", skip_serializing_if = "Option::is_none")]
    pub vertex_barycenter: Option<DiscreteMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frank_wolfe: Option<FrankWolfeStats>,
}

/// Exact `Σ λᵢ W₂²(μᵢ, ν)`, per-component `W₂`, and optimal couplings.
pub(crate) fn evaluate(omega: &Mixture, nu: &DiscreteMeasure) -> Result<(f64, Vec<f64>, Vec<Coupling>)> {
    let mut objective = 0.0;
    let mut w2 = Vec::with_capacity(omega.len());
    let mut couplings = Vec::with_capacity(omega.len());
    for (mu, &l) in omega.components.iter().zip(&omega.lambdas) {
        let r = w2_exact(mu, nu)?;
        let (Some(c), Some(sq)) = (r.coupling, r.w2_squared.finite()) else {
            return Err(Error::InfiniteCost);
        };
        objective += l * sq;
        w2.push(sq.sqrt());
        couplings.push(c);
    }
    Ok((objective, w2, couplings))
}

/// `F(ν) = Σ λᵢ W₂²(μᵢ, ν)`, `+∞` allowed.
pub fn barycenter_objective(omega: &Mixture, nu: &DiscreteMeasure) -> Result<crate::Ext> {
    let mut total = crate::Ext::ZERO;
    for (mu, &l) in omega.components.iter().zip(&omega.lambdas) {
        total = total + w2_exact(mu, nu)?.w2_squared.scale(l)?;
    }
    Ok(total)
}

/// Dispatches on the route. The entropy pass needs the LP route.
pub fn barycenter(omega: &Mixture, route: Route, mode: Mode, caps: crate::Caps) -> Result<BarycenterSolution> {
    match (route, mode) {
        (Route::Lp, _) => barycenter_lp(omega, mode, caps),
        (Route::Mmot, Mode::Vertex) => {
            let plan = solve_mmot(omega.components(), omega.lambdas(), caps)?;
            barycenter_from_mmot(&plan)
        }
        (Route::Mmot, Mode::MinEntropy) => Err(Error::BadParams(
            "min-entropy mode searches the LP optimal face; use the lp route".into(),
        )),
    }
}
