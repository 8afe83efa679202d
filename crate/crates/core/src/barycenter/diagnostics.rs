//! Variance of a mixture, super-position and uniqueness diagnostics.

use serde::Serialize;

use super::{barycenter_lp, barycenter_objective, check_lambdas, mmot_cost, BarycenterSolution, Mixture, Mode};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::DiscreteMeasure;
use crate::report::{AtomWitness, CertificationReport, Inequality, Witness};
use crate::space::{barycentric_objective, Caps, MetricMeasureSpace};

/// Default tolerance on the mass-weighted super-position defect.
pub const SUPERPOSITION_TOL: f64 = 1e-8;

/// `Var(Ω)`: the barycenter LP optimum, `+∞` when no finite coupling exists.
pub fn mixture_variance(omega: &Mixture, caps: Caps) -> Result<Ext> {
    match barycenter_lp(omega, Mode::Vertex, caps) {
        Ok(sol) => Ok(Ext::Finite(sol.objective)),
        Err(Error::Infeasible) => Ok(Ext::Infinite),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanSource {
    /// Multi-marginal atoms with their selected barycenters.
    MmotSelection,
    /// Component couplings glued over the barycenter atoms (conditionally
    /// independent given `y`).
    LpGluing,
    Supplied,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointAtom {
    pub tuple: Vec<usize>,
    pub y: usize,
    pub mass: f64,
}

/// A joint measure on `Xⁿ × X` whose last coordinate is the barycenter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointPlan {
    pub source: PlanSource,
    pub atoms: Vec<JointAtom>,
}

/// Joint plan carried by a solution. On flat optimal faces the glued plan
/// is one choice among many; `source` says which one was built.
pub fn joint_plan(solution: &BarycenterSolution, caps: Caps) -> Result<JointPlan> {
    if let (Some(plan), Some(sel)) = (&solution.mmot_plan, &solution.selection) {
        return Ok(JointPlan {
            source: PlanSource::MmotSelection,
            atoms: plan
                .atoms
                .iter()
                .zip(sel)
                .map(|(a, &y)| JointAtom {
                    tuple: a.tuple.clone(),
                    y,
                    mass: a.mass,
                })
                .collect(),
        });
    }
    if solution.component_couplings.is_empty() {
        return Err(Error::MissingPlan);
    }
    let nu = solution.barycenter.weights();
    let mut atoms = Vec::new();
    for (y, &ny) in nu.iter().enumerate() {
        if ny <= 0.0 {
            continue;
        }
        // Conditional law of each source coordinate given the target y.
        let conditionals: Vec<Vec<(usize, f64)>> = solution
            .component_couplings
            .iter()
            .map(|c| {
                c.entries
                    .iter()
                    .filter(|e| e.1 == y)
                    .map(|&(x, _, w)| (x, w / ny))
                    .collect()
            })
            .collect();
        if conditionals.iter().any(Vec::is_empty) {
            continue;
        }
        let sizes: Vec<usize> = conditionals.iter().map(Vec::len).collect();
        let count = crate::tuples::count(&sizes, caps.tuples.saturating_sub(atoms.len()))?;
        let mut pos = vec![0; sizes.len()];
        for k in 0..count {
            crate::tuples::decode(k, &sizes, &mut pos);
            let mut mass = ny;
            let mut tuple = Vec::with_capacity(sizes.len());
            for (c, &p) in conditionals.iter().zip(&pos) {
                tuple.push(c[p].0);
                mass *= c[p].1;
            }
            if mass > 0.0 {
                atoms.push(JointAtom { tuple, y, mass });
            }
        }
    }
    Ok(JointPlan {
        source: PlanSource::LpGluing,
        atoms,
    })
}

/// Checks that every atom's `y` is a barycenter of its tuple.
///
/// Per atom, `defect = Σ λᵢ d²(xᵢ, y) − min_z Σ λᵢ d²(xᵢ, z)`. The report
/// compares `lhs = Σ mass · Σ λᵢ d²(xᵢ, y)` with `rhs = Σ mass · c(tuple)`,
/// so `slack` is minus the mass-weighted defect.
pub fn superposition_check_plan(
    space: &MetricMeasureSpace,
    lambdas: &[f64],
    plan: &JointPlan,
    tolerance: f64,
) -> Result<CertificationReport> {
    check_lambdas(lambdas)?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut failing = Vec::new();
    for a in &plan.atoms {
        if a.tuple.len() != lambdas.len() {
            return Err(Error::BadParams("plan tuple length differs from weight count".into()));
        }
        space.check_index(a.y)?;
        let at_y = barycentric_objective(space, &a.tuple, lambdas, a.y)
            .finite()
            .ok_or(Error::InfiniteCost)?;
        let (best, _) = mmot_cost(space, lambdas, &a.tuple)?;
        lhs += a.mass * at_y;
        rhs += a.mass * best;
        let defect = at_y - best;
        if defect > tolerance {
            failing.push(AtomWitness {
                tuple: a.tuple.clone(),
                y: a.y,
                mass: a.mass,
                defect,
            });
        }
    }
    let mut witness = Witness {
        lambdas: Some(lambdas.to_vec()),
        atoms: failing,
        ..Witness::default()
    };
    witness.value("atoms", plan.atoms.len() as f64);
    witness.note(match plan.source {
        PlanSource::MmotSelection => "plan: multi-marginal atoms with selected barycenters",
        PlanSource::LpGluing => "plan: component couplings glued over barycenter atoms",
        PlanSource::Supplied => "plan: supplied by caller",
    });
    Ok(CertificationReport::compare(
        Inequality::Superposition,
        None,
        lhs,
        rhs,
        tolerance,
        witness,
    ))
}

pub fn superposition_check(
    omega: &Mixture,
    solution: &BarycenterSolution,
    tolerance: f64,
    caps: Caps,
) -> Result<CertificationReport> {
    let plan = joint_plan(solution, caps)?;
    superposition_check_plan(omega.space(), omega.lambdas(), &plan, tolerance)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniquenessGap {
    pub f1: f64,
    pub f2: f64,
    /// `F(½ν₁ + ½ν₂)`.
    pub blended: f64,
    /// `½F(ν₁) + ½F(ν₂) − F(blend)`, nonnegative by convexity.
    pub gap: f64,
}

/// Midpoint convexity gap of `F(ν) = Σ λᵢ W₂²(μᵢ, ν)` between two
/// candidate barycenters.
pub fn uniqueness_gap(omega: &Mixture, nu1: &DiscreteMeasure, nu2: &DiscreteMeasure) -> Result<UniquenessGap> {
    if nu1 == nu2 {
        return Err(Error::BadParams("the two measures must differ".into()));
    }
    let blend = nu1.blend(nu2, 0.5)?;
    let value =
        |nu: &DiscreteMeasure| -> Result<f64> { barycenter_objective(omega, nu)?.finite().ok_or(Error::InfiniteCost) };
    let (f1, f2, blended) = (value(nu1)?, value(nu2)?, value(&blend)?);
    Ok(UniquenessGap {
        f1,
        f2,
        blended,
        gap: 0.5 * f1 + 0.5 * f2 - blended,
    })
}
