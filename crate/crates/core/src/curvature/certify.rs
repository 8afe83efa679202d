//! Single-instance Jensen-type certificates.

use serde::Serialize;

use super::distortion::{theta_over_s, theta_over_t};
use crate::barycenter::{barycenter_lp, evaluate, BarycenterSolution, Mixture, Mode};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::{relative_entropy, u_n_from_entropy, DiscreteMeasure};
use crate::report::{CertificationReport, CurvatureParams, Inequality, Verdict, Witness};
use crate::space::Caps;
use crate::transport::w2_squared;

/// Default tolerance for inequalities that are exact on a finite space.
pub const EXACT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertifyOptions {
    pub mode: Mode,
    pub tolerance: f64,
    pub caps: Caps,
}

impl Default for CertifyOptions {
    fn default() -> CertifyOptions {
        CertifyOptions {
            mode: Mode::MinEntropy,
            tolerance: EXACT_TOL,
            caps: Caps::default(),
        }
    }
}

/// Everything the Jensen-type inequalities need, fixed once a barycenter has
/// been chosen. None of it depends on `K` or `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JensenWitness {
    pub lambdas: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub barycenter: Vec<f64>,
    pub component_entropy: Vec<f64>,
    pub barycenter_entropy: f64,
    /// `W₂(μ̄, μᵢ)`.
    pub component_w2: Vec<f64>,
    /// `Σ λᵢ W₂²(μ̄, μᵢ)`.
    pub variance: f64,
}

fn finite_entropy(mu: &DiscreteMeasure) -> f64 {
    match relative_entropy(mu) {
        Ext::Finite(e) => e,
        Ext::Infinite => f64::INFINITY,
    }
}

impl JensenWitness {
    fn assemble(omega: &Mixture, barycenter: &DiscreteMeasure, component_w2: Vec<f64>) -> JensenWitness {
        let variance = omega.lambdas().iter().zip(&component_w2).map(|(l, w)| l * w * w).sum();
        JensenWitness {
            lambdas: omega.lambdas().to_vec(),
            components: omega.components().iter().map(|c| c.weights().to_vec()).collect(),
            barycenter: barycenter.weights().to_vec(),
            component_entropy: omega.components().iter().map(finite_entropy).collect(),
            barycenter_entropy: finite_entropy(barycenter),
            component_w2,
            variance,
        }
    }

    pub fn from_solution(omega: &Mixture, sol: &BarycenterSolution) -> JensenWitness {
        Self::assemble(omega, &sol.barycenter, sol.component_w2.clone())
    }

    /// Witness for an arbitrary candidate barycenter.
    pub fn for_barycenter(omega: &Mixture, barycenter: &DiscreteMeasure) -> Result<JensenWitness> {
        let (_, w2, _) = evaluate(omega, barycenter)?;
        Ok(Self::assemble(omega, barycenter, w2))
    }

    fn base_witness(&self) -> Witness {
        let mut w = Witness {
            lambdas: Some(self.lambdas.clone()),
            components: Some(self.components.clone()),
            barycenter: Some(self.barycenter.clone()),
            component_w2: Some(self.component_w2.clone()),
            component_entropy: Some(self.component_entropy.clone()),
            ..Witness::default()
        };
        w.value("barycenter_entropy", self.barycenter_entropy)
            .value("variance", self.variance);
        w
    }
}

/// Barycenter witness for `omega`, or `None` when its variance is infinite.
pub fn jensen_witnesses(
    omega: &Mixture,
    opts: &CertifyOptions,
) -> Result<Option<(JensenWitness, Option<JensenWitness>)>> {
    let sol = match barycenter_lp(omega, opts.mode, opts.caps) {
        Ok(s) => s,
        Err(Error::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    let main = JensenWitness::from_solution(omega, &sol);
    let vertex = match &sol.vertex_barycenter {
        Some(v) => Some(JensenWitness::for_barycenter(omega, v)?),
        None => None,
    };
    Ok(Some((main, vertex)))
}

/// `Ent(μ̄) ≤ Σ λᵢ Ent(μᵢ) − (K/2) Σ λᵢ W₂²(μ̄, μᵢ)` on a fixed witness.
pub fn wji_report(w: &JensenWitness, k: f64, tolerance: f64) -> CertificationReport {
    let mean: f64 = w.lambdas.iter().zip(&w.component_entropy).map(|(l, e)| l * e).sum();
    CertificationReport::compare(
        Inequality::WassersteinJensen,
        Some(CurvatureParams::infinite(k)),
        w.barycenter_entropy,
        mean - 0.5 * k * w.variance,
        tolerance,
        w.base_witness(),
    )
}

/// `Σ λᵢ [θᵢ/s_{K/N}(θᵢ)] U_N(μᵢ) ≤ U_N(μ̄) Σ λᵢ [θᵢ/t_{K/N}(θᵢ)]` with
/// `θᵢ = W₂(μ̄, μᵢ)`. For `K > 0` an angle at the pole of `t_{K/N}` makes
/// the instance degenerate.
pub fn dimensional_report(w: &JensenWitness, k: f64, n: f64, tolerance: f64) -> Result<CertificationReport> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::BadParams(format!(
            "dimension must be finite and at least 1, got {n}"
        )));
    }
    let params = Some(CurvatureParams::finite(k, n));
    let kappa = k / n;
    let mut witness = w.base_witness();
    if kappa > 0.0 {
        let pole = std::f64::consts::FRAC_PI_2 / kappa.sqrt();
        if let Some((i, th)) = w.component_w2.iter().enumerate().find(|(_, &th)| th >= pole) {
            witness
                .value("pole", pole)
                .note(format!("component {i} sits at distance {th} beyond the pole {pole}"));
            return Ok(CertificationReport::without_sides(
                Inequality::DimensionalJensen,
                params,
                tolerance,
                Verdict::Degenerate,
                witness,
            ));
        }
    }
    let mut lhs = 0.0;
    let mut factor = 0.0;
    for ((&l, &th), &e) in w.lambdas.iter().zip(&w.component_w2).zip(&w.component_entropy) {
        lhs += l * theta_over_s(kappa, th)? * u_n_from_entropy(Ext::Finite(e), n)?;
        factor += l * theta_over_t(kappa, th)?;
    }
    let u_bar = u_n_from_entropy(Ext::Finite(w.barycenter_entropy), n)?;
    witness
        .value("u_n_barycenter", u_bar)
        .value("distortion_factor", factor);
    Ok(CertificationReport::compare(
        Inequality::DimensionalJensen,
        params,
        lhs,
        u_bar * factor,
        tolerance,
        witness,
    ))
}

/// Report for `(K, N)` on a fixed witness: entropy form for `N = ∞`,
/// dimensional form otherwise.
pub fn report_for(w: &JensenWitness, params: CurvatureParams, tolerance: f64) -> Result<CertificationReport> {
    match params.n {
        Ext::Infinite => Ok(wji_report(w, params.k, tolerance)),
        Ext::Finite(n) => dimensional_report(w, params.k, n, tolerance),
    }
}

fn vacuous(inequality: Inequality, params: CurvatureParams, tolerance: f64) -> CertificationReport {
    let mut w = Witness::default();
    w.note("infinite variance: no barycenter of finite cost");
    CertificationReport::without_sides(inequality, Some(params), tolerance, Verdict::Vacuous, w)
}

fn certify(omega: &Mixture, params: CurvatureParams, opts: &CertifyOptions) -> Result<CertificationReport> {
    let inequality = match params.n {
        Ext::Infinite => Inequality::WassersteinJensen,
        Ext::Finite(_) => Inequality::DimensionalJensen,
    };
    let Some((main, vertex)) = jensen_witnesses(omega, opts)? else {
        return Ok(vacuous(inequality, params, opts.tolerance));
    };
    let mut report = report_for(&main, params, opts.tolerance)?;
    if let Some(v) = vertex {
        let other = report_for(&v, params, opts.tolerance)?;
        if other.verdict != report.verdict {
            report
                .witness
                .note(format!("vertex barycenter gives verdict {:?} instead", other.verdict));
        }
    }
    Ok(report)
}

/// Entropy form of the barycentric Jensen inequality for one mixture.
pub fn wji_certify(omega: &Mixture, k: f64, opts: &CertifyOptions) -> Result<CertificationReport> {
    certify(omega, CurvatureParams::infinite(k), opts)
}

/// Dimensional form for one mixture, `N ∈ [1, ∞)`.
pub fn dimensional_jensen_certify(
    omega: &Mixture,
    k: f64,
    n: f64,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    certify(omega, CurvatureParams::finite(k, n), opts)
}

/// Displacement convexity of entropy between `μ₀` and `μ₁` at time `t`,
/// checked on the two-component mixture `(1−t)δ_{μ₀} + tδ_{μ₁}`. The
/// realized variance is used; the geodesic coefficient `(1−t)t W₂²(μ₀, μ₁)`
/// is reported alongside.
pub fn cd_twopoint_certify(
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
    t: f64,
    k: f64,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::BadParams(format!("t must lie in (0, 1), got {t}")));
    }
    let omega = Mixture::new(vec![(1.0 - t, mu0.clone()), (t, mu1.clone())])?;
    let mut report = wji_certify(&omega, k, opts)?;
    report.inequality = Inequality::CdTwoPoint;
    if report.lhs.is_some() {
        let geodesic = match w2_squared(mu0, mu1)? {
            Ext::Finite(d2) => (1.0 - t) * t * d2,
            Ext::Infinite => f64::INFINITY,
        };
        let e0 = finite_entropy(mu0);
        let e1 = finite_entropy(mu1);
        report
            .witness
            .value("t", t)
            .value("geodesic_variance", geodesic)
            .value("geodesic_rhs", (1.0 - t) * e0 + t * e1 - 0.5 * k * geodesic);
    }
    Ok(report)
}
