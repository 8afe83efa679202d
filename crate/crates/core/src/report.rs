//! Certification reports shared by every inequality checker.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::ext::Ext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The instance sits in a pole regime of the distortion coefficients.
    Degenerate,
    /// Nothing to check (one-point space, infinite variance).
    Vacuous,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Vacuous)
    }

    /// Process exit code: 0 pass, 1 fail, 2 degenerate.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::Vacuous => 0,
            Verdict::Fail => 1,
            Verdict::Degenerate => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// Entropy of a barycenter against the mean entropy minus `K/2 · Var`.
    WassersteinJensen,
    DimensionalJensen,
    /// Two-component displacement convexity of entropy.
    CdTwoPoint,
    Superposition,
    BrunnMinkowski,
    LogBrunnMinkowski,
    BlaschkeSantalo,
}

/// Dimension parameter `N ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureParams {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: Ext,
}

impl CurvatureParams {
    pub fn infinite(k: f64) -> CurvatureParams {
        CurvatureParams { k, n: Ext::Infinite }
    }

    pub fn finite(k: f64, n: f64) -> CurvatureParams {
        CurvatureParams { k, n: Ext::Finite(n) }
    }
}

/// Inputs from which `lhs` and `rhs` can be recomputed.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Component weight vectors of the mixture.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barycenter: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component_w2: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component_entropy: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomWitness>,
    /// Named scalars (entropies, variances, masses, trial numbers).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Ext>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Witness {
    pub fn value(&mut self, key: &str, v: f64) -> &mut Self {
        self.values.insert(key.to_string(), Ext::Finite(v));
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }
}

/// A plan atom `(tuple, y)` whose `y` is not a barycenter of the tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomWitness {
    pub tuple: Vec<usize>,
    pub y: usize,
    pub mass: f64,
    pub defect: f64,
}

/// One inequality instance `lhs ≤ rhs`, with `slack = rhs − lhs`.
///
/// A degenerate instance carries no sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub inequality: Inequality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<CurvatureParams>,
    #[serde(serialize_with = "opt_real")]
    pub lhs: Option<f64>,
    #[serde(serialize_with = "opt_real")]
    pub rhs: Option<f64>,
    #[serde(serialize_with = "opt_real")]
    pub slack: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Witness,
}

impl CertificationReport {
    /// Builds a report and derives slack and verdict (`slack ≥ −tol`).
    pub fn compare(
        inequality: Inequality,
        params: Option<CurvatureParams>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        witness: Witness,
    ) -> CertificationReport {
        let slack = rhs - lhs;
        let verdict = if slack >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CertificationReport {
            inequality,
            params,
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            tolerance,
            verdict,
            witness,
        }
    }

    pub fn without_sides(
        inequality: Inequality,
        params: Option<CurvatureParams>,
        tolerance: f64,
        verdict: Verdict,
        witness: Witness,
    ) -> CertificationReport {
        CertificationReport {
            inequality,
            params,
            lhs: None,
            rhs: None,
            slack: None,
            tolerance,
            verdict,
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Writes `±∞` as `"inf"`/`"-inf"` and NaN as null so that reports stay
/// valid JSON.
pub fn real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if *x == f64::INFINITY {
        s.serialize_str("inf")
    } else if *x == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_none()
    }
}

pub fn opt_real<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => real(v, s),
        None => s.serialize_none(),
    }
}
