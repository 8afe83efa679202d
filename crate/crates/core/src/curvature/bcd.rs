//! Sampled evidence for the barycentric curvature-dimension condition and an
//! empirical largest admissible `K`.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certify::{jensen_witnesses, report_for, CertifyOptions, JensenWitness, EXACT_TOL};
use crate::barycenter::{Mixture, Mode};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::measure::DiscreteMeasure;
use crate::report::{CertificationReport, CurvatureParams, Verdict};
use crate::space::{Caps, MetricMeasureSpace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub trials: usize,
    /// Inclusive range of the number of mixture components.
    pub components: (usize, usize),
    /// Inclusive range of the support size of each component.
    pub support: (usize, usize),
    pub seed: u64,
    pub tolerance: f64,
    pub mode: Mode,
    /// Trial 0 is the equal mixture of the two Diracs at the ends of the
    /// finite diameter, the sharpest two-point instance.
    pub probe: bool,
    pub shape: SupportShape,
    pub caps: Caps,
}

/// How a component's support is drawn. Either way the component is the
/// reference measure restricted to the support and normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportShape {
    /// A uniformly random subset of points.
    Scattered,
    /// The points nearest to a random center (ties by index), i.e. a
    /// metric ball inside the center's finite-distance class.
    Ball,
}

impl Default for SamplerConfig {
    fn default() -> SamplerConfig {
        SamplerConfig {
            trials: 100,
            components: (2, 3),
            support: (1, 4),
            seed: 0,
            tolerance: EXACT_TOL,
            mode: Mode::MinEntropy,
            probe: true,
            shape: SupportShape::Scattered,
            caps: Caps::default(),
        }
    }
}

impl SamplerConfig {
    fn validate(&self) -> Result<()> {
        let (a, b) = self.components;
        let (c, d) = self.support;
        if a == 0 || a > b || c == 0 || c > d {
            return Err(Error::BadParams(
                "sampler ranges must be nonempty and start at 1".into(),
            ));
        }
        Ok(())
    }

    fn options(&self) -> CertifyOptions {
        CertifyOptions {
            mode: self.mode,
            tolerance: self.tolerance,
            caps: self.caps,
        }
    }
}

/// Random mixture of trial `trial`. The stream is a function of
/// `(seed, trial)` only, so trials can run in any order.
pub fn sample_mixture(space: &Arc<MetricMeasureSpace>, cfg: &SamplerConfig, trial: usize) -> Result<Mixture> {
    cfg.validate()?;
    if cfg.probe && trial == 0 {
        let (d, i, j) = space.finite_diameter();
        if d > 0.0 {
            return Mixture::new(vec![
                (0.5, DiscreteMeasure::dirac(space.clone(), i)?),
                (0.5, DiscreteMeasure::dirac(space.clone(), j)?),
            ]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let n = rng.gen_range(cfg.components.0..=cfg.components.1);
    let hi = cfg.support.1.min(space.len());
    let lo = cfg.support.0.min(hi);
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        let size = rng.gen_range(lo..=hi);
        let points = match cfg.shape {
            SupportShape::Scattered => sample(&mut rng, space.len(), size).into_vec(),
            SupportShape::Ball => ball(space, rng.gen_range(0..space.len()), size),
        };
        let mut w = vec![0.0; space.len()];
        for p in points {
            w[p] = space.ref_mass()[p];
        }
        let mu = DiscreteMeasure::normalized(space.clone(), w)?;
        raw.push((rng.gen_range(0.1..1.0), mu));
    }
    let total: f64 = raw.iter().map(|c| c.0).sum();
    Mixture::new(raw.into_iter().map(|(l, mu)| (l / total, mu)).collect())
}

/// The `size` points nearest to `center` at finite distance.
fn ball(space: &MetricMeasureSpace, center: usize, size: usize) -> Vec<usize> {
    let mut near: Vec<(f64, usize)> = (0..space.len())
        .filter_map(|p| space.dist(center, p).finite().map(|d| (d, p)))
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    near.into_iter().take(size).map(|(_, p)| p).collect()
}

struct Trial {
    witness: Option<JensenWitness>,
    vertex: Option<JensenWitness>,
}

fn run_trials(space: &Arc<MetricMeasureSpace>, cfg: &SamplerConfig) -> Result<Vec<Trial>> {
    let opts = cfg.options();
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let omega = sample_mixture(space, cfg, t)?;
            Ok(match jensen_witnesses(&omega, &opts)? {
                Some((w, v)) => Trial {
                    witness: Some(w),
                    vertex: v,
                },
                None => Trial {
                    witness: None,
                    vertex: None,
                },
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BcdReport {
    pub verdict: Verdict,
    pub params: CurvatureParams,
    pub sampler: SamplerConfig,
    /// The first failing trial, or the trial of least slack on a pass.
    pub worst: Option<CertificationReport>,
    pub worst_trial: Option<usize>,
    pub degenerate_trials: usize,
    pub vacuous_trials: usize,
    /// Trials where the LP vertex barycenter would have flipped the verdict.
    pub mode_disagreements: usize,
    pub note: &'static str,
}

const EVIDENCE_NOTE: &str = "a pass is sampled evidence over finitely many mixtures, not a proof";

fn judge(trials: &[Trial], params: CurvatureParams, cfg: &SamplerConfig) -> Result<BcdReport> {
    let mut reports = Vec::with_capacity(trials.len());
    let mut mode_disagreements = 0;
    for t in trials {
        let Some(w) = &t.witness else {
            reports.push(None);
            continue;
        };
        let r = report_for(w, params, cfg.tolerance)?;
        if let Some(v) = &t.vertex {
            if report_for(v, params, cfg.tolerance)?.verdict != r.verdict {
                mode_disagreements += 1;
            }
        }
        reports.push(Some(r));
    }
    let vacuous_trials = reports.iter().filter(|r| r.is_none()).count();
    let degenerate_trials = reports
        .iter()
        .flatten()
        .filter(|r| r.verdict == Verdict::Degenerate)
        .count();

    let failing = reports
        .iter()
        .enumerate()
        .find(|(_, r)| r.as_ref().is_some_and(|r| r.verdict == Verdict::Fail));
    let (verdict, worst_trial) = if let Some((i, _)) = failing {
        (Verdict::Fail, Some(i))
    } else {
        let least = reports
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().and_then(|r| r.slack).map(|s| (i, s)))
            .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
                Some((_, b)) if b <= s => best,
                _ => Some((i, s)),
            });
        match least {
            Some((i, _)) => (Verdict::Pass, Some(i)),
            None if degenerate_trials > 0 => (Verdict::Degenerate, None),
            None => (Verdict::Vacuous, None),
        }
    };
    let worst = worst_trial.map(|i| {
        let mut r = reports[i].clone().expect("chosen trial has a report");
        r.witness.value("trial", i as f64).value("seed", cfg.seed as f64);
        r
    });
    Ok(BcdReport {
        verdict,
        params,
        sampler: *cfg,
        worst,
        worst_trial,
        degenerate_trials,
        vacuous_trials,
        mode_disagreements,
        note: EVIDENCE_NOTE,
    })
}

/// Draws `cfg.trials` seeded mixtures and checks the entropy (`N = ∞`) or
/// dimensional (`N < ∞`) Jensen inequality on each. Fails on the first
/// violated trial by index; otherwise passes with the least observed slack.
pub fn bcd_certify(space: &Arc<MetricMeasureSpace>, params: CurvatureParams, cfg: &SamplerConfig) -> Result<BcdReport> {
    cfg.validate()?;
    if let Ext::Finite(n) = params.n {
        if !(n >= 1.0) {
            return Err(Error::BadParams(format!("dimension must be at least 1, got {n}")));
        }
    }
    if space.len() == 1 {
        return Ok(BcdReport {
            verdict: Verdict::Vacuous,
            params,
            sampler: *cfg,
            worst: None,
            worst_trial: None,
            degenerate_trials: 0,
            vacuous_trials: cfg.trials,
            mode_disagreements: 0,
            note: "one-point space: every measure is the same Dirac",
        });
    }
    let trials = run_trials(space, cfg)?;
    judge(&trials, params, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestK {
    /// Largest `K` certified on the sample.
    pub k: f64,
    /// Final bracket `[certified, refuted]`.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisection for the largest `K` that passes on the sampled mixtures.
///
/// Barycenters and entropies do not depend on `K`, so the trials are solved
/// once and re-judged at each bisection point.
pub fn best_k(
    space: &Arc<MetricMeasureSpace>,
    n: Ext,
    cfg: &SamplerConfig,
    bracket: (f64, f64),
    iters: usize,
) -> Result<BestK> {
    cfg.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadBracket(format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let trials = run_trials(space, cfg)?;
    let fails =
        |k: f64| -> Result<bool> { Ok(judge(&trials, CurvatureParams { k, n }, cfg)?.verdict == Verdict::Fail) };
    if fails(lo)? {
        return Err(Error::BadBracket(format!("K = {lo} already fails")));
    }
    if !fails(hi)? {
        return Err(Error::BadBracket(format!("K = {hi} does not fail")));
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if fails(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(BestK {
        k: lo,
        bracket: (lo, hi),
        iterations: iters,
    })
}
