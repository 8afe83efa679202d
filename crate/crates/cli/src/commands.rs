//! One function per subcommand. Each returns the report payload, the exit
//! code it implies and the resolved configuration.

use std::path::Path;
use std::sync::Arc;

use barycd_core::barycenter::{barycenter, barycenter_from_mmot, solve_mmot, superposition_check, Mode, Route};
use barycd_core::curvature::{
    bcd_certify, best_k, dimensional_jensen_certify, wji_certify, CertifyOptions, SamplerConfig, SupportShape,
};
use barycd_core::generate::{circle, gaussian_line, graph, grid1d, grid2d, NodeMass};
use barycd_core::ineq::{bm_check, bs_check, bs_complete, bs_hypothesis_defect, log_bm_check, PointSet};
use barycd_core::io;
use barycd_core::report::{CertificationReport, CurvatureParams};
use barycd_core::transport::{extract_monge, w2_entropic, w2_exact};
use barycd_core::{Caps, DiscreteMeasure, Error, Ext, MetricMeasureSpace, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, GenKind, IneqKind, MassArg, ModeArg, RouteArg, SamplerArgs, SetArgs, ShapeArg, SpaceArg};

pub struct Outcome {
    pub config: Value,
    pub payload: Value,
    pub exit: i32,
}

pub struct Context {
    pub caps: Caps,
    pub seed: u64,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::BadParams(format!("cannot read {}: {e}", path.display())))
}

fn load_space(arg: &SpaceArg, caps: Caps) -> Result<Arc<MetricMeasureSpace>> {
    let text = read(&arg.space)?;
    let space = match &arg.space_mass {
        Some(mass) => io::parse_space_csv(&text, &read(mass)?, caps)?,
        None => io::parse_space_json(&text, caps)?,
    };
    let report = space.validate();
    if !report.is_clean() {
        eprintln!(
            "warning: {} has {} metric-measure violations; run `validate` for details",
            arg.space.display(),
            report.violations.len()
        );
    }
    Ok(Arc::new(space))
}

fn load_measure(s: &str, space: &Arc<MetricMeasureSpace>) -> Result<DiscreteMeasure> {
    if io::is_shorthand(s) {
        io::parse_measure_shorthand(s, space)
    } else {
        io::parse_measure_json(&read(Path::new(s))?, space)
    }
}

fn parse_n(s: &str) -> Result<Ext> {
    if s == "inf" {
        return Ok(Ext::Infinite);
    }
    match s.parse::<f64>() {
        Ok(n) if n >= 1.0 && n.is_finite() => Ok(Ext::Finite(n)),
        _ => Err(Error::BadParams(format!("N must be a real ≥ 1 or \"inf\", got {s:?}"))),
    }
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Vertex => Mode::Vertex,
        ModeArg::MinEntropy => Mode::MinEntropy,
    }
}

fn space_config(arg: &SpaceArg) -> Value {
    json!({
        "space": arg.space.display().to_string(),
        "space_mass": arg.space_mass.as_ref().map(|p| p.display().to_string()),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

pub fn run(command: &Command, ctx: &Context) -> Result<Outcome> {
    let caps = ctx.caps;
    match command {
        Command::Validate { space } => {
            let s = load_space(space, caps)?;
            let report = s.validate();
            Ok(Outcome {
                config: space_config(space),
                exit: i32::from(!report.is_clean()),
                payload: json!({
                    "point_count": s.len(),
                    "total_mass": s.total_mass(),
                    "finite_classes": s.finite_classes().into_iter().max().map_or(0, |c| c + 1),
                    "clean": report.is_clean(),
                    "violations": report.violations,
                }),
            })
        }
        Command::Gen { kind, out } => gen(kind, out.as_deref()),
        Command::W2 {
            space,
            mu,
            nu,
            entropic,
            max_iter,
            monge_tol,
        } => {
            let s = load_space(space, caps)?;
            let (m, n) = (load_measure(mu, &s)?, load_measure(nu, &s)?);
            let config = merge(
                space_config(space),
                json!({"mu": mu, "nu": nu, "entropic": entropic, "max_iter": max_iter, "monge_tol": monge_tol}),
            );
            let payload = match entropic {
                Some(eps) => {
                    let r = w2_entropic(&m, &n, *eps, *max_iter, 1e-9)?;
                    json!({
                        "w2": r.cost.sqrt(),
                        "w2_squared": r.cost,
                        "coupling": r.coupling.entries,
                        "converged": r.converged,
                        "iterations": r.iterations,
                        "marginal_error": r.marginal_error,
                    })
                }
                None => {
                    let r = w2_exact(&m, &n)?;
                    json!({
                        "w2": r.w2,
                        "w2_squared": r.w2_squared,
                        "coupling": r.coupling.as_ref().map(|c| &c.entries),
                        "monge": r.coupling.as_ref().map(|c| extract_monge(c, *monge_tol)),
                    })
                }
            };
            Ok(Outcome {
                config,
                payload,
                exit: 0,
            })
        }
        Command::Mmot {
            space,
            marginals,
            weights,
            barycenter: push,
        } => {
            let s = load_space(space, caps)?;
            let ms = marginals
                .iter()
                .map(|m| load_measure(m, &s))
                .collect::<Result<Vec<_>>>()?;
            let w = io::parse_real_list(weights)?;
            let plan = solve_mmot(&ms, &w, caps)?;
            let mut payload = json!({ "plan": plan });
            if *push {
                payload["barycenter"] = to_value(&barycenter_from_mmot(&plan)?);
            }
            Ok(Outcome {
                config: merge(space_config(space), json!({"marginals": marginals, "weights": w})),
                payload,
                exit: 0,
            })
        }
        Command::Barycenter {
            space,
            mixture,
            route,
            mode: m,
            superposition,
            tol,
        } => {
            let s = load_space(space, caps)?;
            let base = mixture.parent().map(Path::to_path_buf).unwrap_or_default();
            let omega = io::parse_mixture_json(&read(mixture)?, &s, &|p| read(&base.join(p)))?;
            let route = match route {
                RouteArg::Lp => Route::Lp,
                RouteArg::Mmot => Route::Mmot,
            };
            let sol = barycenter(&omega, route, mode(*m), caps)?;
            let mut payload = json!({ "solution": sol });
            let mut exit = 0;
            if *superposition {
                let r = superposition_check(&omega, &sol, *tol, caps)?;
                exit = r.verdict.exit_code();
                payload["superposition"] = to_value(&r);
            }
            Ok(Outcome {
                config: merge(
                    space_config(space),
                    json!({"mixture": mixture.display().to_string(), "route": route, "mode": mode(*m), "tol": tol}),
                ),
                payload,
                exit,
            })
        }
        Command::Certify {
            space,
            k,
            n,
            mixture,
            sampler,
        } => {
            let s = load_space(space, caps)?;
            let n = parse_n(n)?;
            let cfg = sampler_config(sampler, ctx)?;
            let config = merge(space_config(space), json!({"K": k, "N": n, "sampler": cfg}));
            match mixture {
                Some(path) => {
                    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    let omega = io::parse_mixture_json(&read(path)?, &s, &|p| read(&base.join(p)))?;
                    let opts = CertifyOptions {
                        mode: cfg.mode,
                        tolerance: cfg.tolerance,
                        caps,
                    };
                    let r = match n {
                        Ext::Infinite => wji_certify(&omega, *k, &opts)?,
                        Ext::Finite(n) => dimensional_jensen_certify(&omega, *k, n, &opts)?,
                    };
                    Ok(Outcome {
                        config: merge(config, json!({"mixture": path.display().to_string()})),
                        exit: r.verdict.exit_code(),
                        payload: to_value(&r),
                    })
                }
                None => {
                    let r = bcd_certify(&s, CurvatureParams { k: *k, n }, &cfg)?;
                    Ok(Outcome {
                        config,
                        exit: r.verdict.exit_code(),
                        payload: to_value(&r),
                    })
                }
            }
        }
        Command::BestK {
            space,
            n,
            lo,
            hi,
            iters,
            sampler,
        } => {
            let s = load_space(space, caps)?;
            let n = parse_n(n)?;
            let cfg = sampler_config(sampler, ctx)?;
            let r = best_k(&s, n, &cfg, (*lo, *hi), *iters)?;
            Ok(Outcome {
                config: merge(
                    space_config(space),
                    json!({"N": n, "lo": lo, "hi": hi, "iters": iters, "sampler": cfg}),
                ),
                payload: to_value(&r),
                exit: 0,
            })
        }
        Command::Ineq { kind } => ineq(kind, caps),
    }
}

fn sampler_config(a: &SamplerArgs, ctx: &Context) -> Result<SamplerConfig> {
    Ok(SamplerConfig {
        trials: a.trials,
        components: (a.components[0], a.components[1]),
        support: (a.support[0], a.support[1]),
        seed: ctx.seed,
        tolerance: a.tol,
        mode: mode(a.mode),
        probe: !a.no_probe,
        shape: match a.shape {
            ShapeArg::Scattered => SupportShape::Scattered,
            ShapeArg::Ball => SupportShape::Ball,
        },
        caps: ctx.caps,
    })
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(|e| {
            let bad = || Error::BadParams(format!("edge {e:?} is not of the form u-v:len"));
            let (uv, len) = e.split_once(':').ok_or_else(bad)?;
            let (u, v) = uv.split_once('-').ok_or_else(bad)?;
            Ok((
                u.trim().parse().map_err(|_| bad())?,
                v.trim().parse().map_err(|_| bad())?,
                len.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn gen(kind: &GenKind, out: Option<&Path>) -> Result<Outcome> {
    let (space, config, meta) = match kind {
        GenKind::Grid1d { a, b, n, mass } => {
            let m = match mass {
                MassArg::Trapezoid => NodeMass::Trapezoid,
                MassArg::Uniform => NodeMass::Uniform,
            };
            let cfg = json!({"kind": "grid1d", "a": a, "b": b, "n": n, "mass": format!("{mass:?}").to_lowercase()});
            (grid1d(*a, *b, *n, m)?, cfg, Value::Null)
        }
        GenKind::Gaussian { a, b, n } => (
            gaussian_line(*a, *b, *n)?,
            json!({"kind": "gaussian", "a": a, "b": b, "n": n}),
            Value::Null,
        ),
        GenKind::Grid2d { ax, bx, nx, ay, by, ny } => (
            grid2d((*ax, *bx, *nx), (*ay, *by, *ny))?,
            json!({"kind": "grid2d", "ax": ax, "bx": bx, "nx": nx, "ay": ay, "by": by, "ny": ny}),
            Value::Null,
        ),
        GenKind::Circle { length, n } => (
            circle(*length, *n)?,
            json!({"kind": "circle", "length": length, "n": n}),
            Value::Null,
        ),
        GenKind::Graph { n, edges, mass } => {
            let e = parse_edges(edges)?;
            let m = match mass {
                Some(s) => io::parse_real_list(s)?,
                None => vec![1.0 / *n as f64; *n],
            };
            let (space, meta) = graph(*n, &e, m.clone())?;
            (
                space,
                json!({"kind": "graph", "n": n, "edges": e, "mass": m}),
                to_value(&meta),
            )
        }
    };
    let doc = io::space_to_json(&space);
    let mut payload = json!({"point_count": space.len(), "total_mass": space.total_mass()});
    if !meta.is_null() {
        payload["graph"] = meta;
    }
    match out {
        Some(path) => {
            let text = serde_json::to_string_pretty(&doc).expect("space documents serialize");
            std::fs::write(path, text + "\n")
                .map_err(|e| Error::BadParams(format!("cannot write {}: {e}", path.display())))?;
            payload["out"] = json!(path.display().to_string());
        }
        None => payload["space"] = doc,
    }
    Ok(Outcome {
        config,
        payload,
        exit: 0,
    })
}

fn is_index_list(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '-')
}

fn load_sets(a: &SetArgs, space: &MetricMeasureSpace) -> Result<Vec<PointSet>> {
    a.sets
        .iter()
        .map(|s| {
            let idx = if is_index_list(s) {
                io::parse_index_list(s)?
            } else {
                io::parse_set_json(&read(Path::new(s))?)?
            };
            PointSet::new(space, idx)
        })
        .collect()
}

fn ineq(kind: &IneqKind, caps: Caps) -> Result<Outcome> {
    match kind {
        IneqKind::Bm { sets, n } => {
            let s = load_space(&sets.space, caps)?;
            let e = load_sets(sets, &s)?;
            let w = io::parse_real_list(&sets.weights)?;
            let r = bm_check(&s, &e, &w, *n, sets.tol, caps)?;
            Ok(set_outcome(sets, json!({"kind": "bm", "N": n}), r))
        }
        IneqKind::Logbm { sets } => {
            let s = load_space(&sets.space, caps)?;
            let e = load_sets(sets, &s)?;
            let w = io::parse_real_list(&sets.weights)?;
            let r = log_bm_check(&s, &e, &w, sets.tol, caps)?;
            Ok(set_outcome(sets, json!({"kind": "logbm"}), r))
        }
        IneqKind::Bs {
            space,
            fns,
            complete,
            tol,
        } => {
            let s = load_space(space, caps)?;
            let mut f = fns
                .iter()
                .map(|p| io::parse_function_json(&read(p)?))
                .collect::<Result<Vec<_>>>()?;
            let mut payload = json!({});
            if *complete {
                let last = bs_complete(&s, &f, caps)?;
                payload["completed"] = json!(last);
                f.push(last);
            }
            payload["hypothesis"] = to_value(&bs_hypothesis_defect(&s, &f, caps)?);
            let r = bs_check(&s, &f, *tol, caps)?;
            let exit = r.verdict.exit_code();
            payload["report"] = to_value(&r);
            Ok(Outcome {
                config: merge(
                    space_config(space),
                    json!({
                        "kind": "bs",
                        "fns": fns.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                        "complete": complete,
                        "tol": tol,
                    }),
                ),
                payload,
                exit,
            })
        }
    }
}

fn set_outcome(a: &SetArgs, extra: Value, r: CertificationReport) -> Outcome {
    Outcome {
        config: merge(
            merge(
                space_config(&a.space),
                json!({"sets": a.sets, "weights": a.weights, "tol": a.tol}),
            ),
            extra,
        ),
        exit: r.verdict.exit_code(),
        payload: to_value(&r),
    }
}

/// Stable machine-readable name for an error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Schema(_) => "schema",
        Error::TooLarge { .. } => "too_large",
        Error::BadParams(_) | Error::BadBracket(_) => "bad_params",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::InvalidMeasure(_) => "invalid_measure",
        Error::Inadmissible { .. } => "inadmissible",
        Error::NotProbability(_) => "not_probability",
        Error::DegenerateDomain(_) | Error::DomainError(_) => "domain",
        Error::Infeasible | Error::InfiniteCost | Error::AllInfinite | Error::InfiniteDistance(..) => "infinite_cost",
        _ => "solver",
    }
}
