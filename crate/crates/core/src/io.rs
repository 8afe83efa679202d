//! Readers and writers for the JSON and CSV input formats.
//!
//! Everything here works on in-memory text so it can be fuzzed directly;
//! the caller supplies file contents (and a resolver for nested paths).
//! Malformed input of any kind surfaces as [`Error::Schema`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::barycenter::Mixture;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::generate::{euclidean, graph};
use crate::measure::DiscreteMeasure;
use crate::space::{Caps, MetricMeasureSpace};

fn schema(msg: impl std::fmt::Display) -> Error {
    Error::Schema(msg.to_string())
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(schema)
}

/// Constructor failures on parsed input are reported as schema errors too.
fn wrap<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema(_) => e,
        other => schema(other),
    })
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<f64>>,
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MetricDoc {
    Matrix { data: Vec<Vec<Ext>> },
    Euclidean,
    Graph { edges: Vec<(usize, usize, f64)> },
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    points: Vec<PointDoc>,
    metric: MetricDoc,
    ref_measure: Vec<f64>,
}

/// Reads a space document. Points may be listed in any order but their ids
/// must be exactly `0..n`.
pub fn parse_space_json(text: &str, caps: Caps) -> Result<MetricMeasureSpace> {
    let mut doc: SpaceDoc = from_json(text)?;
    let n = doc.points.len();
    if n == 0 {
        return Err(schema("space has no points"));
    }
    if n > caps.points {
        return Err(Error::TooLarge {
            what: "points",
            size: n,
            cap: caps.points,
        });
    }
    doc.points.sort_by_key(|p| p.id);
    if doc.points.iter().enumerate().any(|(i, p)| p.id != i) {
        return Err(schema("point ids must be 0..n without gaps or repeats"));
    }
    if doc.ref_measure.len() != n {
        return Err(schema(format!(
            "ref_measure has {} entries for {n} points",
            doc.ref_measure.len()
        )));
    }
    let coords: Option<Vec<Vec<f64>>> = doc.points.iter().map(|p| p.coords.clone()).collect();
    if let Some(c) = &coords {
        let dim = c[0].len();
        if c.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(schema("coords must be finite and of equal dimension"));
        }
    }
    let labels = doc.points.iter().map(|p| p.label.clone()).collect();
    let space = match doc.metric {
        MetricDoc::Matrix { data } => wrap(MetricMeasureSpace::with_cap(data, doc.ref_measure, caps.points))?,
        MetricDoc::Euclidean => {
            let c = coords
                .as_ref()
                .ok_or_else(|| schema("euclidean metric needs coords on every point"))?;
            wrap(MetricMeasureSpace::with_cap(euclidean(c), doc.ref_measure, caps.points))?
        }
        MetricDoc::Graph { edges } => wrap(graph(n, &edges, doc.ref_measure))?.0,
    };
    let space = wrap(space.with_labels(labels))?;
    match coords {
        Some(c) => wrap(space.with_coords(c)),
        None => Ok(space),
    }
}

/// Reads a CSV distance matrix (no header, `inf` allowed) and a mass file
/// holding one value per point, separated by commas or newlines.
pub fn parse_space_csv(matrix: &str, mass: &str, caps: Caps) -> Result<MetricMeasureSpace> {
    let mut rows = Vec::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(matrix.as_bytes());
    for record in reader.records() {
        let record = record.map_err(schema)?;
        let row: Result<Vec<Ext>> = record.iter().map(parse_ext_cell).collect();
        rows.push(row?);
        if rows.len() > caps.points {
            return Err(Error::TooLarge {
                what: "points",
                size: rows.len(),
                cap: caps.points,
            });
        }
    }
    let masses: Result<Vec<f64>> = mass
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| schema(format!("bad mass value {s:?}"))))
        .collect();
    wrap(MetricMeasureSpace::with_cap(rows, masses?, caps.points))
}

fn parse_ext_cell(cell: &str) -> Result<Ext> {
    match cell {
        "inf" | "+inf" | "Infinity" => Ok(Ext::Infinite),
        _ => {
            let x: f64 = cell.parse().map_err(|_| schema(format!("bad distance {cell:?}")))?;
            wrap(Ext::from_f64(x))
        }
    }
}

/// Writes a space as a matrix-metric document that [`parse_space_json`]
/// reads back to an equal space.
pub fn space_to_json(space: &MetricMeasureSpace) -> Value {
    let coords = space.coords();
    let points = (0..space.len())
        .map(|i| PointDoc {
            id: i,
            label: space.labels()[i].clone(),
            coords: coords.map(|c| c[i].clone()),
        })
        .collect();
    let data = (0..space.len())
        .map(|i| (0..space.len()).map(|j| space.dist(i, j)).collect())
        .collect();
    let doc = SpaceDoc {
        points,
        metric: MetricDoc::Matrix { data },
        ref_measure: space.ref_mass().to_vec(),
    };
    serde_json::to_value(doc).expect("space documents serialize")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    #[serde(default)]
    #[allow(dead_code)]
    space: Option<Value>,
    weights: Vec<f64>,
}

/// Reads a measure document. The `space` field is informational; the
/// weights are interpreted on `space`.
pub fn parse_measure_json(text: &str, space: &Arc<MetricMeasureSpace>) -> Result<DiscreteMeasure> {
    let doc: MeasureDoc = from_json(text)?;
    wrap(DiscreteMeasure::new(space.clone(), doc.weights))
}

/// `dirac:i` or `uniform:i,j,…` (ranges `a-b` allowed).
pub fn parse_measure_shorthand(s: &str, space: &Arc<MetricMeasureSpace>) -> Result<DiscreteMeasure> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| schema(format!("not a measure shorthand: {s:?}")))?;
    match kind {
        "dirac" => {
            let i = parse_index(rest)?;
            wrap(DiscreteMeasure::dirac(space.clone(), i))
        }
        "uniform" => {
            let mut pts = parse_index_list(rest)?;
            pts.sort_unstable();
            pts.dedup();
            wrap(DiscreteMeasure::uniform_on(space.clone(), &pts))
        }
        _ => Err(schema(format!("unknown measure shorthand {kind:?}"))),
    }
}

pub fn is_shorthand(s: &str) -> bool {
    s.starts_with("dirac:") || s.starts_with("uniform:")
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| schema(format!("bad point index {s:?}")))
}

/// Comma-separated indices and inclusive ranges `a-b`.
pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse_index(a)?, parse_index(b)?);
                if a > b || b - a > 1 << 20 {
                    return Err(schema(format!("bad index range {part:?}")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_index(part)?),
        }
    }
    if out.is_empty() {
        return Err(schema("empty index list"));
    }
    Ok(out)
}

/// Comma-separated reals, e.g. mixture weights.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| schema(format!("bad number {p:?}")))
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    lambda: f64,
    measure: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureDoc {
    components: Vec<ComponentDoc>,
}

/// Reads a mixture document. Each component's `measure` is an inline
/// measure object, a shorthand string, or a path handed to `resolve`, which
/// returns that file's contents.
pub fn parse_mixture_json(
    text: &str,
    space: &Arc<MetricMeasureSpace>,
    resolve: &dyn Fn(&str) -> Result<String>,
) -> Result<Mixture> {
    let doc: MixtureDoc = from_json(text)?;
    let mut components = Vec::with_capacity(doc.components.len());
    for c in doc.components {
        let mu = match c.measure {
            Value::String(s) if is_shorthand(&s) => parse_measure_shorthand(&s, space)?,
            Value::String(path) => parse_measure_json(&resolve(&path)?, space)?,
            obj @ Value::Object(_) => parse_measure_json(&obj.to_string(), space)?,
            other => {
                return Err(schema(format!(
                    "component measure must be a path or an object, got {other}"
                )))
            }
        };
        components.push((c.lambda, mu));
    }
    wrap(Mixture::new(components))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDoc {
    indices: Vec<usize>,
}

pub fn parse_set_json(text: &str) -> Result<Vec<usize>> {
    Ok(from_json::<SetDoc>(text)?.indices)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FnValue {
    Real(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    values: Vec<FnValue>,
}

/// Function values are reals or the string `"-inf"`.
pub fn parse_function_json(text: &str) -> Result<Vec<f64>> {
    from_json::<FunctionDoc>(text)?
        .values
        .into_iter()
        .map(|v| match v {
            FnValue::Real(x) if x.is_finite() => Ok(x),
            FnValue::Text(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            FnValue::Real(x) => Err(schema(format!("bad function value {x}"))),
            FnValue::Text(s) => Err(schema(format!("bad function value {s:?}"))),
        })
        .collect()
}

/// `tuples=N,points=M` (either key may be omitted).
pub fn parse_caps(s: &str) -> Result<Caps> {
    let mut caps = Caps::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| schema(format!("bad cap {part:?}")))?;
        let v: usize = v.trim().parse().map_err(|_| schema(format!("bad cap value {v:?}")))?;
        match k.trim() {
            "tuples" => caps.tuples = v,
            "points" => caps.points = v,
            other => return Err(schema(format!("unknown cap {other:?}"))),
        }
    }
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::grid2d;

    const TRIANGLE: &str = r#"{
        "points": [{"id": 1}, {"id": 0, "label": "a"}, {"id": 2}],
        "metric": {"type": "matrix", "data": [[0, 1, "inf"], [1, 0, "inf"], ["inf", "inf", 0]]},
        "ref_measure": [0.5, 0.25, 0.25]
    }"#;

    #[test]
    fn matrix_space() {
        let s = parse_space_json(TRIANGLE, Caps::default()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(0, 2), Ext::Infinite);
        assert_eq!(s.labels()[0].as_deref(), Some("a"));
        let back = parse_space_json(&space_to_json(&s).to_string(), Caps::default()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn euclidean_and_graph() {
        let e = r#"{"points": [{"id": 0, "coords": [0, 0]}, {"id": 1, "coords": [3, 4]}],
                    "metric": {"type": "euclidean"}, "ref_measure": [1, 1]}"#;
        assert_eq!(
            parse_space_json(e, Caps::default()).unwrap().dist(0, 1),
            Ext::Finite(5.0)
        );
        let g = r#"{"points": [{"id": 0}, {"id": 1}, {"id": 2}],
                    "metric": {"type": "graph", "edges": [[0, 1, 1.5], [1, 2, 2]]}, "ref_measure": [1, 1, 1]}"#;
        assert_eq!(
            parse_space_json(g, Caps::default()).unwrap().dist(0, 2),
            Ext::Finite(3.5)
        );
        let g2 = grid2d((0.0, 1.0, 2), (0.0, 1.0, 2)).unwrap();
        let back = parse_space_json(&space_to_json(&g2).to_string(), Caps::default()).unwrap();
        assert_eq!(back, g2);
    }

    #[test]
    fn malformed_spaces() {
        for bad in [
            "",
            "{}",
            r#"{"points": [], "metric": {"type": "euclidean"}, "ref_measure": []}"#,
            r#"{"points": [{"id": 1}], "metric": {"type": "matrix", "data": [[0]]}, "ref_measure": [1]}"#,
            r#"{"points": [{"id": 0}], "metric": {"type": "euclidean"}, "ref_measure": [1]}"#,
            r#"{"points": [{"id": 0}], "metric": {"type": "matrix", "data": [[-1]]}, "ref_measure": [1]}"#,
            r#"{"points": [{"id": 0}], "metric": {"type": "matrix", "data": [[0]]}, "ref_measure": [1, 2]}"#,
        ] {
            assert!(
                matches!(parse_space_json(bad, Caps::default()), Err(Error::Schema(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn csv_space() {
        let s = parse_space_csv("0, 2\n2, inf\n", "1\n1\n", Caps::default()).unwrap();
        assert_eq!(s.dist(1, 1), Ext::Infinite);
        assert!(!s.validate().is_clean());
        assert!(parse_space_csv("0,1\n1\n", "1,1", Caps::default()).is_err());
    }

    #[test]
    fn measures_and_mixtures() {
        let s = Arc::new(parse_space_json(TRIANGLE, Caps::default()).unwrap());
        let d = parse_measure_shorthand("dirac:2", &s).unwrap();
        assert_eq!(d.weights(), &[0.0, 0.0, 1.0]);
        let u = parse_measure_shorthand("uniform:0-1", &s).unwrap();
        assert_eq!(u.weights(), &[0.5, 0.5, 0.0]);
        assert!(parse_measure_shorthand("dirac:3", &s).is_err());
        let m = parse_measure_json(r#"{"space": "t.json", "weights": [0.5, 0.5, 0]}"#, &s).unwrap();
        assert_eq!(m, u);
        let mix = parse_mixture_json(
            r#"{"components": [{"lambda": 0.25, "measure": "dirac:0"},
                               {"lambda": 0.5, "measure": {"weights": [0, 1, 0]}},
                               {"lambda": 0.25, "measure": "m.json"}]}"#,
            &s,
            &|p| {
                assert_eq!(p, "m.json");
                Ok(r#"{"weights": [0, 0, 1]}"#.into())
            },
        )
        .unwrap();
        assert_eq!(mix.lambdas(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn sets_functions_caps() {
        assert_eq!(parse_set_json(r#"{"indices": [2, 0]}"#).unwrap(), vec![2, 0]);
        let f = parse_function_json(r#"{"values": [1, -0.5, "-inf"]}"#).unwrap();
        assert_eq!(f[2], f64::NEG_INFINITY);
        assert!(parse_function_json(r#"{"values": ["inf"]}"#).is_err());
        let c = parse_caps("tuples=10, points=7").unwrap();
        assert_eq!((c.tuples, c.points), (10, 7));
        assert!(parse_caps("rows=1").is_err());
        assert_eq!(parse_index_list("1,3-5").unwrap(), vec![1, 3, 4, 5]);
    }
}
