//! Desk-scale model spaces: grids, circles and weighted graphs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::space::{MetricMeasureSpace, DEFAULT_POINT_CAP};

/// Node weights of a discretized reference measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeMass {
    /// Trapezoid quadrature weights; total mass equals the interval length.
    Trapezoid,
    /// Every node carries `1/n`.
    Uniform,
}

/// Evenly spaced nodes `a = x₀ < … < x_{n−1} = b` with `d = |x − y|`.
pub fn grid1d(a: f64, b: f64, n: usize, mass: NodeMass) -> Result<MetricMeasureSpace> {
    grid1d_weighted(a, b, n, mass, |_| 1.0, false)
}

/// Like [`grid1d`] with node masses multiplied by `density(x)`, optionally
/// normalized to a probability.
pub fn grid1d_weighted(
    a: f64,
    b: f64,
    n: usize,
    mass: NodeMass,
    density: impl Fn(f64) -> f64,
    normalize: bool,
) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::BadParams(format!("grid needs at least 2 points, got {n}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadParams(format!(
            "grid endpoints must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let xs = nodes(a, b, n);
    let h = (b - a) / (n - 1) as f64;
    let mut m: Vec<f64> = (0..n)
        .map(|k| match mass {
            NodeMass::Trapezoid if k == 0 || k == n - 1 => h / 2.0,
            NodeMass::Trapezoid => h,
            NodeMass::Uniform => 1.0 / n as f64,
        })
        .zip(&xs)
        .map(|(w, &x)| w * density(x))
        .collect();
    if m.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::BadParams(
            "density must be positive and finite at every node".into(),
        ));
    }
    if normalize {
        let total: f64 = m.iter().sum();
        m.iter_mut().for_each(|w| *w /= total);
    }
    let dist = xs
        .iter()
        .map(|&x| xs.iter().map(|&y| Ext::Finite((x - y).abs())).collect())
        .collect();
    MetricMeasureSpace::new(dist, m)?.with_coords(xs.iter().map(|&x| vec![x]).collect())
}

/// Standard Gaussian reference measure on `[a, b]`, normalized.
pub fn gaussian_line(a: f64, b: f64, n: usize) -> Result<MetricMeasureSpace> {
    grid1d_weighted(a, b, n, NodeMass::Trapezoid, |x| (-x * x / 2.0).exp(), true)
}

fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Product grid with the Euclidean metric and product trapezoid weights.
pub fn grid2d((ax, bx, nx): (f64, f64, usize), (ay, by, ny): (f64, f64, usize)) -> Result<MetricMeasureSpace> {
    let gx = grid1d(ax, bx, nx, NodeMass::Trapezoid)?;
    let gy = grid1d(ay, by, ny, NodeMass::Trapezoid)?;
    let total = nx * ny;
    if total > DEFAULT_POINT_CAP {
        return Err(Error::TooLarge {
            what: "points",
            size: total,
            cap: DEFAULT_POINT_CAP,
        });
    }
    let xs = nodes(ax, bx, nx);
    let ys = nodes(ay, by, ny);
    let mut coords = Vec::with_capacity(total);
    let mut mass = Vec::with_capacity(total);
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            coords.push(vec![x, y]);
            mass.push(gx.ref_mass()[i] * gy.ref_mass()[j]);
        }
    }
    let dist = euclidean(&coords);
    MetricMeasureSpace::new(dist, mass)?.with_coords(coords)
}

/// Pairwise Euclidean distances of a coordinate list.
pub fn euclidean(coords: &[Vec<f64>]) -> Vec<Vec<Ext>> {
    coords
        .iter()
        .map(|p| {
            coords
                .iter()
                .map(|q| {
                    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                    Ext::Finite(s.sqrt())
                })
                .collect()
        })
        .collect()
}

/// `n` equispaced points on a circle of circumference `length`, arc-length
/// metric, each carrying mass `length / n`.
pub fn circle(length: f64, n: usize) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::BadParams(format!("circle needs at least 2 points, got {n}")));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::BadParams(format!(
            "circumference must be positive, got {length}"
        )));
    }
    let step = length / n as f64;
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = i.abs_diff(j);
                    Ext::Finite(k.min(n - k) as f64 * step)
                })
                .collect()
        })
        .collect();
    let radius = length / std::f64::consts::TAU;
    let coords = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            vec![radius * a.cos(), radius * a.sin()]
        })
        .collect();
    MetricMeasureSpace::new(dist, vec![step; n])?.with_coords(coords)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphMeta {
    pub components: usize,
    pub disconnected: bool,
}

/// Shortest-path metric of an undirected graph with positive edge lengths.
/// Disconnected graphs are allowed and produce `+∞` entries.
pub fn graph(n: usize, edges: &[(usize, usize, f64)], ref_mass: Vec<f64>) -> Result<(MetricMeasureSpace, GraphMeta)> {
    if n < 2 {
        return Err(Error::BadParams(format!("graph needs at least 2 vertices, got {n}")));
    }
    if n > DEFAULT_POINT_CAP {
        return Err(Error::TooLarge {
            what: "points",
            size: n,
            cap: DEFAULT_POINT_CAP,
        });
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, len) in edges {
        if u >= n || v >= n {
            return Err(Error::BadParams(format!("edge ({u}, {v}) out of range")));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::BadParams(format!(
                "edge ({u}, {v}) has nonpositive length {len}"
            )));
        }
        if u != v {
            adj[u].push((v, len));
            adj[v].push((u, len));
        }
    }
    let dist: Vec<Vec<Ext>> = (0..n).map(|s| dijkstra(&adj, s)).collect();
    let space = MetricMeasureSpace::new(dist, ref_mass)?;
    let components = space.finite_classes().into_iter().max().map_or(0, |c| c + 1);
    Ok((
        space,
        GraphMeta {
            components,
            disconnected: components > 1,
        },
    ))
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<Ext> {
    // Lengths are positive and finite, so the bit pattern orders them.
    let mut best = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    best[source] = 0.0;
    heap.push(Reverse((0.0f64.to_bits(), source)));
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > best[u] {
            continue;
        }
        for &(v, len) in &adj[u] {
            let nd = d + len;
            if nd < best[v] {
                best[v] = nd;
                heap.push(Reverse((nd.to_bits(), v)));
            }
        }
    }
    best.into_iter()
        .map(|d| if d.is_finite() { Ext::Finite(d) } else { Ext::Infinite })
        .collect()
}
