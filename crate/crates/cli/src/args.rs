//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "barycd",
    version,
    about = "Wasserstein barycenters and barycentric curvature certificates"
)]
pub struct Cli {
    /// Size caps, e.g. `tuples=200000,points=4096`.
    #[arg(long, global = true)]
    pub caps: Option<String>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock timing in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArg {
    /// Space file: JSON, or a CSV distance matrix together with `--space-mass`.
    #[arg(long)]
    pub space: PathBuf,
    /// Mass file accompanying a CSV distance matrix.
    #[arg(long)]
    pub space_mass: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteArg {
    Lp,
    Mmot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Vertex,
    MinEntropy,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeArg {
    Scattered,
    Ball,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassArg {
    Trapezoid,
    Uniform,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms and the reference measure.
    Validate {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Generate a model space.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write the space document here instead of embedding it in the report.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Exact (or entropic) quadratic Wasserstein distance.
    W2 {
        #[command(flatten)]
        space: SpaceArg,
        /// Measure file or shorthand (`dirac:i`, `uniform:i,j,…`).
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        /// Regularization strength for the Sinkhorn solver.
        #[arg(long)]
        entropic: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Mass fraction a row may leak and still count as mapped.
        #[arg(long, default_value_t = 1e-9)]
        monge_tol: f64,
    },
    /// Multi-marginal transport with barycentric cost.
    Mmot {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, num_args = 1.., required = true)]
        marginals: Vec<String>,
        /// Comma-separated weights summing to 1.
        #[arg(long)]
        weights: String,
        /// Also push the plan forward to a barycenter.
        #[arg(long)]
        barycenter: bool,
    },
    /// Wasserstein barycenter of a mixture.
    Barycenter {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        mixture: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Lp)]
        route: RouteArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Vertex)]
        mode: ModeArg,
        /// Run the super-position check; a failure exits with 1.
        #[arg(long)]
        superposition: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Barycentric curvature-dimension check, sampled or on one mixture.
    Certify {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long = "K", allow_negative_numbers = true)]
        k: f64,
        /// Dimension, a real ≥ 1 or `inf`.
        #[arg(long = "N", default_value = "inf")]
        n: String,
        #[arg(long)]
        mixture: Option<PathBuf>,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Largest `K` passing on the sampled mixtures.
    BestK {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long = "N", default_value = "inf")]
        n: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = -10.0)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
        hi: f64,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Brunn–Minkowski and Blaschke–Santaló checks.
    Ineq {
        #[command(subcommand)]
        kind: IneqKind,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::MinEntropy)]
    pub mode: ModeArg,
    /// Smallest and largest number of mixture components.
    #[arg(long, num_args = 2, default_values_t = [2, 3])]
    pub components: Vec<usize>,
    /// Smallest and largest support size of a component.
    #[arg(long, num_args = 2, default_values_t = [1, 4])]
    pub support: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Scattered)]
    pub shape: ShapeArg,
    /// Skip the two-Dirac probe trial.
    #[arg(long)]
    pub no_probe: bool,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    Grid1d {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MassArg::Trapezoid)]
        mass: MassArg,
    },
    /// Grid on a line with the normalized standard Gaussian reference measure.
    Gaussian {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        n: usize,
    },
    Grid2d {
        #[arg(long, allow_negative_numbers = true)]
        ax: f64,
        #[arg(long, allow_negative_numbers = true)]
        bx: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long, allow_negative_numbers = true)]
        ay: f64,
        #[arg(long, allow_negative_numbers = true)]
        by: f64,
        #[arg(long)]
        ny: usize,
    },
    Circle {
        #[arg(long)]
        length: f64,
        #[arg(long)]
        n: usize,
    },
    Graph {
        #[arg(long)]
        n: usize,
        /// Edges as `u-v:len` separated by commas.
        #[arg(long)]
        edges: String,
        /// Comma-separated masses; uniform `1/n` when omitted.
        #[arg(long)]
        mass: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum IneqKind {
    Bm {
        #[command(flatten)]
        sets: SetArgs,
        #[arg(long = "N", default_value_t = 1.0)]
        n: f64,
    },
    Logbm {
        #[command(flatten)]
        sets: SetArgs,
    },
    Bs {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, num_args = 1.., required = true)]
        fns: Vec<PathBuf>,
        /// Append the largest admissible last function before checking.
        #[arg(long)]
        complete: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SetArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    /// Set files, or index lists such as `0-16`.
    #[arg(long, num_args = 1.., required = true)]
    pub sets: Vec<String>,
    #[arg(long)]
    pub weights: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}
