//! Wasserstein barycenters, multi-marginal optimal transport and barycentric
//! curvature-dimension certificates on finite extended metric measure spaces.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Dense pivoting reads better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod barycenter;
pub mod curvature;
pub mod error;
pub mod ext;
pub mod generate;
pub mod ineq;
pub mod io;
pub mod lp;
pub mod measure;
pub mod report;
pub mod space;
pub mod transport;
mod tuples;

pub use barycenter::Mixture;
pub use error::{Error, Result};
pub use ext::Ext;
pub use measure::DiscreteMeasure;
pub use space::{Caps, MetricMeasureSpace, WeightedPointSet};
