//! Numerical laboratory for one-dimensional optimal transport: exact
//! Wasserstein distances between atom/segment measures, the shift
//! superposition `μ_h = ½(id−h)#μ + ½(id+h)#μ` and its rate quotient
//! `W_p(μ, μ_h)/h`, centred Cantor sets and their uniform measures, porosity
//! profiles, and discrete measure fields over atomic bases.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cantor;
pub mod error;
pub mod field;
pub mod intervals;
pub mod io;
pub mod measure;
pub mod par;
pub mod piecewise;
pub mod porosity;
mod quad;
pub mod rates;
pub mod transport;

pub use cantor::{AlphaRule, CantorSpec};
pub use error::{Error, Result};
pub use field::{Fiber, MeasureField};
pub use intervals::IntervalSet;
pub use measure::{Atom, Measure1D, MonotoneFn, Quantile, Segment};
pub use par::Execution;
pub use piecewise::PiecewiseLinear;
