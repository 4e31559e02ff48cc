//! Substitution systems with a non-primitive matrix, their graph-directed fractals and
//! second-order (log-averaged) ergodic sums.
//!
//! Modules follow the pipeline: [`subcore`] words and rules, [`spectral`] matrix analysis,
//! [`tiling`] suspension and grid tilings, [`gdifs`] the fractal and its density,
//! [`ergodic`] normalizations and averaging engines.

pub mod ergodic;
pub mod error;
pub mod gdifs;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod subcore;
pub mod tiling;

pub use error::{Error, Result};
pub use model::Model;
pub use scalar::{Rational, Real, Scalar};

/// Double-precision instantiations.
pub type Graph = gdifs::GdifsGraph<f64>;
pub type Mass = gdifs::MassVector<f64>;
pub type Lengths = tiling::LengthVector<f64>;
