//! Separable geodesic flows on S^3 and their reductions to S^2 x S^2.
//!
//! The crate covers the Lie-Poisson space so*(4), the six separable
//! coordinate families, their bifurcation diagrams and singularities,
//! action integrals and monodromy, trajectory checks, the Grassmannian of
//! planes and the small S^2 analogues.

pub mod actions;
pub mod critical;
pub mod dynamics;
pub mod error;
pub mod grassmann;
pub mod param_space;
pub mod s2;
pub mod separation;
pub mod so4;
pub mod system;

pub use error::{Error, Result};
pub use actions::ActionTriple;
pub use so4::{Bivector, CotangentPoint, DiagonalSpectrum, QuadraticObservable, XYPair};
pub use system::{Family, IntegralValues, Params, SystemSpec};
