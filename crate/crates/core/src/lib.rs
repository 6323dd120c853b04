//! Goodness-of-fit testing for densities on `[0, 1)` and multinomials from
//! non-interactive, locally differentially private views.

pub mod adaptive;
pub mod channel;
pub mod dyadic;
pub mod error;
pub mod gof;
pub mod harness;
pub mod rates;
pub mod rng;

pub use channel::{ChannelSpec, PrivatizedSample};
pub use dyadic::{CoefficientVector, PiecewiseConstantDensity, ProbabilityVector};
pub use error::{Error, Result};
pub use rng::Seed;
