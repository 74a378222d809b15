//! Monte Carlo solution of Robin boundary value problems through reflecting
//! Brownian motion killed by its boundary local time, with finite-difference
//! reference solvers to check it against.

pub mod boundary;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod verify;

pub use boundary::{BetaProfile, BetaValue, BoundarySpec, RobinMeasure};
pub use error::{Error, Result};
pub use geometry::{BoundaryPoint, Domain, Point};
pub use sampler::SimConfig;
