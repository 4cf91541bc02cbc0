//! Core library: a deterministic tabletop manipulation benchmark with a
//! structured query language, a scripted skill library, conditional plan
//! tooling, and plan-conditioned behavioral cloning.
//!
//! All numeric code is generic over [`scalar::Real`]; the concrete aliases
//! below fix the default precision used by the CLI and the experiments.

pub mod error;
pub mod eval;
pub mod geom;
pub mod pcbc;
pub mod plan;
pub mod query;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod skills;
pub mod train;

pub use error::{Error, Result};

/// Default scalar for experiments: 64-bit for clean gradient checks.
pub type Scalar = f64;

pub type Vec3 = geom::Vec3<Scalar>;
pub type WorldState = sim::WorldState<Scalar>;
pub type Action = sim::Action<Scalar>;
pub type Observation = sim::Observation<Scalar>;
pub type Demonstration = skills::Demonstration<Scalar>;
