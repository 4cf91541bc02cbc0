//! Scalar abstraction: every numeric code path in this crate is generic over
//! [`Real`], instantiated as `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::Float;

/// Floating point scalar used by the world, controllers, and the policy.
pub trait Real:
    Float
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}

/// Shorthand used when lowering tolerance constants into a generic context.
#[inline]
pub fn c<S: Real>(x: f64) -> S {
    S::from_f64(x)
}
