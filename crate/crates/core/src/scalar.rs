//! Scalar abstraction for the geometric and probabilistic parts of the crate.
//!
//! Capacities and field arithmetic are exact (integers and GF(2^8)); only
//! coordinates, distances and probabilities go through [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable for coordinates and probabilities: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal or sample.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable in every Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
