//! Numeric traits the library is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};

/// Floating point scalar used for coordinates, lengths and angles: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Allowed deviation of a unit vector's norm from one.
    const UNIT_TOLERANCE: Self;
    /// Distance below which two points are treated as coincident.
    const COINCIDENT_TOLERANCE: Self;
    /// Margin to `π` below which a start tangent is treated as pointing away from the chord.
    const ANTIPARALLEL_TOLERANCE: Self;

    /// Converts an `f64` literal. Panics only for values not representable, which never
    /// happens for `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const UNIT_TOLERANCE: Self = 1e-9;
    const COINCIDENT_TOLERANCE: Self = 1e-12;
    const ANTIPARALLEL_TOLERANCE: Self = 1e-6;
}

impl Real for f32 {
    const UNIT_TOLERANCE: Self = 1e-5;
    const COINCIDENT_TOLERANCE: Self = 1e-6;
    const ANTIPARALLEL_TOLERANCE: Self = 1e-3;
}

/// Arc weight usable by the tree solvers.
///
/// Floats and signed integers both qualify; integer weights make optimality checks exact.
pub trait Weight:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Zero + Debug + Send + Sync
{
}

impl<W> Weight for W where
    W: Copy + PartialOrd + Add<Output = W> + Sub<Output = W> + Zero + Debug + Send + Sync
{
}
