use serde::{Deserialize, Serialize};

use super::{Point3, UnitVec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A centerline point together with its estimated flow direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OrientedSample<T> {
    pub position: Point3<T>,
    pub tangent: UnitVec3<T>,
    pub radius: Option<T>,
}

impl<T: Real> OrientedSample<T> {
    pub fn new(position: Point3<T>, tangent: UnitVec3<T>) -> Result<Self> {
        Self::with_radius(position, tangent, None)
    }

    pub fn with_radius(position: Point3<T>, tangent: UnitVec3<T>, radius: Option<T>) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::NonFinite);
        }
        if let Some(r) = radius {
            if !(r >= T::zero()) {
                return Err(Error::NegativeRadius(r.as_f64()));
            }
        }
        Ok(Self { position, tangent, radius })
    }

    /// Same point with the flow direction reversed.
    pub fn flipped(&self) -> Self {
        Self { tangent: self.tangent.flipped(), ..*self }
    }
}
