use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Three-component vector; also used for points (see [`Point3`]).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// A position in voxel units.
pub type Point3<T> = Vec3<T>;

impl<T: Real> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    #[inline]
    pub fn distance_squared(self, o: Self) -> T {
        (self - o).norm_squared()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn component(self, axis: usize) -> T {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    /// Linear interpolation `self + (o - self) * t`.
    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    /// Unit vector in the direction of `self`, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<UnitVec3<T>> {
        let n = self.norm();
        if n > T::COINCIDENT_TOLERANCE && n.is_finite() {
            Some(UnitVec3(self / n))
        } else {
            None
        }
    }

    /// Any unit vector orthogonal to `self`. `self` must be non-zero.
    pub fn any_orthogonal(self) -> UnitVec3<T> {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        let helper = if ax <= ay && ax <= az {
            Self::new(T::one(), T::zero(), T::zero())
        } else if ay <= az {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        UnitVec3(self.cross(helper) / self.cross(helper).norm())
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A vector of unit Euclidean norm (within [`Real::UNIT_TOLERANCE`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3<T>", into = "Vec3<T>", bound = "T: Real")]
pub struct UnitVec3<T>(Vec3<T>);

impl<T: Real> UnitVec3<T> {
    /// Checks that `(x, y, z)` already has unit norm. Use [`Vec3::normalized`] to rescale.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        Self::try_from(Vec3::new(x, y, z))
    }

    /// Wraps `v` without checking. Callers guarantee `|v| = 1`.
    #[inline]
    pub(crate) fn new_unchecked(v: Vec3<T>) -> Self {
        Self(v)
    }

    pub fn x_axis() -> Self {
        Self(Vec3::new(T::one(), T::zero(), T::zero()))
    }

    pub fn y_axis() -> Self {
        Self(Vec3::new(T::zero(), T::one(), T::zero()))
    }

    pub fn z_axis() -> Self {
        Self(Vec3::new(T::zero(), T::zero(), T::one()))
    }

    #[inline]
    pub fn as_vec(self) -> Vec3<T> {
        self.0
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.0.dot(o.0)
    }

    #[inline]
    pub fn flipped(self) -> Self {
        Self(-self.0)
    }

    /// Angle between the two directions, in `[0, π]`.
    #[inline]
    pub fn angle_to(self, o: Self) -> T {
        clamped_acos(self.dot(o))
    }
}

impl<T: Real> TryFrom<Vec3<T>> for UnitVec3<T> {
    type Error = Error;

    fn try_from(v: Vec3<T>) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || (n - T::one()).abs() > T::UNIT_TOLERANCE {
            return Err(Error::NotUnit(n.as_f64()));
        }
        Ok(Self(v))
    }
}

impl<T: Real> From<UnitVec3<T>> for Vec3<T> {
    fn from(u: UnitVec3<T>) -> Self {
        u.0
    }
}

impl<T: Real> Neg for UnitVec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.flipped()
    }
}

/// `acos` with the argument clamped to `[-1, 1]`.
#[inline]
pub fn clamped_acos<T: Real>(c: T) -> T {
    c.max(-T::one()).min(T::one()).acos()
}
