use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Workspace position or displacement in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Real> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(S::from_f64(x), S::from_f64(y), S::from_f64(z))
    }

    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> S {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> S {
        (self - other).norm()
    }

    /// Distance ignoring the z component.
    pub fn horizontal_distance(self, other: Self) -> S {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Componentwise clamp into `[lo, hi]`.
    pub fn clamp_box(self, lo: Self, hi: Self) -> Self {
        Self::new(
            self.x.max(lo.x).min(hi.x),
            self.y.max(lo.y).min(hi.y),
            self.z.max(lo.z).min(hi.z),
        )
    }
}

impl<S: Real> Add for Vec3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<S: Real> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<S: Real> Mul<S> for Vec3<S> {
    type Output = Self;
    fn mul(self, rhs: S) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl<S: Real> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_is_symmetric() {
        let a: Vec3<f64> = Vec3::from_f64(0.1, -0.2, 0.3);
        let b = Vec3::from_f64(-0.4, 0.0, 0.1);
        assert_eq!(a.distance(b), b.distance(a));
    }

    #[test]
    fn clamp_box_pins_components() {
        let v: Vec3<f64> = Vec3::from_f64(2.0, -2.0, 0.1);
        let lo = Vec3::from_f64(-0.5, -0.5, 0.0);
        let hi = Vec3::from_f64(0.5, 0.5, 0.5);
        let c = v.clamp_box(lo, hi);
        assert_eq!((c.x, c.y, c.z), (0.5, -0.5, 0.1));
    }
}
