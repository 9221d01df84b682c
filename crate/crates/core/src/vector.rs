use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Planar vector, also used for points in the z = const plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;
pub type Vector2 = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_polar(r: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Vec2::new(r * c, r * s)
    }

    pub fn r(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in (-pi, pi].
    pub fn phi(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z component of the cross product `self x o`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.r()
    }

    /// Radial unit vector at this point; e_x at the origin.
    pub fn e_r(self) -> Vec2 {
        let r = self.r();
        if r == 0.0 {
            Vec2::new(1.0, 0.0)
        } else {
            self / r
        }
    }

    /// Azimuthal unit vector at this point; e_y at the origin.
    pub fn e_phi(self) -> Vec2 {
        let er = self.e_r();
        Vec2::new(-er.y, er.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).r()
    }

    /// Max-norm difference, used for pointwise comparisons in checks.
    pub fn max_abs_diff(self, o: Vec2) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs())
    }
}

/// Map an angle into (-pi, pi].
pub fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Cylindrical constructor about the z axis.
    pub fn cylindrical(r: f64, phi: f64, z: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Vec3::new(r * c, r * s, z)
    }

    pub fn planar(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn rho(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polar_accessors() {
        let p = Vec2::new(-1.0, 0.0);
        assert_eq!(p.phi(), PI);
        assert_eq!(Vec2::new(0.0, -2.0).phi(), -PI / 2.0);
        assert_eq!(Vec2::new(3.0, 4.0).r(), 5.0);
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(3.0 * PI), PI);
    }

    #[test]
    fn unit_vectors_are_orthonormal() {
        let p = Vec2::new(0.3, -1.7);
        assert!((p.e_r().norm() - 1.0).abs() < 1e-15);
        assert!(p.e_r().dot(p.e_phi()).abs() < 1e-15);
        assert!((p.e_r().cross(p.e_phi()) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn cartesian_polar_round_trip(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let p = Vec2::new(x, y);
            prop_assert!(p.r() >= 0.0);
            prop_assert!(p.phi() > -PI && p.phi() <= PI);
            let q = Vec2::from_polar(p.r(), p.phi());
            let scale = p.r().max(1e-300);
            prop_assert!((q.x - x).abs() <= 1e-12 * scale);
            prop_assert!((q.y - y).abs() <= 1e-12 * scale);
        }
    }
}
