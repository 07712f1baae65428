use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Matrix3;

use super::{Vec3, UNIT_TOLERANCE};
use crate::error::{Error, Result};

/// Hamilton quaternion `s + v`, scalar first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub s: f64,
    pub v: Vec3,
}

impl Quaternion {
    #[inline]
    pub const fn new(s: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            s,
            v: Vec3::new(x, y, z),
        }
    }

    #[inline]
    pub fn from_parts(s: f64, v: Vec3) -> Self {
        Self { s, v }
    }

    #[inline]
    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Promotes a 3-vector to the vector quaternion `[0, v]`.
    #[inline]
    pub fn vector(v: Vec3) -> Self {
        Self { s: 0.0, v }
    }

    /// Unit quaternion for a rotation of `angle` rad about `axis`.
    ///
    /// The axis is normalised here; a zero axis yields the identity.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        let (sh, ch) = (0.5 * angle).sin_cos();
        Self::from_parts(ch, axis * (sh / n))
    }

    /// Exponential map of a rotation vector (angle times unit axis).
    pub fn from_rotation_vector(phi: &Vec3) -> Self {
        let angle = phi.norm();
        let half = 0.5 * angle;
        // sin(x)/x series below the point where the division loses digits
        let k = if angle < 1e-4 {
            0.5 * (1.0 - half * half / 6.0 + half.powi(4) / 120.0)
        } else {
            half.sin() / angle
        };
        Self::from_parts(half.cos(), phi * k)
    }

    /// Quaternion of a direction cosine matrix that maps frame-B coordinates
    /// into frame-A coordinates (Shepperd's method).
    pub fn from_dcm(m: &Matrix3<f64>) -> Self {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace > 0.0 {
            let s = 2.0 * (1.0 + trace).sqrt();
            Self::new(
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            Self::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            Self::new(
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            Self::new(
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        };
        if q.s < 0.0 {
            -q
        } else {
            q
        }
    }

    #[inline]
    pub fn conjugate(&self) -> Self {
        Self::from_parts(self.s, -self.v)
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.s * self.s + self.v.norm_squared()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&self) -> Self {
        *self * (1.0 / self.norm())
    }

    /// Multiplicative inverse `q* / |q|²`.
    pub fn inverse(&self) -> Self {
        self.conjugate() * (1.0 / self.norm_squared())
    }

    #[inline]
    pub fn is_vector(&self) -> bool {
        self.s == 0.0
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Fails with [`Error::NonUnitQuaternion`] unless `|‖q‖ − 1| ≤ tol`.
    pub fn ensure_unit(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= tol && norm.is_finite() {
            Ok(())
        } else {
            Err(Error::NonUnitQuaternion { norm, tol })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.v.iter().all(|x| x.is_finite())
    }

    /// `q ∘ [0, r] ∘ q*` without forming intermediate quaternions.
    ///
    /// For an attitude `q_AB` this maps B-frame coordinates into frame A.
    #[inline]
    pub fn rotate_vector(&self, r: &Vec3) -> Vec3 {
        let t = 2.0 * self.v.cross(r);
        r + self.s * t + self.v.cross(&t)
    }

    /// `q* ∘ [0, r] ∘ q`; maps frame-A coordinates into frame B for `q_AB`.
    #[inline]
    pub fn inverse_rotate_vector(&self, r: &Vec3) -> Vec3 {
        self.conjugate().rotate_vector(r)
    }

    /// Direction cosine matrix equivalent to [`Quaternion::rotate_vector`].
    pub fn to_dcm(&self) -> Matrix3<f64> {
        let (w, x, y, z) = (self.s, self.v.x, self.v.y, self.v.z);
        Matrix3::new(
            w * w + x * x - y * y - z * z,
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            w * w - x * x + y * y - z * z,
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            w * w - x * x - y * y + z * z,
        )
    }

    /// Components as `[s, x, y, z]`.
    #[inline]
    pub fn to_array(&self) -> [f64; 4] {
        [self.s, self.v.x, self.v.y, self.v.z]
    }
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::zero()
    }
}

/// Hamilton product `a ∘ b`.
#[inline]
pub fn quat_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    Quaternion::from_parts(
        a.s * b.s - a.v.dot(&b.v),
        a.s * b.v + b.s * a.v + a.v.cross(&b.v),
    )
}

#[inline]
pub fn quat_conjugate(q: &Quaternion) -> Quaternion {
    q.conjugate()
}

/// Coordinates in frame N of a vector given in frame O: `q_ON* ∘ r ∘ q_ON`.
pub fn rotate_frame(q_on: &Quaternion, r_o: &Vec3) -> Result<Vec3> {
    q_on.ensure_unit(UNIT_TOLERANCE)?;
    Ok(q_on.inverse_rotate_vector(r_o))
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(&self, &rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, k: f64) -> Quaternion {
        Quaternion::from_parts(self.s * k, self.v * k)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.s + rhs.s, self.v + rhs.v)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, rhs: Quaternion) {
        self.s += rhs.s;
        self.v += rhs.v;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_parts(self.s - rhs.s, self.v - rhs.v)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::from_parts(-self.s, -self.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn close(a: &Quaternion, b: &Quaternion, tol: f64) -> bool {
        (*a - *b).norm() <= tol
    }

    #[test]
    fn unit_imaginaries_multiply_cyclically() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(k * i, j);
        assert_eq!(j * k, i);
        assert_eq!(i * i, Quaternion::new(-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn identity_is_neutral() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        assert_eq!(Quaternion::identity() * q, q);
        assert_eq!(q * Quaternion::identity(), q);
    }

    #[test]
    fn two_45_degree_turns_make_a_right_angle() {
        let (s, c) = FRAC_PI_4.sin_cos();
        let q = Quaternion::new(c, 0.0, 0.0, s);
        let expected = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert!(close(&(q * q), &expected, 1e-15));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Quaternion::identity().conjugate(), Quaternion::identity());
        assert_eq!(
            Quaternion::new(0.0, 1.0, 2.0, 3.0).conjugate(),
            Quaternion::new(0.0, -1.0, -2.0, -3.0)
        );
    }

    #[test]
    fn rotate_frame_about_z() {
        let q = Quaternion::from_axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        let r = rotate_frame(&q, &Vec3::x()).unwrap();
        assert!((r - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        let same = rotate_frame(&Quaternion::identity(), &Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(same, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn rotate_frame_rejects_non_unit() {
        let q = Quaternion::new(1.0, 0.1, 0.0, 0.0);
        assert!(matches!(
            rotate_frame(&q, &Vec3::x()),
            Err(Error::NonUnitQuaternion { .. })
        ));
    }

    #[test]
    fn rotate_vector_agrees_with_sandwich_and_dcm() {
        let q = Quaternion::new(0.4, -0.3, 0.8, 0.1).normalize();
        let r = Vec3::new(0.5, -2.0, 1.5);
        let sandwich = q * Quaternion::vector(r) * q.conjugate();
        assert!((sandwich.v - q.rotate_vector(&r)).norm() < 4e-15);
        assert!((q.to_dcm() * r - q.rotate_vector(&r)).norm() < 4e-15);
        let back = Quaternion::from_dcm(&q.to_dcm());
        assert!(close(&back, &q, 1e-15) || close(&back, &-q, 1e-15));
    }

    #[test]
    fn small_rotation_vector_matches_axis_angle() {
        let axis = Vec3::new(1.0, -2.0, 0.5);
        for angle in [1e-9, 3e-5, 0.2, 2.5] {
            let a = Quaternion::from_rotation_vector(&(axis.normalize() * angle));
            let b = Quaternion::from_axis_angle(&axis, angle);
            assert!(close(&a, &b, 4e-16), "angle {angle}");
        }
    }
}
