use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::{DualQuaternion, Quaternion};

/// Trident number `a0 + ε₁a1 + ε₂a2` with `ε₁² = ε₂² = ε₁ε₂ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TridentNumber {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl TridentNumber {
    pub const fn new(a0: f64, a1: f64, a2: f64) -> Self {
        Self { a0, a1, a2 }
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.a1.is_finite() && self.a2.is_finite()
    }
}

impl Add for TridentNumber {
    type Output = TridentNumber;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a0 + rhs.a0, self.a1 + rhs.a1, self.a2 + rhs.a2)
    }
}

impl Sub for TridentNumber {
    type Output = TridentNumber;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a0 - rhs.a0, self.a1 - rhs.a1, self.a2 - rhs.a2)
    }
}

impl Mul for TridentNumber {
    type Output = TridentNumber;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.a0 * rhs.a0,
            self.a0 * rhs.a1 + self.a1 * rhs.a0,
            self.a0 * rhs.a2 + self.a2 * rhs.a0,
        )
    }
}

impl Mul<f64> for TridentNumber {
    type Output = TridentNumber;
    fn mul(self, k: f64) -> Self {
        Self::new(self.a0 * k, self.a1 * k, self.a2 * k)
    }
}

/// Trident quaternion `q + ε₁q1 + ε₂q2`.
///
/// In navigation use `q` is the attitude `q_eb`, `q1 = ½ (C_i^e ṙ^i) ∘ q`
/// carries the total (inertial) velocity and `q2 = ½ r^e ∘ q` the position.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TridentQuaternion {
    pub q: Quaternion,
    pub q1: Quaternion,
    pub q2: Quaternion,
}

impl TridentQuaternion {
    pub const fn new(q: Quaternion, q1: Quaternion, q2: Quaternion) -> Self {
        Self { q, q1, q2 }
    }

    pub const fn identity() -> Self {
        Self::new(
            Quaternion::identity(),
            Quaternion::zero(),
            Quaternion::zero(),
        )
    }

    pub const fn zero() -> Self {
        Self::new(Quaternion::zero(), Quaternion::zero(), Quaternion::zero())
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.q.conjugate(), self.q1.conjugate(), self.q2.conjugate())
    }

    /// Unit structure: `‖q‖ = 1` and zero scalar parts of `q1 ∘ q*` and
    /// `q2 ∘ q*`. The scalar residues are judged relative to the size of the
    /// imaginary parts, which for earth-frame positions reach millions.
    pub fn is_unit(&self, tol: f64) -> bool {
        self.unit_defect() <= tol
    }

    /// Largest of the three unit-structure violations.
    pub fn unit_defect(&self) -> f64 {
        let qc = self.q.conjugate();
        let r1 = (self.q1 * qc).s.abs() / self.q1.norm().max(1.0);
        let r2 = (self.q2 * qc).s.abs() / self.q2.norm().max(1.0);
        (self.q.norm() - 1.0).abs().max(r1).max(r2)
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.q1.is_finite() && self.q2.is_finite()
    }

    /// Drops the ε₂ part.
    pub fn to_dual(&self) -> DualQuaternion {
        DualQuaternion::new(self.q, self.q1)
    }

    pub fn from_dual(d: &DualQuaternion) -> Self {
        Self::new(d.real, d.dual, Quaternion::zero())
    }

    /// All twelve scalar components, real part first.
    pub fn components(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[..4].copy_from_slice(&self.q.to_array());
        out[4..8].copy_from_slice(&self.q1.to_array());
        out[8..].copy_from_slice(&self.q2.to_array());
        out
    }

    /// Euclidean norm over all twelve components.
    pub fn coefficient_norm(&self) -> f64 {
        (self.q.norm_squared() + self.q1.norm_squared() + self.q2.norm_squared()).sqrt()
    }
}

/// Trident product:
/// `a.q∘b.q + ε₁(a.q∘b.q1 + a.q1∘b.q) + ε₂(a.q∘b.q2 + a.q2∘b.q)`.
#[inline]
pub fn tq_mul(a: &TridentQuaternion, b: &TridentQuaternion) -> TridentQuaternion {
    TridentQuaternion::new(a.q * b.q, a.q * b.q1 + a.q1 * b.q, a.q * b.q2 + a.q2 * b.q)
}

#[inline]
pub fn tq_conjugate(t: &TridentQuaternion) -> TridentQuaternion {
    t.conjugate()
}

impl Mul for TridentQuaternion {
    type Output = TridentQuaternion;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        tq_mul(&self, &rhs)
    }
}

impl Mul<f64> for TridentQuaternion {
    type Output = TridentQuaternion;
    #[inline]
    fn mul(self, k: f64) -> Self {
        Self::new(self.q * k, self.q1 * k, self.q2 * k)
    }
}

impl Add for TridentQuaternion {
    type Output = TridentQuaternion;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.q + rhs.q, self.q1 + rhs.q1, self.q2 + rhs.q2)
    }
}

impl AddAssign for TridentQuaternion {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.q += rhs.q;
        self.q1 += rhs.q1;
        self.q2 += rhs.q2;
    }
}

impl Sub for TridentQuaternion {
    type Output = TridentQuaternion;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.q - rhs.q, self.q1 - rhs.q1, self.q2 - rhs.q2)
    }
}

impl Neg for TridentQuaternion {
    type Output = TridentQuaternion;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.q, -self.q1, -self.q2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dq_mul, Vec3};

    fn sample(seed: f64) -> TridentQuaternion {
        let q = Quaternion::new(seed.cos(), 0.3 * seed, -0.2, 0.5).normalize();
        let a = Vec3::new(1.0 + seed, -2.0, 0.5 * seed);
        let r = Vec3::new(-3.0, seed, 4.0);
        TridentQuaternion::new(
            q,
            Quaternion::vector(a) * q * 0.5,
            Quaternion::vector(r) * q * 0.5,
        )
    }

    #[test]
    fn trident_numbers_follow_nilpotent_rules() {
        let e1 = TridentNumber::new(0.0, 1.0, 0.0);
        let e2 = TridentNumber::new(0.0, 0.0, 1.0);
        assert_eq!(e1 * e1, TridentNumber::default());
        assert_eq!(e2 * e2, TridentNumber::default());
        assert_eq!(e1 * e2, TridentNumber::default());
        let a = TridentNumber::new(2.0, 3.0, -1.0);
        let b = TridentNumber::new(-0.5, 4.0, 2.0);
        assert_eq!(a * b, TridentNumber::new(-1.0, 6.5, 4.5));
    }

    #[test]
    fn cross_imaginary_product_vanishes() {
        let x = TridentQuaternion::new(
            Quaternion::zero(),
            Quaternion::new(0.5, 1.0, -2.0, 3.0),
            Quaternion::zero(),
        );
        let y = TridentQuaternion::new(
            Quaternion::zero(),
            Quaternion::zero(),
            Quaternion::new(-1.0, 0.0, 4.0, 2.0),
        );
        assert_eq!(x * y, TridentQuaternion::zero());
        assert_eq!(y * x, TridentQuaternion::zero());
    }

    #[test]
    fn identity_and_involution() {
        let t = sample(0.7);
        assert_eq!(TridentQuaternion::identity() * t, t);
        assert_eq!(t * TridentQuaternion::identity(), t);
        assert_eq!(t.conjugate().conjugate(), t);
        assert_eq!(
            TridentQuaternion::identity().conjugate(),
            TridentQuaternion::identity()
        );
    }

    #[test]
    fn conjugate_inverts_unit_tridents() {
        let t = sample(1.3);
        assert!(t.is_unit(1e-14));
        let p = t * t.conjugate();
        assert!((p - TridentQuaternion::identity()).coefficient_norm() < 1e-13);
        let p = t.conjugate() * t;
        assert!((p - TridentQuaternion::identity()).coefficient_norm() < 1e-13);
    }

    #[test]
    fn product_of_units_is_unit() {
        let p = sample(0.2) * sample(-1.1);
        assert!(p.is_unit(1e-14));
    }

    #[test]
    fn zero_second_imaginary_matches_dual_product() {
        let a = sample(0.4);
        let b = sample(2.0);
        let a = TridentQuaternion::new(a.q, a.q1, Quaternion::zero());
        let b = TridentQuaternion::new(b.q, b.q1, Quaternion::zero());
        let t = tq_mul(&a, &b);
        let d = dq_mul(&a.to_dual(), &b.to_dual());
        assert_eq!(t.to_dual(), d);
        assert_eq!(t.q2, Quaternion::zero());
    }
}
