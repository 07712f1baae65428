use std::ops::{Add, Mul, Sub};

use super::{Quaternion, Vec3};

/// Dual quaternion `real + ε dual` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualQuaternion {
    pub real: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub fn new(real: Quaternion, dual: Quaternion) -> Self {
        Self { real, dual }
    }

    pub fn identity() -> Self {
        Self::new(Quaternion::identity(), Quaternion::zero())
    }

    /// Rotation `q` followed by translation `t` given in the reference frame:
    /// `q + ε ½ t ∘ q`.
    pub fn from_rotation_translation(q: Quaternion, t: &Vec3) -> Self {
        Self::new(q, Quaternion::vector(*t) * q * 0.5)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.real.conjugate(), self.dual.conjugate())
    }

    /// Unit: real part of unit norm and `scalar(dual ∘ real*) = 0`.
    pub fn is_unit(&self, tol: f64) -> bool {
        let residue = (self.dual * self.real.conjugate()).s;
        self.real.is_unit(tol) && residue.abs() <= tol * self.dual.norm().max(1.0)
    }

    /// Translation `2 dual ∘ real⁻¹` (vector part).
    pub fn translation(&self) -> Vec3 {
        (self.dual * self.real.inverse() * 2.0).v
    }
}

/// `a ∘ b = a.real ∘ b.real + ε (a.real ∘ b.dual + a.dual ∘ b.real)`.
#[inline]
pub fn dq_mul(a: &DualQuaternion, b: &DualQuaternion) -> DualQuaternion {
    DualQuaternion::new(a.real * b.real, a.real * b.dual + a.dual * b.real)
}

impl Mul for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, rhs: DualQuaternion) -> DualQuaternion {
        dq_mul(&self, &rhs)
    }
}

impl Mul<f64> for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, k: f64) -> DualQuaternion {
        DualQuaternion::new(self.real * k, self.dual * k)
    }
}

impl Add for DualQuaternion {
    type Output = DualQuaternion;
    fn add(self, rhs: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.real + rhs.real, self.dual + rhs.dual)
    }
}

impl Sub for DualQuaternion {
    type Output = DualQuaternion;
    fn sub(self, rhs: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.real - rhs.real, self.dual - rhs.dual)
    }
}
