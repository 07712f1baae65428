//! Quaternion, dual quaternion and trident quaternion arithmetic.
//!
//! All types are plain `Copy` values; every operation returns a new value.
//! Three-vectors are `nalgebra::Vector3<f64>` and enter quaternion products
//! only through the explicit [`Quaternion::vector`] constructor.

mod dual;
mod quaternion;
mod trident;

pub use dual::{dq_mul, DualQuaternion};
pub use quaternion::{quat_conjugate, quat_mul, rotate_frame, Quaternion};
pub use trident::{tq_conjugate, tq_mul, TridentNumber, TridentQuaternion};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Unit-norm tolerance for validating caller-supplied attitudes.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Vector part of `½ (v1 ∘ v2 − v2 ∘ v1)`, which equals `v1 × v2` for vector
/// quaternions.
pub fn commutator_half(v1: &Vec3, v2: &Vec3) -> Quaternion {
    let a = Quaternion::vector(*v1);
    let b = Quaternion::vector(*v2);
    (a * b - b * a) * 0.5
}
