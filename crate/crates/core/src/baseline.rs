//! Two-sample strapdown algorithm in the earth frame.
//!
//! Each update consumes two consecutive gyro/accelerometer increments. The
//! body rotation vector carries the `(2/3)Δθ₁×Δθ₂` coning term and the
//! velocity increment the rotation and `(2/3)(Δθ₁×Δv₂ + Δv₁×Δθ₂)` sculling
//! terms. Earth rotation is applied as a separate left rotation, gravity
//! and Coriolis at the extrapolated mid-step state, and position by the
//! trapezoidal rule.

use crate::algebra::{Quaternion, Vec3, UNIT_TOLERANCE};
use crate::earth::EarthModel;
use crate::error::{Error, Result};
use crate::kinematics::NavState;
use crate::tqfilter::ImuSample;

/// Two consecutive increments spanning `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleStep {
    pub dtheta1: Vec3,
    pub dtheta2: Vec3,
    pub dv1: Vec3,
    pub dv2: Vec3,
    pub duration: f64,
}

impl TwoSampleStep {
    pub fn new(dtheta1: Vec3, dtheta2: Vec3, dv1: Vec3, dv2: Vec3, duration: f64) -> Result<Self> {
        let finite = [dtheta1, dtheta2, dv1, dv2]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !finite || !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::InvalidStep(format!(
                "two-sample step needs finite increments and a positive duration, got {duration}"
            )));
        }
        Ok(Self {
            dtheta1,
            dtheta2,
            dv1,
            dv2,
            duration,
        })
    }

    /// Coning-compensated rotation vector.
    pub fn rotation_vector(&self) -> Vec3 {
        self.dtheta1 + self.dtheta2 + (2.0 / 3.0) * self.dtheta1.cross(&self.dtheta2)
    }

    /// Body-frame velocity increment with rotation and sculling terms.
    pub fn velocity_increment(&self) -> Vec3 {
        let dth = self.dtheta1 + self.dtheta2;
        let dv = self.dv1 + self.dv2;
        dv + 0.5 * dth.cross(&dv)
            + (2.0 / 3.0) * (self.dtheta1.cross(&self.dv2) + self.dv1.cross(&self.dtheta2))
    }
}

/// `q ← exp(−ω_ie T/2) ∘ q ∘ exp(φ/2)`, renormalized.
pub fn two_sample_attitude(
    q: &Quaternion,
    step: &TwoSampleStep,
    model: &EarthModel,
) -> Result<Quaternion> {
    q.ensure_unit(UNIT_TOLERANCE)?;
    let body = Quaternion::from_rotation_vector(&step.rotation_vector());
    let earth = Quaternion::from_rotation_vector(&(-model.omega_ie_e() * step.duration));
    Ok((earth * *q * body).normalize())
}

/// Velocity and position update using the attitude at the start of the
/// step; the attitude in the returned state is left unchanged.
pub fn two_sample_velocity_position(
    s: &NavState,
    step: &TwoSampleStep,
    model: &EarthModel,
) -> Result<NavState> {
    let t = step.duration;
    let w = model.omega_ie_e();
    let c_dv = s.q_eb.rotate_vector(&(step.dv1 + step.dv2));
    // the e-frame turns under the body during the step
    let dv_sf = s.q_eb.rotate_vector(&step.velocity_increment()) - 0.5 * (w * t).cross(&c_dv);

    let accel =
        |v: &Vec3, r: &Vec3| -> Result<Vec3> { Ok(model.local_gravity_e(r)? - 2.0 * w.cross(v)) };
    let v_pred = s.v_e + dv_sf + accel(&s.v_e, &s.r_e)? * t;
    let v_mid = 0.5 * (s.v_e + v_pred);
    let r_mid = s.r_e + 0.25 * t * (s.v_e + v_mid);
    let v = s.v_e + dv_sf + accel(&v_mid, &r_mid)? * t;
    let r = s.r_e + 0.5 * t * (s.v_e + v);
    Ok(NavState::new(s.q_eb, v, r))
}

/// Full update: velocity and position first (they use the old attitude),
/// then attitude.
pub fn two_sample_step(s: &NavState, step: &TwoSampleStep, model: &EarthModel) -> Result<NavState> {
    let mut next = two_sample_velocity_position(s, step, model)?;
    next.q_eb = two_sample_attitude(&s.q_eb, step, model)?;
    Ok(next)
}

/// Runs the algorithm over an increment record, pairing samples. Returns
/// the start state followed by the state after every pair.
pub fn run_two_sample(
    samples: &[ImuSample],
    s0: &NavState,
    t0: f64,
    model: &EarthModel,
) -> Result<Vec<(f64, NavState)>> {
    let mut out = Vec::with_capacity(samples.len() / 2 + 1);
    out.push((t0, *s0));
    let mut s = *s0;
    let mut t = t0;
    for pair in samples.chunks_exact(2) {
        let step = TwoSampleStep::new(
            pair[0].gyro,
            pair[1].gyro,
            pair[0].accel,
            pair[1].accel,
            pair[1].t - t,
        )?;
        s = two_sample_step(&s, &step, model)?;
        t = pair[1].t;
        out.push((t, s));
    }
    Ok(out)
}
