use crate::algebra::{DualQuaternion, Quaternion, TridentQuaternion, Vec3};
use crate::error::{Error, Result};

use super::{restore_unit_structure, NavState};

/// A state the RK4 oracle can integrate. Rates share the state's type.
pub trait OdeState: Clone {
    /// `self + k·rate`.
    fn axpy(&self, k: f64, rate: &Self) -> Self;

    /// `self − other`, component-wise.
    fn difference(&self, other: &Self) -> Self;

    fn scaled(&self, k: f64) -> Self;

    /// Projection back onto the valid manifold after each step.
    fn renormalize(&self) -> Self;
}

impl OdeState for NavState {
    fn axpy(&self, k: f64, d: &Self) -> Self {
        NavState::new(
            self.q_eb + d.q_eb * k,
            self.v_e + d.v_e * k,
            self.r_e + d.r_e * k,
        )
    }

    fn difference(&self, o: &Self) -> Self {
        NavState::new(self.q_eb - o.q_eb, self.v_e - o.v_e, self.r_e - o.r_e)
    }

    fn scaled(&self, k: f64) -> Self {
        NavState::new(self.q_eb * k, self.v_e * k, self.r_e * k)
    }

    fn renormalize(&self) -> Self {
        NavState {
            q_eb: self.q_eb.normalize(),
            ..*self
        }
    }
}

impl OdeState for TridentQuaternion {
    fn axpy(&self, k: f64, d: &Self) -> Self {
        *self + *d * k
    }

    fn difference(&self, o: &Self) -> Self {
        *self - *o
    }

    fn scaled(&self, k: f64) -> Self {
        *self * k
    }

    fn renormalize(&self) -> Self {
        restore_unit_structure(self)
    }
}

/// Dual quaternion for attitude and velocity plus the position vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqvState {
    pub dq: DualQuaternion,
    pub r_e: Vec3,
}

impl OdeState for DqvState {
    fn axpy(&self, k: f64, d: &Self) -> Self {
        DqvState {
            dq: self.dq + d.dq * k,
            r_e: self.r_e + d.r_e * k,
        }
    }

    fn difference(&self, o: &Self) -> Self {
        DqvState {
            dq: self.dq - o.dq,
            r_e: self.r_e - o.r_e,
        }
    }

    fn scaled(&self, k: f64) -> Self {
        DqvState {
            dq: self.dq * k,
            r_e: self.r_e * k,
        }
    }

    fn renormalize(&self) -> Self {
        let q = self.dq.real.normalize();
        let a = (self.dq.dual * self.dq.real.inverse()).v;
        DqvState {
            dq: DualQuaternion::new(q, Quaternion::vector(a) * q),
            r_e: self.r_e,
        }
    }
}

/// Classical fourth-order Runge–Kutta from `t0` to `t1` with a fixed step,
/// renormalizing after every step. `step` must divide the span.
///
/// Step increments are added with Kahan compensation: positions near the
/// earth radius would otherwise lose about one ulp (1e-9 m) per step.
pub fn rk4_propagate<S, F>(mut rhs: F, s0: S, t0: f64, t1: f64, step: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let span = t1 - t0;
    if !(step > 0.0) || !span.is_finite() || span < 0.0 {
        return Err(Error::InvalidStep(format!("step {step} over [{t0}, {t1}]")));
    }
    let n = (span / step).round();
    if (n * step - span).abs() > 1e-9 * span.abs().max(step) {
        return Err(Error::InvalidStep(format!(
            "step {step} does not divide the span {span}"
        )));
    }
    let n = n as usize;
    let h = if n == 0 { 0.0 } else { span / n as f64 };
    let mut s = s0;
    let mut carry: Option<S> = None;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = rhs(t, &s)?;
        let k2 = rhs(t + 0.5 * h, &s.axpy(0.5 * h, &k1))?;
        let k3 = rhs(t + 0.5 * h, &s.axpy(0.5 * h, &k2))?;
        let k4 = rhs(t + h, &s.axpy(h, &k3))?;
        let inc = k1
            .axpy(2.0, &k2)
            .axpy(2.0, &k3)
            .axpy(1.0, &k4)
            .scaled(h / 6.0);
        let y = match &carry {
            Some(c) => inc.difference(c),
            None => inc,
        };
        let next = s.axpy(1.0, &y);
        carry = Some(next.difference(&s).difference(&y));
        s = next.renormalize();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_error(step: f64) -> f64 {
        let w = 0.8;
        let s0 = NavState::new(Quaternion::identity(), Vec3::zeros(), Vec3::zeros());
        let s = rk4_propagate(
            |_, s: &NavState| {
                let q_dot = s.q_eb * Quaternion::vector(Vec3::new(0.0, 0.0, w)) * 0.5;
                Ok(NavState::new(q_dot, Vec3::zeros(), Vec3::zeros()))
            },
            s0,
            0.0,
            2.0,
            step,
        )
        .unwrap();
        let truth = Quaternion::from_axis_angle(&Vec3::z(), w * 2.0);
        (s.q_eb * truth.conjugate()).v.norm() * 2.0
    }

    #[test]
    fn zero_dynamics_leave_state_unchanged() {
        let s0 = NavState::new(
            Quaternion::new(0.6, 0.0, 0.8, 0.0),
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(7e6, 0.0, 1.0),
        );
        let zero = NavState::new(Quaternion::zero(), Vec3::zeros(), Vec3::zeros());
        let s = rk4_propagate(|_, _: &NavState| Ok(zero), s0, 0.0, 1.0, 0.1).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn constant_rate_rotation() {
        // local error of RK4 on q̇ = ½qω is (ωh/2)⁵/120 per step
        let bound = |h: f64| 2.0 * (2.0 / h) * (0.4 * h).powi(5) / 120.0 * 2.0;
        for h in [0.1, 0.02, 0.01] {
            let e = rotation_error(h);
            assert!(e < bound(h), "step {h}: {e} vs {}", bound(h));
        }
    }

    #[test]
    fn fourth_order_convergence() {
        // time-varying rate keeps the truncation error away from rounding
        let run = |step: f64| {
            rk4_propagate(
                |t, s: &NavState| {
                    Ok(NavState::new(
                        Quaternion::zero(),
                        Vec3::zeros(),
                        Vec3::new(t.cos(), 0.0, 0.0) + s.r_e * 0.3,
                    ))
                },
                NavState::new(Quaternion::identity(), Vec3::zeros(), Vec3::zeros()),
                0.0,
                2.0,
                step,
            )
            .unwrap()
            .r_e
            .x
        };
        let exact = {
            // solution of x' = cos t + 0.3x, x(0) = 0
            let t: f64 = 2.0;
            let k = 0.3;
            (t.sin() - k * t.cos() + k * (k * t).exp()) / (1.0 + k * k)
        };
        let e1 = (run(0.1) - exact).abs();
        let e2 = (run(0.05) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn step_must_divide_span() {
        let s0 = NavState::new(Quaternion::identity(), Vec3::zeros(), Vec3::zeros());
        let r = rk4_propagate(|_, s: &NavState| Ok(*s), s0, 0.0, 1.0, 0.3);
        assert!(matches!(r, Err(Error::InvalidStep(_))));
        let r = rk4_propagate(|_, s: &NavState| Ok(*s), s0, 0.0, 1.0, 0.0);
        assert!(matches!(r, Err(Error::InvalidStep(_))));
    }
}
