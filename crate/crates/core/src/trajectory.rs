//! Analytic coning-flight scenario: truth states and exact IMU synthesis.
//!
//! The vehicle flies east with ground speed `v₀ − (a cos ωt − a)/ω` while the
//! body performs classical coning `q_nb = [cos(α/2), sin(α/2)(0, cos ζt,
//! sin ζt)]` relative to the (north, up, east) local-level frame.

use serde::{Deserialize, Serialize};

use crate::algebra::{Quaternion, Vec3};
use crate::earth::{c_en, EarthModel, GeodeticPosition};
use crate::error::{Error, Result};
use crate::kinematics::NavState;
use crate::tqfilter::{ImuMode, ImuSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// Initial east velocity, m/s.
    pub v0: f64,
    /// Amplitude of the east acceleration `a sin ωt`, m/s².
    pub accel: f64,
    /// Angular frequency of the acceleration, rad/s.
    pub omega: f64,
    /// Coning half-angle, rad.
    pub alpha: f64,
    /// Coning frequency, rad/s.
    pub zeta: f64,
    /// Latitude, longitude (rad) and height (m) at `t = 0`.
    pub start: GeodeticPosition,
    pub duration: f64,
    pub imu_rate: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl ScenarioParams {
    /// 200 s of coning flight along the equator sampled at 100 Hz.
    pub fn reference() -> Self {
        Self {
            v0: 500.0,
            accel: 10.0,
            omega: 0.02 * std::f64::consts::PI,
            alpha: 10f64.to_radians(),
            zeta: 0.74 * std::f64::consts::PI,
            start: GeodeticPosition::default(),
            duration: 200.0,
            imu_rate: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.v0, self.accel, self.omega, self.alpha, self.zeta]
            .iter()
            .all(|x| x.is_finite());
        if !finite
            || !(self.imu_rate > 0.0)
            || !(self.duration >= 0.0)
            || !self.duration.is_finite()
        {
            return Err(Error::InvalidConfig(format!("invalid scenario {self:?}")));
        }
        if self.start.latitude.cos().abs() <= 1e-9 {
            return Err(Error::PolarSingularity {
                latitude: self.start.latitude,
            });
        }
        Ok(())
    }

    pub fn sample_interval(&self) -> f64 {
        1.0 / self.imu_rate
    }

    /// Number of whole IMU samples in the run.
    pub fn sample_count(&self) -> usize {
        (self.duration * self.imu_rate + 1e-9).floor() as usize
    }

    /// Time stamp of sample `k`, computed without accumulation.
    pub fn sample_time(&self, k: usize) -> f64 {
        k as f64 / self.imu_rate
    }

    fn east_speed(&self, t: f64) -> f64 {
        if self.omega == 0.0 {
            return self.v0;
        }
        // a(1 − cos ωt)/ω without cancellation at small ωt
        let h = (0.5 * self.omega * t).sin();
        self.v0 + 2.0 * self.accel * h * h / self.omega
    }

    fn east_distance(&self, t: f64) -> f64 {
        if self.omega == 0.0 {
            return self.v0 * t;
        }
        let w = self.omega;
        self.v0 * t - (self.accel * (w * t).sin() - self.accel * w * t) / (w * w)
    }
}

/// `q_nb(t)`.
pub fn truth_attitude(t: f64, p: &ScenarioParams) -> Quaternion {
    let (sa, ca) = (0.5 * p.alpha).sin_cos();
    let (sz, cz) = (p.zeta * t).sin_cos();
    Quaternion::new(ca, 0.0, sa * cz, sa * sz)
}

/// `q̇_nb(t)`.
pub fn truth_attitude_rate(t: f64, p: &ScenarioParams) -> Quaternion {
    let sa = (0.5 * p.alpha).sin();
    let (sz, cz) = (p.zeta * t).sin_cos();
    Quaternion::new(0.0, 0.0, -sa * p.zeta * sz, sa * p.zeta * cz)
}

/// Ground velocity `v^n` (north, up, east) and geodetic position.
pub fn truth_vel_pos(t: f64, p: &ScenarioParams, model: &EarthModel) -> (Vec3, GeodeticPosition) {
    let v_n = Vec3::new(0.0, 0.0, p.east_speed(t));
    let (re, _) = model.radii(p.start.latitude);
    let arc = (re + p.start.height) * p.start.latitude.cos();
    let pos = GeodeticPosition::new(
        p.start.latitude,
        p.start.longitude + p.east_distance(t) / arc,
        p.start.height,
    );
    (v_n, pos)
}

/// `v̇^n`.
pub fn truth_accel_n(t: f64, p: &ScenarioParams) -> Vec3 {
    Vec3::new(0.0, 0.0, p.accel * (p.omega * t).sin())
}

/// Gyro and accelerometer outputs at time `t`:
/// `ω_ib^b = q_nb*∘(2q̇_nb + ω_in^n∘q_nb)`,
/// `f^b = C_n^b(v̇^n + (2ω_ie^n + ω_en^n)×v^n − g^n)`.
pub fn imu_rates(t: f64, p: &ScenarioParams, model: &EarthModel) -> Result<(Vec3, Vec3)> {
    let q = truth_attitude(t, p);
    let q_dot = truth_attitude_rate(t, p);
    let (v_n, pos) = truth_vel_pos(t, p, model);
    let w_ie = model.omega_ie_n(pos.latitude);
    let w_en = model.transport_rate(&pos, &v_n)?;
    let w_in = w_ie + w_en;
    let gyro = (q.conjugate() * (q_dot * 2.0 + Quaternion::vector(w_in) * q)).v;
    let f_n = truth_accel_n(t, p) + (2.0 * w_ie + w_en).cross(&v_n) - model.local_gravity_n(&pos);
    Ok((gyro, q.inverse_rotate_vector(&f_n)))
}

/// Truth state in the earth frame: `q_eb = q_en∘q_nb`.
pub fn truth_to_eframe(t: f64, p: &ScenarioParams, model: &EarthModel) -> NavState {
    let (v_n, pos) = truth_vel_pos(t, p, model);
    let q_en = c_en(&pos);
    NavState::new(
        q_en * truth_attitude(t, p),
        q_en.rotate_vector(&v_n),
        model.geodetic_to_ecef(&pos),
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const QUADRATURE_POINTS: usize = 12;

/// Synthesizes the whole IMU record. Sample `k ≥ 1` is stamped `t_k` and
/// holds either the rates at `t_k` or their integrals over `[t_{k−1}, t_k]`.
pub fn synthesize_imu(
    p: &ScenarioParams,
    model: &EarthModel,
    mode: ImuMode,
) -> Result<Vec<ImuSample>> {
    p.validate()?;
    let (nodes, weights) = gauss_legendre(QUADRATURE_POINTS);
    (1..=p.sample_count())
        .map(|k| {
            let t1 = p.sample_time(k);
            match mode {
                ImuMode::Rates => {
                    let (g, f) = imu_rates(t1, p, model)?;
                    Ok(ImuSample::new(t1, g, f))
                }
                ImuMode::Increments => {
                    let t0 = p.sample_time(k - 1);
                    let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
                    let mut dth = Vec3::zeros();
                    let mut dv = Vec3::zeros();
                    for (x, w) in nodes.iter().zip(&weights) {
                        let (g, f) = imu_rates(mid + half * x, p, model)?;
                        dth += g * (w * half);
                        dv += f * (w * half);
                    }
                    Ok(ImuSample::new(t1, dth, dv))
                }
            }
        })
        .collect()
}
