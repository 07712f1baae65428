//! Chebyshev functional-iterative integration of the trident equation.
//!
//! Each window of `N` IMU samples is mapped onto `τ ∈ [−1, 1]`. The body
//! twist is fitted once; the earth twist depends on the position and
//! velocity of the current iterate and is rebuilt before every Picard step
//! `q̃_{l+1} = q̃(0) + (t_N/4) ∫_{−1}^{τ} (q̃_l∘ω̃_ib^b − ω̃_ie,l^e∘q̃_l) dτ`.

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::algebra::{Quaternion, TridentQuaternion, Vec3};
use crate::chebyshev::{
    cheb_definite_integral, cheb_derivative, cheb_fit_nodes, cheb_integrate, cheb_product,
    cheb_truncate, chebyshev_gauss_nodes, chebyshev_t, ChebSeries, TridentChebSeries,
};
use crate::earth::EarthModel;
use crate::error::{Error, Result};
use crate::kinematics::{
    embed_state, recover_state, restore_unit_structure, NavState, TwistVariant,
};

/// Whether IMU samples are instantaneous rates or integrated increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImuMode {
    Rates,
    #[default]
    Increments,
}

/// One gyro/accelerometer record stamped with its end time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub gyro: Vec3,
    pub accel: Vec3,
}

impl ImuSample {
    pub fn new(t: f64, gyro: Vec3, accel: Vec3) -> Self {
        Self { t, gyro, accel }
    }
}

/// `N` consecutive samples. `times` are relative to the window start and
/// the last one is the window length `t_N`; increment `k` covers
/// `[times[k−1], times[k]]` with an implicit leading zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuWindow {
    pub t_start: f64,
    pub times: Vec<f64>,
    pub mode: ImuMode,
    pub gyro: Vec<Vec3>,
    pub accel: Vec<Vec3>,
}

impl ImuWindow {
    pub fn new(
        t_start: f64,
        times: Vec<f64>,
        mode: ImuMode,
        gyro: Vec<Vec3>,
        accel: Vec<Vec3>,
    ) -> Result<Self> {
        let n = times.len();
        if n < 2 || gyro.len() != n || accel.len() != n {
            return Err(Error::InvalidConfig(format!(
                "a window needs at least two samples with matching gyro and accel data, got {n}"
            )));
        }
        let mut prev = 0.0;
        for &t in &times {
            if !(t > prev) || !t.is_finite() {
                return Err(Error::SingularFit(format!(
                    "sample times must increase strictly, found {t} after {prev}"
                )));
            }
            prev = t;
        }
        Ok(Self {
            t_start,
            times,
            mode,
            gyro,
            accel,
        })
    }

    /// Window from absolute-time samples starting at `t_start`.
    pub fn from_samples(t_start: f64, samples: &[ImuSample], mode: ImuMode) -> Result<Self> {
        Self::new(
            t_start,
            samples.iter().map(|s| s.t - t_start).collect(),
            mode,
            samples.iter().map(|s| s.gyro).collect(),
            samples.iter().map(|s| s.accel).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_n(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.t_n()
    }
}

/// Splits a record into consecutive windows of `n` samples; a trailing
/// partial window is dropped.
pub fn split_windows(
    samples: &[ImuSample],
    n: usize,
    t0: f64,
    mode: ImuMode,
) -> Result<Vec<ImuWindow>> {
    let mut start = t0;
    samples
        .chunks_exact(n.max(1))
        .map(|chunk| {
            let w = ImuWindow::from_samples(start, chunk, mode)?;
            start = chunk[chunk.len() - 1].t;
            Ok(w)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Samples per window `N`.
    pub window_samples: usize,
    /// Degree of the body-twist fit.
    pub n_ob: usize,
    /// Degree of the gravitation fit.
    pub n_oe: usize,
    /// Truncation degree of the solution series.
    pub m_q: usize,
    pub max_iters: usize,
    pub rms_tol: f64,
    /// Chebyshev–Gauss nodes used to sample gravitation (`P`).
    pub gravity_nodes: usize,
    pub variant: TwistVariant,
    pub mode: ImuMode,
    pub seed: SeedPolicy,
}

/// Initial Picard iterate of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPolicy {
    /// The constant series `q̃(0)`.
    #[default]
    Constant,
    /// `q̃(0)` carried along the fitted body rotation: one Picard pass with
    /// the real part of the body twist only.
    BodyRotation,
    /// The previous window's solution continued into this window, falling
    /// back to [`SeedPolicy::BodyRotation`] on the first window.
    Extrapolate,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl SolverConfig {
    /// `N = 8`, fit degrees `N − 1`, truncation and iteration budget `N + 1`.
    pub fn reference() -> Self {
        Self {
            window_samples: 8,
            n_ob: 7,
            n_oe: 7,
            m_q: 9,
            max_iters: 9,
            rms_tol: 1e-16,
            gravity_nodes: 10,
            variant: TwistVariant::BodySide,
            mode: ImuMode::Increments,
            seed: SeedPolicy::Extrapolate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.window_samples;
        if n < 2 {
            return Err(Error::InvalidConfig(
                "windows need at least two samples".into(),
            ));
        }
        if self.n_ob > n - 1 {
            return Err(Error::DegreeTooHigh {
                degree: self.n_ob,
                samples: n,
            });
        }
        if self.n_oe > n - 1 {
            return Err(Error::DegreeTooHigh {
                degree: self.n_oe,
                samples: n,
            });
        }
        if self.m_q < self.n_ob.max(self.n_oe) {
            return Err(Error::InvalidConfig(format!(
                "truncation degree {} is below the fit degrees",
                self.m_q
            )));
        }
        if self.gravity_nodes < self.n_oe + 1 {
            return Err(Error::InsufficientNodes {
                nodes: self.gravity_nodes,
                degree: self.n_oe,
            });
        }
        if !(self.rms_tol > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidConfig(
                "rms_tol must be positive and max_iters at least one".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Coefficient RMS change of the last Picard step.
    pub rms_change: f64,
    pub converged: bool,
    pub series: TridentChebSeries,
    /// Body and earth twists that produced the final iterate.
    pub body: TridentChebSeries,
    pub earth: TridentChebSeries,
    /// RMS misfit of the body-twist fit to the samples.
    pub fit_residual: f64,
}

/// Fitted body twist `ω + ε₁f` and its RMS sample misfit.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistFit {
    pub series: TridentChebSeries,
    pub residual: f64,
}

/// Least-squares Chebyshev fit of the window's gyro and accelerometer data.
///
/// Rates are matched at `τ_k`; increments are matched against
/// `(t_N/2) Σ c_i ∫_{τ_{k−1}}^{τ_k} F_i dτ`.
pub fn fit_body_twist(w: &ImuWindow, cfg: &SolverConfig) -> Result<TwistFit> {
    let n = w.len();
    let deg = cfg.n_ob;
    if deg > n - 1 {
        return Err(Error::DegreeTooHigh {
            degree: deg,
            samples: n,
        });
    }
    let t_n = w.t_n();
    let tau = |t: f64| (2.0 * t / t_n - 1.0).clamp(-1.0, 1.0);
    let mut a = DMatrix::<f64>::zeros(n, deg + 1);
    for k in 0..n {
        let tk = tau(w.times[k]);
        let tk0 = if k == 0 { -1.0 } else { tau(w.times[k - 1]) };
        for i in 0..=deg {
            a[(k, i)] = match w.mode {
                ImuMode::Rates => chebyshev_t(i, tk),
                ImuMode::Increments => 0.5 * t_n * cheb_definite_integral(i, tk0, tk)?,
            };
        }
    }
    let mut y = DMatrix::<f64>::zeros(n, 6);
    for k in 0..n {
        for j in 0..3 {
            y[(k, j)] = w.gyro[k][j];
            y[(k, j + 3)] = w.accel[k][j];
        }
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-13 * smax) {
        return Err(Error::SingularFit(format!(
            "design matrix is rank deficient (singular values {smin:e} .. {smax:e})"
        )));
    }
    let c = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::SingularFit(e.to_string()))?;
    let misfit = &a * &c - &y;
    let residual = (misfit.norm_squared() / misfit.len() as f64).sqrt();
    let coeffs = (0..=deg)
        .map(|i| {
            TridentQuaternion::new(
                Quaternion::vector(Vec3::new(c[(i, 0)], c[(i, 1)], c[(i, 2)])),
                Quaternion::vector(Vec3::new(c[(i, 3)], c[(i, 4)], c[(i, 5)])),
                Quaternion::zero(),
            )
        })
        .collect();
    Ok(TwistFit {
        series: ChebSeries::new(coeffs),
        residual,
    })
}

fn part(
    s: &TridentChebSeries,
    f: impl Fn(&TridentQuaternion) -> Quaternion,
) -> ChebSeries<Quaternion> {
    s.map(f)
}

/// Series of `2 q′∘q*` (the total velocity `C_i^e ṙ^i`) truncated to `m`.
fn total_velocity_series(current: &TridentChebSeries, m: usize) -> ChebSeries<Quaternion> {
    let q1 = part(current, |c| c.q1);
    let qc = part(current, |c| c.q.conjugate());
    cheb_truncate(&cheb_product(&q1, &qc), m).scale(2.0)
}

/// Series of `2 q*∘q′` (the total velocity in body axes) truncated to `m`.
fn body_velocity_series(current: &TridentChebSeries, m: usize) -> ChebSeries<Quaternion> {
    let q1 = part(current, |c| c.q1);
    let qc = part(current, |c| c.q.conjugate());
    cheb_truncate(&cheb_product(&qc, &q1), m).scale(2.0)
}

/// Earth twist `ω_ie − ε₁g^e + ε₂x₂` along the current iterate.
///
/// Gravitation is sampled at `P` Chebyshev–Gauss nodes at the positions the
/// iterate implies and projected onto degree `n_oe`. For the body-side
/// variant `x₂ = −2q′∘q*` is expanded as a product series.
pub fn earth_twist_coeffs(
    current: &TridentChebSeries,
    model: &EarthModel,
    cfg: &SolverConfig,
) -> Result<TridentChebSeries> {
    let nodes = chebyshev_gauss_nodes(cfg.gravity_nodes);
    let mut g = Vec::with_capacity(nodes.len());
    for &tau in &nodes {
        let t = current.eval_unchecked(tau);
        let r = (t.q2 * t.q.inverse() * 2.0).v;
        g.push(Quaternion::vector(-model.gravitation_e(&r)?));
    }
    let g = cheb_fit_nodes(&g, cfg.n_oe)?;
    let x2 = match cfg.variant {
        TwistVariant::BodySide => total_velocity_series(current, cfg.m_q).scale(-1.0),
        TwistVariant::EarthSide => ChebSeries::constant(Quaternion::zero()),
    };
    let len = g.coeffs().len().max(x2.coeffs().len());
    let w = Quaternion::vector(model.omega_ie_e());
    let coeffs = (0..len)
        .map(|i| {
            TridentQuaternion::new(
                if i == 0 { w } else { Quaternion::zero() },
                g.coeffs().get(i).copied().unwrap_or_default(),
                x2.coeffs().get(i).copied().unwrap_or_default(),
            )
        })
        .collect();
    Ok(ChebSeries::new(coeffs))
}

/// Body twist for the current iterate: the fitted `ω + ε₁f` plus, for the
/// earth-side variant, `ε₂ 2q*∘q′`.
pub fn body_twist_coeffs(
    fit: &TridentChebSeries,
    current: &TridentChebSeries,
    cfg: &SolverConfig,
) -> TridentChebSeries {
    match cfg.variant {
        TwistVariant::BodySide => fit.clone(),
        TwistVariant::EarthSide => {
            let x1 = body_velocity_series(current, cfg.m_q);
            let len = fit.coeffs().len().max(x1.coeffs().len());
            ChebSeries::new(
                (0..len)
                    .map(|i| {
                        let mut c = fit.coeffs().get(i).copied().unwrap_or_default();
                        c.q2 = x1.coeffs().get(i).copied().unwrap_or_default();
                        c
                    })
                    .collect(),
            )
        }
    }
}

/// One Picard step truncated to degree `m_q`. The constant coefficient is
/// set last so the result equals `q0` at `τ = −1`.
pub fn picard_step(
    current: &TridentChebSeries,
    body: &TridentChebSeries,
    earth: &TridentChebSeries,
    q0: &TridentQuaternion,
    t_n: f64,
    m_q: usize,
) -> TridentChebSeries {
    let integrand = &cheb_product(current, body) - &cheb_product(earth, current);
    let integral = cheb_integrate(&integrand).scale(0.25 * t_n);
    let mut coeffs = cheb_truncate(&integral, m_q).into_coeffs();
    anchor(&mut coeffs, q0);
    ChebSeries::new(coeffs)
}

/// Sets the constant coefficient so the series equals `q0` at `τ = −1`.
fn anchor(coeffs: &mut [TridentQuaternion], q0: &TridentQuaternion) {
    let mut at_minus_one = TridentQuaternion::zero();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        at_minus_one = if k % 2 == 0 {
            at_minus_one + *c
        } else {
            at_minus_one - *c
        };
    }
    coeffs[0] = *q0 - at_minus_one;
}

/// Converged series of the window just solved, used for warm starts.
#[derive(Debug, Clone, PartialEq)]
pub struct PreviousWindow {
    pub series: TridentChebSeries,
    pub t_n: f64,
}

/// Starting series for the Picard loop.
pub fn initial_iterate(
    q0: &TridentQuaternion,
    fit: &TridentChebSeries,
    t_n: f64,
    previous: Option<&PreviousWindow>,
    cfg: &SolverConfig,
) -> TridentChebSeries {
    let constant = ChebSeries::constant(*q0);
    match (cfg.seed, previous) {
        (SeedPolicy::Constant, _) => constant,
        (SeedPolicy::Extrapolate, Some(prev)) => {
            // prev covers [−t_prev, 0] relative to this window's start
            let nodes = chebyshev_gauss_nodes(cfg.m_q + 1);
            let values: Vec<TridentQuaternion> = nodes
                .iter()
                .map(|tau| {
                    let t = 0.5 * t_n * (1.0 + tau);
                    prev.series.eval_unchecked(1.0 + 2.0 * t / prev.t_n)
                })
                .collect();
            let mut coeffs = cheb_fit_nodes(&values, cfg.m_q)
                .expect("m_q + 1 nodes fit degree m_q")
                .into_coeffs();
            anchor(&mut coeffs, q0);
            ChebSeries::new(coeffs)
        }
        (SeedPolicy::BodyRotation | SeedPolicy::Extrapolate, _) => {
            let w =
                fit.map(|c| TridentQuaternion::new(c.q, Quaternion::zero(), Quaternion::zero()));
            let none = ChebSeries::constant(TridentQuaternion::zero());
            picard_step(&constant, &w, &none, q0, t_n, cfg.m_q)
        }
    }
}

/// Integrates one window from `s0`. A window that exhausts `max_iters`
/// still returns its last iterate with `converged = false`.
pub fn solve_window(
    w: &ImuWindow,
    s0: &NavState,
    model: &EarthModel,
    cfg: &SolverConfig,
) -> Result<(NavState, SolveReport)> {
    solve_window_from(w, s0, None, model, cfg)
}

/// [`solve_window`] with the previous window's solution available for
/// [`SeedPolicy::Extrapolate`].
pub fn solve_window_from(
    w: &ImuWindow,
    s0: &NavState,
    previous: Option<&PreviousWindow>,
    model: &EarthModel,
    cfg: &SolverConfig,
) -> Result<(NavState, SolveReport)> {
    cfg.validate()?;
    let fit = fit_body_twist(w, cfg)?;
    let t_n = w.t_n();
    let q0 = embed_state(s0, model)?;
    let mut current = initial_iterate(&q0, &fit.series, t_n, previous, cfg);
    let mut body = body_twist_coeffs(&fit.series, &current, cfg);
    let mut earth = earth_twist_coeffs(&current, model, cfg)?;
    let mut rms_change = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        body = body_twist_coeffs(&fit.series, &current, cfg);
        earth = earth_twist_coeffs(&current, model, cfg)?;
        let next = picard_step(&current, &body, &earth, &q0, t_n, cfg.m_q);
        rms_change = next.rms_difference(&current);
        current = next;
        iterations += 1;
        if !current.is_finite() {
            return Err(Error::ConvergenceFailure { iterations });
        }
        if rms_change < cfg.rms_tol {
            converged = true;
            break;
        }
    }
    // an unconverged iterate is only approximately unit; project it so the
    // window still yields a state and the caller sees the flag
    let end = if converged {
        current.end_value()
    } else {
        restore_unit_structure(&current.end_value())
    };
    let state = recover_state(&end, model)?;
    Ok((
        state,
        SolveReport {
            iterations,
            rms_change,
            converged,
            series: current,
            body,
            earth,
            fit_residual: fit.residual,
        },
    ))
}

/// Per-window bookkeeping of a trajectory run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub t_end: f64,
    pub iterations: usize,
    pub rms_change: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySolution {
    /// State at the start time followed by the state at every window end.
    pub states: Vec<(f64, NavState)>,
    pub windows: Vec<WindowStats>,
}

impl TrajectorySolution {
    pub fn all_converged(&self) -> bool {
        self.windows.iter().all(|w| w.converged)
    }
}

/// Chains [`solve_window`] over contiguous windows, re-embedding the
/// recovered state at every boundary.
pub fn solve_trajectory(
    windows: &[ImuWindow],
    s0: &NavState,
    t0: f64,
    model: &EarthModel,
    cfg: &SolverConfig,
) -> Result<TrajectorySolution> {
    let mut states = Vec::with_capacity(windows.len() + 1);
    let mut stats = Vec::with_capacity(windows.len());
    states.push((t0, *s0));
    let mut s = *s0;
    let mut t = t0;
    let mut previous: Option<PreviousWindow> = None;
    for w in windows {
        if (w.t_start - t).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "window starting at {} does not follow {t}",
                w.t_start
            )));
        }
        let (next, report) = solve_window_from(w, &s, previous.as_ref(), model, cfg)?;
        t = w.t_end();
        s = next;
        states.push((t, s));
        stats.push(WindowStats {
            t_end: t,
            iterations: report.iterations,
            rms_change: report.rms_change,
            converged: report.converged,
        });
        previous = Some(PreviousWindow {
            series: report.series,
            t_n: w.t_n(),
        });
    }
    Ok(TrajectorySolution {
        states,
        windows: stats,
    })
}

/// Residual of `2q̃̇ = q̃∘ω̃_ib^b − ω̃_ie^e∘q̃` for a solved window, with the
/// time derivative taken from the differentiated series. Returns the
/// largest absolute and the largest relative component-norm residual over
/// `points` interior nodes.
pub fn ode_residual(report: &SolveReport, t_n: f64, points: usize) -> (f64, f64) {
    let d = cheb_derivative(&report.series);
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for j in 1..=points {
        let tau = -1.0 + 2.0 * j as f64 / (points + 1) as f64;
        let q = report.series.eval_unchecked(tau);
        let lhs = d.eval_unchecked(tau) * (4.0 / t_n);
        let rhs = q * report.body.eval_unchecked(tau) - report.earth.eval_unchecked(tau) * q;
        let res = (lhs - rhs).coefficient_norm();
        worst_abs = worst_abs.max(res);
        worst_rel = worst_rel.max(res / rhs.coefficient_norm().max(1.0));
    }
    (worst_abs, worst_rel)
}
