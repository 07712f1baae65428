use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Quaternion, TridentQuaternion, Vec3};
use crate::chebyshev::{cheb_integrate, cheb_product, ChebSeries};
use crate::earth::EarthModel;
use crate::kinematics::TwistVariant;
use crate::tqfilter::{ode_residual, solve_window, split_windows, ImuMode, SolverConfig};
use crate::trajectory::{gauss_legendre, synthesize_imu, truth_to_eframe, ScenarioParams};

use super::principal_angle_error;

/// Outcome of one self-test.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst < tol,
        detail: format!("worst {worst:.3e}, limit {tol:e}"),
    }
}

fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

fn random_unit_trident(rng: &mut ChaCha8Rng) -> TridentQuaternion {
    let q = loop {
        let q = Quaternion::from_parts(rng.random_range(-1.0..1.0), random_vec(rng, 1.0));
        if q.norm() > 0.1 {
            break q.normalize();
        }
    };
    TridentQuaternion::new(
        q,
        Quaternion::vector(random_vec(rng, 10.0)) * q * 0.5,
        Quaternion::vector(random_vec(rng, 10.0)) * q * 0.5,
    )
}

fn group_axioms(rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let id = TridentQuaternion::identity();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (a, b, c) = (
            random_unit_trident(rng),
            random_unit_trident(rng),
            random_unit_trident(rng),
        );
        worst = worst
            .max((a * b).unit_defect())
            .max(((a * b) * c - a * (b * c)).coefficient_norm())
            .max((a * id - a).coefficient_norm())
            .max((a * a.conjugate() - id).coefficient_norm())
            .max((a.conjugate() * a - id).coefficient_norm());
    }
    worst
}

fn chebyshev_identities(rng: &mut ChaCha8Rng) -> f64 {
    let (nodes, weights) = gauss_legendre(24);
    let mut worst: f64 = 0.0;
    for deg in 0..=10 {
        let a = ChebSeries::new((0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect());
        let b = ChebSeries::new(
            (0..=10 - deg)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        );
        let p = cheb_product(&a, &b);
        let i = cheb_integrate(&a);
        for k in 0..=20 {
            let x = -1.0 + 0.1 * k as f64;
            worst =
                worst.max((p.eval_unchecked(x) - a.eval_unchecked(x) * b.eval_unchecked(x)).abs());
            let half = 0.5 * (x + 1.0);
            let quad: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(s, w)| w * half * a.eval_unchecked(-1.0 + half * (s + 1.0)))
                .sum();
            worst = worst.max((i.eval_unchecked(x) - quad).abs());
        }
    }
    worst
}

fn small_rotation_angle() -> f64 {
    let q = Quaternion::new(0.3, -0.5, 0.1, 0.8).normalize();
    let d = Quaternion::from_axis_angle(&Vec3::new(1.0, 2.0, -2.0).normalize(), 1e-6);
    (principal_angle_error(&q, &(q * d)).unwrap_or(f64::NAN) - 1e-6).abs()
}

/// Quick consistency checks of the algebra, the series arithmetic and one
/// solver window. Deterministic for a fixed seed.
pub fn selftest(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        check("trident group axioms", group_axioms(&mut rng, 200), 1e-12),
        check(
            "chebyshev product and integral",
            chebyshev_identities(&mut rng),
            1e-12,
        ),
        check(
            "principal angle of a 1 µrad rotation",
            small_rotation_angle(),
            1e-12,
        ),
    ];

    let model = EarthModel::wgs84();
    let p = ScenarioParams {
        duration: 0.08,
        ..ScenarioParams::reference()
    };
    let cfg = SolverConfig::reference();
    let s0 = truth_to_eframe(0.0, &p, &model);
    let window = synthesize_imu(&p, &model, ImuMode::Increments)
        .and_then(|imu| split_windows(&imu, cfg.window_samples, 0.0, ImuMode::Increments))
        .map(|mut w| w.remove(0));
    let solved = window.as_ref().map_err(|e| e.to_string()).and_then(|w| {
        let body = solve_window(w, &s0, &model, &cfg).map_err(|e| e.to_string())?;
        let earth_cfg = SolverConfig {
            variant: TwistVariant::EarthSide,
            ..cfg
        };
        let earth = solve_window(w, &s0, &model, &earth_cfg).map_err(|e| e.to_string())?;
        Ok((w.t_n(), body, earth))
    });
    match solved {
        Ok((t_n, (sb, rb), (se, _))) => {
            let (_, rel) = ode_residual(&rb, t_n, 50);
            let mut c = check("window residual (relative)", rel, 1e-13);
            c.passed &= rb.converged;
            out.push(c);
            let diff = (sb.r_e - se.r_e).norm() / sb.r_e.norm()
                + (sb.v_e - se.v_e).norm() / sb.v_e.norm()
                + (sb.q_eb - se.q_eb).norm();
            out.push(check("body-side and earth-side twists", diff, 1e-12));
        }
        Err(e) => out.push(Check {
            name: "solver window",
            passed: false,
            detail: e,
        }),
    }
    out
}
