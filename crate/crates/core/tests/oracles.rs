mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trinav::algebra::{DualQuaternion, Quaternion, TridentQuaternion, Vec3};
use trinav::earth::EarthModel;
use trinav::harness::principal_angle_error;
use trinav::kinematics::{
    dqv_rhs, embed_state, make_twists, recover_state, rk4_propagate, traditional_rhs, triq_rhs,
    triq_rhs_from_state, DqvState, NavState, TwistVariant,
};
use trinav::tqfilter::ImuMode;
use trinav::trajectory::{imu_rates, synthesize_imu, truth_to_eframe, ScenarioParams};

fn v(x: Vec3) -> Quaternion {
    Quaternion::vector(x)
}

#[test]
fn trident_derivative_matches_expanded_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = EarthModel::wgs84();
    for _ in 0..200 {
        let q = common::random_unit_quaternion(&mut rng);
        let a = common::random_vec(&mut rng, 800.0);
        let r = common::random_vec(&mut rng, 7.0e6);
        let w = common::random_vec(&mut rng, 3.0);
        let f = common::random_vec(&mut rng, 20.0);
        let g = common::random_vec(&mut rng, 10.0);
        let wie = model.omega_ie_e();
        let t = TridentQuaternion::new(q, v(a) * q * 0.5, v(r) * q * 0.5);
        let (body, earth) = make_twists(&w, &f, &g, &a, &q, TwistVariant::BodySide, &model);
        let d = triq_rhs(&t, &body, &earth) * 2.0;

        // three parts written out term by term
        let real = q * v(w) - v(wie) * q;
        let e1 = v(a) * q * v(w) * 0.5 + q * v(f) + v(g) * q - v(wie) * v(a) * q * 0.5;
        let e2 = v(r) * q * v(w) * 0.5 - v(wie) * v(r) * q * 0.5 + v(a) * q;
        assert!((d.q - real).norm() < 1e-14);
        assert!((d.q1 - e1).norm() < 1e-12 * e1.norm().max(1.0));
        assert!((d.q2 - e2).norm() < 1e-13 * e2.norm().max(1.0));
    }
}

#[test]
fn trident_pushforward_matches_traditional_rates() {
    let model = EarthModel::wgs84();
    let p = ScenarioParams::reference();
    for t in [0.0, 3.3, 71.9] {
        let s = truth_to_eframe(t, &p, &model);
        let (w, f) = imu_rates(t, &p, &model).unwrap();
        let e = embed_state(&s, &model).unwrap();
        let d = triq_rhs_from_state(&e, &w, &f, TwistVariant::BodySide, &model).unwrap();
        // at 1e-6 s the ulp of a 6.4e6 m position alone is 5e-4 m/s of
        // difference quotient, so a longer step keeps rounding out
        let h = 1e-4;
        let plus = recover_state(&(e + d * h), &model).unwrap();
        let minus = recover_state(&(e - d * h), &model).unwrap();
        let v_dot = (plus.v_e - minus.v_e) / (2.0 * h);
        let r_dot = (plus.r_e - minus.r_e) / (2.0 * h);
        let trad = traditional_rhs(&s, &w, &f, &model).unwrap();
        assert!(
            (v_dot - trad.v_e).norm() < 1e-6 * trad.v_e.norm(),
            "{v_dot} vs {}",
            trad.v_e
        );
        assert!(
            (r_dot - trad.r_e).norm() < 1e-6 * trad.r_e.norm(),
            "{r_dot} vs {}",
            trad.r_e
        );
    }
}

#[test]
fn synthesized_increments_integrate_the_rates() {
    let model = EarthModel::wgs84();
    let p = ScenarioParams {
        duration: 1.0,
        ..ScenarioParams::reference()
    };
    let inc = synthesize_imu(&p, &model, ImuMode::Increments).unwrap();
    assert_eq!(inc.len(), 100);
    for k in [0usize, 17, 99] {
        let (t0, t1) = (k as f64 / 100.0, (k + 1) as f64 / 100.0);
        assert!((inc[k].t - t1).abs() < 1e-15);
        for axis in 0..3 {
            let g = common::simpson(
                &|t| imu_rates(t, &p, &model).unwrap().0[axis],
                t0,
                t1,
                1e-17,
            );
            let f = common::simpson(
                &|t| imu_rates(t, &p, &model).unwrap().1[axis],
                t0,
                t1,
                1e-15,
            );
            assert!((inc[k].gyro[axis] - g).abs() < 1e-15, "gyro {k} {axis}");
            assert!((inc[k].accel[axis] - f).abs() < 1e-13, "accel {k} {axis}");
        }
    }
}

#[test]
fn rk4_on_analytic_rates_tracks_the_truth() {
    let model = EarthModel::wgs84();
    let p = ScenarioParams::reference();
    let mut s = truth_to_eframe(0.0, &p, &model);
    let (mut pos, mut att): (f64, f64) = (0.0, 0.0);
    for k in 0..200 {
        let (t0, t1) = (k as f64, (k + 1) as f64);
        s = rk4_propagate(
            |t, x: &NavState| {
                let (w, f) = imu_rates(t, &p, &model)?;
                traditional_rhs(x, &w, &f, &model)
            },
            s,
            t0,
            t1,
            1e-4,
        )
        .unwrap();
        let truth = truth_to_eframe(t1, &p, &model);
        pos = pos.max((s.r_e - truth.r_e).norm());
        att = att.max(principal_angle_error(&truth.q_eb, &s.q_eb).unwrap());
    }
    assert!(pos < 1e-8, "position {pos:e}");
    assert!(att < 1e-10, "attitude {att:e}");
}

#[test]
fn dual_quaternion_model_matches_trident_parts() {
    let model = EarthModel::wgs84();
    let p = ScenarioParams::reference();
    let s0 = truth_to_eframe(0.0, &p, &model);
    let e = embed_state(&s0, &model).unwrap();
    let tri = rk4_propagate(
        |t, x: &TridentQuaternion| {
            let (w, f) = imu_rates(t, &p, &model)?;
            triq_rhs_from_state(x, &w, &f, TwistVariant::BodySide, &model)
        },
        e,
        0.0,
        10.0,
        1e-3,
    )
    .unwrap();
    let dqv = rk4_propagate(
        |t, x: &DqvState| {
            let (w, f) = imu_rates(t, &p, &model)?;
            let (dq, r_e) = dqv_rhs(&x.dq, &x.r_e, &w, &f, &model)?;
            Ok(DqvState { dq, r_e })
        },
        DqvState {
            dq: DualQuaternion::new(e.q, e.q1),
            r_e: s0.r_e,
        },
        0.0,
        10.0,
        1e-3,
    )
    .unwrap();
    let dr = (dqv.dq.real - tri.q).norm();
    let dd = (dqv.dq.dual - tri.q1).norm() / tri.q1.norm();
    assert!(dr < 1e-12, "real {dr:e}");
    assert!(dd < 1e-12, "dual {dd:e}");
    // RK4 keeps the unit structure through renormalization
    assert!(tri.unit_defect() < 1e-12);
}
