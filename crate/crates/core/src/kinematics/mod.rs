//! Navigation state embeddings and the continuous-time models.
//!
//! Three equivalent mechanizations are provided: the unified trident
//! equation `2q̃̇ = q̃∘ω̃_ib^b − ω̃_ie^e∘q̃`, the dual-quaternion-plus-vector
//! hybrid, and the traditional earth-frame equations. Attitudes are stored
//! as `q_eb`, so `C_b^e x = q_eb ∘ x ∘ q_eb*`.

mod rk4;

use serde::{Deserialize, Serialize};

use crate::algebra::{DualQuaternion, Quaternion, TridentQuaternion, Vec3, UNIT_TOLERANCE};
use crate::earth::EarthModel;
use crate::error::{Error, Result};

pub use rk4::{rk4_propagate, DqvState, OdeState};

/// Attitude, velocity and position in the earth frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavState {
    pub q_eb: Quaternion,
    pub v_e: Vec3,
    pub r_e: Vec3,
}

impl NavState {
    pub fn new(q_eb: Quaternion, v_e: Vec3, r_e: Vec3) -> Self {
        Self { q_eb, v_e, r_e }
    }

    pub fn validate(&self) -> Result<()> {
        self.q_eb.ensure_unit(UNIT_TOLERANCE)?;
        if self
            .v_e
            .iter()
            .chain(self.r_e.iter())
            .all(|x| x.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "non-finite velocity or position".into(),
            ))
        }
    }

    /// `C_i^e ṙ^i = v^e + ω_ie^e × r^e`.
    pub fn total_velocity(&self, model: &EarthModel) -> Vec3 {
        self.v_e + model.omega_ie_e().cross(&self.r_e)
    }
}

/// A trident quaternion whose three parts are vector quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TridentTwist {
    pub real: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl TridentTwist {
    pub fn new(real: Vec3, e1: Vec3, e2: Vec3) -> Self {
        Self { real, e1, e2 }
    }

    pub fn to_trident(&self) -> TridentQuaternion {
        TridentQuaternion::new(
            Quaternion::vector(self.real),
            Quaternion::vector(self.e1),
            Quaternion::vector(self.e2),
        )
    }
}

/// Where the total-velocity term of the trident equation is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistVariant {
    /// `x₁ = 0`, `x₂ = −C_i^e ṙ^i`: the earth twist carries the term.
    #[default]
    BodySide,
    /// `x₁ = C_i^b ṙ^i`, `x₂ = 0`: the body twist carries the term.
    EarthSide,
}

/// `q + ε₁ ½(v + ω_ie×r)∘q + ε₂ ½ r∘q`.
pub fn embed_state(s: &NavState, model: &EarthModel) -> Result<TridentQuaternion> {
    s.validate()?;
    let q = s.q_eb;
    let a = s.total_velocity(model);
    Ok(TridentQuaternion::new(
        q,
        Quaternion::vector(a) * q * 0.5,
        Quaternion::vector(s.r_e) * q * 0.5,
    ))
}

/// Inverse of [`embed_state`]: `r = 2q″∘q⁻¹`, `v = 2q′∘q⁻¹ − ω_ie×r`.
///
/// The inverse equals `q*` on a unit real part and removes the first-order
/// scaling a slightly non-unit real part would otherwise put on `r` and `v`.
pub fn recover_state(t: &TridentQuaternion, model: &EarthModel) -> Result<NavState> {
    let norm = t.q.norm();
    if !t.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitTrident(format!("real part norm {norm}")));
    }
    let qi = t.q.inverse();
    let a = t.q1 * qi * 2.0;
    let r = t.q2 * qi * 2.0;
    for p in [a, r] {
        let residue = p.s.abs() / p.v.norm().max(1.0);
        if residue > UNIT_TOLERANCE {
            return Err(Error::ScalarResidueTooLarge { residue });
        }
    }
    Ok(NavState::new(
        t.q.normalize(),
        a.v - model.omega_ie_e().cross(&r.v),
        r.v,
    ))
}

/// Restores `‖q‖ = 1` and vector-valued `q′∘q*`, `q″∘q*` while keeping
/// the encoded velocity and position.
///
/// The dual parts are scaled with `q` and lose only their component along
/// `q` (the scalar of `x∘q*` is the 4-D dot product), so a state that is
/// already close to unit picks up almost no rounding.
pub fn restore_unit_structure(t: &TridentQuaternion) -> TridentQuaternion {
    let k = 1.0 / t.q.norm();
    let q = t.q * k;
    let project = |x: Quaternion| {
        let x = x * k;
        x - q * (x * q.conjugate()).s
    };
    TridentQuaternion::new(q, project(t.q1), project(t.q2))
}

/// Builds `(ω̃_ib^b, ω̃_ie^e)` from body rate, specific force, gravitation
/// and total velocity `C_i^e ṙ^i`. `q_eb` rotates the total velocity into
/// the body frame for [`TwistVariant::EarthSide`].
pub fn make_twists(
    omega_ib_b: &Vec3,
    f_b: &Vec3,
    g_e: &Vec3,
    total_vel_e: &Vec3,
    q_eb: &Quaternion,
    variant: TwistVariant,
    model: &EarthModel,
) -> (TridentTwist, TridentTwist) {
    let (x1, x2) = match variant {
        TwistVariant::BodySide => (Vec3::zeros(), -total_vel_e),
        TwistVariant::EarthSide => (q_eb.inverse_rotate_vector(total_vel_e), Vec3::zeros()),
    };
    (
        TridentTwist::new(*omega_ib_b, *f_b, x1),
        TridentTwist::new(model.omega_ie_e(), -g_e, x2),
    )
}

/// `q̃̇ = ½ (q̃∘ω̃_ib^b − ω̃_ie^e∘q̃)`.
pub fn triq_rhs(
    t: &TridentQuaternion,
    body: &TridentTwist,
    earth: &TridentTwist,
) -> TridentQuaternion {
    (*t * body.to_trident() - earth.to_trident() * *t) * 0.5
}

/// Trident derivative with twists evaluated from the current state.
///
/// Integrator stages drift slightly off the unit structure, so the
/// physical state feeding the twists is read from the projected value.
pub fn triq_rhs_from_state(
    t: &TridentQuaternion,
    omega_ib_b: &Vec3,
    f_b: &Vec3,
    variant: TwistVariant,
    model: &EarthModel,
) -> Result<TridentQuaternion> {
    let s = recover_state(&restore_unit_structure(t), model)?;
    let g = model.gravitation_e(&s.r_e)?;
    let a = s.total_velocity(model);
    let (body, earth) = make_twists(omega_ib_b, f_b, &g, &a, &s.q_eb, variant, model);
    Ok(triq_rhs(t, &body, &earth))
}

/// Dual-quaternion part `½(q̂∘ω̂_ib^b − ω̂_ie^e∘q̂)` with `ω̂_ib^b = ω + εf`
/// and `ω̂_ie^e = ω_ie − εg`, plus `ṙ = 2q′∘q* − ω_ie×r`.
pub fn dqv_rhs(
    dq: &DualQuaternion,
    r_e: &Vec3,
    omega_ib_b: &Vec3,
    f_b: &Vec3,
    model: &EarthModel,
) -> Result<(DualQuaternion, Vec3)> {
    let g = model.gravitation_e(r_e)?;
    let body = DualQuaternion::new(Quaternion::vector(*omega_ib_b), Quaternion::vector(*f_b));
    let earth = DualQuaternion::new(
        Quaternion::vector(model.omega_ie_e()),
        Quaternion::vector(-g),
    );
    let d = (*dq * body - earth * *dq) * 0.5;
    let a = (dq.dual * dq.real.inverse() * 2.0).v;
    Ok((d, a - model.omega_ie_e().cross(r_e)))
}

/// Traditional e-frame mechanization. The returned value holds rates:
/// `q̇_eb = ½(q∘ω_ib^b − ω_ie^e∘q)`, `v̇ = C_b^e f − 2ω_ie×v + g_l`, `ṙ = v`.
pub fn traditional_rhs(
    s: &NavState,
    omega_ib_b: &Vec3,
    f_b: &Vec3,
    model: &EarthModel,
) -> Result<NavState> {
    let w = model.omega_ie_e();
    let q_dot = (s.q_eb * Quaternion::vector(*omega_ib_b) - Quaternion::vector(w) * s.q_eb) * 0.5;
    let v_dot =
        s.q_eb.rotate_vector(f_b) - 2.0 * w.cross(&s.v_e) + model.local_gravity_e(&s.r_e)?;
    Ok(NavState::new(q_dot, v_dot, s.v_e))
}
