//! WGS-84 earth model: gravity, curvature radii and local-level frames.
//!
//! The local-level frame is ordered (north, up, east). Geodetic positions
//! are latitude `L`, longitude `λ` and ellipsoidal height `h`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::algebra::{Quaternion, Vec3};
use crate::error::{Error, Result};

/// How gravity is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GravityModel {
    /// Somigliana normal gravity with the WGS-84 free-air height correction.
    #[default]
    Somigliana,
    /// No gravitation at all; local gravity is then purely centrifugal.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EarthModel {
    pub semi_major_axis: f64,
    pub flattening: f64,
    pub rotation_rate: f64,
    pub gm: f64,
    pub gamma_equator: f64,
    pub gamma_pole: f64,
    pub gravity: GravityModel,
}

impl Default for EarthModel {
    fn default() -> Self {
        Self::wgs84()
    }
}

/// Geodetic coordinates in radians and metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodeticPosition {
    pub latitude: f64,
    pub longitude: f64,
    pub height: f64,
}

impl GeodeticPosition {
    pub fn new(latitude: f64, longitude: f64, height: f64) -> Self {
        Self {
            latitude,
            longitude,
            height,
        }
    }
}

const MAX_GEODETIC_ITERATIONS: usize = 20;

impl EarthModel {
    pub fn wgs84() -> Self {
        Self {
            semi_major_axis: 6_378_137.0,
            flattening: 1.0 / 298.257_223_563,
            rotation_rate: 7.292_115e-5,
            gm: 3.986_004_418e14,
            gamma_equator: 9.780_325_335_9,
            gamma_pole: 9.832_184_937_8,
            gravity: GravityModel::Somigliana,
        }
    }

    /// WGS-84 geometry with no gravitation and no earth rotation.
    pub fn inert() -> Self {
        Self {
            rotation_rate: 0.0,
            gravity: GravityModel::Zero,
            ..Self::wgs84()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.semi_major_axis > 0.0
            && (0.0..1.0).contains(&self.flattening)
            && self.rotation_rate >= 0.0
            && self.rotation_rate.is_finite()
            && self.gm > 0.0
            && self.gamma_equator > 0.0
            && self.gamma_pole > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid earth model {self:?}"
            )))
        }
    }

    pub fn semi_minor_axis(&self) -> f64 {
        self.semi_major_axis * (1.0 - self.flattening)
    }

    /// First eccentricity squared.
    pub fn e2(&self) -> f64 {
        self.flattening * (2.0 - self.flattening)
    }

    /// `ω_ie^e = [0, 0, ω_ie]`.
    pub fn omega_ie_e(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, self.rotation_rate)
    }

    /// Earth rate resolved in the local-level frame.
    pub fn omega_ie_n(&self, latitude: f64) -> Vec3 {
        let (s, c) = latitude.sin_cos();
        Vec3::new(self.rotation_rate * c, self.rotation_rate * s, 0.0)
    }

    /// Transverse (prime-vertical) radius `R_E` and meridian radius `R_N`.
    pub fn radii(&self, latitude: f64) -> (f64, f64) {
        let e2 = self.e2();
        let s = latitude.sin();
        let w2 = 1.0 - e2 * s * s;
        let re = self.semi_major_axis / w2.sqrt();
        let rn = self.semi_major_axis * (1.0 - e2) / (w2 * w2.sqrt());
        (re, rn)
    }

    pub fn geodetic_to_ecef(&self, p: &GeodeticPosition) -> Vec3 {
        let (re, _) = self.radii(p.latitude);
        let (sl, cl) = p.latitude.sin_cos();
        let (so, co) = p.longitude.sin_cos();
        Vec3::new(
            (re + p.height) * cl * co,
            (re + p.height) * cl * so,
            (re * (1.0 - self.e2()) + p.height) * sl,
        )
    }

    /// Iterative inversion of [`EarthModel::geodetic_to_ecef`].
    pub fn ecef_to_geodetic(&self, r: &Vec3) -> Result<GeodeticPosition> {
        let radius = r.norm();
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::NearSingularPosition { radius });
        }
        let e2 = self.e2();
        let rho = r.x.hypot(r.y);
        let longitude = r.y.atan2(r.x);
        if rho == 0.0 {
            let b = self.semi_minor_axis();
            return Ok(GeodeticPosition::new(
                std::f64::consts::FRAC_PI_2.copysign(r.z),
                0.0,
                r.z.abs() - b,
            ));
        }
        let mut lat = r.z.atan2(rho * (1.0 - e2));
        for _ in 0..MAX_GEODETIC_ITERATIONS {
            let (re, _) = self.radii(lat);
            let next = (r.z + e2 * re * lat.sin()).atan2(rho);
            let done = (next - lat).abs() <= 1e-15;
            lat = next;
            if done {
                let (re, _) = self.radii(lat);
                let (s, c) = lat.sin_cos();
                // the better-conditioned height formula for each latitude band
                let height = if c > s.abs() {
                    rho / c - re
                } else {
                    r.z / s - re * (1.0 - e2)
                };
                return Ok(GeodeticPosition::new(lat, longitude, height));
            }
        }
        Err(Error::ConvergenceFailure {
            iterations: MAX_GEODETIC_ITERATIONS,
        })
    }

    /// Magnitude of normal gravity at latitude and height.
    pub fn normal_gravity(&self, latitude: f64, height: f64) -> f64 {
        if self.gravity == GravityModel::Zero {
            return 0.0;
        }
        let a = self.semi_major_axis;
        let b = self.semi_minor_axis();
        let f = self.flattening;
        let s2 = latitude.sin().powi(2);
        let k = b * self.gamma_pole / (a * self.gamma_equator) - 1.0;
        let gamma0 = self.gamma_equator * (1.0 + k * s2) / (1.0 - self.e2() * s2).sqrt();
        let m = self.rotation_rate.powi(2) * a * a * b / self.gm;
        gamma0
            * (1.0 - 2.0 / a * (1.0 + f + m - 2.0 * f * s2) * height
                + 3.0 * height * height / (a * a))
    }

    /// Centrifugal term `(ω_ie^e×)² r^e`, i.e. `ω × (ω × r)`.
    pub fn centripetal(&self, r: &Vec3) -> Vec3 {
        let w = self.omega_ie_e();
        w.cross(&w.cross(r))
    }

    /// Local (plumb-bob) gravity `g_l^e`: normal gravity along the downward
    /// ellipsoid normal.
    pub fn local_gravity_e(&self, r: &Vec3) -> Result<Vec3> {
        self.check_radius(r)?;
        if self.gravity == GravityModel::Zero {
            return Ok(-self.centripetal(r));
        }
        let p = self.ecef_to_geodetic(r)?;
        let up = up_axis(&p);
        Ok(-self.normal_gravity(p.latitude, p.height) * up)
    }

    /// Mass attraction `g^e = g_l^e + (ω_ie^e×)² r^e`.
    pub fn gravitation_e(&self, r: &Vec3) -> Result<Vec3> {
        self.check_radius(r)?;
        if self.gravity == GravityModel::Zero {
            return Ok(Vec3::zeros());
        }
        Ok(self.local_gravity_e(r)? + self.centripetal(r))
    }

    /// Local gravity resolved in the local-level frame.
    pub fn local_gravity_n(&self, p: &GeodeticPosition) -> Vec3 {
        match self.gravity {
            GravityModel::Somigliana => {
                Vec3::new(0.0, -self.normal_gravity(p.latitude, p.height), 0.0)
            }
            GravityModel::Zero => {
                let r = self.geodetic_to_ecef(p);
                c_en(p).inverse_rotate_vector(&-self.centripetal(&r))
            }
        }
    }

    /// Position-rate matrix mapping `v^n` to `(λ̇, L̇, ḣ)`.
    pub fn curvature_matrix(&self, p: &GeodeticPosition) -> Result<Matrix3<f64>> {
        let c = p.latitude.cos();
        if c.abs() <= 1e-9 {
            return Err(Error::PolarSingularity {
                latitude: p.latitude,
            });
        }
        let (re, rn) = self.radii(p.latitude);
        Ok(Matrix3::new(
            0.0,
            0.0,
            1.0 / ((re + p.height) * c),
            1.0 / (rn + p.height),
            0.0,
            0.0,
            0.0,
            1.0,
            0.0,
        ))
    }

    /// Transport rate `ω_en^n` for ground velocity `v^n`.
    pub fn transport_rate(&self, p: &GeodeticPosition, v_n: &Vec3) -> Result<Vec3> {
        let rate = self.curvature_matrix(p)? * v_n;
        let (lon_dot, lat_dot) = (rate[0], rate[1]);
        let (s, c) = p.latitude.sin_cos();
        Ok(Vec3::new(lon_dot * c, lon_dot * s, -lat_dot))
    }

    fn check_radius(&self, r: &Vec3) -> Result<()> {
        let radius = r.norm();
        if radius > 0.5 * self.semi_major_axis && radius.is_finite() {
            Ok(())
        } else {
            Err(Error::NearSingularPosition { radius })
        }
    }
}

fn up_axis(p: &GeodeticPosition) -> Vec3 {
    let (sl, cl) = p.latitude.sin_cos();
    let (so, co) = p.longitude.sin_cos();
    Vec3::new(cl * co, cl * so, sl)
}

/// Direction cosine matrix `C_n^e` whose columns are the north, up and east
/// axes in earth coordinates.
pub fn c_ne_matrix(p: &GeodeticPosition) -> Matrix3<f64> {
    let (sl, cl) = p.latitude.sin_cos();
    let (so, co) = p.longitude.sin_cos();
    Matrix3::new(
        -sl * co,
        cl * co,
        -so, //
        -sl * so,
        cl * so,
        co, //
        cl,
        sl,
        0.0,
    )
}

/// Attitude `q_en` of the local-level frame: `q_en* ∘ r^e ∘ q_en` gives
/// north-up-east coordinates.
pub fn c_en(p: &GeodeticPosition) -> Quaternion {
    Quaternion::from_dcm(&c_ne_matrix(p))
}
