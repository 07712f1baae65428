use std::io::{Read, Write};
use std::path::Path;

use crate::algebra::{Quaternion, Vec3, UNIT_TOLERANCE};
use crate::earth::{c_ne_matrix, EarthModel};
use crate::error::{Error, Result};
use crate::kinematics::NavState;
use crate::tqfilter::ImuSample;

pub const CSV_HEADER: [&str; 9] = [
    "t",
    "att_err_rad",
    "verr_n",
    "verr_u",
    "verr_e",
    "perr_n",
    "perr_u",
    "perr_e",
    "converged",
];

pub const IMU_HEADER: [&str; 7] = ["t", "dthx", "dthy", "dthz", "dvx", "dvy", "dvz"];

/// Estimation error at one instant, resolved in (north, up, east).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub att_err: f64,
    pub vel_err_nue: Vec3,
    pub pos_err_nue: Vec3,
    pub converged: bool,
}

/// Rotation angle of `q_true* ∘ q_est`, in `[0, π]`.
///
/// Computed as `2 atan2(‖v‖, |s|)`, which keeps full relative precision for
/// the femtoradian errors of the trident filter where `2 acos |s|` would
/// round to zero.
pub fn principal_angle_error(q_true: &Quaternion, q_est: &Quaternion) -> Result<f64> {
    q_true.ensure_unit(UNIT_TOLERANCE)?;
    q_est.ensure_unit(UNIT_TOLERANCE)?;
    let d = q_true.conjugate() * *q_est;
    Ok(2.0 * d.v.norm().atan2(d.s.abs()))
}

/// Error of `est` against `truth`, with velocity and position differences
/// rotated into the local-level frame at the true position.
pub fn state_error(
    t: f64,
    truth: &NavState,
    est: &NavState,
    model: &EarthModel,
    converged: bool,
) -> Result<ErrorRecord> {
    let pos = model.ecef_to_geodetic(&truth.r_e)?;
    let c_en = c_ne_matrix(&pos).transpose();
    Ok(ErrorRecord {
        t,
        att_err: principal_angle_error(&truth.q_eb, &est.q_eb)?,
        vel_err_nue: c_en * (est.v_e - truth.v_e),
        pos_err_nue: c_en * (est.r_e - truth.r_e),
        converged,
    })
}

fn row(r: &ErrorRecord) -> [String; 9] {
    let f = |x: f64| format!("{x:?}");
    [
        f(r.t),
        f(r.att_err),
        f(r.vel_err_nue.x),
        f(r.vel_err_nue.y),
        f(r.vel_err_nue.z),
        f(r.pos_err_nue.x),
        f(r.pos_err_nue.y),
        f(r.pos_err_nue.z),
        (r.converged as u8).to_string(),
    ]
}

/// Writes the error series as CSV; floats use the shortest decimal that
/// round-trips.
pub fn write_error_csv<W: Write>(out: W, records: &[ErrorRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{field}' is not a number")))
}

pub fn read_error_csv<R: Read>(input: R) -> Result<Vec<ErrorRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header, expected {}",
            CSV_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Parse(format!("line {line}: expected 9 fields")));
        }
        let v: Vec<f64> = (0..8)
            .map(|i| parse_f64(&rec[i], line))
            .collect::<Result<_>>()?;
        let converged = match rec[8].trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse(format!(
                    "line {line}: bad converged flag '{other}'"
                )))
            }
        };
        out.push(ErrorRecord {
            t: v[0],
            att_err: v[1],
            vel_err_nue: Vec3::new(v[2], v[3], v[4]),
            pos_err_nue: Vec3::new(v[5], v[6], v[7]),
            converged,
        });
    }
    Ok(out)
}

/// Writes increments as `t,dthx,dthy,dthz,dvx,dvy,dvz` with a header line.
pub fn write_imu<W: Write>(out: W, samples: &[ImuSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(IMU_HEADER)?;
    for s in samples {
        let vals = [
            s.t, s.gyro.x, s.gyro.y, s.gyro.z, s.accel.x, s.accel.y, s.accel.z,
        ];
        w.write_record(vals.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an increment file. A header line is optional; blank lines and
/// lines starting with `#` are skipped.
pub fn read_imu<R: Read>(input: R) -> Result<Vec<ImuSample>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut out: Vec<ImuSample> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if i == 0 && rec.iter().eq(IMU_HEADER) {
            continue;
        }
        if rec.len() != 7 {
            return Err(Error::Parse(format!(
                "line {line}: expected 7 fields, got {}",
                rec.len()
            )));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|f| parse_f64(f, line))
            .collect::<Result<_>>()?;
        if let Some(prev) = out.last() {
            if !(v[0] > prev.t) {
                return Err(Error::Parse(format!(
                    "line {line}: time {} does not increase",
                    v[0]
                )));
            }
        }
        out.push(ImuSample::new(
            v[0],
            Vec3::new(v[1], v[2], v[3]),
            Vec3::new(v[4], v[5], v[6]),
        ));
    }
    Ok(out)
}

pub fn read_imu_file(path: &Path) -> Result<Vec<ImuSample>> {
    read_imu(std::fs::File::open(path)?)
}

/// Truth record `t,qs,qx,qy,qz,vx,vy,vz,rx,ry,rz` in the earth frame.
pub fn write_truth<W: Write>(out: W, states: &[(f64, NavState)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "t", "qs", "qx", "qy", "qz", "vx", "vy", "vz", "rx", "ry", "rz",
    ])?;
    for (t, s) in states {
        let q = s.q_eb.to_array();
        let vals = [
            *t, q[0], q[1], q[2], q[3], s.v_e.x, s.v_e.y, s.v_e.z, s.r_e.x, s.r_e.y, s.r_e.z,
        ];
        w.write_record(vals.iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}
