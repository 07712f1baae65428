#![allow(dead_code)]

use rand::Rng;
use trinav::algebra::{Quaternion, TridentQuaternion, Vec3};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // start from many panels so periodic integrands cannot alias the
    // first error estimate
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let (x0, x1) = (
                a + i as f64 * h,
                if i + 1 == PANELS {
                    b
                } else {
                    a + (i + 1) as f64 * h
                },
            );
            let (fa, fb, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
            rec(f, x0, x1, fa, fm, fb, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

/// `T_n(x) = cos(n arccos x)`, independent of the library's recurrence.
pub fn cheb_t_trig(n: usize, x: f64) -> f64 {
    (n as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// Chebyshev coefficient `k` of `f` by projection,
/// `c_k = (2 − δ_k0)/π ∫₀^π f(cos θ) cos kθ dθ`.
pub fn cheb_project(f: &dyn Fn(f64) -> f64, k: usize) -> f64 {
    let w = if k == 0 { 1.0 } else { 2.0 };
    w / std::f64::consts::PI
        * simpson(
            &|th: f64| f(th.cos()) * (k as f64 * th).cos(),
            0.0,
            std::f64::consts::PI,
            1e-12,
        )
}

pub fn random_vec<R: Rng>(rng: &mut R, scale: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn random_unit_quaternion<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::from_parts(rng.random_range(-1.0..1.0), random_vec(rng, 1.0));
        let n = q.norm();
        if n > 0.1 && n <= 1.0 {
            return q.normalize();
        }
    }
}

/// `q + ε₁ ½a∘q + ε₂ ½r∘q` with `a`, `r` uniform in `[−scale, scale]³`.
pub fn random_unit_trident<R: Rng>(rng: &mut R, scale: f64) -> TridentQuaternion {
    let q = random_unit_quaternion(rng);
    TridentQuaternion::new(
        q,
        Quaternion::vector(random_vec(rng, scale)) * q * 0.5,
        Quaternion::vector(random_vec(rng, scale)) * q * 0.5,
    )
}
