//! First-kind Chebyshev series on `τ ∈ [-1, 1]` with generic coefficients.
//!
//! Coefficients may be scalars, quaternions or trident quaternions. Products
//! keep the operand order, so non-commutative coefficient algebras are
//! handled correctly. Products return the full unreduced degree; truncation
//! is always an explicit call to [`cheb_truncate`].

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::algebra::{Quaternion, TridentQuaternion};
use crate::error::{Error, Result};

/// Slack allowed on the `[-1, 1]` domain check.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Coefficient types a Chebyshev series can carry.
pub trait ChebCoeff:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;

    /// Scalar components, used for coefficient-space metrics.
    fn for_each_component(&self, f: &mut dyn FnMut(f64));
}

impl ChebCoeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn for_each_component(&self, f: &mut dyn FnMut(f64)) {
        f(*self)
    }
}

impl ChebCoeff for Quaternion {
    fn zero() -> Self {
        Quaternion::zero()
    }
    fn for_each_component(&self, f: &mut dyn FnMut(f64)) {
        self.to_array().into_iter().for_each(f)
    }
}

impl ChebCoeff for TridentQuaternion {
    fn zero() -> Self {
        TridentQuaternion::zero()
    }
    fn for_each_component(&self, f: &mut dyn FnMut(f64)) {
        self.components().into_iter().for_each(f)
    }
}

/// `Σ coeffs[i] F_i(τ)`; the series always holds at least one coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries<T> {
    coeffs: Vec<T>,
}

/// The solver's working representation.
pub type TridentChebSeries = ChebSeries<TridentQuaternion>;

impl<T: ChebCoeff> ChebSeries<T> {
    /// Wraps a coefficient list; an empty list becomes the zero series.
    pub fn new(coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            Self {
                coeffs: vec![T::zero()],
            }
        } else {
            Self { coeffs }
        }
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The series `F_i` scaled by `c`.
    pub fn monomial(i: usize, c: T) -> Self {
        let mut coeffs = vec![T::zero(); i + 1];
        coeffs[i] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn map<U: ChebCoeff>(&self, f: impl Fn(&T) -> U) -> ChebSeries<U> {
        ChebSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|c| *c * k)
    }

    /// Clenshaw evaluation without the domain check.
    pub fn eval_unchecked(&self, tau: f64) -> T {
        let mut b1 = T::zero();
        let mut b2 = T::zero();
        for c in self.coeffs[1..].iter().rev() {
            let b0 = *c + b1 * (2.0 * tau) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + b1 * tau - b2
    }

    /// Sum of coefficients, i.e. the value at `τ = 1` where every `F_i = 1`.
    pub fn end_value(&self) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc + *c)
    }

    /// Root-mean-square difference over every scalar component of every
    /// coefficient; the shorter series is zero-padded.
    pub fn rms_difference(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or_else(T::zero);
            let b = other.coeffs.get(i).copied().unwrap_or_else(T::zero);
            (a - b).for_each_component(&mut |x| {
                sum += x * x;
                count += 1;
            });
        }
        (sum / count as f64).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        let mut ok = true;
        for c in &self.coeffs {
            c.for_each_component(&mut |x| ok &= x.is_finite());
        }
        ok
    }
}

impl<T: ChebCoeff> Add for &ChebSeries<T> {
    type Output = ChebSeries<T>;
    fn add(self, rhs: Self) -> ChebSeries<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ChebSeries::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or_else(T::zero);
                    let b = rhs.coeffs.get(i).copied().unwrap_or_else(T::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl<T: ChebCoeff> Sub for &ChebSeries<T> {
    type Output = ChebSeries<T>;
    fn sub(self, rhs: Self) -> ChebSeries<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ChebSeries::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or_else(T::zero);
                    let b = rhs.coeffs.get(i).copied().unwrap_or_else(T::zero);
                    a - b
                })
                .collect(),
        )
    }
}

/// Maps window time `t ∈ [0, t_N]` onto `τ ∈ [-1, 1]` via `t = t_N (1 + τ) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMap {
    t_n: f64,
}

impl TimeMap {
    pub fn new(t_n: f64) -> Result<Self> {
        if t_n > 0.0 && t_n.is_finite() {
            Ok(Self { t_n })
        } else {
            Err(Error::InvalidConfig(format!(
                "window length must be positive, got {t_n}"
            )))
        }
    }

    pub fn window(&self) -> f64 {
        self.t_n
    }

    pub fn to_tau(&self, t: f64) -> f64 {
        2.0 * t / self.t_n - 1.0
    }

    pub fn to_time(&self, tau: f64) -> f64 {
        0.5 * self.t_n * (1.0 + tau)
    }

    /// `dt/dτ = t_N / 2`.
    pub fn dt_dtau(&self) -> f64 {
        0.5 * self.t_n
    }
}

/// `F_i(x)` by the three-term recurrence.
pub fn chebyshev_t(i: usize, x: f64) -> f64 {
    match i {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut t0, mut t1) = (1.0, x);
            for _ in 1..i {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            t1
        }
    }
}

fn check_domain(tau: f64) -> Result<()> {
    if tau.abs() <= 1.0 + DOMAIN_SLACK {
        Ok(())
    } else {
        Err(Error::OutOfDomain(tau))
    }
}

/// Evaluates the series at `τ` by Clenshaw's recurrence.
pub fn cheb_eval<T: ChebCoeff>(s: &ChebSeries<T>, tau: f64) -> Result<T> {
    check_domain(tau)?;
    Ok(s.eval_unchecked(tau))
}

/// Product series using `F_j F_k = ½ (F_{j+k} + F_{|j−k|})`.
///
/// Coefficients multiply as `a_j * b_k`, never `b_k * a_j`.
pub fn cheb_product<T>(a: &ChebSeries<T>, b: &ChebSeries<T>) -> ChebSeries<T>
where
    T: ChebCoeff + Mul<Output = T>,
{
    let mut out = vec![T::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (j, aj) in a.coeffs.iter().enumerate() {
        for (k, bk) in b.coeffs.iter().enumerate() {
            let half = (*aj * *bk) * 0.5;
            out[j + k] = out[j + k] + half;
            let d = j.abs_diff(k);
            out[d] = out[d] + half;
        }
    }
    ChebSeries::new(out)
}

/// Antiderivative vanishing at `τ = −1`, one degree higher than the input.
///
/// Uses `∫F_0 = F_1`, `∫F_1 = F_2/4` and
/// `∫F_i = F_{i+1}/(2(i+1)) − F_{i−1}/(2(i−1))` for `i ≥ 2`.
pub fn cheb_integrate<T: ChebCoeff>(s: &ChebSeries<T>) -> ChebSeries<T> {
    let c = &s.coeffs;
    let n = c.len();
    let get = |i: usize| c.get(i).copied().unwrap_or_else(T::zero);
    let mut out = vec![T::zero(); n + 1];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let lower = if k == 1 { get(0) * 2.0 } else { get(k - 1) };
        *slot = (lower - get(k + 1)) * (1.0 / (2.0 * k as f64));
    }
    anchor_at_minus_one(&mut out);
    ChebSeries::new(out)
}

/// Sets the constant coefficient so the series vanishes at `τ = −1`.
fn anchor_at_minus_one<T: ChebCoeff>(coeffs: &mut [T]) {
    let mut at_minus_one = T::zero();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        at_minus_one = if k % 2 == 0 {
            at_minus_one + *c
        } else {
            at_minus_one - *c
        };
    }
    coeffs[0] = T::zero() - at_minus_one;
}

/// Antiderivative of `F_i` in closed form (exact up to an additive constant).
fn antiderivative(i: usize, x: f64) -> f64 {
    if i == 1 {
        return 0.5 * x * x;
    }
    let fi = i as f64;
    (fi * chebyshev_t(i + 1, x) - (fi + 1.0) * x * chebyshev_t(i, x)) / (fi * fi - 1.0)
}

/// `∫_{τa}^{τb} F_i(τ) dτ` in closed form.
pub fn cheb_definite_integral(i: usize, tau_a: f64, tau_b: f64) -> Result<f64> {
    check_domain(tau_a)?;
    check_domain(tau_b)?;
    if i == 1 {
        return Ok(0.5 * (tau_b * tau_b - tau_a * tau_a));
    }
    Ok(antiderivative(i, tau_b) - antiderivative(i, tau_a))
}

/// Chebyshev–Gauss nodes `τ_k = cos((k + ½) π / P)`, `k = 0..P`.
pub fn chebyshev_gauss_nodes(p: usize) -> Vec<f64> {
    (0..p)
        .map(|k| ((k as f64 + 0.5) * PI / p as f64).cos())
        .collect()
}

/// Discrete cosine projection of samples taken at [`chebyshev_gauss_nodes`].
///
/// Coefficient `i = (2 − δ_{0i}) / P · Σ_k cos(i (k + ½) π / P) · values[k]`;
/// exact for polynomials of degree `≤ degree` when `P > degree`.
pub fn cheb_fit_nodes<T: ChebCoeff>(values: &[T], degree: usize) -> Result<ChebSeries<T>> {
    let p = values.len();
    if p < degree + 1 {
        return Err(Error::InsufficientNodes { nodes: p, degree });
    }
    let coeffs = (0..=degree)
        .map(|i| {
            let weight = if i == 0 { 1.0 } else { 2.0 } / p as f64;
            let sum = values.iter().enumerate().fold(T::zero(), |acc, (k, v)| {
                let angle = (i as f64) * (k as f64 + 0.5) * PI / p as f64;
                acc + *v * angle.cos()
            });
            sum * weight
        })
        .collect();
    Ok(ChebSeries::new(coeffs))
}

/// Drops every coefficient above degree `m`.
pub fn cheb_truncate<T: ChebCoeff>(s: &ChebSeries<T>, m: usize) -> ChebSeries<T> {
    ChebSeries::new(s.coeffs.iter().take(m + 1).copied().collect())
}

/// Derivative with respect to `τ`, one degree lower (a constant series for
/// degree zero).
pub fn cheb_derivative<T: ChebCoeff>(s: &ChebSeries<T>) -> ChebSeries<T> {
    let n = s.degree();
    if n == 0 {
        return ChebSeries::constant(T::zero());
    }
    let c = &s.coeffs;
    let mut d = vec![T::zero(); n + 2];
    for k in (0..n).rev() {
        d[k] = d[k + 2] + c[k + 1] * (2.0 * (k + 1) as f64);
    }
    d[0] = d[0] * 0.5;
    d.truncate(n);
    ChebSeries::new(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(c: &[f64]) -> ChebSeries<f64> {
        ChebSeries::new(c.to_vec())
    }

    fn assert_coeffs(s: &ChebSeries<f64>, expected: &[f64], tol: f64) {
        let n = s.coeffs().len().max(expected.len());
        for i in 0..n {
            let a = s.coeffs().get(i).copied().unwrap_or(0.0);
            let b = expected.get(i).copied().unwrap_or(0.0);
            assert!((a - b).abs() <= tol, "coefficient {i}: {a} vs {b}");
        }
    }

    #[test]
    fn constant_and_linear_evaluation() {
        let c = scalar(&[2.5]);
        for tau in [-1.0, -0.3, 0.0, 1.0] {
            assert_eq!(cheb_eval(&c, tau).unwrap(), 2.5);
        }
        let s = scalar(&[0.0, 3.0]);
        assert_eq!(cheb_eval(&s, 0.5).unwrap(), 1.5);
    }

    #[test]
    fn evaluation_rejects_points_outside_domain() {
        let s = scalar(&[1.0, 1.0]);
        assert!(matches!(cheb_eval(&s, 1.1), Err(Error::OutOfDomain(_))));
        assert!(cheb_eval(&s, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn evaluation_matches_trigonometric_definition() {
        let c = [0.3, -1.2, 0.8, 0.05, -0.7, 0.2, 0.11];
        let s = scalar(&c);
        for theta in [0.0, 0.4, 1.1, 2.0, 3.0] {
            let direct: f64 = c
                .iter()
                .enumerate()
                .map(|(i, ci)| ci * (i as f64 * theta).cos())
                .sum();
            let v = cheb_eval(&s, f64::cos(theta)).unwrap();
            assert!((v - direct).abs() < 1e-14, "θ={theta}");
        }
    }

    #[test]
    fn product_identities() {
        let f1 = scalar(&[0.0, 1.0]);
        assert_coeffs(&cheb_product(&f1, &f1), &[0.5, 0.0, 0.5], 0.0);
        let f2 = scalar(&[0.0, 0.0, 1.0]);
        let f3 = scalar(&[0.0, 0.0, 0.0, 1.0]);
        assert_coeffs(
            &cheb_product(&f2, &f3),
            &[0.0, 0.5, 0.0, 0.0, 0.0, 0.5],
            0.0,
        );
        let any = scalar(&[1.0, -2.0, 0.5]);
        assert_coeffs(&cheb_product(&scalar(&[1.0]), &any), any.coeffs(), 0.0);
    }

    #[test]
    fn product_keeps_operand_order() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let a = ChebSeries::constant(i);
        let b = ChebSeries::constant(j);
        assert_eq!(cheb_product(&a, &b).coeffs()[0], i * j);
        assert_eq!(cheb_product(&b, &a).coeffs()[0], j * i);
    }

    #[test]
    fn integration_examples() {
        assert_coeffs(&cheb_integrate(&scalar(&[1.0])), &[1.0, 1.0], 0.0);
        assert_coeffs(
            &cheb_integrate(&scalar(&[0.0, 1.0])),
            &[-0.25, 0.0, 0.25],
            0.0,
        );
        assert_coeffs(
            &cheb_integrate(&scalar(&[0.0, 0.0, 1.0])),
            &[-1.0 / 3.0, -0.5, 0.0, 1.0 / 6.0],
            1e-16,
        );
    }

    #[test]
    fn definite_integral_examples() {
        assert_eq!(cheb_definite_integral(0, -1.0, 1.0).unwrap(), 2.0);
        assert_eq!(cheb_definite_integral(1, -1.0, 1.0).unwrap(), 0.0);
        // ∫_{-1}^{1} F_2 = -2/3
        assert!((cheb_definite_integral(2, -1.0, 1.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            cheb_definite_integral(3, -1.5, 0.0),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn fit_reproduces_low_degree_polynomials() {
        let nodes = chebyshev_gauss_nodes(8);
        let values: Vec<f64> = nodes.iter().map(|&t| chebyshev_t(2, t)).collect();
        let s = cheb_fit_nodes(&values, 4).unwrap();
        assert_coeffs(&s, &[0.0, 0.0, 1.0, 0.0, 0.0], 1e-14);
        let constant = cheb_fit_nodes(&[3.0; 5], 3).unwrap();
        assert_coeffs(&constant, &[3.0, 0.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn fit_of_smooth_function_is_accurate() {
        let f = |t: f64| (std::f64::consts::FRAC_PI_2 * t).cos();
        let nodes = chebyshev_gauss_nodes(9);
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        let s = cheb_fit_nodes(&values, 8).unwrap();
        let worst = (0..1000)
            .map(|k| -1.0 + 2.0 * k as f64 / 999.0)
            .map(|t| (cheb_eval(&s, t).unwrap() - f(t)).abs())
            .fold(0.0, f64::max);
        // the first omitted coefficient, 2·J₁₀(π/2) ≈ 4.65e-8, bounds what a
        // degree-8 fit can reach; interpolation at 9 nodes doubles it
        assert!(worst < 1e-7, "worst {worst}");
        assert!(worst > 4e-8, "worst {worst}");

        let nodes = chebyshev_gauss_nodes(11);
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        let s = cheb_fit_nodes(&values, 10).unwrap();
        let worst = (0..1000)
            .map(|k| -1.0 + 2.0 * k as f64 / 999.0)
            .map(|t| (cheb_eval(&s, t).unwrap() - f(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "worst {worst}");
    }

    #[test]
    fn fit_needs_enough_nodes() {
        assert!(matches!(
            cheb_fit_nodes(&[1.0, 2.0], 2),
            Err(Error::InsufficientNodes {
                nodes: 2,
                degree: 2
            })
        ));
    }

    #[test]
    fn truncation() {
        let s = scalar(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cheb_truncate(&s, 3), s);
        assert_eq!(cheb_truncate(&s, 7), s);
        let long = scalar(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(cheb_truncate(&long, 3).coeffs(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn derivative_inverts_integration() {
        let s = scalar(&[0.4, -1.0, 2.0, 0.3, -0.25]);
        let back = cheb_derivative(&cheb_integrate(&s));
        assert_coeffs(&back, s.coeffs(), 1e-15);
        assert_coeffs(&cheb_derivative(&scalar(&[7.0])), &[0.0], 0.0);
        // d/dτ F_3 = 12τ² − 3 = 3 F_0 + 6 F_2
        assert_coeffs(
            &cheb_derivative(&scalar(&[0.0, 0.0, 0.0, 1.0])),
            &[3.0, 0.0, 6.0],
            1e-15,
        );
    }

    #[test]
    fn time_map_round_trip() {
        let m = TimeMap::new(0.08).unwrap();
        assert_eq!(m.to_tau(0.0), -1.0);
        assert_eq!(m.to_tau(0.08), 1.0);
        assert!((m.to_time(m.to_tau(0.031)) - 0.031).abs() < 1e-17);
        assert!(TimeMap::new(0.0).is_err());
    }
}
