//! Resolvents `(zI − A)^{-1}` and the contour-integral reconstruction
//!
//! ```text
//! A^k = r^{k+1}/(2π) ∫_0^{2π} e^{it(k+1)} (re^{it} − A)^{-1} dt,   r > ρ(A)
//! ```
//!
//! discretised by the trapezoidal rule on `M` equispaced nodes. For this
//! periodic analytic integrand the rule returns exactly
//! `A^k + Σ_{j≥1} A^{k+jM} / r^{jM}`, so the error has a closed-form bound.
//! Node solves and accumulation run in double-double precision; the result is
//! rounded to `f64` once at the end.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ddouble::{CDD, DD};
use crate::entropy::spectral_radius;
use crate::matrix::ExactMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ResolventError {
    #[error("zI − A is numerically singular at z = {0}")]
    Singular(Complex64),
    #[error("node count {0} must be a power of two and at least 4")]
    BadNodeCount(usize),
    #[error("contour radius {r} does not exceed the spectral radius upper bracket {upper}")]
    RadiusBelowSpectrum { r: f64, upper: f64 },
    #[error("contour radius {r} must exceed ‖A‖ = {norm}")]
    RadiusBelowNorm { r: f64, norm: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `Σ |z_ij|`.
    pub fn entry_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }

    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    /// Largest `|z_ij − a_ij|` against an exact integer matrix.
    pub fn max_abs_error(&self, exact: &ExactMatrix) -> f64 {
        self.entries
            .iter()
            .zip(exact.entries())
            .map(|(z, a)| (z - Complex64::new(a.to_f64().unwrap_or(f64::INFINITY), 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Entrywise rounding of the real parts; `None` if any entry is negative
    /// or not finite.
    pub fn round_to_exact(&self) -> Option<ExactMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|z| {
                let v = z.re.round();
                (v.is_finite() && v >= 0.0).then(|| num_bigint::BigUint::from(v as u64))
            })
            .collect::<Option<Vec<_>>>()?;
        ExactMatrix::from_entries(self.n, entries).ok()
    }
}

trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn real(x: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl Scalar for CDD {
    fn zero() -> Self {
        CDD::ZERO
    }
    fn one() -> Self {
        CDD::ONE
    }
    fn real(x: f64) -> Self {
        CDD::from_f64(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

/// `(zI − A)^{-1}` by Gauss–Jordan elimination with partial pivoting on
/// `[zI − A | I]`.
fn shifted_inverse<T: Scalar>(a: &[f64], n: usize, z: T) -> Option<Vec<T>> {
    let width = 2 * n;
    let mut m = vec![T::zero(); n * width];
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut v = T::real(-a[i * n + j]);
            if i == j {
                v = v + z;
            }
            scale = scale.max(v.magnitude());
            m[i * width + j] = v;
        }
        m[i * width + n + i] = T::one();
    }
    let tiny = scale * n as f64 * f64::EPSILON;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x * width + col].magnitude().total_cmp(&m[y * width + col].magnitude()))
            .expect("non-empty range");
        if !(m[pivot * width + col].magnitude() > tiny) {
            return None;
        }
        if pivot != col {
            for j in 0..width {
                m.swap(pivot * width + j, col * width + j);
            }
        }
        let p = m[col * width + col];
        for j in 0..width {
            m[col * width + j] = m[col * width + j] / p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * width + col];
            if factor.magnitude() == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = m[col * width + j];
                m[row * width + j] = m[row * width + j] - factor * v;
            }
        }
    }
    Some((0..n).flat_map(|i| m[i * width + n..(i + 1) * width].to_vec()).collect())
}

/// `(zI − A)^{-1}` in double precision.
pub fn resolvent(a: &ExactMatrix, z: Complex64) -> Result<ComplexMatrix, ResolventError> {
    let n = a.dim();
    let entries = shifted_inverse(&a.to_f64_entries(), n, z).ok_or(ResolventError::Singular(z))?;
    Ok(ComplexMatrix { n, entries })
}

/// Entrywise-sum norm of `(zI − A)·R − I`.
pub fn resolvent_residual(a: &ExactMatrix, z: Complex64, r: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let af = a.to_f64_entries();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                let shifted = if i == l { z - af[i * n + l] } else { Complex64::new(-af[i * n + l], 0.0) };
                acc += shifted * r.get(l, j);
            }
            if i == j {
                acc -= 1.0;
            }
            total += acc.norm();
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub r: f64,
    pub nodes: usize,
    pub k: usize,
}

impl QuadratureSpec {
    /// Checks `nodes ≥ 4` is a power of two and `r` exceeds the upper
    /// spectral bracket of `a`.
    pub fn validate(&self, a: &ExactMatrix) -> Result<(), ResolventError> {
        if self.nodes < 4 || !self.nodes.is_power_of_two() {
            return Err(ResolventError::BadNodeCount(self.nodes));
        }
        let upper = spectral_radius(a, 1e-9).upper;
        if !(self.r.is_finite() && self.r > upper) {
            return Err(ResolventError::RadiusBelowSpectrum { r: self.r, upper });
        }
        Ok(())
    }
}

/// Trapezoidal contour reconstruction
/// `(r^{k+1}/M) Σ_j e^{i t_j (k+1)} (r e^{i t_j} − A)^{-1}`, `t_j = 2πj/M`.
pub fn power_via_cauchy(a: &ExactMatrix, spec: &QuadratureSpec) -> Result<ComplexMatrix, ResolventError> {
    spec.validate(a)?;
    let n = a.dim();
    let m = spec.nodes;
    let af = a.to_f64_entries();
    let roots = CDD::roots_of_unity(m);
    let radius = DD::from_f64(spec.r);

    let solves: Vec<Vec<CDD>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let z = roots[j].scale(radius);
            shifted_inverse(&af, n, z).ok_or_else(|| ResolventError::Singular(z.to_c64()))
        })
        .collect::<Result<_, _>>()?;

    // fixed-order accumulation; e^{i t_j (k+1)} = ω^{j(k+1) mod M}
    let mut acc = vec![CDD::ZERO; n * n];
    for (j, inv) in solves.iter().enumerate() {
        let weight = roots[(j * (spec.k + 1)) % m];
        for (slot, v) in acc.iter_mut().zip(inv) {
            *slot = *slot + weight * *v;
        }
    }
    let factor = radius.powi(spec.k as u32 + 1) / DD::from_f64(m as f64);
    Ok(ComplexMatrix { n, entries: acc.into_iter().map(|v| v.scale(factor).to_c64()).collect() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub k: usize,
    pub r: f64,
    pub nodes: usize,
    pub reconstruction_re: Vec<Vec<f64>>,
    pub reconstruction_im: Vec<Vec<f64>>,
    pub max_error: f64,
    pub max_imag: f64,
    /// `‖A‖^k q/(1 − q)` with `q = (‖A‖/r)^M`; only defined for `r > ‖A‖`.
    pub aliasing_bound: Option<f64>,
    pub within_bound: bool,
    pub rounds_exactly: bool,
}

/// Measured reconstruction error of `A^k` against the exact power, next to
/// the analytic aliasing bound.
pub fn cauchy_error_report(a: &ExactMatrix, k: usize, r: f64, nodes: usize) -> Result<CauchyReport, ResolventError> {
    let spec = QuadratureSpec { r, nodes, k };
    let recon = power_via_cauchy(a, &spec)?;
    let exact = a.pow(k);
    let max_error = recon.max_abs_error(&exact);
    let norm = a.entry_norm().to_f64().unwrap_or(f64::INFINITY);
    let aliasing_bound = (r > norm).then(|| {
        let q = (norm / r).powi(nodes as i32);
        norm.powi(k as i32) * q / (1.0 - q)
    });
    let within_bound = aliasing_bound.map_or(true, |b| max_error <= b + 1e-9);
    let rounds_exactly = recon.round_to_exact().as_ref() == Some(&exact);
    Ok(CauchyReport {
        k,
        r,
        nodes,
        reconstruction_re: recon.real_rows(),
        reconstruction_im: recon.imag_rows(),
        max_error,
        max_imag: recon.max_imag(),
        aliasing_bound,
        within_bound,
        rounds_exactly,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventBoundReport {
    pub r: f64,
    pub samples: usize,
    /// `(1/r)(n + ‖A‖/(r − ‖A‖))`.
    pub bound: f64,
    pub max_norm: f64,
    /// Sample indices whose resolvent norm exceeds `bound + 1e-9`.
    pub violations: Vec<usize>,
}

/// Sweeps `‖(re^{it} − A)^{-1}‖` over equispaced `t` against
/// `(1/r)(n + ‖A‖/(r − ‖A‖))`.
pub fn resolvent_norm_bound_check(a: &ExactMatrix, r: f64, samples: usize) -> Result<ResolventBoundReport, ResolventError> {
    let norm = a.entry_norm().to_f64().unwrap_or(f64::INFINITY);
    if !(r > norm) {
        return Err(ResolventError::RadiusBelowNorm { r, norm });
    }
    let bound = (a.dim() as f64 + norm / (r - norm)) / r;
    let mut max_norm = 0.0f64;
    let mut violations = Vec::new();
    for s in 0..samples {
        let t = std::f64::consts::TAU * s as f64 / samples as f64;
        let value = resolvent(a, Complex64::from_polar(r, t))?.entry_norm();
        max_norm = max_norm.max(value);
        if value > bound + 1e-9 {
            violations.push(s);
        }
    }
    Ok(ResolventBoundReport { r, samples, bound, max_norm, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent(&ExactMatrix::from_rows(&[[2]]), Complex64::new(3.0, 0.0)).unwrap();
        assert!(close(r.get(0, 0), Complex64::new(1.0, 0.0)));

        let i = Complex64::new(0.0, 1.0);
        let r = resolvent(&ExactMatrix::zero(2), i).unwrap();
        assert!(close(r.get(0, 0), -i) && close(r.get(1, 1), -i));
        assert!(close(r.get(0, 1), Complex64::new(0.0, 0.0)));

        let fib = ExactMatrix::from_rows(&[[1, 1], [1, 0]]);
        let z = Complex64::new(3.0, 0.0);
        let r = resolvent(&fib, z).unwrap();
        let expected = [[0.6, 0.2], [0.2, 0.4]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(close(r.get(i, j), Complex64::new(v, 0.0)));
            }
        }
        assert!(resolvent_residual(&fib, z, &r) < 1e-10 * 4.0);
    }

    #[test]
    fn singular_resolvent() {
        let err = resolvent(&ExactMatrix::from_rows(&[[2]]), Complex64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, ResolventError::Singular(_)));
    }

    #[test]
    fn cauchy_examples() {
        let a = ExactMatrix::from_rows(&[[2]]);
        let p = power_via_cauchy(&a, &QuadratureSpec { r: 3.0, nodes: 64, k: 3 }).unwrap();
        assert!((p.get(0, 0) - Complex64::new(8.0, 0.0)).norm() < 1e-10);

        let fib = ExactMatrix::from_rows(&[[1, 1], [1, 0]]);
        let p = power_via_cauchy(&fib, &QuadratureSpec { r: 4.0, nodes: 256, k: 0 }).unwrap();
        assert!(p.max_abs_error(&ExactMatrix::identity(2)) < 1e-12);
        let p = power_via_cauchy(&fib, &QuadratureSpec { r: 3.0, nodes: 256, k: 5 }).unwrap();
        assert_eq!(p.round_to_exact().unwrap().to_u64_rows(), vec![vec![8, 5], vec![5, 3]]);
    }

    #[test]
    fn spec_validation() {
        let a = ExactMatrix::from_rows(&[[2]]);
        assert_eq!(
            power_via_cauchy(&a, &QuadratureSpec { r: 3.0, nodes: 6, k: 1 }),
            Err(ResolventError::BadNodeCount(6))
        );
        assert!(matches!(
            power_via_cauchy(&a, &QuadratureSpec { r: 1.5, nodes: 64, k: 1 }),
            Err(ResolventError::RadiusBelowSpectrum { .. })
        ));
    }

    #[test]
    fn error_report() {
        let a = ExactMatrix::from_rows(&[[2]]);
        let rep = cauchy_error_report(&a, 5, 3.0, 128).unwrap();
        assert!(rep.max_error < 1e-12 && rep.within_bound && rep.rounds_exactly);
        let doubled = cauchy_error_report(&a, 5, 3.0, 256).unwrap();
        assert!(doubled.max_error <= rep.max_error);
    }

    #[test]
    fn resolvent_bound_examples() {
        let rep = resolvent_norm_bound_check(&ExactMatrix::from_rows(&[[2]]), 3.0, 1).unwrap();
        assert!((rep.max_norm - 1.0).abs() < 1e-15 && (rep.bound - 1.0).abs() < 1e-15);
        assert!(rep.violations.is_empty());

        let rep = resolvent_norm_bound_check(&ExactMatrix::zero(3), 2.5, 16).unwrap();
        assert!((rep.max_norm - 3.0 / 2.5).abs() < 1e-12 && rep.violations.is_empty());

        let fib = ExactMatrix::from_rows(&[[1, 1], [1, 0]]);
        let rep = resolvent_norm_bound_check(&fib, 4.0, 360).unwrap();
        assert!(rep.violations.is_empty());
        assert!(resolvent_norm_bound_check(&fib, 3.0, 4).is_err());
    }
}
