//! Dual numbers, dual complex matrices, the dual Frobenius norm and the
//! quasi-metric.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Num;

use crate::error::{DualSvdError, Result};
use crate::linalg::{self, ensure_same_shape, CMat};
use crate::scalar::Real;

/// `standard + infinitesimal * eps` with `eps^2 = 0`.
///
/// Arithmetic only needs [`num_traits::Num`], so exact scalar types work too.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct DualNumber<T> {
    pub standard: T,
    pub infinitesimal: T,
}

impl<T> DualNumber<T> {
    pub const fn new(standard: T, infinitesimal: T) -> Self {
        Self { standard, infinitesimal }
    }
}

impl<T: Num + Copy> Add for DualNumber<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.standard + rhs.standard, self.infinitesimal + rhs.infinitesimal)
    }
}

impl<T: Num + Copy> Sub for DualNumber<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.standard - rhs.standard, self.infinitesimal - rhs.infinitesimal)
    }
}

impl<T: Num + Copy> Mul for DualNumber<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.standard * rhs.standard,
            self.standard * rhs.infinitesimal + self.infinitesimal * rhs.standard,
        )
    }
}

impl<T: Num + Copy + Neg<Output = T>> Neg for DualNumber<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.standard, -self.infinitesimal)
    }
}

impl<T: fmt::Display> fmt::Display for DualNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.standard, self.infinitesimal)
    }
}

/// Dual complex matrix `A_s + A_i eps`, stored as two column-major buffers of
/// identical shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMatrix<T: Real> {
    standard: CMat<T>,
    infinitesimal: CMat<T>,
}

impl<T: Real> DualMatrix<T> {
    pub fn new(standard: CMat<T>, infinitesimal: CMat<T>) -> Result<Self> {
        ensure_same_shape("DualMatrix::new", &standard, &infinitesimal)?;
        Ok(Self { standard, infinitesimal })
    }

    /// `(M, 0)`.
    pub fn from_standard(standard: CMat<T>) -> Self {
        let infinitesimal = CMat::zeros(standard.nrows(), standard.ncols());
        Self { standard, infinitesimal }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self { standard: CMat::zeros(m, n), infinitesimal: CMat::zeros(m, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_standard(linalg::identity(n))
    }

    pub fn standard(&self) -> &CMat<T> {
        &self.standard
    }

    pub fn infinitesimal(&self) -> &CMat<T> {
        &self.infinitesimal
    }

    pub fn into_parts(self) -> (CMat<T>, CMat<T>) {
        (self.standard, self.infinitesimal)
    }

    pub fn nrows(&self) -> usize {
        self.standard.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.standard.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    /// True when both parts carry no imaginary component.
    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.standard) && linalg::is_real(&self.infinitesimal)
    }

    /// Leading `k` columns of both parts.
    pub fn columns(&self, k: usize) -> Self {
        Self {
            standard: self.standard.columns(0, k).into_owned(),
            infinitesimal: self.infinitesimal.columns(0, k).into_owned(),
        }
    }

    fn check_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(DualSvdError::ShapeMismatch { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape("dual add", other)?;
        Ok(Self {
            standard: &self.standard + &other.standard,
            infinitesimal: &self.infinitesimal + &other.infinitesimal,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape("dual sub", other)?;
        Ok(Self {
            standard: &self.standard - &other.standard,
            infinitesimal: &self.infinitesimal - &other.infinitesimal,
        })
    }

    /// `(A_s B_s, A_s B_i + A_i B_s)`; the `eps^2` term is dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.nrows() {
            return Err(DualSvdError::ShapeMismatch {
                op: "dual mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        if linalg::is_zero(&other.infinitesimal) {
            return self.mul_complex(&other.standard);
        }
        let standard = linalg::matmul(&self.standard, &other.standard);
        let mut infinitesimal = linalg::matmul(&self.standard, &other.infinitesimal);
        if !linalg::is_zero(&self.infinitesimal) {
            infinitesimal += linalg::matmul(&self.infinitesimal, &other.standard);
        }
        Ok(Self { standard, infinitesimal })
    }

    /// Product with a plain complex matrix: `(A_s M, A_i M)`.
    pub fn mul_complex(&self, m: &CMat<T>) -> Result<Self> {
        if self.ncols() != m.nrows() {
            return Err(DualSvdError::ShapeMismatch {
                op: "dual mul_complex",
                left: self.shape(),
                right: (m.nrows(), m.ncols()),
            });
        }
        Ok(Self {
            standard: linalg::matmul(&self.standard, m),
            infinitesimal: linalg::matmul(&self.infinitesimal, m),
        })
    }

    /// `A^* = A_s^* + A_i^* eps`.
    pub fn adjoint(&self) -> Self {
        Self { standard: self.standard.adjoint(), infinitesimal: self.infinitesimal.adjoint() }
    }

    /// `A^* B` without materializing the adjoint twice at call sites.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self> {
        self.adjoint().mul(other)
    }
}

/// Dual Frobenius norm:
/// `||A_s|| + <A_s, A_i> / ||A_s|| eps` when `A_s != O`, else `||A_i|| eps`.
///
/// The branch is taken on an exact all-zeros test of `A_s`.
pub fn fro_norm_dual<T: Real>(a: &DualMatrix<T>) -> DualNumber<T> {
    if linalg::is_zero(a.standard()) {
        return DualNumber::new(T::zero(), linalg::fro_norm(a.infinitesimal()));
    }
    let ns = linalg::fro_norm(a.standard());
    let inner = linalg::real_inner(a.standard(), a.infinitesimal()).expect("parts share a shape");
    DualNumber::new(ns, inner / ns)
}

/// Quasi-metric `||A - B||_{F*}`:
/// `||dA_s|| + ||dA_i||^2 / (2 ||dA_s||) eps` when `A_s != B_s`, else `||dA_i|| eps`.
pub fn quasi_metric<T: Real>(a: &DualMatrix<T>, b: &DualMatrix<T>) -> Result<DualNumber<T>> {
    let d = a.sub(b)?;
    let ni = linalg::fro_norm(d.infinitesimal());
    if linalg::is_zero(d.standard()) {
        return Ok(DualNumber::new(T::zero(), ni));
    }
    let ns = linalg::fro_norm(d.standard());
    Ok(DualNumber::new(ns, ni * ni / (ns + ns)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fro_norm, randn_complex};

    fn rand_dual(m: usize, n: usize, seed: u64) -> DualMatrix<f64> {
        DualMatrix::new(randn_complex(m, n, seed), randn_complex(m, n, seed + 1000)).unwrap()
    }

    fn close(a: &DualMatrix<f64>, b: &DualMatrix<f64>, tol: f64) -> bool {
        fro_norm(&(a.standard() - b.standard())) <= tol
            && fro_norm(&(a.infinitesimal() - b.infinitesimal())) <= tol
    }

    #[test]
    fn dual_number_arithmetic() {
        let a = DualNumber::new(2i64, 3);
        let b = DualNumber::new(5i64, -7);
        assert_eq!(a + b, DualNumber::new(7, -4));
        assert_eq!(a - b, DualNumber::new(-3, 10));
        assert_eq!(a * b, DualNumber::new(10, -14 + 15));
        // eps * eps = 0
        let eps = DualNumber::new(0i64, 1);
        assert_eq!(eps * eps, DualNumber::new(0, 0));
        assert_eq!(-a, DualNumber::new(-2, -3));
    }

    #[test]
    fn construction_rejects_mismatched_parts() {
        assert!(matches!(
            DualMatrix::<f64>::new(CMat::zeros(2, 3), CMat::zeros(3, 2)),
            Err(DualSvdError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn add_cases() {
        let z = DualMatrix::<f64>::zeros(2, 2);
        assert_eq!(z.add(&z).unwrap(), z);
        let i = linalg::identity::<f64>(2);
        let a = DualMatrix::new(i.clone(), CMat::zeros(2, 2)).unwrap();
        let b = DualMatrix::new(CMat::zeros(2, 2), i.clone()).unwrap();
        assert_eq!(a.add(&b).unwrap(), DualMatrix::new(i.clone(), i).unwrap());

        let x = rand_dual(3, 4, 1);
        let y = rand_dual(3, 4, 2);
        let s = x.add(&y).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                assert_eq!(s.standard()[(r, c)], x.standard()[(r, c)] + y.standard()[(r, c)]);
                assert_eq!(
                    s.infinitesimal()[(r, c)],
                    x.infinitesimal()[(r, c)] + y.infinitesimal()[(r, c)]
                );
            }
        }
        assert!(x.add(&rand_dual(4, 3, 3)).is_err());
    }

    #[test]
    fn mul_identity_and_nilpotent() {
        let i = DualMatrix::<f64>::identity(3);
        assert_eq!(i.mul(&i).unwrap(), i);
        let e: DualMatrix<f64> = DualMatrix::new(CMat::zeros(3, 3), linalg::identity(3)).unwrap();
        assert_eq!(e.mul(&e).unwrap(), DualMatrix::zeros(3, 3));
        assert!(i.mul(&rand_dual(2, 2, 1)).is_err());
    }

    #[test]
    fn mul_matches_first_order_expansion() {
        // Expand (A_s + A_i t)(B_s + B_i t) entrywise and keep the t^0, t^1 terms.
        let a = rand_dual(3, 3, 4);
        let b = rand_dual(3, 3, 5);
        let p = a.mul(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut c0 = num_complex::Complex::new(0.0, 0.0);
                let mut c1 = c0;
                for k in 0..3 {
                    let (as_, ai) = (a.standard()[(i, k)], a.infinitesimal()[(i, k)]);
                    let (bs, bi) = (b.standard()[(k, j)], b.infinitesimal()[(k, j)]);
                    c0 += as_ * bs;
                    c1 += as_ * bi + ai * bs;
                }
                assert!((p.standard()[(i, j)] - c0).norm() < 1e-13);
                assert!((p.infinitesimal()[(i, j)] - c1).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mul_complex_cases() {
        let a = rand_dual(3, 4, 6);
        let id = linalg::identity::<f64>(4);
        assert!(close(&a.mul_complex(&id).unwrap(), &a, 1e-14));
        let m = randn_complex::<f64>(4, 2, 7);
        let s = DualMatrix::from_standard(a.standard().clone());
        let out = s.mul_complex(&m).unwrap();
        assert!(linalg::is_zero(out.infinitesimal()));
        assert_eq!(a.mul_complex(&m).unwrap(), a.mul(&DualMatrix::from_standard(m.clone())).unwrap());
        assert!(a.mul_complex(&randn_complex(3, 3, 1)).is_err());
    }

    #[test]
    fn adjoint_cases() {
        let i = DualMatrix::<f64>::identity(3);
        assert_eq!(i.adjoint(), i);
        let a = rand_dual(3, 4, 8);
        assert_eq!(a.adjoint().adjoint(), a);
        let a = rand_dual(3, 3, 9);
        let b = rand_dual(3, 3, 10);
        let lhs = a.mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
        assert!(close(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn fro_norm_dual_cases() {
        let i = linalg::identity::<f64>(2);
        let z = CMat::<f64>::zeros(2, 2);
        let r2 = 2f64.sqrt();
        let n = fro_norm_dual(&DualMatrix::new(i.clone(), z.clone()).unwrap());
        assert!((n.standard - r2).abs() < 1e-15 && n.infinitesimal == 0.0);
        let n = fro_norm_dual(&DualMatrix::new(z.clone(), i.clone()).unwrap());
        assert!(n.standard == 0.0 && (n.infinitesimal - r2).abs() < 1e-15);
        let n = fro_norm_dual(&DualMatrix::new(i.clone(), i.clone()).unwrap());
        assert!((n.standard - r2).abs() < 1e-15 && (n.infinitesimal - r2).abs() < 1e-15);
    }

    #[test]
    fn quasi_metric_cases() {
        let a = rand_dual(3, 3, 11);
        assert_eq!(quasi_metric(&a, &a).unwrap(), DualNumber::new(0.0, 0.0));

        let i = linalg::identity::<f64>(2);
        let z = CMat::<f64>::zeros(2, 2);
        let r2 = 2f64.sqrt();
        let b = DualMatrix::new(z.clone(), z.clone()).unwrap();
        let q = quasi_metric(&DualMatrix::new(z.clone(), i.clone()).unwrap(), &b).unwrap();
        assert!(q.standard == 0.0 && (q.infinitesimal - r2).abs() < 1e-15);
        let q = quasi_metric(&DualMatrix::new(i.clone(), i.clone()).unwrap(), &b).unwrap();
        assert!((q.standard - r2).abs() < 1e-15 && (q.infinitesimal - 1.0 / r2).abs() < 1e-15);
        assert!(quasi_metric(&a, &rand_dual(2, 3, 1)).is_err());
    }
}
