//! Concise compact dual SVD (CCDSVD) and the thin dual QR factorization.
//!
//! For `A = A_s + A_i eps` with compact SVD `A_s = U_s Sigma V_s^*`, the
//! factorization `A = U Sigma V^*` with a real positive diagonal `Sigma`
//! exists iff `(I - U_s U_s^*) A_i (I - V_s V_s^*) = O`. The dual parts are
//!
//! ```text
//! U_i = (I - U_s U_s^*) A_i V_s Sigma^-1 + U_s P
//! V_i = A_i^* U_s Sigma^-1 - V_s Sigma P^* Sigma^-1
//! ```
//!
//! for any skew-Hermitian `P` (zero by default). `U` always has dual unitary
//! columns. `V` does only when `Re diag(U_s^* A_i V_s) = 0`, since a real
//! `Sigma` cannot absorb that part of `A_i`; see [`CcdsvdFactors::v_dual_unitarity_residual`].

use crate::dual::DualMatrix;
use crate::error::{DualSvdError, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{Real, C};

/// `A ≈ U diag(sigma) V^*` with dual `U` (`m x r`), dual `V` (`n x r`).
#[derive(Debug, Clone, PartialEq)]
pub struct CcdsvdFactors<T: Real> {
    pub u: DualMatrix<T>,
    /// Positive, non-increasing.
    pub sigma: Vec<T>,
    pub v: DualMatrix<T>,
}

impl<T: Real> CcdsvdFactors<T> {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U Sigma V^*` in dual arithmetic:
    /// `(U_s Sigma V_s^*, U_i Sigma V_s^* + U_s Sigma V_i^*)`.
    pub fn reconstruct(&self) -> DualMatrix<T> {
        let mut us = self.u.standard().clone();
        linalg::mul_columns(&mut us, &self.sigma);
        let mut ui = self.u.infinitesimal().clone();
        linalg::mul_columns(&mut ui, &self.sigma);
        let standard = linalg::mul_adjoint(&us, self.v.standard());
        let infinitesimal = linalg::mul_adjoint(&ui, self.v.standard())
            + linalg::mul_adjoint(&us, self.v.infinitesimal());
        DualMatrix::new(standard, infinitesimal).expect("factor shapes agree")
    }

    /// Leading `k` triplets.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.rank());
        Self { u: self.u.columns(k), sigma: self.sigma[..k].to_vec(), v: self.v.columns(k) }
    }

    /// `||U_s^* U_i + U_i^* U_s||_F` (zero for dual unitary columns).
    pub fn u_dual_unitarity_residual(&self) -> T {
        dual_unitarity_residual(&self.u)
    }

    /// `||V_s^* V_i + V_i^* V_s||_F`.
    pub fn v_dual_unitarity_residual(&self) -> T {
        dual_unitarity_residual(&self.v)
    }
}

/// `||X_s^* X_i + X_i^* X_s||_F`.
pub fn dual_unitarity_residual<T: Real>(x: &DualMatrix<T>) -> T {
    let g = linalg::adjoint_mul(x.standard(), x.infinitesimal());
    linalg::fro_norm(&(&g + g.adjoint()))
}

/// `||(I_m - U_s U_s^*) A_i (I_n - V_s V_s^*)||_F`.
pub fn existence_defect<T: Real>(a: &DualMatrix<T>, u_s: &CMat<T>, v_s: &CMat<T>) -> Result<T> {
    let (m, n) = a.shape();
    if u_s.nrows() != m || v_s.nrows() != n || u_s.ncols() != v_s.ncols() {
        return Err(DualSvdError::ShapeMismatch {
            op: "existence_defect",
            left: (u_s.nrows(), u_s.ncols()),
            right: (v_s.nrows(), v_s.ncols()),
        });
    }
    let x = linalg::project_out_cols(u_s, a.infinitesimal());
    let x = linalg::project_out_rows(&x, v_s);
    Ok(linalg::fro_norm(&x))
}

/// Knobs for [`ccdsvd_with`].
#[derive(Debug, Clone)]
pub struct CcdsvdOptions<T: Real> {
    /// Relative rank tolerance for the compact SVD of `A_s`; `None` means
    /// `max(m, n) * eps`.
    pub rank_tol: Option<T>,
    /// The existence defect may not exceed `exist_tol * ||A_i||_F`.
    pub exist_tol: T,
    /// Skew-Hermitian `r x r` gauge parameter; `None` means zero.
    pub skew: Option<CMat<T>>,
    /// Truncate the compact SVD to this many triplets after the existence
    /// check and before forming the dual parts.
    pub truncate: Option<usize>,
}

impl<T: Real> Default for CcdsvdOptions<T> {
    fn default() -> Self {
        Self { rank_tol: None, exist_tol: T::lit(1e-8), skew: None, truncate: None }
    }
}

/// CCDSVD with default options.
pub fn ccdsvd<T: Real>(a: &DualMatrix<T>) -> Result<CcdsvdFactors<T>> {
    ccdsvd_with(a, &CcdsvdOptions::default())
}

pub fn ccdsvd_with<T: Real>(a: &DualMatrix<T>, opts: &CcdsvdOptions<T>) -> Result<CcdsvdFactors<T>> {
    let mut svd = linalg::svd_compact(a.standard(), opts.rank_tol)?;
    if svd.rank == 0 {
        return Err(DualSvdError::ZeroStandardPart);
    }

    let defect = existence_defect(a, &svd.u, &svd.v)?;
    let threshold = opts.exist_tol * linalg::fro_norm(a.infinitesimal());
    if defect > threshold {
        return Err(DualSvdError::ExistenceViolated {
            defect: defect.as_f64(),
            threshold: threshold.as_f64(),
        });
    }

    if let Some(k) = opts.truncate {
        if k == 0 {
            return Err(DualSvdError::InvalidParameter("truncation rank must be >= 1".into()));
        }
        svd = svd.truncated(k);
    }
    let r = svd.rank;

    if let Some(p) = &opts.skew {
        if p.shape() != (r, r) {
            return Err(DualSvdError::ShapeMismatch {
                op: "ccdsvd skew parameter",
                left: (p.nrows(), p.ncols()),
                right: (r, r),
            });
        }
        let residual = linalg::fro_norm(&(p + p.adjoint()));
        let tol = T::lit(1e-12).max(T::lit(10.0) * T::eps()) * linalg::fro_norm(p).max(T::one());
        if residual > tol {
            return Err(DualSvdError::NotSkewHermitian { residual: residual.as_f64() });
        }
    }

    let a_i = a.infinitesimal();
    let sigma = &svd.sigma;

    // U_i = (I - U_s U_s^*) A_i V_s Sigma^-1 + U_s P
    let mut u_i = linalg::project_out_cols(&svd.u, &linalg::matmul(a_i, &svd.v));
    linalg::div_columns(&mut u_i, sigma);

    // V_i = A_i^* U_s Sigma^-1 - V_s Sigma P^* Sigma^-1
    let mut v_i = linalg::adjoint_mul(a_i, &svd.u);
    linalg::div_columns(&mut v_i, sigma);

    if let Some(p) = &opts.skew {
        u_i += linalg::matmul(&svd.u, p);
        // (Sigma P^* Sigma^-1)[j, k] = sigma_j conj(P[k, j]) / sigma_k
        let g = CMat::<T>::from_fn(r, r, |j, k| p[(k, j)].conj().scale(sigma[j] / sigma[k]));
        v_i -= linalg::matmul(&svd.v, &g);
    }

    Ok(CcdsvdFactors {
        u: DualMatrix::new(svd.u, u_i)?,
        sigma: svd.sigma,
        v: DualMatrix::new(svd.v, v_i)?,
    })
}

/// Thin dual QR: `A = Q R` with `Q` (`m x n`) having dual unitary columns and
/// `R` (`n x n`) upper triangular in both parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DualQr<T: Real> {
    pub q: DualMatrix<T>,
    pub r: DualMatrix<T>,
}

/// [`dual_qr_thin_with_tol`] rejecting only exactly-zero diagonal entries.
pub fn dual_qr_thin<T: Real>(a: &DualMatrix<T>) -> Result<DualQr<T>> {
    dual_qr_thin_with_tol(a, T::zero())
}

/// Thin dual QR.
///
/// With `(Q_s, R_s) = qr_thin(A_s)` and `M = Q_s^* A_i R_s^-1`, `M` is split
/// into a skew-Hermitian part `S` (strict lower part of `M`, its negated
/// adjoint above the diagonal, and the imaginary part of `diag(M)`) and an
/// upper triangular remainder `T` with real diagonal. Then `R_i = T R_s` and
/// `Q_i = (I - Q_s Q_s^*) A_i R_s^-1 + Q_s S`.
///
/// Fails with [`DualSvdError::RankDeficientStandardPart`] when some
/// `|R_s[k, k]| <= rel_tol * max_j |R_s[j, j]|` or is exactly zero.
pub fn dual_qr_thin_with_tol<T: Real>(a: &DualMatrix<T>, rel_tol: T) -> Result<DualQr<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(DualSvdError::InvalidParameter(format!(
            "dual_qr_thin needs rows >= cols, got {m}x{n}"
        )));
    }
    let (q_s, r_s) = linalg::qr_thin(a.standard())?;

    let max_diag = (0..n).map(|k| r_s[(k, k)].re).fold(T::zero(), |acc, d| acc.max(d));
    for k in 0..n {
        let d = r_s[(k, k)].re;
        if d.partial_cmp(&(rel_tol * max_diag)) != Some(std::cmp::Ordering::Greater) || !d.is_finite() {
            return Err(DualSvdError::RankDeficientStandardPart { index: k, value: d.as_f64() });
        }
    }

    let a_i = a.infinitesimal();
    if linalg::is_zero(a_i) {
        return Ok(DualQr {
            q: DualMatrix::from_standard(q_s),
            r: DualMatrix::from_standard(r_s),
        });
    }

    let mixed = linalg::solve_upper_right(&linalg::adjoint_mul(&q_s, a_i), &r_s);
    let mut skew = CMat::<T>::zeros(n, n);
    let mut upper = CMat::<T>::zeros(n, n);
    for k in 0..n {
        let d = mixed[(k, k)];
        skew[(k, k)] = C::new(T::zero(), d.im);
        upper[(k, k)] = C::new(d.re, T::zero());
        for j in (k + 1)..n {
            let lower = mixed[(j, k)];
            skew[(j, k)] = lower;
            skew[(k, j)] = -lower.conj();
            upper[(k, j)] = mixed[(k, j)] + lower.conj();
        }
    }

    let mut r_i = linalg::matmul(&upper, &r_s);
    for k in 0..n {
        for j in (k + 1)..n {
            r_i[(j, k)] = C::new(T::zero(), T::zero());
        }
    }
    let q_i = linalg::solve_upper_right(&linalg::project_out_cols(&q_s, a_i), &r_s)
        + linalg::matmul(&q_s, &skew);

    Ok(DualQr { q: DualMatrix::new(q_s, q_i)?, r: DualMatrix::new(r_s, r_i)? })
}
