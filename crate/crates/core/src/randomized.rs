//! Randomized CCDSVD: sketch with a Gaussian test matrix, optionally sharpen
//! with power iterations re-orthonormalized by dual QR, project, and finish
//! with a small CCDSVD.

use serde::{Deserialize, Serialize};

use crate::decomp::{self, CcdsvdFactors, CcdsvdOptions};
use crate::dual::DualMatrix;
use crate::error::{DualSvdError, Result};
use crate::linalg;
use crate::scalar::Real;

/// Power-iteration convention, recorded in experiment reports.
pub const POWER_LOOP_CONVENTION: &str =
    "Ytilde_j = A^* Y_{j-1} -> dual QR -> Qtilde_j; Y_j = A Qtilde_j -> dual QR -> Q_j (Y_0 = A Omega)";

/// Whether the test matrix is plain complex or dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaKind {
    /// `Omega` complex, `A Omega = (A_s Omega, A_i Omega)`.
    Complex,
    /// `Omega = Omega_s + Omega_i eps` with independent parts.
    Dual,
}

/// Scalar field of the Gaussian test matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaField {
    /// Real when `A` is purely real, complex otherwise.
    #[default]
    Auto,
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedParams {
    /// Target rank `r >= 2`.
    pub rank: usize,
    /// Oversampling `p >= 2`; the sketch has `r + p` columns.
    pub oversampling: usize,
    /// Power-scheme exponent `q`.
    pub power_iters: usize,
    pub omega_kind: OmegaKind,
    pub omega_field: OmegaField,
    pub seed: u64,
    /// Return all `r + p` triplets instead of the leading `r`.
    pub keep_oversampled: bool,
    /// Existence tolerance for the inner CCDSVD, relative to `||B_i||_F`.
    pub exist_tol: f64,
    /// Relative rank-deficiency tolerance for the dual QR steps.
    pub qr_rel_tol: f64,
}

impl RandomizedParams {
    pub fn new(rank: usize, oversampling: usize, power_iters: usize, seed: u64) -> Self {
        Self {
            rank,
            oversampling,
            power_iters,
            omega_kind: OmegaKind::Complex,
            omega_field: OmegaField::Auto,
            seed,
            keep_oversampled: false,
            exist_tol: 1e-8,
            qr_rel_tol: 0.0,
        }
    }

    pub fn with_kind(mut self, kind: OmegaKind) -> Self {
        self.omega_kind = kind;
        self
    }

    pub fn with_field(mut self, field: OmegaField) -> Self {
        self.omega_field = field;
        self
    }

    pub fn sketch_width(&self) -> usize {
        self.rank + self.oversampling
    }

    /// Checks `r >= 2`, `p >= 2` and `r + p <= min(m, n)`.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.rank < 2 || self.oversampling < 2 {
            return Err(DualSvdError::InvalidParameter(format!(
                "need rank >= 2 and oversampling >= 2, got r={} p={}",
                self.rank, self.oversampling
            )));
        }
        if self.sketch_width() > m.min(n) {
            return Err(DualSvdError::InvalidParameter(format!(
                "r + p = {} exceeds min(m, n) = {}",
                self.sketch_width(),
                m.min(n)
            )));
        }
        if [self.exist_tol, self.qr_rel_tol].iter().any(|t| t.is_nan() || *t < 0.0) {
            return Err(DualSvdError::InvalidParameter("tolerances must be >= 0".into()));
        }
        Ok(())
    }
}

/// Intermediate quantities of one run, used by the error-bound evaluators.
#[derive(Debug, Clone)]
pub struct RccdsvdInternals<T: Real> {
    /// Dual orthonormal basis of the (refined) sketch, `m x l`.
    pub q: DualMatrix<T>,
    /// `Q^* A`, `l x n`.
    pub b: DualMatrix<T>,
    /// CCDSVD factors of `B`.
    pub inner: CcdsvdFactors<T>,
}

fn omega_seeds(seed: u64) -> (u64, u64) {
    (seed, seed ^ 0x9E37_79B9_7F4A_7C15)
}

/// The Gaussian test matrix (`n x l`).
pub fn test_matrix<T: Real>(n: usize, params: &RandomizedParams, a_is_real: bool) -> DualMatrix<T> {
    let l = params.sketch_width();
    let real = match params.omega_field {
        OmegaField::Auto => a_is_real,
        OmegaField::Real => true,
        OmegaField::Complex => false,
    };
    let draw = |seed| {
        if real {
            linalg::randn_real::<T>(n, l, seed)
        } else {
            linalg::randn_complex::<T>(n, l, seed)
        }
    };
    let (s_seed, i_seed) = omega_seeds(params.seed);
    match params.omega_kind {
        OmegaKind::Complex => DualMatrix::from_standard(draw(s_seed)),
        OmegaKind::Dual => DualMatrix::new(draw(s_seed), draw(i_seed)).expect("same shape"),
    }
}

/// `Y_0 = A Omega`.
pub fn sketch<T: Real>(a: &DualMatrix<T>, params: &RandomizedParams) -> Result<DualMatrix<T>> {
    let (m, n) = a.shape();
    params.validate(m, n)?;
    if linalg::is_zero(a.standard()) {
        return Err(DualSvdError::ZeroStandardPart);
    }
    let omega = test_matrix::<T>(n, params, a.is_real());
    match params.omega_kind {
        OmegaKind::Complex => a.mul_complex(omega.standard()),
        OmegaKind::Dual => a.mul(&omega),
    }
}

/// Randomized CCDSVD.
pub fn rccdsvd<T: Real>(a: &DualMatrix<T>, params: &RandomizedParams) -> Result<CcdsvdFactors<T>> {
    rccdsvd_with_internals(a, params).map(|(f, _)| f)
}

/// [`rccdsvd`] that also returns the sketch basis, the projected matrix and
/// the inner factors.
pub fn rccdsvd_with_internals<T: Real>(
    a: &DualMatrix<T>,
    params: &RandomizedParams,
) -> Result<(CcdsvdFactors<T>, RccdsvdInternals<T>)> {
    let qr_tol = T::lit(params.qr_rel_tol);
    let mut y = sketch(a, params)?;

    if params.power_iters > 0 {
        let a_adj = a.adjoint();
        for _ in 0..params.power_iters {
            let q_tilde = decomp::dual_qr_thin_with_tol(&a_adj.mul(&y)?, qr_tol)?.q;
            y = decomp::dual_qr_thin_with_tol(&a.mul(&q_tilde)?, qr_tol)?.q;
        }
    }

    let q = decomp::dual_qr_thin_with_tol(&y, qr_tol)?.q;
    let b = q.adjoint_mul(a)?;

    let opts = CcdsvdOptions {
        exist_tol: T::lit(params.exist_tol),
        truncate: (!params.keep_oversampled).then_some(params.rank),
        ..Default::default()
    };
    let inner = decomp::ccdsvd_with(&b, &opts)?;
    let u = q.mul(&inner.u)?;
    let factors = CcdsvdFactors { u, sigma: inner.sigma.clone(), v: inner.v.clone() };
    Ok((factors, RccdsvdInternals { q, b, inner }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::fro_norm_dual;
    use crate::linalg::{fro_norm, randn_complex, randn_real, CMat};

    fn shared_real(m: usize, n: usize, r: usize, seed: u64) -> DualMatrix<f64> {
        let b = randn_real::<f64>(m, r, seed);
        DualMatrix::new(
            linalg::matmul(&b, &randn_real(r, n, seed + 1)),
            linalg::matmul(&b, &randn_real(r, n, seed + 2)),
        )
        .unwrap()
    }

    fn decaying(m: usize, n: usize, seed: u64) -> DualMatrix<f64> {
        let (u, _) = linalg::qr_thin(&randn_complex::<f64>(m, n, seed)).unwrap();
        let (v, _) = linalg::qr_thin(&randn_complex::<f64>(n, n, seed + 1)).unwrap();
        let mut us = u;
        let sig: Vec<f64> = (0..n).map(|j| 1.0 / (1.0 + j as f64).powi(2)).collect();
        linalg::mul_columns(&mut us, &sig);
        DualMatrix::new(linalg::mul_adjoint(&us, &v), randn_complex(m, n, seed + 2)).unwrap()
    }

    fn rel_errors(a: &DualMatrix<f64>, f: &CcdsvdFactors<f64>) -> (f64, f64) {
        let rec = f.reconstruct();
        (
            fro_norm(&(a.standard() - rec.standard())) / fro_norm(a.standard()),
            fro_norm(&(a.infinitesimal() - rec.infinitesimal())) / fro_norm(a.infinitesimal()),
        )
    }

    #[test]
    fn parameter_validation() {
        let a = shared_real(20, 10, 3, 1);
        assert!(rccdsvd(&a, &RandomizedParams::new(6, 5, 1, 0)).is_err());
        assert!(rccdsvd(&a, &RandomizedParams::new(1, 5, 1, 0)).is_err());
        assert!(rccdsvd(&a, &RandomizedParams::new(3, 1, 1, 0)).is_err());
        let z = DualMatrix::new(CMat::<f64>::zeros(20, 10), randn_complex(20, 10, 1)).unwrap();
        assert!(matches!(
            rccdsvd(&z, &RandomizedParams::new(3, 2, 0, 0)),
            Err(DualSvdError::ZeroStandardPart)
        ));
    }

    #[test]
    fn sketch_of_identity_is_omega() {
        let a = DualMatrix::<f64>::identity(8);
        let params = RandomizedParams::new(3, 2, 0, 9).with_field(OmegaField::Complex);
        let y = sketch(&a, &params).unwrap();
        let omega = test_matrix::<f64>(8, &params, false);
        assert_eq!(y.standard(), omega.standard());
        assert!(linalg::is_zero(y.infinitesimal()));
        assert_eq!(sketch(&a, &params).unwrap(), y);
    }

    #[test]
    fn sketch_complex_kind_infinitesimal_is_exact() {
        let a = decaying(12, 9, 4);
        let params = RandomizedParams::new(3, 3, 0, 5);
        let y = sketch(&a, &params).unwrap();
        let omega = test_matrix::<f64>(9, &params, false);
        assert_eq!(y.infinitesimal(), &linalg::matmul(a.infinitesimal(), omega.standard()));
    }

    #[test]
    fn sketch_dual_kind_matches_expansion() {
        let a = decaying(12, 9, 6);
        let params = RandomizedParams::new(3, 3, 0, 7).with_kind(OmegaKind::Dual);
        let y = sketch(&a, &params).unwrap();
        let omega = test_matrix::<f64>(9, &params, false);
        let (os, oi) = (omega.standard(), omega.infinitesimal());
        let ys = linalg::matmul(a.standard(), os);
        let yi = linalg::matmul(a.infinitesimal(), os) + linalg::matmul(a.standard(), oi);
        assert!(fro_norm(&(y.standard() - ys)) < 1e-13);
        assert!(fro_norm(&(y.infinitesimal() - yi)) < 1e-13);
    }

    #[test]
    fn exact_rank_recovery_with_one_power_iteration() {
        let a = shared_real(120, 60, 12, 11);
        for kind in [OmegaKind::Complex, OmegaKind::Dual] {
            let params = RandomizedParams::new(12, 10, 1, 3).with_kind(kind);
            let (f, internals) = rccdsvd_with_internals(&a, &params).unwrap();
            assert_eq!(f.rank(), 12);
            let (e1, e2) = rel_errors(&a, &f);
            assert!(e1 <= 1e-10 && e2 <= 1e-9, "{kind:?}: {e1:e} {e2:e}");
            let qs = internals.q.standard();
            let resid = fro_norm(&linalg::project_out_cols(qs, a.standard()));
            assert!(resid <= 1e-10 * fro_norm(a.standard()));
            assert!(f.u_dual_unitarity_residual() <= 1e-10);
            assert!(linalg::orthonormality_residual(f.u.standard()) <= 1e-10);
            assert!(linalg::orthonormality_residual(f.v.standard()) <= 1e-10);
        }
    }

    #[test]
    fn range_containment_without_power_iterations() {
        let a = shared_real(80, 40, 6, 21);
        let params = RandomizedParams::new(6, 4, 0, 2);
        let y = sketch(&a, &params).unwrap();
        let q = decomp::dual_qr_thin(&y).unwrap().q;
        let resid = fro_norm(&linalg::project_out_cols(q.standard(), a.standard()));
        assert!(resid <= 1e-10 * fro_norm(a.standard()));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = decaying(30, 20, 8);
        let params = RandomizedParams::new(4, 3, 2, 77);
        assert_eq!(rccdsvd(&a, &params).unwrap(), rccdsvd(&a, &params).unwrap());
    }

    #[test]
    fn keep_oversampled_returns_full_sketch_rank() {
        let a = decaying(30, 20, 9);
        let mut params = RandomizedParams::new(4, 3, 1, 1);
        params.keep_oversampled = true;
        assert_eq!(rccdsvd(&a, &params).unwrap().rank(), 7);
        params.keep_oversampled = false;
        assert_eq!(rccdsvd(&a, &params).unwrap().rank(), 4);
    }

    #[test]
    fn power_iterations_reduce_mean_residual() {
        let a = decaying(60, 40, 12);
        let mean = |q: usize| -> f64 {
            (0..20)
                .map(|s| {
                    let f = rccdsvd(&a, &RandomizedParams::new(5, 2, q, 100 + s)).unwrap();
                    fro_norm_dual(&a.sub(&f.reconstruct()).unwrap()).standard
                })
                .sum::<f64>()
                / 20.0
        };
        let (m0, m1, m2) = (mean(0), mean(1), mean(2));
        assert!(m1 <= m0 * 1.05 && m2 <= m1 * 1.05, "{m0} {m1} {m2}");
        assert!(m2 <= m0);
    }
}
