//! Relative reconstruction errors and evaluators for the expected-error
//! bounds of the randomized factorization (`q = 0`).

use serde::{Deserialize, Serialize};

use crate::decomp::CcdsvdFactors;
use crate::dual::{fro_norm_dual, DualMatrix};
use crate::error::{DualSvdError, Result};
use crate::linalg;
use crate::randomized::{rccdsvd, RandomizedParams, RccdsvdInternals};
use crate::scalar::Real;

/// `||A_s - U_s Sigma V_s^*||_F / ||A_s||_F`.
pub fn re_standard<T: Real>(a: &DualMatrix<T>, f: &CcdsvdFactors<T>) -> Result<T> {
    let norm = linalg::fro_norm(a.standard());
    if norm.is_zero() {
        return Err(DualSvdError::ZeroStandardPart);
    }
    let rec = f.reconstruct();
    Ok(linalg::fro_norm(&(a.standard() - rec.standard())) / norm)
}

/// `||A_i - U_i Sigma V_s^* - U_s Sigma V_i^*||_F / ||A_i||_F`.
pub fn re_infinitesimal<T: Real>(a: &DualMatrix<T>, f: &CcdsvdFactors<T>) -> Result<T> {
    let norm = linalg::fro_norm(a.infinitesimal());
    if norm.is_zero() {
        return Err(DualSvdError::ZeroInfinitesimalPart);
    }
    let rec = f.reconstruct();
    Ok(linalg::fro_norm(&(a.infinitesimal() - rec.infinitesimal())) / norm)
}

/// Measured left-hand side of the average Frobenius-error bound next to its
/// right-hand-side terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `||E_s||_F`, the standard part of the dual Frobenius norm of `A - U Sigma V^*`.
    pub lhs_standard: f64,
    /// `<E_s, E_i> / ||E_s||_F`, the eps part of that norm. Signed.
    pub lhs_eps: f64,
    /// `(1 + r/(p-1))^{1/2} (sum_{j>r} sigma_j^2)^{1/2}`.
    pub rhs_deterministic: f64,
    /// Coefficient of `sqrt(eps)`: `sqrt(2 <E_s, A_i>)`, or 0 when the inner
    /// product is negative.
    pub rhs_eps_coeff: f64,
    pub satisfied_standard: bool,
    /// Set when `<E_s, A_i> < 0` so the `sqrt(eps)` term was not real.
    pub eps_inner_negative: bool,
}

fn check_rp(r: usize, p: usize) -> Result<()> {
    if r < 2 || p < 2 {
        return Err(DualSvdError::InvalidParameter(format!(
            "bound needs r >= 2 and p >= 2, got r={r} p={p}"
        )));
    }
    Ok(())
}

/// `(1 + r/(p-1))^{1/2} (sum_{j>r} sigma_j^2)^{1/2}` for non-increasing `sigma`.
pub fn deterministic_term(sigma: &[f64], r: usize, p: usize) -> f64 {
    let tail: f64 = sigma.iter().skip(r).map(|s| s * s).sum();
    (1.0 + r as f64 / (p as f64 - 1.0)).sqrt() * tail.sqrt()
}

/// Evaluates both sides of the Frobenius-error bound for one factorization.
pub fn thm42_bound<T: Real>(
    a: &DualMatrix<T>,
    f: &CcdsvdFactors<T>,
    r: usize,
    p: usize,
) -> Result<BoundReport> {
    check_rp(r, p)?;
    let sigma: Vec<f64> = linalg::singular_values(a.standard())?.iter().map(|s| s.as_f64()).collect();
    let rhs_deterministic = deterministic_term(&sigma, r, p);
    single_report(a, f, rhs_deterministic)
}

fn single_report<T: Real>(a: &DualMatrix<T>, f: &CcdsvdFactors<T>, rhs: f64) -> Result<BoundReport> {
    let err = a.sub(&f.reconstruct())?;
    let norm = fro_norm_dual(&err);
    let inner = linalg::real_inner(err.standard(), a.infinitesimal())?.as_f64();
    let lhs_standard = norm.standard.as_f64();
    Ok(BoundReport {
        lhs_standard,
        lhs_eps: norm.infinitesimal.as_f64(),
        rhs_deterministic: rhs,
        rhs_eps_coeff: if inner >= 0.0 { (2.0 * inner).sqrt() } else { 0.0 },
        satisfied_standard: lhs_standard <= rhs,
        eps_inner_negative: inner < 0.0,
    })
}

/// Monte Carlo estimate of the expectation: runs `trials` sketches (`q = 0`)
/// with seeds `base_seed + t` and reports sample means of the measured terms.
pub fn thm42_monte_carlo<T: Real>(
    a: &DualMatrix<T>,
    params: &RandomizedParams,
    trials: usize,
) -> Result<BoundReport> {
    check_rp(params.rank, params.oversampling)?;
    if params.power_iters != 0 {
        return Err(DualSvdError::InvalidParameter("the bound is stated for q = 0".into()));
    }
    if trials == 0 {
        return Err(DualSvdError::InvalidParameter("trials must be >= 1".into()));
    }
    let sigma: Vec<f64> = linalg::singular_values(a.standard())?.iter().map(|s| s.as_f64()).collect();
    let rhs = deterministic_term(&sigma, params.rank, params.oversampling);
    let mut acc = BoundReport {
        lhs_standard: 0.0,
        lhs_eps: 0.0,
        rhs_deterministic: rhs,
        rhs_eps_coeff: 0.0,
        satisfied_standard: false,
        eps_inner_negative: false,
    };
    for t in 0..trials {
        let mut trial = params.clone();
        trial.seed = params.seed.wrapping_add(t as u64);
        let f = rccdsvd(a, &trial)?;
        let rep = single_report(a, &f, rhs)?;
        acc.lhs_standard += rep.lhs_standard;
        acc.lhs_eps += rep.lhs_eps;
        acc.rhs_eps_coeff += rep.rhs_eps_coeff;
        acc.eps_inner_negative |= rep.eps_inner_negative;
    }
    let n = trials as f64;
    acc.lhs_standard /= n;
    acc.lhs_eps /= n;
    acc.rhs_eps_coeff /= n;
    acc.satisfied_standard = acc.lhs_standard <= rhs;
    Ok(acc)
}

/// Terms bounding `||E_i||_F^2` in the average quasi-metric error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm44Terms {
    /// `||Ubar_hat^* B_i V_hat||_F` with `Ubar_hat`, `V_hat` the unitary
    /// complements of the inner left factor and of `V_s`.
    pub term_b: f64,
    /// `||Q_i||_F ||E_s||_F`.
    pub term_q: f64,
    /// `||Qbar_i^*||_F ||E_s||_F` with the minimum-norm
    /// `Qbar_i^* = -Qbar_s^* U_i U_s^*`.
    pub term_qbar: f64,
    /// Measured `||E_i||_F^2`.
    pub e_i_sq: f64,
}

impl Thm44Terms {
    pub fn rhs_sq(&self) -> f64 {
        self.term_b.powi(2) + self.term_q.powi(2) + self.term_qbar.powi(2)
    }

    /// `||E_i||^2 <= term_b^2 + term_q^2 + term_qbar^2 + slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.e_i_sq <= self.rhs_sq() + slack
    }

    /// Coefficient of `sqrt(eps)` in the quasi-metric bound.
    pub fn eps_coeff(&self) -> f64 {
        self.rhs_sq().sqrt()
    }
}

/// Evaluates the quasi-metric bound terms for a run captured with
/// [`crate::randomized::rccdsvd_with_internals`].
pub fn thm44_terms<T: Real>(
    a: &DualMatrix<T>,
    f: &CcdsvdFactors<T>,
    internals: &RccdsvdInternals<T>,
) -> Result<Thm44Terms> {
    let (m, n) = a.shape();
    let q = &internals.q;
    let b = &internals.b;
    let l = q.ncols();
    if q.nrows() != m || b.shape() != (l, n) || internals.inner.u.nrows() != l || f.u.nrows() != m {
        return Err(DualSvdError::ShapeMismatch {
            op: "thm44_terms",
            left: (m, n),
            right: (q.nrows(), b.ncols()),
        });
    }

    let err = a.sub(&f.reconstruct())?;
    let e_s_norm = linalg::fro_norm(err.standard());
    let e_i_norm = linalg::fro_norm(err.infinitesimal());

    let ubar_hat = linalg::unitary_complement(internals.inner.u.standard())?;
    let v_hat = linalg::unitary_complement(f.v.standard())?;
    let projected = linalg::matmul(&linalg::adjoint_mul(&ubar_hat, b.infinitesimal()), &v_hat);
    let term_b = linalg::fro_norm(&projected);

    let term_q = linalg::fro_norm(q.infinitesimal()) * e_s_norm;

    let qbar_s = linalg::unitary_complement(q.standard())?;
    let qbar_i_adj =
        linalg::mul_adjoint(&linalg::adjoint_mul(&qbar_s, f.u.infinitesimal()), f.u.standard());
    let term_qbar = linalg::fro_norm(&qbar_i_adj) * e_s_norm;

    Ok(Thm44Terms {
        term_b: term_b.as_f64(),
        term_q: term_q.as_f64(),
        term_qbar: term_qbar.as_f64(),
        e_i_sq: e_i_norm.as_f64().powi(2),
    })
}
