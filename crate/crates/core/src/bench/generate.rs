use crate::dual::DualMatrix;
use crate::error::{DualSvdError, Result};
use crate::linalg::{self, CMat};

use super::{derive_seed, Field};

fn draw(rows: usize, cols: usize, field: Field, seed: u64) -> CMat<f64> {
    match field {
        Field::Real => linalg::randn_real(rows, cols, seed),
        Field::Complex => linalg::randn_complex(rows, cols, seed),
    }
}

fn check(rows: usize, cols: usize, r: usize) -> Result<()> {
    if r == 0 || r > rows.min(cols) {
        return Err(DualSvdError::InvalidParameter(format!(
            "rank {r} must be in 1..={} for a {rows}x{cols} matrix",
            rows.min(cols)
        )));
    }
    Ok(())
}

/// `A_s = B C`, `A_i = B C'` with Gaussian `B` (`rows x r`) shared and `C`,
/// `C'` (`r x cols`) independent, so the CCDSVD existence condition holds.
pub fn gen_lowrank_dual(rows: usize, cols: usize, r: usize, field: Field, seed: u64) -> Result<DualMatrix<f64>> {
    check(rows, cols, r)?;
    let b = draw(rows, r, field, derive_seed(seed, 0));
    let c = draw(r, cols, field, derive_seed(seed, 1));
    let c2 = draw(r, cols, field, derive_seed(seed, 2));
    DualMatrix::new(linalg::matmul(&b, &c), linalg::matmul(&b, &c2))
}

/// Like [`gen_lowrank_dual`] but `A_i = B' C'` with an independent `B'`, so
/// the existence condition generically fails.
pub fn gen_independent_dual(rows: usize, cols: usize, r: usize, field: Field, seed: u64) -> Result<DualMatrix<f64>> {
    check(rows, cols, r)?;
    let b = draw(rows, r, field, derive_seed(seed, 0));
    let c = draw(r, cols, field, derive_seed(seed, 1));
    let c2 = draw(r, cols, field, derive_seed(seed, 2));
    let b2 = draw(rows, r, field, derive_seed(seed, 3));
    DualMatrix::new(linalg::matmul(&b, &c), linalg::matmul(&b2, &c2))
}
