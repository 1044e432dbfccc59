//! Dual complex matrix factorizations: the concise compact dual SVD, its
//! randomized variant, dual Frobenius norm / quasi-metric error measures, and
//! evaluators for the expected-error bounds of the randomized method.
//!
//! The numerical core is generic over the real scalar ([`Real`]: `f32` or
//! `f64`); the aliases below fix it to one of those.
//!
//! ```
//! use dualsvd::{ccdsvd, rccdsvd, DualMatrix64, RandomizedParams};
//! use dualsvd::bench::{gen_lowrank_dual, Field};
//!
//! let a: DualMatrix64 = gen_lowrank_dual(80, 40, 8, Field::Real, 1).unwrap();
//! let exact = ccdsvd(&a).unwrap();
//! let approx = rccdsvd(&a, &RandomizedParams::new(8, 4, 1, 7)).unwrap();
//! assert_eq!(exact.rank(), 8);
//! assert_eq!(approx.rank(), 8);
//! ```

pub mod bench;
pub mod bounds;
pub mod decomp;
pub mod dual;
pub mod error;
pub mod linalg;
pub mod randomized;
pub mod scalar;

pub use bounds::{re_infinitesimal, re_standard, thm42_bound, thm42_monte_carlo, thm44_terms, BoundReport, Thm44Terms};
pub use decomp::{ccdsvd, ccdsvd_with, dual_qr_thin, existence_defect, CcdsvdFactors, CcdsvdOptions, DualQr};
pub use dual::{fro_norm_dual, quasi_metric, DualMatrix, DualNumber};
pub use error::{DualSvdError, Result};
pub use linalg::{CMat, CompactSvd, RMat};
pub use randomized::{rccdsvd, rccdsvd_with_internals, sketch, OmegaField, OmegaKind, RandomizedParams};
pub use scalar::Real;

pub type DualNumber64 = DualNumber<f64>;
pub type DualNumber32 = DualNumber<f32>;
pub type DualMatrix64 = DualMatrix<f64>;
pub type DualMatrix32 = DualMatrix<f32>;
pub type CcdsvdFactors64 = CcdsvdFactors<f64>;
pub type CcdsvdFactors32 = CcdsvdFactors<f32>;
pub type CMat64 = CMat<f64>;
pub type CMat32 = CMat<f32>;
