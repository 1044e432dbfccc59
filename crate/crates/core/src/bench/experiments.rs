use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{re_infinitesimal, re_standard};
use crate::decomp::ccdsvd;
use crate::dual::DualMatrix;
use crate::error::{DualSvdError, Result};
use crate::linalg;
use crate::randomized::{rccdsvd, OmegaKind, RandomizedParams};

use super::{derive_seed, gen_independent_dual, gen_lowrank_dual, read_pgm, Field, Method, ReportRow};

/// Random rank-`m/5` dual matrices of size `2m x m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1Config {
    pub m_list: Vec<usize>,
    pub field: Field,
    pub p: usize,
    pub q: usize,
    pub trials: usize,
    pub seed: u64,
    /// Draw `A_i` from independent factors so the CCDSVD does not exist.
    pub defect_demo: bool,
}

impl Default for Exp1Config {
    fn default() -> Self {
        Self {
            m_list: vec![200, 400, 800],
            field: Field::Real,
            p: 10,
            q: 1,
            trials: 20,
            seed: 0,
            defect_demo: false,
        }
    }
}

impl Exp1Config {
    pub fn rank_for(m: usize) -> usize {
        m / 5
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(DualSvdError::InvalidParameter("trials must be >= 1".into()));
        }
        if self.m_list.is_empty() {
            return Err(DualSvdError::InvalidParameter("empty m list".into()));
        }
        for &m in &self.m_list {
            RandomizedParams::new(Self::rank_for(m), self.p, self.q, 0)
                .validate(2 * m, m)
                .map_err(|e| DualSvdError::InvalidParameter(format!("m = {m}: {e}")))?;
        }
        Ok(())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// One row per `(m, trial, method)`.
pub fn run_exp1_trials(cfg: &Exp1Config) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &m in &cfg.m_list {
        let r = Exp1Config::rank_for(m);
        for t in 0..cfg.trials {
            let seed = derive_seed(derive_seed(cfg.seed, m as u64), t as u64);
            let a = if cfg.defect_demo {
                gen_independent_dual(2 * m, m, r, cfg.field, seed)?
            } else {
                gen_lowrank_dual(2 * m, m, r, cfg.field, seed)?
            };

            let (f, time_s) = timed(|| ccdsvd(&a));
            let f = f?;
            rows.push(ReportRow {
                method: Method::Ccdsvd,
                size: m,
                r,
                p: 0,
                q: 0,
                re1: re_standard(&a, &f)?,
                re2: re_infinitesimal(&a, &f)?,
                time_s,
                seed,
            });

            let omega_seed = derive_seed(seed, 99);
            for (method, kind) in [(Method::Rccdsvd, OmegaKind::Complex), (Method::Rccdsvd2, OmegaKind::Dual)] {
                let params = RandomizedParams::new(r, cfg.p, cfg.q, omega_seed).with_kind(kind);
                let (f, time_s) = timed(|| rccdsvd(&a, &params));
                let f = f?;
                rows.push(ReportRow {
                    method,
                    size: m,
                    r,
                    p: cfg.p,
                    q: cfg.q,
                    re1: re_standard(&a, &f)?,
                    re2: re_infinitesimal(&a, &f)?,
                    time_s,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Means over trials, one row per `(size, method)` in first-seen order; the
/// seed column carries `seed`.
pub fn aggregate_means(rows: &[ReportRow], seed: u64) -> Vec<ReportRow> {
    let mut out: Vec<(ReportRow, usize)> = Vec::new();
    for row in rows {
        match out.iter_mut().find(|(o, _)| {
            o.method == row.method && o.size == row.size && o.r == row.r && o.p == row.p && o.q == row.q
        }) {
            Some((acc, n)) => {
                acc.re1 += row.re1;
                acc.re2 += row.re2;
                acc.time_s += row.time_s;
                *n += 1;
            }
            None => out.push((ReportRow { seed, ..*row }, 1)),
        }
    }
    out.into_iter()
        .map(|(mut acc, n)| {
            let n = n as f64;
            acc.re1 /= n;
            acc.re2 /= n;
            acc.time_s /= n;
            acc
        })
        .collect()
}

/// Trial means per `(m, method)`.
pub fn run_exp1(cfg: &Exp1Config) -> Result<Vec<ReportRow>> {
    Ok(aggregate_means(&run_exp1_trials(cfg)?, cfg.seed))
}

/// Power-scheme sweep over a DFT'd image pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Config {
    pub image_std_path: PathBuf,
    pub image_inf_path: PathBuf,
    pub r_list: Vec<usize>,
    pub p: usize,
    pub q_list: Vec<usize>,
    pub seed: u64,
}

/// Builds `A = dft2(img_std) + dft2(img_inf) eps` from the two images and
/// runs [`run_exp2_on`].
pub fn run_exp2(cfg: &Exp2Config) -> Result<Vec<ReportRow>> {
    let std_img = read_pgm(&cfg.image_std_path)?;
    let inf_img = read_pgm(&cfg.image_inf_path)?;
    if std_img.shape() != inf_img.shape() {
        return Err(DualSvdError::ShapeMismatch {
            op: "exp2 image pair",
            left: std_img.shape(),
            right: inf_img.shape(),
        });
    }
    let a = DualMatrix::new(linalg::dft2(&std_img), linalg::dft2(&inf_img))?;
    run_exp2_on(&a, &cfg.r_list, cfg.p, &cfg.q_list, cfg.seed)
}

/// RCCDSVD over `r_list x q_list`; all `q` values for one `r` share a test
/// matrix seed.
pub fn run_exp2_on(
    a: &DualMatrix<f64>,
    r_list: &[usize],
    p: usize,
    q_list: &[usize],
    seed: u64,
) -> Result<Vec<ReportRow>> {
    if r_list.is_empty() || q_list.is_empty() {
        return Err(DualSvdError::InvalidParameter("empty r or q list".into()));
    }
    let (m, n) = a.shape();
    for &r in r_list {
        RandomizedParams::new(r, p, 0, 0).validate(m, n)?;
    }
    let mut rows = Vec::with_capacity(r_list.len() * q_list.len());
    for (ri, &r) in r_list.iter().enumerate() {
        let r_seed = derive_seed(seed, ri as u64);
        for &q in q_list {
            let params = RandomizedParams::new(r, p, q, r_seed);
            let (f, time_s) = timed(|| rccdsvd(a, &params));
            let f = f?;
            rows.push(ReportRow {
                method: Method::Rccdsvd,
                size: m,
                r,
                p,
                q,
                re1: re_standard(a, &f)?,
                re2: re_infinitesimal(a, &f)?,
                time_s,
                seed: r_seed,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::synthetic_image;

    #[test]
    fn exp1_small_run_is_accurate_and_deterministic() {
        let cfg = Exp1Config { m_list: vec![40], trials: 2, seed: 5, ..Default::default() };
        let rows = run_exp1_trials(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert!(row.re1 <= 1e-10 && row.re2 <= 1e-9, "{row:?}");
            assert!(row.time_s >= 0.0);
        }
        let again = run_exp1_trials(&cfg).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!((a.re1, a.re2, a.seed), (b.re1, b.re2, b.seed));
        }
        let means = run_exp1(&cfg).unwrap();
        assert_eq!(means.len(), 3);
        assert_eq!(means[0].method, Method::Ccdsvd);
        assert!((means[0].re1 - (rows[0].re1 + rows[3].re1) / 2.0).abs() < 1e-30);
    }

    #[test]
    fn exp1_config_errors() {
        assert!(run_exp1(&Exp1Config { trials: 0, ..Default::default() }).is_err());
        assert!(run_exp1(&Exp1Config { m_list: vec![5], ..Default::default() }).is_err());
        let demo = Exp1Config { m_list: vec![30], trials: 1, defect_demo: true, ..Default::default() };
        assert!(matches!(run_exp1(&demo), Err(DualSvdError::ExistenceViolated { .. })));
    }

    #[test]
    fn identical_parts_give_identical_curves() {
        let img = synthetic_image(24, 3);
        let a = DualMatrix::new(linalg::dft2(&img), linalg::dft2(&img)).unwrap();
        let rows = run_exp2_on(&a, &[2, 4, 6], 2, &[0, 1], 7).unwrap();
        assert_eq!(rows.len(), 6);
        for row in rows {
            assert!((row.re1 - row.re2).abs() <= 1e-8, "{row:?}");
        }
    }

    #[test]
    fn exp2_rejects_oversized_rank() {
        let img = synthetic_image(16, 1);
        let a = DualMatrix::new(linalg::dft2(&img), linalg::dft2(&img)).unwrap();
        assert!(run_exp2_on(&a, &[14], 4, &[0], 0).is_err());
    }
}
