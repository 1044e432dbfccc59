//! Complex dense kernels the dual algorithms are built on.
//!
//! Products go through real gemm on split real/imaginary parts (nalgebra
//! dispatches `f32`/`f64` products to `matrixmultiply`). SVD and QR use
//! nalgebra's Householder-based routines, taking the real code path whenever
//! the input has no imaginary component.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{DualSvdError, Result};
use crate::scalar::{Real, C};

/// Dense column-major complex matrix.
pub type CMat<T> = DMatrix<C<T>>;

/// Dense column-major real matrix.
pub type RMat<T> = DMatrix<T>;

#[inline]
pub(crate) fn shape<T: nalgebra::Scalar>(m: &DMatrix<T>) -> (usize, usize) {
    (m.nrows(), m.ncols())
}

pub(crate) fn ensure_same_shape<A, B>(op: &'static str, a: &DMatrix<A>, b: &DMatrix<B>) -> Result<()>
where
    A: nalgebra::Scalar,
    B: nalgebra::Scalar,
{
    if shape(a) != shape(b) {
        return Err(DualSvdError::ShapeMismatch {
            op,
            left: shape(a),
            right: shape(b),
        });
    }
    Ok(())
}

/// True when every entry has an exactly zero imaginary part.
pub fn is_real<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.im.is_zero())
}

/// True when every entry is exactly zero.
pub fn is_zero<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.re.is_zero() && z.im.is_zero())
}

pub fn real_part<T: Real>(m: &CMat<T>) -> RMat<T> {
    m.map(|z| z.re)
}

pub fn imag_part<T: Real>(m: &CMat<T>) -> RMat<T> {
    m.map(|z| z.im)
}

pub fn from_real<T: Real>(m: &RMat<T>) -> CMat<T> {
    m.map(|x| C::new(x, T::zero()))
}

pub fn from_parts<T: Real>(re: &RMat<T>, im: &RMat<T>) -> CMat<T> {
    re.zip_map(im, |a, b| C::new(a, b))
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

pub fn fro_norm_sq<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.re * z.re + z.im * z.im)
}

/// Frobenius norm, scaled to avoid overflow on large entries.
pub fn fro_norm<T: Real>(m: &CMat<T>) -> T {
    let scale = m.iter().fold(T::zero(), |acc, z| acc.max(z.re.abs()).max(z.im.abs()));
    if scale.is_zero() {
        return T::zero();
    }
    let sum = m.iter().fold(T::zero(), |acc, z| {
        let (a, b) = (z.re / scale, z.im / scale);
        acc + a * a + b * b
    });
    scale * sum.sqrt()
}

/// `<X, Y> = Re(trace(X^* Y))`, the real inner product on complex matrices.
pub fn real_inner<T: Real>(x: &CMat<T>, y: &CMat<T>) -> Result<T> {
    ensure_same_shape("real_inner", x, y)?;
    Ok(x.iter()
        .zip(y.iter())
        .fold(T::zero(), |acc, (a, b)| acc + a.re * b.re + a.im * b.im))
}

/// Complex product `A B`.
///
/// # Panics
/// If the inner dimensions disagree.
pub fn matmul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    assert_eq!(
        a.ncols(),
        b.nrows(),
        "matmul: inner dimensions {}x{} * {}x{}",
        a.nrows(),
        a.ncols(),
        b.nrows(),
        b.ncols()
    );
    let (a_real, b_real) = (is_real(a), is_real(b));
    let ar = real_part(a);
    let br = real_part(b);
    match (a_real, b_real) {
        (true, true) => from_real(&(&ar * &br)),
        (true, false) => {
            let bi = imag_part(b);
            from_parts(&(&ar * &br), &(&ar * &bi))
        }
        (false, true) => {
            let ai = imag_part(a);
            from_parts(&(&ar * &br), &(&ai * &br))
        }
        (false, false) => {
            let ai = imag_part(a);
            let bi = imag_part(b);
            let re = &ar * &br - &ai * &bi;
            let im = &ar * &bi + &ai * &br;
            from_parts(&re, &im)
        }
    }
}

/// `A^* B`.
pub fn adjoint_mul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    matmul(&a.adjoint(), b)
}

/// `A B^*`.
pub fn mul_adjoint<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    matmul(a, &b.adjoint())
}

/// `(I - Q Q^*) X` for `Q` with orthonormal columns.
pub fn project_out_cols<T: Real>(q: &CMat<T>, x: &CMat<T>) -> CMat<T> {
    x - matmul(q, &adjoint_mul(q, x))
}

/// `X (I - V V^*)` for `V` with orthonormal columns.
pub fn project_out_rows<T: Real>(x: &CMat<T>, v: &CMat<T>) -> CMat<T> {
    x - mul_adjoint(&matmul(x, v), v)
}

/// Scales column `k` of `m` by `1 / d[k]`.
pub fn div_columns<T: Real>(m: &mut CMat<T>, d: &[T]) {
    assert_eq!(m.ncols(), d.len());
    for (mut col, &s) in m.column_iter_mut().zip(d) {
        col.iter_mut().for_each(|z| *z = z.unscale(s));
    }
}

/// Scales column `k` of `m` by `d[k]`.
pub fn mul_columns<T: Real>(m: &mut CMat<T>, d: &[T]) {
    assert_eq!(m.ncols(), d.len());
    for (mut col, &s) in m.column_iter_mut().zip(d) {
        col.iter_mut().for_each(|z| *z = z.scale(s));
    }
}

/// Solves `Z R = X` for `Z` by column-wise substitution, `R` upper triangular.
pub fn solve_upper_right<T: Real>(x: &CMat<T>, r: &CMat<T>) -> CMat<T> {
    let n = r.nrows();
    assert_eq!(r.ncols(), n);
    assert_eq!(x.ncols(), n);
    let mut z = CMat::<T>::zeros(x.nrows(), n);
    for j in 0..n {
        let mut col = x.column(j).clone_owned();
        for k in 0..j {
            let rkj = r[(k, j)];
            if !rkj.is_zero() {
                col -= z.column(k) * rkj;
            }
        }
        let d = r[(j, j)];
        col.iter_mut().for_each(|e| *e /= d);
        z.set_column(j, &col);
    }
    z
}

/// `||Q^* Q - I||_F`.
pub fn orthonormality_residual<T: Real>(q: &CMat<T>) -> T {
    fro_norm(&(adjoint_mul(q, q) - identity::<T>(q.ncols())))
}

/// Result of [`svd_compact`]: `M ≈ U diag(sigma) V^*` restricted to the
/// numerical rank.
#[derive(Debug, Clone)]
pub struct CompactSvd<T: Real> {
    pub u: CMat<T>,
    /// Strictly positive, non-increasing.
    pub sigma: Vec<T>,
    pub v: CMat<T>,
    pub rank: usize,
}

impl<T: Real> CompactSvd<T> {
    pub fn reconstruct(&self) -> CMat<T> {
        let mut us = self.u.clone();
        mul_columns(&mut us, &self.sigma);
        mul_adjoint(&us, &self.v)
    }

    /// Keeps the leading `k` triplets (or all of them if `k >= rank`).
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.rank);
        Self {
            u: self.u.columns(0, k).into_owned(),
            sigma: self.sigma[..k].to_vec(),
            v: self.v.columns(0, k).into_owned(),
            rank: k,
        }
    }
}

/// Default relative rank tolerance `max(m, n) * eps`.
pub fn default_rank_tol<T: Real>(m: usize, n: usize) -> T {
    T::lit(m.max(n) as f64) * T::eps()
}

struct FullSvd<T: Real> {
    u: CMat<T>,
    sigma: Vec<T>,
    v: CMat<T>,
}

/// Thin SVD with singular values sorted non-increasing.
fn svd_sorted<T: Real>(m: &CMat<T>) -> Result<FullSvd<T>> {
    let k = m.nrows().min(m.ncols());
    let max_iter = 200 * k.max(1) + 1000;
    let (u, sigma, v_t) = if is_real(m) {
        let svd = real_part(m)
            .try_svd(true, true, T::eps(), max_iter)
            .ok_or(DualSvdError::SvdNotConverged)?;
        (
            from_real(&svd.u.expect("u requested")),
            svd.singular_values,
            from_real(&svd.v_t.expect("v_t requested")),
        )
    } else {
        let svd = m.clone().try_svd(true, true, T::eps(), max_iter);
        match svd {
            Some(svd) if svd_residual_ok(m, &svd) => {
                (svd.u.expect("u requested"), svd.singular_values, svd.v_t.expect("v_t requested"))
            }
            // nalgebra's complex bidiagonal SVD occasionally returns wrong
            // vectors on rank-deficient input; Jacobi is slow but reliable.
            _ => {
                let (u, sigma, v) = jacobi_svd(m)?;
                (u, DVector::from_vec(sigma), v.adjoint())
            }
        }
    };

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut us = CMat::<T>::zeros(m.nrows(), k);
    let mut vs = CMat::<T>::zeros(m.ncols(), k);
    let mut sv = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &v_t.row(src).adjoint());
        sv.push(sigma[src]);
    }
    Ok(FullSvd { u: us, sigma: sv, v: vs })
}

fn svd_residual_ok<T: Real>(m: &CMat<T>, svd: &nalgebra::SVD<C<T>, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let (Some(u), Some(v_t)) = (&svd.u, &svd.v_t) else {
        return false;
    };
    let sigma: Vec<T> = svd.singular_values.iter().copied().collect();
    let mut us = u.clone();
    mul_columns(&mut us, &sigma);
    let resid = fro_norm(&(matmul(&us, v_t) - m));
    let tol = T::lit(64.0 * m.nrows().max(m.ncols()) as f64) * T::eps() * fro_norm(m);
    resid <= tol
}

/// One-sided (Hestenes) Jacobi SVD: `m = U diag(sigma) V^*` with `U`
/// `rows x k`, `V` `cols x k`, `k = min(rows, cols)`, unsorted.
fn jacobi_svd<T: Real>(m: &CMat<T>) -> Result<(CMat<T>, Vec<T>, CMat<T>)> {
    if m.nrows() < m.ncols() {
        let (v, sigma, u) = jacobi_svd(&m.adjoint())?;
        return Ok((u, sigma, v));
    }
    let (rows, n) = shape(m);
    let mut a = m.clone();
    let mut v = identity::<T>(n);
    let tol = T::lit(rows as f64) * T::eps();
    // columns at rounding level are treated as null and never rotated
    let floor = (T::eps() * fro_norm(m)).powi(2);
    let mut converged = false;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = nalgebra::ComplexField::modulus(gamma);
                if g == T::zero() || alpha.min(beta) <= floor || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g).conj();
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase;
                        mat[(i, p)] = xp.scale(c) - xq.scale(s);
                        mat[(i, q)] = xp.scale(s) + xq.scale(c);
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DualSvdError::SvdNotConverged);
    }
    let sigma: Vec<T> = (0..n).map(|j| a.column(j).norm()).collect();
    let mut u = CMat::<T>::zeros(rows, n);
    let mut missing = Vec::new();
    for (j, &s) in sigma.iter().enumerate() {
        if s > T::zero() && s * s > floor {
            u.set_column(j, &a.column(j).unscale(s));
        } else {
            missing.push(j);
        }
    }
    // Columns for null singular values: orthonormal completion, each time
    // from the standard basis vector least covered by the columns so far.
    let one = C::new(T::one(), T::zero());
    for j in missing {
        let mut best: Option<(T, CMat<T>)> = None;
        for e in 0..rows {
            let mut x = CMat::<T>::zeros(rows, 1);
            x[(e, 0)] = one;
            for _ in 0..2 {
                let proj = u.adjoint() * &x;
                x -= &u * proj;
            }
            let nx = x.norm();
            if best.as_ref().is_none_or(|(b, _)| nx > *b) {
                best = Some((nx, x));
            }
        }
        match best {
            Some((nx, x)) if nx > T::lit(1e-3) => u.set_column(j, &x.column(0).unscale(nx)),
            _ => return Err(DualSvdError::SvdNotConverged),
        }
    }
    Ok((u, sigma, v))
}

/// All `min(m, n)` singular values of `m`, non-increasing.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Result<Vec<T>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    if !is_real(m) {
        return Ok(svd_sorted(m)?.sigma);
    }
    let sv: DVector<T> = real_part(m)
        .try_svd(false, false, T::eps(), 200 * m.ncols().min(m.nrows()) + 1000)
        .ok_or(DualSvdError::SvdNotConverged)?
        .singular_values;
    let mut v: Vec<T> = sv.iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}

/// Compact SVD keeping the singular values above `rank_tol * sigma_max`.
///
/// `rank_tol = None` uses [`default_rank_tol`]. An all-zero input yields a
/// rank-0 result with empty factors.
pub fn svd_compact<T: Real>(m: &CMat<T>, rank_tol: Option<T>) -> Result<CompactSvd<T>> {
    let (rows, cols) = shape(m);
    if let Some(tol) = rank_tol {
        if tol.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()) {
            return Err(DualSvdError::InvalidParameter(format!("rank_tol must be >= 0, got {tol}")));
        }
    }
    if rows == 0 || cols == 0 || is_zero(m) {
        return Ok(CompactSvd {
            u: CMat::zeros(rows, 0),
            sigma: Vec::new(),
            v: CMat::zeros(cols, 0),
            rank: 0,
        });
    }
    let full = svd_sorted(m)?;
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols)) * full.sigma[0];
    let rank = full.sigma.iter().take_while(|&&s| s > tol && s > T::zero()).count();
    Ok(CompactSvd {
        u: full.u.columns(0, rank).into_owned(),
        sigma: full.sigma[..rank].to_vec(),
        v: full.v.columns(0, rank).into_owned(),
        rank,
    })
}

/// Thin Householder QR `M = Q R` for `m >= n`, normalized so that `R` has a
/// real non-negative diagonal.
pub fn qr_thin<T: Real>(m: &CMat<T>) -> Result<(CMat<T>, CMat<T>)> {
    let (rows, cols) = shape(m);
    if rows < cols {
        return Err(DualSvdError::InvalidParameter(format!(
            "qr_thin needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let (mut q, mut r) = if is_real(m) {
        let (q, r) = real_part(m).qr().unpack();
        (from_real(&q), from_real(&r))
    } else {
        m.clone().qr().unpack()
    };
    for k in 0..cols {
        let d = r[(k, k)];
        let modulus = nalgebra::ComplexField::modulus(d);
        if modulus > T::zero() {
            let phase = d.unscale(modulus);
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
            let cphase = phase.conj();
            r.row_mut(k).iter_mut().for_each(|z| *z *= cphase);
            r[(k, k)] = C::new(modulus, T::zero());
        }
        for i in (k + 1)..cols {
            r[(i, k)] = C::zero();
        }
    }
    Ok((q, r))
}

/// Orthonormal `W` (`m x (m - r)`) such that `[Q W]` is unitary.
pub fn unitary_complement<T: Real>(q: &CMat<T>) -> Result<CMat<T>> {
    let (m, r) = shape(q);
    if r > m {
        return Err(DualSvdError::InvalidParameter(format!(
            "unitary_complement: {r} columns exceed {m} rows"
        )));
    }
    let tol = T::lit(1e-10).max(T::lit(1e3) * T::eps());
    let resid = orthonormality_residual(q);
    if resid > tol {
        return Err(DualSvdError::InvalidParameter(format!(
            "unitary_complement: columns not orthonormal (residual {resid})"
        )));
    }
    if r == m {
        return Ok(CMat::zeros(m, 0));
    }
    // The complement spans the unit-eigenvalue eigenspace of I - Q Q^*.
    let projector = identity::<T>(m) - mul_adjoint(q, q);
    let full = svd_sorted(&projector)?;
    let w = full.u.columns(0, m - r).into_owned();
    // One Gram-Schmidt sweep against Q followed by re-orthonormalization.
    let w = project_out_cols(q, &w);
    let (w, _) = qr_thin(&w)?;
    Ok(w)
}

/// `m x n` matrix with i.i.d. entries `(g1 + i g2) / sqrt(2)`, `g1, g2`
/// standard normal, deterministic in `seed`.
pub fn randn_complex<T: Real>(m: usize, n: usize, seed: u64) -> CMat<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(m, n, |_, _| {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        C::new(T::lit(g1 * s), T::lit(g2 * s))
    })
}

/// `m x n` matrix with i.i.d. standard normal real entries, stored complex.
pub fn randn_real<T: Real>(m: usize, n: usize, seed: u64) -> CMat<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMat::from_fn(m, n, |_, _| {
        let g: f64 = rng.sample(StandardNormal);
        C::new(T::lit(g), T::zero())
    })
}

fn twiddles<T: Real>(n: usize) -> Vec<C<T>> {
    (0..n)
        .map(|t| {
            let theta = -2.0 * std::f64::consts::PI * (t as f64) / (n as f64);
            C::new(T::lit(theta.cos()), T::lit(theta.sin()))
        })
        .collect()
}

/// Unnormalized 2-D DFT of a complex matrix:
/// `F[j, k] = sum_{a, b} X[a, b] exp(-2 pi i (a j / m + b k / n))`.
///
/// Direct separable evaluation, `O(mn(m + n))`.
pub fn dft2_complex<T: Real>(x: &CMat<T>) -> CMat<T> {
    let (m, n) = shape(x);
    let wn = twiddles::<T>(n);
    let wm = twiddles::<T>(m);
    let mut rows_done = CMat::<T>::zeros(m, n);
    for k in 0..n {
        for b in 0..n {
            let w = wn[(b * k) % n];
            for a in 0..m {
                rows_done[(a, k)] += x[(a, b)] * w;
            }
        }
    }
    let mut out = CMat::<T>::zeros(m, n);
    for k in 0..n {
        for j in 0..m {
            let mut acc = C::zero();
            for a in 0..m {
                acc += rows_done[(a, k)] * wm[(a * j) % m];
            }
            out[(j, k)] = acc;
        }
    }
    out
}

/// Unnormalized 2-D DFT of a real image.
pub fn dft2<T: Real>(x: &RMat<T>) -> CMat<T> {
    dft2_complex(&from_real(x))
}
