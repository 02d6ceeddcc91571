//! Dense linear-algebra helpers shared by the analysis modules.
//!
//! Everything here works on `nalgebra` dynamic matrices and is generic over
//! real and complex scalars where that matters. Rank decisions are made by
//! singular-value thresholding relative to the largest singular value.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

/// Scalars the helpers accept: `f64` and `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    /// Singular values (descending) with left and right singular vectors;
    /// thin factors when `thin`, square ones otherwise.
    fn svd_parts(m: &DMatrix<Self>, thin: bool) -> Svd<Self>;
}

impl Scalar for f64 {
    fn svd_parts(m: &DMatrix<f64>, thin: bool) -> Svd<f64> {
        faer_svd(m, thin, |x| *x)
    }
}

impl Scalar for C64 {
    fn svd_parts(m: &DMatrix<C64>, thin: bool) -> Svd<C64> {
        faer_svd(m, thin, |z| z.re)
    }
}

pub struct Svd<T: nalgebra::Scalar> {
    pub values: Vec<f64>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

// nalgebra's bidiagonal SVD can return wrong factors for some
// rank-deficient inputs; faer's does not.
fn faer_svd<T>(m: &DMatrix<T>, thin: bool, re: fn(&T) -> f64) -> Svd<T>
where
    T: nalgebra::Scalar + faer::traits::ComplexField + Copy,
{
    let (r, c) = m.shape();
    let fm = faer::Mat::<T>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = if thin { fm.thin_svd() } else { fm.svd() }.expect("SVD did not converge");
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    Svd {
        values: (0..s.nrows()).map(|i| re(&s[i])).collect(),
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    }
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

/// Largest absolute imaginary part of any entry.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()))
}

pub fn identity(n: usize) -> RMat {
    RMat::identity(n, n)
}

/// Singular values sorted in descending order, together with the matching
/// right singular vectors as columns. For wide inputs the trailing values
/// are zero so that a full set of right singular vectors is returned.
pub(crate) fn svd_right<T: Scalar>(m: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let (r, c) = m.shape();
    if c == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    if r == 0 {
        return (vec![0.0; c], DMatrix::identity(c, c));
    }
    let svd = T::svd_parts(m, r >= c);
    let mut sv = svd.values;
    sv.resize(c, 0.0);
    (sv, svd.v)
}

/// Singular values (descending) and matching left singular vectors.
pub(crate) fn svd_left<T: Scalar>(m: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (Vec::new(), DMatrix::zeros(r, 0));
    }
    let svd = T::svd_parts(m, true);
    (svd.values, svd.u)
}

pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    T::svd_parts(m, true).values
}

/// Eigenvalues of a real square matrix, in no particular order.
pub fn eigenvalues(a: &RMat) -> Vec<C64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)])
        .eigenvalues()
        .expect("eigenvalue iteration did not converge")
}

/// Minimum-norm least-squares solution of `m x = b`, discarding singular
/// values at or below `tol_rel * sigma_max`.
pub fn lstsq(m: &RMat, b: &DVector<f64>, tol_rel: f64) -> DVector<f64> {
    let c = m.ncols();
    if c == 0 || m.nrows() == 0 {
        return DVector::zeros(c);
    }
    let svd = f64::svd_parts(m, true);
    let smax = svd.values.first().copied().unwrap_or(0.0);
    let utb = svd.u.transpose() * b;
    let mut x = DVector::zeros(c);
    for (i, &s) in svd.values.iter().enumerate() {
        if s > tol_rel * smax && s > 0.0 {
            x += svd.v.column(i) * (utb[i] / s);
        }
    }
    x
}

/// Pseudo-inverse of a real matrix with a relative singular-value cut.
pub fn pseudo_inverse(m: &RMat, tol_rel: f64) -> RMat {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return RMat::zeros(c, r);
    }
    let svd = f64::svd_parts(m, true);
    let smax = svd.values.first().copied().unwrap_or(0.0);
    let mut out = RMat::zeros(c, r);
    for (i, &s) in svd.values.iter().enumerate() {
        if s > tol_rel * smax && s > 0.0 {
            out += svd.v.column(i) * svd.u.column(i).transpose() / s;
        }
    }
    out
}

fn count_above(sv: &[f64], tol_rel: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rel * smax).count()
}

/// Numerical rank with threshold `tol_rel * sigma_max`.
pub fn rank<T: Scalar>(m: &DMatrix<T>, tol_rel: f64) -> usize {
    count_above(&singular_values(m), tol_rel)
}

/// Orthonormal basis of the null space of `m`.
pub fn null_space<T: Scalar>(m: &DMatrix<T>, tol_rel: f64) -> DMatrix<T> {
    let c = m.ncols();
    let (sv, v) = svd_right(m);
    let rank = count_above(&sv, tol_rel);
    let mut out = DMatrix::<T>::zeros(c, c - rank);
    for (j, col) in (rank..c).enumerate() {
        out.set_column(j, &v.column(col));
    }
    out
}

/// Orthonormal basis of the column space of `m`.
pub fn column_space<T: Scalar>(m: &DMatrix<T>, tol_rel: f64) -> DMatrix<T> {
    let (sv, u) = svd_left(m);
    let rank = count_above(&sv, tol_rel);
    u.columns(0, rank).into_owned()
}

/// Right singular vectors attached to the `k` smallest singular values.
pub(crate) fn smallest_right<T: Scalar>(m: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let (_, v) = svd_right(m);
    let c = v.ncols();
    v.columns(c - k, k).into_owned()
}

/// Horizontal concatenation.
pub fn hcat<T: Scalar>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::<T>::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Frobenius norm.
pub fn fro<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|z| z.modulus_squared()).sum::<f64>().sqrt()
}

pub fn vec_norm<T: Scalar>(v: &DVector<T>) -> f64 {
    v.iter().map(|z| z.modulus_squared()).sum::<f64>().sqrt()
}

/// Rescales every column to unit norm and drops columns whose norm is at
/// most `floor` or at most `tol_rel` times the largest column norm. Column
/// scaling preserves both range and cone, and keeps Krylov-type matrices
/// well conditioned.
pub fn equilibrate_columns<T: Scalar>(m: &DMatrix<T>, tol_rel: f64, floor: f64) -> DMatrix<T> {
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let cut = floor.max(tol_rel * top);
    let keep: Vec<usize> = (0..m.ncols()).filter(|&j| norms[j] > cut).collect();
    let mut out = DMatrix::<T>::zeros(m.nrows(), keep.len());
    for (k, &j) in keep.iter().enumerate() {
        let scale = T::from_real(1.0 / norms[j]);
        out.set_column(k, &(m.column(j) * scale));
    }
    out
}

/// True when `range(big) ⊇ range(target)`.
///
/// Columns of `big` with norm at most `floor` count as zero. Both matrices
/// are equilibrated first; the verdict compares `rank([big | target])`
/// against `rank(big)` under a common threshold.
pub fn range_includes<T: Scalar>(
    big: &DMatrix<T>,
    target: &DMatrix<T>,
    tol_rel: f64,
    floor: f64,
) -> bool {
    assert_eq!(big.nrows(), target.nrows(), "row mismatch in range test");
    let t = equilibrate_columns(target, tol_rel, 0.0);
    if t.ncols() == 0 {
        return true;
    }
    let g = equilibrate_columns(big, tol_rel, floor);
    if g.ncols() == 0 {
        return false;
    }
    let aug = hcat(&[&g, &t]);
    let sv_aug = singular_values(&aug);
    let thr = tol_rel * sv_aug[0];
    let r_aug = sv_aug.iter().filter(|&&s| s > thr).count();
    let r_g = singular_values(&g).iter().filter(|&&s| s > thr).count();
    r_aug == r_g
}

/// Orthonormal basis of `range [B, A B, …, A^{steps-1} B]`.
///
/// Built by block Arnoldi with two Gram–Schmidt passes per step, which avoids
/// the ill-conditioning of the explicit Krylov stack. A new direction is kept
/// when its norm after orthogonalisation exceeds `tol_rel * ||A||`; columns of
/// `B` at or below `floor` are ignored.
pub fn krylov_basis<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>, steps: usize, tol_rel: f64, floor: f64) -> DMatrix<T> {
    let start = equilibrate_columns(b, tol_rel, floor);
    let mut basis = column_space(&start, tol_rel);
    let mut last = basis.clone();
    let scale = fro(a);
    for _ in 1..steps {
        if last.ncols() == 0 || scale == 0.0 {
            break;
        }
        let mut z = a * &last;
        for _ in 0..2 {
            let proj = &basis * (basis.adjoint() * &z);
            z -= proj;
        }
        let (sv, u) = svd_left(&z);
        let keep = sv.iter().filter(|&&s| s > tol_rel * scale).count();
        last = u.columns(0, keep).into_owned();
        basis = hcat(&[&basis, &last]);
    }
    basis
}

/// Block vector `(e_k - e_l) ⊗ I_d` with 0-based vertex indices.
pub fn pair_selector(q: usize, d: usize, k: usize, l: usize) -> RMat {
    let mut e = RMat::zeros(q, 1);
    e[(k, 0)] = 1.0;
    e[(l, 0)] = -1.0;
    e.kronecker(&identity(d))
}
