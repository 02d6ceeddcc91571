//! Distinct eigenstructure of `A*`.
//!
//! For every distinct eigenvalue `µ` of `A*` this module produces an
//! orthonormal eigenvector basis `V`, an orthonormal basis `U` of the
//! generalized eigenspace `null (A* - µI)^{n_µ}`, the restriction `A_µ` with
//! `A* U = U A_µ*`, and the nilpotent part `Λ = A_µ - conj(µ) I`.
//!
//! Components are ordered by decreasing real part; a real eigenvalue comes
//! before every non-real eigenvalue sharing its real part; remaining ties are
//! broken by `|Im µ|` ascending with the positive imaginary part first, so
//! conjugate pairs are adjacent.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, fro, null_space, singular_values, smallest_right, to_complex, Scalar, C64, CMat, RMat,
};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone)]
pub struct EigComponent {
    pub mu: C64,
    /// Algebraic multiplicity `n_κ`.
    pub alg_mult: usize,
    /// Geometric multiplicity `d_κ`.
    pub geo_mult: usize,
    /// `n × d_κ`, orthonormal columns spanning `null(A* - µI)`.
    pub v: CMat,
    /// `n × n_κ`, orthonormal columns spanning `null(A* - µI)^{n_κ}`.
    pub u: CMat,
    /// `n_κ × n_κ` with `A* U = U A_k*`.
    pub a_k: CMat,
    /// `A_k - conj(µ) I`, nilpotent.
    pub lambda: CMat,
    pub is_real: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderEntry {
    /// 1-based position in the ordering.
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub components: Vec<EigComponent>,
    pub order_certificate: Vec<OrderEntry>,
    /// Absolute clustering tolerance actually used.
    pub tol_eig: f64,
}

impl Spectrum {
    pub fn mus(&self) -> Vec<C64> {
        self.components.iter().map(|c| c.mu).collect()
    }

    /// Index of the component whose eigenvalue is the conjugate of component
    /// `k`, if `k` is non-real.
    pub fn conjugate_of(&self, k: usize) -> Option<usize> {
        let c = &self.components[k];
        if c.is_real {
            return None;
        }
        self.components
            .iter()
            .position(|o| !o.is_real && o.mu == c.mu.conj() && o.alg_mult == c.alg_mult)
    }
}

fn fmt_c(z: C64) -> String {
    format!("{:.9e}{:+.9e}j", z.re, z.im)
}

/// Clusters the eigenvalues of `a` into distinct values with multiplicities.
///
/// Plain single-linkage at `tol_eig` handles semisimple repeats. Defective
/// eigenvalues split into a ring of radius about `eps^{1/k}`; clusters closer
/// than that are merged when `(A - µ̄I)^k` has a `k`-dimensional numerical
/// null space at the merged mean `µ̄`.
fn cluster(a: &RMat, tol: &Tolerances) -> Result<(Vec<(C64, usize)>, f64)> {
    let n = a.nrows();
    let raw: Vec<C64> = eigenvalues(a);
    let radius = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol_eig = tol.eig * (1.0 + radius);

    // single linkage
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (raw[i] - raw[j]).norm() < tol_eig {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let mean = |g: &[usize]| g.iter().map(|&i| raw[i]).sum::<C64>() / g.len() as f64;

    // Jordan-aware merging
    let eps = f64::EPSILON;
    let ca = to_complex(a);
    loop {
        // grow a candidate set around each group, nearest groups first, and
        // keep the largest one whose mean passes the null-space test
        let mut best: Option<Vec<usize>> = None;
        let mut best_size = 1;
        for i in 0..groups.len() {
            let ci = mean(&groups[i]);
            let mut others: Vec<(f64, usize)> = (0..groups.len())
                .filter(|&j| j != i)
                .map(|j| ((mean(&groups[j]) - ci).norm(), j))
                .collect();
            others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let mut members = vec![i];
            for &(_, j) in &others {
                members.push(j);
                let pts: Vec<usize> = members.iter().flat_map(|&g| groups[g].iter().copied()).collect();
                let k = pts.len();
                let reach = 10.0 * eps.powf(1.0 / k as f64) * (1.0 + radius);
                let mu = mean(&pts);
                if k <= best_size || pts.iter().any(|&p| (raw[p] - mu).norm() >= reach) {
                    continue;
                }
                let shifted = &ca - CMat::identity(n, n) * mu;
                if generalized_basis_impl(&shifted, k, tol.rank, 0.0).is_some() {
                    best_size = k;
                    best = Some(members.clone());
                }
            }
        }
        let Some(mut members) = best else { break };
        members.sort_unstable();
        let merged: Vec<usize> = members.iter().flat_map(|&g| groups[g].iter().copied()).collect();
        for &g in members.iter().rev() {
            groups.remove(g);
        }
        groups.push(merged);
        for g in groups.iter_mut() {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
    }

    // ambiguity: raw eigenvalues from different clusters inside [tol, 2 tol)
    for gi in 0..groups.len() {
        for gj in (gi + 1)..groups.len() {
            for &i in &groups[gi] {
                for &j in &groups[gj] {
                    let gap = (raw[i] - raw[j]).norm();
                    if gap < 2.0 * tol_eig {
                        return Err(Error::IllConditionedSpectrum {
                            a: fmt_c(raw[i]),
                            b: fmt_c(raw[j]),
                            gap,
                            tol: tol_eig,
                        });
                    }
                }
            }
        }
    }

    let mut out: Vec<(C64, usize)> = groups
        .iter()
        .map(|g| {
            let mut mu = mean(g);
            if mu.im.abs() <= tol_eig {
                mu.im = 0.0;
            }
            (mu, g.len())
        })
        .collect();
    out.sort_by(|x, y| order_key(x.0, y.0, tol_eig));
    Ok((out, tol_eig))
}

fn order_key(a: C64, b: C64, tol: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if (a.re - b.re).abs() > tol {
        return b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal);
    }
    let a_real = a.im == 0.0;
    let b_real = b.im == 0.0;
    if a_real != b_real {
        return if a_real { Ordering::Less } else { Ordering::Greater };
    }
    let by_mag = a.im.abs().partial_cmp(&b.im.abs()).unwrap_or(Ordering::Equal);
    if by_mag != Ordering::Equal {
        return by_mag;
    }
    b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal)
}

fn slack_rel<T: Scalar>(m: &DMatrix<T>, tol_rank: f64, slack: f64, power: i32) -> f64 {
    let smax = singular_values(m).first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return tol_rank;
    }
    tol_rank.max((slack / smax).min(1.0).powi(power))
}

/// Orthonormal basis of `null(A* - µI)`, real when `µ` is real.
///
/// `slack` is the absolute width of the eigenvalue cluster `µ` stands for;
/// singular values below it count as zero along with those below
/// `tol_rank * σ_max`.
pub fn eigenvector_basis(a: &RMat, mu: C64, tol_rank: f64, slack: f64) -> Result<CMat> {
    let n = a.nrows();
    let v = if mu.im == 0.0 {
        let m = a.transpose() - RMat::identity(n, n) * mu.re;
        let rel = slack_rel(&m, tol_rank, slack, 1);
        to_complex(&null_space(&m, rel))
    } else {
        let m = to_complex(&a.transpose()) - CMat::identity(n, n) * mu;
        let rel = slack_rel(&m, tol_rank, slack, 1);
        null_space(&m, rel)
    };
    if v.ncols() == 0 {
        return Err(Error::InconsistentSpectrum {
            mu: fmt_c(mu),
            detail: "eigenvector null space is numerically empty".into(),
        });
    }
    Ok(v)
}

fn generalized_basis_impl<T: Scalar>(
    shifted: &DMatrix<T>,
    n_k: usize,
    tol_rank: f64,
    slack: f64,
) -> Option<DMatrix<T>> {
    let n = shifted.nrows();
    let smax = singular_values(shifted).first().copied().unwrap_or(0.0);
    // the cluster is at least as wide as the shifted matrix: all of it is null
    if smax == 0.0 || (slack >= smax && n == n_k) {
        return (n >= n_k).then(|| DMatrix::identity(n, n).columns(0, n_k).into_owned());
    }
    let mut power = DMatrix::<T>::identity(n, n);
    // log of the factor divided out of `power` so far
    let mut log_scale = 0.0;
    for r in 1..=n_k {
        power = shifted * power;
        let s = fro(&power);
        if s > 0.0 {
            power /= T::from_real(s);
            log_scale += s.ln();
        }
        // compare against ||shifted||^r rather than the power's own size
        let rel = slack_rel(shifted, tol_rank, slack, r as i32);
        let thr = rel * (r as f64 * smax.ln() - log_scale).exp();
        let small = singular_values(&power).iter().filter(|&&x| x <= thr).count();
        if s == 0.0 || small >= n_k {
            return Some(smallest_right(&power, n_k));
        }
    }
    None
}

/// Orthonormal basis of `null(A* - µI)^{n_k}`, real when `µ` is real.
///
/// Powers are accumulated one at a time with renormalisation, stopping as
/// soon as the numerical null space reaches dimension `n_k`.
pub fn generalized_basis(a: &RMat, mu: C64, n_k: usize, tol_rank: f64, slack: f64) -> Result<CMat> {
    let n = a.nrows();
    let u = if mu.im == 0.0 {
        let m = a.transpose() - RMat::identity(n, n) * mu.re;
        generalized_basis_impl(&m, n_k, tol_rank, slack).map(|u| to_complex(&u))
    } else {
        let m = to_complex(&a.transpose()) - CMat::identity(n, n) * mu;
        generalized_basis_impl(&m, n_k, tol_rank, slack)
    };
    u.ok_or_else(|| Error::InconsistentSpectrum {
        mu: fmt_c(mu),
        detail: format!("generalized eigenspace never reached dimension {n_k}"),
    })
}

/// `A_k` and `Λ` from an orthonormal basis `U` of an `A*`-invariant subspace.
pub fn restriction(a: &RMat, u: &CMat, mu: C64, tol_res: f64) -> Result<(CMat, CMat)> {
    let at = to_complex(&a.transpose());
    let ak_star = u.adjoint() * &at * u;
    let residual = fro(&(&at * u - u * &ak_star));
    if residual > tol_res {
        return Err(Error::InvarianceViolation { mu: fmt_c(mu), residual, tol: tol_res });
    }
    let nk = u.ncols();
    let a_k = ak_star.adjoint();
    let lambda = &a_k - CMat::identity(nk, nk) * mu.conj();
    let mut pw = CMat::identity(nk, nk);
    for _ in 0..nk {
        pw = &lambda * pw;
    }
    let bound = tol_res * (1.0 + fro(&lambda)).powi(nk as i32);
    if fro(&pw) > bound {
        return Err(Error::InconsistentSpectrum {
            mu: fmt_c(mu),
            detail: format!("nilpotent part has ||Λ^n|| = {:.3e}", fro(&pw)),
        });
    }
    Ok((a_k, lambda))
}

fn component(
    a: &RMat,
    mu: C64,
    n_k: usize,
    tol: &Tolerances,
    tol_eig: f64,
    tol_res: f64,
) -> Result<EigComponent> {
    let slack = tol_eig * n_k as f64;
    let v = eigenvector_basis(a, mu, tol.rank, slack)?;
    if v.ncols() > n_k {
        return Err(Error::InconsistentSpectrum {
            mu: fmt_c(mu),
            detail: format!("geometric multiplicity {} exceeds algebraic {}", v.ncols(), n_k),
        });
    }
    let u = generalized_basis(a, mu, n_k, tol.rank, slack)?;
    let (a_k, lambda) = restriction(a, &u, mu, tol_res)?;
    Ok(EigComponent {
        mu,
        alg_mult: n_k,
        geo_mult: v.ncols(),
        v,
        u,
        a_k,
        lambda,
        is_real: mu.im == 0.0,
    })
}

fn conjugate_component(c: &EigComponent) -> EigComponent {
    let conj = |m: &CMat| m.map(|z| z.conj());
    EigComponent {
        mu: c.mu.conj(),
        alg_mult: c.alg_mult,
        geo_mult: c.geo_mult,
        v: conj(&c.v),
        u: conj(&c.u),
        a_k: conj(&c.a_k),
        lambda: conj(&c.lambda),
        is_real: false,
    }
}

/// Distinct eigenvalues of `A*` with their invariant-subspace data.
pub fn distinct_eigenvalues(a: &RMat, tol: &Tolerances) -> Result<Spectrum> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension(format!("A must be square and nonempty, got {:?}", a.shape())));
    }
    let (clusters, tol_eig) = cluster(a, tol)?;
    let tol_res = tol.residual(fro(a));

    let upper: Vec<&(C64, usize)> = clusters.iter().filter(|(mu, _)| mu.im > 0.0).collect();
    let lower = clusters.iter().filter(|(mu, _)| mu.im < 0.0).count();
    if upper.len() != lower {
        return Err(Error::InconsistentSpectrum {
            mu: "-".into(),
            detail: "non-real eigenvalues are not closed under conjugation".into(),
        });
    }

    let mut components = Vec::with_capacity(clusters.len());
    for &(mu, n_k) in &clusters {
        if mu.im < 0.0 {
            continue;
        }
        let c = component(a, mu, n_k, tol, tol_eig, tol_res)?;
        if !c.is_real {
            let conj = conjugate_component(&c);
            components.push(c);
            components.push(conj);
        } else {
            components.push(c);
        }
    }
    components.sort_by(|x, y| order_key(x.mu, y.mu, tol_eig));
    let total: usize = components.iter().map(|c| c.alg_mult).sum();
    if total != a.nrows() {
        return Err(Error::InconsistentSpectrum {
            mu: "-".into(),
            detail: format!("multiplicities sum to {total}, expected {}", a.nrows()),
        });
    }
    let order_certificate = components
        .iter()
        .enumerate()
        .map(|(i, c)| OrderEntry { index: i + 1, re: c.mu.re, im: c.mu.im })
        .collect();
    Ok(Spectrum { components, order_certificate, tol_eig })
}
