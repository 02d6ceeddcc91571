#![allow(dead_code)]

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relact::array_model::ArraySpec;
use relact::linalg::RMat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_int(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-2i32..=2) as f64
}

/// System matrix of one of three flavours: sparse integers, dense reals, or
/// a nilpotent shift (repeated, defective eigenvalues).
pub fn random_a(rng: &mut ChaCha8Rng, n: usize) -> RMat {
    match rng.random_range(0..3) {
        0 => RMat::from_fn(n, n, |_, _| if rng.random_bool(0.5) { small_int(rng) } else { 0.0 }),
        1 => RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)),
        _ => RMat::from_fn(n, n, |i, j| if i == j + 1 { 1.0 } else { 0.0 }),
    }
}

/// `q × p` matrix whose columns are `e_tail - e_head` with `tail != head`.
pub fn random_unit_incidence(rng: &mut ChaCha8Rng, q: usize, p: usize) -> RMat {
    let mut g = RMat::zeros(q, p);
    for s in 0..p {
        let t = rng.random_range(0..q);
        let mut h = rng.random_range(0..q - 1);
        if h >= t {
            h += 1;
        }
        g[(t, s)] = 1.0;
        g[(h, s)] = -1.0;
    }
    g
}

/// Array with `n ≤ 3`, `q ≤ 4`, `p ≤ 5` and `B = unit incidence ⊗ b_σ`.
pub fn random_spec(rng: &mut ChaCha8Rng) -> ArraySpec {
    let n = rng.random_range(1..=3);
    let q = rng.random_range(2..=4);
    let p = rng.random_range(1..=5);
    let a = random_a(rng, n);
    let g = random_unit_incidence(rng, q, p);
    let integer = rng.random_bool(0.7);
    let blocks = (0..q)
        .map(|_| vec![DVector::zeros(n); p])
        .collect::<Vec<Vec<DVector<f64>>>>();
    let mut blocks = blocks;
    for s in 0..p {
        let b = DVector::from_fn(n, |_, _| if integer { small_int(rng) } else { rng.random_range(-1.0..1.0) });
        for i in 0..q {
            if g[(i, s)] != 0.0 {
                blocks[i][s] = &b * g[(i, s)];
            }
        }
    }
    ArraySpec::from_blocks(a, blocks)
}

/// Generators of a random cone in `R^d`; some come with their negation, so
/// the lineality space is usually nontrivial.
pub fn random_cone(rng: &mut ChaCha8Rng) -> RMat {
    let d = rng.random_range(2..=4);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let v = DVector::from_fn(d, |_, _| small_int(rng));
        cols.push(v.clone());
        if rng.random_bool(0.5) {
            cols.push(-v);
        }
    }
    // a triangle of directions whose sum is zero also spans a line space
    if rng.random_bool(0.3) {
        let u = DVector::from_fn(d, |_, _| small_int(rng));
        let w = DVector::from_fn(d, |_, _| small_int(rng));
        cols.push(u.clone());
        cols.push(w.clone());
        cols.push(-(u + w));
    }
    // shuffle so the structure is not positional
    for i in (1..cols.len()).rev() {
        let j = rng.random_range(0..=i);
        cols.swap(i, j);
    }
    RMat::from_columns(&cols)
}

pub fn pairs(q: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 1..=q {
        for l in k + 1..=q {
            out.push((k, l));
        }
    }
    out
}
