//! Shared test helpers: a dense reference implementation of the state
//! contractions (independent of the sparse production path) and small
//! randomization utilities.

#![allow(dead_code)]

use locstab::state::{PureState, StateSet, SystemShape};
use locstab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn flat_index(shape: &SystemShape, labels: &[u32]) -> usize {
    let mut idx = 0usize;
    for (&l, &d) in labels.iter().zip(shape.dims()) {
        idx = idx * d as usize + l as usize;
    }
    idx
}

/// Full coefficient vector of a sparse state.
pub fn densify(state: &PureState) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); state.shape().total_dimension() as usize];
    for t in state.terms() {
        v[flat_index(state.shape(), &t.labels)] += t.coeff.value::<f64>();
    }
    v
}

pub fn dense_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Brute-force reduced coefficient: iterate the whole product basis.
pub fn dense_reduced(shape: &SystemShape, a: &[C64], b: &[C64], k: usize, x: u32, y: u32) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for labels in shape.basis_labels() {
        if labels[k] != x {
            continue;
        }
        let mut other = labels.clone();
        other[k] = y;
        acc += a[flat_index(shape, &labels)].conj() * b[flat_index(shape, &other)];
    }
    acc
}

/// All d^2 columns of the constraint row for the dense pair `(a, b)`.
pub fn dense_constraint_row(shape: &SystemShape, a: &[C64], b: &[C64], k: usize) -> Vec<C64> {
    let d = shape.dims()[k];
    let mut row = Vec::with_capacity((d * d) as usize);
    for x in 0..d {
        for y in 0..d {
            row.push(dense_reduced(shape, a, b, k, x, y));
        }
    }
    row
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Haar-ish random unitary: Gram-Schmidt of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| random_complex(rng)).collect())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj = dense_inner(&cols[i], &cols[j]);
            let (head, tail) = cols.split_at_mut(j);
            for (z, b) in tail[0].iter_mut().zip(&head[i]) {
                *z -= proj * b;
            }
        }
        let norm = dense_inner(&cols[j], &cols[j]).re.sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    // rows of U: U[a][b] = cols[b][a]
    (0..n)
        .map(|a| (0..n).map(|b| cols[b][a]).collect())
        .collect()
}

/// Densifies, normalizes, and mixes a set's states by a random unitary.
/// Orthogonality is preserved because the normalized states are an
/// orthonormal family.
pub fn mixed_dense_states(set: &StateSet, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let dense: Vec<Vec<C64>> = set
        .states()
        .iter()
        .map(|s| {
            let mut v = densify(s);
            let norm = dense_inner(&v, &v).re.sqrt();
            for z in v.iter_mut() {
                *z /= norm;
            }
            v
        })
        .collect();
    let n = dense.len();
    let u = random_unitary(rng, n);
    (0..n)
        .map(|a| {
            let mut out = vec![C64::new(0.0, 0.0); dense[0].len()];
            for (b, phi) in dense.iter().enumerate() {
                for (o, z) in out.iter_mut().zip(phi) {
                    *o += u[a][b] * z;
                }
            }
            out
        })
        .collect()
}
