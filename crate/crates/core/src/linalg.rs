//! Small dense complex linear algebra: one-sided Jacobi SVD, row
//! reduction with column pivoting, and Gram-Schmidt helpers.
//!
//! The matrices here are tiny (at most a few hundred rows by `d^2`
//! columns), so plain `Vec`-backed routines are enough.

use num_complex::Complex;

use crate::scalar::{norm_sqr, Real};

pub type CVec<T> = Vec<Complex<T>>;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `<a, b> = sum conj(a_i) b_i`.
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub fn vec_norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + norm_sqr(*x)).sqrt()
}

/// Result of [`one_sided_jacobi_svd`]: singular values and matching right
/// singular vectors (columns of a unitary V), unsorted.
#[derive(Debug, Clone)]
pub struct SvdOutcome<T: Real> {
    pub singular_values: Vec<T>,
    pub right_vectors: Vec<CVec<T>>,
    pub converged: bool,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 64;

/// Applies the unitary pair rotation `(p, q) -> (c*p - s*g*q, s*p + c*g*q)`
/// to two columns of `cols`.
fn rotate_columns<T: Real>(cols: &mut [CVec<T>], p: usize, q: usize, c: T, s: T, g: Complex<T>) {
    let (cc, sc) = (Complex::new(c, T::zero()), Complex::new(s, T::zero()));
    for i in 0..cols[p].len() {
        let xp = cols[p][i];
        let xq = cols[q][i];
        cols[p][i] = cc * xp - sc * g * xq;
        cols[q][i] = sc * xp + cc * g * xq;
    }
}

/// One-sided Jacobi SVD of the matrix whose columns are `columns`
/// (length-`m` vectors). Rotations orthogonalize column pairs until the
/// implicit Gram matrix is diagonal; column norms are then the singular
/// values and the accumulated rotations form V.
pub fn one_sided_jacobi_svd<T: Real>(mut columns: Vec<CVec<T>>) -> SvdOutcome<T> {
    let ncols = columns.len();
    let mut v: Vec<CVec<T>> = (0..ncols)
        .map(|j| {
            let mut e = vec![czero(); ncols];
            e[j] = Complex::new(T::one(), T::zero());
            e
        })
        .collect();
    let eps = T::epsilon() * T::of(8.0);
    // columns whose norm falls to rounding level of the input are frozen;
    // rotating them against anything only chases noise
    let frob_sq = columns
        .iter()
        .flatten()
        .fold(T::zero(), |a, x| a + norm_sqr(*x));
    let null_floor_sq = eps * eps * frob_sq;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..ncols {
            for q in (p + 1)..ncols {
                let app = columns[p].iter().fold(T::zero(), |a, x| a + norm_sqr(*x));
                let aqq = columns[q].iter().fold(T::zero(), |a, x| a + norm_sqr(*x));
                if app <= null_floor_sq || aqq <= null_floor_sq {
                    continue;
                }
                let apq = dot(&columns[p], &columns[q]);
                let off = apq.norm();
                if off <= eps * (app * aqq).sqrt() || off.is_zero() {
                    continue;
                }
                rotated = true;
                // phase that makes the 2x2 Gram block real, then a real
                // Jacobi rotation that diagonalizes it
                let g_conj = (apq / off).conj();
                let tau = (aqq - app) / (T::of(2.0) * off);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                rotate_columns(&mut columns, p, q, c, s, g_conj);
                rotate_columns(&mut v, p, q, c, s, g_conj);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    let singular_values = columns.iter().map(|col| vec_norm(col)).collect();
    SvdOutcome {
        singular_values,
        right_vectors: v,
        converged,
        sweeps,
    }
}

/// Rank and an (orthonormalized) nullspace basis from Gaussian
/// elimination with full column pivoting. Pivots with magnitude at most
/// `threshold` (absolute) are treated as zero.
pub fn rref_rank_and_nullspace<T: Real>(
    rows: &[CVec<T>],
    ncols: usize,
    threshold: T,
) -> (usize, Vec<CVec<T>>) {
    let mut work: Vec<CVec<T>> = rows.to_vec();
    let nrows = work.len();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut used_rows = vec![false; nrows];
    loop {
        // full pivoting: largest remaining entry over unused rows and
        // non-pivot columns
        let mut best = threshold;
        let mut pos: Option<(usize, usize)> = None;
        for (r, row) in work.iter().enumerate() {
            if used_rows[r] {
                continue;
            }
            for (c, entry) in row.iter().enumerate() {
                if pivot_cols.contains(&c) {
                    continue;
                }
                let mag = entry.norm();
                if mag > best {
                    best = mag;
                    pos = Some((r, c));
                }
            }
        }
        let Some((r, c)) = pos else { break };
        used_rows[r] = true;
        // normalize the pivot row and eliminate column c everywhere else
        let pivot = work[r][c];
        for entry in work[r].iter_mut() {
            *entry = *entry / pivot;
        }
        let pivot_row = work[r].clone();
        for (other, row) in work.iter_mut().enumerate() {
            if other == r {
                continue;
            }
            let factor = row[c];
            if factor.norm().is_zero() {
                continue;
            }
            for (entry, p) in row.iter_mut().zip(&pivot_row) {
                *entry = *entry - factor * *p;
            }
        }
        pivot_rows.push(r);
        pivot_cols.push(c);
    }
    let rank = pivot_cols.len();
    // free columns parameterize the nullspace
    let mut basis: Vec<CVec<T>> = Vec::with_capacity(ncols - rank);
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut vecv = vec![czero(); ncols];
        vecv[free] = Complex::new(T::one(), T::zero());
        for (idx, &r) in pivot_rows.iter().enumerate() {
            let c = pivot_cols[idx];
            vecv[c] = -work[r][free];
        }
        basis.push(vecv);
    }
    (rank, orthonormalize(basis))
}

/// Modified Gram-Schmidt; vectors that collapse below `~eps` are dropped.
pub fn orthonormalize<T: Real>(vecs: Vec<CVec<T>>) -> Vec<CVec<T>> {
    let mut out: Vec<CVec<T>> = Vec::with_capacity(vecs.len());
    for mut v in vecs {
        for b in &out {
            let proj = dot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = *vi - proj * *bi;
            }
        }
        let n = vec_norm(&v);
        if n > T::epsilon() * T::of(64.0) {
            let inv = Complex::new(T::one() / n, T::zero());
            for vi in v.iter_mut() {
                *vi = *vi * inv;
            }
            out.push(v);
        }
    }
    out
}

/// `|target - proj_span(basis)(target)| / |target|` for an orthonormal
/// `basis`; zero when `target` lies in the span.
pub fn projection_residual<T: Real>(target: &[Complex<T>], basis: &[CVec<T>]) -> T {
    let norm = vec_norm(target);
    if norm.is_zero() {
        return T::zero();
    }
    let mut residual = target.to_vec();
    for b in basis {
        let proj = dot(b, target);
        for (ri, bi) in residual.iter_mut().zip(b) {
            *ri = *ri - proj * *bi;
        }
    }
    vec_norm(&residual) / norm
}
