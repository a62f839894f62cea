//! Bipartition matricization ranks: the desk-scale test for genuine
//! multipartite entanglement of a sparse pure state.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::linalg::{one_sided_jacobi_svd, CVec};
use crate::scalar::Real;
use crate::state::PureState;

/// Schmidt rank of `state` across the bipartition whose first side is the
/// parties with set bits in `mask`.
pub fn bipartition_rank<T: Real>(state: &PureState, mask: u32, tol: T) -> usize {
    let n = state.shape().arity();
    debug_assert!(mask != 0 && mask < (1 << n) - 1_u32);
    let side = |labels: &[u32], keep: bool| -> Vec<u32> {
        labels
            .iter()
            .enumerate()
            .filter(|(k, _)| (mask >> k & 1 == 1) == keep)
            .map(|(_, &l)| l)
            .collect()
    };
    // index the distinct row/column label tuples actually present
    let mut row_ids: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut col_ids: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for t in state.terms() {
        let next = row_ids.len();
        row_ids.entry(side(&t.labels, true)).or_insert(next);
        let next = col_ids.len();
        col_ids.entry(side(&t.labels, false)).or_insert(next);
    }
    let mut columns: Vec<CVec<T>> =
        vec![vec![Complex::new(T::zero(), T::zero()); row_ids.len()]; col_ids.len()];
    for t in state.terms() {
        let r = row_ids[&side(&t.labels, true)];
        let c = col_ids[&side(&t.labels, false)];
        columns[c][r] = columns[c][r] + t.coeff.value::<T>();
    }
    let out = one_sided_jacobi_svd(columns);
    let sigma_max = out.singular_values.iter().cloned().fold(T::zero(), T::max);
    if sigma_max.is_zero() {
        return 0;
    }
    out.singular_values
        .iter()
        .filter(|&&s| s > tol * sigma_max)
        .count()
}

/// True when every bipartition has Schmidt rank at least 2.
pub fn is_genuinely_entangled<T: Real>(state: &PureState, tol: T) -> bool {
    let n = state.shape().arity();
    if n < 2 {
        return false;
    }
    // one representative mask per unordered bipartition: party 0 on side A
    let full = (1u32 << n) - 1;
    (1..full)
        .step_by(2)
        .all(|mask| bipartition_rank(state, mask, tol) >= 2)
}
