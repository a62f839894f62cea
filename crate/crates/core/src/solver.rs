//! The numeric oracle: orthogonality-preservation constraints for one
//! party's measurement element, their nullspace, and the stability
//! verdict.
//!
//! A set is locally stable when, for every party, the only matrices
//! compatible with all pairwise constraints are multiples of the
//! identity, i.e. every party's constraint nullspace has dimension 1.
//! Both ordered pairs of each state pair contribute a row, which closes
//! the nullspace under conjugate transposition: were its dimension
//! larger than 1 it would contain a Hermitian element H not proportional
//! to I, and I/2 + eps*H would complete to a nontrivial
//! orthogonality-preserving POVM. [`hermitian_closure_check`] verifies
//! the closure at runtime.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    one_sided_jacobi_svd, projection_residual, rref_rank_and_nullspace, vec_norm, CVec,
};
use crate::scalar::Real;
use crate::state::StateSet;

/// One orthogonality-preservation constraint: the row for the ordered
/// state pair `(bra, ket)`, with one coefficient per measurement entry
/// `(x, y)` at column `x * d + y`.
#[derive(Debug, Clone)]
pub struct ConstraintRow<T: Real> {
    pub bra: usize,
    pub ket: usize,
    pub coeffs: CVec<T>,
}

/// All constraint rows for one party. Rows appear in lexicographic
/// `(bra, ket)` order, both orders of every pair, all-zero rows kept so
/// row indices stay aligned with state pairs.
#[derive(Debug, Clone)]
pub struct ConstraintSystem<T: Real> {
    party: usize,
    local_dim: u32,
    rows: Vec<ConstraintRow<T>>,
}

impl<T: Real> ConstraintSystem<T> {
    /// Assembles the system for `party`. The set must be pairwise
    /// orthogonal at `ortho_tol`; orthogonality preservation is not a
    /// meaningful premise otherwise.
    pub fn build(set: &StateSet, party: usize, ortho_tol: f64) -> Result<Self> {
        if party >= set.shape().arity() {
            return Err(Error::PartyOutOfRange {
                party,
                arity: set.shape().arity(),
            });
        }
        set.require_orthogonal(ortho_tol)?;
        let d = set.shape().dims()[party];
        let ncols = (d * d) as usize;
        let mut rows = Vec::with_capacity(set.len() * set.len().saturating_sub(1));
        for i in 0..set.len() {
            for j in 0..set.len() {
                if i == j {
                    continue;
                }
                let sums = set.states()[i].reduced_terms(&set.states()[j], party)?;
                let mut coeffs = vec![Complex::new(T::zero(), T::zero()); ncols];
                for ((x, y), sum) in &sums {
                    coeffs[(x * d + y) as usize] = sum.value::<T>();
                }
                rows.push(ConstraintRow {
                    bra: i,
                    ket: j,
                    coeffs,
                });
            }
        }
        Ok(Self {
            party,
            local_dim: d,
            rows,
        })
    }

    /// Direct construction from precomputed rows (diagnostics and tests).
    pub fn from_rows(party: usize, local_dim: u32, rows: Vec<ConstraintRow<T>>) -> Self {
        let ncols = (local_dim * local_dim) as usize;
        debug_assert!(rows.iter().all(|r| r.coeffs.len() == ncols));
        Self {
            party,
            local_dim,
            rows,
        }
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn local_dim(&self) -> u32 {
        self.local_dim
    }

    pub fn rows(&self) -> &[ConstraintRow<T>] {
        &self.rows
    }

    pub fn ncols(&self) -> usize {
        (self.local_dim * self.local_dim) as usize
    }

    /// `vec(I)`: ones at the diagonal columns `(x, x)`.
    pub fn identity_vector(&self) -> CVec<T> {
        let d = self.local_dim;
        let mut v = vec![Complex::new(T::zero(), T::zero()); self.ncols()];
        for x in 0..d {
            v[(x * d + x) as usize] = Complex::new(T::one(), T::zero());
        }
        v
    }

    /// Largest `|row . vec(I)|`; zero (to rounding) for any orthogonal
    /// set, since the trivial measurement preserves orthogonality.
    pub fn max_identity_row_residual(&self) -> T {
        let d = self.local_dim;
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for x in 0..d {
                    acc = acc + row.coeffs[(x * d + x) as usize];
                }
                acc.norm()
            })
            .fold(T::zero(), T::max)
    }
}

/// One-line statement of the decision rule, carried into reports: the
/// dimension-1 test is the full triviality decision, not just a
/// sufficient condition.
pub const TRIVIALITY_CRITERION: &str = "trivial <=> nullspace dimension == 1; both ordered \
pair rows are included, so the nullspace is closed under conjugate transposition, and a \
dimension > 1 nullspace contains a Hermitian H not proportional to I, making E = I/2 + eps*H \
a nontrivial orthogonality-preserving measurement element";

/// Which rank decision backend produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullspaceMethod {
    /// One-sided Jacobi singular value decomposition (default).
    Svd,
    /// Row reduction with full column pivoting (fallback/cross-check).
    Rref,
}

impl std::fmt::Display for NullspaceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NullspaceMethod::Svd => write!(f, "svd"),
            NullspaceMethod::Rref => write!(f, "rref"),
        }
    }
}

/// Nullspace of one party's constraint system.
#[derive(Debug, Clone)]
pub struct NullspaceReport<T: Real> {
    pub party: usize,
    pub local_dim: u32,
    pub dimension: usize,
    /// Orthonormal basis vectors of length `d^2`, column index `x*d + y`.
    pub basis: Vec<CVec<T>>,
    /// Relative rank tolerance used for the decision.
    pub rank_tolerance: T,
    /// Largest singular value (SVD) or largest row norm (RREF); the
    /// reference scale the tolerance is relative to.
    pub scale: T,
    pub method: NullspaceMethod,
    /// Dimension 1: only multiples of the identity survive.
    pub trivial: bool,
    /// Relative residual of projecting `vec(I)` onto the basis span.
    pub identity_residual: T,
}

impl<T: Real> NullspaceReport<T> {
    /// Entry `(x, y)` of basis matrix `b`.
    pub fn basis_entry(&self, b: usize, x: u32, y: u32) -> Complex<T> {
        self.basis[b][(x * self.local_dim + y) as usize]
    }
}

/// Right nullspace of the constraint rows at relative tolerance `tol`,
/// using the default SVD backend.
pub fn nullspace<T: Real>(cs: &ConstraintSystem<T>, tol: T) -> NullspaceReport<T> {
    nullspace_with(cs, tol, NullspaceMethod::Svd)
}

pub fn nullspace_with<T: Real>(
    cs: &ConstraintSystem<T>,
    tol: T,
    method: NullspaceMethod,
) -> NullspaceReport<T> {
    let ncols = cs.ncols();
    let (basis, scale) = match method {
        NullspaceMethod::Svd => {
            let columns: Vec<CVec<T>> = (0..ncols)
                .map(|c| cs.rows.iter().map(|r| r.coeffs[c]).collect())
                .collect();
            let out = one_sided_jacobi_svd(columns);
            debug_assert!(out.converged, "jacobi sweep cap reached");
            let sigma_max = out.singular_values.iter().cloned().fold(T::zero(), T::max);
            let basis: Vec<CVec<T>> = out
                .singular_values
                .iter()
                .zip(out.right_vectors)
                .filter(|(s, _)| **s <= tol * sigma_max)
                .map(|(_, v)| v)
                .collect();
            (basis, sigma_max)
        }
        NullspaceMethod::Rref => {
            let row_vecs: Vec<CVec<T>> = cs.rows.iter().map(|r| r.coeffs.clone()).collect();
            let max_row_norm = row_vecs.iter().map(|r| vec_norm(r)).fold(T::zero(), T::max);
            let (_, basis) = rref_rank_and_nullspace(&row_vecs, ncols, tol * max_row_norm);
            (basis, max_row_norm)
        }
    };
    let identity_residual = projection_residual(&cs.identity_vector(), &basis);
    let dimension = basis.len();
    NullspaceReport {
        party: cs.party,
        local_dim: cs.local_dim,
        dimension,
        basis,
        rank_tolerance: tol,
        scale,
        method,
        trivial: dimension == 1,
        identity_residual,
    }
}

/// Cardinality against the stability lower bound `max_i(d_i) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityBound {
    pub cardinality: usize,
    pub bound: usize,
    pub meets_bound: bool,
}

impl CardinalityBound {
    pub fn of(set: &StateSet) -> Self {
        let bound = *set.shape().dims().iter().max().unwrap() as usize + 1;
        Self {
            cardinality: set.len(),
            bound,
            meets_bound: set.len() >= bound,
        }
    }
}

/// Aggregated per-party verdict.
#[derive(Debug, Clone)]
pub struct StabilityVerdict<T: Real> {
    pub reports: Vec<NullspaceReport<T>>,
    pub locally_stable: bool,
    pub bound: CardinalityBound,
    pub rank_tolerance: T,
    pub orthogonality_tolerance: f64,
    pub method: NullspaceMethod,
}

/// Runs constraint assembly and the nullspace decision for every party.
pub fn verify_local_stability<T: Real>(set: &StateSet, tol: T) -> Result<StabilityVerdict<T>> {
    verify_local_stability_with(set, tol, crate::DEFAULT_ORTHO_TOL, NullspaceMethod::Svd)
}

pub fn verify_local_stability_with<T: Real>(
    set: &StateSet,
    rank_tol: T,
    ortho_tol: f64,
    method: NullspaceMethod,
) -> Result<StabilityVerdict<T>> {
    let mut reports = Vec::with_capacity(set.shape().arity());
    for party in 0..set.shape().arity() {
        let cs = ConstraintSystem::build(set, party, ortho_tol)?;
        reports.push(nullspace_with(&cs, rank_tol, method));
    }
    let locally_stable = reports.iter().all(|r| r.trivial);
    Ok(StabilityVerdict {
        reports,
        locally_stable,
        bound: CardinalityBound::of(set),
        rank_tolerance: rank_tol,
        orthogonality_tolerance: ortho_tol,
        method,
    })
}

/// Verdict for the set with one state removed.
#[derive(Debug, Clone)]
pub struct DeletionOutcome {
    pub removed: usize,
    pub locally_stable: bool,
    pub dimensions: Vec<usize>,
}

/// Re-runs the verdict for every single-state deletion.
pub fn deletion_test<T: Real>(set: &StateSet, tol: T) -> Result<Vec<DeletionOutcome>> {
    let mut out = Vec::with_capacity(set.len());
    for removed in 0..set.len() {
        let subset = set.without_state(removed)?;
        let verdict = verify_local_stability(&subset, tol)?;
        out.push(DeletionOutcome {
            removed,
            locally_stable: verdict.locally_stable,
            dimensions: verdict.reports.iter().map(|r| r.dimension).collect(),
        });
    }
    Ok(out)
}

/// True when the conjugate transpose of every basis matrix stays in the
/// basis span: the sanity check behind the dimension-1 criterion.
pub fn hermitian_closure_check<T: Real>(
    report: &NullspaceReport<T>,
    cs: &ConstraintSystem<T>,
    tol: T,
) -> bool {
    debug_assert_eq!(report.party, cs.party());
    debug_assert_eq!(report.local_dim, cs.local_dim());
    let d = report.local_dim;
    report.basis.iter().all(|b| {
        let mut dagger = vec![Complex::new(T::zero(), T::zero()); b.len()];
        for x in 0..d {
            for y in 0..d {
                dagger[(x * d + y) as usize] = b[(y * d + x) as usize].conj();
            }
        }
        projection_residual(&dagger, &report.basis) <= tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;
    use crate::families;
    use crate::state::{BasisTerm, PureState, SystemShape};

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn computational_basis_2x2() -> StateSet {
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let states = shape
            .basis_labels()
            .map(|l| {
                PureState::new(shape.clone(), vec![BasisTerm::new(l, Coefficient::one())]).unwrap()
            })
            .collect();
        StateSet::new_orthogonal(shape, states, 1e-12).unwrap()
    }

    fn bell_basis() -> StateSet {
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let plus = Coefficient::one();
        let minus = Coefficient::integer(-1);
        let mk = |a: [u32; 2], b: [u32; 2], sign: Coefficient| {
            PureState::new(
                shape.clone(),
                vec![
                    BasisTerm::new(a.to_vec(), plus),
                    BasisTerm::new(b.to_vec(), sign),
                ],
            )
            .unwrap()
        };
        let states = vec![
            mk([0, 0], [1, 1], plus),
            mk([0, 0], [1, 1], minus),
            mk([0, 1], [1, 0], plus),
            mk([0, 1], [1, 0], minus),
        ];
        StateSet::new_orthogonal(shape, states, 1e-12).unwrap()
    }

    #[test]
    fn constraint_row_for_seed_pair() {
        // d = 3 equal-dims set, party A, pair (phi_0, phi_2):
        // exactly columns (0,2) and (1,0), both 1
        let set = families::bipartite_equal(3, 2).unwrap();
        let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        let row = cs.rows().iter().find(|r| r.bra == 0 && r.ket == 2).unwrap();
        let d = 3u32;
        for x in 0..d {
            for y in 0..d {
                let got = row.coeffs[(x * d + y) as usize];
                let expect = if (x, y) == (0, 2) || (x, y) == (1, 0) {
                    c64(1.0, 0.0)
                } else {
                    c64(0.0, 0.0)
                };
                assert!((got - expect).norm() < 1e-15, "entry ({x},{y})");
            }
        }
    }

    #[test]
    fn all_zero_rows_are_kept() {
        let set = computational_basis_2x2();
        let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        assert_eq!(cs.rows().len(), 12);
        // (|00>, |01>) differ only at party B: the party-A row vanishes
        let row = cs.rows().iter().find(|r| r.bra == 0 && r.ket == 1).unwrap();
        assert!(row.coeffs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn bell_row_matches_hand_expansion() {
        let set = bell_basis();
        let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        let row = cs.rows().iter().find(|r| r.bra == 0 && r.ket == 1).unwrap();
        assert_eq!(row.coeffs[0], c64(1.0, 0.0)); // (0,0)
        assert_eq!(row.coeffs[3], c64(-1.0, 0.0)); // (1,1)
        assert_eq!(row.coeffs[1], c64(0.0, 0.0));
        assert_eq!(row.coeffs[2], c64(0.0, 0.0));
    }

    #[test]
    fn nonorthogonal_sets_are_rejected() {
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let s0 = PureState::new(
            shape.clone(),
            vec![BasisTerm::new(vec![0, 0], Coefficient::one())],
        )
        .unwrap();
        let s1 = PureState::new(
            shape.clone(),
            vec![
                BasisTerm::new(vec![0, 0], Coefficient::one()),
                BasisTerm::new(vec![1, 1], Coefficient::one()),
            ],
        )
        .unwrap();
        let set = StateSet::new_unchecked(shape, vec![s0, s1]).unwrap();
        assert!(matches!(
            ConstraintSystem::<f64>::build(&set, 0, 1e-9),
            Err(Error::NotOrthogonal { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn equal_dims_set_has_trivial_nullspace_per_party() {
        let set = families::bipartite_equal(3, 2).unwrap();
        for party in 0..2 {
            let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, party, 1e-9).unwrap();
            let report = nullspace(&cs, 1e-8);
            assert_eq!(report.dimension, 1, "party {party}");
            assert!(report.trivial);
            // the basis spans the identity direction
            assert!(report.identity_residual < 1e-9);
        }
    }

    #[test]
    fn computational_basis_nullspace_dimension_two() {
        let set = computational_basis_2x2();
        for party in 0..2 {
            let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, party, 1e-9).unwrap();
            let report = nullspace(&cs, 1e-8);
            assert_eq!(report.dimension, 2);
            assert!(!report.trivial);
            // off-diagonals forced to zero in every basis matrix
            for b in 0..report.dimension {
                assert!(report.basis_entry(b, 0, 1).norm() < 1e-10);
                assert!(report.basis_entry(b, 1, 0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn bell_basis_is_trivial_for_party_a() {
        // hand-solved: E00 = E11, E01 + E10 = 0, -E01 + E10 = 0
        let set = bell_basis();
        let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        let report = nullspace(&cs, 1e-8);
        assert_eq!(report.dimension, 1);
    }

    #[test]
    fn empty_system_has_full_nullspace() {
        let cs: ConstraintSystem<f64> = ConstraintSystem::from_rows(0, 3, vec![]);
        let report = nullspace(&cs, 1e-8);
        assert_eq!(report.dimension, 9);
        assert!(!report.trivial);
        assert!(report.identity_residual < 1e-12);
    }

    #[test]
    fn svd_and_rref_agree() {
        for set in [
            families::bipartite_equal(4, 2).unwrap(),
            families::multipartite_equal(3, 3).unwrap(),
        ] {
            for party in 0..set.shape().arity() {
                let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, party, 1e-9).unwrap();
                let svd = nullspace_with(&cs, 1e-8, NullspaceMethod::Svd);
                let rref = nullspace_with(&cs, 1e-8, NullspaceMethod::Rref);
                assert_eq!(svd.dimension, rref.dimension);
                assert_eq!(rref.method, NullspaceMethod::Rref);
            }
        }
    }

    #[test]
    fn verdict_for_families_and_negative_controls() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let verdict = verify_local_stability(&set, 1e-8).unwrap();
        assert!(verdict.locally_stable);
        assert_eq!(verdict.bound.cardinality, 4);
        assert_eq!(verdict.bound.bound, 4);
        assert!(verdict.bound.meets_bound);

        // stopper removed: diagonals unconstrained, dimension >= 2
        let stopper = set.stopper_index().unwrap();
        let without = set.without_state(stopper).unwrap();
        let verdict = verify_local_stability(&without, 1e-8).unwrap();
        assert!(!verdict.locally_stable);
        for r in &verdict.reports {
            assert!(r.dimension >= 2);
        }
    }

    #[test]
    fn deletion_test_reports_every_index() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let outcomes = deletion_test(&set, 1e-8).unwrap();
        assert_eq!(outcomes.len(), 4);
        assert!(outcomes.iter().all(|o| !o.locally_stable));

        // Bell basis minus one state: verdict computed, bound still met
        let bell = bell_basis();
        let sub = bell.without_state(3).unwrap();
        let verdict = verify_local_stability(&sub, 1e-8).unwrap();
        assert_eq!(verdict.bound.cardinality, 3);
        assert_eq!(verdict.bound.bound, 3);
        assert!(verdict.bound.meets_bound);
    }

    #[test]
    fn hermitian_closure_holds_for_built_systems() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        let report = nullspace(&cs, 1e-8);
        assert!(hermitian_closure_check(&report, &cs, 1e-8));

        let comp = computational_basis_2x2();
        let cs2: ConstraintSystem<f64> = ConstraintSystem::build(&comp, 0, 1e-9).unwrap();
        let report2 = nullspace(&cs2, 1e-8);
        assert!(hermitian_closure_check(&report2, &cs2, 1e-8));
    }

    #[test]
    fn one_sided_system_can_fail_hermitian_closure() {
        // keep only the (i, j) orientation of a 2-state toy system whose
        // single row pins E01 but not E10
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let a = PureState::new(
            shape.clone(),
            vec![BasisTerm::new(vec![0, 0], Coefficient::one())],
        )
        .unwrap();
        let b = PureState::new(
            shape.clone(),
            vec![BasisTerm::new(vec![1, 0], Coefficient::one())],
        )
        .unwrap();
        let set = StateSet::new_orthogonal(shape, vec![a, b], 1e-12).unwrap();
        let full: ConstraintSystem<f64> = ConstraintSystem::build(&set, 0, 1e-9).unwrap();
        let one_sided = ConstraintSystem::from_rows(
            0,
            2,
            full.rows()
                .iter()
                .filter(|r| r.bra < r.ket)
                .cloned()
                .collect(),
        );
        let report = nullspace(&one_sided, 1e-8);
        assert_eq!(report.dimension, 3);
        assert!(!hermitian_closure_check(&report, &one_sided, 1e-8));
    }

    #[test]
    fn identity_row_residual_is_tiny() {
        let set = families::tripartite_general(3, 4, 5).unwrap();
        for party in 0..3 {
            let cs: ConstraintSystem<f64> = ConstraintSystem::build(&set, party, 1e-9).unwrap();
            assert!(cs.max_identity_row_residual() <= 1e-9);
        }
    }

    #[test]
    fn single_precision_scalar_path() {
        // same pipeline in f32; the rank tolerance has to sit above the
        // f32 rounding floor
        let set = families::bipartite_equal(3, 2).unwrap();
        let verdict =
            verify_local_stability_with::<f32>(&set, 1e-3, 1e-6, NullspaceMethod::Svd).unwrap();
        assert!(verdict.locally_stable);
        assert!(verdict.reports.iter().all(|r| r.dimension == 1));
    }
}
