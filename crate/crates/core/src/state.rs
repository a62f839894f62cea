//! Multipartite pure states as sparse sums of computational-basis terms.
//!
//! States are kept unnormalized with exact coefficients; every numeric
//! question (overlap, orthogonality, constraint rows) evaluates the exact
//! data in floating point at the caller's tolerance.

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::Zero;

use crate::coeff::{Coefficient, MonomialSum};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local dimensions `d_1..d_n` of an `n`-party system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemShape {
    dims: Vec<u32>,
}

impl SystemShape {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("at least one party required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!(
                "every local dimension must be >= 2, got {d}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dimension(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).product()
    }

    /// All label tuples in row-major (lexicographic) order.
    pub fn basis_labels(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let n = self.arity();
        let mut current = Some(vec![0u32; n]);
        std::iter::from_fn(move || {
            let out = current.clone()?;
            // odometer increment
            let cur = current.as_mut().unwrap();
            let mut k = n;
            loop {
                if k == 0 {
                    current = None;
                    break;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < self.dims[k] {
                    break;
                }
                cur[k] = 0;
            }
            Some(out)
        })
    }
}

/// One computational-basis term of a [`PureState`].
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTerm {
    pub labels: Vec<u32>,
    pub coeff: Coefficient,
}

impl BasisTerm {
    pub fn new(labels: Vec<u32>, coeff: Coefficient) -> Self {
        Self { labels, coeff }
    }
}

/// Sparse unnormalized pure state over a [`SystemShape`].
///
/// Canonical form: label tuples distinct, terms sorted lexicographically,
/// zero-coefficient terms removed. Duplicate tuples are merged exactly at
/// construction; a sum that is not representable as a single monomial is
/// rejected rather than approximated.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: SystemShape,
    terms: Vec<BasisTerm>,
}

impl PureState {
    pub fn new(shape: SystemShape, terms: Vec<BasisTerm>) -> Result<Self> {
        for term in &terms {
            if term.labels.len() != shape.arity() {
                return Err(Error::ArityMismatch {
                    got: term.labels.len(),
                    expected: shape.arity(),
                });
            }
            for (party, (&label, &dim)) in term.labels.iter().zip(shape.dims()).enumerate() {
                if label >= dim {
                    return Err(Error::LabelOutOfRange { party, label, dim });
                }
            }
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.labels.cmp(&b.labels));
        let mut merged: Vec<BasisTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.labels == term.labels => {
                    last.coeff = last.coeff.try_add(&term.coeff).ok_or(Error::InexactMerge {
                        labels: term.labels.clone(),
                    })?;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Ok(Self {
            shape,
            terms: merged,
        })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn terms(&self) -> &[BasisTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The empty term list is the zero state; valid for arithmetic but
    /// rejected when building a [`StateSet`].
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every term coefficient multiplied by `c`.
    pub fn scaled(&self, c: &Coefficient) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| BasisTerm::new(t.labels.clone(), t.coeff.mul(c)))
            .collect();
        Self::new(self.shape.clone(), terms).expect("scaling preserves validity")
    }

    /// `<self|other>`, summing `conj(c_a) * c_b` over equal label tuples.
    pub fn inner_product<T: Real>(&self, other: &Self) -> Result<Complex<T>> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(
                self.shape.dims().to_vec(),
                other.shape.dims().to_vec(),
            ));
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        // both term lists are sorted, so a single merge pass suffices
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].labels.cmp(&other.terms[j].labels) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let prod = self.terms[i].coeff.conj().mul(&other.terms[j].coeff);
                    acc = acc + prod.value::<T>();
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// `<self|self>` as an exact rational (phases cancel against their
    /// conjugates, leaving squared scales).
    pub fn norm_sq_exact(&self) -> Rational64 {
        self.terms
            .iter()
            .map(|t| t.coeff.scale() * t.coeff.scale())
            .fold(Rational64::zero(), |a, b| a + b)
    }

    pub fn norm<T: Real>(&self) -> T {
        let n = self.norm_sq_exact();
        (T::of(*n.numer() as f64) / T::of(*n.denom() as f64)).sqrt()
    }

    /// Coefficient of the measurement entry `m_{x,y}` of party `k` in
    /// `<self| I x..x |x><y| x..x I |other>`: the sum of
    /// `conj(c_a) * c_b` over term pairs whose `k`-th labels are `(x, y)`
    /// and whose remaining labels agree.
    pub fn reduced_coefficient<T: Real>(
        &self,
        other: &Self,
        k: usize,
        x: u32,
        y: u32,
    ) -> Result<Complex<T>> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(
                self.shape.dims().to_vec(),
                other.shape.dims().to_vec(),
            ));
        }
        if k >= self.shape.arity() {
            return Err(Error::PartyOutOfRange {
                party: k,
                arity: self.shape.arity(),
            });
        }
        let d = self.shape.dims()[k];
        if x >= d || y >= d {
            return Err(Error::LabelOutOfRange {
                party: k,
                label: x.max(y),
                dim: d,
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for ta in &self.terms {
            if ta.labels[k] != x {
                continue;
            }
            for tb in &other.terms {
                if tb.labels[k] != y {
                    continue;
                }
                let rest_equal = ta
                    .labels
                    .iter()
                    .zip(&tb.labels)
                    .enumerate()
                    .all(|(i, (a, b))| i == k || a == b);
                if rest_equal {
                    acc = acc + ta.coeff.conj().mul(&tb.coeff).value::<T>();
                }
            }
        }
        Ok(acc)
    }

    /// All nonzero-candidate entries of the party-`k` constraint row for
    /// the ordered pair `(self, other)`, as exact monomial sums keyed by
    /// `(x, y)`. Sparse double loop over terms; nothing dense is built.
    pub fn reduced_terms(
        &self,
        other: &Self,
        k: usize,
    ) -> Result<std::collections::BTreeMap<(u32, u32), MonomialSum>> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(
                self.shape.dims().to_vec(),
                other.shape.dims().to_vec(),
            ));
        }
        if k >= self.shape.arity() {
            return Err(Error::PartyOutOfRange {
                party: k,
                arity: self.shape.arity(),
            });
        }
        let mut out: std::collections::BTreeMap<(u32, u32), MonomialSum> =
            std::collections::BTreeMap::new();
        for ta in &self.terms {
            for tb in &other.terms {
                let rest_equal = ta
                    .labels
                    .iter()
                    .zip(&tb.labels)
                    .enumerate()
                    .all(|(i, (a, b))| i == k || a == b);
                if rest_equal {
                    let key = (ta.labels[k], tb.labels[k]);
                    out.entry(key)
                        .or_default()
                        .push(ta.coeff.conj().mul(&tb.coeff));
                }
            }
        }
        Ok(out)
    }
}

/// Ordered collection of states over one shape, with display names.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    shape: SystemShape,
    states: Vec<PureState>,
    names: Vec<String>,
}

impl StateSet {
    /// Builds a set without checking pairwise orthogonality. Shape
    /// agreement and non-zero states are still enforced.
    pub fn new_unchecked(shape: SystemShape, states: Vec<PureState>) -> Result<Self> {
        for (index, s) in states.iter().enumerate() {
            if *s.shape() != shape {
                return Err(Error::ShapeMismatch(
                    shape.dims().to_vec(),
                    s.shape().dims().to_vec(),
                ));
            }
            if s.is_zero() {
                return Err(Error::ZeroState { index });
            }
        }
        let names = (0..states.len()).map(|i| format!("phi_{i}")).collect();
        Ok(Self {
            shape,
            states,
            names,
        })
    }

    /// Builds a set and verifies pairwise orthogonality at `tol`.
    pub fn new_orthogonal(shape: SystemShape, states: Vec<PureState>, tol: f64) -> Result<Self> {
        let set = Self::new_unchecked(shape, states)?;
        set.require_orthogonal(tol)?;
        Ok(set)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.states.len() {
            return Err(Error::InvalidDocument(format!(
                "{} names for {} states",
                names.len(),
                self.states.len()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// First pair `(i, j)` with `|<phi_i|phi_j>| > tol * max(|phi_i||phi_j|, 1)`,
    /// or `None` when the set is pairwise orthogonal at that tolerance.
    pub fn first_nonorthogonal_pair<T: Real>(&self, tol: T) -> Option<(usize, usize)> {
        for i in 0..self.states.len() {
            for j in (i + 1)..self.states.len() {
                let ip: Complex<T> = self.states[i]
                    .inner_product(&self.states[j])
                    .expect("same shape");
                let scale = (self.states[i].norm::<T>() * self.states[j].norm::<T>()).max(T::one());
                if ip.norm() > tol * scale {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_orthogonal<T: Real>(&self, tol: T) -> bool {
        self.first_nonorthogonal_pair(tol).is_none()
    }

    pub fn require_orthogonal(&self, tol: f64) -> Result<()> {
        if let Some((i, j)) = self.first_nonorthogonal_pair(tol) {
            let overlap: Complex<f64> = self.states[i]
                .inner_product(&self.states[j])
                .expect("same shape");
            let scale = (self.states[i].norm::<f64>() * self.states[j].norm::<f64>()).max(1.0);
            return Err(Error::NotOrthogonal {
                i,
                j,
                overlap: overlap.norm() / scale,
            });
        }
        Ok(())
    }

    /// Index of the stopper state, detected structurally: full basis
    /// support with one shared coefficient on every term.
    pub fn stopper_index(&self) -> Option<usize> {
        self.states.iter().position(is_stopper)
    }

    /// The set with state `index` removed (names follow).
    pub fn without_state(&self, index: usize) -> Result<Self> {
        let mut states = self.states.clone();
        let mut names = self.names.clone();
        states.remove(index);
        names.remove(index);
        Self::new_unchecked(self.shape.clone(), states)?.with_names(names)
    }

    /// The set with states reordered by `perm` (a permutation of indices).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let states = perm.iter().map(|&i| self.states[i].clone()).collect();
        let names = perm.iter().map(|&i| self.names[i].clone()).collect();
        Self::new_unchecked(self.shape.clone(), states)?.with_names(names)
    }
}

/// Structural stopper test: every label tuple present, all coefficients
/// equal to the same nonzero constant.
pub fn is_stopper(state: &PureState) -> bool {
    if state.num_terms() as u64 != state.shape().total_dimension() {
        return false;
    }
    let Some(first) = state.terms().first() else {
        return false;
    };
    state.terms().iter().all(|t| t.coeff == first.coeff)
}

/// Orthogonality check in the shape the public surface promises: a flag
/// plus the first offending pair, if any.
pub fn is_orthogonal_set<T: Real>(set: &StateSet, tol: T) -> (bool, Option<(usize, usize)>) {
    match set.first_nonorthogonal_pair(tol) {
        None => (true, None),
        pair => (false, pair),
    }
}
