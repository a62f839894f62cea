//! Symbolic proof engine for per-party triviality.
//!
//! The engine works on exact constraint rows and derives facts about the
//! measurement entries `m[x,y]` of one party:
//!
//! - a row whose support is a single column forces that entry to zero
//!   (the zero-entry rule behind `lemma1_scan`);
//! - rows reduced to one or two unknown columns propagate zeros and
//!   proportionality relations to a fixed point;
//! - a state pairing with the stopper whose slot labels take exactly two
//!   values ties the two diagonal entries together (the diagonal rule
//!   behind `lemma2_scan`, resting on the vanishing of full root-of-unity
//!   sums).
//!
//! The engine is deliberately incomplete: `Inconclusive` is not a
//! disproof, and the numeric oracle in [`crate::solver`] stays
//! authoritative. On the constructed families it terminates with
//! `Trivial` for every party.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;

use crate::coeff::{Coefficient, MonomialSum};
use crate::error::Result;
use crate::solver::NullspaceReport;
use crate::state::StateSet;

/// Zero threshold for row support and rule guards.
pub const PROVER_ZERO_TOL: f64 = 1e-9;

/// A state position in a justification: plain index or the stopper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputRef {
    State(usize),
    Stopper,
}

/// Proportionality factor; exact when both row coefficients were single
/// monomials, numeric otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    Exact(Coefficient),
    Approx { re: f64, im: f64 },
}

impl Factor {
    pub fn value(&self) -> Complex<f64> {
        match self {
            Factor::Exact(c) => c.value(),
            Factor::Approx { re, im } => Complex::new(*re, *im),
        }
    }

    fn compose(&self, other: &Factor) -> Factor {
        match (self, other) {
            (Factor::Exact(a), Factor::Exact(b)) => Factor::Exact(a.mul(b)),
            _ => {
                let z = self.value() * other.value();
                Factor::Approx { re: z.re, im: z.im }
            }
        }
    }
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factor::Exact(c) => write!(f, "{c}"),
            Factor::Approx { re, im } => write!(f, "({re:.6}{im:+.6}i)"),
        }
    }
}

/// A derived fact about entries of the party's measurement matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum FactKind {
    /// `m[x,y] = 0`
    Zero { x: u32, y: u32 },
    /// `m[x1,y1] = factor * m[x2,y2]`
    Proportional {
        x1: u32,
        y1: u32,
        x2: u32,
        y2: u32,
        factor: Factor,
    },
    /// `m[a,a] = m[b,b]`
    EqualDiag { a: u32, b: u32 },
}

/// Deduction rule that produced a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Single-support constraint row between two non-stopper states.
    Lemma1,
    /// Row reduced to one unknown column after substituting zeros.
    SingleUnknown,
    /// Row reduced to two unknown columns: a proportionality relation.
    TwoUnknown,
    /// Proportionality with a known-zero endpoint.
    PropagatedZero,
    /// Stopper pairing with a two-valued slot-label state.
    Lemma2,
}

impl Rule {
    pub fn id(&self) -> &'static str {
        match self {
            Rule::Lemma1 => "lemma1",
            Rule::SingleUnknown => "single_unknown",
            Rule::TwoUnknown => "two_unknown",
            Rule::PropagatedZero => "propagated_zero",
            Rule::Lemma2 => "lemma2",
        }
    }
}

/// One step of a proof trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryFact {
    pub kind: FactKind,
    pub rule: Rule,
    pub inputs: (InputRef, InputRef),
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Trivial,
    Inconclusive,
}

/// Replayable per-party deduction record.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofTrace {
    pub party: usize,
    pub local_dim: u32,
    pub state_names: Vec<String>,
    pub steps: Vec<EntryFact>,
    pub outcome: Outcome,
    /// Entry coordinates not fixed: unresolved off-diagonals, plus every
    /// diagonal when the equality classes do not collapse to one.
    pub unresolved: Vec<(u32, u32)>,
    pub notes: Vec<String>,
}

impl ProofTrace {
    pub fn zero_facts(&self) -> impl Iterator<Item = &EntryFact> {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, FactKind::Zero { .. }))
    }

    pub fn equal_diag_pairs(&self) -> BTreeSet<(u32, u32)> {
        self.steps
            .iter()
            .filter_map(|s| match s.kind {
                FactKind::EqualDiag { a, b } => Some((a.min(b), a.max(b))),
                _ => None,
            })
            .collect()
    }
}

struct ExactRow {
    bra: usize,
    ket: usize,
    /// Support columns, ascending by `(x, y)`, with exact sums and cached
    /// numeric values. Columns numerically zero at build are dropped.
    entries: Vec<((u32, u32), MonomialSum, Complex<f64>)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn class_count(&mut self, n: usize) -> usize {
        (0..n).map(|i| self.find(i)).collect::<BTreeSet<_>>().len()
    }
}

/// Matrix-entry coordinate `(x, y)`.
type Column = (u32, u32);
/// Source column, factor, and row justification of a proportionality.
type PropLink = (Column, Factor, (InputRef, InputRef));

/// Engine state for one `(set, party)` pair.
pub struct ProofEngine<'a> {
    set: &'a StateSet,
    party: usize,
    d: u32,
    tol: f64,
    stopper: Option<usize>,
    rows: Vec<ExactRow>,
    zeros: BTreeSet<Column>,
    // target column -> where its value comes from
    props: BTreeMap<Column, PropLink>,
    diag_pairs: BTreeSet<Column>,
    steps: Vec<EntryFact>,
    notes: Vec<String>,
    rounds: usize,
}

impl<'a> ProofEngine<'a> {
    pub fn new(set: &'a StateSet, party: usize) -> Result<Self> {
        Self::with_tol(set, party, PROVER_ZERO_TOL)
    }

    pub fn with_tol(set: &'a StateSet, party: usize, tol: f64) -> Result<Self> {
        set.require_orthogonal(crate::DEFAULT_ORTHO_TOL)?;
        if party >= set.shape().arity() {
            return Err(crate::error::Error::PartyOutOfRange {
                party,
                arity: set.shape().arity(),
            });
        }
        let stopper = set.stopper_index();
        let mut rows = Vec::new();
        for i in 0..set.len() {
            for j in 0..set.len() {
                if i == j {
                    continue;
                }
                let sums = set.states()[i].reduced_terms(&set.states()[j], party)?;
                let entries = sums
                    .into_iter()
                    .filter_map(|(col, sum)| {
                        let v = sum.value::<f64>();
                        (v.norm() > tol).then_some((col, sum, v))
                    })
                    .collect();
                rows.push(ExactRow {
                    bra: i,
                    ket: j,
                    entries,
                });
            }
        }
        Ok(Self {
            set,
            party,
            d: set.shape().dims()[party],
            tol,
            stopper,
            rows,
            zeros: BTreeSet::new(),
            props: BTreeMap::new(),
            diag_pairs: BTreeSet::new(),
            steps: Vec::new(),
            notes: Vec::new(),
            rounds: 0,
        })
    }

    fn input_ref(&self, index: usize) -> InputRef {
        if Some(index) == self.stopper {
            InputRef::Stopper
        } else {
            InputRef::State(index)
        }
    }

    fn emit_zero(&mut self, col: (u32, u32), rule: Rule, inputs: (InputRef, InputRef)) -> bool {
        if !self.zeros.insert(col) {
            return false;
        }
        self.steps.push(EntryFact {
            kind: FactKind::Zero { x: col.0, y: col.1 },
            rule,
            inputs,
            step: self.steps.len() + 1,
        });
        true
    }

    /// Zero-entry scan: ordered non-stopper pairs whose constraint row
    /// has exactly one supported column.
    pub fn lemma1_scan(&mut self) -> usize {
        let mut emitted = 0;
        for r in 0..self.rows.len() {
            let (bra, ket) = (self.rows[r].bra, self.rows[r].ket);
            if Some(bra) == self.stopper || Some(ket) == self.stopper {
                continue;
            }
            if let [(col, _, _)] = self.rows[r].entries.as_slice() {
                let col = *col;
                let inputs = (self.input_ref(bra), self.input_ref(ket));
                if self.emit_zero(col, Rule::Lemma1, inputs) {
                    emitted += 1;
                }
            }
        }
        emitted
    }

    /// Single-unknown/two-unknown propagation over all rows, repeated to
    /// a fixed point. Rounds are batched: every row sees the fact store
    /// as it stood when the round began, so chains materialize as
    /// proportionality facts before they collapse to zeros.
    pub fn propagate(&mut self) -> usize {
        let before = self.steps.len();
        loop {
            self.rounds += 1;
            let mut changed = false;
            // proportional + zero on either endpoint
            let links: Vec<_> = self
                .props
                .iter()
                .map(|(t, (s, f, inp))| (*t, *s, *f, *inp))
                .collect();
            for (target, source, _f, inputs) in links {
                if self.zeros.contains(&source) && !self.zeros.contains(&target) {
                    changed |= self.emit_zero(target, Rule::PropagatedZero, inputs);
                }
                if self.zeros.contains(&target) && !self.zeros.contains(&source) {
                    changed |= self.emit_zero(source, Rule::PropagatedZero, inputs);
                }
            }
            // row scan against the zeros known at round start
            let zeros_snapshot = self.zeros.clone();
            for r in 0..self.rows.len() {
                let unknowns: Vec<(Column, Complex<f64>, Option<Coefficient>)> = self.rows[r]
                    .entries
                    .iter()
                    .filter(|(col, _, _)| !zeros_snapshot.contains(col))
                    .map(|(col, sum, v)| (*col, *v, sum.as_single().copied()))
                    .collect();
                let inputs = (
                    self.input_ref(self.rows[r].bra),
                    self.input_ref(self.rows[r].ket),
                );
                match unknowns.as_slice() {
                    [(col, _, _)] => {
                        changed |= self.emit_zero(*col, Rule::SingleUnknown, inputs);
                    }
                    [(src, sv, sc), (tgt, tv, tc)] => {
                        // columns ascend, so the second is the chain head:
                        // m[tgt] = -(c_src / c_tgt) * m[src]
                        if self.props.contains_key(tgt) || self.zeros.contains(tgt) {
                            continue;
                        }
                        let factor = match (sc, tc) {
                            (Some(a), Some(b)) => {
                                Factor::Exact(a.div(b).expect("support is nonzero").neg())
                            }
                            _ => {
                                let z = -(sv / tv);
                                Factor::Approx { re: z.re, im: z.im }
                            }
                        };
                        self.props.insert(*tgt, (*src, factor, inputs));
                        self.steps.push(EntryFact {
                            kind: FactKind::Proportional {
                                x1: tgt.0,
                                y1: tgt.1,
                                x2: src.0,
                                y2: src.1,
                                factor,
                            },
                            rule: Rule::TwoUnknown,
                            inputs,
                            step: self.steps.len() + 1,
                        });
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        self.steps.len() - before
    }

    fn all_off_diagonals_zero(&self) -> bool {
        (0..self.d).all(|x| (0..self.d).all(|y| x == y || self.zeros.contains(&(x, y))))
    }

    /// Diagonal-entry scan: requires every off-diagonal to be known zero
    /// and a structurally detected stopper. Each non-stopper state whose
    /// slot labels take exactly two values with non-cancelling
    /// coefficient group sums ties those two diagonals together.
    pub fn lemma2_scan(&mut self) -> usize {
        if !self.all_off_diagonals_zero() {
            self.notes
                .push("lemma2 skipped: off-diagonal entries unresolved".into());
            return 0;
        }
        let Some(stopper) = self.stopper else {
            self.notes
                .push("lemma2 skipped: no stopper state detected".into());
            return 0;
        };
        let mut emitted = 0;
        for (i, state) in self.set.states().iter().enumerate() {
            if i == stopper {
                continue;
            }
            let mut groups: BTreeMap<u32, MonomialSum> = BTreeMap::new();
            for t in state.terms() {
                groups
                    .entry(t.labels[self.party])
                    .or_default()
                    .push(t.coeff);
            }
            if groups.len() != 2 {
                continue;
            }
            let labels: Vec<u32> = groups.keys().copied().collect();
            let sums: Vec<Complex<f64>> = groups.values().map(|s| s.value()).collect();
            // the equality needs opposite, non-cancelling group sums;
            // they are opposite exactly when the state is orthogonal to
            // the uniform stopper
            if sums.iter().any(|s| s.norm() <= self.tol) {
                continue;
            }
            if (-(sums[1] / sums[0]) - Complex::new(1.0, 0.0)).norm() > self.tol {
                continue;
            }
            let (a, b) = (labels[0], labels[1]);
            if self.diag_pairs.insert((a, b)) {
                self.steps.push(EntryFact {
                    kind: FactKind::EqualDiag { a, b },
                    rule: Rule::Lemma2,
                    inputs: (InputRef::Stopper, InputRef::State(i)),
                    step: self.steps.len() + 1,
                });
                emitted += 1;
            }
        }
        emitted
    }

    fn build_trace(self) -> ProofTrace {
        let off_ok = self.all_off_diagonals_zero();
        let mut uf = UnionFind::new(self.d as usize);
        for &(a, b) in &self.diag_pairs {
            uf.union(a as usize, b as usize);
        }
        let diag_classes = uf.class_count(self.d as usize);
        let outcome = if off_ok && diag_classes == 1 {
            Outcome::Trivial
        } else {
            Outcome::Inconclusive
        };
        let mut unresolved: Vec<(u32, u32)> = Vec::new();
        for x in 0..self.d {
            for y in 0..self.d {
                if x != y && !self.zeros.contains(&(x, y)) {
                    unresolved.push((x, y));
                }
            }
        }
        if diag_classes > 1 {
            unresolved.extend((0..self.d).map(|x| (x, x)));
        }
        unresolved.sort_unstable();
        ProofTrace {
            party: self.party,
            local_dim: self.d,
            state_names: self.set.names().to_vec(),
            steps: self.steps,
            outcome,
            unresolved,
            notes: self.notes,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

/// Zero-entry facts from single-support rows between non-stopper states.
pub fn lemma1_scan(set: &StateSet, party: usize) -> Result<Vec<EntryFact>> {
    let mut engine = ProofEngine::new(set, party)?;
    engine.lemma1_scan();
    Ok(engine.steps)
}

/// Propagation to a fixed point starting from `known` facts; returns the
/// newly derived facts.
pub fn propagate(set: &StateSet, party: usize, known: &[EntryFact]) -> Result<Vec<EntryFact>> {
    let mut engine = ProofEngine::new(set, party)?;
    engine.absorb(known);
    let before = engine.steps.len();
    engine.propagate();
    Ok(engine.steps.split_off(before))
}

/// Diagonal-equality facts, provided every off-diagonal in `known` is
/// zero and the set contains a stopper; empty (with a skip note) when
/// the preconditions are unmet.
pub fn lemma2_scan(set: &StateSet, party: usize, known: &[EntryFact]) -> Result<Vec<EntryFact>> {
    let mut engine = ProofEngine::new(set, party)?;
    engine.absorb(known);
    let before = engine.steps.len();
    engine.lemma2_scan();
    Ok(engine.steps.split_off(before))
}

impl<'a> ProofEngine<'a> {
    /// Seeds the fact store from previously derived facts.
    fn absorb(&mut self, known: &[EntryFact]) {
        for fact in known {
            match fact.kind {
                FactKind::Zero { x, y } => {
                    self.zeros.insert((x, y));
                }
                FactKind::Proportional {
                    x1,
                    y1,
                    x2,
                    y2,
                    factor,
                } => {
                    self.props.insert((x1, y1), ((x2, y2), factor, fact.inputs));
                }
                FactKind::EqualDiag { a, b } => {
                    self.diag_pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
}

/// Full pipeline: zero-entry scan, propagation, diagonal scan, diagonal
/// union-find. `Trivial` means every off-diagonal entry is zero and all
/// diagonals fall in one equality class; `Inconclusive` is not a
/// disproof.
pub fn prove_trivial(set: &StateSet, party: usize) -> Result<ProofTrace> {
    let mut engine = ProofEngine::new(set, party)?;
    engine.lemma1_scan();
    engine.propagate();
    engine.lemma2_scan();
    debug_assert!(
        engine.rounds() <= (engine.d * engine.d + engine.d) as usize + 1,
        "propagation exceeded the round bound"
    );
    Ok(engine.build_trace())
}

/// Mismatches between a trace's facts and an oracle nullspace report:
/// zero facts must vanish in every basis matrix, proportionality must
/// hold entrywise, and diagonal equalities must hold after projecting
/// each basis matrix onto its Hermitian part.
pub fn check_against_oracle(
    trace: &ProofTrace,
    report: &NullspaceReport<f64>,
    tol: f64,
) -> Vec<String> {
    let mut mismatches = Vec::new();
    let d = report.local_dim;
    for fact in &trace.steps {
        for (b, basis) in report.basis.iter().enumerate() {
            let entry = |x: u32, y: u32| basis[(x * d + y) as usize];
            match &fact.kind {
                FactKind::Zero { x, y } => {
                    let mag = entry(*x, *y).norm();
                    if mag > tol {
                        mismatches
                            .push(format!(
                            "step {}: m[{x},{y}] = 0 violated in basis {b} (|entry| = {mag:.3e})"
                        , fact.step));
                    }
                }
                FactKind::Proportional {
                    x1,
                    y1,
                    x2,
                    y2,
                    factor,
                } => {
                    let lhs = entry(*x1, *y1);
                    let rhs = factor.value() * entry(*x2, *y2);
                    let err = (lhs - rhs).norm();
                    if err > tol {
                        mismatches.push(format!(
                            "step {}: m[{x1},{y1}] = {factor} * m[{x2},{y2}] violated in basis {b} (err = {err:.3e})",
                            fact.step
                        ));
                    }
                }
                FactKind::EqualDiag { a: da, b: db } => {
                    // Hermitian projection: H = (B + B^dagger) / 2
                    let haa = (entry(*da, *da) + entry(*da, *da).conj()) / 2.0;
                    let hbb = (entry(*db, *db) + entry(*db, *db).conj()) / 2.0;
                    let err = (haa - hbb).norm();
                    if err > tol {
                        mismatches.push(format!(
                            "step {}: m[{da},{da}] = m[{db},{db}] violated in basis {b} (err = {err:.3e})",
                            fact.step
                        ));
                    }
                }
            }
        }
    }
    mismatches
}

/// Output form for [`render_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Text,
    Structured,
}

/// Renders a trace: human-readable text, or the persisted structured
/// document (JSON).
pub fn render_trace(trace: &ProofTrace, format: TraceFormat) -> String {
    match format {
        TraceFormat::Text => render_text(trace),
        TraceFormat::Structured => crate::setio::export_trace(trace),
    }
}

fn name_of(trace: &ProofTrace, input: &InputRef) -> String {
    match input {
        InputRef::Stopper => "S".to_string(),
        InputRef::State(i) => trace
            .state_names
            .get(*i)
            .cloned()
            .unwrap_or_else(|| format!("phi_{i}")),
    }
}

/// Follows proportionality links backwards and returns the chain root
/// and the composed factor, when the chain has more than one link.
fn composed_chain(trace: &ProofTrace, start: (u32, u32)) -> Option<((u32, u32), Factor)> {
    let links: BTreeMap<(u32, u32), ((u32, u32), Factor)> = trace
        .steps
        .iter()
        .filter_map(|s| match &s.kind {
            FactKind::Proportional {
                x1,
                y1,
                x2,
                y2,
                factor,
            } => Some(((*x1, *y1), ((*x2, *y2), *factor))),
            _ => None,
        })
        .collect();
    let (mut at, mut factor) = links.get(&start).copied()?;
    let mut hops = 1;
    while let Some((next, f)) = links.get(&at) {
        factor = factor.compose(f);
        at = *next;
        hops += 1;
        if hops > links.len() {
            break; // defensive: malformed cyclic input
        }
    }
    (hops > 1).then_some((at, factor))
}

fn render_text(trace: &ProofTrace) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let outcome = match trace.outcome {
        Outcome::Trivial => "trivial",
        Outcome::Inconclusive => "inconclusive",
    };
    let _ = writeln!(
        out,
        "party {} (local dim {}) -- outcome: {}",
        trace.party, trace.local_dim, outcome
    );
    if trace.steps.is_empty() {
        let _ = writeln!(out, "  no facts");
    }
    for fact in &trace.steps {
        let inputs = format!(
            "({}, {})",
            name_of(trace, &fact.inputs.0),
            name_of(trace, &fact.inputs.1)
        );
        let line = match &fact.kind {
            FactKind::Zero { x, y } => {
                let mut s = format!("m[{x},{y}] = 0");
                if fact.rule == Rule::PropagatedZero {
                    if let Some((root, f)) = composed_chain(trace, (*x, *y)) {
                        s.push_str(&format!(
                            "  (chain: m[{x},{y}] = {f} * m[{},{}])",
                            root.0, root.1
                        ));
                    }
                }
                s
            }
            FactKind::Proportional {
                x1,
                y1,
                x2,
                y2,
                factor,
            } => format!("m[{x1},{y1}] = {factor} * m[{x2},{y2}]"),
            FactKind::EqualDiag { a, b } => format!("m[{a},{a}] = m[{b},{b}]"),
        };
        let rule_note = if fact.rule == Rule::Lemma2 {
            format!("{}; 1 + w_p + ... + w_p^(p-1) = 0", fact.rule.id())
        } else {
            fact.rule.id().to_string()
        };
        let _ = writeln!(
            out,
            "  step {:>3}: {line}  [{rule_note}: {inputs}]",
            fact.step
        );
    }
    if !trace.unresolved.is_empty() {
        let coords: Vec<String> = trace
            .unresolved
            .iter()
            .map(|(x, y)| format!("({x},{y})"))
            .collect();
        let _ = writeln!(out, "  unresolved: {}", coords.join(" "));
    }
    for note in &trace.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    out
}
