//! Versioned text interchange: state sets, stability reports, and proof
//! traces as deterministic JSON documents.
//!
//! Set documents carry coefficients exactly (integers only, no floats)
//! so a set round-trips byte-identically and is portable across
//! tolerance settings. Report documents are export-only; their floats
//! are serialized with 17 significant digits.

use serde::{Deserialize, Serialize};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::prover::{FactKind, Factor, InputRef, Outcome, ProofTrace};
use crate::solver::StabilityVerdict;
use crate::state::{BasisTerm, PureState, StateSet, SystemShape};

/// Version gate for every document this module reads or writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDocument {
    pub format_version: u32,
    pub dims: Vec<u32>,
    pub states: Vec<StateDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDocument {
    pub name: String,
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDocument {
    pub labels: Vec<u32>,
    pub coeff: CoeffDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffDocument {
    pub num: i64,
    pub den: i64,
    pub phase_num: i64,
    pub phase_den: i64,
}

impl From<&Coefficient> for CoeffDocument {
    fn from(c: &Coefficient) -> Self {
        Self {
            num: *c.scale().numer(),
            den: *c.scale().denom(),
            phase_num: c.phase_num(),
            phase_den: c.phase_den(),
        }
    }
}

impl CoeffDocument {
    fn to_coefficient(&self) -> Result<Coefficient> {
        Coefficient::new(self.num, self.den, self.phase_num, self.phase_den)
    }
}

pub fn set_to_document(set: &StateSet) -> SetDocument {
    SetDocument {
        format_version: FORMAT_VERSION,
        dims: set.shape().dims().to_vec(),
        states: set
            .states()
            .iter()
            .zip(set.names())
            .map(|(state, name)| StateDocument {
                name: name.clone(),
                terms: state
                    .terms()
                    .iter()
                    .map(|t| TermDocument {
                        labels: t.labels.clone(),
                        coeff: (&t.coeff).into(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Controls for [`import_set`]. Orthogonality validation is on by
/// default; suppressing it admits arbitrary (e.g. deliberately
/// non-orthogonal) sets for inspection.
#[derive(Debug, Clone, Copy)]
pub struct ImportOptions {
    pub validate_orthogonality: bool,
    pub orthogonality_tol: f64,
}

impl Default for ImportOptions {
    fn default() -> Self {
        Self {
            validate_orthogonality: true,
            orthogonality_tol: crate::DEFAULT_ORTHO_TOL,
        }
    }
}

pub fn document_to_set(doc: &SetDocument, options: ImportOptions) -> Result<StateSet> {
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::UnsupportedFormatVersion(
            doc.format_version,
            FORMAT_VERSION,
        ));
    }
    let shape = SystemShape::new(doc.dims.clone())?;
    let mut states = Vec::with_capacity(doc.states.len());
    let mut names = Vec::with_capacity(doc.states.len());
    for state_doc in &doc.states {
        let terms = state_doc
            .terms
            .iter()
            .map(|t| Ok(BasisTerm::new(t.labels.clone(), t.coeff.to_coefficient()?)))
            .collect::<Result<Vec<_>>>()?;
        states.push(PureState::new(shape.clone(), terms)?);
        names.push(state_doc.name.clone());
    }
    let set = StateSet::new_unchecked(shape, states)?.with_names(names)?;
    if options.validate_orthogonality {
        set.require_orthogonal(options.orthogonality_tol)?;
    }
    Ok(set)
}

/// Serializes a set as deterministic pretty JSON (newline-terminated).
pub fn export_set(set: &StateSet) -> String {
    let mut text = serde_json::to_string_pretty(&set_to_document(set))
        .expect("set documents always serialize");
    text.push('\n');
    text
}

pub fn import_set(text: &str, options: ImportOptions) -> Result<StateSet> {
    let doc: SetDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    document_to_set(&doc, options)
}

/// JSON number with 17 significant digits.
fn f17(x: f64) -> serde_json::Number {
    format!("{x:.16e}")
        .parse()
        .expect("formatted float parses as a JSON number")
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub format_version: u32,
    pub dims: Vec<u32>,
    pub locally_stable: bool,
    pub cardinality: CardinalityDocument,
    pub rank_tolerance: serde_json::Number,
    pub orthogonality_tolerance: serde_json::Number,
    pub method: String,
    pub triviality_criterion: String,
    pub parties: Vec<PartyDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<TraceDocument>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CardinalityDocument {
    pub cardinality: usize,
    pub bound: usize,
    pub meets_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartyDocument {
    pub party: usize,
    pub local_dim: u32,
    pub nullspace_dimension: usize,
    pub trivial: bool,
    pub method: String,
    pub scale: serde_json::Number,
    pub identity_residual: serde_json::Number,
}

pub fn report_to_document(
    verdict: &StabilityVerdict<f64>,
    traces: Option<&[ProofTrace]>,
) -> ReportDocument {
    ReportDocument {
        format_version: FORMAT_VERSION,
        dims: verdict.reports.iter().map(|r| r.local_dim).collect(),
        locally_stable: verdict.locally_stable,
        cardinality: CardinalityDocument {
            cardinality: verdict.bound.cardinality,
            bound: verdict.bound.bound,
            meets_bound: verdict.bound.meets_bound,
        },
        rank_tolerance: f17(verdict.rank_tolerance),
        orthogonality_tolerance: f17(verdict.orthogonality_tolerance),
        method: verdict.method.to_string(),
        triviality_criterion: crate::solver::TRIVIALITY_CRITERION.to_string(),
        parties: verdict
            .reports
            .iter()
            .map(|r| PartyDocument {
                party: r.party,
                local_dim: r.local_dim,
                nullspace_dimension: r.dimension,
                trivial: r.trivial,
                method: r.method.to_string(),
                scale: f17(r.scale),
                identity_residual: f17(r.identity_residual),
            })
            .collect(),
        traces: traces.map(|ts| ts.iter().map(trace_to_document).collect()),
    }
}

/// Serializes a verdict (optionally with embedded traces).
pub fn export_report(verdict: &StabilityVerdict<f64>, traces: Option<&[ProofTrace]>) -> String {
    let mut text = serde_json::to_string_pretty(&report_to_document(verdict, traces))
        .expect("report documents always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceDocument {
    pub format_version: u32,
    pub party: usize,
    pub local_dim: u32,
    pub outcome: String,
    pub state_names: Vec<String>,
    pub steps: Vec<StepDocument>,
    pub unresolved: Vec<(u32, u32)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepDocument {
    pub step: usize,
    pub rule: String,
    pub inputs: (InputDocument, InputDocument),
    pub fact: FactDocument,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum InputDocument {
    Index(usize),
    Stopper(&'static str),
}

impl From<&InputRef> for InputDocument {
    fn from(input: &InputRef) -> Self {
        match input {
            InputRef::State(i) => InputDocument::Index(*i),
            InputRef::Stopper => InputDocument::Stopper("S"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FactDocument {
    Zero {
        x: u32,
        y: u32,
    },
    Proportional {
        x1: u32,
        y1: u32,
        x2: u32,
        y2: u32,
        factor: FactorDocument,
    },
    EqualDiag {
        a: u32,
        b: u32,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum FactorDocument {
    Exact(CoeffDocument),
    Approx {
        re: serde_json::Number,
        im: serde_json::Number,
    },
}

impl From<&Factor> for FactorDocument {
    fn from(factor: &Factor) -> Self {
        match factor {
            Factor::Exact(c) => FactorDocument::Exact(c.into()),
            Factor::Approx { re, im } => FactorDocument::Approx {
                re: f17(*re),
                im: f17(*im),
            },
        }
    }
}

pub fn trace_to_document(trace: &ProofTrace) -> TraceDocument {
    TraceDocument {
        format_version: FORMAT_VERSION,
        party: trace.party,
        local_dim: trace.local_dim,
        outcome: match trace.outcome {
            Outcome::Trivial => "trivial".into(),
            Outcome::Inconclusive => "inconclusive".into(),
        },
        state_names: trace.state_names.clone(),
        steps: trace
            .steps
            .iter()
            .map(|fact| StepDocument {
                step: fact.step,
                rule: fact.rule.id().into(),
                inputs: ((&fact.inputs.0).into(), (&fact.inputs.1).into()),
                fact: match &fact.kind {
                    FactKind::Zero { x, y } => FactDocument::Zero { x: *x, y: *y },
                    FactKind::Proportional {
                        x1,
                        y1,
                        x2,
                        y2,
                        factor,
                    } => FactDocument::Proportional {
                        x1: *x1,
                        y1: *y1,
                        x2: *x2,
                        y2: *y2,
                        factor: factor.into(),
                    },
                    FactKind::EqualDiag { a, b } => FactDocument::EqualDiag { a: *a, b: *b },
                },
            })
            .collect(),
        unresolved: trace.unresolved.clone(),
        notes: trace.notes.clone(),
    }
}

/// Serializes one proof trace as the persisted structured form.
pub fn export_trace(trace: &ProofTrace) -> String {
    let mut text = serde_json::to_string_pretty(&trace_to_document(trace))
        .expect("trace documents always serialize");
    text.push('\n');
    text
}

/// Serializes several traces as one JSON array.
pub fn export_traces(traces: &[ProofTrace]) -> String {
    let docs: Vec<TraceDocument> = traces.iter().map(trace_to_document).collect();
    let mut text = serde_json::to_string_pretty(&docs).expect("trace documents always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::prover::{prove_trivial, TraceFormat};
    use crate::solver::verify_local_stability;

    #[test]
    fn export_counts_terms() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let doc = set_to_document(&set);
        assert_eq!(doc.dims, vec![3, 3]);
        assert_eq!(doc.states.len(), 4);
        let total_terms: usize = doc.states.iter().map(|s| s.terms.len()).sum();
        // 2 + 2 + 2 + 9
        assert_eq!(total_terms, 15);
        assert_eq!(doc.states[0].name, "phi_0");
        assert_eq!(doc.states[3].name, "S");
    }

    #[test]
    fn round_trip_is_identity() {
        let set = families::multipartite_equal(2, 3).unwrap();
        let text = export_set(&set);
        let back = import_set(&text, ImportOptions::default()).unwrap();
        assert_eq!(back, set);
        assert_eq!(export_set(&back), text);
    }

    #[test]
    fn label_out_of_range_is_reported_with_party() {
        let text = r#"{
            "format_version": 1,
            "dims": [3, 3],
            "states": [
                {"name": "bad", "terms": [
                    {"labels": [3, 0], "coeff": {"num": 1, "den": 1, "phase_num": 0, "phase_den": 1}}
                ]}
            ]
        }"#;
        let err = import_set(text, ImportOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "label 3 >= dim 3 at party 0");
    }

    #[test]
    fn non_orthogonal_import_is_rejected_unless_suppressed() {
        let text = r#"{
            "format_version": 1,
            "dims": [2, 2],
            "states": [
                {"name": "a", "terms": [
                    {"labels": [0, 0], "coeff": {"num": 1, "den": 1, "phase_num": 0, "phase_den": 1}}
                ]},
                {"name": "b", "terms": [
                    {"labels": [0, 0], "coeff": {"num": 1, "den": 1, "phase_num": 0, "phase_den": 1}},
                    {"labels": [1, 1], "coeff": {"num": 1, "den": 1, "phase_num": 0, "phase_den": 1}}
                ]}
            ]
        }"#;
        let err = import_set(text, ImportOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotOrthogonal { i: 0, j: 1, .. }));
        let lax = ImportOptions {
            validate_orthogonality: false,
            ..Default::default()
        };
        assert!(import_set(text, lax).is_ok());
    }

    #[test]
    fn unknown_format_version_is_a_distinct_error() {
        let text = r#"{"format_version": 2, "dims": [2, 2], "states": []}"#;
        let err = import_set(text, ImportOptions::default()).unwrap_err();
        assert_eq!(err, Error::UnsupportedFormatVersion(2, 1));
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        let err = import_set("{not json", ImportOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn report_document_contents() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let verdict = verify_local_stability(&set, 1e-8).unwrap();
        let text = export_report(&verdict, None);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["locally_stable"], serde_json::Value::Bool(true));
        assert_eq!(value["cardinality"]["cardinality"], 4);
        assert_eq!(value["cardinality"]["bound"], 4);
        assert_eq!(value["cardinality"]["meets_bound"], true);
        assert_eq!(value["parties"][0]["nullspace_dimension"], 1);
        assert_eq!(value["parties"][1]["nullspace_dimension"], 1);
        // 17 significant digits survive in the raw text
        assert!(text.contains("1.0000000000000000e-8"));
    }

    #[test]
    fn trace_document_shape() {
        let set = families::bipartite_equal(3, 2).unwrap();
        let trace = prove_trivial(&set, 0).unwrap();
        let text = crate::prover::render_trace(&trace, TraceFormat::Structured);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["format_version"], 1);
        assert_eq!(value["outcome"], "trivial");
        assert!(!value["steps"].as_array().unwrap().is_empty());
        let first = &value["steps"][0];
        assert!(first["rule"].is_string());
        assert!(first["fact"]["type"].is_string());
        // stopper inputs serialize as "S"
        let has_stopper_input = value["steps"]
            .as_array()
            .unwrap()
            .iter()
            .any(|s| s["inputs"].as_array().unwrap().iter().any(|i| i == "S"));
        assert!(has_stopper_input);
    }
}
