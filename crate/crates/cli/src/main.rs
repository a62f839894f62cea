//! `locstab`: generate, verify, prove, and inspect locally stable sets.
//!
//! Exit codes: 0 = affirmative verdict, 1 = negative or inconclusive
//! verdict, 2 = usage or data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use locstab::families::{self, family_catalog};
use locstab::prover::{self, Outcome, TraceFormat};
use locstab::setio::{self, ImportOptions};
use locstab::solver::{self, NullspaceMethod};
use locstab::state::{is_orthogonal_set, StateSet};
use locstab::{entangle, DEFAULT_ORTHO_TOL, DEFAULT_RANK_TOL};

#[derive(Parser)]
#[command(
    name = "locstab",
    about = "Locally stable sets of multipartite orthogonal quantum states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a family and write its set document.
    Generate {
        /// Family name (see `locstab info <family>` for hypotheses).
        family: String,
        /// Integer dimension parameters, e.g. `5` or `3 4 5 6`.
        #[arg(required = true)]
        params: Vec<u32>,
        /// Off-index k of the seed state (bipartite_equal only).
        #[arg(long)]
        variant_k: Option<u32>,
        /// Output path; the document goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide local stability of a stored set.
    Verify {
        /// Set document to verify.
        input: PathBuf,
        /// Relative rank tolerance for nullspace dimensions.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        /// Orthogonality validation tolerance.
        #[arg(long, default_value_t = DEFAULT_ORTHO_TOL)]
        ortho_tol: f64,
        /// Verify a single party (0-based) instead of all of them.
        #[arg(long)]
        party: Option<usize>,
        /// Rank backend.
        #[arg(long, value_enum, default_value_t = MethodArg::Svd)]
        method: MethodArg,
        /// Also re-verify the set with each state removed in turn.
        #[arg(long)]
        deletion_test: bool,
        /// Write a JSON report document here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Skip orthogonality validation at import (the verdict itself
        /// still requires an orthogonal set).
        #[arg(long)]
        no_validate: bool,
    },
    /// Run the deduction engine and emit proof traces.
    Prove {
        /// Set document to prove.
        input: PathBuf,
        /// Prove a single party (0-based) instead of all of them.
        #[arg(long)]
        party: Option<usize>,
        /// Trace output form.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Cross-check every derived fact against the numeric nullspace.
        #[arg(long)]
        check_against_oracle: bool,
        /// Exit 0 even when an outcome is inconclusive.
        #[arg(long)]
        allow_inconclusive: bool,
        /// Relative rank tolerance for the oracle cross-check.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        /// Orthogonality validation tolerance.
        #[arg(long, default_value_t = DEFAULT_ORTHO_TOL)]
        ortho_tol: f64,
    },
    /// Describe a stored set, or a family by catalog name.
    Info {
        /// Set document path, or one of the family names.
        target: String,
        /// For bipartite sets, print the label-grid sketch.
        #[arg(long)]
        grid: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Svd,
    Rref,
}

impl From<MethodArg> for NullspaceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Svd => NullspaceMethod::Svd,
            MethodArg::Rref => NullspaceMethod::Rref,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Generate {
            family,
            params,
            variant_k,
            out,
        } => generate(&family, &params, variant_k, out),
        Command::Verify {
            input,
            tol,
            ortho_tol,
            party,
            method,
            deletion_test,
            report,
            no_validate,
        } => {
            let set = load_set(&input, ortho_tol, no_validate)?;
            verify(
                &set,
                tol,
                ortho_tol,
                party,
                method.into(),
                deletion_test,
                report,
            )
        }
        Command::Prove {
            input,
            party,
            format,
            check_against_oracle,
            allow_inconclusive,
            tol,
            ortho_tol,
        } => {
            let set = load_set(&input, ortho_tol, false)?;
            prove(
                &set,
                party,
                format,
                check_against_oracle,
                allow_inconclusive,
                tol,
                ortho_tol,
            )
        }
        Command::Info { target, grid } => info(&target, grid),
    }
}

fn load_set(
    path: &PathBuf,
    ortho_tol: f64,
    no_validate: bool,
) -> Result<StateSet, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    let options = ImportOptions {
        validate_orthogonality: !no_validate,
        orthogonality_tol: ortho_tol,
    };
    Ok(setio::import_set(&text, options)?)
}

fn generate(
    family: &str,
    params: &[u32],
    variant_k: Option<u32>,
    out: Option<PathBuf>,
) -> Result<u8, Box<dyn std::error::Error>> {
    if variant_k.is_some() && family != "bipartite_equal" {
        return Err("--variant-k applies to bipartite_equal only".into());
    }
    let set = families::construct(family, params, variant_k)?;
    let bound = solver::CardinalityBound::of(&set);
    let document = setio::export_set(&set);
    let summary = format!(
        "{} {:?}: {} states, cardinality bound {} ({})",
        family,
        set.shape().dims(),
        bound.cardinality,
        bound.bound,
        if bound.meets_bound { "met" } else { "not met" }
    );
    match out {
        Some(path) => {
            std::fs::write(&path, document)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{document}");
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    set: &StateSet,
    tol: f64,
    ortho_tol: f64,
    party: Option<usize>,
    method: NullspaceMethod,
    deletion: bool,
    report: Option<PathBuf>,
) -> Result<u8, Box<dyn std::error::Error>> {
    println!(
        "dims {:?}, {} states; rank tolerance {tol:e}, orthogonality tolerance {ortho_tol:e}",
        set.shape().dims(),
        set.len()
    );
    let verdict = solver::verify_local_stability_with(set, tol, ortho_tol, method)?;
    let selected: Vec<usize> = match party {
        Some(p) => {
            if p >= set.shape().arity() {
                return Err(format!(
                    "party {p} out of range (set has {} parties)",
                    set.shape().arity()
                )
                .into());
            }
            vec![p]
        }
        None => (0..set.shape().arity()).collect(),
    };
    for &p in &selected {
        let r = &verdict.reports[p];
        println!(
            "party {p}: local dim {}, nullspace dimension {}, {} [{}]",
            r.local_dim,
            r.dimension,
            if r.trivial { "trivial" } else { "not trivial" },
            r.method
        );
    }
    println!(
        "cardinality {} vs bound {}: {}",
        verdict.bound.cardinality,
        verdict.bound.bound,
        if verdict.bound.meets_bound {
            "met"
        } else {
            "not met"
        }
    );
    let stable = match party {
        Some(p) => verdict.reports[p].trivial,
        None => verdict.locally_stable,
    };
    println!("locally stable: {}", if stable { "yes" } else { "no" });
    println!("criterion: {}", solver::TRIVIALITY_CRITERION);
    if deletion {
        println!("deletion test:");
        for outcome in solver::deletion_test(set, tol)? {
            println!(
                "  removed {} ({}): locally stable: {}, dimensions {:?}",
                outcome.removed,
                set.names()[outcome.removed],
                if outcome.locally_stable { "yes" } else { "no" },
                outcome.dimensions
            );
        }
    }
    if let Some(path) = report {
        std::fs::write(&path, setio::export_report(&verdict, None))?;
        println!("wrote {}", path.display());
    }
    Ok(u8::from(!stable))
}

fn prove(
    set: &StateSet,
    party: Option<usize>,
    format: FormatArg,
    check_oracle: bool,
    allow_inconclusive: bool,
    tol: f64,
    ortho_tol: f64,
) -> Result<u8, Box<dyn std::error::Error>> {
    let selected: Vec<usize> = match party {
        Some(p) => {
            if p >= set.shape().arity() {
                return Err(format!(
                    "party {p} out of range (set has {} parties)",
                    set.shape().arity()
                )
                .into());
            }
            vec![p]
        }
        None => (0..set.shape().arity()).collect(),
    };
    let mut traces = Vec::new();
    for &p in &selected {
        traces.push(prover::prove_trivial(set, p)?);
    }
    match format {
        FormatArg::Text => {
            for trace in &traces {
                print!("{}", prover::render_trace(trace, TraceFormat::Text));
            }
        }
        FormatArg::Structured => {
            print!("{}", setio::export_traces(&traces));
        }
    }
    let mut sound = true;
    if check_oracle {
        for trace in &traces {
            let cs = locstab::ConstraintSystem64::build(set, trace.party, ortho_tol)?;
            let report = solver::nullspace(&cs, tol);
            let mismatches = prover::check_against_oracle(trace, &report, tol);
            if mismatches.is_empty() {
                eprintln!(
                    "party {}: {} facts consistent with the oracle (dimension {})",
                    trace.party,
                    trace.steps.len(),
                    report.dimension
                );
            } else {
                sound = false;
                for m in mismatches {
                    eprintln!("party {}: oracle mismatch: {m}", trace.party);
                }
            }
        }
    }
    if !sound {
        return Ok(1);
    }
    let all_trivial = traces.iter().all(|t| t.outcome == Outcome::Trivial);
    Ok(u8::from(!(all_trivial || allow_inconclusive)))
}

fn info(target: &str, grid: bool) -> Result<u8, Box<dyn std::error::Error>> {
    if let Some(entry) = family_catalog().iter().find(|f| f.name == target) {
        println!("family: {}", entry.name);
        println!("parameters: {}", entry.params);
        println!("hypothesis: {}", entry.hypothesis);
        println!("result: {}", entry.theorem);
        println!("description: {}", entry.description);
        return Ok(0);
    }
    let path = PathBuf::from(target);
    let set = load_set(&path, DEFAULT_ORTHO_TOL, true)?;
    let bound = solver::CardinalityBound::of(&set);
    println!("dims {:?}", set.shape().dims());
    println!(
        "cardinality {} vs bound {}: {}",
        bound.cardinality,
        bound.bound,
        if bound.meets_bound { "met" } else { "not met" }
    );
    match is_orthogonal_set(&set, DEFAULT_ORTHO_TOL) {
        (true, _) => println!("pairwise orthogonal: yes (tol {DEFAULT_ORTHO_TOL:e})"),
        (false, Some((i, j))) => {
            println!("pairwise orthogonal: no (first offending pair: {i}, {j})")
        }
        (false, None) => unreachable!(),
    }
    let stopper = set.stopper_index();
    for (i, (state, name)) in set.states().iter().zip(set.names()).enumerate() {
        let role = if Some(i) == stopper {
            "stopper"
        } else if entangle::is_genuinely_entangled(state, DEFAULT_RANK_TOL) {
            "genuinely entangled: yes"
        } else {
            "genuinely entangled: no"
        };
        println!("state {i} ({name}): {} terms, {role}", state.num_terms());
    }
    if grid {
        if set.shape().arity() == 2 {
            print!("{}", render_grid(&set));
        } else {
            eprintln!("--grid is only drawn for bipartite sets");
        }
    }
    Ok(0)
}

/// Label-grid sketch of a bipartite set: rows are party-A labels, columns
/// party-B labels; each cell names the non-stopper state whose term sits
/// there (`.` empty, `*` shared by several states).
fn render_grid(set: &StateSet) -> String {
    let dims = set.shape().dims();
    let (d1, d2) = (dims[0] as usize, dims[1] as usize);
    let mut cells: Vec<Vec<Option<usize>>> = vec![vec![None; d2]; d1];
    let mut shared: Vec<Vec<bool>> = vec![vec![false; d2]; d1];
    let stopper = set.stopper_index();
    for (i, state) in set.states().iter().enumerate() {
        if Some(i) == stopper {
            continue;
        }
        for t in state.terms() {
            let (a, b) = (t.labels[0] as usize, t.labels[1] as usize);
            match cells[a][b] {
                None => cells[a][b] = Some(i),
                Some(existing) if existing != i => shared[a][b] = true,
                _ => {}
            }
        }
    }
    let glyph = |i: usize| char::from_digit(i as u32, 36).unwrap_or('#');
    let mut out = String::new();
    for a in 0..d1 {
        for b in 0..d2 {
            let c = if shared[a][b] {
                '*'
            } else {
                cells[a][b].map(glyph).unwrap_or('.')
            };
            out.push(c);
            if b + 1 < d2 {
                out.push(' ');
            }
        }
        out.push('\n');
    }
    out
}
