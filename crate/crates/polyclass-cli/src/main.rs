// SPDX-License-Identifier: MIT OR Apache-2.0
//! Command-line front end for the clone-classification library.
//!
//! Single binary, subcommand style.  Inputs are JSON, either inline (the
//! argument starts with `{`) or from a file path.  Output goes to stdout
//! and is byte-deterministic for a fixed input and configuration;
//! diagnostics go to stderr.  Exit codes: 0 success, 2 input error,
//! 3 budget exhausted, 4 verification failure.
//!
//! Schemas (all indices 0-based, numerics plain integers):
//! - Boolean multisorted structure:
//!   `{"sorts": [[0,1], ...], "relations": [{"type": [s..], "tuples": [[..]..]}]}`
//! - finite-domain structure: `{"domain": l, "relations": [{"tuples": [[..]..]}]}`
//! - description: `{"k": k, "constraints": [{"kind": "tri"|"eq",
//!   "lhs": [symbol, dual], "rhs": [symbol, dual]}]}`
//! - reduced description: as above with `"f"`, `"g"` instead of `"k"`,
//!   `g`-symbols numbered after the `f`-symbols
//! - clone truncation (for `enumerate`, `hom`, `core`): a canonical core
//!   `{"core": "A2"}`, a description, or a reduced description.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use polyclass_core::canon::{core_enumerate, poset_dot, CoreId};
use polyclass_core::classify::{classify_relations, ClassificationReport};
use polyclass_core::descriptions::{
    to_reduced, Constraint, Description, Literal, RSymbol, ReducedConstraint, ReducedDescription,
};
use polyclass_core::error::{Budget, Error as CoreError};
use polyclass_core::mincore::{
    compute_core_truncated, hom_search, is_core_truncated, TruncatedHom, TruncatedMinion,
};
use polyclass_core::multisorted::{MultiOp, SortedSignature, Structure, TypedRelation};
use polyclass_core::translate::{classify_finite, translate_small_projections, FiniteClassification};

#[derive(Parser)]
#[command(
    name = "polyclass",
    version,
    about = "Classify multisorted Boolean clones and small-projection finite structures \
             up to minion homomorphism"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a structure (Boolean multisorted, or finite-domain with
    /// small projections) onto its canonical core, with verified witnesses.
    Classify(CommonArgs),
    /// Translate a finite-domain structure with small projections into a
    /// Boolean multisorted structure plus sort dictionary.
    Translate(CommonArgs),
    /// Reduce a description to its normal form.
    Reduce(CommonArgs),
    /// Enumerate a clone truncation up to the arity cap.
    Enumerate(CommonArgs),
    /// Search for a homomorphism between two clone truncations
    /// (`{"source": .., "target": ..}`).
    Hom(CommonArgs),
    /// Compute the core of a clone truncation.
    Core(CommonArgs),
    /// Emit the homomorphism order on the canonical cores as DOT.
    Poset(PosetArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input: inline JSON (starting with '{') or a file path.
    #[arg(long)]
    input: String,
    /// Arity cap for verification and truncations (2..=5).
    #[arg(long, default_value_t = 4)]
    arity_cap: u8,
    /// Budget in elementary enumeration steps.
    #[arg(long, default_value_t = 200_000_000)]
    budget_ops: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct PosetArgs {
    /// Largest finite index to include.
    #[arg(long, default_value_t = 3)]
    max_k: u32,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

/// A diagnostic plus the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::BudgetExceeded { .. } => 3,
            CoreError::VerificationFailed { .. } | CoreError::Internal { .. } => 4,
            _ => 2,
        };
        CliError {
            code,
            message: format!("{e:?}"),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("invalid JSON: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(output) => {
            use std::io::Write as _;
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{output}").and_then(|()| stdout.flush()) {
                // A closed pipe (e.g. `polyclass poset | head`) is not an
                // error worth reporting.
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    std::process::exit(2);
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Classify(args) => cmd_classify(&args),
        Command::Translate(args) => cmd_translate(&args),
        Command::Reduce(args) => cmd_reduce(&args),
        Command::Enumerate(args) => cmd_enumerate(&args),
        Command::Hom(args) => cmd_hom(&args),
        Command::Core(args) => cmd_core(&args),
        Command::Poset(args) => cmd_poset(&args),
    }
}

// ---------------------------------------------------------------------------
// Input handling

fn load_input(args: &CommonArgs) -> Result<serde_json::Value, CliError> {
    let raw = if args.input.trim_start().starts_with('{') {
        args.input.clone()
    } else {
        std::fs::read_to_string(&args.input)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.input)))?
    };
    Ok(serde_json::from_str(&raw)?)
}

fn budget_of(args: &CommonArgs) -> Result<Budget, CliError> {
    if args.budget_ops == 0 {
        return Err(CliError::input("--budget-ops must be positive"));
    }
    Ok(Budget::new(args.budget_ops))
}

fn check_cap(args: &CommonArgs) -> Result<(), CliError> {
    if !(2..=5).contains(&args.arity_cap) {
        return Err(CliError::input("--arity-cap must be between 2 and 5"));
    }
    Ok(())
}

fn reject_dot(args: &CommonArgs) -> Result<(), CliError> {
    if args.format == Format::Dot {
        return Err(CliError::input(
            "dot output is only available for the poset command",
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON schemas

#[derive(Serialize, Deserialize)]
struct RelationJson {
    #[serde(rename = "type")]
    typ: Vec<usize>,
    tuples: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    sorts: Vec<Vec<u8>>,
    relations: Vec<RelationJson>,
}

#[derive(Deserialize)]
struct FiniteRelationJson {
    tuples: Vec<Vec<u8>>,
}

#[derive(Deserialize)]
struct FiniteJson {
    domain: u8,
    relations: Vec<FiniteRelationJson>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintJson {
    kind: String,
    lhs: (usize, bool),
    rhs: (usize, bool),
}

#[derive(Deserialize)]
struct DescriptionJson {
    k: usize,
    constraints: Vec<ConstraintJson>,
}

#[derive(Deserialize)]
struct ReducedJson {
    f: usize,
    g: usize,
    constraints: Vec<ConstraintJson>,
}

fn structure_from_json(v: serde_json::Value) -> Result<Structure, CliError> {
    let parsed: StructureJson = serde_json::from_value(v)?;
    let signature = SortedSignature::new(parsed.sorts)?;
    let relations = parsed
        .relations
        .into_iter()
        .map(|r| TypedRelation::new(r.typ, r.tuples.into_iter().collect::<BTreeSet<_>>()))
        .collect();
    Ok(Structure::new(signature, relations)?)
}

fn structure_to_json(s: &Structure) -> Result<StructureJson, CliError> {
    let mut sorts = Vec::with_capacity(s.signature.sorts());
    for i in 0..s.signature.sorts() {
        sorts.push(s.signature.carrier(i)?.to_vec());
    }
    let relations = s
        .relations
        .iter()
        .map(|r| RelationJson {
            typ: r.typ.clone(),
            tuples: r.tuples.iter().cloned().collect(),
        })
        .collect();
    Ok(StructureJson { sorts, relations })
}

fn finite_from_json(v: serde_json::Value) -> Result<Structure, CliError> {
    let parsed: FiniteJson = serde_json::from_value(v)?;
    if parsed.domain == 0 {
        return Err(CliError::input("the domain must be nonempty"));
    }
    let signature = SortedSignature::new(vec![(0..parsed.domain).collect()])?;
    let mut relations = Vec::with_capacity(parsed.relations.len());
    for (i, r) in parsed.relations.into_iter().enumerate() {
        let arity = match r.tuples.first() {
            Some(t) => t.len(),
            None => {
                return Err(CliError::input(format!(
                    "relation {i} has no tuples; empty relations are vacuous, omit them"
                )))
            }
        };
        relations.push(TypedRelation::new(
            vec![0; arity],
            r.tuples.into_iter().collect::<BTreeSet<_>>(),
        ));
    }
    Ok(Structure::new(signature, relations)?)
}

fn literal_of((symbol, dual): (usize, bool)) -> Literal {
    Literal { symbol, dual }
}

fn description_from_json(v: serde_json::Value) -> Result<Description, CliError> {
    let parsed: DescriptionJson = serde_json::from_value(v)?;
    let mut constraints = Vec::with_capacity(parsed.constraints.len());
    for c in parsed.constraints {
        let lhs = literal_of(c.lhs);
        let rhs = literal_of(c.rhs);
        constraints.push(match c.kind.as_str() {
            "tri" => Constraint::tri(lhs, rhs),
            "eq" => Constraint::eq(lhs, rhs),
            other => return Err(CliError::input(format!("unknown constraint kind {other:?}"))),
        });
    }
    Ok(Description::new(parsed.k, constraints)?)
}

fn reduced_from_json(v: serde_json::Value) -> Result<ReducedDescription, CliError> {
    let parsed: ReducedJson = serde_json::from_value(v)?;
    let (f, g) = (parsed.f, parsed.g);
    let mut constraints = Vec::with_capacity(parsed.constraints.len());
    for c in parsed.constraints {
        if c.kind != "tri" {
            return Err(CliError::input(
                "reduced descriptions contain only triangle constraints",
            ));
        }
        let ((i, li_dual), (j, rj_dual)) = (c.lhs, c.rhs);
        if li_dual {
            return Err(CliError::input(
                "reduced constraints have a plain left-hand side",
            ));
        }
        let rc = if i < f && j < f {
            if rj_dual {
                ReducedConstraint::FFD(i, j)
            } else {
                ReducedConstraint::FF(i, j)
            }
        } else if i < f && j >= f && j < f + g {
            ReducedConstraint::FG(i, j - f)
        } else if i >= f && i < f + g && i == j {
            ReducedConstraint::GG(i - f)
        } else {
            return Err(CliError::input(format!(
                "constraint ({i}, {j}) does not fit a reduced shape for f={f}, g={g}"
            )));
        };
        constraints.push(rc);
    }
    let rd = ReducedDescription::new(f, g, constraints)?;
    rd.validate()?;
    Ok(rd)
}

/// Builds a truncated minion from a truncation spec: a canonical core id, a
/// description, or a reduced description.
fn minion_from_json(
    v: serde_json::Value,
    cap: u8,
    budget: &mut Budget,
) -> Result<TruncatedMinion, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::input("expected a JSON object"))?;
    if obj.contains_key("core") {
        if cap == 5 {
            return Err(CliError::input(
                "canonical cores carry full tables only up to arity 4; use --arity-cap 4 or less",
            ));
        }
        let name = obj["core"]
            .as_str()
            .ok_or_else(|| CliError::input("\"core\" must be a string"))?;
        let id: CoreId = name
            .parse()
            .map_err(|_| CliError::input(format!("unknown core {name:?}")))?;
        let mut elements = Vec::with_capacity(cap as usize);
        for arity in 1..=cap {
            elements.push(core_enumerate(&id, arity, budget)?);
        }
        let sym5 = core_enumerate(&id, 5, budget)?;
        Ok(TruncatedMinion::from_function_minion(
            cap,
            elements,
            Some(sym5),
        )?)
    } else if obj.contains_key("k") {
        let d = description_from_json(v)?;
        let mut elements = Vec::with_capacity(cap as usize);
        for arity in 1..=cap {
            elements.push(d.clo_enumerate(arity, budget)?);
        }
        Ok(TruncatedMinion::from_function_minion(cap, elements, None)?)
    } else if obj.contains_key("f") {
        let rd = reduced_from_json(v)?;
        let mut elements: Vec<Vec<MultiOp>> = Vec::with_capacity(cap as usize);
        for arity in 1..=cap {
            elements.push(rd.clo_enumerate(arity, budget)?);
        }
        Ok(TruncatedMinion::from_function_minion(cap, elements, None)?)
    } else {
        Err(CliError::input(
            "a truncation spec needs \"core\", \"k\" or \"f\"",
        ))
    }
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_classify(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let v = load_input(args)?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::input("expected a JSON object"))?;
    let mut budget = budget_of(args)?;
    if obj.contains_key("domain") {
        let structure = finite_from_json(v)?;
        let report = classify_finite(&structure, args.arity_cap, &mut budget)?;
        render_finite_report(&report, args.format)
    } else if obj.contains_key("sorts") {
        let structure = structure_from_json(v)?;
        let report = classify_relations(&structure, args.arity_cap, &mut budget)?;
        render_report(&report, args.format)
    } else {
        Err(CliError::input(
            "a structure needs \"sorts\" (multisorted) or \"domain\" (finite)",
        ))
    }
}

fn cmd_translate(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let structure = finite_from_json(load_input(args)?)?;
    let translation = translate_small_projections(&structure)?;
    let body = structure_to_json(&translation.structure)?;
    let out = serde_json::json!({
        "sorts": body.sorts,
        "relations": body.relations,
        "sortDictionary": translation.sort_dictionary,
    });
    match args.format {
        Format::Json => Ok(out.to_string()),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "sorts: {}", translation.sort_dictionary.len());
            for (i, pair) in translation.sort_dictionary.iter().enumerate() {
                let _ = writeln!(s, "sort {i}: {{{}, {}}}", pair[0], pair[1]);
            }
            let _ = write!(s, "relations: {}", translation.structure.relations.len());
            Ok(s)
        }
        Format::Dot => unreachable!("rejected above"),
    }
}

fn cmd_reduce(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let description = description_from_json(load_input(args)?)?;
    let (rd, symbols) = to_reduced(&description)?;
    let f = rd.f_count();
    let constraints: Vec<ConstraintJson> = rd
        .constraints()
        .iter()
        .map(|rc| match *rc {
            ReducedConstraint::FF(i, j) => ConstraintJson {
                kind: "tri".into(),
                lhs: (i, false),
                rhs: (j, false),
            },
            ReducedConstraint::FFD(i, j) => ConstraintJson {
                kind: "tri".into(),
                lhs: (i, false),
                rhs: (j, true),
            },
            ReducedConstraint::FG(i, j) => ConstraintJson {
                kind: "tri".into(),
                lhs: (i, false),
                rhs: (f + j, false),
            },
            ReducedConstraint::GG(j) => ConstraintJson {
                kind: "tri".into(),
                lhs: (f + j, false),
                rhs: (f + j, false),
            },
        })
        .collect();
    let symbol_map: Vec<(usize, bool)> = symbols
        .entries()
        .iter()
        .map(|&(r, dual)| {
            let index = match r {
                RSymbol::F(i) => i,
                RSymbol::G(j) => f + j,
            };
            (index, dual)
        })
        .collect();
    let out = serde_json::json!({
        "f": rd.f_count(),
        "g": rd.g_count(),
        "constraints": constraints,
        "symbolMap": symbol_map,
    });
    match args.format {
        Format::Json => Ok(out.to_string()),
        Format::Text => Ok(format!(
            "f: {}\ng: {}\nconstraints: {}",
            rd.f_count(),
            rd.g_count(),
            rd.constraints().len()
        )),
        Format::Dot => unreachable!("rejected above"),
    }
}

fn cmd_enumerate(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let mut budget = budget_of(args)?;
    let minion = minion_from_json(load_input(args)?, args.arity_cap, &mut budget)?;
    match args.format {
        Format::Json => Ok(serde_json::to_string(&minion)?),
        Format::Text => {
            let sizes: Vec<String> = minion.sizes().iter().map(|n| n.to_string()).collect();
            let mut s = format!("sizes: {}", sizes.join(" "));
            if let Some(slice) = minion.sym5_elements() {
                let _ = write!(s, "\nsym5: {}", slice.len());
            }
            Ok(s)
        }
        Format::Dot => unreachable!("rejected above"),
    }
}

#[derive(Serialize)]
struct HomOutput {
    found: bool,
    hom: Option<TruncatedHom>,
}

fn cmd_hom(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let v = load_input(args)?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::input("expected a JSON object"))?;
    let (source, target) = match (obj.get("source"), obj.get("target")) {
        (Some(s), Some(t)) => (s.clone(), t.clone()),
        _ => return Err(CliError::input("hom input needs \"source\" and \"target\"")),
    };
    let mut budget = budget_of(args)?;
    let m = minion_from_json(source, args.arity_cap, &mut budget)?;
    let n = minion_from_json(target, args.arity_cap, &mut budget)?;
    let hom = hom_search(&m, &n, &mut budget)?;
    let out = HomOutput {
        found: hom.is_some(),
        hom,
    };
    match args.format {
        Format::Json => Ok(serde_json::to_string(&out)?),
        Format::Text => Ok(format!("found: {}", out.found)),
        Format::Dot => unreachable!("rejected above"),
    }
}

fn cmd_core(args: &CommonArgs) -> Result<String, CliError> {
    check_cap(args)?;
    reject_dot(args)?;
    let mut budget = budget_of(args)?;
    let minion = minion_from_json(load_input(args)?, args.arity_cap, &mut budget)?;
    let core = compute_core_truncated(&minion, &mut budget)?;
    let is_core = is_core_truncated(&core, &mut budget)?;
    let out = serde_json::json!({
        "sizes": core.sizes(),
        "isCore": is_core,
        "core": core,
    });
    match args.format {
        Format::Json => Ok(out.to_string()),
        Format::Text => {
            let sizes: Vec<String> = core.sizes().iter().map(|n| n.to_string()).collect();
            Ok(format!("sizes: {}\nisCore: {is_core}", sizes.join(" ")))
        }
        Format::Dot => unreachable!("rejected above"),
    }
}

fn cmd_poset(args: &PosetArgs) -> Result<String, CliError> {
    if args.max_k == 0 {
        return Err(CliError::input("--max-k must be positive"));
    }
    let dot = poset_dot(args.max_k);
    match args.format {
        Format::Dot | Format::Text => Ok(dot.trim_end().to_string()),
        // The field holds the DOT document exactly as the dot format prints
        // it, trailing newline included.
        Format::Json => {
            let printed = format!("{}\n", dot.trim_end());
            Ok(serde_json::json!({ "dot": printed }).to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering

fn render_report(report: &ClassificationReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string(report)?),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "core: {}", report.core);
            let _ = writeln!(s, "verified: {}", report.verified);
            for line in &report.log {
                let _ = writeln!(s, "  {line}");
            }
            Ok(s.trim_end().to_string())
        }
        Format::Dot => unreachable!("rejected above"),
    }
}

fn render_finite_report(
    report: &FiniteClassification,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string(report)?),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "core: {}", report.report.core);
            let _ = writeln!(s, "verified: {}", report.report.verified);
            for (i, pair) in report.sort_dictionary.iter().enumerate() {
                let _ = writeln!(s, "sort {i}: {{{}, {}}}", pair[0], pair[1]);
            }
            for line in &report.report.log {
                let _ = writeln!(s, "  {line}");
            }
            Ok(s.trim_end().to_string())
        }
        Format::Dot => unreachable!("rejected above"),
    }
}
