//! Subcommands over a loaded workspace.

use std::fmt::Write as _;

use clap::Subcommand;
use serde::Serialize;

use regcalc::syncat::{check_regular_axioms, fundamental_check, Bounds, Fault};
use regcalc::{contain, GraphicalTerm, ModelInstance, TypeSymbol, WiringDiagram};

use crate::dot;
use crate::dsl::{tuple_text, Workspace};

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Parse and validate every declaration.
    Validate,
    /// Print a diagram in normal form.
    Normalize { diagram: String },
    /// Substitute `inner` into shell `slot` (counted from 1) of `outer`.
    Compose { outer: String, slot: usize, inner: String },
    /// Whether the first diagram lies below the second.
    Leq { left: String, right: String },
    /// Evaluate a term in the model.
    Eval { term: String },
    /// Whether the first term entails the second in the model.
    Entail { left: String, right: String },
    /// Whether the first term entails the second in every model.
    Contains { left: String, right: String },
    /// Drop cells while the term stays equivalent.
    Minimize { term: String },
    /// Render a term as a regular-logic formula.
    Formula { term: String },
    /// Graphviz text for a diagram or term.
    Dot { name: String },
    /// Check the regular-category axioms on the model's internal relations.
    Axioms,
    /// Count relations and functions between two unary objects.
    Fundamental { r: String, r2: String },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub json: bool,
    pub bound: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("no diagram named `{0}`")]
    NoDiagram(String),
    #[error("no term or predicate named `{0}`")]
    NoTerm(String),
    #[error("no diagram, term or predicate named `{0}`")]
    NoName(String),
    #[error("this command needs a model; declare domains or pass --model")]
    NoModel,
    #[error("slots are numbered from 1")]
    ZeroSlot,
    #[error(transparent)]
    Core(#[from] regcalc::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type CResult<T> = Result<T, CommandError>;

fn diagram<'a>(ws: &'a Workspace, name: &str) -> CResult<&'a WiringDiagram> {
    ws.diagram(name).ok_or_else(|| CommandError::NoDiagram(name.into()))
}

fn term(ws: &Workspace, name: &str) -> CResult<GraphicalTerm> {
    ws.term(name).ok_or_else(|| CommandError::NoTerm(name.into()))
}

fn model(ws: &Workspace) -> CResult<&ModelInstance> {
    ws.model().ok_or(CommandError::NoModel)
}

fn verdict(holds: bool, opts: Options) -> CResult<Output> {
    let stdout = if opts.json {
        serde_json::to_string(&serde_json::json!({ "holds": holds }))? + "\n"
    } else if holds {
        "holds\n".into()
    } else {
        "does not hold\n".into()
    };
    Ok(Output {
        code: if holds { 0 } else { 1 },
        stdout,
    })
}

fn success(stdout: String) -> CResult<Output> {
    Ok(Output { code: 0, stdout })
}

#[derive(Serialize)]
struct EvalJson {
    context: Vec<String>,
    support: Vec<String>,
    tuples: Vec<Vec<String>>,
}

pub fn run_command(ws: &Workspace, cmd: &Command, opts: Options) -> CResult<Output> {
    match cmd {
        Command::Validate => {
            let mut s = format!(
                "ok: {} types, {} predicates, {} contexts, {} diagrams, {} terms",
                ws.types().len(),
                ws.predicates().len(),
                ws.contexts().len(),
                ws.diagrams().len(),
                ws.terms().len()
            );
            if let Some(m) = ws.model() {
                let tuples: usize = m.relations().values().map(|r| r.len()).sum();
                let _ = write!(s, ", model with {tuples} tuples");
            }
            s.push('\n');
            success(s)
        }
        Command::Normalize { diagram: d } => {
            let w = diagram(ws, d)?.normalize();
            success(ws.print_diagram(d, &w))
        }
        Command::Compose { outer, slot, inner } => {
            if *slot == 0 {
                return Err(CommandError::ZeroSlot);
            }
            let w = diagram(ws, outer)?.substitute(slot - 1, diagram(ws, inner)?)?;
            success(ws.print_diagram("composite", &w))
        }
        Command::Leq { left, right } => {
            let holds = diagram(ws, left)?.leq(diagram(ws, right)?)?;
            verdict(holds, opts)
        }
        Command::Eval { term: t } => {
            let rel = model(ws)?.eval(&term(ws, t)?)?;
            if opts.json {
                let json = EvalJson {
                    context: rel.context().typing().iter().map(|t| t.to_string()).collect(),
                    support: rel.context().support().iter().map(|t| t.to_string()).collect(),
                    tuples: rel
                        .tuples()
                        .iter()
                        .map(|t| t.iter().map(|a| a.to_string()).collect())
                        .collect(),
                };
                success(serde_json::to_string(&json)? + "\n")
            } else {
                success(tuples_text(rel.tuples()))
            }
        }
        Command::Entail { left, right } => {
            let holds = model(ws)?.entails(&term(ws, left)?, &term(ws, right)?)?;
            verdict(holds, opts)
        }
        Command::Contains { left, right } => {
            let holds = contain::contains(ws.signature(), &term(ws, left)?, &term(ws, right)?)?;
            verdict(holds, opts)
        }
        Command::Minimize { term: t } => {
            let core = contain::minimize_core(ws.signature(), &term(ws, t)?)?;
            let wiring = format!("{t}_core_wiring");
            let cells = core.predicate_cells().expect("cores are flat").join(", ");
            let mut s = ws.print_diagram(&wiring, core.diagram());
            let _ = writeln!(s, "term {t}_core = {wiring}({cells});");
            success(s)
        }
        Command::Formula { term: t } => success(format!("{}\n", term(ws, t)?.to_formula())),
        Command::Dot { name } => {
            if let Some(w) = ws.diagram(name) {
                success(dot::diagram_dot(name, w, &[]))
            } else if let Some(t) = ws.term(name) {
                success(dot::term_dot(name, &t))
            } else {
                Err(CommandError::NoName(name.clone()))
            }
        }
        Command::Axioms => {
            let mut bounds = Bounds::default();
            if let Some(n) = opts.bound {
                bounds.max_arity = n;
                bounds.max_tuples = n;
            }
            let report = check_regular_axioms(model(ws)?, bounds, Fault::None);
            Ok(Output {
                code: if report.passed { 0 } else { 1 },
                stdout: serde_json::to_string_pretty(&report)? + "\n",
            })
        }
        Command::Fundamental { r, r2 } => {
            let report = fundamental_check(model(ws)?, &TypeSymbol::new(r), &TypeSymbol::new(r2))?;
            Ok(Output {
                code: if report.passed { 0 } else { 1 },
                stdout: serde_json::to_string_pretty(&report)? + "\n",
            })
        }
    }
}

/// Sorted text rendering of a relation's tuples, one per line.
pub fn tuples_text<'a>(tuples: impl IntoIterator<Item = &'a Vec<regcalc::Atom>>) -> String {
    tuples.into_iter().map(|t| tuple_text(t) + "\n").collect()
}
