//! Loading relations from CSV files.
//!
//! Each row is one tuple, one column per port of the predicate. The first
//! row is taken as a header when none of its cells is an atom of its
//! column's domain. Loading unions into the existing relation, so loading
//! the same file twice changes nothing.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use regcalc::model::Tuple;
use regcalc::{Atom, Context, TypeSymbol};

use crate::dsl::Workspace;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("row {row}: {msg}")]
    Csv { row: u64, msg: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Arity { row: u64, expected: usize, found: usize },
    #[error("row {row}, column {column}: `{atom}` is not in the domain of {ty}")]
    UnknownAtom {
        row: u64,
        column: usize,
        atom: String,
        ty: TypeSymbol,
    },
    #[error("predicate `{0}` is not declared")]
    UnknownPredicate(String),
    #[error("{0}")]
    Invalid(#[from] regcalc::Error),
}

/// Reads tuples for a relation on `ctx`. `domain` gives the atoms of each
/// type; every field must be one of them.
pub fn read_rows<'a>(
    ctx: &Context,
    domain: impl Fn(&TypeSymbol) -> &'a [Atom],
    input: impl Read,
) -> Result<BTreeSet<Tuple>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = BTreeSet::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Csv {
            row: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line());
        // a lone empty field is how csv reports a blank line
        if record.len() == 1 && record[0].is_empty() && ctx.arity() != 1 {
            continue;
        }
        let header = first
            && record.len() == ctx.arity()
            && ctx.arity() > 0
            && record
                .iter()
                .enumerate()
                .all(|(i, f)| !domain(ctx.type_at(i)).iter().any(|a| &**a == f));
        first = false;
        if header {
            continue;
        }
        if record.len() != ctx.arity() {
            return Err(IngestError::Arity {
                row,
                expected: ctx.arity(),
                found: record.len(),
            });
        }
        let mut tuple = Vec::with_capacity(record.len());
        for (i, f) in record.iter().enumerate() {
            let ty = ctx.type_at(i);
            match domain(ty).iter().find(|a| &***a == f) {
                Some(a) => tuple.push(a.clone()),
                None => {
                    return Err(IngestError::UnknownAtom {
                        row,
                        column: i + 1,
                        atom: f.to_string(),
                        ty: ty.clone(),
                    })
                }
            }
        }
        out.insert(tuple);
    }
    Ok(out)
}

/// Loads rows into `pred`, returning how many tuples were new.
pub fn ingest_reader(ws: &mut Workspace, pred: &str, input: impl Read) -> Result<usize, IngestError> {
    let ctx = ws
        .predicates()
        .get(pred)
        .cloned()
        .ok_or_else(|| IngestError::UnknownPredicate(pred.to_string()))?;
    let domains = ws.domains().clone();
    let tuples = read_rows(&ctx, |t| domains.get(t).map_or(&[][..], Vec::as_slice), input)?;
    Ok(ws.add_tuples(pred, tuples)?)
}

pub fn ingest_csv(ws: &mut Workspace, pred: &str, path: &Path) -> Result<usize, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(ws, pred, file)
}
