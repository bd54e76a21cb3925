//! Model-independent entailment between flat terms.
//!
//! `t ⊢ t′` holds in every model exactly when the tuple of outer dots of
//! `t` belongs to `⟦t′⟧` evaluated in the canonical instance of `t`: the
//! model whose atoms are the dots of `t` and whose relations are the cells
//! of `t`. A support label of `t` with no dot of its type contributes one
//! fresh atom, so the canonical instance inhabits exactly the types that
//! `t` asserts inhabited.

use std::collections::BTreeMap;

use crate::context::TypeSymbol;
use crate::error::{Error, Result};
use crate::model::{Atom, FinRelation, ModelInstance, Tuple};
use crate::term::{GraphicalTerm, PredicateSignature};
use crate::wiring::Shell;

#[derive(Clone, Debug)]
pub struct CanonicalInstance {
    pub instance: ModelInstance,
    pub frozen: Tuple,
}

pub fn dot_atom(k: usize) -> Atom {
    Atom::from(format!("d{}", k + 1))
}

pub fn label_atom(t: &TypeSymbol) -> Atom {
    Atom::from(format!("u:{t}"))
}

pub fn canonical_instance(sig: &PredicateSignature, t: &GraphicalTerm) -> Result<CanonicalInstance> {
    let t = t.flatten();
    let d = t.diagram();
    let mut sig = sig.clone();
    for s in d.support() {
        sig.add_type(s.clone());
    }
    let mut domains: BTreeMap<TypeSymbol, Vec<Atom>> = BTreeMap::new();
    for (k, ty) in d.dot_types().iter().enumerate() {
        domains.entry(ty.clone()).or_default().push(dot_atom(k));
    }
    for s in d.white_labels() {
        domains.insert(s.clone(), vec![label_atom(&s)]);
    }
    let mut instance = ModelInstance::new(sig, domains)?;
    let mut tuples: BTreeMap<&str, Vec<Tuple>> = BTreeMap::new();
    let names = t.predicate_cells().expect("flattened");
    for (i, name) in names.iter().enumerate() {
        let tuple = d
            .shell_dots(Shell::Inner(i))
            .iter()
            .map(|&k| dot_atom(k))
            .collect();
        tuples.entry(name).or_default().push(tuple);
    }
    for (name, ts) in tuples {
        let ctx = instance.signature().context_of(name)?.clone();
        instance.set_relation(name, FinRelation::new(ctx, ts))?;
    }
    let frozen = d.shell_dots(Shell::Outer).iter().map(|&k| dot_atom(k)).collect();
    Ok(CanonicalInstance { instance, frozen })
}

/// Decides whether `⟦t⟧ ⊆ ⟦t′⟧` in every model of `sig`.
pub fn contains(sig: &PredicateSignature, t: &GraphicalTerm, t2: &GraphicalTerm) -> Result<bool> {
    if t.outer() != t2.outer() {
        return Err(Error::BoundaryMismatch(format!(
            "containment between terms on {} and {}",
            t.outer(),
            t2.outer()
        )));
    }
    let canon = canonical_instance(sig, t)?;
    Ok(canon.instance.eval(t2)?.contains(&canon.frozen))
}

pub fn equivalent(sig: &PredicateSignature, t: &GraphicalTerm, t2: &GraphicalTerm) -> Result<bool> {
    Ok(contains(sig, t, t2)? && contains(sig, t2, t)?)
}

/// Removes cells one at a time, keeping each removal that leaves the term
/// equivalent to the original, until no single removal does.
pub fn minimize_core(sig: &PredicateSignature, t: &GraphicalTerm) -> Result<GraphicalTerm> {
    let original = t.flatten();
    let mut cur = original.clone();
    'outer: loop {
        for i in 0..cur.cells().len() {
            let candidate = cur.remove_cell(i)?;
            // dropping a cell only weakens, so one direction suffices
            if contains(sig, &candidate, &original)? {
                cur = candidate;
                continue 'outer;
            }
        }
        return Ok(cur);
    }
}
