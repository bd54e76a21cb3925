//! Finite relational models and the evaluation of graphical terms in them.
//!
//! A context `Γ = (n, S, τ)` denotes the set of tuples over
//! `D_{τ(1)} × ⋯ × D_{τ(n)}` when every support type is inhabited, and
//! the empty set otherwise. Predicates on `Γ` are subsets of that set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::context::{Context, ContextMorphism, TypeSymbol};
use crate::error::{Error, Result};
use crate::term::{GraphicalTerm, PredicateSignature};
use crate::wiring::Shell;

pub type Atom = Arc<str>;
pub type Tuple = Vec<Atom>;

/// A set of tuples over a context.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinRelation {
    context: Context,
    tuples: BTreeSet<Tuple>,
}

impl fmt::Debug for FinRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.context)?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({})", t.join(","))?;
        }
        write!(f, "}}")
    }
}

impl FinRelation {
    /// A relation without domain checks; see [`ModelInstance::relation`]
    /// for the checked constructor.
    pub fn new(context: Context, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        let tuples: BTreeSet<Tuple> = tuples.into_iter().collect();
        debug_assert!(tuples.iter().all(|t| t.len() == context.arity()));
        FinRelation { context, tuples }
    }

    pub fn empty(context: Context) -> Self {
        FinRelation {
            context,
            tuples: BTreeSet::new(),
        }
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Atom]) -> bool {
        self.tuples.contains(t)
    }

    pub fn is_subset(&self, other: &FinRelation) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    fn same_context(&self, other: &FinRelation) -> Result<()> {
        if self.context != other.context {
            return Err(Error::BoundaryMismatch(format!(
                "relations on {} and {}",
                self.context, other.context
            )));
        }
        Ok(())
    }

    pub fn meet(&self, other: &FinRelation) -> Result<FinRelation> {
        self.same_context(other)?;
        Ok(FinRelation {
            context: self.context.clone(),
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        })
    }

    pub fn join(&self, other: &FinRelation) -> Result<FinRelation> {
        self.same_context(other)?;
        Ok(FinRelation {
            context: self.context.clone(),
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        })
    }

    /// The product relation on `Γ₁ ⊕ Γ₂`.
    pub fn product(&self, other: &FinRelation) -> FinRelation {
        let mut tuples = BTreeSet::new();
        for a in &self.tuples {
            for b in &other.tuples {
                let mut t = a.clone();
                t.extend(b.iter().cloned());
                tuples.insert(t);
            }
        }
        FinRelation {
            context: self.context.oplus(&other.context),
            tuples,
        }
    }

    /// Image under the tuple map induced by `f`.
    pub fn pushforward(&self, f: &ContextMorphism) -> Result<FinRelation> {
        if f.dom() != &self.context {
            return Err(Error::BoundaryMismatch(format!(
                "pushforward along a map out of {} of a relation on {}",
                f.dom(),
                self.context
            )));
        }
        let u = f.underlying();
        Ok(FinRelation {
            context: f.cod().clone(),
            tuples: self
                .tuples
                .iter()
                .map(|t| u.iter().map(|&i| t[i].clone()).collect())
                .collect(),
        })
    }

    /// Restricts to the positions `u`, producing a relation on `ctx`.
    fn project(&self, ctx: &Context, u: std::ops::Range<usize>) -> FinRelation {
        FinRelation {
            context: ctx.clone(),
            tuples: self.tuples.iter().map(|t| t[u.clone()].to_vec()).collect(),
        }
    }

    /// The two block projections of a relation on `left ⊕ right`.
    pub fn split(&self, left: &Context, right: &Context) -> Result<(FinRelation, FinRelation)> {
        if left.oplus(right) != self.context {
            return Err(Error::BoundaryMismatch(format!(
                "{} is not {} ⊕ {}",
                self.context, left, right
            )));
        }
        let n = left.arity();
        Ok((
            self.project(left, 0..n),
            self.project(right, n..n + right.arity()),
        ))
    }

    /// Moves the `right` block in front of the `left` block.
    pub fn swap_blocks(&self, left: &Context, right: &Context) -> Result<FinRelation> {
        self.pushforward(&ContextMorphism::braid(left, right))
    }
}

/// A finite model of a signature: a domain per type and a relation per
/// predicate. Types without a domain are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInstance {
    sig: PredicateSignature,
    domains: BTreeMap<TypeSymbol, Vec<Atom>>,
    relations: BTreeMap<String, FinRelation>,
}

impl ModelInstance {
    /// A model with the given domains and every predicate empty.
    pub fn new(sig: PredicateSignature, domains: BTreeMap<TypeSymbol, Vec<Atom>>) -> Result<Self> {
        for (t, d) in &domains {
            if !sig.types().contains(t) {
                return Err(Error::UnknownType(t.clone()));
            }
            let distinct: BTreeSet<&Atom> = d.iter().collect();
            if distinct.len() != d.len() {
                return Err(Error::Malformed(format!("domain of {t} repeats an atom")));
            }
        }
        let relations = sig
            .predicates()
            .iter()
            .map(|(name, ctx)| (name.clone(), FinRelation::empty(ctx.clone())))
            .collect();
        Ok(ModelInstance {
            sig,
            domains,
            relations,
        })
    }

    /// Convenience constructor from string slices.
    pub fn with_domains(sig: PredicateSignature, domains: &[(&str, &[&str])]) -> Result<Self> {
        let map = domains
            .iter()
            .map(|(t, atoms)| (TypeSymbol::new(t), atoms.iter().map(|a| Atom::from(*a)).collect()))
            .collect();
        ModelInstance::new(sig, map)
    }

    pub fn signature(&self) -> &PredicateSignature {
        &self.sig
    }

    pub fn domain(&self, t: &TypeSymbol) -> &[Atom] {
        self.domains.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn domains(&self) -> &BTreeMap<TypeSymbol, Vec<Atom>> {
        &self.domains
    }

    pub fn relations(&self) -> &BTreeMap<String, FinRelation> {
        &self.relations
    }

    pub fn relation_of(&self, name: &str) -> Result<&FinRelation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }

    /// Whether every support type of `ctx` has an inhabitant.
    pub fn inhabited(&self, ctx: &Context) -> bool {
        ctx.support().iter().all(|s| !self.domain(s).is_empty())
    }

    /// Builds a relation on `ctx`, checking that every entry lies in its
    /// domain.
    pub fn relation(&self, ctx: &Context, tuples: impl IntoIterator<Item = Tuple>) -> Result<FinRelation> {
        let rel = FinRelation::new(ctx.clone(), tuples);
        self.check(&rel)?;
        Ok(rel)
    }

    /// Builds a relation from string tuples.
    pub fn relation_str(&self, ctx: &Context, tuples: &[&[&str]]) -> Result<FinRelation> {
        self.relation(
            ctx,
            tuples
                .iter()
                .map(|t| t.iter().map(|a| Atom::from(*a)).collect::<Tuple>()),
        )
    }

    pub fn check(&self, rel: &FinRelation) -> Result<()> {
        let ctx = rel.context();
        for t in rel.tuples() {
            if t.len() != ctx.arity() {
                return Err(Error::ModelMismatch(format!(
                    "tuple of length {} in a relation of arity {}",
                    t.len(),
                    ctx.arity()
                )));
            }
            for (i, a) in t.iter().enumerate() {
                let ty = ctx.type_at(i);
                if !self.domain(ty).contains(a) {
                    return Err(Error::ModelMismatch(format!(
                        "atom `{a}` at position {} is not in the domain of {ty}",
                        i + 1
                    )));
                }
            }
        }
        if !rel.is_empty() && !self.inhabited(ctx) {
            return Err(Error::SupportViolation(format!(
                "relation on {ctx} is nonempty but a support type has an empty domain"
            )));
        }
        Ok(())
    }

    pub fn set_relation(&mut self, name: &str, rel: FinRelation) -> Result<()> {
        let declared = self.sig.context_of(name)?;
        if declared != rel.context() {
            return Err(Error::ModelMismatch(format!(
                "predicate {name} is declared on {declared}, relation is on {}",
                rel.context()
            )));
        }
        self.check(&rel)?;
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    pub fn set_tuples(&mut self, name: &str, tuples: &[&[&str]]) -> Result<()> {
        let ctx = self.sig.context_of(name)?.clone();
        let rel = self.relation_str(&ctx, tuples)?;
        self.set_relation(name, rel)
    }

    /// The top element of the predicate poset on `ctx`.
    pub fn true_rel(&self, ctx: &Context) -> FinRelation {
        if !self.inhabited(ctx) {
            return FinRelation::empty(ctx.clone());
        }
        let mut tuples = BTreeSet::new();
        let mut cur = Vec::with_capacity(ctx.arity());
        fn go(m: &ModelInstance, ctx: &Context, cur: &mut Tuple, out: &mut BTreeSet<Tuple>) {
            if cur.len() == ctx.arity() {
                out.insert(cur.clone());
                return;
            }
            for a in m.domain(ctx.type_at(cur.len())) {
                cur.push(a.clone());
                go(m, ctx, cur, out);
                cur.pop();
            }
        }
        go(self, ctx, &mut cur, &mut tuples);
        FinRelation {
            context: ctx.clone(),
            tuples,
        }
    }

    /// Every relation on `ctx`, i.e. every subset of the top element, in
    /// increasing binary order of the tuple list.
    pub fn all_relations(&self, ctx: &Context) -> Vec<FinRelation> {
        let top: Vec<Tuple> = self.true_rel(ctx).tuples.into_iter().collect();
        assert!(top.len() < 24, "too many relations to enumerate");
        (0u32..1 << top.len())
            .map(|mask| {
                FinRelation::new(
                    ctx.clone(),
                    top.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone()),
                )
            })
            .collect()
    }

    /// Preimage along the tuple map of `f`, within the top element of its
    /// domain.
    pub fn pullback_pred(&self, f: &ContextMorphism, rel: &FinRelation) -> Result<FinRelation> {
        if f.cod() != rel.context() {
            return Err(Error::BoundaryMismatch(format!(
                "pullback along a map into {} of a relation on {}",
                f.cod(),
                rel.context()
            )));
        }
        let u = f.underlying();
        let mut top = self.true_rel(f.dom());
        top.tuples.retain(|t| {
            let image: Tuple = u.iter().map(|&i| t[i].clone()).collect();
            rel.contains(&image)
        });
        Ok(top)
    }

    /// The denotation of a graphical term: the outer restrictions of all
    /// dot assignments that satisfy every cell, or nothing when some
    /// support type is empty.
    pub fn eval(&self, t: &GraphicalTerm) -> Result<FinRelation> {
        let t = t.flatten();
        let d = t.diagram();
        let names = t.predicate_cells().expect("flattened");
        let mut cells: Vec<(&FinRelation, &[usize])> = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let rel = self.relation_of(name)?;
            if rel.context() != &d.inner()[i] {
                return Err(Error::ModelMismatch(format!(
                    "relation for {name} is on {}, the term expects {}",
                    rel.context(),
                    d.inner()[i]
                )));
            }
            cells.push((rel, d.shell_dots(Shell::Inner(i))));
        }
        let outer = d.outer().clone();
        if d.support().iter().any(|s| self.domain(s).is_empty()) {
            return Ok(FinRelation::empty(outer));
        }
        cells.sort_by_key(|(rel, _)| rel.len());
        let mut search = Search {
            model: self,
            cells: &cells,
            dot_types: d.dot_types(),
            outer_dots: d.shell_dots(Shell::Outer),
            assignment: vec![None; d.num_dots()],
            out: BTreeSet::new(),
        };
        search.cell(0);
        Ok(FinRelation {
            context: outer,
            tuples: search.out,
        })
    }

    /// `⟦t⟧ ⊆ ⟦t′⟧` in this model.
    pub fn entails(&self, t: &GraphicalTerm, t2: &GraphicalTerm) -> Result<bool> {
        if t.outer() != t2.outer() {
            return Err(Error::BoundaryMismatch(format!(
                "entailment between terms on {} and {}",
                t.outer(),
                t2.outer()
            )));
        }
        Ok(self.eval(t)?.is_subset(&self.eval(t2)?))
    }
}

struct Search<'a> {
    model: &'a ModelInstance,
    cells: &'a [(&'a FinRelation, &'a [usize])],
    dot_types: &'a [TypeSymbol],
    outer_dots: &'a [usize],
    assignment: Vec<Option<Atom>>,
    out: BTreeSet<Tuple>,
}

impl Search<'_> {
    fn cell(&mut self, i: usize) {
        if i == self.cells.len() {
            self.free(0);
            return;
        }
        let (rel, dots) = self.cells[i];
        for tuple in rel.tuples() {
            let mut bound = Vec::new();
            let mut ok = true;
            for (&k, a) in dots.iter().zip(tuple) {
                match &self.assignment[k] {
                    Some(b) if b != a => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        self.assignment[k] = Some(a.clone());
                        bound.push(k);
                    }
                }
            }
            if ok {
                self.cell(i + 1);
            }
            for k in bound {
                self.assignment[k] = None;
            }
        }
    }

    /// Enumerates the outer dots left unconstrained by the cells.
    fn free(&mut self, j: usize) {
        if j == self.outer_dots.len() {
            let t = self
                .outer_dots
                .iter()
                .map(|&k| self.assignment[k].clone().expect("assigned"))
                .collect();
            self.out.insert(t);
            return;
        }
        let k = self.outer_dots[j];
        if self.assignment[k].is_some() {
            self.free(j + 1);
            return;
        }
        for a in self.model.domain(&self.dot_types[k]) {
            self.assignment[k] = Some(a.clone());
            self.free(j + 1);
        }
        self.assignment[k] = None;
    }
}
