//! Internal relations and internal functions over a finite model.
//!
//! An object is a context with a predicate `(Γ, φ)`. A relation
//! `(Γ₁, φ₁) ⇸ (Γ₂, φ₂)` is a predicate `θ` on `Γ₁ ⊕ Γ₂` whose two
//! marginals lie under `φ₁` and `φ₂`. Functions are the relations that are
//! total and deterministic, equivalently the left adjoints.

mod check;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::model::{FinRelation, Tuple};

pub use check::{check_regular_axioms, fundamental_check, Bounds, Check, Fault, FundamentalReport, Report};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynObject {
    predicate: FinRelation,
}

impl fmt::Debug for SynObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.predicate)
    }
}

impl SynObject {
    pub fn new(predicate: FinRelation) -> Self {
        SynObject { predicate }
    }

    /// `(0, true)`.
    pub fn terminal() -> Self {
        SynObject::new(FinRelation::new(Context::terminal(), [Vec::new()]))
    }

    pub fn context(&self) -> &Context {
        self.predicate.context()
    }

    pub fn predicate(&self) -> &FinRelation {
        &self.predicate
    }

    pub fn arity(&self) -> usize {
        self.context().arity()
    }

    /// `(Γ₁ ⊕ Γ₂, φ₁ × φ₂)`.
    pub fn tensor(&self, other: &SynObject) -> SynObject {
        SynObject::new(self.predicate.product(&other.predicate))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InternalRelation {
    dom: SynObject,
    cod: SynObject,
    theta: FinRelation,
}

impl fmt::Debug for InternalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} : {:?} ⇸ {:?}", self.theta, self.dom, self.cod)
    }
}

fn concat(a: &[crate::model::Atom], b: &[crate::model::Atom]) -> Tuple {
    let mut t = a.to_vec();
    t.extend_from_slice(b);
    t
}

impl InternalRelation {
    pub fn new(dom: SynObject, cod: SynObject, theta: FinRelation) -> Result<Self> {
        let expected = dom.context().oplus(cod.context());
        if theta.context() != &expected {
            return Err(Error::NotInternalRelation(format!(
                "relation is on {}, endpoints need {expected}",
                theta.context()
            )));
        }
        let rel = InternalRelation { dom, cod, theta };
        let (left, right) = rel.marginals();
        if !left.is_subset(rel.dom.predicate()) {
            return Err(Error::NotInternalRelation(format!(
                "left marginal {left:?} is not under {:?}",
                rel.dom
            )));
        }
        if !right.is_subset(rel.cod.predicate()) {
            return Err(Error::NotInternalRelation(format!(
                "right marginal {right:?} is not under {:?}",
                rel.cod
            )));
        }
        Ok(rel)
    }

    /// A candidate relation that is only checked to live on `dom ⊕ cod`;
    /// the marginal conditions may fail.
    pub fn unchecked(dom: SynObject, cod: SynObject, theta: FinRelation) -> Result<Self> {
        let expected = dom.context().oplus(cod.context());
        if theta.context() != &expected {
            return Err(Error::NotInternalRelation(format!(
                "relation is on {}, endpoints need {expected}",
                theta.context()
            )));
        }
        Ok(InternalRelation { dom, cod, theta })
    }

    /// Whether both marginals lie under the endpoint predicates.
    pub fn marginals_within(&self) -> bool {
        let (left, right) = self.marginals();
        left.is_subset(self.dom.predicate()) && right.is_subset(self.cod.predicate())
    }

    fn raw(dom: SynObject, cod: SynObject, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        let ctx = dom.context().oplus(cod.context());
        InternalRelation {
            dom,
            cod,
            theta: FinRelation::new(ctx, tuples),
        }
    }

    /// `id_φ`, the diagonal of `φ`.
    pub fn identity(o: &SynObject) -> Self {
        Self::raw(
            o.clone(),
            o.clone(),
            o.predicate().tuples().iter().map(|t| concat(t, t)),
        )
    }

    /// `id_φ` viewed as a map `(Γ, φ) → (Γ, ψ)` for `φ ⊆ ψ`.
    pub fn inclusion(sub: &SynObject, sup: &SynObject) -> Result<Self> {
        if sub.context() != sup.context() || !sub.predicate().is_subset(sup.predicate()) {
            return Err(Error::NotInternalRelation(format!(
                "{sub:?} is not a subobject of {sup:?}"
            )));
        }
        let mut id = Self::identity(sub);
        id.cod = sup.clone();
        Ok(id)
    }

    /// The unique function into `(0, true)`: `φ` itself on `Γ ⊕ 0`.
    pub fn bang(o: &SynObject) -> Self {
        InternalRelation {
            dom: o.clone(),
            cod: SynObject::terminal(),
            theta: o.predicate().clone(),
        }
    }

    pub fn dom(&self) -> &SynObject {
        &self.dom
    }

    pub fn cod(&self) -> &SynObject {
        &self.cod
    }

    pub fn theta(&self) -> &FinRelation {
        &self.theta
    }

    fn split_at(&self) -> usize {
        self.dom.arity()
    }

    fn pairs(&self) -> impl Iterator<Item = (&[crate::model::Atom], &[crate::model::Atom])> {
        let n = self.split_at();
        self.theta.tuples().iter().map(move |t| t.split_at(n))
    }

    pub fn marginals(&self) -> (FinRelation, FinRelation) {
        self.theta
            .split(self.dom.context(), self.cod.context())
            .expect("relation lives on dom ⊕ cod")
    }

    pub fn transpose(&self) -> Self {
        Self::raw(
            self.cod.clone(),
            self.dom.clone(),
            self.pairs().map(|(x, y)| concat(y, x)),
        )
    }

    /// `self ⊛ next`: relational composite by a join on the middle block.
    pub fn compose(&self, next: &InternalRelation) -> Result<Self> {
        if self.cod != next.dom {
            return Err(Error::BoundaryMismatch(format!(
                "composite of a relation into {:?} with one out of {:?}",
                self.cod, next.dom
            )));
        }
        let mut index: BTreeMap<&[crate::model::Atom], Vec<&[crate::model::Atom]>> = BTreeMap::new();
        for (y, z) in next.pairs() {
            index.entry(y).or_default().push(z);
        }
        let mut out = BTreeSet::new();
        for (x, y) in self.pairs() {
            if let Some(zs) = index.get(y) {
                for z in zs {
                    out.insert(concat(x, z));
                }
            }
        }
        Ok(Self::raw(self.dom.clone(), next.cod.clone(), out))
    }

    /// `self ⊗ other` on `(Γ₁ ⊕ Γ₃) ⊕ (Γ₂ ⊕ Γ₄)`.
    pub fn tensor(&self, other: &InternalRelation) -> Self {
        let mut out = BTreeSet::new();
        for (x, y) in self.pairs() {
            for (x2, y2) in other.pairs() {
                let mut t = concat(x, x2);
                t.extend_from_slice(y);
                t.extend_from_slice(y2);
                out.insert(t);
            }
        }
        Self::raw(self.dom.tensor(&other.dom), self.cod.tensor(&other.cod), out)
    }

    pub fn is_subset(&self, other: &InternalRelation) -> bool {
        self.theta.is_subset(&other.theta)
    }

    /// Whether `id ⊛ θ ⊛ id = θ`, the composite form of the marginal
    /// conditions.
    pub fn absorbs_identities(&self) -> bool {
        let left = InternalRelation::identity(&self.dom);
        let right = InternalRelation::identity(&self.cod);
        left.compose(self)
            .and_then(|r| r.compose(&right))
            .map(|r| r.theta == self.theta)
            .unwrap_or(false)
    }

    /// The two sides of the totality entailment: `φ₁` and the left
    /// marginal of `θ`.
    pub fn totality_sides(&self) -> (FinRelation, FinRelation) {
        (self.dom.predicate().clone(), self.marginals().0)
    }

    /// The two sides of the determinism entailment, as relations on
    /// `Γ₁ ⊕ Γ₂ ⊕ Γ₂`: pairs of outputs for a common input, and repeated
    /// single outputs.
    pub fn determinism_sides(&self) -> (FinRelation, FinRelation) {
        let ctx = self.theta.context().oplus(self.cod.context());
        let mut forks = BTreeSet::new();
        for (x, y) in self.pairs() {
            for (x2, y2) in self.pairs() {
                if x == x2 {
                    let mut t = concat(x, y);
                    t.extend_from_slice(y2);
                    forks.insert(t);
                }
            }
        }
        let repeats = self.pairs().map(|(x, y)| {
            let mut t = concat(x, y);
            t.extend_from_slice(y);
            t
        });
        (FinRelation::new(ctx.clone(), forks), FinRelation::new(ctx, repeats))
    }

    pub fn classify(&self) -> Classification {
        let (phi1, marginal) = self.totality_sides();
        let total = phi1.is_subset(&marginal);
        let (forks, repeats) = self.determinism_sides();
        let deterministic = forks.is_subset(&repeats);
        let t = self.transpose();
        let unit = self.compose(&t).expect("composable");
        let counit = t.compose(self).expect("composable");
        let has_unit = InternalRelation::identity(&self.dom).is_subset(&unit);
        let has_counit = counit.is_subset(&InternalRelation::identity(&self.cod));
        Classification {
            total,
            deterministic,
            function: total && deterministic,
            has_unit,
            has_counit,
        }
    }

    pub fn is_function(&self) -> bool {
        self.classify().function
    }
}

/// The two characterizations of functions: total and deterministic, or
/// having the transpose as right adjoint (unit and counit).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub total: bool,
    pub deterministic: bool,
    pub function: bool,
    pub has_unit: bool,
    pub has_counit: bool,
}

impl Classification {
    pub fn left_adjoint(&self) -> bool {
        self.has_unit && self.has_counit
    }
}

fn require_function(t: &InternalRelation, what: &str) -> Result<()> {
    if t.is_function() {
        Ok(())
    } else {
        Err(Error::NotFunction(format!("{what}: {t:?}")))
    }
}

/// The pullback of two functions with a common codomain.
#[derive(Clone, Debug)]
pub struct SynPullback {
    pub apex: SynObject,
    pub p1: InternalRelation,
    pub p2: InternalRelation,
}

pub fn pullback_ir(t1: &InternalRelation, t2: &InternalRelation) -> Result<SynPullback> {
    if t1.cod != t2.cod {
        return Err(Error::BoundaryMismatch(format!(
            "pullback of maps into {:?} and {:?}",
            t1.cod, t2.cod
        )));
    }
    require_function(t1, "first leg of the cospan")?;
    require_function(t2, "second leg of the cospan")?;
    let joined = t1.compose(&t2.transpose())?;
    let apex = SynObject::new(joined.theta);
    let (n1, n2) = (t1.dom.arity(), t2.dom.arity());
    let p1 = InternalRelation::raw(
        apex.clone(),
        t1.dom.clone(),
        apex.predicate().tuples().iter().map(|t| concat(t, &t[..n1])),
    );
    let p2 = InternalRelation::raw(
        apex.clone(),
        t2.dom.clone(),
        apex.predicate().tuples().iter().map(|t| concat(t, &t[n1..n1 + n2])),
    );
    Ok(SynPullback { apex, p1, p2 })
}

/// The mediating map `⟨u₁, u₂⟩` into a pullback apex.
pub fn pair(pb: &SynPullback, u1: &InternalRelation, u2: &InternalRelation) -> Result<InternalRelation> {
    if u1.dom != u2.dom || u1.cod != pb.p1.cod || u2.cod != pb.p2.cod {
        return Err(Error::BoundaryMismatch("cone does not match the pullback".into()));
    }
    let mut out = BTreeSet::new();
    for (q, a) in u1.pairs() {
        for (q2, b) in u2.pairs() {
            if q == q2 {
                let mut t = concat(q, a);
                t.extend_from_slice(b);
                out.insert(t);
            }
        }
    }
    let ctx = u1.dom.context().oplus(pb.apex.context());
    InternalRelation::new(u1.dom.clone(), pb.apex.clone(), FinRelation::new(ctx, out))
}

/// The equalizer of two parallel functions, with its inclusion.
pub fn equalizer_ir(t1: &InternalRelation, t2: &InternalRelation) -> Result<(SynObject, InternalRelation)> {
    if t1.dom != t2.dom || t1.cod != t2.cod {
        return Err(Error::BoundaryMismatch("equalizer of maps that are not parallel".into()));
    }
    require_function(t1, "equalizer")?;
    require_function(t2, "equalizer")?;
    let both = t1.theta.meet(&t2.theta)?;
    let e = both.split(t1.dom.context(), t1.cod.context())?.0;
    let obj = SynObject::new(e);
    let inc = InternalRelation::inclusion(&obj, &t1.dom)?;
    Ok((obj, inc))
}

#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub epi: InternalRelation,
    pub image: SynObject,
    pub mono: InternalRelation,
}

/// The image of a function is its right marginal.
pub fn image_ir(t: &InternalRelation) -> Result<ImageFactorization> {
    require_function(t, "image")?;
    let image = SynObject::new(t.marginals().1);
    let epi = InternalRelation {
        dom: t.dom.clone(),
        cod: image.clone(),
        theta: t.theta.clone(),
    };
    let mono = InternalRelation::inclusion(&image, &t.cod)?;
    Ok(ImageFactorization { epi, image, mono })
}

/// A function is a regular epi when its image is all of the codomain.
pub fn is_regular_epi_ir(t: &InternalRelation) -> bool {
    t.cod.predicate().is_subset(&t.marginals().1)
}

/// A function is mono when `θ ⊛ θ† = id_{φ₁}`.
pub fn is_mono_ir(t: &InternalRelation) -> bool {
    t.compose(&t.transpose())
        .map(|k| k == InternalRelation::identity(&t.dom))
        .unwrap_or(false)
}

/// All predicates under `φ` on the same context, as objects.
pub fn subobjects(o: &SynObject) -> Vec<SynObject> {
    let tuples: Vec<&Tuple> = o.predicate().tuples().iter().collect();
    assert!(tuples.len() < 24, "too many subobjects to enumerate");
    (0u32..1 << tuples.len())
        .map(|mask| {
            SynObject::new(FinRelation::new(
                o.context().clone(),
                tuples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| (*t).clone()),
            ))
        })
        .collect()
}

/// Every internal relation `a ⇸ b`: all subsets of `φ_a × φ_b`.
pub fn hom_relations(a: &SynObject, b: &SynObject) -> Vec<InternalRelation> {
    let pairs: Vec<Tuple> = a.predicate().product(b.predicate()).tuples().iter().cloned().collect();
    assert!(pairs.len() < 24, "too many relations to enumerate");
    (0u32..1 << pairs.len())
        .map(|mask| {
            InternalRelation::raw(
                a.clone(),
                b.clone(),
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone()),
            )
        })
        .collect()
}

/// The graphs of all set functions `φ_a → φ_b`.
pub fn function_graphs(a: &SynObject, b: &SynObject) -> Vec<InternalRelation> {
    let xs: Vec<&Tuple> = a.predicate().tuples().iter().collect();
    let ys: Vec<&Tuple> = b.predicate().tuples().iter().collect();
    let mut out = Vec::new();
    if ys.is_empty() && !xs.is_empty() {
        return out;
    }
    let mut choice = vec![0usize; xs.len()];
    loop {
        out.push(InternalRelation::raw(
            a.clone(),
            b.clone(),
            xs.iter().zip(&choice).map(|(x, &c)| concat(x, ys[c])),
        ));
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < ys.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// The hypergraph structure carried by each object.
pub mod structure {
    use super::*;

    /// `δ : φ → φ ⊗ φ`.
    pub fn delta(o: &SynObject) -> InternalRelation {
        InternalRelation::raw(
            o.clone(),
            o.tensor(o),
            o.predicate().tuples().iter().map(|t| {
                let mut v = concat(t, t);
                v.extend_from_slice(t);
                v
            }),
        )
    }

    /// `μ : φ ⊗ φ → φ`.
    pub fn mu(o: &SynObject) -> InternalRelation {
        delta(o).transpose()
    }

    /// `ε : φ → (0, true)`.
    pub fn epsilon(o: &SynObject) -> InternalRelation {
        InternalRelation::bang(o)
    }

    /// `η : (0, true) → φ`.
    pub fn eta(o: &SynObject) -> InternalRelation {
        epsilon(o).transpose()
    }

    /// `σ : a ⊗ b → b ⊗ a`.
    pub fn braid(a: &SynObject, b: &SynObject) -> InternalRelation {
        let n = a.arity();
        InternalRelation::raw(
            a.tensor(b),
            b.tensor(a),
            a.tensor(b).predicate().tuples().iter().map(|t| {
                let mut v = t.clone();
                v.extend_from_slice(&t[n..]);
                v.extend_from_slice(&t[..n]);
                v
            }),
        )
    }
}
