//! Contexts and context morphisms.
//!
//! A context is a list of typed ports together with a support set of types
//! that are asserted inhabited. A morphism `Γ₁ → Γ₂` is given by a function
//! from the ports of `Γ₂` back to the ports of `Γ₁` that preserves types,
//! subject to `S₂ ⊆ S₁`. Finite limits are therefore computed as colimits of
//! port sets.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::uf::UnionFind;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeSymbol(Arc<str>);

impl TypeSymbol {
    pub fn new(name: &str) -> Self {
        assert!(!name.is_empty(), "type symbols are nonempty");
        TypeSymbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for TypeSymbol {
    fn from(s: &str) -> Self {
        TypeSymbol::new(s)
    }
}

impl fmt::Debug for TypeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TypeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for TypeSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

pub type TypeSet = BTreeSet<TypeSymbol>;

/// Builds a type set from string names.
pub fn type_set<'a>(names: impl IntoIterator<Item = &'a str>) -> TypeSet {
    names.into_iter().map(TypeSymbol::new).collect()
}

/// An object `(n, S, τ)` of the free regular category.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Context {
    typing: Vec<TypeSymbol>,
    support: TypeSet,
}

impl Context {
    /// The context with the given port types and support `im τ ∪ extra`.
    pub fn new(typing: Vec<TypeSymbol>, extra_support: impl IntoIterator<Item = TypeSymbol>) -> Self {
        let mut support: TypeSet = extra_support.into_iter().collect();
        support.extend(typing.iter().cloned());
        Context { typing, support }
    }

    /// Like [`Context::new`], rejecting symbols outside the declared `types`.
    pub fn checked(
        types: &TypeSet,
        typing: Vec<TypeSymbol>,
        extra_support: impl IntoIterator<Item = TypeSymbol>,
    ) -> Result<Self> {
        let ctx = Context::new(typing, extra_support);
        if let Some(t) = ctx.support.iter().find(|t| !types.contains(*t)) {
            return Err(Error::UnknownType(t.clone()));
        }
        Ok(ctx)
    }

    pub fn from_names(typing: &[&str], extra: &[&str]) -> Self {
        Context::new(
            typing.iter().map(|s| TypeSymbol::new(s)).collect(),
            extra.iter().map(|s| TypeSymbol::new(s)),
        )
    }

    pub fn terminal() -> Self {
        Context {
            typing: Vec::new(),
            support: TypeSet::new(),
        }
    }

    /// `⟨t⟩ = (1, {t})`.
    pub fn unary(t: TypeSymbol) -> Self {
        Context::new(vec![t], [])
    }

    /// `Supp(t) = (0, {t})`.
    pub fn support_of(t: TypeSymbol) -> Self {
        Context::new(Vec::new(), [t])
    }

    pub fn arity(&self) -> usize {
        self.typing.len()
    }

    pub fn typing(&self) -> &[TypeSymbol] {
        &self.typing
    }

    pub fn type_at(&self, i: usize) -> &TypeSymbol {
        &self.typing[i]
    }

    pub fn support(&self) -> &TypeSet {
        &self.support
    }

    pub fn oplus(&self, other: &Context) -> Context {
        let mut typing = self.typing.clone();
        typing.extend(other.typing.iter().cloned());
        let support = self.support.union(&other.support).cloned().collect();
        Context { typing, support }
    }

    pub fn oplus_all<'a>(ctxs: impl IntoIterator<Item = &'a Context>) -> Context {
        ctxs.into_iter()
            .fold(Context::terminal(), |acc, c| acc.oplus(c))
    }

    /// Support symbols not used by any port.
    pub fn extra_support(&self) -> TypeSet {
        let used: TypeSet = self.typing.iter().cloned().collect();
        self.support.difference(&used).cloned().collect()
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.typing.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        let extra = self.extra_support();
        if !extra.is_empty() {
            if !self.typing.is_empty() {
                write!(f, " ")?;
            }
            write!(f, "| supp ")?;
            for (i, t) in extra.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{t}")?;
            }
        }
        write!(f, ")")
    }
}

/// A morphism `dom → cod`; `map[j]` is the port of `dom` feeding port `j`
/// of `cod`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ContextMorphism {
    dom: Context,
    cod: Context,
    map: Vec<usize>,
}

impl ContextMorphism {
    pub fn new(dom: Context, cod: Context, map: Vec<usize>) -> Result<Self> {
        if map.len() != cod.arity() {
            return Err(Error::OutOfRange(format!(
                "underlying function has {} entries, codomain has arity {}",
                map.len(),
                cod.arity()
            )));
        }
        for (j, &i) in map.iter().enumerate() {
            if i >= dom.arity() {
                return Err(Error::OutOfRange(format!(
                    "port {} is sent to {}, domain has arity {}",
                    j + 1,
                    i + 1,
                    dom.arity()
                )));
            }
            if dom.type_at(i) != cod.type_at(j) {
                return Err(Error::TypeMismatch(format!(
                    "codomain port {} has type {}, domain port {} has type {}",
                    j + 1,
                    cod.type_at(j),
                    i + 1,
                    dom.type_at(i)
                )));
            }
        }
        if !cod.support.is_subset(&dom.support) {
            return Err(Error::SupportViolation(format!(
                "codomain support of {cod} is not contained in domain support of {dom}"
            )));
        }
        Ok(ContextMorphism { dom, cod, map })
    }

    pub fn identity(ctx: &Context) -> Self {
        ContextMorphism {
            dom: ctx.clone(),
            cod: ctx.clone(),
            map: (0..ctx.arity()).collect(),
        }
    }

    /// The unique map `Γ → 0`.
    pub fn bang(ctx: &Context) -> Self {
        ContextMorphism {
            dom: ctx.clone(),
            cod: Context::terminal(),
            map: Vec::new(),
        }
    }

    /// `δ_Γ : Γ → Γ ⊕ Γ`.
    pub fn diagonal(ctx: &Context) -> Self {
        let n = ctx.arity();
        ContextMorphism {
            dom: ctx.clone(),
            cod: ctx.oplus(ctx),
            map: (0..2 * n).map(|j| j % n).collect(),
        }
    }

    /// `π₁ : Γ ⊕ Γ′ → Γ`.
    pub fn proj1(a: &Context, b: &Context) -> Self {
        ContextMorphism {
            dom: a.oplus(b),
            cod: a.clone(),
            map: (0..a.arity()).collect(),
        }
    }

    /// `π₂ : Γ ⊕ Γ′ → Γ′`.
    pub fn proj2(a: &Context, b: &Context) -> Self {
        ContextMorphism {
            dom: a.oplus(b),
            cod: b.clone(),
            map: (a.arity()..a.arity() + b.arity()).collect(),
        }
    }

    /// `σ : Γ ⊕ Γ′ → Γ′ ⊕ Γ`.
    pub fn braid(a: &Context, b: &Context) -> Self {
        let (n, m) = (a.arity(), b.arity());
        ContextMorphism {
            dom: a.oplus(b),
            cod: b.oplus(a),
            map: (n..n + m).chain(0..n).collect(),
        }
    }

    /// `f ⊕ g : dom f ⊕ dom g → cod f ⊕ cod g`.
    pub fn oplus(&self, other: &ContextMorphism) -> ContextMorphism {
        let shift = self.dom.arity();
        let mut map = self.map.clone();
        map.extend(other.map.iter().map(|i| i + shift));
        ContextMorphism {
            dom: self.dom.oplus(&other.dom),
            cod: self.cod.oplus(&other.cod),
            map,
        }
    }

    /// The mediating map `Q → Γ₁ ⊕ Γ₂` of two maps out of `Q`.
    pub fn pair(f: &ContextMorphism, g: &ContextMorphism) -> Result<ContextMorphism> {
        if f.dom != g.dom {
            return Err(Error::BoundaryMismatch(format!(
                "pair of maps out of {} and {}",
                f.dom, g.dom
            )));
        }
        let mut map = f.map.clone();
        map.extend(g.map.iter().copied());
        Ok(ContextMorphism {
            dom: f.dom.clone(),
            cod: f.cod.oplus(&g.cod),
            map,
        })
    }

    pub fn dom(&self) -> &Context {
        &self.dom
    }

    pub fn cod(&self) -> &Context {
        &self.cod
    }

    /// The underlying function, from codomain ports to domain ports.
    pub fn underlying(&self) -> &[usize] {
        &self.map
    }

    /// Diagrammatic composite `self ⨟ next`.
    pub fn then(&self, next: &ContextMorphism) -> Result<ContextMorphism> {
        if self.cod != next.dom {
            return Err(Error::BoundaryMismatch(format!(
                "cannot compose a map into {} with a map out of {}",
                self.cod, next.dom
            )));
        }
        Ok(ContextMorphism {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            map: next.map.iter().map(|&k| self.map[k]).collect(),
        })
    }

    pub fn is_mono(&self) -> bool {
        let mut hit = vec![false; self.dom.arity()];
        for &i in &self.map {
            hit[i] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_regular_epi(&self) -> bool {
        let mut hit = vec![false; self.dom.arity()];
        for &i in &self.map {
            if hit[i] {
                return false;
            }
            hit[i] = true;
        }
        self.dom.support == self.cod.support
    }

    /// Factors `self` as a regular epi followed by a mono.
    pub fn image_factor(&self) -> (ContextMorphism, ContextMorphism) {
        let image: Vec<usize> = self.map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mid = Context {
            typing: image.iter().map(|&i| self.dom.typing[i].clone()).collect(),
            support: self.dom.support.clone(),
        };
        let epi = ContextMorphism {
            dom: self.dom.clone(),
            cod: mid.clone(),
            map: image.clone(),
        };
        let mono = ContextMorphism {
            dom: mid,
            cod: self.cod.clone(),
            map: self
                .map
                .iter()
                .map(|i| image.binary_search(i).expect("image contains every value"))
                .collect(),
        };
        (epi, mono)
    }

    /// Every morphism `dom → cod`, in lexicographic order of the
    /// underlying function.
    pub fn all(dom: &Context, cod: &Context) -> Vec<ContextMorphism> {
        if !cod.support.is_subset(&dom.support) {
            return Vec::new();
        }
        let choices: Vec<Vec<usize>> = cod
            .typing
            .iter()
            .map(|t| (0..dom.arity()).filter(|&i| &dom.typing[i] == t).collect())
            .collect();
        let mut out = Vec::new();
        let mut map = Vec::with_capacity(cod.arity());
        fn go(
            choices: &[Vec<usize>],
            map: &mut Vec<usize>,
            dom: &Context,
            cod: &Context,
            out: &mut Vec<ContextMorphism>,
        ) {
            if map.len() == choices.len() {
                out.push(ContextMorphism {
                    dom: dom.clone(),
                    cod: cod.clone(),
                    map: map.clone(),
                });
                return;
            }
            for &i in &choices[map.len()] {
                map.push(i);
                go(choices, map, dom, cod, out);
                map.pop();
            }
        }
        go(&choices, &mut map, dom, cod, &mut out);
        out
    }
}

/// The pullback of a cospan `f : Γ₁ → Γ ← Γ₂ : g`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub apex: Context,
    pub p1: ContextMorphism,
    pub p2: ContextMorphism,
}

pub fn pullback(f: &ContextMorphism, g: &ContextMorphism) -> Result<Pullback> {
    if f.cod != g.cod {
        return Err(Error::BoundaryMismatch(format!(
            "pullback of maps into {} and {}",
            f.cod, g.cod
        )));
    }
    let n1 = f.dom.arity();
    let n2 = g.dom.arity();
    let mut uf = UnionFind::new(n1 + n2);
    for (&a, &b) in f.map.iter().zip(&g.map) {
        uf.union(a, n1 + b);
    }
    let (class_of, k) = uf.classes();
    let mut typing: Vec<Option<TypeSymbol>> = vec![None; k];
    for (x, &c) in class_of.iter().enumerate() {
        if typing[c].is_none() {
            typing[c] = Some(if x < n1 {
                f.dom.typing[x].clone()
            } else {
                g.dom.typing[x - n1].clone()
            });
        }
    }
    let apex = Context {
        typing: typing.into_iter().map(|t| t.expect("every class is nonempty")).collect(),
        support: f.dom.support.union(&g.dom.support).cloned().collect(),
    };
    let p1 = ContextMorphism {
        dom: apex.clone(),
        cod: f.dom.clone(),
        map: class_of[..n1].to_vec(),
    };
    let p2 = ContextMorphism {
        dom: apex.clone(),
        cod: g.dom.clone(),
        map: class_of[n1..].to_vec(),
    };
    Ok(Pullback { apex, p1, p2 })
}

/// The structure maps attached to a pair of contexts.
#[derive(Clone, Debug)]
pub struct CanonicalMaps {
    pub diagonal: ContextMorphism,
    pub proj1: ContextMorphism,
    pub proj2: ContextMorphism,
    pub bang: ContextMorphism,
    pub braid: ContextMorphism,
}

pub fn canonical_maps(a: &Context, b: &Context) -> CanonicalMaps {
    CanonicalMaps {
        diagonal: ContextMorphism::diagonal(a),
        proj1: ContextMorphism::proj1(a, b),
        proj2: ContextMorphism::proj2(a, b),
        bang: ContextMorphism::bang(a),
        braid: ContextMorphism::braid(a, b),
    }
}
