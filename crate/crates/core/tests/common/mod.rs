//! Seeded generators and brute-force oracles shared by the integration
//! and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regcalc::context::{type_set, TypeSet};
use regcalc::model::Tuple;
use regcalc::wiring::Shell;
use regcalc::{Atom, Cell, Context, ContextMorphism, FinRelation, GraphicalTerm, ModelInstance};
use regcalc::{PredicateSignature, TypeSymbol, WiringDiagram};

pub fn ty(s: &str) -> TypeSymbol {
    TypeSymbol::new(s)
}

pub fn types(names: &[&str]) -> Vec<TypeSymbol> {
    names.iter().map(|n| ty(n)).collect()
}

/// Two port types plus `z`, which only ever appears as support.
pub fn test_signature() -> PredicateSignature {
    PredicateSignature::new(type_set(["x", "y", "z"]))
        .with("R", Context::from_names(&["x", "y"], &[]))
        .unwrap()
        .with("S", Context::from_names(&["y", "y"], &[]))
        .unwrap()
        .with("P", Context::from_names(&["x"], &[]))
        .unwrap()
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn upto(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..=n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("nonempty choice")
    }

    pub fn subset<T: Clone>(&mut self, xs: &[T], p: f64) -> Vec<T> {
        xs.iter().filter(|_| self.rng.gen_bool(p)).cloned().collect()
    }

    pub fn context(&mut self, tys: &[TypeSymbol], max_arity: usize) -> Context {
        let n = self.upto(max_arity);
        let typing = (0..n).map(|_| self.pick(tys).clone()).collect();
        let extra = self.subset(tys, 0.2);
        Context::new(typing, extra)
    }

    /// A random morphism out of `dom` with a codomain of the given arity,
    /// or `None` when `dom` has no ports to map to.
    pub fn morphism_from(&mut self, dom: &Context, cod_arity: usize) -> Option<ContextMorphism> {
        if dom.arity() == 0 && cod_arity > 0 {
            return None;
        }
        let map: Vec<usize> = (0..cod_arity).map(|_| self.below(dom.arity())).collect();
        let typing = map.iter().map(|&i| dom.type_at(i).clone()).collect();
        let support: Vec<TypeSymbol> = dom.support().iter().cloned().collect();
        let extra = self.subset(&support, 0.5);
        let cod = Context::new(typing, extra);
        Some(ContextMorphism::new(dom.clone(), cod, map).expect("generated morphism is valid"))
    }

    /// A random morphism `dom → cod`, if one exists.
    pub fn morphism_between(&mut self, dom: &Context, cod: &Context) -> Option<ContextMorphism> {
        if !cod.support().is_subset(dom.support()) {
            return None;
        }
        let mut map = Vec::new();
        for t in cod.typing() {
            let options: Vec<usize> = (0..dom.arity()).filter(|&i| dom.type_at(i) == t).collect();
            if options.is_empty() {
                return None;
            }
            map.push(*self.pick(&options));
        }
        ContextMorphism::new(dom.clone(), cod.clone(), map).ok()
    }

    /// Wires every port to a dot of its type, reusing an existing dot with
    /// probability `reuse`.
    pub fn diagram(&mut self, inner: Vec<Context>, outer: Context, reuse: f64, tys: &[TypeSymbol]) -> WiringDiagram {
        let port_types: Vec<TypeSymbol> = inner
            .iter()
            .chain(std::iter::once(&outer))
            .flat_map(|c| c.typing().iter().cloned())
            .collect();
        let mut dots: Vec<TypeSymbol> = Vec::new();
        let mut boundary = Vec::new();
        for t in &port_types {
            let same: Vec<usize> = (0..dots.len()).filter(|&d| &dots[d] == t).collect();
            if !same.is_empty() && self.chance(reuse) {
                boundary.push(*self.pick(&same));
            } else {
                dots.push(t.clone());
                boundary.push(dots.len() - 1);
            }
        }
        let extra = self.subset(tys, 0.15);
        WiringDiagram::new(inner, outer, dots, boundary, extra).expect("generated diagram is valid")
    }

    /// A diagram below `w` in the 2-cell order: some same-typed dots of `w`
    /// are joined and some support labels are added.
    pub fn join_dots(&mut self, w: &WiringDiagram, tys: &[TypeSymbol]) -> WiringDiagram {
        let types = w.dot_types();
        let mut target: Vec<usize> = (0..types.len()).collect();
        for d in 0..types.len() {
            let earlier: Vec<usize> = (0..d).filter(|&e| types[e] == types[d] && target[e] == e).collect();
            if !earlier.is_empty() && self.chance(0.4) {
                target[d] = *self.pick(&earlier);
            }
        }
        let boundary = w.boundary().iter().map(|&d| target[d]).collect();
        let mut support: Vec<TypeSymbol> = w.support().iter().cloned().collect();
        support.extend(self.subset(tys, 0.2));
        WiringDiagram::new(w.inner().to_vec(), w.outer().clone(), types.to_vec(), boundary, support)
            .expect("joining same-typed dots is valid")
    }

    /// A flat term over `sig` with at most `max_cells` cells and at most
    /// `max_dots` dots.
    pub fn term(&mut self, sig: &PredicateSignature, outer: &Context, max_cells: usize, max_dots: usize) -> GraphicalTerm {
        let preds: Vec<(&String, &Context)> = sig.predicates().iter().collect();
        let k = self.upto(max_cells);
        let mut cells = Vec::new();
        let mut inner = Vec::new();
        for _ in 0..k {
            let (name, ctx) = *self.pick(&preds);
            cells.push(Cell::Pred(name.clone()));
            inner.push(ctx.clone());
        }
        let port_types: Vec<TypeSymbol> = inner
            .iter()
            .chain(std::iter::once(outer))
            .flat_map(|c| c.typing().iter().cloned())
            .collect();
        let distinct: Vec<TypeSymbol> = port_types.iter().cloned().collect::<TypeSet>().into_iter().collect();
        assert!(distinct.len() <= max_dots, "not enough dots for the port types");
        let mut dots = distinct.clone();
        while !distinct.is_empty() && dots.len() < max_dots && self.chance(0.6) {
            let t = self.pick(&distinct).clone();
            dots.push(t);
        }
        let boundary = port_types
            .iter()
            .map(|t| {
                let same: Vec<usize> = (0..dots.len()).filter(|&d| &dots[d] == t).collect();
                *self.pick(&same)
            })
            .collect();
        let labels: Vec<TypeSymbol> = sig.types().iter().cloned().collect();
        let extra = self.subset(&labels, 0.1);
        let d = WiringDiagram::new(inner, outer.clone(), dots, boundary, extra).expect("valid term diagram");
        GraphicalTerm::new(sig, d, cells).expect("cells match shells")
    }

    /// A model with domains of size at most `max_domain` and random
    /// relations.
    pub fn model(&mut self, sig: &PredicateSignature, max_domain: usize) -> ModelInstance {
        let mut domains = BTreeMap::new();
        for t in sig.types() {
            let n = self.upto(max_domain);
            domains.insert(t.clone(), (0..n).map(|i| Atom::from(format!("{t}{i}"))).collect());
        }
        let mut m = ModelInstance::new(sig.clone(), domains).unwrap();
        for (name, ctx) in sig.predicates() {
            let top: Vec<Tuple> = m.true_rel(ctx).tuples().iter().cloned().collect();
            let rel = FinRelation::new(ctx.clone(), self.subset(&top, 0.5));
            m.set_relation(name, rel).unwrap();
        }
        m
    }

    /// A random relation on `ctx` within `m`.
    pub fn relation(&mut self, m: &ModelInstance, ctx: &Context) -> FinRelation {
        let top: Vec<Tuple> = m.true_rel(ctx).tuples().iter().cloned().collect();
        FinRelation::new(ctx.clone(), self.subset(&top, 0.5))
    }
}

/// Every assignment of atoms to the dots of a flat term, filtered by the
/// cells, restricted to the outer ports.
pub fn naive_eval(m: &ModelInstance, t: &GraphicalTerm) -> BTreeSet<Tuple> {
    let t = t.flatten();
    let d = t.diagram();
    let mut out = BTreeSet::new();
    if d.support().iter().any(|s| m.domain(s).is_empty()) {
        return out;
    }
    let names = t.predicate_cells().unwrap();
    let domains: Vec<&[Atom]> = d.dot_types().iter().map(|s| m.domain(s)).collect();
    let total: usize = domains.iter().map(|d| d.len()).product();
    for code in 0..total {
        let mut c = code;
        let assignment: Vec<&Atom> = domains
            .iter()
            .map(|dom| {
                let a = &dom[c % dom.len()];
                c /= dom.len();
                a
            })
            .collect();
        let tuple_of = |shell| -> Tuple { d.shell_dots(shell).iter().map(|&k| assignment[k].clone()).collect() };
        let ok = names
            .iter()
            .enumerate()
            .all(|(i, name)| m.relation_of(name).unwrap().contains(&tuple_of(Shell::Inner(i))));
        if ok {
            out.insert(tuple_of(Shell::Outer));
        }
    }
    out
}

/// Subsets of `items` with at most `k` elements.
pub fn small_subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(usize, Vec<T>)> = vec![(0, Vec::new())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (start, s) in &layer {
            for (i, item) in items.iter().enumerate().skip(*start) {
                let mut s = s.clone();
                s.push(item.clone());
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        layer = next;
    }
    out
}

/// Brute-force containment over every model whose domain for each type
/// has at most as many atoms as `t` has dots of that type (plus one for a
/// white label), and whose relations have at most as many tuples as `t`
/// has cells for that predicate.
pub fn oracle_contains(sig: &PredicateSignature, t: &GraphicalTerm, t2: &GraphicalTerm) -> bool {
    let flat = t.flatten();
    let d = flat.diagram();
    let names = flat.predicate_cells().unwrap();
    let mut caps: BTreeMap<TypeSymbol, usize> = sig.types().iter().map(|s| (s.clone(), 0)).collect();
    for s in d.dot_types() {
        *caps.get_mut(s).unwrap() += 1;
    }
    for s in d.white_labels() {
        *caps.get_mut(&s).unwrap() += 1;
    }
    let type_list: Vec<TypeSymbol> = caps.keys().cloned().collect();
    let mut sizes = vec![0usize; type_list.len()];
    loop {
        let domains: BTreeMap<TypeSymbol, Vec<Atom>> = type_list
            .iter()
            .zip(&sizes)
            .map(|(s, &n)| (s.clone(), (0..n).map(|i| Atom::from(format!("{s}{i}"))).collect()))
            .collect();
        let base = ModelInstance::new(sig.clone(), domains).unwrap();
        let mut models = vec![base.clone()];
        for (name, ctx) in sig.predicates() {
            let cap = names.iter().filter(|n| *n == name).count();
            let top: Vec<Tuple> = base.true_rel(ctx).tuples().iter().cloned().collect();
            let choices = small_subsets(&top, cap);
            models = models
                .into_iter()
                .flat_map(|m| {
                    choices.iter().map(move |ts| {
                        let mut m = m.clone();
                        m.set_relation(name, FinRelation::new(ctx.clone(), ts.clone())).unwrap();
                        m
                    })
                })
                .collect();
        }
        for m in &models {
            if !naive_eval(m, t).is_subset(&naive_eval(m, t2)) {
                return false;
            }
        }
        // next size vector
        let mut i = 0;
        loop {
            if i == sizes.len() {
                return true;
            }
            if sizes[i] < caps[&type_list[i]] {
                sizes[i] += 1;
                break;
            }
            sizes[i] = 0;
            i += 1;
        }
    }
}

/// Every context over `tys` of arity at most `max_arity`, each with every
/// possible extra support.
pub fn all_contexts(tys: &[TypeSymbol], max_arity: usize) -> Vec<Context> {
    let mut typings: Vec<Vec<TypeSymbol>> = vec![Vec::new()];
    let mut layer = typings.clone();
    for _ in 0..max_arity {
        layer = layer
            .iter()
            .flat_map(|p| {
                tys.iter().map(move |t| {
                    let mut q = p.clone();
                    q.push(t.clone());
                    q
                })
            })
            .collect();
        typings.extend(layer.iter().cloned());
    }
    let mut out = Vec::new();
    for typing in typings {
        let used: TypeSet = typing.iter().cloned().collect();
        let rest: Vec<TypeSymbol> = tys.iter().filter(|t| !used.contains(*t)).cloned().collect();
        for extra in small_subsets(&rest, rest.len()) {
            out.push(Context::new(typing.clone(), extra));
        }
    }
    out
}
