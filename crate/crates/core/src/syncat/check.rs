//! Bounded exhaustive verification of the regular-category structure.
//!
//! Objects are all `(Γ, φ)` with `Γ` of arity at most `max_arity` (support
//! exactly the port types, plus the zero-ary support contexts) and `φ` of
//! at most `max_tuples` tuples. Universal properties quantify over cone
//! objects of arity at most `limit_arity`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    equalizer_ir, function_graphs, hom_relations, image_ir, is_mono_ir, is_regular_epi_ir, pair,
    pullback_ir, structure, InternalRelation, SynObject, SynPullback,
};
use crate::context::{Context, TypeSymbol};
use crate::error::{Error, Result};
use crate::model::{FinRelation, ModelInstance, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_arity: usize,
    pub max_tuples: usize,
    pub limit_arity: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_arity: 2,
            max_tuples: 2,
            limit_arity: 1,
        }
    }
}

/// Deliberate defects for mutation testing of the suite itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Treat every function as a regular epi, skipping the requirement
    /// that the codomain predicate lie under the image.
    SkipImageSupportCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub objects: usize,
    pub morphisms: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

type Outcome = std::result::Result<usize, String>;

fn run<T: Sync>(name: &str, items: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Check {
    let results: Vec<Outcome> = items.par_iter().map(f).collect();
    let mut cases = 0;
    let mut witness = None;
    for r in results {
        match r {
            Ok(n) => cases += n,
            Err(w) => {
                cases += 1;
                witness.get_or_insert(w);
            }
        }
    }
    Check {
        name: name.to_string(),
        passed: witness.is_none(),
        cases,
        witness,
    }
}

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn comp(a: &InternalRelation, b: &InternalRelation) -> InternalRelation {
    a.compose(b).expect("composable by construction")
}

/// Contexts of arity `1..=max_arity` with support the port types, plus
/// `0` and `Supp(s)` for every type.
fn contexts(types: &[TypeSymbol], max_arity: usize) -> Vec<Context> {
    let mut out = vec![Context::terminal()];
    out.extend(types.iter().map(|t| Context::support_of(t.clone())));
    let mut layer: Vec<Vec<TypeSymbol>> = vec![Vec::new()];
    for _ in 0..max_arity {
        layer = layer
            .iter()
            .flat_map(|p| {
                types.iter().map(move |t| {
                    let mut q = p.clone();
                    q.push(t.clone());
                    q
                })
            })
            .collect();
        out.extend(layer.iter().map(|typing| Context::new(typing.clone(), [])));
    }
    out
}

fn subsets_up_to(items: &[Tuple], k: usize) -> Vec<Vec<Tuple>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<Tuple>)> = vec![(0, Vec::new())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (start, set) in &frontier {
            for (i, t) in items.iter().enumerate().skip(*start) {
                let mut s = set.clone();
                s.push(t.clone());
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        frontier = next;
    }
    out
}

struct Universe {
    objects: Vec<SynObject>,
    /// indices of objects usable in universal-property quantifiers
    limit: Vec<usize>,
    /// functions between every ordered pair of objects
    homs: BTreeMap<(usize, usize), Vec<InternalRelation>>,
    fault: Fault,
}

impl Universe {
    fn build(m: &ModelInstance, bounds: Bounds, fault: Fault) -> Self {
        let types: Vec<TypeSymbol> = m.signature().types().iter().cloned().collect();
        let mut objects = Vec::new();
        for ctx in contexts(&types, bounds.max_arity) {
            let top: Vec<Tuple> = m.true_rel(&ctx).tuples().iter().cloned().collect();
            for s in subsets_up_to(&top, bounds.max_tuples) {
                objects.push(SynObject::new(FinRelation::new(ctx.clone(), s)));
            }
        }
        let limit = (0..objects.len())
            .filter(|&i| objects[i].arity() <= bounds.limit_arity)
            .collect();
        let pairs: Vec<(usize, usize)> = (0..objects.len())
            .flat_map(|i| (0..objects.len()).map(move |j| (i, j)))
            .collect();
        let homs = pairs
            .par_iter()
            .map(|&(i, j)| {
                let fs: Vec<InternalRelation> = hom_relations(&objects[i], &objects[j])
                    .into_iter()
                    .filter(InternalRelation::is_function)
                    .collect();
                ((i, j), fs)
            })
            .collect();
        Universe {
            objects,
            limit,
            homs,
            fault,
        }
    }

    fn hom(&self, i: usize, j: usize) -> &[InternalRelation] {
        &self.homs[&(i, j)]
    }

    fn is_regular_epi(&self, t: &InternalRelation) -> bool {
        match self.fault {
            Fault::None => is_regular_epi_ir(t),
            Fault::SkipImageSupportCheck => true,
        }
    }

    fn limit_morphisms(&self) -> Vec<(usize, usize, InternalRelation)> {
        let mut out = Vec::new();
        for &i in &self.limit {
            for &j in &self.limit {
                out.extend(self.hom(i, j).iter().map(|f| (i, j, f.clone())));
            }
        }
        out
    }

    fn all_morphisms(&self) -> Vec<(usize, usize, InternalRelation)> {
        self.homs
            .iter()
            .flat_map(|(&(i, j), fs)| fs.iter().map(move |f| (i, j, f.clone())))
            .collect()
    }

    /// Whether `p : P → A` is the coequalizer of its kernel pair, tested
    /// against every limit object.
    fn coequalizes_kernel_pair(&self, p: &InternalRelation) -> std::result::Result<(), String> {
        let kp = pullback_ir(p, p).map_err(|e| e.to_string())?;
        for &z in &self.limit {
            let zo = &self.objects[z];
            let outs: Vec<InternalRelation> = function_graphs(p.cod(), zo);
            for h in function_graphs(p.dom(), zo) {
                if comp(&kp.p1, &h) != comp(&kp.p2, &h) {
                    continue;
                }
                let n = outs.iter().filter(|k| comp(p, k) == h).count();
                ensure(n == 1, || {
                    format!("{p:?} does not coequalize its kernel pair: {n} factorizations of {h:?}")
                })?;
            }
        }
        Ok(())
    }
}

pub fn check_regular_axioms(m: &ModelInstance, bounds: Bounds, fault: Fault) -> Report {
    let u = Universe::build(m, bounds, fault);
    let n = u.objects.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let all = u.all_morphisms();
    let limit = u.limit_morphisms();
    let mut checks = Vec::new();

    checks.push(run("hom-sets-are-function-graphs", &pairs, |&(i, j)| {
        let (a, b) = (&u.objects[i], &u.objects[j]);
        let found: BTreeSet<&InternalRelation> = u.hom(i, j).iter().collect();
        let graphs = function_graphs(a, b);
        let graphs: BTreeSet<&InternalRelation> = graphs.iter().collect();
        let expected = (b.predicate().len() as u64).pow(a.predicate().len() as u32);
        ensure(found == graphs && found.len() as u64 == expected, || {
            format!("{a:?} → {b:?}: {} functions, {expected} set maps", found.len())
        })?;
        Ok(1)
    }));

    checks.push(run("function-characterizations-agree", &pairs, |&(i, j)| {
        let rels = hom_relations(&u.objects[i], &u.objects[j]);
        for r in &rels {
            let c = r.classify();
            ensure(c.total == c.has_unit && c.deterministic == c.has_counit, || {
                format!("{r:?}: {c:?}")
            })?;
        }
        Ok(rels.len())
    }));

    checks.push(run("identity-and-unit-laws", &all, |(i, j, f)| {
        let ida = InternalRelation::identity(&u.objects[*i]);
        let idb = InternalRelation::identity(&u.objects[*j]);
        ensure(ida.is_function(), || format!("identity is not a function: {ida:?}"))?;
        ensure(&comp(&ida, f) == f && &comp(f, &idb) == f, || format!("unit law fails for {f:?}"))?;
        Ok(1)
    }));

    checks.push(run("associativity", &limit, |(_, j, f)| {
        let mut cases = 0;
        for &k in &u.limit {
            for g in u.hom(*j, k) {
                let fg = comp(f, g);
                for &l in &u.limit {
                    for h in u.hom(k, l) {
                        ensure(comp(&fg, h) == comp(f, &comp(g, h)), || {
                            format!("({f:?} ⊛ {g:?}) ⊛ {h:?}")
                        })?;
                        cases += 1;
                    }
                }
            }
        }
        Ok(cases)
    }));

    checks.push(run("order-on-functions-is-discrete", &pairs, |&(i, j)| {
        let fs = u.hom(i, j);
        for f in fs {
            for g in fs {
                ensure(!f.is_subset(g) || f == g, || format!("{f:?} ⊆ {g:?}"))?;
            }
        }
        Ok(fs.len() * fs.len())
    }));

    let term = SynObject::terminal();
    let objs: Vec<usize> = (0..n).collect();
    checks.push(run("terminal-object", &objs, |&i| {
        let o = &u.objects[i];
        let fs: Vec<InternalRelation> = hom_relations(o, &term)
            .into_iter()
            .filter(InternalRelation::is_function)
            .collect();
        ensure(fs == vec![InternalRelation::bang(o)], || {
            format!("{o:?} has {} maps to the terminal object", fs.len())
        })?;
        Ok(1)
    }));

    // cospans among limit objects
    let cospans: Vec<(usize, usize, &InternalRelation, &InternalRelation)> = {
        let mut out = Vec::new();
        for &c in &u.limit {
            let into: Vec<(usize, &InternalRelation)> = u
                .limit
                .iter()
                .flat_map(|&a| u.hom(a, c).iter().map(move |f| (a, f)))
                .collect();
            for &(a, f) in &into {
                for &(b, g) in &into {
                    out.push((a, b, f, g));
                }
            }
        }
        out
    };
    let pullbacks: Vec<SynPullback> = cospans
        .par_iter()
        .map(|(_, _, f, g)| pullback_ir(f, g).expect("functions with a common codomain"))
        .collect();
    let indexed: Vec<usize> = (0..cospans.len()).collect();

    checks.push(run("pullbacks", &indexed, |&c| {
        let (a, b, f, g) = cospans[c];
        let pb = &pullbacks[c];
        ensure(pb.p1.is_function() && pb.p2.is_function(), || {
            format!("pullback projections of {f:?}, {g:?} are not functions")
        })?;
        ensure(comp(&pb.p1, f) == comp(&pb.p2, g), || {
            format!("pullback square of {f:?}, {g:?} does not commute")
        })?;
        let mut cases = 1;
        for &q in &u.limit {
            let mut mediators: BTreeMap<(&FinRelation, &FinRelation), usize> = BTreeMap::new();
            let cands = function_graphs(&u.objects[q], &pb.apex);
            let legs: Vec<(InternalRelation, InternalRelation)> =
                cands.iter().map(|m| (comp(m, &pb.p1), comp(m, &pb.p2))).collect();
            for (l1, l2) in &legs {
                *mediators.entry((l1.theta(), l2.theta())).or_default() += 1;
            }
            for q1 in u.hom(q, a) {
                for q2 in u.hom(q, b) {
                    if comp(q1, f) != comp(q2, g) {
                        continue;
                    }
                    cases += 1;
                    let count = mediators.get(&(q1.theta(), q2.theta())).copied().unwrap_or(0);
                    ensure(count == 1, || {
                        format!("cone {q1:?}, {q2:?} over {f:?}, {g:?} has {count} mediators")
                    })?;
                    let paired = pair(pb, q1, q2).map_err(|e| e.to_string())?;
                    ensure(comp(&paired, &pb.p1) == *q1 && comp(&paired, &pb.p2) == *q2, || {
                        format!("pairing of {q1:?}, {q2:?} does not mediate")
                    })?;
                }
            }
        }
        Ok(cases)
    }));

    let parallel: Vec<(usize, usize, usize, usize)> = pairs
        .iter()
        .flat_map(|&(i, j)| {
            let k = u.hom(i, j).len();
            (0..k).flat_map(move |x| (0..k).map(move |y| (i, j, x, y)))
        })
        .collect();
    checks.push(run("equalizers", &parallel, |&(i, j, x, y)| {
        let (t1, t2) = (&u.hom(i, j)[x], &u.hom(i, j)[y]);
        let (e, inc) = equalizer_ir(t1, t2).map_err(|e| e.to_string())?;
        let pointwise: BTreeSet<&Tuple> = u.objects[i]
            .predicate()
            .tuples()
            .iter()
            .filter(|a| {
                let img = |t: &InternalRelation| -> BTreeSet<Tuple> {
                    t.pairs().filter(|(x, _)| x == &a.as_slice()).map(|(_, y)| y.to_vec()).collect()
                };
                img(t1) == img(t2)
            })
            .collect();
        ensure(e.predicate().tuples().iter().collect::<BTreeSet<_>>() == pointwise, || {
            format!("equalizer of {t1:?}, {t2:?} is {e:?}")
        })?;
        ensure(inc.is_function() && is_mono_ir(&inc), || format!("inclusion {inc:?} is not mono"))?;
        ensure(comp(&inc, t1) == comp(&inc, t2), || format!("{inc:?} does not equalize"))?;
        let mut cases = 1;
        if u.objects[i].arity() <= bounds.limit_arity {
            for &q in &u.limit {
                let cands = function_graphs(&u.objects[q], &e);
                for h in u.hom(q, i) {
                    if comp(h, t1) != comp(h, t2) {
                        continue;
                    }
                    cases += 1;
                    let count = cands.iter().filter(|k| comp(k, &inc) == *h).count();
                    ensure(count == 1, || format!("{h:?} factors through {e:?} {count} times"))?;
                }
            }
        }
        Ok(cases)
    }));

    checks.push(run("image-factorizations", &all, |(_, _, t)| {
        let im = image_ir(t).map_err(|e| e.to_string())?;
        ensure(im.epi.is_function() && im.mono.is_function(), || format!("factors of {t:?}"))?;
        ensure(&comp(&im.epi, &im.mono) == t, || format!("factors of {t:?} do not recompose"))?;
        ensure(u.is_regular_epi(&im.epi) && is_mono_ir(&im.mono), || {
            format!("factors of {t:?} are not (regular epi, mono)")
        })?;
        Ok(1)
    }));

    checks.push(run("factorization-orthogonality", &limit, |(a, b, e)| {
        if !u.is_regular_epi(e) {
            return Ok(0);
        }
        let mut cases = 0;
        for &c in &u.limit {
            for &d in &u.limit {
                for mo in u.hom(c, d).iter().filter(|m| is_mono_ir(m)) {
                    for top in u.hom(*a, c) {
                        let lhs = comp(top, mo);
                        for bottom in u.hom(*b, d) {
                            if comp(e, bottom) != lhs {
                                continue;
                            }
                            cases += 1;
                            let count = u
                                .hom(*b, c)
                                .iter()
                                .filter(|k| comp(e, k) == *top && comp(k, mo) == *bottom)
                                .count();
                            ensure(count == 1, || {
                                format!("square {e:?} / {mo:?} has {count} diagonals")
                            })?;
                        }
                    }
                }
            }
        }
        Ok(cases)
    }));

    checks.push(run("regular-epis-are-coequalizers", &limit, |(_, _, t)| {
        let definitional = u.coequalizes_kernel_pair(t);
        ensure(u.is_regular_epi(t) == definitional.is_ok(), || {
            format!(
                "{t:?}: predicate says {}, kernel-pair test says {}",
                u.is_regular_epi(t),
                definitional.is_ok()
            )
        })?;
        Ok(1)
    }));

    checks.push(run("monos-are-left-cancellable", &limit, |(a, _, t)| {
        let mut cancellable = true;
        for &q in &u.limit {
            let hs = u.hom(q, *a);
            for h in hs {
                for k in hs {
                    if h != k && comp(h, t) == comp(k, t) {
                        cancellable = false;
                    }
                }
            }
        }
        ensure(is_mono_ir(t) == cancellable, || {
            format!("{t:?}: predicate says {}, cancellation says {cancellable}", is_mono_ir(t))
        })?;
        Ok(1)
    }));

    checks.push(run("regular-epis-pullback-stable", &indexed, |&c| {
        let (_, _, _, g) = cospans[c];
        if !u.is_regular_epi(g) {
            return Ok(0);
        }
        u.coequalizes_kernel_pair(&pullbacks[c].p1)
            .map_err(|w| format!("pullback of regular epi {g:?}: {w}"))?;
        Ok(1)
    }));

    checks.push(run("hypergraph-laws", &objs, |&i| {
        let o = &u.objects[i];
        let id = InternalRelation::identity(o);
        let (d, mu, e, eta) = (
            structure::delta(o),
            structure::mu(o),
            structure::epsilon(o),
            structure::eta(o),
        );
        let s = structure::braid(o, o);
        let w = |law: &str| format!("{law} fails on {o:?}");
        ensure(comp(&d, &d.tensor(&id)) == comp(&d, &id.tensor(&d)), || w("coassociativity"))?;
        ensure(comp(&d, &e.tensor(&id)) == id && comp(&d, &id.tensor(&e)) == id, || w("counit"))?;
        ensure(comp(&d, &s) == d, || w("cocommutativity"))?;
        ensure(comp(&mu.tensor(&id), &mu) == comp(&id.tensor(&mu), &mu), || w("associativity"))?;
        ensure(comp(&eta.tensor(&id), &mu) == id && comp(&id.tensor(&eta), &mu) == id, || w("unit"))?;
        ensure(comp(&s, &mu) == mu, || w("commutativity"))?;
        let frob = comp(&mu, &d);
        ensure(frob == comp(&id.tensor(&d), &mu.tensor(&id)), || w("frobenius (left)"))?;
        ensure(frob == comp(&d.tensor(&id), &id.tensor(&mu)), || w("frobenius (right)"))?;
        ensure(comp(&d, &mu) == id, || w("specialness"))?;
        ensure(mu == d.transpose() && eta == e.transpose(), || w("transposition"))?;
        Ok(10)
    }));

    checks.push(run("adjoint-monoid-inequalities", &objs, |&i| {
        let o = &u.objects[i];
        let id = InternalRelation::identity(o);
        let id2 = InternalRelation::identity(&o.tensor(o));
        let id0 = InternalRelation::identity(&term);
        let (d, mu, e, eta) = (
            structure::delta(o),
            structure::mu(o),
            structure::epsilon(o),
            structure::eta(o),
        );
        let w = |law: &str| format!("{law} fails on {o:?}");
        ensure(id.is_subset(&comp(&d, &mu)), || w("id ≤ δ⊛μ"))?;
        ensure(comp(&mu, &d).is_subset(&id2), || w("μ⊛δ ≤ id"))?;
        ensure(id.is_subset(&comp(&e, &eta)), || w("id ≤ ε⊛η"))?;
        ensure(comp(&eta, &e).is_subset(&id0), || w("η⊛ε ≤ id"))?;
        Ok(4)
    }));

    let passed = checks.iter().all(|c| c.passed);
    Report {
        objects: n,
        morphisms: all.len(),
        checks,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FundamentalReport {
    pub relations: u64,
    pub expected_relations: u64,
    pub functions: u64,
    pub expected_functions: u64,
    pub functions_are_graphs: bool,
    pub passed: bool,
}

/// Compares internal relations and functions `(⟨r⟩, true) → (⟨r′⟩, true)`
/// with relations and functions between the sets `D_r` and `D_r′`.
pub fn fundamental_check(m: &ModelInstance, r: &TypeSymbol, r2: &TypeSymbol) -> Result<FundamentalReport> {
    for t in [r, r2] {
        if !m.signature().types().contains(t) {
            return Err(Error::UnknownType(t.clone()));
        }
    }
    let (n1, n2) = (m.domain(r).len(), m.domain(r2).len());
    if n1 * n2 > 20 {
        return Err(Error::OutOfRange(format!(
            "{n1} × {n2} pairs is too many to enumerate relations"
        )));
    }
    let a = SynObject::new(m.true_rel(&Context::unary(r.clone())));
    let b = SynObject::new(m.true_rel(&Context::unary(r2.clone())));
    let space = a.predicate().product(b.predicate());
    let candidates: Vec<Tuple> = space.tuples().iter().cloned().collect();
    let mut relations = 0;
    let mut functions = BTreeSet::new();
    for mask in 0u32..1 << candidates.len() {
        let theta = FinRelation::new(
            space.context().clone(),
            candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone()),
        );
        let Ok(rel) = InternalRelation::new(a.clone(), b.clone(), theta) else {
            continue;
        };
        relations += 1;
        if rel.is_function() {
            functions.insert(rel);
        }
    }
    // graphs of set maps D_r → D_r′, built from the domains directly
    let mut graphs = BTreeSet::new();
    let (xs, ys) = (m.domain(r), m.domain(r2));
    let total = (ys.len() as u64).pow(xs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut tuples = Vec::new();
        for x in xs {
            let y = &ys[(c % ys.len() as u64) as usize];
            c /= ys.len().max(1) as u64;
            tuples.push(vec![x.clone(), y.clone()]);
        }
        graphs.insert(InternalRelation::raw(a.clone(), b.clone(), tuples));
    }
    let expected_relations = 1u64 << (n1 * n2);
    let expected_functions = total;
    let functions_are_graphs = functions == graphs;
    let functions = functions.len() as u64;
    Ok(FundamentalReport {
        relations,
        expected_relations,
        functions,
        expected_functions,
        functions_are_graphs,
        passed: functions_are_graphs && relations == expected_relations && functions == expected_functions,
    })
}
