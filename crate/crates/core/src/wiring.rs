//! Wiring diagrams.
//!
//! A diagram has `k` inner shells, one outer shell, a set of typed black
//! dots and a support set. Every port (inner shells first, in order, then
//! the outer shell) is wired to exactly one dot and every dot carries at
//! least one wire. The support always contains the dot types and the
//! supports of all shells; the part of it not used by a dot is what gets
//! drawn on the white dot.
//!
//! Values are kept normalized: dots are numbered by the first port that
//! reaches them, so two diagrams describe the same morphism exactly when
//! they are equal as values.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::context::{Context, ContextMorphism, TypeSet, TypeSymbol};
use crate::error::{Error, Result};
use crate::syntax::{self, Cursor, LexError, Tok};
use crate::uf::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shell {
    Inner(usize),
    Outer,
}

/// A port, 0-based within its shell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub shell: Shell,
    pub index: usize,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shell {
            Shell::Inner(i) => write!(f, "{}.{}", i + 1, self.index + 1),
            Shell::Outer => write!(f, "out.{}", self.index + 1),
        }
    }
}

#[derive(Clone)]
pub struct WiringDiagram {
    inner: Vec<Context>,
    outer: Context,
    dot_types: Vec<TypeSymbol>,
    support: TypeSet,
    wires: Vec<usize>,
    fingerprint: u64,
}

impl PartialEq for WiringDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.wires == other.wires
            && self.dot_types == other.dot_types
            && self.outer == other.outer
            && self.inner == other.inner
            && self.support == other.support
    }
}

impl Eq for WiringDiagram {}

impl Hash for WiringDiagram {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint.hash(state);
    }
}

impl fmt::Debug for WiringDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn shell_ports(inner: &[Context], outer: &Context) -> usize {
    inner.iter().map(Context::arity).sum::<usize>() + outer.arity()
}

impl WiringDiagram {
    /// Builds a diagram from its boundary map, given as one dot index per
    /// port in port order. Dots that no port reaches are absorbed into the
    /// support.
    pub fn new(
        inner: Vec<Context>,
        outer: Context,
        dot_types: Vec<TypeSymbol>,
        boundary: Vec<usize>,
        extra_support: impl IntoIterator<Item = TypeSymbol>,
    ) -> Result<Self> {
        let total = shell_ports(&inner, &outer);
        if boundary.len() != total {
            return Err(Error::OutOfRange(format!(
                "boundary map has {} entries, shells have {} ports",
                boundary.len(),
                total
            )));
        }
        let port_types = inner.iter().chain(std::iter::once(&outer)).flat_map(|c| c.typing());
        let ports = all_ports(&inner, &outer);
        for ((&d, t), port) in boundary.iter().zip(port_types).zip(&ports) {
            let dt = dot_types.get(d).ok_or_else(|| {
                Error::OutOfRange(format!(
                    "port {port} is wired to d{}, only {} dots are declared",
                    d + 1,
                    dot_types.len()
                ))
            })?;
            if dt != t {
                return Err(Error::TypeMismatch(format!(
                    "port {port} has type {t}, its dot d{} has type {dt}",
                    d + 1
                )));
            }
        }
        let mut support: TypeSet = extra_support.into_iter().collect();
        support.extend(dot_types.iter().cloned());
        for c in inner.iter().chain(std::iter::once(&outer)) {
            support.extend(c.support().iter().cloned());
        }
        Ok(Self::normalized(inner, outer, &dot_types, &boundary, support))
    }

    /// Builds a diagram from a port→dot function.
    pub fn from_fn(
        inner: Vec<Context>,
        outer: Context,
        dot_types: Vec<TypeSymbol>,
        boundary: impl Fn(Port) -> usize,
        extra_support: impl IntoIterator<Item = TypeSymbol>,
    ) -> Result<Self> {
        let map = all_ports(&inner, &outer).into_iter().map(boundary).collect();
        Self::new(inner, outer, dot_types, map, extra_support)
    }

    /// Renumbers dots by first occurrence and drops unreached dots; the
    /// support must already be full.
    fn normalized(
        inner: Vec<Context>,
        outer: Context,
        dot_types: &[TypeSymbol],
        boundary: &[usize],
        support: TypeSet,
    ) -> Self {
        let mut renumber = vec![usize::MAX; dot_types.len()];
        let mut new_types = Vec::new();
        let wires = boundary
            .iter()
            .map(|&d| {
                if renumber[d] == usize::MAX {
                    renumber[d] = new_types.len();
                    new_types.push(dot_types[d].clone());
                }
                renumber[d]
            })
            .collect();
        let mut w = WiringDiagram {
            inner,
            outer,
            dot_types: new_types,
            support,
            wires,
            fingerprint: 0,
        };
        w.fingerprint = w.compute_fingerprint();
        w
    }

    fn compute_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        self.outer.hash(&mut h);
        self.dot_types.hash(&mut h);
        self.support.hash(&mut h);
        self.wires.hash(&mut h);
        h.finish()
    }

    /// Re-derives the normal form. Stored values are always normal, so
    /// this is the identity on them.
    pub fn normalize(&self) -> Self {
        Self::normalized(
            self.inner.clone(),
            self.outer.clone(),
            &self.dot_types,
            &self.wires,
            self.support.clone(),
        )
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn inner(&self) -> &[Context] {
        &self.inner
    }

    pub fn outer(&self) -> &Context {
        &self.outer
    }

    pub fn dot_types(&self) -> &[TypeSymbol] {
        &self.dot_types
    }

    pub fn num_dots(&self) -> usize {
        self.dot_types.len()
    }

    pub fn support(&self) -> &TypeSet {
        &self.support
    }

    /// The labels on the white dot: support symbols that type no dot.
    pub fn white_labels(&self) -> TypeSet {
        let used: TypeSet = self.dot_types.iter().cloned().collect();
        self.support.difference(&used).cloned().collect()
    }

    /// The boundary map in port order.
    pub fn boundary(&self) -> &[usize] {
        &self.wires
    }

    pub fn ports(&self) -> Vec<Port> {
        all_ports(&self.inner, &self.outer)
    }

    fn offset(&self, shell: Shell) -> usize {
        match shell {
            Shell::Inner(i) => self.inner[..i].iter().map(Context::arity).sum(),
            Shell::Outer => self.inner.iter().map(Context::arity).sum(),
        }
    }

    pub fn dot_of(&self, port: Port) -> usize {
        self.wires[self.offset(port.shell) + port.index]
    }

    /// Dots attached to the ports of one shell, in port order.
    pub fn shell_dots(&self, shell: Shell) -> &[usize] {
        let start = self.offset(shell);
        let n = match shell {
            Shell::Inner(i) => self.inner[i].arity(),
            Shell::Outer => self.outer.arity(),
        };
        &self.wires[start..start + n]
    }

    // ---- generators ----

    /// Identity on `Γ`: one inner shell, port `i` of both shells on dot `i`.
    pub fn identity(ctx: &Context) -> Self {
        let n = ctx.arity();
        Self::normalized(
            vec![ctx.clone()],
            ctx.clone(),
            ctx.typing(),
            &(0..n).chain(0..n).collect::<Vec<_>>(),
            ctx.support().clone(),
        )
    }

    /// The diagram with no shells, no dots and empty support.
    pub fn unit() -> Self {
        Self::normalized(Vec::new(), Context::terminal(), &[], &[], TypeSet::new())
    }

    /// The diagram of a context morphism `f : Γ₁ → Γ₂`: inner `Γ₁`, outer
    /// `Γ₂`, port `j` of `Γ₂` joined to port `u(j)` of `Γ₁`.
    pub fn graph(f: &ContextMorphism) -> Self {
        let dom = f.dom();
        let n = dom.arity();
        let wires: Vec<usize> = (0..n).chain(f.underlying().iter().copied()).collect();
        Self::normalized(
            vec![dom.clone()],
            f.cod().clone(),
            dom.typing(),
            &wires,
            dom.support().clone(),
        )
    }

    pub fn cograph(f: &ContextMorphism) -> Self {
        Self::graph(f).transpose().expect("graphs have one inner shell")
    }

    /// `δ_Γ : Γ ⇸ Γ ⊕ Γ`.
    pub fn diagonal(ctx: &Context) -> Self {
        Self::graph(&ContextMorphism::diagonal(ctx))
    }

    /// `μ_Γ : Γ ⊕ Γ ⇸ Γ`.
    pub fn codiagonal(ctx: &Context) -> Self {
        Self::diagonal(ctx).transpose().expect("one inner shell")
    }

    /// `ε_Γ : Γ ⇸ 0`.
    pub fn counit(ctx: &Context) -> Self {
        Self::graph(&ContextMorphism::bang(ctx))
    }

    /// `η_Γ : 0 ⇸ Γ`.
    pub fn unit_of(ctx: &Context) -> Self {
        Self::counit(ctx).transpose().expect("one inner shell")
    }

    /// `σ : Γ ⊕ Γ′ ⇸ Γ′ ⊕ Γ`.
    pub fn braid(a: &Context, b: &Context) -> Self {
        Self::graph(&ContextMorphism::braid(a, b))
    }

    // ---- operations ----

    /// Plugs `filler` into inner shell `slot`, amalgamating dots that the
    /// slot's ports join.
    pub fn substitute(&self, slot: usize, filler: &WiringDiagram) -> Result<Self> {
        let shell = self.inner.get(slot).ok_or_else(|| {
            Error::OutOfRange(format!(
                "slot {} of a diagram with {} inner shells",
                slot + 1,
                self.inner.len()
            ))
        })?;
        if shell != &filler.outer {
            return Err(Error::BoundaryMismatch(format!(
                "slot {} has shell {shell}, the filler has outer shell {}",
                slot + 1,
                filler.outer
            )));
        }
        let n = self.num_dots();
        let mut uf = UnionFind::new(n + filler.num_dots());
        for (&a, &b) in self
            .shell_dots(Shell::Inner(slot))
            .iter()
            .zip(filler.shell_dots(Shell::Outer))
        {
            uf.union(a, n + b);
        }
        let (class_of, k) = uf.classes();
        let mut types: Vec<Option<TypeSymbol>> = vec![None; k];
        for (x, &c) in class_of.iter().enumerate() {
            if types[c].is_none() {
                types[c] = Some(if x < n {
                    self.dot_types[x].clone()
                } else {
                    filler.dot_types[x - n].clone()
                });
            }
        }
        let types: Vec<TypeSymbol> = types.into_iter().map(Option::unwrap).collect();

        let mut inner = self.inner[..slot].to_vec();
        inner.extend(filler.inner.iter().cloned());
        inner.extend(self.inner[slot + 1..].iter().cloned());

        let before = self.offset(Shell::Inner(slot));
        let after = before + shell.arity();
        let filler_inner = filler.offset(Shell::Outer);
        let mut wires = Vec::new();
        wires.extend(self.wires[..before].iter().map(|&d| class_of[d]));
        wires.extend(filler.wires[..filler_inner].iter().map(|&d| class_of[n + d]));
        wires.extend(self.wires[after..].iter().map(|&d| class_of[d]));

        let support = self.support.union(&filler.support).cloned().collect();
        Ok(Self::normalized(inner, self.outer.clone(), &types, &wires, support))
    }

    /// Relational composite `self ⨟ next` of single-shell diagrams.
    pub fn then(&self, next: &WiringDiagram) -> Result<Self> {
        if next.inner.len() != 1 {
            return Err(Error::BoundaryMismatch(format!(
                "sequential composition needs one inner shell, found {}",
                next.inner.len()
            )));
        }
        next.substitute(0, self)
    }

    /// Juxtaposition.
    pub fn tensor(&self, other: &WiringDiagram) -> Self {
        let n = self.num_dots();
        let (a_in, b_in) = (self.offset(Shell::Outer), other.offset(Shell::Outer));
        let mut wires = Vec::with_capacity(self.wires.len() + other.wires.len());
        wires.extend_from_slice(&self.wires[..a_in]);
        wires.extend(other.wires[..b_in].iter().map(|d| d + n));
        wires.extend_from_slice(&self.wires[a_in..]);
        wires.extend(other.wires[b_in..].iter().map(|d| d + n));
        let mut inner = self.inner.clone();
        inner.extend(other.inner.iter().cloned());
        let mut types = self.dot_types.clone();
        types.extend(other.dot_types.iter().cloned());
        let support = self.support.union(&other.support).cloned().collect();
        Self::normalized(inner, self.outer.oplus(&other.outer), &types, &wires, support)
    }

    /// Replaces inner shells `i` and `i + 1` by their sum; wiring is
    /// unchanged since the ports keep their order.
    pub fn merge_inner(&self, i: usize) -> Result<Self> {
        if i + 1 >= self.inner.len() {
            return Err(Error::OutOfRange(format!(
                "cannot merge shells {} and {} of {}",
                i + 1,
                i + 2,
                self.inner.len()
            )));
        }
        let mut inner = self.inner[..i].to_vec();
        inner.push(self.inner[i].oplus(&self.inner[i + 1]));
        inner.extend(self.inner[i + 2..].iter().cloned());
        Ok(Self::normalized(
            inner,
            self.outer.clone(),
            &self.dot_types,
            &self.wires,
            self.support.clone(),
        ))
    }

    /// Monoidal product of single-shell diagrams, as a single-shell diagram
    /// `Γ₁ ⊕ Γ₂ ⇸ Γ₁′ ⊕ Γ₂′`.
    pub fn par(&self, other: &WiringDiagram) -> Result<Self> {
        if self.inner.len() != 1 || other.inner.len() != 1 {
            return Err(Error::BoundaryMismatch(
                "parallel composition needs single-shell diagrams".into(),
            ));
        }
        self.tensor(other).merge_inner(0)
    }

    /// Swaps the inner and outer shell of a single-shell diagram.
    pub fn transpose(&self) -> Result<Self> {
        if self.inner.len() != 1 {
            return Err(Error::BoundaryMismatch(format!(
                "transpose needs one inner shell, found {}",
                self.inner.len()
            )));
        }
        let k = self.inner[0].arity();
        let wires: Vec<usize> = self.wires[k..].iter().chain(&self.wires[..k]).copied().collect();
        Ok(Self::normalized(
            vec![self.outer.clone()],
            self.inner[0].clone(),
            &self.dot_types,
            &wires,
            self.support.clone(),
        ))
    }

    /// For a diagram whose outer shell is `Γ₁ ⊕ Γ₂` with `Γ₁` of the given
    /// arity, moves the `Γ₂` block in front.
    pub fn transpose_blocks(&self, left: usize) -> Result<Self> {
        let n = self.outer.arity();
        if left > n {
            return Err(Error::BoundaryMismatch(format!(
                "outer shell of arity {n} has no block of arity {left}"
            )));
        }
        let typing = self.outer.typing();
        let mut swapped = typing[left..].to_vec();
        swapped.extend_from_slice(&typing[..left]);
        let outer = Context::new(swapped, self.outer.support().iter().cloned());
        let base = self.offset(Shell::Outer);
        let mut wires = self.wires[..base].to_vec();
        wires.extend_from_slice(&self.wires[base + left..]);
        wires.extend_from_slice(&self.wires[base..base + left]);
        Ok(Self::normalized(
            self.inner.clone(),
            outer,
            &self.dot_types,
            &wires,
            self.support.clone(),
        ))
    }

    /// The 2-cell order: `self ≤ other` when `other` only breaks wires of
    /// `self` and drops support labels.
    pub fn leq(&self, other: &WiringDiagram) -> Result<bool> {
        if self.inner != other.inner || self.outer != other.outer {
            return Err(Error::BoundaryMismatch(
                "the order compares diagrams with the same shells".into(),
            ));
        }
        if !other.support.is_subset(&self.support) {
            return Ok(false);
        }
        let mut forced = vec![usize::MAX; other.num_dots()];
        for (&mine, &theirs) in self.wires.iter().zip(&other.wires) {
            if forced[theirs] == usize::MAX {
                forced[theirs] = mine;
            } else if forced[theirs] != mine {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn all_ports(inner: &[Context], outer: &Context) -> Vec<Port> {
    let mut ports = Vec::with_capacity(shell_ports(inner, outer));
    for (i, c) in inner.iter().enumerate() {
        ports.extend((0..c.arity()).map(|index| Port {
            shell: Shell::Inner(i),
            index,
        }));
    }
    ports.extend((0..outer.arity()).map(|index| Port {
        shell: Shell::Outer,
        index,
    }));
    ports
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for WiringDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wiring {{")?;
        write!(f, "  inner: [")?;
        write_list(f, &self.inner)?;
        writeln!(f, "];")?;
        writeln!(f, "  outer: {};", self.outer)?;
        write!(f, "  dots: [")?;
        write_list(f, &self.dot_types)?;
        writeln!(f, "];")?;
        for (p, &d) in self.ports().iter().zip(&self.wires) {
            writeln!(f, "  wire {p} -> d{};", d + 1)?;
        }
        write!(f, "  supp {{")?;
        write_list(f, &self.support)?;
        writeln!(f, "}};")?;
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeError {
    Syntax(LexError),
    Invalid(Error),
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::Syntax(e) => write!(f, "{e}"),
            DecodeError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DecodeError {}

impl From<LexError> for DecodeError {
    fn from(e: LexError) -> Self {
        DecodeError::Syntax(e)
    }
}

impl FromStr for WiringDiagram {
    type Err = DecodeError;

    /// Decodes the text produced by `Display`. Every port must be wired
    /// exactly once.
    fn from_str(s: &str) -> std::result::Result<Self, DecodeError> {
        let mut cur = Cursor::new(syntax::tokenize(s)?);
        let w = decode(&mut cur)?;
        if !cur.at_eof() {
            return Err(cur.unexpected("end of input").into());
        }
        Ok(w)
    }
}

/// Decodes one `wiring { ... }` block from the cursor.
pub fn decode(cur: &mut Cursor) -> std::result::Result<WiringDiagram, DecodeError> {
    cur.expect_keyword("wiring")?;
    cur.expect("{")?;
    cur.expect_keyword("inner")?;
    cur.expect(":")?;
    cur.expect("[")?;
    let mut inner = Vec::new();
    if !cur.is_punct("]") {
        loop {
            inner.push(syntax::context_literal(cur)?);
            if !cur.accept(",") {
                break;
            }
        }
    }
    cur.expect("]")?;
    cur.expect(";")?;
    cur.expect_keyword("outer")?;
    cur.expect(":")?;
    let outer = syntax::context_literal(cur)?;
    cur.expect(";")?;
    cur.expect_keyword("dots")?;
    cur.expect(":")?;
    cur.expect("[")?;
    let mut dots = Vec::new();
    if !cur.is_punct("]") {
        loop {
            dots.push(TypeSymbol::new(&cur.ident()?.0));
            if !cur.accept(",") {
                break;
            }
        }
    }
    cur.expect("]")?;
    cur.expect(";")?;

    let offsets: Vec<usize> = inner
        .iter()
        .scan(0, |acc, c: &Context| {
            let o = *acc;
            *acc += c.arity();
            Some(o)
        })
        .collect();
    let outer_base = shell_ports(&inner, &Context::terminal());
    let mut boundary: Vec<Option<usize>> = vec![None; outer_base + outer.arity()];
    while cur.is_keyword("wire") {
        cur.bump();
        let pos = cur.pos();
        let base_and_arity = match cur.peek().tok.clone() {
            Tok::Int(_) => {
                let (i, _) = cur.int()?;
                if i == 0 || i > inner.len() {
                    return Err(LexError {
                        pos,
                        msg: format!("no inner shell {i}"),
                    }
                    .into());
                }
                (offsets[i - 1], inner[i - 1].arity())
            }
            Tok::Ident(s) if s == "out" => {
                cur.bump();
                (outer_base, outer.arity())
            }
            _ => return Err(cur.unexpected("a shell index or `out`").into()),
        };
        cur.expect(".")?;
        let (p, ppos) = cur.int()?;
        if p == 0 || p > base_and_arity.1 {
            return Err(LexError {
                pos: ppos,
                msg: format!("port {p} out of range for a shell of arity {}", base_and_arity.1),
            }
            .into());
        }
        cur.expect("->")?;
        let (d, dpos) = cur.ident()?;
        let k = d
            .strip_prefix('d')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= dots.len())
            .ok_or_else(|| LexError {
                pos: dpos,
                msg: format!("`{d}` is not one of the declared dots d1..d{}", dots.len()),
            })?;
        cur.expect(";")?;
        let slot = &mut boundary[base_and_arity.0 + p - 1];
        if slot.is_some() {
            return Err(LexError {
                pos,
                msg: "port wired twice".into(),
            }
            .into());
        }
        *slot = Some(k - 1);
    }
    let mut extra = Vec::new();
    if cur.is_keyword("supp") {
        cur.bump();
        cur.expect("{")?;
        if !cur.is_punct("}") {
            loop {
                extra.push(TypeSymbol::new(&cur.ident()?.0));
                if !cur.accept(",") {
                    break;
                }
            }
        }
        cur.expect("}")?;
        cur.expect(";")?;
    }
    let end = cur.pos();
    cur.expect("}")?;
    let ports = all_ports(&inner, &outer);
    let boundary = boundary
        .into_iter()
        .zip(&ports)
        .map(|(d, p)| {
            d.ok_or_else(|| LexError {
                pos: end,
                msg: format!("port {p} is not wired"),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    WiringDiagram::new(inner, outer, dots, boundary, extra).map_err(DecodeError::Invalid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::type_set;

    fn t(s: &str) -> TypeSymbol {
        TypeSymbol::new(s)
    }

    fn ctx(ts: &[&str], extra: &[&str]) -> Context {
        Context::from_names(ts, extra)
    }

    /// The seven-dot diagram with three inner shells.
    fn three_shell_example() -> WiringDiagram {
        let inner = vec![
            ctx(&["x", "y", "y"], &[]),
            ctx(&["x", "x", "x"], &["w", "y"]),
            ctx(&["y", "y", "x", "x"], &[]),
        ];
        let outer = ctx(&["y", "z", "z", "x", "x", "z"], &["w"]);
        let dots = ["y", "y", "z", "x", "x", "x", "z"].map(t).to_vec();
        let f = [
            4, 2, 1, // shell 1
            6, 4, 5, // shell 2
            1, 2, 6, 6, // shell 3
            1, 3, 3, 5, 6, 7, // outer
        ];
        let boundary = f.iter().map(|d| d - 1).collect();
        WiringDiagram::new(inner, outer, dots, boundary, [t("v")]).unwrap()
    }

    #[test]
    fn seven_dot_example_validates() {
        let w = three_shell_example();
        assert_eq!(w.num_dots(), 7);
        assert_eq!(w.support(), &type_set(["v", "w", "x", "y", "z"]));
        assert_eq!(w.white_labels(), type_set(["v", "w"]));
    }

    #[test]
    fn no_inner_shell_example() {
        let outer = ctx(&["x", "y"], &["z", "w"]);
        let w = WiringDiagram::new(vec![], outer, vec![t("x"), t("y")], vec![0, 1], []).unwrap();
        assert_eq!(w.white_labels(), type_set(["w", "z"]));
    }

    #[test]
    fn portless_dots_are_absorbed() {
        let c = ctx(&["x"], &[]);
        let w = WiringDiagram::new(vec![], c.clone(), vec![t("q"), t("x")], vec![1], []).unwrap();
        assert_eq!(w.num_dots(), 1);
        assert_eq!(w.white_labels(), type_set(["q"]));
    }

    #[test]
    fn constructor_errors() {
        let c = ctx(&["x"], &[]);
        assert!(matches!(
            WiringDiagram::new(vec![], c.clone(), vec![t("y")], vec![0], []),
            Err(Error::TypeMismatch(_))
        ));
        assert!(matches!(
            WiringDiagram::new(vec![], c, vec![t("x")], vec![1], []),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn normalization_forgets_dot_names() {
        let w = three_shell_example();
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let types: Vec<TypeSymbol> = {
            let mut v = vec![t("x"); 7];
            for (old, &new) in perm.iter().enumerate() {
                v[new] = w.dot_types()[old].clone();
            }
            v
        };
        let boundary = w.boundary().iter().map(|&d| perm[d]).collect();
        let w2 = WiringDiagram::new(w.inner().to_vec(), w.outer().clone(), types, boundary, w.white_labels()).unwrap();
        assert_eq!(w, w2);
        assert_eq!(w.normalize(), w);
    }

    #[test]
    fn identity_is_a_unit() {
        let w = three_shell_example();
        for i in 0..3 {
            let id = WiringDiagram::identity(&w.inner()[i]);
            assert_eq!(w.substitute(i, &id).unwrap(), w);
        }
        let id = WiringDiagram::identity(w.outer());
        assert_eq!(id.substitute(0, &w).unwrap(), w);
    }

    #[test]
    fn comonoid_counit_law() {
        let g = ctx(&["x", "y"], &[]);
        let lhs = WiringDiagram::diagonal(&g)
            .then(&WiringDiagram::counit(&g).par(&WiringDiagram::identity(&g)).unwrap())
            .unwrap();
        // the result lives on 0 ⊕ Γ = Γ
        assert_eq!(lhs, WiringDiagram::identity(&g));
    }

    #[test]
    fn sequential_composite_drops_disconnected_dots() {
        let x = ctx(&["x"], &[]);
        let xy = ctx(&["x", "y"], &[]);
        // x ⇸ (x, y): the y port floats on its own dot
        let a = WiringDiagram::new(vec![x.clone()], xy.clone(), vec![t("x"), t("y")], vec![0, 0, 1], []).unwrap();
        // (x, y) ⇸ x: forget y
        let b = WiringDiagram::new(vec![xy], x.clone(), vec![t("x"), t("y")], vec![0, 1, 0], []).unwrap();
        let c = a.then(&b).unwrap();
        assert_eq!(c.num_dots(), 1);
        assert_eq!(c.white_labels(), type_set(["y"]));
    }

    #[test]
    fn breaking_wires_goes_up() {
        let c = ctx(&["x", "x"], &[]);
        let connected = WiringDiagram::new(vec![], c.clone(), vec![t("x")], vec![0, 0], []).unwrap();
        let broken = WiringDiagram::new(vec![], c.clone(), vec![t("x"), t("x")], vec![0, 1], []).unwrap();
        assert!(connected.leq(&broken).unwrap());
        assert!(!broken.leq(&connected).unwrap());
        let labelled = WiringDiagram::new(vec![], c, vec![t("x"), t("x")], vec![0, 1], [t("s")]).unwrap();
        assert!(labelled.leq(&broken).unwrap());
        assert!(!broken.leq(&labelled).unwrap());
    }

    #[test]
    fn tensor_merges_white_labels() {
        let z = WiringDiagram::new(vec![], Context::terminal(), vec![], vec![], [t("z")]).unwrap();
        let zw = WiringDiagram::new(vec![], Context::terminal(), vec![], vec![], [t("z"), t("w")]).unwrap();
        assert_eq!(z.tensor(&zw).white_labels(), type_set(["w", "z"]));
        let w = three_shell_example();
        assert_eq!(w.tensor(&WiringDiagram::unit()), w);
        assert_eq!(WiringDiagram::unit().tensor(&w), w);
    }

    #[test]
    fn frobenius_and_special() {
        let g = ctx(&["x", "y"], &["z"]);
        let id = WiringDiagram::identity(&g);
        let d = WiringDiagram::diagonal(&g);
        let m = WiringDiagram::codiagonal(&g);
        assert_eq!(d.then(&m).unwrap(), id);
        let lhs = m.then(&d).unwrap();
        let rhs = id.par(&d).unwrap().then(&m.par(&id).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn graph_transposes_to_cograph() {
        let a = ctx(&["x", "y"], &[]);
        let f = ContextMorphism::proj1(&a, &a);
        assert_eq!(WiringDiagram::graph(&f).transpose().unwrap(), WiringDiagram::cograph(&f));
        assert_eq!(
            WiringDiagram::graph(&ContextMorphism::identity(&a)),
            WiringDiagram::identity(&a)
        );
    }

    #[test]
    fn text_form_round_trips() {
        let w = three_shell_example();
        let text = w.to_string();
        let back: WiringDiagram = text.parse().unwrap();
        assert_eq!(back, w);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn decoder_reports_positions() {
        let e = "wiring { inner: []; outer: (x); dots: [x]; wire out.2 -> d1; }"
            .parse::<WiringDiagram>()
            .unwrap_err();
        match e {
            DecodeError::Syntax(e) => assert_eq!(e.pos.col, 53),
            other => panic!("unexpected {other:?}"),
        }
        assert!("wiring { inner: []; outer: (x); dots: [x]; }".parse::<WiringDiagram>().is_err());
    }
}
