//! The workspace language.
//!
//! A file is a sequence of declarations:
//!
//! ```text
//! type x, y;
//! pred R : (x, y) supp {w};
//! context G = (x, y | supp z);
//! diagram w : (a: G, (y)) -> (x) {
//!     dot d1 : x;
//!     dot d2 : y;
//!     wire a.1, out.1 -> d1;
//!     wire a.2, 2.1 -> d2;
//!     supp {v};
//! }
//! diagram w2 = then(w, identity((x)));
//! term t = w(R, S);
//! domain x = {a, b};
//! relation R = {(a, b)};
//! load S "s.csv";
//! ```
//!
//! Wire endpoints name an inner shell by position, alias or context name
//! (when unambiguous), and the outer shell by `out` or its alias. Every value is validated as
//! soon as it is declared.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use regcalc::model::Tuple;
use regcalc::syntax::{self, Cursor, LexError, Pos, Tok};
use regcalc::{Atom, Context, FinRelation, GraphicalTerm, ModelInstance, PredicateSignature};
use regcalc::{TypeSymbol, WiringDiagram};

use crate::ingest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax,
    Undefined,
    Duplicate,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: DslErrorKind,
    pub msg: String,
}

impl From<LexError> for DslError {
    fn from(e: LexError) -> Self {
        DslError {
            pos: e.pos,
            kind: DslErrorKind::Syntax,
            msg: e.msg,
        }
    }
}

fn err(pos: Pos, kind: DslErrorKind, msg: impl Into<String>) -> DslError {
    DslError {
        pos,
        kind,
        msg: msg.into(),
    }
}

type PResult<T> = Result<T, DslError>;

/// How a term was written, kept for printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermExpr {
    /// Another term or a predicate.
    Alias(String),
    Apply { diagram: String, cells: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDecl {
    pub expr: TermExpr,
    pub term: GraphicalTerm,
}

#[derive(Clone, Debug)]
pub struct Workspace {
    signature: PredicateSignature,
    types: Vec<TypeSymbol>,
    preds: IndexMap<String, Context>,
    contexts: IndexMap<String, Context>,
    diagrams: IndexMap<String, WiringDiagram>,
    terms: IndexMap<String, TermDecl>,
    domains: IndexMap<TypeSymbol, Vec<Atom>>,
    relations: IndexMap<String, BTreeSet<Tuple>>,
    model: Option<ModelInstance>,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace {
            signature: PredicateSignature::new(BTreeSet::new()),
            types: Vec::new(),
            preds: IndexMap::new(),
            contexts: IndexMap::new(),
            diagrams: IndexMap::new(),
            terms: IndexMap::new(),
            domains: IndexMap::new(),
            relations: IndexMap::new(),
            model: None,
        }
    }
}

pub fn parse_dsl(src: &str) -> PResult<Workspace> {
    let mut ws = Workspace::default();
    ws.load(src, None)?;
    Ok(ws)
}

impl Workspace {
    /// Adds the declarations in `src`. Relative `load` paths resolve
    /// against `base`, or the working directory.
    pub fn load(&mut self, src: &str, base: Option<&Path>) -> PResult<()> {
        let toks = syntax::tokenize(src)?;
        let mut p = Parser {
            cur: Cursor::new(toks),
            ws: self,
            base: base.map(Path::to_path_buf),
        };
        while !p.cur.at_eof() {
            p.declaration()?;
        }
        Ok(())
    }

    pub fn signature(&self) -> &PredicateSignature {
        &self.signature
    }

    pub fn types(&self) -> &[TypeSymbol] {
        &self.types
    }

    pub fn predicates(&self) -> &IndexMap<String, Context> {
        &self.preds
    }

    pub fn contexts(&self) -> &IndexMap<String, Context> {
        &self.contexts
    }

    pub fn diagrams(&self) -> &IndexMap<String, WiringDiagram> {
        &self.diagrams
    }

    pub fn terms(&self) -> &IndexMap<String, TermDecl> {
        &self.terms
    }

    pub fn domains(&self) -> &IndexMap<TypeSymbol, Vec<Atom>> {
        &self.domains
    }

    pub fn relations(&self) -> &IndexMap<String, BTreeSet<Tuple>> {
        &self.relations
    }

    /// The model, present once any domain or relation is declared.
    pub fn model(&self) -> Option<&ModelInstance> {
        self.model.as_ref()
    }

    pub fn diagram(&self, name: &str) -> Option<&WiringDiagram> {
        self.diagrams.get(name)
    }

    /// A named term, or a predicate as a bare term.
    pub fn term(&self, name: &str) -> Option<GraphicalTerm> {
        if let Some(t) = self.terms.get(name) {
            return Some(t.term.clone());
        }
        self.preds
            .contains_key(name)
            .then(|| GraphicalTerm::bare(&self.signature, name).expect("declared predicate"))
    }

    fn name_taken(&self, name: &str) -> bool {
        self.preds.contains_key(name)
            || self.contexts.contains_key(name)
            || self.diagrams.contains_key(name)
            || self.terms.contains_key(name)
    }

    /// Adds tuples to a predicate's relation, returning how many were new.
    pub fn add_tuples(&mut self, pred: &str, tuples: BTreeSet<Tuple>) -> regcalc::Result<usize> {
        self.signature.context_of(pred)?;
        let mut rel = self.relations.get(pred).cloned().unwrap_or_default();
        let before = rel.len();
        rel.extend(tuples);
        let added = rel.len() - before;
        let previous = self.relations.insert(pred.to_string(), rel);
        if let Err(e) = self.rebuild_model() {
            match previous {
                Some(old) => self.relations.insert(pred.to_string(), old),
                None => self.relations.shift_remove(pred),
            };
            self.rebuild_model().expect("previous model was valid");
            return Err(e);
        }
        Ok(added)
    }

    fn rebuild_model(&mut self) -> regcalc::Result<()> {
        if self.domains.is_empty() && self.relations.is_empty() {
            self.model = None;
            return Ok(());
        }
        let domains: BTreeMap<TypeSymbol, Vec<Atom>> =
            self.domains.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut m = ModelInstance::new(self.signature.clone(), domains)?;
        for (name, tuples) in &self.relations {
            let ctx = self.signature.context_of(name)?.clone();
            m.set_relation(name, FinRelation::new(ctx, tuples.iter().cloned()))?;
        }
        self.model = Some(m);
        Ok(())
    }

    /// The shell as written in printed output: a context name when one
    /// matches, else a literal.
    fn shell_text(&self, c: &Context) -> String {
        match self.contexts.iter().find(|(_, v)| *v == c) {
            Some((name, _)) => name.clone(),
            None => c.to_string(),
        }
    }

    /// Prints one diagram declaration in canonical form.
    pub fn print_diagram(&self, name: &str, w: &WiringDiagram) -> String {
        let mut s = String::new();
        let inner: Vec<String> = w.inner().iter().map(|c| self.shell_text(c)).collect();
        let _ = writeln!(
            s,
            "diagram {name} : ({}) -> {} {{",
            inner.join(", "),
            self.shell_text(w.outer())
        );
        for (k, t) in w.dot_types().iter().enumerate() {
            let _ = writeln!(s, "    dot d{} : {t};", k + 1);
        }
        for (k, _) in w.dot_types().iter().enumerate() {
            let ends: Vec<String> = w
                .ports()
                .into_iter()
                .filter(|&p| w.dot_of(p) == k)
                .map(|p| p.to_string())
                .collect();
            let _ = writeln!(s, "    wire {} -> d{};", ends.join(", "), k + 1);
        }
        let labels = w.white_labels();
        if !labels.is_empty() {
            let labels: Vec<&str> = labels.iter().map(TypeSymbol::as_str).collect();
            let _ = writeln!(s, "    supp {{{}}};", labels.join(", "));
        }
        s.push_str("}\n");
        s
    }
}

/// Writes an atom so that the tokenizer reads it back unchanged.
pub fn atom_text(a: &str) -> String {
    let mut chars = a.chars();
    let ident = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        }
        _ => false,
    };
    let int = !a.is_empty() && a.chars().all(|c| c.is_ascii_digit());
    if ident || int {
        a.to_string()
    } else {
        format!("\"{}\"", a.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

pub fn tuple_text(t: &[Atom]) -> String {
    let atoms: Vec<String> = t.iter().map(|a| atom_text(a)).collect();
    format!("({})", atoms.join(", "))
}

impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sections: Vec<String> = Vec::new();
        let mut push = |lines: Vec<String>| {
            if !lines.is_empty() {
                sections.push(lines.concat());
            }
        };
        push(self.types.iter().map(|t| format!("type {t};\n")).collect());
        push(
            self.preds
                .iter()
                .map(|(name, c)| {
                    let bare = Context::new(c.typing().to_vec(), []);
                    let extra = c.extra_support();
                    if extra.is_empty() {
                        format!("pred {name} : {bare};\n")
                    } else {
                        let labels: Vec<&str> = extra.iter().map(TypeSymbol::as_str).collect();
                        format!("pred {name} : {bare} supp {{{}}};\n", labels.join(", "))
                    }
                })
                .collect(),
        );
        push(self.contexts.iter().map(|(n, c)| format!("context {n} = {c};\n")).collect());
        for (name, w) in &self.diagrams {
            push(vec![self.print_diagram(name, w)]);
        }
        push(
            self.terms
                .iter()
                .map(|(name, t)| match &t.expr {
                    TermExpr::Alias(a) => format!("term {name} = {a};\n"),
                    TermExpr::Apply { diagram, cells } => {
                        format!("term {name} = {diagram}({});\n", cells.join(", "))
                    }
                })
                .collect(),
        );
        push(
            self.domains
                .iter()
                .map(|(t, atoms)| {
                    let atoms: Vec<String> = atoms.iter().map(|a| atom_text(a)).collect();
                    format!("domain {t} = {{{}}};\n", atoms.join(", "))
                })
                .collect(),
        );
        push(
            self.relations
                .iter()
                .map(|(name, tuples)| {
                    let ts: Vec<String> = tuples.iter().map(|t| tuple_text(t)).collect();
                    format!("relation {name} = {{{}}};\n", ts.join(", "))
                })
                .collect(),
        );
        write!(f, "{}", sections.join("\n"))
    }
}

struct Parser<'a> {
    cur: Cursor,
    ws: &'a mut Workspace,
    base: Option<PathBuf>,
}

/// A shell of a diagram under construction with the names it answers to.
struct ShellRef {
    ctx: Context,
    names: Vec<String>,
}

impl Parser<'_> {
    fn declaration(&mut self) -> PResult<()> {
        let (kw, pos) = self.cur.ident()?;
        match kw.as_str() {
            "type" => self.type_decl(),
            "pred" => self.pred_decl(),
            "context" => self.context_decl(),
            "diagram" => self.diagram_decl(pos),
            "term" => self.term_decl(),
            "domain" => self.domain_decl(),
            "relation" => self.relation_decl(),
            "load" => self.load_decl(),
            _ => Err(err(
                pos,
                DslErrorKind::Syntax,
                format!("expected a declaration, found `{kw}`"),
            )),
        }
    }

    fn fresh_name(&mut self) -> PResult<(String, Pos)> {
        let (name, pos) = self.cur.ident()?;
        if self.ws.name_taken(&name) {
            return Err(err(pos, DslErrorKind::Duplicate, format!("`{name}` is already declared")));
        }
        if name == "out" {
            return Err(err(pos, DslErrorKind::Invalid, "`out` is reserved for outer shells"));
        }
        Ok((name, pos))
    }

    fn type_name(&mut self) -> PResult<TypeSymbol> {
        let (name, pos) = self.cur.ident()?;
        let t = TypeSymbol::new(&name);
        if !self.ws.signature.types().contains(&t) {
            return Err(err(pos, DslErrorKind::Undefined, format!("type `{name}` is not declared")));
        }
        Ok(t)
    }

    fn check_types(&self, c: &Context, pos: Pos) -> PResult<()> {
        for t in c.support() {
            if !self.ws.signature.types().contains(t) {
                return Err(err(pos, DslErrorKind::Undefined, format!("type `{t}` is not declared")));
            }
        }
        Ok(())
    }

    fn type_decl(&mut self) -> PResult<()> {
        loop {
            let (name, pos) = self.cur.ident()?;
            let t = TypeSymbol::new(&name);
            if self.ws.types.contains(&t) {
                return Err(err(pos, DslErrorKind::Duplicate, format!("type `{name}` is already declared")));
            }
            self.ws.signature.add_type(t.clone());
            self.ws.types.push(t);
            if !self.cur.accept(",") {
                break;
            }
        }
        self.cur.expect(";")?;
        self.refresh_model(self.cur.pos())
    }

    fn support_set(&mut self) -> PResult<Vec<TypeSymbol>> {
        self.cur.expect("{")?;
        let mut out = Vec::new();
        if !self.cur.is_punct("}") {
            loop {
                out.push(self.type_name()?);
                if !self.cur.accept(",") {
                    break;
                }
            }
        }
        self.cur.expect("}")?;
        Ok(out)
    }

    fn pred_decl(&mut self) -> PResult<()> {
        let (name, pos) = self.fresh_name()?;
        self.cur.expect(":")?;
        let mut ctx = self.context_expr()?;
        if self.cur.is_keyword("supp") {
            self.cur.bump();
            let extra = self.support_set()?;
            ctx = Context::new(ctx.typing().to_vec(), ctx.support().iter().cloned().chain(extra));
        }
        self.cur.expect(";")?;
        self.ws
            .signature
            .declare(&name, ctx.clone())
            .map_err(|e| err(pos, DslErrorKind::Invalid, e.to_string()))?;
        self.ws.preds.insert(name, ctx);
        self.refresh_model(pos)
    }

    fn context_decl(&mut self) -> PResult<()> {
        let (name, _) = self.fresh_name()?;
        self.cur.expect("=")?;
        let ctx = self.context_expr()?;
        self.cur.expect(";")?;
        self.ws.contexts.insert(name, ctx);
        Ok(())
    }

    /// `atom (+ atom)*` where an atom is a literal or a context name.
    fn context_expr(&mut self) -> PResult<Context> {
        let mut ctx = self.context_atom()?;
        while self.cur.accept("+") {
            ctx = ctx.oplus(&self.context_atom()?);
        }
        Ok(ctx)
    }

    fn context_atom(&mut self) -> PResult<Context> {
        let pos = self.cur.pos();
        if self.cur.is_punct("(") {
            let c = syntax::context_literal(&mut self.cur)?;
            self.check_types(&c, pos)?;
            return Ok(c);
        }
        let (name, pos) = self.cur.ident()?;
        self.ws
            .contexts
            .get(&name)
            .cloned()
            .ok_or_else(|| err(pos, DslErrorKind::Undefined, format!("context `{name}` is not declared")))
    }

    /// A shell with an optional alias. Inner shells also answer to the
    /// name of their context.
    fn shell(&mut self, inner: bool) -> PResult<ShellRef> {
        let mut names = Vec::new();
        if matches!(self.cur.peek().tok, Tok::Ident(_)) && self.cur.peek_at(1).tok == Tok::Punct(":") {
            let (alias, pos) = self.cur.ident()?;
            if alias == "out" {
                return Err(err(pos, DslErrorKind::Invalid, "`out` is reserved for outer shells"));
            }
            self.cur.bump();
            names.push(alias);
        }
        if let Tok::Ident(n) = &self.cur.peek().tok {
            if inner && self.cur.peek_at(1).tok != Tok::Punct("+") {
                names.push(n.clone());
            }
        }
        let ctx = self.context_expr()?;
        Ok(ShellRef { ctx, names })
    }

    fn diagram_decl(&mut self, decl_pos: Pos) -> PResult<()> {
        let (name, _) = self.fresh_name()?;
        if self.cur.accept("=") {
            let w = self.diagram_expr()?;
            self.cur.expect(";")?;
            self.ws.diagrams.insert(name, w);
            return Ok(());
        }
        self.cur.expect(":")?;
        self.cur.expect("(")?;
        let mut shells = Vec::new();
        if !self.cur.is_punct(")") {
            loop {
                shells.push(self.shell(true)?);
                if !self.cur.accept(",") {
                    break;
                }
            }
        }
        self.cur.expect(")")?;
        self.cur.expect("->")?;
        let mut outer = self.shell(false)?;
        outer.names.push("out".into());
        self.cur.expect("{")?;

        let arities: Vec<usize> = shells.iter().chain(std::iter::once(&outer)).map(|s| s.ctx.arity()).collect();
        let offsets: Vec<usize> = arities
            .iter()
            .scan(0, |acc, a| {
                let o = *acc;
                *acc += a;
                Some(o)
            })
            .collect();
        let total: usize = arities.iter().sum();
        let mut boundary: Vec<Option<usize>> = vec![None; total];
        let mut dots: IndexMap<String, TypeSymbol> = IndexMap::new();
        let mut extra = Vec::new();

        while !self.cur.accept("}") {
            let (kw, pos) = self.cur.ident()?;
            match kw.as_str() {
                "dot" => {
                    let mut names = Vec::new();
                    loop {
                        let (d, dpos) = self.cur.ident()?;
                        if dots.contains_key(&d) || names.iter().any(|(n, _)| n == &d) {
                            return Err(err(dpos, DslErrorKind::Duplicate, format!("dot `{d}` is already declared")));
                        }
                        names.push((d, dpos));
                        if !self.cur.accept(",") {
                            break;
                        }
                    }
                    self.cur.expect(":")?;
                    let t = self.type_name()?;
                    self.cur.expect(";")?;
                    for (d, _) in names {
                        dots.insert(d, t.clone());
                    }
                }
                "wire" => {
                    let mut ends = Vec::new();
                    loop {
                        ends.push(self.endpoint(&shells, &outer)?);
                        if !self.cur.accept(",") {
                            break;
                        }
                    }
                    self.cur.expect("->")?;
                    let (d, dpos) = self.cur.ident()?;
                    self.cur.expect(";")?;
                    let Some(k) = dots.get_index_of(&d) else {
                        return Err(err(dpos, DslErrorKind::Undefined, format!("dot `{d}` is not declared")));
                    };
                    for (shell, port, epos) in ends {
                        let ctx = shells.get(shell).map_or(&outer.ctx, |s| &s.ctx);
                        let label = port_label(shell, shells.len(), port);
                        if ctx.type_at(port) != &dots[k] {
                            return Err(err(
                                epos,
                                DslErrorKind::Invalid,
                                format!("port {label} has type {}, dot `{d}` has type {}", ctx.type_at(port), dots[k]),
                            ));
                        }
                        let slot = &mut boundary[offsets[shell] + port];
                        if slot.is_some() {
                            return Err(err(epos, DslErrorKind::Invalid, format!("port {label} is wired twice")));
                        }
                        *slot = Some(k);
                    }
                }
                "supp" => {
                    extra.extend(self.support_set()?);
                    self.cur.expect(";")?;
                }
                _ => {
                    return Err(err(
                        pos,
                        DslErrorKind::Syntax,
                        format!("expected `dot`, `wire`, `supp` or `}}`, found `{kw}`"),
                    ))
                }
            }
        }
        let mut wires = Vec::with_capacity(total);
        for (shell, &off) in offsets.iter().enumerate() {
            for port in 0..arities[shell] {
                match boundary[off + port] {
                    Some(k) => wires.push(k),
                    None => {
                        return Err(err(
                            decl_pos,
                            DslErrorKind::Invalid,
                            format!("port {} of diagram `{name}` is not wired", port_label(shell, shells.len(), port)),
                        ))
                    }
                }
            }
        }
        let inner = shells.into_iter().map(|s| s.ctx).collect();
        let w = WiringDiagram::new(inner, outer.ctx, dots.into_values().collect(), wires, extra)
            .map_err(|e| err(decl_pos, DslErrorKind::Invalid, e.to_string()))?;
        self.ws.diagrams.insert(name, w);
        Ok(())
    }

    /// `shell.port`, returning the shell index (inner shells first, the
    /// outer shell last) and the zero-based port.
    fn endpoint(&mut self, shells: &[ShellRef], outer: &ShellRef) -> PResult<(usize, usize, Pos)> {
        let pos = self.cur.pos();
        let shell = match self.cur.peek().tok.clone() {
            Tok::Int(_) => {
                let (i, ipos) = self.cur.int()?;
                if i == 0 || i > shells.len() {
                    return Err(err(ipos, DslErrorKind::Undefined, format!("no inner shell {i}")));
                }
                i - 1
            }
            Tok::Ident(n) => {
                self.cur.bump();
                let hits: Vec<usize> = shells
                    .iter()
                    .chain(std::iter::once(outer))
                    .enumerate()
                    .filter(|(_, s)| s.names.contains(&n))
                    .map(|(i, _)| i)
                    .collect();
                match hits.as_slice() {
                    [i] => *i,
                    [] => return Err(err(pos, DslErrorKind::Undefined, format!("no shell named `{n}`"))),
                    _ => {
                        return Err(err(
                            pos,
                            DslErrorKind::Invalid,
                            format!("`{n}` names several shells; use an alias or a position"),
                        ))
                    }
                }
            }
            _ => return Err(self.cur.unexpected("a shell").into()),
        };
        self.cur.expect(".")?;
        let (p, ppos) = self.cur.int()?;
        let ctx = shells.get(shell).map_or(&outer.ctx, |s| &s.ctx);
        if p == 0 || p > ctx.arity() {
            return Err(err(
                ppos,
                DslErrorKind::Invalid,
                format!("port {p} is out of range for a shell of arity {}", ctx.arity()),
            ));
        }
        Ok((shell, p - 1, pos))
    }

    fn diagram_expr(&mut self) -> PResult<WiringDiagram> {
        let (f, pos) = self.cur.ident()?;
        if !self.cur.is_punct("(") {
            return self
                .ws
                .diagrams
                .get(&f)
                .cloned()
                .ok_or_else(|| err(pos, DslErrorKind::Undefined, format!("diagram `{f}` is not declared")));
        }
        self.cur.expect("(")?;
        let invalid = |e: regcalc::Error| err(pos, DslErrorKind::Invalid, e.to_string());
        let w = match f.as_str() {
            "identity" | "diagonal" | "codiagonal" | "counit" | "unit" => {
                let c = self.context_expr()?;
                match f.as_str() {
                    "identity" => WiringDiagram::identity(&c),
                    "diagonal" => WiringDiagram::diagonal(&c),
                    "codiagonal" => WiringDiagram::codiagonal(&c),
                    "counit" => WiringDiagram::counit(&c),
                    _ => WiringDiagram::unit_of(&c),
                }
            }
            "braid" => {
                let a = self.context_expr()?;
                self.cur.expect(",")?;
                let b = self.context_expr()?;
                WiringDiagram::braid(&a, &b)
            }
            "transpose" => self.diagram_expr()?.transpose().map_err(invalid)?,
            "substitute" => {
                let host = self.diagram_expr()?;
                self.cur.expect(",")?;
                let (slot, spos) = self.cur.int()?;
                self.cur.expect(",")?;
                let filler = self.diagram_expr()?;
                if slot == 0 {
                    return Err(err(spos, DslErrorKind::Invalid, "slots are numbered from 1"));
                }
                host.substitute(slot - 1, &filler).map_err(invalid)?
            }
            "then" | "tensor" | "par" => {
                let a = self.diagram_expr()?;
                self.cur.expect(",")?;
                let b = self.diagram_expr()?;
                match f.as_str() {
                    "then" => a.then(&b).map_err(invalid)?,
                    "tensor" => a.tensor(&b),
                    _ => a.par(&b).map_err(invalid)?,
                }
            }
            _ => {
                return Err(err(
                    pos,
                    DslErrorKind::Undefined,
                    format!("unknown diagram operation `{f}`"),
                ))
            }
        };
        self.cur.expect(")")?;
        Ok(w)
    }

    fn cell_term(&self, name: &str, pos: Pos) -> PResult<GraphicalTerm> {
        self.ws
            .term(name)
            .ok_or_else(|| err(pos, DslErrorKind::Undefined, format!("no predicate or term named `{name}`")))
    }

    fn term_decl(&mut self) -> PResult<()> {
        let (name, pos) = self.fresh_name()?;
        self.cur.expect("=")?;
        let (head, hpos) = self.cur.ident()?;
        let decl = if self.cur.accept("(") {
            let mut cells = Vec::new();
            if !self.cur.is_punct(")") {
                loop {
                    cells.push(self.cur.ident()?);
                    if !self.cur.accept(",") {
                        break;
                    }
                }
            }
            self.cur.expect(")")?;
            let w = self
                .ws
                .diagrams
                .get(&head)
                .cloned()
                .ok_or_else(|| err(hpos, DslErrorKind::Undefined, format!("diagram `{head}` is not declared")))?;
            let mut resolved = Vec::new();
            for (c, cpos) in &cells {
                resolved.push(self.cell_term(c, *cpos)?.as_cell());
            }
            let term = GraphicalTerm::new(&self.ws.signature, w, resolved)
                .map_err(|e| err(pos, DslErrorKind::Invalid, e.to_string()))?;
            TermDecl {
                expr: TermExpr::Apply {
                    diagram: head,
                    cells: cells.into_iter().map(|(c, _)| c).collect(),
                },
                term,
            }
        } else {
            TermDecl {
                term: self.cell_term(&head, hpos)?,
                expr: TermExpr::Alias(head),
            }
        };
        self.cur.expect(";")?;
        self.ws.terms.insert(name, decl);
        Ok(())
    }

    fn atom(&mut self) -> PResult<Atom> {
        let tok = self.cur.peek().clone();
        match tok.tok {
            Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => {
                self.cur.bump();
                Ok(Atom::from(s))
            }
            _ => Err(self.cur.unexpected("an atom").into()),
        }
    }

    fn domain_decl(&mut self) -> PResult<()> {
        let pos = self.cur.pos();
        let t = self.type_name()?;
        if self.ws.domains.contains_key(&t) {
            return Err(err(pos, DslErrorKind::Duplicate, format!("domain of `{t}` is already declared")));
        }
        self.cur.expect("=")?;
        self.cur.expect("{")?;
        let mut atoms = Vec::new();
        if !self.cur.is_punct("}") {
            loop {
                atoms.push(self.atom()?);
                if !self.cur.accept(",") {
                    break;
                }
            }
        }
        self.cur.expect("}")?;
        self.cur.expect(";")?;
        self.ws.domains.insert(t, atoms);
        self.refresh_model(pos)
    }

    fn refresh_model(&mut self, pos: Pos) -> PResult<()> {
        self.ws
            .rebuild_model()
            .map_err(|e| err(pos, DslErrorKind::Invalid, e.to_string()))
    }

    fn declared_pred(&mut self) -> PResult<(String, Pos)> {
        let (name, pos) = self.cur.ident()?;
        if !self.ws.preds.contains_key(&name) {
            return Err(err(pos, DslErrorKind::Undefined, format!("predicate `{name}` is not declared")));
        }
        Ok((name, pos))
    }

    fn relation_decl(&mut self) -> PResult<()> {
        let (name, pos) = self.declared_pred()?;
        self.cur.expect("=")?;
        self.cur.expect("{")?;
        let mut tuples = BTreeSet::new();
        if !self.cur.is_punct("}") {
            loop {
                let tpos = self.cur.pos();
                let t = if self.cur.accept("(") {
                    let mut t = Vec::new();
                    if !self.cur.is_punct(")") {
                        loop {
                            t.push(self.atom()?);
                            if !self.cur.accept(",") {
                                break;
                            }
                        }
                    }
                    self.cur.expect(")")?;
                    t
                } else {
                    vec![self.atom()?]
                };
                let arity = self.ws.preds[&name].arity();
                if t.len() != arity {
                    return Err(err(
                        tpos,
                        DslErrorKind::Invalid,
                        format!("tuple of length {} for `{name}` of arity {arity}", t.len()),
                    ));
                }
                tuples.insert(t);
                if !self.cur.accept(",") {
                    break;
                }
            }
        }
        self.cur.expect("}")?;
        self.cur.expect(";")?;
        self.ws
            .add_tuples(&name, tuples)
            .map_err(|e| err(pos, DslErrorKind::Invalid, e.to_string()))?;
        Ok(())
    }

    fn load_decl(&mut self) -> PResult<()> {
        let (name, pos) = self.declared_pred()?;
        let path = match self.cur.peek().tok.clone() {
            Tok::Str(s) => {
                self.cur.bump();
                s
            }
            _ => return Err(self.cur.unexpected("a quoted path").into()),
        };
        self.cur.expect(";")?;
        let path = match &self.base {
            Some(b) => b.join(&path),
            None => PathBuf::from(&path),
        };
        ingest::ingest_csv(self.ws, &name, &path)
            .map_err(|e| err(pos, DslErrorKind::Invalid, e.to_string()))?;
        Ok(())
    }
}

fn port_label(shell: usize, inner: usize, port: usize) -> String {
    if shell == inner {
        format!("out.{}", port + 1)
    } else {
        format!("{}.{}", shell + 1, port + 1)
    }
}
