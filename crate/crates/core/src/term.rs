//! Graphical terms: wiring diagrams whose inner shells carry predicates or
//! further terms.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::{Context, TypeSet, TypeSymbol};
use crate::error::{Error, Result};
use crate::wiring::{Shell, WiringDiagram};

/// The declared types and predicate shells of a theory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateSignature {
    types: TypeSet,
    preds: BTreeMap<String, Context>,
}

impl PredicateSignature {
    pub fn new(types: TypeSet) -> Self {
        PredicateSignature {
            types,
            preds: BTreeMap::new(),
        }
    }

    pub fn add_type(&mut self, t: TypeSymbol) {
        self.types.insert(t);
    }

    pub fn declare(&mut self, name: &str, ctx: Context) -> Result<()> {
        if let Some(t) = ctx.support().iter().find(|t| !self.types.contains(*t)) {
            return Err(Error::UnknownType(t.clone()));
        }
        self.preds.insert(name.to_string(), ctx);
        Ok(())
    }

    pub fn with(mut self, name: &str, ctx: Context) -> Result<Self> {
        self.declare(name, ctx)?;
        Ok(self)
    }

    pub fn types(&self) -> &TypeSet {
        &self.types
    }

    pub fn predicates(&self) -> &BTreeMap<String, Context> {
        &self.preds
    }

    pub fn context_of(&self, name: &str) -> Result<&Context> {
        self.preds
            .get(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Pred(String),
    Nested(Box<GraphicalTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalTerm {
    diagram: WiringDiagram,
    cells: Vec<Cell>,
}

impl GraphicalTerm {
    pub fn new(sig: &PredicateSignature, diagram: WiringDiagram, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != diagram.inner().len() {
            return Err(Error::BoundaryMismatch(format!(
                "diagram has {} inner shells, {} cells given",
                diagram.inner().len(),
                cells.len()
            )));
        }
        for (i, (cell, shell)) in cells.iter().zip(diagram.inner()).enumerate() {
            let found = match cell {
                Cell::Pred(name) => sig.context_of(name)?,
                Cell::Nested(t) => t.outer(),
            };
            if found != shell {
                return Err(Error::BoundaryMismatch(format!(
                    "inner shell {} is {shell}, its cell has shell {found}",
                    i + 1
                )));
            }
        }
        Ok(GraphicalTerm { diagram, cells })
    }

    /// The predicate drawn as its own shell.
    pub fn bare(sig: &PredicateSignature, name: &str) -> Result<Self> {
        let ctx = sig.context_of(name)?;
        Ok(GraphicalTerm {
            diagram: WiringDiagram::identity(ctx),
            cells: vec![Cell::Pred(name.to_string())],
        })
    }

    /// The term with no cells and one dot per port of `ctx`.
    pub fn true_term(ctx: &Context) -> Self {
        let n = ctx.arity();
        let diagram = WiringDiagram::new(
            vec![],
            ctx.clone(),
            ctx.typing().to_vec(),
            (0..n).collect(),
            [],
        )
        .expect("one dot per port is always valid");
        GraphicalTerm {
            diagram,
            cells: vec![],
        }
    }

    /// The conjunction of two terms over the same outer shell.
    pub fn meet(t1: &GraphicalTerm, t2: &GraphicalTerm) -> Result<Self> {
        let ctx = t1.outer();
        if ctx != t2.outer() {
            return Err(Error::BoundaryMismatch(format!(
                "meet of terms on {} and {}",
                ctx,
                t2.outer()
            )));
        }
        let n = ctx.arity();
        let diagram = WiringDiagram::new(
            vec![ctx.clone(), ctx.clone()],
            ctx.clone(),
            ctx.typing().to_vec(),
            (0..n).chain(0..n).chain(0..n).collect(),
            [],
        )
        .expect("diagonal wiring is valid");
        Ok(GraphicalTerm {
            diagram,
            cells: vec![t1.as_cell(), t2.as_cell()],
        })
    }

    /// Uses the term as a cell, unwrapping bare predicates.
    pub fn as_cell(&self) -> Cell {
        match self.cells.as_slice() {
            [Cell::Pred(name)] if self.diagram == WiringDiagram::identity(&self.diagram.inner()[0]) => {
                Cell::Pred(name.clone())
            }
            _ => Cell::Nested(Box::new(self.clone())),
        }
    }

    pub fn diagram(&self) -> &WiringDiagram {
        &self.diagram
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn outer(&self) -> &Context {
        self.diagram.outer()
    }

    pub fn is_flat(&self) -> bool {
        self.cells.iter().all(|c| matches!(c, Cell::Pred(_)))
    }

    /// Predicate names of a flat term, one per inner shell.
    pub fn predicate_cells(&self) -> Option<Vec<&str>> {
        self.cells
            .iter()
            .map(|c| match c {
                Cell::Pred(p) => Some(p.as_str()),
                Cell::Nested(_) => None,
            })
            .collect()
    }

    /// Substitutes every nested term into its slot, recursively.
    pub fn flatten(&self) -> GraphicalTerm {
        let mut diagram = self.diagram.clone();
        let mut cells = Vec::new();
        for (i, cell) in self.cells.iter().enumerate().rev() {
            match cell {
                Cell::Pred(p) => cells.push(Cell::Pred(p.clone())),
                Cell::Nested(t) => {
                    let flat = t.flatten();
                    diagram = diagram
                        .substitute(i, &flat.diagram)
                        .expect("nested outer shell matches its slot");
                    cells.extend(flat.cells.into_iter().rev());
                }
            }
        }
        cells.reverse();
        GraphicalTerm { diagram, cells }
    }

    /// Swaps the outer blocks `Γ₁ ⊕ Γ₂`, where `left` is the arity of `Γ₁`.
    pub fn transpose(&self, left: usize) -> Result<Self> {
        Ok(GraphicalTerm {
            diagram: self.diagram.transpose_blocks(left)?,
            cells: self.cells.clone(),
        })
    }

    /// Drops inner shell `i` together with its cell.
    pub fn remove_cell(&self, i: usize) -> Result<Self> {
        if i >= self.cells.len() {
            return Err(Error::OutOfRange(format!("cell {} of {}", i + 1, self.cells.len())));
        }
        let d = &self.diagram;
        let mut inner = d.inner().to_vec();
        inner.remove(i);
        let mut boundary = Vec::new();
        for (j, _) in d.inner().iter().enumerate().filter(|&(j, _)| j != i) {
            boundary.extend_from_slice(d.shell_dots(Shell::Inner(j)));
        }
        boundary.extend_from_slice(d.shell_dots(Shell::Outer));
        let diagram = WiringDiagram::new(
            inner,
            d.outer().clone(),
            d.dot_types().to_vec(),
            boundary,
            d.support().iter().cloned(),
        )?;
        let mut cells = self.cells.clone();
        cells.remove(i);
        Ok(GraphicalTerm { diagram, cells })
    }

    pub fn to_formula(&self) -> Formula {
        Formula::of(&self.flatten())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjunct {
    Pred { name: String, args: Vec<String> },
    Eq(String, String),
    Inhabited { var: String, ty: TypeSymbol },
}

/// A regular-logic formula: free variables, existentially bound variables
/// and a conjunction of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub free: Vec<(String, TypeSymbol)>,
    pub bound: Vec<(String, TypeSymbol)>,
    pub conjuncts: Vec<Conjunct>,
}

impl Formula {
    fn of(t: &GraphicalTerm) -> Formula {
        let d = &t.diagram;
        let var = |k: usize| format!("v{}", k + 1);
        let mut named = vec![false; d.num_dots()];
        let mut free = Vec::new();
        let mut conjuncts = Vec::new();
        for (j, &k) in d.shell_dots(Shell::Outer).iter().enumerate() {
            if named[k] {
                let o = format!("o{}", j + 1);
                conjuncts.push(Conjunct::Eq(var(k), o.clone()));
                free.push((o, d.dot_types()[k].clone()));
            } else {
                named[k] = true;
                free.push((var(k), d.dot_types()[k].clone()));
            }
        }
        let bound = (0..d.num_dots())
            .filter(|&k| !named[k])
            .map(|k| (var(k), d.dot_types()[k].clone()))
            .collect();
        let mut preds = Vec::new();
        for (i, cell) in t.cells.iter().enumerate() {
            if let Cell::Pred(name) = cell {
                preds.push(Conjunct::Pred {
                    name: name.clone(),
                    args: d.shell_dots(Shell::Inner(i)).iter().map(|&k| var(k)).collect(),
                });
            }
        }
        preds.extend(conjuncts);
        for (i, ty) in d.white_labels().into_iter().enumerate() {
            preds.push(Conjunct::Inhabited {
                var: format!("u{}", i + 1),
                ty,
            });
        }
        Formula {
            free,
            bound,
            conjuncts: preds,
        }
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjunct::Pred { name, args } => write!(f, "{name}({})", args.join(",")),
            Conjunct::Eq(a, b) => write!(f, "{a} = {b}"),
            Conjunct::Inhabited { var, ty } => write!(f, "∃{var}:{ty}.true"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (v, t)) in self.free.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:{t}")?;
        }
        write!(f, ") ↦ ")?;
        if !self.bound.is_empty() {
            write!(f, "∃")?;
            for (i, (v, t)) in self.bound.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}:{t}")?;
            }
            write!(f, ". ")?;
        }
        if self.conjuncts.is_empty() {
            return write!(f, "true");
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::type_set;

    fn sig() -> PredicateSignature {
        PredicateSignature::new(type_set(["x", "y", "z", "w"]))
            .with("R", Context::from_names(&["x", "z"], &[]))
            .unwrap()
            .with("S", Context::from_names(&["z", "y"], &[]))
            .unwrap()
    }

    fn t(s: &str) -> TypeSymbol {
        TypeSymbol::new(s)
    }

    fn chain() -> GraphicalTerm {
        let s = sig();
        let xz = s.context_of("R").unwrap().clone();
        let zy = s.context_of("S").unwrap().clone();
        let d = WiringDiagram::new(
            vec![xz, zy],
            Context::from_names(&["x", "y"], &[]),
            vec![t("x"), t("z"), t("y")],
            vec![0, 1, 1, 2, 0, 2],
            [],
        )
        .unwrap();
        GraphicalTerm::new(&s, d, vec![Cell::Pred("R".into()), Cell::Pred("S".into())]).unwrap()
    }

    #[test]
    fn bare_predicate() {
        let r = GraphicalTerm::bare(&sig(), "R").unwrap();
        assert_eq!(r.to_formula().to_string(), "(v1:x, v2:z) ↦ R(v1,v2)");
        assert_eq!(r.as_cell(), Cell::Pred("R".into()));
        assert!(GraphicalTerm::bare(&sig(), "Q").is_err());
    }

    #[test]
    fn chain_formula_binds_the_middle() {
        assert_eq!(
            chain().to_formula().to_string(),
            "(v1:x, v3:y) ↦ ∃v2:z. R(v1,v2) ∧ S(v2,v3)"
        );
    }

    #[test]
    fn labels_only_formula() {
        let d = WiringDiagram::new(
            vec![],
            Context::from_names(&["x", "y"], &["z", "w"]),
            vec![t("x"), t("y")],
            vec![0, 1],
            [],
        )
        .unwrap();
        let term = GraphicalTerm::new(&sig(), d, vec![]).unwrap();
        assert_eq!(
            term.to_formula().to_string(),
            "(v1:x, v2:y) ↦ ∃u1:w.true ∧ ∃u2:z.true"
        );
    }

    #[test]
    fn repeated_outer_dot_gets_an_equation() {
        let c = Context::from_names(&["x", "x"], &[]);
        let d = WiringDiagram::new(vec![], c, vec![t("x")], vec![0, 0], []).unwrap();
        let term = GraphicalTerm::new(&sig(), d, vec![]).unwrap();
        assert_eq!(term.to_formula().to_string(), "(v1:x, o2:x) ↦ v1 = o2");
        let top = GraphicalTerm::true_term(&Context::from_names(&["x"], &[]));
        assert_eq!(top.to_formula().to_string(), "(v1:x) ↦ true");
    }

    #[test]
    fn cell_count_must_match() {
        let d = WiringDiagram::identity(&Context::from_names(&["x", "z"], &[]));
        assert!(GraphicalTerm::new(&sig(), d.clone(), vec![]).is_err());
        assert!(GraphicalTerm::new(&sig(), d, vec![Cell::Pred("S".into())]).is_err());
    }

    #[test]
    fn flatten_unwraps_identity_nesting() {
        let s = sig();
        let r = GraphicalTerm::bare(&s, "R").unwrap();
        let wrapped = GraphicalTerm::new(
            &s,
            WiringDiagram::identity(r.outer()),
            vec![Cell::Nested(Box::new(r.clone()))],
        )
        .unwrap();
        assert_eq!(wrapped.flatten(), r);
        assert_eq!(r.flatten(), r);
        let c = chain();
        let nested = GraphicalTerm::meet(&c, &c).unwrap();
        assert!(!nested.is_flat());
        let flat = nested.flatten();
        assert!(flat.is_flat());
        assert_eq!(flat.cells().len(), 4);
        assert_eq!(flat.flatten(), flat);
    }

    #[test]
    fn remove_cell_keeps_shared_dots() {
        let c = chain().remove_cell(1).unwrap();
        assert_eq!(c.to_formula().to_string(), "(v1:x, v3:y) ↦ ∃v2:z. R(v1,v2)");
    }

    #[test]
    fn transpose_is_involutive() {
        let c = chain();
        let tt = c.transpose(1).unwrap().transpose(1).unwrap();
        assert_eq!(tt, c);
        assert_eq!(c.transpose(1).unwrap().outer(), &Context::from_names(&["y", "x"], &[]));
    }
}
