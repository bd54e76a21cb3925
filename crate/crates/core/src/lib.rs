//! Graphical regular logic.
//!
//! This crate implements the free regular category on a set of types and
//! its po-category of relations, drawn as wiring diagrams:
//!
//! * [`context`]: contexts `(n, S, τ)` and the morphisms between them, with
//!   finite limits and image factorizations computed combinatorially.
//! * [`wiring`]: wiring diagrams as morphisms of the relations po-category,
//!   with normalization, operadic substitution, juxtaposition and the
//!   wire-breaking order.
//! * [`term`]: graphical terms, i.e. wiring diagrams whose inner shells are
//!   annotated by predicates or by nested terms.
//! * [`model`]: the semantics of graphical terms in finite relational models
//!   (conjunctive query evaluation with support constraints).
//! * [`contain`]: model-independent entailment through the frozen instance,
//!   plus greedy core minimization.
//! * [`syncat`]: internal relations and internal functions over a finite
//!   model, with the bounded verification suites for the regular-category
//!   axioms.

pub mod contain;
pub mod context;
mod error;
pub mod model;
pub mod syncat;
pub mod syntax;
pub mod term;
mod uf;
pub mod wiring;

pub use context::{Context, ContextMorphism, TypeSet, TypeSymbol};
pub use error::{Error, Result};
pub use model::{Atom, FinRelation, ModelInstance};
pub use term::{Cell, GraphicalTerm, PredicateSignature};
pub use wiring::{Port, Shell, WiringDiagram};
