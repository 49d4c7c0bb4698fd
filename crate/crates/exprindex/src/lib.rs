//! Term storage and retrieval on flat prefix-notation expression encodings.
//!
//! The crate provides:
//!
//! * [`arena`]: cell arenas holding expressions in parenthesis-free prefix
//!   form, with non-offset/offset variable cells ([`Arena`], [`Cell`],
//!   [`ExprRef`]);
//! * [`mod@parse`]/[`mod@render`]: concrete syntax in and out;
//! * [`order`]: the total order on constructors and expressions used for
//!   sibling placement;
//! * [`subst`]: substitutions as address pairs, dereferencing, occurs
//!   checking, non-destructive materialization and destructive in-cell
//!   application;
//! * [`mod@unify`]: the matching-unification algorithm classifying a pair as
//!   variant / strictly more general / strict instance / only unifiable /
//!   non-unifiable while building one substitution per side;
//! * [`trie`]: the instance trie, a stable perfect-filter index supporting
//!   variant, instance, generalization and unifiable retrieval;
//! * [`oracle`]: independent tree-level reference implementations used as
//!   ground truth by the test suites and the bench baseline;
//! * [`gen`]: deterministic random expression generation;
//! * [`cli`]: the `exprindex` command-line front end.
//!
//! ```
//! use exprindex::{parse, unify, Arena, InstanceTrie, Mode, QueryMode};
//!
//! let mut left = Arena::new();
//! let mut right = Arena::new();
//! let general = parse("f(X, X)", &mut left).unwrap();
//! let ground = parse("f(a, a)", &mut right).unwrap();
//! assert_eq!(unify(&left, general, &right, ground).mode, Mode::Sg);
//!
//! let mut trie = InstanceTrie::new();
//! trie.insert(&left, general);
//! trie.insert(&right, ground);
//! let hits = trie.retrieve(&right, ground, QueryMode::Generalization);
//! assert_eq!(hits.matches.len(), 2);
//! ```

pub mod arena;
pub mod cli;
pub mod gen;
pub mod oracle;
pub mod order;
pub mod parse;
pub mod render;
pub mod subst;
pub mod symbol;
pub mod trie;
pub mod unify;

pub use arena::{copy_fresh, Arena, Cell, CellRef, CellTag, ExprRef};
pub use order::{compare_constructors, compare_expressions, CellKey};
pub use parse::{parse, ParseError};
pub use render::{render, render_substitution, render_with, Namer};
pub use subst::{
    apply_destructive, deref, materialize, occurs_in, Binding, CycleError, Scope, Substitution,
};
pub use symbol::Symbol;
pub use trie::{InsertOutcome, InstanceTrie, Match, QueryMode, RemoveOutcome, Retrieval, TrieStats};
pub use unify::{classify, unify, Mode, ModeEvent, Unification};
