//! Total orders on constructors and expressions.
//!
//! Expressions compare lexicographically over their prefix cell sequences.
//! A variable compares below every constructor; two variables compare by
//! their first-occurrence rank within their own expression; constructors
//! compare by name (byte-lexicographic) and then by arity. Two expressions
//! compare equal exactly when they are variants whose variable occurrence
//! patterns coincide, which is what makes the order usable as a canonical
//! sibling order in the instance trie.
//!
//! Comparison reads the raw encodings: variable bindings, destructive or
//! otherwise, are ignored.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::arena::{Arena, Cell, ExprRef};
use crate::symbol::Symbol;

/// What one cell contributes to the lexicographic comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellKey {
    /// A variable with its first-occurrence rank (0-based) inside its own
    /// expression.
    Variable(u32),
    /// A constructor with its arity.
    Constructor(Symbol, u32),
}

/// Order on single keys: variable < constructor, variables by rank,
/// constructors by name then arity (same name with different arities are
/// distinct constructors).
pub fn compare_constructors(a: CellKey, b: CellKey) -> Ordering {
    match (a, b) {
        (CellKey::Variable(r1), CellKey::Variable(r2)) => r1.cmp(&r2),
        (CellKey::Variable(_), CellKey::Constructor(..)) => Ordering::Less,
        (CellKey::Constructor(..), CellKey::Variable(_)) => Ordering::Greater,
        (CellKey::Constructor(s1, a1), CellKey::Constructor(s2, a2)) => {
            Symbol::cmp_by_name(s1, s2).then(a1.cmp(&a2))
        }
    }
}

struct KeyWalk<'a> {
    arena: &'a Arena,
    index: u32,
    remaining: u64,
    ranks: HashMap<u32, u32>,
}

impl<'a> KeyWalk<'a> {
    fn new(arena: &'a Arena, e: ExprRef) -> KeyWalk<'a> {
        assert!(e.arena == arena.id(), "expression from a different arena");
        KeyWalk {
            arena,
            index: e.start,
            remaining: 1,
            ranks: HashMap::new(),
        }
    }
}

impl<'a> Iterator for KeyWalk<'a> {
    type Item = CellKey;

    fn next(&mut self) -> Option<CellKey> {
        if self.remaining == 0 {
            return None;
        }
        let cell = self.arena.cells()[self.index as usize];
        self.remaining -= 1;
        let key = match cell {
            Cell::Cons { symbol, arity } => {
                self.remaining += arity as u64;
                CellKey::Constructor(symbol, arity)
            }
            Cell::Novar { .. } => {
                let rank = self.ranks.len() as u32;
                self.ranks.insert(self.index, rank);
                CellKey::Variable(rank)
            }
            Cell::Ofvar { back_offset } => {
                let base = self.index - back_offset;
                CellKey::Variable(self.ranks[&base])
            }
        };
        self.index += 1;
        Some(key)
    }
}

/// Total order on expressions; `Equal` means the two are variants with
/// identical variable occurrence patterns.
pub fn compare_expressions(a1: &Arena, e1: ExprRef, a2: &Arena, e2: ExprRef) -> Ordering {
    if a1.id() == a2.id() && e1.start == e2.start {
        return Ordering::Equal;
    }
    let mut w1 = KeyWalk::new(a1, e1);
    let mut w2 = KeyWalk::new(a2, e2);
    loop {
        match (w1.next(), w2.next()) {
            (Some(k1), Some(k2)) => match compare_constructors(k1, k2) {
                Ordering::Equal => continue,
                other => return other,
            },
            (None, None) => return Ordering::Equal,
            // Equal prefixes force equal spans, so divergent exhaustion
            // means a corrupt encoding.
            _ => unreachable!("expressions with equal key prefixes have equal spans"),
        }
    }
}
