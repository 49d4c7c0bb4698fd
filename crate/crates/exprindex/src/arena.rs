//! Flat cell arenas hosting prefix-notation expression encodings.
//!
//! An expression is stored as a contiguous run of cells: each constructor is
//! one `Cons` cell carrying its symbol and arity, the first occurrence of a
//! variable is a `Novar` cell, and every later occurrence of the same
//! variable is an `Ofvar` cell holding the backward distance (in cells) to
//! that first occurrence. Variable names are discarded at encoding time; a
//! variable's identity is its cell address.
//!
//! Arenas are single-writer. Once built (and with no destructive
//! applications in flight) an arena may be shared read-only by any number
//! of concurrent readers; nothing but
//! [`apply_destructive`](crate::subst::apply_destructive) mutates written
//! cells.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::symbol::Symbol;

/// Identity token distinguishing arenas. Cell references carry it so that
/// bindings may point across arenas unambiguously.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ArenaId(u64);

static NEXT_ARENA_ID: AtomicU64 = AtomicU64::new(0);

impl ArenaId {
    fn fresh() -> ArenaId {
        ArenaId(NEXT_ARENA_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// Address of one cell: arena identity plus index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CellRef {
    pub arena: ArenaId,
    pub index: u32,
}

impl CellRef {
    /// The cell `offset` positions back; used to resolve offset variables.
    pub fn back(self, offset: u32) -> CellRef {
        CellRef {
            arena: self.arena,
            index: self
                .index
                .checked_sub(offset)
                .expect("offset variable points before arena start"),
        }
    }

    pub fn forward(self, offset: u32) -> CellRef {
        CellRef {
            arena: self.arena,
            index: self.index + offset,
        }
    }
}

/// Handle designating an expression: the arena it lives in and the index of
/// its first cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ExprRef {
    pub arena: ArenaId,
    pub start: u32,
}

impl ExprRef {
    /// Reference to the first cell of the encoding.
    pub fn head(self) -> CellRef {
        CellRef {
            arena: self.arena,
            index: self.start,
        }
    }

    /// Reference to the cell `offset` positions into the encoding.
    pub fn cell(self, offset: u32) -> CellRef {
        CellRef {
            arena: self.arena,
            index: self.start + offset,
        }
    }
}

/// The three cell kinds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CellTag {
    Cons,
    Novar,
    Ofvar,
}

impl std::fmt::Display for CellTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            CellTag::Cons => "CONS",
            CellTag::Novar => "NOVAR",
            CellTag::Ofvar => "OFVAR",
        })
    }
}

/// One arena slot.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cell {
    /// Expression constructor: symbol plus arity.
    Cons { symbol: Symbol, arity: u32 },
    /// First occurrence of a variable; `binding` is nil while unbound and a
    /// cell address once destructively bound.
    Novar { binding: Option<CellRef> },
    /// Later occurrence of a variable: positive backward cell distance to
    /// the base `Novar` cell.
    Ofvar { back_offset: u32 },
}

impl Cell {
    pub fn tag(&self) -> CellTag {
        match self {
            Cell::Cons { .. } => CellTag::Cons,
            Cell::Novar { .. } => CellTag::Novar,
            Cell::Ofvar { .. } => CellTag::Ofvar,
        }
    }

    /// Arity of a constructor cell; 0 for variable cells.
    pub fn arity(&self) -> u32 {
        match self {
            Cell::Cons { arity, .. } => *arity,
            _ => 0,
        }
    }
}

/// Growable contiguous cell store. Cell indices are stable once written;
/// the only mutation after an append is [`crate::subst::apply_destructive`].
#[derive(Clone, Debug)]
pub struct Arena {
    id: ArenaId,
    cells: Vec<Cell>,
}

impl Default for Arena {
    fn default() -> Self {
        Arena::new()
    }
}

impl Arena {
    pub fn new() -> Arena {
        Arena {
            id: ArenaId::fresh(),
            cells: Vec::new(),
        }
    }

    pub fn id(&self) -> ArenaId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Drops all cells and takes a fresh identity, so stale `CellRef`s can
    /// no longer be mistaken for valid ones.
    pub fn reset(&mut self) {
        self.cells.clear();
        self.id = ArenaId::fresh();
    }

    fn check(&self, c: CellRef) -> usize {
        assert!(c.arena == self.id, "cell reference from a different arena");
        assert!(
            (c.index as usize) < self.cells.len(),
            "cell index {} out of bounds (arena has {} cells)",
            c.index,
            self.cells.len()
        );
        c.index as usize
    }

    /// The cell stored at `c`.
    pub fn cell(&self, c: CellRef) -> Cell {
        self.cells[self.check(c)]
    }

    /// The tag of the cell at `c`.
    pub fn cell_type(&self, c: CellRef) -> CellTag {
        self.cell(c).tag()
    }

    /// Arity of the constructor at `c`, or 0 for variable cells.
    pub fn cell_arity(&self, c: CellRef) -> u32 {
        self.cell(c).arity()
    }

    /// Appends a pre-built encoding and returns its handle.
    pub(crate) fn append(&mut self, cells: Vec<Cell>) -> ExprRef {
        let start = self.cells.len() as u32;
        self.cells.extend(cells);
        ExprRef {
            arena: self.id,
            start,
        }
    }

    pub(crate) fn set_cell(&mut self, c: CellRef, cell: Cell) {
        let i = self.check(c);
        self.cells[i] = cell;
    }

    /// Number of cells of the expression starting at `e`: a counter starts
    /// at 1, each cell read decrements it and adds the cell's arity, and the
    /// traversal stops when the counter reaches 0.
    ///
    /// Panics if the counter fails to reach 0 within the arena, which
    /// signals a corrupt encoding.
    pub fn span(&self, e: ExprRef) -> usize {
        assert!(e.arena == self.id, "expression from a different arena");
        self.span_at(e.start)
    }

    pub(crate) fn span_at(&self, start: u32) -> usize {
        let mut counter: u64 = 1;
        let mut i = start as usize;
        while counter > 0 {
            let cell = self.cells.get(i).unwrap_or_else(|| {
                panic!("malformed encoding: traversal from cell {start} ran past arena end")
            });
            counter = counter - 1 + cell.arity() as u64;
            i += 1;
        }
        i - start as usize
    }

    /// Copies the expression at `e` from this arena into this arena,
    /// resetting every non-offset variable to unbound. The copy shares no
    /// cells with the original.
    pub fn copy_fresh_within(&mut self, e: ExprRef) -> ExprRef {
        let cells = fresh_cells(self, e);
        self.append(cells)
    }
}

/// Structurally identical encoding of `e` with all variable bindings reset
/// to nil.
fn fresh_cells(src: &Arena, e: ExprRef) -> Vec<Cell> {
    let span = src.span(e);
    let start = e.start as usize;
    src.cells[start..start + span]
        .iter()
        .map(|c| match c {
            Cell::Novar { .. } => Cell::Novar { binding: None },
            other => *other,
        })
        .collect()
}

/// Copies the expression at `e` in `src` into `target`, resetting every
/// non-offset variable to unbound. The resulting expression shares no cells
/// (and hence no variables) with the source.
pub fn copy_fresh(src: &Arena, e: ExprRef, target: &mut Arena) -> ExprRef {
    let cells = fresh_cells(src, e);
    target.append(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn span_examples() {
        let mut a = Arena::new();
        let e = parse("f(a, V1, g(b), V2, V2)", &mut a).unwrap();
        assert_eq!(a.span(e), 7);
        let e = parse("a", &mut a).unwrap();
        assert_eq!(a.span(e), 1);
        let e = parse("f(V1, V1)", &mut a).unwrap();
        assert_eq!(a.span(e), 3);
    }

    #[test]
    #[should_panic(expected = "malformed encoding")]
    fn span_detects_truncation() {
        let mut a = Arena::new();
        let e = parse("f(a, b)", &mut a).unwrap();
        a.cells.truncate(2);
        a.span(e);
    }

    #[test]
    fn cell_accessors() {
        let mut a = Arena::new();
        let e = parse("f(V1, V1)", &mut a).unwrap();
        assert_eq!(a.cell_type(e.cell(0)), CellTag::Cons);
        assert_eq!(a.cell_arity(e.cell(0)), 2);
        match a.cell(e.cell(0)) {
            Cell::Cons { symbol, arity } => {
                assert_eq!(symbol.name(), "f");
                assert_eq!(arity, 2);
            }
            other => panic!("expected constructor, got {other:?}"),
        }
        assert_eq!(a.cell_type(e.cell(1)), CellTag::Novar);
        assert_eq!(a.cell(e.cell(1)), Cell::Novar { binding: None });
        assert_eq!(a.cell_arity(e.cell(1)), 0);
        assert_eq!(a.cell_type(e.cell(2)), CellTag::Ofvar);
        assert_eq!(a.cell(e.cell(2)), Cell::Ofvar { back_offset: 1 });
        assert_eq!(a.cell_arity(e.cell(2)), 0);
    }

    #[test]
    fn copy_fresh_resets_bindings_and_shares_nothing() {
        let mut a = Arena::new();
        let e = parse("f(V1, V1)", &mut a).unwrap();
        let t = parse("a", &mut a).unwrap();
        crate::subst::apply_destructive(&mut a, e.cell(1), t.head());

        let mut b = Arena::new();
        let c = copy_fresh(&a, e, &mut b);
        assert_eq!(b.span(c), 3);
        assert_eq!(b.cell(c.cell(1)), Cell::Novar { binding: None });
        assert_eq!(b.cell(c.cell(2)), Cell::Ofvar { back_offset: 1 });
        assert_ne!(c.arena, e.arena);

        // Same-arena copy: distinct start, disjoint cells.
        let d = a.copy_fresh_within(e);
        assert_ne!(d.start, e.start);
        assert_eq!(a.cell(d.cell(1)), Cell::Novar { binding: None });
        // Original retains its destructive binding.
        assert_eq!(
            a.cell(e.cell(1)),
            Cell::Novar {
                binding: Some(t.head())
            }
        );
    }
}
