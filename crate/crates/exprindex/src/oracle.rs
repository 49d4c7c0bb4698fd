//! Brute-force reference implementations used as ground truth in tests and
//! as the linear baseline of `bench`.
//!
//! Everything here works on plain expression trees and shares no code with
//! the cell-level traversal it is checked against: agreement between the two
//! routes is evidence, not tautology.

use std::collections::{HashMap, HashSet};

use crate::arena::{Arena, Cell, ExprRef};
use crate::symbol::Symbol;
use crate::trie::QueryMode;
use crate::unify::Mode;

/// Tree-shaped expression: a variable rank or an application of a symbol to
/// argument trees (arity = number of arguments).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TreeExpr {
    Var(u32),
    App(Symbol, Vec<TreeExpr>),
}

impl TreeExpr {
    pub fn nullary(name: &str) -> TreeExpr {
        TreeExpr::App(Symbol::intern(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<TreeExpr>) -> TreeExpr {
        TreeExpr::App(Symbol::intern(name), args)
    }

    /// Largest variable rank occurring in the tree, if any.
    pub fn max_rank(&self) -> Option<u32> {
        match self {
            TreeExpr::Var(r) => Some(*r),
            TreeExpr::App(_, args) => args.iter().filter_map(TreeExpr::max_rank).max(),
        }
    }

    /// Shifts every variable rank up by `offset`.
    pub fn shift_ranks(&self, offset: u32) -> TreeExpr {
        match self {
            TreeExpr::Var(r) => TreeExpr::Var(r + offset),
            TreeExpr::App(s, args) => {
                TreeExpr::App(*s, args.iter().map(|a| a.shift_ranks(offset)).collect())
            }
        }
    }

    /// Renames variables to 0, 1, ... by first occurrence.
    pub fn canonicalize(&self) -> TreeExpr {
        fn go(t: &TreeExpr, map: &mut HashMap<u32, u32>) -> TreeExpr {
            match t {
                TreeExpr::Var(r) => {
                    let next = map.len() as u32;
                    TreeExpr::Var(*map.entry(*r).or_insert(next))
                }
                TreeExpr::App(s, args) => {
                    TreeExpr::App(*s, args.iter().map(|a| go(a, map)).collect())
                }
            }
        }
        go(self, &mut HashMap::new())
    }
}

impl std::fmt::Display for TreeExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeExpr::Var(r) => write!(f, "V{r}"),
            TreeExpr::App(s, args) => {
                write!(f, "{s}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Tree-level substitution.
pub type TreeSubst = HashMap<u32, TreeExpr>;

pub fn apply(s: &TreeSubst, t: &TreeExpr) -> TreeExpr {
    match t {
        TreeExpr::Var(r) => s.get(r).cloned().unwrap_or_else(|| t.clone()),
        TreeExpr::App(sym, args) => {
            TreeExpr::App(*sym, args.iter().map(|a| apply(s, a)).collect())
        }
    }
}

fn occurs(rank: u32, t: &TreeExpr) -> bool {
    match t {
        TreeExpr::Var(r) => *r == rank,
        TreeExpr::App(_, args) => args.iter().any(|a| occurs(rank, a)),
    }
}

/// Textbook unification with an occurs check on every variable binding.
/// The inputs must be variable-disjoint; the result is a most general
/// unifier in idempotent form, or `None` when no unifier exists.
pub fn oracle_unify(a: &TreeExpr, b: &TreeExpr) -> Option<TreeSubst> {
    let mut subst = TreeSubst::new();
    let mut pairs = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = pairs.pop() {
        let x = apply(&subst, &x);
        let y = apply(&subst, &y);
        match (x, y) {
            (TreeExpr::Var(r1), TreeExpr::Var(r2)) if r1 == r2 => {}
            (TreeExpr::Var(r), t) | (t, TreeExpr::Var(r)) => {
                if occurs(r, &t) {
                    return None;
                }
                let one = TreeSubst::from([(r, t)]);
                for v in subst.values_mut() {
                    *v = apply(&one, v);
                }
                subst.extend(one);
            }
            (TreeExpr::App(f, xs), TreeExpr::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                pairs.extend(xs.into_iter().zip(ys));
            }
        }
    }
    Some(subst)
}

/// One-sided match: a substitution over `a`'s variables with `aσ = b`, or
/// `None`. Implemented by structural recursion with a variable-image table.
pub fn match_onto(a: &TreeExpr, b: &TreeExpr) -> Option<TreeSubst> {
    fn go(a: &TreeExpr, b: &TreeExpr, images: &mut TreeSubst) -> bool {
        match a {
            TreeExpr::Var(r) => match images.get(r) {
                Some(prev) => prev == b,
                None => {
                    images.insert(*r, b.clone());
                    true
                }
            },
            TreeExpr::App(f, xs) => match b {
                TreeExpr::App(g, ys) if f == g && xs.len() == ys.len() => {
                    xs.iter().zip(ys).all(|(x, y)| go(x, y, images))
                }
                _ => false,
            },
        }
    }
    let mut images = TreeSubst::new();
    go(a, b, &mut images).then_some(images)
}

/// True when the match images form a renaming for the matched expression:
/// every image is a variable and distinct variables have distinct images.
fn is_renaming(images: &TreeSubst) -> bool {
    let mut seen = HashSet::new();
    images.values().all(|img| match img {
        TreeExpr::Var(r) => seen.insert(*r),
        _ => false,
    })
}

/// Classifies a pair of expression trees into the five matching-unification
/// modes from first principles. The inputs need not be variable-disjoint;
/// `b`'s ranks are shifted internally.
pub fn oracle_classify(a: &TreeExpr, b: &TreeExpr) -> Mode {
    let b = b.shift_ranks(a.max_rank().map_or(0, |r| r + 1));
    let ab = match_onto(a, &b);
    let ba = match_onto(&b, a);
    let mode = match (&ab, &ba) {
        (Some(m), _) if is_renaming(m) => Mode::Vr,
        (Some(_), _) => Mode::Sg,
        (None, Some(_)) => Mode::Si,
        (None, None) => {
            if oracle_unify(a, &b).is_some() {
                Mode::Ou
            } else {
                Mode::Nu
            }
        }
    };
    // The five definitions are mutually exclusive; check that exactly one
    // branch can fire.
    debug_assert!(
        {
            let both = ab.is_some() && ba.is_some();
            let variant = matches!(mode, Mode::Vr);
            (!both || variant)
                && (mode != Mode::Vr || ba.as_ref().is_some_and(is_renaming))
                && (mode == Mode::Nu || oracle_unify(a, &b).is_some())
        },
        "mode classification branches overlap for {a} vs {b}"
    );
    mode
}

/// Which relations each query mode accepts.
fn accepted(query: QueryMode, mode: Mode) -> bool {
    match query {
        QueryMode::Variant => mode == Mode::Vr,
        QueryMode::Instance => matches!(mode, Mode::Vr | Mode::Si),
        QueryMode::Generalization => matches!(mode, Mode::Vr | Mode::Sg),
        QueryMode::Unifiable => mode != Mode::Nu,
    }
}

/// Linear-scan retrieval: indices of the corpus entries whose mode relative
/// to `q` is accepted by `query`.
pub fn oracle_retrieve(corpus: &[TreeExpr], q: &TreeExpr, query: QueryMode) -> HashSet<usize> {
    corpus
        .iter()
        .enumerate()
        .filter(|(_, stored)| accepted(query, oracle_classify(stored, q)))
        .map(|(i, _)| i)
        .collect()
}

/// Reads a cell encoding into a tree. Bindings are ignored: this is the
/// structural bridge, mutually inverse with [`cells_of_tree`] up to rank
/// canonicalization.
pub fn tree_of_cells(arena: &Arena, e: ExprRef) -> TreeExpr {
    fn go(arena: &Arena, idx: &mut u32, ranks: &mut HashMap<u32, u32>) -> TreeExpr {
        let here = *idx;
        *idx += 1;
        match arena.cells()[here as usize] {
            Cell::Cons { symbol, arity } => {
                let args = (0..arity).map(|_| go(arena, idx, ranks)).collect();
                TreeExpr::App(symbol, args)
            }
            Cell::Novar { .. } => {
                let rank = ranks.len() as u32;
                TreeExpr::Var(*ranks.entry(here).or_insert(rank))
            }
            Cell::Ofvar { back_offset } => TreeExpr::Var(ranks[&(here - back_offset)]),
        }
    }
    assert!(e.arena == arena.id(), "expression from a different arena");
    let mut idx = e.start;
    let mut ranks = HashMap::new();
    go(arena, &mut idx, &mut ranks)
}

/// Encodes a tree as cells appended to `arena`.
pub fn cells_of_tree(t: &TreeExpr, arena: &mut Arena) -> ExprRef {
    fn go(t: &TreeExpr, out: &mut Vec<Cell>, first: &mut HashMap<u32, usize>) {
        match t {
            TreeExpr::Var(r) => {
                let here = out.len();
                match first.get(r) {
                    Some(&base) => out.push(Cell::Ofvar {
                        back_offset: (here - base) as u32,
                    }),
                    None => {
                        first.insert(*r, here);
                        out.push(Cell::Novar { binding: None });
                    }
                }
            }
            TreeExpr::App(sym, args) => {
                out.push(Cell::Cons {
                    symbol: *sym,
                    arity: args.len() as u32,
                });
                for a in args {
                    go(a, out, first);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut out, &mut HashMap::new());
    arena.append(out)
}
