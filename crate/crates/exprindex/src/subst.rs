//! Substitutions over variable cells.
//!
//! A substitution is an ordered list of (variable cell, target cell) pairs.
//! Unification keeps one substitution per expression side and never mutates
//! the arenas; [`apply_destructive`] is the separate in-cell application
//! that overwrites a base variable's cell with the target address.
//!
//! Because a binding may point into the other side's arena, resolution is
//! performed against a [`Scope`]: a set of (arena, substitution) sides where
//! each cell is looked up in the substitution belonging to its own arena.

use std::collections::{HashMap, HashSet};

use crate::arena::{Arena, Cell, CellRef, ExprRef};

/// One elementary binding: a non-offset variable cell mapped to the first
/// cell of an expression encoding.
///
/// Targets are stored pre-resolved: a target is a constructor cell or a
/// (possibly bound) non-offset variable cell, never an offset variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Binding {
    pub var: CellRef,
    pub target: CellRef,
}

/// Ordered collection of bindings with at most one binding per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: Vec<Binding>,
}

impl Substitution {
    /// The empty substitution.
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Binding> {
        self.bindings.iter()
    }

    /// The target bound to `var`, if any.
    pub fn lookup(&self, var: CellRef) -> Option<CellRef> {
        self.bindings
            .iter()
            .find(|b| b.var == var)
            .map(|b| b.target)
    }

    /// Extends the substitution with `var -> target`.
    ///
    /// Panics if `var` is already bound: rebinding is a contract violation.
    pub fn bind(&mut self, var: CellRef, target: CellRef) {
        assert!(
            self.lookup(var).is_none(),
            "variable cell {var:?} is already bound"
        );
        self.bindings.push(Binding { var, target });
    }
}

/// Resolution context: up to two (arena, substitution) sides. A cell is
/// dereferenced through the substitution of the arena it lives in.
#[derive(Clone, Copy)]
pub struct Scope<'a> {
    sides: [Option<(&'a Arena, Option<&'a Substitution>)>; 2],
}

impl<'a> Scope<'a> {
    /// Single arena, no bindings beyond destructive ones.
    pub fn unbound(arena: &'a Arena) -> Scope<'a> {
        Scope {
            sides: [Some((arena, None)), None],
        }
    }

    /// Single arena with its substitution.
    pub fn one(arena: &'a Arena, subst: &'a Substitution) -> Scope<'a> {
        Scope {
            sides: [Some((arena, Some(subst))), None],
        }
    }

    /// Two sides, each owning its substitution.
    pub fn pair(
        left: &'a Arena,
        left_subst: &'a Substitution,
        right: &'a Arena,
        right_subst: &'a Substitution,
    ) -> Scope<'a> {
        Scope {
            sides: [
                Some((left, Some(left_subst))),
                Some((right, Some(right_subst))),
            ],
        }
    }

    fn side(&self, c: CellRef) -> (&'a Arena, Option<&'a Substitution>) {
        for side in self.sides.iter().flatten() {
            if side.0.id() == c.arena {
                return *side;
            }
        }
        panic!("cell {c:?} belongs to an arena outside this scope");
    }

    /// The arena owning `c`.
    pub fn arena(&self, c: CellRef) -> &'a Arena {
        self.side(c).0
    }

    pub fn cell(&self, c: CellRef) -> Cell {
        let (arena, _) = self.side(c);
        arena.cell(c)
    }

    /// The binding of a non-offset variable cell: the destructive in-cell
    /// binding if present, else the owning side's substitution entry.
    pub fn binding_of(&self, c: CellRef) -> Option<CellRef> {
        let (arena, subst) = self.side(c);
        match arena.cell(c) {
            Cell::Novar { binding: Some(t) } => Some(t),
            Cell::Novar { binding: None } => subst.and_then(|s| s.lookup(c)),
            other => panic!("binding_of on non-variable cell {other:?}"),
        }
    }

    /// Upper bound on the length of any acyclic dereference chain.
    fn chain_budget(&self) -> usize {
        let mut n = 2;
        for (arena, subst) in self.sides.iter().flatten() {
            n += arena.len() + subst.map_or(0, |s| s.len());
        }
        n
    }
}

/// Outcome of resolving a cell through offset links and bindings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Resolved {
    /// Resolution ended on a constructor cell.
    Structure(CellRef),
    /// Resolution ended on an unbound base variable.
    Unbound(CellRef),
}

/// Follows offset links and binding chains from `c` until a constructor or
/// an unbound base variable is reached. Panics on a cyclic chain, which can
/// only arise from a corrupted binding set.
pub(crate) fn resolve(scope: &Scope, c: CellRef) -> Resolved {
    let mut c = c;
    let mut budget = scope.chain_budget();
    loop {
        assert!(budget > 0, "cyclic binding chain while dereferencing");
        budget -= 1;
        match scope.cell(c) {
            Cell::Cons { .. } => return Resolved::Structure(c),
            Cell::Ofvar { back_offset } => c = c.back(back_offset),
            Cell::Novar { .. } => match scope.binding_of(c) {
                Some(t) => c = t,
                None => return Resolved::Unbound(c),
            },
        }
    }
}

/// Dereferences `c`: offset variables resolve to their base, then bindings
/// are followed transitively. Returns the final constructor cell, or `None`
/// when the chain ends on an unbound base variable.
///
/// Never returns an offset-variable cell.
pub fn deref(scope: &Scope, c: CellRef) -> Option<CellRef> {
    match resolve(scope, c) {
        Resolved::Structure(cell) => Some(cell),
        Resolved::Unbound(_) => None,
    }
}

/// True iff the variable cell `var` is reachable from the expression
/// starting at `e`, traversing cells and following bindings of both sides.
pub fn occurs_in(scope: &Scope, var: CellRef, e: CellRef) -> bool {
    debug_assert!(
        matches!(scope.cell(var), Cell::Novar { .. }),
        "occurs_in expects a non-offset variable cell"
    );
    let mut stack = vec![e];
    let mut visited: HashSet<CellRef> = HashSet::new();
    while let Some(head) = stack.pop() {
        if !visited.insert(head) {
            continue;
        }
        let arena = scope.arena(head);
        let span = arena.span_at(head.index);
        for i in 0..span as u32 {
            let c = head.forward(i);
            let base = match arena.cell(c) {
                Cell::Cons { .. } => continue,
                Cell::Novar { .. } => c,
                Cell::Ofvar { back_offset } => c.back(back_offset),
            };
            if base == var {
                return true;
            }
            if let Some(target) = scope.binding_of(base) {
                stack.push(target);
            }
        }
    }
    false
}

/// Signals a cyclic binding chain reached through a user-visible operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cyclic variable binding")]
pub struct CycleError;

/// Creates a fresh encoding of `e` in `target` with every bound variable
/// replaced by its recursively resolved target expression. Unbound
/// variables become fresh non-offset/offset variable structure preserving
/// sharing: occurrences that resolve to the same base variable share one
/// base cell in the output.
pub fn materialize(
    scope: &Scope,
    e: ExprRef,
    target: &mut Arena,
) -> Result<ExprRef, CycleError> {
    let mut out: Vec<Cell> = Vec::new();
    let mut var_out: HashMap<CellRef, usize> = HashMap::new();
    let mut active: HashSet<CellRef> = HashSet::new();
    emit(scope, e.head(), &mut out, &mut var_out, &mut active)?;
    Ok(target.append(out))
}

fn emit(
    scope: &Scope,
    c: CellRef,
    out: &mut Vec<Cell>,
    var_out: &mut HashMap<CellRef, usize>,
    active: &mut HashSet<CellRef>,
) -> Result<(), CycleError> {
    match scope.cell(c) {
        Cell::Cons { symbol, arity } => {
            out.push(Cell::Cons { symbol, arity });
            let arena = scope.arena(c);
            let mut arg = c.forward(1);
            for _ in 0..arity {
                emit(scope, arg, out, var_out, active)?;
                arg = arg.forward(arena.span_at(arg.index) as u32);
            }
            Ok(())
        }
        Cell::Ofvar { back_offset } => emit(scope, c.back(back_offset), out, var_out, active),
        Cell::Novar { .. } => match scope.binding_of(c) {
            Some(t) => {
                if !active.insert(c) {
                    return Err(CycleError);
                }
                let r = emit(scope, t, out, var_out, active);
                active.remove(&c);
                r
            }
            None => {
                let here = out.len();
                match var_out.get(&c) {
                    Some(&first) => out.push(Cell::Ofvar {
                        back_offset: (here - first) as u32,
                    }),
                    None => {
                        var_out.insert(c, here);
                        out.push(Cell::Novar { binding: None });
                    }
                }
                Ok(())
            }
        },
    }
}

/// Destructive substitution application: stores `target`'s address directly
/// in the base variable's cell. Offset variables referring to the base keep
/// their offsets unchanged.
///
/// Panics if `var` does not designate an unbound non-offset variable in
/// `arena` or if it is already bound.
pub fn apply_destructive(arena: &mut Arena, var: CellRef, target: CellRef) {
    match arena.cell(var) {
        Cell::Novar { binding: None } => {}
        Cell::Novar { binding: Some(_) } => {
            panic!("destructive application to an already bound variable")
        }
        other => panic!("destructive application to a non-variable cell {other:?}"),
    }
    // Store targets pre-resolved when the target is visible in this arena.
    let target = match target.arena == arena.id() {
        true => match arena.cell(target) {
            Cell::Ofvar { back_offset } => target.back(back_offset),
            _ => target,
        },
        false => target,
    };
    arena.set_cell(
        var,
        Cell::Novar {
            binding: Some(target),
        },
    );
}
