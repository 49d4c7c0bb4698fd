//! Canonical text rendering.
//!
//! Variables render as `V0, V1, ...` in first-occurrence order of the
//! resolved output; bindings (destructive and substitution-carried) are
//! expanded inline. A [`Namer`] maps base variable cells to indices and can
//! be shared across several renderings to keep names consistent, which the
//! CLI uses when printing two expressions and their substitutions together.

use std::collections::{HashMap, HashSet};

use crate::arena::{Arena, Cell, CellRef, ExprRef};
use crate::subst::{CycleError, Scope, Substitution};

/// Assigns stable `V<n>` names to base variable cells.
#[derive(Debug, Default, Clone)]
pub struct Namer {
    map: HashMap<CellRef, u32>,
}

impl Namer {
    pub fn new() -> Namer {
        Namer::default()
    }

    /// Index for `base`, assigning the next free one on first use.
    pub fn index_of(&mut self, base: CellRef) -> u32 {
        let next = self.map.len() as u32;
        *self.map.entry(base).or_insert(next)
    }

    /// Pre-assigns names for every variable of `e` in raw traversal order.
    pub fn seed_from(&mut self, arena: &Arena, e: ExprRef) {
        for i in 0..arena.span(e) as u32 {
            let c = e.cell(i);
            if let Cell::Novar { .. } = arena.cell(c) {
                self.index_of(c);
            }
        }
    }
}

/// Renders `e` resolving bindings through `scope`, using (and extending)
/// `namer` for variable names.
pub fn render_with(scope: &Scope, e: ExprRef, namer: &mut Namer) -> Result<String, CycleError> {
    let mut out = String::new();
    let mut active = HashSet::new();
    render_sub(scope, e.head(), namer, &mut active, &mut out)?;
    Ok(out)
}

/// Renders `e` without any substitution. Destructive in-cell bindings are
/// still resolved. Panics on a cyclic binding chain; use [`render_with`]
/// where cycles must be tolerated.
pub fn render(arena: &Arena, e: ExprRef) -> String {
    let scope = Scope::unbound(arena);
    let mut namer = Namer::new();
    render_with(&scope, e, &mut namer).expect("cyclic binding chain while rendering")
}

/// Renders a subexpression starting at `c` (any cell kind).
pub(crate) fn render_sub(
    scope: &Scope,
    c: CellRef,
    namer: &mut Namer,
    active: &mut HashSet<CellRef>,
    out: &mut String,
) -> Result<(), CycleError> {
    match scope.cell(c) {
        Cell::Cons { symbol, arity } => {
            out.push_str(symbol.name());
            if arity > 0 {
                out.push('(');
                let arena = scope.arena(c);
                let mut arg = c.forward(1);
                for i in 0..arity {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    render_sub(scope, arg, namer, active, out)?;
                    arg = arg.forward(arena.span_at(arg.index) as u32);
                }
                out.push(')');
            }
            Ok(())
        }
        Cell::Ofvar { back_offset } => render_sub(scope, c.back(back_offset), namer, active, out),
        Cell::Novar { .. } => match scope.binding_of(c) {
            Some(target) => {
                if !active.insert(c) {
                    return Err(CycleError);
                }
                let r = render_sub(scope, target, namer, active, out);
                active.remove(&c);
                r
            }
            None => {
                out.push('V');
                out.push_str(&namer.index_of(c).to_string());
                Ok(())
            }
        },
    }
}

/// Renders a substitution as `{V0 -> a, V1 -> g(b)}` using `namer` for both
/// the bound variables and the variables inside targets.
pub fn render_substitution(
    scope: &Scope,
    subst: &Substitution,
    namer: &mut Namer,
) -> Result<String, CycleError> {
    let mut out = String::from("{");
    for (i, b) in subst.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('V');
        out.push_str(&namer.index_of(b.var).to_string());
        out.push_str(" -> ");
        let mut active = HashSet::new();
        render_sub(scope, b.target, namer, &mut active, &mut out)?;
    }
    out.push('}');
    Ok(out)
}
