//! The matching-unification algorithm.
//!
//! A simultaneous left-to-right traversal of two expression encodings that
//! produces, in one pass, the relation of the pair — variant (VR), strictly
//! more general (SG), strict instance (SI), only unifiable (OU), or
//! non-unifiable (NU) — together with one substitution per side. The arenas
//! are never mutated, so any number of calls may run concurrently over
//! shared read-only arenas.
//!
//! Mode tracking works through events raised as bindings are created. The
//! answer accumulator starts at VR and only ever moves down the lattice
//! VR -> {SG, SI} -> OU, with NU absorbing:
//!
//! * binding a left-side variable (class) to structure escalates via
//!   [`ModeEvent::BindLeftNonvar`], symmetrically for the right;
//! * identifying two variables keeps track of how many variables of each
//!   side share a class; a class holding two left-side variables means the
//!   left-to-right match is no longer injective ([`ModeEvent::NoninjectiveLeft`]),
//!   symmetrically for the right;
//! * constructor clashes and occurs-check failures go straight to NU.
//!
//! Occurs checks are only performed where a repeated (offset or previously
//! touched) variable meets structure; a fresh first-occurrence variable at
//! the top level cannot occur in anything already bound, so no check is
//! needed there. On variable-linear pairs the algorithm performs zero
//! occurs checks.

use std::collections::HashMap;

use crate::arena::{Arena, Cell, CellRef, ExprRef};
use crate::subst::{occurs_in, Resolved, Scope, Substitution};

/// Mutually exclusive relation of an expression pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// Variant: equal up to a renaming substitution.
    Vr,
    /// The left expression is strictly more general than the right.
    Sg,
    /// The left expression is a strict instance of the right.
    Si,
    /// Unifiable, but neither side matches onto the other.
    Ou,
    /// Non-unifiable.
    Nu,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Vr => "VR",
            Mode::Sg => "SG",
            Mode::Si => "SI",
            Mode::Ou => "OU",
            Mode::Nu => "NU",
        })
    }
}

/// Events that move the mode accumulator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModeEvent {
    /// A left-expression variable absorbed right structure.
    BindLeftNonvar,
    /// A right-expression variable absorbed left structure.
    BindRightNonvar,
    /// Two variables were identified without breaking bijectivity.
    BindVarVarBijective,
    /// Two left-expression variables now share an image.
    NoninjectiveLeft,
    /// Two right-expression variables now share an image.
    NoninjectiveRight,
    /// Constructor mismatch.
    Conflict,
    /// Occurs-check failure.
    OccursFail,
}

impl Mode {
    /// The transition table. NU is absorbing.
    pub fn transition(self, event: ModeEvent) -> Mode {
        use Mode::*;
        use ModeEvent::*;
        if self == Nu {
            return Nu;
        }
        match event {
            Conflict | OccursFail => Nu,
            BindVarVarBijective => self,
            BindLeftNonvar | NoninjectiveLeft => match self {
                Vr => Sg,
                Sg => Sg,
                Si | Ou => Ou,
                Nu => Nu,
            },
            BindRightNonvar | NoninjectiveRight => match self {
                Vr => Si,
                Si => Si,
                Sg | Ou => Ou,
                Nu => Nu,
            },
        }
    }
}

/// Result of [`unify`].
#[derive(Debug)]
pub struct Unification {
    pub mode: Mode,
    /// Bindings for variables living in the left expression's arena.
    pub s1: Substitution,
    /// Bindings for variables living in the right expression's arena.
    pub s2: Substitution,
    /// Number of occurs-check invocations performed.
    pub occurs_checks: usize,
    /// When both inputs shared one arena, the right expression was copied
    /// fresh to keep the traversal variable-disjoint; the copy (and the
    /// arena holding it) is returned here because `s1`/`s2` refer to it.
    pub right_copy: Option<(Arena, ExprRef)>,
}

struct Walker<'a> {
    left: &'a Arena,
    right: &'a Arena,
    s1: Substitution,
    s2: Substitution,
    mode: Mode,
    occurs_checks: usize,
    /// Per unbound-base-variable class: how many left-side / right-side
    /// variables it contains. Doubles as the injectivity record for
    /// variable-variable renamings. Absent entries are singleton classes.
    classes: HashMap<CellRef, (u32, u32)>,
    depth: u32,
    /// Top-level remaining-cell counter trace: a snapshot after every
    /// arity addition and after every cursor advancement.
    trace: Option<Vec<(u64, u64)>>,
}

/// Aborts the traversal; the mode accumulator already holds NU.
struct Stop;

impl<'a> Walker<'a> {
    fn arena_of(&self, c: CellRef) -> &'a Arena {
        if c.arena == self.left.id() {
            self.left
        } else if c.arena == self.right.id() {
            self.right
        } else {
            panic!("cell {c:?} belongs to neither side of this unification")
        }
    }

    fn is_left(&self, c: CellRef) -> bool {
        c.arena == self.left.id()
    }

    fn scope(&self) -> Scope<'_> {
        Scope::pair(self.left, &self.s1, self.right, &self.s2)
    }

    fn subst_for_mut(&mut self, c: CellRef) -> &mut Substitution {
        if c.arena == self.left.id() {
            &mut self.s1
        } else {
            &mut self.s2
        }
    }

    fn fire(&mut self, event: ModeEvent) -> Result<(), Stop> {
        self.mode = self.mode.transition(event);
        if self.mode == Mode::Nu {
            Err(Stop)
        } else {
            Ok(())
        }
    }

    /// Fires a terminal event (the transition lands on NU).
    fn fail(&mut self, event: ModeEvent) -> Stop {
        self.mode = self.mode.transition(event);
        debug_assert_eq!(self.mode, Mode::Nu);
        Stop
    }

    /// Resolves the cursor cell and reports whether it is a first-touch
    /// unbound non-offset variable (in which case no occurs check is needed
    /// at the top level).
    fn resolve_cursor(&self, c: CellRef) -> (Resolved, bool) {
        let resolved = crate::subst::resolve(&self.scope(), c);
        let fresh = matches!(self.arena_of(c).cell(c), Cell::Novar { binding: None })
            && self.subst_of(c).lookup(c).is_none()
            && !self.classes.contains_key(&c);
        (resolved, fresh)
    }

    fn subst_of(&self, c: CellRef) -> &Substitution {
        if c.arena == self.left.id() {
            &self.s1
        } else {
            &self.s2
        }
    }

    fn class_counts(&self, base: CellRef) -> (u32, u32) {
        self.classes
            .get(&base)
            .copied()
            .unwrap_or(if self.is_left(base) { (1, 0) } else { (0, 1) })
    }

    /// Binds the class rooted at `base` to the structure at `head`, firing
    /// one escalation per side represented in the class.
    fn bind_structure(&mut self, base: CellRef, head: CellRef) -> Result<(), Stop> {
        let (l, r) = self.class_counts(base);
        self.classes.remove(&base);
        self.subst_for_mut(base).bind(base, head);
        if l > 0 {
            self.fire(ModeEvent::BindLeftNonvar)?;
        }
        if r > 0 {
            self.fire(ModeEvent::BindRightNonvar)?;
        }
        Ok(())
    }

    /// Identifies two distinct unbound base variables: the second is bound
    /// to the first and their classes merge. A merged class holding two
    /// variables of one expression makes that side's variable image
    /// non-injective.
    fn merge(&mut self, keep: CellRef, absorb: CellRef) -> Result<(), Stop> {
        debug_assert!(keep != absorb);
        let (l1, r1) = self.class_counts(keep);
        let (l2, r2) = self.class_counts(absorb);
        let merged = (l1 + l2, r1 + r2);
        self.classes.remove(&absorb);
        self.classes.insert(keep, merged);
        self.subst_for_mut(absorb).bind(absorb, keep);
        if merged.0 < 2 && merged.1 < 2 {
            self.fire(ModeEvent::BindVarVarBijective)?;
        } else {
            if merged.0 >= 2 {
                self.fire(ModeEvent::NoninjectiveLeft)?;
            }
            if merged.1 >= 2 {
                self.fire(ModeEvent::NoninjectiveRight)?;
            }
        }
        Ok(())
    }

    fn occurs(&mut self, var: CellRef, head: CellRef) -> bool {
        self.occurs_checks += 1;
        occurs_in(&self.scope(), var, head)
    }

    fn note_counters(&mut self, r1: u64, r2: u64) {
        if self.depth == 0 {
            if let Some(trace) = self.trace.as_mut() {
                trace.push((r1, r2));
            }
        }
    }

    /// Advances a cursor past the subexpression it just consumed: an inline
    /// constructor spans several cells, anything reached through a variable
    /// occupies a single cell of the encoding.
    fn advance(&self, c: &mut CellRef, r: &mut u64, head: CellRef, inline: bool) {
        if inline {
            let span = self.arena_of(head).span_at(head.index) as u32;
            *c = c.forward(span);
        } else {
            *c = c.forward(1);
        }
        *r -= 1;
    }

    /// Compares the two encodings cell pair by cell pair. Each call owns its
    /// remaining-cell counters; dereference cases recurse with the resolved
    /// addresses while sharing all binding and mode state.
    fn walk(&mut self, start1: CellRef, start2: CellRef) -> Result<(), Stop> {
        let mut c1 = start1;
        let mut c2 = start2;
        let mut r1: u64 = 1;
        let mut r2: u64 = 1;
        while r1 > 0 || r2 > 0 {
            debug_assert!(r1 == r2 && r1 > 0, "remaining-cell counters diverged");
            let (k1, fresh1) = self.resolve_cursor(c1);
            let (k2, fresh2) = self.resolve_cursor(c2);
            match (k1, k2) {
                (Resolved::Structure(h1), Resolved::Structure(h2)) => {
                    let inline1 = h1 == c1;
                    let inline2 = h2 == c2;
                    if h1 == h2 {
                        // Identical subexpression on both sides.
                    } else if inline1 && inline2 {
                        let (Cell::Cons { symbol: s1, arity: a1 },
                             Cell::Cons { symbol: s2, arity: a2 }) =
                            (self.arena_of(h1).cell(h1), self.arena_of(h2).cell(h2))
                        else {
                            unreachable!("structure resolution ends on constructors")
                        };
                        if s1 != s2 || a1 != a2 {
                            return Err(self.fail(ModeEvent::Conflict));
                        }
                        // Step inside both constructors: the arities join
                        // the remaining-cell counters, then one cell is
                        // consumed on each side.
                        r1 += a1 as u64;
                        r2 += a2 as u64;
                        if a1 > 0 {
                            self.note_counters(r1, r2);
                        }
                        c1 = c1.forward(1);
                        c2 = c2.forward(1);
                        r1 -= 1;
                        r2 -= 1;
                        self.note_counters(r1, r2);
                        continue;
                    } else {
                        // At least one side is reached through a binding:
                        // compare the resolved subexpressions recursively.
                        self.depth += 1;
                        let result = self.walk(h1, h2);
                        self.depth -= 1;
                        result?;
                    }
                    self.advance(&mut c1, &mut r1, h1, inline1);
                    self.advance(&mut c2, &mut r2, h2, inline2);
                    self.note_counters(r1, r2);
                }
                (Resolved::Unbound(b1), Resolved::Structure(h2)) => {
                    let skip_check = self.depth == 0 && fresh1;
                    if !skip_check && self.occurs(b1, h2) {
                        return Err(self.fail(ModeEvent::OccursFail));
                    }
                    self.bind_structure(b1, h2)?;
                    c1 = c1.forward(1);
                    r1 -= 1;
                    let inline2 = h2 == c2;
                    self.advance(&mut c2, &mut r2, h2, inline2);
                    self.note_counters(r1, r2);
                }
                (Resolved::Structure(h1), Resolved::Unbound(b2)) => {
                    let skip_check = self.depth == 0 && fresh2;
                    if !skip_check && self.occurs(b2, h1) {
                        return Err(self.fail(ModeEvent::OccursFail));
                    }
                    self.bind_structure(b2, h1)?;
                    let inline1 = h1 == c1;
                    self.advance(&mut c1, &mut r1, h1, inline1);
                    c2 = c2.forward(1);
                    r2 -= 1;
                    self.note_counters(r1, r2);
                }
                (Resolved::Unbound(b1), Resolved::Unbound(b2)) => {
                    if b1 != b2 {
                        // Bind to the left cursor's base.
                        self.merge(b1, b2)?;
                    }
                    c1 = c1.forward(1);
                    c2 = c2.forward(1);
                    r1 -= 1;
                    r2 -= 1;
                    self.note_counters(r1, r2);
                }
            }
        }
        Ok(())
    }
}

/// Runs the matching-unification traversal on two expressions.
///
/// The expressions must be variable-disjoint, which holds whenever they live
/// in distinct arenas. If both live in one arena the right expression is
/// copied fresh first and the copy is handed back in
/// [`Unification::right_copy`].
pub fn unify(a1: &Arena, e1: ExprRef, a2: &Arena, e2: ExprRef) -> Unification {
    assert!(e1.arena == a1.id(), "left expression from a different arena");
    assert!(e2.arena == a2.id(), "right expression from a different arena");
    if a1.id() == a2.id() {
        // The copy preserves the value: in-cell bindings are resolved, not
        // reset.
        let mut scratch = Arena::new();
        let e2_fresh =
            crate::subst::materialize(&crate::subst::Scope::unbound(a2), e2, &mut scratch)
                .expect("cyclic bindings in right expression");
        let mut u = run(a1, e1, &scratch, e2_fresh);
        u.right_copy = Some((scratch, e2_fresh));
        u
    } else {
        run(a1, e1, a2, e2)
    }
}

/// Mode-only convenience wrapper around [`unify`].
pub fn classify(a1: &Arena, e1: ExprRef, a2: &Arena, e2: ExprRef) -> Mode {
    unify(a1, e1, a2, e2).mode
}

fn run(left: &Arena, e1: ExprRef, right: &Arena, e2: ExprRef) -> Unification {
    run_traced(left, e1, right, e2, None).0
}

/// Like [`unify`] on distinct arenas, optionally recording the top-level
/// remaining-cell counter snapshots.
pub(crate) fn run_traced(
    left: &Arena,
    e1: ExprRef,
    right: &Arena,
    e2: ExprRef,
    trace: Option<Vec<(u64, u64)>>,
) -> (Unification, Option<Vec<(u64, u64)>>) {
    let mut w = Walker {
        left,
        right,
        s1: Substitution::new(),
        s2: Substitution::new(),
        mode: Mode::Vr,
        occurs_checks: 0,
        classes: HashMap::new(),
        depth: 0,
        trace,
    };
    let _ = w.walk(e1.head(), e2.head());
    (
        Unification {
            mode: w.mode,
            s1: w.s1,
            s2: w.s2,
            occurs_checks: w.occurs_checks,
            right_copy: None,
        },
        w.trace,
    )
}
