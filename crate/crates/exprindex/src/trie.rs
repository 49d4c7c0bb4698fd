//! The instance trie: a stable, versatile, perfect-filter index over
//! expressions ordered by strict instantiation.
//!
//! Every node below the (virtual, most general) root owns one canonical
//! fresh copy of an expression; every child is a strict instance of its
//! parent, siblings are strictly increasing under the expression order, and
//! no two nodes hold variants of each other. The shape is a function of the
//! stored set alone: any insertion/deletion history producing the same set
//! produces byte-identical dumps.
//!
//! Placement descends from the root into the first child that is strictly
//! more general than the incoming expression until no child qualifies; the
//! new node is then inserted among the siblings in order, and every node in
//! the surrounding subtrees that is a strict instance of the newcomer is
//! detached and re-placed below it. Re-placement runs the same procedure,
//! so stolen nodes nest correctly among each other.
//!
//! Single-writer, multi-reader: retrievals take `&self` and may run
//! concurrently over an unchanging trie; insert/remove require exclusive
//! access. The visit counter returned by [`InstanceTrie::retrieve`] belongs
//! to the query; [`TrieStats::node_visits_last_query`] merely remembers the
//! most recent one.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use crate::arena::{Arena, ExprRef};
use crate::render::render;
use crate::subst::{materialize, Scope, Substitution};
use crate::unify::{classify, unify, Mode};

/// Retrieval mode.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum QueryMode {
    /// Stored variants of the query: relation VR.
    Variant,
    /// Stored instances of the query: relations {VR, SI}.
    Instance,
    /// Stored generalizations of the query: relations {VR, SG}.
    Generalization,
    /// Everything unifiable with the query: relations {VR, SG, SI, OU}.
    Unifiable,
}

/// Outcome of [`InstanceTrie::insert`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InsertOutcome {
    Inserted,
    /// A variant of the expression is already stored; the trie is unchanged.
    VariantPresent,
}

/// Outcome of [`InstanceTrie::remove`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RemoveOutcome {
    Removed,
    NotFound,
}

/// One retrieval hit: a stored expression, its relation to the query, and
/// the witnessing substitutions (stored side and query side).
#[derive(Debug)]
pub struct Match {
    pub expr: ExprRef,
    pub mode: Mode,
    pub s_stored: Substitution,
    pub s_query: Substitution,
}

/// Result of [`InstanceTrie::retrieve`]. Substitutions in the matches refer
/// to the trie's arena and to `query_arena`, which holds the fresh copy of
/// the query the traversal unified against.
#[derive(Debug)]
pub struct Retrieval {
    pub matches: Vec<Match>,
    /// Number of nodes inspected (unified) to drive the traversal. Nodes of
    /// wholesale-reported subtrees are not inspected and do not count.
    pub visited: usize,
    pub query_arena: Arena,
    pub query: ExprRef,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TrieStats {
    pub size: usize,
    pub depth: usize,
    pub node_visits_last_query: usize,
}

type NodeId = usize;

#[derive(Debug, Clone)]
struct Node {
    expr: ExprRef,
    children: Vec<NodeId>,
}

#[derive(Debug)]
pub struct InstanceTrie {
    arena: Arena,
    slots: Vec<Option<Node>>,
    free: Vec<NodeId>,
    roots: Vec<NodeId>,
    size: usize,
    last_visits: AtomicUsize,
}

impl Default for InstanceTrie {
    fn default() -> Self {
        InstanceTrie::new()
    }
}

/// Where a children list lives: under the virtual root or under a node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Spot {
    Root,
    Node(NodeId),
}

impl InstanceTrie {
    pub fn new() -> InstanceTrie {
        InstanceTrie {
            arena: Arena::new(),
            slots: Vec::new(),
            free: Vec::new(),
            roots: Vec::new(),
            size: 0,
            last_visits: AtomicUsize::new(0),
        }
    }

    /// Number of stored expressions.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// The arena holding the canonical stored copies.
    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn render_expr(&self, e: ExprRef) -> String {
        render(&self.arena, e)
    }

    fn node(&self, id: NodeId) -> &Node {
        self.slots[id].as_ref().expect("dangling trie node id")
    }

    fn node_mut(&mut self, id: NodeId) -> &mut Node {
        self.slots[id].as_mut().expect("dangling trie node id")
    }

    fn children(&self, spot: Spot) -> &Vec<NodeId> {
        match spot {
            Spot::Root => &self.roots,
            Spot::Node(id) => &self.node(id).children,
        }
    }

    fn children_mut(&mut self, spot: Spot) -> &mut Vec<NodeId> {
        match spot {
            Spot::Root => &mut self.roots,
            Spot::Node(id) => &mut self.node_mut(id).children,
        }
    }

    fn alloc(&mut self, node: Node) -> NodeId {
        match self.free.pop() {
            Some(id) => {
                self.slots[id] = Some(node);
                id
            }
            None => {
                self.slots.push(Some(node));
                self.slots.len() - 1
            }
        }
    }

    /// Relation of a stored node's expression to a probe expression.
    fn relate(&self, id: NodeId, probe_arena: &Arena, probe: ExprRef) -> Mode {
        classify(&self.arena, self.node(id).expr, probe_arena, probe)
    }

    /// Relation between two stored nodes (same arena; `classify` copies the
    /// right side fresh internally to keep the traversal variable-disjoint).
    fn relate_nodes(&self, id: NodeId, other: NodeId) -> Mode {
        classify(
            &self.arena,
            self.node(id).expr,
            &self.arena,
            self.node(other).expr,
        )
    }

    /// Descends from `spot` into the first child strictly more general than
    /// the probe, repeatedly. Returns the placement spot and, if a variant
    /// is stored there, its node id.
    fn descend(&self, probe_arena: &Arena, probe: ExprRef) -> (Spot, Option<NodeId>) {
        let mut spot = Spot::Root;
        'descend: loop {
            for &child in self.children(spot) {
                match self.relate(child, probe_arena, probe) {
                    Mode::Vr => return (spot, Some(child)),
                    Mode::Sg => {
                        spot = Spot::Node(child);
                        continue 'descend;
                    }
                    _ => {}
                }
            }
            return (spot, None);
        }
    }

    /// Inserts the value of `e` (a fresh canonical copy with any bindings
    /// resolved, owned by the trie's arena) unless a variant is already
    /// stored.
    pub fn insert(&mut self, src: &Arena, e: ExprRef) -> InsertOutcome {
        let (spot, variant) = self.descend(src, e);
        if variant.is_some() {
            return InsertOutcome::VariantPresent;
        }
        let copy = materialize(&Scope::unbound(src), e, &mut self.arena)
            .expect("cyclic bindings in inserted expression");
        let id = self.alloc(Node {
            expr: copy,
            children: Vec::new(),
        });
        self.place_at(spot, id);
        self.size += 1;
        InsertOutcome::Inserted
    }

    /// Removes the stored variant of `e`, re-inserting its children into
    /// its former parent.
    pub fn remove(&mut self, src: &Arena, e: ExprRef) -> RemoveOutcome {
        let (spot, variant) = self.descend(src, e);
        let Some(id) = variant else {
            return RemoveOutcome::NotFound;
        };
        self.children_mut(spot).retain(|&c| c != id);
        let children = std::mem::take(&mut self.node_mut(id).children);
        self.slots[id] = None;
        self.free.push(id);
        self.size -= 1;
        for child in children {
            self.place_subtree(spot, child);
        }
        RemoveOutcome::Removed
    }

    /// Inserts the (already trie-owned) subtree rooted at `id` below `spot`,
    /// descending into strictly-more-general children first.
    fn place_subtree(&mut self, start: Spot, id: NodeId) {
        let mut spot = start;
        'descend: loop {
            for &child in self.children(spot) {
                let mode = self.relate_nodes(child, id);
                debug_assert!(mode != Mode::Vr, "variant nodes can never coexist");
                if mode == Mode::Sg {
                    spot = Spot::Node(child);
                    continue 'descend;
                }
            }
            break;
        }
        self.place_at(spot, id);
    }

    /// Inserts `id` into `spot`'s children at its ordered position, then
    /// detaches the strict instances of it that now anchor below it and
    /// re-places each one.
    ///
    /// A node's home is the subtree of its first (leftmost) more-general
    /// sibling at each level, so only subtrees of siblings to the right of
    /// the newcomer can hold nodes that re-anchor to it. Direct siblings
    /// are checked on both sides: a variable-collapsing instance sorts
    /// before its generalization and must still nest under it.
    fn place_at(&mut self, spot: Spot, id: NodeId) {
        let expr = self.node(id).expr;
        let children = self.children(spot);
        let pos = children.partition_point(|&c| {
            crate::order::compare_expressions(&self.arena, self.node(c).expr, &self.arena, expr)
                == Ordering::Less
        });
        self.children_mut(spot).insert(pos, id);

        let left: Vec<NodeId> = self.children(spot)[..pos].to_vec();
        let right: Vec<NodeId> = self.children(spot)[pos + 1..].to_vec();
        let mut stolen = Vec::new();
        for sibling in left {
            if self.relate_nodes(sibling, id) == Mode::Si {
                self.children_mut(spot).retain(|&c| c != sibling);
                stolen.push(sibling);
            }
        }
        for sibling in right {
            self.collect_instances(sibling, spot, id, &mut stolen);
        }
        for s in stolen {
            self.place_subtree(Spot::Node(id), s);
        }
    }

    /// Detaches from `parent`'s subtree every maximal node that is a strict
    /// instance of `of`'s expression. Subtrees unrelated to `of` (NU) are
    /// skipped: an instance below them would make them unifiable with `of`.
    fn collect_instances(&mut self, node: NodeId, parent: Spot, of: NodeId, out: &mut Vec<NodeId>) {
        match self.relate_nodes(node, of) {
            Mode::Si => {
                self.children_mut(parent).retain(|&c| c != node);
                out.push(node);
            }
            Mode::Nu => {}
            _ => {
                for child in self.node(node).children.clone() {
                    self.collect_instances(child, Spot::Node(node), of, out);
                }
            }
        }
    }

    /// Retrieves all stored expressions whose relation to `q` is accepted by
    /// `mode`, in depth-first stored order, with perfect filtering.
    pub fn retrieve(&self, src: &Arena, q: ExprRef, mode: QueryMode) -> Retrieval {
        let mut query_arena = Arena::new();
        let query = materialize(&Scope::unbound(src), q, &mut query_arena)
            .expect("cyclic bindings in query expression");
        let mut matches = Vec::new();
        let mut visited = 0usize;
        let ids: Vec<NodeId> = self.roots.clone();
        self.visit(&ids, &query_arena, query, mode, &mut matches, &mut visited);
        self.last_visits.store(visited, AtomicOrdering::Relaxed);
        Retrieval {
            matches,
            visited,
            query_arena,
            query,
        }
    }

    /// Visits a sibling list; returns false when the traversal is done
    /// (variant found for a variant query).
    #[allow(clippy::collapsible_match)]
    fn visit(
        &self,
        ids: &[NodeId],
        qa: &Arena,
        q: ExprRef,
        qmode: QueryMode,
        out: &mut Vec<Match>,
        visited: &mut usize,
    ) -> bool {
        for &id in ids {
            *visited += 1;
            let node = self.node(id);
            let u = unify(&self.arena, node.expr, qa, q);
            let push = |out: &mut Vec<Match>, u: crate::unify::Unification| {
                out.push(Match {
                    expr: node.expr,
                    mode: u.mode,
                    s_stored: u.s1,
                    s_query: u.s2,
                });
            };
            match qmode {
                QueryMode::Variant => match u.mode {
                    Mode::Vr => {
                        push(out, u);
                        // At most one stored variant exists; stop.
                        return false;
                    }
                    // A stored variant can only sit below nodes strictly
                    // more general than the query.
                    Mode::Sg => {
                        if !self.visit(&node.children, qa, q, qmode, out, visited) {
                            return false;
                        }
                    }
                    _ => {}
                },
                QueryMode::Instance => match u.mode {
                    Mode::Vr | Mode::Si => {
                        // Everything below stores instances of the query;
                        // report the subtree without further unification.
                        push(out, u);
                        self.report_subtree(&node.children, qa, q, out);
                    }
                    Mode::Sg | Mode::Ou => {
                        self.visit(&node.children, qa, q, qmode, out, visited);
                    }
                    Mode::Nu => {}
                },
                QueryMode::Generalization => match u.mode {
                    Mode::Vr => push(out, u),
                    Mode::Sg => {
                        push(out, u);
                        self.visit(&node.children, qa, q, qmode, out, visited);
                    }
                    // Children of a node that is not strictly more general
                    // than the query cannot generalize it.
                    _ => {}
                },
                QueryMode::Unifiable => match u.mode {
                    Mode::Nu => {}
                    _ => {
                        push(out, u);
                        self.visit(&node.children, qa, q, qmode, out, visited);
                    }
                },
            }
        }
        true
    }

    /// Reports a whole subtree as instance matches. The relation of each
    /// node is computed for the match record, but the nodes are not visited
    /// by the traversal: their inclusion needed no decision.
    fn report_subtree(&self, ids: &[NodeId], qa: &Arena, q: ExprRef, out: &mut Vec<Match>) {
        for &id in ids {
            let node = self.node(id);
            let u = unify(&self.arena, node.expr, qa, q);
            debug_assert!(
                matches!(u.mode, Mode::Si),
                "descendant of an instance must be a strict instance"
            );
            out.push(Match {
                expr: node.expr,
                mode: u.mode,
                s_stored: u.s1,
                s_query: u.s2,
            });
            self.report_subtree(&node.children, qa, q, out);
        }
    }

    /// Deterministic text dump: `(root)` followed by one line per node,
    /// two-space indentation per depth, children in stored order. Two tries
    /// are equal iff their dumps are equal.
    pub fn dump_text(&self) -> String {
        let mut out = String::from("(root)\n");
        fn go(t: &InstanceTrie, ids: &[NodeId], depth: usize, out: &mut String) {
            for &id in ids {
                for _ in 0..depth {
                    out.push_str("  ");
                }
                out.push_str(&t.render_expr(t.node(id).expr));
                out.push('\n');
                go(t, &t.node(id).children, depth + 1, out);
            }
        }
        go(self, &self.roots, 1, &mut out);
        out
    }

    /// GraphViz dump: one box per node labeled with the canonical rendering,
    /// edges parent -> child in order.
    pub fn dump_dot(&self) -> String {
        let mut out = String::from("digraph instance_trie {\n  node [shape=box];\n");
        out.push_str("  n0 [label=\"(root)\"];\n");
        let mut next = 1usize;
        fn go(
            t: &InstanceTrie,
            ids: &[NodeId],
            parent: usize,
            next: &mut usize,
            out: &mut String,
        ) {
            for &id in ids {
                let me = *next;
                *next += 1;
                out.push_str(&format!(
                    "  n{me} [label=\"{}\"];\n  n{parent} -> n{me};\n",
                    t.render_expr(t.node(id).expr)
                ));
                go(t, &t.node(id).children, me, next, out);
            }
        }
        go(self, &self.roots, 0, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    pub fn stats(&self) -> TrieStats {
        TrieStats {
            size: self.size,
            depth: self.depth(),
            node_visits_last_query: self.last_visits.load(AtomicOrdering::Relaxed),
        }
    }

    /// Length of the longest root-to-leaf chain (virtual root excluded).
    pub fn depth(&self) -> usize {
        fn go(t: &InstanceTrie, ids: &[NodeId]) -> usize {
            ids.iter()
                .map(|&id| 1 + go(t, &t.node(id).children))
                .max()
                .unwrap_or(0)
        }
        go(self, &self.roots)
    }

    /// All (parent, child) expression pairs, for structural checking.
    pub fn parent_child_pairs(&self) -> Vec<(ExprRef, ExprRef)> {
        let mut out = Vec::new();
        fn go(t: &InstanceTrie, ids: &[NodeId], out: &mut Vec<(ExprRef, ExprRef)>) {
            for &id in ids {
                let node = t.node(id);
                for &c in &node.children {
                    out.push((node.expr, t.node(c).expr));
                }
                go(t, &node.children, out);
            }
        }
        go(self, &self.roots, &mut out);
        out
    }

    /// Every sibling list (root children first), for structural checking.
    pub fn sibling_groups(&self) -> Vec<Vec<ExprRef>> {
        let mut out = Vec::new();
        fn go(t: &InstanceTrie, ids: &[NodeId], out: &mut Vec<Vec<ExprRef>>) {
            out.push(ids.iter().map(|&id| t.node(id).expr).collect());
            for &id in ids {
                go(t, &t.node(id).children, out);
            }
        }
        go(self, &self.roots, &mut out);
        out
    }

    /// Number of direct children of the virtual root.
    pub fn root_width(&self) -> usize {
        self.roots.len()
    }

    /// All stored expressions in depth-first order.
    pub fn exprs(&self) -> Vec<ExprRef> {
        let mut out = Vec::with_capacity(self.size);
        fn go(t: &InstanceTrie, ids: &[NodeId], out: &mut Vec<ExprRef>) {
            for &id in ids {
                out.push(t.node(id).expr);
                go(t, &t.node(id).children, out);
            }
        }
        go(self, &self.roots, &mut out);
        out
    }
}
