//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`). Every
//! tolerance and threshold is pinned in the assertions below.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::Rng;

use exprindex::gen::{
    random_instance, random_linear_pair, random_pair, random_tree, random_variant, rng_from_seed,
    GenParams,
};
use exprindex::oracle::{cells_of_tree, oracle_classify, tree_of_cells, TreeExpr};
use exprindex::{
    apply_destructive, parse, unify, Arena, Cell, CellTag, InstanceTrie, Mode, QueryMode,
    Scope, Substitution,
};

fn pass(criterion: u32, detail: &str) {
    println!("[acceptance] criterion {criterion} PASS - {detail}");
}

/// Criterion 1: the worked unification regression. f(X,X) against f(a,a)
/// yields SG with S1 binding the first variable cell to the first `a`
/// subexpression (cell units) and S2 empty, in under a millisecond.
#[test]
fn criterion_1_worked_unification_regression() {
    let mut a1 = Arena::new();
    let mut a2 = Arena::new();
    let e1 = parse("f(X, X)", &mut a1).unwrap();
    let e2 = parse("f(a, a)", &mut a2).unwrap();

    let mut best = Duration::MAX;
    let mut result = None;
    for _ in 0..5 {
        let t0 = Instant::now();
        let u = unify(&a1, e1, &a2, e2);
        best = best.min(t0.elapsed());
        result = Some(u);
    }
    let u = result.unwrap();

    assert_eq!(u.mode, Mode::Sg);
    let bindings: Vec<_> = u.s1.iter().collect();
    assert_eq!(bindings.len(), 1);
    assert_eq!(bindings[0].var, e1.cell(1), "first variable cell of the left side");
    assert_eq!(bindings[0].target, e2.cell(1), "first `a` subexpression of the right side");
    assert!(u.s2.is_empty());
    assert!(
        best < Duration::from_millis(1),
        "unification took {best:?}, expected < 1 ms"
    );
    pass(1, &format!("mode=SG, S1=[(1,1)] in cell units, S2=[], {best:?}"));
}

/// Criterion 2: cell layout of f(a, X, g(b), Y, Y): seven cells tagged
/// [CONS, CONS, NOVAR, CONS, CONS, NOVAR, OFVAR] with back offset 1.
#[test]
fn criterion_2_cell_layout_regression() {
    let mut arena = Arena::new();
    let e = parse("f(a, X, g(b), Y, Y)", &mut arena).unwrap();
    assert_eq!(arena.span(e), 7);
    let tags: Vec<CellTag> = (0..7).map(|i| arena.cell_type(e.cell(i))).collect();
    use CellTag::*;
    assert_eq!(tags, vec![Cons, Cons, Novar, Cons, Cons, Novar, Ofvar]);
    assert_eq!(arena.cell(e.cell(6)), Cell::Ofvar { back_offset: 1 });
    pass(2, "7-cell tag sequence with offset 1");
}

/// Criterion 3: destructive application sets only the base variable cell,
/// leaves the offset variable untouched, and renders substituted.
#[test]
fn criterion_3_destructive_application_regression() {
    let mut arena = Arena::new();
    let e = parse("f(a, X, g(b), Y, Y)", &mut arena).unwrap();
    let h = parse("h(a, Z)", &mut arena).unwrap();
    let before: Vec<Cell> = arena.cells().to_vec();

    apply_destructive(&mut arena, e.cell(5), h.head());

    for (i, (old, new)) in before.iter().zip(arena.cells()).enumerate() {
        if i == e.cell(5).index as usize {
            assert_eq!(
                *new,
                Cell::Novar {
                    binding: Some(h.head())
                },
                "base variable now holds the target address"
            );
        } else {
            assert_eq!(old, new, "cell {i} must be untouched");
        }
    }
    assert_eq!(arena.cell(e.cell(6)), Cell::Ofvar { back_offset: 1 });

    let empty = Substitution::new();
    let scope = Scope::one(&arena, &empty);
    let mut namer = exprindex::Namer::new();
    let rendered = exprindex::render_with(&scope, e, &mut namer).unwrap();
    assert_eq!(rendered, "f(a, V0, g(b), h(a, V1), h(a, V1))");
    pass(3, "only the base cell changed; render substitutes through it");
}

/// Criterion 4: mode agreement between the cell-level traversal and the
/// tree-level oracle on 100,000 randomized variable-disjoint pairs
/// (depth <= 6, arity <= 4, <= 8 symbols, <= 5 variables), zero
/// mismatches, within 60 seconds.
#[test]
fn criterion_4_mode_oracle_equivalence() {
    let params = GenParams {
        max_depth: 6,
        max_arity: 4,
        symbols: 8,
        variables: 5,
    };
    let mut rng = rng_from_seed(0xacce97);
    let t0 = Instant::now();
    let mut mode_counts = std::collections::HashMap::new();
    for round in 0..100_000u32 {
        let (ta, tb) = random_pair(&mut rng, &params);
        let mut a1 = Arena::new();
        let mut a2 = Arena::new();
        let e1 = cells_of_tree(&ta, &mut a1);
        let e2 = cells_of_tree(&tb, &mut a2);
        let got = unify(&a1, e1, &a2, e2).mode;
        let want = oracle_classify(&ta, &tb);
        assert_eq!(got, want, "round {round}: {ta} vs {tb}");
        *mode_counts.entry(got).or_insert(0u32) += 1;
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed <= Duration::from_secs(60),
        "equivalence run took {elapsed:?}"
    );
    // The generator must exercise every mode.
    for mode in [Mode::Vr, Mode::Sg, Mode::Si, Mode::Ou, Mode::Nu] {
        assert!(
            mode_counts.get(&mode).copied().unwrap_or(0) > 100,
            "generator starves mode {mode}: {mode_counts:?}"
        );
    }
    pass(
        4,
        &format!("100000 pairs, 0 mismatches in {elapsed:.1?} ({mode_counts:?})"),
    );
}

fn structured_corpus(rng: &mut impl Rng, p: &GenParams, size: usize) -> Vec<TreeExpr> {
    let mut corpus: Vec<TreeExpr> = Vec::with_capacity(size);
    for _ in 0..size {
        let t = if corpus.is_empty() || rng.gen_bool(0.5) {
            random_tree(rng, p)
        } else {
            let base = &corpus[rng.gen_range(0..corpus.len())];
            random_instance(rng, p, base)
        };
        corpus.push(t);
    }
    corpus
}

fn query_for(rng: &mut impl Rng, p: &GenParams, corpus: &[TreeExpr]) -> TreeExpr {
    if corpus.is_empty() || rng.gen_bool(0.3) {
        random_tree(rng, p)
    } else {
        let base = &corpus[rng.gen_range(0..corpus.len())];
        match rng.gen_range(0..3u8) {
            0 => random_variant(rng, base),
            1 => random_instance(rng, p, base),
            _ => random_tree(rng, p),
        }
    }
}

const ALL_MODES: [QueryMode; 4] = [
    QueryMode::Variant,
    QueryMode::Instance,
    QueryMode::Generalization,
    QueryMode::Unifiable,
];

/// Criterion 5: perfect filtering. 1,000 randomized (corpus <= 512, query)
/// trials; in each trial all four query modes must set-equal the oracle's
/// linear scan with zero mismatches and no post-processing.
#[test]
fn criterion_5_perfect_filtering() {
    let p = GenParams {
        max_depth: 3,
        max_arity: 3,
        symbols: 6,
        variables: 4,
    };
    let mut rng = rng_from_seed(0x9e4f);
    for trial in 0..1_000u32 {
        let size = if trial % 10 == 0 {
            rng.gen_range(256..=512)
        } else {
            rng.gen_range(0..=128)
        };
        let corpus = structured_corpus(&mut rng, &p, size);

        let mut arena = Arena::new();
        let mut trie = InstanceTrie::new();
        let mut dedup: Vec<TreeExpr> = Vec::new();
        for t in &corpus {
            let e = cells_of_tree(t, &mut arena);
            if trie.insert(&arena, e) == exprindex::InsertOutcome::Inserted {
                dedup.push(t.clone());
            }
        }

        let q = query_for(&mut rng, &p, &corpus);
        let mut qa = Arena::new();
        let qe = cells_of_tree(&q, &mut qa);

        // One oracle classification per stored expression serves all four
        // modes.
        let relations: Vec<Mode> = dedup.iter().map(|t| oracle_classify(t, &q)).collect();
        for mode in ALL_MODES {
            let got: HashSet<String> = trie
                .retrieve(&qa, qe, mode)
                .matches
                .iter()
                .map(|m| trie.render_expr(m.expr))
                .collect();
            let want: HashSet<String> = dedup
                .iter()
                .zip(&relations)
                .filter(|(_, &rel)| match mode {
                    QueryMode::Variant => rel == Mode::Vr,
                    QueryMode::Instance => matches!(rel, Mode::Vr | Mode::Si),
                    QueryMode::Generalization => matches!(rel, Mode::Vr | Mode::Sg),
                    QueryMode::Unifiable => rel != Mode::Nu,
                })
                .map(|(t, _)| t.canonicalize().to_string())
                .collect();
            assert_eq!(got, want, "trial {trial}, mode {mode:?}, query {q}");
        }
    }
    pass(5, "1000 trials x 4 modes set-equal the linear oracle");
}

/// Criterion 6: stability. 20 random corpora, 50 random permutations each
/// with interleaved deletions; the final dump depends only on the final
/// stored set, byte for byte.
#[test]
fn criterion_6_stability() {
    let p = GenParams {
        max_depth: 3,
        max_arity: 3,
        symbols: 5,
        variables: 3,
    };
    let mut rng = rng_from_seed(0x57ab1e);
    for corpus_no in 0..20u32 {
        let size = rng.gen_range(8..=80);
        let corpus = structured_corpus(&mut rng, &p, size);

        for perm in 0..50u32 {
            let mut order: Vec<usize> = (0..corpus.len()).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }

            let mut arena = Arena::new();
            let mut trie = InstanceTrie::new();
            // Model of what is currently stored, by corpus index class.
            let mut live: Vec<usize> = Vec::new();
            for &i in &order {
                let e = cells_of_tree(&corpus[i], &mut arena);
                trie.insert(&arena, e);
                live.push(i);
                if !live.is_empty() && rng.gen_bool(0.2) {
                    // Delete a random live expression for good.
                    let k = rng.gen_range(0..live.len());
                    let victim = live.swap_remove(k);
                    let e = cells_of_tree(&corpus[victim], &mut arena);
                    // Removing one representative removes the whole
                    // variant class; drop every live member of it.
                    trie.remove(&arena, e);
                    live.retain(|&j| {
                        oracle_classify(&corpus[j], &corpus[victim]) != Mode::Vr
                    });
                }
            }

            // Reference: fresh trie over the final live set in corpus
            // order.
            let mut ref_arena = Arena::new();
            let mut reference = InstanceTrie::new();
            let mut sorted_live = live.clone();
            sorted_live.sort();
            for &i in &sorted_live {
                let e = cells_of_tree(&corpus[i], &mut ref_arena);
                reference.insert(&ref_arena, e);
            }
            assert_eq!(
                trie.dump_text(),
                reference.dump_text(),
                "corpus {corpus_no}, permutation {perm}: shape depends on history"
            );
        }
    }
    pass(6, "20 corpora x 50 permutations with deletions: byte-identical dumps");
}

/// Criterion 7: occurs-check economy. On 10,000 random pairs where neither
/// side repeats a variable, the occurs-check counter is exactly zero.
#[test]
fn criterion_7_occurs_check_economy() {
    let p = GenParams {
        max_depth: 5,
        max_arity: 4,
        symbols: 8,
        variables: 5,
    };
    let mut rng = rng_from_seed(0x0cc5);
    let mut total_checks = 0usize;
    for _ in 0..10_000u32 {
        let (ta, tb) = random_linear_pair(&mut rng, &p);
        let mut a1 = Arena::new();
        let mut a2 = Arena::new();
        let e1 = cells_of_tree(&ta, &mut a1);
        let e2 = cells_of_tree(&tb, &mut a2);
        total_checks += unify(&a1, e1, &a2, e2).occurs_checks;
    }
    assert_eq!(total_checks, 0, "occurs checks on variable-linear pairs");
    pass(7, "10000 linear pairs, 0 occurs checks");
}

/// Criterion 8: pruning effectiveness. On a generated corpus of 10,000
/// expressions, generalization and variant queries visit strictly fewer
/// nodes than the corpus holds in at least 95% of 1,000 queries, and the
/// whole run finishes within 60 seconds. The check uses the stored
/// (deduplicated) size as the bound, which is the stricter reading.
#[test]
fn criterion_8_pruning_effectiveness() {
    let t0 = Instant::now();
    let p = GenParams::default();
    let corpus_text = exprindex::gen::corpus_text(0xbe7c, 10_000, &p);

    let mut arena = Arena::new();
    let mut trie = InstanceTrie::new();
    let mut trees = Vec::new();
    for line in corpus_text.lines() {
        let e = parse(line, &mut arena).unwrap();
        trie.insert(&arena, e);
        trees.push(tree_of_cells(&arena, e));
    }
    let stored = trie.len();
    assert!(stored > 1_000, "degenerate corpus: {stored} stored");

    let mut rng = rng_from_seed(0x8e8e);
    let mut below = [0u32; 2];
    let total = 1_000u32;
    for _ in 0..total {
        let q = query_for(&mut rng, &p, &trees);
        let mut qa = Arena::new();
        let qe = cells_of_tree(&q, &mut qa);
        for (slot, mode) in [QueryMode::Generalization, QueryMode::Variant]
            .into_iter()
            .enumerate()
        {
            let r = trie.retrieve(&qa, qe, mode);
            if r.visited < stored {
                below[slot] += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    for (slot, name) in ["generalization", "variant"].iter().enumerate() {
        let pct = below[slot] as f64 / total as f64 * 100.0;
        assert!(
            pct >= 95.0,
            "{name} queries below stored size in only {pct:.1}% of runs"
        );
    }
    assert!(
        elapsed <= Duration::from_secs(60),
        "pruning benchmark took {elapsed:?}"
    );
    pass(
        8,
        &format!(
            "stored {stored}: {:.1}% / {:.1}% of queries visit fewer nodes, {elapsed:.1?}",
            below[0] as f64 / 10.0,
            below[1] as f64 / 10.0
        ),
    );
}

/// Criterion 9: structural invariant sweep. Over a 10,000-step random
/// insert/remove fuzz, after every operation each parent-child pair
/// classifies as strictly-more-general/strict-instance under the oracle
/// and every sibling sequence is strictly increasing; zero violations.
#[test]
fn criterion_9_structural_invariant_sweep() {
    let p = GenParams {
        max_depth: 3,
        max_arity: 2,
        symbols: 4,
        variables: 3,
    };
    let mut rng = rng_from_seed(0x57f2);
    let pool = structured_corpus(&mut rng, &p, 192);

    let mut arena = Arena::new();
    let mut trie = InstanceTrie::new();
    for step in 0..10_000u32 {
        let t = &pool[rng.gen_range(0..pool.len())];
        let e = cells_of_tree(t, &mut arena);
        if rng.gen_bool(0.6) {
            trie.insert(&arena, e);
        } else {
            trie.remove(&arena, e);
        }

        for (parent, child) in trie.parent_child_pairs() {
            let pt = tree_of_cells(trie.arena(), parent);
            let ct = tree_of_cells(trie.arena(), child);
            assert_eq!(
                oracle_classify(&pt, &ct),
                Mode::Sg,
                "step {step}: parent {pt} / child {ct}"
            );
        }
        for group in trie.sibling_groups() {
            for pair in group.windows(2) {
                assert_eq!(
                    exprindex::compare_expressions(
                        trie.arena(),
                        pair[0],
                        trie.arena(),
                        pair[1]
                    ),
                    std::cmp::Ordering::Less,
                    "step {step}: sibling order violated"
                );
            }
        }
    }
    pass(9, "10000 fuzz steps, full sweep after every operation, 0 violations");
}
