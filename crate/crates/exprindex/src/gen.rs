//! Deterministic pseudo-random expression generation for the corpus
//! generator and the randomized test suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::oracle::TreeExpr;

/// Shape bounds for generated expressions.
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub max_depth: u32,
    pub max_arity: u32,
    /// Number of distinct constructor names drawn from the pool.
    pub symbols: u32,
    /// Number of distinct variable ranks.
    pub variables: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_depth: 4,
            max_arity: 3,
            symbols: 8,
            variables: 5,
        }
    }
}

pub const SYMBOL_POOL: [&str; 8] = ["a", "b", "c", "d", "f", "g", "h", "p"];

fn symbol_name(rng: &mut impl Rng, p: &GenParams) -> &'static str {
    let n = (p.symbols as usize).clamp(1, SYMBOL_POOL.len());
    SYMBOL_POOL[rng.gen_range(0..n)]
}

/// A random expression within the given bounds.
pub fn random_tree(rng: &mut impl Rng, p: &GenParams) -> TreeExpr {
    gen_at(rng, p, 0)
}

fn gen_at(rng: &mut impl Rng, p: &GenParams, depth: u32) -> TreeExpr {
    let leaf_prob = 0.25 + 0.75 * (depth as f64 / p.max_depth.max(1) as f64);
    if depth >= p.max_depth || rng.gen_bool(leaf_prob) {
        if p.variables > 0 && rng.gen_bool(0.45) {
            TreeExpr::Var(rng.gen_range(0..p.variables))
        } else {
            TreeExpr::nullary(symbol_name(rng, p))
        }
    } else {
        let arity = rng.gen_range(1..=p.max_arity.max(1));
        let args = (0..arity).map(|_| gen_at(rng, p, depth + 1)).collect();
        TreeExpr::App(crate::symbol::Symbol::intern(symbol_name(rng, p)), args)
    }
}

/// A random expression in which no variable occurs twice.
pub fn random_linear_tree(rng: &mut impl Rng, p: &GenParams, next_rank: &mut u32) -> TreeExpr {
    fn go(rng: &mut impl Rng, p: &GenParams, depth: u32, next: &mut u32) -> TreeExpr {
        let leaf_prob = 0.25 + 0.75 * (depth as f64 / p.max_depth.max(1) as f64);
        if depth >= p.max_depth || rng.gen_bool(leaf_prob) {
            if rng.gen_bool(0.45) {
                let r = *next;
                *next += 1;
                TreeExpr::Var(r)
            } else {
                TreeExpr::nullary(symbol_name(rng, p))
            }
        } else {
            let arity = rng.gen_range(1..=p.max_arity.max(1));
            let args = (0..arity).map(|_| go(rng, p, depth + 1, next)).collect();
            TreeExpr::App(crate::symbol::Symbol::intern(symbol_name(rng, p)), args)
        }
    }
    go(rng, p, 0, next_rank)
}

fn ranks_of(t: &TreeExpr) -> Vec<u32> {
    fn go(t: &TreeExpr, out: &mut Vec<u32>) {
        match t {
            TreeExpr::Var(r) => {
                if !out.contains(r) {
                    out.push(*r);
                }
            }
            TreeExpr::App(_, args) => args.iter().for_each(|a| go(a, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

fn substitute(t: &TreeExpr, map: &std::collections::HashMap<u32, TreeExpr>) -> TreeExpr {
    match t {
        TreeExpr::Var(r) => map.get(r).cloned().unwrap_or_else(|| t.clone()),
        TreeExpr::App(s, args) => {
            TreeExpr::App(*s, args.iter().map(|a| substitute(a, map)).collect())
        }
    }
}

/// A random variant: consistent rank permutation.
pub fn random_variant(rng: &mut impl Rng, t: &TreeExpr) -> TreeExpr {
    let ranks = ranks_of(t);
    let mut images: Vec<u32> = (0..ranks.len() as u32).map(|i| i + 100).collect();
    for i in (1..images.len()).rev() {
        images.swap(i, rng.gen_range(0..=i));
    }
    let map = ranks
        .into_iter()
        .zip(images.into_iter().map(TreeExpr::Var))
        .collect();
    substitute(t, &map)
}

/// A random instance: each variable is kept, collapsed onto another
/// variable, or replaced by a small expression.
pub fn random_instance(rng: &mut impl Rng, p: &GenParams, t: &TreeExpr) -> TreeExpr {
    let ranks = ranks_of(t);
    let mut map = std::collections::HashMap::new();
    for &r in &ranks {
        match rng.gen_range(0..4u8) {
            0 => {}
            1 => {
                let other = ranks[rng.gen_range(0..ranks.len())];
                map.insert(r, TreeExpr::Var(other));
            }
            _ => {
                let small = GenParams {
                    max_depth: 2,
                    ..*p
                };
                map.insert(r, gen_at(rng, &small, 0));
            }
        }
    }
    substitute(t, &map)
}

/// A variable-disjoint pair drawn from strategies that exercise all five
/// relation modes.
pub fn random_pair(rng: &mut impl Rng, p: &GenParams) -> (TreeExpr, TreeExpr) {
    let (a, b) = match rng.gen_range(0..8u8) {
        // Independent: mostly non-unifiable or only-unifiable.
        0 | 1 => (random_tree(rng, p), random_tree(rng, p)),
        // Variant pair.
        2 => {
            let t = random_tree(rng, p);
            let v = random_variant(rng, &t);
            (t, v)
        }
        // Generalization on the left.
        3 => {
            let t = random_tree(rng, p);
            let i = random_instance(rng, p, &t);
            (t, i)
        }
        // Generalization on the right.
        4 => {
            let t = random_tree(rng, p);
            let i = random_instance(rng, p, &t);
            (i, t)
        }
        // Two instances of a common base: often only-unifiable.
        5 | 6 => {
            let base = random_tree(rng, p);
            (
                random_instance(rng, p, &base),
                random_instance(rng, p, &base),
            )
        }
        // Instance of an instance.
        _ => {
            let base = random_tree(rng, p);
            let i = random_instance(rng, p, &base);
            let ii = random_instance(rng, p, &i);
            (ii, i)
        }
    };
    let offset = a.max_rank().map_or(0, |r| r + 1);
    (a, b.shift_ranks(offset))
}

/// A variable-disjoint pair in which neither side repeats a variable.
pub fn random_linear_pair(rng: &mut impl Rng, p: &GenParams) -> (TreeExpr, TreeExpr) {
    let mut next = 0u32;
    let a = random_linear_tree(rng, p, &mut next);
    let b = if rng.gen_bool(0.5) {
        random_linear_tree(rng, p, &mut next)
    } else {
        // Related shape: replace variable leaves of a copy with fresh
        // linear material, keeping overall linearity.
        let ranks = ranks_of(&a);
        let mut map = std::collections::HashMap::new();
        for r in ranks {
            if rng.gen_bool(0.6) {
                let small = GenParams {
                    max_depth: 2,
                    ..*p
                };
                map.insert(r, random_linear_tree(rng, &small, &mut next));
            } else {
                let fresh = next;
                next += 1;
                map.insert(r, TreeExpr::Var(fresh));
            }
        }
        substitute(&a, &map)
    };
    (a, b)
}

/// Deterministic corpus text: one expression per line. Roughly half the
/// lines are instances of earlier lines so that generated corpora nest.
pub fn corpus_text(seed: u64, size: usize, p: &GenParams) -> String {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut lines: Vec<String> = Vec::with_capacity(size);
    let mut trees: Vec<TreeExpr> = Vec::with_capacity(size);
    for _ in 0..size {
        let t = if trees.is_empty() || rng.gen_bool(0.5) {
            random_tree(&mut rng, p)
        } else {
            let base = &trees[rng.gen_range(0..trees.len())];
            random_instance(&mut rng, p, base)
        };
        lines.push(t.canonicalize().to_string());
        trees.push(t);
    }
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Seeded RNG for query generation in `bench`-style harnesses.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Convenience used by tests that do not care about the exact stream.
pub fn test_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
