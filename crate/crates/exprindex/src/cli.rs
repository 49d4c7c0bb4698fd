//! The `exprindex` command-line front end.
//!
//! Subcommands: `parse`, `unify`, `query`, `dump`, `bench`, `gen`.
//! Exit codes: 0 success, 1 I/O error, 2 expression syntax error,
//! 3 correctness assertion failure (bench found a trie/baseline mismatch).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arena::{Arena, Cell, ExprRef};
use crate::gen::{corpus_text, GenParams};
use crate::oracle::{oracle_retrieve, tree_of_cells, TreeExpr};
use crate::parse::{parse, ParseError};
use crate::render::{render_substitution, Namer};
use crate::subst::Scope;
use crate::trie::{InstanceTrie, QueryMode};
use crate::unify::unify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser)]
#[command(
    name = "exprindex",
    about = "Store, unify, and index first-order expressions in instance tries",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModeArg {
    Variant,
    Instance,
    Generalization,
    Unifiable,
}

impl From<ModeArg> for QueryMode {
    fn from(m: ModeArg) -> QueryMode {
        match m {
            ModeArg::Variant => QueryMode::Variant,
            ModeArg::Instance => QueryMode::Instance,
            ModeArg::Generalization => QueryMode::Generalization,
            ModeArg::Unifiable => QueryMode::Unifiable,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum BaselineArg {
    /// Linear scan classifying every stored expression.
    Linear,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the cell table of an expression and its canonical rendering.
    Parse { expr: String },
    /// Classify a pair of expressions and print both substitutions.
    Unify { e1: String, e2: String },
    /// Build a trie from a corpus file and run one query against it.
    Query {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        query: String,
    },
    /// Print the trie built from a corpus file.
    Dump {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Run every query in all four modes against the trie and the linear
    /// baseline, asserting equal results.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_enum, default_value_t = BaselineArg::Linear)]
        baseline: BaselineArg,
        /// Emit machine-readable key=value lines instead of the table.
        #[arg(long)]
        machine: bool,
    },
    /// Write a deterministic pseudo-random corpus.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
        #[arg(long, default_value_t = 3)]
        max_arity: u32,
        #[arg(long, default_value_t = 8)]
        symbols: u32,
        #[arg(long, default_value_t = 5)]
        variables: u32,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI and returns the process exit code. Output goes to the given
/// writers so tests can capture it.
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let mut argv = vec!["exprindex".to_string()];
    argv.extend_from_slice(args);
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_PARSE;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", e.message);
            e.code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn parse(context: &str, e: ParseError) -> CliError {
        CliError {
            code: EXIT_PARSE,
            message: format!("{context}: {e}"),
        }
    }
}

fn dispatch<O: Write>(cmd: Cmd, out: &mut O) -> Result<i32, CliError> {
    match cmd {
        Cmd::Parse { expr } => cmd_parse(&expr, out),
        Cmd::Unify { e1, e2 } => cmd_unify(&e1, &e2, out),
        Cmd::Query {
            corpus,
            mode,
            query,
        } => cmd_query(&corpus, mode.into(), &query, out),
        Cmd::Dump { corpus, format } => cmd_dump(&corpus, format, out),
        Cmd::Bench {
            corpus,
            queries,
            baseline,
            machine,
        } => cmd_bench(&corpus, &queries, baseline, machine, out),
        Cmd::Gen {
            seed,
            size,
            max_depth,
            max_arity,
            symbols,
            variables,
            out: out_path,
        } => {
            let params = GenParams {
                max_depth,
                max_arity,
                symbols,
                variables,
            };
            cmd_gen(seed, size, &params, out_path.as_deref(), out)
        }
    }
}

fn say<O: Write>(out: &mut O, line: std::fmt::Arguments<'_>) {
    // Writing to a closed pipe is not worth failing over.
    let _ = writeln!(out, "{line}");
}

fn cmd_parse<O: Write>(text: &str, out: &mut O) -> Result<i32, CliError> {
    let mut arena = Arena::new();
    let e = parse(text, &mut arena).map_err(|e| CliError::parse("argument", e))?;
    say(out, format_args!("{:>4}  {:<6} payload", "idx", "tag"));
    for i in 0..arena.span(e) as u32 {
        let cell = arena.cell(e.cell(i));
        let payload = match cell {
            Cell::Cons { symbol, arity } => format!("{symbol}/{arity}"),
            Cell::Novar { binding: None } => "nil".to_string(),
            Cell::Novar {
                binding: Some(target),
            } => format!("-> {}", target.index),
            Cell::Ofvar { back_offset } => back_offset.to_string(),
        };
        say(out, format_args!("{i:>4}  {:<6} {payload}", cell.tag()));
    }
    say(out, format_args!(""));
    say(out, format_args!("{}", crate::render::render(&arena, e)));
    Ok(EXIT_OK)
}

fn cmd_unify<O: Write>(t1: &str, t2: &str, out: &mut O) -> Result<i32, CliError> {
    let mut a1 = Arena::new();
    let mut a2 = Arena::new();
    let e1 = parse(t1, &mut a1).map_err(|e| CliError::parse("first expression", e))?;
    let e2 = parse(t2, &mut a2).map_err(|e| CliError::parse("second expression", e))?;
    let u = unify(&a1, e1, &a2, e2);

    say(out, format_args!("mode={}", u.mode));
    // Shared namer: left expression's variables first, then the right's.
    let mut namer = Namer::new();
    namer.seed_from(&a1, e1);
    namer.seed_from(&a2, e2);
    let scope = Scope::pair(&a1, &u.s1, &a2, &u.s2);
    let s1 = render_substitution(&scope, &u.s1, &mut namer)
        .expect("unification substitutions are acyclic");
    let s2 = render_substitution(&scope, &u.s2, &mut namer)
        .expect("unification substitutions are acyclic");
    say(out, format_args!("S1={s1}"));
    say(out, format_args!("S2={s2}"));
    Ok(EXIT_OK)
}

/// A corpus file: UTF-8, one expression per line, `#` starts a comment,
/// blank lines ignored.
fn load_corpus(path: &Path) -> Result<(Arena, Vec<ExprRef>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut arena = Arena::new();
    let mut exprs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let e = parse(line, &mut arena)
            .map_err(|e| CliError::parse(&format!("{}:{}", path.display(), no + 1), e))?;
        exprs.push(e);
    }
    Ok((arena, exprs))
}

fn build_trie(arena: &Arena, exprs: &[ExprRef]) -> InstanceTrie {
    let mut trie = InstanceTrie::new();
    for &e in exprs {
        trie.insert(arena, e);
    }
    trie
}

fn cmd_query<O: Write>(
    corpus: &Path,
    mode: QueryMode,
    query: &str,
    out: &mut O,
) -> Result<i32, CliError> {
    let (arena, exprs) = load_corpus(corpus)?;
    let trie = build_trie(&arena, &exprs);
    let mut qa = Arena::new();
    let q = parse(query, &mut qa).map_err(|e| CliError::parse("query", e))?;
    let r = trie.retrieve(&qa, q, mode);
    for m in &r.matches {
        say(
            out,
            format_args!("{}  {}", trie.render_expr(m.expr), m.mode),
        );
    }
    say(
        out,
        format_args!("visited={} of {}", r.visited, trie.len()),
    );
    Ok(EXIT_OK)
}

fn cmd_dump<O: Write>(corpus: &Path, format: FormatArg, out: &mut O) -> Result<i32, CliError> {
    let (arena, exprs) = load_corpus(corpus)?;
    let trie = build_trie(&arena, &exprs);
    let dump = match format {
        FormatArg::Text => trie.dump_text(),
        FormatArg::Dot => trie.dump_dot(),
    };
    let _ = write!(out, "{dump}");
    Ok(EXIT_OK)
}

const BENCH_MODES: [(QueryMode, &str); 4] = [
    (QueryMode::Variant, "variant"),
    (QueryMode::Instance, "instance"),
    (QueryMode::Generalization, "generalization"),
    (QueryMode::Unifiable, "unifiable"),
];

fn cmd_bench<O: Write>(
    corpus_path: &Path,
    queries_path: &Path,
    _baseline: BaselineArg,
    machine: bool,
    out: &mut O,
) -> Result<i32, CliError> {
    let (arena, exprs) = load_corpus(corpus_path)?;
    let (qarena, queries) = load_corpus(queries_path)?;
    let trie = build_trie(&arena, &exprs);

    // Tree-level view of the stored set for the linear baseline; the trie
    // has already collapsed variants, and the baseline classifies each
    // entry independently.
    let stored: Vec<TreeExpr> = trie
        .exprs()
        .iter()
        .map(|&e| tree_of_cells(trie.arena(), e))
        .collect();

    let mut report = String::new();
    let mut total_trie = 0.0f64;
    let mut total_linear = 0.0f64;
    if !machine {
        let _ = writeln!(
            report,
            "corpus: {} expressions ({} stored), queries: {}",
            exprs.len(),
            trie.len(),
            queries.len()
        );
        let _ = writeln!(
            report,
            "{:<16} {:>9} {:>12} {:>12} {:>12}",
            "mode", "results", "visits", "trie_ms", "linear_ms"
        );
    } else {
        let _ = writeln!(
            report,
            "corpus={} stored={} queries={}",
            exprs.len(),
            trie.len(),
            queries.len()
        );
    }

    for (mode, name) in BENCH_MODES {
        let mut results = 0usize;
        let mut visits = 0usize;

        let t0 = Instant::now();
        let mut trie_sets: Vec<Vec<String>> = Vec::with_capacity(queries.len());
        for &q in &queries {
            let r = trie.retrieve(&qarena, q, mode);
            visits += r.visited;
            results += r.matches.len();
            trie_sets.push(r.matches.iter().map(|m| trie.render_expr(m.expr)).collect());
        }
        let trie_ms = t0.elapsed().as_secs_f64() * 1e3;

        let t0 = Instant::now();
        let mut baseline_sets: Vec<Vec<String>> = Vec::with_capacity(queries.len());
        for &q in &queries {
            let qt = tree_of_cells(&qarena, q);
            let hits = oracle_retrieve(&stored, &qt, mode);
            baseline_sets.push(
                hits.into_iter()
                    .map(|i| stored[i].canonicalize().to_string())
                    .collect(),
            );
        }
        let linear_ms = t0.elapsed().as_secs_f64() * 1e3;

        check_result_sets(&trie_sets, &baseline_sets, name)?;

        total_trie += trie_ms;
        total_linear += linear_ms;
        if machine {
            let _ = writeln!(
                report,
                "mode={name} results={results} visits={visits} trie_ms={trie_ms:.3} linear_ms={linear_ms:.3}"
            );
        } else {
            let _ = writeln!(
                report,
                "{name:<16} {results:>9} {visits:>12} {trie_ms:>12.3} {linear_ms:>12.3}"
            );
        }
    }

    let queries_n = queries.len().max(1) as f64;
    if machine {
        let _ = writeln!(
            report,
            "total_trie_ms={total_trie:.3} total_linear_ms={total_linear:.3} mean_trie_ms={:.4} mean_linear_ms={:.4} ok=1",
            total_trie / queries_n / 4.0,
            total_linear / queries_n / 4.0
        );
    } else {
        let _ = writeln!(
            report,
            "total: trie {total_trie:.3} ms, linear {total_linear:.3} ms; per query mean: trie {:.4} ms, linear {:.4} ms",
            total_trie / queries_n / 4.0,
            total_linear / queries_n / 4.0
        );
        let _ = writeln!(report, "result sets identical: yes");
    }
    let _ = write!(out, "{report}");
    Ok(EXIT_OK)
}

/// Perfect-filter assertion: the trie's answer set must equal the
/// baseline's for every query.
fn check_result_sets(
    trie_sets: &[Vec<String>],
    baseline_sets: &[Vec<String>],
    mode_name: &str,
) -> Result<(), CliError> {
    for (i, (ts, bs)) in trie_sets.iter().zip(baseline_sets).enumerate() {
        let mut ts = ts.clone();
        let mut bs = bs.clone();
        ts.sort();
        bs.sort();
        if ts != bs {
            return Err(CliError {
                code: EXIT_MISMATCH,
                message: format!(
                    "result mismatch for query #{i} in mode {mode_name}: trie {ts:?} vs baseline {bs:?}"
                ),
            });
        }
    }
    Ok(())
}

fn cmd_gen<O: Write>(
    seed: u64,
    size: usize,
    params: &GenParams,
    path: Option<&Path>,
    out: &mut O,
) -> Result<i32, CliError> {
    let text = corpus_text(seed, size, params);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e))?,
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_mismatch_maps_to_exit_3() {
        let trie = vec![vec!["f(a)".to_string()]];
        let base = vec![vec!["f(a)".to_string(), "f(b)".to_string()]];
        let err = check_result_sets(&trie, &base, "variant").unwrap_err();
        assert_eq!(err.code, EXIT_MISMATCH);
        assert!(err.message.contains("mismatch"));

        assert!(check_result_sets(&trie, &trie.clone(), "variant").is_ok());
        // Order within a result set does not matter.
        let shuffled = vec![vec!["f(b)".to_string(), "f(a)".to_string()]];
        assert!(check_result_sets(&base, &shuffled, "variant").is_ok());
    }
}
