use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use taxlog_core::{lint, parse_query, KnowledgeBase, Literal, SolveLimits, Solver};
use taxlog_sara::case::{is_case_file, parse_case, parse_fact_file, Split, Task};
use taxlog_sara::eval::{evaluate, Predictor, CONSTANT_BASELINE};
use taxlog_sara::loader::{data_root, load_dataset};
use taxlog_sara::query::build_query;
use taxlog_sara::{audit, kb, schedule, slots, stats, statute_tree};

#[derive(Parser)]
#[command(name = "taxlog", version, about = "Statutory reasoning over tax cases")]
struct Cli {
    /// Dataset root; defaults to $SARA_ROOT.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Accepted and ignored: every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Inference step budget per query.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    max_steps: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every answer to a goal over the statutes plus a fact file.
    Query { facts: PathBuf, goal: String },
    /// Exit 0 if the goal (or the case's own query) is provable, 1 if not.
    Prove { file: PathBuf, goal: Option<String> },
    /// Score a predictor on one split and task.
    Eval {
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long, value_enum)]
        split: SplitArg,
        #[arg(long, value_enum, default_value = "solver")]
        predictor: PredictorArg,
        /// Answer of the constant predictor.
        #[arg(long, default_value_t = CONSTANT_BASELINE)]
        constant: i64,
        /// Also write one JSON record per case here.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the resolution steps behind the first answer.
    Trace { file: PathBuf, goal: Option<String> },
    /// Corpus statistics.
    Stats {
        #[arg(long)]
        json: bool,
    },
    /// Check the KB: stratification, undefined predicates, schedules, cross-references,
    /// and with a dataset, subsection coverage and the fact vocabulary.
    Lint,
    /// Print the slot reference table.
    Slots {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Entailment,
    Numerical,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorArg {
    Solver,
    Majority,
    Constant,
}

/// Write to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn limits(cli: &Cli) -> SolveLimits {
    SolveLimits { max_steps: cli.max_steps, ..SolveLimits::default() }
}

/// Statutes plus the clauses of `file`, and the query the file implies if it is a case.
fn load_world(file: &Path) -> Result<(KnowledgeBase, Option<Vec<Literal>>)> {
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let mut kb = kb::statute_kb()?;
    let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if is_case_file(&text) {
        let case = parse_case(&name, &text, Split::Test)?;
        kb.add_clauses(case.facts.iter().cloned())?;
        Ok((kb, Some(build_query(&case)?)))
    } else {
        kb.add_clauses(parse_fact_file(&file.display().to_string(), &text)?)?;
        Ok((kb, None))
    }
}

fn goal_for(file: &Path, goal: Option<&str>) -> Result<(KnowledgeBase, Vec<Literal>)> {
    let (kb, implied) = load_world(file)?;
    let query = match (goal, implied) {
        (Some(g), _) => parse_query(g)?,
        (None, Some(q)) => q,
        (None, None) => bail!("{} is not a case file; give a goal", file.display()),
    };
    Ok((kb, query))
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let lim = limits(cli);
    match &cli.command {
        Command::Query { facts, goal } => {
            let (kb, query) = goal_for(facts, Some(goal))?;
            let mut n = 0;
            for sol in Solver::new(&kb, &query, lim) {
                let sol = sol?;
                n += 1;
                if sol.bindings.is_empty() {
                    println!("true.");
                } else {
                    println!("{}", sol.bindings);
                }
            }
            if n == 0 {
                println!("false.");
            }
            Ok(if n > 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Prove { file, goal } => {
            let (kb, query) = goal_for(file, goal.as_deref())?;
            let first = Solver::new(&kb, &query, SolveLimits { max_solutions: Some(1), ..lim }).next().transpose()?;
            let q = query.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            match first {
                Some(sol) => {
                    println!("provable: {q} {}", sol.bindings);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not provable: {q}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Trace { file, goal } => {
            let (kb, query) = goal_for(file, goal.as_deref())?;
            let mut solver = Solver::traced(&kb, &query, SolveLimits { max_solutions: Some(1), ..lim });
            let first = solver.next().transpose()?;
            for step in solver.trace() {
                println!("{}{}  [{}]", "  ".repeat(step.depth), step.goal, step.via);
            }
            match first {
                Some(sol) => {
                    println!("answer: {}", sol.bindings);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("no answer");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Eval { task, split, predictor, constant, jsonl, threads } => {
            let ds = load_dataset(&data_root(cli.data.as_deref())?)?;
            let task = match task {
                TaskArg::Entailment => Task::Entailment,
                TaskArg::Numerical => Task::Numerical,
            };
            let split = match split {
                SplitArg::Train => Split::Train,
                SplitArg::Test => Split::Test,
            };
            let predictor = match predictor {
                PredictorArg::Solver => Predictor::Solver,
                PredictorArg::Majority => Predictor::Majority,
                PredictorArg::Constant => Predictor::Constant(taxlog_core::Number::Int((*constant).into())),
            };
            let statutes = kb::statute_kb()?;
            let report = evaluate(&ds, &statutes, &predictor, split, task, *threads)?;
            out(&report.to_string());
            if let Some(path) = jsonl {
                std::fs::write(path, report.jsonl()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(if report.all_correct() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Stats { json } => {
            let ds = load_dataset(&data_root(cli.data.as_deref())?)?;
            let s = stats::corpus_stats(&ds);
            if *json {
                out(&(serde_json::to_string_pretty(&s)? + "\n"));
            } else {
                out(&s.to_string());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Slots { json } => {
            let table = slots::shipped();
            if *json {
                out(&(serde_json::to_string_pretty(table)? + "\n"));
            } else {
                out(&table.to_string());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lint => lint_command(cli),
    }
}

fn lint_command(cli: &Cli) -> Result<ExitCode> {
    let kb = kb::statute_kb()?;
    let mut ok = true;
    let report = lint(&kb);
    println!("predicates {}  clauses {}", kb.predicates().count(), kb.len());
    println!("encoded subsections {}", audit::encoded_subsections(&kb).len());
    if report.undefined.is_empty() {
        println!("undefined predicates: none");
    }
    for (key, sites) in &report.undefined {
        ok = false;
        let at: Vec<String> = sites.iter().map(|s| s.as_ref().map_or("?".into(), ToString::to_string)).collect();
        println!("undefined {key} at {}", at.join(", "));
    }
    if report.negative_cycles.is_empty() {
        println!("negative cycles: none");
    }
    for cycle in &report.negative_cycles {
        ok = false;
        println!("negative cycle: {}", cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> "));
    }
    for table in schedule::BracketSchedule::section1(&kb)? {
        match table.check() {
            Ok(()) => println!("schedule {}: continuous and monotone", table.table),
            Err(e) => {
                ok = false;
                println!("schedule {}: {e}", table.table);
            }
        }
    }
    let refs = audit::cross_references(&kb, slots::shipped());
    ok &= refs.unresolved.is_empty();
    print!("{refs}");

    // Dataset checks only run when a dataset is given.
    if let Ok(root) = data_root(cli.data.as_deref()) {
        let ds = load_dataset(&root)?;
        let nodes = statute_tree::parse_all(&ds.statutes);
        let cov = audit::coverage(&nodes, &kb);
        ok &= cov.complete();
        print!("{cov}");
        let cases: Vec<_> = ds.cases.iter().collect();
        let vocab = audit::vocabulary(&cases, &kb);
        ok &= vocab.undeclared.is_empty();
        print!("{vocab}");
    } else {
        println!("coverage: no dataset given");
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let causes: Vec<String> = e.chain().skip(1).map(ToString::to_string).collect();
            eprintln!("{}", json!({ "error": e.to_string(), "causes": causes }));
            ExitCode::from(2)
        }
    }
}
