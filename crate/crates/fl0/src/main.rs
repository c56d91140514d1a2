use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fl0::parser::{parse_solution, render_concept, render_substitution};
use fl0::subst::apply;
use fl0::symbol::NameKind;
use fl0::testkit::{oracle_search, OracleVerdict};
use fl0::{
    flatten, Axiom, InputFormat, ProblemSource, SolveOptions, Verdict,
};

#[derive(Parser)]
#[command(name = "fl0", version, about = "Decides unifiability of FL0 concept subsumptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
enum FormatArg {
    /// Pick by file extension, falling back to flu.
    #[default]
    Auto,
    /// S-expression problem syntax.
    Flu,
    /// Functional-style ontology subset.
    Ofn,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
enum LogLevelArg {
    #[default]
    Info,
    /// Per-choice tracing on standard error.
    Fine,
}

#[derive(Subcommand)]
enum Command {
    /// Decide unifiability and print a unifier if there is one.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: FormatArg,
        /// Print counters after the verdict.
        #[arg(long)]
        stats: bool,
        #[arg(long, value_enum, default_value_t)]
        log_level: LogLevelArg,
        /// Also write the solution to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include generated helper variables in the printed solution.
        #[arg(long)]
        show_system_vars: bool,
        /// Process the problem's constants concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Check a solution file against a problem.
    Verify {
        problem: PathBuf,
        solution: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: FormatArg,
    },
    /// Print an intermediate form of the problem.
    Dump {
        problem: PathBuf,
        /// `model`, or `generic:<CONSTANT>`.
        #[arg(long)]
        stage: String,
        #[arg(long, value_enum, default_value_t)]
        format: FormatArg,
    },
    /// Brute-force search for a unifier within a depth bound.
    Oracle {
        problem: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

fn load(path: &Path, format: FormatArg) -> Result<ProblemSource, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let format = match format {
        FormatArg::Flu => InputFormat::Flu,
        FormatArg::Ofn => InputFormat::Ofn,
        FormatArg::Auto => InputFormat::from_path(path).unwrap_or(InputFormat::Flu),
    };
    ProblemSource::parse(&text, format)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn input_error(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn cmd_solve(
    problem: &Path,
    format: FormatArg,
    stats: bool,
    output: Option<&Path>,
    show_system_vars: bool,
    parallel: bool,
) -> ExitCode {
    let src = match load(problem, format) {
        Ok(src) => src,
        Err(e) => return input_error(e),
    };
    let result = match fl0::solve(&src, &SolveOptions { parallel }) {
        Ok(result) => result,
        Err(fl0::solve::SolveError::Capacity(e)) => return input_error(e.to_string()),
        Err(e @ fl0::solve::SolveError::Verification(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let table = &result.table;
    let status = match &result.verdict {
        Verdict::Unifiable(sigma) => {
            println!("unifiable");
            let mut user = sigma.clone();
            user.retain(|v| table.kind(v) == NameKind::UserVariable);
            let shown = if show_system_vars { sigma } else { &user };
            print!("{}", render_substitution(shown, table));
            if let Some(path) = output {
                // helper variables would not re-parse; the user projection
                // alone already unifies the input axioms
                let rendered = render_substitution(&user, table);
                if let Err(e) = fs::write(path, rendered) {
                    return input_error(format!("cannot write {}: {e}", path.display()));
                }
            }
            ExitCode::SUCCESS
        }
        Verdict::NotUnifiable => {
            println!("not unifiable");
            ExitCode::from(1)
        }
    };
    if stats {
        let s = &result.stats;
        println!("max variables: {}", s.max_variables);
        println!("preprocessing decided: {}", s.preprocessing_decided);
        println!("shortcut phases: {}", s.shortcut_phases);
        println!("constants processed: {}", s.constants_processed);
        println!("time: {} ms", s.elapsed_ms);
    }
    status
}

fn cmd_verify(problem: &Path, solution: &Path, format: FormatArg) -> ExitCode {
    let mut src = match load(problem, format) {
        Ok(src) => src,
        Err(e) => return input_error(e),
    };
    let text = match fs::read_to_string(solution) {
        Ok(text) => text,
        Err(e) => return input_error(format!("cannot read {}: {e}", solution.display())),
    };
    let sigma = match parse_solution(&text, &mut src.table) {
        Ok(sigma) => sigma,
        Err(e) => return input_error(format!("{}: {e}", solution.display())),
    };
    let ok = src.axioms.iter().all(|ax| {
        let (l, r) = ax.sides();
        let la = apply(&sigma, &l.normalize(), &src.table);
        let ra = apply(&sigma, &r.normalize(), &src.table);
        match ax {
            Axiom::Subsumption(..) => la.subsumes(&ra),
            Axiom::Equivalence(..) => la == ra,
        }
    });
    if ok {
        println!("solution unifies the problem");
        ExitCode::SUCCESS
    } else {
        println!("solution does not unify the problem");
        ExitCode::from(1)
    }
}

fn cmd_dump(problem: &Path, stage: &str, format: FormatArg) -> ExitCode {
    let mut src = match load(problem, format) {
        Ok(src) => src,
        Err(e) => return input_error(e),
    };
    let model = flatten::flatten_problem(&src.axioms, &mut src.table);
    let table = &src.table;
    match stage {
        "model" => {
            for (l, r) in &model.subsumptions {
                println!("(sub {} {})", render_concept(l, table), render_concept(r, table));
            }
            for (l, r) in &model.equivalences {
                println!("(equiv {} {})", render_concept(l, table), render_concept(r, table));
            }
            for (name, body) in &model.definitions {
                println!("(equiv {} {})", table.name_text(*name), render_concept(body, table));
            }
            ExitCode::SUCCESS
        }
        _ => {
            let Some(text) = stage.strip_prefix("generic:") else {
                return input_error(format!("unknown stage `{stage}`"));
            };
            let Some(constant) = table.lookup_concept(text) else {
                return input_error(format!("`{text}` does not occur in the problem"));
            };
            if !model.constants.contains(&constant) {
                return input_error(format!("`{text}` is not a constant of the problem"));
            }
            let goal = flatten::build_generic_goal(&model, constant, &mut src.table);
            let table = &src.table;
            for flat in &goal.flats {
                let lhs = if flat.lhs.is_empty() {
                    "top".to_string()
                } else if flat.lhs.len() == 1 {
                    table.name_text(*flat.lhs.iter().next().unwrap()).to_string()
                } else {
                    let parts: Vec<&str> =
                        flat.lhs.iter().map(|&n| table.name_text(n)).collect();
                    format!("(and {})", parts.join(" "))
                };
                println!("(sub {} {})", lhs, table.name_text(flat.rhs));
            }
            for inc in &goal.increasing {
                println!(
                    "(sub {} (all {} {}))",
                    table.name_text(inc.parent),
                    table.role_text(inc.role),
                    table.name_text(inc.child)
                );
            }
            ExitCode::SUCCESS
        }
    }
}

fn cmd_oracle(problem: &Path, depth: usize) -> ExitCode {
    let src = match load(problem, FormatArg::Auto) {
        Ok(src) => src,
        Err(e) => return input_error(e),
    };
    match oracle_search(&src, depth) {
        Ok(OracleVerdict::Found(sigma)) => {
            println!("found");
            print!("{}", render_substitution(&sigma, &src.table));
            ExitCode::SUCCESS
        }
        Ok(OracleVerdict::NotFoundWithinBound) => {
            println!("not found within depth {depth}");
            ExitCode::from(1)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let log_level = match &cli.command {
        Command::Solve { log_level: LogLevelArg::Fine, .. } => log::LevelFilter::Debug,
        _ => log::LevelFilter::Info,
    };
    env_logger::Builder::new().filter_level(log_level).format_timestamp(None).init();
    match cli.command {
        Command::Solve { problem, format, stats, output, show_system_vars, parallel, .. } => {
            cmd_solve(&problem, format, stats, output.as_deref(), show_system_vars, parallel)
        }
        Command::Verify { problem, solution, format } => cmd_verify(&problem, &solution, format),
        Command::Dump { problem, stage, format } => cmd_dump(&problem, &stage, format),
        Command::Oracle { problem, depth } => cmd_oracle(&problem, depth),
    }
}
