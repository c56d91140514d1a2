//! End-to-end decision procedure for unifiability.
//!
//! One constant at a time: flatten, build the per-constant goal, fix and
//! enumerate choices, run the rule solver, fall back to the shortcut
//! search.  A problem is unifiable exactly when every occurring constant
//! admits a unifier; the per-constant unifiers merge by union.  Every
//! unifier this module returns has been re-checked against the goal it
//! solves — a verification failure is reported as an error, never as a
//! "not unifiable" verdict.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::choice::{fix_choices, is_consistent};
use crate::concept::Concept;
use crate::flatten::{build_generic_goal, flatten_problem, FlatModel};
use crate::implicit::{build_goal, run as run_rules, Outcome};
use crate::parser::ProblemSource;
use crate::shortcuts::{self, CapacityExceeded, ComputeOutcome};
use crate::subst::{verify_unifier, GoalSubsumption, Substitution};
use crate::symbol::{ConceptName, SymbolTable};

#[derive(Clone, Copy, Default, Debug)]
pub struct SolveOptions {
    /// Hand constants to worker threads.  Verdict, unifier, and statistics
    /// are identical to the sequential run; only wall time changes.
    pub parallel: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// Unifiable, witnessed by a merged unifier over the problem's
    /// variables (unmapped variables read as ⊤).
    Unifiable(Substitution),
    NotUnifiable,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct Statistics {
    /// Largest variable registry among the per-constant goals.
    pub max_variables: usize,
    /// Goals settled by the rule solver: solved, refuted, or residual
    /// without start variables.
    pub preprocessing_decided: u64,
    /// Residual goals handed to the shortcut search.
    pub shortcut_phases: u64,
    /// Constants examined before the verdict was reached.
    pub constants_processed: usize,
    /// Wall-clock time of the whole run.
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: Statistics,
    /// The input's symbol table extended with the helper variables the
    /// solution may mention; render substitutions against this one.
    pub table: SymbolTable,
}

#[derive(Clone, Debug, Error)]
pub enum SolveError {
    /// A unifier the solver constructed failed its own re-check.  This is
    /// a bug in the solver, surfaced instead of misreported.
    #[error("internal check failed: a computed unifier does not satisfy {0}")]
    Verification(String),
    #[error(transparent)]
    Capacity(#[from] CapacityExceeded),
}

struct ConstantOutcome {
    /// `None`: this constant admits no unifier.
    unifier: Option<Substitution>,
    decided: u64,
    phases: u64,
    registry_size: usize,
}

fn check(
    obligations: &[GoalSubsumption],
    sigma: &Substitution,
    table: &SymbolTable,
    what: &str,
) -> Result<(), SolveError> {
    if verify_unifier(obligations, sigma, table) {
        Ok(())
    } else {
        Err(SolveError::Verification(what.to_string()))
    }
}

/// Drop helper variables minted after flattening; the merged unifier only
/// speaks about names of the flattened problem.
fn restrict_to_base(mut sigma: Substitution, base: usize) -> Substitution {
    sigma.retain(|v| v.index() < base);
    sigma
}

fn solve_constant(
    model: &FlatModel,
    constant: ConceptName,
    mut table: SymbolTable,
    base: usize,
) -> Result<ConstantOutcome, SolveError> {
    let generic = build_generic_goal(model, constant, &mut table);
    let registry_size = generic.registry.len();
    let label = table.name_text(constant).to_string();
    let mut out = ConstantOutcome {
        unifier: None,
        decided: 0,
        phases: 0,
        registry_size,
    };
    let state = match fix_choices(&generic, &table) {
        Ok(state) => state,
        Err(fix) => {
            log::debug!("constant {label}: {fix}");
            return Ok(out);
        }
    };
    log::debug!(
        "constant {label}: {} variables, {} choices",
        registry_size,
        state.total()
    );
    for choice in state.choices() {
        if !is_consistent(&generic, &choice) {
            continue;
        }
        log::debug!("constant {label}: choice {}", choice.digits());
        let goal = build_goal(&generic, choice);
        let obligations = goal.obligations();
        match run_rules(goal, &table) {
            Outcome::Solved(sigma) => {
                out.decided += 1;
                check(&obligations, &sigma, &table, &format!("the goal for constant {label}"))?;
                out.unifier = Some(restrict_to_base(sigma, base));
                return Ok(out);
            }
            Outcome::Failed => {
                out.decided += 1;
            }
            Outcome::Residual(residual) => {
                if residual.starts.is_empty() {
                    // with no Constant variables a solution could only give
                    // every remaining variable ⊤, and the all-⊤ choice was
                    // already enumerated earlier
                    out.decided += 1;
                    continue;
                }
                out.phases += 1;
                match shortcuts::compute(&residual, &table)? {
                    ComputeOutcome::Success(store) => {
                        let sigma = shortcuts::extract_unifier(&store);
                        check(
                            &obligations,
                            &sigma,
                            &table,
                            &format!("the goal for constant {label}"),
                        )?;
                        out.unifier = Some(restrict_to_base(sigma, base));
                        return Ok(out);
                    }
                    ComputeOutcome::Failure => {}
                }
            }
        }
    }
    Ok(out)
}

/// `false` when the constant refutes unifiability.
fn absorb(
    stats: &mut Statistics,
    merged: &mut Substitution,
    outcome: ConstantOutcome,
    index: usize,
) -> bool {
    stats.max_variables = stats.max_variables.max(outcome.registry_size);
    stats.preprocessing_decided += outcome.decided;
    stats.shortcut_phases += outcome.phases;
    stats.constants_processed = index + 1;
    match outcome.unifier {
        Some(sigma) => {
            merged.merge(&sigma);
            true
        }
        None => false,
    }
}

/// Decide unifiability of the parsed problem.
pub fn solve(src: &ProblemSource, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let mut table = src.table.clone();
    let model = flatten_problem(&src.axioms, &mut table);
    let base = table.concept_count();
    let mut stats = Statistics::default();

    if model.constants.is_empty() {
        // no constant can be required anywhere, so everything at ⊤ works
        let mut sigma = Substitution::new();
        for v in src.user_variables() {
            sigma.insert(v, Concept::top());
        }
        check(
            &model.goal_subsumptions(),
            &sigma,
            &table,
            "the constant-free problem",
        )?;
        stats.elapsed_ms = started.elapsed().as_millis();
        return Ok(SolveResult {
            verdict: Verdict::Unifiable(sigma),
            stats,
            table,
        });
    }

    let mut merged = Substitution::new();
    let mut failed = false;
    if options.parallel {
        let results: Vec<Result<ConstantOutcome, SolveError>> = model
            .constants
            .par_iter()
            .map(|&a| solve_constant(&model, a, table.clone(), base))
            .collect();
        for (i, result) in results.into_iter().enumerate() {
            if !absorb(&mut stats, &mut merged, result?, i) {
                failed = true;
                break;
            }
        }
    } else {
        for (i, &a) in model.constants.iter().enumerate() {
            let outcome = solve_constant(&model, a, table.clone(), base)?;
            if !absorb(&mut stats, &mut merged, outcome, i) {
                failed = true;
                break;
            }
        }
    }
    if failed {
        stats.elapsed_ms = started.elapsed().as_millis();
        return Ok(SolveResult {
            verdict: Verdict::NotUnifiable,
            stats,
            table,
        });
    }

    check(
        &model.goal_subsumptions(),
        &merged,
        &table,
        "the flattened problem",
    )?;
    stats.elapsed_ms = started.elapsed().as_millis();
    Ok(SolveResult {
        verdict: Verdict::Unifiable(merged),
        stats,
        table,
    })
}
