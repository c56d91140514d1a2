//! Rule-based pre-processing of one goal.
//!
//! A goal is a generic goal specialized by a [`Choice`].  The rules either
//! solve it outright, refute it, or strip it down to a residue that the
//! shortcut search finishes.  Each rule application removes a subsumption or
//! an atom, so the loop terminates.

use crate::choice::{Choice, ChoiceValue};
use crate::concept::{Concept, Particle};
use crate::flatten::{FlatSubsumption, GenericGoal};
use crate::subst::{GoalSubsumption, Substitution};
use crate::symbol::{ConceptName, NameKind, SymbolTable};

/// A generic goal under one specific choice.
#[derive(Clone, Debug)]
pub struct Goal<'g> {
    pub generic: &'g GenericGoal,
    pub choice: Choice,
    /// Flat subsumptions not yet discharged by the rules.
    pub unsolved: Vec<FlatSubsumption>,
    /// `X ⊑ a` for every `Constant`-choice variable, in registry order.
    /// Start subsumptions are obligations, never rule inputs.
    pub starts: Vec<ConceptName>,
}

pub fn build_goal<'g>(generic: &'g GenericGoal, choice: Choice) -> Goal<'g> {
    let starts = generic
        .registry
        .iter()
        .copied()
        .filter(|&v| choice.value(v) == ChoiceValue::Constant)
        .collect();
    Goal {
        generic,
        choice,
        unsolved: generic.flats.clone(),
        starts,
    }
}

impl Goal<'_> {
    /// Everything a unifier for this goal must satisfy: the generic goal's
    /// subsumptions plus this choice's start subsumptions.
    pub fn obligations(&self) -> Vec<GoalSubsumption> {
        let mut out = self.generic.subsumption_set();
        for &v in &self.starts {
            out.push(GoalSubsumption {
                lhs: Concept::from_particle(Particle::name(v)),
                rhs: Some(Particle::name(self.generic.constant)),
            });
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Outcome<'g> {
    /// The rules emptied the goal; a unifier was read off the choice.
    Solved(Substitution),
    /// The choice admits no unifier.
    Failed,
    /// No rule applies but subsumptions remain.
    Residual(Goal<'g>),
}

/// True when some left-side atom can supply the bare constant: the constant
/// itself, or a variable whose choice is `Constant`.
fn supplies_constant(goal: &Goal, f: &FlatSubsumption, table: &SymbolTable) -> bool {
    f.lhs.iter().any(|&c| {
        c == goal.generic.constant
            || (table.is_variable(c) && goal.choice.value(c) == ChoiceValue::Constant)
    })
}

/// Refutation checks.  Run before any rule and again after every mutation,
/// because deletions can expose them.
fn has_critical_failure(goal: &Goal, table: &SymbolTable) -> bool {
    let a = goal.generic.constant;
    for f in &goal.unsolved {
        // the constant on the right with nothing to supply it
        if f.rhs == a && !supplies_constant(goal, f, table) {
            return true;
        }
        if table.is_variable(f.rhs) {
            let v = goal.choice.value(f.rhs);
            // a Constant variable with nothing to supply it
            if v == ChoiceValue::Constant && !supplies_constant(goal, f, table) {
                return true;
            }
            // ⊤ on the left forces ⊤ on the right
            if f.lhs.is_empty() && v != ChoiceValue::Top {
                return true;
            }
            // a ⊑ X pins the value of X inside {a}: Nothing is out, and
            // every role decomposition of X must be ⊤
            if f.lhs.len() == 1 && f.lhs.contains(&a) {
                if v == ChoiceValue::Nothing {
                    return true;
                }
                if let Some(children) = goal.generic.decomp_children.get(&f.rhs) {
                    if children
                        .iter()
                        .any(|&(_, c)| goal.choice.value(c) != ChoiceValue::Top)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

enum Act {
    Solve,
    Drop(ConceptName),
}

/// Apply the first applicable rule, scanning subsumptions in order.
/// Returns false when no rule applies anywhere.
fn apply_one_rule(goal: &mut Goal, table: &SymbolTable) -> bool {
    let a = goal.generic.constant;
    for i in 0..goal.unsolved.len() {
        let act = {
            let f = &goal.unsolved[i];
            let rhs_is_var = table.is_variable(f.rhs);
            let rhs_choice = rhs_is_var.then(|| goal.choice.value(f.rhs));
            if rhs_choice == Some(ChoiceValue::Top) {
                // a ⊤ right side is trivially covered
                Some(Act::Solve)
            } else if let Some(&v) = f.lhs.iter().find(|&&c| {
                table.is_variable(c) && goal.choice.value(c) == ChoiceValue::Top
            }) {
                // ⊤ atoms contribute nothing on the left
                Some(Act::Drop(v))
            } else if f.lhs.contains(&f.rhs) {
                // the right side already appears on the left
                Some(Act::Solve)
            } else if f.rhs == a && supplies_constant(goal, f, table) {
                // a Constant variable covers the constant right side
                Some(Act::Solve)
            } else if rhs_choice.is_some_and(|v| v != ChoiceValue::Constant)
                && f.lhs.contains(&a)
            {
                // a bare constant cannot help a non-Constant variable
                Some(Act::Drop(a))
            } else {
                None
            }
        };
        match act {
            Some(Act::Solve) => {
                goal.unsolved.remove(i);
                return true;
            }
            Some(Act::Drop(v)) => {
                goal.unsolved[i].lhs.remove(&v);
                return true;
            }
            None => {}
        }
    }
    false
}

fn lineage_depth(table: &SymbolTable, var: ConceptName) -> usize {
    match table.kind(var) {
        NameKind::Decomposition { parent, .. }
        | NameKind::ConstantDecomposition { parent, .. } => {
            1 + lineage_depth(table, parent)
        }
        _ => 0,
    }
}

/// Read a unifier off the choice once no subsumption is left: `Constant`
/// variables start at `{a}`, then role decompositions fold into their
/// parents deepest-first, so `γ(X)` gains `∀r.P` for every `P ∈ γ(X^r)`.
fn construct_unifier(goal: &Goal, table: &SymbolTable) -> Substitution {
    let a = goal.generic.constant;
    let mut sigma = Substitution::new();
    for &v in &goal.generic.registry {
        if goal.choice.value(v) == ChoiceValue::Constant {
            sigma.add_particle(v, Particle::name(a));
        }
    }
    let mut decomps: Vec<ConceptName> = goal
        .generic
        .registry
        .iter()
        .copied()
        .filter(|&v| matches!(table.kind(v), NameKind::Decomposition { .. }))
        .collect();
    decomps.sort_by_key(|&v| std::cmp::Reverse(lineage_depth(table, v)));
    for v in decomps {
        let NameKind::Decomposition { parent, role } = table.kind(v) else {
            unreachable!()
        };
        let Some(value) = sigma.get(v).cloned() else {
            continue;
        };
        for p in value.particles() {
            sigma.add_particle(parent, p.prefixed(role));
        }
    }
    sigma
}

pub fn run<'g>(mut goal: Goal<'g>, table: &SymbolTable) -> Outcome<'g> {
    loop {
        if has_critical_failure(&goal, table) {
            return Outcome::Failed;
        }
        if !apply_one_rule(&mut goal, table) {
            break;
        }
    }
    if goal.unsolved.is_empty() {
        Outcome::Solved(construct_unifier(&goal, table))
    } else {
        Outcome::Residual(goal)
    }
}
