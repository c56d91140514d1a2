//! Reproducible random problems and a brute-force reference decision.
//!
//! The generator builds small problems from a seeded stream so failures
//! replay exactly.  The oracle enumerates every candidate substitution over
//! a bounded particle universe; it can confirm unifiability outright, while
//! a miss is only conclusive up to the depth bound.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::concept::{concept_to_expr, Concept, ConceptExpr, Particle};
use crate::parser::{Axiom, ProblemSource};
use crate::subst::{apply, Substitution};
use crate::symbol::{ConceptName, RoleName, SymbolTable};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GeneratorParams {
    pub n_constants: usize,
    pub n_variables: usize,
    pub n_roles: usize,
    pub max_depth: usize,
    pub n_subsumptions: usize,
    pub seed: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("generator parameter out of range: {0}")]
pub struct InvalidParams(pub String);

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        let bounds = [
            ("constants", self.n_constants, 1, 2),
            ("variables", self.n_variables, 0, 3),
            ("roles", self.n_roles, 1, 2),
            ("depth", self.max_depth, 0, 2),
            ("subsumptions", self.n_subsumptions, 1, 4),
        ];
        for (what, value, lo, hi) in bounds {
            if value < lo || value > hi {
                return Err(InvalidParams(format!(
                    "{what} = {value}, expected {lo}..={hi}"
                )));
            }
        }
        Ok(())
    }
}

fn random_side(
    rng: &mut ChaCha8Rng,
    heads: &[ConceptName],
    roles: &[RoleName],
    max_depth: usize,
) -> ConceptExpr {
    let n_particles = rng.gen_range(1..=3);
    let particles = (0..n_particles).map(|_| {
        let len = rng.gen_range(0..=max_depth);
        let word = (0..len)
            .map(|_| roles[rng.gen_range(0..roles.len())])
            .collect();
        Particle::new(word, heads[rng.gen_range(0..heads.len())])
    });
    concept_to_expr(&Concept::from_particles(particles))
}

/// Generate a problem from the seed; equal parameters give equal problems.
pub fn gen_problem(params: &GeneratorParams) -> Result<ProblemSource, InvalidParams> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut table = SymbolTable::new();
    let mut heads: Vec<ConceptName> = ["A", "B"][..params.n_constants]
        .iter()
        .map(|t| table.intern_concept(t))
        .collect();
    heads.extend(
        ["X_var", "Y_var", "Z_var"][..params.n_variables]
            .iter()
            .map(|t| table.intern_concept(t)),
    );
    let roles: Vec<RoleName> = ["r", "s"][..params.n_roles]
        .iter()
        .map(|t| table.intern_role(t))
        .collect();
    let axioms = (0..params.n_subsumptions)
        .map(|_| {
            let lhs = random_side(&mut rng, &heads, &roles, params.max_depth);
            let rhs = random_side(&mut rng, &heads, &roles, params.max_depth);
            if rng.gen_bool(0.25) {
                Axiom::Equivalence(lhs, rhs)
            } else {
                Axiom::Subsumption(lhs, rhs)
            }
        })
        .collect();
    Ok(ProblemSource { table, axioms })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleVerdict {
    /// A unifier within the bound; definitive.
    Found(Substitution),
    /// Nothing within the bound; says nothing about deeper unifiers.
    NotFoundWithinBound,
}

/// The bounded universe is still too big to sweep.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
#[error("oracle budget exceeded: {particles} particles over {variables} variables")]
pub struct BudgetExceeded {
    pub particles: usize,
    pub variables: usize,
}

fn collect_roles(expr: &ConceptExpr, out: &mut BTreeSet<RoleName>) {
    match expr {
        ConceptExpr::Top | ConceptExpr::Name(_) => {}
        ConceptExpr::And(parts) => parts.iter().for_each(|p| collect_roles(p, out)),
        ConceptExpr::All(role, inner) => {
            out.insert(*role);
            collect_roles(inner, out);
        }
    }
}

/// Sweep every substitution mapping the problem's variables to sets of
/// ground particles of word length at most `depth`, smallest first, and
/// test it against the axioms.  The all-⊤ substitution is tried first.
pub fn oracle_search(
    src: &ProblemSource,
    depth: usize,
) -> Result<OracleVerdict, BudgetExceeded> {
    let variables = src.user_variables();
    let constants = src.constants();
    let mut roles = BTreeSet::new();
    for ax in &src.axioms {
        let (l, r) = ax.sides();
        collect_roles(l, &mut roles);
        collect_roles(r, &mut roles);
    }
    let roles: Vec<RoleName> = roles.into_iter().collect();

    let mut words: Vec<Vec<RoleName>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for &r in &roles {
                let mut w2 = w.clone();
                w2.push(r);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let universe: Vec<Particle> = words
        .iter()
        .flat_map(|w| constants.iter().map(|&c| Particle::new(w.clone(), c)))
        .collect();

    let bits = universe.len() * variables.len();
    if universe.len() > 12 || bits > 24 {
        return Err(BudgetExceeded {
            particles: universe.len(),
            variables: variables.len(),
        });
    }

    let goals: Vec<(Concept, Concept)> = src
        .axioms
        .iter()
        .flat_map(|ax| {
            let (l, r) = ax.sides();
            let (l, r) = (l.normalize(), r.normalize());
            match ax {
                Axiom::Subsumption(..) => vec![(l, r)],
                Axiom::Equivalence(..) => vec![(l.clone(), r.clone()), (r, l)],
            }
        })
        .collect();

    for mask in 0u32..(1u32 << bits) {
        let mut sigma = Substitution::new();
        for (i, &v) in variables.iter().enumerate() {
            let picked = universe
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << (i * universe.len() + j)) != 0)
                .map(|(_, p)| p.clone());
            sigma.insert(v, Concept::from_particles(picked));
        }
        let ok = goals.iter().all(|(l, r)| {
            apply(&sigma, l, &src.table).subsumes(&apply(&sigma, r, &src.table))
        });
        if ok {
            return Ok(OracleVerdict::Found(sigma));
        }
    }
    Ok(OracleVerdict::NotFoundWithinBound)
}
