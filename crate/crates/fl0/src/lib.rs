//! Decides unifiability of concept subsumptions in the description logic FL0.
//!
//! FL0 concepts are built from concept names, `⊓`, value restrictions `∀r.C`
//! and `⊤`. Given subsumptions `C_i ⊑? D_i` whose names ending in `_var` are
//! variables, [`solve`] decides whether some substitution of the variables
//! makes every subsumption hold, and produces such a substitution when one
//! exists.
//!
//! The pipeline: parse ([`parser`]), flatten nested value restrictions away
//! ([`flatten`]), then decide the problem one constant at a time by
//! enumerating coarse per-variable choices ([`choice`]), discharging the easy
//! cases directly ([`implicit`]) and searching member sets for the rest
//! ([`shortcuts`]). [`solve`] glues the stages together and re-verifies every
//! unifier before reporting it.

pub mod choice;
pub mod concept;
pub mod flatten;
pub mod implicit;
pub mod parser;
pub mod shortcuts;
pub mod solve;
pub mod subst;
pub mod symbol;
pub mod testkit;

pub use concept::{Concept, ConceptExpr, Particle};
pub use parser::{Axiom, InputFormat, ProblemSource};
pub use solve::{solve, SolveOptions, SolveResult, Statistics, Verdict};
pub use subst::{verify_unifier, GoalSubsumption, Substitution};
pub use symbol::{ConceptName, NameKind, RoleName, SymbolTable};
