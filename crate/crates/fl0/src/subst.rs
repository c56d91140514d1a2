//! Substitutions and the unifier check.

use std::collections::BTreeMap;

use crate::concept::{Concept, Particle};
use crate::symbol::{ConceptName, SymbolTable};

/// Maps variables to concepts; unmapped variables read as `⊤`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution {
    map: BTreeMap<ConceptName, Concept>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: ConceptName) -> Option<&Concept> {
        self.map.get(&var)
    }

    /// Value of `var`, with the implicit-`⊤` default made explicit.
    pub fn value(&self, var: ConceptName) -> Concept {
        self.map.get(&var).cloned().unwrap_or_default()
    }

    pub fn insert(&mut self, var: ConceptName, value: Concept) {
        self.map.insert(var, value);
    }

    /// Adds one particle to the value of `var`.
    pub fn add_particle(&mut self, var: ConceptName, p: Particle) {
        self.map.entry(var).or_default().insert(p);
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConceptName, &Concept)> {
        self.map.iter().map(|(k, v)| (*k, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = ConceptName> + '_ {
        self.map.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Per-variable union of particle sets.
    pub fn merge(&mut self, other: &Substitution) {
        for (var, value) in other.iter() {
            self.map.entry(var).or_default().extend(value);
        }
    }

    /// Keeps only the entries whose variable satisfies `pred`.
    pub fn retain<F: FnMut(ConceptName) -> bool>(&mut self, mut pred: F) {
        self.map.retain(|k, _| pred(*k));
    }
}

/// Applies the substitution to every particle of `c`.
///
/// A particle `∀v.X` with `X ↦ {∀w.B, ...}` expands to `{∀vw.B, ...}`;
/// a variable not in the domain reads as `⊤`, erasing the particle.
pub fn apply(sigma: &Substitution, c: &Concept, table: &SymbolTable) -> Concept {
    let mut out = Concept::top();
    for p in c.particles() {
        if table.is_variable(p.head) {
            let value = sigma.value(p.head);
            for q in value.particles() {
                let mut word = p.word.clone();
                word.extend_from_slice(&q.word);
                out.insert(Particle::new(word, q.head));
            }
        } else {
            out.insert(p.clone());
        }
    }
    out
}

/// One subsumption of a unification problem: conjunction on the left,
/// a single particle (or `⊤` as `None`) on the right.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GoalSubsumption {
    pub lhs: Concept,
    pub rhs: Option<Particle>,
}

impl GoalSubsumption {
    pub fn rhs_concept(&self) -> Concept {
        match &self.rhs {
            None => Concept::top(),
            Some(p) => Concept::from_particle(p.clone()),
        }
    }
}

/// True iff `sigma` makes every subsumption of `goals` hold.
pub fn verify_unifier(
    goals: &[GoalSubsumption],
    sigma: &Substitution,
    table: &SymbolTable,
) -> bool {
    goals.iter().all(|g| {
        let lhs = apply(sigma, &g.lhs, table);
        let rhs = apply(sigma, &g.rhs_concept(), table);
        lhs.subsumes(&rhs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Particle;

    #[test]
    fn apply_expands_and_erases() {
        let mut t = SymbolTable::new();
        let a = t.intern_concept("A");
        let x = t.intern_concept("X_var");
        let r = t.intern_role("r");

        let mut sigma = Substitution::new();
        sigma.insert(x, Concept::top()); // X ↦ ⊤ explicitly
        let c = Concept::from_particles([Particle::new(vec![r], x), Particle::name(a)]);
        assert_eq!(
            apply(&sigma, &c, &t),
            Concept::from_particles([Particle::name(a)])
        );

        // unmapped variable behaves the same
        let empty = Substitution::new();
        assert_eq!(
            apply(&empty, &c, &t),
            Concept::from_particles([Particle::name(a)])
        );

        // X ↦ {A, ∀r.A} concatenates words
        let mut sigma2 = Substitution::new();
        sigma2.insert(
            x,
            Concept::from_particles([Particle::name(a), Particle::new(vec![r], a)]),
        );
        assert_eq!(
            apply(&sigma2, &c, &t),
            Concept::from_particles([
                Particle::name(a),
                Particle::new(vec![r], a),
                Particle::new(vec![r, r], a),
            ])
        );
    }

    #[test]
    fn verify_accepts_a_unifier_and_rejects_a_non_unifier() {
        let mut t = SymbolTable::new();
        let a = t.intern_concept("A");
        let x = t.intern_concept("X_var");
        let y = t.intern_concept("Y_var");
        let r = t.intern_role("r");

        // {X ⊑ ∀r.A, Y ⊓ ∀r.X ⊑ X, X ⊑ ∀r.Y}
        let goals = vec![
            GoalSubsumption {
                lhs: Concept::from_particle(Particle::name(x)),
                rhs: Some(Particle::new(vec![r], a)),
            },
            GoalSubsumption {
                lhs: Concept::from_particles([
                    Particle::name(y),
                    Particle::new(vec![r], x),
                ]),
                rhs: Some(Particle::name(x)),
            },
            GoalSubsumption {
                lhs: Concept::from_particle(Particle::name(x)),
                rhs: Some(Particle::new(vec![r], y)),
            },
        ];

        // X ↦ A ⊓ ∀r.A, Y ↦ A
        let mut sigma = Substitution::new();
        sigma.insert(
            x,
            Concept::from_particles([Particle::name(a), Particle::new(vec![r], a)]),
        );
        sigma.insert(y, Concept::from_particle(Particle::name(a)));
        assert!(verify_unifier(&goals, &sigma, &t));

        // all-⊤ fails the first subsumption
        assert!(!verify_unifier(&goals, &Substitution::new(), &t));
    }

    #[test]
    fn top_rhs_is_always_satisfied() {
        let mut t = SymbolTable::new();
        let a = t.intern_concept("A");
        let goals = vec![GoalSubsumption {
            lhs: Concept::from_particle(Particle::name(a)),
            rhs: None,
        }];
        assert!(verify_unifier(&goals, &Substitution::new(), &t));
    }
}
