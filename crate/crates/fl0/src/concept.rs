//! FL0 concepts in particle normal form.
//!
//! A particle is a value-restriction chain over a single name, `∀w.H` for a
//! word `w` of roles (possibly empty). Distributing `∀r` over `⊓` and erasing
//! `∀r.⊤` turns every FL0 concept into a finite set of particles; the empty
//! set is `⊤`. Keeping concepts as sorted particle sets makes equality
//! structural and subsumption a subset test.

use std::collections::BTreeSet;

use crate::symbol::{ConceptName, RoleName, SymbolTable};

/// `∀word.head`; the empty word is the bare name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Particle {
    pub word: Vec<RoleName>,
    pub head: ConceptName,
}

impl Particle {
    pub fn name(head: ConceptName) -> Self {
        Particle { word: Vec::new(), head }
    }

    pub fn new(word: Vec<RoleName>, head: ConceptName) -> Self {
        Particle { word, head }
    }

    /// `∀r.self`.
    pub fn prefixed(&self, role: RoleName) -> Self {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(role);
        word.extend_from_slice(&self.word);
        Particle { word, head: self.head }
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

/// Concept in normal form: a set of particles, `⊤` when empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Concept(BTreeSet<Particle>);

impl Concept {
    pub fn top() -> Self {
        Concept::default()
    }

    pub fn from_particle(p: Particle) -> Self {
        let mut s = BTreeSet::new();
        s.insert(p);
        Concept(s)
    }

    pub fn from_particles<I: IntoIterator<Item = Particle>>(iter: I) -> Self {
        Concept(iter.into_iter().collect())
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn particles(&self) -> impl Iterator<Item = &Particle> {
        self.0.iter()
    }

    pub fn contains(&self, p: &Particle) -> bool {
        self.0.contains(p)
    }

    pub fn insert(&mut self, p: Particle) {
        self.0.insert(p);
    }

    pub fn extend(&mut self, other: &Concept) {
        for p in other.particles() {
            self.0.insert(p.clone());
        }
    }

    /// `∀role.self` (empty stays empty: `∀r.⊤ = ⊤`).
    pub fn prefixed(&self, role: RoleName) -> Concept {
        Concept(self.0.iter().map(|p| p.prefixed(role)).collect())
    }

    /// `self ⊑ other`: every particle required by `other` is present here.
    pub fn subsumes(&self, other: &Concept) -> bool {
        other.0.is_subset(&self.0)
    }

    /// Keeps only particles whose head is `constant`; with `keep_variables`
    /// the particles headed by any variable survive too, so only foreign
    /// constants become `⊤`.
    pub fn restrict_to_constant(
        &self,
        constant: ConceptName,
        keep_variables: bool,
        table: &SymbolTable,
    ) -> Concept {
        Concept(
            self.0
                .iter()
                .filter(|p| {
                    p.head == constant || (keep_variables && table.is_variable(p.head))
                })
                .cloned()
                .collect(),
        )
    }
}

impl FromIterator<Particle> for Concept {
    fn from_iter<I: IntoIterator<Item = Particle>>(iter: I) -> Self {
        Concept(iter.into_iter().collect())
    }
}

/// Concept as parsed, before normalization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConceptExpr {
    Top,
    Name(ConceptName),
    And(Vec<ConceptExpr>),
    All(RoleName, Box<ConceptExpr>),
}

impl ConceptExpr {
    /// Normal form: distribute value restrictions, erase `∀w.⊤` and `⊤`
    /// conjuncts, collect the remaining particles.
    pub fn normalize(&self) -> Concept {
        match self {
            ConceptExpr::Top => Concept::top(),
            ConceptExpr::Name(n) => Concept::from_particle(Particle::name(*n)),
            ConceptExpr::And(parts) => {
                let mut out = Concept::top();
                for part in parts {
                    out.extend(&part.normalize());
                }
                out
            }
            ConceptExpr::All(role, inner) => inner.normalize().prefixed(*role),
        }
    }
}

/// Rebuilds a syntax tree from the normal form (used for rendering).
pub fn concept_to_expr(c: &Concept) -> ConceptExpr {
    fn particle_expr(p: &Particle) -> ConceptExpr {
        let mut expr = ConceptExpr::Name(p.head);
        for role in p.word.iter().rev() {
            expr = ConceptExpr::All(*role, Box::new(expr));
        }
        expr
    }
    let mut parts: Vec<ConceptExpr> = c.particles().map(particle_expr).collect();
    match parts.len() {
        0 => ConceptExpr::Top,
        1 => parts.pop().unwrap(),
        _ => ConceptExpr::And(parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SymbolTable, ConceptName, ConceptName, ConceptName, RoleName, RoleName) {
        let mut t = SymbolTable::new();
        let a = t.intern_concept("A");
        let b = t.intern_concept("B");
        let c = t.intern_concept("C");
        let r = t.intern_role("r");
        let s = t.intern_role("s");
        (t, a, b, c, r, s)
    }

    #[test]
    fn normalize_distributes_value_restrictions() {
        let (_, a, b, _, r, _) = setup();
        // ∀r.(A ⊓ B)
        let e = ConceptExpr::All(
            r,
            Box::new(ConceptExpr::And(vec![
                ConceptExpr::Name(a),
                ConceptExpr::Name(b),
            ])),
        );
        let n = e.normalize();
        assert_eq!(
            n,
            Concept::from_particles([
                Particle::new(vec![r], a),
                Particle::new(vec![r], b)
            ])
        );
    }

    #[test]
    fn normalize_erases_top() {
        let (_, _, _, _, _, s) = setup();
        // ⊤ ⊓ ∀s.⊤
        let e = ConceptExpr::And(vec![
            ConceptExpr::Top,
            ConceptExpr::All(s, Box::new(ConceptExpr::Top)),
        ]);
        assert!(e.normalize().is_top());
    }

    #[test]
    fn normalize_nested() {
        let (_, a, b, c, r, _) = setup();
        // ∀r.(∀r.(A ⊓ B) ⊓ C) = {∀rr.A, ∀rr.B, ∀r.C}
        let e = ConceptExpr::All(
            r,
            Box::new(ConceptExpr::And(vec![
                ConceptExpr::All(
                    r,
                    Box::new(ConceptExpr::And(vec![
                        ConceptExpr::Name(a),
                        ConceptExpr::Name(b),
                    ])),
                ),
                ConceptExpr::Name(c),
            ])),
        );
        assert_eq!(
            e.normalize(),
            Concept::from_particles([
                Particle::new(vec![r, r], a),
                Particle::new(vec![r, r], b),
                Particle::new(vec![r], c),
            ])
        );
    }

    #[test]
    fn subsumption_is_particle_inclusion() {
        let (_, a, b, _, r, _) = setup();
        let big = Concept::from_particles([
            Particle::name(a),
            Particle::new(vec![r], a),
            Particle::new(vec![r], b),
        ]);
        let small = Concept::from_particles([Particle::new(vec![r], a)]);
        assert!(big.subsumes(&small));
        assert!(!small.subsumes(&big));
        // everything is subsumed by ⊤
        assert!(small.subsumes(&Concept::top()));
        assert!(!Concept::top().subsumes(&small));
    }

    #[test]
    fn restriction_keeps_one_constant() {
        let (t, a, b, _, r, s) = setup();
        let c = Concept::from_particles([
            Particle::name(a),
            Particle::new(vec![r], b),
            Particle::new(vec![s], a),
        ]);
        let ca = c.restrict_to_constant(a, false, &t);
        assert_eq!(
            ca,
            Concept::from_particles([Particle::name(a), Particle::new(vec![s], a)])
        );
        let cb = c.restrict_to_constant(b, false, &t);
        assert_eq!(cb, Concept::from_particles([Particle::new(vec![r], b)]));
    }

    #[test]
    fn mixed_restriction_keeps_variables() {
        let (mut t, a, b, _, r, _) = setup();
        let x = t.intern_concept("X_var");
        let c = Concept::from_particles([
            Particle::new(vec![r], x),
            Particle::new(vec![r], b),
            Particle::name(a),
        ]);
        let ca = c.restrict_to_constant(a, true, &t);
        assert_eq!(
            ca,
            Concept::from_particles([Particle::new(vec![r], x), Particle::name(a)])
        );
    }
}
