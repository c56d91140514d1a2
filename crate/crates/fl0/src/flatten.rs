//! Flattening passes.
//!
//! Pass one distributes value restrictions and abstracts restrictions nested
//! below the top level into fresh system variables with definitions, so every
//! concept in the model is a set of particles of depth ≤ 1. Pass two runs per
//! constant: it projects the model onto that constant and rewrites every
//! subsumption until only flat subsumptions over atoms remain, introducing
//! decomposition variables (`X__d_r`) and constant-decomposition variables
//! (`X__c_A`) along the way.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::concept::{Concept, Particle};
use crate::parser::Axiom;
use crate::subst::GoalSubsumption;
use crate::symbol::{ConceptName, NameKind, RoleName, SymbolTable};

/// The problem after pass one: all sides in normal form with particle depth
/// ≤ 1, nested restrictions replaced by system variables.
#[derive(Clone, Debug)]
pub struct FlatModel {
    pub subsumptions: Vec<(Concept, Concept)>,
    pub equivalences: Vec<(Concept, Concept)>,
    /// `Var ≡ body`; each body is a single particle of depth exactly 1.
    pub definitions: Vec<(ConceptName, Concept)>,
    /// Roles occurring in the axioms, interning order.
    pub roles: Vec<RoleName>,
    /// Constants occurring in the axioms, sorted by name.
    pub constants: Vec<ConceptName>,
}

pub fn flatten_problem(axioms: &[Axiom], table: &mut SymbolTable) -> FlatModel {
    let mut subsumptions = Vec::new();
    let mut equivalences = Vec::new();
    let mut definitions = Vec::new();
    let mut roles_seen: BTreeSet<RoleName> = BTreeSet::new();
    let mut constants_seen: BTreeSet<ConceptName> = BTreeSet::new();

    let record = |c: &Concept,
                  table: &SymbolTable,
                  roles_seen: &mut BTreeSet<RoleName>,
                  constants_seen: &mut BTreeSet<ConceptName>| {
        for p in c.particles() {
            roles_seen.extend(p.word.iter().copied());
            if table.kind(p.head) == NameKind::Constant {
                constants_seen.insert(p.head);
            }
        }
    };

    for axiom in axioms {
        let (l, r) = axiom.sides();
        let (nl, nr) = (l.normalize(), r.normalize());
        record(&nl, table, &mut roles_seen, &mut constants_seen);
        record(&nr, table, &mut roles_seen, &mut constants_seen);
        let fl = abstract_side(&nl, table, &mut definitions);
        let fr = abstract_side(&nr, table, &mut definitions);
        match axiom {
            Axiom::Subsumption(..) => subsumptions.push((fl, fr)),
            Axiom::Equivalence(..) => equivalences.push((fl, fr)),
        }
    }

    let mut constants: Vec<ConceptName> = constants_seen.into_iter().collect();
    constants.sort_by(|a, b| table.name_text(*a).cmp(table.name_text(*b)));

    FlatModel {
        subsumptions,
        equivalences,
        definitions,
        roles: roles_seen.into_iter().collect(),
        constants,
    }
}

/// Abstracts one side. Sides without nesting (depth ≤ 1 throughout) pass
/// through untouched. Otherwise particles are grouped by leading role; in a
/// group that still nests, depth-1 members stay literal and deeper tails get
/// a variable behind the role, while a group of only depth-1 particles is
/// abstracted wholesale (variable at the top level).
fn abstract_side(
    c: &Concept,
    table: &mut SymbolTable,
    defs: &mut Vec<(ConceptName, Concept)>,
) -> Concept {
    if c.particles().all(|p| p.depth() <= 1) {
        return c.clone();
    }
    let mut out = Concept::top();
    for p in c.particles().filter(|p| p.depth() == 0) {
        out.insert(p.clone());
    }
    let mut groups: BTreeMap<RoleName, BTreeSet<Particle>> = BTreeMap::new();
    for p in c.particles().filter(|p| p.depth() >= 1) {
        // key on the leading role, keep the tail
        groups
            .entry(p.word[0])
            .or_default()
            .insert(Particle::new(p.word[1..].to_vec(), p.head));
    }
    for (role, tails) in groups {
        if tails.iter().any(|t| t.depth() >= 1) {
            for tail in tails {
                if tail.depth() == 0 {
                    out.insert(Particle::new(vec![role], tail.head));
                } else {
                    let var = define_particle(&tail, table, defs);
                    out.insert(Particle::new(vec![role], var));
                }
            }
        } else {
            for tail in tails {
                let var = define_particle(&Particle::new(vec![role], tail.head), table, defs);
                out.insert(Particle::name(var));
            }
        }
    }
    out
}

/// Fresh variable standing for `p`, chaining through further fresh variables
/// so every definition body is a depth-1 particle. Innermost first.
fn define_particle(
    p: &Particle,
    table: &mut SymbolTable,
    defs: &mut Vec<(ConceptName, Concept)>,
) -> ConceptName {
    debug_assert!(p.depth() >= 1);
    let head = if p.depth() == 1 {
        p.head
    } else {
        define_particle(&Particle::new(p.word[1..].to_vec(), p.head), table, defs)
    };
    let var = table.fresh_system_variable();
    defs.push((
        var,
        Concept::from_particle(Particle::new(vec![p.word[0]], head)),
    ));
    var
}

impl FlatModel {
    /// The whole model as one-particle subsumptions (`⊤` right sides kept),
    /// suitable for `verify_unifier`. Order: subsumptions, equivalences split
    /// into both directions, definitions split into both directions.
    pub fn goal_subsumptions(&self) -> Vec<GoalSubsumption> {
        let mut out = Vec::new();
        for (lhs, rhs) in &self.subsumptions {
            split_into(&mut out, lhs, rhs);
        }
        for (l, r) in &self.equivalences {
            split_into(&mut out, l, r);
            split_into(&mut out, r, l);
        }
        for (var, body) in &self.definitions {
            let var_c = Concept::from_particle(Particle::name(*var));
            split_into(&mut out, &var_c, body);
            split_into(&mut out, body, &var_c);
        }
        out
    }

    /// Projection onto one constant: foreign constants become `⊤` on both
    /// sides (variables survive), right sides split per particle, and
    /// subsumptions whose right side vanished are dropped as trivially true.
    pub fn project_to_constant(
        &self,
        constant: ConceptName,
        table: &SymbolTable,
    ) -> Vec<(Concept, Particle)> {
        let mut out = Vec::new();
        let project = |lhs: &Concept, rhs: &Concept, out: &mut Vec<(Concept, Particle)>| {
            let pl = lhs.restrict_to_constant(constant, true, table);
            let pr = rhs.restrict_to_constant(constant, true, table);
            for p in pr.particles() {
                out.push((pl.clone(), p.clone()));
            }
        };
        for (lhs, rhs) in &self.subsumptions {
            project(lhs, rhs, &mut out);
        }
        for (l, r) in &self.equivalences {
            project(l, r, &mut out);
            project(r, l, &mut out);
        }
        for (var, body) in &self.definitions {
            let var_c = Concept::from_particle(Particle::name(*var));
            project(&var_c, body, &mut out);
            project(body, &var_c, &mut out);
        }
        out
    }
}

fn split_into(out: &mut Vec<GoalSubsumption>, lhs: &Concept, rhs: &Concept) {
    if rhs.is_top() {
        out.push(GoalSubsumption { lhs: lhs.clone(), rhs: None });
    } else {
        for p in rhs.particles() {
            out.push(GoalSubsumption {
                lhs: lhs.clone(),
                rhs: Some(p.clone()),
            });
        }
    }
}

/// One fully reduced constraint: atoms only. Empty left side means `⊤`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatSubsumption {
    pub lhs: BTreeSet<ConceptName>,
    pub rhs: ConceptName,
}

/// `parent ⊑ ∀role.child` — registered once per (parent, role).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct IncreasingSubsumption {
    pub parent: ConceptName,
    pub role: RoleName,
    pub child: ConceptName,
}

/// The per-constant goal after pass two.
#[derive(Clone, Debug)]
pub struct GenericGoal {
    pub constant: ConceptName,
    pub flats: Vec<FlatSubsumption>,
    pub increasing: Vec<IncreasingSubsumption>,
    /// Every variable of the goal: non-decomposition roots in interning
    /// order, each immediately followed by its decomposition descendants
    /// (depth-first, children in creation order).
    pub registry: Vec<ConceptName>,
    /// Role decompositions used by this goal, per parent, creation order.
    pub decomp_children: BTreeMap<ConceptName, Vec<(RoleName, ConceptName)>>,
    /// Constant decompositions used by this goal: (parent, X_A) pairs.
    pub const_decomp: Vec<(ConceptName, ConceptName)>,
}

impl GenericGoal {
    /// Child `X^r` of `var` for `role`, if this goal created one.
    pub fn decomposition_of(&self, var: ConceptName, role: RoleName) -> Option<ConceptName> {
        self.decomp_children
            .get(&var)?
            .iter()
            .find(|(r, _)| *r == role)
            .map(|(_, c)| *c)
    }

    /// Flats and increasing subsumptions in verifiable form.
    pub fn subsumption_set(&self) -> Vec<GoalSubsumption> {
        let mut out = Vec::new();
        for f in &self.flats {
            out.push(GoalSubsumption {
                lhs: Concept::from_particles(f.lhs.iter().map(|&a| Particle::name(a))),
                rhs: Some(Particle::name(f.rhs)),
            });
        }
        for inc in &self.increasing {
            out.push(GoalSubsumption {
                lhs: Concept::from_particle(Particle::name(inc.parent)),
                rhs: Some(Particle::new(vec![inc.role], inc.child)),
            });
        }
        out
    }
}

/// Work item of pass two; `rhs` is always a particle, never `⊤`.
struct WorkSub {
    lhs: Concept,
    rhs: Particle,
}

impl WorkSub {
    fn is_flat(&self) -> bool {
        self.rhs.depth() == 0 && self.lhs.particles().all(|p| p.depth() == 0)
    }
}

/// Book-keeping shared by the rewrite rules of pass two.
struct GoalBuilder<'a> {
    table: &'a mut SymbolTable,
    constant: ConceptName,
    increasing: Vec<IncreasingSubsumption>,
    decomp_children: BTreeMap<ConceptName, Vec<(RoleName, ConceptName)>>,
    decomp_seen: BTreeSet<(ConceptName, RoleName)>,
    const_decomp: Vec<(ConceptName, ConceptName)>,
    const_seen: BTreeSet<ConceptName>,
}

impl GoalBuilder<'_> {
    /// `X^r`, reusing the table-wide variable but registering the increasing
    /// subsumption `X ⊑ ∀r.X^r` once per goal.
    fn decompose(&mut self, var: ConceptName, role: RoleName) -> ConceptName {
        let child = self.table.decomposition_variable(var, role);
        if self.decomp_seen.insert((var, role)) {
            self.increasing.push(IncreasingSubsumption { parent: var, role, child });
            self.decomp_children.entry(var).or_default().push((role, child));
        }
        child
    }

    fn const_decompose(&mut self, var: ConceptName) -> ConceptName {
        let child = self
            .table
            .constant_decomposition_variable(var, self.constant);
        if self.const_seen.insert(var) {
            self.const_decomp.push((var, child));
        }
        child
    }

    /// `lhs^{-r}`: bare variables decompose, `∀r.E` sheds the prefix,
    /// everything else (constants, other prefixes) is `⊤` and vanishes.
    fn strip(&mut self, lhs: &Concept, role: RoleName) -> Concept {
        let particles: Vec<Particle> = lhs.particles().cloned().collect();
        let mut out = Concept::top();
        for p in particles {
            if p.depth() == 0 {
                if self.table.is_variable(p.head) {
                    out.insert(Particle::name(self.decompose(p.head, role)));
                }
            } else if p.word[0] == role {
                out.insert(Particle::new(p.word[1..].to_vec(), p.head));
            }
        }
        out
    }

    /// `lhs^a`: keeps bare occurrences of the constant and bare variables.
    fn project(&self, lhs: &Concept) -> Concept {
        lhs.particles()
            .filter(|p| {
                p.depth() == 0 && (p.head == self.constant || self.table.is_variable(p.head))
            })
            .cloned()
            .collect()
    }
}

/// Pass two for one constant. FIFO over the projected subsumptions: flat
/// items are archived, non-flat items are rewritten and re-queued.
pub fn build_generic_goal(
    model: &FlatModel,
    constant: ConceptName,
    table: &mut SymbolTable,
) -> GenericGoal {
    let mut queue: VecDeque<WorkSub> = model
        .project_to_constant(constant, table)
        .into_iter()
        .map(|(lhs, rhs)| WorkSub { lhs, rhs })
        .collect();
    let mut builder = GoalBuilder {
        table,
        constant,
        increasing: Vec::new(),
        decomp_children: BTreeMap::new(),
        decomp_seen: BTreeSet::new(),
        const_decomp: Vec::new(),
        const_seen: BTreeSet::new(),
    };
    let mut flats: Vec<FlatSubsumption> = Vec::new();

    while let Some(sub) = queue.pop_front() {
        if sub.is_flat() {
            let flat = FlatSubsumption {
                lhs: sub.lhs.particles().map(|p| p.head).collect(),
                rhs: sub.rhs.head,
            };
            debug_assert!(flat
                .lhs
                .iter()
                .chain(std::iter::once(&flat.rhs))
                .all(|&a| a == constant || builder.table.is_variable(a)));
            if !flats.contains(&flat) {
                flats.push(flat);
            }
            continue;
        }
        if sub.rhs.depth() >= 1 {
            // rhs = ∀r.P — descend through r on both sides
            let role = sub.rhs.word[0];
            let rest = Particle::new(sub.rhs.word[1..].to_vec(), sub.rhs.head);
            let lhs = builder.strip(&sub.lhs, role);
            queue.push_back(WorkSub { lhs, rhs: rest });
            continue;
        }
        if builder.table.is_variable(sub.rhs.head) {
            // rhs = X with a nested lhs: decompose along every role of the
            // problem, plus the constant projection onto X's X_A
            let x = sub.rhs.head;
            for &role in &model.roles {
                let lhs = builder.strip(&sub.lhs, role);
                let rhs = Particle::name(builder.decompose(x, role));
                queue.push_back(WorkSub { lhs, rhs });
            }
            let lhs = builder.project(&sub.lhs);
            let rhs = Particle::name(builder.const_decompose(x));
            queue.push_back(WorkSub { lhs, rhs });
        } else {
            // rhs = a with a nested lhs: only bare a and variables can help
            debug_assert_eq!(sub.rhs.head, constant);
            let lhs = builder.project(&sub.lhs);
            queue.push_back(WorkSub { lhs, rhs: sub.rhs });
        }
    }

    let registry = build_registry(
        &flats,
        &builder.increasing,
        &builder.const_decomp,
        &builder.decomp_children,
        builder.table,
    );

    GenericGoal {
        constant,
        flats,
        increasing: builder.increasing,
        registry,
        decomp_children: builder.decomp_children,
        const_decomp: builder.const_decomp,
    }
}

/// Lineage order: roots (plain variables) by interning id, each root's
/// decomposition descendants right behind it, depth-first, ordered by
/// creation id. Every occurring variable is reachable from a root because
/// each decomposition registers a subsumption naming its parent.
fn build_registry(
    flats: &[FlatSubsumption],
    increasing: &[IncreasingSubsumption],
    const_decomp: &[(ConceptName, ConceptName)],
    decomp_children: &BTreeMap<ConceptName, Vec<(RoleName, ConceptName)>>,
    table: &SymbolTable,
) -> Vec<ConceptName> {
    let mut occurring: BTreeSet<ConceptName> = BTreeSet::new();
    for f in flats {
        occurring.extend(f.lhs.iter().filter(|&&a| table.is_variable(a)));
        if table.is_variable(f.rhs) {
            occurring.insert(f.rhs);
        }
    }
    for inc in increasing {
        occurring.insert(inc.parent);
        occurring.insert(inc.child);
    }
    for &(parent, child) in const_decomp {
        occurring.insert(parent);
        occurring.insert(child);
    }

    let const_by_parent: BTreeMap<ConceptName, ConceptName> =
        const_decomp.iter().copied().collect();

    fn push_lineage(
        var: ConceptName,
        registry: &mut Vec<ConceptName>,
        decomp_children: &BTreeMap<ConceptName, Vec<(RoleName, ConceptName)>>,
        const_by_parent: &BTreeMap<ConceptName, ConceptName>,
    ) {
        registry.push(var);
        let mut kids: Vec<ConceptName> = decomp_children
            .get(&var)
            .map(|l| l.iter().map(|&(_, c)| c).collect())
            .unwrap_or_default();
        if let Some(&ca) = const_by_parent.get(&var) {
            kids.push(ca);
        }
        kids.sort();
        for kid in kids {
            push_lineage(kid, registry, decomp_children, const_by_parent);
        }
    }

    let mut registry = Vec::with_capacity(occurring.len());
    for &var in &occurring {
        if matches!(
            table.kind(var),
            NameKind::UserVariable | NameKind::SystemVariable
        ) {
            push_lineage(var, &mut registry, decomp_children, &const_by_parent);
        }
    }
    debug_assert_eq!(registry.len(), occurring.len());
    registry
}

/// Three-subsumption goal exercised throughout the solver's unit tests.
#[cfg(test)]
pub(crate) const GOLDEN_FIXTURE: &str = "(sub X_var (all r A))
     (sub (and Y_var (all r X_var)) X_var)
     (sub X_var (all r Y_var))";

/// Test-only: parse `text`, flatten, and build the goal for `constant`.
#[cfg(test)]
pub(crate) fn test_goal(
    text: &str,
    constant: &str,
) -> (crate::symbol::SymbolTable, GenericGoal) {
    use crate::parser::{InputFormat, ProblemSource};
    let mut src = ProblemSource::parse(text, InputFormat::Flu).expect("fixture parses");
    let model = flatten_problem(&src.axioms, &mut src.table);
    let c = src.table.lookup_concept(constant).expect("constant occurs");
    let goal = build_generic_goal(&model, c, &mut src.table);
    (src.table, goal)
}
