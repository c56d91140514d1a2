//! Shortcut-set search for residual goals.
//!
//! Atoms of the residual goal (non-⊤ variables plus the goal constant) are
//! packed into `u128` bitmasks.  A candidate set is admitted when it
//! violates no unsolved subsumption and, for every role some decomposition
//! member carries, an earlier shortcut resolves that role.  Admitting the
//! set of start variables (plus the constant) proves the goal solvable, and
//! a unifier is read back off the admission graph.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::choice::ChoiceValue;
use crate::concept::Particle;
use crate::implicit::Goal;
use crate::subst::Substitution;
use crate::symbol::{ConceptName, NameKind, RoleName, SymbolTable};

/// The residual goal has more atoms than fit one `u128` candidate mask.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
#[error("residual goal has {0} atoms; the shortcut search supports at most 127")]
pub struct CapacityExceeded(pub usize);

#[derive(Clone, Debug)]
pub enum ComputeOutcome {
    Success(ShortcutStore),
    Failure,
}

#[derive(Clone, Debug)]
struct Shortcut {
    members: u128,
    /// Per role occurring among decomposition members: the index of the
    /// earlier shortcut that resolves it.  Strictly earlier, so the
    /// admission graph is acyclic.
    resolvers: Vec<(RoleName, usize)>,
}

/// The admitted shortcuts of a successful search.
#[derive(Clone, Debug)]
pub struct ShortcutStore {
    /// Bit index → atom: non-⊤ variables in registry order, constant last.
    universe: Vec<ConceptName>,
    shortcuts: Vec<Shortcut>,
    /// Index of the shortcut whose members are the start variables plus
    /// the constant.
    ini: usize,
}

impl ShortcutStore {
    /// Admitted member sets in admission order, as names.
    pub fn admitted(&self) -> Vec<BTreeSet<ConceptName>> {
        self.shortcuts
            .iter()
            .map(|s| {
                (0..self.universe.len())
                    .filter(|&b| s.members & (1u128 << b) != 0)
                    .map(|b| self.universe[b])
                    .collect()
            })
            .collect()
    }
}

fn mask_satisfies(m: u128, flats: &[(u128, u128)]) -> bool {
    flats
        .iter()
        .all(|&(rhs, lhs)| m & rhs == 0 || m & lhs != 0)
}

struct Search<'a, 'g> {
    goal: &'a Goal<'g>,
    universe: Vec<ConceptName>,
    const_bit: usize,
    /// Unsolved subsumptions as (right-side bit, left-side mask).
    flats: Vec<(u128, u128)>,
    /// Per bit: `(role, parent bit)` when the atom is a role
    /// decomposition.  A missing parent bit can never become good.
    decomp_info: Vec<Option<(RoleName, Option<usize>)>>,
    /// Per bit: this goal's role decompositions of the atom, as
    /// `(role, child bit)`.  A missing child bit means the child's
    /// choice is ⊤.
    children: Vec<Vec<(RoleName, Option<usize>)>>,
}

impl<'a, 'g> Search<'a, 'g> {
    fn new(goal: &'a Goal<'g>, table: &SymbolTable) -> Result<Self, CapacityExceeded> {
        let mut universe: Vec<ConceptName> = goal
            .generic
            .registry
            .iter()
            .copied()
            .filter(|&v| goal.choice.value(v) != ChoiceValue::Top)
            .collect();
        universe.push(goal.generic.constant);
        if universe.len() > 127 {
            return Err(CapacityExceeded(universe.len()));
        }
        let const_bit = universe.len() - 1;
        let bit: BTreeMap<ConceptName, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let flats = goal
            .unsolved
            .iter()
            .map(|f| {
                let rhs = 1u128 << bit[&f.rhs];
                let lhs = f.lhs.iter().fold(0u128, |m, c| m | (1 << bit[c]));
                (rhs, lhs)
            })
            .collect();
        let decomp_info = universe
            .iter()
            .map(|&v| match table.kind(v) {
                NameKind::Decomposition { parent, role } => {
                    Some((role, bit.get(&parent).copied()))
                }
                _ => None,
            })
            .collect();
        let children = universe
            .iter()
            .map(|&v| {
                goal.generic
                    .decomp_children
                    .get(&v)
                    .map(|kids| {
                        kids.iter()
                            .map(|&(r, c)| (r, bit.get(&c).copied()))
                            .collect()
                    })
                    .unwrap_or_default()
            })
            .collect();
        Ok(Search {
            goal,
            universe,
            const_bit,
            flats,
            decomp_info,
            children,
        })
    }

    fn satisfies(&self, m: u128) -> bool {
        mask_satisfies(m, &self.flats)
    }

    /// Can `s2` hand every member of `s1` its `role`-successor particle?
    /// Every `role`-decomposition in `s1` needs its parent in `s2`, and
    /// every `s2` member with a `role`-decomposition needs it in `s1`.
    fn resolves(&self, s2: u128, s1: u128, role: RoleName) -> bool {
        for b in 0..self.universe.len() {
            let bmask = 1u128 << b;
            if s1 & bmask != 0 {
                if let Some((r, parent)) = self.decomp_info[b] {
                    if r == role && !parent.is_some_and(|p| s2 & (1u128 << p) != 0) {
                        return false;
                    }
                }
            }
            if s2 & bmask != 0 && b != self.const_bit {
                for &(r, child) in &self.children[b] {
                    if r == role && !child.is_some_and(|c| s1 & (1u128 << c) != 0) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&self) -> ComputeOutcome {
        let s_ini = self
            .goal
            .starts
            .iter()
            .fold(1u128 << self.const_bit, |m, v| {
                let b = self
                    .universe
                    .iter()
                    .position(|u| u == v)
                    .expect("start variables are never ⊤");
                m | (1u128 << b)
            });
        let const_mask = 1u128 << self.const_bit;
        // the target itself must satisfy every subsumption, or no round
        // can ever admit it
        if !self.satisfies(s_ini) {
            return ComputeOutcome::Failure;
        }

        let mut shortcuts: Vec<Shortcut> = Vec::new();
        let mut admitted_masks: BTreeSet<u128> = BTreeSet::new();
        loop {
            // decompositions become enumerable once their parent sits in
            // some shortcut admitted in an earlier round
            let union: u128 = shortcuts.iter().fold(0, |m, s| m | s.members);
            let allowed: Vec<usize> = (0..self.universe.len())
                .filter(|&b| match self.decomp_info[b] {
                    _ if b == self.const_bit => true,
                    None => true,
                    Some((_, parent)) => {
                        parent.is_some_and(|p| union & (1u128 << p) != 0)
                    }
                })
                .collect();
            let na = allowed.len() as u32;
            let mut progressed = false;
            for k in 1..=na {
                let mut comp: u128 = (1u128 << k) - 1;
                while comp < (1u128 << na) {
                    let m = allowed
                        .iter()
                        .enumerate()
                        .fold(0u128, |acc, (j, &b)| {
                            if comp & (1u128 << j) != 0 {
                                acc | (1u128 << b)
                            } else {
                                acc
                            }
                        });
                    // advance before the admission checks so `continue`
                    // style exits stay simple
                    let c = comp & comp.wrapping_neg();
                    let r = comp + c;
                    comp = (((r ^ comp) >> 2) / c) | r;

                    if m & const_mask != 0 && m != s_ini {
                        continue;
                    }
                    if admitted_masks.contains(&m) || !self.satisfies(m) {
                        continue;
                    }
                    let roles: BTreeSet<RoleName> = (0..self.universe.len())
                        .filter(|&b| m & (1u128 << b) != 0)
                        .filter_map(|b| self.decomp_info[b].map(|(r, _)| r))
                        .collect();
                    let mut resolvers = Vec::new();
                    let mut ok = true;
                    for role in roles {
                        match (0..shortcuts.len())
                            .find(|&j| self.resolves(shortcuts[j].members, m, role))
                        {
                            Some(j) => resolvers.push((role, j)),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    shortcuts.push(Shortcut { members: m, resolvers });
                    admitted_masks.insert(m);
                    progressed = true;
                    if m == s_ini {
                        let ini = shortcuts.len() - 1;
                        return ComputeOutcome::Success(ShortcutStore {
                            universe: self.universe.clone(),
                            shortcuts,
                            ini,
                        });
                    }
                }
            }
            if !progressed {
                return ComputeOutcome::Failure;
            }
        }
    }
}

/// Search for a shortcut admission of the start set.  Candidates are
/// enumerated smallest-first (by size, then numerically), so reruns admit
/// identical sequences.
pub fn compute(
    goal: &Goal<'_>,
    table: &SymbolTable,
) -> Result<ComputeOutcome, CapacityExceeded> {
    Ok(Search::new(goal, table)?.run())
}

/// Read a unifier off a successful admission: the start shortcut's members
/// take the bare constant, and each resolver's members additionally take
/// the role-prefixed particles, transitively.
pub fn extract_unifier(store: &ShortcutStore) -> Substitution {
    let constant = *store.universe.last().expect("universe holds the constant");
    let mut sigma = Substitution::new();
    let seed = (store.ini, Particle::name(constant));
    let mut seen: BTreeSet<(usize, Particle)> = BTreeSet::from([seed.clone()]);
    let mut work = vec![seed];
    while let Some((idx, p)) = work.pop() {
        let s = &store.shortcuts[idx];
        for b in 0..store.universe.len() {
            let atom = store.universe[b];
            if s.members & (1u128 << b) != 0 && atom != constant {
                sigma.add_particle(atom, p.clone());
            }
        }
        for &(role, j) in &s.resolvers {
            let next = (j, p.prefixed(role));
            if seen.insert(next.clone()) {
                work.push(next);
            }
        }
    }
    sigma
}
