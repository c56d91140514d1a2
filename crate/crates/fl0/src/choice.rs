//! Per-variable choice tables and their enumeration.
//!
//! Every goal variable is assigned one of three values describing the shape
//! its solution value must take: [`ChoiceValue::Top`] (the value is ⊤),
//! [`ChoiceValue::Constant`] (the value contains the goal constant as a bare
//! particle), or [`ChoiceValue::Nothing`] (neither).  Structural fixing rules
//! pin some variables up front; the remainder are enumerated in a fixed
//! deterministic order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::flatten::GenericGoal;
use crate::symbol::{ConceptName, SymbolTable};

/// Shape of one variable's solution value.  Ordered `Top < Constant <
/// Nothing`; the order is the enumeration order of candidate values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ChoiceValue {
    Top,
    Constant,
    Nothing,
}

impl ChoiceValue {
    pub const ALL: [ChoiceValue; 3] = [
        ChoiceValue::Top,
        ChoiceValue::Constant,
        ChoiceValue::Nothing,
    ];

    /// Position in [`ChoiceValue::ALL`]; also the digit printed in traces.
    pub fn digit(self) -> u8 {
        match self {
            ChoiceValue::Top => 0,
            ChoiceValue::Constant => 1,
            ChoiceValue::Nothing => 2,
        }
    }
}

const TOP: u8 = 1;
const CONST: u8 = 2;
const NOTHING: u8 = 4;
const ANY: u8 = TOP | CONST | NOTHING;

fn value_bit(value: ChoiceValue) -> u8 {
    1 << value.digit()
}

/// Two fixing rules demanded incompatible values for the same variable.
/// The whole constant fails without enumerating anything.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("no admissible choice for variable {name}")]
pub struct ContradictoryFix {
    pub name: String,
}

/// Result of the fixing pass: variables partitioned by how many values
/// remain admissible for them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChoiceState {
    registry: Vec<ConceptName>,
    fixed: BTreeMap<ConceptName, ChoiceValue>,
    /// Two admissible values, ascending; registry order.
    binary: Vec<(ConceptName, [ChoiceValue; 2])>,
    /// All three values admissible; registry order.
    ternary: Vec<ConceptName>,
}

impl ChoiceState {
    pub fn fixed(&self) -> &BTreeMap<ConceptName, ChoiceValue> {
        &self.fixed
    }

    pub fn binary(&self) -> &[(ConceptName, [ChoiceValue; 2])] {
        &self.binary
    }

    pub fn ternary(&self) -> &[ConceptName] {
        &self.ternary
    }

    /// Number of choices [`ChoiceState::choices`] will yield.
    pub fn total(&self) -> u128 {
        (1u128 << self.binary.len()) * 3u128.pow(self.ternary.len() as u32)
    }

    /// Enumerate all choices.  The binary table is the fast counter, the
    /// ternary table the slow one; within each table the rightmost digit
    /// moves fastest.  The first choice takes the lowest value everywhere.
    pub fn choices(&self) -> Choices<'_> {
        Choices {
            state: self,
            bin: vec![0; self.binary.len()],
            ter: vec![0; self.ternary.len()],
            exhausted: false,
        }
    }
}

/// A complete assignment for every variable of one goal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Choice {
    order: Vec<ConceptName>,
    values: BTreeMap<ConceptName, ChoiceValue>,
}

impl Choice {
    /// Build a choice directly; `values` must cover exactly `order`.
    pub fn from_values(
        order: Vec<ConceptName>,
        values: BTreeMap<ConceptName, ChoiceValue>,
    ) -> Choice {
        assert_eq!(order.len(), values.len());
        debug_assert!(order.iter().all(|v| values.contains_key(v)));
        Choice { order, values }
    }

    /// Panics if `var` is not a variable of the goal.
    pub fn value(&self, var: ConceptName) -> ChoiceValue {
        self.values[&var]
    }

    /// The assignment in registry order.
    pub fn tuple(&self) -> Vec<ChoiceValue> {
        self.order.iter().map(|&v| self.values[&v]).collect()
    }

    /// Registry-ordered variables this choice assigns.
    pub fn vars(&self) -> &[ConceptName] {
        &self.order
    }

    /// Digit rendering in registry order, e.g. `(0,1,0,0,0)`.
    pub fn digits(&self) -> String {
        let inner: Vec<String> = self
            .tuple()
            .iter()
            .map(|v| v.digit().to_string())
            .collect();
        format!("({})", inner.join(","))
    }
}

pub struct Choices<'a> {
    state: &'a ChoiceState,
    bin: Vec<usize>,
    ter: Vec<usize>,
    exhausted: bool,
}

/// Increment a counter with the rightmost digit fastest; false on wrap.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        if *d + 1 < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

impl Iterator for Choices<'_> {
    type Item = Choice;

    fn next(&mut self) -> Option<Choice> {
        if self.exhausted {
            return None;
        }
        let mut values = self.state.fixed.clone();
        for (i, &(var, domain)) in self.state.binary.iter().enumerate() {
            values.insert(var, domain[self.bin[i]]);
        }
        for (j, &var) in self.state.ternary.iter().enumerate() {
            values.insert(var, ChoiceValue::ALL[self.ter[j]]);
        }
        let choice = Choice {
            order: self.state.registry.clone(),
            values,
        };
        if !advance(&mut self.bin, 2) && !advance(&mut self.ter, 3) {
            self.exhausted = true;
        }
        Some(choice)
    }
}

fn narrow(
    allowed: &mut BTreeMap<ConceptName, u8>,
    var: ConceptName,
    mask: u8,
    table: &SymbolTable,
) -> Result<bool, ContradictoryFix> {
    let slot = allowed.get_mut(&var).expect("narrowing a goal variable");
    let next = *slot & mask;
    if next == 0 {
        return Err(ContradictoryFix {
            name: table.name_text(var).to_string(),
        });
    }
    let changed = next != *slot;
    *slot = next;
    Ok(changed)
}

/// Narrow the admissible values of every goal variable to a fixpoint.
///
/// The rules, each run until nothing changes:
/// - `⊤ ⊑ X` forces `X` to `Top`;
/// - `a ⊑ X` (constant alone on the left) rules out `Nothing` for `X`;
/// - `X ⊑ a` (variable alone on the left) forces `X` to `Constant`;
/// - a `Top`-fixed variable drags all its decomposition variables to `Top`;
/// - a variable fixed away from `Constant` drags its constant decomposition
///   to `Top`;
/// - a `Top`-fixed constant decomposition rules out `Constant` for its
///   parent.
pub fn fix_choices(
    goal: &GenericGoal,
    table: &SymbolTable,
) -> Result<ChoiceState, ContradictoryFix> {
    let mut allowed: BTreeMap<ConceptName, u8> =
        goal.registry.iter().map(|&v| (v, ANY)).collect();
    loop {
        let mut changed = false;
        for f in &goal.flats {
            if table.is_variable(f.rhs) {
                if f.lhs.is_empty() {
                    changed |= narrow(&mut allowed, f.rhs, TOP, table)?;
                } else if f.lhs.len() == 1 && f.lhs.contains(&goal.constant) {
                    changed |= narrow(&mut allowed, f.rhs, TOP | CONST, table)?;
                }
            } else if f.lhs.len() == 1 {
                let &atom = f.lhs.iter().next().unwrap();
                if table.is_variable(atom) {
                    changed |= narrow(&mut allowed, atom, CONST, table)?;
                }
            }
        }
        for (&parent, children) in &goal.decomp_children {
            if allowed[&parent] == TOP {
                for &(_, child) in children {
                    changed |= narrow(&mut allowed, child, TOP, table)?;
                }
            }
        }
        for &(parent, xa) in &goal.const_decomp {
            let p = allowed[&parent];
            if p == TOP || p == NOTHING {
                changed |= narrow(&mut allowed, xa, TOP, table)?;
            }
            if allowed[&xa] == TOP {
                changed |= narrow(&mut allowed, parent, TOP | NOTHING, table)?;
            }
        }
        if !changed {
            break;
        }
    }

    let mut fixed = BTreeMap::new();
    let mut binary = Vec::new();
    let mut ternary = Vec::new();
    for &v in &goal.registry {
        let mask = allowed[&v];
        let vals: Vec<ChoiceValue> = ChoiceValue::ALL
            .iter()
            .copied()
            .filter(|&c| mask & value_bit(c) != 0)
            .collect();
        match vals[..] {
            [only] => {
                fixed.insert(v, only);
            }
            [lo, hi] => binary.push((v, [lo, hi])),
            _ => ternary.push(v),
        }
    }
    Ok(ChoiceState {
        registry: goal.registry.clone(),
        fixed,
        binary,
        ternary,
    })
}

/// Cheap structural filter run before building a goal from a choice.
///
/// A choice is inconsistent when a `Top` variable has a non-`Top`
/// decomposition variable, or a constant decomposition disagrees with its
/// parent about `Constant`.
pub fn is_consistent(goal: &GenericGoal, choice: &Choice) -> bool {
    for (&parent, children) in &goal.decomp_children {
        if choice.value(parent) == ChoiceValue::Top
            && children
                .iter()
                .any(|&(_, child)| choice.value(child) != ChoiceValue::Top)
        {
            return false;
        }
    }
    for &(parent, xa) in &goal.const_decomp {
        let parent_constant = choice.value(parent) == ChoiceValue::Constant;
        let xa_constant = choice.value(xa) == ChoiceValue::Constant;
        if parent_constant != xa_constant {
            return false;
        }
    }
    true
}
