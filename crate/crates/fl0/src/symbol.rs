//! Interned role and concept names.
//!
//! Every name that occurs in a problem is interned once; the rest of the
//! crate works with the copyable ids. The table also owns the bookkeeping
//! for the variables the solver invents: fresh abstraction variables and
//! the decomposition variables `X^r` / `X_A`, which are unique per
//! `(parent, role)` and `(parent, constant)` pair.

use std::collections::HashMap;

/// Interned role name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RoleName(u32);

/// Interned concept name (constant or any variable kind).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ConceptName(u32);

impl ConceptName {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// What a concept name stands for, and hence whether it may be substituted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NameKind {
    /// Plain concept name from the input; never substituted.
    Constant,
    /// Variable from the input (`_var` suffix).
    UserVariable,
    /// Fresh variable introduced while flattening nested value restrictions.
    SystemVariable,
    /// `X^r`: holds what sits behind role `r` in the parent's value.
    Decomposition { parent: ConceptName, role: RoleName },
    /// `X_A`: holds the constant `A` exactly when the parent's value does.
    ConstantDecomposition {
        parent: ConceptName,
        constant: ConceptName,
    },
}

impl NameKind {
    pub fn is_variable(self) -> bool {
        !matches!(self, NameKind::Constant)
    }
}

#[derive(Clone, Debug)]
struct NameInfo {
    text: String,
    kind: NameKind,
}

/// Interning table for one problem.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    roles: Vec<String>,
    role_ids: HashMap<String, RoleName>,
    names: Vec<NameInfo>,
    name_ids: HashMap<String, ConceptName>,
    decompositions: HashMap<(ConceptName, RoleName), ConceptName>,
    constant_decompositions: HashMap<(ConceptName, ConceptName), ConceptName>,
    next_system: u32,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_role(&mut self, text: &str) -> RoleName {
        if let Some(&id) = self.role_ids.get(text) {
            return id;
        }
        let id = RoleName(self.roles.len() as u32);
        self.roles.push(text.to_owned());
        self.role_ids.insert(text.to_owned(), id);
        id
    }

    /// Interns a name from the input; the `_var` suffix marks user variables.
    pub fn intern_concept(&mut self, text: &str) -> ConceptName {
        if let Some(&id) = self.name_ids.get(text) {
            return id;
        }
        let kind = if text.ends_with("_var") {
            NameKind::UserVariable
        } else {
            NameKind::Constant
        };
        self.push_name(text.to_owned(), kind)
    }

    /// Fresh abstraction variable, named `Var0`, `Var1`, ... skipping any
    /// name the input already claimed.
    pub fn fresh_system_variable(&mut self) -> ConceptName {
        loop {
            let text = format!("Var{}", self.next_system);
            self.next_system += 1;
            if !self.name_ids.contains_key(&text) {
                return self.push_name(text, NameKind::SystemVariable);
            }
        }
    }

    /// The decomposition variable `parent^role`, created on first use.
    pub fn decomposition_variable(&mut self, parent: ConceptName, role: RoleName) -> ConceptName {
        if let Some(&id) = self.decompositions.get(&(parent, role)) {
            return id;
        }
        let text = self.unused_name(&format!(
            "{}__d_{}",
            self.name_text(parent),
            self.role_text(role)
        ));
        let id = self.push_name(text, NameKind::Decomposition { parent, role });
        self.decompositions.insert((parent, role), id);
        id
    }

    /// The constant decomposition variable `parent_constant`, created on first use.
    pub fn constant_decomposition_variable(
        &mut self,
        parent: ConceptName,
        constant: ConceptName,
    ) -> ConceptName {
        if let Some(&id) = self.constant_decompositions.get(&(parent, constant)) {
            return id;
        }
        let text = self.unused_name(&format!(
            "{}__c_{}",
            self.name_text(parent),
            self.name_text(constant)
        ));
        let id = self.push_name(
            text,
            NameKind::ConstantDecomposition { parent, constant },
        );
        self.constant_decompositions.insert((parent, constant), id);
        id
    }

    /// Existing decomposition variable for `(parent, role)`, if any.
    pub fn decomposition_of(&self, parent: ConceptName, role: RoleName) -> Option<ConceptName> {
        self.decompositions.get(&(parent, role)).copied()
    }

    pub fn kind(&self, name: ConceptName) -> NameKind {
        self.names[name.index()].kind
    }

    pub fn is_variable(&self, name: ConceptName) -> bool {
        self.kind(name).is_variable()
    }

    pub fn name_text(&self, name: ConceptName) -> &str {
        &self.names[name.index()].text
    }

    pub fn role_text(&self, role: RoleName) -> &str {
        &self.roles[role.0 as usize]
    }

    pub fn lookup_concept(&self, text: &str) -> Option<ConceptName> {
        self.name_ids.get(text).copied()
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    /// All interned roles in interning order.
    pub fn roles(&self) -> impl Iterator<Item = RoleName> + '_ {
        (0..self.roles.len() as u32).map(RoleName)
    }

    pub fn concept_count(&self) -> usize {
        self.names.len()
    }

    /// All interned concept names in interning order.
    pub fn concepts(&self) -> impl Iterator<Item = ConceptName> + '_ {
        (0..self.names.len() as u32).map(ConceptName)
    }

    fn push_name(&mut self, text: String, kind: NameKind) -> ConceptName {
        let id = ConceptName(self.names.len() as u32);
        self.name_ids.insert(text.clone(), id);
        self.names.push(NameInfo { text, kind });
        id
    }

    fn unused_name(&self, base: &str) -> String {
        if !self.name_ids.contains_key(base) {
            return base.to_owned();
        }
        let mut n = 2u32;
        loop {
            let candidate = format!("{base}{n}");
            if !self.name_ids.contains_key(&candidate) {
                return candidate;
            }
            n += 1;
        }
    }
}
