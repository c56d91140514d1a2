//! Input/output for unification problems and solutions.
//!
//! Two input formats are supported: a small s-expression syntax (`.flu`) and a
//! line-oriented subset of the OWL functional syntax (`.ofn`). Both produce the
//! same in-memory representation, [`ProblemSource`].

use std::path::Path;

use thiserror::Error;

use crate::concept::{concept_to_expr, Concept, ConceptExpr};
use crate::subst::Substitution;
use crate::symbol::{NameKind, SymbolTable};

mod flu;
mod ofn;

pub use flu::parse_flu;
pub use ofn::parse_ofn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: expected {expected}")]
    Syntax { line: u32, col: u32, expected: String },
    #[error("{line}:{col}: unsupported constructor `{what}`")]
    Unsupported { line: u32, col: u32, what: String },
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
}

impl ParseError {
    fn syntax(line: u32, col: u32, expected: impl Into<String>) -> Self {
        ParseError::Syntax { line, col, expected: expected.into() }
    }

    fn unsupported(line: u32, col: u32, what: impl Into<String>) -> Self {
        ParseError::Unsupported { line, col, what: what.into() }
    }
}

/// A subsumption or equivalence between two concept terms, as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axiom {
    Subsumption(ConceptExpr, ConceptExpr),
    Equivalence(ConceptExpr, ConceptExpr),
}

impl Axiom {
    pub fn sides(&self) -> (&ConceptExpr, &ConceptExpr) {
        match self {
            Axiom::Subsumption(l, r) | Axiom::Equivalence(l, r) => (l, r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Flu,
    Ofn,
}

impl InputFormat {
    /// Guess the format from a file extension; `None` if unrecognized.
    pub fn from_path(path: &Path) -> Option<InputFormat> {
        match path.extension()?.to_str()? {
            "flu" => Some(InputFormat::Flu),
            "ofn" | "owl" | "ofn1" => Some(InputFormat::Ofn),
            _ => None,
        }
    }
}

/// A parsed unification problem: a symbol table plus the axioms to solve.
#[derive(Debug)]
pub struct ProblemSource {
    pub table: SymbolTable,
    pub axioms: Vec<Axiom>,
}

impl ProblemSource {
    pub fn parse(text: &str, format: InputFormat) -> Result<ProblemSource, ParseError> {
        let mut table = SymbolTable::new();
        let axioms = match format {
            InputFormat::Flu => parse_flu(text, &mut table)?,
            InputFormat::Ofn => parse_ofn(text, &mut table)?,
        };
        Ok(ProblemSource { table, axioms })
    }

    /// Constants occurring in the axioms, sorted by name.
    pub fn constants(&self) -> Vec<crate::symbol::ConceptName> {
        let mut seen = std::collections::BTreeSet::new();
        for ax in &self.axioms {
            let (l, r) = ax.sides();
            collect_names(l, &mut seen);
            collect_names(r, &mut seen);
        }
        let mut out: Vec<_> = seen
            .into_iter()
            .filter(|&n| self.table.kind(n) == NameKind::Constant)
            .collect();
        out.sort_by(|&a, &b| self.table.name_text(a).cmp(self.table.name_text(b)));
        out
    }

    /// User variables occurring in the axioms, in interning order.
    pub fn user_variables(&self) -> Vec<crate::symbol::ConceptName> {
        let mut seen = std::collections::BTreeSet::new();
        for ax in &self.axioms {
            let (l, r) = ax.sides();
            collect_names(l, &mut seen);
            collect_names(r, &mut seen);
        }
        seen.into_iter()
            .filter(|&n| self.table.kind(n) == NameKind::UserVariable)
            .collect()
    }
}

fn collect_names(expr: &ConceptExpr, out: &mut std::collections::BTreeSet<crate::symbol::ConceptName>) {
    match expr {
        ConceptExpr::Top => {}
        ConceptExpr::Name(n) => {
            out.insert(*n);
        }
        ConceptExpr::And(parts) => {
            for p in parts {
                collect_names(p, out);
            }
        }
        ConceptExpr::All(_, inner) => collect_names(inner, out),
    }
}

/// Parse a solution file: a sequence of `(equiv X_var <concept>)` entries.
///
/// Names are interned into `table` so they line up with a previously parsed
/// problem. Every entry must define a distinct user variable.
pub fn parse_solution(text: &str, table: &mut SymbolTable) -> Result<Substitution, ParseError> {
    let axioms = parse_flu(text, table)?;
    let mut sigma = Substitution::new();
    for ax in &axioms {
        let (lhs, rhs) = match ax {
            Axiom::Equivalence(l, r) => (l, r),
            Axiom::Subsumption(..) => {
                return Err(ParseError::InvalidSolution(
                    "solution entries must be equivalences".into(),
                ))
            }
        };
        let var = match lhs {
            ConceptExpr::Name(n) if table.is_variable(*n) => *n,
            _ => {
                return Err(ParseError::InvalidSolution(
                    "left-hand side of each entry must be a variable".into(),
                ))
            }
        };
        if sigma.get(var).is_some() {
            return Err(ParseError::InvalidSolution(format!(
                "duplicate definition for {}",
                table.name_text(var)
            )));
        }
        sigma.insert(var, rhs.normalize());
    }
    Ok(sigma)
}

/// Render a concept expression in the s-expression syntax.
pub fn render_expr(expr: &ConceptExpr, table: &SymbolTable) -> String {
    match expr {
        ConceptExpr::Top => "top".into(),
        ConceptExpr::Name(n) => table.name_text(*n).into(),
        ConceptExpr::And(parts) => {
            let inner: Vec<String> = parts.iter().map(|p| render_expr(p, table)).collect();
            format!("(and {})", inner.join(" "))
        }
        ConceptExpr::All(role, inner) => {
            format!("(all {} {})", table.role_text(*role), render_expr(inner, table))
        }
    }
}

/// Render a normal-form concept (canonical: sorted particles, nested alls).
pub fn render_concept(c: &Concept, table: &SymbolTable) -> String {
    render_expr(&concept_to_expr(c), table)
}

/// Render a whole problem in the s-expression syntax.
pub fn render_problem(source: &ProblemSource) -> String {
    let mut out = String::new();
    let roles: Vec<String> =
        source.table.roles().map(|r| source.table.role_text(r).to_string()).collect();
    if !roles.is_empty() {
        out.push_str(&format!("(roles {})\n", roles.join(" ")));
    }
    for ax in &source.axioms {
        let line = match ax {
            Axiom::Subsumption(l, r) => format!(
                "(sub {} {})",
                render_expr(l, &source.table),
                render_expr(r, &source.table)
            ),
            Axiom::Equivalence(l, r) => format!(
                "(equiv {} {})",
                render_expr(l, &source.table),
                render_expr(r, &source.table)
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Render a substitution as solution entries, sorted by variable name.
pub fn render_substitution(sigma: &Substitution, table: &SymbolTable) -> String {
    let mut entries: Vec<(String, String)> = sigma
        .iter()
        .map(|(v, c)| (table.name_text(v).to_string(), render_concept(c, table)))
        .collect();
    entries.sort();
    let mut out = String::new();
    for (name, body) in entries {
        out.push_str(&format!("(equiv {} {})\n", name, body));
    }
    out
}
