//! ALC concept expressions.

use std::collections::BTreeSet;
use std::fmt;

/// An ALC concept description.
///
/// Conjunction and disjunction are strictly binary; the text syntax accepts
/// n-ary forms and folds them to the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atomic(String),
    Top,
    Bottom,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    ForAll(String, Box<Concept>),
    Exists(String, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(l: Concept, r: Concept) -> Self {
        Concept::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Concept, r: Concept) -> Self {
        Concept::Or(Box::new(l), Box::new(r))
    }

    pub fn all(role: impl Into<String>, c: Concept) -> Self {
        Concept::ForAll(role.into(), Box::new(c))
    }

    pub fn some(role: impl Into<String>, c: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(c))
    }

    /// Syntax-tree size, counting `∃R.` and `∀R.` as single nodes.
    pub fn size(&self) -> usize {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => 1,
            Concept::Not(c) | Concept::ForAll(_, c) | Concept::Exists(_, c) => 1 + c.size(),
            Concept::And(l, r) | Concept::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => 0,
            Concept::Not(c) | Concept::ForAll(_, c) | Concept::Exists(_, c) => 1 + c.depth(),
            Concept::And(l, r) | Concept::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Negation normal form: negation is pushed inward until it sits on
    /// concept names only. `¬⊤` and `¬⊥` become `⊥` and `⊤`.
    pub fn nnf(&self) -> Concept {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => self.clone(),
            Concept::Not(c) => c.negated_nnf(),
            Concept::And(l, r) => Concept::and(l.nnf(), r.nnf()),
            Concept::Or(l, r) => Concept::or(l.nnf(), r.nnf()),
            Concept::ForAll(role, c) => Concept::all(role.clone(), c.nnf()),
            Concept::Exists(role, c) => Concept::some(role.clone(), c.nnf()),
        }
    }

    /// `nnf(¬self)` without building the intermediate negation.
    pub fn negated_nnf(&self) -> Concept {
        match self {
            Concept::Atomic(_) => Concept::not(self.clone()),
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Not(c) => c.nnf(),
            Concept::And(l, r) => Concept::or(l.negated_nnf(), r.negated_nnf()),
            Concept::Or(l, r) => Concept::and(l.negated_nnf(), r.negated_nnf()),
            Concept::ForAll(role, c) => Concept::some(role.clone(), c.negated_nnf()),
            Concept::Exists(role, c) => Concept::all(role.clone(), c.negated_nnf()),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => true,
            Concept::Not(c) => matches!(**c, Concept::Atomic(_)),
            Concept::And(l, r) | Concept::Or(l, r) => l.is_nnf() && r.is_nnf(),
            Concept::ForAll(_, c) | Concept::Exists(_, c) => c.is_nnf(),
        }
    }

    /// Adds every subconcept of `self` (including `self`) to `out`.
    pub fn collect_subconcepts(&self, out: &mut BTreeSet<Concept>) {
        if out.contains(self) {
            return;
        }
        out.insert(self.clone());
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => {}
            Concept::Not(c) | Concept::ForAll(_, c) | Concept::Exists(_, c) => c.collect_subconcepts(out),
            Concept::And(l, r) | Concept::Or(l, r) => {
                l.collect_subconcepts(out);
                r.collect_subconcepts(out);
            }
        }
    }

    pub fn subconcepts(&self) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        self.collect_subconcepts(&mut out);
        out
    }

    pub fn collect_names(&self, concepts: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
        match self {
            Concept::Atomic(n) => {
                concepts.insert(n.clone());
            }
            Concept::Top | Concept::Bottom => {}
            Concept::Not(c) => c.collect_names(concepts, roles),
            Concept::And(l, r) | Concept::Or(l, r) => {
                l.collect_names(concepts, roles);
                r.collect_names(concepts, roles);
            }
            Concept::ForAll(role, c) | Concept::Exists(role, c) => {
                roles.insert(role.clone());
                c.collect_names(concepts, roles);
            }
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atomic(n) => write!(f, "{n}"),
            Concept::Top => write!(f, "Top"),
            Concept::Bottom => write!(f, "Bottom"),
            Concept::Not(c) => write!(f, "Not({c})"),
            Concept::And(l, r) => write!(f, "And({l} {r})"),
            Concept::Or(l, r) => write!(f, "Or({l} {r})"),
            Concept::ForAll(role, c) => write!(f, "All({role} {c})"),
            Concept::Exists(role, c) => write!(f, "Some({role} {c})"),
        }
    }
}
