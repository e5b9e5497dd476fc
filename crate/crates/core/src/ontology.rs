//! Axioms, ontologies and their signatures.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::concept::Concept;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// General concept inclusion `lhs ⊑ rhs`.
    Subsumption { lhs: Concept, rhs: Concept },
    /// `concept(individual)`.
    ClassAssertion { concept: Concept, individual: String },
    /// `role(subject, object)`.
    RoleAssertion { role: String, subject: String, object: String },
}

impl Axiom {
    pub fn gci(lhs: Concept, rhs: Concept) -> Self {
        Axiom::Subsumption { lhs, rhs }
    }

    pub fn class(concept: Concept, individual: impl Into<String>) -> Self {
        Axiom::ClassAssertion { concept, individual: individual.into() }
    }

    pub fn role(role: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Axiom::RoleAssertion { role: role.into(), subject: subject.into(), object: object.into() }
    }

    /// `|C| + |D|` for a GCI, `|C|` for a class assertion, 0 for role assertions.
    pub fn size(&self) -> usize {
        match self {
            Axiom::Subsumption { lhs, rhs } => lhs.size() + rhs.size(),
            Axiom::ClassAssertion { concept, .. } => concept.size(),
            Axiom::RoleAssertion { .. } => 0,
        }
    }

    pub fn is_role_assertion(&self) -> bool {
        matches!(self, Axiom::RoleAssertion { .. })
    }

    fn collect_signature(&self, sig: &mut Signature) {
        match self {
            Axiom::Subsumption { lhs, rhs } => {
                lhs.collect_names(&mut sig.concepts, &mut sig.roles);
                rhs.collect_names(&mut sig.concepts, &mut sig.roles);
            }
            Axiom::ClassAssertion { concept, individual } => {
                concept.collect_names(&mut sig.concepts, &mut sig.roles);
                sig.individuals.insert(individual.clone());
            }
            Axiom::RoleAssertion { role, subject, object } => {
                sig.roles.insert(role.clone());
                sig.individuals.insert(subject.clone());
                sig.individuals.insert(object.clone());
            }
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Subsumption { lhs, rhs } => write!(f, "SubClassOf({lhs} {rhs})"),
            Axiom::ClassAssertion { concept, individual } => {
                write!(f, "ClassAssertion({concept} {individual})")
            }
            Axiom::RoleAssertion { role, subject, object } => {
                write!(f, "PropertyAssertion({role} {subject} {object})")
            }
        }
    }
}

/// Concept, role and individual names occurring in an ontology.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

/// An ordered, duplicate-free collection of axioms.
///
/// Ontologies are never mutated in place; the editing helpers return new
/// values so that repair runs can share their inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ontology {
    axioms: Vec<Axiom>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an ontology keeping the first occurrence of each axiom.
    pub fn from_axioms(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        let mut seen = HashSet::new();
        let axioms = axioms.into_iter().filter(|a| seen.insert(a.clone())).collect();
        Ontology { axioms }
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn contains(&self, ax: &Axiom) -> bool {
        self.axioms.contains(ax)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Axiom> {
        self.axioms.iter()
    }

    /// A copy with `ax` appended (no-op if already present).
    pub fn with(&self, ax: Axiom) -> Ontology {
        let mut axioms = self.axioms.clone();
        if !axioms.contains(&ax) {
            axioms.push(ax);
        }
        Ontology { axioms }
    }

    pub fn without(&self, ax: &Axiom) -> Ontology {
        Ontology { axioms: self.axioms.iter().filter(|a| *a != ax).cloned().collect() }
    }

    /// A copy where `old` is replaced in place by `new`. If `new` already
    /// occurs elsewhere, `old` is simply dropped.
    pub fn replace(&self, old: &Axiom, new: Axiom) -> Ontology {
        if old == &new {
            return self.clone();
        }
        if self.contains(&new) {
            return self.without(old);
        }
        let axioms = self.axioms.iter().map(|a| if a == old { new.clone() } else { a.clone() }).collect();
        Ontology { axioms }
    }

    pub fn union(&self, other: &Ontology) -> Ontology {
        Ontology::from_axioms(self.axioms.iter().chain(other.axioms.iter()).cloned())
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.axioms {
            ax.collect_signature(&mut sig);
        }
        sig
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        self.signature().concepts
    }

    /// Sum of axiom sizes. Class assertions count the size of their concept.
    pub fn size(&self) -> usize {
        self.axioms.iter().map(Axiom::size).sum()
    }

    /// `sub(O)`: `⊤`, `⊥`, and every subconcept of every GCI side and
    /// class-assertion concept.
    pub fn subconcepts(&self) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        out.insert(Concept::Top);
        out.insert(Concept::Bottom);
        for ax in &self.axioms {
            match ax {
                Axiom::Subsumption { lhs, rhs } => {
                    lhs.collect_subconcepts(&mut out);
                    rhs.collect_subconcepts(&mut out);
                }
                Axiom::ClassAssertion { concept, .. } => concept.collect_subconcepts(&mut out),
                Axiom::RoleAssertion { .. } => {}
            }
        }
        out
    }

    /// The terminological part only.
    pub fn tbox(&self) -> Ontology {
        Ontology { axioms: self.axioms.iter().filter(|a| matches!(a, Axiom::Subsumption { .. })).cloned().collect() }
    }
}

impl<'a> IntoIterator for &'a Ontology {
    type Item = &'a Axiom;
    type IntoIter = std::slice::Iter<'a, Axiom>;

    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

impl FromIterator<Axiom> for Ontology {
    fn from_iter<I: IntoIterator<Item = Axiom>>(iter: I) -> Self {
        Ontology::from_axioms(iter)
    }
}
