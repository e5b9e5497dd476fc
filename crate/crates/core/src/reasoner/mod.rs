//! Consistency, subsumption and entailment for ALC ontologies.
//!
//! [`ReasonerSession`] wraps an immutable ontology and memoises subsumption
//! answers. Every public decision bumps a counter so callers can check
//! complexity bounds stated in terms of reasoner calls.

mod oracle;
pub(crate) mod store;
mod tableau;

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::concept::Concept;
use crate::error::Result;
use crate::ontology::{Axiom, Ontology};
use store::{CId, ConceptStore};
use tableau::{CompiledTbox, Completion, Query, SatCache, Tableau};

pub use oracle::{oracle_consistency, oracle_entails, FiniteInterpretation, OracleOutcome, DEFAULT_ORACLE_BOUND};

/// Default tableau node budget per decision.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Decides whether `o` has a model.
pub fn is_consistent(o: &Ontology) -> Result<bool> {
    ReasonerSession::new(o.clone()).is_consistent()
}

/// Compiled ABox: one root per individual, in signature order.
#[derive(Clone, Debug, Default)]
struct CompiledAbox {
    individuals: Vec<String>,
    index: FxHashMap<String, usize>,
    query: Query,
}

#[derive(Clone)]
pub struct ReasonerSession {
    ontology: Ontology,
    store: ConceptStore,
    tbox: CompiledTbox,
    sat: SatCache,
    abox: CompiledAbox,
    budget: usize,
    consistent: Option<bool>,
    subsumptions: FxHashMap<(CId, CId), bool>,
    models: FxHashMap<CId, Option<Completion>>,
    call_count: u64,
    cache_hits: u64,
}

impl ReasonerSession {
    pub fn new(ontology: Ontology) -> Self {
        Self::with_budget(ontology, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(ontology: Ontology, budget: usize) -> Self {
        let mut store = ConceptStore::new();
        let tbox = CompiledTbox::compile(
            &mut store,
            ontology.iter().filter_map(|ax| match ax {
                Axiom::Subsumption { lhs, rhs } => Some((lhs, rhs)),
                _ => None,
            }),
        );
        let mut abox = CompiledAbox::default();
        for ind in ontology.signature().individuals {
            abox.index.insert(ind.clone(), abox.individuals.len());
            abox.individuals.push(ind);
            abox.query.roots.push(Vec::new());
        }
        for ax in &ontology {
            match ax {
                Axiom::ClassAssertion { concept, individual } => {
                    let c = store.intern(concept);
                    abox.query.roots[abox.index[individual]].push(c);
                }
                Axiom::RoleAssertion { role, subject, object } => {
                    let r = store.role_id(role);
                    abox.query.edges.push((abox.index[subject], r, abox.index[object]));
                }
                Axiom::Subsumption { .. } => {}
            }
        }
        if abox.query.roots.is_empty() {
            abox.query.roots.push(Vec::new());
        }
        ReasonerSession {
            ontology,
            store,
            tbox,
            sat: SatCache::default(),
            abox,
            budget,
            consistent: None,
            subsumptions: FxHashMap::default(),
            models: FxHashMap::default(),
            call_count: 0,
            cache_hits: 0,
        }
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    /// The internalised TBox `⊓ (¬C ⊔ D)` over all GCIs, as a concept.
    pub fn internalized_tbox(&self) -> Concept {
        self.ontology
            .iter()
            .filter_map(|ax| match ax {
                Axiom::Subsumption { lhs, rhs } => Some(Concept::or(lhs.negated_nnf(), rhs.nnf())),
                _ => None,
            })
            .reduce(Concept::and)
            .unwrap_or(Concept::Top)
    }

    pub fn read_counter(&self) -> u64 {
        self.call_count
    }

    pub fn reset_counter(&mut self) {
        self.call_count = 0;
        self.cache_hits = 0;
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits
    }

    fn tableau(&mut self) -> Tableau<'_> {
        Tableau::new(&self.store, &self.tbox, &mut self.sat, self.budget)
    }

    fn run(&mut self, q: &Query) -> Result<Option<Completion>> {
        self.tableau().run(q)
    }

    fn consistent_uncounted(&mut self) -> Result<bool> {
        if let Some(c) = self.consistent {
            return Ok(c);
        }
        let q = std::mem::take(&mut self.abox.query);
        let r = self.run(&q);
        self.abox.query = q;
        let r = r?.is_some();
        self.consistent = Some(r);
        Ok(r)
    }

    pub fn is_consistent(&mut self) -> Result<bool> {
        self.call_count += 1;
        if self.consistent.is_some() {
            self.cache_hits += 1;
        }
        self.consistent_uncounted()
    }

    /// Model of `c` w.r.t. the TBox, cached. `None` if `c` is unsatisfiable.
    fn ensure_model(&mut self, c: CId) -> Result<()> {
        if !self.models.contains_key(&c) {
            let m = self.tableau().model(&[c])?;
            self.models.insert(c, m);
        }
        Ok(())
    }

    fn subsumed_ids(&mut self, c: CId, d: CId) -> Result<bool> {
        if c == d || d == self.store.top() || c == self.store.neg(self.store.top()) {
            return Ok(true);
        }
        if let Some(&v) = self.subsumptions.get(&(c, d)) {
            self.cache_hits += 1;
            return Ok(v);
        }
        let v = if !self.consistent_uncounted()? {
            true
        } else {
            // A consistent ontology adds no constraints on anonymous
            // elements beyond its TBox (disjoint union of models), so the
            // test runs against the TBox alone. Any model of `c` whose root
            // is outside `d` refutes the subsumption without a fresh run.
            self.ensure_model(c)?;
            let refuted = match &self.models[&c] {
                None => Some(true),
                Some(m) => {
                    if m.holds(&self.store, 0, d) {
                        None
                    } else {
                        Some(false)
                    }
                }
            };
            match refuted {
                Some(v) => v,
                None => {
                    let nd = self.store.neg(d);
                    !self.tableau().satisfiable(&[c, nd])?
                }
            }
        };
        self.subsumptions.insert((c, d), v);
        Ok(v)
    }

    /// `c ⊑ d` w.r.t. the ontology.
    pub fn is_subsumed(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        self.call_count += 1;
        let c = self.store.intern(c);
        let d = self.store.intern(d);
        self.subsumed_ids(c, d)
    }

    pub fn is_equivalent(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        Ok(self.is_subsumed(c, d)? && self.is_subsumed(d, c)?)
    }

    /// `c ⊏ d`: subsumed but not equivalent. Always issues both decisions.
    pub fn strictly_subsumed(&mut self, c: &Concept, d: &Concept) -> Result<bool> {
        let forward = self.is_subsumed(c, d)?;
        let backward = self.is_subsumed(d, c)?;
        Ok(forward && !backward)
    }

    /// Whether `c` is satisfiable w.r.t. the ontology.
    pub fn is_satisfiable(&mut self, c: &Concept) -> Result<bool> {
        Ok(!self.is_subsumed(c, &Concept::Bottom)?)
    }

    /// `O ⊨ ax`. Role assertions are entailed only if asserted (or if the
    /// ontology is inconsistent).
    pub fn entails(&mut self, ax: &Axiom) -> Result<bool> {
        match ax {
            Axiom::Subsumption { lhs, rhs } => self.is_subsumed(lhs, rhs),
            Axiom::ClassAssertion { concept, individual } => {
                self.call_count += 1;
                if !self.consistent_uncounted()? {
                    return Ok(true);
                }
                let neg = self.store.intern(&concept.negated_nnf());
                let mut q = self.abox.query.clone();
                match self.abox.index.get(individual) {
                    Some(&i) => q.roots[i].push(neg),
                    None => q.roots.push(vec![neg]),
                }
                Ok(self.run(&q)?.is_none())
            }
            Axiom::RoleAssertion { .. } => {
                self.call_count += 1;
                Ok(self.ontology.contains(ax) || !self.consistent_uncounted()?)
            }
        }
    }

    /// A finite model of the ontology extracted from a successful tableau
    /// run, or `None` if the ontology is inconsistent.
    pub fn model(&mut self) -> Result<Option<FiniteInterpretation>> {
        let q = self.abox.query.clone();
        let Some(c) = self.run(&q)? else {
            return Ok(None);
        };
        Ok(Some(self.interpretation(&c)))
    }

    fn interpretation(&self, m: &Completion) -> FiniteInterpretation {
        let mut concepts: BTreeMap<String, std::collections::BTreeSet<usize>> = BTreeMap::new();
        let mut roles: BTreeMap<String, std::collections::BTreeSet<(usize, usize)>> = BTreeMap::new();
        for name in self.ontology.signature().concepts {
            concepts.entry(name).or_default();
        }
        for role in self.ontology.signature().roles {
            roles.entry(role).or_default();
        }
        for x in 0..m.element_count() {
            for a in m.atoms(&self.store, x) {
                concepts.entry(self.store.name(a).to_string()).or_default().insert(x);
            }
            for &(r, y) in m.successors(x) {
                roles.entry(self.store.role_name(r).to_string()).or_default().insert((x, y));
            }
        }
        let individuals = self.abox.individuals.iter().enumerate().map(|(i, name)| (name.clone(), i)).collect();
        FiniteInterpretation { domain_size: m.element_count(), concepts, roles, individuals }
    }
}
