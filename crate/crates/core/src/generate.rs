//! Random concepts, axioms and ontologies for tests and inconsistency
//! injection.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::concept::Concept;
use crate::ontology::{Axiom, Ontology};

/// Recursive-descent concept sampler.
#[derive(Clone, Debug)]
pub struct ConceptSampler {
    pub names: Vec<String>,
    pub roles: Vec<String>,
    pub max_depth: usize,
    pub allow_negation: bool,
    /// Weights for atomic, ¬, ⊓, ⊔, ∃, ∀.
    pub weights: [f64; 6],
}

pub const DEFAULT_WEIGHTS: [f64; 6] = [0.4, 0.15, 0.15, 0.15, 0.1, 0.05];

impl ConceptSampler {
    pub fn new(names: Vec<String>, roles: Vec<String>, max_depth: usize) -> Self {
        ConceptSampler { names, roles, max_depth, allow_negation: true, weights: DEFAULT_WEIGHTS }
    }

    /// Sampler over the concept names and roles of `o`. An empty vocabulary
    /// falls back to a single name `A`.
    pub fn for_ontology(o: &Ontology, max_depth: usize) -> Self {
        let sig = o.signature();
        let mut names: Vec<String> = sig.concepts.into_iter().collect();
        if names.is_empty() {
            names.push("A".into());
        }
        ConceptSampler::new(names, sig.roles.into_iter().collect(), max_depth)
    }

    fn atomic<R: Rng + ?Sized>(&self, rng: &mut R) -> Concept {
        Concept::atomic(self.names.choose(rng).expect("non-empty vocabulary").clone())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Concept {
        self.sample_at(rng, self.max_depth)
    }

    fn sample_at<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> Concept {
        if depth == 0 {
            return self.atomic(rng);
        }
        let mut w = self.weights;
        if !self.allow_negation {
            w[1] = 0.0;
        }
        if self.roles.is_empty() {
            w[4] = 0.0;
            w[5] = 0.0;
        }
        let total: f64 = w.iter().sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pick = 0;
        for (i, wi) in w.iter().enumerate() {
            if x < *wi {
                pick = i;
                break;
            }
            x -= wi;
            pick = i;
        }
        let sub = |rng: &mut R| self.sample_at(rng, depth - 1);
        match pick {
            0 => self.atomic(rng),
            1 => Concept::not(sub(rng)),
            2 => {
                let l = sub(rng);
                Concept::and(l, sub(rng))
            }
            3 => {
                let l = sub(rng);
                Concept::or(l, sub(rng))
            }
            4 => {
                let r = self.roles.choose(rng).expect("roles").clone();
                Concept::some(r, sub(rng))
            }
            _ => {
                let r = self.roles.choose(rng).expect("roles").clone();
                Concept::all(r, sub(rng))
            }
        }
    }

    pub fn gci<R: Rng + ?Sized>(&self, rng: &mut R) -> Axiom {
        let lhs = self.sample(rng);
        Axiom::gci(lhs, self.sample(rng))
    }
}

/// Shape of a random ontology.
#[derive(Clone, Debug)]
pub struct OntologyShape {
    pub concept_names: usize,
    pub roles: usize,
    pub individuals: usize,
    pub max_axioms: usize,
    pub max_depth: usize,
    /// Probability that an axiom is an assertion rather than a GCI.
    pub abox_ratio: f64,
}

impl OntologyShape {
    pub fn tiny() -> Self {
        OntologyShape { concept_names: 3, roles: 1, individuals: 2, max_axioms: 4, max_depth: 2, abox_ratio: 0.3 }
    }

    pub fn small() -> Self {
        OntologyShape { concept_names: 4, roles: 1, individuals: 2, max_axioms: 8, max_depth: 3, abox_ratio: 0.2 }
    }

    pub fn sampler(&self) -> ConceptSampler {
        ConceptSampler::new(
            (0..self.concept_names).map(|i| ((b'A' + i as u8) as char).to_string()).collect(),
            (0..self.roles).map(|i| ((b'r' + i as u8) as char).to_string()).collect(),
            self.max_depth,
        )
    }

    fn individual_names(&self) -> Vec<String> {
        (0..self.individuals).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    }

    /// A random ontology with between one and `max_axioms` axioms.
    pub fn ontology<R: Rng + ?Sized>(&self, rng: &mut R) -> Ontology {
        let n = rng.gen_range(1..=self.max_axioms.max(1));
        self.ontology_of_len(rng, n)
    }

    pub fn ontology_of_len<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Ontology {
        let sampler = self.sampler();
        let inds = self.individual_names();
        let axioms = (0..n).map(|_| {
            if !inds.is_empty() && rng.gen_bool(self.abox_ratio) {
                if !sampler.roles.is_empty() && rng.gen_bool(0.3) {
                    let r = sampler.roles.choose(rng).unwrap().clone();
                    Axiom::role(r, inds.choose(rng).unwrap().clone(), inds.choose(rng).unwrap().clone())
                } else {
                    Axiom::class(sampler.sample(rng), inds.choose(rng).unwrap().clone())
                }
            } else {
                sampler.gci(rng)
            }
        });
        Ontology::from_axioms(axioms.collect::<Vec<_>>())
    }
}
