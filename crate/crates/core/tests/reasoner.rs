use ontorepair::generate::OntologyShape;
use ontorepair::reasoner::{oracle_consistency, oracle_entails, OracleOutcome};
use ontorepair::{is_consistent, Axiom, Concept, Ontology, ReasonerSession};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny(seed: u64) -> Ontology {
    OntologyShape::tiny().ontology(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn tableau_agrees_with_oracle_on_tiny_ontologies() {
    for seed in 0..300 {
        let o = tiny(seed);
        let tableau = is_consistent(&o).unwrap();
        match oracle_consistency(&o, 3).unwrap() {
            OracleOutcome::Model(m) => {
                assert!(m.is_model_of(&o));
                assert!(tableau, "oracle found a model of an ontology the tableau rejects: {o:?}");
            }
            OracleOutcome::NoModelUpTo(_) => {
                if tableau {
                    let m = ReasonerSession::new(o.clone()).model().unwrap().unwrap();
                    assert!(m.is_model_of(&o), "no small model and tableau model invalid: {o:?}");
                }
            }
        }
    }
}

#[test]
fn subsumption_agrees_with_oracle_entailment() {
    let shape = OntologyShape::tiny();
    let sampler = shape.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..150 {
        let o = tiny(1000 + seed).tbox();
        let ax = sampler.gci(&mut rng);
        let Axiom::Subsumption { lhs, rhs } = &ax else { unreachable!() };
        let tableau = ReasonerSession::new(o.clone()).is_subsumed(lhs, rhs).unwrap();
        let oracle = oracle_entails(&o, &ax, 3).unwrap();
        // A counter-model found by the oracle is conclusive.
        if !oracle {
            assert!(!tableau, "{o:?} {ax}");
        }
    }
}

#[test]
fn class_assertion_entailment_matches_oracle_counter_models() {
    let shape = OntologyShape::tiny();
    let sampler = shape.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..150 {
        let o = tiny(5000 + seed);
        let ax = Axiom::class(sampler.sample(&mut rng), "a");
        let tableau = ReasonerSession::new(o.clone()).entails(&ax).unwrap();
        if !oracle_entails(&o, &ax, 3).unwrap() {
            assert!(!tableau, "{o:?} {ax}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inconsistency_is_monotone(seed in any::<u64>(), extra in any::<u64>()) {
        let o = tiny(seed);
        if !is_consistent(&o).unwrap() {
            prop_assert!(!is_consistent(&o.union(&tiny(extra))).unwrap());
        }
    }

    #[test]
    fn subsumption_is_a_preorder(seed in any::<u64>()) {
        let shape = OntologyShape::small();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = shape.ontology(&mut rng).tbox();
        let sampler = shape.sampler();
        let mut s = ReasonerSession::new(o);
        for _ in 0..20 {
            let (a, b, c) = (sampler.sample(&mut rng), sampler.sample(&mut rng), sampler.sample(&mut rng));
            prop_assert!(s.is_subsumed(&a, &a).unwrap());
            if s.is_subsumed(&a, &b).unwrap() && s.is_subsumed(&b, &c).unwrap() {
                prop_assert!(s.is_subsumed(&a, &c).unwrap());
            }
        }
    }

    #[test]
    fn bottom_and_top_bound_every_concept(seed in any::<u64>()) {
        let shape = OntologyShape::small();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = ReasonerSession::new(shape.ontology(&mut rng));
        let c = shape.sampler().sample(&mut rng);
        prop_assert!(s.is_subsumed(&Concept::Bottom, &c).unwrap());
        prop_assert!(s.is_subsumed(&c, &Concept::Top).unwrap());
    }

    #[test]
    fn cached_answers_match_fresh_sessions(seed in any::<u64>()) {
        let shape = OntologyShape::small();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = shape.ontology(&mut rng);
        let sampler = shape.sampler();
        let pairs: Vec<_> = (0..6).map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng))).collect();
        let mut shared = ReasonerSession::new(o.clone());
        for (c, d) in pairs.iter().chain(pairs.iter()) {
            let fresh = ReasonerSession::new(o.clone()).is_subsumed(c, d).unwrap();
            prop_assert_eq!(shared.is_subsumed(c, d).unwrap(), fresh);
        }
    }
}
