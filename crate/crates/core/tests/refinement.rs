use std::collections::BTreeSet;

use ontorepair::generate::OntologyShape;
use ontorepair::refinement::{Direction, RefinementContext, DEFAULT_SIZE_CAP};
use ontorepair::{Concept, Ontology, ReasonerSession};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn case(seed: u64) -> Option<(Ontology, Concept)> {
    let shape = OntologyShape::small();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = shape.ontology(&mut rng);
    let c = shape.sampler().sample(&mut rng).nnf();
    ontorepair::is_consistent(&o).unwrap().then_some((o, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_sound(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o.clone()).unwrap();
        let mut s = ReasonerSession::new(o);
        for x in ctx.generalize(&c).unwrap() {
            prop_assert!(s.is_subsumed(&c, &x).unwrap(), "{} not below {}", c, x);
        }
        for x in ctx.specialize(&c).unwrap() {
            prop_assert!(s.is_subsumed(&x, &c).unwrap(), "{} not below {}", x, c);
        }
    }

    #[test]
    fn covers_lie_in_sub_and_in_the_operators(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o).unwrap();
        let sub: BTreeSet<Concept> = ctx.subconcepts().iter().cloned().collect();
        let up = ctx.upcov(&c).unwrap();
        let down = ctx.downcov(&c).unwrap();
        prop_assert!(up.is_subset(&sub) && down.is_subset(&sub));
        prop_assert!(!up.is_empty() && !down.is_empty());
        prop_assert!(up.is_subset(&ctx.generalize(&c).unwrap()));
        prop_assert!(down.is_subset(&ctx.specialize(&c).unwrap()));
    }

    #[test]
    fn membership_agrees_with_computed_covers(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o).unwrap();
        let sub = ctx.subconcepts().to_vec();
        for dir in [Direction::Up, Direction::Down] {
            let cover = ctx.cover(dir, &c).unwrap();
            for d in &sub {
                prop_assert_eq!(ctx.cover_membership(dir, &c, d).unwrap(), cover.contains(d));
            }
        }
    }

    #[test]
    fn refinement_membership_agrees_with_operator(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o).unwrap();
        let gamma = ctx.generalize(&c).unwrap();
        for x in &gamma {
            prop_assert!(ctx.gamma_membership(&c, x).unwrap(), "{} should be in gamma({})", x, c);
        }
        let rho = ctx.specialize(&c).unwrap();
        for x in &rho {
            prop_assert!(ctx.rho_membership(&c, x).unwrap(), "{} should be in rho({})", x, c);
        }
    }

    #[test]
    fn strict_refinements_exclude_equivalents(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o.clone()).unwrap();
        let mut s = ReasonerSession::new(o);
        for dir in [Direction::Up, Direction::Down] {
            for x in ctx.refine_strict(dir, &c).unwrap() {
                prop_assert!(!s.is_equivalent(&x, &c).unwrap());
            }
        }
    }

    #[test]
    fn iteration_is_monotone_in_depth(seed in any::<u64>()) {
        let Some((o, c)) = case(seed) else { return Ok(()) };
        let mut ctx = RefinementContext::new(o).unwrap();
        let one = ctx.refine_iter(Direction::Up, &c, 1, DEFAULT_SIZE_CAP).unwrap();
        let two = ctx.refine_iter(Direction::Up, &c, 2, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(one.contains(&c));
        prop_assert!(one.is_subset(&two));
        let mut gamma = ctx.generalize(&c).unwrap();
        gamma.insert(c.clone());
        prop_assert_eq!(one, gamma);
    }
}
