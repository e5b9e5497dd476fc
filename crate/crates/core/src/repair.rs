//! Axiom weakening, bad-axiom selection, reference ontologies, and the
//! weaken and remove repair loops.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{Axiom, Ontology};
use crate::reasoner::is_consistent;
use crate::refinement::RefinementContext;
use crate::syntax::parse_axiom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Weaken,
    Remove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BadAxiomStrategy {
    Mis,
    Rand,
}

impl std::fmt::Display for BadAxiomStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BadAxiomStrategy::Mis => "mis",
            BadAxiomStrategy::Rand => "rand",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MisSamples {
    /// One tenth of the ontology size, at least one.
    Auto,
    Fixed(usize),
}

impl MisSamples {
    pub fn resolve(self, axioms: usize) -> usize {
        match self {
            MisSamples::Auto => (axioms / 10).max(1),
            MisSamples::Fixed(k) => k.max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceMode {
    /// A random maximal consistent subset.
    Brave,
    /// The intersection of all maximal consistent subsets.
    Cautious {
        subset_cap: usize,
    },
    Explicit(Ontology),
}

pub const DEFAULT_SUBSET_CAP: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairConfig {
    pub method: Method,
    pub bad_axiom: BadAxiomStrategy,
    pub mis_samples: MisSamples,
    pub reference: ReferenceMode,
    pub seed: u64,
    /// `None` means ten times the number of axioms.
    pub max_steps: Option<usize>,
    pub exclude_identity_weakening: bool,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            method: Method::Weaken,
            bad_axiom: BadAxiomStrategy::Mis,
            mis_samples: MisSamples::Auto,
            reference: ReferenceMode::Brave,
            seed: 0,
            max_steps: None,
            exclude_identity_weakening: true,
        }
    }
}

impl RepairConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == Some(0) {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if self.mis_samples == MisSamples::Fixed(0) {
            return Err(Error::Config("mis_samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Action {
    Replace { with: String },
    Remove,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairStep {
    pub bad_axiom: String,
    pub candidates: usize,
    pub action: Action,
    pub consistent_after: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Repaired,
    StepLimit,
}

/// Record of a repair run. Axioms are stored in the text syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTrace {
    pub seed: u64,
    pub method: Method,
    pub bad_axiom: BadAxiomStrategy,
    pub reference: Vec<String>,
    pub steps: Vec<RepairStep>,
    pub outcome: Outcome,
}

impl RepairTrace {
    fn new(cfg: &RepairConfig) -> Self {
        RepairTrace {
            seed: cfg.seed,
            method: cfg.method,
            bad_axiom: cfg.bad_axiom,
            reference: Vec::new(),
            steps: Vec::new(),
            outcome: Outcome::Repaired,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Applies the recorded steps to `o`.
    pub fn replay(&self, o: &Ontology) -> Result<Ontology> {
        let mut cur = o.clone();
        for step in &self.steps {
            let bad = parse_axiom(&step.bad_axiom)?;
            cur = match &step.action {
                Action::Remove => cur.without(&bad),
                Action::Replace { with } => cur.replace(&bad, parse_axiom(with)?),
            };
        }
        Ok(cur)
    }
}

/// `g(ax)`: GCIs are weakened by specialising the left side and
/// generalising the right side; assertions by generalising the concept.
pub fn weakenings(ctx: &mut RefinementContext, ax: &Axiom) -> Result<BTreeSet<Axiom>> {
    match ax {
        Axiom::Subsumption { lhs, rhs } => {
            let left = ctx.specialize(lhs)?;
            let right = ctx.generalize(rhs)?;
            Ok(left.iter().flat_map(|l| right.iter().map(move |r| Axiom::gci(l.clone(), r.clone()))).collect())
        }
        Axiom::ClassAssertion { concept, individual } => {
            Ok(ctx.generalize(concept)?.into_iter().map(|c| Axiom::class(c, individual.clone())).collect())
        }
        Axiom::RoleAssertion { .. } => Err(Error::UnsupportedAxiom(ax.to_string())),
    }
}

fn consistent_subset(axioms: &[Axiom]) -> Result<bool> {
    is_consistent(&Ontology::from_axioms(axioms.iter().cloned()))
}

/// One minimal inconsistent subset of `o`, guided by a shuffled order.
///
/// Repeatedly finds, by binary search, the shortest prefix of the remaining
/// candidates that is inconsistent together with the axioms already kept;
/// the last axiom of that prefix belongs to the subset.
pub fn minimal_inconsistent_subset<R: Rng + ?Sized>(o: &Ontology, rng: &mut R) -> Result<Vec<Axiom>> {
    let mut rest: Vec<Axiom> = o.axioms().to_vec();
    rest.shuffle(rng);
    if consistent_subset(&rest)? {
        return Err(Error::ConsistentInput);
    }
    let mut kept: Vec<Axiom> = Vec::new();
    loop {
        if !kept.is_empty() && !consistent_subset(&kept)? {
            return Ok(kept);
        }
        // Smallest k with kept ∪ rest[..k] inconsistent; rest[..len] is.
        let (mut lo, mut hi) = (0usize, rest.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let mut probe = kept.clone();
            probe.extend_from_slice(&rest[..mid]);
            if consistent_subset(&probe)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = hi;
        kept.push(rest[k - 1].clone());
        rest.truncate(k - 1);
    }
}

/// Samples `k` minimal inconsistent subsets and returns an axiom occurring
/// in the largest number of them, ties broken uniformly.
pub fn find_bad_axiom_mis<R: Rng + ?Sized>(o: &Ontology, k: usize, rng: &mut R) -> Result<Axiom> {
    if is_consistent(o)? {
        return Err(Error::ConsistentInput);
    }
    let mut counts = vec![0usize; o.len()];
    for _ in 0..k.max(1) {
        for ax in minimal_inconsistent_subset(o, rng)? {
            let i = o.iter().position(|a| *a == ax).expect("subset of o");
            counts[i] += 1;
        }
    }
    let best = *counts.iter().max().expect("non-empty");
    let top: Vec<&Axiom> = o.iter().zip(&counts).filter(|(_, &c)| c == best).map(|(a, _)| a).collect();
    Ok((*top.choose(rng).expect("non-empty argmax")).clone())
}

pub fn find_bad_axiom_rand<R: Rng + ?Sized>(o: &Ontology, rng: &mut R) -> Result<Axiom> {
    o.axioms().choose(rng).cloned().ok_or(Error::EmptyOntology)
}

/// Greedy maximal consistent subset over a random permutation.
pub fn maximal_consistent_subset<R: Rng + ?Sized>(o: &Ontology, rng: &mut R) -> Result<Ontology> {
    if is_consistent(o)? {
        return Ok(o.clone());
    }
    let mut order: Vec<Axiom> = o.axioms().to_vec();
    order.shuffle(rng);
    let mut kept: Vec<Axiom> = Vec::new();
    for ax in order {
        kept.push(ax);
        if !consistent_subset(&kept)? {
            kept.pop();
        }
    }
    Ok(Ontology::from_axioms(kept))
}

/// Every maximal consistent subset of `o`, as sorted index sets.
pub fn all_maximal_consistent_subsets(o: &Ontology, subset_cap: usize) -> Result<Vec<BTreeSet<usize>>> {
    let n = o.len();
    let axioms = o.axioms();
    let subset = |s: &BTreeSet<usize>| -> Vec<Axiom> { s.iter().map(|&i| axioms[i].clone()).collect() };
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut visited: HashSet<BTreeSet<usize>> = HashSet::new();
    let mut stack = vec![(0..n).collect::<BTreeSet<usize>>()];
    while let Some(s) = stack.pop() {
        if !visited.insert(s.clone()) {
            continue;
        }
        if visited.len() > subset_cap.saturating_mul(n.max(1)).max(64) {
            return Err(Error::SubsetCapExceeded { cap: subset_cap });
        }
        let sub = Ontology::from_axioms(subset(&s));
        if is_consistent(&sub)? {
            found.insert(s);
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.len() as u64);
        for ax in minimal_inconsistent_subset(&sub, &mut rng)? {
            let i = (0..n).find(|&i| axioms[i] == ax).expect("member");
            let mut child = s.clone();
            child.remove(&i);
            stack.push(child);
        }
    }
    let all: Vec<BTreeSet<usize>> = found.iter().cloned().collect();
    let maximal: Vec<BTreeSet<usize>> =
        all.iter().filter(|s| !all.iter().any(|t| t.len() > s.len() && s.is_subset(t))).cloned().collect();
    if maximal.len() > subset_cap {
        return Err(Error::SubsetCapExceeded { cap: subset_cap });
    }
    Ok(maximal)
}

/// Intersection of all maximal consistent subsets.
pub fn cautious_reference(o: &Ontology, subset_cap: usize) -> Result<Ontology> {
    let mcs = all_maximal_consistent_subsets(o, subset_cap)?;
    let mut iter = mcs.into_iter();
    let first = iter.next().unwrap_or_default();
    let common = iter.fold(first, |acc, s| acc.intersection(&s).copied().collect());
    Ok(Ontology::from_axioms(common.into_iter().map(|i| o.axioms()[i].clone())))
}

fn build_reference<R: Rng + ?Sized>(o: &Ontology, mode: &ReferenceMode, rng: &mut R) -> Result<Ontology> {
    match mode {
        ReferenceMode::Brave => maximal_consistent_subset(o, rng),
        ReferenceMode::Cautious { subset_cap } => cautious_reference(o, *subset_cap),
        ReferenceMode::Explicit(r) => Ok(r.clone()),
    }
}

fn pick_bad_axiom<R: Rng + ?Sized>(o: &Ontology, cfg: &RepairConfig, rng: &mut R) -> Result<Axiom> {
    match cfg.bad_axiom {
        BadAxiomStrategy::Mis => find_bad_axiom_mis(o, cfg.mis_samples.resolve(o.len()), rng),
        BadAxiomStrategy::Rand => find_bad_axiom_rand(o, rng),
    }
}

/// Repairs by repeatedly weakening a bad axiom against a fixed reference.
pub fn repair_weaken(o: &Ontology, cfg: &RepairConfig) -> Result<(Ontology, RepairTrace)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if is_consistent(o)? {
        return Ok((o.clone(), RepairTrace::new(cfg)));
    }
    let reference = build_reference(o, &cfg.reference, &mut rng)?;
    let ctx = RefinementContext::new(reference)?;
    repair_weaken_in(o, cfg, ctx, &mut rng)
}

/// [`repair_weaken`] with a prepared context over the reference ontology.
pub fn repair_weaken_with(o: &Ontology, cfg: &RepairConfig, ctx: RefinementContext) -> Result<(Ontology, RepairTrace)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    repair_weaken_in(o, cfg, ctx, &mut rng)
}

fn repair_weaken_in(
    o: &Ontology,
    cfg: &RepairConfig,
    mut ctx: RefinementContext,
    rng: &mut ChaCha8Rng,
) -> Result<(Ontology, RepairTrace)> {
    let mut trace = RepairTrace::new(cfg);
    trace.reference = ctx.reference().iter().map(ToString::to_string).collect();
    let max_steps = cfg.max_steps.unwrap_or(10 * o.len()).max(1);
    let mut cur = o.clone();
    let mut consistent = is_consistent(&cur)?;
    while !consistent {
        let bad = pick_bad_axiom(&cur, cfg, rng)?;
        let (next, candidates, action) = if bad.is_role_assertion() || trace.steps.len() >= max_steps {
            if !bad.is_role_assertion() {
                trace.outcome = Outcome::StepLimit;
            }
            (cur.without(&bad), 0, Action::Remove)
        } else {
            let mut options: Vec<Axiom> = weakenings(&mut ctx, &bad)?.into_iter().collect();
            let total = options.len();
            if cfg.exclude_identity_weakening && options.len() > 1 {
                options.retain(|a| *a != bad);
            }
            let chosen = options.choose(rng).expect("weakenings are non-empty").clone();
            (cur.replace(&bad, chosen.clone()), total, Action::Replace { with: chosen.to_string() })
        };
        cur = next;
        consistent = is_consistent(&cur)?;
        trace.steps.push(RepairStep { bad_axiom: bad.to_string(), candidates, action, consistent_after: consistent });
    }
    Ok((cur, trace))
}

/// Repairs by deleting bad axioms until consistent.
pub fn repair_remove(o: &Ontology, cfg: &RepairConfig) -> Result<(Ontology, RepairTrace)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trace = RepairTrace::new(cfg);
    trace.method = Method::Remove;
    let mut cur = o.clone();
    let mut consistent = is_consistent(&cur)?;
    while !consistent {
        let bad = pick_bad_axiom(&cur, cfg, &mut rng)?;
        cur = cur.without(&bad);
        consistent = is_consistent(&cur)?;
        trace.steps.push(RepairStep {
            bad_axiom: bad.to_string(),
            candidates: 0,
            action: Action::Remove,
            consistent_after: consistent,
        });
    }
    Ok((cur, trace))
}

/// Dispatches on `cfg.method`.
pub fn repair(o: &Ontology, cfg: &RepairConfig) -> Result<(Ontology, RepairTrace)> {
    match cfg.method {
        Method::Weaken => repair_weaken(o, cfg),
        Method::Remove => repair_remove(o, cfg),
    }
}
