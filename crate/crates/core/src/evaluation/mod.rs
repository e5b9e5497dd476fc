//! Inferred class hierarchies, the inferable information content measure,
//! statistics and the weaken-versus-remove experiment.

mod experiment;
mod stats;

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::reasoner::ReasonerSession;
use crate::Concept;

pub use experiment::{
    inject_inconsistency, run_experiment, trial_seed, write_csv, Aggregate, ExperimentConfig, IicReport,
    InjectionConfig, TrialRecord,
};
pub use stats::{wilcoxon_signed_rank, Wilcoxon};

/// `Inf(o)` over `signature`: all pairs `(A, B)` with `o ⊨ A ⊑ B`,
/// reflexive pairs included.
pub fn inferred_hierarchy(o: &Ontology, signature: &BTreeSet<String>) -> Result<BTreeSet<(String, String)>> {
    let mut s = ReasonerSession::new(o.clone());
    if !s.is_consistent()? {
        return Err(Error::InconsistentInput);
    }
    let names: Vec<&String> = signature.iter().collect();
    let n = names.len();
    let concepts: Vec<Concept> = names.iter().map(|a| Concept::atomic(a.as_str())).collect();
    // Rows are filled in order; a completed row is reused through
    // transitivity when its name is found below a later one.
    let mut sups: Vec<Option<Vec<bool>>> = vec![None; n];
    for i in 0..n {
        let mut row = vec![false; n];
        row[i] = true;
        for j in 0..n {
            if row[j] {
                continue;
            }
            if s.is_subsumed(&concepts[i], &concepts[j])? {
                row[j] = true;
                if let Some(through) = &sups[j] {
                    for (k, &b) in through.iter().enumerate() {
                        row[k] |= b;
                    }
                }
            }
        }
        sups[i] = Some(row);
    }
    let mut out = BTreeSet::new();
    for (i, row) in sups.into_iter().enumerate() {
        for (j, b) in row.expect("filled").into_iter().enumerate() {
            if b {
                out.insert((names[i].clone(), names[j].clone()));
            }
        }
    }
    Ok(out)
}

/// The inferable information content of one ontology relative to another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iic {
    /// `card(Inf₁ ∖ Inf₂)`.
    pub only_first: usize,
    /// `card(Inf₂ ∖ Inf₁)`.
    pub only_second: usize,
    pub value: Ratio<u64>,
}

impl Iic {
    pub fn from_counts(only_first: usize, only_second: usize) -> Self {
        let value = if only_first + only_second == 0 {
            Ratio::new(1, 2)
        } else {
            Ratio::new(only_first as u64, (only_first + only_second) as u64)
        };
        Iic { only_first, only_second, value }
    }

    pub fn to_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }

    /// Six-digit decimal rendering.
    pub fn decimal(&self) -> String {
        format!("{:.6}", self.to_f64())
    }
}

/// IIC over the union of both concept-name signatures.
pub fn iic(o1: &Ontology, o2: &Ontology) -> Result<Iic> {
    let mut sig = o1.concept_names();
    sig.extend(o2.concept_names());
    let i1 = inferred_hierarchy(o1, &sig)?;
    let i2 = inferred_hierarchy(o2, &sig)?;
    Ok(Iic::from_counts(i1.difference(&i2).count(), i2.difference(&i1).count()))
}
