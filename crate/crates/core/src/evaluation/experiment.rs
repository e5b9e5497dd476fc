use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stats::{wilcoxon_signed_rank, Wilcoxon};
use super::{iic, Iic};
use crate::error::{Error, Result};
use crate::generate::ConceptSampler;
use crate::ontology::{Axiom, Ontology};
use crate::reasoner::is_consistent;
use crate::refinement::RefinementContext;
use crate::repair::{
    repair_remove, repair_weaken_with, BadAxiomStrategy, Method, MisSamples, Outcome, ReferenceMode, RepairConfig,
};

#[derive(Clone, Debug, PartialEq)]
pub struct InjectionConfig {
    pub max_depth: usize,
    pub allow_negation: bool,
    pub max_attempts: usize,
}

impl Default for InjectionConfig {
    fn default() -> Self {
        InjectionConfig { max_depth: 3, allow_negation: true, max_attempts: 500 }
    }
}

/// Appends random GCIs over the signature of `o` until it is inconsistent.
pub fn inject_inconsistency<R: Rng + ?Sized>(
    o: &Ontology,
    cfg: &InjectionConfig,
    rng: &mut R,
) -> Result<(Ontology, Vec<Axiom>)> {
    if cfg.max_attempts == 0 {
        return Err(Error::Config("max_attempts must be at least 1".into()));
    }
    if !is_consistent(o)? {
        return Err(Error::InconsistentInput);
    }
    let mut sampler = ConceptSampler::for_ontology(o, cfg.max_depth);
    sampler.allow_negation = cfg.allow_negation;
    let mut cur = o.clone();
    let mut injected = Vec::new();
    for _ in 0..cfg.max_attempts {
        let ax = sampler.gci(rng);
        if cur.contains(&ax) {
            continue;
        }
        cur = cur.with(ax.clone());
        injected.push(ax);
        if !is_consistent(&cur)? {
            return Ok((cur, injected));
        }
    }
    Err(Error::InjectionExhausted { attempts: cfg.max_attempts })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub variants: Vec<BadAxiomStrategy>,
    pub mis_samples: MisSamples,
    pub max_steps: Option<usize>,
    pub injection: InjectionConfig,
    /// Run trials on the rayon pool when the `parallel` feature is on.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            trials: 50,
            variants: vec![BadAxiomStrategy::Mis, BadAxiomStrategy::Rand],
            mis_samples: MisSamples::Auto,
            max_steps: None,
            injection: InjectionConfig::default(),
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub injected: Vec<Axiom>,
    /// IIC of the weakened result relative to the removal result; `None`
    /// for failed trials.
    pub iic: Option<Iic>,
    pub steps_weaken: usize,
    pub steps_remove: usize,
    /// `ok`, `step-limit`, or `error: ...`.
    pub outcome: String,
}

impl TrialRecord {
    pub fn is_ok(&self) -> bool {
        self.outcome == "ok"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub completed: usize,
    pub failed: usize,
    pub mean: f64,
    pub std: f64,
    pub wilcoxon: Option<Wilcoxon>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IicReport {
    pub ontology: String,
    pub variant: BadAxiomStrategy,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl Aggregate {
    fn of(trials: &[TrialRecord]) -> Self {
        let values: Vec<f64> = trials.iter().filter_map(|t| t.iic.as_ref().map(Iic::to_f64)).collect();
        let n = values.len();
        let mean = if n == 0 { f64::NAN } else { values.iter().sum::<f64>() / n as f64 };
        let std = if n < 2 {
            f64::NAN
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Aggregate {
            completed: n,
            failed: trials.len() - n,
            mean,
            std,
            wilcoxon: wilcoxon_signed_rank(&values, 0.5).ok(),
        }
    }
}

/// Seed for one trial, mixed from the master seed, ontology index and trial
/// index with SplitMix64 finalisation.
pub fn trial_seed(master: u64, ontology: usize, trial: usize) -> u64 {
    let mut z = master
        ^ (ontology as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(
    o: &Ontology,
    ctx: &RefinementContext,
    cfg: &ExperimentConfig,
    variant: BadAxiomStrategy,
    ontology: usize,
    trial: usize,
) -> TrialRecord {
    let seed = trial_seed(cfg.seed, ontology, trial);
    let mut record = TrialRecord {
        trial,
        seed,
        injected: Vec::new(),
        iic: None,
        steps_weaken: 0,
        steps_remove: 0,
        outcome: String::new(),
    };
    let result = (|| -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (bad, injected) = inject_inconsistency(o, &cfg.injection, &mut rng)?;
        record.injected = injected;
        let repair_cfg = RepairConfig {
            method: Method::Weaken,
            bad_axiom: variant,
            mis_samples: cfg.mis_samples,
            reference: ReferenceMode::Explicit(o.clone()),
            seed,
            max_steps: cfg.max_steps,
            exclude_identity_weakening: true,
        };
        let (weakened, wt) = repair_weaken_with(&bad, &repair_cfg, ctx.clone())?;
        let remove_cfg = RepairConfig { method: Method::Remove, ..repair_cfg };
        let (removed, rt) = repair_remove(&bad, &remove_cfg)?;
        record.steps_weaken = wt.steps.len();
        record.steps_remove = rt.steps.len();
        if wt.outcome == Outcome::StepLimit {
            record.outcome = "step-limit".into();
            return Ok(());
        }
        record.iic = Some(iic(&weakened, &removed)?);
        record.outcome = "ok".into();
        Ok(())
    })();
    if let Err(e) = result {
        record.iic = None;
        record.outcome = format!("error: {e}");
    }
    record
}

fn run_jobs<F>(jobs: usize, parallel: bool, f: F) -> Vec<TrialRecord>
where
    F: Fn(usize) -> TrialRecord + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..jobs).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..jobs).map(f).collect()
}

/// Runs `trials` injection-and-repair trials per ontology and variant.
///
/// The injected axioms and repair seeds depend only on the master seed and
/// the ontology and trial indices, so every variant sees the same
/// inconsistent ontologies and output is independent of scheduling.
pub fn run_experiment(corpus: &[(String, Ontology)], cfg: &ExperimentConfig) -> Result<Vec<IicReport>> {
    let mut reports = Vec::new();
    for (idx, (name, o)) in corpus.iter().enumerate() {
        if !is_consistent(o)? {
            return Err(Error::InconsistentInput);
        }
        if cfg.trials == 0 {
            continue;
        }
        let mut ctx = RefinementContext::new(o.clone())?;
        ctx.precompute()?;
        for &variant in &cfg.variants {
            let trials = run_jobs(cfg.trials, cfg.parallel, |t| run_trial(o, &ctx, cfg, variant, idx, t));
            let aggregate = Aggregate::of(&trials);
            reports.push(IicReport { ontology: name.clone(), variant, trials, aggregate });
        }
    }
    Ok(reports)
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.6}")
    }
}

/// CSV with one row per trial followed by one aggregate row per report.
pub fn write_csv<W: Write>(reports: &[IicReport], out: W) -> std::io::Result<()> {
    let mut out = out;
    writeln!(
        out,
        "# one-sided Wilcoxon p-values against 0.5 per ontology, uncorrected; \
         Holm-Bonferroni: sort the m p-values ascending and reject p_(i) while p_(i) <= alpha/(m-i+1)"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ontology",
        "variant",
        "trial",
        "seed",
        "iic",
        "steps_weaken",
        "steps_remove",
        "outcome",
        "mean",
        "std",
        "wilcoxon_p",
    ])?;
    for r in reports {
        let variant = r.variant.to_string();
        for t in &r.trials {
            w.write_record([
                r.ontology.as_str(),
                &variant,
                &t.trial.to_string(),
                &t.seed.to_string(),
                &t.iic.as_ref().map(Iic::decimal).unwrap_or_default(),
                &t.steps_weaken.to_string(),
                &t.steps_remove.to_string(),
                &t.outcome,
                "",
                "",
                "",
            ])?;
        }
    }
    for r in reports {
        let a = &r.aggregate;
        w.write_record([
            r.ontology.as_str(),
            &r.variant.to_string(),
            "aggregate",
            "",
            "",
            "",
            "",
            &format!("completed={} failed={}", a.completed, a.failed),
            &fmt_float(a.mean),
            &fmt_float(a.std),
            &a.wilcoxon.map(|x| format!("{:.6e}", x.p_value)).unwrap_or_default(),
        ])?;
    }
    w.flush()
}
