//! The `ontorepair` command line.
//!
//! Exit codes: 0 on success (or a consistent ontology for `check`), 1 for an
//! inconsistent ontology, 2 for usage and input errors, 3 for runtime
//! failures such as resource limits.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontorepair::evaluation::{iic, inferred_hierarchy, run_experiment, write_csv, ExperimentConfig};
use ontorepair::refinement::{Direction, RefinementContext, DEFAULT_SIZE_CAP};
use ontorepair::repair::{
    repair, weakenings, BadAxiomStrategy, Method, MisSamples, ReferenceMode, RepairConfig, DEFAULT_SUBSET_CAP,
};
use ontorepair::syntax::{parse_axiom, parse_concept, parse_ontology_with_warnings, serialize_ontology};
use ontorepair::{is_consistent, Error, Ontology};

#[derive(Parser, Debug)]
#[command(name = "ontorepair", version, about = "Reason about, refine and repair ALC ontologies")]
struct Cli {
    /// Suppress diagnostics on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide consistency.
    Check { file: PathBuf },
    /// Print the inferred subsumptions between concept names.
    Classify { file: PathBuf },
    /// Iterated generalisation or specialisation of a concept.
    Refine(RefineArgs),
    /// Print the weakenings of an axiom with respect to a reference ontology.
    Weaken {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        axiom: String,
    },
    /// Repair an inconsistent ontology.
    Repair(RepairArgs),
    /// Inferable information content of FILE1 relative to FILE2.
    Iic { file1: PathBuf, file2: PathBuf },
    /// Weakening versus removal over a corpus of ontologies.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long)]
    ontology: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    concept: String,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
}

#[derive(Args, Debug)]
struct RepairArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Weaken)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Strategy::Mis)]
    bad_axiom: Strategy,
    /// `auto` or a positive count.
    #[arg(long, default_value = "auto", value_parser = parse_mis_samples)]
    mis_samples: MisSamples,
    /// `brave`, `cautious`, or the path of a reference ontology.
    #[arg(long, default_value = "brave")]
    reference: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Write the repair trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the repaired ontology here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Directory of `.onto` files.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Variants::Both)]
    bad_axiom: Variants,
    #[arg(long)]
    out: PathBuf,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Weaken,
    Remove,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    Mis,
    Rand,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variants {
    Mis,
    Rand,
    Both,
}

impl From<Strategy> for BadAxiomStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Mis => BadAxiomStrategy::Mis,
            Strategy::Rand => BadAxiomStrategy::Rand,
        }
    }
}

fn parse_mis_samples(s: &str) -> Result<MisSamples, String> {
    if s == "auto" {
        return Ok(MisSamples::Auto);
    }
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(MisSamples::Fixed(k)),
        _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Core(Error),
    Io(std::io::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 2,
            Failure::Core(Error::InconsistentInput | Error::InconsistentReference) => 1,
            Failure::Core(Error::Parse(_) | Error::Config(_)) => 2,
            Failure::Core(_) | Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn note(&mut self, msg: impl fmt::Display) {
        if !self.quiet {
            let _ = writeln!(self.err, "{msg}");
        }
    }

    fn seed(&mut self, given: Option<u64>) -> u64 {
        let seed = given.unwrap_or_else(fresh_seed);
        self.note(format_args!("seed: {seed}"));
        seed
    }
}

fn fresh_seed() -> u64 {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
    t ^ (u64::from(std::process::id()) << 32)
}

/// Runs the command line with process stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let mut io = Io { out, err, quiet: cli.quiet };
    let result = run(cli.command, &mut io);
    let _ = io.out.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {f}");
            f.code()
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Failure::Input(format!("file not found: {}", path.display())),
        _ => Failure::Input(format!("cannot read {}: {e}", path.display())),
    })
}

fn load(path: &Path, io: &mut Io<'_>) -> Result<Ontology, Failure> {
    let text = read_text(path)?;
    let (o, warnings) =
        parse_ontology_with_warnings(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))?;
    for w in warnings {
        io.note(format_args!("warning: {}:{w}", path.display()));
    }
    Ok(o)
}

fn run(cmd: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match cmd {
        Command::Check { file } => {
            let o = load(&file, io)?;
            if is_consistent(&o)? {
                writeln!(io.out, "consistent")?;
                Ok(0)
            } else {
                writeln!(io.out, "inconsistent")?;
                Ok(1)
            }
        }
        Command::Classify { file } => {
            let o = load(&file, io)?;
            for (a, b) in inferred_hierarchy(&o, &o.concept_names())? {
                if a != b {
                    writeln!(io.out, "SubClassOf({a} {b})")?;
                }
            }
            Ok(0)
        }
        Command::Refine(args) => refine(args, io),
        Command::Weaken { ontology, axiom } => {
            let o = load(&ontology, io)?;
            let ax = parse_axiom(&axiom).map_err(|e| Failure::Usage(format!("--axiom: {e}")))?;
            let mut ctx = RefinementContext::new(o)?;
            for w in weakenings(&mut ctx, &ax)? {
                writeln!(io.out, "{w}")?;
            }
            Ok(0)
        }
        Command::Repair(args) => repair_cmd(args, io),
        Command::Iic { file1, file2 } => {
            let o1 = load(&file1, io)?;
            let o2 = load(&file2, io)?;
            let r = iic(&o1, &o2)?;
            writeln!(
                io.out,
                "iic {} ({}) only_first {} only_second {}",
                r.decimal(),
                r.value,
                r.only_first,
                r.only_second
            )?;
            Ok(0)
        }
        Command::Experiment(args) => experiment(args, io),
    }
}

fn refine(args: RefineArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let o = load(&args.ontology, io)?;
    let c = parse_concept(&args.concept).map_err(|e| Failure::Usage(format!("--concept: {e}")))?;
    let dir = match args.mode {
        Mode::Up => Direction::Up,
        Mode::Down => Direction::Down,
    };
    let mut ctx = RefinementContext::new(o)?;
    let mut lines: Vec<String> =
        ctx.refine_iter(dir, &c, args.depth, args.size_cap)?.iter().map(ToString::to_string).collect();
    lines.sort();
    for l in lines {
        writeln!(io.out, "{l}")?;
    }
    Ok(0)
}

fn repair_cmd(args: RepairArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let o = load(&args.file, io)?;
    let reference = match args.reference.as_str() {
        "brave" => ReferenceMode::Brave,
        "cautious" => ReferenceMode::Cautious { subset_cap: DEFAULT_SUBSET_CAP },
        path => ReferenceMode::Explicit(load(Path::new(path), io)?),
    };
    if args.max_steps == Some(0) {
        return Err(Failure::Usage("--max-steps must be at least 1".into()));
    }
    let seed = io.seed(args.seed);
    let cfg = RepairConfig {
        method: match args.method {
            MethodArg::Weaken => Method::Weaken,
            MethodArg::Remove => Method::Remove,
        },
        bad_axiom: args.bad_axiom.into(),
        mis_samples: args.mis_samples,
        reference,
        seed,
        max_steps: args.max_steps,
        ..RepairConfig::default()
    };
    let (fixed, trace) = repair(&o, &cfg)?;
    let text = serialize_ontology(&fixed);
    match &args.output {
        Some(p) => std::fs::write(p, text)?,
        None => io.out.write_all(text.as_bytes())?,
    }
    if let Some(p) = &args.trace {
        std::fs::write(p, trace.to_json() + "\n")?;
    }
    io.note(format_args!(
        "{} step(s), outcome {}",
        trace.steps.len(),
        match trace.outcome {
            ontorepair::repair::Outcome::Repaired => "repaired",
            ontorepair::repair::Outcome::StepLimit => "step-limit",
        }
    ));
    Ok(0)
}

fn experiment(args: ExperimentArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.corpus)
        .map_err(|e| Failure::Input(format!("cannot read corpus {}: {e}", args.corpus.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "onto"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Input(format!("no .onto files in {}", args.corpus.display())));
    }
    let mut corpus = Vec::new();
    for p in &paths {
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        corpus.push((name, load(p, io)?));
    }
    let seed = io.seed(args.seed);
    let variants = match args.bad_axiom {
        Variants::Mis => vec![BadAxiomStrategy::Mis],
        Variants::Rand => vec![BadAxiomStrategy::Rand],
        Variants::Both => vec![BadAxiomStrategy::Mis, BadAxiomStrategy::Rand],
    };
    let cfg = ExperimentConfig { seed, trials: args.trials, variants, parallel: !args.serial, ..Default::default() };
    let reports = run_experiment(&corpus, &cfg)?;
    let file = std::fs::File::create(&args.out)?;
    write_csv(&reports, std::io::BufWriter::new(file))?;
    for r in &reports {
        let a = &r.aggregate;
        let p = a.wilcoxon.map_or("n/a".to_string(), |w| format!("{:.6}", w.p_value));
        writeln!(
            io.out,
            "{} {} completed {} failed {} mean {:.6} std {:.6} wilcoxon_p {}",
            r.ontology, r.variant, a.completed, a.failed, a.mean, a.std, p
        )?;
    }
    Ok(0)
}
