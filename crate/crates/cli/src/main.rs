//! `paretogap`: run random-search experiments and analyze their fronts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use paretogap::archive::{
    gap_table_csv, gap_table_text, is_archive, plot_data_csv, read_record_file, Manifest, PointSet,
    RunArchive,
};
use paretogap::evaluators::{
    german_credit_standin, split_dataset, LinearModelEvaluator, Schema, Surface, SyntheticProblem,
    TabularDataset, STANDARD_FRACTIONS,
};
use paretogap::search::{checkpoint_reports, run_random_search};
use paretogap::{
    compare_fronts, compare_gap, compare_hv, front_hypervolume, gap_report, validation_front,
    ConfigurationSpace, EvaluationRecord, Evaluator, Execution, ObjectiveSpec, ReferencePoint,
};

#[derive(Parser)]
#[command(
    name = "paretogap",
    version,
    about = "Optimistic/pessimistic test fronts and the approximation gap for multi-objective HPO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded random search and write a run archive.
    Run(RunArgs),
    /// Print the gap table (validation / pessimistic / optimistic HV, gap) per budget.
    Analyze(AnalyzeArgs),
    /// Compare two runs under one of the three criteria.
    Compare(CompareArgs),
    /// Write plot-ready CSV files for front point sets.
    Plotdata(PlotArgs),
    /// Write the bundled German-credit-format stand-in dataset and its schema.
    MakeDataset(MakeDatasetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EvaluatorKind {
    /// Noisy bi-objective test problem on the encoded search space.
    Synthetic,
    /// SGD linear classifier scored by precision and recall.
    Linear,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Evaluator producing validation and test costs.
    #[arg(long, value_enum, default_value = "synthetic")]
    evaluator: EvaluatorKind,
    /// Search space: a space file, or builtin:linear, builtin:random-forest,
    /// builtin:unit-cube:N. Defaults to builtin:unit-cube:3 for synthetic and
    /// builtin:linear for linear.
    #[arg(long)]
    space: Option<String>,
    /// Number of configurations to evaluate (at least 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Master seed; every trial seed is derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint budgets recorded for later analysis, comma-separated and ascending.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<usize>,
    /// Reference point in cost space, comma-separated; recorded in the archive.
    #[arg(long = "ref", value_delimiter = ',', allow_hyphen_values = true)]
    reference: Option<Vec<f64>>,
    /// Worker threads (1 = sequential, 0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Synthetic: shape of the trade-off curve (convex, concave, linear).
    #[arg(long, default_value = "convex")]
    surface: Surface,
    /// Synthetic: standard deviation of the validation and test noise.
    #[arg(long, default_value_t = 0.05)]
    noise_sigma: f64,
    /// Linear: CSV dataset; omit to use the bundled stand-in.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Linear: schema file for --data (default: <data>.schema).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Linear: seed of the stand-in dataset.
    #[arg(long, default_value_t = 0)]
    dataset_seed: u64,
    /// Linear: seed of the stratified 60/20/20 train/validation/test split.
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    /// Output archive path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Run archive or record file.
    input: PathBuf,
    /// Budgets (record-count prefixes), comma-separated and ascending;
    /// defaults to the archive's recorded budgets, else all records.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<usize>,
    /// Reference point in cost space; required unless recorded or all objectives are [0,1] losses.
    #[arg(long = "ref", value_delimiter = ',', allow_hyphen_values = true)]
    reference: Option<Vec<f64>>,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    /// Pessimistic HV of one run exceeds the optimistic HV of the other.
    Hv,
    /// Pessimistic front of one run strictly dominates the optimistic front of the other.
    Dominance,
    /// Smaller approximation gap wins.
    Gap,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// First run (archive or record file).
    first: PathBuf,
    /// Second run (archive or record file).
    second: PathBuf,
    /// Comparison criterion.
    #[arg(long, value_enum, default_value = "hv")]
    criterion: CriterionArg,
    /// Reference point in cost space; required unless recorded or all objectives are [0,1] losses.
    #[arg(long = "ref", value_delimiter = ',', allow_hyphen_values = true)]
    reference: Option<Vec<f64>>,
    /// Compare only the first N records of each run.
    #[arg(long)]
    budget: Option<usize>,
    /// Gap criterion: gaps closer than this are incomparable.
    #[arg(long, default_value_t = 0.0)]
    tie_epsilon: f64,
    /// Also write the verdict to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PlotArgs {
    /// Run archive or record file.
    input: PathBuf,
    /// Point sets to write: validation, optimistic, pessimistic, naive-test, all-points (default: all).
    #[arg(long, value_delimiter = ',')]
    which: Vec<String>,
    /// Use only the first N records.
    #[arg(long)]
    budget: Option<usize>,
    /// Output directory; one <set>.csv per point set.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct MakeDatasetArgs {
    /// Seed of the generated data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; the schema goes to <out>.schema.
    #[arg(long)]
    out: PathBuf,
}

/// Records and their description, from an archive or a record file.
struct Loaded {
    objectives: Vec<ObjectiveSpec>,
    records: Vec<EvaluationRecord>,
    reference: Option<Vec<f64>>,
    budgets: Vec<usize>,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if is_archive(&text) {
        let archive = RunArchive::parse(&text)
            .with_context(|| format!("parsing archive {}", path.display()))?;
        Ok(Loaded {
            objectives: archive.manifest.objectives,
            records: archive.records,
            reference: archive.manifest.reference,
            budgets: archive.manifest.budgets,
        })
    } else {
        let (objectives, records) = read_record_file(text.as_bytes())
            .with_context(|| format!("parsing record file {}", path.display()))?;
        Ok(Loaded {
            objectives,
            records,
            reference: None,
            budgets: Vec::new(),
        })
    }
}

fn resolve_reference(
    flag: Option<&Vec<f64>>,
    recorded: Option<&Vec<f64>>,
    objectives: &[ObjectiveSpec],
) -> Result<ReferencePoint> {
    let reference = match flag.or(recorded) {
        Some(values) => ReferencePoint::new(values.clone())?,
        None => match ReferencePoint::default_for(objectives) {
            Some(r) => r,
            None => bail!("--ref is required: not every objective declares the range [0, 1]"),
        },
    };
    ensure!(
        reference.dim() == objectives.len(),
        "reference point has {} values for {} objectives",
        reference.dim(),
        objectives.len()
    );
    Ok(reference)
}

fn prefix(records: &[EvaluationRecord], budget: Option<usize>) -> Result<&[EvaluationRecord]> {
    match budget {
        None => Ok(records),
        Some(b) => {
            ensure!(
                b >= 1 && b <= records.len(),
                "budget {b} outside 1..={} records",
                records.len()
            );
            Ok(&records[..b])
        }
    }
}

fn load_space(spec: &str) -> Result<ConfigurationSpace> {
    Ok(match spec {
        "builtin:linear" => ConfigurationSpace::linear_model(),
        "builtin:random-forest" => ConfigurationSpace::random_forest(),
        _ => match spec.strip_prefix("builtin:unit-cube:") {
            Some(d) => ConfigurationSpace::unit_cube(
                d.parse()
                    .with_context(|| format!("bad cube dimension `{d}`"))?,
            )?,
            None => {
                let text = fs::read_to_string(spec)
                    .with_context(|| format!("reading space file {spec}"))?;
                ConfigurationSpace::parse(&text)
                    .with_context(|| format!("parsing space file {spec}"))?
            }
        },
    })
}

fn load_dataset(args: &RunArgs) -> Result<(TabularDataset, String)> {
    match &args.data {
        None => Ok((
            german_credit_standin(args.dataset_seed),
            format!("standin:{}", args.dataset_seed),
        )),
        Some(path) => {
            let schema_path = args.schema.clone().unwrap_or_else(|| {
                let mut p = path.clone().into_os_string();
                p.push(".schema");
                p.into()
            });
            let schema_text = fs::read_to_string(&schema_path)
                .with_context(|| format!("reading schema {}", schema_path.display()))?;
            let schema = Schema::parse(&schema_text)
                .with_context(|| format!("parsing schema {}", schema_path.display()))?;
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let data = TabularDataset::read_csv(file, &schema)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok((data, path.display().to_string()))
        }
    }
}

fn write_output(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let budget = args.budget as usize;
    let mut notes = std::collections::BTreeMap::new();
    notes.insert(
        "checkpoints".to_string(),
        "cumulative prefixes of this single run".to_string(),
    );
    let (space, evaluator): (ConfigurationSpace, Box<dyn Evaluator>) = match args.evaluator {
        EvaluatorKind::Synthetic => {
            let space = load_space(args.space.as_deref().unwrap_or("builtin:unit-cube:3"))?;
            let problem = SyntheticProblem::new(space.clone(), args.surface, args.noise_sigma)?;
            (space, Box::new(problem))
        }
        EvaluatorKind::Linear => {
            let space = load_space(args.space.as_deref().unwrap_or("builtin:linear"))?;
            let (data, source) = load_dataset(&args)?;
            let split = split_dataset(&data, STANDARD_FRACTIONS, args.split_seed)?;
            notes.insert("dataset".to_string(), format!("{source} ({data})"));
            notes.insert("split_seed".to_string(), args.split_seed.to_string());
            (space, Box::new(LinearModelEvaluator::new(&data, &split)?))
        }
    };
    evaluator
        .check_space(&space)
        .context("search space does not fit the evaluator")?;
    let objectives = evaluator.objectives();
    let reference = resolve_reference(args.reference.as_ref(), None, &objectives)?;
    let execution = match args.threads {
        1 => Execution::Sequential,
        0 => Execution::Parallel {
            threads: std::thread::available_parallelism().map_or(1, usize::from),
        },
        n => Execution::Parallel { threads: n },
    };
    let records = run_random_search(&space, evaluator.as_ref(), budget, args.seed, execution)?;

    let mut manifest = Manifest::new(evaluator.id(), objectives);
    manifest.master_seed = Some(args.seed);
    manifest.budgets = args.budgets;
    manifest.reference = args.reference;
    manifest.space = Some(space.to_text());
    manifest.notes = notes;
    let archive = RunArchive::new(manifest, records)?;
    let mut bytes = Vec::new();
    archive.write(&mut bytes)?;
    write_output(&args.out, &bytes)?;

    let failed = archive.records.iter().filter(|r| !r.is_complete()).count();
    let hv = match validation_front(&archive.records) {
        Ok(front) => format!("{:.4}", front_hypervolume(&front, &reference)?),
        Err(_) => "n/a".into(),
    };
    println!(
        "wrote {} records ({failed} failed) to {}; validation HV {hv}",
        archive.records.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let reference = resolve_reference(
        args.reference.as_ref(),
        loaded.reference.as_ref(),
        &loaded.objectives,
    )?;
    let budgets = if !args.budgets.is_empty() {
        args.budgets
    } else if !loaded.budgets.is_empty() {
        loaded.budgets
    } else {
        vec![loaded.records.len()]
    };
    if let Some(b) = budgets.iter().find(|&&b| b > loaded.records.len()) {
        bail!(
            "budget {b} exceeds the {} records in {}",
            loaded.records.len(),
            args.input.display()
        );
    }
    let rows = checkpoint_reports(&loaded.records, &budgets, &reference)?;
    print!("{}", gap_table_text(&rows));
    if let Some(out) = &args.out {
        write_output(out, gap_table_csv(&rows).as_bytes())?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let first = load(&args.first)?;
    let second = load(&args.second)?;
    ensure!(
        first.objectives == second.objectives,
        "objective lists differ: {:?} vs {:?}",
        first.objectives,
        second.objectives
    );
    let reference = resolve_reference(
        args.reference.as_ref(),
        first.reference.as_ref(),
        &first.objectives,
    )?;
    if args.reference.is_none() {
        let other = resolve_reference(None, second.reference.as_ref(), &second.objectives)?;
        ensure!(
            other == reference,
            "runs record different reference points ({:?} vs {:?}); pass --ref",
            reference.values(),
            other.values()
        );
    }
    let a = prefix(&first.records, args.budget)?;
    let b = prefix(&second.records, args.budget)?;
    let verdict = match args.criterion {
        CriterionArg::Hv => compare_hv(&gap_report(a, &reference)?, &gap_report(b, &reference)?)?,
        CriterionArg::Dominance => compare_fronts(a, b)?,
        CriterionArg::Gap => compare_gap(
            &gap_report(a, &reference)?,
            &gap_report(b, &reference)?,
            args.tie_epsilon,
        )?,
    };
    let text = format!("{verdict}\n");
    print!("{text}");
    if let Some(out) = &args.out {
        write_output(out, text.as_bytes())?;
    }
    Ok(())
}

fn cmd_plotdata(args: PlotArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let sets: Vec<PointSet> = if args.which.is_empty() {
        PointSet::ALL.to_vec()
    } else {
        args.which
            .iter()
            .map(|s| s.parse())
            .collect::<paretogap::Result<_>>()?
    };
    let records = prefix(&loaded.records, args.budget)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for set in sets {
        let path = args.out.join(format!("{set}.csv"));
        let csv = plot_data_csv(records, &loaded.objectives, set)?;
        write_output(&path, csv.as_bytes())?;
        println!(
            "{set}: {} rows -> {}",
            csv.lines().count() - 1,
            path.display()
        );
    }
    Ok(())
}

fn cmd_make_dataset(args: MakeDatasetArgs) -> Result<()> {
    let data = german_credit_standin(args.seed);
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file =
        File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut writer = BufWriter::new(file);
    let schema = data.write_csv(&mut writer)?;
    writer.flush()?;
    let mut schema_path = args.out.clone().into_os_string();
    schema_path.push(".schema");
    write_output(Path::new(&schema_path), schema.to_text().as_bytes())?;
    println!("wrote {data} to {}", args.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Plotdata(args) => cmd_plotdata(args),
        Command::MakeDataset(args) => cmd_make_dataset(args),
    }
}
