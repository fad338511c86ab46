use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qualecon_core::io::{
    self, check_program_against, parse_program, parse_scenario, write_output_csv, write_report, write_samples_csv,
    LoadedScenario, ModelKind, Report, ReportFormat, ScenarioFile,
};
use qualecon_core::optimize::{optimize_exhaustive, optimize_heuristic, EffortLevels, DEFAULT_SEARCH_CEILING};
use qualecon_core::seed::DEFAULT_SEED;
use qualecon_core::sensitivity::{analyze_outputs, analyze_template, generate_samples, presets};
use qualecon_core::simulate::estimate;
use qualecon_core::{Error, Program};

#[derive(Parser)]
#[command(name = "qualecon", version, about = "Cost, benefit and ROI of defect-detection programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected direct costs, future costs, revenues and ROI of a program.
    Evaluate(EvaluateArgs),
    /// Monte-Carlo estimate of the same quantities.
    Simulate(SimulateArgs),
    /// eFAST first- and total-order sensitivity indices.
    Sensitivity(SensitivityArgs),
    /// Search for the program with the highest net benefit.
    Optimize(OptimizeArgs),
    /// Parse and cross-check a scenario file.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format of the report printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Expected model kind; must match the file.
    #[arg(long, value_enum)]
    model: Option<Model>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: ScenarioArgs,
    /// Program file or inline `technique:hours,...`; defaults to the file's program.
    #[arg(long)]
    program: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: ScenarioArgs,
    #[arg(long)]
    program: Option<String>,
    /// Number of runs.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SensitivityArgs {
    /// File with [template] and [sensitivity] sections.
    #[arg(long, required_unless_present = "design", conflicts_with = "design")]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Built-in benchmark design instead of a file.
    #[arg(long, value_enum)]
    design: Option<BuiltinDesign>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    input: ScenarioArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Objective evaluations for the heuristic search.
    #[arg(long, default_value_t = 20_000)]
    budget: u64,
    /// Enumerate the effort grid instead of searching.
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: ScenarioArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ideal,
    Practical,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinDesign {
    /// Ishigami function, a = 7, b = 0.1.
    Ishigami,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Text => ReportFormat::Text,
        }
    }
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Ideal => ModelKind::Ideal,
            Model::Practical => ModelKind::Practical,
        }
    }
}

/// Failure of a command, mapped to the exit code contract.
enum Failure {
    Validation(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Evaluate(a) => a.common.threads,
        Command::Simulate(a) => a.common.threads,
        Command::Sensitivity(a) => a.common.threads,
        Command::Optimize(a) => a.common.threads,
        Command::Validate(_) => None,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = pool.install(|| match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Optimize(a) => optimize(a),
        Command::Validate(a) => validate(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path, model: Option<Model>) -> Result<ScenarioFile, Failure> {
    let file = parse_scenario(&read(path)?)?;
    if let Some(m) = model {
        let want = ModelKind::from(m);
        if want != file.model {
            return Err(Failure::Validation(format!(
                "--model {} given but {} holds a {} model",
                want.name(),
                path.display(),
                file.model.name()
            )));
        }
    }
    Ok(file)
}

fn scenario_of<'a>(file: &'a ScenarioFile, path: &Path) -> Result<&'a LoadedScenario, Failure> {
    file.scenario
        .as_ref()
        .ok_or_else(|| Failure::Validation(format!("{} has no [scenario] section", path.display())))
}

/// The program given on the command line, else the file's own.
fn program_of(file: &ScenarioFile, arg: Option<&str>, path: &Path) -> Result<Program, Failure> {
    let program = match arg {
        Some(a) => {
            let p = Path::new(a);
            let text = if p.is_file() { read(p)? } else { a.to_string() };
            parse_program(&text)?
        }
        None => file
            .program
            .clone()
            .ok_or_else(|| Failure::Validation(format!("{} has no [program] and no --program given", path.display())))?,
    };
    check_program_against(&program, scenario_of(file, path)?.cost_model())?;
    Ok(program)
}

fn emit(common: &Common, report: Report<'_>, file_name: &str) -> Outcome {
    if let Some(dir) = &common.out {
        write_file(dir, file_name, &write_report(report, ReportFormat::Csv))?;
    }
    print(&write_report(report, common.format.into()));
    Ok(())
}

fn print(bytes: &[u8]) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(bytes);
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
}

fn evaluate(a: EvaluateArgs) -> Outcome {
    let path = &a.input.scenario;
    let file = load(path, a.input.model)?;
    let program = program_of(&file, a.program.as_deref(), path)?;
    let breakdown = scenario_of(&file, path)?.cost_model().breakdown(&program)?;
    emit(&a.common, Report::Breakdown(&breakdown), "breakdown.csv")
}

fn simulate(a: SimulateArgs) -> Outcome {
    let path = &a.input.scenario;
    let file = load(path, a.input.model)?;
    let program = program_of(&file, a.program.as_deref(), path)?;
    let explicit;
    let scenario = match scenario_of(&file, path)? {
        LoadedScenario::Ideal(s) => s,
        LoadedScenario::Practical(p) => {
            explicit = p.to_explicit()?;
            &explicit
        }
    };
    let est = estimate(scenario, &program, a.n as usize, a.seed)?;
    emit(
        &a.common,
        Report::Estimate {
            estimate: &est,
            seed: a.seed,
        },
        "estimate.csv",
    )
}

fn sensitivity(a: SensitivityArgs) -> Outcome {
    let analysis = match (a.design, &a.scenario) {
        (Some(BuiltinDesign::Ishigami), _) => {
            let design = presets::ishigami_design(2049, 4);
            let samples = generate_samples(&design, a.seed)?;
            let outputs: Vec<f64> = samples.rows.iter().map(|r| presets::ishigami(r)).collect();
            let result = analyze_outputs(&design, &outputs)?;
            (samples, outputs, result)
        }
        (None, Some(path)) => {
            let file = load(path, a.model)?;
            let template = file
                .template
                .as_ref()
                .ok_or_else(|| Failure::Validation(format!("{} has no [template] section", path.display())))?;
            let spec = file
                .sensitivity
                .as_ref()
                .ok_or_else(|| Failure::Validation(format!("{} has no [sensitivity] section", path.display())))?;
            let t = analyze_template(&spec.design, template, spec.output, a.seed)?;
            (t.samples, t.outputs, t.result)
        }
        (None, None) => return Err(Failure::Validation("give --scenario or --design".into())),
    };
    let (samples, outputs, result) = analysis;
    if let Some(dir) = &a.common.out {
        write_file(dir, "samples.csv", &write_samples_csv(&samples))?;
        write_file(dir, "output.csv", &write_output_csv(&outputs))?;
    }
    emit(
        &a.common,
        Report::Sensitivity {
            result: &result,
            seed: a.seed,
        },
        "sensitivity.csv",
    )
}

fn optimize(a: OptimizeArgs) -> Outcome {
    let path = &a.input.scenario;
    let file = load(path, a.input.model)?;
    let model = scenario_of(&file, path)?.cost_model();
    let constraints = file.constraints.clone().unwrap_or_default();
    let search = file.search.clone().unwrap_or(io::SearchSettings {
        effort_grid: Vec::new(),
        heuristic: Default::default(),
    });
    let (result, seed) = if a.exhaustive {
        if search.effort_grid.is_empty() {
            return Err(Failure::Validation(format!(
                "--exhaustive needs [search] effort_grid in {}",
                path.display()
            )));
        }
        (optimize_exhaustive(model, &constraints, &search.effort_grid, DEFAULT_SEARCH_CEILING)?, None)
    } else {
        // the grid, when given, is the search space of both methods
        let mut constraints = constraints;
        if !search.effort_grid.is_empty() {
            for t in model.technique_ids() {
                if !constraints.allowed_levels.iter().any(|l| l.technique == t) {
                    constraints.allowed_levels.push(EffortLevels {
                        technique: t,
                        levels: search.effort_grid.clone(),
                    });
                }
            }
        }
        let r = optimize_heuristic(model, &constraints, a.seed, a.budget as usize, search.heuristic)?;
        (r, Some(a.seed))
    };
    emit(&a.common, Report::Optimum { result: &result, seed }, "optimum.csv")
}

fn validate(a: ValidateArgs) -> Outcome {
    let path = &a.input.scenario;
    let file = load(path, a.input.model)?;
    if let Some(p) = &file.program {
        check_program_against(p, scenario_of(&file, path)?.cost_model())?;
    }
    let mut sections = Vec::new();
    for (name, present) in [
        ("scenario", file.scenario.is_some()),
        ("program", file.program.is_some()),
        ("constraints", file.constraints.is_some()),
        ("search", file.search.is_some()),
        ("template", file.template.is_some()),
        ("sensitivity", file.sensitivity.is_some()),
    ] {
        if present {
            sections.push(name);
        }
    }
    println!("{}: valid {} model file [{}]", path.display(), file.model.name(), sections.join(", "));
    Ok(())
}
