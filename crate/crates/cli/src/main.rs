use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use nls_graphs::experiment::{builtin_experiment, corpus, run_experiment, ExperimentError, ExperimentSpec, RunOutcome, BUILTIN_EXPERIMENTS};
use nls_graphs::function::GraphFunction;
use nls_graphs::graph::{check_condition_h, ConditionH, MetricGraph};
use nls_graphs::minimizer::{minimize, verify_bounds, MinimizerConfig, MinimizerError, Verdict};
use nls_graphs::rearrangement::{
    decreasing_rearrangement, hybrid_rearrangement, pendant_layout, symmetric_rearrangement, RearrangementError,
};
use nls_graphs::soliton::{ProblemParams, SolitonParams};

const OUT_ENV: &str = "NLS_GRAPHS_OUT";

#[derive(Parser)]
#[command(name = "nls-graphs", version, about = "Ground states of the NLS energy on metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a graph file for the no-bottleneck condition (exit 1 if it fails).
    CheckH {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Sample the soliton of the given mass on the real line.
    Soliton {
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Sample points as `a:b:n`.
        #[arg(long, default_value = "-10:10:201", allow_hyphen_values = true)]
        sample: Sample,
    },
    /// Minimize the energy at fixed mass and write a report and the minimizer.
    Minimize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Truncation length of the half-lines.
        #[arg(long = "L", default_value_t = 40.0)]
        truncation: f64,
        #[arg(long)]
        hybrid: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative amplitude of a random perturbation of the initial guess.
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Writes `PREFIX.json` and `PREFIX.csv`; defaults to the graph file
        /// stem inside the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rearrange a function read from a CSV dump.
    Rearrange {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Expected pendant length (hybrid mode); checked against the graph.
        #[arg(long)]
        pendant_length: Option<f64>,
        /// Exponent recorded with the energy in the output header.
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a builtin experiment or an experiment spec file.
    Experiment {
        /// Builtin name or path to a spec file.
        target: String,
        /// Output directory; overrides the spec.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the mesh-width grid.
        #[arg(long)]
        h: Option<f64>,
    },
    /// The named graphs.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Names and descriptions.
    List,
    /// Print one graph as JSON.
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Dec,
    Sym,
    Hybrid,
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    a: f64,
    b: f64,
    n: usize,
}

impl FromStr for Sample {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected a:b:n, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'"));
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|_| format!("bad count '{n}'"))?;
        if !(a.is_finite() && b.is_finite()) || n == 0 || (n == 1 && a != b) || (n > 1 && !(a < b)) {
            return Err(format!("need finite a < b and n >= 2 (or a = b, n = 1), got '{s}'"));
        }
        Ok(Sample { a, b, n })
    }
}

/// Exit 1 for bad input, 2 for numerical trouble.
enum Failure {
    Validation(anyhow::Error),
    Numerical(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure::Validation(err.into())
    }
}

type CliResult = Result<(), Failure>;

fn numerical(err: impl Into<anyhow::Error>) -> Failure {
    Failure::Numerical(err.into())
}

fn minimizer_failure(err: MinimizerError) -> Failure {
    match err {
        MinimizerError::Function(_) => numerical(err),
        _ => Failure::Validation(err.into()),
    }
}

fn rearrangement_failure(err: RearrangementError) -> Failure {
    match err {
        RearrangementError::ThresholdNotFound { .. } => numerical(err),
        _ => Failure::Validation(err.into()),
    }
}

fn read_graph(path: &Path) -> Result<MetricGraph, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let graph = MetricGraph::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let report = graph.validate();
    if !report.is_valid() {
        return Err(anyhow!("{}: invalid graph: {report}", path.display()).into());
    }
    Ok(graph)
}

fn output_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn check_h(graph: &Path) -> CliResult {
    let g = read_graph(graph)?;
    let result = check_condition_h(&g)?;
    println!("{}", serde_json::to_string(&result)?);
    match result {
        ConditionH::Holds => Ok(()),
        ConditionH::Compact => Err(anyhow!("graph has no vertex at infinity").into()),
        ConditionH::Violated { edge, .. } => Err(anyhow!("removing edge '{edge}' leaves a component without a vertex at infinity").into()),
    }
}

fn soliton(p: f64, mass: f64, sample: Sample) -> CliResult {
    ProblemParams::new(p, mass)?;
    let params = SolitonParams::new(p)?;
    let mut out = io::stdout().lock();
    writeln!(out, "# p={p},mu={mass},energy={:e},lambda={:e}", params.energy(mass), params.lambda_of(mass))?;
    writeln!(out, "x,phi")?;
    for i in 0..sample.n {
        let x = if sample.n == 1 { sample.a } else { sample.a + (sample.b - sample.a) * i as f64 / (sample.n - 1) as f64 };
        writeln!(out, "{x:e},{:e}", params.value(mass, x))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn minimize_cmd(
    graph_path: &Path,
    p: f64,
    mass: f64,
    h: f64,
    truncation: f64,
    hybrid: bool,
    seed: u64,
    perturbation: f64,
    max_iterations: Option<usize>,
    out: Option<PathBuf>,
) -> CliResult {
    let graph = read_graph(graph_path)?;
    let mut config = MinimizerConfig::new(ProblemParams::new(p, mass)?, h, truncation);
    config.use_hybrid_rearrangement = hybrid;
    config.seed = seed;
    config.perturbation = perturbation;
    if let Some(n) = max_iterations {
        config.max_iterations = n;
    }
    if hybrid && pendant_layout(&graph).is_none() {
        return Err(anyhow!("--hybrid needs two half-lines with a pendant at their common vertex").into());
    }
    let prefix = match out {
        Some(prefix) => prefix,
        None => {
            let stem = graph_path.file_stem().map(PathBuf::from).unwrap_or_else(|| "minimizer".into());
            output_dir().map(|d| d.join(&stem)).unwrap_or(stem)
        }
    };
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let report = minimize(&graph, &config).map_err(minimizer_failure)?;

    let json = with_suffix(&prefix, "json");
    fs::write(&json, serde_json::to_string_pretty(&report)?).with_context(|| format!("writing {}", json.display()))?;
    let csv = with_suffix(&prefix, "csv");
    let file = fs::File::create(&csv).with_context(|| format!("creating {}", csv.display()))?;
    report.u.write_csv(io::BufWriter::new(file), p, mass).with_context(|| format!("writing {}", csv.display()))?;

    println!(
        "energy={:.12e} verdict={} iterations={} converged={} bounds_hold={} report={} csv={}",
        report.energy,
        serde_json::to_value(report.verdict)?.as_str().unwrap_or("?"),
        report.iterations,
        report.converged,
        verify_bounds(&report),
        json.display(),
        csv.display()
    );
    if report.verdict == Verdict::Inconclusive {
        return Err(numerical(anyhow!("minimization was inconclusive")));
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn rearrange(mode: Mode, graph_path: &Path, input: &Path, pendant_length: Option<f64>, p: f64, out: Option<PathBuf>) -> CliResult {
    let graph = read_graph(graph_path)?;
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let (u, _) = GraphFunction::read_csv(&graph, &text).with_context(|| format!("parsing {}", input.display()))?;
    if let Some(ell) = pendant_length {
        let layout = pendant_layout(&graph).ok_or_else(|| anyhow!("--pendant-length given but the graph has no pendant"))?;
        if (layout.length - ell).abs() > 1e-12 * ell.abs().max(1.0) {
            return Err(anyhow!("pendant has length {}, not {ell}", layout.length).into());
        }
    }
    let result = match mode {
        Mode::Dec => decreasing_rearrangement(&u),
        Mode::Sym => symmetric_rearrangement(&u),
        Mode::Hybrid => hybrid_rearrangement(&u),
    }
    .map_err(rearrangement_failure)?;

    let mu = result.audit.output_mass;
    match &out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            result.output.write_csv(io::BufWriter::new(file), p, mu)?;
        }
        None => result.output.write_csv(io::stdout().lock(), p, mu)?,
    }
    let a = result.audit;
    let tau = result.tau.map_or("none".to_string(), |t| format!("{t:e}"));
    eprintln!(
        "audit: input_mass={:e},output_mass={:e},input_dirichlet={:e},output_dirichlet={:e},tau={tau}",
        a.input_mass, a.output_mass, a.input_dirichlet, a.output_dirichlet
    );
    Ok(())
}

fn experiment(target: &str, out: Option<PathBuf>, h: Option<f64>) -> CliResult {
    let mut spec = match builtin_experiment(target) {
        Some(spec) => spec,
        None if Path::new(target).exists() => ExperimentSpec::load(Path::new(target))?,
        None => {
            return Err(anyhow!(
                "{}; builtins are {}",
                ExperimentError::UnknownBuiltin(target.to_string()),
                BUILTIN_EXPERIMENTS.join(", ")
            )
            .into())
        }
    };
    if let Some(h) = h {
        spec.grid.h = vec![h];
    }
    if let Some(dir) = out.or_else(|| spec.output_dir.is_none().then(output_dir).flatten()) {
        spec.output_dir = Some(dir);
    }
    if let Some(dir) = &spec.output_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let record = run_experiment(&spec)?;
    let mut failed = 0;
    for run in &record.runs {
        let params = serde_json::to_string(&run.params)?;
        match &run.outcome {
            RunOutcome::Minimized(s) => {
                let verdict = serde_json::to_value(s.verdict)?;
                println!("{:>3} {params} energy={:.12e} verdict={}", run.index, s.energy, verdict.as_str().unwrap_or("?"));
            }
            RunOutcome::EscapeEnergy { width, energy } => println!("{:>3} {params} width={width} energy={energy:.12e}", run.index),
            RunOutcome::Failed { error } => {
                failed += 1;
                println!("{:>3} {params} failed: {error}", run.index);
            }
        }
    }
    match &spec.output_dir {
        Some(dir) => println!("record: {}", dir.join(format!("{}.json", spec.name)).display()),
        None => println!("{}", record.to_json()),
    }
    if failed > 0 {
        return Err(numerical(anyhow!("{failed} of {} runs failed", record.runs.len())));
    }
    Ok(())
}

fn corpus_cmd(command: CorpusCommand) -> CliResult {
    let entries = corpus();
    match command {
        CorpusCommand::List => {
            for e in &entries {
                println!("{:<16} {}", e.name, e.note);
            }
            Ok(())
        }
        CorpusCommand::Show { name } => {
            let e = entries.iter().find(|e| e.name == name).ok_or_else(|| anyhow!("no corpus graph named '{name}'"))?;
            println!("{}", e.graph.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => err.exit(),
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::CheckH { graph } => check_h(&graph),
        Command::Soliton { p, mass, sample } => soliton(p, mass, sample),
        Command::Minimize { graph, p, mass, h, truncation, hybrid, seed, perturbation, max_iterations, out } => {
            minimize_cmd(&graph, p, mass, h, truncation, hybrid, seed, perturbation, max_iterations, out)
        }
        Command::Rearrange { mode, graph, input, pendant_length, p, out } => rearrange(mode, &graph, &input, pendant_length, p, out),
        Command::Experiment { target, out, h } => experiment(&target, out, h),
        Command::Corpus { command } => corpus_cmd(command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
