//! The `localhcf` command line.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage error,
//! 3 input parse error, 4 estimator failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::baselines::{anneal_run, icm_run, mpm_run, tlr, AnnealSchedule, IcmOrder, MpmParams};
use crate::edge::{
    build_edge_field, compute_llr, data_from_llrs, make_chain_fixture, make_checkerboard, site_llrs,
    EdgeLattice, EdgeModel, EdgePotentials, Image,
};
use crate::error::MrfError;
use crate::formats::{
    format_labels, read_config, read_labeling, read_llr, read_pgm, render_overlay, write_compare_csv,
    write_labeling, write_llr, write_pgm, CompareRow, Domain, FormatError, Labeling, LlrFile,
};
use crate::hcf::{hcf_run, HcfOptions};
use crate::local::{assign_ranks, local_hcf_run, LocalHcfOptions, RankMode};
use crate::mrf::{energy, Configuration, DataTerm, Field};
use crate::oracle::{brute_force_map, chain_dp_map, is_local_minimum, OracleResult};
use crate::trace::RunTrace;

#[derive(Debug)]
pub enum CliError {
    Output(String),
    Usage(String),
    Input(String),
    Estimator(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Estimator(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Output(m) | CliError::Usage(m) | CliError::Input(m) | CliError::Estimator(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input_err(path: &Path, e: FormatError) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn estimator_err(name: &str, e: MrfError) -> CliError {
    CliError::Estimator(format!("{name}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "localhcf", version, about = "MAP estimation for Markov random fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic test image as binary PGM.
    Generate(GenerateArgs),
    /// Compute edge log likelihood ratios for an image.
    Llr(LlrArgs),
    /// Label an input with one estimator.
    Label(LabelArgs),
    /// Run every estimator on the same input and tabulate final energies.
    Compare(CompareArgs),
    /// Exact MAP for small fields and chains.
    Oracle(OracleArgs),
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let h = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    Ok((w, h))
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Checkerboard dimensions, e.g. 50x50.
    #[arg(long, value_parser = parse_dims)]
    checker: (usize, usize),
    /// Side length of a checkerboard square in pixels.
    #[arg(long, default_value_t = 10, value_parser = positive)]
    square: usize,
    #[arg(long, default_value_t = 64)]
    low: u8,
    #[arg(long, default_value_t = 192)]
    high: u8,
    /// Standard deviation of the additive pixel noise.
    #[arg(long, default_value_t = 8.0)]
    noise: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct LlrArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Binary PGM image; likelihoods come from the edge model.
    #[arg(long = "in")]
    image: Option<PathBuf>,
    /// Likelihood file (MRFLLR).
    #[arg(long)]
    llr: Option<PathBuf>,
    /// The built-in eight-site chain.
    #[arg(long)]
    chain_fixture: bool,
}

/// Settings shared by the estimator commands. Values given here override
/// the config file, which overrides the defaults.
#[derive(Debug, Args, Default)]
struct Params {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    continuity: Option<f64>,
    #[arg(long)]
    turn: Option<f64>,
    #[arg(long)]
    parallel: Option<f64>,
    #[arg(long)]
    edge_prior: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for single stochastic runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seeds for `compare`.
    #[arg(long)]
    seeds: Option<String>,
    /// `index` or `seeded:<n>`.
    #[arg(long)]
    rank_mode: Option<String>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Worker threads for Local HCF; 0 picks automatically.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    LocalHcf,
    Hcf,
    Tlr,
    IcmScan,
    IcmRandom,
    Anneal,
    Mpm,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::LocalHcf => "local-hcf",
            Estimator::Hcf => "hcf",
            Estimator::Tlr => "tlr",
            Estimator::IcmScan => "icm-scan",
            Estimator::IcmRandom => "icm-random",
            Estimator::Anneal => "anneal",
            Estimator::Mpm => "mpm",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        <Self as ValueEnum>::value_variants()
            .iter()
            .copied()
            .find(|e| e.name() == s)
    }

    fn is_seeded(self) -> bool {
        matches!(self, Estimator::IcmRandom | Estimator::Anneal | Estimator::Mpm)
    }

    /// Row order of the comparison table.
    pub const COMPARE_ORDER: [Estimator; 7] = [
        Estimator::Tlr,
        Estimator::Anneal,
        Estimator::Mpm,
        Estimator::IcmScan,
        Estimator::IcmRandom,
        Estimator::Hcf,
        Estimator::LocalHcf,
    ];
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Defaults to local-hcf, or the config file's `estimator`.
    #[arg(long, value_enum)]
    estimator: Option<Estimator>,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    /// Output directory for labeling.mrfl, trace.csv and overlay.pgm.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    /// Output CSV; printed to stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    /// Labeling file to check against the optimum.
    #[arg(long)]
    verify: Option<PathBuf>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub estimator: Estimator,
    pub potentials: EdgePotentials,
    pub model: EdgeModel,
    pub schedule: AnnealSchedule,
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub rank_mode: RankMode,
    pub max_iterations: Option<usize>,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mpm = MpmParams::default();
        Self {
            estimator: Estimator::LocalHcf,
            potentials: EdgePotentials::default(),
            model: EdgeModel::default(),
            schedule: AnnealSchedule::default(),
            burn_in: mpm.burn_in,
            samples: mpm.samples,
            seed: 0,
            seeds: vec![1, 2, 3, 4, 5],
            rank_mode: RankMode::SiteIndex,
            max_iterations: None,
            threads: 1,
        }
    }
}

/// Keys accepted in config files.
pub const CONFIG_KEYS: &[&str] = &[
    "estimator",
    "continuity",
    "turn",
    "parallel",
    "edge_prior",
    "mu",
    "sigma",
    "t0",
    "alpha",
    "sweeps",
    "burn_in",
    "samples",
    "seed",
    "seeds",
    "rank_mode",
    "max_iterations",
    "threads",
];

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let seeds: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
    match seeds {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("bad seed list {s:?}")),
    }
}

fn parse_rank_mode(s: &str) -> Result<RankMode, String> {
    match s {
        "index" => Ok(RankMode::SiteIndex),
        _ => s
            .strip_prefix("seeded:")
            .and_then(|n| n.parse().ok())
            .map(RankMode::Seeded)
            .ok_or_else(|| format!("rank mode must be `index` or `seeded:<n>`, got {s:?}")),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
        }
        match key {
            "estimator" => {
                self.estimator =
                    Estimator::from_name(value).ok_or_else(|| format!("unknown estimator {value:?}"))?
            }
            "continuity" => self.potentials.continuity = num(key, value)?,
            "turn" => self.potentials.turn = num(key, value)?,
            "parallel" => self.potentials.parallel = num(key, value)?,
            "edge_prior" => self.potentials.edge_prior = num(key, value)?,
            "mu" => self.model.mu_e = num(key, value)?,
            "sigma" => self.model.sigma = num(key, value)?,
            "t0" => self.schedule.t0 = num(key, value)?,
            "alpha" => self.schedule.alpha = num(key, value)?,
            "sweeps" => self.schedule.sweeps = num(key, value)?,
            "burn_in" => self.burn_in = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "rank_mode" => self.rank_mode = parse_rank_mode(value)?,
            "max_iterations" => self.max_iterations = Some(num(key, value)?),
            "threads" => self.threads = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn mpm_params(&self, seed: u64) -> MpmParams {
        MpmParams {
            burn_in: self.burn_in,
            samples: self.samples,
            seed,
        }
    }
}

fn resolve(params: &Params, estimator: Option<Estimator>) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &params.config {
        let text = fs::read_to_string(path).map_err(|e| input_err(path, e.into()))?;
        let entries = read_config(&text, CONFIG_KEYS).map_err(|e| input_err(path, e))?;
        for (k, (line, v)) in entries {
            cfg.set(&k, &v)
                .map_err(|m| CliError::Input(format!("{}: line {line}: {m}", path.display())))?;
        }
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    macro_rules! flag {
        ($($name:ident),*) => {
            $(if let Some(v) = &params.$name { flags.push((stringify!($name), v.to_string())); })*
        };
    }
    flag!(continuity, turn, parallel, edge_prior, mu, sigma, t0, alpha, sweeps, burn_in, samples, seed, seeds, rank_mode, max_iterations, threads);
    for (k, v) in flags {
        cfg.set(k, &v).map_err(CliError::Usage)?;
    }
    if let Some(e) = estimator {
        cfg.estimator = e;
    }
    cfg.potentials
        .validate()
        .and(cfg.model.validate())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for w in cfg.potentials.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

/// A field ready to be labeled, with what it came from.
pub struct Problem {
    pub field: Field,
    pub data: DataTerm,
    pub domain: Domain,
    pub image: Option<Image>,
}

fn load_problem(source: &Source, cfg: &RunConfig) -> CliResult<Problem> {
    if source.chain_fixture {
        let (field, data) = make_chain_fixture();
        let sites = field.num_sites();
        return Ok(Problem {
            field,
            data,
            domain: Domain::Chain { sites },
            image: None,
        });
    }
    let (width, height, data, image) = if let Some(path) = &source.image {
        let bytes = fs::read(path).map_err(|e| input_err(path, e.into()))?;
        let image = read_pgm(&bytes).map_err(|e| input_err(path, e))?;
        let data = compute_llr(&image, &cfg.model)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        (image.width(), image.height(), data, Some(image))
    } else if let Some(path) = &source.llr {
        let text = fs::read_to_string(path).map_err(|e| input_err(path, e.into()))?;
        let file = read_llr(&text).map_err(|e| input_err(path, e))?;
        let data = data_from_llrs(&file.llrs).map_err(|e| CliError::Input(e.to_string()))?;
        (file.width, file.height, data, None)
    } else {
        return Err(CliError::Usage("no input given".into()));
    };
    let field = build_edge_field(width, height, &cfg.potentials).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Problem {
        field,
        data,
        domain: Domain::Lattice { width, height },
        image,
    })
}

/// Final labeling of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub config: Configuration,
    pub trace: RunTrace,
    pub energy: f64,
    pub iterations: usize,
}

/// Runs `estimator` on `problem`; stochastic methods use `seed`.
pub fn run_estimator(problem: &Problem, cfg: &RunConfig, estimator: Estimator, seed: u64) -> Result<Outcome, MrfError> {
    let (field, data) = (&problem.field, &problem.data);
    let init = || tlr(field, data);
    let (config, trace, iterations) = match estimator {
        Estimator::LocalHcf => {
            let ranks = assign_ranks(field.num_sites(), cfg.rank_mode);
            let opts = LocalHcfOptions {
                max_iterations: cfg.max_iterations,
                threads: cfg.threads,
            };
            let (c, t) = local_hcf_run(field, data, &ranks, &opts)?;
            let it = t.iterations();
            (c, t, it)
        }
        Estimator::Hcf => {
            let opts = HcfOptions {
                rank_mode: cfg.rank_mode,
                max_steps: cfg.max_iterations,
            };
            let (c, t) = hcf_run(field, data, &opts)?;
            let n = t.steps.len();
            (c, t.to_run_trace(), n)
        }
        Estimator::Tlr => {
            let c = init();
            let e = energy(field, data, &c)?;
            (c, RunTrace::starting_at(e, field.num_sites()), 0)
        }
        Estimator::IcmScan | Estimator::IcmRandom => {
            let order = if estimator == Estimator::IcmScan {
                IcmOrder::Scan
            } else {
                IcmOrder::Random(seed)
            };
            let (c, t) = icm_run(field, data, &init(), order, cfg.max_iterations)?;
            let it = t.steps;
            (c, t, it)
        }
        Estimator::Anneal => {
            let (c, t) = anneal_run(field, data, &init(), &cfg.schedule, seed)?;
            let it = t.steps;
            (c, t, it)
        }
        Estimator::Mpm => {
            let (c, t) = mpm_run(field, data, &init(), &cfg.mpm_params(seed))?;
            let it = t.steps;
            (c, t, it)
        }
    };
    let energy = energy(field, data, &config)?;
    Ok(Outcome {
        config,
        trace,
        energy,
        iterations,
    })
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<String> {
    let (w, h) = args.checker;
    let img = make_checkerboard(w, h, args.square, args.low, args.high, args.noise, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&args.output, write_pgm(&img))?;
    Ok(format!("wrote {w}x{h} image to {}\n", args.output.display()))
}

fn cmd_llr(args: &LlrArgs) -> CliResult<String> {
    let mut cfg = RunConfig::default();
    if let Some(mu) = args.mu {
        cfg.model.mu_e = mu;
    }
    if let Some(sigma) = args.sigma {
        cfg.model.sigma = sigma;
    }
    let bytes = fs::read(&args.input).map_err(|e| input_err(&args.input, e.into()))?;
    let image = read_pgm(&bytes).map_err(|e| input_err(&args.input, e))?;
    let llrs = site_llrs(&image, &cfg.model).map_err(|e| CliError::Usage(e.to_string()))?;
    let file = LlrFile {
        width: image.width(),
        height: image.height(),
        llrs,
    };
    write_file(&args.output, write_llr(&file))?;
    Ok(format!("wrote {} likelihood ratios to {}\n", file.llrs.len(), args.output.display()))
}

fn cmd_label(args: &LabelArgs) -> CliResult<String> {
    let cfg = resolve(&args.params, args.estimator)?;
    let problem = load_problem(&args.source, &cfg)?;
    let estimator = cfg.estimator;
    let out = run_estimator(&problem, &cfg, estimator, cfg.seed).map_err(|e| estimator_err(estimator.name(), e))?;
    let label_count = problem.field.label_count();
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        let labeling = Labeling {
            domain: problem.domain,
            label_count,
            config: out.config.clone(),
        };
        write_file(&dir.join("labeling.mrfl"), write_labeling(&labeling))?;
        write_file(&dir.join("trace.csv"), out.trace.to_csv())?;
        if let Domain::Lattice { width, height } = problem.domain {
            let lattice = EdgeLattice::new(width, height).expect("validated on load");
            let overlay = render_overlay(&lattice, problem.image.as_ref(), &out.config);
            write_file(&dir.join("overlay.pgm"), write_pgm(&overlay))?;
        }
    }
    let mut report = String::new();
    let _ = writeln!(report, "estimator: {}", estimator.name());
    let _ = writeln!(report, "energy: {}", out.energy);
    let _ = writeln!(report, "iterations: {}", out.iterations);
    let _ = writeln!(report, "sites: {}", problem.field.num_sites());
    if problem.field.num_sites() <= 64 {
        let _ = writeln!(report, "labeling: {}", format_labels(&out.config, label_count));
    }
    Ok(report)
}

/// Runs every estimator (stochastic ones once per seed) and summarizes.
pub fn compare(problem: &Problem, cfg: &RunConfig) -> Result<Vec<CompareRow>, CliError> {
    let jobs: Vec<(Estimator, u64)> = Estimator::COMPARE_ORDER
        .iter()
        .flat_map(|&e| {
            let seeds = if e.is_seeded() { cfg.seeds.clone() } else { vec![cfg.seed] };
            seeds.into_iter().map(move |s| (e, s))
        })
        .collect();
    let results: Vec<Result<Outcome, CliError>> = jobs
        .par_iter()
        .map(|&(e, s)| run_estimator(problem, cfg, e, s).map_err(|err| estimator_err(e.name(), err)))
        .collect();
    let mut rows = Vec::new();
    let mut it = jobs.iter().zip(results);
    for e in Estimator::COMPARE_ORDER {
        let runs = if e.is_seeded() { cfg.seeds.len() } else { 1 };
        let mut energies = Vec::with_capacity(runs);
        let mut iterations = 0usize;
        for _ in 0..runs {
            let (_, r) = it.next().expect("one result per job");
            let out = r?;
            energies.push(out.energy);
            iterations += out.iterations;
        }
        rows.push(CompareRow {
            method: e.name().to_string(),
            energy_mean: energies.iter().sum::<f64>() / runs as f64,
            energy_best: energies.iter().copied().fold(f64::INFINITY, f64::min),
            runs,
            iterations_mean: iterations as f64 / runs as f64,
        });
    }
    Ok(rows)
}

fn cmd_compare(args: &CompareArgs) -> CliResult<String> {
    let cfg = resolve(&args.params, None)?;
    let problem = load_problem(&args.source, &cfg)?;
    let table = write_compare_csv(&compare(&problem, &cfg)?);
    match &args.output {
        Some(path) => {
            write_file(path, &table)?;
            Ok(format!("wrote comparison table to {}\n", path.display()))
        }
        None => Ok(table),
    }
}

/// Exact optimum: chain DP when the field is a chain, else exhaustive search.
pub fn solve_exact(problem: &Problem) -> Result<OracleResult, MrfError> {
    match chain_dp_map(&problem.field, &problem.data) {
        Err(MrfError::NotAChain(_)) => brute_force_map(&problem.field, &problem.data),
        other => other,
    }
}

fn cmd_oracle(args: &OracleArgs) -> CliResult<String> {
    let cfg = resolve(&args.params, None)?;
    let problem = load_problem(&args.source, &cfg)?;
    let best = solve_exact(&problem).map_err(|e| match e {
        MrfError::TooLarge { .. } => CliError::Estimator(format!("refusing exhaustive search: {e}")),
        e => estimator_err("oracle", e),
    })?;
    let lc = problem.field.label_count();
    let mut report = String::new();
    let _ = writeln!(report, "optimum: {}", format_labels(&best.config, lc));
    let _ = writeln!(report, "energy: {}", best.energy);
    let _ = writeln!(report, "ties: {}", best.optimal_count);
    if let Some(path) = &args.verify {
        let text = fs::read_to_string(path).map_err(|e| input_err(path, e.into()))?;
        let labeling = read_labeling(&text).map_err(|e| input_err(path, e))?;
        if labeling.domain != problem.domain {
            return Err(CliError::Input(format!(
                "{}: labeling is for {:?}, input is {:?}",
                path.display(),
                labeling.domain,
                problem.domain
            )));
        }
        let local = is_local_minimum(&problem.field, &problem.data, &labeling.config)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let e = energy(&problem.field, &problem.data, &labeling.config)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let _ = writeln!(report, "labeling_energy: {e}");
        let _ = writeln!(report, "local_minimum: {local}");
        let _ = writeln!(report, "gap: {}", e - best.energy);
    }
    Ok(report)
}

/// Parses `args` (including the program name), runs the command and returns
/// its stdout text or an error carrying the exit code.
pub fn execute<I, T>(args: I) -> Result<String, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err((2, e.render().to_string())),
            };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Llr(a) => cmd_llr(a),
        Command::Label(a) => cmd_label(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    result.map_err(|e| (e.exit_code(), format!("error: {}\n", e.message())))
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match execute(args) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err((code, msg)) => {
            eprint!("{msg}");
            code
        }
    }
}
