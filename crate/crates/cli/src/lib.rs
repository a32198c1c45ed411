//! Command-line front end for the `hypconst` library.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypconst::constants::{self, sci3, KappaMethod, DEFAULT_TOLERANCE};
use hypconst::curtain::backend::{Point, SpaceBackend};
use hypconst::curtain::empirical::{
    empirical_four_point_delta, CurtainMetric, EmpiricalDelta, ExactMetric, PairOracle, SampleRegion, SamplerConfig,
};
use hypconst::curtain::model::{
    candidates_for, curtain_distance_bounds, CandidateConfig, CurtainModelConfig, DLBounds, WeightSequence,
    DEFAULT_GRID_STEP, DEFAULT_L_MAX,
};
use hypconst::curtain::reparam::{reparametrize_to_rough_geodesic, RoughParametrization};
use hypconst::schema::{self, PointDoc};
use hypconst::{
    certify, CurtainError, HyperbolicityBounds, PathSystem, QuasiParams, Route, SchemaError, VerifierReport,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hypconst", version, about = "Hyperbolicity constants, finite-instance verification and curtain-model experiments")]
pub struct Cli {
    /// Worker thread cap for parallel scans [default: all cores].
    #[arg(long, env = "HYPCONST_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format [default: json, csv for kappa-table].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// How `κ` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    FixedPoint,
    KappaN(u32),
    TheoremB,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed-point" => Ok(Mode::FixedPoint),
            "theorem-b" => Ok(Mode::TheoremB),
            _ => match s.strip_prefix("n:").map(str::parse::<u32>) {
                Some(Ok(n)) if n >= 1 => Ok(Mode::KappaN(n)),
                _ => Err(format!("unknown mode {s:?}; expected fixed-point, n:<int ≥ 1> or theorem-b")),
            },
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::FixedPoint => f.write_str("fixed-point"),
            Mode::KappaN(n) => write!(f, "n:{n}"),
            Mode::TheoremB => f.write_str("theorem-b"),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// κ, δ′ and δ for quasi-geodesic parameters (q1, q2, D).
    #[command(allow_negative_numbers = true)]
    Constants {
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q2: f64,
        #[arg(long = "D")]
        d: f64,
        /// fixed-point, n:<int> or theorem-b (theorem-b needs q1 = 1).
        #[arg(long, default_value = "fixed-point")]
        mode: Mode,
        /// Relative bracket width for the fixed-point search.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// κₙ for n = 1..=n_max with a running minimum.
    #[command(allow_negative_numbers = true)]
    KappaTable {
        #[arg(long)]
        q: f64,
        #[arg(long = "D")]
        d: f64,
        #[arg(long, default_value_t = 2000)]
        n_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a finite metric space and path system and certify its constants.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Space JSON: {"labels": [...], "dist": [[...]]}.
        #[arg(long)]
        space: PathBuf,
        /// Path JSON: {"paths": {"x|y": [...]}} [default: two-point paths].
        #[arg(long)]
        paths: Option<PathBuf>,
        /// Rough constant of the paths.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Curtain-model distance bounds, reparametrisation and empirical four-point defect.
    Curtain(CurtainArgs),
}

#[derive(Debug, Args)]
pub struct CurtainArgs {
    /// Backend JSON: euclidean {"type", "dim"} or tree {"type", "vertices", "edges"}.
    #[arg(long)]
    pub backend: PathBuf,
    /// Pairs JSON: {"pairs": [[P, P], ...]}.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long = "L-max", default_value_t = DEFAULT_L_MAX)]
    pub l_max: usize,
    /// Pole spacing of the candidate curtains, also the reparametrisation sample spacing.
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    pub grid_step: f64,
    /// Extra random-direction candidates per pair (Euclidean backends).
    #[arg(long, default_value_t = 0)]
    pub random_curtains: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample size for the empirical four-point defect (cube [0, 10]^dim, or the whole tree).
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Use the backend metric instead of curtain bounds for reparametrisation and sampling.
    #[arg(long)]
    pub exact_base: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A failure caused by the command line or its input files.
#[derive(Debug)]
pub enum CliError {
    Input(String),
}

impl std::error::Error for CliError {}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Input(e.to_string())
    }
}

macro_rules! input_err {
    ($e:expr) => {
        CliError::Input($e.to_string())
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub mode: String,
    pub kappa: f64,
    pub method: KappaMethod,
    pub delta_prime: f64,
    pub delta: Option<f64>,
    /// `f(κ) ≤ κ` re-checked on the reported value.
    pub certificate_ok: bool,
    pub bounds: HyperbolicityBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReparamOutcome {
    Ok(RoughParametrization),
    DensityFailure { t: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub x: PointDoc,
    pub y: PointDoc,
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub per_l: Vec<DLBounds>,
    pub candidates: usize,
    pub reparametrization: ReparamOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ceilings {
    pub params: QuasiParams,
    /// `δ′` through the closed-form route.
    pub theorem_b_delta_prime: f64,
    /// `δ` through the fixed-point route.
    pub fixed_point_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub oracle: String,
    pub region: SampleRegion,
    pub result: EmpiricalDelta,
    /// `fixed_point_delta − value`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtainReport {
    pub model: CurtainModelConfig,
    pub candidates: CandidateConfig,
    pub pairs: Vec<PairReport>,
    pub empirical: EmpiricalReport,
    pub ceilings: Ceilings,
    pub within_ceiling: bool,
}

/// A rendered report, its human summary and the exit code.
pub struct Outcome {
    pub body: String,
    pub summary: String,
    pub code: i32,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn run_constants(q1: f64, q2: f64, d: f64, mode: Mode, tolerance: f64, format: Format) -> Result<Outcome, CliError> {
    let params = QuasiParams::new(q1, q2, d).map_err(|e| input_err!(e))?;
    let bounds = match mode {
        Mode::FixedPoint => {
            let cert = constants::solve_kappa(&params, tolerance).map_err(|e| input_err!(e))?;
            HyperbolicityBounds::from_kappa(&params, cert, Route::FixedPoint)
        }
        Mode::KappaN(n) => {
            let cert = constants::kappa_n(&params, n).map_err(|e| input_err!(e))?;
            HyperbolicityBounds::from_kappa(&params, cert, Route::KappaN)
        }
        Mode::TheoremB => {
            if !params.is_rough() {
                return Err(CliError::Input(format!("theorem-b needs q1 = 1 (got {q1})")));
            }
            constants::theorem_b_bounds(q2, d)
        }
    }
    .map_err(|e| input_err!(e))?;
    let cert = &bounds.provenance.kappa;
    let report = ConstantsReport {
        mode: mode.to_string(),
        kappa: cert.kappa,
        method: cert.method,
        delta_prime: bounds.delta_prime,
        delta: bounds.delta,
        certificate_ok: cert.verify(&params),
        bounds: bounds.clone(),
    };
    let delta_text = report.delta.map_or("n/a".to_string(), sci3);
    let summary = format!(
        "κ = {} ({})  δ′ = {}  δ = {}",
        sci3(report.kappa),
        method_name(report.method),
        sci3(report.delta_prime),
        delta_text
    );
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => csv_table(
            &["mode", "method", "kappa", "delta_prime", "delta", "certificate_ok"],
            [vec![
                report.mode.clone(),
                method_name(report.method),
                report.kappa.to_string(),
                report.delta_prime.to_string(),
                report.delta.map_or(String::new(), |v| v.to_string()),
                report.certificate_ok.to_string(),
            ]],
        ),
    };
    let code = if report.certificate_ok { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { body, summary, code })
}

fn method_name(m: KappaMethod) -> String {
    match m {
        KappaMethod::FixedPoint => "fixed_point".into(),
        KappaMethod::KappaN { n } => format!("kappa_n:{n}"),
        KappaMethod::DirectBound => "direct_bound".into(),
    }
}

pub fn run_kappa_table(q: f64, d: f64, n_max: u32, format: Format) -> Result<Outcome, CliError> {
    let rows = constants::kappa_table(q, d, n_max).map_err(|e| input_err!(e))?;
    let last = rows.last().expect("n_max ≥ 1");
    let summary = format!("min κₙ over n ≤ {n_max}: {} at n = {}", sci3(last.running_min), last.argmin);
    let body = match format {
        Format::Json => to_json(&rows),
        Format::Csv => csv_table(
            &["n", "K_n", "eps_n", "kappa_n", "running_min", "argmin"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.k.to_string(),
                    r.eps.to_string(),
                    r.kappa.to_string(),
                    r.running_min.to_string(),
                    r.argmin.to_string(),
                ]
            }),
        ),
    };
    Ok(Outcome { body, summary, code: EXIT_OK })
}

pub fn run_verify(space: &str, paths: Option<&str>, q: f64, format: Format) -> Result<Outcome, CliError> {
    let space = schema::parse_space(space)?;
    let system = match paths {
        Some(text) => schema::parse_paths(text, &space)?,
        None => PathSystem::direct(&space),
    };
    let report: VerifierReport = certify(&system, &space, q).map_err(|e| input_err!(e))?;
    let summary = format!(
        "D = {}  δ₄ = {}  certified δ = {}  {}",
        sci3(report.d_combined),
        sci3(report.delta_four_exact),
        report.certified.delta.map_or("n/a".to_string(), sci3),
        if report.within_bound { "within bound" } else { "VIOLATION" }
    );
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let quantities = [
                ("coarse_c", report.coarse_c),
                ("D_g1", report.d_g1),
                ("D_g2", report.d_g2),
                ("D_g3", report.d_g3),
                ("D_combined", report.d_combined),
                ("delta_four_exact", report.delta_four_exact),
                ("thin_triangle", report.thin_triangle),
                ("thin_quad", report.thin_quad),
                ("kappa", report.certified.provenance.kappa.kappa),
                ("delta_prime", report.certified.delta_prime),
                ("delta", report.certified.delta.unwrap_or(f64::NAN)),
            ];
            let rows = quantities
                .iter()
                .map(|(k, v)| vec![k.to_string(), v.to_string()])
                .chain([vec!["within_bound".to_string(), report.within_bound.to_string()]]);
            csv_table(&["quantity", "value"], rows)
        }
    };
    let code = if report.within_bound { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { body, summary, code })
}

/// Samples `[x, y]` every `step` and parametrises them by model distance.
fn reparametrize_pair(
    backend: &SpaceBackend,
    x: &Point,
    y: &Point,
    step: f64,
    oracle: &dyn PairOracle,
    q: f64,
) -> Result<ReparamOutcome, CurtainError> {
    let seg = backend.geodesic(x, y)?;
    let len = seg.length();
    let mut positions: Vec<f64> = (0..).map(|k| k as f64 * step).take_while(|&s| s < len).collect();
    if len > 0.0 {
        positions.push(len);
    } else {
        positions = vec![0.0];
    }
    let points: Vec<Point> = positions.iter().map(|&s| backend.point_at(&seg, s)).collect();
    let m = points.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let lowers: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| oracle.bounds(backend, &points[i], &points[j]).map(|b| b.0))
        .collect::<Result<_, _>>()?;
    let mut dist = vec![vec![0.0; m]; m];
    for (&(i, j), &v) in pairs.iter().zip(&lowers) {
        dist[i][j] = v;
        dist[j][i] = v;
    }
    match reparametrize_to_rough_geodesic(&positions, |i, j| dist[i][j], q) {
        Ok(r) => Ok(ReparamOutcome::Ok(r)),
        Err(e @ CurtainError::DensityFailure { t }) => Ok(ReparamOutcome::DensityFailure { t, message: e.to_string() }),
        Err(e) => Err(e),
    }
}

pub fn run_curtain(args: &CurtainArgs, backend_text: &str, pairs_text: &str, format: Format) -> Result<Outcome, CliError> {
    let backend = schema::parse_backend(backend_text)?;
    let pairs = schema::parse_pairs(pairs_text, &backend)?;
    let model = CurtainModelConfig { weights: WeightSequence::HalfPowers, l_max: args.l_max };
    model.validate().map_err(|e| input_err!(e))?;
    let cand_cfg = CandidateConfig { grid_step: args.grid_step, random_curtains: args.random_curtains, seed: args.seed };
    let params = constants::curtain_model_params(model.Lambda()).map_err(|e| input_err!(e))?;
    let curtain_oracle = CurtainMetric { model: model.clone(), candidates: cand_cfg.clone() };
    let oracle: &dyn PairOracle = if args.exact_base { &ExactMetric } else { &curtain_oracle };

    let mut reports = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        let cands = candidates_for(&backend, x, y, &cand_cfg).map_err(|e| input_err!(e))?;
        let b = curtain_distance_bounds(&backend, x, y, &model, &cands).map_err(|e| input_err!(e))?;
        let reparametrization =
            reparametrize_pair(&backend, x, y, args.grid_step, oracle, params.q2).map_err(|e| input_err!(e))?;
        reports.push(PairReport {
            x: schema::point_doc(&backend, x),
            y: schema::point_doc(&backend, y),
            distance: backend.distance(x, y).map_err(|e| input_err!(e))?,
            lower: b.lower,
            upper: b.upper,
            per_l: b.per_l,
            candidates: cands.len(),
            reparametrization,
        });
    }

    let region = match backend {
        SpaceBackend::Euclidean { .. } => SampleRegion::Cube { min: 0.0, max: 10.0 },
        SpaceBackend::Tree(_) => SampleRegion::WholeTree,
    };
    let sampler = SamplerConfig { n_samples: args.samples, seed: args.seed, region: region.clone() };
    let result = empirical_four_point_delta(&backend, oracle, &sampler).map_err(|e| input_err!(e))?;

    let theorem_b = constants::theorem_b_bounds(params.q2, params.d).map_err(|e| input_err!(e))?;
    let kappa = constants::solve_kappa(&params, DEFAULT_TOLERANCE).map_err(|e| input_err!(e))?;
    let fixed = HyperbolicityBounds::from_kappa(&params, kappa, Route::FixedPoint).map_err(|e| input_err!(e))?;
    let ceilings = Ceilings {
        params,
        theorem_b_delta_prime: theorem_b.delta_prime,
        fixed_point_delta: fixed.delta.expect("curtain params are rough"),
    };
    let within_ceiling = result.value <= ceilings.fixed_point_delta;
    let empirical = EmpiricalReport {
        oracle: if args.exact_base { "exact".into() } else { "curtain".into() },
        region,
        margin: ceilings.fixed_point_delta - result.value,
        result,
    };
    let report = CurtainReport { model, candidates: cand_cfg, pairs: reports, empirical, ceilings, within_ceiling };

    let failures = report.pairs.iter().filter(|p| matches!(p.reparametrization, ReparamOutcome::DensityFailure { .. })).count();
    let summary = format!(
        "{} pairs ({} density failures)  empirical δ = {} over {} samples  ceilings: δ′ = {} (closed form), δ = {} (fixed point)",
        report.pairs.len(),
        failures,
        sci3(report.empirical.result.value),
        report.empirical.result.n_samples,
        sci3(report.ceilings.theorem_b_delta_prime),
        sci3(report.ceilings.fixed_point_delta)
    );
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => curtain_csv(&report),
    };
    let code = if report.within_ceiling { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { body, summary, code })
}

fn curtain_csv(report: &CurtainReport) -> String {
    let l_max = report.model.l_max;
    let mut header: Vec<String> = ["pair", "distance", "lower", "upper"].map(String::from).to_vec();
    for l in 1..=l_max {
        header.push(format!("d{l}_lower"));
        header.push(format!("d{l}_upper"));
    }
    header.extend(["reparam_status".to_string(), "reparam_defect".to_string()]);
    let rows = report.pairs.iter().enumerate().map(|(k, p)| {
        let mut row = vec![k.to_string(), p.distance.to_string(), p.lower.to_string(), p.upper.to_string()];
        for l in 0..l_max {
            let (lo, hi) = p.per_l.get(l).map_or((0.0, 0.0), |b| (b.lower, b.upper));
            row.push(lo.to_string());
            row.push(hi.to_string());
        }
        match &p.reparametrization {
            ReparamOutcome::Ok(r) => row.extend(["ok".to_string(), r.defect.to_string()]),
            ReparamOutcome::DensityFailure { t, .. } => row.extend([format!("density_failure_t{t}"), String::new()]),
        }
        row
    });
    csv_table(&header, rows)
}

fn csv_table<H: AsRef<[u8]>>(header: &[H], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Constants { q1, q2, d, mode, tolerance, out } => {
            run_constants(*q1, *q2, *d, *mode, *tolerance, out.format.unwrap_or(Format::Json))
        }
        Command::KappaTable { q, d, n_max, out } => run_kappa_table(*q, *d, *n_max, out.format.unwrap_or(Format::Csv)),
        Command::Verify { space, paths, q, out } => {
            let space = read(space)?;
            let paths = paths.as_ref().map(read).transpose()?;
            run_verify(&space, paths.as_deref(), *q, out.format.unwrap_or(Format::Json))
        }
        Command::Curtain(args) => {
            let backend = read(&args.backend)?;
            let pairs = read(&args.pairs)?;
            run_curtain(args, &backend, &pairs, args.out.format.unwrap_or(Format::Json))
        }
    }
}

fn output_of(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Constants { out, .. } | Command::KappaTable { out, .. } | Command::Verify { out, .. } => {
            out.output.as_ref()
        }
        Command::Curtain(args) => args.out.output.as_ref(),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: HYPCONST_THREADS must be at least 1");
            return EXIT_INPUT;
        }
        // a pool may already exist when called repeatedly in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match output_of(&cli) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.body) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", outcome.body),
    }
    eprintln!("{}", outcome.summary);
    outcome.code
}
