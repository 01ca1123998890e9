//! Command-line front end. [`run`] parses an argument vector, executes one
//! subcommand and returns the exit code together with the report and the
//! text destined for stdout and stderr.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::antilinear::{concurrence, filter_value, n_tangle, three_tangle};
use crate::correlator::{exact_correlators, invariant_from_table, sample_table, CorrelatorTable, InvariantKind};
use crate::error::{Error, Result};
use crate::io::{read_filter, read_rho, read_state, sha256_hex};
use crate::lift::{concurrence_sq_linear, tau3_sq_linear, Tau3Form};
use crate::noise::{first_order_oracle, noise_curve, noise_curve_csv, OracleTarget};
use crate::qubit::{DensityMatrix, PauliString, PureState};
use crate::roof::{eps_grid, roof_upper_bound, vanish_threshold_scan, Family, RANK_TOL};
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(name = "slocc", version, about = "Local-SL entanglement invariants, their correlator form and shot-noise detection")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timestamps and durations out of the report.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact invariants of a pure state.
    Invariants(InvariantsArgs),
    /// Exact or sampled Pauli correlators.
    Correlators(CorrelatorsArgs),
    /// Estimate an invariant from simulated finite-shot correlators.
    Simulate(SimulateArgs),
    /// White-noise formulas against direct evaluation over an eps grid.
    NoiseCurve(NoiseCurveArgs),
    /// Convex-roof upper bound for a density matrix or a family scan.
    Roof(RoofArgs),
    /// Run the built-in checks and optionally write regression artifacts.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    C2,
    Tau3,
    Ntangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Ghzw,
    WhiteNoise,
}

#[derive(Debug, Args)]
struct Source {
    /// Pure state JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "rho")]
    state: Option<PathBuf>,
    /// Density matrix JSON file.
    #[arg(long, value_name = "FILE")]
    rho: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InvariantsArgs {
    #[arg(long, value_name = "FILE")]
    state: PathBuf,
    /// Invariant to compute; all applicable ones when absent.
    #[arg(long)]
    which: Option<Which>,
    /// Evaluate a filter spec JSON in addition.
    #[arg(long, value_name = "FILE")]
    filter: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorrelatorsArgs {
    #[command(flatten)]
    source: Source,
    /// `all` or a file of Pauli strings separated by whitespace or commas.
    #[arg(long, default_value = "all")]
    strings: String,
    /// Sample with this many shots per string instead of exact values.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the table as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, alias = "which")]
    invariant: Which,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the sampled table as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NoiseCurveArgs {
    #[arg(long, value_name = "FILE")]
    state: PathBuf,
    /// `c2` for two qubits, `tau3` for three; inferred when absent.
    #[arg(long)]
    which: Option<Which>,
    /// Grid `a:b:step`.
    #[arg(long, default_value = "0:0.5:0.05")]
    eps_grid: String,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoofArgs {
    /// Density matrix JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    rho: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Single mixing parameter for `--family`.
    #[arg(long, conflicts_with = "eps_grid")]
    eps: Option<f64>,
    /// Scan `--family` over the grid `a:b:step`.
    #[arg(long)]
    eps_grid: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the scan as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Directory for regression artifacts.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub flag: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub argv: Vec<String>,
    pub files: Vec<FileDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Inputs,
    pub outputs: BTreeMap<String, Output>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_unix: Option<u64>,
}

impl RunReport {
    fn new(command: &str, argv: &[String]) -> Self {
        Self {
            command: command.into(),
            inputs: Inputs {
                argv: argv.to_vec(),
                files: Vec::new(),
            },
            outputs: BTreeMap::new(),
            seed: None,
            duration_seconds: None,
            started_unix: None,
        }
    }

    fn digest(&mut self, flag: &str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::parse(path.display().to_string(), "<file>", e))?;
        self.inputs.files.push(FileDigest {
            flag: flag.into(),
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    fn put(&mut self, name: &str, value: impl Into<Value>, provenance: &str) {
        self.outputs.insert(
            name.into(),
            Output {
                value: value.into(),
                stderr: None,
                provenance: provenance.into(),
            },
        );
    }

    fn put_with_err(&mut self, name: &str, value: f64, stderr: Option<f64>, provenance: &str) {
        self.outputs.insert(
            name.into(),
            Output {
                value: value.into(),
                stderr,
                provenance: provenance.into(),
            },
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let width = self.outputs.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.command);
        for (name, o) in &self.outputs {
            let value = match &o.value {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            let err = o.stderr.map(|e| format!(" ± {e}")).unwrap_or_default();
            out += &format!("  {name:<width$}  {value}{err}  [{}]\n", o.provenance);
        }
        if let Some(seed) = self.seed {
            out += &format!("  seed {seed}\n");
        }
        if let Some(d) = self.duration_seconds {
            out += &format!("  {d:.3} s\n");
        }
        out
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code for `e`: 2 for malformed input, 1 for computation failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Spec(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome {
                code,
                report: None,
                stdout,
                stderr,
            };
        }
    };
    let start = Instant::now();
    let args = argv.get(1..).unwrap_or_default();
    match dispatch(&cli, args) {
        Ok((mut report, code)) => {
            if !cli.deterministic {
                report.duration_seconds = Some(start.elapsed().as_secs_f64());
                report.started_unix = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .ok()
                    .map(|d| d.as_secs());
            }
            let stdout = if cli.json { report.to_json() } else { report.to_text() };
            Outcome {
                code,
                report: Some(report),
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            report: None,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cli: &Cli, argv: &[String]) -> Result<(RunReport, i32)> {
    match &cli.command {
        Command::Invariants(a) => invariants(a, argv).map(|r| (r, 0)),
        Command::Correlators(a) => correlators(a, argv).map(|r| (r, 0)),
        Command::Simulate(a) => simulate(a, argv).map(|r| (r, 0)),
        Command::NoiseCurve(a) => noise(a, argv).map(|r| (r, 0)),
        Command::Roof(a) => roof(a, argv).map(|r| (r, 0)),
        Command::Selftest(a) => selftest(a, argv),
    }
}

fn load_state(report: &mut RunReport, path: &Path) -> Result<PureState> {
    report.digest("--state", path)?;
    Ok(read_state(path)?.normalized())
}

fn load_source(report: &mut RunReport, source: &Source) -> Result<DensityMatrix> {
    match (&source.state, &source.rho) {
        (Some(p), None) => Ok(DensityMatrix::from_pure(&load_state(report, p)?)),
        (None, Some(p)) => {
            report.digest("--rho", p)?;
            read_rho(p)
        }
        _ => Err(Error::parse("<argv>", "--state/--rho", "exactly one of --state or --rho is required")),
    }
}

fn invariants(a: &InvariantsArgs, argv: &[String]) -> Result<RunReport> {
    let mut report = RunReport::new("invariants", argv);
    let psi = load_state(&mut report, &a.state)?;
    let n = psi.n_qubits();
    let wanted: Vec<Which> = match a.which {
        Some(w) => vec![w],
        None => [Which::C2, Which::Tau3, Which::Ntangle]
            .into_iter()
            .filter(|w| match w {
                Which::C2 => n == 2,
                Which::Tau3 => n == 3,
                Which::Ntangle => n % 2 == 0,
            })
            .collect(),
    };
    for w in wanted {
        match w {
            Which::C2 => {
                let c = concurrence(&psi)?;
                report.put("c2", c * c, "exact");
                let t = exact_correlators(&psi, &PauliString::all(2))?;
                report.put("c2_linear", concurrence_sq_linear(&t)?, "exact");
            }
            Which::Tau3 => {
                report.put("tau3", three_tangle(&psi)?, "exact");
                let t = exact_correlators(&psi, &PauliString::all(3))?;
                report.put("tau3_sq_linear", tau3_sq_linear(&t, Tau3Form::MixedForm)?, "exact");
            }
            Which::Ntangle => report.put("ntangle", n_tangle(&psi)?, "exact"),
        }
    }
    if let Some(path) = &a.filter {
        report.digest("--filter", path)?;
        let v = filter_value(&psi, &read_filter(path)?)?;
        report.put("filter_re", v.re, "exact");
        report.put("filter_im", v.im, "exact");
        report.put("filter_abs", v.norm(), "exact");
    }
    Ok(report)
}

fn parse_strings(spec: &str, n: usize, report: &mut RunReport) -> Result<Vec<PauliString>> {
    if spec == "all" {
        return Ok(PauliString::all(n));
    }
    let path = Path::new(spec);
    report.digest("--strings", path)?;
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(&name, "<file>", e))?;
    let strings = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let s: PauliString = t.parse().map_err(|e| Error::parse(&name, t, e))?;
            if s.n_qubits() != n {
                return Err(Error::parse(&name, t, format!("expected {n} qubits")));
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    if strings.is_empty() {
        return Err(Error::parse(&name, "strings", "no Pauli strings found"));
    }
    Ok(strings)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn correlators(a: &CorrelatorsArgs, argv: &[String]) -> Result<RunReport> {
    let mut report = RunReport::new("correlators", argv);
    let rho = load_source(&mut report, &a.source)?;
    let strings = parse_strings(&a.strings, rho.n_qubits(), &mut report)?;
    let (table, provenance) = match a.shots {
        Some(shots) => {
            report.seed = Some(a.seed);
            (sample_table(&rho, &strings, shots, a.seed)?, "sampled")
        }
        None => (exact_correlators(&rho, &strings)?, "exact"),
    };
    for (s, e) in table.iter() {
        report.put_with_err(&s.to_string(), e.value, e.stderr, provenance);
    }
    if let Some(out) = &a.out {
        write_out(out, &table.to_csv_string())?;
    }
    Ok(report)
}

fn invariant_kind(w: Which) -> Result<InvariantKind> {
    match w {
        Which::C2 => Ok(InvariantKind::C2),
        Which::Tau3 => Ok(InvariantKind::Tau3Sq),
        Which::Ntangle => Err(Error::parse("<argv>", "--invariant", "ntangle has no correlator form here")),
    }
}

fn simulate(a: &SimulateArgs, argv: &[String]) -> Result<RunReport> {
    let mut report = RunReport::new("simulate", argv);
    report.seed = Some(a.seed);
    let rho = load_source(&mut report, &a.source)?;
    let kind = invariant_kind(a.invariant)?;
    let strings = PauliString::all(rho.n_qubits());
    let sampled: CorrelatorTable = sample_table(&rho, &strings, a.shots, a.seed)?;
    let est = invariant_from_table(&sampled, kind)?;
    let exact = invariant_from_table(&exact_correlators(&rho, &strings)?, kind)?;
    let name = kind.as_str();
    report.put_with_err(name, est.value, est.stderr, "sampled");
    report.put(&format!("{name}_exact"), exact.value, "exact");
    report.put("shots_per_setting", a.shots, "input");
    if let Some(out) = &a.out {
        write_out(out, &sampled.to_csv_string())?;
    }
    Ok(report)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |msg: &str| Error::parse("<argv>", "--eps-grid", format!("{msg}: `{spec}`"));
    if parts.len() != 3 {
        return Err(bad("expected a:b:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<Result<_>>()?;
    if nums[0] < 0.0 || nums[1] > 1.0 {
        return Err(bad("grid must lie in [0, 1]"));
    }
    eps_grid(nums[0], nums[1], nums[2]).map_err(|_| bad("empty grid or non-positive step"))
}

fn noise(a: &NoiseCurveArgs, argv: &[String]) -> Result<RunReport> {
    let mut report = RunReport::new("noise-curve", argv);
    let psi = load_state(&mut report, &a.state)?;
    let target = match (a.which, psi.n_qubits()) {
        (Some(Which::C2), _) | (None, 2) => OracleTarget::C2,
        (Some(Which::Tau3), _) | (None, 3) => OracleTarget::Tau3,
        _ => return Err(Error::parse("<argv>", "--which", "noise curves exist for c2 and tau3 only")),
    };
    let grid = parse_grid(&a.eps_grid)?;
    let oracle = first_order_oracle(&psi, target)?;
    report.put("value_at_zero", oracle.value_at_zero, "exact");
    report.put("slope_numeric", oracle.slope_numeric, "oracle");
    if let Some(s) = oracle.slope_numeric_pure_g {
        report.put("slope_numeric_pure_g", s, "oracle");
    }
    for v in &oracle.variants {
        report.put(&format!("slope_formula:{}", v.id), v.formula_slope, "formula");
    }
    report.put("matched_variants", json!(oracle.matched), "oracle");
    let rows = noise_curve(&psi, target, &grid)?;
    report.put("rows", rows.len(), "formula");
    if let Some(out) = &a.out {
        write_out(out, &noise_curve_csv(&rows))?;
    }
    Ok(report)
}

/// `4` for rank 2, otherwise `max(r, 12)`.
fn default_m(rank: usize) -> usize {
    if rank <= 2 {
        (rank * rank).clamp(rank, 4)
    } else {
        rank.max(12)
    }
}

fn roof(a: &RoofArgs, argv: &[String]) -> Result<RunReport> {
    let mut report = RunReport::new("roof", argv);
    report.seed = Some(a.seed);
    let family = a.family.map(|f| match f {
        FamilyArg::Ghzw => Family::Ghzw,
        FamilyArg::WhiteNoise => Family::WhiteNoise,
    });
    match (&a.rho, family, a.eps, &a.eps_grid) {
        (Some(path), None, None, None) => {
            report.digest("--rho", path)?;
            let rho = read_rho(path)?;
            roof_single(&mut report, &rho, a)?;
        }
        (None, Some(f), Some(eps), None) => {
            roof_single(&mut report, &f.state(eps)?, a)?;
        }
        (None, Some(f), None, Some(grid)) => {
            let grid = parse_grid(grid)?;
            let m = a.m.unwrap_or(match f {
                Family::Ghzw => 4,
                Family::WhiteNoise => 12,
            });
            let scan = vanish_threshold_scan(f, &grid, m, a.restarts, a.seed)?;
            for p in &scan.points {
                report.put(&format!("upper_bound@{}", p.eps), p.upper_bound, "optimizer");
            }
            report.put("threshold", json!(scan.threshold), "optimizer");
            report.put("m", m, "input");
            if let Some(out) = &a.out {
                write_out(out, &scan.to_csv())?;
            }
        }
        _ => {
            return Err(Error::parse(
                "<argv>",
                "--rho/--family",
                "give --rho FILE, or --family with exactly one of --eps or --eps-grid",
            ))
        }
    }
    Ok(report)
}

fn roof_single(report: &mut RunReport, rho: &DensityMatrix, a: &RoofArgs) -> Result<()> {
    let m = a.m.unwrap_or_else(|| default_m(rho.rank(RANK_TOL)));
    let res = roof_upper_bound(rho, m, a.restarts, a.seed)?;
    report.put("upper_bound", res.upper_bound, "optimizer");
    report.put("eigen_bound", res.eigen_bound, "exact");
    report.put("restarts_used", res.restarts_used, "optimizer");
    report.put("converged", res.converged, "optimizer");
    report.put("m", m, "input");
    Ok(())
}

fn selftest(a: &SelftestArgs, argv: &[String]) -> Result<(RunReport, i32)> {
    let mut report = RunReport::new("selftest", argv);
    let result = run_selftest(a.out.as_deref())?;
    for c in &result.checks {
        report.put(&c.name, c.passed, "selftest");
    }
    report.put("passed", result.passed(), "selftest");
    Ok((report, if result.passed() { 0 } else { 1 }))
}
