//! The `qhyper` command line: argument parsing, the five commands and their
//! JSON, table and CSV renderings.
//!
//! JSON is the canonical output. Tables and CSV are derived from the same
//! value, so scripts can rely on one schema.

pub mod input;
pub mod reproduce;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::elliptic::{analyze_elliptic, delta_bruteforce_oracle, EllipticProfile};
use crate::geometry::{membership_report, HermitianSpace};
use crate::jorgensen::{jorgensen_test, TestReport, DEFAULT_MAX_STEPS};
use crate::mobius::{compare_criteria_on, CriteriaComparison, DiskGrid, MobiusPair};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qhyper", version, about = "Quaternionic hyperbolic isometries and a Jorgensen-type discreteness test")]
pub struct Cli {
    /// Membership tolerance for check/delta/test/mobius; replaces every claim tolerance in reproduce.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Step budget of the conjugation iteration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Polar grid for the disk search, `R` or `RxA` (radial x angular steps).
    #[arg(long, global = true, default_value = "200x256")]
    pub grid: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the rendered report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized suites; every command here is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Angle at which eigenvalue classes merge.
    #[arg(long, global = true)]
    pub cluster_tol: Option<f64>,
    /// Threshold on `|a_corner|^2 - 1` that ends the iteration.
    #[arg(long, global = true)]
    pub convergence_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check membership of a matrix in Sp(n,1).
    Check { file: PathBuf },
    /// Eigenvalue classes, delta(g), kind and fixed-set dimension of an elliptic element.
    Delta {
        file: PathBuf,
        /// Cross-check delta against the brute-force search over unit quaternions.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run the discreteness test on an elliptic g and any h.
    Test { g: PathBuf, h: PathBuf },
    /// Compare the three sufficient conditions for a pair from SL(2,C).
    Mobius {
        /// Rotation angle of g, in (0, pi).
        #[arg(long)]
        theta: Option<String>,
        /// Entries a b c d of h.
        #[arg(long, num_args = 4, allow_hyphen_values = true, value_names = ["A", "B", "C", "D"])]
        h: Option<Vec<String>>,
        /// JSON file `{"theta": .., "h": [a, b, c, d]}` instead of --theta/--h.
        #[arg(long, conflicts_with_all = ["theta", "h"])]
        input: Option<PathBuf>,
        /// Dump every grid sample of f as CSV.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
        #[arg(long)]
        radius_cap: Option<f64>,
    },
    /// Recompute every published numeric value and report pass/fail.
    Reproduce {
        /// Print the claim inventory without running it.
        #[arg(long)]
        list: bool,
    },
}

/// Validated global settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub claim_tolerance: Option<f64>,
    pub max_steps: usize,
    pub grid: DiskGrid,
    pub format: Format,
    pub seed: u64,
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("--grid expects R or RxA, got '{text}'"));
    let mut parts = text.split(['x', 'X']);
    let r: usize = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
    let a = match parts.next() {
        Some(s) => s.trim().parse().map_err(|_| bad())?,
        None => r,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((r, a))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let mut tolerances = Tolerances::default();
        let membership_override = match cli.command {
            Command::Reproduce { .. } => None,
            _ => cli.tolerance,
        };
        if let Some(t) = membership_override {
            tolerances.membership = t;
        }
        if let Some(t) = cli.cluster_tol {
            tolerances.angle_cluster = t;
        }
        if let Some(t) = cli.convergence_tol {
            tolerances.convergence = t;
        }
        let (radial_steps, angular_steps) = parse_grid(&cli.grid)?;
        let mut grid = DiskGrid { radial_steps, angular_steps, ..DiskGrid::default() };
        if let Command::Mobius { radius_cap: Some(cap), .. } = cli.command {
            grid.radius_cap = cap;
        }
        let claim_tolerance = match cli.command {
            Command::Reproduce { .. } => cli.tolerance,
            _ => None,
        };
        let cfg = RunConfig { tolerances, claim_tolerance, max_steps: cli.max_steps, grid, format: cli.format, seed: cli.seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if let Some(t) = self.claim_tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Invalid(format!("--tolerance must be positive, got {t}")));
            }
        }
        if self.grid.radial_steps < 8 || self.grid.angular_steps < 8 {
            return Err(Error::Invalid(format!(
                "grid resolution must be at least 8 in each direction, got {}x{}",
                self.grid.radial_steps, self.grid.angular_steps
            )));
        }
        if !(self.grid.radius_cap > 0.0 && self.grid.radius_cap < 1.0) {
            return Err(Error::Invalid(format!("--radius-cap must lie in (0, 1), got {}", self.grid.radius_cap)));
        }
        if self.max_steps == 0 {
            return Err(Error::Invalid("--max-steps must be positive".into()));
        }
        Ok(())
    }
}

/// A finished command: its JSON value, a human-readable table and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub table: String,
    pub exit: i32,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Table => self.table.clone(),
            Format::Csv => to_csv(&self.json),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flattens a JSON value into `path,value` rows.
pub fn to_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut out = String::from("path,value\n");
    for (k, x) in rows {
        let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&x));
    }
    out
}

pub fn cmd_check(file: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let (n, m) = input::read_matrix(file)?;
    let report = membership_report(&m, &HermitianSpace::new(n)?)?;
    let accepted = report.worst <= cfg.tolerances.membership;
    let mut table = format!("n = {n}\n");
    for (label, r) in report.identities() {
        let _ = writeln!(table, "{label:<28} {r:.3e}");
    }
    let _ = writeln!(table, "worst residual {:.3e} vs tolerance {:.1e}: {}", report.worst, cfg.tolerances.membership, if accepted { "ACCEPT" } else { "REJECT" });
    let json = json!({
        "command": "check",
        "n": n,
        "accepted": accepted,
        "tolerance": cfg.tolerances.membership,
        "report": to_value(&report),
    });
    Ok(Outcome { json, table, exit: if accepted { 0 } else { 3 } })
}

/// `max` over positive classes of the brute-force `delta` for that class.
pub fn oracle_delta(profile: &EllipticProfile, samples: usize) -> f64 {
    let neg = profile.negative_angle();
    profile.positive_classes().map(|c| delta_bruteforce_oracle(c.angle, neg, samples)).fold(0.0, f64::max)
}

fn profile_table(p: &EllipticProfile) -> String {
    let mut t = String::from("class  angle        multiplicity  type\n");
    for (i, c) in p.classes.iter().enumerate() {
        let _ = writeln!(t, "{i:<6} {:<12.9} {:<13} {:?}", c.angle, c.multiplicity, c.type_tag);
    }
    let _ = writeln!(t, "delta = {:.12}", p.delta);
    let _ = writeln!(t, "kind = {}", p.kind);
    let _ = writeln!(t, "fixed set dimension = {}", p.fixed_set_dimension);
    t
}

pub fn cmd_delta(file: &Path, oracle: bool, samples: usize, cfg: &RunConfig) -> Result<Outcome> {
    let g = input::read_isometry(file, cfg.tolerances.membership)?;
    let profile = analyze_elliptic(&g, &cfg.tolerances)?;
    let mut table = profile_table(&profile);
    let mut json = json!({ "command": "delta", "profile": to_value(&profile) });
    if oracle {
        if samples == 0 {
            return Err(Error::Invalid("--samples must be positive".into()));
        }
        let value = oracle_delta(&profile, samples);
        let _ = writeln!(table, "oracle delta = {value:.12} ({samples} samples, difference {:.3e})", (value - profile.delta).abs());
        json["oracle"] = json!({ "value": value, "samples": samples, "difference": (value - profile.delta).abs() });
    }
    Ok(Outcome { json, table, exit: 0 })
}

fn test_table(r: &TestReport) -> String {
    let c = &r.criterion;
    let mut t = format!(
        "verdict = {}\ncosh^2 = {:.12}\ndelta = {:.12}\nproduct = {:.12} ({:?})\n",
        r.verdict, c.cosh2, c.delta, c.product, c.attained
    );
    if let Some(trace) = &r.trace {
        let _ = writeln!(t, "terminal = {}, distinct elements = {}", trace.terminal, trace.distinct_elements);
        let _ = writeln!(t, "{:>5} {:>22} {:>14} {:>11} {:>11}", "k", "|a_corner|^2", "|beta|", "contract", "residual");
        for s in &trace.steps {
            let _ = writeln!(
                t,
                "{:>5} {:>22.16} {:>14.6e} {:>11} {:>11.2e}",
                s.k, s.corner_modulus_sq, s.beta_norm, s.contraction_ok, s.membership_residual
            );
        }
    }
    for n in &r.notes {
        let _ = writeln!(t, "note: {n}");
    }
    t
}

pub fn cmd_test(g: &Path, h: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let g = input::read_isometry(g, cfg.tolerances.membership)?;
    let h = input::read_isometry(h, cfg.tolerances.membership)?;
    if g.n() != h.n() {
        return Err(Error::DimensionMismatch(format!("g is in Sp({},1) but h is in Sp({},1)", g.n(), h.n())));
    }
    let report = jorgensen_test(&g, &h, cfg.max_steps, &cfg.tolerances)?;
    let table = test_table(&report);
    Ok(Outcome { json: json!({ "command": "test", "report": to_value(&report) }), table, exit: 0 })
}

fn mobius_table(c: &CriteriaComparison) -> String {
    format!(
        "theta = {:.12}\n\
         inf f ~ {:.12} at t = {:.9}{:+.9}i (grid min {:.12}, f(0) = {:.12})\n\
         |h|^2 + 2 = {:.12}\n\
         1 + |bc| = {:.12}\n\
         4(1 + |bc|) = {:.12}\n\
         4 sin^2(theta) inf f = {:.12}\n\
         sin^2(theta) (|h|^2 + 2) = {:.12}\n\
         4 sin^2(theta) (1 + |bc|) = {:.12}\n",
        c.theta,
        c.f_inf,
        c.f_argmin.re,
        c.f_argmin.im,
        c.f_grid_min,
        c.f_at_zero,
        c.norm_sq_plus_two,
        c.one_plus_bc,
        c.four_one_plus_bc,
        c.disk_value,
        c.norm_value,
        c.classical_value
    )
}

pub fn cmd_mobius(pair: &MobiusPair, grid_csv: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    let cmp = compare_criteria_on(pair, &cfg.grid);
    if let Some(path) = grid_csv {
        std::fs::write(path, cfg.grid.csv(&pair.h())).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let table = mobius_table(&cmp);
    Ok(Outcome { json: json!({ "command": "mobius", "pair": to_value(pair), "comparison": to_value(&cmp) }), table, exit: 0 })
}

pub fn cmd_reproduce(list: bool, cfg: &RunConfig) -> Outcome {
    if list {
        let claims = reproduce::inventory();
        let mut table = String::new();
        let items: Vec<Value> = claims
            .iter()
            .map(|c| {
                let _ = writeln!(table, "{:<28} [{}] {} (tol {:.0e})", c.id, c.anchor, c.statement, c.tolerance);
                json!({ "id": c.id, "anchor": c.anchor, "statement": c.statement, "expected": c.expected, "tolerance": c.tolerance, "mode": c.mode })
            })
            .collect();
        return Outcome { json: json!({ "command": "reproduce", "claims": items }), table, exit: 0 };
    }
    let results = reproduce::run_claims(cfg.claim_tolerance);
    let mut table = String::new();
    for r in &results {
        let shown = match (&r.computed, &r.error) {
            (Some(v), _) => format!("{v:.6e}"),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "-".into(),
        };
        let _ = writeln!(table, "{} {:<28} computed {} expected {} tol {:.0e}", if r.pass { "PASS" } else { "FAIL" }, r.id, shown, r.expected, r.tolerance);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let _ = writeln!(table, "{} of {} claims pass", results.len() - failed, results.len());
    Outcome {
        json: json!({ "command": "reproduce", "passed": failed == 0, "failed": failed, "results": to_value(&results) }),
        table,
        exit: if failed == 0 { 0 } else { 4 },
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Check { file } => cmd_check(file, &cfg),
        Command::Delta { file, oracle, samples } => cmd_delta(file, *oracle, *samples, &cfg),
        Command::Test { g, h } => cmd_test(g, h, &cfg),
        Command::Mobius { theta, h, input: path, grid_csv, .. } => {
            let pair = match (path, theta, h) {
                (Some(p), _, _) => input::mobius_from_json(&input::read_json(p)?)?,
                (None, Some(t), Some(h)) => input::mobius_from_tokens(t, h)?,
                _ => return Err(Error::Invalid("mobius needs --theta and --h, or --input".into())),
            };
            cmd_mobius(&pair, grid_csv.as_deref(), &cfg)
        }
        Command::Reproduce { list } => Ok(cmd_reproduce(*list, &cfg)),
    }
}

/// What a run prints and returns.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses and runs without touching the process streams, except that
/// `--output` is honoured.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let exit = e.exit_code();
            let text = e.render().to_string();
            return if exit == 0 {
                Invocation { exit, stdout: text, stderr: String::new() }
            } else {
                Invocation { exit: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let text = outcome.render(cli.format);
            match &cli.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Invocation { exit: outcome.exit, ..Default::default() },
                    Err(e) => Invocation { exit: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
                },
                None => Invocation { exit: outcome.exit, stdout: text, stderr: String::new() },
            }
        }
        Err(e) => Invocation { exit: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = run(args);
    print!("{}", inv.stdout);
    eprint!("{}", inv.stderr);
    inv.exit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("200x256").unwrap(), (200, 256));
        assert_eq!(parse_grid("64").unwrap(), (64, 64));
        assert!(parse_grid("4x").is_err());
        assert!(parse_grid("1x2x3").is_err());
    }

    #[test]
    fn small_grids_are_rejected() {
        let inv = run(["qhyper", "--grid", "4x4", "reproduce", "--list"]);
        assert_eq!(inv.exit, 2, "{}", inv.stderr);
    }

    #[test]
    fn csv_flattens_nested_values() {
        let csv = to_csv(&json!({"a": {"b": [1, "x,y"]}, "c": true}));
        assert_eq!(csv, "path,value\na.b.0,1\na.b.1,\"x,y\"\nc,true\n");
    }

    #[test]
    fn clap_errors_exit_two() {
        assert_eq!(run(["qhyper", "frobnicate"]).exit, 2);
        assert_eq!(run(["qhyper", "mobius", "--h", "1", "0"]).exit, 2);
    }
}
