//! `springjoint`: batch front end for spring-joint kinematics, inverse design,
//! crease-pattern generation, validation and the loop-closure oracle.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 malformed input, 3 domain error,
//! 4 infeasible design, 5 validation failure, 6 oracle threshold exceeded.

mod angle;
mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use springjoint::design::DesignError;
use springjoint::generators::{
    gen_miura_with_spring_joints, gen_modular_units, gen_straight_spring_joint, gen_tilted_modular_units,
    gen_tilted_spring_joint, MiuraSubstitutionSpec, ModularParams, StraightJointParams, TiltedJointParams,
};
use springjoint::kinematics::regime_analysis;
use springjoint::oracle::oracle_grid;
use springjoint::pattern::{flat_fold_map, from_fold_json, to_fold_json, to_svg, validate_flat_foldable};
use springjoint::{
    compound_start_angle, sample_curve, solve_waypoints, CreasePattern, DesignProblem, SpringJointSpec, Waypoint,
};

use crate::angle::{parse_angle, parse_angle_list};
use crate::config::CliConfig;

const EXIT_IO: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_INVALID: u8 = 5;
const EXIT_ORACLE: u8 = 6;

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Result<T> = std::result::Result<T, Failure>;

trait ExitContext<T> {
    fn exit(self, code: u8) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> ExitContext<T> for std::result::Result<T, E> {
    fn exit(self, code: u8) -> Result<T> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

fn fail<T>(code: u8, error: anyhow::Error) -> Result<T> {
    Err(Failure { code, error })
}

#[derive(Debug, Parser)]
#[command(name = "springjoint", version, about = "Spring-joint origami mechanisms: kinematics, design and crease patterns")]
struct Cli {
    /// Flat `key = value` configuration file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for default output files.
    #[arg(long, global = true, env = "SPRINGJOINT_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a joint's fold-angle curve and summarise its regimes.
    Kinematics(KinematicsArgs),
    /// Fit constituent angles to (xi, phi) waypoints.
    Design(DesignArgs),
    /// Generate a crease pattern as FOLD and SVG.
    Generate(GenerateArgs),
    /// Check a FOLD crease pattern for local and global flat-foldability.
    Validate(ValidateArgs),
    /// Compare the closed-form fold angle with the loop-closure oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["phi0", "joint"])))]
struct KinematicsArgs {
    /// Constituent start angles, e.g. `3pi/4 x4` or `2.0,2.5`.
    #[arg(long, num_args = 1..)]
    phi0: Vec<String>,
    /// Joint JSON file (`{"constituent_angles": [...]}`).
    #[arg(long)]
    joint: Option<PathBuf>,
    /// Number of curve samples over [0, pi].
    #[arg(long)]
    samples: Option<usize>,
    /// CSV output path (default: `<out-dir>/kinematics.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Waypoints as a JSON array of `{xi, phi, weight?}` or a CSV file with
    /// header `xi,phi[,weight]` (angle literals allowed).
    #[arg(long)]
    waypoints: PathBuf,
    /// Number of reverse folds.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON output path (default: `<out-dir>/design.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Straight,
    Tilted,
    Miura,
    Modular,
    ModularTilted,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Straight => "straight",
            Kind::Tilted => "tilted",
            Kind::Miura => "miura",
            Kind::Modular => "modular",
            Kind::ModularTilted => "modular-tilted",
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    kind: Kind,
    /// Generator parameters as JSON.
    #[arg(long)]
    params: PathBuf,
    /// Output path without extension; `.fold` and `.svg` are appended
    /// (default: `<out-dir>/<kind>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the pattern even if it fails validation.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// FOLD file to check.
    fold: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    xi_points: usize,
    #[arg(long, default_value_t = 50)]
    phi0_points: usize,
    /// Largest accepted |closed form - oracle|.
    #[arg(long)]
    threshold: Option<f64>,
    /// CSV output path (default: `<out-dir>/oracle.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
}

struct RunContext {
    config: CliConfig,
    out_dir: PathBuf,
}

impl RunContext {
    fn output(&self, explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
        explicit.unwrap_or_else(|| self.out_dir.join(default_name))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).exit(EXIT_IO)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display())).exit(EXIT_IO)?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display())).exit(EXIT_IO)
}

fn positive_tolerance(value: Option<f64>, default: f64) -> Result<f64> {
    let tol = value.unwrap_or(default);
    if !(tol.is_finite() && tol > 0.0) {
        return fail(EXIT_MALFORMED, anyhow!("tolerance must be positive, got {tol}"));
    }
    Ok(tol)
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "none".to_string(), |v| format!("xi = {v:.12}"))
}

/// Shape of a joint file, read before the angles are range-checked so that
/// malformed documents and out-of-range angles get different exit codes.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JointFile {
    constituent_angles: Vec<f64>,
}

fn cmd_kinematics(ctx: &RunContext, args: KinematicsArgs) -> Result<()> {
    let joint = match &args.joint {
        Some(path) => {
            let text = read(path)?;
            let raw: JointFile = serde_json::from_str(&text).context("joint JSON").exit(EXIT_MALFORMED)?;
            SpringJointSpec::new(raw.constituent_angles).exit(EXIT_DOMAIN)?
        }
        None => {
            let angles = parse_angle_list(&args.phi0).exit(EXIT_MALFORMED)?;
            SpringJointSpec::new(angles).exit(EXIT_DOMAIN)?
        }
    };
    let samples = args.samples.unwrap_or(ctx.config.samples);
    let curve = sample_curve(&joint, samples).exit(EXIT_DOMAIN)?;
    let report = regime_analysis(&joint, samples).exit(EXIT_DOMAIN)?;
    let out = ctx.output(args.out, "kinematics.csv");
    write(&out, &curve.to_csv())?;

    println!("constituents: {:?}", joint.constituents());
    println!("start angle: {:.12}", compound_start_angle(&joint));
    println!("phi=0 crossing: {}", fmt_opt(report.zero_crossing));
    println!("hard stop: {}", fmt_opt(report.hard_stop));
    println!("wrote {} ({} samples)", out.display(), curve.len());
    Ok(())
}

fn read_waypoints(path: &Path) -> Result<Vec<Waypoint>> {
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if !is_csv {
        return serde_json::from_str(&text).context("waypoints JSON").exit(EXIT_MALFORMED);
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    if !(header == ["xi", "phi"] || header == ["xi", "phi", "weight"]) {
        return fail(EXIT_MALFORMED, anyhow!("waypoint CSV header must be `xi,phi` or `xi,phi,weight`"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != header.len() {
                return Err(anyhow!("row {}: expected {} fields", i + 1, header.len()));
            }
            let xi = parse_angle(fields[0]).with_context(|| format!("row {}", i + 1))?;
            let phi = parse_angle(fields[1]).with_context(|| format!("row {}", i + 1))?;
            let weight = match fields.get(2) {
                Some(w) => w.parse().with_context(|| format!("row {}: weight", i + 1))?,
                None => 1.0,
            };
            Ok(Waypoint::weighted(xi, phi, weight))
        })
        .collect::<anyhow::Result<Vec<_>>>()
        .exit(EXIT_MALFORMED)
}

fn cmd_design(ctx: &RunContext, args: DesignArgs) -> Result<()> {
    let waypoints = read_waypoints(&args.waypoints)?;
    let mut problem = DesignProblem::new(waypoints, args.n);
    problem.max_iterations = args.max_iterations.unwrap_or(ctx.config.design_max_iterations);
    problem.tolerance = positive_tolerance(args.tolerance, ctx.config.design_tolerance)?;
    let solution = match solve_waypoints(&problem) {
        Ok(s) => s,
        Err(DesignError::Infeasible(report)) => {
            return fail(EXIT_INFEASIBLE, anyhow!("infeasible waypoints: {}", report.summary()))
        }
        Err(e) => return fail(EXIT_DOMAIN, e.into()),
    };
    let out = ctx.output(args.out, "design.json");
    let mut json = serde_json::to_string_pretty(&solution).exit(EXIT_IO)?;
    json.push('\n');
    write(&out, &json)?;
    println!("constituents: {:?}", solution.joint.constituents());
    println!("max residual: {:.3e}", solution.max_abs_residual());
    println!("converged: {} after {} iterations", solution.converged, solution.iterations);
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_params<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).context("generator parameters").exit(EXIT_MALFORMED)
}

fn generate(kind: Kind, mut value: serde_json::Value) -> Result<CreasePattern> {
    let pattern = match kind {
        Kind::Straight => gen_straight_spring_joint(&parse_params::<StraightJointParams>(value)?),
        Kind::Tilted => gen_tilted_spring_joint(&parse_params::<TiltedJointParams>(value)?).map(|t| t.pattern),
        Kind::Miura => {
            // The Miura angle defaults to half the joint's start angle.
            if let Some(obj) = value.as_object_mut().filter(|o| !o.contains_key("miura_angle")) {
                let joint: SpringJointSpec = obj
                    .get("joint")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()
                    .exit(EXIT_MALFORMED)?
                    .ok_or_else(|| anyhow!("missing field `joint`"))
                    .exit(EXIT_MALFORMED)?;
                obj.insert("miura_angle".into(), (0.5 * compound_start_angle(&joint)).into());
            }
            gen_miura_with_spring_joints(&parse_params::<MiuraSubstitutionSpec>(value)?)
        }
        Kind::Modular | Kind::ModularTilted => {
            let p = parse_params::<ModularParams>(value)?;
            let layout = if kind == Kind::Modular {
                gen_modular_units(&p.joint, p.unit_length, p.unit_width)
            } else {
                gen_tilted_modular_units(&p.joint, p.unit_length, p.unit_width)
            };
            layout.map(|l| l.pattern)
        }
    };
    pattern.exit(EXIT_DOMAIN)
}

/// Per-vertex table plus the global fold-map check. Returns whether the
/// pattern passes.
fn validation_report(cp: &CreasePattern, tol: f64) -> (String, bool) {
    let report = validate_flat_foldable(cp, tol);
    let mut out = String::new();
    let _ = writeln!(out, "{:>7} {:>14} {:>14} {:>6} {:>15} {:>7}  status", "vertex", "x", "y", "degree", "kawasaki", "maekawa");
    for r in &report.vertices {
        let [x, y] = cp.vertices()[r.vertex];
        let _ = writeln!(
            out,
            "{:>7} {:>14.9} {:>14.9} {:>6} {:>15.3e} {:>7}  {}",
            r.vertex,
            x,
            y,
            r.degree,
            r.kawasaki_defect,
            r.maekawa_balance,
            if r.flat_foldable { "ok" } else { "FAIL" }
        );
    }
    let failures = report.failures().count();
    let _ = writeln!(out, "{} interior vertices, {failures} failing (tolerance {tol:e})", report.vertices.len());
    let map_ok = if cp.faces().is_empty() {
        let _ = writeln!(out, "fold map: no faces");
        true
    } else {
        match flat_fold_map(cp, 0, tol) {
            Ok(map) => {
                let _ = writeln!(out, "fold map: consistent, max cycle deviation {:.3e}", map.max_cycle_deviation);
                true
            }
            Err(e) => {
                let _ = writeln!(out, "fold map: FAIL, {e}");
                false
            }
        }
    };
    (out, failures == 0 && map_ok)
}

fn cmd_generate(ctx: &RunContext, args: GenerateArgs) -> Result<()> {
    let text = read(&args.params)?;
    let value: serde_json::Value = serde_json::from_str(&text).context("parameters JSON").exit(EXIT_MALFORMED)?;
    let cp = generate(args.kind, value)?;
    let tol = positive_tolerance(args.tolerance, ctx.config.tolerance)?;
    let (table, ok) = validation_report(&cp, tol);
    if !ok && !args.force {
        print!("{table}");
        return fail(EXIT_INVALID, anyhow!("generated pattern fails validation; nothing written (use --force to write it anyway)"));
    }
    let stem = ctx.output(args.out, args.kind.name());
    let fold_path = stem.with_extension("fold");
    let svg_path = stem.with_extension("svg");
    write(&fold_path, &to_fold_json(&cp))?;
    write(&svg_path, &to_svg(&cp, &ctx.config.svg))?;
    if !ok {
        eprintln!("warning: pattern fails validation, written because of --force");
    }
    println!("{} vertices, {} creases", cp.vertex_count(), cp.crease_count());
    println!("wrote {} and {}", fold_path.display(), svg_path.display());
    Ok(())
}

fn cmd_validate(ctx: &RunContext, args: ValidateArgs) -> Result<()> {
    let text = read(&args.fold)?;
    let cp = from_fold_json(&text).exit(EXIT_MALFORMED)?;
    let tol = positive_tolerance(args.tolerance, ctx.config.tolerance)?;
    let (table, ok) = validation_report(&cp, tol);
    print!("{table}");
    if ok {
        Ok(())
    } else {
        fail(EXIT_INVALID, anyhow!("pattern is not flat-foldable"))
    }
}

fn cmd_oracle(ctx: &RunContext, args: OracleArgs) -> Result<()> {
    let threshold = positive_tolerance(args.threshold, ctx.config.oracle_threshold)?;
    let grid = oracle_grid(args.xi_points, args.phi0_points).exit(EXIT_DOMAIN)?;
    let out = ctx.output(args.out, "oracle.csv");
    write(&out, &grid.to_csv())?;
    let err = grid.max_abs_err();
    println!("{} samples, max |closed form - oracle| = {err:.3e}", grid.samples.len());
    println!("wrote {}", out.display());
    if err > threshold {
        return fail(EXIT_ORACLE, anyhow!("oracle error {err:.3e} exceeds threshold {threshold:e}"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => CliConfig::load(path).exit(EXIT_MALFORMED)?,
        None => CliConfig::default(),
    };
    let out_dir = cli.out_dir.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let ctx = RunContext { config, out_dir };
    match cli.command {
        Command::Kinematics(args) => cmd_kinematics(&ctx, args),
        Command::Design(args) => cmd_design(&ctx, args),
        Command::Generate(args) => cmd_generate(&ctx, args),
        Command::Validate(args) => cmd_validate(&ctx, args),
        Command::Oracle(args) => cmd_oracle(&ctx, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
