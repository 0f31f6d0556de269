//! `visolve` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use visolve_core::operators::{build_gaussian_kernel, build_motion_kernel, DeblurProblem, NashProblem, NetworkProblem};
use visolve_core::{AlgorithmVariant, ProblemInstance, Severity, ValidationMode};

use crate::error::{Error, Result};
use crate::format::pgm::{write_pgm, GrayImage};
use crate::format::problem::{parse_nash, parse_network, read_to_string};
use crate::format::{parse_config, read_pgm, RunConfig};
use crate::harness::{self, ExperimentPreset, PresetName, SweepGrid};

#[derive(Debug, Parser)]
#[command(name = "visolve", version, about = "Solve variational inequalities with the double-inertial extragradient method")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Network equilibrium flow (six nodes, eight arcs unless --problem is given)
    Network(ProblemArgs),
    /// Nash-Cournot oligopoly (five firms unless --problem is given)
    Nash(ProblemArgs),
    /// Least-squares image deblurring
    Deblur(DeblurArgs),
    /// Re-run a problem over a grid of (mu, beta, sigma)
    Sweep(SweepArgs),
    /// Run several algorithm variants from the same start
    Compare(CompareArgs),
    /// Run a bundled experiment
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Solver settings file with `key = value` lines [default: built-in settings]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for output files
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Iteration budget [default: 10000 for network and nash, 2000 for deblur, 5000 for sweep]
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Stopping tolerance: on E_n for network and nash, on the relative change for deblur [default: 1e-6, deblur 1e-3 gaussian and 1e-2 motion]
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Treat every parameter assumption as a hard error [default: off]
    #[arg(long)]
    pub strict: bool,
    /// Record wall time in the outputs, which then differ between runs [default: off]
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantName {
    Mdisem,
    #[value(name = "simplified_41a")]
    Simplified41a,
    #[value(name = "linear_41b")]
    Linear41b,
    #[value(name = "no_inertia")]
    NoInertia,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Network,
    Nash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Blur {
    Gaussian,
    Motion,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem data file [default: the built-in instance]
    #[arg(long, value_name = "PATH")]
    pub problem: Option<PathBuf>,
    /// Algorithm variant
    #[arg(long, value_enum, default_value = "mdisem")]
    pub variant: VariantName,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DeblurArgs {
    /// Input image, binary PGM [default: built-in 64x64 synthetic image]
    #[arg(long, value_name = "PATH")]
    pub image: Option<PathBuf>,
    /// Blur kernel
    #[arg(long, value_enum, default_value = "gaussian")]
    pub blur: Blur,
    /// Gaussian kernel side length
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub size: usize,
    /// Gaussian standard deviation
    #[arg(long, value_name = "X", default_value_t = 1.5)]
    pub sigma: f64,
    /// Motion blur length in pixels
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub length: usize,
    /// Motion blur angle in degrees
    #[arg(long, value_name = "X", default_value_t = 60.0)]
    pub angle: f64,
    /// Treat the input image as already blurred instead of blurring it first [default: off]
    #[arg(long)]
    pub as_observed: bool,
    /// Algorithm variant
    #[arg(long, value_enum, default_value = "mdisem")]
    pub variant: VariantName,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Problem to sweep
    #[arg(long, value_enum, default_value = "network")]
    pub target: Target,
    /// Comma-separated mu values [default: the published sensitivity grid when no list is given, else the config value]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub mu: Vec<f64>,
    /// Comma-separated beta values [default: as for --mu]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Comma-separated sigma values [default: as for --mu]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub sigma_vals: Vec<f64>,
    /// Algorithm variant
    #[arg(long, value_enum, default_value = "mdisem")]
    pub variant: VariantName,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Problem to solve
    #[arg(long, value_enum, default_value = "network")]
    pub target: Target,
    /// Comma-separated variants, at least two
    #[arg(long, value_enum, value_name = "LIST", value_delimiter = ',', default_value = "mdisem,no_inertia")]
    pub variants: Vec<VariantName>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// network_51, nash_52, deblur_gaussian_53, deblur_motion_53 or linear_rate
    #[arg(value_name = "NAME")]
    pub name: PresetName,
    /// Algorithm variant [default: the preset's own, linear_41b for linear_rate and mdisem otherwise]
    #[arg(long, value_enum)]
    pub variant: Option<VariantName>,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("visolve: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. Returns the text for standard output.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Network(a) => {
            let problem = match &a.problem {
                Some(p) => parse_network(p, &read_to_string(p)?)?,
                None => NetworkProblem::six_node_example(),
            };
            let problem = ProblemInstance::network(problem)?;
            let x0 = vec![1.0; problem.dim()];
            solve("network", problem, x0, None, a.variant, &a.common, RunConfig::default())
        }
        Command::Nash(a) => {
            let problem = match &a.problem {
                Some(p) => parse_nash(p, &read_to_string(p)?)?,
                None => NashProblem::five_firm_example(),
            };
            let problem = ProblemInstance::nash(problem);
            let x0 = vec![1.0; problem.dim()];
            solve("nash", problem, x0, None, a.variant, &a.common, RunConfig::default())
        }
        Command::Deblur(a) => deblur(a),
        Command::Sweep(a) => sweep(a),
        Command::Compare(a) => compare(a),
        Command::Preset(a) => preset(a),
    }
}

/// Applies `--config`, `--max-iter`, `--tol` and `--strict` on top of `base`.
/// `--tol` sets the relative tolerance when `relative` is true.
fn run_config(common: &Common, base: RunConfig, relative: bool) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => parse_config(p, &read_to_string(p)?, base)?,
        None => base,
    };
    if let Some(n) = common.max_iter {
        cfg.stop.max_iter = n;
    }
    if let Some(t) = common.tol {
        if relative {
            cfg.stop.relative_tol = t;
        } else {
            cfg.stop.residual_tol = t;
        }
    }
    if common.strict {
        cfg.solver.validation_mode = ValidationMode::Strict;
    }
    cfg.stop.validate()?;
    Ok(cfg)
}

fn variant_for(name: VariantName, problem: &ProblemInstance) -> Result<AlgorithmVariant> {
    Ok(match name {
        VariantName::Mdisem => AlgorithmVariant::Mdisem,
        VariantName::Simplified41a => AlgorithmVariant::Simplified41a,
        VariantName::NoInertia => AlgorithmVariant::NoInertia,
        VariantName::Linear41b => {
            if problem.strong_monotonicity.is_none() || problem.lipschitz.is_none() {
                return Err(Error::Invalid(format!(
                    "linear_41b needs a strongly monotone problem with known constants; `{}` has none",
                    problem.name
                )));
            }
            harness::linear_rate_variant(problem)
        }
    })
}

fn warnings(cfg: &visolve_core::SolverConfig) -> Result<()> {
    for v in harness::check_config(cfg)? {
        if v.severity == Severity::Warning {
            eprintln!("visolve: {v}");
        }
    }
    Ok(())
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn finish(preset: &ExperimentPreset, common: &Common) -> Result<(harness::PresetRun, String)> {
    warnings(&preset.variant.effective_config(&preset.config.solver))?;
    let run = harness::run_preset(preset)?;
    create_out(&common.out)?;
    let path = harness::write_trace_file(&common.out, &preset.name, &run.result, common.timings)?;
    let report = format!("{}trace              {}\n", run.summary, path.display());
    Ok((run, report))
}

fn solve(
    name: &str,
    problem: ProblemInstance,
    x0: Vec<f64>,
    deblur: Option<DeblurProblem>,
    variant: VariantName,
    common: &Common,
    base: RunConfig,
) -> Result<String> {
    let relative = deblur.is_some();
    let config = run_config(common, base, relative)?;
    let variant = variant_for(variant, &problem)?;
    let preset = ExperimentPreset { name: name.to_string(), problem, config, variant, x0, deblur };
    Ok(finish(&preset, common)?.1)
}

fn deblur(a: &DeblurArgs) -> Result<String> {
    let (kernel, tol) = match a.blur {
        Blur::Gaussian => (build_gaussian_kernel(a.size, a.sigma)?, 1e-3),
        Blur::Motion => (build_motion_kernel(a.length, a.angle)?, 1e-2),
    };
    let (rows, cols, pixels) = match &a.image {
        Some(p) => {
            let img = read_pgm(p)?;
            (img.rows, img.cols, img.data)
        }
        None => (harness::DEBLUR_SIZE, harness::DEBLUR_SIZE, harness::synthetic_image(harness::DEBLUR_SIZE, harness::DEBLUR_SIZE)),
    };
    let problem = if a.as_observed {
        DeblurProblem::new(rows, cols, kernel, pixels)?
    } else {
        DeblurProblem::from_clean_image(rows, cols, kernel, &pixels)?
    };
    let tag = match a.blur {
        Blur::Gaussian => "gaussian",
        Blur::Motion => "motion",
    };
    let name = format!("deblur_{tag}");
    let mut preset = harness::deblur_preset(&name, problem, tol);
    preset.config = run_config(&a.common, preset.config.clone(), true)?;
    preset.variant = variant_for(a.variant, &preset.problem)?;
    let (run, mut report) = finish(&preset, &a.common)?;
    let observed = GrayImage { rows, cols, data: preset.x0.clone() };
    let restored = GrayImage { rows, cols, data: run.result.x };
    for (kind, img) in [("observed", &observed), ("restored", &restored)] {
        let path = a.common.out.join(format!("{kind}_{name}.pgm"));
        write_pgm(&path, img)?;
        report.push_str(&format!("{kind:<18} {}\n", path.display()));
    }
    Ok(report)
}

fn target_problem(t: Target) -> Result<(&'static str, ProblemInstance, Vec<f64>)> {
    let p = match t {
        Target::Network => ProblemInstance::network(NetworkProblem::six_node_example())?,
        Target::Nash => ProblemInstance::nash(NashProblem::five_firm_example()),
    };
    let x0 = vec![1.0; p.dim()];
    Ok((if t == Target::Network { "network" } else { "nash" }, p, x0))
}

fn sweep(a: &SweepArgs) -> Result<String> {
    let (name, problem, x0) = target_problem(a.target)?;
    let mut base = RunConfig::default();
    base.stop.max_iter = harness::SWEEP_MAX_ITER;
    let cfg = run_config(&a.common, base, false)?;
    let grid = if a.mu.is_empty() && a.beta.is_empty() && a.sigma_vals.is_empty() {
        SweepGrid::from_table(match a.target {
            Target::Network => &harness::NETWORK_SENSITIVITY,
            Target::Nash => &harness::NASH_SENSITIVITY,
        })
    } else {
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        SweepGrid::cartesian(&or(&a.mu, cfg.solver.mu), &or(&a.beta, cfg.solver.beta), &or(&a.sigma_vals, cfg.solver.sigma))
    };
    let variant = variant_for(a.variant, &problem)?;
    let results = harness::sweep(&problem, &grid, &cfg, variant, &x0)?;
    create_out(&a.common.out)?;
    let path = harness::write_sweep_file(&a.common.out, name, &results)?;
    Ok(format!("{}csv {}\n", harness::sweep_table(&results), path.display()))
}

fn compare(a: &CompareArgs) -> Result<String> {
    let (name, problem, x0) = target_problem(a.target)?;
    let cfg = run_config(&a.common, RunConfig::default(), false)?;
    let variants = a.variants.iter().map(|&v| variant_for(v, &problem)).collect::<Result<Vec<_>>>()?;
    for v in &variants {
        warnings(&v.effective_config(&cfg.solver))?;
    }
    let rows = harness::compare(&problem, &variants, &cfg, &x0)?;
    create_out(&a.common.out)?;
    let path = harness::write_compare_file(&a.common.out, name, &rows, a.common.timings)?;
    Ok(format!("{}csv {}\n", harness::compare_table(&rows), path.display()))
}

fn preset(a: &PresetArgs) -> Result<String> {
    let mut p = harness::build_preset(a.name)?;
    let relative = p.deblur.is_some();
    p.config = run_config(&a.common, p.config.clone(), relative)?;
    if let Some(v) = a.variant {
        p.variant = variant_for(v, &p.problem)?;
    }
    Ok(finish(&p, &a.common)?.1)
}
