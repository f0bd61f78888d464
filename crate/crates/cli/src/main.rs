//! `ionic-lattice`: lattice energies and optimal charges from a JSON run config.

mod config;
mod presets;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ionic_lattice::energy::{
    default_alpha, energy_convergence_factor, energy_direct_to_tolerance, energy_epstein,
    energy_ewald, energy_spectral, mode_table, ConvergenceFactorOptions, ModeQuantity,
};
use ionic_lattice::optimize::{
    optimal_charges_with, theta_landscape, verify_born, OptimizeOptions, VerifyOptions,
    DEFAULT_ALPHAS,
};
use ionic_lattice::{Charges, Energy, Lattice, PotentialSpec, Route};
use serde::{Deserialize, Serialize};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Disagreement(String),
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Disagreement(_) => 4,
            CliError::Mismatch(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Disagreement(m) => write!(f, "routes disagree: {m}"),
            CliError::Mismatch(m) => write!(f, "verification mismatch: {m}"),
        }
    }
}

impl From<ionic_lattice::Error> for CliError {
    fn from(e: ionic_lattice::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ionic-lattice", version, about = "Energies and optimal charges of periodic lattice systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in configuration, used when --config is absent.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Directory for output files; without it the main result goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// CSV landscape of translated theta values over a fractional grid.
    Theta,
    /// Energy of a charge configuration by one or more routes.
    Energy,
    /// Optimal charges from the theta minimizers.
    Optimize,
    /// Optimal charges checked against the dense eigen-decomposition.
    Verify,
    /// List the built-in configurations.
    Presets,
}

/// Collected artifacts, written once at the end.
struct Outputs {
    dir: Option<PathBuf>,
    files: Vec<(PathBuf, String)>,
    stdout: Option<String>,
}

impl Outputs {
    fn new(dir: Option<PathBuf>) -> Self {
        Self { dir, files: Vec::new(), stdout: None }
    }

    /// The primary artifact: to `--out`/`explicit` if given, else stdout.
    fn main(&mut self, explicit: &Option<String>, default: &str, body: String) {
        match (explicit, &self.dir) {
            (None, None) => self.stdout = Some(body),
            _ => self.side(explicit, default, body),
        }
    }

    /// Secondary artifacts are written only when an output location is known.
    fn side(&mut self, explicit: &Option<String>, default: &str, body: String) {
        let name = match (explicit, &self.dir) {
            (Some(name), _) => name.as_str(),
            (None, Some(_)) => default,
            (None, None) => return,
        };
        let path = match &self.dir {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        };
        self.files.push((path, body));
    }

    fn flush(self) -> Result<(), CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Config(format!("{}: {e}", p.display()));
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        for (path, body) in &self.files {
            fs::write(path, body).map_err(|e| io(path, e))?;
        }
        if let Some(body) = self.stdout {
            std::io::stdout().write_all(body.as_bytes()).map_err(|e| io(Path::new("stdout"), e))?;
        }
        Ok(())
    }
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn csv_text(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let err = |e: csv::Error| CliError::Numeric(format!("CSV output: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numeric(e.to_string()))
}

fn landscape_csv(lattice: &Lattice, alphas: &[f64], grid: usize, tol: f64) -> Result<String, CliError> {
    let d = lattice.dim();
    let rows = theta_landscape(lattice, alphas, grid, tol)?;
    let mut header: Vec<String> = (1..=d).map(|i| format!("l{i}")).collect();
    header.extend(["alpha", "value", "branch", "tail"].map(String::from));
    let rows = rows
        .into_iter()
        .map(|r| {
            let mut row: Vec<String> = r.lambda.iter().map(|v| v.to_string()).collect();
            row.extend([r.alpha.to_string(), r.value.to_string(), r.branch.to_string(), r.tail.to_string()]);
            row
        })
        .collect();
    csv_text(header, rows)
}

fn charges_csv(lattice: &Lattice, phi: &Charges) -> Result<String, CliError> {
    let mut buf = Vec::new();
    phi.write_csv(lattice, &mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Numeric(e.to_string()))
}

fn theta_alphas(config: &RunConfig) -> Vec<f64> {
    if config.alphas.is_empty() {
        DEFAULT_ALPHAS.to_vec()
    } else {
        config.alphas.clone()
    }
}

fn cmd_theta(config: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let lattice = config.lattice()?;
    let body = landscape_csv(&lattice, &theta_alphas(config), config.grid, config.tol)?;
    out.main(&config.outputs.landscape, "landscape.csv", body);
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyOutput {
    pub dim: usize,
    #[serde(rename = "N")]
    pub period: usize,
    /// Value of the first route.
    pub value: f64,
    pub reports: Vec<Energy>,
    /// Largest pairwise difference between routes.
    pub max_disagreement: f64,
}

fn run_route(
    route: Route,
    lattice: &Lattice,
    config: &RunConfig,
    phi: &Charges,
) -> Result<Energy, CliError> {
    let potential = config.potential()?;
    let alpha = config.alpha.unwrap_or_else(default_alpha);
    let tol = config.tol;
    Ok(match route {
        Route::Direct => energy_direct_to_tolerance(lattice, &potential, phi, tol)?,
        Route::ConvergenceFactor => {
            let options = ConvergenceFactorOptions { tol, ..ConvergenceFactorOptions::default() };
            energy_convergence_factor(lattice, &potential, phi, &options)?
        }
        Route::Spectral => energy_spectral(lattice, &potential, phi, config.alpha, tol)?,
        Route::Ewald => energy_ewald(lattice, &potential, phi, alpha, tol)?,
        Route::Epstein => match config.potential {
            Some(PotentialSpec::Riesz { s }) => energy_epstein(lattice, s, phi, tol)?,
            _ => return Err(CliError::Config("the epstein route needs a Riesz potential".into())),
        },
    })
}

fn modes_csv(dim: usize, reports: &[Energy], fallback: impl FnOnce() -> Result<Energy, CliError>) -> Result<String, CliError> {
    let owned;
    let report = match reports.iter().find(|r| !r.modes.is_empty()) {
        Some(r) => r,
        None => {
            owned = fallback()?;
            &owned
        }
    };
    let quantity = match report.mode_quantity {
        Some(ModeQuantity::Summable) => "summable",
        Some(ModeQuantity::EwaldNet) => "ewald-net",
        Some(ModeQuantity::Epstein) => "epstein",
        None => "",
    };
    let mut header: Vec<String> = (1..=dim).map(|i| format!("k{i}")).collect();
    header.extend(["xi", "energy", "quantity"].map(String::from));
    let rows = report
        .modes
        .iter()
        .map(|m| {
            let mut row: Vec<String> = m.k.iter().map(|c| c.to_string()).collect();
            row.push(m.xi.to_string());
            row.push(m.energy.map(|e| e.to_string()).unwrap_or_default());
            row.push(quantity.into());
            row
        })
        .collect();
    csv_text(header, rows)
}

/// Largest pairwise difference, and the pairs that differ by more than their
/// combined error estimates plus `tol`.
fn compare_routes(reports: &[Energy], tol: f64) -> (f64, Vec<String>) {
    let mut worst = 0.0_f64;
    let mut complaints = Vec::new();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let diff = (a.value - b.value).abs();
            worst = worst.max(diff);
            let bound = a.error_estimate + b.error_estimate + tol;
            if !(diff <= bound) {
                complaints.push(format!(
                    "{} = {} vs {} = {} (|diff| {diff:e} > bound {bound:e})",
                    a.route, a.value, b.route, b.value
                ));
            }
        }
    }
    (worst, complaints)
}

fn cmd_energy(config: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let lattice = config.lattice()?;
    let phi = config.charges(lattice.dim())?;
    let routes = if config.routes.is_empty() { vec![Route::Ewald] } else { config.routes.clone() };
    let reports: Vec<Energy> = routes
        .iter()
        .map(|&r| run_route(r, &lattice, config, &phi))
        .collect::<Result<_, _>>()?;

    let (worst, complaints) = compare_routes(&reports, config.tol);
    let output = EnergyOutput {
        dim: lattice.dim(),
        period: phi.period(),
        value: reports[0].value,
        reports,
        max_disagreement: worst,
    };
    if config.mode_table || config.outputs.modes.is_some() {
        let body = modes_csv(lattice.dim(), &output.reports, || {
            let potential = config.potential()?;
            let alpha = config.alpha.unwrap_or_else(default_alpha);
            let table = mode_table(&lattice, &potential, phi.period(), alpha, config.tol)?;
            let xi = ionic_lattice::charges::spectral_density(&phi)?;
            let index = phi.index();
            let mut r = energy_ewald(&lattice, &potential, &phi, alpha, config.tol)?;
            r.mode_quantity = Some(ModeQuantity::EwaldNet);
            r.modes = table
                .into_iter()
                .enumerate()
                .map(|(k, e)| ionic_lattice::energy::ModeEnergy { k: index.coords(k), xi: xi.values()[k], energy: e })
                .collect();
            Ok(r)
        })?;
        out.side(&config.outputs.modes, "modes.csv", body);
    }
    out.main(&config.outputs.report, "energy.json", to_json(&output));
    if complaints.is_empty() {
        Ok(())
    } else {
        Err(CliError::Disagreement(complaints.join("; ")))
    }
}

fn optimize_options(config: &RunConfig) -> OptimizeOptions {
    OptimizeOptions { alphas: config.alphas.clone(), grid: config.grid.max(2), tol: config.tol, ..OptimizeOptions::default() }
}

fn cmd_optimize(config: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let lattice = config.lattice()?;
    let potential = config.potential()?;
    let options = optimize_options(config);
    let result = optimal_charges_with(&lattice, &potential, config.period()?, &options)?;
    let alphas = result.theta.alphas.clone();
    out.side(&config.outputs.landscape, "landscape.csv", landscape_csv(&lattice, &alphas, config.grid, config.tol)?);
    out.side(&config.outputs.charges, "charges.csv", charges_csv(&lattice, &result.config)?);
    out.main(&config.outputs.report, "optimize.json", to_json(&result));
    Ok(())
}

fn cmd_verify(config: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let lattice = config.lattice()?;
    let potential = config.potential()?;
    let options = VerifyOptions { optimize: optimize_options(config), samples: config.samples, seed: config.seed };
    let report = verify_born(&lattice, &potential, config.period()?, &options)?;
    out.side(&config.outputs.charges, "charges.csv", charges_csv(&lattice, &report.config)?);
    out.main(&config.outputs.report, "verify.json", to_json(&report));
    if report.matches {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "energy gap {:e}, membership residual {:e}, oracle degeneracy {}",
            report.energy_difference, report.membership_residual, report.brute_force_degeneracy
        )))
    }
}

fn list_presets() -> String {
    let width = presets::PRESETS.iter().map(|p| p.0.len()).max().unwrap_or(0);
    presets::PRESETS
        .iter()
        .map(|(name, about, _)| format!("{name:width$}  {about}\n"))
        .collect()
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => presets::preset(name)?,
        (None, None) => return Err(CliError::Config("pass --config <path> or --preset <name>".into())),
    };
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut out = Outputs::new(cli.out.clone());
    if let Command::Presets = cli.command {
        out.main(&None, "presets.txt", list_presets());
        return out.flush();
    }
    let config = resolve_config(cli)?;
    let result = match cli.command {
        Command::Theta => cmd_theta(&config, &mut out),
        Command::Energy => cmd_energy(&config, &mut out),
        Command::Optimize => cmd_optimize(&config, &mut out),
        Command::Verify => cmd_verify(&config, &mut out),
        Command::Presets => unreachable!(),
    };
    // Reports are still written when the check that follows them fails.
    match result {
        Err(e @ (CliError::Config(_) | CliError::Numeric(_))) => Err(e),
        other => {
            out.flush()?;
            other
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ionic-lattice: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(route: Route, value: f64, error_estimate: f64) -> Energy {
        Energy {
            value,
            route,
            alpha: None,
            radii: Vec::new(),
            error_estimate,
            mode_quantity: None,
            modes: Vec::new(),
            extrapolation: None,
            notes: Vec::new(),
        }
    }

    #[test]
    fn route_comparison() {
        let agree = [report(Route::Ewald, 1.0, 1e-9), report(Route::Direct, 1.0 + 1.5e-9, 1e-9)];
        let (worst, bad) = compare_routes(&agree, 1e-12);
        assert!(bad.is_empty());
        assert!((worst - 1.5e-9).abs() < 1e-15);
        let apart = [report(Route::Ewald, 1.0, 1e-12), report(Route::Spectral, 1.0 + 1e-6, 1e-12)];
        assert_eq!(compare_routes(&apart, 1e-10).1.len(), 1);
        let nan = [report(Route::Ewald, 1.0, 0.0), report(Route::Spectral, f64::NAN, 0.0)];
        assert_eq!(compare_routes(&nan, 1e-10).1.len(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).code(), 2);
        assert_eq!(CliError::Numeric(String::new()).code(), 3);
        assert_eq!(CliError::Disagreement(String::new()).code(), 4);
        assert_eq!(CliError::Mismatch(String::new()).code(), 5);
        let not_neutral: CliError = ionic_lattice::Error::NotNeutral(1.0).into();
        assert_eq!(not_neutral.code(), 2);
        let cap: CliError = ionic_lattice::Error::TooManyPoints { needed: 1e9, cap: 10 }.into();
        assert_eq!(cap.code(), 3);
    }
}
