mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pwshift_core::potential::KernelRegistry;
use pwshift_core::shifts::{phase_shift_table_with, PhaseShiftTable};
use pwshift_core::validation::{run_all, ValidationOptions};
use pwshift_core::xsection::{geometric_theta_grid, CrossSectionInput};
use pwshift_core::{ModeRegistry, QuadratureSpec};

use config::{OutputFormat, RunConfig};
use error::CliError;

/// Smallest angle on the output grid, rad.
const THETA_MIN: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "pwshift", version, about = "Perturbative partial-wave phase shifts and cross sections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the phase-shift table and write shifts.csv.
    Shifts {
        config: PathBuf,
        /// Override [outputs] directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compute a differential cross section and write xsection_<mode>.csv.
    Xsection {
        config: PathBuf,
        #[arg(long, default_value = "composite")]
        mode: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the built-in self-checks.
    Validate {
        /// Relative tolerance of the quadratures.
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Absolute tolerance on each reference table entry.
        #[arg(long)]
        table_tolerance: Option<f64>,
    },
    /// Parse a config and print it in canonical form.
    Config { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Shifts { config, out_dir } => {
            let cfg = RunConfig::load(&config)?;
            let table = compute_table(&cfg)?;
            print_table(&table);
            let dir = out_dir.unwrap_or_else(|| cfg.outputs.directory.clone());
            let path = output::write_file(&dir, "shifts.csv", &output::shifts_csv(&table))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Xsection { config, mode, out_dir } => {
            let cfg = RunConfig::load(&config)?;
            xsection(&cfg, &mode, out_dir)
        }
        Command::Validate {
            rel_tol,
            table_tolerance,
        } => validate(rel_tol, table_tolerance),
        Command::Config { config } => {
            print!("{}", RunConfig::load(&config)?.emit());
            Ok(())
        }
    }
}

fn compute_table(cfg: &RunConfig) -> Result<PhaseShiftTable, CliError> {
    let scenario = cfg.scenario()?;
    let registry = KernelRegistry::default();
    if let Some(name) = &cfg.run.kernel {
        if registry.basis_of(name).is_none() {
            return Err(CliError::Config {
                field: "run.kernel".into(),
                message: format!("unknown kernel '{name}' (available: {})", registry.names().join(", ")),
            });
        }
    }
    Ok(phase_shift_table_with(
        &scenario,
        cfg.l_range(),
        &cfg.quadrature(),
        &registry,
        cfg.run.kernel.as_deref(),
    )?)
}

fn print_table(table: &PhaseShiftTable) {
    let p = &table.params;
    println!(
        "mu = {:.3} MeV, p = {:.3} MeV, kappa = {:.4}, lambda = {:.4}, eta = {:.4}, eta_C = {:.5}",
        p.reduced_mass, p.p, p.kappa, p.lambda, p.eta, p.eta_coulomb
    );
    if !table.kernel.is_empty() {
        println!("basis {:?}, kernel {}", table.basis, table.kernel);
    }
    println!("{:>3} {:>12} {:>12} {:>12} {:>12} {:>12}", "l", "delta1", "delta2", "total", "sigma_l", "exact");
    for r in &table.records {
        let exact = r.exact.map_or_else(|| "-".to_string(), |e| format!("{e:.6}"));
        println!(
            "{:>3} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12}",
            r.l, r.delta1, r.delta2, r.total, r.sigma, exact
        );
    }
}

fn xsection(cfg: &RunConfig, mode_name: &str, out_dir: Option<PathBuf>) -> Result<(), CliError> {
    let modes = ModeRegistry::default();
    let mode = modes.get(mode_name).map_err(|e| CliError::Config {
        field: "--mode".into(),
        message: e.to_string(),
    })?;
    let table = compute_table(cfg)?;
    let wavepacket = cfg.wavepacket()?;
    let theta = geometric_theta_grid(cfg.run.theta_points, THETA_MIN)?;
    let input = CrossSectionInput {
        table: &table,
        wavepacket,
    };
    let mut curves = vec![(mode.name(), mode.evaluate(&input, &theta)?)];
    if mode.name() == "composite" {
        let reference = modes.get("rutherford")?;
        curves.push((reference.name(), reference.evaluate(&input, &theta)?));
    }
    let dir = out_dir.unwrap_or_else(|| cfg.outputs.directory.clone());
    let mut names = Vec::new();
    for (name, curve) in &curves {
        if curve.truncation_residual > 1e-6 {
            eprintln!(
                "warning: {name} partial-wave sum truncated at l = {} with residual {:.1e}",
                curve.l_max_used, curve.truncation_residual
            );
        }
        let file = format!("xsection_{name}.csv");
        let path = output::write_file(&dir, &file, &output::curve_csv(curve))?;
        println!("wrote {}", path.display());
        names.push(file);
    }
    if cfg.outputs.formats.contains(&OutputFormat::Gnuplot) {
        let script = output::gnuplot_script(&names, mode.name());
        let path = output::write_file(&dir, &format!("xsection_{}.gp", mode.name()), &script)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn validate(rel_tol: Option<f64>, table_tolerance: Option<f64>) -> Result<(), CliError> {
    let mut opts = ValidationOptions::default();
    if let Some(tol) = rel_tol {
        opts.quadrature = QuadratureSpec::with_rel_tol(tol);
        opts.quadrature.validate().map_err(|e| CliError::Config {
            field: "--rel-tol".into(),
            message: e.to_string(),
        })?;
    }
    if let Some(tol) = table_tolerance {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Config {
                field: "--table-tolerance".into(),
                message: format!("must be positive, got {tol}"),
            });
        }
        opts.table_tolerance = tol;
    }
    let outcomes = run_all(&opts);
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for o in &outcomes {
        println!("{:<4} {:<width$}  {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    match failed.first() {
        None => {
            println!("all {} checks passed", outcomes.len());
            Ok(())
        }
        Some(first) => Err(CliError::ValidationFailed {
            failed: failed.len(),
            first: format!("{}: {}", first.name, first.detail),
        }),
    }
}
