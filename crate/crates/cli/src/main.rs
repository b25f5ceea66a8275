//! `dmp`: solve, calibrate, and sweep the search-and-matching unemployment
//! model, and build the empirical tightness and bound series from CSV
//! exports.

// Domain checks are written as `!(x > 0.0)` so that NaN falls out of the
// domain along with everything else.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};

use config::{load_economy, CliError, Economy};
use dmp_core::calibration::{calibrate_efficiency, CalibrationTarget};
use dmp_core::elasticity::tightness_elasticity;
use dmp_core::empirics::{
    beveridge_points, load_fred_series, tightness_series, write_beveridge_csv, write_bounds_csv,
};
use dmp_core::equilibrium::solve_equilibrium;
use dmp_core::experiment::{
    emit_csv, evaluate_row, linear_grid, monthly_rate, run_sweep, write_csv, SweepSpec,
    DAYS_PER_MONTH,
};
use dmp_core::matching::{MatchingTechnology, Shape, Technology};

#[derive(Parser)]
#[command(
    name = "dmp",
    version,
    about = "Search-and-matching unemployment model toolkit",
    after_help = "Exit codes: 0 success, 2 input or schema error, 3 mathematical infeasibility."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one economy's steady state and report its elasticities.
    Solve {
        /// Economy configuration (JSON).
        config: PathBuf,
        /// Relative residual tolerance for the tightness solver.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Calibrate matching efficiency to the configured unemployment target.
    Calibrate {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Report the elasticity decomposition at the solved equilibrium.
    Elasticity {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Sweep productivity around each economy's baseline and emit CSV rows.
    Sweep {
        /// One or more economy configurations; each is swept independently.
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Lower end of an explicit productivity grid (with --y-max).
        #[arg(long)]
        y_min: Option<f64>,
        /// Upper end of an explicit productivity grid (with --y-min).
        #[arg(long)]
        y_max: Option<f64>,
        /// Grid points per sweep.
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Half-width of the default grid centered on each base y.
        #[arg(long, default_value_t = 0.005)]
        span: f64,
        /// Sweep each economy under both technology families.
        #[arg(long)]
        both_families: bool,
        /// Cobb-Douglas shape used by --both-families when the config is nonlinear.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Nonlinear shape used by --both-families when the config is Cobb-Douglas.
        #[arg(long, default_value_t = 1.27)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper-bound series for the first elasticity factor from unemployment
    /// and job-openings CSV exports.
    Bounds {
        /// Unemployment level export (thousands of persons).
        unemployment: PathBuf,
        /// Job openings export (thousands of persons).
        vacancies: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.27)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matched unemployment/vacancy scatter data with its correlation.
    Beveridge {
        unemployment: PathBuf,
        vacancies: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a per-day probability to a per-month probability.
    ConvertRate {
        #[arg(long)]
        daily: f64,
        #[arg(long, default_value_t = 30)]
        days: u32,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e.message());
        process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            config,
            tol,
            format,
        } => cmd_solve(&config, tol, format),
        Command::Calibrate {
            config,
            tol,
            format,
        } => cmd_calibrate(&config, tol, format),
        Command::Elasticity {
            config,
            tol,
            format,
        } => cmd_elasticity(&config, tol, format),
        Command::Sweep {
            configs,
            y_min,
            y_max,
            points,
            span,
            both_families,
            alpha,
            gamma,
            tol,
            out,
        } => cmd_sweep(
            &configs,
            y_min,
            y_max,
            points,
            span,
            both_families,
            alpha,
            gamma,
            tol,
            out.as_deref(),
        ),
        Command::Bounds {
            unemployment,
            vacancies,
            alpha,
            gamma,
            out,
        } => cmd_bounds(&unemployment, &vacancies, alpha, gamma, out.as_deref()),
        Command::Beveridge {
            unemployment,
            vacancies,
            out,
        } => cmd_beveridge(&unemployment, &vacancies, out.as_deref()),
        Command::ConvertRate { daily, days } => {
            let monthly = monthly_rate(daily, days)?;
            println!("{monthly}");
            Ok(())
        }
    }
}

/// Resolve the technology: explicit efficiency wins, otherwise calibrate to
/// the configured unemployment target.
fn resolve_technology(economy: &Economy) -> Result<(Technology, bool), CliError> {
    if let Some(efficiency) = economy.efficiency {
        return Ok((economy.shape.technology(efficiency)?, false));
    }
    let target_u = economy.target_u.ok_or_else(|| {
        CliError::Input(
            "config needs either technology.efficiency or target_u (to calibrate)".into(),
        )
    })?;
    let target = CalibrationTarget::new(economy.params, economy.shape, target_u)?;
    Ok((calibrate_efficiency(&target)?, true))
}

fn shape_parameter(shape: Shape) -> (&'static str, f64) {
    match shape {
        Shape::CobbDouglas { alpha } => ("alpha", alpha),
        Shape::Nonlinear { gamma } => ("gamma", gamma),
    }
}

fn params_json(economy: &Economy) -> serde_json::Value {
    let p = &economy.params;
    serde_json::json!({
        "y": p.y(), "z": p.z(), "c": p.c(), "phi": p.phi(), "s": p.s(),
        "r": p.r(), "beta": p.beta(),
    })
}

fn technology_json(tech: &Technology, calibrated: bool) -> serde_json::Value {
    let (name, value) = shape_parameter(tech.shape());
    serde_json::json!({
        "family": tech.family_name(),
        name: value,
        "efficiency": tech.efficiency(),
        "calibrated": calibrated,
    })
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
}

fn cmd_solve(path: &std::path::Path, tol: f64, format: Format) -> Result<(), CliError> {
    let economy = load_economy(path)?;
    let (tech, calibrated) = resolve_technology(&economy)?;
    let eq = solve_equilibrium(&economy.params, &tech, tol)?;
    let report = tightness_elasticity(&economy.params, &tech, eq.theta)?;

    match format {
        Format::Csv => {
            let row = evaluate_row(&economy.label, &economy.params, &tech, tol)?;
            write_csv(&[row], io::stdout().lock())?;
        }
        Format::Json => {
            let value = serde_json::json!({
                "economy": economy.label,
                "params": params_json(&economy),
                "technology": technology_json(&tech, calibrated),
                "equilibrium": eq,
                "elasticity": report,
            });
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&value).unwrap()
            ))?;
        }
        Format::Text => {
            let (shape_name, shape_value) = shape_parameter(tech.shape());
            let mut out = String::new();
            out.push_str(&format!("economy      = {}\n", economy.label));
            out.push_str(&format!(
                "technology   = {} ({shape_name} = {shape_value})\n",
                tech.family_name()
            ));
            out.push_str(&format!(
                "efficiency   = {}{}\n",
                tech.efficiency(),
                if calibrated { "  (calibrated)" } else { "" }
            ));
            out.push_str(&format!("y            = {}\n", economy.params.y()));
            out.push_str(&format!("theta*  = {:.7}\n", eq.theta));
            out.push_str(&format!("u*      = {:.7}\n", eq.unemployment));
            out.push_str(&format!("w*      = {:.7}\n", eq.wage));
            out.push_str(&format!("q*      = {:.7}  (daily fill)\n", eq.fill_prob));
            out.push_str(&format!("f*      = {:.7}  (daily find)\n", eq.find_prob));
            out.push_str(&format!(
                "q_month = {:.7}\n",
                monthly_rate(eq.fill_prob, DAYS_PER_MONTH)?
            ));
            out.push_str(&format!(
                "f_month = {:.7}\n",
                monthly_rate(eq.find_prob, DAYS_PER_MONTH)?
            ));
            out.push_str(&format!("Upsilon      = {:.7}\n", report.upsilon));
            out.push_str(&format!("eta_theta_y  = {:.7}\n", report.eta_theta_y));
            out.push_str(&format!("eta_w_y      = {:.7}\n", report.eta_w_y));
            out.push_str(&format!("eta_M_u      = {:.7}\n", report.eta_m_u));
            print_stdout(&out)?;
        }
    }
    Ok(())
}

fn cmd_calibrate(path: &std::path::Path, tol: f64, format: Format) -> Result<(), CliError> {
    let economy = load_economy(path)?;
    let target_u = economy
        .target_u
        .ok_or_else(|| CliError::Input("calibrate requires target_u in the config".into()))?;
    let target = CalibrationTarget::new(economy.params, economy.shape, target_u)?;
    let tech = calibrate_efficiency(&target)?;
    let eq = solve_equilibrium(&economy.params, &tech, tol)?;

    match format {
        Format::Json => {
            let value = serde_json::json!({
                "economy": economy.label,
                "technology": technology_json(&tech, true),
                "target_u": target_u,
                "achieved_u": eq.unemployment,
            });
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&value).unwrap()
            ))?;
        }
        _ => {
            let (shape_name, shape_value) = shape_parameter(tech.shape());
            print_stdout(&format!(
                "economy    = {}\ntechnology = {} ({shape_name} = {shape_value})\n\
                 efficiency = {}\ntarget u*  = {target_u}\nsolved u*  = {:.10}\n",
                economy.label,
                tech.family_name(),
                tech.efficiency(),
                eq.unemployment
            ))?;
        }
    }
    Ok(())
}

fn cmd_elasticity(path: &std::path::Path, tol: f64, format: Format) -> Result<(), CliError> {
    let economy = load_economy(path)?;
    let (tech, calibrated) = resolve_technology(&economy)?;
    let eq = solve_equilibrium(&economy.params, &tech, tol)?;
    let report = tightness_elasticity(&economy.params, &tech, eq.theta)?;

    match format {
        Format::Json => {
            let value = serde_json::json!({
                "economy": economy.label,
                "technology": technology_json(&tech, calibrated),
                "theta": eq.theta,
                "elasticity": report,
            });
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&value).unwrap()
            ))?;
        }
        _ => {
            print_stdout(&format!(
                "economy                  = {}\ntheta*                   = {:.10}\n\
                 eta_theta_y              = {:.10}\nupsilon                  = {:.10}\n\
                 inverse_surplus_fraction = {:.10}\nupsilon_upper_bound      = {:.10}\n\
                 eta_M_u                  = {:.10}\neta_w_y                  = {:.10}\n\
                 dtheta_dy                = {:.10}\ndw_dy                    = {:.10}\n",
                economy.label,
                eq.theta,
                report.eta_theta_y,
                report.upsilon,
                report.inverse_surplus_fraction,
                report.upsilon_upper_bound,
                report.eta_m_u,
                report.eta_w_y,
                report.dtheta_dy,
                report.dw_dy,
            ))?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    configs: &[PathBuf],
    y_min: Option<f64>,
    y_max: Option<f64>,
    points: usize,
    span: f64,
    both_families: bool,
    alpha: f64,
    gamma: f64,
    tol: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for path in configs {
        let economy = load_economy(path)?;
        let target_u = economy.target_u.ok_or_else(|| {
            CliError::Input(format!(
                "{}: sweep calibrates at the base productivity and requires target_u",
                path.display()
            ))
        })?;

        let base_y = economy.params.y();
        let grid = match (y_min, y_max) {
            (None, None) => SweepSpec::centered_grid(base_y, span, points),
            (Some(lo), Some(hi)) => {
                if !(lo < hi) {
                    return Err(CliError::Input(format!(
                        "--y-min {lo} must be below --y-max {hi}"
                    )));
                }
                let mut grid = linear_grid(lo, hi, points);
                // The sweep calibrates at the base productivity, so keep it
                // on the grid.
                if !grid.contains(&base_y) {
                    grid.push(base_y);
                    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
                }
                grid
            }
            _ => {
                return Err(CliError::Input(
                    "--y-min and --y-max must be given together".into(),
                ))
            }
        };

        let families: Vec<Shape> = if both_families {
            let alpha = match economy.shape {
                Shape::CobbDouglas { alpha } => alpha,
                _ => alpha,
            };
            let gamma = match economy.shape {
                Shape::Nonlinear { gamma } => gamma,
                _ => gamma,
            };
            vec![Shape::CobbDouglas { alpha }, Shape::Nonlinear { gamma }]
        } else {
            vec![economy.shape]
        };

        for shape in families {
            let spec = SweepSpec::new(
                economy.label.clone(),
                economy.params,
                shape,
                target_u,
                grid.clone(),
                tol,
            )?;
            rows.extend(run_sweep(&spec)?);
        }
    }

    // All rows solved; only now touch the output (all-or-nothing).
    match out {
        Some(path) => emit_csv(&rows, path)?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_bounds(
    unemployment: &std::path::Path,
    vacancies: &std::path::Path,
    alpha: f64,
    gamma: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let u = load_fred_series(unemployment)?;
    let v = load_fred_series(vacancies)?;
    let series = tightness_series(&u, &v)?;
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
            write_bounds_csv(&series, alpha, gamma, io::BufWriter::new(file))?;
        }
        None => write_bounds_csv(&series, alpha, gamma, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_beveridge(
    unemployment: &std::path::Path,
    vacancies: &std::path::Path,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let u = load_fred_series(unemployment)?;
    let v = load_fred_series(vacancies)?;
    let data = beveridge_points(&u, &v)?;
    match data.correlation {
        Some(correlation) => eprintln!("correlation(u, v) = {correlation:.6}"),
        None => eprintln!("correlation(u, v) undefined (fewer than two points)"),
    }
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
            write_beveridge_csv(&data, io::BufWriter::new(file))?;
        }
        None => write_beveridge_csv(&data, io::stdout().lock())?,
    }
    Ok(())
}
