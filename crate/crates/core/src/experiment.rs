//! Comparative-statics experiments: productivity sweeps around a calibrated
//! baseline, daily-to-monthly rate conversion, and CSV emission.
//!
//! A sweep calibrates matching efficiency once at the base productivity,
//! holds it fixed, and re-solves the steady state at every grid point. Rows
//! are ordered by productivity and carry the full set of outputs used by the
//! plots: tightness, unemployment, wage, daily and monthly probabilities,
//! and the elasticity decomposition.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::calibration::{calibrate_efficiency, CalibrationError, CalibrationTarget};
use crate::elasticity::tightness_elasticity;
use crate::equilibrium::{solve_equilibrium, EconomyParams, EquilibriumError};
use crate::matching::{Shape, Technology};

/// Days per month used for rate conversion.
pub const DAYS_PER_MONTH: u32 = 30;

/// Default number of grid points in a sweep.
pub const DEFAULT_GRID_POINTS: usize = 11;

/// Default half-width of the productivity grid around the base value.
pub const DEFAULT_GRID_HALF_SPAN: f64 = 0.005;

/// CSV header for sweep output; column order is part of the format.
pub const CSV_HEADER: &str = "economy,family,y,theta,u,w,q_daily,f_daily,q_monthly,f_monthly,\
                              upsilon,eta_theta_y,eta_w_y,eta_M_u";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{name} = {value} is outside the domain: must be {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("calibration failed for economy `{label}`: {source}")]
    Calibration {
        label: String,
        source: CalibrationError,
    },
    #[error("economy `{label}` failed at y = {y}: {source}")]
    Row {
        label: String,
        y: f64,
        source: EquilibriumError,
    },
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv record {record}: {message}")]
    Parse { record: u64, message: String },
    #[error("refusing to emit an empty table")]
    EmptyRows,
}

/// One sweep: a base economy, a technology family, the unemployment target
/// used to calibrate efficiency at the base productivity, and the grid of
/// productivity values to re-solve at.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub base: EconomyParams,
    pub shape: Shape,
    pub target_u: f64,
    pub y_grid: Vec<f64>,
    pub tolerance: f64,
}

impl SweepSpec {
    /// Validates that the grid is nonempty, every productivity exceeds the
    /// nonwork value, and the base productivity is on the grid.
    pub fn new(
        label: impl Into<String>,
        base: EconomyParams,
        shape: Shape,
        target_u: f64,
        y_grid: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self, ExperimentError> {
        if y_grid.is_empty() {
            return Err(ExperimentError::InvalidGrid("grid is empty".into()));
        }
        if let Some(&bad) = y_grid.iter().find(|&&y| !(y > base.z()) || !y.is_finite()) {
            return Err(ExperimentError::InvalidGrid(format!(
                "grid point y = {bad} does not exceed z = {}",
                base.z()
            )));
        }
        if !y_grid.contains(&base.y()) {
            return Err(ExperimentError::InvalidGrid(format!(
                "grid must contain the base productivity y = {}",
                base.y()
            )));
        }
        Ok(Self {
            label: label.into(),
            base,
            shape,
            target_u,
            y_grid,
            tolerance,
        })
    }

    /// Symmetric grid of `points` values spanning `base_y +- half_span`,
    /// containing `base_y` exactly when `points` is odd.
    pub fn centered_grid(base_y: f64, half_span: f64, points: usize) -> Vec<f64> {
        if points <= 1 {
            return vec![base_y];
        }
        if points % 2 == 1 {
            let half = (points - 1) / 2;
            let step = half_span / half as f64;
            return (0..points)
                .map(|i| {
                    let k = i as isize - half as isize;
                    if k == 0 {
                        base_y
                    } else {
                        base_y + k as f64 * step
                    }
                })
                .collect();
        }
        let mut grid = linear_grid(base_y - half_span, base_y + half_span, points);
        if !grid.contains(&base_y) {
            grid.push(base_y);
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        grid
    }
}

/// `points` evenly spaced values from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                min + i as f64 * step
            }
        })
        .collect()
}

/// One solved grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub economy: String,
    pub family: String,
    pub y: f64,
    pub theta: f64,
    pub u: f64,
    pub w: f64,
    pub q_daily: f64,
    pub f_daily: f64,
    pub q_monthly: f64,
    pub f_monthly: f64,
    pub upsilon: f64,
    pub eta_theta_y: f64,
    pub eta_w_y: f64,
    pub eta_m_u: f64,
}

/// Probability of at least one success over `days` periods:
/// `1 - (1 - daily)^days`.
pub fn monthly_rate(daily: f64, days: u32) -> Result<f64, ExperimentError> {
    if !(0.0..=1.0).contains(&daily) || !daily.is_finite() {
        return Err(ExperimentError::Domain {
            name: "daily",
            value: daily,
            requirement: "inside [0, 1]",
        });
    }
    if days < 1 {
        return Err(ExperimentError::Domain {
            name: "days",
            value: days as f64,
            requirement: "at least 1",
        });
    }
    Ok(1.0 - (1.0 - daily).powi(days as i32))
}

/// Solve one economy under one technology and assemble a sweep row.
pub fn evaluate_row(
    label: &str,
    params: &EconomyParams,
    tech: &Technology,
    tolerance: f64,
) -> Result<SweepRow, ExperimentError> {
    let row_err = |source| ExperimentError::Row {
        label: label.to_string(),
        y: params.y(),
        source,
    };
    let eq = solve_equilibrium(params, tech, tolerance).map_err(row_err)?;
    let report = tightness_elasticity(params, tech, eq.theta).map_err(row_err)?;
    Ok(SweepRow {
        economy: label.to_string(),
        family: tech.family_name().to_string(),
        y: params.y(),
        theta: eq.theta,
        u: eq.unemployment,
        w: eq.wage,
        q_daily: eq.fill_prob,
        f_daily: eq.find_prob,
        q_monthly: monthly_rate(eq.fill_prob, DAYS_PER_MONTH)?,
        f_monthly: monthly_rate(eq.find_prob, DAYS_PER_MONTH)?,
        upsilon: report.upsilon,
        eta_theta_y: report.eta_theta_y,
        eta_w_y: report.eta_w_y,
        eta_m_u: report.eta_m_u,
    })
}

/// Run one sweep: calibrate efficiency at the base productivity, hold it
/// fixed, and solve each grid point independently, ordered by productivity.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ExperimentError> {
    let target = CalibrationTarget::new(spec.base, spec.shape, spec.target_u).map_err(|e| {
        ExperimentError::Calibration {
            label: spec.label.clone(),
            source: e,
        }
    })?;
    let tech = calibrate_efficiency(&target).map_err(|e| ExperimentError::Calibration {
        label: spec.label.clone(),
        source: e,
    })?;

    let mut grid = spec.y_grid.clone();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut rows = Vec::with_capacity(grid.len());
    for y in grid {
        let params = spec
            .base
            .with_productivity(y)
            .map_err(|source| ExperimentError::Row {
                label: spec.label.clone(),
                y,
                source,
            })?;
        rows.push(evaluate_row(&spec.label, &params, &tech, spec.tolerance)?);
    }
    Ok(rows)
}

/// 17 significant digits: enough to reproduce any f64 exactly on re-read.
pub(crate) fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write rows in the sweep CSV schema (UTF-8, LF, `.` decimal separator).
pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<(), ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::EmptyRows);
    }
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        out.write_record([
            row.economy.as_str(),
            row.family.as_str(),
            &format_float(row.y),
            &format_float(row.theta),
            &format_float(row.u),
            &format_float(row.w),
            &format_float(row.q_daily),
            &format_float(row.f_daily),
            &format_float(row.q_monthly),
            &format_float(row.f_monthly),
            &format_float(row.upsilon),
            &format_float(row.eta_theta_y),
            &format_float(row.eta_w_y),
            &format_float(row.eta_m_u),
        ])?;
    }
    out.flush().map_err(|source| ExperimentError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}

/// Write rows to a file, reporting the path on failure.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), ExperimentError> {
    let file = File::create(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, io::BufWriter::new(file))
}

/// Read rows previously emitted by [`write_csv`]; used to round-trip output
/// in tests and to post-process saved sweeps.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<SweepRow>, ExperimentError> {
    let mut input = csv::Reader::from_reader(reader);
    {
        let headers = input.headers()?;
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(ExperimentError::Parse {
                record: 0,
                message: format!("unexpected header {headers:?}, expected {CSV_HEADER}"),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, record) in input.records().enumerate() {
        let record = record?;
        let number = |idx: usize| -> Result<f64, ExperimentError> {
            record
                .get(idx)
                .ok_or_else(|| ExperimentError::Parse {
                    record: i as u64 + 1,
                    message: format!("missing field {idx}"),
                })?
                .parse()
                .map_err(|e| ExperimentError::Parse {
                    record: i as u64 + 1,
                    message: format!("field {idx}: {e}"),
                })
        };
        rows.push(SweepRow {
            economy: record.get(0).unwrap_or_default().to_string(),
            family: record.get(1).unwrap_or_default().to_string(),
            y: number(2)?,
            theta: number(3)?,
            u: number(4)?,
            w: number(5)?,
            q_daily: number(6)?,
            f_daily: number(7)?,
            q_monthly: number(8)?,
            f_monthly: number(9)?,
            upsilon: number(10)?,
            eta_theta_y: number(11)?,
            eta_w_y: number(12)?,
            eta_m_u: number(13)?,
        });
    }
    Ok(rows)
}
