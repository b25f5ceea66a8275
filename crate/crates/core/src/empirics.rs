//! Ingestion of public labor-market series and the empirical tightness,
//! bound, and Beveridge-curve data built from them.
//!
//! Input files are monthly CSV exports with a `DATE` or `observation_date`
//! column, one value column in thousands of persons, and `.` marking missing
//! observations. Tightness is the ratio of job openings to unemployed
//! persons month by month, restricted by default to December 2000 onward,
//! when the openings survey begins.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use crate::experiment::format_float;
use crate::matching::{MatchingError, MatchingTechnology, Shape};

/// Date column names accepted in input files.
pub const FRED_DATE_COLUMNS: [&str; 2] = ["DATE", "observation_date"];

/// Marker for a missing observation.
pub const MISSING_MARKER: &str = ".";

/// First month kept by default: openings data start December 2000.
pub fn default_date_floor() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 12, 1).expect("valid date")
}

#[derive(Debug, Error)]
pub enum EmpiricsError {
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column: expected {expected}, file has {found:?}")]
    MissingColumn {
        expected: String,
        found: Vec<String>,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error(
        "series do not overlap: {overlap} common months, {after_floor} at or after the date floor"
    )]
    Join { overlap: usize, after_floor: usize },
    #[error("{name} = {value} is outside the domain: must be {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// A monthly series of positive values in thousands of persons, sorted by
/// month, with the number of missing markers recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct LaborSeries {
    pub series_id: String,
    /// Strictly increasing months (day normalized to 1) and values.
    pub observations: Vec<(NaiveDate, f64)>,
    pub missing_count: usize,
}

impl LaborSeries {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

fn parse_month(text: &str) -> Option<NaiveDate> {
    let date = NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .ok()
        .or_else(|| NaiveDate::parse_from_str(&format!("{text}-01"), "%Y-%m-%d").ok())?;
    NaiveDate::from_ymd_opt(date.year(), date.month(), 1)
}

/// Parse a series from a reader. `date_columns` lists the accepted date
/// column names; `value_column` names the value column. Rows whose value is
/// the missing marker are skipped and counted; output is sorted by month.
pub fn read_series<R: Read>(
    reader: R,
    date_columns: &[&str],
    value_column: &str,
) -> Result<LaborSeries, EmpiricsError> {
    let mut input = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
    let date_idx = date_columns
        .iter()
        .find_map(|name| headers.iter().position(|h| h == name))
        .ok_or_else(|| EmpiricsError::MissingColumn {
            expected: format!("a date column named one of {date_columns:?}"),
            found: headers.clone(),
        })?;
    let value_idx = headers
        .iter()
        .position(|h| h == value_column)
        .ok_or_else(|| EmpiricsError::MissingColumn {
            expected: format!("a value column named `{value_column}`"),
            found: headers.clone(),
        })?;

    let mut observations = Vec::new();
    let mut missing_count = 0usize;
    for (i, record) in input.records().enumerate() {
        let line = i as u64 + 2; // header is line 1
        let record = record?;
        let date_text = record.get(date_idx).unwrap_or("");
        let value_text = record.get(value_idx).unwrap_or("");

        if value_text == MISSING_MARKER {
            missing_count += 1;
            continue;
        }
        let month = parse_month(date_text).ok_or_else(|| EmpiricsError::Row {
            line,
            message: format!("cannot parse date `{date_text}`"),
        })?;
        let value: f64 = value_text.parse().map_err(|e| EmpiricsError::Row {
            line,
            message: format!("cannot parse value `{value_text}`: {e}"),
        })?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(EmpiricsError::Row {
                line,
                message: format!("value {value} must be finite and positive"),
            });
        }
        observations.push((month, value));
    }

    observations.sort_by_key(|&(month, _)| month);
    if let Some(pair) = observations.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(EmpiricsError::Row {
            line: 0,
            message: format!(
                "duplicate month {} in `{value_column}`",
                pair[0].0.format("%Y-%m")
            ),
        });
    }

    Ok(LaborSeries {
        series_id: value_column.to_string(),
        observations,
        missing_count,
    })
}

/// Load a series from a file with explicit column names.
pub fn load_series(
    path: &Path,
    date_columns: &[&str],
    value_column: &str,
) -> Result<LaborSeries, EmpiricsError> {
    let file = File::open(path).map_err(|source| EmpiricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_series(io::BufReader::new(file), date_columns, value_column)
}

/// Load a two-column export, detecting the date column among the standard
/// names and taking the single remaining column as the value.
pub fn load_fred_series(path: &Path) -> Result<LaborSeries, EmpiricsError> {
    let file = File::open(path).map_err(|source| EmpiricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut probe = csv::Reader::from_reader(io::BufReader::new(file));
    let headers: Vec<String> = probe.headers()?.iter().map(str::to_string).collect();
    let value_column = headers
        .iter()
        .find(|h| !FRED_DATE_COLUMNS.contains(&h.as_str()))
        .ok_or_else(|| EmpiricsError::MissingColumn {
            expected: "one value column besides the date column".to_string(),
            found: headers.clone(),
        })?
        .clone();
    load_series(path, &FRED_DATE_COLUMNS, &value_column)
}

/// Monthly tightness observations `theta_t = v_t / u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessSeries {
    pub observations: Vec<(NaiveDate, f64)>,
    /// Joined months discarded for falling before the date floor.
    pub dropped_before_floor: usize,
}

/// Inner-join the two series on month and form tightness, keeping months at
/// or after `floor`.
pub fn tightness_series_with_floor(
    unemployment: &LaborSeries,
    vacancies: &LaborSeries,
    floor: NaiveDate,
) -> Result<TightnessSeries, EmpiricsError> {
    let joined = join_months(unemployment, vacancies);
    let overlap = joined.len();
    let mut observations = Vec::with_capacity(overlap);
    let mut dropped_before_floor = 0usize;
    for (month, u, v) in joined {
        if month < floor {
            dropped_before_floor += 1;
        } else {
            observations.push((month, v / u));
        }
    }
    if observations.is_empty() {
        return Err(EmpiricsError::Join {
            overlap,
            after_floor: 0,
        });
    }
    Ok(TightnessSeries {
        observations,
        dropped_before_floor,
    })
}

/// [`tightness_series_with_floor`] at the default December 2000 floor.
pub fn tightness_series(
    unemployment: &LaborSeries,
    vacancies: &LaborSeries,
) -> Result<TightnessSeries, EmpiricsError> {
    tightness_series_with_floor(unemployment, vacancies, default_date_floor())
}

fn join_months(unemployment: &LaborSeries, vacancies: &LaborSeries) -> Vec<(NaiveDate, f64, f64)> {
    // Both sides are sorted; a merge walk keeps the output sorted.
    let mut joined = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let u = &unemployment.observations;
    let v = &vacancies.observations;
    while i < u.len() && j < v.len() {
        match u[i].0.cmp(&v[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                joined.push((u[i].0, u[i].1, v[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    joined
}

/// One tightness observation with its bound `1/eta(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub month: NaiveDate,
    pub theta: f64,
    pub bound: f64,
}

/// Upper-bound series `1/eta(theta_t)` for one technology shape: the
/// constant `1/alpha` for Cobb-Douglas, `(1 + theta^gamma)/theta^gamma` for
/// the nonlinear family. Always exceeds one.
pub fn bound_series(
    series: &TightnessSeries,
    shape: &Shape,
) -> Result<Vec<BoundPoint>, EmpiricsError> {
    let unit = shape.technology(1.0)?;
    series
        .observations
        .iter()
        .map(|&(month, theta)| {
            if !(theta > 0.0) || !theta.is_finite() {
                return Err(EmpiricsError::Domain {
                    name: "theta",
                    value: theta,
                    requirement: "finite and positive",
                });
            }
            Ok(BoundPoint {
                month,
                theta,
                bound: 1.0 / unit.match_elasticity(theta),
            })
        })
        .collect()
}

/// Matched unemployment/vacancy observations and their sample correlation
/// (absent when fewer than two points or when a series is constant).
#[derive(Debug, Clone, PartialEq)]
pub struct BeveridgeData {
    /// `(month, unemployment, vacancies)`, both in thousands.
    pub points: Vec<(NaiveDate, f64, f64)>,
    pub correlation: Option<f64>,
}

/// Join the series for scatter output over the same months as
/// [`tightness_series`].
pub fn beveridge_points(
    unemployment: &LaborSeries,
    vacancies: &LaborSeries,
) -> Result<BeveridgeData, EmpiricsError> {
    let joined = join_months(unemployment, vacancies);
    let overlap = joined.len();
    let floor = default_date_floor();
    let points: Vec<(NaiveDate, f64, f64)> = joined
        .into_iter()
        .filter(|&(month, _, _)| month >= floor)
        .collect();
    if points.is_empty() {
        return Err(EmpiricsError::Join {
            overlap,
            after_floor: 0,
        });
    }
    let correlation = pearson(
        points.iter().map(|p| p.1),
        points.iter().map(|p| p.2),
        points.len(),
    );
    Ok(BeveridgeData {
        points,
        correlation,
    })
}

fn pearson(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>, n: usize) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let pairs: Vec<(f64, f64)> = xs.zip(ys).collect();
    let nf = n as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in pairs {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x).powi(2);
        var_y += (y - mean_y).powi(2);
    }
    if var_x <= 0.0 || var_y <= 0.0 {
        return None;
    }
    Some(cov / (var_x * var_y).sqrt())
}

/// Write `date,theta,bound_cd,bound_nl` rows for the two standard shapes.
pub fn write_bounds_csv<W: Write>(
    series: &TightnessSeries,
    alpha: f64,
    gamma: f64,
    writer: W,
) -> Result<(), EmpiricsError> {
    let cd = bound_series(series, &Shape::CobbDouglas { alpha })?;
    let nl = bound_series(series, &Shape::Nonlinear { gamma })?;
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["date", "theta", "bound_cd", "bound_nl"])?;
    for (c, n) in cd.iter().zip(&nl) {
        out.write_record([
            c.month.format("%Y-%m").to_string(),
            format_float(c.theta),
            format_float(c.bound),
            format_float(n.bound),
        ])?;
    }
    out.flush().map_err(|source| EmpiricsError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}

/// Write `date,u_thousands,v_thousands` scatter rows.
pub fn write_beveridge_csv<W: Write>(data: &BeveridgeData, writer: W) -> Result<(), EmpiricsError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["date", "u_thousands", "v_thousands"])?;
    for &(month, u, v) in &data.points {
        out.write_record([
            month.format("%Y-%m").to_string(),
            format_float(u),
            format_float(v),
        ])?;
    }
    out.flush().map_err(|source| EmpiricsError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}
