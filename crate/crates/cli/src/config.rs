//! JSON economy configuration: schema, validation, and resolution into core
//! types.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use dmp_core::calibration::CalibrationError;
use dmp_core::equilibrium::EquilibriumError;
use dmp_core::experiment::ExperimentError;
use dmp_core::matching::{MatchingError, Shape};
use dmp_core::EconomyParams;

/// Errors surfaced to the shell. Input and schema problems exit with 2,
/// mathematical infeasibility with 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Math(m) => m,
        }
    }
}

impl From<MatchingError> for CliError {
    fn from(e: MatchingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::InvalidParameter { .. } | EquilibriumError::Domain { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        match &e {
            CalibrationError::Domain { .. } | CalibrationError::Matching(_) => {
                CliError::Input(e.to_string())
            }
            CalibrationError::Equilibrium(
                EquilibriumError::InvalidParameter { .. } | EquilibriumError::Domain { .. },
            ) => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match &e {
            ExperimentError::Calibration { source, .. } => match CliError::from(*source) {
                CliError::Input(_) => CliError::Input(e.to_string()),
                CliError::Math(_) => CliError::Math(e.to_string()),
            },
            ExperimentError::Row { source, .. } => match CliError::from(*source) {
                CliError::Input(_) => CliError::Input(e.to_string()),
                CliError::Math(_) => CliError::Math(e.to_string()),
            },
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<dmp_core::empirics::EmpiricsError> for CliError {
    fn from(e: dmp_core::empirics::EmpiricsError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomyConfig {
    label: Option<String>,
    y: f64,
    z: f64,
    c: f64,
    phi: f64,
    s: f64,
    r: Option<f64>,
    beta: Option<f64>,
    annual_interest_rate: Option<f64>,
    technology: TechnologyConfig,
    target_u: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechnologyConfig {
    family: Family,
    alpha: Option<f64>,
    gamma: Option<f64>,
    efficiency: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Family {
    CobbDouglas,
    Nonlinear,
}

/// A fully validated economy, ready to solve or calibrate.
#[derive(Debug, Clone)]
pub struct Economy {
    pub label: String,
    pub params: EconomyParams,
    pub shape: Shape,
    pub efficiency: Option<f64>,
    pub target_u: Option<f64>,
}

pub fn load_economy(path: &Path) -> Result<Economy, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let config: EconomyConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;

    let discount_fields = [
        config.r.is_some(),
        config.beta.is_some(),
        config.annual_interest_rate.is_some(),
    ];
    if discount_fields.iter().filter(|&&given| given).count() != 1 {
        return Err(CliError::Input(format!(
            "{}: exactly one of `r`, `beta`, `annual_interest_rate` must be given",
            path.display()
        )));
    }

    let params = if let Some(r) = config.r {
        EconomyParams::with_interest_rate(config.y, config.z, config.c, config.phi, config.s, r)?
    } else if let Some(beta) = config.beta {
        EconomyParams::with_discount_factor(
            config.y, config.z, config.c, config.phi, config.s, beta,
        )?
    } else {
        let annual = config.annual_interest_rate.expect("checked above");
        if !(annual > 0.0) || !annual.is_finite() {
            return Err(CliError::Input(format!(
                "invalid annual_interest_rate = {annual}: must be finite and positive"
            )));
        }
        let beta = (1.0 / (1.0 + annual)).powf(1.0 / 365.0);
        EconomyParams::with_discount_factor(
            config.y, config.z, config.c, config.phi, config.s, beta,
        )?
    };

    let shape = match (
        config.technology.family,
        config.technology.alpha,
        config.technology.gamma,
    ) {
        (Family::CobbDouglas, Some(alpha), None) => Shape::CobbDouglas { alpha },
        (Family::CobbDouglas, None, _) => {
            return Err(CliError::Input(
                "technology.family `cobb_douglas` requires `alpha`".into(),
            ))
        }
        (Family::CobbDouglas, Some(_), Some(_)) => {
            return Err(CliError::Input(
                "technology.family `cobb_douglas` does not take `gamma`".into(),
            ))
        }
        (Family::Nonlinear, None, Some(gamma)) => Shape::Nonlinear { gamma },
        (Family::Nonlinear, _, None) => {
            return Err(CliError::Input(
                "technology.family `nonlinear` requires `gamma`".into(),
            ))
        }
        (Family::Nonlinear, Some(_), Some(_)) => {
            return Err(CliError::Input(
                "technology.family `nonlinear` does not take `alpha`".into(),
            ))
        }
    };
    // Validate shape (and efficiency, when given) eagerly.
    shape.technology(config.technology.efficiency.unwrap_or(1.0))?;

    if let Some(target_u) = config.target_u {
        if !(target_u > 0.0 && target_u < 1.0) {
            return Err(CliError::Input(format!(
                "invalid target_u = {target_u}: must be inside (0, 1)"
            )));
        }
    }

    let label = config.label.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "economy".to_string())
    });

    Ok(Economy {
        label,
        params,
        shape,
        efficiency: config.technology.efficiency,
        target_u: config.target_u,
    })
}
