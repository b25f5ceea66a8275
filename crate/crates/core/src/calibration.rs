//! Calibration of matching efficiency and the cost/efficiency
//! renormalization.
//!
//! Efficiency is the only free parameter: the shape (`alpha` or `gamma`) is
//! held fixed. The inversion is closed-form, so no nested root-finding is
//! needed: the unemployment target pins the finding probability, the
//! free-entry condition is linear in `1/q` given that probability, and the
//! efficiency follows from the unit-efficiency fill function.

use thiserror::Error;

use crate::equilibrium::{check_existence, EconomyParams, Equilibrium, EquilibriumError};
use crate::matching::{MatchingError, MatchingTechnology, Shape, Technology};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CalibrationError {
    #[error("{name} = {value} is outside the domain: must be {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(
        "unemployment target {target_u} is unattainable: with separation {separation} it \
         requires a per-period finding probability of {required} > 1"
    )]
    InfeasibleTarget {
        target_u: f64,
        separation: f64,
        required: f64,
    },
    #[error(
        "calibrated fill probability {fill} leaves (0, 1]; the target cannot be hit at \
         this period length"
    )]
    ProbabilityRange { fill: f64 },
    #[error("normalization scale {zeta} is outside (0, {upper})")]
    NormalizationRange { zeta: f64, upper: f64 },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

/// An unemployment target for one economy under one technology family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    pub params: EconomyParams,
    pub shape: Shape,
    pub target_u: f64,
}

impl CalibrationTarget {
    /// Requires `target_u` strictly inside (0, 1).
    pub fn new(
        params: EconomyParams,
        shape: Shape,
        target_u: f64,
    ) -> Result<Self, CalibrationError> {
        if !(target_u > 0.0 && target_u < 1.0) {
            return Err(CalibrationError::Domain {
                name: "target_u",
                value: target_u,
                requirement: "inside (0, 1)",
            });
        }
        Ok(Self {
            params,
            shape,
            target_u,
        })
    }
}

/// Finding probability needed to hold unemployment at `target_u`:
/// `f = s (1 - u) / u`, from inverting `u = s/(s + f)`.
pub fn required_find_prob(separation: f64, target_u: f64) -> Result<f64, CalibrationError> {
    if !(separation > 0.0 && separation < 1.0) {
        return Err(CalibrationError::Domain {
            name: "s",
            value: separation,
            requirement: "inside (0, 1)",
        });
    }
    if !(target_u > 0.0 && target_u < 1.0) {
        return Err(CalibrationError::Domain {
            name: "target_u",
            value: target_u,
            requirement: "inside (0, 1)",
        });
    }
    let required = separation * (1.0 - target_u) / target_u;
    if required > 1.0 {
        return Err(CalibrationError::InfeasibleTarget {
            target_u,
            separation,
            required,
        });
    }
    Ok(required)
}

/// Pick the efficiency constant so the solved economy's unemployment rate
/// equals the target.
///
/// Closed-form chain: `f* = s(1 - u*)/u*`; the free-entry condition gives
/// `q* = c (r + s + phi f*) / [(1 - phi)(y - z)]`; `theta* = f*/q*`; and the
/// efficiency is `q*` over the unit-efficiency fill probability at `theta*`.
/// Re-solving with the returned technology reproduces the target.
pub fn calibrate_efficiency(target: &CalibrationTarget) -> Result<Technology, CalibrationError> {
    let p = &target.params;
    if !check_existence(p).surplus_condition_holds {
        return Err(EquilibriumError::Existence {
            surplus_value: (1.0 - p.phi()) * (p.y() - p.z()) / p.r_plus_s(),
            vacancy_cost: p.c(),
        }
        .into());
    }

    let find = required_find_prob(p.s(), target.target_u)?;
    let fill = p.c() * (p.r_plus_s() + p.phi() * find) / ((1.0 - p.phi()) * (p.y() - p.z()));
    if !(fill > 0.0 && fill <= 1.0) || !fill.is_finite() {
        return Err(CalibrationError::ProbabilityRange { fill });
    }
    let theta = find / fill;
    let unit = target.shape.technology(1.0)?;
    let efficiency = fill / unit.fill_prob(theta);
    Ok(target.shape.technology(efficiency)?)
}

/// A validated rescaling of the vacancy cost.
///
/// The bound `zeta < 1/q*` keeps the rescaled fill probability `zeta q*`
/// inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    zeta: f64,
    upper: f64,
}

impl Normalization {
    /// `fill_prob` is the pre-normalization equilibrium fill probability.
    pub fn new(zeta: f64, fill_prob: f64) -> Result<Self, CalibrationError> {
        if !(fill_prob > 0.0) || !fill_prob.is_finite() {
            return Err(CalibrationError::Domain {
                name: "fill_prob",
                value: fill_prob,
                requirement: "finite and positive",
            });
        }
        let upper = 1.0 / fill_prob;
        if !(zeta > 0.0 && zeta < upper) {
            return Err(CalibrationError::NormalizationRange { zeta, upper });
        }
        Ok(Self { zeta, upper })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Open admissible interval `(0, 1/q*)`.
    pub fn bounds(&self) -> (f64, f64) {
        (0.0, self.upper)
    }
}

/// Rescale the vacancy cost to `zeta * c` and adjust the efficiency so the
/// economy reaches the same equilibrium allocation: tightness becomes
/// `theta*/zeta`, the finding probability, job value, and unemployment rate
/// are unchanged, and the fill probability scales to `zeta q*`.
///
/// Returns the new parameter/technology pair, leaving the inputs intact. The
/// efficiency adjustment is `zeta * q* / qbar(theta*/zeta)` with `qbar` the
/// unit-efficiency fill function of the same family; for Cobb-Douglas this
/// reduces to `zeta^(1 - alpha) * A`.
pub fn renormalize(
    p: &EconomyParams,
    tech: &Technology,
    eq: &Equilibrium,
    zeta: f64,
) -> Result<(EconomyParams, Technology), CalibrationError> {
    let normalization = Normalization::new(zeta, eq.fill_prob)?;
    let zeta = normalization.zeta();
    let rescaled = p.with_vacancy_cost(zeta * p.c())?;
    let unit = tech.shape().technology(1.0)?;
    let efficiency = zeta * eq.fill_prob / unit.fill_prob(eq.theta / zeta);
    let adjusted = tech.shape().technology(efficiency)?;
    Ok((rescaled, adjusted))
}
