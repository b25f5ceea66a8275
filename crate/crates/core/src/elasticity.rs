//! Decomposition of the tightness and wage responses to productivity.
//!
//! At an interior equilibrium, implicit differentiation of the free-entry
//! condition gives
//!
//! ```text
//! d(theta)/dy = [r + s + phi f] / [(r + s) eta + phi f] * theta / (y - z)
//! ```
//!
//! with `f = theta q(theta)` and `eta` the matching elasticity. In
//! elasticity form this factors multiplicatively,
//!
//! ```text
//! eta_theta_y = Upsilon * y / (y - z),
//! Upsilon = 1 + (r + s)(1 - eta) / [(r + s) eta + phi f],
//! ```
//!
//! where the second factor is the inverse fundamental-surplus fraction and
//! the first is pinned between 1 and `1/eta`. The wage response follows from
//! the bargained wage equation:
//!
//! ```text
//! dw/dy = phi [(r + s) eta + f] / [(r + s) eta + phi f].
//! ```

use serde::Serialize;

use crate::equilibrium::{
    tightness_residual, wage_from_bargaining, EconomyParams, EquilibriumError,
};
use crate::matching::MatchingTechnology;

/// A report is flagged as evaluated at equilibrium when the relative
/// residual of the free-entry condition is below this.
pub const EQUILIBRIUM_RESIDUAL_FLAG: f64 = 1e-8;

/// The elasticity decomposition and its diagnostics at one tightness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticityReport {
    /// Elasticity of tightness with respect to productivity,
    /// `Upsilon * y/(y - z)` by construction.
    pub eta_theta_y: f64,
    /// First factor of the decomposition.
    pub upsilon: f64,
    /// Second factor, `y / (y - z)`.
    pub inverse_surplus_fraction: f64,
    /// Matching elasticity at the evaluation point.
    pub eta_m_u: f64,
    /// Strict upper bound on the first factor, `1 / eta_m_u`.
    pub upsilon_upper_bound: f64,
    /// Wage elasticity `(dw/dy) * y / w`.
    pub eta_w_y: f64,
    /// Level derivative of tightness with respect to productivity.
    pub dtheta_dy: f64,
    /// Level derivative of the wage with respect to productivity.
    pub dw_dy: f64,
    /// Relative residual of the equilibrium condition at the evaluation
    /// point, `|T(theta)| / [(y - z)/c]`.
    pub equilibrium_residual: f64,
    /// False when the report was computed away from a solved equilibrium,
    /// where the decomposition is only a local reading.
    pub at_equilibrium: bool,
}

fn ensure_tightness(theta: f64) -> Result<(), EquilibriumError> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(EquilibriumError::Domain {
            name: "theta",
            value: theta,
            requirement: "finite and positive",
        });
    }
    Ok(())
}

fn upsilon_at(p: &EconomyParams, eta: f64, weighted_find: f64) -> f64 {
    let rs = p.r_plus_s();
    1.0 + rs * (1.0 - eta) / (rs * eta + weighted_find)
}

/// First factor of the decomposition,
/// `Upsilon = 1 + (r + s)(1 - eta)/[(r + s) eta + phi theta q(theta)]`.
///
/// Equals `1/eta` when the worker has no bargaining power and approaches 1
/// as the matching elasticity approaches 1.
pub fn upsilon<T>(p: &EconomyParams, tech: &T, theta: f64) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    let eta = tech.match_elasticity(theta);
    Ok(upsilon_at(p, eta, p.phi() * tech.find_prob(theta)))
}

/// `Upsilon` viewed as a function of a damping weight `chi` in [0, 1] on the
/// bargaining term: `Upsilon(1)` is [`upsilon`], `Upsilon(0) = 1/eta`, and
/// the function decreases strictly in between whenever `phi theta q > 0`.
pub fn upsilon_chi<T>(
    p: &EconomyParams,
    tech: &T,
    theta: f64,
    chi: f64,
) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    if !(0.0..=1.0).contains(&chi) || !chi.is_finite() {
        return Err(EquilibriumError::Domain {
            name: "chi",
            value: chi,
            requirement: "inside [0, 1]",
        });
    }
    let eta = tech.match_elasticity(theta);
    Ok(upsilon_at(p, eta, chi * p.phi() * tech.find_prob(theta)))
}

/// Level derivative of the bargained wage with respect to productivity,
/// `dw/dy = phi [(r + s) eta + theta q] / [(r + s) eta + phi theta q]`.
/// Zero when the worker has no bargaining power; tends to one as the worker
/// claims the whole surplus.
pub fn wage_derivative<T>(p: &EconomyParams, tech: &T, theta: f64) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    let eta = tech.match_elasticity(theta);
    let f = tech.find_prob(theta);
    let rs = p.r_plus_s();
    Ok(p.phi() * (rs * eta + f) / (rs * eta + p.phi() * f))
}

/// Wage elasticity `eta_w_y = (dw/dy) * y / w(theta)`.
pub fn wage_elasticity<T>(p: &EconomyParams, tech: &T, theta: f64) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    let dw_dy = wage_derivative(p, tech, theta)?;
    Ok(dw_dy * p.y() / wage_from_bargaining(p, theta))
}

/// Full decomposition at `theta`, which should be the solved equilibrium
/// tightness for `p` and `tech`; reports computed elsewhere carry
/// `at_equilibrium = false`.
pub fn tightness_elasticity<T>(
    p: &EconomyParams,
    tech: &T,
    theta: f64,
) -> Result<ElasticityReport, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    if !(p.y() > p.z()) {
        return Err(EquilibriumError::Domain {
            name: "y - z",
            value: p.y() - p.z(),
            requirement: "positive (the decomposition divides by the fundamental surplus)",
        });
    }

    let eta = tech.match_elasticity(theta);
    let f = tech.find_prob(theta);
    let rs = p.r_plus_s();
    let upsilon = upsilon_at(p, eta, p.phi() * f);
    let inverse_surplus_fraction = p.y() / (p.y() - p.z());
    let dtheta_dy = (rs + p.phi() * f) / (rs * eta + p.phi() * f) * theta / (p.y() - p.z());
    let dw_dy = p.phi() * (rs * eta + f) / (rs * eta + p.phi() * f);
    let residual = tightness_residual(p, tech, theta)?.abs() / ((p.y() - p.z()) / p.c());

    Ok(ElasticityReport {
        eta_theta_y: upsilon * inverse_surplus_fraction,
        upsilon,
        inverse_surplus_fraction,
        eta_m_u: eta,
        upsilon_upper_bound: 1.0 / eta,
        eta_w_y: dw_dy * p.y() / wage_from_bargaining(p, theta),
        dtheta_dy,
        dw_dy,
        equilibrium_residual: residual,
        at_equilibrium: residual <= EQUILIBRIUM_RESIDUAL_FLAG,
    })
}
