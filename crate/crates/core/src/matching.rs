//! Matching technologies for the labor market.
//!
//! A matching technology maps the stocks of unemployed workers `u` and posted
//! vacancies `v` into new hires per period, with constant returns to scale.
//! Everything downstream is evaluated through labor-market tightness
//! `theta = v/u`: the vacancy-filling probability `q(theta) = M/v`, the
//! job-finding probability `theta*q(theta) = M/u`, and the elasticity of
//! matching with respect to unemployment `eta = -theta*q'(theta)/q(theta)`,
//! which lies in (0, 1) for any constant-returns technology that is
//! increasing in both arguments.
//!
//! Probabilities are deliberately not clamped to [0, 1] here. Whether a
//! calibration keeps per-period probabilities inside (0, 1] is a property of
//! the parameterization and is checked when an equilibrium is solved.

use thiserror::Error;

/// Parameter or domain failure when building or evaluating a technology.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MatchingError {
    #[error("invalid {name} = {value}: must be {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("{name} = {value} is outside the domain: must be {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

/// Switch the nonlinear form to log-space evaluation once `theta^gamma`
/// exceeds this, so extreme-tightness limits do not overflow.
const POW_OVERFLOW_GUARD: f64 = 1e300;

/// A constant-returns matching technology, evaluated at tightness `theta`.
///
/// Implementations must keep, for every `theta > 0`: `q(theta) > 0` and
/// strictly decreasing, `theta*q(theta)` strictly increasing, and the
/// matching elasticity inside (0, 1). The efficiency constant scales matches
/// multiplicatively and leaves the elasticity unchanged.
///
/// Trait methods assume `theta` is finite and positive; the module-level
/// functions of the same names validate inputs first and are the checked
/// entry points.
pub trait MatchingTechnology {
    /// Multiplicative matching-efficiency constant.
    fn efficiency(&self) -> f64;

    /// Vacancy-filling probability `q(theta)`.
    fn fill_prob(&self, theta: f64) -> f64;

    /// Analytic derivative `q'(theta)`; negative everywhere.
    fn fill_prob_derivative(&self, theta: f64) -> f64;

    /// Elasticity of matching with respect to unemployment,
    /// `-theta*q'(theta)/q(theta)`.
    fn match_elasticity(&self, theta: f64) -> f64;

    /// Job-finding probability `theta * q(theta)`.
    fn find_prob(&self, theta: f64) -> f64 {
        theta * self.fill_prob(theta)
    }

    /// Matches `M(u, v)`. Defined as 0 whenever `u = 0` or `v = 0`, the
    /// continuous limit of both closed forms.
    fn matches(&self, u: f64, v: f64) -> f64 {
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        // M/u = theta*q(theta) with theta = v/u.
        u * self.find_prob(v / u)
    }
}

/// Cobb-Douglas technology `M(u, v) = A * u^alpha * v^(1-alpha)`, so
/// `q(theta) = A * theta^(-alpha)` and the elasticity is the constant `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CobbDouglas {
    efficiency: f64,
    alpha: f64,
}

impl CobbDouglas {
    /// Requires `efficiency > 0` and `alpha` in (0, 1).
    pub fn new(efficiency: f64, alpha: f64) -> Result<Self, MatchingError> {
        if !(efficiency > 0.0) || !efficiency.is_finite() {
            return Err(MatchingError::InvalidParameter {
                name: "efficiency",
                value: efficiency,
                requirement: "finite and positive",
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(MatchingError::InvalidParameter {
                name: "alpha",
                value: alpha,
                requirement: "inside (0, 1)",
            });
        }
        Ok(Self { efficiency, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl MatchingTechnology for CobbDouglas {
    fn efficiency(&self) -> f64 {
        self.efficiency
    }

    fn fill_prob(&self, theta: f64) -> f64 {
        self.efficiency * theta.powf(-self.alpha)
    }

    fn fill_prob_derivative(&self, theta: f64) -> f64 {
        -self.alpha * self.efficiency * theta.powf(-self.alpha - 1.0)
    }

    fn match_elasticity(&self, _theta: f64) -> f64 {
        self.alpha
    }
}

/// Nonlinear technology `M(u, v) = A * u * v * (u^gamma + v^gamma)^(-1/gamma)`,
/// so `q(theta) = A * (1 + theta^gamma)^(-1/gamma)` and the elasticity is
/// `theta^gamma / (1 + theta^gamma)`, which varies with tightness.
///
/// Unlike the Cobb-Douglas form, the filling and finding probabilities are
/// bounded by the efficiency constant at the extremes of tightness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinear {
    efficiency: f64,
    gamma: f64,
}

impl Nonlinear {
    /// Requires `efficiency > 0` and `gamma > 0`.
    pub fn new(efficiency: f64, gamma: f64) -> Result<Self, MatchingError> {
        if !(efficiency > 0.0) || !efficiency.is_finite() {
            return Err(MatchingError::InvalidParameter {
                name: "efficiency",
                value: efficiency,
                requirement: "finite and positive",
            });
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(MatchingError::InvalidParameter {
                name: "gamma",
                value: gamma,
                requirement: "finite and positive",
            });
        }
        Ok(Self { efficiency, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

fn nonlinear_unit_fill(theta: f64, gamma: f64) -> f64 {
    let tg = theta.powf(gamma);
    if tg <= POW_OVERFLOW_GUARD {
        (1.0 + tg).powf(-1.0 / gamma)
    } else {
        // (1 + theta^gamma)^(-1/gamma)
        //   = exp(-(gamma*ln(theta) + ln(1 + theta^-gamma)) / gamma)
        (-((gamma * theta.ln() + theta.powf(-gamma).ln_1p()) / gamma)).exp()
    }
}

fn nonlinear_unit_fill_derivative(theta: f64, gamma: f64) -> f64 {
    let tg = theta.powf(gamma);
    // The two-factor product underflows long before the derivative itself
    // does, so switch to log space well below the overflow guard.
    if tg <= 1e12 {
        -theta.powf(gamma - 1.0) * (1.0 + tg).powf(-1.0 / gamma - 1.0)
    } else {
        let log_one_plus_tg = gamma * theta.ln() + theta.powf(-gamma).ln_1p();
        -((gamma - 1.0) * theta.ln() - (1.0 / gamma + 1.0) * log_one_plus_tg).exp()
    }
}

impl MatchingTechnology for Nonlinear {
    fn efficiency(&self) -> f64 {
        self.efficiency
    }

    fn fill_prob(&self, theta: f64) -> f64 {
        self.efficiency * nonlinear_unit_fill(theta, self.gamma)
    }

    fn fill_prob_derivative(&self, theta: f64) -> f64 {
        self.efficiency * nonlinear_unit_fill_derivative(theta, self.gamma)
    }

    fn match_elasticity(&self, theta: f64) -> f64 {
        // theta^gamma / (1 + theta^gamma), evaluated on the side that
        // keeps the power from overflowing.
        if theta >= 1.0 {
            1.0 / (1.0 + theta.powf(-self.gamma))
        } else {
            let tg = theta.powf(self.gamma);
            tg / (1.0 + tg)
        }
    }
}

/// A concrete technology chosen at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Technology {
    CobbDouglas(CobbDouglas),
    Nonlinear(Nonlinear),
}

impl Technology {
    /// Stable identifier used in CSV output and configuration files.
    pub fn family_name(&self) -> &'static str {
        match self {
            Technology::CobbDouglas(_) => "cobb_douglas",
            Technology::Nonlinear(_) => "nonlinear",
        }
    }

    /// The family and shape parameter, with the efficiency dropped.
    pub fn shape(&self) -> Shape {
        match self {
            Technology::CobbDouglas(t) => Shape::CobbDouglas { alpha: t.alpha() },
            Technology::Nonlinear(t) => Shape::Nonlinear { gamma: t.gamma() },
        }
    }
}

impl From<CobbDouglas> for Technology {
    fn from(t: CobbDouglas) -> Self {
        Technology::CobbDouglas(t)
    }
}

impl From<Nonlinear> for Technology {
    fn from(t: Nonlinear) -> Self {
        Technology::Nonlinear(t)
    }
}

impl MatchingTechnology for Technology {
    fn efficiency(&self) -> f64 {
        match self {
            Technology::CobbDouglas(t) => t.efficiency(),
            Technology::Nonlinear(t) => t.efficiency(),
        }
    }

    fn fill_prob(&self, theta: f64) -> f64 {
        match self {
            Technology::CobbDouglas(t) => t.fill_prob(theta),
            Technology::Nonlinear(t) => t.fill_prob(theta),
        }
    }

    fn fill_prob_derivative(&self, theta: f64) -> f64 {
        match self {
            Technology::CobbDouglas(t) => t.fill_prob_derivative(theta),
            Technology::Nonlinear(t) => t.fill_prob_derivative(theta),
        }
    }

    fn match_elasticity(&self, theta: f64) -> f64 {
        match self {
            Technology::CobbDouglas(t) => t.match_elasticity(theta),
            Technology::Nonlinear(t) => t.match_elasticity(theta),
        }
    }
}

/// A technology family with its shape parameter fixed and the efficiency
/// constant left free, as used by calibration and by the empirical bound
/// series (the elasticity does not depend on efficiency).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    CobbDouglas { alpha: f64 },
    Nonlinear { gamma: f64 },
}

impl Shape {
    pub fn family_name(&self) -> &'static str {
        match self {
            Shape::CobbDouglas { .. } => "cobb_douglas",
            Shape::Nonlinear { .. } => "nonlinear",
        }
    }

    /// Attach an efficiency constant, validating all parameters.
    pub fn technology(&self, efficiency: f64) -> Result<Technology, MatchingError> {
        match *self {
            Shape::CobbDouglas { alpha } => {
                CobbDouglas::new(efficiency, alpha).map(Technology::CobbDouglas)
            }
            Shape::Nonlinear { gamma } => {
                Nonlinear::new(efficiency, gamma).map(Technology::Nonlinear)
            }
        }
    }
}

fn ensure_tightness(theta: f64) -> Result<(), MatchingError> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(MatchingError::Domain {
            name: "theta",
            value: theta,
            requirement: "finite and positive",
        });
    }
    Ok(())
}

fn ensure_nonnegative(name: &'static str, value: f64) -> Result<(), MatchingError> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(MatchingError::Domain {
            name,
            value,
            requirement: "finite and nonnegative",
        });
    }
    Ok(())
}

/// Matches `M(u, v)` with input validation.
pub fn matches<T>(tech: &T, u: f64, v: f64) -> Result<f64, MatchingError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_nonnegative("u", u)?;
    ensure_nonnegative("v", v)?;
    Ok(tech.matches(u, v))
}

/// Vacancy-filling probability `q(theta)` with input validation.
pub fn fill_prob<T>(tech: &T, theta: f64) -> Result<f64, MatchingError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(tech.fill_prob(theta))
}

/// Job-finding probability `theta * q(theta)` with input validation.
pub fn find_prob<T>(tech: &T, theta: f64) -> Result<f64, MatchingError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(tech.find_prob(theta))
}

/// Matching elasticity with respect to unemployment, with input validation.
pub fn match_elasticity<T>(tech: &T, theta: f64) -> Result<f64, MatchingError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(tech.match_elasticity(theta))
}

/// Analytic `q'(theta)` with input validation.
pub fn fill_prob_derivative<T>(tech: &T, theta: f64) -> Result<f64, MatchingError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(tech.fill_prob_derivative(theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(actual: f64, expected: f64, tol: f64) -> bool {
        (actual - expected).abs() <= tol * expected.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn cobb_douglas_matches_square_root_case() {
        let tech = CobbDouglas::new(1.0, 0.5).unwrap();
        // sqrt(4 * 1) = 2
        assert!(rel_close(matches(&tech, 4.0, 1.0).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn nonlinear_matches_symmetric_point() {
        let tech = Nonlinear::new(1.0, 1.27).unwrap();
        // 2^(-1/1.27), high-precision evaluation
        let expected = 0.579_386_680_965_928;
        assert!(rel_close(
            matches(&tech, 1.0, 1.0).unwrap(),
            expected,
            1e-14
        ));
        assert!(rel_close(find_prob(&tech, 1.0).unwrap(), expected, 1e-14));
    }

    #[test]
    fn matches_is_zero_without_searchers_or_vacancies() {
        let cd = CobbDouglas::new(1.0, 0.5).unwrap();
        let nl = Nonlinear::new(1.0, 1.27).unwrap();
        assert_eq!(matches(&cd, 0.0, 5.0).unwrap(), 0.0);
        assert_eq!(matches(&cd, 5.0, 0.0).unwrap(), 0.0);
        assert_eq!(matches(&nl, 0.0, 5.0).unwrap(), 0.0);
        assert_eq!(matches(&nl, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_or_nonfinite_inputs_are_domain_errors() {
        let tech = CobbDouglas::new(1.0, 0.5).unwrap();
        assert!(matches!(
            matches(&tech, -1.0, 2.0),
            Err(MatchingError::Domain { name: "u", .. })
        ));
        assert!(matches!(
            matches(&tech, 2.0, f64::NAN),
            Err(MatchingError::Domain { name: "v", .. })
        ));
        for theta in [0.0, -3.0, f64::NAN, f64::INFINITY] {
            assert!(fill_prob(&tech, theta).is_err());
            assert!(find_prob(&tech, theta).is_err());
            assert!(match_elasticity(&tech, theta).is_err());
            assert!(fill_prob_derivative(&tech, theta).is_err());
        }
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(CobbDouglas::new(0.0, 0.5).is_err());
        assert!(CobbDouglas::new(-1.0, 0.5).is_err());
        assert!(CobbDouglas::new(1.0, 0.0).is_err());
        assert!(CobbDouglas::new(1.0, 1.0).is_err());
        assert!(CobbDouglas::new(f64::NAN, 0.5).is_err());
        assert!(Nonlinear::new(0.0, 1.27).is_err());
        assert!(Nonlinear::new(1.0, 0.0).is_err());
        assert!(Nonlinear::new(1.0, -2.0).is_err());
    }

    #[test]
    fn fill_prob_examples() {
        let unit = CobbDouglas::new(1.0, 0.5).unwrap();
        assert!(rel_close(fill_prob(&unit, 1.0).unwrap(), 1.0, 1e-15));

        // Nonlinear fill probability approaches the efficiency constant as
        // tightness vanishes.
        let nl = Nonlinear::new(1.0, 1.27).unwrap();
        assert!((fill_prob(&nl, 1e-12).unwrap() - 1.0).abs() <= 1e-9);

        // Calibrated-scale evaluation: 0.0636 * 0.0893^(-0.5)
        let calibrated = CobbDouglas::new(0.0636, 0.5).unwrap();
        assert!(rel_close(
            fill_prob(&calibrated, 0.0893).unwrap(),
            0.212_829_285_088_461,
            1e-12
        ));
    }

    #[test]
    fn find_prob_examples() {
        let unit = CobbDouglas::new(1.0, 0.5).unwrap();
        assert!(rel_close(find_prob(&unit, 1.0).unwrap(), 1.0, 1e-15));

        // Finding probability approaches the efficiency constant as
        // tightness grows without bound.
        let nl = Nonlinear::new(1.0, 1.27).unwrap();
        assert!((find_prob(&nl, 1e12).unwrap() - 1.0).abs() <= 1e-12);

        // Direct evaluation at rounded calibration values.
        let calibrated = Nonlinear::new(0.2206, 1.27).unwrap();
        assert!(rel_close(
            find_prob(&calibrated, 0.0893).unwrap(),
            0.019_006_833_534_727,
            1e-12
        ));
    }

    #[test]
    fn elasticity_examples() {
        let cd = CobbDouglas::new(1.0, 0.5).unwrap();
        assert_eq!(match_elasticity(&cd, 17.3).unwrap(), 0.5);
        assert_eq!(match_elasticity(&cd, 0.001).unwrap(), 0.5);

        for gamma in [0.5, 1.0, 1.27, 3.0] {
            let nl = Nonlinear::new(1.0, gamma).unwrap();
            assert!(rel_close(match_elasticity(&nl, 1.0).unwrap(), 0.5, 1e-15));
        }

        let nl = Nonlinear::new(1.0, 1.27).unwrap();
        assert!(rel_close(
            match_elasticity(&nl, 0.0893).unwrap(),
            0.044_446_381_945_245_62,
            1e-12
        ));
    }

    #[test]
    fn elasticity_does_not_depend_on_efficiency() {
        for theta in [1e-3, 0.1, 1.0, 42.0, 1e3] {
            let reference = Nonlinear::new(1.0, 1.27).unwrap().match_elasticity(theta);
            for efficiency in [0.1, 7.0] {
                let other = Nonlinear::new(efficiency, 1.27).unwrap();
                assert!((other.match_elasticity(theta) - reference).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn fill_prob_derivative_examples() {
        let cd = CobbDouglas::new(1.0, 0.5).unwrap();
        assert!(rel_close(
            fill_prob_derivative(&cd, 1.0).unwrap(),
            -0.5,
            1e-15
        ));

        // q = 1/(1+theta) at gamma = 1, so q'(1) = -1/4.
        let nl = Nonlinear::new(1.0, 1.0).unwrap();
        assert!(rel_close(
            fill_prob_derivative(&nl, 1.0).unwrap(),
            -0.25,
            1e-14
        ));
    }

    #[test]
    fn derivative_agrees_with_central_difference_at_spec_point() {
        let h = 1e-6;
        let theta = 0.3;
        let techs: [&dyn MatchingTechnology; 2] = [
            &CobbDouglas::new(1.0, 0.5).unwrap(),
            &Nonlinear::new(1.0, 1.27).unwrap(),
        ];
        for tech in techs {
            let fd = (tech.fill_prob(theta + h) - tech.fill_prob(theta - h)) / (2.0 * h);
            let analytic = tech.fill_prob_derivative(theta);
            assert!(
                rel_close(analytic, fd, 1e-6),
                "analytic {analytic} vs finite difference {fd}"
            );
        }
    }

    #[test]
    fn nonlinear_survives_extreme_tightness() {
        let nl = Nonlinear::new(0.75, 1.27).unwrap();
        // theta^gamma overflows f64 here; the log-space branch takes over.
        let huge = 1e260;
        let q = nl.fill_prob(huge);
        assert!(q.is_finite() && q > 0.0);
        assert!(rel_close(q, 0.75 / huge, 1e-10));
        assert!(rel_close(nl.find_prob(huge), 0.75, 1e-10));
        // The true derivative is ~ -A/theta^2, below f64 range here; it may
        // underflow but must not blow up or change sign.
        let dq = nl.fill_prob_derivative(huge);
        assert!(dq <= 0.0 && dq.is_finite());

        // Where -A/theta^2 is still representable the log-space path must
        // reproduce it.
        let large = 1e150;
        let dq = nl.fill_prob_derivative(large);
        assert!(dq < 0.0);
        assert!(rel_close(dq, -0.75 / (large * large), 1e-6));

        let tiny = 1e-260;
        assert!(rel_close(nl.fill_prob(tiny), 0.75, 1e-12));
        assert!(nl.find_prob(tiny) >= 0.0);
    }
}
