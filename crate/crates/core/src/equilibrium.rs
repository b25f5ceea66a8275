//! Steady-state equilibrium of the search economy.
//!
//! Asset values for a filled job `J`, a posted vacancy `V`, employment `E`,
//! and unemployment `U` obey discrete-time Bellman equations. Free entry
//! drives `V` to zero and Nash bargaining splits the match surplus, which
//! collapses the system into one equation in tightness alone:
//!
//! ```text
//! (y - z) / c = [r + s + phi * theta * q(theta)] / [(1 - phi) * q(theta)]
//! ```
//!
//! The left side is the fundamental surplus per unit of posting cost. The
//! right side is strictly increasing in `theta`, so the residual function
//! defined by [`tightness_residual`] is strictly decreasing and has at most
//! one root. A positive value for the first posted vacancy guarantees the
//! root exists and lies below `(1 - phi)(y - z)/(phi c)`; the solver brackets
//! it there and hands the bracket to Brent's method.

use serde::Serialize;
use thiserror::Error;

use crate::matching::MatchingTechnology;
use crate::root::brent;

/// Default relative residual tolerance for the tightness solver.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Log-spaced probes used to find the positive end of the bracket.
const BRACKET_PROBES: usize = 64;

/// The smallest probe sits this many decades below the bracket's upper end.
const BRACKET_SPAN_DECADES: f64 = 16.0;

/// Cap for the geometric upper-bracket expansion when `phi = 0`.
const PHI_ZERO_CAP: f64 = 1e12;

/// Errors from parameter validation or equilibrium computation.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EquilibriumError {
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
    #[error(
        "no steady-state equilibrium: the initial vacancy is unprofitable \
         ((1-phi)(y-z)/(r+s) = {surplus_value} must exceed the posting cost c = {vacancy_cost})"
    )]
    Existence {
        surplus_value: f64,
        vacancy_cost: f64,
    },
    #[error(
        "failed to bracket the equilibrium: residual is {residual_lo} at theta = {lo} and \
         {residual_hi} at theta = {hi} (matching efficiency may be too low or too high \
         for this economy)"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        residual_lo: f64,
        residual_hi: f64,
    },
    #[error(
        "equilibrium probabilities leave (0, 1]: fill = {fill}, find = {find}; \
         the calibration is invalid at this period length"
    )]
    ProbabilityRange { fill: f64, find: f64 },
    #[error("root finder stalled: |residual| = {residual} exceeds tolerance {tolerance}")]
    Convergence { residual: f64, tolerance: f64 },
    #[error("solved equilibrium failed internal consistency check: {0}")]
    Inconsistent(&'static str),
}

/// Parameters of one economy at a fixed period length.
///
/// `y` is output per employed worker-period, `z` the flow value of nonwork,
/// `c` the flow cost of keeping a vacancy posted, `phi` the worker's Nash
/// bargaining weight, `s` the exogenous separation probability, and `r` the
/// per-period interest rate, stored alongside `beta = 1/(1 + r)`.
///
/// Validation accepts `y <= z`: degenerate surpluses are meaningful inputs
/// for the existence check, which rejects them before any solving happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomyParams {
    y: f64,
    z: f64,
    c: f64,
    phi: f64,
    s: f64,
    r: f64,
    beta: f64,
}

impl EconomyParams {
    /// Build from a per-period interest rate `r > 0`.
    pub fn with_interest_rate(
        y: f64,
        z: f64,
        c: f64,
        phi: f64,
        s: f64,
        r: f64,
    ) -> Result<Self, EquilibriumError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(EquilibriumError::InvalidParameter {
                name: "r",
                value: r,
                requirement: "finite and positive",
            });
        }
        Self {
            y,
            z,
            c,
            phi,
            s,
            r,
            beta: 1.0 / (1.0 + r),
        }
        .validated()
    }

    /// Build from a per-period discount factor `beta` in (0, 1).
    pub fn with_discount_factor(
        y: f64,
        z: f64,
        c: f64,
        phi: f64,
        s: f64,
        beta: f64,
    ) -> Result<Self, EquilibriumError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(EquilibriumError::InvalidParameter {
                name: "beta",
                value: beta,
                requirement: "inside (0, 1)",
            });
        }
        // (1 - beta) is exact for beta in [0.5, 1), so this loses less
        // precision than 1/beta - 1.
        let r = (1.0 - beta) / beta;
        Self {
            y,
            z,
            c,
            phi,
            s,
            r,
            beta,
        }
        .validated()
    }

    /// Daily-frequency baseline: `z = 0.6`, `c = 0.1`, `phi = 0.5`,
    /// `s = 0.001`, `beta = 0.95^(1/365)` (five percent annual discounting).
    pub fn daily_baseline(y: f64) -> Result<Self, EquilibriumError> {
        Self::with_discount_factor(y, 0.6, 0.1, 0.5, 0.001, 0.95_f64.powf(1.0 / 365.0))
    }

    fn validated(self) -> Result<Self, EquilibriumError> {
        let check = |name, value: f64, ok: bool, requirement| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(EquilibriumError::InvalidParameter {
                    name,
                    value,
                    requirement,
                })
            }
        };
        check("y", self.y, self.y > 0.0, "finite and positive")?;
        check("z", self.z, self.z >= 0.0, "finite and nonnegative")?;
        check("c", self.c, self.c > 0.0, "finite and positive")?;
        check(
            "phi",
            self.phi,
            self.phi >= 0.0 && self.phi < 1.0,
            "inside [0, 1)",
        )?;
        check("s", self.s, self.s > 0.0 && self.s < 1.0, "inside (0, 1)")?;
        Ok(self)
    }

    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `r + s`, the effective flow discount on a match.
    pub fn r_plus_s(&self) -> f64 {
        self.r + self.s
    }

    /// Same economy with productivity replaced.
    pub fn with_productivity(&self, y: f64) -> Result<Self, EquilibriumError> {
        Self { y, ..*self }.validated()
    }

    /// Same economy with the vacancy posting cost replaced.
    pub fn with_vacancy_cost(&self, c: f64) -> Result<Self, EquilibriumError> {
        Self { c, ..*self }.validated()
    }

    /// Same economy with the bargaining weight replaced.
    pub fn with_bargaining_power(&self, phi: f64) -> Result<Self, EquilibriumError> {
        Self { phi, ..*self }.validated()
    }
}

/// Outcome of the initial-vacancy profitability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceReport {
    /// Whether `(1 - phi)(y - z)/(r + s) > c`.
    pub surplus_condition_holds: bool,
    /// Limit value of the first posted vacancy,
    /// `-c + beta (1 - phi)(y - z) / (1 - beta (1 - s))`. Positive exactly
    /// when the surplus condition holds.
    pub initial_vacancy_value: f64,
    /// Open interval guaranteed to contain equilibrium tightness when the
    /// condition holds; the upper end is infinite when `phi = 0`.
    pub bracket: (f64, f64),
}

/// Check whether posting the first vacancy is profitable and report the
/// tightness bracket implied by it.
pub fn check_existence(p: &EconomyParams) -> ExistenceReport {
    let surplus_value = (1.0 - p.phi) * (p.y - p.z) / p.r_plus_s();
    let initial_vacancy_value =
        -p.c + p.beta * (1.0 - p.phi) * (p.y - p.z) / (1.0 - p.beta * (1.0 - p.s));
    let upper = if p.phi > 0.0 {
        (1.0 - p.phi) * (p.y - p.z) / (p.phi * p.c)
    } else {
        f64::INFINITY
    };
    ExistenceReport {
        surplus_condition_holds: surplus_value > p.c,
        initial_vacancy_value,
        bracket: (0.0, upper),
    }
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

fn raw_residual<T>(p: &EconomyParams, tech: &T, theta: f64) -> f64
where
    T: MatchingTechnology + ?Sized,
{
    let q = tech.fill_prob(theta);
    (p.y - p.z) / p.c - p.r_plus_s() / ((1.0 - p.phi) * q) - p.phi * theta / (1.0 - p.phi)
}

/// Residual of the equilibrium condition at a trial tightness:
///
/// ```text
/// (y - z)/c - (r + s)/[(1 - phi) q(theta)] - phi * theta / (1 - phi)
/// ```
///
/// Strictly decreasing in `theta`; equilibrium tightness is its unique root.
pub fn tightness_residual<T>(
    p: &EconomyParams,
    tech: &T,
    theta: f64,
) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(raw_residual(p, tech, theta))
}

/// Solve the equilibrium condition for tightness.
///
/// The residual is bracketed on `(theta_lo, theta_hi)`: `theta_hi` is the
/// analytic upper bound `(1 - phi)(y - z)/(phi c)` (or a geometric expansion
/// from 1 when `phi = 0`), and `theta_lo` is the smallest of 64 log-spaced
/// probes with a positive residual. Brent's method then drives the residual
/// below `tol * (y - z)/c`.
pub fn solve_tightness<T>(p: &EconomyParams, tech: &T, tol: f64) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(EquilibriumError::Domain {
            name: "tol",
            value: tol,
            requirement: "finite and positive",
        });
    }
    let report = check_existence(p);
    if !report.surplus_condition_holds {
        return Err(EquilibriumError::Existence {
            surplus_value: (1.0 - p.phi) * (p.y - p.z) / p.r_plus_s(),
            vacancy_cost: p.c,
        });
    }

    let (hi, residual_hi) = if p.phi > 0.0 {
        let hi = report.bracket.1;
        (hi, raw_residual(p, tech, hi))
    } else {
        // With phi = 0 the condition reduces to (y-z)/c = (r+s)/q(theta);
        // expand geometrically until the residual turns negative.
        let mut hi = 1.0;
        let mut f_hi = raw_residual(p, tech, hi);
        while f_hi >= 0.0 && hi < PHI_ZERO_CAP {
            hi *= 2.0;
            f_hi = raw_residual(p, tech, hi);
        }
        (hi, f_hi)
    };

    let mut bracket_lo = None;
    for k in 0..BRACKET_PROBES {
        let decades = BRACKET_SPAN_DECADES * (1.0 - k as f64 / BRACKET_PROBES as f64);
        let theta = hi * 10f64.powf(-decades);
        let f = raw_residual(p, tech, theta);
        if f > 0.0 {
            bracket_lo = Some((theta, f));
            break;
        }
    }

    let smallest_probe = hi * 10f64.powf(-BRACKET_SPAN_DECADES);
    let (lo, residual_lo) = match bracket_lo {
        Some(found) if residual_hi < 0.0 => found,
        _ => {
            return Err(EquilibriumError::Bracket {
                lo: smallest_probe,
                hi,
                residual_lo: bracket_lo
                    .map(|(_, f)| f)
                    .unwrap_or_else(|| raw_residual(p, tech, smallest_probe)),
                residual_hi,
            })
        }
    };

    let scale = (p.y - p.z) / p.c;
    let ftol = tol * scale;
    let (theta, residual) = brent(
        |theta| raw_residual(p, tech, theta),
        lo,
        hi,
        residual_lo,
        residual_hi,
        ftol,
        200,
    );
    if residual.abs() > ftol {
        return Err(EquilibriumError::Convergence {
            residual,
            tolerance: ftol,
        });
    }
    Ok(theta)
}

/// Steady-state unemployment implied by a separation probability and a
/// job-finding probability: `u = s / (s + f)`.
pub fn steady_state_unemployment(separation: f64, finding: f64) -> Result<f64, EquilibriumError> {
    if !(separation > 0.0 && separation < 1.0) {
        return Err(EquilibriumError::Domain {
            name: "s",
            value: separation,
            requirement: "inside (0, 1)",
        });
    }
    if !(finding > 0.0 && finding <= 1.0) {
        return Err(EquilibriumError::Domain {
            name: "f",
            value: finding,
            requirement: "inside (0, 1]",
        });
    }
    Ok(separation / (separation + finding))
}

/// Wage implied by zero vacancy value: `w = y - (r + s) c / q(theta)`.
pub fn wage_from_free_entry<T>(
    p: &EconomyParams,
    tech: &T,
    theta: f64,
) -> Result<f64, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    ensure_tightness(theta)?;
    Ok(p.y - p.r_plus_s() * p.c / tech.fill_prob(theta))
}

/// Closed-form Nash wage: `w = z + phi (y - z + theta c)`, valid for any
/// `theta >= 0`. Agrees with [`wage_from_free_entry`] exactly at equilibrium.
pub fn wage_from_bargaining(p: &EconomyParams, theta: f64) -> f64 {
    p.z + p.phi * (p.y - p.z + theta * p.c)
}

/// A solved steady state.
///
/// `vacancy_value` is identically zero by free entry; it is carried so the
/// Bellman system can be checked as stated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    /// Equilibrium tightness `theta* = v/u`.
    pub theta: f64,
    /// Unemployment rate `u* = s / (s + f*)`.
    pub unemployment: f64,
    /// Bargained wage.
    pub wage: f64,
    /// Per-period vacancy-filling probability `q(theta*)`.
    pub fill_prob: f64,
    /// Per-period job-finding probability `theta* q(theta*)`.
    pub find_prob: f64,
    /// Value of a filled job, `J = (y - w)/(1 - beta(1 - s))`.
    pub job_value: f64,
    /// Value of a posted vacancy (zero under free entry).
    pub vacancy_value: f64,
    /// Value of employment, `E = U + phi * S`.
    pub employment_value: f64,
    /// Value of unemployment from the annuity identity,
    /// `U = (1 + r)/r * [z + phi c theta / (1 - phi)]`.
    pub unemployment_value: f64,
    /// Match surplus `S = J / (1 - phi)`.
    pub surplus: f64,
    /// Annuity value of unemployment, `r U / (1 + r)`.
    pub unemployment_annuity: f64,
}

/// Loose relative guard on the identity set; catches implementation bugs
/// without tripping on accumulated rounding at loose solver tolerances.
const CONSISTENCY_GUARD: f64 = 1e-6;

fn ensure_consistent(
    label: &'static str,
    actual: f64,
    expected: f64,
) -> Result<(), EquilibriumError> {
    let scale = expected.abs().max(1.0);
    if (actual - expected).abs() <= CONSISTENCY_GUARD * scale {
        Ok(())
    } else {
        Err(EquilibriumError::Inconsistent(label))
    }
}

fn validate_equilibrium(p: &EconomyParams, eq: &Equilibrium) -> Result<(), EquilibriumError> {
    let q = eq.fill_prob;
    let f = eq.find_prob;
    // Free entry, two routes to J.
    ensure_consistent(
        "free entry J = c/(beta q)",
        eq.job_value,
        p.c / (p.beta * q),
    )?;
    // The two wage equations cross at the root.
    ensure_consistent(
        "wage equations agree",
        p.y - p.r_plus_s() * p.c / q,
        eq.wage,
    )?;
    // Bellman system at the fixed point.
    ensure_consistent(
        "Bellman: filled job",
        p.y - eq.wage + p.beta * (p.s * eq.vacancy_value + (1.0 - p.s) * eq.job_value),
        eq.job_value,
    )?;
    ensure_consistent(
        "Bellman: vacancy",
        -p.c + p.beta * (q * eq.job_value + (1.0 - q) * eq.vacancy_value),
        eq.vacancy_value,
    )?;
    ensure_consistent(
        "Bellman: employment",
        eq.wage + p.beta * (p.s * eq.unemployment_value + (1.0 - p.s) * eq.employment_value),
        eq.employment_value,
    )?;
    ensure_consistent(
        "Bellman: unemployment",
        p.z + p.beta * (f * eq.employment_value + (1.0 - f) * eq.unemployment_value),
        eq.unemployment_value,
    )?;
    ensure_consistent(
        "annuity identity",
        p.r * eq.unemployment_value / (1.0 + p.r),
        eq.unemployment_annuity,
    )?;
    Ok(())
}

/// Solve for the full steady state: tightness, unemployment, wage, and all
/// asset values, with the per-period probabilities validated to lie in
/// (0, 1] and the equilibrium identities checked before returning.
pub fn solve_equilibrium<T>(
    p: &EconomyParams,
    tech: &T,
    tol: f64,
) -> Result<Equilibrium, EquilibriumError>
where
    T: MatchingTechnology + ?Sized,
{
    let theta = solve_tightness(p, tech, tol)?;
    let fill = tech.fill_prob(theta);
    let find = tech.find_prob(theta);
    if !(fill > 0.0 && fill <= 1.0 && find > 0.0 && find <= 1.0) {
        return Err(EquilibriumError::ProbabilityRange { fill, find });
    }

    let unemployment = steady_state_unemployment(p.s, find)?;
    let wage = wage_from_bargaining(p, theta);
    let unemployment_annuity = p.z + p.phi * p.c * theta / (1.0 - p.phi);
    let unemployment_value = (1.0 + p.r) / p.r * unemployment_annuity;
    let job_value = (p.y - wage) / (1.0 - p.beta * (1.0 - p.s));
    let surplus = job_value / (1.0 - p.phi);
    let employment_value = unemployment_value + p.phi * surplus;

    let eq = Equilibrium {
        theta,
        unemployment,
        wage,
        fill_prob: fill,
        find_prob: find,
        job_value,
        vacancy_value: 0.0,
        employment_value,
        unemployment_value,
        surplus,
        unemployment_annuity,
    };
    validate_equilibrium(p, &eq)?;
    Ok(eq)
}
