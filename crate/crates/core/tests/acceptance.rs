//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p dmp-core --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::path::Path;
use std::time::Instant;

use dmp_core::calibration::{calibrate_efficiency, renormalize, CalibrationTarget};
use dmp_core::elasticity::{tightness_elasticity, upsilon};
use dmp_core::empirics::{beveridge_points, bound_series, load_fred_series, tightness_series};
use dmp_core::equilibrium::{
    check_existence, solve_equilibrium, solve_tightness, tightness_residual, wage_from_bargaining,
    wage_from_free_entry, DEFAULT_TOLERANCE,
};
use dmp_core::experiment::{monthly_rate, run_sweep, SweepRow, SweepSpec};
use dmp_core::matching::{CobbDouglas, MatchingTechnology, Nonlinear, Shape, Technology};
use dmp_core::EconomyParams;

const BASE_PRODUCTIVITIES: [f64; 3] = [0.61, 0.63, 0.65];
const TARGET_U: f64 = 0.05;

fn shapes() -> [Shape; 2] {
    [
        Shape::CobbDouglas { alpha: 0.5 },
        Shape::Nonlinear { gamma: 1.27 },
    ]
}

fn baseline(y: f64) -> EconomyParams {
    EconomyParams::daily_baseline(y).unwrap()
}

fn calibrated(y: f64, shape: Shape) -> Technology {
    calibrate_efficiency(&CalibrationTarget::new(baseline(y), shape, TARGET_U).unwrap()).unwrap()
}

fn rel_err(actual: f64, reference: f64) -> f64 {
    (actual - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, title: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("[PASS] criterion {number:2}: {title}"),
        Err(cause) => {
            println!("[FAIL] criterion {number:2}: {title}");
            resume_unwind(cause);
        }
    }
}

#[test]
fn criterion_01_calibration_replication() {
    criterion(
        1,
        "six calibrated economies recover the 5 percent target within 1e-10, under 1 second",
        || {
            let start = Instant::now();
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let tech = calibrated(y, shape);
                    let eq = solve_equilibrium(&baseline(y), &tech, DEFAULT_TOLERANCE).unwrap();
                    assert!(
                        (eq.unemployment - TARGET_U).abs() <= 1e-10,
                        "u = {} at y = {y} under {}",
                        eq.unemployment,
                        tech.family_name()
                    );
                }
            }
            let elapsed = start.elapsed();
            assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
        },
    );
}

/// Sweep rows for one base productivity and family over the shared offset
/// grid (11 points, +-0.005).
fn sweep_rows(y: f64, shape: Shape) -> Vec<SweepRow> {
    let spec = SweepSpec::new(
        format!("y={y}"),
        baseline(y),
        shape,
        TARGET_U,
        SweepSpec::centered_grid(y, 0.005, 11),
        1e-12,
    )
    .unwrap();
    run_sweep(&spec).unwrap()
}

#[test]
fn criterion_02_productivity_response_ordering() {
    criterion(
        2,
        "unemployment falls in y; nonlinear responds more; responses shrink as the surplus grows",
        || {
            let mid = 5usize; // base-productivity index on the 11-point grid
            let mut by_family: Vec<Vec<Vec<SweepRow>>> = Vec::new(); // [family][base][row]
            for shape in shapes() {
                let mut per_base = Vec::new();
                for y in BASE_PRODUCTIVITIES {
                    let rows = sweep_rows(y, shape);
                    assert_eq!(rows.len(), 11);
                    assert!((rows[mid].u - TARGET_U).abs() <= 1e-10);
                    // Strictly decreasing unemployment in productivity.
                    assert!(rows.windows(2).all(|w| w[1].u < w[0].u));
                    per_base.push(rows);
                }
                by_family.push(per_base);
            }

            // At every perturbed offset the nonlinear response exceeds the
            // Cobb-Douglas response for the same base economy.
            for (base, &y) in BASE_PRODUCTIVITIES.iter().enumerate() {
                for (k, (cd_row, nl_row)) in by_family[0][base]
                    .iter()
                    .zip(&by_family[1][base])
                    .enumerate()
                {
                    if k == mid {
                        continue;
                    }
                    let cd = (cd_row.u - TARGET_U).abs();
                    let nl = (nl_row.u - TARGET_U).abs();
                    assert!(
                        nl > cd,
                        "offset {k}, base y = {y}: |du| nonlinear {nl} <= cobb-douglas {cd}"
                    );
                }
            }

            // Responses ordered by the fundamental surplus: strongest at
            // y = 0.61, weakest at y = 0.65, family by family.
            for (family, per_base) in by_family.iter().enumerate() {
                for k in (0..11).filter(|&k| k != mid) {
                    let r061 = (per_base[0][k].u - TARGET_U).abs();
                    let r063 = (per_base[1][k].u - TARGET_U).abs();
                    let r065 = (per_base[2][k].u - TARGET_U).abs();
                    assert!(
                        r061 > r063 && r063 > r065,
                        "offset {k}, family {family}: {r061} / {r063} / {r065}"
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_03_elasticities_match_finite_difference_oracles() {
    criterion(
        3,
        "eta_theta_y and dw/dy match two-resolve central differences within 1e-4",
        || {
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let p = baseline(y);
                    let tech = calibrated(y, shape);
                    let theta = solve_tightness(&p, &tech, DEFAULT_TOLERANCE).unwrap();
                    let report = tightness_elasticity(&p, &tech, theta).unwrap();

                    let h = 1e-6 * y;
                    let up = p.with_productivity(y + h).unwrap();
                    let down = p.with_productivity(y - h).unwrap();
                    let theta_up = solve_tightness(&up, &tech, DEFAULT_TOLERANCE).unwrap();
                    let theta_down = solve_tightness(&down, &tech, DEFAULT_TOLERANCE).unwrap();

                    let fd_eta = ((theta_up - theta_down) / theta) / ((up.y() - down.y()) / y);
                    assert!(
                        rel_err(report.eta_theta_y, fd_eta) <= 1e-4,
                        "eta_theta_y {} vs oracle {fd_eta}",
                        report.eta_theta_y
                    );

                    let fd_dw = (wage_from_bargaining(&up, theta_up)
                        - wage_from_bargaining(&down, theta_down))
                        / (up.y() - down.y());
                    assert!(
                        rel_err(report.dw_dy, fd_dw) <= 1e-4,
                        "dw_dy {} vs oracle {fd_dw}",
                        report.dw_dy
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_04_first_factor_bounds() {
    criterion(
        4,
        "1 < Upsilon < 1/eta for phi in {0.1, 0.5, 0.9}; equality at phi = 0 within 1e-12",
        || {
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let tech = calibrated(y, shape);
                    for phi in [0.1, 0.5, 0.9] {
                        let p = baseline(y).with_bargaining_power(phi).unwrap();
                        let theta = solve_tightness(&p, &tech, DEFAULT_TOLERANCE).unwrap();
                        let value = upsilon(&p, &tech, theta).unwrap();
                        let eta = tech.match_elasticity(theta);
                        assert!(
                            1.0 < value && value < 1.0 / eta,
                            "Upsilon = {value} outside (1, {}) at phi = {phi}",
                            1.0 / eta
                        );
                    }
                    let p = baseline(y).with_bargaining_power(0.0).unwrap();
                    let theta = solve_tightness(&p, &tech, DEFAULT_TOLERANCE).unwrap();
                    let value = upsilon(&p, &tech, theta).unwrap();
                    let bound = 1.0 / tech.match_elasticity(theta);
                    assert!((value - bound).abs() <= 1e-12);
                }
            }
        },
    );
}

#[test]
fn criterion_05_matching_property_suite() {
    criterion(
        5,
        "elasticity range, vacancy-derivative identity, CRS, and monotonicity on the 200-point grid",
        || {
            let grid = log_grid(1e-3, 1e3, 200);
            for efficiency in [0.1, 1.0] {
                let techs: [Technology; 2] = [
                    Technology::CobbDouglas(CobbDouglas::new(efficiency, 0.5).unwrap()),
                    Technology::Nonlinear(Nonlinear::new(efficiency, 1.27).unwrap()),
                ];
                for tech in &techs {
                    for &theta in &grid {
                        let eta = tech.match_elasticity(theta);
                        assert!(eta > 0.0 && eta < 1.0);

                        // 1 - eta = M_v / q via central differences.
                        let h = 1e-6 * theta;
                        let m_v = (tech.matches(1.0, theta + h) - tech.matches(1.0, theta - h))
                            / (2.0 * h);
                        assert!(
                            rel_err(1.0 - eta, m_v / tech.fill_prob(theta)) <= 1e-5,
                            "identity off at theta = {theta}"
                        );

                        // Constant returns to scale.
                        let m = tech.matches(1.0, theta);
                        for lambda in [0.5, 2.0, 10.0] {
                            let scaled = tech.matches(lambda, lambda * theta);
                            assert!((scaled - lambda * m).abs() <= 1e-12 * lambda * m);
                        }
                    }
                    for w in grid.windows(2) {
                        assert!(tech.fill_prob(w[1]) < tech.fill_prob(w[0]));
                        assert!(tech.find_prob(w[1]) > tech.find_prob(w[0]));
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_06_existence_and_uniqueness() {
    criterion(
        6,
        "existence iff positive initial vacancy value; single sign change; root inside the bracket",
        || {
            // Parameter grids straddling (1 - phi)(y - z) = c (r + s).
            for phi in [0.0, 0.3, 0.7] {
                for delta in [1e-6, 1e-3, 0.1] {
                    let p0 = baseline(0.61).with_bargaining_power(phi).unwrap();
                    let boundary_cost = (1.0 - phi) * (p0.y() - p0.z()) / p0.r_plus_s();
                    for side in [-1.0, 1.0] {
                        let c = boundary_cost * (1.0 + side * delta);
                        let p = p0.with_vacancy_cost(c).unwrap();
                        let report = check_existence(&p);
                        assert_eq!(report.surplus_condition_holds, side < 0.0);
                        assert_eq!(
                            report.surplus_condition_holds,
                            report.initial_vacancy_value > 0.0,
                            "condition and limit value disagree at phi={phi} delta={delta}"
                        );
                    }
                }
            }

            // Exactly one sign change over 1000 log-spaced bracket samples,
            // and the solved root lies inside the analytic bracket.
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let p = baseline(y);
                    let tech = calibrated(y, shape);
                    let upper = check_existence(&p).bracket.1;
                    let samples = log_grid(upper * 1e-9, upper, 1000);
                    let signs: Vec<bool> = samples
                        .iter()
                        .map(|&theta| tightness_residual(&p, &tech, theta).unwrap() > 0.0)
                        .collect();
                    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                    assert_eq!(changes, 1, "sign changes = {changes} at y = {y}");

                    let theta = solve_tightness(&p, &tech, DEFAULT_TOLERANCE).unwrap();
                    assert!(theta > 0.0 && theta < upper);
                }
            }
        },
    );
}

#[test]
fn criterion_07_equilibrium_identity_suite() {
    criterion(
        7,
        "free entry, Nash split, annuity, wage equality, and all Bellman equations within 1e-9",
        || {
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let p = baseline(y);
                    let tech = calibrated(y, shape);
                    let eq = solve_equilibrium(&p, &tech, DEFAULT_TOLERANCE).unwrap();

                    assert_eq!(eq.vacancy_value, 0.0);
                    assert!(
                        (eq.job_value - p.c() / (p.beta() * eq.fill_prob)).abs()
                            <= 1e-9 * eq.job_value
                    );
                    assert!(
                        ((eq.employment_value - eq.unemployment_value) - p.phi() * eq.surplus)
                            .abs()
                            <= 1e-9
                    );
                    assert!(
                        ((eq.job_value - eq.vacancy_value) - (1.0 - p.phi()) * eq.surplus).abs()
                            <= 1e-9
                    );
                    assert!(
                        (p.r() * eq.unemployment_value / (1.0 + p.r())
                            - p.z()
                            - p.phi() * p.c() * eq.theta / (1.0 - p.phi()))
                        .abs()
                            <= 1e-9
                    );
                    let w_entry = wage_from_free_entry(&p, &tech, eq.theta).unwrap();
                    assert!((w_entry - wage_from_bargaining(&p, eq.theta)).abs() <= 1e-9);

                    // The four Bellman equations at the fixed point.
                    let j = p.y() - eq.wage
                        + p.beta() * (p.s() * eq.vacancy_value + (1.0 - p.s()) * eq.job_value);
                    assert!((j - eq.job_value).abs() <= 1e-9);
                    let v = -p.c()
                        + p.beta()
                            * (eq.fill_prob * eq.job_value
                                + (1.0 - eq.fill_prob) * eq.vacancy_value);
                    assert!((v - eq.vacancy_value).abs() <= 1e-9);
                    let e = eq.wage
                        + p.beta()
                            * (p.s() * eq.unemployment_value + (1.0 - p.s()) * eq.employment_value);
                    assert!((e - eq.employment_value).abs() <= 1e-9);
                    let u = p.z()
                        + p.beta()
                            * (eq.find_prob * eq.employment_value
                                + (1.0 - eq.find_prob) * eq.unemployment_value);
                    assert!((u - eq.unemployment_value).abs() <= 1e-9);
                }
            }
        },
    );
}

#[test]
fn criterion_08_normalization_invariance() {
    criterion(
        8,
        "cost rescaling with the closed-form efficiency leaves theta/zeta, f, J, u unchanged",
        || {
            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let p = baseline(y);
                    let tech = calibrated(y, shape);
                    let eq = solve_equilibrium(&p, &tech, DEFAULT_TOLERANCE).unwrap();
                    for zeta in [0.3, 0.7] {
                        let (p2, t2) = renormalize(&p, &tech, &eq, zeta).unwrap();
                        if let Shape::CobbDouglas { alpha } = shape {
                            // Closed form: zeta^(1 - alpha) * A.
                            let closed = zeta.powf(1.0 - alpha) * tech.efficiency();
                            assert!(rel_err(t2.efficiency(), closed) <= 1e-12);
                        }
                        let eq2 = solve_equilibrium(&p2, &t2, DEFAULT_TOLERANCE).unwrap();
                        assert!(rel_err(eq2.theta, eq.theta / zeta) <= 1e-9);
                        assert!(rel_err(eq2.find_prob, eq.find_prob) <= 1e-9);
                        assert!(rel_err(eq2.job_value, eq.job_value) <= 1e-9);
                        assert!(rel_err(eq2.unemployment, eq.unemployment) <= 1e-9);
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_09_monthly_conversion() {
    criterion(
        9,
        "monthly rate matches the high-precision value; all monthly rates sit strictly inside (0, 1)",
        || {
            // 1 - 0.981^30 evaluated at high precision.
            let expected = 0.437_567_742_070_379_12;
            assert!((monthly_rate(0.019, 30).unwrap() - expected).abs() <= 1e-12);

            for y in BASE_PRODUCTIVITIES {
                for shape in shapes() {
                    let tech = calibrated(y, shape);
                    let eq = solve_equilibrium(&baseline(y), &tech, DEFAULT_TOLERANCE).unwrap();
                    let monthly_fill = monthly_rate(eq.fill_prob, 30).unwrap();
                    let monthly_find = monthly_rate(eq.find_prob, 30).unwrap();
                    assert!(monthly_fill > 0.0 && monthly_fill < 1.0);
                    assert!(monthly_find > 0.0 && monthly_find < 1.0);
                }
            }
        },
    );
}

#[test]
fn criterion_10_empirical_fixture() {
    criterion(
        10,
        "bundled fixture: negative Beveridge correlation; bound_cd = 2; bound_nl > 1",
        || {
            let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
            let unemployment = load_fred_series(&dir.join("unemploy_sample.csv")).unwrap();
            let vacancies = load_fred_series(&dir.join("jtsjol_sample.csv")).unwrap();

            let beveridge = beveridge_points(&unemployment, &vacancies).unwrap();
            let correlation = beveridge.correlation.expect("enough joined months");
            assert!(correlation < 0.0, "correlation = {correlation}");

            let series = tightness_series(&unemployment, &vacancies).unwrap();
            assert_eq!(series.observations.len(), 24);

            let cd = bound_series(&series, &Shape::CobbDouglas { alpha: 0.5 }).unwrap();
            assert!(cd.iter().all(|p| (p.bound - 2.0).abs() <= 1e-12));

            let nl = bound_series(&series, &Shape::Nonlinear { gamma: 1.27 }).unwrap();
            assert!(nl.iter().all(|p| p.bound > 1.0));
        },
    );
}
