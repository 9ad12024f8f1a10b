//! The identity battery behind `mginf validate`: every structural claim the
//! library makes about a parameter point, checked numerically at desk scale.
//!
//! Checks that need a density or positive rate report `skipped` at the
//! degenerate point `beta = -lambda` instead of failing.

use mginf::busy_analytics::{
    busy_period_mean, conjectured_busy_law, laplace_conjectured, peakedness_busy, peakedness_cycle,
    renewal_constant_gap, renewal_function_paper, renewal_oracle, RenewalConvention,
};
use mginf::moments::{moment_bounds, moment_grid, moment_quadrature, moment_series};
use mginf::service_law::cross_ratio;
use mginf::ServiceLawParams;

use crate::report::{CheckResult, CheckStatus};

/// The default 500-point grid: rho in (0, 3], p in [0, 0.9], beta-fraction
/// in (0, 1], 10 x 10 x 5.
pub fn default_grid() -> Vec<ServiceLawParams> {
    let mut grid = Vec::with_capacity(500);
    for i in 1..=10 {
        for j in 0..10 {
            for k in 1..=5 {
                let rho = 0.3 * i as f64;
                let p = 0.1 * j as f64;
                let frac = 0.2 * k as f64;
                grid.push(
                    ServiceLawParams::from_beta_fraction(1.0, rho, frac, p)
                        .expect("grid point must be admissible"),
                );
            }
        }
    }
    grid
}

/// Every check at one parameter point.
pub fn point_battery(params: &ServiceLawParams) -> Vec<CheckResult> {
    let mut checks = vec![
        check_atom_at_zero(params),
        check_cdf_monotone(params),
        check_inversion_roundtrip(params),
        check_density_consistency(params),
        check_pdf_integral(params),
        check_ode_residual(params),
        check_cross_ratio(params),
        check_series_identity(params),
        check_mean_identity(params),
        check_bound_containment(params, 6),
        check_series_quadrature(params),
        check_grid_convergence(params),
        check_keystone(params),
        check_ratio_identity(params),
        check_conjectured_mean(params),
        check_renewal_slope(params),
        check_renewal_gap_constant(params),
    ];
    checks.shrink_to_fit();
    checks
}

/// Reduced per-point set swept over the full default grid.
pub fn grid_battery() -> Vec<CheckResult> {
    let grid = default_grid();
    let mut keystone: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    let mut mean: f64 = 0.0;
    let mut conj_mean: f64 = 0.0;
    let mut ode: f64 = 0.0;
    let mut containment_violations = 0usize;
    for params in &grid {
        keystone = keystone.max(rel_err(
            peakedness_busy(params),
            laplace_conjectured(params, 1.0 / params.alpha()),
        ));
        ratio = ratio.max(rel_err(
            peakedness_cycle(params),
            params.rho() / (params.rho() + 1.0) * peakedness_busy(params),
        ));
        let q1 = moment_quadrature(params, 1).expect("grid is non-degenerate");
        mean = mean.max(rel_err(q1.value, params.alpha()));
        conj_mean = conj_mean.max(rel_err(
            conjectured_busy_law(params).mean(),
            busy_period_mean(params),
        ));
        for i in 0..10 {
            let t = (20.0 * (i as f64 + 0.5) / 10.0) / params.a_rate();
            let r = params.ode_residual(t).expect("non-degenerate");
            ode = ode.max(r.abs() / (params.lambda() + params.beta().abs()));
        }
        for n in 1..=4 {
            let b = moment_bounds(params, n).expect("non-degenerate");
            let q = moment_quadrature(params, n).expect("non-degenerate");
            if q.value < b.lower || q.value > b.upper {
                containment_violations += 1;
            }
        }
    }
    vec![
        CheckResult::from_error("grid_keystone_identity", keystone, 1e-12),
        CheckResult::from_error("grid_ratio_identity", ratio, 1e-14),
        CheckResult::from_error("grid_mean_identity", mean, 1e-9),
        CheckResult::from_error("grid_conjectured_mean", conj_mean, 1e-14),
        CheckResult::from_error("grid_ode_residual", ode, 1e-8),
        CheckResult::from_error("grid_bound_containment", containment_violations as f64, 0.0),
    ]
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = b.abs().max(1e-300);
    (a - b).abs() / scale
}

fn check_atom_at_zero(params: &ServiceLawParams) -> CheckResult {
    CheckResult::from_error(
        "cdf_atom_at_zero",
        (params.cdf(0.0) - params.atom()).abs(),
        0.0,
    )
}

fn check_cdf_monotone(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        // point mass: cdf identically one
        let worst = (0..50)
            .map(|i| (params.cdf(i as f64) - 1.0).abs())
            .fold(0.0, f64::max);
        return CheckResult::from_error("cdf_monotone", worst, 0.0);
    }
    let mut worst = 0.0_f64;
    let mut prev = params.cdf(0.0);
    for i in 1..=200 {
        let t = 30.0 * i as f64 / 200.0 / params.a_rate();
        let c = params.cdf(t);
        worst = worst.max(prev - c);
        prev = c;
    }
    CheckResult::from_error("cdf_monotone", worst.max(0.0), 0.0)
}

fn check_inversion_roundtrip(params: &ServiceLawParams) -> CheckResult {
    let lo = params.atom();
    let hi = 1.0 - 1e-9;
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let u = lo + (hi - lo) * (i as f64 + 0.5) / 1000.0;
        let t = params.quantile(u).expect("u in range");
        worst = worst.max((params.cdf(t) - u).abs());
    }
    CheckResult::from_error("inversion_roundtrip", worst, 1e-10)
}

fn check_density_consistency(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("density_consistency");
    }
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let u = params.atom() + (0.999 - params.atom()) * (i as f64 + 0.5) / 50.0;
        let t = params.quantile(u).expect("u in range");
        if t <= 0.0 {
            continue;
        }
        let h = (1e-6 / params.a_rate()).min(t / 2.0);
        let slope = (params.cdf(t + h) - params.cdf(t - h)) / (2.0 * h);
        let g = params.pdf(t).expect("non-degenerate");
        worst = worst.max((slope - g).abs() / g.max(1e-300));
    }
    CheckResult::from_error("density_consistency", worst, 1e-6)
}

fn check_pdf_integral(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("pdf_integral");
    }
    let t_max = 60.0 / params.a_rate();
    let n = 100_000;
    let h = t_max / n as f64;
    let mut sum = params.pdf(0.0).unwrap() + params.pdf(t_max).unwrap();
    for i in 1..n {
        let w = if i % 2 == 0 { 2.0 } else { 4.0 };
        sum += w * params.pdf(i as f64 * h).unwrap();
    }
    let integral = sum * h / 3.0;
    CheckResult::from_error(
        "pdf_integral",
        (integral - (1.0 - params.atom())).abs(),
        1e-8,
    )
}

fn check_ode_residual(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("ode_residual");
    }
    let tol = 1e-8 * (params.lambda() + params.beta().abs());
    let mut worst = 0.0_f64;
    for i in 0..200 {
        let t = 20.0 * i as f64 / 199.0 / params.a_rate();
        worst = worst.max(params.ode_residual(t).unwrap().abs());
    }
    CheckResult::from_error("ode_residual", worst, tol)
}

fn check_cross_ratio(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("cross_ratio");
    }
    // shrink rho so beta stays admissible for every member of the quadruple
    let rhos = [
        0.4 * params.rho(),
        0.6 * params.rho(),
        0.8 * params.rho(),
        params.rho(),
    ];
    let mut worst = 0.0_f64;
    for i in 1..=5 {
        let t = 2.0 * i as f64 / params.a_rate();
        match cross_ratio(params.lambda(), params.beta(), params.p(), rhos, t) {
            Ok(cr) => worst = worst.max((cr.lhs - cr.rhs).abs() / cr.rhs.abs().max(1e-300)),
            Err(_) => return CheckResult::skipped("cross_ratio"),
        }
    }
    CheckResult::from_error("cross_ratio", worst, 1e-9)
}

fn check_series_identity(params: &ServiceLawParams) -> CheckResult {
    // (e^rho - 1) e^{-At} < 1 always holds at t = (rho + 1)/A
    let t = (params.rho() + 1.0) / params.a_rate().max(1e-300);
    if params.is_degenerate() {
        return CheckResult::skipped("series_cdf_identity");
    }
    let mut worst = 0.0_f64;
    for k in [10usize, 40, 160] {
        match params.series_cdf_partial(t, k) {
            Ok(s) => {
                let err = (s.value - params.cdf(t)).abs();
                // must be inside the reported bound (plus rounding)
                worst = worst.max((err - s.error_bound).max(0.0));
            }
            Err(_) => return CheckResult::skipped("series_cdf_identity"),
        }
    }
    CheckResult::from_error("series_cdf_identity", worst, 1e-13)
}

fn check_mean_identity(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("mean_identity");
    }
    let q = moment_quadrature(params, 1).unwrap();
    CheckResult::from_error("mean_identity", rel_err(q.value, params.alpha()), 1e-9)
}

fn check_bound_containment(params: &ServiceLawParams, n_max: u32) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("bound_containment");
    }
    let mut violations = 0usize;
    for n in 1..=n_max {
        let b = moment_bounds(params, n).unwrap();
        let q = moment_quadrature(params, n).unwrap();
        if q.value < b.lower || q.value > b.upper {
            violations += 1;
        }
    }
    CheckResult::from_error("bound_containment", violations as f64, 0.0)
}

fn check_series_quadrature(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() || params.rho() >= std::f64::consts::LN_2 {
        return CheckResult::skipped("series_quadrature_agreement");
    }
    let mut worst = 0.0_f64;
    for n in 1..=4 {
        let s = moment_series(params, n, 1e-9).unwrap();
        let q = moment_quadrature(params, n).unwrap();
        let budget = s.error_bound.unwrap() + q.error_bound.unwrap();
        worst = worst.max(((s.value - q.value).abs() - budget).max(0.0));
    }
    CheckResult::from_error("series_quadrature_agreement", worst, 0.0)
}

fn check_grid_convergence(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("grid_estimator_convergence");
    }
    let tail_tol = 1e-9;
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for m in [1u32, 4, 16, 64, 256] {
        let e = moment_grid(params, 1, m, tail_tol);
        if e.value > prev + 1e-9 || e.value < params.alpha() - tail_tol * 20.0 / params.a_rate() {
            return CheckResult::from_error("grid_estimator_convergence", f64::INFINITY, 0.0);
        }
        prev = e.value;
        last = e.value;
    }
    CheckResult::from_error(
        "grid_estimator_convergence",
        (last - params.alpha()).abs() / params.alpha(),
        // m = 256 leaves a discretization gap of order 1/m
        0.05,
    )
}

fn check_keystone(params: &ServiceLawParams) -> CheckResult {
    let pi = peakedness_busy(params);
    let lt = laplace_conjectured(params, 1.0 / params.alpha());
    CheckResult::from_error("keystone_peakedness_identity", rel_err(pi, lt), 1e-12)
}

fn check_ratio_identity(params: &ServiceLawParams) -> CheckResult {
    let expected = params.rho() / (params.rho() + 1.0) * peakedness_busy(params);
    CheckResult::from_error(
        "cycle_ratio_identity",
        rel_err(peakedness_cycle(params), expected),
        1e-14,
    )
}

fn check_conjectured_mean(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        // conjectured mean is exactly zero there
        let got = conjectured_busy_law(params).mean();
        return CheckResult::from_error("conjectured_mean_identity", got.abs(), 0.0);
    }
    CheckResult::from_error(
        "conjectured_mean_identity",
        rel_err(
            conjectured_busy_law(params).mean(),
            busy_period_mean(params),
        ),
        1e-14,
    )
}

fn check_renewal_slope(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("renewal_slope");
    }
    let a = params.a_rate();
    let expected = params.lambda() * (-params.rho()).exp();
    let mut worst = 0.0_f64;
    let slope = |f: &dyn Fn(f64) -> f64| (f(100.0 / a) - f(50.0 / a)) / (50.0 / a);
    worst = worst.max(rel_err(
        slope(&|t| renewal_function_paper(params, t).unwrap()),
        expected,
    ));
    for conv in [
        RenewalConvention::OrdinaryCycleStart,
        RenewalConvention::DelayedIdleStart,
    ] {
        worst = worst.max(rel_err(
            slope(&|t| renewal_oracle(params, t, conv).unwrap()),
            expected,
        ));
    }
    CheckResult::from_error("renewal_slope", worst, 1e-6)
}

fn check_renewal_gap_constant(params: &ServiceLawParams) -> CheckResult {
    if params.is_degenerate() {
        return CheckResult::skipped("renewal_constant_gap");
    }
    let gap = renewal_constant_gap(params).unwrap();
    let mut worst = 0.0_f64;
    for &t in &[0.0, 1.0 / params.a_rate(), 60.0 / params.a_rate()] {
        let diff = renewal_function_paper(params, t).unwrap()
            - renewal_oracle(params, t, RenewalConvention::OrdinaryCycleStart).unwrap();
        worst = worst.max((diff - gap).abs());
    }
    CheckResult::from_error("renewal_constant_gap", worst, 1e-12)
}

pub fn all_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.status != CheckStatus::Fail)
}
