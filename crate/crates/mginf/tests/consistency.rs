//! Cross-module consistency through the public API: the same quantities
//! reached by independent routes must coincide.

use mginf::busy_analytics::{
    busy_cycle_mean, busy_period_mean, conjectured_busy_law, laplace_conjectured,
    modified_peakedness_busy, modified_peakedness_cycle, peakedness_busy, peakedness_cycle,
};
use mginf::moments::{moment_bounds, moment_quadrature};
use mginf::simulator::{estimate_stats, simulate_cycles, SimConfig};
use mginf::ServiceLawParams;

fn grid() -> Vec<ServiceLawParams> {
    let mut out = Vec::new();
    for &lambda in &[0.5, 1.0, 2.0] {
        for i in 1..=6 {
            for &p in &[0.0, 0.3, 0.6] {
                for &frac in &[0.25, 0.75, 1.0] {
                    out.push(
                        ServiceLawParams::from_beta_fraction(lambda, 0.45 * i as f64, frac, p)
                            .unwrap(),
                    );
                }
            }
        }
    }
    out
}

#[test]
fn busy_mean_equals_first_moment_bound_upper() {
    // the n = 1 upper bound coincides with the busy-period mean
    for params in grid() {
        let b = moment_bounds(&params, 1).unwrap();
        let mean = busy_period_mean(&params);
        assert!(
            (b.upper - mean).abs() <= 1e-14 * mean,
            "upper {} vs busy mean {mean}",
            b.upper
        );
    }
}

#[test]
fn cycle_is_idle_plus_busy_everywhere() {
    for params in grid() {
        let cycle = busy_cycle_mean(&params);
        let sum = 1.0 / params.lambda() + busy_period_mean(&params);
        assert!((cycle - sum).abs() <= 1e-14 * cycle);
    }
}

#[test]
fn modified_peakedness_relations_hold() {
    for params in grid() {
        let rho = params.rho();
        let qi = modified_peakedness_busy(&params);
        let expect = peakedness_busy(&params) * rho / (rho.exp() - rho - 1.0) + 1.0;
        assert!((qi - expect).abs() <= 1e-14 * expect.abs());
        let qic = modified_peakedness_cycle(&params);
        let expect = peakedness_cycle(&params) * rho / (rho.exp() - rho) + 1.0;
        assert!((qic - expect).abs() <= 1e-14 * expect.abs());
    }
}

#[test]
fn transform_at_zero_and_infinity_bracket_peakedness() {
    // the transform decreases in s: value 1 at s = 0, atom as s -> inf;
    // the peakedness sits strictly between except at the degenerate point
    for params in grid() {
        let law = conjectured_busy_law(&params);
        let pi = peakedness_busy(&params);
        assert!(pi <= 1.0 + 1e-15);
        assert!(pi >= law.atom_mass - 1e-15);
        assert!((laplace_conjectured(&params, 0.0) - 1.0).abs() == 0.0);
        assert!((laplace_conjectured(&params, 1e12) - law.atom_mass).abs() < 1e-9);
    }
}

#[test]
fn simulated_second_moment_sits_in_the_analytic_bounds() {
    // the service-law bounds must contain the Monte Carlo service moment;
    // services are recovered from the sampler the simulator uses
    use rand::SeedableRng;
    let params = ServiceLawParams::new(1.0, 0.8, 0.1, 0.2).unwrap();
    let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(77);
    let n = 200_000;
    let mut m2 = 0.0;
    for _ in 0..n {
        let x = params.sample(&mut rng);
        m2 += x * x;
    }
    m2 /= n as f64;
    let b = moment_bounds(&params, 2).unwrap();
    let q = moment_quadrature(&params, 2).unwrap();
    assert!(b.lower <= q.value && q.value <= b.upper);
    // crude 4-sigma window around the quadrature value
    assert!(
        (m2 - q.value).abs() < 0.05,
        "sampled m2 {m2} vs {}",
        q.value
    );
}

#[test]
fn peakedness_matches_monte_carlo_on_a_non_base_point() {
    let params = ServiceLawParams::new(2.0, 1.2, -0.8, 0.4).unwrap();
    let config = SimConfig {
        params,
        n_cycles: 50_000,
        replications: 4,
        master_seed: 1234,
        renewal: None,
    };
    let stats = estimate_stats(&simulate_cycles(&config), &params).unwrap();
    let pi = peakedness_busy(&params);
    assert!(
        (stats.lt_busy_at_inv_alpha.value - pi).abs() < 3.0 * stats.lt_busy_at_inv_alpha.se,
        "lt {} vs pi {pi}",
        stats.lt_busy_at_inv_alpha.value
    );
    let mean = conjectured_busy_law(&params).mean();
    assert!((stats.mean_busy.value - mean).abs() < 3.0 * stats.mean_busy.se);
    assert!(stats.ks.unwrap().pass);
}
