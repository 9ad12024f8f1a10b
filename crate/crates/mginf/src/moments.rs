//! Service-time moments `E[T^n]` by four routes.
//!
//! The family's moments are awkward to evaluate directly, so the module
//! offers complementary estimators with explicit error accounting:
//!
//! - [`moment_bounds`] — closed-form lower/upper bounds,
//!   `(1 - e^{-rho}) e^{-rho} n! / (lambda A^{n-1}) <= E[T^n] <= (e^rho - 1) n! / (lambda A^{n-1})`,
//!   which also prove the moments exist for `beta > -lambda`.
//! - [`moment_series`] — the convergent series, valid for `rho < ln 2`:
//!   `E[T^n] = -(A/lambda) n! sum_{k>=1} (1 - e^rho)^k / (k^n A^n)`,
//!   truncated with a rigorous geometric tail bound.
//! - [`moment_grid`] — the grid sum
//!   `E_m^n = sum_k (k/m)^n (G(k/m) - G((k-1)/m))`, an upper
//!   Riemann-Stieltjes approximation that converges from above as the grid
//!   density `m` grows.
//! - [`moment_quadrature`] — adaptive quadrature of
//!   `n integral t^{n-1} (1 - G(t)) dt`, the reference the other routes are
//!   judged against (target 1e-10 relative).
//!
//! For `n = 1` every route must reproduce `alpha = rho / lambda` exactly; at
//! `beta = -lambda` all moments are zero and the closed-form routes reject
//! the parameter point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::service_law::ServiceLawParams;

/// How a [`MomentEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Series,
    Grid,
    Quadrature,
    BoundsMidpoint,
}

/// A moment value with its provenance and a guaranteed absolute error bound
/// where one exists (`None` for the grid route, whose truncation error is
/// quantified only through the tail tolerance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub n: u32,
    pub value: f64,
    pub method: MomentMethod,
    pub error_bound: Option<f64>,
    /// Series terms, grid points, or quadrature evaluations used.
    pub truncation: usize,
}

/// Closed-form enclosure of `E[T^n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
}

impl MomentBounds {
    /// Interval midpoint packaged as an estimate, with the half-width as its
    /// error bound.
    pub fn midpoint_estimate(&self) -> MomentEstimate {
        MomentEstimate {
            n: self.n,
            value: 0.5 * (self.lower + self.upper),
            method: MomentMethod::BoundsMidpoint,
            error_bound: Some(0.5 * (self.upper - self.lower)),
            truncation: 0,
        }
    }
}

/// Truncation lengths for the moment series.
///
/// `rigorous` is the smallest `M` whose geometric tail bound
/// `(A/lambda) n! |x|^{M+1} / (A^n (M+1)^n (1 - |x|)) <= eps` (with
/// `x = 1 - e^rho`) and is what [`moment_series`] is governed by. `paper_a`
/// and `paper_b` evaluate two historical truncation conditions for reference:
/// `paper_a = max(0, ceil(1/A - 1))` and `paper_b` the base-`(e^rho - 1)`
/// logarithm condition as printed in the source material, whose exponent is
/// ambiguous there; it is computed best-effort with exponent one and should
/// be treated as unverified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationLengths {
    pub rigorous: usize,
    pub paper_a: usize,
    pub paper_b: usize,
}

const MAX_SERIES_TERMS: usize = 100_000_000;

/// Exact factorial for n <= 18 (the last range where every product step is
/// integer-exact in f64).
fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `n! / base^pow`, switching to log-space when the exact path would
/// overflow or underflow pairwise (large n, extreme base).
fn factorial_over_power(n: u32, base: f64, pow: i32) -> f64 {
    if n <= 18 {
        let denom = base.powi(pow);
        if denom.is_normal() {
            let r = factorial(n) / denom;
            if r.is_finite() {
                return r;
            }
        }
    }
    (ln_factorial(n) - pow as f64 * base.ln()).exp()
}

/// Closed-form bounds on `E[T^n]`; rejects the degenerate point
/// `beta = -lambda`, where all moments vanish.
pub fn moment_bounds(params: &ServiceLawParams, n: u32) -> Result<MomentBounds> {
    assert!(n >= 1, "moment order must be at least 1");
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    let a = params.a_rate();
    let exp_neg_rho = (-params.rho()).exp();
    let one_minus = -(-params.rho()).exp_m1();
    let scale = factorial_over_power(n, a, n as i32 - 1);
    Ok(MomentBounds {
        n,
        lower: one_minus * exp_neg_rho / params.lambda() * scale,
        upper: params.rho().exp_m1() / params.lambda() * scale,
    })
}

/// Bounds on `VAR[T]` derived from the second-moment enclosure: the lower
/// end is clamped at zero, the upper end `upper_2 - alpha^2` is nonnegative
/// because `upper_2 >= E[T^2] >= alpha^2`.
pub fn variance_bounds(params: &ServiceLawParams) -> Result<(f64, f64)> {
    let b = moment_bounds(params, 2)?;
    let a2 = params.alpha() * params.alpha();
    Ok(((b.lower - a2).max(0.0), b.upper - a2))
}

/// Truncation lengths for [`moment_series`] at absolute tolerance `eps`.
pub fn truncation_length(params: &ServiceLawParams, n: u32, eps: f64) -> Result<TruncationLengths> {
    assert!(n >= 1, "moment order must be at least 1");
    assert!(eps > 0.0, "eps must be positive");
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    if params.rho() >= std::f64::consts::LN_2 {
        return Err(Error::RhoTooLarge(params.rho()));
    }
    let a = params.a_rate();
    let x_abs = params.rho().exp_m1(); // |1 - e^rho| = e^rho - 1, < 1 here
    let scale = factorial_over_power(n, a, n as i32) * (a / params.lambda());

    let mut rigorous = 0usize;
    let mut xp = x_abs; // |x|^{M+1}
    loop {
        let bound = scale * xp / (((rigorous + 1) as f64).powi(n as i32) * (1.0 - x_abs));
        if bound <= eps || rigorous >= MAX_SERIES_TERMS {
            break;
        }
        rigorous += 1;
        xp *= x_abs;
    }

    let paper_a = (1.0 / a - 1.0).ceil().max(0.0) as usize;

    // log base (e^rho - 1) of (eps e^rho lambda / (n! A)), minus one.
    let ln_arg = eps.ln() + params.rho() + params.lambda().ln() - ln_factorial(n) - a.ln();
    let paper_b_real = ln_arg / x_abs.ln() - 1.0;
    let paper_b = if paper_b_real.is_finite() {
        (paper_b_real.ceil().max(0.0) as usize).min(MAX_SERIES_TERMS)
    } else {
        0
    };

    Ok(TruncationLengths {
        rigorous,
        paper_a,
        paper_b,
    })
}

/// Series estimate of `E[T^n]`, valid for `rho < ln 2`.
///
/// The truncation length is the maximum of the three lengths reported by
/// [`truncation_length`], so the reported `error_bound` (the rigorous
/// geometric tail at the length actually used) never exceeds `eps`.
pub fn moment_series(params: &ServiceLawParams, n: u32, eps: f64) -> Result<MomentEstimate> {
    let lengths = truncation_length(params, n, eps)?;
    let m = lengths.rigorous.max(lengths.paper_a).max(lengths.paper_b);
    let a = params.a_rate();
    let x = -params.rho().exp_m1(); // 1 - e^rho, negative
    let scale = factorial_over_power(n, a, n as i32);
    let mut sum = 0.0;
    let mut xp = 1.0;
    for k in 1..=m {
        xp *= x;
        sum += xp / (k as f64).powi(n as i32);
    }
    let value = -(a / params.lambda()) * scale * sum;
    let tail = (a / params.lambda()) * scale * x.abs().powi(m as i32 + 1)
        / (((m + 1) as f64).powi(n as i32) * (1.0 - x.abs()));
    Ok(MomentEstimate {
        n,
        value,
        method: MomentMethod::Series,
        error_bound: Some(tail),
        truncation: m,
    })
}

/// Grid approximation `E_m^n` with spacing `1/m`.
///
/// The sum is truncated at the first grid point `K/m` past `20/A` where the
/// survival mass drops below `tail_tol`; `truncation` reports `K`. Being an
/// upper Riemann-Stieltjes sum of an increasing integrand, the value sits
/// above the true moment up to the neglected tail. The degenerate point
/// returns 0, the exact value of every moment there.
pub fn moment_grid(params: &ServiceLawParams, n: u32, m: u32, tail_tol: f64) -> MomentEstimate {
    assert!(n >= 1, "moment order must be at least 1");
    assert!(m >= 1, "grid density must be at least 1");
    assert!(
        tail_tol > 0.0 && tail_tol < 1.0,
        "tail_tol must lie in (0, 1)"
    );
    if params.is_degenerate() {
        return MomentEstimate {
            n,
            value: 0.0,
            method: MomentMethod::Grid,
            error_bound: None,
            truncation: 0,
        };
    }
    let t_floor = 20.0 / params.a_rate();
    let mut sum = 0.0;
    let mut prev_g = params.atom();
    let mut k = 0u64;
    loop {
        k += 1;
        let t = k as f64 / m as f64;
        let g = params.cdf(t);
        sum += t.powi(n as i32) * (g - prev_g);
        prev_g = g;
        if (1.0 - g < tail_tol && t >= t_floor) || k >= 2_000_000_000 {
            break;
        }
    }
    MomentEstimate {
        n,
        value: sum,
        method: MomentMethod::Grid,
        error_bound: None,
        truncation: k as usize,
    }
}

/// Quadrature estimate of `E[T^n] = n integral_0^inf t^{n-1} (1 - G(t)) dt`.
///
/// Adaptive Simpson on `[0, T]` with `A T = 60 + 10 n`, plus an analytic
/// bound on the discarded exponential tail; both contributions enter the
/// reported `error_bound`. This is the arbiter route: it needs no
/// convergence condition and targets 1e-10 relative accuracy.
pub fn moment_quadrature(params: &ServiceLawParams, n: u32) -> Result<MomentEstimate> {
    assert!(n >= 1, "moment order must be at least 1");
    if params.is_degenerate() {
        return Err(Error::DegenerateParameter);
    }
    let a = params.a_rate();
    let t_cut = (60.0 + 10.0 * n as f64) / a;
    let bounds = moment_bounds(params, n)?;
    let tol = (1e-13 * bounds.upper).max(f64::MIN_POSITIVE * 1e16);
    let nf = n as f64;
    let law = *params;
    let integrand = move |t: f64| nf * t.powi(n as i32 - 1) * law.survival(t);
    let (value, err, evals) = adaptive_simpson(&integrand, 0.0, t_cut, tol);
    let tail = quadrature_tail_bound(params, n, t_cut);
    Ok(MomentEstimate {
        n,
        value,
        method: MomentMethod::Quadrature,
        error_bound: Some(err + tail),
        truncation: evals,
    })
}

/// Bound on `n integral_T^inf t^{n-1} S(t) dt` using
/// `S(t) <= (e^rho - 1)(A/lambda) e^{-At}`:
/// `n (e^rho - 1) (A/lambda) (n-1)! / A^n * e^{-AT} sum_{j<n} (AT)^j / j!`.
fn quadrature_tail_bound(params: &ServiceLawParams, n: u32, t_cut: f64) -> f64 {
    let a = params.a_rate();
    let at = a * t_cut;
    let mut poisson_partial = 0.0;
    let mut term = (-at).exp();
    for j in 0..n {
        poisson_partial += term;
        term *= at / (j + 1) as f64;
    }
    let front = n as f64 * params.rho().exp_m1() * (a / params.lambda());
    front * factorial_over_power(n - 1, a, n as i32) * poisson_partial
}

/// Adaptive Simpson with Richardson extrapolation. Returns the integral, an
/// accumulated error estimate, and the number of integrand evaluations.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64, usize) {
    const INITIAL_PANELS: usize = 16;
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut evals = 0usize;
    let h = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let lo = a + i as f64 * h;
        let hi = lo + h;
        let mid = 0.5 * (lo + hi);
        let flo = f(lo);
        let fmid = f(mid);
        let fhi = f(hi);
        evals += 3;
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        let (v, e) = simpson_step(
            f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            tol / INITIAL_PANELS as f64,
            50,
            &mut evals,
        );
        total += v;
        err_total += e;
    }
    (total, err_total, evals)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (lv, le) = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, evals);
    let (rv, re) = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, evals);
    (lv + rv, le + re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, rho: f64, beta: f64, p: f64) -> ServiceLawParams {
        ServiceLawParams::new(lambda, rho, beta, p).unwrap()
    }

    fn base() -> ServiceLawParams {
        params(1.0, 1.0, 0.0, 0.0)
    }

    #[test]
    fn bounds_frozen_values() {
        // n = 2 at (1, 0.5, 0, 0): [2 (e^{-1/2} - e^{-1}), 2 (e^{1/2} - 1)]
        let b = moment_bounds(&params(1.0, 0.5, 0.0, 0.0), 2).unwrap();
        assert!((b.lower - 0.4773024370823822).abs() < 1e-15);
        assert!((b.upper - 1.2974425414002563).abs() < 1e-15);

        let b = moment_bounds(&base(), 2).unwrap();
        assert!((b.lower - 0.4650883158696593).abs() < 1e-15);
        assert!((b.upper - 3.43656365691809).abs() < 1e-14);
    }

    #[test]
    fn bounds_upper_for_n1_is_busy_period_mean() {
        for law in [base(), params(2.0, 0.7, 0.3, 0.4)] {
            let b = moment_bounds(&law, 1).unwrap();
            assert!((b.upper - law.rho().exp_m1() / law.lambda()).abs() < 1e-15);
        }
    }

    #[test]
    fn bounds_reject_degenerate() {
        let deg = params(1.0, 1.0, -1.0, 0.0);
        assert!(matches!(
            moment_bounds(&deg, 2),
            Err(Error::DegenerateParameter)
        ));
        assert!(matches!(
            variance_bounds(&deg),
            Err(Error::DegenerateParameter)
        ));
    }

    #[test]
    fn variance_bounds_values() {
        let (lo, hi) = variance_bounds(&base()).unwrap();
        assert_eq!(lo, 0.0); // 0.4651 - 1 clamps to zero
        assert!((hi - 2.43656365691809).abs() < 1e-14);

        let (lo, hi) = variance_bounds(&params(1.0, 0.5, 0.0, 0.0)).unwrap();
        assert!((lo - 0.2273024370823822).abs() < 1e-15);
        assert!((hi - 1.0474425414002563).abs() < 1e-15);
    }

    #[test]
    fn truncation_rigorous_frozen() {
        let law = params(1.0, 0.5, 0.0, 0.0);
        let t = truncation_length(&law, 2, 1e-8).unwrap();
        assert_eq!(t.rigorous, 30);
        assert_eq!(t.paper_a, 0); // A = 1
    }

    #[test]
    fn truncation_vacuous_tolerance() {
        let law = params(1.0, 0.5, 0.0, 0.0);
        let t = truncation_length(&law, 2, 1e12).unwrap();
        assert!(t.rigorous <= 1);
    }

    #[test]
    fn truncation_rejects_large_rho() {
        assert!(matches!(
            truncation_length(&base(), 2, 1e-8),
            Err(Error::RhoTooLarge(_))
        ));
        assert!(matches!(
            moment_series(&base(), 2, 1e-8),
            Err(Error::RhoTooLarge(_))
        ));
    }

    #[test]
    fn series_mean_is_alpha() {
        for law in [
            params(1.0, 0.5, 0.0, 0.0),
            params(2.0, 0.3, 0.2, 0.4),
            params(0.7, 0.69, -0.1, 0.1),
        ] {
            let est = moment_series(&law, 1, 1e-10).unwrap();
            assert!(
                (est.value - law.alpha()).abs() <= 1e-10 + est.error_bound.unwrap(),
                "series mean {} vs alpha {}",
                est.value,
                law.alpha()
            );
        }
    }

    #[test]
    fn series_second_moment_frozen() {
        // Value fixed by the quadrature oracle (and a 40-digit dilogarithm
        // evaluation): E[T^2] = -2 Li_2(1 - e^{1/2}).
        let est = moment_series(&params(1.0, 0.5, 0.0, 0.0), 2, 1e-8).unwrap();
        assert!(
            (est.value - 1.1319271567906055).abs() < 1e-8,
            "series value {}",
            est.value
        );
        assert!(est.error_bound.unwrap() <= 1e-8);
        assert!(est.truncation >= 30);
    }

    #[test]
    fn quadrature_mean_identity() {
        for law in [
            base(),
            params(2.0, 0.5, 0.2, 0.3),
            params(1.0, 3.0, -0.5, 0.0),
            params(0.5, 1.5, -0.4, 0.7),
        ] {
            let est = moment_quadrature(&law, 1).unwrap();
            assert!(
                (est.value - law.alpha()).abs() <= 1e-9 * law.alpha(),
                "quadrature mean {} vs alpha {}",
                est.value,
                law.alpha()
            );
        }
    }

    #[test]
    fn quadrature_alpha_for_scaled_params() {
        // alpha = rho / lambda = 0.25
        let est = moment_quadrature(&params(2.0, 0.5, 0.2, 0.3), 1).unwrap();
        assert!((est.value - 0.25).abs() < 1e-9);
    }

    #[test]
    fn series_and_quadrature_agree_within_bounds() {
        for (n, law) in [
            (2, params(1.0, 0.5, 0.0, 0.0)),
            (3, params(1.0, 0.3, 0.1, 0.2)),
            (4, params(2.0, 0.69, -0.4, 0.5)),
        ] {
            let s = moment_series(&law, n, 1e-9).unwrap();
            let q = moment_quadrature(&law, n).unwrap();
            let tol = s.error_bound.unwrap() + q.error_bound.unwrap();
            assert!(
                (s.value - q.value).abs() <= tol,
                "n={n}: series {} quad {} tol {tol}",
                s.value,
                q.value
            );
        }
    }

    #[test]
    fn quadrature_within_closed_form_bounds() {
        for law in [base(), params(1.5, 2.0, -0.3, 0.3)] {
            for n in 1..=6 {
                let b = moment_bounds(&law, n).unwrap();
                let q = moment_quadrature(&law, n).unwrap();
                assert!(
                    b.lower <= q.value && q.value <= b.upper,
                    "n={n}: {} not in [{}, {}]",
                    q.value,
                    b.lower,
                    b.upper
                );
            }
        }
    }

    #[test]
    fn grid_unit_density_frozen() {
        // Brute-force oracle: E_1^1 = sum_{j>=0} (1 - G(j)), summed until the
        // survival drops below 1e-16.
        let law = base();
        let mut oracle = 0.0;
        let mut j = 0;
        loop {
            let s = law.survival(j as f64);
            oracle += s;
            j += 1;
            if s < 1e-16 {
                break;
            }
        }
        assert!(
            (oracle - 1.3355706560539529).abs() < 1e-12,
            "oracle {oracle}"
        );
        let est = moment_grid(&law, 1, 1, 1e-9);
        assert!(
            (est.value - oracle).abs() < 1e-3,
            "grid {} vs oracle {oracle}",
            est.value
        );
        assert!(est.value >= law.alpha());
        assert!(est.error_bound.is_none());
    }

    #[test]
    fn grid_converges_from_above() {
        let law = base();
        let tail_tol = 1e-9;
        let mut prev = f64::INFINITY;
        let mut m = 1u32;
        while m <= 4096 {
            let est = moment_grid(&law, 1, m, tail_tol);
            assert!(
                est.value <= prev + 1e-9,
                "m={m}: {} above previous {prev}",
                est.value
            );
            assert!(est.value >= law.alpha() - tail_tol * 20.0 / law.a_rate());
            prev = est.value;
            m *= 2;
        }
        assert!((prev - law.alpha()).abs() < 1e-3, "m=4096 value {prev}");
    }

    #[test]
    fn grid_degenerate_returns_zero() {
        let est = moment_grid(&params(1.0, 1.0, -1.0, 0.0), 3, 16, 1e-9);
        assert_eq!(est.value, 0.0);
        assert_eq!(est.truncation, 0);
    }

    #[test]
    fn grid_tracks_quadrature_for_higher_moments() {
        let law = params(1.0, 0.8, 0.1, 0.2);
        let q = moment_quadrature(&law, 2).unwrap();
        let g = moment_grid(&law, 2, 4096, 1e-10);
        assert!(
            g.value + 1e-10 * (20.0 / law.a_rate()).powi(2) >= q.value,
            "upper-sum property violated: grid {} quad {}",
            g.value,
            q.value
        );
        assert!((g.value - q.value).abs() < 1e-3);
    }

    #[test]
    fn midpoint_estimate_carries_half_width() {
        let b = moment_bounds(&base(), 2).unwrap();
        let est = b.midpoint_estimate();
        assert!((est.value - 0.5 * (b.lower + b.upper)).abs() < 1e-16);
        assert!((est.error_bound.unwrap() - 0.5 * (b.upper - b.lower)).abs() < 1e-16);
    }

    #[test]
    fn factorial_log_space_is_consistent() {
        // both branches around the n = 18 cutoff
        let exact = factorial_over_power(18, 1.5, 18);
        let logged = (ln_factorial(18) - 18.0 * 1.5f64.ln()).exp();
        assert!((exact - logged).abs() <= 1e-10 * exact);
        // large n stays finite
        let big = factorial_over_power(120, 0.8, 120);
        assert!(big.is_finite() && big > 0.0);
    }
}
