//! The four-parameter service-time distribution family.
//!
//! A member of the family is picked by `(lambda, rho, beta, p)` and has the
//! distribution function
//!
//! ```text
//! G(t) = 1 - (1 - e^{-rho}) (A / lambda) e^{-A t} / (e^{-rho} + (1 - e^{-rho}) e^{-A t})
//! A    = lambda + (lambda p + beta) / (1 - p) = (lambda + beta) / (1 - p)
//! ```
//!
//! for `t >= 0`, with `lambda > 0`, `rho > 0`, `0 <= p < 1` and
//! `-lambda <= beta <= beta_max`, where
//! `beta_max = lambda (e^{-rho} - p) / (1 - e^{-rho})`.
//!
//! The law carries an atom `G(0) = 1 - (1 - e^{-rho}) A / lambda` at the
//! origin and is absolutely continuous on `(0, inf)`. Every evaluation here
//! uses the survival form above, which contains only decaying exponentials
//! and therefore stays finite for arbitrarily large `t`.
//!
//! The family solves the Riccati-type hazard equation
//!
//! ```text
//! (1 - p) g(t) / (1 - G(t)) = lambda p + lambda (1 - p) G(t) + beta
//! ```
//!
//! whose coefficients depend on `(lambda, beta, p)` only; `rho` enters through
//! the integration constant. Two structural consequences are exposed as
//! operations: [`ServiceLawParams::ode_residual`] measures how well a point
//! satisfies the equation, and [`cross_ratio`] checks the projective
//! invariance of four solutions that share `(lambda, beta, p)`.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Any cross-ratio denominator factor smaller than this is treated as a
/// coincident pair of solutions.
const DISTINCT_FACTOR_MIN: f64 = 1e-300;

/// Validated parameter set with the derived quantities computed once.
///
/// `(lambda, rho, beta, p)` are the raw inputs; `alpha = rho / lambda` is the
/// mean service time, `a_rate` is the exponential rate `A`, `beta_max` the
/// admissible upper end for `beta` at this `(lambda, rho, p)`, and `atom` the
/// probability mass `G(0)` sitting at zero.
///
/// Deserializing re-runs validation on the four raw fields and recomputes the
/// derived ones, so a round-tripped value is bit-identical to the original.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ServiceLawParams {
    lambda: f64,
    rho: f64,
    beta: f64,
    p: f64,
    alpha: f64,
    a_rate: f64,
    beta_max: f64,
    atom: f64,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: f64,
    rho: f64,
    beta: f64,
    p: f64,
}

impl TryFrom<RawParams> for ServiceLawParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ServiceLawParams::new(raw.lambda, raw.rho, raw.beta, raw.p)
    }
}

impl ServiceLawParams {
    /// Validates `(lambda, rho, beta, p)` and computes the derived fields.
    ///
    /// Returns a structured error naming the first violated constraint;
    /// [`Error::BetaAboveMax`] carries the admissible `beta_max`.
    pub fn new(lambda: f64, rho: f64, beta: f64, p: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::NonPositiveRho(rho));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::POutOfRange(p));
        }
        if !beta.is_finite() || beta < -lambda {
            return Err(Error::BetaBelowMinusLambda { beta, min: -lambda });
        }
        // beta_max = lambda (1 - p e^rho) / (e^rho - 1), rewritten with
        // decaying exponentials so it stays finite for any rho.
        let exp_neg_rho = (-rho).exp();
        let one_minus_exp_neg_rho = -(-rho).exp_m1();
        let beta_max = lambda * (exp_neg_rho - p) / one_minus_exp_neg_rho;
        if beta > beta_max {
            return Err(Error::BetaAboveMax { beta, beta_max });
        }
        let a_rate = (lambda + beta) / (1.0 - p);
        let alpha = rho / lambda;
        let atom = (1.0 - one_minus_exp_neg_rho * a_rate / lambda).clamp(0.0, 1.0);
        Ok(Self {
            lambda,
            rho,
            beta,
            p,
            alpha,
            a_rate,
            beta_max,
            atom,
        })
    }

    /// Builds the law with `beta` given as a fraction of the admissible
    /// interval `[-lambda, beta_max]`: 0 maps to the degenerate boundary,
    /// 1 to `beta_max` (atom-free). Useful for parameter sweeps, where
    /// `beta_max` itself moves with `(rho, p)`.
    pub fn from_beta_fraction(lambda: f64, rho: f64, fraction: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::POutOfRange(fraction));
        }
        let probe = Self::new(lambda, rho, -lambda, p)?;
        let beta = (-lambda + fraction * (probe.beta_max() + lambda)).min(probe.beta_max());
        Self::new(lambda, rho, beta, p)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Mean service time `alpha = rho / lambda`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponential rate `A = (lambda + beta) / (1 - p)`.
    pub fn a_rate(&self) -> f64 {
        self.a_rate
    }

    /// Largest admissible `beta` for this `(lambda, rho, p)`.
    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Probability mass at zero, `G(0)`.
    pub fn atom(&self) -> f64 {
        self.atom
    }

    /// True at the lower boundary `beta = -lambda`, where the law collapses
    /// to a point mass at zero (`A = 0`, `atom = 1`).
    pub fn is_degenerate(&self) -> bool {
        self.a_rate == 0.0
    }

    /// Survival function `S(t) = 1 - G(t)`.
    ///
    /// Evaluated as `(1 - e^{-rho}) (A/lambda) e^{-At} / (e^{-rho} + (1 - e^{-rho}) e^{-At})`;
    /// only decaying exponentials appear, so the value is finite for any `t`.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        let exp_neg_rho = (-self.rho).exp();
        let one_minus = -(-self.rho).exp_m1();
        let e = (-self.a_rate * t).exp();
        one_minus * (self.a_rate / self.lambda) * e / (exp_neg_rho + one_minus * e)
    }

    /// Distribution function `G(t)`.
    ///
    /// `t < 0` returns 0 by convention; `G(0)` is exactly [`atom`](Self::atom).
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            return self.atom;
        }
        1.0 - self.survival(t)
    }

    /// Density of the absolutely continuous part,
    /// `g(t) = (1 - e^{-rho}) e^{-rho} (A^2/lambda) e^{-At} / (e^{-rho} + (1 - e^{-rho}) e^{-At})^2`.
    ///
    /// `t = 0` returns the right-limit `g(0+)`; the atom at zero is not part
    /// of the density, so the density integrates to `1 - atom`.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        if self.is_degenerate() {
            return Err(Error::DegenerateParameter);
        }
        if t < 0.0 {
            return Ok(0.0);
        }
        let exp_neg_rho = (-self.rho).exp();
        let one_minus = -(-self.rho).exp_m1();
        let e = (-self.a_rate * t).exp();
        let denom = exp_neg_rho + one_minus * e;
        Ok(one_minus * exp_neg_rho * self.a_rate * self.a_rate * e / (self.lambda * denom * denom))
    }

    /// Quantile function (generalized inverse of the distribution function).
    ///
    /// Returns 0 for `u <= atom`; otherwise inverts the survival form in
    /// closed form:
    ///
    /// ```text
    /// t = (rho + ln(e^{-rho} + c/(1 - u) - 1)) / A,   c = (1 - e^{-rho}) A / lambda
    /// ```
    ///
    /// which equals `(1/A) ln(1 + e^rho (c/(1-u) - 1))` but cannot overflow
    /// for large `rho`. The degenerate law returns 0 for every `u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::UOutOfRange(u));
        }
        if self.is_degenerate() || u <= self.atom {
            return Ok(0.0);
        }
        let one_minus = -(-self.rho).exp_m1();
        let c = one_minus * self.a_rate / self.lambda;
        let w = c / (1.0 - u) - 1.0;
        let t = (self.rho + ((-self.rho).exp() + w).ln()) / self.a_rate;
        Ok(t.max(0.0))
    }

    /// Inverse-transform sample: one uniform draw from `rng`, mapped through
    /// [`quantile`](Self::quantile). Deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u).expect("uniform draw lies in [0, 1)")
    }

    /// Residual of the hazard-rate differential equation the family solves:
    ///
    /// ```text
    /// (1 - p) g(t) / (1 - G(t)) - lambda p - lambda (1 - p) G(t) - beta
    /// ```
    ///
    /// Zero up to rounding for every member of the family; the crate-wide
    /// contract is `|residual| <= 1e-8 (lambda + |beta|)` on `[0, 20/A]`.
    pub fn ode_residual(&self, t: f64) -> Result<f64> {
        let g = self.pdf(t)?;
        let s = self.survival(t.max(0.0));
        let big_g = 1.0 - s;
        Ok((1.0 - self.p) * g / s
            - self.lambda * self.p
            - self.lambda * (1.0 - self.p) * big_g
            - self.beta)
    }

    /// Partial sum of the geometric series expansion of `G(t)`,
    ///
    /// ```text
    /// G(t) = (1 + (lambda p + beta)/(lambda (1 - p)) (1 - e^rho) e^{-At})
    ///        * sum_{k>=0} ((1 - e^rho) e^{-At})^k
    /// ```
    ///
    /// truncated after the `k = k_terms` term. Valid while the ratio
    /// `(e^rho - 1) e^{-At}` stays below one: at `t = 0` that is `rho < ln 2`,
    /// and for `t > 0` the weaker decayed condition suffices. The reported
    /// `error_bound` is the geometric tail bound and always dominates the
    /// true truncation error.
    pub fn series_cdf_partial(&self, t: f64, k_terms: usize) -> Result<SeriesCdf> {
        let x = -self.rho.exp_m1(); // 1 - e^rho, negative
        let e = (-self.a_rate * t).exp();
        let ratio = -x * e;
        if ratio >= 1.0 {
            return Err(Error::SeriesDiverges(ratio));
        }
        let coeff = self.a_rate / self.lambda - 1.0; // (lambda p + beta) / (lambda (1 - p))
        let prefactor = 1.0 + coeff * x * e;
        let step = x * e;
        let mut sum = 0.0;
        let mut term = 1.0;
        for _ in 0..=k_terms {
            sum += term;
            term *= step;
        }
        let error_bound = prefactor.abs() * term.abs() / (1.0 - ratio);
        Ok(SeriesCdf {
            value: prefactor * sum,
            error_bound,
            terms: k_terms + 1,
        })
    }
}

/// Result of [`ServiceLawParams::series_cdf_partial`]: the partial sum and a
/// rigorous bound on its distance from the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCdf {
    pub value: f64,
    pub error_bound: f64,
    /// Number of series terms summed (`k_terms + 1`).
    pub terms: usize,
}

/// Both sides of the cross-ratio identity for four solutions sharing
/// `(lambda, beta, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossRatio {
    pub lhs: f64,
    pub rhs: f64,
}

/// Cross-ratio of four family members `G_1..G_4` that share
/// `(lambda, beta, p)` and differ only in `rho`.
///
/// Because all four solve the same Riccati-type hazard equation, the
/// projective cross-ratio of their values at any `t`,
///
/// ```text
/// lhs = (G4 - G2)(G3 - G1) / ((G4 - G1)(G3 - G2)),
/// ```
///
/// is independent of `t` and equals the same cross-ratio of the constants
/// `e^{-rho_i}`:
///
/// ```text
/// rhs = (e^{-rho_4} - e^{-rho_2})(e^{-rho_3} - e^{-rho_1})
///     / ((e^{-rho_4} - e^{-rho_1})(e^{-rho_3} - e^{-rho_2})).
/// ```
///
/// `beta` must be admissible for every `rho_i` (the admissible range shrinks
/// as `rho` grows); the `rho_i` must be pairwise distinct and the denominator
/// factors at `t` must stay above an underflow floor, otherwise
/// [`Error::IndistinctSolutions`] is returned.
pub fn cross_ratio(lambda: f64, beta: f64, p: f64, rhos: [f64; 4], t: f64) -> Result<CrossRatio> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if rhos[i] == rhos[j] {
                return Err(Error::IndistinctSolutions(format!(
                    "rho_{} = rho_{} = {}",
                    i + 1,
                    j + 1,
                    rhos[i]
                )));
            }
        }
    }
    let mut s = [0.0_f64; 4];
    let mut x = [0.0_f64; 4];
    for (i, &rho_i) in rhos.iter().enumerate() {
        let params = ServiceLawParams::new(lambda, rho_i, beta, p).map_err(|e| match e {
            Error::BetaAboveMax { beta, beta_max }
            | Error::BetaBelowMinusLambda {
                beta,
                min: beta_max,
            } => Error::BetaInadmissible {
                beta,
                rho: rho_i,
                beta_max,
            },
            other => other,
        })?;
        s[i] = params.survival(t);
        x[i] = (-rho_i).exp();
    }
    // G_i - G_j = S_j - S_i; differencing the survival values keeps full
    // relative precision at large t, where every G_i is within rounding of 1.
    let den_factors = [
        ("G4 - G1", s[0] - s[3]),
        ("G3 - G2", s[1] - s[2]),
        ("exp(-rho_4) - exp(-rho_1)", x[3] - x[0]),
        ("exp(-rho_3) - exp(-rho_2)", x[2] - x[1]),
    ];
    for (name, v) in den_factors {
        if v.abs() < DISTINCT_FACTOR_MIN {
            return Err(Error::IndistinctSolutions(format!(
                "denominator factor {name} = {v:e}"
            )));
        }
    }
    let lhs = ((s[1] - s[3]) * (s[0] - s[2])) / ((s[0] - s[3]) * (s[1] - s[2]));
    let rhs = ((x[3] - x[1]) * (x[2] - x[0])) / ((x[3] - x[0]) * (x[2] - x[1]));
    Ok(CrossRatio { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64Mcg;

    const E_NEG_1: f64 = 0.36787944117144233;

    fn base() -> ServiceLawParams {
        ServiceLawParams::new(1.0, 1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn validate_base_derived_quantities() {
        let p = base();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.a_rate(), 1.0);
        // beta_max = 1/(e - 1); atom = e^{-1}
        assert!((p.beta_max() - 0.5819767068693264).abs() < 1e-15);
        assert!((p.atom() - E_NEG_1).abs() < 1e-16);
    }

    #[test]
    fn validate_degenerate_boundary() {
        let p = ServiceLawParams::new(1.0, 1.0, -1.0, 0.0).unwrap();
        assert_eq!(p.a_rate(), 0.0);
        assert_eq!(p.atom(), 1.0);
        assert!(p.is_degenerate());
    }

    #[test]
    fn validate_rejects_beta_above_max() {
        let err = ServiceLawParams::new(1.0, 1.0, 0.6, 0.0).unwrap_err();
        match err {
            Error::BetaAboveMax { beta, beta_max } => {
                assert_eq!(beta, 0.6);
                assert!((beta_max - 0.5819767068693264).abs() < 1e-12);
            }
            other => panic!("expected BetaAboveMax, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_out_of_range_inputs() {
        assert!(matches!(
            ServiceLawParams::new(0.0, 1.0, 0.0, 0.0),
            Err(Error::NonPositiveLambda(_))
        ));
        assert!(matches!(
            ServiceLawParams::new(1.0, -1.0, 0.0, 0.0),
            Err(Error::NonPositiveRho(_))
        ));
        assert!(matches!(
            ServiceLawParams::new(1.0, 1.0, 0.0, 1.0),
            Err(Error::POutOfRange(_))
        ));
        assert!(matches!(
            ServiceLawParams::new(1.0, 1.0, -1.5, 0.0),
            Err(Error::BetaBelowMinusLambda { .. })
        ));
        assert!(matches!(
            ServiceLawParams::new(f64::NAN, 1.0, 0.0, 0.0),
            Err(Error::NonPositiveLambda(_))
        ));
    }

    #[test]
    fn a_rate_two_forms_agree() {
        for &(lambda, rho, beta, p) in &[
            (1.0, 1.0, 0.2, 0.2),
            (2.0, 0.5, -0.7, 0.6),
            (0.5, 2.0, 0.01, 0.1),
        ] {
            let params = ServiceLawParams::new(lambda, rho, beta, p).unwrap();
            let direct = lambda + (lambda * p + beta) / (1.0 - p);
            assert!(
                (params.a_rate() - direct).abs() <= 1e-15 * direct.abs().max(1.0),
                "A mismatch at ({lambda},{rho},{beta},{p})"
            );
        }
    }

    #[test]
    fn cdf_at_zero_is_atom_exactly() {
        let p = base();
        assert_eq!(p.cdf(0.0), p.atom());
        assert_eq!(p.cdf(-1.0), 0.0);
    }

    #[test]
    fn cdf_frozen_value_at_one() {
        // Independent route: the raw closed form with a positive exponential,
        // G(t) = 1 - (1 - e^{-rho}) A / (lambda e^{-rho} (e^{At} - 1) + lambda).
        let p = base();
        let raw = 1.0 - (1.0 - E_NEG_1) / (E_NEG_1 * (1f64.exp() - 1.0) + 1.0);
        assert!((p.cdf(1.0) - raw).abs() < 1e-15);
        assert!((p.cdf(1.0) - 0.612699836780282).abs() < 1e-15);
    }

    #[test]
    fn cdf_tends_to_one() {
        for &(lambda, rho, beta, p) in &[(1.0, 1.0, 0.0, 0.0), (2.0, 0.5, 0.2, 0.3)] {
            let params = ServiceLawParams::new(lambda, rho, beta, p).unwrap();
            assert!((params.cdf(1e4 / params.a_rate()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_survives_extreme_t_without_overflow() {
        let p = base();
        let t = 1e6 / p.a_rate();
        assert_eq!(p.cdf(t), 1.0);
        assert_eq!(p.pdf(t).unwrap(), 0.0);
        assert!(p.survival(t) == 0.0);
    }

    #[test]
    fn degenerate_law_is_point_mass() {
        let p = ServiceLawParams::new(1.0, 1.0, -1.0, 0.0).unwrap();
        for &t in &[0.0, 0.5, 3.0, 1e6] {
            assert_eq!(p.cdf(t), 1.0);
        }
        assert!(matches!(p.pdf(1.0), Err(Error::DegenerateParameter)));
        assert_eq!(p.quantile(0.9999).unwrap(), 0.0);
    }

    #[test]
    fn pdf_right_limit_at_zero() {
        let p = base();
        // g(0+) = (1 - e^{-1}) e^{-1}
        let expected = (1.0 - E_NEG_1) * E_NEG_1;
        assert!((p.pdf(0.0).unwrap() - expected).abs() < 1e-16);
        assert_eq!(p.pdf(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn pdf_integrates_to_continuous_mass() {
        // Composite-Simpson oracle, independent of the quadrature used by the
        // moments module.
        for &(lambda, rho, beta, p) in &[
            (1.0, 1.0, 0.0, 0.0),
            (1.0, 0.5, 0.1, 0.2),
            (2.0, 2.0, -1.0, 0.4),
        ] {
            let params = ServiceLawParams::new(lambda, rho, beta, p).unwrap();
            let t_max = 60.0 / params.a_rate();
            let n = 200_000;
            let h = t_max / n as f64;
            let mut sum = params.pdf(0.0).unwrap() + params.pdf(t_max).unwrap();
            for i in 1..n {
                let w = if i % 2 == 0 { 2.0 } else { 4.0 };
                sum += w * params.pdf(i as f64 * h).unwrap();
            }
            let integral = sum * h / 3.0;
            assert!(
                (integral - (1.0 - params.atom())).abs() < 1e-8,
                "pdf integral {integral} vs {} at ({lambda},{rho},{beta},{p})",
                1.0 - params.atom()
            );
        }
    }

    #[test]
    fn hazard_identity_at_origin() {
        let p = base();
        let g0 = p.pdf(0.0).unwrap();
        let s0 = 1.0 - p.atom();
        assert!((g0 / s0 - p.lambda() * p.cdf(0.0)).abs() < 1e-15);
    }

    #[test]
    fn quantile_below_atom_is_zero() {
        let p = base();
        assert_eq!(p.quantile(0.2).unwrap(), 0.0);
        assert_eq!(p.quantile(p.atom()).unwrap(), 0.0);
        assert_eq!(p.quantile(0.0).unwrap(), 0.0);
    }

    #[test]
    fn quantile_frozen_value() {
        let p = base();
        let q = p.quantile(0.9).unwrap();
        assert!((q - 2.7385494319491377).abs() < 1e-12, "got {q}");
        assert!((p.cdf(q) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_bad_u() {
        let p = base();
        assert!(matches!(p.quantile(-0.1), Err(Error::UOutOfRange(_))));
        assert!(matches!(p.quantile(1.0), Err(Error::UOutOfRange(_))));
    }

    #[test]
    fn inversion_round_trip_grid() {
        for &(lambda, rho, beta, pp) in &[
            (1.0, 1.0, 0.0, 0.0),
            (1.0, 0.5, 0.1, 0.2),
            (2.0, 2.0, -1.5, 0.3),
        ] {
            let params = ServiceLawParams::new(lambda, rho, beta, pp).unwrap();
            let lo = params.atom();
            let hi = 1.0 - 1e-9;
            for i in 0..1000 {
                let u = lo + (hi - lo) * (i as f64 + 0.5) / 1000.0;
                let t = params.quantile(u).unwrap();
                assert!(
                    (params.cdf(t) - u).abs() <= 1e-10,
                    "roundtrip off at u={u}: cdf(q)={}",
                    params.cdf(t)
                );
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_and_respects_atom() {
        let p = base();
        let mut rng_a = Pcg64Mcg::seed_from_u64(7);
        let mut rng_b = Pcg64Mcg::seed_from_u64(7);
        let xs: Vec<f64> = (0..100).map(|_| p.sample(&mut rng_a)).collect();
        let ys: Vec<f64> = (0..100).map(|_| p.sample(&mut rng_b)).collect();
        assert_eq!(xs, ys);

        let deg = ServiceLawParams::new(1.0, 1.0, -1.0, 0.0).unwrap();
        let mut rng = Pcg64Mcg::seed_from_u64(1);
        assert!((0..100).all(|_| deg.sample(&mut rng) == 0.0));
    }

    #[test]
    fn sampler_mean_and_atom_fraction() {
        let p = base();
        let mut rng = Pcg64Mcg::seed_from_u64(42);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut zeros = 0usize;
        for _ in 0..n {
            let x = p.sample(&mut rng);
            sum += x;
            sum_sq += x * x;
            if x == 0.0 {
                zeros += 1;
            }
        }
        let mean = sum / n as f64;
        let sd = ((sum_sq - sum * sum / n as f64) / (n as f64 - 1.0)).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!(
            (mean - p.alpha()).abs() < 3.0 * se,
            "mean {mean} vs alpha {} (se {se})",
            p.alpha()
        );
        let frac = zeros as f64 / n as f64;
        let se_frac = (frac * (1.0 - frac) / n as f64).sqrt();
        assert!(
            (frac - p.atom()).abs() < 3.0 * se_frac,
            "atom fraction {frac} vs {} (se {se_frac})",
            p.atom()
        );
    }

    #[test]
    fn ode_residual_at_origin_and_interior() {
        let p = base();
        assert!(p.ode_residual(0.0).unwrap().abs() < 1e-15);

        let q = ServiceLawParams::new(1.0, 0.5, 0.1, 0.2).unwrap();
        assert!(q.ode_residual(1.0).unwrap().abs() < 1e-10);

        let deg = ServiceLawParams::new(1.0, 1.0, -1.0, 0.0).unwrap();
        assert!(matches!(
            deg.ode_residual(1.0),
            Err(Error::DegenerateParameter)
        ));
    }

    #[test]
    fn ode_residual_sweep() {
        for &(lambda, rho, beta, pp) in &[
            (1.0, 1.0, 0.0, 0.0),
            (1.0, 0.5, 0.1, 0.2),
            (2.0, 2.5, -1.2, 0.5),
            (0.7, 0.2, 0.0, 0.8),
        ] {
            let params = ServiceLawParams::new(lambda, rho, beta, pp).unwrap();
            let tol = 1e-8 * (lambda + beta.abs());
            for i in 0..100 {
                // log-spaced from 1e-6/A to 20/A
                let t = 10f64.powf(-6.0 + 7.301 * i as f64 / 99.0) / params.a_rate();
                let r = params.ode_residual(t).unwrap();
                assert!(
                    r.abs() <= tol,
                    "residual {r} at t={t} for ({lambda},{rho},{beta},{pp})"
                );
            }
        }
    }

    #[test]
    fn series_partial_converges_to_cdf() {
        let p = ServiceLawParams::new(1.0, 0.5, 0.0, 0.0).unwrap();
        let s = p.series_cdf_partial(1.0, 40).unwrap();
        assert!((s.value - p.cdf(1.0)).abs() < 1e-10);
        // the mathematical bound can sit below f64 rounding noise
        assert!((s.value - p.cdf(1.0)).abs() <= s.error_bound + 1e-14);
    }

    #[test]
    fn series_diverges_at_origin_for_large_rho() {
        let p = base(); // rho = 1 > ln 2
        match p.series_cdf_partial(0.0, 10) {
            Err(Error::SeriesDiverges(r)) => assert!(r > 1.0),
            other => panic!("expected SeriesDiverges, got {other:?}"),
        }
        // decayed ratio below one: converges for t large enough
        assert!(p.series_cdf_partial(1.0, 60).is_ok());
    }

    #[test]
    fn series_tail_bound_is_sound_at_k_zero() {
        let p = ServiceLawParams::new(1.0, 0.5, 0.1, 0.2).unwrap();
        for &t in &[0.0, 0.3, 1.0, 4.0] {
            let s = p.series_cdf_partial(t, 0).unwrap();
            assert_eq!(s.terms, 1);
            let true_err = (s.value - p.cdf(t)).abs();
            assert!(
                true_err <= s.error_bound,
                "bound {} below true error {true_err} at t={t}",
                s.error_bound
            );
        }
    }

    #[test]
    fn cross_ratio_worked_quadruple() {
        let cr = cross_ratio(1.0, 0.0, 0.0, [0.5, 0.7, 0.9, 1.1], 1.0).unwrap();
        // Frozen from a 40-digit evaluation of the right-hand side.
        assert!(
            (cr.rhs - 1.3289329222889067).abs() < 1e-12,
            "rhs {}",
            cr.rhs
        );
        assert!((cr.lhs - cr.rhs).abs() <= 1e-9 * cr.rhs.abs());
    }

    #[test]
    fn cross_ratio_independent_of_t() {
        for &t in &[0.1, 1.0, 5.0] {
            let cr = cross_ratio(1.0, 0.0, 0.0, [0.5, 0.7, 0.9, 1.1], t).unwrap();
            assert!(
                (cr.lhs - cr.rhs).abs() <= 1e-9 * cr.rhs.abs(),
                "t={t}: lhs {} rhs {}",
                cr.lhs,
                cr.rhs
            );
        }
    }

    #[test]
    fn cross_ratio_rejects_coincident_rhos() {
        assert!(matches!(
            cross_ratio(1.0, 0.0, 0.0, [0.5, 0.5, 0.9, 1.1], 1.0),
            Err(Error::IndistinctSolutions(_))
        ));
    }

    #[test]
    fn cross_ratio_names_inadmissible_rho() {
        // beta = 0.5 is admissible at rho = 0.5 but not at rho = 1.1.
        match cross_ratio(1.0, 0.5, 0.0, [0.5, 0.7, 0.9, 1.1], 1.0) {
            Err(Error::BetaInadmissible { rho, .. }) => assert!(rho > 0.7),
            other => panic!("expected BetaInadmissible, got {other:?}"),
        }
    }

    #[test]
    fn atom_boundary_cases() {
        let p = ServiceLawParams::new(1.0, 1.0, 0.5819767068693264, 0.0).unwrap();
        assert!(p.atom() <= 1e-14, "atom at beta_max: {}", p.atom());

        let pmax = ServiceLawParams::new(1.3, 0.7, 0.0, 0.25).unwrap();
        let at_max = ServiceLawParams::new(1.3, 0.7, pmax.beta_max(), 0.25).unwrap();
        assert!(at_max.atom() <= 1e-14);
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let p = ServiceLawParams::new(1.0, 0.5, 0.1, 0.2).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: ServiceLawParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        // derived fields present in the serialized form
        assert!(json.contains("\"beta_max\""));
        // invalid raw values fail to deserialize
        let bad = r#"{"lambda":1.0,"rho":1.0,"beta":0.9,"p":0.0}"#;
        assert!(serde_json::from_str::<ServiceLawParams>(bad).is_err());
    }
}
