//! Busy-period and busy-cycle analytics for the M|G|infinity queue under a
//! four-parameter family of service-time distributions.
//!
//! The family `(lambda, rho, beta, p)` is built so that the queue's busy
//! period comes out exponential with an atom at the origin, which makes the
//! busy period and busy cycle unusually tractable while the service-time
//! moments themselves are awkward. The crate covers both sides:
//!
//! - [`service_law`] — the distribution family itself: validation,
//!   CDF/PDF/quantile/sampling, and its structural identities (hazard ODE
//!   residual, cross-ratio of solutions, geometric series form).
//! - [`moments`] — `E[T^n]` by four routes (closed-form bounds, convergent
//!   series, grid approximation, adaptive quadrature) with guaranteed error
//!   reporting.
//! - [`busy_analytics`] — closed-form busy-period/busy-cycle layer:
//!   means, peakedness and modified peakedness, the busy-cycle renewal
//!   function, and the conjectured busy-period law used as an oracle.
//! - [`simulator`] — seeded, replicable discrete-event simulation that
//!   confronts every analytic claim with Monte Carlo estimates.
//!
//! The companion `mginf` binary exposes all of it as batch subcommands; see
//! the guide chapters under [`guide`].

pub mod busy_analytics;
mod error;
pub mod guide;
pub mod moments;
pub mod seed;
pub mod service_law;
pub mod simulator;

pub use error::{Error, Result};
pub use service_law::ServiceLawParams;
