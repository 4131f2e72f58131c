//! Numerical toolkit for weighted mean-value identities of harmonic and
//! panharmonic functions.
//!
//! A function `u` is harmonic when `Δu = 0` and `μ`-panharmonic when
//! `Δu − μ²u = 0` with `μ ≠ 0`. Both classes satisfy mean-value identities
//! over balls `D_r(x)`; this crate is built around the log-weighted one,
//!
//! ```text
//!   ⨍_{D_r(x)} u(y) log(r/|x−y|) dy  =  a(μr)·u(x),   a(t) = 2[I₀(t)−1]/t²,
//! ```
//!
//! which degenerates to `u(x)/d` for harmonic `u` in dimension `d ≥ 2`
//! (with `a(0) = 1/2` covering the planar case). The crate provides:
//!
//! * [`specfun`] — modified Bessel `I₀`, the coefficient `a(t)`, and unit
//!   ball volumes via half-integer Gamma recursion.
//! * [`quadrature`] — deterministic ball/sphere rules tuned for the
//!   `log(r/|x−y|)` weight, plus the closed-form radial log moment.
//! * [`fields`] — a catalog of analytic test fields with known
//!   classification, including the additive-constant counterexample that
//!   refutes the strict form of the inequality for subharmonic fields.
//! * [`mvp`] — the verification engine producing [`mvp::VerificationReport`]s.
//! * [`montecarlo`] — exact inverse-transform sampling of the log weight,
//!   a one-step unbiased estimator, and walk-on-spheres / walk-on-balls
//!   Dirichlet solvers.
//! * [`report`] — JSON and CSV serialization of report batches.

pub mod error;
pub mod fields;
pub mod montecarlo;
pub mod mvp;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
pub use fields::{Classification, ScalarField};
pub use montecarlo::{Estimate, WalkConfig};
pub use mvp::VerificationReport;
pub use quadrature::{BallSpec, QuadratureRule};
pub use rng::CounterRng;
