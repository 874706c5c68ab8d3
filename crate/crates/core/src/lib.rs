//! Closed forms for `∫₀^{π/2} sin^α x cos^β x dx` and
//! `∫₀^{π/4} sin^α x cos^β x cos^γ(2x) dx` in terms of beta and gamma values,
//! checked against an independent tanh-sinh quadrature.
//!
//! The numeric kernels are generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`, which is what the corpus and
//! the command-line tool use.

pub mod corpus;
pub mod expr;
pub mod integrand;
pub mod quad;
pub mod rational;
pub mod reduce;
pub mod scalar;
pub mod specfun;

pub use expr::{ClosedForm, ExactValue, Notation};
pub use integrand::{parse, TrigIntegrand, Upper};
pub use quad::{QuadError, QuadOptions};
pub use rational::Rational;
pub use reduce::{reduce, ReduceError, ReductionOutcome};
pub use scalar::Real;

pub type QuadratureResultF64 = quad::QuadratureResult<f64>;
pub type QuadratureResultF32 = quad::QuadratureResult<f32>;
pub type ScaledValueF64 = expr::ScaledValue<f64>;

/// `integrate` at double precision.
pub fn integrate(ti: &TrigIntegrand, opts: &QuadOptions) -> Result<QuadratureResultF64, QuadError> {
    quad::integrate::<f64>(ti, opts)
}
