//! Tanh-sinh (double-exponential) quadrature over `[0, U]`.
//!
//! The substitution `y = (1 + tanh(π/2 · sinh t)) / 2` maps the real line
//! onto `(0, 1)` with weights that decay doubly exponentially at both ends,
//! which absorbs integrable endpoint singularities such as `x^α` with
//! `α > -1`. Abscissas are stored as their distance to the nearest endpoint
//! so that `sin x` near 0 and `cos x` near π/2 are evaluated without
//! cancellation.
//!
//! This module only uses elementary functions; it never calls into
//! [`crate::specfun`], so agreement with the closed forms is independent
//! evidence.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::integrand::{convergence_check, ConvergenceVerdict, TrigIntegrand, Upper};
use crate::scalar::Real;

/// Finest level for which abscissas are tabulated.
pub const MAX_LEVEL: u32 = 14;
pub const MIN_LEVEL: u32 = 3;

/// Nodes whose weight falls below this are not tabulated.
const WEIGHT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integral diverges: {}", .0.reason)]
    Divergent(ConvergenceVerdict),
    #[error("invalid quadrature argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not converge: estimate {value} ± {error_estimate} after {levels_used} levels")]
    NotConverged { value: f64, error_estimate: f64, levels_used: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, max_level: 12 }
    }
}

impl QuadOptions {
    fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadError::InvalidArgument(format!(
                "tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if !(MIN_LEVEL..=MAX_LEVEL).contains(&self.max_level) {
            return Err(QuadError::InvalidArgument(format!(
                "max_level must lie in {MIN_LEVEL}..={MAX_LEVEL}, got {}",
                self.max_level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult<F> {
    pub value: F,
    /// `|S_L - S_{L-1}|` at the last level computed.
    pub error_estimate: F,
    pub levels_used: u32,
    pub evaluations: usize,
    pub converged: bool,
    /// Successive-difference estimate at each level from 1 on.
    pub level_estimates: Vec<F>,
}

impl<F: Real> QuadratureResult<F> {
    /// Converts a non-converged result into [`QuadError::NotConverged`].
    pub fn require_converged(self) -> Result<Self, QuadError> {
        if self.converged {
            Ok(self)
        } else {
            Err(QuadError::NotConverged {
                value: self.value.to_f64().unwrap_or(f64::NAN),
                error_estimate: self.error_estimate.to_f64().unwrap_or(f64::NAN),
                levels_used: self.levels_used,
            })
        }
    }
}

/// One abscissa pair `t = ±k h` on the unit interval.
#[derive(Debug, Clone, Copy)]
struct Node {
    /// Distance from the nearer endpoint of `(0, 1)`.
    offset: f64,
    /// `dy/dt` at this node.
    weight: f64,
    /// `t == 0`: a single midpoint instead of a pair.
    center: bool,
}

fn node_at(t: f64) -> Node {
    let u = std::f64::consts::FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u).exp();
    let offset = e / (1.0 + e);
    let weight = std::f64::consts::PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
    Node { offset, weight, center: t == 0.0 }
}

fn build_level(level: u32) -> Vec<Node> {
    let h = (0.5f64).powi(level as i32);
    let (start, step) = if level == 0 { (0u64, 1u64) } else { (1, 2) };
    let mut nodes = Vec::new();
    let mut k = start;
    loop {
        let n = node_at(k as f64 * h);
        if n.weight < WEIGHT_FLOOR || n.offset == 0.0 {
            break;
        }
        nodes.push(n);
        k += step;
    }
    nodes
}

fn tables() -> &'static [Vec<Node>] {
    static TABLES: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLES.get_or_init(|| (0..=MAX_LEVEL).map(build_level).collect())
}

/// Integrates `f(x, U - x)` over `[0, U]`; the second argument is the
/// distance to the upper limit, computed without cancellation.
fn tanh_sinh<F, G>(upper: F, f: G, opts: &QuadOptions) -> QuadratureResult<F>
where
    F: Real,
    G: Fn(F, F) -> F,
{
    let abs_tol = F::lit(opts.abs_tol);
    let rel_tol = F::lit(opts.rel_tol);
    let mut running = F::zero();
    let mut evaluations = 0usize;
    let mut previous: Option<F> = None;
    let mut level_estimates = Vec::new();
    let mut result = QuadratureResult {
        value: F::zero(),
        error_estimate: F::infinity(),
        levels_used: 0,
        evaluations: 0,
        converged: false,
        level_estimates: Vec::new(),
    };

    for (level, nodes) in tables().iter().enumerate().take(opts.max_level as usize + 1) {
        for node in nodes {
            let w = F::lit(node.weight);
            let d = upper * F::lit(node.offset);
            if w == F::zero() || d == F::zero() {
                continue;
            }
            if node.center {
                running = running + w * f(d, upper - d);
                evaluations += 1;
            } else {
                // near 0: x = d; near U: x = U - d with complement d
                let lo = f(d, upper - d);
                let hi = f(upper - d, d);
                running = running + w * (lo + hi);
                evaluations += 2;
            }
        }
        let h = F::lit(0.5).powi(level as i32);
        let estimate = upper * h * running;
        result.value = estimate;
        result.levels_used = level as u32;
        if let Some(prev) = previous {
            let diff = (estimate - prev).abs();
            level_estimates.push(diff);
            result.error_estimate = diff;
            let target = abs_tol.max(rel_tol * estimate.abs());
            if level as u32 >= MIN_LEVEL && diff <= target {
                result.converged = true;
                break;
            }
        }
        previous = Some(estimate);
    }
    result.evaluations = evaluations;
    result.level_estimates = level_estimates;
    result
}

/// `∫₀^U sin^α x · cos^β x · cos^γ(2x) dx`, with the integrand evaluated as
/// `exp(α ln sin x + β ln cos x + γ ln cos 2x)`.
pub fn integrate<F: Real>(ti: &TrigIntegrand, opts: &QuadOptions) -> Result<QuadratureResult<F>, QuadError> {
    opts.validate()?;
    let verdict = convergence_check(ti);
    if !verdict.convergent {
        return Err(QuadError::Divergent(verdict));
    }
    let alpha = ti.alpha().to_real::<F>();
    let beta = ti.beta_exp().to_real::<F>();
    let gamma = ti.gamma_exp().to_real::<F>();
    let kind = ti.upper();
    let upper = match kind {
        Upper::QuarterPi => F::FRAC_PI_4(),
        Upper::HalfPi => F::FRAC_PI_2(),
    };
    let two = F::lit(2.0);
    let f = move |x: F, rest: F| -> F {
        let mut log = F::zero();
        if alpha != F::zero() {
            log = log + alpha * x.sin().ln();
        }
        if beta != F::zero() {
            let c = match kind {
                Upper::HalfPi => rest.sin(),
                Upper::QuarterPi => x.cos(),
            };
            log = log + beta * c.ln();
        }
        if gamma != F::zero() {
            // cos 2x = sin(2(π/4 - x)) on [0, π/4]
            log = log + gamma * (two * rest).sin().ln();
        }
        log.exp()
    };
    Ok(tanh_sinh(upper, f, opts))
}

/// `∫₀¹ x^(a-1) (1-x)^(b-1) dx` by direct quadrature.
pub fn integrate_beta_def<F: Real>(a: F, b: F, tol: f64) -> Result<QuadratureResult<F>, QuadError> {
    if !(a > F::zero() && b > F::zero()) {
        return Err(QuadError::InvalidArgument(format!("beta integral needs a, b > 0, got ({a}, {b})")));
    }
    let opts = QuadOptions { abs_tol: tol, rel_tol: tol, max_level: 12 };
    opts.validate()?;
    let (am1, bm1) = (a - F::one(), b - F::one());
    let f = move |x: F, rest: F| -> F {
        let mut log = F::zero();
        if am1 != F::zero() {
            log = log + am1 * x.ln();
        }
        if bm1 != F::zero() {
            log = log + bm1 * rest.ln();
        }
        log.exp()
    };
    Ok(tanh_sinh(F::one(), f, &opts))
}
