//! Quadrature for the binomial measures `μ_α` on [0, 1].
//!
//! `μ_α` assigns mass `α^{n(j)} (1-α)^{k-n(j)}` to the dyadic interval
//! `X_j^k = [j/2^k, (j+1)/2^k)`, where `n(j)` counts the ones in the binary
//! expansion of `j`; `α = 1/2` is Lebesgue measure. The crate provides exact
//! moments, closed-form and interpolatory rules, their error constants, and
//! a composite driver on uniform dyadic partitions.
//!
//! ```
//! use binquad::{build_rule, run_composite, Alpha, Family, MomentCache, StopConfig};
//!
//! let alpha = Alpha::new(0.3)?;
//! let rule = build_rule(Family::GL2, alpha)?;
//! let out = run_composite(&rule, &|x: f64| x.powi(4), StopConfig::default())?;
//! let exact = MomentCache::new(alpha).moment(4)?;
//! assert!((out.value - exact).abs() < 1e-8);
//! # Ok::<(), binquad::Error>(())
//! ```

pub mod composite;
pub mod error;
pub mod error_model;
pub mod expr;
pub mod format;
pub mod integrand;
pub mod measure;
pub mod poly;
pub mod rules;
pub mod sum;

pub use composite::{
    composite_eval, local_apply, measure_order, run_composite, run_composite_with,
    CompositeOutcome, ConvergenceHistory, DyadicPartition, StopConfig, StopReason,
    MAX_COMPOSITE_LEVEL,
};
pub use error::{Error, ErrorKind, Result};
pub use error_model::{
    gl2_error_constant, nc2_k_constants, nc2_k_difference, peano, peano_constant, ErrorConstants,
    Peano,
};
pub use expr::{builtin, parse, EvalError, Expr, ParseError};
pub use integrand::Integrand;
pub use measure::{
    density_at, dyadic_mass, dyadic_moment, ones_count, reference_integral, Alpha, DyadicInterval,
    LevelMasses, MomentCache,
};
pub use poly::Polynomial;
pub use rules::{
    apply_rule, build_rule, extrapolated, interpolatory_weights, verify_degree, Family,
    QuadratureRule,
};
pub use sum::{compensated_sum, NeumaierSum};
