use crate::expr::Expr;
use crate::{Error, Result};

/// A real function on [0, 1] that can be sampled by the quadrature routines.
///
/// Evaluation is fallible: plain closures report non-finite samples, parsed
/// expressions additionally report domain faults such as `log(0)`.
/// Implementors must be safe to evaluate from several threads at once.
pub trait Integrand: Sync {
    fn eval(&self, x: f64) -> Result<f64>;
}

impl<F> Integrand for F
where
    F: Fn(f64) -> f64 + Sync,
{
    #[inline]
    fn eval(&self, x: f64) -> Result<f64> {
        let value = self(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { x, value })
        }
    }
}

impl Integrand for Expr {
    fn eval(&self, x: f64) -> Result<f64> {
        Expr::eval(self, x).map_err(|source| Error::Eval { x, source })
    }
}
