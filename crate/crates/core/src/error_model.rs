//! A-priori error constants for interpolatory rules.
//!
//! Two families of estimates are exposed. The interpolation-error route
//! splits the nodal polynomial `ω_p = Π (x - ζ_q)` into its positive and
//! negative parts and integrates each against `μ_α` (`K⁺`, `K⁻`). The Taylor
//! route uses the Peano constant `k_{α,r,𝕀} = m_{r+1} - 𝕀(x^{r+1})`, which
//! also drives the composite convergence rate and its stopping criterion.

use crate::measure::{reference_integral, Alpha, MomentCache};
use crate::poly::Polynomial;
use crate::rules::{build_rule, Family, QuadratureRule};
use crate::{Error, Result};

/// Level used for numerically integrated split nodal polynomials.
pub const SPLIT_INTEGRAL_LEVEL: u32 = 20;

/// A Peano constant below this magnitude means the rule is exact one degree higher.
pub const PEANO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorConstants {
    /// `K⁺ = ∫ max(0, ω_p) dμ_α`
    pub k_plus: f64,
    /// `K⁻ = ∫ max(0, -ω_p) dμ_α`
    pub k_minus: f64,
    /// `m_{r+1} - 𝕀(x^{r+1})`
    pub peano: f64,
}

/// Peano constant together with the degree it was taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peano {
    pub degree: u32,
    pub constant: f64,
}

/// The monic polynomial with a root at every node.
pub fn nodal_polynomial(rule: &QuadratureRule) -> Result<Polynomial> {
    if rule.has_duplicate_nodes(0.0) {
        return Err(Error::InvalidRule(format!(
            "{} at alpha = {} has coincident nodes; the nodal polynomial is undefined",
            rule.family(),
            rule.alpha()
        )));
    }
    Ok(Polynomial::from_roots(rule.nodes()))
}

/// `∫ ω_p dμ_α`, exact through the moments.
pub fn nodal_integral(rule: &QuadratureRule, cache: &MomentCache) -> Result<f64> {
    nodal_polynomial(rule)?.integrate(cache)
}

/// Closed-form split integrals of the three-point Newton-Cotes rule:
/// `K⁺ = α(1-α)²(4-α)/28`, `K⁻ = α²(1-α)(3+α)/28`.
///
/// `K⁻` comes from the right half, `x = (1+t)/2`: `K⁻ = -α/8 · (m₃ - m₁)`.
/// `ω₂ = x(x-1/2)(x-1)` satisfies `ω₂(1-x) = -ω₂(x)` but not
/// `ω₂(x) = -ω₂(x-1/2)`; transporting the left-half integral by that shift
/// would give `α²(1-α)(4-α)/28`, which only agrees at α = 1/2.
///
/// `peano` is taken at the generic degree 2, so it vanishes at α = 1/2.
pub fn nc2_k_constants(alpha: Alpha) -> Result<ErrorConstants> {
    let cache = MomentCache::new(alpha);
    let rule = build_rule(Family::NC2, alpha)?;
    let (k_plus, k_minus) = nc2_k_pair(alpha);
    Ok(ErrorConstants {
        k_plus,
        k_minus,
        peano: peano_constant_at(&rule, &cache, 2)?,
    })
}

fn nc2_k_pair(alpha: Alpha) -> (f64, f64) {
    let a = alpha.value();
    let b = alpha.complement();
    (a * b * b * (4.0 - a) / 28.0, a * a * b * (3.0 + a) / 28.0)
}

/// `K⁺ - K⁻ = ∫ ω₂ dμ_α = α(1-α)(1-2α)/7` for `NC2`; inside (0, 1) it
/// vanishes only at α = 1/2.
pub fn nc2_k_difference(alpha: Alpha) -> f64 {
    let a = alpha.value();
    a * (1.0 - a) * (1.0 - 2.0 * a) / 7.0
}

/// `(∫ ω⁺ dμ_α, ∫ ω⁻ dμ_α)` integrated numerically at refinement `level`.
///
/// The error is of order `2^-level` times the Lipschitz constant of `ω_p`,
/// and vanishes when all nodes are dyadic and `ω_p` has degree ≤ 3.
pub fn split_nodal_integrals(rule: &QuadratureRule, level: u32) -> Result<(f64, f64)> {
    let omega = nodal_polynomial(rule)?;
    let alpha = rule.alpha();
    let plus = reference_integral(alpha, &|x: f64| omega.eval(x).max(0.0), level)?;
    let minus = reference_integral(alpha, &|x: f64| (-omega.eval(x)).max(0.0), level)?;
    Ok((plus, minus))
}

/// `K±` by numerical integration plus the Peano constant, for any rule.
pub fn numeric_k_constants(rule: &QuadratureRule, cache: &MomentCache) -> Result<ErrorConstants> {
    let (k_plus, k_minus) = split_nodal_integrals(rule, SPLIT_INTEGRAL_LEVEL)?;
    Ok(ErrorConstants {
        k_plus,
        k_minus,
        peano: peano_constant(rule, cache)?,
    })
}

/// Coefficient `C(α) = -2α(17α³ - 34α² + 9α + 8)/735` of `f''''(ξ)/24` in the
/// error of `GL2`. The rule integrates the Hermite interpolant with a double
/// middle node, so the error kernel `x(x-1)(x-ζ₁)²` has one sign.
pub fn gl2_error_constant(alpha: Alpha) -> f64 {
    let a = alpha.value();
    -2.0 * a * (17.0 * a.powi(3) - 34.0 * a * a + 9.0 * a + 8.0) / 735.0
}

/// `m_{r+1} - Σ β_q ζ_q^{r+1}` at an explicit `r`.
pub fn peano_constant_at(rule: &QuadratureRule, cache: &MomentCache, r: u32) -> Result<f64> {
    Ok(cache.moment(r + 1)? - rule.monomial(r + 1))
}

/// Peano constant at the rule's effective degree.
///
/// Starts from the rule's degree and steps up while the constant is below
/// [`PEANO_TIE_TOL`], so rules built at a degree-upgrade α report the first
/// nonzero constant.
pub fn peano(rule: &QuadratureRule, cache: &MomentCache) -> Result<Peano> {
    let cap = 2 * rule.len() as u32 + 1;
    let mut degree = rule.degree();
    loop {
        let constant = peano_constant_at(rule, cache, degree)?;
        if constant.abs() > PEANO_TIE_TOL || degree >= cap {
            return Ok(Peano { degree, constant });
        }
        degree += 1;
    }
}

pub fn peano_constant(rule: &QuadratureRule, cache: &MomentCache) -> Result<f64> {
    Ok(peano(rule, cache)?.constant)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `sup|f^(r+1)| / (r+1)! · |k_{α,r,𝕀}|`, the Taylor-remainder estimate of
/// the single-interval error. `deriv_bound` must bound the `(r+1)`-th
/// derivative on [0, 1], with `r` the effective degree from [`peano`].
pub fn taylor_error_bound(
    rule: &QuadratureRule,
    cache: &MomentCache,
    deriv_bound: f64,
) -> Result<f64> {
    let p = peano(rule, cache)?;
    Ok(deriv_bound / factorial(p.degree + 1) * p.constant.abs())
}

/// Absolute error bound for `NC2` in terms of `max|f'''|` and `max|f''''|`:
///
/// `|K⁺ - K⁻|/6 · max|f'''| + min(K⁺, K⁻)/6 · max|f''''|`.
pub fn nc2_error_bound(alpha: Alpha, max_third: f64, max_fourth: f64) -> f64 {
    let (k_plus, k_minus) = nc2_k_pair(alpha);
    nc2_k_difference(alpha).abs() / 6.0 * max_third + k_plus.min(k_minus) / 6.0 * max_fourth
}

/// Local bound on `X_j^k` from the split-constant estimate:
///
/// `μ(X_j^k) / (2^{k(p+1)} (p+1)!) · [min(K⁺,K⁻)/2^k · |f^(p+2)| + |f^(p+1)| · |∫ω_p dμ|]`
///
/// The extra `2^-k` on the first term does not follow from the single-cell
/// identity; treat the result as a heuristic.
pub fn local_split_bound(
    constants: &ErrorConstants,
    nodal_integral: f64,
    cell_mass: f64,
    level: u32,
    nodes: usize,
    deriv_p1: f64,
    deriv_p2: f64,
) -> f64 {
    let p1 = nodes as u32;
    let scale = (-(level as f64)).exp2();
    cell_mass * scale.powi(p1 as i32) / factorial(p1)
        * (constants.k_plus.min(constants.k_minus) * scale * deriv_p2.abs()
            + deriv_p1.abs() * nodal_integral.abs())
}
