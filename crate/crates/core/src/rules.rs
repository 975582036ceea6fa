//! Interpolatory quadrature rules on [0, 1] for the binomial measure.
//!
//! Closed-form families:
//!
//! | family | nodes | degree (α ≠ 1/2) | degree (α = 1/2) |
//! |--------|-------|------------------|------------------|
//! | `G0`   | α | 1 | 1 |
//! | `G1`   | two Gauss nodes | 3 | 3 |
//! | `W1`   | α ∓ √(α(1-α)/3), equal weights, α ∈ [1/4, 3/4] | 2 | 3 |
//! | `NC0`..`NC4` | equispaced | p | p+1 for even p |
//! | `GL2`  | 0, (3α+2)/7, 1 | 3 | 3 |
//! | `H4`   | six nodes of the extrapolated `GL2` | 5 | 5 |
//!
//! Arbitrary node sets go through [`interpolatory_weights`], which solves the
//! moment equations `Σ β_q ζ_q^s = m_s` for `s = 0..p`.

use std::fmt;
use std::str::FromStr;

use crate::composite::local_apply;
use crate::integrand::Integrand;
use crate::measure::{Alpha, DyadicInterval, MomentCache};
use crate::{Error, Result};

/// Largest node count accepted by [`interpolatory_weights`].
pub const MAX_INTERPOLATORY_NODES: usize = 12;

/// Relative tolerance used when checking moment equations.
pub const DEGREE_REL_TOL: f64 = 1e-10;

/// Absolute floor for the moment check; keeps tiny moments (small α, large s)
/// from demanding accuracy beyond double precision.
pub const DEGREE_ABS_FLOOR: f64 = 1e-14;

/// Condition estimates above this are treated as singular.
const CONDITION_LIMIT: f64 = 1e14;

/// Node separation below which two nodes count as the same point.
const NODE_SEPARATION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    G0,
    G1,
    W1,
    NC0,
    NC1,
    NC2,
    NC3,
    NC4,
    GL2,
    H4,
    Custom,
}

impl Family {
    /// Every closed-form family, in table order.
    pub const CLOSED_FORM: [Family; 10] = [
        Family::G0,
        Family::G1,
        Family::W1,
        Family::NC0,
        Family::NC1,
        Family::NC2,
        Family::NC3,
        Family::NC4,
        Family::GL2,
        Family::H4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::G0 => "G0",
            Family::G1 => "G1",
            Family::W1 => "W1",
            Family::NC0 => "NC0",
            Family::NC1 => "NC1",
            Family::NC2 => "NC2",
            Family::NC3 => "NC3",
            Family::NC4 => "NC4",
            Family::GL2 => "GL2",
            Family::H4 => "H4",
            Family::Custom => "CUSTOM",
        }
    }

    /// Degree of exactness of the closed form at `alpha`.
    pub fn declared_degree(self, alpha: Alpha) -> Option<u32> {
        let upgrade = u32::from(alpha.is_lebesgue());
        Some(match self {
            Family::G0 => 1,
            Family::G1 => 3,
            Family::W1 => 2 + upgrade,
            Family::NC0 => upgrade,
            Family::NC1 => 1,
            Family::NC2 => 2 + upgrade,
            Family::NC3 => 3,
            Family::NC4 => 4 + upgrade,
            Family::GL2 => 3,
            Family::H4 => 5,
            Family::Custom => return None,
        })
    }

    /// The α-interval where the family is defined, when narrower than (0, 1).
    pub fn alpha_domain(self) -> Option<(f64, f64)> {
        match self {
            Family::W1 => Some((0.25, 0.75)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Family::CLOSED_FORM
            .into_iter()
            .chain([Family::Custom])
            .find(|f| f.name() == upper)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Nodes `ζ_q`, weights `β_q`, and the degree of exactness `r` of a rule
/// on [0, 1] for a fixed `μ_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    family: Family,
    alpha: Alpha,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: u32,
}

impl QuadratureRule {
    /// Builds a rule from explicit nodes and weights and measures its degree.
    pub fn custom(cache: &MomentCache, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_shape(&nodes, &weights)?;
        check_distinct(&nodes)?;
        let mut rule = Self {
            family: Family::Custom,
            alpha: cache.alpha(),
            nodes,
            weights,
            degree: 0,
        };
        let cap = 2 * rule.nodes.len() as u32 + 1;
        rule.degree = verify_degree(&rule, cache, cap);
        Ok(rule)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of nodes, `p + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `𝕀(f) = Σ β_q f(ζ_q)`.
    pub fn apply<F: Integrand + ?Sized>(&self, f: &F) -> Result<f64> {
        apply_rule(self, f)
    }

    /// `Σ β_q ζ_q^s`.
    pub fn monomial(&self, s: u32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, b)| b * z.powi(s as i32))
            .sum()
    }

    /// `(node, weight)` pairs sorted by node, for display.
    pub fn sorted_view(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self
            .nodes
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    /// Whether two nodes coincide to within `tol`.
    pub fn has_duplicate_nodes(&self, tol: f64) -> bool {
        let sorted = self.sorted_view();
        sorted.windows(2).any(|w| (w[1].0 - w[0].0).abs() <= tol)
    }

    /// Merges nodes closer than `tol`, adding their weights.
    ///
    /// At α = 1/2 the last `H4` node coincides with the midpoint; merging
    /// recovers the five-point Newton-Cotes rule. Nodes come back sorted.
    pub fn merge_duplicate_nodes(&self, tol: f64) -> QuadratureRule {
        let mut nodes: Vec<f64> = Vec::with_capacity(self.len());
        let mut weights: Vec<f64> = Vec::with_capacity(self.len());
        for (z, b) in self.sorted_view() {
            match nodes.last() {
                Some(&last) if (z - last).abs() <= tol => *weights.last_mut().unwrap() += b,
                _ => {
                    nodes.push(z);
                    weights.push(b);
                }
            }
        }
        QuadratureRule {
            nodes,
            weights,
            ..self.clone()
        }
    }
}

fn check_shape(nodes: &[f64], weights: &[f64]) -> Result<()> {
    if nodes.is_empty() || nodes.len() != weights.len() {
        return Err(Error::InvalidRule(format!(
            "{} nodes and {} weights; need equal nonzero counts",
            nodes.len(),
            weights.len()
        )));
    }
    if let Some(z) = nodes.iter().find(|z| !(0.0..=1.0).contains(*z)) {
        return Err(Error::InvalidRule(format!("node {z} lies outside [0, 1]")));
    }
    if let Some(b) = weights.iter().find(|b| !b.is_finite()) {
        return Err(Error::InvalidRule(format!("weight {b} is not finite")));
    }
    Ok(())
}

fn check_distinct(nodes: &[f64]) -> Result<()> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] <= NODE_SEPARATION) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    Ok(())
}

/// Pulls values within rounding of the unit interval back onto it.
fn clamp_unit(x: f64) -> f64 {
    if (-1e-15..0.0).contains(&x) {
        0.0
    } else if (1.0..1.0 + 1e-15).contains(&x) && x != 1.0 {
        1.0
    } else {
        x
    }
}

/// Closed-form nodes and weights of `family` at `alpha`.
pub fn build_rule(family: Family, alpha: Alpha) -> Result<QuadratureRule> {
    let a = alpha.value();
    if let Some((lo, hi)) = family.alpha_domain() {
        if a < lo || a > hi {
            return Err(Error::RuleDomain {
                family,
                alpha: a,
                lo,
                hi,
            });
        }
    }
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match family {
        Family::G0 => (vec![a], vec![1.0]),
        Family::G1 => {
            let radicand = -264.0 * a * a + 264.0 * a + 81.0;
            assert!(radicand > 0.0, "G1 radicand must be positive on (0, 1)");
            let root = radicand.sqrt();
            let center = (8.0 * a + 3.0) / 14.0;
            let skew = (18.0 * a - 9.0) / (2.0 * root);
            (
                vec![center - root / 42.0, center + root / 42.0],
                vec![0.5 - skew, 0.5 + skew],
            )
        }
        Family::W1 => {
            let spread = (a * (1.0 - a) / 3.0).sqrt();
            (vec![a - spread, a + spread], vec![0.5, 0.5])
        }
        Family::NC0 => (vec![0.5], vec![1.0]),
        Family::NC1 => (vec![0.0, 1.0], vec![1.0 - a, a]),
        Family::NC2 => {
            let a2 = a * a;
            (
                vec![0.0, 0.5, 1.0],
                vec![
                    (4.0 * a2 - 7.0 * a + 3.0) / 3.0,
                    (-8.0 * a2 + 8.0 * a) / 3.0,
                    (4.0 * a2 - a) / 3.0,
                ],
            )
        }
        Family::NC3 => {
            let (a2, a3) = (a * a, a * a * a);
            (
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
                vec![
                    (-9.0 * a3 + 24.0 * a2 - 22.0 * a + 7.0) / 7.0,
                    (27.0 * a3 - 51.0 * a2 + 24.0 * a) / 7.0,
                    (-27.0 * a3 + 30.0 * a2 - 3.0 * a) / 7.0,
                    (9.0 * a3 - 3.0 * a2 + a) / 7.0,
                ],
            )
        }
        Family::NC4 => {
            let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
            (
                vec![0.0, 0.25, 0.5, 0.75, 1.0],
                vec![
                    (256.0 * a4 - 992.0 * a3 + 1572.0 * a2 - 1151.0 * a + 315.0) / 315.0,
                    -32.0 * a * (32.0 * a3 - 94.0 * a2 + 99.0 * a - 37.0) / 315.0,
                    24.0 * a * (64.0 * a3 - 128.0 * a2 + 73.0 * a - 9.0) / 315.0,
                    -32.0 * a * (32.0 * a3 - 34.0 * a2 + 9.0 * a - 7.0) / 315.0,
                    a * (256.0 * a3 - 32.0 * a2 + 132.0 * a - 41.0) / 315.0,
                ],
            )
        }
        Family::GL2 => (
            vec![0.0, (3.0 * a + 2.0) / 7.0, 1.0],
            vec![
                (a - 1.0) * (5.0 * a - 6.0) / (3.0 * (3.0 * a + 2.0)),
                98.0 * a * (a - 1.0) / (3.0 * (3.0 * a + 2.0) * (3.0 * a - 5.0)),
                a * (5.0 * a + 1.0) / (3.0 * (5.0 - 3.0 * a)),
            ],
        ),
        Family::H4 => h4_nodes_weights(a),
        Family::Custom => return Err(Error::UnknownFamily(Family::Custom.to_string())),
    };
    let nodes: Vec<f64> = nodes.into_iter().map(clamp_unit).collect();
    check_shape(&nodes, &weights)?;
    let degree = family.declared_degree(alpha).expect("closed-form family");
    Ok(QuadratureRule {
        family,
        alpha,
        nodes,
        weights,
        degree,
    })
}

// Node order follows the extrapolated GL2 construction: the midpoint of the
// parent GL2 rule comes last, so at α = 1/2 node 5 coincides with node 2.
fn h4_nodes_weights(a: f64) -> (Vec<f64>, Vec<f64>) {
    let (a2, a3, a4, a5) = (a * a, a.powi(3), a.powi(4), a.powi(5));
    let shift = (3.0 * a + 2.0) / 14.0;
    let nodes = vec![0.0, shift, 0.5, 0.5 + shift, 1.0, (3.0 * a + 2.0) / 7.0];
    let weights = vec![
        (688.0 * a5 - 24257.0 * a4 + 59238.0 * a3 - 32825.0 * a2 - 19584.0 * a + 16740.0)
            / (1395.0 * (a + 3.0) * (3.0 * a + 2.0).powi(2)),
        224.0 * a * (1667.0 * a4 - 6012.0 * a3 + 4855.0 * a2 + 1442.0 * a - 1952.0)
            / (1395.0 * (4.0 - a) * (3.0 * a - 5.0) * (9.0 * a2 + 12.0 * a + 4.0)),
        32.0 * a * (43.0 * a3 - 86.0 * a2 - 669.0 * a + 712.0)
            / (1395.0 * (3.0 * a + 2.0) * (5.0 - 3.0 * a)),
        224.0 * a * (1667.0 * a4 - 2323.0 * a3 - 2523.0 * a2 + 3395.0 * a - 216.0)
            / (1395.0 * (3.0 * a - 5.0) * (9.0 * a3 + 18.0 * a2 - 37.0 * a - 30.0)),
        a * (688.0 * a4 + 20817.0 * a3 - 30910.0 * a2 - 6227.0 * a - 1108.0)
            / (1395.0 * (a - 4.0) * (3.0 * a - 5.0).powi(2)),
        -98.0 * a * (2311.0 * a3 - 4622.0 * a2 + 1137.0 * a + 1174.0)
            / (1395.0 * (81.0 * a4 - 162.0 * a3 - 99.0 * a2 + 180.0 * a + 100.0)),
    ];
    (nodes, weights)
}

/// Weights making the rule on `nodes` exact for `1, x, ..., x^p`.
///
/// Convenience wrapper that builds a fresh [`MomentCache`].
pub fn interpolatory_weights(alpha: Alpha, nodes: &[f64]) -> Result<QuadratureRule> {
    interpolatory_weights_with(&MomentCache::new(alpha), nodes)
}

/// Solves the transposed Vandermonde system `Σ_q β_q ζ_q^s = m_s`, `s = 0..p`,
/// by row-pivoted elimination. The returned degree is the verified one.
pub fn interpolatory_weights_with(cache: &MomentCache, nodes: &[f64]) -> Result<QuadratureRule> {
    let n = nodes.len();
    if n > MAX_INTERPOLATORY_NODES {
        return Err(Error::TooManyNodes {
            count: n,
            max: MAX_INTERPOLATORY_NODES,
        });
    }
    check_shape(nodes, &vec![0.0; n])?;
    check_distinct(nodes)?;

    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|s| nodes.iter().map(|z| z.powi(s as i32)).collect())
        .collect();
    let lu = LuDecomposition::new(matrix)?;
    let condition = lu.condition_estimate();
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = cache.moments_up_to(n as u32 - 1)?;
    let weights = lu.solve(&rhs);

    let mut rule = QuadratureRule {
        family: Family::Custom,
        alpha: cache.alpha(),
        nodes: nodes.to_vec(),
        weights,
        degree: 0,
    };
    let degree = verify_degree(&rule, cache, 2 * n as u32 - 1);
    if degree + 1 < n as u32 {
        return Err(Error::IllConditioned { condition });
    }
    rule.degree = degree;
    Ok(rule)
}

/// Row-pivoted LU factorization of a small dense matrix.
struct LuDecomposition {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    norm_1: f64,
}

impl LuDecomposition {
    fn new(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        let norm_1 = (0..n)
            .map(|c| a.iter().map(|row| row[c].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            if a[pivot][col] == 0.0 {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            a.swap(col, pivot);
            perm.swap(col, pivot);
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                a[row][col] = factor;
                for c in col + 1..n {
                    a[row][c] -= factor * a[col][c];
                }
            }
        }
        Ok(Self {
            lu: a,
            perm,
            norm_1,
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for c in 0..i {
                x[i] -= self.lu[i][c] * x[c];
            }
        }
        for i in (0..n).rev() {
            for c in i + 1..n {
                x[i] -= self.lu[i][c] * x[c];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, with the inverse formed column by column.
    fn condition_estimate(&self) -> f64 {
        let n = self.lu.len();
        let mut inv_norm: f64 = 0.0;
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        self.norm_1 * inv_norm
    }
}

/// Largest `r ≤ max_check` such that the rule reproduces `m_0, ..., m_r`.
///
/// Each moment passes when `|Σ β_q ζ_q^s - m_s| ≤ max(1e-10 |m_s|, 1e-14)`.
/// Returns `max_check` when no failure is found. A rule that does not even
/// reproduce `m_0` also reports 0.
pub fn verify_degree(rule: &QuadratureRule, cache: &MomentCache, max_check: u32) -> u32 {
    for s in 0..=max_check {
        let Ok(exact) = cache.moment(s) else {
            return s.saturating_sub(1);
        };
        let residual = (rule.monomial(s) - exact).abs();
        if residual > (DEGREE_REL_TOL * exact.abs()).max(DEGREE_ABS_FLOOR) {
            return s.saturating_sub(1);
        }
    }
    max_check
}

/// `Σ β_q f(ζ_q)`. Evaluation failures name the offending node.
pub fn apply_rule<F: Integrand + ?Sized>(rule: &QuadratureRule, f: &F) -> Result<f64> {
    let mut acc = 0.0;
    for (&z, &b) in rule.nodes.iter().zip(&rule.weights) {
        acc += b * f.eval(z)?;
    }
    Ok(acc)
}

/// One Richardson step on the first dyadic refinement:
/// `(16 (𝕀(f, X_0^1) + 𝕀(f, X_1^1)) - 𝕀(f, X_0^0)) / 15`.
///
/// Only meaningful for the three-point rules `NC2` and `GL2`; both reduce to
/// `NC4` at α = 1/2. For other α the `GL2` version has degree 4 and the
/// `NC2` version stays at degree 2.
pub fn extrapolated<F: Integrand + ?Sized>(family: Family, alpha: Alpha, f: &F) -> Result<f64> {
    if !matches!(family, Family::NC2 | Family::GL2) {
        return Err(Error::InvalidRule(format!(
            "extrapolation is defined for NC2 and GL2, not {family}"
        )));
    }
    let rule = build_rule(family, alpha)?;
    let left = local_apply(&rule, f, DyadicInterval::new(0, 1)?)?;
    let right = local_apply(&rule, f, DyadicInterval::new(1, 1)?)?;
    let whole = local_apply(&rule, f, DyadicInterval::unit())?;
    Ok((16.0 * (left + right) - whole) / 15.0)
}
