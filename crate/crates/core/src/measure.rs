//! Binomial measures on [0, 1]: dyadic cells, their masses, the
//! piecewise-constant approximating densities, and exact moments.
//!
//! The measure `μ_α` gives the right half of every dyadic interval the
//! fraction `α` of its parent's mass. A cell `X_j^k = [j/2^k, (j+1)/2^k)`
//! therefore carries mass `α^n(j) (1-α)^(k-n(j))` where `n(j)` is the number
//! of set bits of `j`.

use std::fmt;
use std::sync::RwLock;

use crate::integrand::Integrand;
use crate::sum::blocked_cell_sum;
use crate::{Error, Result};

/// Largest supported refinement order of a [`DyadicInterval`]; `j` is a `u64`.
pub const MAX_DYADIC_ORDER: u32 = 63;

/// Largest moment order the recursion will produce. Past roughly 1020 the
/// binomial coefficients and `2^s` leave the double-precision range.
pub const MAX_MOMENT_ORDER: u32 = 1000;

/// Largest level accepted by [`reference_integral`].
pub const MAX_REFERENCE_LEVEL: u32 = 24;

/// Parameter of a binomial measure, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - α`, the share of the left half.
    #[inline]
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    /// `α = 1/2`, where `μ_α` is Lebesgue measure and several rules gain a degree.
    #[inline]
    pub fn is_lebesgue(self) -> bool {
        self.0 == 0.5
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

/// The half-open dyadic cell `[j/2^k, (j+1)/2^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    k: u32,
    j: u64,
}

impl DyadicInterval {
    pub fn new(j: u64, k: u32) -> Result<Self> {
        if k > MAX_DYADIC_ORDER || j >= (1u64 << k) {
            return Err(Error::InvalidInterval {
                j,
                k,
                max_order: MAX_DYADIC_ORDER,
            });
        }
        Ok(Self { k, j })
    }

    /// `X_0^0 = [0, 1)`.
    pub const fn unit() -> Self {
        Self { k: 0, j: 0 }
    }

    #[inline]
    pub fn j(&self) -> u64 {
        self.j
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn width(&self) -> f64 {
        (-(self.k as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.j as f64 * self.width()
    }

    pub fn right(&self) -> f64 {
        (self.j + 1) as f64 * self.width()
    }

    /// Maps `t ∈ [0, 1]` affinely onto this cell: `(j + t) / 2^k`.
    #[inline]
    pub fn map_from_unit(&self, t: f64) -> f64 {
        (self.j as f64 + t) * self.width()
    }

    /// Left and right halves, `X_{2j}^{k+1}` and `X_{2j+1}^{k+1}`.
    pub fn children(&self) -> Result<(Self, Self)> {
        Ok((
            Self::new(2 * self.j, self.k + 1)?,
            Self::new(2 * self.j + 1, self.k + 1)?,
        ))
    }

    pub fn parent(&self) -> Option<Self> {
        (self.k > 0).then(|| Self {
            k: self.k - 1,
            j: self.j / 2,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left() <= x && x < self.right()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{}^{}", self.j, self.k)
    }
}

/// Number of 1-digits in the binary expansion of `j`.
#[inline]
pub fn ones_count(j: u64) -> u32 {
    j.count_ones()
}

/// `μ_α(X_j^k) = α^n(j) (1-α)^(k-n(j))`.
pub fn dyadic_mass(alpha: Alpha, interval: DyadicInterval) -> f64 {
    let ones = ones_count(interval.j) as i32;
    let zeros = interval.k as i32 - ones;
    alpha.value().powi(ones) * alpha.complement().powi(zeros)
}

/// Cell masses of one refinement level, tabulated by digit count.
#[derive(Debug, Clone)]
pub struct LevelMasses {
    k: u32,
    by_ones: Vec<f64>,
}

impl LevelMasses {
    pub fn new(alpha: Alpha, k: u32) -> Self {
        let by_ones = (0..=k as i32)
            .map(|n| alpha.value().powi(n) * alpha.complement().powi(k as i32 - n))
            .collect();
        Self { k, by_ones }
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn mass(&self, j: u64) -> f64 {
        self.by_ones[j.count_ones() as usize]
    }
}

/// Density of the order-`k` approximation `μ_{α,k}` at `x`.
///
/// The density is `2^k μ_α(X_j^k)` on each cell. `x = 1` is assigned to the
/// last cell; values outside [0, 1] are rejected.
pub fn density_at(alpha: Alpha, k: u32, x: f64) -> Result<f64> {
    if k > MAX_DYADIC_ORDER {
        return Err(Error::OrderTooLarge {
            requested: k,
            max: MAX_DYADIC_ORDER,
        });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideUnitInterval(x));
    }
    let cells = 1u64 << k;
    let j = ((x * cells as f64) as u64).min(cells - 1);
    let cell = DyadicInterval::new(j, k)?;
    Ok((k as f64).exp2() * dyadic_mass(alpha, cell))
}

/// Memoized moments `m_s = ∫₀¹ x^s dμ_α`.
///
/// Moments satisfy `m_s = α/(2^s - 1) · Σ_{q=1}^{s} C(s,q) m_{s-q}` with
/// `m_0 = 1`. The cache grows on demand; reads after a moment has been
/// materialized only take a shared lock.
#[derive(Debug)]
pub struct MomentCache {
    alpha: Alpha,
    moments: RwLock<Vec<f64>>,
}

impl MomentCache {
    pub fn new(alpha: Alpha) -> Self {
        Self {
            alpha,
            moments: RwLock::new(vec![1.0]),
        }
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn moment(&self, s: u32) -> Result<f64> {
        self.ensure(s)?;
        Ok(self.moments.read().expect("moment cache poisoned")[s as usize])
    }

    /// `[m_0, ..., m_s]`.
    pub fn moments_up_to(&self, s: u32) -> Result<Vec<f64>> {
        self.ensure(s)?;
        Ok(self.moments.read().expect("moment cache poisoned")[..=s as usize].to_vec())
    }

    fn ensure(&self, s: u32) -> Result<()> {
        if s > MAX_MOMENT_ORDER {
            return Err(Error::OrderTooLarge {
                requested: s,
                max: MAX_MOMENT_ORDER,
            });
        }
        if self.moments.read().expect("moment cache poisoned").len() > s as usize {
            return Ok(());
        }
        let mut moments = self.moments.write().expect("moment cache poisoned");
        let alpha = self.alpha.value();
        while moments.len() <= s as usize {
            let order = moments.len() as u32;
            let next = next_moment(alpha, order, &moments);
            if !next.is_finite() {
                return Err(Error::MomentOverflow(order));
            }
            moments.push(next);
        }
        Ok(())
    }
}

impl Clone for MomentCache {
    fn clone(&self) -> Self {
        let moments = self.moments.read().expect("moment cache poisoned").clone();
        Self {
            alpha: self.alpha,
            moments: RwLock::new(moments),
        }
    }
}

fn next_moment(alpha: f64, s: u32, lower: &[f64]) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for q in 1..=s {
        // C(s, q) = C(s, q-1) (s-q+1) / q
        binom = binom * f64::from(s - q + 1) / f64::from(q);
        acc += binom * lower[(s - q) as usize];
    }
    alpha * acc / ((s as f64).exp2() - 1.0)
}

/// `∫_{X_j^k} x^s dμ_α`.
///
/// Computed as `μ(X_j^k) Σ_q C(s,q) a^q h^(s-q) m_{s-q}` with `a = j/2^k`
/// and `h = 2^-k`, which is the integer-index form divided through by
/// `2^(ks)` so no power of `j` is ever formed.
pub fn dyadic_moment(cache: &MomentCache, s: u32, interval: DyadicInterval) -> Result<f64> {
    let moments = cache.moments_up_to(s)?;
    let mass = dyadic_mass(cache.alpha(), interval);
    let h = interval.width();
    let a = interval.left();
    let mut binom = 1.0;
    let mut acc = h.powi(s as i32) * moments[s as usize];
    for q in 1..=s {
        binom = binom * f64::from(s - q + 1) / f64::from(q);
        acc += binom * a.powi(q as i32) * h.powi((s - q) as i32) * moments[(s - q) as usize];
    }
    Ok(mass * acc)
}

/// Numerical reference value of `∫ f dμ_α` at refinement level `k`.
///
/// Each of the `2^k` cells is integrated with the two-node Gauss rule for
/// `μ_α` rescaled onto the cell. For continuous `f` the error is bounded by
/// the modulus of continuity of `f` at scale `2^-k`; for smooth `f` it decays
/// like `2^(-4k)`.
pub fn reference_integral<F>(alpha: Alpha, f: &F, k: u32) -> Result<f64>
where
    F: Integrand + ?Sized,
{
    if k > MAX_REFERENCE_LEVEL {
        return Err(Error::OrderTooLarge {
            requested: k,
            max: MAX_REFERENCE_LEVEL,
        });
    }
    let a = alpha.value();
    let root = (-264.0 * a * a + 264.0 * a + 81.0).sqrt();
    let center = (8.0 * a + 3.0) / 14.0;
    let nodes = [center - root / 42.0, center + root / 42.0];
    let skew = (18.0 * a - 9.0) / (2.0 * root);
    let weights = [0.5 - skew, 0.5 + skew];

    let masses = LevelMasses::new(alpha, k);
    let width = (-(k as f64)).exp2();
    blocked_cell_sum(k, |j| {
        let left = j as f64;
        let local = weights[0] * f.eval((left + nodes[0]) * width)?
            + weights[1] * f.eval((left + nodes[1]) * width)?;
        Ok(masses.mass(j) * local)
    })
}
