use binquad::{dyadic_mass, dyadic_moment, Alpha, DyadicInterval, MomentCache, Polynomial};
use proptest::prelude::*;

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-2.0f64..2.0, 1..=max_degree + 1).prop_map(Polynomial::new)
}

proptest! {
    #[test]
    fn level_masses_add_up(a in alpha_strategy(), k in 0u32..=12) {
        let alpha = Alpha::new(a).unwrap();
        let total: f64 = (0..1u64 << k)
            .map(|j| dyadic_mass(alpha, DyadicInterval::new(j, k).unwrap()))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn child_masses_split_the_parent(a in alpha_strategy(), k in 0u32..40, seed in any::<u64>()) {
        let alpha = Alpha::new(a).unwrap();
        let j = if k == 0 { 0 } else { seed % (1u64 << k) };
        let parent = DyadicInterval::new(j, k).unwrap();
        let (l, r) = parent.children().unwrap();
        let mp = dyadic_mass(alpha, parent);
        prop_assert!((dyadic_mass(alpha, l) - mp * (1.0 - a)).abs() <= 1e-15 * mp);
        prop_assert!((dyadic_mass(alpha, r) - mp * a).abs() <= 1e-15 * mp);
    }

    #[test]
    fn mass_is_multiplicative_over_digits(a in alpha_strategy(), h in 0u32..10, k2 in 0u32..10, seed in any::<u64>()) {
        // μ(X_{j 2^h + i}^{k+h}) = μ(X_j^k) μ(X_i^h)
        let alpha = Alpha::new(a).unwrap();
        let j = seed % (1u64 << k2);
        let i = (seed >> 20) % (1u64 << h);
        let whole = dyadic_mass(alpha, DyadicInterval::new((j << h) + i, k2 + h).unwrap());
        let product = dyadic_mass(alpha, DyadicInterval::new(j, k2).unwrap())
            * dyadic_mass(alpha, DyadicInterval::new(i, h).unwrap());
        prop_assert!((whole - product).abs() <= 1e-14 * product);
    }

    #[test]
    fn moments_are_self_similar(a in alpha_strategy(), s in 0u32..=12) {
        // m_s = (1-α) 2^-s m_s + α 2^-s Σ C(s,q) m_q
        let cache = MomentCache::new(Alpha::new(a).unwrap());
        let m = cache.moments_up_to(s).unwrap();
        let mut right = 0.0;
        let mut binom = 1.0;
        for q in 0..=s as usize {
            right += binom * m[q];
            binom = binom * (s as f64 - q as f64) / (q as f64 + 1.0);
        }
        let scale = (-(s as f64)).exp2();
        let rhs = (1.0 - a) * scale * m[s as usize] + a * scale * right;
        prop_assert!((m[s as usize] - rhs).abs() < 1e-13);
    }

    #[test]
    fn balancing_equation(a in alpha_strategy(), p in poly_strategy(8)) {
        // ∫ p dμ = (1-α) ∫ p(x/2) dμ + α ∫ p((1+x)/2) dμ
        let cache = MomentCache::new(Alpha::new(a).unwrap());
        let lhs = p.integrate(&cache).unwrap();
        let left = p.compose_affine(0.5, 0.0).integrate(&cache).unwrap();
        let right = p.compose_affine(0.5, 0.5).integrate(&cache).unwrap();
        prop_assert!((lhs - ((1.0 - a) * left + a * right)).abs() < 1e-12);
    }

    #[test]
    fn dyadic_change_of_variable(a in alpha_strategy(), s in 0u32..=8, k in 0u32..=6, seed in any::<u64>()) {
        // ∫_{X_j^k} x^s dμ = μ(X_j^k) ∫ ((j + t)/2^k)^s dμ(t), and the two
        // children of X_j^k add up to it.
        let alpha = Alpha::new(a).unwrap();
        let cache = MomentCache::new(alpha);
        let j = seed % (1u64 << k);
        let cell = DyadicInterval::new(j, k).unwrap();
        let h = cell.width();
        let mapped = Polynomial::monomial(s as usize).compose_affine(h, j as f64 * h);
        let expected = dyadic_mass(alpha, cell) * mapped.integrate(&cache).unwrap();
        let got = dyadic_moment(&cache, s, cell).unwrap();
        prop_assert!((got - expected).abs() < 1e-12);
        let (l, r) = cell.children().unwrap();
        let split = dyadic_moment(&cache, s, l).unwrap() + dyadic_moment(&cache, s, r).unwrap();
        prop_assert!((got - split).abs() < 1e-12);
    }

    #[test]
    fn reflection_swaps_alpha(a in alpha_strategy(), p in poly_strategy(6)) {
        // μ_{1-α} is the image of μ_α under x ↦ 1 - x
        let c = MomentCache::new(Alpha::new(a).unwrap());
        let c_ref = MomentCache::new(Alpha::new(1.0 - a).unwrap());
        let direct = p.integrate(&c_ref).unwrap();
        let mirrored = p.compose_affine(-1.0, 1.0).integrate(&c).unwrap();
        prop_assert!((direct - mirrored).abs() < 1e-12);
    }
}

#[test]
fn all_dyadic_moments_agree_with_change_of_variable() {
    for a in [0.05, 0.3, 0.45, 0.5, 0.8] {
        let alpha = Alpha::new(a).unwrap();
        let cache = MomentCache::new(alpha);
        for k in 0..=6u32 {
            for j in 0..1u64 << k {
                let cell = DyadicInterval::new(j, k).unwrap();
                for s in 0..=8u32 {
                    let h = cell.width();
                    let p = Polynomial::monomial(s as usize).compose_affine(h, j as f64 * h);
                    let expected = dyadic_mass(alpha, cell) * p.integrate(&cache).unwrap();
                    let got = dyadic_moment(&cache, s, cell).unwrap();
                    assert!((got - expected).abs() < 1e-12, "a={a} k={k} j={j} s={s}");
                }
            }
        }
    }
}

#[test]
fn moments_decrease_strictly() {
    for a in [0.01, 0.3, 0.7, 0.99] {
        let m = MomentCache::new(Alpha::new(a).unwrap())
            .moments_up_to(60)
            .unwrap();
        assert_eq!(m[0], 1.0);
        assert_eq!(m[1], a);
        assert!(m.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }
}
