mod common;

use gallagher_core::arith::{balance, dk_exact, sieve_dk};
use gallagher_core::kernels::sinc;
use gallagher_core::meansquare::{
    hermitian_form, meansquare_exact, meansquare_quad, rhs_window, selberg_integral,
    selberg_modified,
};
use gallagher_core::sums::DirichletPolynomial;
use gallagher_core::verify::{check_lemma, estimate_constant, random_window_instance, SweepConfig};
use gallagher_core::{
    explicit_constant, ArithmeticSequence64, Complex64, ExponentialSum64, Inequality, Kernel64,
    KernelShape, SelbergWindow64, WindowParams64,
};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = KernelShape> {
    prop_oneof![Just(KernelShape::Rectangular), Just(KernelShape::Cesaro)]
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn expsum(max_terms: usize, span: f64) -> impl Strategy<Value = ExponentialSum64> {
    prop::collection::vec((0.0..span, coeff()), 1..=max_terms)
        .prop_map(|terms| ExponentialSum64::new(terms).unwrap())
}

fn dirichlet(max_n: usize) -> impl Strategy<Value = DirichletPolynomial<f64>> {
    (1u64..20, prop::collection::vec(coeff(), 1..=max_n))
        .prop_map(|(n_min, cs)| DirichletPolynomial::new(n_min, cs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_matches_fourier_integral(s in shape(), delta in 0.05..8.0f64, u in -12.0..12.0f64) {
        let y = u / delta;
        let k = Kernel64::new(s, delta).unwrap();
        let (re, im) = common::fourier_integral(s, delta, y);
        prop_assert!((k.transform(y) - re).abs() < 1e-8);
        prop_assert!(im.abs() < 1e-8);
    }

    #[test]
    fn square_identity(delta in 0.01..10.0f64, y in -50.0..50.0f64) {
        let r = Kernel64::rectangular(delta).unwrap().transform(y);
        let c = Kernel64::cesaro(delta).unwrap().transform(y);
        prop_assert!((c - r * r).abs() <= 1e-15 * c.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn autocorrelation_matches_shifted_product(s in shape(), delta in 0.05..5.0f64, v in -2.5..2.5f64) {
        let lag = v * delta;
        let k = Kernel64::new(s, delta).unwrap();
        let want = common::autocorrelation(s, delta, lag);
        prop_assert!((k.autocorrelation(lag) - want).abs() < 1e-9, "{} vs {}", k.autocorrelation(lag), want);
    }

    #[test]
    fn cesaro_transform_bounded_below_on_window(t in 0.01..100.0f64, theta in 0.001..0.999f64) {
        let w = WindowParams64::new(t, theta).unwrap();
        let k = w.kernel(KernelShape::Cesaro);
        let floor = sinc(theta).powi(2) - 1e-12;
        for i in 0..=10_000 {
            let y = -t + 2.0 * t * i as f64 / 10_000.0;
            prop_assert!(k.transform(y) >= floor);
        }
    }

    #[test]
    fn triangle_inequality(s in expsum(30, 20.0), t in -100.0..100.0f64) {
        prop_assert!(s.eval(t).norm() <= s.l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn conjugation_identity(d in dirichlet(40), t in -50.0..50.0f64) {
        let lhs = d.eval(-t);
        let rhs = d.conj().eval(t).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + d.l1_norm()));
    }

    #[test]
    fn dirichlet_to_exponential_sum(d in dirichlet(40), t in -50.0..50.0f64) {
        let e = d.to_exponential_sum();
        prop_assert_eq!(e.l1_norm(), d.l1_norm());
        prop_assert!((e.eval(t) - d.eval(t)).norm() <= 1e-12 * (1.0 + d.l1_norm()));
    }

    #[test]
    fn window_bilinear_matches_x_integral(
        s in expsum(12, 3.0), t in 0.5..20.0f64, theta in 0.05..0.95f64, sh in shape()
    ) {
        let w = WindowParams64::new(t, theta).unwrap();
        let got = rhs_window(&s, &w, sh).value;
        let want = common::window_integral(&s, sh, w.delta());
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1e-300), "{} vs {}", got, want);
    }

    #[test]
    fn exact_meansquare_matches_pair_loop(s in expsum(20, 5.0), t in 0.1..50.0f64) {
        let got = meansquare_exact(&s, t).unwrap().value;
        let want = common::meansquare_pairs(&s, t);
        prop_assert!((got - want).abs() <= 1e-10 * s.l1_norm().powi(2) * t);
    }

    #[test]
    fn hermitian_imaginary_part_negligible(s in expsum(25, 4.0), t in 0.1..50.0f64) {
        let k = |u: f64| if u == 0.0 { 2.0 * t } else { (std::f64::consts::TAU * u * t).sin() / (std::f64::consts::PI * u) };
        let z = hermitian_form(&s, k, None);
        let scale: f64 = s.l2_norm_sqr() * 2.0 * t;
        prop_assert!(z.im.abs() <= 1e-12 * scale.max(z.re.abs()));
    }

    #[test]
    fn meansquare_nondecreasing_in_t(s in expsum(20, 5.0), t in 0.1..25.0f64) {
        let a = meansquare_exact(&s, t).unwrap().value;
        let b = meansquare_exact(&s, 2.0 * t).unwrap().value;
        prop_assert!(a >= 0.0);
        prop_assert!(b >= a - 1e-12 * b.max(1.0));
    }

    #[test]
    fn quadrature_agrees_with_exact(s in expsum(10, 2.0), t in 0.5..10.0f64) {
        let exact = meansquare_exact(&s, t).unwrap().value;
        let quad = meansquare_quad(&s, t, 1e-13).unwrap().value;
        prop_assert!((exact - quad).abs() <= (1e-9 * exact).max(1e-12));
    }

    #[test]
    fn selberg_matches_brute_force(
        values in prop::collection::vec(-5i32..=5, 250),
        big_n in 20u64..100,
        h in 1.0..19.99f64,
    ) {
        let vals: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let seq = ArithmeticSequence64::new("c", 1, vals).unwrap();
        let win = SelbergWindow64::new(big_n, h.min(big_n as f64 - 0.5)).unwrap();
        let h = win.h();
        let j = selberg_integral(&seq, &win).unwrap();
        let jt = selberg_modified(&seq, &win).unwrap();
        let bj = common::selberg_brute(&seq, big_n, h);
        let bjt = common::selberg_modified_brute(&seq, big_n, h);
        prop_assert!((j - bj).abs() <= 1e-12 * bj.max(1e-300));
        prop_assert!((jt - bjt).abs() <= 1e-12 * bjt.max(1e-300));
    }

    #[test]
    fn lemma_never_violated(seed in any::<u64>(), theta in 0.01..0.99f64, t in 0.5..50.0f64) {
        let inst = random_window_instance::<f64>(seed, theta, t, 25).unwrap();
        let r = check_lemma(&inst.sum, &inst.window).unwrap();
        prop_assert!(r.pass, "ratio {} constant {}", r.ratio, r.constant);
        prop_assert!(r.is_consistent(1e-12));
    }

    #[test]
    fn dk_multiplicative(m in 1u64..100, n in 1u64..100, k in 2u32..5) {
        prop_assume!(common::gcd(m, n) == 1);
        let d = dk_exact(k, 10_000).unwrap();
        let at = |i: u64| d[i as usize - 1];
        prop_assert_eq!(at(m * n), at(m) * at(n));
    }
}

#[test]
fn unit_mass() {
    for s in [KernelShape::Rectangular, KernelShape::Cesaro] {
        for delta in [0.1, 1.0, 7.3] {
            assert!((common::kernel_mass(s, delta) - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn dk_at_primes() {
    let primes: Vec<u64> = (2..=1000u64)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect();
    for k in 1..=5u32 {
        let d = dk_exact(k, 1000).unwrap();
        for &p in &primes {
            assert_eq!(d[p as usize - 1], k as u64);
        }
    }
}

#[test]
fn hyperbola_identity() {
    let limit = 20_000u64;
    let d = dk_exact(2, limit).unwrap();
    let lhs: u64 = d.iter().sum();
    let rhs: u64 = (1..=limit).map(|q| limit / q).sum();
    assert_eq!(lhs, rhs);
}

#[test]
fn balanced_d3_orthogonal_to_log_powers() {
    let d3 = sieve_dk::<f64>(3, 10_000).unwrap();
    let b = balance(&d3, 2).unwrap();
    for j in 0..=2 {
        let basis: Vec<f64> = (1..=10_000u64).map(|n| (n as f64).ln().powi(j)).collect();
        let dot: f64 = b.values().iter().zip(&basis).map(|(x, y)| x * y).sum();
        let scale = b.values().iter().map(|x| x * x).sum::<f64>().sqrt()
            * basis.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(dot.abs() <= 1e-9 * scale, "j={j}: {dot} vs {scale}");
    }
}

#[test]
fn sweep_is_deterministic_and_monotone_in_seed_count() {
    let mut cfg = SweepConfig {
        thetas: vec![0.5],
        ts: vec![5.0, 20.0],
        terms: vec![3, 12],
        seeds: 40,
        base_seed: 7,
        ..SweepConfig::default()
    };
    let a = estimate_constant(Inequality::StarTilde, &cfg).unwrap();
    let b = estimate_constant(Inequality::StarTilde, &cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    cfg.seeds = 80;
    let c = estimate_constant(Inequality::StarTilde, &cfg).unwrap();
    let bound = explicit_constant(0.5, KernelShape::Cesaro).unwrap();
    for (small, large) in a.rows.iter().zip(&c.rows) {
        assert!(large.max_ratio >= small.max_ratio);
        assert!(large.max_ratio <= bound);
    }
}
