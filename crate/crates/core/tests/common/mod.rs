//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls the crate's quadrature or summation code; the rules and
//! loops are written out directly so that agreement means something.

#![allow(dead_code)]

use gallagher_core::arith::ArithmeticSequence;
use gallagher_core::{Complex64, ExponentialSum64, KernelShape};

/// 8-point Gauss–Legendre on [-1, 1], from the standard tables.
const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Composite 8-point rule with `panels` equal panels on `[a, b]`. Exact for
/// polynomials of degree 15 on each panel.
pub fn gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + h / 2.0;
        let half = h / 2.0;
        let mut s = 0.0;
        for &(x, w) in &GL8 {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

/// `gl8` over consecutive breakpoints.
pub fn gl8_pieces<F: FnMut(f64) -> f64>(mut f: F, bps: &[f64], panels: usize) -> f64 {
    bps.windows(2)
        .map(|w| gl8(&mut f, w[0], w[1], panels))
        .sum()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Closed-form kernel values written out independently of the crate.
pub fn kernel_value(shape: KernelShape, delta: f64, x: f64) -> f64 {
    match shape {
        KernelShape::Rectangular => {
            if x.abs() <= delta / 2.0 {
                1.0 / delta
            } else {
                0.0
            }
        }
        KernelShape::Cesaro => (1.0 / delta - x.abs() / (delta * delta)).max(0.0),
    }
}

fn radius(shape: KernelShape, delta: f64) -> f64 {
    match shape {
        KernelShape::Rectangular => delta / 2.0,
        KernelShape::Cesaro => delta,
    }
}

/// `∫ k(x) e(-x y) dx` by direct quadrature over the support, returned as
/// `(re, im)`. Panels are chosen to resolve the oscillation.
pub fn fourier_integral(shape: KernelShape, delta: f64, y: f64) -> (f64, f64) {
    let r = radius(shape, delta);
    let panels = 16 + (40.0 * r * y.abs()).ceil() as usize;
    let tau = std::f64::consts::TAU;
    // The rectangular kernel is 1/delta on the closed support; sample the
    // interior only so that the endpoint convention is irrelevant.
    let k = |x: f64| kernel_value(shape, delta, x.clamp(-r * (1.0 - 1e-15), r * (1.0 - 1e-15)));
    let re = gl8(|x| k(x) * (tau * x * y).cos(), -r, 0.0, panels)
        + gl8(|x| k(x) * (tau * x * y).cos(), 0.0, r, panels);
    let im = -gl8(|x| k(x) * (tau * x * y).sin(), -r, 0.0, panels)
        - gl8(|x| k(x) * (tau * x * y).sin(), 0.0, r, panels);
    (re, im)
}

/// `∫ k` over the support.
pub fn kernel_mass(shape: KernelShape, delta: f64) -> f64 {
    let r = radius(shape, delta);
    let k = |x: f64| kernel_value(shape, delta, x.clamp(-r * (1.0 - 1e-15), r * (1.0 - 1e-15)));
    gl8(k, -r, 0.0, 4) + gl8(k, 0.0, r, 4)
}

/// `∫ k(x) k(x + lag) dx`, exact up to rounding: the product is a polynomial
/// of degree at most 2 between kinks.
pub fn autocorrelation(shape: KernelShape, delta: f64, lag: f64) -> f64 {
    let r = radius(shape, delta);
    let bps = sorted(
        [-r, 0.0, r, -lag - r, -lag, -lag + r]
            .into_iter()
            .filter(|&x| (-r..=r).contains(&x))
            .collect(),
    );
    gl8_pieces(
        |x| kernel_value(shape, delta, x) * kernel_value(shape, delta, x + lag),
        &bps,
        1,
    )
}

/// `δ^{-2} ∫ |Σ_ν w(ν - x) c(ν)|^2 dx` integrated directly in `x`.
///
/// Rectangular windows are `x < ν <= x + δ`; Cesàro windows weight by
/// `1 - |ν - x|/δ`. The integrand is piecewise polynomial of degree <= 2 in
/// `x`, so the rule is exact on each piece.
pub fn window_integral(s: &ExponentialSum64, shape: KernelShape, delta: f64) -> f64 {
    let terms: Vec<(f64, Complex64)> = s.terms().collect();
    let bps = sorted(
        terms
            .iter()
            .flat_map(|&(nu, _)| match shape {
                KernelShape::Rectangular => vec![nu - delta, nu],
                KernelShape::Cesaro => vec![nu - delta, nu, nu + delta],
            })
            .collect(),
    );
    let field = |x: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(nu, c) in &terms {
            let w = match shape {
                KernelShape::Rectangular => {
                    if x < nu && nu <= x + delta {
                        1.0
                    } else {
                        0.0
                    }
                }
                KernelShape::Cesaro => (1.0 - (nu - x).abs() / delta).max(0.0),
            };
            acc += c * w;
        }
        acc.norm_sqr()
    };
    gl8_pieces(field, &bps, 1) / (delta * delta)
}

/// `∫_{-T}^{T} |S|^2` from the closed-form pair integral, written as a plain
/// double loop.
pub fn meansquare_pairs(s: &ExponentialSum64, t: f64) -> f64 {
    let terms: Vec<(f64, Complex64)> = s.terms().collect();
    let mut total = 0.0;
    for &(a, ca) in &terms {
        for &(b, cb) in &terms {
            let u = a - b;
            let k = if u == 0.0 {
                2.0 * t
            } else {
                (std::f64::consts::TAU * u * t).sin() / (std::f64::consts::PI * u)
            };
            total += (ca * cb.conj()).re * k;
        }
    }
    total
}

fn value(seq: &ArithmeticSequence<f64>, n: u64) -> f64 {
    seq.values()[(n - seq.n_min()) as usize]
}

/// `Σ_{N < x <= 2N} (Σ_{x < n <= x + h} c(n))^2`, recomputing every window.
pub fn selberg_brute(seq: &ArithmeticSequence<f64>, big_n: u64, h: f64) -> f64 {
    let m = h.floor() as u64;
    let mut total = 0.0;
    for x in big_n + 1..=2 * big_n {
        let mut inner = 0.0;
        for n in x + 1..=x + m {
            inner += value(seq, n);
        }
        total += inner * inner;
    }
    total
}

/// `Σ_{N < x <= 2N} (Σ_{|n - x| <= h} (1 - |n - x|/h) c(n))^2`.
pub fn selberg_modified_brute(seq: &ArithmeticSequence<f64>, big_n: u64, h: f64) -> f64 {
    let m = h.floor() as u64;
    let mut total = 0.0;
    for x in big_n + 1..=2 * big_n {
        let mut inner = 0.0;
        for n in x - m..=x + m {
            inner += (1.0 - n.abs_diff(x) as f64 / h) * value(seq, n);
        }
        total += inner * inner;
    }
    total
}

/// `d_3(n)` for `n <= limit` by enumerating ordered triples `a b c <= limit`.
pub fn d3_triples(limit: u64) -> Vec<u64> {
    let mut out = vec![0u64; limit as usize + 1];
    for a in 1..=limit {
        for b in 1..=limit / a {
            for c in 1..=limit / (a * b) {
                out[(a * b * c) as usize] += 1;
            }
        }
    }
    out
}

/// Möbius function by trial division.
pub fn mu_trial(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
