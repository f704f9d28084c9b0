//! Mean-square integrals of exponential sums and Dirichlet polynomials, the
//! windowed majorants that bound them, and the discrete Selberg integrals.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::ArithmeticSequence;
use crate::error::{invalid, Result};
use crate::kernels::{sinc_pi, KernelShape, WindowParams};
use crate::quadrature::{
    integrate_adaptive, integrate_refined_once, uniform_breakpoints, AdaptiveOptions, GaussLegendre,
};
use crate::scalar::Scalar;
use crate::summation::{compensated_sum, pairwise_sum, CompensatedSum, ComplexSum};
use crate::sums::{DirichletPolynomial, ExponentialSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationMethod {
    /// Closed-form double sum over pairs of terms.
    ExactBilinear,
    /// Closed-form sum over pieces on which the integrand is constant.
    ExactPiecewise,
    PanelQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub method: IntegrationMethod,
    pub est_abs_error: T,
}

impl<T: Scalar> IntegralResult<T> {
    fn new(value: T, method: IntegrationMethod, est_abs_error: T) -> Self {
        // All integrands are squared moduli; only rounding can push below 0.
        Self {
            value: value.max(T::zero()),
            method,
            est_abs_error,
        }
    }

    fn zero(method: IntegrationMethod) -> Self {
        Self::new(T::zero(), method, T::zero())
    }
}

/// `Σ_{i,j} c_i conj(c_j) K(ν_i - ν_j)` for an even real kernel `K`.
///
/// When `radius` is given, `K` is taken to vanish for `|ν_i - ν_j| >= radius`
/// and only nearby pairs are visited. Rows are reduced with compensation and
/// then combined pairwise in row order, so the result is deterministic. The
/// imaginary part is zero in exact arithmetic; it is returned so callers can
/// check it.
pub fn hermitian_form<T: Scalar>(
    s: &ExponentialSum<T>,
    kernel: impl Fn(T) -> T,
    radius: Option<T>,
) -> Complex<T> {
    let freqs = s.frequencies();
    let coeffs = s.coefficients();
    let mut rows_re = Vec::with_capacity(freqs.len());
    let mut rows_im = Vec::with_capacity(freqs.len());
    for (i, (&nu_i, &c_i)) in freqs.iter().zip(coeffs).enumerate() {
        let (lo, hi) = match radius {
            Some(r) => (
                freqs[..i].partition_point(|&nu| nu_i - nu >= r),
                i + freqs[i..].partition_point(|&nu| nu - nu_i < r),
            ),
            None => (0, freqs.len()),
        };
        let mut acc = ComplexSum::new();
        for j in lo..hi {
            acc.add(coeffs[j] * kernel(nu_i - freqs[j]));
        }
        let row = c_i * acc.value().conj();
        rows_re.push(row.re);
        rows_im.push(row.im);
    }
    Complex::new(pairwise_sum(&rows_re), pairwise_sum(&rows_im))
}

/// `∫_{-T}^{T} |S(t)|^2 dt` from the pair kernel `sin(2π u T) / (π u)`.
pub fn meansquare_exact<T: Scalar>(s: &ExponentialSum<T>, t: T) -> Result<IntegralResult<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid(
            "T",
            format!("must be positive and finite, got {t}"),
        ));
    }
    let two_t = t + t;
    let form = hermitian_form(s, |u| two_t * sinc_pi(T::TAU() * u * t), None);
    let l1 = s.l1_norm();
    let n = T::from_usize(s.len().max(1)).unwrap();
    let err = T::lit(4.0) * T::eps() * n * two_t * l1 * l1;
    Ok(IntegralResult::new(
        form.re,
        IntegrationMethod::ExactBilinear,
        err,
    ))
}

/// `∫_{-T}^{T} |S(t)|^2 dt` by adaptive Gauss–Legendre panels, refined until
/// the estimated absolute error is below `tol`.
pub fn meansquare_quad<T: Scalar>(
    s: &ExponentialSum<T>,
    t: T,
    tol: T,
) -> Result<IntegralResult<T>> {
    let opts = AdaptiveOptions {
        abs_tol: tol.to_f64_lossy(),
        rel_tol: 0.0,
        ..Default::default()
    };
    meansquare_quad_with(s, t, &opts)
}

/// [`meansquare_quad`] with full control over the stopping rule.
pub fn meansquare_quad_with<T: Scalar>(
    s: &ExponentialSum<T>,
    t: T,
    opts: &AdaptiveOptions,
) -> Result<IntegralResult<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(invalid(
            "T",
            format!("must be positive and finite, got {t}"),
        ));
    }
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if s.is_empty() {
        return Ok(IntegralResult::zero(IntegrationMethod::PanelQuadrature));
    }
    // |S|^2 is band-limited to the frequency span; one panel per period.
    let periods = ((t + t) * s.span()).ceil().to_usize().unwrap_or(usize::MAX);
    let panels = periods.clamp(1, (opts.max_panels / 4).max(1));
    let bps = uniform_breakpoints(-t, t, panels);
    let q = integrate_adaptive(|x| s.eval_norm_sqr(x), &bps, opts)?;
    Ok(IntegralResult::new(
        q.value,
        IntegrationMethod::PanelQuadrature,
        q.abs_error,
    ))
}

/// `δ^{-2} ∫_R |Σ_ν w(ν - x) c(ν)|^2 dx` for the window of the given shape,
/// evaluated as `Σ c_i conj(c_j) A(ν_i - ν_j)` with `A` the kernel
/// autocorrelation.
///
/// For the rectangular shape the window is the half-open `(x, x + δ]`; after
/// integrating over all `x` this equals the centred kernel's value. For the
/// Cesàro shape the weights are `1 - |ν - x|/δ` on `|ν - x| <= δ`.
pub fn rhs_window<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
    shape: KernelShape,
) -> IntegralResult<T> {
    let k = w.kernel(shape);
    let radius = k.radius() + k.radius();
    let form = hermitian_form(s, |u| k.autocorrelation(u), Some(radius));
    let l1 = s.l1_norm();
    let n = T::from_usize(s.len().max(1)).unwrap();
    let err = T::lit(4.0) * T::eps() * n * k.autocorrelation(T::zero()) * l1 * l1;
    IntegralResult::new(form.re, IntegrationMethod::ExactBilinear, err)
}

/// The integer window `N < x <= 2N` with short-interval length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelbergWindow<T> {
    n: u64,
    h: T,
}

impl<T: Scalar> SelbergWindow<T> {
    pub fn new(n: u64, h: T) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N", "must be positive"));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(invalid(
                "h",
                format!("must be positive and finite, got {h}"),
            ));
        }
        if !(h < T::from_u64_lossy(n)) {
            return Err(invalid("h", format!("must be smaller than N={n}, got {h}")));
        }
        Ok(Self { n, h })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Largest integer offset `m` with `m <= h`.
    pub fn reach(&self) -> u64 {
        self.h.floor().to_u64().unwrap_or(0)
    }

    /// The index range `[N - ⌈h⌉, 2N + ⌈h⌉]` a coefficient sequence must cover.
    pub fn required_range(&self) -> (u64, u64) {
        let c = self.h.ceil().to_u64().unwrap_or(0);
        ((self.n.saturating_sub(c)).max(1), 2 * self.n + c)
    }

    fn check(&self, seq: &ArithmeticSequence<T>) -> Result<()> {
        let (lo, hi) = self.required_range();
        seq.ensure_covers(lo, hi)
    }
}

const RESYNC_INTERVAL: u64 = 1 << 16;

/// `J(N, h) = Σ_{N < x <= 2N} |Σ_{x < n <= x + h} c(n)|^2`.
///
/// The inner sum slides with `x`; it is carried in a compensated accumulator
/// and recomputed from scratch every 2^16 steps.
pub fn selberg_integral<T: Scalar>(
    seq: &ArithmeticSequence<T>,
    win: &SelbergWindow<T>,
) -> Result<T> {
    win.check(seq)?;
    let m = win.reach();
    let big_n = win.n;
    let c = |n: u64| seq.values()[(n - seq.n_min()) as usize];
    let direct = |x: u64| compensated_sum((x + 1..=x + m).map(c));

    let mut total = CompensatedSum::new();
    let mut inner = CompensatedSum::new();
    for (step, x) in (big_n + 1..=2 * big_n).enumerate() {
        if (step as u64).is_multiple_of(RESYNC_INTERVAL) {
            inner = CompensatedSum::new();
            inner.add(direct(x));
        } else if m > 0 {
            inner.add(c(x + m));
            inner.sub(c(x));
        }
        let v = inner.value();
        total.add(v * v);
    }
    Ok(total.value())
}

/// `J~(N, h) = Σ_{N < x <= 2N} |Σ_{|n - x| <= h} (1 - |n - x|/h) c(n)|^2`.
///
/// The weighted inner sum is `A(x) - B(x)/h` with `A` the plain window sum
/// and `B = Σ |n - x| c(n)`; `B` is updated from the left and right half-window
/// sums, giving O(N) total work.
pub fn selberg_modified<T: Scalar>(
    seq: &ArithmeticSequence<T>,
    win: &SelbergWindow<T>,
) -> Result<T> {
    win.check(seq)?;
    let m = win.reach();
    let h = win.h;
    let mt = T::from_u64_lossy(m);
    let big_n = win.n;
    let c = |n: u64| seq.values()[(n - seq.n_min()) as usize];

    let mut total = CompensatedSum::new();
    let (mut a, mut b, mut l, mut r) = (
        CompensatedSum::<T>::new(),
        CompensatedSum::<T>::new(),
        CompensatedSum::<T>::new(),
        CompensatedSum::<T>::new(),
    );
    for (step, x) in (big_n + 1..=2 * big_n).enumerate() {
        if (step as u64).is_multiple_of(RESYNC_INTERVAL) {
            a = compensated_sum((x - m..=x + m).map(c)).into_acc();
            b = compensated_sum((x - m..=x + m).map(|n| T::from_u64_lossy(n.abs_diff(x)) * c(n)))
                .into_acc();
            l = compensated_sum((x + 1 - m..=x).map(c)).into_acc();
            r = compensated_sum((x + 1..=x + m).map(c)).into_acc();
        } else {
            // Advance from x - 1 to x.
            let prev = x - 1;
            let leaving = c(prev - m);
            let entering = c(prev + m + 1);
            let (lv, rv): (T, T) = (l.value(), r.value());
            a.add(entering);
            a.sub(leaving);
            b.add(mt * entering);
            b.sub(mt * leaving);
            b.add(lv);
            b.sub(rv);
            if m > 0 {
                l.add(c(x));
                l.sub(c(prev + 1 - m));
                r.add(entering);
                r.sub(c(x));
            }
        }
        let v = a.value() - b.value() / h;
        total.add(v * v);
    }
    Ok(total.value())
}

trait IntoAcc<T> {
    fn into_acc(self) -> CompensatedSum<T>;
}

impl<T: Scalar> IntoAcc<T> for T {
    fn into_acc(self) -> CompensatedSum<T> {
        let mut acc = CompensatedSum::new();
        acc.add(self);
        acc
    }
}

fn check_t<T: Scalar>(t: T, strict_one: bool) -> Result<()> {
    let lower = if strict_one { T::one() } else { T::zero() };
    if !(t > lower) || !t.is_finite() {
        let bound = if strict_one { "1" } else { "0" };
        return Err(invalid(
            "T",
            format!("must be finite and > {bound}, got {t}"),
        ));
    }
    Ok(())
}

/// `ln(b/a)` for `0 < a <= b`, accurate when `b/a` is close to 1.
fn log_ratio<T: Scalar>(a: T, b: T) -> T {
    ((b - a) / a).ln_1p()
}

/// Sorted support `(n, a_n)` of a Dirichlet polynomial as parallel vectors.
fn support_of<T: Scalar>(d: &DirichletPolynomial<T>) -> (Vec<T>, Vec<Complex<T>>) {
    d.support().map(|(n, c)| (T::from_u64_lossy(n), c)).unzip()
}

fn sorted_dedup<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.to_f64_lossy().total_cmp(&b.to_f64_lossy()));
    v.dedup();
    v
}

/// `T^2 ∫_0^∞ |Σ_{y < n <= y e^{1/T}} a_n|^2 dy/y`, evaluated exactly: the
/// inner sum only changes at `y = n` and `y = n e^{-1/T}`, and each constant
/// piece contributes `|sum|^2 ln(b/a)`.
pub fn rhs_gallagher_series<T: Scalar>(
    d: &DirichletPolynomial<T>,
    t: T,
) -> Result<IntegralResult<T>> {
    check_t(t, false)?;
    let (ns, cs) = support_of(d);
    if ns.is_empty() {
        return Ok(IntegralResult::zero(IntegrationMethod::ExactPiecewise));
    }
    let tau = t.recip().exp();
    let bps = sorted_dedup(ns.iter().flat_map(|&n| [n / tau, n]).collect());
    let mut pieces = Vec::with_capacity(bps.len());
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1]);
        let y = a + (b - a) / T::lit(2.0);
        let lo = ns.partition_point(|&n| n <= y);
        let hi = ns.partition_point(|&n| n <= y * tau);
        if lo >= hi {
            continue;
        }
        let s = cs[lo..hi]
            .iter()
            .copied()
            .collect::<ComplexSum<T>>()
            .value();
        pieces.push(s.norm_sqr() * log_ratio(a, b));
    }
    let value = t * t * pairwise_sum(&pieces);
    let err = T::lit(8.0) * T::eps() * T::from_usize(pieces.len().max(1)).unwrap() * value;
    Ok(IntegralResult::new(
        value,
        IntegrationMethod::ExactPiecewise,
        err,
    ))
}

const THEOREM_RULE_ORDER: usize = 16;

/// Main term of the Cesàro-weighted Dirichlet-polynomial bound:
/// `T^2 ∫_1^∞ |Σ_{|n - y| <= y/T} (1 - |n - y|/(y/T)) a_n|^2 dy/y`.
///
/// Panels are delimited by `n/(1 + 1/T)`, `n` and `n/(1 - 1/T)` for every
/// `n` in the support, so the integrand is smooth on each; every panel gets
/// a 16-point Gauss–Legendre rule refined once by bisection.
pub fn rhs_theorem_main<T: Scalar>(d: &DirichletPolynomial<T>, t: T) -> Result<IntegralResult<T>> {
    rhs_theorem_main_on(d, t, T::one(), T::infinity())
}

/// [`rhs_theorem_main`] with the `y`-integral restricted to `[lo, hi]`
/// (`hi` may be infinite).
pub fn rhs_theorem_main_on<T: Scalar>(
    d: &DirichletPolynomial<T>,
    t: T,
    lo: T,
    hi: T,
) -> Result<IntegralResult<T>> {
    check_t(t, true)?;
    if !(lo > T::zero()) || !(hi > lo) {
        return Err(invalid(
            "range",
            format!("need 0 < lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let (ns, cs) = support_of(d);
    if ns.is_empty() {
        return Ok(IntegralResult::zero(IntegrationMethod::PanelQuadrature));
    }
    let inv_t = t.recip();
    let mut bps: Vec<T> = ns
        .iter()
        .flat_map(|&n| [n / (T::one() + inv_t), n, n / (T::one() - inv_t)])
        .filter(|&y| y > lo && y < hi)
        .collect();
    bps.push(lo);
    if hi.is_finite() {
        bps.push(hi);
    }
    let bps = sorted_dedup(bps);

    let integrand = |y: T| {
        let first = ns.partition_point(|&n| n < y - y * inv_t);
        let last = ns.partition_point(|&n| n <= y + y * inv_t);
        let mut acc = ComplexSum::new();
        for k in first..last {
            let weight = T::one() - (ns[k] - y).abs() * t / y;
            if weight > T::zero() {
                acc.add(cs[k] * weight);
            }
        }
        acc.value().norm_sqr() / y
    };
    let rule = GaussLegendre::new(THEOREM_RULE_ORDER);
    let q = integrate_refined_once(integrand, &bps, &rule);
    let t2 = t * t;
    Ok(IntegralResult::new(
        t2 * q.value,
        IntegrationMethod::PanelQuadrature,
        t2 * q.abs_error,
    ))
}

/// Default `kappa` in `Δ(y, T) = y/T + kappa y/T^2`.
pub const DEFAULT_KAPPA: f64 = 1.0;

/// Tail term `∫_1^∞ (Σ_{|n - y| <= Δ} |a_n|)^2 dy/y` with
/// `Δ(y, T) = y/T + kappa y/T^2`, evaluated exactly piece by piece.
pub fn rhs_theorem_tail<T: Scalar>(
    d: &DirichletPolynomial<T>,
    t: T,
    kappa: T,
) -> Result<IntegralResult<T>> {
    check_t(t, true)?;
    if !(kappa >= T::zero()) || !kappa.is_finite() {
        return Err(invalid(
            "kappa",
            format!("must be finite and >= 0, got {kappa}"),
        ));
    }
    let eta = t.recip() + kappa / (t * t);
    if !(eta < T::one()) {
        return Err(invalid(
            "kappa",
            format!("1/T + kappa/T^2 must be < 1 (got {eta}); the window would be unbounded"),
        ));
    }
    let (ns, cs) = support_of(d);
    if ns.is_empty() {
        return Ok(IntegralResult::zero(IntegrationMethod::ExactPiecewise));
    }
    let mags: Vec<T> = cs.iter().map(|c| c.norm()).collect();
    let one = T::one();
    let mut bps: Vec<T> = ns
        .iter()
        .flat_map(|&n| [n / (one + eta), n / (one - eta)])
        .filter(|&y| y > one)
        .collect();
    bps.push(one);
    let bps = sorted_dedup(bps);

    let mut pieces = Vec::with_capacity(bps.len());
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1]);
        let y = a + (b - a) / T::lit(2.0);
        let first = ns.partition_point(|&n| n < y - y * eta);
        let last = ns.partition_point(|&n| n <= y + y * eta);
        if first >= last {
            continue;
        }
        let s = compensated_sum(mags[first..last].iter().copied());
        pieces.push(s * s * log_ratio(a, b));
    }
    let value = pairwise_sum(&pieces);
    let err = T::lit(8.0) * T::eps() * T::from_usize(pieces.len().max(1)).unwrap() * value;
    Ok(IntegralResult::new(
        value,
        IntegrationMethod::ExactPiecewise,
        err,
    ))
}
