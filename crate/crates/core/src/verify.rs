//! Verification reports for the mean-square inequalities.
//!
//! Inequalities with a proven constant (the two windowed bounds, the
//! Dirichlet-series form of the rectangular bound, and the Plancherel
//! identity) are asserted against that constant with a small relative slack.
//! Asymptotic bounds are only asserted against a generous, configurable cap;
//! their ratios are recorded for trend analysis.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{sup_norm, ArithmeticSequence};
use crate::error::{invalid, Error, Result};
use crate::export::format_g17;
use crate::kernels::{explicit_constant, KernelShape, WindowParams};
use crate::meansquare::{
    meansquare_exact, rhs_gallagher_series, rhs_theorem_main, rhs_theorem_main_on,
    rhs_theorem_tail, rhs_window, selberg_integral, selberg_modified, SelbergWindow,
};
use crate::quadrature::{integrate_adaptive, uniform_breakpoints, AdaptiveOptions};
use crate::scalar::Scalar;
use crate::sums::{critical_line_poly, DirichletPolynomial, ExponentialSum};

/// Relative slack on the theorem-backed assertions (for `f64`).
pub const THEOREM_SLACK: f64 = 1e-10;
/// Default cap on the ratio for the Dirichlet-polynomial bounds.
pub const DEFAULT_THEOREM_CAP: f64 = 100.0;
/// Default cap on the ratio for the modified-vs-plain Selberg comparison.
pub const DEFAULT_SELBERG_CAP: f64 = 10.0;
/// Relative agreement required of the two sides of the Plancherel identity.
pub const PLANCHEREL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// Rectangular-window mean-square bound.
    Star,
    /// Cesàro-window mean-square bound.
    StarTilde,
    /// Rectangular bound for Dirichlet polynomials, in `dy/y` form.
    StarStar,
    /// Cesàro bound for Dirichlet polynomials with the tail term.
    StarStarTilde,
    Corollary,
    ClSelberg,
    Plancherel,
}

impl Inequality {
    pub const ALL: [Inequality; 7] = [
        Self::Star,
        Self::StarTilde,
        Self::StarStar,
        Self::StarStarTilde,
        Self::Corollary,
        Self::ClSelberg,
        Self::Plancherel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Star => "star",
            Self::StarTilde => "star-tilde",
            Self::StarStar => "star-star",
            Self::StarStarTilde => "star-star-tilde",
            Self::Corollary => "corollary",
            Self::ClSelberg => "cl-selberg",
            Self::Plancherel => "plancherel",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| invalid("inequality", format!("unknown inequality `{s}`")))
    }
}

/// What the `constant` of a report is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// A constant that makes the inequality a theorem.
    Explicit,
    /// An empirical cap for an asymptotic bound.
    Cap,
    /// Target value 1 of an identity, with a relative tolerance.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsTerm {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs_terms: Vec<RhsTerm>,
    pub ratio: f64,
    pub constant: f64,
    pub bound: BoundKind,
    pub pass: bool,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn build(
        inequality: Inequality,
        lhs: f64,
        rhs_terms: Vec<RhsTerm>,
        constant: f64,
        bound: BoundKind,
        slack: f64,
    ) -> Self {
        let rhs = rhs_total(&rhs_terms);
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        use BoundKind::*;
        let pass = match bound {
            Explicit => lhs <= constant * rhs * (1.0 + slack),
            Cap => ratio <= constant,
            Identity => (lhs - rhs).abs() <= slack * lhs.abs().max(rhs.abs()),
        };
        Self {
            inequality,
            lhs,
            rhs_terms,
            ratio,
            constant,
            bound,
            pass,
            seed: None,
            params: BTreeMap::new(),
        }
    }

    pub fn rhs(&self) -> f64 {
        rhs_total(&self.rhs_terms)
    }

    pub fn rhs_term(&self, label: &str) -> Option<f64> {
        self.rhs_terms
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.value)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// `ratio * Σ rhs` reproduces `lhs` to the given relative tolerance.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let rhs = self.rhs();
        if rhs == 0.0 {
            return self.ratio == 0.0 && self.lhs == 0.0 || self.ratio.is_infinite();
        }
        (self.ratio * rhs - self.lhs).abs() <= tol * self.lhs.abs()
    }
}

fn rhs_total(terms: &[RhsTerm]) -> f64 {
    crate::summation::compensated_sum(terms.iter().map(|t| t.value))
}

fn term(label: &str, value: f64) -> RhsTerm {
    RhsTerm {
        label: label.to_string(),
        value,
    }
}

fn slack_for<T: Scalar>() -> f64 {
    THEOREM_SLACK.max(1e3 * T::eps().to_f64_lossy())
}

fn window_report<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
    shape: KernelShape,
) -> Result<VerificationReport> {
    let lhs = meansquare_exact(s, w.t())?.value.to_f64_lossy();
    let rhs = rhs_window(s, w, shape).value.to_f64_lossy();
    let constant = explicit_constant(w.theta(), shape)?.to_f64_lossy();
    let inequality = match shape {
        KernelShape::Rectangular => Inequality::Star,
        KernelShape::Cesaro => Inequality::StarTilde,
    };
    let label = match shape {
        KernelShape::Rectangular => "rectangular-window",
        KernelShape::Cesaro => "cesaro-window",
    };
    Ok(VerificationReport::build(
        inequality,
        lhs,
        vec![term(label, rhs)],
        constant,
        BoundKind::Explicit,
        slack_for::<T>(),
    )
    .with_param("T", w.t().to_f64_lossy())
    .with_param("theta", w.theta().to_f64_lossy())
    .with_param("delta", w.delta().to_f64_lossy())
    .with_param("terms", s.len() as f64))
}

/// Cesàro-window bound: `∫_{-T}^{T} |S|^2 <= (πθ/sin πθ)^4 · rhs`.
pub fn check_lemma<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
) -> Result<VerificationReport> {
    window_report(s, w, KernelShape::Cesaro)
}

/// Rectangular-window bound with constant `(πθ/sin πθ)^2`.
pub fn check_gallagher_original<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
) -> Result<VerificationReport> {
    window_report(s, w, KernelShape::Rectangular)
}

/// Constant of the `dy/y` form of the rectangular bound.
///
/// Substituting `x = θ log y` with `θ = 1/2π` into the rectangular bound
/// turns `δ^{-2} ∫ dx` into `2π T^2 ∫ dy/y`, so the admissible constant is
/// `2π (πθ/sin πθ)^2 = 2π (1/2 / sin(1/2))^2`.
pub fn dirichlet_series_constant() -> f64 {
    let theta = 1.0 / std::f64::consts::TAU;
    std::f64::consts::TAU
        * explicit_constant(theta, KernelShape::Rectangular).expect("theta in (0, 1)")
}

/// `∫_{-T}^{T} |D|^2 <= C · T^2 ∫_0^∞ |Σ_{y < n <= y e^{1/T}} a_n|^2 dy/y`.
pub fn check_gallagher_series<T: Scalar>(
    d: &DirichletPolynomial<T>,
    t: T,
) -> Result<VerificationReport> {
    let lhs = meansquare_exact(&d.to_exponential_sum(), t)?
        .value
        .to_f64_lossy();
    let rhs = rhs_gallagher_series(d, t)?.value.to_f64_lossy();
    Ok(VerificationReport::build(
        Inequality::StarStar,
        lhs,
        vec![term("log-window", rhs)],
        dirichlet_series_constant(),
        BoundKind::Explicit,
        slack_for::<T>(),
    )
    .with_param("T", t.to_f64_lossy())
    .with_param("n_min", d.n_min() as f64)
    .with_param("n_max", d.n_max() as f64))
}

/// Cesàro bound for Dirichlet polynomials, main term plus tail term; the
/// ratio is asserted only against `cap`.
pub fn check_theorem<T: Scalar>(
    d: &DirichletPolynomial<T>,
    t: T,
    kappa: T,
    cap: f64,
) -> Result<VerificationReport> {
    let lhs = meansquare_exact(&d.to_exponential_sum(), t)?
        .value
        .to_f64_lossy();
    let main = rhs_theorem_main(d, t)?.value.to_f64_lossy();
    let tail = rhs_theorem_tail(d, t, kappa)?.value.to_f64_lossy();
    Ok(VerificationReport::build(
        Inequality::StarStarTilde,
        lhs,
        vec![term("main", main), term("tail", tail)],
        cap,
        BoundKind::Cap,
        0.0,
    )
    .with_param("T", t.to_f64_lossy())
    .with_param("kappa", kappa.to_f64_lossy())
    .with_param("n_min", d.n_min() as f64)
    .with_param("n_max", d.n_max() as f64))
}

/// Critical-line bound: `P(t) = Σ_{N1<=n<=N2} w(n) b(n) n^{-1/2-it}` against
/// the Cesàro main term on `[N1/2, 3N2/2]` plus `N2^{1+ε}/T^2`.
#[allow(clippy::too_many_arguments)]
pub fn check_corollary<T: Scalar>(
    w_seq: &ArithmeticSequence<T>,
    b_seq: &ArithmeticSequence<T>,
    n1: u64,
    n2: u64,
    t: T,
    epsilon: T,
    cap: f64,
) -> Result<VerificationReport> {
    if !(epsilon > T::zero()) {
        return Err(invalid("epsilon", "must be positive"));
    }
    let cl = critical_line_poly(w_seq, b_seq, n1, n2)?;
    // P(t) is D(-t) for the polynomial with coefficients a_n; its mean square
    // equals that of the conjugated polynomial at +t.
    let lhs = meansquare_exact(&cl.poly.conj().to_exponential_sum(), t)?
        .value
        .to_f64_lossy();
    let lo = T::from_u64_lossy(n1) / T::lit(2.0);
    let hi = T::lit(1.5) * T::from_u64_lossy(n2);
    let main = rhs_theorem_main_on(&cl.poly, t, lo, hi)?
        .value
        .to_f64_lossy();
    let tail = corollary_tail(n2, t.to_f64_lossy(), epsilon.to_f64_lossy());
    Ok(VerificationReport::build(
        Inequality::Corollary,
        lhs,
        vec![term("main", main), term("tail", tail)],
        cap,
        BoundKind::Cap,
        0.0,
    )
    .with_param("N1", n1 as f64)
    .with_param("N2", n2 as f64)
    .with_param("T", t.to_f64_lossy())
    .with_param("epsilon", epsilon.to_f64_lossy())
    .with_param("w_sup", cl.weight_sup.to_f64_lossy()))
}

/// `N2^{1+ε} / T^2`.
pub fn corollary_tail(n2: u64, t: f64, epsilon: f64) -> f64 {
    (n2 as f64).powf(1.0 + epsilon) / (t * t)
}

/// Modified against plain Selberg integral: `J~ <= cap · (J + h^3 ‖c‖∞^2)`.
pub fn check_cl_selberg<T: Scalar>(
    seq: &ArithmeticSequence<T>,
    win: &SelbergWindow<T>,
    cap: f64,
) -> Result<VerificationReport> {
    let lhs = selberg_modified(seq, win)?.to_f64_lossy();
    let plain = selberg_integral(seq, win)?.to_f64_lossy();
    let h = win.h().to_f64_lossy();
    let sup = sup_norm(seq, win.n(), h)?.to_f64_lossy();
    Ok(VerificationReport::build(
        Inequality::ClSelberg,
        lhs,
        vec![
            term("selberg", plain),
            term("h3-sup2", h * h * h * sup * sup),
        ],
        cap,
        BoundKind::Cap,
        0.0,
    )
    .with_param("N", win.n() as f64)
    .with_param("h", h)
    .with_param("sup_norm", sup))
}

/// Audits `∫ |C~_δ(x)|^2 dx = ∫ |F~^_δ(y)|^2 |S(-y)|^2 dy`.
///
/// The left side is the closed-form bilinear value; the right side is
/// integrated adaptively over `|y| <= Y`, where `Y` is the point beyond which
/// `transform^2 · (Σ|c|)^2 < 1e-14 · lhs`.
pub fn check_plancherel<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
) -> Result<VerificationReport> {
    check_plancherel_with(s, w, 1 << 22)
}

pub fn check_plancherel_with<T: Scalar>(
    s: &ExponentialSum<T>,
    w: &WindowParams<T>,
    max_panels: usize,
) -> Result<VerificationReport> {
    let k = w.kernel(KernelShape::Cesaro);
    let lhs = rhs_window(s, w, KernelShape::Cesaro).value;
    let l1 = s.l1_norm();
    let (rhs, cutoff) = if lhs > T::zero() {
        // transform^2 = sinc^4(δy) <= (π δ y)^{-4}
        let ratio = l1 * l1 / (T::lit(1e-14) * lhs);
        let cutoff = ratio.powf(T::lit(0.25)) / (T::PI() * w.delta());
        let bandwidth = s.span() + w.delta() + w.delta();
        let panels = ((cutoff + cutoff) * bandwidth)
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX);
        if panels >= max_panels {
            return Err(Error::QuadratureBudget {
                estimate: f64::NAN,
                error: f64::NAN,
                panels,
            });
        }
        let bps = uniform_breakpoints(-cutoff, cutoff, panels.max(1));
        let opts = AdaptiveOptions {
            order: 16,
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_panels,
        };
        let q = integrate_adaptive(
            |y| {
                let f = k.transform(y);
                f * f * s.eval_norm_sqr(-y)
            },
            &bps,
            &opts,
        )?;
        (q.value, cutoff)
    } else {
        (T::zero(), T::zero())
    };
    Ok(VerificationReport::build(
        Inequality::Plancherel,
        lhs.to_f64_lossy(),
        vec![term("fourier-side", rhs.to_f64_lossy())],
        1.0,
        BoundKind::Identity,
        PLANCHEREL_TOLERANCE,
    )
    .with_param("T", w.t().to_f64_lossy())
    .with_param("theta", w.theta().to_f64_lossy())
    .with_param("delta", w.delta().to_f64_lossy())
    .with_param("cutoff", cutoff.to_f64_lossy())
    .with_param("terms", s.len() as f64))
}

// ---------------------------------------------------------------------------
// Random instances

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of instance `index` in stream `stream` under `base`. Independent of
/// how many instances are drawn, so enlarging a run only adds instances.
pub fn instance_seed(base: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(base ^ mix64(stream)) ^ index)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the closed unit disc of the complex plane.
pub fn random_unit_disc<T: Scalar, R: Rng>(rng: &mut R) -> Complex<T> {
    let r: f64 = rng.gen::<f64>().sqrt();
    let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex::new(T::lit(r * phi.cos()), T::lit(r * phi.sin()))
}

/// `terms` coefficients in the unit disc at frequencies uniform in `[0, span]`.
pub fn random_exponential_sum<T: Scalar, R: Rng>(
    rng: &mut R,
    terms: usize,
    span: f64,
) -> ExponentialSum<T> {
    let raw: Vec<(T, Complex<T>)> = (0..terms)
        .map(|_| (T::lit(rng.gen::<f64>() * span), random_unit_disc(rng)))
        .collect();
    ExponentialSum::new(raw).expect("finite random terms")
}

/// Coefficients in the unit disc on every `n` in `[1, n_max]`.
pub fn random_dirichlet<T: Scalar, R: Rng>(rng: &mut R, n_max: u64) -> DirichletPolynomial<T> {
    let coeffs = (1..=n_max).map(|_| random_unit_disc(rng)).collect();
    DirichletPolynomial::new(1, coeffs).expect("n_max >= 1")
}

/// Like [`random_dirichlet`], but each `n` is kept with probability
/// `density`; at least one coefficient is always nonzero.
pub fn random_sparse_dirichlet<T: Scalar, R: Rng>(
    rng: &mut R,
    n_max: u64,
    density: f64,
) -> DirichletPolynomial<T> {
    let mut coeffs: Vec<Complex<T>> = (1..=n_max)
        .map(|_| {
            let keep = rng.gen::<f64>() < density;
            let c = random_unit_disc(rng);
            if keep {
                c
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect();
    if coeffs
        .iter()
        .all(|c| c.re == T::zero() && c.im == T::zero())
    {
        let n = rng.gen_range(0..coeffs.len());
        coeffs[n] = Complex::new(T::one(), T::zero());
    }
    DirichletPolynomial::new(1, coeffs).expect("n_max >= 1")
}

/// A random instance of the windowed bounds: `1..=max_terms` terms with
/// frequencies spread over `terms · δ · u`, `u` uniform in `[1/4, 4]`, so
/// windows overlap to varying degrees.
#[derive(Debug, Clone)]
pub struct WindowInstance<T> {
    pub sum: ExponentialSum<T>,
    pub window: WindowParams<T>,
    pub seed: u64,
    pub span: f64,
}

pub fn random_window_instance<T: Scalar>(
    seed: u64,
    theta: f64,
    t: f64,
    max_terms: usize,
) -> Result<WindowInstance<T>> {
    if max_terms == 0 {
        return Err(invalid("terms", "must be at least 1"));
    }
    let window = WindowParams::new(T::lit(t), T::lit(theta))?;
    let mut rng = rng_from_seed(seed);
    let terms = rng.gen_range(1..=max_terms);
    let spread = rng.gen_range(0.25..=4.0);
    let span = terms as f64 * window.delta().to_f64_lossy() * spread;
    let sum = random_exponential_sum(&mut rng, terms, span);
    Ok(WindowInstance {
        sum,
        window,
        seed,
        span,
    })
}

/// Randomised run of a windowed bound (`Star` or `StarTilde`): `trials`
/// instances per `theta`. With `t = None` each instance draws `T`
/// log-uniformly from `[1/2, 50]`. Reports come back in `(theta, trial)`
/// order regardless of scheduling.
pub fn window_suite(
    inequality: Inequality,
    thetas: &[f64],
    trials: usize,
    base_seed: u64,
    t: Option<f64>,
    max_terms: usize,
) -> Result<Vec<VerificationReport>> {
    if !matches!(inequality, Inequality::Star | Inequality::StarTilde) {
        return Err(invalid(
            "inequality",
            format!("`{inequality}` is not a windowed bound"),
        ));
    }
    let jobs: Vec<(usize, u64)> = (0..thetas.len())
        .flat_map(|k| (0..trials as u64).map(move |i| (k, i)))
        .collect();
    jobs.par_iter()
        .map(|&(k, i)| {
            let seed = instance_seed(base_seed, k as u64, i);
            let t = match t {
                Some(t) => t,
                None => {
                    let mut rng = rng_from_seed(mix64(seed));
                    (rng.gen_range(0.5f64.ln()..=50f64.ln())).exp()
                }
            };
            let inst = random_window_instance::<f64>(seed, thetas[k], t, max_terms)?;
            let report = if inequality == Inequality::Star {
                check_gallagher_original(&inst.sum, &inst.window)?
            } else {
                check_lemma(&inst.sum, &inst.window)?
            };
            Ok(report.with_seed(seed).with_param("span", inst.span))
        })
        .collect()
}

/// Fixed corpus for the Cesàro Dirichlet-polynomial bound: `corpus`
/// polynomials with unit-disc coefficients on `[1, n_max]`, each checked at
/// every `T` in `ts`. The corpus does not depend on `ts`.
///
/// Polynomial `i` keeps each coefficient with probability `4^-(i mod 6)`, so
/// the corpus runs from dense to a handful of terms. Dense polynomials alone
/// make the tail term dominate at small `T` and understate the largest ratio
/// there.
pub fn theorem_corpus(
    ts: &[f64],
    corpus: usize,
    n_max: u64,
    base_seed: u64,
    kappa: f64,
    cap: f64,
) -> Result<Vec<VerificationReport>> {
    let polys: Vec<(u64, f64, DirichletPolynomial<f64>)> = (0..corpus as u64)
        .map(|i| {
            let seed = instance_seed(base_seed, 0, i);
            let density = 0.25f64.powi((i % 6) as i32);
            (
                seed,
                density,
                random_sparse_dirichlet(&mut rng_from_seed(seed), n_max, density),
            )
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..ts.len())
        .flat_map(|k| (0..polys.len()).map(move |i| (k, i)))
        .collect();
    jobs.par_iter()
        .map(|&(k, i)| {
            let (seed, density, d) = &polys[i];
            Ok(check_theorem(d, ts[k], kappa, cap)?
                .with_seed(*seed)
                .with_param("density", *density))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sweeps

/// Parameter grid for [`estimate_constant`].
///
/// For the windowed bounds the cells are `theta × T × terms`; for the
/// Dirichlet-polynomial bounds they are `T × terms`, with `terms` the length
/// of the support `[1, terms]`, and `thetas` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub thetas: Vec<f64>,
    pub ts: Vec<f64>,
    pub terms: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    pub kappa: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            thetas: vec![0.5],
            ts: vec![10.0],
            terms: vec![10],
            seeds: 100,
            base_seed: 0,
            kappa: crate::meansquare::DEFAULT_KAPPA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub max_ratio: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub inequality: Inequality,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV with header `<param columns>,max_ratio,n_seeds`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = self.columns.clone();
        header.push("max_ratio".into());
        header.push("n_seeds".into());
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields: Vec<String> = row.params.iter().map(|&p| format_g17(p)).collect();
            fields.push(format_g17(row.max_ratio));
            fields.push(row.n_seeds.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Deterministic seeded sweep recording the largest observed ratio per cell.
///
/// Instances run in parallel; the per-cell maximum does not depend on the
/// order in which they finish.
pub fn estimate_constant(inequality: Inequality, cfg: &SweepConfig) -> Result<SweepTable> {
    let (columns, cells): (Vec<&str>, Vec<Vec<f64>>) = match inequality {
        Inequality::Star | Inequality::StarTilde => (
            vec!["theta", "T", "terms"],
            cfg.thetas
                .iter()
                .flat_map(|&th| {
                    cfg.ts
                        .iter()
                        .flat_map(move |&t| cfg.terms.iter().map(move |&n| vec![th, t, n as f64]))
                })
                .collect(),
        ),
        Inequality::StarStar | Inequality::StarStarTilde => (
            vec!["T", "terms"],
            cfg.ts
                .iter()
                .flat_map(|&t| cfg.terms.iter().map(move |&n| vec![t, n as f64]))
                .collect(),
        ),
        other => {
            return Err(invalid(
                "inequality",
                format!("no random sweep defined for `{other}`"),
            ))
        }
    };
    for cell in &cells {
        validate_cell(inequality, cell)?;
    }

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..cfg.seeds as u64).map(move |i| (c, i)))
        .collect();
    let ratios: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(c, i)| {
            let seed = instance_seed(cfg.base_seed, c as u64, i);
            sweep_instance(inequality, &cells[c], seed, cfg.kappa).map(|r| r.ratio)
        })
        .collect();

    let mut maxima = vec![0.0f64; cells.len()];
    for (&(c, _), r) in jobs.iter().zip(ratios) {
        maxima[c] = maxima[c].max(r?);
    }
    Ok(SweepTable {
        inequality,
        columns: columns.into_iter().map(String::from).collect(),
        rows: cells
            .into_iter()
            .zip(maxima)
            .map(|(params, max_ratio)| SweepRow {
                params,
                max_ratio,
                n_seeds: cfg.seeds,
            })
            .collect(),
    })
}

fn validate_cell(inequality: Inequality, cell: &[f64]) -> Result<()> {
    match inequality {
        Inequality::Star | Inequality::StarTilde => {
            WindowParams::new(cell[1], cell[0])?;
            if cell[2] < 1.0 {
                return Err(invalid("terms", "must be at least 1"));
            }
        }
        _ => {
            let min_t = if inequality == Inequality::StarStarTilde {
                1.0
            } else {
                0.0
            };
            if !(cell[0] > min_t) {
                return Err(invalid("T", format!("must exceed {min_t}")));
            }
            if cell[1] < 1.0 {
                return Err(invalid("terms", "must be at least 1"));
            }
        }
    }
    Ok(())
}

/// One random instance of a sweep cell, as used by [`estimate_constant`].
pub fn sweep_instance(
    inequality: Inequality,
    cell: &[f64],
    seed: u64,
    kappa: f64,
) -> Result<VerificationReport> {
    let report = match inequality {
        Inequality::Star | Inequality::StarTilde => {
            let inst = random_window_instance::<f64>(seed, cell[0], cell[1], cell[2] as usize)?;
            if inequality == Inequality::Star {
                check_gallagher_original(&inst.sum, &inst.window)?
            } else {
                check_lemma(&inst.sum, &inst.window)?
            }
            .with_param("span", inst.span)
        }
        Inequality::StarStar | Inequality::StarStarTilde => {
            let mut rng = rng_from_seed(seed);
            let d = random_dirichlet::<f64, _>(&mut rng, cell[1] as u64);
            if inequality == Inequality::StarStar {
                check_gallagher_series(&d, cell[0])?
            } else {
                check_theorem(&d, cell[0], kappa, DEFAULT_THEOREM_CAP)?
            }
        }
        other => {
            return Err(invalid(
                "inequality",
                format!("no random instance defined for `{other}`"),
            ))
        }
    };
    Ok(report.with_seed(seed))
}

/// Plot-ready CSV of `(parameter, ratio, constant)`, one row per report in
/// input order, preceded by a `#` comment line describing the columns.
pub fn emit_plot_data<W: Write>(
    reports: &[VerificationReport],
    parameter: &str,
    mut out: W,
) -> Result<()> {
    if reports.is_empty() {
        return Err(invalid("reports", "need at least one report"));
    }
    writeln!(
        out,
        "# {parameter}: report parameter `{parameter}`; ratio: lhs / sum of rhs terms; \
         constant: explicit constant, cap, or identity target"
    )?;
    writeln!(out, "{parameter},ratio,constant")?;
    for r in reports {
        let p = r.params.get(parameter).copied().ok_or_else(|| {
            invalid(
                "parameter",
                format!("report for {} has no `{parameter}`", r.inequality),
            )
        })?;
        writeln!(
            out,
            "{},{},{}",
            format_g17(p),
            format_g17(r.ratio),
            format_g17(r.constant)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::moebius;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn single_frequency_ratios() {
        let theta = 1.0 / std::f64::consts::TAU;
        let w = WindowParams::new(13.0, theta).unwrap();
        let s = ExponentialSum::single(0.4, c(1.0));
        let r = check_lemma(&s, &w).unwrap();
        assert!((r.ratio - 3.0 * theta).abs() < 1e-10);
        assert!((r.constant - 1.183_028_910_868).abs() < 1e-11);
        assert!(r.pass);
        let r = check_gallagher_original(&s, &w).unwrap();
        assert!((r.ratio - 2.0 * theta).abs() < 1e-10);
        assert!(r.pass);
    }

    #[test]
    fn zero_sum_passes_with_zero_ratio() {
        let w = WindowParams::new(2.0, 0.5).unwrap();
        let z = ExponentialSum::<f64>::zero();
        for r in [
            check_lemma(&z, &w).unwrap(),
            check_gallagher_original(&z, &w).unwrap(),
            check_plancherel(&z, &w).unwrap(),
        ] {
            assert_eq!(r.ratio, 0.0);
            assert!(r.pass);
        }
    }

    #[test]
    fn dirichlet_series_single_term_ratio_is_two() {
        let d = DirichletPolynomial::from_terms([(17u64, c(0.5))]).unwrap();
        let r = check_gallagher_series(&d, 40.0).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-10);
        assert!(r.pass);
        assert!((r.constant - 6.834_040_487_244).abs() < 1e-11);
    }

    #[test]
    fn theorem_single_term() {
        let d = DirichletPolynomial::from_terms([(50u64, c(1.0))]).unwrap();
        let r = check_theorem(&d, 100.0, 1.0, DEFAULT_THEOREM_CAP).unwrap();
        assert!((r.ratio - 3.0).abs() < 0.1, "ratio {}", r.ratio);
        assert!(r.pass);
        let z = DirichletPolynomial::from_real(1, &[0.0f64; 4]).unwrap();
        let r = check_theorem(&z, 10.0, 1.0, DEFAULT_THEOREM_CAP).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn corollary_tail_scales_with_n2() {
        let a = corollary_tail(500, 100.0, 0.1);
        let b = corollary_tail(1000, 100.0, 0.1);
        assert!((b / a - 2f64.powf(1.1)).abs() < 1e-12);
    }

    #[test]
    fn corollary_with_zero_b() {
        let one = ArithmeticSequence::from_fn("1", 1, 100, |_| 1.0f64).unwrap();
        let zero = ArithmeticSequence::from_fn("0", 1, 100, |_| 0.0f64).unwrap();
        let r = check_corollary(&one, &zero, 1, 100, 20.0, 0.1, DEFAULT_THEOREM_CAP).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
        let mu = moebius::<f64>(100).unwrap();
        let r = check_corollary(&one, &mu, 1, 100, 20.0, 0.1, DEFAULT_THEOREM_CAP).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert_eq!(r.params["w_sup"], 1.0);
    }

    #[test]
    fn selberg_zero_sequence() {
        let z = ArithmeticSequence::from_fn("0", 1, 100, |_| 0.0f64).unwrap();
        let win = SelbergWindow::new(30, 4.0).unwrap();
        let r = check_cl_selberg(&z, &win, DEFAULT_SELBERG_CAP).unwrap();
        assert_eq!((r.lhs, r.ratio, r.pass), (0.0, 0.0, true));
    }

    #[test]
    fn reports_are_consistent() {
        let inst = random_window_instance::<f64>(9, 0.25, 5.0, 12).unwrap();
        let r = check_lemma(&inst.sum, &inst.window).unwrap();
        assert!(r.is_consistent(1e-12));
    }

    #[test]
    fn inequality_names_round_trip() {
        for i in Inequality::ALL {
            assert_eq!(i.as_str().parse::<Inequality>().unwrap(), i);
            assert_eq!(serde_json::to_string(&i).unwrap(), format!("\"{i}\""));
        }
        assert!("star-star-star".parse::<Inequality>().is_err());
    }

    #[test]
    fn empty_sweep_is_empty_table() {
        let cfg = SweepConfig {
            thetas: vec![],
            ..Default::default()
        };
        assert!(estimate_constant(Inequality::StarTilde, &cfg)
            .unwrap()
            .is_empty());
        let cfg = SweepConfig {
            seeds: 0,
            ..Default::default()
        };
        let t = estimate_constant(Inequality::StarTilde, &cfg).unwrap();
        assert_eq!(t.rows[0].max_ratio, 0.0);
    }

    #[test]
    fn plot_data_requires_reports() {
        assert!(emit_plot_data(&[], "theta", Vec::new()).is_err());
    }

    #[test]
    fn plot_data_one_row_per_report() {
        let inst = random_window_instance::<f64>(1, 0.5, 3.0, 4).unwrap();
        let r = check_lemma(&inst.sum, &inst.window).unwrap();
        let mut buf = Vec::new();
        emit_plot_data(&[r], "theta", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "theta,ratio,constant");
        assert!(lines[2].starts_with("0.5,"));
    }
}
