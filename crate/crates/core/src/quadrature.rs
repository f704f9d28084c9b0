//! Gauss–Legendre panel quadrature.
//!
//! Two drivers are provided: a fixed scheme (one rule per breakpoint panel,
//! refined once by bisection) whose cost and result are fully determined by
//! the breakpoints, and a globally adaptive scheme that keeps bisecting the
//! worst panel until the summed error estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::summation::{pairwise_sum, CompensatedSum};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from the Chebyshev-like
    /// initial guesses. Accurate to a few ulps for n up to a few hundred.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<T: Scalar, F: Fn(T) -> T>(&self, f: &F, a: T, b: T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = a + half;
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(T::lit(w) * f(mid + half * T::lit(x)));
        }
        acc.value() * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Result of a panel quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub panels: usize,
}

/// Integrates over consecutive breakpoint panels with the given rule,
/// bisecting every panel exactly once. The bisected estimate is returned
/// and the difference to the unbisected one is the error estimate.
pub fn integrate_refined_once<T: Scalar, F: Fn(T) -> T>(
    f: F,
    breakpoints: &[T],
    rule: &GaussLegendre,
) -> Quadrature<T> {
    let mut values = Vec::with_capacity(breakpoints.len());
    let mut errors = Vec::with_capacity(breakpoints.len());
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let m = a + (b - a) / T::lit(2.0);
        let coarse = rule.integrate(&f, a, b);
        let fine = rule.integrate(&f, a, m) + rule.integrate(&f, m, b);
        values.push(fine);
        errors.push((coarse - fine).abs());
    }
    Quadrature {
        value: pairwise_sum(&values),
        abs_error: pairwise_sum(&errors),
        panels: values.len(),
    }
}

/// Stopping rule and budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            order: 16,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 1 << 20,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    left: T,
    right: T,
    error: T,
    seq: usize,
}

impl<T: Scalar> Panel<T> {
    fn fine(&self) -> T {
        self.left + self.right
    }
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Panel<T> {}

impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Panel<T> {
    // Largest error first; ties broken by creation order for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .to_f64_lossy()
            .total_cmp(&other.error.to_f64_lossy())
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Globally adaptive Gauss–Legendre quadrature over the union of the
/// breakpoint panels `[x_0, x_1], [x_1, x_2], ...`.
///
/// Fails with [`Error::QuadratureBudget`] (carrying the partial estimate)
/// when `max_panels` leaves are in use and the tolerance is still unmet.
pub fn integrate_adaptive<T: Scalar, F: Fn(T) -> T>(
    f: F,
    breakpoints: &[T],
    opts: &AdaptiveOptions,
) -> Result<Quadrature<T>> {
    let rule = GaussLegendre::new(opts.order);
    let mut seq = 0usize;
    let mut make = |a: T, b: T, whole: T| {
        let m = a + (b - a) / T::lit(2.0);
        let left = rule.integrate(&f, a, m);
        let right = rule.integrate(&f, m, b);
        seq += 1;
        Panel {
            a,
            b,
            left,
            right,
            error: (whole - left - right).abs(),
            seq,
        }
    };

    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut total_err = CompensatedSum::new();
    let mut total_val = CompensatedSum::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let whole = rule.integrate(&f, a, b);
        let p = make(a, b, whole);
        total_err.add(p.error);
        total_val.add(p.fine());
        heap.push(p);
    }

    let tolerance = |v: T| T::lit(opts.abs_tol).max(T::lit(opts.rel_tol) * v.abs());
    loop {
        let err = total_err.value();
        if err <= tolerance(total_val.value()) {
            break;
        }
        if heap.len() + done.len() >= opts.max_panels {
            return Err(Error::QuadratureBudget {
                estimate: total_val.value().to_f64_lossy(),
                error: err.to_f64_lossy(),
                panels: heap.len() + done.len(),
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureBudget {
                estimate: total_val.value().to_f64_lossy(),
                error: err.to_f64_lossy(),
                panels: done.len(),
            });
        };
        let m = worst.a + (worst.b - worst.a) / T::lit(2.0);
        if !(m > worst.a && m < worst.b) {
            // Cannot bisect further at this precision.
            done.push(worst);
            continue;
        }
        let l = make(worst.a, m, worst.left);
        let r = make(m, worst.b, worst.right);
        total_err.sub(worst.error);
        total_val.sub(worst.fine());
        for p in [l, r] {
            total_err.add(p.error);
            total_val.add(p.fine());
            heap.push(p);
        }
    }

    done.extend(heap.into_vec());
    done.sort_by(|p, q| p.a.to_f64_lossy().total_cmp(&q.a.to_f64_lossy()));
    let values: Vec<T> = done.iter().map(Panel::fine).collect();
    let errors: Vec<T> = done.iter().map(|p| p.error).collect();
    Ok(Quadrature {
        value: pairwise_sum(&values),
        abs_error: pairwise_sum(&errors),
        panels: done.len(),
    })
}

/// `count` equal panels covering `[a, b]`, endpoints included.
pub fn uniform_breakpoints<T: Scalar>(a: T, b: T, count: usize) -> Vec<T> {
    let count = count.max(1);
    let h = (b - a) / T::from_usize(count).expect("panel count representable");
    let mut out: Vec<T> = (0..count)
        .map(|i| a + h * T::from_usize(i).unwrap())
        .collect();
    out.push(b);
    out
}
