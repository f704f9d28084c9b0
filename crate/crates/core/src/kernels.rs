//! Rectangular and Cesàro (triangle) averaging kernels.
//!
//! With window scale `delta`:
//!
//! * rectangular: `1/delta` on `|y| <= delta/2`, zero elsewhere;
//! * Cesàro: `max(1/delta - |y|/delta^2, 0)`, the self-convolution of the
//!   rectangular kernel.
//!
//! Both have unit mass. Their Fourier transforms are `sinc(delta*y)` and
//! `sinc(delta*y)^2`, where `sinc(u) = sin(pi u)/(pi u)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    Rectangular,
    Cesaro,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel<T> {
    shape: KernelShape,
    delta: T,
}

impl<T: Scalar> Kernel<T> {
    pub fn new(shape: KernelShape, delta: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(invalid(
                "delta",
                format!("must be positive and finite, got {delta}"),
            ));
        }
        Ok(Self { shape, delta })
    }

    pub fn rectangular(delta: T) -> Result<Self> {
        Self::new(KernelShape::Rectangular, delta)
    }

    pub fn cesaro(delta: T) -> Result<Self> {
        Self::new(KernelShape::Cesaro, delta)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Half-width of the support.
    pub fn radius(&self) -> T {
        match self.shape {
            KernelShape::Rectangular => self.delta / T::lit(2.0),
            KernelShape::Cesaro => self.delta,
        }
    }

    /// Pointwise value. The rectangular boundary `|y| = delta/2` is inside.
    pub fn eval(&self, y: T) -> T {
        let d = self.delta;
        match self.shape {
            KernelShape::Rectangular => {
                if y.abs() <= d / T::lit(2.0) {
                    d.recip()
                } else {
                    T::zero()
                }
            }
            KernelShape::Cesaro => (d.recip() - y.abs() / (d * d)).max(T::zero()),
        }
    }

    /// Fourier transform `∫ k(x) e(-xy) dx`; equals 1 at `y = 0`.
    pub fn transform(&self, y: T) -> T {
        let s = sinc_pi(T::PI() * self.delta * y);
        match self.shape {
            KernelShape::Rectangular => s,
            KernelShape::Cesaro => s * s,
        }
    }

    /// `∫ k(x) k(x + lag) dx`, in closed form.
    ///
    /// Rectangular: `(1/delta) max(0, 1 - |lag|/delta)`. Cesàro: the
    /// rectangle convolved with itself four times, i.e. `(1/delta) B3(lag/delta)`
    /// with `B3` the centred cubic B-spline on `[-2, 2]`.
    pub fn autocorrelation(&self, lag: T) -> T {
        let u = lag.abs() / self.delta;
        let inv = self.delta.recip();
        let one = T::one();
        let two = T::lit(2.0);
        match self.shape {
            KernelShape::Rectangular => inv * (one - u).max(T::zero()),
            KernelShape::Cesaro => {
                if u >= two {
                    T::zero()
                } else if u >= one {
                    let r = two - u;
                    inv * r * r * r / T::lit(6.0)
                } else {
                    inv * (T::lit(2.0 / 3.0) - u * u + u * u * u / two)
                }
            }
        }
    }
}

/// `sin(a)/a`, with a Taylor series below `|a| = 1e-4`.
pub fn sinc_pi<T: Scalar>(a: T) -> T {
    if a.abs() < T::lit(1e-4) {
        let a2 = a * a;
        T::one()
            - a2 / T::lit(6.0) * (T::one() - a2 / T::lit(20.0) * (T::one() - a2 / T::lit(42.0)))
    } else {
        a.sin() / a
    }
}

/// Normalised sinc, `sin(pi u)/(pi u)`.
pub fn sinc<T: Scalar>(u: T) -> T {
    sinc_pi(T::PI() * u)
}

/// The triple `(T, theta, delta)` with `delta = theta / T` and `0 < theta < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowParams<T> {
    t: T,
    theta: T,
    delta: T,
}

impl<T: Scalar> WindowParams<T> {
    pub fn new(t: T, theta: T) -> Result<Self> {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(invalid(
                "T",
                format!("must be positive and finite, got {t}"),
            ));
        }
        if !(theta > T::zero() && theta < T::one()) {
            return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
        }
        Ok(Self {
            t,
            theta,
            delta: theta / t,
        })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn kernel(&self, shape: KernelShape) -> Kernel<T> {
        Kernel {
            shape,
            delta: self.delta,
        }
    }
}

/// Admissible constant `C(theta)` for the windowed mean-square bound.
///
/// On `|y| <= T` we have `|delta*y| <= theta`, and sinc is decreasing on
/// `[0, 1]`, so the transform is bounded below by `sinc(theta)` (resp.
/// `sinc(theta)^2`). The squared transform appears in the Plancherel
/// identity, giving `sinc(theta)^-2` for the rectangular window and
/// `sinc(theta)^-4` for the Cesàro window.
pub fn explicit_constant<T: Scalar>(theta: T, shape: KernelShape) -> Result<T> {
    if !(theta > T::zero() && theta < T::one()) {
        return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
    }
    let inv = sinc(theta).recip();
    Ok(match shape {
        KernelShape::Rectangular => inv * inv,
        KernelShape::Cesaro => (inv * inv) * (inv * inv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_values() {
        let c = Kernel::cesaro(2.0f64).unwrap();
        assert_eq!(c.eval(1.0), 0.25);
        assert_eq!(c.eval(3.0), 0.0);
        assert_eq!(c.eval(-1.0), 0.25);
        let r = Kernel::rectangular(2.0f64).unwrap();
        assert_eq!(r.eval(1.0), 0.5);
        assert_eq!(r.eval(-1.0), 0.5);
        assert_eq!(r.eval(1.0000001), 0.0);
    }

    #[test]
    fn transform_values() {
        for shape in [KernelShape::Rectangular, KernelShape::Cesaro] {
            assert_eq!(Kernel::new(shape, 0.7f64).unwrap().transform(0.0), 1.0);
        }
        let r = Kernel::rectangular(1.0f64).unwrap();
        assert!((r.transform(0.5) - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        let c = Kernel::cesaro(1.0f64).unwrap();
        assert!(c.transform(1.0).abs() < 1e-30);
    }

    #[test]
    fn series_branch_is_continuous() {
        let a = 1e-4f64;
        let below = sinc_pi(a * (1.0 - 1e-12));
        let above = sinc_pi(a);
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn autocorrelation_values() {
        let d = 1.7f64;
        let c = Kernel::cesaro(d).unwrap();
        assert!((c.autocorrelation(0.0) - 2.0 / (3.0 * d)).abs() < 1e-15);
        assert_eq!(c.autocorrelation(2.0 * d), 0.0);
        assert_eq!(c.autocorrelation(-2.5 * d), 0.0);
        let r = Kernel::rectangular(d).unwrap();
        assert!((r.autocorrelation(d / 2.0) - 1.0 / (2.0 * d)).abs() < 1e-15);
        assert_eq!(r.autocorrelation(2.0 * d), 0.0);
        // The two cubic pieces meet continuously at |u| = 1.
        let inner = c.autocorrelation(d * (1.0 - 1e-12));
        let outer = c.autocorrelation(d);
        assert!((inner - outer).abs() < 1e-12);
    }

    #[test]
    fn constants() {
        let c = explicit_constant(1e-6f64, KernelShape::Cesaro).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
        let half = explicit_constant(0.5f64, KernelShape::Cesaro).unwrap();
        assert!((half - (std::f64::consts::PI / 2.0).powi(4)).abs() < 1e-12);
        assert!((half - 6.08806818962).abs() < 1e-9);
        let th = 1.0 / (2.0 * std::f64::consts::PI);
        let c = explicit_constant(th, KernelShape::Cesaro).unwrap();
        assert!((c - (0.5 / 0.5f64.sin()).powi(4)).abs() < 1e-12);
        assert!((c - 1.183_028_910_868).abs() < 1e-11);
        let r = explicit_constant(th, KernelShape::Rectangular).unwrap();
        assert!((r * r - c).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(explicit_constant(0.0f64, KernelShape::Cesaro).is_err());
        assert!(explicit_constant(1.0f64, KernelShape::Rectangular).is_err());
        assert!(Kernel::cesaro(0.0f64).is_err());
        assert!(Kernel::rectangular(-1.0f64).is_err());
        assert!(WindowParams::new(1.0f64, 1.0).is_err());
        assert!(WindowParams::new(0.0f64, 0.5).is_err());
        let w = WindowParams::new(4.0f64, 0.5).unwrap();
        assert_eq!(w.delta(), 0.125);
    }

    #[test]
    fn works_in_single_precision() {
        let c = Kernel::cesaro(1.0f32).unwrap();
        assert!((c.transform(0.25) - 0.8105695f32).abs() < 1e-6);
        let k = explicit_constant(0.5f32, KernelShape::Cesaro).unwrap();
        assert!((k - 6.088068).abs() < 1e-4);
    }
}
