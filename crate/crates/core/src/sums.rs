//! Exponential sums `S(t) = Σ c(ν) e(νt)` with `e(x) = exp(2πix)`, and
//! Dirichlet polynomials `D(t) = Σ a_n n^{it}` viewed as exponential sums
//! with frequencies `log(n) / 2π`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::ArithmeticSequence;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::summation::{compensated_sum, ComplexSum};

/// `e(x) = exp(2πix)`, reducing `x` modulo 1 first.
#[inline]
pub fn unit_phase<T: Scalar>(x: T) -> Complex<T> {
    let frac = x - x.round();
    let (s, c) = (T::TAU() * frac).sin_cos();
    Complex::new(c, s)
}

/// Finite exponential sum with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSum<T> {
    freqs: Vec<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> Default for ExponentialSum<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> ExponentialSum<T> {
    pub fn zero() -> Self {
        Self {
            freqs: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    /// Sorts the terms by frequency; coefficients of equal frequencies are
    /// summed.
    pub fn new<I: IntoIterator<Item = (T, Complex<T>)>>(terms: I) -> Result<Self> {
        let mut terms: Vec<(T, Complex<T>)> = terms.into_iter().collect();
        for (i, (nu, c)) in terms.iter().enumerate() {
            if !nu.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        terms.sort_by(|a, b| a.0.to_f64_lossy().total_cmp(&b.0.to_f64_lossy()));
        let mut freqs: Vec<T> = Vec::with_capacity(terms.len());
        let mut coeffs: Vec<Complex<T>> = Vec::with_capacity(terms.len());
        for (nu, c) in terms {
            match freqs.last() {
                Some(&last) if last == nu => *coeffs.last_mut().unwrap() += c,
                _ => {
                    freqs.push(nu);
                    coeffs.push(c);
                }
            }
        }
        Ok(Self { freqs, coeffs })
    }

    pub fn single(nu: T, c: Complex<T>) -> Self {
        Self {
            freqs: vec![nu],
            coeffs: vec![c],
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn frequencies(&self) -> &[T] {
        &self.freqs
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (T, Complex<T>)> + '_ {
        self.freqs.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// `Σ |c(ν)|`.
    pub fn l1_norm(&self) -> T {
        compensated_sum(self.coeffs.iter().map(|c| c.norm()))
    }

    /// `Σ |c(ν)|^2`.
    pub fn l2_norm_sqr(&self) -> T {
        compensated_sum(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    /// Largest frequency gap `max ν - min ν` (zero for fewer than two terms).
    pub fn span(&self) -> T {
        match (self.freqs.first(), self.freqs.last()) {
            (Some(&a), Some(&b)) => b - a,
            _ => T::zero(),
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            freqs: self.freqs.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    /// `S(t)`, summed in ascending frequency with compensation.
    pub fn eval(&self, t: T) -> Complex<T> {
        let mut acc = ComplexSum::new();
        for (&nu, &c) in self.freqs.iter().zip(&self.coeffs) {
            acc.add(c * unit_phase(nu * t));
        }
        acc.value()
    }

    /// `|S(t)|^2`.
    pub fn eval_norm_sqr(&self, t: T) -> T {
        self.eval(t).norm_sqr()
    }

    pub fn to_records(&self) -> Vec<CoefficientRecord> {
        self.terms()
            .map(|(nu, c)| CoefficientRecord::Frequency {
                nu: nu.to_f64_lossy(),
                re: c.re.to_f64_lossy(),
                im: c.im.to_f64_lossy(),
            })
            .collect()
    }

    /// Builds from records; `n` records are mapped to `log(n) / 2π`.
    pub fn from_records(records: &[CoefficientRecord]) -> Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let (nu, re, im) = match *r {
                CoefficientRecord::Frequency { nu, re, im } => (T::lit(nu), re, im),
                CoefficientRecord::Integer { n, re, im } => {
                    if n == 0 {
                        return Err(Error::Format("n must be positive".into()));
                    }
                    (dirichlet_frequency(n), re, im)
                }
            };
            terms.push((nu, Complex::new(T::lit(re), T::lit(im))));
        }
        Self::new(terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_records())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let records: Vec<CoefficientRecord> = serde_json::from_str(s)?;
        Self::from_records(&records)
    }
}

/// One coefficient in the JSON interchange format: either indexed by an
/// integer `n` (Dirichlet coefficient) or by a real frequency `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientRecord {
    Integer { n: u64, re: f64, im: f64 },
    Frequency { nu: f64, re: f64, im: f64 },
}

/// `log(n) / 2π`.
pub fn dirichlet_frequency<T: Scalar>(n: u64) -> T {
    T::from_u64_lossy(n).ln() / T::TAU()
}

/// Nearest integer to `exp(2πν)`; only meaningful for frequencies produced
/// by [`dirichlet_frequency`].
pub fn frequency_to_index<T: Scalar>(nu: T) -> u64 {
    (T::TAU() * nu).exp().round().to_u64().unwrap_or(0)
}

/// `Σ_{n_min <= n <= n_max} a_n n^{it}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPolynomial<T> {
    n_min: u64,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> DirichletPolynomial<T> {
    /// `coeffs[i]` is the coefficient of `(n_min + i)^{it}`.
    pub fn new(n_min: u64, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if n_min == 0 {
            return Err(invalid("n_min", "must be at least 1"));
        }
        if coeffs.is_empty() {
            return Err(invalid("coeffs", "need at least one coefficient"));
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite { index: i });
        }
        Ok(Self { n_min, coeffs })
    }

    pub fn from_real(n_min: u64, coeffs: &[T]) -> Result<Self> {
        Self::new(
            n_min,
            coeffs.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    /// The polynomial with the given sparse coefficients; unlisted integers
    /// in between get zero. Repeated indices are summed.
    pub fn from_terms<I: IntoIterator<Item = (u64, Complex<T>)>>(terms: I) -> Result<Self> {
        let terms: Vec<(u64, Complex<T>)> = terms.into_iter().collect();
        let lo = terms
            .iter()
            .map(|t| t.0)
            .min()
            .ok_or_else(|| invalid("terms", "empty"))?;
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        if lo == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); (hi - lo + 1) as usize];
        for (n, c) in terms {
            coeffs[(n - lo) as usize] += c;
        }
        Self::new(lo, coeffs)
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    pub fn n_max(&self) -> u64 {
        self.n_min + self.coeffs.len() as u64 - 1
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coefficient(&self, n: u64) -> Complex<T> {
        if n < self.n_min || n > self.n_max() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(n - self.n_min) as usize]
        }
    }

    /// `(n, a_n)` for the nonzero coefficients, ascending in `n`.
    pub fn support(&self) -> impl Iterator<Item = (u64, Complex<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !(c.re == T::zero() && c.im == T::zero()))
            .map(move |(i, &c)| (self.n_min + i as u64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.support().next().is_none()
    }

    pub fn conj(&self) -> Self {
        Self {
            n_min: self.n_min,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            n_min: self.n_min,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn l1_norm(&self) -> T {
        compensated_sum(self.coeffs.iter().map(|c| c.norm()))
    }

    /// `D(t)`, summed in ascending `n` with compensation.
    pub fn eval(&self, t: T) -> Complex<T> {
        let mut acc = ComplexSum::new();
        for (n, c) in self.support() {
            let (s, co) = (t * T::from_u64_lossy(n).ln()).sin_cos();
            acc.add(c * Complex::new(co, s));
        }
        acc.value()
    }

    /// The same polynomial as an exponential sum with `ν_n = log(n)/2π`;
    /// zero coefficients are dropped.
    pub fn to_exponential_sum(&self) -> ExponentialSum<T> {
        let (freqs, coeffs) = self
            .support()
            .map(|(n, c)| (dirichlet_frequency::<T>(n), c))
            .unzip();
        ExponentialSum { freqs, coeffs }
    }

    pub fn to_records(&self) -> Vec<CoefficientRecord> {
        self.support()
            .map(|(n, c)| CoefficientRecord::Integer {
                n,
                re: c.re.to_f64_lossy(),
                im: c.im.to_f64_lossy(),
            })
            .collect()
    }

    pub fn from_records(records: &[CoefficientRecord]) -> Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            match *r {
                CoefficientRecord::Integer { n, re, im } => {
                    terms.push((n, Complex::new(T::lit(re), T::lit(im))));
                }
                CoefficientRecord::Frequency { .. } => {
                    return Err(Error::Format(
                        "Dirichlet coefficients must be indexed by `n`".into(),
                    ));
                }
            }
        }
        Self::from_terms(terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_records())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let records: Vec<CoefficientRecord> = serde_json::from_str(s)?;
        Self::from_records(&records)
    }
}

/// A critical-line polynomial `Σ w(n) b(n) n^{-1/2} n^{-it}` stored through its
/// coefficients `a_n = w(n) b(n) n^{-1/2}`, together with `max |w|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLinePolynomial<T> {
    pub poly: DirichletPolynomial<T>,
    pub weight_sup: T,
}

/// `a_n = w(n) b(n) / sqrt(n)` for `n1 <= n <= n2`.
pub fn critical_line_poly<T: Scalar>(
    w: &ArithmeticSequence<T>,
    b: &ArithmeticSequence<T>,
    n1: u64,
    n2: u64,
) -> Result<CriticalLinePolynomial<T>> {
    if n1 == 0 || n1 > n2 {
        return Err(invalid(
            "N1",
            format!("need 1 <= N1 <= N2, got N1={n1}, N2={n2}"),
        ));
    }
    let ws = w.slice(n1, n2)?;
    let bs = b.slice(n1, n2)?;
    let coeffs = ws
        .iter()
        .zip(bs)
        .zip(n1..=n2)
        .map(|((&wn, &bn), n)| Complex::new(wn * bn / T::from_u64_lossy(n).sqrt(), T::zero()))
        .collect();
    let weight_sup = ws.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    Ok(CriticalLinePolynomial {
        poly: DirichletPolynomial::new(n1, coeffs)?,
        weight_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::moebius;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn merges_duplicate_frequencies() {
        let s = ExponentialSum::new([(1.0, c(1.0, 0.0)), (0.0, c(2.0, 0.0)), (1.0, c(0.5, 1.0))])
            .unwrap();
        assert_eq!(s.frequencies(), &[0.0, 1.0]);
        assert_eq!(s.coefficients(), &[c(2.0, 0.0), c(1.5, 1.0)]);
    }

    #[test]
    fn rejects_non_finite_terms() {
        assert!(ExponentialSum::new([(f64::NAN, c(1.0, 0.0))]).is_err());
        assert!(ExponentialSum::new([(0.0, c(f64::INFINITY, 0.0))]).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let s = ExponentialSum::single(0.3, c(1.0, 0.0));
        for t in [0.0, 0.7, -12.25, 1e3] {
            let v = s.eval(t);
            assert!((v.norm() - 1.0).abs() < 1e-15);
            let expect = Complex::from_polar(1.0, std::f64::consts::TAU * 0.3 * t);
            assert!((v - expect).norm() < 1e-12);
        }
        let s = ExponentialSum::new([(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap();
        assert!(s.eval(0.5).norm() < 1e-15);
        let s = ExponentialSum::new([(0.1, c(1.0, 2.0)), (0.7, c(-3.0, 0.5))]).unwrap();
        assert_eq!(s.eval(0.0), c(-2.0, 2.5));
    }

    #[test]
    fn dirichlet_frequencies() {
        let d = DirichletPolynomial::from_terms([(1, c(2.0, 0.0))]).unwrap();
        assert_eq!(d.to_exponential_sum().frequencies(), &[0.0]);
        let d = DirichletPolynomial::from_terms([(2, c(1.0, 0.0))]).unwrap();
        let nu = d.to_exponential_sum().frequencies()[0];
        assert!((nu - 0.110_317_800_076_3).abs() < 1e-12);
        assert_eq!(frequency_to_index(nu), 2);
    }

    #[test]
    fn from_dirichlet_drops_zero_coefficients() {
        let d = DirichletPolynomial::new(3, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        let s = d.to_exponential_sum();
        assert_eq!(s.len(), 2);
        let ns: Vec<u64> = s
            .frequencies()
            .iter()
            .map(|&nu| frequency_to_index(nu))
            .collect();
        assert_eq!(ns, vec![3, 5]);
    }

    #[test]
    fn dirichlet_eval_examples() {
        let d = DirichletPolynomial::from_terms([(1, c(5.0, 0.0))]).unwrap();
        assert_eq!(d.eval(17.3), c(5.0, 0.0));
        let d = DirichletPolynomial::new(1, vec![c(1.0, 1.0), c(2.0, 0.0), c(-0.5, 3.0)]).unwrap();
        assert_eq!(d.eval(0.0), c(2.5, 4.0));
    }

    #[test]
    fn critical_line_examples() {
        let one = ArithmeticSequence::from_fn("1", 1, 10, |_| 1.0f64).unwrap();
        let p = critical_line_poly(&one, &one, 4, 4).unwrap();
        assert_eq!(p.poly.coefficients(), &[c(0.5, 0.0)]);
        assert_eq!(p.weight_sup, 1.0);

        let mu = moebius::<f64>(6).unwrap();
        let p = critical_line_poly(&one, &mu, 1, 6).unwrap();
        let expect = [
            1.0,
            -1.0 / 2f64.sqrt(),
            -1.0 / 3f64.sqrt(),
            0.0,
            -1.0 / 5f64.sqrt(),
            1.0 / 6f64.sqrt(),
        ];
        for (a, e) in p.poly.coefficients().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }

        let zero = ArithmeticSequence::from_fn("0", 1, 10, |_| 0.0f64).unwrap();
        let p = critical_line_poly(&zero, &one, 2, 9).unwrap();
        assert!(p.poly.is_zero());

        assert!(critical_line_poly(&one, &mu, 1, 7).is_err());
        assert!(critical_line_poly(&one, &one, 5, 4).is_err());
    }

    #[test]
    fn json_round_trip_and_formats() {
        let d = DirichletPolynomial::from_terms([(2, c(1.0, -0.5)), (7, c(0.25, 0.0))]).unwrap();
        let json = d.to_json().unwrap();
        assert_eq!(
            json,
            r#"[{"n":2,"re":1.0,"im":-0.5},{"n":7,"re":0.25,"im":0.0}]"#
        );
        assert_eq!(DirichletPolynomial::<f64>::from_json(&json).unwrap(), d);

        let s =
            ExponentialSum::<f64>::from_json(r#"[{"nu":0.5,"re":1,"im":0},{"n":1,"re":2,"im":0}]"#)
                .unwrap();
        assert_eq!(s.frequencies(), &[0.0, 0.5]);
        assert_eq!(
            ExponentialSum::<f64>::from_json(&s.to_json().unwrap()).unwrap(),
            s
        );

        assert!(DirichletPolynomial::<f64>::from_json(r#"[{"nu":0.5,"re":1,"im":0}]"#).is_err());
        assert!(ExponentialSum::<f64>::from_json(r#"[{"x":1}]"#).is_err());
    }
}
