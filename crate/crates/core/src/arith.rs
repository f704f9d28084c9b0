//! Integer-indexed arithmetic functions: divisor functions, the Möbius
//! function, least-squares balancing and windowed sup-norms.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::export::format_g17;
use crate::scalar::Scalar;
use crate::summation::dot;

/// Values of an arithmetic function on the integers `n_min..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticSequence<T> {
    name: String,
    n_min: u64,
    values: Vec<T>,
}

impl<T: Scalar> ArithmeticSequence<T> {
    /// Wraps `values`, where `values[i]` is the value at `n_min + i`.
    pub fn new(name: impl Into<String>, n_min: u64, values: Vec<T>) -> Result<Self> {
        if n_min == 0 {
            return Err(invalid("n_min", "sequences are indexed from 1"));
        }
        if values.is_empty() {
            return Err(invalid("values", "sequence must be nonempty"));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            name: name.into(),
            n_min,
            values,
        })
    }

    /// Tabulates `f` on `n_min..=n_max`.
    pub fn from_fn(
        name: impl Into<String>,
        n_min: u64,
        n_max: u64,
        f: impl Fn(u64) -> T,
    ) -> Result<Self> {
        if n_min > n_max {
            return Err(invalid("n_max", format!("n_max={n_max} < n_min={n_min}")));
        }
        Self::new(name, n_min, (n_min..=n_max).map(f).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    pub fn n_max(&self) -> u64 {
        self.n_min + self.values.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        lo >= self.n_min && hi <= self.n_max()
    }

    pub fn ensure_covers(&self, lo: u64, hi: u64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::RangeNotCovered {
                lo,
                hi,
                n_min: self.n_min,
                n_max: self.n_max(),
            })
        }
    }

    /// Value at `n`; outside the stored range this is an error, never zero.
    pub fn get(&self, n: u64) -> Result<T> {
        self.ensure_covers(n, n)?;
        Ok(self.values[(n - self.n_min) as usize])
    }

    /// Contiguous values on `lo..=hi`.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<&[T]> {
        self.ensure_covers(lo, hi)?;
        Ok(&self.values[(lo - self.n_min) as usize..=(hi - self.n_min) as usize])
    }

    /// The same values under another label.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Writes `n,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(
                out,
                "{},{}",
                self.n_min + i as u64,
                format_g17(v.to_f64_lossy())
            )?;
        }
        Ok(())
    }
}

/// k-fold divisor function d_k(n) for `1 <= n <= limit`, exact in u64.
pub fn dk_exact(k: u32, limit: u64) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if limit == 0 {
        return Err(invalid("limit", "must be at least 1"));
    }
    let len = usize::try_from(limit).map_err(|_| invalid("limit", "exceeds address space"))?;
    let mut cur = vec![1u64; len];
    // d_{j+1} = d_j * 1 (Dirichlet convolution), one harmonic-sum pass each.
    for _ in 1..k {
        let mut next = vec![0u64; len];
        for d in 1..=len {
            let v = cur[d - 1];
            let mut m = d;
            while m <= len {
                next[m - 1] = next[m - 1]
                    .checked_add(v)
                    .ok_or(Error::Overflow { k, limit })?;
                m += d;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// d_k on `[1, limit]` as a floating-point sequence.
pub fn sieve_dk<T: Scalar>(k: u32, limit: u64) -> Result<ArithmeticSequence<T>> {
    let exact = dk_exact(k, limit)?;
    ArithmeticSequence::new(
        format!("d_{k}"),
        1,
        exact.into_iter().map(T::from_u64_lossy).collect(),
    )
}

/// Möbius function on `[1, limit]` via a linear sieve.
pub fn moebius_exact(limit: u64) -> Result<Vec<i8>> {
    if limit == 0 {
        return Err(invalid("limit", "must be at least 1"));
    }
    let len = usize::try_from(limit).map_err(|_| invalid("limit", "exceeds address space"))?;
    let mut mu = vec![0i8; len + 1];
    let mut composite = vec![false; len + 1];
    let mut primes = Vec::new();
    mu[1] = 1;
    for i in 2..=len {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > len {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    mu.remove(0);
    Ok(mu)
}

pub fn moebius<T: Scalar>(limit: u64) -> Result<ArithmeticSequence<T>> {
    let mu = moebius_exact(limit)?;
    ArithmeticSequence::new(
        "mu",
        1,
        mu.into_iter().map(|m| T::lit(f64::from(m))).collect(),
    )
}

/// Subtracts the least-squares polynomial of the given degree in `log n`.
///
/// The fit is done by modified Gram–Schmidt with one reorthogonalisation
/// pass, and the residual is projected twice, so it is orthogonal to each
/// `(log n)^j` to near working precision.
pub fn balance<T: Scalar>(
    seq: &ArithmeticSequence<T>,
    degree: usize,
) -> Result<ArithmeticSequence<T>> {
    if seq.len() < degree + 2 {
        return Err(invalid(
            "degree",
            format!("need at least {} points, have {}", degree + 2, seq.len()),
        ));
    }
    let logs: Vec<T> = (seq.n_min..=seq.n_max())
        .map(|n| T::from_u64_lossy(n).ln())
        .collect();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(degree + 1);
    let mut col: Vec<T> = vec![T::one(); seq.len()];
    for j in 0..=degree {
        if j > 0 {
            col = col.iter().zip(&logs).map(|(&c, &l)| c * l).collect();
        }
        let mut q = col.clone();
        let original = dot(&q, &q).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let r = dot(b, &q);
                q.iter_mut().zip(b).for_each(|(x, &bv)| *x -= r * bv);
            }
        }
        let norm = dot(&q, &q).sqrt();
        let rank_tol = T::lit(1e3) * T::eps() * T::from_usize(seq.len()).unwrap().sqrt();
        if !(norm > rank_tol * original) {
            return Err(Error::RankDeficient { degree });
        }
        q.iter_mut().for_each(|x| *x /= norm);
        basis.push(q);
    }

    let mut resid = seq.values.clone();
    for _ in 0..2 {
        for b in &basis {
            let r = dot(b, &resid);
            resid.iter_mut().zip(b).for_each(|(x, &bv)| *x -= r * bv);
        }
    }
    ArithmeticSequence::new(format!("{}~{degree}", seq.name), seq.n_min, resid)
}

/// max |seq(n)| over integers `N - delta < n <= 2N + delta` (clamped to n >= 1).
pub fn sup_norm<T: Scalar>(seq: &ArithmeticSequence<T>, big_n: u64, delta: f64) -> Result<T> {
    if big_n == 0 {
        return Err(invalid("N", "must be positive"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", "must be positive and finite"));
    }
    let n = big_n as f64;
    let lo = ((n - delta).floor() + 1.0).max(1.0) as u64;
    let hi = (2.0 * n + delta).floor() as u64;
    let vals = seq.slice(lo, hi)?;
    Ok(vals.iter().fold(T::zero(), |m, v| m.max(v.abs())))
}
