//! The Artin–Hasse exponential `E(x) = exp(Σ_{m≥0} x^{p^m}/p^m)` with exact
//! rational coefficients, truncated power series over `Q(ζ_{p^n})`, and the
//! norm identity `Π_{k<p^n} E(tζ^k) = E(t^{p^n})`.
//!
//! `Q(ζ_{p^n})` is `Q[x]/Φ_{p^n}(x)` with `Φ_{p^n}(x) = Σ_{k<p} x^{k p^{n-1}}`;
//! level `n = 0` is `Q` itself.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn phi_degree(p: u64, n: u32) -> usize {
    if n == 0 {
        1
    } else {
        ((p - 1) * p.pow(n - 1)) as usize
    }
}

/// An element of `Q(ζ_{p^n})` in the power basis `1, ζ, …, ζ^{φ-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    p: u64,
    n: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero(p: u64, n: u32) -> Self {
        Cyclo {
            p,
            n,
            coeffs: vec![BigRational::zero(); phi_degree(p, n)],
        }
    }

    pub fn from_rational(p: u64, n: u32, q: BigRational) -> Self {
        let mut c = Self::zero(p, n);
        c.coeffs[0] = q;
        c
    }

    pub fn one(p: u64, n: u32) -> Self {
        Self::from_rational(p, n, BigRational::one())
    }

    /// `ζ^j`, reduced.
    pub fn zeta_pow(p: u64, n: u32, j: u64) -> Self {
        let order = p.pow(n);
        let j = (j % order) as usize;
        let mut raw = vec![BigRational::zero(); j + 1];
        raw[j] = BigRational::one();
        Self::reduce(p, n, raw)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    fn reduce(p: u64, n: u32, mut raw: Vec<BigRational>) -> Self {
        let phi = phi_degree(p, n);
        if n == 0 {
            let total = raw.into_iter().fold(BigRational::zero(), |a, b| a + b);
            return Cyclo {
                p,
                n,
                coeffs: vec![total],
            };
        }
        let step = p.pow(n - 1) as usize;
        // x^D ≡ -Σ_{k=0}^{p-2} x^{D-φ+k·step}
        for deg in (phi..raw.len()).rev() {
            let c = std::mem::take(&mut raw[deg]);
            if c.is_zero() {
                continue;
            }
            for k in 0..(p - 1) as usize {
                let idx = deg - phi + k * step;
                raw[idx] -= &c;
            }
        }
        raw.resize(phi, BigRational::zero());
        Cyclo { p, n, coeffs: raw }
    }

    fn check(&self, other: &Cyclo) -> Result<()> {
        if self.p == other.p && self.n == other.n {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "Q(ζ_{}^{}) vs Q(ζ_{}^{})",
                self.p, self.n, other.p, other.n
            )))
        }
    }

    pub fn add(&self, other: &Cyclo) -> Result<Cyclo> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Cyclo {
            p: self.p,
            n: self.n,
            coeffs,
        })
    }

    pub fn mul(&self, other: &Cyclo) -> Result<Cyclo> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Cyclo::zero(self.p, self.n));
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut raw = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Ok(Cyclo::reduce(self.p, self.n, raw))
    }
}

/// A power series over `Q(ζ_{p^n})` truncated mod `t^N`, `N = coeffs.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloSeries {
    p: u64,
    n: u32,
    coeffs: Vec<Cyclo>,
}

impl CycloSeries {
    pub fn new(p: u64, n: u32, coeffs: Vec<Cyclo>) -> Result<Self> {
        if coeffs.iter().any(|c| c.p != p || c.n != n) {
            return Err(Error::ShapeMismatch("coefficient level".into()));
        }
        Ok(CycloSeries { p, n, coeffs })
    }

    pub fn one(p: u64, n: u32, trunc: usize) -> Self {
        let mut coeffs = vec![Cyclo::zero(p, n); trunc];
        if trunc > 0 {
            coeffs[0] = Cyclo::one(p, n);
        }
        CycloSeries { p, n, coeffs }
    }

    /// Rational series viewed at level `n`.
    pub fn from_rationals(p: u64, n: u32, qs: &[BigRational]) -> Self {
        CycloSeries {
            p,
            n,
            coeffs: qs
                .iter()
                .map(|q| Cyclo::from_rational(p, n, q.clone()))
                .collect(),
        }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Cyclo] {
        &self.coeffs
    }

    pub fn mul(&self, other: &CycloSeries) -> Result<CycloSeries> {
        if self.p != other.p || self.n != other.n || self.trunc() != other.trunc() {
            return Err(Error::ShapeMismatch(
                "cyclotomic series level or truncation differ".into(),
            ));
        }
        let big_n = self.trunc();
        let mut coeffs = vec![Cyclo::zero(self.p, self.n); big_n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(big_n - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
                }
            }
        }
        Ok(CycloSeries {
            p: self.p,
            n: self.n,
            coeffs,
        })
    }
}

/// Exact coefficients `c_0, …, c_{N-1}` of `E(x)`, from `E' = g' E` with
/// `g = Σ x^{p^m}/p^m`, i.e. `k c_k = Σ_{p^m ≤ k} c_{k - p^m}`.
pub fn ah_rational(p: u64, trunc: usize) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = Vec::with_capacity(trunc);
    for k in 0..trunc {
        if k == 0 {
            c.push(BigRational::one());
            continue;
        }
        let mut acc = BigRational::zero();
        let mut pm = 1usize;
        while pm <= k {
            acc += &c[k - pm];
            pm *= p as usize;
        }
        c.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    c
}

/// `E(x) mod x^N` as a level-0 (rational) series.
pub fn ah_coeffs(p: u64, trunc: usize) -> CycloSeries {
    CycloSeries::from_rationals(p, 0, &ah_rational(p, trunc))
}

/// `E(tζ^k)` at level `n`.
fn twisted(e: &[BigRational], p: u64, n: u32, k: u64) -> CycloSeries {
    let order = p.pow(n);
    let coeffs = e
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut z = Cyclo::zeta_pow(p, n, (k * i as u64) % order);
            for x in z.coeffs.iter_mut() {
                *x *= c;
            }
            z
        })
        .collect();
    CycloSeries { p, n, coeffs }
}

pub fn cyclo_mul(x: &CycloSeries, y: &CycloSeries) -> Result<CycloSeries> {
    x.mul(y)
}

/// Checks `Π_{k=0}^{p^n-1} E(tζ^k) ≡ E(t^{p^n}) (mod t^N)` exactly in
/// `Q(ζ_{p^n})[[t]]`.
pub fn verify_norm_identity(p: u64, n: u32, trunc: usize) -> bool {
    if trunc <= 1 {
        // both sides are 1 + O(t)
        return true;
    }
    let e = ah_rational(p, trunc);
    let order = p.pow(n);
    let mut lhs = CycloSeries::one(p, n, trunc);
    for k in 0..order {
        lhs = lhs
            .mul(&twisted(&e, p, n, k))
            .expect("shapes agree by construction");
    }
    let rhs_coeffs: Vec<BigRational> = (0..trunc)
        .map(|i| {
            if i as u64 % order == 0 {
                e[i / order as usize].clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    lhs == CycloSeries::from_rationals(p, n, &rhs_coeffs)
}

/// Whether every coefficient of `E(x) mod x^N` has denominator prime to `p`.
pub fn is_p_integral(p: u64, trunc: usize) -> bool {
    let pb = BigInt::from(p);
    ah_rational(p, trunc)
        .iter()
        .all(|c| !c.denom().is_multiple_of(&pb))
}

fn reduce_rational_mod_p(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = q.numer().mod_floor(&pb).to_u64()?;
    let mut inv = 1u64;
    let mut b = den;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    Some(num * inv % p)
}

/// `E(x) mod (p, x^N)`; p-integrality makes this well defined.
pub fn ah_mod_p(p: u64, trunc: usize) -> Result<Vec<u64>> {
    ah_rational(p, trunc)
        .iter()
        .enumerate()
        .map(|(index, q)| reduce_rational_mod_p(q, p).ok_or(Error::NotPIntegral { p, index }))
        .collect()
}

/// `F'/F mod x^{N-1}` over `F_p` for a series with constant term 1.
pub fn dlog_mod_p(series: &[u64], p: u64) -> Vec<u64> {
    let n = series.len();
    if n <= 1 {
        return Vec::new();
    }
    assert_eq!(series[0] % p, 1, "constant term must be 1");
    let len = n - 1;
    // inverse of F mod x^len
    let mut inv = vec![0u64; len];
    inv[0] = 1;
    for k in 1..len {
        let mut acc = 0u64;
        for j in 1..=k {
            acc = (acc + series[j] % p * inv[k - j]) % p;
        }
        inv[k] = (p - acc) % p;
    }
    let deriv: Vec<u64> = (1..n).map(|k| (k as u64 % p) * (series[k] % p) % p).collect();
    (0..len)
        .map(|k| (0..=k).fold(0u64, |acc, j| (acc + deriv[j] * inv[k - j]) % p))
        .collect()
}

/// `F'/F mod x^{N-1}` over `Q` for a series with constant term 1.
pub fn log_derivative(series: &[BigRational]) -> Vec<BigRational> {
    let n = series.len();
    if n <= 1 {
        return Vec::new();
    }
    let len = n - 1;
    let mut q: Vec<BigRational> = Vec::with_capacity(len);
    // F' = q F, solve for q term by term (F_0 = 1)
    for k in 0..len {
        let mut v = &series[k + 1] * BigRational::from_integer(BigInt::from(k + 1));
        for j in 0..k {
            v -= &q[j] * &series[k - j];
        }
        q.push(v / &series[0]);
    }
    q
}

/// Coefficients of `Σ_m x^{p^m - 1}` below degree `len`, as 0/1 flags.
pub fn power_sum_flags(p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let mut pm = 1usize;
    while pm - 1 < len {
        out[pm - 1] = 1;
        pm *= p as usize;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_coefficients() {
        let e = ah_rational(2, 5);
        // E(x) for p=2: exp(x + x^2/2 + x^4/4 + ...) = 1 + x + x^2 + 2/3 x^3 + 2/3 x^4 ...
        assert_eq!(e, vec![q(1, 1), q(1, 1), q(1, 1), q(2, 3), q(2, 3)]);
        let e3 = ah_rational(3, 4);
        assert_eq!(&e3[..2], &[q(1, 1), q(1, 1)]);
        // p = 3: exp(x + x^3/3): x^2 -> 1/2, x^3 -> 1/6 + 1/3 = 1/2
        assert_eq!(&e3[2..], &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn cyclo_relations() {
        for (p, n) in [(2u64, 1u32), (3, 1), (3, 2), (2, 3)] {
            let order = p.pow(n);
            let z = Cyclo::zeta_pow(p, n, 1);
            let zi = Cyclo::zeta_pow(p, n, order - 1);
            assert_eq!(z.mul(&zi).unwrap(), Cyclo::one(p, n));
            // 1 + ζ^{p^{n-1}} + ... vanishes
            let step = p.pow(n - 1);
            let mut s = Cyclo::zero(p, n);
            for k in 0..p {
                s = s.add(&Cyclo::zeta_pow(p, n, k * step)).unwrap();
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn series_product_examples() {
        let (p, n, t) = (3, 1, 4);
        let mut a = CycloSeries::one(p, n, t);
        a.coeffs[1] = Cyclo::one(p, n);
        let mut b = CycloSeries::one(p, n, t);
        b.coeffs[1] = Cyclo::from_rational(p, n, q(-1, 1));
        let prod = cyclo_mul(&a, &b).unwrap();
        let mut expect = CycloSeries::one(p, n, t);
        expect.coeffs[2] = Cyclo::from_rational(p, n, q(-1, 1));
        assert_eq!(prod, expect);
        assert_eq!(cyclo_mul(&a, &CycloSeries::one(p, n, t)).unwrap(), a);
        assert!(cyclo_mul(&a, &CycloSeries::one(p, 2, t)).is_err());
        assert!(cyclo_mul(&a, &CycloSeries::one(p, n, t + 1)).is_err());
    }

    #[test]
    fn small_norm_identities() {
        assert!(verify_norm_identity(2, 1, 8));
        assert!(verify_norm_identity(3, 1, 12));
        assert!(verify_norm_identity(5, 1, 1));
    }

    #[test]
    fn exp_alone_fails_norm_identity() {
        // sanity: the identity is specific to E; plain exp(x) gives
        // Π exp(tζ^k) = exp(0) = 1, which differs from exp(t^p).
        let p = 3;
        let trunc = 8;
        let mut fact = BigRational::one();
        let ex: Vec<BigRational> = (0..trunc)
            .map(|k| {
                if k > 0 {
                    fact *= BigRational::from_integer(BigInt::from(k));
                }
                BigRational::one() / &fact
            })
            .collect();
        let mut lhs = CycloSeries::one(p, 1, trunc);
        for k in 0..p {
            lhs = lhs.mul(&twisted(&ex, p, 1, k)).unwrap();
        }
        assert_eq!(lhs, CycloSeries::one(p, 1, trunc));
    }

    #[test]
    fn mod_p_reduction_and_dlog() {
        let r = ah_mod_p(3, 10).unwrap();
        assert_eq!(&r[..2], &[1, 1]);
        let dl = dlog_mod_p(&r, 3);
        assert_eq!(dl, power_sum_flags(3, 9));
        assert!(dlog_mod_p(&[1], 3).is_empty());
    }
}
