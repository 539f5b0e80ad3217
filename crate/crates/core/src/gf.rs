//! Finite fields `F_{p^e}` realized as `F_p[t]/(m(t))` for an explicit monic
//! irreducible `m`.
//!
//! A [`FieldDesc`] is built once and shared behind an [`Arc`]; every
//! [`FFElem`] carries a reference to the field it belongs to, and mixing
//! elements of different fields is an error rather than a coercion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Largest field cardinality we agree to handle. Orders are computed from a
/// trial-division factorization of `p^e - 1`, so this keeps that bounded.
const MAX_CARDINALITY: u128 = 1 << 62;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Prime factors of `n` with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n % q == 0 {
            let mut k = 0;
            while n % q == 0 {
                n /= q;
                k += 1;
            }
            out.push((q, k));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..=n).filter(|k| n % k == 0).collect();
    ds.sort_unstable();
    ds
}

// Dense polynomials over F_p, coefficients low to high. Helpers keep results
// trimmed (no trailing zeros); the zero polynomial is the empty vector.
mod poly {
    pub(super) fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub(super) fn inv_mod_p(x: u64, p: u64) -> u64 {
        pow_mod_p(x, p - 2, p)
    }

    pub(super) fn pow_mod_p(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    pub(super) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo `m` (any nonzero `m`).
    pub(super) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            if c != 0 {
                let shift = top - dm;
                for (k, &mk) in m.iter().enumerate() {
                    r[shift + k] = (r[shift + k] + p - c * mk % p) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub(super) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub(super) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub(super) fn pow_mod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }
}

/// Description of `F_{p^e}`: the prime, the degree and a monic irreducible
/// modulus of degree `e` (coefficients low to high, leading 1 included).
pub struct FieldDesc {
    p: u64,
    e: u32,
    modulus: Vec<u64>,
    order_factors: OnceLock<Vec<(u64, u32)>>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.e, self.modulus)
    }
}

pub type Field = Arc<FieldDesc>;

impl FieldDesc {
    /// Builds `F_{p^e}`. Without a modulus, the first monic irreducible with
    /// nonzero constant term is taken, scanning coefficient vectors in
    /// increasing order of `sum c_i p^i`.
    pub fn new(p: u64, e: u32, modulus: Option<Vec<u64>>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let card = (p as u128).checked_pow(e).filter(|&c| c <= MAX_CARDINALITY);
        if card.is_none() {
            return Err(Error::FieldTooLarge { p, e });
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus("coefficient out of range".into()));
                }
                if m[e as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                m
            }
            None => find_irreducible(p, e),
        };
        Ok(Arc::new(FieldDesc {
            p,
            e,
            modulus,
            order_factors: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn cardinality(&self) -> u64 {
        self.p.pow(self.e)
    }

    fn unit_group_factors(&self) -> &[(u64, u32)] {
        self.order_factors
            .get_or_init(|| factorize(self.cardinality() - 1))
    }

    pub fn zero(self: &Arc<Self>) -> FFElem {
        FFElem {
            field: Arc::clone(self),
            coeffs: vec![0; self.e as usize],
        }
    }

    pub fn one(self: &Arc<Self>) -> FFElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FFElem {
        let mut x = self.zero();
        x.coeffs[0] = n.rem_euclid(self.p as i64) as u64;
        x
    }

    /// The class of `t` in `F_p[t]/(m)`.
    pub fn generator(self: &Arc<Self>) -> FFElem {
        self.from_coeffs(&[0, 1])
    }

    /// Reduces an arbitrary coefficient list (low to high) into the field.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u64]) -> FFElem {
        let raw: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        self.reduce(raw)
    }

    /// The element whose coefficient vector is the base-`p` expansion of `n`.
    pub fn from_index(self: &Arc<Self>, mut n: u64) -> FFElem {
        let mut coeffs = vec![0; self.e as usize];
        for c in coeffs.iter_mut() {
            *c = n % self.p;
            n /= self.p;
        }
        FFElem {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// All field elements in index order. Only sensible for small fields.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FFElem> + '_ {
        (0..self.cardinality()).map(move |n| self.from_index(n))
    }

    fn reduce(self: &Arc<Self>, raw: Vec<u64>) -> FFElem {
        let mut r = poly::rem(&raw, &self.modulus, self.p);
        r.resize(self.e as usize, 0);
        FFElem {
            field: Arc::clone(self),
            coeffs: r,
        }
    }

    /// A canonical element of multiplicative order exactly `d`: the image of
    /// the first element (in index order) whose `(q-1)/d`-th power has order
    /// `d`. Fails if `d` does not divide `q - 1`.
    pub fn root_of_unity(self: &Arc<Self>, d: u64) -> Result<FFElem> {
        let n = self.cardinality() - 1;
        if d == 0 || n % d != 0 {
            return Err(Error::InvalidTwist(format!(
                "F_{}^{} has no element of order {}",
                self.p, self.e, d
            )));
        }
        let primes: Vec<u64> = factorize(d).into_iter().map(|(q, _)| q).collect();
        for idx in 1..self.cardinality() {
            let y = self.from_index(idx).pow((n / d) as u128);
            if primes.iter().all(|q| !y.pow((d / q) as u128).is_one()) {
                return Ok(y);
            }
        }
        unreachable!("the unit group of a finite field is cyclic")
    }
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let e = m.len() - 1;
    let x = vec![0, 1];
    // x^{p^k} mod m for k = 0..=e.
    let mut frob = vec![poly::rem(&x, m, p)];
    for k in 1..=e {
        let prev = &frob[k - 1];
        frob.push(poly::pow_mod(prev, p as u128, m, p));
    }
    if poly::sub(&frob[e], &frob[0], p).iter().any(|&c| c != 0) {
        return false;
    }
    (1..e).filter(|k| e % k == 0).all(|k| {
        let g = poly::gcd(&poly::sub(&frob[k], &x, p), m, p);
        g.len() == 1
    })
}

fn find_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    let count = p.pow(e as u32);
    for idx in 0..count {
        let mut m = vec![0u64; e + 1];
        let mut n = idx;
        for c in m.iter_mut().take(e) {
            *c = n % p;
            n /= p;
        }
        m[e] = 1;
        if m[0] == 0 {
            continue;
        }
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element of a finite field: a reduced residue of degree `< e`.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElem {
    field: Field,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.to_prime() {
            return write!(f, "{}", c);
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{}", c)?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{}t", c)?,
                (k, 1) => write!(f, "t^{}", k)?,
                (k, c) => write!(f, "{}t^{}", c, k)?,
            }
        }
        Ok(())
    }
}

impl FFElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The value as an element of `F_p`, if it lies in the prime field.
    pub fn to_prime(&self) -> Option<u64> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }

    pub fn same_field(&self, other: &FFElem) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    fn check(&self, other: &FFElem) -> Result<()> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &FFElem) -> Result<FFElem> {
        self.check(other)?;
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(FFElem {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &FFElem) -> Result<FFElem> {
        self.check(other)?;
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &FFElem) -> Result<FFElem> {
        self.check(other)?;
        let prod = poly::mul(&self.coeffs, &other.coeffs, self.field.p);
        Ok(self.field.reduce(prod))
    }

    pub fn checked_div(&self, other: &FFElem) -> Result<FFElem> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> FFElem {
        let p = self.field.p;
        FFElem {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
        }
    }

    pub fn inv(&self) -> Result<FFElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.cardinality() as u128 - 2))
    }

    pub fn pow(&self, mut e: u128) -> FFElem {
        let mut acc = self.field.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// `x^k` for a possibly negative `k`; `x` must be nonzero when `k < 0`.
    pub fn pow_signed(&self, k: i64) -> Result<FFElem> {
        if k >= 0 {
            Ok(self.pow(k as u128))
        } else {
            Ok(self.inv()?.pow(k.unsigned_abs() as u128))
        }
    }

    /// `x^{p^m}` by `m` successive `p`-th powers.
    pub fn frobenius(&self, m: u64) -> FFElem {
        let p = self.field.p as u128;
        let steps = m % self.field.e as u64;
        (0..steps).fold(self.clone(), |x, _| x.pow(p))
    }

    /// The absolute trace `sum_{m<e} x^{p^m}`, an element of the prime field.
    pub fn trace_to_prime(&self) -> FFElem {
        let p = self.field.p as u128;
        let mut acc = self.field.zero();
        let mut y = self.clone();
        for _ in 0..self.field.e {
            acc = &acc + &y;
            y = y.pow(p);
        }
        acc
    }

    pub fn mult_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroOrder);
        }
        let mut n = self.field.cardinality() - 1;
        for &(q, k) in self.field.unit_group_factors() {
            for _ in 0..k {
                if self.pow((n / q) as u128).is_one() {
                    n /= q;
                } else {
                    break;
                }
            }
        }
        Ok(n)
    }
}

// Operator forms panic on mismatched fields; library code only combines
// elements it built from one field. Use the `checked_*` methods otherwise.
impl Add for &FFElem {
    type Output = FFElem;
    fn add(self, rhs: &FFElem) -> FFElem {
        self.checked_add(rhs).expect("field mismatch in addition")
    }
}

impl Sub for &FFElem {
    type Output = FFElem;
    fn sub(self, rhs: &FFElem) -> FFElem {
        self.checked_sub(rhs).expect("field mismatch in subtraction")
    }
}

impl Mul for &FFElem {
    type Output = FFElem;
    fn mul(self, rhs: &FFElem) -> FFElem {
        self.checked_mul(rhs).expect("field mismatch in multiplication")
    }
}

impl Neg for &FFElem {
    type Output = FFElem;
    fn neg(self) -> FFElem {
        self.neg_ref()
    }
}
