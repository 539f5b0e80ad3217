//! Sparse Laurent polynomials in one variable `u`.
//!
//! [`Laurent`] is generic over its coefficient ring: [`SparseLaurent`] has
//! [`EmbVector`] coefficients (elements of `l((u)) ⊗ F̄_p`) and is what the
//! residue pairing works with; [`ScalarLaurent`] has plain field coefficients
//! and fills the matrices of φ-modules one embedding at a time.

use std::collections::BTreeMap;
use std::fmt;

use crate::embvec::EmbVector;
use crate::error::{Error, Result};
use crate::gf::{FFElem, Field};

pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn compatible(&self, other: &Self) -> bool;
}

impl Coefficient for FFElem {
    fn is_zero(&self) -> bool {
        FFElem::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }
    fn compatible(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}

impl Coefficient for EmbVector {
    fn is_zero(&self) -> bool {
        EmbVector::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        EmbVector::zeros(self.field(), self.f(), self.d())
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn compatible(&self, other: &Self) -> bool {
        self.same_shape(other)
    }
}

/// A finitely supported map from exponents to nonzero coefficients. `zero`
/// fixes the coefficient shape so empty series still know where they live.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<C> {
    zero: C,
    terms: BTreeMap<i64, C>,
}

pub type SparseLaurent = Laurent<EmbVector>;
pub type ScalarLaurent = Laurent<FFElem>;

impl<C: Coefficient> Laurent<C> {
    pub fn zero(template: &C) -> Self {
        Laurent {
            zero: template.zero_like(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(c: C, exponent: i64) -> Self {
        let mut s = Self::zero(&c);
        if !c.is_zero() {
            s.terms.insert(exponent, c);
        }
        s
    }

    pub fn from_terms(template: &C, terms: impl IntoIterator<Item = (i64, C)>) -> Result<Self> {
        let mut s = Self::zero(template);
        for (e, c) in terms {
            s.add_term(e, c)?;
        }
        Ok(s)
    }

    pub fn add_term(&mut self, exponent: i64, c: C) -> Result<()> {
        if !c.compatible(&self.zero) {
            return Err(Error::ShapeMismatch("coefficient shape".into()));
        }
        let sum = match self.terms.get(&exponent) {
            Some(old) => old.try_add(&c)?,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&exponent);
        } else {
            self.terms.insert(exponent, sum);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: i64) -> C {
        self.terms
            .get(&exponent)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    /// Coefficient of `u^{-1}`.
    pub fn residue(&self) -> C {
        self.coefficient(-1)
    }

    /// `(exponent, coefficient)` when the series is a single nonzero term.
    pub fn as_monomial(&self) -> Option<(i64, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(&e, c)| (e, c))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.zero.compatible(&other.zero) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("series coefficient shapes differ".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.zero);
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                let e = e1
                    .checked_add(e2)
                    .ok_or_else(|| Error::Overflow("product exponent".into()))?;
                out.add_term(e, c1.try_mul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Result<Self> {
        if !c.compatible(&self.zero) {
            return Err(Error::ShapeMismatch("scalar shape".into()));
        }
        let mut out = Self::zero(&self.zero);
        for (&e, x) in &self.terms {
            out.add_term(e, x.try_mul(c)?)?;
        }
        Ok(out)
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            zero: self.zero.clone(),
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitution `u ↦ u^k` (coefficients untouched).
    pub fn inflate(&self, k: i64) -> Self {
        assert!(k > 0, "inflation factor must be positive");
        Laurent {
            zero: self.zero.clone(),
            terms: self.terms.iter().map(|(&e, c)| (e * k, c.clone())).collect(),
        }
    }
}

impl SparseLaurent {
    /// `dlog u = u^{-1}` with all-ones coefficient.
    pub fn dlog_uniformizer(field: &Field, f: usize, d: usize) -> Self {
        Self::monomial(EmbVector::ones(field, f, d), -1)
    }
}

/// Truncated `dlog E(λ u^r) = Σ_{m ≤ m_max} (r mod p) (φ⊗1)^m(λ) u^{r p^m - 1}`.
pub fn dlog_ah_unit(r: u64, lam: &EmbVector, m_max: u32) -> Result<SparseLaurent> {
    if r == 0 {
        return Err(Error::Overflow("r must be positive".into()));
    }
    let field = lam.field();
    let p = field.p();
    let scalar = field.from_int((r % p) as i64);
    let mut out = SparseLaurent::zero(lam);
    let mut rp = r as i64;
    for m in 0..=m_max {
        if m > 0 {
            rp = rp
                .checked_mul(p as i64)
                .ok_or_else(|| Error::Overflow(format!("{r}·{p}^{m}")))?;
        }
        let coeff = lam.frobshift(m as usize).scale(&scalar)?;
        out.add_term(rp - 1, coeff)?;
    }
    Ok(out)
}
