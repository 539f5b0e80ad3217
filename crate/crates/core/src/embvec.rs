//! `l ⊗_{F_p} F̄_p` in product coordinates: one `F̄_p` component per embedding
//! of `l`, indexed `0..f·d`. Index `i` and index `i + f` restrict to the same
//! embedding of `k`.

use crate::error::{Error, Result};
use crate::gf::{FFElem, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbVector {
    f: usize,
    d: usize,
    comps: Vec<FFElem>,
}

impl EmbVector {
    pub fn zeros(field: &Field, f: usize, d: usize) -> Self {
        assert!(f >= 1 && d >= 1, "f and d must be positive");
        EmbVector {
            f,
            d,
            comps: vec![field.zero(); f * d],
        }
    }

    pub fn ones(field: &Field, f: usize, d: usize) -> Self {
        EmbVector {
            f,
            d,
            comps: vec![field.one(); f * d],
        }
    }

    pub fn from_comps(f: usize, d: usize, comps: Vec<FFElem>) -> Result<Self> {
        if f == 0 || d == 0 || comps.len() != f * d {
            return Err(Error::ShapeMismatch(format!(
                "expected {} components for f={f}, d={d}, got {}",
                f * d,
                comps.len()
            )));
        }
        if comps.iter().any(|c| !c.same_field(&comps[0])) {
            return Err(Error::FieldMismatch);
        }
        Ok(EmbVector { f, d, comps })
    }

    /// Indicator of the embeddings restricting to `σ_s`, i.e. indices `≡ s (mod f)`.
    pub fn indicator(field: &Field, s: usize, f: usize, d: usize) -> Self {
        let mut v = Self::zeros(field, f, d);
        for t in 0..d {
            v.comps[s % f + t * f] = field.one();
        }
        v
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn field(&self) -> &Field {
        self.comps[0].field()
    }

    pub fn comps(&self) -> &[FFElem] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &FFElem {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FFElem::is_zero)
    }

    pub fn same_shape(&self, other: &EmbVector) -> bool {
        self.f == other.f && self.d == other.d && self.comps[0].same_field(&other.comps[0])
    }

    fn check(&self, other: &EmbVector) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "(f={}, d={}) vs (f={}, d={})",
                self.f, self.d, other.f, other.d
            )))
        }
    }

    /// `(φ ⊗ id)^m`: the component at `i` of the result is the input component
    /// at `i - m (mod f·d)`. Coefficients are not Frobenius-twisted.
    pub fn frobshift(&self, m: usize) -> Self {
        let n = self.comps.len();
        let m = m % n;
        let comps = (0..n).map(|i| self.comps[(i + n - m) % n].clone()).collect();
        EmbVector {
            f: self.f,
            d: self.d,
            comps,
        }
    }

    pub fn add(&self, other: &EmbVector) -> Result<Self> {
        self.check(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Ok(EmbVector {
            f: self.f,
            d: self.d,
            comps,
        })
    }

    pub fn mul(&self, other: &EmbVector) -> Result<Self> {
        self.check(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a * b).collect();
        Ok(EmbVector {
            f: self.f,
            d: self.d,
            comps,
        })
    }

    pub fn scale(&self, c: &FFElem) -> Result<Self> {
        if !c.same_field(&self.comps[0]) {
            return Err(Error::FieldMismatch);
        }
        Ok(EmbVector {
            f: self.f,
            d: self.d,
            comps: self.comps.iter().map(|x| x * c).collect(),
        })
    }

    /// Trace of `l ⊗ F̄_p / F̄_p`: the sum of all components.
    pub fn trace_sum(&self) -> FFElem {
        let zero = self.field().zero();
        self.comps.iter().fold(zero, |acc, x| &acc + x)
    }
}

fn check_twist(a: &FFElem, d: usize) -> Result<()> {
    if a.is_zero() {
        return Err(Error::InvalidTwist("a must be nonzero".into()));
    }
    let ord = a.mult_order()?;
    if d as u64 % ord != 0 {
        return Err(Error::InvalidTwist(format!(
            "order {ord} of a does not divide d={d}"
        )));
    }
    Ok(())
}

fn lambda(s: usize, a: &FFElem, f: usize, d: usize, sign: i64) -> Result<EmbVector> {
    check_twist(a, d)?;
    let mut v = EmbVector::zeros(a.field(), f, d);
    for t in 0..d {
        v.comps[s % f + t * f] = a.pow_signed(sign * t as i64)?;
    }
    Ok(v)
}

/// `λ_{σ_s, μ}`: component `a^{-t}` at index `s + t·f`, zero off the `σ_s` block.
/// Satisfies `frobshift(λ, f) = a · λ`.
pub fn lambda_mu(s: usize, a: &FFElem, f: usize, d: usize) -> Result<EmbVector> {
    lambda(s, a, f, d, -1)
}

/// `λ_{σ_s, μ^{-1}}`: component `a^{t}` at index `s + t·f`.
pub fn lambda_mu_inv(s: usize, a: &FFElem, f: usize, d: usize) -> Result<EmbVector> {
    lambda(s, a, f, d, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldDesc;

    #[test]
    fn shift_basics() {
        let fld = FieldDesc::new(3, 2, None).unwrap();
        let x = fld.generator();
        let y = fld.from_int(2);
        let v = EmbVector::from_comps(2, 1, vec![x.clone(), y.clone()]).unwrap();
        assert_eq!(v.frobshift(0), v);
        assert_eq!(v.frobshift(2), v);
        assert_eq!(v.frobshift(1).comps(), &[y, x]);
    }

    #[test]
    fn lambda_examples() {
        let f3 = FieldDesc::new(3, 1, None).unwrap();
        let one = f3.one();
        assert_eq!(lambda_mu(0, &one, 1, 1).unwrap().comps(), &[f3.one()]);
        assert_eq!(
            lambda_mu(1, &one, 2, 1).unwrap().comps(),
            &[f3.zero(), f3.one()]
        );
        let m1 = f3.from_int(-1);
        let expect = [f3.one(), f3.from_int(2)];
        assert_eq!(lambda_mu(0, &m1, 1, 2).unwrap().comps(), &expect);
        assert_eq!(lambda_mu_inv(0, &m1, 1, 2).unwrap().comps(), &expect);
        assert_eq!(lambda_mu_inv(0, &one, 1, 1).unwrap().comps(), &[f3.one()]);
    }

    #[test]
    fn lambda_rejects_bad_twist() {
        let f3 = FieldDesc::new(3, 1, None).unwrap();
        assert!(matches!(
            lambda_mu(0, &f3.zero(), 1, 2),
            Err(Error::InvalidTwist(_))
        ));
        // -1 has order 2, which does not divide 3
        assert!(matches!(
            lambda_mu(0, &f3.from_int(-1), 1, 3),
            Err(Error::InvalidTwist(_))
        ));
    }

    #[test]
    fn pointwise_examples() {
        let f3 = FieldDesc::new(3, 1, None).unwrap();
        let v = EmbVector::from_comps(2, 1, vec![f3.from_int(1), f3.from_int(2)]).unwrap();
        let w = EmbVector::from_comps(2, 1, vec![f3.from_int(2), f3.from_int(2)]).unwrap();
        let prod = v.mul(&w).unwrap();
        assert_eq!(prod.comps(), &[f3.from_int(2), f3.from_int(1)]);
        assert!(v.mul(&EmbVector::zeros(&f3, 2, 1)).unwrap().is_zero());
        assert_eq!(v.mul(&EmbVector::ones(&f3, 2, 1)).unwrap(), v);
        let other = EmbVector::zeros(&f3, 1, 2);
        assert!(matches!(v.add(&other), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn trace_of_lambda_products() {
        let fld = FieldDesc::new(5, 2, None).unwrap();
        let a = fld.root_of_unity(3).unwrap();
        let (f, d) = (2, 3);
        let prod = lambda_mu(1, &a, f, d)
            .unwrap()
            .mul(&lambda_mu_inv(1, &a, f, d).unwrap())
            .unwrap();
        assert_eq!(prod, EmbVector::indicator(&fld, 1, f, d));
        assert_eq!(prod.trace_sum(), fld.from_int(3));
        for m in 0..7 {
            assert_eq!(prod.frobshift(m).trace_sum(), fld.from_int(3));
        }
        assert!(EmbVector::zeros(&fld, f, d).trace_sum().is_zero());
    }
}
