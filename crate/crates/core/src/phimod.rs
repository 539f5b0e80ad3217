//! Rank-2 étale φ-modules given by one 2×2 matrix per embedding index.
//!
//! `mats[i]` is the matrix of `φ: M_{i-1} → M_i`; its columns are the images
//! of the basis `(e_{i-1}, f_{i-1})` written in the basis `(e_i, f_i)`. The
//! coefficient ring `F̄_p` is fixed by φ, so φ on an entry is just `u ↦ u^p`.

use serde::{Deserialize, Serialize};

use crate::embvec::{lambda_mu_inv, EmbVector};
use crate::error::{Error, Result};
use crate::gf::{FFElem, Field};
use crate::series::ScalarLaurent;
use crate::weights::{ChiKind, WeightInstance};

pub type Mat2 = [[ScalarLaurent; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct PhiMatSeq {
    /// Residues are read modulo `f`; the period is `f` or `f·d`.
    f: usize,
    mats: Vec<Mat2>,
}

/// `c·u^exp` with `c ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: FFElem,
    pub exp: i64,
}

impl Monomial {
    pub fn new(coeff: FFElem, exp: i64) -> Result<Self> {
        if coeff.is_zero() {
            return Err(Error::PhiModule("monomial coefficient must be nonzero".into()));
        }
        Ok(Monomial { coeff, exp })
    }

    pub fn one(field: &Field) -> Self {
        Monomial {
            coeff: field.one(),
            exp: 0,
        }
    }

    fn series(&self) -> ScalarLaurent {
        ScalarLaurent::monomial(self.coeff.clone(), self.exp)
    }

    fn inverse(&self) -> Result<Self> {
        Ok(Monomial {
            coeff: self.coeff.inv()?,
            exp: -self.exp,
        })
    }

    fn frob(&self, p: u64) -> Self {
        Monomial {
            coeff: self.coeff.clone(),
            exp: self.exp * p as i64,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        Monomial {
            coeff: &self.coeff * &other.coeff,
            exp: self.exp + other.exp,
        }
    }
}

/// Per-index diagonal change of basis `e'_i = D_i[0]·e_i`, `f'_i = D_i[1]·f_i`.
pub type DiagSeq = Vec<[Monomial; 2]>;

fn mat_mul(a: &Mat2, b: &Mat2) -> Result<Mat2> {
    let entry = |i: usize, j: usize| -> Result<ScalarLaurent> {
        a[i][0].mul(&b[0][j])?.add(&a[i][1].mul(&b[1][j])?)
    };
    Ok([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]])
}

fn diag(d: &[Monomial; 2], zero: &ScalarLaurent) -> Mat2 {
    [
        [d[0].series(), zero.clone()],
        [zero.clone(), d[1].series()],
    ]
}

impl PhiMatSeq {
    pub fn new(f: usize, mats: Vec<Mat2>) -> Result<Self> {
        if f == 0 || mats.is_empty() || mats.len() % f != 0 {
            return Err(Error::PhiModule(format!(
                "period {} is not a positive multiple of f={f}",
                mats.len()
            )));
        }
        Ok(PhiMatSeq { f, mats })
    }

    pub fn period(&self) -> usize {
        self.mats.len()
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn mats(&self) -> &[Mat2] {
        &self.mats
    }

    pub fn determinants(&self) -> Result<Vec<ScalarLaurent>> {
        self.mats
            .iter()
            .map(|m| {
                let neg = m[0][1]
                    .mul(&m[1][0])?
                    .scale(&m[0][0].coefficient(0).field().from_int(-1))?;
                m[0][0].mul(&m[1][1])?.add(&neg)
            })
            .collect()
    }

    /// Every determinant is a nonzero monomial, so `φ^*M → M` is invertible.
    pub fn is_etale(&self) -> Result<bool> {
        Ok(self
            .determinants()?
            .iter()
            .all(|d| d.as_monomial().is_some()))
    }

    /// Every matrix is `[[1, *], [0, 1]]`.
    pub fn is_unipotent(&self) -> bool {
        self.mats.iter().all(|m| {
            m[0][0].as_monomial().is_some_and(|(e, c)| e == 0 && c.is_one())
                && m[1][1].as_monomial().is_some_and(|(e, c)| e == 0 && c.is_one())
                && m[1][0].is_zero()
        })
    }
}

/// The normal-form matrices over `k((u))` (period `f`):
/// `[[u^{r_i-h_i}, x_i (+ x″u^p at i_0)], [0, (a)_i u^{h_i}]]` with
/// `(a)_0 = a` and `(a)_i = 1` otherwise.
pub fn build_bdj(inst: &WeightInstance, x: &[FFElem], x_extra: Option<&FFElem>) -> Result<PhiMatSeq> {
    let f = inst.f;
    let field = inst.field();
    if x.len() != f {
        return Err(Error::PhiModule(format!("expected {f} coefficients, got {}", x.len())));
    }
    if let Some(i) = (0..f).find(|i| !inst.j.contains(i) && !x[*i].is_zero()) {
        return Err(Error::PhiModule(format!("x_{i} must vanish for {i} outside J")));
    }
    if x_extra.is_some_and(|c| !c.is_zero()) && inst.chi != ChiKind::Trivial {
        return Err(Error::PhiModule("extra u^p term requires the trivial character".into()));
    }
    let zero = ScalarLaurent::zero(&field.zero());
    let mats = (0..f)
        .map(|i| {
            let mut upper = ScalarLaurent::monomial(x[i].clone(), 0);
            if let (Some(c), Some(i0)) = (x_extra, inst.i0) {
                if i == i0 {
                    upper.add_term(inst.p as i64, c.clone())?;
                }
            }
            let twist = if i == 0 { inst.a.clone() } else { field.one() };
            Ok([
                [
                    ScalarLaurent::monomial(field.one(), (inst.r[i] - inst.h[i]) as i64),
                    upper,
                ],
                [zero.clone(), ScalarLaurent::monomial(twist, inst.h[i] as i64)],
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    PhiMatSeq::new(f, mats)
}

/// Pullback along `u ↦ u^{p^f-1}` and extension of scalars from `k` to `l`:
/// exponents are multiplied by `p^f - 1` and the period goes from `f` to
/// `f·d`, with the twist `a` kept at every index `≡ 0 (mod f)`.
pub fn base_change_to_m(seq: &PhiMatSeq, p: u64, d: usize) -> Result<PhiMatSeq> {
    let f = seq.f;
    if seq.period() != f {
        return Err(Error::PhiModule("base change expects a period-f sequence".into()));
    }
    let q = (p as i64).pow(f as u32) - 1;
    let mats = (0..f * d)
        .map(|t| {
            let m = &seq.mats[t % f];
            [
                [m[0][0].inflate(q), m[0][1].inflate(q)],
                [m[1][0].inflate(q), m[1][1].inflate(q)],
            ]
        })
        .collect();
    PhiMatSeq::new(f, mats)
}

/// `A'_t = D_t^{-1} A_t φ(D_{t-1})`, indices cyclic.
pub fn change_basis(seq: &PhiMatSeq, p: u64, dd: &DiagSeq) -> Result<PhiMatSeq> {
    let n = seq.period();
    if dd.len() != n {
        return Err(Error::PhiModule(format!(
            "{} diagonal matrices for period {n}",
            dd.len()
        )));
    }
    let zero = ScalarLaurent::zero(&seq.mats[0][0][0].coefficient(0));
    let mats = (0..n)
        .map(|t| {
            let prev = &dd[(t + n - 1) % n];
            let dinv = [dd[t][0].inverse()?, dd[t][1].inverse()?];
            let phi_prev = [prev[0].frob(p), prev[1].frob(p)];
            let left = diag(&dinv, &zero);
            let right = diag(&phi_prev, &zero);
            mat_mul(&mat_mul(&left, &seq.mats[t])?, &right)
        })
        .collect::<Result<Vec<_>>>()?;
    PhiMatSeq::new(seq.f, mats)
}

/// `D_t = diag(u^{α_t}, a^{⌊t/f⌋} u^{β_t})`, which trivializes the diagonal.
pub fn standard_basis_change(inst: &WeightInstance) -> Result<DiagSeq> {
    let f = inst.f;
    let field = inst.field();
    (0..f * inst.d as usize)
        .map(|t| {
            Ok([
                Monomial::new(field.one(), inst.xi.alpha[t % f])?,
                Monomial::new(inst.a.pow((t / f) as u128), inst.xi.beta[t % f])?,
            ])
        })
        .collect()
}

/// One term `coeff · u^exponent` of the Artin–Schreier representative,
/// supported on the embeddings over `σ_residue`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTerm {
    pub residue: usize,
    pub coeff: EmbVector,
    pub exponent: i64,
}

/// Reads the upper-right entries of a unipotent sequence as an element of
/// `l((u)) ⊗ F̄_p`, grouped by residue class of the index and exponent.
pub fn extract_as_class(seq: &PhiMatSeq, d: usize) -> Result<Vec<ClassTerm>> {
    if !seq.is_unipotent() {
        return Err(Error::PhiModule("matrices are not unipotent".into()));
    }
    let f = seq.f;
    if seq.period() != f * d {
        return Err(Error::PhiModule("extraction expects period f·d".into()));
    }
    let field = seq.mats[0][0][0].coefficient(0).field().clone();
    let mut out = Vec::new();
    for i in 0..f {
        let mut exps: Vec<i64> = (0..d)
            .flat_map(|k| seq.mats[i + k * f][0][1].terms().map(|(e, _)| e).collect::<Vec<_>>())
            .collect();
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            let mut comps = vec![field.zero(); f * d];
            for k in 0..d {
                comps[i + k * f] = seq.mats[i + k * f][0][1].coefficient(e);
            }
            out.push(ClassTerm {
                residue: i,
                coeff: EmbVector::from_comps(f, d, comps)?,
                exponent: e,
            });
        }
    }
    Ok(out)
}

/// Result of replaying the normal form through base change and the standard
/// change of basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub etale: bool,
    pub unipotent: bool,
    /// The extracted terms are exactly `x_i·c_i·λ_{σ_i,μ^{-1}} u^{-ξ_i}` for
    /// `i ∈ J` (plus the constant extra term when `χ = 1`), where `c_0 = a^{-1}`
    /// and `c_i = 1` otherwise.
    pub exponents_match: bool,
    /// Exponents found, as `(residue, exponent)`.
    pub terms: Vec<(usize, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

impl ReplayOutcome {
    pub fn passed(&self) -> bool {
        self.etale && self.unipotent && self.exponents_match
    }
}

pub fn replay(inst: &WeightInstance, x: &[FFElem], x_extra: Option<&FFElem>) -> Result<ReplayOutcome> {
    let f = inst.f;
    let d = inst.d as usize;
    let p = inst.p;
    let mut problems = Vec::new();
    let bdj = build_bdj(inst, x, x_extra)?;
    let over_l = base_change_to_m(&bdj, p, d)?;
    let changed = change_basis(&over_l, p, &standard_basis_change(inst)?)?;
    let etale = bdj.is_etale()? && over_l.is_etale()? && changed.is_etale()?;
    if !etale {
        problems.push("a determinant is not a nonzero monomial".into());
    }
    let unipotent = changed.is_unipotent();
    if !unipotent {
        problems.push("diagonal not trivialized".into());
        return Ok(ReplayOutcome {
            etale,
            unipotent,
            exponents_match: false,
            terms: Vec::new(),
            problems,
        });
    }
    let terms = extract_as_class(&changed, d)?;

    let a_inv = inst.a.inv()?;
    let mut expected: Vec<(usize, i64, EmbVector)> = Vec::new();
    for &i in &inst.j {
        let mut lam = lambda_mu_inv(i, &inst.a, f, d)?;
        if i == 0 {
            lam = lam.scale(&a_inv)?;
        }
        if !x[i].is_zero() {
            expected.push((i, -inst.xi(i as i64), lam.scale(&x[i])?));
        }
        if let (Some(c), Some(i0)) = (x_extra, inst.i0) {
            if i == i0 && !c.is_zero() {
                let shift = p as i64 * inst.unit_order() - inst.xi(i as i64);
                let mut lam = lambda_mu_inv(i, &inst.a, f, d)?;
                if i == 0 {
                    lam = lam.scale(&a_inv)?;
                }
                if shift != 0 {
                    problems.push(format!("extra term exponent {shift} is not 0"));
                }
                expected.push((i, shift, lam.scale(c)?));
            }
        }
    }
    expected.sort_by_key(|(i, e, _)| (*i, *e));
    let got: Vec<(usize, i64, EmbVector)> = terms
        .iter()
        .map(|t| (t.residue, t.exponent, t.coeff.clone()))
        .collect();
    let exponents_match = got == expected && problems.is_empty();
    if got != expected {
        problems.push(format!(
            "extracted {:?}, expected {:?}",
            got.iter().map(|(i, e, _)| (*i, *e)).collect::<Vec<_>>(),
            expected.iter().map(|(i, e, _)| (*i, *e)).collect::<Vec<_>>()
        ));
    }
    Ok(ReplayOutcome {
        etale,
        unipotent,
        exponents_match,
        terms: got.iter().map(|(i, e, _)| (*i, *e)).collect(),
        problems,
    })
}

/// Replay with `x_i = 1` on `J` and, for the trivial character, `x″ = 1`.
pub fn replay_unit(inst: &WeightInstance) -> Result<ReplayOutcome> {
    let field = inst.field();
    let x: Vec<FFElem> = (0..inst.f)
        .map(|i| if inst.j.contains(&i) { field.one() } else { field.zero() })
        .collect();
    let extra = (inst.chi == ChiKind::Trivial).then(|| field.one());
    replay(inst, &x, extra.as_ref())
}
