//! Weight data `(p, f, r, J)`, the character digits `a_j` and exponents
//! `n_i`, the change-of-basis exponents `α_i, β_i, ξ_i`, the data
//! `(σ'_i, n'_i)` defining the Artin–Hasse units, the modified set `μ(J)`,
//! and exhaustive enumeration of valid instances.
//!
//! Indices are integers read modulo `f`; `r`, `J` and the digits are
//! periodic. Embedding `σ_i` is represented by `i mod f`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::gf::{divisors, is_prime, FFElem, Field, FieldDesc};

pub type IndexSet = BTreeSet<usize>;

fn md(i: i64, f: usize) -> usize {
    i.rem_euclid(f as i64) as usize
}

fn ipow(p: u64, k: usize) -> i64 {
    (p as i64).pow(k as u32)
}

/// `p^f - 1`.
pub fn unit_order(p: u64, f: usize) -> i64 {
    ipow(p, f) - 1
}

fn validate_r(p: u64, f: usize, r: &[u64]) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 || r.len() != f {
        return Err(Error::InvalidWeight(format!(
            "r must have exactly f={f} entries, got {}",
            r.len()
        )));
    }
    if let Some(bad) = r.iter().find(|&&x| x < 1 || x > p) {
        return Err(Error::InvalidWeight(format!("r_i={bad} outside [1,{p}]")));
    }
    Ok(())
}

fn validate_j(f: usize, j: &IndexSet) -> Result<()> {
    match j.iter().find(|&&i| i >= f) {
        Some(i) => Err(Error::InvalidWeight(format!("J contains {i} >= f={f}"))),
        None => Ok(()),
    }
}

/// Which maximality rule `(r, J)` breaks, if any.
pub fn maximality_violation(p: u64, f: usize, r: &[u64], j: &IndexSet) -> Result<Option<String>> {
    validate_r(p, f, r)?;
    validate_j(f, j)?;
    let rr = |i: i64| r[md(i, f)];
    let inj = |i: i64| j.contains(&md(i, f));
    // Windows (r_s, …, r_e) = (1, p-1, …, p-1, p) of length 2..=f; longer
    // windows cannot match because r is f-periodic.
    for start in 0..f as i64 {
        if rr(start) != 1 {
            continue;
        }
        for len in 2..=f as i64 {
            let end = start + len - 1;
            let interior_ok = (start + 1..end).all(|t| rr(t) == p - 1);
            if !interior_ok {
                break;
            }
            if rr(end) != p {
                continue;
            }
            let tail_out = (start + 1..=end).all(|t| !inj(t));
            if tail_out && inj(start) {
                return Ok(Some(format!(
                    "maximality: (r_{start},…,r_{}) = (1,p-1,…,p-1,p) with {}..{} outside J forces {} outside J",
                    md(end, f),
                    md(start + 1, f),
                    md(end, f),
                    md(start, f)
                )));
            }
        }
    }
    let all_pm1 = r.iter().all(|&x| x == p - 1);
    let p2_all2 = p == 2 && r.iter().all(|&x| x == 2);
    if (all_pm1 || p2_all2) && j.is_empty() {
        return Ok(Some(
            "maximality: J must be nonempty when all r_i = p-1 (or p = 2 and all r_i = 2)".into(),
        ));
    }
    Ok(None)
}

pub fn is_maximal_j(p: u64, f: usize, r: &[u64], j: &IndexSet) -> Result<bool> {
    Ok(maximality_violation(p, f, r, j)?.is_none())
}

/// The case `J = {0,…,f-1}` with every `r_i = p`, which is handled separately
/// and never enumerated.
pub fn is_excluded_case(p: u64, f: usize, r: &[u64], j: &IndexSet) -> bool {
    r.iter().all(|&x| x == p) && j.len() == f
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiData {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    /// `α_i - p β_{i-1}`.
    pub xi: Vec<i64>,
    /// The signed digit sum `Σ_j (-1)^{[i+j+1 ∉ J]} r_{i+j+1} p^{f-1-j} + δ_{i∈J} r_i (p^f - 1)`.
    pub xi_direct: Vec<i64>,
}

pub fn h_vector(f: usize, r: &[u64], j: &IndexSet) -> Vec<u64> {
    (0..f).map(|i| if j.contains(&i) { r[i] } else { 0 }).collect()
}

pub fn xi_alpha_beta(p: u64, f: usize, r: &[u64], j: &IndexSet) -> Result<XiData> {
    validate_r(p, f, r)?;
    validate_j(f, j)?;
    let h = h_vector(f, r, j);
    let rr = |i: i64| r[md(i, f)] as i64;
    let hh = |i: i64| h[md(i, f)] as i64;
    let q = unit_order(p, f);
    let fi = f as i64;
    let alpha: Vec<i64> = (0..fi)
        .map(|i| -(0..fi).map(|t| (rr(i + t + 1) - hh(i + t + 1)) * ipow(p, f - 1 - t as usize)).sum::<i64>())
        .collect();
    let beta: Vec<i64> = (0..fi)
        .map(|i| -(0..fi).map(|t| hh(i + t + 1) * ipow(p, f - 1 - t as usize)).sum::<i64>())
        .collect();
    let xi: Vec<i64> = (0..fi)
        .map(|i| alpha[i as usize] - p as i64 * beta[md(i - 1, f)])
        .collect();
    let xi_direct: Vec<i64> = (0..fi)
        .map(|i| {
            let signed: i64 = (0..fi)
                .map(|t| {
                    let idx = i + t + 1;
                    let sign = if j.contains(&md(idx, f)) { 1 } else { -1 };
                    sign * rr(idx) * ipow(p, f - 1 - t as usize)
                })
                .sum();
            let extra = if j.contains(&(i as usize)) { rr(i) * q } else { 0 };
            signed + extra
        })
        .collect();
    Ok(XiData {
        alpha,
        beta,
        xi,
        xi_direct,
    })
}

/// Digits `a_1, …, a_f ∈ [1, p]` (not all `p`) of the inertial exponent and
/// the derived `n_i = Σ_{j=1}^{f} a_{i+j} p^{f-j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterData {
    pub p: u64,
    pub f: usize,
    /// `a_1, …, a_f`; `a_{j+f} = a_j`.
    pub digits: Vec<u64>,
    /// `n_0, …, n_{f-1}`.
    pub n: Vec<i64>,
}

impl CharacterData {
    /// `a_j` for any integer `j`.
    pub fn a(&self, j: i64) -> u64 {
        self.digits[md(j - 1, self.f)]
    }

    pub fn n_at(&self, i: i64) -> i64 {
        self.n[md(i, self.f)]
    }

    fn from_digits(p: u64, f: usize, digits: Vec<u64>) -> Self {
        let mut cd = CharacterData {
            p,
            f,
            digits,
            n: Vec::new(),
        };
        cd.n = (0..f as i64)
            .map(|i| {
                (1..=f)
                    .map(|j| cd.a(i + j as i64) as i64 * ipow(p, f - j))
                    .sum()
            })
            .collect();
        cd
    }
}

/// The unique `n_0 ≡ e (mod p^f - 1)` with digits in `[1, p]`, not all `p`,
/// found by scanning `[(p^f-1)/(p-1), (p^f-1) + (p^f-1)/(p-1))`.
pub fn digits_from_exponent(p: u64, f: usize, e: i64) -> CharacterData {
    let q = unit_order(p, f);
    let lo = q / (p as i64 - 1);
    let n0 = (lo..lo + q)
        .find(|n| (n - e).rem_euclid(q) == 0)
        .expect("window has length p^f - 1");
    // n0 - lo = Σ (a_j - 1) p^{f-j} in ordinary base p.
    let mut rest = n0 - lo;
    let mut digits = vec![0u64; f];
    for j in (1..=f).rev() {
        digits[j - 1] = (rest % p as i64) as u64 + 1;
        rest /= p as i64;
    }
    assert_eq!(rest, 0, "digit expansion overflowed");
    assert!(digits.iter().any(|&a| a != p), "all digits equal p");
    CharacterData::from_digits(p, f, digits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdrDatum {
    /// Index of `σ'_i`, in `0..f`.
    pub s_prime: usize,
    pub n_prime: i64,
}

pub fn ddr_data(cd: &CharacterData, i: i64) -> DdrDatum {
    let p = cd.p;
    let f = cd.f;
    if cd.a(i - 1) != p {
        return DdrDatum {
            s_prime: md(i - 1, f),
            n_prime: cd.n_at(i - 1),
        };
    }
    // greatest j < i with a_{j-1} != p-1; a_{i-1-f} = p bounds the search
    let mut j = i - 1;
    while cd.a(j - 1) == p - 1 {
        j -= 1;
    }
    DdrDatum {
        s_prime: md(j - 1, f),
        n_prime: cd.n_at(j - 1) - unit_order(p, f),
    }
}

/// `μ(J)`, together with the `(removed, added)` replacement pairs applied.
pub fn mu_of_j_with_moves(cd: &CharacterData, j: &IndexSet) -> (IndexSet, Vec<(usize, usize)>) {
    let p = cd.p;
    let f = cd.f;
    let mut moves = Vec::new();
    for i in 0..f as i64 {
        if j.contains(&(i as usize)) || cd.a(i - 1) != p {
            continue;
        }
        // a_{i-2} = … = a_{i-s} = p-1, a_{i-s-1} != p-1
        let mut s = 1i64;
        while cd.a(i - s - 1) == p - 1 {
            s += 1;
        }
        if let Some(x) = (1..=s).find(|&x| j.contains(&md(i - x, f))) {
            moves.push((md(i - x, f), i as usize));
        }
    }
    let mut out: IndexSet = j.clone();
    for &(from, _) in &moves {
        out.remove(&from);
    }
    for &(_, to) in &moves {
        out.insert(to);
    }
    (out, moves)
}

pub fn mu_of_j(cd: &CharacterData, j: &IndexSet) -> IndexSet {
    mu_of_j_with_moves(cd, j).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiKind {
    Trivial,
    Cyclotomic,
    Other,
}

impl fmt::Display for ChiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChiKind::Trivial => "trivial",
            ChiKind::Cyclotomic => "cyclotomic",
            ChiKind::Other => "other",
        })
    }
}

/// For `p = 2` the all-ones digits are both `p - 1` and `1`; trivial wins.
pub fn classify_chi(cd: &CharacterData, a: &FFElem) -> ChiKind {
    if !a.is_one() {
        return ChiKind::Other;
    }
    if cd.digits.iter().all(|&x| x == cd.p - 1) {
        ChiKind::Trivial
    } else if cd.digits.iter().all(|&x| x == 1) {
        ChiKind::Cyclotomic
    } else {
        ChiKind::Other
    }
}

/// Whether `[l:k] = d` is usable: the unramified extension must have degree
/// prime to `p`.
pub fn admissible_degree(p: u64, d: u64) -> bool {
    d >= 1 && d % p != 0
}

fn mult_order_mod(p: u64, d: u64) -> u64 {
    if d == 1 {
        return 1;
    }
    let mut x = p % d;
    let mut k = 1;
    while x != 1 {
        x = x * p % d;
        k += 1;
    }
    k
}

/// The ambient field for `(p, f, d)`: `F_{p^e}` with
/// `e = lcm(f·d, ord_d(p))`, so it contains `l = F_{p^{fd}}` and the `d`-th
/// roots of unity. Fields are cached per `(p, e)`.
pub fn instance_field(p: u64, f: usize, d: u64) -> Result<Field> {
    if !admissible_degree(p, d) {
        return Err(Error::InvalidInstance(format!(
            "d={d} must be positive and prime to p={p}"
        )));
    }
    let e = (f as u64 * d).lcm(&mult_order_mod(p, d)) as u32;
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(fld) = cache.lock().unwrap().get(&(p, e)) {
        return Ok(fld.clone());
    }
    let fld = FieldDesc::new(p, e, None)?;
    Ok(cache
        .lock()
        .unwrap()
        .entry((p, e))
        .or_insert(fld)
        .clone())
}

/// Which unramified twists `a` to take for a given `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistPolicy {
    /// One element of each order dividing `d`.
    Generators,
    /// Every `d`-th root of unity.
    All,
}

impl TwistPolicy {
    /// Exponents `k` with `a = ζ_d^k`.
    pub fn twists(self, d: u64) -> Vec<u64> {
        match self {
            TwistPolicy::Generators => divisors(d).into_iter().map(|t| (d / t) % d).collect(),
            TwistPolicy::All => (0..d).collect(),
        }
    }
}

/// One fully derived instance: weight data, unramified twist and every
/// combinatorial quantity built from them.
#[derive(Clone, Debug)]
pub struct WeightInstance {
    pub p: u64,
    pub f: usize,
    pub r: Vec<u64>,
    pub j: IndexSet,
    pub d: u64,
    /// `a = ζ_d^twist` for the field's canonical primitive `d`-th root `ζ_d`.
    pub twist: u64,
    pub a: FFElem,
    pub h: Vec<u64>,
    pub xi: XiData,
    pub chars: CharacterData,
    pub ddr: Vec<DdrDatum>,
    pub mu_j: IndexSet,
    pub mu_moves: Vec<(usize, usize)>,
    pub chi: ChiKind,
    /// The distinguished element of `J` carrying the extra class when `χ = 1`.
    pub i0: Option<usize>,
}

impl WeightInstance {
    pub fn new(p: u64, f: usize, r: Vec<u64>, j: IndexSet, d: u64, twist: u64) -> Result<Self> {
        let field = instance_field(p, f, d)?;
        Self::with_field(&field, p, f, r, j, d, twist)
    }

    fn with_field(
        field: &Field,
        p: u64,
        f: usize,
        r: Vec<u64>,
        j: IndexSet,
        d: u64,
        twist: u64,
    ) -> Result<Self> {
        if let Some(why) = maximality_violation(p, f, &r, &j)? {
            return Err(Error::InvalidWeight(why));
        }
        if is_excluded_case(p, f, &r, &j) {
            return Err(Error::InvalidWeight(
                "excluded cyclotomic J=S case: J = {0,…,f-1} and every r_i = p".into(),
            ));
        }
        if ipow(p, f).checked_mul(ipow(p, 2)).is_none() {
            return Err(Error::Overflow(format!("p^(f+2) for p={p}, f={f}")));
        }
        let twist = twist % d;
        let a = field.root_of_unity(d)?.pow(twist as u128);
        let h = h_vector(f, &r, &j);
        let xi = xi_alpha_beta(p, f, &r, &j)?;
        let chars = digits_from_exponent(p, f, xi.xi[0]);
        let ddr = (0..f as i64).map(|i| ddr_data(&chars, i)).collect();
        let (mu_j, mu_moves) = mu_of_j_with_moves(&chars, &j);
        let chi = classify_chi(&chars, &a);
        let i0 = match chi {
            ChiKind::Trivial => Some(*j.iter().next().ok_or_else(|| {
                Error::InvalidWeight("trivial character with empty J".into())
            })?),
            _ => None,
        };
        Ok(WeightInstance {
            p,
            f,
            r,
            j,
            d,
            twist,
            a,
            h,
            xi,
            chars,
            ddr,
            mu_j,
            mu_moves,
            chi,
            i0,
        })
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn unit_order(&self) -> i64 {
        unit_order(self.p, self.f)
    }

    pub fn xi(&self, i: i64) -> i64 {
        self.xi.xi[md(i, self.f)]
    }

    /// Stable identifier, also the sort key of reports.
    pub fn key(&self) -> String {
        let r: Vec<String> = self.r.iter().map(u64::to_string).collect();
        let j: Vec<String> = self.j.iter().map(usize::to_string).collect();
        format!(
            "p={} f={} r=({}) J={{{}}} d={} a=z^{}",
            self.p,
            self.f,
            r.join(","),
            j.join(","),
            self.d,
            self.twist
        )
    }

    /// Smallest `c` with `p^c ≥ max(ξ_i, 1)` over `i ∈ J`, plus one.
    pub fn m_cap(&self) -> u32 {
        let xi_max = self
            .j
            .iter()
            .map(|&i| self.xi.xi[i].abs())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut c = 0u32;
        while ipow(self.p, c as usize) < xi_max {
            c += 1;
        }
        c + 1
    }

    /// Every combinatorial invariant the comparison relies on.
    pub fn lemma_suite(&self) -> Vec<Check> {
        let p = self.p as i64;
        let f = self.f;
        let q = self.unit_order();
        let low = q / (p - 1);
        let cd = &self.chars;
        let mut out = Vec::new();

        let mut c = Check::new("xi_routes_agree");
        for i in 0..f {
            c.require(self.xi.xi[i] == self.xi.xi_direct[i], || {
                format!("i={i}: α-β route {} vs direct {}", self.xi.xi[i], self.xi.xi_direct[i])
            });
        }
        out.push(c);

        let mut c = Check::new("xi_congruent_n");
        for i in 0..f {
            c.require((self.xi.xi[i] - cd.n[i]).rem_euclid(q) == 0, || {
                format!("i={i}: ξ={} n={} mod {q}", self.xi.xi[i], cd.n[i])
            });
        }
        out.push(c);

        let mut c = Check::new("n_twist_consistency");
        for i in 0..f {
            let lhs = cd.n[i].rem_euclid(q);
            let rhs = (cd.n[0] as i128 * (p as i128).pow(i as u32)).rem_euclid(q as i128) as i64;
            c.require(lhs == rhs, || format!("n_{i}={} vs p^{i} n_0 mod {q}", cd.n[i]));
        }
        out.push(c);

        let mut c = Check::new("digits_valid");
        c.require(
            cd.digits.iter().all(|&a| (1..=self.p).contains(&a))
                && cd.digits.iter().any(|&a| a != self.p),
            || format!("digits {:?}", cd.digits),
        );
        out.push(c);

        let mut c = Check::new("n_bounds");
        for i in 0..f {
            c.require(low <= cd.n[i] && cd.n[i] < q + low, || {
                format!("n_{i}={} outside [{low}, {})", cd.n[i], q + low)
            });
        }
        out.push(c);

        let mut c = Check::new("xi_bounds");
        let upper = p * p * low;
        for &i in &self.j {
            let x = self.xi.xi[i];
            c.require(0 < x && x < upper, || format!("i={i}: ξ={x} outside (0, {upper})"));
        }
        out.push(c);

        let mut c = Check::new("nprime_unit");
        for (i, dd) in self.ddr.iter().enumerate() {
            c.require(dd.n_prime > 0 && dd.n_prime % p != 0, || {
                format!("i={i}: n'={}", dd.n_prime)
            });
        }
        out.push(c);

        let mut c = Check::new("xi_valuation");
        for &i in &self.j {
            let x = self.xi.xi[i];
            if x <= 0 {
                c.fail(format!("i={i}: ξ={x} not positive"));
                continue;
            }
            let mut m = 0usize;
            let mut rest = x;
            while rest % p == 0 {
                rest /= p;
                m += 1;
            }
            let ii = i as i64;
            if m == 0 {
                c.fail(format!("i={i}: v_p(ξ)=0"));
            } else if m > 1 {
                let want = ipow(self.p, m) * (cd.n_at(ii - m as i64) - q);
                c.require(x == want, || format!("i={i}: ξ={x}, m={m}, p^m(n-q)={want}"));
            } else {
                let want = if x / p >= low {
                    p * cd.n_at(ii - 1)
                } else {
                    p * (cd.n_at(ii - 1) - q)
                };
                c.require(x == want, || format!("i={i}: ξ={x}, m=1, expected {want}"));
            }
        }
        out.push(c);

        let mut c = Check::new("mu_cardinality");
        c.require(self.mu_j.len() == self.j.len(), || {
            format!("|μ(J)|={} |J|={} moves {:?}", self.mu_j.len(), self.j.len(), self.mu_moves)
        });
        out.push(c);

        let mut c = Check::new("trivial_xi");
        if self.chi == ChiKind::Trivial {
            for &i in &self.j {
                c.require(self.xi.xi[i] == p * q, || {
                    format!("i={i}: ξ={} but χ trivial", self.xi.xi[i])
                });
            }
        }
        out.push(c);

        let mut c = Check::new("extra_no_solution");
        if self.chi == ChiKind::Trivial {
            let m_cap = self.m_cap();
            for &i in &self.j {
                let lhs = self.xi.xi[i] - p * q;
                for (jj, dd) in self.ddr.iter().enumerate() {
                    for m in 0..=m_cap {
                        c.require(lhs != ipow(self.p, m as usize) * dd.n_prime, || {
                            format!("i={i} j={jj} m={m}: ξ-p(p^f-1)={lhs}")
                        });
                    }
                }
            }
        }
        out.push(c);

        out
    }
}

/// All `(r, J)` with `r ∈ [1,p]^f` (lexicographic) and `J` maximal, in
/// bitmask order, skipping the excluded all-`p`/full-`J` case.
pub fn valid_weights(p: u64, f: usize) -> Result<Vec<(Vec<u64>, IndexSet)>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::InvalidWeight("f must be at least 1".into()));
    }
    let mut out = Vec::new();
    let total = (p as usize).pow(f as u32);
    for idx in 0..total {
        let mut r = vec![0u64; f];
        let mut n = idx;
        for slot in r.iter_mut().rev() {
            *slot = (n % p as usize) as u64 + 1;
            n /= p as usize;
        }
        for mask in 0u64..(1 << f) {
            let j: IndexSet = (0..f).filter(|&i| mask >> i & 1 == 1).collect();
            if is_excluded_case(p, f, &r, &j) || !is_maximal_j(p, f, &r, &j)? {
                continue;
            }
            out.push((r.clone(), j));
        }
    }
    Ok(out)
}

/// Every instance for `(p, f)` over the admissible degrees in `d_list` and the
/// twists chosen by `policy`. Order: `(r, J)` as in [`valid_weights`], then `d`
/// in list order, then twist.
pub fn enumerate_instances(
    p: u64,
    f: usize,
    d_list: &[u64],
    policy: TwistPolicy,
) -> Result<Vec<WeightInstance>> {
    let weights = valid_weights(p, f)?;
    let fields: Vec<(u64, Field)> = d_list
        .iter()
        .filter(|&&d| admissible_degree(p, d))
        .map(|&d| Ok((d, instance_field(p, f, d)?)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (r, j) in weights {
        for (d, field) in &fields {
            for k in policy.twists(*d) {
                out.push(WeightInstance::with_field(
                    field,
                    p,
                    f,
                    r.clone(),
                    j.clone(),
                    *d,
                    k,
                )?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> IndexSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal_j(3, 2, &[1, 1], &set(&[1])).unwrap());
        assert!(!is_maximal_j(3, 2, &[1, 3], &set(&[0])).unwrap());
        assert!(!is_maximal_j(3, 1, &[2], &set(&[])).unwrap());
        assert!(!is_maximal_j(2, 2, &[2, 2], &set(&[])).unwrap());
        assert!(is_maximal_j(2, 2, &[2, 2], &set(&[1])).unwrap());
        assert!(matches!(
            is_maximal_j(3, 2, &[0, 1], &set(&[])),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            is_maximal_j(3, 2, &[4, 1], &set(&[])),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn maximality_long_window() {
        // p=3, r=(1,2,3): window (1,2,3) with 1,2 ∉ J forces 0 ∉ J
        assert!(!is_maximal_j(3, 3, &[1, 2, 3], &set(&[0])).unwrap());
        assert!(is_maximal_j(3, 3, &[1, 2, 3], &set(&[0, 2])).unwrap());
        // interior must be all p-1
        assert!(is_maximal_j(3, 3, &[1, 1, 3], &set(&[0])).unwrap());
    }

    #[test]
    fn xi_examples() {
        let x = xi_alpha_beta(3, 1, &[1], &set(&[0])).unwrap();
        assert_eq!(x.xi, vec![3]);
        assert_eq!(x.xi_direct, vec![3]);
        let x = xi_alpha_beta(3, 2, &[1, 1], &set(&[1])).unwrap();
        assert_eq!(x.xi, vec![2, 6]);
        assert_eq!(x.xi_direct, vec![2, 6]);
        let x = xi_alpha_beta(3, 1, &[1], &set(&[])).unwrap();
        assert_eq!(x.xi, vec![-1]);
    }

    #[test]
    fn digit_examples() {
        let cd = digits_from_exponent(3, 2, 0);
        assert_eq!(cd.digits, vec![2, 2]);
        assert_eq!(cd.n[0], 8);
        let cd = digits_from_exponent(3, 2, 2);
        assert_eq!(cd.digits, vec![3, 1]);
        assert_eq!(cd.n, vec![10, 6]);
        let cd = digits_from_exponent(2, 1, 0);
        assert_eq!(cd.digits, vec![1]);
        assert_eq!(cd.n, vec![1]);
        // negative exponents are reduced
        assert_eq!(digits_from_exponent(3, 2, -6), digits_from_exponent(3, 2, 2));
    }

    #[test]
    fn ddr_examples() {
        let cd = digits_from_exponent(3, 2, 2);
        assert_eq!(ddr_data(&cd, 1), DdrDatum { s_prime: 0, n_prime: 10 });
        assert_eq!(ddr_data(&cd, 0), DdrDatum { s_prime: 0, n_prime: 2 });
        let triv = digits_from_exponent(5, 3, 0);
        for i in 0..3 {
            assert_eq!(
                ddr_data(&triv, i),
                DdrDatum { s_prime: md(i - 1, 3), n_prime: 124 }
            );
        }
    }

    #[test]
    fn mu_examples() {
        let cd = digits_from_exponent(3, 2, 2);
        assert_eq!(mu_of_j(&cd, &set(&[1])), set(&[0]));
        assert_eq!(mu_of_j(&cd, &set(&[0])), set(&[0]));
        let no_p = digits_from_exponent(3, 3, 17);
        assert!(no_p.digits.iter().all(|&a| a != 3));
        for mask in 0..8usize {
            let j: IndexSet = (0..3).filter(|&i| mask >> i & 1 == 1).collect();
            assert_eq!(mu_of_j(&no_p, &j), j);
        }
    }

    #[test]
    fn chi_examples() {
        let fld = FieldDesc::new(3, 2, None).unwrap();
        let one = fld.one();
        assert_eq!(classify_chi(&digits_from_exponent(3, 2, 0), &one), ChiKind::Trivial);
        assert_eq!(classify_chi(&digits_from_exponent(3, 2, 4), &one), ChiKind::Cyclotomic);
        let cd = digits_from_exponent(3, 2, 2);
        assert_eq!(classify_chi(&cd, &one), ChiKind::Other);
        assert_eq!(classify_chi(&cd, &fld.from_int(2)), ChiKind::Other);
        assert_eq!(
            classify_chi(&digits_from_exponent(3, 2, 0), &fld.from_int(2)),
            ChiKind::Other
        );
    }

    #[test]
    fn enumeration_p3_f1() {
        let w = valid_weights(3, 1).unwrap();
        let expect = vec![
            (vec![1], set(&[])),
            (vec![1], set(&[0])),
            (vec![2], set(&[0])),
            (vec![3], set(&[])),
        ];
        assert_eq!(w, expect);
    }

    #[test]
    fn enumeration_p2_f1() {
        // (1,∅) fails nonemptiness (all r = p-1), (2,{0}) is excluded,
        // (2,∅) fails nonemptiness (p = 2, all r = 2)
        let w = valid_weights(2, 1).unwrap();
        assert_eq!(w, vec![(vec![1], set(&[0]))]);
        let inst = enumerate_instances(2, 1, &[1], TwistPolicy::Generators).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].chi, ChiKind::Trivial);
        assert_eq!(inst[0].i0, Some(0));
    }

    #[test]
    fn degrees_divisible_by_p_are_skipped() {
        let inst = enumerate_instances(3, 1, &[1, 2, 3], TwistPolicy::Generators).unwrap();
        assert!(inst.iter().all(|x| x.d != 3));
        // 4 weights × (d=1: 1 twist, d=2: 2 twists)
        assert_eq!(inst.len(), 12);
        assert!(WeightInstance::new(3, 1, vec![1], set(&[0]), 3, 0).is_err());
    }

    #[test]
    fn twist_policies() {
        assert_eq!(TwistPolicy::Generators.twists(1), vec![0]);
        assert_eq!(TwistPolicy::Generators.twists(6), vec![0, 3, 2, 1]);
        assert_eq!(TwistPolicy::All.twists(3), vec![0, 1, 2]);
    }

    #[test]
    fn worked_instance() {
        let inst = WeightInstance::new(3, 2, vec![1, 1], set(&[1]), 1, 0).unwrap();
        assert_eq!(inst.chars.digits, vec![3, 1]);
        assert_eq!(inst.chars.n, vec![10, 6]);
        assert_eq!(inst.xi(1), 6);
        assert_eq!(
            inst.ddr,
            vec![
                DdrDatum { s_prime: 0, n_prime: 2 },
                DdrDatum { s_prime: 0, n_prime: 10 }
            ]
        );
        assert_eq!(inst.mu_j, set(&[0]));
        assert!(inst.lemma_suite().iter().all(|c| c.passed));
    }

    #[test]
    fn instance_errors() {
        let e = WeightInstance::new(3, 1, vec![3], set(&[0]), 1, 0).unwrap_err();
        assert!(e.to_string().contains("excluded cyclotomic J=S case"));
        let e = WeightInstance::new(3, 2, vec![1, 3], set(&[0]), 1, 0).unwrap_err();
        assert!(e.to_string().contains("maximality"));
    }
}
