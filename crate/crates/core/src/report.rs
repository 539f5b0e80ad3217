//! Serialization and human-readable rendering of reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::artin_hasse::{
    ah_mod_p, ah_rational, dlog_mod_p, is_p_integral, power_sum_flags, verify_norm_identity,
};
use crate::check::Check;
use crate::error::Result;
use crate::pairing::{PairingReport, RangeReport};
use crate::phimod::ReplayOutcome;
use crate::weights::WeightInstance;

/// Pretty JSON with a trailing newline. Parsing and re-rendering any report
/// produced here gives the same bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

/// One row per (instance, check).
pub fn range_csv(report: &RangeReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::InvalidInstance(format!("csv: {e}"));
    w.write_record(["key", "p", "f", "d", "twist", "chi", "check", "passed", "detail"])
        .map_err(io)?;
    for inst in &report.instances {
        for c in &inst.checks {
            w.write_record([
                inst.key.as_str(),
                &inst.p.to_string(),
                &inst.f.to_string(),
                &inst.d.to_string(),
                &inst.twist.to_string(),
                &inst.chi,
                &c.name,
                if c.passed { "true" } else { "false" },
                &c.counterexamples.join("; "),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::InvalidInstance(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn range_plain(report: &RangeReport) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "instances: {}  passed: {}  failed: {}  ({:.2?})",
        s.instances, s.passed, s.failed, report.elapsed
    );
    for (p, d) in &s.skipped_degrees {
        let _ = writeln!(out, "skipped d={d} for p={p} (d divisible by p)");
    }
    for (name, c) in &s.checks {
        let _ = writeln!(out, "  {name:<22} pass {:>6}  fail {:>6}", c.passed, c.failed);
    }
    let failing: Vec<&PairingReport> = report.instances.iter().filter(|r| !r.passed()).collect();
    for r in failing.iter().take(20) {
        let _ = writeln!(out, "FAIL {}", r.key);
        for c in r.checks.iter().filter(|c| !c.passed) {
            for ce in c.counterexamples.iter().take(3) {
                let _ = writeln!(out, "    {}: {ce}", c.name);
            }
        }
    }
    if failing.len() > 20 {
        let _ = writeln!(out, "… {} more failing instances", failing.len() - 20);
    }
    out
}

/// Everything `inspect` shows about one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dossier {
    pub pairing: PairingReport,
    pub replay: ReplayOutcome,
    /// Coefficients `x_i` used in the replay, as coefficient lists.
    pub replay_x: Vec<Vec<u64>>,
    /// Whether the matrix on `μ(J)` columns is a permutation-with-scalars
    /// pattern (exploratory, nothing is asserted).
    pub monomial_pattern: bool,
}

fn monomial_pattern(rep: &PairingReport) -> bool {
    let nonzero = |x: &Vec<u64>| x.iter().any(|&c| c != 0);
    let rows_ok = rep.matrix.iter().all(|row| row.iter().filter(|x| nonzero(x)).count() == 1);
    let ncols = rep.cols.len();
    let cols_ok = (0..ncols).all(|k| rep.matrix.iter().filter(|row| nonzero(&row[k])).count() <= 1);
    rows_ok && cols_ok
}

impl Dossier {
    pub fn new(pairing: PairingReport, replay: ReplayOutcome, replay_x: Vec<Vec<u64>>) -> Self {
        let monomial_pattern = monomial_pattern(&pairing);
        Dossier {
            pairing,
            replay,
            replay_x,
            monomial_pattern,
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

pub fn dossier_plain(inst: &WeightInstance, d: &Dossier) -> String {
    let rep = &d.pairing;
    let mut out = String::new();
    let _ = writeln!(out, "{}", rep.key);
    let _ = writeln!(out, "field        F_{}^{} mod {:?}", inst.p, inst.field().degree(), rep.modulus);
    let _ = writeln!(out, "a            {}", inst.a);
    let _ = writeln!(out, "chi          {}", rep.chi);
    if let Some(i0) = inst.i0 {
        let _ = writeln!(out, "i0           {i0}");
    }
    let _ = writeln!(out, "digits       ({})", join(&rep.digits));
    let _ = writeln!(out, "n            ({})", join(&rep.n));
    let _ = writeln!(out, "alpha        ({})", join(&rep.alpha));
    let _ = writeln!(out, "beta         ({})", join(&rep.beta));
    let _ = writeln!(out, "xi           ({})", join(&rep.xi));
    let _ = writeln!(out, "unit data    (s', n')");
    for (j, e) in rep.nprime.iter().enumerate() {
        let _ = writeln!(out, "  u{j}: ({}, {})", e.s_prime, e.n_prime);
    }
    let _ = writeln!(out, "J            {{{}}}", join(&rep.j));
    let _ = writeln!(out, "mu(J)        {{{}}}", join(&rep.mu_j));
    let _ = writeln!(
        out,
        "replay       {} terms {:?}",
        if d.replay.passed() { "ok" } else { "FAILED" },
        d.replay.terms
    );
    for pr in &d.replay.problems {
        let _ = writeln!(out, "  {pr}");
    }
    let field = inst.field();
    let _ = writeln!(out, "pairing matrix (* marks mu(J) columns and triv)");
    let header: Vec<String> = rep
        .cols
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let kept = k >= inst.f || rep.mu_j.contains(&k);
            format!("{}{c}", if kept { "*" } else { " " })
        })
        .collect();
    let _ = writeln!(out, "{:>8} {}", "", header.iter().map(|h| format!("{h:>10}")).collect::<String>());
    for (label, row) in rep.rows.iter().zip(&rep.matrix) {
        let cells: String = row
            .iter()
            .map(|x| format!("{:>10}", field.from_coeffs(x).to_string()))
            .collect();
        let _ = writeln!(out, "{label:>8} {cells}");
    }
    let _ = writeln!(out, "rank         {} (expected {})", rep.rank, rep.expected_rank);
    let _ = writeln!(out, "monomial     {}", d.monomial_pattern);
    for c in &rep.checks {
        let _ = writeln!(out, "  [{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name);
        for ce in &c.counterexamples {
            let _ = writeln!(out, "        {ce}");
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AhReport {
    pub p: u64,
    pub n: u32,
    pub trunc: usize,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
}

impl AhReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The norm identity at level `n`, `p`-integrality, and `dlog(E mod p)`
/// against `Σ x^{p^m - 1}`, all up to `x^trunc`.
pub fn ah_check(p: u64, n: u32, trunc: usize, show: bool) -> AhReport {
    let mut norm = Check::new("norm_identity");
    norm.require(verify_norm_identity(p, n, trunc), || {
        format!("product over p^{n}-th roots of unity differs below x^{trunc}")
    });
    let mut integral = Check::new("p_integral");
    integral.require(is_p_integral(p, trunc), || {
        format!("a coefficient below x^{trunc} has denominator divisible by {p}")
    });
    let mut dlog = Check::new("dlog_mod_p");
    match ah_mod_p(p, trunc) {
        Ok(red) => {
            let got = dlog_mod_p(&red, p);
            let want = power_sum_flags(p, got.len());
            dlog.require(got == want, || format!("dlog mod {p} is {got:?}"));
        }
        Err(e) => dlog.fail(e.to_string()),
    }
    let coefficients =
        show.then(|| ah_rational(p, trunc).iter().map(ToString::to_string).collect());
    AhReport {
        p,
        n,
        trunc,
        checks: vec![norm, integral, dlog],
        coefficients,
    }
}

pub fn ah_plain(r: &AhReport) -> String {
    let mut out = format!("Artin-Hasse p={} n={} trunc={}\n", r.p, r.n, r.trunc);
    for c in &r.checks {
        let _ = writeln!(out, "  [{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name);
        for ce in &c.counterexamples {
            let _ = writeln!(out, "        {ce}");
        }
    }
    if let Some(cs) = &r.coefficients {
        for (k, c) in cs.iter().enumerate() {
            let _ = writeln!(out, "  c_{k} = {c}");
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedInstance {
    pub key: String,
    pub r: Vec<u64>,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub d: u64,
    pub twist: u64,
    pub chi: String,
    #[serde(rename = "muJ")]
    pub mu_j: Vec<usize>,
}

impl From<&WeightInstance> for EnumeratedInstance {
    fn from(inst: &WeightInstance) -> Self {
        EnumeratedInstance {
            key: inst.key(),
            r: inst.r.clone(),
            j: inst.j.iter().copied().collect(),
            d: inst.d,
            twist: inst.twist,
            chi: inst.chi.to_string(),
            mu_j: inst.mu_j.iter().copied().collect(),
        }
    }
}
