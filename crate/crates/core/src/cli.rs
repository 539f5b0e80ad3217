//! Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::gf::FFElem;
use crate::pairing::{pairing_matrix, verify_range};
use crate::phimod::replay;
use crate::report::{
    ah_check, ah_plain, dossier_plain, range_csv, range_plain, to_json, Dossier,
    EnumeratedInstance,
};
use crate::weights::{enumerate_instances, ChiKind, IndexSet, TwistPolicy, WeightInstance};

/// Directory that relative `--output` paths are resolved against.
pub const OUTPUT_DIR_ENV: &str = "WEIGHTCHECK_OUTPUT_DIR";

const MAX_P: u64 = 7;
const MAX_F: usize = 6;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Twists {
    Generators,
    All,
}

impl From<Twists> for TwistPolicy {
    fn from(t: Twists) -> Self {
        match t {
            Twists::Generators => TwistPolicy::Generators,
            Twists::All => TwistPolicy::All,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "weightcheck", version, about = "Exact residue-pairing checks for Serre weight subspaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Show every derived quantity for one instance.
    Inspect {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        /// Elements of J, comma separated; omit for the empty set.
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        d: u64,
        /// Multiplicative order of the twist `a`; must divide d.
        #[arg(long = "a", default_value_t = 1)]
        a_order: u64,
        /// Use random nonzero coefficients in the replay.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check every instance in a range.
    Verify {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[arg(long)]
        f_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        d: Vec<u64>,
        #[arg(long, value_enum, default_value = "generators")]
        twists: Twists,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Artin–Hasse identities.
    AhCheck {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 30)]
        trunc: usize,
        /// Print the coefficients.
        #[arg(long)]
        show: bool,
        #[command(flatten)]
        out: Output,
    },
    /// List the valid instances for one `(p, f)`.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        d: Vec<u64>,
        #[arg(long, value_enum, default_value = "generators")]
        twists: Twists,
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn guard(p: u64, f: usize, allow_large: bool) -> Result<(), Failure> {
    if !allow_large && (p > MAX_P || f > MAX_F) {
        return Err(Failure::Config(format!(
            "p={p}, f={f} exceeds the default limits p <= {MAX_P}, f <= {MAX_F}; pass --allow-large"
        )));
    }
    Ok(())
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Config(format!("stdout: {e}")))
        }
        Some(path) => {
            let path = match std::env::var_os(OUTPUT_DIR_ENV) {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Failure::Config(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn no_csv(out: &Output, what: &str) -> Result<(), Failure> {
    if out.format == Format::Csv {
        return Err(Failure::Config(format!("csv output is only available for verify, not {what}")));
    }
    Ok(())
}

fn twist_exponent(d: u64, order: u64) -> Result<u64, Failure> {
    if order == 0 || d % order != 0 {
        return Err(Failure::Config(format!("order {order} of a must divide d={d}")));
    }
    Ok((d / order) % d)
}

fn random_nonzero(inst: &WeightInstance, rng: &mut ChaCha8Rng) -> FFElem {
    let q = inst.field().cardinality();
    inst.field().from_index(rng.gen_range(1..q))
}

fn inspect(
    p: u64,
    f: usize,
    r: Vec<u64>,
    j: Vec<usize>,
    d: u64,
    a_order: u64,
    seed: Option<u64>,
    out: &Output,
) -> Result<(), Failure> {
    no_csv(out, "inspect")?;
    let jset: IndexSet = j.into_iter().collect();
    let inst = WeightInstance::new(p, f, r, jset, d, twist_exponent(d, a_order)?)?;
    let field = inst.field().clone();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let x: Vec<FFElem> = (0..f)
        .map(|i| match (&mut rng, inst.j.contains(&i)) {
            (_, false) => field.zero(),
            (Some(rng), true) => random_nonzero(&inst, rng),
            (None, true) => field.one(),
        })
        .collect();
    let extra = (inst.chi == ChiKind::Trivial).then(|| match &mut rng {
        Some(rng) => random_nonzero(&inst, rng),
        None => field.one(),
    });
    let rep = pairing_matrix(&inst)?;
    let outcome = replay(&inst, &x, extra.as_ref())?;
    let dossier = Dossier::new(rep, outcome, x.iter().map(|e| e.coeffs().to_vec()).collect());
    let passed = dossier.pairing.passed() && dossier.replay.passed();
    let text = match out.format {
        Format::Json => to_json(&dossier),
        _ => dossier_plain(&inst, &dossier),
    };
    emit(out, &text)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Inspect {
            p,
            f,
            r,
            j,
            d,
            a_order,
            seed,
            allow_large,
            out,
        } => {
            guard(p, f, allow_large)?;
            inspect(p, f, r, j, d, a_order, seed, &out)
        }
        Command::Verify {
            p,
            f_max,
            d,
            twists,
            workers,
            allow_large,
            out,
        } => {
            if f_max == 0 {
                return Err(Failure::Config("--f-max must be at least 1".into()));
            }
            if d.contains(&0) {
                return Err(Failure::Config("degrees must be positive".into()));
            }
            if workers == 0 {
                return Err(Failure::Config("--workers must be at least 1".into()));
            }
            for &q in &p {
                guard(q, f_max, allow_large)?;
            }
            let report = verify_range(&p, f_max, &d, twists.into(), workers)?;
            let text = match out.format {
                Format::Plain => range_plain(&report),
                Format::Json => to_json(&report),
                Format::Csv => range_csv(&report)?,
            };
            emit(&out, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::AhCheck {
            p,
            n,
            trunc,
            show,
            out,
        } => {
            no_csv(&out, "ah-check")?;
            if !crate::gf::is_prime(p) {
                return Err(Error::NotPrime(p).into());
            }
            if n > 3 || p.checked_pow(n).is_none_or(|o| o > 256) {
                return Err(Failure::Config(format!("level p^n = {p}^{n} is too large")));
            }
            let report = ah_check(p, n, trunc, show);
            let text = match out.format {
                Format::Json => to_json(&report),
                _ => ah_plain(&report),
            };
            emit(&out, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Enumerate {
            p,
            f,
            d,
            twists,
            allow_large,
            out,
        } => {
            no_csv(&out, "enumerate")?;
            guard(p, f, allow_large)?;
            if f == 0 {
                return Err(Failure::Config("f must be at least 1".into()));
            }
            let list: Vec<EnumeratedInstance> = enumerate_instances(p, f, &d, twists.into())?
                .iter()
                .map(EnumeratedInstance::from)
                .collect();
            let text = match out.format {
                Format::Json => to_json(&list),
                _ => {
                    let mut s: String = list
                        .iter()
                        .map(|e| format!("{}  chi={}  muJ={:?}\n", e.key, e.chi, e.mu_j))
                        .collect();
                    let skipped: Vec<String> = d
                        .iter()
                        .filter(|&&dd| dd % p == 0)
                        .map(u64::to_string)
                        .collect();
                    if !skipped.is_empty() {
                        s.push_str(&format!("skipped d = {} (divisible by p)\n", skipped.join(", ")));
                    }
                    s.push_str(&format!("{} instances\n", list.len()));
                    s
                }
            };
            emit(&out, &text)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Check) => 1,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

