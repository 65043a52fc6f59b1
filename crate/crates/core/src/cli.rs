//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification finds a mismatch, 2 on
//! usage errors (bad flags, invalid primes, limits out of range).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    classical_predicate, cpd_table, density_one_criterion, empirical_density, forbidden_residues, table1_forms, verify_forms,
};
use crate::automaton::{Automaton, DotOptions};
use crate::field::{is_prime, Binomials, FieldError, Prime};
use crate::oracle::MotzkinTable;
use crate::series::{check_identities, series_recurrence};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MAX_LIMIT: u64 = 100_000_000;
pub const CACHE_ENV: &str = "MOTZKIN_CACHE_DIR";
const ORACLE_CROSS_CHECK: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(name = "motzkin", version, about = "Motzkin numbers modulo primes via finite automata")]
pub struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Print elapsed time to standard error.
    #[arg(long, global = true)]
    pub timing: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Tables,
    Forms,
    Classical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the automaton and write it as JSON.
    Build {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print M_n mod p.
    Eval {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        n: u64,
        /// Use a previously built automaton instead of building one.
        #[arg(long)]
        automaton: Option<PathBuf>,
    },
    /// Brute-force residue table; prints residue counts.
    Oracle {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a_n, b_n, c_n, or check the identities near n = p.
    Series {
        #[arg(long, required_unless_present = "prime")]
        limit: Option<u64>,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Empirical density of a residue class over 1..=N.
    Density {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        residue: u32,
        #[arg(long)]
        limit: u64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// c(p, d) table, density-1 digit, forbidden residues.
    Criterion {
        #[arg(long, required_unless_present = "scan")]
        prime: Option<u64>,
        /// Tabulate every prime from 5 up to --max-prime.
        #[arg(long, requires = "max_prime")]
        scan: bool,
        #[arg(long)]
        max_prime: Option<u64>,
    },
    /// Graphviz rendering of the automaton.
    ExportDot {
        #[arg(long)]
        prime: u64,
        /// Merge constants other than 0 and 1 into a single node.
        #[arg(long)]
        collapse: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Mismatch(Vec<String>),
    Io(String),
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                return EXIT_OK;
            }
            let _ = write!(err, "{text}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buffer));
    if let Err(e) = out.write_all(&buffer) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    if cli.timing {
        let _ = writeln!(err, "elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Mismatch(lines)) => {
            for l in lines {
                let _ = writeln!(err, "{l}");
            }
            EXIT_MISMATCH
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn check_limit(limit: u64) -> Outcome {
    if limit > MAX_LIMIT {
        return Err(Failure::Usage(format!("limit {limit} exceeds the maximum {MAX_LIMIT}")));
    }
    Ok(())
}

fn oracle_table(modulus: u32, n_max: u64) -> Result<MotzkinTable, Failure> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir)?;
            MotzkinTable::cached(&dir, modulus, n_max).map_err(|e| Failure::Io(e.to_string()))
        }
        _ => Ok(MotzkinTable::convolution_mod(modulus, n_max)),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Outcome {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialize"))?;
    Ok(())
}

fn write_or_print(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text)?,
        None => emit(out, text)?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Build { prime, out: path } => {
            let m = Automaton::build(Prime::new(*prime)?);
            let text = m.to_json() + "\n";
            write_or_print(out, path, &text)?;
            if path.is_some() {
                summary(out, fmt, json!({"p": prime, "states": m.states().len(), "constants": m.constant_count()}))?;
            }
            Ok(())
        }
        Command::Eval { prime, n, automaton } => {
            let p = Prime::new(*prime)?;
            let m = match automaton {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    let m = Automaton::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?;
                    if m.prime() != p {
                        return Err(Failure::Usage(format!("automaton is for p = {}, not {prime}", m.prime())));
                    }
                    m
                }
                None => Automaton::build(p),
            };
            let v = m.eval(*n).residue();
            match fmt {
                Format::Tsv => writeln!(out, "{v}")?,
                Format::Json => emit_json(out, &json!({"p": prime, "n": n, "residue": v}))?,
            }
            Ok(())
        }
        Command::Oracle { prime, limit, out: path } => {
            let p = Prime::new(*prime)?;
            check_limit(*limit)?;
            let table = oracle_table(p.value(), *limit)?;
            if let Some(path) = path {
                table.save(path)?;
            }
            let counts = table.counts();
            match fmt {
                Format::Tsv => {
                    writeln!(out, "residue\tcount")?;
                    for (r, c) in counts.iter().enumerate() {
                        writeln!(out, "{r}\t{c}")?;
                    }
                }
                Format::Json => emit_json(out, &json!({"p": prime, "n_max": limit, "counts": counts}))?,
            }
            Ok(())
        }
        Command::Series { limit, prime } => series_cmd(out, fmt, *limit, *prime),
        Command::Density { prime, residue, limit } => {
            let p = Prime::new(*prime)?;
            check_limit(*limit)?;
            if *limit == 0 {
                return Err(Failure::Usage("limit must be positive".into()));
            }
            if *residue >= p.value() {
                return Err(Failure::Usage(format!("residue {residue} is not below {prime}")));
            }
            let m = Automaton::build(p);
            let r = empirical_density(&m, *residue, *limit);
            let reference = r.reference.as_ref().map(|v| v.to_string());
            match fmt {
                Format::Tsv => {
                    writeln!(out, "p\tresidue\tlimit\tcount\tdensity\treference\tkind")?;
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{:.6}\t{}\t{}",
                        r.p,
                        r.residue,
                        r.limit,
                        r.count,
                        r.density_f64(),
                        reference.as_deref().unwrap_or("-"),
                        r.kind
                    )?;
                }
                Format::Json => emit_json(
                    out,
                    &json!({
                        "p": r.p, "residue": r.residue, "limit": r.limit, "count": r.count,
                        "density": r.density_f64(), "reference": reference,
                        "reference_value": r.reference_f64(), "kind": r.kind.to_string(),
                    }),
                )?,
            }
            Ok(())
        }
        Command::Verify { prime, limit, suite } => verify_cmd(out, fmt, *prime, *limit, *suite),
        Command::Criterion { prime, scan, max_prime } => {
            if *scan {
                let max = max_prime.expect("clap enforces --max-prime");
                check_limit(max)?;
                let primes: Vec<u64> = (5..=max).filter(|&v| is_prime(v)).collect();
                if fmt == Format::Tsv {
                    writeln!(out, "p\tclass6\tdensity_one_digit")?;
                }
                let mut rows = Vec::new();
                for v in primes {
                    let p = Prime::new(v)?;
                    let d = density_one_criterion(&Binomials::new(p));
                    match fmt {
                        Format::Tsv => writeln!(out, "{v}\t{}\t{}", p.class6(), opt(d))?,
                        Format::Json => rows.push(json!({"p": v, "class6": p.class6().sign(), "density_one_digit": d})),
                    }
                }
                if fmt == Format::Json {
                    emit_json(out, &Value::Array(rows))?;
                }
                return Ok(());
            }
            let p = Prime::new(prime.expect("clap enforces --prime"))?;
            let b = Binomials::new(p);
            let m = Automaton::build(p);
            let table = cpd_table(&b);
            let d = density_one_criterion(&b);
            let rep = forbidden_residues(&m, &b);
            match fmt {
                Format::Tsv => {
                    writeln!(out, "d\tc(p,d)")?;
                    for (i, c) in table.iter().enumerate() {
                        writeln!(out, "{i}\t{c}")?;
                    }
                    writeln!(out, "density_one_digit\t{}", opt(d))?;
                    writeln!(out, "forbidden\t{}", list(&rep.forbidden))?;
                    writeln!(out, "generated_order\t{}", rep.generated_order)?;
                    writeln!(out, "generates_units\t{}", rep.generates_units())?;
                }
                Format::Json => emit_json(
                    out,
                    &json!({
                        "p": p.value(),
                        "cpd": table.iter().map(|c| c.residue()).collect::<Vec<_>>(),
                        "density_one_digit": d,
                        "forbidden": rep.forbidden,
                        "generated_order": rep.generated_order,
                        "generates_units": rep.generates_units(),
                    }),
                )?,
            }
            Ok(())
        }
        Command::ExportDot { prime, collapse, out: path } => {
            let m = Automaton::build(Prime::new(*prime)?);
            let text = m.to_dot(DotOptions {
                collapse_constant_states: *collapse,
            });
            write_or_print(out, path, &text)
        }
    }
}

fn opt(d: Option<u32>) -> String {
    d.map_or_else(|| "-".to_string(), |d| d.to_string())
}

fn list(v: &[u32]) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn summary(out: &mut dyn Write, fmt: Format, v: Value) -> Outcome {
    match fmt {
        Format::Json => emit_json(out, &v),
        Format::Tsv => {
            let obj = v.as_object().expect("summaries are objects");
            let line: Vec<String> = obj.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "{}", line.join("\t"))?;
            Ok(())
        }
    }
}

fn series_cmd(out: &mut dyn Write, fmt: Format, limit: Option<u64>, prime: Option<u64>) -> Outcome {
    if let Some(v) = prime {
        let rep = check_identities(Prime::new(v)?);
        match fmt {
            Format::Tsv => {
                writeln!(out, "identity\tvalue\texpected\tholds")?;
                for c in &rep.checks {
                    writeln!(out, "{}\t{}\t{}\t{}", c.name, c.value, c.expected, c.holds())?;
                }
            }
            Format::Json => emit_json(
                out,
                &json!({
                    "p": rep.p,
                    "class6": rep.class6.sign(),
                    "checks": rep.checks.iter().map(|c| json!({
                        "identity": c.name, "value": c.value.to_string(),
                        "expected": c.expected.to_string(), "holds": c.holds(),
                    })).collect::<Vec<_>>(),
                }),
            )?,
        }
        if !rep.all_hold() {
            let lines = rep
                .falsified()
                .iter()
                .map(|c| format!("FAIL p={v}: {} = {}, expected {}", c.name, c.value, c.expected))
                .collect();
            return Err(Failure::Mismatch(lines));
        }
        return Ok(());
    }
    let limit = limit.expect("clap enforces --limit");
    check_limit(limit)?;
    let rows = series_recurrence(limit);
    match fmt {
        Format::Tsv => {
            writeln!(out, "n\ta\tb\tc")?;
            for s in rows {
                writeln!(out, "{}\t{}\t{}\t{}", s.n, s.a, s.b, s.c)?;
            }
        }
        Format::Json => emit_json(
            out,
            &Value::Array(rows.iter().map(|s| json!({"n": s.n, "a": s.a, "b": s.b, "c": s.c})).collect()),
        )?,
    }
    Ok(())
}

fn verify_cmd(out: &mut dyn Write, fmt: Format, prime: u64, limit: u64, suite: Suite) -> Outcome {
    check_limit(limit)?;
    let (name, checked, problems): (&str, u64, Vec<String>) = match suite {
        Suite::Classical => {
            let modulus = match prime {
                2 | 3 | 5 => prime as u32,
                _ => return Err(Failure::Usage(format!("classical suite supports moduli 2, 3 and 5, not {prime}"))),
            };
            let table = oracle_table(modulus, limit)?;
            let mut problems = Vec::new();
            for (n, &v) in table.values().iter().enumerate() {
                let pred = classical_predicate(modulus, n as u64).expect("modulus validated");
                if !pred.matches(modulus, v) {
                    problems.push(format!("n={n}: predicted {pred:?}, M_n mod {modulus} = {v}"));
                }
            }
            ("classical", limit + 1, problems)
        }
        Suite::Oracle => {
            let p = Prime::new(prime)?;
            let m = Automaton::build(p);
            let table = oracle_table(p.value(), limit)?;
            let problems = table
                .values()
                .iter()
                .enumerate()
                .filter_map(|(n, &v)| {
                    let a = m.eval(n as u64).residue();
                    (a != v).then(|| format!("n={n}: automaton {a}, oracle {v}"))
                })
                .collect();
            ("oracle", limit + 1, problems)
        }
        Suite::Tables => {
            let m = Automaton::build(Prime::new(prime)?);
            let problems: Vec<String> = m.verify_tables().iter().map(ToString::to_string).collect();
            ("tables", m.states().len() as u64, problems)
        }
        Suite::Forms => {
            let p = Prime::new(prime)?;
            let m = Automaton::build(p);
            let table = oracle_table(p.value(), limit.min(ORACLE_CROSS_CHECK))?;
            let rep = verify_forms(&m, limit, Some(&table));
            let forms = table1_forms(p);
            let problems = rep
                .violations
                .iter()
                .map(|v| format!("n={} in form {}: automaton {}, oracle {:?}", v.n, forms[v.form], v.automaton, v.oracle))
                .collect();
            ("forms", rep.checked, problems)
        }
    };
    let pass = problems.is_empty();
    match fmt {
        Format::Tsv => writeln!(
            out,
            "{} suite={name} p={prime} limit={limit} checked={checked} mismatches={}",
            if pass { "PASS" } else { "FAIL" },
            problems.len()
        )?,
        Format::Json => emit_json(
            out,
            &json!({
                "suite": name, "p": prime, "limit": limit, "checked": checked,
                "pass": pass, "mismatches": problems,
            }),
        )?,
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Mismatch(problems))
    }
}
