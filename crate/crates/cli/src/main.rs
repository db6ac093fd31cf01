use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use koehler_core::acceptance;
use koehler_core::error::{Error, Result};
use koehler_core::grouprep::{self, check_equivalences, classify_image, induce, inducing_pairs, table_group};
use koehler_core::io::{CharFile, TripleFile, SCHEMA};
use koehler_core::kohler::{self, DEFAULT_PRIME_BOUND};
use koehler_core::par::{self, Parallelism};
use koehler_core::quadfield::QuadField;
use koehler_core::rayclass::{self, Modulus};
use koehler_core::theta::{self, theta_fast, theta_oracle};

#[derive(Parser)]
#[command(name = "koehler", version, about = "Weight-one theta series of quadratic fields")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for cached ray class groups (overrides KOEHLER_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write JSON here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Summary on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Run every engine sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CharArgs {
    /// Character file {"disc", "modulus", "char_index" | "values"}.
    #[arg(long, conflicts_with_all = ["disc", "modulus", "char_index"])]
    spec: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    /// "[a,b,c]" or "(x+y*w)".
    #[arg(long, default_value = "(1)")]
    modulus: String,
    #[arg(long = "char")]
    char_index: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// q-expansion of Θ(K, ξ).
    Theta {
        #[command(flatten)]
        ch: CharArgs,
        #[arg(long)]
        bound: u64,
        /// Sum over ideals instead of the multiplicative engine.
        #[arg(long)]
        oracle: bool,
    },
    /// Other fields and characters with the same theta series.
    Partners {
        #[command(flatten)]
        ch: CharArgs,
        /// Comparison bound (default: Sturm-type bound of the level).
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Induction and classification checks for one table row.
    VerifyGroup {
        #[arg(long)]
        line: u8,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Acceptance suite and invariants.
    Selftest,
    /// First level with a triple.
    Scan {
        #[arg(long, default_value_t = acceptance::SCAN_LEVEL)]
        max_level: u64,
    },
    /// Imprimitive character failing the partner property.
    Counterexample {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
    /// Modulus for another member reproducing an imprimitive expansion.
    Extend {
        #[arg(long)]
        triple: PathBuf,
        /// Ideal of the first member's field multiplied into its conductor.
        #[arg(long)]
        drop: String,
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[arg(long, default_value_t = 300)]
        bound: u64,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_char(a: &CharArgs) -> Result<CharFile> {
    if let Some(p) = &a.spec {
        return CharFile::parse(&read(p)?);
    }
    let disc = a.disc.ok_or_else(|| Error::input("--disc or --spec required"))?;
    let field = QuadField::from_disc(disc)?;
    Ok(CharFile {
        disc,
        modulus: field.parse_ideal(&a.modulus)?,
        char_index: Some(a.char_index.unwrap_or(0)),
        values: None,
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Ctx {
    mode: Parallelism,
    verbose: bool,
}

impl Ctx {
    fn note(&self, s: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", s.as_ref());
        }
    }
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<(Value, bool)> {
    match cmd {
        Command::Theta { ch, bound, oracle } => {
            let xi = load_char(ch)?.resolve()?;
            let t = if *oracle { theta_oracle(&xi, *bound)? } else { theta_fast(&xi, *bound, ctx.mode)? };
            ctx.note(format!("level {}, {} coefficients", t.level, t.coeffs.len()));
            Ok((to_value(&t), true))
        }
        Command::Partners { ch, bound } => {
            let file = load_char(ch)?;
            let xi = file.resolve()?;
            let report = kohler::condition_b(&xi, DEFAULT_PRIME_BOUND)?;
            let partners = kohler::find_partners(&xi, *bound, ctx.mode)?;
            let certificate = match &partners[..] {
                [a, b] => Some(kohler::Triple::new([xi.clone(), a.clone(), b.clone()])?.certificate),
                _ => None,
            };
            ctx.note(format!("{} partners at level {}", partners.len(), theta::level(&xi)));
            Ok((
                json!({
                    "schema": SCHEMA,
                    "input": CharFile::of(&xi),
                    "level": theta::level(&xi),
                    "condition_B": report,
                    "partners": partners.iter().map(CharFile::of).collect::<Vec<_>>(),
                    "triple_certificate": certificate,
                }),
                true,
            ))
        }
        Command::VerifyGroup { line, r, m } => {
            let t = table_group(*line, *r, *m)?;
            let chi = t.chi1()?;
            let eq = check_equivalences(&t.group, &chi)?;
            let rho = induce(&t.group, &chi)?;
            let pairs = inducing_pairs(&t.group, &rho).len();
            let class = classify_image(&t.group)?;
            let relations = grouprep::presentation_holds(&t.group, &t.h, &t.kernel, *line, *r);
            ctx.note(format!("line {line}: {} of order {}", class.name, class.order));
            Ok((
                json!({
                    "schema": SCHEMA,
                    "line": line,
                    "r": r,
                    "m": m,
                    "name": class.name,
                    "order": class.order,
                    "subgroup_types": class.types,
                    "equivalences": eq.0,
                    "inducing_pairs": pairs,
                    "relations_hold": relations,
                    "det_minus_one_involution": class.det_minus_one_involution,
                    "printed_h3_generator_in_group": t.h3_generator_ok,
                }),
                eq.all_true() && pairs == 3 && relations,
            ))
        }
        Command::Selftest => {
            let crit = acceptance::run_all();
            let inv = acceptance::invariants();
            for o in crit.iter().chain(&inv) {
                eprintln!("{}", acceptance::report_line(o));
            }
            let pass = crit.iter().chain(&inv).all(|o| o.pass);
            Ok((json!({"schema": SCHEMA, "criteria": crit, "invariants": inv, "pass": pass}), pass))
        }
        Command::Scan { max_level } => {
            let r = kohler::scan(*max_level, ctx.mode)?;
            ctx.note(format!("{} candidates up to level {}", r.candidates, r.levels_scanned));
            let triple = r.triple.as_ref().map(TripleFile::of);
            let found = triple.is_some();
            Ok((json!({"schema": SCHEMA, "max_level": max_level, "triple": triple}), found))
        }
        Command::Counterexample { triple, prime_bound } => {
            let t = TripleFile::parse(&read(triple)?)?.resolve()?;
            let (xi, p, report) = kohler::imprimitive_counterexample(&t, *prime_bound)?;
            ctx.note(format!("p = {p}"));
            Ok((json!({"schema": SCHEMA, "character": CharFile::of(&xi), "report": report}), true))
        }
        Command::Extend { triple, drop, target, bound } => {
            let t = TripleFile::parse(&read(triple)?)?.resolve()?;
            let base = &t.members[0];
            let k = base.field();
            let extra = k.parse_ideal(drop)?;
            let xi = base.lift(&Modulus::new(k, k.ideal_mul(&base.modulus().finite(), &extra))?)?;
            let (ext, report) = kohler::extend_modulus(&t, &xi, *target, *bound)?;
            Ok((
                json!({
                    "schema": SCHEMA,
                    "input": CharFile::of(&xi),
                    "extended": CharFile::of(&ext),
                    "report": report,
                }),
                true,
            ))
        }
    }
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    let text = serde_json::to_string(v).expect("json");
    match out {
        Some(p) => rayclass::write_atomic(p, format!("{text}\n").as_bytes())
            .map_err(|e| Error::input(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            // a closed pipe is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let reason = e.kind().to_string();
            println!("{}", json!({"schema": SCHEMA, "error": {"kind": "input", "message": reason}}));
            return ExitCode::from(2);
        }
    };
    if let Some(j) = cli.jobs {
        par::set_jobs(j);
    }
    if let Some(d) = &cli.cache_dir {
        rayclass::set_cache_dir(Some(d.clone()));
    }
    let ctx = Ctx {
        mode: if cli.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
        verbose: cli.verbose,
    };
    let (value, code) = match run(&cli.command, &ctx) {
        Ok((v, true)) => (v, 0),
        Ok((v, false)) => (v, 4),
        Err(e) => {
            eprintln!("error: {e}");
            (json!({"schema": SCHEMA, "error": {"kind": e.kind(), "message": e.to_string()}}), e.exit_code())
        }
    };
    if let Err(e) = emit(&cli.output, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::from(code as u8)
}
