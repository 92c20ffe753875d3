use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use tempo_pcsp::formats;
use tempo_pcsp::minorcond::{
    build_condition, decide_finite, decide_temporal, report_template, ConditionKind, ConditionVerdict, Probes,
};
use tempo_pcsp::powfun::{decode_hom, decode_hom_checked, mlow, mpow, mpow_quotient_temporal, PowSignature};
use tempo_pcsp::repro::{self, Options};
use tempo_pcsp::tempsolve::{solve_with_k, TemporalInstance, Verdict};
use tempo_pcsp::temporal::classify;
use tempo_pcsp::Error;

/// Temporal CSP templates: classification, solving, minor conditions and power constructions.
///
/// Enumeration caps can be raised with TEMPO_PCSP_CAPS, e.g. "indicator=5000000,kvars=80".
#[derive(Parser)]
#[command(name = "tempo-pcsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the polymorphism flags and solver path of a temporal template.
    Classify { template: PathBuf },
    /// Solve an instance over a temporal template. Exit 0 sat, 1 unsat, 3 unknown.
    Solve {
        template: PathBuf,
        instance: PathBuf,
        /// consistency level for the k-consistency paths
        #[arg(short, long)]
        k: Option<usize>,
        /// print the assignment as exact rationals
        #[arg(long)]
        rationals: bool,
    },
    /// Decide a minor condition over a temporal template restricted to a_size elements.
    ///
    /// Usage: check-condition KIND [PARAM] TEMPLATE A_SIZE, e.g. `cyclic 5 templates/I_neq.json 2`
    /// or `block-symmetric L=2 templates/I_neq.json 2`. Exit 0 sat, 1 unsat, 3 unknown.
    #[command(name = "check-condition")]
    CheckCondition {
        #[arg(num_args = 3..=4, required = true, value_name = "KIND [PARAM] TEMPLATE A_SIZE")]
        args: Vec<String>,
        /// treat TEMPLATE as a finite structure and A_SIZE as the path of the finite source structure
        #[arg(long)]
        finite: bool,
        /// write the tables of a SAT answer here
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Probe cyclic, block-symmetric and symmetric conditions and print the template report.
    Report {
        template: PathBuf,
        a_size: usize,
        /// cyclic arities, comma separated
        #[arg(long, value_delimiter = ',')]
        cyclic: Option<Vec<usize>>,
        /// block parameters L (arity 2L+1), comma separated
        #[arg(long, value_delimiter = ',')]
        block: Option<Vec<usize>>,
        /// symmetric arities, comma separated
        #[arg(long, value_delimiter = ',')]
        symmetric: Option<Vec<usize>>,
    },
    /// Write the m-th power of a finite structure, or with --temporal the pattern quotient of a temporal template.
    Power {
        m: usize,
        input: PathBuf,
        #[arg(long)]
        temporal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the lowering of a structure over a power signature.
    Unpower {
        m: usize,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode a table of order patterns into a function. Exit 1 if no function has this table.
    Decode {
        table: PathBuf,
        /// also check the decoded map is a homomorphism from this structure ...
        #[arg(long, requires = "template")]
        structure: Option<PathBuf>,
        /// ... to this temporal template
        #[arg(long, requires = "structure")]
        template: Option<PathBuf>,
    },
    /// Run the reproduction suite and print one line per check. Exit 1 if any check fails.
    Reproduce {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// run only these checks, comma separated
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
        /// also run the block-symmetric arity 7 probe over (Q;X) (hours)
        #[arg(long)]
        slow: bool,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn put(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

macro_rules! say {
    ($($t:tt)*) => {
        put(&format!("{}\n", format_args!($($t)*)))
    };
}

fn read_temporal(p: &Path) -> anyhow::Result<tempo_pcsp::temporal::TemporalStructure> {
    Ok(formats::parse_temporal(&formats::read_file(p)?)?)
}

fn read_structure(p: &Path) -> anyhow::Result<tempo_pcsp::relcore::Structure> {
    Ok(formats::parse_structure(&formats::read_file(p)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            put(text);
            Ok(())
        }
    }
}

fn verdict_code(v: &ConditionVerdict) -> u8 {
    match v {
        ConditionVerdict::Sat(_) => 0,
        ConditionVerdict::Unsat(_) => 1,
        ConditionVerdict::Unknown => 3,
    }
}

fn check_condition(args: &[String], finite: bool, output: Option<&Path>) -> anyhow::Result<u8> {
    let (kind, rest) = args.split_first().expect("clap enforces at least three");
    let (param, rest) = if ConditionKind::takes_param(kind) {
        let (p, r) = rest.split_first().expect("clap enforces at least three");
        (Some(p.as_str()), r)
    } else {
        (None, rest)
    };
    let [template, a_arg] = rest else {
        bail!(Error::Parse(format!("expected TEMPLATE and A_SIZE after `{kind}`")));
    };
    let kind = ConditionKind::parse(kind, param)?;
    let c = build_condition(kind)?;
    if finite {
        let b = read_structure(Path::new(template))?;
        let a = read_structure(Path::new(a_arg))?;
        return Ok(match decide_finite(&c, &a, &b)? {
            Some(tables) => {
                say!("{kind}: SAT");
                let text: String = tables.iter().map(formats::table_to_json).collect();
                emit(&text, output)?;
                0
            }
            None => {
                say!("{kind}: UNSAT-certified by finite search");
                1
            }
        });
    }
    let b = read_temporal(Path::new(template))?;
    let a_size: usize = a_arg.parse().map_err(|_| Error::Parse(format!("A_SIZE must be a number, got `{a_arg}`")))?;
    let (v, ind) = decide_temporal(&c, a_size, &b)?;
    let size = format!("{} variables, {} constraints", ind.instance.variables.len(), ind.instance.constraints.len());
    match &v {
        ConditionVerdict::Sat(tables) => {
            say!("{kind} on {a_size} elements: SAT ({size})");
            let text: String = tables.iter().map(formats::table_to_json).collect();
            emit(&text, output)?;
        }
        ConditionVerdict::Unsat(by) => say!("{kind} on {a_size} elements: UNSAT-certified by {by} ({size})"),
        ConditionVerdict::Unknown => say!("{kind} on {a_size} elements: UNKNOWN ({size})"),
    }
    Ok(verdict_code(&v))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Classify { template } => {
            let c = classify(&read_temporal(&template)?)?;
            say!("path: {}", c.path);
            say!("pp: {}", c.has_pp);
            say!("ll: {}", c.has_ll);
            say!(
                "quotient: or={} and={} minority={} majority={}",
                c.quotient_or, c.quotient_and, c.quotient_minority, c.quotient_majority
            );
            say!("dualized: {}", c.dualized);
            Ok(0)
        }
        Command::Solve { template, instance, k, rationals } => {
            let b = read_temporal(&template)?;
            let inst = formats::parse_instance(&formats::read_file(&instance)?)?;
            let x = TemporalInstance::from_instance(&inst, &b)?;
            Ok(match solve_with_k(&x, &b, k)? {
                Verdict::Sat(s) => {
                    say!("SAT");
                    for (name, v) in inst.variables.iter().zip(&s) {
                        if rationals {
                            say!("{name} = {v}/1");
                        } else {
                            say!("{name} = {v}");
                        }
                    }
                    0
                }
                Verdict::Unsat(by) => {
                    say!("UNSAT ({by})");
                    1
                }
                Verdict::Unknown => {
                    say!("UNKNOWN");
                    3
                }
            })
        }
        Command::CheckCondition { args, finite, output } => check_condition(&args, finite, output.as_deref()),
        Command::Report { template, a_size, cyclic, block, symmetric } => {
            let b = read_temporal(&template)?;
            let std = Probes::standard();
            let probes = Probes {
                cyclic: cyclic.unwrap_or(std.cyclic),
                block: block.unwrap_or(std.block),
                symmetric: symmetric.unwrap_or(std.symmetric),
            };
            put(&report_template(a_size, &b, &probes)?.to_string());
            Ok(0)
        }
        Command::Power { m, input, temporal, output } => {
            let s = if temporal {
                mpow_quotient_temporal(&read_temporal(&input)?, m)?.structure
            } else {
                mpow(&read_structure(&input)?, m)?
            };
            emit(&formats::structure_to_json(&s), output.as_deref())?;
            Ok(0)
        }
        Command::Unpower { m, input, output } => {
            let x = read_structure(&input)?;
            let base = PowSignature::infer_base(&x.signature, m)?;
            let low = mlow(&x, &base, m)?;
            emit(&formats::structure_to_json(&low.structure), output.as_deref())?;
            Ok(0)
        }
        Command::Decode { table, structure, template } => {
            let h = formats::parse_pattern_table(&formats::read_file(&table)?)?;
            let f = match (structure, template) {
                (Some(x), Some(b)) => match decode_hom_checked(&h, &read_structure(&x)?, &read_temporal(&b)?) {
                    Ok(Some(f)) => Ok(f),
                    Ok(None) => Err("decoded map is not a homomorphism".to_string()),
                    Err(e) => Err(e.to_string()),
                },
                _ => decode_hom(&h).map_err(|e| e.to_string()),
            };
            Ok(match f {
                Ok(f) => {
                    for (a, v) in f.iter().enumerate() {
                        say!("{a} -> {v}");
                    }
                    0
                }
                Err(e) => {
                    say!("REJECTED: {e}");
                    1
                }
            })
        }
        Command::Reproduce { seed, only, slow } => {
            let opts = Options { seed };
            let ids: Vec<u8> = only.unwrap_or_else(|| repro::CRITERIA.iter().map(|c| c.0).collect());
            let mut failed = 0;
            for id in ids {
                let o = repro::run(id, &opts);
                say!("{o}");
                failed += usize::from(!o.passed);
            }
            if slow {
                let o = repro::criterion_2_slow();
                say!("{o}");
                failed += usize::from(!o.passed);
            }
            Ok(u8::from(failed > 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Internal(_)) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
