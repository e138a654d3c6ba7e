use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use gst_core::eval::{readback_nat, DEFAULT_BUDGET};
use gst_core::extract;
use gst_core::nuclei::{self, NucleusKind};
use gst_core::oracle::{Oracle, RelationSpec, VerificationReport};
use gst_core::surface::{parse, pretty_decl, SourceFile};
use gst_core::translate::{translate_closed, Style};
use gst_core::{Decl, Evaluator, HostSeq, SampleParams, Sampler, Tm, Ty, Value};

#[derive(Parser)]
#[command(
    name = "gst",
    version,
    about = "Monadic translations of System T and witness extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck a file, printing each declaration's type.
    Check { file: PathBuf },
    /// Translate declarations and print them as source.
    Translate {
        #[arg(long, default_value = "gentzen")]
        style: Style,
        #[arg(long, default_value = "gen-cont")]
        nucleus: NucleusKind,
        /// Only this declaration (default: all).
        #[arg(long = "def")]
        def: Option<String>,
        file: PathBuf,
    },
    /// Extract a witness term from a declaration.
    Extract {
        #[arg(long)]
        property: Property,
        #[arg(long = "def")]
        def: String,
        file: PathBuf,
    },
    /// Check a witness with the oracles and print a JSON report.
    Verify {
        #[arg(long)]
        property: Property,
        #[arg(long = "def")]
        def: String,
        /// Nucleus for `logical-relation`.
        #[arg(long, default_value = "cont")]
        nucleus: NucleusKind,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Also write the report here.
        #[arg(long)]
        json: Option<PathBuf>,
        file: PathBuf,
    },
    /// Evaluate a declaration applied to arguments: numerals, or
    /// comma-separated lists read as zero-extended sequences.
    Eval {
        #[arg(long = "def")]
        def: String,
        file: PathBuf,
        args: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Property {
    Modulus,
    Ucmodulus,
    UcmodulusBar,
    Majorant,
    BarTriple,
    KurodaModulus,
    Continuity,
    Uniform,
    Gbr,
    Secures,
    LogicalRelation,
}

/// How a command ended, beyond success.
enum Failure {
    Input(anyhow::Error),
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn budget() -> anyhow::Result<u64> {
    match std::env::var("GST_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("GST_BUDGET is not a number: `{v}`")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(path: &Path) -> anyhow::Result<SourceFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn lookup<'a>(file: &'a SourceFile, name: &str) -> anyhow::Result<&'a Decl> {
    file.get(name)
        .ok_or_else(|| anyhow!("no declaration named `{name}`"))
}

fn decl(name: String, ty: Ty, body: Tm) -> String {
    pretty_decl(&Decl { name, ty, body })
}

fn emit(name: String, body: Tm) -> anyhow::Result<String> {
    let ty = gst_core::typecheck(&gst_core::Ctx::new(), &body)?;
    Ok(decl(name, ty, body))
}

fn check(file: &Path) -> anyhow::Result<()> {
    for d in &load(file)?.decls {
        println!("{} : {}", d.name, d.ty);
    }
    Ok(())
}

fn translate(
    style: Style,
    kind: &NucleusKind,
    def: Option<&str>,
    file: &Path,
) -> anyhow::Result<()> {
    let src = load(file)?;
    let nuc = nuclei::any_nucleus(kind);
    let decls: Vec<&Decl> = match def {
        Some(name) => vec![lookup(&src, name)?],
        None => src.decls.iter().collect(),
    };
    for d in decls {
        let (tj, ty) = translate_closed(style, &nuc, &d.body)
            .with_context(|| format!("translating `{}`", d.name))?;
        println!(
            "{}",
            decl(format!("{}-{style}-{}", d.name, kind.cli_name()), ty, tj)
        );
    }
    Ok(())
}

fn extract_terms(property: Property, d: &Decl) -> anyhow::Result<Vec<(String, Tm)>> {
    let name = |suffix: &str| format!("{}-{suffix}", d.name);
    Ok(match property {
        Property::Modulus | Property::Continuity => {
            let p = extract::continuity_modulus(&d.body)?;
            vec![(name("value"), p.value), (name("modulus"), p.modulus)]
        }
        Property::Ucmodulus | Property::Uniform => {
            let p = extract::uniform_continuity_modulus(&d.body)?;
            vec![(name("value"), p.value), (name("ucmodulus"), p.modulus)]
        }
        Property::UcmodulusBar => {
            vec![(name("ucmodulus-bar"), extract::uc_modulus_via_bar(&d.body)?)]
        }
        Property::Majorant => vec![(name("majorant"), extract::majorant(&d.body, &d.ty)?)],
        Property::BarTriple | Property::Gbr | Property::Secures => {
            let b = extract::bar_triple(&d.body, &Ty::Nat)?;
            vec![
                (name("value"), b.value),
                (name("bar"), b.bar),
                (name("recursor"), b.recursor),
            ]
        }
        Property::KurodaModulus => {
            vec![(name("kuroda-modulus"), extract::kuroda_modulus(&d.body)?)]
        }
        Property::LogicalRelation => bail!("`logical-relation` is a verification property"),
    })
}

fn extract_cmd(property: Property, def: &str, file: &Path) -> anyhow::Result<()> {
    let src = load(file)?;
    for (name, body) in extract_terms(property, lookup(&src, def)?)? {
        println!("{}", emit(name, body)?);
    }
    Ok(())
}

fn verify_report(
    property: Property,
    kind: &NucleusKind,
    d: &Decl,
    oracle: &Oracle,
    sampler: &mut Sampler,
) -> anyhow::Result<VerificationReport> {
    let f = &d.body;
    let uniform = |m: &Tm| -> anyhow::Result<VerificationReport> {
        let parts = [1, 2]
            .into_iter()
            .map(|c| Ok(oracle.check_uniform_continuity(f, m, &HostSeq::constant(c))?))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(VerificationReport::merged(
            "uniform-continuity",
            None,
            parts,
        ))
    };
    Ok(match property {
        Property::Modulus | Property::Continuity => {
            let m = extract::continuity_modulus(f)?.modulus;
            oracle.check_continuity(f, &m, sampler)?
        }
        Property::KurodaModulus => {
            oracle.check_continuity(f, &extract::kuroda_modulus(f)?, sampler)?
        }
        Property::Ucmodulus | Property::Uniform => {
            uniform(&extract::uniform_continuity_modulus(f)?.modulus)?
        }
        Property::UcmodulusBar => uniform(&extract::uc_modulus_via_bar(f)?)?,
        Property::Majorant => {
            oracle.check_majorizes(f, &extract::majorant(f, &d.ty)?, &d.ty, sampler)?
        }
        Property::Gbr => {
            let b = extract::bar_triple(f, &Ty::Nat)?;
            oracle.check_gbr(&b.bar, &b.recursor, sampler)?
        }
        Property::Secures => {
            oracle.check_secures_monotone(&extract::bar_triple(f, &Ty::Nat)?.bar, f, sampler)?
        }
        Property::BarTriple => {
            let b = extract::bar_triple(f, &Ty::Nat)?;
            let secures = oracle.check_secures_monotone(&b.bar, f, sampler)?;
            let gbr = oracle.check_gbr(&b.bar, &b.recursor, sampler)?;
            VerificationReport::merged("bar-triple", Some(sampler.seed()), vec![secures, gbr])
        }
        Property::LogicalRelation => {
            let spec = RelationSpec::for_kind(kind).ok_or_else(|| {
                anyhow!(
                    "no logical relation is defined for nucleus `{}`",
                    kind.cli_name()
                )
            })?;
            let nuc = nuclei::nucleus(kind)?;
            let (tj, _) = translate_closed(Style::Gentzen, &nuclei::any_nucleus(kind), f)?;
            oracle.check_logical_relation(&nuc, &spec, f, &tj, &d.ty, sampler)?
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    property: Property,
    kind: &NucleusKind,
    def: &str,
    seed: u64,
    samples: usize,
    json: Option<&Path>,
    file: &Path,
) -> Result<(), Failure> {
    let src = load(file)?;
    let d = lookup(&src, def)?;
    let oracle = Oracle {
        budget: budget()?,
        ..Oracle::default()
    };
    let params = SampleParams {
        samples,
        ..SampleParams::default()
    };
    let report = verify_report(
        property,
        kind,
        d,
        &oracle,
        &mut Sampler::with_params(seed, params),
    )?;
    let text = report.to_json();
    println!("{text}");
    if let Some(path) = json {
        std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

/// A numeral, or a comma-separated list read as a zero-extended sequence.
fn argument(text: &str) -> anyhow::Result<Value> {
    let nums = |s: &str| -> anyhow::Result<Vec<u64>> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .with_context(|| format!("bad argument `{text}`"))
            })
            .collect()
    };
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    if text.contains(',') || text.trim().starts_with('[') {
        Ok(HostSeq::zero_extended(nums(inner)?).to_value())
    } else {
        Ok(Value::Nat(
            inner
                .parse()
                .with_context(|| format!("bad argument `{text}`"))?,
        ))
    }
}

fn eval(def: &str, file: &Path, args: &[String]) -> anyhow::Result<()> {
    let src = load(file)?;
    let d = lookup(&src, def)?;
    let values = args
        .iter()
        .map(|a| argument(a))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let ev = Evaluator::new(budget()?);
    let v = ev.eval_closed(&d.body)?;
    let v = ev.apply_values(&v, &values)?;
    let n = readback_nat(&v).with_context(|| {
        format!(
            "`{def}` applied to {} argument(s) is not a numeral",
            values.len()
        )
    })?;
    println!("{n}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { file } => check(&file)?,
        Command::Translate {
            style,
            nucleus,
            def,
            file,
        } => translate(style, &nucleus, def.as_deref(), &file)?,
        Command::Extract {
            property,
            def,
            file,
        } => extract_cmd(property, &def, &file)?,
        Command::Verify {
            property,
            def,
            nucleus,
            seed,
            samples,
            json,
            file,
        } => verify(
            property,
            &nucleus,
            &def,
            seed,
            samples,
            json.as_deref(),
            &file,
        )?,
        Command::Eval { def, file, args } => eval(&def, &file, &args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("gst: {e:#}");
            ExitCode::from(2)
        }
    }
}
