//! `svineq`: command-line access to the inequality checkers, proof traces,
//! fuzz campaigns and perturbation bounds.
//!
//! Exit status: 0 when everything evaluated holds, 1 when some inequality is
//! violated, 2 for usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use svineq::campaign::{compact_witnesses, load_witnesses, Replay};
use svineq::ensemble::{Ensemble, EnsembleKind};
use svineq::index::Side;
use svineq::oracle::exhaustive_oracle;
use svineq::search::{NegativeConvention, SearchConfig, SearchSource};
use svineq::{
    hook_decompose, pwl_approximate, run_campaign, CampaignConfig, Checker, ComplexMatrix, ConcaveFn, GapReport,
    IndexPartition, IndexSeq, SpectrumKind, TfPair, TraceReport,
};

#[derive(Parser)]
#[command(name = "svineq", version, about = "Concave singular value inequality checkers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of the hold test.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one inequality on matrices read from JSON files.
    Check {
        #[command(subcommand)]
        which: CheckCmd,
    },
    /// Replay a proof step by step.
    Trace {
        #[command(subcommand)]
        which: TraceCmd,
    },
    /// Run a fuzz campaign from a JSON config.
    Fuzz {
        config: PathBuf,
        /// Append witnesses to this JSON-lines file.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Enumerate every index configuration for random instances of size n <= 6.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        /// JSON list of functions; defaults to hooks, powers and a random PWL.
        #[arg(long)]
        fs: Option<PathBuf>,
    },
    /// Perturbation bound for X -> Y.
    Bound {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Concave function (JSON); ignored with --p.
        #[arg(long)]
        f: Option<PathBuf>,
        /// Index sequence (JSON); defaults to all indices.
        #[arg(long)]
        idx: Option<PathBuf>,
        /// Schatten exponent in (0, 1].
        #[arg(long)]
        p: Option<f64>,
    },
    /// Hook decomposition of a concave function (JSON).
    Decompose {
        f: PathBuf,
        /// Approximate non-PWL functions on [0, x_max] first.
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
    },
    /// Search Hermitian pairs where an f-version fails while plain TF holds.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum)]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value_t = SourceArg::HermitianGaussian)]
        source: SourceArg,
    },
    /// Deduplicate a witness store by input hash.
    Compact { input: PathBuf },
    /// Re-evaluate stored witnesses and report the largest deviation.
    Replay { input: PathBuf },
}

#[derive(Subcommand)]
enum CheckCmd {
    Tf {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        /// Use Hermitian eigenvalues instead of singular values.
        #[arg(long)]
        hermitian: bool,
    },
    Ftf {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        f: PathBuf,
    },
    Mirsky {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        idx: PathBuf,
        #[arg(long)]
        f: PathBuf,
    },
    Theorem3 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
}

#[derive(Subcommand)]
enum TraceCmd {
    Theorem1 {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        idx: PathBuf,
        #[arg(long)]
        t: f64,
        /// Comma-separated C/A flags; defaults to the natural split.
        #[arg(long)]
        flags: Option<String>,
    },
    Theorem2 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        t: f64,
    },
    Theorem3 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    SkipNegative,
    OddExtension,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    HermitianGaussian,
    PsdWishart,
    DiagonalNonNegative,
}

/// A rendered result and whether everything in it held.
struct Output {
    json: Value,
    csv: String,
    clean: bool,
}

type CliResult<T> = Result<T, String>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

const GAP_HEADER: [&str; 8] = ["step", "name", "lhs", "rhs", "slack", "scale", "tol_rel", "holds"];

fn gap_row(step: &str, g: &GapReport) -> Vec<String> {
    vec![
        step.to_owned(),
        g.name.clone(),
        g.lhs.to_string(),
        g.rhs.to_string(),
        g.slack.to_string(),
        g.scale.to_string(),
        g.tol_rel.to_string(),
        g.holds.to_string(),
    ]
}

fn gap_output(g: GapReport) -> Output {
    Output {
        csv: csv_table(&GAP_HEADER, [gap_row("", &g)]),
        clean: g.holds,
        json: to_value(&g),
    }
}

fn trace_output(t: TraceReport) -> Output {
    Output {
        csv: csv_table(&GAP_HEADER, t.steps.iter().map(|s| gap_row(&s.step, &s.report))),
        clean: t.all_hold,
        json: to_value(&t),
    }
}

fn parse_flags(s: &str) -> CliResult<Vec<Side>> {
    s.split(',')
        .map(|f| match f.trim() {
            "C" | "c" => Ok(Side::C),
            "A" | "a" => Ok(Side::A),
            other => Err(format!("flag must be C or A, got {other:?}")),
        })
        .collect()
}

fn evaluate(chk: &Checker, replay: Replay) -> CliResult<Output> {
    use svineq::campaign::Outcome;
    match replay.evaluate(chk, false).map_err(|e| e.to_string())? {
        Outcome::Gap(g) => Ok(gap_output(g)),
        Outcome::Trace(t) => Ok(trace_output(t)),
        Outcome::Bound(b) => Ok(Output {
            csv: csv_table(
                &["bound", "actual", "tightness", "holds"],
                [vec![
                    b.bound.to_string(),
                    b.actual.to_string(),
                    b.tightness.to_string(),
                    b.holds.to_string(),
                ]],
            ),
            clean: b.holds,
            json: to_value(&b),
        }),
    }
}

fn run(cli: Cli) -> CliResult<Output> {
    let g = &cli.global;
    let chk = match g.tol_rel {
        Some(t) if !(t > 0.0 && t.is_finite()) => return Err(format!("--tol-rel must be positive, got {t}")),
        Some(t) => Checker::new(t),
        None => Checker::default(),
    };
    let seed = g.seed.unwrap_or(0);
    match cli.command {
        Command::Check { which } => {
            let replay = match which {
                CheckCmd::Tf { a, b, pair, hermitian } => Replay::Tf {
                    a: read_json(&a)?,
                    b: read_json(&b)?,
                    spectrum: if hermitian {
                        SpectrumKind::HermitianEigen
                    } else {
                        SpectrumKind::Singular
                    },
                    pair: read_json(&pair)?,
                },
                CheckCmd::Ftf { a, b, pair, f } => Replay::FTf {
                    a: read_json(&a)?,
                    b: read_json(&b)?,
                    pair: read_json(&pair)?,
                    f: read_json(&f)?,
                },
                CheckCmd::Mirsky { x, y, idx, f } => Replay::Mirsky {
                    x: read_json(&x)?,
                    y: read_json(&y)?,
                    idx: read_json(&idx)?,
                    f: read_json(&f)?,
                },
                CheckCmd::Theorem3 { a, b, partition } => Replay::Theorem3 {
                    a: read_json(&a)?,
                    b: read_json(&b)?,
                    partition: read_json(&partition)?,
                },
            };
            evaluate(&chk, replay)
        }
        Command::Trace { which } => match which {
            TraceCmd::Theorem1 { x, y, idx, t, flags } => {
                let (x, y): (ComplexMatrix, ComplexMatrix) = (read_json(&x)?, read_json(&y)?);
                let idx: IndexSeq = read_json(&idx)?;
                let flags = flags.as_deref().map(parse_flags).transpose()?;
                let r = chk
                    .trace_theorem1(&x, &y, &idx, t, flags.as_deref())
                    .map_err(|e| e.to_string())?;
                Ok(trace_output(r))
            }
            TraceCmd::Theorem2 { a, b, pair, t } => evaluate(
                &chk,
                Replay::TraceTheorem2 {
                    a: read_json(&a)?,
                    b: read_json(&b)?,
                    pair: read_json::<TfPair>(&pair)?,
                    t,
                },
            ),
            TraceCmd::Theorem3 { a, b, partition } => evaluate(
                &chk,
                Replay::TraceTheorem3 {
                    a: read_json(&a)?,
                    b: read_json(&b)?,
                    partition: read_json::<IndexPartition>(&partition)?,
                },
            ),
        },
        Command::Fuzz { config, witnesses } => {
            let mut cfg: CampaignConfig = read_json(&config)?;
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            if let Some(t) = g.tol_rel {
                cfg.tol_rel = t;
            }
            if witnesses.is_some() {
                cfg.witness_path = witnesses;
            }
            let r = run_campaign(&cfg).map_err(|e| e.to_string())?;
            Ok(Output {
                csv: r.summary.to_csv(),
                clean: r.summary.exit_code() == 0,
                json: to_value(&r.summary),
            })
        }
        Command::Oracle { n, instances, fs } => {
            let fs: Vec<ConcaveFn> = match fs {
                Some(p) => read_json(&p)?,
                None => svineq::campaign::default_f_family(),
            };
            let kinds = [
                EnsembleKind::GinibreComplex,
                EnsembleKind::HermitianGaussian,
                EnsembleKind::DiagonalNonNegative,
                EnsembleKind::LowRankPlusNoise {
                    rank: 1,
                    noise_scale: 0.0,
                },
            ];
            let mut pairs = Vec::with_capacity(instances);
            for k in 0..instances {
                let e = Ensemble::new(kinds[k % kinds.len()].clone(), n.max(1), seed).map_err(|e| e.to_string())?;
                pairs.push((e.sample(2 * k as u64), e.sample(2 * k as u64 + 1)));
            }
            let r = exhaustive_oracle(&chk, n, &pairs, &fs).map_err(|e| e.to_string())?;
            let rows = r.checks.iter().map(|(k, c)| {
                vec![
                    to_value(k).as_str().unwrap_or_default().to_owned(),
                    c.checked.to_string(),
                    c.held.to_string(),
                    c.violated.to_string(),
                ]
            });
            Ok(Output {
                csv: csv_table(&["check", "checked", "held", "violated"], rows),
                clean: r.clean(),
                json: to_value(&r),
            })
        }
        Command::Bound { x, y, f, idx, p } => {
            let (x, y): (ComplexMatrix, ComplexMatrix) = (read_json(&x)?, read_json(&y)?);
            if let Some(p) = p {
                let s = chk.schatten_p_deviation(&x, &y, p).map_err(|e| e.to_string())?;
                return Ok(Output {
                    csv: csv_table(
                        &["p", "bound", "actual", "tightness", "difference_quasi_norm", "holds"],
                        [vec![
                            s.p.to_string(),
                            s.result.bound.to_string(),
                            s.result.actual.to_string(),
                            s.result.tightness.to_string(),
                            s.difference_quasi_norm.to_string(),
                            s.result.holds.to_string(),
                        ]],
                    ),
                    clean: s.result.holds,
                    json: to_value(&s),
                });
            }
            let f: ConcaveFn = match f {
                Some(p) => read_json(&p)?,
                None => return Err("bound needs --f or --p".into()),
            };
            let idx = match idx {
                Some(p) => read_json(&p)?,
                None => IndexSeq::prefix(x.n(), x.n()).map_err(|e| e.to_string())?,
            };
            evaluate(&chk, Replay::Bound { x, y, idx, f })
        }
        Command::Decompose { f, x_max, nodes } => {
            let f: ConcaveFn = read_json(&f)?;
            let (approx, pwl) = match (&f, x_max) {
                (ConcaveFn::Pwl { .. }, _) => (None, f.clone()),
                (_, Some(x_max)) => {
                    let a = pwl_approximate(&f, x_max, nodes).map_err(|e| e.to_string())?;
                    let pwl = a.function.clone();
                    (Some(a), pwl)
                }
                (_, None) => return Err("non-PWL functions need --x-max for approximation".into()),
            };
            let m = hook_decompose(&pwl).map_err(|e| e.to_string())?;
            let mut rows: Vec<Vec<String>> = m
                .atoms
                .iter()
                .map(|a| vec!["hook".into(), a.t.to_string(), a.weight.to_string()])
                .collect();
            rows.push(vec!["linear".into(), String::new(), m.linear_tail.to_string()]);
            let json = match approx {
                Some(a) => json!({"approximation": a, "measure": m}),
                None => to_value(&m),
            };
            Ok(Output {
                csv: csv_table(&["term", "t", "weight"], rows),
                clean: true,
                json,
            })
        }
        Command::Search {
            n,
            budget,
            f,
            convention,
            source,
        } => {
            let convention = match convention {
                ConventionArg::SkipNegative => NegativeConvention::SkipNegative,
                ConventionArg::OddExtension => NegativeConvention::OddExtension,
            };
            let mut cfg = SearchConfig::new(budget, n, read_json(&f)?, convention, seed);
            cfg.source = match source {
                SourceArg::HermitianGaussian => SearchSource::HermitianGaussian,
                SourceArg::PsdWishart => SearchSource::PsdWishart,
                SourceArg::DiagonalNonNegative => SearchSource::DiagonalNonNegative,
            };
            let w = chk.hermitian_fversion_search(&cfg).map_err(|e| e.to_string())?;
            let rows = w.iter().map(|x| {
                vec![
                    x.instance.to_string(),
                    x.f_report.lhs.to_string(),
                    x.f_report.rhs.to_string(),
                    x.tf_report.lhs.to_string(),
                    x.tf_report.rhs.to_string(),
                ]
            });
            // Witnesses here are findings about the Hermitian case, not failures.
            Ok(Output {
                csv: csv_table(&["instance", "f_lhs", "f_rhs", "tf_lhs", "tf_rhs"], rows),
                clean: true,
                json: json!({"config": cfg, "witnesses": w}),
            })
        }
        Command::Compact { input } => {
            let out = g.out.clone().unwrap_or_else(|| input.clone());
            let s = compact_witnesses(&input, &out).map_err(|e| e.to_string())?;
            Ok(Output {
                csv: csv_table(&["read", "kept"], [vec![s.read.to_string(), s.kept.to_string()]]),
                clean: true,
                json: to_value(&s),
            })
        }
        Command::Replay { input } => {
            let ws = load_witnesses(&input).map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for w in &ws {
                worst = worst.max(w.replay_deviation().map_err(|e| e.to_string())?);
            }
            let ok = worst <= 1e-12;
            Ok(Output {
                csv: csv_table(
                    &["witnesses", "max_deviation", "reproduced"],
                    [vec![ws.len().to_string(), worst.to_string(), ok.to_string()]],
                ),
                clean: ok,
                json: json!({"witnesses": ws.len(), "max_deviation": worst, "reproduced": ok}),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let format = cli.global.format;
    // `compact` uses --out as its destination, not for the report.
    let out = match cli.command {
        Command::Compact { .. } => None,
        _ => cli.global.out.clone(),
    };
    match run(cli) {
        Ok(o) => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&o.json).expect("serializes") + "\n",
                Format::Csv => o.csv,
            };
            let written = match &out {
                Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Ok(()) if o.clean => ExitCode::SUCCESS,
                Ok(()) => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
