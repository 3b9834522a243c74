//! Argument parsing and the command implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use trolab_core::funcalc::{
    evaluate_phi, op_functional_calculus, tro_closure_of_range, FiniteTensor,
};
use trolab_core::maps::norm_table;
use trolab_core::preservers::{
    classify_cop, classify_order_zero, decompose_triple_hom, factorize, generate,
    is_orthogonality_preserving_with, is_triple_homomorphism, GeneratorKind, GeneratorParams,
};
use trolab_core::{Algebra, Element, Error, LinearMap, ScalarFunction, Tolerances};

use crate::corpus::run_corpus;
use crate::report::{parse_json, read_input, Report, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "trolab",
    version,
    about = "Orthogonality preservers and triple homomorphisms between matrix algebras"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per refutation or positivity test.
    #[arg(long, global = true, default_value_t = 200)]
    pub trials: usize,
    /// Random restarts of the norm estimator.
    #[arg(long, global = true, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Where to write the report (the map file for `generate`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn config(&self) -> RunConfig {
        let mut tolerances = Tolerances::default();
        if let Some(v) = self.tol_rel {
            tolerances.rel = v;
        }
        if let Some(v) = self.tol_abs {
            tolerances.abs = v;
        }
        if let Some(v) = self.rank_tol {
            tolerances.rank = v;
        }
        RunConfig {
            seed: self.seed,
            trials: self.trials,
            restarts: self.restarts,
            tolerances,
            output_path: self.out.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Cop,
    OrderZero,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure verdicts and the equivalence reports for a map.
    Classify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportKind::All)]
        report: ReportKind,
    },
    /// Weighted factorization `T = h r* S`.
    Factorize {
        #[arg(long)]
        map: PathBuf,
    },
    /// Split a triple homomorphism (or the support of a factorizable map)
    /// into TRO homomorphism and anti-homomorphism parts.
    Decompose {
        #[arg(long)]
        map: PathBuf,
    },
    /// Lower bounds for the norms of the amplifications `T_n`.
    Norms {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Triple functional calculus `f(T)`, optionally evaluated on a finite tensor.
    Funcalc {
        /// Function preset: identity, cube, cuberoot, chop:<eps>, power:<p>, poly:[c1,c3,...].
        #[arg(long)]
        f: String,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        tensor: Option<PathBuf>,
    },
    /// Orthonormal basis of the sub-TRO generated by the range.
    TroClosure {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_rounds: usize,
    },
    /// Write a generated map and its ground truth (`<out>.truth.json`).
    Generate {
        /// tro_hom, tro_anti_hom, weighted_tro_hom, weighted_triple_hom_mixed,
        /// cp_order_zero, transpose_type_positive or random_map.
        #[arg(long)]
        kind: String,
        /// Domain block sizes, e.g. `2,1`.
        #[arg(long, default_value = "2")]
        domain: String,
        #[arg(long, default_value_t = 2)]
        multiplicity: usize,
        #[arg(long, default_value_t = 1)]
        padding: usize,
        #[arg(long, default_value_t = 1)]
        codomain_blocks: usize,
    },
    /// Rerun the built-in examples with known answers.
    ReproPaper,
}

/// A finished command: its report and whether it raised a consistency alarm.
pub struct Outcome {
    pub report: Report,
    pub alarm: bool,
}

fn load_map(path: &Path) -> Result<(LinearMap, Vec<u8>)> {
    let bytes = read_input(path)?;
    let map = parse_json(&bytes, path)?;
    Ok((map, bytes))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn parse_domain(text: &str) -> Result<Algebra> {
    let blocks = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad block size `{s}` in --domain"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Algebra::new(blocks)?)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = cli.global.config();
    config.validate()?;
    Tolerances::set_global(config.tolerances);
    let (seed, trials) = (config.seed, config.trials);
    let outcome = |name: &str, inputs: &[Vec<u8>], results: Value, alarm: bool| Outcome {
        report: Report::new(name, inputs, &config, results),
        alarm,
    };
    match &cli.command {
        Command::Classify { map, report } => {
            let (t, bytes) = load_map(map)?;
            let mut results = serde_json::Map::new();
            let mut alarm = false;
            if matches!(report, ReportKind::Cop | ReportKind::All) {
                let r = classify_cop(&t, trials, seed)?;
                alarm |= !r.consistent;
                results.insert("cop".into(), to_value(&r));
            }
            if matches!(report, ReportKind::OrderZero | ReportKind::All) {
                match classify_order_zero(&t, trials, seed) {
                    Ok(r) => {
                        alarm |= !r.consistent;
                        results.insert("order_zero".into(), to_value(&r));
                    }
                    Err(Error::NotPositive) if *report == ReportKind::All => {
                        results.insert(
                            "order_zero".into(),
                            json!({ "skipped": "map is not positive" }),
                        );
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(outcome("classify", &[bytes], Value::Object(results), alarm))
        }
        Command::Factorize { map } => {
            let (t, bytes) = load_map(map)?;
            let decision = is_orthogonality_preserving_with(&t, trials, seed);
            Ok(outcome("factorize", &[bytes], to_value(&decision), false))
        }
        Command::Decompose { map } => {
            let (t, bytes) = load_map(map)?;
            let (support, source) = if is_triple_homomorphism(&t).holds {
                (t, "map")
            } else {
                let f = factorize(&t).map_err(|e| {
                    anyhow::anyhow!("map is neither a triple homomorphism nor factorizable: {e}")
                })?;
                (f.support, "support of the weighted factorization")
            };
            let d = decompose_triple_hom(&support)?;
            let results = json!({ "decomposed": source, "decomposition": d });
            Ok(outcome("decompose", &[bytes], results, false))
        }
        Command::Norms { map, n_max } => {
            if *n_max == 0 {
                bail!("--n-max must be at least 1");
            }
            let (t, bytes) = load_map(map)?;
            let table = norm_table(&t, *n_max, config.restarts, seed)?;
            let bounds: Vec<f64> = table.iter().map(|e| e.lower_bound).collect();
            let results = json!({ "lower_bounds": bounds, "estimates": table });
            Ok(outcome("norms", &[bytes], results, false))
        }
        Command::Funcalc { f, map, tensor } => {
            let function = ScalarFunction::parse(f)?;
            let (t, bytes) = load_map(map)?;
            let fac = factorize(&t).map_err(|e| anyhow::anyhow!("map does not factor: {e}"))?;
            let f_t = op_functional_calculus(&fac, &function)?;
            let weight = f_t.apply(&Element::unit(t.domain(), 1))?;
            let mut inputs = vec![bytes];
            let mut results = json!({
                "function": function.label(),
                "map": f_t,
                "weight": weight,
                "weight_norm": weight.operator_norm(),
            });
            if let Some(path) = tensor {
                let tbytes = read_input(path)?;
                let tensor: FiniteTensor = parse_json(&tbytes, path)?;
                results["phi"] = to_value(&evaluate_phi(&fac, &tensor)?);
                inputs.push(tbytes);
            }
            Ok(outcome("funcalc", &inputs, results, false))
        }
        Command::TroClosure { map, max_rounds } => {
            let (t, bytes) = load_map(map)?;
            let closure = tro_closure_of_range(&t, *max_rounds)?;
            let results = json!({ "dimension": closure.dimension(), "closure": closure });
            Ok(outcome("tro-closure", &[bytes], results, false))
        }
        Command::Generate {
            kind,
            domain,
            multiplicity,
            padding,
            codomain_blocks,
        } => {
            let Some(out) = &config.output_path else {
                bail!("generate needs --out <map.json>");
            };
            let kind = GeneratorKind::parse(kind)?;
            let mut params = GeneratorParams::new(parse_domain(domain)?);
            params.max_multiplicity = *multiplicity;
            params.max_padding = *padding;
            params.codomain_blocks = *codomain_blocks;
            let g = generate(kind, &params, seed)?;
            let map_json = serde_json::to_string_pretty(&g.map)?;
            let truth_path = truth_path(out);
            std::fs::write(out, &map_json)
                .with_context(|| format!("cannot write {}", out.display()))?;
            std::fs::write(&truth_path, serde_json::to_string_pretty(&g.truth)?)
                .with_context(|| format!("cannot write {}", truth_path.display()))?;
            let results = json!({
                "kind": kind.name(),
                "map_file": out,
                "truth_file": truth_path,
                "expected": g.truth.expected,
            });
            Ok(outcome(
                "generate",
                &[map_json.into_bytes()],
                results,
                false,
            ))
        }
        Command::ReproPaper => {
            let items = run_corpus(config.restarts, seed)?;
            for item in &items {
                eprintln!(
                    "{} {}",
                    if item.passed { "PASS" } else { "FAIL" },
                    item.name
                );
            }
            let alarm = items.iter().any(|i| !i.passed);
            Ok(outcome(
                "repro-paper",
                &[],
                json!({ "items": items }),
                alarm,
            ))
        }
    }
}

/// `<out>.truth.json` next to the map file.
pub fn truth_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".truth.json");
    out.with_file_name(name)
}
