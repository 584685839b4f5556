//! Command-line front end: estimation, table reproduction, synthesis,
//! distributed multiplication, and verification sweeps.
//!
//! Exit codes are a stable contract: 0 on success, 1 when a verification or
//! channel check fails, 2 for usage and domain errors. `QRNS_PARALLELISM`
//! sets the default worker count.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::{export_gatelist, measure_resources, simulate};
use crate::estimator::{self, tables::TableFormat, DesignId};
use crate::modmul::{build_mod_mersenne_mul, build_mod_pow2_mul, canonicalize_mersenne};
use crate::orchestrator::{self, Orchestrator, OrchestratorError};
use crate::qdmm::{build_qdmm, dim1_decode, dim1_encode, dim1_mul_oracle};
use crate::rns::{paper_set_lookup, ModuliSet};

#[derive(Debug, Parser)]
#[command(
    name = "qrns",
    version,
    about = "Reversible modulo multipliers, resource tables, and RNS-distributed multiplication"
)]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form resource formulas for one design.
    Estimate {
        /// One of: mod2n+1, mod2n, mod2n-1, munoz, munoz-qcla.
        #[arg(long)]
        design: String,
        /// Multiplier width (n >= 2).
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Regenerate the cost, comparison, and improvement tables.
    Tables {
        #[arg(long, value_enum, default_value_t = TableChoice::All)]
        which: TableChoice,
        /// csv, json, or markdown.
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Synthesize a multiplier and export its gate list.
    Synth {
        #[arg(long, value_enum)]
        family: SynthFamily,
        /// Channel width.
        #[arg(long)]
        k: u32,
        /// Gate-list output path; omitted, the gate list goes to stdout and
        /// the measured resource report to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multiply two integers through the distributed RNS flow.
    Multiply {
        x: u128,
        y: u128,
        #[command(flatten)]
        set: SetSelection,
        /// Worker count (default: QRNS_PARALLELISM or the CPU count).
        #[arg(long)]
        parallelism: Option<usize>,
        /// Write an audit manifest (manifest.json + per-channel gate lists)
        /// into this directory.
        #[arg(long)]
        emit_manifest: Option<PathBuf>,
    },
    /// Run a verification sweep and exit nonzero on any failure.
    Verify {
        #[arg(value_enum)]
        scope: VerifyScope,
        /// Channel width (multiplier scopes) or input width (end-to-end).
        #[arg(long = "k", visible_alias = "n")]
        width: u32,
        /// Seed for sampled sweeps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count for widths too large to enumerate.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long)]
        parallelism: Option<usize>,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SetSelection {
    /// Comma-separated moduli drawn from 2^k-1 / 2^k / 2^k+1, e.g. 3,4,5.
    #[arg(long)]
    pub set: Option<String>,
    /// Use the tabulated set for this input width (3..=8).
    #[arg(long)]
    pub paper_set: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    Costs,
    Comparison,
    Improvements,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthFamily {
    Qdmm,
    #[value(name = "mod2n")]
    Mod2n,
    #[value(name = "mod2n-1")]
    Mod2nMinus1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyScope {
    Qdmm,
    #[value(name = "mod2n")]
    Mod2n,
    #[value(name = "mod2n-1")]
    Mod2nMinus1,
    #[value(name = "end-to-end")]
    EndToEnd,
}

/// Runs one parsed command and returns the process exit code.
pub fn run(config: CommandConfig) -> u8 {
    match dispatch(config.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<u8, String> {
    match command {
        Command::Estimate { design, n, format } => cmd_estimate(&design, n, format),
        Command::Tables { which, format } => cmd_tables(which, &format),
        Command::Synth { family, k, out } => cmd_synth(family, k, out.as_deref()),
        Command::Multiply {
            x,
            y,
            set,
            parallelism,
            emit_manifest,
        } => cmd_multiply(x, y, &set, parallelism, emit_manifest.as_deref()),
        Command::Verify {
            scope,
            width,
            seed,
            samples,
            parallelism,
        } => cmd_verify(scope, width, seed, samples, parallelism),
    }
}

fn parse_design(name: &str) -> Result<DesignId, String> {
    match name {
        "mod2n+1" => Ok(DesignId::Mod2nPlus1),
        "mod2n" => Ok(DesignId::Mod2n),
        "mod2n-1" => Ok(DesignId::Mod2nMinus1),
        "munoz" | "munoz-original" => Ok(DesignId::MunozOriginal),
        "munoz-qcla" => Ok(DesignId::MunozQcla),
        other => Err(format!(
            "unknown design {other:?}; expected mod2n+1, mod2n, mod2n-1, munoz, or munoz-qcla"
        )),
    }
}

fn cmd_estimate(design: &str, n: u32, format: ReportFormat) -> Result<u8, String> {
    let design = parse_design(design)?;
    let report = estimator::estimate(design, n).map_err(|e| e.to_string())?;
    match format {
        ReportFormat::Json => println!("{}", to_json(&report)),
        ReportFormat::Text => {
            println!("design         {}", report.design.label());
            println!("n              {}", report.n);
            println!("qubits         {}", report.qubits);
            println!("toffoli count  {}", report.toffoli_count);
            println!("toffoli depth  {}", report.toffoli_depth);
            println!("cnot count     {}", report.cnot_count);
            println!("cnot depth     {}", report.cnot_depth);
            println!("t count        {}", report.t_count);
        }
    }
    Ok(0)
}

fn cmd_tables(which: TableChoice, format: &str) -> Result<u8, String> {
    let format: TableFormat = format.parse()?;
    let text = match which {
        TableChoice::Costs => estimator::tables::emit_costs(format),
        TableChoice::Comparison => {
            estimator::tables::emit_comparison(format).map_err(|e| e.to_string())?
        }
        TableChoice::Improvements => {
            estimator::tables::emit_improvements(format).map_err(|e| e.to_string())?
        }
        TableChoice::All => estimator::tables::emit_tables(format).map_err(|e| e.to_string())?,
    };
    print!("{text}");
    Ok(0)
}

#[derive(Serialize)]
struct SynthReport {
    family: &'static str,
    k: u32,
    measured: crate::circuit::ResourceReport,
}

fn cmd_synth(family: SynthFamily, k: u32, out: Option<&std::path::Path>) -> Result<u8, String> {
    let (label, circuit) = match family {
        SynthFamily::Qdmm => (
            "qdmm",
            build_qdmm(k).map_err(|e| e.to_string())?.circuit().clone(),
        ),
        SynthFamily::Mod2n => (
            "mod2n",
            build_mod_pow2_mul(k)
                .map_err(|e| e.to_string())?
                .circuit()
                .clone(),
        ),
        SynthFamily::Mod2nMinus1 => (
            "mod2n-1",
            build_mod_mersenne_mul(k)
                .map_err(|e| e.to_string())?
                .circuit()
                .clone(),
        ),
    };
    let gatelist = export_gatelist(&circuit);
    let report = SynthReport {
        family: label,
        k,
        measured: measure_resources(&circuit),
    };
    match out {
        Some(path) => {
            std::fs::write(path, gatelist).map_err(|e| e.to_string())?;
            println!("{}", to_json(&report));
        }
        None => {
            print!("{gatelist}");
            eprintln!("{}", to_json(&report));
        }
    }
    Ok(0)
}

fn select_set(selection: &SetSelection) -> Result<ModuliSet, String> {
    if let Some(n) = selection.paper_set {
        return paper_set_lookup(n).map_err(|e| e.to_string());
    }
    let spec = selection.set.as_deref().expect("clap enforces the group");
    let values = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad modulus {tok:?}"))
        })
        .collect::<Result<Vec<u64>, String>>()?;
    ModuliSet::from_values(&values).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct MultiplyChannel {
    modulus: u64,
    residue_x: u64,
    residue_y: u64,
    residue_product: u64,
}

#[derive(Serialize)]
struct MultiplyOutput {
    x: u128,
    y: u128,
    product: u128,
    expected: u128,
    matches: bool,
    set: Vec<u64>,
    range: u128,
    channels: Vec<MultiplyChannel>,
}

fn cmd_multiply(
    x: u128,
    y: u128,
    selection: &SetSelection,
    parallelism: Option<usize>,
    manifest_dir: Option<&std::path::Path>,
) -> Result<u8, String> {
    let set = select_set(selection)?;
    let parallelism = parallelism.unwrap_or_else(default_parallelism);
    let orch = Orchestrator::new();

    let jobs = orch.plan_multiply(x, y, &set).map_err(|e| e.to_string())?;
    // Channel failures exit 1 with the channel named; planning and range
    // problems above are usage errors and exit 2.
    let run = || -> Result<(Vec<orchestrator::ChannelResult>, u128), OrchestratorError> {
        let results = orchestrator::execute(&jobs, parallelism)?;
        let product = orchestrator::assemble(&results, &set)?;
        Ok((results, product))
    };
    let (results, product) = match run() {
        Ok(ok) => ok,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
    };

    if let Some(dir) = manifest_dir {
        orchestrator::write_manifest(dir, x, y, product, &set, &jobs, &results)
            .map_err(|e| e.to_string())?;
    }

    let expected = x * y;
    let output = MultiplyOutput {
        x,
        y,
        product,
        expected,
        matches: product == expected,
        set: set.values(),
        range: set.range(),
        channels: results
            .iter()
            .map(|r| {
                let m = u128::from(r.modulus.value());
                MultiplyChannel {
                    modulus: r.modulus.value(),
                    residue_x: (x % m) as u64,
                    residue_y: (y % m) as u64,
                    residue_product: r.residue,
                }
            })
            .collect(),
    };
    println!("{}", to_json(&output));
    Ok(u8::from(!output.matches))
}

#[derive(Serialize)]
struct SweepFailure {
    x: u128,
    y: u128,
    expected: u128,
    got: u128,
}

#[derive(Serialize)]
struct SweepOutput {
    scope: &'static str,
    width: u32,
    mode: &'static str,
    seed: Option<u64>,
    total: u64,
    passed: u64,
    failed: u64,
    failures: Vec<SweepFailure>,
}

impl SweepOutput {
    fn exit_code(&self) -> u8 {
        u8::from(self.failed != 0)
    }
}

fn cmd_verify(
    scope: VerifyScope,
    width: u32,
    seed: u64,
    samples: u64,
    parallelism: Option<usize>,
) -> Result<u8, String> {
    let parallelism = parallelism.unwrap_or_else(default_parallelism);
    let output = match scope {
        VerifyScope::Qdmm => verify_qdmm(width)?,
        VerifyScope::Mod2n => verify_modmul(width, false)?,
        VerifyScope::Mod2nMinus1 => verify_modmul(width, true)?,
        VerifyScope::EndToEnd => verify_end_to_end(width, seed, samples, parallelism)?,
    };
    println!("{}", to_json(&output));
    Ok(output.exit_code())
}

fn verify_qdmm(k: u32) -> Result<SweepOutput, String> {
    if !(2..=5).contains(&k) {
        return Err(format!("qdmm sweeps support k in [2, 5], got {k}"));
    }
    let mult = build_qdmm(k).map_err(|e| e.to_string())?;
    let m = (1u64 << k) + 1;
    let mut failures = Vec::new();
    let mut total = 0u64;
    for xv in 0..m {
        for yv in 0..m {
            total += 1;
            let a = dim1_encode(xv, k).map_err(|e| e.to_string())?;
            let b = dim1_encode(yv, k).map_err(|e| e.to_string())?;
            let input = mult.input_state(a, b).map_err(|e| e.to_string())?;
            let out = simulate(mult.circuit(), &input).map_err(|e| e.to_string())?;
            let got = mult
                .read_product(&out)
                .and_then(|d| dim1_decode(d, k))
                .map_err(|e| e.to_string())?;
            let want = dim1_mul_oracle(a, b, k)
                .and_then(|d| dim1_decode(d, k))
                .map_err(|e| e.to_string())?;
            if got != want {
                failures.push(SweepFailure {
                    x: xv.into(),
                    y: yv.into(),
                    expected: want.into(),
                    got: got.into(),
                });
            }
        }
    }
    Ok(SweepOutput {
        scope: "qdmm",
        width: k,
        mode: "exhaustive",
        seed: None,
        total,
        passed: total - failures.len() as u64,
        failed: failures.len() as u64,
        failures,
    })
}

fn verify_modmul(k: u32, mersenne: bool) -> Result<SweepOutput, String> {
    if !(1..=6).contains(&k) || (mersenne && k < 2) {
        return Err(format!("modulo sweep width {k} unsupported"));
    }
    let (mult, modulus, scope) = if mersenne {
        (
            build_mod_mersenne_mul(k).map_err(|e| e.to_string())?,
            (1u64 << k) - 1,
            "mod2n-1",
        )
    } else {
        (
            build_mod_pow2_mul(k).map_err(|e| e.to_string())?,
            1u64 << k,
            "mod2n",
        )
    };
    let mut failures = Vec::new();
    let mut total = 0u64;
    for x in 0..(1u64 << k) {
        for y in 0..(1u64 << k) {
            total += 1;
            let input = mult.input_state(x, y).map_err(|e| e.to_string())?;
            let out = simulate(mult.circuit(), &input).map_err(|e| e.to_string())?;
            let raw = mult.read_product_raw(&out);
            let got = if mersenne {
                canonicalize_mersenne(raw, k).map_err(|e| e.to_string())?
            } else {
                raw
            };
            let want = (x * y) % modulus;
            if got != want {
                failures.push(SweepFailure {
                    x: x.into(),
                    y: y.into(),
                    expected: want.into(),
                    got: got.into(),
                });
            }
        }
    }
    Ok(SweepOutput {
        scope,
        width: k,
        mode: "exhaustive",
        seed: None,
        total,
        passed: total - failures.len() as u64,
        failed: failures.len() as u64,
        failures,
    })
}

fn verify_end_to_end(
    n: u32,
    seed: u64,
    samples: u64,
    parallelism: usize,
) -> Result<SweepOutput, String> {
    if !(3..=8).contains(&n) {
        return Err(format!("end-to-end sweeps support n in [3, 8], got {n}"));
    }
    let set = paper_set_lookup(n).map_err(|e| e.to_string())?;
    let orch = Orchestrator::new();
    let (report, mode, seed_out) = if n <= 4 {
        (
            orch.verify_exhaustive(n, &set, parallelism)
                .map_err(|e| e.to_string())?,
            "exhaustive",
            None,
        )
    } else {
        (
            orch.verify_sampled(n, &set, samples, seed, parallelism)
                .map_err(|e| e.to_string())?,
            "sampled",
            Some(seed),
        )
    };
    Ok(SweepOutput {
        scope: "end-to-end",
        width: n,
        mode,
        seed: seed_out,
        total: report.total,
        passed: report.passed(),
        failed: report.failures.len() as u64,
        failures: report
            .failures
            .iter()
            .map(|f| SweepFailure {
                x: f.x,
                y: f.y,
                expected: f.expected,
                got: f.got,
            })
            .collect(),
    })
}

/// Worker-count default: `QRNS_PARALLELISM`, else the available CPUs.
pub fn default_parallelism() -> usize {
    if let Ok(value) = std::env::var("QRNS_PARALLELISM") {
        if let Ok(parsed) = value.parse::<usize>() {
            if parsed >= 1 {
                return parsed;
            }
        }
    }
    std::thread::available_parallelism()
        .map(std::num::NonZeroUsize::get)
        .unwrap_or(1)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("cli outputs serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_names_parse() {
        assert_eq!(parse_design("mod2n+1").unwrap(), DesignId::Mod2nPlus1);
        assert_eq!(parse_design("mod2n").unwrap(), DesignId::Mod2n);
        assert_eq!(parse_design("mod2n-1").unwrap(), DesignId::Mod2nMinus1);
        assert_eq!(parse_design("munoz").unwrap(), DesignId::MunozOriginal);
        assert_eq!(parse_design("munoz-qcla").unwrap(), DesignId::MunozQcla);
        assert!(parse_design("nope").is_err());
    }

    #[test]
    fn set_selection_parses_values() {
        let sel = SetSelection {
            set: Some("3, 4, 5".to_string()),
            paper_set: None,
        };
        assert_eq!(select_set(&sel).unwrap().values(), vec![3, 4, 5]);

        let sel = SetSelection {
            set: Some("3,11".to_string()),
            paper_set: None,
        };
        assert!(select_set(&sel).is_err());

        let sel = SetSelection {
            set: None,
            paper_set: Some(4),
        };
        assert_eq!(select_set(&sel).unwrap().values(), vec![5, 8, 9]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        CommandConfig::command().debug_assert();
    }
}
