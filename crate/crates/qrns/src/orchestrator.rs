//! End-to-end distributed multiplication: plan one channel job per modulus,
//! execute the jobs independently on a worker pool, decode each product
//! register, and reconstruct the integer product.
//!
//! Channels have no dependencies on each other, so "distributed" here means
//! independent simulated jobs inside one process. Built circuits are cached
//! per family and width and shared read-only across jobs; results come back
//! in job order regardless of scheduling, so every run is deterministic.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{export_gatelist, simulate, BasisState, Circuit, CircuitError};
use crate::modmul::{
    build_mod_mersenne_mul, build_mod_pow2_mul, canonicalize_mersenne, ModMulCircuit, ModMulError,
};
use crate::qdmm::{build_qdmm, dim1_decode, dim1_encode, Dim1Value, QdmmCircuit, QdmmError};
use crate::rng::SplitMix64;
use crate::rns::{crt_reconstruct, forward_convert, Family, ModuliSet, Modulus, RnsError};

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("product {x} * {y} does not fit the set range {range}")]
    ProductOutOfRange { x: u128, y: u128, range: u128 },
    #[error("job {index} (modulo {modulus} channel) failed: {source}")]
    JobFailed {
        index: usize,
        modulus: u64,
        source: CircuitError,
    },
    #[error("channel modulo {modulus} produced an invalid result: {message}")]
    ChannelDecode { modulus: u64, message: String },
    #[error("expected {expected} channel results, got {got}")]
    ResultCountMismatch { expected: usize, got: usize },
    #[error("result {index} is for modulus {got}, expected {expected}")]
    ResultOrderMismatch {
        index: usize,
        got: u64,
        expected: u64,
    },
    #[error("exhaustive verification supports widths up to {max}, got {got}")]
    WidthTooLarge { got: u32, max: u32 },
    #[error("parallelism must be at least 1")]
    ZeroParallelism,
    #[error(transparent)]
    Rns(#[from] RnsError),
    #[error(transparent)]
    Qdmm(#[from] QdmmError),
    #[error(transparent)]
    ModMul(#[from] ModMulError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One modulus channel's built circuit, shared across jobs.
#[derive(Debug)]
pub enum ChannelCircuit {
    Pow2(ModMulCircuit),
    Mersenne(ModMulCircuit),
    Fermat(QdmmCircuit),
}

impl ChannelCircuit {
    pub fn build(family: Family, k: u32) -> Result<Self, OrchestratorError> {
        Ok(match family {
            Family::Pow2 => ChannelCircuit::Pow2(build_mod_pow2_mul(k)?),
            Family::MersenneLike => ChannelCircuit::Mersenne(build_mod_mersenne_mul(k)?),
            Family::FermatLike => ChannelCircuit::Fermat(build_qdmm(k)?),
        })
    }

    pub fn circuit(&self) -> &Circuit {
        match self {
            ChannelCircuit::Pow2(m) | ChannelCircuit::Mersenne(m) => m.circuit(),
            ChannelCircuit::Fermat(q) => q.circuit(),
        }
    }

    fn width(&self) -> u32 {
        match self {
            ChannelCircuit::Pow2(m) | ChannelCircuit::Mersenne(m) => m.n(),
            ChannelCircuit::Fermat(q) => q.n(),
        }
    }

    /// Residues loaded into the input registers; diminished-1 encoded on
    /// the `2^k + 1` channel.
    pub fn input_state(&self, rx: u64, ry: u64) -> Result<BasisState, OrchestratorError> {
        Ok(match self {
            ChannelCircuit::Pow2(m) | ChannelCircuit::Mersenne(m) => m.input_state(rx, ry)?,
            ChannelCircuit::Fermat(q) => {
                let a = dim1_encode(rx, q.n())?;
                let b = dim1_encode(ry, q.n())?;
                q.input_state(a, b)?
            }
        })
    }

    fn product_register(&self) -> &[usize] {
        self.circuit().register("P").expect("P register")
    }

    /// Decodes raw product-register bits to a canonical residue.
    fn decode_raw(&self, raw: &[bool], modulus: u64) -> Result<u64, OrchestratorError> {
        let n = self.width() as usize;
        let value = |bits: &[bool]| -> u64 {
            bits.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
        };
        match self {
            ChannelCircuit::Pow2(_) => Ok(value(raw)),
            ChannelCircuit::Mersenne(m) => canonicalize_mersenne(value(raw), m.n()).map_err(|e| {
                OrchestratorError::ChannelDecode {
                    modulus,
                    message: e.to_string(),
                }
            }),
            ChannelCircuit::Fermat(q) => {
                let d = Dim1Value {
                    flag: raw[n],
                    low: value(&raw[..n]),
                };
                dim1_decode(d, q.n()).map_err(|e| OrchestratorError::ChannelDecode {
                    modulus,
                    message: e.to_string(),
                })
            }
        }
    }
}

/// One planned channel job: the modulus, a shared circuit, and the input
/// basis state with both residues loaded.
#[derive(Debug, Clone)]
pub struct ChannelJob {
    pub modulus: Modulus,
    pub channel: Arc<ChannelCircuit>,
    pub input: BasisState,
}

/// One executed channel: the raw product-register bits and their decoded
/// residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelResult {
    pub modulus: Modulus,
    pub raw_bits: Vec<bool>,
    pub residue: u64,
}

/// Plans and runs distributed multiplications, caching one circuit per
/// (family, width) pair.
#[derive(Debug, Default)]
pub struct Orchestrator {
    cache: Mutex<HashMap<(Family, u32), Arc<ChannelCircuit>>>,
}

impl Orchestrator {
    pub fn new() -> Self {
        Self::default()
    }

    fn channel(&self, modulus: &Modulus) -> Result<Arc<ChannelCircuit>, OrchestratorError> {
        let key = (modulus.family(), modulus.k());
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some(hit) = cache.get(&key) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(ChannelCircuit::build(modulus.family(), modulus.k())?);
        cache.insert(key, Arc::clone(&built));
        Ok(built)
    }

    /// One job per modulus, with residues computed classically up front.
    /// The product must fit the set's range.
    pub fn plan_multiply(
        &self,
        x: u128,
        y: u128,
        set: &ModuliSet,
    ) -> Result<Vec<ChannelJob>, OrchestratorError> {
        let fits = x.checked_mul(y).map(|p| p < set.range()).unwrap_or(false);
        if !fits {
            return Err(OrchestratorError::ProductOutOfRange {
                x,
                y,
                range: set.range(),
            });
        }
        let mut jobs = Vec::with_capacity(set.len());
        for modulus in set.moduli() {
            let channel = self.channel(modulus)?;
            let m = u128::from(modulus.value());
            let input = channel.input_state((x % m) as u64, (y % m) as u64)?;
            jobs.push(ChannelJob {
                modulus: *modulus,
                channel,
                input,
            });
        }
        Ok(jobs)
    }

    /// Convenience: plan, execute, assemble.
    pub fn multiply(
        &self,
        x: u128,
        y: u128,
        set: &ModuliSet,
        parallelism: usize,
    ) -> Result<u128, OrchestratorError> {
        let jobs = self.plan_multiply(x, y, set)?;
        let results = execute(&jobs, parallelism)?;
        assemble(&results, set)
    }

    /// Checks `assemble(execute(plan(x, y))) == x * y` for all operands
    /// below `2^n`. Capped at n = 6 to keep sweeps bounded.
    pub fn verify_exhaustive(
        &self,
        n: u32,
        set: &ModuliSet,
        parallelism: usize,
    ) -> Result<VerifyReport, OrchestratorError> {
        if n > 6 {
            return Err(OrchestratorError::WidthTooLarge { got: n, max: 6 });
        }
        let limit = 1u128 << n;
        let mut report = VerifyReport::default();
        for x in 0..limit {
            for y in 0..limit {
                self.verify_one(x, y, set, parallelism, &mut report)?;
            }
        }
        Ok(report)
    }

    /// Seeded random verification sweep for widths too large to enumerate.
    pub fn verify_sampled(
        &self,
        n: u32,
        set: &ModuliSet,
        samples: u64,
        seed: u64,
        parallelism: usize,
    ) -> Result<VerifyReport, OrchestratorError> {
        let limit = 1u64 << n;
        let mut rng = SplitMix64::new(seed);
        let mut report = VerifyReport::default();
        for _ in 0..samples {
            let x = u128::from(rng.next_below(limit));
            let y = u128::from(rng.next_below(limit));
            self.verify_one(x, y, set, parallelism, &mut report)?;
        }
        Ok(report)
    }

    fn verify_one(
        &self,
        x: u128,
        y: u128,
        set: &ModuliSet,
        parallelism: usize,
        report: &mut VerifyReport,
    ) -> Result<(), OrchestratorError> {
        let jobs = self.plan_multiply(x, y, set)?;
        let results = execute(&jobs, parallelism)?;
        let got = assemble(&results, set)?;
        let expected = x * y;
        report.total += 1;
        if got != expected {
            // Pin down which channel disagrees with the classical residues.
            let expected_residues = forward_convert(expected, set)?;
            let channels = results
                .iter()
                .zip(&expected_residues)
                .map(|(r, &want)| ChannelCheck {
                    modulus: r.modulus.value(),
                    residue: r.residue,
                    expected: want,
                })
                .collect();
            report.failures.push(VerifyFailure {
                x,
                y,
                expected,
                got,
                channels,
            });
        }
        Ok(())
    }
}

/// Runs every job independently and returns results in job order. The
/// worker count is a hint; results and errors are deterministic regardless.
pub fn execute(
    jobs: &[ChannelJob],
    parallelism: usize,
) -> Result<Vec<ChannelResult>, OrchestratorError> {
    if parallelism == 0 {
        return Err(OrchestratorError::ZeroParallelism);
    }
    let workers = parallelism.min(jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<ChannelResult, OrchestratorError>>> = Vec::new();
    slots.resize_with(jobs.len(), || None);

    let collected: Vec<Vec<(usize, Result<ChannelResult, OrchestratorError>)>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let index = next.fetch_add(1, Ordering::SeqCst);
                            if index >= jobs.len() {
                                break;
                            }
                            out.push((index, run_job(index, &jobs[index])));
                        }
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });

    for (index, result) in collected.into_iter().flatten() {
        slots[index] = Some(result);
    }
    // Surface the lowest-index failure so errors are order-stable too.
    let mut results = Vec::with_capacity(jobs.len());
    for slot in slots {
        results.push(slot.expect("every index visited")?);
    }
    Ok(results)
}

fn run_job(index: usize, job: &ChannelJob) -> Result<ChannelResult, OrchestratorError> {
    let out = simulate(job.channel.circuit(), &job.input).map_err(|source| {
        OrchestratorError::JobFailed {
            index,
            modulus: job.modulus.value(),
            source,
        }
    })?;
    let raw_bits: Vec<bool> = job
        .channel
        .product_register()
        .iter()
        .map(|&q| out.get(q))
        .collect();
    let residue = job.channel.decode_raw(&raw_bits, job.modulus.value())?;
    Ok(ChannelResult {
        modulus: job.modulus,
        raw_bits,
        residue,
    })
}

/// Decodes every channel result and reconstructs the product via the CRT.
/// Any malformed channel is reported by modulus.
pub fn assemble(results: &[ChannelResult], set: &ModuliSet) -> Result<u128, OrchestratorError> {
    if results.len() != set.len() {
        return Err(OrchestratorError::ResultCountMismatch {
            expected: set.len(),
            got: results.len(),
        });
    }
    let mut residues = Vec::with_capacity(results.len());
    for (index, (result, modulus)) in results.iter().zip(set.moduli()).enumerate() {
        if result.modulus != *modulus {
            return Err(OrchestratorError::ResultOrderMismatch {
                index,
                got: result.modulus.value(),
                expected: modulus.value(),
            });
        }
        // Re-decode from the raw register so corrupted results are caught
        // here rather than inside the CRT.
        let channel = ChannelCircuit::build(modulus.family(), modulus.k())?;
        let residue = channel.decode_raw(&result.raw_bits, modulus.value())?;
        if residue != result.residue {
            return Err(OrchestratorError::ChannelDecode {
                modulus: modulus.value(),
                message: format!(
                    "stored residue {} disagrees with raw register decode {}",
                    result.residue, residue
                ),
            });
        }
        if residue >= modulus.value() {
            return Err(OrchestratorError::ChannelDecode {
                modulus: modulus.value(),
                message: format!("residue {residue} not reduced"),
            });
        }
        residues.push(residue);
    }
    Ok(crt_reconstruct(&residues, set)?)
}

/// Verification sweep outcome; `failures` is empty on success.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub total: u64,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> u64 {
        self.total - self.failures.len() as u64
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyFailure {
    pub x: u128,
    pub y: u128,
    pub expected: u128,
    pub got: u128,
    pub channels: Vec<ChannelCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelCheck {
    pub modulus: u64,
    pub residue: u64,
    pub expected: u64,
}

#[derive(Debug, Serialize)]
struct ManifestChannel {
    modulus: u64,
    family: Family,
    k: u32,
    residue_x: u64,
    residue_y: u64,
    residue_product: u64,
    gatelist_file: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    x: u128,
    y: u128,
    product: u128,
    set: ModuliSet,
    channels: Vec<ManifestChannel>,
}

/// Writes an audit manifest: `manifest.json` plus one gate-list file per
/// channel, into `dir`. Returns the manifest path.
pub fn write_manifest(
    dir: &Path,
    x: u128,
    y: u128,
    product: u128,
    set: &ModuliSet,
    jobs: &[ChannelJob],
    results: &[ChannelResult],
) -> Result<PathBuf, OrchestratorError> {
    std::fs::create_dir_all(dir)?;
    let mut channels = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        let m = u128::from(job.modulus.value());
        let file = format!("channel_{}.gl", job.modulus.value());
        std::fs::write(dir.join(&file), export_gatelist(job.channel.circuit()))?;
        channels.push(ManifestChannel {
            modulus: job.modulus.value(),
            family: job.modulus.family(),
            k: job.modulus.k(),
            residue_x: (x % m) as u64,
            residue_y: (y % m) as u64,
            residue_product: result.residue,
            gatelist_file: file,
        });
    }
    let manifest = Manifest {
        x,
        y,
        product,
        set: set.clone(),
        channels,
    };
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
