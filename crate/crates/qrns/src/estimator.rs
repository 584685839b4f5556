//! Exact evaluation of the closed-form resource formulas for five
//! multiplier designs, max-aggregation across RNS channels, improvement
//! computation, and byte-stable table emitters.
//!
//! Formula reports are analytic estimates and deliberately use a separate
//! type from measured [`ResourceReport`]s: the modulo `2^n` design's
//! published Toffoli depth exceeds its Toffoli count at small widths, so the
//! two depth notions must never be conflated.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::ResourceReport;
use crate::rns::{self, RnsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("formula width must be at least 2, got {0}")]
    WidthTooSmall(u32),
    #[error("cannot aggregate an empty report list")]
    EmptyReportList,
    #[error("improvement rows are defined for input sizes in [3, 8], got {0}")]
    InputSizeOutOfRange(u32),
    #[error(transparent)]
    Rns(#[from] RnsError),
}

/// The five designs with published closed-form costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DesignId {
    /// Diminished-1 modulo `2^n + 1` multiplier (this crate's construction).
    #[serde(rename = "MOD_2N_PLUS_1")]
    Mod2nPlus1,
    /// Modulo `2^n` multiplier with carry-lookahead adders.
    #[serde(rename = "MOD_2N")]
    Mod2n,
    /// Modulo `2^n - 1` multiplier with carry-lookahead adders.
    #[serde(rename = "MOD_2N_MINUS_1")]
    Mod2nMinus1,
    /// Ripple-carry conditional-adder multiplier.
    #[serde(rename = "MUNOZ_ORIGINAL")]
    MunozOriginal,
    /// Carry-lookahead variant of the same multiplier.
    #[serde(rename = "MUNOZ_QCLA")]
    MunozQcla,
}

impl DesignId {
    pub const ALL: [DesignId; 5] = [
        DesignId::Mod2nPlus1,
        DesignId::Mod2n,
        DesignId::Mod2nMinus1,
        DesignId::MunozOriginal,
        DesignId::MunozQcla,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DesignId::Mod2nPlus1 => "MOD_2N_PLUS_1",
            DesignId::Mod2n => "MOD_2N",
            DesignId::Mod2nMinus1 => "MOD_2N_MINUS_1",
            DesignId::MunozOriginal => "MUNOZ_ORIGINAL",
            DesignId::MunozQcla => "MUNOZ_QCLA",
        }
    }
}

/// Exact integer evaluation of one design's five cost expressions at width
/// `n`, plus the derived T count (seven T gates per Toffoli).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaReport {
    pub design: DesignId,
    pub n: u32,
    pub qubits: u64,
    pub toffoli_count: u64,
    pub toffoli_depth: u64,
    pub cnot_count: u64,
    pub cnot_depth: u64,
    pub t_count: u64,
}

impl FormulaReport {
    pub fn metrics(&self) -> ResourceReport {
        ResourceReport {
            qubits: self.qubits,
            toffoli_count: self.toffoli_count,
            toffoli_depth: self.toffoli_depth,
            cnot_count: self.cnot_count,
            cnot_depth: self.cnot_depth,
            t_count: self.t_count,
        }
    }
}

/// Hamming weight of `n`.
pub fn popcount_w(n: u64) -> u32 {
    n.count_ones()
}

/// The unique integer `e` with `2^e <= p/q < 2^(e+1)`, by exact integer
/// comparison. Negative results are meaningful: `floor_log2_ratio(1, 3)`
/// is -2.
pub fn floor_log2_ratio(p: u64, q: u64) -> i64 {
    assert!(
        p >= 1 && q >= 1,
        "floor_log2_ratio needs positive arguments"
    );
    let (p, q) = (u128::from(p), u128::from(q));
    if p >= q {
        let mut e = 0i64;
        while q << (e + 1) <= p {
            e += 1;
        }
        e
    } else {
        // floor(log2(p/q)) = -ceil(log2(q/p)) when p < q.
        let mut k = 1i64;
        while p << k < q {
            k += 1;
        }
        -k
    }
}

fn floor_log2(n: u64) -> i64 {
    floor_log2_ratio(n, 1)
}

/// Evaluates the closed-form expressions for `design` at width `n >= 2`.
pub fn estimate(design: DesignId, n: u32) -> Result<FormulaReport, EstimatorError> {
    if n < 2 {
        return Err(EstimatorError::WidthTooSmall(n));
    }
    let x = i64::from(n);
    let w = |v: i64| i64::from(popcount_w(v as u64));
    let lg = |v: i64| floor_log2(v as u64);
    let lg3 = |v: i64| floor_log2_ratio(v as u64, 3);

    let (qubits, toffoli_count, toffoli_depth, cnot_count, cnot_depth) = match design {
        DesignId::Mod2nPlus1 => (
            2 * x * x + 4 * x + 2,
            2 * x * x + 6 * x - 1,
            2 * x * x + 6 * x - 2,
            10 * x * x + 16 * x - 6,
            10 * x * x + 13 * x - 1,
        ),
        DesignId::Mod2n => (
            6 * x - 2 - w(x - 1) - lg(x - 1),
            11 * x * x - 22 * x + 12 - 6 * (x - 1) * (w(x - 1) + lg(x - 1)),
            x * x + 12 * x - 12 + (x - 1) * (3 * lg(x - 1) + lg3(x - 1)),
            4 * x * x - 9 * x + 5,
            4 * x - 4,
        ),
        DesignId::Mod2nMinus1 => (
            6 * x - 2,
            12 * x * x - 22 * x + 11,
            2 * x * x + 7 * x - 8 + (x - 1) * (3 * lg(x - 1) + lg3(x - 1)),
            4 * x * x - 4 * x,
            4 * x - 4,
        ),
        DesignId::MunozOriginal => (
            4 * x + 1,
            3 * x * x - 2,
            3 * x * x - 2,
            5 * x * x - 11 * x + 6,
            3 * x * x - 5 * x + 2,
        ),
        DesignId::MunozQcla => (
            6 * x - w(x) - lg(x) - 1,
            11 * x * x - 15 * x + 5 - 3 * (x - 1) * (w(x) + w(x - 1) + lg(x) + lg(x - 1)),
            (x - 1) * (lg(x) + lg(x - 1) + lg3(x) + lg3(x - 1)) + 9 * x - 8,
            4 * x * x - 9 * x + 5,
            4 * x - 4,
        ),
    };

    let cast = |v: i64| -> u64 {
        debug_assert!(v >= 0, "{design:?} formula went negative at n={n}");
        v as u64
    };
    let toffoli_count = cast(toffoli_count);
    Ok(FormulaReport {
        design,
        n,
        qubits: cast(qubits),
        toffoli_count,
        toffoli_depth: cast(toffoli_depth),
        cnot_count: cast(cnot_count),
        cnot_depth: cast(cnot_depth),
        t_count: 7 * toffoli_count,
    })
}

/// Component-wise maximum across the constituent channel reports, the
/// figure of merit for circuits executed in parallel.
pub fn aggregate_max(reports: &[FormulaReport]) -> Result<ResourceReport, EstimatorError> {
    let first = reports.first().ok_or(EstimatorError::EmptyReportList)?;
    let mut max = first.metrics();
    for r in &reports[1..] {
        max.qubits = max.qubits.max(r.qubits);
        max.toffoli_count = max.toffoli_count.max(r.toffoli_count);
        max.toffoli_depth = max.toffoli_depth.max(r.toffoli_depth);
        max.cnot_count = max.cnot_count.max(r.cnot_count);
        max.cnot_depth = max.cnot_depth.max(r.cnot_depth);
        max.t_count = max.t_count.max(r.t_count);
    }
    Ok(max)
}

/// Formula reports for every modulus of an RNS set, in set order.
pub fn channel_reports(set: &rns::ModuliSet) -> Result<Vec<FormulaReport>, EstimatorError> {
    set.moduli()
        .iter()
        .map(|m| estimate(m.design(), m.k()))
        .collect()
}

/// One row of the distributed-vs-non-distributed improvement table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementRow {
    pub output_size: u32,
    pub toffoli_count_impr: u64,
    pub toffoli_count_impr_pct: f64,
    pub toffoli_depth_impr: u64,
    pub toffoli_depth_impr_pct: f64,
    pub t_count_impr: u64,
    pub t_count_impr_pct: f64,
}

/// Rounds to three decimals, half away from zero.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Improvements of the distributed max-aggregate over the non-distributed
/// carry-lookahead multiplier, for input sizes `lo..=hi` within `[3, 8]`.
/// T-gate improvement is seven times the Toffoli count improvement.
pub fn improvement_rows(lo: u32, hi: u32) -> Result<Vec<ImprovementRow>, EstimatorError> {
    if lo < 3 || hi > 8 || lo > hi {
        return Err(EstimatorError::InputSizeOutOfRange(if lo < 3 {
            lo
        } else {
            hi
        }));
    }
    let mut rows = Vec::new();
    for n in lo..=hi {
        let non_dist = estimate(DesignId::MunozQcla, n)?;
        let set = rns::paper_set_lookup(n)?;
        let dist = aggregate_max(&channel_reports(&set)?)?;
        let pct = |impr: u64, base: u64| round3(impr as f64 / base as f64 * 100.0);

        let count_impr = non_dist.toffoli_count - dist.toffoli_count;
        let depth_impr = non_dist.toffoli_depth - dist.toffoli_depth;
        let t_impr = 7 * count_impr;
        rows.push(ImprovementRow {
            output_size: 2 * n,
            toffoli_count_impr: count_impr,
            toffoli_count_impr_pct: pct(count_impr, non_dist.toffoli_count),
            toffoli_depth_impr: depth_impr,
            toffoli_depth_impr_pct: pct(depth_impr, non_dist.toffoli_depth),
            t_count_impr: t_impr,
            t_count_impr_pct: pct(t_impr, non_dist.t_count),
        });
    }
    Ok(rows)
}

pub mod tables {
    //! Regeneration of the three numeric tables from the formulas alone.
    //! Output is byte-stable per format; golden files pin it.

    use std::fmt::Write as _;

    use serde::Serialize;

    use super::{
        aggregate_max, channel_reports, estimate, improvement_rows, DesignId, EstimatorError,
        ImprovementRow,
    };
    use crate::circuit::ResourceReport;
    use crate::rns;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum TableFormat {
        Csv,
        Json,
        Markdown,
    }

    impl std::str::FromStr for TableFormat {
        type Err = String;

        fn from_str(s: &str) -> Result<Self, Self::Err> {
            match s {
                "csv" => Ok(TableFormat::Csv),
                "json" => Ok(TableFormat::Json),
                "markdown" | "md" => Ok(TableFormat::Markdown),
                other => Err(format!("unknown table format {other:?}")),
            }
        }
    }

    /// One row of the per-modulus cost table.
    #[derive(Debug, Clone, Serialize)]
    pub struct CostRow {
        pub n: u32,
        pub kind: &'static str,
        pub modulus: u64,
        pub qubits: u64,
        pub toffoli_count: u64,
        pub toffoli_depth: u64,
        pub cnot_count: u64,
        pub cnot_depth: u64,
    }

    /// Costs of the three modulo multiplier designs for widths 2..=4, in
    /// `2^n - 1`, `2^n`, `2^n + 1` order per width.
    pub fn cost_rows() -> Vec<CostRow> {
        let designs = [
            (DesignId::Mod2nMinus1, "2^n-1"),
            (DesignId::Mod2n, "2^n"),
            (DesignId::Mod2nPlus1, "2^n+1"),
        ];
        let mut rows = Vec::new();
        for n in 2..=4u32 {
            for (design, kind) in designs {
                let r = estimate(design, n).expect("n >= 2");
                let modulus = match design {
                    DesignId::Mod2nMinus1 => (1u64 << n) - 1,
                    DesignId::Mod2n => 1u64 << n,
                    _ => (1u64 << n) + 1,
                };
                rows.push(CostRow {
                    n,
                    kind,
                    modulus,
                    qubits: r.qubits,
                    toffoli_count: r.toffoli_count,
                    toffoli_depth: r.toffoli_depth,
                    cnot_count: r.cnot_count,
                    cnot_depth: r.cnot_depth,
                });
            }
        }
        rows
    }

    /// One row of the non-distributed vs distributed comparison table.
    #[derive(Debug, Clone, Serialize)]
    pub struct ComparisonRow {
        pub input_size: u32,
        pub max_range: u64,
        pub output_size: u32,
        pub non_distributed: ResourceReport,
        pub rns_set: String,
        pub rns_range: u128,
        pub distributed: ResourceReport,
    }

    /// Comparison rows for input sizes 3..=8. The RNS range column reports
    /// the full moduli product.
    pub fn comparison_rows() -> Result<Vec<ComparisonRow>, EstimatorError> {
        let mut rows = Vec::new();
        for n in 3..=8u32 {
            let set = rns::paper_set_lookup(n)?;
            let dist = aggregate_max(&channel_reports(&set)?)?;
            let nd = estimate(DesignId::MunozQcla, n)?;
            let max_operand = (1u64 << n) - 1;
            rows.push(ComparisonRow {
                input_size: n,
                max_range: max_operand * max_operand,
                output_size: 2 * n,
                non_distributed: nd.metrics(),
                rns_set: set.display_values(),
                rns_range: set.range(),
                distributed: dist,
            });
        }
        Ok(rows)
    }

    fn csv_escape(field: &str) -> String {
        if field.contains(',') || field.contains('"') {
            format!("\"{}\"", field.replace('"', "\"\""))
        } else {
            field.to_string()
        }
    }

    /// Percentage formatting: rounded values print with trailing zeros
    /// trimmed, so exact ones come out bare (`0`, `86.25`).
    pub fn format_pct(v: f64) -> String {
        format!("{v}")
    }

    pub fn emit_costs(format: TableFormat) -> String {
        let rows = cost_rows();
        match format {
            TableFormat::Json => to_json(&rows),
            TableFormat::Csv => {
                let mut out = String::from(
                    "n,type,mod,qubit,toffoli_count,toffoli_depth,cnot_count,cnot_depth\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.n,
                        csv_escape(r.kind),
                        r.modulus,
                        r.qubits,
                        r.toffoli_count,
                        r.toffoli_depth,
                        r.cnot_count,
                        r.cnot_depth
                    )
                    .unwrap();
                }
                out
            }
            TableFormat::Markdown => {
                let mut out = String::from(
                    "| n | Type | Mod | Qubit | Toffoli count | Toffoli depth | CNOT count | CNOT depth |\n\
                     |---|------|-----|-------|---------------|---------------|------------|------------|\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} | {} | {} | {} |",
                        r.n,
                        r.kind,
                        r.modulus,
                        r.qubits,
                        r.toffoli_count,
                        r.toffoli_depth,
                        r.cnot_count,
                        r.cnot_depth
                    )
                    .unwrap();
                }
                out
            }
        }
    }

    pub fn emit_comparison(format: TableFormat) -> Result<String, EstimatorError> {
        let rows = comparison_rows()?;
        Ok(match format {
            TableFormat::Json => to_json(&rows),
            TableFormat::Csv => {
                let mut out = String::from(
                    "input_size,max_range,output_size,nd_qubit,nd_toffoli_count,nd_toffoli_depth,\
                     nd_cnot_count,nd_cnot_depth,rns_set,rns_range,rns_qubit,rns_toffoli_count,\
                     rns_toffoli_depth,rns_cnot_count,rns_cnot_depth\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        r.input_size,
                        r.max_range,
                        r.output_size,
                        r.non_distributed.qubits,
                        r.non_distributed.toffoli_count,
                        r.non_distributed.toffoli_depth,
                        r.non_distributed.cnot_count,
                        r.non_distributed.cnot_depth,
                        csv_escape(&r.rns_set),
                        r.rns_range,
                        r.distributed.qubits,
                        r.distributed.toffoli_count,
                        r.distributed.toffoli_depth,
                        r.distributed.cnot_count,
                        r.distributed.cnot_depth
                    )
                    .unwrap();
                }
                out
            }
            TableFormat::Markdown => {
                let mut out = String::from(
                    "| Input size (n) | Max. range | Output size (2n) | ND Qubit | ND Toffoli count | ND Toffoli depth | ND CNOT count | ND CNOT depth | RNS set | Range | Qubit | Toffoli count | Toffoli depth | CNOT count | CNOT depth |\n\
                     |---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                        r.input_size,
                        r.max_range,
                        r.output_size,
                        r.non_distributed.qubits,
                        r.non_distributed.toffoli_count,
                        r.non_distributed.toffoli_depth,
                        r.non_distributed.cnot_count,
                        r.non_distributed.cnot_depth,
                        r.rns_set,
                        r.rns_range,
                        r.distributed.qubits,
                        r.distributed.toffoli_count,
                        r.distributed.toffoli_depth,
                        r.distributed.cnot_count,
                        r.distributed.cnot_depth
                    )
                    .unwrap();
                }
                out
            }
        })
    }

    pub fn emit_improvements(format: TableFormat) -> Result<String, EstimatorError> {
        let rows: Vec<ImprovementRow> = improvement_rows(3, 8)?;
        Ok(match format {
            TableFormat::Json => to_json(&rows),
            TableFormat::Csv => {
                let mut out = String::from(
                    "output_size,toffoli_count_impr,toffoli_count_impr_pct,toffoli_depth_impr,\
                     toffoli_depth_impr_pct,t_count_impr,t_count_impr_pct\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.output_size,
                        r.toffoli_count_impr,
                        format_pct(r.toffoli_count_impr_pct),
                        r.toffoli_depth_impr,
                        format_pct(r.toffoli_depth_impr_pct),
                        r.t_count_impr,
                        format_pct(r.t_count_impr_pct)
                    )
                    .unwrap();
                }
                out
            }
            TableFormat::Markdown => {
                let mut out = String::from(
                    "| Output size (2n) | Toffoli count impr. | Toffoli count impr. % | Toffoli depth impr. | Toffoli depth impr. % | T gate impr. | T gate impr. % |\n\
                     |---|---|---|---|---|---|---|\n",
                );
                for r in rows {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} | {} | {} |",
                        r.output_size,
                        r.toffoli_count_impr,
                        format_pct(r.toffoli_count_impr_pct),
                        r.toffoli_depth_impr,
                        format_pct(r.toffoli_depth_impr_pct),
                        r.t_count_impr,
                        format_pct(r.t_count_impr_pct)
                    )
                    .unwrap();
                }
                out
            }
        })
    }

    /// All three tables. JSON nests them under one object; text formats
    /// concatenate the sections with blank-line separators.
    pub fn emit_tables(format: TableFormat) -> Result<String, EstimatorError> {
        if format == TableFormat::Json {
            #[derive(Serialize)]
            struct AllTables {
                costs: Vec<CostRow>,
                comparison: Vec<ComparisonRow>,
                improvements: Vec<ImprovementRow>,
            }
            return Ok(to_json(&AllTables {
                costs: cost_rows(),
                comparison: comparison_rows()?,
                improvements: improvement_rows(3, 8)?,
            }));
        }
        Ok(format!(
            "{}\n{}\n{}",
            emit_costs(format),
            emit_comparison(format)?,
            emit_improvements(format)?
        ))
    }

    fn to_json<T: Serialize>(value: &T) -> String {
        let mut s = serde_json::to_string_pretty(value).expect("table rows serialize");
        s.push('\n');
        s
    }
}
