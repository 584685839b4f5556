//! Reusable reversible arithmetic blocks: the quantum 3:2 compressor,
//! carry-propagate adders, and the complement/circular-shift partial-product
//! wiring used by the modulo `2^n + 1` multiplier.
//!
//! All builders are pure. The `append_*` functions emit gates onto a
//! [`CircuitBuilder`] against caller-provided wires; the `build_*` functions
//! wrap them into standalone circuits with named registers.

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("width must be at least {min}, got {got}")]
    InvalidWidth { min: usize, got: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("row index {row} out of range for width {width}")]
    RowOutOfRange { row: usize, width: usize },
}

/// Wire assignment for one 3:2 compressor: inputs `a`, `b`, `cin` and a
/// fresh ancilla `cout` (must be |0> at the use site). After the fragment,
/// the `cin` wire holds the sum bit and `cout` the carry; `a` and `b` are
/// preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressorIo {
    pub a: usize,
    pub b: usize,
    pub cin: usize,
    pub cout: usize,
}

impl CompressorIo {
    fn check(&self) -> Result<(), BlockError> {
        let ops = [self.a, self.b, self.cin, self.cout];
        for (i, &x) in ops.iter().enumerate() {
            if ops[i + 1..].contains(&x) {
                return Err(BlockError::InvalidLayout(format!(
                    "compressor wires overlap: {ops:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Emits the 3:2 compressor: a single-bit full addition of `a + b + cin`
/// with the sum written onto the `cin` wire and the majority onto `cout`.
/// Two Toffolis and three CNOTs.
pub fn append_compressor(builder: &mut CircuitBuilder, io: CompressorIo) {
    builder.toffoli(io.a, io.b, io.cout);
    builder.cnot(io.a, io.b);
    builder.toffoli(io.b, io.cin, io.cout);
    builder.cnot(io.b, io.cin);
    builder.cnot(io.a, io.b);
}

/// Standalone 3:2 compressor circuit. Registers: `A`, `B`, `SUM` (the cin
/// wire), `COUT`.
pub fn build_compressor32(io: CompressorIo) -> Result<Circuit, BlockError> {
    io.check()?;
    let mut builder = CircuitBuilder::new();
    let top = [io.a, io.b, io.cin, io.cout]
        .into_iter()
        .max()
        .expect("four wires");
    for _ in 0..=top {
        builder.alloc();
    }
    append_compressor(&mut builder, io);
    builder.name_register("A", vec![io.a]);
    builder.name_register("B", vec![io.b]);
    builder.name_register("SUM", vec![io.cin]);
    builder.name_register("COUT", vec![io.cout]);
    Ok(builder.finish())
}

/// Emits a ripple carry-propagate adder over equal-width registers:
/// `sum <- (a + sum + carry_in) mod 2^n`, with the full carry xored onto
/// `carry_out` when provided. The `a` register and `carry_in` wire are
/// restored. MAJ/UMA chain; 2n Toffolis.
pub fn append_ripple_cpa(
    builder: &mut CircuitBuilder,
    a: &[usize],
    sum: &[usize],
    carry_in: usize,
    carry_out: Option<usize>,
) {
    assert_eq!(a.len(), sum.len(), "addend and target widths must match");
    assert!(!a.is_empty(), "zero-width adder");
    let n = a.len();
    // MAJ sweep: wire a[i] accumulates the carry into position i + 1.
    let mut carry = carry_in;
    for i in 0..n {
        builder.cnot(a[i], sum[i]);
        builder.cnot(a[i], carry);
        builder.toffoli(carry, sum[i], a[i]);
        carry = a[i];
    }
    if let Some(z) = carry_out {
        builder.cnot(a[n - 1], z);
    }
    // UMA sweep restores a and the carry chain while writing sum bits.
    for i in (0..n).rev() {
        let c = if i == 0 { carry_in } else { a[i - 1] };
        builder.toffoli(c, sum[i], a[i]);
        builder.cnot(a[i], c);
        builder.cnot(c, sum[i]);
    }
}

/// Standalone ripple CPA. Registers: `A` (preserved addend), `B` (holds the
/// mod-2^n sum afterwards), `CIN` (clean carry-in, restored), `COUT`.
pub fn build_ripple_cpa(n: usize) -> Result<Circuit, BlockError> {
    if n == 0 {
        return Err(BlockError::InvalidWidth { min: 1, got: 0 });
    }
    let mut builder = CircuitBuilder::new();
    let a = builder.alloc_many(n);
    let b = builder.alloc_many(n);
    let cin = builder.alloc();
    let cout = builder.alloc();
    append_ripple_cpa(&mut builder, &a, &b, cin, Some(cout));
    builder.name_register("A", a);
    builder.name_register("B", b);
    builder.name_register("CIN", vec![cin]);
    builder.name_register("COUT", vec![cout]);
    Ok(builder.finish())
}

/// Emits an incrementer chain adding a single carry bit into a register:
/// `reg <- (reg + carry_in) mod 2^n`. `prefix` supplies n fresh ancillas;
/// `prefix[i]` ends up holding `carry_in AND reg[0] AND .. AND reg[i]`
/// (original bits), so `prefix[n-1]` is the chain's carry-out.
pub fn append_half_cpa(
    builder: &mut CircuitBuilder,
    reg: &[usize],
    carry_in: usize,
    prefix: &[usize],
) {
    let n = reg.len();
    assert!(n > 0, "zero-width incrementer");
    assert_eq!(prefix.len(), n, "incrementer needs n prefix ancillas");
    builder.toffoli(carry_in, reg[0], prefix[0]);
    for i in 1..n {
        builder.toffoli(prefix[i - 1], reg[i], prefix[i]);
    }
    builder.cnot(carry_in, reg[0]);
    for i in 1..n {
        builder.cnot(prefix[i - 1], reg[i]);
    }
}

/// Standalone half CPA. Registers: `A` (incremented in place), `CIN`
/// (preserved), `COUT` (overflow of the increment), `ANC` (prefix carries,
/// garbage).
pub fn build_half_cpa(n: usize) -> Result<Circuit, BlockError> {
    if n == 0 {
        return Err(BlockError::InvalidWidth { min: 1, got: 0 });
    }
    let mut builder = CircuitBuilder::new();
    let a = builder.alloc_many(n);
    let cin = builder.alloc();
    let prefix = builder.alloc_many(n);
    append_half_cpa(&mut builder, &a, cin, &prefix);
    builder.name_register("A", a);
    builder.name_register("CIN", vec![cin]);
    builder.name_register("COUT", vec![prefix[n - 1]]);
    if n > 1 {
        builder.name_register("ANC", prefix[..n - 1].to_vec());
    }
    Ok(builder.finish())
}

/// Column assignment for partial-product row `i` of a width-`n` modulo
/// `2^n + 1` multiplier: bit `(i, j)` lands in column `(i + j) mod n`, and
/// the `i` most significant bits of the row (those that wrapped) are flagged
/// for complementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpLayout {
    row: usize,
    width: usize,
    columns: Vec<usize>,
    complemented: Vec<bool>,
}

impl PpLayout {
    pub fn row(&self) -> usize {
        self.row
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Output column of partial-product bit `(row, j)`.
    pub fn column_of(&self, j: usize) -> usize {
        self.columns[j]
    }

    pub fn is_complemented(&self, j: usize) -> bool {
        self.complemented[j]
    }

    pub fn complemented_count(&self) -> usize {
        self.complemented.iter().filter(|&&c| c).count()
    }
}

/// Computes the left-circular-shift layout for row `i` (`0 <= i <= n`).
pub fn layout_partial_products(i: usize, n: usize) -> Result<PpLayout, BlockError> {
    if n == 0 {
        return Err(BlockError::InvalidWidth { min: 1, got: 0 });
    }
    if i > n {
        return Err(BlockError::RowOutOfRange { row: i, width: n });
    }
    let columns = (0..n).map(|j| (i + j) % n).collect();
    let complemented = (0..n).map(|j| j >= n - i).collect();
    Ok(PpLayout {
        row: i,
        width: n,
        columns,
        complemented,
    })
}

/// Emits one laid-out partial-product row: `Toffoli(x_bit, y[j])` into the
/// wire for column `(i + j) mod n`, then NOT gates on the wrapped positions.
/// `row_wires[c]` is the fresh target wire for column `c`.
pub fn append_partial_product_row(
    builder: &mut CircuitBuilder,
    x_bit: usize,
    y: &[usize],
    layout: &PpLayout,
    row_wires: &[usize],
) {
    assert_eq!(y.len(), layout.width());
    assert_eq!(row_wires.len(), layout.width());
    for j in 0..y.len() {
        builder.toffoli(x_bit, y[j], row_wires[layout.column_of(j)]);
    }
    for j in 0..y.len() {
        if layout.is_complemented(j) {
            builder.not(row_wires[layout.column_of(j)]);
        }
    }
}

/// Standalone plain partial-product grid: target `(i, j)` holds
/// `x_i AND y_j`, one Toffoli each. Registers: `X`, `Y`, `PP` (row-major).
/// Targets must start in |0>; this is not checked.
pub fn build_mult_partial_products(n: usize) -> Result<Circuit, BlockError> {
    if n == 0 {
        return Err(BlockError::InvalidWidth { min: 1, got: 0 });
    }
    let mut builder = CircuitBuilder::new();
    let x = builder.alloc_many(n);
    let y = builder.alloc_many(n);
    let pp = builder.alloc_many(n * n);
    for i in 0..n {
        for j in 0..n {
            builder.toffoli(x[i], y[j], pp[i * n + j]);
        }
    }
    builder.name_register("X", x);
    builder.name_register("Y", y);
    builder.name_register("PP", pp);
    Ok(builder.finish())
}
