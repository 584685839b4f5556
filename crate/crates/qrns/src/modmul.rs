//! Functionally correct modulo `2^n` and modulo `2^n - 1` multipliers used
//! to complete the RNS channel set.
//!
//! Both are shift-and-add designs: each partial-product row is generated
//! with Toffolis and rippled into the product register. The `2^n` variant
//! truncates shifted rows; the `2^n - 1` variant rotates them end-around and
//! re-adds each carry through a half CPA, so its output may be the redundant
//! representative `2^n - 1` for zero, which [`canonicalize_mersenne`]
//! resolves classically. Inputs are preserved; ancillas are declared in the
//! `garbage` register.

use thiserror::Error;

use crate::blocks::{append_half_cpa, append_ripple_cpa};
use crate::circuit::{BasisState, Circuit, CircuitBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModMulError {
    #[error("multiplier width must be at least {min}, got {got}")]
    InvalidWidth { min: u32, got: u32 },
    #[error("value {value} out of range for width {n}")]
    ValueOutOfRange { value: u64, n: u32 },
}

/// A built modulo multiplier with registers `X`, `Y`, `P` (each `n` qubits)
/// and `garbage`.
#[derive(Debug, Clone)]
pub struct ModMulCircuit {
    circuit: Circuit,
    n: u32,
}

impl ModMulCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Basis state with `x` and `y` loaded and ancillas clear. `P` must
    /// start at zero, which this guarantees.
    pub fn input_state(&self, x: u64, y: u64) -> Result<BasisState, ModMulError> {
        let limit = 1u64 << self.n;
        for value in [x, y] {
            if value >= limit {
                return Err(ModMulError::ValueOutOfRange { value, n: self.n });
            }
        }
        let mut state = BasisState::zeros(self.circuit.qubit_count());
        state.load_value(self.circuit.register("X").expect("X register"), x.into());
        state.load_value(self.circuit.register("Y").expect("Y register"), y.into());
        Ok(state)
    }

    /// Raw product register contents; mod `2^n - 1` callers canonicalize.
    pub fn read_product_raw(&self, state: &BasisState) -> u64 {
        state.read_value(self.circuit.register("P").expect("P register")) as u64
    }
}

/// Builds the modulo `2^n` multiplier: `P = (X * Y) mod 2^n` by adding the
/// truncated shifted rows `y_i * (X << i)` into `P`.
pub fn build_mod_pow2_mul(n: u32) -> Result<ModMulCircuit, ModMulError> {
    if n == 0 {
        return Err(ModMulError::InvalidWidth { min: 1, got: 0 });
    }
    let width = n as usize;
    let mut b = CircuitBuilder::new();
    let x = b.alloc_many(width);
    let y = b.alloc_many(width);
    let p = b.alloc_many(width);
    // Row 0 lands in an all-zero P, so it is a plain Toffoli copy.
    for j in 0..width {
        b.toffoli(x[j], y[0], p[j]);
    }
    let carry_in = b.alloc();
    for i in 1..width {
        let row_width = width - i;
        let row = b.alloc_many(row_width);
        for j in 0..row_width {
            b.toffoli(x[j], y[i], row[j]);
        }
        // Truncated add into the top bits of P; the carry-in wire is
        // restored by the adder and reused across rows.
        append_ripple_cpa(&mut b, &row, &p[i..], carry_in, None);
    }
    b.name_register("X", x);
    b.name_register("Y", y);
    b.name_register("P", p);
    let garbage = b.unnamed_qubits();
    b.name_register("garbage", garbage);
    Ok(ModMulCircuit {
        circuit: b.finish(),
        n,
    })
}

/// Builds the modulo `2^n - 1` multiplier: rows wrap cyclically and every
/// ripple carry re-enters through a half CPA, keeping `P` congruent to
/// `X * Y` modulo `2^n - 1` (possibly as the redundant all-ones zero).
pub fn build_mod_mersenne_mul(n: u32) -> Result<ModMulCircuit, ModMulError> {
    if n < 2 {
        return Err(ModMulError::InvalidWidth { min: 2, got: n });
    }
    let width = n as usize;
    let mut b = CircuitBuilder::new();
    let x = b.alloc_many(width);
    let y = b.alloc_many(width);
    let p = b.alloc_many(width);
    for j in 0..width {
        b.toffoli(x[j], y[0], p[j]);
    }
    let carry_in = b.alloc();
    for i in 1..width {
        let row = b.alloc_many(width);
        for j in 0..width {
            b.toffoli(x[j], y[i], row[(i + j) % width]);
        }
        let carry_out = b.alloc();
        append_ripple_cpa(&mut b, &row, &p, carry_in, Some(carry_out));
        // End-around: the dropped 2^n carry is worth +1 mod 2^n - 1.
        let prefix = b.alloc_many(width);
        append_half_cpa(&mut b, &p, carry_out, &prefix);
    }
    b.name_register("X", x);
    b.name_register("Y", y);
    b.name_register("P", p);
    let garbage = b.unnamed_qubits();
    b.name_register("garbage", garbage);
    Ok(ModMulCircuit {
        circuit: b.finish(),
        n,
    })
}

/// Maps the redundant mod `2^n - 1` representative to canonical form:
/// `2^n - 1` becomes `0`, everything else in range passes through.
pub fn canonicalize_mersenne(r: u64, n: u32) -> Result<u64, ModMulError> {
    let top = (1u64 << n) - 1;
    if r > top {
        return Err(ModMulError::ValueOutOfRange { value: r, n });
    }
    Ok(if r == top { 0 } else { r })
}
