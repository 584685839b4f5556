//! The quantum diminished-1 modulo `2^n + 1` multiplier and its classical
//! oracle.
//!
//! Operands are `(n+1)`-qubit diminished-1 values: the low `n` qubits hold
//! `v - 1` for `v` in `[1, 2^n]` and the top qubit flags zero. The circuit
//! reduces the complemented/rotated partial products plus both operands
//! through a carry-save tree of 3:2 compressors, resolves the two survivors
//! with a carry-propagate adder whose carry-in realizes the fixed modular
//! correction, re-adds the complemented carry with a half CPA, and gates the
//! product register on the zero flag. Ancillas are left dirty and declared
//! in the `garbage` register.

use thiserror::Error;

use crate::blocks::{
    append_compressor, append_half_cpa, append_partial_product_row, append_ripple_cpa,
    layout_partial_products, BlockError, CompressorIo,
};
use crate::circuit::{BasisState, Circuit, CircuitBuilder, CircuitError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QdmmError {
    #[error("value {value} out of range [0, 2^{n}] for diminished-1 encoding")]
    ValueOutOfRange { value: u64, n: u32 },
    #[error("malformed diminished-1 value: zero flag set with nonzero low bits")]
    MalformedDim1,
    #[error("multiplier width must be at least 2, got {0}")]
    UnsupportedWidth(u32),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A residue for a `2^n + 1` channel in diminished-1 encoding. `flag` set
/// means the encoded value is zero, in which case `low` must be zero too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim1Value {
    pub flag: bool,
    pub low: u64,
}

/// Encodes `v` in `[0, 2^n]`: zero sets the flag, anything else stores
/// `v - 1` in the low bits.
pub fn dim1_encode(v: u64, n: u32) -> Result<Dim1Value, QdmmError> {
    if v > 1u64 << n {
        return Err(QdmmError::ValueOutOfRange { value: v, n });
    }
    Ok(if v == 0 {
        Dim1Value { flag: true, low: 0 }
    } else {
        Dim1Value {
            flag: false,
            low: v - 1,
        }
    })
}

/// Decodes a diminished-1 value back to `[0, 2^n]`.
pub fn dim1_decode(d: Dim1Value, n: u32) -> Result<u64, QdmmError> {
    if d.flag {
        if d.low != 0 {
            return Err(QdmmError::MalformedDim1);
        }
        return Ok(0);
    }
    if d.low >= 1u64 << n {
        return Err(QdmmError::ValueOutOfRange { value: d.low, n });
    }
    Ok(d.low + 1)
}

/// Classical reference for the multiplier: decodes both operands, multiplies
/// modulo `2^n + 1`, and re-encodes.
pub fn dim1_mul_oracle(a: Dim1Value, b: Dim1Value, n: u32) -> Result<Dim1Value, QdmmError> {
    let av = dim1_decode(a, n)?;
    let bv = dim1_decode(b, n)?;
    let m = (1u128 << n) + 1;
    let p = (u128::from(av) * u128::from(bv)) % m;
    dim1_encode(p as u64, n)
}

/// The built multiplier circuit with its register map: `X` and `Y` are the
/// `(n+1)`-qubit diminished-1 inputs (low bits first, flag last), `P` is the
/// product in the same encoding, and `garbage` is every ancilla. Inputs are
/// preserved by the circuit.
#[derive(Debug, Clone)]
pub struct QdmmCircuit {
    circuit: Circuit,
    n: u32,
}

impl QdmmCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Basis state with both operands loaded and all ancillas clear.
    pub fn input_state(&self, a: Dim1Value, b: Dim1Value) -> Result<BasisState, QdmmError> {
        dim1_decode(a, self.n)?;
        dim1_decode(b, self.n)?;
        let n = self.n as usize;
        let mut state = BasisState::zeros(self.circuit.qubit_count());
        let x = self.circuit.register("X").expect("X register");
        let y = self.circuit.register("Y").expect("Y register");
        state.load_value(&x[..n], a.low.into());
        state.set(x[n], a.flag);
        state.load_value(&y[..n], b.low.into());
        state.set(y[n], b.flag);
        Ok(state)
    }

    /// Reads the product register from a simulated output state.
    pub fn read_product(&self, state: &BasisState) -> Result<Dim1Value, QdmmError> {
        let n = self.n as usize;
        let p = self.circuit.register("P").expect("P register");
        let low = state.read_value(&p[..n]) as u64;
        let flag = state.get(p[n]);
        if flag && low != 0 {
            return Err(QdmmError::MalformedDim1);
        }
        Ok(Dim1Value { flag, low })
    }
}

/// Builds the diminished-1 modulo `2^n + 1` multiplier for `n >= 2`.
///
/// Stage order is row-ascending; each carry-save stage complements the MSB
/// carry and rotates it into column 0. The carry-propagate adder runs with
/// its carry-in preset to one: that single NOT realizes the entire
/// accumulated complement correction, so the half-CPA output equals the
/// diminished-1 result and its overflow bit fires exactly when the true
/// product is zero. The product flag is the OR of both input flags and that
/// overflow bit.
pub fn build_qdmm(n: u32) -> Result<QdmmCircuit, QdmmError> {
    if n < 2 {
        return Err(QdmmError::UnsupportedWidth(n));
    }
    let width = n as usize;
    let mut b = CircuitBuilder::new();

    let x = b.alloc_many(width + 1);
    let y = b.alloc_many(width + 1);
    let (x_low, x_flag) = (x[..width].to_vec(), x[width]);
    let (y_low, y_flag) = (y[..width].to_vec(), y[width]);

    // Partial-product rows, complemented and rotated per row index, then the
    // two operand rows that complete the diminished-1 product identity.
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(width + 2);
    for (i, &x_bit) in x_low.iter().enumerate() {
        let layout = layout_partial_products(i, width)?;
        let row = b.alloc_many(width);
        append_partial_product_row(&mut b, x_bit, &y_low, &layout, &row);
        words.push(row);
    }
    words.push(x_low.clone());
    words.push(y_low.clone());

    // Carry-save reduction: the sum word stays on row 0's wires, each stage
    // folds in one more word and rewires its carry with the MSB inverted.
    let sum_word = words[0].clone();
    let mut carry_word: Vec<usize> = Vec::new();
    for stage in 1..=width {
        let (op_a, op_b) = if stage == 1 {
            (words[1].clone(), words[2].clone())
        } else {
            (carry_word.clone(), words[stage + 1].clone())
        };
        let couts = b.alloc_many(width);
        for c in 0..width {
            append_compressor(
                &mut b,
                CompressorIo {
                    a: op_a[c],
                    b: op_b[c],
                    cin: sum_word[c],
                    cout: couts[c],
                },
            );
        }
        b.not(couts[width - 1]);
        carry_word = std::iter::once(couts[width - 1])
            .chain(couts[..width - 1].iter().copied())
            .collect();
    }

    // Final carry-propagate add with the correction folded into the carry-in.
    let cpa_cin = b.alloc();
    b.not(cpa_cin);
    let cpa_cout = b.alloc();
    append_ripple_cpa(&mut b, &sum_word, &carry_word, cpa_cin, Some(cpa_cout));

    // Complement the carry and add it back; the incrementer overflow marks a
    // result of 2^n, i.e. a true product of zero.
    b.not(cpa_cout);
    let prefix = b.alloc_many(width);
    append_half_cpa(&mut b, &carry_word, cpa_cout, &prefix);
    let overflow = prefix[width - 1];

    // P_n = X_n OR Y_n OR overflow; low outputs are gated on NOT P_n.
    let or_xy = b.alloc();
    b.cnot(x_flag, or_xy);
    b.cnot(y_flag, or_xy);
    b.toffoli(x_flag, y_flag, or_xy);
    let p_flag = b.alloc();
    b.cnot(or_xy, p_flag);
    b.cnot(overflow, p_flag);
    b.toffoli(or_xy, overflow, p_flag);

    let p_low = b.alloc_many(width);
    b.not(p_flag);
    for c in 0..width {
        b.toffoli(carry_word[c], p_flag, p_low[c]);
    }
    b.not(p_flag);

    let mut p = p_low;
    p.push(p_flag);
    b.name_register("X", x);
    b.name_register("Y", y);
    b.name_register("P", p);
    let garbage = b.unnamed_qubits();
    b.name_register("garbage", garbage);

    Ok(QdmmCircuit {
        circuit: b.finish(),
        n,
    })
}

/// Standalone zero-flag fragment: `PFLAG = XFLAG OR YFLAG` via two CNOTs and
/// a Toffoli, then each low output is written as `sum AND NOT PFLAG`, the
/// inverted control realized as NOT-control-NOT. Registers: `XFLAG`,
/// `YFLAG`, `SUM` (n computed sum bits), `PFLAG`, `PLOW`.
pub fn build_zero_logic(n: u32) -> Result<Circuit, QdmmError> {
    if n == 0 {
        return Err(QdmmError::UnsupportedWidth(0));
    }
    let width = n as usize;
    let mut b = CircuitBuilder::new();
    let x_flag = b.alloc();
    let y_flag = b.alloc();
    let sum = b.alloc_many(width);
    let p_flag = b.alloc();
    let p_low = b.alloc_many(width);

    b.cnot(x_flag, p_flag);
    b.cnot(y_flag, p_flag);
    b.toffoli(x_flag, y_flag, p_flag);
    b.not(p_flag);
    for c in 0..width {
        b.toffoli(sum[c], p_flag, p_low[c]);
    }
    b.not(p_flag);

    b.name_register("XFLAG", vec![x_flag]);
    b.name_register("YFLAG", vec![y_flag]);
    b.name_register("SUM", sum);
    b.name_register("PFLAG", vec![p_flag]);
    b.name_register("PLOW", p_low);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::simulate;

    #[test]
    fn encode_examples() {
        assert_eq!(dim1_encode(0, 4).unwrap(), Dim1Value { flag: true, low: 0 });
        assert_eq!(
            dim1_encode(1, 4).unwrap(),
            Dim1Value {
                flag: false,
                low: 0
            }
        );
        assert_eq!(
            dim1_encode(16, 4).unwrap(),
            Dim1Value {
                flag: false,
                low: 15
            }
        );
        assert!(matches!(
            dim1_encode(17, 4),
            Err(QdmmError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn decode_round_trips() {
        for n in [2u32, 3, 4] {
            for v in [0u64, 1, 1 << n] {
                assert_eq!(dim1_decode(dim1_encode(v, n).unwrap(), n).unwrap(), v);
            }
        }
    }

    #[test]
    fn decode_rejects_malformed() {
        let bad = Dim1Value { flag: true, low: 3 };
        assert_eq!(dim1_decode(bad, 4).unwrap_err(), QdmmError::MalformedDim1);
    }

    #[test]
    fn oracle_examples() {
        // 3 * 5 mod 17 = 15.
        let a = dim1_encode(3, 4).unwrap();
        let b = dim1_encode(5, 4).unwrap();
        assert_eq!(
            dim1_mul_oracle(a, b, 4).unwrap(),
            Dim1Value {
                flag: false,
                low: 14
            }
        );
        // Zero absorbs.
        let zero = dim1_encode(0, 4).unwrap();
        for v in 0..=16 {
            let b = dim1_encode(v, 4).unwrap();
            assert!(dim1_mul_oracle(zero, b, 4).unwrap().flag);
        }
        // 4 * 4 mod 5 = 1.
        let four = dim1_encode(4, 2).unwrap();
        assert_eq!(
            dim1_mul_oracle(four, four, 2).unwrap(),
            Dim1Value {
                flag: false,
                low: 0
            }
        );
    }

    fn check_exhaustive(n: u32) {
        let mult = build_qdmm(n).unwrap();
        let m = (1u64 << n) + 1;
        for av in 0..m {
            for bv in 0..m {
                let a = dim1_encode(av, n).unwrap();
                let b = dim1_encode(bv, n).unwrap();
                let input = mult.input_state(a, b).unwrap();
                let out = simulate(mult.circuit(), &input).unwrap();
                let got = mult.read_product(&out).unwrap();
                let want = dim1_mul_oracle(a, b, n).unwrap();
                assert_eq!(got, want, "n={n} a={av} b={bv}");
                // Input registers must read back unchanged.
                let x = mult.circuit().register("X").unwrap();
                let y = mult.circuit().register("Y").unwrap();
                assert_eq!(out.read_value(x), input.read_value(x), "X clobbered");
                assert_eq!(out.read_value(y), input.read_value(y), "Y clobbered");
            }
        }
    }

    #[test]
    fn qdmm_matches_oracle_exhaustively_n2() {
        check_exhaustive(2);
    }

    #[test]
    fn qdmm_matches_oracle_exhaustively_n3() {
        // Includes the zero-divisor pairs of the composite modulus 9,
        // e.g. 3 * 3 = 9 = 0 (mod 9).
        check_exhaustive(3);
    }

    #[test]
    fn qdmm_mod17_spot_check() {
        let mult = build_qdmm(4).unwrap();
        let a = dim1_encode(3, 4).unwrap();
        let b = dim1_encode(5, 4).unwrap();
        let out = simulate(mult.circuit(), &mult.input_state(a, b).unwrap()).unwrap();
        assert_eq!(
            dim1_decode(mult.read_product(&out).unwrap(), 4).unwrap(),
            15
        );
    }

    #[test]
    fn qdmm_zero_input_sets_flag_and_clears_lows() {
        let mult = build_qdmm(3).unwrap();
        let zero = dim1_encode(0, 3).unwrap();
        let b = dim1_encode(6, 3).unwrap();
        let out = simulate(mult.circuit(), &mult.input_state(zero, b).unwrap()).unwrap();
        let p = mult.circuit().register("P").unwrap();
        assert!(out.get(p[3]));
        assert_eq!(out.read_value(&p[..3]), 0);
    }

    #[test]
    fn qdmm_rejects_width_below_two() {
        assert_eq!(build_qdmm(1).unwrap_err(), QdmmError::UnsupportedWidth(1));
        assert_eq!(build_qdmm(0).unwrap_err(), QdmmError::UnsupportedWidth(0));
    }

    #[test]
    fn zero_logic_truth_table() {
        let n = 3u32;
        let c = build_zero_logic(n).unwrap();
        let sum_reg = c.register("SUM").unwrap().to_vec();
        let cases = [
            // (x_flag, y_flag, expect_flag)
            (false, false, false),
            (true, true, true),
            (true, false, true),
            (false, true, true),
        ];
        for (xf, yf, want_flag) in cases {
            let mut s = crate::circuit::BasisState::zeros(c.qubit_count());
            s.set(c.register("XFLAG").unwrap()[0], xf);
            s.set(c.register("YFLAG").unwrap()[0], yf);
            s.load_value(&sum_reg, 0b101);
            let out = simulate(&c, &s).unwrap();
            assert_eq!(out.get(c.register("PFLAG").unwrap()[0]), want_flag);
            let lows = out.read_value(c.register("PLOW").unwrap());
            if want_flag {
                assert_eq!(lows, 0, "lows must clear when the flag is set");
            } else {
                assert_eq!(lows, 0b101, "lows pass through when the flag is clear");
            }
        }
    }
}
