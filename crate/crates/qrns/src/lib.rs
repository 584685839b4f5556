//! Synthesis, exact simulation, and resource accounting for reversible
//! modulo multipliers, plus a residue-number-system (RNS) planner and an
//! orchestrator that runs a full multiplication as independent per-modulus
//! channel jobs.
//!
//! The toolkit covers three multiplier families over the moduli
//! `2^k - 1`, `2^k`, and `2^k + 1`:
//!
//! - [`qdmm`] builds the diminished-1 modulo `2^k + 1` multiplier from
//!   partial products, quantum 3:2 compressors, and carry-propagate adders.
//! - [`modmul`] builds functional shift-and-add multipliers for the
//!   `2^k` and `2^k - 1` channels.
//! - [`estimator`] evaluates closed-form resource formulas for five
//!   multiplier designs and regenerates the cost, comparison, and
//!   improvement tables from them.
//! - [`rns`] constructs and validates moduli sets, converts operands to
//!   residues, and reconstructs products via the Chinese remainder theorem.
//! - [`orchestrator`] plans one channel job per modulus, executes them on a
//!   worker pool, and assembles the final product.
//!
//! Every circuit is a flat list of NOT/CNOT/Toffoli gates over named
//! registers; simulation is exact on basis states. See the `examples/`
//! directory for one runnable program per capability, and the `qrns` binary
//! for the command-line front end.
//!
//! ```
//! use qrns::qdmm::{build_qdmm, dim1_encode, dim1_decode};
//! use qrns::circuit::simulate;
//!
//! // Multiply 3 * 5 mod 17 on the k = 4 channel.
//! let mult = build_qdmm(4).unwrap();
//! let a = dim1_encode(3, 4).unwrap();
//! let b = dim1_encode(5, 4).unwrap();
//! let out = simulate(mult.circuit(), &mult.input_state(a, b).unwrap()).unwrap();
//! let p = mult.read_product(&out).unwrap();
//! assert_eq!(dim1_decode(p, 4).unwrap(), 15);
//! ```

pub mod blocks;
pub mod circuit;
pub mod cli;
pub mod estimator;
pub mod modmul;
pub mod orchestrator;
pub mod qdmm;
pub mod rng;
pub mod rns;

pub use circuit::{BasisState, Circuit, Gate, ResourceReport};
pub use estimator::{DesignId, FormulaReport};
pub use rns::{ModuliSet, Modulus};
