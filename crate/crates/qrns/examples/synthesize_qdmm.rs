//! Synthesize the diminished-1 modulo 2^n + 1 multiplier, run one
//! multiplication through it, and show its gate list head and measured
//! resource usage.
//!
//! ```bash
//! cargo run --example synthesize_qdmm
//! ```

use qrns::circuit::{export_gatelist, measure_resources, simulate};
use qrns::qdmm::{build_qdmm, build_zero_logic, dim1_decode, dim1_encode};

fn main() {
    let n = 4;
    let mult = build_qdmm(n).expect("n >= 2");

    // 3 * 5 mod 17 = 15, carried out entirely on basis states.
    let a = dim1_encode(3, n).unwrap();
    let b = dim1_encode(5, n).unwrap();
    let input = mult.input_state(a, b).unwrap();
    let output = simulate(mult.circuit(), &input).unwrap();
    let product = dim1_decode(mult.read_product(&output).unwrap(), n).unwrap();
    println!("3 * 5 mod 17 = {product}");

    let report = measure_resources(mult.circuit());
    println!(
        "width {n}: {} qubits, toffoli {}/{} (count/depth), cnot {}/{}, t count {}",
        report.qubits,
        report.toffoli_count,
        report.toffoli_depth,
        report.cnot_count,
        report.cnot_depth,
        report.t_count
    );

    let text = export_gatelist(mult.circuit());
    println!("\nfirst gate-list lines:");
    for line in text.lines().take(8) {
        println!("  {line}");
    }
    println!("  ... ({} lines total)", text.lines().count());

    // The standalone zero-flag fragment is also available on its own.
    let zero = build_zero_logic(n).unwrap();
    println!(
        "\nzero-logic fragment: {} qubits, {} gates",
        zero.qubit_count(),
        zero.gates().len()
    );
}
