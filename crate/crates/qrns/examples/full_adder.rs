//! Build the quantum 3:2 compressor and simulate it on all eight inputs.
//!
//! ```bash
//! cargo run --example full_adder
//! ```

use qrns::blocks::{build_compressor32, CompressorIo};
use qrns::circuit::{export_gatelist, measure_resources, simulate, BasisState};

fn main() {
    let io = CompressorIo {
        a: 0,
        b: 1,
        cin: 2,
        cout: 3,
    };
    let circuit = build_compressor32(io).expect("wires are distinct");

    println!("gate list:\n{}", export_gatelist(&circuit));

    let report = measure_resources(&circuit);
    println!(
        "measured: {} toffoli / {} cnot gates\n",
        report.toffoli_count, report.cnot_count
    );

    println!("a b cin | sum cout");
    for bits in 0u8..8 {
        let mut state = BasisState::zeros(circuit.qubit_count());
        state.set(io.a, bits & 1 == 1);
        state.set(io.b, bits & 2 == 2);
        state.set(io.cin, bits & 4 == 4);
        let out = simulate(&circuit, &state).expect("dimensions match");
        println!(
            "{} {} {}   |  {}   {}",
            u8::from(state.get(io.a)),
            u8::from(state.get(io.b)),
            u8::from(bits & 4 == 4),
            u8::from(out.get(io.cin)),
            u8::from(out.get(io.cout)),
        );
    }
}
