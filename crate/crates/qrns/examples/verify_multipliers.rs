//! Exhaustive oracle sweeps over the three multiplier families, plus an
//! end-to-end sweep of the distributed flow.
//!
//! ```bash
//! cargo run --example verify_multipliers
//! ```

use qrns::circuit::simulate;
use qrns::modmul::{build_mod_mersenne_mul, build_mod_pow2_mul, canonicalize_mersenne};
use qrns::orchestrator::Orchestrator;
use qrns::qdmm::{build_qdmm, dim1_encode, dim1_mul_oracle};
use qrns::rns::paper_set_lookup;

fn main() {
    // Diminished-1 channel: every input pair, including both zero flags.
    let k = 3;
    let mult = build_qdmm(k).unwrap();
    let m = (1u64 << k) + 1;
    let mut pass = 0u32;
    for x in 0..m {
        for y in 0..m {
            let a = dim1_encode(x, k).unwrap();
            let b = dim1_encode(y, k).unwrap();
            let out = simulate(mult.circuit(), &mult.input_state(a, b).unwrap()).unwrap();
            assert_eq!(
                mult.read_product(&out).unwrap(),
                dim1_mul_oracle(a, b, k).unwrap()
            );
            pass += 1;
        }
    }
    println!("mod {m} multiplier: {pass}/{pass} pairs match the oracle");

    // Companion channels against plain integer arithmetic.
    let pow2 = build_mod_pow2_mul(k).unwrap();
    let mers = build_mod_mersenne_mul(k).unwrap();
    for x in 0..(1u64 << k) {
        for y in 0..(1u64 << k) {
            let out = simulate(pow2.circuit(), &pow2.input_state(x, y).unwrap()).unwrap();
            assert_eq!(pow2.read_product_raw(&out), (x * y) % (1 << k));
            let out = simulate(mers.circuit(), &mers.input_state(x, y).unwrap()).unwrap();
            assert_eq!(
                canonicalize_mersenne(mers.read_product_raw(&out), k).unwrap(),
                (x * y) % ((1 << k) - 1)
            );
        }
    }
    println!(
        "mod {} and mod {} multipliers: exhaustive pass",
        1 << k,
        (1 << k) - 1
    );

    // Whole flow: every product of 4-bit operands over the (5, 8, 9) set.
    let orch = Orchestrator::new();
    let set = paper_set_lookup(4).unwrap();
    let report = orch.verify_exhaustive(4, &set, 4).unwrap();
    println!(
        "end-to-end over {}: {}/{} products correct",
        set.display_values(),
        report.passed(),
        report.total
    );
    assert!(report.all_passed());
}
