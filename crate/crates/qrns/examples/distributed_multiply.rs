//! Run one multiplication through the full distributed flow: residue
//! conversion, one independent circuit job per modulus on a worker pool,
//! and CRT reconstruction of the product.
//!
//! ```bash
//! cargo run --example distributed_multiply
//! ```

use qrns::circuit::measure_resources;
use qrns::orchestrator::{assemble, execute, Orchestrator};
use qrns::rns::paper_set_lookup;

fn main() {
    let (x, y) = (201u128, 187u128);
    let set = paper_set_lookup(8).unwrap();
    println!(
        "multiplying {x} * {y} over {} (range {})",
        set.display_values(),
        set.range()
    );

    let orch = Orchestrator::new();
    let jobs = orch
        .plan_multiply(x, y, &set)
        .expect("product fits the range");
    println!("\nplanned {} channel jobs:", jobs.len());
    for job in &jobs {
        let m = u128::from(job.modulus.value());
        let r = measure_resources(job.channel.circuit());
        println!(
            "  mod {:>2}: residues ({}, {}), circuit {} qubits / {} gates",
            job.modulus.value(),
            x % m,
            y % m,
            r.qubits,
            job.channel.circuit().gates().len()
        );
    }

    // Jobs are independent; four workers, results in job order.
    let results = execute(&jobs, 4).expect("all channels simulate");
    for r in &results {
        println!("  mod {:>2} -> residue {}", r.modulus.value(), r.residue);
    }

    let product = assemble(&results, &set).expect("channels decode");
    println!("\nreconstructed product: {product}");
    assert_eq!(product, x * y);
}
