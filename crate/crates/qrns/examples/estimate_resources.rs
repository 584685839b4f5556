//! Evaluate the closed-form cost formulas for every design at one width and
//! aggregate them across an RNS set.
//!
//! ```bash
//! cargo run --example estimate_resources
//! ```

use qrns::estimator::{aggregate_max, channel_reports, estimate, DesignId};
use qrns::rns::paper_set_lookup;

fn main() {
    let n = 4;
    println!("closed-form costs at width n = {n}:");
    println!("design            qubits  toffoli(count/depth)  cnot(count/depth)  t count");
    for design in DesignId::ALL {
        let r = estimate(design, n).expect("n >= 2");
        println!(
            "{:<17} {:>6}  {:>9}/{:<10} {:>8}/{:<9} {:>7}",
            r.design.label(),
            r.qubits,
            r.toffoli_count,
            r.toffoli_depth,
            r.cnot_count,
            r.cnot_depth,
            r.t_count
        );
    }

    // A distributed multiplication runs one channel per modulus in
    // parallel, so the cost that matters is the worst channel.
    let set = paper_set_lookup(8).unwrap();
    let agg = aggregate_max(&channel_reports(&set).unwrap()).unwrap();
    println!(
        "\nmax over channels of {}: qubits {}, toffoli {}/{}, cnot {}/{}",
        set.display_values(),
        agg.qubits,
        agg.toffoli_count,
        agg.toffoli_depth,
        agg.cnot_count,
        agg.cnot_depth
    );
}
