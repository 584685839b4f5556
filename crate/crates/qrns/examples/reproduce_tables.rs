//! Regenerate the three numeric tables (per-modulus costs, distributed vs
//! non-distributed comparison, improvements) from the formulas alone.
//!
//! ```bash
//! cargo run --example reproduce_tables
//! ```

use qrns::estimator::tables::{emit_comparison, emit_costs, emit_improvements, TableFormat};

fn main() {
    println!("## Quantum modulo multiplier costs\n");
    print!("{}", emit_costs(TableFormat::Markdown));

    println!("\n## Non-distributed vs distributed multiplication\n");
    print!("{}", emit_comparison(TableFormat::Markdown).unwrap());

    println!("\n## Improvements of the distributed flow\n");
    print!("{}", emit_improvements(TableFormat::Markdown).unwrap());
}
