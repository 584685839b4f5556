//! Pick an RNS moduli set for a given operand width, convert a value to
//! residues, and reconstruct it with the Chinese remainder theorem.
//!
//! ```bash
//! cargo run --example plan_moduli
//! ```

use qrns::rns::{crt_reconstruct, forward_convert, paper_set_lookup, search_set, SearchObjective};

fn main() {
    let n = 5;

    // The tabulated set for 5-bit operands.
    let tabulated = paper_set_lookup(n).unwrap();
    println!(
        "tabulated set for n = {n}: {} with range {}",
        tabulated.display_values(),
        tabulated.range()
    );

    // An exhaustive search over the three families, minimizing the worst
    // channel's Toffoli depth.
    let found = search_set(n, SearchObjective::ToffoliDepth).unwrap();
    println!(
        "searched set for n = {n}:  {} with range {}",
        found.display_values(),
        found.range()
    );

    // Residues are plain remainders; reconstruction is exact.
    let x = 777u128;
    let residues = forward_convert(x, &tabulated).unwrap();
    println!(
        "\n{x} -> residues {residues:?} over {}",
        tabulated.display_values()
    );
    let back = crt_reconstruct(&residues, &tabulated).unwrap();
    println!("reconstructed: {back}");
    assert_eq!(back, x);

    // Residue arithmetic is channel-wise: multiply residues, reconstruct
    // the product.
    let y = 913u128;
    let ry = forward_convert(y, &tabulated).unwrap();
    let product_residues: Vec<u64> = residues
        .iter()
        .zip(&ry)
        .zip(tabulated.moduli())
        .map(|((&a, &b), m)| ((u128::from(a) * u128::from(b)) % u128::from(m.value())) as u64)
        .collect();
    let product = crt_reconstruct(&product_residues, &tabulated).unwrap();
    println!(
        "\nchannel-wise {x} * {y} = {product} (classical check: {})",
        x * y
    );
}
