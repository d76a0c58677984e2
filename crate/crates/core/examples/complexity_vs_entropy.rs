//! Full empirical entropy next to a constant-length description.
//!
//! cargo run --release --example complexity_vs_entropy [n]

use std::sync::Arc;

use num_rational::BigRational;

use kwlab::coder::encode;
use kwlab::generators::{bernoulli_pseudo, champernowne, Champernowne};
use kwlab::measures::MeasureFamily;
use kwlab::stats::{empirical_entropy, lz78_ratio};

fn main() -> kwlab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20_000);
    let half = BigRational::new(1.into(), 2.into());

    let champ = champernowne(n);
    let coin = bernoulli_pseudo(&half, 5, n)?;
    let own = MeasureFamily::point_mass(Arc::new(Champernowne));
    let fair = MeasureFamily::uniform();

    for (name, x) in [("champernowne", &champ), ("bernoulli(1/2)", &coin)] {
        println!(
            "{name:<15} h8 = {:.5}, lz78 ratio = {:.5}",
            empirical_entropy(x, 8)?,
            lz78_ratio(x)?.ratio
        );
    }
    println!(
        "champernowne under its own point mass: {} code bits",
        encode(&own, &champ)?.finished().len()
    );
    println!(
        "bernoulli(1/2) under the uniform measure: {} code bits",
        encode(&fair, &coin)?.finished().len()
    );
    Ok(())
}
