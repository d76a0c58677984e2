//! Block statistics of a normal, a Sturmian and a pseudorandom sequence.
//!
//! cargo run --release --example block_statistics [n]

use num_rational::BigRational;

use kwlab::generators::{bernoulli_pseudo, champernowne, fibonacci_word};
use kwlab::stats::{
    block_freqs, discrepancy_witness, empirical_entropy, factor_complexity, lz78_ratio,
};

fn main() -> kwlab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1_000_000);
    let half = BigRational::new(1.into(), 2.into());
    let seqs = [
        ("champernowne", champernowne(n)),
        ("fibonacci", fibonacci_word(n)),
        ("bernoulli(1/2)", bernoulli_pseudo(&half, 1, n)?),
    ];
    println!(
        "{:<15} {:>3} {:>10} {:>8} {:>10} {:>8}",
        "sequence", "k", "disc", "witness", "entropy", "factors"
    );
    for (name, x) in &seqs {
        for k in [1, 2, 4, 8] {
            let d = discrepancy_witness(x, k)?;
            println!(
                "{name:<15} {k:>3} {:>10.6} {:>8} {:>10.6} {:>8}",
                d.as_f64(),
                d.witness.to_string(),
                empirical_entropy(x, k)?,
                factor_complexity(x, k)?
            );
        }
        let lz = lz78_ratio(x)?;
        println!(
            "{name:<15} lz78: {} phrases, ratio {:.5}",
            lz.phrases, lz.ratio
        );
    }
    print!(
        "fibonacci 3-blocks\n{}",
        block_freqs(&seqs[1].1, 3)?.to_csv()
    );
    Ok(())
}
