//! Arithmetic coding of a biased coin and of a computable sequence.
//!
//! cargo run --release --example arithmetic_coding [n]

use std::sync::Arc;

use num_rational::BigRational;

use kwlab::coder::{code_length_curve_of, decode, encode};
use kwlab::experiment::default_checkpoints;
use kwlab::generators::{bernoulli_pseudo, binary_entropy, fibonacci_word, FibonacciWord};
use kwlab::measures::MeasureFamily;

fn main() -> kwlab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20_000);
    let third = BigRational::new(1.into(), 3.into());

    let p = MeasureFamily::bernoulli(third.clone())?;
    let y = bernoulli_pseudo(&third, 1, n)?;
    let curve = code_length_curve_of(&p, &y, &default_checkpoints(n))?;
    print!("{}", curve.to_csv());
    println!(
        "rate {:.5} vs entropy {:.5}, largest step {}",
        curve.points.last().map_or(0, |pt| pt.length()) as f64 / n as f64,
        binary_entropy(1.0 / 3.0),
        curve.max_step
    );
    let z = encode(&p, &y)?.finished();
    println!("decoded {} bits correctly: {}", n, decode(&p, &z, n)? == y);

    // a point mass on the sequence itself needs no code bits at all
    let fib = fibonacci_word(n);
    let mass = MeasureFamily::point_mass(Arc::new(FibonacciWord));
    let z = encode(&mass, &fib)?.finished();
    println!(
        "fibonacci word under its own point mass: {} code bits, decodes back: {}",
        z.len(),
        decode(&mass, &z, n)? == fib
    );
    Ok(())
}
