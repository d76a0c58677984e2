//! Probabilities, code-length ceilings and test levels under several measures.
//!
//! cargo run --example measure_levels

use std::sync::Arc;

use num_rational::BigRational;

use kwlab::generators::FibonacciWord;
use kwlab::measures::{
    ceil_neg_log2_prob, conditional_test_level, min_conditional, prob, ComputableMeasure,
    MeasureFamily,
};
use kwlab::BitString;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn main() -> kwlab::Result<()> {
    let measures: Vec<(&str, MeasureFamily)> = vec![
        ("uniform", MeasureFamily::uniform()),
        ("bernoulli(1/3)", MeasureFamily::bernoulli(q(1, 3))?),
        (
            "markov1",
            MeasureFamily::markov1(q(1, 5), q(3, 7), q(1, 2))?,
        ),
        (
            "fibonacci point mass",
            MeasureFamily::point_mass(Arc::new(FibonacciWord)),
        ),
    ];
    let words: Vec<BitString> = ["0100101001", "0000000000", "1111111111"]
        .iter()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()?;
    for (name, p) in &measures {
        println!(
            "{name}  [{}]",
            p.descriptor().to_string().trim().replace('\n', ", ")
        );
        for s in &words {
            let level = conditional_test_level(p, s)?;
            match ceil_neg_log2_prob(p, s) {
                Ok(l) => println!(
                    "  {s}: P = {}, l = {l}, test level {level}, min conditional {}",
                    prob(p, s)?,
                    min_conditional(p, s)?
                ),
                Err(e) => println!("  {s}: {e}, test level {level}"),
            }
        }
    }
    Ok(())
}
