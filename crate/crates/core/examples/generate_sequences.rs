//! Prefixes of every built-in generator.
//!
//! cargo run --example generate_sequences

use num_bigint::BigInt;
use num_rational::BigRational;

use kwlab::generators::{
    bernoulli_pseudo, champernowne, fibonacci_word, periodic, sturmian, ArcCoding,
    ContinuedFraction, SturmianParams,
};
use kwlab::stats::density;

fn main() -> kwlab::Result<()> {
    println!("champernowne  {}", champernowne(40));
    println!("fibonacci     {}", fibonacci_word(40));

    // rotation by the golden ratio reproduces the substitution word
    let golden = sturmian(&SturmianParams::golden(), 40)?;
    println!(
        "golden rot.   {golden}  (equal: {})",
        golden == fibonacci_word(40)
    );

    let silver = SturmianParams::new(
        ContinuedFraction::silver(),
        BigRational::from_integer(BigInt::from(0)),
        ArcCoding::Ones,
    )?;
    println!("silver rot.   {}", sturmian(&silver, 40)?);

    let third = BigRational::new(1.into(), 3.into());
    let coin = bernoulli_pseudo(&third, 1, 100_000)?;
    println!("bernoulli 1/3 {}", coin.prefix(40));
    println!("  density over 10^5 bits: {}", density(&coin)?);

    println!("periodic      {}", periodic(&"011".parse()?, 40)?);
    Ok(())
}
