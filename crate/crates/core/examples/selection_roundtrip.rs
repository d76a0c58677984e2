//! Selection, its complement, and the split/merge inverse pair.
//!
//! cargo run --example selection_roundtrip

use kwlab::generators::{champernowne, fibonacci_word};
use kwlab::selection::{complement, merge, preimage_constraints, select, split, tau_prefix};
use kwlab::BitString;

fn main() -> kwlab::Result<()> {
    let x: BitString = "0011".parse()?;
    let y: BitString = "0101".parse()?;
    let r = select(&x, &y)?;
    println!(
        "x = {x}, y = {y}: x/y = {}, tau = {:?}",
        r.selected, r.positions
    );

    let x = champernowne(32);
    let y = fibonacci_word(32);
    let (a, b) = split(&x, &y)?;
    println!("x      {x}");
    println!("y      {y}");
    println!("x/y    {a}");
    println!("x/~y   {b}");
    println!("~y     {}", complement(&y));
    println!("merged {}", merge(&a, &b, &y)?);
    println!("first five 1s of y at {:?}", tau_prefix(&y, 5)?);

    // x/y starts with s exactly when x has these bits fixed
    let s: BitString = "101".parse()?;
    println!(
        "x/y starts with {s} iff x has {:?}",
        preimage_constraints(&y, &s)?
    );
    Ok(())
}
