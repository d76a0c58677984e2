//! The selection operator `x/y` on finite prefixes.
//!
//! `x/y` keeps the bits of `x` at the positions where `y` has a 1; those
//! positions are `τ(1) < τ(2) < …`. Together with the complement `ȳ` this
//! splits `x` into two strings from which `x` is recovered given `y`.

use crate::bitseq::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionResult {
    /// `x/y`.
    pub selected: BitString,
    /// `τ(1), …, τ(|x/y|)`, 1-indexed.
    pub positions: Vec<usize>,
}

fn same_length(x: &BitString, y: &BitString) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "selection needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

pub fn select(x: &BitString, y: &BitString) -> Result<SelectionResult> {
    same_length(x, y)?;
    let mut selected = BitString::with_capacity(y.count_ones());
    let mut positions = Vec::with_capacity(y.count_ones());
    for (j, (xb, yb)) in x.iter().zip(y.iter()).enumerate() {
        if yb {
            selected.push(xb);
            positions.push(j + 1);
        }
    }
    Ok(SelectionResult {
        selected,
        positions,
    })
}

/// `ȳ`: bitwise negation.
pub fn complement(y: &BitString) -> BitString {
    y.complement()
}

/// `(x/y, x/ȳ)`.
pub fn split(x: &BitString, y: &BitString) -> Result<(BitString, BitString)> {
    same_length(x, y)?;
    let ones = y.count_ones();
    let mut picked = BitString::with_capacity(ones);
    let mut rest = BitString::with_capacity(y.len() - ones);
    for (xb, yb) in x.iter().zip(y.iter()) {
        if yb {
            picked.push(xb);
        } else {
            rest.push(xb);
        }
    }
    Ok((picked, rest))
}

/// The unique `x` with `x/y = a` and `x/ȳ = b`.
pub fn merge(a: &BitString, b: &BitString, y: &BitString) -> Result<BitString> {
    let ones = y.count_ones();
    if a.len() != ones || b.len() != y.len() - ones {
        return Err(Error::domain(format!(
            "merge shapes: |a| = {}, |b| = {} but y has {} ones and {} zeros",
            a.len(),
            b.len(),
            ones,
            y.len() - ones
        )));
    }
    let mut from_a = a.iter();
    let mut from_b = b.iter();
    let x = y
        .iter()
        .map(|yb| {
            if yb {
                from_a.next().expect("length checked")
            } else {
                from_b.next().expect("length checked")
            }
        })
        .collect();
    Ok(x)
}

/// `[τ(1), …, τ(m)]`: the coordinates of `x` that decide the first `m`
/// bits of `x/y`.
pub fn tau_prefix(y: &BitString, m: usize) -> Result<Vec<usize>> {
    let positions: Vec<usize> = y
        .iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .map(|(j, _)| j + 1)
        .take(m)
        .collect();
    if positions.len() < m {
        return Err(Error::domain(format!(
            "y has only {} ones, fewer than {m}",
            positions.len()
        )));
    }
    Ok(positions)
}

/// The coordinate constraints `x_{τ(j)} = s_j` describing `{x : s ⊏ x/y}`.
/// The set is a union of `2^{τ(|s|) − |s|}` cylinders of length `τ(|s|)`,
/// so under the uniform measure it has mass `2^{−|s|}`.
pub fn preimage_constraints(y: &BitString, s: &BitString) -> Result<Vec<(usize, bool)>> {
    let taus = tau_prefix(y, s.len())?;
    Ok(taus.into_iter().zip(s.iter()).collect())
}
