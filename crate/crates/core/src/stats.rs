//! Finite-horizon statistics: overlapping block frequencies, discrepancy from
//! the uniform block law, block entropy, factor complexity and LZ78 phrase
//! counts.
//!
//! Windows are counted entirely inside the prefix: a string of length `n`
//! has `n − k + 1` windows of length `k`, and that count is the denominator
//! of every frequency. Counts are exact integers; only entropies and the
//! reported discrepancy value are floating point.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bitseq::BitString;
use crate::error::{Error, Result};

/// Block lengths up to this use a dense table of all `2^k` patterns.
const DENSE_MAX_K: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

/// Overlapping `k`-block counts of a prefix. Patterns are `k`-bit integers,
/// first bit most significant, so numeric order is lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDistribution {
    k: usize,
    windows: u64,
    counts: Counts,
}

impl BlockDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn windows(&self) -> u64 {
        self.windows
    }

    pub fn count(&self, pattern: u64) -> u64 {
        match &self.counts {
            Counts::Dense(v) => v.get(pattern as usize).copied().unwrap_or(0),
            Counts::Sparse(m) => m.get(&pattern).copied().unwrap_or(0),
        }
    }

    /// Count for a pattern given as a bit string of length `k`.
    pub fn count_of(&self, pattern: &BitString) -> Result<u64> {
        if pattern.len() != self.k {
            return Err(Error::domain(format!(
                "pattern length {} differs from block length {}",
                pattern.len(),
                self.k
            )));
        }
        Ok(self.count(pattern.iter().fold(0u64, |v, b| (v << 1) | b as u64)))
    }

    pub fn frequency(&self, pattern: u64) -> BigRational {
        BigRational::new(
            BigInt::from(self.count(pattern)),
            BigInt::from(self.windows),
        )
    }

    /// `(pattern, count)` for patterns that occur, in lexicographic order.
    pub fn occurring(&self) -> Vec<(u64, u64)> {
        match &self.counts {
            Counts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(p, &c)| (p as u64, c))
                .collect(),
            Counts::Sparse(m) => {
                let mut v: Vec<_> = m.iter().map(|(&p, &c)| (p, c)).collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// Number of distinct patterns that occur.
    pub fn distinct(&self) -> usize {
        match &self.counts {
            Counts::Dense(v) => v.iter().filter(|&&c| c > 0).count(),
            Counts::Sparse(m) => m.len(),
        }
    }

    pub fn pattern_text(&self, pattern: u64) -> String {
        (0..self.k)
            .rev()
            .map(|j| if (pattern >> j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// `pattern,count` rows. Every pattern is listed for `k ≤ 20`; beyond
    /// that only occurring patterns are.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,count\n");
        match &self.counts {
            Counts::Dense(v) => {
                for (p, c) in v.iter().enumerate() {
                    let _ = writeln!(out, "{},{c}", self.pattern_text(p as u64));
                }
            }
            Counts::Sparse(_) => {
                for (p, c) in self.occurring() {
                    let _ = writeln!(out, "{},{c}", self.pattern_text(p));
                }
            }
        }
        out
    }
}

fn check_k(x: &BitString, k: usize) -> Result<()> {
    if k == 0 || k > x.len() || k > 63 {
        return Err(Error::domain(format!(
            "block length {k} outside 1..={} for a string of length {}",
            x.len().min(63),
            x.len()
        )));
    }
    Ok(())
}

/// Calls `f` with every overlapping `k`-window of `x` as an integer.
fn for_each_window(x: &BitString, k: usize, mut f: impl FnMut(u64)) {
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut v = 0u64;
    for (j, b) in x.iter().enumerate() {
        v = ((v << 1) | b as u64) & mask;
        if j + 1 >= k {
            f(v);
        }
    }
}

pub fn block_freqs(x: &BitString, k: usize) -> Result<BlockDistribution> {
    check_k(x, k)?;
    let counts = if k <= DENSE_MAX_K {
        let mut v = vec![0u64; 1 << k];
        for_each_window(x, k, |w| v[w as usize] += 1);
        Counts::Dense(v)
    } else {
        let mut m = HashMap::new();
        for_each_window(x, k, |w| *m.entry(w).or_insert(0) += 1);
        Counts::Sparse(m)
    };
    Ok(BlockDistribution {
        k,
        windows: (x.len() - k + 1) as u64,
        counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    /// `max_s |freq(s) − 2^{−k}|`, exact.
    pub value: BigRational,
    /// Lexicographically smallest pattern attaining the maximum.
    pub witness: BitString,
}

impl Discrepancy {
    pub fn as_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn discrepancy_witness(x: &BitString, k: usize) -> Result<Discrepancy> {
    let dist = block_freqs(x, k)?;
    discrepancy_of(&dist)
}

pub fn discrepancy_of(dist: &BlockDistribution) -> Result<Discrepancy> {
    let k = dist.k;
    let w = dist.windows as u128;
    // |count/W − 2^{-k}| = |count·2^k − W| / (W·2^k)
    let dev = |c: u64| ((c as u128) << k).abs_diff(w);
    let mut best: Option<(u128, u64)> = None;
    let mut consider = |d: u128, p: u64| match best {
        Some((bd, bp)) if d < bd || (d == bd && p >= bp) => {}
        _ => best = Some((d, p)),
    };
    let occurring = dist.occurring();
    for &(p, c) in &occurring {
        consider(dev(c), p);
    }
    if (occurring.len() as u128) < (1u128 << k) {
        // smallest absent pattern
        let mut absent = 0u64;
        for &(p, _) in &occurring {
            if p == absent {
                absent += 1;
            } else {
                break;
            }
        }
        consider(w, absent);
    }
    let (d, p) = best.expect("at least one pattern");
    Ok(Discrepancy {
        value: BigRational::new(BigInt::from(d), BigInt::from(w << k)),
        witness: (0..k).rev().map(|j| (p >> j) & 1 == 1).collect(),
    })
}

/// Largest deviation of a `k`-block frequency from `2^{−k}`.
pub fn discrepancy(x: &BitString, k: usize) -> Result<f64> {
    Ok(discrepancy_witness(x, k)?.as_f64())
}

fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn entropy_of(dist: &BlockDistribution) -> f64 {
    let w = dist.windows as f64;
    let h = neumaier_sum(dist.occurring().into_iter().map(|(_, c)| {
        let f = c as f64 / w;
        -f * f.log2()
    }));
    (h / dist.k as f64).max(0.0)
}

/// `H(k-block frequencies) / k` in bits per symbol.
pub fn empirical_entropy(x: &BitString, k: usize) -> Result<f64> {
    Ok(entropy_of(&block_freqs(x, k)?))
}

/// Number of distinct `k`-blocks occurring in `x`.
pub fn factor_complexity(x: &BitString, k: usize) -> Result<usize> {
    check_k(x, k)?;
    if k <= DENSE_MAX_K {
        let mut seen = vec![false; 1 << k];
        let mut distinct = 0;
        for_each_window(x, k, |w| {
            if !seen[w as usize] {
                seen[w as usize] = true;
                distinct += 1;
            }
        });
        Ok(distinct)
    } else {
        let mut seen = std::collections::HashSet::new();
        for_each_window(x, k, |w| {
            seen.insert(w);
        });
        Ok(seen.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lz78 {
    /// Number of phrases, counting a trailing repeated phrase.
    pub phrases: usize,
    /// `c · (⌈log₂(c + 1)⌉ + 1) / n`.
    pub ratio: f64,
}

/// Incremental LZ78 parse: each phrase is the shortest prefix of the
/// remaining input not yet in the dictionary.
pub fn lz78_ratio(x: &BitString) -> Result<Lz78> {
    if x.is_empty() {
        return Err(Error::domain("LZ78 ratio of an empty string"));
    }
    // trie node → children for 0 and 1; 0 marks "absent" since the root is node 0
    let mut trie: Vec<[u32; 2]> = vec![[0, 0]];
    let mut node = 0usize;
    let mut phrases = 0usize;
    for b in x.iter() {
        let child = trie[node][b as usize];
        if child != 0 {
            node = child as usize;
        } else {
            trie.push([0, 0]);
            trie[node][b as usize] = (trie.len() - 1) as u32;
            phrases += 1;
            node = 0;
        }
    }
    if node != 0 {
        phrases += 1;
    }
    let c = phrases as u64;
    let ceil_log = 64 - c.leading_zeros() as u64; // ⌈log₂(c+1)⌉
    Ok(Lz78 {
        phrases,
        ratio: (c * (ceil_log + 1)) as f64 / x.len() as f64,
    })
}

/// `count_ones(y) / |y|`.
pub fn density(y: &BitString) -> Result<BigRational> {
    if y.is_empty() {
        return Err(Error::domain("density of an empty string"));
    }
    Ok(BigRational::new(
        BigInt::from(y.count_ones()),
        BigInt::from(y.len()),
    ))
}

/// A statistic evaluated at increasing prefix lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct StatCurve {
    pub label: String,
    pub k: Option<usize>,
    pub points: Vec<(usize, f64)>,
}

impl StatCurve {
    /// Evaluates `stat` on `x_1^n` for each checkpoint `n`.
    pub fn sample(
        label: impl Into<String>,
        k: Option<usize>,
        x: &BitString,
        checkpoints: &[usize],
        stat: impl Fn(&BitString) -> Result<f64>,
    ) -> Result<StatCurve> {
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("checkpoints must be strictly increasing"));
        }
        let points = checkpoints
            .iter()
            .map(|&n| {
                if n > x.len() {
                    return Err(Error::domain(format!(
                        "checkpoint {n} beyond prefix length {}",
                        x.len()
                    )));
                }
                Ok((n, stat(&x.prefix(n))?))
            })
            .collect::<Result<_>>()?;
        Ok(StatCurve {
            label: label.into(),
            k,
            points,
        })
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }

    /// Rows `statistic,k,n,value` without a header.
    pub fn csv_rows(&self) -> String {
        let k = self.k.map(|k| k.to_string()).unwrap_or_default();
        self.points
            .iter()
            .map(|(n, v)| format!("{},{k},{n},{v}\n", self.label))
            .collect()
    }
}

pub const STAT_CSV_HEADER: &str = "statistic,k,n,value\n";

pub fn curves_to_csv(curves: &[StatCurve]) -> String {
    let mut out = String::from(STAT_CSV_HEADER);
    for c in curves {
        out.push_str(&c.csv_rows());
    }
    out
}
