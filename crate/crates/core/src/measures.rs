//! Computable measures on infinite binary sequences.
//!
//! A measure is given by its exact conditionals `P(next = 1 | prefix)`, so
//! `P(s)` is the product of the conditionals along `s` and the consistency
//! conditions `P(ε) = 1`, `P(s0) + P(s1) = P(s)` hold by construction. All
//! arithmetic is arbitrary-precision rational; nothing here rounds.

use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bitseq::{BitString, SequenceSource};
use crate::descriptor::{format_rational, Record};
use crate::error::{Error, Result};
use crate::generators::source_from_record;

/// Level reported by [`conditional_test_level`] when the conditional is exactly zero.
pub const DEFAULT_ZERO_LEVEL_CAP: u32 = 64;

/// The first `len` bits of a string, without copying.
#[derive(Clone, Copy, Debug)]
pub struct Prefix<'a> {
    bits: &'a BitString,
    len: usize,
}

impl<'a> Prefix<'a> {
    pub fn new(bits: &'a BitString, len: usize) -> Self {
        assert!(len <= bits.len());
        Prefix { bits, len }
    }

    pub fn whole(bits: &'a BitString) -> Self {
        Prefix {
            bits,
            len: bits.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i`, 1-indexed, `i ≤ len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len);
        self.bits.get(i)
    }

    pub fn last(&self) -> Option<bool> {
        (self.len > 0).then(|| self.bits.get(self.len))
    }
}

pub trait ComputableMeasure: Send + Sync {
    /// `P(next bit = 1 | prefix)`, in [0, 1].
    fn cond_one(&self, prefix: Prefix<'_>) -> Result<BigRational>;

    fn descriptor(&self) -> Record;

    /// `P(next bit = bit | prefix)`.
    fn cond(&self, prefix: Prefix<'_>, bit: bool) -> Result<BigRational> {
        let one = self.cond_one(prefix)?;
        Ok(if bit { one } else { BigRational::one() - one })
    }
}

/// Dirac measure on a single sequence.
pub struct PointMass {
    src: Arc<dyn SequenceSource>,
    // Sources such as the pseudorandom stream have O(i) random access, so a
    // growing prefix is cached for the sequential queries of the coder.
    cache: Mutex<BitString>,
}

impl PointMass {
    pub fn new(src: Arc<dyn SequenceSource>) -> Self {
        PointMass {
            src,
            cache: Mutex::new(BitString::new()),
        }
    }

    pub fn source(&self) -> &Arc<dyn SequenceSource> {
        &self.src
    }

    fn bit(&self, i: usize) -> Result<bool> {
        let mut cache = self.cache.lock().expect("point-mass cache poisoned");
        if cache.len() < i {
            let want = i.max(cache.len() * 2).max(1024);
            *cache = self.src.prefix(want)?;
        }
        Ok(cache.get(i))
    }
}

impl std::fmt::Debug for PointMass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PointMass")
            .field("source", &self.src.descriptor())
            .finish()
    }
}

#[derive(Debug)]
pub enum MeasureFamily {
    /// Fair coin, `Bernoulli(1/2)`.
    Uniform,
    /// I.i.d. with `P(1) = p`.
    Bernoulli(BigRational),
    /// First-order Markov chain: `p00` is the probability of a 1 after a 0,
    /// `p10` the probability of a 1 after a 1, `initial` the probability that
    /// the first bit is 1.
    Markov1 {
        p00: BigRational,
        p10: BigRational,
        initial: BigRational,
    },
    PointMass(PointMass),
}

fn check_unit(name: &str, p: &BigRational) -> Result<()> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::domain(format!(
            "{name} = {} outside [0, 1]",
            format_rational(p)
        )));
    }
    Ok(())
}

impl MeasureFamily {
    pub fn uniform() -> Self {
        MeasureFamily::Uniform
    }

    pub fn bernoulli(p: BigRational) -> Result<Self> {
        check_unit("p", &p)?;
        Ok(MeasureFamily::Bernoulli(p))
    }

    pub fn markov1(p00: BigRational, p10: BigRational, initial: BigRational) -> Result<Self> {
        check_unit("p00", &p00)?;
        check_unit("p10", &p10)?;
        check_unit("initial", &initial)?;
        Ok(MeasureFamily::Markov1 { p00, p10, initial })
    }

    pub fn point_mass(src: Arc<dyn SequenceSource>) -> Self {
        MeasureFamily::PointMass(PointMass::new(src))
    }

    /// Parses a descriptor: `family = uniform | bernoulli | markov1 | pointmass`
    /// with rational parameters written `num/den`; point masses take their
    /// sequence from `source.*` keys.
    pub fn from_record(rec: &Record) -> Result<Self> {
        match rec.require("family")? {
            "uniform" => Ok(MeasureFamily::Uniform),
            "bernoulli" => MeasureFamily::bernoulli(rec.rational("p")?),
            "markov1" => MeasureFamily::markov1(
                rec.rational("p00")?,
                rec.rational("p10")?,
                rec.rational("initial")?,
            ),
            "pointmass" => {
                let src = source_from_record(&rec.section("source"))?;
                Ok(MeasureFamily::point_mass(src))
            }
            other => Err(Error::descriptor(format!(
                "unknown measure family '{other}'"
            ))),
        }
    }
}

impl ComputableMeasure for MeasureFamily {
    fn cond_one(&self, prefix: Prefix<'_>) -> Result<BigRational> {
        Ok(match self {
            MeasureFamily::Uniform => BigRational::new(1.into(), 2.into()),
            MeasureFamily::Bernoulli(p) => p.clone(),
            MeasureFamily::Markov1 { p00, p10, initial } => match prefix.last() {
                None => initial.clone(),
                Some(false) => p00.clone(),
                Some(true) => p10.clone(),
            },
            MeasureFamily::PointMass(pm) => {
                if pm.bit(prefix.len() + 1)? {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
        })
    }

    fn descriptor(&self) -> Record {
        match self {
            MeasureFamily::Uniform => Record::new().with("family", "uniform"),
            MeasureFamily::Bernoulli(p) => Record::new()
                .with("family", "bernoulli")
                .with("p", format_rational(p)),
            MeasureFamily::Markov1 { p00, p10, initial } => Record::new()
                .with("family", "markov1")
                .with("p00", format_rational(p00))
                .with("p10", format_rational(p10))
                .with("initial", format_rational(initial)),
            MeasureFamily::PointMass(pm) => Record::new()
                .with("family", "pointmass")
                .nest("source", &pm.src.descriptor()),
        }
    }
}

/// `P(s_i | s_1^{i−1})` for `i = 1, …, |s|`.
pub fn conditionals(p: &dyn ComputableMeasure, s: &BitString) -> Result<Vec<BigRational>> {
    (0..s.len())
        .map(|i| p.cond(Prefix::new(s, i), s.get(i + 1)))
        .collect()
}

fn product(mut terms: Vec<BigUint>) -> BigUint {
    // Balanced product tree; sequential multiplication is quadratic here.
    if terms.is_empty() {
        return BigUint::one();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().expect("nonempty")
}

/// `P(s)` as an unreduced fraction `(numerator, denominator)`.
pub fn prob_parts(p: &dyn ComputableMeasure, s: &BitString) -> Result<(BigUint, BigUint)> {
    let conds = conditionals(p, s)?;
    let (nums, dens): (Vec<_>, Vec<_>) = conds
        .iter()
        .map(|c| {
            (
                c.numer().to_biguint().expect("conditional is nonnegative"),
                c.denom().to_biguint().expect("denominator is positive"),
            )
        })
        .unzip();
    Ok((product(nums), product(dens)))
}

/// `P(s) = P(Δ(s))`.
pub fn prob(p: &dyn ComputableMeasure, s: &BitString) -> Result<BigRational> {
    let (a, b) = prob_parts(p, s)?;
    Ok(BigRational::new(a.into(), b.into()))
}

fn first_zero(p: &dyn ComputableMeasure, s: &BitString) -> Result<usize> {
    for i in 0..s.len() {
        if p.cond(Prefix::new(s, i), s.get(i + 1))?.is_zero() {
            return Ok(i + 1);
        }
    }
    unreachable!("a zero product has a zero factor")
}

/// Least integer `l ≥ 0` with `a · 2^l > b`, for `a > 0`.
pub(crate) fn least_exceeding_shift(a: &BigUint, b: &BigUint) -> u64 {
    debug_assert!(!a.is_zero());
    let mut l = b.bits().saturating_sub(a.bits());
    while l > 0 && (a << (l - 1)) > *b {
        l -= 1;
    }
    while (a << l) <= *b {
        l += 1;
    }
    l
}

/// The least integer strictly greater than `−log₂ P(s)`, i.e. the least `l`
/// with `P(s) · 2^l > 1`. Exact: decided by integer comparison.
pub fn ceil_neg_log2_prob(p: &dyn ComputableMeasure, s: &BitString) -> Result<u64> {
    let (a, b) = prob_parts(p, s)?;
    if a.is_zero() {
        return Err(Error::ZeroProbability {
            index: first_zero(p, s)?,
        });
    }
    Ok(least_exceeding_shift(&a, &b))
}

/// Largest `n ≥ 0` with `P(s_{|s|} | s_1^{|s|−1}) < 2^{−n}`: 0 when the
/// conditional is at least 1/2, [`DEFAULT_ZERO_LEVEL_CAP`] when it is 0.
pub fn conditional_test_level(p: &dyn ComputableMeasure, s: &BitString) -> Result<u32> {
    conditional_test_level_with_cap(p, s, DEFAULT_ZERO_LEVEL_CAP)
}

pub fn conditional_test_level_with_cap(
    p: &dyn ComputableMeasure,
    s: &BitString,
    zero_cap: u32,
) -> Result<u32> {
    if s.is_empty() {
        return Err(Error::domain("test level needs a nonempty string"));
    }
    let c = p.cond(Prefix::new(s, s.len() - 1), s.get(s.len()))?;
    Ok(dyadic_level(&c).unwrap_or(zero_cap))
}

/// Largest `n ≥ 0` with `c < 2^{−n}`, 0 if `c ≥ 1/2`; `None` for `c = 0`.
pub(crate) fn dyadic_level(c: &BigRational) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let a = c.numer().to_biguint().expect("nonnegative");
    let b = c.denom().to_biguint().expect("positive");
    // a · 2^n < b  ⟺  a · 2^n ≤ b − 1; the least failing n is least_exceeding_shift(a, b − 1).
    if b <= a {
        return Some(0);
    }
    let first_fail = least_exceeding_shift(&a, &(b - 1u32));
    Some(first_fail.saturating_sub(1) as u32)
}

/// `min_i P(s_i | s_1^{i−1})`.
pub fn min_conditional(p: &dyn ComputableMeasure, s: &BitString) -> Result<BigRational> {
    if s.is_empty() {
        return Err(Error::domain("min_conditional needs a nonempty string"));
    }
    let conds = conditionals(p, s)?;
    if let Some(i) = conds.iter().position(Zero::is_zero) {
        return Err(Error::ZeroProbability { index: i + 1 });
    }
    Ok(conds.into_iter().min().expect("nonempty"))
}

/// `⌈−log₂ c⌉` for a conditional `0 < c ≤ 1`.
pub fn ceil_neg_log2(c: &BigRational) -> Result<u64> {
    if !c.is_positive() || *c > BigRational::one() {
        return Err(Error::domain(format!(
            "{} is not in (0, 1]",
            format_rational(c)
        )));
    }
    let a = c.numer().to_biguint().expect("positive");
    let b = c.denom().to_biguint().expect("positive");
    // least l with a · 2^l ≥ b
    let mut l = 0u64;
    while (&a << l) < b {
        l += 1;
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{champernowne, Champernowne, FibonacciWord};

    fn bs(t: &str) -> BitString {
        BitString::from_text(t).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn families() -> Vec<MeasureFamily> {
        vec![
            MeasureFamily::uniform(),
            MeasureFamily::bernoulli(rat(1, 3)).unwrap(),
            MeasureFamily::bernoulli(rat(1, 10)).unwrap(),
            MeasureFamily::markov1(rat(1, 4), rat(3, 4), rat(1, 2)).unwrap(),
            MeasureFamily::point_mass(Arc::new(FibonacciWord)),
        ]
    }

    fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
        (0u32..1 << n).map(move |v| (0..n).map(|j| (v >> (n - 1 - j)) & 1 == 1).collect())
    }

    #[test]
    fn prob_examples() {
        assert_eq!(
            prob(&MeasureFamily::Uniform, &bs("0101")).unwrap(),
            rat(1, 16)
        );
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        assert_eq!(prob(&b, &bs("10")).unwrap(), rat(2, 9));
        let pm = MeasureFamily::point_mass(Arc::new(FibonacciWord));
        assert_eq!(prob(&pm, &bs("01001")).unwrap(), rat(1, 1));
        assert_eq!(prob(&pm, &bs("1")).unwrap(), rat(0, 1));
        assert_eq!(prob(&pm, &bs("")).unwrap(), rat(1, 1));
    }

    #[test]
    fn ceil_examples() {
        assert_eq!(
            ceil_neg_log2_prob(&MeasureFamily::Uniform, &bs("0110")).unwrap(),
            5
        );
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        assert_eq!(ceil_neg_log2_prob(&b, &bs("10")).unwrap(), 3);
        let pm = MeasureFamily::point_mass(Arc::new(FibonacciWord));
        assert_eq!(ceil_neg_log2_prob(&pm, &bs("0100101")).unwrap(), 1);
        assert!(matches!(
            ceil_neg_log2_prob(&pm, &bs("0110")),
            Err(Error::ZeroProbability { index: 3 })
        ));
    }

    #[test]
    fn test_level_examples() {
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        assert_eq!(conditional_test_level(&b, &bs("0001")).unwrap(), 1);
        assert_eq!(conditional_test_level(&b, &bs("1110")).unwrap(), 0);
        assert_eq!(
            conditional_test_level(&MeasureFamily::Uniform, &bs("1")).unwrap(),
            0
        );
        assert_eq!(
            conditional_test_level(&MeasureFamily::Uniform, &bs("0110")).unwrap(),
            0
        );
        assert!(conditional_test_level(&b, &bs("")).is_err());

        let pm = MeasureFamily::point_mass(Arc::new(FibonacciWord));
        assert_eq!(
            conditional_test_level(&pm, &bs("1")).unwrap(),
            DEFAULT_ZERO_LEVEL_CAP
        );
        assert_eq!(
            conditional_test_level_with_cap(&pm, &bs("1"), 9).unwrap(),
            9
        );
        assert_eq!(conditional_test_level(&pm, &bs("0")).unwrap(), 0);

        let tenth = MeasureFamily::bernoulli(rat(1, 10)).unwrap();
        // 1/16 ≤ 1/10 < 1/8
        assert_eq!(conditional_test_level(&tenth, &bs("1")).unwrap(), 3);
        let quarter = MeasureFamily::bernoulli(rat(1, 4)).unwrap();
        // 1/4 is not < 1/4
        assert_eq!(conditional_test_level(&quarter, &bs("1")).unwrap(), 1);
    }

    #[test]
    fn dyadic_level_by_brute_force() {
        for den in 1i64..=64 {
            for num in 1..=den {
                let c = rat(num, den);
                let expect = (0u32..40)
                    .filter(|&n| c < rat(1, 1i64 << n))
                    .max()
                    .unwrap_or(0);
                assert_eq!(dyadic_level(&c), Some(expect), "{num}/{den}");
            }
        }
    }

    #[test]
    fn min_conditional_examples() {
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        assert_eq!(min_conditional(&b, &bs("0110")).unwrap(), rat(1, 3));
        assert_eq!(
            min_conditional(&MeasureFamily::Uniform, &bs("1")).unwrap(),
            rat(1, 2)
        );
        let m = MeasureFamily::markov1(rat(1, 4), rat(3, 4), rat(1, 2)).unwrap();
        assert_eq!(min_conditional(&m, &bs("011")).unwrap(), rat(1, 4));
        let pm = MeasureFamily::point_mass(Arc::new(FibonacciWord));
        assert!(min_conditional(&pm, &bs("00")).is_err());
        assert!(min_conditional(&b, &bs("")).is_err());
    }

    #[test]
    fn ceil_of_conditionals() {
        assert_eq!(ceil_neg_log2(&rat(1, 3)).unwrap(), 2);
        assert_eq!(ceil_neg_log2(&rat(1, 2)).unwrap(), 1);
        assert_eq!(ceil_neg_log2(&rat(1, 1)).unwrap(), 0);
        assert!(ceil_neg_log2(&rat(0, 1)).is_err());
    }

    #[test]
    fn ceil_matches_float_reference_off_dyadics() {
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        for s in all_strings(10) {
            let exact = ceil_neg_log2_prob(&b, &s).unwrap();
            let ones = s.count_ones() as f64;
            let bits = -(ones * (1.0f64 / 3.0).log2() + (10.0 - ones) * (2.0f64 / 3.0).log2());
            assert_eq!(exact, bits.floor() as u64 + 1);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MeasureFamily::bernoulli(rat(4, 3)).is_err());
        assert!(MeasureFamily::markov1(rat(1, 2), rat(-1, 2), rat(1, 2)).is_err());
    }

    #[test]
    fn total_mass_is_one() {
        for p in families() {
            for n in 0..=12 {
                let total: BigRational = all_strings(n).map(|s| prob(&p, &s).unwrap()).sum();
                assert_eq!(total, rat(1, 1), "{:?} n={n}", p.descriptor());
            }
        }
    }

    #[test]
    fn additivity() {
        for p in families() {
            for n in 0..=7 {
                for s in all_strings(n) {
                    let mut s0 = s.clone();
                    s0.push(false);
                    let mut s1 = s.clone();
                    s1.push(true);
                    assert_eq!(
                        prob(&p, &s).unwrap(),
                        prob(&p, &s0).unwrap() + prob(&p, &s1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn ceiling_monotone_under_extension() {
        for p in families() {
            for s in all_strings(9) {
                let Ok(l) = ceil_neg_log2_prob(&p, &s) else {
                    continue;
                };
                for b in [false, true] {
                    let mut t = s.clone();
                    t.push(b);
                    let Ok(lt) = ceil_neg_log2_prob(&p, &t) else {
                        continue;
                    };
                    assert!(l <= lt);
                    let c = p.cond(Prefix::whole(&s), b).unwrap();
                    // ⌈u + v⌉ ≤ ⌈u⌉ + ⌈v⌉ in the "least integer greater than" form.
                    assert!(lt - l <= ceil_neg_log2(&c).unwrap() + 1);
                    assert!(
                        lt - l <= ceil_neg_log2(&min_conditional(&p, &t).unwrap()).unwrap() + 1
                    );
                }
            }
        }
    }

    /// Mass of the strings of exactly `m` bits whose test level is ≥ n.
    fn level_slice_mass(p: &dyn ComputableMeasure, n: u32, m: usize) -> BigRational {
        all_strings(m)
            .filter(|s| conditional_test_level(p, s).unwrap() >= n)
            .map(|s| prob(p, &s).unwrap())
            .sum()
    }

    #[test]
    fn level_sets_have_small_mass_per_length() {
        for p in families() {
            for n in 1..=4u32 {
                for m in 1..=12 {
                    let mass = level_slice_mass(&p, n, m);
                    assert!(mass < rat(1, 1i64 << n), "{:?} n={n} m={m}", p.descriptor());
                }
            }
        }
    }

    /// The union over all lengths is not bounded by 2^{-n}: for Bernoulli(1/3)
    /// every string ending in 1 has level 1, so the level-1 region covers
    /// almost every sequence.
    #[test]
    fn level_one_union_is_large_for_biased_coin() {
        let b = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        // Sequences with a 1 among the first 14 bits.
        let covered = rat(1, 1) - prob(&b, &BitString::filled(false, 14)).unwrap();
        assert!(covered > rat(1, 2));
        assert_eq!(
            conditional_test_level(&b, &bs("00000000000001")).unwrap(),
            1
        );
    }

    #[test]
    fn descriptors_round_trip() {
        for p in families() {
            let rec = p.descriptor();
            let q = MeasureFamily::from_record(&Record::parse(&rec.to_string()).unwrap()).unwrap();
            assert_eq!(q.descriptor(), rec);
        }
        assert!(MeasureFamily::from_record(&Record::new().with("family", "zipf")).is_err());
    }

    #[test]
    fn point_mass_on_champernowne() {
        let pm = MeasureFamily::point_mass(Arc::new(Champernowne));
        let x = champernowne(5000);
        assert_eq!(prob(&pm, &x).unwrap(), rat(1, 1));
        assert_eq!(ceil_neg_log2_prob(&pm, &x).unwrap(), 1);
    }
}
