//! Exact sequence generators.
//!
//! Every generator is a [`SequenceSource`] with a reproducible [`Record`]
//! descriptor, and most have a free-function shortcut returning a prefix.
//!
//! Sturmian words are produced from a rotation angle given by its continued
//! fraction; each floor `⌊iα + β⌋` is certified by a pair of consecutive
//! convergents that bracket α, refined until both bounds agree. No floating
//! point is involved.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitseq::{BitString, SequenceSource};
use crate::descriptor::{format_rational, Record};
use crate::error::{Error, Result};

/// Every bit equal to `bit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constant {
    pub bit: bool,
}

pub fn constant(bit: bool) -> Constant {
    Constant { bit }
}

impl SequenceSource for Constant {
    fn bit_at(&self, _i: u64) -> Result<bool> {
        Ok(self.bit)
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        Ok(BitString::filled(self.bit, n))
    }

    fn descriptor(&self) -> Record {
        Record::new()
            .with("kind", "constant")
            .with("bit", self.bit as u8)
    }
}

/// Binary numerals of 1, 2, 3, … concatenated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Champernowne;

pub fn champernowne(n: usize) -> BitString {
    let mut out = BitString::with_capacity(n);
    let mut k: u64 = 1;
    while out.len() < n {
        let width = 64 - k.leading_zeros();
        for shift in (0..width).rev() {
            if out.len() == n {
                break;
            }
            out.push((k >> shift) & 1 == 1);
        }
        k += 1;
    }
    out
}

impl SequenceSource for Champernowne {
    fn bit_at(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        // Numerals of width w occupy w * 2^(w-1) consecutive bits.
        let mut offset = i - 1;
        let mut width: u32 = 1;
        loop {
            let block = (width as u64) << (width - 1);
            if offset < block {
                break;
            }
            offset -= block;
            width += 1;
        }
        let numeral = (1u64 << (width - 1)) + offset / width as u64;
        let pos = (offset % width as u64) as u32;
        Ok((numeral >> (width - 1 - pos)) & 1 == 1)
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        Ok(champernowne(n))
    }

    fn descriptor(&self) -> Record {
        Record::new().with("kind", "champernowne")
    }
}

/// Fixed point of the substitution 0 → 01, 1 → 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FibonacciWord;

pub fn fibonacci_word(n: usize) -> BitString {
    let mut word = BitString::from_iter([false]);
    while word.len() < n {
        let mut next = BitString::with_capacity(word.len() * 2);
        for b in word.iter() {
            next.push(false);
            if !b {
                next.push(true);
            }
        }
        word = next;
    }
    word.prefix(n)
}

impl SequenceSource for FibonacciWord {
    /// The last digit of the Zeckendorf representation of `i - 1`.
    fn bit_at(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        let mut rest = i - 1;
        let mut fibs = vec![1u64, 2];
        while let Some(&f) = fibs.last() {
            let next = f + fibs[fibs.len() - 2];
            if next > rest {
                break;
            }
            fibs.push(next);
        }
        let mut uses_one = false;
        for &f in fibs.iter().rev() {
            if f <= rest {
                rest -= f;
                uses_one = f == 1;
            }
        }
        Ok(uses_one)
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        Ok(fibonacci_word(n))
    }

    fn descriptor(&self) -> Record {
        Record::new().with("kind", "fibonacci")
    }
}

/// A simple continued fraction `[0; a_1, a_2, …]` whose coefficients are an
/// eventually periodic list. The expansion never terminates, so the value is
/// irrational and lies in (0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    head: Vec<u64>,
    period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(head: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::domain(
                "continued fraction needs a nonempty period to be irrational",
            ));
        }
        if head.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::domain(
                "continued-fraction coefficients must be positive",
            ));
        }
        Ok(ContinuedFraction { head, period })
    }

    /// `[0; 1, 1, 1, …]`, the golden ratio conjugate (√5 − 1)/2.
    pub fn golden() -> Self {
        ContinuedFraction {
            head: vec![],
            period: vec![1],
        }
    }

    /// `[0; 2, 2, 2, …]` = √2 − 1.
    pub fn silver() -> Self {
        ContinuedFraction {
            head: vec![],
            period: vec![2],
        }
    }

    /// `a_k` for `k ≥ 1`.
    pub fn coefficient(&self, k: usize) -> u64 {
        assert!(k >= 1);
        let j = k - 1;
        if j < self.head.len() {
            self.head[j]
        } else {
            self.period[(j - self.head.len()) % self.period.len()]
        }
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0;")?;
        for a in &self.head {
            write!(f, " {a},")?;
        }
        write!(f, " (")?;
        for (j, a) in self.period.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")*]")
    }
}

/// Which letter the rotation writes when `{iα + β}` falls in `[1 − α, 1)`.
///
/// With [`ArcCoding::Ones`] bit `i` is `⌊(i+1)α+β⌋ − ⌊iα+β⌋` and the density
/// of ones is α. [`ArcCoding::Zeros`] writes the complementary word, whose
/// density of ones is 1 − α; the Fibonacci word is the `Zeros` coding of the
/// golden rotation `α = [0; 1, 1, …]`, `β = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ArcCoding {
    #[default]
    Ones,
    Zeros,
}

impl ArcCoding {
    fn name(self) -> &'static str {
        match self {
            ArcCoding::Ones => "ones",
            ArcCoding::Zeros => "zeros",
        }
    }
}

pub const DEFAULT_COEFFICIENT_BUDGET: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmianParams {
    pub alpha: ContinuedFraction,
    /// Offset in [0, 1).
    pub beta: BigRational,
    pub coding: ArcCoding,
    /// Maximum number of continued-fraction coefficients used to certify a floor.
    pub budget: usize,
}

impl SturmianParams {
    pub fn new(alpha: ContinuedFraction, beta: BigRational, coding: ArcCoding) -> Result<Self> {
        if beta.is_negative() || beta >= BigRational::one() {
            return Err(Error::domain(format!(
                "offset {} outside [0, 1)",
                format_rational(&beta)
            )));
        }
        Ok(SturmianParams {
            alpha,
            beta,
            coding,
            budget: DEFAULT_COEFFICIENT_BUDGET,
        })
    }

    /// Golden rotation with the letter convention that yields the Fibonacci word.
    pub fn golden() -> Self {
        SturmianParams {
            alpha: ContinuedFraction::golden(),
            beta: BigRational::zero(),
            coding: ArcCoding::Zeros,
            budget: DEFAULT_COEFFICIENT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// Convergents p_k/q_k of the continued fraction, computed lazily.
struct Convergents<'a> {
    cf: &'a ContinuedFraction,
    // (p_k, q_k) for k = 0, 1, …, with p_0/q_0 = 0/1.
    terms: Vec<(BigUint, BigUint)>,
}

impl<'a> Convergents<'a> {
    fn new(cf: &'a ContinuedFraction) -> Self {
        let a1 = BigUint::from(cf.coefficient(1));
        Convergents {
            cf,
            terms: vec![(BigUint::zero(), BigUint::one()), (BigUint::one(), a1)],
        }
    }

    fn get(&mut self, k: usize) -> &(BigUint, BigUint) {
        while self.terms.len() <= k {
            let n = self.terms.len();
            let a = BigUint::from(self.cf.coefficient(n));
            let (p1, q1) = &self.terms[n - 1];
            let (p2, q2) = &self.terms[n - 2];
            let next = (&a * p1 + p2, &a * q1 + q2);
            self.terms.push(next);
        }
        &self.terms[k]
    }
}

/// Certified evaluation of `⌊iα + β⌋`.
struct FloorOracle<'a> {
    convergents: Convergents<'a>,
    beta_num: BigUint,
    beta_den: BigUint,
    budget: usize,
    level: usize,
}

impl<'a> FloorOracle<'a> {
    fn new(params: &'a SturmianParams) -> Self {
        FloorOracle {
            convergents: Convergents::new(&params.alpha),
            beta_num: params
                .beta
                .numer()
                .to_biguint()
                .expect("beta is nonnegative"),
            beta_den: params
                .beta
                .denom()
                .to_biguint()
                .expect("denominator is positive"),
            budget: params.budget,
            level: 0,
        }
    }

    fn floor_at(&mut self, level: usize, i: &BigUint) -> BigUint {
        let (p, q) = self.convergents.get(level).clone();
        (i * p * &self.beta_den + &self.beta_num * &q) / (q * &self.beta_den)
    }

    /// `⌊iα + β⌋`, refining from the current level upward.
    fn floor(&mut self, i: u64) -> Result<BigUint> {
        if i == 0 {
            // β ∈ [0, 1)
            return Ok(BigUint::zero());
        }
        let big_i = BigUint::from(i);
        loop {
            if self.level + 1 > self.budget {
                return Err(Error::Precision {
                    index: i,
                    budget: self.budget,
                });
            }
            // α lies strictly between consecutive convergents.
            let a = self.floor_at(self.level, &big_i);
            let b = self.floor_at(self.level + 1, &big_i);
            if a == b {
                return Ok(a);
            }
            self.level += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sturmian {
    params: SturmianParams,
}

impl Sturmian {
    pub fn new(params: SturmianParams) -> Self {
        Sturmian { params }
    }

    pub fn params(&self) -> &SturmianParams {
        &self.params
    }
}

pub fn sturmian(params: &SturmianParams, n: usize) -> Result<BitString> {
    let mut oracle = FloorOracle::new(params);
    let mut out = BitString::with_capacity(n);
    let mut prev = oracle.floor(0)?;
    for i in 1..=n as u64 {
        let next = oracle.floor(i + 1)?;
        let step = next != prev;
        out.push(step == (params.coding == ArcCoding::Ones));
        prev = next;
    }
    Ok(out)
}

impl SequenceSource for Sturmian {
    fn bit_at(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        let mut oracle = FloorOracle::new(&self.params);
        let step = oracle.floor(i + 1)? != oracle.floor(i)?;
        Ok(step == (self.params.coding == ArcCoding::Ones))
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        sturmian(&self.params, n)
    }

    fn descriptor(&self) -> Record {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        Record::new()
            .with("kind", "sturmian")
            .with("cf_head", join(self.params.alpha.head()))
            .with("cf_period", join(self.params.alpha.period()))
            .with("beta", format_rational(&self.params.beta))
            .with("coding", self.params.coding.name())
            .with("budget", self.params.budget)
    }
}

/// Marsaglia's xorshift64* generator with shifts (12, 25, 27).
#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

/// Replacement state for seed 0, which is a fixed point of the xorshift step.
pub const ZERO_SEED_STATE: u64 = 0x9E37_79B9_7F4A_7C15;

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        XorShift64Star {
            state: if seed == 0 { ZERO_SEED_STATE } else { seed },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Top 53 bits, i.e. the numerator of a draw in [0, 1) over 2^53.
    pub fn next_53(&mut self) -> u64 {
        self.next_u64() >> 11
    }
}

/// Threshold test `u / 2^53 < num / den` in exact integer arithmetic.
#[derive(Clone, Debug)]
struct Threshold {
    num: BigUint,
    den: BigUint,
    small: Option<(u128, u128)>,
}

impl Threshold {
    fn new(p: &BigRational) -> Result<Self> {
        if p.is_negative() || *p > BigRational::one() {
            return Err(Error::domain(format!(
                "probability {} outside [0, 1]",
                format_rational(p)
            )));
        }
        let num = p.numer().to_biguint().expect("nonnegative");
        let den = p.denom().to_biguint().expect("positive");
        let small = match (num.to_u128(), den.to_u128()) {
            (Some(n), Some(d)) if d < (1u128 << 74) => Some((n, d)),
            _ => None,
        };
        Ok(Threshold { num, den, small })
    }

    fn below(&self, u53: u64) -> bool {
        match self.small {
            Some((n, d)) => (u53 as u128) * d < n << 53,
            None => BigUint::from(u53) * &self.den < &self.num << 53usize,
        }
    }
}

/// I.i.d. bits with `P(1) = p` driven by [`XorShift64Star`]: bit i is 1 iff
/// the i-th 53-bit draw, read as a fraction of 2^53, is below `p`.
#[derive(Clone, Debug)]
pub struct BernoulliPseudo {
    p: BigRational,
    seed: u64,
    threshold: Threshold,
}

impl BernoulliPseudo {
    pub fn new(p: BigRational, seed: u64) -> Result<Self> {
        let threshold = Threshold::new(&p)?;
        Ok(BernoulliPseudo { p, seed, threshold })
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

pub fn bernoulli_pseudo(p: &BigRational, seed: u64, n: usize) -> Result<BitString> {
    BernoulliPseudo::new(p.clone(), seed)?.prefix(n)
}

impl SequenceSource for BernoulliPseudo {
    /// O(i): the generator is stepped from the seed.
    fn bit_at(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        let mut rng = XorShift64Star::new(self.seed);
        for _ in 1..i {
            rng.next_u64();
        }
        Ok(self.threshold.below(rng.next_53()))
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        let mut rng = XorShift64Star::new(self.seed);
        Ok((0..n)
            .map(|_| self.threshold.below(rng.next_53()))
            .collect())
    }

    fn descriptor(&self) -> Record {
        Record::new()
            .with("kind", "bernoulli")
            .with("p", format_rational(&self.p))
            .with("seed", self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Periodic {
    pattern: BitString,
}

impl Periodic {
    pub fn new(pattern: BitString) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::domain("periodic pattern must be nonempty"));
        }
        Ok(Periodic { pattern })
    }
}

pub fn periodic(pattern: &BitString, n: usize) -> Result<BitString> {
    Periodic::new(pattern.clone())?.prefix(n)
}

impl SequenceSource for Periodic {
    fn bit_at(&self, i: u64) -> Result<bool> {
        if i == 0 {
            return Err(Error::domain("sequence indices start at 1"));
        }
        let m = self.pattern.len() as u64;
        Ok(self.pattern.get(((i - 1) % m) as usize + 1))
    }

    fn prefix(&self, n: usize) -> Result<BitString> {
        let m = self.pattern.len();
        Ok((0..n).map(|j| self.pattern.get0(j % m)).collect())
    }

    fn descriptor(&self) -> Record {
        Record::new()
            .with("kind", "periodic")
            .with("pattern", &self.pattern)
    }
}

fn parse_list(rec: &Record, key: &str) -> Result<Vec<u64>> {
    match rec.get(key) {
        None => Ok(Vec::new()),
        Some(raw) if raw.trim().is_empty() => Ok(Vec::new()),
        Some(raw) => raw
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::descriptor(format!("key '{key}': {e}")))
            })
            .collect(),
    }
}

/// Builds a source from its descriptor. Recognised kinds: `constant`,
/// `champernowne`, `fibonacci`, `sturmian`, `bernoulli`, `periodic`.
pub fn source_from_record(rec: &Record) -> Result<Arc<dyn SequenceSource>> {
    let kind = rec.require("kind")?;
    let src: Arc<dyn SequenceSource> = match kind {
        "constant" => {
            let bit: u8 = rec.parse_or("bit", 1)?;
            if bit > 1 {
                return Err(Error::descriptor("constant bit must be 0 or 1"));
            }
            Arc::new(constant(bit == 1))
        }
        "champernowne" => Arc::new(Champernowne),
        "fibonacci" | "fib" => Arc::new(FibonacciWord),
        "sturmian" => {
            let head = parse_list(rec, "cf_head")?;
            let period = parse_list(rec, "cf_period")?;
            let alpha = ContinuedFraction::new(head, period)?;
            let beta = match rec.get("beta") {
                Some(_) => rec.rational("beta")?,
                None => BigRational::zero(),
            };
            let coding = match rec.get("coding").unwrap_or("ones") {
                "ones" => ArcCoding::Ones,
                "zeros" => ArcCoding::Zeros,
                other => return Err(Error::descriptor(format!("unknown coding '{other}'"))),
            };
            let budget = rec.parse_or("budget", DEFAULT_COEFFICIENT_BUDGET)?;
            Arc::new(Sturmian::new(
                SturmianParams::new(alpha, beta, coding)?.with_budget(budget),
            ))
        }
        "bernoulli" => {
            let p = rec.rational("p")?;
            let seed = rec.parse_or("seed", 1u64)?;
            Arc::new(BernoulliPseudo::new(p, seed)?)
        }
        "periodic" => {
            let pattern = BitString::from_text(rec.require("pattern")?)?;
            Arc::new(Periodic::new(pattern)?)
        }
        other => {
            return Err(Error::descriptor(format!(
                "unknown sequence kind '{other}'"
            )))
        }
    };
    Ok(src)
}

/// Binary entropy H(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}
