//! Exact-rational binary arithmetic coding against a [`ComputableMeasure`].
//!
//! The coder keeps the current interval `[lo, hi)` as integer numerators over
//! a shared denominator and renormalises with the usual three rules:
//!
//! * `hi ≤ 1/2`: emit 0 (then any pending 1s), map `x ↦ 2x`;
//! * `lo ≥ 1/2`: emit 1 (then any pending 0s), map `x ↦ 2x − 1`;
//! * `1/4 ≤ lo` and `hi ≤ 3/4`: defer one follow bit, map `x ↦ 2x − 1/2`.
//!
//! Every map doubles the width, so after consuming `y_1^n`
//!
//! ```text
//! (hi − lo) = P(y_1^n) · 2^(emitted + pending)
//! ```
//!
//! holds exactly, and since the width never exceeds 1 the emitted-plus-pending
//! count is at most `−log₂ P(y_1^n)`. Emitted bits are never revised, which
//! makes the decoder a monotone map from code prefixes to source prefixes.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bitseq::{BitString, SequenceSource};
use crate::error::{Error, Result};
use crate::measures::{ceil_neg_log2_prob, ComputableMeasure, Prefix};

/// The constant `C` in `L ≤ ⌈−log₂ P(y)⌉ + C` for flushed codes. The flush
/// adds at most two bits to an emitted-plus-pending count that is already
/// bounded by `−log₂ P(y)`.
pub const CODE_LENGTH_SLACK: u64 = 2;

/// Numerators over a common denominator.
#[derive(Clone, Debug)]
struct Frame<const N: usize> {
    den: BigUint,
    nums: [BigUint; N],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Zone {
    Lower,
    Upper,
    Middle,
}

impl<const N: usize> Frame<N> {
    /// Which renormalisation applies to `[nums[0], nums[1])`, if any.
    fn zone(&self) -> Option<Zone> {
        let (lo, hi) = (&self.nums[0], &self.nums[1]);
        if hi << 1u32 <= self.den {
            Some(Zone::Lower)
        } else if lo << 1u32 >= self.den {
            Some(Zone::Upper)
        } else if lo << 2u32 >= self.den && hi << 2u32 <= &self.den * 3u32 {
            Some(Zone::Middle)
        } else {
            None
        }
    }

    fn scale(&mut self, zone: Zone) {
        // x ↦ 2x − t with t = half_t / 2
        let half_t: u32 = match zone {
            Zone::Lower => 0,
            Zone::Middle => 1,
            Zone::Upper => 2,
        };
        let t_den = &self.den * half_t;
        if self.den.is_even() && (&t_den % 4u32).is_zero() {
            // (x − t·D/2) over D/2
            let shift = t_den >> 2u32;
            for v in &mut self.nums {
                *v -= &shift;
            }
            self.den >>= 1u32;
            return;
        }
        if t_den.is_odd() {
            for v in &mut self.nums {
                *v <<= 1u32;
            }
            self.den <<= 1u32;
        }
        // (2x − t·D) over D
        let shift = (&self.den * half_t) >> 1u32;
        for v in &mut self.nums {
            *v <<= 1u32;
            *v -= &shift;
        }
    }

    /// Refines by the conditional `P(1) = a/b`; returns the split point
    /// separating the 0-part `[lo, split)` from the 1-part `[split, hi)`.
    fn refine(&mut self, a: &BigUint, b: &BigUint) -> BigUint {
        let width = &self.nums[1] - &self.nums[0];
        if b.is_one() {
            // a ∈ {0, 1}: one side is empty
            return if a.is_zero() {
                self.nums[1].clone()
            } else {
                self.nums[0].clone()
            };
        }
        self.den *= b;
        for v in &mut self.nums {
            *v *= b;
        }
        &self.nums[0] + width * (b - a)
    }
}

impl Frame<4> {
    /// Narrows `[nums[2], nums[3])` to its lower or upper half; `split`
    /// stays expressed over the frame's denominator.
    fn halve_code_interval(&mut self, upper: bool, split: &mut BigUint) {
        let mut sum = &self.nums[2] + &self.nums[3];
        if sum.is_odd() {
            self.den <<= 1u32;
            for v in &mut self.nums {
                *v <<= 1u32;
            }
            *split <<= 1u32;
            sum <<= 1u32;
        }
        let mid = sum >> 1u32;
        self.nums[if upper { 2 } else { 3 }] = mid;
    }
}

fn parts(c: &BigRational) -> (BigUint, BigUint) {
    (
        c.numer().to_biguint().expect("conditional is nonnegative"),
        c.denom().to_biguint().expect("positive denominator"),
    )
}

/// Output of the encoder: the emitted prefix of `z`, unresolved follow bits,
/// and the current interval.
#[derive(Clone, Debug)]
pub struct CodeStream {
    /// Bits already emitted; never revised by further input.
    pub bits: BitString,
    /// Follow bits whose value depends on future input.
    pub pending_follow: u64,
    frame: Frame<2>,
    consumed: usize,
}

impl CodeStream {
    fn new() -> Self {
        CodeStream {
            bits: BitString::new(),
            pending_follow: 0,
            frame: Frame {
                den: BigUint::one(),
                nums: [BigUint::zero(), BigUint::one()],
            },
            consumed: 0,
        }
    }

    /// Source bits consumed so far.
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn emitted(&self) -> u64 {
        self.bits.len() as u64
    }

    /// `emitted + pending`, the code length `L_n` used for length bounds.
    pub fn committed(&self) -> u64 {
        self.emitted() + self.pending_follow
    }

    /// Current interval `[lo, hi)` in renormalised coordinates.
    pub fn interval(&self) -> (BigRational, BigRational) {
        let den = BigRational::from_integer(self.frame.den.clone().into());
        (
            BigRational::from_integer(self.frame.nums[0].clone().into()) / &den,
            BigRational::from_integer(self.frame.nums[1].clone().into()) / den,
        )
    }

    fn emit(&mut self, bit: bool) {
        self.bits.push(bit);
        for _ in 0..self.pending_follow {
            self.bits.push(!bit);
        }
        self.pending_follow = 0;
    }

    fn renormalize(&mut self) {
        while let Some(zone) = self.frame.zone() {
            match zone {
                Zone::Lower => self.emit(false),
                Zone::Upper => self.emit(true),
                Zone::Middle => self.pending_follow += 1,
            }
            self.frame.scale(zone);
        }
    }

    /// The finite code: emitted bits, then the fewest bits (at most two,
    /// plus pending follows) naming a dyadic interval inside `[lo, hi)`.
    pub fn finished(&self) -> BitString {
        let mut out = self.clone();
        let (lo, hi, den) = (&out.frame.nums[0], &out.frame.nums[1], &out.frame.den);
        let tail: &[bool] = if out.pending_follow == 0 && lo.is_zero() && hi == den {
            &[]
        } else if lo.is_zero() {
            &[false]
        } else if hi == den {
            &[true]
        } else if lo << 2u32 <= *den {
            &[false, true]
        } else {
            &[true, false]
        };
        if let Some((&first, rest)) = tail.split_first() {
            out.emit(first);
            for &b in rest {
                out.bits.push(b);
            }
        }
        out.bits
    }
}

/// Streaming encoder.
pub struct Encoder<'m> {
    measure: &'m dyn ComputableMeasure,
    source: BitString,
    stream: CodeStream,
}

impl<'m> Encoder<'m> {
    pub fn new(measure: &'m dyn ComputableMeasure) -> Self {
        Encoder {
            measure,
            source: BitString::new(),
            stream: CodeStream::new(),
        }
    }

    /// Consumes one source bit. Fails if the bit has zero conditional probability.
    pub fn push(&mut self, bit: bool) -> Result<()> {
        let c = self.measure.cond_one(Prefix::whole(&self.source))?;
        let (a, b) = parts(&c);
        let possible = if bit { !a.is_zero() } else { a != b };
        if !possible {
            return Err(Error::ZeroProbability {
                index: self.source.len() + 1,
            });
        }
        let split = self.stream.frame.refine(&a, &b);
        if bit {
            self.stream.frame.nums[0] = split;
        } else {
            self.stream.frame.nums[1] = split;
        }
        self.source.push(bit);
        self.stream.consumed += 1;
        self.stream.renormalize();
        Ok(())
    }

    pub fn stream(&self) -> &CodeStream {
        &self.stream
    }

    pub fn source(&self) -> &BitString {
        &self.source
    }

    pub fn into_stream(self) -> CodeStream {
        self.stream
    }
}

pub fn encode(measure: &dyn ComputableMeasure, y: &BitString) -> Result<CodeStream> {
    let mut enc = Encoder::new(measure);
    for b in y.iter() {
        enc.push(b)?;
    }
    Ok(enc.into_stream())
}

/// The longest source prefix (at most `max_out` bits) that every infinite
/// extension of `z` decodes to. Monotone: `z ⊑ z'` implies
/// `decode(z) ⊑ decode(z')`.
pub fn decode(measure: &dyn ComputableMeasure, z: &BitString, max_out: usize) -> Result<BitString> {
    // nums: [lo, hi, z_lo, z_hi]; code bits are read only when the z
    // interval straddles a split, which keeps the numbers as small as the
    // encoder's
    let mut frame = Frame::<4> {
        den: BigUint::one(),
        nums: [
            BigUint::zero(),
            BigUint::one(),
            BigUint::zero(),
            BigUint::one(),
        ],
    };
    let mut code = z.iter();
    let mut out = BitString::new();
    'outer: while out.len() < max_out {
        let c = measure.cond_one(Prefix::whole(&out))?;
        let (a, b) = parts(&c);
        let mut split = frame.refine(&a, &b);
        let bit = loop {
            if frame.nums[3] <= split {
                frame.nums[1] = split;
                break false;
            }
            if frame.nums[2] >= split {
                frame.nums[0] = split;
                break true;
            }
            let Some(zb) = code.next() else {
                break 'outer;
            };
            frame.halve_code_interval(zb, &mut split);
        };
        out.push(bit);
        while let Some(zone) = frame.zone() {
            frame.scale(zone);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLengthPoint {
    pub n: usize,
    pub emitted: u64,
    pub pending: u64,
    /// Least integer greater than `−log₂ P(y_1^n)`, computed from the measure.
    pub bound: u64,
    /// Flushed code for `y_1^n`.
    pub code: BitString,
}

impl CodeLengthPoint {
    /// `L_n = emitted + pending`.
    pub fn length(&self) -> u64 {
        self.emitted + self.pending
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLengthCurve {
    pub points: Vec<CodeLengthPoint>,
    /// `max_n (L_{n+1} − L_n)` over every step up to the last checkpoint.
    pub max_step: u64,
}

impl CodeLengthCurve {
    /// Columns `n,L_n,l_n,emitted`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,L_n,l_n,emitted\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.n,
                p.length(),
                p.bound,
                p.emitted
            ));
        }
        out
    }
}

/// Encodes a prefix of `src` and records the code length at each checkpoint.
pub fn code_length_curve(
    measure: &dyn ComputableMeasure,
    src: &dyn SequenceSource,
    checkpoints: &[usize],
) -> Result<CodeLengthCurve> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("checkpoints must be strictly increasing"));
    }
    let horizon = checkpoints.last().copied().unwrap_or(0);
    let y = src.prefix(horizon)?;
    code_length_curve_of(measure, &y, checkpoints)
}

pub fn code_length_curve_of(
    measure: &dyn ComputableMeasure,
    y: &BitString,
    checkpoints: &[usize],
) -> Result<CodeLengthCurve> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("checkpoints must be strictly increasing"));
    }
    if checkpoints.last().is_some_and(|&n| n > y.len()) {
        return Err(Error::domain("checkpoint beyond the available prefix"));
    }
    let mut enc = Encoder::new(measure);
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut max_step = 0;
    let mut next = checkpoints.iter().peekable();
    while let Some(&&n) = next.peek() {
        if enc.stream().consumed() == n {
            let s = enc.stream();
            points.push(CodeLengthPoint {
                n,
                emitted: s.emitted(),
                pending: s.pending_follow,
                bound: ceil_neg_log2_prob(measure, &y.prefix(n))?,
                code: s.finished(),
            });
            next.next();
            continue;
        }
        let before = enc.stream().committed();
        enc.push(y.get(enc.stream().consumed() + 1))?;
        max_step = max_step.max(enc.stream().committed() - before);
    }
    Ok(CodeLengthCurve { points, max_step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::generators::{bernoulli_pseudo, fibonacci_word, FibonacciWord};
    use crate::measures::{prob, MeasureFamily};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
        (0u32..1 << n).map(move |v| (0..n).map(|j| (v >> (n - 1 - j)) & 1 == 1).collect())
    }

    fn families() -> Vec<MeasureFamily> {
        vec![
            MeasureFamily::uniform(),
            MeasureFamily::bernoulli(rat(1, 3)).unwrap(),
            MeasureFamily::bernoulli(rat(1, 10)).unwrap(),
            MeasureFamily::markov1(rat(1, 4), rat(3, 4), rat(1, 2)).unwrap(),
        ]
    }

    #[test]
    fn uniform_coding_is_identity_up_to_flush() {
        let y = BitString::from_text("0110100111010").unwrap();
        let s = encode(&MeasureFamily::Uniform, &y).unwrap();
        assert_eq!(s.committed(), y.len() as u64);
        let z = s.finished();
        assert!(z.len() as u64 <= y.len() as u64 + CODE_LENGTH_SLACK);
        assert!(y.is_prefix_of(&z));
        assert!(y.is_prefix_of(&decode(&MeasureFamily::Uniform, &z, y.len()).unwrap()));
        let d = decode(
            &MeasureFamily::Uniform,
            &BitString::from_text("0101").unwrap(),
            10,
        )
        .unwrap();
        assert_eq!(d, BitString::from_text("0101").unwrap());
    }

    #[test]
    fn point_mass_code_is_near_empty() {
        let pm = MeasureFamily::point_mass(Arc::new(FibonacciWord));
        let y = fibonacci_word(100);
        let s = encode(&pm, &y).unwrap();
        let z = s.finished();
        assert!(z.len() as u64 <= CODE_LENGTH_SLACK);
        assert_eq!(decode(&pm, &z, 100).unwrap(), y);
        // Off-support bit is rejected at its index.
        let mut bad = fibonacci_word(6);
        bad.push(true);
        bad.push(true);
        assert!(matches!(
            encode(&pm, &bad),
            Err(Error::ZeroProbability { index: 8 })
        ));
    }

    #[test]
    fn width_tracks_probability_exactly() {
        for p in families() {
            for s in all_strings(9) {
                let stream = encode(&p, &s).unwrap();
                let (lo, hi) = stream.interval();
                let scale =
                    BigRational::from_integer((BigUint::one() << stream.committed()).into());
                assert_eq!(hi - lo, prob(&p, &s).unwrap() * scale);
            }
        }
    }

    #[test]
    fn lossless_exhaustive_short_inputs() {
        for p in [
            MeasureFamily::uniform(),
            MeasureFamily::bernoulli(rat(1, 3)).unwrap(),
        ] {
            for n in 0..=12 {
                for y in all_strings(n) {
                    let z = encode(&p, &y).unwrap().finished();
                    let l = ceil_neg_log2_prob(&p, &y).unwrap();
                    assert!(z.len() as u64 <= l + CODE_LENGTH_SLACK);
                    let back = decode(&p, &z, n).unwrap();
                    assert_eq!(back, y);
                }
            }
        }
    }

    #[test]
    fn emission_is_prefix_monotone() {
        for p in families() {
            let y = bernoulli_pseudo(&rat(2, 7), 11, 3000).unwrap();
            let mut enc = Encoder::new(&p);
            let mut last = BitString::new();
            for b in y.iter() {
                enc.push(b).unwrap();
                assert!(last.is_prefix_of(&enc.stream().bits));
                last = enc.stream().bits.clone();
            }
        }
    }

    #[test]
    fn decode_is_monotone_exhaustively() {
        let p = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        for m in 0..=13 {
            for z in all_strings(m) {
                let d = decode(&p, &z, 64).unwrap();
                for b in [false, true] {
                    let mut longer = z.clone();
                    longer.push(b);
                    assert!(d.is_prefix_of(&decode(&p, &longer, 64).unwrap()));
                }
            }
        }
    }

    #[test]
    fn bernoulli_rate_regression() {
        let p = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        let y = bernoulli_pseudo(&rat(1, 3), 1, 100_000).unwrap();
        let s = encode(&p, &y).unwrap();
        // 33304 ones: −log₂ P(y) = 100000·log₂3 − 66696 ≈ 91800.25
        assert_eq!(ceil_neg_log2_prob(&p, &y).unwrap(), 91_801);
        assert!(s.committed() <= 91_801);
        let rate = s.committed() as f64 / 1e5;
        assert!((rate - 0.9183).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn curve_records_checkpoints() {
        let p = MeasureFamily::bernoulli(rat(1, 3)).unwrap();
        let src = crate::generators::BernoulliPseudo::new(rat(1, 3), 1).unwrap();
        let curve = code_length_curve(&p, &src, &[10, 100, 1000]).unwrap();
        assert_eq!(
            curve.points.iter().map(|q| q.n).collect::<Vec<_>>(),
            vec![10, 100, 1000]
        );
        for q in &curve.points {
            assert!(q.length() <= q.bound);
            assert!(q.code.len() as u64 <= q.bound + CODE_LENGTH_SLACK);
        }
        assert!(curve.max_step <= 4);
        assert!(curve.to_csv().starts_with("n,L_n,l_n,emitted\n10,"));
        assert!(code_length_curve(&p, &src, &[10, 10]).is_err());
    }
}
