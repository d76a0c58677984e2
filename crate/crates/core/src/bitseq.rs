//! Finite binary strings and indexed sequence sources.
//!
//! Bits are addressed 1-based: `s.get(1)` is the first bit, matching the
//! usual `x_1 x_2 ...` notation for elements of the Cantor space. Storage is
//! packed 64 bits per word, so a 10^8-bit string occupies about 12.5 MB.
//!
//! Two interchange formats are supported:
//!
//! * text: `'0'` / `'1'` characters, whitespace ignored;
//! * packed: an 8-byte little-endian bit length followed by the bits,
//!   most significant bit first within each byte, zero padded.

use std::fmt;
use std::str::FromStr;

use crate::descriptor::Record;
use crate::error::{Error, Result};

const WORD: usize = 64;

/// An immutable-by-convention finite binary string.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    /// `n` copies of `bit`.
    pub fn filled(bit: bool, n: usize) -> Self {
        let fill = if bit { u64::MAX } else { 0 };
        let mut words = vec![fill; n.div_ceil(WORD)];
        if bit && !n.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (n % WORD)) - 1;
            }
        }
        BitString { words, len: n }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len % WORD;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().expect("word allocated above") |= 1u64 << offset;
        }
        self.len += 1;
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    /// Bit `i`, 1-indexed.
    ///
    /// Panics if `i` is 0 or exceeds the length.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i >= 1 && i <= self.len,
            "bit index {i} out of range 1..={}",
            self.len
        );
        self.get0(i - 1)
    }

    #[inline]
    pub(crate) fn get0(&self, j: usize) -> bool {
        (self.words[j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn iter(&self) -> Bits<'_> {
        Bits { s: self, next: 0 }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Bits `start..=end`, 1-indexed and inclusive. `slice(1, 0)` is empty.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitString> {
        if start == 0 || end > self.len || start > end + 1 {
            return Err(Error::domain(format!(
                "slice {start}..={end} out of range for length {}",
                self.len
            )));
        }
        let mut out = BitString::with_capacity(end + 1 - start);
        for j in start - 1..end {
            out.push(self.get0(j));
        }
        Ok(out)
    }

    /// The first `min(n, len)` bits.
    pub fn prefix(&self, n: usize) -> BitString {
        let n = n.min(self.len);
        let mut words = self.words[..n.div_ceil(WORD)].to_vec();
        if !n.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (n % WORD)) - 1;
            }
        }
        BitString { words, len: n }
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && other.prefix(self.len) == *self
    }

    /// Bitwise negation.
    pub fn complement(&self) -> BitString {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if !self.len.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (self.len % WORD)) - 1;
            }
        }
        BitString {
            words,
            len: self.len,
        }
    }

    /// Parses the text format. Whitespace is ignored; any other character
    /// apart from '0' and '1' is rejected with its character position.
    pub fn from_text(t: &str) -> Result<BitString> {
        let mut out = BitString::with_capacity(t.len());
        for (position, c) in t.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                c if c.is_whitespace() => {}
                found => return Err(Error::Format { position, found }),
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.len.div_ceil(8));
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
        let mut byte = 0u8;
        for (j, b) in self.iter().enumerate() {
            if b {
                byte |= 0x80 >> (j % 8);
            }
            if j % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if !self.len.is_multiple_of(8) {
            out.push(byte);
        }
        out
    }

    pub fn from_packed(data: &[u8]) -> Result<BitString> {
        let header: [u8; 8] = data
            .get(..8)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::Packed("missing 8-byte length header".into()))?;
        let len = usize::try_from(u64::from_le_bytes(header))
            .map_err(|_| Error::Packed("length does not fit in memory".into()))?;
        let body = &data[8..];
        if body.len() != len.div_ceil(8) {
            return Err(Error::Packed(format!(
                "expected {} payload bytes for {len} bits, found {}",
                len.div_ceil(8),
                body.len()
            )));
        }
        let mut out = BitString::with_capacity(len);
        for j in 0..len {
            out.push(body[j / 8] & (0x80 >> (j % 8)) != 0);
        }
        if len % 8 != 0 && body[len / 8] & (0xFFu8 >> (len % 8)) != 0 {
            return Err(Error::Packed("nonzero padding bits".into()));
        }
        Ok(out)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut out = BitString::with_capacity(iter.size_hint().0);
        for b in iter {
            out.push(b);
        }
        out
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitString::from_text(s)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({:?})", self.to_text())
        } else {
            write!(
                f,
                "BitString({:?}.., len={})",
                self.prefix(64).to_text(),
                self.len
            )
        }
    }
}

pub struct Bits<'a> {
    s: &'a BitString,
    next: usize,
}

impl Iterator for Bits<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.next >= self.s.len {
            return None;
        }
        let b = self.s.get0(self.next);
        self.next += 1;
        Some(b)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.s.len - self.next;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Bits<'_> {}

/// A deterministic infinite binary sequence, queried by 1-based index.
pub trait SequenceSource: Send + Sync {
    /// Bit `i` for `i ≥ 1`. Repeated queries agree.
    fn bit_at(&self, i: u64) -> Result<bool>;

    /// The first `n` bits. Implementations may override this with a faster
    /// sequential construction; the result must agree with `bit_at`.
    fn prefix(&self, n: usize) -> Result<BitString> {
        let mut out = BitString::with_capacity(n);
        for i in 1..=n as u64 {
            out.push(self.bit_at(i)?);
        }
        Ok(out)
    }

    /// Parameter record sufficient to rebuild this source.
    fn descriptor(&self) -> Record;
}

/// `src_1^n`.
pub fn prefix(src: &dyn SequenceSource, n: usize) -> Result<BitString> {
    src.prefix(n)
}

pub fn from_text(t: &str) -> Result<BitString> {
    BitString::from_text(t)
}

pub fn count_ones(s: &BitString) -> usize {
    s.count_ones()
}
