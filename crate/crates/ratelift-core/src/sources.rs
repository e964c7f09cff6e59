//! Finite bit strings, seeded test sources, and bounded-prefix oracles.
//!
//! All indexing on this module's public surface is 1-based: `x.bit(1)` is the
//! first bit and `x.substring(n1, n2)` has length `n2 - n1 + 1`. This matches
//! the usual prefix notation `x(1:n)` and keeps every interface in the crate
//! off-by-one free with respect to it.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A finite binary string. Immutable once built; cheap to clone at the sizes
/// this crate works with (one byte per bit).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    /// Builds from 0/1 values; anything nonzero counts as 1.
    pub fn from_bits<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        BitString {
            bits: iter.into_iter().map(|b| (b != 0) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The `i`-th bit, 1-based.
    ///
    /// Panics if `i` is 0 or past the end; use [`BitString::substring`] for
    /// checked access.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.bits.len(), "bit index {i} out of range");
        self.bits[i - 1]
    }

    /// The substring from position `n1` to `n2` inclusive, 1-based.
    /// Returns `None` unless `1 <= n1 <= n2 <= len`.
    pub fn substring(&self, n1: usize, n2: usize) -> Option<BitString> {
        if n1 >= 1 && n1 <= n2 && n2 <= self.bits.len() {
            Some(BitString {
                bits: self.bits[n1 - 1..n2].to_vec(),
            })
        } else {
            None
        }
    }

    /// The prefix `x(1:n)`; `n = 0` gives the empty string.
    pub fn prefix(&self, n: usize) -> Option<BitString> {
        if n == 0 {
            Some(BitString::new())
        } else {
            self.substring(1, n)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: u8) {
        self.bits.push((bit != 0) as u8);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn truncated(&self, len: usize) -> BitString {
        BitString {
            bits: self.bits[..self.bits.len().min(len)].to_vec(),
        }
    }

    /// Interprets the whole string as an unsigned integer, first bit most
    /// significant. Panics beyond 63 bits; table indices never get near that.
    pub fn index_value(&self) -> u64 {
        assert!(self.bits.len() <= 63, "bit string too long for an index");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// The `width` low bits of `value` as a bit string, most significant
    /// bit first.
    pub fn from_index(value: u64, width: usize) -> BitString {
        assert!(width <= 64);
        BitString {
            bits: (0..width)
                .rev()
                .map(|i| ((value >> i) & 1) as u8)
                .collect(),
        }
    }

    /// Every `period`-th bit starting at position 1 (positions ≡ 1 mod
    /// `period`). Inverse of [`zero_dilute`] on its image.
    pub fn take_every(&self, period: usize) -> BitString {
        assert!(period >= 1);
        BitString {
            bits: self.bits.iter().copied().step_by(period).collect(),
        }
    }

    /// Packs into bytes, 8 bits per byte, first bit in the most significant
    /// position of byte 0. Returns the bytes and the number of zero padding
    /// bits added to fill the last byte.
    pub fn pack_msb(&self) -> (Vec<u8>, u32) {
        let mut bytes = Vec::with_capacity(self.bits.len().div_ceil(8));
        let mut cur = 0u8;
        let mut used = 0u32;
        for &b in &self.bits {
            cur = (cur << 1) | b;
            used += 1;
            if used == 8 {
                bytes.push(cur);
                cur = 0;
                used = 0;
            }
        }
        let padding = if used == 0 { 0 } else { 8 - used };
        if used > 0 {
            bytes.push(cur << padding);
        }
        (bytes, padding)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        load_bits(s)
    }
}

/// Error from [`load_bits`]: the offending position is 1-based over the
/// input characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseBitsError {
    Empty,
    BadCharacter { position: usize, found: char },
}

impl fmt::Display for ParseBitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseBitsError::Empty => write!(f, "empty bit string"),
            ParseBitsError::BadCharacter { position, found } => write!(
                f,
                "invalid character {found:?} at position {position} (expected '0' or '1')"
            ),
        }
    }
}

/// Parses a nonempty string of '0'/'1' characters.
pub fn load_bits(text: &str) -> Result<BitString, ParseBitsError> {
    if text.is_empty() {
        return Err(ParseBitsError::Empty);
    }
    let mut bits = Vec::with_capacity(text.len());
    for (idx, ch) in text.chars().enumerate() {
        match ch {
            '0' => bits.push(0),
            '1' => bits.push(1),
            _ => {
                return Err(ParseBitsError::BadCharacter {
                    position: idx + 1,
                    found: ch,
                })
            }
        }
    }
    Ok(BitString { bits })
}

/// Error for source constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceError {
    /// Dilution period must be at least 2.
    BadPeriod(usize),
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceError::BadPeriod(p) => {
                write!(f, "dilution period must be >= 2, got {p}")
            }
        }
    }
}

/// Spreads `x` out by a factor of `period`: output position `(j-1)*period + 1`
/// carries bit `j` of `x`, every other position is 0. With `period = 2` this
/// is the classic zero-insertion `x1 0 x2 0 ...`, which dilutes the
/// randomness rate of the input by half; general periods target rate ≈
/// `1/period`.
pub fn zero_dilute(x: &BitString, period: usize) -> Result<BitString, SourceError> {
    if period < 2 {
        return Err(SourceError::BadPeriod(period));
    }
    let mut bits = alloc::vec![0u8; x.len() * period];
    for (j, b) in x.iter().enumerate() {
        bits[j * period] = b;
    }
    Ok(BitString { bits })
}

/// Deterministic pseudorandom bits: ChaCha8 seeded via `seed_from_u64`, bytes
/// taken in stream order, bits taken most-significant-first within each byte.
/// A pure function of `(seed, len_bits)`; distinct seeds are treated as
/// independent for experiment purposes.
pub fn seeded_source(seed: u64, len_bits: usize) -> BitString {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = alloc::vec![0u8; len_bits.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    let bits = (0..len_bits)
        .map(|i| (bytes[i / 8] >> (7 - (i % 8))) & 1)
        .collect();
    BitString { bits }
}

/// How a test source is produced: a seeded generator, optionally wrapped in
/// zero-dilution stages.
///
/// Text form: `seed:<u64>,len:<bits>` optionally followed by `|dilute:<p>`
/// stages, applied left to right. `seed:7,len:1024|dilute:2` is a 2048-bit
/// string of estimated rate ≈ 1/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Seeded { seed: u64, len: usize },
    Dilute { period: usize, inner: Box<GeneratorSpec> },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<BitString, SourceError> {
        match self {
            GeneratorSpec::Seeded { seed, len } => Ok(seeded_source(*seed, *len)),
            GeneratorSpec::Dilute { period, inner } => {
                let base = inner.generate()?;
                zero_dilute(&base, *period)
            }
        }
    }

    /// Total number of bits the spec produces.
    pub fn output_len(&self) -> usize {
        match self {
            GeneratorSpec::Seeded { len, .. } => *len,
            GeneratorSpec::Dilute { period, inner } => inner.output_len() * period,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Seeded { seed, len } => write!(f, "seed:{seed},len:{len}"),
            GeneratorSpec::Dilute { period, inner } => write!(f, "{inner}|dilute:{period}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseSpecError {
    pub message: String,
}

impl fmt::Display for ParseSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid generator spec: {}", self.message)
    }
}

impl FromStr for GeneratorSpec {
    type Err = ParseSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn err(msg: &str) -> ParseSpecError {
            ParseSpecError {
                message: String::from(msg),
            }
        }
        let mut stages = s.split('|');
        let head = stages.next().ok_or_else(|| err("empty spec"))?;
        let (seed_part, len_part) = head
            .split_once(',')
            .ok_or_else(|| err("expected `seed:<int>,len:<int>`"))?;
        let seed = seed_part
            .strip_prefix("seed:")
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| err("expected `seed:<int>`"))?;
        let len = len_part
            .strip_prefix("len:")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| err("expected `len:<int>`"))?;
        let mut spec = GeneratorSpec::Seeded { seed, len };
        for stage in stages {
            let period = stage
                .strip_prefix("dilute:")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| err("expected `dilute:<period>` stage"))?;
            if period < 2 {
                return Err(err("dilution period must be >= 2"));
            }
            spec = GeneratorSpec::Dilute {
                period,
                inner: Box::new(spec),
            };
        }
        Ok(spec)
    }
}

/// Error from [`OracleSource::read`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// Requires `1 <= n1 <= n2`.
    BadRange { n1: usize, n2: usize },
    /// Read past the end of the source.
    OutOfRange { n1: usize, n2: usize, available: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BadRange { n1, n2 } => {
                write!(f, "invalid read range ({n1}, {n2}): need 1 <= n1 <= n2")
            }
            OracleError::OutOfRange { n1, n2, available } => write!(
                f,
                "read ({n1}, {n2}) out of range: source has only {available} bits"
            ),
        }
    }
}

/// A bounded-prefix oracle over a bit string. Tracks the high-water mark of
/// the largest index ever read, which is how the query bound of an oracle
/// reduction is audited.
#[derive(Debug, Clone)]
pub struct OracleSource {
    bits: BitString,
    queries_served: usize,
}

impl OracleSource {
    pub fn new(bits: BitString) -> Self {
        OracleSource {
            bits,
            queries_served: 0,
        }
    }

    pub fn from_spec(spec: &GeneratorSpec) -> Result<Self, SourceError> {
        Ok(OracleSource::new(spec.generate()?))
    }

    pub fn available_len(&self) -> usize {
        self.bits.len()
    }

    /// Largest index served so far; never decreases.
    pub fn queries_served(&self) -> usize {
        self.queries_served
    }

    /// Returns `x(n1:n2)` and raises the high-water mark to at least `n2`.
    pub fn read(&mut self, n1: usize, n2: usize) -> Result<BitString, OracleError> {
        if n1 < 1 || n1 > n2 {
            return Err(OracleError::BadRange { n1, n2 });
        }
        match self.bits.substring(n1, n2) {
            Some(s) => {
                self.queries_served = self.queries_served.max(n2);
                Ok(s)
            }
            None => Err(OracleError::OutOfRange {
                n1,
                n2,
                available: self.bits.len(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn load_bits_examples() {
        let b = load_bits("0110").unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(load_bits("1").unwrap().len(), 1);
        assert_eq!(
            load_bits("01a"),
            Err(ParseBitsError::BadCharacter {
                position: 3,
                found: 'a'
            })
        );
        assert_eq!(load_bits(""), Err(ParseBitsError::Empty));
    }

    #[test]
    fn one_based_indexing() {
        let b = load_bits("0110").unwrap();
        assert_eq!(b.bit(1), 0);
        assert_eq!(b.bit(2), 1);
        assert_eq!(b.substring(2, 3).unwrap().to_string(), "11");
        assert_eq!(b.substring(2, 3).unwrap().len(), 2);
        assert!(b.substring(0, 2).is_none());
        assert!(b.substring(3, 5).is_none());
    }

    #[test]
    fn dilute_examples() {
        let x = load_bits("101").unwrap();
        assert_eq!(zero_dilute(&x, 2).unwrap().to_string(), "100010");
        let x = load_bits("1").unwrap();
        assert_eq!(zero_dilute(&x, 2).unwrap().to_string(), "10");
        let x = load_bits("11").unwrap();
        assert_eq!(zero_dilute(&x, 4).unwrap().to_string(), "10001000");
        assert_eq!(zero_dilute(&x, 1), Err(SourceError::BadPeriod(1)));
    }

    #[test]
    fn dilute_round_trip() {
        let x = seeded_source(3, 100);
        for p in 2..5 {
            let d = zero_dilute(&x, p).unwrap();
            assert_eq!(d.len(), p * x.len());
            assert_eq!(d.take_every(p), x);
        }
    }

    #[test]
    fn seeded_source_is_pure() {
        assert_eq!(seeded_source(7, 8), seeded_source(7, 8));
        assert_eq!(seeded_source(7, 0).len(), 0);
        assert_ne!(seeded_source(7, 64), seeded_source(8, 64));
        // prefix consistency of the byte/bit layout
        let long = seeded_source(7, 64);
        let short = seeded_source(7, 17);
        assert_eq!(long.prefix(17).unwrap(), short);
    }

    #[test]
    fn oracle_reads() {
        let mut src = OracleSource::new(load_bits("0110").unwrap());
        assert_eq!(src.read(2, 3).unwrap().to_string(), "11");
        assert_eq!(src.queries_served(), 3);
        assert_eq!(src.read(1, 1).unwrap().to_string(), "0");
        assert_eq!(src.queries_served(), 3, "high-water mark never decreases");
        assert_eq!(
            src.read(3, 9),
            Err(OracleError::OutOfRange {
                n1: 3,
                n2: 9,
                available: 4
            })
        );
        assert_eq!(src.read(0, 2), Err(OracleError::BadRange { n1: 0, n2: 2 }));
    }

    #[test]
    fn generator_spec_round_trip() {
        let spec: GeneratorSpec = "seed:7,len:16|dilute:2".parse().unwrap();
        assert_eq!(spec.to_string(), "seed:7,len:16|dilute:2");
        assert_eq!(spec.output_len(), 32);
        let bits = spec.generate().unwrap();
        assert_eq!(bits.len(), 32);
        assert_eq!(bits.take_every(2), seeded_source(7, 16));
        assert!("seed:x,len:2".parse::<GeneratorSpec>().is_err());
        assert!("seed:1,len:2|dilute:1".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn packing_layout() {
        let b = load_bits("10000001").unwrap();
        let (bytes, pad) = b.pack_msb();
        assert_eq!((bytes, pad), (alloc::vec![0x81], 0));
        let b = load_bits("101").unwrap();
        let (bytes, pad) = b.pack_msb();
        assert_eq!((bytes, pad), (alloc::vec![0b1010_0000], 5));
    }

    #[test]
    fn index_value_msb_first() {
        assert_eq!(load_bits("01").unwrap().index_value(), 1);
        assert_eq!(load_bits("10").unwrap().index_value(), 2);
        assert_eq!(load_bits("11").unwrap().index_value(), 3);
        assert_eq!(BitString::from_index(2, 2).to_string(), "10");
        assert_eq!(BitString::from_index(5, 4).to_string(), "0101");
    }
}
