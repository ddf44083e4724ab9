//! Binary words of length at most 16, Hamming metric, and immutable codes.
//!
//! Coordinate `i` of a word is bit `i` of its pattern. Coordinates are
//! rendered as single hex digits `0..f`, codewords as fixed-width hex
//! strings of the bit pattern.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 16;

const HEX: &[u8; 16] = b"0123456789abcdef";

fn check_len(length: usize) -> Result<()> {
    if (1..=MAX_LEN).contains(&length) {
        Ok(())
    } else {
        Err(Error::LengthOutOfRange(length))
    }
}

fn len_mask(length: usize) -> u32 {
    (1u32 << length) - 1
}

pub fn hex_digit(coord: usize) -> char {
    HEX[coord] as char
}

pub fn parse_hex_digit(c: char) -> Result<usize> {
    c.to_digit(16)
        .map(|d| d as usize)
        .ok_or_else(|| Error::Parse(format!("not a hex digit: {c:?}")))
}

/// A binary word with an explicit length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    len: u8,
    bits: u16,
}

impl Word {
    pub fn new(length: usize, bits: u32) -> Result<Self> {
        check_len(length)?;
        if bits & !len_mask(length) != 0 {
            return Err(Error::BitsOutOfRange { bits, length });
        }
        Ok(Word { len: length as u8, bits: bits as u16 })
    }

    pub fn zero(length: usize) -> Result<Self> {
        Word::new(length, 0)
    }

    pub fn from_coords(length: usize, coords: &[usize]) -> Result<Self> {
        check_len(length)?;
        let mut bits = 0u32;
        for &c in coords {
            if c >= length {
                return Err(Error::CoordinateOutOfRange { coord: c, length });
            }
            bits ^= 1 << c;
        }
        Word::new(length, bits)
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn coords(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..16).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn xor(self, other: Word) -> Result<Word> {
        same_len(self.len(), other.len())?;
        Ok(Word { len: self.len, bits: self.bits ^ other.bits })
    }

    pub fn to_hex(self) -> String {
        bits_to_hex(self.bits, self.len())
    }

    pub fn from_hex(length: usize, s: &str) -> Result<Self> {
        check_len(length)?;
        if s.len() != length.div_ceil(4) {
            return Err(Error::Parse(format!(
                "codeword {s:?} should have {} hex digits for length {length}",
                length.div_ceil(4)
            )));
        }
        let bits = u32::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Word::new(length, bits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub(crate) fn bits_to_hex(bits: u16, length: usize) -> String {
    format!("{:0width$x}", bits, width = length.div_ceil(4))
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left: a, right: b })
    }
}

pub fn weight(w: Word) -> u32 {
    w.weight()
}

pub fn distance(v: Word, w: Word) -> Result<u32> {
    Ok(v.xor(w)?.weight())
}

/// The four coordinates where `v` and `w` differ. They must be at distance 4.
pub fn diff_quadruple(v: Word, w: Word) -> Result<Quadruple> {
    let d = v.xor(w)?;
    if d.weight() != 4 {
        return Err(Error::NotDistanceFour(d.weight()));
    }
    Ok(Quadruple::from_mask(d.bits).expect("weight checked"))
}

/// Four distinct coordinates, ascending.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Quadruple([u8; 4]);

impl Quadruple {
    pub fn new(a: usize, b: usize, c: usize, d: usize) -> Result<Self> {
        let mut q = [a, b, c, d];
        q.sort_unstable();
        if q.windows(2).any(|p| p[0] == p[1]) || q[3] >= MAX_LEN {
            return Err(Error::InvalidQuadruple(format!("{a},{b},{c},{d}")));
        }
        Ok(Quadruple(q.map(|x| x as u8)))
    }

    pub fn from_mask(mask: u16) -> Option<Self> {
        if mask.count_ones() != 4 {
            return None;
        }
        let mut out = [0u8; 4];
        let mut k = 0;
        for i in 0..16u8 {
            if mask >> i & 1 == 1 {
                out[k] = i;
                k += 1;
            }
        }
        Some(Quadruple(out))
    }

    pub fn mask(self) -> u16 {
        self.0.iter().fold(0u16, |m, &i| m | 1 << i)
    }

    pub fn coords(self) -> [usize; 4] {
        self.0.map(|x| x as usize)
    }

    pub fn contains(self, c: usize) -> bool {
        self.0.iter().any(|&x| x as usize == c)
    }

    /// Number of coordinates in `0..8`.
    pub fn left_count(self) -> usize {
        self.0.iter().filter(|&&x| x < 8).count()
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            write!(f, "{}", hex_digit(c as usize))?;
        }
        Ok(())
    }
}

impl FromStr for Quadruple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<usize> = s.chars().map(parse_hex_digit).collect::<Result<_>>()?;
        match digits[..] {
            [a, b, c, d] => Quadruple::new(a, b, c, d),
            _ => Err(Error::InvalidQuadruple(s.to_string())),
        }
    }
}

pub type QuadrupleSet = BTreeSet<Quadruple>;

/// Parse a whitespace- or comma-separated list like `"0123 0145"`.
pub fn quadruple_set(s: &str) -> Result<QuadrupleSet> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

pub fn format_quadruples<'a>(qs: impl IntoIterator<Item = &'a Quadruple>) -> Vec<String> {
    qs.into_iter().map(ToString::to_string).collect()
}

/// An immutable binary code: sorted distinct words plus a membership bitmap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Code {
    length: u8,
    words: Vec<u16>,
    occupancy: Vec<u64>,
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Code")
            .field("length", &self.length)
            .field("size", &self.words.len())
            .finish()
    }
}

impl Code {
    pub fn new(length: usize, words: impl IntoIterator<Item = u16>) -> Result<Self> {
        check_len(length)?;
        let mask = len_mask(length);
        let mut ws: Vec<u16> = Vec::new();
        for w in words {
            if u32::from(w) & !mask != 0 {
                return Err(Error::BitsOutOfRange { bits: u32::from(w), length });
            }
            ws.push(w);
        }
        ws.sort_unstable();
        ws.dedup();
        Ok(Self::from_sorted(length, ws))
    }

    fn from_sorted(length: usize, words: Vec<u16>) -> Self {
        let mut occupancy = vec![0u64; (1usize << length).div_ceil(64)];
        for &w in &words {
            occupancy[w as usize >> 6] |= 1 << (w & 63);
        }
        Code { length: length as u8, words, occupancy }
    }

    pub fn from_words(length: usize, words: &[Word]) -> Result<Self> {
        for w in words {
            same_len(length, w.len())?;
        }
        Code::new(length, words.iter().map(|w| w.bits))
    }

    pub fn length(&self) -> usize {
        self.length as usize
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sorted codeword bit patterns.
    pub fn words(&self) -> &[u16] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = Word> + '_ {
        let len = self.length;
        self.words.iter().map(move |&bits| Word { len, bits })
    }

    #[inline]
    pub fn contains_bits(&self, bits: u16) -> bool {
        let i = bits as usize;
        i >> 6 < self.occupancy.len() && self.occupancy[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn contains(&self, w: Word) -> bool {
        w.len() == self.length() && self.contains_bits(w.bits)
    }

    pub fn occupancy(&self) -> &[u64] {
        &self.occupancy
    }

    pub fn translate(&self, x: Word) -> Result<Code> {
        same_len(self.length(), x.len())?;
        Ok(self.translate_bits(x.bits))
    }

    pub fn translate_bits(&self, x: u16) -> Code {
        let mut ws: Vec<u16> = self.words.iter().map(|w| w ^ x).collect();
        ws.sort_unstable();
        Self::from_sorted(self.length(), ws)
    }

    /// Delete coordinate `i`; higher coordinates shift down by one.
    pub fn puncture(&self, i: usize) -> Result<Code> {
        let n = self.length();
        if i >= n {
            return Err(Error::CoordinateOutOfRange { coord: i, length: n });
        }
        if n == 1 {
            return Err(Error::LengthOutOfRange(0));
        }
        let low = (1u16 << i) - 1;
        Code::new(n - 1, self.words.iter().map(|&w| (w & low) | ((w >> 1) & !low)))
    }

    /// Append an overall parity coordinate.
    pub fn extend_parity(&self) -> Result<Code> {
        let n = self.length();
        if n >= MAX_LEN {
            return Err(Error::LengthOutOfRange(n + 1));
        }
        Code::new(n + 1, self.words.iter().map(|&w| w | ((w.count_ones() as u16 & 1) << n)))
    }

    /// Apply a coordinate permutation: coordinate `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Code> {
        check_permutation(perm, self.length())?;
        Ok(Code::new(self.length(), self.words.iter().map(|&w| permute_bits(w, perm)))
            .expect("permutation preserves length"))
    }

    pub fn min_distance(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (i, &a) in self.words.iter().enumerate() {
            for &b in &self.words[i + 1..] {
                let d = (a ^ b).count_ones();
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
        best
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            length: self.length(),
            codewords: self.words.iter().map(|&w| bits_to_hex(w, self.length())).collect(),
        }
    }

    pub fn from_json(j: &CodeJson) -> Result<Code> {
        let words: Vec<Word> = j
            .codewords
            .iter()
            .map(|s| Word::from_hex(j.length, s))
            .collect::<Result<_>>()?;
        Code::from_words(j.length, &words)
    }
}

/// On-disk code format: `{ "length": n, "codewords": ["00ff", ...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub length: usize,
    pub codewords: Vec<String>,
}

pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("expected {n} entries, got {}", perm.len())));
    }
    let mut seen = 0u32;
    for &p in perm {
        if p >= n || seen >> p & 1 == 1 {
            return Err(Error::InvalidPermutation(format!("{perm:?}")));
        }
        seen |= 1 << p;
    }
    Ok(())
}

#[inline]
pub fn permute_bits(w: u16, perm: &[usize]) -> u16 {
    let mut out = 0u16;
    let mut rest = w;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        out |= 1 << perm[i];
        rest &= rest - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w16(bits: u32) -> Word {
        Word::new(16, bits).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(weight(w16(0)), 0);
        assert_eq!(weight(w16(0xffff)), 16);
        assert_eq!(weight(Word::from_coords(16, &[0, 1, 2, 3]).unwrap()), 4);
    }

    #[test]
    fn distances() {
        let v = Word::from_coords(16, &[0, 1]).unwrap();
        let w = Word::from_coords(16, &[2, 3]).unwrap();
        assert_eq!(distance(v, v).unwrap(), 0);
        assert_eq!(distance(w16(0), w16(0b1111)).unwrap(), 4);
        assert_eq!(distance(v, w).unwrap(), 4);
        assert!(matches!(
            distance(v, Word::zero(8).unwrap()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn quadruple_of_difference() {
        let q = Quadruple::new(0, 1, 2, 3).unwrap();
        assert_eq!(diff_quadruple(w16(0), w16(0b1111)).unwrap(), q);
        let v = Word::from_coords(16, &[0, 1]).unwrap();
        let w = Word::from_coords(16, &[2, 3]).unwrap();
        assert_eq!(diff_quadruple(v, w).unwrap(), q);
        assert!(matches!(
            diff_quadruple(w16(0), w16(0b11)),
            Err(Error::NotDistanceFour(2))
        ));
    }

    #[test]
    fn quadruple_text() {
        let q: Quadruple = "cdef".parse().unwrap();
        assert_eq!(q.coords(), [12, 13, 14, 15]);
        assert_eq!(q.to_string(), "cdef");
        assert!("0012".parse::<Quadruple>().is_err());
        assert!("012".parse::<Quadruple>().is_err());
        assert_eq!(Quadruple::from_mask(q.mask()), Some(q));
    }

    #[test]
    fn word_bits_must_fit() {
        assert!(Word::new(4, 0x10).is_err());
        assert!(Word::new(17, 0).is_err());
        assert_eq!(Word::from_hex(16, "00ff").unwrap().bits(), 0xff);
        assert_eq!(Word::from_hex(7, "7f").unwrap().weight(), 7);
        assert!(Word::from_hex(7, "ff").is_err());
    }

    #[test]
    fn translate_basics() {
        let c = Code::new(8, (0..16u16).map(|x| x * 3)).unwrap();
        let zero = Word::zero(8).unwrap();
        let x = Word::new(8, 0x55).unwrap();
        assert_eq!(c.translate(zero).unwrap(), c);
        assert_eq!(c.translate(x).unwrap().translate(x).unwrap(), c);
        assert_eq!(c.translate(x).unwrap().len(), 16);
        assert!(c.translate(Word::zero(7).unwrap()).is_err());
    }

    #[test]
    fn puncture_and_extend() {
        let single = Code::new(16, [0x1234]).unwrap();
        assert_eq!(single.puncture(3).unwrap().len(), 1);
        assert!(matches!(
            single.puncture(16),
            Err(Error::CoordinateOutOfRange { coord: 16, length: 16 })
        ));
        let zero = Code::new(3, [0]).unwrap();
        assert_eq!(zero.extend_parity().unwrap(), Code::new(4, [0]).unwrap());
        let c = Code::new(5, [0b00111, 0b11000, 0b10101]).unwrap();
        let e = c.extend_parity().unwrap();
        assert!(e.words().iter().all(|w| w.count_ones() % 2 == 0));
        assert_eq!(e.puncture(5).unwrap(), c);
        assert!(Code::new(16, [0]).unwrap().extend_parity().is_err());
    }

    #[test]
    fn puncture_drops_the_right_coordinate() {
        let c = Code::new(4, [0b1010]).unwrap();
        assert_eq!(c.puncture(1).unwrap().words(), &[0b100]);
        assert_eq!(c.puncture(0).unwrap().words(), &[0b101]);
    }

    #[test]
    fn json_shape() {
        let c = Code::new(16, [0x00ff, 0]).unwrap();
        let j = c.to_json();
        assert_eq!(j.codewords, vec!["0000", "00ff"]);
        assert_eq!(Code::from_json(&j).unwrap(), c);
    }

    proptest! {
        #[test]
        fn metric_axioms(a in 0u32..65536, b in 0u32..65536, c in 0u32..65536) {
            let (a, b, c) = (w16(a), w16(b), w16(c));
            let ab = distance(a, b).unwrap();
            prop_assert_eq!(ab, distance(b, a).unwrap());
            prop_assert!(distance(a, c).unwrap() <= ab + distance(b, c).unwrap());
            prop_assert_eq!(weight(a.xor(b).unwrap()), ab);
            if ab == 4 {
                prop_assert_eq!(diff_quadruple(a, b).unwrap(), diff_quadruple(b, a).unwrap());
            }
        }

        #[test]
        fn occupancy_matches_members(ws in proptest::collection::vec(0u16..4096, 0..200)) {
            let c = Code::new(12, ws.clone()).unwrap();
            for x in 0..4096u16 {
                prop_assert_eq!(c.contains_bits(x), ws.contains(&x));
            }
            prop_assert!(c.words().windows(2).all(|p| p[0] < p[1]));
        }
    }
}
