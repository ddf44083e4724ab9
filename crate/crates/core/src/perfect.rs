//! 1-perfect codes of length 7 and extended 1-perfect codes of length 8 and 16.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::words::Code;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Plain,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PerfectCode {
    pub code: Code,
    pub flavor: Flavor,
}

impl PerfectCode {
    pub fn code(&self) -> &Code {
        &self.code
    }
}

/// The linear Hamming code of length 7: parity-check column of coordinate `i` is `i + 1` in binary.
pub fn hamming7() -> PerfectCode {
    let code = Code::new(
        7,
        (0u16..128).filter(|&x| (0..7).filter(|i| x >> i & 1 == 1).fold(0, |s, i| s ^ (i + 1)) == 0),
    )
    .expect("length 7");
    PerfectCode { code, flavor: Flavor::Plain }
}

/// The extended Hamming code of length 8.
pub fn hamming8() -> PerfectCode {
    PerfectCode {
        code: hamming7().code.extend_parity().expect("length 8"),
        flavor: Flavor::Extended,
    }
}

/// Radius-1 balls around the codewords tile the ambient space exactly.
/// Valid for lengths `2^r - 1`, `r` in 2..=4.
pub fn is_perfect(c: &Code) -> Result<bool> {
    let n = c.length();
    if !matches!(n, 3 | 7 | 15) {
        return Err(Error::UnsupportedLength(n));
    }
    if c.len() != (1usize << n) / (n + 1) {
        return Ok(false);
    }
    let mut hit = vec![0u64; (1usize << n).div_ceil(64)];
    for &w in c.words() {
        for flip in std::iter::once(0u16).chain((0..n).map(|i| 1u16 << i)) {
            let x = (w ^ flip) as usize;
            let bit = 1u64 << (x & 63);
            if hit[x >> 6] & bit != 0 {
                return Ok(false);
            }
            hit[x >> 6] |= bit;
        }
    }
    Ok(true)
}

/// All weights even and every puncturing is a 1-perfect code.
pub fn is_extended_perfect(c: &Code) -> Result<bool> {
    let n = c.length();
    if !matches!(n, 4 | 8 | 16) {
        return Err(Error::UnsupportedLength(n));
    }
    if c.words().iter().any(|w| w.count_ones() % 2 == 1) {
        return Ok(false);
    }
    for i in 0..n {
        if !is_perfect(&c.puncture(i)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `dim`-dimensional subspace of `F_2^n`, as reduced bases.
///
/// A basis vector's highest set bit is its pivot; no other basis vector has
/// that bit, so each subspace appears exactly once.
pub fn subspaces(n: usize, dim: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(dim);
    choose_pivots(n, dim, 0, &mut pivots, &mut out);
    out
}

fn choose_pivots(n: usize, dim: usize, from: usize, pivots: &mut Vec<usize>, out: &mut Vec<Vec<u16>>) {
    if pivots.len() == dim {
        let pivot_mask: u16 = pivots.iter().fold(0, |m, &p| m | 1 << p);
        let free: Vec<Vec<usize>> = pivots
            .iter()
            .map(|&p| (0..p).filter(|i| pivot_mask >> i & 1 == 0).collect())
            .collect();
        let total_free: usize = free.iter().map(Vec::len).sum();
        for assignment in 0u32..(1 << total_free) {
            let mut k = 0;
            let basis = pivots
                .iter()
                .zip(&free)
                .map(|(&p, fs)| {
                    let mut v = 1u16 << p;
                    for &f in fs {
                        if assignment >> k & 1 == 1 {
                            v |= 1 << f;
                        }
                        k += 1;
                    }
                    v
                })
                .collect();
            out.push(basis);
        }
        return;
    }
    for p in from..n {
        pivots.push(p);
        choose_pivots(n, dim, p + 1, pivots, out);
        pivots.pop();
    }
}

pub(crate) fn span(basis: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16];
    for &b in basis {
        let more: Vec<u16> = out.iter().map(|x| x ^ b).collect();
        out.extend(more);
    }
    out
}

/// Every 1-perfect code of length 7, each once, in canonical order.
///
/// Zero-containing codes are the 4-dimensional subspaces of minimum weight 3;
/// everything else is a translate of one of them.
pub fn enumerate_perfect7() -> Vec<PerfectCode> {
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut codes: Vec<Code> = Vec::new();
    for basis in subspaces(7, 4) {
        let words = span(&basis);
        if words.iter().any(|&w| w != 0 && w.count_ones() < 3) {
            continue;
        }
        let linear = Code::new(7, words).expect("length 7");
        for x in 0u16..128 {
            let c = linear.translate_bits(x);
            if seen.insert(c.words().to_vec()) {
                codes.push(c);
            }
        }
    }
    codes.sort_by(|a, b| a.words().cmp(b.words()));
    codes.into_iter().map(|code| PerfectCode { code, flavor: Flavor::Plain }).collect()
}
