//! Kernel, rank and coset machinery for codes of length at most 16.

use crate::error::{Error, Result};
use crate::words::{Code, Word};

/// A linear subspace of `F_2^n` kept as a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSpan {
    length: usize,
    /// `pivots[b]` is the basis vector whose highest bit is `b`, or 0.
    pivots: [u16; 16],
}

impl LinearSpan {
    pub fn zero(length: usize) -> Self {
        LinearSpan { length, pivots: [0; 16] }
    }

    pub fn from_vectors(length: usize, vectors: impl IntoIterator<Item = u16>) -> Self {
        let mut s = LinearSpan::zero(length);
        for v in vectors {
            s.insert(v);
        }
        s.reduce();
        s
    }

    /// Add a vector; returns false when it was already in the span.
    pub fn insert(&mut self, v: u16) -> bool {
        let r = self.residue(v);
        if r == 0 {
            return false;
        }
        self.pivots[15 - r.leading_zeros() as usize] = r;
        true
    }

    fn residue(&self, mut v: u16) -> u16 {
        while v != 0 {
            let b = 15 - v.leading_zeros() as usize;
            if self.pivots[b] == 0 {
                break;
            }
            v ^= self.pivots[b];
        }
        v
    }

    fn reduce(&mut self) {
        for b in 0..16 {
            let p = self.pivots[b];
            if p == 0 {
                continue;
            }
            for hi in b + 1..16 {
                if self.pivots[hi] >> b & 1 == 1 {
                    self.pivots[hi] ^= p;
                }
            }
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.pivots.iter().filter(|&&p| p != 0).count()
    }

    pub fn basis(&self) -> Vec<u16> {
        self.pivots.iter().copied().filter(|&p| p != 0).collect()
    }

    pub fn contains(&self, v: u16) -> bool {
        self.residue(v) == 0
    }

    pub fn elements(&self) -> Vec<u16> {
        crate::perfect::span(&self.basis())
    }

    pub fn is_subspace_of(&self, other: &LinearSpan) -> bool {
        self.basis().iter().all(|&b| other.contains(b))
    }
}

/// Codewords `x` with `x + C = C`. Requires `0` in the code.
pub fn kernel(c: &Code) -> Result<LinearSpan> {
    if !c.contains_bits(0) {
        return Err(Error::ZeroNotInCode);
    }
    let mut k = LinearSpan::zero(c.length());
    for &x in c.words() {
        if x == 0 || k.contains(x) {
            continue;
        }
        if c.words().iter().all(|&w| c.contains_bits(w ^ x)) {
            k.insert(x);
        }
    }
    k.reduce();
    Ok(k)
}

/// Dimension of the linear span of a code containing `0`.
pub fn rank(c: &Code) -> Result<usize> {
    if !c.contains_bits(0) {
        return Err(Error::ZeroNotInCode);
    }
    let mut s = LinearSpan::zero(c.length());
    for &w in c.words() {
        s.insert(w);
        if s.dimension() == c.length() {
            break;
        }
    }
    Ok(s.dimension())
}

/// Every `x` in `L` satisfies `x + C = C`.
pub fn inside_kernel(c: &Code, l: &LinearSpan) -> bool {
    l.basis()
        .iter()
        .all(|&x| c.words().iter().all(|&w| c.contains_bits(w ^ x)))
}

/// Classes `v + L` of a code modulo a subspace of its kernel.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub subspace: LinearSpan,
    /// Lexicographically least member of each class, ascending.
    pub representatives: Vec<u16>,
    index: Vec<u32>,
}

impl CosetDecomposition {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn coset_of(&self, w: u16) -> Option<usize> {
        match self.index[w as usize] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn members(&self, coset: usize) -> Vec<u16> {
        let r = self.representatives[coset];
        let mut m: Vec<u16> = self.subspace.elements().iter().map(|l| l ^ r).collect();
        m.sort_unstable();
        m
    }
}

pub fn cosets(c: &Code, l: &LinearSpan) -> Result<CosetDecomposition> {
    if l.length() != c.length() {
        return Err(Error::LengthMismatch { left: c.length(), right: l.length() });
    }
    if !inside_kernel(c, l) {
        return Err(Error::NotInKernel);
    }
    let elems = l.elements();
    let mut index = vec![u32::MAX; 1 << c.length()];
    let mut reps = Vec::new();
    for &w in c.words() {
        if index[w as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(w);
        for &e in &elems {
            index[(w ^ e) as usize] = id;
        }
    }
    Ok(CosetDecomposition { subspace: l.clone(), representatives: reps, index })
}

/// All subspaces of index 2 in `k`.
pub fn index2_subspaces(k: &LinearSpan) -> Result<Vec<LinearSpan>> {
    let basis = k.basis();
    let d = basis.len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut out = Vec::with_capacity((1 << d) - 1);
    for f in 1u32..(1 << d) {
        let j = f.trailing_zeros() as usize;
        let vecs = (0..d).filter(|&i| i != j).map(|i| {
            if f >> i & 1 == 1 {
                basis[i] ^ basis[j]
            } else {
                basis[i]
            }
        });
        out.push(LinearSpan::from_vectors(k.length(), vecs));
    }
    Ok(out)
}

/// Translate so that the least codeword becomes `0`.
pub fn normalize(c: &Code) -> Result<(Code, Word)> {
    let &least = c.words().first().ok_or(Error::EmptyCode)?;
    let t = Word::new(c.length(), least.into())?;
    Ok((c.translate(t)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perfect::hamming8;
    use rand::{Rng, SeedableRng};

    #[test]
    fn span_basics() {
        let s = LinearSpan::from_vectors(8, [0b11, 0b110, 0b101]);
        assert_eq!(s.dimension(), 2);
        assert!(s.contains(0b101));
        assert!(!s.contains(0b1));
        assert_eq!(s.elements().len(), 4);
    }

    #[test]
    fn linear_code_is_its_own_kernel() {
        let h = hamming8().code;
        let k = kernel(&h).unwrap();
        assert_eq!(k.dimension(), 4);
        assert_eq!(rank(&h).unwrap(), 4);
        assert!(kernel(&h.translate_bits(1)).is_err());
    }

    #[test]
    fn brute_kernel_of_random_sets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut trivial = 0;
        for _ in 0..50 {
            let mut ws: Vec<u16> = (0..15).map(|_| rng.gen_range(1..128)).collect();
            ws.push(0);
            let c = Code::new(7, ws).unwrap();
            let k = kernel(&c).unwrap();
            let brute: Vec<u16> = c
                .words()
                .iter()
                .copied()
                .filter(|&x| c.words().iter().all(|&w| c.contains_bits(w ^ x)))
                .collect();
            assert_eq!(k.elements().len(), brute.len());
            assert!(brute.iter().all(|&x| k.contains(x)));
            if k.dimension() == 0 {
                trivial += 1;
            }
        }
        assert!(trivial > 40);
    }

    #[test]
    fn cosets_of_subspaces() {
        let h = hamming8().code;
        let k = kernel(&h).unwrap();
        let all = cosets(&h, &k).unwrap();
        assert_eq!(all.len(), 1);
        let single = cosets(&h, &LinearSpan::zero(8)).unwrap();
        assert_eq!(single.len(), 16);
        assert_eq!(single.members(3), vec![single.representatives[3]]);
        let outside = LinearSpan::from_vectors(8, [0b11]);
        assert!(matches!(cosets(&h, &outside), Err(Error::NotInKernel)));
    }

    #[test]
    fn hyperplanes() {
        let k = LinearSpan::from_vectors(16, (0..9).map(|i| 1u16 << i));
        let hs = index2_subspaces(&k).unwrap();
        assert_eq!(hs.len(), 511);
        assert!(hs.iter().all(|h| h.dimension() == 8 && h.is_subspace_of(&k)));
        let distinct: std::collections::HashSet<_> = hs.iter().collect();
        assert_eq!(distinct.len(), 511);
        let one = index2_subspaces(&LinearSpan::from_vectors(16, [5])).unwrap();
        assert_eq!(one, vec![LinearSpan::zero(16)]);
        assert!(index2_subspaces(&LinearSpan::zero(16)).is_err());
    }

    #[test]
    fn normalize_moves_least_word_to_zero() {
        let h = hamming8().code.translate_bits(0b1);
        let (n, t) = normalize(&h).unwrap();
        assert!(n.contains_bits(0));
        assert_eq!(t.bits(), h.words()[0]);
        let (same, t0) = normalize(&hamming8().code).unwrap();
        assert_eq!(t0.bits(), 0);
        assert_eq!(same, hamming8().code);
        assert!(normalize(&Code::new(4, []).unwrap()).is_err());
    }
}
