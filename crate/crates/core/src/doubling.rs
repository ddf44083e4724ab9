//! Doubling construction of extended 1-perfect codes of length 16 from two
//! extended 1-perfect partitions of length 8 and a permutation of their
//! components.

use std::fmt;
use std::str::FromStr;

use crate::algebra::LinearSpan;
use crate::error::{Error, Result};
use crate::partitions::{permutations, universe, ExtendedPartition, PARTS};
use crate::words::Code;

/// A permutation of `0..8`, written as the digit string of its images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sigma([u8; PARTS]);

impl Sigma {
    pub fn identity() -> Self {
        Sigma([0, 1, 2, 3, 4, 5, 6, 7])
    }

    pub fn new(images: [u8; PARTS]) -> Result<Self> {
        let mut seen = 0u8;
        for &i in &images {
            if i as usize >= PARTS || seen >> i & 1 == 1 {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen |= 1 << i;
        }
        Ok(Sigma(images))
    }

    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(self) -> Sigma {
        let mut inv = [0u8; PARTS];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s as usize] = i as u8;
        }
        Sigma(inv)
    }

    /// All 40320 permutations, in lexicographic order of their digit strings.
    pub fn all() -> Vec<Sigma> {
        let mut v: Vec<Sigma> = permutations(PARTS)
            .into_iter()
            .map(|p| Sigma(std::array::from_fn(|i| p[i] as u8)))
            .collect();
        v.sort();
        v
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidPermutation(s.to_string()))?;
        let arr: [u8; PARTS] = digits
            .try_into()
            .map_err(|_| Error::InvalidPermutation(format!("{s:?} needs 8 digits")))?;
        Sigma::new(arr)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoublingSpec {
    pub source: ExtendedPartition,
    pub target: ExtendedPartition,
    pub sigma: Sigma,
}

/// `x` on coordinates 0..8 and `y` on 8..16, for `x` in `C_i`, `y` in `D_{sigma(i)}`.
pub fn double(spec: &DoublingSpec) -> Result<Code> {
    if !spec.source.is_extended() || !spec.target.is_extended() {
        return Err(Error::InvalidPartition("doubling needs extended partitions of length 8".into()));
    }
    let mut words = Vec::with_capacity(2048);
    for (i, ci) in spec.source.parts().iter().enumerate() {
        let dj = &spec.target.parts()[spec.sigma.apply(i)];
        for &x in ci.words() {
            for &y in dj.words() {
                words.push(x | y << 8);
            }
        }
    }
    Code::new(16, words)
}

/// Translations that map every component of a partition onto a component.
#[derive(Clone, Debug)]
pub struct PartitionSymmetries {
    /// `(t, tau)` with `C_i + t = C_{tau[i]}`.
    pub translations: Vec<(u16, [u8; PARTS])>,
}

pub fn partition_symmetries(p: &ExtendedPartition) -> PartitionSymmetries {
    let comp = p.component_map();
    let mut translations = Vec::new();
    for t in universe(p.length()) {
        let mut tau = [0u8; PARTS];
        let ok = p.parts().iter().enumerate().all(|(i, c)| {
            let j = comp[(c.words()[0] ^ t) as usize];
            tau[i] = j;
            c.words().iter().all(|&w| comp[(w ^ t) as usize] == j)
        });
        if ok {
            translations.push((t, tau));
        }
    }
    PartitionSymmetries { translations }
}

/// Kernel of the doubled code read off the partition symmetries:
/// `(a, b)` lies in it iff `sigma . tau_a = tau_b . sigma`.
pub fn structural_kernel(src: &PartitionSymmetries, dst: &PartitionSymmetries, sigma: Sigma) -> LinearSpan {
    let mut k = LinearSpan::zero(16);
    for &(a, ta) in &src.translations {
        for &(b, tb) in &dst.translations {
            if (0..PARTS).all(|i| sigma.apply(ta[i] as usize) == tb[sigma.apply(i)] as usize) {
                k.insert(a | b << 8);
            }
        }
    }
    LinearSpan::from_vectors(16, k.basis())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaRow {
    pub sigma: Sigma,
    pub rank: usize,
    pub kernel_dim: usize,
}

/// Rank and kernel dimension for every `sigma`, in lexicographic order.
pub fn scan_sigma(source: &ExtendedPartition, target: &ExtendedPartition) -> Result<Vec<SigmaRow>> {
    let (src, dst) = (partition_symmetries(source), partition_symmetries(target));
    Sigma::all()
        .into_iter()
        .map(|sigma| {
            let spec = DoublingSpec { source: source.clone(), target: target.clone(), sigma };
            let (code, _) = crate::algebra::normalize(&double(&spec)?)?;
            Ok(SigmaRow {
                sigma,
                rank: crate::algebra::rank(&code)?,
                kernel_dim: structural_kernel(&src, &dst, sigma).dimension(),
            })
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::{kernel, normalize, rank};
    use crate::partitions::{extend_partition, Partition};
    use crate::perfect::{hamming7, is_extended_perfect, is_perfect};

    pub(crate) fn linear_partition8() -> Partition {
        let h = hamming7().code;
        let mut reps = Vec::new();
        let mut seen = [false; 128];
        for x in 0u16..128 {
            if !seen[x as usize] {
                reps.push(x);
                for &w in h.words() {
                    seen[(w ^ x) as usize] = true;
                }
            }
        }
        extend_partition(&Partition::new(reps.iter().map(|&x| h.translate_bits(x)).collect()).unwrap())
    }

    #[test]
    fn sigma_text() {
        let s: Sigma = "10234567".parse().unwrap();
        assert_eq!(s.apply(0), 1);
        assert_eq!(s.to_string(), "10234567");
        assert_eq!(s.inverse().inverse(), s);
        assert!("0123456".parse::<Sigma>().is_err());
        assert!("00234567".parse::<Sigma>().is_err());
        assert_eq!(Sigma::all().len(), 40320);
    }

    #[test]
    fn linear_doubling() {
        let p = linear_partition8();
        let spec = DoublingSpec { source: p.clone(), target: p, sigma: Sigma::identity() };
        let c = double(&spec).unwrap();
        assert_eq!(c.len(), 2048);
        assert!(is_extended_perfect(&c).unwrap());
        assert_eq!(c.min_distance(), Some(4));
        let (c, _) = normalize(&c).unwrap();
        assert_eq!(rank(&c).unwrap(), 11);
        assert_eq!(kernel(&c).unwrap().dimension(), 11);
        for &a in c.words().iter().step_by(97) {
            for &b in c.words().iter().step_by(13) {
                assert!(c.contains_bits(a ^ b));
            }
        }
    }

    #[test]
    fn punctures_are_perfect() {
        let p = linear_partition8();
        let spec = DoublingSpec { source: p.clone(), target: p, sigma: "31204576".parse().unwrap() };
        let c = double(&spec).unwrap();
        for i in 0..16 {
            assert!(is_perfect(&c.puncture(i).unwrap()).unwrap());
        }
    }

    #[test]
    fn depends_only_on_paired_components() {
        let p = linear_partition8();
        let sigma: Sigma = "52103476".parse().unwrap();
        let base = double(&DoublingSpec { source: p.clone(), target: p.clone(), sigma }).unwrap();
        let order = [3usize, 1, 7, 0, 2, 6, 4, 5];
        let reordered = p.reorder(&order).unwrap();
        let moved = Sigma::new(std::array::from_fn(|i| sigma.apply(order[i]) as u8)).unwrap();
        let again = double(&DoublingSpec { source: reordered, target: p, sigma: moved }).unwrap();
        assert_eq!(base, again);
    }

    #[test]
    fn swapping_halves() {
        let p = linear_partition8();
        let q = p.permute(&[1, 0, 3, 2, 5, 4, 7, 6]).unwrap().translate(0b11).unwrap();
        let sigma: Sigma = "70615243".parse().unwrap();
        let c = double(&DoublingSpec { source: p.clone(), target: q.clone(), sigma }).unwrap();
        let swapped = double(&DoublingSpec { source: q, target: p, sigma: sigma.inverse() }).unwrap();
        let swap: Vec<usize> = (0..16).map(|i| (i + 8) % 16).collect();
        assert_eq!(c.permute(&swap).unwrap(), swapped);
    }

    #[test]
    fn structural_kernel_matches_brute_force() {
        let p = linear_partition8();
        let sym = partition_symmetries(&p);
        assert_eq!(sym.translations.len(), 128);
        for s in ["01234567", "10234567", "12034567", "76543210", "13572460"] {
            let sigma: Sigma = s.parse().unwrap();
            let code = double(&DoublingSpec { source: p.clone(), target: p.clone(), sigma }).unwrap();
            let (code, _) = normalize(&code).unwrap();
            let brute = kernel(&code).unwrap();
            assert_eq!(structural_kernel(&sym, &sym, sigma), brute, "sigma {s}");
        }
    }
}
