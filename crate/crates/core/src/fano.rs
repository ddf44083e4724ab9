//! Named quadruple families built from the Fano plane, supplements,
//! ordered block partitions, and pair-partitions of `0..8` with their
//! products and quarters.
//!
//! Points `0..8` are the left half of a length-16 word and `8..16` the right
//! half. A pair-partition splits `0..8` into four pairs; a product of two
//! pair-partitions is the set of 16 quadruples `p ∪ (q + 8)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::words::{Quadruple, QuadrupleSet};

/// Lines of the Fano plane on the points `1..8`.
pub const FANO_LINES: [[u8; 3]; 7] = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [2, 4, 7], [2, 5, 6], [3, 4, 6], [3, 5, 7]];

/// `{s - x : x ∈ q}` for every quadruple.
pub fn supplement(set: &QuadrupleSet, s: usize) -> Result<QuadrupleSet> {
    set.iter()
        .map(|q| {
            let c = q.coords();
            if c[3] > s {
                return Err(Error::InvalidQuadruple(format!("{q} has an index above {s:x}")));
            }
            Quadruple::new(s - c[0], s - c[1], s - c[2], s - c[3])
        })
        .collect()
}

/// Complement within `0..8` of each quadruple.
pub fn half_complement(set: &QuadrupleSet) -> Result<QuadrupleSet> {
    set.iter()
        .map(|q| {
            if q.left_count() != 4 {
                return Err(Error::InvalidQuadruple(format!("{q} is not inside 0..8")));
            }
            Ok(Quadruple::from_mask(!q.mask() & 0xff).expect("four of eight"))
        })
        .collect()
}

fn set_of(items: &[&str]) -> QuadrupleSet {
    items.iter().map(|s| s.parse().expect("constant quadruple")).collect()
}

fn union(sets: &[&QuadrupleSet]) -> QuadrupleSet {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// Names accepted by [`family`], in listing order.
pub const FAMILY_NAMES: [&str; 18] = [
    "X", "Y", "Z", "X'", "A", "B", "A'", "B'", "Z'", "A0", "A1", "B0", "B1", "A0'", "A1'", "B0'", "B1'", "Z0",
];

pub fn family(name: &str) -> Result<QuadrupleSet> {
    let x = set_of(&["0123", "0145", "0167", "0247", "0256", "0346", "0357"]);
    let a = set_of(&["0123", "0145", "0167"]);
    let b = set_of(&["0247", "0256", "0346", "0357"]);
    let a0 = set_of(&["0123"]);
    let a1 = set_of(&["0145", "0167"]);
    let b0 = set_of(&["0247", "0256"]);
    let b1 = set_of(&["0346", "0357"]);
    let y = half_complement(&x)?;
    let z = supplement(&union(&[&x, &y]), 15)?;
    let out = match name {
        "X" => x,
        "Y" => y,
        "Z" => z,
        "X'" => union(&[&y, &z]),
        "A" => a,
        "B" => b,
        "A'" => half_complement(&a)?,
        "B'" => half_complement(&b)?,
        "Z'" => union(&[&z, &half_complement(&a)?]),
        "A0" => a0,
        "A1" => a1,
        "B0" => b0,
        "B1" => b1,
        "A0'" => half_complement(&a0)?,
        "A1'" => half_complement(&a1)?,
        "B0'" => half_complement(&b0)?,
        "B1'" => half_complement(&b1)?,
        "Z0" => union(&[&z, &half_complement(&a0)?]),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(out)
}

pub fn families() -> Vec<(&'static str, QuadrupleSet)> {
    FAMILY_NAMES.iter().map(|&n| (n, family(n).expect("listed name"))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Earlier blocks hold lexicographically larger quadruples.
    Descending,
    Ascending,
}

/// Split a set into consecutive blocks of the given sizes in lexicographic order.
pub fn s_partition(set: &QuadrupleSet, sizes: &[usize], dir: Direction) -> Result<Vec<QuadrupleSet>> {
    let total: usize = sizes.iter().sum();
    if total != set.len() {
        return Err(Error::SizeMismatch { got: total, expected: set.len() });
    }
    let mut items: Vec<Quadruple> = set.iter().copied().collect();
    if dir == Direction::Descending {
        items.reverse();
    }
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        out.push(items[start..start + s].iter().copied().collect());
        start += s;
    }
    Ok(out)
}

/// Block sizes of the descending (short block first) or ascending (short
/// block last) partition of a 7-set attached to kernel dimension `kappa`.
pub fn kappa_partition_sizes(kappa: usize, dir: Direction) -> Result<Vec<usize>> {
    if !(5..=9).contains(&kappa) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let short = ((1usize << (kappa - 5)) - 1).min(7);
    let long = (1usize << (kappa - 5)).min(8);
    let mut sizes = Vec::new();
    if short > 0 {
        sizes.push(short);
    }
    let mut rest = 7 - short;
    while rest > 0 {
        sizes.push(long.min(rest));
        rest -= long.min(rest);
    }
    if dir == Direction::Ascending {
        sizes.reverse();
    }
    Ok(sizes)
}

/// A partition of `0..8` into four pairs, each pair ascending, pairs ordered
/// by their smaller element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition([[u8; 2]; 4]);

impl PairPartition {
    pub fn new(pairs: [[u8; 2]; 4]) -> Result<Self> {
        let mut seen = 0u8;
        let mut ps = pairs;
        for p in &mut ps {
            p.sort_unstable();
            for &x in p.iter() {
                if x >= 8 || seen >> x & 1 == 1 {
                    return Err(Error::InvalidPartition(format!("pairs {pairs:?} do not partition 0..8")));
                }
                seen |= 1 << x;
            }
        }
        ps.sort_unstable();
        Ok(PairPartition(ps))
    }

    /// `k` with subscript `l` and superscript `m`: pair `0` with `k`, then the
    /// least free point with `l`, then the least free point with `m`; the
    /// last pair is forced.
    pub fn from_notation(k: u8, l: u8, m: u8) -> Result<Self> {
        let bad = || Error::InvalidPartition(format!("{k}_{l}^{m} does not decode"));
        let mut used = 0u8;
        let mut pairs = Vec::with_capacity(4);
        let mut take = |a: u8, b: u8, used: &mut u8| -> Result<()> {
            if a == b || a >= 8 || b >= 8 || *used >> a & 1 == 1 || *used >> b & 1 == 1 {
                return Err(bad());
            }
            *used |= 1 << a | 1 << b;
            pairs.push([a, b]);
            Ok(())
        };
        take(0, k, &mut used)?;
        for partner in [l, m] {
            let free = (0..8).find(|&x| used >> x & 1 == 0).ok_or_else(bad)?;
            take(free, partner, &mut used)?;
        }
        let rest: Vec<u8> = (0..8).filter(|&x| used >> x & 1 == 0).collect();
        take(rest[0], rest[1], &mut used)?;
        PairPartition::new(pairs.try_into().expect("four pairs"))
    }

    pub fn pairs(&self) -> [[u8; 2]; 4] {
        self.0
    }

    /// Notation `(k, l, m)` of this partition.
    pub fn notation(&self) -> (u8, u8, u8) {
        (self.0[0][1], self.0[1][1], self.0[2][1])
    }

    fn pair_masks(&self) -> [u16; 4] {
        self.0.map(|[a, b]| 1 << a | 1 << b)
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = self.0;
        write!(f, "({}{},{}{},{}{},{}{})", p[0], p[1], q[0], q[1], r[0], r[1], s[0], s[1])
    }
}

impl FromStr for PairPartition {
    type Err = Error;

    /// Accepts `(01,23,45,67)` or `01,23,45,67`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let pairs: Vec<[u8; 2]> = body
            .split(',')
            .map(|p| {
                let d: Vec<u8> = p.trim().chars().filter_map(|c| c.to_digit(8).map(|x| x as u8)).collect();
                match d[..] {
                    [a, b] if p.trim().len() == 2 => Ok([a, b]),
                    _ => Err(Error::Parse(format!("bad pair {p:?}"))),
                }
            })
            .collect::<Result<_>>()?;
        let arr: [[u8; 2]; 4] = pairs.try_into().map_err(|_| Error::Parse(format!("{s:?} needs four pairs")))?;
        PairPartition::new(arr)
    }
}

/// All 105 pair-partitions of `0..8`, ascending.
pub fn all_pair_partitions() -> Vec<PairPartition> {
    fn go(free: u8, acc: &mut Vec<[u8; 2]>, out: &mut Vec<PairPartition>) {
        if free == 0 {
            out.push(PairPartition::new(acc.clone().try_into().expect("four pairs")).expect("valid"));
            return;
        }
        let a = free.trailing_zeros() as u8;
        for b in a + 1..8 {
            if free >> b & 1 == 1 {
                acc.push([a, b]);
                go(free & !(1 << a | 1 << b), acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::with_capacity(105);
    go(0xff, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// One left pair times every pair of a right pair-partition shifted by 8.
pub fn quarter(left: [u8; 2], right: &PairPartition) -> QuadrupleSet {
    let l = 1u16 << left[0] | 1 << left[1];
    right
        .pair_masks()
        .iter()
        .map(|&r| Quadruple::from_mask(l | r << 8).expect("2 + 2 points"))
        .collect()
}

pub fn product(left: &PairPartition, right: &PairPartition) -> QuadrupleSet {
    left.pairs().iter().flat_map(|&p| quarter(p, right)).collect()
}

/// The four quarters of a product, by left pair in lexicographic order.
pub fn loq_split(p: &QuadrupleSet) -> Result<[QuadrupleSet; 4]> {
    match recognize_product(p) {
        Some(Recognized::Product(a, b)) => Ok(a.pairs().map(|pair| quarter(pair, &b))),
        _ => Err(Error::NotAProduct),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognized {
    Product(PairPartition, PairPartition),
    Quarter { left: [u8; 2], right: PairPartition },
}

fn split_halves(q: &Quadruple) -> Option<(u16, u16)> {
    let m = q.mask();
    let (l, r) = (m & 0xff, m >> 8);
    (l.count_ones() == 2).then_some((l, r))
}

fn pairs_to_partition(masks: &[u16]) -> Option<PairPartition> {
    if masks.len() != 4 {
        return None;
    }
    let pairs: Vec<[u8; 2]> = masks
        .iter()
        .map(|&m| {
            let a = m.trailing_zeros() as u8;
            [a, 15 - m.leading_zeros() as u8]
        })
        .collect();
    PairPartition::new(pairs.try_into().ok()?).ok()
}

/// Inverse of [`product`] and [`quarter`].
pub fn recognize_product(q: &QuadrupleSet) -> Option<Recognized> {
    let mut lefts: Vec<u16> = Vec::new();
    let mut rights: Vec<u16> = Vec::new();
    for x in q {
        let (l, r) = split_halves(x)?;
        lefts.push(l);
        rights.push(r);
    }
    lefts.sort_unstable();
    lefts.dedup();
    rights.sort_unstable();
    rights.dedup();
    let right = pairs_to_partition(&rights)?;
    match q.len() {
        16 => {
            let left = pairs_to_partition(&lefts)?;
            (product(&left, &right) == *q).then_some(Recognized::Product(left, right))
        }
        4 if lefts.len() == 1 => {
            let l = lefts[0];
            let left = [l.trailing_zeros() as u8, 15 - l.leading_zeros() as u8];
            (quarter(left, &right) == *q).then_some(Recognized::Quarter { left, right })
        }
        _ => None,
    }
}

/// Split a set of 2+2 quadruples into quarters, one per left pair.
pub fn quarters_of(q: &QuadrupleSet) -> Option<Vec<([u8; 2], PairPartition)>> {
    let mut groups: std::collections::BTreeMap<u16, QuadrupleSet> = Default::default();
    for x in q {
        let (l, _) = split_halves(x)?;
        groups.entry(l).or_default().insert(*x);
    }
    groups
        .values()
        .map(|g| match recognize_product(g)? {
            Recognized::Quarter { left, right } => Some((left, right)),
            Recognized::Product(..) => None,
        })
        .collect()
}

/// Named pair-partitions `k_letter` with their `k_l^m` notation.
pub const REGISTRY: [(&str, u8, u8, u8); 75] = [
    ("1_a", 1, 3, 5), ("2_a", 2, 3, 7), ("3_a", 3, 2, 7), ("4_a", 4, 5, 7), ("5_a", 5, 4, 6), ("6_a", 6, 7, 4), ("7_a", 7, 6, 5),
    ("1_b", 1, 3, 6), ("2_b", 2, 3, 6), ("3_b", 3, 2, 6), ("4_b", 4, 5, 6), ("5_b", 5, 4, 7), ("6_b", 6, 7, 5), ("7_b", 7, 6, 4),
    ("1_c", 1, 3, 7), ("2_c", 2, 3, 5), ("3_c", 3, 2, 5), ("4_c", 4, 6, 5), ("4_d", 4, 6, 7), ("4_e", 4, 7, 6), ("5_c", 5, 7, 4),
    ("5_d", 5, 7, 6), ("5_e", 5, 6, 7), ("6_c", 6, 4, 7), ("6_d", 6, 4, 5), ("6_e", 6, 5, 4), ("7_c", 7, 5, 6), ("7_d", 7, 5, 4),
    ("7_e", 7, 4, 5),
    ("1_d", 1, 5, 4), ("1_e", 1, 6, 7), ("1_f", 1, 4, 5), ("2_d", 2, 5, 7), ("2_e", 2, 4, 6), ("2_f", 2, 6, 4),
    ("3_d", 3, 4, 7), ("3_e", 3, 7, 4), ("3_f", 3, 5, 6), ("4_f", 4, 3, 6), ("4_g", 4, 2, 7), ("4_h", 4, 5, 3),
    ("5_f", 5, 2, 6), ("5_g", 5, 3, 7), ("6_f", 6, 2, 5), ("6_g", 6, 7, 3), ("7_f", 7, 6, 3), ("7_g", 7, 3, 5),
    ("1_g", 1, 4, 7), ("1_h", 1, 4, 6), ("1_i", 1, 7, 6), ("1_j", 1, 5, 7), ("1_k", 1, 6, 5), ("2_g", 2, 7, 6), ("2_h", 2, 5, 6),
    ("2_i", 2, 4, 7), ("2_j", 2, 7, 5), ("2_k", 2, 4, 5), ("3_g", 3, 7, 6), ("3_h", 3, 7, 5), ("3_i", 3, 4, 6), ("3_j", 3, 6, 7),
    ("4_i", 4, 2, 6), ("4_j", 4, 3, 5), ("5_h", 5, 6, 4), ("5_i", 5, 4, 3), ("5_j", 5, 2, 4), ("5_k", 5, 6, 3), ("6_h", 6, 3, 5),
    ("6_i", 6, 3, 4), ("6_j", 6, 5, 7), ("6_k", 6, 5, 3), ("7_h", 7, 5, 3), ("7_i", 7, 2, 5), ("7_j", 7, 3, 4), ("7_k", 7, 2, 3),
];

/// Decoded registry entries; undecodable notations carry their error.
pub fn partition_registry() -> Vec<(&'static str, (u8, u8, u8), Result<PairPartition>)> {
    REGISTRY.iter().map(|&(n, k, l, m)| (n, (k, l, m), PairPartition::from_notation(k, l, m))).collect()
}

pub fn lookup_partition(name: &str) -> Result<PairPartition> {
    let &(_, k, l, m) =
        REGISTRY.iter().find(|e| e.0 == name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
    PairPartition::from_notation(k, l, m)
}
