//! 1-perfect partitions of `F_2^7` and extended 1-perfect partitions of the
//! even-weight words of `F_2^8`: enumeration, canonical forms, classification.
//!
//! Equivalence is a coordinate permutation followed by a translation (by any
//! word for length 7, by an even-weight word for length 8). Components are
//! unordered.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_cover::ExactCover;
use crate::perfect::{enumerate_perfect7, is_extended_perfect, is_perfect};
use crate::words::{permute_bits, Code, CodeJson};

pub const PARTS: usize = 8;
const UNIVERSE: usize = 128;

/// Label string of a partition: `labels[j]` is the component of the `j`-th
/// universe word, components numbered by first appearance.
pub type Labels = [u8; UNIVERSE];

/// Eight disjoint perfect codes covering the ambient space. Length 7 is a
/// plain 1-perfect partition; length 8 an extended one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<Code>,
}

pub type PerfectPartition = Partition;
pub type ExtendedPartition = Partition;

/// Words partitioned at the given length, ascending.
pub fn universe(length: usize) -> Vec<u16> {
    match length {
        7 => (0..128).collect(),
        8 => (0u16..256).filter(|w| w.count_ones() % 2 == 0).collect(),
        _ => Vec::new(),
    }
}

impl Partition {
    pub fn new(mut parts: Vec<Code>) -> Result<Self> {
        validate(&parts)?;
        parts.sort_by(|a, b| a.words().cmp(b.words()));
        Ok(Partition { parts })
    }

    /// Keep the given component order (used for doubling, where order matters).
    pub fn ordered(parts: Vec<Code>) -> Result<Self> {
        validate(&parts)?;
        Ok(Partition { parts })
    }

    pub fn length(&self) -> usize {
        self.parts[0].length()
    }

    pub fn is_extended(&self) -> bool {
        self.length() == 8
    }

    pub fn parts(&self) -> &[Code] {
        &self.parts
    }

    /// Component index of every word of length `self.length()`; 255 outside the universe.
    pub fn component_map(&self) -> [u8; 256] {
        let mut m = [u8::MAX; 256];
        for (k, c) in self.parts.iter().enumerate() {
            for &w in c.words() {
                m[w as usize] = k as u8;
            }
        }
        m
    }

    /// Identity-normalized label string; equal iff same unordered partition.
    pub fn labels(&self) -> Labels {
        let comp = self.component_map();
        relabel(&universe(self.length()), |w| comp[w as usize])
    }

    pub fn from_labels(length: usize, labels: &Labels) -> Result<Self> {
        let u = universe(length);
        let mut parts: Vec<Vec<u16>> = vec![Vec::new(); PARTS];
        for (j, &l) in labels.iter().enumerate() {
            let slot = parts
                .get_mut(l as usize)
                .ok_or_else(|| Error::InvalidPartition(format!("label {l} out of range")))?;
            slot.push(u[j]);
        }
        let codes = parts.into_iter().map(|ws| Code::new(length, ws)).collect::<Result<_>>()?;
        Partition::ordered(codes)
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        Partition::new(self.parts.iter().map(|c| c.permute(perm)).collect::<Result<_>>()?)
    }

    pub fn translate(&self, t: u16) -> Result<Self> {
        Partition::new(self.parts.iter().map(|c| c.translate_bits(t)).collect())
    }

    /// Reorder components: new component `i` is old component `order[i]`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        crate::words::check_permutation(order, PARTS)?;
        Ok(Partition { parts: order.iter().map(|&i| self.parts[i].clone()).collect() })
    }

    pub fn to_json(&self) -> Vec<CodeJson> {
        self.parts.iter().map(Code::to_json).collect()
    }

    pub fn from_json(parts: &[CodeJson]) -> Result<Self> {
        Partition::ordered(parts.iter().map(Code::from_json).collect::<Result<_>>()?)
    }
}

fn validate(parts: &[Code]) -> Result<()> {
    if parts.len() != PARTS {
        return Err(Error::InvalidPartition(format!("{} components, expected 8", parts.len())));
    }
    let length = parts[0].length();
    let u = universe(length);
    if u.is_empty() {
        return Err(Error::UnsupportedLength(length));
    }
    let mut seen = [false; 256];
    for c in parts {
        if c.length() != length {
            return Err(Error::LengthMismatch { left: length, right: c.length() });
        }
        let ok = if length == 7 { is_perfect(c)? } else { is_extended_perfect(c)? };
        if !ok {
            return Err(Error::InvalidPartition("component is not a (extended) 1-perfect code".into()));
        }
        for &w in c.words() {
            if std::mem::replace(&mut seen[w as usize], true) {
                return Err(Error::InvalidPartition(format!("components overlap at {w:#x}")));
            }
        }
    }
    if u.iter().any(|&w| !seen[w as usize]) {
        return Err(Error::InvalidPartition("components do not cover the space".into()));
    }
    Ok(())
}

fn relabel(u: &[u16], comp: impl Fn(u16) -> u8) -> Labels {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    let mut out = [0u8; UNIVERSE];
    for (j, &w) in u.iter().enumerate() {
        let c = comp(w) as usize;
        if map[c] == u8::MAX {
            map[c] = next;
            next += 1;
        }
        out[j] = map[c];
    }
    out
}

/// All 1-perfect partitions of `F_2^7`, via exact cover of the 128 words by
/// the 240 perfect codes. Components are in canonical order.
pub fn enumerate_partitions7() -> Vec<PerfectPartition> {
    let codes: Vec<Code> = enumerate_perfect7().into_iter().map(|p| p.code).collect();
    let rows: Vec<Vec<usize>> = codes
        .iter()
        .map(|c| c.words().iter().map(|&w| w as usize).collect())
        .collect();
    let mut dlx = ExactCover::new(UNIVERSE, &rows);
    let mut out = Vec::new();
    let _ = dlx.solve(|sol| {
        let mut idx = sol.to_vec();
        idx.sort_unstable();
        out.push(Partition { parts: idx.iter().map(|&i| codes[i].clone()).collect() });
        ControlFlow::Continue(())
    });
    out.sort_by_key(Partition::labels);
    out
}

/// Extended partitions of length 8, one per length-7 partition.
pub fn enumerate_partitions8() -> Vec<ExtendedPartition> {
    enumerate_partitions7().iter().map(extend_partition).collect()
}

pub fn extend_partition(p: &PerfectPartition) -> ExtendedPartition {
    Partition {
        parts: p.parts.iter().map(|c| c.extend_parity().expect("length 7")).collect(),
    }
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Minimal label string over the whole equivalence group, with the group
/// element realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub labels: Labels,
    pub perm: Vec<usize>,
    pub translation: u16,
}

impl CanonicalForm {
    pub fn bytes(&self) -> &[u8] {
        &self.labels
    }
}

/// Minimal image of `p` under coordinate permutations and translations.
///
/// Every group element is tried; a candidate is abandoned at the first
/// position where it exceeds the best string found so far.
pub fn canonical_form(p: &Partition) -> CanonicalForm {
    let n = p.length();
    let u = universe(n);
    let comp = p.component_map();
    let mut best = CanonicalForm { labels: [u8::MAX; UNIVERSE], perm: Vec::new(), translation: 0 };
    let mut img = [0u8; 256];
    let mut cand = [0u8; UNIVERSE];
    for perm in permutations(n) {
        for &w in &u {
            img[permute_bits(w, &perm) as usize] = comp[w as usize];
        }
        for &t in &u {
            let mut map = [u8::MAX; PARTS];
            let mut next = 0u8;
            let mut less = false;
            let mut worse = false;
            for (j, &w) in u.iter().enumerate() {
                let c = img[(w ^ t) as usize] as usize;
                if map[c] == u8::MAX {
                    map[c] = next;
                    next += 1;
                }
                let l = map[c];
                if !less {
                    if l > best.labels[j] {
                        worse = true;
                        break;
                    }
                    less = l < best.labels[j];
                }
                cand[j] = l;
            }
            if !worse && less {
                best = CanonicalForm { labels: cand, perm: perm.clone(), translation: t };
            }
        }
    }
    best
}

/// The canonical representative: the partition whose identity label string
/// is the canonical form.
pub fn canonical_partition(p: &Partition) -> Partition {
    Partition::from_labels(p.length(), &canonical_form(p).labels).expect("image of a valid partition")
}

/// An equivalence class in this crate's numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionClass {
    pub id: usize,
    pub alias: Option<String>,
    pub representative: Partition,
    pub canonical: Labels,
    /// Number of classified inputs falling in this class.
    pub members: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub classes: Vec<PartitionClass>,
    /// Class id of every input, in input order.
    pub assignment: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Classify partitions up to equivalence.
///
/// Inputs joined by a group generator are merged first (for a group-closed
/// list this already yields the orbits); one canonical form per merged
/// component then settles the classes.
pub fn classify_partitions(parts: &[Partition]) -> Result<Classification> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidPartition("empty list".into()));
    };
    let n = first.length();
    if parts.iter().any(|p| p.length() != n) {
        return Err(Error::InvalidPartition("mixed lengths".into()));
    }
    let u = universe(n);
    let keys: Vec<Labels> = parts.iter().map(Partition::labels).collect();
    let index: HashMap<&Labels, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();

    let mut gens: Vec<Box<dyn Fn(u16) -> u16>> = Vec::new();
    for i in 0..n - 1 {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, i + 1);
        gens.push(Box::new(move |w| permute_bits(w, &perm)));
    }
    let unit: u16 = if n == 7 { 1 } else { 3 };
    gens.push(Box::new(move |w| w ^ unit));

    let mut uf = UnionFind((0..parts.len()).collect());
    for (i, p) in parts.iter().enumerate() {
        let comp = p.component_map();
        for g in &gens {
            let mut moved = [0u8; 256];
            for &w in &u {
                moved[g(w) as usize] = comp[w as usize];
            }
            let key = relabel(&u, |w| moved[w as usize]);
            if let Some(&j) = index.get(&key) {
                uf.union(i, j);
            }
        }
    }

    let mut by_root: BTreeMap<usize, Labels> = BTreeMap::new();
    let roots: Vec<usize> = (0..parts.len()).map(|i| uf.find(i)).collect();
    for &r in &roots {
        by_root.entry(r).or_insert_with(|| canonical_form(&parts[r]).labels);
    }
    let mut canon: BTreeMap<Labels, usize> = by_root.values().map(|l| (*l, 0)).collect();
    for (id, v) in canon.values_mut().enumerate() {
        *v = id;
    }
    let assignment: Vec<usize> = roots.iter().map(|r| canon[&by_root[r]]).collect();
    let mut classes: Vec<PartitionClass> = canon
        .iter()
        .map(|(labels, &id)| PartitionClass {
            id,
            alias: None,
            representative: Partition::from_labels(n, labels).expect("canonical image is valid"),
            canonical: *labels,
            members: 0,
        })
        .collect();
    for &a in &assignment {
        classes[a].members += 1;
    }
    Ok(Classification { classes, assignment })
}

/// Atlas file: `{ "classes": [ { "id", "alias", "representative": [Code x8] } ] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasJson {
    pub classes: Vec<AtlasClassJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasClassJson {
    pub id: usize,
    pub alias: Option<String>,
    pub representative: Vec<CodeJson>,
}

impl AtlasJson {
    pub fn from_classes(classes: &[PartitionClass]) -> Self {
        AtlasJson {
            classes: classes
                .iter()
                .map(|c| AtlasClassJson {
                    id: c.id,
                    alias: c.alias.clone(),
                    representative: c.representative.to_json(),
                })
                .collect(),
        }
    }

    pub fn representative(&self, id: usize) -> Result<Partition> {
        let class = self
            .classes
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownName(format!("partition class {id}")))?;
        Partition::from_json(&class.representative)
    }

    /// Attach user-supplied labels (`{"0": "alt-3", ...}`).
    pub fn apply_aliases(&mut self, aliases: &BTreeMap<String, String>) {
        for c in &mut self.classes {
            if let Some(a) = aliases.get(&c.id.to_string()) {
                c.alias = Some(a.clone());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perfect::hamming7;

    fn hamming_cosets() -> Partition {
        let h = hamming7().code;
        let mut reps: Vec<u16> = Vec::new();
        let mut covered = [false; 128];
        for x in 0u16..128 {
            if !covered[x as usize] {
                reps.push(x);
                for &w in h.words() {
                    covered[(w ^ x) as usize] = true;
                }
            }
        }
        Partition::new(reps.iter().map(|&x| h.translate_bits(x)).collect()).unwrap()
    }

    #[test]
    fn coset_partition_is_valid() {
        let p = hamming_cosets();
        assert_eq!(p.parts().iter().map(Code::len).sum::<usize>(), 128);
        let e = extend_partition(&p);
        assert!(e.is_extended());
        let back: Vec<Code> = e.parts().iter().map(|c| c.puncture(7).unwrap()).collect();
        assert_eq!(Partition::new(back).unwrap(), p);
    }

    #[test]
    fn rejects_bad_partitions() {
        let p = hamming_cosets();
        let mut parts = p.parts().to_vec();
        parts[1] = parts[0].clone();
        assert!(matches!(Partition::new(parts), Err(Error::InvalidPartition(_))));
        assert!(Partition::new(p.parts()[..7].to_vec()).is_err());
    }

    #[test]
    fn heap_permutations() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        let set: std::collections::HashSet<_> = ps.iter().collect();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn canonical_form_is_invariant_and_idempotent() {
        let p = hamming_cosets();
        let c = canonical_form(&p);
        let moved = p.permute(&[3, 0, 6, 1, 5, 2, 4]).unwrap().translate(0x2b).unwrap();
        assert_eq!(canonical_form(&moved).labels, c.labels);
        let rep = canonical_partition(&p);
        assert_eq!(canonical_form(&rep).labels, c.labels);
        assert_eq!(rep.labels(), c.labels);
    }

    #[test]
    fn single_partition_is_one_class() {
        let cls = classify_partitions(&[hamming_cosets()]).unwrap();
        assert_eq!(cls.classes.len(), 1);
        assert_eq!(cls.assignment, vec![0]);
        assert!(classify_partitions(&[]).is_err());
    }

    #[test]
    fn atlas_round_trip() {
        let cls = classify_partitions(&[hamming_cosets()]).unwrap();
        let mut atlas = AtlasJson::from_classes(&cls.classes);
        let text = serde_json::to_string(&atlas).unwrap();
        let back: AtlasJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, atlas);
        assert_eq!(back.representative(0).unwrap(), cls.classes[0].representative);
        atlas.apply_aliases(&[("0".to_string(), "linear".to_string())].into());
        assert_eq!(atlas.classes[0].alias.as_deref(), Some("linear"));
        assert!(atlas.representative(5).is_err());
    }
}
