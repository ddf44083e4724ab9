//! Steiner triple systems of order 15 from punctured codes, Pasch
//! configuration counts, and type identification by Pasch signature.

use std::fmt;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::CosetDecomposition;
use crate::error::{Error, Result};
use crate::sqs::SqsSystem;
use crate::words::{bits_to_hex, Code, Word};

pub const POINTS: usize = 15;
pub const TRIPLES: usize = 35;
const NONE: u8 = u8::MAX;

/// STS type per punctured coordinate, in coordinate order.
pub type TypeTuple = [u8; 16];

/// An STS(15): every pair of points in exactly one of 35 triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StsSystem {
    triples: Vec<[u8; 3]>,
    third: [[u8; POINTS]; POINTS],
}

impl StsSystem {
    pub fn from_triples(triples: impl IntoIterator<Item = [u8; 3]>) -> Result<Self> {
        let mut ts: Vec<[u8; 3]> = triples
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        ts.sort_unstable();
        ts.dedup();
        if ts.len() != TRIPLES {
            return Err(Error::StsAxiom(format!("{} triples, expected {TRIPLES}", ts.len())));
        }
        let mut third = [[NONE; POINTS]; POINTS];
        for t in &ts {
            if t[2] as usize >= POINTS || t[0] == t[1] || t[1] == t[2] {
                return Err(Error::StsAxiom(format!("bad triple {t:?}")));
            }
            for (x, y, z) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                if third[x as usize][y as usize] != NONE {
                    return Err(Error::StsAxiom(format!("pair {x},{y} covered twice")));
                }
                third[x as usize][y as usize] = z;
                third[y as usize][x as usize] = z;
            }
        }
        Ok(StsSystem { triples: ts, third })
    }

    pub fn triples(&self) -> &[[u8; 3]] {
        &self.triples
    }

    /// The point completing the triple through `x` and `y`.
    pub fn third(&self, x: usize, y: usize) -> Option<usize> {
        match self.third[x][y] {
            NONE => None,
            z => Some(z as usize),
        }
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<StsSystem> {
        crate::words::check_permutation(perm, POINTS)?;
        StsSystem::from_triples(self.triples.iter().map(|t| t.map(|x| perm[x as usize] as u8)))
    }
}

fn weight3_masks15() -> &'static [u16] {
    static MASKS: OnceLock<Vec<u16>> = OnceLock::new();
    MASKS.get_or_init(|| (0u16..1 << 15).filter(|m| m.count_ones() == 3).collect())
}

fn mask_points(m: u16) -> [u8; 3] {
    let mut out = [0u8; 3];
    let mut k = 0;
    for i in 0..16u8 {
        if m >> i & 1 == 1 {
            out[k] = i;
            k += 1;
        }
    }
    out
}

/// Supports of the codewords at distance 3 from `v` in a 1-perfect code of length 15.
pub fn sts_of(c15: &Code, v: Word) -> Result<StsSystem> {
    if c15.length() != POINTS {
        return Err(Error::UnsupportedLength(c15.length()));
    }
    if !c15.contains(v) {
        return Err(Error::NotInCode(v.to_hex()));
    }
    sts_of_bits(c15, v.bits())
}

fn sts_of_bits(c15: &Code, v: u16) -> Result<StsSystem> {
    StsSystem::from_triples(
        weight3_masks15()
            .iter()
            .filter(|&&m| c15.contains_bits(v ^ m))
            .map(|&m| mask_points(m)),
    )
}

/// Blocks through point `i` with `i` removed and higher points shifted down,
/// matching the STS of the code punctured at `i`.
pub fn derived_sts(s: &SqsSystem, i: usize) -> Result<StsSystem> {
    let shift = |x: usize| if x > i { x - 1 } else { x } as u8;
    StsSystem::from_triples(s.blocks().iter().filter(|q| q.contains(i)).map(|q| {
        let rest: Vec<u8> = q.coords().iter().filter(|&&x| x != i).map(|&x| shift(x)).collect();
        [rest[0], rest[1], rest[2]]
    }))
}

/// Pasch count and per-point counts, the latter sorted nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PaschProfile {
    pub total: u32,
    pub per_point: [u32; POINTS],
}

impl PaschProfile {
    fn from_raw(total: u32, mut per_point: [u32; POINTS]) -> Self {
        per_point.sort_unstable_by(|a, b| b.cmp(a));
        PaschProfile { total, per_point }
    }
}

impl fmt::Display for PaschProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.total)?;
        for (i, p) in self.per_point.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Completion search: every Pasch configuration is met once per pair of its
/// triples, at their common point, with one of the two matchings.
pub fn pasch_profile(s: &StsSystem) -> PaschProfile {
    let mut found = 0u32;
    let mut per_point = [0u32; POINTS];
    for a in 0..POINTS {
        let mut through: Vec<(usize, usize)> = Vec::with_capacity(7);
        for b in 0..POINTS {
            if let Some(c) = s.third(a, b) {
                if b < c {
                    through.push((b, c));
                }
            }
        }
        for (i, &(b, c)) in through.iter().enumerate() {
            for &(d, e) in &through[i + 1..] {
                for (d, e) in [(d, e), (e, d)] {
                    let f = s.third(b, d).expect("pair covered");
                    if s.third(c, e) == Some(f) {
                        found += 1;
                        for p in [a, b, c, d, e, f] {
                            per_point[p] += 1;
                        }
                    }
                }
            }
        }
    }
    PaschProfile::from_raw(found / 6, per_point.map(|x| x / 6))
}

/// Every 4-subset of triples covering exactly 6 points, each twice.
pub fn pasch_profile_brute(s: &StsSystem) -> PaschProfile {
    let ts: Vec<u16> = s.triples().iter().map(|t| t.iter().fold(0u16, |m, &x| m | 1 << x)).collect();
    let n = ts.len();
    let mut total = 0u32;
    let mut per_point = [0u32; POINTS];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let union = ts[i] | ts[j] | ts[k] | ts[l];
                    if union.count_ones() != 6 {
                        continue;
                    }
                    let twice = (0..POINTS).all(|p| {
                        union >> p & 1 == 0 || [i, j, k, l].iter().filter(|&&t| ts[t] >> p & 1 == 1).count() == 2
                    });
                    if twice {
                        total += 1;
                        for (p, count) in per_point.iter_mut().enumerate() {
                            *count += u32::from(union >> p & 1);
                        }
                    }
                }
            }
        }
    }
    PaschProfile::from_raw(total, per_point)
}

struct TypeRow {
    id: u8,
    total: u32,
    /// `(value, repeat)` runs, nonincreasing.
    runs: &'static [(u32, usize)],
}

const TYPE_TABLE: [TypeRow; 11] = [
    TypeRow { id: 1, total: 105, runs: &[(42, 15)] },
    TypeRow { id: 2, total: 73, runs: &[(42, 1), (30, 8), (26, 6)] },
    TypeRow { id: 3, total: 57, runs: &[(26, 3), (24, 8), (18, 4)] },
    TypeRow { id: 4, total: 49, runs: &[(30, 1), (26, 1), (22, 1), (20, 4), (18, 6), (14, 2)] },
    TypeRow { id: 5, total: 49, runs: &[(26, 2), (20, 4), (18, 9)] },
    TypeRow { id: 6, total: 37, runs: &[(22, 3), (14, 6), (12, 6)] },
    TypeRow { id: 7, total: 33, runs: &[(18, 3), (12, 12)] },
    TypeRow { id: 8, total: 37, runs: &[(18, 3), (15, 4), (14, 7), (10, 1)] },
    TypeRow { id: 13, total: 33, runs: &[(20, 1), (16, 2), (14, 2), (12, 9), (10, 1)] },
    TypeRow { id: 14, total: 37, runs: &[(24, 1), (16, 3), (15, 4), (14, 3), (12, 4)] },
    TypeRow { id: 16, total: 49, runs: &[(21, 8), (18, 7)] },
];

impl TypeRow {
    fn profile(&self) -> PaschProfile {
        let mut per_point = [0u32; POINTS];
        let mut k = 0;
        for &(v, r) in self.runs {
            per_point[k..k + r].fill(v);
            k += r;
        }
        PaschProfile { total: self.total, per_point }
    }
}

/// The known `(type id, signature)` rows.
pub fn type_table() -> Vec<(u8, PaschProfile)> {
    TYPE_TABLE.iter().map(|r| (r.id, r.profile())).collect()
}

pub fn classify_type(p: &PaschProfile) -> Option<u8> {
    TYPE_TABLE.iter().find(|r| r.profile() == *p).map(|r| r.id)
}

pub fn sts_type(p: &PaschProfile) -> Result<u8> {
    classify_type(p).ok_or_else(|| Error::UnknownStsType(p.to_string()))
}

const LETTERS: [(u8, char); 4] = [(13, 'c'), (14, 'd'), (15, 'e'), (16, 'g')];

/// Types 1..9 as digits; 13, 14, 15, 16 as `c`, `d`, `e`, `g`; `?` otherwise.
pub fn type_letter(t: u8) -> char {
    match t {
        1..=9 => char::from(b'0' + t),
        _ => LETTERS.iter().find(|l| l.0 == t).map_or('?', |l| l.1),
    }
}

fn letter_type(c: char) -> Option<u8> {
    match c {
        '1'..='9' => Some(c as u8 - b'0'),
        _ => LETTERS.iter().find(|l| l.1 == c).map(|l| l.0),
    }
}

pub fn render_type_tuple(t: &TypeTuple) -> String {
    t.iter().map(|&x| type_letter(x)).collect()
}

pub fn parse_type_tuple(s: &str) -> Result<TypeTuple> {
    let v: Vec<u8> = s
        .chars()
        .map(letter_type)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Parse(format!("bad type tuple {s:?}")))?;
    v.try_into().map_err(|_| Error::Parse(format!("type tuple {s:?} needs 16 entries")))
}

fn puncture_bits(w: u16, i: usize) -> u16 {
    let low = (1u16 << i) - 1;
    (w & low) | ((w >> 1) & !low)
}

/// The 16 punctured codes of an extended 1-perfect code of length 16.
pub struct Punctures {
    codes: Vec<Code>,
}

impl Punctures {
    pub fn new(c16: &Code) -> Result<Self> {
        if c16.length() != 16 {
            return Err(Error::UnsupportedLength(c16.length()));
        }
        Ok(Punctures { codes: (0..16).map(|i| c16.puncture(i)).collect::<Result<_>>()? })
    }

    pub fn code(&self, i: usize) -> &Code {
        &self.codes[i]
    }

    pub fn profile(&self, i: usize, v: u16) -> Result<PaschProfile> {
        Ok(pasch_profile(&sts_of_bits(&self.codes[i], puncture_bits(v, i))?))
    }

    pub fn type_tuple(&self, v: u16) -> Result<TypeTuple> {
        let mut t = [0u8; 16];
        for (i, slot) in t.iter_mut().enumerate() {
            *slot = sts_type(&self.profile(i, v)?)?;
        }
        Ok(t)
    }
}

/// Type of the STS at the punctured representative, for every coordinate.
pub fn class_type_tuple(c16: &Code, rep: Word) -> Result<TypeTuple> {
    if !c16.contains(rep) {
        return Err(Error::NotInCode(rep.to_hex()));
    }
    Punctures::new(c16)?.type_tuple(rep.bits())
}

/// Types per class with unknown signatures kept: `0` in a tuple marks a
/// coordinate whose profile is not in the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeScan {
    pub tuples: Vec<TypeTuple>,
    /// Distinct unknown profiles, sorted by their rendering.
    pub unknown: Vec<PaschProfile>,
}

/// Profiles of every class, checked against every member of the class.
pub fn vertex_type_scan(c16: &Code, dec: &CosetDecomposition) -> Result<TypeScan> {
    let p = Punctures::new(c16)?;
    let profiles = |v: u16| (0..16).map(|i| p.profile(i, v)).collect::<Result<Vec<_>>>();
    let per_class: Vec<Vec<PaschProfile>> = (0..dec.len())
        .into_par_iter()
        .map(|k| {
            let ps = profiles(dec.representatives[k])?;
            for w in dec.members(k) {
                if profiles(w)? != ps {
                    return Err(Error::CosetDisagreement(bits_to_hex(w, 16)));
                }
            }
            Ok(ps)
        })
        .collect::<Result<_>>()?;
    let mut unknown: Vec<PaschProfile> = Vec::new();
    let tuples = per_class
        .iter()
        .map(|ps| {
            std::array::from_fn(|i| {
                classify_type(&ps[i]).unwrap_or_else(|| {
                    if !unknown.contains(&ps[i]) {
                        unknown.push(ps[i].clone());
                    }
                    0
                })
            })
        })
        .collect();
    unknown.sort_by_key(|p| p.to_string());
    Ok(TypeScan { tuples, unknown })
}

/// One tuple per class, checked against every member of the class.
pub fn vertex_type_tuples(c16: &Code, dec: &CosetDecomposition) -> Result<Vec<TypeTuple>> {
    let scan = vertex_type_scan(c16, dec)?;
    match scan.unknown.first() {
        Some(p) => Err(Error::UnknownStsType(p.to_string())),
        None => Ok(scan.tuples),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Homogeneity {
    pub sqs_homogeneous: bool,
    pub sts_homogeneous: bool,
}

/// Same sorted tuple at every vertex; additionally constant for STS-homogeneity.
pub fn homogeneity(tuples: &[TypeTuple]) -> Homogeneity {
    let sorted = |t: &TypeTuple| {
        let mut s = *t;
        s.sort_unstable();
        s
    };
    let sqs = tuples.windows(2).all(|p| sorted(&p[0]) == sorted(&p[1]));
    let sts = sqs && tuples.first().is_none_or(|t| t.iter().all(|&x| x == t[0]));
    Homogeneity { sqs_homogeneous: sqs, sts_homogeneous: sts }
}

/// A uniformly seeded STS(15) by hill climbing.
pub fn random_sts<R: Rng>(rng: &mut R) -> StsSystem {
    let mut third = [[NONE; POINTS]; POINTS];
    let mut blocks = 0;
    while blocks < TRIPLES {
        let live: Vec<usize> =
            (0..POINTS).filter(|&p| (0..POINTS).any(|q| q != p && third[p][q] == NONE)).collect();
        let x = *live.choose(rng).expect("a live point exists");
        let free: Vec<usize> = (0..POINTS).filter(|&q| q != x && third[x][q] == NONE).collect();
        let mut pick = free.choose_multiple(rng, 2);
        let (y, z) = (*pick.next().expect("two free"), *pick.next().expect("two free"));
        if third[y][z] == NONE {
            blocks += 1;
        } else {
            let w = third[y][z] as usize;
            for (p, q) in [(y, z), (y, w), (z, w)] {
                third[p][q] = NONE;
                third[q][p] = NONE;
            }
        }
        for (p, q, r) in [(x, y, z), (x, z, y), (y, z, x)] {
            third[p][q] = r as u8;
            third[q][p] = r as u8;
        }
    }
    let mut triples = Vec::with_capacity(TRIPLES);
    for a in 0..POINTS {
        for b in a + 1..POINTS {
            let c = third[a][b] as usize;
            if c > b {
                triples.push([a as u8, b as u8, c as u8]);
            }
        }
    }
    StsSystem::from_triples(triples).expect("hill climbing ends in an STS")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cosets, kernel, normalize};
    use crate::doubling::tests::linear_partition8;
    use crate::doubling::{double, DoublingSpec, Sigma};
    use crate::sqs::sqs_of;
    use rand::SeedableRng;

    fn sp_code(sigma: &str) -> Code {
        let p = linear_partition8();
        let spec = DoublingSpec { source: p.clone(), target: p, sigma: sigma.parse::<Sigma>().unwrap() };
        normalize(&double(&spec).unwrap()).unwrap().0
    }

    fn projective_sts() -> StsSystem {
        // lines of PG(3,2): {a, b, a^b} over the nonzero vectors 1..15
        let mut ts = Vec::new();
        for a in 1u8..16 {
            for b in a + 1..16 {
                let c = a ^ b;
                if c > b {
                    ts.push([a - 1, b - 1, c - 1]);
                }
            }
        }
        StsSystem::from_triples(ts).unwrap()
    }

    #[test]
    fn projective_space_is_type_one() {
        let s = projective_sts();
        let p = pasch_profile(&s);
        assert_eq!(p.total, 105);
        assert_eq!(p.per_point, [42; 15]);
        assert_eq!(classify_type(&p), Some(1));
        assert_eq!(pasch_profile_brute(&s), p);
    }

    #[test]
    fn table_rows_are_consistent() {
        let rows = type_table();
        assert_eq!(rows.len(), 11);
        for (id, p) in &rows {
            assert_eq!(p.per_point.iter().sum::<u32>(), 6 * p.total, "type {id}");
            assert!(p.per_point.windows(2).all(|w| w[0] >= w[1]));
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                assert_ne!(rows[i].1, rows[j].1);
            }
        }
    }

    #[test]
    fn classify_known_signatures() {
        let sig = |total, runs: &[(u32, usize)]| {
            let mut pp = Vec::new();
            for &(v, r) in runs {
                pp.extend(std::iter::repeat_n(v, r));
            }
            PaschProfile { total, per_point: pp.try_into().unwrap() }
        };
        assert_eq!(classify_type(&sig(49, &[(21, 8), (18, 7)])), Some(16));
        assert_eq!(classify_type(&sig(49, &[(26, 2), (20, 4), (18, 9)])), Some(5));
        assert_eq!(classify_type(&sig(33, &[(18, 3), (12, 12)])), Some(7));
        assert_eq!(classify_type(&sig(0, &[(0, 15)])), None);
        assert!(matches!(sts_type(&sig(0, &[(0, 15)])), Err(Error::UnknownStsType(_))));
    }

    #[test]
    fn letters() {
        assert_eq!(type_letter(8), '8');
        assert_eq!(type_letter(13), 'c');
        assert_eq!(type_letter(14), 'd');
        assert_eq!(type_letter(16), 'g');
        assert_eq!(type_letter(11), '?');
        let t: TypeTuple = [8, 8, 8, 8, 8, 8, 8, 8, 3, 16, 3, 16, 3, 16, 3, 16];
        assert_eq!(render_type_tuple(&t), "888888883g3g3g3g");
        assert_eq!(parse_type_tuple("888888883g3g3g3g").unwrap(), t);
        assert!(parse_type_tuple("88888888").is_err());
        assert!(parse_type_tuple("0000000000000000").is_err());
    }

    #[test]
    fn axioms_enforced() {
        let mut ts = projective_sts().triples().to_vec();
        ts.pop();
        assert!(matches!(StsSystem::from_triples(ts.clone()), Err(Error::StsAxiom(_))));
        ts.push([0, 1, 3]);
        assert!(StsSystem::from_triples(ts).is_err());
    }

    #[test]
    fn linear_code_tuples_are_all_ones() {
        let c = sp_code("01234567");
        let zero = Word::zero(16).unwrap();
        assert_eq!(class_type_tuple(&c, zero).unwrap(), [1; 16]);
        let p = Punctures::new(&c).unwrap();
        assert_eq!(p.code(5).len(), 2048);
        let s = sts_of(p.code(5), Word::zero(15).unwrap()).unwrap();
        let mut direct: Vec<[u8; 3]> =
            p.code(5).words().iter().filter(|w| w.count_ones() == 3).map(|&w| mask_points(w)).collect();
        direct.sort_unstable();
        assert_eq!(s.triples(), &direct[..]);
        let h = homogeneity(&[[1; 16]]);
        assert!(h.sqs_homogeneous && h.sts_homogeneous);
    }

    #[test]
    fn derived_system_matches_punctured_code() {
        let c = sp_code("10325476");
        let p = Punctures::new(&c).unwrap();
        for &v in c.words().iter().step_by(301) {
            let sqs = sqs_of(&c, Word::new(16, v.into()).unwrap()).unwrap();
            for i in [0, 7, 8, 15] {
                let direct = sts_of_bits(p.code(i), puncture_bits(v, i)).unwrap();
                assert_eq!(derived_sts(&sqs, i).unwrap(), direct);
            }
        }
    }

    #[test]
    fn tuples_constant_on_kernel_classes() {
        let c = sp_code("10234567");
        let dec = cosets(&c, &kernel(&c).unwrap()).unwrap();
        let t = vertex_type_tuples(&c, &dec).unwrap();
        assert_eq!(t.len(), dec.len());
        let x = c.words()[77];
        let moved = c.translate_bits(x);
        let rep = Word::new(16, (dec.representatives[1] ^ x).into()).unwrap();
        assert_eq!(class_type_tuple(&moved, rep).unwrap(), t[1]);
    }

    #[test]
    fn homogeneity_predicates() {
        let a: TypeTuple = [8, 8, 8, 8, 8, 8, 8, 8, 3, 16, 3, 16, 3, 16, 3, 16];
        let b: TypeTuple = [8, 8, 8, 8, 8, 8, 8, 8, 16, 3, 16, 3, 16, 3, 16, 3];
        let h = homogeneity(&[a, b]);
        assert!(h.sqs_homogeneous && !h.sts_homogeneous);
        let h = homogeneity(&[a, [2; 16]]);
        assert!(!h.sqs_homogeneous && !h.sts_homogeneous);
        let h = homogeneity(&[[5; 16], [5; 16]]);
        assert!(h.sqs_homogeneous && h.sts_homogeneous);
    }

    #[test]
    fn random_systems_agree_under_both_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let s = random_sts(&mut rng);
            let p = pasch_profile(&s);
            assert_eq!(p, pasch_profile_brute(&s));
            let perm: Vec<usize> = (0..15).rev().collect();
            assert_eq!(pasch_profile(&s.relabel(&perm).unwrap()), p);
        }
    }
}
