//! Loop and link structure of the SQS-graph of a doubled code, checked
//! against the named quadruple families.
//!
//! Every edge of the graph gets one verdict. Loops and intra links (all
//! quadruples inside one half) are matched against families of `fano`,
//! first literally, then under a relabeling that preserves the two halves
//! (independent permutations of `0..8` and `8..16`, optionally swapping the
//! halves). Cross links (all quadruples split 2+2) must decompose into full
//! products or lexicographically ordered quarters.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{index2_subspaces, kernel, normalize, LinearSpan};
use crate::error::{Error, Result};
use crate::exact_cover::ExactCover;
use crate::fano::{all_pair_partitions, family, quarter, PairPartition};
use crate::partitions::permutations;
use crate::sqs::{quotient_graph, vertex_sum_check, SqsGraph, BLOCKS};
use crate::words::{format_quadruples, Code, Quadruple, QuadrupleSet};

/// Quadruples inside one half at every vertex, loop and intra links together.
pub const PURE_PER_VERTEX: usize = 28;
/// Split quadruples at every vertex.
pub const CROSS_PER_VERTEX: usize = BLOCKS - PURE_PER_VERTEX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Fail,
    SpectrumOnly,
    Relabeled,
    Exact,
}

impl Level {
    pub fn passes(self) -> bool {
        self != Level::Fail
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fail => "fail",
            Level::SpectrumOnly => "spectrum-only",
            Level::Relabeled => "relabeled",
            Level::Exact => "exact",
        })
    }
}

/// What the named families predict for a kernel dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub kappa: usize,
    pub loop_family: &'static str,
    pub loop_multiplicity: usize,
    /// Loop quadruples inside `0..8` and inside `8..16`, shifted to `0..8`.
    pub loop_left: Vec<u8>,
    pub loop_right: Vec<u8>,
    /// Split quadruples of the loop must form one full product.
    pub loop_product: bool,
    pub intra_families: &'static [&'static str],
    /// Sizes of the intra links at one vertex, ascending.
    pub intra_sizes: Vec<usize>,
    /// Full products per cross link, or `None` when cross links are quarters.
    pub products_per_link: Option<usize>,
    /// Most quarters a cross link may hold when `products_per_link` is `None`.
    pub max_quarters: usize,
}

fn half_masks(set: &QuadrupleSet) -> (Vec<u8>, Vec<u8>) {
    let mut l: Vec<u8> = set.iter().filter(|q| q.left_count() == 4).map(|q| q.mask() as u8).collect();
    let mut r: Vec<u8> = set.iter().filter(|q| q.left_count() == 0).map(|q| (q.mask() >> 8) as u8).collect();
    l.sort_unstable();
    r.sort_unstable();
    (l, r)
}

pub fn expectation(kappa: usize) -> Result<Expectation> {
    let fam = |n: &str| family(n).expect("listed family");
    let (name, set, product, intra, sizes, per_link): (_, QuadrupleSet, _, &'static [&'static str], Vec<usize>, _) =
        match kappa {
            9 => ("X∪Y∪Z+product", [fam("X"), fam("Y"), fam("Z")].concat_sets(), true, &[], vec![], Some(2)),
            8 => ("X∪Y∪Z", [fam("X"), fam("Y"), fam("Z")].concat_sets(), false, &[], vec![], Some(1)),
            7 => ("X'", fam("X'"), false, &["X"], vec![7], None),
            6 => ("Z'", fam("Z'"), false, &["A", "B", "B'"], vec![3, 4, 4], None),
            5 => (
                "Z0",
                fam("Z0"),
                false,
                &["A0", "A1", "B0", "B1", "A1'", "B0'", "B1'"],
                vec![1, 2, 2, 2, 2, 2, 2],
                None,
            ),
            k => return Err(Error::KappaOutOfRange(k)),
        };
    let (loop_left, loop_right) = half_masks(&set);
    Ok(Expectation {
        kappa,
        loop_family: name,
        loop_multiplicity: set.len() + if product { 16 } else { 0 },
        loop_left,
        loop_right,
        loop_product: product,
        intra_families: intra,
        intra_sizes: sizes,
        products_per_link: per_link,
        max_quarters: 3,
    })
}

trait ConcatSets {
    fn concat_sets(self) -> QuadrupleSet;
}

impl<const N: usize> ConcatSets for [QuadrupleSet; N] {
    fn concat_sets(self) -> QuadrupleSet {
        self.into_iter().flatten().collect()
    }
}

fn perms8() -> &'static [[u8; 8]] {
    static P: OnceLock<Vec<[u8; 8]>> = OnceLock::new();
    P.get_or_init(|| {
        permutations(8)
            .into_iter()
            .map(|p| std::array::from_fn(|i| p[i] as u8))
            .collect()
    })
}

fn map_mask(m: u8, p: &[u8; 8]) -> u8 {
    (0..8).filter(|&i| m >> i & 1 == 1).fold(0, |acc, i| acc | 1 << p[i])
}

fn point_degrees(set: &[u8]) -> [usize; 9] {
    let mut deg = [0usize; 8];
    for &m in set {
        for (i, d) in deg.iter_mut().enumerate() {
            *d += (m >> i & 1) as usize;
        }
    }
    let mut hist = [0usize; 9];
    for d in deg {
        hist[d.min(8)] += 1;
    }
    hist
}

/// Permutations of eight points carrying one set of 4-subsets onto another,
/// memoised since loops repeat across vertices.
#[derive(Default)]
pub struct Relabeler {
    cache: HashMap<(Vec<u8>, Vec<u8>), Option<[u8; 8]>>,
}

impl Relabeler {
    pub fn find(&mut self, from: &[u8], to: &[u8]) -> Option<[u8; 8]> {
        if from.len() != to.len() {
            return None;
        }
        let key = (from.to_vec(), to.to_vec());
        if let Some(&hit) = self.cache.get(&key) {
            return hit;
        }
        let found = if point_degrees(from) != point_degrees(to) {
            None
        } else {
            let mut target = [0u64; 4];
            for &m in to {
                target[m as usize / 64] |= 1 << (m % 64);
            }
            perms8().iter().copied().find(|p| {
                from.iter().all(|&m| {
                    let x = map_mask(m, p);
                    target[x as usize / 64] >> (x % 64) & 1 == 1
                })
            })
        };
        self.cache.insert(key, found);
        found
    }
}

fn render_perm(p: &[u8; 8], offset: u8) -> String {
    p.iter().map(|&x| crate::words::hex_digit((x + offset) as usize)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoopVerdict {
    pub vertex: usize,
    pub expected_family: String,
    pub expected_multiplicity: usize,
    pub multiplicity: usize,
    pub left: usize,
    pub right: usize,
    pub split: usize,
    pub quadruples: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relabeling: Option<String>,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    Intra,
    Cross,
    Malformed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkVerdict {
    pub a: usize,
    pub b: usize,
    pub multiplicity: usize,
    pub kind: LinkKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// `(left, right)` pair-partitions of each full product, right half in hex.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<(String, String)>,
    /// `(left pair, right pair-partition)` of each quarter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quarters: Vec<(String, String)>,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexVerdict {
    pub vertex: usize,
    pub pure: usize,
    pub cross: usize,
    pub total: usize,
    pub intra_sizes: Vec<usize>,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The index-2 refinement used for kernel dimension 9.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RefinementVerdict {
    pub subspace_basis: Vec<String>,
    pub loop_multiplicities: Vec<usize>,
    pub folding_edges: Vec<usize>,
    pub merges_to_kernel_graph: bool,
    pub level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureReport {
    pub kappa: usize,
    pub vertex_count: usize,
    pub loops: Vec<LoopVerdict>,
    pub links: Vec<LinkVerdict>,
    pub vertices: Vec<VertexVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementVerdict>,
    pub multiplicity_matrix: Vec<Vec<usize>>,
    pub symmetric: bool,
    pub vertex_sums: bool,
    pub half_split: bool,
    pub level: Level,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn edge_count(&self) -> usize {
        self.loops.len() + self.links.len()
    }

    /// Loop multiplicities that occur, ascending and deduplicated.
    pub fn loop_multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.loops.iter().map(|l| l.multiplicity).collect();
        m.sort_unstable();
        m.dedup();
        m
    }
}

fn quads(set: &[Quadruple]) -> QuadrupleSet {
    set.iter().copied().collect()
}

fn as_set(masks_left: &[u8], masks_right: &[u8]) -> Vec<u16> {
    let mut v: Vec<u16> = masks_left.iter().map(|&m| m as u16).chain(masks_right.iter().map(|&m| (m as u16) << 8)).collect();
    v.sort_unstable();
    v
}

/// Split quadruples into full products, if possible.
fn product_cover(set: &QuadrupleSet) -> Option<Vec<(PairPartition, PairPartition)>> {
    if set.is_empty() || !set.len().is_multiple_of(16) || set.iter().any(|q| q.left_count() != 2) {
        return None;
    }
    let parts = all_pair_partitions();
    let lefts: Vec<PairPartition> = parts
        .iter()
        .copied()
        .filter(|l| {
            l.pairs().iter().all(|&p| {
                let pm = 1u16 << p[0] | 1 << p[1];
                set.iter().any(|q| q.mask() & 0xff == pm)
            })
        })
        .collect();
    let mut cands = Vec::new();
    for l in &lefts {
        for r in &parts {
            let prod: QuadrupleSet = l.pairs().iter().flat_map(|&p| quarter(p, r)).collect();
            if prod.is_subset(set) {
                cands.push(((*l, *r), prod));
            }
        }
    }
    cover(set, &cands)
}

/// Split quadruples into lexicographically ordered quarters, if possible.
fn quarter_cover(set: &QuadrupleSet) -> Option<Vec<([u8; 2], PairPartition)>> {
    if set.is_empty() || !set.len().is_multiple_of(4) || set.iter().any(|q| q.left_count() != 2) {
        return None;
    }
    let mut lefts: Vec<u16> = set.iter().map(|q| q.mask() & 0xff).collect();
    lefts.sort_unstable();
    lefts.dedup();
    let parts = all_pair_partitions();
    let mut cands = Vec::new();
    for &lm in &lefts {
        let pair = [lm.trailing_zeros() as u8, 15 - lm.leading_zeros() as u8];
        for r in &parts {
            let qt = quarter(pair, r);
            if qt.is_subset(set) {
                cands.push(((pair, *r), qt));
            }
        }
    }
    cover(set, &cands)
}

fn cover<T: Copy>(set: &QuadrupleSet, cands: &[(T, QuadrupleSet)]) -> Option<Vec<T>> {
    let index: BTreeMap<Quadruple, usize> = set.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let rows: Vec<Vec<usize>> = cands.iter().map(|(_, s)| s.iter().map(|q| index[q]).collect()).collect();
    let mut found = None;
    let _ = ExactCover::new(set.len(), &rows).solve(|sol| {
        found = Some(sol.iter().map(|&r| cands[r].0).collect());
        ControlFlow::Break(())
    });
    found
}

fn render_right(p: &PairPartition) -> String {
    let pairs: Vec<String> = p
        .pairs()
        .iter()
        .map(|q| q.iter().map(|&x| crate::words::hex_digit(x as usize + 8)).collect())
        .collect();
    format!("({})", pairs.join(","))
}

fn render_pair(p: [u8; 2]) -> String {
    p.iter().map(|&x| crate::words::hex_digit(x as usize)).collect()
}

struct Checker {
    exp: Expectation,
    relabeler: Relabeler,
    intra_targets: Vec<(&'static str, Vec<u8>)>,
}

impl Checker {
    fn new(kappa: usize) -> Result<Self> {
        let exp = expectation(kappa)?;
        let intra_targets = exp
            .intra_families
            .iter()
            .map(|&n| (n, half_masks(&family(n).expect("listed family")).0))
            .collect();
        Ok(Checker { exp, relabeler: Relabeler::default(), intra_targets })
    }

    fn check_loop(&mut self, vertex: usize, qs: &[Quadruple]) -> LoopVerdict {
        let set = quads(qs);
        let (l, r) = half_masks(&set);
        let split: QuadrupleSet = set.iter().copied().filter(|q| q.left_count() == 2).collect();
        let odd = set.iter().any(|q| q.left_count() % 2 == 1);
        let exp = &self.exp;
        let mut v = LoopVerdict {
            vertex,
            expected_family: exp.loop_family.to_string(),
            expected_multiplicity: exp.loop_multiplicity,
            multiplicity: set.len(),
            left: l.len(),
            right: r.len(),
            split: split.len(),
            quadruples: format_quadruples(&set),
            relabeling: None,
            level: Level::Fail,
            note: None,
        };
        if odd {
            v.note = Some("quadruple with an odd number of left points".into());
            return v;
        }
        if set.len() != exp.loop_multiplicity {
            v.note = Some(format!(
                "multiplicity {} (left {}, right {}, split {}), expected {}",
                set.len(),
                l.len(),
                r.len(),
                split.len(),
                exp.loop_multiplicity
            ));
            return v;
        }
        let split_ok = if exp.loop_product {
            product_cover(&split).is_some_and(|c| c.len() == 1)
        } else {
            split.is_empty()
        };
        if !split_ok {
            v.level = Level::SpectrumOnly;
            v.note = Some(format!("split part of size {} does not match", split.len()));
            return v;
        }
        if as_set(&l, &r) == as_set(&exp.loop_left, &exp.loop_right) {
            v.level = Level::Exact;
            return v;
        }
        let (el, er) = (exp.loop_left.clone(), exp.loop_right.clone());
        if let (Some(pl), Some(pr)) = (self.relabeler.find(&l, &el), self.relabeler.find(&r, &er)) {
            v.level = Level::Relabeled;
            v.relabeling = Some(format!("{}{}", render_perm(&pl, 0), render_perm(&pr, 8)));
        } else if let (Some(pl), Some(pr)) = (self.relabeler.find(&r, &el), self.relabeler.find(&l, &er)) {
            v.level = Level::Relabeled;
            v.relabeling = Some(format!("swap {}{}", render_perm(&pl, 0), render_perm(&pr, 8)));
        } else {
            v.level = Level::SpectrumOnly;
            v.note = Some("multiplicity matches but no half-preserving relabeling does".into());
        }
        v
    }

    fn check_intra(&mut self, v: &mut LinkVerdict, set: &QuadrupleSet) {
        let (l, r) = half_masks(set);
        let (half, masks) = if r.is_empty() { (0usize, l) } else { (8usize, r) };
        if self.exp.intra_families.is_empty() {
            v.note = Some(format!("intra link of size {} where none is expected", set.len()));
            return;
        }
        if half == 0 {
            for (name, target) in &self.intra_targets {
                if *target == masks {
                    v.family = Some(name.to_string());
                    v.level = Level::Exact;
                    return;
                }
            }
        }
        for i in 0..self.intra_targets.len() {
            let (name, target) = self.intra_targets[i].clone();
            if let Some(p) = self.relabeler.find(&masks, &target) {
                v.family = Some(format!("{name} via {}", render_perm(&p, half as u8)));
                v.level = Level::Relabeled;
                return;
            }
        }
        if self.exp.intra_sizes.contains(&set.len()) {
            v.level = Level::SpectrumOnly;
            v.note = Some("size matches a family but no relabeling does".into());
        } else {
            v.note = Some(format!("intra link of size {}, expected sizes {:?}", set.len(), self.exp.intra_sizes));
        }
    }

    /// Decompose in construction coordinates, or with the halves exchanged.
    fn check_cross(&self, v: &mut LinkVerdict, set: &QuadrupleSet, swapped: bool) {
        v.products.clear();
        v.quarters.clear();
        v.level = Level::Fail;
        v.note = None;
        let swapped_set: QuadrupleSet;
        let set = if swapped {
            swapped_set = set.iter().map(|q| Quadruple::from_mask(q.mask().rotate_left(8)).expect("weight 4")).collect();
            &swapped_set
        } else {
            set
        };
        let hit = if swapped { Level::Relabeled } else { Level::Exact };
        match self.exp.products_per_link {
            Some(n) => match product_cover(set) {
                Some(ps) => {
                    v.products = ps.iter().map(|(a, b)| (a.to_string(), render_right(b))).collect();
                    if ps.len() == n {
                        v.level = hit;
                    } else {
                        v.note = Some(format!("{} products, expected {n}", ps.len()));
                    }
                }
                None => v.note = Some("not a union of full products".into()),
            },
            None => match quarter_cover(set) {
                Some(qs) => {
                    v.quarters = qs.iter().map(|&(p, r)| (render_pair(p), render_right(&r))).collect();
                    if qs.len() <= self.exp.max_quarters {
                        v.level = hit;
                    } else {
                        v.note = Some(format!("{} quarters, expected at most {}", qs.len(), self.exp.max_quarters));
                    }
                }
                None => v.note = Some("not a union of ordered quarters".into()),
            },
        }
    }
}

/// Verdicts for loops, links and vertex totals of a graph over the kernel.
pub fn verify_graph(g: &SqsGraph, kappa: usize) -> Result<StructureReport> {
    let mut checker = Checker::new(kappa)?;
    let n = g.vertex_count();
    let mut loops = Vec::new();
    let mut links = Vec::new();
    let mut failures = Vec::new();
    let mut half_split = true;
    for e in &g.edges {
        let set = quads(&e.quadruples);
        if set.iter().any(|q| q.left_count() % 2 == 1) {
            half_split = false;
        }
        if e.is_loop() {
            let v = checker.check_loop(e.a, &e.quadruples);
            if v.level == Level::Fail {
                failures.push(format!("loop at {}: {}", e.a, v.note.clone().unwrap_or_default()));
            }
            loops.push(v);
            continue;
        }
        let pure = set.iter().filter(|q| q.left_count() != 2).count();
        let left = set.iter().filter(|q| q.left_count() == 4).count();
        let kind = if pure == 0 {
            LinkKind::Cross
        } else if pure == set.len() && (left == 0 || left == set.len()) {
            LinkKind::Intra
        } else {
            LinkKind::Malformed
        };
        let mut v = LinkVerdict {
            a: e.a,
            b: e.b,
            multiplicity: set.len(),
            kind,
            family: None,
            products: vec![],
            quarters: vec![],
            level: Level::Fail,
            note: None,
        };
        match kind {
            LinkKind::Intra => checker.check_intra(&mut v, &set),
            LinkKind::Cross => checker.check_cross(&mut v, &set, false),
            LinkKind::Malformed => v.note = Some("link mixes halves".into()),
        }
        links.push(v);
    }
    // One orientation for the whole graph: halves exchanged only when that
    // leaves fewer undecomposed cross links.
    let cross: Vec<usize> = (0..links.len()).filter(|&i| links[i].kind == LinkKind::Cross).collect();
    if cross.iter().any(|&i| links[i].level == Level::Fail) {
        let mut trial: Vec<LinkVerdict> = cross.iter().map(|&i| links[i].clone()).collect();
        for t in trial.iter_mut() {
            let e = g.edge(t.a, t.b).expect("edge of this graph");
            checker.check_cross(t, &quads(&e.quadruples), true);
        }
        let fails = |it: &mut dyn Iterator<Item = &LinkVerdict>| it.filter(|t| t.level == Level::Fail).count();
        if fails(&mut trial.iter()) < fails(&mut cross.iter().map(|&i| &links[i])) {
            for (&i, t) in cross.iter().zip(trial) {
                links[i] = t;
            }
        }
    }
    for v in &links {
        if v.level == Level::Fail {
            failures.push(format!("edge ({}, {}): {}", v.a, v.b, v.note.clone().unwrap_or_default()));
        }
    }
    for l in 0..n {
        if g.loop_at(l).is_none() {
            failures.push(format!("vertex {l} has no loop"));
            loops.push(LoopVerdict {
                vertex: l,
                expected_family: checker.exp.loop_family.to_string(),
                expected_multiplicity: checker.exp.loop_multiplicity,
                multiplicity: 0,
                left: 0,
                right: 0,
                split: 0,
                quadruples: vec![],
                relabeling: None,
                level: Level::Fail,
                note: Some("missing loop".into()),
            });
        }
    }
    loops.sort_by_key(|l| l.vertex);
    let vertices: Vec<VertexVerdict> = (0..n)
        .map(|v| {
            let mut pure = 0;
            let mut cross = 0;
            let mut intra_sizes = Vec::new();
            for e in g.incident(v) {
                let p = e.quadruples.iter().filter(|q| q.left_count() != 2).count();
                pure += p;
                cross += e.quadruples.len() - p;
                if !e.is_loop() && p == e.quadruples.len() {
                    intra_sizes.push(p);
                }
            }
            intra_sizes.sort_unstable();
            let total = pure + cross;
            let mut notes = Vec::new();
            if total != BLOCKS {
                notes.push(format!("total {total}, expected {BLOCKS}"));
            }
            if pure != PURE_PER_VERTEX {
                notes.push(format!("loop and intra links hold {pure}, expected {PURE_PER_VERTEX}"));
            }
            if cross != CROSS_PER_VERTEX {
                notes.push(format!("cross links hold {cross}, expected {CROSS_PER_VERTEX}"));
            }
            if intra_sizes != checker.exp.intra_sizes {
                notes.push(format!("intra link sizes {intra_sizes:?}, expected {:?}", checker.exp.intra_sizes));
            }
            let level = if notes.is_empty() { Level::Exact } else { Level::Fail };
            let note = (!notes.is_empty()).then(|| notes.join("; "));
            if let Some(s) = &note {
                failures.push(format!("vertex {v}: {s}"));
            }
            VertexVerdict { vertex: v, pure, cross, total, intra_sizes, level, note }
        })
        .collect();
    let matrix = g.multiplicity_matrix();
    let symmetric = (0..n).all(|i| (0..n).all(|j| matrix[i][j] == matrix[j][i]));
    let vertex_sums = vertex_sum_check(g);
    if !symmetric {
        failures.push("multiplicity matrix is not symmetric".into());
    }
    if !half_split {
        failures.push("a quadruple has an odd number of left points".into());
    }
    let level = loops
        .iter()
        .map(|l| l.level)
        .chain(links.iter().map(|l| l.level))
        .chain(vertices.iter().map(|v| v.level))
        .chain([if symmetric && vertex_sums && half_split { Level::Exact } else { Level::Fail }])
        .min()
        .unwrap_or(Level::Fail);
    Ok(StructureReport {
        kappa,
        vertex_count: n,
        loops,
        links,
        vertices,
        refinement: None,
        multiplicity_matrix: matrix,
        symmetric,
        vertex_sums,
        half_split,
        level,
        pass: level.passes(),
        failures,
    })
}

/// Kernel dimension implied by the number of classes of a 2048-word code.
pub fn kappa_from_vertices(n: usize) -> Result<usize> {
    if !n.is_power_of_two() || n > 2048 {
        return Err(Error::Parse(format!("{n} vertices is not a class count of a 2048-word code")));
    }
    Ok(11 - n.trailing_zeros() as usize)
}

/// Verify a graph read back from JSON, with the kernel dimension taken from its size.
pub fn verify_graph_json(g: &SqsGraph) -> Result<StructureReport> {
    verify_graph(g, kappa_from_vertices(g.vertex_count())?)
}

/// For kernel dimension 9: an index-2 subspace without split weight-4 words,
/// whose graph has loops of 28 and whose folding edges are single products.
pub fn verify_refinement(c: &Code, k: &LinearSpan, over_kernel: &SqsGraph) -> Result<RefinementVerdict> {
    let is_split = |x: u16| x.count_ones() == 4 && (x & 0xff).count_ones() == 2;
    let pure: Vec<u16> = k.elements().into_iter().filter(|&x| x.count_ones() == 4 && !is_split(x)).collect();
    let chosen = index2_subspaces(k)?
        .into_iter()
        .find(|l| pure.iter().all(|&x| l.contains(x)) && l.elements().into_iter().all(|x| !is_split(x)));
    let Some(l) = chosen else {
        return Ok(RefinementVerdict {
            subspace_basis: vec![],
            loop_multiplicities: vec![],
            folding_edges: vec![],
            merges_to_kernel_graph: false,
            level: Level::Fail,
            note: Some("no index-2 subspace keeps the pure and drops the split weight-4 words".into()),
        });
    };
    let g = quotient_graph(c, &l)?;
    let classes = crate::algebra::cosets(c, k)?;
    let class_of: Vec<usize> = g
        .vertices
        .iter()
        .map(|v| classes.coset_of(v.representative).expect("codeword"))
        .collect();
    let mut loop_multiplicities: Vec<usize> = g.edges.iter().filter(|e| e.is_loop()).map(|e| e.multiplicity()).collect();
    loop_multiplicities.sort_unstable();
    loop_multiplicities.dedup();
    let folding: Vec<&crate::sqs::Edge> =
        g.edges.iter().filter(|e| !e.is_loop() && class_of[e.a] == class_of[e.b]).collect();
    let mut folding_edges: Vec<usize> = folding.iter().map(|e| e.multiplicity()).collect();
    folding_edges.sort_unstable();
    folding_edges.dedup();
    let products_ok = folding.len() == g.vertex_count() / 2
        && folding.iter().all(|e| product_cover(&quads(&e.quadruples)).is_some_and(|p| p.len() == 1));
    let merged = g.merge(&class_of)?;
    let merges = merged.multiplicity_matrix() == over_kernel.multiplicity_matrix()
        && merged.edges.iter().zip(&over_kernel.edges).all(|(x, y)| x.quadruples == y.quadruples)
        && merged.edges.len() == over_kernel.edges.len();
    let ok = loop_multiplicities == [PURE_PER_VERTEX] && products_ok && merges;
    Ok(RefinementVerdict {
        subspace_basis: l.basis().iter().map(|&b| crate::words::bits_to_hex(b, 16)).collect(),
        loop_multiplicities,
        folding_edges,
        merges_to_kernel_graph: merges,
        level: if ok { Level::Exact } else { Level::Fail },
        note: (!ok).then(|| "refinement does not split the loop into 28 plus one product".into()),
    })
}

/// Fold over the kernel and verify; kernel dimension must lie in `5..=9`.
pub fn full_report(c: &Code) -> Result<StructureReport> {
    let (c, _) = normalize(c)?;
    let k = kernel(&c)?;
    let kappa = k.dimension();
    if !(5..=9).contains(&kappa) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let g = quotient_graph(&c, &k)?;
    let mut report = verify_graph(&g, kappa)?;
    if kappa == 9 {
        let r = verify_refinement(&c, &k, &g)?;
        if r.level == Level::Fail {
            report.failures.push(format!("refinement: {}", r.note.clone().unwrap_or_default()));
        }
        report.level = report.level.min(r.level);
        report.pass = report.level.passes();
        report.refinement = Some(r);
    }
    Ok(report)
}
