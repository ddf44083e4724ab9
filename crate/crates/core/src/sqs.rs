//! Steiner quadruple systems at codewords, foldability over kernel
//! subspaces, and the quotient SQS-graph.
//!
//! For an extended 1-perfect code of length 16 the codewords at distance 4
//! from `v` differ from it in the blocks of an SQS(16) with 140 blocks.
//! Given a subspace `L` of the kernel, these labels respect the classes
//! `v + L`, so the minimum-distance graph folds onto a multigraph on the
//! classes whose edges carry disjoint label sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{cosets, CosetDecomposition, LinearSpan};
use crate::error::{Error, Result};
use crate::sts::{parse_type_tuple, render_type_tuple, TypeTuple};
use crate::words::{bits_to_hex, Code, Quadruple, Word};

pub const POINTS: usize = 16;
pub const BLOCKS: usize = 140;
const TRIPLES: usize = 560;
const NO_INDEX: u16 = u16::MAX;

/// The 1820 weight-4 words of length 16, ascending.
pub fn weight4_masks() -> &'static [u16] {
    static MASKS: OnceLock<Vec<u16>> = OnceLock::new();
    MASKS.get_or_init(|| (0..=u16::MAX).filter(|m| m.count_ones() == 4).collect())
}

/// A Steiner quadruple system on the points `0..16`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqsSystem {
    blocks: Vec<Quadruple>,
}

impl SqsSystem {
    /// Validates that every 3-subset of `0..16` lies in exactly one block.
    pub fn from_blocks(blocks: impl IntoIterator<Item = Quadruple>) -> Result<Self> {
        let mut blocks: Vec<Quadruple> = blocks.into_iter().collect();
        blocks.sort_unstable();
        blocks.dedup();
        if blocks.len() != BLOCKS {
            return Err(Error::SqsAxiom(format!("{} blocks, expected {BLOCKS}", blocks.len())));
        }
        let mut covered = vec![0u8; 1 << 16];
        let mut distinct = 0;
        for q in &blocks {
            let m = q.mask();
            let mut rest = m;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                let t = (m ^ bit) as usize;
                if covered[t] == 0 {
                    distinct += 1;
                }
                covered[t] += 1;
                if covered[t] > 1 {
                    return Err(Error::SqsAxiom(format!("triple {t:#06x} covered twice")));
                }
                rest ^= bit;
            }
        }
        if distinct != TRIPLES {
            return Err(Error::SqsAxiom(format!("{distinct} triples covered, expected {TRIPLES}")));
        }
        Ok(SqsSystem { blocks })
    }

    pub fn blocks(&self) -> &[Quadruple] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, q: Quadruple) -> bool {
        self.blocks.binary_search(&q).is_ok()
    }
}

fn check_sixteen(c: &Code) -> Result<()> {
    if c.length() != POINTS {
        return Err(Error::UnsupportedLength(c.length()));
    }
    Ok(())
}

/// Labels of the codewords at distance 4 from `v`.
pub fn sqs_of(c: &Code, v: Word) -> Result<SqsSystem> {
    check_sixteen(c)?;
    if !c.contains(v) {
        return Err(Error::NotInCode(v.to_hex()));
    }
    sqs_of_bits(c, v.bits())
}

pub(crate) fn sqs_of_bits(c: &Code, v: u16) -> Result<SqsSystem> {
    let blocks = weight4_masks()
        .iter()
        .filter(|&&m| c.contains_bits(v ^ m))
        .map(|&m| Quadruple::from_mask(m).expect("weight 4"));
    SqsSystem::from_blocks(blocks)
}

/// Target class of every label at every class representative:
/// `targets[a][i]` is the class of `rep_a + mask_i`, or `NO_INDEX`.
fn label_targets(c: &Code, dec: &CosetDecomposition) -> Vec<Vec<u16>> {
    let masks = weight4_masks();
    dec.representatives
        .iter()
        .map(|&u| {
            masks
                .iter()
                .map(|&m| match dec.coset_of(u ^ m) {
                    Some(b) if c.contains_bits(u ^ m) => b as u16,
                    _ => NO_INDEX,
                })
                .collect()
        })
        .collect()
}

/// First codeword whose labels disagree with its class representative.
fn fold_violation(c: &Code, dec: &CosetDecomposition, targets: &[Vec<u16>]) -> Option<String> {
    let masks = weight4_masks();
    for &w in c.words() {
        let a = dec.coset_of(w).expect("codeword has a class");
        for (i, &m) in masks.iter().enumerate() {
            let here = if c.contains_bits(w ^ m) {
                dec.coset_of(w ^ m).map_or(NO_INDEX, |b| b as u16)
            } else {
                NO_INDEX
            };
            if here != targets[a][i] {
                return Some(format!(
                    "codeword {} label {} reaches class {here} but its representative reaches {}",
                    bits_to_hex(w, c.length()),
                    Quadruple::from_mask(m).expect("weight 4"),
                    targets[a][i]
                ));
            }
        }
    }
    None
}

/// Every codeword of a class has exactly one neighbour per label, landing in
/// the class its representative's neighbour lands in.
pub fn foldable(c: &Code, l: &LinearSpan) -> Result<bool> {
    check_sixteen(c)?;
    let dec = cosets(c, l)?;
    let targets = label_targets(c, &dec);
    Ok(fold_violation(c, &dec, &targets).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub representative: u16,
    pub sts_tuple: Option<TypeTuple>,
}

/// An edge `a <= b`; a loop when `a == b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub quadruples: Vec<Quadruple>,
}

impl Edge {
    pub fn multiplicity(&self) -> usize {
        self.quadruples.len()
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// Quotient of the minimum-distance graph by a kernel subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqsGraph {
    pub vertices: Vec<Vertex>,
    /// Sorted by `(a, b)`.
    pub edges: Vec<Edge>,
}

/// Fold `c` over `l`, checking the covering property at every codeword.
pub fn quotient_graph(c: &Code, l: &LinearSpan) -> Result<SqsGraph> {
    check_sixteen(c)?;
    let dec = cosets(c, l)?;
    let targets = label_targets(c, &dec);
    if let Some(v) = fold_violation(c, &dec, &targets) {
        return Err(Error::Foldability(v));
    }
    let masks = weight4_masks();
    let mut buckets: BTreeMap<(usize, usize), Vec<Quadruple>> = BTreeMap::new();
    for (a, row) in targets.iter().enumerate() {
        for (i, &b) in row.iter().enumerate() {
            if b != NO_INDEX {
                let q = Quadruple::from_mask(masks[i]).expect("weight 4");
                buckets.entry((a, b as usize)).or_default().push(q);
            }
        }
    }
    for qs in buckets.values_mut() {
        qs.sort_unstable();
    }
    let mut edges = Vec::new();
    for (&(a, b), qs) in &buckets {
        if a > b {
            continue;
        }
        if buckets.get(&(b, a)) != Some(qs) {
            return Err(Error::Foldability(format!("labels of edge {a}-{b} differ between its ends")));
        }
        edges.push(Edge { a, b, quadruples: qs.clone() });
    }
    let vertices = dec
        .representatives
        .iter()
        .enumerate()
        .map(|(id, &representative)| Vertex { id, representative, sts_tuple: None })
        .collect();
    Ok(SqsGraph { vertices, edges })
}

impl SqsGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges touching `v`, the loop included once.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.a == v || e.b == v)
    }

    pub fn loop_at(&self, v: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.a == v && e.b == v)
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b)
    }

    pub fn degree_multiplicity(&self, v: usize) -> usize {
        self.incident(v).map(Edge::multiplicity).sum()
    }

    /// `m[a][b]` is the multiplicity of the edge `a-b`, loops on the diagonal.
    pub fn multiplicity_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut m = vec![vec![0; n]; n];
        for e in &self.edges {
            m[e.a][e.b] = e.multiplicity();
            m[e.b][e.a] = e.multiplicity();
        }
        m
    }

    /// Identify vertices by `class_of[v]`; new ids follow ascending least representative.
    pub fn merge(&self, class_of: &[usize]) -> Result<SqsGraph> {
        if class_of.len() != self.vertices.len() {
            return Err(Error::SizeMismatch { got: class_of.len(), expected: self.vertices.len() });
        }
        let mut least: BTreeMap<usize, u16> = BTreeMap::new();
        for (v, &k) in class_of.iter().enumerate() {
            let r = self.vertices[v].representative;
            least.entry(k).and_modify(|x| *x = (*x).min(r)).or_insert(r);
        }
        let mut order: Vec<(u16, usize)> = least.iter().map(|(&k, &r)| (r, k)).collect();
        order.sort_unstable();
        let renumber: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &(_, k))| (k, i)).collect();
        let mut buckets: BTreeMap<(usize, usize), Vec<Quadruple>> = BTreeMap::new();
        for e in &self.edges {
            let (x, y) = (renumber[&class_of[e.a]], renumber[&class_of[e.b]]);
            buckets.entry((x.min(y), x.max(y))).or_default().extend(&e.quadruples);
        }
        let edges = buckets
            .into_iter()
            .map(|((a, b), mut qs)| {
                qs.sort_unstable();
                qs.dedup();
                Edge { a, b, quadruples: qs }
            })
            .collect();
        let vertices = order
            .iter()
            .enumerate()
            .map(|(id, &(representative, _))| Vertex { id, representative, sts_tuple: None })
            .collect();
        Ok(SqsGraph { vertices, edges })
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id,
                    representative: bits_to_hex(v.representative, POINTS),
                    sts_tuple: v.sts_tuple.as_ref().map(render_type_tuple),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    a: e.a,
                    b: e.b,
                    quadruples: e.quadruples.iter().map(ToString::to_string).collect(),
                    multiplicity: e.multiplicity(),
                })
                .collect(),
        }
    }

    /// Rejects edges whose stored multiplicity disagrees with their label count.
    pub fn from_json(j: &GraphJson) -> Result<SqsGraph> {
        let n = j.vertices.len();
        let mut vertices = Vec::with_capacity(n);
        for (i, v) in j.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::Parse(format!("vertex ids must be 0..{n} in order, found {} at {i}", v.id)));
            }
            vertices.push(Vertex {
                id: v.id,
                representative: Word::from_hex(POINTS, &v.representative)?.bits(),
                sts_tuple: v.sts_tuple.as_deref().map(parse_type_tuple).transpose()?,
            });
        }
        let mut edges = Vec::with_capacity(j.edges.len());
        for e in &j.edges {
            if e.a >= n || e.b >= n {
                return Err(Error::Parse(format!("edge {}-{} names a missing vertex", e.a, e.b)));
            }
            let mut qs: Vec<Quadruple> = e.quadruples.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            qs.sort_unstable();
            qs.dedup();
            if qs.len() != e.multiplicity {
                return Err(Error::Parse(format!(
                    "edge {}-{} has multiplicity {} but {} distinct quadruples",
                    e.a,
                    e.b,
                    e.multiplicity,
                    qs.len()
                )));
            }
            edges.push(Edge { a: e.a.min(e.b), b: e.a.max(e.b), quadruples: qs });
        }
        edges.sort_by_key(|e| (e.a, e.b));
        if edges.windows(2).any(|p| (p[0].a, p[0].b) == (p[1].a, p[1].b)) {
            return Err(Error::Parse("duplicate edge".into()));
        }
        Ok(SqsGraph { vertices, edges })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph sqs {\n");
        for v in &self.vertices {
            let label = match &v.sts_tuple {
                Some(t) => format!("{}\\n{}", v.id, render_type_tuple(t)),
                None => v.id.to_string(),
            };
            let _ = writeln!(s, "  v{} [label=\"{label}\"];", v.id);
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.multiplicity());
        }
        s.push_str("}\n");
        s
    }

    /// Multiplicity matrix with a header row and a leading id column.
    pub fn to_csv(&self) -> String {
        let m = self.multiplicity_matrix();
        let mut s = String::from("vertex");
        for v in &self.vertices {
            let _ = write!(s, ",{}", v.id);
        }
        s.push('\n');
        for (i, row) in m.iter().enumerate() {
            let _ = write!(s, "{i}");
            for x in row {
                let _ = write!(s, ",{x}");
            }
            s.push('\n');
        }
        s
    }
}

/// Every vertex meets labels summing to 140, loop counted once.
pub fn vertex_sum_check(g: &SqsGraph) -> bool {
    (0..g.vertices.len()).all(|v| g.degree_multiplicity(v) == BLOCKS)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub representative: String,
    #[serde(rename = "stsTuple", default, skip_serializing_if = "Option::is_none")]
    pub sts_tuple: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub a: usize,
    pub b: usize,
    pub quadruples: Vec<String>,
    pub multiplicity: usize,
}
