//! End-to-end runs: enumerate, classify, search sigma for kernel dimensions,
//! then analyze, type and verify each code found. Outputs are written
//! atomically and depend only on the configuration and seed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{cosets, kernel, normalize, rank};
use crate::doubling::{double, partition_symmetries, structural_kernel, DoublingSpec, Sigma};
use crate::error::{Error, Result, StageExt};
use crate::partitions::{classify_partitions, enumerate_partitions7, extend_partition, AtlasJson, Partition};
use crate::perfect::enumerate_perfect7;
use crate::sqs::{quotient_graph, sqs_of, SqsGraph};
use crate::sts::{classify_type, homogeneity, render_type_tuple, type_letter, vertex_type_scan, Punctures, TypeScan, TypeTuple};
use crate::verify::{full_report, Level, StructureReport};
use crate::words::{bits_to_hex, Code, Word};

/// Overrides the worker count when set to a positive integer.
pub const THREADS_ENV: &str = "PCL_THREADS";

/// Explicit width, else `PCL_THREADS`, else `None` for the rayon default.
pub fn thread_count(explicit: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = explicit {
        return if n == 0 { Err(Error::Parse("thread count must be positive".into())) } else { Ok(Some(n)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Parse(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

/// Run `f` on a pool of the resolved width.
pub fn with_threads<T: Send>(explicit: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(explicit)? {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_code(path: &Path) -> Result<Code> {
    let text = std::fs::read_to_string(path)?;
    Code::from_json(&serde_json::from_str(&text)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Analysis {
    pub rank: usize,
    pub kernel_dim: usize,
    pub coset_count: usize,
}

/// Rank, kernel dimension and class count, after moving a codeword to 0.
pub fn analyze(c: &Code) -> Result<Analysis> {
    let (c, _) = normalize(c)?;
    let k = kernel(&c)?;
    Ok(Analysis { rank: rank(&c)?, kernel_dim: k.dimension(), coset_count: c.len() >> k.dimension() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexTypes {
    pub id: usize,
    pub representative: String,
    pub tuple: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StsTypesReport {
    pub kernel_dim: usize,
    pub vertices: Vec<VertexTypes>,
    pub sqs_homogeneous: bool,
    pub sts_homogeneous: bool,
    /// Pasch signatures outside the type table; rendered as `?` in tuples.
    pub unknown_signatures: Vec<String>,
}

/// Type tuples per kernel class, with the raw tuples for graph labels.
pub fn sts_types(c: &Code) -> Result<(StsTypesReport, Vec<TypeTuple>)> {
    let (c, _) = normalize(c)?;
    let k = kernel(&c)?;
    let dec = cosets(&c, &k)?;
    let TypeScan { tuples, unknown } = vertex_type_scan(&c, &dec)?;
    let h = homogeneity(&tuples);
    let vertices = dec
        .representatives
        .iter()
        .zip(&tuples)
        .enumerate()
        .map(|(id, (&r, t))| VertexTypes { id, representative: bits_to_hex(r, 16), tuple: render_type_tuple(t) })
        .collect();
    Ok((
        StsTypesReport {
            kernel_dim: k.dimension(),
            vertices,
            sqs_homogeneous: h.sqs_homogeneous,
            sts_homogeneous: h.sts_homogeneous,
            unknown_signatures: unknown.iter().map(ToString::to_string).collect(),
        },
        tuples,
    ))
}

/// One row per class representative and coordinate: type, letter and Pasch
/// profile. Unknown signatures get type 0 and letter `?`.
pub fn sts_profiles_csv(c: &Code) -> Result<String> {
    let (c, _) = normalize(c)?;
    let dec = cosets(&c, &kernel(&c)?)?;
    let p = Punctures::new(&c)?;
    let mut s = String::from("vertex,representative,coordinate,type,letter,pasch,perPoint\n");
    for (id, &r) in dec.representatives.iter().enumerate() {
        for i in 0..16 {
            let prof = p.profile(i, r)?;
            let t = classify_type(&prof).unwrap_or(0);
            let per: Vec<String> = prof.per_point.iter().map(u32::to_string).collect();
            s.push_str(&format!(
                "{id},{},{},{t},{},{},{}\n",
                bits_to_hex(r, 16),
                crate::words::hex_digit(i),
                type_letter(t),
                prof.total,
                per.join(" ")
            ));
        }
    }
    Ok(s)
}

/// Every codeword yields a Steiner quadruple system.
pub fn sqs_sweep(c: &Code) -> Result<usize> {
    c.words().par_iter().try_for_each(|&w| sqs_of(c, Word::new(16, w.into())?).map(drop))?;
    Ok(c.len())
}

/// Graph over the kernel, vertices labelled with their type tuples.
pub fn labelled_graph(c: &Code) -> Result<SqsGraph> {
    let (c, _) = normalize(c)?;
    let k = kernel(&c)?;
    let mut g = quotient_graph(&c, &k)?;
    let (_, tuples) = sts_types(&c)?;
    for (v, t) in g.vertices.iter_mut().zip(tuples) {
        v.sts_tuple = Some(t);
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SigmaMode {
    /// Every permutation in lexicographic order.
    Exhaustive,
    /// `count` permutations per class pair drawn with the seeded generator.
    Sample { count: usize },
    /// Exactly these permutations, each code reported.
    List { sigmas: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub out_dir: PathBuf,
    /// Class pairs of length-8 partitions to scan, in order; empty means all.
    pub pairs: Vec<(usize, usize)>,
    pub sigma_mode: SigmaMode,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Kernel dimensions searched for in exhaustive and sample modes.
    pub kappas: Vec<usize>,
    pub time_box_secs: u64,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            out_dir: PathBuf::from("pipeline-out"),
            pairs: Vec::new(),
            sigma_mode: SigmaMode::Exhaustive,
            seed: 0,
            threads: None,
            kappas: (5..=9).collect(),
            time_box_secs: 30 * 60,
            verbose: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::Parse("output directory is empty".into()));
        }
        match &self.sigma_mode {
            SigmaMode::Sample { count: 0 } => return Err(Error::Parse("sample size must be at least 1".into())),
            SigmaMode::List { sigmas } => {
                if sigmas.is_empty() {
                    return Err(Error::Parse("sigma list is empty".into()));
                }
                for s in sigmas {
                    s.parse::<Sigma>()?;
                }
            }
            _ => {}
        }
        if let Some((s, t)) = self.pairs.iter().find(|(s, t)| *s >= 10 || *t >= 10) {
            return Err(Error::UnknownName(format!("partition class pair ({s}, {t})")));
        }
        if self.kappas.is_empty() {
            return Err(Error::Parse("no kernel dimension requested".into()));
        }
        thread_count(self.threads)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub source: usize,
    pub target: usize,
    #[serde(with = "sigma_text")]
    pub sigma: Sigma,
    pub kappa: usize,
}

mod sigma_text {
    use super::Sigma;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Sigma, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&s.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Sigma, D::Error> {
        String::deserialize(de)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchOutcome {
    pub found: Vec<Candidate>,
    pub missing: Vec<usize>,
    pub pairs_scanned: usize,
    pub sigmas_scanned: usize,
    pub timed_out: bool,
}

fn sigmas_for(mode: &SigmaMode, rng: &mut ChaCha8Rng, all: &[Sigma]) -> Result<Vec<Sigma>> {
    Ok(match mode {
        SigmaMode::Exhaustive => all.to_vec(),
        SigmaMode::Sample { count } => all.choose_multiple(rng, (*count).min(all.len())).copied().collect(),
        SigmaMode::List { sigmas } => sigmas.iter().map(|s| s.parse()).collect::<Result<_>>()?,
    })
}

/// Scan class pairs in order. List mode reports every listed sigma; the
/// other modes keep the first sigma reaching each requested dimension.
pub fn search(classes: &[Partition], cfg: &RunConfig) -> Result<SearchOutcome> {
    let pairs: Vec<(usize, usize)> = if cfg.pairs.is_empty() {
        (0..classes.len()).flat_map(|s| (0..classes.len()).map(move |t| (s, t))).collect()
    } else {
        cfg.pairs.clone()
    };
    let syms: Vec<_> = classes.par_iter().map(partition_symmetries).collect();
    let all = Sigma::all();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let listing = matches!(cfg.sigma_mode, SigmaMode::List { .. });
    let start = Instant::now();
    let budget = Duration::from_secs(cfg.time_box_secs);
    let mut out = SearchOutcome { found: vec![], missing: vec![], pairs_scanned: 0, sigmas_scanned: 0, timed_out: false };
    for &(s, t) in &pairs {
        if start.elapsed() > budget {
            out.timed_out = true;
            break;
        }
        let (a, b) = (
            syms.get(s).ok_or_else(|| Error::UnknownName(format!("partition class {s}")))?,
            syms.get(t).ok_or_else(|| Error::UnknownName(format!("partition class {t}")))?,
        );
        let sigmas = sigmas_for(&cfg.sigma_mode, &mut rng, &all)?;
        let dims: Vec<usize> = sigmas.par_iter().map(|&sg| structural_kernel(a, b, sg).dimension()).collect();
        out.pairs_scanned += 1;
        out.sigmas_scanned += sigmas.len();
        for (&sigma, &kappa) in sigmas.iter().zip(&dims) {
            let wanted = listing || (cfg.kappas.contains(&kappa) && !out.found.iter().any(|c| c.kappa == kappa));
            if wanted {
                out.found.push(Candidate { source: s, target: t, sigma, kappa });
            }
        }
        if !listing && cfg.kappas.iter().all(|k| out.found.iter().any(|c| c.kappa == *k)) {
            break;
        }
    }
    if !listing {
        out.found.sort_by_key(|c| c.kappa);
        out.missing = cfg.kappas.iter().copied().filter(|k| !out.found.iter().any(|c| c.kappa == *k)).collect();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeSummary {
    pub tag: String,
    #[serde(flatten)]
    pub candidate: Candidate,
    #[serde(flatten)]
    pub analysis: Analysis,
    pub sqs_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqs_homogeneous: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sts_homogeneous: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_sts_signatures: Vec<String>,
    /// `pass`, `fail` or `skipped`.
    pub structure: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineSummary {
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    pub perfect_codes7: usize,
    pub raw_partitions: usize,
    pub classes7: usize,
    pub classes8: usize,
    pub search: SearchOutcome,
    pub codes: Vec<CodeSummary>,
}

/// Atlases of length-7 and extended length-8 classes, with the raw partition count.
pub fn build_atlases() -> Result<(AtlasJson, AtlasJson, usize)> {
    let raw = enumerate_partitions7();
    let c7 = classify_partitions(&raw).stage("classify length 7")?;
    let ext: Vec<Partition> = raw.iter().map(extend_partition).collect();
    let c8 = classify_partitions(&ext).stage("classify length 8")?;
    Ok((AtlasJson::from_classes(&c7.classes), AtlasJson::from_classes(&c8.classes), raw.len()))
}

pub fn code_tag(c: &Candidate) -> String {
    format!("k{}-{}-{}-{}", c.kappa, c.source, c.target, c.sigma)
}

/// Process one doubled code into `dir`, returning its summary line.
pub fn process_code(classes: &[Partition], cand: Candidate, dir: &Path) -> Result<(CodeSummary, Option<StructureReport>)> {
    let spec = DoublingSpec { source: classes[cand.source].clone(), target: classes[cand.target].clone(), sigma: cand.sigma };
    let code = double(&spec).stage("double")?;
    let (code, _) = normalize(&code).stage("double")?;
    write_json(&dir.join("code.json"), &code.to_json()).stage("double")?;
    let analysis = analyze(&code).stage("analyze")?;
    write_json(&dir.join("analysis.json"), &analysis).stage("analyze")?;
    let sqs_checked = sqs_sweep(&code).stage("sqs")?;
    let tag = code_tag(&cand);
    let mut summary = CodeSummary {
        tag,
        candidate: cand,
        analysis: analysis.clone(),
        sqs_checked,
        sqs_homogeneous: None,
        sts_homogeneous: None,
        unknown_sts_signatures: vec![],
        structure: "skipped".into(),
        level: None,
        note: String::new(),
    };
    if !(5..=9).contains(&analysis.kernel_dim) {
        summary.note = if analysis.rank == 11 {
            format!("linear, kappa={}, skipped structure check", analysis.kernel_dim)
        } else {
            format!("kappa={} outside 5..9, skipped structure check", analysis.kernel_dim)
        };
        return Ok((summary, None));
    }
    let (types, _) = sts_types(&code).stage("sts-types")?;
    write_json(&dir.join("sts-types.json"), &types).stage("sts-types")?;
    summary.sqs_homogeneous = Some(types.sqs_homogeneous);
    summary.sts_homogeneous = Some(types.sts_homogeneous);
    summary.unknown_sts_signatures = types.unknown_signatures.clone();
    let graph = labelled_graph(&code).stage("fold")?;
    write_json(&dir.join("graph.json"), &graph.to_json()).stage("fold")?;
    let report = full_report(&code).stage("verify")?;
    write_json(&dir.join("report.json"), &report).stage("verify")?;
    summary.structure = if report.pass { "pass" } else { "fail" }.into();
    summary.level = Some(report.level);
    summary.note = report.failures.first().cloned().unwrap_or_default();
    Ok((summary, Some(report)))
}

/// Full run; every artifact lands under `cfg.out_dir`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineSummary> {
    cfg.validate().stage("config")?;
    with_threads(cfg.threads, || {
        let perfect = enumerate_perfect7().len();
        let (a7, a8, raw) = build_atlases().stage("partitions")?;
        write_json(&cfg.out_dir.join("atlas7.json"), &a7).stage("partitions")?;
        write_json(&cfg.out_dir.join("atlas8.json"), &a8).stage("partitions")?;
        let classes: Vec<Partition> =
            (0..a8.classes.len()).map(|i| a8.representative(i)).collect::<Result<_>>().stage("partitions")?;
        let outcome = search(&classes, cfg).stage("search")?;
        let codes: Vec<CodeSummary> = outcome
            .found
            .par_iter()
            .map(|&c| process_code(&classes, c, &cfg.out_dir.join("codes").join(code_tag(&c))).map(|(s, _)| s))
            .collect::<Result<_>>()?;
        let summary = PipelineSummary {
            seed: cfg.seed,
            sigma_mode: cfg.sigma_mode.clone(),
            perfect_codes7: perfect,
            raw_partitions: raw,
            classes7: a7.classes.len(),
            classes8: a8.classes.len(),
            search: outcome,
            codes,
        };
        write_json(&cfg.out_dir.join("summary.json"), &summary).stage("summary")?;
        Ok(summary)
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn atomic_write_replaces() {
        let d = tmp();
        let p = d.path().join("a/b.json");
        write_json(&p, &vec![1, 2]).unwrap();
        write_json(&p, &vec![3]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "[\n  3\n]\n");
        assert_eq!(std::fs::read_dir(d.path().join("a")).unwrap().count(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = [
            RunConfig { out_dir: PathBuf::new(), ..Default::default() },
            RunConfig { sigma_mode: SigmaMode::Sample { count: 0 }, ..Default::default() },
            RunConfig { sigma_mode: SigmaMode::List { sigmas: vec!["0123456".into()] }, ..Default::default() },
            RunConfig { pairs: vec![(0, 10)], ..Default::default() },
            RunConfig { threads: Some(0), ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn linear_run_is_skipped() {
        let d = tmp();
        let cfg = RunConfig {
            out_dir: d.path().to_path_buf(),
            pairs: vec![(0, 0)],
            sigma_mode: SigmaMode::List { sigmas: vec!["01234567".into()] },
            ..Default::default()
        };
        let s = run_pipeline(&cfg).unwrap();
        assert_eq!((s.classes7, s.classes8, s.perfect_codes7), (11, 10, 240));
        assert_eq!(s.codes.len(), 1);
        let c = &s.codes[0];
        assert_eq!((c.analysis.rank, c.analysis.kernel_dim, c.analysis.coset_count), (11, 11, 1));
        assert_eq!(c.structure, "skipped");
        assert!(c.note.starts_with("linear, kappa=11"));
        assert!(d.path().join("codes").join(&c.tag).join("code.json").exists());
    }

    #[test]
    fn sampled_search_is_seeded() {
        let (_, a8, _) = build_atlases().unwrap();
        let classes: Vec<Partition> = (0..10).map(|i| a8.representative(i).unwrap()).collect();
        let cfg = |seed| RunConfig {
            pairs: vec![(0, 0), (0, 1)],
            sigma_mode: SigmaMode::Sample { count: 300 },
            seed,
            kappas: vec![7, 8, 9],
            ..Default::default()
        };
        let a = search(&classes, &cfg(5)).unwrap();
        assert_eq!(a, search(&classes, &cfg(5)).unwrap());
        assert_eq!(a.sigmas_scanned, 300 * a.pairs_scanned);
        for c in &a.found {
            let k = structural_kernel(&partition_symmetries(&classes[c.source]), &partition_symmetries(&classes[c.target]), c.sigma);
            assert_eq!(k.dimension(), c.kappa);
        }
    }

    #[test]
    fn threads_env_is_read() {
        assert_eq!(thread_count(Some(3)).unwrap(), Some(3));
        assert!(thread_count(Some(0)).is_err());
    }

    #[test]
    fn stage_tags_errors() {
        let e = Code::from_json(&serde_json::from_str(r#"{"length":16,"codewords":["zz"]}"#).unwrap()).stage("analyze").unwrap_err();
        assert!(e.to_string().starts_with("analyze: "), "{e}");
    }
}
