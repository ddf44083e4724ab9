use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use perfcode_core::doubling::{double, scan_sigma, DoublingSpec, Sigma};
use perfcode_core::fano::{families, partition_registry};
use perfcode_core::partitions::{
    classify_partitions, enumerate_partitions7, enumerate_partitions8, AtlasJson, Partition,
};
use perfcode_core::perfect::enumerate_perfect7;
use perfcode_core::pipeline::{
    analyze, build_atlases, labelled_graph, read_code, run_pipeline, sts_profiles_csv, sts_types, with_threads,
    write_atomic, write_json, RunConfig, SigmaMode,
};
use perfcode_core::sqs::{GraphJson, SqsGraph};
use perfcode_core::verify::{full_report, verify_graph_json};
use perfcode_core::words::{format_quadruples, Code, CodeJson};
use perfcode_core::{Error, Result};

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        out!($($t)*);
        out!("\n");
    }};
}

#[derive(Parser)]
#[command(name = "perfcode", version, about = "Extended 1-perfect codes of length 16 built by doubling")]
struct Cli {
    /// Worker threads; overrides PCL_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1-perfect codes of length 7.
    PerfectCodes {
        #[command(subcommand)]
        action: PerfectAction,
    },
    /// 1-perfect partitions and their equivalence classes.
    Partitions {
        #[command(subcommand)]
        action: PartitionAction,
    },
    /// Double two partition classes, or scan every sigma.
    Double(DoubleArgs),
    /// Rank, kernel dimension and class count of a code.
    Analyze {
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steiner triple system types of the punctured code at every kernel class.
    StsTypes {
        code: PathBuf,
        /// Also write per-coordinate Pasch profiles as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check loop and link structure of the SQS-graph; exit 0 iff it passes.
    #[command(name = "verify-theorem5")]
    Verify {
        /// Code JSON, or graph JSON from `export --format json`.
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Named quadruple families and the pair-partition registry.
    Fano {
        #[command(subcommand)]
        action: FanoAction,
    },
    /// Export the SQS-graph of a code over its kernel.
    Export {
        code: PathBuf,
        /// dot, csv or json.
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate, classify, search sigma and verify each code found.
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum PerfectAction {
    Enumerate {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PartitionAction {
    /// Classify all partitions of the given length and write the atlas.
    Enumerate {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["7", "8"]))]
        length: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write every partition found, before classification.
        #[arg(long)]
        raw_out: Option<PathBuf>,
        /// JSON object mapping class ids to alias labels.
        #[arg(long)]
        aliases: Option<PathBuf>,
    },
    /// Classify the partitions in an atlas or raw partition file.
    Classify { file: PathBuf },
}

#[derive(Subcommand)]
enum FanoAction {
    Dump,
}

#[derive(Args)]
struct DoubleArgs {
    #[arg(long)]
    source: usize,
    #[arg(long)]
    target: usize,
    #[arg(long, required_unless_present = "scan_sigma")]
    sigma: Option<String>,
    /// Emit rank and kernel dimension for every sigma.
    #[arg(long)]
    scan_sigma: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Length-8 atlas; computed when absent.
    #[arg(long)]
    atlas: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, default_value = "pipeline-out")]
    out: PathBuf,
    /// JSON run configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Class pairs such as 0:0,0:1; all pairs when absent.
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<String>,
    /// Draw this many sigma per pair instead of scanning all.
    #[arg(long, conflicts_with = "sigmas")]
    sample: Option<usize>,
    /// Use exactly these sigma.
    #[arg(long, value_delimiter = ',')]
    sigmas: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    kappa: Vec<usize>,
    /// Search budget in seconds.
    #[arg(long)]
    time_box: Option<u64>,
    #[arg(long)]
    verbose: bool,
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn load_atlas8(path: Option<&Path>) -> Result<AtlasJson> {
    match path {
        Some(p) => Ok(serde_json::from_value(read_json(p)?)?),
        None => Ok(build_atlases()?.1),
    }
}

/// Partitions from an atlas (`{"classes": ...}`) or a raw list of 8-code arrays.
fn read_partitions(path: &Path) -> Result<Vec<Partition>> {
    let v = read_json(path)?;
    if v.get("classes").is_some() {
        let atlas: AtlasJson = serde_json::from_value(v)?;
        return atlas.classes.iter().map(|c| Partition::from_json(&c.representative)).collect();
    }
    let raw: Vec<Vec<CodeJson>> = serde_json::from_value(v)?;
    raw.iter().map(|p| Partition::from_json(p)).collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::PerfectCodes { action: PerfectAction::Enumerate { out } } => {
            let codes: Vec<CodeJson> = enumerate_perfect7().iter().map(|p| p.code.to_json()).collect();
            write_json(&out, &codes)?;
            let through_zero = enumerate_perfect7().iter().filter(|p| p.code.contains_bits(0)).count();
            outln!("{} codes, {through_zero} through 0", codes.len());
        }
        Command::Partitions { action } => match action {
            PartitionAction::Enumerate { length, out, raw_out, aliases } => {
                let raw = if length == "7" { enumerate_partitions7() } else { enumerate_partitions8() };
                if let Some(p) = raw_out {
                    let list: Vec<Vec<CodeJson>> = raw.iter().map(Partition::to_json).collect();
                    write_json(&p, &list)?;
                }
                let classes = classify_partitions(&raw)?;
                let mut atlas = AtlasJson::from_classes(&classes.classes);
                if let Some(a) = aliases {
                    let map: BTreeMap<String, String> = serde_json::from_value(read_json(&a)?)?;
                    atlas.apply_aliases(&map);
                }
                write_json(&out, &atlas)?;
                outln!("{} partitions, {} classes", raw.len(), atlas.classes.len());
            }
            PartitionAction::Classify { file } => {
                let parts = read_partitions(&file)?;
                let c = classify_partitions(&parts)?;
                outln!("{} partitions, {} classes", parts.len(), c.classes.len());
                for class in &c.classes {
                    outln!("class {}: {} members", class.id, class.members);
                }
            }
        },
        Command::Double(a) => {
            let atlas = load_atlas8(a.atlas.as_deref())?;
            let (source, target) = (atlas.representative(a.source)?, atlas.representative(a.target)?);
            if a.scan_sigma {
                let mut s = String::from("sigma,rank,kernelDim\n");
                for row in scan_sigma(&source, &target)? {
                    s.push_str(&format!("{},{},{}\n", row.sigma, row.rank, row.kernel_dim));
                }
                emit(a.out.as_deref(), &s)?;
            } else {
                let sigma: Sigma = a.sigma.as_deref().unwrap_or_default().parse()?;
                let code = double(&DoublingSpec { source, target, sigma })?;
                let text = serde_json::to_string_pretty(&code.to_json())? + "\n";
                emit(a.out.as_deref(), &text)?;
            }
        }
        Command::Analyze { code, out } => {
            let a = analyze(&read_code(&code)?)?;
            if let Some(p) = out {
                write_json(&p, &a)?;
            }
            outln!("{}", serde_json::to_string(&a)?);
        }
        Command::StsTypes { code, csv, out } => {
            let c = read_code(&code)?;
            let (report, _) = sts_types(&c)?;
            if let Some(p) = csv {
                write_atomic(&p, sts_profiles_csv(&c)?.as_bytes())?;
            }
            if let Some(p) = out {
                write_json(&p, &report)?;
            }
            for v in &report.vertices {
                outln!("{} {} {}", v.id, v.representative, v.tuple);
            }
            outln!("sqs-homogeneous {} sts-homogeneous {}", report.sqs_homogeneous, report.sts_homogeneous);
        }
        Command::Verify { input, report } => {
            let v = read_json(&input)?;
            let r = if v.get("vertices").is_some() {
                let g: GraphJson = serde_json::from_value(v)?;
                verify_graph_json(&SqsGraph::from_json(&g)?)?
            } else {
                let j: CodeJson = serde_json::from_value(v)?;
                full_report(&Code::from_json(&j)?)?
            };
            write_json(&report, &r)?;
            outln!("kappa {} vertices {} level {} {}", r.kappa, r.vertex_count, r.level, if r.pass { "pass" } else { "fail" });
            for f in r.failures.iter().take(10) {
                outln!("  {f}");
            }
            if r.failures.len() > 10 {
                outln!("  ... {} more", r.failures.len() - 10);
            }
            return Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Fano { action: FanoAction::Dump } => {
            for (name, set) in families() {
                outln!("{name} ({}): {}", set.len(), format_quadruples(&set).join(" "));
            }
            for (name, (k, l, m), p) in partition_registry() {
                match p {
                    Ok(p) => outln!("{name} {k}{l}{m} {p}"),
                    Err(e) => outln!("{name} {k}{l}{m} invalid: {e}"),
                }
            }
        }
        Command::Export { code, format, out } => {
            let g = labelled_graph(&read_code(&code)?)?;
            let text = match format.as_str() {
                "dot" => g.to_dot(),
                "csv" => g.to_csv(),
                "json" => serde_json::to_string_pretty(&g.to_json())? + "\n",
                other => return Err(Error::UnknownFormat(other.to_string())),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Pipeline(a) => {
            let mut cfg: RunConfig = match &a.config {
                Some(p) => serde_json::from_value(read_json(p)?)?,
                None => RunConfig { out_dir: a.out.clone(), ..Default::default() },
            };
            if a.config.is_none() || a.out != Path::new("pipeline-out") {
                cfg.out_dir = a.out.clone();
            }
            if !a.pairs.is_empty() {
                cfg.pairs = a.pairs.iter().map(|p| parse_pair(p)).collect::<Result<_>>()?;
            }
            if let Some(n) = a.sample {
                cfg.sigma_mode = SigmaMode::Sample { count: n };
            }
            if !a.sigmas.is_empty() {
                cfg.sigma_mode = SigmaMode::List { sigmas: a.sigmas.clone() };
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if !a.kappa.is_empty() {
                cfg.kappas = a.kappa.clone();
            }
            if let Some(t) = a.time_box {
                cfg.time_box_secs = t;
            }
            cfg.verbose |= a.verbose;
            if cli.threads.is_some() {
                cfg.threads = cli.threads;
            }
            let start = Instant::now();
            let s = run_pipeline(&cfg)?;
            outln!(
                "{} perfect codes, {} partitions, {} + {} classes; scanned {} sigma over {} pairs",
                s.perfect_codes7, s.raw_partitions, s.classes7, s.classes8, s.search.sigmas_scanned, s.search.pairs_scanned
            );
            for c in &s.codes {
                let level = c.level.map(|l| l.to_string()).unwrap_or_else(|| "-".into());
                outln!("{} rank {} kernel {} {} {level} {}", c.tag, c.analysis.rank, c.analysis.kernel_dim, c.structure, c.note);
            }
            if !s.search.missing.is_empty() {
                outln!("not found: kappa {:?}{}", s.search.missing, if s.search.timed_out { " (time box reached)" } else { "" });
            }
            if cfg.verbose {
                eprintln!("elapsed {:.1}s", start.elapsed().as_secs_f64());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("class pair {s:?}, expected source:target"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match with_threads(threads, || run(cli)).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
