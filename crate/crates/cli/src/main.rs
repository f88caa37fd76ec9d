use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spanlab::audit::{audit_bundle, default_pairs, sweep, CsvRow, SweepConfig, CSV_HEADER};
use spanlab::compose::{compose_pairwise, compose_pairwise_partitioned};
use spanlab::graph::io::{parse_graph, parse_pairs, parse_ranking, write_graph, write_pairs};
use spanlab::graph::{generate, Family};
use spanlab::hierarchy::LevelParams;
use spanlab::hopset::{audit_hopset, build_hopset_with, AuditMode, Hopset};
use spanlab::lowerbound::{
    build_h_kappa_capped, delta_pairs, forced_edges_witness, hkappa::DEFAULT_VERTEX_CAP, sample_and_cover,
    verify_mechanism, ConvexProvider,
};
use spanlab::reductions::{build_prioritized, build_sourcewise, build_subset, PrioritizedConfig, Schedule};
use spanlab::{Error, ExactPreserverBuilder, Graph, PairSet, Ratio, SpannerBundle};

/// Hopsets, path-reporting pairwise spanners and lower-bound instances.
///
/// File formats (line-oriented, `#` comments ignored):
///   graph <n> <m>            then m lines `u v w`
///   pairs <count>            then lines `u v`
///   ranking <n>              then n vertex ids, highest priority first
///   subset <count>           then vertex ids
///   hopset <k> <c> <F> <seed> <count>   then lines `u v w tag`
///   spanner <num>/<den> <m>  then `u v w` lines, `oracle v1`, JSON blob
///
/// Exit status: 0 success, 1 audit or verification failure, 2 usage or input error.
/// SPANLAB_THREADS caps the worker threads.
#[derive(Parser, Debug)]
#[command(name = "spanlab", version, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph (and optionally random pairs).
    Gen(GenArgs),
    /// Build a hopset with its tags.
    BuildHopset(HopsetArgs),
    /// Compose a path-reporting pairwise spanner over a pairs file.
    BuildPairwise(PairwiseArgs),
    /// Subset spanner for A x A.
    BuildSubset(SubsetArgs),
    /// Source-wise spanner for A x V.
    BuildSourcewise(SubsetArgs),
    /// Prioritized spanner over a ranking.
    BuildPrioritized(PrioritizedArgs),
    /// Recursive lower-bound instance H_kappa.
    LbHkappa(HkappaArgs),
    /// Delta-pair sampling experiment on a girth-bounded host.
    LbDelta(DeltaArgs),
    /// Audit a spanner bundle or hopset; prints one CSV row.
    Audit(AuditArgs),
    /// Report a path for one pair.
    Query(QueryArgs),
    /// Run a TOML sweep config; prints CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyKind {
    Random,
    Grid,
    Path,
    Cycle,
    Complete,
    Petersen,
    Heawood,
    Regular,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Degree for `regular`.
    #[arg(long)]
    d: Option<usize>,
    /// Girth lower bound (exclusive) for `regular`.
    #[arg(long, default_value_t = 0)]
    girth_above: usize,
    #[arg(long, default_value_t = 1000)]
    retries: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write this many random pairs to `--pairs-out`.
    #[arg(long, requires = "pairs_out")]
    pairs: Option<usize>,
    #[arg(long)]
    pairs_out: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LevelArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    /// Sampling constant in (0, 1/2], e.g. `1/2`.
    #[arg(long)]
    delta: Option<Ratio>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct HopsetArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    level: LevelArgs,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PairwiseArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    level: LevelArgs,
    /// Route H1/H2 shortcuts through their own preservers.
    #[arg(long)]
    partitioned: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SubsetArgs {
    #[arg(long)]
    graph: PathBuf,
    /// File `subset <count>` followed by vertex ids.
    #[arg(long, conflicts_with = "random_subset")]
    subset: Option<PathBuf>,
    /// Draw this many vertices uniformly instead.
    #[arg(long)]
    random_subset: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k_em: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Power,
    Doubling,
}

#[derive(Args, Debug)]
struct PrioritizedArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Ranking file; vertex order `0..n` when absent.
    #[arg(long)]
    ranking: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Doubling)]
    schedule: ScheduleArg,
    /// Fixed beta; measured on a calibration prefix when absent.
    #[arg(long)]
    beta: Option<u64>,
    #[arg(long)]
    catch_all_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HkappaArgs {
    #[arg(long)]
    kappa: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    cap: usize,
    /// Run the deletion experiment with this many kept critical edges.
    #[arg(long)]
    verify_b: Option<usize>,
    /// Test only this many sampled pairs in the deletion experiment.
    #[arg(long, requires = "verify_b")]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1")]
    alpha: Ratio,
    #[arg(long)]
    seed: Option<u64>,
    /// Consecutive seeds starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    runs: u64,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, required_unless_present = "hopset", conflicts_with = "hopset")]
    bundle: Option<PathBuf>,
    #[arg(long)]
    hopset: Option<PathBuf>,
    /// Pairs to audit; derived from the bundle's support when absent.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Needed when the audit samples pairs.
    #[arg(long)]
    seed: Option<u64>,
    /// Family label for the CSV; read from the graph file when absent.
    #[arg(long)]
    family: Option<String>,
    /// Fill the `ms` column.
    #[arg(long)]
    timing: bool,
    /// Omit the CSV header.
    #[arg(long)]
    no_header: bool,
    /// Also write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pair: Vec<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    timing: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    fn check(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) | Error::HopsetViolation { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn need_seed(seed: Option<u64>, cmd: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::usage(format!("--seed is required for {cmd}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: spanlab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    in_file(path, parse_graph(&read(path)?))
}

fn family_label(text: &str) -> String {
    text.lines()
        .find_map(|l| l.trim().strip_prefix("# family "))
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "file".into())
}

/// Write through a temporary file in the target directory, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    let Some(path) = out else {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("stdout: {e}")))?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Failure::usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn level_params(a: &LevelArgs, cmd: &str) -> Result<LevelParams, Failure> {
    let seed = need_seed(a.seed, cmd)?;
    let p = LevelParams::new(a.k, a.c, seed)?;
    Ok(match a.delta {
        Some(d) => p.with_delta(d)?,
        None => p,
    })
}

fn gen(a: GenArgs) -> Outcome {
    let need =
        |x: Option<usize>, flag: &str| x.ok_or_else(|| Failure::usage(format!("--{flag} is required for this family")));
    let family = match a.family {
        FamilyKind::Random => Family::Random {
            n: need(a.n, "n")?,
            m: need(a.m, "m")?,
            max_weight: a.max_weight,
        },
        FamilyKind::Grid => Family::Grid {
            rows: need(a.rows, "rows")?,
            cols: need(a.cols, "cols")?,
        },
        FamilyKind::Path => Family::Path { n: need(a.n, "n")? },
        FamilyKind::Cycle => Family::Cycle { n: need(a.n, "n")? },
        FamilyKind::Complete => Family::Complete { n: need(a.n, "n")? },
        FamilyKind::Petersen => Family::Petersen,
        FamilyKind::Heawood => Family::Heawood,
        FamilyKind::Regular => Family::RandomRegular {
            n: need(a.n, "n")?,
            d: need(a.d, "d")?,
            girth_above: a.girth_above,
            retries: a.retries,
        },
    };
    let samples = matches!(family, Family::Random { .. } | Family::RandomRegular { .. }) || a.pairs.is_some();
    let seed = if samples {
        need_seed(a.seed, "this family")?
    } else {
        a.seed.unwrap_or(0)
    };
    let g = generate(&family, seed)?;
    let mut text = format!("# family {}\n", family.name());
    text.push_str(&write_graph(&g));
    emit(a.out.as_deref(), &text)?;
    if let (Some(count), Some(path)) = (a.pairs, a.pairs_out.as_deref()) {
        let ps = PairSet::random(g.n(), count, seed)?;
        emit(Some(path), &write_pairs(&ps))?;
    }
    Ok(())
}

fn build_hopset_cmd(a: HopsetArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let params = level_params(&a.level, "build-hopset")?;
    let b = build_hopset_with(&g, &params)?;
    eprintln!(
        "hopset: {} edges, stretch {}, hopbound {}",
        b.hopset.len(),
        b.hopset.declared_stretch(),
        b.hopset.declared_hopbound()
    );
    emit(a.out.as_deref(), &b.hopset.to_text())
}

fn save_bundle(g: &Graph, b: &SpannerBundle, out: Option<&Path>) -> Outcome {
    eprintln!(
        "{}: {} edges, stretch {}",
        b.provenance.construction,
        b.size(),
        b.stretch
    );
    emit(out, &b.to_text(g)?)
}

fn build_pairwise_cmd(a: PairwiseArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let pairs = in_file(&a.pairs, parse_pairs(&read(&a.pairs)?, g.n()))?;
    let params = level_params(&a.level, "build-pairwise")?;
    let b = if a.partitioned {
        compose_pairwise_partitioned(&g, pairs.as_slice(), &params, &ExactPreserverBuilder)?
    } else {
        compose_pairwise(&g, pairs.as_slice(), &params, &ExactPreserverBuilder)?
    };
    save_bundle(&g, &b, a.out.as_deref())
}

fn parse_subset(text: &str, n: usize) -> spanlab::Result<Vec<usize>> {
    let mut ids = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
    let (no, head) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing `subset` header".into(),
    })?;
    let count: usize = match head.split_whitespace().collect::<Vec<_>>()[..] {
        ["subset", c] => c.parse().map_err(|_| Error::Parse {
            line: no + 1,
            msg: format!("bad count `{c}`"),
        })?,
        _ => {
            return Err(Error::Parse {
                line: no + 1,
                msg: "expected `subset <count>`".into(),
            })
        }
    };
    for (no, l) in lines {
        for tok in l.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: no + 1,
                msg: format!("bad vertex `{tok}`"),
            })?;
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            ids.push(v);
        }
    }
    if ids.len() != count {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header says {count} vertices, found {}", ids.len()),
        });
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn subset_bundle(a: &SubsetArgs, g: &Graph, cmd: &str) -> Result<SpannerBundle, Failure> {
    let seed = need_seed(a.seed, cmd)?;
    let set = match (&a.subset, a.random_subset) {
        (Some(p), _) => in_file(p, parse_subset(&read(p)?, g.n()))?,
        (None, Some(size)) => {
            if size == 0 || size > g.n() {
                return Err(Failure::usage(format!("--random-subset must lie in [1, {}]", g.n())));
            }
            spanlab::graph::sample_vertices(g.n(), size, seed)
        }
        (None, None) => return Err(Failure::usage("one of --subset or --random-subset is required")),
    };
    Ok(build_subset(g, &set, a.k_em, seed, &ExactPreserverBuilder)?)
}

fn build_subset_cmd(a: SubsetArgs, sourcewise: bool) -> Outcome {
    let g = load_graph(&a.graph)?;
    let cmd = if sourcewise { "build-sourcewise" } else { "build-subset" };
    let sub = subset_bundle(&a, &g, cmd)?;
    let b = if sourcewise { build_sourcewise(&g, &sub)? } else { sub };
    save_bundle(&g, &b, a.out.as_deref())
}

fn build_prioritized_cmd(a: PrioritizedArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let seed = need_seed(a.seed, "build-prioritized")?;
    let ranking = match &a.ranking {
        Some(p) => in_file(p, parse_ranking(&read(p)?))?,
        None => (0..g.n()).collect(),
    };
    let config = PrioritizedConfig {
        schedule: match a.schedule {
            ScheduleArg::Power => Schedule::Power,
            ScheduleArg::Doubling => Schedule::Doubling,
        },
        beta: a.beta,
        catch_all_k: a.catch_all_k,
        seed,
    };
    let b = build_prioritized(&g, &ranking, &config, &ExactPreserverBuilder)?;
    save_bundle(&g, &b, a.out.as_deref())
}

fn lb_hkappa(a: HkappaArgs) -> Outcome {
    let inst = build_h_kappa_capped(&ConvexProvider, a.kappa, a.p, a.l, a.cap)?;
    eprintln!(
        "hkappa: n = {}, m = {}, pairs = {}, pair distance = {}",
        inst.graph.n(),
        inst.graph.m(),
        inst.pairs.len(),
        inst.pair_distance()
    );
    emit(a.out.as_deref(), &inst.to_text())?;
    if let Some(b) = a.verify_b {
        let seed = if a.sample.is_some() {
            need_seed(a.seed, "sampled verification")?
        } else {
            a.seed.unwrap_or(0)
        };
        let r = verify_mechanism(&inst, b, a.sample, seed)?;
        eprintln!(
            "mechanism: deletion bound {}, {} deletions, {} failures, {} non-unique pairs",
            r.deletion_bound,
            r.deletions.len(),
            r.deletion_failures.len(),
            r.non_unique.len()
        );
        if !r.passed() {
            return Err(Failure::check("mechanism verification failed"));
        }
    }
    Ok(())
}

fn lb_delta(a: DeltaArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let seed = need_seed(a.seed, "lb-delta")?;
    let inst = delta_pairs(&g, a.k, a.alpha)?;
    println!(
        "delta {} pairs {} probability {}",
        inst.delta,
        inst.pairs.len(),
        inst.sampling_probability()
    );
    println!("seed,sampled,covered,edges,coverage_num,coverage_den,forced");
    let mut failed = false;
    for s in seed..seed.saturating_add(a.runs) {
        let r = sample_and_cover(&inst, s);
        let forced = forced_edges_witness(&inst, &r.sampled).is_none();
        failed |= !forced;
        println!(
            "{},{},{},{},{},{},{}",
            s,
            r.sampled.len(),
            r.covered,
            r.edges,
            r.coverage.num(),
            r.coverage.den(),
            forced
        );
    }
    if failed {
        return Err(Failure::check("some covered edge is not forced"));
    }
    Ok(())
}

fn audit(a: AuditArgs) -> Outcome {
    let text = read(&a.graph)?;
    let g = in_file(&a.graph, parse_graph(&text))?;
    let family = a.family.clone().unwrap_or_else(|| family_label(&text));
    let mut out = String::new();
    if !a.no_header {
        writeln!(out, "{CSV_HEADER}").unwrap();
    }
    let needs_seed = |mode: &AuditMode| matches!(mode, AuditMode::Sampled { .. });

    let row = if let Some(hp) = &a.hopset {
        let hs = in_file(hp, Hopset::parse(&read(hp)?))?;
        let seed = a.seed.unwrap_or(0);
        if g.n() > spanlab::hopset::EXHAUSTIVE_LIMIT {
            need_seed(a.seed, "sampled audits")?;
        }
        let start = std::time::Instant::now();
        let beta = usize::try_from(hs.declared_hopbound()).unwrap_or(usize::MAX);
        let r = audit_hopset(&g, &hs, hs.declared_stretch(), beta, seed)?;
        let (on, od) = if r.pairs == 0 {
            (hs.len() as u64, 0)
        } else {
            let q = Ratio::new(hs.len() as u64, r.pairs as u64);
            (q.num(), q.den())
        };
        if let Some(p) = &a.report {
            emit(
                Some(p),
                &(serde_json::to_string_pretty(&r).map_err(Error::from)? + "\n"),
            )?;
        }
        CsvRow {
            family,
            n: g.n(),
            m: g.m(),
            k: Some(hs.params.k),
            c: Some(hs.params.c),
            pairs: r.pairs,
            seed: Some(hs.params.seed),
            edges: hs.len(),
            overhead: (on, od),
            max_stretch: r.max_stretch,
            violations: r.violations.len().to_string(),
            ms: if a.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            },
        }
    } else {
        let bp = a.bundle.as_ref().expect("clap enforces --bundle");
        let b = in_file(bp, SpannerBundle::parse(&read(bp)?, &g))?;
        let (mode, pairs) = match &a.pairs {
            Some(p) => (
                AuditMode::Exhaustive,
                in_file(p, parse_pairs(&read(p)?, g.n()))?.as_slice().to_vec(),
            ),
            None => {
                let (mode, pairs) = default_pairs(&g, &b, a.seed.unwrap_or(0))?;
                if needs_seed(&mode) {
                    need_seed(a.seed, "sampled audits")?;
                }
                (mode, pairs)
            }
        };
        let r = audit_bundle(&g, &b, &pairs, mode)?;
        if let Some(p) = &a.report {
            emit(
                Some(p),
                &(serde_json::to_string_pretty(&r).map_err(Error::from)? + "\n"),
            )?;
        }
        CsvRow::from_report(&family, &g, &r, a.timing)
    };
    writeln!(out, "{}", row.to_line()).unwrap();
    emit(None, &out)?;
    eprintln!("{}", row.decimal_summary());
    if row.violations != "0" {
        return Err(Failure::check(format!("{} violations", row.violations)));
    }
    Ok(())
}

fn query(a: QueryArgs) -> Outcome {
    let g = load_graph(&a.graph)?;
    let b = in_file(&a.bundle, SpannerBundle::parse(&read(&a.bundle)?, &g))?;
    let (u, v) = (a.pair[0], a.pair[1]);
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let p = b.query(&g, u, v)?;
    let mut line = format!("path {}", p.weight());
    for x in p.vertices() {
        write!(line, " {x}").unwrap();
    }
    println!("{line}");
    Ok(())
}

fn sweep_cmd(a: SweepArgs) -> Outcome {
    let text = read(&a.config)?;
    let config: SweepConfig =
        toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {}", a.config.display(), e.message())))?;
    let csv = sweep(&config, a.timing);
    emit(a.out.as_deref(), &csv)
}

fn configure_threads() -> Outcome {
    if let Ok(v) = std::env::var("SPANLAB_THREADS") {
        let t: usize = v
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure::usage(format!("SPANLAB_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.cmd {
        Command::Gen(a) => gen(a),
        Command::BuildHopset(a) => build_hopset_cmd(a),
        Command::BuildPairwise(a) => build_pairwise_cmd(a),
        Command::BuildSubset(a) => build_subset_cmd(a, false),
        Command::BuildSourcewise(a) => build_subset_cmd(a, true),
        Command::BuildPrioritized(a) => build_prioritized_cmd(a),
        Command::LbHkappa(a) => lb_hkappa(a),
        Command::LbDelta(a) => lb_delta(a),
        Command::Audit(a) => audit(a),
        Command::Query(a) => query(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("spanlab: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
