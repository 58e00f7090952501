//! The four subcommands: `gen`, `solve`, `width` and `bench`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Subcommand, ValueEnum};

use bnet_core::elim::{elim_bel, elim_map, elim_mpe, Limits, DEFAULT_MAX_TABLE_CELLS};
use bnet_core::generate::{
    gen_evidence, generate, EvidencePolicy, GenSpec, NetKind,
};
use bnet_core::io::{load_network, save_network, Meta, NetworkFile};
use bnet_core::minibucket::{approx_bel, approx_map, approx_mpe, BelMode, MiniBucketConfig};
use bnet_core::{
    find_ordering_with_front, width_and_induced_width, Error, Ordering, OrderingStrategy,
    Result, Var,
};

use crate::stats::{histogram, mean, render_summary, StatRow, SummaryMeans, CSV_HEADER};

/// Wall-clock seconds with the stated 1 ms resolution floor.
pub fn clock_floor(secs: f64) -> f64 {
    secs.max(1e-3)
}

/// Resource limits, honoring the `BNET_MEM_CELLS` override.
pub fn limits_from_env() -> Limits {
    let mut limits = Limits::default();
    if let Ok(s) = std::env::var("BNET_MEM_CELLS") {
        if let Ok(cells) = s.parse::<usize>() {
            limits.max_table_cells = cells;
        }
    } else {
        limits.max_table_cells = DEFAULT_MAX_TABLE_CELLS;
    }
    limits
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate random instances and a manifest.
    Gen(GenArgs),
    /// Solve one instance exactly and/or approximately; prints a CSV row.
    Solve(SolveArgs),
    /// Print the width and induced width of a file along an ordering.
    Width(WidthArgs),
    /// Run a benchmark set: exact plus a mini-bucket grid, with summaries.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Uniform,
    NoisyOr,
}

impl From<KindArg> for NetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Uniform => NetKind::Uniform,
            KindArg::NoisyOr => NetKind::NoisyOr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    PositiveOnes,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Mpe,
    Bel,
    Map,
}

impl TaskArg {
    fn name(self) -> &'static str {
        match self {
            TaskArg::Mpe => "mpe",
            TaskArg::Bel => "bel",
            TaskArg::Map => "map",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    ByI,
    ByM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    MinFill,
    MinDegree,
    /// Poly-tree legal ordering (observed last, family-by-family).
    Legal,
    Given,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExactMode {
    /// Run the exact engine unless it exceeds the memory cap.
    Auto,
    Always,
    Never,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub edges: usize,
    #[arg(long, default_value_t = 2)]
    pub card: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Number of evidence variables written into each instance.
    #[arg(long, default_value_t = 0)]
    pub evidence: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Sampled)]
    pub evidence_policy: PolicyArg,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Run the exact engine.
    #[arg(long)]
    pub exact: bool,
    /// Run the mini-bucket approximation.
    #[arg(long)]
    pub approx: bool,
    /// Variable budget for the by-i partitioning strategy.
    #[arg(long)]
    pub i: Option<usize>,
    /// Mini-buckets combined per group for the by-m strategy.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Merge consecutive same-family buckets before processing.
    #[arg(long)]
    pub superbuckets: bool,
    #[arg(long, value_enum, default_value_t = OrderArg::MinFill)]
    pub ordering: OrderArg,
    /// Explicit ordering for `--ordering given`, e.g. `--order 2,0,1`.
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<usize>,
    /// Hypothesis variables for the map task, e.g. `--hyp 0,1,2`.
    #[arg(long, value_delimiter = ',')]
    pub hyp: Vec<usize>,
    /// Query variable for the bel task.
    #[arg(long)]
    pub query: Option<usize>,
}

#[derive(Args, Debug)]
pub struct WidthArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = OrderArg::MinFill)]
    pub ordering: OrderArg,
    #[arg(long, value_delimiter = ',')]
    pub order: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Manifest file: one instance path per line, relative to the manifest.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = TaskArg::Mpe)]
    pub task: TaskArg,
    /// By-i grid, e.g. `--grid-i 3,6,9,12`.
    #[arg(long, value_delimiter = ',')]
    pub grid_i: Vec<usize>,
    /// By-m grid, e.g. `--grid-m 1,2,3`.
    #[arg(long, value_delimiter = ',')]
    pub grid_m: Vec<usize>,
    /// Where the per-instance CSV rows go.
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OrderArg::MinFill)]
    pub ordering: OrderArg,
    #[arg(long, value_enum, default_value_t = ExactMode::Auto)]
    pub exact: ExactMode,
    #[arg(long)]
    pub superbuckets: bool,
}

fn usage(msg: &str) -> Error {
    Error::InfeasibleConfig(msg.to_string())
}

/// Derived per-instance seed: the base seed plus the instance index.
pub fn instance_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Evidence sampling runs on its own stream so it does not replay the
/// graph stream.
pub fn evidence_seed(instance: u64) -> u64 {
    instance.wrapping_add(0x9E37_79B9)
}

pub fn cmd_gen(args: &GenArgs) -> Result<String> {
    std::fs::create_dir_all(&args.out)?;
    let mut files = Vec::with_capacity(args.count);
    for k in 0..args.count {
        let seed = instance_seed(args.seed, k);
        let spec = GenSpec {
            n: args.nodes,
            edges: args.edges,
            card: args.card,
            kind: args.kind.into(),
            seed,
        };
        let bn = generate(&spec)?;
        let policy = match args.evidence_policy {
            PolicyArg::PositiveOnes => EvidencePolicy::PositiveOnes,
            PolicyArg::Sampled => EvidencePolicy::Sampled,
        };
        let e = gen_evidence(&bn, args.evidence, policy, evidence_seed(seed))?;
        let name = format!("inst_{seed}.bnet");
        save_network(
            &args.out.join(&name),
            &bn,
            &e,
            Some(Meta {
                seed,
                kind: spec.kind,
            }),
        )?;
        files.push(name);
    }
    let mut manifest = String::new();
    manifest.push_str("# bnet manifest\n");
    for f in &files {
        manifest.push_str(f);
        manifest.push('\n');
    }
    std::fs::write(args.out.join("manifest.txt"), manifest)?;
    Ok(format!(
        "wrote {} instance(s) and manifest.txt to {}",
        files.len(),
        args.out.display()
    ))
}

fn build_ordering(
    nf: &NetworkFile,
    arg: OrderArg,
    order: &[usize],
    front: &[Var],
) -> Result<(Ordering, String)> {
    let strategy = match arg {
        OrderArg::MinFill => OrderingStrategy::MinFill,
        OrderArg::MinDegree => OrderingStrategy::MinDegree,
        OrderArg::Legal => {
            let d = bnet_core::legal_ordering(&nf.network, &nf.evidence)?;
            for (i, v) in front.iter().enumerate() {
                if d.position(*v) >= front.len() {
                    return Err(Error::InvalidOrdering(format!(
                        "legal ordering puts variable {} outside the first {} positions (front position {})",
                        v.0,
                        front.len(),
                        i
                    )));
                }
            }
            return Ok((d, "legal".to_string()));
        }
        OrderArg::Given => {
            if order.is_empty() {
                return Err(usage("--ordering given requires --order"));
            }
            OrderingStrategy::Given(order.iter().map(|i| Var(*i)).collect())
        }
    };
    let g = nf.network.moral_graph();
    let d = find_ordering_with_front(&g, &strategy, front)?;
    Ok((d, strategy.name().to_string()))
}

fn solve_cfg(args: &SolveArgs) -> Result<MiniBucketConfig> {
    let cfg = match (args.strategy, args.i, args.m) {
        (Some(StrategyArg::ByI), Some(i), _) | (None, Some(i), None) => {
            MiniBucketConfig::by_i(i)?
        }
        (Some(StrategyArg::ByM), _, Some(m)) | (None, None, Some(m)) => {
            MiniBucketConfig::by_m(m)?
        }
        (Some(StrategyArg::ByI), None, _) => return Err(usage("--strategy by-i requires --i")),
        (Some(StrategyArg::ByM), _, None) => return Err(usage("--strategy by-m requires --m")),
        (None, Some(_), Some(_)) => {
            return Err(usage("both --i and --m given; pick one with --strategy"))
        }
        (None, None, None) => return Err(usage("--approx requires --i or --m")),
    };
    Ok(if args.superbuckets {
        cfg.with_super_buckets()
    } else {
        cfg
    })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<String> {
    if !args.exact && !args.approx {
        return Err(usage("pass --exact, --approx or both"));
    }
    let limits = limits_from_env();
    let nf = load_network(&args.file)?;
    let instance = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let hyp: Vec<Var> = args.hyp.iter().map(|i| Var(*i)).collect();
    let query = args.query.map(Var);
    let front: Vec<Var> = match args.task {
        TaskArg::Mpe => Vec::new(),
        TaskArg::Bel => {
            let q = query.ok_or_else(|| usage("--task bel requires --query"))?;
            vec![q]
        }
        TaskArg::Map => {
            if hyp.is_empty() {
                return Err(usage("--task map requires --hyp"));
            }
            hyp.clone()
        }
    };
    let (d, ordering_name) = build_ordering(&nf, args.ordering, &args.order, &front)?;

    let mut row = StatRow {
        instance,
        task: args.task.name().to_string(),
        strategy: "exact".to_string(),
        ordering: ordering_name,
        ..Default::default()
    };

    if args.approx {
        let cfg = solve_cfg(args)?;
        row.strategy = match cfg.strategy {
            bnet_core::minibucket::PartitionStrategy::ByI => "by_i".to_string(),
            bnet_core::minibucket::PartitionStrategy::ByM => "by_m".to_string(),
        };
        if args.i.is_some() {
            row.i = args.i;
        }
        if args.m.is_some() {
            row.m = args.m;
        }
        let t0 = Instant::now();
        match args.task {
            TaskArg::Mpe => {
                let r = approx_mpe(&nf.network, &nf.evidence, &d, &cfg, &limits)?;
                row.upper = Some(r.upper);
                row.lower = Some(r.lower);
                row.mb = Some(r.mb);
                row.fi = Some(r.f_i);
                row.fo = Some(r.f_o);
            }
            TaskArg::Bel => {
                let q = query.expect("validated above");
                let up = approx_bel(&nf.network, &nf.evidence, &d, q, &cfg, BelMode::Upper, &limits)?;
                let lo = approx_bel(&nf.network, &nf.evidence, &d, q, &cfg, BelMode::Lower, &limits)?;
                row.upper = Some(up.p_evidence_bound);
                row.lower = Some(lo.p_evidence_bound);
                row.mb = Some(up.mb);
                row.fi = Some(nf.network.max_family_size());
                row.fo = Some(up.f_o);
            }
            TaskArg::Map => {
                let r = approx_map(&nf.network, &nf.evidence, &d, &hyp, &cfg, &limits)?;
                row.upper = Some(r.upper);
                row.lower = r.lower;
                row.mb = Some(r.mb);
                row.fi = Some(r.f_i);
                row.fo = Some(r.f_o);
            }
        }
        row.ta = Some(clock_floor(t0.elapsed().as_secs_f64()));
    }

    if args.exact {
        let t0 = Instant::now();
        match args.task {
            TaskArg::Mpe => {
                let r = elim_mpe(&nf.network, &nf.evidence, &d, &limits)?;
                row.exact = Some(r.value);
                if !args.approx {
                    row.fi = Some(r.trace.f_i);
                    row.fo = Some(r.trace.f_o);
                    row.mb = Some(1);
                }
            }
            TaskArg::Bel => {
                let q = query.expect("validated above");
                let r = elim_bel(&nf.network, &nf.evidence, &d, q, &limits)?;
                row.exact = Some(r.p_evidence);
            }
            TaskArg::Map => {
                let r = elim_map(&nf.network, &nf.evidence, &d, &hyp, &limits)?;
                row.exact = Some(r.value);
            }
        }
        row.te = Some(clock_floor(t0.elapsed().as_secs_f64()));
    }

    if let (Some(te), Some(ta)) = (row.te, row.ta) {
        row.tr = Some(te / ta);
    }
    Ok(row.with_ratios().to_csv())
}

pub fn cmd_width(args: &WidthArgs) -> Result<String> {
    let nf = load_network(&args.file)?;
    let (d, name) = build_ordering(&nf, args.ordering, &args.order, &[])?;
    let g = nf.network.moral_graph();
    let (w, wi) = width_and_induced_width(&g, &d)?;
    let order: Vec<String> = d.vars().iter().map(|v| v.0.to_string()).collect();
    Ok(format!(
        "ordering {name}: {}\nw(d) = {w}\nw*(d) = {wi}",
        order.join(" ")
    ))
}

/// One grid configuration with its row labels.
#[derive(Clone, Copy, Debug)]
pub struct GridPoint {
    pub cfg: MiniBucketConfig,
    pub i: Option<usize>,
    pub m: Option<usize>,
}

impl GridPoint {
    pub fn strategy_name(&self) -> &'static str {
        match self.cfg.strategy {
            bnet_core::minibucket::PartitionStrategy::ByI => "by_i",
            bnet_core::minibucket::PartitionStrategy::ByM => "by_m",
        }
    }

    pub fn label(&self) -> String {
        match (self.i, self.m) {
            (Some(i), _) => format!("i={i}"),
            (_, Some(m)) => format!("m={m}"),
            _ => "exact".to_string(),
        }
    }
}

pub fn grid_points(
    grid_i: &[usize],
    grid_m: &[usize],
    superbuckets: bool,
) -> Result<Vec<GridPoint>> {
    let mut points = Vec::new();
    for &i in grid_i {
        let mut cfg = MiniBucketConfig::by_i(i)?;
        cfg.super_buckets = superbuckets;
        points.push(GridPoint {
            cfg,
            i: Some(i),
            m: None,
        });
    }
    for &m in grid_m {
        let mut cfg = MiniBucketConfig::by_m(m)?;
        cfg.super_buckets = superbuckets;
        points.push(GridPoint {
            cfg,
            i: None,
            m: Some(m),
        });
    }
    if points.is_empty() {
        return Err(usage("bench needs --grid-i and/or --grid-m"));
    }
    Ok(points)
}

pub struct BenchOutput {
    pub rows: Vec<StatRow>,
    pub summary: String,
}

impl BenchOutput {
    pub fn csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }
}

/// Run the MPE bench over a set of instance files. Rows appear in manifest
/// order, one per (instance, grid point), with the exact engine run at most
/// once per instance.
pub fn bench_files(
    files: &[PathBuf],
    points: &[GridPoint],
    ordering: OrderArg,
    exact_mode: ExactMode,
    limits: &Limits,
) -> Result<BenchOutput> {
    struct Sample {
        ml: Option<f64>,
        um: Option<f64>,
        ul: f64,
        tr: Option<f64>,
        ta: f64,
    }
    let mut rows = Vec::with_capacity(files.len() * points.len());
    let mut samples: Vec<Vec<Sample>> = Vec::new();
    samples.resize_with(points.len(), Vec::new);

    for file in files {
        let nf = load_network(file)?;
        let instance = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (d, ordering_name) = build_ordering(&nf, ordering, &[], &[])?;

        let exact = match exact_mode {
            ExactMode::Never => None,
            ExactMode::Auto | ExactMode::Always => {
                let t0 = Instant::now();
                match elim_mpe(&nf.network, &nf.evidence, &d, limits) {
                    Ok(r) => Some((r.value, clock_floor(t0.elapsed().as_secs_f64()))),
                    Err(Error::ResourceLimit { .. }) if exact_mode == ExactMode::Auto => None,
                    Err(err) => return Err(err),
                }
            }
        };

        for (pi, point) in points.iter().enumerate() {
            let t0 = Instant::now();
            let r = approx_mpe(&nf.network, &nf.evidence, &d, &point.cfg, limits)?;
            let ta = clock_floor(t0.elapsed().as_secs_f64());
            let mut row = StatRow {
                instance: instance.clone(),
                task: "mpe".to_string(),
                strategy: point.strategy_name().to_string(),
                i: point.i,
                m: point.m,
                exact: exact.map(|(v, _)| v),
                upper: Some(r.upper),
                lower: Some(r.lower),
                ta: Some(ta),
                te: exact.map(|(_, t)| t),
                mb: Some(r.mb),
                fi: Some(r.f_i),
                fo: Some(r.f_o),
                ordering: ordering_name.clone(),
                ..Default::default()
            };
            if let Some((_, te)) = exact {
                row.tr = Some(te / ta);
            }
            let row = row.with_ratios();
            samples[pi].push(Sample {
                ml: row.ml,
                um: row.um,
                ul: row.ul.unwrap_or(f64::INFINITY),
                tr: row.tr,
                ta,
            });
            rows.push(row);
        }
    }

    let mut summary = String::new();
    for (pi, point) in points.iter().enumerate() {
        let s = &samples[pi];
        let mls: Vec<f64> = s.iter().filter_map(|x| x.ml).collect();
        let ums: Vec<f64> = s.iter().filter_map(|x| x.um).collect();
        let uls: Vec<f64> = s.iter().map(|x| x.ul).collect();
        let trs: Vec<f64> = s.iter().filter_map(|x| x.tr).collect();
        let tas: Vec<f64> = s.iter().map(|x| x.ta).collect();
        let ml_hist = histogram(
            &s.iter()
                .filter_map(|x| x.ml.map(|ml| (ml, x.tr.unwrap_or(0.0))))
                .collect::<Vec<_>>(),
        );
        let um_hist = histogram(
            &s.iter()
                .filter_map(|x| x.um.map(|um| (um, x.tr.unwrap_or(0.0))))
                .collect::<Vec<_>>(),
        );
        let means = SummaryMeans {
            ml: mean(&mls),
            um: mean(&ums),
            ul: mean(&uls),
            tr: mean(&trs),
            ta: mean(&tas),
        };
        summary.push_str(&render_summary(&point.label(), &ml_hist, &um_hist, &means));
    }
    Ok(BenchOutput { rows, summary })
}

/// Read a manifest: one path per line, `#` comments, relative to the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut files = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            files.push(base.join(line));
        }
    }
    Ok(files)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String> {
    if args.task != TaskArg::Mpe {
        return Err(usage("bench currently runs the mpe task"));
    }
    let limits = limits_from_env();
    let files = read_manifest(&args.manifest)?;
    if files.is_empty() {
        return Err(Error::InvalidNetwork("manifest lists no instances".into()));
    }
    let points = grid_points(&args.grid_i, &args.grid_m, args.superbuckets)?;
    let out = bench_files(&files, &points, args.ordering, args.exact, &limits)?;
    std::fs::write(&args.out, out.csv())?;
    Ok(format!(
        "wrote {} rows to {}\n{}",
        out.rows.len(),
        args.out.display(),
        out.summary
    ))
}

pub fn run(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Width(args) => cmd_width(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// Exit code classes: 2 parse, 3 resource, 4 infeasible configuration,
/// 1 anything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => 2,
        Error::ResourceLimit { .. }
        | Error::FrontierLimit { .. }
        | Error::OracleBudget { .. }
        | Error::TableTooLarge => 3,
        Error::InfeasibleConfig(_)
        | Error::HypothesisOrdering
        | Error::QueryOrdering
        | Error::NotPolytree
        | Error::InvalidOrdering(_) => 4,
        _ => 1,
    }
}
