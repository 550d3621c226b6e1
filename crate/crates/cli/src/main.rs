use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kcoarse::coarsen::{
    coarsen_pipeline, AggregationSpec, Coarsening, EdgeAgg, NodeAgg, RankingSpec,
};
use kcoarse::graph::{Graph, GraphError, NodeWeights, DEFAULT_POWER_CAP};
use kcoarse::io::{self, Format, LoadedGraph};
use kcoarse::oracle::{compare, CompareConfig, OracleError, OracleReport, Rule};
use kcoarse::ranking::StaticRanking;
use kcoarse::verify::{verify_all, PairSelection, DEFAULT_SAMPLE_PAIRS};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "kcoarse",
    version,
    about = "Coarsen graphs around maximal k-independent sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coarsen a graph and write the reduced graph with its node map.
    Coarsen(CoarsenArgs),
    /// Coarsen, then check the structural guarantees. Exit 1 on any violation.
    Verify(VerifyArgs),
    /// Sweep k and time every phase; optionally compare against sequential greedy.
    Bench(BenchArgs),
}

#[derive(Args, Serialize)]
struct Common {
    /// Input graph.
    #[arg(short, long)]
    input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(short, long, value_enum)]
    format: Option<InputFormat>,
    /// Node ranking: kdeg, kweight, id, random, const or file:PATH.
    #[arg(long, default_value = "kweight", value_parser = parse_rank)]
    rank: RankArg,
    #[arg(long, value_enum, default_value = "sum")]
    edge_agg: EdgeAggArg,
    #[arg(long, value_enum, default_value = "centroid")]
    node_agg: NodeAggArg,
    /// Also report the aggregated weight of edges inside each cluster.
    #[arg(long)]
    keep_intra: bool,
    /// Node weights, one per line in input node order (default all ones).
    #[arg(long)]
    node_weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(skip)]
    threads: Option<u64>,
}

#[derive(Args, Serialize)]
struct CoarsenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(short, long)]
    k: usize,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(short, long)]
    k: usize,
    /// Node pairs sampled for the distortion check above 500 nodes.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_PAIRS)]
    pairs: usize,
    /// Override node-to-centroid assignments, one `node centroid` pair of
    /// original ids per line.
    #[arg(long)]
    rho: Option<PathBuf>,
    /// Directory for the CSV report.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BenchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    k_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Compare weights against sequential greedy on the explicit graph power.
    #[arg(long)]
    compare_greedy: bool,
    /// Uniform weight range `lo:hi` for the greedy comparison.
    #[arg(long, default_value = "1:100", value_parser = parse_range)]
    weight_range: (f64, f64),
    /// Largest graph power the greedy comparison may build.
    #[arg(long, default_value_t = DEFAULT_POWER_CAP)]
    oracle_cap: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InputFormat {
    Edgelist,
    Mm,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EdgeAggArg {
    Sum,
    Max,
    Min,
    Mean,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NodeAggArg {
    Centroid,
    Sum,
    Mean,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum RankArg {
    KDeg,
    KWeight,
    Id,
    Random,
    Const,
    File(PathBuf),
}

fn parse_rank(s: &str) -> Result<RankArg, String> {
    Ok(match s {
        "kdeg" => RankArg::KDeg,
        "kweight" => RankArg::KWeight,
        "id" => RankArg::Id,
        "random" => RankArg::Random,
        "const" => RankArg::Const,
        _ => match s.strip_prefix("file:") {
            Some(path) if !path.is_empty() => RankArg::File(path.into()),
            _ => return Err(format!("unknown ranking `{s}`")),
        },
    })
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err("need 0 < lo < hi".into());
    }
    Ok((lo, hi))
}

/// Everything one run needs besides its subcommand-specific options.
struct Setup {
    loaded: LoadedGraph,
    x: Option<NodeWeights>,
    ranking: RankingSpec,
    agg: AggregationSpec,
    name: String,
}

impl Common {
    fn setup(&self) -> Result<Setup> {
        if let Some(t) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t as usize)
                .build_global()
                .context("configuring the thread pool")?;
        }
        let format = match self.format {
            Some(InputFormat::Edgelist) => Format::EdgeList,
            Some(InputFormat::Mm) => Format::MatrixMarket,
            None => match self.input.extension().and_then(|e| e.to_str()) {
                Some("mtx" | "mm") => Format::MatrixMarket,
                _ => Format::EdgeList,
            },
        };
        let loaded = io::load(&self.input, format).context("loading the input graph")?;
        let n = loaded.graph.n();
        let x = match &self.node_weights {
            Some(path) => {
                let raw = io::read_scores(path).context("reading node weights")?;
                let x = NodeWeights::new(raw).context("node weights")?;
                x.check_len(n).context("node weights")?;
                Some(x)
            }
            None => None,
        };
        let ranking = match &self.rank {
            RankArg::KDeg => RankingSpec::KDegree,
            RankArg::KWeight => RankingSpec::KWeight,
            RankArg::Id => RankingSpec::Static(StaticRanking::NodeId),
            RankArg::Random => RankingSpec::Static(StaticRanking::Random { seed: self.seed }),
            RankArg::Const => RankingSpec::Static(StaticRanking::Constant),
            RankArg::File(path) => {
                let scores = io::read_scores(path).context("reading ranking scores")?;
                if scores.len() != n {
                    bail!("{}: {} scores for {n} nodes", path.display(), scores.len());
                }
                RankingSpec::Static(StaticRanking::External(scores))
            }
        };
        let agg = AggregationSpec {
            edge: match self.edge_agg {
                EdgeAggArg::Sum => EdgeAgg::Sum,
                EdgeAggArg::Max => EdgeAgg::Max,
                EdgeAggArg::Min => EdgeAgg::Min,
                EdgeAggArg::Mean => EdgeAgg::Mean,
            },
            node: match self.node_agg {
                NodeAggArg::Centroid => NodeAgg::KeepCentroid,
                NodeAggArg::Sum => NodeAgg::Sum,
                NodeAggArg::Mean => NodeAgg::Mean,
            },
            keep_intra: self.keep_intra,
        };
        let name = self
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into());
        Ok(Setup {
            loaded,
            x,
            ranking,
            agg,
            name,
        })
    }
}

impl Setup {
    fn coarsen(&self, k: usize) -> Result<Coarsening> {
        coarsen_pipeline(
            &self.loaded.graph,
            k,
            &self.ranking,
            &self.agg,
            self.x.as_ref(),
        )
        .context("coarsening")
    }
}

fn config_line<T: Serialize>(command: &str, args: &T) -> Result<String> {
    let mut value = serde_json::to_value(args)?;
    if let Some(map) = value.as_object_mut() {
        map.insert("command".into(), command.into());
    }
    Ok(format!("config {}", serde_json::to_string(&value)?))
}

fn create(dir: &Path, file: &str) -> Result<std::io::BufWriter<fs::File>> {
    let path = dir.join(file);
    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(std::io::BufWriter::new(f))
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_coarsen(args: &CoarsenArgs) -> Result<ExitCode> {
    let config = config_line("coarsen", args)?;
    let setup = args.common.setup()?;
    let c = setup.coarsen(args.k)?;
    let g = &setup.loaded.graph;
    let ids = &setup.loaded.original_ids;
    let h = &c.coarse;
    let dir = &args.output;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut out = create(dir, "coarse.edgelist")?;
    io::write_edgelist(&mut out, &h.graph, std::slice::from_ref(&config))?;
    out.flush()?;

    let mut out = create(dir, "rho.txt")?;
    writeln!(out, "# {config}")?;
    writeln!(out, "# node centroid")?;
    for (v, &c) in h.partition.assignment.iter().enumerate() {
        writeln!(out, "{} {}", ids[v], ids[c])?;
    }
    out.flush()?;

    let sizes: Vec<usize> = h.partition.fibers().iter().map(Vec::len).collect();
    let mut out = create(dir, "centroids.csv")?;
    writeln!(out, "# {config}")?;
    let intra = h.intra_weights.as_ref();
    writeln!(
        out,
        "index,centroid,size,value{}",
        if intra.is_some() { ",intra_weight" } else { "" }
    )?;
    for (i, &c) in h.centroids().iter().enumerate() {
        let value = h
            .node_values
            .as_ref()
            .map(|v| format!("{:?}", v[i]))
            .unwrap_or_default();
        write!(out, "{i},{},{},{value}", ids[c], sizes[i])?;
        if let Some(w) = intra {
            write!(out, ",{:?}", w[i])?;
        }
        writeln!(out)?;
    }
    out.flush()?;

    let t = &c.timings;
    let ratio = if g.n() == 0 {
        1.0
    } else {
        h.graph.n() as f64 / g.n() as f64
    };
    let mut out = create(dir, "stats.csv")?;
    writeln!(out, "# {config}")?;
    writeln!(
        out,
        "n,m,k,selected,coarse_m,reduction_ratio,kmis_rounds,ranking_ms,kmis_ms,reduce_ms,total_ms"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{ratio:.6},{},{:.3},{:.3},{:.3},{:.3}",
        g.n(),
        g.m(),
        args.k,
        h.graph.n(),
        h.graph.m(),
        c.kmis.rounds,
        ms(t.ranking),
        ms(t.kmis),
        ms(t.reduce),
        ms(t.total())
    )?;
    out.flush()?;

    println!(
        "n={} m={} -> n={} m={} (ratio {ratio:.4}) in {:.1} ms",
        g.n(),
        g.m(),
        h.graph.n(),
        h.graph.m(),
        ms(t.total())
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let config = config_line("verify", args)?;
    let setup = args.common.setup()?;
    let c = setup.coarsen(args.k)?;
    let g = &setup.loaded.graph;
    let ids = &setup.loaded.original_ids;

    let mut rho = c.coarse.partition.assignment.clone();
    if let Some(path) = &args.rho {
        let pairs = io::read_pairs(path).context("reading the node map")?;
        // Dense ids are assigned in ascending original-id order.
        let dense = |id: u64| ids.binary_search(&id).ok();
        for (node, centroid) in pairs {
            let v = dense(node)
                .with_context(|| format!("{}: node {node} is not in the graph", path.display()))?;
            rho[v] = dense(centroid).unwrap_or(usize::MAX);
        }
    }

    let pairs = PairSelection::Auto {
        count: args.pairs,
        seed: args.common.seed,
    };
    let report = verify_all(g, &c.coarse, args.k, Some(&rho), pairs);
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut out = create(dir, "verify.csv")?;
        writeln!(out, "# {config}")?;
        out.write_all(report.to_csv().as_bytes())?;
        out.flush()?;
    }

    println!(
        "k={} selected={} coarse_edges={} pairs={} components={}/{}",
        args.k,
        report.kmis.selected,
        report.edge_bounds.per_coarse_edge.len(),
        report.distortion.per_pair.len(),
        report.components.original,
        report.components.coarse
    );
    println!("edge distances: {:?}", report.edge_bounds.histogram);
    if report.passed() {
        println!("ok: no violations");
        return Ok(ExitCode::SUCCESS);
    }
    let violations: Vec<_> = report.violations().collect();
    eprintln!("{} violations (dense node ids)", violations.len());
    for v in violations.iter().take(20) {
        eprintln!("  {v:?}");
    }
    Ok(ExitCode::from(1))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let config = config_line("bench", args)?;
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let setup = args.common.setup()?;
    let g: &Graph = &setup.loaded.graph;
    let dir = &args.output;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut runs = create(dir, "bench.csv")?;
    writeln!(runs, "# {config}")?;
    writeln!(runs, "graph,k,trial,n,selected,reduction_ratio,kmis_rounds,ranking_ms,kmis_ms,reduce_ms,total_ms")?;
    let mut summary = create(dir, "bench_summary.csv")?;
    writeln!(summary, "# {config}")?;
    writeln!(summary, "graph,k,trials,mean_reduction_ratio,median_ranking_ms,median_kmis_ms,median_reduce_ms,median_total_ms")?;
    for &k in &args.k_list {
        let mut times = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        let mut ratio_sum = 0.0;
        for trial in 0..args.trials {
            let c = setup.coarsen(k)?;
            let t = &c.timings;
            let ratio = c.coarse.graph.n() as f64 / g.n().max(1) as f64;
            ratio_sum += ratio;
            for (acc, d) in times
                .iter_mut()
                .zip([t.ranking, t.kmis, t.reduce, t.total()])
            {
                acc.push(ms(d));
            }
            writeln!(
                runs,
                "{},{k},{trial},{},{},{ratio:.6},{},{:.3},{:.3},{:.3},{:.3}",
                setup.name,
                g.n(),
                c.coarse.graph.n(),
                c.kmis.rounds,
                ms(t.ranking),
                ms(t.kmis),
                ms(t.reduce),
                ms(t.total())
            )?;
        }
        let [r, s, d, total] = times.map(median);
        let mean_ratio = ratio_sum / args.trials as f64;
        writeln!(
            summary,
            "{},{k},{},{mean_ratio:.6},{r:.3},{s:.3},{d:.3},{total:.3}",
            setup.name, args.trials
        )?;
        println!("k={k}: ratio {mean_ratio:.4}, median {total:.1} ms");
    }
    runs.flush()?;
    summary.flush()?;

    if args.compare_greedy {
        let mut out = create(dir, "weights.csv")?;
        writeln!(out, "# {config}")?;
        writeln!(out, "{}", OracleReport::CSV_HEADER)?;
        let cfg = CompareConfig {
            trials: args.trials,
            weight_lo: args.weight_range.0,
            weight_hi: args.weight_range.1,
            seed: args.common.seed,
            power_cap: args.oracle_cap,
        };
        for &k in &args.k_list {
            for rule in [Rule::Degree, Rule::Weight] {
                match compare(g, k, rule, &cfg) {
                    Ok(report) => {
                        for row in report.csv_rows(&setup.name) {
                            writeln!(out, "{row}")?;
                        }
                        println!(
                            "k={k} {} rule: greedy {:.1}, ours {:.1} (ratio {:.4}), {} bound violations",
                            rule.name(),
                            report.greedy_weight,
                            report.ours_weight,
                            report.ours_weight / report.greedy_weight,
                            report.violations()
                        );
                    }
                    Err(OracleError::Graph(e @ GraphError::TooLarge { .. })) => {
                        writeln!(out, "# skipped k={k} {}: {e}", rule.name())?;
                        eprintln!("skipping k={k} {} rule: {e}", rule.name());
                    }
                    Err(e) => return Err(e).context("greedy comparison"),
                }
            }
        }
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coarsen(a) => cmd_coarsen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
