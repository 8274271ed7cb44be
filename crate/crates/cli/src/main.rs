use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gstats_core::analysis::{
    bounding_box_ratio, correlation_matrix, correlation_trends, kl_divergence, ks_statistic, normalize_all,
    CorrelationMatrix, CoverageReport, DEFAULT_COVERAGE_RUNS, DEFAULT_KL_BINS, KL_SMOOTHING,
};
use gstats_core::atlas::{
    build_atlas, encode_graph6, load_atlas, read_graph6_file, read_manifest, read_rows, write_rows, Atlas, AtlasRow,
    BuildOptions,
};
use gstats_core::finder::{assign_slots, preset_by_name, query, Constraint, FilterQuery, RtMode};
use gstats_core::generators::{count_for_rate, sample_batch, FixedParams, GeneratorConfig, Model, Sample};
use gstats_core::stats::max_apl;
use gstats_core::{stat_vector, Error, Result, StatVector, Statistic};

#[derive(Parser)]
#[command(name = "gstats", version, about = "Ground-truth statistics for small graphs")]
struct Cli {
    /// Print a JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Directory holding atlas files.
    #[arg(long, global = true, env = "ATLAS_DIR", default_value = "atlas")]
    atlas_dir: PathBuf,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the atlas of all non-isomorphic graphs of one order.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Output directory (defaults to the atlas directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Permit order 10 (about 12 million graphs).
        #[arg(long)]
        allow_order_ten: bool,
    },
    /// Statistics table for arbitrary graph6 input.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a sample from a random graph model.
    Generate {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation matrix of the atlas or of a generated sample.
    Correlate {
        #[arg(long, value_enum, default_value_t = Source::Atlas)]
        source: Source,
        #[arg(long)]
        n: usize,
        /// Directory written by `generate` (for --source sample).
        #[arg(long)]
        sample: Option<PathBuf>,
    },
    /// Bounding-box coverage of a model against the atlas, averaged over runs.
    Coverage {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = DEFAULT_COVERAGE_RUNS)]
        runs: usize,
    },
    /// Distribution distance between a model and the atlas per statistic.
    Compare {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, value_enum, default_value_t = Metric::Ks)]
        metric: Metric,
        /// Statistic to compare; all summary statistics when omitted.
        #[arg(long)]
        stat: Option<Statistic>,
        #[arg(long, default_value_t = DEFAULT_KL_BINS)]
        bins: usize,
    },
    /// Correlation-vs-order series for the atlas and a model.
    Trends {
        #[arg(long, default_value_t = 5)]
        n_min: usize,
        #[arg(long, default_value_t = 9)]
        n_max: usize,
        #[arg(long, default_value = "er-uniform")]
        model: Model,
        #[arg(long, default_value_t = 10_000)]
        count_per_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graphs sharing fixed statistics, binned by a free statistic.
    Find {
        #[arg(long)]
        n: Option<usize>,
        /// Constraint STAT:MIN:MAX or STAT:VALUE (repeatable).
        #[arg(long = "fix", value_parser = parse_constraint)]
        fix: Vec<Constraint>,
        #[arg(long)]
        vary: Option<Statistic>,
        /// Start from a named preset query.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        rt_mode: Option<RtModeArg>,
        /// Directory for one graph6 file per occupied slot.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API over the atlas directory.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Sample size; overridden by --rate.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Sample size as a fraction of the atlas size.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-count policy for the ER family.
    #[arg(long, value_enum)]
    edge_strategy: Option<EdgeStrategy>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Atlas,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Ks,
    Kl,
}

#[derive(Clone, Copy, ValueEnum)]
enum EdgeStrategy {
    Uniform,
    Population,
}

#[derive(Clone, Copy, ValueEnum)]
enum RtModeArg {
    Pairs,
    Triples,
}

impl From<RtModeArg> for RtMode {
    fn from(m: RtModeArg) -> Self {
        match m {
            RtModeArg::Pairs => RtMode::Pairs,
            RtModeArg::Triples => RtMode::Triples,
        }
    }
}

fn parse_constraint(s: &str) -> std::result::Result<Constraint, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let stat: Statistic = parts[0].parse().map_err(|e: Error| e.to_string())?;
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    match parts[1..] {
        [v] => Ok(Constraint::point(stat, num(v)?)),
        [lo, hi] => Ok(Constraint::new(stat, num(lo)?, num(hi)?)),
        _ => Err(format!("expected STAT:MIN:MAX or STAT:VALUE, got {s:?}")),
    }
}

/// What a command reports: a JSON summary and a human-readable rendering.
struct Report {
    json: Value,
    text: String,
}

impl Report {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Report { json, text: text.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let as_json = cli.json;
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let body = if as_json {
                serde_json::to_string_pretty(&report.json).expect("reports serialize")
            } else {
                report.text
            };
            let _ = writeln!(out, "{body}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if as_json {
                println!("{}", json!({"error": {"code": e.code(), "message": e.to_string()}}));
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Report> {
    let dir = cli.atlas_dir;
    match cli.command {
        Command::Enumerate { n, out, allow_order_ten } => {
            let target = out.unwrap_or(dir);
            let (atlas, manifest) = build_atlas(&target, n, BuildOptions { allow_order_ten })?;
            Ok(Report::new(
                json!({"n": n, "count": atlas.len(), "apl_ref": manifest.apl_ref, "dir": target}),
                format!("n={n} count={} apl_ref={}", atlas.len(), manifest.apl_ref),
            ))
        }
        Command::Stats { input, out } => stats_command(&input, &out),
        Command::Generate { sample, out } => {
            let s = draw(&dir, &sample, 0)?;
            write_sample(&out, &s)?;
            Ok(Report::new(
                json!({"config": s.config, "count": s.graphs.len(), "out": out}),
                format!("wrote {} {} graphs to {}", s.graphs.len(), s.config.model, out.display()),
            ))
        }
        Command::Correlate { source, n, sample } => {
            let matrix = match source {
                Source::Atlas => {
                    let atlas = load_atlas(&dir, n)?;
                    let stats: Vec<StatVector> = atlas.stats().cloned().collect();
                    correlation_matrix(&normalize_all(&stats, atlas.apl_ref)?)
                }
                Source::Sample => {
                    let path = sample.ok_or_else(|| Error::BadParam("--source sample needs --sample DIR".into()))?;
                    let rows = read_rows(fs::File::open(path.join("sample.csv"))?)?;
                    let stats: Vec<StatVector> = rows.into_iter().map(|r| r.stats).filter(|s| s.n == n).collect();
                    if stats.is_empty() {
                        return Err(Error::EmptyInput);
                    }
                    let apl_ref = read_manifest(&dir, n).map(|m| m.apl_ref).unwrap_or_else(|_| max_apl(&stats));
                    correlation_matrix(&normalize_all(&stats, apl_ref)?)
                }
            };
            let text = render_matrix(&matrix);
            Ok(Report::new(serde_json::to_value(&matrix)?, text))
        }
        Command::Coverage { sample, runs } => {
            if runs == 0 {
                return Err(Error::BadParam("--runs must be at least 1".into()));
            }
            let atlas = load_atlas(&dir, sample.n)?;
            let truth: Vec<StatVector> = atlas.stats().cloned().collect();
            let reports = (0..runs as u64)
                .map(|r| {
                    let s = draw_with(&atlas, &sample, r)?;
                    bounding_box_ratio(&s.stats, &truth)
                })
                .collect::<Result<Vec<_>>>()?;
            let report = CoverageReport::average(&reports)?;
            let text = render_coverage(&report);
            Ok(Report::new(
                json!({"n": sample.n, "model": sample.model, "report": report}),
                text,
            ))
        }
        Command::Compare { sample, metric, stat, bins } => {
            let atlas = load_atlas(&dir, sample.n)?;
            let s = draw_with(&atlas, &sample, 0)?;
            let stats = match stat {
                Some(st) => vec![st],
                None => Statistic::SUMMARY.to_vec(),
            };
            let mut rows = Vec::new();
            let mut text = String::new();
            for st in stats {
                let truth: Vec<f64> = atlas.stats().map(|v| v.get(st).unwrap_or(f64::NAN)).collect();
                let drawn: Vec<f64> = s.stats.iter().map(|v| v.get(st).unwrap_or(f64::NAN)).collect();
                let value = match metric {
                    Metric::Ks => ks_statistic(&drawn, &truth)?,
                    Metric::Kl => kl_divergence(&drawn, &truth, bins)?,
                };
                text.push_str(&format!("{:<6} {value:.6}\n", st.name()));
                rows.push(json!({"stat": st, "value": value}));
            }
            let metric_json = match metric {
                Metric::Ks => json!({"name": "ks"}),
                Metric::Kl => json!({"name": "kl", "bins": bins, "smoothing": KL_SMOOTHING}),
            };
            Ok(Report::new(
                json!({"n": sample.n, "model": sample.model, "sample_size": s.graphs.len(), "metric": metric_json, "distances": rows}),
                text.trim_end().to_string(),
            ))
        }
        Command::Trends { n_min, n_max, model, count_per_n, seed } => {
            if n_min > n_max {
                return Err(Error::BadParam(format!("--n-min {n_min} exceeds --n-max {n_max}")));
            }
            let template = GeneratorConfig::new(model, n_min, count_per_n, seed);
            let series = correlation_trends(&dir, n_min..=n_max, &template, count_per_n)?;
            let mut text = String::new();
            for s in &series {
                text.push_str(&format!(
                    "{:>4}-{:<4} truth {:<13} {} {}\n",
                    s.pair.0.name(),
                    s.pair.1.name(),
                    s.truth_pattern.to_string(),
                    model,
                    s.generator_pattern
                ));
            }
            Ok(Report::new(serde_json::to_value(&series)?, text.trim_end().to_string()))
        }
        Command::Find { n, fix, vary, preset, rt_mode, out } => {
            let mut q = match &preset {
                Some(name) => preset_by_name(name)
                    .ok_or_else(|| Error::BadQuery(format!("unknown preset {name:?}")))?
                    .query,
                None => {
                    let n = n.ok_or_else(|| Error::BadQuery("--n is required without --preset".into()))?;
                    let vary = vary.ok_or_else(|| Error::BadQuery("--vary is required without --preset".into()))?;
                    FilterQuery::new(n, vary)
                }
            };
            if preset.is_some() {
                if let Some(n) = n {
                    q.n = n;
                }
                if let Some(v) = vary {
                    q.vary = v;
                }
            }
            q.constraints.extend(fix);
            if let Some(m) = rt_mode {
                q.rt_mode = m.into();
            }
            find_command(&dir, &q, out.as_deref())
        }
        Command::Serve { bind, port } => {
            let addr = SocketAddr::new(bind, port);
            eprintln!("serving {} on http://{addr}", dir.display());
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(gstats_service::serve(dir, addr))?;
            Ok(Report::new(json!({"stopped": true}), "stopped"))
        }
    }
}

fn config_for(sample: &SampleArgs, count: usize, run: u64) -> Result<GeneratorConfig> {
    let model = match (sample.edge_strategy, sample.model) {
        (None, m) => m,
        (Some(EdgeStrategy::Uniform), Model::ErUniform | Model::GnmUniform | Model::GnmPopulation | Model::ErPopulation) => {
            Model::GnmUniform
        }
        (Some(EdgeStrategy::Population), Model::ErUniform | Model::GnmUniform | Model::GnmPopulation | Model::ErPopulation) => {
            Model::GnmPopulation
        }
        (Some(_), m) => {
            return Err(Error::BadParam(format!(
                "--edge-strategy applies to the er family only, not {m}"
            )))
        }
    };
    let params = FixedParams {
        p: sample.p,
        k: sample.k,
        m: sample.m,
        radius: sample.radius,
    };
    Ok(GeneratorConfig::new(model, sample.n, count, sample.seed.wrapping_add(run)).with_params(params))
}

/// Draws a sample for `run` (seed offset), resolving --rate and population
/// histograms from the atlas when needed.
fn draw(dir: &Path, sample: &SampleArgs, run: u64) -> Result<Sample> {
    let probe = config_for(sample, 1, run)?;
    if sample.rate.is_some() || probe.model.needs_histogram() {
        let atlas = load_atlas(dir, sample.n)?;
        return draw_with(&atlas, sample, run);
    }
    sample_batch(&config_for(sample, sample.count, run)?, None)
}

fn draw_with(atlas: &Atlas, sample: &SampleArgs, run: u64) -> Result<Sample> {
    let count = match sample.rate {
        Some(r) => count_for_rate(r, atlas.len())?,
        None => sample.count,
    };
    sample_batch(&config_for(sample, count, run)?, Some(&atlas.histogram))
}

fn write_sample(out: &Path, s: &Sample) -> Result<()> {
    fs::create_dir_all(out)?;
    let codes: Vec<String> = s.graphs.iter().map(encode_graph6).collect();
    let mut g6 = String::new();
    for c in &codes {
        g6.push_str(c);
        g6.push('\n');
    }
    fs::write(out.join("sample.g6"), g6)?;
    let file = fs::File::create(out.join("sample.csv"))?;
    write_rows(file, codes.iter().map(String::as_str).zip(&s.stats))?;
    fs::write(out.join("sample.json"), serde_json::to_string_pretty(&s.config)?)?;
    Ok(())
}

fn stats_command(input: &Path, out: &Path) -> Result<Report> {
    let graphs = read_graph6_file(input)?;
    let mut codes = Vec::new();
    let mut stats = Vec::new();
    let mut rejected = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        match stat_vector(g) {
            Ok(s) => {
                codes.push(encode_graph6(g));
                stats.push(s);
            }
            Err(e) => {
                eprintln!("line {}: {e}", i + 1);
                rejected.push(json!({"line": i + 1, "code": e.code(), "message": e.to_string()}));
            }
        }
    }
    write_rows(fs::File::create(out)?, codes.iter().map(String::as_str).zip(&stats))?;
    Ok(Report::new(
        json!({"rows": stats.len(), "rejected": rejected, "out": out}),
        format!("wrote {} rows to {} ({} rejected)", stats.len(), out.display(), rejected.len()),
    ))
}

fn find_command(dir: &Path, q: &FilterQuery, out: Option<&Path>) -> Result<Report> {
    q.validate()?;
    let atlas = load_atlas(dir, q.n)?;
    let matches = query(&atlas, q)?;
    let (result, assigned) = assign_slots(&matches, q, atlas.apl_ref)?;
    if let Some(out) = out {
        fs::create_dir_all(out)?;
        let mut files: Vec<Vec<&AtlasRow>> = vec![Vec::new(); result.slots.len()];
        for (row, slot) in matches.iter().zip(&assigned) {
            if let Some(i) = slot {
                files[*i].push(row);
            }
        }
        for (i, rows) in files.iter().enumerate().filter(|(_, r)| !r.is_empty()) {
            let mut body = String::new();
            for r in rows {
                body.push_str(&r.graph6);
                body.push('\n');
            }
            fs::write(out.join(format!("slot{i:02}.g6")), body)?;
        }
    }
    let mut text = format!(
        "{} matches, {} occupied slots (vary {}, rt {})\n",
        result.total_matches,
        result.occupied_count(),
        result.vary,
        result.rt_mode
    );
    for s in &result.slots {
        text.push_str(&format!(
            "{:<14} {:>7}  {}\n",
            s.label,
            s.count,
            s.exemplar.as_deref().unwrap_or("-")
        ));
    }
    let mut json = serde_json::to_value(&result)?;
    json["n"] = json!(q.n);
    json["occupied"] = json!(result.occupied_count());
    json["constraints"] = serde_json::to_value(&q.constraints)?;
    Ok(Report::new(json, text.trim_end().to_string()))
}

fn render_matrix(m: &CorrelationMatrix) -> String {
    let mut text = format!("{:>6}", "");
    for name in &m.stat_names {
        text.push_str(&format!("{name:>7}"));
    }
    for (name, row) in m.stat_names.iter().zip(&m.values) {
        text.push_str(&format!("\n{name:>6}"));
        for v in row {
            match v {
                Some(x) => text.push_str(&format!("{x:>7.3}")),
                None => text.push_str(&format!("{:>7}", "n/a")),
            }
        }
    }
    text
}

fn render_coverage(r: &CoverageReport) -> String {
    let mut text = format!(
        "volume ratio {:.6} over {} dims, {} runs\n",
        r.volume_ratio, r.dims_used, r.runs
    );
    for d in &r.dims {
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        text.push_str(&format!(
            "{:<6} truth [{:.4}, {:.4}]  sample [{}, {}]\n",
            d.stat.name(),
            d.truth_min,
            d.truth_max,
            fmt(d.sample_min),
            fmt(d.sample_max)
        ));
    }
    text.trim_end().to_string()
}
