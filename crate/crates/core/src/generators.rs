//! Random graph models and batch sampling.
//!
//! Every draw of a batch gets its own ChaCha8 stream: the key comes from
//! the batch seed and the stream number is the draw index. Draws are
//! therefore independent of how the batch is split across threads.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::EdgeHistogram;
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, MAX_ORDER};
use crate::stats::{stat_vector, StatVector};

/// Largest batch a single request may ask for through the service.
pub const MAX_REQUEST_COUNT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// G(n, p) with p = 0.5.
    ErHalf,
    /// G(n, p) with p drawn uniformly from [0, 1] per graph.
    ErUniform,
    /// Edge count drawn from the ground-truth edge-count histogram.
    ErPopulation,
    Ws,
    Ba,
    Geometric,
    /// G(n, M) with M uniform over 0..=n(n-1)/2.
    GnmUniform,
    /// G(n, M) with M drawn from the ground-truth edge-count histogram.
    GnmPopulation,
}

impl Model {
    pub const ALL: [Model; 8] = [
        Model::ErHalf,
        Model::ErUniform,
        Model::ErPopulation,
        Model::Ws,
        Model::Ba,
        Model::Geometric,
        Model::GnmUniform,
        Model::GnmPopulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::ErHalf => "er-half",
            Model::ErUniform => "er-uniform",
            Model::ErPopulation => "er-population",
            Model::Ws => "ws",
            Model::Ba => "ba",
            Model::Geometric => "geometric",
            Model::GnmUniform => "gnm-uniform",
            Model::GnmPopulation => "gnm-population",
        }
    }

    pub fn needs_histogram(self) -> bool {
        matches!(self, Model::ErPopulation | Model::GnmPopulation)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "er-half" | "er-p-half" => Model::ErHalf,
            "er" | "er-uniform" | "er-uniform-p" => Model::ErUniform,
            "er-population" => Model::ErPopulation,
            "ws" | "watts-strogatz" => Model::Ws,
            "ba" | "barabasi-albert" => Model::Ba,
            "geometric" | "geo" => Model::Geometric,
            "gnm-uniform" | "gnm-uniform-e" => Model::GnmUniform,
            "gnm-population" | "gnm-population-e" => Model::GnmPopulation,
            _ => return Err(Error::BadParam(format!("unknown model {s:?}"))),
        })
    }
}

/// Parameters that override a model's sampling policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    /// Edge probability (ER) or rewiring probability (WS).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Ring neighbors (WS).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Attachment count (BA) or edge count (G(n, M) models).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Distance threshold (geometric).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub model: Model,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: FixedParams,
}

impl GeneratorConfig {
    pub fn new(model: Model, n: usize, count: usize, seed: u64) -> Self {
        GeneratorConfig {
            model,
            n,
            count,
            seed,
            params: FixedParams::default(),
        }
    }

    pub fn with_params(mut self, params: FixedParams) -> Self {
        self.params = params;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::BadParam("count must be at least 1".into()));
        }
        if !(2..=MAX_ORDER).contains(&self.n) {
            return Err(Error::BadParam(format!(
                "order must be in 2..={MAX_ORDER}, got {}",
                self.n
            )));
        }
        if self.model == Model::Ws && self.n < 3 && self.params.k.is_none() {
            return Err(Error::BadParam("ws needs n >= 3".into()));
        }
        Ok(())
    }
}

/// Sample size for a fraction of a ground-truth set, at least one graph.
pub fn count_for_rate(rate: f64, truth_size: usize) -> Result<usize> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::BadParam(format!("rate must be in (0, 1], got {rate}")));
    }
    Ok(((rate * truth_size as f64).floor() as usize).max(1))
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub config: GeneratorConfig,
    pub graphs: Vec<Graph>,
    pub stats: Vec<StatVector>,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::BadParam(format!("probability {p} outside [0, 1]")))
    }
}

/// Erdős–Rényi G(n, p).
pub fn gen_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_probability(p)?;
    let mut rows = [0u16; MAX_ORDER];
    check_order(n)?;
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                rows[u] |= 1 << v;
                rows[v] |= 1 << u;
            }
        }
    }
    Ok(Graph::from_rows(n, rows))
}

/// Uniformly random graph with exactly `edges` edges.
pub fn gen_gnm<R: Rng + ?Sized>(n: usize, edges: usize, rng: &mut R) -> Result<Graph> {
    check_order(n)?;
    let total = pair_count(n);
    if edges > total {
        return Err(Error::BadParam(format!(
            "{edges} edges exceed the {total} pairs of order {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let chosen = index::sample(rng, total, edges);
    Graph::from_edge_list(n, chosen.into_iter().map(|i| pairs[i]))
}

/// Watts–Strogatz: ring lattice with each vertex joined to its `k` nearest
/// neighbors (odd `k` rounded down), then every lattice edge `(u, u+j)` is
/// rewired to `(u, w)` with probability `p`, `w` uniform among vertices
/// that keep the graph simple.
pub fn gen_ws<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_order(n)?;
    check_probability(p)?;
    let k = k - k % 2;
    if k < 2 || k > n - 1 {
        return Err(Error::BadParam(format!(
            "ring degree must be in 2..={} after rounding to even, got {k}",
            n - 1
        )));
    }
    let mut rows = [0u16; MAX_ORDER];
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rows[u] & (1 << v) == 0 || rng.gen::<f64>() >= p {
                continue;
            }
            if rows[u].count_ones() as usize >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && rows[u] & (1 << w) == 0 {
                    break w;
                }
            };
            rows[u] &= !(1 << v);
            rows[v] &= !(1 << u);
            rows[u] |= 1 << w;
            rows[w] |= 1 << u;
        }
    }
    Ok(Graph::from_rows(n, rows))
}

/// Barabási–Albert: `m` isolated seed vertices; each later vertex attaches
/// to `m` distinct earlier vertices drawn with probability proportional to
/// degree (the first arrival attaches to all seeds).
pub fn gen_ba<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    check_order(n)?;
    if m < 1 || m >= n {
        return Err(Error::BadParam(format!(
            "attachment count must be in 1..={}, got {m}",
            n - 1
        )));
    }
    let mut rows = [0u16; MAX_ORDER];
    // Each vertex appears once per incident edge end.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * m * n);
    let mut targets: Vec<usize> = (0..m).collect();
    for source in m..n {
        for &t in &targets {
            rows[source] |= 1 << t;
            rows[t] |= 1 << source;
        }
        ends.extend_from_slice(&targets);
        ends.extend(std::iter::repeat_n(source, m));
        let mut picked = 0u16;
        targets.clear();
        while targets.len() < m {
            let t = ends[rng.gen_range(0..ends.len())];
            if picked & (1 << t) == 0 {
                picked |= 1 << t;
                targets.push(t);
            }
        }
    }
    Ok(Graph::from_rows(n, rows))
}

/// Random geometric graph on `n` uniform points of the unit square.
pub fn gen_geometric<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Result<Graph> {
    check_order(n)?;
    if radius.is_nan() || radius < 0.0 {
        return Err(Error::BadParam(format!("radius must be non-negative, got {radius}")));
    }
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let r2 = radius * radius;
    let mut rows = [0u16; MAX_ORDER];
    for u in 0..n {
        for v in u + 1..n {
            let (dx, dy) = (points[u].0 - points[v].0, points[u].1 - points[v].1);
            if dx * dx + dy * dy <= r2 {
                rows[u] |= 1 << v;
                rows[v] |= 1 << u;
            }
        }
    }
    Ok(Graph::from_rows(n, rows))
}

fn check_order(n: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadParam(format!("order must be in 1..={MAX_ORDER}, got {n}")))
    }
}

/// Random stream for draw `index` of a batch seeded with `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one graph of a batch under the model's parameter policy.
fn draw(config: &GeneratorConfig, edge_weights: Option<&WeightedIndex<u64>>, index: u64) -> Result<Graph> {
    let mut rng = draw_rng(config.seed, index);
    let rng = &mut rng;
    let n = config.n;
    let fixed = &config.params;
    match config.model {
        Model::ErHalf => gen_er(n, fixed.p.unwrap_or(0.5), rng),
        Model::ErUniform => {
            let p = match fixed.p {
                Some(p) => p,
                None => rng.gen(),
            };
            gen_er(n, p, rng)
        }
        Model::Ws => {
            let k = match fixed.k {
                Some(k) => k,
                None => 2 * rng.gen_range(1..=(n - 1) / 2),
            };
            let p = match fixed.p {
                Some(p) => p,
                None => rng.gen(),
            };
            gen_ws(n, k, p, rng)
        }
        Model::Ba => {
            let m = match fixed.m {
                Some(m) => m,
                None => rng.gen_range(1..n),
            };
            gen_ba(n, m, rng)
        }
        Model::Geometric => {
            let radius = match fixed.radius {
                Some(r) => r,
                None => rng.gen(),
            };
            gen_geometric(n, radius, rng)
        }
        Model::GnmUniform => {
            let edges = match fixed.m {
                Some(m) => m,
                None => rng.gen_range(0..=pair_count(n)),
            };
            gen_gnm(n, edges, rng)
        }
        Model::ErPopulation | Model::GnmPopulation => {
            let weights = edge_weights.ok_or(Error::MissingHistogram)?;
            let edges = weights.sample(rng);
            gen_gnm(n, edges, rng)
        }
    }
}

/// Draws `config.count` graphs and their statistics. Population models need
/// the ground-truth edge-count histogram for the same order.
pub fn sample_batch(config: &GeneratorConfig, histogram: Option<&EdgeHistogram>) -> Result<Sample> {
    config.validate()?;
    let weights = if config.model.needs_histogram() {
        let h = histogram.ok_or(Error::MissingHistogram)?;
        if h.n != config.n || h.counts.len() != pair_count(config.n) + 1 {
            return Err(Error::BadParam(format!(
                "histogram is for order {}, batch is order {}",
                h.n, config.n
            )));
        }
        Some(WeightedIndex::new(&h.counts).map_err(|e| Error::BadParam(e.to_string()))?)
    } else {
        None
    };
    let graphs: Vec<Graph> = (0..config.count as u64)
        .into_par_iter()
        .map(|i| draw(config, weights.as_ref(), i))
        .collect::<Result<_>>()?;
    let stats = graphs
        .par_iter()
        .map(stat_vector)
        .collect::<Result<Vec<_>>>()?;
    Ok(Sample {
        config: config.clone(),
        graphs,
        stats,
    })
}
