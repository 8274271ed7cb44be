//! Exhaustive generation of non-isomorphic graphs by vertex augmentation.
//!
//! Every graph on `k + 1` vertices arises from some graph on `k` vertices by
//! adding one vertex adjacent to a subset of the old ones. Starting from
//! the single vertex, each level attaches a new vertex to every neighbor
//! subset of every representative of the previous level and keeps one
//! certificate per isomorphism class.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{certificate, Certificate};
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph};

/// Largest order that can be enumerated.
pub const MAX_ENUMERATION_ORDER: usize = 10;

/// Number of unlabeled simple graphs on `n` vertices, `n = 0..=10`.
pub const KNOWN_COUNTS: [usize; MAX_ENUMERATION_ORDER + 1] =
    [1, 1, 2, 4, 11, 34, 156, 1044, 12346, 274668, 12005168];

/// Parents handed to the worker pool per batch; bounds the candidate
/// buffer at the largest orders.
const PARENT_BATCH: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationRun {
    pub n: usize,
    pub produced: usize,
    pub candidates_examined: u64,
    #[serde(serialize_with = "as_secs")]
    pub wall_time: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn check_order(n: usize) -> Result<()> {
    if (1..=MAX_ENUMERATION_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange {
            n,
            min: 1,
            max: MAX_ENUMERATION_ORDER,
        })
    }
}

/// One representative per isomorphism class on `n` vertices, canonically
/// labeled, ordered by edge count and then by certificate.
pub fn enumerate_all(n: usize) -> Result<Vec<Graph>> {
    Ok(enumerate_with_run(n)?.0)
}

pub fn enumerate_with_run(n: usize) -> Result<(Vec<Graph>, EnumerationRun)> {
    check_order(n)?;
    let start = Instant::now();
    let mut level = vec![Graph::empty(1)?];
    let mut candidates = 1u64;
    for _ in 1..n {
        let (next, examined) = extend(&level);
        level = next;
        candidates += examined;
    }
    let run = EnumerationRun {
        n,
        produced: level.len(),
        candidates_examined: candidates,
        wall_time: start.elapsed(),
    };
    Ok((level, run))
}

/// Representatives on `k + 1` vertices from a complete, duplicate-free set
/// of representatives on `k` vertices. Returns the new level in emission
/// order and the number of candidates canonicalized.
pub fn extend(parents: &[Graph]) -> (Vec<Graph>, u64) {
    let Some(k) = parents.first().map(Graph::order) else {
        return (Vec::new(), 0);
    };
    assert!(
        parents.iter().all(|g| g.order() == k),
        "parents must share one order"
    );
    let n = k + 1;
    // Shard by edge count: a child's shard is parent size plus the new
    // vertex's degree, and shards never interact.
    let mut shards: Vec<HashSet<u128>> = vec![HashSet::new(); pair_count(n) + 1];
    let mut examined = 0u64;
    for batch in parents.chunks(PARENT_BATCH) {
        let certs: Vec<Vec<Certificate>> = batch
            .par_iter()
            .map(|parent| {
                let mut local: Vec<Certificate> = (0u16..1 << k)
                    .map(|mask| certificate(&parent.with_vertex(mask)))
                    .collect();
                local.sort_unstable();
                local.dedup();
                local
            })
            .collect();
        examined += (batch.len() as u64) << k;
        for cert in certs.into_iter().flatten() {
            let m = cert.packed_bits().count_ones() as usize;
            shards[m].insert(cert.packed_bits());
        }
    }
    let graphs = shards
        .into_par_iter()
        .flat_map_iter(|shard| {
            let mut bits: Vec<u128> = shard.into_iter().collect();
            bits.sort_unstable();
            bits.into_iter()
                .map(move |b| Graph::from_packed_bits(n, b).expect("certificate fits order"))
        })
        .collect();
    (graphs, examined)
}

/// `(n, count)` for `n = 1..=n_max`, counted by enumeration.
pub fn enumeration_counts(n_max: usize) -> Result<Vec<(usize, usize)>> {
    check_order(n_max)?;
    let mut out = vec![(1, 1)];
    let mut level = vec![Graph::empty(1)?];
    for n in 2..=n_max {
        level = extend(&level).0;
        out.push((n, level.len()));
    }
    Ok(out)
}

/// Validates an externally produced atlas: every graph must have order `n`,
/// no two may be isomorphic and together they must cover every class.
/// Returns the canonical representatives in emission order.
pub fn import_atlas(n: usize, graphs: &[Graph]) -> Result<Vec<Graph>> {
    check_order(n)?;
    if let Some(g) = graphs.iter().find(|g| g.order() != n) {
        return Err(Error::CorruptAtlas(format!(
            "graph of order {} in an order-{n} atlas",
            g.order()
        )));
    }
    let mut certs: Vec<Certificate> = graphs.par_iter().map(certificate).collect();
    certs.sort_unstable_by_key(|c| (c.packed_bits().count_ones(), c.packed_bits()));
    let before = certs.len();
    certs.dedup();
    if certs.len() != before {
        return Err(Error::CorruptAtlas(format!(
            "{} isomorphic duplicates",
            before - certs.len()
        )));
    }
    if certs.len() != KNOWN_COUNTS[n] {
        return Err(Error::CorruptAtlas(format!(
            "{} classes, expected {}",
            certs.len(),
            KNOWN_COUNTS[n]
        )));
    }
    Ok(certs.iter().map(Certificate::to_graph).collect())
}
