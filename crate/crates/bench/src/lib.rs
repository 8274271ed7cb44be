//! Criterion benchmarks for the core crate; see `benches/`.
//!
//! Run with `cargo bench -p gstats-bench`.

use gstats_core::Graph;

/// Deterministic graphs of order `n` spread over edge densities, used as
/// benchmark inputs.
pub fn fixture_graphs(n: usize, count: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    // a small LCG keeps the inputs stable without pulling in an RNG crate
    let mut state = 0x2545_f491_4f6c_dd1du64;
    (0..count)
        .map(|i| {
            let threshold = (i as u64 + 1) * (u64::MAX / (count as u64 + 1));
            let edges = pairs.iter().copied().filter(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state < threshold
            });
            Graph::from_edge_list(n, edges).expect("pairs are in range")
        })
        .collect()
}
