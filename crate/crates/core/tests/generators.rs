use gstats_core::analysis::bounding_box_ratio;
use gstats_core::atlas::{Atlas, EdgeHistogram};
use gstats_core::enumerate::enumerate_all;
use gstats_core::generators::{sample_batch, GeneratorConfig, Model};
use gstats_core::{pair_count, StatVector};

/// Pearson chi-square statistic of observed counts against expected counts.
fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}

fn edge_counts(stats: &[StatVector], n: usize) -> Vec<u64> {
    let mut h = vec![0u64; pair_count(n) + 1];
    for s in stats {
        h[s.m] += 1;
    }
    h
}

#[test]
fn uniform_edge_strategy_is_uniform() {
    let cfg = GeneratorConfig::new(Model::GnmUniform, 9, 100_000, 11);
    let s = sample_batch(&cfg, None).unwrap();
    let obs = edge_counts(&s.stats, 9);
    let expected = vec![100_000.0 / 37.0; 37];
    // chi-square critical value, 36 degrees of freedom, alpha = 0.001
    let x2 = chi_square(&obs, &expected);
    assert!(x2 < 67.985, "chi2 = {x2}");
}

#[test]
fn population_edge_strategy_follows_histogram() {
    let graphs = enumerate_all(7).unwrap();
    let atlas = Atlas::from_graphs(7, &graphs).unwrap();
    let hist: &EdgeHistogram = &atlas.histogram;
    let cfg = GeneratorConfig::new(Model::GnmPopulation, 7, 100_000, 5);
    let s = sample_batch(&cfg, Some(hist)).unwrap();
    let obs = edge_counts(&s.stats, 7);
    let total = hist.total() as f64;
    let expected: Vec<f64> = hist.counts.iter().map(|&c| 100_000.0 * c as f64 / total).collect();
    // 21 degrees of freedom, alpha = 0.001
    let x2 = chi_square(&obs, &expected);
    assert!(x2 < 46.797, "chi2 = {x2}");

    // both readings of population matching draw from the same histogram
    let er = sample_batch(&GeneratorConfig::new(Model::ErPopulation, 7, 1000, 5), Some(hist)).unwrap();
    assert!(er.stats.iter().all(|st| hist.counts[st.m] > 0));
}

#[test]
fn fuzz_every_model() {
    for model in Model::ALL {
        for n in [2, 5, 9, 12] {
            if model == Model::Ws && n < 3 {
                continue;
            }
            let hist = EdgeHistogram {
                n,
                counts: vec![1; pair_count(n) + 1],
            };
            let cfg = GeneratorConfig::new(model, n, 100_000 / 16, n as u64);
            let s = sample_batch(&cfg, Some(&hist)).unwrap();
            assert_eq!(s.graphs.len(), cfg.count);
            for (g, st) in s.graphs.iter().zip(&s.stats) {
                assert_eq!(g.order(), n);
                assert!(g.edges().all(|(u, v)| u < v && v < n));
                assert_eq!(g.edges().count(), g.size());
                assert_eq!(st.m, g.size());
            }
        }
    }
}

#[test]
fn model_edge_counts_at_order_nine() {
    let ba = sample_batch(&GeneratorConfig::new(Model::Ba, 9, 4000, 3), None).unwrap();
    assert!(ba.stats.iter().all(|s| [8, 14, 18, 20].contains(&s.m)));
    let ws = sample_batch(&GeneratorConfig::new(Model::Ws, 9, 4000, 3), None).unwrap();
    assert!(ws.stats.iter().all(|s| [9, 18, 27, 36].contains(&s.m)));
}

#[test]
fn samples_stay_inside_the_ground_truth() {
    let graphs = enumerate_all(7).unwrap();
    let atlas = Atlas::from_graphs(7, &graphs).unwrap();
    let truth: Vec<StatVector> = atlas.stats().cloned().collect();
    for model in Model::ALL {
        let s = sample_batch(&GeneratorConfig::new(model, 7, 2000, 1), Some(&atlas.histogram)).unwrap();
        let report = bounding_box_ratio(&s.stats, &truth).unwrap();
        assert!(report.sample_within_truth(), "{model}");
        assert!((0.0..=1.0).contains(&report.volume_ratio), "{model}");
    }
}
