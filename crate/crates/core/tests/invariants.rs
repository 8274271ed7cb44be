//! Properties checked exhaustively over small complete atlases.

use std::collections::HashSet;

use gstats_core::atlas::{decode_graph6, encode_graph6, EdgeHistogram};
use gstats_core::enumerate::{enumerate_all, enumeration_counts, KNOWN_COUNTS};
use gstats_core::{certificate, pair_count, stat_vector, Graph};

#[test]
fn counts_match_known_sequence() {
    let counts = enumeration_counts(8).unwrap();
    assert_eq!(counts.last(), Some(&(8, 12346)));
    let prefix: Vec<_> = enumeration_counts(7).unwrap();
    assert_eq!(prefix, vec![(1, 1), (2, 2), (3, 4), (4, 11), (5, 34), (6, 156), (7, 1044)]);
    assert_eq!(enumeration_counts(2).unwrap(), vec![(1, 1), (2, 2)]);
    assert_eq!(KNOWN_COUNTS[9], 274_668);
    assert!(enumerate_all(0).is_err());
    assert!(enumerate_all(11).is_err());
}

#[test]
fn no_duplicates_and_sorted_emission() {
    for n in 1..=8 {
        let graphs = enumerate_all(n).unwrap();
        let certs: HashSet<_> = graphs.iter().map(certificate).collect();
        assert_eq!(certs.len(), graphs.len(), "n={n}");
        for g in &graphs {
            assert_eq!(certificate(g).to_graph(), *g, "emitted in canonical labeling");
        }
        let keys: Vec<_> = graphs.iter().map(|g| (g.size(), certificate(g))).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "n={n} emission order");
    }
}

#[test]
fn every_labeled_graph_has_one_representative() {
    for n in 1..=5 {
        let reps: HashSet<_> = enumerate_all(n).unwrap().iter().map(certificate).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut hit = HashSet::new();
        for mask in 0u32..1 << pairs.len() {
            let g = Graph::from_edge_list(n, pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e)).unwrap();
            let c = certificate(&g);
            assert!(reps.contains(&c), "n={n} mask={mask}");
            hit.insert(c);
        }
        assert_eq!(hit.len(), reps.len());
    }
}

#[test]
fn enumeration_is_deterministic() {
    assert_eq!(enumerate_all(7).unwrap(), enumerate_all(7).unwrap());
}

#[test]
fn edge_histograms_are_complement_symmetric() {
    for n in 2..=8 {
        let stats: Vec<_> = enumerate_all(n).unwrap().iter().map(|g| stat_vector(g).unwrap()).collect();
        let h = EdgeHistogram::from_stats(n, &stats);
        assert_eq!(h.counts.len(), pair_count(n) + 1);
        assert!(h.is_complement_symmetric(), "n={n}");
        assert_eq!(h.total() as usize, stats.len());
    }
}

#[test]
fn whitney_and_path_bounds_on_order_seven() {
    for g in enumerate_all(7).unwrap() {
        let s = stat_vector(&g).unwrap();
        if g.is_connected() {
            assert!(s.cv <= s.ce && s.ce <= g.min_degree(), "{g:?}");
        }
        assert!(s.diam <= 6);
        if s.m >= 1 {
            assert!(s.apl <= s.diam as f64);
        }
    }
}

#[test]
fn clustering_agrees_on_extremes() {
    for n in 5..=8 {
        for g in enumerate_all(n).unwrap() {
            let s = stat_vector(&g).unwrap();
            if s.triangles == 0 {
                assert_eq!((s.acc, s.gcc), (0.0, 0.0));
            }
        }
        let k = stat_vector(&Graph::complete(n).unwrap()).unwrap();
        assert_eq!((k.acc, k.gcc), (1.0, 1.0));
    }
}

#[test]
fn graph6_round_trips_on_order_seven() {
    for g in enumerate_all(7).unwrap() {
        let code = encode_graph6(&g);
        assert_eq!(decode_graph6(&code).unwrap(), g);
        assert_eq!(encode_graph6(&decode_graph6(&code).unwrap()), code);
    }
}
