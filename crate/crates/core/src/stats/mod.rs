//! Summary statistics of a single graph.
//!
//! Conventions for degenerate inputs: local and square clustering are 0 at
//! vertices of degree below 2, path statistics range over finite pairs only
//! (0 when there are none), the girth of a forest is 0 and assortativity is
//! `None` when the degree marginals have zero variance.

mod connectivity;
mod normalize;
mod statistic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{mask_vertices, pair_count, Graph};

pub use connectivity::{edge_connectivity, node_connectivity};
pub use normalize::{max_apl, normalize, NormalizedStatVector};
pub use statistic::Statistic;

/// Raw statistics of one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatVector {
    pub n: usize,
    pub m: usize,
    pub triangles: usize,
    pub girth: usize,
    pub acc: f64,
    pub gcc: f64,
    pub scc: f64,
    pub apl: f64,
    /// Degree assortativity; `None` when undefined.
    pub r: Option<f64>,
    pub diam: usize,
    pub den: f64,
    /// Triangles over `n(n-1)/2`.
    pub rt: f64,
    pub cv: usize,
    pub ce: usize,
}

impl StatVector {
    /// Value of `stat`, or `None` for an undefined assortativity.
    pub fn get(&self, stat: Statistic) -> Option<f64> {
        Some(match stat {
            Statistic::N => self.n as f64,
            Statistic::M => self.m as f64,
            Statistic::Triangles => self.triangles as f64,
            Statistic::Girth => self.girth as f64,
            Statistic::Acc => self.acc,
            Statistic::Gcc => self.gcc,
            Statistic::Scc => self.scc,
            Statistic::Apl => self.apl,
            Statistic::R => return self.r,
            Statistic::Diam => self.diam as f64,
            Statistic::Den => self.den,
            Statistic::Rt => self.rt,
            Statistic::Cv => self.cv as f64,
            Statistic::Ce => self.ce as f64,
        })
    }

    /// Triangles over `C(n,3)`, which stays within `[0,1]`.
    pub fn triangle_fraction(&self) -> f64 {
        let triples = self.n * self.n.saturating_sub(1) * self.n.saturating_sub(2) / 6;
        if triples == 0 {
            0.0
        } else {
            self.triangles as f64 / triples as f64
        }
    }
}

pub fn count_triangles(g: &Graph) -> usize {
    let rows = g.rows();
    let mut t = 0;
    for (u, &ru) in rows.iter().enumerate() {
        let higher = !((2u16 << u) - 1);
        for v in mask_vertices(ru & higher) {
            let above_v = !((2u16 << v) - 1);
            t += (ru & rows[v] & above_v).count_ones() as usize;
        }
    }
    t
}

/// Length of a shortest cycle, 0 for forests.
pub fn girth(g: &Graph) -> usize {
    let n = g.order();
    let rows = g.rows();
    let mut best = usize::MAX;
    let mut dist = [usize::MAX; crate::MAX_ORDER];
    let mut parent = [usize::MAX; crate::MAX_ORDER];
    let mut queue = [0usize; crate::MAX_ORDER];
    for root in 0..n {
        dist[..n].fill(usize::MAX);
        parent[..n].fill(usize::MAX);
        dist[root] = 0;
        queue[0] = root;
        let (mut head, mut tail) = (0, 1);
        while head < tail {
            let u = queue[head];
            head += 1;
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for w in mask_vertices(rows[u]) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue[tail] = w;
                    tail += 1;
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

pub fn local_clustering(g: &Graph, v: usize) -> Result<f64> {
    let k = g.degree(v)?;
    Ok(local_clustering_unchecked(g, v, k))
}

fn local_clustering_unchecked(g: &Graph, v: usize, k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let nv = g.neighbor_mask(v);
    let links: u32 = mask_vertices(nv)
        .map(|u| (g.neighbor_mask(u) & nv).count_ones())
        .sum();
    (links as f64 / 2.0) / (k * (k - 1) / 2) as f64
}

/// Mean of per-vertex values, summed in sorted order so the result does not
/// depend on the labeling.
fn labeling_free_mean(mut values: Vec<f64>) -> f64 {
    let n = values.len() as f64;
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / n
}

/// Mean local clustering coefficient.
pub fn acc(g: &Graph) -> f64 {
    labeling_free_mean(
        (0..g.order())
            .map(|v| local_clustering_unchecked(g, v, g.neighbor_mask(v).count_ones() as usize))
            .collect(),
    )
}

/// Transitivity: three times the triangles over connected triples.
pub fn gcc(g: &Graph) -> f64 {
    let triples: usize = g.degrees().iter().map(|&k| k * k.saturating_sub(1) / 2).sum();
    if triples == 0 {
        0.0
    } else {
        3.0 * count_triangles(g) as f64 / triples as f64
    }
}

/// Square clustering of `v`: for each pair of neighbors `u, w`, `q` counts
/// their common neighbors other than `v` and
/// `a = (k_u - (1 + q + [u~w])) (k_w - (1 + q + [u~w]))`; the value is
/// `sum q / sum (a + q)`, or 0 when that denominator vanishes.
pub fn square_clustering(g: &Graph, v: usize) -> Result<f64> {
    g.degree(v)?;
    Ok(square_clustering_unchecked(g, v))
}

fn square_clustering_unchecked(g: &Graph, v: usize) -> f64 {
    let nv = g.neighbor_mask(v);
    let mut num = 0u64;
    let mut den = 0u64;
    for u in mask_vertices(nv) {
        let ru = g.neighbor_mask(u);
        let ku = ru.count_ones() as u64;
        for w in mask_vertices(nv & !((2u16 << u) - 1)) {
            let rw = g.neighbor_mask(w);
            let kw = rw.count_ones() as u64;
            let q = (ru & rw & !(1 << v)).count_ones() as u64;
            let eta = 1 + q + u64::from(ru & (1 << w) != 0);
            num += q;
            den += (ku - eta) * (kw - eta) + q;
        }
    }
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Mean square clustering coefficient.
pub fn scc(g: &Graph) -> f64 {
    labeling_free_mean((0..g.order()).map(|v| square_clustering_unchecked(g, v)).collect())
}

/// Sum and count of finite distances over unordered pairs, plus the largest.
struct PathSummary {
    total: usize,
    pairs: usize,
    longest: usize,
}

fn path_summary(g: &Graph) -> PathSummary {
    let rows = g.rows();
    let mut s = PathSummary {
        total: 0,
        pairs: 0,
        longest: 0,
    };
    for src in 0..rows.len() {
        let mut seen = 1u16 << src;
        let mut frontier = seen;
        let mut d = 0;
        loop {
            let mut next = 0u16;
            for v in mask_vertices(frontier) {
                next |= rows[v];
            }
            next &= !seen;
            if next == 0 {
                break;
            }
            d += 1;
            let c = next.count_ones() as usize;
            s.total += c * d;
            s.pairs += c;
            s.longest = s.longest.max(d);
            seen |= next;
            frontier = next;
        }
    }
    s.total /= 2;
    s.pairs /= 2;
    s
}

/// Mean shortest-path length over pairs joined by a path; 0 if none are.
pub fn apl(g: &Graph) -> f64 {
    let s = path_summary(g);
    if s.pairs == 0 {
        0.0
    } else {
        s.total as f64 / s.pairs as f64
    }
}

/// Largest finite shortest-path distance.
pub fn diameter(g: &Graph) -> usize {
    path_summary(g).longest
}

pub fn density(g: &Graph) -> Result<f64> {
    let n = g.order();
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    Ok(g.size() as f64 / pair_count(n) as f64)
}

/// Degree assortativity: Pearson correlation of the degrees at either end
/// of each edge, counting both orientations. `Ok(None)` when every edge
/// end sees the same degree.
pub fn assortativity(g: &Graph) -> Result<Option<f64>> {
    if g.size() == 0 {
        return Err(Error::NoEdges);
    }
    let deg = g.degrees();
    // Integer moments over both orientations of every edge.
    let (mut sx, mut sxx, mut sxy) = (0i64, 0i64, 0i64);
    for (u, v) in g.edges() {
        let (a, b) = (deg[u] as i64, deg[v] as i64);
        sx += a + b;
        sxx += a * a + b * b;
        sxy += 2 * a * b;
    }
    let count = 2 * g.size() as i64;
    let var = count * sxx - sx * sx;
    if var == 0 {
        return Ok(None);
    }
    let cov = count * sxy - sx * sx;
    Ok(Some((cov as f64 / var as f64).clamp(-1.0, 1.0)))
}

/// Every statistic of `g`; requires `n >= 2`.
pub fn stat_vector(g: &Graph) -> Result<StatVector> {
    let n = g.order();
    let den = density(g)?;
    let triangles = count_triangles(g);
    let paths = path_summary(g);
    let apl = if paths.pairs == 0 {
        0.0
    } else {
        paths.total as f64 / paths.pairs as f64
    };
    Ok(StatVector {
        n,
        m: g.size(),
        triangles,
        girth: girth(g),
        acc: acc(g),
        gcc: gcc(g),
        scc: scc(g),
        apl,
        r: assortativity(g).ok().flatten(),
        diam: paths.longest,
        den,
        rt: triangles as f64 / pair_count(n) as f64,
        cv: node_connectivity(g),
        ce: edge_connectivity(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edge_list(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }
    fn path(n: usize) -> Graph {
        Graph::from_edge_list(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }
    fn star(n: usize) -> Graph {
        Graph::from_edge_list(n, (1..n).map(|i| (0, i))).unwrap()
    }
    fn complete(n: usize) -> Graph {
        Graph::complete(n).unwrap()
    }

    #[test]
    fn triangles() {
        assert_eq!(count_triangles(&complete(4)), 4);
        assert_eq!(count_triangles(&cycle(5)), 0);
        assert_eq!(count_triangles(&complete(9)), 84);
    }

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&complete(3)), 3);
        assert_eq!(girth(&cycle(5)), 5);
        assert_eq!(girth(&path(6)), 0);
        assert_eq!(girth(&star(7)), 0);
        // C4 with a pendant path
        let g = Graph::from_edge_list(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]).unwrap();
        assert_eq!(girth(&g), 4);
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(local_clustering(&complete(3), 1).unwrap(), 1.0);
        assert_eq!(local_clustering(&star(5), 0).unwrap(), 0.0);
        assert_eq!(local_clustering(&star(5), 3).unwrap(), 0.0);
        assert!(local_clustering(&star(5), 5).is_err());
        assert_eq!(acc(&complete(4)), 1.0);
        assert_eq!(acc(&path(3)), 0.0);
        assert_eq!(acc(&cycle(5)), 0.0);
        assert_eq!(gcc(&path(3)), 0.0);
        assert_eq!(gcc(&complete(4)), 1.0);
        assert_eq!(gcc(&Graph::empty(3).unwrap()), 0.0);
    }

    #[test]
    fn square_clustering_examples() {
        assert_eq!(scc(&cycle(4)), 1.0);
        assert_eq!(scc(&complete(3)), 0.0);
        assert_eq!(scc(&complete(2)), 0.0);
        assert!(square_clustering(&cycle(4), 4).is_err());
    }

    #[test]
    fn path_length_examples() {
        for n in 2..=9 {
            assert_eq!(apl(&complete(n)), 1.0);
        }
        assert!((apl(&path(3)) - 4.0 / 3.0).abs() < 1e-15);
        let k2k1 = Graph::from_edge_list(3, [(0, 1)]).unwrap();
        assert_eq!(apl(&k2k1), 1.0);
        assert_eq!(apl(&Graph::empty(4).unwrap()), 0.0);
        assert_eq!(diameter(&path(5)), 4);
        assert_eq!(diameter(&complete(9)), 1);
        let two_k2 = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(diameter(&two_k2), 1);
        assert_eq!(diameter(&Graph::empty(4).unwrap()), 0);
    }

    #[test]
    fn assortativity_examples() {
        for n in 3..=9 {
            let r = assortativity(&star(n)).unwrap().unwrap();
            assert!((r + 1.0).abs() < 1e-12, "star {n}: {r}");
        }
        assert_eq!(assortativity(&cycle(5)).unwrap(), None);
        assert_eq!(assortativity(&complete(5)).unwrap(), None);
        let r = assortativity(&path(4)).unwrap().unwrap();
        assert!((r + 0.5).abs() < 1e-12);
        assert!(matches!(
            assortativity(&Graph::empty(3).unwrap()),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&complete(9)).unwrap(), 1.0);
        assert_eq!(density(&Graph::empty(5).unwrap()).unwrap(), 0.0);
        assert!(matches!(
            density(&Graph::empty(1).unwrap()),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn stat_vector_examples() {
        let sv = stat_vector(&complete(9)).unwrap();
        assert!((sv.rt - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(sv.triangle_fraction(), 1.0);

        let sv = stat_vector(&path(3)).unwrap();
        assert_eq!((sv.m, sv.triangles, sv.diam, sv.cv, sv.ce), (2, 0, 2, 1, 1));
        assert_eq!(sv.gcc, 0.0);
        assert!((sv.apl - 4.0 / 3.0).abs() < 1e-15);
        assert!((sv.den - 2.0 / 3.0).abs() < 1e-15);
        assert!(stat_vector(&Graph::empty(1).unwrap()).is_err());
    }
}
