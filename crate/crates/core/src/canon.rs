//! Isomorphism certificates.
//!
//! The certificate of a graph is the smallest packed adjacency string among
//! the labelings reached by an individualization-refinement search: the
//! vertex set is refined to an equitable ordered partition, the first
//! smallest non-trivial cell is split by individualizing each of its
//! vertices in turn, and every discrete partition reached is read off as a
//! labeling. Refinement and cell choice depend only on graph structure, so
//! the set of candidate strings is relabeling invariant and the minimum is a
//! complete invariant. Subtrees that are images of already-searched ones
//! under a discovered automorphism are skipped.

use crate::graph::{mask_vertices, pair_count, Graph, MAX_ORDER};

/// Canonical packed adjacency string of a graph's isomorphism class.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Certificate {
    n: u8,
    bits: u128,
}

impl Certificate {
    pub fn order(&self) -> usize {
        self.n as usize
    }

    /// Packed row-major bit string, first pair at the most significant bit.
    pub fn packed_bits(&self) -> u128 {
        self.bits
    }

    /// Canonical adjacency as big-endian bytes.
    pub fn bytes(&self) -> Vec<u8> {
        let len = pair_count(self.order()).div_ceil(8);
        self.bits.to_be_bytes()[..len].to_vec()
    }

    /// The canonically labeled representative.
    pub fn to_graph(&self) -> Graph {
        Graph::from_packed_bits(self.order(), self.bits)
            .expect("certificate bits fit their order")
    }
}

/// Certificate of `g`. Orders are capped at [`MAX_ORDER`] when the graph is
/// constructed, so this cannot fail.
pub fn certificate(g: &Graph) -> Certificate {
    canonical_labeling(g).0
}

/// Canonically relabeled copy of `g`.
pub fn canonical_form(g: &Graph) -> Graph {
    certificate(g).to_graph()
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    g.order() == h.order()
        && g.size() == h.size()
        && g.degree_multiset() == h.degree_multiset()
        && certificate(g) == certificate(h)
}

/// Certificate plus the labeling that realizes it: `labeling[v]` is the
/// canonical position of vertex `v`.
pub fn canonical_labeling(g: &Graph) -> (Certificate, Vec<usize>) {
    let n = g.order();
    let mut search = Search {
        n,
        rows: g.rows(),
        first: None,
        best: None,
        generators: Vec::new(),
    };
    let mut cells: Vec<u16> = vec![if n == 0 { 0 } else { (1u16 << n) - 1 }];
    refine(search.rows, &mut cells);
    let mut path = Vec::with_capacity(n);
    search.visit(cells, &mut path);
    let best = search.best.expect("search reaches at least one leaf");
    let cert = Certificate {
        n: n as u8,
        bits: best.bits,
    };
    (cert, best.labeling[..n].iter().map(|&p| p as usize).collect())
}

trait DegreeMultiset {
    fn degree_multiset(&self) -> [u8; MAX_ORDER + 1];
}

impl DegreeMultiset for Graph {
    fn degree_multiset(&self) -> [u8; MAX_ORDER + 1] {
        let mut counts = [0u8; MAX_ORDER + 1];
        for v in 0..self.order() {
            counts[self.neighbor_mask(v).count_ones() as usize] += 1;
        }
        counts
    }
}

/// Splits cells of the ordered partition by neighbor counts into every cell
/// until the partition is equitable. Subcells replace their parent in
/// ascending count order.
pub(crate) fn refine(rows: &[u16], cells: &mut Vec<u16>) {
    let n = rows.len();
    if cells.len() == n {
        return;
    }
    loop {
        let mut changed = false;
        let mut s = 0;
        while s < cells.len() {
            let splitter = cells[s];
            let mut t = 0;
            while t < cells.len() {
                let cell = cells[t];
                if cell & (cell - 1) == 0 {
                    t += 1;
                    continue;
                }
                let mut groups = [0u16; MAX_ORDER + 1];
                let mut lo = usize::MAX;
                let mut hi = 0;
                for v in mask_vertices(cell) {
                    let c = (rows[v] & splitter).count_ones() as usize;
                    groups[c] |= 1 << v;
                    lo = lo.min(c);
                    hi = hi.max(c);
                }
                if lo == hi {
                    t += 1;
                    continue;
                }
                let parts: Vec<u16> = groups[lo..=hi].iter().copied().filter(|&g| g != 0).collect();
                let k = parts.len();
                cells.splice(t..=t, parts);
                changed = true;
                if cells.len() == n {
                    return;
                }
                t += k;
            }
            s += 1;
        }
        if !changed {
            return;
        }
    }
}

#[derive(Clone, Copy)]
struct Leaf {
    bits: u128,
    labeling: [u8; MAX_ORDER],
    path: [u8; MAX_ORDER],
    depth: usize,
}

struct Search<'a> {
    n: usize,
    rows: &'a [u16],
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Automorphisms found so far, as vertex maps.
    generators: Vec<[u8; MAX_ORDER]>,
}

impl Search<'_> {
    /// Depth-first search below an equitable partition. Returns
    /// `Some(d)` when the caller chain should unwind to depth `d`, because
    /// the subtree being searched at that depth is an automorphic image of
    /// one already searched.
    fn visit(&mut self, cells: Vec<u16>, path: &mut Vec<u8>) -> Option<usize> {
        if cells.len() == self.n {
            return self.leaf(&cells, path);
        }
        let depth = path.len();
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.count_ones() > 1)
            .min_by_key(|(i, c)| (c.count_ones(), *i))
            .map(|(i, _)| i)
            .expect("non-discrete partition has a non-trivial cell");
        let cell = cells[target];
        let mut tried = 0u16;
        for v in mask_vertices(cell) {
            if tried != 0 && self.orbit_of(v, path) & tried != 0 {
                continue;
            }
            tried |= 1 << v;
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..target]);
            child.push(1 << v);
            child.push(cell & !(1 << v));
            child.extend_from_slice(&cells[target + 1..]);
            refine(self.rows, &mut child);
            path.push(v as u8);
            let unwind = self.visit(child, path);
            path.pop();
            match unwind {
                Some(d) if d < depth => return Some(d),
                _ => {}
            }
        }
        None
    }

    fn leaf(&mut self, cells: &[u16], path: &[u8]) -> Option<usize> {
        let n = self.n;
        let mut order = [0u8; MAX_ORDER];
        let mut labeling = [0u8; MAX_ORDER];
        for (pos, c) in cells.iter().enumerate() {
            let v = c.trailing_zeros() as usize;
            order[pos] = v as u8;
            labeling[v] = pos as u8;
        }
        let mut bits = 0u128;
        let mut idx = 0;
        for i in 0..n {
            let row = self.rows[order[i] as usize];
            for &w in &order[i + 1..n] {
                if row & (1 << w) != 0 {
                    bits |= 1u128 << (127 - idx);
                }
                idx += 1;
            }
        }
        let mut leaf = Leaf {
            bits,
            labeling,
            path: [0; MAX_ORDER],
            depth: path.len(),
        };
        leaf.path[..path.len()].copy_from_slice(path);

        let Some(first) = self.first else {
            self.first = Some(leaf);
            self.best = Some(leaf);
            return None;
        };
        if bits == first.bits {
            self.record_automorphism(&first, &leaf);
            return Some(common_prefix(&first, &leaf));
        }
        let best = self.best.expect("best set with first");
        if bits == best.bits {
            self.record_automorphism(&best, &leaf);
            return Some(common_prefix(&best, &leaf));
        }
        if bits < best.bits {
            self.best = Some(leaf);
        }
        None
    }

    fn record_automorphism(&mut self, a: &Leaf, b: &Leaf) {
        // Both labelings give the same graph, so b followed by a^-1 is an
        // automorphism.
        let mut inverse_a = [0u8; MAX_ORDER];
        for v in 0..self.n {
            inverse_a[a.labeling[v] as usize] = v as u8;
        }
        let mut gamma = [0u8; MAX_ORDER];
        for v in 0..self.n {
            gamma[v] = inverse_a[b.labeling[v] as usize];
        }
        debug_assert!((0..self.n).all(|u| {
            mask_vertices(self.rows[u]).all(|w| {
                self.rows[gamma[u] as usize] & (1 << gamma[w]) != 0
            })
        }));
        self.generators.push(gamma);
    }

    /// Orbit of `v` under the generators that fix every vertex of `path`.
    fn orbit_of(&self, v: usize, path: &[u8]) -> u16 {
        let mut orbit = 1u16 << v;
        let gens: Vec<&[u8; MAX_ORDER]> = self
            .generators
            .iter()
            .filter(|g| path.iter().all(|&p| g[p as usize] == p))
            .collect();
        if gens.is_empty() {
            return orbit;
        }
        loop {
            let mut next = orbit;
            for u in mask_vertices(orbit) {
                for g in &gens {
                    next |= 1 << g[u];
                }
            }
            if next == orbit {
                return orbit;
            }
            orbit = next;
        }
    }
}

fn common_prefix(a: &Leaf, b: &Leaf) -> usize {
    let len = a.depth.min(b.depth);
    (0..len).take_while(|&i| a.path[i] == b.path[i]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edge_list(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn path_relabelings_agree() {
        let a = Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edge_list(3, [(0, 2), (2, 1)]).unwrap();
        assert_eq!(certificate(&a), certificate(&b));
    }

    #[test]
    fn triangle_round_trip() {
        let k3 = Graph::complete(3).unwrap();
        let back = certificate(&k3).to_graph();
        assert_eq!(back.size(), 3);
        assert!(are_isomorphic(&back, &k3));
    }

    #[test]
    fn four_vertex_classes() {
        let mut seen = std::collections::HashSet::new();
        for bits in 0u128..64 {
            let g = Graph::from_packed_bits(4, bits << 122).unwrap();
            seen.insert(certificate(&g));
        }
        assert_eq!(seen.len(), 11);
    }

    #[test]
    fn isomorphism_examples() {
        let c4 = cycle(4);
        let c4b = c4.permuted(&[2, 0, 3, 1]).unwrap();
        assert!(are_isomorphic(&c4, &c4b));
        let p4 = Graph::from_edge_list(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!are_isomorphic(&c4, &p4));
        let k3 = Graph::complete(3).unwrap();
        let k3k1 = Graph::from_edge_list(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!are_isomorphic(&k3, &k3k1));
    }

    #[test]
    fn labeling_realizes_certificate() {
        let g = Graph::from_edge_list(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]).unwrap();
        let (cert, lab) = canonical_labeling(&g);
        assert_eq!(g.permuted(&lab).unwrap().packed_bits(), cert.packed_bits());
    }

    #[test]
    fn symmetric_graphs_at_full_order() {
        // Highly symmetric inputs exercise the automorphism pruning.
        for g in [
            Graph::empty(12).unwrap(),
            Graph::complete(12).unwrap(),
            cycle(12),
        ] {
            let rev: Vec<usize> = (0..12).rev().collect();
            assert_eq!(certificate(&g), certificate(&g.permuted(&rev).unwrap()));
        }
        assert_eq!(certificate(&Graph::empty(12).unwrap()).packed_bits(), 0);
    }

    #[test]
    fn distinguishes_regular_graphs() {
        // C6 and two disjoint triangles are both 2-regular on six vertices.
        let two_triangles =
            Graph::from_edge_list(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!are_isomorphic(&cycle(6), &two_triangles));
        // Petersen graph vs. a relabeling.
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let petersen = Graph::from_edge_list(10, outer.chain(spokes).chain(inner)).unwrap();
        let perm = [3, 7, 1, 9, 0, 2, 8, 4, 6, 5];
        assert!(are_isomorphic(&petersen, &petersen.permuted(&perm).unwrap()));
    }
}
