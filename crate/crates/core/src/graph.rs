//! Immutable simple undirected graphs on at most [`MAX_ORDER`] vertices.
//!
//! Adjacency is held as a packed upper-triangle bit string in row-major
//! order: `(0,1), (0,2), .., (0,n-1), (1,2), .., (n-2,n-1)`. Bit `i` of that
//! string lives at bit `127 - i` of a `u128`, so comparing two packed values
//! of the same order numerically is the same as comparing the bit strings
//! lexicographically.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: usize = 12;

/// Number of vertex pairs `n(n-1)/2`.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
fn bit_at(i: usize) -> u128 {
    1u128 << (127 - i)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    m: u8,
    bits: u128,
    rows: [u16; MAX_ORDER],
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        check_order(n)?;
        Ok(Graph {
            n: n as u8,
            m: 0,
            bits: 0,
            rows: [0; MAX_ORDER],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        check_order(n)?;
        let full = (1u16 << n) - 1;
        let mut rows = [0u16; MAX_ORDER];
        for (v, row) in rows.iter_mut().enumerate().take(n) {
            *row = full & !(1 << v);
        }
        Ok(Graph::from_rows(n, rows))
    }

    /// Builds a graph from an undirected edge list. Repeated pairs, in
    /// either orientation, collapse to a single edge.
    pub fn from_edge_list<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_order(n)?;
        let mut rows = [0u16; MAX_ORDER];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        Ok(Graph::from_rows(n, rows))
    }

    /// Rebuilds a graph from its packed row-major bit string. Bits past the
    /// `n(n-1)/2` prefix must be clear.
    pub fn from_packed_bits(n: usize, bits: u128) -> Result<Self> {
        check_order(n)?;
        let len = pair_count(n);
        let tail = if len == 0 { u128::MAX } else { u128::MAX >> len };
        if bits & tail != 0 {
            return Err(Error::BadParam(format!(
                "packed adjacency has bits beyond the {len} pair positions"
            )));
        }
        let mut rows = [0u16; MAX_ORDER];
        let mut i = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits & bit_at(i) != 0 {
                    rows[u] |= 1 << v;
                    rows[v] |= 1 << u;
                }
                i += 1;
            }
        }
        Ok(Graph {
            n: n as u8,
            m: bits.count_ones() as u8,
            bits,
            rows,
        })
    }

    /// Internal constructor from symmetric, loop-free neighbor masks.
    pub(crate) fn from_rows(n: usize, rows: [u16; MAX_ORDER]) -> Self {
        let mut bits = 0u128;
        let mut i = 0;
        for (u, row) in rows.iter().enumerate().take(n) {
            for v in u + 1..n {
                if row & (1 << v) != 0 {
                    bits |= bit_at(i);
                }
                i += 1;
            }
        }
        Graph {
            n: n as u8,
            m: bits.count_ones() as u8,
            bits,
            rows,
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m as usize
    }

    /// Packed row-major upper-triangle adjacency.
    #[inline]
    pub fn packed_bits(&self) -> u128 {
        self.bits
    }

    /// Packed adjacency as big-endian bytes, `ceil(n(n-1)/2 / 8)` long,
    /// zero padded at the end.
    pub fn packed_bytes(&self) -> Vec<u8> {
        let len = pair_count(self.order()).div_ceil(8);
        self.bits.to_be_bytes()[..len].to_vec()
    }

    /// Neighbor bitmask of `v`: bit `u` is set iff `u ~ v`.
    ///
    /// Panics if `v >= MAX_ORDER`; bits above the order are always clear.
    #[inline]
    pub fn neighbor_mask(&self, v: usize) -> u16 {
        self.rows[v]
    }

    #[inline]
    pub(crate) fn rows(&self) -> &[u16] {
        &self.rows[..self.order()]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.order() && v < self.order() && self.rows[u] & (1 << v) != 0
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.order() {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                n: self.order(),
            })
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.rows[v].count_ones() as usize)
    }

    /// Adjacent vertices of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        Ok(mask_vertices(self.rows[v]).collect())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.rows().iter().map(|r| r.count_ones() as usize).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.rows()
            .iter()
            .map(|r| r.count_ones() as usize)
            .min()
            .unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| {
            mask_vertices(self.rows[u] & !((2u16 << u) - 1)).map(move |v| (u, v))
        })
    }

    /// Vertex sets of the connected components, each ascending, ordered by
    /// smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = 0u16;
        let mut out = Vec::new();
        for start in 0..n {
            if seen & (1 << start) != 0 {
                continue;
            }
            let comp = self.reach_mask(start);
            seen |= comp;
            out.push(mask_vertices(comp).collect());
        }
        out
    }

    /// Bitmask of the vertices reachable from `start`.
    pub(crate) fn reach_mask(&self, start: usize) -> u16 {
        let mut comp = 1u16 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u16;
            for v in mask_vertices(frontier) {
                next |= self.rows[v];
            }
            frontier = next & !comp;
            comp |= next;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        n <= 1 || self.reach_mask(0).count_ones() as usize == n
    }

    pub fn complement(&self) -> Graph {
        let n = self.order();
        let full = if n == 0 { 0 } else { (1u16 << n) - 1 };
        let mut rows = [0u16; MAX_ORDER];
        for v in 0..n {
            rows[v] = !self.rows[v] & full & !(1 << v);
        }
        Graph::from_rows(n, rows)
    }

    /// Relabels vertex `v` as `perm[v]`. `perm` must be a permutation of
    /// `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.order();
        if perm.len() != n {
            return Err(Error::ShapeError {
                left: perm.len(),
                right: n,
            });
        }
        let mut seen = 0u16;
        for &p in perm {
            if p >= n || seen & (1 << p) != 0 {
                return Err(Error::BadParam(format!("{perm:?} is not a permutation")));
            }
            seen |= 1 << p;
        }
        let mut rows = [0u16; MAX_ORDER];
        for u in 0..n {
            for v in mask_vertices(self.rows[u]) {
                rows[perm[u]] |= 1 << perm[v];
            }
        }
        Ok(Graph::from_rows(n, rows))
    }

    /// Adds a new vertex `n` adjacent to every vertex in `mask`.
    pub(crate) fn with_vertex(&self, mask: u16) -> Graph {
        let n = self.order();
        debug_assert!(n < MAX_ORDER && mask >> n == 0);
        let mut rows = self.rows;
        rows[n] = mask;
        for v in mask_vertices(mask) {
            rows[v] |= 1 << n;
        }
        Graph::from_rows(n + 1, rows)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::OrderTooSmall { n, min: 1 })
    } else if n > MAX_ORDER {
        Err(Error::OrderTooLarge { n, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

/// Iterates the set bits of a vertex mask in ascending order.
#[inline]
pub(crate) fn mask_vertices(mut mask: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn builds_path() {
        let g = p3();
        assert_eq!(g.order(), 3);
        assert_eq!(g.size(), 2);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::from_edge_list(4, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.size(), 1);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Graph::from_edge_list(3, [(0, 3)]),
            Err(Error::InvalidVertex { vertex: 3, n: 3 })
        ));
        assert!(matches!(
            Graph::from_edge_list(3, [(2, 2)]),
            Err(Error::SelfLoop(2))
        ));
        assert!(matches!(
            Graph::empty(13),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(matches!(Graph::empty(0), Err(Error::OrderTooSmall { .. })));
    }

    #[test]
    fn degree_queries() {
        let k4 = Graph::complete(4).unwrap();
        for v in 0..4 {
            assert_eq!(k4.degree(v).unwrap(), 3);
        }
        let star = Graph::from_edge_list(5, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(star.degree(0).unwrap(), 4);
        let empty = Graph::empty(4).unwrap();
        assert_eq!(empty.degree(2).unwrap(), 0);
        assert!(matches!(
            empty.degree(4),
            Err(Error::InvalidVertex { .. })
        ));
    }

    #[test]
    fn neighbor_lists() {
        let g = p3();
        assert_eq!(g.neighbors(1).unwrap(), vec![0, 2]);
        assert_eq!(g.neighbors(0).unwrap(), vec![1]);
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(k3.neighbors(2).unwrap(), vec![0, 1]);
        assert!(g.neighbors(3).is_err());
    }

    #[test]
    fn components() {
        assert_eq!(
            Graph::complete(3).unwrap().connected_components(),
            vec![vec![0, 1, 2]]
        );
        let k2k1 = Graph::from_edge_list(3, [(0, 1)]).unwrap();
        assert_eq!(k2k1.connected_components(), vec![vec![0, 1], vec![2]]);
        assert_eq!(
            Graph::empty(4).unwrap().connected_components(),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
    }

    #[test]
    fn packed_bits_follow_row_major_order() {
        // (0,1) (0,2) (1,2): P3 as 0-1-2 sets bits 0 and 2.
        let g = p3();
        assert_eq!(g.packed_bits(), bit_at(0) | bit_at(2));
        let back = Graph::from_packed_bits(3, g.packed_bits()).unwrap();
        assert_eq!(back, g);
        assert_eq!(g.packed_bytes(), vec![0b1010_0000]);
        assert!(Graph::from_packed_bits(3, bit_at(3)).is_err());
    }

    #[test]
    fn complement_and_permutation() {
        let g = p3();
        let c = g.complement();
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(0, 2)]);
        let h = g.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert!(g.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn edge_count_is_half_degree_sum() {
        let g = Graph::from_edge_list(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (0, 5)]).unwrap();
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.size());
    }
}
