//! Dense graph on `[0, n)` that supports edge deletion while keeping every
//! pairwise co-degree and the global triangle count current.
//!
//! Adjacency is a flat array of 64-bit words, `words_per_row` words per
//! vertex. Co-degrees are kept for non-adjacent pairs too. They are stored
//! split across an `n × n` table of signed counters, `Y_uv = C[u][v] +
//! C[v][u]`: deleting `uv` lowers `Y_ux` for every `x ∈ N_v`, and the split
//! lets each of those decrements land in row `u`, so the hot loop walks one
//! row sequentially instead of striding down a column. [`Graph::pair_id`]
//! is the canonical dense index of an unordered pair, used by the sampler.

use crate::error::{Error, Result};

/// `C(n, 2)` as u64.
#[inline]
pub const fn choose2(n: u64) -> u64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// `C(n, 3)` as u64.
#[inline]
pub const fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Iterates the set bits of a word slice, yielding absolute bit positions.
#[inline]
pub(crate) fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (k, &w0) in words.iter().enumerate() {
        let mut w = w0;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            f(k * 64 + b);
            w &= w - 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    adj: Vec<u64>,
    row_start: Vec<usize>,
    // split co-degree counters, row-major n × n
    codeg: Vec<i32>,
    pairs: usize,
    edge_count: u64,
    triangles: u64,
    codeg_decrements: u64,
}

impl Graph {
    fn with_adjacency(n: usize, adj: Vec<u64>) -> Self {
        let words_per_row = n.div_ceil(64);
        let row_start = (0..n).map(|u| u * n - u * (u + 1) / 2).collect();
        let mut g = Graph {
            n,
            words_per_row,
            adj,
            row_start,
            codeg: vec![0; n * n],
            pairs: choose2(n as u64) as usize,
            edge_count: 0,
            triangles: 0,
            codeg_decrements: 0,
        };
        g.rebuild_counts();
        g
    }

    /// Complete graph `K_n`.
    pub fn new_complete(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        let mut adj = vec![0u64; n * words_per_row];
        for u in 0..n {
            let row = &mut adj[u * words_per_row..(u + 1) * words_per_row];
            for v in 0..n {
                if v != u {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
        }
        Self::with_adjacency(n, adj)
    }

    /// Edgeless graph on `n` vertices.
    pub fn new_empty(n: usize) -> Self {
        Self::with_adjacency(n, vec![0; n * n.div_ceil(64)])
    }

    /// Graph with the given edge list. Duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let words_per_row = n.div_ceil(64);
        let mut adj = vec![0u64; n * words_per_row];
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidPair(u, v, n));
            }
            adj[u * words_per_row + v / 64] |= 1 << (v % 64);
            adj[v * words_per_row + u / 64] |= 1 << (u % 64);
        }
        Ok(Self::with_adjacency(n, adj))
    }

    fn rebuild_counts(&mut self) {
        let n = self.n;
        let mut edges = 0u64;
        let mut sum_y_edges = 0u64;
        for u in 0..n {
            for v in (u + 1)..n {
                let y = popcount_and(self.row(u), self.row(v));
                self.codeg[u * n + v] = y as i32;
                self.codeg[v * n + u] = 0;
                if self.has_edge(u, v) {
                    edges += 1;
                    sum_y_edges += y as u64;
                }
            }
        }
        self.edge_count = edges;
        self.triangles = sum_y_edges / 3;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Maintained triangle count `Q`.
    #[inline]
    pub fn triangle_count(&self) -> u64 {
        self.triangles
    }

    /// Total unit decrements applied to the co-degree table since construction.
    pub fn codegree_decrements(&self) -> u64 {
        self.codeg_decrements
    }

    /// Number of co-degree slots, `C(n, 2)`.
    #[inline]
    pub fn pair_count(&self) -> usize {
        self.pairs
    }

    /// Canonical slot of the unordered pair `{u, v}`, `u != v`.
    #[inline]
    pub fn pair_id(&self, u: usize, v: usize) -> usize {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        debug_assert!(a != b && b < self.n);
        self.row_start[a] + b - a - 1
    }

    /// Inverse of [`Graph::pair_id`]; returns `(u, v)` with `u < v`.
    pub fn pair_from_id(&self, id: usize) -> (usize, usize) {
        debug_assert!(id < self.pairs);
        // last row whose start is <= id
        let u = self.row_start.partition_point(|&s| s <= id) - 1;
        (u, id - self.row_start[u] + u + 1)
    }

    #[inline]
    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words_per_row..(u + 1) * self.words_per_row]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && self.adj[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> Result<u32> {
        if u >= self.n {
            return Err(Error::InvalidPair(u, u, self.n));
        }
        Ok(self.row(u).iter().map(|w| w.count_ones()).sum())
    }

    /// Maintained co-degree `|N_u ∩ N_v|`.
    pub fn codegree(&self, u: usize, v: usize) -> Result<u32> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::InvalidPair(u, v, self.n));
        }
        Ok(self.codegree_pair(u, v))
    }

    /// Co-degree of a pair of distinct in-range vertices, unchecked.
    #[inline]
    pub(crate) fn codegree_pair(&self, u: usize, v: usize) -> u32 {
        (self.codeg[u * self.n + v] + self.codeg[v * self.n + u]) as u32
    }

    /// Co-degree recomputed from adjacency, ignoring the maintained table.
    pub fn recount_codegree(&self, u: usize, v: usize) -> u32 {
        popcount_and(self.row(u), self.row(v))
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for_each_bit(self.row(u), |x| out.push(x));
        out
    }

    /// `N_u ∩ N_v` in ascending order, appended to `out`.
    pub fn common_neighbors_into(&self, u: usize, v: usize, out: &mut Vec<usize>) {
        let (ru, rv) = (self.row(u), self.row(v));
        for k in 0..self.words_per_row {
            let mut w = ru[k] & rv[k];
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.common_neighbors_into(u, v, &mut out);
        out
    }

    /// The `k`-th (0-based) common neighbor of `u` and `v` in ascending order.
    pub fn kth_common_neighbor(&self, u: usize, v: usize, mut k: u32) -> Option<usize> {
        let (ru, rv) = (self.row(u), self.row(v));
        for j in 0..self.words_per_row {
            let mut w = ru[j] & rv[j];
            let c = w.count_ones();
            if k >= c {
                k -= c;
                continue;
            }
            for _ in 0..k {
                w &= w - 1;
            }
            return Some(j * 64 + w.trailing_zeros() as usize);
        }
        None
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        for u in 0..self.n {
            for_each_bit(self.row(u), |v| {
                if v > u {
                    out.push((u, v));
                }
            });
        }
        out
    }

    /// All triangles as ascending triples, in lexicographic order.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let mut out = Vec::with_capacity(self.triangles as usize);
        let mut common = Vec::new();
        for (u, v) in self.edges() {
            common.clear();
            self.common_neighbors_into(u, v, &mut common);
            for &w in common.iter().filter(|&&w| w > v) {
                out.push([u as u32, v as u32, w as u32]);
            }
        }
        out
    }

    /// Deletes edge `uv`, returning the former common neighborhood of `u`
    /// and `v` in ascending order.
    pub fn delete_edge(&mut self, u: usize, v: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        self.delete_edge_into(u, v, &mut out)?;
        Ok(out)
    }

    /// Like [`Graph::delete_edge`] but reuses `common` (cleared first).
    pub fn delete_edge_into(&mut self, u: usize, v: usize, common: &mut Vec<usize>) -> Result<()> {
        if !self.has_edge(u, v) {
            return Err(Error::MissingEdge(u, v));
        }
        common.clear();
        let wpr = self.words_per_row;
        self.adj[u * wpr + v / 64] &= !(1 << (v % 64));
        self.adj[v * wpr + u / 64] &= !(1 << (u % 64));
        self.common_neighbors_into(u, v, common);

        // Y[u][x] drops for every x adjacent to v, and symmetrically.
        let mut dec = 0u64;
        let n = self.n;
        for (a, b) in [(u, v), (v, u)] {
            let row = b * wpr;
            let counters = &mut self.codeg[a * n..(a + 1) * n];
            for k in 0..wpr {
                let mut w = self.adj[row + k];
                while w != 0 {
                    let x = k * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    counters[x] -= 1;
                    dec += 1;
                }
            }
        }
        self.codeg_decrements += dec;
        self.edge_count -= 1;
        self.triangles -= self.codegree_pair(u, v) as u64;
        Ok(())
    }

    /// Exact triangle count by bitset enumeration; independent of the
    /// maintained counters.
    pub fn recount_triangles(&self) -> u64 {
        let mut total = 0u64;
        for u in 0..self.n {
            let ru = self.row(u);
            for_each_bit(ru, |v| {
                if v > u {
                    // count w > v in N_u ∩ N_v
                    let rv = self.row(v);
                    let first = (v + 1) / 64;
                    for k in first..self.words_per_row {
                        let mut w = ru[k] & rv[k];
                        if k == first {
                            let shift = (v + 1) % 64;
                            w = if shift == 0 { w } else { w & (!0u64 << shift) };
                        }
                        total += w.count_ones() as u64;
                    }
                }
            });
        }
        total
    }

    /// Full consistency check against recomputation. Quadratic in `n`;
    /// intended for tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        let mut edges = 0u64;
        let mut sum_y = 0u64;
        for u in 0..n {
            if self.has_edge(u, u) || self.row(u)[u / 64] >> (u % 64) & 1 == 1 {
                return Err(format!("self-loop at {u}"));
            }
            for v in (u + 1)..n {
                if self.has_edge(u, v) != self.has_edge(v, u) {
                    return Err(format!("asymmetric adjacency at ({u}, {v})"));
                }
                let y = self.recount_codegree(u, v);
                let kept = self.codegree_pair(u, v);
                if y != kept {
                    return Err(format!("codegree({u}, {v}) = {kept}, recount {y}"));
                }
                if self.has_edge(u, v) {
                    edges += 1;
                    sum_y += y as u64;
                }
            }
        }
        if edges != self.edge_count {
            return Err(format!("edge_count {} vs {edges}", self.edge_count));
        }
        if sum_y != 3 * self.triangles {
            return Err(format!("Q = {} but sum of edge co-degrees = {sum_y}", self.triangles));
        }
        let q = self.recount_triangles();
        if q != self.triangles {
            return Err(format!("Q = {} but recount = {q}", self.triangles));
        }
        Ok(())
    }
}

#[inline]
fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}
