//! Brute-force reference implementations. They deliberately share no code
//! with the library beyond the public types needed to feed them.

#![allow(dead_code, clippy::int_plus_one, clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashSet};

use num_rational::Ratio;
use trirem_core::{Graph, RunRng, Stream};

pub type Rational = Ratio<i128>;

/// Adjacency matrix of `g`, read through the public API.
pub fn matrix_of(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    (0..n).map(|u| (0..n).map(|v| g.has_edge(u, v)).collect()).collect()
}

pub fn matrix_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

pub fn edge_list(a: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = a.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if a[u][v] {
                out.push((u, v));
            }
        }
    }
    out
}

pub fn triangles(a: &[Vec<bool>]) -> Vec<[usize; 3]> {
    let n = a.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !a[u][v] {
                continue;
            }
            for w in v + 1..n {
                if a[u][w] && a[v][w] {
                    out.push([u, v, w]);
                }
            }
        }
    }
    out
}

pub fn codegree(a: &[Vec<bool>], u: usize, v: usize) -> u32 {
    (0..a.len()).filter(|&x| a[u][x] && a[v][x]).count() as u32
}

pub fn remove_triangle(a: &mut [Vec<bool>], t: [usize; 3]) {
    let [u, v, w] = t;
    for (x, y) in [(u, v), (u, w), (v, w)] {
        a[x][y] = false;
        a[y][x] = false;
    }
}

/// Average change of the triangle count over all equally likely removals.
pub fn brute_expected_dq(a: &[Vec<bool>]) -> Option<Rational> {
    let ts = triangles(a);
    if ts.is_empty() {
        return None;
    }
    let q = ts.len() as i128;
    let mut total = 0i128;
    for &t in &ts {
        let mut b = a.to_vec();
        remove_triangle(&mut b, t);
        total += triangles(&b).len() as i128 - q;
    }
    Some(Rational::new(total, q))
}

/// Average change of `Y_uv` over all equally likely removals.
pub fn brute_expected_dy(a: &[Vec<bool>], u: usize, v: usize) -> Option<Rational> {
    let ts = triangles(a);
    if ts.is_empty() {
        return None;
    }
    let before = codegree(a, u, v) as i128;
    let mut total = 0i128;
    for &t in &ts {
        let mut b = a.to_vec();
        remove_triangle(&mut b, t);
        total += codegree(&b, u, v) as i128 - before;
    }
    Some(Rational::new(total, ts.len() as i128))
}

/// Number of injective maps of `vertices` into `0..n` that agree with `phi`
/// on the roots and send every edge to an edge of `a`.
pub fn naive_psi(vertices: &[usize], edges: &[(usize, usize)], phi: &[(usize, usize)], a: &[Vec<bool>]) -> u64 {
    let n = a.len();
    let free: Vec<usize> = vertices
        .iter()
        .copied()
        .filter(|x| !phi.iter().any(|&(r, _)| r == *x))
        .collect();
    let max_label = vertices.iter().copied().max().unwrap_or(0);
    let mut image = vec![usize::MAX; max_label + 1];
    for &(r, x) in phi {
        image[r] = x;
    }
    fn go(
        k: usize,
        free: &[usize],
        image: &mut Vec<usize>,
        edges: &[(usize, usize)],
        a: &[Vec<bool>],
        n: usize,
    ) -> u64 {
        if k == free.len() {
            return edges.iter().all(|&(x, y)| a[image[x]][image[y]]) as u64;
        }
        let mut total = 0;
        for c in 0..n {
            if image.contains(&c) {
                continue;
            }
            image[free[k]] = c;
            total += go(k + 1, free, image, edges, a, n);
            image[free[k]] = usize::MAX;
        }
        total
    }
    go(0, &free, &mut image, edges, a, n)
}

pub fn falling_factorial(n: u64, k: u64) -> u64 {
    (0..k).map(|j| n.saturating_sub(j)).product()
}

/// Erdős–Rényi graph from the library RNG (used only as a source of bits).
pub fn random_matrix(n: usize, density_percent: u64, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = RunRng::new(seed, Stream::Pairs);
    let mut a = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.below(100) < density_percent {
                a[u][v] = true;
                a[v][u] = true;
            }
        }
    }
    a
}

// ---------------------------------------------------------------------------
// ladders, straight from the word rules

pub fn in_pi(w: &str) -> bool {
    let b = w.as_bytes();
    if b.iter().take(2).any(|&c| c == b'0') {
        return false;
    }
    if b.iter().filter(|&&c| c == b'e').count() > 2 {
        return false;
    }
    !(w.contains("e0") || w.contains("e10") || w.contains("e1e"))
}

/// Adjacency of the ladder of `w` on vertices `0..=|w|+1`.
pub fn ladder_matrix(w: &str) -> Vec<Vec<bool>> {
    let s: Vec<char> = w.chars().collect();
    let k = s.len();
    let mut a = vec![vec![false; k + 2]; k + 2];
    let add = |a: &mut Vec<Vec<bool>>, x: usize, y: usize| {
        a[x][y] = true;
        a[y][x] = true;
    };
    if s[0] == '1' {
        add(&mut a, 0, 2);
    }
    add(&mut a, 1, 2);
    for j in 2..=k {
        // vertex j before j+1 exists: its neighbors other than j-1 among 0..j
        let others: Vec<usize> = (0..j).filter(|&x| x != j - 1 && a[j][x]).collect();
        add(&mut a, j, j + 1);
        match s[j - 1] {
            '1' => add(&mut a, j - 1, j + 1),
            '0' => add(&mut a, others[0], j + 1),
            _ => {}
        }
    }
    a
}

/// Largest `f` such that vertex `a` carries an `f`-fan, by adjacency.
pub fn fan_size_at(w: &str, adj: &[Vec<bool>], a: usize) -> usize {
    let s: Vec<char> = w.chars().collect();
    let v = adj.len();
    let e_variant = a >= 3 && s[a - 3] == 'e';
    if e_variant {
        // a-1 and a+1, ..., a+f all adjacent to a
        if !adj[a][a - 1] {
            return 0;
        }
        let mut f = 0;
        while a + f + 1 < v && adj[a][a + f + 1] {
            f += 1;
        }
        f
    } else {
        // a+1, ..., a+f+1 all adjacent to a
        let mut run = 0;
        while a + run + 1 < v && adj[a][a + run + 1] {
            run += 1;
        }
        run.saturating_sub(1)
    }
}

pub fn max_fan_oracle(w: &str) -> usize {
    let adj = ladder_matrix(w);
    (1..adj.len()).map(|a| fan_size_at(w, &adj, a)).max().unwrap_or(0)
}

pub fn in_bm_oracle(w: &str, m: usize) -> bool {
    if w.is_empty() || !in_pi(w) {
        return false;
    }
    let s: Vec<char> = w.chars().collect();
    let es = s.iter().filter(|&&c| c == 'e').count();
    let ok_len = match es {
        0 => s.len() <= 3 * m - 1,
        1 => s.len() <= 2 * m && !(s.len() >= 2 * m && s[2 * m - 1] == 'e'),
        _ => s.len() <= m + 1 && !(s.len() >= m + 1 && s[m] == 'e'),
    };
    ok_len && max_fan_oracle(w) < m
}

/// Every word of `B_M`, by exhausting all strings up to length `3M - 1`.
pub fn bm_oracle(m: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut layer = vec![String::new()];
    for _ in 0..(3 * m - 1) {
        let mut next = Vec::new();
        for w in &layer {
            for c in ['0', '1', 'e'] {
                let mut x = w.clone();
                x.push(c);
                if in_bm_oracle(&x, m) {
                    out.insert(x.clone());
                }
                next.push(x);
            }
        }
        layer = next;
    }
    out
}

// ---------------------------------------------------------------------------
// survivor certificates, recomputed from whole-graph snapshots

#[derive(Debug, PartialEq, Eq)]
pub struct CertificateOutcome {
    pub x: Vec<[usize; 3]>,
    pub certified_edges: u64,
    pub trigger_edges_survived: u64,
    pub violations: u64,
}

fn tri_edges(t: [usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

fn shares_edge(s: [usize; 3], t: [usize; 3]) -> bool {
    s.iter().filter(|x| t.contains(x)).count() >= 2
}

/// Replays `removals` on `start`, running the certificate rule from round
/// `i0` on with full recomputation every round.
pub fn certificate_oracle(start: &[Vec<bool>], removals: &[[usize; 3]], i0: usize) -> CertificateOutcome {
    let mut cur = start.to_vec();
    let mut x: Vec<([usize; 3], (usize, usize))> = Vec::new();
    let mut x_edges: HashSet<(usize, usize)> = HashSet::new();
    let mut blocked: HashSet<[usize; 3]> = HashSet::new();
    let mut violations = 0;
    for (round, &t) in removals.iter().enumerate() {
        let prev = cur.clone();
        remove_triangle(&mut cur, t);
        if round < i0 {
            continue;
        }
        let live = triangles(&cur);
        let mut candidates: Vec<([usize; 3], (usize, usize))> = Vec::new();
        for &s in &live {
            let pendant: Vec<(usize, usize)> = tri_edges(s)
                .into_iter()
                .filter(|&(p, q)| codegree(&cur, p, q) == 1)
                .collect();
            let fresh = tri_edges(s).iter().all(|&(p, q)| codegree(&prev, p, q) >= 2);
            if !pendant.is_empty() && fresh {
                candidates.push((s, pendant[0]));
            }
        }
        candidates.sort();
        for (s, trigger) in candidates {
            if blocked.contains(&s) {
                continue;
            }
            let spare: u32 = tri_edges(s).iter().map(|&(p, q)| codegree(&cur, p, q)).sum();
            if spare <= 3 {
                continue;
            }
            for e in tri_edges(s) {
                if !x_edges.insert(e) {
                    violations += 1;
                }
            }
            x.push((s, trigger));
            let first: Vec<[usize; 3]> = live.iter().copied().filter(|&r| shares_edge(r, s)).collect();
            for &r in &first {
                for &r2 in live.iter().filter(|&&r2| shares_edge(r2, r)) {
                    blocked.insert(r2);
                }
            }
        }
    }
    let certified = x_edges.iter().filter(|&&(p, q)| cur[p][q]).count() as u64;
    let triggers = x.iter().filter(|(_, (p, q))| cur[*p][*q]).count() as u64;
    CertificateOutcome {
        x: x.into_iter().map(|(s, _)| s).collect(),
        certified_edges: certified,
        trigger_edges_survived: triggers,
        violations,
    }
}
