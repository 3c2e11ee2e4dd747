//! Rooted copy counts `Ψ_{H,φ}` in a concrete graph, the ladder variables
//! `Ψ_{π,uv}` and `X_{π,uv}`, and an envelope audit over a live run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyngraph::{for_each_bit, Graph};
use crate::error::{Error, Result};
use crate::extgraph::ExtensionGraph;
use crate::ladders::{build_ladder, enumerate_bm, omega, LadderWord};
use crate::process::{run_observed, RunConfig};
use crate::trajectory::{sample_pairs, scales_at, SnapshotPolicy};

/// Number of injective maps `ψ: V_H → V_G` extending `phi` (given as
/// `(root, image)` pairs) that send every edge of `h` to an edge of `g`.
pub fn psi(h: &ExtensionGraph, phi: &[(usize, usize)], g: &Graph) -> Result<u64> {
    let n = g.n();
    let mut roots: Vec<usize> = phi.iter().map(|&(r, _)| r).collect();
    roots.sort_unstable();
    if roots != h.roots() {
        return Err(Error::InvalidRootMap(format!(
            "domain {roots:?} differs from roots {:?}",
            h.roots()
        )));
    }
    let mut images: Vec<usize> = phi.iter().map(|&(_, x)| x).collect();
    images.sort_unstable();
    if images.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidRootMap("root map is not injective".into()));
    }
    if let Some(&x) = images.iter().find(|&&x| x >= n) {
        return Err(Error::InvalidRootMap(format!(
            "image {x} outside a graph on {n} vertices"
        )));
    }

    let free = h.free_vertices();
    if free.len() > n.saturating_sub(phi.len()) {
        return Ok(0);
    }
    if free.is_empty() {
        return Ok(1);
    }

    // free vertices in search order
    let adjacent = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        h.edges().binary_search(&key).is_ok()
    };
    let mut placed: Vec<usize> = phi.iter().map(|&(r, _)| r).collect();
    let mut order = Vec::with_capacity(free.len());
    let mut rest = free.clone();
    while !rest.is_empty() {
        // most placed neighbors first, then highest degree, then smallest label
        let (k, _) = rest
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let back = placed.iter().filter(|&&y| adjacent(x, y)).count();
                let deg = h.vertices().iter().filter(|&&y| adjacent(x, y)).count();
                (k, (back, deg, std::cmp::Reverse(x)))
            })
            .max_by_key(|&(_, key)| key)
            .expect("non-empty");
        let x = rest.remove(k);
        order.push(x);
        placed.push(x);
    }

    // back[l]: positions in `placed` of already-placed neighbors of order[l]
    let base = phi.len();
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(l, &x)| (0..base + l).filter(|&j| adjacent(x, placed[j])).collect())
        .collect();

    let words = n.div_ceil(64);
    let mut full = vec![!0u64; words];
    if !n.is_multiple_of(64) {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut search = Search {
        g,
        full,
        back,
        assigned: phi.iter().map(|&(_, x)| x).collect(),
        used: vec![0u64; words],
        scratch: vec![vec![0u64; words]; order.len()],
    };
    for &x in &search.assigned {
        search.used[x / 64] |= 1 << (x % 64);
    }
    search.count(0)
}

struct Search<'a> {
    g: &'a Graph,
    full: Vec<u64>,
    back: Vec<Vec<usize>>,
    assigned: Vec<usize>,
    used: Vec<u64>,
    scratch: Vec<Vec<u64>>,
}

impl Search<'_> {
    fn count(&mut self, level: usize) -> Result<u64> {
        let mut cand = std::mem::take(&mut self.scratch[level]);
        cand.copy_from_slice(&self.full);
        for &j in &self.back[level] {
            let row = self.g.row(self.assigned[j]);
            for (c, r) in cand.iter_mut().zip(row) {
                *c &= r;
            }
        }
        for (c, u) in cand.iter_mut().zip(&self.used) {
            *c &= !u;
        }
        let result = if level + 1 == self.back.len() {
            Ok(cand.iter().map(|w| w.count_ones() as u64).sum())
        } else {
            let mut total = 0u64;
            let mut err = None;
            for_each_bit(&cand, |x| {
                if err.is_some() {
                    return;
                }
                self.assigned.push(x);
                self.used[x / 64] |= 1 << (x % 64);
                match self.count(level + 1) {
                    Ok(c) => match total.checked_add(c) {
                        Some(t) => total = t,
                        None => err = Some(Error::CountOverflow),
                    },
                    Err(e) => err = Some(e),
                }
                self.used[x / 64] &= !(1 << (x % 64));
                self.assigned.pop();
            });
            match err {
                Some(e) => Err(e),
                None => Ok(total),
            }
        };
        self.scratch[level] = cand;
        result
    }
}

/// `Ψ_{π,uv}`: copies of the ladder of `word` with roots 0 ↦ `u`, 1 ↦ `v`.
/// The empty word counts 1.
pub fn psi_ladder(word: &LadderWord, u: usize, v: usize, g: &Graph) -> Result<u64> {
    if u == v || u >= g.n() || v >= g.n() {
        return Err(Error::InvalidPair(u, v, g.n()));
    }
    if word.is_empty() {
        return Ok(1);
    }
    let h = build_ladder(word)?.as_extension();
    psi(&h, &[(0, u), (1, v)], g)
}

/// `X_{π,uv} = Ψ_{π,uv} − n p^θ Ψ_{π⁻,uv}` with `θ = 1` after a final `e`
/// and 2 otherwise.
pub fn x_variable(word: &LadderWord, u: usize, v: usize, g: &Graph, n: f64, p: f64) -> Result<f64> {
    if word.is_empty() {
        return Err(Error::InvalidWord {
            word: String::new(),
            reason: "X is defined for non-empty words".into(),
        });
    }
    let full = psi_ladder(word, u, v, g)? as f64;
    let parent = psi_ladder(&word.parent(), u, v, g)? as f64;
    Ok(full - word.step_scaling().value(n, p) * parent)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub n: usize,
    pub seed: u64,
    pub m: usize,
    /// Only snapshots with `p >= p_min` are audited; the run stops below it.
    pub p_min: f64,
    /// Longest word audited.
    pub max_len: usize,
    /// Number of root pairs.
    pub pairs: usize,
    pub dp: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            n: 500,
            seed: 1,
            m: 3,
            p_min: 0.3,
            max_len: 3,
            pairs: 20,
            dp: 0.05,
        }
    }
}

/// Largest word length audited without restriction on `n`.
pub const AUDIT_FREE_LEN: usize = 4;
/// Largest `n` at which words longer than [`AUDIT_FREE_LEN`] are audited.
pub const AUDIT_MAX_N: usize = 1500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub i: u64,
    pub p: f64,
    pub word: LadderWord,
    pub max_ratio: f64,
    pub argmax_pair: (usize, usize),
    pub max_abs_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub root_pairs: Vec<(usize, usize)>,
    pub entries: Vec<AuditEntry>,
    pub max_ratio: f64,
    /// Entries with `max_ratio > 1`.
    pub exceedances: usize,
}

/// Rough count of candidate extensions examined by an audit.
pub fn audit_cost(cfg: &AuditConfig, words: usize, snapshots: usize) -> f64 {
    (cfg.pairs * words * snapshots) as f64 * (cfg.n as f64).powi(cfg.max_len as i32)
}

/// Runs the process and, at each snapshot with `p >= p_min`, records the
/// largest `|X_{π,uv}| / (ω_π ζ S_π)` over a fixed set of root pairs for
/// every word of `B_M` of length at most `max_len`.
pub fn concentration_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.n < 3 || cfg.pairs == 0 || !cfg.dp.is_finite() || cfg.dp <= 0.0 || !(0.0..1.0).contains(&cfg.p_min) {
        return Err(Error::Config(format!("invalid audit config {cfg:?}")));
    }
    let words: Vec<LadderWord> = enumerate_bm(cfg.m)?
        .into_iter()
        .filter(|w| w.len() <= cfg.max_len)
        .collect();
    let snapshots = ((1.0 - cfg.p_min) / cfg.dp).ceil() as usize + 1;
    if cfg.max_len > AUDIT_FREE_LEN && cfg.n > AUDIT_MAX_N {
        return Err(Error::Refused(format!(
            "words up to length {} at n = {} need about {:.2e} operations; \
             use max_len <= {AUDIT_FREE_LEN} or n <= {AUDIT_MAX_N}",
            cfg.max_len,
            cfg.n,
            audit_cost(cfg, words.len(), snapshots)
        )));
    }
    let weights: Vec<f64> = words
        .iter()
        .map(|w| omega(w, cfg.m).map(|o| o as f64))
        .collect::<Result<_>>()?;
    let root_pairs = sample_pairs(cfg.n, cfg.seed, cfg.pairs);
    let run_cfg = RunConfig {
        snapshots: Some(SnapshotPolicy {
            dp: cfg.dp,
            ..Default::default()
        }),
        stop_below_p: Some(cfg.p_min),
        ..Default::default()
    };

    let mut entries = Vec::new();
    let mut failure = None;
    run_observed(cfg.n, cfg.seed, &run_cfg, |g, snap| {
        if failure.is_some() || snap.p < cfg.p_min {
            return;
        }
        let scales = match scales_at(cfg.n, snap.i) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let nf = cfg.n as f64;
        for (word, &w_omega) in words.iter().zip(&weights) {
            let envelope = w_omega * scales.zeta * word.scaling().value(nf, scales.p);
            let xs: Result<Vec<f64>> = root_pairs
                .par_iter()
                .map(|&(u, v)| x_variable(word, u, v, g, nf, scales.p))
                .collect();
            let xs = match xs {
                Ok(xs) => xs,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let (k, max_abs_x) = xs
                .iter()
                .map(|x| x.abs())
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |best, (k, a)| if a > best.1 { (k, a) } else { best },
                );
            entries.push(AuditEntry {
                i: snap.i,
                p: scales.p,
                word: word.clone(),
                max_ratio: max_abs_x / envelope,
                argmax_pair: root_pairs[k],
                max_abs_x,
            });
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let max_ratio = entries.iter().map(|e| e.max_ratio).fold(0.0, f64::max);
    let exceedances = entries.iter().filter(|e| e.max_ratio > 1.0).count();
    Ok(AuditReport {
        config: cfg.clone(),
        root_pairs,
        entries,
        max_ratio,
        exceedances,
    })
}
