//! The random greedy triangle-removal process.
//!
//! Starting from `K_n`, every step picks a triangle uniformly at random and
//! deletes its three edges, until no triangle is left. Two equivalent
//! drivers are provided:
//!
//! * direct mode: every step is an exact uniform draw via the co-degree
//!   weighted sampler;
//! * permutation mode: after `i0` direct steps, the remaining triangles are
//!   put in uniformly random order and removed one by one when still intact.
//!
//! Optionally, from step `i0` on, a [`Certifier`] builds the set of
//! edge-disjoint triangles whose pendant edges witness surviving edges.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dyngraph::{choose2, Graph};
use crate::error::{Error, Result};
use crate::rng::{RunRng, Stream};
use crate::sampler::{draw_uniform_triangle, WeightedSampler};
use crate::trajectory::{capture, PairSample, Snapshot, SnapshotPolicy};

/// Default cap on the triangle list materialized by permutation mode.
pub const PERMUTATION_GUARD: u64 = 1 << 25;

pub type Triangle = [u32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Removed([usize; 3]),
    Terminated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivorStats {
    /// Step after which instrumentation started.
    pub activated_at: u64,
    /// `|X*|`: triangles admitted as certificates.
    pub x_size: u64,
    /// Final-graph edges that lie on some certificate triangle.
    pub certified_edges: u64,
    /// Certificates whose triggering pendant edge is still present at the end.
    pub trigger_edges_survived: u64,
    /// Certificates that shared an edge with an earlier certificate when
    /// admitted. Zero by construction.
    pub disjointness_violations: u64,
}

/// Survivor-certificate bookkeeping. Fed once per removal round.
#[derive(Clone, Debug)]
pub struct Certifier {
    activated_at: u64,
    certificates: Vec<(Triangle, (u32, u32))>,
    certificate_edges: HashSet<(u32, u32)>,
    blocked: HashSet<Triangle>,
    violations: u64,
    touched: HashMap<usize, u32>,
}

fn sorted3(a: usize, b: usize, c: usize) -> Triangle {
    let mut t = [a as u32, b as u32, c as u32];
    t.sort_unstable();
    t
}

fn tri_edges(t: &Triangle) -> [(u32, u32); 3] {
    [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
}

/// Triangles sharing an edge with `t`, excluding `t`, in ascending order.
pub fn edge_neighbors(g: &Graph, t: &Triangle) -> Vec<Triangle> {
    let mut out = Vec::new();
    let mut common = Vec::new();
    for (k, (a, b)) in tri_edges(t).into_iter().enumerate() {
        let third = t[2 - k] as usize;
        common.clear();
        g.common_neighbors_into(a as usize, b as usize, &mut common);
        for &c in &common {
            if c != third {
                out.push(sorted3(a as usize, b as usize, c));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

impl Certifier {
    pub fn new(activated_at: u64) -> Self {
        Self {
            activated_at,
            certificates: Vec::new(),
            certificate_edges: HashSet::new(),
            blocked: HashSet::new(),
            violations: 0,
            touched: HashMap::new(),
        }
    }

    /// Records that the co-degree of edge slot `id` dropped by one this round.
    #[inline]
    fn touch(&mut self, id: usize) {
        *self.touched.entry(id).or_insert(0) += 1;
    }

    fn previous(&self, g: &Graph, a: u32, b: u32) -> u32 {
        let id = g.pair_id(a as usize, b as usize);
        g.codegree_pair(a as usize, b as usize) + self.touched.get(&id).copied().unwrap_or(0)
    }

    /// Closes one round: admits every intact triangle that just acquired a
    /// pendant edge (co-degree 1) for the first time, is not blocked, and
    /// still shares an edge with another triangle. Candidates are handled in
    /// ascending order; each admission blocks its second neighborhood.
    fn end_round(&mut self, g: &Graph) {
        let mut candidates: Vec<(Triangle, (u32, u32))> = Vec::new();
        for &id in self.touched.keys() {
            let (a, b) = g.pair_from_id(id);
            if !g.has_edge(a, b) || g.codegree_pair(a, b) != 1 {
                continue;
            }
            let c = g.kth_common_neighbor(a, b, 0).expect("co-degree 1");
            let t = sorted3(a, b, c);
            let fresh = tri_edges(&t).iter().all(|&(x, y)| self.previous(g, x, y) >= 2);
            if fresh {
                candidates.push((t, (a as u32, b as u32)));
            }
        }
        self.touched.clear();
        candidates.sort_unstable();
        candidates.dedup_by(|x, y| x.0 == y.0);
        for (t, trigger) in candidates {
            if self.blocked.contains(&t) {
                continue;
            }
            let spare: u32 = tri_edges(&t)
                .iter()
                .map(|&(x, y)| g.codegree_pair(x as usize, y as usize))
                .sum();
            if spare <= 3 {
                // isolated triangle: no other triangle to witness it
                continue;
            }
            for e in tri_edges(&t) {
                if !self.certificate_edges.insert(e) {
                    self.violations += 1;
                }
            }
            self.certificates.push((t, trigger));
            let first = edge_neighbors(g, &t);
            self.blocked.insert(t);
            for s in &first {
                self.blocked.insert(*s);
                for s2 in edge_neighbors(g, s) {
                    self.blocked.insert(s2);
                }
            }
        }
    }

    pub fn certificates(&self) -> impl Iterator<Item = &Triangle> {
        self.certificates.iter().map(|(t, _)| t)
    }

    pub fn stats(&self, g: &Graph) -> SurvivorStats {
        let certified = self
            .certificate_edges
            .iter()
            .filter(|&&(a, b)| g.has_edge(a as usize, b as usize))
            .count() as u64;
        let triggers = self
            .certificates
            .iter()
            .filter(|(_, (a, b))| g.has_edge(*a as usize, *b as usize))
            .count() as u64;
        SurvivorStats {
            activated_at: self.activated_at,
            x_size: self.certificates.len() as u64,
            certified_edges: certified,
            trigger_edges_survived: triggers,
            disjointness_violations: self.violations,
        }
    }
}

#[derive(Clone, Debug)]
struct PermutationPhase {
    order: Vec<Triangle>,
    cursor: usize,
}

/// One run of the process.
#[derive(Clone, Debug)]
pub struct ProcessState {
    graph: Graph,
    sampler: WeightedSampler,
    step: u64,
    seed: u64,
    rng: RunRng,
    permutation: Option<PermutationPhase>,
    certifier: Option<Certifier>,
    common: Vec<usize>,
}

impl ProcessState {
    /// Fresh process on `K_n`.
    pub fn new(n: usize, seed: u64) -> Self {
        Self::from_graph(Graph::new_complete(n), seed)
    }

    /// Process started from an arbitrary graph; used by tests and small
    /// hand-built instances.
    pub fn from_graph(graph: Graph, seed: u64) -> Self {
        let sampler = WeightedSampler::from_graph(&graph);
        Self {
            graph,
            sampler,
            step: 0,
            seed,
            rng: RunRng::new(seed, Stream::Process),
            permutation: None,
            certifier: None,
            common: Vec::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn sampler(&self) -> &WeightedSampler {
        &self.sampler
    }

    /// Steps taken so far (`i`).
    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn is_permutation_mode(&self) -> bool {
        self.permutation.is_some()
    }

    pub fn certifier(&self) -> Option<&Certifier> {
        self.certifier.as_ref()
    }

    /// Starts survivor instrumentation; rounds after the current step count.
    pub fn enable_certificates(&mut self) {
        self.certifier = Some(Certifier::new(self.step));
    }

    /// Switches to permutation mode: the current triangles are shuffled and
    /// examined in that order from now on.
    pub fn enter_permutation_mode(&mut self, guard: u64) -> Result<()> {
        let q = self.graph.triangle_count();
        if q > guard {
            return Err(Error::MemoryGuard {
                needed: q,
                limit: guard,
            });
        }
        let mut order = self.graph.triangles();
        RunRng::new(self.seed, Stream::Permutation).shuffle(&mut order);
        self.permutation = Some(PermutationPhase { order, cursor: 0 });
        Ok(())
    }

    fn remove_triangle(&mut self, t: [usize; 3]) {
        let [u, v, w] = t;
        let sampled = self.permutation.is_none();
        for (a, b) in [(u, v), (u, w), (v, w)] {
            self.graph
                .delete_edge_into(a, b, &mut self.common)
                .expect("triangle edge present");
            let g = &self.graph;
            if sampled {
                self.sampler.set_weight(g.pair_id(a, b), 0).expect("slot in range");
            }
            for &x in &self.common {
                let (ia, ib) = (g.pair_id(a, x), g.pair_id(b, x));
                if sampled {
                    self.sampler.decrement(ia);
                    self.sampler.decrement(ib);
                }
                if let Some(c) = self.certifier.as_mut() {
                    c.touch(ia);
                    c.touch(ib);
                }
            }
        }
        self.step += 1;
        if let Some(c) = self.certifier.as_mut() {
            c.end_round(&self.graph);
        }
        debug_assert!(!sampled || self.sampler.total() == 3 * self.graph.triangle_count());
    }

    /// Removes one uniformly random triangle, or reports termination.
    pub fn step(&mut self) -> StepOutcome {
        let next = match self.permutation.as_mut() {
            None => draw_uniform_triangle(&self.graph, &self.sampler, &mut self.rng),
            Some(phase) => {
                let g = &self.graph;
                let mut found = None;
                while phase.cursor < phase.order.len() {
                    let t = phase.order[phase.cursor];
                    phase.cursor += 1;
                    if tri_edges(&t).iter().all(|&(a, b)| g.has_edge(a as usize, b as usize)) {
                        found = Some([t[0] as usize, t[1] as usize, t[2] as usize]);
                        break;
                    }
                }
                found
            }
        };
        match next {
            Some(t) => {
                self.remove_triangle(t);
                StepOutcome::Removed(t)
            }
            None => StepOutcome::Terminated,
        }
    }
}

/// Options for [`run`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub snapshots: Option<SnapshotPolicy>,
    /// Switch to permutation mode at this step.
    pub permutation_at: Option<u64>,
    /// Start survivor instrumentation at this step.
    pub certify_at: Option<u64>,
    /// Stop early once `p` falls below this value (run is then not complete).
    pub stop_below_p: Option<f64>,
    pub permutation_guard: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            snapshots: None,
            permutation_at: None,
            certify_at: None,
            stop_below_p: None,
            permutation_guard: PERMUTATION_GUARD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub n: usize,
    pub seed: u64,
    /// Steps taken; the termination time when `completed`.
    pub tau0: u64,
    pub final_edges: u64,
    pub completed: bool,
    pub snapshots: Vec<Snapshot>,
    pub survivors: Option<SurvivorStats>,
    #[serde(skip)]
    pub wall_seconds: f64,
}

/// Runs the process on `K_n` with `seed`.
pub fn run(n: usize, seed: u64, cfg: &RunConfig) -> Result<RunResult> {
    run_observed(n, seed, cfg, |_, _| {})
}

/// Like [`run`], calling `observe` with the live graph at every snapshot.
pub fn run_observed<F>(n: usize, seed: u64, cfg: &RunConfig, mut observe: F) -> Result<RunResult>
where
    F: FnMut(&Graph, &Snapshot),
{
    let started = Instant::now();
    let mut st = ProcessState::new(n, seed);
    let pairs = cfg
        .snapshots
        .as_ref()
        .map(|pol| PairSample::for_run(n, seed, pol.pair_sample, pol.full_scan_max_n));
    let mut snapshots = Vec::new();
    let mut next_capture = 0u64;
    let stop_step = cfg.stop_below_p.map(|p| crate::trajectory::step_at_p(n, p));
    let mut completed = false;

    loop {
        let i = st.step_index();
        if cfg.certify_at == Some(i) && st.certifier.is_none() {
            st.enable_certificates();
        }
        if cfg.permutation_at == Some(i) && !st.is_permutation_mode() {
            st.enter_permutation_mode(cfg.permutation_guard)?;
        }
        if let (Some(pol), Some(pairs)) = (cfg.snapshots.as_ref(), pairs.as_ref()) {
            if i >= next_capture {
                let snap = capture(&st.graph, seed, i, pairs, &pol.stopping);
                observe(&st.graph, &snap);
                snapshots.push(snap);
                next_capture = pol.next_capture(n, i);
            }
        }
        if stop_step.is_some_and(|s| i >= s) {
            break;
        }
        if st.step() == StepOutcome::Terminated {
            completed = true;
            break;
        }
    }

    let tau0 = st.step_index();
    if let (Some(pol), Some(pairs)) = (cfg.snapshots.as_ref(), pairs.as_ref()) {
        if snapshots.last().map(|s| s.i) != Some(tau0) {
            let snap = capture(&st.graph, seed, tau0, pairs, &pol.stopping);
            observe(&st.graph, &snap);
            snapshots.push(snap);
        }
    }
    let final_edges = st.graph.edge_count();
    debug_assert_eq!(3 * tau0 + final_edges, choose2(n as u64));
    Ok(RunResult {
        n,
        seed,
        tau0,
        final_edges,
        completed,
        snapshots,
        survivors: st.certifier.as_ref().map(|c| c.stats(&st.graph)),
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Direct mode up to step `i0`, permutation mode afterwards.
pub fn run_permutation_mode(n: usize, seed: u64, i0: u64) -> Result<RunResult> {
    run(
        n,
        seed,
        &RunConfig {
            permutation_at: Some(i0),
            ..Default::default()
        },
    )
}

/// Complete run with survivor instrumentation switched on at step `i0`.
pub fn survivor_certificates(n: usize, seed: u64, i0: u64) -> Result<SurvivorStats> {
    let res = run(
        n,
        seed,
        &RunConfig {
            certify_at: Some(i0),
            ..Default::default()
        },
    )?;
    Ok(res.survivors.expect("instrumentation enabled"))
}
