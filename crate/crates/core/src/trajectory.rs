//! Deterministic scales of the process, snapshot records, exact one-step
//! drifts and the stopping-time detectors.
//!
//! Time is measured in steps `i`; `t = i / n²` and `p = 1 - 6t`, so that the
//! edge count after `i` steps is exactly `(n²p - n) / 2`. Logarithms are
//! natural throughout.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dyngraph::{choose2, Graph};
use crate::error::{Error, Result};
use crate::rng::{RunRng, Stream};

/// Exact rational used for drift values.
pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub n: usize,
    pub i: u64,
    pub t: f64,
    pub p: f64,
    pub predicted_edges: f64,
    pub predicted_q: f64,
    pub predicted_codegree: f64,
    pub zeta: f64,
    pub phi: f64,
    pub upsilon: f64,
}

/// `p(i) = 1 - 6i/n²`.
#[inline]
pub fn p_at(n: usize, i: u64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    (n2 - 6.0 * i as f64) / n2
}

/// Smallest step `i` with `p(i) <= p`.
pub fn step_at_p(n: usize, p: f64) -> u64 {
    let n2 = (n as u128) * (n as u128);
    // p(i) <= p  <=>  6i >= n²(1 - p); evaluate the bound in f64, then
    // correct by exact integer comparison against the f64 threshold
    let target = (n2 as f64) * (1.0 - p) / 6.0;
    let mut i = target.ceil().max(0.0) as u64;
    while i > 0 && p_at(n, i - 1) <= p {
        i -= 1;
    }
    while p_at(n, i) > p {
        i += 1;
    }
    i
}

pub fn scales_at(n: usize, i: u64) -> Result<Scales> {
    if n == 0 {
        return Err(Error::OutOfDomain { n, i });
    }
    let p = p_at(n, i);
    if p <= 0.0 {
        return Err(Error::OutOfDomain { n, i });
    }
    let nf = n as f64;
    let ln = nf.ln();
    Ok(Scales {
        n,
        i,
        t: i as f64 / (nf * nf),
        p,
        predicted_edges: (nf * nf - 6.0 * i as f64 - nf) / 2.0,
        predicted_q: (nf * p).powi(3) / 6.0,
        predicted_codegree: nf * p * p,
        zeta: ln / (nf.sqrt() * p),
        phi: p.powf(-2.0 / ln) * ln,
        upsilon: ((nf * p).powi(3) + nf * nf * p) / 6.0 + nf.powf(7.0 / 3.0) * p * p,
    })
}

/// `E[ΔQ | F_i] = 2 - (1/Q) Σ_{uv ∈ E} Y_uv²`, exactly.
pub fn expected_dq(g: &Graph) -> Result<Rational> {
    let q = g.triangle_count();
    if q == 0 {
        return Err(Error::NoTriangles);
    }
    let mut sum_sq: i128 = 0;
    for (u, v) in g.edges() {
        let y = g.codegree(u, v)? as i128;
        sum_sq += y * y;
    }
    Ok(Rational::from_integer(2) - Rational::new(sum_sq, q as i128))
}

/// `E[ΔY_uv | F_i] = -(1/Q) Σ_{x ∈ N_uv} (Y_ux + Y_vx - 1[uv ∈ E])`, exactly.
pub fn expected_dy(g: &Graph, u: usize, v: usize) -> Result<Rational> {
    let q = g.triangle_count();
    if q == 0 {
        return Err(Error::NoTriangles);
    }
    g.codegree(u, v)?;
    let adjacent = g.has_edge(u, v) as i128;
    let mut total: i128 = 0;
    for x in g.common_neighbors(u, v) {
        total += g.codegree(u, x)? as i128 + g.codegree(v, x)? as i128 - adjacent;
    }
    Ok(Rational::new(-total, q as i128))
}

fn within(value: f64, center: f64, bound: f64) -> bool {
    let slack = 1e-12 * center.abs().max(value.abs()).max(1.0);
    (value - center).abs() <= bound + slack
}

/// Sum-of-squares sandwich for values within `delta` of `a`:
/// `(Σ a_i)² / m <= Σ a_i² <= (Σ a_i)² / m + 4 m δ²`.
pub fn sum_sq_bounds(values: &[f64], a: f64, delta: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Degenerate("empty value list".into()));
    }
    if let Some(index) = values.iter().position(|&x| !within(x, a, delta)) {
        return Err(Error::Precondition {
            index,
            reason: format!("|{} - {a}| exceeds {delta}", values[index]),
        });
    }
    let m = values.len() as f64;
    let s: f64 = values.iter().sum();
    let lower = s * s / m;
    Ok((lower, lower + 4.0 * m * delta * delta))
}

/// Bound `2 |I| dx dy` on `|Σ x_i y_i - (1/|I|) (Σ x_i)(Σ y_i)|` for
/// sequences within `dx` of `x` and `dy` of `y`.
pub fn product_sum_bound(xs: &[f64], ys: &[f64], x: f64, dx: f64, y: f64, dy: f64) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::Degenerate("empty sequences".into()));
    }
    for (index, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if !within(xi, x, dx) || !within(yi, y, dy) {
            return Err(Error::Precondition {
                index,
                reason: format!("({xi}, {yi}) outside ({x} ± {dx}, {y} ± {dy})"),
            });
        }
    }
    Ok(2.0 * xs.len() as f64 * dx * dy)
}

/// `|Σ x_i y_i - (1/|I|)(Σ x_i)(Σ y_i)|`.
pub fn product_sum_discrepancy(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let cross: f64 = xs.iter().zip(ys).map(|(a, b)| a * b).sum();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    (cross - sx * sy / m).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    /// Triangle envelope: stop once `|Q / (n³p³/6) - 1| >= kappa ζ²`.
    pub kappa: f64,
    /// Co-degree envelope: stop once `|Y - np²| > alpha n^{1/2} p Φ`.
    pub alpha: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            kappa: 25.0,
            alpha: 30.0,
        }
    }
}

impl StoppingConfig {
    /// Asymptotic constants attached to ladder family `B_M`:
    /// `alpha = 3^{3M-1}` and `kappa = (alpha e)²`.
    pub fn asymptotic(m: u32) -> Self {
        let alpha = 3f64.powi(3 * m as i32 - 1);
        Self {
            kappa: (alpha * std::f64::consts::E).powi(2),
            alpha,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingFlags {
    pub tau_q: bool,
    pub tau_y: bool,
    pub tau_c: bool,
    /// Co-degree flags came from a pair sample rather than a full scan.
    pub approximate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: usize,
    pub seed: u64,
    pub i: u64,
    pub p: f64,
    pub edges: u64,
    pub triangles: u64,
    pub q_rel_dev: f64,
    pub codeg_min: u32,
    pub codeg_max: u32,
    pub codeg_mean: f64,
    /// `max |Y / (np²) - 1|` over the examined pairs.
    pub max_y_rel_dev: f64,
    /// `max |Y - np²|` over the examined pairs.
    pub max_y_abs_dev: f64,
    pub sampled_pairs: u64,
    pub full_scan: bool,
    pub flags: StoppingFlags,
}

/// Flags for one snapshot under `cfg`.
pub fn stopping_detect(s: &Snapshot, cfg: &StoppingConfig) -> StoppingFlags {
    let nf = s.n as f64;
    let (zeta, phi) = match scales_at(s.n, s.i) {
        Ok(sc) => (sc.zeta, sc.phi),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    let p = s.p;
    let np2 = nf * p * p;
    StoppingFlags {
        tau_q: s.q_rel_dev >= cfg.kappa * zeta * zeta,
        tau_y: s.max_y_abs_dev > cfg.alpha * nf.sqrt() * p * phi,
        tau_c: s.codeg_max as f64 > 2.0 * (np2 + nf.cbrt()),
        approximate: !s.full_scan,
    }
}

/// Pairs examined at each snapshot.
#[derive(Clone, Debug)]
pub enum PairSample {
    Full,
    Sampled(Vec<(usize, usize)>),
}

impl PairSample {
    /// `count` distinct pairs drawn from the run's pair stream, or the full
    /// table when `n <= full_scan_max_n` or `count` covers every pair.
    pub fn for_run(n: usize, seed: u64, count: usize, full_scan_max_n: usize) -> Self {
        let total = choose2(n as u64);
        if n <= full_scan_max_n || count as u64 >= total {
            return PairSample::Full;
        }
        PairSample::Sampled(sample_pairs(n, seed, count))
    }
}

/// `count` distinct unordered pairs `(u, v)`, `u < v`, from the pair stream of
/// `seed`. Order is the draw order.
pub fn sample_pairs(n: usize, seed: u64, count: usize) -> Vec<(usize, usize)> {
    let total = choose2(n as u64) as usize;
    let count = count.min(total);
    let mut rng = RunRng::new(seed, Stream::Pairs);
    let mut seen = std::collections::HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.index(n);
        let v = rng.index(n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotPolicy {
    /// Grid spacing in `p`.
    pub dp: f64,
    pub pair_sample: usize,
    /// Scan every pair when `n` is at most this.
    pub full_scan_max_n: usize,
    pub stopping: StoppingConfig,
}

impl Default for SnapshotPolicy {
    fn default() -> Self {
        Self {
            dp: 0.01,
            pair_sample: 1000,
            full_scan_max_n: 2048,
            stopping: StoppingConfig::default(),
        }
    }
}

impl SnapshotPolicy {
    /// Next step strictly after `i` at which `p` reaches a grid point.
    pub fn next_capture(&self, n: usize, i: u64) -> u64 {
        let p = p_at(n, i);
        let mut k = (p / self.dp).floor();
        // grid point must be strictly below the current p
        if k * self.dp >= p {
            k -= 1.0;
        }
        if k < 0.0 {
            return u64::MAX;
        }
        step_at_p(n, k * self.dp).max(i + 1)
    }
}

/// Records the state of `g` after `i` steps.
pub fn capture(g: &Graph, seed: u64, i: u64, pairs: &PairSample, stopping: &StoppingConfig) -> Snapshot {
    let n = g.n();
    let p = p_at(n, i);
    let nf = n as f64;
    let np2 = nf * p * p;
    let pred_q = (nf * p).powi(3) / 6.0;
    let (mut lo, mut hi, mut sum, mut count, mut max_abs) = (u32::MAX, 0u32, 0u64, 0u64, 0f64);
    let mut visit = |y: u32| {
        lo = lo.min(y);
        hi = hi.max(y);
        sum += y as u64;
        count += 1;
        max_abs = max_abs.max((y as f64 - np2).abs());
    };
    let full = matches!(pairs, PairSample::Full);
    match pairs {
        PairSample::Full => {
            for u in 0..n {
                for v in (u + 1)..n {
                    visit(g.codegree_pair(u, v));
                }
            }
        }
        PairSample::Sampled(list) => {
            for &(u, v) in list {
                visit(g.codegree_pair(u, v));
            }
        }
    }
    if count == 0 {
        lo = 0;
    }
    let mut snap = Snapshot {
        n,
        seed,
        i,
        p,
        edges: g.edge_count(),
        triangles: g.triangle_count(),
        q_rel_dev: if pred_q > 0.0 {
            (g.triangle_count() as f64 / pred_q - 1.0).abs()
        } else {
            f64::INFINITY
        },
        codeg_min: lo,
        codeg_max: hi,
        codeg_mean: if count > 0 { sum as f64 / count as f64 } else { 0.0 },
        max_y_rel_dev: if np2 > 0.0 { max_abs / np2 } else { f64::INFINITY },
        max_y_abs_dev: max_abs,
        sampled_pairs: count,
        full_scan: full,
        flags: StoppingFlags::default(),
    };
    snap.flags = stopping_detect(&snap, stopping);
    snap
}

pub const CSV_HEADER: &str = "n,seed,i,p,edges,Q,Q_rel_dev,maxY_rel_dev,sampled_pairs,tauQ,tauY,tauC";

/// One CSV row per snapshot (no header). Floats use shortest round-trip
/// formatting so rows parse back exactly.
pub fn csv_row(s: &Snapshot) -> String {
    let mut out = String::new();
    write!(
        out,
        "{},{},{},{:?},{},{},{:?},{:?},{},{},{},{}",
        s.n,
        s.seed,
        s.i,
        s.p,
        s.edges,
        s.triangles,
        s.q_rel_dev,
        s.max_y_rel_dev,
        s.sampled_pairs,
        s.flags.tau_q as u8,
        s.flags.tau_y as u8,
        s.flags.tau_c as u8
    )
    .unwrap();
    out
}

/// Parsed form of one CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRecord {
    pub n: usize,
    pub seed: u64,
    pub i: u64,
    pub p: f64,
    pub edges: u64,
    pub triangles: u64,
    pub q_rel_dev: f64,
    pub max_y_rel_dev: f64,
    pub sampled_pairs: u64,
    pub tau_q: bool,
    pub tau_y: bool,
    pub tau_c: bool,
}

impl From<&Snapshot> for CsvRecord {
    fn from(s: &Snapshot) -> Self {
        Self {
            n: s.n,
            seed: s.seed,
            i: s.i,
            p: s.p,
            edges: s.edges,
            triangles: s.triangles,
            q_rel_dev: s.q_rel_dev,
            max_y_rel_dev: s.max_y_rel_dev,
            sampled_pairs: s.sampled_pairs,
            tau_q: s.flags.tau_q,
            tau_y: s.flags.tau_y,
            tau_c: s.flags.tau_c,
        }
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 12 {
                return Err(Error::Parse(format!("expected 12 fields in {line:?}")));
            }
            fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
                s.parse().map_err(|_| Error::Parse(format!("bad field {s:?}")))
            }
            fn flag(s: &str) -> Result<bool> {
                match s {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(Error::Parse(format!("bad flag {s:?}"))),
                }
            }
            Ok(CsvRecord {
                n: num(f[0])?,
                seed: num(f[1])?,
                i: num(f[2])?,
                p: num(f[3])?,
                edges: num(f[4])?,
                triangles: num(f[5])?,
                q_rel_dev: num(f[6])?,
                max_y_rel_dev: num(f[7])?,
                sampled_pairs: num(f[8])?,
                tau_q: flag(f[9])?,
                tau_y: flag(f[10])?,
                tau_c: flag(f[11])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_examples() {
        let s = scales_at(1000, 0).unwrap();
        assert_eq!(s.p, 1.0);
        assert_eq!(s.predicted_edges, 499_500.0);
        let s = scales_at(120, 120 * 120 / 12).unwrap();
        assert_eq!(s.p, 0.5);
        let s = scales_at(10_000, 0).unwrap();
        assert!((s.zeta - 0.092_103_4).abs() < 1e-6, "{}", s.zeta);
        assert!(scales_at(12, 24).is_err());
        assert!(scales_at(12, 23).is_ok());
    }

    #[test]
    fn predicted_edges_is_exact() {
        for n in [5usize, 17, 100, 1001] {
            let mut i = 0;
            while p_at(n, i) > 0.0 {
                let s = scales_at(n, i).unwrap();
                assert_eq!(s.predicted_edges, choose2(n as u64) as f64 - 3.0 * i as f64);
                i += 1 + (n as u64) / 3;
            }
        }
    }

    #[test]
    fn phi_over_log_is_between_one_and_e() {
        for n in [100usize, 1000, 10_000] {
            let floor = 1.0 / (n as f64).sqrt();
            let mut i = 0;
            loop {
                let s = scales_at(n, i).unwrap();
                if s.p < floor {
                    break;
                }
                let r = s.phi / (n as f64).ln();
                assert!(
                    (1.0..=std::f64::consts::E + 1e-12).contains(&r),
                    "n={n} p={} r={r}",
                    s.p
                );
                i += (n * n / 600) as u64;
            }
        }
    }

    #[test]
    fn step_at_p_is_minimal() {
        for n in [7usize, 100, 1024] {
            for p in [0.999, 0.5, 0.3, 0.1, 0.0] {
                let i = step_at_p(n, p);
                assert!(p_at(n, i) <= p);
                assert!(i == 0 || p_at(n, i - 1) > p);
            }
        }
        assert_eq!(step_at_p(100, 0.5), 833 + 1);
    }

    #[test]
    fn drift_examples() {
        let k4 = Graph::new_complete(4);
        assert_eq!(expected_dq(&k4).unwrap(), Rational::from_integer(-4));
        assert_eq!(
            expected_dq(&Graph::new_complete(5)).unwrap(),
            Rational::from_integer(-7)
        );
        let two = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(expected_dq(&two).unwrap(), Rational::from_integer(-1));
        assert_eq!(expected_dy(&k4, 0, 1).unwrap(), Rational::new(-3, 2));
        let path = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        assert_eq!(expected_dy(&path, 0, 3).unwrap(), Rational::from_integer(0));
        assert_eq!(expected_dq(&Graph::new_empty(3)), Err(Error::NoTriangles));
    }

    #[test]
    fn dy_matches_average_over_k4_removals() {
        // ΔY_01 over the four triangles 012, 013, 023, 123 is -1, -1, -2, -2
        let k4 = Graph::new_complete(4);
        let mut total = 0i128;
        for t in k4.triangles() {
            let mut g = k4.clone();
            let t: Vec<usize> = t.iter().map(|&x| x as usize).collect();
            g.delete_edge(t[0], t[1]).unwrap();
            g.delete_edge(t[0], t[2]).unwrap();
            g.delete_edge(t[1], t[2]).unwrap();
            total += g.recount_codegree(0, 1) as i128 - 2;
        }
        assert_eq!(Rational::new(total, 4), expected_dy(&k4, 0, 1).unwrap());
    }

    #[test]
    fn sum_sq_examples() {
        assert_eq!(sum_sq_bounds(&[1.0, 1.0, 1.0], 1.0, 0.0).unwrap(), (3.0, 3.0));
        assert_eq!(sum_sq_bounds(&[0.0, 2.0], 1.0, 1.0).unwrap(), (2.0, 10.0));
        assert_eq!(sum_sq_bounds(&[1.0, 3.0], 2.0, 1.0).unwrap(), (8.0, 16.0));
        match sum_sq_bounds(&[1.0, 4.0], 2.0, 1.0) {
            Err(Error::Precondition { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn product_sum_examples() {
        assert_eq!(
            product_sum_bound(&[1.0, 1.0], &[1.0, 1.0], 1.0, 0.0, 1.0, 0.0).unwrap(),
            0.0
        );
        assert_eq!(product_sum_discrepancy(&[1.0, 1.0], &[1.0, 1.0]), 0.0);
        assert_eq!(
            product_sum_bound(&[0.0, 2.0], &[0.0, 2.0], 1.0, 1.0, 1.0, 1.0).unwrap(),
            4.0
        );
        assert_eq!(product_sum_discrepancy(&[0.0, 2.0], &[0.0, 2.0]), 2.0);
        let (xs, ys) = ([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]);
        assert_eq!(product_sum_bound(&xs, &ys, 2.0, 1.0, 2.0, 1.0).unwrap(), 6.0);
        assert_eq!(product_sum_discrepancy(&xs, &ys), 2.0);
        assert_eq!(
            product_sum_bound(&[1.0], &[], 0.0, 1.0, 0.0, 1.0),
            Err(Error::LengthMismatch(1, 0))
        );
        assert!(matches!(
            product_sum_bound(&[1.0, 5.0], &[1.0, 1.0], 1.0, 1.0, 1.0, 1.0),
            Err(Error::Precondition { index: 1, .. })
        ));
    }

    fn fabricated(n: usize, i: u64, q: f64, max_abs: f64) -> Snapshot {
        let p = p_at(n, i);
        Snapshot {
            n,
            seed: 0,
            i,
            p,
            edges: 0,
            triangles: q as u64,
            q_rel_dev: (q / ((n as f64 * p).powi(3) / 6.0) - 1.0).abs(),
            codeg_min: 0,
            codeg_max: (n as f64 * p * p) as u32,
            codeg_mean: 0.0,
            max_y_rel_dev: 0.0,
            max_y_abs_dev: max_abs,
            sampled_pairs: 1,
            full_scan: true,
            flags: StoppingFlags::default(),
        }
    }

    #[test]
    fn stopping_examples() {
        let n = 100;
        let g = Graph::new_complete(n);
        let s = capture(
            &g,
            0,
            0,
            &PairSample::Full,
            &StoppingConfig {
                kappa: 10.0,
                alpha: 1.0,
            },
        );
        assert!(!s.flags.tau_q);
        // co-degrees n-2 against np² = n
        assert_eq!(s.max_y_abs_dev, 2.0);
        assert!(!s.flags.tau_y);
        assert!(!s.flags.tau_c);
        for n in [16usize, 50] {
            let s = capture(
                &Graph::new_complete(n),
                0,
                0,
                &PairSample::Full,
                &StoppingConfig {
                    kappa: 10.0,
                    alpha: 1.0,
                },
            );
            assert!(!s.flags.tau_y, "n = {n}");
        }

        let i = 1000;
        let sc = scales_at(n, i).unwrap();
        let snap = fabricated(n, i, 2.0 * sc.predicted_q, 0.0);
        let kappa_max = sc.zeta.powi(-2);
        for kappa in [0.5 * kappa_max, kappa_max * (1.0 - 1e-9)] {
            assert!(stopping_detect(&snap, &StoppingConfig { kappa, alpha: 1.0 }).tau_q);
        }
        assert!(
            !stopping_detect(
                &snap,
                &StoppingConfig {
                    kappa: 2.0 * kappa_max,
                    alpha: 1.0
                }
            )
            .tau_q
        );
    }

    #[test]
    fn snapshot_grid_steps() {
        let pol = SnapshotPolicy {
            dp: 0.25,
            ..Default::default()
        };
        let n = 40;
        let mut i = 0;
        let mut ps = vec![];
        while i != u64::MAX && p_at(n, i) > 0.0 {
            i = pol.next_capture(n, i);
            if i != u64::MAX {
                ps.push(p_at(n, i));
            }
        }
        assert_eq!(ps.len(), 4);
        for (k, p) in ps.iter().enumerate() {
            let grid = 0.75 - 0.25 * k as f64;
            assert!(*p <= grid + 1e-12 && *p > grid - 6.0 / 1600.0 - 1e-12, "{ps:?}");
        }
    }

    #[test]
    fn csv_roundtrip() {
        let g = Graph::new_complete(30);
        let s = capture(
            &g,
            99,
            0,
            &PairSample::Sampled(sample_pairs(30, 99, 40)),
            &StoppingConfig::default(),
        );
        assert_eq!(s.sampled_pairs, 40);
        let text = format!("{CSV_HEADER}\n{}\n", csv_row(&s));
        assert_eq!(parse_csv(&text).unwrap(), vec![CsvRecord::from(&s)]);
        assert!(parse_csv("bogus\n").is_err());
    }
}
