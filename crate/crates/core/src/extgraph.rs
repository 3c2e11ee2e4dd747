//! Extension graphs: a graph with an independent set of distinguished
//! (root) vertices, with their scaling, density, subextensions, quotients,
//! balancedness and threshold times.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::p_at;

/// `n^n_exp · p^p_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scaling {
    pub n_exp: i64,
    pub p_exp: i64,
}

impl Scaling {
    pub const ONE: Scaling = Scaling { n_exp: 0, p_exp: 0 };

    pub fn ln_value(&self, n: f64, p: f64) -> f64 {
        let mut out = 0.0;
        if self.n_exp != 0 {
            out += self.n_exp as f64 * n.ln();
        }
        if self.p_exp != 0 {
            out += self.p_exp as f64 * p.ln();
        }
        out
    }

    pub fn value(&self, n: f64, p: f64) -> f64 {
        n.powi(self.n_exp as i32) * p.powi(self.p_exp as i32)
    }
}

impl std::ops::Mul for Scaling {
    type Output = Scaling;
    fn mul(self, o: Scaling) -> Scaling {
        Scaling {
            n_exp: self.n_exp + o.n_exp,
            p_exp: self.p_exp + o.p_exp,
        }
    }
}

impl std::ops::Div for Scaling {
    type Output = Scaling;
    fn div(self, o: Scaling) -> Scaling {
        Scaling {
            n_exp: self.n_exp - o.n_exp,
            p_exp: self.p_exp - o.p_exp,
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n^{} p^{}", self.n_exp, self.p_exp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionGraph {
    vertices: Vec<usize>,
    edges: Vec<(usize, usize)>,
    roots: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// `n^{-1/m_H}`.
    pub p_star: f64,
    /// Smallest integer step meeting the threshold condition.
    pub i_star: u64,
}

impl ExtensionGraph {
    /// Validates and normalizes: labels sorted, edges as `(min, max)` pairs
    /// sorted and deduplicated.
    pub fn new(vertices: Vec<usize>, edges: Vec<(usize, usize)>, roots: Vec<usize>) -> Result<Self> {
        let vset: BTreeSet<usize> = vertices.into_iter().collect();
        let rset: BTreeSet<usize> = roots.into_iter().collect();
        if let Some(r) = rset.iter().find(|r| !vset.contains(r)) {
            return Err(Error::InvalidExtension(format!("root {r} is not a vertex")));
        }
        let mut es = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidExtension(format!("self-loop at {a}")));
            }
            if !vset.contains(&a) || !vset.contains(&b) {
                return Err(Error::InvalidExtension(format!(
                    "edge ({a}, {b}) leaves the vertex set"
                )));
            }
            if rset.contains(&a) && rset.contains(&b) {
                return Err(Error::NotIndependent(a.min(b), a.max(b)));
            }
            es.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            vertices: vset.into_iter().collect(),
            edges: es.into_iter().collect(),
            roots: rset.into_iter().collect(),
        })
    }

    /// Vertices `0..v`, roots as given.
    pub fn on_range(v: usize, edges: Vec<(usize, usize)>, roots: Vec<usize>) -> Result<Self> {
        Self::new((0..v).collect(), edges, roots)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn v(&self) -> usize {
        self.vertices.len()
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn iota(&self) -> usize {
        self.roots.len()
    }

    /// Non-root vertices, ascending.
    pub fn free_vertices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .copied()
            .filter(|x| self.roots.binary_search(x).is_err())
            .collect()
    }

    /// `S_H = n^{v - ι} p^{e}`.
    pub fn scaling(&self) -> Scaling {
        Scaling {
            n_exp: (self.v() - self.iota()) as i64,
            p_exp: self.e() as i64,
        }
    }

    /// `m_H = e / (v - ι)`.
    pub fn density(&self) -> Result<Ratio<i64>> {
        let free = self.v() - self.iota();
        if free == 0 {
            return Err(Error::UndefinedDensity);
        }
        Ok(Ratio::new(self.e() as i64, free as i64))
    }

    /// Subextension induced on `roots ∪ keep`.
    pub fn induced(&self, keep: &[usize]) -> Result<Self> {
        let mut vs: BTreeSet<usize> = self.roots.iter().copied().collect();
        vs.extend(keep.iter().copied());
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| vs.contains(a) && vs.contains(b))
            .collect();
        Self::new(vs.into_iter().collect(), edges, self.roots.clone())
    }

    /// Induced subextensions, one per subset of non-root vertices, starting
    /// with the edgeless `1` and ending with `H` itself.
    pub fn subextensions(&self) -> impl Iterator<Item = ExtensionGraph> + '_ {
        let free = self.free_vertices();
        assert!(free.len() < 32, "too many free vertices to enumerate");
        (0u32..(1 << free.len())).map(move |mask| {
            let keep: Vec<usize> = free
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &x)| x)
                .collect();
            self.induced(&keep).expect("induced subgraph of a valid extension")
        })
    }

    pub fn is_subextension_of(&self, h: &ExtensionGraph) -> bool {
        self.roots == h.roots
            && self.vertices.iter().all(|x| h.vertices.binary_search(x).is_ok())
            && self.edges.iter().all(|e| h.edges.binary_search(e).is_ok())
    }

    /// `H / K = (V_H, E_H \ E_K)` with roots `V_K`.
    pub fn quotient(&self, k: &ExtensionGraph) -> Result<ExtensionGraph> {
        if !k.is_subextension_of(self) {
            return Err(Error::InvalidExtension("not a subextension".into()));
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| k.edges.binary_search(e).is_err())
            .collect();
        Self::new(self.vertices.clone(), edges, k.vertices.clone())
    }

    /// `m_H >= m_K` for every subextension `K` with a free vertex; with
    /// `strict`, `m_H > m_K` for every proper one (`E_K ⊊ E_H`).
    pub fn is_balanced(&self, strict: bool) -> Result<bool> {
        let m = self.density()?;
        for k in self.subextensions() {
            if k.v() == k.iota() {
                continue;
            }
            let mk = k.density()?;
            if mk > m {
                return Ok(false);
            }
            if strict && k.e() < self.e() && mk == m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First integer step `i` with `S_H(n, p(i)) <= ζ^{-r}`; `r = None` means
    /// `S_H <= 1`. The `r = None`/`r = 0` case is decided in exact integer
    /// arithmetic.
    pub fn threshold_times(&self, n: usize, r: Option<f64>) -> Result<Threshold> {
        if self.e() == 0 {
            return Err(Error::InvalidExtension("threshold needs at least one edge".into()));
        }
        let s = self.scaling();
        let p_star = (n as f64).powf(-1.0 / ratio_f64(self.density()?));
        let n2 = (n as u64) * (n as u64);
        // largest i with p(i) > 0
        let i_max = (n2 - 1) / 6;
        let r = r.unwrap_or(0.0);
        let holds: Box<dyn Fn(u64) -> bool> = if r == 0.0 {
            let lhs_n = BigUint::from(n).pow(s.n_exp as u32);
            let rhs = BigUint::from(n2).pow(s.p_exp as u32);
            Box::new(move |i| &lhs_n * BigUint::from(n2 - 6 * i).pow(s.p_exp as u32) <= rhs)
        } else {
            let nf = n as f64;
            let (a, b) = (s.n_exp as f64, s.p_exp as f64);
            Box::new(move |i| {
                let p = p_at(n, i);
                (a - r / 2.0) * nf.ln() + (b - r) * p.ln() + r * nf.ln().ln() <= 0.0
            })
        };
        if holds(0) {
            return Ok(Threshold { p_star, i_star: 0 });
        }
        if (s.p_exp as f64) - r <= 0.0 || !holds(i_max) {
            return Err(Error::ThresholdUnreachable);
        }
        let (mut lo, mut hi) = (0u64, i_max);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Threshold { p_star, i_star: hi })
    }
}

pub fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
