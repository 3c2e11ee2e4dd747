//! Exact proportional sampling over edge slots, and uniform triangle draws.
//!
//! [`WeightedSampler`] keeps integer weights in a 64-ary sum tree: every
//! internal node stores the sum of up to 64 children. A point update touches
//! one node per level (three levels suffice for `n` in the low thousands) and
//! a draw scans at most 64 entries per level. All arithmetic is on integers,
//! so a draw is a pure function of the integer `r` it is given.
//!
//! A uniform triangle is drawn by picking the edge `uv` with probability
//! `Y_uv / 3Q` and then one of its `Y_uv` common neighbors uniformly. The
//! offset of `r` inside the chosen slot is already uniform on `[0, Y_uv)`, so
//! it selects the common neighbor without a second draw.

use crate::dyngraph::Graph;
use crate::error::{Error, Result};
use crate::rng::RunRng;

const FANOUT: usize = 64;

#[derive(Clone, Debug)]
pub struct WeightedSampler {
    weights: Vec<u32>,
    // levels[0] sums blocks of `weights`; the last level has at most FANOUT entries
    levels: Vec<Vec<u64>>,
    total: u64,
}

impl WeightedSampler {
    /// Sampler with `capacity` zero-weight slots.
    pub fn new(capacity: usize) -> Self {
        let mut levels = Vec::new();
        let mut len = capacity;
        while len > FANOUT {
            len = len.div_ceil(FANOUT);
            levels.push(vec![0; len]);
        }
        Self {
            weights: vec![0; capacity],
            levels,
            total: 0,
        }
    }

    /// Sampler over the edge slots of `g`, each weighted by its co-degree.
    pub fn from_graph(g: &Graph) -> Self {
        let mut s = Self::new(g.pair_count());
        for (u, v) in g.edges() {
            let id = g.pair_id(u, v);
            s.weights[id] = g.codegree_pair(u, v);
        }
        s.rebuild();
        s
    }

    fn rebuild(&mut self) {
        let mut below: Vec<u64> = self.weights.iter().map(|&w| w as u64).collect();
        for level in self.levels.iter_mut() {
            for (j, slot) in level.iter_mut().enumerate() {
                *slot = below[j * FANOUT..((j + 1) * FANOUT).min(below.len())].iter().sum();
            }
            below = level.clone();
        }
        self.total = below.iter().sum();
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, slot: usize) -> Result<u32> {
        self.weights.get(slot).copied().ok_or(Error::SlotOutOfRange {
            slot,
            capacity: self.capacity(),
        })
    }

    pub fn set_weight(&mut self, slot: usize, w: u32) -> Result<()> {
        let old = self.weight(slot)?;
        if w >= old {
            self.apply(slot, (w - old) as u64, true);
        } else {
            self.apply(slot, (old - w) as u64, false);
        }
        self.weights[slot] = w;
        Ok(())
    }

    /// Lowers the weight of `slot` by one. Caller guarantees the slot is in
    /// range and positive.
    #[inline]
    pub(crate) fn decrement(&mut self, slot: usize) {
        debug_assert!(self.weights[slot] > 0);
        self.weights[slot] -= 1;
        self.apply(slot, 1, false);
    }

    #[inline]
    fn apply(&mut self, slot: usize, delta: u64, up: bool) {
        let mut idx = slot;
        for level in self.levels.iter_mut() {
            idx /= FANOUT;
            if up {
                level[idx] += delta;
            } else {
                level[idx] -= delta;
            }
        }
        if up {
            self.total += delta;
        } else {
            self.total -= delta;
        }
    }

    /// The slot `i` with `cum(i-1) <= r < cum(i)`.
    pub fn sample_index(&self, r: u64) -> Result<usize> {
        self.sample_with_offset(r).map(|(slot, _)| slot)
    }

    /// Like [`WeightedSampler::sample_index`], also returning `r - cum(i-1)`.
    pub fn sample_with_offset(&self, r: u64) -> Result<(usize, u32)> {
        if self.total == 0 {
            return Err(Error::EmptySampler);
        }
        if r >= self.total {
            return Err(Error::Precondition {
                index: 0,
                reason: format!("r = {r} not below total {}", self.total),
            });
        }
        let mut r = r;
        let mut block = 0usize;
        for level in self.levels.iter().rev() {
            let start = block * FANOUT;
            let end = (start + FANOUT).min(level.len());
            block = end - 1;
            for (j, &s) in level[start..end].iter().enumerate() {
                if r < s {
                    block = start + j;
                    break;
                }
                r -= s;
            }
        }
        let start = block * FANOUT;
        let end = (start + FANOUT).min(self.weights.len());
        for (j, &w) in self.weights[start..end].iter().enumerate() {
            let w = w as u64;
            if r < w {
                return Ok((start + j, r as u32));
            }
            r -= w;
        }
        unreachable!("sum tree out of sync with weights")
    }

    /// Draws `r` uniformly from `[0, total)` and resolves it to a slot.
    pub fn draw(&self, rng: &mut RunRng) -> Result<(usize, u32)> {
        if self.total == 0 {
            return Err(Error::EmptySampler);
        }
        self.sample_with_offset(rng.below(self.total))
    }
}

/// A uniformly random triangle of `g` as `[u, v, w]` with `u < v < w`, or
/// `None` when `g` is triangle-free. `sampler` must be synchronized with `g`.
pub fn draw_uniform_triangle(g: &Graph, sampler: &WeightedSampler, rng: &mut RunRng) -> Option<[usize; 3]> {
    debug_assert_eq!(sampler.total(), 3 * g.triangle_count());
    let (slot, offset) = sampler.draw(rng).ok()?;
    let (u, v) = g.pair_from_id(slot);
    let w = g
        .kth_common_neighbor(u, v, offset)
        .expect("sampler weight exceeds co-degree");
    let mut t = [u, v, w];
    t.sort_unstable();
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn with_weights(ws: &[u32]) -> WeightedSampler {
        let mut s = WeightedSampler::new(ws.len());
        for (i, &w) in ws.iter().enumerate() {
            s.set_weight(i, w).unwrap();
        }
        s
    }

    #[test]
    fn set_weight_examples() {
        let mut s = with_weights(&[2, 0, 3]);
        s.set_weight(0, 0).unwrap();
        assert_eq!(s.total(), 3);
        let mut s = with_weights(&[0, 0]);
        s.set_weight(1, 5).unwrap();
        assert_eq!(s.total(), 5);
        s.set_weight(1, 5).unwrap();
        assert_eq!(s.total(), 5);
        assert_eq!(s.set_weight(2, 1), Err(Error::SlotOutOfRange { slot: 2, capacity: 2 }));
    }

    #[test]
    fn sample_index_examples() {
        let s = with_weights(&[2, 0, 3]);
        // r = 1.9 in the real-valued formulation lands in [0, 2)
        assert_eq!(s.sample_index(1).unwrap(), 0);
        assert_eq!(s.sample_index(2).unwrap(), 2);
        assert_eq!(s.sample_index(4).unwrap(), 2);
        let s = with_weights(&[7]);
        for r in 0..7 {
            assert_eq!(s.sample_index(r).unwrap(), 0);
        }
        assert_eq!(WeightedSampler::new(3).sample_index(0), Err(Error::EmptySampler));
    }

    #[test]
    fn multi_level_tree_matches_linear_scan() {
        let cap = 64 * 64 * 3 + 17;
        let mut s = WeightedSampler::new(cap);
        assert_eq!(s.levels.len(), 2);
        let mut rng = RunRng::new(5, Stream::Process);
        let mut ws = vec![0u32; cap];
        for _ in 0..2000 {
            let i = rng.index(cap);
            let w = rng.below(9) as u32;
            ws[i] = w;
            s.set_weight(i, w).unwrap();
        }
        assert_eq!(s.total(), ws.iter().map(|&w| w as u64).sum::<u64>());
        let mut cum = 0u64;
        for (i, &w) in ws.iter().enumerate() {
            for r in [cum, cum + w as u64 / 2, (cum + w as u64).saturating_sub(1)] {
                if w > 0 {
                    assert_eq!(s.sample_with_offset(r).unwrap(), (i, (r - cum) as u32));
                }
            }
            cum += w as u64;
        }
    }

    #[test]
    fn single_triangle_always_drawn() {
        let g = Graph::from_edges(5, &[(1, 3), (3, 4), (1, 4), (0, 2)]).unwrap();
        let s = WeightedSampler::from_graph(&g);
        assert_eq!(s.total(), 3);
        let mut rng = RunRng::new(9, Stream::Process);
        for _ in 0..50 {
            assert_eq!(draw_uniform_triangle(&g, &s, &mut rng), Some([1, 3, 4]));
        }
        let empty = Graph::new_empty(4);
        assert_eq!(
            draw_uniform_triangle(&empty, &WeightedSampler::from_graph(&empty), &mut rng),
            None
        );
    }

    #[test]
    fn k4_triangles_each_reached_with_probability_one_quarter() {
        // Every r in [0, 12) maps to one (edge, common neighbor) pair; each
        // triangle is hit by exactly 3 of the 12 values.
        let g = Graph::new_complete(4);
        let s = WeightedSampler::from_graph(&g);
        assert_eq!(s.total(), 12);
        let mut hits = std::collections::BTreeMap::new();
        for r in 0..12 {
            let (slot, off) = s.sample_with_offset(r).unwrap();
            let (u, v) = g.pair_from_id(slot);
            let w = g.kth_common_neighbor(u, v, off).unwrap();
            let mut t = [u, v, w];
            t.sort();
            *hits.entry(t).or_insert(0) += 1;
        }
        assert_eq!(hits.len(), 4);
        assert!(hits.values().all(|&c| c == 3));
    }
}
