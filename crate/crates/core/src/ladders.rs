//! Triangular ladders: words over `{e, 0, 1}`, the labeled graphs they
//! generate, fans, the bounded family `B_M`, edge classes, envelope weights
//! and the forward/backward extension graphs built from ladder edges.
//!
//! Word positions are 1-based: `word.at(1)` is the first symbol. A ladder of
//! a word of length `k` has vertices `0..=k+1`; vertices 0 and 1 are the
//! roots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extgraph::{ExtensionGraph, Scaling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    E,
}

impl Symbol {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            'e' => Some(Symbol::E),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::E => 'e',
        }
    }
}

const ALPHABET: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::E];

/// Why `symbols` is not a ladder word, if it is not one.
fn word_defect(symbols: &[Symbol]) -> Option<&'static str> {
    use Symbol::*;
    if symbols.iter().take(2).any(|&s| s == Zero) {
        return Some("0 in position 1 or 2");
    }
    if symbols.iter().filter(|&&s| s == E).count() > 2 {
        return Some("more than two e");
    }
    for w in symbols.windows(2) {
        if w == [E, Zero] {
            return Some("contains e0");
        }
    }
    for w in symbols.windows(3) {
        if w == [E, One, Zero] {
            return Some("contains e10");
        }
        if w == [E, One, E] {
            return Some("contains e1e");
        }
    }
    None
}

/// Whether `w` is a ladder word. Characters outside `{e, 0, 1}` are an error.
pub fn validate_word(w: &str) -> Result<bool> {
    let symbols = parse_symbols(w)?;
    Ok(word_defect(&symbols).is_none())
}

fn parse_symbols(w: &str) -> Result<Vec<Symbol>> {
    w.chars()
        .map(|c| {
            Symbol::from_char(c).ok_or_else(|| Error::InvalidWord {
                word: w.to_string(),
                reason: format!("foreign character {c:?}"),
            })
        })
        .collect()
}

/// A word of the ladder alphabet satisfying the word rules (possibly empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LadderWord(Vec<Symbol>);

impl LadderWord {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if let Some(reason) = word_defect(&symbols) {
            return Err(Error::InvalidWord {
                word: symbols.iter().map(|s| s.as_char()).collect(),
                reason: reason.to_string(),
            });
        }
        Ok(Self(symbols))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Symbol at 1-based position `k`; `None` outside `1..=len`.
    pub fn at(&self, k: isize) -> Option<Symbol> {
        if k < 1 {
            return None;
        }
        self.0.get(k as usize - 1).copied()
    }

    fn is_e(&self, k: isize) -> bool {
        self.at(k) == Some(Symbol::E)
    }

    pub fn e_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::E).count()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    /// The `l`-prefix.
    pub fn prefix(&self, l: usize) -> LadderWord {
        LadderWord(self.0[..l.min(self.len())].to_vec())
    }

    /// The word with its last symbol removed.
    pub fn parent(&self) -> LadderWord {
        self.prefix(self.len().saturating_sub(1))
    }

    /// `self ∘ s`, if that is still a ladder word.
    pub fn push(&self, s: Symbol) -> Option<LadderWord> {
        let mut v = self.0.clone();
        v.push(s);
        LadderWord::new(v).ok()
    }

    /// `S_π / S_{π⁻}` as exponents: `n p^2`, or `n p` after an `e`.
    pub fn step_scaling(&self) -> Scaling {
        Scaling {
            n_exp: 1,
            p_exp: if self.last() == Some(Symbol::E) { 1 } else { 2 },
        }
    }

    /// `S_π = n^k p^{2k - s}` with `s` the number of `e`.
    pub fn scaling(&self) -> Scaling {
        let k = self.len() as i64;
        Scaling {
            n_exp: k,
            p_exp: 2 * k - self.e_count() as i64,
        }
    }
}

impl FromStr for LadderWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LadderWord::new(parse_symbols(s)?)
    }
}

impl fmt::Display for LadderWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl Ord for LadderWord {
    /// Length first, then lexicographic with `0 < 1 < e`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LadderWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for LadderWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LadderWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The labeled ladder graph of a non-empty word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    word: LadderWord,
    edges: Vec<(usize, usize)>,
}

pub fn build_ladder(word: &LadderWord) -> Result<Ladder> {
    if word.is_empty() {
        return Err(Error::InvalidWord {
            word: String::new(),
            reason: "empty word has no ladder".into(),
        });
    }
    let k = word.len();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); k + 2];
    let mut edges = Vec::new();
    let mut add = |a: usize, b: usize, nbrs: &mut Vec<Vec<usize>>| {
        nbrs[a].push(b);
        nbrs[b].push(a);
        edges.push((a.min(b), a.max(b)));
    };
    match word.at(1) {
        Some(Symbol::One) => {
            add(0, 2, &mut nbrs);
            add(1, 2, &mut nbrs);
        }
        Some(Symbol::E) => add(1, 2, &mut nbrs),
        _ => unreachable!("validated word"),
    }
    for step in 2..=k {
        let sym = word.at(step as isize).expect("in range");
        // neighbors of `step` before the new vertex is attached
        let back: Vec<usize> = nbrs[step].iter().copied().filter(|&x| x < step).collect();
        add(step, step + 1, &mut nbrs);
        match sym {
            Symbol::One => add(step - 1, step + 1, &mut nbrs),
            Symbol::Zero => {
                let other = back
                    .into_iter()
                    .find(|&x| x != step - 1)
                    .expect("0 follows a vertex with two back-neighbors");
                add(other, step + 1, &mut nbrs);
            }
            Symbol::E => {}
        }
    }
    edges.sort_unstable();
    Ok(Ladder {
        word: word.clone(),
        edges,
    })
}

impl Ladder {
    pub fn word(&self) -> &LadderWord {
        &self.word
    }

    /// Vertex count `k + 2`.
    pub fn v(&self) -> usize {
        self.word.len() + 2
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == x {
                    Some(b)
                } else if b == x {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// The ladder as an extension graph rooted at `{0, 1}`.
    pub fn as_extension(&self) -> ExtensionGraph {
        ExtensionGraph::on_range(self.v(), self.edges.clone(), vec![0, 1]).expect("0 and 1 are never adjacent")
    }
}

/// Fan anchored at vertex `a` with `f` spokes beyond the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub a: usize,
    pub f: usize,
}

/// Whether the fan at `a` uses the variant that follows an `e` at `a - 2`.
/// Anchors `a <= 2` have no position `a - 2` and use the plain variant.
fn follows_e(word: &LadderWord, a: usize) -> bool {
    word.is_e(a as isize - 2)
}

/// Largest fan with `f >= 3`, read off the word pattern `1 0…0`. Ties go to
/// the smallest anchor.
pub fn max_fan(word: &LadderWord) -> Option<Fan> {
    let k = word.len();
    let mut best: Option<Fan> = None;
    for a in 1..=k + 1 {
        if word.at(a as isize + 1) != Some(Symbol::One) {
            continue;
        }
        let mut zeros = 0;
        while word.at((a + 2 + zeros) as isize) == Some(Symbol::Zero) {
            zeros += 1;
        }
        let f = if follows_e(word, a) { zeros + 2 } else { zeros + 1 };
        if f >= 3 && best.is_none_or(|b| f > b.f) {
            best = Some(Fan { a, f });
        }
    }
    best
}

/// Same as [`max_fan`], read off the adjacency of the built ladder instead of
/// the word.
pub fn max_fan_by_adjacency(ladder: &Ladder) -> Option<Fan> {
    let word = ladder.word();
    let last = ladder.v() - 1;
    let mut best: Option<Fan> = None;
    for a in 1..=last {
        let mut run = 0;
        while a + run < last && ladder.has_edge(a, a + run + 1) {
            run += 1;
        }
        // plain: a+1..=a+f+1 adjacent; after e: a-1 and a+1..=a+f adjacent
        let f = if follows_e(word, a) {
            if ladder.has_edge(a - 1, a) {
                run
            } else {
                0
            }
        } else {
            run.saturating_sub(1)
        };
        if f >= 3 && best.is_none_or(|b| f > b.f) {
            best = Some(Fan { a, f });
        }
    }
    best
}

pub fn has_fan_of_size(word: &LadderWord, m: usize) -> bool {
    max_fan(word).is_some_and(|fan| fan.f >= m)
}

/// Longest word in `B_M` with `e_count` copies of `e`.
pub fn max_len(m: usize, e_count: usize) -> usize {
    match e_count {
        0 => 3 * m - 1,
        1 => 2 * m,
        _ => m + 1,
    }
}

/// Membership in `B_M`.
pub fn in_bm(word: &LadderWord, m: usize) -> bool {
    if word.is_empty() || has_fan_of_size(word, m) {
        return false;
    }
    let c = word.e_count();
    let cap = max_len(m, c);
    match c {
        0 => word.len() <= cap,
        1 | 2 => word.len() <= cap && !word.is_e(cap as isize),
        _ => false,
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 3 {
        Err(Error::InvalidM(m))
    } else {
        Ok(())
    }
}

/// `B_M` in length-then-lexicographic order (`0 < 1 < e`).
pub fn enumerate_bm(m: usize) -> Result<Vec<LadderWord>> {
    check_m(m)?;
    // B_M is prefix closed, so growing members one symbol at a time reaches
    // every member.
    let mut out = Vec::new();
    let mut layer = vec![LadderWord::empty()];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for w in &layer {
            for s in ALPHABET {
                if let Some(c) = w.push(s) {
                    if in_bm(&c, m) {
                        next.push(c);
                    }
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    OuterBoundary,
    SideBoundary,
    Initial,
    Interior,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeClass::OuterBoundary => "outer",
            EdgeClass::SideBoundary => "side",
            EdgeClass::Initial => "initial",
            EdgeClass::Interior => "interior",
        })
    }
}

/// Classification of ladder edge `yz` relative to `B_M`.
///
/// Edges with `y = 0` fall outside the boundary test and are reported as
/// [`EdgeClass::Initial`]; [`is_root_edge`] identifies them.
pub fn classify_edge(word: &LadderWord, y: usize, z: usize, m: usize) -> Result<EdgeClass> {
    check_m(m)?;
    if !in_bm(word, m) {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: format!("not in B_{m}"),
        });
    }
    let (y, z) = (y.min(z), y.max(z));
    let ladder = build_ladder(word)?;
    if !ladder.has_edge(y, z) {
        return Err(Error::NotLadderEdge {
            word: word.to_string(),
            y,
            z,
        });
    }
    if y == 0 || word.is_e(y as isize) {
        return Ok(EdgeClass::Initial);
    }
    let grown = word
        .prefix(z - 1)
        .push(if y < z - 1 { Symbol::Zero } else { Symbol::One });
    let boundary = grown.is_none_or(|g| !in_bm(&g, m));
    if !boundary {
        return Ok(EdgeClass::Interior);
    }
    let k = word.len();
    if z == k + 1 && k == max_len(m, word.e_count()) {
        Ok(EdgeClass::OuterBoundary)
    } else {
        Ok(EdgeClass::SideBoundary)
    }
}

/// Edge `(0, 2)` of a ladder starting with `1`.
pub fn is_root_edge(y: usize, z: usize) -> bool {
    y.min(z) == 0
}

/// Every edge of the ladder with its class, in edge order.
pub fn classify_all(word: &LadderWord, m: usize) -> Result<Vec<((usize, usize), EdgeClass)>> {
    let ladder = build_ladder(word)?;
    ladder
        .edges()
        .iter()
        .map(|&(y, z)| classify_edge(word, y, z, m).map(|c| ((y, z), c)))
        .collect()
}

/// Envelope weight `3^{3M - |π| - (M - 1) c}` with `c` the number of `e`.
pub fn omega(word: &LadderWord, m: usize) -> Result<u64> {
    check_m(m)?;
    if !in_bm(word, m) {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: format!("not in B_{m}"),
        });
    }
    let exp = 3 * m - word.len() - (m - 1) * word.e_count();
    Ok(3u64.pow(exp as u32))
}

fn extension_without_edges_inside(ladder: &Ladder, mut roots: Vec<usize>) -> Result<ExtensionGraph> {
    roots.sort_unstable();
    roots.dedup();
    let edges = ladder
        .edges()
        .iter()
        .copied()
        .filter(|(a, b)| !(roots.binary_search(a).is_ok() && roots.binary_search(b).is_ok()))
        .collect();
    ExtensionGraph::on_range(ladder.v(), edges, roots)
}

/// Backward extension from an outer boundary edge: the ladder with every
/// edge inside `{0, 1, y, z}` removed, rooted there.
pub fn backward_extension(word: &LadderWord, y: usize, z: usize, m: usize) -> Result<ExtensionGraph> {
    let (y, z) = (y.min(z), y.max(z));
    let class = classify_edge(word, y, z, m)?;
    if class != EdgeClass::OuterBoundary {
        return Err(Error::WrongEdgeClass {
            word: word.to_string(),
            y,
            z,
            class: class.to_string(),
        });
    }
    extension_without_edges_inside(&build_ladder(word)?, vec![0, 1, y, z])
}

/// Forward extension from a non-outer edge. Roots:
/// initial `{0..=y} ∪ {z}`; side `{0..=y} ∪ {z}`, or `{0..=y-2} ∪ {y, z}`
/// when `π(y-2) = e`; interior `{0..=z}`. Roots 0 and 1 are always kept.
pub fn forward_extension(word: &LadderWord, y: usize, z: usize, m: usize) -> Result<ExtensionGraph> {
    let (y, z) = (y.min(z), y.max(z));
    let class = classify_edge(word, y, z, m)?;
    let mut roots: Vec<usize> = vec![0, 1];
    match class {
        EdgeClass::OuterBoundary => {
            return Err(Error::WrongEdgeClass {
                word: word.to_string(),
                y,
                z,
                class: class.to_string(),
            })
        }
        EdgeClass::Initial => {
            roots.extend(0..=y);
            roots.push(z);
        }
        EdgeClass::SideBoundary => {
            if follows_e(word, y) {
                roots.extend(0..=y - 2);
                roots.extend([y, z]);
            } else {
                roots.extend(0..=y);
                roots.push(z);
            }
        }
        EdgeClass::Interior => roots.extend(0..=z),
    }
    extension_without_edges_inside(&build_ladder(word)?, roots)
}

/// `B_M` with every ladder built once.
#[derive(Clone, Debug)]
pub struct LadderFamily {
    pub m: usize,
    pub ladders: Vec<Ladder>,
}

impl LadderFamily {
    pub fn new(m: usize) -> Result<Self> {
        let ladders = enumerate_bm(m)?.iter().map(build_ladder).collect::<Result<Vec<_>>>()?;
        Ok(Self { m, ladders })
    }

    pub fn get(&self, word: &LadderWord) -> Option<&Ladder> {
        self.ladders
            .binary_search_by(|l| l.word().cmp(word))
            .ok()
            .map(|i| &self.ladders[i])
    }
}
