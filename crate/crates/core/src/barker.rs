//! Aperiodic autocorrelation of `±1` sequences, merit factors and Barker
//! search.
//!
//! The search fills positions from both ends inward (`0, n-1, 1, n-2, ...`)
//! so that long-lag sidelobes are fixed first. For each lag it tracks the
//! sum of already-determined products and the number of undetermined
//! products; once `|known| - undetermined >= 2` no completion can bring that
//! sidelobe back into `{-1, 0, 1}` and the branch is cut.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{flatness_report, FlatnessReport};
use crate::poly::SignSequence;

/// Largest length accepted by [`search_barker`].
pub const DEFAULT_SEARCH_CAP: usize = 30;
/// Prefix depth at which the search splits into parallel tasks.
pub const PARALLEL_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationProfile {
    pub n: usize,
    /// `c_1..c_{n-1}`.
    pub c: Vec<i64>,
    /// `n² / (2 Σ c_k²)`; `+∞` when there are no sidelobes or all vanish.
    #[serde(with = "merit_serde")]
    pub merit_factor: f64,
    pub sidelobe_energy: i64,
    pub is_barker: bool,
}

/// JSON has no infinity; the sentinel is written as the string `"inf"`.
mod merit_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            "inf".serialize(s)
        } else {
            v.serialize(s)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad merit factor {t:?}"))),
        }
    }
}

/// `c_k = Σ_{j=0}^{n-k-1} b_j b_{j+k}` for `k = 1..n-1`.
pub fn sidelobes(b: &[i8]) -> Vec<i64> {
    let n = b.len();
    (1..n)
        .map(|k| (0..n - k).map(|j| i64::from(b[j]) * i64::from(b[j + k])).sum())
        .collect()
}

pub fn autocorrelate_signs(b: &SignSequence) -> AutocorrelationProfile {
    let n = b.len();
    let c = sidelobes(b.as_slice());
    let energy: i64 = c.iter().map(|x| x * x).sum();
    let merit_factor = if energy == 0 {
        f64::INFINITY
    } else {
        (n * n) as f64 / (2 * energy) as f64
    };
    AutocorrelationProfile {
        n,
        is_barker: c.iter().all(|x| x.abs() <= 1),
        c,
        merit_factor,
        sidelobe_energy: energy,
    }
}

pub fn is_barker(b: &SignSequence) -> bool {
    is_barker_slice(b.as_slice())
}

fn is_barker_slice(b: &[i8]) -> bool {
    let n = b.len();
    (1..n).all(|k| {
        let c: i64 = (0..n - k).map(|j| i64::from(b[j]) * i64::from(b[j + k])).sum();
        c.abs() <= 1
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    /// Sorted lexicographically (`-1 < +1`).
    pub sequences_found: Vec<SignSequence>,
    pub nodes_visited: u64,
    pub symmetry_reduced: bool,
    /// Orbit representatives searched when `symmetry_reduced` is set.
    pub orbit_count: Option<usize>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Order in which positions are assigned.
fn fill_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        order.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            order.push(hi);
        }
    }
    order
}

struct Searcher {
    n: usize,
    order: Vec<usize>,
    seq: Vec<i8>,
    assigned: Vec<bool>,
    known: Vec<i64>,
    unknown: Vec<i64>,
    nodes: u64,
    found: Vec<Vec<i8>>,
    /// Positions with a forced value (symmetry reduction).
    fixed: Vec<Option<i8>>,
}

impl Searcher {
    fn new(n: usize, fixed: Vec<Option<i8>>) -> Self {
        let mut unknown = vec![0i64; n];
        for (k, u) in unknown.iter_mut().enumerate().skip(1) {
            *u = (n - k) as i64;
        }
        Self {
            n,
            order: fill_order(n),
            seq: vec![0; n],
            assigned: vec![false; n],
            known: vec![0; n],
            unknown,
            nodes: 0,
            found: Vec::new(),
            fixed,
        }
    }

    /// Assign `pos = v`; returns false (with state rolled back) if a
    /// sidelobe is forced out of range.
    fn assign(&mut self, pos: usize, v: i8) -> bool {
        self.seq[pos] = v;
        self.assigned[pos] = true;
        let mut ok = true;
        for q in 0..self.n {
            if q == pos || !self.assigned[q] {
                continue;
            }
            let k = pos.abs_diff(q);
            self.known[k] += i64::from(v) * i64::from(self.seq[q]);
            self.unknown[k] -= 1;
        }
        for k in 1..self.n {
            if self.known[k].abs() - self.unknown[k] >= 2 {
                ok = false;
                break;
            }
        }
        if !ok {
            self.unassign(pos);
        }
        ok
    }

    fn unassign(&mut self, pos: usize) {
        let v = self.seq[pos];
        self.assigned[pos] = false;
        for q in 0..self.n {
            if q == pos || !self.assigned[q] {
                continue;
            }
            let k = pos.abs_diff(q);
            self.known[k] -= i64::from(v) * i64::from(self.seq[q]);
            self.unknown[k] += 1;
        }
    }

    fn choices(&self, pos: usize) -> Vec<i8> {
        match self.fixed[pos] {
            Some(v) => vec![v],
            None => vec![-1, 1],
        }
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        if depth == self.n {
            self.found.push(self.seq.clone());
            return;
        }
        let pos = self.order[depth];
        for v in self.choices(pos) {
            if self.assign(pos, v) {
                self.dfs(depth + 1);
                self.unassign(pos);
            }
        }
    }

    /// All viable assignments of the first `depth` positions of the fill order.
    fn prefixes(&mut self, depth: usize, acc: &mut Vec<Vec<i8>>) {
        if depth == PARALLEL_DEPTH.min(self.n) {
            acc.push(self.order[..depth].iter().map(|&p| self.seq[p]).collect());
            return;
        }
        let pos = self.order[depth];
        for v in self.choices(pos) {
            if self.assign(pos, v) {
                self.prefixes(depth + 1, acc);
                self.unassign(pos);
            }
        }
    }
}

fn run_search(n: usize, fixed: Vec<Option<i8>>) -> (Vec<Vec<i8>>, u64) {
    let mut root = Searcher::new(n, fixed.clone());
    let mut prefixes = Vec::new();
    root.prefixes(0, &mut prefixes);
    let results: Vec<(Vec<Vec<i8>>, u64)> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut s = Searcher::new(n, fixed.clone());
            for (i, &v) in prefix.iter().enumerate() {
                let pos = s.order[i];
                let ok = s.assign(pos, v);
                debug_assert!(ok);
            }
            s.dfs(prefix.len());
            (s.found, s.nodes)
        })
        .collect();
    let mut found = Vec::new();
    let mut nodes = root.nodes;
    for (f, k) in results {
        found.extend(f);
        nodes += k;
    }
    found.sort();
    (found, nodes)
}

/// Negation, reversal and alternation generate a group of order 8.
pub fn symmetry_orbit(b: &[i8]) -> BTreeSet<Vec<i8>> {
    let s = SignSequence::new(b.to_vec()).expect("valid signs");
    let mut out = BTreeSet::new();
    for x in [s.clone(), s.reversed()] {
        for y in [x.clone(), x.alternated()] {
            for z in [y.clone(), y.negated()] {
                out.insert(z.as_slice().to_vec());
            }
        }
    }
    out
}

/// Exhaustive Barker search over `{±1}^n` with prefix pruning.
///
/// With `symmetry_reduce` the first two positions are pinned to `+1`
/// (negation and alternation act freely on them), orbit representatives
/// are taken under the full group of order 8, and the orbits are
/// re-expanded before reporting, so `sequences_found` is the same set either
/// way.
pub fn search_barker(n: usize, symmetry_reduce: bool) -> Result<SearchResult> {
    search_barker_capped(n, symmetry_reduce, DEFAULT_SEARCH_CAP)
}

pub fn search_barker_capped(n: usize, symmetry_reduce: bool, cap: usize) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::InvalidLength("Barker search needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::Capability(format!("Barker search length {n} exceeds cap {cap}")));
    }
    let start = Instant::now();
    let mut fixed = vec![None; n];
    if symmetry_reduce {
        fixed[0] = Some(1);
        if n >= 2 {
            fixed[1] = Some(1);
        }
    }
    let (raw, nodes) = run_search(n, fixed);
    let (sequences, orbit_count) = if symmetry_reduce {
        let mut reps = BTreeSet::new();
        let mut all = BTreeSet::new();
        for s in &raw {
            let orbit = symmetry_orbit(s);
            reps.insert(orbit.iter().next().unwrap().clone());
            all.extend(orbit);
        }
        (all.into_iter().collect::<Vec<_>>(), Some(reps.len()))
    } else {
        (raw, None)
    };
    Ok(SearchResult {
        n,
        sequences_found: sequences
            .into_iter()
            .map(|s| SignSequence::new(s).expect("search yields signs"))
            .collect(),
        nodes_visited: nodes,
        symmetry_reduced: symmetry_reduce,
        orbit_count,
        wall_time: start.elapsed(),
    })
}

/// Every Barker sequence of length `n` by testing all `2^n` sign patterns.
pub fn enumerate_barker_plain(n: usize) -> Vec<SignSequence> {
    assert!((1..=24).contains(&n), "plain enumeration is for small n");
    let mut out = Vec::new();
    let mut b = vec![0i8; n];
    for mask in 0u32..(1u32 << n) {
        for (j, x) in b.iter_mut().enumerate() {
            // bit set means +1; the most significant position is b_0 so the
            // loop visits sequences in lexicographic order
            *x = if mask >> (n - 1 - j) & 1 == 1 { 1 } else { -1 };
        }
        if is_barker_slice(&b) {
            out.push(SignSequence::new(b.clone()).unwrap());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRecord {
    pub n: usize,
    pub count: usize,
    pub exists: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurynStorerReport {
    pub n_max: usize,
    pub lengths: Vec<LengthRecord>,
    pub consistent: bool,
    pub nodes_visited: u64,
}

fn is_four_square(n: usize) -> bool {
    n.is_multiple_of(4) && {
        let q = n / 4;
        let r = (q as f64).sqrt().round() as usize;
        r * r == q
    }
}

/// Existence must satisfy: odd `n` implies `n <= 13`, and even `n > 2`
/// implies `n = 4m²`.
pub fn existence_consistent(n: usize, exists: bool) -> bool {
    if !exists {
        return true;
    }
    if n % 2 == 1 {
        n <= 13
    } else {
        n <= 2 || is_four_square(n)
    }
}

/// Census of Barker existence for every `n <= n_max`. Any length whose
/// existence contradicts [`existence_consistent`] is a hard failure.
pub fn turyn_storer_probe(n_max: usize) -> Result<TurynStorerReport> {
    if n_max > DEFAULT_SEARCH_CAP {
        return Err(Error::Capability(format!(
            "probe bound {n_max} exceeds search cap {DEFAULT_SEARCH_CAP}"
        )));
    }
    let mut lengths = Vec::with_capacity(n_max);
    let mut nodes = 0;
    for n in 1..=n_max {
        let r = search_barker(n, true)?;
        nodes += r.nodes_visited;
        let exists = !r.sequences_found.is_empty();
        let consistent = existence_consistent(n, exists);
        if !consistent {
            return Err(Error::Inconsistent(format!(
                "found a Barker sequence of length {n}, which violates the odd/4m² constraints"
            )));
        }
        lengths.push(LengthRecord { n, count: r.sequences_found.len(), exists, consistent });
    }
    Ok(TurynStorerReport { n_max, lengths, consistent: true, nodes_visited: nodes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarkerFlatness {
    #[serde(flatten)]
    pub report: FlatnessReport,
    /// `∫ (|P̃|² - 1)² dz = 2 Σ_{k>=1} c_k² / n²`.
    pub square_deviation: f64,
}

/// Flatness metrics of the Littlewood polynomial with coefficients `b`.
pub fn barker_flatness(b: &SignSequence, alpha: f64) -> Result<BarkerFlatness> {
    let p = b.to_polynomial();
    let report = flatness_report(&p, alpha, &crate::norm::DEFAULT_EPS_LADDER)?;
    let prof = autocorrelate_signs(b);
    let n = b.len() as f64;
    Ok(BarkerFlatness {
        report,
        square_deviation: 2.0 * prof.sidelobe_energy as f64 / (n * n),
    })
}

/// The two sequences printed alongside the record merit factors.
pub fn record_sequence_13() -> SignSequence {
    SignSequence::new(vec![1, -1, 1, -1, 1, 1, -1, -1, 1, 1, 1, 1, 1]).unwrap()
}

pub fn record_sequence_11() -> SignSequence {
    SignSequence::new(vec![1, -1, 1, 1, -1, 1, 1, 1, -1, -1, -1]).unwrap()
}
