//! Sidon sets over the integers.
//!
//! A Sidon set (equivalently, the marks of a Golomb ruler) is a finite set
//! of integers whose pairwise differences are all distinct. Sets here are
//! normalized: sorted ascending with least element 0, so `diameter` is the
//! largest element. The module provides validation, normalization,
//! difference masks, the greedy construction, a modular variant check, and
//! an exact branch-and-bound oracle for the minimal diameter at a given
//! size.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidonError {
    #[error("empty input cannot be normalized")]
    Empty,
    #[error("duplicate element {0}")]
    Duplicate(i64),
    #[error("difference {d} repeats: {p1:?} and {p2:?}")]
    DifferenceCollision {
        d: u64,
        p1: (i64, i64),
        p2: (i64, i64),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("modulus must be at least 1")]
    ModulusTooSmall,
    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
}

/// A normalized Sidon set: strictly increasing, least element 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SidonSet {
    elements: Vec<u64>,
}

impl fmt::Debug for SidonSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SidonSet{:?}", self.elements)
    }
}

impl fmt::Display for SidonSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.elements {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

impl SidonSet {
    /// Sorts, translates the minimum to 0, and verifies the Sidon property.
    /// Reports the first colliding difference pair on failure.
    pub fn normalize(elements: &[i64]) -> Result<SidonSet, SidonError> {
        if elements.is_empty() {
            return Err(SidonError::Empty);
        }
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(SidonError::Duplicate(w[0]));
            }
        }
        find_collision(&sorted)?;
        let min = sorted[0];
        let shifted = sorted.iter().map(|&e| (e - min) as u64).collect();
        Ok(SidonSet { elements: shifted })
    }

    /// Wraps an already-sorted, already-verified, zero-based element list.
    /// Callers are responsible for the invariants; debug builds re-verify.
    pub(crate) fn from_sorted_unchecked(elements: Vec<u64>) -> SidonSet {
        debug_assert!({
            let signed: Vec<i64> = elements.iter().map(|&e| e as i64).collect();
            find_collision(&signed).is_ok()
        });
        Self::from_sorted_trusted(elements)
    }

    /// Like `from_sorted_unchecked` but without the quadratic collision
    /// re-check even in debug builds, for hot paths whose inputs are Sidon
    /// by construction (windows of a modular Sidon set). Such callers are
    /// covered by independent verification of their end products instead.
    pub(crate) fn from_sorted_trusted(elements: Vec<u64>) -> SidonSet {
        debug_assert!(!elements.is_empty());
        debug_assert_eq!(elements[0], 0);
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        SidonSet { elements }
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn diameter(&self) -> u64 {
        *self.elements.last().expect("set is nonempty")
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, value: u64) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    /// The mirror image d - A, renormalized to start at 0.
    pub fn reflected(&self) -> SidonSet {
        let d = self.diameter();
        let elements = self.elements.iter().rev().map(|&e| d - e).collect();
        SidonSet { elements }
    }

    /// Lexicographically smaller of the set and its reflection.
    pub fn canonical(&self) -> SidonSet {
        let r = self.reflected();
        if r.elements < self.elements {
            r
        } else {
            self.clone()
        }
    }

    /// Bitmask of the positive differences that occur, up to `limit`.
    pub fn diff_mask(&self, limit: u64) -> DiffMask {
        let mut mask = DiffMask::new(limit);
        for (i, &a) in self.elements.iter().enumerate() {
            for &b in &self.elements[i + 1..] {
                let d = b - a;
                if d > limit {
                    break;
                }
                mask.set(d);
            }
        }
        mask
    }
}

fn find_collision(sorted: &[i64]) -> Result<(), SidonError> {
    let mut seen: std::collections::HashMap<u64, (i64, i64)> = std::collections::HashMap::new();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            let d = (b - a) as u64;
            if let Some(&prev) = seen.get(&d) {
                return Err(SidonError::DifferenceCollision {
                    d,
                    p1: prev,
                    p2: (a, b),
                });
            }
            seen.insert(d, (a, b));
        }
    }
    Ok(())
}

/// True iff all pairwise differences of the given integers are distinct.
/// Duplicated elements make the answer false. Empty and singleton inputs
/// are Sidon vacuously.
pub fn is_sidon(elements: &[i64]) -> bool {
    if elements.len() <= 1 {
        return true;
    }
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    find_collision(&sorted).is_ok()
}

/// Set of positive differences realized by a set, recorded up to `limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffMask {
    limit: u64,
    words: Vec<u64>,
}

impl DiffMask {
    fn new(limit: u64) -> DiffMask {
        let words = vec![0u64; (limit as usize + 64) / 64];
        DiffMask { limit, words }
    }

    fn set(&mut self, d: u64) {
        debug_assert!(d >= 1 && d <= self.limit);
        let idx = (d - 1) as usize;
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    /// Whether difference `d` occurs (d in 1..=limit).
    pub fn contains(&self, d: u64) -> bool {
        if d == 0 || d > self.limit {
            return false;
        }
        let idx = (d - 1) as usize;
        self.words[idx / 64] & (1 << (idx % 64)) != 0
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of distinct differences present.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Whether all ordered differences a - a' (a ≠ a') are distinct mod m.
pub fn is_modular_sidon(residues: &[u64], modulus: u64) -> Result<bool, ModularError> {
    if modulus == 0 {
        return Err(ModularError::ModulusTooSmall);
    }
    for &r in residues {
        if r >= modulus {
            return Err(ModularError::ResidueOutOfRange {
                residue: r,
                modulus,
            });
        }
    }
    // Duplicate residues collide immediately.
    let mut sorted = residues.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(residues.len() <= 1);
    }
    let mut seen = vec![false; modulus as usize];
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            let d = (b - a) as usize;
            // b - a and a - b mod m; for distinctness it suffices to check
            // each unordered pair in both directions.
            for diff in [d, modulus as usize - d] {
                if seen[diff] {
                    return Ok(false);
                }
                seen[diff] = true;
            }
        }
    }
    Ok(true)
}

/// Greedy Sidon set: starting from 0, repeatedly append the least integer
/// that keeps the set Sidon (the Mian-Chowla sequence shifted to start
/// at 0: 0, 1, 3, 7, 12, 20, ...).
pub fn greedy_sidon(k: usize) -> SidonSet {
    assert!(k >= 1, "greedy_sidon requires k >= 1");
    let mut elements: Vec<u64> = vec![0];
    let mut diffs: HashSet<u64> = HashSet::new();
    let mut x = 1u64;
    while elements.len() < k {
        let ok = {
            let mut new: Vec<u64> = Vec::with_capacity(elements.len());
            let mut fresh = true;
            for &e in &elements {
                let d = x - e;
                if diffs.contains(&d) || new.contains(&d) {
                    fresh = false;
                    break;
                }
                new.push(d);
            }
            fresh
        };
        if ok {
            for &e in &elements {
                diffs.insert(x - e);
            }
            elements.push(x);
        }
        x += 1;
    }
    SidonSet::from_sorted_unchecked(elements)
}

/// Node and wall-clock budget for the exhaustive oracle.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_time: Duration) -> SearchBudget {
        assert!(max_nodes > 0, "budget must allow at least one node");
        SearchBudget {
            max_nodes,
            max_time,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_nodes: 500_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

/// Budget ran out; carries the best (possibly non-optimal) ruler found.
#[derive(Debug, Clone, Error)]
#[error("search budget exceeded after {nodes} nodes; incumbent diameter {}", incumbent.diameter())]
pub struct BudgetExceeded {
    pub incumbent: SidonSet,
    pub nodes: u64,
}

/// Least integer d with d ≥ k² - 2k^{3/2} + k + √k - 1.
///
/// The bound equals (k²+k-1) - √(k·(2k-1)²); the subtracted radical's floor
/// is an exact integer square root, so the ceiling needs no floating point.
pub(crate) fn diameter_floor(k: u64) -> u64 {
    let k = k as u128;
    let a = k * k + k - 1;
    let r = k * (2 * k - 1) * (2 * k - 1);
    let s = crate::rational::isqrt_u128(r);
    a.saturating_sub(s) as u64
}

struct Bnb {
    k: usize,
    /// Best diameter found so far; we search strictly below it.
    ub: u64,
    best: Vec<u64>,
    marks: Vec<u64>,
    used: Vec<u64>,
    /// Minimal diameters for all sizes below k (exact, computed bottom-up).
    suffix_min: Vec<u64>,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    out_of_budget: bool,
    /// Early stop: the bound above is a hard floor for the optimum.
    floor: u64,
}

impl Bnb {
    fn diff_used(&self, d: u64) -> bool {
        let idx = (d - 1) as usize;
        self.used[idx / 64] & (1 << (idx % 64)) != 0
    }

    fn flip(&mut self, d: u64) {
        let idx = (d - 1) as usize;
        self.used[idx / 64] ^= 1 << (idx % 64);
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.ub == self.floor
    }

    fn recurse(&mut self) {
        if self.done() {
            return;
        }
        let i = self.marks.len();
        let last = *self.marks.last().expect("first mark placed");
        let remaining = self.k - i;
        // The suffix starting at the current mark is itself a Sidon set of
        // size remaining+1, so the final mark sits at least suffix_min
        // beyond some candidate; bound each candidate accordingly.
        let tail = self.suffix_min[remaining];
        if self.ub <= tail + 1 {
            return;
        }
        let hi = self.ub - 1 - tail;
        let mut v = last + 1;
        while v <= hi {
            self.nodes += 1;
            if self.nodes >= self.max_nodes
                || (self.nodes % 4096 == 0 && Instant::now() >= self.deadline)
            {
                self.out_of_budget = true;
                return;
            }
            let mut fresh = 0usize;
            let mut ok = true;
            for t in 0..i {
                let d = v - self.marks[t];
                if self.diff_used(d) {
                    ok = false;
                    break;
                }
                self.flip(d);
                fresh += 1;
            }
            // Mirror pruning: a ruler whose last gap is shorter than its
            // first gap is the reflection of one already scanned, so the
            // final mark may require v - last >= marks[1].
            if ok && remaining == 1 && i >= 2 && v - last < self.marks[1] {
                ok = false;
            }
            if ok {
                if remaining == 1 {
                    self.ub = v;
                    self.best = self.marks.clone();
                    self.best.push(v);
                } else {
                    self.marks.push(v);
                    self.recurse();
                    self.marks.pop();
                }
            }
            for t in (0..fresh).rev() {
                let d = v - self.marks[t];
                self.flip(d);
            }
            if self.done() {
                return;
            }
            // The upper bound may have dropped; re-clamp the scan.
            if self.ub <= tail + 1 {
                return;
            }
            let hi = self.ub - 1 - tail;
            if v >= hi {
                return;
            }
            v += 1;
        }
    }
}

/// Exact minimal diameter of a k-element Sidon set, with a witness in
/// canonical form. Branch-and-bound over ascending marks, seeded with the
/// greedy ruler, pruned by exact minimal diameters of all smaller sizes,
/// mirror symmetry, and the closed-form diameter floor.
pub fn exhaustive_optimal(
    k: usize,
    budget: &SearchBudget,
) -> Result<(u64, SidonSet), BudgetExceeded> {
    assert!(k >= 1, "exhaustive_optimal requires k >= 1");
    let deadline = Instant::now() + budget.max_time;
    let mut suffix_min: Vec<u64> = vec![0, 0]; // sizes 0 and 1
    let mut nodes_spent = 0u64;
    let mut result: Option<(u64, SidonSet)> = None;
    for size in 2..=k {
        let greedy = greedy_sidon(size);
        let ub0 = greedy.diameter();
        let mut bnb = Bnb {
            k: size,
            ub: ub0,
            best: greedy.elements().to_vec(),
            marks: vec![0],
            used: vec![0u64; (ub0 as usize + 64) / 64],
            suffix_min: suffix_min.clone(),
            nodes: 0,
            max_nodes: budget.max_nodes.saturating_sub(nodes_spent),
            deadline,
            out_of_budget: false,
            floor: diameter_floor(size as u64),
        };
        bnb.recurse();
        nodes_spent += bnb.nodes;
        if bnb.out_of_budget {
            // The incumbent handed back is always a k-element ruler: the
            // best one proven so far, or the greedy seed if the budget died
            // while still resolving smaller sizes.
            let incumbent = if size == k {
                SidonSet::from_sorted_unchecked(bnb.best.clone()).canonical()
            } else {
                greedy_sidon(k).canonical()
            };
            return Err(BudgetExceeded {
                incumbent,
                nodes: nodes_spent,
            });
        }
        suffix_min.push(bnb.ub);
        result = Some((
            bnb.ub,
            SidonSet::from_sorted_unchecked(bnb.best.clone()).canonical(),
        ));
    }
    Ok(result.unwrap_or_else(|| (0, SidonSet::from_sorted_unchecked(vec![0]))))
}

/// Reference enumerator: smallest diameter admitting a k-element Sidon set,
/// by depth-first enumeration of all ascending candidate sets with no
/// pruning beyond the Sidon property itself. Independent of the
/// branch-and-bound path; practical only for small k.
pub fn minimal_diameter_by_enumeration(k: usize, max_diameter: u64) -> Option<(u64, SidonSet)> {
    assert!(k >= 1);
    if k == 1 {
        return Some((0, SidonSet::from_sorted_unchecked(vec![0])));
    }
    fn extend(marks: &mut Vec<u64>, diffs: &mut HashSet<u64>, k: usize, target: u64) -> bool {
        if marks.len() == k {
            return marks.last() == Some(&target);
        }
        let last = *marks.last().unwrap();
        for v in last + 1..=target {
            let new: Vec<u64> = marks.iter().map(|&m| v - m).collect();
            let distinct = new.iter().all(|d| !diffs.contains(d))
                && new.iter().collect::<HashSet<_>>().len() == new.len();
            if distinct {
                for &d in &new {
                    diffs.insert(d);
                }
                marks.push(v);
                if extend(marks, diffs, k, target) {
                    return true;
                }
                marks.pop();
                for &d in &new {
                    diffs.remove(&d);
                }
            }
        }
        false
    }
    for target in (k as u64 - 1)..=max_diameter {
        let mut marks = vec![0u64];
        let mut diffs = HashSet::new();
        if extend(&mut marks, &mut diffs, k, target) {
            return Some((target, SidonSet::from_sorted_unchecked(marks).canonical()));
        }
    }
    None
}
