//! Dilation/window search for record Sidon sets at every size.
//!
//! Every unit c mod m maps a modular Sidon set to another one (dilation),
//! and every run of k consecutive residues (cyclically, lifting the wrap
//! by +m) is an integer Sidon set of k elements. Scanning all dilations
//! of all construction sets and taking the best k-window per size yields
//! upper bounds on the minimal diameter s_k, hence lower bounds on b_k in
//! s_k = k² - b_k·k^{3/2}.
//!
//! Results merge by a total order (diameter first, then canonical witness,
//! then provenance), so the final table does not depend on the parallel
//! schedule, and scanning a dilation c or its negation m-c produces the
//! same table: negation mirrors every window and the canonical witness is
//! reflection-invariant, so by default only c ≤ m/2 is scanned.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::constructions::{construct, Construction, ModularSidonSet, CONSTRUCTION_CAP};
use crate::gf::{is_prime, prime_power};
use crate::rational::{big, decimal_over_sqrt};
use crate::set::SidonSet;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("dilation {c} is not coprime to modulus {m}")]
    NotCoprime { c: u64, m: u64 },
    #[error("window size {k} exceeds set size {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("cache corrupt at {path} line {line}: {reason}")]
    CacheCorrupt {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("ruler at line {line} is not a Sidon set")]
    NotSidon { line: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Construct(#[from] crate::constructions::ConstructError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Where a record's witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Constructed {
        construction: Construction,
        q: u64,
        modulus: u64,
        dilation: u64,
        window_start: u64,
    },
    External {
        line: u64,
    },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Constructed {
                construction,
                q,
                modulus,
                dilation,
                window_start,
            } => write!(
                f,
                "{construction} q={q} m={modulus} c={dilation} w={window_start}"
            ),
            Source::External { line } => write!(f, "external line {line}"),
        }
    }
}

/// Best known k-element ruler and where it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchRecord {
    pub k: usize,
    pub diameter: u64,
    /// Canonical form (lexicographic min of the ruler and its mirror).
    pub witness: SidonSet,
    pub source: Source,
}

impl SearchRecord {
    /// Merge order: smaller diameter wins; ties resolve by witness, then
    /// source, so min-merging is schedule-independent.
    fn merge_key(&self) -> (u64, &[u64], Source) {
        (self.diameter, self.witness.elements(), self.source)
    }

    /// Lower bound on b_k implied by this record, (k² - D)/k^{3/2},
    /// rendered to `places` decimals by exact integer square-root
    /// bracketing (floored, no floating point).
    pub fn bk_lower_bound_decimal(&self, places: usize) -> String {
        let k = self.k as i128;
        let num = big(k * k - self.diameter as i128);
        decimal_over_sqrt(&num, &big(1), &big(k * k * k), places)
    }

    /// Exact test that the b_k lower bound lies in (lo/den, hi/den), e.g.
    /// (0, 22)/10 for the sanity envelope 0 < b_k < 2.2.
    pub fn bk_in_open_interval(&self, lo: i128, hi: i128, den: i128) -> bool {
        assert!(den > 0);
        let k = self.k as i128;
        let num = k * k - self.diameter as i128;
        let k3 = k * k * k;
        // num/√k³ > lo/den  ⟺  num·den > lo·√k³
        let gt_lo = cmp_against_sqrt(num * den, lo, k3) == std::cmp::Ordering::Greater;
        let lt_hi = cmp_against_sqrt(num * den, hi, k3) == std::cmp::Ordering::Less;
        gt_lo && lt_hi
    }
}

/// Compares a against b·√c exactly, for c ≥ 0. All values here stay far
/// below i128 overflow (|a|, |b| < 2^40 and c < 2^63 in every caller).
fn cmp_against_sqrt(a: i128, b: i128, c: i128) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    debug_assert!(c >= 0);
    let rhs_negative = b < 0 && c > 0;
    match (a < 0, rhs_negative) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => (a * a).cmp(&(b * b * c)),
        (true, true) => (b * b * c).cmp(&(a * a)),
    }
}

/// Table of best records keyed by k, merged monotonically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchTable {
    records: BTreeMap<usize, SearchRecord>,
}

impl SearchTable {
    pub fn new() -> SearchTable {
        SearchTable::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&SearchRecord> {
        self.records.get(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SearchRecord> {
        self.records.values()
    }

    /// Keeps the better of the existing and new record for its k.
    pub fn merge_record(&mut self, rec: SearchRecord) {
        match self.records.get_mut(&rec.k) {
            Some(cur) => {
                if rec.merge_key() < cur.merge_key() {
                    *cur = rec;
                }
            }
            None => {
                self.records.insert(rec.k, rec);
            }
        }
    }

    pub fn merge(&mut self, other: SearchTable) {
        for (_, rec) in other.records {
            self.merge_record(rec);
        }
    }

    /// Reads a cache file, verifying every row; any malformed or
    /// inconsistent row is an error, never silently dropped.
    pub fn read_tsv(path: &Path) -> Result<SearchTable, SearchError> {
        let text = fs::read_to_string(path).map_err(|source| SearchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let corrupt = |line: usize, reason: String| SearchError::CacheCorrupt {
            path: path.display().to_string(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CACHE_HEADER => {}
            Some((_, h)) => return Err(corrupt(1, format!("bad header {h:?}"))),
            None => return Ok(SearchTable::new()),
        }
        let mut table = SearchTable::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 8 {
                return Err(corrupt(lineno, format!("expected 8 columns, got {}", cols.len())));
            }
            let k: usize = cols[0]
                .parse()
                .map_err(|_| corrupt(lineno, format!("bad k {:?}", cols[0])))?;
            let diameter: u64 = cols[1]
                .parse()
                .map_err(|_| corrupt(lineno, format!("bad diameter {:?}", cols[1])))?;
            let source = if cols[2] == "external" {
                let line_no: u64 = cols[3]
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad external line {:?}", cols[3])))?;
                Source::External { line: line_no }
            } else {
                let construction = Construction::parse(cols[2])
                    .ok_or_else(|| corrupt(lineno, format!("unknown construction {:?}", cols[2])))?;
                let q = cols[3]
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad q {:?}", cols[3])))?;
                let modulus = cols[4]
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad modulus {:?}", cols[4])))?;
                let dilation = cols[5]
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad dilation {:?}", cols[5])))?;
                let window_start = cols[6]
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad window start {:?}", cols[6])))?;
                Source::Constructed {
                    construction,
                    q,
                    modulus,
                    dilation,
                    window_start,
                }
            };
            let elems: Result<Vec<i64>, _> =
                cols[7].split(' ').map(|t| t.parse::<i64>()).collect();
            let elems = elems.map_err(|_| corrupt(lineno, format!("bad ruler {:?}", cols[7])))?;
            let witness = SidonSet::normalize(&elems)
                .map_err(|e| corrupt(lineno, format!("ruler is not Sidon: {e}")))?;
            if witness.k() != k {
                return Err(corrupt(lineno, format!("k={} but ruler has {} marks", k, witness.k())));
            }
            if witness.diameter() != diameter {
                return Err(corrupt(
                    lineno,
                    format!("diameter={} but ruler spans {}", diameter, witness.diameter()),
                ));
            }
            table.merge_record(SearchRecord {
                k,
                diameter,
                witness,
                source,
            });
        }
        Ok(table)
    }

    /// Writes the table atomically (temp file + rename).
    pub fn write_tsv(&self, path: &Path) -> Result<(), SearchError> {
        let io_err = |source: std::io::Error| SearchError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut out = String::new();
        out.push_str(CACHE_HEADER);
        out.push('\n');
        for rec in self.records.values() {
            let (cname, q, m, c, w) = match rec.source {
                Source::Constructed {
                    construction,
                    q,
                    modulus,
                    dilation,
                    window_start,
                } => (construction.to_string(), q, modulus, dilation, window_start),
                Source::External { line } => ("external".to_string(), line, 0, 0, 0),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                rec.k, rec.diameter, cname, q, m, c, w, rec.witness
            ));
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(io_err)?;
            f.write_all(out.as_bytes()).map_err(io_err)?;
            f.sync_all().map_err(io_err)?;
        }
        fs::rename(&tmp, path).map_err(io_err)
    }
}

const CACHE_HEADER: &str = "k\tdiameter\tconstruction\tq\tm\tdilation\twindow_start\truler";

/// Multiplies every residue by a unit c mod m. Dilation is an automorphism
/// of the difference structure, so the result is again modular Sidon.
pub fn dilate(set: &ModularSidonSet, c: u64) -> Result<ModularSidonSet, SearchError> {
    let m = set.modulus();
    let c = c % m;
    if c.gcd(&m) != 1 {
        return Err(SearchError::NotCoprime { c, m });
    }
    let mut residues: Vec<u64> = set.residues().iter().map(|&a| a * c % m).collect();
    residues.sort_unstable();
    Ok(ModularSidonSet::from_parts_trusted(
        residues,
        m,
        *set.provenance(),
    ))
}

/// Residues lifted past the wrap: lifted[j] = r[j] for j < n and
/// r[j-n] + m beyond, long enough for windows up to size `top`.
fn lift_residues(set: &ModularSidonSet, top: usize) -> Vec<u64> {
    let r = set.residues();
    let m = set.modulus();
    let mut lifted = Vec::with_capacity(r.len() + top - 1);
    lifted.extend_from_slice(r);
    lifted.extend(r[..top - 1].iter().map(|&v| v + m));
    lifted
}

fn window_witness(lifted: &[u64], i: usize, k: usize) -> SidonSet {
    let base = lifted[i];
    let elems: Vec<u64> = lifted[i..i + k].iter().map(|&v| v - base).collect();
    // Windows of a modular Sidon set are Sidon: their pairwise
    // differences stay in (0, m) and are distinct mod m.
    SidonSet::from_sorted_trusted(elems).canonical()
}

/// Minimum-diameter window of size k over the lifted residues, witness in
/// canonical form. Diameter ties prefer the lexicographically smaller
/// canonical witness (which makes the choice invariant under negating the
/// whole set), then the smaller start index.
fn scan_one_size(lifted: &[u64], n: usize, k: usize) -> (u64, SidonSet, usize) {
    let mut best_i = 0usize;
    let mut best_d = lifted[k - 1] - lifted[0];
    let mut best_w: Option<SidonSet> = None;
    for (i, (&lo, &hi)) in lifted.iter().zip(&lifted[k - 1..]).enumerate().take(n).skip(1) {
        let d = hi - lo;
        if d > best_d {
            continue;
        }
        if d < best_d {
            best_d = d;
            best_i = i;
            best_w = None;
            continue;
        }
        let cur = best_w.take().unwrap_or_else(|| window_witness(lifted, best_i, k));
        let cand = window_witness(lifted, i, k);
        if cand.elements() < cur.elements() {
            best_i = i;
            best_w = Some(cand);
        } else {
            best_w = Some(cur);
        }
    }
    let witness = best_w.unwrap_or_else(|| window_witness(lifted, best_i, k));
    (best_d, witness, best_i)
}

/// Best window of k cyclically consecutive residues: minimum diameter with
/// the wrap lifted by +m, witness in canonical form.
pub fn best_k_window(
    set: &ModularSidonSet,
    k: usize,
) -> Result<(u64, SidonSet, u64), SearchError> {
    let n = set.len();
    if k > n || k == 0 {
        return Err(SearchError::KTooLarge { k, n });
    }
    let lifted = lift_residues(set, k);
    let (d, witness, start) = scan_one_size(&lifted, n, k);
    Ok((d, witness, start as u64))
}

/// What to search: parameter range, constructions, window sizes, dilation
/// strategy, and an optional cache to resume from and persist to.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub q_lo: u64,
    pub q_hi: u64,
    pub constructions: Vec<Construction>,
    pub k_lo: usize,
    pub k_hi: usize,
    /// Full dilation scan when the modulus is at most this; larger moduli
    /// fall back to seeded sampling.
    pub full_scan_limit: u64,
    /// Number of dilations sampled per set beyond the full-scan limit.
    pub sample_count: u64,
    pub seed: u64,
    /// Scan dilations above m/2 too. The result table is identical either
    /// way (negation mirrors windows); scanning them only doubles work.
    pub scan_negations: bool,
    pub cache_path: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(q_lo: u64, q_hi: u64, k_lo: usize, k_hi: usize) -> SearchConfig {
        SearchConfig {
            q_lo,
            q_hi,
            constructions: vec![
                Construction::Singer,
                Construction::Bose,
                Construction::Ruzsa,
            ],
            k_lo,
            k_hi,
            full_scan_limit: 300_000,
            sample_count: 64,
            seed: 0,
            scan_negations: false,
            cache_path: None,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The dilations to scan for one base set, always folded to c ≤ m/2 (the
/// negation m-c yields the same records); with scan_negations the
/// complementary dilations are appended, which must not change the table.
fn dilation_plan(set: &ModularSidonSet, config: &SearchConfig) -> Vec<u64> {
    let m = set.modulus();
    let mut base: Vec<u64> = if m <= config.full_scan_limit {
        (1..=m / 2).filter(|c| c.gcd(&m) == 1).collect()
    } else {
        let p = set.provenance();
        let stream = splitmix(config.seed)
            ^ splitmix(p.q.wrapping_mul(3).wrapping_add(p.construction as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let mut picked = std::collections::BTreeSet::new();
        let mut attempts = 0u64;
        while (picked.len() as u64) < config.sample_count && attempts < config.sample_count * 64 {
            attempts += 1;
            let c = rng.gen_range(1..m);
            if c.gcd(&m) == 1 {
                picked.insert(c.min(m - c));
            }
        }
        picked.into_iter().collect()
    };
    if config.scan_negations {
        let extra: Vec<u64> = base.iter().map(|&c| m - c).filter(|&c| c > m / 2).collect();
        base.extend(extra);
    }
    base
}

/// Runs the full search: every construction over the q range, every
/// planned dilation, every window size in range. Merges into the cache
/// table when one is configured and persists the result atomically.
pub fn run_search(config: &SearchConfig) -> Result<SearchTable, SearchError> {
    if config.k_lo == 0 || config.k_lo > config.k_hi {
        return Err(SearchError::InvalidConfig(format!(
            "window size range [{}, {}] is empty or zero",
            config.k_lo, config.k_hi
        )));
    }
    if config.q_lo > config.q_hi {
        return Err(SearchError::InvalidConfig(format!(
            "parameter range [{}, {}] is empty",
            config.q_lo, config.q_hi
        )));
    }
    if config.constructions.is_empty() {
        return Err(SearchError::InvalidConfig(
            "no constructions enabled".to_string(),
        ));
    }
    if config.q_hi > CONSTRUCTION_CAP {
        return Err(SearchError::InvalidConfig(format!(
            "q range exceeds the construction cap {CONSTRUCTION_CAP}"
        )));
    }

    let mut table = match &config.cache_path {
        Some(path) if path.exists() => SearchTable::read_tsv(path)?,
        _ => SearchTable::new(),
    };

    // Base sets, built once per (construction, parameter).
    let mut bases: Vec<Arc<ModularSidonSet>> = Vec::new();
    for &c in &config.constructions {
        for q in config.q_lo..=config.q_hi {
            let admissible = match c {
                Construction::Singer | Construction::Bose => prime_power(q).is_some(),
                Construction::Ruzsa => is_prime(q) && q != 2,
            };
            if !admissible {
                continue;
            }
            bases.push(Arc::new(construct(c, q)?));
        }
    }

    // One job per (base set, dilation chunk); chunks keep rayon fed
    // without cloning base sets per dilation.
    const CHUNK: usize = 64;
    let mut jobs: Vec<(Arc<ModularSidonSet>, Vec<u64>)> = Vec::new();
    for base in &bases {
        let plan = dilation_plan(base, config);
        for chunk in plan.chunks(CHUNK) {
            jobs.push((Arc::clone(base), chunk.to_vec()));
        }
    }

    let searched = jobs
        .par_iter()
        .map(|(base, cs)| {
            let mut partial = SearchTable::new();
            for &c in cs {
                let dilated = dilate(base, c).expect("planned dilations are units");
                let n = dilated.len();
                let top = config.k_hi.min(n);
                if config.k_lo > top {
                    continue;
                }
                let lifted = lift_residues(&dilated, top);
                let p = dilated.provenance();
                for k in config.k_lo..=top {
                    let (diameter, witness, start) = scan_one_size(&lifted, n, k);
                    partial.merge_record(SearchRecord {
                        k,
                        diameter,
                        witness,
                        source: Source::Constructed {
                            construction: p.construction,
                            q: p.q,
                            modulus: dilated.modulus(),
                            dilation: c,
                            window_start: start as u64,
                        },
                    });
                }
            }
            partial
        })
        .reduce(SearchTable::new, |mut a, b| {
            a.merge(b);
            a
        });

    table.merge(searched);
    if let Some(path) = &config.cache_path {
        table.write_tsv(path)?;
    }
    Ok(table)
}

/// Strips a trailing '#' comment and parses the rest as whitespace-
/// separated integers. None for blank or comment-only lines.
pub fn parse_ruler_line(line: &str) -> Option<Result<Vec<i64>, String>> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    if body.trim().is_empty() {
        return None;
    }
    let parsed: Result<Vec<i64>, _> = body.split_whitespace().map(|t| t.parse::<i64>()).collect();
    Some(parsed.map_err(|e| e.to_string()))
}

/// Reads a ruler text file (one set per line, optional # comments) into a
/// record table, verifying the Sidon property line by line.
pub fn ingest_external(path: &Path) -> Result<SearchTable, SearchError> {
    let text = fs::read_to_string(path).map_err(|source| SearchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut table = SearchTable::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let elems = match parse_ruler_line(line) {
            None => continue,
            Some(Err(reason)) => return Err(SearchError::Parse {
                line: lineno,
                reason,
            }),
            Some(Ok(v)) => v,
        };
        let witness = SidonSet::normalize(&elems)
            .map_err(|_| SearchError::NotSidon { line: lineno })?
            .canonical();
        table.merge_record(SearchRecord {
            k: witness.k(),
            diameter: witness.diameter(),
            witness,
            source: Source::External { line: lineno as u64 },
        });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::singer;
    use crate::set::is_sidon;

    #[test]
    fn dilation_is_an_automorphism() {
        let s = singer(2).unwrap(); // {0,1,3} mod 7
        let d = dilate(&s, 2).unwrap();
        assert_eq!(d.residues(), &[0, 2, 6]);
        assert!(matches!(
            dilate(&singer(3).unwrap(), 13),
            Err(SearchError::NotCoprime { c: 0, m: 13 })
        ));
        let id = dilate(&s, 1).unwrap();
        assert_eq!(id.residues(), s.residues());
        // negation reflects the set
        let neg = dilate(&s, 6).unwrap();
        assert_eq!(neg.residues(), &[0, 4, 6]);
    }

    #[test]
    fn window_scan_small_cases() {
        let s = singer(2).unwrap();
        let (d, w, _) = best_k_window(&s, 2).unwrap();
        assert_eq!(d, 1);
        assert_eq!(w.elements(), &[0, 1]);
        let (d, w, start) = best_k_window(&s, 3).unwrap();
        assert_eq!(d, 3);
        assert_eq!(w.elements(), &[0, 1, 3]);
        assert_eq!(start, 0);
        assert!(matches!(
            best_k_window(&s, 4),
            Err(SearchError::KTooLarge { k: 4, n: 3 })
        ));
    }

    #[test]
    fn negation_produces_identical_records() {
        // For every dilation c of a base set, c and m-c must yield the
        // same (diameter, canonical witness) for every k.
        let s = singer(5).unwrap();
        let m = s.modulus();
        for c in (1..=m / 2).filter(|c| c.gcd(&m) == 1).take(20) {
            let a = dilate(&s, c).unwrap();
            let b = dilate(&s, m - c).unwrap();
            for k in 2..=s.len() {
                let (da, wa, _) = best_k_window(&a, k).unwrap();
                let (db, wb, _) = best_k_window(&b, k).unwrap();
                assert_eq!(da, db, "c={c} k={k}");
                assert_eq!(wa, wb, "c={c} k={k}");
            }
        }
    }

    #[test]
    fn search_tiny_config_finds_s3() {
        let mut config = SearchConfig::new(2, 2, 3, 3);
        config.constructions = vec![Construction::Singer];
        let table = run_search(&config).unwrap();
        let rec = table.get(3).unwrap();
        assert_eq!(rec.diameter, 3);
        assert_eq!(rec.witness.elements(), &[0, 1, 3]);
    }

    #[test]
    fn table_merge_keeps_minimum() {
        let mut config = SearchConfig::new(2, 7, 4, 8);
        config.constructions = vec![Construction::Singer, Construction::Bose];
        let full = run_search(&config).unwrap();

        // split the q range and merge: must agree with the single run
        let mut lo = config.clone();
        lo.q_hi = 4;
        let mut hi = config.clone();
        hi.q_lo = 5;
        let mut merged = run_search(&lo).unwrap();
        merged.merge(run_search(&hi).unwrap());
        assert_eq!(merged, full);
    }

    #[test]
    fn scan_negations_flag_does_not_change_results() {
        let mut config = SearchConfig::new(2, 11, 3, 12);
        let table = run_search(&config).unwrap();
        config.scan_negations = true;
        let doubled = run_search(&config).unwrap();
        assert_eq!(table, doubled);
    }

    #[test]
    fn sampled_dilations_are_deterministic_and_folded() {
        let mut config = SearchConfig::new(13, 13, 5, 10);
        config.full_scan_limit = 10; // force sampling
        config.sample_count = 12;
        config.seed = 42;
        let t1 = run_search(&config).unwrap();
        let t2 = run_search(&config).unwrap();
        assert_eq!(t1, t2);
        config.scan_negations = true;
        let t3 = run_search(&config).unwrap();
        assert_eq!(t1, t3);
    }

    #[test]
    fn every_witness_verifies() {
        let config = SearchConfig::new(2, 13, 3, 20);
        let table = run_search(&config).unwrap();
        assert!(!table.is_empty());
        for rec in table.iter() {
            let signed: Vec<i64> = rec.witness.elements().iter().map(|&e| e as i64).collect();
            assert!(is_sidon(&signed));
            assert_eq!(rec.witness.k(), rec.k);
            assert_eq!(rec.witness.diameter(), rec.diameter);
        }
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("cache.tsv");

        let mut config = SearchConfig::new(2, 5, 3, 10);
        config.cache_path = Some(cache.clone());
        let table = run_search(&config).unwrap();

        let reread = SearchTable::read_tsv(&cache).unwrap();
        assert_eq!(reread, table);

        // resuming with a narrower config must keep old records
        let mut narrow = SearchConfig::new(2, 2, 3, 3);
        narrow.cache_path = Some(cache.clone());
        let resumed = run_search(&narrow).unwrap();
        assert_eq!(resumed, table);

        // corrupt one ruler: reading must fail loudly
        let text = fs::read_to_string(&cache).unwrap();
        let bad = text.replace("0 1 3", "0 1 2");
        fs::write(&cache, bad).unwrap();
        match SearchTable::read_tsv(&cache) {
            Err(SearchError::CacheCorrupt { line, .. }) => assert!(line > 1),
            other => panic!("expected CacheCorrupt, got {other:?}"),
        }
    }

    #[test]
    fn external_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rulers.txt");

        fs::write(&path, "0 1 3 7\n\n# comment only\n0 1 3  # trailing\n").unwrap();
        let table = ingest_external(&path).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.get(4).unwrap().diameter, 7);
        assert_eq!(table.get(3).unwrap().diameter, 3);

        fs::write(&path, "0 1 2\n").unwrap();
        assert!(matches!(
            ingest_external(&path),
            Err(SearchError::NotSidon { line: 1 })
        ));

        fs::write(&path, "0 x 3\n").unwrap();
        assert!(matches!(
            ingest_external(&path),
            Err(SearchError::Parse { line: 1, .. })
        ));

        fs::write(&path, "").unwrap();
        assert!(ingest_external(&path).unwrap().is_empty());
    }

    #[test]
    fn bk_rendering_uses_exact_bracketing() {
        let rec = SearchRecord {
            k: 10,
            diameter: 55,
            witness: SidonSet::normalize(&[0, 1, 6, 10, 23, 26, 34, 41, 53, 55]).unwrap(),
            source: Source::External { line: 1 },
        };
        // (100-55)/10^{1.5} = 45/31.6227... = 1.423024...
        assert_eq!(rec.bk_lower_bound_decimal(6), "1.423024");
        assert!(rec.bk_in_open_interval(0, 22, 10));
        assert!(!rec.bk_in_open_interval(0, 14, 10));
        assert!(!rec.bk_in_open_interval(15, 22, 10));
    }
}
