//! Figure-data emitters: each figure is a small CSV/TSV table computed
//! from the exhaustive oracle, a search table, or an external ruler
//! file. Output is byte-stable for identical inputs: deterministic row
//! order and fixed 12-place decimal rendering.

use std::path::Path;

use num_bigint::BigInt;

use sidon::{
    decimal_over_sqrt, decimal_string, edge_variance_fraction, exhaustive_optimal,
    ingest_external, s_statistic, v_statistic, SearchBudget, SearchTable, SidonSet,
    WindowError, WindowProfile,
};

use crate::{table, usage, Failure, FigureId, Format};

const PLACES: usize = 12;

fn load_table(source: Option<&Path>, cache: Option<&Path>) -> Result<SearchTable, Failure> {
    match (cache, source) {
        (Some(c), _) => SearchTable::read_tsv(c).map_err(|e| usage(e.to_string())),
        (None, Some(s)) => ingest_external(s).map_err(|e| usage(e.to_string())),
        (None, None) => Err(usage("this figure needs --source or --cache")),
    }
}

/// T for a set: the override, else the smallest integer >= k^(3/2).
fn window_for(set: &SidonSet, t_override: Option<u64>) -> u64 {
    t_override.unwrap_or_else(|| sidon::default_window(set.k() as u64))
}

fn k_fifth(k: usize) -> BigInt {
    let kb = BigInt::from(k);
    &kb * &kb * &kb * &kb * &kb
}

/// V(A, T) / k^(5/2) as a 12-place decimal.
fn v_over(set: &SidonSet, t: u64) -> Result<String, Failure> {
    let profile = WindowProfile::new(set, t).map_err(|e| usage(e.to_string()))?;
    let v = v_statistic(&profile);
    Ok(decimal_over_sqrt(v.numer(), v.denom(), &k_fifth(set.k()), PLACES))
}

/// 2S(A, T) / k^(5/2) as a 12-place decimal.
fn two_s_over(set: &SidonSet, t: u64) -> String {
    let two_s = BigInt::from(2 * s_statistic(set, t));
    decimal_over_sqrt(&two_s, &BigInt::from(1), &k_fifth(set.k()), PLACES)
}

/// (V + 2S) / k^(5/2) as a 12-place decimal.
fn v_plus_two_s_over(set: &SidonSet, t: u64) -> Result<String, Failure> {
    let profile = WindowProfile::new(set, t).map_err(|e| usage(e.to_string()))?;
    let v = v_statistic(&profile);
    let two_s = BigInt::from(2 * s_statistic(set, t));
    let a = v.numer() + two_s * v.denom();
    Ok(decimal_over_sqrt(&a, v.denom(), &k_fifth(set.k()), PLACES))
}

#[allow(clippy::too_many_arguments)]
pub fn emit(
    format: Format,
    id: FigureId,
    source: Option<&Path>,
    cache: Option<&Path>,
    kmax: usize,
    t_override: Option<u64>,
    line: Option<u64>,
    k_pick: Option<usize>,
) -> Result<String, Failure> {
    match id {
        FigureId::F1 => {
            if kmax == 0 {
                return Err(usage("--kmax must be at least 1"));
            }
            let budget = SearchBudget::default();
            let mut rows = Vec::with_capacity(kmax);
            for k in 1..=kmax {
                let (d, _) = exhaustive_optimal(k, &budget)
                    .map_err(|e| usage(format!("k={k}: {e}; lower --kmax")))?;
                let kb = BigInt::from(k);
                let a = &kb * &kb - BigInt::from(d);
                let b_k = decimal_over_sqrt(&a, &BigInt::from(1), &(&kb * &kb * &kb), PLACES);
                rows.push(vec![k.to_string(), b_k]);
            }
            Ok(table(format, &["k", "b_k"], &rows))
        }
        FigureId::F2 => {
            let records = load_table(source, cache)?;
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|rec| vec![rec.k.to_string(), rec.bk_lower_bound_decimal(PLACES)])
                .collect();
            Ok(table(format, &["k", "b_k_lower_bound"], &rows))
        }
        FigureId::F3 => {
            let records = load_table(source, cache)?;
            let mut rows = Vec::with_capacity(records.len());
            for rec in records.iter() {
                let t = window_for(&rec.witness, t_override);
                rows.push(vec![rec.k.to_string(), v_over(&rec.witness, t)?]);
            }
            Ok(table(format, &["k", "v_over_k52"], &rows))
        }
        FigureId::F4 => {
            let records = load_table(source, cache)?;
            let mut rows = Vec::with_capacity(records.len());
            for rec in records.iter() {
                let t = window_for(&rec.witness, t_override);
                rows.push(vec![rec.k.to_string(), two_s_over(&rec.witness, t)]);
            }
            Ok(table(format, &["k", "two_s_over_k52"], &rows))
        }
        FigureId::F5 => {
            let records = load_table(source, cache)?;
            let mut rows = Vec::with_capacity(records.len());
            for rec in records.iter() {
                let t = window_for(&rec.witness, t_override);
                rows.push(vec![
                    rec.k.to_string(),
                    v_plus_two_s_over(&rec.witness, t)?,
                ]);
            }
            Ok(table(format, &["k", "v_plus_2s_over_k52"], &rows))
        }
        FigureId::F6 => {
            let records = load_table(source, cache)?;
            let mut rows = Vec::with_capacity(records.len());
            for rec in records.iter() {
                let t = window_for(&rec.witness, t_override);
                rows.push(vec![v_over(&rec.witness, t)?, two_s_over(&rec.witness, t)]);
            }
            Ok(table(format, &["v_over_k52", "two_s_over_k52"], &rows))
        }
        FigureId::F7 => {
            let set = match (cache, k_pick) {
                (Some(c), Some(k)) => {
                    let records =
                        SearchTable::read_tsv(c).map_err(|e| usage(e.to_string()))?;
                    records
                        .get(k)
                        .map(|rec| rec.witness.clone())
                        .ok_or_else(|| usage(format!("cache has no record for k={k}")))?
                }
                (Some(_), None) => {
                    return Err(usage("f7 from a cache needs --k to pick the record"))
                }
                (None, _) => {
                    let path = source.ok_or_else(|| usage("f7 needs --source or --cache"))?;
                    crate::pick_ruler(&path.to_path_buf(), line)?.1
                }
            };
            let t = window_for(&set, t_override);
            let profile = WindowProfile::new(&set, t).map_err(|e| usage(e.to_string()))?;
            let rows: Vec<Vec<String>> = profile
                .counts()
                .iter()
                .enumerate()
                .map(|(i, &a)| vec![(i + 1).to_string(), a.to_string()])
                .collect();
            Ok(table(format, &["j", "A_j"], &rows))
        }
        FigureId::F8 => {
            let records = load_table(source, cache)?;
            let mut rows = Vec::with_capacity(records.len());
            for rec in records.iter() {
                let t = window_for(&rec.witness, t_override);
                match edge_variance_fraction(&rec.witness, t) {
                    Ok(fraction) => rows.push(vec![
                        rec.k.to_string(),
                        decimal_string(&fraction, PLACES),
                    ]),
                    // a flat profile has no variance to attribute
                    Err(WindowError::ZeroVariance) => continue,
                    Err(e) => return Err(usage(e.to_string())),
                }
            }
            Ok(table(format, &["k", "edge_fraction"], &rows))
        }
    }
}
