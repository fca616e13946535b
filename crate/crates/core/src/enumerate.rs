//! Exhaustive generation of shades and shadows up to simultaneous
//! row/column permutation and global sign flip.
//!
//! The search walks the upper-triangle cells in row-major order with values
//! tried ascending. Monotone row conditions prune eagerly; sign balance is
//! only decidable once a row is complete; singularity only on the full
//! matrix. Survivors are reduced to class representatives and deduplicated
//! in an ordered set, so emission is lexicographic for free.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::cone::{ps3_decide, Ps3Certificate, Ps3Outcome};
use crate::error::Error;
use crate::matrix::{canonical_form, configured_size_limit, is_singular, skew_rank, SkewIntMatrix};

/// Row-level bounds for the tame entry conditions.
///
/// `max_abs_entry` caps absolute entry size and anchors the extreme-entry
/// exclusion (an extreme positive entry tolerates no second positive entry
/// in its row, dually for negative). `max_ones_per_row` caps how many
/// entries may equal +1, and independently how many may equal -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameFilter {
    pub max_abs_entry: i64,
    pub max_ones_per_row: usize,
}

impl Default for TameFilter {
    fn default() -> Self {
        TameFilter { max_abs_entry: 2, max_ones_per_row: 4 }
    }
}

impl TameFilter {
    /// False when the bounds were overridden away from the standard values.
    pub fn conforming(&self) -> bool {
        *self == TameFilter::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Shade,
    Shadow,
}

/// One equivalence class representative with its derived data.
///
/// The matrix is always a canonical form; a Shadow record carries the
/// validated witness for the kernel-cone coverage condition, a Shade record
/// carries none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowRecord {
    pub kind: RecordKind,
    pub n: usize,
    pub matrix: SkewIntMatrix,
    pub rank: usize,
    pub certificate: Option<Ps3Certificate>,
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    kind: RecordKind,
    n: usize,
    rows: Vec<Vec<i64>>,
    rank: usize,
    certificate: Option<Ps3Certificate>,
}

impl Serialize for ShadowRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RecordJson {
            kind: self.kind,
            n: self.n,
            rows: self.matrix.rows_vec(),
            rank: self.rank,
            certificate: self.certificate.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShadowRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RecordJson::deserialize(d)?;
        let matrix = SkewIntMatrix::from_rows(&raw.rows).map_err(D::Error::custom)?;
        if matrix.n() != raw.n {
            return Err(D::Error::custom("row shape disagrees with n"));
        }
        Ok(ShadowRecord {
            kind: raw.kind,
            n: raw.n,
            matrix,
            rank: raw.rank,
            certificate: raw.certificate,
        })
    }
}

/// Sign balance: every row with a nonzero entry has entries of both signs.
pub fn ps2_holds(a: &SkewIntMatrix) -> bool {
    (0..a.n()).all(|i| {
        let row = a.row(i);
        let pos = row.iter().any(|&x| x > 0);
        let neg = row.iter().any(|&x| x < 0);
        pos == neg
    })
}

/// Full tame check of one row against the filter.
pub fn tame_row_ok(row: &[i64], filter: &TameFilter) -> bool {
    let b = filter.max_abs_entry;
    if row.iter().any(|&x| x.abs() > b) {
        return false;
    }
    let pos = row.iter().filter(|&&x| x > 0).count();
    let neg = row.iter().filter(|&&x| x < 0).count();
    if row.contains(&b) && pos >= 2 {
        return false;
    }
    if row.contains(&(-b)) && neg >= 2 {
        return false;
    }
    let ones = row.iter().filter(|&&x| x == 1).count();
    let neg_ones = row.iter().filter(|&&x| x == -1).count();
    ones <= filter.max_ones_per_row && neg_ones <= filter.max_ones_per_row
}

#[derive(Debug, Clone, Copy, Default)]
struct RowStat {
    pos: u8,
    neg: u8,
    ones: u8,
    neg_ones: u8,
    extreme_pos: u8,
    extreme_neg: u8,
}

impl RowStat {
    fn add(&mut self, v: i64, b: i64) {
        match v.cmp(&0) {
            std::cmp::Ordering::Greater => self.pos += 1,
            std::cmp::Ordering::Less => self.neg += 1,
            std::cmp::Ordering::Equal => {}
        }
        if v == 1 {
            self.ones += 1;
        } else if v == -1 {
            self.neg_ones += 1;
        }
        if v == b {
            self.extreme_pos += 1;
        } else if v == -b {
            self.extreme_neg += 1;
        }
    }

    fn remove(&mut self, v: i64, b: i64) {
        match v.cmp(&0) {
            std::cmp::Ordering::Greater => self.pos -= 1,
            std::cmp::Ordering::Less => self.neg -= 1,
            std::cmp::Ordering::Equal => {}
        }
        if v == 1 {
            self.ones -= 1;
        } else if v == -1 {
            self.neg_ones -= 1;
        }
        if v == b {
            self.extreme_pos -= 1;
        } else if v == -b {
            self.extreme_neg -= 1;
        }
    }
}

struct Search<'f> {
    n: usize,
    filter: &'f TameFilter,
    entries: Vec<i64>,
    stats: Vec<RowStat>,
    found: BTreeSet<Vec<i64>>,
}

impl<'f> Search<'f> {
    fn new(n: usize, filter: &'f TameFilter) -> Self {
        Search {
            n,
            filter,
            entries: vec![0; n * n],
            stats: vec![RowStat::default(); n],
            found: BTreeSet::new(),
        }
    }

    fn assign(&mut self, i: usize, j: usize, v: i64) {
        let b = self.filter.max_abs_entry;
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = -v;
        self.stats[i].add(v, b);
        self.stats[j].add(-v, b);
    }

    fn unassign(&mut self, i: usize, j: usize, v: i64) {
        let b = self.filter.max_abs_entry;
        self.entries[i * self.n + j] = 0;
        self.entries[j * self.n + i] = 0;
        self.stats[i].remove(v, b);
        self.stats[j].remove(-v, b);
    }

    /// Monotone conditions only; safe on any prefix of a row.
    fn partial_ok(&self, r: usize) -> bool {
        let s = &self.stats[r];
        if s.extreme_pos >= 1 && s.pos >= 2 {
            return false;
        }
        if s.extreme_neg >= 1 && s.neg >= 2 {
            return false;
        }
        s.ones as usize <= self.filter.max_ones_per_row
            && s.neg_ones as usize <= self.filter.max_ones_per_row
    }

    /// Sign balance plus a from-scratch tame check of the finished row.
    fn completed_row_ok(&self, r: usize) -> bool {
        let s = &self.stats[r];
        if (s.pos > 0) != (s.neg > 0) {
            return false;
        }
        let row = &self.entries[r * self.n..(r + 1) * self.n];
        tame_row_ok(row, self.filter)
    }

    /// Rows whose last free cell is (i, j): row i when j is the final
    /// column, plus row j at the very last cell of the triangle.
    fn newly_completed_ok(&self, i: usize, j: usize) -> bool {
        if j + 1 == self.n {
            if !self.completed_row_ok(i) {
                return false;
            }
            if i + 2 == self.n && !self.completed_row_ok(j) {
                return false;
            }
        }
        true
    }

    fn step_ok(&self, i: usize, j: usize) -> bool {
        self.partial_ok(i) && self.partial_ok(j) && self.newly_completed_ok(i, j)
    }

    fn dfs(&mut self, cells: &[(usize, usize)], at: usize) {
        if at == cells.len() {
            self.complete();
            return;
        }
        let (i, j) = cells[at];
        let b = self.filter.max_abs_entry;
        for v in -b..=b {
            self.assign(i, j, v);
            if self.step_ok(i, j) {
                self.dfs(cells, at + 1);
            }
            self.unassign(i, j, v);
        }
    }

    /// Full matrix in hand: singularity, then class reduction.
    fn complete(&mut self) {
        let a = SkewIntMatrix::from_entries_unchecked(self.n, self.entries.clone());
        if self.n % 2 == 0 && !is_singular(&a) {
            return;
        }
        let c1 = canonical_form(&a).expect("size checked on entry").0.into_entries();
        let c2 = canonical_form(&a.negated())
            .expect("size checked on entry")
            .0
            .into_entries();
        self.found.insert(c1.min(c2));
    }
}

fn upper_cells(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// All first-row assignments that survive the stepwise checks; each one is
/// an independent search partition.
fn first_row_prefixes(n: usize, filter: &TameFilter) -> Vec<Vec<i64>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    let b = filter.max_abs_entry;
    let width = n - 1;
    let mut out = Vec::new();
    let mut tuple = vec![-b; width];
    'outer: loop {
        let mut s = Search::new(n, filter);
        let mut ok = true;
        for (idx, &v) in tuple.iter().enumerate() {
            s.assign(0, idx + 1, v);
            if !s.step_ok(0, idx + 1) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(tuple.clone());
        }
        let mut k = width;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if tuple[k] < b {
                tuple[k] += 1;
                for x in &mut tuple[k + 1..] {
                    *x = -b;
                }
                break;
            }
        }
    }
    out
}

fn run_partition(n: usize, filter: &TameFilter, prefix: &[i64]) -> BTreeSet<Vec<i64>> {
    let cells = upper_cells(n);
    let mut s = Search::new(n, filter);
    for (idx, &v) in prefix.iter().enumerate() {
        s.assign(0, idx + 1, v);
    }
    s.dfs(&cells, prefix.len());
    s.found
}

fn check_size(n: usize) -> Result<(), Error> {
    let limit = configured_size_limit();
    if n == 0 || n > limit {
        return Err(Error::UnsupportedSize { n, limit });
    }
    Ok(())
}

/// Canonical entry sequences of all shade classes, lexicographically sorted.
fn shade_keys(n: usize, filter: &TameFilter, workers: usize) -> Result<BTreeSet<Vec<i64>>, Error> {
    check_size(n)?;
    assert!(filter.max_abs_entry >= 1, "entry bound must be positive");
    let prefixes = first_row_prefixes(n, filter);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool construction");
    let merged = pool.install(|| {
        prefixes
            .par_iter()
            .map(|p| run_partition(n, filter, p))
            .reduce(BTreeSet::new, |mut acc, part| {
                acc.extend(part);
                acc
            })
    });
    Ok(merged)
}

fn record_from_key(kind: RecordKind, n: usize, key: Vec<i64>) -> ShadowRecord {
    let matrix = SkewIntMatrix::from_entries(n, key).expect("search emits skew entries");
    let rank = skew_rank(&matrix);
    ShadowRecord { kind, n, matrix, rank, certificate: None }
}

/// Every shade class of size n, one canonical representative each, in
/// lexicographic order of the entry sequence.
pub fn enumerate_shades(n: usize, filter: &TameFilter) -> Result<Vec<ShadowRecord>, Error> {
    enumerate_shades_with(n, filter, 1)
}

/// enumerate_shades with a worker count for the partitioned search.
pub fn enumerate_shades_with(
    n: usize,
    filter: &TameFilter,
    workers: usize,
) -> Result<Vec<ShadowRecord>, Error> {
    let keys = shade_keys(n, filter, workers)?;
    Ok(keys
        .into_iter()
        .map(|k| record_from_key(RecordKind::Shade, n, k))
        .collect())
}

/// The shade classes whose kernel cone covers every coordinate; each record
/// carries the validated certificate.
pub fn enumerate_shadows(n: usize, filter: &TameFilter) -> Result<Vec<ShadowRecord>, Error> {
    enumerate_shadows_with(n, filter, 1)
}

/// enumerate_shadows with a worker count for the partitioned search.
pub fn enumerate_shadows_with(
    n: usize,
    filter: &TameFilter,
    workers: usize,
) -> Result<Vec<ShadowRecord>, Error> {
    let keys = shade_keys(n, filter, workers)?;
    Ok(keys
        .into_iter()
        .filter_map(|k| {
            let mut rec = record_from_key(RecordKind::Shadow, n, k);
            match ps3_decide(&rec.matrix) {
                Ps3Outcome::Feasible(cert) => {
                    rec.certificate = Some(cert);
                    Some(rec)
                }
                Ps3Outcome::Infeasible(_) => None,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;

    fn default_filter() -> TameFilter {
        TameFilter::default()
    }

    fn entry_lists(records: &[ShadowRecord]) -> Vec<Vec<i64>> {
        records.iter().map(|r| r.matrix.entries().to_vec()).collect()
    }

    #[test]
    fn ps2_examples() {
        assert!(ps2_holds(&SkewIntMatrix::zero(3)));
        let tri = SkewIntMatrix::from_rows(&[vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]])
            .unwrap();
        assert!(ps2_holds(&tri));
        let bad = SkewIntMatrix::from_rows(&[
            vec![0, 1, 2, 0],
            vec![-1, 0, 0, 0],
            vec![-2, 0, 0, 0],
            vec![0, 0, 0, 0],
        ])
        .unwrap();
        assert!(!ps2_holds(&bad));
    }

    #[test]
    fn tame_row_examples() {
        let f = default_filter();
        assert!(tame_row_ok(&[0, 2, 0, 0], &f));
        assert!(!tame_row_ok(&[0, 2, 1, 0], &f));
        assert!(!tame_row_ok(&[0, 1, 1, 1, 1, 1, -1], &f));
        assert!(tame_row_ok(&[0, 1, 1, 1, 1, -1, -1], &f));
        assert!(!tame_row_ok(&[0, 3, 0], &f));
        assert!(!tame_row_ok(&[0, -2, -1], &f));
        assert!(tame_row_ok(&[0, -2, 1], &f));
    }

    #[test]
    fn tiny_sizes_contain_only_zero() {
        for n in [1usize, 2] {
            let shades = enumerate_shades(n, &default_filter()).unwrap();
            assert_eq!(entry_lists(&shades), vec![vec![0; n * n]]);
            let shadows = enumerate_shadows(n, &default_filter()).unwrap();
            assert_eq!(entry_lists(&shadows), vec![vec![0; n * n]]);
        }
    }

    #[test]
    fn size_three_classes() {
        let shades = enumerate_shades(3, &default_filter()).unwrap();
        let expected: Vec<Vec<i64>> = vec![
            vec![0, -2, 1, 2, 0, -2, -1, 2, 0],
            vec![0, -2, 1, 2, 0, -1, -1, 1, 0],
            vec![0, -2, 2, 2, 0, -2, -2, 2, 0],
            vec![0, -1, 1, 1, 0, -1, -1, 1, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 0],
        ];
        assert_eq!(entry_lists(&shades), expected);
        let shadows = enumerate_shadows(3, &default_filter()).unwrap();
        assert_eq!(entry_lists(&shadows), expected);
        for r in &shadows {
            let cert = r.certificate.as_ref().unwrap();
            cert.validate_against(&r.matrix).unwrap();
        }
    }

    #[test]
    fn size_four_classes() {
        let shades = enumerate_shades(4, &default_filter()).unwrap();
        let expected: Vec<Vec<i64>> = vec![
            vec![0, -2, 0, 1, 2, 0, -2, 0, 0, 2, 0, -1, -1, 0, 1, 0],
            vec![0, -2, 0, 1, 2, 0, 0, -2, 0, 0, 0, 0, -1, 2, 0, 0],
            vec![0, -2, 0, 1, 2, 0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0],
            vec![0, -2, 0, 2, 2, 0, -2, 0, 0, 2, 0, -2, -2, 0, 2, 0],
            vec![0, -2, 0, 2, 2, 0, -1, -1, 0, 1, 0, -1, -2, 1, 1, 0],
            vec![0, -2, 0, 2, 2, 0, 0, -2, 0, 0, 0, 0, -2, 2, 0, 0],
            vec![0, -2, 1, 1, 2, 0, -1, -1, -1, 1, 0, 0, -1, 1, 0, 0],
            vec![0, -1, -1, 1, 1, 0, -1, 0, 1, 1, 0, -1, -1, 0, 1, 0],
            vec![0, -1, -1, 1, 1, 0, 0, -1, 1, 0, 0, -1, -1, 1, 1, 0],
            vec![0, -1, 0, 1, 1, 0, -1, 0, 0, 1, 0, -1, -1, 0, 1, 0],
            vec![0, -1, 0, 1, 1, 0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        ];
        assert_eq!(entry_lists(&shades), expected);
        let shadows = enumerate_shadows(4, &default_filter()).unwrap();
        assert_eq!(shadows.len(), 12);
    }

    #[test]
    fn records_are_canonical_and_consistent() {
        for n in 1..=4 {
            let shades = enumerate_shades(n, &default_filter()).unwrap();
            for r in &shades {
                assert_eq!(r.kind, RecordKind::Shade);
                assert_eq!(r.n, n);
                let (c, _) = canonical_form(&r.matrix).unwrap();
                assert_eq!(&c, &r.matrix);
                assert!(ps2_holds(&r.matrix));
                assert!(r.matrix.in_tame_range(2));
                assert!(r.rank < n || n % 2 == 1);
                assert_eq!(r.rank, skew_rank(&r.matrix));
            }
            let seen: BTreeSet<_> = shades.iter().map(|r| r.matrix.entries().to_vec()).collect();
            assert_eq!(seen.len(), shades.len());
        }
    }

    #[test]
    fn worker_counts_agree() {
        let base = enumerate_shades_with(4, &default_filter(), 1).unwrap();
        for workers in [2usize, 3, 7] {
            let alt = enumerate_shades_with(4, &default_filter(), workers).unwrap();
            assert_eq!(base, alt);
        }
    }

    #[test]
    fn size_bounds_rejected() {
        assert!(matches!(
            enumerate_shades(0, &default_filter()),
            Err(Error::UnsupportedSize { .. })
        ));
        assert!(matches!(
            enumerate_shades(99, &default_filter()),
            Err(Error::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn record_json_round_trip() {
        let shadows = enumerate_shadows(3, &default_filter()).unwrap();
        for r in &shadows {
            let line = serde_json::to_string(r).unwrap();
            let back: ShadowRecord = serde_json::from_str(&line).unwrap();
            assert_eq!(&back, r);
        }
        let zero = &shadows[4];
        assert_eq!(zero.matrix, SkewIntMatrix::zero(3));
        let line = serde_json::to_string(zero).unwrap();
        assert_eq!(
            line,
            "{\"kind\":\"shadow\",\"n\":3,\"rows\":[[0,0,0],[0,0,0],[0,0,0]],\"rank\":0,\
             \"certificate\":{\"c\":{\"n\":3,\"rows\":[[1,0,0],[0,1,0],[0,0,1]]},\
             \"rays_used\":[[0,0,1],[0,1,0],[1,0,0]]}}"
        );
        let identity = IntMatrix::identity(3);
        assert_eq!(zero.certificate.as_ref().unwrap().c, identity);
    }
}
