//! Exact integer matrix arithmetic, permutation actions and canonical forms.
//!
//! Everything here is exact: ranks come from fraction-free elimination over
//! `i128`, kernel bases from rational elimination with primitive integer
//! output. No floating point is used anywhere in the crate.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational scalar used by elimination routines.
pub type Fraction = num_rational::Ratio<i128>;

/// Default size cap for canonicalization and enumeration.
pub const DEFAULT_SIZE_LIMIT: usize = 8;

/// Size limit honoring the `SHADOW_MAX_N` override.
pub fn configured_size_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("SHADOW_MAX_N")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_SIZE_LIMIT)
    })
}

/// Dense square integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix { n, entries: vec![0; n * n] }
    }

    pub fn from_entries(n: usize, entries: Vec<i64>) -> Result<Self, Error> {
        if entries.len() != n * n {
            return Err(Error::BadShape { n });
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, Error> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { n });
        }
        Ok(IntMatrix { n, entries: rows.concat() })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows_vec(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&x| x >= 0)
    }

    /// Exact matrix product, entries stay in `i64`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Skew-symmetric integer matrix; the constructor enforces a[i][j] = -a[j][i].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkewIntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl SkewIntMatrix {
    pub fn zero(n: usize) -> Self {
        SkewIntMatrix { n, entries: vec![0; n * n] }
    }

    pub fn from_entries(n: usize, entries: Vec<i64>) -> Result<Self, Error> {
        if entries.len() != n * n {
            return Err(Error::BadShape { n });
        }
        for i in 0..n {
            for j in 0..=i {
                if entries[i * n + j] != -entries[j * n + i] {
                    return Err(Error::NotSkew { i, j });
                }
            }
        }
        Ok(SkewIntMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, Error> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { n });
        }
        Self::from_entries(n, rows.concat())
    }

    /// Builds from the strict upper triangle in row-major order.
    pub fn from_upper(n: usize, upper: &[i64]) -> Result<Self, Error> {
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::BadShape { n });
        }
        let mut entries = vec![0i64; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                entries[i * n + j] = upper[k];
                entries[j * n + i] = -upper[k];
                k += 1;
            }
        }
        Ok(SkewIntMatrix { n, entries })
    }

    pub(crate) fn from_entries_unchecked(n: usize, entries: Vec<i64>) -> Self {
        debug_assert!(Self::from_entries(n, entries.clone()).is_ok());
        SkewIntMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<i64> {
        self.entries
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows_vec(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn negated(&self) -> SkewIntMatrix {
        SkewIntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&x| -x).collect(),
        }
    }

    pub fn in_tame_range(&self, bound: i64) -> bool {
        self.entries.iter().all(|&x| x.abs() <= bound)
    }

    pub fn as_int_matrix(&self) -> IntMatrix {
        IntMatrix { n: self.n, entries: self.entries.clone() }
    }
}

/// Bijection on 0..n, stored as the image sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn from_mapping(map: Vec<usize>) -> Result<Self, Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation { n });
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Composition acting as (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.map.len(), other.map.len());
        Permutation {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        }
    }
}

/// Advances `v` to its next lexicographic arrangement; false once exhausted.
pub(crate) fn next_perm(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Rank over the rationals of a rectangular integer row list, by fraction-free
/// Bareiss elimination. Exact division per the Sylvester identity.
pub(crate) fn rank_rect(rows: &[Vec<i64>], width: usize) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let height = m.len();
    let mut rank = 0usize;
    let mut prev = 1i128;
    let mut col = 0usize;
    while rank < height && col < width {
        let Some(piv) = (rank..height).find(|&r| m[r][col] != 0) else {
            col += 1;
            continue;
        };
        m.swap(rank, piv);
        let pivot = m[rank][col];
        for r in rank + 1..height {
            let lead = m[r][col];
            for c in col + 1..width {
                let num = pivot
                    .checked_mul(m[r][c])
                    .and_then(|x| x.checked_sub(lead.checked_mul(m[rank][c])?))
                    .expect("rank: minor growth exceeds i128");
                m[r][c] = num / prev;
            }
            m[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
        col += 1;
    }
    rank
}

/// Rank of a square integer matrix over the rationals, computed exactly.
pub fn rank(m: &IntMatrix) -> usize {
    rank_rect(&m.rows_vec(), m.n())
}

/// Rank of a skew matrix; always even, asserted on every call.
pub fn skew_rank(a: &SkewIntMatrix) -> usize {
    let r = rank(&a.as_int_matrix());
    assert!(r % 2 == 0, "skew-symmetric rank must be even, got {r}");
    r
}

/// Singularity test with the odd-size shortcut. A skew matrix of odd size is
/// always singular; even sizes fall back to the exact rank.
pub fn is_singular(a: &SkewIntMatrix) -> bool {
    if a.n() % 2 == 1 {
        return true;
    }
    skew_rank(a) < a.n()
}

/// Primitive integer basis of the rational null space {x : m·x = 0}.
///
/// Reduced row echelon form over `Fraction`, then one basis vector per free
/// column. Each vector is scaled to integer entries with content 1 and a
/// positive first nonzero entry.
pub fn rational_kernel_basis(m: &IntMatrix) -> Vec<Vec<i64>> {
    let n = m.n();
    let mut a: Vec<Vec<Fraction>> = (0..n)
        .map(|i| m.row(i).iter().map(|&x| Fraction::from(x as i128)).collect())
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for col in 0..n {
        let Some(piv) = (r..n).find(|&i| a[i][col] != Fraction::from(0)) else {
            continue;
        };
        a.swap(r, piv);
        let p = a[r][col];
        for c in col..n {
            a[r][c] /= p;
        }
        for i in 0..n {
            if i != r && a[i][col] != Fraction::from(0) {
                let f = a[i][col];
                for c in col..n {
                    let sub = f * a[r][c];
                    a[i][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivot_cols.contains(c)) {
        let mut x = vec![Fraction::from(0); n];
        x[free] = Fraction::from(1);
        for (k, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = -a[k][free];
        }
        basis.push(primitive_integer(&x));
    }
    for v in &basis {
        debug_assert!((0..n).all(|i| m.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum::<i64>() == 0));
    }
    basis
}

/// Clears denominators and divides by the content; first nonzero entry positive.
fn primitive_integer(x: &[Fraction]) -> Vec<i64> {
    let lcm = x
        .iter()
        .map(|f| *f.denom())
        .fold(1i128, |acc, d| acc.lcm(&d));
    let mut v: Vec<i128> = x.iter().map(|f| f.numer() * (lcm / f.denom())).collect();
    let g = v.iter().map(|&e| e.abs()).fold(0i128, |acc, e| acc.gcd(&e));
    if g > 1 {
        for e in &mut v {
            *e /= g;
        }
    }
    if let Some(first) = v.iter().find(|&&e| e != 0) {
        if *first < 0 {
            for e in &mut v {
                *e = -*e;
            }
        }
    }
    v.into_iter().map(|e| i64::try_from(e).expect("kernel entry fits i64")).collect()
}

/// Conjugation by a permutation matrix: entry (i,j) of the result is a[p(i)][p(j)].
pub fn permute(a: &SkewIntMatrix, p: &Permutation) -> Result<SkewIntMatrix, Error> {
    let n = a.n();
    if p.n() != n {
        return Err(Error::SizeMismatch { got: p.n(), want: n });
    }
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = a.get(p.apply(i), p.apply(j));
        }
    }
    Ok(SkewIntMatrix::from_entries_unchecked(n, entries))
}

/// Lexicographically least conjugate over all permutations, with the least
/// mapping achieving it.
///
/// Permutations are visited in lexicographic mapping order; a candidate is
/// compared entry by entry against the incumbent and abandoned at the first
/// larger entry, so most candidates cost only a few comparisons.
pub fn canonical_form(a: &SkewIntMatrix) -> Result<(SkewIntMatrix, Permutation), Error> {
    let n = a.n();
    let limit = configured_size_limit();
    if n > limit {
        return Err(Error::UnsupportedSize { n, limit });
    }
    let mut best: Vec<i64> = a.entries().to_vec();
    let mut best_map: Vec<usize> = (0..n).collect();
    let mut p: Vec<usize> = (0..n).collect();
    while next_perm(&mut p) {
        match compare_image(a, &p, &best) {
            Ordering::Less => {
                for i in 0..n {
                    for j in 0..n {
                        best[i * n + j] = a.get(p[i], p[j]);
                    }
                }
                best_map.copy_from_slice(&p);
            }
            _ => {}
        }
    }
    Ok((
        SkewIntMatrix::from_entries_unchecked(n, best),
        Permutation { map: best_map },
    ))
}

fn compare_image(a: &SkewIntMatrix, p: &[usize], best: &[i64]) -> Ordering {
    let n = a.n();
    for i in 0..n {
        for j in 0..n {
            let v = a.get(p[i], p[j]);
            match v.cmp(&best[i * n + j]) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
    }
    Ordering::Equal
}

// Shared JSON shape {"n": .., "rows": [[..], ..]} for both matrix types.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson { n: self.n, rows: self.rows_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.rows.len() != raw.n {
            return Err(D::Error::custom("row count does not match n"));
        }
        IntMatrix::from_rows(&raw.rows).map_err(D::Error::custom)
    }
}

impl Serialize for SkewIntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson { n: self.n, rows: self.rows_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SkewIntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.rows.len() != raw.n {
            return Err(D::Error::custom("row count does not match n"));
        }
        SkewIntMatrix::from_rows(&raw.rows).map_err(D::Error::custom)
    }
}
