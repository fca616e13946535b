//! Quivers as arrow-count matrices, their skew signature, and the
//! classification of 2-cycles into the four admissible local blocks.
//!
//! A quiver is stored as the matrix arr with arr[i][j] counting arrows
//! i -> j and the diagonal counting loops. The skew signature forgets loops
//! and 2-cycles; strip recovers the discarded parts so that
//! arr = reduced + overlay + diag(loops) holds exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{IntMatrix, SkewIntMatrix};

/// Directed multigraph on vertices 0..n with counted arrows and loops.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Quiver {
    arr: IntMatrix,
}

impl Quiver {
    pub fn new(arr: IntMatrix) -> Result<Self, Error> {
        if !arr.is_nonnegative() {
            return Err(Error::NegativeArrowCount);
        }
        Ok(Quiver { arr })
    }

    pub fn empty(n: usize) -> Self {
        Quiver { arr: IntMatrix::zero(n) }
    }

    pub fn n(&self) -> usize {
        self.arr.n()
    }

    pub fn arr(&self) -> &IntMatrix {
        &self.arr
    }

    pub fn arrows(&self, i: usize, j: usize) -> i64 {
        self.arr.get(i, j)
    }

    pub fn loops_at(&self, i: usize) -> i64 {
        self.arr.get(i, i)
    }

    pub fn total_arrows(&self) -> i64 {
        self.arr.entries().iter().sum()
    }

    /// Entry bound 2 and the one-loop rule for multi-vertex quivers.
    pub fn validate_tame(&self) -> Result<(), Error> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if self.arrows(i, j) > 2 {
                    return Err(Error::OutOfTameRange { i, j, bound: 2 });
                }
            }
            if n >= 2 && self.loops_at(i) > 1 {
                return Err(Error::TooManyLoops { i });
            }
        }
        Ok(())
    }

    /// Unordered pairs i < j carrying arrows in both directions.
    pub fn two_cycles(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.arrows(i, j) >= 1 && self.arrows(j, i) >= 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct QuiverJson {
    n: usize,
    arr: Vec<Vec<i64>>,
}

impl Serialize for Quiver {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuiverJson { n: self.n(), arr: self.arr.rows_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quiver {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = QuiverJson::deserialize(d)?;
        if raw.arr.len() != raw.n {
            return Err(D::Error::custom("arrow rows do not match n"));
        }
        let arr = IntMatrix::from_rows(&raw.arr).map_err(D::Error::custom)?;
        Quiver::new(arr).map_err(D::Error::custom)
    }
}

/// Vertex-disjoint set of unordered edges, kept sorted with i < j per edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn empty() -> Self {
        Matching { edges: Vec::new() }
    }

    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self, Error> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidMatching);
            }
            let e = (a.min(b), a.max(b));
            if !used.insert(e.0) || !used.insert(e.1) {
                return Err(Error::InvalidMatching);
            }
            norm.push(e);
        }
        norm.sort_unstable();
        Ok(Matching { edges: norm })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = self.edges.iter().map(|&(a, b)| [a, b]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[usize; 2]> = Vec::deserialize(d)?;
        Matching::new(pairs.into_iter().map(|[a, b]| (a, b)).collect())
            .map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    PendantPair,
    Square,
    Mixed32,
    FullSpindle,
}

/// A 2-cycle together with the template it realizes: the role map names the
/// template vertices, the outlets are the white glueing points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMatch {
    pub pair: (usize, usize),
    pub kind: BlockKind,
    pub roles: BTreeMap<String, usize>,
    pub outlets: BTreeSet<usize>,
}

/// arr - arr^T, the loop- and 2-cycle-blind signature of the quiver.
pub fn signed_adjacency(q: &Quiver) -> SkewIntMatrix {
    let n = q.n();
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = q.arrows(i, j) - q.arrows(j, i);
        }
    }
    SkewIntMatrix::from_entries_unchecked(n, entries)
}

/// The unique loop- and 2-cycle-free quiver with the given signature:
/// positive part taken entrywise.
pub fn reduced_quiver(a: &SkewIntMatrix) -> Quiver {
    let n = a.n();
    let mut arr = IntMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            arr.set(i, j, a.get(i, j).max(0));
        }
    }
    Quiver { arr }
}

/// Splits a quiver into its reduced part, its 2-cycle overlay and its loop
/// vector; the three parts sum back to the original arrow matrix.
pub fn strip(q: &Quiver) -> (Quiver, Quiver, Vec<i64>) {
    let n = q.n();
    let mut reduced = IntMatrix::zero(n);
    let mut overlay = IntMatrix::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            let m = q.arrows(i, j).min(q.arrows(j, i));
            overlay.set(i, j, m);
            overlay.set(j, i, m);
            reduced.set(i, j, q.arrows(i, j) - m);
            reduced.set(j, i, q.arrows(j, i) - m);
        }
    }
    let loops = (0..n).map(|i| q.loops_at(i)).collect();
    (Quiver { arr: reduced }, Quiver { arr: overlay }, loops)
}

/// Off-diagonal out-arrows, off-diagonal in-arrows (both as sorted
/// (target, count) lists) and the loop count of one vertex.
fn local(q: &Quiver, v: usize) -> (Vec<(usize, i64)>, Vec<(usize, i64)>, i64) {
    let n = q.n();
    let outs = (0..n)
        .filter(|&x| x != v && q.arrows(v, x) > 0)
        .map(|x| (x, q.arrows(v, x)))
        .collect();
    let ins = (0..n)
        .filter(|&x| x != v && q.arrows(x, v) > 0)
        .map(|x| (x, q.arrows(x, v)))
        .collect();
    (outs, ins, q.loops_at(v))
}

/// The x with list exactly {partner: 1, x: 1}.
fn single_other(list: &[(usize, i64)], partner: usize) -> Option<usize> {
    if list.len() != 2 || list.iter().any(|&(_, c)| c != 1) {
        return None;
    }
    let others: Vec<usize> = list.iter().map(|&(x, _)| x).filter(|&x| x != partner).collect();
    match others[..] {
        [x] => Some(x),
        _ => None,
    }
}

/// The sorted (x, y) with list exactly {partner: 1, x: 1, y: 1}.
fn pair_others(list: &[(usize, i64)], partner: usize) -> Option<(usize, usize)> {
    if list.len() != 3 || list.iter().any(|&(_, c)| c != 1) {
        return None;
    }
    let others: Vec<usize> = list.iter().map(|&(x, _)| x).filter(|&x| x != partner).collect();
    match others[..] {
        [x, y] => Some((x.min(y), x.max(y))),
        _ => None,
    }
}

fn roles(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn pendant_endpoint_ok(q: &Quiver, v: usize, u: usize) -> bool {
    let (outs, ins, loops) = local(q, v);
    outs == vec![(u, 1)] && ins == vec![(u, 1)] && loops <= 1
}

fn try_pendant(q: &Quiver, lo: usize, hi: usize) -> Option<BlockMatch> {
    let cands: Vec<usize> = [(lo, hi), (hi, lo)]
        .iter()
        .filter(|&&(v, u)| pendant_endpoint_ok(q, v, u))
        .map(|&(v, _)| v)
        .collect();
    // looped endpoint first, then lower index
    let black = cands.into_iter().min_by_key(|&v| (q.loops_at(v) == 0, v))?;
    let outlet = if black == lo { hi } else { lo };
    Some(BlockMatch {
        pair: (lo, hi),
        kind: BlockKind::PendantPair,
        roles: roles(&[("black", black), ("outlet", outlet)]),
        outlets: BTreeSet::from([outlet]),
    })
}

fn try_square(q: &Quiver, bi: usize, bj: usize) -> Option<BlockMatch> {
    if q.arrows(bi, bj) != 1 || q.arrows(bj, bi) != 1 {
        return None;
    }
    let (oi, ii, li) = local(q, bi);
    let (oj, ij, lj) = local(q, bj);
    if li != 0 || lj != 0 {
        return None;
    }
    let r = single_other(&oi, bj)?;
    let l = single_other(&ii, bj)?;
    if l == r {
        return None;
    }
    if single_other(&oj, bi)? != l || single_other(&ij, bi)? != r {
        return None;
    }
    Some(BlockMatch {
        pair: (bi.min(bj), bi.max(bj)),
        kind: BlockKind::Square,
        roles: roles(&[("i", bi), ("j", bj), ("l", l), ("r", r)]),
        outlets: BTreeSet::from([l, r]),
    })
}

fn try_mixed32(q: &Quiver, bi: usize, bj: usize) -> Option<BlockMatch> {
    if q.arrows(bi, bj) != 1 || q.arrows(bj, bi) != 1 {
        return None;
    }
    let (oi, ii, li) = local(q, bi);
    let (oj, ij, lj) = local(q, bj);
    if li != 0 || lj != 0 {
        return None;
    }
    let (a1, a2) = pair_others(&oi, bj)?;
    let w = single_other(&ii, bj)?;
    if single_other(&oj, bi)? != w || pair_others(&ij, bi)? != (a1, a2) {
        return None;
    }
    if w == a1 || w == a2 {
        return None;
    }
    for a in [a1, a2] {
        let (oa, ia, la) = local(q, a);
        if la != 0 || oa != vec![(bj, 1)] || ia != vec![(bi, 1)] {
            return None;
        }
    }
    Some(BlockMatch {
        pair: (bi.min(bj), bi.max(bj)),
        kind: BlockKind::Mixed32,
        roles: roles(&[("i", bi), ("j", bj), ("a1", a1), ("a2", a2), ("w", w)]),
        outlets: BTreeSet::from([w]),
    })
}

fn try_spindle(q: &Quiver, bi: usize, bj: usize) -> Option<BlockMatch> {
    let n = q.n();
    if n != 6 || q.arrows(bi, bj) != 1 || q.arrows(bj, bi) != 1 {
        return None;
    }
    if (0..n).any(|v| q.loops_at(v) != 0) {
        return None;
    }
    let (oi, ii, _) = local(q, bi);
    let (oj, ij, _) = local(q, bj);
    let (a1, a2) = pair_others(&oi, bj)?;
    let (b1, b2) = pair_others(&ii, bj)?;
    if pair_others(&oj, bi)? != (b1, b2) || pair_others(&ij, bi)? != (a1, a2) {
        return None;
    }
    let all: BTreeSet<usize> = [bi, bj, a1, a2, b1, b2].into_iter().collect();
    if all.len() != 6 {
        return None;
    }
    for a in [a1, a2] {
        let (oa, ia, la) = local(q, a);
        if la != 0 || oa != vec![(bj, 1)] || ia != vec![(bi, 1)] {
            return None;
        }
    }
    for b in [b1, b2] {
        let (ob, ib, lb) = local(q, b);
        if lb != 0 || ob != vec![(bi, 1)] || ib != vec![(bj, 1)] {
            return None;
        }
    }
    debug_assert_eq!(q.total_arrows(), 10);
    Some(BlockMatch {
        pair: (bi.min(bj), bi.max(bj)),
        kind: BlockKind::FullSpindle,
        roles: roles(&[("i", bi), ("j", bj), ("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)]),
        outlets: BTreeSet::new(),
    })
}

/// Matches the 2-cycle {i, j} against the four templates, cheapest first,
/// returning the first hit. None means no template applies.
///
/// A doubled pair (two arrows each way) is a legal block only on the
/// 2-vertex quiver; beyond that every template rejects it.
pub fn block_classify(q: &Quiver, i: usize, j: usize) -> Result<Option<BlockMatch>, Error> {
    let n = q.n();
    if i >= n || j >= n || i == j || q.arrows(i, j) < 1 || q.arrows(j, i) < 1 {
        return Err(Error::NotATwoCycle { i, j });
    }
    let (lo, hi) = (i.min(j), i.max(j));
    if n == 2 && q.arrows(lo, hi) >= 2 && q.arrows(hi, lo) >= 2 {
        let black = (0..2).min_by_key(|&v| (q.loops_at(v) == 0, v)).unwrap();
        let outlet = 1 - black;
        return Ok(Some(BlockMatch {
            pair: (lo, hi),
            kind: BlockKind::PendantPair,
            roles: roles(&[("black", black), ("outlet", outlet)]),
            outlets: BTreeSet::from([outlet]),
        }));
    }
    let found = try_pendant(q, lo, hi)
        .or_else(|| try_square(q, lo, hi))
        .or_else(|| try_square(q, hi, lo))
        .or_else(|| try_mixed32(q, lo, hi))
        .or_else(|| try_mixed32(q, hi, lo))
        .or_else(|| try_spindle(q, lo, hi))
        .or_else(|| try_spindle(q, hi, lo));
    if let Some(m) = &found {
        debug_assert!(block_property_holds(q, m));
    }
    Ok(found)
}

fn black_vertices(m: &BlockMatch) -> Vec<usize> {
    match m.kind {
        BlockKind::PendantPair => vec![m.roles["black"]],
        BlockKind::Square => vec![m.roles["i"], m.roles["j"]],
        BlockKind::Mixed32 => {
            vec![m.roles["i"], m.roles["j"], m.roles["a1"], m.roles["a2"]]
        }
        BlockKind::FullSpindle => m.roles.values().copied().collect(),
    }
}

fn template_arrows(q: &Quiver, m: &BlockMatch) -> BTreeMap<(usize, usize), i64> {
    let r = &m.roles;
    let mut t: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    match m.kind {
        BlockKind::PendantPair => {
            let (b, o) = (r["black"], r["outlet"]);
            t.insert((b, o), q.arrows(b, o));
            t.insert((o, b), q.arrows(o, b));
            if q.loops_at(b) > 0 {
                t.insert((b, b), q.loops_at(b));
            }
        }
        BlockKind::Square => {
            let (i, j, l, rr) = (r["i"], r["j"], r["l"], r["r"]);
            for e in [(i, j), (j, i), (l, i), (i, rr), (rr, j), (j, l)] {
                t.insert(e, 1);
            }
        }
        BlockKind::Mixed32 => {
            let (i, j, a1, a2, w) = (r["i"], r["j"], r["a1"], r["a2"], r["w"]);
            for e in [(i, j), (j, i), (i, a1), (i, a2), (a1, j), (a2, j), (j, w), (w, i)] {
                t.insert(e, 1);
            }
        }
        BlockKind::FullSpindle => {
            let (i, j) = (r["i"], r["j"]);
            let (a1, a2, b1, b2) = (r["a1"], r["a2"], r["b1"], r["b2"]);
            for e in [
                (i, j),
                (j, i),
                (i, a1),
                (i, a2),
                (a1, j),
                (a2, j),
                (j, b1),
                (j, b2),
                (b1, i),
                (b2, i),
            ] {
                t.insert(e, 1);
            }
        }
    }
    t
}

/// Every arrow incident to a black vertex of the match lies inside the
/// matched block, with the exact multiplicity the template prescribes.
pub fn block_property_holds(q: &Quiver, m: &BlockMatch) -> bool {
    let black = black_vertices(m);
    let allowed = template_arrows(q, m);
    let n = q.n();
    for u in 0..n {
        for v in 0..n {
            let c = q.arrows(u, v);
            if c > 0 && (black.contains(&u) || black.contains(&v)) {
                if allowed.get(&(u, v)) != Some(&c) {
                    return false;
                }
            }
        }
    }
    true
}

/// Graphviz rendering; black role vertices filled, outlets doubled, every
/// parallel arrow drawn separately and loops as self-edges.
pub fn to_dot(q: &Quiver, blocks: &[BlockMatch]) -> String {
    let n = q.n();
    let black: BTreeSet<usize> = blocks.iter().flat_map(|b| black_vertices(b)).collect();
    let outlets: BTreeSet<usize> = blocks.iter().flat_map(|b| b.outlets.iter().copied()).collect();
    let mut s = String::from("digraph quiver {\n");
    for v in 0..n {
        if black.contains(&v) {
            s.push_str(&format!(
                "  v{v} [shape=circle, style=filled, fillcolor=black, fontcolor=white];\n"
            ));
        } else if outlets.contains(&v) {
            s.push_str(&format!("  v{v} [shape=doublecircle];\n"));
        } else {
            s.push_str(&format!("  v{v} [shape=circle];\n"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for _ in 0..q.arrows(i, j) {
                s.push_str(&format!("  v{i} -> v{j};\n"));
            }
        }
    }
    s.push_str("}\n");
    s
}
