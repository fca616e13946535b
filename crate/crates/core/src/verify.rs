//! Independent re-checking of pipeline outputs: the quiver identity
//! Ad·C = 0 with per-vertex balance, and full audits of emitted records.
//!
//! The auditor deliberately avoids the producers' code paths: rank comes
//! from plain rational Gaussian elimination rather than the fraction-free
//! routine, and products are reaccumulated in wide integers here.

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::enumerate::{RecordKind, ShadowRecord};
use crate::error::Error;
use crate::matrix::{canonical_form, Fraction, IntMatrix, SkewIntMatrix};
use crate::quiver::{signed_adjacency, Quiver};

/// Symmetric nonnegative integer matrix, the shape a Cartan matrix takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanCandidate {
    c: IntMatrix,
}

impl CartanCandidate {
    pub fn new(c: IntMatrix) -> Result<Self, Error> {
        if !c.is_symmetric() || !c.is_nonnegative() {
            return Err(Error::InvalidCartanCandidate);
        }
        Ok(CartanCandidate { c })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.c
    }
}

impl Serialize for CartanCandidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.c.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CartanCandidate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = IntMatrix::deserialize(d)?;
        CartanCandidate::new(c).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

/// Rank over the rationals by textbook Gaussian elimination, sharing no
/// code with the fraction-free producer routine.
fn rational_rank(m: &IntMatrix) -> usize {
    let n = m.n();
    let mut a: Vec<Vec<Fraction>> = (0..n)
        .map(|i| m.row(i).iter().map(|&x| Fraction::from(x as i128)).collect())
        .collect();
    let zero = Fraction::from(0);
    let mut rank = 0usize;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| a[r][col] != zero) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..n {
            if a[r][col] != zero {
                let f = a[r][col] / a[rank][col];
                for c in col..n {
                    let sub = f * a[rank][c];
                    a[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Product A·C reaccumulated in i128, returned as the nonzero positions.
fn nonzero_product_positions(a: &SkewIntMatrix, c: &IntMatrix) -> Vec<(usize, usize, i128)> {
    let n = a.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v: i128 = (0..n)
                .map(|k| a.get(i, k) as i128 * c.get(k, j) as i128)
                .sum();
            if v != 0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Verifies Ad·C = 0 for the quiver, reporting nonzero product positions
/// and the per-vertex flow balance (incoming vs outgoing weighted by each
/// row of C).
pub fn cartan_identity_check(q: &Quiver, c: &CartanCandidate) -> Result<Report, Error> {
    let n = q.n();
    if c.matrix().n() != n {
        return Err(Error::SizeMismatch { got: c.matrix().n(), want: n });
    }
    let ad = signed_adjacency(q);
    let nonzero = nonzero_product_positions(&ad, c.matrix());
    let mut checks = Vec::with_capacity(n + 1);
    let detail = if nonzero.is_empty() {
        "product has no nonzero entries".to_string()
    } else {
        format!("nonzero entries at {nonzero:?}")
    };
    checks.push(check("product-zero", nonzero.is_empty(), detail));
    let mut all_balanced = true;
    for i in 0..n {
        let mut bad_rows: Vec<usize> = Vec::new();
        for k in 0..n {
            let incoming: i128 = (0..n)
                .map(|j| q.arrows(j, i) as i128 * c.matrix().get(k, j) as i128)
                .sum();
            let outgoing: i128 = (0..n)
                .map(|j| q.arrows(i, j) as i128 * c.matrix().get(k, j) as i128)
                .sum();
            if incoming != outgoing {
                bad_rows.push(k);
            }
        }
        let pass = bad_rows.is_empty();
        all_balanced &= pass;
        let detail = if pass {
            "incoming and outgoing sums agree for every row".to_string()
        } else {
            format!("imbalance at rows {bad_rows:?}")
        };
        checks.push(check(format!("balance-vertex-{i}"), pass, detail));
    }
    debug_assert_eq!(nonzero.is_empty(), all_balanced);
    Ok(Report { checks })
}

fn tame_row_audit(row: &[i64]) -> bool {
    if row.iter().any(|&x| x.abs() > 2) {
        return false;
    }
    let pos = row.iter().filter(|&&x| x > 0).count();
    let neg = row.iter().filter(|&&x| x < 0).count();
    if row.iter().any(|&x| x == 2) && pos > 1 {
        return false;
    }
    if row.iter().any(|&x| x == -2) && neg > 1 {
        return false;
    }
    row.iter().filter(|&&x| x == 1).count() <= 4 && row.iter().filter(|&&x| x == -1).count() <= 4
}

fn certificate_check(r: &ShadowRecord) -> Check {
    let name = "certificate";
    match (&r.kind, &r.certificate) {
        (RecordKind::Shade, None) => check(name, true, "not required for a shade"),
        (RecordKind::Shadow, None) => check(name, false, "shadow record lacks a certificate"),
        (_, Some(cert)) => {
            let c = &cert.c;
            if c.n() != r.n {
                return check(name, false, "certificate size differs from the matrix");
            }
            if !c.is_symmetric() {
                return check(name, false, "certificate is not symmetric");
            }
            if !c.is_nonnegative() {
                return check(name, false, "certificate has a negative entry");
            }
            if !(0..r.n).all(|j| (0..r.n).any(|i| c.get(i, j) > 0)) {
                return check(name, false, "certificate has a zero column");
            }
            let nonzero = nonzero_product_positions(&r.matrix, c);
            if !nonzero.is_empty() {
                return check(name, false, format!("product nonzero at {nonzero:?}"));
            }
            check(name, true, "symmetric, nonnegative, nonzero columns, product zero")
        }
    }
}

/// Re-derives every property a record claims, naming each as a pass/fail
/// check. Pure: auditing a record twice gives identical reports.
pub fn audit_record(r: &ShadowRecord) -> Report {
    let n = r.n;
    let m = &r.matrix;
    let mut checks = Vec::new();

    let skew_ok =
        (0..n).all(|i| (0..n).all(|j| m.get(i, j) == -m.get(j, i))) && m.n() == n;
    checks.push(check("skew", skew_ok, "a[i][j] = -a[j][i] re-checked entrywise"));

    let tame_ok = (0..n).all(|i| {
        let row = m.row(i);
        row.iter().all(|&x| x.abs() <= 2)
    });
    checks.push(check("tame-range", tame_ok, "all entries within [-2,2]"));

    let t_ok = (0..n).all(|i| tame_row_audit(m.row(i)));
    checks.push(check("tame-rows", t_ok, "extreme-entry and ones-count rules per row"));

    let indep_rank = rational_rank(&m.as_int_matrix());
    checks.push(check(
        "ps1",
        indep_rank < n,
        format!("independent rank {indep_rank} of size {n}"),
    ));
    checks.push(check(
        "rank-field",
        indep_rank == r.rank,
        format!("stored rank {} vs independent rank {indep_rank}", r.rank),
    ));

    let ps2_ok = (0..n).all(|i| {
        let row = m.row(i);
        row.iter().any(|&x| x > 0) == row.iter().any(|&x| x < 0)
    });
    checks.push(check("ps2", ps2_ok, "every nonzero row carries both signs"));

    let canon_check = match canonical_form(m) {
        Ok((c, _)) => check(
            "canonical-fixed-point",
            &c == m,
            "matrix compared with its canonical form",
        ),
        Err(e) => check("canonical-fixed-point", false, format!("canonicalization failed: {e}")),
    };
    checks.push(canon_check);

    checks.push(certificate_check(r));
    Report { checks }
}
