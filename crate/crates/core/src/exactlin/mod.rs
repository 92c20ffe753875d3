//! Exact linear algebra: integer feasibility of affine systems, rational
//! feasibility and support computation by simplex, GF(2)/GF(p) elimination
//! and lattice membership forms.

mod hnf;
mod lattice;
mod modp;
mod presolve;
pub(crate) mod ring;
mod simplex;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub use lattice::{lattice_basis, lattice_forms, LatticeForms};
pub use modp::{check_gf2, gf2_solve, modp_solve, Gf2Equation};

/// Sparse row `Σ coeffs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, i64)>, rhs: i64) -> Self {
        Row { coeffs, rhs }
    }

    pub fn eval_big(&self, x: &[BigInt]) -> BigInt {
        self.coeffs.iter().map(|&(v, a)| &x[v] * a).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffineSystem {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    pub labels: Option<Vec<String>>,
}

impl AffineSystem {
    pub fn new(num_vars: usize) -> Self {
        AffineSystem { num_vars, rows: Vec::new(), labels: None }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, i64)>, rhs: i64) {
        debug_assert!(coeffs.iter().all(|&(v, _)| v < self.num_vars));
        self.rows.push(Row::new(coeffs, rhs));
    }

    /// Dense coefficient rows.
    pub fn dense(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![0i64; self.num_vars];
                for &(c, a) in &r.coeffs {
                    v[c] += a;
                }
                v
            })
            .collect()
    }

    pub fn satisfied_by_int(&self, x: &[BigInt]) -> bool {
        x.len() == self.num_vars && self.rows.iter().all(|r| r.eval_big(x) == BigInt::from(r.rhs))
    }

    pub fn satisfied_by_rat(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && self.rows.iter().all(|r| {
                let s: BigRational = r.coeffs.iter().map(|&(v, a)| &x[v] * BigRational::from_integer(a.into())).sum();
                s == BigRational::from_integer(r.rhs.into())
            })
    }

    /// Keeps the columns with `keep[c]`, renumbering them in order; dropped
    /// columns are fixed to zero.
    pub fn restrict_columns(&self, keep: &[bool]) -> (AffineSystem, Vec<usize>) {
        let mut map = vec![usize::MAX; self.num_vars];
        let mut back = Vec::new();
        for (c, &k) in keep.iter().enumerate() {
            if k {
                map[c] = back.len();
                back.push(c);
            }
        }
        let mut s = AffineSystem::new(back.len());
        for r in &self.rows {
            s.push(r.coeffs.iter().filter(|(c, _)| keep[*c]).map(|&(c, a)| (map[c], a)).collect(), r.rhs);
        }
        (s, back)
    }
}

/// Some integer solution, or None. Every returned vector is checked by
/// substitution.
pub fn integer_feasible(s: &AffineSystem) -> Option<Vec<BigInt>> {
    let x = presolve::solve(s)?;
    assert!(s.satisfied_by_int(&x), "integer solution failed verification");
    Some(x)
}

/// Integer feasibility of `s` with a dense integer solve only (no presolve).
pub fn integer_feasible_plain(s: &AffineSystem) -> Option<Vec<BigInt>> {
    let rows: Vec<Vec<(usize, BigInt)>> =
        s.rows.iter().map(|r| r.coeffs.iter().map(|&(c, a)| (c, BigInt::from(a))).collect()).collect();
    let rhs: Vec<BigInt> = s.rows.iter().map(|r| BigInt::from(r.rhs)).collect();
    let x = hnf::solve_exact(s.num_vars, &rows, &rhs)?;
    assert!(s.satisfied_by_int(&x), "integer solution failed verification");
    Some(x)
}

/// Standard form with every variable nonnegative: free variables are split
/// as `x = x⁺ − x⁻`. Returns dense rows, rhs, and for every original variable
/// its (plus, minus) columns.
fn standard_form(s: &AffineSystem, nonneg: &BTreeSet<usize>) -> (Vec<Vec<BigInt>>, Vec<BigInt>, Vec<(usize, Option<usize>)>) {
    let mut cols = Vec::with_capacity(s.num_vars);
    let mut n = 0;
    for v in 0..s.num_vars {
        if nonneg.contains(&v) {
            cols.push((n, None));
            n += 1;
        } else {
            cols.push((n, Some(n + 1)));
            n += 2;
        }
    }
    let a = s
        .dense()
        .into_iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); n];
            for (v, c) in row.into_iter().enumerate() {
                if c != 0 {
                    out[cols[v].0] = BigInt::from(c);
                    if let Some(m) = cols[v].1 {
                        out[m] = BigInt::from(-c);
                    }
                }
            }
            out
        })
        .collect();
    let b = s.rows.iter().map(|r| BigInt::from(r.rhs)).collect();
    (a, b, cols)
}

/// An exact rational solution with the listed variables nonnegative.
pub fn rational_feasible(s: &AffineSystem, nonneg: &BTreeSet<usize>) -> Option<Vec<BigRational>> {
    let (a, b, cols) = standard_form(s, nonneg);
    let n = cols.last().map_or(0, |&(p, m)| m.unwrap_or(p) + 1);
    let t = simplex::phase1(&a, &b, n)?;
    let x: Vec<BigRational> = cols
        .iter()
        .map(|&(p, m)| {
            let mut v = t.value(p);
            if let Some(m) = m {
                v -= t.value(m);
            }
            v
        })
        .collect();
    assert!(s.satisfied_by_rat(&x), "rational solution failed verification");
    assert!(nonneg.iter().all(|&v| !x[v].is_negative()));
    Some(x)
}

/// Variables of `nonneg` that are positive in some feasible solution.
pub fn interior_support(s: &AffineSystem, nonneg: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let (a, b, cols) = standard_form(s, nonneg);
    let n = cols.last().map_or(0, |&(p, m)| m.unwrap_or(p) + 1);
    let t = simplex::phase1(&a, &b, n).ok_or_else(|| Error::Invalid("system is infeasible".into()))?;
    let mut support: BTreeSet<usize> = nonneg.iter().copied().filter(|&v| t.value(cols[v].0).is_positive()).collect();
    let rest: Vec<usize> = nonneg.iter().copied().filter(|v| !support.contains(v)).collect();
    let pos = crate::par::map(&rest, |&v| simplex::can_be_positive(&t, cols[v].0));
    support.extend(rest.iter().zip(pos).filter(|(_, p)| *p).map(|(&v, _)| v));
    Ok(support)
}


#[cfg(test)]
mod tests;
