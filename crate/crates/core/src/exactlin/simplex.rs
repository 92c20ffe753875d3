//! Dense exact simplex over rationals with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

/// Tableau in canonical form for `A x = b, x ≥ 0`: `a = B⁻¹A`, `b = B⁻¹b`.
#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub basis: Vec<usize>,
    pub n: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.a[r][c].clone();
        if !pv.is_one() {
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &pv;
                }
            }
            self.b[r] /= &pv;
        }
        let prow = self.a[r].clone();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (v, p) in self.a[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            self.b[i] -= &f * &pb;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over the allowed columns with Bland's rule.
    /// Returns false if unbounded. `stop` is checked after every pivot.
    fn minimize(&mut self, cost: &[Q], allowed: &dyn Fn(usize) -> bool, stop: &dyn Fn(&Tableau) -> bool) -> bool {
        loop {
            if stop(self) {
                return true;
            }
            let entering = (0..self.n).find(|&j| {
                if !allowed(j) || self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (r, &bv) in self.basis.iter().enumerate() {
                    if !self.a[r][j].is_zero() && !cost[bv].is_zero() {
                        d -= &cost[bv] * &self.a[r][j];
                    }
                }
                d.is_negative()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..self.a.len() {
                if self.a[r][j].is_positive() {
                    let ratio = &self.b[r] / &self.a[r][j];
                    let better = match &leave {
                        None => true,
                        Some((lr, lq)) => ratio < *lq || (ratio == *lq && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, j),
            }
        }
    }

    pub fn value(&self, j: usize) -> Q {
        match self.basis.iter().position(|&b| b == j) {
            Some(r) => self.b[r].clone(),
            None => Q::zero(),
        }
    }
}

/// Phase 1 for `A x = b, x ≥ 0` (dense rows). Returns a feasible canonical
/// tableau without artificial columns, or None.
pub(crate) fn phase1(a: &[Vec<BigInt>], b: &[BigInt], n: usize) -> Option<Tableau> {
    let m = a.len();
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut rhs: Vec<Q> = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Q> = a[i]
            .iter()
            .map(|v| Q::from_integer(if neg { -v.clone() } else { v.clone() }))
            .collect();
        row.resize(n + m, Q::zero());
        row[n + i] = Q::one();
        rows.push(row);
        rhs.push(Q::from_integer(if neg { -b[i].clone() } else { b[i].clone() }));
    }
    let mut t = Tableau { a: rows, b: rhs, basis: (n..n + m).collect(), n: n + m };
    let cost: Vec<Q> = (0..n + m).map(|j| if j >= n { Q::one() } else { Q::zero() }).collect();
    let bounded = t.minimize(&cost, &|_| true, &|_| false);
    debug_assert!(bounded);
    let obj: Q = t.basis.iter().enumerate().filter(|(_, &bv)| bv >= n).map(|(r, _)| t.b[r].clone()).sum();
    if obj.is_positive() {
        return None;
    }
    // drive artificials out of the basis or drop redundant rows
    let mut r = 0;
    while r < t.a.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.a[r][j].is_zero()) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.a.remove(r);
                    t.b.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }
    for row in &mut t.a {
        row.truncate(n);
    }
    t.n = n;
    Some(t)
}

/// Whether column `v` can be made positive starting from a feasible tableau.
pub(crate) fn can_be_positive(t: &Tableau, v: usize) -> bool {
    if t.value(v).is_positive() {
        return true;
    }
    let mut t = t.clone();
    let cost: Vec<Q> = (0..t.n).map(|j| if j == v { -Q::one() } else { Q::zero() }).collect();
    let bounded = t.minimize(&cost, &|_| true, &|t: &Tableau| t.value(v).is_positive());
    !bounded || t.value(v).is_positive()
}
