//! Integer lattices given by generators: incremental echelon form and a
//! diagonal (Smith-type) reduction that turns membership into linear
//! equalities and congruences.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ring::{Overflow, Ring};

/// Membership conditions for a lattice `L ⊆ Z^d`: `v ∈ L` iff
/// `f · v = 0` for every equality form and `f · v ≡ 0 (mod s)` for every
/// congruence `(f, s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeForms {
    pub dim: usize,
    pub equalities: Vec<Vec<BigInt>>,
    pub congruences: Vec<(Vec<BigInt>, BigInt)>,
}

struct Echelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

fn ext_gcd<T: Ring>(a: &T, b: &T) -> (T, T, T) {
    // iterative Euclid on (a, b), tracking Bezout coefficients
    let big = ext_gcd_big(&a.to_big(), &b.to_big());
    (T::from_big(&big.0).unwrap(), T::from_big(&big.1).unwrap(), T::from_big(&big.2).unwrap())
}

fn ext_gcd_big(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    use num_integer::Integer;
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

impl<T: Ring> Echelon<T> {
    fn insert(&mut self, mut v: Vec<T>) -> Result<(), Overflow> {
        loop {
            let Some(c) = v.iter().position(|x| !x.is_nil()) else {
                return Ok(());
            };
            match self.rows.binary_search_by_key(&c, |(p, _)| *p) {
                Err(pos) => {
                    self.rows.insert(pos, (c, v));
                    return Ok(());
                }
                Ok(pos) => {
                    let row = &mut self.rows[pos].1;
                    let (g, s, t) = ext_gcd(&row[c], &v[c]);
                    let rc = row[c].div_exact(&g).ok_or(Overflow)?;
                    let vc = v[c].div_exact(&g).ok_or(Overflow)?;
                    let mut new_row = Vec::with_capacity(v.len());
                    let mut new_v = Vec::with_capacity(v.len());
                    for (r, x) in row.iter().zip(&v) {
                        new_row.push(r.mul(&s).ok_or(Overflow)?.add(&x.mul(&t).ok_or(Overflow)?).ok_or(Overflow)?);
                        new_v.push(x.mul(&rc).ok_or(Overflow)?.sub_mul(&vc, r).ok_or(Overflow)?);
                    }
                    *row = new_row;
                    v = new_v;
                }
            }
        }
    }

    fn saturated(&self, rank: usize) -> bool {
        self.rows.len() == rank && self.rows.iter().all(|(p, r)| r[*p] == T::from_i64(1) || r[*p] == T::from_i64(-1))
    }
}

fn echelon<T: Ring>(
    dim: usize,
    gens: &mut dyn Iterator<Item = Vec<i64>>,
    saturated_rank: Option<usize>,
) -> Result<Vec<Vec<BigInt>>, Overflow> {
    let mut e: Echelon<T> = Echelon { rows: Vec::new() };
    for g in gens {
        debug_assert_eq!(g.len(), dim);
        e.insert(g.into_iter().map(T::from_i64).collect())?;
        if let Some(r) = saturated_rank {
            if e.saturated(r) {
                break;
            }
        }
    }
    Ok(e.rows.into_iter().map(|(_, r)| r.iter().map(Ring::to_big).collect()).collect())
}

/// Echelon basis of the lattice spanned by `gens`. If `saturated_rank` is
/// given, generation stops as soon as the basis has that rank with unit
/// pivots (the lattice is then all integer points of the span, provided the
/// caller knows the span cannot grow).
pub fn lattice_basis<F>(dim: usize, gens: F, saturated_rank: Option<usize>) -> Vec<Vec<BigInt>>
where
    F: Fn() -> Box<dyn Iterator<Item = Vec<i64>>>,
{
    match echelon::<i128>(dim, &mut gens(), saturated_rank) {
        Ok(b) => b,
        Err(Overflow) => echelon::<BigInt>(dim, &mut gens(), saturated_rank).unwrap_or_else(|_| unreachable!()),
    }
}

/// Membership forms for the lattice with the given basis rows.
pub fn lattice_forms(dim: usize, basis: &[Vec<BigInt>]) -> LatticeForms {
    let k = basis.len();
    let mut m: Vec<Vec<BigInt>> = basis.to_vec();
    let mut v: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_swap = |m: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    };
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = best.expect("basis rows are independent");
            m.swap(t, bi);
            if bj != t {
                col_swap(&mut m, &mut v, t, bj);
            }
            let p = m[t][t].clone();
            let mut clean = true;
            for j in t + 1..dim {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = num_integer::Integer::div_floor(&m[t][j], &p);
                for row in m.iter_mut() {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                for row in v.iter_mut() {
                    let d = &q * &row[t];
                    row[j] -= d;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            for i in t + 1..k {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = num_integer::Integer::div_floor(&m[i][t], &p);
                let (top, bottom) = m.split_at_mut(i);
                for (x, y) in bottom[0].iter_mut().zip(&top[t]) {
                    *x -= &q * y;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    let column = |j: usize| -> Vec<BigInt> { v.iter().map(|row| row[j].clone()).collect() };
    let mut forms = LatticeForms { dim, ..Default::default() };
    for j in 0..dim {
        if j < k {
            let s = m[j][j].abs();
            if !s.is_one() {
                forms.congruences.push((column(j), s));
            }
        } else {
            forms.equalities.push(column(j));
        }
    }
    forms
}

impl LatticeForms {
    pub fn contains(&self, x: &[BigInt]) -> bool {
        let dot = |f: &[BigInt]| -> BigInt { f.iter().zip(x).map(|(a, b)| a * b).sum() };
        self.equalities.iter().all(|f| dot(f).is_zero())
            && self.congruences.iter().all(|(f, s)| (dot(f) % s).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn even_sublattice() {
        let gens = vec![vec![2i64, 0], vec![0, 2], vec![1, 1]];
        let basis = lattice_basis(2, || Box::new(gens.clone().into_iter()), None);
        let f = lattice_forms(2, &basis);
        assert!(f.contains(&b(&[1, 1])));
        assert!(f.contains(&b(&[2, 0])));
        assert!(!f.contains(&b(&[1, 0])));
        assert!(f.equalities.is_empty());
        assert_eq!(f.congruences.len(), 1);
    }

    #[test]
    fn degenerate_lattice() {
        let gens = vec![vec![3i64, 3, 0]];
        let basis = lattice_basis(3, || Box::new(gens.clone().into_iter()), None);
        let f = lattice_forms(3, &basis);
        assert!(f.contains(&b(&[-6, -6, 0])));
        assert!(!f.contains(&b(&[1, 1, 0])));
        assert!(!f.contains(&b(&[3, 3, 1])));
        assert_eq!(f.equalities.len(), 2);
    }

    // membership forms agree with a brute-force search for small coefficient
    // combinations
    #[test]
    fn random_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let d = rng.gen_range(1..4);
            let gens: Vec<Vec<i64>> = (0..rng.gen_range(1..4))
                .map(|_| (0..d).map(|_| rng.gen_range(-3..4)).collect())
                .collect();
            let basis = lattice_basis(d, || Box::new(gens.clone().into_iter()), None);
            let f = lattice_forms(d, &basis);
            for g in &gens {
                assert!(f.contains(&b(g)));
            }
            // random integer combinations are members
            for _ in 0..10 {
                let mut x = vec![0i64; d];
                for g in &gens {
                    let c = rng.gen_range(-3..4);
                    for i in 0..d {
                        x[i] += c * g[i];
                    }
                }
                assert!(f.contains(&b(&x)));
            }
            // a point outside: test by solving with the integer solver
            let y: Vec<i64> = (0..d).map(|_| rng.gen_range(-4..5)).collect();
            let rows: Vec<Vec<(usize, BigInt)>> = (0..d)
                .map(|i| gens.iter().enumerate().map(|(j, g)| (j, BigInt::from(g[i]))).collect())
                .collect();
            let rhs = b(&y);
            let solvable = super::super::hnf::solve_exact(gens.len(), &rows, &rhs).is_some();
            assert_eq!(solvable, f.contains(&rhs), "gens {gens:?} point {y:?}");
        }
    }
}
