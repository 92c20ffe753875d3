//! Integer solving by unimodular column operations (column Hermite form).
//! The operations are recorded and replayed on the triangular solution, so
//! the transform matrix is never stored.

use num_bigint::BigInt;

use super::ring::{Overflow, Ring};

enum Op {
    Swap(usize, usize),
    /// column `c` -= q * column `p`
    Sub(usize, usize, BigInt),
}

/// Solves `A x = b` over the integers, `A` given as sparse rows over `n`
/// columns. `Ok(None)` means infeasible.
pub(crate) fn solve<T: Ring>(
    n: usize,
    rows: &[Vec<(usize, BigInt)>],
    rhs: &[BigInt],
) -> Result<Option<Vec<BigInt>>, Overflow> {
    let m = rows.len();
    let mut cols: Vec<Vec<T>> = vec![vec![T::nil(); m]; n];
    for (i, row) in rows.iter().enumerate() {
        for (c, a) in row {
            let v = T::from_big(a).ok_or(Overflow)?;
            cols[*c][i] = cols[*c][i].add(&v).ok_or(Overflow)?;
        }
    }
    let mut ops: Vec<Op> = Vec::new();
    let mut piv = 0usize;
    // pivot column of row i, or None; plus the number of columns in use then
    let mut row_piv: Vec<(Option<usize>, usize)> = Vec::with_capacity(m);
    for i in 0..m {
        loop {
            let mut best: Option<usize> = None;
            let mut others = 0usize;
            for c in piv..n {
                if !cols[c][i].is_nil() {
                    others += 1;
                    match best {
                        Some(b) if !cols[c][i].abs_lt(&cols[b][i]) => {}
                        _ => best = Some(c),
                    }
                }
            }
            let Some(b) = best else {
                row_piv.push((None, piv));
                break;
            };
            if b != piv {
                cols.swap(b, piv);
                ops.push(Op::Swap(b, piv));
            }
            if others == 1 {
                row_piv.push((Some(piv), piv));
                piv += 1;
                break;
            }
            let (head, tail) = cols.split_at_mut(piv + 1);
            let pc = &head[piv];
            for (off, col) in tail.iter_mut().enumerate() {
                if col[i].is_nil() {
                    continue;
                }
                let q = col[i].div_floor(&pc[i]);
                for r in i..m {
                    if !pc[r].is_nil() {
                        col[r] = col[r].sub_mul(&q, &pc[r]).ok_or(Overflow)?;
                    }
                }
                ops.push(Op::Sub(piv + 1 + off, piv, q.to_big()));
            }
        }
    }
    // forward substitution on the lower-triangular form
    let mut y: Vec<T> = vec![T::nil(); n];
    for (i, &(p, width)) in row_piv.iter().enumerate() {
        let mut s = T::from_big(&rhs[i]).ok_or(Overflow)?;
        let upto = if p.is_some() { width } else { width.min(n) };
        for c in 0..upto {
            if !cols[c][i].is_nil() && !y[c].is_nil() {
                s = s.sub_mul(&y[c], &cols[c][i]).ok_or(Overflow)?;
            }
        }
        match p {
            Some(c) => match s.div_exact(&cols[c][i]) {
                Some(v) => y[c] = v,
                None => return Ok(None),
            },
            None => {
                if !s.is_nil() {
                    return Ok(None);
                }
            }
        }
    }
    let mut x: Vec<BigInt> = y.iter().map(Ring::to_big).collect();
    for op in ops.iter().rev() {
        match op {
            Op::Swap(a, b) => x.swap(*a, *b),
            Op::Sub(c, p, q) => {
                let t = &x[*c] * q;
                x[*p] -= t;
            }
        }
    }
    Ok(Some(x))
}

/// Exact solve, trying `i128` first.
pub(crate) fn solve_exact(n: usize, rows: &[Vec<(usize, BigInt)>], rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    match solve::<i128>(n, rows, rhs) {
        Ok(r) => r,
        Err(Overflow) => solve::<BigInt>(n, rows, rhs).unwrap_or_else(|_| unreachable!("BigInt never overflows")),
    }
}
