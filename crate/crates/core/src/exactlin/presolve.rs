//! Presolve for integer systems: empty and singleton rows, rows whose
//! private columns (columns occurring in no other row) have gcd 1, and
//! aggregation of private columns into a single slack. What remains is
//! solved over GF(p) when it is a pure congruence system modulo one prime,
//! and by column Hermite elimination otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::hnf;
use super::modp;
use super::ring::{ext_gcd_list, Overflow};
use super::AffineSystem;

enum Step {
    /// `Σ private + Σ others = rhs`, gcd of the private coefficients is 1
    Row { private: Vec<(usize, i128)>, others: Vec<(usize, i128)>, rhs: i128 },
    /// `Σ private = g · new`
    Aggregate { private: Vec<(usize, i128)>, new: usize },
}

struct PRow {
    coeffs: Vec<(usize, i128)>,
    rhs: i128,
    alive: bool,
}

pub(crate) fn solve(s: &AffineSystem) -> Option<Vec<BigInt>> {
    match presolve(s) {
        Ok(r) => r,
        Err(Overflow) => super::integer_feasible_plain(s),
    }
}

fn merged(coeffs: &[(usize, i64)]) -> Vec<(usize, i128)> {
    let mut v: Vec<(usize, i128)> = coeffs.iter().map(|&(c, a)| (c, a as i128)).collect();
    v.sort_unstable_by_key(|x| x.0);
    let mut out: Vec<(usize, i128)> = Vec::with_capacity(v.len());
    for (c, a) in v {
        match out.last_mut() {
            Some(l) if l.0 == c => l.1 += a,
            _ => out.push((c, a)),
        }
    }
    out.retain(|x| x.1 != 0);
    out
}

fn is_prime(p: i128) -> bool {
    p >= 2 && (2..).take_while(|d: &i128| d * d <= p).all(|d| p % d != 0)
}

fn presolve(s: &AffineSystem) -> Result<Option<Vec<BigInt>>, Overflow> {
    let mut rows: Vec<PRow> =
        s.rows.iter().map(|r| PRow { coeffs: merged(&r.coeffs), rhs: r.rhs as i128, alive: true }).collect();
    let mut ncols = s.num_vars;
    let mut fixed: Vec<Option<i128>> = vec![None; ncols];
    let mut count = vec![0usize; ncols];
    for r in &rows {
        for &(c, _) in &r.coeffs {
            count[c] += 1;
        }
    }
    let mut steps: Vec<Step> = Vec::new();
    let substitute = |r: &mut PRow, fixed: &[Option<i128>]| -> Result<(), Overflow> {
        if r.coeffs.iter().any(|&(c, _)| fixed[c].is_some()) {
            let mut rhs = r.rhs;
            let mut keep = Vec::with_capacity(r.coeffs.len());
            for &(c, a) in &r.coeffs {
                match fixed[c] {
                    Some(v) => rhs = rhs.checked_sub(a.checked_mul(v).ok_or(Overflow)?).ok_or(Overflow)?,
                    None => keep.push((c, a)),
                }
            }
            r.coeffs = keep;
            r.rhs = rhs;
        }
        Ok(())
    };
    loop {
        let mut changed = false;
        for ri in 0..rows.len() {
            if !rows[ri].alive {
                continue;
            }
            substitute(&mut rows[ri], &fixed)?;
            let r = &mut rows[ri];
            match r.coeffs.len() {
                0 => {
                    if r.rhs != 0 {
                        return Ok(None);
                    }
                    r.alive = false;
                    changed = true;
                }
                1 => {
                    let (c, a) = r.coeffs[0];
                    if r.rhs % a != 0 {
                        return Ok(None);
                    }
                    fixed[c] = Some(r.rhs / a);
                    count[c] -= 1;
                    r.alive = false;
                    changed = true;
                }
                _ => {
                    let private: Vec<(usize, i128)> = r.coeffs.iter().copied().filter(|&(c, _)| count[c] == 1).collect();
                    if private.is_empty() {
                        continue;
                    }
                    let g = private.iter().fold(0i128, |g, &(_, a)| g.gcd(&a));
                    if g == 1 {
                        let others: Vec<(usize, i128)> =
                            r.coeffs.iter().copied().filter(|&(c, _)| count[c] != 1).collect();
                        for &(c, _) in &r.coeffs {
                            count[c] -= 1;
                        }
                        r.alive = false;
                        steps.push(Step::Row { private, others, rhs: r.rhs });
                        changed = true;
                    } else if private.len() > 1 {
                        let new = ncols;
                        ncols += 1;
                        fixed.push(None);
                        count.push(1);
                        for &(c, _) in &private {
                            count[c] -= 1;
                        }
                        r.coeffs.retain(|(c, _)| !private.iter().any(|(p, _)| p == c));
                        r.coeffs.push((new, g));
                        steps.push(Step::Aggregate { private, new });
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for r in rows.iter_mut().filter(|r| r.alive) {
        substitute(r, &fixed)?;
    }
    let live: Vec<&PRow> = rows.iter().filter(|r| r.alive).collect();
    let mut val: Vec<BigInt> = fixed.iter().map(|f| f.map_or_else(BigInt::zero, BigInt::from)).collect();

    // renumber the columns still in play
    let mut index = vec![usize::MAX; ncols];
    let mut active = Vec::new();
    for r in &live {
        for &(c, _) in &r.coeffs {
            if index[c] == usize::MAX {
                index[c] = active.len();
                active.push(c);
            }
        }
    }
    let sol = if let Some(p) = congruence_prime(&live, &count) {
        solve_congruences(&live, &count, p, &index, active.len())
    } else {
        let rws: Vec<Vec<(usize, BigInt)>> =
            live.iter().map(|r| r.coeffs.iter().map(|&(c, a)| (index[c], BigInt::from(a))).collect()).collect();
        let rhs: Vec<BigInt> = live.iter().map(|r| BigInt::from(r.rhs)).collect();
        hnf::solve_exact(active.len(), &rws, &rhs)
    };
    let Some(sol) = sol else { return Ok(None) };
    for (i, &c) in active.iter().enumerate() {
        val[c] = sol[i].clone();
    }
    for step in steps.iter().rev() {
        match step {
            Step::Row { private, others, rhs } => {
                let mut r = BigInt::from(*rhs);
                for &(c, a) in others {
                    r -= &val[c] * a;
                }
                let coeffs: Vec<BigInt> = private.iter().map(|&(_, a)| BigInt::from(a)).collect();
                let (_, u) = ext_gcd_list(&coeffs);
                for (&(c, _), uj) in private.iter().zip(u) {
                    val[c] = uj * &r;
                }
            }
            Step::Aggregate { private, new } => {
                let coeffs: Vec<BigInt> = private.iter().map(|&(_, a)| BigInt::from(a)).collect();
                let (_, u) = ext_gcd_list(&coeffs);
                let z = val[*new].clone();
                for (&(c, _), uj) in private.iter().zip(u) {
                    val[c] = uj * &z;
                }
            }
        }
    }
    val.truncate(s.num_vars);
    Ok(Some(val))
}

/// If every row is `Σ a_j x_j + p·s = rhs` with a private slack `s` and one
/// common prime `p`, returns `p`.
fn congruence_prime(rows: &[&PRow], count: &[usize]) -> Option<i128> {
    let mut p: Option<i128> = None;
    for r in rows {
        let private: Vec<i128> = r.coeffs.iter().filter(|(c, _)| count[*c] == 1).map(|&(_, a)| a.abs()).collect();
        if private.len() != 1 {
            return None;
        }
        match p {
            None => p = Some(private[0]),
            Some(q) if q == private[0] => {}
            _ => return None,
        }
    }
    p.filter(|&p| is_prime(p) && p < u32::MAX as i128)
}

fn solve_congruences(rows: &[&PRow], count: &[usize], p: i128, index: &[usize], n: usize) -> Option<Vec<BigInt>> {
    // slacks are private, so the elimination only runs over shared columns
    let mut shared = vec![usize::MAX; n];
    let mut width = 0;
    for r in rows {
        for &(c, _) in &r.coeffs {
            if count[c] != 1 && shared[index[c]] == usize::MAX {
                shared[index[c]] = width;
                width += 1;
            }
        }
    }
    let mrows: Vec<(Vec<(usize, u64)>, u64)> = rows
        .iter()
        .map(|r| {
            let cs = r
                .coeffs
                .iter()
                .filter(|(c, _)| count[*c] != 1)
                .map(|&(c, a)| (shared[index[c]], a.rem_euclid(p) as u64))
                .collect();
            (cs, r.rhs.rem_euclid(p) as u64)
        })
        .collect();
    let x = modp::modp_solve(p as u64, width, &mrows)?;
    let mut out = vec![BigInt::zero(); n];
    for (i, &k) in shared.iter().enumerate() {
        if k != usize::MAX {
            out[i] = BigInt::from(x[k]);
        }
    }
    for r in rows {
        let mut rest = BigInt::from(r.rhs);
        let mut slack = None;
        for &(c, a) in &r.coeffs {
            if count[c] == 1 {
                slack = Some((c, a));
            } else {
                rest -= &out[index[c]] * a;
            }
        }
        let (c, a) = slack.expect("congruence row has a slack");
        let (q, rem) = rest.div_rem(&BigInt::from(a));
        debug_assert!(rem.is_zero());
        out[index[c]] = q;
    }
    Some(out)
}
