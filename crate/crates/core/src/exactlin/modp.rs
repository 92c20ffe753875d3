//! Gaussian elimination over GF(2) (bit-packed) and over GF(p).

/// Equation `⊕_{v ∈ vars} x_v = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Equation {
    pub vars: Vec<usize>,
    pub rhs: bool,
}

impl Gf2Equation {
    pub fn new(vars: Vec<usize>, rhs: bool) -> Self {
        Gf2Equation { vars, rhs }
    }
}

struct BitRow {
    words: Vec<u64>,
    rhs: bool,
}

impl BitRow {
    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, o: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= *b;
        }
        self.rhs ^= o.rhs;
    }
}

/// Some assignment satisfying all equations and pins, free variables 0.
pub fn gf2_solve(num_vars: usize, eqs: &[Gf2Equation], pins: &[(usize, bool)]) -> Option<Vec<bool>> {
    let words = num_vars.div_ceil(64).max(1);
    let mut rows: Vec<BitRow> = Vec::with_capacity(eqs.len() + pins.len());
    for e in eqs {
        let mut r = BitRow { words: vec![0; words], rhs: e.rhs };
        for &v in &e.vars {
            r.flip(v);
        }
        rows.push(r);
    }
    for &(v, b) in pins {
        let mut r = BitRow { words: vec![0; words], rhs: b };
        r.flip(v);
        rows.push(r);
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    for col in 0..num_vars {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(p, next);
        let pr = std::mem::replace(&mut rows[next], BitRow { words: Vec::new(), rhs: false });
        for r in rows.iter_mut() {
            if !r.words.is_empty() && r.get(col) {
                r.xor(&pr);
            }
        }
        rows[next] = pr;
        pivots.push((next, col));
        next += 1;
    }
    if rows[next..].iter().any(|r| r.rhs) {
        return None;
    }
    let mut x = vec![false; num_vars];
    for &(r, c) in &pivots {
        x[c] = rows[r].rhs;
    }
    debug_assert!(check_gf2(&x, eqs, pins));
    Some(x)
}

pub fn check_gf2(x: &[bool], eqs: &[Gf2Equation], pins: &[(usize, bool)]) -> bool {
    eqs.iter().all(|e| e.vars.iter().fold(false, |acc, &v| acc ^ x[v]) == e.rhs)
        && pins.iter().all(|&(v, b)| x[v] == b)
}

/// Solves `Σ a_j x_j ≡ rhs (mod p)` for prime `p`; free variables 0.
/// Coefficients and right-hand sides must already be reduced into `0..p`.
pub fn modp_solve(p: u64, num_vars: usize, rows: &[(Vec<(usize, u64)>, u64)]) -> Option<Vec<u64>> {
    if p == 2 {
        let eqs: Vec<Gf2Equation> = rows
            .iter()
            .map(|(cs, r)| {
                let mut vars: Vec<usize> = cs.iter().filter(|(_, a)| a % 2 == 1).map(|&(v, _)| v).collect();
                vars.sort_unstable();
                // repeated entries cancel in pairs
                let mut dedup = Vec::with_capacity(vars.len());
                for v in vars {
                    if dedup.last() == Some(&v) {
                        dedup.pop();
                    } else {
                        dedup.push(v);
                    }
                }
                Gf2Equation::new(dedup, r % 2 == 1)
            })
            .collect();
        return gf2_solve(num_vars, &eqs, &[]).map(|x| x.into_iter().map(u64::from).collect());
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let inv = |a: u64| {
        // Fermat
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    let mut mat: Vec<Vec<u64>> = rows
        .iter()
        .map(|(cs, r)| {
            let mut v = vec![0u64; num_vars + 1];
            for &(c, a) in cs {
                v[c] = (v[c] + a) % p;
            }
            v[num_vars] = r % p;
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in 0..num_vars {
        let Some(pr) = (next..mat.len()).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(pr, next);
        let iv = inv(mat[next][col]);
        for v in mat[next].iter_mut() {
            *v = mulm(*v, iv);
        }
        let prow = mat[next].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != next && row[col] != 0 {
                let f = row[col];
                for (a, b) in row.iter_mut().zip(&prow) {
                    *a = (*a + p - mulm(f, *b)) % p;
                }
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    if mat[next..].iter().any(|r| r[num_vars] != 0) {
        return None;
    }
    let mut x = vec![0u64; num_vars];
    for &(r, c) in &pivots {
        x[c] = mat[r][num_vars];
    }
    Some(x)
}
