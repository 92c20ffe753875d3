//! Linear relaxations of the homomorphism problem: AIP, BLP, BLP+AIP and the
//! singleton variant sAIP.
//!
//! `saip` keeps the λ_y columns implicit. For a relation R the marginal
//! vectors of its tuples span an affine lattice; membership of the vector of
//! λ_x marginals in that lattice is written as equalities and congruences
//! over the λ_x columns only. Integer solutions of this system are exactly
//! the λ_x parts of integer solutions of the full system.
//!
//! The family returned by `saip` is the greatest fixpoint of the removal
//! rule. Any family witnessing sAIP is a post-fixpoint of that rule, so it
//! lies below the greatest fixpoint; hence sAIP holds iff the fixpoint is
//! nonempty everywhere.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::caps::caps;
use crate::consistency::Domains;
use crate::error::{Error, Result};
use crate::exactlin::{self, AffineSystem};
use crate::relcore::{Constraint, Instance, Structure};

#[derive(Clone, Debug)]
pub struct RelaxationSystem {
    pub system: AffineSystem,
    /// column of λ_x(a) at `[x][a]`
    pub var_cols: Vec<Vec<usize>>,
    /// per constraint: its relation index, and the column of λ_y(b) for the
    /// b-th tuple of the relation
    pub con_cols: Vec<(usize, Vec<usize>)>,
    pub constraints: Vec<Constraint>,
}

fn resolve(x: &Instance, a: &Structure) -> Result<Vec<(Constraint, usize)>> {
    let mut cons: Vec<Constraint> = x.constraints.clone();
    cons.sort();
    cons.dedup();
    cons.into_iter()
        .map(|c| {
            let i = a
                .index_of(&c.rel)
                .ok_or_else(|| Error::Signature(format!("relation `{}` not in template", c.rel)))?;
            if a.arity(i) != c.args.len() {
                return Err(Error::Signature(format!("`{}` used with wrong arity", c.rel)));
            }
            if c.args.iter().any(|&v| v >= x.variables.len()) {
                return Err(Error::Invalid(format!("constraint {c:?} on unknown variable")));
            }
            Ok((c, i))
        })
        .collect()
}

pub fn build_relaxation(x: &Instance, a: &Structure) -> Result<RelaxationSystem> {
    let cons = resolve(x, a)?;
    let n = a.size;
    let nv = x.variables.len();
    let total: usize = nv * n + cons.iter().map(|(_, i)| a.relations[*i].len()).sum::<usize>();
    if total > caps().relax {
        return Err(Error::Cap(format!("relaxation needs {total} columns, cap {}", caps().relax)));
    }
    let var_cols: Vec<Vec<usize>> = (0..nv).map(|v| (0..n).map(|b| v * n + b).collect()).collect();
    let mut next = nv * n;
    let mut con_cols = Vec::with_capacity(cons.len());
    for (_, i) in &cons {
        let cols: Vec<usize> = (next..next + a.relations[*i].len()).collect();
        next += cols.len();
        con_cols.push((*i, cols));
    }
    let mut s = AffineSystem::new(next);
    let mut labels = vec![String::new(); next];
    for v in 0..nv {
        for b in 0..n {
            labels[var_cols[v][b]] = format!("λ[{}]({b})", x.variables[v]);
        }
        s.push(var_cols[v].iter().map(|&c| (c, 1)).collect(), 1);
    }
    for (ci, (c, ri)) in cons.iter().enumerate() {
        let tuples = &a.relations[*ri];
        let cols = &con_cols[ci].1;
        for (t, &col) in tuples.iter().zip(cols) {
            labels[col] = format!("λ[{}{:?}]({t:?})", c.rel, c.args);
        }
        s.push(cols.iter().map(|&c| (c, 1)).collect(), 1);
        for (pos, &v) in c.args.iter().enumerate() {
            for val in 0..n {
                let mut row: Vec<(usize, i64)> = tuples
                    .iter()
                    .zip(cols)
                    .filter(|(t, _)| t[pos] == val)
                    .map(|(_, &col)| (col, 1))
                    .collect();
                row.push((var_cols[v][val], -1));
                s.push(row, 0);
            }
        }
    }
    s.labels = Some(labels);
    Ok(RelaxationSystem { system: s, var_cols, con_cols, constraints: cons.into_iter().map(|(c, _)| c).collect() })
}

pub fn aip(x: &Instance, a: &Structure) -> Result<bool> {
    let r = build_relaxation(x, a)?;
    Ok(exactlin::integer_feasible(&r.system).is_some())
}

pub fn blp(x: &Instance, a: &Structure) -> Result<bool> {
    let r = build_relaxation(x, a)?;
    let all: BTreeSet<usize> = (0..r.system.num_vars).collect();
    Ok(exactlin::rational_feasible(&r.system, &all).is_some())
}

/// BLP, then AIP restricted to the columns in the relative interior support.
pub fn blp_aip(x: &Instance, a: &Structure) -> Result<bool> {
    let r = build_relaxation(x, a)?;
    let all: BTreeSet<usize> = (0..r.system.num_vars).collect();
    if exactlin::rational_feasible(&r.system, &all).is_none() {
        return Ok(false);
    }
    let support = exactlin::interior_support(&r.system, &all)?;
    let keep: Vec<bool> = (0..r.system.num_vars).map(|c| support.contains(&c)).collect();
    let (restricted, _) = r.system.restrict_columns(&keep);
    Ok(exactlin::integer_feasible(&restricted).is_some())
}

/// Full-system sAIP probe: is there an integer solution with λ_x(v) = 1 and
/// all λ outside `doms` zero.
pub fn saip_probe_full(r: &RelaxationSystem, doms: &Domains, x: usize, v: usize) -> bool {
    let n = r.var_cols.first().map_or(0, Vec::len);
    let mut keep = vec![true; r.system.num_vars];
    for (y, cols) in r.var_cols.iter().enumerate() {
        for b in 0..n {
            let allowed = if y == x { b == v } else { doms.contains(y, b) };
            if !allowed {
                keep[cols[b]] = false;
            }
        }
    }
    let (s, _) = r.system.restrict_columns(&keep);
    exactlin::integer_feasible(&s).is_some()
}

/// sAIP by the full relaxation, removing one value at a time in `order`
/// (repeated until stable).
pub fn saip_full_ordered(x: &Instance, a: &Structure, order: &[(usize, usize)]) -> Result<Option<Domains>> {
    let r = build_relaxation(x, a)?;
    let mut d = Domains((0..x.variables.len()).map(|_| (0..a.size).collect()).collect());
    loop {
        let mut changed = false;
        for &(v, b) in order {
            if d.contains(v, b) && !saip_probe_full(&r, &d, v, b) {
                d.0[v].retain(|&w| w != b);
                changed = true;
                if d.0[v].is_empty() {
                    return Ok(None);
                }
            }
        }
        if !changed {
            return Ok(Some(d));
        }
    }
}

/// Membership forms of one relation over a template of size `n`, in
/// coordinates `(position, value) ↦ position·n + value`, canonicalized with
/// the per-position sums equal to one. `rhs` is the value at the first tuple.
#[derive(Clone, Debug)]
pub struct RelationForms {
    pub arity: usize,
    pub n: usize,
    /// (coefficients, modulus or 0 for an equality, rhs)
    pub forms: Vec<(Vec<i64>, i64, i64)>,
}

impl RelationForms {
    pub fn compute(tuples: &[Vec<usize>], arity: usize, n: usize) -> Result<Option<Self>> {
        let Some(b0) = tuples.first() else { return Ok(None) };
        let d = arity * n;
        let marg = move |t: &[usize]| -> Vec<i64> {
            let mut v = vec![0i64; d];
            for (i, &x) in t.iter().enumerate() {
                v[i * n + x] += 1;
            }
            v
        };
        let base = marg(b0);
        let gens = || -> Box<dyn Iterator<Item = Vec<i64>>> {
            let base = base.clone();
            let marg = marg;
            let owned: Vec<Vec<usize>> = tuples.to_vec();
            Box::new(owned.into_iter().map(move |t| {
                let e = marg(&t);
                e.iter().zip(&base).map(|(a, b)| a - b).collect()
            }))
        };
        let sat_rank = d - arity;
        let basis = exactlin::lattice_basis(d, gens, Some(sat_rank));
        let saturated = basis.len() == sat_rank
            && basis.iter().all(|row| row.iter().find(|x| !x.is_zero()).is_some_and(|p| p.abs() == BigInt::from(1)));
        let mut forms = Vec::new();
        if !saturated {
            let lf = exactlin::lattice_forms(d, &basis);
            let mut raw: Vec<(Vec<BigInt>, BigInt)> = lf.equalities.into_iter().map(|f| (f, BigInt::zero())).collect();
            raw.extend(lf.congruences);
            for (f, s) in raw {
                if let Some(form) = canonical_form(&f, &s, arity, n, &base)? {
                    forms.push(form);
                }
            }
        }
        forms.sort();
        forms.dedup();
        Ok(Some(RelationForms { arity, n, forms }))
    }

    /// Whether a marginal vector (one distribution per position, summing to
    /// one) satisfies every form.
    pub fn admits(&self, marginals: &[Vec<i64>]) -> bool {
        self.forms.iter().all(|(f, s, rhs)| {
            let v: i128 = (0..self.arity)
                .flat_map(|i| (0..self.n).map(move |a| (i, a)))
                .map(|(i, a)| f[i * self.n + a] as i128 * marginals[i][a] as i128)
                .sum();
            if *s == 0 {
                v == *rhs as i128
            } else {
                (v - *rhs as i128).rem_euclid(*s as i128) == 0
            }
        })
    }
}

fn canonical_form(f: &[BigInt], s: &BigInt, arity: usize, n: usize, base: &[i64]) -> Result<Option<(Vec<i64>, i64, i64)>> {
    let reduce = |v: &BigInt| -> BigInt { if s.is_zero() { v.clone() } else { v.mod_floor(s) } };
    let mut g: Vec<BigInt> = f.iter().map(reduce).collect();
    for i in 0..arity {
        let block = &g[i * n..(i + 1) * n];
        let mut counts: HashMap<&BigInt, usize> = HashMap::new();
        for v in block {
            *counts.entry(v).or_default() += 1;
        }
        let mode = counts
            .into_iter()
            .max_by(|(a, ca), (b, cb)| ca.cmp(cb).then_with(|| b.cmp(a)))
            .map(|(v, _)| v.clone())
            .unwrap_or_default();
        for v in &mut g[i * n..(i + 1) * n] {
            *v = reduce(&(&*v - &mode));
        }
    }
    if g.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let rhs = reduce(&g.iter().zip(base).map(|(a, &b)| a * b).sum::<BigInt>());
    let conv = |v: &BigInt| v.to_i64().ok_or_else(|| Error::Cap(format!("lattice form coefficient {v} too large")));
    let coeffs = g.iter().map(conv).collect::<Result<Vec<_>>>()?;
    Ok(Some((coeffs, conv(s)?, conv(&rhs)?)))
}

/// The compact integer system over λ_x columns for the given domains.
struct Compact<'a> {
    nv: usize,
    n: usize,
    cons: Vec<(Constraint, usize)>,
    forms: &'a HashMap<usize, RelationForms>,
}

impl Compact<'_> {
    fn system(&self, doms: &[Vec<usize>]) -> AffineSystem {
        let mut col = vec![vec![usize::MAX; self.n]; self.nv];
        let mut next = 0;
        for (x, d) in doms.iter().enumerate() {
            for &v in d {
                col[x][v] = next;
                next += 1;
            }
        }
        let slack_count: usize = self
            .cons
            .iter()
            .map(|(_, ri)| self.forms[ri].forms.iter().filter(|f| f.1 != 0).count())
            .sum();
        let mut s = AffineSystem::new(next + slack_count);
        let mut slack = next;
        for (x, d) in doms.iter().enumerate() {
            s.push(d.iter().map(|&v| (col[x][v], 1)).collect(), 1);
        }
        for (c, ri) in &self.cons {
            for (f, m, rhs) in &self.forms[ri].forms {
                let mut row = Vec::new();
                for (i, &x) in c.args.iter().enumerate() {
                    for &v in &doms[x] {
                        let a = f[i * self.n + v];
                        if a != 0 {
                            row.push((col[x][v], a));
                        }
                    }
                }
                if *m != 0 {
                    row.push((slack, *m));
                    slack += 1;
                }
                s.push(row, *rhs);
            }
        }
        s
    }
}

/// Lattice forms for every relation used by `x`; None if some used relation
/// is empty.
fn forms_for(cons: &[(Constraint, usize)], a: &Structure) -> Result<Option<HashMap<usize, RelationForms>>> {
    let mut used: Vec<usize> = cons.iter().map(|(_, i)| *i).collect();
    used.sort_unstable();
    used.dedup();
    let computed = crate::par::map(&used, |&i| RelationForms::compute(&a.relations[i], a.arity(i), a.size));
    let mut out = HashMap::new();
    for (i, f) in used.into_iter().zip(computed) {
        match f? {
            Some(f) => {
                out.insert(i, f);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// AIP feasibility through the compact system.
pub fn aip_compact(x: &Instance, a: &Structure) -> Result<bool> {
    let cons = resolve(x, a)?;
    let Some(forms) = forms_for(&cons, a)? else { return Ok(false) };
    let c = Compact { nv: x.variables.len(), n: a.size, cons, forms: &forms };
    let doms: Vec<Vec<usize>> = (0..c.nv).map(|_| (0..a.size).collect()).collect();
    Ok(exactlin::integer_feasible(&c.system(&doms)).is_some())
}

/// Greatest sAIP family below `start` (full domains if None).
pub fn saip_from(x: &Instance, a: &Structure, start: Option<Domains>) -> Result<Option<Domains>> {
    let cons = resolve(x, a)?;
    let nv = x.variables.len();
    let Some(forms) = forms_for(&cons, a)? else { return Ok(None) };
    let c = Compact { nv, n: a.size, cons, forms: &forms };
    let mut d = start.unwrap_or_else(|| Domains((0..nv).map(|_| (0..a.size).collect()).collect()));
    if d.0.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    loop {
        if exactlin::integer_feasible(&c.system(&d.0)).is_none() {
            return Ok(None);
        }
        let probes: Vec<(usize, usize)> =
            (0..nv).flat_map(|v| d.0[v].iter().map(move |&b| (v, b))).collect();
        let current = &d;
        let ok = crate::par::map(&probes, |&(v, b)| {
            let mut doms = current.0.clone();
            doms[v] = vec![b];
            exactlin::integer_feasible(&c.system(&doms)).is_some()
        });
        let mut changed = false;
        for (&(v, b), good) in probes.iter().zip(ok) {
            if !good {
                d.0[v].retain(|&w| w != b);
                changed = true;
            }
        }
        if d.0.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        if !changed {
            return Ok(Some(d));
        }
    }
}

pub fn saip(x: &Instance, a: &Structure) -> Result<Option<Domains>> {
    saip_from(x, a, None)
}
