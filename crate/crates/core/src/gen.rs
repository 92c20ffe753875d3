//! Random instance generators: planted satisfiable instances, brute-force
//! certified unsatisfiable cores, and noise embedding.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::relcore::{Signature, Structure};
use crate::tempsolve::{verify_assignment, TemporalInstance};
use crate::temporal::{TemporalRelation, TemporalStructure};

fn random_args<R: Rng>(rng: &mut R, n: usize, r: usize) -> Vec<usize> {
    if n >= r {
        rand::seq::index::sample(rng, n, r).into_vec()
    } else {
        (0..r).map(|_| rng.gen_range(0..n)).collect()
    }
}

/// `n` variables, up to `m` constraints over the relations of `b` (implicit
/// `<` included), all satisfied by a hidden assignment with values in
/// `0..=n/2`. Returns the instance and the hidden assignment.
pub fn planted<R: Rng>(b: &TemporalStructure, n: usize, m: usize, rng: &mut R) -> (TemporalInstance, Vec<i64>) {
    planted_with(&b.relations(), n, m, rng)
}

/// [`planted`] over an explicit relation list.
pub fn planted_with<R: Rng>(rels: &[(String, TemporalRelation)], n: usize, m: usize, rng: &mut R) -> (TemporalInstance, Vec<i64>) {
    let top = (n / 2).max(1) as i64;
    let hidden: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=top)).collect();
    let mut x = TemporalInstance::with_size(n);
    if n == 0 {
        return (x, hidden);
    }
    let mut attempts = 0;
    while x.constraints.len() < m && attempts < 50 * m.max(1) {
        attempts += 1;
        let (_, r) = rels.choose(rng).expect("template has relations");
        let args = random_args(rng, n, r.arity());
        let t: Vec<i64> = args.iter().map(|&v| hidden[v]).collect();
        if r.eval(&t).unwrap_or(false) {
            x.push(r.clone(), args);
        }
    }
    debug_assert!(verify_assignment(&x, &hidden));
    (x, hidden)
}

/// Plain random instance: `m` constraints with uniformly chosen relations
/// and distinct arguments where possible.
pub fn random_instance<R: Rng>(b: &TemporalStructure, n: usize, m: usize, rng: &mut R) -> TemporalInstance {
    let rels = b.relations();
    let mut x = TemporalInstance::with_size(n);
    for _ in 0..m {
        let (_, r) = rels.choose(rng).expect("template has relations");
        x.push(r.clone(), random_args(rng, n, r.arity()));
    }
    x
}

/// Exhaustive search over rank assignments in `0..n`. Every rational
/// solution is order-isomorphic to one of these, so `None` certifies
/// unsatisfiability. Intended for small `n`.
pub fn brute_force(x: &TemporalInstance) -> Option<Vec<i64>> {
    let n = x.len();
    // constraints checked once their last argument (in variable order) is set
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (r, args)) in x.constraints.iter().enumerate() {
        match args.iter().max() {
            Some(&v) => due[v].push(i),
            None => {
                if r.is_empty() {
                    return None;
                }
            }
        }
    }
    fn rec(x: &TemporalInstance, due: &[Vec<usize>], s: &mut Vec<i64>, v: usize) -> bool {
        if v == s.len() {
            return true;
        }
        for val in 0..s.len() as i64 {
            s[v] = val;
            let ok = due[v].iter().all(|&c| {
                let (r, args) = &x.constraints[c];
                let t: Vec<i64> = args.iter().map(|&a| s[a]).collect();
                r.eval(&t).unwrap_or(false)
            });
            if ok && rec(x, due, s, v + 1) {
                return true;
            }
        }
        false
    }
    let mut s = vec![0i64; n];
    if rec(x, &due, &mut s, 0) {
        Some(s)
    } else {
        None
    }
}

/// Random instance on `n` variables that [`brute_force`] refutes, with
/// constraints added one at a time until unsatisfiable. A quarter of the
/// constraints may repeat a variable, which some templates need to be
/// refutable at all. `None` if `tries` runs all stay satisfiable.
pub fn unsat_core<R: Rng>(b: &TemporalStructure, n: usize, max_m: usize, tries: usize, rng: &mut R) -> Option<TemporalInstance> {
    unsat_core_with(&b.relations(), n, max_m, tries, rng)
}

pub fn unsat_core_with<R: Rng>(
    rels: &[(String, TemporalRelation)],
    n: usize,
    max_m: usize,
    tries: usize,
    rng: &mut R,
) -> Option<TemporalInstance> {
    for _ in 0..tries {
        let mut x = TemporalInstance::with_size(n);
        for _ in 0..max_m {
            let (_, r) = rels.choose(rng).expect("template has relations");
            let args = if rng.gen_bool(0.25) {
                (0..r.arity()).map(|_| rng.gen_range(0..n)).collect()
            } else {
                random_args(rng, n, r.arity())
            };
            x.push(r.clone(), args);
            if brute_force(&x).is_none() {
                return Some(x);
            }
        }
    }
    None
}

/// `core` on a random subset of `core.len() + extra` variables together with
/// `m` planted constraints touching the rest. Unsatisfiability of `core`
/// carries over.
pub fn embed<R: Rng>(core: &TemporalInstance, b: &TemporalStructure, extra: usize, m: usize, rng: &mut R) -> TemporalInstance {
    embed_with(core, &b.relations(), extra, m, rng)
}

pub fn embed_with<R: Rng>(
    core: &TemporalInstance,
    rels: &[(String, TemporalRelation)],
    extra: usize,
    m: usize,
    rng: &mut R,
) -> TemporalInstance {
    let n = core.len() + extra;
    let (noise, _) = planted_with(rels, n, m, rng);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut x = noise;
    for (r, args) in &core.constraints {
        x.push(r.clone(), args.iter().map(|&v| perm[v]).collect());
    }
    x.constraints.shuffle(rng);
    x
}

/// A cycle `v0 < v1 < … < v(len-1) < v0` of the given relation, placed on
/// `len` fresh variables.
pub fn cycle(r: &TemporalRelation, len: usize) -> TemporalInstance {
    assert_eq!(r.arity(), 2);
    let mut x = TemporalInstance::with_size(len);
    for i in 0..len {
        x.push(r.clone(), vec![i, (i + 1) % len]);
    }
    x
}

/// Random structure: every tuple of every relation present with probability `p`.
pub fn random_structure<R: Rng>(sig: &Signature, n: usize, p: f64, rng: &mut R) -> Structure {
    let rels = sig
        .entries
        .iter()
        .map(|(_, r)| {
            let total = n.pow(*r as u32);
            (0..total)
                .filter(|_| rng.gen_bool(p))
                .map(|c| crate::powfun::decode(c, n, *r))
                .collect()
        })
        .collect();
    Structure::new(sig.clone(), n, rels)
}

/// Structure over `sig` with `facts` random tuples in total.
pub fn sparse_structure<R: Rng>(sig: &Signature, n: usize, facts: usize, rng: &mut R) -> Structure {
    let mut rels = vec![Vec::new(); sig.len()];
    if n > 0 && !sig.is_empty() {
        for _ in 0..facts {
            let r = rng.gen_range(0..sig.len());
            rels[r].push((0..sig.entries[r].1).map(|_| rng.gen_range(0..n)).collect());
        }
    }
    Structure::new(sig.clone(), n, rels)
}
