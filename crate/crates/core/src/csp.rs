//! Finite constraint networks shared by the consistency engines and
//! homomorphism search. Relations are abstract so that temporal relations can
//! answer support queries at pattern level instead of scanning tuples.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

pub type Dom = FixedBitSet;

pub trait FiniteRelation: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;

    fn contains(&self, t: &[usize]) -> bool;

    fn is_empty(&self) -> bool;

    /// For every position, the values having a supporting tuple inside `doms`.
    /// `out[i]` arrives cleared with the right length.
    fn supports(&self, doms: &[&Dom], out: &mut [Dom]);

    /// Relation on `new_arity` positions: `t'` belongs iff the tuple
    /// `i ↦ t'[classes[i]]` belongs to `self`.
    fn merge(&self, classes: &[usize], new_arity: usize) -> Arc<dyn FiniteRelation>;
}

/// Explicit tuple list over `{0..size-1}`.
#[derive(Clone, Debug)]
pub struct TupleRelation {
    arity: usize,
    tuples: Vec<Vec<usize>>,
    set: HashSet<Vec<usize>>,
}

impl TupleRelation {
    pub fn new(arity: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort();
        tuples.dedup();
        let set = tuples.iter().cloned().collect();
        TupleRelation { arity, tuples, set }
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }
}

impl FiniteRelation for TupleRelation {
    fn arity(&self) -> usize {
        self.arity
    }

    fn contains(&self, t: &[usize]) -> bool {
        self.set.contains(t)
    }

    fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    fn supports(&self, doms: &[&Dom], out: &mut [Dom]) {
        for t in &self.tuples {
            if t.iter().zip(doms).all(|(&v, d)| d.contains(v)) {
                for (i, &v) in t.iter().enumerate() {
                    out[i].insert(v);
                }
            }
        }
    }

    fn merge(&self, classes: &[usize], new_arity: usize) -> Arc<dyn FiniteRelation> {
        let mut out = Vec::new();
        'next: for t in &self.tuples {
            let mut img = vec![usize::MAX; new_arity];
            for (i, &c) in classes.iter().enumerate() {
                if img[c] == usize::MAX {
                    img[c] = t[i];
                } else if img[c] != t[i] {
                    continue 'next;
                }
            }
            out.push(img);
        }
        Arc::new(TupleRelation::new(new_arity, out))
    }
}

#[derive(Clone, Debug)]
pub struct CspConstraint {
    pub scope: Vec<usize>,
    pub rel: Arc<dyn FiniteRelation>,
}

/// A constraint network with pairwise distinct scope entries per constraint.
#[derive(Clone, Debug)]
pub struct Csp {
    pub num_vars: usize,
    pub dom_size: usize,
    pub constraints: Vec<CspConstraint>,
    /// variable → constraints mentioning it
    pub watch: Vec<Vec<usize>>,
    /// set when a nullary constraint is false
    pub infeasible: bool,
}

impl Csp {
    pub fn new(num_vars: usize, dom_size: usize) -> Self {
        Csp {
            num_vars,
            dom_size,
            constraints: Vec::new(),
            watch: vec![Vec::new(); num_vars],
            infeasible: false,
        }
    }

    /// Adds `rel(scope)`, collapsing repeated variables first.
    pub fn add(&mut self, scope: &[usize], rel: Arc<dyn FiniteRelation>) {
        assert_eq!(scope.len(), rel.arity(), "scope length must match arity");
        let mut distinct: Vec<usize> = Vec::new();
        let mut classes = Vec::with_capacity(scope.len());
        for &v in scope {
            match distinct.iter().position(|&w| w == v) {
                Some(p) => classes.push(p),
                None => {
                    classes.push(distinct.len());
                    distinct.push(v);
                }
            }
        }
        let rel = if distinct.len() == scope.len() {
            rel
        } else {
            rel.merge(&classes, distinct.len())
        };
        if distinct.is_empty() {
            if rel.is_empty() {
                self.infeasible = true;
            }
            return;
        }
        let idx = self.constraints.len();
        for &v in &distinct {
            self.watch[v].push(idx);
        }
        self.constraints.push(CspConstraint { scope: distinct, rel });
    }

    pub fn full_domains(&self) -> Vec<Dom> {
        let mut d = Dom::with_capacity(self.dom_size);
        d.insert_range(..);
        vec![d; self.num_vars]
    }

    /// True iff `assignment` satisfies every constraint.
    pub fn check(&self, assignment: &[usize]) -> bool {
        !self.infeasible
            && self.constraints.iter().all(|c| {
                let t: Vec<usize> = c.scope.iter().map(|&v| assignment[v]).collect();
                c.rel.contains(&t)
            })
    }
}

/// Arc-consistency propagation starting from the constraints in `seed`.
/// Returns false on a domain wipe-out.
pub fn propagate(csp: &Csp, doms: &mut [Dom], seed: impl IntoIterator<Item = usize>) -> bool {
    if csp.infeasible {
        return false;
    }
    let m = csp.constraints.len();
    let mut queued = vec![false; m];
    let mut queue = std::collections::VecDeque::new();
    for c in seed {
        if !queued[c] {
            queued[c] = true;
            queue.push_back(c);
        }
    }
    let mut out: Vec<Dom> = Vec::new();
    while let Some(ci) = queue.pop_front() {
        queued[ci] = false;
        let c = &csp.constraints[ci];
        let r = c.scope.len();
        out.clear();
        out.resize(r, Dom::with_capacity(csp.dom_size));
        {
            let refs: Vec<&Dom> = c.scope.iter().map(|&v| &doms[v]).collect();
            c.rel.supports(&refs, &mut out);
        }
        for (i, &v) in c.scope.iter().enumerate() {
            out[i].intersect_with(&doms[v]);
            if out[i].count_ones(..) != doms[v].count_ones(..) {
                if out[i].is_clear() {
                    return false;
                }
                doms[v].clone_from(&out[i]);
                for &other in &csp.watch[v] {
                    if other != ci && !queued[other] {
                        queued[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
    }
    true
}

/// Maximal arc-consistent domains inside `doms`, or `None` on wipe-out.
pub fn arc_consistent(csp: &Csp, mut doms: Vec<Dom>) -> Option<Vec<Dom>> {
    if doms.iter().any(|d| d.is_clear()) {
        return None;
    }
    if propagate(csp, &mut doms, 0..csp.constraints.len()) {
        Some(doms)
    } else {
        None
    }
}

/// Singleton arc consistency: greatest fixpoint below `doms`.
pub fn singleton_arc_consistent(csp: &Csp, doms: Vec<Dom>) -> Option<Vec<Dom>> {
    let mut doms = arc_consistent(csp, doms)?;
    loop {
        let probes: Vec<(usize, usize)> = (0..csp.num_vars)
            .filter(|&x| doms[x].count_ones(..) > 1)
            .flat_map(|x| doms[x].ones().map(move |v| (x, v)).collect::<Vec<_>>())
            .collect();
        let current = &doms;
        let ok = crate::par::map(&probes, |&(x, v)| {
            let mut d = current.clone();
            d[x].clear();
            d[x].insert(v);
            propagate(csp, &mut d, csp.watch[x].iter().copied())
        });
        let mut changed_vars = Vec::new();
        for (&(x, v), good) in probes.iter().zip(ok) {
            if !good {
                doms[x].remove(v);
                changed_vars.push(x);
            }
        }
        if changed_vars.is_empty() {
            return Some(doms);
        }
        changed_vars.dedup();
        if changed_vars.iter().any(|&x| doms[x].is_clear()) {
            return None;
        }
        let seed: Vec<usize> = changed_vars
            .iter()
            .flat_map(|&x| csp.watch[x].iter().copied())
            .collect();
        if !propagate(csp, &mut doms, seed) {
            return None;
        }
    }
}

/// Backtracking search maintaining arc consistency. Variables with the
/// smallest domain first, values ascending. Calls `found` on each solution
/// until it returns false.
pub fn search(csp: &Csp, doms: Vec<Dom>, found: &mut dyn FnMut(&[usize]) -> bool) {
    if let Some(doms) = arc_consistent(csp, doms) {
        search_rec(csp, doms, found);
    }
}

fn search_rec(csp: &Csp, doms: Vec<Dom>, found: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    let pick = (0..csp.num_vars)
        .filter(|&x| doms[x].count_ones(..) > 1)
        .min_by_key(|&x| (doms[x].count_ones(..), x));
    match pick {
        None => {
            let a: Vec<usize> = doms.iter().map(|d| d.minimum().unwrap()).collect();
            debug_assert!(csp.check(&a));
            found(&a)
        }
        Some(x) => {
            for v in doms[x].ones() {
                let mut d = doms.clone();
                d[x].clear();
                d[x].insert(v);
                if propagate(csp, &mut d, csp.watch[x].iter().copied()) && !search_rec(csp, d, found) {
                    return false;
                }
            }
            true
        }
    }
}

/// First solution in search order, if any.
pub fn first_solution(csp: &Csp) -> Option<Vec<usize>> {
    let mut sol = None;
    search(csp, csp.full_domains(), &mut |a| {
        sol = Some(a.to_vec());
        false
    });
    sol
}

pub fn dom_from(size: usize, values: impl IntoIterator<Item = usize>) -> Dom {
    let mut d = Dom::with_capacity(size);
    for v in values {
        d.insert(v);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neq(n: usize) -> Arc<dyn FiniteRelation> {
        let mut t = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    t.push(vec![a, b]);
                }
            }
        }
        Arc::new(TupleRelation::new(2, t))
    }

    #[test]
    fn repeated_scope_collapses() {
        let mut csp = Csp::new(1, 2);
        csp.add(&[0, 0], neq(2));
        assert_eq!(csp.constraints[0].scope, vec![0]);
        assert!(csp.constraints[0].rel.is_empty());
        assert!(arc_consistent(&csp, csp.full_domains()).is_none());
    }

    #[test]
    fn triangle_two_colors() {
        let mut csp = Csp::new(3, 2);
        csp.add(&[0, 1], neq(2));
        csp.add(&[1, 2], neq(2));
        csp.add(&[2, 0], neq(2));
        assert!(arc_consistent(&csp, csp.full_domains()).is_some());
        assert!(singleton_arc_consistent(&csp, csp.full_domains()).is_none());
        assert!(first_solution(&csp).is_none());
    }

    #[test]
    fn triangle_three_colors() {
        let mut csp = Csp::new(3, 3);
        csp.add(&[0, 1], neq(3));
        csp.add(&[1, 2], neq(3));
        csp.add(&[2, 0], neq(3));
        assert_eq!(first_solution(&csp), Some(vec![0, 1, 2]));
        let mut count = 0;
        search(&csp, csp.full_domains(), &mut |_| {
            count += 1;
            true
        });
        assert_eq!(count, 6);
    }
}
