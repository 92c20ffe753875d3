//! Consistency engines over finite templates: arc consistency, singleton arc
//! consistency and maximal k-strategies, plus restriction of strategies to
//! a subset of the variables.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::caps::caps;
use crate::csp::{self, Csp, Dom};
use crate::error::{Error, Result};
use crate::relcore::{to_csp, Instance, Structure};

/// One nonempty value set per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domains(pub Vec<Vec<usize>>);

impl Domains {
    pub fn from_doms(doms: &[Dom]) -> Self {
        Domains(doms.iter().map(|d| d.ones().collect()).collect())
    }

    pub fn to_doms(&self, size: usize) -> Vec<Dom> {
        self.0.iter().map(|v| csp::dom_from(size, v.iter().copied())).collect()
    }

    pub fn get(&self, x: usize) -> &[usize] {
        &self.0[x]
    }

    pub fn contains(&self, x: usize, v: usize) -> bool {
        self.0[x].binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Maximal potato system of `x` in `a`.
pub fn arc_consistency(x: &Instance, a: &Structure) -> Result<Option<Domains>> {
    let c = to_csp(x, a)?;
    Ok(ac_csp(&c))
}

pub fn ac_csp(c: &Csp) -> Option<Domains> {
    if c.num_vars > 0 && c.dom_size == 0 {
        return None;
    }
    csp::arc_consistent(c, c.full_domains()).map(|d| Domains::from_doms(&d))
}

pub fn sac(x: &Instance, a: &Structure) -> Result<Option<Domains>> {
    let c = to_csp(x, a)?;
    Ok(sac_csp(&c))
}

pub fn sac_csp(c: &Csp) -> Option<Domains> {
    if c.num_vars > 0 && c.dom_size == 0 {
        return None;
    }
    csp::singleton_arc_consistent(c, c.full_domains()).map(|d| Domains::from_doms(&d))
}

/// A family of partial homomorphisms on all variable sets of size at most k.
/// Tuples on a set are coded in base `n` following the set's sorted order.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub k: usize,
    pub n: usize,
    pub num_vars: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    sets: Vec<FixedBitSet>,
}

fn pow(n: usize, e: usize) -> usize {
    n.pow(e as u32)
}

fn encode(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * n + v)
}

fn decode(mut code: usize, n: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for i in (0..len).rev() {
        t[i] = code % n;
        code /= n;
    }
    t
}

/// Code of the tuple with position `j` removed.
fn drop_digit(code: usize, n: usize, len: usize, j: usize) -> usize {
    let p = pow(n, len - 1 - j);
    let low = code % p;
    let high = code / (p * n);
    high * p + low
}

fn subsets_upto(num_vars: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for v in start..num_vars {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

impl Strategy {
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Stored tuples on a sorted variable set.
    pub fn tuples(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        match self.index.get(subset) {
            Some(&i) => self.sets[i].ones().map(|c| decode(c, self.n, subset.len())).collect(),
            None => Vec::new(),
        }
    }

    pub fn contains(&self, subset: &[usize], t: &[usize]) -> bool {
        self.index
            .get(subset)
            .is_some_and(|&i| t.iter().all(|&v| v < self.n) && self.sets[i].contains(encode(t, self.n)))
    }

    /// H_x as a sorted value list.
    pub fn domain(&self, x: usize) -> Vec<usize> {
        self.tuples(&[x]).into_iter().map(|t| t[0]).collect()
    }

    /// H_{x,y} as pairs (value of x, value of y), any order of x and y.
    pub fn pairs(&self, x: usize, y: usize) -> Vec<(usize, usize)> {
        if x == y {
            return self.domain(x).into_iter().map(|v| (v, v)).collect();
        }
        let (lo, hi) = (x.min(y), x.max(y));
        self.tuples(&[lo, hi])
            .into_iter()
            .map(|t| if x < y { (t[0], t[1]) } else { (t[1], t[0]) })
            .collect()
    }

    pub fn domains(&self) -> Domains {
        Domains((0..self.num_vars).map(|x| self.domain(x)).collect())
    }

    /// The table as an explicit map.
    pub fn table(&self) -> BTreeMap<Vec<usize>, BTreeSet<Vec<usize>>> {
        self.subsets.iter().map(|s| (s.clone(), self.tuples(s).into_iter().collect())).collect()
    }

    /// Restriction to the variables outside `drop`, renumbered in order.
    pub fn restrict(&self, drop: &BTreeSet<usize>) -> Strategy {
        let mut map = vec![usize::MAX; self.num_vars];
        let mut next = 0;
        for (v, m) in map.iter_mut().enumerate() {
            if !drop.contains(&v) {
                *m = next;
                next += 1;
            }
        }
        let mut subsets = Vec::new();
        let mut index = HashMap::new();
        let mut sets = Vec::new();
        for (i, s) in self.subsets.iter().enumerate() {
            if s.iter().any(|v| drop.contains(v)) {
                continue;
            }
            let t: Vec<usize> = s.iter().map(|&v| map[v]).collect();
            index.insert(t.clone(), subsets.len());
            subsets.push(t);
            sets.push(self.sets[i].clone());
        }
        Strategy { k: self.k, n: self.n, num_vars: next, subsets, index, sets }
    }

    /// Violations of the strategy conditions against `c`: missing sets,
    /// tuples that are not partial homomorphisms, failures of downward
    /// closure and of the one-step extension property, empty sets.
    pub fn violations(&self, c: &Csp) -> Vec<String> {
        let mut out = Vec::new();
        if c.num_vars != self.num_vars {
            out.push(format!("strategy has {} variables, instance {}", self.num_vars, c.num_vars));
            return out;
        }
        for s in subsets_upto(self.num_vars, self.k.min(self.num_vars)) {
            let Some(&i) = self.index.get(&s) else {
                out.push(format!("set {s:?} missing"));
                continue;
            };
            if self.sets[i].is_clear() {
                out.push(format!("set {s:?} empty"));
            }
            for code in self.sets[i].ones() {
                let t = decode(code, self.n, s.len());
                if !partial_hom(c, &s, &t) {
                    out.push(format!("{s:?} ↦ {t:?} is not a partial homomorphism"));
                }
                for j in 0..s.len() {
                    let mut sub = s.clone();
                    sub.remove(j);
                    let mut st = t.clone();
                    st.remove(j);
                    if !self.contains(&sub, &st) {
                        out.push(format!("{s:?} ↦ {t:?} restricts outside the strategy"));
                    }
                }
                if s.len() < self.k {
                    for y in 0..self.num_vars {
                        if s.contains(&y) {
                            continue;
                        }
                        let mut sup = s.clone();
                        let pos = sup.partition_point(|&v| v < y);
                        sup.insert(pos, y);
                        let ok = (0..self.n).any(|v| {
                            let mut ext = t.clone();
                            ext.insert(pos, v);
                            self.contains(&sup, &ext)
                        });
                        if !ok {
                            out.push(format!("{s:?} ↦ {t:?} does not extend to x{y}"));
                        }
                    }
                }
            }
        }
        out
    }
}

fn partial_hom(c: &Csp, s: &[usize], t: &[usize]) -> bool {
    c.constraints.iter().all(|con| {
        if !con.scope.iter().all(|v| s.binary_search(v).is_ok()) {
            return true;
        }
        let img: Vec<usize> = con.scope.iter().map(|v| t[s.binary_search(v).unwrap()]).collect();
        con.rel.contains(&img)
    })
}

/// Maximal k-strategy of `x` in `a`, or None if only the trivial one exists.
pub fn k_strategy(x: &Instance, a: &Structure, k: usize) -> Result<Option<Strategy>> {
    let max_arity = a.signature.max_arity();
    if k < max_arity {
        return Err(Error::Invalid(format!("k = {k} is below the template arity {max_arity}")));
    }
    let c = to_csp(x, a)?;
    k_strategy_csp(&c, k)
}

pub fn k_strategy_csp(c: &Csp, k: usize) -> Result<Option<Strategy>> {
    k_strategy_ordered(c, k, None)
}

/// As [`k_strategy_csp`]; `order` permutes the initial worklist.
pub fn k_strategy_ordered(c: &Csp, k: usize, order: Option<&[usize]>) -> Result<Option<Strategy>> {
    let cp = caps();
    if k > cp.k {
        return Err(Error::Cap(format!("k = {k} exceeds cap {}", cp.k)));
    }
    if c.num_vars > cp.kvars {
        return Err(Error::Cap(format!("{} variables exceed the k-strategy cap {}", c.num_vars, cp.kvars)));
    }
    if let Some(con) = c.constraints.iter().find(|con| con.scope.len() > k) {
        return Err(Error::Invalid(format!("constraint on {} variables needs k ≥ {}", con.scope.len(), con.scope.len())));
    }
    if c.infeasible {
        return Ok(None);
    }
    let n = c.dom_size;
    let kk = k.min(c.num_vars);
    let subsets = subsets_upto(c.num_vars, kk);
    let cells: u128 = subsets.iter().map(|s| (n as u128).pow(s.len() as u32)).sum();
    if cells > cp.kcells as u128 {
        return Err(Error::Cap(format!("k-strategy needs {cells} cells, cap {}", cp.kcells)));
    }
    if n == 0 {
        return Ok(if c.num_vars == 0 { Some(empty_strategy(k, n, subsets)) } else { None });
    }
    let index: HashMap<Vec<usize>, usize> = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    // constraints grouped by their sorted scope
    let mut by_scope: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, con) in c.constraints.iter().enumerate() {
        let mut s = con.scope.clone();
        s.sort_unstable();
        by_scope.entry(s).or_default().push(ci);
    }
    // initial sets: all partial homomorphisms, built level by level
    let mut sets: Vec<FixedBitSet> = Vec::with_capacity(subsets.len());
    for s in &subsets {
        let len = s.len();
        let size = pow(n, len);
        let mut bs = FixedBitSet::with_capacity(size);
        let subs: Vec<usize> = (0..len)
            .map(|j| {
                let mut t = s.clone();
                t.remove(j);
                index[&t]
            })
            .collect();
        let cons: &[usize] = by_scope.get(s).map_or(&[], Vec::as_slice);
        for code in 0..size {
            if !(0..len).all(|j| sets[subs[j]].contains(drop_digit(code, n, len, j))) {
                continue;
            }
            if !cons.is_empty() {
                let t = decode(code, n, len);
                let ok = cons.iter().all(|&ci| {
                    let con = &c.constraints[ci];
                    let img: Vec<usize> = con.scope.iter().map(|v| t[s.binary_search(v).unwrap()]).collect();
                    con.rel.contains(&img)
                });
                if !ok {
                    continue;
                }
            }
            bs.insert(code);
        }
        sets.push(bs);
    }
    // supersets by one variable
    let mut ups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); subsets.len()];
    for (si, s) in subsets.iter().enumerate() {
        for j in 0..s.len() {
            let mut t = s.clone();
            t.remove(j);
            ups[index[&t]].push((si, j));
        }
    }
    let mut queue: VecDeque<usize> = match order {
        Some(o) => o.iter().copied().filter(|&i| i < subsets.len()).collect(),
        None => (0..subsets.len()).collect(),
    };
    let mut queued = vec![false; subsets.len()];
    for &i in &queue {
        queued[i] = true;
    }
    for i in 0..subsets.len() {
        if !queued[i] {
            queued[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(x) = queue.pop_front() {
        queued[x] = false;
        if sets[x].is_clear() {
            return Ok(None);
        }
        let len = subsets[x].len();
        // x as the larger set: sync with every subset one smaller
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for j in 0..len {
            let mut t = subsets[x].clone();
            t.remove(j);
            pairs.push((index[&t], x, j));
        }
        // x as the smaller set
        for &(sup, j) in &ups[x] {
            pairs.push((x, sup, j));
        }
        for (t, s, j) in pairs {
            let (ct, cs) = sync(&mut sets, t, s, j, n, subsets[s].len());
            for (changed, idx) in [(ct, t), (cs, s)] {
                if changed {
                    if sets[idx].is_clear() {
                        return Ok(None);
                    }
                    if !queued[idx] {
                        queued[idx] = true;
                        queue.push_back(idx);
                    }
                }
            }
        }
    }
    Ok(Some(Strategy { k, n, num_vars: c.num_vars, subsets, index, sets }))
}

fn empty_strategy(k: usize, n: usize, subsets: Vec<Vec<usize>>) -> Strategy {
    let index = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let sets = subsets.iter().map(|s| {
        let mut b = FixedBitSet::with_capacity(pow(n, s.len()));
        if s.is_empty() {
            b.insert(0);
        }
        b
    });
    Strategy { k, n, num_vars: 0, sets: sets.collect(), subsets, index }
}

/// Makes `t = s ∖ {position j}` and `s` agree: tuples of `s` must restrict
/// into `t`, tuples of `t` must extend into `s`.
fn sync(sets: &mut [FixedBitSet], t: usize, s: usize, j: usize, n: usize, len: usize) -> (bool, bool) {
    let mut proj = FixedBitSet::with_capacity(sets[t].len());
    let mut drop_s = Vec::new();
    for code in sets[s].ones() {
        let p = drop_digit(code, n, len, j);
        if sets[t].contains(p) {
            proj.insert(p);
        } else {
            drop_s.push(code);
        }
    }
    for code in &drop_s {
        sets[s].set(*code, false);
    }
    let before = sets[t].count_ones(..);
    sets[t].intersect_with(&proj);
    (sets[t].count_ones(..) != before, !drop_s.is_empty())
}

/// Restriction of a strategy to the variables outside `drop`.
pub fn strategy_restrict(h: &Strategy, drop: &BTreeSet<usize>) -> Strategy {
    h.restrict(drop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::{Constraint, Signature};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k_n(n: usize) -> Structure {
        let mut t = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    t.push(vec![a, b]);
                }
            }
        }
        Structure::new(Signature::new(vec![("E".into(), 2)]), n, vec![t])
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> Instance {
        let mut x = Instance::with_size(n);
        for &(a, b) in edges {
            x.push("E", vec![a, b]);
        }
        x
    }

    #[test]
    fn ac_examples() {
        let x = Instance::with_size(2);
        let d = arc_consistency(&x, &k_n(3)).unwrap().unwrap();
        assert_eq!(d.0, vec![vec![0, 1, 2]; 2]);
        let empty = Structure::new(Signature::new(vec![("E".into(), 2)]), 2, vec![vec![]]);
        assert!(arc_consistency(&graph(2, &[(0, 1)]), &empty).unwrap().is_none());
    }

    #[test]
    fn sac_examples() {
        let x = graph(1, &[(0, 0)]);
        assert!(sac(&x, &k_n(2)).unwrap().is_none());
        let tri = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(arc_consistency(&tri, &k_n(2)).unwrap().is_some());
        assert!(sac(&tri, &k_n(2)).unwrap().is_none());
        let d = sac(&tri, &k_n(3)).unwrap().unwrap();
        assert_eq!(d.0, vec![vec![0, 1, 2]; 3]);
    }

    #[test]
    fn k_strategy_examples() {
        let tri = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(k_strategy(&tri, &k_n(2), 3).unwrap().is_none());
        // 2-consistency does not refute the triangle
        assert!(k_strategy(&tri, &k_n(2), 2).unwrap().is_some());
        let h = k_strategy(&tri, &k_n(3), 3).unwrap().unwrap();
        assert!(h.violations(&to_csp(&tri, &k_n(3)).unwrap()).is_empty());
        assert!(k_strategy(&tri, &k_n(3), 1).is_err());
        let empty = Structure::new(Signature::new(vec![("E".into(), 2)]), 2, vec![vec![]]);
        assert!(k_strategy(&graph(2, &[(0, 1)]), &empty, 2).unwrap().is_none());
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
        let mut x = Instance::with_size(n);
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            x.push("E", vec![a, b]);
        }
        x.normalize();
        x
    }

    // a small directed template with some structure
    fn template() -> Structure {
        Structure::new(
            Signature::new(vec![("E".into(), 2)]),
            3,
            vec![vec![vec![0, 1], vec![1, 2], vec![2, 0], vec![0, 0], vec![1, 0]]],
        )
    }

    #[test]
    fn maximal_strategy_contains_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = template();
        for _ in 0..40 {
            let x = random_instance(&mut rng, 5, 6);
            let c = to_csp(&x, &a).unwrap();
            let homs = crate::relcore::all_homs(&x, &a).unwrap();
            let h = k_strategy_csp(&c, 3).unwrap();
            match &h {
                None => assert!(homs.is_empty()),
                Some(h) => {
                    assert!(h.violations(&c).is_empty());
                    for g in &homs {
                        for s in h.subsets() {
                            let t: Vec<usize> = s.iter().map(|&v| g[v]).collect();
                            assert!(h.contains(s, &t));
                        }
                    }
                    // one can take D_x = H_x for SAC
                    let d = sac_csp(&c).expect("k-strategy implies SAC");
                    for v in 0..x.variables.len() {
                        for a in h.domain(v) {
                            assert!(d.contains(v, a));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fixpoint_independent_of_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = template();
        for _ in 0..20 {
            let x = random_instance(&mut rng, 5, 5);
            let c = to_csp(&x, &a).unwrap();
            let base = k_strategy_csp(&c, 3).unwrap().map(|h| h.table());
            let mut order: Vec<usize> = (0..subsets_upto(5, 3).len()).collect();
            order.shuffle(&mut rng);
            let other = k_strategy_ordered(&c, 3, Some(&order)).unwrap().map(|h| h.table());
            assert_eq!(base, other);
        }
    }

    #[test]
    fn restrict_examples() {
        let x = graph(3, &[(0, 1), (1, 2)]);
        let c = to_csp(&x, &k_n(3)).unwrap();
        let h = k_strategy_csp(&c, 2).unwrap().unwrap();
        let same = strategy_restrict(&h, &BTreeSet::new());
        assert_eq!(same.table(), h.table());
        let none = strategy_restrict(&h, &[0, 1, 2].into());
        assert_eq!(none.num_vars, 0);
        assert_eq!(none.table().len(), 1);
        let part = strategy_restrict(&h, &[1].into());
        let projected = Instance::new(vec!["a".into(), "c".into()], Vec::<Constraint>::new()).unwrap();
        assert!(part.violations(&to_csp(&projected, &k_n(3)).unwrap()).is_empty());
    }
}
