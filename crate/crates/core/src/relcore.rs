//! Finite relational structures over `{0..n-1}`, instances with named
//! variables, homomorphism search and the product/quotient/substructure
//! algebra.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::caps::caps;
use crate::csp::{self, Csp, FiniteRelation, TupleRelation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    pub entries: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(entries: Vec<(String, usize)>) -> Self {
        Signature { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|e| e.1).max().unwrap_or(0)
    }
}

/// Maps each variable (or element) index to a target element.
pub type VarMap = Vec<usize>;

#[derive(Clone, Debug)]
pub struct Structure {
    pub signature: Signature,
    pub size: usize,
    /// Parallel to `signature.entries`; each list sorted and deduplicated.
    pub relations: Vec<Vec<Vec<usize>>>,
    lookup: HashMap<String, usize>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.size == other.size && self.relations == other.relations
    }
}

impl Eq for Structure {}

impl Structure {
    /// Builds a structure, sorting and deduplicating tuple lists. No checks
    /// beyond that; see [`validate`].
    pub fn new(signature: Signature, size: usize, mut relations: Vec<Vec<Vec<usize>>>) -> Self {
        relations.resize(signature.len(), Vec::new());
        for r in relations.iter_mut() {
            r.sort();
            r.dedup();
        }
        let mut lookup = HashMap::new();
        for (i, (name, _)) in signature.entries.iter().enumerate() {
            lookup.entry(name.clone()).or_insert(i);
        }
        Structure { signature, size, relations, lookup }
    }

    /// Like [`Structure::new`] but rejects anything `validate` complains about.
    pub fn checked(signature: Signature, size: usize, relations: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let s = Structure::new(signature, size, relations);
        let report = validate(&s);
        if report.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(report.join("; ")))
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn relation(&self, name: &str) -> Option<&[Vec<usize>]> {
        self.index_of(name).map(|i| self.relations[i].as_slice())
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.signature.entries[idx].1
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.signature.entries[idx].0
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(Vec::len).sum()
    }
}

pub fn validate(s: &Structure) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (name, arity) in &s.signature.entries {
        if !seen.insert(name.as_str()) {
            out.push(format!("duplicate relation name `{name}`"));
        }
        if *arity == 0 {
            out.push(format!("relation `{name}` has arity 0"));
        }
    }
    if s.relations.len() != s.signature.len() {
        out.push("relation count differs from signature".to_string());
    }
    for (i, tuples) in s.relations.iter().enumerate().take(s.signature.len()) {
        let (name, arity) = &s.signature.entries[i];
        for t in tuples {
            if t.len() != *arity {
                out.push(format!("`{name}`: tuple {t:?} has length {} (arity {arity})", t.len()));
            }
            if let Some(&bad) = t.iter().find(|&&e| e >= s.size) {
                out.push(format!("`{name}`: entry {bad} out of range (size {})", s.size));
            }
        }
        if tuples.windows(2).any(|w| w[0] >= w[1]) {
            out.push(format!("`{name}`: tuples not sorted and deduplicated"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub rel: String,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Instance {
    pub variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(variables: Vec<String>, mut constraints: Vec<Constraint>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("duplicate variable `{v}`")));
            }
        }
        for c in &constraints {
            if let Some(&bad) = c.args.iter().find(|&&a| a >= variables.len()) {
                return Err(Error::Invalid(format!("constraint on unknown variable index {bad}")));
            }
        }
        constraints.sort();
        constraints.dedup();
        Ok(Instance { variables, constraints })
    }

    /// Instance with variables `0..n-1` named by their index.
    pub fn with_size(n: usize) -> Self {
        Instance { variables: (0..n).map(|i| i.to_string()).collect(), constraints: Vec::new() }
    }

    pub fn push(&mut self, rel: &str, args: Vec<usize>) {
        self.constraints.push(Constraint { rel: rel.to_string(), args });
    }

    pub fn normalize(&mut self) {
        self.constraints.sort();
        self.constraints.dedup();
    }

    /// The structure viewed as an instance: one variable per element, one
    /// constraint per tuple.
    pub fn from_structure(s: &Structure) -> Self {
        let mut x = Instance::with_size(s.size);
        for (i, tuples) in s.relations.iter().enumerate() {
            for t in tuples {
                x.push(s.name(i), t.clone());
            }
        }
        x.normalize();
        x
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

/// Constraint network of `x` against `a`, sharing one relation object per symbol.
pub fn to_csp(x: &Instance, a: &Structure) -> Result<Csp> {
    let rels: Vec<Arc<dyn FiniteRelation>> = a
        .relations
        .iter()
        .enumerate()
        .map(|(i, t)| Arc::new(TupleRelation::new(a.arity(i), t.clone())) as Arc<dyn FiniteRelation>)
        .collect();
    let mut c = Csp::new(x.variables.len(), a.size);
    for con in &x.constraints {
        let idx = a
            .index_of(&con.rel)
            .ok_or_else(|| Error::Signature(format!("relation `{}` not in template", con.rel)))?;
        if a.arity(idx) != con.args.len() {
            return Err(Error::Signature(format!(
                "`{}` used with {} arguments, template arity {}",
                con.rel,
                con.args.len(),
                a.arity(idx)
            )));
        }
        c.add(&con.args, rels[idx].clone());
    }
    Ok(c)
}

pub fn is_hom(x: &Instance, a: &Structure, h: &[usize]) -> bool {
    HomCheck::new(a).check(x, h)
}

/// Tuple sets of a target structure, for repeated homomorphism checks.
pub struct HomCheck<'a> {
    a: &'a Structure,
    sets: Vec<HashSet<&'a [usize]>>,
}

impl<'a> HomCheck<'a> {
    pub fn new(a: &'a Structure) -> Self {
        let sets = a.relations.iter().map(|r| r.iter().map(Vec::as_slice).collect()).collect();
        HomCheck { a, sets }
    }

    pub fn check(&self, x: &Instance, h: &[usize]) -> bool {
        if h.len() != x.variables.len() || h.iter().any(|&v| v >= self.a.size) {
            return false;
        }
        x.constraints.iter().all(|c| match self.a.index_of(&c.rel) {
            Some(i) => {
                let img: Vec<usize> = c.args.iter().map(|&v| h[v]).collect();
                self.sets[i].contains(img.as_slice())
            }
            None => false,
        })
    }
}

pub fn hom_search(x: &Instance, a: &Structure) -> Result<Option<VarMap>> {
    if a.size == 0 {
        return Ok(if x.variables.is_empty() { Some(Vec::new()) } else { None });
    }
    let c = to_csp(x, a)?;
    let h = csp::first_solution(&c);
    if let Some(h) = &h {
        if !is_hom(x, a, h) {
            return Err(Error::Internal("search returned a non-homomorphism".into()));
        }
    }
    Ok(h)
}

/// All homomorphisms, in search order.
pub fn all_homs(x: &Instance, a: &Structure) -> Result<Vec<VarMap>> {
    let mut out = Vec::new();
    if a.size == 0 {
        if x.variables.is_empty() {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    let c = to_csp(x, a)?;
    csp::search(&c, c.full_domains(), &mut |h| {
        out.push(h.to_vec());
        true
    });
    Ok(out)
}

pub fn structure_hom(x: &Structure, a: &Structure) -> Result<Option<VarMap>> {
    hom_search(&Instance::from_structure(x), a)
}

fn same_signature(a: &Structure, b: &Structure) -> Result<()> {
    if a.signature != b.signature {
        return Err(Error::Signature("structures have different signatures".into()));
    }
    Ok(())
}

pub fn product(a: &Structure, b: &Structure) -> Result<Structure> {
    same_signature(a, b)?;
    let nb = b.size;
    let rels = a
        .relations
        .iter()
        .zip(&b.relations)
        .map(|(ra, rb)| {
            let mut out = Vec::with_capacity(ra.len() * rb.len());
            for s in ra {
                for t in rb {
                    out.push(s.iter().zip(t).map(|(&i, &j)| i * nb + j).collect());
                }
            }
            out
        })
        .collect();
    Ok(Structure::new(a.signature.clone(), a.size * b.size, rels))
}

/// Image of `a` under the projection onto the given classes (class order as given).
pub fn quotient(a: &Structure, classes: &[Vec<usize>]) -> Result<Structure> {
    let mut class_of = vec![usize::MAX; a.size];
    for (c, members) in classes.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::Invalid("empty class".into()));
        }
        for &e in members {
            if e >= a.size || class_of[e] != usize::MAX {
                return Err(Error::Invalid(format!("element {e} out of range or in two classes")));
            }
            class_of[e] = c;
        }
    }
    if class_of.contains(&usize::MAX) {
        return Err(Error::Invalid("classes do not cover the domain".into()));
    }
    Ok(quotient_by_map(a, &class_of, classes.len()))
}

pub fn quotient_by_map(a: &Structure, class_of: &[usize], n: usize) -> Structure {
    let rels = a
        .relations
        .iter()
        .map(|r| r.iter().map(|t| t.iter().map(|&e| class_of[e]).collect()).collect())
        .collect();
    Structure::new(a.signature.clone(), n, rels)
}

pub fn induced_substructure(a: &Structure, subset: &[usize]) -> Result<Structure> {
    let mut sub: Vec<usize> = subset.to_vec();
    sub.sort_unstable();
    sub.dedup();
    if let Some(&bad) = sub.iter().find(|&&e| e >= a.size) {
        return Err(Error::Invalid(format!("element {bad} out of range")));
    }
    let mut new_index = vec![usize::MAX; a.size];
    for (i, &e) in sub.iter().enumerate() {
        new_index[e] = i;
    }
    let rels = a
        .relations
        .iter()
        .map(|r| {
            r.iter()
                .filter(|t| t.iter().all(|&e| new_index[e] != usize::MAX))
                .map(|t| t.iter().map(|&e| new_index[e]).collect())
                .collect()
        })
        .collect();
    Ok(Structure::new(a.signature.clone(), sub.len(), rels))
}

/// Checks that `map` is an isomorphism from `a` onto `b`.
pub fn is_isomorphism(a: &Structure, b: &Structure, map: &[usize]) -> bool {
    if a.signature != b.signature || a.size != b.size || map.len() != a.size {
        return false;
    }
    let mut seen = vec![false; b.size];
    for &m in map {
        if m >= b.size || seen[m] {
            return false;
        }
        seen[m] = true;
    }
    a.relations.iter().zip(&b.relations).all(|(ra, rb)| {
        if ra.len() != rb.len() {
            return false;
        }
        let set: HashSet<&[usize]> = rb.iter().map(Vec::as_slice).collect();
        ra.iter().all(|t| {
            let img: Vec<usize> = t.iter().map(|&e| map[e]).collect();
            set.contains(img.as_slice())
        })
    })
}

/// Per-element counts of occurrences at each (relation, position).
fn degree_profile(s: &Structure) -> Vec<Vec<usize>> {
    let width: usize = s.signature.entries.iter().map(|e| e.1).sum();
    let mut prof = vec![vec![0usize; width]; s.size];
    let mut offset = 0;
    for (i, r) in s.relations.iter().enumerate() {
        for t in r {
            for (p, &e) in t.iter().enumerate() {
                prof[e][offset + p] += 1;
            }
        }
        offset += s.arity(i);
    }
    prof
}

pub fn isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    let cap = caps().iso;
    if a.size > cap || b.size > cap {
        return Err(Error::Cap(format!("isomorphism test limited to {cap} elements")));
    }
    Ok(find_isomorphism(a, b).is_some())
}

/// Exhaustive search with degree-profile pruning; no size cap.
pub fn find_isomorphism(a: &Structure, b: &Structure) -> Option<VarMap> {
    if a.signature != b.signature || a.size != b.size {
        return None;
    }
    if a.relations.iter().zip(&b.relations).any(|(x, y)| x.len() != y.len()) {
        return None;
    }
    let pa = degree_profile(a);
    let pb = degree_profile(b);
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    // tuples of `a` indexed by their largest element in assignment order
    let n = a.size;
    let mut last_tuples: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); n];
    for (i, r) in a.relations.iter().enumerate() {
        for t in r {
            if let Some(&m) = t.iter().max() {
                last_tuples[m].push((i, t.as_slice()));
            }
        }
    }
    let sets: Vec<HashSet<&[usize]>> = b.relations.iter().map(|r| r.iter().map(Vec::as_slice).collect()).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        e: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        pa: &[Vec<usize>],
        pb: &[Vec<usize>],
        last: &[Vec<(usize, &[usize])>],
        sets: &[HashSet<&[usize]>],
    ) -> bool {
        if e == map.len() {
            return true;
        }
        for cand in 0..map.len() {
            if used[cand] || pa[e] != pb[cand] {
                continue;
            }
            map[e] = cand;
            let ok = last[e].iter().all(|(i, t)| {
                let img: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                sets[*i].contains(img.as_slice())
            });
            if ok {
                used[cand] = true;
                if rec(e + 1, map, used, pa, pb, last, sets) {
                    return true;
                }
                used[cand] = false;
            }
        }
        map[e] = usize::MAX;
        false
    }
    if rec(0, &mut map, &mut used, &pa, &pb, &last_tuples, &sets) {
        Some(map)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn clique(n: usize) -> Structure {
        let mut e = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    e.push(vec![a, b]);
                }
            }
        }
        Structure::new(Signature::new(vec![("E".into(), 2)]), n, vec![e])
    }

    fn triangle() -> Instance {
        Instance::from_structure(&clique(3))
    }

    #[test]
    fn validate_reports() {
        assert!(validate(&clique(2)).is_empty());
        let bad = Structure::new(Signature::new(vec![("E".into(), 2)]), 3, vec![vec![vec![0, 5]]]);
        assert_eq!(validate(&bad).len(), 1);
        let dup = Structure::new(
            Signature::new(vec![("E".into(), 2), ("E".into(), 1)]),
            2,
            vec![vec![], vec![]],
        );
        assert_eq!(validate(&dup).len(), 1);
    }

    #[test]
    fn hom_search_examples() {
        let one = Structure::new(Signature::new(vec![("E".into(), 2)]), 1, vec![vec![]]);
        let x = Instance::with_size(1);
        assert_eq!(hom_search(&x, &one).unwrap(), Some(vec![0]));
        let h = hom_search(&triangle(), &clique(3)).unwrap().unwrap();
        assert!(is_hom(&triangle(), &clique(3), &h));
        assert_eq!(hom_search(&triangle(), &clique(2)).unwrap(), None);
        // brute force over all 8 maps agrees
        let brute = (0..8usize).any(|m| {
            let h: Vec<usize> = (0..3).map(|i| (m >> i) & 1).collect();
            is_hom(&triangle(), &clique(2), &h)
        });
        assert!(!brute);
    }

    #[test]
    fn signature_mismatch() {
        let mut x = Instance::with_size(1);
        x.push("F", vec![0]);
        assert!(matches!(hom_search(&x, &clique(2)), Err(Error::Signature(_))));
    }

    #[test]
    fn product_examples() {
        let p = product(&clique(2), &clique(2)).unwrap();
        assert_eq!(p.size, 4);
        assert_eq!(p.relations[0].len(), 4);
        let one = Structure::new(Signature::new(vec![("E".into(), 2)]), 1, vec![vec![vec![0, 0]]]);
        assert!(isomorphic(&product(&clique(3), &one).unwrap(), &clique(3)).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let k3 = clique(3);
        let q = quotient(&k3, &[vec![0], vec![1, 2]]).unwrap();
        assert_eq!(q.relations[0], vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        let id = quotient(&k3, &[vec![0], vec![1], vec![2]]).unwrap();
        assert!(isomorphic(&id, &k3).unwrap());
        let all = quotient(&k3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(all.relations[0], vec![vec![0, 0]]);
        assert!(quotient(&k3, &[vec![0], vec![1]]).is_err());
        assert!(quotient(&k3, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn substructure_examples() {
        let k3 = clique(3);
        assert_eq!(induced_substructure(&k3, &[0, 1]).unwrap(), clique(2));
        assert_eq!(induced_substructure(&k3, &[]).unwrap().size, 0);
        assert!(induced_substructure(&k3, &[4]).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let k2 = clique(2);
        let empty = Structure::new(Signature::new(vec![("E".into(), 2)]), 2, vec![vec![]]);
        assert!(isomorphic(&k2, &k2).unwrap());
        assert!(!isomorphic(&k2, &empty).unwrap());
        let path = Structure::new(Signature::new(vec![("E".into(), 2)]), 3, vec![vec![vec![0, 1], vec![1, 2]]]);
        let path2 = Structure::new(Signature::new(vec![("E".into(), 2)]), 3, vec![vec![vec![2, 0], vec![0, 1]]]);
        assert!(isomorphic(&path, &path2).unwrap());
        let big = Structure::new(Signature::new(vec![("E".into(), 2)]), 11, vec![vec![]]);
        assert!(isomorphic(&big, &big).is_err());
    }
}
