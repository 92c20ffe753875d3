//! Temporal relations over (Q,<) represented by their orbits: a relation of
//! arity r is a set of weak orders on r positions, each stored as a dense
//! rank vector.

pub mod formula;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::caps::caps;
use crate::csp::{Dom, FiniteRelation};
use crate::error::{Error, Result};
use crate::relcore::{Signature, Structure};

pub use formula::Formula;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderPattern(Vec<u8>);

impl fmt::Debug for OrderPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl OrderPattern {
    /// Accepts only dense rank vectors (minimum 0, ranks form an initial segment).
    pub fn new(ranks: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; ranks.len()];
        for &r in &ranks {
            if r as usize >= ranks.len() {
                return Err(Error::Invalid(format!("rank vector {ranks:?} is not dense")));
            }
            seen[r as usize] = true;
        }
        let top = ranks.iter().max().map_or(0, |&m| m as usize + 1);
        if seen[..top].iter().any(|s| !s) {
            return Err(Error::Invalid(format!("rank vector {ranks:?} is not dense")));
        }
        Ok(OrderPattern(ranks))
    }

    pub fn ranks(&self) -> &[u8] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Number of distinct ranks.
    pub fn height(&self) -> usize {
        self.0.iter().max().map_or(0, |&m| m as usize + 1)
    }

    pub fn reversed(&self) -> OrderPattern {
        let top = self.height().saturating_sub(1) as u8;
        OrderPattern(self.0.iter().map(|&r| top - r).collect())
    }

    /// Dense ranking of the entries at `keep`.
    pub fn restrict(&self, keep: &[usize]) -> OrderPattern {
        canonical_pattern(&keep.iter().map(|&i| self.0[i]).collect::<Vec<_>>())
    }
}

/// Orbit of a tuple under order automorphisms.
pub fn canonical_pattern<T: Ord>(t: &[T]) -> OrderPattern {
    let mut vals: Vec<&T> = t.iter().collect();
    vals.sort();
    vals.dedup();
    OrderPattern(t.iter().map(|x| vals.binary_search(&x).unwrap() as u8).collect())
}

/// All weak orders on `r` positions in lexicographic rank order
/// (1, 1, 3, 13, 75, 541 for r = 0..5).
pub fn weak_orders(r: usize) -> Vec<OrderPattern> {
    assert!(r <= 6, "weak-order enumeration limited to 6 positions");
    let mut out = Vec::new();
    let mut cur = vec![0u8; r];
    fn rec(i: usize, cur: &mut Vec<u8>, out: &mut Vec<OrderPattern>) {
        if i == cur.len() {
            if let Ok(p) = OrderPattern::new(cur.clone()) {
                out.push(p);
            }
            return;
        }
        for v in 0..cur.len() as u8 {
            cur[i] = v;
            rec(i + 1, cur, out);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

#[derive(Clone)]
pub struct TemporalRelation {
    arity: usize,
    patterns: Vec<OrderPattern>,
    /// per pattern: positions grouped by rank, ascending
    layout: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for TemporalRelation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.patterns == other.patterns
    }
}

impl Eq for TemporalRelation {}

impl std::hash::Hash for TemporalRelation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.patterns.hash(state);
    }
}

impl fmt::Debug for TemporalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TemporalRelation{}{:?}", self.arity, self.patterns)
    }
}

impl TemporalRelation {
    pub fn new(arity: usize, mut patterns: Vec<OrderPattern>) -> Result<Self> {
        if let Some(p) = patterns.iter().find(|p| p.arity() != arity) {
            return Err(Error::Invalid(format!("pattern {p:?} does not have arity {arity}")));
        }
        patterns.sort();
        patterns.dedup();
        let layout = patterns
            .iter()
            .map(|p| {
                let mut cls = vec![Vec::new(); p.height()];
                for (i, &r) in p.0.iter().enumerate() {
                    cls[r as usize].push(i);
                }
                cls
            })
            .collect();
        Ok(TemporalRelation { arity, patterns, layout })
    }

    pub fn from_ranks(arity: usize, ranks: &[&[u8]]) -> Result<Self> {
        let ps = ranks.iter().map(|r| OrderPattern::new(r.to_vec())).collect::<Result<Vec<_>>>()?;
        TemporalRelation::new(arity, ps)
    }

    /// All weak orders satisfying the formula.
    pub fn compile(arity: usize, f: &Formula) -> Result<Self> {
        let cap = caps().arity;
        if arity > cap {
            return Err(Error::Cap(format!("relation arity {arity} exceeds cap {cap}")));
        }
        if let Some(m) = f.max_var() {
            if m >= arity {
                return Err(Error::Invalid(format!("formula mentions x{m} but arity is {arity}")));
            }
        }
        let ps = weak_orders(arity).into_iter().filter(|p| f.eval(p.ranks())).collect();
        TemporalRelation::new(arity, ps)
    }

    pub fn compile_str(arity: usize, src: &str) -> Result<Self> {
        TemporalRelation::compile(arity, &formula::parse(src)?)
    }

    pub fn full(arity: usize) -> Self {
        TemporalRelation::new(arity, weak_orders(arity)).unwrap()
    }

    pub fn lt() -> Self {
        TemporalRelation::from_ranks(2, &[&[0, 1]]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn patterns(&self) -> &[OrderPattern] {
        &self.patterns
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn has(&self, p: &OrderPattern) -> bool {
        self.patterns.binary_search(p).is_ok()
    }

    pub fn eval<T: Ord>(&self, t: &[T]) -> Result<bool> {
        if t.len() != self.arity {
            return Err(Error::Invalid(format!("tuple of length {} for arity {}", t.len(), self.arity)));
        }
        Ok(self.has(&canonical_pattern(t)))
    }

    pub fn reversed(&self) -> Self {
        TemporalRelation::new(self.arity, self.patterns.iter().map(OrderPattern::reversed).collect()).unwrap()
    }

    /// Existential projection onto `keep` (in the given order).
    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        check_positions(keep, self.arity, true)?;
        TemporalRelation::new(keep.len(), self.patterns.iter().map(|p| p.restrict(keep)).collect())
    }

    /// Patterns in which all `fused` positions share one rank.
    pub fn contract(&self, fused: &[usize]) -> Result<Self> {
        check_positions(fused, self.arity, false)?;
        let ps = self
            .patterns
            .iter()
            .filter(|p| fused.windows(2).all(|w| p.0[w[0]] == p.0[w[1]]))
            .cloned()
            .collect();
        TemporalRelation::new(self.arity, ps)
    }

    /// Patterns whose minimal rank is taken exactly at the `low` positions.
    pub fn bottom(&self, low: &[usize]) -> Result<Self> {
        check_positions(low, self.arity, false)?;
        let ps = self
            .patterns
            .iter()
            .filter(|p| (0..self.arity).all(|i| (p.0[i] == 0) == low.contains(&i)))
            .cloned()
            .collect();
        TemporalRelation::new(self.arity, ps)
    }

    /// Θ-image as 0/1 sign vectors (0 = Z, 1 = P), sorted.
    pub fn theta(&self) -> Vec<Vec<u8>> {
        let r = self.arity;
        let mut out = Vec::new();
        for bits in 0..(1u32 << r) {
            let s: Vec<u8> = (0..r).map(|i| ((bits >> i) & 1) as u8).collect();
            let zeros: Vec<bool> = s.iter().map(|&b| b == 0).collect();
            let ok = if zeros.iter().any(|&z| z) {
                self.patterns.iter().any(|p| p.0.iter().zip(&zeros).all(|(&rk, &z)| (rk == 0) == z))
            } else {
                !self.patterns.is_empty()
            };
            if ok {
                out.push(s);
            }
        }
        out.sort();
        out
    }

    /// Tuples over `{0..n-1}` (read as rationals) whose pattern lies in the relation.
    pub fn tuples_over(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let r = self.arity;
        if r == 0 {
            if !self.is_empty() {
                out.push(Vec::new());
            }
            return out;
        }
        let mut t = vec![0usize; r];
        loop {
            if self.has(&canonical_pattern(&t)) {
                out.push(t.clone());
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
            }
        }
    }
}

fn check_positions(pos: &[usize], arity: usize, allow_empty: bool) -> Result<()> {
    let mut seen = vec![false; arity];
    for &p in pos {
        if p >= arity || seen[p] {
            return Err(Error::Invalid(format!("bad position list {pos:?} for arity {arity}")));
        }
        seen[p] = true;
    }
    if !allow_empty && pos.is_empty() {
        return Err(Error::Invalid("empty position list".into()));
    }
    Ok(())
}

impl FiniteRelation for TemporalRelation {
    fn arity(&self) -> usize {
        self.arity
    }

    fn contains(&self, t: &[usize]) -> bool {
        self.has(&canonical_pattern(t))
    }

    fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    // For one pattern, the values available to a rank class are those strictly
    // between the greedy lowest realization of the classes below and the greedy
    // highest realization of the classes above.
    fn supports(&self, doms: &[&Dom], out: &mut [Dom]) {
        let size = doms.first().map_or(0, |d| d.len());
        let mut common: Vec<Dom> = Vec::new();
        let mut lo: Vec<usize> = Vec::new();
        let mut hi: Vec<usize> = Vec::new();
        for cls in &self.layout {
            let h = cls.len();
            common.clear();
            for members in cls {
                let mut d = doms[members[0]].clone();
                for &m in &members[1..] {
                    d.intersect_with(doms[m]);
                }
                common.push(d);
            }
            lo.clear();
            let mut prev: Option<usize> = None;
            let mut feasible = true;
            for d in &common {
                let v = match prev {
                    None => d.minimum(),
                    Some(p) => d.ones().find(|&v| v > p),
                };
                match v {
                    Some(v) => {
                        lo.push(v);
                        prev = Some(v);
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if !feasible {
                continue;
            }
            hi.clear();
            hi.resize(h, 0);
            let mut next: Option<usize> = None;
            for c in (0..h).rev() {
                let v = match next {
                    None => common[c].maximum(),
                    Some(n) => common[c].ones().rev().find(|&v| v < n),
                }
                .expect("upper chain exists when lower chain does");
                hi[c] = v;
                next = Some(v);
            }
            for c in 0..h {
                let lower = if c == 0 { 0 } else { lo[c - 1] + 1 };
                let upper = if c + 1 == h { size } else { hi[c + 1] };
                for v in common[c].ones().skip_while(|&v| v < lower).take_while(|&v| v < upper) {
                    for &pos in &cls[c] {
                        out[pos].insert(v);
                    }
                }
            }
        }
    }

    fn merge(&self, classes: &[usize], new_arity: usize) -> Arc<dyn FiniteRelation> {
        let mut reps = vec![usize::MAX; new_arity];
        for (i, &c) in classes.iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = i;
            }
        }
        let ps = self
            .patterns
            .iter()
            .filter(|p| classes.iter().enumerate().all(|(i, &c)| p.0[i] == p.0[reps[c]]))
            .map(|p| p.restrict(&reps))
            .collect();
        Arc::new(TemporalRelation::new(new_arity, ps).unwrap())
    }
}

/// A temporal structure. The order relation `<` is always available: if it is
/// not declared it is supplied implicitly and does not count as declared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalStructure {
    declared: Vec<(String, TemporalRelation)>,
    implicit_lt: bool,
}

impl TemporalStructure {
    pub fn new(relations: Vec<(String, TemporalRelation)>) -> Result<Self> {
        for (i, (n, r)) in relations.iter().enumerate() {
            if relations[..i].iter().any(|(m, _)| m == n) {
                return Err(Error::Invalid(format!("duplicate relation name `{n}`")));
            }
            if n == "<" && *r != TemporalRelation::lt() {
                return Err(Error::Invalid("`<` must denote the strict order".into()));
            }
        }
        let implicit_lt = !relations.iter().any(|(n, _)| n == "<");
        Ok(TemporalStructure { declared: relations, implicit_lt })
    }

    /// Relations given by the user (without the implicit `<`).
    pub fn declared(&self) -> &[(String, TemporalRelation)] {
        &self.declared
    }

    /// All relations including `<`.
    pub fn relations(&self) -> Vec<(String, TemporalRelation)> {
        let mut v = self.declared.clone();
        if self.implicit_lt {
            v.push(("<".to_string(), TemporalRelation::lt()));
        }
        v
    }

    pub fn get(&self, name: &str) -> Option<TemporalRelation> {
        self.relations().into_iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn max_arity(&self) -> usize {
        self.relations().iter().map(|(_, r)| r.arity()).max().unwrap_or(0)
    }

    /// Every relation rank-reversed. Names are kept, so in the result a
    /// declared `<` holds the reversed order; the implicit `<` stays the order.
    pub fn reversed(&self) -> Self {
        TemporalStructure {
            declared: self.declared.iter().map(|(n, r)| (n.clone(), r.reversed())).collect(),
            implicit_lt: self.implicit_lt,
        }
    }

    fn signature(rels: &[(String, TemporalRelation)]) -> Signature {
        Signature::new(rels.iter().map(|(n, r)| (n.clone(), r.arity())).collect())
    }
}

/// The substructure induced on `{0 < 1 < … < n-1}`.
pub fn induced_finite_template(b: &TemporalStructure, n: usize) -> Structure {
    finite_template(&b.relations(), n)
}

/// Same as [`induced_finite_template`] restricted to the declared relations.
pub fn declared_template(b: &TemporalStructure, n: usize) -> Structure {
    finite_template(b.declared(), n)
}

fn finite_template(rels: &[(String, TemporalRelation)], n: usize) -> Structure {
    let sig = TemporalStructure::signature(rels);
    let tuples = rels.iter().map(|(_, r)| r.tuples_over(n)).collect();
    Structure::new(sig, n, tuples)
}

/// The two-element quotient on `{Z=0, P=1}`.
pub fn theta_quotient(b: &TemporalStructure) -> Structure {
    let rels = b.relations();
    let sig = TemporalStructure::signature(&rels);
    let tuples = rels
        .iter()
        .map(|(_, r)| r.theta().into_iter().map(|s| s.into_iter().map(usize::from).collect()).collect())
        .collect();
    Structure::new(sig, 2, tuples)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CanonicalBinaryOp {
    PP,
    LL,
}

impl CanonicalBinaryOp {
    /// Compares the images of positions `i` and `j`, where `p` carries the first
    /// argument (with the zero element at index `zero`) and `q` the second.
    fn compare(self, p: &[u8], zero: usize, q: &[u8], i: usize, j: usize) -> Ordering {
        let (ni, nj) = (p[i] <= p[zero], p[j] <= p[zero]);
        match (ni, nj) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (true, true) => match self {
                CanonicalBinaryOp::PP => p[i].cmp(&p[j]),
                CanonicalBinaryOp::LL => (p[i], q[i]).cmp(&(p[j], q[j])),
            },
            (false, false) => match self {
                CanonicalBinaryOp::PP => q[i].cmp(&q[j]),
                CanonicalBinaryOp::LL => (q[i], p[i]).cmp(&(q[j], p[j])),
            },
        }
    }

    /// Pattern of the componentwise image.
    pub fn apply(self, p: &[u8], zero: usize, q: &[u8]) -> OrderPattern {
        let r = q.len();
        let mut idx: Vec<usize> = (0..r).collect();
        idx.sort_by(|&a, &b| self.compare(p, zero, q, a, b));
        let mut ranks = vec![0u8; r];
        let mut rank = 0u8;
        for w in 1..r {
            if self.compare(p, zero, q, idx[w - 1], idx[w]) == Ordering::Less {
                rank += 1;
            }
            ranks[idx[w]] = rank;
        }
        OrderPattern(ranks)
    }
}

/// Zero-annotated patterns of `r`: weak orders on `r+1` positions (the last
/// one is the zero element) whose restriction to the first `r` lies in `r`.
fn zero_annotated(r: &TemporalRelation) -> Vec<OrderPattern> {
    let keep: Vec<usize> = (0..r.arity).collect();
    weak_orders(r.arity + 1).into_iter().filter(|p| r.has(&p.restrict(&keep))).collect()
}

pub fn relation_preserved_by(r: &TemporalRelation, op: CanonicalBinaryOp) -> bool {
    let ann = zero_annotated(r);
    let zero = r.arity;
    ann.iter()
        .all(|p| r.patterns.iter().all(|q| r.has(&op.apply(&p.0, zero, &q.0))))
}

pub fn check_binary_canonical(b: &TemporalStructure, op: CanonicalBinaryOp) -> Result<bool> {
    let cap = caps().arity;
    if b.max_arity() > cap {
        return Err(Error::Cap(format!("arity above {cap}")));
    }
    Ok(b.relations().iter().all(|(_, r)| relation_preserved_by(r, op)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuotientOp {
    Or,
    And,
    Minority,
    Majority,
}

impl QuotientOp {
    pub fn arity(self) -> usize {
        match self {
            QuotientOp::Or | QuotientOp::And => 2,
            _ => 3,
        }
    }

    pub fn apply(self, args: &[usize]) -> usize {
        match self {
            QuotientOp::Or => args[0] | args[1],
            QuotientOp::And => args[0] & args[1],
            QuotientOp::Minority => args[0] ^ args[1] ^ args[2],
            QuotientOp::Majority => usize::from(args[0] + args[1] + args[2] >= 2),
        }
    }
}

/// Whether `op` preserves the 0/1 tuple set `rel`.
pub fn tuples_preserved(rel: &[Vec<usize>], op: QuotientOp) -> bool {
    let set: std::collections::HashSet<&[usize]> = rel.iter().map(Vec::as_slice).collect();
    let n = op.arity();
    let mut idx = vec![0usize; n];
    loop {
        let rows: Vec<&Vec<usize>> = idx.iter().map(|&i| &rel[i]).collect();
        if rel.is_empty() {
            return true;
        }
        let r = rows[0].len();
        let img: Vec<usize> = (0..r)
            .map(|c| op.apply(&rows.iter().map(|t| t[c]).collect::<Vec<_>>()))
            .collect();
        if !set.contains(img.as_slice()) {
            return false;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < rel.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn check_quotient_op(q: &Structure, op: QuotientOp) -> Result<bool> {
    if q.size != 2 {
        return Err(Error::Invalid("quotient checks need a 2-element structure".into()));
    }
    Ok(q.relations.iter().all(|r| tuples_preserved(r, op)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverPath {
    SacPp,
    KconsLl,
    SaipMinority,
    CompleteOnly,
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverPath::SacPp => "SAC_PP",
            SolverPath::KconsLl => "KCONS_LL",
            SolverPath::SaipMinority => "SAIP_MINORITY",
            SolverPath::CompleteOnly => "COMPLETE_ONLY",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Classification {
    pub has_pp: bool,
    pub has_ll: bool,
    pub quotient_or: bool,
    pub quotient_and: bool,
    pub quotient_minority: bool,
    pub quotient_majority: bool,
    pub dualized: bool,
    pub path: SolverPath,
}

fn flags(b: &TemporalStructure) -> Result<Classification> {
    let has_pp = check_binary_canonical(b, CanonicalBinaryOp::PP)?;
    let has_ll = check_binary_canonical(b, CanonicalBinaryOp::LL)?;
    let q = theta_quotient(b);
    let quotient_or = check_quotient_op(&q, QuotientOp::Or)?;
    let quotient_and = check_quotient_op(&q, QuotientOp::And)?;
    let quotient_minority = check_quotient_op(&q, QuotientOp::Minority)?;
    let quotient_majority = check_quotient_op(&q, QuotientOp::Majority)?;
    if has_ll && !quotient_or {
        return Err(Error::Internal("ll preserved but the quotient is not OR-closed".into()));
    }
    let path = if has_pp && (quotient_or || quotient_and) {
        SolverPath::SacPp
    } else if has_pp && quotient_minority {
        SolverPath::SaipMinority
    } else if has_ll {
        SolverPath::KconsLl
    } else {
        SolverPath::CompleteOnly
    };
    Ok(Classification {
        has_pp,
        has_ll,
        quotient_or,
        quotient_and,
        quotient_minority,
        quotient_majority,
        dualized: false,
        path,
    })
}

pub fn classify(b: &TemporalStructure) -> Result<Classification> {
    let c = flags(b)?;
    if c.path != SolverPath::CompleteOnly {
        return Ok(c);
    }
    let d = flags(&b.reversed())?;
    if d.path != SolverPath::CompleteOnly {
        return Ok(Classification { dualized: true, ..d });
    }
    Ok(c)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::csp::{dom_from, TupleRelation};

    pub fn rel_i() -> TemporalRelation {
        TemporalRelation::compile_str(3, "x0!=x1 | x2<=x0").unwrap()
    }

    pub fn rel_x() -> TemporalRelation {
        TemporalRelation::compile_str(3, "(x0=x1 & x0<x2) | (x0=x2 & x0<x1) | (x1=x2 & x1<x0)").unwrap()
    }

    pub fn rel_neq() -> TemporalRelation {
        TemporalRelation::compile_str(2, "x0!=x1").unwrap()
    }

    pub fn rel_betw() -> TemporalRelation {
        TemporalRelation::compile_str(3, "(x0<x1 & x1<x2) | (x2<x1 & x1<x0)").unwrap()
    }

    pub fn b_ineq() -> TemporalStructure {
        TemporalStructure::new(vec![("I".into(), rel_i()), ("neq".into(), rel_neq())]).unwrap()
    }

    pub fn b_x() -> TemporalStructure {
        TemporalStructure::new(vec![("X".into(), rel_x())]).unwrap()
    }

    pub fn b_lt() -> TemporalStructure {
        TemporalStructure::new(vec![]).unwrap()
    }

    pub fn b_betw() -> TemporalStructure {
        TemporalStructure::new(vec![("betw".into(), rel_betw())]).unwrap()
    }

    pub fn b_ll() -> TemporalStructure {
        let r = TemporalRelation::compile_str(3, "(x0=x1 & x1=x2) | (x0<x1 & x0<x2 & x1!=x2)").unwrap();
        TemporalStructure::new(vec![("L".into(), r)]).unwrap()
    }

    fn pat(r: &[u8]) -> OrderPattern {
        OrderPattern::new(r.to_vec()).unwrap()
    }

    #[test]
    fn canonical_patterns() {
        assert_eq!(canonical_pattern(&[35, 35, -10]).ranks(), &[1, 1, 0]);
        assert_eq!(canonical_pattern(&[0, 1, 2]).ranks(), &[0, 1, 2]);
        assert_eq!(canonical_pattern::<i32>(&[]).ranks(), &[] as &[u8]);
        assert!(OrderPattern::new(vec![0, 2]).is_err());
        assert!(OrderPattern::new(vec![1, 1]).is_err());
    }

    #[test]
    fn weak_order_counts() {
        let counts: Vec<usize> = (0..=5).map(|r| weak_orders(r).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 13, 75, 541]);
    }

    #[test]
    fn compile_examples() {
        let i = rel_i();
        assert_eq!(i.patterns().len(), 12);
        assert!(!i.has(&pat(&[0, 0, 1])));
        assert_eq!(rel_x().patterns().len(), 3);
        assert_eq!(TemporalRelation::compile_str(2, "x0<x1").unwrap(), TemporalRelation::lt());
        assert!(TemporalRelation::compile_str(5, "x0<x1").is_err());
        assert!(TemporalRelation::compile_str(2, "x0<x2").is_err());
    }

    #[test]
    fn eval_examples() {
        assert!(rel_i().eval(&[1, 1, 0]).unwrap());
        assert!(!rel_i().eval(&[0, 0, 1]).unwrap());
        assert!(rel_x().eval(&[1, 1, 2]).unwrap());
        assert!(rel_x().eval(&[1, 1]).is_err());
    }

    #[test]
    fn induced_templates() {
        let a = induced_finite_template(&b_lt(), 2);
        assert_eq!(a.relation("<").unwrap(), &[vec![0, 1]]);
        let a = induced_finite_template(&b_ineq(), 2);
        assert_eq!(a.relation("I").unwrap().len(), 7);
        assert!(!a.relation("I").unwrap().contains(&vec![0, 0, 1]));
        let a = induced_finite_template(&b_x(), 3);
        assert_eq!(a.relation("X").unwrap().len(), 9);
        assert_eq!(declared_template(&b_x(), 3).signature.len(), 1);
    }

    fn signs(v: &[&str]) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> =
            v.iter().map(|s| s.chars().map(|c| u8::from(c == 'P')).collect()).collect();
        out.sort();
        out
    }

    #[test]
    fn theta_examples() {
        assert_eq!(rel_x().theta(), signs(&["ZZP", "ZPZ", "PZZ", "PPP"]));
        let all: Vec<String> = (0..8)
            .map(|b: u32| (0..3).map(|i| if (b >> i) & 1 == 1 { 'P' } else { 'Z' }).collect())
            .filter(|s: &String| s != "ZZP")
            .collect();
        assert_eq!(rel_i().theta(), signs(&all.iter().map(String::as_str).collect::<Vec<_>>()));
        assert_eq!(rel_neq().theta(), signs(&["ZP", "PZ", "PP"]));
    }

    #[test]
    fn canonical_op_examples() {
        assert!(check_binary_canonical(&b_lt(), CanonicalBinaryOp::PP).unwrap());
        assert!(check_binary_canonical(&b_ineq(), CanonicalBinaryOp::PP).unwrap());
        assert!(!check_binary_canonical(&b_betw(), CanonicalBinaryOp::PP).unwrap());
        assert!(!check_binary_canonical(&b_betw(), CanonicalBinaryOp::LL).unwrap());
    }

    #[test]
    fn quotient_op_examples() {
        let qi = theta_quotient(&b_ineq());
        let i_only = Structure::new(
            Signature::new(vec![("I".into(), 3)]),
            2,
            vec![qi.relation("I").unwrap().to_vec()],
        );
        assert!(check_quotient_op(&i_only, QuotientOp::Or).unwrap());
        assert!(!check_quotient_op(&i_only, QuotientOp::And).unwrap());
        let qx = theta_quotient(&b_x());
        assert!(check_quotient_op(&qx, QuotientOp::Minority).unwrap());
        let neq_q: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 0], vec![1, 1]];
        assert!(!tuples_preserved(&neq_q, QuotientOp::And));
    }

    #[test]
    fn classify_examples() {
        let c = classify(&b_ineq()).unwrap();
        assert_eq!(c.path, SolverPath::SacPp);
        assert!(!c.dualized);
        assert_eq!(classify(&b_x()).unwrap().path, SolverPath::SaipMinority);
        assert_eq!(classify(&b_betw()).unwrap().path, SolverPath::CompleteOnly);
        assert_eq!(classify(&b_lt()).unwrap().path, SolverPath::SacPp);
        let c = classify(&b_ll()).unwrap();
        assert!(c.has_ll && !c.has_pp);
        assert_eq!(c.path, SolverPath::KconsLl);
        // not ll-closed: ll((1,0,1),(0,2,1)) has pattern (1,0,2)
        let r = TemporalRelation::compile_str(3, "x0<x1 | x0=x2").unwrap();
        assert!(!relation_preserved_by(&r, CanonicalBinaryOp::LL));
    }

    #[test]
    fn classify_reverse_involution() {
        for b in [b_ineq(), b_x(), b_betw(), b_lt()] {
            assert_eq!(b.reversed().reversed(), b);
            assert_eq!(classify(&b.reversed().reversed()).unwrap(), classify(&b).unwrap());
        }
    }

    #[test]
    fn project_examples() {
        let lt = TemporalRelation::lt();
        assert_eq!(lt.project(&[0, 1]).unwrap(), lt);
        assert_eq!(lt.project(&[0]).unwrap(), TemporalRelation::full(1));
        let px = rel_x().project(&[0, 1]).unwrap();
        assert_eq!(px, TemporalRelation::from_ranks(2, &[&[0, 0], &[0, 1], &[1, 0]]).unwrap());
        assert!(lt.project(&[0, 0]).is_err());
        assert!(lt.project(&[2]).is_err());
    }

    #[test]
    fn contract_examples() {
        let i = rel_i();
        assert_eq!(i.contract(&[1]).unwrap(), i);
        let c = i.contract(&[0, 1]).unwrap();
        assert!(c.patterns().iter().all(|p| p.ranks()[0] == p.ranks()[1] && p.ranks()[2] <= p.ranks()[0]));
        assert_eq!(c.patterns().len(), 2);
        assert!(TemporalRelation::lt().contract(&[0, 1]).unwrap().is_empty());
    }

    #[test]
    fn bottom_examples() {
        let lt = TemporalRelation::lt();
        assert_eq!(lt.bottom(&[0]).unwrap(), lt);
        assert!(lt.bottom(&[1]).unwrap().is_empty());
        // x0!=x1 | x2<=x0 fails on x0=x1<x2
        assert!(rel_i().bottom(&[0, 1]).unwrap().is_empty());
        let b = rel_i().bottom(&[0, 1, 2]).unwrap();
        assert_eq!(b.patterns(), &[OrderPattern::new(vec![0, 0, 0]).unwrap()]);
        assert_eq!(rel_i().bottom(&[2]).unwrap().patterns().len(), 3);
        assert!(lt.bottom(&[]).is_err());
    }

    #[test]
    fn ll_implies_quotient_or() {
        for f in ["x0<x1 | x0=x2", "x0<x1", "x0!=x1", "x0<=x1 & x1<=x2", "x0<x1 | x0<x2"] {
            let arity = formula::parse(f).unwrap().max_var().unwrap() + 1;
            let b = TemporalStructure::new(vec![("R".into(), TemporalRelation::compile_str(arity, f).unwrap())])
                .unwrap();
            if check_binary_canonical(&b, CanonicalBinaryOp::LL).unwrap() {
                assert!(check_quotient_op(&theta_quotient(&b), QuotientOp::Or).unwrap(), "{f}");
            }
        }
    }

    #[test]
    fn pattern_supports_match_tuple_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for rel in [rel_i(), rel_x(), rel_betw(), rel_neq(), TemporalRelation::lt()] {
            let n = 5;
            let tuples = TupleRelation::new(rel.arity(), rel.tuples_over(n));
            for _ in 0..200 {
                let doms: Vec<Dom> = (0..rel.arity())
                    .map(|_| dom_from(n, (0..n).filter(|_| rng.gen_bool(0.6))))
                    .collect();
                let refs: Vec<&Dom> = doms.iter().collect();
                let mut a = vec![Dom::with_capacity(n); rel.arity()];
                let mut b = a.clone();
                rel.supports(&refs, &mut a);
                tuples.supports(&refs, &mut b);
                assert_eq!(a, b);
            }
            let m = rel.merge(&[0, 0, 1][..rel.arity()], if rel.arity() == 3 { 2 } else { 1 });
            let mt = tuples.merge(&[0, 0, 1][..rel.arity()], if rel.arity() == 3 { 2 } else { 1 });
            for t in [[0usize, 1], [1, 0], [2, 2]] {
                let t = &t[..m.arity()];
                assert_eq!(m.contains(t), mt.contains(t));
            }
        }
    }
}
