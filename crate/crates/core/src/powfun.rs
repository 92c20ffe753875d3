//! Power structures Γm and their left adjoint Λm, orbit quotients of powers of
//! temporal structures, and the ξ, π, restriction and decoding maps on tables.
//!
//! Elements of `A^m` are indexed lexicographically (row-major, base `|A|`).
//! Power symbols are named `R@i1i2…` and `eq@i1…/j1…` with 1-based indices.

use std::collections::{HashMap, HashSet};

use crate::caps::caps;
use crate::error::{Error, Result};
use crate::relcore::{is_hom, HomCheck, Instance, Signature, Structure, VarMap};
use crate::temporal::{canonical_pattern, declared_template, weak_orders, OrderPattern, TemporalStructure};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PowSymbol {
    /// `R_i`: base relation index and `i: [ℓ] → [m]`, 0-based
    Rel { rel: usize, index: Vec<usize> },
    /// `eq_{i,j}` with `i, j: [ℓ] → [m]`, 0-based
    Eq { left: Vec<usize>, right: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowSignature {
    pub base: Signature,
    pub m: usize,
    pub symbols: Vec<PowSymbol>,
}

/// All maps `[l] → [m]` in lexicographic order.
pub fn index_maps(l: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = m.pow(l as u32);
    for code in 0..total {
        out.push(decode(code, m, l));
    }
    out
}

/// Row-major index of `t` over `{0..n-1}`.
pub fn encode(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * n + v)
}

/// Inverse of [`encode`] for tuples of length `len`.
pub fn decode(mut idx: usize, n: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    t
}

fn digits(i: &[usize]) -> String {
    i.iter().map(|&v| char::from_digit(v as u32 + 1, 10).unwrap()).collect()
}

fn parse_digits(s: &str, m: usize) -> Option<Vec<usize>> {
    if s.is_empty() {
        return None;
    }
    s.chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d >= 1 && d <= m).map(|d| d - 1))
        .collect()
}

impl PowSignature {
    pub fn new(base: &Signature, m: usize) -> Result<Self> {
        if m == 0 || m > 9 {
            return Err(Error::Invalid(format!("power exponent {m} outside 1..=9")));
        }
        if base.max_arity() > m {
            return Err(Error::Invalid(format!("exponent {m} below maximal arity {}", base.max_arity())));
        }
        let mut symbols = Vec::new();
        for (rel, (_, arity)) in base.entries.iter().enumerate() {
            for index in index_maps(*arity, m) {
                symbols.push(PowSymbol::Rel { rel, index });
            }
        }
        for l in 1..=m {
            let maps = index_maps(l, m);
            for left in &maps {
                for right in &maps {
                    symbols.push(PowSymbol::Eq { left: left.clone(), right: right.clone() });
                }
            }
        }
        Ok(PowSignature { base: base.clone(), m, symbols })
    }

    pub fn name(&self, s: &PowSymbol) -> String {
        match s {
            PowSymbol::Rel { rel, index } => format!("{}@{}", self.base.entries[*rel].0, digits(index)),
            PowSymbol::Eq { left, right } => format!("eq@{}/{}", digits(left), digits(right)),
        }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(
            self.symbols
                .iter()
                .map(|s| {
                    let arity = match s {
                        PowSymbol::Rel { .. } => 1,
                        PowSymbol::Eq { .. } => 2,
                    };
                    (self.name(s), arity)
                })
                .collect(),
        )
    }

    /// Base signature read off the relation symbols of a power signature,
    /// in order of first appearance.
    pub fn infer_base(sig: &Signature, m: usize) -> Result<Signature> {
        let mut base: Vec<(String, usize)> = Vec::new();
        for (name, arity) in &sig.entries {
            let bad = || Error::Signature(format!("`{name}` is not a power symbol for m = {m}"));
            let (head, idx) = name.rsplit_once('@').ok_or_else(bad)?;
            if head == "eq" && idx.contains('/') {
                continue;
            }
            let index = parse_digits(idx, m).ok_or_else(bad)?;
            if *arity != 1 {
                return Err(bad());
            }
            match base.iter().find(|(n, _)| n == head) {
                Some((_, a)) if *a != index.len() => return Err(bad()),
                Some(_) => {}
                None => base.push((head.to_string(), index.len())),
            }
        }
        Ok(Signature::new(base))
    }

    /// Reads a symbol name back. Eq symbols are recognized by the `/`.
    pub fn parse(&self, name: &str) -> Result<PowSymbol> {
        let bad = || Error::Signature(format!("`{name}` is not a power symbol for m = {}", self.m));
        let (head, idx) = name.rsplit_once('@').ok_or_else(bad)?;
        if let Some((l, r)) = idx.split_once('/') {
            if head != "eq" {
                return Err(bad());
            }
            let left = parse_digits(l, self.m).ok_or_else(bad)?;
            let right = parse_digits(r, self.m).ok_or_else(bad)?;
            if left.len() != right.len() || left.len() > self.m {
                return Err(bad());
            }
            return Ok(PowSymbol::Eq { left, right });
        }
        let rel = self.base.position(head).ok_or_else(bad)?;
        let index = parse_digits(idx, self.m).ok_or_else(bad)?;
        if index.len() != self.base.entries[rel].1 {
            return Err(bad());
        }
        Ok(PowSymbol::Rel { rel, index })
    }
}

fn project(t: &[usize], i: &[usize]) -> Vec<usize> {
    i.iter().map(|&k| t[k]).collect()
}

/// Γm(A): domain `A^m`, unary `R_i` and binary `eq_{i,j}` relations.
pub fn mpow(a: &Structure, m: usize) -> Result<Structure> {
    let sig = PowSignature::new(&a.signature, m)?;
    let n = a.size;
    let total = n.checked_pow(m as u32).ok_or_else(|| Error::Cap("power domain too large".into()))?;
    let tuples: Vec<Vec<usize>> = (0..total).map(|c| decode(c, n, m)).collect();
    let sets: Vec<HashSet<&[usize]>> = a.relations.iter().map(|r| r.iter().map(Vec::as_slice).collect()).collect();
    // projection codes per index map, and elements bucketed by code
    let mut codes: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut buckets: HashMap<Vec<usize>, Vec<Vec<usize>>> = HashMap::new();
    let mut code_of = |i: &Vec<usize>| -> Vec<usize> {
        codes
            .entry(i.clone())
            .or_insert_with(|| tuples.iter().map(|t| encode(&project(t, i), n)).collect())
            .clone()
    };
    let mut rels = Vec::with_capacity(sig.symbols.len());
    for s in &sig.symbols {
        match s {
            PowSymbol::Rel { rel, index } => {
                let r: Vec<Vec<usize>> = (0..total)
                    .filter(|&c| sets[*rel].contains(project(&tuples[c], index).as_slice()))
                    .map(|c| vec![c])
                    .collect();
                rels.push(r);
            }
            PowSymbol::Eq { left, right } => {
                let lc = code_of(left);
                let rc = code_of(right);
                let l = left.len();
                let bucket = buckets.entry(right.clone()).or_insert_with(|| {
                    let mut b = vec![Vec::new(); n.pow(l as u32)];
                    for (c, &k) in rc.iter().enumerate() {
                        b[k].push(c);
                    }
                    b
                });
                let mut r = Vec::new();
                for (c, &k) in lc.iter().enumerate() {
                    for &d in &bucket[k] {
                        r.push(vec![c, d]);
                    }
                }
                rels.push(r);
            }
        }
    }
    Ok(Structure::new(sig.signature(), total, rels))
}

/// Γm(B)/Aut(Q;<) for a temporal `B`, over the declared relations. Elements
/// are the weak orders of length `m`.
#[derive(Clone, Debug)]
pub struct PatternQuotient {
    pub m: usize,
    pub structure: Structure,
    pub patterns: Vec<OrderPattern>,
    index: HashMap<OrderPattern, usize>,
}

impl PatternQuotient {
    pub fn index_of(&self, p: &OrderPattern) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// Whether two patterns have realizations agreeing on the coordinate lists
/// `i` and `j`. Chains amalgamate, so it suffices that the identified
/// coordinates compare the same way on both sides.
pub fn patterns_agree(p: &OrderPattern, i: &[usize], q: &OrderPattern, j: &[usize]) -> bool {
    let (pr, qr) = (p.ranks(), q.ranks());
    (0..i.len()).all(|k| (0..i.len()).all(|l| pr[i[k]].cmp(&pr[i[l]]) == qr[j[k]].cmp(&qr[j[l]])))
}

pub fn mpow_quotient_temporal(b: &TemporalStructure, m: usize) -> Result<PatternQuotient> {
    let cap = caps().power;
    if m > cap {
        return Err(Error::Cap(format!("power exponent {m} above cap {cap}")));
    }
    let decl = b.declared();
    let base = Signature::new(decl.iter().map(|(n, r)| (n.clone(), r.arity())).collect());
    let sig = PowSignature::new(&base, m)?;
    let patterns = weak_orders(m);
    let mut rels = Vec::with_capacity(sig.symbols.len());
    for s in &sig.symbols {
        let r: Vec<Vec<usize>> = match s {
            PowSymbol::Rel { rel, index } => (0..patterns.len())
                .filter(|&c| decl[*rel].1.eval(&project_ranks(&patterns[c], index)).unwrap_or(false))
                .map(|c| vec![c])
                .collect(),
            PowSymbol::Eq { left, right } => {
                let mut r = Vec::new();
                for (c, p) in patterns.iter().enumerate() {
                    for (d, q) in patterns.iter().enumerate() {
                        if patterns_agree(p, left, q, right) {
                            r.push(vec![c, d]);
                        }
                    }
                }
                r
            }
        };
        rels.push(r);
    }
    let index = patterns.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    Ok(PatternQuotient { m, structure: Structure::new(sig.signature(), patterns.len(), rels), patterns, index })
}

fn project_ranks(p: &OrderPattern, i: &[usize]) -> Vec<u8> {
    i.iter().map(|&k| p.ranks()[k]).collect()
}

/// Λm(X) with the class of every `(a, p)` (stored at `a * m + p`).
#[derive(Clone, Debug)]
pub struct Lowered {
    pub structure: Structure,
    pub class_of: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Λm(X) for `x` over the power signature of `base`.
pub fn mlow(x: &Structure, base: &Signature, m: usize) -> Result<Lowered> {
    let sig = PowSignature::new(base, m)?;
    let ny = x.size * m;
    let mut uf = UnionFind((0..ny).collect());
    let mut facts: Vec<Vec<Vec<usize>>> = vec![Vec::new(); base.len()];
    for (idx, (name, arity)) in x.signature.entries.iter().enumerate() {
        let sym = sig.parse(name)?;
        match &sym {
            PowSymbol::Rel { rel, index } => {
                if *arity != 1 {
                    return Err(Error::Signature(format!("`{name}` must be unary")));
                }
                for t in &x.relations[idx] {
                    facts[*rel].push(index.iter().map(|&p| t[0] * m + p).collect());
                }
            }
            PowSymbol::Eq { left, right } => {
                if *arity != 2 {
                    return Err(Error::Signature(format!("`{name}` must be binary")));
                }
                for t in &x.relations[idx] {
                    for (p, q) in left.iter().zip(right) {
                        uf.union(t[0] * m + p, t[1] * m + q);
                    }
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; ny];
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    for y in 0..ny {
        let r = uf.find(y);
        let next = root_class.len();
        class_of[y] = *root_class.entry(r).or_insert(next);
    }
    let rels = facts
        .into_iter()
        .map(|ts| ts.into_iter().map(|t| t.into_iter().map(|y| class_of[y]).collect()).collect())
        .collect();
    Ok(Lowered { structure: Structure::new(base.clone(), root_class.len(), rels), class_of })
}

/// The adjunction between Λm and Γm for fixed `X` (power signature) and `B`.
pub struct Adjunction<'a> {
    pub x: &'a Structure,
    pub b: &'a Structure,
    pub m: usize,
    pub power: Structure,
    pub lowered: Lowered,
    x_inst: Instance,
    low_inst: Instance,
    power_sets: Vec<HashSet<Vec<usize>>>,
    b_check: HomCheck<'a>,
}

impl<'a> Adjunction<'a> {
    pub fn new(x: &'a Structure, b: &'a Structure, m: usize) -> Result<Self> {
        let power = mpow(b, m)?;
        if x.signature != power.signature {
            return Err(Error::Signature("X is not over the power signature of B".into()));
        }
        let lowered = mlow(x, &b.signature, m)?;
        let x_inst = Instance::from_structure(x);
        let low_inst = Instance::from_structure(&lowered.structure);
        let power_sets = power.relations.iter().map(|r| r.iter().cloned().collect()).collect();
        Ok(Adjunction { x, b, m, power, lowered, x_inst, low_inst, power_sets, b_check: HomCheck::new(b) })
    }

    fn up_hom(&self, h: &[usize]) -> bool {
        h.len() == self.x.size
            && h.iter().all(|&v| v < self.power.size)
            && self.x.relations.iter().enumerate().all(|(i, r)| {
                r.iter().all(|t| self.power_sets[i].contains(&t.iter().map(|&v| h[v]).collect::<Vec<_>>()))
            })
    }

    /// `h: X → Γm(B)` to `[a, i] ↦ h(a)_i`.
    pub fn eta(&self, h: &[usize]) -> Result<VarMap> {
        if !self.up_hom(h) {
            return Err(Error::NotHom("input is not a homomorphism X → Γm(B)".into()));
        }
        let mut g = vec![usize::MAX; self.lowered.structure.size];
        for (a, &img) in h.iter().enumerate() {
            let t = decode(img, self.b.size, self.m);
            for (p, &v) in t.iter().enumerate() {
                let c = self.lowered.class_of[a * self.m + p];
                if g[c] != usize::MAX && g[c] != v {
                    return Err(Error::Internal("eta is not constant on a class".into()));
                }
                g[c] = v;
            }
        }
        if !self.b_check.check(&self.low_inst, &g) {
            return Err(Error::Internal("eta produced a non-homomorphism".into()));
        }
        Ok(g)
    }

    /// `g: Λm(X) → B` to `a ↦ (g[a,1], …, g[a,m])`.
    pub fn mu(&self, g: &[usize]) -> Result<VarMap> {
        if !self.b_check.check(&self.low_inst, g) {
            return Err(Error::NotHom("input is not a homomorphism Λm(X) → B".into()));
        }
        let h: VarMap = (0..self.x.size)
            .map(|a| {
                let t: Vec<usize> = (0..self.m).map(|p| g[self.lowered.class_of[a * self.m + p]]).collect();
                encode(&t, self.b.size)
            })
            .collect();
        if !self.up_hom(&h) {
            return Err(Error::Internal("mu produced a non-homomorphism".into()));
        }
        Ok(h)
    }

    pub fn x_instance(&self) -> &Instance {
        &self.x_inst
    }

    pub fn lowered_instance(&self) -> &Instance {
        &self.low_inst
    }
}

/// Explicit isomorphism Γm(A×A) → Γm(A)×Γm(A): `((a1,b1),…,(am,bm))` goes to
/// `((a1,…,am),(b1,…,bm))`.
pub fn product_power_map(n: usize, m: usize) -> VarMap {
    let nn = n * n;
    let big = n.pow(m as u32);
    (0..nn.pow(m as u32))
        .map(|c| {
            let pairs = decode(c, nn, m);
            let left: Vec<usize> = pairs.iter().map(|&e| e / n).collect();
            let right: Vec<usize> = pairs.iter().map(|&e| e % n).collect();
            encode(&left, n) * big + encode(&right, n)
        })
        .collect()
}

/// A total function on `dom^arity`, entries in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable<T> {
    pub arity: usize,
    pub dom: usize,
    pub entries: Vec<T>,
}

impl<T> FunctionTable<T> {
    pub fn from_fn(arity: usize, dom: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let total = dom.pow(arity as u32);
        let entries = (0..total).map(|c| f(&decode(c, dom, arity))).collect();
        FunctionTable { arity, dom, entries }
    }

    pub fn get(&self, args: &[usize]) -> &T {
        &self.entries[encode(args, self.dom)]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Calls `visit` with every `n`-tuple drawn from `items`.
fn for_each_choice<T>(items: &[T], n: usize, mut visit: impl FnMut(&[&T]) -> bool) -> bool {
    if items.is_empty() {
        return n != 0 || visit(&[]);
    }
    let mut idx = vec![0usize; n];
    loop {
        let pick: Vec<&T> = idx.iter().map(|&i| &items[i]).collect();
        if !visit(&pick) {
            return false;
        }
        let mut p = n;
        loop {
            if p == 0 {
                return true;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < items.len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Whether `g: A^n → B` maps every n-tuple of tuples of each relation of
/// `a` into the same-named relation of `b`.
pub fn is_polymorphism(g: &FunctionTable<usize>, a: &Structure, b: &Structure) -> bool {
    if g.dom != a.size || g.entries.iter().any(|&v| v >= b.size) {
        return false;
    }
    a.signature.entries.iter().enumerate().all(|(ri, (name, arity))| {
        let Some(bi) = b.index_of(name) else { return false };
        let target: HashSet<&[usize]> = b.relations[bi].iter().map(Vec::as_slice).collect();
        let mut col = vec![0usize; g.arity];
        for_each_choice(&a.relations[ri], g.arity, |rows| {
            let img: Vec<usize> = (0..*arity)
                .map(|p| {
                    for (k, row) in rows.iter().enumerate() {
                        col[k] = row[p];
                    }
                    *g.get(&col)
                })
                .collect();
            target.contains(img.as_slice())
        })
    })
}

/// Whether `f: A^n → Q` is a polymorphism from `a` to the temporal `b`
/// (relations matched by name).
pub fn is_temporal_polymorphism(f: &FunctionTable<i64>, a: &Structure, b: &TemporalStructure) -> bool {
    if f.dom != a.size {
        return false;
    }
    a.signature.entries.iter().enumerate().all(|(ri, (name, arity))| {
        let Some(r) = b.get(name) else { return false };
        let mut col = vec![0usize; f.arity];
        for_each_choice(&a.relations[ri], f.arity, |rows| {
            let img: Vec<i64> = (0..*arity)
                .map(|p| {
                    for (k, row) in rows.iter().enumerate() {
                        col[k] = row[p];
                    }
                    *f.get(&col)
                })
                .collect();
            r.eval(&img).unwrap_or(false)
        })
    })
}

/// π(f): `(a1,…,am) ↦ (f(a1),…,f(am))/Aut(Q;<)` for `f` given by its values.
pub fn pi_map(f: &[i64], m: usize) -> FunctionTable<OrderPattern> {
    FunctionTable::from_fn(m, f.len(), |t| {
        let v: Vec<i64> = t.iter().map(|&a| f[a]).collect();
        canonical_pattern(&v)
    })
}

/// ξ∞m(f) for an n-ary polymorphism `f` of (A, B), as a table over Γm(A)
/// with values indexed into `q`. Both the input and the output are verified.
pub fn xi_inf(f: &FunctionTable<i64>, a: &Structure, b: &TemporalStructure, q: &PatternQuotient) -> Result<FunctionTable<usize>> {
    if !is_temporal_polymorphism(f, a, b) {
        return Err(Error::NotHom("table is not a polymorphism of (A, B)".into()));
    }
    let m = q.m;
    let na = a.size;
    let power_dom = na.pow(m as u32);
    let g = FunctionTable::from_fn(f.arity, power_dom, |cs| {
        let rows: Vec<Vec<usize>> = cs.iter().map(|&c| decode(c, na, m)).collect();
        let vals: Vec<i64> = (0..m)
            .map(|p| {
                let col: Vec<usize> = rows.iter().map(|r| r[p]).collect();
                *f.get(&col)
            })
            .collect();
        q.index_of(&canonical_pattern(&vals)).expect("every weak order is an element")
    });
    if !is_polymorphism(&g, &mpow(a, m)?, &q.structure) {
        return Err(Error::Internal("ξ image is not a polymorphism of the power template".into()));
    }
    Ok(g)
}

/// ξ from level `big.m` down to `small.m` (one less): arguments are padded
/// by repeating their last entry and the last output coordinate is dropped.
pub fn xi_step(g: &FunctionTable<usize>, a_size: usize, big: &PatternQuotient, small: &PatternQuotient) -> Result<FunctionTable<usize>> {
    let (mb, ms) = (big.m, small.m);
    if mb != ms + 1 || ms == 0 {
        return Err(Error::Invalid(format!("cannot step from {mb} to {ms}")));
    }
    if g.dom != a_size.pow(mb as u32) {
        return Err(Error::Invalid("table domain does not match the larger power".into()));
    }
    Ok(FunctionTable::from_fn(g.arity, a_size.pow(ms as u32), |cs| {
        let padded: Vec<usize> = cs
            .iter()
            .map(|&c| {
                let mut t = decode(c, a_size, ms);
                t.push(*t.last().unwrap());
                encode(&t, a_size)
            })
            .collect();
        let p = &big.patterns[*g.get(&padded)];
        let keep: Vec<usize> = (0..ms).collect();
        small.index_of(&canonical_pattern(&project_ranks(p, &keep))).unwrap()
    }))
}

/// h_k with `pr_idx ∘ h = h_k ∘ pr_idx`, checking that the value does not
/// depend on the padding coordinates.
pub fn restrict_hom(h: &FunctionTable<OrderPattern>, idx: &[usize]) -> Result<FunctionTable<OrderPattern>> {
    let m = h.arity;
    let mut seen = vec![false; m];
    for &i in idx {
        if i >= m || seen[i] {
            return Err(Error::Invalid(format!("restriction indices {idx:?} must be distinct and below {m}")));
        }
        seen[i] = true;
    }
    let k = idx.len();
    let mut out: Vec<Option<OrderPattern>> = vec![None; h.dom.pow(k as u32)];
    for (c, p) in h.entries.iter().enumerate() {
        let x = decode(c, h.dom, m);
        let key = encode(&project(&x, idx), h.dom);
        let r = canonical_pattern(&project_ranks(p, idx));
        match &out[key] {
            Some(prev) if *prev != r => {
                return Err(Error::NotHom(format!(
                    "restriction to {idx:?} depends on padding at {:?}",
                    project(&x, idx)
                )))
            }
            Some(_) => {}
            None => out[key] = Some(r),
        }
    }
    Ok(FunctionTable { arity: k, dom: h.dom, entries: out.into_iter().map(|p| p.expect("every tuple is padded")).collect() })
}

/// Table of a homomorphism Γm(X) → Γm(B)/Aut(Q;<) given as a map on element indices.
pub fn table_from_hom(h: &[usize], x_size: usize, q: &PatternQuotient) -> Result<FunctionTable<OrderPattern>> {
    if h.len() != x_size.pow(q.m as u32) || h.iter().any(|&v| v >= q.patterns.len()) {
        return Err(Error::Invalid("map does not fit the power domain".into()));
    }
    Ok(FunctionTable { arity: q.m, dom: x_size, entries: h.iter().map(|&v| q.patterns[v].clone()).collect() })
}

/// Recovers `f: X → Q` with `π(f) = h`. The order on `X` is read from h_2
/// and checked against every triple; inconsistent tables are errors.
pub fn decode_hom(h: &FunctionTable<OrderPattern>) -> Result<Vec<i64>> {
    let m = h.arity;
    if m < 2 {
        return Err(Error::Invalid("decoding needs m ≥ 2".into()));
    }
    let n = h.dom;
    let h2 = restrict_hom(h, &[0, 1])?;
    let cmp = |a: usize, b: usize| {
        let r = h2.get(&[a, b]).ranks();
        r[0].cmp(&r[1])
    };
    for a in 0..n {
        if cmp(a, a) != std::cmp::Ordering::Equal {
            return Err(Error::NotHom(format!("h2({a},{a}) is not constant")));
        }
    }
    if m >= 3 {
        let h3 = restrict_hom(h, &[0, 1, 2])?;
        for c in 0..h3.len() {
            let t = decode(c, n, 3);
            let r = h3.entries[c].ranks();
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if r[p].cmp(&r[q]) != cmp(t[p], t[q]) {
                    return Err(Error::NotHom(format!("h3{t:?} disagrees with h2 on positions {p},{q}")));
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(a, b).then(a.cmp(&b)));
    let mut f = vec![0i64; n];
    for w in 1..order.len() {
        let (prev, cur) = (order[w - 1], order[w]);
        f[cur] = f[prev] + i64::from(cmp(prev, cur) == std::cmp::Ordering::Less);
    }
    if pi_map(&f, m) != *h {
        return Err(Error::NotHom("table is not the pattern map of any function".into()));
    }
    Ok(f)
}

/// [`decode_hom`] followed by a check that the decoded map is a
/// homomorphism from `x` to `b` (declared relations by name).
pub fn decode_hom_checked(h: &FunctionTable<OrderPattern>, x: &Structure, b: &TemporalStructure) -> Result<Option<Vec<i64>>> {
    if h.dom != x.size {
        return Err(Error::Invalid("table domain differs from X".into()));
    }
    let f = decode_hom(h)?;
    let unary = FunctionTable { arity: 1, dom: f.len(), entries: f.clone() };
    Ok(is_temporal_polymorphism(&unary, x, b).then_some(f))
}

/// The pattern map Γm(A) → Γm(B)/Aut(Q;<) for `A` induced on `{0..n-1}`,
/// verified as a homomorphism.
pub fn pattern_sandwich(b: &TemporalStructure, n: usize, q: &PatternQuotient) -> Result<VarMap> {
    let a = declared_template(b, n);
    let pa = mpow(&a, q.m)?;
    let h: VarMap = (0..pa.size)
        .map(|c| q.index_of(&canonical_pattern(&decode(c, n, q.m))).unwrap())
        .collect();
    if !is_hom(&Instance::from_structure(&pa), &q.structure, &h) {
        return Err(Error::Internal("pattern map is not a homomorphism".into()));
    }
    Ok(h)
}

#[cfg(test)]
mod tests;
