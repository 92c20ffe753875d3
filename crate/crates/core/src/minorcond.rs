//! Minor conditions, their indicator instances, and polymorphism existence
//! over finite and temporal templates.

use std::collections::HashSet;
use std::fmt;

use crate::caps::caps;
use crate::error::{Error, Result};
use crate::powfun::{decode, encode, is_polymorphism, is_temporal_polymorphism, FunctionTable};
use crate::relcore::{hom_search, Constraint, Instance, Structure};
use crate::tempsolve::{self, TemporalInstance, Verdict};
use crate::temporal::{declared_template, TemporalStructure};

/// `f(x_{σ(1)},…) ≈ g(x_{τ(1)},…)` over variables `x_1..x_m` (0-based maps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub lhs: usize,
    pub sigma: Vec<usize>,
    pub rhs: usize,
    pub tau: Vec<usize>,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorCondition {
    pub name: String,
    pub symbols: Vec<(String, usize)>,
    pub identities: Vec<Identity>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    Cyclic(usize),
    Symmetric(usize),
    /// blocks of sizes `L+1` and `L`
    BlockSymmetric(usize),
    Olsak,
    Wnu(usize),
    Siggers6,
    Siggers4,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionKind::Cyclic(n) => write!(f, "cyclic({n})"),
            ConditionKind::Symmetric(n) => write!(f, "symmetric({n})"),
            ConditionKind::BlockSymmetric(l) => write!(f, "block-symmetric(L={l}, arity {})", 2 * l + 1),
            ConditionKind::Olsak => write!(f, "olsak"),
            ConditionKind::Wnu(k) => write!(f, "wnu({k})"),
            ConditionKind::Siggers6 => write!(f, "siggers6"),
            ConditionKind::Siggers4 => write!(f, "siggers4"),
        }
    }
}

impl ConditionKind {
    /// Reads `cyclic 5`, `symmetric 4`, `block-symmetric 2` (or `L=2`),
    /// `wnu 3`, `olsak`, `siggers6`, `siggers4`.
    pub fn parse(kind: &str, param: Option<&str>) -> Result<ConditionKind> {
        let num = || -> Result<usize> {
            let p = param.ok_or_else(|| Error::Parse(format!("`{kind}` needs a parameter")))?;
            let p = p.strip_prefix("L=").or_else(|| p.strip_prefix("n=")).unwrap_or(p);
            p.parse().map_err(|_| Error::Parse(format!("bad parameter `{p}` for `{kind}`")))
        };
        let none = |k: ConditionKind| match param {
            None => Ok(k),
            Some(p) => Err(Error::Parse(format!("`{kind}` takes no parameter, got `{p}`"))),
        };
        match kind {
            "cyclic" => Ok(ConditionKind::Cyclic(num()?)),
            "symmetric" => Ok(ConditionKind::Symmetric(num()?)),
            "block-symmetric" | "block" => Ok(ConditionKind::BlockSymmetric(num()?)),
            "wnu" => Ok(ConditionKind::Wnu(num()?)),
            "olsak" => none(ConditionKind::Olsak),
            "siggers6" => none(ConditionKind::Siggers6),
            "siggers4" => none(ConditionKind::Siggers4),
            _ => Err(Error::Parse(format!("unknown condition `{kind}`"))),
        }
    }

    /// Whether [`ConditionKind::parse`] expects a parameter.
    pub fn takes_param(kind: &str) -> bool {
        matches!(kind, "cyclic" | "symmetric" | "block-symmetric" | "block" | "wnu")
    }
}

impl MinorCondition {
    pub fn check(&self) -> Result<()> {
        for id in &self.identities {
            for (sym, map) in [(id.lhs, &id.sigma), (id.rhs, &id.tau)] {
                let Some((_, arity)) = self.symbols.get(sym) else {
                    return Err(Error::Invalid(format!("unknown symbol {sym}")));
                };
                if map.len() != *arity || map.iter().any(|&v| v >= id.m) {
                    return Err(Error::Invalid(format!("map {map:?} does not fit arity {arity} into {}", id.m)));
                }
            }
        }
        Ok(())
    }

    /// Whether every identity permutes the variables of one symbol.
    pub fn is_permutational(&self) -> bool {
        self.identities.iter().all(|id| {
            let n = id.sigma.len();
            let is_perm = |p: &[usize]| {
                let mut seen = vec![false; n];
                p.len() == n && p.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
            };
            id.lhs == id.rhs && id.m == n && is_perm(&id.sigma) && is_perm(&id.tau)
        })
    }

    /// Pointwise check of every identity on explicit tables over `{0..dom-1}`.
    pub fn holds<T: PartialEq>(&self, tables: &[FunctionTable<T>]) -> bool {
        self.identities.iter().all(|id| {
            let dom = tables[id.lhs].dom;
            (0..dom.pow(id.m as u32)).all(|c| {
                let x = decode(c, dom, id.m);
                let l: Vec<usize> = id.sigma.iter().map(|&i| x[i]).collect();
                let r: Vec<usize> = id.tau.iter().map(|&i| x[i]).collect();
                tables[id.lhs].get(&l) == tables[id.rhs].get(&r)
            })
        })
    }
}

fn single(name: String, arity: usize, pairs: Vec<(Vec<usize>, Vec<usize>)>, m: usize) -> MinorCondition {
    MinorCondition {
        name,
        symbols: vec![("f".into(), arity)],
        identities: pairs.into_iter().map(|(sigma, tau)| Identity { lhs: 0, sigma, rhs: 0, tau, m }).collect(),
    }
}

fn transposition(n: usize, i: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, i + 1);
    p
}

/// Chain `w_0 ≈ w_1 ≈ …` of words over variables `0..m`.
fn chain(words: &[&[usize]]) -> Vec<(Vec<usize>, Vec<usize>)> {
    words.windows(2).map(|w| (w[0].to_vec(), w[1].to_vec())).collect()
}

pub fn build_condition(kind: ConditionKind) -> Result<MinorCondition> {
    let name = kind.to_string();
    let bad = |msg: &str| Err(Error::Invalid(format!("{name}: {msg}")));
    Ok(match kind {
        ConditionKind::Cyclic(n) => {
            if n < 2 {
                return bad("arity must be at least 2");
            }
            let id: Vec<usize> = (0..n).collect();
            let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            single(name, n, vec![(id, rot)], n)
        }
        ConditionKind::Symmetric(n) => {
            if n < 2 {
                return bad("arity must be at least 2");
            }
            let id: Vec<usize> = (0..n).collect();
            single(name, n, (0..n - 1).map(|i| (id.clone(), transposition(n, i))).collect(), n)
        }
        ConditionKind::BlockSymmetric(l) => {
            if l < 1 {
                return bad("L must be at least 1");
            }
            let n = 2 * l + 1;
            let id: Vec<usize> = (0..n).collect();
            let swaps = (0..l).chain(l + 1..n - 1);
            single(name, n, swaps.map(|i| (id.clone(), transposition(n, i))).collect(), n)
        }
        ConditionKind::Olsak => {
            let (x, y) = (0, 1);
            single(name, 6, chain(&[&[x, x, y, y, y, x], &[x, y, x, y, x, y], &[y, x, x, x, y, y]]), 2)
        }
        ConditionKind::Wnu(k) => {
            if k < 3 {
                return bad("arity must be at least 3");
            }
            let words: Vec<Vec<usize>> = (0..k).map(|p| (0..k).map(|i| usize::from(i != p)).collect()).collect();
            let refs: Vec<&[usize]> = words.iter().map(Vec::as_slice).collect();
            single(name, k, chain(&refs), 2)
        }
        ConditionKind::Siggers6 => {
            let (x, y, z) = (0, 1, 2);
            single(name, 6, vec![(vec![x, y, x, z, y, z], vec![y, x, z, x, z, y])], 3)
        }
        ConditionKind::Siggers4 => {
            let (x, y, z) = (0, 1, 2);
            single(name, 4, vec![(vec![x, y, z, x], vec![y, z, x, z])], 3)
        }
    })
}

/// Indicator instance: one variable per (symbol, argument tuple) up to the
/// identifications forced by the identities.
#[derive(Clone, Debug)]
pub struct IndicatorResult {
    pub instance: Instance,
    /// per symbol, the variable of every argument tuple (row-major code)
    pub varmap: Vec<Vec<usize>>,
    pub dom: usize,
}

impl IndicatorResult {
    pub fn var(&self, symbol: usize, args: &[usize]) -> usize {
        self.varmap[symbol][encode(args, self.dom)]
    }

    /// Tables read off an assignment of the indicator variables.
    pub fn tables<T: Clone>(&self, c: &MinorCondition, h: &[T]) -> Vec<FunctionTable<T>> {
        c.symbols
            .iter()
            .enumerate()
            .map(|(s, (_, arity))| FunctionTable {
                arity: *arity,
                dom: self.dom,
                entries: self.varmap[s].iter().map(|&v| h[v].clone()).collect(),
            })
            .collect()
    }
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

pub fn indicator(c: &MinorCondition, a: &Structure) -> Result<IndicatorResult> {
    indicator_capped(c, a, caps().indicator)
}

/// [`indicator`] with an explicit bound on column choices per relation.
pub fn indicator_capped(c: &MinorCondition, a: &Structure, cap: u64) -> Result<IndicatorResult> {
    c.check()?;
    let n = a.size;
    let mut offsets = Vec::with_capacity(c.symbols.len());
    let mut total = 0usize;
    for (_, arity) in &c.symbols {
        offsets.push(total);
        total += n.checked_pow(*arity as u32).ok_or_else(|| Error::Cap("indicator too large".into()))?;
    }
    for (ri, (name, _)) in a.signature.entries.iter().enumerate() {
        for (_, arity) in &c.symbols {
            let count = (a.relations[ri].len() as f64).powi(*arity as i32);
            if count > cap as f64 {
                return Err(Error::Cap(format!(
                    "`{name}` needs {count:.0} column choices for arity {arity}, cap {cap}"
                )));
            }
        }
    }
    let mut uf = UnionFind((0..total).collect());
    for id in &c.identities {
        for code in 0..n.pow(id.m as u32) {
            let x = decode(code, n, id.m);
            let l: Vec<usize> = id.sigma.iter().map(|&i| x[i]).collect();
            let r: Vec<usize> = id.tau.iter().map(|&i| x[i]).collect();
            uf.union(offsets[id.lhs] + encode(&l, n), offsets[id.rhs] + encode(&r, n));
        }
    }
    let mut class = vec![usize::MAX; total];
    let mut names = Vec::new();
    for raw in 0..total {
        let root = uf.find(raw);
        if class[root] == usize::MAX {
            let s = offsets.iter().rposition(|&o| o <= raw).unwrap();
            let args = decode(raw - offsets[s], n, c.symbols[s].1);
            let args: Vec<String> = args.iter().map(usize::to_string).collect();
            class[root] = names.len();
            names.push(format!("{}({})", c.symbols[s].0, args.join(",")));
        }
        class[raw] = class[root];
    }
    let varmap: Vec<Vec<usize>> = c
        .symbols
        .iter()
        .enumerate()
        .map(|(s, (_, arity))| (0..n.pow(*arity as u32)).map(|t| class[offsets[s] + t]).collect())
        .collect();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut constraints = Vec::new();
    for (s, (_, arity)) in c.symbols.iter().enumerate() {
        for (ri, rel) in a.relations.iter().enumerate() {
            let r = a.arity(ri);
            if rel.is_empty() {
                continue;
            }
            let mut idx = vec![0usize; *arity];
            loop {
                let args: Vec<usize> = (0..r)
                    .map(|p| {
                        let col: Vec<usize> = idx.iter().map(|&k| rel[k][p]).collect();
                        varmap[s][encode(&col, n)]
                    })
                    .collect();
                if seen.insert((ri, args.clone())) {
                    constraints.push(Constraint { rel: a.name(ri).to_string(), args });
                }
                let mut p = *arity;
                loop {
                    if p == 0 {
                        break;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < rel.len() {
                        break;
                    }
                    idx[p] = 0;
                }
                if idx.iter().all(|&k| k == 0) {
                    break;
                }
            }
        }
    }
    let instance = Instance::new(names, constraints)?;
    Ok(IndicatorResult { instance, varmap, dom: n })
}

/// Tables satisfying `c` in Pol(a, b) for finite `b`, verified.
pub fn decide_finite(c: &MinorCondition, a: &Structure, b: &Structure) -> Result<Option<Vec<FunctionTable<usize>>>> {
    if a.signature != b.signature {
        return Err(Error::Signature("A and B have different signatures".into()));
    }
    let ind = indicator(c, a)?;
    let Some(h) = hom_search(&ind.instance, b)? else { return Ok(None) };
    let tables = ind.tables(c, &h);
    if !c.holds(&tables) || !tables.iter().all(|t| is_polymorphism(t, a, b)) {
        return Err(Error::Internal("indicator solution does not give polymorphisms".into()));
    }
    Ok(Some(tables))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionVerdict {
    /// explicit tables with values as layer ranks
    Sat(Vec<FunctionTable<i64>>),
    Unsat(String),
    Unknown,
}

/// Decides a permutational condition over `(A, B)` with `A` induced on
/// `{0..a_size-1}` (declared relations), through the temporal solver.
pub fn decide_temporal(c: &MinorCondition, a_size: usize, b: &TemporalStructure) -> Result<(ConditionVerdict, IndicatorResult)> {
    decide_temporal_capped(c, a_size, b, caps().indicator)
}

/// [`decide_temporal`] with an explicit indicator cap.
pub fn decide_temporal_capped(
    c: &MinorCondition,
    a_size: usize,
    b: &TemporalStructure,
    cap: u64,
) -> Result<(ConditionVerdict, IndicatorResult)> {
    if !c.is_permutational() {
        return Err(Error::Invalid(format!("{} is not given by variable permutations", c.name)));
    }
    let a = declared_template(b, a_size);
    let ind = indicator_capped(c, &a, cap)?;
    let x = TemporalInstance::from_instance(&ind.instance, b)?;
    let v = match tempsolve::solve(&x, b)? {
        Verdict::Sat(s) => {
            let tables = ind.tables(c, &s);
            if !c.holds(&tables) || !tables.iter().all(|t| is_temporal_polymorphism(t, &a, b)) {
                return Err(Error::Internal("solver assignment does not give polymorphisms".into()));
            }
            ConditionVerdict::Sat(tables)
        }
        Verdict::Unsat(stage) => ConditionVerdict::Unsat(stage),
        Verdict::Unknown => ConditionVerdict::Unknown,
    };
    Ok((v, ind))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    No,
    Inconclusive,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::No => "NO",
            Answer::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Probes {
    pub cyclic: Vec<usize>,
    pub block: Vec<usize>,
    pub symmetric: Vec<usize>,
}

impl Probes {
    pub fn standard() -> Self {
        Probes { cyclic: vec![2, 3, 5], block: vec![2], symmetric: vec![] }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub kind: ConditionKind,
    pub variables: usize,
    pub constraints: usize,
    pub verdict: ConditionVerdict,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub a_size: usize,
    pub probes: Vec<ProbeResult>,
    pub finitely_tractable: Answer,
    pub blp_aip_solvable: Answer,
    pub notes: Vec<String>,
}

impl ProbeResult {
    pub fn certificate(&self) -> Option<String> {
        match &self.verdict {
            ConditionVerdict::Unsat(stage) => Some(format!(
                "{}: indicator with {} variables and {} constraints refuted by {}",
                self.kind, self.variables, self.constraints, stage
            )),
            _ => None,
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "template: (Γ3 A, Γ3 B / Aut(Q;<)) with A induced on {{0..{}}}", self.a_size.saturating_sub(1))?;
        for p in &self.probes {
            let v = match &p.verdict {
                ConditionVerdict::Sat(_) => "SAT".to_string(),
                ConditionVerdict::Unsat(s) => format!("UNSAT-certified ({s})"),
                ConditionVerdict::Unknown => "UNKNOWN".to_string(),
            };
            writeln!(f, "probe {}: {v} [{} variables, {} constraints]", p.kind, p.variables, p.constraints)?;
        }
        writeln!(f, "finitely_tractable={}", self.finitely_tractable)?;
        writeln!(f, "blp_aip_solvable={}", self.blp_aip_solvable)?;
        for p in &self.probes {
            if let Some(c) = p.certificate() {
                writeln!(f, "certificate: {c}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// A multiset `M` of size `l` such that every relation of `a` has a tuple
/// of rows, each a rearrangement of `M`, whose columns all lie in the
/// relation. Fixing the second block of a 2-block-symmetric operation of
/// arity `2l+1` to `M` then leaves a symmetric polymorphism of arity `l+1`.
pub fn block_to_symmetric_witness(a: &Structure, l: usize) -> Option<Vec<usize>> {
    let n = a.size;
    let mut multisets = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v, n, l, cur, out);
            cur.pop();
        }
    }
    rec(0, n, l, &mut cur, &mut multisets);
    multisets.into_iter().find(|m| {
        let perms = arrangements(m);
        (0..a.relations.len()).all(|ri| {
            let r = a.arity(ri);
            let set: HashSet<&[usize]> = a.relations[ri].iter().map(Vec::as_slice).collect();
            let mut idx = vec![0usize; r];
            loop {
                let ok = (0..l).all(|col| {
                    let t: Vec<usize> = idx.iter().map(|&k| perms[k][col]).collect();
                    set.contains(t.as_slice())
                });
                if ok {
                    return true;
                }
                let mut p = r;
                loop {
                    if p == 0 {
                        return false;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < perms.len() {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        })
    })
}

fn arrangements(m: &[usize]) -> Vec<Vec<usize>> {
    let mut out = HashSet::new();
    let n = m.len();
    let mut p: Vec<usize> = (0..n).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    out.insert(p.iter().map(|&i| m[i]).collect::<Vec<_>>());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.insert(p.iter().map(|&i| m[i]).collect());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let mut v: Vec<Vec<usize>> = out.into_iter().collect();
    v.sort();
    v
}

fn probe(kind: ConditionKind, a_size: usize, b: &TemporalStructure) -> Result<ProbeResult> {
    let c = build_condition(kind)?;
    let (verdict, ind) = decide_temporal(&c, a_size, b)?;
    Ok(ProbeResult {
        kind,
        variables: ind.instance.variables.len(),
        constraints: ind.instance.constraints.len(),
        verdict,
    })
}

/// Necessary-condition report for the derived template. Never answers YES.
pub fn report_template(a_size: usize, b: &TemporalStructure, probes: &Probes) -> Result<Report> {
    let kinds: Vec<ConditionKind> = probes
        .cyclic
        .iter()
        .map(|&n| ConditionKind::Cyclic(n))
        .chain(probes.block.iter().map(|&l| ConditionKind::BlockSymmetric(l)))
        .chain(probes.symmetric.iter().map(|&n| ConditionKind::Symmetric(n)))
        .collect();
    let results: Vec<Result<ProbeResult>> = crate::par::map(&kinds, |&k| probe(k, a_size, b));
    let results: Vec<ProbeResult> = results.into_iter().collect::<Result<_>>()?;
    let unsat = |p: &&ProbeResult| matches!(p.verdict, ConditionVerdict::Unsat(_));
    let mut notes = Vec::new();
    let mut finitely = Answer::Inconclusive;
    let mut blp = Answer::Inconclusive;
    let mut missing_cyclic = Vec::new();
    for p in results.iter().filter(unsat) {
        match p.kind {
            ConditionKind::Cyclic(n) if n >= 2 => {
                finitely = Answer::No;
                missing_cyclic.push(n.to_string());
            }
            ConditionKind::BlockSymmetric(l) => {
                blp = Answer::No;
                notes.push(format!(
                    "blp_aip_solvable=NO: no 2-block symmetric polymorphism of arity {}, while BLP+AIP solvability of the derived template requires them in all odd arities",
                    2 * l + 1
                ));
            }
            ConditionKind::Symmetric(n) if n >= 2 => {
                let a = declared_template(b, a_size);
                if let Some(m) = block_to_symmetric_witness(&a, n - 1) {
                    blp = Answer::No;
                    notes.push(format!(
                        "blp_aip_solvable=NO: a 2-block symmetric polymorphism of arity {} would give a symmetric polymorphism of arity {n} by fixing its second block to {m:?}, and none exists",
                        2 * n - 1
                    ));
                }
            }
            _ => {}
        }
    }
    if !missing_cyclic.is_empty() {
        notes.insert(
            0,
            format!(
                "finitely_tractable=NO read from the missing cyclic polymorphisms of arity {}; finite tractability of the derived template requires cyclic polymorphisms of all large enough prime arities in Pol(A,B)",
                missing_cyclic.join(", ")
            ),
        );
    }
    if results.iter().any(|p| matches!(p.verdict, ConditionVerdict::Sat(_))) {
        notes.push("some probes are satisfiable; they give no conclusion".into());
    }
    Ok(Report { a_size, probes: results, finitely_tractable: finitely, blp_aip_solvable: blp, notes })
}
