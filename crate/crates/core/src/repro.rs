//! Reproduction suite: the ten acceptance checks, shared by the acceptance
//! test target and the `reproduce` command.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::Instant;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consistency::{k_strategy, k_strategy_csp, sac_csp, strategy_restrict};
use crate::error::Result;
use crate::exactlin::{self, AffineSystem};
use crate::gen;
use crate::minorcond::{
    build_condition, decide_temporal, decide_temporal_capped, report_template, Answer, ConditionKind, ConditionVerdict,
    Probes,
};
use crate::par;
use crate::powfun::{
    decode, decode_hom, is_temporal_polymorphism, mlow, mpow, mpow_quotient_temporal, pi_map, product_power_map,
    Adjunction, FunctionTable, PowSignature,
};
use crate::relax;
use crate::relcore::{all_homs, hom_search, is_isomorphism, product, Instance, Signature, Structure};
use crate::tempsolve::{self, contract_instance, project_instance, symbol_template, verify_assignment, TemporalInstance, Verdict};
use crate::temporal::{declared_template, weak_orders, TemporalRelation, TemporalStructure};

/// Named templates used by the suite and shipped with the command-line tool.
pub mod templates {
    use crate::temporal::{TemporalRelation, TemporalStructure};

    fn rel(arity: usize, src: &str) -> TemporalRelation {
        TemporalRelation::compile_str(arity, src).expect("builtin formula")
    }

    pub fn i_neq() -> TemporalStructure {
        TemporalStructure::new(vec![("I".into(), rel(3, "x0!=x1 | x2<=x0")), ("neq".into(), rel(2, "x0!=x1"))]).unwrap()
    }

    pub fn x() -> TemporalStructure {
        let src = "(x0=x1 & x0<x2) | (x0=x2 & x0<x1) | (x1=x2 & x1<x0)";
        TemporalStructure::new(vec![("X".into(), rel(3, src))]).unwrap()
    }

    pub fn lt() -> TemporalStructure {
        TemporalStructure::new(vec![("lt".into(), TemporalRelation::lt())]).unwrap()
    }

    pub fn betw() -> TemporalStructure {
        TemporalStructure::new(vec![("betw".into(), rel(3, "(x0<x1 & x1<x2) | (x2<x1 & x1<x0)"))]).unwrap()
    }

    pub fn ll() -> TemporalStructure {
        let src = "(x0=x1 & x1=x2) | (x0<x1 & x0<x2 & x1!=x2)";
        TemporalStructure::new(vec![("L".into(), rel(3, src))]).unwrap()
    }

    /// `(name, structure)` for every builtin.
    pub fn all() -> Vec<(&'static str, TemporalStructure)> {
        vec![("I_neq", i_neq()), ("X", x()), ("lt", lt()), ("betw", betw()), ("ll", ll())]
    }
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct Options {
    pub seed: u64,
}


#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "cyclic and block-symmetric probes over (Q;I,neq)"),
    (2, "cyclic(5) and symmetric(4) probes over (Q;X)"),
    (3, "template report for (Q;I,neq)"),
    (4, "positive control cyclic(2) over (Q;<)"),
    (5, "uniform solver on planted and refuted instances"),
    (6, "projection and contraction properties"),
    (7, "power and lowering functors"),
    (8, "decoding pattern tables"),
    (9, "exact linear algebra"),
    (10, "width-4 probe over (Q;I,neq)"),
];

fn title(id: u8) -> &'static str {
    CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1)
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run(id: u8, opts: &Options) -> Outcome {
    let seed = opts.seed;
    timed(id, title(id), || match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(seed),
        8 => criterion_8(seed),
        9 => criterion_9(seed),
        10 => criterion_10(seed),
        _ => Ok((false, format!("no criterion {id}"))),
    })
}

pub fn run_all(opts: &Options) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run(id, opts)).collect()
}

fn verdict_word(v: &ConditionVerdict) -> String {
    match v {
        ConditionVerdict::Sat(_) => "SAT".into(),
        ConditionVerdict::Unsat(s) => format!("UNSAT-certified by {s}"),
        ConditionVerdict::Unknown => "UNKNOWN".into(),
    }
}

/// Runs each probe and requires UNSAT within `limit` seconds.
fn unsat_probes(b: &TemporalStructure, a_size: usize, kinds: &[ConditionKind], limit: f64, cap: Option<u64>) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for &kind in kinds {
        let c = build_condition(kind)?;
        let t = Instant::now();
        let (v, ind) = match cap {
            Some(cap) => decide_temporal_capped(&c, a_size, b, cap)?,
            None => decide_temporal(&c, a_size, b)?,
        };
        let secs = t.elapsed().as_secs_f64();
        let good = matches!(v, ConditionVerdict::Unsat(_)) && secs < limit;
        ok &= good;
        parts.push(format!(
            "{kind} [{} vars] {} in {secs:.1} s",
            ind.instance.variables.len(),
            verdict_word(&v)
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_1() -> Result<(bool, String)> {
    let kinds = [ConditionKind::Cyclic(2), ConditionKind::Cyclic(3), ConditionKind::Cyclic(5), ConditionKind::BlockSymmetric(2)];
    unsat_probes(&templates::i_neq(), 2, &kinds, 60.0, None)
}

fn criterion_2() -> Result<(bool, String)> {
    unsat_probes(&templates::x(), 3, &[ConditionKind::Cyclic(5), ConditionKind::Symmetric(4)], 300.0, None)
}

/// Block-symmetric arity 7 over (Q;X); 150-variable indicator, hours of work.
pub fn criterion_2_slow() -> Outcome {
    timed(2, "block-symmetric arity 7 over (Q;X)", || {
        unsat_probes(&templates::x(), 3, &[ConditionKind::BlockSymmetric(3)], 7200.0, Some(10_000_000))
    })
}

fn criterion_3() -> Result<(bool, String)> {
    let r = report_template(2, &templates::i_neq(), &Probes::standard())?;
    let certs: Vec<String> = r.probes.iter().filter_map(|p| p.certificate()).collect();
    let has_cyclic = r.probes.iter().any(|p| matches!(p.kind, ConditionKind::Cyclic(_)) && p.certificate().is_some());
    let has_block = r.probes.iter().any(|p| matches!(p.kind, ConditionKind::BlockSymmetric(_)) && p.certificate().is_some());
    let ok = r.finitely_tractable == Answer::No && r.blp_aip_solvable == Answer::No && has_cyclic && has_block;
    Ok((
        ok,
        format!(
            "finitely_tractable={} blp_aip_solvable={} with {} certificates",
            r.finitely_tractable,
            r.blp_aip_solvable,
            certs.len()
        ),
    ))
}

fn criterion_4() -> Result<(bool, String)> {
    let b = templates::lt();
    let c = build_condition(ConditionKind::Cyclic(2))?;
    let (v, _) = decide_temporal(&c, 2, &b)?;
    let ConditionVerdict::Sat(t) = v else { return Ok((false, verdict_word(&v))) };
    let f = &t[0];
    let a = declared_template(&b, 2);
    let commutative = (0..2).all(|x| (0..2).all(|y| f.get(&[x, y]) == f.get(&[y, x])));
    let lt = a.relation("lt").unwrap_or(&[]);
    let preserves = lt.iter().all(|p| lt.iter().all(|q| f.get(&[p[0], q[0]]) < f.get(&[p[1], q[1]])));
    let ok = commutative && preserves && is_temporal_polymorphism(f, &a, &b);
    Ok((ok, format!("SAT with table {:?}", f.entries)))
}

fn seeded(seed: u64, stream: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (stream << 32) ^ i as u64)
}

struct SolverStats {
    good: usize,
    max_secs: f64,
    bad: Vec<String>,
}

fn run_instances(b: &TemporalStructure, xs: &[TemporalInstance], want_sat: bool) -> SolverStats {
    let results = par::map(xs, |x| {
        let t = Instant::now();
        let v = tempsolve::solve(x, b);
        (v, t.elapsed().as_secs_f64())
    });
    let mut s = SolverStats { good: 0, max_secs: 0.0, bad: Vec::new() };
    for (i, (v, secs)) in results.into_iter().enumerate() {
        s.max_secs = s.max_secs.max(secs);
        let ok = match &v {
            Ok(Verdict::Sat(a)) => want_sat && verify_assignment(&xs[i], a),
            Ok(Verdict::Unsat(_)) => !want_sat,
            _ => false,
        };
        if ok && secs <= 30.0 {
            s.good += 1;
        } else if s.bad.len() < 3 {
            s.bad.push(format!("#{i}: {v:?} in {secs:.1} s"));
        }
    }
    s
}

fn criterion_5(seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, (name, b)) in [("<", templates::lt()), ("I,neq", templates::i_neq()), ("X", templates::x())].into_iter().enumerate() {
        let rels = b.declared().to_vec();
        let sat: Vec<TemporalInstance> = par::map_range(200, |i| {
            let mut rng = seeded(seed, 50 + t as u64, i);
            let n = rng.gen_range(10..=30);
            let m = rng.gen_range(n..=100);
            gen::planted_with(&rels, n, m, &mut rng).0
        });
        let unsat: Vec<Option<TemporalInstance>> = par::map_range(50, |i| {
            let mut rng = seeded(seed, 60 + t as u64, i);
            let core = gen::unsat_core_with(&rels, rng.gen_range(4..=6), 40, 200, &mut rng)?;
            debug_assert!(gen::brute_force(&core).is_none());
            let extra = rng.gen_range(0..=30 - core.len());
            let noise = rng.gen_range(0..=100 - core.constraints.len());
            Some(gen::embed_with(&core, &rels, extra, noise, &mut rng))
        });
        let missing = unsat.iter().filter(|x| x.is_none()).count();
        let unsat: Vec<TemporalInstance> = unsat.into_iter().flatten().collect();
        let big = sat.iter().chain(&unsat).any(|x| x.len() > 30 || x.constraints.len() > 100);
        let s = run_instances(&b, &sat, true);
        let u = run_instances(&b, &unsat, false);
        let good = s.good == 200 && u.good == 50 && missing == 0 && !big;
        ok &= good;
        let mut part = format!(
            "{name}: {}/200 sat, {}/50 unsat, max {:.2} s",
            s.good,
            u.good,
            s.max_secs.max(u.max_secs)
        );
        if missing > 0 {
            part.push_str(&format!(", {missing} cores not found"));
        }
        for b in s.bad.iter().chain(&u.bad) {
            part.push_str(&format!(" [{b}]"));
        }
        parts.push(part);
    }
    Ok((ok, parts.join("; ")))
}

fn with_extra(b: &TemporalStructure, extra: &[(&str, usize, &str)]) -> Vec<(String, TemporalRelation)> {
    let mut rels = b.declared().to_vec();
    for &(name, arity, src) in extra {
        rels.push((name.into(), TemporalRelation::compile_str(arity, src).expect("formula")));
    }
    rels
}

#[derive(Default)]
struct ProjectionChecks {
    checked: [usize; 4],
    nontrivial_contractions: usize,
    violations: Vec<String>,
}

fn projection_checks(x: &TemporalInstance, rng: &mut ChaCha8Rng, k: usize) -> Result<ProjectionChecks> {
    let n = x.len();
    let mut out = ProjectionChecks::default();
    let mut f: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if f.len() == n {
        f.remove(&rng.gen_range(0..n));
    }
    let (p, _) = project_instance(x, &f);
    let c = x.to_csp(n);
    if let Some(h) = k_strategy_csp(&c, k)? {
        out.checked[0] += 1;
        let g = strategy_restrict(&h, &f);
        for v in g.violations(&p.to_csp(n)) {
            out.violations.push(format!("restricted strategy on projection: {v}"));
        }
        let seed = rng.gen_range(0..n);
        let mut cls = vec![seed];
        let mut order: Vec<usize> = (0..n).filter(|&y| y != seed).collect();
        order.shuffle(rng);
        for y in order {
            let diag = |u: usize, v: usize| h.pairs(u, v).iter().all(|(a, b)| a == b);
            if cls.iter().all(|&u| diag(u, y)) {
                cls.push(y);
            }
        }
        let fd: BTreeSet<usize> = cls.into_iter().collect();
        out.checked[1] += 1;
        if fd.len() > 1 {
            out.nontrivial_contractions += 1;
        }
        for v in h.violations(&contract_instance(x, &fd).to_csp(n)) {
            out.violations.push(format!("diagonal strategy on contraction: {v}"));
        }
    }
    if sac_csp(&c).is_some() {
        out.checked[2] += 1;
        if sac_csp(&p.to_csp(n)).is_none() {
            out.violations.push("SAC lost under projection".into());
        }
    }
    let (inst, rels) = x.to_instance();
    if relax::saip(&inst, &symbol_template(&rels, n))?.is_some() {
        out.checked[3] += 1;
        let (pinst, prels) = p.to_instance();
        if relax::saip(&pinst, &symbol_template(&prels, n))?.is_none() {
            out.violations.push("sAIP lost under projection".into());
        }
    }
    Ok(out)
}

fn criterion_6(seed: u64) -> Result<(bool, String)> {
    let families = [
        with_extra(&templates::i_neq(), &[("eq", 2, "x0=x1")]),
        with_extra(&templates::x(), &[("eq", 2, "x0=x1")]),
        with_extra(&templates::ll(), &[("eq", 2, "x0=x1")]),
        with_extra(&templates::betw(), &[("le", 2, "x0<=x1")]),
    ];
    let results = par::map_range(100, |i| {
        let mut rng = seeded(seed, 6, i);
        let rels = &families[i % families.len()];
        let n = rng.gen_range(4..=7);
        let m = rng.gen_range(3..=10);
        let x = if rng.gen_bool(0.8) {
            gen::planted_with(rels, n, m, &mut rng).0
        } else {
            let mut x = TemporalInstance::with_size(n);
            for _ in 0..m {
                let (_, r) = rels.choose(&mut rng).expect("relations");
                x.push(r.clone(), (0..r.arity()).map(|_| rng.gen_range(0..n)).collect());
            }
            x
        };
        projection_checks(&x, &mut rng, 3)
    });
    let mut total = ProjectionChecks::default();
    for r in results {
        let r = r?;
        for i in 0..4 {
            total.checked[i] += r.checked[i];
        }
        total.nontrivial_contractions += r.nontrivial_contractions;
        total.violations.extend(r.violations);
    }
    let ok = total.violations.is_empty() && total.checked.iter().all(|&c| c >= 50) && total.nontrivial_contractions > 0;
    let mut detail = format!(
        "checked (1) {} (2) {} [{} with |F|>1] (3) {} (4) {}; {} violations",
        total.checked[0],
        total.checked[1],
        total.nontrivial_contractions,
        total.checked[2],
        total.checked[3],
        total.violations.len()
    );
    if let Some(v) = total.violations.first() {
        detail.push_str(&format!(" [first: {v}]"));
    }
    Ok((ok, detail))
}

/// Λm Γm X ≅ X through the map sending the class of `(t, p)` to `t_p`.
fn lower_power_is_identity(x: &Structure, m: usize) -> Result<bool> {
    let low = mlow(&mpow(x, m)?, &x.signature, m)?;
    let mut map = vec![usize::MAX; low.structure.size];
    for (y, &c) in low.class_of.iter().enumerate() {
        let v = decode(y / m, x.size, m)[y % m];
        if map[c] != usize::MAX && map[c] != v {
            return Ok(false);
        }
        map[c] = v;
    }
    Ok(is_isomorphism(&low.structure, x, &map))
}

fn all_digraphs(n: usize) -> Vec<Structure> {
    let sig = Signature::new(vec![("E".into(), 2)]);
    (0..1usize << (n * n))
        .map(|mask| {
            let edges = (0..n * n).filter(|b| mask >> b & 1 == 1).map(|c| vec![c / n, c % n]).collect();
            Structure::new(sig.clone(), n, vec![edges])
        })
        .collect()
}

fn criterion_7(seed: u64) -> Result<(bool, String)> {
    let sig = Signature::new(vec![("E".into(), 2), ("U".into(), 1)]);
    let iso = par::map_range(100, |i| {
        let mut rng = seeded(seed, 7, i);
        let n = rng.gen_range(1..=6);
        let x = gen::random_structure(&sig, n, rng.gen_range(0.1..0.6), &mut rng);
        lower_power_is_identity(&x, 3)
    });
    let iso_ok = iso.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();

    let sizes = [1usize, 2, 2, 3, 3];
    let prods = par::map_range(sizes.len(), |i| -> Result<bool> {
        let mut rng = seeded(seed, 17, i);
        let a = gen::random_structure(&sig, sizes[i], 0.4, &mut rng);
        let left = mpow(&product(&a, &a)?, 3)?;
        let pa = mpow(&a, 3)?;
        let right = product(&pa, &pa)?;
        Ok(is_isomorphism(&left, &right, &product_power_map(a.size, 3)))
    });
    let prod_ok = prods.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();

    // every digraph on at most 2 elements and 30 on 3, each against 3 random X
    let base = Signature::new(vec![("E".into(), 2)]);
    let psig = PowSignature::new(&base, 3)?.signature();
    let mut bs: Vec<Structure> = (1..=2).flat_map(all_digraphs).collect();
    let threes = all_digraphs(3);
    let mut rng = seeded(seed, 27, 0);
    bs.extend(threes.choose_multiple(&mut rng, 30).cloned());
    let adj = par::map_range(bs.len() * 3, |i| -> Result<bool> {
        let mut rng = seeded(seed, 37, i);
        let b = &bs[i / 3];
        let x = gen::sparse_structure(&psig, rng.gen_range(1..=3), rng.gen_range(0..=6), &mut rng);
        let adj = Adjunction::new(&x, b, 3)?;
        let up = all_homs(adj.x_instance(), &adj.power)?;
        let down = all_homs(adj.lowered_instance(), b)?;
        let mut images = HashSet::new();
        for h in &up {
            let g = adj.eta(h)?;
            if &adj.mu(&g)? != h {
                return Ok(false);
            }
            images.insert(g);
        }
        Ok(up.len() == down.len() && images.len() == down.len())
    });
    let adj_total = adj.len();
    let adj_ok = adj.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();

    let q = mpow_quotient_temporal(&templates::lt(), 3)?;
    let ok = iso_ok == 100 && prod_ok == sizes.len() && adj_ok == adj_total && q.structure.size == 13;
    Ok((
        ok,
        format!(
            "lower∘power {iso_ok}/100, products {prod_ok}/{}, adjunction {adj_ok}/{adj_total}, quotient of (Q;<) has {} elements",
            sizes.len(),
            q.structure.size
        ),
    ))
}

fn criterion_8(seed: u64) -> Result<(bool, String)> {
    let mut rng = seeded(seed, 8, 0);
    let mut round_trips = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
        let h = pi_map(&f, 3);
        if let Ok(g) = decode_hom(&h) {
            if pi_map(&g, 3) == h {
                round_trips += 1;
            }
        }
    }
    let n = rng.gen_range(3..=6);
    let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
    let mut bad: FunctionTable<_> = pi_map(&f, 3);
    let cell = rng.gen_range(0..bad.entries.len());
    let others: Vec<_> = weak_orders(3).into_iter().filter(|p| *p != bad.entries[cell]).collect();
    bad.entries[cell] = others.choose(&mut rng).expect("13 patterns").clone();
    let rejected = decode_hom(&bad).is_err();
    Ok((
        round_trips == 100 && rejected,
        format!("{round_trips}/100 round trips, corrupted cell {cell} {}", if rejected { "rejected" } else { "accepted" }),
    ))
}

fn planted_system(rng: &mut ChaCha8Rng) -> AffineSystem {
    let n = rng.gen_range(1..=14);
    let m = rng.gen_range(0..=14);
    let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
    let mut s = AffineSystem::new(n);
    for _ in 0..m {
        let coeffs: Vec<(usize, i64)> = (0..n).filter_map(|v| rng.gen_bool(0.5).then(|| (v, rng.gen_range(-5..=5)))).collect();
        let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
        s.push(coeffs, rhs);
    }
    s
}

/// `2·(even combination) = odd` hidden by unimodular row and column moves;
/// rationally feasible by construction.
fn parity_system(rng: &mut ChaCha8Rng) -> AffineSystem {
    let n = rng.gen_range(2..=8);
    let m = rng.gen_range(1..=6);
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    let y: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
    // y0 is left at a half-integer: every coefficient on it is even
    let mut first: Vec<i64> = (0..n).map(|_| 2 * rng.gen_range(-2..=2)).collect();
    first[0] = 2;
    let rhs0 = 2 * rng.gen_range(-3..=3) + 1;
    rows.push((first, rhs0));
    let y0_twice = rhs0 - rows[0].0[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<i64>();
    for _ in 0..m {
        let mut r: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        r[0] = 2 * rng.gen_range(-2..=2);
        let rhs = r[0] / 2 * y0_twice + r[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<i64>();
        rows.push((r, rhs));
    }
    for _ in 0..rng.gen_range(0..=6) {
        let (i, j) = (rng.gen_range(0..rows.len()), rng.gen_range(0..rows.len()));
        if i != j {
            let k = rng.gen_range(-2..=2);
            let src = rows[j].clone();
            for (a, b) in rows[i].0.iter_mut().zip(&src.0) {
                *a += k * b;
            }
            rows[i].1 += k * src.1;
        }
    }
    // column move x_i += k x_j on the variables: coefficient of j picks up k·(coefficient of i)
    for _ in 0..rng.gen_range(0..=6) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let k = rng.gen_range(-2..=2);
            for (r, _) in rows.iter_mut() {
                r[j] += k * r[i];
            }
        }
    }
    rows.shuffle(rng);
    let mut s = AffineSystem::new(n);
    for (r, rhs) in rows {
        s.push(r.into_iter().enumerate().filter(|(_, a)| *a != 0).collect(), rhs);
    }
    s
}

fn sampled_vertex_support(s: &AffineSystem, rng: &mut ChaCha8Rng, samples: usize) -> BTreeSet<usize> {
    let all: BTreeSet<usize> = (0..s.num_vars).collect();
    let mut out = BTreeSet::new();
    for _ in 0..samples {
        let mut perm: Vec<usize> = (0..s.num_vars).collect();
        perm.shuffle(rng);
        let mut t = AffineSystem::new(s.num_vars);
        for r in &s.rows {
            t.push(r.coeffs.iter().map(|&(c, a)| (perm[c], a)).collect(), r.rhs);
        }
        if let Some(y) = exactlin::rational_feasible(&t, &all) {
            out.extend((0..s.num_vars).filter(|&v| y[perm[v]].is_positive()));
        }
    }
    out
}

fn criterion_9(seed: u64) -> Result<(bool, String)> {
    let planted = par::map_range(200, |i| {
        let s = planted_system(&mut seeded(seed, 9, i));
        exactlin::integer_feasible(&s).is_some_and(|x| s.satisfied_by_int(&x))
    });
    let planted_ok = planted.iter().filter(|&&b| b).count();
    let parity = par::map_range(50, |i| {
        let s = parity_system(&mut seeded(seed, 19, i));
        exactlin::integer_feasible(&s).is_none()
            && exactlin::integer_feasible_plain(&s).is_none()
            && exactlin::rational_feasible(&s, &BTreeSet::new()).is_some()
    });
    let parity_ok = parity.iter().filter(|&&b| b).count();
    let supports = par::map_range(50, |i| -> Result<bool> {
        let mut rng = seeded(seed, 29, i);
        let n = rng.gen_range(2..=8);
        let x: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=3) }).collect();
        let mut s = AffineSystem::new(n);
        for _ in 0..rng.gen_range(1..=4) {
            let coeffs: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-2..=2))).collect();
            let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            s.push(coeffs, rhs);
        }
        let all: BTreeSet<usize> = (0..n).collect();
        let sup = exactlin::interior_support(&s, &all)?;
        let planted_support = (0..n).filter(|&v| x[v] > 0);
        Ok(sampled_vertex_support(&s, &mut rng, 12).is_subset(&sup) && planted_support.into_iter().all(|v| sup.contains(&v)))
    });
    let support_ok = supports.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    Ok((
        planted_ok == 200 && parity_ok == 50 && support_ok == 50,
        format!("planted {planted_ok}/200, parity-obstructed {parity_ok}/50, supports {support_ok}/50"),
    ))
}

fn criterion_10(seed: u64) -> Result<(bool, String)> {
    let b = templates::i_neq();
    let a = declared_template(&b, 2);
    let gamma_a = mpow(&a, 3)?;
    let q = mpow_quotient_temporal(&b, 3)?;
    let psig = gamma_a.signature.clone();
    let wanted = 100;
    let mut passed = 0usize;
    let mut tried = 0usize;
    let mut counterexamples = 0usize;
    let mut batch = 0u64;
    while passed < wanted && tried < 20_000 {
        let results = par::map_range(64, |i| -> Result<Option<bool>> {
            let mut rng = seeded(seed, 100 + batch, i);
            let n = rng.gen_range(2..=8);
            let facts = rng.gen_range(n..=3 * n);
            let x = Instance::from_structure(&gen::sparse_structure(&psig, n, facts, &mut rng));
            if k_strategy(&x, &gamma_a, 4)?.is_none() {
                return Ok(None);
            }
            Ok(Some(hom_search(&x, &q.structure)?.is_some()))
        });
        batch += 1;
        for r in results {
            tried += 1;
            if passed == wanted {
                break;
            }
            if let Some(found) = r? {
                passed += 1;
                if !found {
                    counterexamples += 1;
                }
            }
        }
    }
    Ok((
        passed == wanted && counterexamples == 0,
        format!("{passed} 4-consistent instances out of {tried} tried, {counterexamples} without a homomorphism to the 13-element quotient"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::tests::{b_betw, b_ineq, b_ll, b_x};

    #[test]
    fn builtin_templates_match() {
        assert_eq!(templates::i_neq(), b_ineq());
        assert_eq!(templates::x(), b_x());
        assert_eq!(templates::betw(), b_betw());
        assert_eq!(templates::ll(), b_ll());
    }

    #[test]
    fn parity_systems_are_obstructed() {
        for i in 0..30 {
            let s = parity_system(&mut seeded(1, 0, i));
            assert!(exactlin::integer_feasible(&s).is_none(), "{s:?}");
            assert!(exactlin::rational_feasible(&s, &BTreeSet::new()).is_some());
        }
    }

    #[test]
    fn outcome_line() {
        let o = Outcome { id: 3, title: "t", passed: true, detail: "d".into(), seconds: 1.25 };
        assert_eq!(o.to_string(), "PASS [ 3] t: d (1.2 s)");
    }
}
