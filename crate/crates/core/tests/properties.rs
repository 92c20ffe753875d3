//! Property tests for the module invariants.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tempo_pcsp::consistency::{k_strategy, sac};
use tempo_pcsp::exactlin::{gf2_solve, integer_feasible, interior_support, AffineSystem, Gf2Equation};
use tempo_pcsp::formats;
use tempo_pcsp::gen;
use tempo_pcsp::minorcond::{build_condition, decide_finite, ConditionKind};
use tempo_pcsp::powfun::{decode_hom, is_polymorphism, mlow, mpow, pi_map, product_power_map};
use tempo_pcsp::relax::{aip, blp, blp_aip, saip};
use tempo_pcsp::relcore::{
    all_homs, hom_search, isomorphic, is_isomorphism, product, quotient, Constraint, Instance, Signature, Structure,
};
use tempo_pcsp::repro::templates;
use tempo_pcsp::tempsolve::{project_instance, solve, symbol_template, verify_assignment, Verdict};
use tempo_pcsp::temporal::{classify, weak_orders, TemporalRelation, TemporalStructure};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sig_eu() -> Signature {
    Signature::new(vec![("E".into(), 2), ("U".into(), 1)])
}

fn random_structure(r: &mut ChaCha8Rng, n: usize) -> Structure {
    let p = r.gen_range(0.1..0.7);
    gen::random_structure(&sig_eu(), n, p, r)
}

fn random_instance(r: &mut ChaCha8Rng, sig: &Signature, n: usize, m: usize) -> Instance {
    let vars: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let cons = (0..m)
        .map(|_| {
            let (name, arity) = sig.entries.choose(r).unwrap().clone();
            Constraint { rel: name, args: (0..arity).map(|_| r.gen_range(0..n)).collect() }
        })
        .collect();
    Instance::new(vars, cons).unwrap()
}

/// Instance with a hidden homomorphism into a structure built around it.
fn planted_pair(r: &mut ChaCha8Rng, n: usize, m: usize, size: usize) -> (Instance, Structure, Vec<usize>) {
    let x = random_instance(r, &sig_eu(), n, m);
    let h: Vec<usize> = (0..n).map(|_| r.gen_range(0..size)).collect();
    let mut a = random_structure(r, size);
    for c in &x.constraints {
        let i = a.signature.position(&c.rel).unwrap();
        a.relations[i].push(c.args.iter().map(|&v| h[v]).collect());
    }
    let a = Structure::new(a.signature.clone(), size, a.relations.clone());
    (x, a, h)
}

/// Verifier written against the raw relation lists.
fn satisfies(x: &Instance, a: &Structure, h: &[usize]) -> bool {
    x.constraints.iter().all(|c| {
        let t: Vec<usize> = c.args.iter().map(|&v| h[v]).collect();
        a.relation(&c.rel).is_some_and(|ts| ts.contains(&t))
    })
}

#[derive(Clone, Debug)]
enum F {
    Atom(u8, usize, usize),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
}

const OPS: [&str; 6] = ["<", "<=", "=", "!=", ">", ">="];

impl F {
    fn render(&self) -> String {
        match self {
            F::Atom(o, i, j) => format!("x{i}{}x{j}", OPS[*o as usize]),
            F::Not(f) => format!("!({})", f.render()),
            F::And(a, b) => format!("({}) & ({})", a.render(), b.render()),
            F::Or(a, b) => format!("({}) | ({})", a.render(), b.render()),
        }
    }

    fn eval(&self, t: &[Ratio<i64>]) -> bool {
        match self {
            F::Atom(o, i, j) => {
                let (a, b) = (t[*i], t[*j]);
                [a < b, a <= b, a == b, a != b, a > b, a >= b][*o as usize]
            }
            F::Not(f) => !f.eval(t),
            F::And(a, b) => a.eval(t) && b.eval(t),
            F::Or(a, b) => a.eval(t) || b.eval(t),
        }
    }
}

fn formula(arity: usize) -> impl Strategy<Value = F> {
    let leaf = (0u8..6, 0..arity, 0..arity).prop_map(|(o, i, j)| F::Atom(o, i, j));
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| F::Not(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| F::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| F::Or(Box::new(a), Box::new(b))),
        ]
    })
}

/// Temporal structure with one or two random pattern-set relations of arity ≤ 3.
fn random_temporal(r: &mut ChaCha8Rng) -> TemporalStructure {
    let rels = (0..r.gen_range(1..=2))
        .map(|i| {
            let arity = r.gen_range(2..=3);
            let mut ps: Vec<_> = weak_orders(arity).into_iter().filter(|_| r.gen_bool(0.4)).collect();
            if ps.is_empty() {
                ps.push(weak_orders(arity)[0].clone());
            }
            (format!("R{i}"), TemporalRelation::new(arity, ps).unwrap())
        })
        .collect();
    TemporalStructure::new(rels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn hom_search_answers_verify(seed in any::<u64>(), n in 1usize..6, m in 0usize..8, size in 1usize..4) {
        let mut r = rng(seed);
        let x = random_instance(&mut r, &sig_eu(), n, m);
        let a = random_structure(&mut r, size);
        if let Some(h) = hom_search(&x, &a).unwrap() {
            prop_assert!(satisfies(&x, &a, &h));
        } else {
            prop_assert!(all_homs(&x, &a).unwrap().is_empty());
        }
    }

    #[test]
    fn homs_compose_along_structure_maps(seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let mut r = rng(seed);
        let (x, a, _) = planted_pair(&mut r, n, m, 3);
        let g: Vec<usize> = (0..a.size).map(|_| r.gen_range(0..2)).collect();
        let mut rels = a.relations.clone();
        for ts in rels.iter_mut() {
            for t in ts.iter_mut() {
                for v in t.iter_mut() {
                    *v = g[*v];
                }
            }
        }
        let image = Structure::new(a.signature.clone(), 2, rels);
        let h = hom_search(&x, &a).unwrap().expect("planted");
        let composed: Vec<usize> = h.iter().map(|&v| g[v]).collect();
        prop_assert!(satisfies(&x, &image, &composed));
        prop_assert!(hom_search(&x, &image).unwrap().is_some());
    }

    #[test]
    fn products_commute_and_associate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes: Vec<usize> = (0..3).map(|_| r.gen_range(1..=2)).collect();
        let [a, b, c] = [0, 1, 2].map(|i| random_structure(&mut r, sizes[i]));
        prop_assert!(isomorphic(&product(&a, &b).unwrap(), &product(&b, &a).unwrap()).unwrap());
        let left = product(&product(&a, &b).unwrap(), &c).unwrap();
        let right = product(&a, &product(&b, &c).unwrap()).unwrap();
        prop_assert!(isomorphic(&left, &right).unwrap());
    }

    #[test]
    fn identity_quotient_is_isomorphic(seed in any::<u64>(), n in 1usize..7) {
        let a = random_structure(&mut rng(seed), n);
        let classes: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let q = quotient(&a, &classes).unwrap();
        prop_assert!(is_isomorphism(&q, &a, &(0..n).collect::<Vec<_>>()));
    }

    #[test]
    fn compiled_relations_agree_with_formulas(f in formula(3), seed in any::<u64>()) {
        let rel = TemporalRelation::compile_str(3, &f.render()).unwrap();
        let mut r = rng(seed);
        for _ in 0..200 {
            let t: Vec<Ratio<i64>> = (0..3).map(|_| Ratio::new(r.gen_range(-3..=3), r.gen_range(1..=3))).collect();
            prop_assert_eq!(rel.eval(&t).unwrap(), f.eval(&t), "{}", f.render());
        }
    }

    #[test]
    fn ll_implies_or_quotient_and_reversal_is_involutive(seed in any::<u64>()) {
        let b = random_temporal(&mut rng(seed));
        let c = classify(&b).unwrap();
        if c.has_ll {
            prop_assert!(c.quotient_or);
        }
        let bb = b.reversed().reversed();
        prop_assert_eq!(&bb, &b);
        prop_assert_eq!(classify(&bb).unwrap(), c);
    }

    #[test]
    fn contraction_is_idempotent_and_commutes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let arity = 4;
        let ps: Vec<_> = weak_orders(arity).into_iter().filter(|_| r.gen_bool(0.3)).collect();
        let rel = TemporalRelation::new(arity, ps).unwrap();
        let mut pos: Vec<usize> = (0..arity).collect();
        pos.shuffle(&mut r);
        let (f, g) = (&pos[..2], &pos[2..]);
        let once = rel.contract(f).unwrap();
        prop_assert_eq!(&once.contract(f).unwrap(), &once);
        prop_assert_eq!(once.contract(g).unwrap(), rel.contract(g).unwrap().contract(f).unwrap());
    }

    #[test]
    fn planted_integer_systems_have_verified_witnesses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let x: Vec<i64> = (0..n).map(|_| r.gen_range(-5..=5)).collect();
        let mut s = AffineSystem::new(n);
        for _ in 0..r.gen_range(0..=10) {
            let vars: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.6)).collect();
            let coeffs: Vec<(usize, i64)> = vars.into_iter().map(|v| (v, r.gen_range(-4..=4))).collect();
            let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            s.push(coeffs, rhs);
        }
        let w = integer_feasible(&s).expect("planted");
        prop_assert!(s.satisfied_by_int(&w));
    }

    #[test]
    fn gf2_agrees_with_integer_encoding(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let eqs: Vec<Gf2Equation> = (0..r.gen_range(1..=8))
            .map(|_| Gf2Equation { vars: (0..n).filter(|_| r.gen_bool(0.5)).collect(), rhs: r.gen_bool(0.5) })
            .collect();
        // sum of vars - 2 y_e = rhs, one slack y_e per equation
        let mut s = AffineSystem::new(n + eqs.len());
        for (e, q) in eqs.iter().enumerate() {
            let mut coeffs: Vec<(usize, i64)> = q.vars.iter().map(|&v| (v, 1)).collect();
            coeffs.push((n + e, -2));
            s.push(coeffs, i64::from(q.rhs));
        }
        prop_assert_eq!(gf2_solve(n, &eqs, &[]).is_some(), integer_feasible(&s).is_some());
    }

    #[test]
    fn interior_support_contains_feasible_supports(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=7);
        let x: Vec<i64> = (0..n).map(|_| if r.gen_bool(0.4) { 0 } else { r.gen_range(1..=3) }).collect();
        let mut s = AffineSystem::new(n);
        for _ in 0..r.gen_range(1..=4) {
            let coeffs: Vec<(usize, i64)> = (0..n).map(|v| (v, r.gen_range(-2..=2))).collect();
            let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            s.push(coeffs, rhs);
        }
        let all: BTreeSet<usize> = (0..n).collect();
        let sup = interior_support(&s, &all).unwrap();
        prop_assert!((0..n).filter(|&v| x[v] > 0).all(|v| sup.contains(&v)));
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        prop_assert!(s.satisfied_by_int(&big));
    }

    #[test]
    fn strategies_contain_planted_restrictions_and_imply_sac(seed in any::<u64>(), n in 2usize..6, m in 1usize..7) {
        let mut r = rng(seed);
        let (x, a, h) = planted_pair(&mut r, n, m, 3);
        let st = k_strategy(&x, &a, 3).unwrap().expect("planted instance is consistent");
        for sub in st.subsets() {
            let t: Vec<usize> = sub.iter().map(|&v| h[v]).collect();
            prop_assert!(st.contains(sub, &t));
        }
        let y = random_instance(&mut r, &sig_eu(), n, m + 2);
        let b = random_structure(&mut r, 2);
        if let Some(st) = k_strategy(&y, &b, 3).unwrap() {
            let d = sac(&y, &b).unwrap().expect("k-consistent instances are singleton arc consistent");
            for v in 0..n {
                prop_assert!(st.domain(v).iter().all(|&val| d.contains(v, val)));
            }
        }
    }

    #[test]
    fn homomorphisms_pass_every_relaxation(seed in any::<u64>(), n in 1usize..6, m in 0usize..7) {
        let (x, a, _) = planted_pair(&mut rng(seed), n, m, 3);
        prop_assert!(aip(&x, &a).unwrap());
        prop_assert!(blp(&x, &a).unwrap());
        prop_assert!(blp_aip(&x, &a).unwrap());
        prop_assert!(saip(&x, &a).unwrap().is_some());
    }

    #[test]
    fn saip_survives_projection(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = templates::x();
        let n = r.gen_range(3..=6);
        let (x, _) = gen::planted_with(b.declared(), n, r.gen_range(1..=8), &mut r);
        let (inst, rels) = x.to_instance();
        if saip(&inst, &symbol_template(&rels, n)).unwrap().is_some() {
            let f: BTreeSet<usize> = (0..n).filter(|_| r.gen_bool(0.4)).collect();
            let (p, _) = project_instance(&x, &f);
            let (pi, prels) = p.to_instance();
            prop_assert!(saip(&pi, &symbol_template(&prels, n)).unwrap().is_some());
        }
    }

    #[test]
    fn solver_never_refutes_planted_instances(seed in any::<u64>(), which in 0usize..5) {
        let (name, b) = templates::all().swap_remove(which);
        let mut r = rng(seed);
        let n = r.gen_range(1..=12);
        let (x, _) = gen::planted(&b, n, r.gen_range(0..=25), &mut r);
        match solve(&x, &b).unwrap() {
            Verdict::Sat(s) => prop_assert!(verify_assignment(&x, &s)),
            Verdict::Unknown => prop_assert_eq!(name, "betw"),
            Verdict::Unsat(by) => prop_assert!(false, "{} refuted by {}", name, by),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn lowering_inverts_power(seed in any::<u64>(), n in 1usize..7) {
        let a = random_structure(&mut rng(seed), n);
        let low = mlow(&mpow(&a, 3).unwrap(), &a.signature, 3).unwrap();
        prop_assert!(isomorphic(&low.structure, &a).unwrap());
    }

    #[test]
    fn power_preserves_products(seed in any::<u64>(), n in 1usize..3) {
        let a = random_structure(&mut rng(seed), n);
        let left = mpow(&product(&a, &a).unwrap(), 3).unwrap();
        let pa = mpow(&a, 3).unwrap();
        prop_assert!(is_isomorphism(&left, &product(&pa, &pa).unwrap(), &product_power_map(n, 3)));
    }

    #[test]
    fn power_is_fully_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = Signature::new(vec![("E".into(), 2)]);
        let x = gen::random_structure(&sig, r.gen_range(1..=2), 0.4, &mut r);
        let y = gen::random_structure(&sig, r.gen_range(1..=2), 0.5, &mut r);
        let direct = all_homs(&Instance::from_structure(&x), &y).unwrap().len();
        let powered = all_homs(&Instance::from_structure(&mpow(&x, 3).unwrap()), &mpow(&y, 3).unwrap()).unwrap().len();
        prop_assert_eq!(direct, powered);
    }

    #[test]
    fn decoding_inverts_pattern_maps(f in prop::collection::vec(-5i64..=5, 1..=6)) {
        let h = pi_map(&f, 3);
        let g = decode_hom(&h).unwrap();
        prop_assert_eq!(pi_map(&g, 3), h);
        let order = |v: &[i64]| -> Vec<Vec<std::cmp::Ordering>> { v.iter().map(|a| v.iter().map(|b| a.cmp(b)).collect()).collect() };
        prop_assert_eq!(order(&g), order(&f));
    }

    #[test]
    fn finite_condition_tables_verify(seed in any::<u64>(), kind in 0usize..4) {
        let mut r = rng(seed);
        let sig = Signature::new(vec![("E".into(), 2)]);
        let a = gen::random_structure(&sig, 2, 0.5, &mut r);
        let b = gen::random_structure(&sig, 3, 0.5, &mut r);
        let kind = [ConditionKind::Cyclic(2), ConditionKind::Cyclic(3), ConditionKind::Wnu(3), ConditionKind::Siggers4][kind];
        let c = build_condition(kind).unwrap();
        if let Some(tables) = decide_finite(&c, &a, &b).unwrap() {
            prop_assert!(c.holds(&tables));
            prop_assert!(tables.iter().all(|t| is_polymorphism(t, &a, &b)));
        }
    }

    #[test]
    fn emitted_files_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let s = random_structure(&mut r, n);
        let text = formats::structure_to_json(&s);
        prop_assert_eq!(formats::structure_to_json(&formats::parse_structure(&text).unwrap()), text);
        let b = random_temporal(&mut r);
        let text = formats::temporal_to_json(&b);
        prop_assert_eq!(&formats::parse_temporal(&text).unwrap(), &b);
        let (n, m) = (r.gen_range(1..=5), r.gen_range(0..=6));
        let x = random_instance(&mut r, &sig_eu(), n, m);
        let text = formats::instance_to_json(&x);
        prop_assert_eq!(&formats::parse_instance(&text).unwrap(), &x);
    }
}
