use super::*;
use crate::gen;
use crate::relcore::{all_homs, find_isomorphism, is_isomorphism, product};
use crate::temporal::tests::{b_ineq, b_x};
use crate::temporal::TemporalRelation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn b_lt_declared() -> TemporalStructure {
    TemporalStructure::new(vec![("lt".into(), TemporalRelation::lt())]).unwrap()
}

fn lt01() -> Structure {
    declared_template(&b_lt_declared(), 2)
}

fn pat(r: &[u8]) -> OrderPattern {
    OrderPattern::new(r.to_vec()).unwrap()
}

fn binary_sig() -> Signature {
    Signature::new(vec![("E".into(), 2), ("U".into(), 1)])
}

#[test]
fn power_signature_shape() {
    let sig = PowSignature::new(&binary_sig(), 3).unwrap();
    let eqs = sig.symbols.iter().filter(|s| matches!(s, PowSymbol::Eq { .. })).count();
    assert_eq!(eqs, 9 + 81 + 729);
    assert_eq!(sig.symbols.len() - eqs, 9 + 3);
    for s in &sig.symbols {
        assert_eq!(&sig.parse(&sig.name(s)).unwrap(), s);
    }
    assert_eq!(sig.name(&PowSymbol::Rel { rel: 0, index: vec![0, 2] }), "E@13");
    assert_eq!(sig.name(&PowSymbol::Eq { left: vec![1], right: vec![2] }), "eq@2/3");
    assert!(sig.parse("E@14").is_err());
    assert!(sig.parse("E@1").is_err());
    assert!(sig.parse("F@12").is_err());
    assert!(PowSignature::new(&binary_sig(), 1).is_err());
    assert_eq!(PowSignature::infer_base(&sig.signature(), 3).unwrap(), binary_sig());
    let odd = Signature::new(vec![("E@12".into(), 1), ("E@1".into(), 1)]);
    assert!(PowSignature::infer_base(&odd, 3).is_err());
}

#[test]
fn mpow_examples() {
    let a = lt01();
    let p = mpow(&a, 3).unwrap();
    assert_eq!(p.size, 8);
    let diag = p.relation("eq@123/123").unwrap();
    assert_eq!(diag, (0..8).map(|c| vec![c, c]).collect::<Vec<_>>());
    // lt@12 = {(0,1,a)}
    let r: Vec<Vec<usize>> = p.relation("lt@12").unwrap().iter().map(|t| decode(t[0], 2, 3)).collect();
    assert_eq!(r, vec![vec![0, 1, 0], vec![0, 1, 1]]);
    assert!(mpow(&declared_template(&b_ineq(), 2), 2).is_err());
}

#[test]
fn quotient_examples() {
    let q = mpow_quotient_temporal(&b_lt_declared(), 3).unwrap();
    assert_eq!(q.structure.size, 13);
    let i = q.index_of(&pat(&[0, 1, 2])).unwrap();
    assert!(q.structure.relation("lt@12").unwrap().contains(&vec![i]));
    assert!(!q.structure.relation("lt@21").unwrap().contains(&vec![i]));
    for l in 1..=3 {
        for idx in index_maps(l, 3) {
            let name = format!("eq@{}/{}", digits(&idx), digits(&idx));
            let r = q.structure.relation(&name).unwrap();
            for c in 0..13 {
                assert!(r.contains(&vec![c, c]));
            }
        }
    }
    assert!(mpow_quotient_temporal(&b_lt_declared(), 4).is_err());
}

/// Joint weak orders of the `2m` positions decide `eq` directly.
#[test]
fn eq_rule_matches_joint_orders() {
    let m = 3;
    let pats = weak_orders(m);
    let joint: Vec<(usize, usize, Vec<u8>)> = weak_orders(2 * m)
        .into_iter()
        .map(|w| {
            let r = w.ranks().to_vec();
            let p = canonical_pattern(&r[..m]);
            let q = canonical_pattern(&r[m..]);
            (pats.iter().position(|x| *x == p).unwrap(), pats.iter().position(|x| *x == q).unwrap(), r)
        })
        .collect();
    for l in 1..=m {
        let maps = index_maps(l, m);
        for i in &maps {
            for j in &maps {
                let mut oracle = HashSet::new();
                for (p, q, r) in &joint {
                    if (0..l).all(|k| r[i[k]] == r[m + j[k]]) {
                        oracle.insert((*p, *q));
                    }
                }
                for (p, pp) in pats.iter().enumerate() {
                    for (q, qq) in pats.iter().enumerate() {
                        assert_eq!(patterns_agree(pp, i, qq, j), oracle.contains(&(p, q)), "{i:?} {j:?} {pp:?} {qq:?}");
                    }
                }
            }
        }
    }
}

/// Class of `(t, p)` goes to `t_p`.
fn low_pow_iso(x: &Structure, m: usize) -> bool {
    let low = mlow(&mpow(x, m).unwrap(), &x.signature, m).unwrap();
    let mut map = vec![usize::MAX; low.structure.size];
    for (y, &c) in low.class_of.iter().enumerate() {
        let t = decode(y / m, x.size, m);
        let v = t[y % m];
        if map[c] != usize::MAX && map[c] != v {
            return false;
        }
        map[c] = v;
    }
    is_isomorphism(&low.structure, x, &map)
}

#[test]
fn lower_of_power_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..15 {
        let n = rng.gen_range(1..=4);
        let x = gen::random_structure(&binary_sig(), n, 0.4, &mut rng);
        assert!(low_pow_iso(&x, 3));
        let low = mlow(&mpow(&x, 3).unwrap(), &x.signature, 3).unwrap();
        assert!(find_isomorphism(&low.structure, &x).is_some());
    }
}

#[test]
fn mlow_degenerate() {
    let sig = PowSignature::new(&binary_sig(), 3).unwrap().signature();
    let x = Structure::new(sig.clone(), 4, vec![]);
    let low = mlow(&x, &binary_sig(), 3).unwrap();
    assert_eq!(low.structure.size, 12);
    assert_eq!(low.structure.tuple_count(), 0);
    let mut rels = vec![Vec::new(); sig.len()];
    rels[sig.position("eq@123/123").unwrap()].push(vec![0, 0]);
    let low = mlow(&Structure::new(sig.clone(), 4, rels), &binary_sig(), 3).unwrap();
    assert_eq!(low.structure.size, 12);
    let bad = Structure::new(Signature::new(vec![("nope".into(), 1)]), 1, vec![]);
    assert!(mlow(&bad, &binary_sig(), 3).is_err());
}

#[test]
fn adjunction_round_trip_and_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base = Signature::new(vec![("E".into(), 2)]);
    let psig = PowSignature::new(&base, 3).unwrap().signature();
    for _ in 0..12 {
        let b = gen::random_structure(&base, rng.gen_range(1..=3), 0.6, &mut rng);
        let x = gen::sparse_structure(&psig, rng.gen_range(1..=3), rng.gen_range(0..6), &mut rng);
        let adj = Adjunction::new(&x, &b, 3).unwrap();
        let up = all_homs(adj.x_instance(), &adj.power).unwrap();
        let down = all_homs(adj.lowered_instance(), &b).unwrap();
        assert_eq!(up.len(), down.len());
        let mut images = HashSet::new();
        for h in &up {
            let g = adj.eta(h).unwrap();
            assert_eq!(&adj.mu(&g).unwrap(), h);
            images.insert(g);
        }
        assert_eq!(images.len(), down.len());
    }
}

#[test]
fn eta_of_identity() {
    let b = lt01();
    let p = mpow(&b, 3).unwrap();
    let adj = Adjunction::new(&p, &b, 3).unwrap();
    let id: VarMap = (0..p.size).collect();
    let g = adj.eta(&id).unwrap();
    for (y, &c) in adj.lowered.class_of.iter().enumerate() {
        assert_eq!(g[c], decode(y / 3, 2, 3)[y % 3]);
    }
    assert!(adj.eta(&vec![0; p.size]).is_err());
}

#[test]
fn power_preserves_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let a = gen::random_structure(&binary_sig(), 2, 0.5, &mut rng);
        let left = mpow(&product(&a, &a).unwrap(), 3).unwrap();
        let pa = mpow(&a, 3).unwrap();
        let right = product(&pa, &pa).unwrap();
        assert!(is_isomorphism(&left, &right, &product_power_map(2, 3)));
    }
}

#[test]
fn power_is_fully_faithful_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = Signature::new(vec![("E".into(), 2)]);
    for _ in 0..6 {
        let x = gen::random_structure(&base, rng.gen_range(1..=2), 0.5, &mut rng);
        let y = gen::random_structure(&base, rng.gen_range(1..=3), 0.5, &mut rng);
        let plain = all_homs(&Instance::from_structure(&x), &y).unwrap().len();
        let px = mpow(&x, 2).unwrap();
        let py = mpow(&y, 2).unwrap();
        let lifted = all_homs(&Instance::from_structure(&px), &py).unwrap().len();
        assert_eq!(plain, lifted);
    }
}

#[test]
fn pi_map_examples() {
    let id = pi_map(&[0, 1, 2], 3);
    assert_eq!(id.get(&[0, 1, 2]), &pat(&[0, 1, 2]));
    assert_eq!(id.get(&[2, 2, 0]), &pat(&[1, 1, 0]));
    let c = pi_map(&[5, 5, 5, 5], 3);
    assert!(c.entries.iter().all(|p| *p == pat(&[0, 0, 0])));
    assert_eq!(pi_map(&[-3, 0, 7], 3), id);
    assert_ne!(pi_map(&[0, 0, 7], 3), id);
}

#[test]
fn xi_maps() {
    let b = b_lt_declared();
    let a = lt01();
    let q3 = mpow_quotient_temporal(&b, 3).unwrap();
    let q2 = mpow_quotient_temporal(&b, 2).unwrap();
    let id = FunctionTable { arity: 1, dom: 2, entries: vec![0i64, 1] };
    let g = xi_inf(&id, &a, &b, &q3).unwrap();
    for c in 0..8 {
        assert_eq!(q3.patterns[g.entries[c]], canonical_pattern(&decode(c, 2, 3)));
    }
    let min = FunctionTable::from_fn(2, 2, |t| t[0].min(t[1]) as i64);
    let g3 = xi_inf(&min, &a, &b, &q3).unwrap();
    let g2 = xi_inf(&min, &a, &b, &q2).unwrap();
    assert_eq!(xi_step(&g3, 2, &q3, &q2).unwrap(), g2);
    let max_flip = FunctionTable::from_fn(1, 2, |t| 1 - t[0] as i64);
    assert!(xi_inf(&max_flip, &a, &b, &q3).is_err());
}

#[test]
fn xi_commutes_on_random_monotone_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = b_lt_declared();
    let a = declared_template(&b, 3);
    let q3 = mpow_quotient_temporal(&b, 3).unwrap();
    let q2 = mpow_quotient_temporal(&b, 2).unwrap();
    for _ in 0..10 {
        // strictly increasing in the first argument, arbitrary tie-break data in the second
        let w: Vec<i64> = (0..3).map(|_| rng.gen_range(0..3)).collect();
        let f = FunctionTable::from_fn(2, 3, |t| 10 * t[0] as i64 + w[t[1]]);
        let g3 = xi_inf(&f, &a, &b, &q3).unwrap();
        let g2 = xi_inf(&f, &a, &b, &q2).unwrap();
        assert_eq!(xi_step(&g3, 3, &q3, &q2).unwrap(), g2);
    }
}

#[test]
fn restriction_examples() {
    let f = [3i64, 1, 4, 1];
    let h = pi_map(&f, 3);
    assert_eq!(restrict_hom(&h, &[0, 1]).unwrap(), pi_map(&f, 2));
    assert_eq!(restrict_hom(&h, &[0, 1, 2]).unwrap(), h);
    let h2 = restrict_hom(&h, &[2, 0]).unwrap();
    assert_eq!(h2.get(&[0, 1]), &pat(&[1, 0]));
    assert!(restrict_hom(&h, &[0, 0]).is_err());
    let mut bad = h.clone();
    bad.entries[encode(&[0, 1, 2], 4)] = pat(&[0, 0, 0]);
    assert!(restrict_hom(&bad, &[0, 1]).is_err());
}

#[test]
fn restriction_commutes_on_random_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let f: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..3)).collect();
        let h = pi_map(&f, 3);
        let idx = [rng.gen_range(0..3), rng.gen_range(0..3)];
        if idx[0] == idx[1] {
            continue;
        }
        let hk = restrict_hom(&h, &idx).unwrap();
        for c in 0..27 {
            let x = decode(c, 3, 3);
            let lhs = canonical_pattern(&project_ranks(&h.entries[c], &idx));
            assert_eq!(&lhs, hk.get(&project(&x, &idx)));
        }
    }
}

#[test]
fn decode_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let f: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..5)).collect();
        let h = pi_map(&f, 3);
        let g = decode_hom(&h).unwrap();
        assert_eq!(pi_map(&g, 3), h);
    }
    assert_eq!(decode_hom(&pi_map(&[4, 4, 4], 3)).unwrap(), vec![0, 0, 0]);
    let mut bad = pi_map(&[0, 1, 2], 3);
    bad.entries[encode(&[0, 1, 2], 3)] = pat(&[2, 1, 0]);
    assert!(decode_hom(&bad).is_err());
}

#[test]
fn decode_checks_homomorphism() {
    let b = b_lt_declared();
    let x = declared_template(&b, 3);
    assert_eq!(decode_hom_checked(&pi_map(&[0, 5, 9], 3), &x, &b).unwrap(), Some(vec![0, 1, 2]));
    assert_eq!(decode_hom_checked(&pi_map(&[0, 0, 9], 3), &x, &b).unwrap(), None);
}

#[test]
fn sandwich_pattern_map() {
    for b in [b_lt_declared(), b_ineq(), b_x()] {
        let q = mpow_quotient_temporal(&b, 3).unwrap();
        for n in 1..=3 {
            pattern_sandwich(&b, n, &q).unwrap();
        }
    }
}
