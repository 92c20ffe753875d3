use super::*;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn sys(n: usize, rows: &[(&[(usize, i64)], i64)]) -> AffineSystem {
    let mut s = AffineSystem::new(n);
    for (c, r) in rows {
        s.push(c.to_vec(), *r);
    }
    s
}

fn planted(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> (AffineSystem, Vec<i64>) {
    let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..6)).collect();
    let mut s = AffineSystem::new(n);
    for _ in 0..m {
        let mut coeffs: Vec<(usize, i64)> = Vec::new();
        for v in 0..n {
            if rng.gen_bool(density) {
                coeffs.push((v, rng.gen_range(-4..5)));
            }
        }
        let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
        s.push(coeffs, rhs);
    }
    (s, x)
}

#[test]
fn integer_examples() {
    let s = sys(2, &[(&[(0, 1), (1, 1)], 2), (&[(0, 1), (1, -1)], 0)]);
    assert_eq!(integer_feasible(&s), Some(big(&[1, 1])));
    let s = sys(1, &[(&[(0, 2)], 1)]);
    assert_eq!(integer_feasible(&s), None);
    assert_eq!(integer_feasible(&AffineSystem::new(3)), Some(big(&[0, 0, 0])));
}

#[test]
fn integer_planted_and_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..150 {
        let n = rng.gen_range(1..12);
        let m = rng.gen_range(0..12);
        let (s, _) = planted(&mut rng, n, m, 0.5);
        let x = integer_feasible(&s).expect("planted");
        assert!(s.satisfied_by_int(&x));
        assert!(integer_feasible_plain(&s).is_some());
    }
    // random (not planted) systems: presolve and plain elimination agree
    for _ in 0..300 {
        let n = rng.gen_range(1..7);
        let mut s = AffineSystem::new(n);
        for _ in 0..rng.gen_range(1..7) {
            let mut coeffs: Vec<(usize, i64)> = Vec::new();
            for v in 0..n {
                if rng.gen_bool(0.5) {
                    coeffs.push((v, rng.gen_range(-6..7)));
                }
            }
            s.push(coeffs, rng.gen_range(-6..7));
        }
        assert_eq!(integer_feasible(&s).is_some(), integer_feasible_plain(&s).is_some(), "{s:?}");
    }
}

#[test]
fn parity_obstruction() {
    // x + y + 2z = 1, x + y = 2w
    let s = sys(4, &[(&[(0, 1), (1, 1), (2, 2)], 1), (&[(0, 1), (1, 1), (3, -2)], 0)]);
    assert_eq!(integer_feasible(&s), None);
    assert!(rational_feasible(&s, &BTreeSet::new()).is_some());
}

#[test]
fn congruence_fast_path() {
    // x0 + x1 ≡ 1, x1 + x2 ≡ 1, x0 + x2 ≡ 1 (mod 2): odd cycle, infeasible
    let s = sys(
        6,
        &[
            (&[(0, 1), (1, 1), (3, 2)], 1),
            (&[(1, 1), (2, 1), (4, 2)], 1),
            (&[(0, 1), (2, 1), (5, 2)], 1),
        ],
    );
    assert_eq!(integer_feasible(&s), None);
    assert_eq!(integer_feasible_plain(&s), None);
    let s = sys(5, &[(&[(0, 1), (1, 1), (3, 3)], 1), (&[(1, 1), (2, 2), (4, 3)], 2)]);
    let x = integer_feasible(&s).unwrap();
    assert!(s.satisfied_by_int(&x));
}

#[test]
fn rational_examples() {
    let all: BTreeSet<usize> = [0, 1].into();
    let s = sys(2, &[(&[(0, 1), (1, 1)], 1)]);
    let x = rational_feasible(&s, &all).unwrap();
    assert!(s.satisfied_by_rat(&x));
    let s = sys(2, &[(&[(0, 1), (1, 1)], -1)]);
    assert!(rational_feasible(&s, &all).is_none());
    assert!(rational_feasible(&s, &BTreeSet::new()).is_some());
}

#[test]
fn rational_planted() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..60 {
        let n = rng.gen_range(1..8);
        let x: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let mut s = AffineSystem::new(n);
        for _ in 0..rng.gen_range(0..6) {
            let coeffs: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-3..4))).collect();
            let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            s.push(coeffs, rhs);
        }
        let nonneg: BTreeSet<usize> = (0..n).collect();
        let y = rational_feasible(&s, &nonneg).expect("planted nonnegative solution");
        assert!(s.satisfied_by_rat(&y));
    }
}

#[test]
fn support_examples() {
    let all: BTreeSet<usize> = [0, 1].into();
    let s = sys(2, &[(&[(0, 1), (1, 1)], 1)]);
    assert_eq!(interior_support(&s, &all).unwrap(), all);
    let s = sys(2, &[(&[(0, 1)], 0), (&[(0, 1), (1, 1)], 1)]);
    assert_eq!(interior_support(&s, &all).unwrap(), [1].into());
    let s = sys(1, &[(&[(0, 1)], -1)]);
    assert!(interior_support(&s, &[0].into()).is_err());
}

/// Vertices reached by phase 1 under random column orders.
pub(crate) fn sampled_vertex_support(s: &AffineSystem, rng: &mut ChaCha8Rng, samples: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for _ in 0..samples {
        let mut perm: Vec<usize> = (0..s.num_vars).collect();
        perm.shuffle(rng);
        let mut t = AffineSystem::new(s.num_vars);
        for r in &s.rows {
            t.push(r.coeffs.iter().map(|&(c, a)| (perm[c], a)).collect(), r.rhs);
        }
        let all: BTreeSet<usize> = (0..s.num_vars).collect();
        let y = rational_feasible(&t, &all).unwrap();
        for v in 0..s.num_vars {
            if y[perm[v]].is_positive() {
                out.insert(v);
            }
        }
    }
    out
}

#[test]
fn support_contains_sampled_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let n = rng.gen_range(2..8);
        let x: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..3) }).collect();
        let mut s = AffineSystem::new(n);
        for _ in 0..rng.gen_range(1..4) {
            let coeffs: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-2..3))).collect();
            let rhs = coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            s.push(coeffs, rhs);
        }
        let all: BTreeSet<usize> = (0..n).collect();
        let sup = interior_support(&s, &all).unwrap();
        let sampled = sampled_vertex_support(&s, &mut rng, 20);
        assert!(sampled.is_subset(&sup));
        // the planted point's support is inside as well
        for v in 0..n {
            if x[v] > 0 {
                assert!(sup.contains(&v));
            }
        }
    }
}

#[test]
fn big_coefficients_fall_back() {
    let huge = i64::MAX / 3;
    let s = sys(2, &[(&[(0, huge), (1, huge - 1)], 1)]);
    let x = integer_feasible(&s).unwrap();
    assert!(s.satisfied_by_int(&x));
    let _ = BigInt::one();
}
