mod common;

use common::*;
use pbasis::basis::{decompose_over_fraction_span, is_p_independent, structure_matrix, DecomposeVerdict};
use pbasis::derivation::jacobian_derivation;
use pbasis::expr::PolyContext;
use pbasis::freudenburg::{shift_to_coprime, verify_witness, witness_search, SearchOutcome, SubringElem, TheoremWitness, WitnessCase};
use pbasis::frob::{b_decompose, b_recompose, in_b, is_squarefree_and_bfree, pth_root, Omega};
use pbasis::jac::{column_sets, dgcd, minor};
use pbasis::oracle::{enumerate_polys, irreducible_factors_trial};
use pbasis::{KKind, MPoly, Ring};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #[test]
    fn ring_axioms((_r, v) in ring_and_polys(3, 3, 4)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(&(a * b) * c, a * &(b * c));
        prop_assert_eq!(&(a + b) * c, &(a * c) + &(b * c));
        prop_assert!((a - a).is_zero());
        prop_assert_eq!(&(a - b) + b, a.clone());
    }

    #[test]
    fn gcd_contract((_r, v) in ring_and_polys(3, 3, 3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let g = a.gcd(b).unwrap();
        prop_assert!(a.divisible_by(&g) && b.divisible_by(&g));
        prop_assert_eq!(g.normalized(), g.clone());
        if !g.is_zero() {
            let (a1, b1) = (a.exact_div(&g).unwrap().unwrap(), b.exact_div(&g).unwrap().unwrap());
            prop_assert!(a1.gcd(&b1).unwrap().is_unit() || (a1.is_zero() || b1.is_zero()));
        }
        if !c.is_zero() {
            let gc = (a * c).gcd(&(b * c)).unwrap();
            prop_assert!(gc.divisible_by(c));
        }
    }

    #[test]
    fn leibniz_and_frobenius((r, v) in ring_and_polys(2, 3, 4)) {
        let (f, g) = (&v[0], &v[1]);
        for i in 0..r.arity() {
            let d = |h: &MPoly| h.partial_derivative(i).unwrap();
            prop_assert_eq!(d(&(f * g)), &(f * &d(g)) + &(g * &d(f)));
            prop_assert!(d(&f.pow(r.p())).is_zero());
        }
        prop_assert!(in_b(&f.pow(r.p())));
    }

    #[test]
    fn b_decomposition_round_trip((r, v) in ring_and_polys(1, 5, 6)) {
        let f = &v[0];
        let d = b_decompose(f);
        prop_assert_eq!(&b_recompose(&d), f);
        prop_assert!(d.components().keys().all(|beta| beta.iter().all(|&k| k < r.p())));
        prop_assert_eq!(in_b(f), d.components().keys().all(|beta| beta.iter().all(|&k| k == 0)));
    }

    #[test]
    fn parser_round_trip((r, v) in ring_and_polys(1, 4, 5)) {
        let ctx = PolyContext::with_default_names(r.kind(), r.arity());
        let text = ctx.print(&v[0]);
        let back = ctx.parse(&text).unwrap();
        prop_assert_eq!(&back, &v[0]);
        prop_assert_eq!(ctx.print(&back), text);
    }

    #[test]
    fn squares_are_detected((_r, v) in ring_and_polys(2, 2, 3)) {
        let (f, g) = (&v[0], &v[1]);
        prop_assume!(!f.is_zero() && !g.is_constant());
        prop_assert!(!is_squarefree_and_bfree(&(f * &g.pow(2))).unwrap());
    }

    #[test]
    fn pth_roots((_r, v) in ring_and_polys(1, 3, 3)) {
        let f = &v[0];
        let fp = f.pow(f.ring().p());
        prop_assert_eq!(pth_root(&fp), Some(f.clone()));
    }
}

proptest! {
    #![proptest_config(small())]

    #[test]
    fn factorization_multiplies_back((_r, v) in ring_and_polys(1, 3, 4)) {
        let f = &v[0];
        prop_assume!(!f.is_zero());
        if let Some(fac) = irreducible_factors_trial(f, 3).unwrap() {
            let prod = fac.iter().fold(MPoly::one(f.ring()), |acc, (q, k)| &acc * &q.pow(*k));
            prop_assert!(prod.is_associate(f));
            for (q, _) in &fac {
                prop_assert_eq!(irreducible_factors_trial(q, 3).unwrap().map(|x| x.len()), Some(1));
            }
        }
    }

    #[test]
    fn jacobian_derivation_identities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, t, n) = CONFIGS[rng.gen_range(0..CONFIGS.len())];
        let r = ring(p, t, n);
        let m = rng.gen_range(1..=n);
        let fs: Vec<MPoly> = (0..m).map(|_| random_poly(&mut rng, r, 3, 3)).collect();
        let sets = column_sets(n, m);
        let cols = &sets[rng.gen_range(0..sets.len())];
        let i = rng.gen_range(0..m);
        let d = jacobian_derivation(&fs, i, cols).unwrap();
        for (j, f) in fs.iter().enumerate() {
            let v = d.apply(f).unwrap();
            if j == i {
                prop_assert_eq!(v, minor(&fs, cols).unwrap());
            } else {
                prop_assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn minors_are_multilinear_over_b(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(*[2, 3].get(rng.gen_range(0..2)).unwrap(), rng.gen_bool(0.3), 3);
        let m = rng.gen_range(2..=3);
        let fs: Vec<MPoly> = (0..m).map(|_| random_poly(&mut rng, r, 3, 3)).collect();
        let (i, j) = (0, m - 1);
        let (b1, c1, b2, c2) = (random_b(&mut rng, r, 1, 2), random_b(&mut rng, r, 1, 2), random_b(&mut rng, r, 1, 2), random_b(&mut rng, r, 1, 2));
        let mut gs = fs.clone();
        gs[i] = &(&b1 * &fs[i]) + &c1;
        gs[j] = &(&b2 * &fs[j]) + &c2;
        for cols in column_sets(3, m) {
            prop_assert_eq!(minor(&gs, &cols).unwrap(), &(&b1 * &b2) * &minor(&fs, &cols).unwrap());
        }
    }

    #[test]
    fn independence_matches_nonzero_dgcd(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, t, n) = CONFIGS[rng.gen_range(0..CONFIGS.len())];
        let r = ring(p, t, n);
        let m = rng.gen_range(1..=n.min(2));
        let fs: Vec<MPoly> = (0..m).map(|_| random_poly(&mut rng, r, 3, 3)).collect();
        let sm = structure_matrix(r, &fs).unwrap();
        prop_assert_eq!(sm.rank().unwrap() == sm.cols(), !dgcd(&fs).unwrap().is_zero());
        prop_assert_eq!(is_p_independent(&fs).unwrap(), !dgcd(&fs).unwrap().is_zero());
    }

    #[test]
    fn decomposition_recovers_coefficients(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, t, n) = CONFIGS[rng.gen_range(0..CONFIGS.len())];
        let r = ring(p, t, n);
        let m = rng.gen_range(1..=n.min(2));
        let fs: Vec<MPoly> = (0..m).map(|_| random_poly(&mut rng, r, 2, 3)).collect();
        prop_assume!(is_p_independent(&fs).unwrap());
        let omega = Omega::new(m, p);
        let mut target = MPoly::zero(r);
        let mut expected = std::collections::BTreeMap::new();
        for alpha in omega.iter() {
            if rng.gen_bool(0.5) {
                let c = random_b(&mut rng, r, 1, 2);
                let prod = alpha.iter().zip(&fs).fold(MPoly::one(r), |acc, (&k, f)| &acc * &f.pow(k));
                target = &target + &(&c * &prod);
                if !c.is_zero() {
                    expected.insert(alpha.clone(), c);
                }
            }
        }
        match decompose_over_fraction_span(&target, &fs).unwrap() {
            DecomposeVerdict::InPolynomialSpan(cs) => {
                let got: std::collections::BTreeMap<_, _> = cs.into_iter().map(|(a, y)| (a, y.to_a())).collect();
                prop_assert_eq!(got, expected);
            }
            other => prop_assert!(false, "unexpected verdict {:?}", other),
        }
    }

    #[test]
    fn enumeration_counts(p in prop::sample::select(vec![2u32, 3]), n in 1usize..=2, d in 0u32..=2) {
        let kind = KKind::prime_field(p).unwrap();
        let count = enumerate_polys(kind, n, d).unwrap().count();
        let monos = (1..=n as u32).fold(1u64, |acc, k| acc * (d as u64 + k as u64) / k as u64);
        prop_assert_eq!(count as u64, (p as u64).pow(monos as u32));
    }

    #[test]
    fn shift_postconditions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = shift_setup(&mut rng);
        let c2 = shift_to_coprime(&s.f, &s.b, &s.c, &s.g, s.eps).unwrap();
        prop_assert!((&(&s.b * &s.f) + &c2).divisible_by(&s.g.pow(s.eps)));
        prop_assert!(s.b.gcd(&c2).unwrap().is_unit());
        prop_assert!(pth_root(&(&c2 - &s.c)).is_some());
    }

    #[test]
    fn search_results_verify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(*[2, 3].get(rng.gen_range(0..2)).unwrap(), false, 2);
        let m = rng.gen_range(1..=2);
        let fs: Vec<MPoly> = (0..m).map(|_| nonconstant(&mut rng, r, 3, 2)).collect();
        let d = dgcd(&fs).unwrap();
        prop_assume!(!d.is_zero() && !d.is_unit());
        if let Some(fac) = irreducible_factors_trial(&d, 4).unwrap() {
            for (g, _) in fac {
                if let SearchOutcome::Found(w) = witness_search(&fs, &g, 2, 1_000_000).unwrap() {
                    prop_assert!(verify_witness(&fs, &w).unwrap());
                }
            }
        }
    }
}

/// Builds a tuple together with a valid witness for `g`, then checks that
/// `g` divides the differential gcd.
fn planted_witness(rng: &mut ChaCha8Rng) -> (Vec<MPoly>, TheoremWitness) {
    let case = [WitnessCase::I, WitnessCase::II, WitnessCase::III][rng.gen_range(0..3)];
    let (r, g): (Ring, MPoly) = match case {
        WitnessCase::II => {
            let p = [2, 3][rng.gen_range(0..2)];
            let r = ring(p, true, rng.gen_range(1..=2));
            let g = &MPoly::var(r, 0).unwrap().pow(p) + &MPoly::t(r).unwrap();
            (r, g)
        }
        _ => {
            let (p, n) = [(2, 2), (3, 2), (2, 3), (5, 1)][rng.gen_range(0..4)];
            let r = ring(p, false, n);
            let mut g = MPoly::var(r, rng.gen_range(0..n)).unwrap();
            for v in 0..n {
                g = &g + &monomial(r, &(0..n).map(|k| (k == v) as u32).collect::<Vec<_>>(), 0, rng.gen_range(0..p));
            }
            g = &g + &MPoly::scalar(r, rng.gen_range(0..p) as u64);
            if g.is_constant() {
                g = MPoly::var(r, 0).unwrap();
            }
            (r, g)
        }
    };
    let n = r.arity();
    let m = if case == WitnessCase::III { 2 } else { rng.gen_range(1..=n) };
    let pick_b = |rng: &mut ChaCha8Rng| loop {
        let b = &random_b(rng, r, 1, 2) + &MPoly::one(r);
        if !b.is_zero() && !b.divisible_by(&g) {
            return b;
        }
    };
    let eps = if case == WitnessCase::I { 2 } else { 1 };
    let ge = g.pow(eps);
    let mut fs: Vec<MPoly> = (0..m).map(|_| random_poly(rng, r, 2, 3)).collect();
    let (b1, s1) = (pick_b(rng), random_b(rng, r, 1, 2));
    fs[0] = &(&ge * &random_poly(rng, r, 1, 2)) - &s1;
    let c1 = &b1 * &s1;
    let el = |fs: &[MPoly], omitted: Vec<usize>, v: &MPoly| Some(SubringElem::from_b(fs, omitted, v).unwrap());
    let w = if case == WitnessCase::III {
        let (b2, s2) = (pick_b(rng), random_b(rng, r, 1, 2));
        fs[1] = &(&g * &random_poly(rng, r, 1, 2)) - &s2;
        let c2 = &b2 * &s2;
        let om = vec![0, 1];
        TheoremWitness {
            case,
            g: g.clone(),
            i: 0,
            j: Some(1),
            b: None,
            c: None,
            b1: el(&fs, om.clone(), &b1),
            c1: el(&fs, om.clone(), &c1),
            b2: el(&fs, om.clone(), &b2),
            c2: el(&fs, om, &c2),
        }
    } else {
        TheoremWitness { case, g: g.clone(), i: 0, j: None, b: el(&fs, vec![0], &b1), c: el(&fs, vec![0], &c1), b1: None, c1: None, b2: None, c2: None }
    };
    (fs, w)
}

#[test]
fn planted_witnesses_force_divisibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 120 {
        let (fs, w) = planted_witness(&mut rng);
        if fs.len() > fs[0].arity() {
            continue;
        }
        assert!(verify_witness(&fs, &w).unwrap(), "planted witness rejected: {:?}", w.case);
        assert!(dgcd(&fs).unwrap().divisible_by(&w.g));
        checked += 1;
    }
}
