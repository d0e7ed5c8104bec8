#![allow(dead_code)]

use pbasis::{KKind, MPoly, Ring};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ring(p: u32, with_t: bool, n: usize) -> Ring {
    let kind = if with_t { KKind::poly_over_prime_field(p) } else { KKind::prime_field(p) }.unwrap();
    Ring::new(kind, n).unwrap()
}

/// `c · t^k · x^e`.
pub fn monomial(ring: Ring, e: &[u32], k: u32, c: u32) -> MPoly {
    let mut m = MPoly::scalar(ring, c as u64);
    for (i, &d) in e.iter().enumerate() {
        m = &m * &MPoly::var(ring, i).unwrap().pow(d);
    }
    if k > 0 {
        m = &m * &MPoly::t(ring).unwrap().pow(k);
    }
    m
}

/// Random polynomial with at most `terms` terms of total degree at most
/// `deg`, where `t` counts toward the degree.
pub fn random_poly(rng: &mut ChaCha8Rng, ring: Ring, deg: u32, terms: usize) -> MPoly {
    let n = ring.arity();
    let with_t = ring.kind().has_t();
    let mut f = MPoly::zero(ring);
    for _ in 0..terms {
        let mut left = rng.gen_range(0..=deg);
        let mut e = vec![0; n];
        let slots = n + with_t as usize;
        let mut k = 0;
        while left > 0 {
            let v = rng.gen_range(0..slots);
            if v == n {
                k += 1;
            } else {
                e[v] += 1;
            }
            left -= 1;
        }
        f = &f + &monomial(ring, &e, k, rng.gen_range(1..ring.p()));
    }
    f
}

/// Random element of `B`: a polynomial in `x_i^p` (and `t`).
pub fn random_b(rng: &mut ChaCha8Rng, ring: Ring, deg: u32, terms: usize) -> MPoly {
    let p = ring.p();
    let mut f = MPoly::zero(ring);
    for _ in 0..terms {
        let e: Vec<u32> = (0..ring.arity()).map(|_| p * rng.gen_range(0..=deg)).collect();
        let k = if ring.kind().has_t() { rng.gen_range(0..=deg) } else { 0 };
        f = &f + &monomial(ring, &e, k, rng.gen_range(1..p));
    }
    f
}

pub fn nonconstant(rng: &mut ChaCha8Rng, ring: Ring, deg: u32, terms: usize) -> MPoly {
    loop {
        let f = random_poly(rng, ring, deg.max(1), terms);
        if !f.is_constant() {
            return f;
        }
    }
}

pub const CONFIGS: [(u32, bool, usize); 8] =
    [(2, false, 1), (2, false, 2), (3, false, 2), (2, false, 3), (3, false, 3), (5, false, 2), (2, true, 2), (3, true, 1)];

pub fn ring_strategy() -> impl Strategy<Value = Ring> {
    prop::sample::select(CONFIGS.to_vec()).prop_map(|(p, t, n)| ring(p, t, n))
}

/// Polynomials in a given ring: up to `terms` terms, each exponent at most `deg`.
pub fn poly_in(ring: Ring, deg: u32, terms: usize) -> impl Strategy<Value = MPoly> {
    let n = ring.arity();
    let tmax = if ring.kind().has_t() { deg } else { 0 };
    prop::collection::vec((prop::collection::vec(0..=deg, n), 0..=tmax, 1..ring.p()), 0..=terms).prop_map(move |ts| {
        ts.iter().fold(MPoly::zero(ring), |acc, (e, k, c)| &acc + &monomial(ring, e, *k, *c))
    })
}

pub fn ring_and_polys(count: usize, deg: u32, terms: usize) -> impl Strategy<Value = (Ring, Vec<MPoly>)> {
    ring_strategy().prop_flat_map(move |r| (Just(r), prop::collection::vec(poly_in(r, deg, terms), count)))
}

/// A random input to the coprime shift: `g` irreducible, `g ∤ b` and
/// `g^ε | b·f + c`. About half the time `c` shares a factor with `b`.
pub struct ShiftSetup {
    pub f: MPoly,
    pub b: MPoly,
    pub c: MPoly,
    pub g: MPoly,
    pub eps: u32,
}

pub fn random_irreducible(rng: &mut ChaCha8Rng, ring: Ring, deg: u32) -> MPoly {
    loop {
        let f = nonconstant(rng, ring, deg, 3);
        if let Ok(Some(fac)) = pbasis::oracle::irreducible_factors_trial(&f, deg) {
            return fac[0].0.clone();
        }
    }
}

pub fn shift_setup(rng: &mut ChaCha8Rng) -> ShiftSetup {
    let configs = [(2, false, 1), (2, false, 2), (3, false, 2), (5, false, 1), (2, true, 1), (3, true, 2)];
    let (p, t, n) = configs[rng.gen_range(0..configs.len())];
    let ring = ring(p, t, n);
    let g = random_irreducible(rng, ring, 2);
    let eps = rng.gen_range(1..=2);
    let b = loop {
        let mut b = random_b(rng, ring, 1, 2);
        for _ in 0..rng.gen_range(0..=2) {
            b = &b * &nonconstant(rng, ring, 2, 2);
        }
        if !b.is_zero() && !b.divisible_by(&g) {
            break b;
        }
    };
    let f = random_poly(rng, ring, 3, 4);
    let mut r = random_poly(rng, ring, 2, 3);
    if rng.gen_bool(0.5) && !b.is_constant() {
        if let Ok(Some(fac)) = pbasis::oracle::irreducible_factors_trial(&b, 6) {
            r = &r * &fac[0].0;
        }
    }
    let c = &(&g.pow(eps) * &r) - &(&b * &f);
    ShiftSetup { f, b, c, g, eps }
}
