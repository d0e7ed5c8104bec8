//! Brute-force ground truth at desk scale: exhaustive enumeration, trial
//! division factoring, sampled checks of the factor conditions and the
//! two-sided equivalence experiment.

use crate::basis::bounded_monomials;
use crate::coeff::KKind;
use crate::error::{Error, Result};
use crate::mpoly::{coeffs_in, gcd_raw, Exp, MPoly, Ring};

/// Hard cap on enumeration sizes and trial-division candidate counts.
mod experiment;

pub use experiment::{
    analyze_instance, condition3_sample_check, curated_suite, equivalence_experiment, instance_seed, sentinel_suite, Cond3Failure,
    Cond3Report, ExperimentParams, ExperimentRecord, ExperimentReport, FailureKind, FailureRecord, WitnessRecord,
    DGCD_FACTOR_BOUND, MAX_EXPERIMENT_ARITY, MAX_EXPERIMENT_COUNT, MAX_EXPERIMENT_DEGREE,
};

pub const ENUMERATION_CAP: u128 = 1 << 24;

/// Every polynomial supported on the monomials of degree at most `d`
/// (the `t`-exponent counts towards the degree over `Fp[t]`), in counting
/// order: the `k`-th monomial in increasing canonical order is digit `k` of
/// a base-`p` counter.
#[derive(Clone, Debug)]
pub struct PolyEnumerator {
    ring: Ring,
    monos: Vec<Exp>,
    next: u64,
    count: u64,
}

impl Iterator for PolyEnumerator {
    type Item = MPoly;

    fn next(&mut self) -> Option<MPoly> {
        if self.next >= self.count {
            return None;
        }
        let p = self.ring.p() as u64;
        let mut code = self.next;
        self.next += 1;
        let mut terms = Vec::new();
        for mono in &self.monos {
            let v = (code % p) as u32;
            code /= p;
            if v != 0 {
                terms.push((mono.clone(), v));
            }
        }
        Some(MPoly::from_raw(self.ring, terms))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PolyEnumerator {}

pub fn enumerate_polys(kind: KKind, n: usize, max_total_degree: u32) -> Result<PolyEnumerator> {
    let ring = Ring::new(kind, n)?;
    let monos = bounded_monomials(ring, max_total_degree);
    let size = (kind.p() as u128).checked_pow(monos.len() as u32).unwrap_or(u128::MAX);
    if size > ENUMERATION_CAP {
        return Err(Error::ScaleExceeded { what: "polynomial enumeration", size, cap: ENUMERATION_CAP });
    }
    Ok(PolyEnumerator { ring, monos, next: 0, count: size as u64 })
}

/// Irreducible factors with multiplicities, each normalized, sorted by
/// degree and then canonically. `None` when some cofactor could not be
/// certified irreducible with candidate divisors of degree at most
/// `degree_bound` (degree counts `t`). Units give an empty list.
pub fn irreducible_factors_trial(f: &MPoly, degree_bound: u32) -> Result<Option<Vec<(MPoly, u32)>>> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut budget = ENUMERATION_CAP as u64;
    let mut found = Vec::new();
    if !split(&f.normalized(), degree_bound, &mut budget, &mut found) {
        return Ok(None);
    }
    let mut merged: Vec<(MPoly, u32)> = Vec::new();
    for q in found {
        match merged.iter_mut().find(|(r, _)| *r == q) {
            Some((_, k)) => *k += 1,
            None => merged.push((q, 1)),
        }
    }
    merged.sort_by(|(a, _), (b, _)| a.full_degree().cmp(&b.full_degree()).then_with(|| cmp_canonical(b, a)));
    Ok(Some(merged))
}

/// Compares term lists in canonical order.
fn cmp_canonical(a: &MPoly, b: &MPoly) -> std::cmp::Ordering {
    for (x, y) in a.raw_terms().iter().zip(b.raw_terms()) {
        let o = crate::mpoly::cmp_exp(&x.0, &y.0, a.arity()).then(x.1.cmp(&y.1));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// True iff `g` is certified irreducible within the bound.
pub fn is_irreducible_trial(g: &MPoly, degree_bound: u32) -> Option<bool> {
    if g.is_zero() || g.is_unit() {
        return Some(false);
    }
    irreducible_factors_trial(g, degree_bound).ok().flatten().map(|fs| fs.len() == 1 && fs[0].1 == 1)
}

fn split(f: &MPoly, bound: u32, budget: &mut u64, out: &mut Vec<MPoly>) -> bool {
    if f.is_unit() {
        return true;
    }
    let ring = f.ring();
    let nv = ring.arity() + ring.kind().has_t() as usize;
    // Monomial content.
    let mut mono = Exp::from_elem(0, nv);
    for v in 0..nv {
        mono[v] = f.raw_terms().iter().map(|(e, _)| e[v]).min().unwrap_or(0);
    }
    if mono.iter().any(|&k| k > 0) {
        for v in 0..nv {
            let mut e = Exp::from_elem(0, nv);
            e[v] = 1;
            for _ in 0..mono[v] {
                out.push(MPoly::from_raw(ring, vec![(e.clone(), 1)]));
            }
        }
        let m = MPoly::from_raw(ring, vec![(mono, 1)]);
        let rest = f.div_exact_raw(&m).expect("monomial content divides");
        return split(&rest.normalized(), bound, budget, out);
    }
    // Content with respect to each variable.
    for v in 0..nv {
        if f.deg_in(v) == 0 {
            continue;
        }
        let mut c = MPoly::zero(ring);
        for coef in coeffs_in(f, v) {
            if !coef.is_zero() {
                c = gcd_raw(&c, &coef);
                if c.is_unit() {
                    break;
                }
            }
        }
        if !c.is_unit() {
            let c = c.normalized();
            let rest = f.div_exact_raw(&c).expect("content divides");
            return split(&c, bound, budget, out) && split(&rest.normalized(), bound, budget, out);
        }
    }
    // A nontrivial gcd with a derivative is a proper factor.
    for v in 0..nv {
        let d = f.partial_internal(v);
        if d.is_zero() {
            continue;
        }
        let g = gcd_raw(f, &d);
        if !g.is_unit() {
            let g = g.normalized();
            let rest = f.div_exact_raw(&g).expect("gcd divides");
            return split(&g, bound, budget, out) && split(&rest.normalized(), bound, budget, out);
        }
    }
    let total = f.full_degree().unwrap_or(0);
    let mut d = 1;
    loop {
        if 2 * d > total {
            out.push(f.normalized());
            return true;
        }
        if d > bound {
            return false;
        }
        match smallest_divisor_of_degree(f, d, budget) {
            Err(()) => return false,
            Ok(Some(q)) => {
                let rest = f.div_exact_raw(&q).expect("divisor divides");
                out.push(q);
                return split(&rest.normalized(), bound, budget, out);
            }
            Ok(None) => d += 1,
        }
    }
}

/// A monic divisor of `f` of full degree exactly `d`, found by trial
/// division. The search only tries supports compatible with `f`: per-variable
/// degrees within those of `f`, leading monomial dividing that of `f`, trailing
/// monomial dividing that of `f`.
fn smallest_divisor_of_degree(f: &MPoly, d: u32, budget: &mut u64) -> Result<Option<MPoly>, ()> {
    let ring = f.ring();
    let n = ring.arity();
    let nv = n + ring.kind().has_t() as usize;
    let caps: Vec<u32> = (0..nv).map(|v| f.deg_in(v)).collect();
    let lead_f = &f.raw_terms()[0].0;
    let trail_f = &f.raw_terms()[f.len() - 1].0;
    let monos: Vec<Exp> = bounded_monomials(ring, d)
        .into_iter()
        .filter(|m| m.iter().zip(&caps).all(|(a, c)| a <= c))
        .collect();
    let p = ring.p() as u64;
    let divides = |a: &Exp, b: &Exp| a.iter().zip(b.iter()).all(|(x, y)| x <= y);
    let sieve = NonRoots::new(f, 64);
    for (lead, lm) in monos.iter().enumerate() {
        if !divides(lm, lead_f) || lead == 0 {
            continue;
        }
        let lower = &monos[..lead];
        let count = p.checked_pow(lower.len() as u32).ok_or(())?;
        if count > *budget {
            return Err(());
        }
        *budget -= count;
        let lead_deg: u32 = lm.iter().sum();
        for code in 1..count {
            let mut c = code;
            let mut terms = vec![(lm.clone(), 1)];
            let mut max_deg = lead_deg;
            let mut lowest: Option<&Exp> = None;
            for mono in lower {
                let v = (c % p) as u32;
                c /= p;
                if v != 0 {
                    max_deg = max_deg.max(mono.iter().sum());
                    if lowest.is_none() {
                        lowest = Some(mono);
                    }
                    terms.push((mono.clone(), v));
                }
            }
            if max_deg != d {
                continue;
            }
            if let Some(low) = lowest {
                if !divides(low, trail_f) {
                    continue;
                }
            }
            if sieve.vanishes(&terms) {
                continue;
            }
            let q = MPoly::from_raw(ring, terms);
            if f.div_exact_raw(&q).is_some() {
                return Ok(Some(q));
            }
        }
    }
    Ok(None)
}

/// Points of `F_p^nv` where `f` does not vanish, with power tables. A divisor
/// of `f` cannot vanish at any of them, which rejects most trial candidates
/// without a division.
struct NonRoots {
    p: u64,
    // powers[k][v][e] = (point k, coordinate v)^e
    powers: Vec<Vec<Vec<u64>>>,
}

impl NonRoots {
    fn new(f: &MPoly, limit: usize) -> Self {
        let ring = f.ring();
        let p = ring.p() as u64;
        let nv = ring.arity() + ring.kind().has_t() as usize;
        let maxdeg: Vec<usize> = (0..nv).map(|v| f.deg_in(v) as usize).collect();
        let table = |pt: &[u64]| -> Vec<Vec<u64>> {
            pt.iter()
                .zip(&maxdeg)
                .map(|(&a, &d)| {
                    let mut row = vec![1u64; d + 1];
                    for e in 1..=d {
                        row[e] = row[e - 1] * a % p;
                    }
                    row
                })
                .collect()
        };
        let total = (p as usize).checked_pow(nv as u32).unwrap_or(usize::MAX);
        let mut out = NonRoots { p, powers: Vec::new() };
        let mut pt = vec![0u64; nv];
        for code in 0..total.min(4096) {
            let mut c = code as u64;
            for x in pt.iter_mut() {
                *x = c % p;
                c /= p;
            }
            let pw = table(&pt);
            if eval(p, &pw, f.raw_terms()) != 0 {
                out.powers.push(pw);
                if out.powers.len() == limit {
                    break;
                }
            }
        }
        out
    }

    fn vanishes(&self, terms: &[(Exp, u32)]) -> bool {
        self.powers.iter().any(|pw| eval(self.p, pw, terms) == 0)
    }
}

fn eval(p: u64, pw: &[Vec<u64>], terms: &[(Exp, u32)]) -> u64 {
    terms.iter().fold(0, |acc, (e, c)| {
        let v = e.iter().zip(pw).fold(*c as u64, |a, (&k, row)| a * row[k as usize] % p);
        (acc + v) % p
    })
}
