//! Sampling checks of the factor conditions and the two-sided equivalence
//! experiment built on them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::irreducible_factors_trial;
use crate::basis::{bounded_monomials, is_p_independent, power_products};
use crate::coeff::KKind;
use crate::error::{Error, Result};
use crate::freudenburg::{coprime_part, shift_to_coprime, witness_search, SearchOutcome, SubringElem, TheoremWitness, WitnessCase};
use crate::frob::{is_squarefree_and_bfree, YPoly};
use crate::jac::{check_tuple, dgcd};
use crate::mpoly::{MPoly, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// `b·f_i + c` has a square factor or a non-unit factor in `B`.
    NotSquarefreeOrBFree,
    /// `b1·f_i + c1` and `b2·f_j + c2` share a non-unit factor.
    NotCoprime,
}

/// A sample violating the factor conditions. Indices are 0-based; `b2`, `c2`
/// and `j` are present for coprimality failures only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cond3Failure {
    pub kind: FailureKind,
    pub i: usize,
    pub j: Option<usize>,
    pub b: MPoly,
    pub c: MPoly,
    pub b2: Option<MPoly>,
    pub c2: Option<MPoly>,
}

impl Cond3Failure {
    /// Re-checks the failure from scratch.
    pub fn holds(&self, fs: &[MPoly]) -> Result<bool> {
        if self.b.is_zero() || !self.b.gcd(&self.c)?.is_unit() {
            return Ok(false);
        }
        let u = &(&self.b * &fs[self.i]) + &self.c;
        match (self.kind, self.j, &self.b2, &self.c2) {
            (FailureKind::NotSquarefreeOrBFree, None, None, None) => Ok(u.is_zero() || !is_squarefree_and_bfree(&u)?),
            (FailureKind::NotCoprime, Some(j), Some(b2), Some(c2)) => {
                if b2.is_zero() || !b2.gcd(c2)?.is_unit() {
                    return Ok(false);
                }
                let v = &(b2 * &fs[j]) + c2;
                Ok(!u.gcd(&v)?.is_unit())
            }
            _ => Err(Error::PreconditionViolated("inconsistent failure record".into())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cond3Report {
    pub seed: u64,
    /// Checks actually performed, probes included.
    pub samples: usize,
    /// Random draws dropped because no coprime shift was found.
    pub skipped: usize,
    pub failures: Vec<Cond3Failure>,
    /// Checks of the form `b = 1`, `c ∈ B` (shifts `f_i + h`).
    pub translate_samples: usize,
    pub translate_failures: usize,
}

/// Random elements of `B[f_k : k ∉ omitted]` with sparse `B`-coefficients.
struct Sampler {
    products: Vec<MPoly>,
    b_monos: Vec<MPoly>,
}

impl Sampler {
    fn new(fs: &[MPoly], omitted: Vec<usize>, bound: u32) -> Self {
        let ring = fs[0].ring();
        let kept: Vec<MPoly> = (0..fs.len()).filter(|k| !omitted.contains(k)).map(|k| fs[k].clone()).collect();
        let products = power_products(ring, &kept);
        let b_monos = bounded_monomials(ring, bound)
            .into_iter()
            .map(|e| YPoly::from_y(MPoly::from_raw(ring, vec![(e, 1)])).to_a())
            .collect();
        Sampler { products, b_monos }
    }

    fn coefficient(&self, rng: &mut ChaCha8Rng, p: u32) -> MPoly {
        let mut u = MPoly::zero(self.products[0].ring());
        for _ in 0..rng.gen_range(1..=2) {
            let mono = self.b_monos.choose(rng).expect("nonempty");
            u = u.add_scaled(mono, rng.gen_range(1..p));
        }
        u
    }

    fn element(&self, rng: &mut ChaCha8Rng, p: u32) -> MPoly {
        let mut acc = MPoly::zero(self.products[0].ring());
        for (k, prod) in self.products.iter().enumerate() {
            let chance = if k == 0 { 0.75 } else { 0.35 };
            if rng.gen_bool(chance) {
                acc = &acc + &(&self.coefficient(rng, p) * prod);
            }
        }
        acc
    }

    fn nonzero(&self, rng: &mut ChaCha8Rng, p: u32) -> MPoly {
        for _ in 0..16 {
            let b = self.element(rng, p);
            if !b.is_zero() {
                return b;
            }
        }
        MPoly::one(self.products[0].ring())
    }

    fn in_b(&self, rng: &mut ChaCha8Rng, p: u32) -> MPoly {
        if rng.gen_bool(0.5) {
            self.coefficient(rng, p)
        } else {
            &self.coefficient(rng, p) + &self.coefficient(rng, p)
        }
    }
}

/// Moves `c` within `c + B` until it is coprime to `b`. Tries `c`, `c + 1`,
/// `c + u^p` with `u` the part of `b` prime to `c`, then a few random `p`-th
/// powers.
fn make_coprime(b: &MPoly, c: &MPoly, sampler: &Sampler, rng: &mut ChaCha8Rng) -> Result<Option<MPoly>> {
    let ring = b.ring();
    let p = ring.p();
    if b.gcd(c)?.is_unit() {
        return Ok(Some(c.clone()));
    }
    let shifted = c + &MPoly::one(ring);
    if b.gcd(&shifted)?.is_unit() {
        return Ok(Some(shifted));
    }
    let shifted = c + &coprime_part(b, c)?.pow(p);
    if b.gcd(&shifted)?.is_unit() {
        return Ok(Some(shifted));
    }
    for _ in 0..4 {
        let shifted = c + &sampler.in_b(rng, p);
        if b.gcd(&shifted)?.is_unit() {
            return Ok(Some(shifted));
        }
    }
    Ok(None)
}

/// Samples the factor conditions on `fs`: for each `i`, `b·f_i + c` with
/// `b, c ∈ R_i`, `b ≠ 0`, `gcd(b, c) ~ 1` must be square-free and `B`-free;
/// for `i ≠ j` the two such elements over `R_ij` must be coprime.
///
/// The probe `(b, c) = (1, 0)` runs first for every `i` and every pair, then
/// `trials` random single draws and (for `m > 1`) `trials` random pair draws.
/// Every third draw is a translate `b = 1`, `c ∈ B`.
pub fn condition3_sample_check(fs: &[MPoly], trials: usize, degree_bound: u32, seed: u64) -> Result<Cond3Report> {
    check_tuple(fs)?;
    let m = fs.len();
    let ring = fs[0].ring();
    let p = ring.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Cond3Report { seed, ..Default::default() };
    let one = MPoly::one(ring);
    let zero = MPoly::zero(ring);

    let single = |i: usize, b: &MPoly, c: &MPoly, translate: bool, report: &mut Cond3Report| -> Result<()> {
        let u = &(b * &fs[i]) + c;
        report.samples += 1;
        report.translate_samples += translate as usize;
        if u.is_zero() || !is_squarefree_and_bfree(&u)? {
            report.translate_failures += translate as usize;
            report.failures.push(Cond3Failure {
                kind: FailureKind::NotSquarefreeOrBFree,
                i,
                j: None,
                b: b.clone(),
                c: c.clone(),
                b2: None,
                c2: None,
            });
        }
        Ok(())
    };
    #[allow(clippy::too_many_arguments)]
    let pair = |i: usize, j: usize, b1: &MPoly, c1: &MPoly, b2: &MPoly, c2: &MPoly, translate: bool, report: &mut Cond3Report| -> Result<()> {
        let u = &(b1 * &fs[i]) + c1;
        let v = &(b2 * &fs[j]) + c2;
        report.samples += 1;
        report.translate_samples += translate as usize;
        if !u.gcd(&v)?.is_unit() {
            report.translate_failures += translate as usize;
            report.failures.push(Cond3Failure {
                kind: FailureKind::NotCoprime,
                i,
                j: Some(j),
                b: b1.clone(),
                c: c1.clone(),
                b2: Some(b2.clone()),
                c2: Some(c2.clone()),
            });
        }
        Ok(())
    };

    for i in 0..m {
        single(i, &one, &zero, true, &mut report)?;
    }
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        pair(i, j, &one, &zero, &one, &zero, true, &mut report)?;
    }

    let samplers: Vec<Sampler> = (0..m).map(|i| Sampler::new(fs, vec![i], degree_bound)).collect();
    for t in 0..trials {
        let i = t % m;
        let s = &samplers[i];
        let translate = t % 3 == 2;
        let (b, c) = if translate { (one.clone(), s.in_b(&mut rng, p)) } else { (s.nonzero(&mut rng, p), s.element(&mut rng, p)) };
        match make_coprime(&b, &c, s, &mut rng)? {
            Some(c) => single(i, &b, &c, translate, &mut report)?,
            None => report.skipped += 1,
        }
    }
    if !pairs.is_empty() {
        let pair_samplers: Vec<Sampler> = pairs.iter().map(|&(i, j)| Sampler::new(fs, vec![i, j], degree_bound)).collect();
        for t in 0..trials {
            let k = t % pairs.len();
            let (i, j) = pairs[k];
            let s = &pair_samplers[k];
            let translate = t % 3 == 2;
            let draw = |rng: &mut ChaCha8Rng| -> Result<Option<(MPoly, MPoly)>> {
                let (b, c) = if translate { (one.clone(), s.in_b(rng, p)) } else { (s.nonzero(rng, p), s.element(rng, p)) };
                Ok(make_coprime(&b, &c, s, rng)?.map(|c| (b, c)))
            };
            match (draw(&mut rng)?, draw(&mut rng)?) {
                (Some((b1, c1)), Some((b2, c2))) => pair(i, j, &b1, &c1, &b2, &c2, translate, &mut report)?,
                _ => report.skipped += 1,
            }
        }
    }
    Ok(report)
}

/// Parameters of [`equivalence_experiment`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentParams {
    pub p: u32,
    pub with_t: bool,
    pub n: usize,
    pub m: usize,
    pub deg: u32,
    pub count: usize,
    pub seed: u64,
    pub trials: usize,
    pub degree_bound: u32,
    pub budget: u64,
    pub sentinels: bool,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            p: 2,
            with_t: false,
            n: 2,
            m: 1,
            deg: 3,
            count: 100,
            seed: 0,
            trials: 50,
            degree_bound: 2,
            budget: 1_000_000,
            sentinels: false,
        }
    }
}

/// Largest parameters accepted by the experiment.
pub const MAX_EXPERIMENT_ARITY: usize = 4;
pub const MAX_EXPERIMENT_DEGREE: u32 = 5;
pub const MAX_EXPERIMENT_COUNT: usize = 100_000;

/// Degree bound used when factoring a non-unit differential gcd.
pub const DGCD_FACTOR_BOUND: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentReport {
    pub index: usize,
    /// `random` or the name of a sentinel.
    pub label: String,
    pub seed: u64,
    pub fs: Vec<MPoly>,
    pub dgcd: MPoly,
    pub dgcd_unit: bool,
    pub independent: bool,
    pub cond3: Cond3Report,
    /// Irreducible factors of a nonzero, non-unit dgcd, when trial division
    /// succeeded.
    pub dgcd_factors: Option<Vec<(MPoly, u32)>>,
    pub witnesses: Vec<TheoremWitness>,
    /// Failures of the factor conditions built from the witnesses.
    pub refutations: Vec<Cond3Failure>,
    /// No witness was found because a bound or budget ran out.
    pub exhausted: bool,
    pub verdict_consistent: bool,
    /// dgcd is not a unit and the tuple is independent, yet every sampled
    /// translate `f_i + h` passed.
    pub candidate_iv: bool,
}

impl ExperimentReport {
    pub fn ring(&self) -> Ring {
        self.fs[0].ring()
    }

    /// Flat, printable form with 1-based indices and polynomials written in
    /// the default variable names.
    pub fn record(&self) -> ExperimentRecord {
        let ring = self.ring();
        let s = |f: &MPoly| f.to_string();
        let elem = |e: &Option<SubringElem>| e.as_ref().map(|e| e.value.to_string());
        ExperimentRecord {
            index: self.index,
            label: self.label.clone(),
            seed: self.seed,
            p: ring.p(),
            coeff: ring.kind().label(),
            n: ring.arity(),
            m: self.fs.len(),
            fs: self.fs.iter().map(s).collect(),
            dgcd: s(&self.dgcd),
            dgcd_unit: self.dgcd_unit,
            independent: self.independent,
            cond3_samples: self.cond3.samples,
            cond3_skipped: self.cond3.skipped,
            cond3_failures: self.cond3.failures.iter().map(FailureRecord::from).collect(),
            translate_samples: self.cond3.translate_samples,
            translate_failures: self.cond3.translate_failures,
            dgcd_factors: self.dgcd_factors.as_ref().map(|f| f.iter().map(|(q, k)| (s(q), *k)).collect()),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessRecord {
                    case: w.case,
                    g: s(&w.g),
                    i: w.i + 1,
                    j: w.j.map(|j| j + 1),
                    b: elem(&w.b),
                    c: elem(&w.c),
                    b1: elem(&w.b1),
                    c1: elem(&w.c1),
                    b2: elem(&w.b2),
                    c2: elem(&w.c2),
                })
                .collect(),
            refutations: self.refutations.iter().map(FailureRecord::from).collect(),
            exhausted: self.exhausted,
            verdict_consistent: self.verdict_consistent,
            candidate_iv: self.candidate_iv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub kind: FailureKind,
    pub i: usize,
    pub j: Option<usize>,
    pub b: String,
    pub c: String,
    pub b2: Option<String>,
    pub c2: Option<String>,
}

impl From<&Cond3Failure> for FailureRecord {
    fn from(f: &Cond3Failure) -> Self {
        FailureRecord {
            kind: f.kind,
            i: f.i + 1,
            j: f.j.map(|j| j + 1),
            b: f.b.to_string(),
            c: f.c.to_string(),
            b2: f.b2.as_ref().map(|x| x.to_string()),
            c2: f.c2.as_ref().map(|x| x.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub case: WitnessCase,
    pub g: String,
    pub i: usize,
    pub j: Option<usize>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub b1: Option<String>,
    pub c1: Option<String>,
    pub b2: Option<String>,
    pub c2: Option<String>,
}

/// One line of the report stream. Field order is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentRecord {
    pub index: usize,
    pub label: String,
    pub seed: u64,
    pub p: u32,
    pub coeff: &'static str,
    pub n: usize,
    pub m: usize,
    pub fs: Vec<String>,
    pub dgcd: String,
    pub dgcd_unit: bool,
    pub independent: bool,
    pub cond3_samples: usize,
    pub cond3_skipped: usize,
    pub cond3_failures: Vec<FailureRecord>,
    pub translate_samples: usize,
    pub translate_failures: usize,
    pub dgcd_factors: Option<Vec<(String, u32)>>,
    pub witnesses: Vec<WitnessRecord>,
    pub refutations: Vec<FailureRecord>,
    pub exhausted: bool,
    pub verdict_consistent: bool,
    pub candidate_iv: bool,
}

impl ExperimentRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

fn random_poly(rng: &mut ChaCha8Rng, ring: Ring, monos: &[crate::mpoly::Exp]) -> MPoly {
    let p = ring.p();
    loop {
        let k = rng.gen_range(1..=4usize);
        let terms = monos.choose_multiple(rng, k.min(monos.len())).map(|e| (e.clone(), rng.gen_range(1..p))).collect();
        let f = MPoly::from_raw(ring, terms);
        if !f.is_constant() {
            return f;
        }
    }
}

/// The identity tuple of the given shape plus a fixed list of non-examples.
pub fn sentinel_suite(kind: KKind, n: usize, m: usize) -> Result<Vec<(String, Vec<MPoly>)>> {
    let ring = Ring::new(kind, n)?;
    let mut out = vec![("identity".to_string(), (0..m).map(|i| MPoly::var(ring, i)).collect::<Result<Vec<_>>>()?)];
    out.extend(curated_suite()?);
    Ok(out)
}

/// Tuples whose differential gcd is not a unit, each with an evident witness.
pub fn curated_suite() -> Result<Vec<(String, Vec<MPoly>)>> {
    let mut out = Vec::new();
    let f3 = Ring::new(KKind::prime_field(3)?, 2)?;
    let (x, y) = (MPoly::var(f3, 0)?, MPoly::var(f3, 1)?);
    out.push(("x^2*y over F3".to_string(), vec![&x.pow(2) * &y]));
    let f2 = Ring::new(KKind::prime_field(2)?, 2)?;
    let (x, y) = (MPoly::var(f2, 0)?, MPoly::var(f2, 1)?);
    out.push(("(x, x*y) over F2".to_string(), vec![x.clone(), &x * &y]));
    let f2t = Ring::new(KKind::poly_over_prime_field(2)?, 1)?;
    let x = MPoly::var(f2t, 0)?;
    out.push(("(x^2 + t)*x over F2[t]".to_string(), vec![&(&x.pow(2) + &MPoly::t(f2t).expect("ring has t")) * &x]));
    for p in [2u32, 3, 5, 7, 11, 13] {
        let r = Ring::new(KKind::prime_field(p)?, 1)?;
        out.push((format!("x^{p} over F{p}"), vec![MPoly::var(r, 0)?.pow(p)]));
    }
    Ok(out)
}

/// Turns a witness into an explicit failure of the factor conditions by
/// shifting each `c` to be coprime with its `b`.
fn refute(fs: &[MPoly], w: &TheoremWitness) -> Result<Cond3Failure> {
    let value = |e: &Option<SubringElem>| e.as_ref().map(|e| e.value.clone()).ok_or(Error::Internal("incomplete witness".into()));
    let failure = match w.case {
        WitnessCase::I | WitnessCase::II => {
            let eps = if w.case == WitnessCase::I { 2 } else { 1 };
            let (b, c) = (value(&w.b)?, value(&w.c)?);
            let c = shift_to_coprime(&fs[w.i], &b, &c, &w.g, eps)?;
            Cond3Failure { kind: FailureKind::NotSquarefreeOrBFree, i: w.i, j: None, b, c, b2: None, c2: None }
        }
        WitnessCase::III => {
            let j = w.j.ok_or(Error::Internal("case III without j".into()))?;
            let (b1, c1, b2, c2) = (value(&w.b1)?, value(&w.c1)?, value(&w.b2)?, value(&w.c2)?);
            let c1 = shift_to_coprime(&fs[w.i], &b1, &c1, &w.g, 1)?;
            let c2 = shift_to_coprime(&fs[j], &b2, &c2, &w.g, 1)?;
            Cond3Failure { kind: FailureKind::NotCoprime, i: w.i, j: Some(j), b: b1, c: c1, b2: Some(b2), c2: Some(c2) }
        }
    };
    if !failure.holds(fs)? {
        return Err(Error::Internal(format!("witness for g = {} does not refute the factor conditions", w.g)));
    }
    Ok(failure)
}

/// Runs the full two-sided check on one tuple.
pub fn analyze_instance(index: usize, label: &str, fs: &[MPoly], params: &ExperimentParams, seed: u64) -> Result<ExperimentReport> {
    let ring = fs[0].ring();
    let d = dgcd(fs)?;
    let dgcd_unit = d.is_unit();
    let independent = is_p_independent(fs)?;
    let cond3 = condition3_sample_check(fs, params.trials, params.degree_bound, seed)?;
    let mut witnesses = Vec::new();
    let mut refutations = Vec::new();
    let mut exhausted = false;
    let mut dgcd_factors = None;
    if !dgcd_unit {
        let candidates: Vec<MPoly> = if d.is_zero() {
            vec![MPoly::var(ring, 0)?]
        } else {
            dgcd_factors = irreducible_factors_trial(&d, DGCD_FACTOR_BOUND)?;
            match &dgcd_factors {
                Some(f) => f.iter().map(|(q, _)| q.clone()).collect(),
                None => {
                    exhausted = true;
                    Vec::new()
                }
            }
        };
        for g in candidates {
            match witness_search(fs, &g, params.degree_bound, params.budget)? {
                SearchOutcome::Found(w) => {
                    refutations.push(refute(fs, &w)?);
                    witnesses.push(*w);
                }
                SearchOutcome::BoundExhausted | SearchOutcome::BudgetExhausted => exhausted = true,
            }
        }
    }
    let verdict_consistent = if dgcd_unit {
        cond3.failures.is_empty()
    } else {
        !refutations.is_empty() || exhausted
    };
    let candidate_iv = !dgcd_unit && independent && cond3.translate_samples > 0 && cond3.translate_failures == 0;
    Ok(ExperimentReport {
        index,
        label: label.to_string(),
        seed,
        fs: fs.to_vec(),
        dgcd: d,
        dgcd_unit,
        independent,
        cond3,
        dgcd_factors,
        witnesses,
        refutations,
        exhausted,
        verdict_consistent,
        candidate_iv,
    })
}

/// Per-instance seed: the run seed mixed with the instance index, so every
/// record can be reproduced on its own.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.gen()
}

/// Generates `count` random tuples (after the sentinels, when requested) and
/// analyzes each one. Reports come back in instance order.
pub fn equivalence_experiment(params: &ExperimentParams) -> Result<Vec<ExperimentReport>> {
    let kind = if params.with_t { KKind::poly_over_prime_field(params.p)? } else { KKind::prime_field(params.p)? };
    if params.m == 0 || params.m > params.n {
        return Err(Error::ArityViolation { m: params.m, n: params.n });
    }
    let checks = [
        ("arity", params.n as u128, MAX_EXPERIMENT_ARITY as u128),
        ("degree", params.deg as u128, MAX_EXPERIMENT_DEGREE as u128),
        ("count", params.count as u128, MAX_EXPERIMENT_COUNT as u128),
    ];
    for (what, size, cap) in checks {
        if size > cap {
            return Err(Error::ScaleExceeded { what, size, cap });
        }
    }
    let ring = Ring::new(kind, params.n)?;
    let monos = bounded_monomials(ring, params.deg);
    let mut tuples: Vec<(String, Vec<MPoly>)> = if params.sentinels { sentinel_suite(kind, params.n, params.m)? } else { Vec::new() };
    let offset = tuples.len();
    for k in 0..params.count {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream((offset + k) as u64);
        tuples.push(("random".to_string(), (0..params.m).map(|_| random_poly(&mut rng, ring, &monos)).collect()));
    }
    tuples
        .iter()
        .enumerate()
        .map(|(index, (label, fs))| analyze_instance(index, label, fs, params, instance_seed(params.seed, index)))
        .collect()
}
