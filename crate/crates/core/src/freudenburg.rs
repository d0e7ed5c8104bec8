//! Witnesses that an irreducible `g` divides the differential gcd, and the
//! coprime shift used to turn a witness into a failure of the factor
//! conditions.
//!
//! For `g | dgcd(f)` with `g` irreducible, one of three things happens:
//!
//! * case I: `g ∉ B` and `g² | b·f_i + c` for some `b, c ∈ R_i`, `g ∤ b`;
//! * case II: `g ∈ B` and `g | b·f_i + c` for some `b, c ∈ R_i`, `g ∤ b`;
//! * case III: `g | b1·f_i + c1` and `g | b2·f_j + c2` with `b1, c1, b2, c2 ∈ R_ij`
//!   and `g ∤ b1, b2`.
//!
//! Here `R_i = B[f_k : k ≠ i]` and `R_ij = B[f_k : k ≠ i, j]`. Conversely each
//! case forces `g | dgcd(f)`, which [`verify_witness`] re-checks.
//!
//! The search is exact within its bounds: for a fixed `i` and bound the
//! admissible `(b, c)` form the kernel of an `F_p`-linear map (the remainder
//! modulo `g^ε`), so a single elimination settles the whole bounded space.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::basis::{bounded_monomials, power_products, to_dense};
use crate::error::{Error, Result};
use crate::frob::{in_b, Omega, YPoly};
use crate::jac::{check_tuple, dgcd};
use crate::mpoly::MPoly;
use crate::oracle::irreducible_factors_trial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WitnessCase {
    I,
    II,
    III,
}

impl fmt::Display for WitnessCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessCase::I => "I",
            WitnessCase::II => "II",
            WitnessCase::III => "III",
        })
    }
}

/// An element of `B[f_k : k ∉ omitted]` with its presentation
/// `Σ_α parts[α](x^p) · Π f_k^{α_k}`, the product running over the kept
/// generators in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubringElem {
    pub omitted: Vec<usize>,
    pub parts: BTreeMap<Vec<u32>, YPoly>,
    pub value: MPoly,
}

impl SubringElem {
    pub fn kept(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|k| !self.omitted.contains(k)).collect()
    }

    /// Builds an element from its presentation.
    pub fn from_parts(fs: &[MPoly], omitted: Vec<usize>, parts: BTreeMap<Vec<u32>, YPoly>) -> Result<Self> {
        let mut e = SubringElem { omitted, parts, value: MPoly::zero(fs[0].ring()) };
        e.value = e.evaluate(fs)?;
        Ok(e)
    }

    /// An element of `B` seen inside the subring.
    pub fn from_b(fs: &[MPoly], omitted: Vec<usize>, b: &MPoly) -> Result<Self> {
        let y = YPoly::from_a(b).ok_or_else(|| Error::PreconditionViolated("element is not in B".into()))?;
        let kept = (0..fs.len()).filter(|k| !omitted.contains(k)).count();
        Self::from_parts(fs, omitted, [(vec![0; kept], y)].into())
    }

    /// Recomputes the value from the presentation.
    pub fn evaluate(&self, fs: &[MPoly]) -> Result<MPoly> {
        let kept = self.kept(fs.len());
        let ring = fs[0].ring();
        let mut acc = MPoly::zero(ring);
        for (alpha, coef) in &self.parts {
            if alpha.len() != kept.len() {
                return Err(Error::MalformedWitness(format!(
                    "exponent vector of length {} for {} kept generators",
                    alpha.len(),
                    kept.len()
                )));
            }
            if coef.as_poly().ring() != ring {
                return Err(Error::RingMismatch);
            }
            let mut term = coef.to_a();
            for (&k, &e) in kept.iter().zip(alpha) {
                term = &term * &fs[k].pow(e);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremWitness {
    pub case: WitnessCase,
    pub g: MPoly,
    /// 0-based generator index.
    pub i: usize,
    /// Second index, case III only.
    pub j: Option<usize>,
    pub b: Option<SubringElem>,
    pub c: Option<SubringElem>,
    pub b1: Option<SubringElem>,
    pub c1: Option<SubringElem>,
    pub b2: Option<SubringElem>,
    pub c2: Option<SubringElem>,
}

fn field<'a>(x: &'a Option<SubringElem>, name: &str) -> Result<&'a SubringElem> {
    x.as_ref().ok_or_else(|| Error::MalformedWitness(format!("missing `{name}`")))
}

/// Checks every condition of the witness by exact division. Malformed
/// witnesses (missing fields, bad indices, presentations from the wrong
/// subring) are errors; well-formed but false ones give `Ok(false)`.
pub fn verify_witness(fs: &[MPoly], w: &TheoremWitness) -> Result<bool> {
    check_tuple(fs)?;
    let m = fs.len();
    let ring = fs[0].ring();
    if w.g.ring() != ring {
        return Err(Error::RingMismatch);
    }
    if w.i >= m {
        return Err(Error::MalformedWitness(format!("index {} out of range", w.i)));
    }
    let elems: Vec<(&SubringElem, Vec<usize>)> = match w.case {
        WitnessCase::I | WitnessCase::II => {
            if w.j.is_some() {
                return Err(Error::MalformedWitness("second index given outside case III".into()));
            }
            vec![(field(&w.b, "b")?, vec![w.i]), (field(&w.c, "c")?, vec![w.i])]
        }
        WitnessCase::III => {
            let j = w.j.ok_or_else(|| Error::MalformedWitness("case III needs a second index".into()))?;
            if j >= m || j == w.i {
                return Err(Error::MalformedWitness(format!("bad second index {j}")));
            }
            let pair = vec![w.i.min(j), w.i.max(j)];
            ["b1", "c1", "b2", "c2"]
                .iter()
                .zip([&w.b1, &w.c1, &w.b2, &w.c2])
                .map(|(name, x)| Ok((field(x, name)?, pair.clone())))
                .collect::<Result<_>>()?
        }
    };
    for (e, omitted) in &elems {
        let mut om = e.omitted.clone();
        om.sort_unstable();
        if &om != omitted {
            return Err(Error::MalformedWitness(format!("element presented over the wrong subring (omits {om:?})")));
        }
        if e.evaluate(fs)? != e.value {
            return Ok(false);
        }
    }
    let g = &w.g;
    if g.is_zero() || g.is_unit() {
        return Ok(false);
    }
    match crate::oracle::is_irreducible_trial(g, g.full_degree().unwrap_or(0)) {
        Some(true) => {}
        Some(false) => return Ok(false),
        None => return Err(Error::MalformedWitness("irreducibility of g could not be certified".into())),
    }
    let valid = match w.case {
        WitnessCase::I | WitnessCase::II => {
            let (b, c) = (&elems[0].0.value, &elems[1].0.value);
            let target = &(b * &fs[w.i]) + c;
            let g_in_b = in_b(g);
            !b.divisible_by(g)
                && match w.case {
                    WitnessCase::I => !g_in_b && target.divisible_by(&g.pow(2)),
                    _ => g_in_b && target.divisible_by(g),
                }
        }
        WitnessCase::III => {
            let j = w.j.expect("checked above");
            let v: Vec<&MPoly> = elems.iter().map(|(e, _)| &e.value).collect();
            !v[0].divisible_by(g)
                && !v[2].divisible_by(g)
                && (&(v[0] * &fs[w.i]) + v[1]).divisible_by(g)
                && (&(v[2] * &fs[j]) + v[3]).divisible_by(g)
        }
    };
    if valid && !dgcd(fs)?.divisible_by(g) {
        return Err(Error::Internal(format!("a valid witness for g = {g} but g does not divide dgcd")));
    }
    Ok(valid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Box<TheoremWitness>),
    /// Every candidate within the degree bound was ruled out.
    BoundExhausted,
    /// The work budget ran out before the bounded space was covered.
    BudgetExhausted,
}

/// Spanning set of `B[f_k : k ∉ omitted]` truncated by degree: `y^γ t^k`
/// with degree at most `bound`, times `f^α` for `α ∈ Ω` over the kept
/// generators.
struct Span {
    kept_len: usize,
    /// (alpha index, monomial) per column.
    labels: Vec<(usize, crate::mpoly::Exp)>,
    values: Vec<MPoly>,
    omega: Omega,
}

fn span(fs: &[MPoly], omitted: &[usize], bound: u32) -> Span {
    let ring = fs[0].ring();
    let kept: Vec<MPoly> = (0..fs.len()).filter(|k| !omitted.contains(k)).map(|k| fs[k].clone()).collect();
    let omega = Omega::new(kept.len(), ring.p());
    let products = power_products(ring, &kept);
    let monos = bounded_monomials(ring, bound);
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (a, prod) in products.iter().enumerate() {
        for mono in &monos {
            let b = YPoly::from_y(MPoly::from_raw(ring, vec![(mono.clone(), 1)])).to_a();
            labels.push((a, mono.clone()));
            values.push(&b * prod);
        }
    }
    Span { kept_len: kept.len(), labels, values, omega }
}

impl Span {
    fn element(&self, fs: &[MPoly], omitted: &[usize], coeffs: &[u32]) -> Result<SubringElem> {
        let ring = fs[0].ring();
        let mut parts: BTreeMap<Vec<u32>, MPoly> = BTreeMap::new();
        for ((a, mono), &c) in self.labels.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let slot = parts.entry(self.omega.element(*a)).or_insert_with(|| MPoly::zero(ring));
            *slot = &*slot + &MPoly::from_raw(ring, vec![(mono.clone(), c)]);
        }
        debug_assert!(parts.keys().all(|k| k.len() == self.kept_len));
        let parts = parts.into_iter().map(|(k, v)| (k, YPoly::from_y(v))).collect();
        SubringElem::from_parts(fs, omitted.to_vec(), parts)
    }
}

/// Solves `g^ε | b·f_i + c` over the bounded span of `R_omitted`, returning
/// the first kernel vector (unknowns ordered `c` then `b`) with `g ∤ b`.
fn solve_pair(
    fs: &[MPoly],
    i: usize,
    omitted: &[usize],
    modulus: &MPoly,
    g: &MPoly,
    bound: u32,
    spent: &mut u64,
    budget: u64,
) -> Result<Option<Option<(SubringElem, SubringElem)>>> {
    let p = fs[0].ring().p();
    let sp = span(fs, omitted, bound);
    let k = sp.values.len();
    let mut images: Vec<MPoly> = sp.values.iter().map(|v| v.normal_form(modulus)).collect();
    images.extend(sp.values.iter().map(|v| (v * &fs[i]).normal_form(modulus)));
    let (rows, ncols) = to_dense(&images);
    *spent = spent.saturating_add((rows.len() as u64 + 1) * ncols as u64);
    if *spent > budget {
        return Ok(None);
    }
    let b_residues: Vec<MPoly> = sp.values.iter().map(|v| v.normal_form(g)).collect();
    for v in crate::linalg::kernel(rows, ncols, p) {
        let mut residue = MPoly::zero(fs[0].ring());
        for (c, r) in v[k..].iter().zip(&b_residues) {
            if *c != 0 {
                residue = residue.add_scaled(r, *c);
            }
        }
        if residue.is_zero() {
            continue;
        }
        let c = sp.element(fs, omitted, &v[..k])?;
        let b = sp.element(fs, omitted, &v[k..])?;
        return Ok(Some(Some((b, c))));
    }
    Ok(Some(None))
}

/// Checks that `g` is a certified irreducible divisor of `dgcd(fs)`.
fn check_g(fs: &[MPoly], g: &MPoly) -> Result<()> {
    if g.ring() != fs[0].ring() {
        return Err(Error::RingMismatch);
    }
    if g.is_zero() || g.is_unit() {
        return Err(Error::NotIrreducible("g is zero or a unit".into()));
    }
    match irreducible_factors_trial(g, g.full_degree().unwrap_or(0))? {
        Some(fac) if fac.len() == 1 && fac[0].1 == 1 => {}
        Some(fac) => {
            let shown: Vec<String> = fac.iter().map(|(q, k)| format!("({q})^{k}")).collect();
            return Err(Error::NotIrreducible(format!("g factors as {}", shown.join(" * "))));
        }
        None => return Err(Error::NotIrreducible("irreducibility could not be certified".into())),
    }
    if !dgcd(fs)?.divisible_by(g) {
        return Err(Error::NotADivisorOfDgcd);
    }
    Ok(())
}

/// Searches cases I, II, III in that order (indices ascending) for a witness
/// whose subring elements have `B`-coefficients of degree at most
/// `r_degree_bound`. `budget` caps the total size of the linear systems.
pub fn witness_search(fs: &[MPoly], g: &MPoly, r_degree_bound: u32, budget: u64) -> Result<SearchOutcome> {
    check_tuple(fs)?;
    check_g(fs, g)?;
    let m = fs.len();
    let mut spent = 0u64;
    let g_in_b = in_b(g);
    let (case, modulus) = if g_in_b { (WitnessCase::II, g.clone()) } else { (WitnessCase::I, g.pow(2)) };
    for i in 0..m {
        match solve_pair(fs, i, &[i], &modulus, g, r_degree_bound, &mut spent, budget)? {
            None => return Ok(SearchOutcome::BudgetExhausted),
            Some(None) => {}
            Some(Some((b, c))) => {
                let w = TheoremWitness { case, g: g.clone(), i, j: None, b: Some(b), c: Some(c), b1: None, c1: None, b2: None, c2: None };
                return finish(fs, w);
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let first = match solve_pair(fs, i, &[i, j], g, g, r_degree_bound, &mut spent, budget)? {
                None => return Ok(SearchOutcome::BudgetExhausted),
                Some(None) => continue,
                Some(Some(x)) => x,
            };
            let second = match solve_pair(fs, j, &[i, j], g, g, r_degree_bound, &mut spent, budget)? {
                None => return Ok(SearchOutcome::BudgetExhausted),
                Some(None) => continue,
                Some(Some(x)) => x,
            };
            let w = TheoremWitness {
                case: WitnessCase::III,
                g: g.clone(),
                i,
                j: Some(j),
                b: None,
                c: None,
                b1: Some(first.0),
                c1: Some(first.1),
                b2: Some(second.0),
                c2: Some(second.1),
            };
            return finish(fs, w);
        }
    }
    Ok(SearchOutcome::BoundExhausted)
}

fn finish(fs: &[MPoly], w: TheoremWitness) -> Result<SearchOutcome> {
    if !verify_witness(fs, &w)? {
        return Err(Error::Internal("search produced a witness that does not verify".into()));
    }
    Ok(SearchOutcome::Found(Box::new(w)))
}

/// The part of `b` made of the irreducible factors that do not divide `c`,
/// with their multiplicities. Found by stripping `gcd(b, c)` repeatedly, so
/// no factorization is needed.
pub fn coprime_part(b: &MPoly, c: &MPoly) -> Result<MPoly> {
    let mut u = b.clone();
    loop {
        let d = u.gcd(c)?;
        if d.is_unit() {
            return Ok(u);
        }
        u = u.exact_div(&d)?.ok_or_else(|| Error::Internal("gcd does not divide".into()))?;
    }
}

/// Given `g^ε | b·f + c` with `g` irreducible and `g ∤ b`, returns
/// `c' = c + g^p·u^p` where `u` collects the factors of `b` not dividing `c`.
/// Then `g^ε | b·f + c'` and `gcd(b, c') ~ 1`. Since the shift is a `p`-th
/// power it lies in `B`, so `c'` stays in any subring containing `B` that
/// held `c`.
pub fn shift_to_coprime(f: &MPoly, b: &MPoly, c: &MPoly, g: &MPoly, eps: u32) -> Result<MPoly> {
    let ring = f.ring();
    if [b, c, g].iter().any(|x| x.ring() != ring) {
        return Err(Error::RingMismatch);
    }
    if !(1..=2).contains(&eps) {
        return Err(Error::PreconditionViolated(format!("ε must be 1 or 2, got {eps}")));
    }
    if g.is_zero() || g.is_unit() {
        return Err(Error::PreconditionViolated("g must be a non-unit".into()));
    }
    if b.divisible_by(g) {
        return Err(Error::PreconditionViolated("g divides b".into()));
    }
    let ge = g.pow(eps);
    if !(&(b * f) + c).divisible_by(&ge) {
        return Err(Error::PreconditionViolated("g^ε does not divide b·f + c".into()));
    }
    let p = ring.p();
    let h = (g * &coprime_part(b, c)?).pow(p);
    let c2 = c + &h;
    if !(&(b * f) + &c2).divisible_by(&ge) || !b.gcd(&c2)?.is_unit() {
        return Err(Error::Internal("coprime shift failed its postconditions".into()));
    }
    Ok(c2)
}

/// A ring-agnostic helper for building case I/II witnesses by hand.
pub fn single_witness(fs: &[MPoly], case: WitnessCase, g: MPoly, i: usize, b: &MPoly, c: &MPoly) -> Result<TheoremWitness> {
    Ok(TheoremWitness {
        case,
        g,
        i,
        j: None,
        b: Some(SubringElem::from_b(fs, vec![i], b)?),
        c: Some(SubringElem::from_b(fs, vec![i], c)?),
        b1: None,
        c1: None,
        b2: None,
        c2: None,
    })
}
