//! p-independence, decomposition over `B[f1..fm]` and its fraction field, and
//! the p-basis verdict.
//!
//! Everything here is phrased through the structure matrix: row `β ∈ Ω_n`,
//! column `α ∈ Ω_m`, entry the `β`-component of `f^α`. A tuple is
//! p-independent iff that matrix has full column rank over `Frac(K[y])`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::frob::{b_decompose, in_b, Omega, YPoly};
use crate::jac::{check_tuple, jacobian_matrix, jacobian_report, MinorCache};
use crate::linalg::ExtField;
use crate::mpoly::{gcd_raw, MPoly, Ring};

/// Largest `p^n` for which the structure matrix is built.
pub const MAX_STRUCTURE_ROWS: u128 = 1 << 15;

/// The matrix of `B`-components of the products `f^α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureMatrix {
    ring: Ring,
    m: usize,
    /// `entries[row][col]`, rows indexed by `Ω_n`, columns by `Ω_m`.
    entries: Vec<Vec<YPoly>>,
}

impl StructureMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn entry(&self, beta: &[u32], alpha: &[u32]) -> &YPoly {
        let p = self.ring.p();
        &self.entries[Omega::new(self.ring.arity(), p).index_of(beta)][Omega::new(self.m, p).index_of(alpha)]
    }

    pub fn entries(&self) -> &[Vec<YPoly>] {
        &self.entries
    }

    /// Rank over the fraction field of `K[y]`.
    pub fn rank(&self) -> Result<usize> {
        Ok(structure_rank(self)?.0)
    }
}

fn scale_guard(ring: Ring) -> Result<()> {
    let size = (ring.p() as u128).pow(ring.arity() as u32);
    if size > MAX_STRUCTURE_ROWS {
        return Err(Error::ScaleExceeded { what: "p^n", size, cap: MAX_STRUCTURE_ROWS });
    }
    Ok(())
}

/// `f^α` for every `α ∈ Ω_m`, in the order of [`Omega`].
pub(crate) fn power_products(ring: Ring, fs: &[MPoly]) -> Vec<MPoly> {
    let omega = Omega::new(fs.len(), ring.p());
    let mut table: Vec<MPoly> = Vec::with_capacity(omega.len());
    for (k, alpha) in omega.iter().enumerate() {
        match alpha.iter().rposition(|&a| a > 0) {
            None => table.push(MPoly::one(ring)),
            Some(j) => {
                let mut prev = alpha.clone();
                prev[j] -= 1;
                let q = &table[omega.index_of(&prev)] * &fs[j];
                debug_assert_eq!(table.len(), k);
                table.push(q);
            }
        }
    }
    table
}

pub fn structure_matrix(ring: Ring, fs: &[MPoly]) -> Result<StructureMatrix> {
    if fs.len() > ring.arity() {
        return Err(Error::ArityViolation { m: fs.len(), n: ring.arity() });
    }
    if fs.iter().any(|f| f.ring() != ring) {
        return Err(Error::RingMismatch);
    }
    scale_guard(ring)?;
    let rows_omega = Omega::new(ring.arity(), ring.p());
    let products = power_products(ring, fs);
    let mut entries = vec![vec![YPoly::zero(ring); products.len()]; rows_omega.len()];
    for (col, prod) in products.iter().enumerate() {
        for (beta, comp) in b_decompose(prod).components() {
            entries[rows_omega.index_of(beta)][col] = comp.clone();
        }
    }
    Ok(StructureMatrix { ring, m: fs.len(), entries })
}

/// How independence was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependenceMethod {
    /// Full rank after evaluation at a random point of a large extension field.
    EvaluationCertificate,
    /// Fraction-free elimination over `K[y]`.
    ExactElimination,
    /// Derivations `D_j` with `D_j(f_k) = δ_jk`, available when the square
    /// jacobian has a unit determinant.
    DualDerivations,
}

/// Rank of the structure matrix over `Frac(K[y])`, with the method used.
pub(crate) fn structure_rank(sm: &StructureMatrix) -> Result<(usize, IndependenceMethod)> {
    let target = sm.cols();
    if evaluation_rank(sm) == target {
        return Ok((target, IndependenceMethod::EvaluationCertificate));
    }
    let mut rows: Vec<Vec<MPoly>> = sm.entries.iter().map(|r| r.iter().map(|e| e.as_poly().clone()).collect()).collect();
    let pivots = bareiss(&mut rows, target)?;
    Ok((pivots.len(), IndependenceMethod::ExactElimination))
}

fn evaluation_rank(sm: &StructureMatrix) -> usize {
    let field = ExtField::for_prime(sm.ring.p());
    let nv = sm.ring.arity() + sm.ring.kind().has_t() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e_ed0f_7a11);
    let mut best = 0;
    for _ in 0..2 {
        let point: Vec<Vec<u32>> = (0..nv)
            .map(|_| field.from_digits((0..field.degree()).map(|_| rng.gen_range(0..sm.ring.p())).collect()))
            .collect();
        let mut powers = HashMap::new();
        let rows = sm.entries.iter().map(|r| r.iter().map(|e| field.eval(e.as_poly(), &point, &mut powers)).collect()).collect();
        best = best.max(field.rank(rows));
        if best == sm.cols() {
            break;
        }
    }
    best
}

/// Fraction-free elimination on the first `elim_cols` columns; later columns
/// are carried along. Returns the pivot positions `(row, col)`; pivot rows end
/// up at the top in order.
fn bareiss(rows: &mut [Vec<MPoly>], elim_cols: usize) -> Result<Vec<(usize, usize)>> {
    let mut pivots = Vec::new();
    let Some(ring) = rows.first().and_then(|r| r.first()).map(|e| e.ring()) else {
        return Ok(pivots);
    };
    let width = rows[0].len();
    let mut prev = MPoly::one(ring);
    let mut r = 0;
    for c in 0..elim_cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[c];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..width {
                let num = &(piv * &row[j]) - &(&lead * &pivot_row[j]);
                row[j] = if prev.is_one() || num.is_zero() {
                    num
                } else {
                    num.div_exact_raw(&prev).ok_or_else(|| Error::Internal("inexact division in elimination".into()))?
                };
            }
            row[c] = MPoly::zero(ring);
        }
        prev = piv.clone();
        pivots.push((r, c));
        r += 1;
    }
    Ok(pivots)
}

pub fn is_p_independent(fs: &[MPoly]) -> Result<bool> {
    let Some(first) = fs.first() else {
        return Ok(true);
    };
    Ok(independence(first.ring(), fs)?.0)
}

fn independence(ring: Ring, fs: &[MPoly]) -> Result<(bool, IndependenceMethod)> {
    if fs.len() == ring.arity() && dual_derivations(fs)?.is_some() {
        return Ok((true, IndependenceMethod::DualDerivations));
    }
    let sm = structure_matrix(ring, fs)?;
    let (rank, method) = structure_rank(&sm)?;
    Ok((rank == sm.cols(), method))
}

/// When `m = n` and the jacobian determinant is a unit, the derivations
/// `D_j = Σ_k (J^{-1})_{kj} ∂_k` satisfy `D_j(f_k) = δ_jk` (checked).
fn dual_derivations(fs: &[MPoly]) -> Result<Option<Vec<Derivation>>> {
    let ring = fs[0].ring();
    let n = ring.arity();
    let j = jacobian_matrix(fs)?;
    let det = MinorCache::new(&j, (0..n).collect()).det(&(0..n).collect::<Vec<_>>());
    if !det.is_unit() {
        return Ok(None);
    }
    let det_inv = crate::coeff::fp::inv(det.raw_terms()[0].1, ring.p());
    let mut ds = Vec::with_capacity(n);
    for col in 0..n {
        // (J^{-1})_{k,col} = (-1)^{k+col} M_{col,k} / det, with M_{col,k} the
        // minor deleting row `col` and column `k`.
        let rows: Vec<usize> = (0..n).filter(|&r| r != col).collect();
        let mut cache = MinorCache::new(&j, rows);
        let coeffs = (0..n)
            .map(|k| {
                let cols: Vec<usize> = (0..n).filter(|&c| c != k).collect();
                let mut v = cache.det(&cols).scale(det_inv);
                if (k + col) % 2 == 1 {
                    v = -&v;
                }
                v
            })
            .collect();
        ds.push(Derivation::new(ring, coeffs)?);
    }
    for (a, d) in ds.iter().enumerate() {
        for (b, f) in fs.iter().enumerate() {
            let v = d.apply(f)?;
            let ok = if a == b { v.is_one() } else { v.is_zero() };
            if !ok {
                return Err(Error::Internal("dual derivations are not dual".into()));
            }
        }
    }
    Ok(Some(ds))
}

/// A reduced fraction of elements of `K[y]` with normalized denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: YPoly,
    pub den: YPoly,
}

#[derive(Clone)]
struct Frac {
    num: MPoly,
    den: MPoly,
}

impl Frac {
    fn new(num: MPoly, den: MPoly) -> Frac {
        if num.is_zero() {
            return Frac { den: MPoly::one(num.ring()), num };
        }
        let g = gcd_raw(&num, &den);
        let (mut num, mut den) = if g.is_unit() {
            (num, den)
        } else {
            (num.div_exact_raw(&g).expect("gcd divides"), den.div_exact_raw(&g).expect("gcd divides"))
        };
        let lead = den.raw_terms()[0].1;
        if lead != 1 {
            let inv = crate::coeff::fp::inv(lead, den.ring().p());
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Frac { num, den }
    }

    fn sub_mul(&self, coef: &MPoly, other: &Frac) -> Frac {
        // self - coef * other
        let num = &(&self.num * &other.den) - &(&(coef * &other.num) * &self.den);
        Frac::new(num, &self.den * &other.den)
    }

    fn div_poly(&self, d: &MPoly) -> Frac {
        Frac::new(self.num.clone(), &self.den * d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecomposeVerdict {
    NotInFractionSpan,
    /// Coefficients keyed by `α`; at least one has a non-unit denominator.
    InFractionSpan(BTreeMap<Vec<u32>, Fraction>),
    /// Coefficients in `K[y]` keyed by `α`, omitting zeros.
    InPolynomialSpan(BTreeMap<Vec<u32>, YPoly>),
}

/// Writes `a = Σ c_α f^α` with `c_α` in `Frac(K[y])` when possible.
pub fn decompose_over_fraction_span(a: &MPoly, fs: &[MPoly]) -> Result<DecomposeVerdict> {
    let ring = a.ring();
    if fs.len() > ring.arity() {
        return Err(Error::ArityViolation { m: fs.len(), n: ring.arity() });
    }
    if fs.iter().any(|f| f.ring() != ring) {
        return Err(Error::RingMismatch);
    }
    if fs.is_empty() {
        return Ok(match YPoly::from_a(a) {
            Some(y) => polynomial_span(vec![(Vec::new(), y)]),
            None => DecomposeVerdict::NotInFractionSpan,
        });
    }
    if fs.len() == ring.arity() {
        if let Some(ds) = dual_derivations(fs)? {
            return Ok(decompose_by_derivations(a, fs, &ds));
        }
    }
    let sm = structure_matrix(ring, fs)?;
    let cols = sm.cols();
    let target = b_decompose(a);
    let rows_omega = Omega::new(ring.arity(), ring.p());
    let mut rows: Vec<Vec<MPoly>> = sm
        .entries
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut row: Vec<MPoly> = r.iter().map(|e| e.as_poly().clone()).collect();
            row.push(target.get(&rows_omega.element(k)).into_poly());
            row
        })
        .collect();
    if structure_rank(&sm)?.0 < cols {
        return Err(Error::DependentGenerators);
    }
    let pivots = bareiss(&mut rows, cols)?;
    if pivots.len() < cols {
        return Err(Error::Internal("rank dropped during elimination".into()));
    }
    if rows[cols..].iter().any(|r| !r[cols].is_zero()) {
        return Ok(DecomposeVerdict::NotInFractionSpan);
    }
    let mut sol: Vec<Frac> = vec![Frac::new(MPoly::zero(ring), MPoly::one(ring)); cols];
    for k in (0..cols).rev() {
        let mut acc = Frac::new(rows[k][cols].clone(), MPoly::one(ring));
        for j in k + 1..cols {
            if !rows[k][j].is_zero() && !sol[j].num.is_zero() {
                acc = acc.sub_mul(&rows[k][j], &sol[j]);
            }
        }
        sol[k] = acc.div_poly(&rows[k][k]);
    }
    let omega = Omega::new(fs.len(), ring.p());
    if sol.iter().all(|f| f.den.is_one()) {
        let map = sol
            .into_iter()
            .enumerate()
            .filter(|(_, f)| !f.num.is_zero())
            .map(|(k, f)| (omega.element(k), YPoly::from_y(f.num)))
            .collect();
        Ok(DecomposeVerdict::InPolynomialSpan(map))
    } else {
        let map = sol
            .into_iter()
            .enumerate()
            .filter(|(_, f)| !f.num.is_zero())
            .map(|(k, f)| (omega.element(k), Fraction { num: YPoly::from_y(f.num), den: YPoly::from_y(f.den) }))
            .collect();
        Ok(DecomposeVerdict::InFractionSpan(map))
    }
}

fn polynomial_span(items: Vec<(Vec<u32>, YPoly)>) -> DecomposeVerdict {
    DecomposeVerdict::InPolynomialSpan(items.into_iter().filter(|(_, y)| !y.is_zero()).collect())
}

fn factorial(k: u32) -> u32 {
    (1..=k).product()
}

/// Decomposition when dual derivations exist: `D^α` applied to
/// `a = Σ c_α' f^α'` extracts the coefficients from the top down.
fn decompose_by_derivations(a: &MPoly, fs: &[MPoly], ds: &[Derivation]) -> DecomposeVerdict {
    let ring = a.ring();
    let p = ring.p();
    let omega = Omega::new(fs.len(), p);
    let products = power_products(ring, fs);
    let mut coeffs: Vec<Option<MPoly>> = vec![None; omega.len()];
    for idx in (0..omega.len()).rev() {
        let alpha = omega.element(idx);
        let mut v = a.clone();
        for (d, &k) in ds.iter().zip(&alpha) {
            for _ in 0..k {
                v = d.apply(&v).expect("same ring");
            }
        }
        for later in idx + 1..omega.len() {
            let Some(c) = &coeffs[later] else { continue };
            let beta = omega.element(later);
            if beta.iter().zip(&alpha).any(|(b, a)| b < a) {
                continue;
            }
            let diff: Vec<u32> = beta.iter().zip(&alpha).map(|(b, a)| b - a).collect();
            let falling: u32 = beta.iter().zip(&diff).map(|(&b, &d)| factorial(b) / factorial(d)).product();
            let term = (c * &products[omega.index_of(&diff)]).scale(falling % p);
            v = &v - &term;
        }
        let alpha_fact = alpha.iter().map(|&k| factorial(k) % p).fold(1, |acc, f| acc * f % p);
        let c = v.scale(crate::coeff::fp::inv(alpha_fact, p));
        if !c.is_zero() {
            coeffs[idx] = Some(c);
        }
    }
    let mut recomposed = MPoly::zero(ring);
    let mut out = BTreeMap::new();
    for (idx, c) in coeffs.into_iter().enumerate() {
        let Some(c) = c else { continue };
        let Some(y) = YPoly::from_a(&c) else {
            // Coefficients outside B cannot happen when a ∈ A; a defensive
            // fallback keeps the verdict honest.
            return DecomposeVerdict::NotInFractionSpan;
        };
        recomposed = &recomposed + &(&c * &products[idx]);
        out.insert(omega.element(idx), y);
    }
    debug_assert_eq!(&recomposed, a);
    if &recomposed != a {
        return DecomposeVerdict::NotInFractionSpan;
    }
    DecomposeVerdict::InPolynomialSpan(out)
}

/// Evidence accompanying a p-basis verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PBasisNotes {
    /// Column sets whose minor is a unit.
    pub unit_minors: Vec<Vec<usize>>,
    /// Number of nonzero minors.
    pub nonzero_minors: usize,
    /// For `m = n`: whether the jacobian determinant lies in `K \ {0}`.
    pub determinant_in_k: Option<bool>,
    pub independence_method: IndependenceMethod,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PBasisVerdict {
    pub independent: bool,
    pub dgcd_value: MPoly,
    pub is_p_basis: bool,
    pub notes: PBasisNotes,
}

pub fn is_p_basis_of_constants(fs: &[MPoly]) -> Result<PBasisVerdict> {
    check_tuple(fs)?;
    let ring = fs[0].ring();
    let report = jacobian_report(fs)?;
    let (independent, independence_method) = independence(ring, fs)?;
    let unit_minors = report.minors.iter().filter(|(_, d)| d.is_unit()).map(|(c, _)| c.clone()).collect();
    let nonzero_minors = report.minors.iter().filter(|(_, d)| !d.is_zero()).count();
    let determinant_in_k = (fs.len() == ring.arity()).then(|| {
        let d = &report.minors[0].1;
        !d.is_zero() && d.total_degree() == Some(0)
    });
    let is_p_basis = report.dgcd.is_unit();
    Ok(PBasisVerdict {
        independent,
        dgcd_value: report.dgcd,
        is_p_basis,
        notes: PBasisNotes { unit_minors, nonzero_minors, determinant_in_k, independence_method },
    })
}

/// A certified failure of the divisibility criterion: `b` divides
/// `Σ a_α f^α` while not dividing every `a_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Violation {
    pub b: YPoly,
    pub coeffs: BTreeMap<Vec<u32>, YPoly>,
}

impl Lemma2Violation {
    /// Re-checks the violation from scratch.
    pub fn verify(&self, fs: &[MPoly]) -> bool {
        let b = self.b.to_a();
        if b.is_zero() || b.is_unit() {
            return false;
        }
        let ring = b.ring();
        let products = power_products(ring, fs);
        let omega = Omega::new(fs.len(), ring.p());
        let mut sum = MPoly::zero(ring);
        let mut some_not_divisible = false;
        for (alpha, a) in &self.coeffs {
            let a = a.to_a();
            some_not_divisible |= !a.divisible_by(&b);
            sum = &sum + &(&a * &products[omega.index_of(alpha)]);
        }
        some_not_divisible && sum.divisible_by(&b)
    }
}

/// Monomials `y^γ t^k` of total degree at most `bound` (the `t`-exponent
/// counts towards the degree), as internal exponent vectors.
pub(crate) fn bounded_monomials(ring: Ring, bound: u32) -> Vec<crate::mpoly::Exp> {
    let nv = ring.arity() + ring.kind().has_t() as usize;
    let mut out = Vec::new();
    let mut cur = crate::mpoly::Exp::from_elem(0, nv);
    fn go(v: usize, left: u32, cur: &mut crate::mpoly::Exp, out: &mut Vec<crate::mpoly::Exp>) {
        if v == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[v] = k;
            go(v + 1, left - k, cur, out);
        }
        cur[v] = 0;
    }
    go(0, bound, &mut cur, &mut out);
    out.sort_by(|a, b| crate::mpoly::cmp_exp(a, b, ring.arity()));
    out
}

/// Monic non-units of `K[y]` of degree at most `bound` that are irreducible,
/// in increasing degree. Reducible candidates are skipped because the
/// criterion holds for all `b` once it holds for irreducible ones.
fn irreducible_b_candidates(ring: Ring, bound: u32, cap: usize) -> Vec<MPoly> {
    let monos = bounded_monomials(ring, bound);
    let p = ring.p();
    let mut found: Vec<MPoly> = Vec::new();
    for lead in 1..monos.len() {
        // Polynomials whose leading monomial is monos[lead]: coefficient 1 there,
        // free coefficients on all smaller monomials.
        let lower = lead;
        let count = (p as u64).checked_pow(lower as u32).unwrap_or(u64::MAX);
        if count > cap as u64 {
            break;
        }
        for code in 0..count {
            let mut terms = vec![(monos[lead].clone(), 1)];
            let mut c = code;
            for mono in monos.iter().take(lower) {
                let v = (c % p as u64) as u32;
                c /= p as u64;
                if v != 0 {
                    terms.push((mono.clone(), v));
                }
            }
            let cand = MPoly::from_raw(ring, terms);
            if found.iter().any(|q| q.full_degree() < cand.full_degree() && cand.divisible_by(q)) {
                continue;
            }
            if cand.is_unit() {
                continue;
            }
            found.push(cand);
            if found.len() >= cap {
                return found;
            }
        }
    }
    found.sort_by_key(|q| q.full_degree());
    found
}

/// Searches for a `b ∈ B` and `a_α ∈ B` of bounded degree with
/// `b | Σ a_α f^α` and `b ∤ a_α` for some `α`. The space of admissible
/// `a_α` for a fixed `b` is the kernel of an `F_p`-linear map (the remainder
/// modulo `b`), so each `b` is settled exactly. `budget` bounds the total
/// size of the linear systems.
pub fn lemma2_refuter(fs: &[MPoly], degree_bound: u32, budget: u64) -> Result<Option<Lemma2Violation>> {
    check_tuple(fs)?;
    let ring = fs[0].ring();
    if !is_p_independent(fs)? {
        return Err(Error::DependentGenerators);
    }
    let p = ring.p();
    let omega = Omega::new(fs.len(), p);
    let products = power_products(ring, fs);
    let monos = bounded_monomials(ring, degree_bound);
    let unknowns: Vec<(usize, MPoly)> = (0..omega.len())
        .flat_map(|a| monos.iter().map(move |m| (a, m.clone())))
        .map(|(a, m)| (a, YPoly::from_y(MPoly::from_raw(ring, vec![(m, 1)])).to_a()))
        .collect();
    let mut spent: u64 = 0;
    for b_y in irreducible_b_candidates(ring, degree_bound, 1 << 16) {
        let b = YPoly::from_y(b_y.clone()).to_a();
        let images: Vec<MPoly> = unknowns.iter().map(|(a, mono)| (mono * &products[*a]).normal_form(&b)).collect();
        let (rows, ncols) = to_dense(&images);
        spent += (rows.len() as u64 + 1) * ncols as u64;
        if spent > budget {
            return Ok(None);
        }
        for v in crate::linalg::kernel(rows, ncols, p) {
            let mut coeffs = BTreeMap::new();
            let mut bad = false;
            for (k, alpha_idx) in (0..omega.len()).enumerate() {
                let mut a = MPoly::zero(ring);
                for (j, mono) in monos.iter().enumerate() {
                    let c = v[k * monos.len() + j];
                    if c != 0 {
                        a = &a + &MPoly::from_raw(ring, vec![(mono.clone(), c)]);
                    }
                }
                if !a.is_zero() {
                    bad |= !a.divisible_by(&b_y);
                    coeffs.insert(omega.element(alpha_idx), YPoly::from_y(a));
                }
            }
            if bad {
                let w = Lemma2Violation { b: YPoly::from_y(b_y), coeffs };
                debug_assert!(w.verify(fs));
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Columns given as polynomials; rows indexed by the monomials occurring.
pub(crate) fn to_dense(cols: &[MPoly]) -> (Vec<Vec<u32>>, usize) {
    let mut index: HashMap<crate::mpoly::Exp, usize> = HashMap::new();
    for c in cols {
        for (e, _) in c.raw_terms() {
            let len = index.len();
            index.entry(e.clone()).or_insert(len);
        }
    }
    let mut rows = vec![vec![0u32; cols.len()]; index.len()];
    for (j, c) in cols.iter().enumerate() {
        for (e, v) in c.raw_terms() {
            rows[index[e]][j] = *v;
        }
    }
    (rows, cols.len())
}

/// True iff `f` lies in `B`; re-exported here for the `C_B` checks.
pub fn in_frobenius_subring(f: &MPoly) -> bool {
    in_b(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::KKind;
    use crate::expr::PolyContext;

    fn ctx(p: u32, n: usize) -> PolyContext {
        PolyContext::with_default_names(KKind::prime_field(p).unwrap(), n)
    }

    fn parse(c: &PolyContext, fs: &[&str]) -> Vec<MPoly> {
        fs.iter().map(|s| c.parse(s).unwrap()).collect()
    }

    #[test]
    fn structure_matrix_examples() {
        let c = ctx(2, 1);
        let sm = structure_matrix(c.ring(), &[]).unwrap();
        assert_eq!((sm.rows(), sm.cols()), (2, 1));
        assert!(sm.entry(&[0], &[]).as_poly().is_one());
        let sm = structure_matrix(c.ring(), &parse(&c, &["x"])).unwrap();
        assert!(sm.entry(&[0], &[0]).as_poly().is_one() && sm.entry(&[1], &[1]).as_poly().is_one());
        assert!(sm.entry(&[1], &[0]).is_zero() && sm.entry(&[0], &[1]).is_zero());
        let c2 = ctx(2, 2);
        let sm = structure_matrix(c2.ring(), &parse(&c2, &["x*y"])).unwrap();
        assert!(sm.entry(&[1, 1], &[1]).as_poly().is_one());
        let big = Ring::new(KKind::prime_field(13).unwrap(), 5).unwrap();
        assert!(matches!(structure_matrix(big, &[]), Err(Error::ScaleExceeded { .. })));
    }

    #[test]
    fn independence_examples() {
        for p in [2, 3, 5] {
            let c = ctx(p, 2);
            assert!(is_p_independent(&parse(&c, &["x"])).unwrap());
        }
        let c = ctx(2, 2);
        assert!(!is_p_independent(&parse(&c, &["x", "x + x^2"])).unwrap());
        assert!(is_p_independent(&parse(&c, &["x", "x*y"])).unwrap());
        assert!(!is_p_independent(&parse(&c, &["x^2*y^4 + 1"])).unwrap());
        let c3 = ctx(3, 3);
        assert!(!is_p_independent(&parse(&c3, &["x*y", "x^2*y^2 + z^3"])).unwrap());
    }

    #[test]
    fn decompositions() {
        let c = ctx(2, 2);
        let fs = parse(&c, &["x", "x*y"]);
        let v = decompose_over_fraction_span(&fs[0], &fs).unwrap();
        assert_eq!(v, polynomial_span(vec![(vec![1, 0], YPoly::one(c.ring()))]));
        let fs = parse(&c, &["x*y"]);
        let v = decompose_over_fraction_span(&c.parse("x^2*y^2").unwrap(), &fs).unwrap();
        let y1y2 = YPoly::from_y(c.parse("x*y").unwrap());
        assert_eq!(v, polynomial_span(vec![(vec![0], y1y2)]));
        let v = decompose_over_fraction_span(&c.parse("x").unwrap(), &fs).unwrap();
        assert_eq!(v, DecomposeVerdict::NotInFractionSpan);
        let fs = parse(&c, &["x", "y"]);
        let v = decompose_over_fraction_span(&c.parse("x*y + x^2").unwrap(), &fs).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert(vec![1, 1], YPoly::one(c.ring()));
        expect.insert(vec![0, 0], YPoly::from_y(c.parse("x").unwrap()));
        assert_eq!(v, DecomposeVerdict::InPolynomialSpan(expect));
        let dep = parse(&c, &["x^2"]);
        assert_eq!(decompose_over_fraction_span(&c.parse("x").unwrap(), &dep), Err(Error::DependentGenerators));
    }

    #[test]
    fn fraction_span() {
        // f = x*y^2 over F_3: f^2 = y^3 * x^2*y, so x^2*y = f^2 / y2.
        let c = ctx(3, 2);
        let fs = parse(&c, &["x*y^2"]);
        let v = decompose_over_fraction_span(&c.parse("x^2*y").unwrap(), &fs).unwrap();
        let DecomposeVerdict::InFractionSpan(map) = v else { panic!("expected a fraction, got {v:?}") };
        assert_eq!(map.len(), 1);
        let f = &map[&vec![2]];
        assert!(f.num.as_poly().is_one());
        assert_eq!(f.den, YPoly::from_y(c.parse("y").unwrap()));
    }

    #[test]
    fn empty_tuple_is_frobenius_membership() {
        let c = ctx(3, 2);
        let a = c.parse("x^3 + y^6*x^3").unwrap();
        assert!(matches!(decompose_over_fraction_span(&a, &[]).unwrap(), DecomposeVerdict::InPolynomialSpan(_)));
        let a = c.parse("x^3 + y").unwrap();
        assert_eq!(decompose_over_fraction_span(&a, &[]).unwrap(), DecomposeVerdict::NotInFractionSpan);
    }

    #[test]
    fn verdict_examples() {
        for p in [2, 3, 5] {
            for n in 1..=3 {
                let c = ctx(p, n);
                let fs: Vec<MPoly> = (0..n).map(|i| MPoly::var(c.ring(), i).unwrap()).collect();
                let v = is_p_basis_of_constants(&fs).unwrap();
                assert!(v.is_p_basis && v.independent && v.dgcd_value.is_one());
                assert_eq!(v.notes.determinant_in_k, Some(true));
            }
        }
        let c = ctx(2, 2);
        assert!(is_p_basis_of_constants(&parse(&c, &["x*y"])).unwrap().is_p_basis);
        let c = ctx(3, 2);
        let v = is_p_basis_of_constants(&parse(&c, &["x^2*y"])).unwrap();
        assert!(!v.is_p_basis && v.independent);
        assert_eq!(c.print(&v.dgcd_value), "x");
    }

    #[test]
    fn nousiainen_decomposition() {
        let c = ctx(3, 2);
        // (x + y^2, y) has jacobian determinant 1.
        let fs = parse(&c, &["x + y^2", "y"]);
        let v = decompose_over_fraction_span(&c.parse("x").unwrap(), &fs).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert(vec![1, 0], YPoly::one(c.ring()));
        expect.insert(vec![0, 2], YPoly::from_y(MPoly::scalar(c.ring(), 2)));
        assert_eq!(v, DecomposeVerdict::InPolynomialSpan(expect));
    }

    #[test]
    fn lemma2_examples() {
        let c = ctx(2, 1);
        assert_eq!(lemma2_refuter(&parse(&c, &["x"]), 2, 1_000_000).unwrap(), None);
        let c = ctx(2, 2);
        let fs = parse(&c, &["x^2*y"]);
        let w = lemma2_refuter(&fs, 1, 1_000_000).unwrap().expect("violation");
        assert!(w.verify(&fs));
        let c3 = ctx(3, 2);
        let fs = parse(&c3, &["x^2*y"]);
        let w = lemma2_refuter(&fs, 1, 1_000_000).unwrap().expect("violation");
        assert!(w.verify(&fs));
    }
}
