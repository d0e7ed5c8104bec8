//! Sparse multivariate polynomials over `K`.
//!
//! Internally an element of `F_p[t][x1..xn]` is stored as a polynomial over
//! `F_p` in `n + 1` variables, with `t` as the last exponent slot. Divisibility
//! and gcds in `F_p[t][x]` coincide with those in `F_p[x, t]`, so every
//! algorithm below only ever sees prime-field coefficients.
//!
//! Terms are kept sorted in decreasing canonical order: graded lexicographic
//! on the `x`-exponents (variables compared in declared order), ties broken by
//! the `t`-degree. This is a monomial order on `F_p[x, t]`, so leading terms
//! behave under multiplication and exact division can use them.

mod gcd;
mod modgcd;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::coeff::{fp, CoeffK, KKind};
use crate::error::{Error, Result};

pub(crate) use gcd::{coeffs_in, gcd_raw};

/// Exponent vector over all internal variables (`x1..xn`, then `t` if present).
pub(crate) type Exp = SmallVec<[u32; 8]>;

/// Exponent vector of a monomial in `x1..xn`.
pub type Monomial = Vec<u32>;

/// The ambient ring `A = K[x1..xn]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    kind: KKind,
    arity: usize,
}

impl Ring {
    pub fn new(kind: KKind, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ArityViolation { m: 0, n: 0 });
        }
        Ok(Ring { kind, arity })
    }

    #[inline]
    pub fn kind(self) -> KKind {
        self.kind
    }

    #[inline]
    pub fn arity(self) -> usize {
        self.arity
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.kind.p()
    }

    /// Number of internal variables, counting `t`.
    #[inline]
    pub(crate) fn nvars(self) -> usize {
        self.arity + usize::from(self.kind.has_t())
    }
}

/// Compares exponent vectors in the canonical order.
pub(crate) fn cmp_exp(a: &[u32], b: &[u32], arity: usize) -> Ordering {
    let da: u64 = a[..arity].iter().map(|&e| e as u64).sum();
    let db: u64 = b[..arity].iter().map(|&e| e as u64).sum();
    da.cmp(&db)
        .then_with(|| a[..arity].cmp(&b[..arity]))
        .then_with(|| a[arity..].cmp(&b[arity..]))
}

/// A polynomial in `A = K[x1..xn]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    ring: Ring,
    terms: Vec<(Exp, u32)>,
}

impl MPoly {
    pub fn zero(ring: Ring) -> Self {
        MPoly { ring, terms: Vec::new() }
    }

    pub fn one(ring: Ring) -> Self {
        Self::scalar(ring, 1)
    }

    pub fn scalar(ring: Ring, v: u64) -> Self {
        let c = (v % ring.p() as u64) as u32;
        if c == 0 {
            return Self::zero(ring);
        }
        MPoly { ring, terms: vec![(Exp::from_elem(0, ring.nvars()), c)] }
    }

    pub fn constant(ring: Ring, c: &CoeffK) -> Result<Self> {
        if c.kind() != ring.kind {
            return Err(Error::KindMismatch);
        }
        let n = ring.arity;
        let mut terms = Vec::new();
        for (e, &v) in c.t_coeffs().iter().enumerate().rev() {
            if v != 0 {
                let mut exp = Exp::from_elem(0, ring.nvars());
                if e > 0 {
                    exp[n] = e as u32;
                }
                terms.push((exp, v));
            }
        }
        Ok(MPoly { ring, terms })
    }

    /// The variable `x_{i+1}` (zero-based index).
    pub fn var(ring: Ring, i: usize) -> Result<Self> {
        if i >= ring.arity {
            return Err(Error::IndexOutOfRange { index: i, arity: ring.arity });
        }
        let mut exp = Exp::from_elem(0, ring.nvars());
        exp[i] = 1;
        Ok(MPoly { ring, terms: vec![(exp, 1)] })
    }

    /// The coefficient `t` as a polynomial, over `F_p[t]` only.
    pub fn t(ring: Ring) -> Option<Self> {
        ring.kind.has_t().then(|| {
            let mut exp = Exp::from_elem(0, ring.nvars());
            exp[ring.arity] = 1;
            MPoly { ring, terms: vec![(exp, 1)] }
        })
    }

    /// Builds a polynomial from `(x-exponents, coefficient)` pairs; repeated
    /// monomials are summed.
    pub fn from_terms<I>(ring: Ring, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, CoeffK)>,
    {
        let mut raw = Vec::new();
        for (mono, c) in terms {
            if mono.len() != ring.arity {
                return Err(Error::RingMismatch);
            }
            if c.kind() != ring.kind {
                return Err(Error::KindMismatch);
            }
            for (e, &v) in c.t_coeffs().iter().enumerate() {
                if v != 0 {
                    let mut exp: Exp = mono.iter().copied().collect();
                    if ring.kind.has_t() {
                        exp.push(e as u32);
                    }
                    raw.push((exp, v));
                }
            }
        }
        Ok(Self::from_raw(ring, raw))
    }

    /// Canonicalizes unsorted internal terms.
    pub(crate) fn from_raw(ring: Ring, raw: Vec<(Exp, u32)>) -> Self {
        let p = ring.p();
        let mut acc: HashMap<Exp, u32> = HashMap::with_capacity(raw.len());
        for (e, c) in raw {
            let slot = acc.entry(e).or_insert(0);
            *slot = fp::add(*slot, c % p, p);
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: Ring, acc: HashMap<Exp, u32>) -> Self {
        let mut terms: Vec<(Exp, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let n = ring.arity;
        terms.sort_unstable_by(|a, b| cmp_exp(&b.0, &a.0, n));
        MPoly { ring, terms }
    }

    /// Assumes `terms` is already sorted and free of zeros.
    pub(crate) fn from_sorted(ring: Ring, terms: Vec<(Exp, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| cmp_exp(&w[0].0, &w[1].0, ring.arity) == Ordering::Greater));
        MPoly { ring, terms }
    }

    #[inline]
    pub fn ring(&self) -> Ring {
        self.ring
    }

    #[inline]
    pub fn kind(&self) -> KKind {
        self.ring.kind
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.ring.arity
    }

    #[inline]
    pub(crate) fn raw_terms(&self) -> &[(Exp, u32)] {
        &self.terms
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1 == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    /// Number of stored internal terms (a `t`-polynomial coefficient counts once per `t`-power).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for elements of `K` (no `x` appears), including zero.
    pub fn is_constant(&self) -> bool {
        let n = self.ring.arity;
        self.terms.iter().all(|(e, _)| e[..n].iter().all(|&x| x == 0))
    }

    /// Total degree in the `x` variables; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        let n = self.ring.arity;
        self.terms.first().map(|(e, _)| e[..n].iter().sum())
    }

    /// Total degree counting `t` as a variable; `None` for zero.
    pub(crate) fn full_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max()
    }

    /// Degree in internal variable `v` (`v == arity` is `t`).
    pub(crate) fn deg_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0)
    }

    /// Degree in `x_{i+1}`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.deg_in(i)
    }

    /// Degree in `t` (zero over a prime field).
    pub fn t_degree(&self) -> u32 {
        if self.ring.kind.has_t() {
            self.deg_in(self.ring.arity)
        } else {
            0
        }
    }

    /// Terms in canonical (decreasing graded-lex) order with `K` coefficients.
    pub fn terms(&self) -> Vec<(Monomial, CoeffK)> {
        let n = self.ring.arity;
        let kind = self.ring.kind;
        let mut out: Vec<(Monomial, CoeffK)> = Vec::new();
        let mut i = 0;
        while i < self.terms.len() {
            let mono: Monomial = self.terms[i].0[..n].to_vec();
            let mut tc: Vec<u32> = Vec::new();
            while i < self.terms.len() && self.terms[i].0[..n] == mono[..] {
                let te = if kind.has_t() { self.terms[i].0[n] as usize } else { 0 };
                if tc.len() <= te {
                    tc.resize(te + 1, 0);
                }
                tc[te] = self.terms[i].1;
                i += 1;
            }
            out.push((mono, CoeffK::from_raw(kind, tc)));
        }
        out
    }

    /// The coefficient of the graded-lex leading `x`-monomial.
    pub fn leading_coefficient(&self) -> CoeffK {
        self.terms()
            .into_iter()
            .next()
            .map(|(_, c)| c)
            .unwrap_or_else(|| CoeffK::zero(self.ring.kind))
    }

    /// The constant `K`-part of the polynomial (coefficient of `x^0`).
    pub fn constant_term(&self) -> CoeffK {
        self.terms()
            .into_iter()
            .find(|(m, _)| m.iter().all(|&e| e == 0))
            .map(|(_, c)| c)
            .unwrap_or_else(|| CoeffK::zero(self.ring.kind))
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.add_scaled(other, 1))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.add_scaled(other, self.ring.p() - 1))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.mul_impl(other))
    }

    /// `self + c * other`, by a sorted merge.
    pub(crate) fn add_scaled(&self, other: &Self, c: u32) -> Self {
        self.merge_shifted(other, None, c)
    }

    /// `self + c * x^shift * other`; multiplying by a monomial keeps the order.
    pub(crate) fn merge_shifted(&self, other: &Self, shift: Option<&[u32]>, c: u32) -> Self {
        let p = self.ring.p();
        let n = self.ring.arity;
        let c = c % p;
        if c == 0 || other.is_zero() {
            return self.clone();
        }
        let shifted = |e: &Exp| -> Exp {
            match shift {
                None => e.clone(),
                Some(s) => e.iter().zip(s).map(|(a, b)| a + b).collect(),
            }
        };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().map(|(e, v)| (shifted(e), fp::mul(*v, c, p))).peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(x), Some(y)) => cmp_exp(&x.0, &y.0, n),
            };
            match ord {
                Ordering::Greater => out.push(a.next().unwrap().clone()),
                Ordering::Less => out.push(b.next().unwrap()),
                Ordering::Equal => {
                    let (e, x) = a.next().unwrap();
                    let (_, y) = b.next().unwrap();
                    let s = fp::add(*x, y, p);
                    if s != 0 {
                        out.push((e.clone(), s));
                    }
                }
            }
        }
        MPoly { ring: self.ring, terms: out }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ring);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, self.terms[0].1);
        }
        let p = self.ring.p();
        let mut acc: HashMap<Exp, u32> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exp = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = fp::add(*slot, fp::mul(*ca, *cb, p), p);
            }
        }
        Self::from_map(self.ring, acc)
    }

    /// Multiplication by the single internal term `c * x^e`.
    pub(crate) fn mul_term(&self, e: &[u32], c: u32) -> Self {
        let p = self.ring.p();
        let c = c % p;
        if c == 0 {
            return Self::zero(self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(x, v)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), fp::mul(*v, c, p)))
            .collect();
        MPoly { ring: self.ring, terms }
    }

    /// Multiplication by a residue of `F_p`.
    pub fn scale(&self, c: u32) -> Self {
        let zero = Exp::from_elem(0, self.ring.nvars());
        self.mul_term(&zero, c)
    }

    /// Multiplication by an element of `K`.
    pub fn scale_k(&self, c: &CoeffK) -> Result<Self> {
        let cp = Self::constant(self.ring, c)?;
        Ok(self.mul_impl(&cp))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Formal partial derivative with respect to `x_{i+1}`.
    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.ring.arity {
            return Err(Error::IndexOutOfRange { index: i, arity: self.ring.arity });
        }
        Ok(self.partial_internal(i))
    }

    /// Derivative in internal variable `v`. Lowering one exponent uniformly
    /// preserves the order of the surviving terms.
    pub(crate) fn partial_internal(&self, v: usize) -> Self {
        let p = self.ring.p();
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let k = e[v] % p;
                if k == 0 {
                    return None;
                }
                let mut e2 = e.clone();
                e2[v] -= 1;
                Some((e2, fp::mul(*c, k, p)))
            })
            .collect();
        MPoly { ring: self.ring, terms }
    }

    /// All partial derivatives in `x1..xn`.
    pub fn gradient(&self) -> Vec<MPoly> {
        (0..self.ring.arity).map(|i| self.partial_internal(i)).collect()
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide `self`.
    pub fn exact_div(&self, g: &Self) -> Result<Option<Self>> {
        self.same_ring(g)?;
        if g.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        Ok(self.div_exact_raw(g))
    }

    pub(crate) fn div_exact_raw(&self, g: &Self) -> Option<Self> {
        let p = self.ring.p();
        let (lg, lc) = &g.terms[0];
        let lc_inv = fp::inv(*lc, p);
        if g.terms.len() == 1 {
            // Monomial divisor: every term must be divisible.
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                if e.iter().zip(lg).any(|(a, b)| a < b) {
                    return None;
                }
                terms.push((e.iter().zip(lg).map(|(a, b)| a - b).collect(), fp::mul(*c, lc_inv, p)));
            }
            return Some(MPoly { ring: self.ring, terms });
        }
        let mut r = self.clone();
        let mut q: Vec<(Exp, u32)> = Vec::new();
        while let Some((lr, cr)) = r.terms.first() {
            if lr.iter().zip(lg).any(|(a, b)| a < b) {
                return None;
            }
            let shift: Exp = lr.iter().zip(lg).map(|(a, b)| a - b).collect();
            let c = fp::mul(*cr, lc_inv, p);
            r = r.merge_shifted(g, Some(&shift), p - c);
            q.push((shift, c));
        }
        Some(MPoly { ring: self.ring, terms: q })
    }

    /// True iff `g` divides `self` (`g = 0` divides only `0`).
    pub fn divisible_by(&self, g: &Self) -> bool {
        if g.is_zero() {
            return self.is_zero();
        }
        self.div_exact_raw(g).is_some()
    }

    /// Remainder of division by `h` in the canonical order. Since `(h)` is
    /// principal, `{h}` is a Groebner basis and the remainder is a normal form:
    /// it is `F_p`-linear and vanishes exactly on multiples of `h`.
    pub(crate) fn normal_form(&self, h: &Self) -> Self {
        let p = self.ring.p();
        let (lh, lc) = &h.terms[0];
        let lc_inv = fp::inv(*lc, p);
        let mut rem: Vec<(Exp, u32)> = Vec::new();
        let mut r = self.clone();
        while !r.is_zero() {
            let (lr, cr) = r.terms[0].clone();
            if lr.iter().zip(lh).all(|(a, b)| a >= b) {
                let shift: Exp = lr.iter().zip(lh).map(|(a, b)| a - b).collect();
                let c = fp::mul(cr, lc_inv, p);
                r = r.merge_shifted(h, Some(&shift), p - c);
            } else {
                rem.push((lr, cr));
                r.terms.remove(0);
            }
        }
        MPoly { ring: self.ring, terms: rem }
    }

    /// `(u, canonical)` with `self = u * canonical`, `u` a unit of `K`, and the
    /// leading coefficient of `canonical` equal to 1 (monic in `t`).
    pub fn normalize_assoc(&self) -> (CoeffK, MPoly) {
        let kind = self.ring.kind;
        match self.terms.first() {
            None => (CoeffK::one(kind), self.clone()),
            Some((_, c)) => {
                let u = *c;
                (CoeffK::scalar(kind, u as u64), self.scale(fp::inv(u, self.ring.p())))
            }
        }
    }

    pub fn normalized(&self) -> MPoly {
        self.normalize_assoc().1
    }

    /// True iff the polynomial is a unit of `A`, i.e. a nonzero scalar.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0)
    }

    /// Normalized greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(gcd_raw(self, other).normalized())
    }

    /// Associates: equal up to a unit factor.
    pub fn is_associate(&self, other: &Self) -> bool {
        self.ring == other.ring && self.normalized() == other.normalized()
    }

    /// Formats with the given variable names (one per `x` variable).
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        crate::expr::Printer { poly: self, names }
    }

    /// Default variable names `x1..xn`.
    pub fn default_names(arity: usize) -> Vec<String> {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = MPoly::default_names(self.ring.arity);
        fmt::Display::fmt(&crate::expr::Printer { poly: self, names: &names }, f)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

// Operator forms panic on ring mismatch; the `checked_*` methods report it.
impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.checked_add(rhs).expect("ring mismatch in +")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.checked_sub(rhs).expect("ring mismatch in -")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.checked_mul(rhs).expect("ring mismatch in *")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(self.ring.p() - 1)
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}
