//! The coefficient ring `K`: either the prime field `F_p` or the polynomial
//! ring `F_p[t]`, for primes `p <= 13`.
//!
//! Elements of both kinds share one representation, a coefficient list in
//! `t` (lowest degree first, no trailing zeros). A prime-field element is a
//! list of length at most one.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_PRIME: u32 = 13;

/// A validated prime `2 <= p <= 13`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if (2..=MAX_PRIME).contains(&p) && (2..p).all(|d| !p.is_multiple_of(d)) {
            Ok(Prime(p))
        } else {
            Err(Error::InvalidPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which coefficient ring a polynomial lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KKind {
    /// `K = F_p`, a perfect field.
    PrimeField(Prime),
    /// `K = F_p[t]`, a non-perfect UFD.
    PolyOverPrimeField(Prime),
}

impl KKind {
    pub fn prime_field(p: u32) -> Result<Self> {
        Ok(KKind::PrimeField(Prime::new(p)?))
    }

    pub fn poly_over_prime_field(p: u32) -> Result<Self> {
        Ok(KKind::PolyOverPrimeField(Prime::new(p)?))
    }

    #[inline]
    pub fn p(self) -> u32 {
        match self {
            KKind::PrimeField(p) | KKind::PolyOverPrimeField(p) => p.get(),
        }
    }

    /// Whether the coefficient ring carries the transcendental `t`.
    #[inline]
    pub fn has_t(self) -> bool {
        matches!(self, KKind::PolyOverPrimeField(_))
    }

    /// Short name used in instance files and reports: `Fp` or `Fp[t]`.
    pub fn label(self) -> &'static str {
        if self.has_t() {
            "Fp[t]"
        } else {
            "Fp"
        }
    }
}

/// Scalar arithmetic in `F_p` and dense univariate arithmetic in `F_p[t]`.
pub(crate) mod fp {
    #[inline]
    pub fn add(a: u32, b: u32, p: u32) -> u32 {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(a: u32, b: u32, p: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + p - b
        }
    }

    #[inline]
    pub fn mul(a: u32, b: u32, p: u32) -> u32 {
        (a * b) % p
    }

    #[inline]
    pub fn neg(a: u32, p: u32) -> u32 {
        if a == 0 {
            0
        } else {
            p - a
        }
    }

    pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
        let mut r = 1 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a, p);
            }
            a = mul(a, a, p);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue.
    pub fn inv(a: u32, p: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(p));
        pow(a, (p - 2) as u64, p)
    }

    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn poly_add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = (0..a.len().max(b.len()))
            .map(|i| add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
            .collect();
        trim(&mut r);
        r
    }

    pub fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = (0..a.len().max(b.len()))
            .map(|i| sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
            .collect();
        trim(&mut r);
        r
    }

    pub fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = add(r[i + j], mul(x, y, p), p);
            }
        }
        trim(&mut r);
        r
    }

    /// Quotient and remainder of `a` by nonzero `b`.
    pub fn poly_divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let db = b.len() - 1;
        let lead_inv = inv(b[db], p);
        let mut r = a.to_vec();
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u32; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = mul(r[k], lead_inv, p);
            if c == 0 {
                continue;
            }
            q[k - db] = c;
            for (j, &bj) in b.iter().enumerate() {
                let idx = k - db + j;
                r[idx] = sub(r[idx], mul(c, bj, p), p);
            }
        }
        trim(&mut q);
        trim(&mut r);
        (q, r)
    }

    pub fn poly_monic(a: &[u32], p: u32) -> Vec<u32> {
        match a.last() {
            None => Vec::new(),
            Some(&l) => {
                let li = inv(l, p);
                a.iter().map(|&c| mul(c, li, p)).collect()
            }
        }
    }

    pub fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let (_, r) = poly_divrem(&x, &y, p);
            x = y;
            y = r;
        }
        poly_monic(&x, p)
    }
}

/// An element of `K`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoeffK {
    kind: KKind,
    coeffs: Vec<u32>,
}

impl CoeffK {
    pub fn zero(kind: KKind) -> Self {
        CoeffK { kind, coeffs: Vec::new() }
    }

    pub fn one(kind: KKind) -> Self {
        Self::scalar(kind, 1)
    }

    /// The residue of `v` modulo `p`, as a constant of `K`.
    pub fn scalar(kind: KKind, v: u64) -> Self {
        let r = (v % kind.p() as u64) as u32;
        let coeffs = if r == 0 { Vec::new() } else { vec![r] };
        CoeffK { kind, coeffs }
    }

    /// The transcendental `t`; `None` over a prime field.
    pub fn t(kind: KKind) -> Option<Self> {
        kind.has_t().then(|| CoeffK { kind, coeffs: vec![0, 1] })
    }

    /// Builds an element of `F_p[t]` from coefficients, lowest degree first.
    /// Over a prime field only a constant list is accepted.
    pub fn from_t_coeffs(kind: KKind, coeffs: &[u64]) -> Option<Self> {
        let p = kind.p() as u64;
        let mut c: Vec<u32> = coeffs.iter().map(|&v| (v % p) as u32).collect();
        fp::trim(&mut c);
        if !kind.has_t() && c.len() > 1 {
            return None;
        }
        Some(CoeffK { kind, coeffs: c })
    }

    pub(crate) fn from_raw(kind: KKind, mut coeffs: Vec<u32>) -> Self {
        fp::trim(&mut coeffs);
        debug_assert!(kind.has_t() || coeffs.len() <= 1);
        CoeffK { kind, coeffs }
    }

    #[inline]
    pub fn kind(&self) -> KKind {
        self.kind
    }

    /// Coefficients in `t`, lowest degree first.
    #[inline]
    pub fn t_coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree in `t`; `None` for zero.
    pub fn t_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Whether the element is a constant of `F_p` (always true over a prime field).
    pub fn is_scalar(&self) -> bool {
        self.coeffs.len() <= 1
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.kind == other.kind {
            Ok(())
        } else {
            Err(Error::KindMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CoeffK { kind: self.kind, coeffs: fp::poly_add(&self.coeffs, &other.coeffs, self.kind.p()) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CoeffK { kind: self.kind, coeffs: fp::poly_sub(&self.coeffs, &other.coeffs, self.kind.p()) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CoeffK { kind: self.kind, coeffs: fp::poly_mul(&self.coeffs, &other.coeffs, self.kind.p()) })
    }

    pub fn neg(&self) -> Self {
        let p = self.kind.p();
        CoeffK { kind: self.kind, coeffs: self.coeffs.iter().map(|&c| fp::neg(c, p)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.kind);
        for _ in 0..e {
            r = r.mul(self).expect("same kind");
        }
        r
    }

    /// True iff the element is invertible in `K`.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Option<Self> {
        self.is_unit().then(|| Self::scalar(self.kind, fp::inv(self.coeffs[0], self.kind.p()) as u64))
    }

    /// Normalized gcd: `1` for nonzero prime-field inputs, monic in `t` for
    /// `F_p[t]`, and `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.kind.p();
        let g = fp::poly_gcd(&self.coeffs, &other.coeffs, p);
        Ok(CoeffK { kind: self.kind, coeffs: g })
    }

    /// The associate with leading `t`-coefficient 1 (zero stays zero).
    pub fn normalized(&self) -> Self {
        CoeffK { kind: self.kind, coeffs: fp::poly_monic(&self.coeffs, self.kind.p()) }
    }

    /// An `r` with `r^p == self`, when one exists.
    ///
    /// Over `F_p` this is `self` (Fermat). Over `F_p[t]` it exists exactly
    /// when every `t`-exponent is divisible by `p`.
    pub fn pth_root(&self) -> Option<Self> {
        let p = self.kind.p() as usize;
        if !self.kind.has_t() {
            return Some(self.clone());
        }
        if self.coeffs.iter().enumerate().any(|(i, &c)| c != 0 && i % p != 0) {
            return None;
        }
        // a(t^p) = a(t)^p because Frobenius fixes F_p.
        let root: Vec<u32> = self.coeffs.iter().step_by(p).copied().collect();
        Some(CoeffK { kind: self.kind, coeffs: root })
    }
}

impl fmt::Debug for CoeffK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CoeffK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("t")?,
                (1, c) => write!(f, "{c}*t")?,
                (e, 1) => write!(f, "t^{e}")?,
                (e, c) => write!(f, "{c}*t^{e}")?,
            }
        }
        Ok(())
    }
}
