//! The Frobenius subring `B = K[x1^p..xn^p]` and the decomposition of `A`
//! over its free basis `{x^β : β ∈ Ω_n}`.
//!
//! Elements of `K[y1..yn]` are kept in their own wrapper, [`YPoly`], so a
//! `y`-polynomial is never mistaken for the `x`-polynomial it stands for.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::mpoly::{Exp, MPoly, Ring};

/// All exponent vectors of length `m` with entries below `p`, in lex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Omega {
    m: usize,
    p: u32,
}

impl Omega {
    pub fn new(m: usize, p: u32) -> Self {
        Omega { m, p }
    }

    pub fn len(&self) -> usize {
        (self.p as usize).pow(self.m as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `alpha` in the enumeration.
    pub fn index_of(&self, alpha: &[u32]) -> usize {
        alpha.iter().fold(0, |acc, &a| acc * self.p as usize + a as usize)
    }

    /// The `k`-th element.
    pub fn element(&self, mut k: usize) -> Vec<u32> {
        let mut out = vec![0; self.m];
        for slot in out.iter_mut().rev() {
            *slot = (k % self.p as usize) as u32;
            k /= self.p as usize;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.len()).map(move |k| self.element(k))
    }
}

/// An element of `K[y1..yn]`, where `y_i` stands for `x_i^p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct YPoly(MPoly);

impl YPoly {
    /// Reads the `x`-variables of `f` as `y`-variables.
    pub fn from_y(f: MPoly) -> Self {
        YPoly(f)
    }

    pub fn zero(ring: Ring) -> Self {
        YPoly(MPoly::zero(ring))
    }

    pub fn one(ring: Ring) -> Self {
        YPoly(MPoly::one(ring))
    }

    /// The underlying polynomial, in the `y` variables.
    pub fn as_poly(&self) -> &MPoly {
        &self.0
    }

    pub fn into_poly(self) -> MPoly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Substitutes `y_i ↦ x_i^p`, giving an element of `B`.
    pub fn to_a(&self) -> MPoly {
        let ring = self.0.ring();
        let (n, p) = (ring.arity(), ring.p());
        let terms = self
            .0
            .raw_terms()
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                for k in e2.iter_mut().take(n) {
                    *k *= p;
                }
                (e2, *c)
            })
            .collect();
        MPoly::from_sorted(ring, terms)
    }

    /// Inverse of [`YPoly::to_a`]; `None` when `f ∉ B`.
    pub fn from_a(f: &MPoly) -> Option<Self> {
        let ring = f.ring();
        let (n, p) = (ring.arity(), ring.p());
        let mut terms = Vec::with_capacity(f.len());
        for (e, c) in f.raw_terms() {
            if e.iter().take(n).any(|k| k % p != 0) {
                return None;
            }
            let mut e2 = e.clone();
            for k in e2.iter_mut().take(n) {
                *k /= p;
            }
            terms.push((e2, *c));
        }
        Some(YPoly(MPoly::from_sorted(ring, terms)))
    }
}

impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.0.arity()).map(|i| format!("y{i}")).collect();
        fmt::Display::fmt(&crate::expr::Printer { poly: &self.0, names: &names }, f)
    }
}

impl fmt::Debug for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YPoly({self})")
    }
}

/// The components `f_β ∈ K[y]` with `f = Σ f_β(x^p) x^β`. Absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BDecomposition {
    ring: Ring,
    components: BTreeMap<Vec<u32>, YPoly>,
}

impl BDecomposition {
    pub fn new(ring: Ring, components: BTreeMap<Vec<u32>, YPoly>) -> Self {
        let components = components.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        BDecomposition { ring, components }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn get(&self, beta: &[u32]) -> YPoly {
        self.components.get(beta).cloned().unwrap_or_else(|| YPoly::zero(self.ring))
    }

    /// Nonzero components in lex order of `β`.
    pub fn components(&self) -> &BTreeMap<Vec<u32>, YPoly> {
        &self.components
    }
}

pub fn b_decompose(f: &MPoly) -> BDecomposition {
    let ring = f.ring();
    let (n, p) = (ring.arity(), ring.p());
    let mut buckets: BTreeMap<Vec<u32>, Vec<(Exp, u32)>> = BTreeMap::new();
    for (e, c) in f.raw_terms() {
        let beta: Vec<u32> = e.iter().take(n).map(|k| k % p).collect();
        let mut y = e.clone();
        for k in y.iter_mut().take(n) {
            *k /= p;
        }
        buckets.entry(beta).or_default().push((y, *c));
    }
    // Each bucket shares its residues, so dividing preserves the term order.
    let components = buckets
        .into_iter()
        .map(|(beta, terms)| (beta, YPoly(MPoly::from_sorted(ring, terms))))
        .collect();
    BDecomposition { ring, components }
}

pub fn b_recompose(d: &BDecomposition) -> MPoly {
    let mut out = MPoly::zero(d.ring);
    let nv = d.ring.arity() + d.ring.kind().has_t() as usize;
    for (beta, comp) in &d.components {
        let mut shift = Exp::from_elem(0, nv);
        for (s, b) in shift.iter_mut().zip(beta) {
            *s = *b;
        }
        out = out.merge_shifted(&comp.to_a(), Some(&shift), 1);
    }
    out
}

/// The largest divisor of `f` lying in `B`, as the gcd of the components.
/// Zero for `f = 0`.
pub fn b_content(f: &MPoly) -> MPoly {
    b_content_y(f).to_a()
}

pub(crate) fn b_content_y(f: &MPoly) -> YPoly {
    let d = b_decompose(f);
    let mut comps: Vec<&MPoly> = d.components.values().map(|y| &y.0).collect();
    comps.sort_by_key(|c| c.len());
    let mut acc = MPoly::zero(f.ring());
    for c in comps {
        acc = crate::mpoly::gcd_raw(&acc, c);
        if acc.is_unit() {
            break;
        }
    }
    YPoly(acc.normalized())
}

/// True iff `f` lies in `B`.
pub fn in_b(f: &MPoly) -> bool {
    YPoly::from_a(f).is_some()
}

/// True iff no non-unit of `B` divides `f`.
pub fn is_b_free(f: &MPoly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(b_content_y(f).0.is_unit())
}

/// True iff `f` has neither a square factor nor a non-unit factor in `B`,
/// decided by `gcd(f, ∂f/∂x1, .., ∂f/∂xn) ~ 1`.
pub fn is_squarefree_and_bfree(f: &MPoly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut acc = f.clone();
    for d in f.gradient() {
        if acc.is_unit() {
            break;
        }
        if !d.is_zero() {
            acc = crate::mpoly::gcd_raw(&acc, &d);
        }
    }
    Ok(acc.is_unit())
}

/// The `p`-th root of an element of `B` when one exists in `A`. Over `F_p`
/// every element of `B` has one; over `F_p[t]` the `t`-exponents must also be
/// multiples of `p`.
pub fn pth_root(f: &MPoly) -> Option<MPoly> {
    let ring = f.ring();
    let p = ring.p();
    let mut terms = Vec::with_capacity(f.len());
    for (e, c) in f.raw_terms() {
        if e.iter().any(|k| k % p != 0) {
            return None;
        }
        terms.push((e.iter().map(|k| k / p).collect(), *c));
    }
    Some(MPoly::from_sorted(ring, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::KKind;
    use crate::expr::PolyContext;

    fn ctx(p: u32, t: bool, n: usize) -> PolyContext {
        let kind = if t { KKind::poly_over_prime_field(p) } else { KKind::prime_field(p) }.unwrap();
        PolyContext::with_default_names(kind, n)
    }

    #[test]
    fn omega_enumeration() {
        let o = Omega::new(2, 3);
        let all: Vec<_> = o.iter().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        assert!(all.iter().enumerate().all(|(k, a)| o.index_of(a) == k));
        assert_eq!(Omega::new(0, 2).iter().collect::<Vec<_>>(), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn decomposition_examples() {
        let c = ctx(2, false, 2);
        let f = c.parse("x^2*y").unwrap();
        let d = b_decompose(&f);
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.get(&[0, 1]).to_string(), "y1");
        assert_eq!(b_recompose(&d), f);

        let c3 = ctx(3, false, 2);
        let f = c3.parse("x^2*y").unwrap();
        assert!(b_decompose(&f).get(&[2, 1]).as_poly().is_one());

        let c1 = ctx(2, false, 1);
        let f = c1.parse("x^3 + x").unwrap();
        let d = b_decompose(&f);
        assert_eq!(d.get(&[1]).to_string(), "y1 + 1");
        assert_eq!(b_recompose(&d), f);

        let ring = c1.ring();
        assert!(b_recompose(&BDecomposition::new(ring, BTreeMap::new())).is_zero());
        let single = BDecomposition::new(ring, [(vec![0], YPoly::from_y(c1.parse("x").unwrap()))].into());
        assert_eq!(b_recompose(&single), c1.parse("x^2").unwrap());
    }

    #[test]
    fn content_and_freeness() {
        let c = ctx(2, false, 2);
        assert_eq!(b_content(&c.parse("x^2*y").unwrap()), c.parse("x^2").unwrap());
        assert!(b_content(&c.parse("x*y").unwrap()).is_one());
        assert!(is_b_free(&c.parse("x*y").unwrap()).unwrap());
        assert!(!is_b_free(&c.parse("x^2*y").unwrap()).unwrap());
        assert_eq!(is_b_free(&MPoly::zero(c.ring())), Err(Error::ZeroInput));

        let ct = ctx(2, true, 2);
        let f = ct.parse("t*x^2 + t").unwrap();
        assert_eq!(b_content(&f), f);
        assert!(!is_b_free(&ct.parse("t*x*y").unwrap()).unwrap());
    }

    #[test]
    fn squarefree_and_bfree_examples() {
        let c3 = ctx(3, false, 2);
        assert!(!is_squarefree_and_bfree(&c3.parse("x^2*y").unwrap()).unwrap());
        let c2 = ctx(2, false, 2);
        assert!(is_squarefree_and_bfree(&c2.parse("x*y").unwrap()).unwrap());
        let ct = ctx(2, true, 2);
        assert!(!is_squarefree_and_bfree(&ct.parse("(x^2 + t)*y").unwrap()).unwrap());
        assert!(!is_squarefree_and_bfree(&ct.parse("(x^2 + t)*x").unwrap()).unwrap());
        assert!(is_squarefree_and_bfree(&ct.parse("x + t").unwrap()).unwrap());
    }

    #[test]
    fn pth_roots() {
        let c = ctx(3, false, 2);
        let f = c.parse("x^3*y^6 + 2").unwrap();
        assert_eq!(pth_root(&f).unwrap(), c.parse("x*y^2 + 2").unwrap());
        assert!(pth_root(&c.parse("x").unwrap()).is_none());
        let ct = ctx(3, true, 1);
        assert!(pth_root(&ct.parse("t*x^3").unwrap()).is_none());
        assert!(pth_root(&ct.parse("t^3*x^3").unwrap()).is_some());
    }
}
