//! `K`-derivations `d = Σ a_i ∂/∂x_i` of `A`, stored by their coefficients.

use crate::error::{Error, Result};
use crate::jac::{check_tuple, jacobian_matrix, MinorCache};
use crate::mpoly::{MPoly, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    ring: Ring,
    coeffs: Vec<MPoly>,
}

impl Derivation {
    pub fn new(ring: Ring, coeffs: Vec<MPoly>) -> Result<Self> {
        if coeffs.len() != ring.arity() {
            return Err(Error::IndexOutOfRange { index: coeffs.len(), arity: ring.arity() });
        }
        if coeffs.iter().any(|a| a.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        Ok(Derivation { ring, coeffs })
    }

    /// The partial derivative `∂/∂x_{i+1}`.
    pub fn partial(ring: Ring, i: usize) -> Result<Self> {
        if i >= ring.arity() {
            return Err(Error::IndexOutOfRange { index: i, arity: ring.arity() });
        }
        let coeffs = (0..ring.arity()).map(|k| if k == i { MPoly::one(ring) } else { MPoly::zero(ring) }).collect();
        Ok(Derivation { ring, coeffs })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn coeffs(&self) -> &[MPoly] {
        &self.coeffs
    }

    pub fn apply(&self, f: &MPoly) -> Result<MPoly> {
        if f.ring() != self.ring {
            return Err(Error::RingMismatch);
        }
        let mut acc = MPoly::zero(self.ring);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let d = f.partial_derivative(i)?;
            if !d.is_zero() {
                acc = &acc + &(a * &d);
            }
        }
        Ok(acc)
    }

    /// True iff `f` lies in the ring of constants of `self`.
    pub fn is_constant(&self, f: &MPoly) -> Result<bool> {
        Ok(self.apply(f)?.is_zero())
    }
}

/// The derivation `f ↦ det` of the jacobian of `fs` on columns `cols`, with
/// row `i` replaced by the gradient of `f`. Indices are 0-based.
pub fn jacobian_derivation(fs: &[MPoly], i: usize, cols: &[usize]) -> Result<Derivation> {
    check_tuple(fs)?;
    let (m, ring) = (fs.len(), fs[0].ring());
    let n = ring.arity();
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, arity: m });
    }
    if cols.len() != m || cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&j| j >= n) {
        return Err(Error::BadColumnSet(format!("{cols:?} is not a sorted set of {m} columns below {n}")));
    }
    let matrix = jacobian_matrix(fs)?;
    let rows: Vec<usize> = (0..m).filter(|&r| r != i).collect();
    let mut cache = MinorCache::new(&matrix, rows);
    let mut coeffs = vec![MPoly::zero(ring); n];
    for (k, &j) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
        let sub = cache.det(&rest);
        coeffs[j] = if (i + k) % 2 == 1 { -&sub } else { sub };
    }
    Ok(Derivation { ring, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::KKind;
    use crate::expr::PolyContext;

    fn ctx(p: u32, n: usize) -> PolyContext {
        PolyContext::with_default_names(KKind::prime_field(p).unwrap(), n)
    }

    #[test]
    fn apply_examples() {
        let c = ctx(2, 2);
        let (x, y) = (c.parse("x").unwrap(), c.parse("y").unwrap());
        let euler = Derivation::new(c.ring(), vec![x.clone(), y.clone()]).unwrap();
        assert!(euler.apply(&c.parse("x*y").unwrap()).unwrap().is_zero());
        assert!(euler.is_constant(&c.parse("x^2*y^4 + 1").unwrap()).unwrap());
        let dx = Derivation::partial(c.ring(), 0).unwrap();
        assert!(dx.apply(&x).unwrap().is_one());
        assert!(!dx.is_constant(&x).unwrap());
        let other = ctx(3, 2);
        assert_eq!(dx.apply(&other.parse("x").unwrap()), Err(Error::RingMismatch));
    }

    #[test]
    fn jacobian_derivations() {
        let c = ctx(2, 2);
        let fs = vec![c.parse("x").unwrap(), c.parse("x*y").unwrap()];
        let d2 = jacobian_derivation(&fs, 1, &[0, 1]).unwrap();
        assert_eq!(d2.apply(&fs[1]).unwrap(), c.parse("x").unwrap());
        assert!(d2.is_constant(&fs[0]).unwrap());
        let d1 = jacobian_derivation(&fs, 0, &[0, 1]).unwrap();
        assert!(d1.apply(&fs[1]).unwrap().is_zero());

        let c3 = ctx(3, 3);
        let single = vec![c3.parse("x^2*z + y").unwrap()];
        let d = jacobian_derivation(&single, 0, &[2]).unwrap();
        assert_eq!(d, Derivation::partial(c3.ring(), 2).unwrap());
        assert!(matches!(jacobian_derivation(&single, 1, &[2]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(jacobian_derivation(&single, 0, &[3]), Err(Error::BadColumnSet(_))));
    }
}
