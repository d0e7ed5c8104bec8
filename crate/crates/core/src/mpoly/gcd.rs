//! Multivariate gcd. The working algorithm is the modular one in `modgcd`;
//! the recursive subresultant version here serves as a cross-check.
//!
//! Results are determined up to a nonzero scalar of `F_p`; callers normalize.

use super::{Exp, MPoly};

fn one_like(f: &MPoly) -> MPoly {
    MPoly::one(f.ring)
}

fn vars_present(f: &MPoly) -> Vec<bool> {
    let mut present = vec![false; f.ring.nvars()];
    for (e, _) in &f.terms {
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                present[v] = true;
            }
        }
    }
    present
}

/// Splits `f = x^m * rest` with the largest monomial `x^m`.
fn split_monomial(f: &MPoly) -> (Exp, MPoly) {
    let nv = f.ring.nvars();
    let mut m: Exp = f.terms[0].0.clone();
    for (e, _) in &f.terms[1..] {
        for v in 0..nv {
            m[v] = m[v].min(e[v]);
        }
    }
    if m.iter().all(|&k| k == 0) {
        return (m, f.clone());
    }
    let terms = f
        .terms
        .iter()
        .map(|(e, c)| (e.iter().zip(&m).map(|(a, b)| a - b).collect(), *c))
        .collect();
    (m, MPoly::from_sorted(f.ring, terms))
}

/// Coefficients of `f` viewed as a univariate polynomial in internal variable `v`.
/// Dividing every term of a bucket by the same power of `x_v` keeps the order.
pub(crate) fn coeffs_in(f: &MPoly, v: usize) -> Vec<MPoly> {
    let d = f.deg_in(v) as usize;
    let mut buckets: Vec<Vec<(Exp, u32)>> = vec![Vec::new(); d + 1];
    for (e, c) in &f.terms {
        let k = e[v] as usize;
        let mut e2 = e.clone();
        e2[v] = 0;
        buckets[k].push((e2, *c));
    }
    buckets.into_iter().map(|t| MPoly::from_sorted(f.ring, t)).collect()
}

fn lc_in(f: &MPoly, v: usize) -> MPoly {
    coeffs_in(f, v).pop().expect("nonzero polynomial")
}

fn var_power(f: &MPoly, v: usize, k: u32) -> Exp {
    let mut e = Exp::from_elem(0, f.ring.nvars());
    e[v] = k;
    e
}

fn exact(a: &MPoly, b: &MPoly) -> MPoly {
    a.div_exact_raw(b).expect("division in gcd must be exact")
}

/// Content with respect to `v`: the gcd of all coefficients in `v`.
fn content_in(f: &MPoly, v: usize) -> MPoly {
    let mut cs: Vec<MPoly> = coeffs_in(f, v).into_iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| c.terms.len());
    let mut acc = cs[0].clone();
    for c in &cs[1..] {
        if acc.is_unit() {
            break;
        }
        acc = gcd_subresultant(&acc, c);
    }
    acc
}

fn primitive_in(f: &MPoly, v: usize) -> MPoly {
    let c = content_in(f, v);
    if c.is_unit() {
        f.clone()
    } else {
        exact(f, &c)
    }
}

/// Pseudo-remainder of `a` by `b` in the variable `v`.
fn prem(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let db = b.deg_in(v);
    let lcb = lc_in(b, v);
    let mut r = a.clone();
    let mut e = a.deg_in(v) as i64 - db as i64 + 1;
    let p = a.ring.p();
    while !r.is_zero() && r.deg_in(v) >= db {
        let dr = r.deg_in(v);
        let lcr = lc_in(&r, v);
        let shift = var_power(a, v, dr - db);
        let t = lcr.mul_impl(b).mul_term(&shift, 1);
        r = lcb.mul_impl(&r).add_scaled(&t, p - 1);
        e -= 1;
    }
    if e > 0 {
        r = r.mul_impl(&lcb.pow(e as u32));
    }
    r
}

/// Gcd of two polynomials primitive in `v`, both of positive degree in `v`.
fn subresultant(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let (mut a, mut b) = if a.deg_in(v) >= b.deg_in(v) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut g = one_like(&a);
    let mut h = one_like(&a);
    loop {
        let delta = a.deg_in(v) - b.deg_in(v);
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return primitive_in(&b, v);
        }
        if r.deg_in(v) == 0 {
            return one_like(&a);
        }
        a = b;
        let denom = g.mul_impl(&h.pow(delta));
        b = exact(&r, &denom);
        g = lc_in(&a, v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => exact(&g.pow(d), &h.pow(d - 1)),
        };
    }
}

/// A gcd of `f` and `g`, up to a scalar factor.
pub(crate) fn gcd_raw(f: &MPoly, g: &MPoly) -> MPoly {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    if f.is_unit() || g.is_unit() {
        return one_like(f);
    }
    super::modgcd::gcd_modular(f, g)
}

/// The same gcd by subresultant remainder sequences. Slow on large inputs;
/// kept as an independent check.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn gcd_subresultant(f: &MPoly, g: &MPoly) -> MPoly {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    if f.is_unit() || g.is_unit() {
        return one_like(f);
    }
    if f == g {
        return f.clone();
    }
    let (mf, f1) = split_monomial(f);
    let (mg, g1) = split_monomial(g);
    let m: Exp = mf.iter().zip(&mg).map(|(a, b)| *a.min(b)).collect();
    let core = gcd_no_monomial(&f1, &g1);
    if m.iter().all(|&k| k == 0) {
        core
    } else {
        core.mul_term(&m, 1)
    }
}

fn gcd_no_monomial(f: &MPoly, g: &MPoly) -> MPoly {
    if f.is_unit() || g.is_unit() {
        return one_like(f);
    }
    let vf = vars_present(f);
    let vg = vars_present(g);
    // A variable present on one side only: fold the other side against its coefficients.
    for (v, (&in_f, &in_g)) in vf.iter().zip(&vg).enumerate() {
        if in_f != in_g {
            let (with, without) = if in_f { (f, g) } else { (g, f) };
            let mut cs: Vec<MPoly> = coeffs_in(with, v).into_iter().filter(|c| !c.is_zero()).collect();
            cs.sort_by_key(|c| c.terms.len());
            let mut acc = without.clone();
            for c in &cs {
                acc = gcd_subresultant(&acc, c);
                if acc.is_unit() {
                    break;
                }
            }
            return acc;
        }
    }
    let v = (0..vf.len())
        .filter(|&v| vf[v])
        .min_by_key(|&v| (f.deg_in(v).max(g.deg_in(v)), f.deg_in(v) + g.deg_in(v)))
        .expect("non-constant polynomials share a variable");
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let c = gcd_subresultant(&cf, &cg);
    let pf = if cf.is_unit() { f.clone() } else { exact(f, &cf) };
    let pg = if cg.is_unit() { g.clone() } else { exact(g, &cg) };
    let h = subresultant(&pf, &pg, v);
    if c.is_unit() {
        h
    } else {
        c.mul_impl(&h)
    }
}
