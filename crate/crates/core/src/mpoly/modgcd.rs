//! Dense modular gcd: evaluate one variable at a time at points of a small
//! extension field `F_q`, recurse, and rebuild by Newton interpolation. The
//! cofactors are interpolated alongside, so the stopping test is a degree
//! count and needs no trial division.
//!
//! `F_q` elements are stored as discrete logarithms to a primitive element,
//! with a Zech table for addition.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::MPoly;

pub(crate) struct Gf {
    p: u32,
    /// `q - 1`, the order of the multiplicative group.
    q1: u32,
    /// `zech[d] = log(1 + α^d)`, or `ZERO`.
    zech: Vec<u32>,
    /// Integer encoding (base-`p` digits) of `α^k`.
    int_of: Vec<u32>,
    /// Logarithm of each nonzero element of the prime field.
    log_of_fp: Vec<u32>,
}

/// The zero element. Logarithms are below `q - 1`, and `q - 1 < 2^20`.
const ZERO: u32 = u32::MAX;
const ONE: u32 = 0;

type U = Vec<u32>;

impl Gf {
    pub(crate) fn for_prime(p: u32) -> &'static Gf {
        static CACHE: OnceLock<Mutex<HashMap<u32, &'static Gf>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("field cache");
        guard.entry(p).or_insert_with(|| Box::leak(Box::new(Gf::build(p))))
    }

    fn build(p: u32) -> Gf {
        let mut e = 1u32;
        while p.pow(e) < 1 << 13 {
            e += 1;
        }
        let q = p.pow(e);
        let e = e as usize;
        // Try moduli z^e + (low digits) in counting order until z has order q - 1.
        let mut low = vec![0u32; e];
        low[0] = 1;
        loop {
            if let Some(int_of) = Self::powers_of_z(p, &low, q) {
                let q1 = q - 1;
                let mut log = vec![ZERO; q as usize];
                for (k, &v) in int_of.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                let zech = int_of
                    .iter()
                    .map(|&v| {
                        let d0 = v % p;
                        let w = v - d0 + (d0 + 1) % p;
                        log[w as usize]
                    })
                    .collect();
                let log_of_fp = (0..p).map(|c| log[c as usize]).collect();
                return Gf { p, q1, zech, int_of, log_of_fp };
            }
            for d in low.iter_mut() {
                *d += 1;
                if *d < p {
                    break;
                }
                *d = 0;
            }
        }
    }

    /// Encodings of `z^0 .. z^{q-2}` modulo `z^e + low`, when `z` is primitive.
    fn powers_of_z(p: u32, low: &[u32], q: u32) -> Option<Vec<u32>> {
        let e = low.len();
        let mut digits = vec![0u32; e];
        digits[0] = 1;
        let mut out = Vec::with_capacity(q as usize - 1);
        for k in 0..q - 1 {
            let code = digits.iter().rev().fold(0u32, |acc, &d| acc * p + d);
            if k > 0 && code == 1 {
                return None;
            }
            out.push(code);
            let top = digits[e - 1];
            for i in (1..e).rev() {
                digits[i] = digits[i - 1];
            }
            digits[0] = 0;
            if top != 0 {
                for (d, &l) in digits.iter_mut().zip(low) {
                    *d = (*d + (p - l) * top) % p;
                }
            }
        }
        let code = digits.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        (code == 1).then_some(out)
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a + b;
        if s >= self.q1 {
            s - self.q1
        } else {
            s
        }
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.q1 - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            ZERO
        } else {
            self.mul(a, z)
        }
    }

    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == ZERO || self.p == 2 {
            a
        } else {
            self.mul(a, self.q1 / 2)
        }
    }

    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != ZERO);
        if a == 0 {
            0
        } else {
            self.q1 - a
        }
    }

    fn from_fp(&self, c: u32) -> u32 {
        if c.is_multiple_of(self.p) {
            ZERO
        } else {
            self.log_of_fp[(c % self.p) as usize]
        }
    }

    fn to_fp(&self, a: u32) -> Option<u32> {
        if a == ZERO {
            return Some(0);
        }
        let v = self.int_of[a as usize];
        (v < self.p).then_some(v)
    }

    // Univariate polynomials, coefficients low to high, no trailing zeros.

    fn trim(u: &mut U) {
        while u.last() == Some(&ZERO) {
            u.pop();
        }
    }

    fn u_add(&self, a: &[u32], b: &[u32]) -> U {
        let mut out: U = (0..a.len().max(b.len()))
            .map(|i| self.add(*a.get(i).unwrap_or(&ZERO), *b.get(i).unwrap_or(&ZERO)))
            .collect();
        Self::trim(&mut out);
        out
    }

    fn u_scale(&self, a: &[u32], c: u32) -> U {
        if c == ZERO {
            return U::new();
        }
        a.iter().map(|&x| self.mul(x, c)).collect()
    }

    fn u_mul(&self, a: &[u32], b: &[u32]) -> U {
        if a.is_empty() || b.is_empty() {
            return U::new();
        }
        let mut out = vec![ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Self::trim(&mut out);
        out
    }

    fn u_divrem(&self, a: &[u32], b: &[u32]) -> (U, U) {
        let db = b.len() - 1;
        if a.len() < b.len() {
            return (U::new(), a.to_vec());
        }
        let inv = self.inv(b[db]);
        let mut r = a.to_vec();
        let mut q = vec![ZERO; a.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], inv);
            if c == ZERO {
                continue;
            }
            q[k] = c;
            for (i, &y) in b.iter().enumerate() {
                r[k + i] = self.sub(r[k + i], self.mul(c, y));
            }
        }
        r.truncate(db);
        Self::trim(&mut r);
        Self::trim(&mut q);
        (q, r)
    }

    fn u_div(&self, a: &[u32], b: &[u32]) -> U {
        let (q, r) = self.u_divrem(a, b);
        debug_assert!(r.is_empty(), "inexact division");
        q
    }

    fn u_monic(&self, a: &[u32]) -> U {
        match a.last() {
            Some(&l) => self.u_scale(a, self.inv(l)),
            None => U::new(),
        }
    }

    fn u_gcd(&self, a: &[u32], b: &[u32]) -> U {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = self.u_divrem(&a, &b).1;
            a = b;
            b = r;
        }
        self.u_monic(&a)
    }

    fn u_eval(&self, a: &[u32], x: u32) -> u32 {
        a.iter().rev().fold(ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Sparse polynomial over `F_q` in `k` variables, terms in descending lex order.
type Sp = Vec<(Vec<u32>, u32)>;
/// The same polynomial grouped by its first `k - 1` exponents, with a
/// univariate coefficient in the last variable.
type Rec = Vec<(Vec<u32>, U)>;

fn to_rec(a: &Sp) -> Rec {
    let mut out: Rec = Vec::new();
    for (e, c) in a {
        let (prefix, last) = e.split_at(e.len() - 1);
        let last = last[0] as usize;
        match out.last_mut() {
            Some((p, u)) if p.as_slice() == prefix => {
                if u.len() <= last {
                    u.resize(last + 1, ZERO);
                }
                u[last] = *c;
            }
            _ => {
                let mut u = vec![ZERO; last + 1];
                u[last] = *c;
                out.push((prefix.to_vec(), u));
            }
        }
    }
    out
}

fn to_sp(a: &Rec) -> Sp {
    let mut out = Vec::new();
    for (prefix, u) in a {
        for (k, &c) in u.iter().enumerate().rev() {
            if c != ZERO {
                let mut e = prefix.clone();
                e.push(k as u32);
                out.push((e, c));
            }
        }
    }
    out
}

fn rec_deg(a: &Rec) -> usize {
    a.iter().map(|(_, u)| u.len() - 1).max().unwrap_or(0)
}

fn is_constant(a: &Sp) -> bool {
    a.len() == 1 && a[0].0.iter().all(|&k| k == 0)
}

/// Gcd and cofactors of nonzero `a`, `b` in `k` variables. The gcd has
/// leading coefficient one and `a = g·ā`, `b = g·b̄`.
fn pgcd(gf: &Gf, a: &Sp, b: &Sp, k: usize) -> (Sp, Sp, Sp) {
    if k == 0 {
        return (vec![(Vec::new(), ONE)], a.clone(), b.clone());
    }
    if k == 1 {
        let ua = to_rec(a).pop().map(|x| x.1).unwrap_or_default();
        let ub = to_rec(b).pop().map(|x| x.1).unwrap_or_default();
        let g = gf.u_gcd(&ua, &ub);
        let wrap = |u: U| to_sp(&vec![(Vec::new(), u)]);
        return (wrap(g.clone()), wrap(gf.u_div(&ua, &g)), wrap(gf.u_div(&ub, &g)));
    }
    let (ra, rb) = (to_rec(a), to_rec(b));
    let content = |r: &Rec| r.iter().fold(U::new(), |acc, (_, u)| if acc == [ONE] { acc } else { gf.u_gcd(&acc, u) });
    let (ca, cb) = (content(&ra), content(&rb));
    let c = gf.u_gcd(&ca, &cb);
    let prim = |r: &Rec, cu: &U| -> Rec { r.iter().map(|(p, u)| (p.clone(), gf.u_div(u, cu))).collect() };
    let (pa, pb) = (prim(&ra, &ca), prim(&rb, &cb));
    let (la, lb) = (pa[0].1.clone(), pb[0].1.clone());
    let gamma = gf.u_gcd(&la, &lb);
    let (da, db) = (rec_deg(&pa), rec_deg(&pb));
    let dg = gamma.len() - 1;
    let bound = dg + da.max(db);

    let eval = |r: &Rec, x: u32| -> Sp {
        r.iter().filter_map(|(p, u)| {
            let v = gf.u_eval(u, x);
            (v != ZERO).then(|| (p.clone(), v))
        })
        .collect()
    };
    let scale_rec = |r: &Rec, u: &U| -> Rec { r.iter().map(|(p, v)| (p.clone(), gf.u_mul(v, u))).collect() };

    let mut state: Option<(Rec, Rec, Rec, Vec<u32>)> = None;
    let mut modulus: U = vec![ONE];
    for beta in 1..gf.q1 {
        if gf.u_eval(&la, beta) == ZERO || gf.u_eval(&lb, beta) == ZERO {
            continue;
        }
        let (g, abar, bbar) = pgcd(gf, &eval(&pa, beta), &eval(&pb, beta), k - 1);
        if is_constant(&g) {
            let ra_out = scale_rec(&pa, &gf.u_div(&ca, &c));
            let rb_out = scale_rec(&pb, &gf.u_div(&cb, &c));
            let prefix = vec![0; k - 1];
            return (to_sp(&vec![(prefix, c)]), to_sp(&ra_out), to_sp(&rb_out));
        }
        let gb: Sp = {
            let s = gf.u_eval(&gamma, beta);
            g.iter().map(|(e, x)| (e.clone(), gf.mul(*x, s))).collect()
        };
        let lm = g[0].0.clone();
        let single = |s: &Sp| -> Rec { s.iter().map(|(e, x)| (e.clone(), vec![*x])).collect() };
        let restart = match &state {
            None => true,
            Some((_, _, _, cur)) => match lm.cmp(cur) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => continue,
                std::cmp::Ordering::Equal => false,
            },
        };
        if restart {
            state = Some((single(&gb), single(&abar), single(&bbar), lm));
            modulus = vec![gf.neg(beta), ONE];
        } else {
            let (h, ha, hb, _) = state.as_mut().expect("state present");
            let minv = gf.inv(gf.u_eval(&modulus, beta));
            *h = newton(gf, h, &gb, &modulus, beta, minv);
            *ha = newton(gf, ha, &abar, &modulus, beta, minv);
            *hb = newton(gf, hb, &bbar, &modulus, beta, minv);
            modulus = gf.u_mul(&modulus, &[gf.neg(beta), ONE]);
        }
        if modulus.len() - 1 <= bound {
            continue;
        }
        let (h, ha, hb, _) = state.as_ref().expect("state present");
        let dh = rec_deg(h);
        if dh + rec_deg(ha) != dg + da || dh + rec_deg(hb) != dg + db {
            continue;
        }
        let cont_h = content(h);
        let mut g_out: Rec = h.iter().map(|(p, u)| (p.clone(), gf.u_mul(&gf.u_div(u, &cont_h), &c))).collect();
        let lead = *g_out[0].1.last().expect("nonzero");
        let s_inv = gf.inv(lead);
        for (_, u) in g_out.iter_mut() {
            *u = gf.u_scale(u, s_inv);
        }
        // ā = (ca / c)·cont(H)·Ā / γ, divided by the normalizing scalar.
        let cof = |hx: &Rec, cx: &U| -> Rec {
            let factor = gf.u_scale(&gf.u_mul(&gf.u_div(cx, &c), &cont_h), lead);
            hx.iter().map(|(p, u)| (p.clone(), gf.u_div(&gf.u_mul(u, &factor), &gamma))).collect()
        };
        return (to_sp(&g_out), to_sp(&cof(ha, &ca)), to_sp(&cof(hb, &cb)));
    }
    unreachable!("ran out of evaluation points")
}

/// `H + (image - H(β)) / M(β) · M`, merging by prefix.
fn newton(gf: &Gf, h: &Rec, image: &Sp, m: &[u32], beta: u32, minv: u32) -> Rec {
    let mut out = Vec::with_capacity(h.len().max(image.len()));
    let (mut i, mut j) = (0, 0);
    loop {
        let (prefix, u, v): (Vec<u32>, &[u32], u32) = match (h.get(i), image.get(j)) {
            (None, None) => break,
            (Some((p, u)), None) => {
                i += 1;
                (p.clone(), u, ZERO)
            }
            (None, Some((e, v))) => {
                j += 1;
                (e.clone(), &[], *v)
            }
            (Some((p, u)), Some((e, v))) => match p.cmp(e) {
                std::cmp::Ordering::Greater => {
                    i += 1;
                    (p.clone(), u, ZERO)
                }
                std::cmp::Ordering::Less => {
                    j += 1;
                    (e.clone(), &[], *v)
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (p.clone(), u, *v)
                }
            },
        };
        let t = gf.mul(gf.sub(v, gf.u_eval(u, beta)), minv);
        let w = gf.u_add(u, &gf.u_scale(m, t));
        if !w.is_empty() {
            out.push((prefix, w));
        }
    }
    out
}

/// Monic gcd of two nonzero polynomials over `F_p` (or `F_p[t]`).
pub(crate) fn gcd_modular(f: &MPoly, g: &MPoly) -> MPoly {
    let ring = f.ring;
    let gf = Gf::for_prime(ring.p());
    let nv = ring.nvars();
    let used: Vec<usize> = (0..nv).filter(|&v| f.deg_in(v) > 0 || g.deg_in(v) > 0).collect();
    let convert = |x: &MPoly| -> Sp {
        let mut s: Sp = x.terms.iter().map(|(e, c)| (used.iter().map(|&v| e[v]).collect(), gf.from_fp(*c))).collect();
        s.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        s
    };
    let (h, _, _) = pgcd(gf, &convert(f), &convert(g), used.len());
    let terms = h
        .into_iter()
        .map(|(e, c)| {
            let mut full = super::Exp::from_elem(0, nv);
            for (&v, k) in used.iter().zip(e) {
                full[v] = k;
            }
            (full, gf.to_fp(c).expect("gcd of prime-field inputs lies over the prime field"))
        })
        .collect();
    MPoly::from_raw(ring, terms)
}
