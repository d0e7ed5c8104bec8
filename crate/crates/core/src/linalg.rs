//! Dense linear algebra over `F_p` and over a large extension `F_{p^k}`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::coeff::fp;

/// Reduced row echelon form in place; returns the pivot columns.
pub(crate) fn rref(rows: &mut [Vec<u32>], ncols: usize, p: u32) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = fp::inv(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = fp::mul(*v, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (v, &w) in row.iter_mut().zip(&pivot_row).skip(c) {
                if w != 0 {
                    *v = fp::add(*v, fp::mul(f, w, p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel, one vector per free column in increasing order.
/// Each vector has a 1 at its free column and zeros at the other free columns.
pub(crate) fn kernel(mut rows: Vec<Vec<u32>>, ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let pivots = rref(&mut rows, ncols, p);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; ncols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = fp::neg(rows[r][free], p);
            }
            v
        })
        .collect()
}

/// The field `F_p[z]/(μ)` for a fixed irreducible `μ` of degree `k`, with
/// `p^k` above `2^20`. Evaluating a polynomial matrix at a random point of it
/// preserves the rank except with tiny probability.
#[derive(Clone, Debug)]
pub(crate) struct ExtField {
    p: u32,
    modulus: Vec<u32>,
}

pub(crate) type Ext = Vec<u32>;

fn is_irreducible(f: &[u32], p: u32) -> bool {
    // Over F_p a polynomial of degree k is irreducible iff gcd(f, z^{p^i} - z) = 1
    // for all i <= k/2.
    let k = f.len() - 1;
    let z = vec![0, 1];
    let mut power = z.clone();
    for _ in 0..k / 2 {
        power = powmod(&power, p as u64, f, p);
        let diff = fp::poly_sub(&power, &z, p);
        let g = fp::poly_gcd(&diff, f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    fp::poly_divrem(&fp::poly_mul(a, b, p), m, p).1
}

fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut base = fp::poly_divrem(a, m, p).1;
    let mut acc = vec![1];
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

impl ExtField {
    pub(crate) fn for_prime(p: u32) -> ExtField {
        static CACHE: OnceLock<Mutex<HashMap<u32, ExtField>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("cache lock");
        guard
            .entry(p)
            .or_insert_with(|| {
                let mut k = 1;
                while (p as u64).pow(k) < (1 << 20) {
                    k += 1;
                }
                let k = k as usize;
                // First irreducible z^k + (lower terms) in counting order.
                let mut low = vec![0u32; k];
                loop {
                    let mut f = low.clone();
                    f.push(1);
                    if f[0] != 0 && is_irreducible(&f, p) {
                        return ExtField { p, modulus: f };
                    }
                    for d in low.iter_mut() {
                        *d += 1;
                        if *d < p {
                            break;
                        }
                        *d = 0;
                    }
                }
            })
            .clone()
    }

    pub(crate) fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub(crate) fn from_fp(&self, v: u32) -> Ext {
        let mut out = vec![v % self.p];
        fp::trim(&mut out);
        out
    }

    pub(crate) fn add(&self, a: &Ext, b: &Ext) -> Ext {
        fp::poly_add(a, b, self.p)
    }

    pub(crate) fn sub(&self, a: &Ext, b: &Ext) -> Ext {
        fp::poly_sub(a, b, self.p)
    }

    pub(crate) fn mul(&self, a: &Ext, b: &Ext) -> Ext {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        mulmod(a, b, &self.modulus, self.p)
    }

    pub(crate) fn pow(&self, a: &Ext, e: u64) -> Ext {
        powmod(a, e, &self.modulus, self.p)
    }

    pub(crate) fn inv(&self, a: &Ext) -> Ext {
        let q = (self.p as u64).pow(self.degree() as u32);
        self.pow(a, q - 2)
    }

    /// Element from raw digits, reduced.
    pub(crate) fn from_digits(&self, digits: Vec<u32>) -> Ext {
        let mut d = digits;
        fp::trim(&mut d);
        fp::poly_divrem(&d, &self.modulus, self.p).1
    }

    /// Value of `f` with internal variable `v` set to `point[v]`.
    pub(crate) fn eval(&self, f: &crate::mpoly::MPoly, point: &[Ext], powers: &mut HashMap<(usize, u32), Ext>) -> Ext {
        let mut acc = Vec::new();
        for (e, c) in f.raw_terms() {
            let mut term = self.from_fp(*c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = powers.entry((v, k)).or_insert_with(|| self.pow(&point[v], k as u64));
                term = self.mul(&term, pw);
            }
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// Rank of a dense matrix over this field.
    pub(crate) fn rank(&self, mut rows: Vec<Vec<Ext>>) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..ncols {
            if r == rows.len() {
                break;
            }
            let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_empty()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = self.inv(&rows[r][c]);
            let pivot: Vec<Ext> = rows[r].iter().map(|v| self.mul(v, &inv)).collect();
            for row in rows.iter_mut().skip(r + 1) {
                if row[c].is_empty() {
                    continue;
                }
                let f = row[c].clone();
                for (v, w) in row.iter_mut().zip(&pivot).skip(c) {
                    if !w.is_empty() {
                        *v = self.sub(v, &self.mul(&f, w));
                    }
                }
            }
            r += 1;
        }
        r
    }
}
