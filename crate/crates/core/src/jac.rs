//! Jacobian matrices, their maximal minors and the differential gcd.
//!
//! Column indices are 0-based throughout the library API.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mpoly::{gcd_raw, MPoly};

/// The jacobian matrix of a tuple together with all maximal minors and dgcd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianReport {
    /// Entry `(i, j)` is `∂f_i/∂x_j`.
    pub matrix: Vec<Vec<MPoly>>,
    /// Every sorted column set with its minor, in lex order of the sets.
    pub minors: Vec<(Vec<usize>, MPoly)>,
    /// Normalized gcd of the minors; zero iff every minor vanishes.
    pub dgcd: MPoly,
}

pub(crate) fn check_tuple(fs: &[MPoly]) -> Result<()> {
    let Some(first) = fs.first() else {
        return Err(Error::ArityViolation { m: 0, n: 0 });
    };
    let n = first.arity();
    if fs.len() > n {
        return Err(Error::ArityViolation { m: fs.len(), n });
    }
    if fs.iter().any(|f| f.ring() != first.ring()) {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

pub fn jacobian_matrix(fs: &[MPoly]) -> Result<Vec<Vec<MPoly>>> {
    check_tuple(fs)?;
    Ok(fs.iter().map(|f| f.gradient()).collect())
}

/// All `m`-element subsets of `0..n` in lex order.
pub fn column_sets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for j in start..=n - left {
            cur.push(j);
            go(j + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m <= n {
        go(0, n, m, &mut Vec::new(), &mut out);
    }
    out
}

fn check_cols(cols: &[usize], m: usize, n: usize) -> Result<()> {
    if cols.len() != m {
        return Err(Error::BadColumnSet(format!("expected {m} columns, got {}", cols.len())));
    }
    if cols.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadColumnSet("columns must be strictly increasing".into()));
    }
    if let Some(&j) = cols.iter().find(|&&j| j >= n) {
        return Err(Error::BadColumnSet(format!("column {j} out of range for {n} variables")));
    }
    Ok(())
}

/// Determinants of square submatrices by cofactor expansion along the first
/// row, memoized on the set of remaining columns. The rows used are
/// `rows[k..]` where `k` is the number of columns already removed.
pub(crate) struct MinorCache<'a> {
    matrix: &'a [Vec<MPoly>],
    rows: Vec<usize>,
    memo: HashMap<u64, MPoly>,
}

impl<'a> MinorCache<'a> {
    pub(crate) fn new(matrix: &'a [Vec<MPoly>], rows: Vec<usize>) -> Self {
        MinorCache { matrix, rows, memo: HashMap::new() }
    }

    /// Determinant of the rows given at construction against `cols`.
    pub(crate) fn det(&mut self, cols: &[usize]) -> MPoly {
        debug_assert_eq!(cols.len(), self.rows.len());
        let mask = cols.iter().fold(0u64, |m, &j| m | (1 << j));
        self.det_mask(mask)
    }

    fn det_mask(&mut self, mask: u64) -> MPoly {
        let k = self.rows.len() - mask.count_ones() as usize;
        let ring = self.matrix[0][0].ring();
        if mask == 0 {
            return MPoly::one(ring);
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let row = &self.matrix[self.rows[k]];
        let mut acc = MPoly::zero(ring);
        let mut sign_neg = false;
        for j in 0..64 {
            if mask & (1 << j) == 0 {
                continue;
            }
            let entry = &row[j];
            if !entry.is_zero() {
                let sub = self.det_mask(mask & !(1 << j));
                if !sub.is_zero() {
                    let term = entry * &sub;
                    acc = if sign_neg { &acc - &term } else { &acc + &term };
                }
            }
            sign_neg = !sign_neg;
        }
        self.memo.insert(mask, acc.clone());
        acc
    }
}

pub fn minor(fs: &[MPoly], cols: &[usize]) -> Result<MPoly> {
    let matrix = jacobian_matrix(fs)?;
    check_cols(cols, fs.len(), fs[0].arity())?;
    Ok(MinorCache::new(&matrix, (0..fs.len()).collect()).det(cols))
}

/// All maximal minors, in the order of [`column_sets`].
pub fn ijac_generators(fs: &[MPoly]) -> Result<Vec<MPoly>> {
    Ok(minors_with_sets(fs)?.into_iter().map(|(_, d)| d).collect())
}

fn minors_with_sets(fs: &[MPoly]) -> Result<Vec<(Vec<usize>, MPoly)>> {
    let matrix = jacobian_matrix(fs)?;
    Ok(minors_of(&matrix, fs.len(), fs[0].arity()))
}

fn minors_of(matrix: &[Vec<MPoly>], m: usize, n: usize) -> Vec<(Vec<usize>, MPoly)> {
    let mut cache = MinorCache::new(matrix, (0..m).collect());
    column_sets(n, m)
        .into_iter()
        .map(|cols| {
            let d = cache.det(&cols);
            (cols, d)
        })
        .collect()
}

/// Normalized gcd of a list, folded in order; zero when every entry is zero.
pub(crate) fn gcd_all<'a>(items: impl IntoIterator<Item = &'a MPoly>, ring: crate::mpoly::Ring) -> MPoly {
    let mut acc = MPoly::zero(ring);
    for d in items {
        if d.is_zero() {
            continue;
        }
        acc = gcd_raw(&acc, d);
        if acc.is_unit() {
            break;
        }
    }
    acc.normalized()
}

pub fn dgcd(fs: &[MPoly]) -> Result<MPoly> {
    Ok(jacobian_report(fs)?.dgcd)
}

pub fn jacobian_report(fs: &[MPoly]) -> Result<JacobianReport> {
    let matrix = jacobian_matrix(fs)?;
    let minors = minors_of(&matrix, fs.len(), fs[0].arity());
    let dgcd = gcd_all(minors.iter().map(|(_, d)| d), fs[0].ring());
    Ok(JacobianReport { matrix, minors, dgcd })
}
