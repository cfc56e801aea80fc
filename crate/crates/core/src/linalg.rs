//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::arith::Rational;

/// Inverse and determinant; `None` for singular input.
pub fn inverse_det(m: &[Vec<Rational>]) -> Option<(Vec<Vec<Rational>>, Rational)> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let d = a[col][col].clone();
        det *= &d;
        let dinv = d.recip();
        for j in 0..n {
            a[col][j] *= &dinv;
            inv[col][j] *= &dinv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = &f * &a[col][j];
                    a[r][j] -= x;
                    let y = &f * &inv[col][j];
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some((inv, det))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// A particular solution plus the dimension of the kernel.
    Many(Vec<Rational>, usize),
    Inconsistent,
}

/// Solves `A x = b` exactly.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&n) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = aug[i][n].clone();
    }
    if piv.len() == n {
        Solution::Unique(x)
    } else {
        Solution::Many(x, n - piv.len())
    }
}
