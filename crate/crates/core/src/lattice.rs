//! Even lattices and their discriminant forms.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{frac, int, Rational};
use crate::error::{Error, Result};

/// An even lattice given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub gram: Vec<Vec<i64>>,
    pub e: usize,
    pub sig_plus: usize,
    pub sig_minus: usize,
}

impl Lattice {
    /// Validates the Gram matrix (square, symmetric, even diagonal,
    /// nonsingular) and computes the signature.
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let e = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != e {
                return Err(Error::Input(format!("row {i} has {} entries, expected {e}", row.len())));
            }
        }
        for i in 0..e {
            if gram[i][i] % 2 != 0 {
                return Err(Error::Input(format!("diagonal entry ({i},{i}) = {} is odd", gram[i][i])));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Input(format!(
                        "entries ({i},{j}) = {} and ({j},{i}) = {} differ",
                        gram[i][j], gram[j][i]
                    )));
                }
            }
        }
        let mut l = Lattice { gram, e, sig_plus: 0, sig_minus: 0 };
        if l.det().is_zero() {
            return Err(Error::Singular);
        }
        let (p, m) = signature(&l)?;
        l.sig_plus = p;
        l.sig_minus = m;
        Ok(l)
    }

    pub fn rank0() -> Self {
        Lattice { gram: Vec::new(), e: 0, sig_plus: 0, sig_minus: 0 }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let n = self.e;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut a: Vec<Vec<BigInt>> = self.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut sign = 1i64;
        let mut prev = BigInt::from(1);
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        prev * sign
    }

    pub fn gram_rational(&self) -> Vec<Vec<Rational>> {
        self.gram.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    /// The lattice with Gram matrix `-S`.
    pub fn negated(&self) -> Self {
        Lattice {
            gram: self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
            e: self.e,
            sig_plus: self.sig_minus,
            sig_minus: self.sig_plus,
        }
    }

    /// Orthogonal sum with another lattice.
    pub fn direct_sum(&self, o: &Lattice) -> Result<Self> {
        let n = self.e + o.e;
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..self.e {
            for j in 0..self.e {
                g[i][j] = self.gram[i][j];
            }
        }
        for i in 0..o.e {
            for j in 0..o.e {
                g[self.e + i][self.e + j] = o.gram[i][j];
            }
        }
        Lattice::new(g)
    }
}

/// Inertia `(b⁺, b⁻)` by exact symmetric elimination over the rationals.
pub fn signature(l: &Lattice) -> Result<(usize, usize)> {
    let mut m = l.gram_rational();
    let mut active: Vec<usize> = (0..l.e).collect();
    let (mut plus, mut minus) = (0, 0);
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| !m[i][i].is_zero());
        let i = match piv {
            Some(i) => i,
            None => {
                // all remaining diagonal entries vanish: x_i -> x_i + x_j
                let mut found = None;
                for &i in &active {
                    for &j in &active {
                        if i != j && !m[i][j].is_zero() {
                            found = Some((i, j));
                        }
                    }
                }
                let (i, j) = found.ok_or(Error::Singular)?;
                for k in 0..l.e {
                    let v = m[j][k].clone();
                    m[i][k] += v;
                }
                for k in 0..l.e {
                    let v = m[k][j].clone();
                    m[k][i] += v;
                }
                i
            }
        };
        let d = m[i][i].clone();
        if d.is_positive() {
            plus += 1;
        } else {
            minus += 1;
        }
        active.retain(|&x| x != i);
        for &a in &active {
            for &b in &active {
                let v = &m[a][i] * &m[i][b] / &d;
                m[a][b] -= v;
            }
        }
    }
    Ok((plus, minus))
}

/// An element of `Λ'/Λ`, in lattice-basis coordinates reduced into `[0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<Rational>,
}

impl GroupElement {
    pub fn reduced(coords: Vec<Rational>) -> Self {
        GroupElement { coords: coords.iter().map(frac).collect() }
    }
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
    /// Comma-separated coordinates, e.g. `"1/4,0"`.
    pub fn label(&self) -> String {
        self.coords.iter().map(crate::arith::fmt_rational).collect::<Vec<_>>().join(",")
    }
}

/// The discriminant group `Λ'/Λ` with its quadratic form.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    pub lattice: Lattice,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<GroupElement>,
    pub order: usize,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    /// Group exponent `D`; element `i` is `int_coords[i] / D`.
    exponent: i64,
    int_coords: Vec<Vec<i64>>,
    int_index: HashMap<Vec<i64>, usize>,
    q_cache: Vec<Rational>,
}

/// Smith normal form `U S V = D`; returns the diagonal and `V`.
fn smith_v(s: &[Vec<i64>]) -> (Vec<i128>, Vec<Vec<i128>>) {
    let n = s.len();
    let mut a: Vec<Vec<i128>> = s.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let swap_cols = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in v.iter_mut() {
            row.swap(x, y);
        }
    };
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            swap_cols(&mut a, &mut v, t, bj);
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in 0..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in 0..n {
                        a[i][j] -= q * a[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            let bad_row = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match bad_row {
                Some(i) => {
                    for j in 0..n {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if t < n && a[t][t] < 0 {
            for j in 0..n {
                a[t][j] = -a[t][j];
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

impl DiscriminantGroup {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let n = lattice.e;
        let (diag, v) = smith_v(&lattice.gram);
        if diag.iter().any(|&d| d == 0) {
            return Err(Error::Singular);
        }
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            if d > 1 {
                factors.push(d as u64);
                generators.push(GroupElement::reduced(
                    (0..n).map(|r| Rational::new(BigInt::from(v[r][i]), BigInt::from(d))).collect(),
                ));
            }
        }
        let mut elements = vec![GroupElement::reduced(vec![Rational::zero(); n])];
        for (g, &d) in generators.iter().zip(&factors) {
            let mut next = Vec::with_capacity(elements.len() * d as usize);
            for x in &elements {
                for a in 0..d {
                    next.push(GroupElement::reduced(
                        x.coords.iter().zip(&g.coords).map(|(c, gc)| c + gc * int(a as i64)).collect(),
                    ));
                }
            }
            elements = next;
        }
        elements.sort();
        elements.dedup();
        let order = elements.len();
        debug_assert_eq!(BigInt::from(order), lattice.det().abs());
        let index = elements.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        // invariant factors in divisibility order
        factors.sort_unstable();
        let exponent = factors.iter().fold(1u64, |a, b| a.lcm(b)) as i64;
        let int_coords: Vec<Vec<i64>> = elements
            .iter()
            .map(|x| x.coords.iter().map(|c| (c * int(exponent)).to_integer().to_i64().unwrap()).collect())
            .collect();
        let int_index = int_coords.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut g = DiscriminantGroup {
            lattice: lattice.clone(),
            invariant_factors: factors,
            generators,
            order,
            elements,
            index,
            exponent,
            int_coords,
            int_index,
            q_cache: Vec::new(),
        };
        g.q_cache = (0..order).map(|a| Rational::new(BigInt::from(g.int_form(a, a)), BigInt::from(2 * exponent * exponent))).collect();
        Ok(g)
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }
    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Index of the class of an arbitrary vector of `Λ'`.
    pub fn index_of(&self, coords: &[Rational]) -> Result<usize> {
        if coords.len() != self.lattice.e {
            return Err(Error::Input(format!("expected {} coordinates, got {}", self.lattice.e, coords.len())));
        }
        let g = GroupElement::reduced(coords.to_vec());
        self.index.get(&g).copied().ok_or_else(|| Error::Input(format!("({}) is not in the dual lattice", g.label())))
    }

    pub fn zero(&self) -> usize {
        0
    }

    /// `D²·γ_aᵀSγ_b` for the stored representatives, `D` the exponent.
    fn int_form(&self, a: usize, b: usize) -> i128 {
        let (x, y) = (&self.int_coords[a], &self.int_coords[b]);
        let mut s = 0i128;
        for i in 0..self.lattice.e {
            for j in 0..self.lattice.e {
                s += x[i] as i128 * self.lattice.gram[i][j] as i128 * y[j] as i128;
            }
        }
        s
    }

    /// Group exponent `D` and the integer vector `D·γ` of an element.
    pub fn integral(&self, a: usize) -> (i64, &[i64]) {
        (self.exponent, &self.int_coords[a])
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let d = self.exponent;
        let c: Vec<i64> = self.int_coords[a].iter().zip(&self.int_coords[b]).map(|(x, y)| (x + y).rem_euclid(d)).collect();
        self.int_index[&c]
    }

    pub fn scalar(&self, lambda: i64, a: usize) -> usize {
        let d = self.exponent;
        let l = lambda.rem_euclid(d);
        let c: Vec<i64> = self.int_coords[a].iter().map(|x| (x * l).rem_euclid(d)).collect();
        self.int_index[&c]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.scalar(-1, a)
    }

    /// `xᵀ S y` for rational vectors.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.lattice.e {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.lattice.e {
                s += &x[i] * int(self.lattice.gram[i][j]) * &y[j];
            }
        }
        s
    }

    /// `½ γᵀSγ` for the stored representative (not reduced mod 1).
    pub fn q_exact(&self, a: usize) -> Rational {
        self.q_cache[a].clone()
    }

    /// `q(γ) mod 1` in `[0,1)`.
    pub fn q_value(&self, a: usize) -> Rational {
        frac(&self.q_exact(a))
    }

    /// `⟨γ,δ⟩ mod 1` in `[0,1)`.
    pub fn pairing(&self, a: usize, b: usize) -> Rational {
        let dd = (self.exponent * self.exponent) as i128;
        Rational::new(BigInt::from(self.int_form(a, b).rem_euclid(dd)), BigInt::from(dd))
    }

    /// Smallest `d ≥ 1` with `dβ ∈ Λ`.
    pub fn denominator(&self, a: usize) -> u64 {
        self.elements[a].coords.iter().fold(1u64, |acc, c| acc.lcm(&c.denom().to_u64().unwrap()))
    }

    /// `S·γ` for the stored representative (an integer vector).
    pub fn s_times(&self, a: usize) -> Vec<Rational> {
        let c = &self.elements[a].coords;
        (0..self.lattice.e)
            .map(|i| (0..self.lattice.e).map(|j| int(self.lattice.gram[i][j]) * &c[j]).sum())
            .collect()
    }
}
