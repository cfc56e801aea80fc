//! Local zeta functions of quadratic polynomials over `Z_p`.
//!
//! A [`QuadraticPolynomial`] is brought into an isospectral normal form at
//! `p`; the Igusa zeta function `ζ(t) = ∫ |f|^s`, `t = p^{-s}`, is then read
//! off in closed form. Solution counts satisfy
//!
//! ```text
//! (1 - t ζ(t)) / (1 - t) = Σ_ν N(p^ν) p^{-ν N} t^ν
//! ```
//!
//! for a polynomial in `N` variables.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::{int, kronecker_symbol, mobius, mod_int, pow_rat, unit_part, vp, Rational};
use crate::error::{Error, Result};
use crate::ratfunc::{Poly, RationalFunctionT};

/// Largest number of residue vectors [`count_solutions`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

/// `f(x) = ½ xᵀGx + ℓ·x + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticPolynomial {
    pub gram: Vec<Vec<Rational>>,
    pub linear: Vec<Rational>,
    pub constant: Rational,
}

impl QuadraticPolynomial {
    pub fn new(gram: Vec<Vec<Rational>>, linear: Vec<Rational>, constant: Rational) -> Self {
        assert_eq!(gram.len(), linear.len());
        QuadraticPolynomial { gram, linear, constant }
    }

    pub fn constant_only(c: Rational) -> Self {
        Self::new(Vec::new(), Vec::new(), c)
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let n = self.nvars();
        let mut s = self.constant.clone();
        for i in 0..n {
            s += &self.linear[i] * &x[i];
            for j in 0..n {
                s += &self.gram[i][j] * &x[i] * &x[j] / int(2);
            }
        }
        s
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        QuadraticPolynomial {
            gram: self.gram.iter().map(|r| r.iter().map(|x| x * k).collect()).collect(),
            linear: self.linear.iter().map(|x| x * k).collect(),
            constant: &self.constant * k,
        }
    }

    /// `f + xy` in two fresh variables.
    pub fn with_hyperbolic_plane(&self) -> Self {
        let n = self.nvars();
        let mut g = vec![vec![Rational::zero(); n + 2]; n + 2];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.gram[i][j].clone();
            }
        }
        g[n][n + 1] = int(1);
        g[n + 1][n] = int(1);
        let mut l = self.linear.clone();
        l.extend([Rational::zero(), Rational::zero()]);
        QuadraticPolynomial { gram: g, linear: l, constant: self.constant.clone() }
    }

    /// Coefficients of the monomials `x_i²`, `x_i x_j (i<j)`, `x_i`, `1`.
    fn monomials(&self) -> (Vec<Vec<Rational>>, Vec<Rational>, Rational) {
        let n = self.nvars();
        let mut a = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            a[i][i] = &self.gram[i][i] / int(2);
            for j in i + 1..n {
                a[i][j] = (&self.gram[i][j] + &self.gram[j][i]) / int(2);
            }
        }
        (a, self.linear.clone(), self.constant.clone())
    }

    /// All monomial coefficients have nonnegative valuation at `p`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        let (a, l, c) = self.monomials();
        a.iter().flatten().chain(l.iter()).chain(std::iter::once(&c)).all(|x| vp(x, p).is_none_or(|v| v >= 0))
    }
}

/// Number of `x ∈ (Z/aZ)^N` with `f(x) ≡ 0 (mod a)`.
pub fn count_solutions_mod(f: &QuadraticPolynomial, a: u64) -> Result<u64> {
    let n = f.nvars();
    if a == 1 {
        return Ok(1);
    }
    let states = (a as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard(states));
    }
    let (q, l, c) = f.monomials();
    let red = |x: &Rational| -> Result<u64> {
        if num_integer::Integer::gcd(x.denom(), &BigInt::from(a)) != BigInt::one() {
            return Err(Error::Precondition(format!("coefficient {x} is not integral at the modulus {a}")));
        }
        Ok(mod_int(x, a))
    };
    let qm: Vec<Vec<u64>> = q.iter().map(|r| r.iter().map(red).collect::<Result<_>>()).collect::<Result<_>>()?;
    let mut lm: Vec<u64> = l.iter().map(red).collect::<Result<_>>()?;
    let cm = red(&c)?;
    Ok(count_rec(0, a, &qm, &mut lm, cm))
}

fn count_rec(k: usize, m: u64, q: &[Vec<u64>], lin: &mut [u64], c: u64) -> u64 {
    let n = q.len();
    if k == n {
        return (c % m == 0) as u64;
    }
    let mm = m as u128;
    if k + 1 == n {
        let (a, l) = (q[k][k] as u128, lin[k] as u128);
        return (0..mm).filter(|&x| (a * (x * x % mm) + l * x + c as u128) % mm == 0).count() as u64;
    }
    let saved: Vec<u64> = lin[k + 1..].to_vec();
    let mut total = 0;
    for x in 0..mm {
        let c2 = ((q[k][k] as u128 * (x * x % mm) + lin[k] as u128 * x + c as u128) % mm) as u64;
        for j in k + 1..n {
            lin[j] = ((saved[j - k - 1] as u128 + q[k][j] as u128 * x) % mm) as u64;
        }
        total += count_rec(k + 1, m, q, lin, c2);
    }
    lin[k + 1..].copy_from_slice(&saved);
    total
}

/// `N(p^ν)` by direct enumeration.
pub fn count_solutions(f: &QuadraticPolynomial, p: u64, nu: u32) -> Result<u64> {
    let a = p.checked_pow(nu).ok_or(Error::SizeGuard(u128::MAX))?;
    count_solutions_mod(f, a)
}

/// Unimodular constituent of a normal form. `Sq(u)` is `u·x²`; at `p = 2`
/// `Hyp` is `2xy` and `Ell` is `2(x² + xy + y²)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnimodularBlock {
    Sq(Rational),
    Hyp,
    Ell,
}

/// `f ≅ ⊕ p^i Q_i ⊕ p^λ y + c`, isospectral to the source at `p`.
///
/// At `p = 2` the normal form describes `2f` (`doubled = true`), which makes
/// every block of the shape `xᵀS x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalFormAtP {
    pub p: u64,
    pub blocks: Vec<(i64, UnimodularBlock)>,
    pub linear: Option<i64>,
    pub constant: Rational,
    pub nvars: usize,
    pub doubled: bool,
}

impl NormalFormAtP {
    /// Canonical sort, so equal forms hash equally.
    fn canonicalize(&mut self) {
        let p = self.p;
        for (_, b) in self.blocks.iter_mut() {
            if let UnimodularBlock::Sq(u) = b {
                // only the class of the unit matters
                let m = if p == 2 { 8 } else { p };
                *u = int(mod_int(u, m) as i64);
            }
        }
        self.blocks.sort_by(|a, b| (a.0, format!("{:?}", a.1)).cmp(&(b.0, format!("{:?}", b.1))));
    }

    /// An explicit polynomial with exactly this normal form, padded with
    /// unused variables to the source's variable count.
    pub fn realize(&self) -> QuadraticPolynomial {
        let n = self.nvars;
        let mut g = vec![vec![Rational::zero(); n]; n];
        let mut l = vec![Rational::zero(); n];
        let mut i = 0;
        for (v, b) in &self.blocks {
            let s = pow_rat(&int(self.p as i64), *v);
            match b {
                UnimodularBlock::Sq(u) => {
                    g[i][i] = &s * u * int(2);
                    i += 1;
                }
                UnimodularBlock::Hyp => {
                    g[i][i + 1] = &s * int(2);
                    g[i + 1][i] = &s * int(2);
                    i += 2;
                }
                UnimodularBlock::Ell => {
                    g[i][i] = &s * int(4);
                    g[i + 1][i + 1] = &s * int(4);
                    g[i][i + 1] = &s * int(2);
                    g[i + 1][i] = &s * int(2);
                    i += 2;
                }
            }
        }
        if let Some(lam) = self.linear {
            l[i] = pow_rat(&int(self.p as i64), lam);
        }
        QuadraticPolynomial::new(g, l, self.constant.clone())
    }
}

fn val(x: &Rational, p: u64) -> i64 {
    vp(x, p).unwrap_or(i64::MAX / 4)
}

enum RawBlock {
    Sq { v: i64, u: Rational, l: Rational },
    Bin { v: i64, m: [Rational; 3], l: [Rational; 2] },
}

/// Jordan splitting with linear-term elimination.
pub fn normal_form(f: &QuadraticPolynomial, p: u64) -> Result<NormalFormAtP> {
    if !f.is_p_integral(p) {
        return Err(Error::Precondition(format!("polynomial is not {p}-integral")));
    }
    let n = f.nvars();
    let doubled = p == 2;
    let two = int(2);
    // work with f = xᵀBx + L·x + c (or with 2f at p = 2)
    let k = if doubled { int(1) } else { Rational::new(BigInt::one(), BigInt::from(2)) };
    let mut b: Vec<Vec<Rational>> = f.gram.iter().map(|r| r.iter().map(|x| x * &k).collect()).collect();
    let mut l: Vec<Rational> = f.linear.iter().map(|x| if doubled { x * &two } else { x.clone() }).collect();
    let mut c = if doubled { &f.constant * &two } else { f.constant.clone() };

    let mut active: Vec<usize> = (0..n).collect();
    let mut raw = Vec::new();
    let mut lins: Vec<i64> = Vec::new();
    while !active.is_empty() {
        let mut best: Option<((i64, u8), usize, usize)> = None;
        for &i in &active {
            for &j in &active {
                if !b[i][j].is_zero() {
                    let key = (val(&b[i][j], p), (i != j) as u8);
                    if best.as_ref().is_none_or(|(k0, _, _)| key < *k0) {
                        best = Some((key, i, j));
                    }
                }
            }
        }
        let Some(((v, off), i, j)) = best else {
            lins.extend(active.iter().filter(|&&i| !l[i].is_zero()).map(|&i| val(&l[i], p)));
            break;
        };
        if off == 1 && p != 2 {
            // x_i -> x_i + x_j produces a unit-scale diagonal entry
            for r in 0..n {
                let t = b[r][i].clone();
                b[r][j] += t;
            }
            for r in 0..n {
                let t = b[i][r].clone();
                b[j][r] += t;
            }
            let t = l[i].clone();
            l[j] += t;
            continue;
        }
        if off == 0 {
            let u = b[i][i].clone();
            let others: Vec<usize> = active.iter().copied().filter(|&x| x != i).collect();
            let coef: HashMap<usize, Rational> = others.iter().map(|&x| (x, &b[i][x] / &u)).collect();
            for &x in &others {
                for &y in &others {
                    let t = &b[x][i] * &b[i][y] / &u;
                    b[x][y] -= t;
                }
            }
            for &x in &others {
                let t = &l[i] * &coef[&x];
                l[x] -= t;
            }
            for &x in &others {
                b[i][x] = Rational::zero();
                b[x][i] = Rational::zero();
            }
            raw.push(RawBlock::Sq { v, u, l: l[i].clone() });
            active.retain(|&x| x != i);
        } else {
            let (a, bb, d) = (b[i][i].clone(), b[i][j].clone(), b[j][j].clone());
            let det = &a * &d - &bb * &bb;
            let inv = [&d / &det, -&bb / &det, &a / &det];
            let others: Vec<usize> = active.iter().copied().filter(|&x| x != i && x != j).collect();
            let co: HashMap<usize, (Rational, Rational)> = others
                .iter()
                .map(|&x| (x, (&inv[0] * &b[i][x] + &inv[1] * &b[j][x], &inv[1] * &b[i][x] + &inv[2] * &b[j][x])))
                .collect();
            for &x in &others {
                for &y in &others {
                    let t = &b[x][i] * &co[&y].0 + &b[x][j] * &co[&y].1;
                    b[x][y] -= t;
                }
            }
            for &x in &others {
                let t = &l[i] * &co[&x].0 + &l[j] * &co[&x].1;
                l[x] -= t;
            }
            for &x in &others {
                for y in [i, j] {
                    b[y][x] = Rational::zero();
                    b[x][y] = Rational::zero();
                }
            }
            raw.push(RawBlock::Bin { v, m: [a, bb, d], l: [l[i].clone(), l[j].clone()] });
            active.retain(|&x| x != i && x != j);
        }
    }

    let mut blocks = Vec::new();
    for blk in raw {
        match blk {
            RawBlock::Sq { v, u, l: li } => {
                let lv = val(&li, p);
                let absorb = li.is_zero() || (p != 2 && lv >= v) || (p == 2 && lv > v);
                if absorb {
                    if !li.is_zero() {
                        c -= &li * &li / (int(4) * &u);
                    }
                    blocks.push((v, UnimodularBlock::Sq(unit_part(&u, p))));
                } else if p == 2 && lv == v {
                    lins.push(v + 1);
                } else {
                    lins.push(lv);
                }
            }
            RawBlock::Bin { v, m: [a, bb, d], l: [l1, l2] } => {
                let lv = val(&l1, p).min(val(&l2, p));
                if lv > v {
                    let det = &a * &d - &bb * &bb;
                    let x0 = -(&d * &l1 - &bb * &l2) / (&det * int(2));
                    let x1 = -(&a * &l2 - &bb * &l1) / (&det * int(2));
                    c += &a * &x0 * &x0 + int(2) * &bb * &x0 * &x1 + &d * &x1 * &x1 + &l1 * &x0 + &l2 * &x1;
                    let du = mod_int(&unit_part(&det, p), 8);
                    let kind = match du {
                        7 => UnimodularBlock::Hyp,
                        3 => UnimodularBlock::Ell,
                        _ => return Err(Error::Unresolved(format!("binary block with determinant class {du} mod 8"))),
                    };
                    blocks.push((v, kind));
                } else {
                    lins.push(lv);
                }
            }
        }
    }
    let mut nf = NormalFormAtP { p, blocks, linear: lins.into_iter().min(), constant: c, nvars: n, doubled };
    nf.canonicalize();
    Ok(nf)
}

/// Value type of the closed formulas: either symbolic rational functions or
/// numbers at a fixed `t0`.
trait Alg {
    type V: Clone;
    fn k(&self, q: Rational) -> Self::V;
    fn t(&self, e: i64) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    /// `None` if `b` vanishes.
    fn div(&self, a: &Self::V, b: &Self::V) -> Option<Self::V>;

    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V {
        self.add(a, &self.mul(&self.k(int(-1)), b))
    }
    fn scale(&self, q: &Rational, a: &Self::V) -> Self::V {
        self.mul(&self.k(q.clone()), a)
    }
    /// `q1 + q2·t`
    fn lin(&self, q1: Rational, q2: Rational) -> Self::V {
        self.add(&self.k(q1), &self.mul(&self.k(q2), &self.t(1)))
    }
}

struct Sym;
impl Alg for Sym {
    type V = RationalFunctionT;
    fn k(&self, q: Rational) -> RationalFunctionT {
        RationalFunctionT::constant(q)
    }
    fn t(&self, e: i64) -> RationalFunctionT {
        RationalFunctionT::monomial(int(1), e as usize)
    }
    fn add(&self, a: &RationalFunctionT, b: &RationalFunctionT) -> RationalFunctionT {
        a + b
    }
    fn mul(&self, a: &RationalFunctionT, b: &RationalFunctionT) -> RationalFunctionT {
        a * b
    }
    fn div(&self, a: &RationalFunctionT, b: &RationalFunctionT) -> Option<RationalFunctionT> {
        (!b.is_zero()).then(|| a * &b.recip())
    }
}

struct At(Rational);
impl Alg for At {
    type V = Rational;
    fn k(&self, q: Rational) -> Rational {
        q
    }
    fn t(&self, e: i64) -> Rational {
        pow_rat(&self.0, e)
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn div(&self, a: &Rational, b: &Rational) -> Option<Rational> {
        (!b.is_zero()).then(|| a / b)
    }
}

fn ppow(p: u64, e: i64) -> Rational {
    pow_rat(&int(p as i64), e)
}

fn legendre(x: &Rational, p: u64) -> i32 {
    if x.is_zero() {
        return 0;
    }
    let r = mod_int(&unit_part(x, p), p);
    kronecker_symbol(r as i64, p as i64)
}

fn zeta_odd<A: Alg>(al: &A, nf: &NormalFormAtP) -> Option<A::V> {
    let p = nf.p;
    let mut ranks: BTreeMap<i64, i64> = BTreeMap::new();
    let mut discs: BTreeMap<i64, Rational> = BTreeMap::new();
    for (v, b) in &nf.blocks {
        let UnimodularBlock::Sq(u) = b else { return None };
        *ranks.entry(*v).or_insert(0) += 1;
        let d = discs.entry(*v).or_insert_with(|| int(1));
        *d *= u;
    }
    let r_at = |j: i64| -> i64 { (0..=j).filter(|i| (j - i) % 2 == 0).map(|i| ranks.get(&i).copied().unwrap_or(0)).sum() };
    let d_at = |j: i64| -> Rational {
        (0..=j).filter(|i| (j - i) % 2 == 0).fold(int(1), |acc, i| acc * discs.get(&i).cloned().unwrap_or_else(|| int(1)))
    };
    let p_at = |j: i64| -> Rational { ppow(p, (0..j).map(r_at).sum()) };
    let p1 = al.div(&al.k(int(p as i64 - 1)), &al.lin(int(p as i64), int(-1)))?;
    let ifun = |a: Option<&Rational>, rr: i64, dd: &Rational| -> A::V {
        let pa = a.is_none_or(|a| a.is_zero() || val(a, p) > 0);
        let sgn = |e: i64| if e % 2 == 0 { int(1) } else { int(-1) };
        if rr % 2 == 1 {
            if pa {
                return al.mul(&al.lin(int(1), -ppow(p, -rr)), &p1);
            }
            let chi = legendre(&(a.unwrap() * dd * sgn((rr + 1) / 2)), p);
            let h = ppow(p, -(rr + 1) / 2) * int(chi as i64);
            let x = al.mul(&al.lin(int(1), h.clone()), &p1);
            return al.sub(&x, &al.k(ppow(p, -rr) + h));
        }
        let chi = legendre(&(dd * sgn(rr / 2)), p);
        let h = ppow(p, -rr / 2) * int(chi as i64);
        let f = int(1) - &h;
        if pa {
            al.scale(&f, &al.mul(&al.lin(int(1), h), &p1))
        } else {
            al.scale(&f, &al.add(&p1, &al.k(h)))
        }
    };
    let term = |a: Option<&Rational>, nu: i64| -> A::V {
        let x = ifun(a, r_at(nu), &d_at(nu));
        al.scale(&p_at(nu).recip(), &al.mul(&x, &al.t(nu)))
    };
    let c = &nf.constant;
    let zero = al.k(Rational::zero());
    if nf.linear.is_none() && c.is_zero() {
        let om = ranks.keys().copied().max().unwrap_or(0).max(1);
        let rt: i64 = ranks.values().sum();
        let mut z = zero;
        for nu in 0..om - 1 {
            z = al.add(&z, &term(None, nu));
        }
        let tail = al.add(&term(None, om - 1), &term(None, om));
        let den = al.add(&al.k(int(1)), &al.scale(&-ppow(p, -rt), &al.t(2)));
        return Some(al.add(&z, &al.div(&tail, &den)?));
    }
    let kappa = vp(c, p);
    if let Some(lam) = nf.linear {
        if kappa.is_none_or(|k| k >= lam) {
            let mut z = zero;
            for nu in 0..lam {
                z = al.add(&z, &term(None, nu));
            }
            let last = al.scale(&p_at(lam).recip(), &al.mul(&al.t(lam), &p1));
            return Some(al.add(&z, &last));
        }
    }
    let kappa = kappa.unwrap();
    let mut z = zero;
    for nu in 0..=kappa {
        let a = c / ppow(p, nu);
        z = al.add(&z, &term(Some(&a), nu));
    }
    Some(al.add(&z, &al.scale(&p_at(kappa + 1).recip(), &al.t(kappa))))
}

/// A unimodular 2-adic form: squares (classes mod 8), hyperbolic and
/// elliptic planes.
#[derive(Clone, Debug, Default)]
struct Form2 {
    sq: Vec<u64>,
    hyp: i64,
    ell: i64,
}

impl Form2 {
    fn rank(&self) -> i64 {
        self.sq.len() as i64 + 2 * self.hyp + 2 * self.ell
    }
    fn eps(&self) -> i64 {
        if self.ell > 0 {
            -1
        } else {
            1
        }
    }
    /// At most two squares and at most one elliptic plane.
    fn normalized(mut self) -> Form2 {
        while self.sq.len() >= 3 {
            let u1 = self.sq.pop().unwrap();
            let u2 = self.sq.pop().unwrap();
            let u3 = self.sq.pop().unwrap();
            let db = (u1 * u2 + u1 * u3 + u2 * u3) % 8;
            if db == 7 {
                self.hyp += 1;
            } else {
                debug_assert_eq!(db, 3);
                self.ell += 1;
            }
            // db is its own inverse mod 8
            self.sq.push(u1 * u2 * u3 * db % 8);
        }
        while self.ell >= 2 {
            self.ell -= 2;
            self.hyp += 2;
        }
        self
    }
    fn sum(forms: &[&Form2]) -> Form2 {
        let mut r = Form2::default();
        for f in forms {
            r.sq.extend(&f.sq);
            r.hyp += f.hyp;
            r.ell += f.ell;
        }
        r.normalized()
    }
}

const INF: i64 = 1 << 40;

/// `2^{-x/2}` for even `x`.
fn h_half(x: i64) -> Rational {
    assert!(x % 2 == 0, "non-integral power of 2");
    ppow(2, -x / 2)
}

struct Two<'a, A: Alg> {
    al: &'a A,
}

impl<A: Alg> Two<'_, A> {
    fn ig(&self, a: &Rational, b: i64, nu: i64) -> A::V {
        let al = self.al;
        let va = if a.is_zero() { INF } else { val(a, 2) };
        let mb = b.min(nu);
        if va >= mb {
            al.div(&al.t(mb), &al.lin(int(2), int(-1))).expect("2 - t vanishes")
        } else {
            al.t(va)
        }
    }

    fn h(&self, a: &Rational, b: i64, q: &Form2) -> (A::V, A::V, A::V) {
        let al = self.al;
        let r = q.rank();
        let eps = int(q.eps());
        let ig = |x: &Rational, n: i64| self.ig(x, b, n);
        let c = |x: Rational| al.k(x);
        let one = int(1);
        match q.sq.len() {
            0 => {
                let h1 = al.scale(&(&one - ppow(2, -r)), &ig(a, 1));
                let he = h_half(r) * &eps;
                let h2 = al.scale(&(&one - &he), &al.add(&ig(a, 1), &al.scale(&he, &ig(a, 2))));
                (h1, h2, c(Rational::zero()))
            }
            1 => {
                let cc = int(q.sq[0] as i64);
                let ac = a + &cc;
                let h1 = al.sub(&ig(a, 0), &al.scale(&ppow(2, -r), &ig(a, 1)));
                let mut h2 = al.scale(&(&one - h_half(r - 1) * &eps), &ig(a, 0));
                h2 = al.sub(&h2, &al.scale(&ppow(2, -r), &ig(a, 2)));
                h2 = al.add(&h2, &al.scale(&(h_half(r + 1) * &eps), &al.add(&ig(a, 2), &ig(&ac, 2))));
                let h3 = al.scale(&ppow(2, -r), &al.sub(&ig(&ac, 3), &ig(&ac, 2)));
                (h1, h2, h3)
            }
            _ => {
                let (cu, du) = (q.sq[0], q.sq[1]);
                let cc = int(cu as i64);
                let h1 = al.sub(&ig(a, 0), &al.scale(&ppow(2, -r), &ig(a, 1)));
                if (cu + du) % 4 == 0 {
                    let he = h_half(r) * &eps;
                    let mut h2 = al.sub(&ig(a, 0), &al.scale(&he, &ig(a, 1)));
                    h2 = al.add(&h2, &al.scale(&(&he - ppow(2, -r)), &ig(a, 2)));
                    let sign = if ((cu + du) / 4) % 2 == 0 { int(1) } else { int(-1) };
                    let h3 = al.scale(&(sign * ppow(2, -r)), &al.sub(&ig(a, 3), &ig(a, 2)));
                    (h1, h2, h3)
                } else {
                    let ac = a + &cc;
                    let acd = a + &cc + int(du as i64);
                    let mut h2 = al.scale(&(&one - h_half(r - 2) * &eps), &ig(a, 0));
                    h2 = al.add(&h2, &al.scale(&(h_half(r) * &eps), &al.add(&ig(a, 1), &ig(&ac, 2))));
                    h2 = al.sub(&h2, &al.scale(&ppow(2, -r), &ig(a, 2)));
                    let mut h3 = al.scale(&-ppow(2, 1 - r), &ig(a, 1));
                    h3 = al.add(&h3, &al.scale(&ppow(2, -r), &al.add(&ig(a, 2), &ig(&acd, 3))));
                    (h1, h2, h3)
                }
            }
        }
    }

    fn i2(&self, a: &Rational, b: i64, q0: &Form2, q1: &Form2, q2: &Form2) -> A::V {
        let al = self.al;
        let r1 = q1.rank();
        let e1 = int(q1.eps());
        let (s1, s2) = (q1.sq.len(), q2.sq.len());
        if s1 >= 1 && s2 >= 1 {
            return self.h(a, b, q0).0;
        }
        if s1 == 0 && s2 >= 1 {
            return self.h(a, b, q0).1;
        }
        if s1 == 0 {
            let (_, h2, h3) = self.h(a, b, q0);
            return al.add(&h2, &al.scale(&(h_half(r1) * e1), &h3));
        }
        if s1 == 1 {
            let cc = int(q1.sq[0] as i64);
            let (h1, _, h3) = self.h(a, b, q0);
            let h3b = self.h(&(a + int(2) * cc), b, q0).2;
            return al.add(&h1, &al.scale(&(h_half(r1 + 1) * e1), &al.add(&h3, &h3b)));
        }
        let (cu, du) = (q1.sq[0], q1.sq[1]);
        let (h1, _, h3) = self.h(a, b, q0);
        if (cu + du) % 4 == 0 {
            al.add(&h1, &al.scale(&(h_half(r1) * e1), &h3))
        } else {
            // shift by 2c (c ≡ d mod 4 here), as for a single square
            let h3b = self.h(&(a + int(2 * cu as i64)), b, q0).2;
            al.add(&h1, &al.scale(&(h_half(r1) * e1), &h3b))
        }
    }
}

fn zeta_two<A: Alg>(al: &A, nf: &NormalFormAtP) -> Option<A::V> {
    let mut scales: BTreeMap<i64, Form2> = BTreeMap::new();
    for (v, b) in &nf.blocks {
        let f = scales.entry(*v).or_default();
        match b {
            UnimodularBlock::Sq(u) => f.sq.push(mod_int(u, 8)),
            UnimodularBlock::Hyp => f.hyp += 1,
            UnimodularBlock::Ell => f.ell += 1,
        }
    }
    let qi: BTreeMap<i64, Form2> = scales.into_iter().map(|(k, f)| (k, f.normalized())).collect();
    let empty = Form2::default();
    let q_at = |i: i64| qi.get(&i).cloned().unwrap_or_default();
    let qq = |j: i64| -> Form2 {
        if j < 0 {
            return Form2::default();
        }
        let parts: Vec<Form2> = (0..=j).filter(|i| (j - i) % 2 == 0).map(q_at).collect();
        Form2::sum(&parts.iter().collect::<Vec<_>>())
    };
    let p_at = |j: i64| -> Rational { ppow(2, (0..j).map(|i| qq(i).rank()).sum()) };
    let two = Two { al };
    let iab = |a: &Rational, b: i64, nu: i64| two.i2(a, b, &qq(nu), &qq(nu + 1), &q_at(nu + 2));
    let term = |x: A::V, nu: i64| al.scale(&p_at(nu).recip(), &al.mul(&al.t(nu), &x));
    let zero = Rational::zero();
    let c = &nf.constant;
    let mut z = al.k(Rational::zero());

    if nf.linear.is_none() && c.is_zero() {
        let om = qi.keys().copied().max().unwrap_or(0).max(1);
        let rt: i64 = qi.values().map(Form2::rank).sum();
        for nu in 0..om - 1 {
            z = al.add(&z, &term(iab(&zero, INF, nu), nu));
        }
        let a1 = term(two.i2(&zero, INF, &qq(om - 1), &qq(om), &empty), om - 1);
        let a2 = term(two.i2(&zero, INF, &qq(om), &qq(om - 1), &empty), om);
        let den = al.add(&al.k(int(1)), &al.scale(&-ppow(2, -rt), &al.t(2)));
        return Some(al.add(&z, &al.div(&al.add(&a1, &a2), &den)?));
    }
    let kc = vp(c, 2).unwrap_or(INF);
    if let Some(lam) = nf.linear {
        if lam <= kc {
            for nu in 0..lam - 2 {
                z = al.add(&z, &term(iab(&zero, INF, nu), nu));
            }
            for nu in (lam - 2).max(0)..lam {
                z = al.add(&z, &term(iab(&zero, lam - nu, nu), nu));
            }
            let last = al.div(&term(al.k(int(1)), lam), &al.lin(int(2), int(-1)))?;
            return Some(al.add(&z, &last));
        }
    }
    let kappa = kc;
    let lam = nf.linear.filter(|&l| l <= kappa + 2);
    match lam {
        Some(lam) => {
            for nu in 0..lam - 2 {
                z = al.add(&z, &term(iab(&(c / ppow(2, nu)), INF, nu), nu));
            }
            for nu in (lam - 2).max(0)..=kappa {
                z = al.add(&z, &term(iab(&(c / ppow(2, nu)), lam - nu, nu), nu));
            }
        }
        None => {
            for nu in 0..=kappa {
                z = al.add(&z, &term(iab(&(c / ppow(2, nu)), INF, nu), nu));
            }
        }
    }
    Some(al.add(&z, &al.scale(&p_at(kappa + 1).recip(), &al.t(kappa))))
}

fn zeta_generic<A: Alg>(al: &A, nf: &NormalFormAtP) -> Option<A::V> {
    if nf.p == 2 {
        zeta_two(al, nf)
    } else {
        zeta_odd(al, nf)
    }
}

/// Igusa zeta function of the normal form at an odd prime.
pub fn igusa_zeta_odd(nf: &NormalFormAtP) -> Result<RationalFunctionT> {
    if nf.p == 2 {
        return Err(Error::Precondition("igusa_zeta_odd needs an odd prime".into()));
    }
    zeta_odd(&Sym, nf).ok_or_else(|| Error::Unresolved("malformed odd normal form".into()))
}

/// Igusa zeta function of the (doubled) normal form at `p = 2`.
pub fn igusa_zeta_two(nf: &NormalFormAtP) -> Result<RationalFunctionT> {
    if nf.p != 2 {
        return Err(Error::Precondition("igusa_zeta_two needs p = 2".into()));
    }
    zeta_two(&Sym, nf).ok_or_else(|| Error::Unresolved("malformed 2-adic normal form".into()))
}

/// `ζ_Ig(f; p; s)` as a rational function of `t = p^{-s}`.
pub fn igusa_zeta(f: &QuadraticPolynomial, p: u64) -> Result<RationalFunctionT> {
    let nf = normal_form(f, p)?;
    if p == 2 {
        // ζ(2f) = t·ζ(f)
        let z = igusa_zeta_two(&nf)?;
        Ok(&z * &RationalFunctionT::new(Poly::constant(int(1)), Poly::monomial(int(1), 1)))
    } else {
        igusa_zeta_odd(&nf)
    }
}

/// `Σ_ν N(p^ν) p^{-νN} t^ν = (1 - tζ)/(1 - t)`.
pub fn count_generating_function(f: &QuadraticPolynomial, p: u64) -> Result<RationalFunctionT> {
    let z = igusa_zeta(f, p)?;
    let t = RationalFunctionT::t();
    let one = RationalFunctionT::constant(int(1));
    Ok(&(&one - &(&t * &z)) * &(&one - &t).recip())
}

/// `N(p^ν)` for `ν ≤ numax`, read off the zeta function.
pub fn counts_from_zeta(f: &QuadraticPolynomial, p: u64, numax: usize) -> Result<Vec<Rational>> {
    let g = count_generating_function(f, p)?;
    let n = f.nvars() as i64;
    Ok(g.series(numax).into_iter().enumerate().map(|(nu, x)| x * ppow(p, nu as i64 * n)).collect())
}

static EULER_CACHE: Lazy<RwLock<HashMap<(NormalFormAtP, i64), Rational>>> = Lazy::new(Default::default);

/// `(1 - p^{N-1-w}) L_p(w)` where `L_p(w) = Σ_ν N(p^ν) p^{-νw}`.
///
/// This combination is unchanged by appending hyperbolic planes, which is
/// the fallback when a genuine pole remains at `w`.
pub fn local_euler_factor(f: &QuadraticPolynomial, p: u64, w: i64) -> Result<Rational> {
    let mut f = f.clone();
    let mut w = w;
    for _ in 0..3 {
        let nf = normal_form(&f, p)?;
        if let Some(v) = euler_from_nf(&nf, w) {
            return Ok(v);
        }
        f = f.with_hyperbolic_plane();
        w += 1;
    }
    Err(Error::Pole(format!("{w} at p = {p}")))
}

fn euler_from_nf(nf: &NormalFormAtP, w: i64) -> Option<Rational> {
    let key = (nf.clone(), w);
    if let Some(v) = EULER_CACHE.read().get(&key) {
        return Some(v.clone());
    }
    let p = nf.p;
    let n = nf.nvars as i64;
    let t0 = ppow(p, n - w);
    let one = int(1);
    // at p = 2 the normal form is that of 2f: ζ(f) = ζ(2f)/t
    let fast = (!t0.is_one())
        .then(|| zeta_generic(&At(t0.clone()), nf))
        .flatten()
        .map(|z| if nf.doubled { z / &t0 } else { z })
        .map(|z| (&one - &t0 / int(p as i64)) * (&one - &t0 * z) / (&one - &t0));
    let v = match fast {
        Some(v) => v,
        None => {
            let mut z = zeta_generic(&Sym, nf)?;
            if nf.doubled {
                z = &z * &RationalFunctionT::new(Poly::constant(one.clone()), Poly::monomial(one.clone(), 1));
            }
            let t = RationalFunctionT::t();
            let o = RationalFunctionT::constant(one.clone());
            let g = &(&o - &(&t * &z)) * &(&o - &t).recip();
            let pre = RationalFunctionT::poly(Poly::new(vec![one.clone(), -int(p as i64).recip()]));
            (&pre * &g).eval(&t0)?
        }
    };
    EULER_CACHE.write().insert(key, v.clone());
    Some(v)
}

/// `L_p(w)` itself; fails at a pole.
pub fn local_l_factor(f: &QuadraticPolynomial, p: u64, w: i64) -> Result<Rational> {
    let n = f.nvars() as i64;
    let pre = int(1) - ppow(p, n - 1 - w);
    if pre.is_zero() {
        let g = count_generating_function(f, p)?;
        return g.eval(&ppow(p, n - w)).ok_or_else(|| Error::Pole(format!("{w} at p = {p}")));
    }
    Ok(local_euler_factor(f, p, w)? / pre)
}

/// Closed form of `(1 - p^{N-1-w}) L_p(w)` at a prime where the polynomial
/// is generic, i.e. `p ∤ 2·disc` and the completed constant is a `p`-unit.
///
/// For even `N`, `disc` is `(-1)^{N/2} det G`; for odd `N` it is
/// `(-1)^{(N+1)/2} 2ñ det G` where `ñ` is the constant after completing the
/// square.
pub fn generic_euler_factor(p: u64, nvars: usize, w: i64, disc: &Rational) -> Rational {
    let n = nvars as i64;
    let chi = int(legendre(disc, p) as i64);
    if n % 2 == 0 {
        let u = w - n / 2 + 1;
        int(1) - chi * ppow(p, -u)
    } else {
        let u = w - (n - 1) / 2;
        int(1) + chi * ppow(p, -u)
    }
}

/// Completed-square constant `ñ = c - ½ ℓᵀ G⁻¹ ℓ` and `det G`.
pub fn completed_constant(f: &QuadraticPolynomial) -> Option<(Rational, Rational)> {
    let n = f.nvars();
    let (inv, det) = crate::linalg::inverse_det(&f.gram)?;
    let mut s = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &f.linear[i] * &inv[i][j] * &f.linear[j];
        }
    }
    Some((&f.constant - s / int(2), det))
}

/// The discriminant entering [`generic_euler_factor`] for `f`.
pub fn generic_discriminant(f: &QuadraticPolynomial) -> Option<Rational> {
    let n = f.nvars() as i64;
    let (nt, det) = completed_constant(f)?;
    let sgn = |e: i64| if e % 2 == 0 { int(1) } else { int(-1) };
    Some(if n % 2 == 0 { sgn(n / 2) * det } else { sgn((n + 1) / 2) * int(2) * nt * det })
}

/// `K_c = c^{N} Σ_{a|c} μ(c/a) a^{1-N} 𝐍(a)` for a polynomial in `N`
/// variables, with `𝐍` evaluated multiplicatively.
pub fn kloosterman_sum(f: &QuadraticPolynomial, c: u64) -> Result<Rational> {
    let n = f.nvars() as i64;
    let mut total = Rational::zero();
    for a in crate::arith::divisors(c) {
        let mu = mobius(c / a);
        if mu == 0 {
            continue;
        }
        let mut na = 1u128;
        for (p, e) in crate::arith::factorize(&num_bigint::BigUint::from(a)) {
            na *= count_solutions(f, p, e)? as u128;
        }
        total += int(mu) * pow_rat(&int(a as i64), 1 - n) * Rational::from_integer(BigInt::from(na));
    }
    Ok(total * pow_rat(&int(c as i64), n))
}

/// `K_c` straight from its definition `Σ_x Σ_{d ∈ (Z/c)^*} e(d f(x)/c)`.
pub fn kloosterman_sum_direct(f: &QuadraticPolynomial, c: u64) -> Result<f64> {
    let n = f.nvars();
    let states = (c as u128).pow(n as u32);
    if states > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard(states));
    }
    let units: Vec<u64> = (1..=c).filter(|&d| num_integer::Integer::gcd(&d, &c) == 1).collect();
    let mut x = vec![0i64; n];
    let mut total = 0.0;
    loop {
        let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        let val = f.eval(&xr);
        let r = mod_int(&val, c) as f64;
        for &d in &units {
            total += (2.0 * std::f64::consts::PI * d as f64 * r / c as f64).cos();
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            x[i] += 1;
            if x[i] < c as i64 {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// `p^e` as a rational.
pub fn prime_power(p: u64, e: i64) -> Rational {
    ppow(p, e)
}
