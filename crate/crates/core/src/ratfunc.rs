//! Univariate polynomials and rational functions over the rationals in the
//! formal variable `t = p^{-s}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{fmt_rational, int, Rational};

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }
    pub fn zero() -> Self {
        Poly(Vec::new())
    }
    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }
    /// `c · t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }
    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }
    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.lead();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dj;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Power series coefficients of `self` up to `t^n` (inclusive).
    pub fn coeffs_upto(&self, n: usize) -> Vec<Rational> {
        (0..=n).map(|i| self.0.get(i).cloned().unwrap_or_else(Rational::zero)).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Rational::zero) + o.0.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

/// A quotient of polynomials in `t`, kept in lowest terms with a monic
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionT {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RationalFunctionT {
    pub fn new(n: Poly, d: Poly) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        if n.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&n, &d);
        let (n, _) = n.div_rem(&g);
        let (d, _) = d.div_rem(&g);
        let l = d.lead().recip();
        RationalFunctionT { numerator: n.scale(&l), denominator: d.scale(&l) }
    }
    pub fn zero() -> Self {
        RationalFunctionT { numerator: Poly::zero(), denominator: Poly::constant(int(1)) }
    }
    pub fn constant(c: Rational) -> Self {
        Self::new(Poly::constant(c), Poly::constant(int(1)))
    }
    pub fn poly(p: Poly) -> Self {
        Self::new(p, Poly::constant(int(1)))
    }
    /// `c · t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        Self::poly(Poly::monomial(c, k))
    }
    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(int(1), 1)
    }
    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
    pub fn recip(&self) -> Self {
        Self::new(self.denominator.clone(), self.numerator.clone())
    }
    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.numerator.scale(k), self.denominator.clone())
    }
    pub fn pow(&self, e: usize) -> Self {
        let mut r = Self::constant(int(1));
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Value at `t0`; `None` if `t0` is a pole. Common factors are already
    /// cancelled, so removable singularities evaluate to their limit.
    pub fn eval(&self, t0: &Rational) -> Option<Rational> {
        let d = self.denominator.eval(t0);
        if d.is_zero() {
            None
        } else {
            Some(self.numerator.eval(t0) / d)
        }
    }

    /// First `n + 1` coefficients of the Taylor expansion at `t = 0`.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        let d = self.denominator.coeffs_upto(n);
        let num = self.numerator.coeffs_upto(n);
        assert!(!d[0].is_zero(), "pole at t = 0");
        let inv0 = d[0].recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut s = num[i].clone();
            for j in 1..=i {
                s -= &d[j] * &out[i - j];
            }
            out.push(s * &inv0);
        }
        out
    }
}

impl Add for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn add(self, o: &RationalFunctionT) -> RationalFunctionT {
        if self.denominator == o.denominator {
            return RationalFunctionT::new(&self.numerator + &o.numerator, self.denominator.clone());
        }
        RationalFunctionT::new(
            &(&self.numerator * &o.denominator) + &(&o.numerator * &self.denominator),
            &self.denominator * &o.denominator,
        )
    }
}

impl Sub for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn sub(self, o: &RationalFunctionT) -> RationalFunctionT {
        self + &(-o)
    }
}

impl Neg for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn neg(self) -> RationalFunctionT {
        RationalFunctionT { numerator: -&self.numerator, denominator: self.denominator.clone() }
    }
}

impl Mul for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn mul(self, o: &RationalFunctionT) -> RationalFunctionT {
        RationalFunctionT::new(&self.numerator * &o.numerator, &self.denominator * &o.denominator)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_rational(c),
                1 => format!("({})t", fmt_rational(c)),
                _ => format!("({})t^{i}", fmt_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Display for RationalFunctionT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == Poly::constant(Rational::one()) {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "[{}] / [{}]", self.numerator, self.denominator)
        }
    }
}
