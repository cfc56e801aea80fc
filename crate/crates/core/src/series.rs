//! Global coefficient formulas: Jacobi Eisenstein series, the Eisenstein
//! series `E_{k,0}`, Poincaré square series `Q_{k,m,β}` and the weight-5/2
//! theta correction.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    fmt_rational, int, is_integer, is_rational_square, kronecker_symbol, l_value_critical, pow_rat, primes_of_rational,
    squarefree_kernel, AlgebraicScalar, Rational,
};
use crate::error::{Error, Result};
use crate::igusa::{generic_discriminant, local_euler_factor, prime_power, QuadraticPolynomial};
use crate::lattice::{DiscriminantGroup, Lattice};

/// Which factor-of-2 convention the global discriminants follow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Discriminants as written in the closed formula for `Q_{k,m,β}`,
    /// without the factor 2.
    MasterFormula,
    /// Discriminants read off the generic local factors (default).
    #[default]
    GenericFactors,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop32" => Ok(Variant::MasterFormula),
            "remark21" => Ok(Variant::GenericFactors),
            _ => Err(Error::Input(format!("unknown variant {s:?} (expected prop32 or remark21)"))),
        }
    }
}

/// `f(τ) = Σ c(n,γ) qⁿ 𝔢_γ`, complete for `n < prec`.
#[derive(Clone, Debug)]
pub struct FourierExpansion {
    pub group: Arc<DiscriminantGroup>,
    pub weight: Rational,
    pub prec: Rational,
    pub symmetric: bool,
    pub coeffs: BTreeMap<(usize, Rational), Rational>,
}

impl PartialEq for FourierExpansion {
    fn eq(&self, o: &Self) -> bool {
        self.weight == o.weight && self.prec == o.prec && self.coeffs == o.coeffs
    }
}

impl FourierExpansion {
    pub fn new(group: Arc<DiscriminantGroup>, weight: Rational, prec: Rational) -> Self {
        FourierExpansion { group, weight, prec, symmetric: true, coeffs: BTreeMap::new() }
    }

    pub fn get(&self, gamma: usize, n: &Rational) -> Option<&Rational> {
        self.coeffs.get(&(gamma, n.clone()))
    }

    /// Coefficient, or zero if it is not stored.
    pub fn coeff(&self, gamma: usize, n: &Rational) -> Rational {
        self.get(gamma, n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn insert(&mut self, gamma: usize, n: Rational, c: Rational) {
        self.coeffs.insert((gamma, n), c);
    }

    /// `(n, c)` pairs of one component in increasing `n`.
    pub fn component(&self, gamma: usize) -> Vec<(Rational, Rational)> {
        self.coeffs.range((gamma, Rational::from_integer(BigInt::from(i64::MIN)))..).take_while(|((g, _), _)| *g == gamma).map(|((_, n), c)| (n.clone(), c.clone())).collect()
    }

    /// Nonzero-or-stored coefficient values of one component, in order.
    pub fn values(&self, gamma: usize) -> Vec<Rational> {
        self.component(gamma).into_iter().map(|(_, c)| c).collect()
    }

    pub fn truncated(&self, prec: &Rational) -> Self {
        let mut r = self.clone();
        r.coeffs.retain(|(_, n), _| n < prec);
        r.prec = prec.min(&self.prec).clone();
        r
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut r = self.clone();
        for v in r.coeffs.values_mut() {
            *v *= k;
        }
        r
    }

    /// `Σ a_i F_i`; precision is the minimum of the inputs.
    pub fn combination(terms: &[(Rational, &FourierExpansion)]) -> Self {
        let first = terms[0].1;
        let prec = terms.iter().map(|(_, f)| f.prec.clone()).min().unwrap();
        let mut out = FourierExpansion::new(first.group.clone(), first.weight.clone(), prec.clone());
        out.symmetric = terms.iter().all(|(_, f)| f.symmetric);
        for (a, f) in terms {
            for ((g, n), c) in &f.coeffs {
                if *n < prec {
                    let e = out.coeffs.entry((*g, n.clone())).or_insert_with(Rational::zero);
                    *e += a * c;
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::combination(&[(int(1), self), (int(-1), o)])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::combination(&[(int(1), self), (int(1), o)])
    }

    /// Checks `c(n,γ) = c(n,-γ)` on every stored pair.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|((g, n), c)| match self.get(self.group.neg(*g), n) {
            Some(d) => d == c,
            None => true,
        })
    }

    /// Rows `(γ label, n, c)` in canonical order.
    pub fn rows(&self) -> Vec<(String, String, String)> {
        self.coeffs.iter().map(|((g, n), c)| (self.group.element(*g).label(), fmt_rational(n), fmt_rational(c))).collect()
    }
}

/// Exponents `n ∈ Z - q(γ)` with `lo ≤ n < hi`.
pub fn exponents(group: &DiscriminantGroup, gamma: usize, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let q = group.q_value(gamma);
    let mut n = (lo + &q).ceil() - &q;
    let mut out = Vec::new();
    while &n < hi {
        out.push(n.clone());
        n += int(1);
    }
    out
}

fn sign_pow(e: &Rational) -> Result<i64> {
    if !is_integer(e) {
        return Err(Error::Parity(format!("exponent {} is not integral", fmt_rational(e))));
    }
    Ok(if e.to_integer().is_even() { 1 } else { -1 })
}

pub(crate) fn check_weight(lattice: &Lattice, k: &Rational) -> Result<()> {
    let two_k = k * int(2);
    if !is_integer(&two_k) {
        return Err(Error::Input(format!("weight {} is not a half-integer", fmt_rational(k))));
    }
    let s = two_k.to_integer() + BigInt::from(lattice.sig_plus as i64) - BigInt::from(lattice.sig_minus as i64);
    if !(&s % BigInt::from(4)).is_zero() {
        return Err(Error::Parity(format!(
            "2k + b+ - b- = {s} is not divisible by 4 for weight {} and signature ({},{})",
            fmt_rational(k),
            lattice.sig_plus,
            lattice.sig_minus
        )));
    }
    Ok(())
}

/// Parameters `(k, m, β)` of a Poincaré square series or Jacobi
/// Eisenstein series, with the table precision.
#[derive(Clone, Debug)]
pub struct SeriesRequest {
    pub group: Arc<DiscriminantGroup>,
    pub weight: Rational,
    pub m: Rational,
    pub beta: usize,
    pub prec: Rational,
    pub variant: Variant,
}

impl SeriesRequest {
    pub fn new(group: Arc<DiscriminantGroup>, weight: Rational, m: Rational, beta: usize, prec: Rational) -> Result<Self> {
        check_weight(&group.lattice, &weight)?;
        if weight < crate::arith::rat(5, 2) {
            return Err(Error::Precondition(format!("weight {} is below 5/2", fmt_rational(&weight))));
        }
        if !m.is_positive() {
            return Err(Error::Precondition(format!("index m = {} must be positive", fmt_rational(&m))));
        }
        if !is_integer(&(&m + group.q_value(beta))) {
            return Err(Error::Precondition(format!(
                "m = {} is not in Z - q(β) for β = ({})",
                fmt_rational(&m),
                group.element(beta).label()
            )));
        }
        Ok(SeriesRequest { group, weight, m, beta, prec, variant: Variant::default() })
    }

    pub fn with_variant(mut self, v: Variant) -> Self {
        self.variant = v;
        self
    }

    fn lattice(&self) -> &Lattice {
        &self.group.lattice
    }

    fn beta_coords(&self) -> &[Rational] {
        &self.group.element(self.beta).coords
    }

    /// `f(v,λ) = q(v + λβ - γ) + mλ² - rλ + n` in `e + 1` variables.
    pub fn jacobi_polynomial(&self, n: &Rational, r: &Rational, gamma: usize) -> QuadraticPolynomial {
        let g = &*self.group;
        let e = self.lattice().e;
        let s = self.lattice().gram_rational();
        let beta = self.beta_coords();
        let sb = g.s_times(self.beta);
        let sg = g.s_times(gamma);
        let gc = &g.element(gamma).coords;
        let mut a = vec![vec![Rational::zero(); e + 1]; e + 1];
        for i in 0..e {
            for j in 0..e {
                a[i][j] = s[i][j].clone();
            }
            a[i][e] = sb[i].clone();
            a[e][i] = sb[i].clone();
        }
        a[e][e] = g.bilinear(beta, beta) + int(2) * &self.m;
        let mut l: Vec<Rational> = sg.iter().map(|x| -x).collect();
        l.push(-g.bilinear(beta, gc) - r);
        let c = g.bilinear(gc, gc) / int(2) + n;
        QuadraticPolynomial::new(a, l, c)
    }
}

/// `q(v - γ) + n` in `e` variables.
pub fn eisenstein_polynomial(group: &DiscriminantGroup, n: &Rational, gamma: usize) -> QuadraticPolynomial {
    let sg = group.s_times(gamma);
    QuadraticPolynomial::new(
        group.lattice.gram_rational(),
        sg.iter().map(|x| -x).collect(),
        group.q_exact(gamma) + n,
    )
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Unresolved(format!("discriminant {x} exceeds the supported range")))
}

/// `Π_p (1 - p^{N-1-w}) L_p(w)` over all primes, as an exact scalar.
///
/// Good primes are summed up by a quadratic L-value; the primes in `bad`
/// go through the local engine.
fn euler_product(f: &QuadraticPolynomial, w: i64, bad: &BTreeSet<u64>, disc: &Rational) -> Result<AlgebraicScalar> {
    let n = f.nvars() as i64;
    let kernel = squarefree_kernel(disc);
    let k64 = to_i64(&kernel)?;
    let d0 = if k64.rem_euclid(4) == 1 { k64 } else { 4 * k64 };
    let chi = |p: u64| int(kronecker_symbol(d0, p as i64) as i64);
    let mut total;
    let mut local = int(1);
    if n % 2 == 0 {
        let u = w - n / 2 + 1;
        if u < 1 {
            return Err(Error::Pole(format!("global L-factor at u = {u}")));
        }
        // 1 / L_{D0}(u) with the bad Euler factors put back
        total = l_value_critical(d0, u as u32)?.inv();
        for &p in bad {
            local /= int(1) - chi(p) * prime_power(p, -u);
        }
    } else {
        let u = w - (n - 1) / 2;
        if u < 1 {
            return Err(Error::Pole(format!("global L-factor at u = {u}")));
        }
        total = l_value_critical(d0, u as u32)?.div(&l_value_critical(1, 2 * u as u32)?);
        for &p in bad {
            local *= int(1) - chi(p) * prime_power(p, -u);
            local /= int(1) - prime_power(p, -2 * u);
        }
    }
    for &p in bad {
        local *= local_euler_factor(f, p, w)?;
    }
    total = total.scale(&local);
    Ok(total)
}

fn assert_rational(x: &AlgebraicScalar, what: &str) -> Result<Rational> {
    x.to_rational().ok_or_else(|| Error::Unresolved(format!("{what} assembled to the non-rational value {x}")))
}

fn rational_primes(x: &Rational) -> Vec<u64> {
    primes_of_rational(x)
}

/// Nonsingular part of a Jacobi Eisenstein coefficient (`4mn - r² > 0`).
fn jacobi_main(req: &SeriesRequest, n: &Rational, r: &Rational, gamma: usize) -> Result<Rational> {
    let lat = req.lattice();
    let k = &req.weight;
    let m = &req.m;
    let disc = int(4) * m * n - r * r;
    debug_assert!(disc.is_positive());
    let e = lat.e as i64;
    let f = req.jacobi_polynomial(n, r, gamma);
    let w = k + rat_half(e) - int(1);
    if !is_integer(&w) {
        return Err(Error::Parity(format!("k + e/2 - 1 = {} is not integral", fmt_rational(&w))));
    }
    let w = w.to_integer().to_i64().unwrap();
    let det = Rational::from_integer(lat.det());
    let sgn = sign_pow(&((k * int(2) + int(lat.sig_plus as i64) - int(lat.sig_minus as i64)) / int(4)))?;

    let h = |x: &Rational| (x * int(2)).to_integer().to_i64().unwrap();
    let alpha = AlgebraicScalar::pi_power(h(k) - 1)
        .mul(&AlgebraicScalar::pow_half(&disc, h(k) - 3))
        .div(&AlgebraicScalar::pow_half(&int(2), h(k) - 4))
        .div(&AlgebraicScalar::pow_half(m, h(k) - 2))
        .div(&AlgebraicScalar::gamma_half(h(k) - 1))
        .div(&AlgebraicScalar::sqrt(&det.abs()))
        .scale(&int(sgn));

    let mut bad: BTreeSet<u64> = [2u64].into_iter().collect();
    bad.extend(rational_primes(&det));
    bad.extend(rational_primes(m));
    bad.extend(rational_primes(&disc));
    bad.extend(rational_primes(&int(req.group.denominator(req.beta) as i64)));
    let mut dprime = generic_discriminant(&f).ok_or(Error::Singular)?;
    if req.variant == Variant::MasterFormula {
        dprime *= int(2);
    }
    let prod = euler_product(&f, w, &bad, &dprime)?;
    assert_rational(&alpha.mul(&prod), "Jacobi coefficient")
}

fn rat_half(e: i64) -> Rational {
    crate::arith::rat(e, 2)
}

/// `λ` with `(n, r, γ) = (mλ², 2mλ, λβ)`, if any.
fn singular_lambda(req: &SeriesRequest, n: &Rational, r: &Rational, gamma: usize) -> Option<i64> {
    let lam = r / (int(2) * &req.m);
    if !is_integer(&lam) {
        return None;
    }
    let l = lam.to_integer().to_i64()?;
    (&req.m * &lam * &lam == *n && req.group.scalar(l, req.beta) == gamma).then_some(l)
}

/// Fourier coefficient `c(n, r, γ)` of the holomorphic Jacobi Eisenstein
/// series `E_{k,m,β}`, including the singular terms.
pub fn jacobi_coefficient(req: &SeriesRequest, n: &Rational, r: &Rational, gamma: usize) -> Result<Rational> {
    let g = &*req.group;
    if !is_integer(&(n + g.q_exact(gamma))) {
        return Ok(Rational::zero());
    }
    let pair = g.bilinear(&g.element(gamma).coords, &g.element(req.beta).coords);
    if !is_integer(&(r + pair)) {
        return Ok(Rational::zero());
    }
    let disc = int(4) * &req.m * n - r * r;
    if !disc.is_positive() {
        return Ok(if singular_lambda(req, n, r, gamma).is_some() { int(1) } else { Rational::zero() });
    }
    jacobi_main(req, n, r, gamma)
}

/// `r ∈ Z - ⟨γ,β⟩` with `r² ≤ 4mn` (or `< 4mn` when `strict`).
pub fn r_range(req: &SeriesRequest, n: &Rational, gamma: usize, strict: bool) -> Vec<Rational> {
    let g = &*req.group;
    let bound = int(4) * &req.m * n;
    if bound.is_negative() {
        return Vec::new();
    }
    let shift = crate::arith::frac(&-g.bilinear(&g.element(gamma).coords, &g.element(req.beta).coords));
    let approx = bound.to_f64().unwrap().sqrt().ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in -approx..=approx {
        let r = int(j) + &shift;
        let r2 = &r * &r;
        if r2 < bound || (!strict && r2 == bound) {
            out.push(r);
        }
    }
    out
}

/// `E_{k,m,β}(τ, 0)` at `(n, γ)`: the sum of Jacobi coefficients over `r`.
pub fn jacobi_zero_value(req: &SeriesRequest, n: &Rational, gamma: usize) -> Result<Rational> {
    let mut s = Rational::zero();
    for r in r_range(req, n, gamma, false) {
        s += jacobi_coefficient(req, n, &r, gamma)?;
    }
    Ok(s)
}

/// The weight-5/2 correction at `(n, γ)`; zero for other weights.
pub fn epsilon_52(req: &SeriesRequest, n: &Rational, gamma: usize) -> Result<Rational> {
    if req.weight != crate::arith::rat(5, 2) || !n.is_positive() {
        return Ok(Rational::zero());
    }
    let lat = req.lattice();
    let e = lat.e as i64;
    let m = &req.m;
    let det = Rational::from_integer(lat.det());
    let db = int(req.group.denominator(req.beta) as i64);
    let sgn_e = if ((e + 1) / 2) % 2 == 0 { int(1) } else { int(-1) };
    let mut dsq = m * &db * &db * sgn_e * &det;
    if req.variant == Variant::GenericFactors {
        dsq *= int(2);
    }
    if !is_rational_square(&dsq) {
        return Ok(Rational::zero());
    }
    let rs: Vec<Rational> = r_range(req, n, gamma, false).into_iter().filter(|r| r * r == int(4) * m * n).collect();
    if rs.is_empty() {
        return Ok(Rational::zero());
    }
    let sgn = sign_pow(&((int(5) + int(lat.sig_plus as i64) - int(lat.sig_minus as i64)) / int(4)))?;
    let mut bad: BTreeSet<u64> = [2u64].into_iter().collect();
    bad.extend(rational_primes(&det));
    bad.extend(rational_primes(m));
    bad.extend(rational_primes(&db));
    let w = (e + 3) / 2;
    let mut total = Rational::zero();
    for r in rs {
        if !is_integer(&(&r + req.group.bilinear(&req.group.element(gamma).coords, req.beta_coords()))) {
            continue;
        }
        let f = req.jacobi_polynomial(n, &r, gamma);
        let mut prod = int(1);
        for &p in &bad {
            let pr = int(p as i64);
            prod *= local_euler_factor(&f, p, w)? * &pr / (&pr + int(1));
        }
        let x = AlgebraicScalar::sqrt(&(int(2) * m * det.abs())).inv().scale(&(int(24) * n * int(sgn) * prod));
        total += assert_rational(&x, "weight-5/2 correction")?;
    }
    Ok(total)
}

/// `c(n,γ)` of `Q_{k,m,β}`.
pub fn qseries_coefficient(req: &SeriesRequest, n: &Rational, gamma: usize) -> Result<Rational> {
    if n.is_negative() {
        return Ok(Rational::zero());
    }
    Ok(jacobi_zero_value(req, n, gamma)? + epsilon_52(req, n, gamma)?)
}

fn all_pairs(group: &DiscriminantGroup, lo: &Rational, prec: &Rational) -> Vec<(usize, Rational)> {
    (0..group.order).flat_map(|g| exponents(group, g, lo, prec).into_iter().map(move |n| (g, n))).collect()
}

fn tabulate<F>(group: &Arc<DiscriminantGroup>, weight: &Rational, prec: &Rational, f: F) -> Result<FourierExpansion>
where
    F: Fn(usize, &Rational) -> Result<Rational> + Sync,
{
    let pairs = all_pairs(group, &Rational::zero(), prec);
    let vals: Vec<Result<Rational>> = pairs.par_iter().map(|(g, n)| f(*g, n)).collect();
    let mut out = FourierExpansion::new(group.clone(), weight.clone(), prec.clone());
    for ((g, n), v) in pairs.into_iter().zip(vals) {
        out.insert(g, n, v?);
    }
    check_symmetric(&out)?;
    Ok(out)
}

/// Fails loudly if `c(n,γ) ≠ c(n,-γ)` anywhere.
pub fn check_symmetric(f: &FourierExpansion) -> Result<()> {
    for ((g, n), c) in &f.coeffs {
        if let Some(d) = f.get(f.group.neg(*g), n) {
            if d != c {
                return Err(Error::Unresolved(format!(
                    "symmetry violated at n = {}, γ = ({}): {} vs {}",
                    fmt_rational(n),
                    f.group.element(*g).label(),
                    fmt_rational(c),
                    fmt_rational(d)
                )));
            }
        }
    }
    Ok(())
}

/// `Q_{k,m,β}` for all `n < prec`.
pub fn qseries_expansion(req: &SeriesRequest) -> Result<FourierExpansion> {
    tabulate(&req.group, &req.weight, &req.prec, |g, n| qseries_coefficient(req, n, g))
}

/// The holomorphic Jacobi part `E_{k,m,β}(τ,0)` for all `n < prec`.
pub fn jacobi_zero_expansion(req: &SeriesRequest) -> Result<FourierExpansion> {
    tabulate(&req.group, &req.weight, &req.prec, |g, n| {
        if n.is_negative() {
            Ok(Rational::zero())
        } else {
            jacobi_zero_value(req, n, g)
        }
    })
}

/// The correction `Q - E(τ,0)` at weight 5/2 for all `n < prec`.
pub fn epsilon_expansion(req: &SeriesRequest) -> Result<FourierExpansion> {
    tabulate(&req.group, &req.weight, &req.prec, |g, n| epsilon_52(req, n, g))
}

/// Coefficient `c(n,γ)` of `E_{k,0}`.
pub fn eisenstein_coefficient(group: &DiscriminantGroup, k: &Rational, n: &Rational, gamma: usize) -> Result<Rational> {
    if !is_integer(&(n + group.q_exact(gamma))) || n.is_negative() {
        return Ok(Rational::zero());
    }
    if n.is_zero() {
        return Ok(if gamma == group.zero() { int(1) } else { Rational::zero() });
    }
    let lat = &group.lattice;
    let e = lat.e as i64;
    let w = k + rat_half(e) - int(1);
    if !is_integer(&w) {
        return Err(Error::Parity(format!("k + e/2 - 1 = {} is not integral", fmt_rational(&w))));
    }
    let w = w.to_integer().to_i64().unwrap();
    let det = Rational::from_integer(lat.det());
    let sgn = sign_pow(&((k * int(2) + int(lat.sig_plus as i64) - int(lat.sig_minus as i64)) / int(4)))?;
    let hk = (k * int(2)).to_integer().to_i64().unwrap();
    let c = AlgebraicScalar::pow_half(&int(2), hk)
        .mul(&AlgebraicScalar::pi_power(hk))
        .mul(&AlgebraicScalar::pow_half(n, hk - 2))
        .div(&AlgebraicScalar::gamma_half(hk))
        .div(&AlgebraicScalar::sqrt(&det.abs()))
        .scale(&int(sgn));
    let f = eisenstein_polynomial(group, n, gamma);
    let mut bad: BTreeSet<u64> = [2u64].into_iter().collect();
    bad.extend(rational_primes(&det));
    bad.extend(rational_primes(n));
    let disc = generic_discriminant(&f).ok_or(Error::Singular)?;
    let prod = euler_product(&f, w, &bad, &disc)?;
    assert_rational(&c.mul(&prod), "Eisenstein coefficient")
}

/// `E_{k,0}` for all `n < prec`.
pub fn eisenstein_expansion(group: &Arc<DiscriminantGroup>, k: &Rational, prec: &Rational) -> Result<FourierExpansion> {
    check_weight(&group.lattice, k)?;
    if *k < crate::arith::rat(5, 2) && group.lattice.e > 0 {
        return Err(Error::Precondition(format!("weight {} is below 5/2", fmt_rational(k))));
    }
    tabulate(group, k, prec, |g, n| eisenstein_coefficient(group, k, n, g))
}

/// Power of an integer as a rational, for callers that build constants.
pub fn int_pow(b: i64, e: i64) -> Rational {
    pow_rat(&int(b), e)
}

/// `Σ_{λ≥1} c(λ²m, λβ)` style index helper: all `λ ≥ 1` with `λ²m < prec`.
pub fn lambda_range(m: &Rational, limit: &Rational) -> Vec<i64> {
    let mut out = Vec::new();
    let mut l = 1i64;
    while &(m * int(l * l)) < limit {
        out.push(l);
        l += 1;
    }
    out
}

#[allow(dead_code)]
fn one() -> Rational {
    Rational::one()
}
