//! Spaces of vector-valued modular forms built from the series engine:
//! dimensions, bases, Eisenstein families, Petersson products, the
//! obstruction check and nearly-holomorphic forms.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{fmt_rational, int, is_integer, rat, AlgebraicScalar, Rational};
use crate::error::{Error, Result};
use crate::lattice::{DiscriminantGroup, Lattice};
use crate::linalg::{solve, Solution};
use crate::series::{
    check_weight, eisenstein_coefficient, eisenstein_expansion, exponents, qseries_coefficient, qseries_expansion,
    FourierExpansion, SeriesRequest, Variant,
};
use crate::weil::{average, e_rat};

/// `(dim M_k(ρ*), dim S_k(ρ*))` from Gauss sums.
pub fn dimension(group: &DiscriminantGroup, k: &Rational) -> Result<(i64, i64)> {
    check_weight(&group.lattice, k)?;
    if *k < int(2) {
        return Err(Error::Precondition(format!("dimension formula needs k >= 2, got {}", fmt_rational(k))));
    }
    let n = group.order;
    let kf = k.to_f64().unwrap();
    let sig = group.lattice.sig_plus as f64 - group.lattice.sig_minus as f64;
    let gauss = |a: i64| -> Complex64 { (0..n).map(|g| e_rat(&(int(a) * group.q_value(g)))).sum() };
    let sawtooth = |x: &Rational| -> f64 {
        // B(x) = x - (⌊x⌋ - ⌊-x⌋)/2
        let fl = x.floor();
        let fl_neg = (-x).floor();
        (x - (fl - fl_neg) / int(2)).to_f64().unwrap()
    };
    let two_torsion: Vec<usize> = (0..n).filter(|&g| group.neg(g) == g).collect();
    let pairs = (n + two_torsion.len()) / 2;
    let isotropic: BTreeSet<usize> =
        (0..n).filter(|&g| group.q_value(g).is_zero()).map(|g| g.min(group.neg(g))).collect();
    let alpha4 = isotropic.len() as f64;
    let b1: f64 = (0..n).map(|g| sawtooth(&group.q_value(g))).sum();
    let b2: f64 = two_torsion.iter().map(|&g| sawtooth(&group.q_value(g))).sum();
    let phase = |x: f64| Complex64::from_polar(1.0, 2.0 * PI * x);
    let sq = (n as f64).sqrt();
    let dim = pairs as f64 * (kf - 1.0) / 12.0 + (phase((2.0 * kf + sig) / 8.0) * gauss(2)).re / (4.0 * sq)
        - (phase((4.0 * kf + 3.0 * sig - 10.0) / 24.0) * (gauss(1) + gauss(-3))).re / (3.0 * (3.0f64).sqrt() * sq)
        + (alpha4 + b1 + b2) / 2.0;
    let r = dim.round();
    if (dim - r).abs() > 1e-6 {
        return Err(Error::Unresolved(format!("dimension formula evaluated to {dim}, not an integer")));
    }
    Ok((r as i64, r as i64 - alpha4 as i64))
}

fn series_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `Π_{n≥1} (1 - qⁿ)^{24j}` through `q^{len-1}`, built from the sparse
/// expansion `Π (1 - qⁿ)³ = Σ (-1)^k (2k+1) q^{k(k+1)/2}`.
fn eta_power_24(j: usize, len: usize) -> Vec<BigInt> {
    let mut cube = vec![BigInt::zero(); len];
    let mut k = 0usize;
    while k * (k + 1) / 2 < len {
        let c = BigInt::from(2 * k as i64 + 1);
        cube[k * (k + 1) / 2] = if k % 2 == 0 { c } else { -c };
        k += 1;
    }
    let mut out = vec![BigInt::zero(); len];
    out[0] = BigInt::one();
    for _ in 0..8 * j {
        out = series_mul(&out, &cube, len);
    }
    out
}

/// Coefficients `τ(0), τ(1), …, τ(len-1)` of `Δ = q Π (1 - qⁿ)²⁴`.
pub fn delta_expansion(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    if len > 1 {
        let p = eta_power_24(1, len - 1);
        out[1..].clone_from_slice(&p);
    }
    out
}

/// `F = G / Δ^j` for a vector-valued `G`, complete for `n < prec(G) - j`.
pub fn divide_by_delta(g: &FourierExpansion, j: usize) -> FourierExpansion {
    let prec = &g.prec - int(j as i64);
    let len = prec.ceil().to_integer().to_usize().unwrap_or(0) + j + 2;
    let d = eta_power_24(j, len);
    // 1/D by the usual recursion; D has constant term 1.
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = BigInt::one();
    for t in 1..len {
        let mut s = BigInt::zero();
        for u in 1..=t {
            s -= &d[u] * &inv[t - u];
        }
        inv[t] = s;
    }
    let mut out = FourierExpansion::new(g.group.clone(), &g.weight - int(12 * j as i64), prec.clone());
    out.symmetric = g.symmetric;
    let jj = int(j as i64);
    for gamma in 0..g.group.order {
        for n in exponents(&g.group, gamma, &-&jj, &prec) {
            let mut s = Rational::zero();
            let mut t = 0usize;
            loop {
                let src = &n + &jj - int(t as i64);
                if !src.is_positive() {
                    break;
                }
                let c = g.coeff(gamma, &src);
                if !c.is_zero() {
                    s += c * Rational::from_integer(inv[t].clone());
                }
                t += 1;
            }
            out.insert(gamma, n, s);
        }
    }
    out
}

/// The Eisenstein series `E_{k,β}` that averaging could separate, keyed by
/// the smaller index of each `±β` pair.
#[derive(Clone, Debug)]
pub struct EisensteinFamily {
    pub weight: Rational,
    pub members: BTreeMap<usize, FourierExpansion>,
    /// Isotropic classes (as `±` representatives) left undetermined.
    pub unresolved: Vec<usize>,
}

fn pm_rep(g: &DiscriminantGroup, a: usize) -> usize {
    a.min(g.neg(a))
}

fn cyclic_subgroup(g: &DiscriminantGroup, beta: usize) -> Vec<usize> {
    let d = g.denominator(beta) as i64;
    let mut c: Vec<usize> = (0..d).map(|l| g.scalar(l, beta)).collect();
    c.sort_unstable();
    c
}

/// Solves `A_β E_{k,0} = Σ_{c ∈ ⟨β⟩} E_{k,c}` over the cyclic subgroups
/// generated by isotropic elements, smallest first.
pub fn eisenstein_family(group: &Arc<DiscriminantGroup>, k: &Rational, prec: &Rational) -> Result<EisensteinFamily> {
    let e0 = eisenstein_expansion(group, k, prec)?;
    let g = &**group;
    let mut subgroups: Vec<Vec<usize>> = (0..g.order)
        .filter(|&b| g.q_value(b).is_zero())
        .map(|b| cyclic_subgroup(g, b))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    subgroups.sort_by_key(|c| (c.len(), c.clone()));
    let mut members: BTreeMap<usize, FourierExpansion> = BTreeMap::new();
    let mut unresolved: BTreeSet<usize> = BTreeSet::new();
    for c in subgroups {
        let d = c.len() as u64;
        let gens: Vec<usize> = c.iter().copied().filter(|&x| g.denominator(x) == d).collect();
        let orbits: BTreeSet<usize> = gens.iter().map(|&x| pm_rep(g, x)).collect();
        if orbits.iter().all(|o| members.contains_key(o) || unresolved.contains(o)) {
            continue;
        }
        if d == 1 {
            members.insert(0, e0.clone());
            continue;
        }
        let smaller: Vec<usize> = c.iter().copied().filter(|&x| g.denominator(x) < d).collect();
        if orbits.len() > 1 || smaller.iter().any(|&x| !members.contains_key(&pm_rep(g, x))) {
            unresolved.extend(orbits);
            continue;
        }
        let sum = average(gens[0], &e0);
        let mut terms: Vec<(Rational, &FourierExpansion)> = vec![(int(1), &sum)];
        for x in &smaller {
            terms.push((int(-1), &members[&pm_rep(g, *x)]));
        }
        let rest = FourierExpansion::combination(&terms).scale(&rat(1, gens.len() as i64));
        members.insert(*orbits.iter().next().unwrap(), rest);
    }
    Ok(EisensteinFamily { weight: k.clone(), members, unresolved: unresolved.into_iter().collect() })
}

/// A series the basis builder can draw on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `E_{k,β}`; only `β = 0` has a pointwise coefficient formula.
    Eisenstein(usize),
    /// `Q_{k,m,β}`.
    Q { m: Rational, beta: usize },
}

impl Generator {
    pub fn label(&self, g: &DiscriminantGroup) -> String {
        match self {
            Generator::Eisenstein(b) => format!("E[{}]", g.element(*b).label()),
            Generator::Q { m, beta } => format!("Q[m={}, beta={}]", fmt_rational(m), g.element(*beta).label()),
        }
    }

    /// Single coefficient, computed from scratch.
    pub fn coefficient(&self, g: &Arc<DiscriminantGroup>, k: &Rational, n: &Rational, gamma: usize, variant: Variant) -> Result<Rational> {
        match self {
            Generator::Eisenstein(0) => eisenstein_coefficient(g, k, n, gamma),
            Generator::Eisenstein(b) => Err(Error::Precondition(format!(
                "no pointwise formula for E_(k,β) at β = ({})",
                g.element(*b).label()
            ))),
            Generator::Q { m, beta } => {
                let req = SeriesRequest::new(g.clone(), k.clone(), m.clone(), *beta, n + int(1))?.with_variant(variant);
                qseries_coefficient(&req, n, gamma)
            }
        }
    }
}

/// `Σ aᵢ Gᵢ` as a formal combination of generators.
pub type Combination = Vec<(Rational, Generator)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Full,
    Cusp,
}

/// A basis of `M_k(ρ*)` or `S_k(ρ*)`, each member with the combination of
/// generators it came from.
#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub weight: Rational,
    pub kind: SpaceKind,
    pub expansions: Vec<FourierExpansion>,
    pub provenance: Vec<Combination>,
}

#[derive(Clone, Debug)]
pub struct BasisOptions {
    /// Largest `m·d_β²` tried for `Q_{k,m,β}`.
    pub budget: Rational,
    /// Lower bound on the number of coefficient rows per component.
    pub min_prec: i64,
    pub variant: Variant,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions { budget: int(40), min_prec: 0, variant: Variant::default() }
    }
}

/// Candidate `Q_{k,m,β}` in increasing `m·d_β²`, then canonical `β`.
pub fn q_candidates(g: &DiscriminantGroup, budget: &Rational) -> Vec<(Rational, usize)> {
    let mut out = Vec::new();
    for beta in 0..g.order {
        if g.neg(beta) < beta {
            continue;
        }
        let d2 = int((g.denominator(beta) * g.denominator(beta)) as i64);
        let first = int(1) - g.q_value(beta);
        let mut m = if first > int(1) { first - int(1) } else { first };
        if m.is_zero() {
            m = int(1);
        }
        while &m * &d2 <= *budget {
            out.push((&m * &d2, m.clone(), beta));
            m += int(1);
        }
    }
    out.sort();
    out.into_iter().map(|(_, m, b)| (m, b)).collect()
}

/// Incremental exact row reduction used to test linear independence.
struct Echelon {
    keys: Vec<(usize, Rational)>,
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn new(group: &DiscriminantGroup, prec: &Rational) -> Self {
        let keys = (0..group.order).flat_map(|g| exponents(group, g, &int(0), prec).into_iter().map(move |n| (g, n))).collect();
        Echelon { keys, rows: Vec::new() }
    }

    fn vector(&self, f: &FourierExpansion) -> Vec<Rational> {
        self.keys.iter().map(|(g, n)| f.coeff(*g, n)).collect()
    }

    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Adds `f` if it is independent of what is there; returns whether it was.
    fn push(&mut self, f: &FourierExpansion) -> bool {
        let v = self.reduce(self.vector(f));
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].recip();
        let row: Vec<Rational> = v.iter().map(|x| x * &inv).collect();
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, row));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Exact rank of a list of expansions on the window `n < prec`.
pub fn rank(group: &DiscriminantGroup, forms: &[FourierExpansion], prec: &Rational) -> usize {
    let mut e = Echelon::new(group, prec);
    for f in forms {
        e.push(f);
    }
    e.rank()
}

/// Greedy basis of `M_k(ρ*)` or `S_k(ρ*)`.
pub fn build_basis(group: &Arc<DiscriminantGroup>, k: &Rational, kind: SpaceKind, opts: &BasisOptions) -> Result<SpaceBasis> {
    let (dim_m, dim_s) = dimension(group, k)?;
    let target = match kind {
        SpaceKind::Full => dim_m,
        SpaceKind::Cusp => dim_s,
    } as usize;
    let candidates = q_candidates(group, &opts.budget);
    let mut prec = int((dim_m + 2).max(opts.min_prec).max(2));
    let mut last_rank = 0;
    for _attempt in 0..3 {
        let mut basis = SpaceBasis { weight: k.clone(), kind, expansions: Vec::new(), provenance: Vec::new() };
        if target == 0 {
            return Ok(basis);
        }
        let mut ech = Echelon::new(group, &prec);
        let e0 = eisenstein_expansion(group, k, &prec)?;
        if kind == SpaceKind::Full {
            let fam = eisenstein_family(group, k, &prec)?;
            for (b, f) in fam.members {
                if ech.push(&f) {
                    basis.expansions.push(f);
                    basis.provenance.push(vec![(int(1), Generator::Eisenstein(b))]);
                }
            }
        }
        let batch = 4usize;
        let mut idx = 0;
        while ech.rank() < target && idx < candidates.len() {
            let chunk: Vec<&(Rational, usize)> = candidates[idx..(idx + batch).min(candidates.len())].iter().collect();
            idx += chunk.len();
            let forms: Vec<Result<FourierExpansion>> = chunk
                .par_iter()
                .map(|(m, b)| {
                    let req = SeriesRequest::new(group.clone(), k.clone(), m.clone(), *b, prec.clone())?
                        .with_variant(opts.variant);
                    qseries_expansion(&req)
                })
                .collect();
            for ((m, b), f) in chunk.into_iter().zip(forms) {
                if ech.rank() >= target {
                    break;
                }
                let f = f?;
                let q = Generator::Q { m: m.clone(), beta: *b };
                let (f, combo) = match kind {
                    SpaceKind::Full => (f, vec![(int(1), q)]),
                    SpaceKind::Cusp => (f.sub(&e0), vec![(int(1), q), (int(-1), Generator::Eisenstein(0))]),
                };
                if ech.push(&f) {
                    basis.expansions.push(f);
                    basis.provenance.push(combo);
                }
            }
        }
        if ech.rank() == target {
            return Ok(basis);
        }
        last_rank = ech.rank();
        prec = prec * int(2);
    }
    Err(Error::Unresolved(format!(
        "basis rank {last_rank} falls short of dimension {target} by {} within budget m·d² ≤ {}",
        target - last_rank,
        fmt_rational(&opts.budget)
    )))
}

/// `2Γ(k-1)/(4mπ)^{k-1} Σ_{λ=1}^{terms} c(λ²m, λβ) / λ^{2k-2}`, with the
/// coefficients supplied by `coeff(λ)`.
pub fn petersson_series<F>(k: &Rational, m: &Rational, terms: usize, coeff: F) -> Result<f64>
where
    F: Fn(i64) -> Result<Rational> + Sync,
{
    let h = ((k - int(1)) * int(2)).to_integer().to_i64().unwrap();
    let gamma = AlgebraicScalar::gamma_half(h).to_f64();
    let kf = k.to_f64().unwrap();
    let pre = 2.0 * gamma / (4.0 * m.to_f64().unwrap() * PI).powf(kf - 1.0);
    let vals: Vec<Result<f64>> = (1..=terms as i64)
        .into_par_iter()
        .map(|l| Ok(coeff(l)?.to_f64().unwrap() / (l as f64).powf(2.0 * kf - 2.0)))
        .collect();
    let mut s = 0.0;
    for v in vals {
        s += v?;
    }
    Ok(pre * s)
}

/// `(f, Q_{k,m,β})` from the stored coefficients of a cusp form `f`.
pub fn petersson_product(f: &FourierExpansion, m: &Rational, beta: usize, terms: usize) -> Result<f64> {
    let g = f.group.clone();
    petersson_series(&f.weight, m, terms, |l| {
        let n = m * int(l * l);
        f.get(g.scalar(l, beta), &n).cloned().ok_or_else(|| {
            Error::Precondition(format!("coefficient at n = {} is beyond the precision of f", fmt_rational(&n)))
        })
    })
}

/// Coefficient of a formal combination at `(n, γ)`.
pub fn combination_coefficient(
    g: &Arc<DiscriminantGroup>,
    k: &Rational,
    combo: &[(Rational, Generator)],
    n: &Rational,
    gamma: usize,
    variant: Variant,
) -> Result<Rational> {
    let mut s = Rational::zero();
    for (a, gen) in combo {
        s += a * gen.coefficient(g, k, n, gamma, variant)?;
    }
    Ok(s)
}

/// `(f, g)` for a cusp form `f` and any `g`, both given as combinations.
/// Eisenstein parts of `g` are orthogonal to `f` and drop out.
pub fn petersson_combinations(
    group: &Arc<DiscriminantGroup>,
    k: &Rational,
    f: &[(Rational, Generator)],
    g: &[(Rational, Generator)],
    terms: usize,
    variant: Variant,
) -> Result<f64> {
    let mut total = 0.0;
    for (b, gen) in g {
        if let Generator::Q { m, beta } = gen {
            let v = petersson_series(k, m, terms, |l| {
                combination_coefficient(group, k, f, &(m * int(l * l)), group.scalar(l, *beta), variant)
            })?;
            total += b.to_f64().unwrap() * v;
        }
    }
    Ok(total)
}

/// Principal part `Σ_{n<0} c(n,γ) qⁿ 𝔢_γ + c(0,0) 𝔢_0` of a
/// nearly-holomorphic form of weight `weight` for `ρ` (not `ρ*`) on
/// `group`, so exponents lie in `Z + q(γ)`. Obstructions then live in
/// `M_{2-weight}(ρ*)` on the same group.
///
/// Constant terms at other isotropic `γ` may be given too; when absent they
/// are solved for rather than forced to zero.
#[derive(Clone, Debug)]
pub struct PrincipalPart {
    pub group: Arc<DiscriminantGroup>,
    pub weight: Rational,
    pub coeffs: BTreeMap<(usize, Rational), Rational>,
}

impl PrincipalPart {
    pub fn new(group: Arc<DiscriminantGroup>, weight: Rational, coeffs: BTreeMap<(usize, Rational), Rational>) -> Result<Self> {
        for ((g, n), c) in &coeffs {
            let label = group.element(*g).label();
            if n.is_positive() {
                return Err(Error::Input(format!("term q^{} e_({label}) is not principal", fmt_rational(n))));
            }
            if !is_integer(&(n - group.q_value(*g))) {
                return Err(Error::Input(format!("exponent {} is not in Z + q(({label}))", fmt_rational(n))));
            }
            let other = coeffs.get(&(group.neg(*g), n.clone())).cloned().unwrap_or_else(Rational::zero);
            if other != *c {
                return Err(Error::Precondition(format!(
                    "c({}, {label}) = {} differs from c(n, -γ) = {}",
                    fmt_rational(n),
                    fmt_rational(c),
                    fmt_rational(&other)
                )));
            }
        }
        Ok(PrincipalPart { group, weight, coeffs })
    }

    fn max_pole(&self) -> Rational {
        self.coeffs.keys().map(|(_, n)| -n).max().unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub feasible: bool,
    /// Pairing of the principal part with each obstruction basis element.
    pub pairings: Vec<(String, Rational)>,
    pub violations: Vec<String>,
    /// Constant terms `c(0,β)`, `β ≠ 0` isotropic, fixed by the Eisenstein
    /// pairings when the principal part leaves them open.
    pub implied_constants: Vec<(String, Rational)>,
}

fn describe(g: &DiscriminantGroup, combo: &Combination) -> String {
    combo.iter().map(|(a, gen)| format!("{}*{}", fmt_rational(a), gen.label(g))).collect::<Vec<_>>().join(" + ")
}

/// Pairs the principal part with `S_k(ρ*)` and the Eisenstein family of
/// weight `k`. Cusp forms and `E_0` give genuine conditions; the member
/// `E_β` only pins down `c(0,β)` unless the principal part already sets it.
pub fn obstruction_check(pp: &PrincipalPart, k: &Rational, opts: &BasisOptions) -> Result<ObstructionReport> {
    let g = &pp.group;
    let need = pp.max_pole().ceil().to_integer().to_i64().unwrap() + 1;
    let mut o = opts.clone();
    o.min_prec = o.min_prec.max(need);
    let cusp = build_basis(g, k, SpaceKind::Cusp, &o)?;
    let prec = cusp.expansions.first().map(|f| f.prec.clone()).unwrap_or_else(|| int(o.min_prec.max(2)));
    let family = eisenstein_family(g, k, &prec)?;
    if !family.unresolved.is_empty() {
        let names: Vec<String> = family.unresolved.iter().map(|b| g.element(*b).label()).collect();
        return Err(Error::Unresolved(format!("Eisenstein family undetermined at ({})", names.join("), ("))));
    }
    let pair = |f: &FourierExpansion| -> Rational { pp.coeffs.iter().map(|((gm, n), c)| c * f.coeff(*gm, &-n)).sum() };
    let mut pairings = Vec::new();
    let mut violations = Vec::new();
    let mut implied_constants = Vec::new();
    for (f, combo) in cusp.expansions.iter().zip(&cusp.provenance) {
        let s = pair(f);
        let name = describe(g, combo);
        if !s.is_zero() {
            violations.push(name.clone());
        }
        pairings.push((name, s));
    }
    for (b, e) in &family.members {
        let s = pair(e);
        let name = Generator::Eisenstein(*b).label(g);
        let given = pp.coeffs.keys().any(|(gm, n)| n.is_zero() && (gm == b || *gm == g.neg(*b)));
        if *b == 0 || given {
            if !s.is_zero() {
                violations.push(name.clone());
            }
        } else {
            // c(0,β) = c(0,−β) enters through E_β's constant terms at ±β
            let mut w = e.coeff(*b, &int(0));
            if g.neg(*b) != *b {
                w += e.coeff(g.neg(*b), &int(0));
            }
            implied_constants.push((g.element(*b).label(), -&s / w));
        }
        pairings.push((name, s));
    }
    Ok(ObstructionReport { feasible: violations.is_empty(), pairings, violations, implied_constants })
}

/// The nearly-holomorphic form with principal part `pp`, found as
/// `G / Δ^j` with `G` a cusp form for the sign-flipped lattice.
///
/// `rows` is the number of coefficient rows wanted beyond the poles.
pub fn nearly_holomorphic(pp: &PrincipalPart, rows: i64, opts: &BasisOptions) -> Result<FourierExpansion> {
    let j = pp.max_pole().ceil().to_integer().to_i64().unwrap().max(1);
    let flipped = Arc::new(DiscriminantGroup::new(&pp.group.lattice.negated())?);
    let to_flipped = |g: usize| flipped.index_of(&pp.group.element(g).coords);
    let k = &pp.weight + int(12 * j);
    let mut o = opts.clone();
    o.min_prec = o.min_prec.max(rows + j);
    let basis = build_basis(&flipped, &k, SpaceKind::Cusp, &o)?;
    let prec = basis.expansions.first().map(|f| f.prec.clone()).unwrap_or_else(|| int(rows + j));
    let parts: Vec<FourierExpansion> = basis.expansions.iter().map(|g| divide_by_delta(&g.truncated(&prec), j as usize)).collect();
    // one equation per principal exponent: n < 0, n = 0 at γ = 0, and any
    // constant the principal part sets explicitly
    let mut target: BTreeMap<(usize, Rational), Rational> = BTreeMap::new();
    for ((g, n), c) in &pp.coeffs {
        target.insert((to_flipped(*g)?, n.clone()), c.clone());
    }
    let mut keys: Vec<(usize, Rational)> = Vec::new();
    for g in 0..flipped.order {
        for n in exponents(&flipped, g, &int(-j), &int(1)) {
            if n.is_negative() || (n.is_zero() && (g == 0 || target.contains_key(&(g, n.clone())))) {
                keys.push((g, n));
            }
        }
    }
    let a: Vec<Vec<Rational>> = keys.iter().map(|(g, n)| parts.iter().map(|f| f.coeff(*g, n)).collect()).collect();
    let b: Vec<Rational> = keys.iter().map(|k| target.get(k).cloned().unwrap_or_else(Rational::zero)).collect();
    let x = match solve(&a, &b) {
        Solution::Unique(x) => x,
        Solution::Many(_, d) => {
            return Err(Error::Unresolved(format!("principal part determines the form only up to a {d}-dimensional space")))
        }
        Solution::Inconsistent => {
            return Err(Error::Unresolved("no cusp form of the shifted weight has this principal part".into()))
        }
    };
    if parts.is_empty() {
        return Err(Error::Unresolved("cusp space of the shifted weight is zero".into()));
    }
    let terms: Vec<(Rational, &FourierExpansion)> = x.into_iter().zip(parts.iter()).collect();
    let f = FourierExpansion::combination(&terms);
    let out = f.truncated(&int(rows));
    Ok(out)
}

/// The sign-flipped lattice's group, with elements in the same coordinates.
pub fn flipped_group(group: &DiscriminantGroup) -> Result<Arc<DiscriminantGroup>> {
    Ok(Arc::new(DiscriminantGroup::new(&group.lattice.negated())?))
}

/// Rank-0 helper: the lattice with trivial discriminant group.
pub fn scalar_group() -> Arc<DiscriminantGroup> {
    Arc::new(DiscriminantGroup::new(&Lattice::rank0()).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(g: Vec<Vec<i64>>) -> Arc<DiscriminantGroup> {
        Arc::new(DiscriminantGroup::new(&Lattice::new(g).unwrap()).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(dimension(&group(vec![vec![-2]]), &rat(5, 2)).unwrap().0, 1);
        assert_eq!(dimension(&group(vec![vec![-4, 0], vec![0, -4]]), &int(3)).unwrap(), (4, 2));
        assert_eq!(dimension(&scalar_group(), &int(12)).unwrap(), (2, 1));
        assert_eq!(dimension(&scalar_group(), &int(4)).unwrap(), (1, 0));
        assert!(matches!(dimension(&group(vec![vec![-2]]), &int(3)), Err(Error::Parity(_))));
    }

    #[test]
    fn ramanujan_tau() {
        let t = delta_expansion(8);
        let want = [0i64, 1, -24, 252, -1472, 4830, -6048, -16744];
        assert_eq!(t, want.map(BigInt::from).to_vec());
    }

    #[test]
    fn delta_division_inverts_multiplication() {
        let g = scalar_group();
        let mut f = FourierExpansion::new(g.clone(), int(12), int(6));
        for (n, c) in delta_expansion(6).into_iter().enumerate() {
            f.insert(0, int(n as i64), Rational::from_integer(c));
        }
        let one = divide_by_delta(&f, 1);
        assert_eq!(one.coeff(0, &int(0)), int(1));
        assert!((1..5).all(|n| one.coeff(0, &int(n)).is_zero()));
    }
}
