use std::collections::BTreeMap;
use std::sync::Arc;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use weilrep::arith::{int, parse_rational, rat, Rational};
use weilrep::linalg::{solve, Solution};
use weilrep::series::{eisenstein_expansion, qseries_expansion, SeriesRequest, Variant};
use weilrep::spaces::{
    build_basis, delta_expansion, divide_by_delta, eisenstein_family, nearly_holomorphic, obstruction_check,
    petersson_combinations, petersson_product, rank, scalar_group, BasisOptions, Generator, PrincipalPart, SpaceKind,
};
use weilrep::{DiscriminantGroup, FourierExpansion, Lattice};

fn group(g: Vec<Vec<i64>>) -> Arc<DiscriminantGroup> {
    Arc::new(DiscriminantGroup::new(&Lattice::new(g).unwrap()).unwrap())
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

#[test]
fn scalar_delta_identity() {
    let g = scalar_group();
    let e = eisenstein_expansion(&g, &int(12), &int(7)).unwrap();
    assert_eq!(e.coeff(0, &int(1)), rat(65520, 691));
    let qs = qseries_expansion(&SeriesRequest::new(g.clone(), int(12), int(1), 0, int(7)).unwrap()).unwrap();
    let d = qs.sub(&e).scale(&rat(53678953, 304819200));
    let tau = delta_expansion(7);
    for n in 0..7 {
        assert_eq!(d.coeff(0, &int(n)), Rational::from_integer(tau[n as usize].clone()), "q^{n}");
    }
}

/// Power series in `x` truncated to `len` terms.
fn ps_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Π_{n≥1} (1 - x^{step·n})^e` for `e` of either sign.
fn euler_pow(step: usize, e: i64, len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    out[0] = 1;
    let mut n = step;
    while n < len {
        for _ in 0..e.abs() {
            let mut f = vec![0; len];
            f[0] = 1;
            if e > 0 {
                f[n] = -1;
            } else {
                let mut j = 0;
                while j < len {
                    f[j] = 1;
                    j += n;
                }
            }
            out = ps_mul(&out, &f);
        }
        n += step;
    }
    out
}

/// The reference nearly-holomorphic form, from its eta-product components,
/// through `q^{rows}` on every component of diag(4,4).
fn eta_quotient_form(g: &Arc<DiscriminantGroup>, rows: i64) -> FourierExpansion {
    let len = 2 * rows as usize + 4;
    // in powers of q^{1/2}
    let a = ps_mul(&euler_pow(4, 2, len), &euler_pow(2, -4, len));
    let b = ps_mul(&euler_pow(1, 2, len), &euler_pow(2, -4, len));
    let mut f = FourierExpansion::new(g.clone(), int(-1), int(rows));
    let el = |x: (i64, i64), y: (i64, i64)| g.index_of(&[rat(x.0, x.1), rat(y.0, y.1)]).unwrap();
    for gamma in 0..g.order {
        for n in weilrep::series::exponents(g, gamma, &int(-1), &int(rows)) {
            f.insert(gamma, n, int(0));
        }
    }
    for i in (0..len).step_by(2) {
        let n = int(i as i64 / 2);
        if n < int(rows) {
            f.insert(el((0, 1), (0, 1)), n.clone(), int(2 * a[i]));
            f.insert(el((1, 2), (1, 2)), n, int(-2 * a[i]));
        }
    }
    for (i, c) in b.iter().enumerate() {
        let n = rat(i as i64, 2) - rat(1, 8);
        if n >= int(rows) {
            continue;
        }
        let orbit = if i % 2 == 0 {
            [((1, 4), (0, 1)), ((3, 4), (0, 1)), ((0, 1), (1, 4)), ((0, 1), (3, 4))]
        } else {
            [((1, 4), (1, 2)), ((3, 4), (1, 2)), ((1, 2), (1, 4)), ((1, 2), (3, 4))]
        };
        for (x, y) in orbit {
            f.insert(el(x, y), n.clone(), int(*c));
        }
    }
    f
}

fn times_delta(f: &FourierExpansion) -> FourierExpansion {
    let tau = delta_expansion(12);
    let mut out = FourierExpansion::new(f.group.clone(), &f.weight + int(12), &f.prec + int(1));
    for gamma in 0..f.group.order {
        for n in weilrep::series::exponents(&f.group, gamma, &int(0), &out.prec) {
            let mut s = int(0);
            for (t, c) in tau.iter().enumerate() {
                let src = &n - int(t as i64);
                if let Some(x) = f.get(gamma, &src) {
                    s += x * Rational::from_integer(c.clone());
                }
            }
            out.insert(gamma, n, s);
        }
    }
    out
}

const ALPHAS: [&str; 5] = [
    "1222146606526920765211168/665492278281307137675",
    "-814700552816424434236/1996476834843921413025",
    "-5383641094234426568192/133098455656261427535",
    "77190276919058739618292/665492278281307137675",
    "-3816441333371605691531264/1996476834843921413025",
];

fn weight_eleven_generators(g: &Arc<DiscriminantGroup>, prec: &Rational) -> Vec<FourierExpansion> {
    let k = int(11);
    let mut forms = vec![eisenstein_expansion(g, &k, prec).unwrap()];
    for m in 1..=4 {
        forms.push(qseries_expansion(&SeriesRequest::new(g.clone(), k.clone(), int(m), 0, prec.clone()).unwrap()).unwrap());
    }
    forms
}

#[test]
fn nearly_holomorphic_from_given_alphas() {
    let g = group(vec![vec![4, 0], vec![0, 4]]);
    let prec = int(6);
    let forms = weight_eleven_generators(&g, &prec);
    let terms: Vec<(Rational, &FourierExpansion)> = ALPHAS.iter().map(|a| q(a)).zip(forms.iter()).collect();
    let f = divide_by_delta(&FourierExpansion::combination(&terms), 1);
    // the whole table, not just the first rows, agrees with the eta quotients
    let want = eta_quotient_form(&g, 5);
    for ((gamma, n), c) in &want.coeffs {
        assert_eq!(f.coeff(*gamma, n), *c, "({}) at q^{n}", g.element(*gamma).label());
    }
}

#[test]
fn given_alphas_are_the_unique_solution() {
    let g = group(vec![vec![4, 0], vec![0, 4]]);
    let prec = int(6);
    let forms = weight_eleven_generators(&g, &prec);
    let target = times_delta(&eta_quotient_form(&g, 5));
    let keys: Vec<(usize, Rational)> = target.coeffs.keys().cloned().collect();
    let a: Vec<Vec<Rational>> = keys.iter().map(|(gm, n)| forms.iter().map(|f| f.coeff(*gm, n)).collect()).collect();
    let b: Vec<Rational> = keys.iter().map(|(gm, n)| target.coeff(*gm, n)).collect();
    match solve(&a, &b) {
        Solution::Unique(x) => assert_eq!(x, ALPHAS.map(q).to_vec()),
        other => panic!("expected a unique solution, got {other:?}"),
    }
}

fn singular_weight_pp(g: &Arc<DiscriminantGroup>) -> PrincipalPart {
    let mut c = BTreeMap::new();
    for (x, y) in [((1, 4), (0, 1)), ((3, 4), (0, 1)), ((0, 1), (1, 4)), ((0, 1), (3, 4))] {
        c.insert((g.index_of(&[rat(x.0, x.1), rat(y.0, y.1)]).unwrap(), rat(-1, 8)), int(1));
    }
    c.insert((0, int(0)), int(2));
    PrincipalPart::new(g.clone(), int(-1), c).unwrap()
}

#[test]
fn obstruction_singular_weight() {
    let g = group(vec![vec![-4, 0], vec![0, -4]]);
    let pp = singular_weight_pp(&g);
    let opts = BasisOptions::default();
    let rep = obstruction_check(&pp, &int(3), &opts).unwrap();
    assert!(rep.feasible, "{:?}", rep.pairings);
    assert_eq!(rep.pairings.len(), 4);
    // F carries −2 at 𝔢_(1/2,1/2), forced by the second Eisenstein series
    assert_eq!(rep.implied_constants, vec![("1/2,1/2".to_string(), int(-2))]);
    let mut with_const = pp.coeffs.clone();
    with_const.insert((g.index_of(&[rat(1, 2), rat(1, 2)]).unwrap(), int(0)), int(-2));
    let explicit = PrincipalPart::new(g.clone(), int(-1), with_const.clone()).unwrap();
    assert!(obstruction_check(&explicit, &int(3), &opts).unwrap().feasible);
    with_const.insert((g.index_of(&[rat(1, 2), rat(1, 2)]).unwrap(), int(0)), int(1));
    let wrong = PrincipalPart::new(g.clone(), int(-1), with_const).unwrap();
    assert_eq!(obstruction_check(&wrong, &int(3), &opts).unwrap().violations, vec!["E[1/2,1/2]".to_string()]);
    let scaled = PrincipalPart::new(g.clone(), int(-1), pp.coeffs.iter().map(|(k, v)| (k.clone(), v * int(5))).collect()).unwrap();
    assert!(obstruction_check(&scaled, &int(3), &opts).unwrap().feasible);

    // moving weight from one orbit pair to the other breaks a cusp pairing
    let mut bad = pp.coeffs.clone();
    for (x, y) in [((0, 1), (1, 4)), ((0, 1), (3, 4))] {
        bad.insert((g.index_of(&[rat(x.0, x.1), rat(y.0, y.1)]).unwrap(), rat(-1, 8)), int(2));
    }
    bad.insert((0, int(0)), int(3));
    let rep = obstruction_check(&PrincipalPart::new(g.clone(), int(-1), bad).unwrap(), &int(3), &opts).unwrap();
    assert!(!rep.feasible);
    assert!(rep.violations.iter().any(|v| v.contains("Q[")), "{:?}", rep.violations);

    let mut asym = pp.coeffs.clone();
    asym.insert((g.index_of(&[rat(1, 4), int(0)]).unwrap(), rat(-1, 8)), int(7));
    assert!(PrincipalPart::new(g.clone(), int(-1), asym).is_err());
}

#[test]
fn nearly_holomorphic_singular_weight() {
    let g = group(vec![vec![-4, 0], vec![0, -4]]);
    let f = nearly_holomorphic(&singular_weight_pp(&g), 4, &BasisOptions::default()).unwrap();
    let want = eta_quotient_form(&f.group, 4);
    for ((gamma, n), c) in &want.coeffs {
        assert_eq!(f.coeff(*gamma, n), *c, "({}) at q^{n}", f.group.element(*gamma).label());
    }
}

#[test]
fn bases_reach_dimension() {
    let g = group(vec![vec![-4, 0], vec![0, -4]]);
    let opts = BasisOptions::default();
    let full = build_basis(&g, &int(3), SpaceKind::Full, &opts).unwrap();
    assert_eq!(full.expansions.len(), 4);
    let cusp = build_basis(&g, &int(3), SpaceKind::Cusp, &opts).unwrap();
    assert_eq!(cusp.expansions.len(), 2);
    // both reference cusp forms lie in the span
    let b1 = g.index_of(&[rat(1, 4), int(0)]).unwrap();
    let b2 = g.index_of(&[rat(1, 4), rat(1, 4)]).unwrap();
    let prec = cusp.expansions[0].prec.clone();
    let e = eisenstein_expansion(&g, &int(3), &prec).unwrap();
    for (m, b) in [(rat(1, 8), b1), (rat(1, 4), b2)] {
        let f = qseries_expansion(&SeriesRequest::new(g.clone(), int(3), m, b, prec.clone()).unwrap()).unwrap().sub(&e);
        let mut all = cusp.expansions.clone();
        all.push(f);
        assert_eq!(rank(&g, &all, &prec), 2);
    }
    // rank is stable when the window doubles
    let wide = int(2) * &prec;
    let forms: Vec<FourierExpansion> = full
        .provenance
        .iter()
        .map(|combo| match &combo[0].1 {
            Generator::Eisenstein(b) => eisenstein_family(&g, &int(3), &wide).unwrap().members[b].clone(),
            Generator::Q { m, beta } => {
                qseries_expansion(&SeriesRequest::new(g.clone(), int(3), m.clone(), *beta, wide.clone()).unwrap()).unwrap()
            }
        })
        .collect();
    assert_eq!(rank(&g, &forms, &wide), 4);

    let s = scalar_group();
    let delta = build_basis(&s, &int(12), SpaceKind::Cusp, &opts).unwrap();
    assert_eq!(delta.expansions.len(), 1);
    assert_eq!(delta.expansions[0].coeff(0, &int(0)), int(0));
    assert!(build_basis(&group(vec![vec![-2]]), &rat(5, 2), SpaceKind::Cusp, &opts).unwrap().expansions.is_empty());
}

#[test]
fn eisenstein_family_level_eight() {
    let g = group(vec![vec![-8]]);
    let k = rat(5, 2);
    let fam = eisenstein_family(&g, &k, &int(4)).unwrap();
    let h = g.index_of(&[rat(1, 2)]).unwrap();
    assert!(fam.unresolved.is_empty());
    assert_eq!(fam.members[&0], eisenstein_expansion(&g, &k, &int(4)).unwrap());
    let sum = fam.members[&0].add(&fam.members[&h]);
    assert_eq!(sum.values(0), [1, -70, -120, -240].map(int).to_vec());
    assert_eq!(fam.members[&h].coeff(h, &int(0)), int(1));
}

/// `Π (1 − x^{step·k})³ = Σ (−1)ʲ (2j+1) x^{step·j(j+1)/2}`, truncated.
fn euler_cube(step: usize, len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    let mut j = 0;
    while step * j * (j + 1) / 2 < len {
        out[step * j * (j + 1) / 2] += if j % 2 == 0 { 2 * j as i64 + 1 } else { -(2 * j as i64 + 1) };
        j += 1;
    }
    out
}

fn sparse_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len()];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, y) in b[..a.len() - i].iter().enumerate().filter(|(_, y)| **y != 0) {
            out[i + j] += x * y;
        }
    }
    out
}

/// The two component functions of Θ in powers of `u = q^{1/6}`:
/// `η(τ/3)³η(τ)³ + 3η(τ)³η(3τ)³` and `η(τ)³η(3τ)³`.
fn theta_components(len: usize) -> (Vec<i64>, Vec<i64>) {
    let shift = |v: Vec<i64>, by: usize| -> Vec<i64> { [vec![0; by], v[..len - by].to_vec()].concat() };
    let a = shift(sparse_mul(&euler_cube(2, len), &euler_cube(6, len)), 1);
    let b = shift(sparse_mul(&euler_cube(6, len), &euler_cube(18, len)), 3);
    (a.iter().zip(&b).map(|(x, y)| x + 3 * y).collect(), b)
}

fn eta(t: Complex64) -> Complex64 {
    let q = (Complex64::i() * 2.0 * PI * t).exp();
    let mut r = (Complex64::i() * PI * t / 12.0).exp();
    let mut qk = q;
    while qk.norm() > 1e-18 {
        r *= Complex64::new(1.0, 0.0) - qk;
        qk *= q;
    }
    r
}

/// `∫_F Σ_γ |Θ_γ|² y³ dμ` by composite Simpson over the standard domain.
fn theta_norm_by_integration() -> f64 {
    let simpson = |n: usize, a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        let h = (b - a) / n as f64;
        (0..=n).map(|i| f(a + i as f64 * h) * if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }).sum::<f64>() * h / 3.0
    };
    let density = |x: f64, y: f64| -> f64 {
        let t = Complex64::new(x, y);
        let (e1, e3, e13) = (eta(t).powu(3), eta(t * 3.0).powu(3), eta(t / 3.0).powu(3));
        let a = e13 * e1 + e1 * e3 * 3.0;
        let b = e1 * e3 * 6.0;
        (12.0 * a.norm_sqr() + 6.0 * b.norm_sqr()) * y
    };
    simpson(80, -0.5, 0.5, &|x| {
        let y0 = (1.0 - x * x).sqrt();
        simpson(400, y0, 4.0, &|y| density(x, y)) + simpson(400, 4.0, 40.0, &|y| density(x, y))
    })
}

#[test]
fn theta_petersson_norm() {
    let g = group(vec![vec![-4, -2], vec![-2, -4]]);
    let k = int(3);
    let beta = g.index_of(&[rat(1, 6), rat(1, 6)]).unwrap();
    let m = rat(1, 6);
    let theta = vec![(int(1), Generator::Eisenstein(0)), (int(-1), Generator::Q { m: m.clone(), beta })];
    let val = petersson_combinations(&g, &k, &theta, &theta, 150, Variant::default()).unwrap();

    // the same partial sum from the eta products: c(λ²/6, λβ) is −2A(λ²/6)
    // for λ prime to 6, 12B(λ²/6) for λ ≡ 3 (6), and 0 otherwise
    let (a, b) = theta_components(150 * 150 + 1);
    let mut s = 0.0;
    for l in 1..=150usize {
        let c = match l % 6 {
            1 | 5 => -2 * a[l * l],
            3 => 12 * b[l * l],
            _ => 0,
        };
        s += c as f64 / (l as f64).powi(4);
    }
    let series = -9.0 / (2.0 * PI * PI) * s;
    assert!((val - series).abs() < 1e-9, "{val} vs {series}");

    // the partial sum is within its tail of the integral over a fundamental domain
    let exact = theta_norm_by_integration();
    assert!((exact - 1.20541).abs() < 1e-4, "integral {exact}");
    assert!((val - exact).abs() < 0.01, "{val} vs {exact}");
    assert!((val - 0.24).abs() > 0.5);
}

#[test]
fn petersson_is_linear_in_the_second_slot() {
    let g = group(vec![vec![-4, 0], vec![0, -4]]);
    let b1 = g.index_of(&[rat(1, 4), int(0)]).unwrap();
    let k = int(3);
    let f = vec![(rat(2, 3), Generator::Q { m: rat(1, 8), beta: b1 }), (rat(-2, 3), Generator::Eisenstein(0))];
    let q1 = Generator::Q { m: int(1), beta: 0 };
    let q2 = Generator::Q { m: rat(1, 8), beta: b1 };
    let v = Variant::default();
    let both = petersson_combinations(&g, &k, &f, &[(int(1), q1.clone()), (int(-1), q2.clone())], 20, v).unwrap();
    let one = petersson_combinations(&g, &k, &f, &[(int(1), q1)], 20, v).unwrap();
    let two = petersson_combinations(&g, &k, &f, &[(int(1), q2)], 20, v).unwrap();
    assert!((both - (one - two)).abs() < 1e-12);
    let zero = FourierExpansion::new(g.clone(), k.clone(), int(40));
    let mut z = zero.clone();
    for gamma in 0..g.order {
        for n in weilrep::series::exponents(&g, gamma, &int(0), &int(40)) {
            z.insert(gamma, n, int(0));
        }
    }
    assert_eq!(petersson_product(&z, &rat(1, 8), b1, 10).unwrap(), 0.0);
    assert!(petersson_product(&zero, &rat(1, 8), b1, 10).is_err());
}

#[test]
fn scalar_delta_petersson_routes_agree() {
    // Σ τ(n²)/n²² = ζ(11)⁻¹ Σ τ(n)²/n²² for the Hecke eigenform Δ
    let tau = delta_expansion(40 * 40 + 1);
    let lhs: f64 = (1..=40usize).map(|n| tau[n * n].to_f64().unwrap() / (n as f64).powi(22)).sum();
    let zeta11: f64 = (1..200).map(|n| (n as f64).powi(-11)).sum();
    let rhs: f64 = (1..=200usize.min(tau.len() - 1)).map(|n| tau[n].to_f64().unwrap().powi(2) / (n as f64).powi(22)).sum::<f64>() / zeta11;
    assert!((lhs / rhs - 1.0).abs() < 1e-6, "{lhs} vs {rhs}");
    let g = scalar_group();
    let combo = vec![(rat(53678953, 304819200), Generator::Q { m: int(1), beta: 0 }), (rat(-53678953, 304819200), Generator::Eisenstein(0))];
    let via_q = petersson_combinations(&g, &int(12), &combo, &combo, 8, Variant::default()).unwrap();
    // (Δ,Δ) = 53678953/304819200 (Δ, Q_{12,1,0}); its series is c·Σ τ(λ²)/λ²²
    let gamma10: f64 = (1..=10).map(|x| x as f64).product();
    let direct = (53678953.0 / 304819200.0) * 2.0 * gamma10 / (4.0 * std::f64::consts::PI).powi(11) * lhs;
    assert!((via_q / direct - 1.0).abs() < 1e-6, "{via_q} vs {direct}");
    assert!((via_q / 1.035362e-6 - 1.0).abs() < 1e-5, "(Δ,Δ) = {via_q}");
}
