use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weilrep::arith::{int, rat, Rational};
use weilrep::series::eisenstein_expansion;
use weilrep::weil::{average, e_rat, heisenberg_act, rho_generators, rho_matrix, sigma_action, RepMatrix};
use weilrep::{DiscriminantGroup, FourierExpansion, Lattice};

type M2 = [[i64; 2]; 2];

fn mat_mul(x: M2, y: M2) -> M2 {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

fn lattices() -> Vec<DiscriminantGroup> {
    [vec![vec![-2]], vec![vec![-4, -2], vec![-2, -4]], vec![vec![2, 1], vec![1, -4]], vec![vec![-6]], vec![vec![4, 0], vec![0, 4]]]
        .into_iter()
        .map(|g| DiscriminantGroup::new(&Lattice::new(g).unwrap()).unwrap())
        .collect()
}

/// A random word in `S`, `T`, `T⁻¹` with its matrix and representation.
fn random_word(rng: &mut ChaCha8Rng, g: &DiscriminantGroup, len: usize) -> (M2, RepMatrix) {
    let (t, s, _) = rho_generators(g);
    let tinv = t.adjoint();
    let mut m = [[1, 0], [0, 1]];
    let mut r = RepMatrix::identity(g.order);
    for _ in 0..len {
        let (x, rx) = match rng.gen_range(0..3) {
            0 => ([[0, -1], [1, 0]], &s),
            1 => ([[1, 1], [0, 1]], &t),
            _ => ([[1, -1], [0, 1]], &tinv),
        };
        m = mat_mul(m, x);
        r = r.mul(rx);
    }
    (m, r)
}

#[test]
fn generators_satisfy_relations() {
    for g in lattices() {
        let (t, s, z) = rho_generators(&g);
        for m in [&t, &s, &z] {
            assert!(m.is_unitary(1e-10));
        }
        let st = s.mul(&t);
        assert!(st.mul(&st).mul(&st).approx_eq(&z, 1e-9));
        assert!(s.mul(&s).approx_eq(&z, 1e-10));
        let phase = Complex64::i().powi(g.lattice.sig_minus as i32 - g.lattice.sig_plus as i32);
        for c in 0..g.order {
            assert!((z.entries[g.neg(c)][c] - phase).norm() < 1e-12);
        }
    }
}

#[test]
fn shintani_lower_triangular() {
    for g in lattices() {
        let (t, s, _) = rho_generators(&g);
        let word = s.mul(&t.adjoint()).mul(&s.adjoint());
        assert!(rho_matrix(&g, [[1, 0], [1, 1]], true).approx_eq_up_to_sign(&word, 1e-9));
    }
}

#[test]
fn shintani_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gs = lattices();
    for i in 0..100 {
        let g = &gs[i % gs.len()];
        let (m1, _) = random_word(&mut rng, g, 5);
        let (m2, _) = random_word(&mut rng, g, 5);
        if [m1, m2, mat_mul(m1, m2)].iter().any(|m| m[1][0].abs() > 12) {
            continue;
        }
        let lhs = rho_matrix(g, mat_mul(m1, m2), true);
        let rhs = rho_matrix(g, m1, true).mul(&rho_matrix(g, m2, true));
        assert!(lhs.approx_eq_up_to_sign(&rhs, 1e-9), "{m1:?} {m2:?}");
        assert!(lhs.is_unitary(1e-9));
    }
}

#[test]
fn shintani_matches_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for g in lattices() {
        for _ in 0..20 {
            let (m, r) = random_word(&mut rng, &g, 4);
            assert!(rho_matrix(&g, m, true).approx_eq_up_to_sign(&r, 1e-9), "{m:?}");
        }
    }
}

#[test]
fn schrodinger_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for g in lattices() {
        for _ in 0..20 {
            let beta = rng.gen_range(0..g.order);
            let zeta = (rng.gen_range(-4..5), rng.gen_range(-4..5), rng.gen_range(-4..5));
            let (m, r) = random_word(&mut rng, &g, 4);
            let lhs = r.adjoint().mul(&sigma_action(&g, beta, zeta)).mul(&r);
            let rhs = sigma_action(&g, beta, heisenberg_act(zeta, m));
            assert!(lhs.approx_eq(&rhs, 1e-9), "β = {beta}, ζ = {zeta:?}, M = {m:?}");
        }
    }
}

#[test]
fn schrodinger_special_cases() {
    let g = &lattices()[1];
    for beta in 0..g.order {
        let a = sigma_action(g, beta, (0, 0, 1));
        let b = sigma_action(g, beta, (1, 0, 0));
        for c in 0..g.order {
            assert!((a.entries[c][c] - e_rat(&g.q_value(beta))).norm() < 1e-12);
            assert!((b.entries[g.add(c, g.neg(beta))][c] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}

/// The averaging operator straight from its definition as a double sum
/// over the dual Schrödinger representation, in floating point.
fn average_by_definition(beta: usize, f: &FourierExpansion) -> Vec<((usize, Rational), f64)> {
    let g = &f.group;
    let d = g.denominator(beta) as i64;
    let dd = d * d;
    let mut acc: std::collections::BTreeMap<(usize, Rational), Complex64> = Default::default();
    for ((gamma, n), c) in &f.coeffs {
        for l in 0..dd {
            for mu in 0..dd {
                let phase = e_rat(&(-int(mu) * g.pairing(beta, *gamma) + int(l * mu) * g.q_value(beta)));
                let tgt = g.add(*gamma, g.scalar(-l, beta));
                *acc.entry((tgt, n.clone())).or_default() += phase * c.to_f64().unwrap() / dd as f64;
            }
        }
    }
    acc.into_iter().map(|(k, v)| (k, v.re / d as f64)).collect()
}

#[test]
fn averaging_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for g in lattices() {
        let g = Arc::new(g);
        for _ in 0..5 {
            let mut f = FourierExpansion::new(g.clone(), int(3), int(2));
            for c in 0..g.order {
                for n in weilrep::series::exponents(&g, c, &int(0), &int(2)) {
                    f.insert(c, n, rat(rng.gen_range(-20..20), rng.gen_range(1..4)));
                }
            }
            for beta in 0..g.order {
                let exact = average(beta, &f);
                for (key, v) in average_by_definition(beta, &f) {
                    let got = exact.coeff(key.0, &key.1).to_f64().unwrap();
                    assert!((got - v).abs() < 1e-9, "β = {beta}: {got} vs {v}");
                }
            }
        }
    }
}

#[test]
fn averaging_is_linear_and_trivial_at_zero() {
    let g = Arc::new(DiscriminantGroup::new(&Lattice::new(vec![vec![-8]]).unwrap()).unwrap());
    let e = eisenstein_expansion(&g, &rat(5, 2), &int(3)).unwrap();
    assert_eq!(average(0, &e), e);
    let h = g.index_of(&[rat(1, 2)]).unwrap();
    let two = e.scale(&int(2));
    assert_eq!(average(h, &two), average(h, &e).scale(&int(2)));
}

#[test]
fn averaging_reproduces_combined_table() {
    let g = Arc::new(DiscriminantGroup::new(&Lattice::new(vec![vec![-8]]).unwrap()).unwrap());
    let e = eisenstein_expansion(&g, &rat(5, 2), &int(4)).unwrap();
    let h = g.index_of(&[rat(1, 2)]).unwrap();
    let a = average(h, &e);
    let quarter = g.index_of(&[rat(1, 4)]).unwrap();
    let want0: Vec<Rational> = [1, -70, -120, -240].map(int).to_vec();
    assert_eq!(a.values(0), want0);
    assert_eq!(a.values(h), want0);
    assert_eq!(a.values(quarter)[..3], [-10, -48, -250].map(int));
    let odd = g.index_of(&[rat(1, 8)]).unwrap();
    assert!(a.values(odd).iter().all(|c| *c == int(0)));
}
