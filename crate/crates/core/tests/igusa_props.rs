mod common;

use common::random_poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weilrep::arith::{int, Rational};
use weilrep::igusa::{count_solutions, counts_from_zeta, normal_form, QuadraticPolynomial};

#[test]
fn engine_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..150 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let f = random_poly(&mut rng, p);
        let got = counts_from_zeta(&f, p, 3).unwrap();
        for nu in 0..=3u32 {
            let want = count_solutions(&f, p, nu).unwrap();
            assert_eq!(got[nu as usize], int(want as i64), "{f:?} at p = {p}, nu = {nu}");
        }
    }
}

#[test]
fn normal_form_is_isospectral() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let f = random_poly(&mut rng, p);
        let nf = normal_form(&f, p).unwrap();
        let src = if nf.doubled { f.scaled(&int(2)) } else { f.clone() };
        let g = nf.realize();
        for nu in 0..=3u32 {
            assert_eq!(count_solutions(&src, p, nu).unwrap(), count_solutions(&g, p, nu).unwrap(), "{f:?} {nf:?}");
        }
    }
}

/// Diagonal-plus-planes forms spread over several 2-adic scales, where the
/// interaction between neighbouring Jordan constituents matters.
fn layered_poly(rng: &mut ChaCha8Rng, p: u64) -> QuadraticPolynomial {
    let n = rng.gen_range(1..=if p == 2 { 4 } else { 3 });
    let units: &[i64] = if p == 2 { &[1, 3, 5, 7, -1, -3] } else { &[1, 2, -1, 4, 5] };
    let mut g = vec![vec![int(0); n]; n];
    let mut i = 0;
    while i < n {
        let s = (p as i64).pow(rng.gen_range(0..4));
        if i + 1 < n && rng.gen_range(0..4) == 0 {
            let ell = rng.gen_bool(0.5);
            g[i][i + 1] = int(s);
            g[i + 1][i] = int(s);
            if ell {
                g[i][i] = int(2 * s);
                g[i + 1][i + 1] = int(2 * s);
            }
            i += 2;
        } else {
            g[i][i] = int(2 * s * units[rng.gen_range(0..units.len())]);
            i += 1;
        }
    }
    let pi = p as i64;
    let lin = [0, 0, 0, 1, 2, 4, pi, pi * pi, 8 * pi];
    let cs = [0, 1, 2, 3, 4, 6, 8, 12, 16, -1, -2, pi, pi * pi, 5, 7, 24];
    let l: Vec<Rational> = (0..n).map(|_| if rng.gen_bool(0.3) { int(lin[rng.gen_range(0..lin.len())]) } else { int(0) }).collect();
    QuadraticPolynomial::new(g, l, int(cs[rng.gen_range(0..cs.len())]))
}

#[test]
fn engine_matches_brute_force_deep() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut failures = Vec::new();
    let pinned = QuadraticPolynomial::new(
        vec![vec![int(-4), int(0), int(0)], vec![int(0), int(-4), int(0)], vec![int(0), int(0), int(2)]],
        vec![int(0); 3],
        int(1),
    );
    let mut cases: Vec<(u64, QuadraticPolynomial)> = vec![(2, pinned)];
    for _ in 0..2000 {
        let p = [2u64, 2, 3, 5][rng.gen_range(0..4)];
        cases.push((p, layered_poly(&mut rng, p)));
    }
    for (p, f) in cases {
        let numax = match (p, f.nvars()) {
            (2, 4) => 5,
            (2, _) => 6,
            (3, _) => 4,
            _ => 3,
        };
        let got = counts_from_zeta(&f, p, numax).unwrap();
        for nu in 0..=numax as u32 {
            let want = count_solutions(&f, p, nu).unwrap();
            if got[nu as usize] != int(want as i64) {
                failures.push(format!("p = {p}, nu = {nu}: {} vs {want} for {:?}", got[nu as usize], normal_form(&f, p).unwrap()));
                break;
            }
        }
    }
    assert!(failures.is_empty(), "{} failures:\n{}", failures.len(), failures.join("\n"));
}
