use rand::Rng;
use rand_chacha::ChaCha8Rng;
use weilrep::arith::{int, Rational};
use weilrep::igusa::QuadraticPolynomial;

/// Random integral quadratic polynomial in at most three variables, with
/// entries spread over the first few powers of `p`.
pub fn random_poly(rng: &mut ChaCha8Rng, p: u64) -> QuadraticPolynomial {
    let n = rng.gen_range(1..=3);
    let pick = [0i64, 1, -1, 2, 3, 4, -2, 6, 8, 5, 12];
    let scale = [1i64, 1, p as i64, (p * p) as i64];
    let mut g = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let x = pick[rng.gen_range(0..pick.len())] * scale[rng.gen_range(0..4)];
            if i == j {
                g[i][i] = int(2 * x);
            } else {
                g[i][j] = int(x);
                g[j][i] = int(x);
            }
        }
    }
    let p = p as i64;
    let lin = [0, 1, 2, 3, 4, p, p * p, 2 * p, p * p * p];
    let cs = [0, 0, 0, 1, 2, 3, 4, p, p * p, p * p * p, 5 * p, -1, 6, -p * p];
    let l: Vec<Rational> = (0..n).map(|_| int(lin[rng.gen_range(0..lin.len())])).collect();
    QuadraticPolynomial::new(g, l, int(cs[rng.gen_range(0..cs.len())]))
}
