//! The Weil representation, the Schrödinger representation and the exact
//! averaging operator.
//!
//! Matrices are complex floating point and exist for validation only; the
//! averaging operator has a rational closed form and never touches them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{frac, int, is_integer, Rational};
use crate::lattice::DiscriminantGroup;
use crate::series::FourierExpansion;

/// `e(x) = exp(2πix)` for a rational `x`, reduced mod 1 first.
pub fn e_rat(x: &Rational) -> Complex64 {
    let f = frac(x).to_f64().unwrap();
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

/// A square complex matrix indexed by the elements of a discriminant group.
/// `entries[β][γ] = ⟨ρ 𝔢_γ, 𝔢_β⟩`.
#[derive(Clone, Debug)]
pub struct RepMatrix {
    pub entries: Vec<Vec<Complex64>>,
    pub source: String,
}

impl RepMatrix {
    pub fn zeros(n: usize, source: impl Into<String>) -> Self {
        RepMatrix { entries: vec![vec![Complex64::zero(); n]; n], source: source.into() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, "I");
        for i in 0..n {
            m.entries[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn mul(&self, o: &RepMatrix) -> RepMatrix {
        let n = self.dim();
        let mut r = Self::zeros(n, format!("{}·{}", self.source, o.source));
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a == Complex64::zero() {
                    continue;
                }
                for j in 0..n {
                    r.entries[i][j] += a * o.entries[k][j];
                }
            }
        }
        r
    }

    pub fn scale(&self, c: Complex64) -> RepMatrix {
        let mut r = self.clone();
        r.entries.iter_mut().flatten().for_each(|x| *x *= c);
        r
    }

    /// Conjugate transpose, which is the inverse of a unitary matrix.
    pub fn adjoint(&self) -> RepMatrix {
        let n = self.dim();
        let mut r = Self::zeros(n, format!("({})*", self.source));
        for i in 0..n {
            for j in 0..n {
                r.entries[i][j] = self.entries[j][i].conj();
            }
        }
        r
    }

    /// Entrywise complex conjugate: the matrix of the dual representation.
    pub fn conj(&self) -> RepMatrix {
        let mut r = self.clone();
        r.entries.iter_mut().flatten().for_each(|x| *x = x.conj());
        r
    }

    pub fn max_diff(&self, o: &RepMatrix) -> f64 {
        self.entries.iter().flatten().zip(o.entries.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, o: &RepMatrix, tol: f64) -> bool {
        self.max_diff(o) < tol
    }

    /// Equality up to the sign ambiguity of the metaplectic cover.
    pub fn approx_eq_up_to_sign(&self, o: &RepMatrix, tol: f64) -> bool {
        self.approx_eq(o, tol) || self.approx_eq(&o.scale(Complex64::new(-1.0, 0.0)), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint()).approx_eq(&RepMatrix::identity(self.dim()), tol)
    }
}

fn sqrt_i_pow(k: i64) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0 * k as f64)
}

fn sig_diff(g: &DiscriminantGroup) -> i64 {
    g.lattice.sig_minus as i64 - g.lattice.sig_plus as i64
}

/// `ρ(T)`, `ρ(S)` and `ρ(Z)` on the group ring.
pub fn rho_generators(g: &DiscriminantGroup) -> (RepMatrix, RepMatrix, RepMatrix) {
    let n = g.order;
    let mut t = RepMatrix::zeros(n, "T");
    let mut s = RepMatrix::zeros(n, "S");
    let mut z = RepMatrix::zeros(n, "Z");
    let pre = sqrt_i_pow(sig_diff(g)) / (n as f64).sqrt();
    let zc = sqrt_i_pow(2 * sig_diff(g));
    for c in 0..n {
        t.entries[c][c] = e_rat(&g.q_value(c));
        for b in 0..n {
            s.entries[b][c] = pre * e_rat(&-g.pairing(c, b));
        }
        z.entries[g.neg(c)][c] = zc;
    }
    (t, s, z)
}

/// `ρ(M)` for `M = [[a, b], [c, d]] ∈ SL₂(Z)` by Shintani's formula, on the
/// standard branch of `√(cτ+d)`; `branch = false` selects the other lift.
pub fn rho_matrix(g: &DiscriminantGroup, m: [[i64; 2]; 2], branch: bool) -> RepMatrix {
    let [[a, b], [c, d]] = m;
    assert_eq!(a * d - b * c, 1, "matrix is not in SL2(Z)");
    let n = g.order;
    let e = g.lattice.e;
    let mut r = RepMatrix::zeros(n, format!("[[{a},{b}],[{c},{d}]]"));
    let diff = sig_diff(g);
    if c == 0 {
        let phase = sqrt_i_pow(diff * (1 - d.signum()));
        for gamma in 0..n {
            let beta = g.scalar(a, gamma);
            r.entries[beta][gamma] = phase * e_rat(&(int(a * b) * g.q_value(beta)));
        }
    } else {
        let cc = c.unsigned_abs() as i64;
        let pre = sqrt_i_pow(diff * c.signum()) / ((cc as f64).powf(e as f64 / 2.0) * (n as f64).sqrt());
        let vs: Vec<Vec<i64>> = lattice_points_mod(e, cc);
        // With D the group exponent, x = Dv + Dβ and y = Dγ the phase is
        // (a·xᵀSx − 2yᵀSx + d·yᵀSy) / (2cD²).
        let gram = &g.lattice.gram;
        let form = |x: &[i128], y: &[i128]| -> i128 {
            (0..e).map(|i| (0..e).map(|j| x[i] * gram[i][j] as i128 * y[j]).sum::<i128>()).sum()
        };
        let (dexp, _) = g.integral(0);
        let dexp = dexp as i128;
        let modulus = (cc as i128) * dexp * dexp * 2;
        let sc = c.signum() as i128;
        for beta in 0..n {
            let bi: Vec<i128> = g.integral(beta).1.iter().map(|&x| x as i128).collect();
            let xs: Vec<Vec<i128>> =
                vs.iter().map(|v| v.iter().zip(&bi).map(|(&vi, &b)| dexp * vi as i128 + b).collect()).collect();
            let qx: Vec<i128> = xs.iter().map(|x| form(x, x)).collect();
            for gamma in 0..n {
                let gi: Vec<i128> = g.integral(gamma).1.iter().map(|&x| x as i128).collect();
                let qg = form(&gi, &gi);
                let mut s = Complex64::zero();
                for (x, q) in xs.iter().zip(&qx) {
                    let num = sc * ((a as i128) * q - 2 * form(&gi, x) + (d as i128) * qg);
                    let f = num.rem_euclid(modulus) as f64 / modulus as f64;
                    s += Complex64::from_polar(1.0, 2.0 * PI * f);
                }
                r.entries[beta][gamma] = pre * s;
            }
        }
    }
    if !branch && diff.rem_euclid(2) == 1 {
        r = r.scale(Complex64::new(-1.0, 0.0));
    }
    r
}

fn lattice_points_mod(e: usize, c: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..e {
        out = out.into_iter().flat_map(|v| (0..c).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// `σ_β(λ,μ,t)`: `𝔢_γ ↦ e(μ⟨β,γ⟩ + (t − λμ)q(β)) 𝔢_{γ−λβ}`.
pub fn sigma_action(g: &DiscriminantGroup, beta: usize, (l, mu, t): (i64, i64, i64)) -> RepMatrix {
    let n = g.order;
    let mut r = RepMatrix::zeros(n, format!("σ({l},{mu},{t})"));
    let qb = g.q_value(beta);
    let shift = g.scalar(-l, beta);
    for gamma in 0..n {
        let arg = int(mu) * g.pairing(beta, gamma) + int(t - l * mu) * &qb;
        r.entries[g.add(gamma, shift)][gamma] = e_rat(&arg);
    }
    r
}

/// The right action of `SL₂(Z)` on the Heisenberg group.
pub fn heisenberg_act((l, mu, t): (i64, i64, i64), m: [[i64; 2]; 2]) -> (i64, i64, i64) {
    let [[a, b], [c, d]] = m;
    (a * l + c * mu, b * l + d * mu, t)
}

/// The averaging operator attached to `β`, normalised by `1/d_β`:
/// `(A F)(n, δ) = (1/d_β) Σ_{λ mod d_β²} [⟨β,δ+λβ⟩ − λq(β) ∈ Z] f(n, δ+λβ)`.
///
/// Output coefficients whose inputs are not all present are omitted.
pub fn average(beta: usize, f: &FourierExpansion) -> FourierExpansion {
    let g = &f.group;
    let d = g.denominator(beta) as i64;
    let qb = g.q_exact(beta);
    let mut targets: BTreeMap<(usize, Rational), ()> = BTreeMap::new();
    for (gamma, n) in f.coeffs.keys() {
        for l in 0..d * d {
            let delta = g.add(*gamma, g.scalar(-l, beta));
            targets.insert((delta, n.clone()), ());
        }
    }
    let mut out = FourierExpansion::new(g.clone(), f.weight.clone(), f.prec.clone());
    out.symmetric = f.symmetric;
    'outer: for (delta, n) in targets.into_keys() {
        let mut sum = Rational::zero();
        for l in 0..d * d {
            let src = g.add(delta, g.scalar(l, beta));
            let cond = g.pairing(beta, src) - int(l) * &qb;
            if !is_integer(&cond) {
                continue;
            }
            match f.get(src, &n) {
                Some(c) => sum += c,
                None => continue 'outer,
            }
        }
        out.insert(delta, n, sum / int(d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lattice::Lattice;

    fn group(g: Vec<Vec<i64>>) -> DiscriminantGroup {
        DiscriminantGroup::new(&Lattice::new(g).unwrap()).unwrap()
    }

    #[test]
    fn t_phase_rank_one() {
        let g = group(vec![vec![-2]]);
        let (t, s, z) = rho_generators(&g);
        let h = g.index_of(&[rat(1, 2)]).unwrap();
        assert!((t.entries[h][h] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(s.is_unitary(1e-10));
        assert!(s.mul(&s).approx_eq(&z, 1e-10));
    }

    #[test]
    fn shintani_matches_generators() {
        for gram in [vec![vec![-2]], vec![vec![-4, -2], vec![-2, -4]], vec![vec![2, 1], vec![1, -4]]] {
            let g = group(gram);
            let (t, s, _) = rho_generators(&g);
            assert!(rho_matrix(&g, [[1, 1], [0, 1]], true).approx_eq(&t, 1e-12));
            assert!(rho_matrix(&g, [[0, -1], [1, 0]], true).approx_eq(&s, 1e-12));
        }
    }
}
