#![allow(dead_code)]

use lattice_ext::lattice::{build_lattice, Lattice, SplitSpace, SplitVector};
use lattice_ext::linalg::IntMatrix;
use lattice_ext::scalar::Rational;
use rand::Rng;

/// Coefficients of `∏_{n>=1} (1 - q^n)^{-d}` up to `q^e`, by repeated
/// multiplication with geometric series.
pub fn partition_oracle(d: usize, e: usize) -> Vec<u128> {
    let mut c = vec![0u128; e + 1];
    c[0] = 1;
    for _ in 0..d {
        for n in 1..=e {
            for k in n..=e {
                c[k] += c[k - n];
            }
        }
    }
    c
}

/// Symmetric integer matrix with even diagonal, `|entries| <= bound`, and
/// nonzero determinant.
pub fn random_even_gram<R: Rng>(rng: &mut R, rank: usize, bound: i128) -> IntMatrix {
    loop {
        let mut g = vec![vec![0i128; rank]; rank];
        for i in 0..rank {
            g[i][i] = 2 * rng.gen_range(-bound / 2..=bound / 2);
            for j in i + 1..rank {
                let v = rng.gen_range(-bound..=bound);
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        if lattice_ext::linalg::int_determinant(&g) != 0 {
            return g;
        }
    }
}

/// Even lattice spanned by random integer ambient vectors.
pub fn random_even_lattice<R: Rng>(rng: &mut R) -> Lattice<Rational> {
    loop {
        let space = SplitSpace::new(rng.gen_range(1..=2), rng.gen_range(1..=2));
        let rank = rng.gen_range(1..=space.dim().min(3));
        let gens: Vec<SplitVector<Rational>> = (0..rank)
            .map(|_| {
                let mut draw = |n: usize| (0..n).map(|_| Rational::from_integer(rng.gen_range(-2..=2))).collect::<Vec<_>>();
                let plus = draw(space.d_plus);
                let minus = draw(space.d_minus);
                SplitVector::new(plus, minus)
            })
            .collect();
        if let Ok(l) = build_lattice(space, gens) {
            return l;
        }
    }
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = std::time::Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}
