//! Split inner-product spaces `h = ph + p̄h` and even lattices for the
//! indefinite pairing `(a|b) = (pa,pb) - (p̄a,p̄b)`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dot, IntMatrix, Matrix};
use crate::scalar::{rat, Quadratic, Rational, Real, RealScalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("pairing of generators {i} and {j} is not an integer ({value})")]
    NonIntegralPairing { i: usize, j: usize, value: String },
    #[error("generator {i} has odd norm {norm}")]
    OddNorm { i: usize, norm: i128 },
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("{count} generators exceed the space dimension {dim}")]
    TooManyGenerators { count: usize, dim: usize },
    #[error("generator {i} has the wrong number of coordinates")]
    DimensionMismatch { i: usize },
    #[error("the split space must have positive dimension")]
    EmptySpace,
    #[error("indefinite Gram matrix is degenerate")]
    DegenerateForm,
    #[error("R^2 is not rational in this backend")]
    NotRational,
    #[error("p and q must be positive and coprime")]
    InvalidRatio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpace {
    pub d_plus: usize,
    pub d_minus: usize,
}

impl SplitSpace {
    pub fn new(d_plus: usize, d_minus: usize) -> Self {
        SplitSpace { d_plus, d_minus }
    }

    pub fn dim(&self) -> usize {
        self.d_plus + self.d_minus
    }
}

/// A vector of `h` given by its chiral and antichiral components.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitVector<F> {
    pub plus: Vec<F>,
    pub minus: Vec<F>,
}

impl<F: Scalar> SplitVector<F> {
    pub fn new(plus: Vec<F>, minus: Vec<F>) -> Self {
        SplitVector { plus, minus }
    }

    pub fn zero(space: SplitSpace) -> Self {
        SplitVector { plus: vec![F::zero(); space.d_plus], minus: vec![F::zero(); space.d_minus] }
    }

    pub fn flat(&self) -> Vec<F> {
        self.plus.iter().chain(&self.minus).cloned().collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        SplitVector {
            plus: self.plus.iter().zip(&o.plus).map(|(a, b)| a.clone() + b.clone()).collect(),
            minus: self.minus.iter().zip(&o.minus).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        SplitVector {
            plus: self.plus.iter().map(|a| a.clone() * c.clone()).collect(),
            minus: self.minus.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    /// `(pa,pb) - (p̄a,p̄b)`.
    pub fn indef(&self, o: &Self) -> F {
        dot(&self.plus, &o.plus) - dot(&self.minus, &o.minus)
    }

    /// The positive-definite ambient product `(a,b)_h`.
    pub fn euclid(&self, o: &Self) -> F {
        dot(&self.plus, &o.plus) + dot(&self.minus, &o.minus)
    }
}

/// Coordinates of a lattice point in the generator basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Charge(pub Vec<i64>);

impl Charge {
    pub fn zero(rank: usize) -> Self {
        Charge(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Charge(c)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Charge) -> Charge {
        Charge(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Charge) -> Charge {
        Charge(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Charge {
        Charge(self.0.iter().map(|a| -a).collect())
    }

    pub fn l1(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    pub fn linf(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::report::format_coords(&self.0))
    }
}

impl From<Vec<i64>> for Charge {
    fn from(v: Vec<i64>) -> Self {
        Charge(v)
    }
}

/// A validated even lattice.
#[derive(Clone, Debug)]
pub struct Lattice<F> {
    pub space: SplitSpace,
    pub generators: Vec<SplitVector<F>>,
    pub gram_plus: Matrix<F>,
    pub gram_minus: Matrix<F>,
    pub gram_indef: IntMatrix,
}

fn grams<F: RealScalar>(gens: &[SplitVector<F>]) -> (Matrix<F>, Matrix<F>) {
    let n = gens.len();
    let mut gp = Matrix::zeros(n, n);
    let mut gm = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gp[(i, j)] = dot(&gens[i].plus, &gens[j].plus);
            gm[(i, j)] = dot(&gens[i].minus, &gens[j].minus);
        }
    }
    (gp, gm)
}

/// Validates generators and returns the lattice with its Gram data.
pub fn build_lattice<F: RealScalar>(
    space: SplitSpace,
    generators: Vec<SplitVector<F>>,
) -> Result<Lattice<F>, LatticeError> {
    if space.dim() == 0 {
        return Err(LatticeError::EmptySpace);
    }
    if generators.len() > space.dim() {
        return Err(LatticeError::TooManyGenerators { count: generators.len(), dim: space.dim() });
    }
    for (i, g) in generators.iter().enumerate() {
        if g.plus.len() != space.d_plus || g.minus.len() != space.d_minus {
            return Err(LatticeError::DimensionMismatch { i });
        }
    }
    let n = generators.len();
    let (gp, gm) = grams(&generators);
    let mut gi = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = gp[(i, j)].clone() - gm[(i, j)].clone();
            gi[i][j] = v.to_integer().ok_or_else(|| LatticeError::NonIntegralPairing {
                i,
                j,
                value: v.to_string(),
            })?;
        }
    }
    for (i, row) in gi.iter().enumerate() {
        if row[i].is_odd() {
            return Err(LatticeError::OddNorm { i, norm: row[i] });
        }
    }
    let mut sum = gp.clone();
    for i in 0..n {
        for j in 0..n {
            sum[(i, j)] = gp[(i, j)].clone() + gm[(i, j)].clone();
        }
    }
    if !sum.leading_minors().iter().all(RealScalar::is_positive) {
        return Err(LatticeError::DependentGenerators);
    }
    Ok(Lattice { space, generators, gram_plus: gp, gram_minus: gm, gram_indef: gi })
}

impl<F: RealScalar> Lattice<F> {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `a^T gramIndef b`.
    pub fn indef_pairing(&self, a: &Charge, b: &Charge) -> i64 {
        indef_pairing_int(&self.gram_indef, a, b)
    }

    /// `(pa, pb)`.
    pub fn chiral_pairing(&self, a: &Charge, b: &Charge) -> F {
        bilinear(&self.gram_plus, a, b)
    }

    /// `(p̄a, p̄b)`.
    pub fn antichiral_pairing(&self, a: &Charge, b: &Charge) -> F {
        bilinear(&self.gram_minus, a, b)
    }

    /// `((pλ,pλ), (p̄λ,p̄λ))`.
    pub fn chiral_norms(&self, l: &Charge) -> (F, F) {
        (self.chiral_pairing(l, l), self.antichiral_pairing(l, l))
    }

    /// `(λ|λ)/2`.
    pub fn spin(&self, l: &Charge) -> i64 {
        let n = self.indef_pairing(l, l);
        debug_assert!(n % 2 == 0);
        n / 2
    }

    /// The ambient vector `Σ λ_i g_i`.
    pub fn ambient(&self, l: &Charge) -> SplitVector<F> {
        let mut v = SplitVector::zero(self.space);
        for (c, g) in l.0.iter().zip(&self.generators) {
            if *c != 0 {
                v = v.add(&g.scale(&F::from_int(*c)));
            }
        }
        v
    }

    pub fn chiral_part(&self, l: &Charge) -> Vec<F> {
        self.ambient(l).plus
    }

    pub fn antichiral_part(&self, l: &Charge) -> Vec<F> {
        self.ambient(l).minus
    }

    pub fn discriminant_data(&self) -> Result<Discriminant, LatticeError> {
        discriminant_data(&self.gram_indef)
    }

    pub fn is_maximal_even(&self) -> Result<Maximality, LatticeError> {
        is_maximal_even(&self.gram_indef)
    }

    pub fn enumerate_box(&self, radius: i64) -> Vec<Charge> {
        enumerate_box(self.rank(), radius)
    }
}

pub fn indef_pairing_int(g: &IntMatrix, a: &Charge, b: &Charge) -> i64 {
    let mut s: i128 = 0;
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.0.iter().enumerate() {
            s += ai as i128 * g[i][j] * bj as i128;
        }
    }
    s as i64
}

fn bilinear<F: Scalar>(g: &Matrix<F>, a: &Charge, b: &Charge) -> F {
    let mut s = F::zero();
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.0.iter().enumerate() {
            if bj != 0 {
                s = s + F::from_int(ai * bj) * g[(i, j)].clone();
            }
        }
    }
    s
}

/// All charges with `|coord| <= radius`, ordered by L1 norm and then
/// coordinates descending.
pub fn enumerate_box(rank: usize, radius: i64) -> Vec<Charge> {
    let mut out: Vec<Charge> = Vec::new();
    let mut cur = vec![-radius; rank];
    if rank == 0 {
        return vec![Charge(vec![])];
    }
    loop {
        out.push(Charge(cur.clone()));
        let mut i = 0;
        loop {
            if i == rank {
                out.sort_by(|a, b| a.l1().cmp(&b.l1()).then_with(|| b.0.cmp(&a.0)));
                return out;
            }
            if cur[i] < radius {
                cur[i] += 1;
                break;
            }
            cur[i] = -radius;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Discriminant group and maximality

#[derive(Clone, Debug, PartialEq)]
pub struct Discriminant {
    pub invariant_factors: Vec<i128>,
    /// One dual-coset representative per element of `Q*/Q`, in coordinates.
    pub representatives: Vec<Vec<Rational>>,
    /// `(x|x)` reduced into `[0, 2)`.
    pub norms: Vec<Rational>,
}

fn reduce_mod2(q: Rational) -> Rational {
    let two = rat(2, 1);
    let k = (q / two).floor();
    q - k * two
}

pub fn discriminant_data(g: &IntMatrix) -> Result<Discriminant, LatticeError> {
    let n = g.len();
    if n == 0 {
        return Ok(Discriminant {
            invariant_factors: vec![],
            representatives: vec![vec![]],
            norms: vec![rat(0, 1)],
        });
    }
    let s = linalg::smith_normal_form(g);
    let diag = s.diagonal();
    if diag.iter().any(|&d| d == 0) {
        return Err(LatticeError::DegenerateForm);
    }
    let mut reps = Vec::new();
    let mut norms = Vec::new();
    let mut c = vec![0i128; n];
    loop {
        // x = V * (c_i / d_i)
        let y: Vec<Rational> = (0..n).map(|i| Rational::new(c[i], diag[i])).collect();
        let x: Vec<Rational> = (0..n)
            .map(|i| (0..n).fold(rat(0, 1), |acc, k| acc + Rational::from_integer(s.v[i][k]) * y[k]))
            .collect();
        let mut norm = rat(0, 1);
        for i in 0..n {
            for j in 0..n {
                norm += x[i] * Rational::from_integer(g[i][j]) * x[j];
            }
        }
        reps.push(x);
        norms.push(reduce_mod2(norm));
        let mut i = 0;
        loop {
            if i == n {
                return Ok(Discriminant { invariant_factors: diag, representatives: reps, norms });
            }
            c[i] += 1;
            if c[i] < diag[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Maximality {
    pub maximal: bool,
    pub witness: Option<Vec<Rational>>,
    pub witness_norm: Option<Rational>,
}

/// Even-maximal iff no nonzero discriminant coset has even norm.
pub fn is_maximal_even(g: &IntMatrix) -> Result<Maximality, LatticeError> {
    let d = discriminant_data(g)?;
    for (x, nrm) in d.representatives.iter().zip(&d.norms) {
        let nonzero = x.iter().any(|v| !v.is_integer());
        if nonzero && *nrm == rat(0, 1) {
            let mut full = rat(0, 1);
            for i in 0..x.len() {
                for j in 0..x.len() {
                    full += x[i] * Rational::from_integer(g[i][j]) * x[j];
                }
            }
            return Ok(Maximality { maximal: false, witness: Some(x.clone()), witness_norm: Some(full) });
        }
    }
    Ok(Maximality { maximal: true, witness: None, witness_norm: None })
}

// ---------------------------------------------------------------------------
// The compactified-boson family: v1 = (R/√2, R/√2), v2 = (R⁻¹/√2, −R⁻¹/√2)

/// Exact generators for rational `R^2`.
pub fn compactified_boson_generators(r_squared: Rational) -> Vec<SplitVector<Quadratic>> {
    assert!(r_squared > rat(0, 1), "R^2 must be positive");
    let a = Quadratic::sqrt_of(r_squared / rat(2, 1), rat(1, 1));
    let b = Quadratic::sqrt_of(rat(1, 1) / (r_squared * rat(2, 1)), rat(1, 1));
    vec![
        SplitVector::new(vec![a.clone()], vec![a]),
        SplitVector::new(vec![b.clone()], vec![-b]),
    ]
}

/// Floating-point generators for arbitrary `R^2 > 0`.
pub fn compactified_boson_generators_f64(r_squared: f64, tol: f64) -> Vec<SplitVector<Real>> {
    let a = Real::with_tolerance((r_squared / 2.0).sqrt(), tol);
    let b = Real::with_tolerance((1.0 / (2.0 * r_squared)).sqrt(), tol);
    vec![
        SplitVector::new(vec![a], vec![a]),
        SplitVector::new(vec![b], vec![-b]),
    ]
}

pub fn compactified_boson(r_squared: Rational) -> Lattice<Quadratic> {
    build_lattice(SplitSpace::new(1, 1), compactified_boson_generators(r_squared))
        .expect("compactified boson lattice is even")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SublatticeCertificate {
    /// Coordinates `(q, p)` in the `(v1, v2)` basis.
    pub coords: Charge,
    pub chiral_value: Quadratic,
    pub antichiral_value: Quadratic,
    /// Coordinates recovered by an exact solve against the generators.
    pub solved: Vec<Quadratic>,
    pub verified: bool,
}

/// The chiral lattice point `√(2pq) ⊕ 0` for `R^2 = p/q`.
pub fn rational_sublattice_vector(p: i128, q: i128) -> Result<SublatticeCertificate, LatticeError> {
    if p <= 0 || q <= 0 || p.gcd(&q) != 1 {
        return Err(LatticeError::InvalidRatio);
    }
    let gens = compactified_boson_generators(Rational::new(p, q));
    let chiral = Quadratic::sqrt_of(Rational::from_integer(2 * p * q), rat(1, 1));
    let zero = <Quadratic as Scalar>::zero();
    // columns are the generators' ambient coordinates
    let m = Matrix::from_rows(vec![
        vec![gens[0].plus[0].clone(), gens[1].plus[0].clone()],
        vec![gens[0].minus[0].clone(), gens[1].minus[0].clone()],
    ]);
    let solved = m.solve(&[chiral.clone(), zero.clone()]).ok_or(LatticeError::DependentGenerators)?;
    let coords = Charge(vec![q as i64, p as i64]);
    let verified = solved[0] == Quadratic::rational(Rational::from_integer(q))
        && solved[1] == Quadratic::rational(Rational::from_integer(p));
    Ok(SublatticeCertificate { coords, chiral_value: chiral, antichiral_value: zero, solved, verified })
}

/// Same as [`rational_sublattice_vector`] for an `R^2` held in any real backend.
pub fn rational_sublattice_vector_for<F: RealScalar>(
    r_squared: &F,
) -> Result<SublatticeCertificate, LatticeError> {
    let r = r_squared.to_rational().ok_or(LatticeError::NotRational)?;
    rational_sublattice_vector(*r.numer(), *r.denom())
}

// ---------------------------------------------------------------------------
// Lattice recognition

/// A basis reconstructed from a finite charge sample, prior to evenness validation.
#[derive(Clone, Debug)]
pub struct Recognized<F> {
    pub space: SplitSpace,
    pub generators: Vec<SplitVector<F>>,
    /// Integer coordinates of every sample point in the recovered basis.
    pub coordinates: Vec<Charge>,
}

impl<F: RealScalar> Recognized<F> {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn into_lattice(self) -> Result<Lattice<F>, LatticeError> {
        build_lattice(self.space, self.generators)
    }
}

/// Continued-fraction approximation with denominator at most `10^6`.
pub fn rationalize(x: f64, tol: f64) -> Option<Rational> {
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..40 {
        let a = y.floor();
        if a > 1e12 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > 1_000_000 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if ((p1 as f64 / q1 as f64) - x.abs()).abs() <= tol * x.abs().max(1.0) {
            return Some(Rational::new(sign * p1, q1));
        }
        let frac = y - a;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

fn to_rational_coord<F: RealScalar>(x: &F) -> Option<Rational> {
    if x.is_exact() {
        x.to_rational()
    } else {
        rationalize(x.to_f64(), x.tolerance().max(1e-12))
    }
}

/// Reconstructs a lattice basis whose integer span is the sample, or `None`
/// when the sample looks non-discrete at its own scale.
pub fn recognize_lattice<F: RealScalar>(
    space: SplitSpace,
    sample: &[SplitVector<F>],
) -> Option<Recognized<F>> {
    let nonzero: Vec<&SplitVector<F>> =
        sample.iter().filter(|v| !v.flat().iter().all(Scalar::is_negligible)).collect();
    if nonzero.is_empty() {
        return Some(Recognized { space, generators: vec![], coordinates: vec![Charge(vec![]); sample.len()] });
    }

    // discreteness heuristic: minimal pairwise gap against the sample diameter
    let pts: Vec<Vec<f64>> = sample.iter().map(|v| v.flat().iter().map(RealScalar::to_f64).collect()).collect();
    let mut gap2 = f64::INFINITY;
    let mut diam2: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 > 1e-18 {
                gap2 = gap2.min(d2);
            }
            diam2 = diam2.max(d2);
        }
    }
    if gap2 * 64.0 * 64.0 < diam2 {
        return None;
    }

    let mut order: Vec<&SplitVector<F>> = nonzero.clone();
    order.sort_by(|a, b| {
        a.euclid(a).to_f64().partial_cmp(&b.euclid(b).to_f64()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let flats: Vec<Vec<F>> = order.iter().map(|v| v.flat()).collect();
    let basis_idx = linalg::independent_subset(&flats);
    let basis: Vec<SplitVector<F>> = basis_idx.iter().map(|&i| order[i].clone()).collect();
    let r = basis.len();

    // columns of the solve matrix are the basis vectors
    let dim = space.dim();
    let mut m = Matrix::zeros(dim, r);
    for (j, b) in basis.iter().enumerate() {
        for (i, x) in b.flat().into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    let mut coords: Vec<Vec<Rational>> = Vec::with_capacity(sample.len());
    for v in sample {
        let x = m.solve(&v.flat())?;
        // the solve ignores inconsistent rows within tolerance only; re-check
        let back = m.mul_vec(&x);
        if !back.iter().zip(v.flat()).all(|(a, b)| a.approx_eq(&b)) {
            return None;
        }
        coords.push(x.iter().map(to_rational_coord).collect::<Option<Vec<_>>>()?);
    }
    let den = coords
        .iter()
        .flatten()
        .fold(1i128, |acc, q| acc.lcm(q.denom()));
    let int_rows: IntMatrix = coords
        .iter()
        .map(|row| row.iter().map(|q| (q * Rational::from_integer(den)).to_integer()).collect())
        .collect();
    let hnf = linalg::hermite_normal_form(&int_rows);
    if hnf.len() != r {
        return None;
    }
    let inv_den = F::from_rational(&Rational::new(1, den));
    let generators: Vec<SplitVector<F>> = hnf
        .iter()
        .map(|row| {
            let mut v = SplitVector::zero(space);
            for (c, b) in row.iter().zip(&basis) {
                if *c != 0 {
                    v = v.add(&b.scale(&F::from_int(*c as i64)));
                }
            }
            v.scale(&inv_den)
        })
        .collect();

    // coordinates of the sample in the recovered basis: solve hnf^T y = den * x
    let h = Matrix::from_rows(
        hnf.iter()
            .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect(),
    )
    .transpose();
    let mut out_coords = Vec::with_capacity(sample.len());
    for row in &int_rows {
        let rhs: Vec<Rational> = row.iter().map(|&x| Rational::from_integer(x)).collect();
        let y = h.solve(&rhs)?;
        if !y.iter().all(Rational::is_integer) {
            return None;
        }
        out_coords.push(Charge(y.iter().map(|q| q.to_integer() as i64).collect()));
    }
    Some(Recognized { space, generators, coordinates: out_coords })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn compactified_boson_gram() {
        for r2 in [rat(1, 1), rat(2, 1), rat(2, 3), rat(5, 7)] {
            let l = compactified_boson(r2);
            assert_eq!(l.gram_indef, vec![vec![0, 1], vec![1, 0]]);
            let gp = &l.gram_plus;
            assert_eq!(gp[(0, 0)], Quadratic::rational(r2 / rat(2, 1)));
            assert_eq!(gp[(0, 1)], Quadratic::rational(rat(1, 2)));
            assert_eq!(gp[(1, 1)], Quadratic::rational(rat(1, 2) / r2));
        }
    }

    #[test]
    fn odd_and_isotropic_single_generators() {
        let s = SplitSpace::new(1, 1);
        let iso = build_lattice(s, vec![SplitVector::new(vec![q(1)], vec![q(1)])]).unwrap();
        assert_eq!(iso.gram_indef, vec![vec![0]]);
        let odd = build_lattice(s, vec![SplitVector::new(vec![q(1)], vec![q(0)])]);
        assert_eq!(odd.unwrap_err(), LatticeError::OddNorm { i: 0, norm: 1 });
    }

    #[test]
    fn dependent_generators_rejected() {
        let s = SplitSpace::new(2, 0);
        let g = vec![
            SplitVector::new(vec![q(1), q(1)], vec![]),
            SplitVector::new(vec![q(2), q(2)], vec![]),
        ];
        assert_eq!(build_lattice(s, g).unwrap_err(), LatticeError::DependentGenerators);
    }

    #[test]
    fn norms_spin_and_pairing() {
        let l = compactified_boson(rat(1, 1));
        let c = |a: i64, b: i64| Charge(vec![a, b]);
        assert_eq!(l.indef_pairing(&c(2, 3), &c(2, 3)), 12);
        assert_eq!(l.indef_pairing(&c(1, 2), &c(3, 5)), 11);
        assert_eq!(l.spin(&c(2, 3)), 6);
        let h = Quadratic::rational(rat(1, 2));
        assert_eq!(l.chiral_norms(&c(1, 0)), (h.clone(), h));
        let two = Quadratic::rational(q(2));
        assert_eq!(l.chiral_norms(&c(1, 1)), (two, Quadratic::rational(q(0))));
    }

    #[test]
    fn discriminant_of_small_forms() {
        let d = discriminant_data(&vec![vec![2]]).unwrap();
        assert_eq!(d.invariant_factors, vec![2]);
        assert_eq!(d.representatives, vec![vec![q(0)], vec![rat(1, 2)]]);
        assert_eq!(d.norms, vec![q(0), rat(1, 2)]);
        let u = discriminant_data(&vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(u.invariant_factors, vec![1, 1]);
        assert_eq!(u.representatives.len(), 1);
        assert_eq!(discriminant_data(&vec![vec![0, 0], vec![0, 0]]), Err(LatticeError::DegenerateForm));
    }

    #[test]
    fn maximality() {
        assert!(is_maximal_even(&vec![vec![0, 1], vec![1, 0]]).unwrap().maximal);
        assert!(is_maximal_even(&vec![vec![2]]).unwrap().maximal);
        let m = is_maximal_even(&vec![vec![8]]).unwrap();
        assert!(!m.maximal);
        assert_eq!(m.witness, Some(vec![rat(1, 2)]));
        assert_eq!(m.witness_norm, Some(q(2)));
    }

    #[test]
    fn sublattice_certificates() {
        let c = rational_sublattice_vector(1, 1).unwrap();
        assert!(c.verified);
        assert_eq!(c.coords, Charge(vec![1, 1]));
        assert_eq!(c.chiral_value, Quadratic::sqrt_of(q(2), q(1)));
        assert_eq!(c.antichiral_value, Quadratic::rational(q(0)));
        let c = rational_sublattice_vector(2, 3).unwrap();
        assert_eq!(c.coords, Charge(vec![3, 2]));
        assert_eq!(c.chiral_value, Quadratic::sqrt_of(q(12), q(1)));
        assert!(c.verified);
        assert_eq!(rational_sublattice_vector_for(&Real::new(2.0)), Err(LatticeError::NotRational));
    }

    #[test]
    fn box_order() {
        let b = enumerate_box(2, 1);
        assert_eq!(b.len(), 9);
        assert_eq!(b[0], Charge(vec![0, 0]));
        assert_eq!(b[1], Charge(vec![1, 0]));
        assert_eq!(b[2], Charge(vec![0, 1]));
    }

    #[test]
    fn recognize_box_sample() {
        let l = compactified_boson(rat(1, 1));
        let sample: Vec<_> = l.enumerate_box(3).iter().map(|c| l.ambient(c)).collect();
        let r = recognize_lattice(l.space, &sample).unwrap();
        assert_eq!(r.rank(), 2);
        let rl = r.into_lattice().unwrap();
        assert_eq!(linalg::int_determinant(&rl.gram_indef).abs(), 1);
    }

    #[test]
    fn recognize_trivial_and_dense() {
        let s = SplitSpace::new(1, 1);
        let r = recognize_lattice::<Rational>(s, &[SplitVector::zero(s)]).unwrap();
        assert_eq!(r.rank(), 0);
        let mut dense = Vec::new();
        for den in 1..=16i128 {
            for num in -den..=den {
                let a = Rational::new(num, den);
                let v = SplitVector::new(vec![a], vec![a]);
                if !dense.contains(&v) {
                    dense.push(v);
                }
            }
        }
        assert!(recognize_lattice(s, &dense).is_none());
    }
}
