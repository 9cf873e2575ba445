//! Sector fusion, braiding phases and the braided-functor data
//! `(φ_Q, μ)` with its coherence and ν-phase checks.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{enumerate_box, Charge, Lattice};
use crate::report::{Check, Report, Witness};
use crate::scalar::{parity_sign, Phase, Rational, RealScalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorObject(pub Charge);

impl SectorObject {
    pub fn identity(rank: usize) -> Self {
        SectorObject(Charge::zero(rank))
    }

    pub fn conjugate(&self) -> Self {
        SectorObject(self.0.neg())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for SectorObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}", self.0)
    }
}

pub fn fuse(a: &SectorObject, b: &SectorObject) -> SectorObject {
    SectorObject(a.0.add(&b.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

/// `ε^±_{pα,pβ} = e^{±iπ(pα,pβ)}`; the antichiral factor uses `p̄`.
pub fn braiding_scalar<F: RealScalar>(l: &Lattice<F>, a: &Charge, b: &Charge, s: Chirality) -> Phase<F> {
    match s {
        Chirality::Plus => Phase(l.chiral_pairing(a, b)),
        Chirality::Minus => Phase(-l.chiral_pairing(a, b)),
    }
}

/// `ε⁺_{pα,pβ} · ε⁻_{p̄α,p̄β} = e^{iπ(α|β)}`.
pub fn braiding_2d<F: RealScalar>(l: &Lattice<F>, a: &Charge, b: &Charge) -> Phase<F> {
    Phase(l.chiral_pairing(a, b) - l.antichiral_pairing(a, b))
}

pub type ObjectMap = dyn Fn(&Charge) -> Charge + Send + Sync;
pub type Tensorator = dyn Fn(&Charge, &Charge) -> Phase<Rational> + Send + Sync;

#[derive(Clone)]
pub struct FunctorData {
    pub object_map: Arc<ObjectMap>,
    pub tensorator: Arc<Tensorator>,
}

impl fmt::Debug for FunctorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FunctorData")
    }
}

impl FunctorData {
    /// `φ(n,m) = (-n,m)`, `μ_{(n,m),(n',m')} = (-1)^{nm'}`.
    pub fn canonical() -> Self {
        FunctorData {
            object_map: Arc::new(|c: &Charge| Charge(vec![-c.0[0], c.0[1]])),
            tensorator: Arc::new(|a: &Charge, b: &Charge| Phase::sign(parity_sign((a.0[0] * b.0[1]) as i128) < 0)),
        }
    }

    /// Canonical object map with `μ ≡ 1`.
    pub fn trivial_tensorator() -> Self {
        FunctorData { tensorator: Arc::new(|_: &Charge, _: &Charge| Phase::one()), ..Self::canonical() }
    }

    pub fn map(&self, c: &Charge) -> Charge {
        (self.object_map)(c)
    }

    pub fn mu<F: RealScalar>(&self, a: &Charge, b: &Charge) -> Phase<F> {
        Phase(F::from_rational(&(self.tensorator)(a, b).reduced()))
    }
}

fn tuple_witness(a: &Charge, b: &Charge) -> Witness {
    let mut v = a.0.clone();
    v.extend(&b.0);
    Witness::new().coords("tuple", &v)
}

/// Tensorator cocycle, units, braided condition and involutivity over the
/// rank-2 coordinate box of `l`.
pub fn verify_functor_coherence<F: RealScalar>(f: &FunctorData, l: &Lattice<F>, radius: i64) -> Report {
    let mut rep = Report::new("braidcat");
    let charges = enumerate_box(l.rank(), radius);
    let zero = Charge::zero(l.rank());
    let pairs: Vec<(&Charge, &Charge)> = charges.iter().flat_map(|a| charges.iter().map(move |b| (a, b))).collect();

    // μ(x,y) μ(x+y,z) = μ(y,z) μ(x,y+z)
    let cyc = pairs.par_iter().find_map_first(|(x, y)| {
        charges.iter().find_map(|z| {
            let lhs = f.mu::<F>(x, y).mul(&f.mu(&x.add(y), z));
            let rhs = f.mu::<F>(y, z).mul(&f.mu(x, &y.add(z)));
            (lhs != rhs).then(|| tuple_witness(x, y).coords("z", &z.0))
        })
    });
    rep.push(Check::from_witness("tensorator-cocycle", "tensorator", cyc));

    let unit = if f.map(&zero) != zero {
        Some(Witness::new().coords("image-of-identity", &f.map(&zero).0))
    } else {
        charges
            .iter()
            .find(|x| !f.mu::<F>(&zero, x).is_one() || !f.mu::<F>(x, &zero).is_one())
            .map(|x| Witness::new().coords("x", &x.0))
    };
    rep.push(Check::from_witness("unit-constraints", "tensorator", unit));

    let additive = pairs
        .iter()
        .find(|(x, y)| f.map(&x.add(y)) != f.map(x).add(&f.map(y)))
        .map(|(x, y)| tuple_witness(x, y));
    rep.push(Check::from_witness("object-map-additive", "braided-functor", additive));

    // μ_{x,y} ε⁺_{x,y} = ε⁺_{φx,φy} μ_{y,x}
    let braided = pairs.iter().find_map(|(x, y)| {
        let lhs = f.mu::<F>(x, y).mul(&braiding_scalar(l, x, y, Chirality::Plus));
        let rhs = braiding_scalar(l, &f.map(x), &f.map(y), Chirality::Plus).mul(&f.mu(y, x));
        (lhs != rhs).then(|| tuple_witness(x, y).with("left", &lhs).with("right", &rhs))
    });
    let mut c = Check::from_witness("braided-condition", "braided-functor", braided);
    let r2 = l.chiral_pairing(&Charge::unit(l.rank(), 0), &Charge::unit(l.rank(), 0));
    if r2.to_rational().is_some() {
        c = c.with_note("rational R²: coincident charges give extra arrows, outside the irrational hypothesis");
    }
    rep.push(c);

    let inv = charges.iter().find(|x| f.map(&f.map(x)) != **x).map(|x| Witness::new().coords("x", &x.0));
    rep.push(Check::from_witness("involutive", "braided-functor", inv));
    rep
}

// ---------------------------------------------------------------------------
// ν-phase quadrature

/// `a₀ + Σ_k a_k cos(kt) + b_k sin(kt)`, with `cos[k-1] = a_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigPoly { constant, cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * t).cos()).sum();
        let s: f64 = self.sin.iter().enumerate().map(|(k, b)| b * ((k + 1) as f64 * t).sin()).sum();
        self.constant + c + s
    }

    pub fn mean(&self) -> f64 {
        self.constant
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.degree().max(o.degree());
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        TrigPoly {
            constant: self.constant - o.constant,
            cos: (0..n).map(|k| at(&self.cos, k) - at(&o.cos, k)).collect(),
            sin: (0..n).map(|k| at(&self.sin, k) - at(&o.sin, k)).collect(),
        }
    }

    /// `(1/2π) ∫_{-π}^t self` for a mean-zero polynomial.
    fn primitive(&self) -> TrigPoly {
        let n = self.degree();
        let mut constant = 0.0;
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 0..n {
            let kf = (k + 1) as f64;
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            sin[k] = a / kf / (2.0 * PI);
            cos[k] = -b / kf / (2.0 * PI);
            let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
            constant += b / kf * sign / (2.0 * PI);
        }
        TrigPoly { constant, cos, sin }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BraidError {
    #[error("h and g must have mean 1, got {h} and {g}")]
    BadMean { h: f64, g: f64 },
    #[error("quadrature did not converge after {levels} doublings (last change {delta:e})")]
    QuadratureUnstable { levels: u32, delta: f64 },
}

const MAX_DOUBLINGS: u32 = 8;

/// Periodic trapezoid rule on `[-π, π)` with doubling until successive
/// values agree within `tol`.
fn trapezoid(f: &(dyn Fn(f64) -> f64 + Sync), points: usize, tol: f64) -> Result<f64, BraidError> {
    let rule = |n: usize| -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n).map(|i| f(-PI + i as f64 * h)).sum::<f64>() * h
    };
    let mut n = points.max(4);
    let mut prev = rule(n);
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        n *= 2;
        let next = rule(n);
        delta = (next - prev).abs();
        if delta <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(BraidError::QuadratureUnstable { levels: MAX_DOUBLINGS, delta })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuPhase {
    pub m_dm: f64,
    pub phase_uv: f64,
    pub phase_vu: f64,
}

/// Quadrature values of `∫ M M'` and of the two tensoriality phases.
pub fn nu_phase_values(h: &TrigPoly, g: &TrigPoly, r: f64, points: usize, tol: f64) -> Result<NuPhase, BraidError> {
    if (h.mean() - 1.0).abs() > tol || (g.mean() - 1.0).abs() > tol {
        return Err(BraidError::BadMean { h: h.mean(), g: g.mean() });
    }
    let diff = g.sub(h);
    let mut zero_mean = diff.clone();
    zero_mean.constant = 0.0;
    let m = zero_mean.primitive();
    let dm = |t: f64| zero_mean.eval(t) / (2.0 * PI);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m_dm = trapezoid(&|t| m.eval(t) * dm(t), points, tol)?;
    let phase_uv = trapezoid(&|t| (s / r) * h.eval(t) * (-r * s) * m.eval(t), points, tol)? / (2.0 * PI);
    let phase_vu = trapezoid(&|t| (-r * s) * h.eval(t) * (s / r) * m.eval(t), points, tol)? / (2.0 * PI);
    Ok(NuPhase { m_dm, phase_uv, phase_vu })
}

pub fn nu_phase_check(h: &TrigPoly, g: &TrigPoly, r: f64, points: usize, tol: f64) -> Result<Report, BraidError> {
    let v = nu_phase_values(h, g, r, points, tol)?;
    let mut rep = Report::new("braidcat");
    let w = (v.m_dm.abs() >= tol).then(|| Witness::new().with("integral", format!("{:e}", v.m_dm)));
    rep.push(Check::from_witness("nu-boundary-term", "nu-phase", w));
    let (ca, cb) = (v.phase_uv.sin_cos(), v.phase_vu.sin_cos());
    let gap = ((ca.0 - cb.0).powi(2) + (ca.1 - cb.1).powi(2)).sqrt();
    let w = (gap >= tol).then(|| {
        Witness::new().with("uv", v.phase_uv).with("vu", v.phase_vu).with("gap", format!("{gap:e}"))
    });
    rep.push(Check::from_witness("nu-tensoriality", "nu-phase", w));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::compactified_boson;
    use crate::scalar::{rat, Quadratic};

    fn c(n: i64, m: i64) -> Charge {
        Charge(vec![n, m])
    }

    #[test]
    fn fusion() {
        let a = SectorObject(c(1, 0));
        let b = SectorObject(c(0, 1));
        assert_eq!(fuse(&a, &b), SectorObject(c(1, 1)));
        assert_eq!(fuse(&a, &SectorObject::identity(2)), a);
        assert!(fuse(&a, &a.conjugate()).is_identity());
    }

    #[test]
    fn braiding_values() {
        let l = compactified_boson(rat(1, 1));
        let z = braiding_2d(&l, &c(1, 0), &c(0, 1));
        assert_eq!(z.as_sign(), Some(-1));
        assert!(braiding_scalar(&l, &c(0, 0), &c(1, 0), Chirality::Plus).is_one());
        let p = braiding_scalar(&l, &c(1, 0), &c(0, 1), Chirality::Plus);
        let m = braiding_scalar(&l, &c(1, 0), &c(0, 1), Chirality::Minus);
        assert!(p.mul(&m).is_one());
        assert_eq!(*p.angle(), Quadratic::rational(rat(1, 2)));
    }

    #[test]
    fn coherence_and_corruption() {
        let l = compactified_boson(rat(1, 1));
        let r = verify_functor_coherence(&FunctorData::canonical(), &l, 2);
        assert!(r.all_passed(), "{r}");
        let bad = verify_functor_coherence(&FunctorData::trivial_tensorator(), &l, 2);
        let f = bad.find("braided-condition").unwrap();
        assert!(!f.passed());
        assert_eq!(f.witness.get("tuple").map(String::as_str), Some("(1,0,0,1)"));
    }

    #[test]
    fn nu_trivial_and_generic() {
        let h = TrigPoly::new(1.0, vec![0.3, -0.1], vec![0.2]);
        let r = nu_phase_values(&h, &h, 1.3, 64, 1e-12).unwrap();
        assert_eq!((r.m_dm, r.phase_uv), (0.0, 0.0));
        let g = TrigPoly::new(1.0, vec![0.0, 0.4, 0.1], vec![-0.5, 0.0, 0.2]);
        assert!(nu_phase_check(&h, &g, 1.3, 512, 1e-12).unwrap().all_passed());
        assert!(matches!(
            nu_phase_values(&TrigPoly::new(2.0, vec![], vec![]), &g, 1.0, 8, 1e-12),
            Err(BraidError::BadMean { .. })
        ));
    }
}
