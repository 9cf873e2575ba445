//! Scalar backends.
//!
//! Three families of numbers are used throughout the crate:
//!
//! - [`Rational`]: exact rationals over `i128` (overflow is checked, never wrapped).
//! - [`Quadratic`]: exact elements `a + b sqrt(d)` of one quadratic field.
//! - [`Real`]: `f64` values carrying an explicit comparison tolerance.
//!
//! All operator code is generic over [`Scalar`]; code that needs an order
//! (positivity, rounding, phases) asks for [`RealScalar`]. Complex coefficients
//! are `num_complex::Complex<F>` for a real backend `F`, which implements
//! [`Scalar`] as well.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::Complex;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// Exact rational number.
pub type Rational = Ratio<i128>;

/// Default relative tolerance of the float backend.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn rzero() -> Rational {
    Rational::from_integer(0)
}

fn rone() -> Rational {
    Rational::from_integer(1)
}

fn qf(q: &Rational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Field operations shared by every backend.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Exact zero test (used for sparsity, never for verification).
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Equality in the backend's sense: exact, or within the declared tolerance.
    fn approx_eq(&self, other: &Self) -> bool;
    fn conj(&self) -> Self;
    fn is_exact(&self) -> bool;
    fn abs_f64(&self) -> f64;

    fn is_negligible(&self) -> bool {
        self.approx_eq(&Self::zero())
    }

    fn div_exact(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }
}

/// Ordered real backends.
pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;
    /// The value as an exact rational, when it is one.
    fn to_rational(&self) -> Option<Rational>;
    /// Nearest integer when the value is an integer in the backend's sense.
    fn to_integer(&self) -> Option<i128>;
    /// Declared comparison tolerance (zero for exact backends).
    fn tolerance(&self) -> f64;

    fn is_even_integer(&self) -> bool {
        self.to_integer().is_some_and(|n| n % 2 == 0)
    }

    fn is_positive(&self) -> bool {
        !self.is_negligible() && *self > Self::zero()
    }
}

// ---------------------------------------------------------------------------
// Rational

impl Scalar for Rational {
    fn zero() -> Self {
        rzero()
    }
    fn one() -> Self {
        rone()
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
    fn from_rational(q: &Rational) -> Self {
        *q
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn abs_f64(&self) -> f64 {
        qf(self).abs()
    }
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        qf(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(*self)
    }
    fn to_integer(&self) -> Option<i128> {
        self.is_integer().then(|| *self.numer())
    }
    fn tolerance(&self) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Quadratic field elements

/// `rat + irr * sqrt(radicand)` with `radicand` square-free. A value with
/// `irr == 0` is a plain rational and combines with any field.
#[derive(Clone, Debug)]
pub struct Quadratic {
    rat: Rational,
    irr: Rational,
    radicand: i64,
}

impl Quadratic {
    pub fn new(rat: Rational, irr: Rational, radicand: i64) -> Self {
        assert!(radicand >= 1, "radicand must be positive");
        let (square, free) = split_square(radicand as i128);
        let irr = irr * Rational::from_integer(square);
        let radicand = free as i64;
        if irr == rzero() || radicand == 1 {
            Quadratic { rat: rat + if radicand == 1 { irr } else { rzero() }, irr: rzero(), radicand: 1 }
        } else {
            Quadratic { rat, irr, radicand }
        }
    }

    pub fn rational(q: Rational) -> Self {
        Quadratic { rat: q, irr: rzero(), radicand: 1 }
    }

    /// `coeff * sqrt(r)` for a non-negative rational `r`.
    pub fn sqrt_of(r: Rational, coeff: Rational) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        // sqrt(n/d) = sqrt(n d) / d
        let nd = r.numer() * r.denom();
        let (square, free) = split_square(nd);
        let c = coeff * Rational::new(square, *r.denom());
        Quadratic::new(rzero(), c, free as i64)
    }

    pub fn rational_part(&self) -> Rational {
        self.rat
    }

    pub fn irrational_part(&self) -> Rational {
        self.irr
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    fn join(&self, other: &Self) -> i64 {
        match (self.radicand, other.radicand) {
            (1, r) | (r, 1) => r,
            (r, s) if r == s => r,
            (r, s) => panic!("mixed quadratic fields Q(sqrt {r}) and Q(sqrt {s})"),
        }
    }

    fn sign(&self) -> Ordering {
        let zero = rzero();
        let sa = self.rat.cmp(&zero);
        let sb = self.irr.cmp(&zero);
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = self.rat * self.rat;
        let b2d = self.irr * self.irr * Rational::from_integer(self.radicand as i128);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }
}

/// Splits `n = s^2 * f` with `f` square-free.
fn split_square(n: i128) -> (i128, i128) {
    assert!(n >= 0);
    if n == 0 {
        return (0, 1);
    }
    let mut square = 1i128;
    let mut free = 1i128;
    let mut rest = n;
    let mut p = 2i128;
    while p * p <= rest {
        let mut k = 0;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        for _ in 0..k / 2 {
            square *= p;
        }
        if k % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= rest;
    (square, free)
}

pub fn squarefree_part(n: i128) -> i128 {
    split_square(n).1
}

impl PartialEq for Quadratic {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat && self.irr == other.irr && (self.irr == rzero() || self.radicand == other.radicand)
    }
}

impl PartialOrd for Quadratic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).sign())
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr == rzero() {
            write!(f, "{}", self.rat)
        } else if self.rat == rzero() {
            write!(f, "{}*sqrt({})", self.irr, self.radicand)
        } else {
            write!(f, "{}+{}*sqrt({})", self.rat, self.irr, self.radicand)
        }
    }
}

impl Add for Quadratic {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let d = self.join(&o);
        Quadratic::new(self.rat + o.rat, self.irr + o.irr, d)
    }
}

impl Sub for Quadratic {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let d = self.join(&o);
        Quadratic::new(self.rat - o.rat, self.irr - o.irr, d)
    }
}

impl Mul for Quadratic {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = self.join(&o);
        let dq = Rational::from_integer(d as i128);
        Quadratic::new(self.rat * o.rat + self.irr * o.irr * dq, self.rat * o.irr + self.irr * o.rat, d)
    }
}

impl Div for Quadratic {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * Scalar::inv(&o).expect("division by zero")
    }
}

/// Remainder in a field is identically zero.
impl Rem for Quadratic {
    type Output = Self;
    fn rem(self, _o: Self) -> Self {
        Quadratic::rational(rzero())
    }
}

impl Neg for Quadratic {
    type Output = Self;
    fn neg(self) -> Self {
        Quadratic { rat: -self.rat, irr: -self.irr, radicand: self.radicand }
    }
}

impl num_traits::Zero for Quadratic {
    fn zero() -> Self {
        Quadratic::rational(rzero())
    }
    fn is_zero(&self) -> bool {
        self.rat == rzero() && self.irr == rzero()
    }
}

impl num_traits::One for Quadratic {
    fn one() -> Self {
        Quadratic::rational(rone())
    }
}

impl Num for Quadratic {
    type FromStrRadixErr = num_rational::ParseRatioError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Rational::from_str_radix(s, radix).map(Quadratic::rational)
    }
}

impl Scalar for Quadratic {
    fn zero() -> Self {
        Quadratic::rational(rzero())
    }
    fn one() -> Self {
        Quadratic::rational(rone())
    }
    fn from_int(n: i64) -> Self {
        Quadratic::rational(Rational::from_integer(n as i128))
    }
    fn from_rational(q: &Rational) -> Self {
        Quadratic::rational(*q)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            return None;
        }
        let dq = Rational::from_integer(self.radicand as i128);
        let norm = self.rat * self.rat - self.irr * self.irr * dq;
        Some(Quadratic::new(self.rat / norm, -self.irr / norm, self.radicand))
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn abs_f64(&self) -> f64 {
        RealScalar::to_f64(self).abs()
    }
}

impl RealScalar for Quadratic {
    fn to_f64(&self) -> f64 {
        qf(&self.rat) + qf(&self.irr) * (self.radicand as f64).sqrt()
    }
    fn to_rational(&self) -> Option<Rational> {
        (self.irr == rzero()).then_some(self.rat)
    }
    fn to_integer(&self) -> Option<i128> {
        self.to_rational().and_then(|q| q.is_integer().then(|| *q.numer()))
    }
    fn tolerance(&self) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Float backend

/// An `f64` carrying the relative tolerance used when comparing it.
#[derive(Clone, Copy, Debug)]
pub struct Real {
    pub value: f64,
    pub tol: f64,
}

impl Real {
    pub fn new(value: f64) -> Self {
        Real { value, tol: DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(value: f64, tol: f64) -> Self {
        Real { value, tol }
    }

    fn combine(self, o: Self, value: f64) -> Self {
        Real { value, tol: self.tol.max(o.tol) }
    }

    pub fn sqrt(self) -> Self {
        Real { value: self.value.sqrt(), tol: self.tol }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.value)
    }
}

impl Add for Real {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(o, self.value + o.value)
    }
}

impl Sub for Real {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(o, self.value - o.value)
    }
}

impl Mul for Real {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.combine(o, self.value * o.value)
    }
}

impl Div for Real {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self.combine(o, self.value / o.value)
    }
}

impl Rem for Real {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        self.combine(o, 0.0)
    }
}

impl Neg for Real {
    type Output = Self;
    fn neg(self) -> Self {
        Real { value: -self.value, tol: self.tol }
    }
}

impl num_traits::Zero for Real {
    fn zero() -> Self {
        Real::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0
    }
}

impl num_traits::One for Real {
    fn one() -> Self {
        Real::new(1.0)
    }
}

impl Num for Real {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Real::new)
    }
}

impl Scalar for Real {
    fn zero() -> Self {
        Real::new(0.0)
    }
    fn one() -> Self {
        Real::new(1.0)
    }
    fn from_int(n: i64) -> Self {
        Real::new(n as f64)
    }
    fn from_rational(q: &Rational) -> Self {
        Real::new(qf(q))
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0
    }
    fn inv(&self) -> Option<Self> {
        (self.value != 0.0).then(|| Real { value: 1.0 / self.value, tol: self.tol })
    }
    fn approx_eq(&self, other: &Self) -> bool {
        let tol = self.tol.max(other.tol);
        let scale = 1.0f64.max(self.value.abs()).max(other.value.abs());
        (self.value - other.value).abs() <= tol * scale
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_exact(&self) -> bool {
        false
    }
    fn abs_f64(&self) -> f64 {
        self.value.abs()
    }
}

impl RealScalar for Real {
    fn to_f64(&self) -> f64 {
        self.value
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn to_integer(&self) -> Option<i128> {
        let r = self.value.round();
        ((self.value - r).abs() <= self.tol * 1.0f64.max(self.value.abs())).then_some(r as i128)
    }
    fn tolerance(&self) -> f64 {
        self.tol
    }
}

// ---------------------------------------------------------------------------
// Complex coefficients over a real backend

impl<F: RealScalar + Num> Scalar for Complex<F> {
    fn zero() -> Self {
        Complex::new(<F as Scalar>::zero(), <F as Scalar>::zero())
    }
    fn one() -> Self {
        Complex::new(<F as Scalar>::one(), <F as Scalar>::zero())
    }
    fn from_int(n: i64) -> Self {
        Complex::new(F::from_int(n), <F as Scalar>::zero())
    }
    fn from_rational(q: &Rational) -> Self {
        Complex::new(F::from_rational(q), <F as Scalar>::zero())
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(&self.re) && Scalar::is_zero(&self.im)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        let ni = Scalar::inv(&n)?;
        Some(Complex::new(self.re.clone() * ni.clone(), -self.im.clone() * ni))
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self.re.approx_eq(&other.re) && self.im.approx_eq(&other.im)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn is_exact(&self) -> bool {
        self.re.is_exact()
    }
    fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

/// Lifts a real value into the complex backend.
pub fn complexify<F: RealScalar>(x: &F) -> Complex<F> {
    Complex::new(x.clone(), <F as Scalar>::zero())
}

// ---------------------------------------------------------------------------
// Phases

/// The unit complex number `exp(i * pi * angle)`; equality is modulo `2`.
#[derive(Clone, Debug)]
pub struct Phase<F>(pub F);

impl<F: RealScalar> Phase<F> {
    pub fn one() -> Self {
        Phase(F::zero())
    }

    /// `+1` or `-1` as a phase.
    pub fn sign(negative: bool) -> Self {
        Phase(if negative { F::one() } else { F::zero() })
    }

    pub fn angle(&self) -> &F {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Phase(self.0.clone() + other.0.clone())
    }

    pub fn inv(&self) -> Self {
        Phase(-self.0.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        Phase(self.0.clone() - other.0.clone())
    }

    pub fn pow(&self, k: i64) -> Self {
        Phase(self.0.clone() * F::from_int(k))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_even_integer()
    }

    /// `Some(±1)` when the phase is real.
    pub fn as_sign(&self) -> Option<i8> {
        self.0.to_integer().map(|n| if n % 2 == 0 { 1 } else { -1 })
    }

    pub fn to_complex_f64(&self) -> (f64, f64) {
        let t = std::f64::consts::PI * self.0.to_f64();
        (t.cos(), t.sin())
    }
}

impl Phase<Rational> {
    /// Representative angle in `[0, 2)`.
    pub fn reduced(&self) -> Rational {
        let two = Rational::from_integer(2);
        let q = (self.0 / two).floor();
        self.0 - q * two
    }

    /// Exact complex value when the phase is a fourth root of unity.
    pub fn to_gaussian(&self) -> Option<Complex<Rational>> {
        let r = self.reduced();
        let half = Rational::new(1, 2);
        let (o, z) = (rone(), rzero());
        if r == rzero() {
            Some(Complex::new(o, z))
        } else if r == half {
            Some(Complex::new(z, o))
        } else if r == rone() {
            Some(Complex::new(-o, z))
        } else if r == Rational::new(3, 2) {
            Some(Complex::new(z, -o))
        } else {
            None
        }
    }
}

impl<F: RealScalar> PartialEq for Phase<F> {
    fn eq(&self, other: &Self) -> bool {
        self.div(other).is_one()
    }
}

impl<F: RealScalar> fmt::Display for Phase<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp(i*pi*{})", self.0)
    }
}

/// `(-1)^k` as an `i8`.
pub fn parity_sign(k: i128) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Generalized binomial coefficient `binom(a, n)` in the backend.
pub fn binomial<F: Scalar>(a: &F, n: u32) -> F {
    let mut acc = F::one();
    for k in 0..n {
        acc = acc * (a.clone() - F::from_int(k as i64));
        acc = acc * F::from_rational(&Rational::new(1, (k + 1) as i128));
    }
    acc
}

/// Least common multiple of rational denominators.
pub fn denominator_lcm(values: &[Rational]) -> i128 {
    values.iter().fold(1i128, |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_arithmetic_is_exact() {
        let s2 = Quadratic::sqrt_of(rat(2, 1), rat(1, 1));
        assert_eq!(s2.clone() * s2.clone(), Quadratic::rational(rat(2, 1)));
        let half_s2 = Quadratic::sqrt_of(rat(1, 2), rat(1, 1));
        assert_eq!(half_s2.clone() * s2.clone(), Quadratic::rational(rat(1, 1)));
        let x = Quadratic::new(rat(3, 1), rat(-2, 1), 2);
        let y = Scalar::inv(&x).unwrap();
        assert_eq!(x * y, Quadratic::one());
    }

    #[test]
    fn quadratic_sign() {
        // 1 - sqrt(2) < 0 < 3 - 2 sqrt(2)
        let a = Quadratic::new(rat(1, 1), rat(-1, 1), 2);
        let b = Quadratic::new(rat(3, 1), rat(-2, 1), 2);
        assert!(a < Quadratic::zero());
        assert!(b > Quadratic::zero());
        assert!(Quadratic::new(rat(3, 2), rat(-1, 1), 2) > Quadratic::zero());
    }

    #[test]
    fn sqrt_of_rationals_lands_in_one_field() {
        // sqrt(2/3) = sqrt(6)/3
        let r = Quadratic::sqrt_of(rat(2, 3), rat(1, 1));
        assert_eq!(r.radicand(), 6);
        assert_eq!(r.irrational_part(), rat(1, 3));
        assert_eq!(Quadratic::sqrt_of(rat(4, 9), rat(1, 1)), Quadratic::rational(rat(2, 3)));
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixing_fields_panics() {
        let _ = Quadratic::sqrt_of(rat(2, 1), rat(1, 1)) + Quadratic::sqrt_of(rat(3, 1), rat(1, 1));
    }

    #[test]
    fn real_tolerance() {
        let a = Real::with_tolerance(1.0, 1e-12);
        assert!(a.approx_eq(&Real::with_tolerance(1.0 + 1e-13, 1e-12)));
        assert!(!a.approx_eq(&Real::with_tolerance(1.0 + 1e-10, 1e-12)));
        assert_eq!(Real::new(2.0 + 1e-12).to_integer(), Some(2));
    }

    #[test]
    fn phases_compare_mod_two() {
        assert_eq!(Phase(rat(5, 2)), Phase(rat(1, 2)));
        assert_ne!(Phase(rat(1, 1)), Phase::<Rational>::one());
        assert_eq!(Phase(rat(-1, 2)).reduced(), rat(3, 2));
        assert_eq!(Phase(rat(3, 1)).as_sign(), Some(-1));
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binomial(&rat(-2, 1), 3), rat(-4, 1));
        assert_eq!(binomial(&rat(2, 1), 3), rat(0, 1));
        assert_eq!(binomial(&rat(1, 2), 2), rat(-1, 8));
    }
}
