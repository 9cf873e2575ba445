//! Kac's sign cocycle on an even lattice, the twisted group algebra, and the
//! finite-box coboundary solver.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{enumerate_box, indef_pairing_int, Charge, Lattice};
use crate::linalg::IntMatrix;
use crate::report::{Check, Report, Witness};
use crate::scalar::{Phase, Rational, RealScalar, Scalar};

/// `ε` stored by its values on the ordered generator basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    table: Vec<Vec<i8>>,
}

impl Cocycle {
    /// The table `(-1)^{(v_i|v_j)}` for `i < j`, `(-1)^{(v_i|v_i)/2}` on the
    /// diagonal and `1` below it.
    pub fn from_gram(g: &IntMatrix) -> Self {
        let n = g.len();
        let mut table = vec![vec![1i8; n]; n];
        for i in 0..n {
            for j in 0..n {
                let e = match i.cmp(&j) {
                    std::cmp::Ordering::Less => g[i][j],
                    std::cmp::Ordering::Equal => g[i][i] / 2,
                    std::cmp::Ordering::Greater => 0,
                };
                table[i][j] = if e.rem_euclid(2) == 1 { -1 } else { 1 };
            }
        }
        Cocycle { table }
    }

    /// A table taken verbatim, without checking any law.
    pub fn from_table(table: Vec<Vec<i8>>) -> Self {
        assert!(table.iter().all(|r| r.len() == table.len()));
        assert!(table.iter().flatten().all(|&x| x == 1 || x == -1));
        Cocycle { table }
    }

    pub fn table(&self) -> &[Vec<i8>] {
        &self.table
    }

    pub fn rank(&self) -> usize {
        self.table.len()
    }

    /// `Π table[i][j]^{a_i b_j}`, with the exponent reduced mod 2.
    pub fn eval(&self, a: &Charge, b: &Charge) -> i8 {
        let mut e = 0i64;
        for (i, &ai) in a.0.iter().enumerate() {
            if ai & 1 == 0 {
                continue;
            }
            for (j, &bj) in b.0.iter().enumerate() {
                if bj & 1 == 1 && self.table[i][j] == -1 {
                    e ^= 1;
                }
            }
        }
        if e == 1 {
            -1
        } else {
            1
        }
    }

    fn parity_table(&self) -> Vec<Vec<bool>> {
        let r = self.rank();
        let size = 1usize << r;
        let from_mask = |m: usize| Charge((0..r).map(|i| ((m >> i) & 1) as i64).collect());
        (0..size)
            .map(|a| (0..size).map(|b| self.eval(&from_mask(a), &from_mask(b)) == -1).collect())
            .collect()
    }
}

pub fn build_cocycle<F: RealScalar>(l: &Lattice<F>) -> Cocycle {
    Cocycle::from_gram(&l.gram_indef)
}

fn mask(c: &Charge) -> usize {
    c.0.iter().enumerate().fold(0, |m, (i, &x)| m | (((x & 1) as usize) << i))
}

/// Exhaustive check of the cocycle identity, commutator law, diagonal law
/// and normalization on the coordinate cube of the given radius.
pub fn verify_cocycle_laws(c: &Cocycle, gram: &IntMatrix, radius: i64) -> Report {
    let mut rep = Report::new("cocycle");
    let r = c.rank();
    assert_eq!(gram.len(), r);
    let pts = enumerate_box(r, radius);
    let masks: Vec<usize> = pts.iter().map(mask).collect();
    let eps = c.parity_table();
    let n = pts.len();

    // ε(β+γ,α) ε(β,γ) = ε(β,γ+α) ε(γ,α)
    let triple = (0..n).into_par_iter().find_map_first(|ib| {
        let mb = masks[ib];
        for ic in 0..n {
            let mc = masks[ic];
            for ia in 0..n {
                let ma = masks[ia];
                let lhs = eps[mb ^ mc][ma] ^ eps[mb][mc];
                let rhs = eps[mb][mc ^ ma] ^ eps[mc][ma];
                if lhs != rhs {
                    return Some((ia, ib, ic));
                }
            }
        }
        None
    });
    rep.push(Check::from_witness(
        "cocycle-identity",
        "twococycle",
        triple.map(|(a, b, cc)| {
            Witness::new()
                .coords("alpha", &pts[a].0)
                .coords("beta", &pts[b].0)
                .coords("gamma", &pts[cc].0)
        }),
    ));

    // ε(α,β) = (-1)^{(α|β)} ε(β,α)
    let comm = (0..n).find_map(|ia| {
        (0..n).find_map(|ib| {
            let s = indef_pairing_int(gram, &pts[ia], &pts[ib]).rem_euclid(2) == 1;
            (c.eval(&pts[ia], &pts[ib]) != c.eval(&pts[ib], &pts[ia]) * if s { -1 } else { 1 })
                .then_some((ia, ib))
        })
    });
    rep.push(Check::from_witness(
        "commutator",
        "shift-commut",
        comm.map(|(a, b)| Witness::new().coords("alpha", &pts[a].0).coords("beta", &pts[b].0)),
    ));

    // ε(α,α) = (-1)^{(α|α)/2}
    let diag = pts.iter().find(|a| {
        let h = indef_pairing_int(gram, a, a) / 2;
        c.eval(a, a) != if h.rem_euclid(2) == 1 { -1 } else { 1 }
    });
    rep.push(Check::from_witness("diagonal", "twococycle", diag.map(|a| Witness::new().coords("alpha", &a.0))));

    let zero = Charge::zero(r);
    let norm = pts.iter().find(|a| c.eval(a, &zero) != 1 || c.eval(&zero, a) != 1);
    rep.push(Check::from_witness("normalization", "twococycle", norm.map(|a| Witness::new().coords("alpha", &a.0))));
    rep
}

// ---------------------------------------------------------------------------
// Twisted group algebra

/// A finite sum `Σ c_α e_α` of `C_ε[Q]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedAlgebraElement<C> {
    pub terms: BTreeMap<Charge, C>,
}

impl<C: Scalar> TwistedAlgebraElement<C> {
    pub fn zero() -> Self {
        TwistedAlgebraElement { terms: BTreeMap::new() }
    }

    pub fn basis(a: Charge) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(a, C::one());
        TwistedAlgebraElement { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Charge, C)>) -> Self {
        let mut x = Self::zero();
        for (a, c) in terms {
            x.add_term(a, c);
        }
        x
    }

    pub fn add_term(&mut self, a: Charge, c: C) {
        let v = self.terms.remove(&a).map_or(c.clone(), |old| old + c);
        if !v.is_zero() {
            self.terms.insert(a, v);
        }
    }

    pub fn coefficient(&self, a: &Charge) -> C {
        self.terms.get(a).cloned().unwrap_or_else(C::zero)
    }

    /// `⟨x, y⟩ = Σ conj(x_α) y_α`, so that `{e_α}` is orthonormal.
    pub fn inner(&self, other: &Self) -> C {
        self.terms
            .iter()
            .filter_map(|(a, x)| other.terms.get(a).map(|y| x.conj() * y.clone()))
            .fold(C::zero(), |s, t| s + t)
    }
}

/// Bilinear extension of `e_α e_β = ε(α,β) e_{α+β}`.
pub fn algebra_product<C: Scalar>(
    c: &Cocycle,
    x: &TwistedAlgebraElement<C>,
    y: &TwistedAlgebraElement<C>,
) -> TwistedAlgebraElement<C> {
    let mut out = TwistedAlgebraElement::zero();
    for (a, xa) in &x.terms {
        for (b, yb) in &y.terms {
            let s = C::from_int(c.eval(a, b) as i64);
            out.add_term(a.add(b), s * xa.clone() * yb.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Coboundary solver

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoboundaryError {
    #[error("no coboundary solves the system; first mismatch at alpha={alpha} beta={beta}")]
    InconsistentSystem { alpha: Charge, beta: Charge },
}

/// A unit-valued function on box pairs, as rational angles of `e^{iπθ}`.
pub type PhaseFn<'a> = dyn Fn(&Charge, &Charge) -> Phase<Rational> + Sync + 'a;

/// Finds `χ` on the box with `χ(0) = 1` and
/// `c1(α,β)/c2(α,β) = χ(α)χ(β)/χ(α+β)` whenever `α, β, α+β` lie in the box.
/// Returns `Ok(None)` when the quotient is not symmetric.
pub fn coboundary_solve(
    rank: usize,
    c1: &PhaseFn<'_>,
    c2: &PhaseFn<'_>,
    radius: i64,
) -> Result<Option<BTreeMap<Charge, Phase<Rational>>>, CoboundaryError> {
    let pts = enumerate_box(rank, radius);
    let in_box = |c: &Charge| c.linf() <= radius;
    let theta = |a: &Charge, b: &Charge| c1(a, b).div(&c2(a, b));

    let asym = pts.par_iter().find_any(|a| {
        pts.iter().any(|b| in_box(&a.add(b)) && theta(a, b) != theta(b, a))
    });
    if asym.is_some() {
        return Ok(None);
    }

    let mut x: HashMap<Charge, Phase<Rational>> = HashMap::new();
    x.insert(Charge::zero(rank), Phase::one());
    for i in 0..rank {
        x.insert(Charge::unit(rank, i), Phase::one());
    }
    for a in &pts {
        if x.contains_key(a) {
            continue;
        }
        let i = (0..rank).find(|&i| a.0[i] != 0).expect("nonzero point");
        let e = Charge::unit(rank, i);
        let v = if a.0[i] > 0 {
            // χ(β+e) = χ(β) χ(e) / q(β,e)
            let b = a.sub(&e);
            x[&b].mul(&x[&e]).div(&theta(&b, &e))
        } else {
            // χ(α) = χ(α+e) q(α,e) / χ(e)
            let b = a.add(&e);
            x[&b].mul(&theta(a, &e)).div(&x[&e])
        };
        x.insert(a.clone(), v);
    }

    let bad = pts.par_iter().find_map_first(|a| {
        pts.iter().find_map(|b| {
            let s = a.add(b);
            if !in_box(&s) {
                return None;
            }
            let lhs = x[a].mul(&x[b]).div(&x[&s]);
            (lhs != theta(a, b)).then(|| (a.clone(), b.clone()))
        })
    });
    if let Some((alpha, beta)) = bad {
        return Err(CoboundaryError::InconsistentSystem { alpha, beta });
    }
    Ok(Some(x.into_iter().map(|(k, v)| (k, Phase(v.reduced()))).collect()))
}

/// `ε` as a phase-valued function.
pub fn cocycle_phase(c: &Cocycle) -> impl Fn(&Charge, &Charge) -> Phase<Rational> + Sync + '_ {
    move |a, b| Phase::sign(c.eval(a, b) == -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_complex::Complex;

    fn hyperbolic() -> IntMatrix {
        vec![vec![0, 1], vec![1, 0]]
    }

    #[test]
    fn tables() {
        assert_eq!(Cocycle::from_gram(&hyperbolic()).table(), &[vec![1, -1], vec![1, 1]]);
        assert_eq!(Cocycle::from_gram(&vec![vec![2]]).table(), &[vec![-1]]);
        assert_eq!(Cocycle::from_gram(&vec![vec![0]]).table(), &[vec![1]]);
    }

    #[test]
    fn hyperbolic_eval_is_nm() {
        let c = Cocycle::from_gram(&hyperbolic());
        for a in enumerate_box(2, 3) {
            for b in enumerate_box(2, 3) {
                let e = if (a.0[0] * b.0[1]).rem_euclid(2) == 1 { -1 } else { 1 };
                assert_eq!(c.eval(&a, &b), e);
            }
        }
    }

    #[test]
    fn laws_and_corruption() {
        let g = hyperbolic();
        assert!(verify_cocycle_laws(&Cocycle::from_gram(&g), &g, 2).all_passed());
        let bad = Cocycle::from_table(vec![vec![1, 1], vec![1, 1]]);
        let rep = verify_cocycle_laws(&bad, &g, 2);
        let f = rep.find("commutator").unwrap();
        assert_eq!(f.witness.get("alpha").map(String::as_str), Some("(1,0)"));
        assert_eq!(f.witness.get("beta").map(String::as_str), Some("(0,1)"));
        let empty = Cocycle::from_gram(&vec![]);
        assert!(verify_cocycle_laws(&empty, &vec![], 1).all_passed());
    }

    #[test]
    fn twisted_products() {
        let c = Cocycle::from_gram(&hyperbolic());
        let e = |a: i64, b: i64| TwistedAlgebraElement::<Complex<Rational>>::basis(Charge(vec![a, b]));
        let p = algebra_product(&c, &e(1, 0), &e(0, 1));
        assert_eq!(p.coefficient(&Charge(vec![1, 1])), Complex::new(rat(-1, 1), rat(0, 1)));
        let q = algebra_product(&c, &e(0, 1), &e(1, 0));
        assert_eq!(q.coefficient(&Charge(vec![1, 1])), Complex::new(rat(1, 1), rat(0, 1)));
        assert_eq!(algebra_product(&c, &e(0, 0), &p), p);
    }

    #[test]
    fn coboundary_trivial_and_gauge() {
        let c = Cocycle::from_gram(&hyperbolic());
        let eps = cocycle_phase(&c);
        let chi = coboundary_solve(2, &eps, &eps, 2).unwrap().unwrap();
        assert!(chi.values().all(Phase::is_one));

        // χ₀(a,b) = i^{ab}
        let chi0 = |x: &Charge| Phase(Rational::new((x.0[0] * x.0[1]) as i128, 2));
        let c1 = |a: &Charge, b: &Charge| eps(a, b).mul(&chi0(a)).mul(&chi0(b)).div(&chi0(&a.add(b)));
        let chi = coboundary_solve(2, &c1, &eps, 2).unwrap().unwrap();
        for a in enumerate_box(2, 2) {
            for b in enumerate_box(2, 2) {
                let s = a.add(&b);
                if s.linf() <= 2 {
                    let got = chi[&a].mul(&chi[&b]).div(&chi[&s]);
                    let want = chi0(&a).mul(&chi0(&b)).div(&chi0(&s));
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn antisymmetric_quotient_rejected() {
        let c = Cocycle::from_gram(&hyperbolic());
        let eps = cocycle_phase(&c);
        let c1 = |a: &Charge, b: &Charge| {
            let k = a.0[0] * b.0[1] - a.0[1] * b.0[0];
            eps(a, b).mul(&Phase(Rational::new(k as i128, 2)))
        };
        assert_eq!(coboundary_solve(2, &c1, &eps, 2), Ok(None));
    }

    #[test]
    fn non_cocycle_input_is_inconsistent() {
        let one = |_: &Charge, _: &Charge| Phase::one();
        // symmetric but not a cocycle: only (e1, e1) is twisted
        let bad = |a: &Charge, b: &Charge| Phase::sign(a.0 == vec![1] && b.0 == vec![1]);
        assert!(matches!(coboundary_solve(1, &bad, &one, 2), Err(CoboundaryError::InconsistentSystem { .. })));
    }
}
