//! Truncated exponentials `E^±(α, z)`, pre-vertex operators and their
//! commutation, primary-field and locality identities.
//!
//! `E⁺(α,z) = exp(-Σ α(n) z^{-n}/n)` and `E⁻(α,z) = exp(Σ α(-n) z^n/n)`.
//! Series are stored by their actual powers of `z`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::cocycle::Cocycle;
use crate::fock::{mode_operator, sugawara, window_witness, FockModule, GradedOperator, Side};
use crate::lattice::{Charge, Lattice};
use crate::linalg::dot;
use crate::report::{Check, Report, Witness};
use crate::scalar::{binomial, rat, Phase, RealScalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VertexError {
    #[error("component ({r}, {s}) lies outside the truncated support")]
    OutOfWindow { r: String, s: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    /// `E⁺`, lowering.
    Plus,
    /// `E⁻`, raising.
    Minus,
}

/// `z^offset · Σ_k A_k z^k`.
#[derive(Clone, Debug)]
pub struct SeriesOperator<F> {
    pub coeffs: BTreeMap<i64, GradedOperator<F>>,
    pub offset: F,
}

impl<F: RealScalar> SeriesOperator<F> {
    pub fn coeff(&self, k: i64) -> Option<&GradedOperator<F>> {
        self.coeffs.get(&k)
    }

    pub fn order_range(&self) -> (i64, i64) {
        (
            *self.coeffs.keys().next().unwrap_or(&0),
            *self.coeffs.keys().next_back().unwrap_or(&0),
        )
    }
}

/// Coefficients of `E^±(α, z)` up to total order `k_max`.
pub fn exp_half<F: RealScalar>(m: &FockModule<F>, alpha: &[F], half: Half, k_max: usize) -> SeriesOperator<F> {
    let n = m.len();
    let mut f: Vec<GradedOperator<F>> = vec![GradedOperator::identity(n)];
    // F_k = (1/k) Σ_{j=1}^k t_j F_{k-j}, t_j = -α(j) for E⁺ and α(-j) for E⁻
    let t: Vec<GradedOperator<F>> = (1..=k_max as i64)
        .map(|j| match half {
            Half::Plus => mode_operator(m, alpha, j).scale(&-F::one()),
            Half::Minus => mode_operator(m, alpha, -j),
        })
        .collect();
    for k in 1..=k_max {
        let shift = match half {
            Half::Plus => -(k as i64),
            Half::Minus => k as i64,
        };
        let mut acc = GradedOperator::zero(n, shift).with_band(shift.max(0) as usize);
        for j in 1..=k {
            acc = acc.add(&t[j - 1].compose(&f[k - j]));
        }
        f.push(acc.scale(&F::from_rational(&rat(1, k as i128))));
    }
    let coeffs = f
        .into_iter()
        .enumerate()
        .map(|(k, op)| (if half == Half::Plus { -(k as i64) } else { k as i64 }, op))
        .collect();
    SeriesOperator { coeffs, offset: F::zero() }
}

/// `E⁺_a` (coefficient of `z^{-a}`) and `E⁻_b` (coefficient of `z^b`) for `0..=k`.
struct Halves<F> {
    plus: Vec<GradedOperator<F>>,
    minus: Vec<GradedOperator<F>>,
}

fn halves<F: RealScalar>(m: &FockModule<F>, alpha: &[F], k: usize) -> Halves<F> {
    let p = exp_half(m, alpha, Half::Plus, k);
    let q = exp_half(m, alpha, Half::Minus, k);
    Halves {
        plus: (0..=k as i64).map(|a| p.coeffs[&-a].clone()).collect(),
        minus: (0..=k as i64).map(|b| q.coeffs[&b].clone()).collect(),
    }
}

/// `(1 - z/w)^{-(α,β)} E⁺(α,w) E⁻(β,z) = E⁻(β,z) E⁺(α,w)`, coefficient-wise
/// for `w^{-a} z^b` with `a, b <= k`.
pub fn verify_comm_e<F: RealScalar>(m: &FockModule<F>, alpha: &[F], beta: &[F], k: usize) -> Report {
    let mut rep = Report::new("vertex");
    let c = dot(alpha, beta);
    let ha = halves(m, alpha, k);
    let hb = halves(m, beta, k);
    let coef: Vec<F> = (0..=k as u32)
        .map(|n| {
            let b = binomial(&-c.clone(), n);
            if n % 2 == 1 {
                -b
            } else {
                b
            }
        })
        .collect();
    let b = &*m.basis;
    let pairs: Vec<(usize, usize)> = (0..=k).flat_map(|a| (0..=k).map(move |bb| (a, bb))).collect();
    let bad = pairs.par_iter().find_map_first(|&(a, bb)| {
        let n = m.len();
        let mut lhs = GradedOperator::zero(n, bb as i64 - a as i64);
        for j in 0..=a.min(bb) {
            lhs = lhs.add(&ha.plus[a - j].compose(&hb.minus[bb - j]).scale(&coef[j]));
        }
        let rhs = hb.minus[bb].compose(&ha.plus[a]);
        lhs.diff_on_window(&rhs, b).map(|w| window_witness(b, w).with("bidegree", format!("(w^-{a}, z^{bb})")))
    });
    rep.push(
        Check::from_witness("comm-E", "comm-E", bad).with_note(format!("(alpha,beta) = {c}, order {k}")),
    );
    rep
}

/// Weight-independent coefficients `Â_k` of `E⁻(α,z) E⁺(α,z) = Σ_k Â_k z^k`,
/// for `k` in `[-cutoff, k_max]`.
pub fn normal_ordered_exponential<F: RealScalar>(m: &FockModule<F>, alpha: &[F], k_max: i64) -> BTreeMap<i64, GradedOperator<F>> {
    let e = m.cutoff();
    let h = halves(m, alpha, e);
    let n = m.len();
    (-(e as i64)..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut acc = GradedOperator::zero(n, k).with_band(k.max(0) as usize);
            for i in (-k).max(0)..=(e as i64) {
                let j = k + i;
                if j < 0 || j as usize > e {
                    continue;
                }
                acc = acc.add(&h.minus[j as usize].compose(&h.plus[i as usize]));
            }
            (k, acc)
        })
        .collect()
}

/// `Y̲(z) = E⁻(α,z) E⁺(α,z) z^{α(0)}` on the module of `λ`, with offset `(α, λ)`.
pub fn pre_vertex<F: RealScalar>(source: &FockModule<F>, alpha: &[F], k_max: i64) -> SeriesOperator<F> {
    SeriesOperator { coeffs: normal_ordered_exponential(source, alpha, k_max), offset: source.zero_mode(alpha) }
}

/// The integer `k` with `-r-1 = k + offset`, if `r` lies on the derived grid.
pub fn fourier_index<F: RealScalar>(offset: &F, r: &F) -> Option<i64> {
    let k = -r.clone() - F::one() - offset.clone();
    k.to_integer().map(|x| x as i64)
}

/// Whether `r + offset/2` is an integer, the half-offset grid condition.
pub fn on_half_offset_grid<F: RealScalar>(offset: &F, r: &F) -> bool {
    (r.clone() + offset.clone() * F::from_rational(&rat(1, 2))).to_integer().is_some()
}

/// `Y_r`, the coefficient of `z^{-r-1}`; `None` off the derived grid.
pub fn fourier_coefficient<'a, F: RealScalar>(
    y: &'a SeriesOperator<F>,
    r: &F,
) -> Result<Option<&'a GradedOperator<F>>, VertexError> {
    let Some(k) = fourier_index(&y.offset, r) else { return Ok(None) };
    let (lo, hi) = y.order_range();
    if k < lo || k > hi {
        return Err(VertexError::OutOfWindow { r: r.to_string(), s: "-".into() });
    }
    Ok(y.coeffs.get(&k))
}

/// One sector-to-sector block of a two-variable field.
#[derive(Clone, Debug)]
pub struct SectorBlock<F> {
    pub source: Charge,
    pub target: Charge,
    pub sign: i8,
    pub chiral: SeriesOperator<F>,
    pub antichiral: SeriesOperator<F>,
}

/// `Y(z, z̄) = Σ Y_{r,s} z^{-r-1} z̄^{-s-1}` as a sum of sector blocks; the
/// block coefficient at `z^{k+h} z̄^{l+h̄}` is `sign · A_k ⊗ Ā_l`.
#[derive(Clone, Debug)]
pub struct BigradedSeries<F> {
    pub alpha: Charge,
    pub blocks: Vec<SectorBlock<F>>,
}

/// The `(r, s)` component of one block: `(sign, chiral factor, antichiral factor)`.
pub struct FourierBlock<'a, F> {
    pub sign: i8,
    pub chiral: &'a GradedOperator<F>,
    pub antichiral: &'a GradedOperator<F>,
}

impl<F: RealScalar> BigradedSeries<F> {
    pub fn block(&self, source: &Charge) -> Option<&SectorBlock<F>> {
        self.blocks.iter().find(|b| &b.source == source)
    }
}

/// `Y_{r,s}` on the block with the given source sector.
pub fn fourier_component<'a, F: RealScalar>(
    y: &'a BigradedSeries<F>,
    source: &Charge,
    r: &F,
    s: &F,
) -> Result<Option<FourierBlock<'a, F>>, VertexError> {
    let oow = || VertexError::OutOfWindow { r: r.to_string(), s: s.to_string() };
    let b = y.block(source).ok_or_else(oow)?;
    let (Some(k), Some(l)) = (fourier_index(&b.chiral.offset, r), fourier_index(&b.antichiral.offset, s)) else {
        return Ok(None);
    };
    let (Some(a), Some(abar)) = (b.chiral.coeffs.get(&k), b.antichiral.coeffs.get(&l)) else {
        return Err(oow());
    };
    Ok(Some(FourierBlock { sign: b.sign, chiral: a, antichiral: abar }))
}

/// `[L_m, Y(z)] = z^{m+1} ∂Y + Δ(m+1) z^m Y` between the modules of `λ` and
/// `λ+α`, read off as `L_m A_n - A_n L_m = (n - m + h + Δ(m+1)) A_{n-m}`.
pub fn verify_primary<F: RealScalar>(
    source: &FockModule<F>,
    alpha: &[F],
    modes: &[i64],
    k: i64,
) -> Report {
    let mut rep = Report::new("vertex");
    let target_weight: Vec<F> = source.weight.iter().zip(alpha).map(|(a, b)| a.clone() + b.clone()).collect();
    let target = source.with_weight(target_weight);
    let m_max = modes.iter().map(|m| m.abs()).max().unwrap_or(0);
    let y = pre_vertex(source, alpha, k + m_max);
    let h = y.offset.clone();
    let delta = dot(alpha, alpha) * F::from_rational(&rat(1, 2));
    let b = &*source.basis;
    let anchor = match source.side {
        Side::Chiral => "primary+",
        Side::Antichiral => "primary-",
    };
    let zero = GradedOperator::zero(source.len(), 0);
    let bad = modes.iter().find_map(|&m| {
        let lt = sugawara(&target, m);
        let ls = sugawara(source, m);
        (-k..=k).find_map(|n| {
            let an = &y.coeffs[&n];
            let lhs = lt.compose(an).sub(&an.compose(&ls));
            let c = F::from_int(n - m) + h.clone() + delta.clone() * F::from_int(m + 1);
            let rhs = y.coeffs.get(&(n - m)).map(|a| a.scale(&c)).unwrap_or_else(|| zero.clone());
            lhs.diff_on_window(&rhs, b).map(|w| window_witness(b, w).with("m", m).with("n", n))
        })
    });
    rep.push(
        Check::from_witness(format!("primary-{}", side_name(source.side)), anchor, bad)
            .with_note(format!("scaling dimension {delta}, offset {h}")),
    );

    // grading shift: [L_0, Y_r] = (Δ - r - 1) Y_r on the derived grid
    let l0t = sugawara(&target, 0);
    let l0s = sugawara(source, 0);
    let grid = (-k..=k).find_map(|n| {
        let an = &y.coeffs[&n];
        let r = -F::from_int(n) - h.clone() - F::one();
        let lhs = l0t.compose(an).sub(&an.compose(&l0s));
        let rhs = an.scale(&(delta.clone() - r.clone() - F::one()));
        let wrong_shift = (0..an.size()).find_map(|j| {
            an.column(j)
                .iter()
                .find(|(i, _)| b.energy(*i) as i64 != b.energy(j) as i64 + n)
                .map(|(i, _)| (*i, j))
        });
        lhs.diff_on_window(&rhs, b)
            .or(wrong_shift)
            .map(|w| window_witness(b, w).with("r", &r))
    });
    let half_grid_agrees = on_half_offset_grid(&h, &(-h.clone() - F::one()));
    let mut c = Check::from_witness(format!("fourier-grid-{}", side_name(source.side)), "fourier-grid", grid);
    c = c.with_note(if half_grid_agrees {
        format!("derived grid r in Z - {h} coincides with the half-offset grid")
    } else {
        format!("derived grid r in Z - {h}; half-offset grid r in Z - {h}/2 differs")
    });
    rep.push(c);
    rep
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Chiral => "chiral",
        Side::Antichiral => "antichiral",
    }
}

type Products<F> = HashMap<(i64, i64), GradedOperator<F>>;

/// Every product `A_i B_j` used by the weighted sums at bidegrees `|p|, |q| <= k`.
fn products<F: RealScalar>(
    a: &BTreeMap<i64, GradedOperator<F>>,
    b: &BTreeMap<i64, GradedOperator<F>>,
    terms: i64,
    k: i64,
) -> Products<F> {
    let mut keys: Vec<(i64, i64)> = Vec::new();
    for p in -k..=k {
        for q in -k..=k {
            for n in 0..terms {
                if a.contains_key(&(p + n)) && b.contains_key(&(q - n)) {
                    keys.push((p + n, q - n));
                }
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();
    keys.into_par_iter().map(|(i, j)| ((i, j), a[&i].compose(&b[&j]))).collect()
}

/// `Σ_n c_n A_{p+n} B_{q-n}` with `c_n = binom(-c, n)(-1)^n`.
fn weighted_product<F: RealScalar>(prod: &Products<F>, coef: &[F], p: i64, q: i64, size: usize) -> GradedOperator<F> {
    let mut acc = GradedOperator::zero(size, p + q);
    for (n, c) in coef.iter().enumerate() {
        let n = n as i64;
        let Some(x) = prod.get(&(p + n, q - n)) else { continue };
        acc = acc.add(&x.scale(c));
    }
    acc
}

/// Chiral half of the locality identity:
/// `(1-z/w)^{-c} Â_α(w) Â_β(z) = (1-w/z)^{-c} Â_β(z) Â_α(w)` for bidegrees
/// `|p|, |q| <= k`.
fn chiral_locality<F: RealScalar>(
    m: &FockModule<F>,
    alpha: &[F],
    beta: &[F],
    k: i64,
) -> Option<(usize, usize, i64, i64)> {
    let c = dot(alpha, beta);
    let e = m.cutoff() as i64;
    let terms = (k + e + 1) as u32;
    let coef: Vec<F> = (0..terms)
        .map(|n| {
            let b = binomial(&-c.clone(), n);
            if n % 2 == 1 {
                -b
            } else {
                b
            }
        })
        .collect();
    let top = k + e + 1;
    let aa = normal_ordered_exponential(m, alpha, top);
    let bb = normal_ordered_exponential(m, beta, top);
    let b = &*m.basis;
    let ab = products(&aa, &bb, terms as i64, k);
    let ba = products(&bb, &aa, terms as i64, k);
    let pairs: Vec<(i64, i64)> = (-k..=k).flat_map(|p| (-k..=k).map(move |q| (p, q))).collect();
    pairs.par_iter().find_map_first(|&(p, q)| {
        let lhs = weighted_product(&ab, &coef, p, q, m.len());
        // mirrored: coefficient of w^p z^q in Σ c_n w^n z^{-n} Â_β(z) Â_α(w)
        let rhs = weighted_product(&ba, &coef, q, p, m.len());
        lhs.diff_on_window(&rhs, b).map(|(r, col)| (r, col, p, q))
    })
}

/// Locality of `Y_α(w,w̄) Y_β(z,z̄)`: chiral and antichiral normal-ordered
/// identities, the sector signs `ε(α,λ+β)ε(β,λ) = (-1)^{(α|β)}ε(β,λ+α)ε(α,λ)`,
/// and the phase bookkeeping `e^{iπ((pα,pβ)-(p̄α,p̄β))} = (-1)^{(α|β)}`.
pub fn verify_locality_phase<F: RealScalar>(
    l: &Lattice<F>,
    eps: &Cocycle,
    alpha: &Charge,
    beta: &Charge,
    k: i64,
    cutoff: usize,
    sectors: &[Charge],
) -> Report {
    let mut rep = Report::new("vertex");
    let tag = format!("{alpha},{beta}");
    let halves = [
        (Side::Chiral, l.space.d_plus, l.chiral_part(alpha), l.chiral_part(beta)),
        (Side::Antichiral, l.space.d_minus, l.antichiral_part(alpha), l.antichiral_part(beta)),
    ];
    for (side, d, a, b) in halves {
        let id = format!("comm-Y-{}[{tag}]", side_name(side));
        if d == 0 {
            rep.push(Check::skipped(id, "comm-Y", "zero-dimensional side"));
            continue;
        }
        let m = match crate::fock::build_module_with(side, d, vec![F::zero(); d], cutoff, crate::fock::DEFAULT_STATE_BUDGET) {
            Ok(m) => m,
            Err(e) => {
                rep.push(Check::skipped(id, "comm-Y", e.to_string()));
                continue;
            }
        };
        let bad = chiral_locality(&m, &a, &b, k);
        rep.push(Check::from_witness(
            id,
            "comm-Y",
            bad.map(|(r, c, p, q)| window_witness(&m.basis, (r, c)).with("bidegree", format!("(w^{p}, z^{q})"))),
        ));
    }

    let ab = l.indef_pairing(alpha, beta);
    let sgn = if ab.rem_euclid(2) == 1 { -1 } else { 1 };
    let bad_sector = sectors.iter().find(|lam| {
        let sl = eps.eval(alpha, &lam.add(beta)) * eps.eval(beta, lam);
        let sr = sgn * eps.eval(beta, &lam.add(alpha)) * eps.eval(alpha, lam);
        sl != sr
    });
    rep.push(Check::from_witness(
        format!("sector-sign[{tag}]"),
        "comm-Y",
        bad_sector.map(|lam| Witness::new().coords("lambda", &lam.0).with("indef", ab)),
    ));

    let (cp, cm) = (l.chiral_pairing(alpha, beta), l.antichiral_pairing(alpha, beta));
    let phase = Phase(cp.clone() - cm.clone());
    let want = Phase::<F>::sign(sgn == -1);
    let cancel = want.mul(&Phase(F::from_int(-ab)));
    let w = (!(phase == want) || !cancel.is_one())
        .then(|| Witness::new().with("chiral", &cp).with("antichiral", &cm).with("indef", ab));
    rep.push(Check::from_witness(format!("phase-bookkeeping[{tag}]"), "comm-Y", w));
    rep
}
