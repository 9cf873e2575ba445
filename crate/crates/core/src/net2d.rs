//! The truncated space `H_Q = ⊕_λ M(1,pλ) ⊗ M(1,p̄λ)` over a charge box,
//! shift operators, full fields, spins, characters and the classification
//! pipeline for charge samples.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cocycle::{build_cocycle, coboundary_solve, CoboundaryError, Cocycle, PhaseFn};
use crate::fock::{
    mode_operator, sugawara, window_witness, FockBasis, FockError, FockModule, GradedOperator, Side,
    DEFAULT_STATE_BUDGET,
};
use crate::lattice::{enumerate_box, recognize_lattice, Charge, Lattice, LatticeError, SplitSpace, SplitVector};
use crate::report::{Check, Report, Witness};
use crate::scalar::{rat, Phase, Rational, RealScalar};
use crate::vertex::{pre_vertex, BigradedSeries, SectorBlock};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("box radius must be at least 1")]
    EmptyBox,
}

#[derive(Clone, Debug)]
pub struct Sector<F> {
    pub charge: Charge,
    pub chiral: FockModule<F>,
    pub antichiral: FockModule<F>,
}

impl<F: RealScalar> Sector<F> {
    /// `((pλ,pλ)/2, (p̄λ,p̄λ)/2)`.
    pub fn minimal_bigrade(&self) -> (F, F) {
        let h = F::from_rational(&rat(1, 2));
        let p = crate::linalg::dot(&self.chiral.weight, &self.chiral.weight);
        let m = crate::linalg::dot(&self.antichiral.weight, &self.antichiral.weight);
        (p * h.clone(), m * h)
    }

    pub fn state_count(&self) -> usize {
        self.chiral.len() * self.antichiral.len()
    }
}

/// `H_Q` restricted to the sectors of a coordinate box.
#[derive(Clone, Debug)]
pub struct ExtensionSpace<F> {
    pub lattice: Lattice<F>,
    pub cocycle: Cocycle,
    pub radius: i64,
    pub cutoff: usize,
    pub sectors: Vec<Sector<F>>,
    index: BTreeMap<Charge, usize>,
}

pub fn build_extension<F: RealScalar>(
    l: &Lattice<F>,
    radius: i64,
    cutoff: usize,
) -> Result<ExtensionSpace<F>, ExtensionError> {
    build_extension_with(l, radius, cutoff, DEFAULT_STATE_BUDGET)
}

pub fn build_extension_with<F: RealScalar>(
    l: &Lattice<F>,
    radius: i64,
    cutoff: usize,
    budget: usize,
) -> Result<ExtensionSpace<F>, ExtensionError> {
    if radius < 1 {
        return Err(ExtensionError::EmptyBox);
    }
    let plus = Arc::new(FockBasis::new(l.space.d_plus, cutoff, budget)?);
    let minus = Arc::new(FockBasis::new(l.space.d_minus, cutoff, budget)?);
    let charges = enumerate_box(l.rank(), radius);
    let needed = charges.len() * plus.len() * minus.len();
    if needed > budget {
        return Err(FockError::CutoffTooLarge { needed, budget }.into());
    }
    let sectors: Vec<Sector<F>> = charges
        .par_iter()
        .map(|c| Sector {
            charge: c.clone(),
            chiral: FockModule::on_basis(Side::Chiral, plus.clone(), l.chiral_part(c)),
            antichiral: FockModule::on_basis(Side::Antichiral, minus.clone(), l.antichiral_part(c)),
        })
        .collect();
    let index = sectors.iter().enumerate().map(|(i, s)| (s.charge.clone(), i)).collect();
    Ok(ExtensionSpace { lattice: l.clone(), cocycle: build_cocycle(l), radius, cutoff, sectors, index })
}

impl<F: RealScalar> ExtensionSpace<F> {
    pub fn sector(&self, c: &Charge) -> Option<&Sector<F>> {
        self.index.get(c).map(|&i| &self.sectors[i])
    }

    pub fn contains(&self, c: &Charge) -> bool {
        self.index.contains_key(c)
    }

    pub fn state_count(&self) -> usize {
        self.sectors.iter().map(Sector::state_count).sum()
    }

    pub fn charges(&self) -> impl Iterator<Item = &Charge> {
        self.sectors.iter().map(|s| &s.charge)
    }
}

/// `ψ^α` (twisted) or `ψ̲^α` (simple): `(ψ^α Ψ)_{α+λ} = ε(α,λ) Ψ_λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOperator {
    pub alpha: Charge,
    pub twisted: bool,
}

impl ShiftOperator {
    pub fn twisted(alpha: Charge) -> Self {
        ShiftOperator { alpha, twisted: true }
    }

    pub fn simple(alpha: Charge) -> Self {
        ShiftOperator { alpha, twisted: false }
    }

    /// Target sector and sign on sector `λ`; `None` outside the box.
    pub fn act<F: RealScalar>(&self, x: &ExtensionSpace<F>, lambda: &Charge) -> Option<(Charge, i8)> {
        let t = self.alpha.add(lambda);
        if !x.contains(&t) || !x.contains(lambda) {
            return None;
        }
        let s = if self.twisted { x.cocycle.eval(&self.alpha, lambda) } else { 1 };
        Some((t, s))
    }

    /// Sectors whose image stays in the box.
    pub fn domain<F: RealScalar>(&self, x: &ExtensionSpace<F>) -> Vec<Charge> {
        x.charges().filter(|l| self.act(x, l).is_some()).cloned().collect()
    }
}

/// Sector-wise action of a product of shifts, applied right to left.
fn act_chain<F: RealScalar>(x: &ExtensionSpace<F>, ops: &[ShiftOperator], lambda: &Charge) -> Option<(Charge, i8)> {
    let mut cur = lambda.clone();
    let mut sign = 1i8;
    for op in ops.iter().rev() {
        let (t, s) = op.act(x, &cur)?;
        cur = t;
        sign *= s;
    }
    Some((cur, sign))
}

/// Commutation, adjoint, identity, twisted-versus-simple and `c_α`
/// exchange laws on charges of the sub-box of radius `inner`.
pub fn verify_shift_laws<F: RealScalar>(x: &ExtensionSpace<F>, inner: i64) -> Report {
    let mut rep = Report::new("net2d");
    let l = &x.lattice;
    let eps = &x.cocycle;
    let small = enumerate_box(l.rank(), inner);
    let all: Vec<Charge> = x.charges().cloned().collect();
    let pairs: Vec<(Charge, Charge)> =
        small.iter().flat_map(|a| small.iter().map(move |b| (a.clone(), b.clone()))).collect();

    // ψ^α ψ^β = (-1)^{(α|β)} ψ^β ψ^α and ψ^α ψ^β (ψ^α)⁻¹ (ψ^β)⁻¹ = (-1)^{(α|β)},
    // with (ψ^α)⁻¹ = ε(α,α) ψ^{-α}
    let comm = pairs.par_iter().find_map_first(|(a, b)| {
        let (pa, pb) = (ShiftOperator::twisted(a.clone()), ShiftOperator::twisted(b.clone()));
        let (na, nb) = (ShiftOperator::twisted(a.neg()), ShiftOperator::twisted(b.neg()));
        let sgn: i8 = if l.indef_pairing(a, b).rem_euclid(2) == 1 { -1 } else { 1 };
        all.iter().find_map(|lam| {
            let ab = act_chain(x, &[pa.clone(), pb.clone()], lam);
            let ba = act_chain(x, &[pb.clone(), pa.clone()], lam);
            if let (Some((t1, s1)), Some((t2, s2))) = (&ab, &ba) {
                if t1 != t2 || *s1 != sgn * s2 {
                    return Some(Witness::new().coords("alpha", &a.0).coords("beta", &b.0).coords("lambda", &lam.0));
                }
            }
            let g = act_chain(x, &[pa.clone(), pb.clone(), na.clone(), nb.clone()], lam);
            match g {
                Some((t, s)) if t != *lam || s * eps.eval(a, a) * eps.eval(b, b) != sgn => Some(
                    Witness::new()
                        .coords("alpha", &a.0)
                        .coords("beta", &b.0)
                        .coords("lambda", &lam.0)
                        .with("group-commutator", s),
                ),
                _ => None,
            }
        })
    });
    rep.push(Check::from_witness("shift-commutation", "field-comm", comm));

    // ⟨Φ_{λ+α}, (ψ^α Ψ)_{λ+α}⟩ = ⟨(ε(α,α) ψ^{-α} Φ)_λ, Ψ_λ⟩ with sector-orthonormal blocks
    let adj = small.iter().find_map(|a| {
        let p = ShiftOperator::twisted(a.clone());
        let n = ShiftOperator::twisted(a.neg());
        let saa = eps.eval(a, a);
        all.iter().find_map(|lam| {
            let (t, s) = p.act(x, lam)?;
            let (back, s2) = n.act(x, &t)?;
            (back != *lam || s != saa * s2).then(|| Witness::new().coords("alpha", &a.0).coords("lambda", &lam.0))
        })
    });
    rep.push(Check::from_witness("shift-adjoint", "fieldstar", adj));

    let zero = Charge::zero(l.rank());
    let id = all.iter().find(|lam| ShiftOperator::twisted(zero.clone()).act(x, lam) != Some(((*lam).clone(), 1)));
    rep.push(Check::from_witness("shift-identity", "shift-field", id.map(|lam| Witness::new().coords("lambda", &lam.0))));

    let ts = small.iter().find_map(|a| {
        all.iter().find_map(|lam| {
            let t = ShiftOperator::twisted(a.clone()).act(x, lam)?;
            let s = ShiftOperator::simple(a.clone()).act(x, lam)?;
            (t.0 != s.0 || t.1 != s.1 * eps.eval(a, lam))
                .then(|| Witness::new().coords("alpha", &a.0).coords("lambda", &lam.0))
        })
    });
    rep.push(Check::from_witness("twisted-vs-simple", "simple-shift", ts));

    // c_α z^{β(0)} = z^{-(pα,pβ)} z̄^{-(p̄α,p̄β)} z^{β(0)} c_α as offset bookkeeping
    let cz = pairs.iter().find_map(|(a, b)| {
        all.iter().find_map(|lam| {
            let t = a.add(lam);
            if !x.contains(&t) {
                return None;
            }
            let lhs = (l.chiral_pairing(b, lam), l.antichiral_pairing(b, lam));
            let rhs = (
                l.chiral_pairing(b, &t) - l.chiral_pairing(a, b),
                l.antichiral_pairing(b, &t) - l.antichiral_pairing(a, b),
            );
            (!(lhs.0.approx_eq(&rhs.0) && lhs.1.approx_eq(&rhs.1)))
                .then(|| Witness::new().coords("alpha", &a.0).coords("beta", &b.0).coords("lambda", &lam.0))
        })
    });
    rep.push(Check::from_witness("c-z-exchange", "comm-c-z", cz));

    // α(m) c_β = c_β (α(m) + (α,β) δ_{m,0}) on the chiral factor
    let cur = pairs.iter().find_map(|(a, b)| {
        let sec = x.sector(&Charge::zero(l.rank()))?;
        let tgt = x.sector(b)?;
        (-2..=2).find_map(|m| {
            let pa = l.chiral_part(a);
            let lhs = mode_operator(&tgt.chiral, &pa, m);
            let mut rhs = mode_operator(&sec.chiral, &pa, m);
            if m == 0 {
                rhs = rhs.add(&GradedOperator::identity(sec.chiral.len()).scale(&l.chiral_pairing(a, b)));
            }
            lhs.diff_on_window(&rhs, &sec.chiral.basis)
                .map(|w| window_witness(&sec.chiral.basis, w).coords("alpha", &a.0).coords("beta", &b.0).with("m", m))
        })
    });
    rep.push(Check::from_witness("current-shift", "comm-c-z", cur));
    rep
}

/// `L_m c_α = c_α (L_m + pα(m)) + ½(pα,pα) δ_{m,0} c_α` per sector and side.
pub fn verify_l_shift<F: RealScalar>(x: &ExtensionSpace<F>, alpha: &Charge, m: i64) -> Report {
    let mut rep = Report::new("net2d");
    let l = &x.lattice;
    let half = F::from_rational(&rat(1, 2));
    for side in [Side::Chiral, Side::Antichiral] {
        let pa = match side {
            Side::Chiral => l.chiral_part(alpha),
            Side::Antichiral => l.antichiral_part(alpha),
        };
        let norm = crate::linalg::dot(&pa, &pa) * half.clone();
        let c = ShiftOperator::twisted(alpha.clone());
        let bad = x.sectors.iter().find_map(|s| {
            let (t, sign) = c.act(x, &s.charge)?;
            let tgt = x.sector(&t)?;
            let (src_m, tgt_m) = match side {
                Side::Chiral => (&s.chiral, &tgt.chiral),
                Side::Antichiral => (&s.antichiral, &tgt.antichiral),
            };
            let e = F::from_int(sign as i64);
            let lhs = sugawara(tgt_m, m).scale(&e);
            let mut rhs = sugawara(src_m, m).add(&mode_operator(src_m, &pa, m));
            if m == 0 {
                rhs = rhs.add(&GradedOperator::identity(src_m.len()).scale(&norm));
            }
            let rhs = rhs.scale(&e);
            lhs.diff_on_window(&rhs, &src_m.basis)
                .map(|w| window_witness(&src_m.basis, w).coords("lambda", &s.charge.0))
        });
        let name = match side {
            Side::Chiral => "chiral",
            Side::Antichiral => "antichiral",
        };
        rep.push(Check::from_witness(format!("L-shift-{name}[{alpha},m={m}]"), "L-shift", bad));
    }
    rep
}

/// Integrality of `(pλ,pλ)/2 - (p̄λ,p̄λ)/2` and of the spectrum of
/// `L_0 ⊗ 1 - 1 ⊗ L_0` on every sector.
pub fn spin_spectrum<F: RealScalar>(x: &ExtensionSpace<F>) -> Report {
    let mut rep = Report::new("net2d");
    let l = &x.lattice;
    let bad = x.sectors.par_iter().find_map_first(|s| {
        let (hp, hm) = s.minimal_bigrade();
        let spin = hp.clone() - hm.clone();
        let want = F::from_int(l.spin(&s.charge));
        if !spin.approx_eq(&want) || spin.to_integer().is_none() {
            return Some(Witness::new().coords("lambda", &s.charge.0).with("spin", &spin));
        }
        let lp = sugawara(&s.chiral, 0);
        let lm = sugawara(&s.antichiral, 0);
        let dp: Vec<F> = (0..s.chiral.len()).map(|i| lp.entry(i, i)).collect();
        let dm: Vec<F> = (0..s.antichiral.len()).map(|i| lm.entry(i, i)).collect();
        for a in &dp {
            for b in &dm {
                let v = a.clone() - b.clone();
                if v.to_integer().is_none() {
                    return Some(Witness::new().coords("lambda", &s.charge.0).with("eigenvalue", &v));
                }
            }
        }
        None
    });
    rep.push(Check::from_witness("spin-integrality", "spin", bad).with_note(format!("{} sectors", x.sectors.len())));
    rep
}

/// `Y_α = c_α Y̲_α` assembled over every box sector whose target stays in the box.
pub fn full_field<F: RealScalar>(x: &ExtensionSpace<F>, alpha: &Charge, k: i64) -> BigradedSeries<F> {
    let l = &x.lattice;
    let (pa, pm) = (l.chiral_part(alpha), l.antichiral_part(alpha));
    let c = ShiftOperator::twisted(alpha.clone());
    let blocks = x
        .sectors
        .par_iter()
        .filter_map(|s| {
            let (t, sign) = c.act(x, &s.charge)?;
            Some(SectorBlock {
                source: s.charge.clone(),
                target: t,
                sign,
                chiral: pre_vertex(&s.chiral, &pa, k),
                antichiral: pre_vertex(&s.antichiral, &pm, k),
            })
        })
        .collect();
    BigradedSeries { alpha: alpha.clone(), blocks }
}

/// `Σ_{r,s} f_{r,s} Y_{r,s}` on one source sector, as a list of
/// `(coefficient, chiral factor, antichiral factor)` tensor terms.
pub fn smear_full_field<F: RealScalar>(
    y: &BigradedSeries<F>,
    source: &Charge,
    f: &[(F, F, F)],
) -> Result<Vec<(F, GradedOperator<F>, GradedOperator<F>)>, crate::vertex::VertexError> {
    let mut out = Vec::new();
    for (r, s, c) in f {
        if let Some(b) = crate::vertex::fourier_component(y, source, r, s)? {
            out.push((c.clone() * F::from_int(b.sign as i64), b.chiral.clone(), b.antichiral.clone()));
        }
    }
    Ok(out)
}

/// Bigraded multiplicities sorted by `(h⁺, h⁻)`; approximately equal
/// bigrades are merged on the float backend.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable<F> {
    pub entries: Vec<(F, F, u128)>,
}

impl<F: RealScalar> CharacterTable<F> {
    pub fn get(&self, hp: &F, hm: &F) -> u128 {
        self.entries
            .iter()
            .find(|(a, b, _)| a.approx_eq(hp) && b.approx_eq(hm))
            .map_or(0, |e| e.2)
    }

    pub fn total(&self) -> u128 {
        self.entries.iter().map(|e| e.2).sum()
    }
}

/// Bigraded multiplicities `(h⁺ + i, h⁻ + j) ↦ count` over the box for
/// descendant levels `i + j <= level`.
pub fn character<F: RealScalar>(x: &ExtensionSpace<F>, level: usize) -> CharacterTable<F> {
    assert!(level <= x.cutoff);
    let mut raw: Vec<(F, F, u128)> = Vec::new();
    for s in &x.sectors {
        let (hp, hm) = s.minimal_bigrade();
        let (dp, dm) = (s.chiral.basis.grade_dimensions(), s.antichiral.basis.grade_dimensions());
        for i in 0..=level {
            for j in 0..=level - i {
                let n = dp[i] as u128 * dm[j] as u128;
                if n > 0 {
                    raw.push((hp.clone() + F::from_int(i as i64), hm.clone() + F::from_int(j as i64), n));
                }
            }
        }
    }
    raw.sort_by(|a, b| (&a.0, &a.1).partial_cmp(&(&b.0, &b.1)).expect("ordered bigrades"));
    let mut entries: Vec<(F, F, u128)> = Vec::new();
    for (a, b, n) in raw {
        match entries.last_mut() {
            Some(last) if last.0.approx_eq(&a) && last.1.approx_eq(&b) => last.2 += n,
            _ => entries.push((a, b, n)),
        }
    }
    CharacterTable { entries }
}

// ---------------------------------------------------------------------------
// Classification pipeline

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    /// Multiplicity one, no repeated charges.
    Multiplicity,
    /// Contains 0, closed under negation and under sums of halvable pairs.
    Closure,
    /// Lattice recognition.
    Recognition,
    /// Evenness of the recognized form.
    Evenness,
    /// Canonical cocycle and gauge.
    Emission,
}

#[derive(Clone, Debug)]
pub struct Verdict<F> {
    pub failed: Option<Stage>,
    pub detail: String,
    pub lattice: Option<Lattice<F>>,
    pub cocycle: Option<Cocycle>,
    /// Gauge relating an observed cocycle to the canonical one.
    pub gauge: Option<BTreeMap<Charge, Phase<Rational>>>,
}

impl<F> Verdict<F> {
    pub fn passed(&self) -> bool {
        self.failed.is_none()
    }

    fn fail(stage: Stage, detail: impl Into<String>) -> Self {
        Verdict { failed: Some(stage), detail: detail.into(), lattice: None, cocycle: None, gauge: None }
    }
}

fn find_vec<F: RealScalar>(sample: &[SplitVector<F>], v: &SplitVector<F>) -> Option<usize> {
    sample.iter().position(|w| w.flat().iter().zip(v.flat()).all(|(a, b)| a.approx_eq(&b)))
}

/// Observed cocycle on ambient sample vectors.
pub type ObservedCocycle<'a, F> = dyn Fn(&SplitVector<F>, &SplitVector<F>) -> Phase<Rational> + Sync + 'a;

pub fn classify_charges<F: RealScalar>(
    space: SplitSpace,
    sample: &[(SplitVector<F>, usize)],
    observed: Option<&ObservedCocycle<'_, F>>,
) -> Verdict<F> {
    // (a)
    if let Some((v, m)) = sample.iter().find(|(_, m)| *m != 1) {
        return Verdict::fail(Stage::Multiplicity, format!("multiplicity {m} at {:?}", flat_f64(v)));
    }
    let pts: Vec<SplitVector<F>> = sample.iter().map(|(v, _)| v.clone()).collect();
    for (i, v) in pts.iter().enumerate() {
        if find_vec(&pts[i + 1..], v).is_some() {
            return Verdict::fail(Stage::Multiplicity, format!("repeated charge {:?}", flat_f64(v)));
        }
    }

    // (b)
    if find_vec(&pts, &SplitVector::zero(space)).is_none() {
        return Verdict::fail(Stage::Closure, "0 missing from the sample");
    }
    if let Some(v) = pts.iter().find(|v| find_vec(&pts, &v.neg()).is_none()) {
        return Verdict::fail(Stage::Closure, format!("not closed under negation at {:?}", flat_f64(v)));
    }
    let two = F::from_int(2);
    let halvable: Vec<&SplitVector<F>> = pts.iter().filter(|v| find_vec(&pts, &v.scale(&two)).is_some()).collect();
    for a in &halvable {
        for b in &halvable {
            if find_vec(&pts, &a.add(b)).is_none() {
                return Verdict::fail(
                    Stage::Closure,
                    format!("sum of {:?} and {:?} missing", flat_f64(a), flat_f64(b)),
                );
            }
        }
    }

    // (c)
    let Some(rec) = recognize_lattice(space, &pts) else {
        return Verdict::fail(Stage::Recognition, "sample is not discrete at its own scale");
    };

    // (d)
    let lat = match rec.clone().into_lattice() {
        Ok(l) => l,
        Err(e @ (LatticeError::OddNorm { .. } | LatticeError::NonIntegralPairing { .. })) => {
            return Verdict::fail(Stage::Evenness, e.to_string())
        }
        Err(e) => return Verdict::fail(Stage::Recognition, e.to_string()),
    };
    let odd = rec.coordinates.iter().find(|c| lat.indef_pairing(c, c).rem_euclid(2) == 1);
    if let Some(c) = odd {
        return Verdict::fail(Stage::Evenness, format!("odd norm at {c}"));
    }

    // (e)
    let cocycle = build_cocycle(&lat);
    let mut gauge = None;
    if let Some(obs) = observed {
        // largest coordinate box inside the sample
        let mut radius = 0;
        while radius < 8 {
            let next = radius + 1;
            if enumerate_box(lat.rank(), next).iter().all(|c| find_vec(&pts, &lat.ambient(c)).is_some()) {
                radius = next;
            } else {
                break;
            }
        }
        if radius == 0 {
            return Verdict::fail(Stage::Emission, "sample contains no coordinate box for gauge fixing");
        }
        let c1 = |a: &Charge, b: &Charge| obs(&lat.ambient(a), &lat.ambient(b));
        let eps = crate::cocycle::cocycle_phase(&cocycle);
        let c1: &PhaseFn<'_> = &c1;
        match coboundary_solve(lat.rank(), c1, &eps, radius) {
            Ok(Some(chi)) => gauge = Some(chi),
            Ok(None) => return Verdict::fail(Stage::Emission, "observed cocycle has a different commutator"),
            Err(CoboundaryError::InconsistentSystem { alpha, beta }) => {
                return Verdict::fail(Stage::Emission, format!("observed data is not a cocycle at ({alpha}, {beta})"))
            }
        }
    }
    Verdict {
        failed: None,
        detail: format!("rank {} lattice, gram {:?}", lat.rank(), lat.gram_indef),
        lattice: Some(lat),
        cocycle: Some(cocycle),
        gauge,
    }
}

fn flat_f64<F: RealScalar>(v: &SplitVector<F>) -> Vec<f64> {
    v.flat().iter().map(RealScalar::to_f64).collect()
}

/// Classification verdict as a report record.
pub fn classification_check<F: RealScalar>(id: &str, v: &Verdict<F>, expect: Option<Stage>) -> Check {
    let ok = v.failed == expect;
    let w = (!ok).then(|| {
        Witness::new()
            .with("stage", format!("{:?}", v.failed))
            .with("expected", format!("{expect:?}"))
            .with("detail", &v.detail)
    });
    Check::from_witness(id, "classification", w).with_note(v.detail.clone())
}
