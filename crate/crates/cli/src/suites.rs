//! Suite dispatch over a validated lattice.

use lattice_ext::braidcat::{
    braiding_2d, braiding_scalar, fuse, nu_phase_check, verify_functor_coherence, Chirality, FunctorData, SectorObject,
    TrigPoly,
};
use lattice_ext::cocycle::{build_cocycle, verify_cocycle_laws};
use lattice_ext::fock::{
    build_module_with, colored_partition_counts, verify_algebra_relations, verify_energy_bounds, verify_parity,
    FockError, FockModule, Side,
};
use lattice_ext::lattice::{enumerate_box, is_maximal_even, rational_sublattice_vector, recognize_lattice, Charge, Lattice};
use lattice_ext::linalg::int_determinant;
use lattice_ext::net2d::{
    build_extension_with, character, classification_check, classify_charges, full_field, spin_spectrum,
    verify_l_shift, verify_shift_laws, ExtensionError, Stage,
};
use lattice_ext::report::{Check, Report, Witness};
use lattice_ext::scalar::{parity_sign, rat, RealScalar};
use lattice_ext::vertex::{verify_comm_e, verify_locality_phase, verify_primary};
use thiserror::Error;

use crate::config::{Cutoffs, RSquared};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

pub struct Ctx<'a, F> {
    pub lattice: &'a Lattice<F>,
    pub cutoffs: &'a Cutoffs,
    pub r_squared: Option<&'a RSquared>,
    pub budget: usize,
}

pub fn run<F: RealScalar>(name: &str, ctx: &Ctx<'_, F>) -> Result<Report, SuiteError> {
    let mut rep = match name {
        "lattice" => lattice_suite(ctx),
        "cocycle" => {
            let l = ctx.lattice;
            verify_cocycle_laws(&build_cocycle(l), &l.gram_indef, ctx.cutoffs.box_radius)
        }
        "fock" => fock_suite(ctx)?,
        "vertex" => vertex_suite(ctx)?,
        "net2d" => net2d_suite(ctx)?,
        "braidcat" => braidcat_suite(ctx),
        "classify" => classify_suite(ctx),
        _ => unreachable!("suite names are validated with the config"),
    };
    rep.name = name.to_string();
    Ok(rep)
}

fn tagged(r: Report, tag: &str) -> Vec<Check> {
    r.checks
        .into_iter()
        .map(|mut c| {
            c.id = format!("{}[{tag}]", c.id);
            c
        })
        .collect()
}

fn half(l: &Lattice<impl RealScalar>, side: Side) -> usize {
    match side {
        Side::Chiral => l.space.d_plus,
        Side::Antichiral => l.space.d_minus,
    }
}

fn part<F: RealScalar>(l: &Lattice<F>, side: Side, c: &Charge) -> Vec<F> {
    match side {
        Side::Chiral => l.chiral_part(c),
        Side::Antichiral => l.antichiral_part(c),
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Chiral => "chiral",
        Side::Antichiral => "antichiral",
    }
}

fn generators(rank: usize) -> Vec<Charge> {
    (0..rank).map(|i| Charge::unit(rank, i)).collect()
}

fn lattice_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Report {
    let l = ctx.lattice;
    let b = ctx.cutoffs.box_radius;
    let mut rep = Report::new("lattice");
    rep.push(Check::pass("gram", "even-lattice").with_note(format!("{:?}", l.gram_indef)));

    let charges = l.enumerate_box(b);
    let pairing = charges.iter().find_map(|a| {
        charges.iter().find_map(|c| {
            let d = l.chiral_pairing(a, c) - l.antichiral_pairing(a, c);
            (!d.approx_eq(&F::from_int(l.indef_pairing(a, c))))
                .then(|| Witness::new().coords("alpha", &a.0).coords("beta", &c.0).with("difference", &d))
        })
    });
    rep.push(Check::from_witness("indef-pairing", "indef-pairing", pairing));

    let half = F::from_rational(&rat(1, 2));
    let spin = charges.iter().find_map(|a| {
        let (p, m) = l.chiral_norms(a);
        let s = (p - m) * half.clone();
        (!s.approx_eq(&F::from_int(l.spin(a))) || s.to_integer().is_none())
            .then(|| Witness::new().coords("lambda", &a.0).with("spin", &s))
    });
    rep.push(Check::from_witness("spin", "spin", spin));

    rep.push(match is_maximal_even(&l.gram_indef) {
        Ok(m) => {
            let note = match &m.witness {
                None => "maximal".to_string(),
                Some(w) => format!("not maximal: glue vector {w:?} of norm {}", m.witness_norm.unwrap_or_default()),
            };
            Check::pass("maximality", "maximality").with_note(note)
        }
        Err(e) => Check::skipped("maximality", "maximality", e.to_string()),
    });

    rep.push(match ctx.r_squared {
        Some(RSquared::Exact(q)) => match rational_sublattice_vector(*q.numer(), *q.denom()) {
            Ok(c) if c.verified => Check::pass("rational-family", "rational-family")
                .with_note(format!("{} at coordinates {}", c.chiral_value, c.coords)),
            Ok(c) => Check::fail("rational-family", "rational-family", Witness::new().coords("coords", &c.coords.0)),
            Err(e) => Check::skipped("rational-family", "rational-family", e.to_string()),
        },
        _ => Check::skipped("rational-family", "rational-family", "R^2 not declared as a rational"),
    });

    let sample: Vec<_> = l.enumerate_box(b.min(2)).iter().map(|c| l.ambient(c)).collect();
    let rec = recognize_lattice(l.space, &sample);
    let w = match rec.map(|r| r.into_lattice()) {
        Some(Ok(r)) if r.rank() == l.rank()
            && int_determinant(&r.gram_indef).abs() == int_determinant(&l.gram_indef).abs() =>
        {
            None
        }
        Some(Ok(r)) => Some(Witness::new().with("recovered", format!("{:?}", r.gram_indef))),
        Some(Err(e)) => Some(Witness::new().with("error", e)),
        None => Some(Witness::new().with("error", "sample rejected as non-discrete")),
    };
    rep.push(Check::from_witness("recognition", "lattice-recognition", w));
    rep
}

fn modules<F: RealScalar>(ctx: &Ctx<'_, F>, cutoff: usize) -> Result<Vec<(String, FockModule<F>)>, FockError> {
    let l = ctx.lattice;
    let mut out = Vec::new();
    for side in [Side::Chiral, Side::Antichiral] {
        let d = half(l, side);
        if d == 0 {
            continue;
        }
        let mut weights = vec![("vacuum".to_string(), vec![F::zero(); d])];
        if l.rank() > 0 {
            let g = Charge::unit(l.rank(), 0);
            weights.push((format!("lambda={g}"), part(l, side, &g)));
        }
        for (tag, w) in weights {
            let m = build_module_with(side, d, w, cutoff, ctx.budget)?;
            out.push((format!("{},{tag}", side_name(side)), m));
        }
    }
    Ok(out)
}

fn fock_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Result<Report, SuiteError> {
    let e = ctx.cutoffs.energy;
    let half_e = (e / 2) as i64;
    let mut rep = Report::new("fock");
    for (tag, m) in modules(ctx, e)? {
        let d = m.dim();
        let units: Vec<Vec<F>> =
            (0..d).map(|i| (0..d).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect();
        rep.checks.extend(tagged(verify_algebra_relations(&m, half_e.min(3)), &tag));
        rep.checks.extend(tagged(verify_energy_bounds(&m, &units, half_e.min(4)), &tag));
        rep.checks.extend(tagged(verify_parity(&m, half_e.min(3)), &tag));
    }
    Ok(rep)
}

fn vertex_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Result<Report, SuiteError> {
    let l = ctx.lattice;
    let (e, k) = (ctx.cutoffs.energy, ctx.cutoffs.series_order);
    let mut rep = Report::new("vertex");
    let gens = generators(l.rank());
    let m0 = ((e / 2) as i64).min(2);
    let modes: Vec<i64> = (-m0..=m0).collect();
    for side in [Side::Chiral, Side::Antichiral] {
        let d = half(l, side);
        if d == 0 {
            continue;
        }
        let vac = build_module_with(side, d, vec![F::zero(); d], e, ctx.budget)?;
        for a in &gens {
            for b in &gens {
                let tag = format!("{},{a},{b}", side_name(side));
                rep.checks.extend(tagged(verify_comm_e(&vac, &part(l, side, a), &part(l, side, b), k.min(e)), &tag));
            }
            let tag = format!("{},{a}", side_name(side));
            rep.checks.extend(tagged(verify_primary(&vac, &part(l, side, a), &modes, k as i64), &tag));
        }
    }
    let eps = build_cocycle(l);
    let sectors = enumerate_box(l.rank(), ctx.cutoffs.box_radius);
    for a in &gens {
        for b in &gens {
            rep.extend(verify_locality_phase(l, &eps, a, b, k as i64, e, &sectors));
        }
    }
    Ok(rep)
}

fn net2d_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Result<Report, SuiteError> {
    let l = ctx.lattice;
    let e = ctx.cutoffs.energy;
    let x = build_extension_with(l, ctx.cutoffs.box_radius, e, ctx.budget)?;
    let mut rep = verify_shift_laws(&x, 1);
    let m0 = ((e / 2) as i64).min(2);
    let gens = generators(l.rank());
    for g in &gens {
        for a in [g.clone(), g.neg()] {
            for m in -m0..=m0 {
                rep.extend(verify_l_shift(&x, &a, m));
            }
        }
    }
    rep.extend(spin_spectrum(&x));

    // bigraded totals against colored-partition counts
    let level = e.min(4);
    let table = character(&x, level);
    let (cp, cm) = (colored_partition_counts(l.space.d_plus, level), colored_partition_counts(l.space.d_minus, level));
    let want: u128 = (0..=level).map(|i| (0..=level - i).map(|j| cp[i] * cm[j]).sum::<u128>()).sum::<u128>()
        * x.sectors.len() as u128;
    let w = (table.total() != want).then(|| Witness::new().with("table", table.total()).with("oracle", want));
    rep.push(Check::from_witness(format!("character-total[level={level}]"), "character", w));

    for a in &gens {
        let y = full_field(&x, a, ctx.cutoffs.series_order as i64);
        let bad = y.blocks.iter().find(|b| b.sign != x.cocycle.eval(a, &b.source)).map(|b| {
            Witness::new().coords("lambda", &b.source.0).with("sign", b.sign)
        });
        let vac = y.block(&Charge::zero(l.rank())).and_then(|b| {
            let (c, cbar) = (b.chiral.coeff(0)?, b.antichiral.coeff(0)?);
            Some(c.entry(0, 0) * cbar.entry(0, 0) * F::from_int(b.sign as i64))
        });
        let w = bad.or_else(|| match vac {
            Some(v) if v.approx_eq(&F::one()) => None,
            v => Some(Witness::new().with("vacuum-coefficient", format!("{v:?}"))),
        });
        rep.push(Check::from_witness(format!("full-field-signs[{a}]"), "def-wightman", w));
    }
    Ok(rep)
}

fn braidcat_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Report {
    let l = ctx.lattice;
    let b = ctx.cutoffs.box_radius;
    let mut rep = Report::new("braidcat");
    let charges = enumerate_box(l.rank(), b);
    let z = SectorObject::identity(l.rank());
    let fusion = charges.iter().find_map(|a| {
        let sa = SectorObject(a.clone());
        charges.iter().find_map(|c| {
            let sc = SectorObject(c.clone());
            let ok = fuse(&sa, &sc) == fuse(&sc, &sa) && fuse(&sa, &z) == sa && fuse(&sa, &sa.conjugate()) == z;
            (!ok).then(|| Witness::new().coords("a", &a.0).coords("b", &c.0))
        })
    });
    rep.push(Check::from_witness("fusion-group", "fusion", fusion));

    let braid = charges.iter().find_map(|a| {
        charges.iter().find_map(|c| {
            let p = braiding_scalar(l, a, c, Chirality::Plus);
            let m = braiding_scalar(l, a, c, Chirality::Minus);
            let two = braiding_2d(l, a, c);
            let sign = parity_sign(l.indef_pairing(a, c) as i128);
            let ok = p.mul(&m).is_one() && two.as_sign() == Some(sign);
            (!ok).then(|| Witness::new().coords("alpha", &a.0).coords("beta", &c.0))
        })
    });
    rep.push(Check::from_witness("braiding-phases", "braidingNdim", braid));

    let family = l.rank() == 2 && l.space.d_plus == 1 && l.space.d_minus == 1 && l.gram_indef == vec![vec![0, 1], vec![1, 0]];
    if family {
        rep.extend(verify_functor_coherence(&FunctorData::canonical(), l, b));
    } else {
        rep.push(Check::skipped("braided-condition", "braided-functor", "needs the rank-2 hyperbolic family on a 1+1 space"));
    }

    let r = ctx.r_squared.map_or(1.0, |r| r.to_f64().sqrt());
    let h = TrigPoly::new(1.0, vec![0.25, -0.125, 0.0625], vec![0.5, 0.0, -0.1]);
    let g = TrigPoly::new(1.0, vec![-0.3, 0.2], vec![0.1, 0.35, 0.05]);
    match nu_phase_check(&h, &g, r, 512, 1e-12) {
        Ok(r) => rep.extend(r),
        Err(e) => rep.push(Check::fail("nu-quadrature", "nu-phase", Witness::new().with("error", e))),
    }
    rep
}

fn classify_suite<F: RealScalar>(ctx: &Ctx<'_, F>) -> Report {
    let l = ctx.lattice;
    let mut rep = Report::new("classify");
    let sample: Vec<_> = l.enumerate_box(ctx.cutoffs.box_radius.min(3)).iter().map(|c| (l.ambient(c), 1)).collect();
    let v = classify_charges(l.space, &sample, None);
    let mut c = classification_check("round-trip", &v, None);
    if let Some(r) = &v.lattice {
        if int_determinant(&r.gram_indef).abs() != int_determinant(&l.gram_indef).abs() || r.rank() != l.rank() {
            c = Check::fail("round-trip", "classification", Witness::new().with("recovered", format!("{:?}", r.gram_indef)));
        }
    }
    rep.push(c);
    if sample.len() > 1 {
        let mut dup = sample.clone();
        dup[1].1 = 2;
        let v = classify_charges(l.space, &dup, None);
        rep.push(classification_check("duplicate-rejected", &v, Some(Stage::Multiplicity)));
    }
    rep
}
