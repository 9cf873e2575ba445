mod common;

use lattice_ext::braidcat::{braiding_2d, braiding_scalar, fuse, Chirality, SectorObject};
use lattice_ext::cocycle::{algebra_product, Cocycle, TwistedAlgebraElement};
use lattice_ext::fock::{build_module, colored_partition_counts};
use lattice_ext::lattice::{compactified_boson, enumerate_box, indef_pairing_int, recognize_lattice, Charge};
use lattice_ext::linalg::{int_determinant, IntMatrix};
use lattice_ext::scalar::{parity_sign, rat, Rational, RealScalar, Scalar};
use lattice_ext::vertex::{exp_half, verify_comm_e, Half};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{partition_oracle, random_even_gram, random_even_lattice};

fn gram_strategy() -> impl Strategy<Value = IntMatrix> {
    (1usize..=3, any::<u64>()).prop_map(|(r, seed)| random_even_gram(&mut ChaCha8Rng::seed_from_u64(seed), r, 6))
}

fn charge(rank: usize) -> impl Strategy<Value = Charge> {
    prop::collection::vec(-4i64..=4, rank).prop_map(Charge)
}

fn gram_and_charges() -> impl Strategy<Value = (IntMatrix, Charge, Charge, Charge)> {
    gram_strategy().prop_flat_map(|g| {
        let r = g.len();
        (Just(g), charge(r), charge(r), charge(r))
    })
}

proptest! {
    #[test]
    fn cocycle_is_bimultiplicative((g, a, b, c) in gram_and_charges()) {
        let e = Cocycle::from_gram(&g);
        prop_assert_eq!(e.eval(&a.add(&b), &c), e.eval(&a, &c) * e.eval(&b, &c));
        prop_assert_eq!(e.eval(&a, &b.add(&c)), e.eval(&a, &b) * e.eval(&a, &c));
    }

    #[test]
    fn cocycle_commutator_and_diagonal((g, a, b, _c) in gram_and_charges()) {
        let e = Cocycle::from_gram(&g);
        let ab = indef_pairing_int(&g, &a, &b) as i128;
        prop_assert_eq!(e.eval(&a, &b) * e.eval(&b, &a), parity_sign(ab));
        let aa = indef_pairing_int(&g, &a, &a) as i128;
        prop_assert_eq!(e.eval(&a, &a), parity_sign(aa / 2));
    }

    #[test]
    fn twisted_algebra_associative_and_unitary((g, a, b, c) in gram_and_charges()) {
        let e = Cocycle::from_gram(&g);
        let x = TwistedAlgebraElement::<Rational>::from_terms([(a.clone(), rat(2, 1)), (b.clone(), rat(-1, 3))]);
        let y = TwistedAlgebraElement::from_terms([(b.clone(), rat(1, 2)), (c.clone(), rat(5, 1))]);
        let z = TwistedAlgebraElement::from_terms([(c.clone(), rat(1, 1)), (a.clone(), rat(3, 7))]);
        let l = algebra_product(&e, &algebra_product(&e, &x, &y), &z);
        let r = algebra_product(&e, &x, &algebra_product(&e, &y, &z));
        prop_assert_eq!(l, r);
        // e_α is unitary: e_α e_α* = 1 with e_α* = ε(α,α) e_{-α}
        let ea = TwistedAlgebraElement::<Rational>::basis(a.clone());
        let star = TwistedAlgebraElement::from_terms([(a.neg(), Rational::from_integer(e.eval(&a, &a) as i128))]);
        let one = TwistedAlgebraElement::basis(Charge::zero(a.rank()));
        prop_assert_eq!(algebra_product(&e, &ea, &star), one);
        let u = algebra_product(&e, &ea, &TwistedAlgebraElement::basis(b.clone()));
        prop_assert_eq!(u.inner(&u), Rational::from_integer(1));
    }

    #[test]
    fn chiral_norms_split_the_form(seed in any::<u64>(), a in charge(3), b in charge(3)) {
        let l = random_even_lattice(&mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (Charge(a.0[..l.rank()].to_vec()), Charge(b.0[..l.rank()].to_vec()));
        let (p, m) = l.chiral_norms(&a);
        prop_assert_eq!(p - m, Rational::from_integer(l.indef_pairing(&a, &a) as i128));
        let d = l.chiral_pairing(&a, &b) - l.antichiral_pairing(&a, &b);
        prop_assert_eq!(d, Rational::from_integer(l.indef_pairing(&a, &b) as i128));
        prop_assert!(l.indef_pairing(&a, &a) % 2 == 0);
        let n = l.rank();
        let mut sum = l.gram_plus.clone();
        for i in 0..n {
            for j in 0..n {
                sum[(i, j)] = l.gram_plus[(i, j)] + l.gram_minus[(i, j)];
            }
        }
        prop_assert!(sum.leading_minors().iter().all(RealScalar::is_positive));
    }

    #[test]
    fn recognition_round_trip(seed in any::<u64>()) {
        let l = random_even_lattice(&mut ChaCha8Rng::seed_from_u64(seed));
        let box_ = l.enumerate_box(2);
        let sample: Vec<_> = box_.iter().map(|c| l.ambient(c)).collect();
        let rec = recognize_lattice(l.space, &sample).expect("discrete sample");
        prop_assert_eq!(rec.rank(), l.rank());
        let r = rec.clone().into_lattice().expect("even");
        prop_assert_eq!(int_determinant(&r.gram_indef).abs(), int_determinant(&l.gram_indef).abs());
        for (c, x) in rec.coordinates.iter().zip(&sample) {
            let back = r.ambient(c);
            prop_assert_eq!(back.flat(), x.flat());
        }
    }

    #[test]
    fn braiding_phases(n in -3i64..=3, m in -3i64..=3, p in -3i64..=3, q in -3i64..=3) {
        let l = compactified_boson(rat(2, 3));
        let (a, b) = (Charge(vec![n, m]), Charge(vec![p, q]));
        let plus = braiding_scalar(&l, &a, &b, Chirality::Plus);
        let minus = braiding_scalar(&l, &a, &b, Chirality::Minus);
        prop_assert!(plus.mul(&minus).is_one());
        let z = braiding_2d(&l, &a, &b);
        prop_assert!(z.mul(&z).is_one());
        prop_assert_eq!(z.as_sign(), Some(parity_sign((n * q + m * p) as i128)));
    }

    #[test]
    fn fusion_is_an_abelian_group(a in charge(2), b in charge(2), c in charge(2)) {
        let (a, b, c) = (SectorObject(a), SectorObject(b), SectorObject(c));
        prop_assert_eq!(fuse(&a, &b), fuse(&b, &a));
        prop_assert_eq!(fuse(&fuse(&a, &b), &c), fuse(&a, &fuse(&b, &c)));
        prop_assert!(fuse(&a, &a.conjugate()).is_identity());
        prop_assert_eq!(fuse(&a, &SectorObject::identity(2)), a);
    }
}

#[test]
fn colored_partitions_match_generating_function() {
    for d in 0..=4 {
        let want = partition_oracle(d, 10);
        assert_eq!(colored_partition_counts(d, 10), want, "d = {d}");
        if d <= 3 {
            let m = build_module::<Rational>(d, vec![Rational::zero(); d], 7).unwrap();
            let dims: Vec<u128> = m.basis.grade_dimensions().iter().map(|&n| n as u128).collect();
            assert_eq!(dims, want[..=7].to_vec());
        }
    }
}

#[test]
fn comm_e_detects_a_wrong_exponent() {
    let m = build_module::<Rational>(1, vec![Rational::zero()], 8).unwrap();
    let (a, b) = ([Rational::from_integer(1)], [Rational::from_integer(2)]);
    assert!(verify_comm_e(&m, &a, &b, 4).all_passed());
    // the same identity with (α,β) replaced by (α,β) + 1 must fail
    let p = exp_half(&m, &a, Half::Plus, 4);
    let q = exp_half(&m, &b, Half::Minus, 4);
    let wrong = Rational::from_integer(3);
    let failed = (0..=4i64).any(|x| {
        (0..=4i64).any(|y| {
            let mut lhs = lattice_ext::fock::GradedOperator::zero(m.len(), y - x);
            for n in 0..=x.min(y) {
                let c = lattice_ext::scalar::binomial(&-wrong, n as u32) * Rational::from_integer(parity_sign(n as i128) as i128);
                lhs = lhs.add(&p.coeffs[&-(x - n)].compose(&q.coeffs[&(y - n)]).scale(&c));
            }
            let rhs = q.coeffs[&y].compose(&p.coeffs[&-x]);
            lhs.diff_on_window(&rhs, &m.basis).is_some()
        })
    });
    assert!(failed);
}

#[test]
fn box_enumeration_order() {
    let b = enumerate_box(2, 1);
    assert_eq!(b.len(), 9);
    assert_eq!(b[0], Charge(vec![0, 0]));
    assert_eq!(b[1], Charge(vec![1, 0]));
    assert_eq!(b[2], Charge(vec![0, 1]));
}
