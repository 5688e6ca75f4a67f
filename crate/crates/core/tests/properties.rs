mod common;

use common::*;
use proptest::prelude::*;
use qball::haar::{
    coproduct, coproduct_with, counit, solve_invariance, CoproductConvention, HaarTable, TensorPair,
};
use qball::ncalg::{normal_form, normal_form_with_strategy, Gen, NcElement, Strategy as Order, Word, DEFAULT_BUDGET};
use qball::qdet::GlElement;
use qball::scalar::Scalar;
use qball::shilov::restrict;
use qball::szego::{apply_t, chi, kernel_factors, szego_kernel, Shape};
use std::collections::BTreeMap;

const N: u8 = 2;

fn letter() -> impl Strategy<Value = Gen> {
    (any::<bool>(), 1..=N, 1..=N).prop_map(|(s, c, r)| Gen { starred: s, col: c, row: r })
}

fn unstarred_letter() -> impl Strategy<Value = Gen> {
    (1..=N, 1..=N).prop_map(|(c, r)| Gen::z(c, r))
}

fn coeff() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -2i64..=2).prop_map(|(k, e)| &Scalar::from_int(k) * &Scalar::q_pow(e))
}

fn element(max_terms: usize, max_len: usize) -> impl Strategy<Value = NcElement> {
    prop::collection::vec((prop::collection::vec(letter(), 0..=max_len), coeff()), 1..=max_terms)
        .prop_map(|ts| normal_form(N, ts.into_iter().map(|(w, c)| (Word(w), c))).unwrap())
}

fn holomorphic(max_terms: usize, max_len: usize) -> impl Strategy<Value = NcElement> {
    prop::collection::vec((prop::collection::vec(unstarred_letter(), 0..=max_len), coeff()), 1..=max_terms)
        .prop_map(|ts| normal_form(N, ts.into_iter().map(|(w, c)| (Word(w), c))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rewriting_is_confluent(w in prop::collection::vec(letter(), 0..=7)) {
        let w = Word(w);
        let memo = normal_form(N, [(w.clone(), Scalar::one())]).unwrap();
        let left = normal_form_with_strategy(N, [(w.clone(), Scalar::one())], Order::Leftmost, DEFAULT_BUDGET).unwrap();
        let right = normal_form_with_strategy(N, [(w.clone(), Scalar::one())], Order::Rightmost, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(&memo, &left);
        prop_assert_eq!(&memo, &right);
        prop_assert!(memo.terms().keys().all(Word::is_normal));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_associative(x in element(3, 2), y in element(3, 2), z in element(3, 2)) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn involution_laws(x in element(3, 3), y in element(3, 2), c in coeff()) {
        prop_assert_eq!(x.star().star(), x.clone());
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
        prop_assert_eq!(x.scale(&c).star(), x.star().scale(&c));
    }

    #[test]
    fn restriction_is_a_star_homomorphism(x in element(2, 2), y in element(2, 2)) {
        let rx = restrict(&x).unwrap();
        let ry = restrict(&y).unwrap();
        prop_assert_eq!(restrict(&(&x * &y)).unwrap(), rx.multiply(&ry).unwrap());
        prop_assert_eq!(restrict(&x.star()).unwrap(), rx.star().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn coproduct_is_multiplicative_on_products(x in holomorphic(2, 2), y in holomorphic(2, 2)) {
        let gx = GlElement::new(x, 0).unwrap();
        let gy = GlElement::new(y, 0).unwrap();
        let lhs = coproduct(&gx.gl_multiply(&gy).unwrap()).unwrap();
        let rhs = coproduct(&gx).unwrap().multiply(&coproduct(&gy).unwrap()).unwrap();
        prop_assert!(lhs.equals(&rhs).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inner_product_is_symmetric(f in holomorphic(2, 2), g in holomorphic(2, 2)) {
        let t = HaarTable::global();
        prop_assert_eq!(t.inner_product(&f, &g).unwrap(), t.inner_product(&g, &f).unwrap());
    }
}

fn generators(n: u8) -> Vec<GlElement> {
    let mut v: Vec<GlElement> = (1..=n)
        .flat_map(|c| (1..=n).map(move |r| GlElement::z(n, c, r).unwrap()))
        .collect();
    v.push(GlElement::det_inverse(n));
    v
}

#[test]
fn both_coproduct_conventions_are_multiplicative_on_generators() {
    for conv in [CoproductConvention::RowToColumn, CoproductConvention::Transposed] {
        for x in generators(N) {
            for y in generators(N) {
                let lhs = coproduct_with(&x.gl_multiply(&y).unwrap(), conv).unwrap();
                let rhs = coproduct_with(&x, conv).unwrap().multiply(&coproduct_with(&y, conv).unwrap()).unwrap();
                assert!(lhs.equals(&rhs).unwrap(), "{conv:?}: {x} {y}");
            }
        }
    }
}

type Triple = BTreeMap<(Word, Word, Word), Scalar>;

fn add(t: &mut Triple, key: (Word, Word, Word), c: Scalar) {
    let e = t.entry(key.clone()).or_insert_with(Scalar::zero);
    *e += &c;
    if e.is_zero() {
        t.remove(&key);
    }
}

fn leg(w: &Word) -> GlElement {
    GlElement::new(NcElement::from_word(N, w.clone()).unwrap(), 0).unwrap()
}

#[test]
fn coproduct_is_coassociative_on_generators() {
    for c in 1..=N {
        for r in 1..=N {
            let d = coproduct(&GlElement::z(N, c, r).unwrap()).unwrap();
            let mut left = Triple::new();
            let mut right = Triple::new();
            for ((a, b), x) in d.terms() {
                for ((a1, a2), y) in coproduct(&leg(a)).unwrap().terms() {
                    add(&mut left, (a1.clone(), a2.clone(), b.clone()), x * y);
                }
                for ((b1, b2), y) in coproduct(&leg(b)).unwrap().terms() {
                    add(&mut right, (a.clone(), b1.clone(), b2.clone()), x * y);
                }
            }
            assert_eq!(left, right, "z[{c},{r}]");
        }
    }
}

#[test]
fn counit_is_a_counit() {
    let x = GlElement::new(&NcElement::z(N, 2, 1).unwrap() * &NcElement::z(N, 1, 2).unwrap(), 0)
        .unwrap()
        .gl_multiply(&GlElement::det_inverse(N))
        .unwrap();
    let d: TensorPair = coproduct(&x).unwrap();
    let eps = |w: &Word, k: u32| Ok(counit(&GlElement::new(NcElement::from_word(N, w.clone())?, k)?));
    assert_eq!(d.contract_left(eps).unwrap(), x);
    assert_eq!(d.contract_right(eps).unwrap(), x);
}

#[test]
fn haar_values_do_not_depend_on_the_coproduct_convention() {
    let a = HaarTable::new();
    let b = HaarTable::with_convention(CoproductConvention::Transposed);
    let f = &(&NcElement::zs(N, 2, 1).unwrap() * &NcElement::zs(N, 1, 2).unwrap())
        * &(&NcElement::z(N, 1, 1).unwrap() * &NcElement::z(N, 2, 2).unwrap());
    assert_eq!(a.integrate_boundary(&f).unwrap(), b.integrate_boundary(&f).unwrap());
    for (n, w, k, v) in a.entries() {
        assert_eq!(b.monomial(n, &w, k).unwrap(), v, "{w} detinv^{k}");
    }
}

#[test]
fn solver_forces_zero_off_degree_zero() {
    for (w, k) in [
        (vec![Gen::z(1, 1)], 1u32),
        (vec![Gen::z(1, 1), Gen::z(2, 2), Gen::z(1, 2)], 1),
        (vec![Gen::z(1, 2), Gen::z(2, 1)], 2),
        (vec![], 1),
    ] {
        let sol = solve_invariance(N, &Word(w.clone()), k, CoproductConvention::RowToColumn).unwrap();
        assert!(sol.values().all(Scalar::is_zero), "{w:?}");
        assert!(HaarTable::new().monomial(N, &Word(w), k).unwrap().is_zero());
    }
}

#[test]
fn haar_is_left_and_right_invariant_at_n3() {
    let t = HaarTable::new();
    let f = &NcElement::zs(3, 1, 2).unwrap() * &NcElement::z(3, 2, 1).unwrap();
    t.integrate_boundary(&f).unwrap();
    assert!(!t.is_empty());
    for (n, w, k, _) in t.entries() {
        assert!(t.left_invariant_at(n, &w, k).unwrap());
        assert!(t.right_invariant_at(n, &w, k).unwrap());
    }
}

#[test]
fn kernel_factors_commute() {
    let shape = Shape::new(2, None).unwrap();
    let f = kernel_factors(shape, 3).unwrap();
    assert_eq!(f.len(), 2);
    assert_eq!(f[0].multiply(&f[1]).unwrap(), f[1].multiply(&f[0]).unwrap());
}

#[test]
fn chi_commute_in_the_rectangular_case() {
    let shape = Shape::new(3, Some(2)).unwrap();
    let a = chi(shape, 1, 3).unwrap();
    let b = chi(shape, 2, 3).unwrap();
    assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
}

#[test]
fn reproduction_is_truncation_stable() {
    let t = HaarTable::new();
    let shape = Shape::new(2, None).unwrap();
    for w in shape.basis(2) {
        let f = NcElement::from_word(2, w.clone()).unwrap();
        let a = apply_t(&szego_kernel(shape, 2).unwrap(), &f, &t).unwrap();
        let b = apply_t(&szego_kernel(shape, 3).unwrap(), &f, &t).unwrap();
        assert_eq!(a, b, "{w}");
        assert_eq!(a, f, "{w}");
    }
}

#[test]
fn rank_one_oracle() {
    // on the circle h(z^a conj(z)^b) = δ_ab, so T z^m = z^m for the geometric kernel
    let t = HaarTable::new();
    for m in 0..=5 {
        let f = NcElement::from_word(1, Word(vec![Gen::z(1, 1); m])).unwrap();
        let k = szego_kernel(Shape::new(1, None).unwrap(), m.max(1)).unwrap();
        assert_eq!(apply_t(&k, &f, &t).unwrap(), f);
        for j in 0..=5 {
            let g = NcElement::from_word(1, Word(vec![Gen::z(1, 1); j])).unwrap();
            let ip = t.inner_product(&f, &g).unwrap();
            assert_eq!(ip, if j == m { Scalar::one() } else { Scalar::zero() });
        }
    }
}

#[test]
fn holomorphic_relations_are_sound_for_n1_to_3() {
    for n in 1..=3 {
        for (name, rel) in holomorphic_relations(n) {
            assert!(combine(n, &rel).is_zero(), "n={n}: {name}");
        }
    }
}
