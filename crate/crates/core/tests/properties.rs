use mmt_isotropy::isotropy::{self, IsotropyElement};
use mmt_isotropy::random::{self, SeededRng};
use mmt_isotropy::suite::{random_element, random_tensor, random_triple};
use mmt_isotropy::tensor::{
    apply_gl_action, build_mmt, decomposition_sum, identity_tensor, left_span_dim, right_span_dim,
    tau_map,
};
use mmt_isotropy::{Decomposition, FieldSpec, Mat, Perm3, RankOneTriple, Shape, Tensor2};
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Rationals),
        Just(FieldSpec::gf(2).unwrap()),
        Just(FieldSpec::gf(3).unwrap()),
        Just(FieldSpec::gf(5).unwrap()),
        Just(FieldSpec::gf(2_147_483_647).unwrap()),
    ]
}

fn shapes() -> impl Strategy<Value = Shape> {
    (1usize..=3, 1usize..=3, 1usize..=3).prop_map(|(m, n, p)| Shape::new(m, n, p).unwrap())
}

fn square_shapes() -> impl Strategy<Value = Shape> {
    (1usize..=3).prop_map(|k| Shape::new(k, k, k).unwrap())
}

fn rng(seed: u64) -> SeededRng {
    random::rng(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_round_trip(field in fields(), n in 1usize..=5, seed: u64) {
        let x = random::invertible(n, field, &mut rng(seed));
        let e = Mat::identity(n, field);
        prop_assert_eq!(x.mul(&x.inverse().unwrap()).unwrap(), e.clone());
        prop_assert_eq!(x.inverse().unwrap().mul(&x).unwrap(), e);
    }

    #[test]
    fn contragredient_is_multiplicative(field in fields(), n in 1usize..=4, seed: u64) {
        let mut r = rng(seed);
        let x = random::invertible(n, field, &mut r);
        let y = random::invertible(n, field, &mut r);
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(
            xy.contragredient().unwrap(),
            x.contragredient().unwrap().mul(&y.contragredient().unwrap()).unwrap()
        );
    }

    #[test]
    fn trace_pairing_is_invariant(field in fields(), a in 1usize..=4, b in 1usize..=4, seed: u64) {
        let mut r = rng(seed);
        let x = random::matrix(a, b, field, &mut r);
        let y = random::matrix(b, a, field, &mut r);
        let g1 = random::invertible(a, field, &mut r);
        let g2 = random::invertible(b, field, &mut r);
        let (g1i, g2i) = (g1.inverse().unwrap(), g2.inverse().unwrap());
        let gx = g1.mul(&x).unwrap().mul(&g2i).unwrap();
        let gy = g2.mul(&y).unwrap().mul(&g1i).unwrap();
        prop_assert_eq!(gx.trace_pairing(&gy).unwrap(), x.trace_pairing(&y).unwrap());
    }

    #[test]
    fn rank_invariance(field in fields(), rows in 1usize..=4, cols in 1usize..=4, seed: u64) {
        let mut r = rng(seed);
        let k = (seed as usize) % (rows.min(cols) + 1);
        let x = random::matrix_of_rank(rows, cols, k, field, &mut r);
        prop_assert_eq!(x.rank(), k);
        prop_assert_eq!(x.transpose().rank(), k);
        let a = random::invertible(rows, field, &mut r);
        let b = random::invertible(cols, field, &mut r);
        prop_assert_eq!(a.mul(&x).unwrap().mul(&b).unwrap().rank(), k);
    }

    #[test]
    fn span_dimensions(field in fields(), shape in shapes(), seed: u64) {
        let mut r = rng(seed);
        let Shape { m, n, p } = shape;
        let x = random::matrix_of_rank(m, n, (seed as usize) % (m.min(n) + 1), field, &mut r);
        prop_assert_eq!(left_span_dim(&x, shape).unwrap(), p * x.rank());
        let y = random::matrix_of_rank(n, p, (seed as usize / 7) % (n.min(p) + 1), field, &mut r);
        prop_assert_eq!(right_span_dim(&y, shape).unwrap(), m * y.rank());
    }

    #[test]
    fn delta_is_invariant(field in fields(), l in 1usize..=4, seed: u64) {
        let g = random::invertible(l, field, &mut rng(seed));
        let d = identity_tensor(l, field);
        prop_assert_eq!(apply_gl_action(&g, &d).unwrap(), d);
    }

    #[test]
    fn decomposition_sum_is_additive(field in fields(), shape in shapes(), k1 in 0usize..4, k2 in 0usize..4, seed: u64) {
        let mut r = rng(seed);
        let [(a, b), (c, d), (e, f)] = shape.factor_shapes();
        let mut term = || RankOneTriple::new(
            random::nonzero_matrix(a, b, field, &mut r),
            random::nonzero_matrix(c, d, field, &mut r),
            random::nonzero_matrix(e, f, field, &mut r),
        ).unwrap();
        let t1: Vec<_> = (0..k1).map(|_| term()).collect();
        let t2: Vec<_> = (0..k2).map(|_| term()).collect();
        let joined: Vec<_> = t1.iter().chain(&t2).cloned().collect();
        let sum = |ts: Vec<RankOneTriple>| decomposition_sum(&Decomposition::new(shape, field, ts).unwrap());
        prop_assert_eq!(sum(joined), sum(t1).add(&sum(t2)).unwrap());
    }

    #[test]
    fn homomorphism_and_inverse(field in fields(), shape in shapes(), seed: u64) {
        let mut r = rng(seed);
        let g = random_element(shape, field, &mut r);
        let h = random_element(shape, field, &mut r);
        for s in [build_mmt(shape, field), random_tensor(shape, field, &mut r)] {
            let gh = isotropy::compose(&g, &h).unwrap();
            prop_assert_eq!(
                isotropy::apply(&gh, &s).unwrap(),
                isotropy::apply(&g, &isotropy::apply(&h, &s).unwrap()).unwrap()
            );
            let back = isotropy::apply(&isotropy::invert(&g), &isotropy::apply(&g, &s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }

    #[test]
    fn associativity(field in fields(), shape in shapes(), seed: u64) {
        let mut r = rng(seed);
        let (g, h, k) = (
            random_element(shape, field, &mut r),
            random_element(shape, field, &mut r),
            random_element(shape, field, &mut r),
        );
        let left = isotropy::compose(&isotropy::compose(&g, &h).unwrap(), &k).unwrap();
        let right = isotropy::compose(&g, &isotropy::compose(&h, &k).unwrap()).unwrap();
        prop_assert!(isotropy::equal_mod_scalars(&left, &right));
    }

    #[test]
    fn normalize_is_idempotent_and_faithful(field in fields(), shape in shapes(), seed: u64) {
        let mut r = rng(seed);
        let g = random_element(shape, field, &mut r);
        let n = isotropy::normalize(&g);
        prop_assert_eq!(isotropy::normalize(&n), n.clone());
        prop_assert!(isotropy::equal_mod_scalars(&g, &n));
        let s = random_tensor(shape, field, &mut r);
        prop_assert_eq!(isotropy::apply(&g, &s).unwrap(), isotropy::apply(&n, &s).unwrap());
    }

    #[test]
    fn semidirect_structure(field in fields(), shape in square_shapes(), seed: u64) {
        let mut r = rng(seed);
        let g = random_element(shape, field, &mut r);
        let h = random_element(shape, field, &mut r);
        let rho_inv = isotropy::rho_element(g.pi().inverse(), shape, field).unwrap();
        prop_assert_eq!(isotropy::compose(&rho_inv, &g).unwrap().pi(), Perm3::Id);
        prop_assert_eq!(isotropy::compose(&g, &h).unwrap().pi(), g.pi().compose(h.pi()));
    }

    #[test]
    fn tau_is_equivariant(field in fields(), shape in shapes(), seed: u64) {
        let mut r = rng(seed);
        let Shape { m, n, p } = shape;
        let d = [m, n, p].map(|k| Tensor2::new(random::matrix(k, k, field, &mut r)).unwrap());
        let (a, b, c) = random_triple(shape, field, &mut r);
        let moved = tau_map(
            &apply_gl_action(&a, &d[0]).unwrap(),
            &apply_gl_action(&b, &d[1]).unwrap(),
            &apply_gl_action(&c, &d[2]).unwrap(),
        ).unwrap();
        let g = isotropy::small_element(a, b, c).unwrap();
        prop_assert_eq!(isotropy::apply(&g, &tau_map(&d[0], &d[1], &d[2]).unwrap()).unwrap(), moved);
    }
}

#[test]
fn mmt_has_mnp_unit_coefficients() {
    for field in [
        FieldSpec::Rationals,
        FieldSpec::gf(2).unwrap(),
        FieldSpec::gf(3).unwrap(),
    ] {
        for m in 1..=4 {
            for n in 1..=4 {
                for p in 1..=4 {
                    let shape = Shape::new(m, n, p).unwrap();
                    let t = build_mmt(shape, field);
                    let nz = t.nonzeros();
                    assert_eq!(nz.len(), m * n * p);
                    assert!(nz.iter().all(|(_, v)| v.is_one()));
                    let delta = |k| identity_tensor(k, field);
                    assert_eq!(tau_map(&delta(m), &delta(n), &delta(p)).unwrap(), t);
                }
            }
        }
    }
}

#[test]
fn q_relations() {
    let field = FieldSpec::gf(5).unwrap();
    for k in 2..=3 {
        let shape = Shape::new(k, k, k).unwrap();
        let rho = |pi| isotropy::rho_element(pi, shape, field).unwrap();
        let id = IsotropyElement::identity(shape, field);
        for pi in [Perm3::T12, Perm3::T13, Perm3::T23] {
            assert_eq!(isotropy::compose(&rho(pi), &rho(pi)).unwrap(), id);
        }
        for a in Perm3::ALL {
            for b in Perm3::ALL {
                assert_eq!(
                    isotropy::compose(&rho(a), &rho(b)).unwrap(),
                    rho(a.compose(b))
                );
            }
        }
    }
    // only the admissible transposition survives for a non-cubic shape
    let shape = Shape::new(2, 2, 3).unwrap();
    assert_eq!(Perm3::admissible(shape), vec![Perm3::Id, Perm3::T23]);
    let r = isotropy::rho_element(Perm3::T23, shape, field).unwrap();
    assert_eq!(
        isotropy::compose(&r, &r).unwrap(),
        IsotropyElement::identity(shape, field)
    );
}
