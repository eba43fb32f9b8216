use proptest::prelude::*;

use toric_core::arith::rat;
use toric_core::laurent::{self, BundleTriple, Equivalence, KoszulMode, LaurentMatrix, LaurentPoly};

/// `(i, j, c0, c1)`: add `(c0 + c1 x)` times row `j` to row `i`, with `x = t` or `t⁻¹`.
type Op = (usize, usize, i64, i64);

fn ops(n: usize, k: usize) -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, -2i64..=2), 0..=k)
}

fn elementary_product(n: usize, ops: &[Op], inverse_variable: bool) -> LaurentMatrix {
    let mut m = LaurentMatrix::identity(n);
    for &(i, j, c0, c1) in ops {
        if i == j {
            continue;
        }
        let d = if inverse_variable { -1 } else { 1 };
        let p = LaurentPoly::from_terms([(0, rat(c0, 1)), (d, rat(c1, 1))]);
        let rows = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            LaurentPoly::one()
                        } else if (a, b) == (i, j) {
                            p.clone()
                        } else {
                            LaurentPoly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        m = LaurentMatrix::new(rows).unwrap().mul(&m);
    }
    m
}

/// Size, splitting type, and row operations over `t` and `t⁻¹` for the matrix and its perturbation.
type Case = (usize, Vec<i64>, Vec<Op>, Vec<Op>, Vec<Op>, Vec<Op>);

fn case() -> impl Strategy<Value = Case> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(-2i64..=2, n), ops(n, 3), ops(n, 3), ops(n, 2), ops(n, 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splitting_type_is_a_two_sided_invariant((n, u, a, b, p, q) in case()) {
        let theta = elementary_product(n, &a, false).mul(&LaurentMatrix::diag_t(&u)).mul(&elementary_product(n, &b, true));
        let mut want = u.clone();
        want.sort_unstable_by(|x, y| y.cmp(x));
        let f = laurent::birkhoff_factorize(&theta).unwrap();
        prop_assert_eq!(&f.u, &want);
        prop_assert_eq!(f.sigma.mul(&theta).mul(&f.tau), LaurentMatrix::diag_t(&f.u));
        prop_assert!(f.sigma.is_over_t() && f.tau.is_over_t_inv());
        let pert = elementary_product(n, &p, false).mul(&theta).mul(&elementary_product(n, &q, true));
        prop_assert_eq!(laurent::birkhoff_factorize(&pert).unwrap().u, want);
        match laurent::equivalent_triples(&theta, &pert).unwrap() {
            Equivalence::Equivalent { left, right } => {
                prop_assert!(left.is_over_t() && right.is_over_t_inv());
                prop_assert_eq!(left.mul(&theta).mul(&right), pert);
            }
            Equivalence::Distinct { .. } => prop_assert!(false, "perturbation judged distinct"),
        }
    }

    #[test]
    fn determinant_is_multiplicative((n, u, a, b, _p, _q) in case()) {
        let x = elementary_product(n, &a, false).mul(&LaurentMatrix::diag_t(&u));
        let y = elementary_product(n, &b, true);
        prop_assert_eq!(x.mul(&y).det(), x.det().mul(&y.det()));
        let inv = x.inverse().unwrap();
        prop_assert_eq!(x.mul(&inv), LaurentMatrix::identity(n));
    }

    #[test]
    fn polarization_interval_brackets_the_type((n, u, a, b, _p, _q) in case()) {
        let theta = elementary_product(n, &a, false).mul(&LaurentMatrix::diag_t(&u)).mul(&elementary_product(n, &b, true));
        let (lo, hi) = laurent::polarization_interval(&BundleTriple::new(theta).unwrap()).unwrap();
        prop_assert_eq!(lo, *u.iter().min().unwrap());
        prop_assert_eq!(hi, *u.iter().max().unwrap());
    }
}

#[test]
fn distinct_types_are_not_equivalent() {
    let a = LaurentMatrix::diag_t(&[1, -1]);
    let b = LaurentMatrix::diag_t(&[0, 0]);
    match laurent::equivalent_triples(&a, &b).unwrap() {
        Equivalence::Distinct { u1, u2 } => assert_eq!((u1, u2), (vec![1, -1], vec![0, 0])),
        other => panic!("{other:?}"),
    }
}

#[test]
fn koszul_diagram_commutes() {
    let theta =
        LaurentMatrix::new(vec![vec![LaurentPoly::t_pow(1), LaurentPoly::one()], vec![LaurentPoly::zero(), LaurentPoly::t_pow(-1)]])
            .unwrap();
    for (name, ok) in laurent::koszul_identities(&theta) {
        assert!(ok, "{name}");
    }
    let tr = BundleTriple::new(theta).unwrap();
    assert_eq!(laurent::koszul_twist(&tr, KoszulMode::F1).rank(), 4);
    assert_eq!(laurent::koszul_twist(&tr, KoszulMode::F2).rank(), 2);
}

#[test]
fn singular_matrix_is_rejected() {
    let m =
        LaurentMatrix::new(vec![vec![LaurentPoly::t_pow(1), LaurentPoly::one()], vec![LaurentPoly::t_pow(1), LaurentPoly::one()]]).unwrap();
    assert!(laurent::birkhoff_factorize(&m).is_err());
    let non_unit = LaurentMatrix::diag(&[LaurentPoly::from_terms([(0, rat(1, 1)), (1, rat(1, 1))])]);
    assert!(laurent::birkhoff_factorize(&non_unit).is_err());
}
