use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sextic_lattice::linalg::{
    determinant, hermite_normal_form, invariant_factors, kernel_basis, rank, smith_normal_form,
    solve_rational, IntMatrix,
};

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn square(max: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max).prop_flat_map(move |n| {
        proptest::collection::vec(-bound..=bound, n * n).prop_map(move |v| {
            IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

fn is_unimodular(u: &IntMatrix) -> bool {
    determinant(u).unwrap().abs().is_one()
}

fn assert_hermite(h: &IntMatrix) {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for i in 0..h.rows() {
        let row = h.row(i);
        match row.iter().position(|x| !x.is_zero()) {
            None => seen_zero_row = true,
            Some(p) => {
                assert!(!seen_zero_row, "zero rows must come last");
                assert!(last_pivot.is_none_or(|q| p > q), "pivots strictly increase");
                assert!(row[p].is_positive());
                for k in 0..i {
                    let above = h.get(k, p);
                    assert!(
                        !above.is_negative() && above < &row[p],
                        "entry above pivot reduced"
                    );
                }
                last_pivot = Some(p);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermite_form_is_reduced_echelon(a in matrix(6, 6, 12)) {
        let (h, u) = hermite_normal_form(&a);
        prop_assert!(is_unimodular(&u));
        prop_assert_eq!(u.mul(&a).unwrap(), h.clone());
        assert_hermite(&h);
        let (h2, _) = hermite_normal_form(&h);
        prop_assert_eq!(h2, h);
    }

    #[test]
    fn smith_form_axioms(a in matrix(6, 6, 12)) {
        let (d, u, v) = smith_normal_form(&a);
        prop_assert!(is_unimodular(&u));
        prop_assert!(is_unimodular(&v));
        prop_assert_eq!(u.mul(&a).unwrap().mul(&v).unwrap(), d.clone());
        let k = d.rows().min(d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    prop_assert!(d.get(i, j).is_zero());
                }
            }
        }
        let diag: Vec<BigInt> = (0..k).map(|i| d.get(i, i).clone()).collect();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
        prop_assert_eq!(diag.iter().filter(|x| !x.is_zero()).count(), rank(&a));
        let (d2, _, _) = smith_normal_form(&d);
        prop_assert_eq!(d2, d);
    }

    #[test]
    fn smith_form_preserves_determinant_up_to_sign(a in square(6, 9)) {
        let (d, _, _) = smith_normal_form(&a);
        let det_a = determinant(&a).unwrap();
        let prod = (0..d.rows()).fold(BigInt::one(), |p, i| p * d.get(i, i));
        prop_assert_eq!(det_a.abs(), prod);
    }

    #[test]
    fn determinant_is_multiplicative(a in square(4, 6), seed in any::<u64>()) {
        let n = a.rows();
        let b = IntMatrix::new(
            n,
            n,
            (0..n * n)
                .map(|i| BigInt::from(((seed >> (i % 60)) & 7) as i64 - 3))
                .collect(),
        )
        .unwrap();
        let lhs = determinant(&a.mul(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, determinant(&a).unwrap() * determinant(&b).unwrap());
        prop_assert_eq!(determinant(&a.transpose()).unwrap(), determinant(&a).unwrap());
    }

    #[test]
    fn left_kernel_is_exact_and_saturated(a in matrix(6, 4, 5)) {
        let k = kernel_basis(&a);
        prop_assert_eq!(k.rows() + rank(&a), a.rows());
        if k.rows() > 0 {
            prop_assert!(k.mul(&a).unwrap().is_zero());
            // primitive: all invariant factors are 1
            prop_assert!(invariant_factors(&k).iter().all(One::is_one));
        }
    }

    #[test]
    fn rational_solve_satisfies_system(a in square(5, 7), x in proptest::collection::vec(-9i64..=9, 5)) {
        let n = a.rows();
        let x: Vec<BigInt> = x[..n].iter().copied().map(BigInt::from).collect();
        let b: Vec<BigRational> = (0..n)
            .map(|i| {
                let s: BigInt = a.row(i).iter().zip(&x).map(|(p, q)| p * q).sum();
                BigRational::from_integer(s)
            })
            .collect();
        let sol = solve_rational(&a, &b).unwrap().expect("consistent by construction");
        for (i, bi) in b.iter().enumerate() {
            let lhs: BigRational = a
                .row(i)
                .iter()
                .zip(&sol)
                .map(|(p, q)| BigRational::from_integer(p.clone()) * q)
                .sum();
            prop_assert_eq!(&lhs, bi);
        }
        if !determinant(&a).unwrap().is_zero() {
            let xr: Vec<BigRational> = x.into_iter().map(BigRational::from_integer).collect();
            prop_assert_eq!(sol, xr);
        }
    }
}
