use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sextic_lattice::lattice::{
    e8, hyperbolic_plane, k3_lattice, sublattice_index, Embedding, Lattice, Signature,
};
use sextic_lattice::linalg::{determinant, invariant_factors, IntMatrix};

/// Symmetric matrices with even diagonal, rejecting degenerate ones.
fn even_gram(max: usize) -> impl Strategy<Value = Lattice> {
    (1..=max)
        .prop_flat_map(|n| proptest::collection::vec(-4i64..=4, n * n).prop_map(move |v| (n, v)))
        .prop_filter_map("degenerate", |(n, v)| {
            let mut g = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let x = if i == j {
                        2 * v[i * n + j]
                    } else {
                        v[i * n + j]
                    };
                    g[i][j] = x;
                    g[j][i] = x;
                }
            }
            Lattice::from_i64_rows(&g)
                .ok()
                .filter(|l| !l.determinant().is_zero())
        })
}

/// Product of elementary row operations; always unimodular.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut rows = IntMatrix::identity(n).row_vecs();
    for &(a, b, k) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            rows.swap(a, (a + 1) % n);
        } else {
            let src = rows[b].clone();
            for (x, y) in rows[a].iter_mut().zip(&src) {
                *x += BigInt::from(k) * y;
            }
        }
    }
    IntMatrix::from_rows(rows, n).unwrap()
}

fn change_basis(l: &Lattice, u: &IntMatrix) -> Lattice {
    Lattice::new(u.mul(l.gram()).unwrap().mul(&u.transpose()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn signature_is_a_basis_invariant(
        l in even_gram(6),
        ops in proptest::collection::vec((0usize..6, 0usize..6, -3i64..=3), 0..12),
    ) {
        let u = unimodular(l.rank(), &ops);
        let l2 = change_basis(&l, &u);
        prop_assert_eq!(l2.signature(), l.signature());
        prop_assert_eq!(l2.determinant(), l.determinant());
        let s = l.signature();
        prop_assert_eq!(s.null, 0);
        prop_assert_eq!(s.positive + s.negative, l.rank());
        // sign of the determinant is (-1)^negative
        prop_assert_eq!(l.determinant().is_negative(), s.negative % 2 == 1);
    }

    #[test]
    fn signature_adds_over_direct_sums(a in even_gram(4), b in even_gram(4)) {
        let s = a.direct_sum(&b);
        prop_assert_eq!(s.signature(), a.signature() + b.signature());
        prop_assert_eq!(s.determinant(), a.determinant() * b.determinant());
        let t = a.twist(-1).unwrap();
        prop_assert_eq!(t.signature().positive, a.signature().negative);
    }

    #[test]
    fn discriminant_group_matches_smith_form(l in even_gram(5)) {
        let a = l.discriminant_group().unwrap();
        prop_assert_eq!(a.order(), l.determinant().abs());
        let nontrivial: Vec<BigInt> = invariant_factors(l.gram())
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        prop_assert_eq!(a.invariant_factors.clone(), nontrivial);
        prop_assert_eq!(a.is_trivial(), l.is_unimodular());
    }

    #[test]
    fn discriminant_form_survives_basis_change(
        k in 1usize..5,
        ops in proptest::collection::vec((0usize..6, 0usize..6, -2i64..=2), 0..10),
    ) {
        // ⟨-2⟩^k ⊕ ⟨2⟩ has elementary discriminant (Z/2)^(k+1)
        let mut d = vec![-2i64; k];
        d.push(2);
        let l = Lattice::new(IntMatrix::diagonal(&d)).unwrap();
        let u = unimodular(k + 1, &ops);
        let l2 = change_basis(&l, &u);
        let (a, b) = (l.discriminant_group().unwrap(), l2.discriminant_group().unwrap());
        prop_assert_eq!(a.elementary_two_rank(), Some(k + 1));
        prop_assert_eq!(a.same_form_as(&b), Some(true));
    }

    #[test]
    fn complement_laws_in_a_unimodular_lattice(
        vecs in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 12), 1..4),
    ) {
        // U ⊕ U ⊕ E8(-1): even unimodular of signature (2, 10)
        let ambient = hyperbolic_plane().direct_sum(&hyperbolic_plane()).direct_sum(&e8(true));
        let rows: Vec<Vec<BigInt>> = vecs
            .iter()
            .map(|v| v.iter().copied().map(BigInt::from).collect())
            .collect();
        let basis = IntMatrix::from_rows(rows, 12).unwrap();
        prop_assume!(sextic_lattice::linalg::rank(&basis) == basis.rows());
        let s = Embedding::new(ambient.clone(), basis).unwrap().saturate();
        prop_assert!(s.is_primitive());
        let sl = s.lattice();
        prop_assume!(!sl.determinant().is_zero());
        let t = s.orthogonal_complement();
        prop_assert!(t.is_primitive());
        prop_assert_eq!(s.rank() + t.rank(), 12);
        let tl = t.lattice();
        prop_assert_eq!(sl.signature() + tl.signature(), Signature::new(2, 10, 0));
        prop_assert_eq!(sl.determinant().abs(), tl.determinant().abs());
        let whole = Embedding::full(ambient);
        let idx = sublattice_index(&s.join(&t).unwrap(), &whole).unwrap();
        prop_assert_eq!(&idx * &idx, sl.determinant().abs() * tl.determinant().abs());
        // S^⊥⊥ = S for primitive S
        let back = t.orthogonal_complement();
        prop_assert_eq!(sublattice_index(&s, &back).unwrap(), BigInt::one());
    }

    #[test]
    fn text_format_round_trips(l in even_gram(6)) {
        prop_assert_eq!(Lattice::from_text(&l.to_text()).unwrap(), l);
    }
}

#[test]
fn k3_lattice_is_even_unimodular_of_signature_3_19() {
    let k3 = k3_lattice();
    assert_eq!(k3.rank(), 22);
    assert!(k3.is_even());
    assert_eq!(determinant(k3.gram()).unwrap().abs(), BigInt::one());
    assert_eq!(k3.signature(), Signature::new(3, 19, 0));
}
