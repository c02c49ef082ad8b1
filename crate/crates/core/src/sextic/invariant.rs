//! The invariant lattice `M` of a singular type and the numbers derived
//! from it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::types::SingularType;
use super::SexticError;
use crate::lattice::{sublattice_index, DiscriminantGroup, Embedding, Lattice};
use crate::linalg::{self, hermite_normal_form, IntMatrix};
use crate::roots;

/// `M` together with the distinguished classes it is generated by.
///
/// Coordinates are always with respect to the Hermite basis of `M`, whose
/// vectors are stored doubled in the `(H, E_1, …, E_n)` basis of
/// `M_1 = ⟨2⟩ ⊕ ⟨-2⟩ⁿ`.
#[derive(Debug, Clone)]
pub struct InvariantLattice {
    pub singular_type: SingularType,
    pub lattice: Lattice,
    /// Row `i` is twice the `i`-th basis vector of `M` in `(H, E)` coordinates.
    pub basis_doubled: IntMatrix,
    pub class_h: Vec<BigInt>,
    pub class_e: Vec<Vec<BigInt>>,
    /// One class per component, `C_i = (d_i H - Σ_j a_ij E_j) / 2`.
    pub class_c: Vec<Vec<BigInt>>,
    /// `[M : M_1]`.
    pub index_over_m1: BigInt,
}

/// `⟨2⟩ ⊕ ⟨-2⟩ⁿ`.
pub fn lattice_m1(n: usize) -> Lattice {
    let mut d = vec![-2i64; n + 1];
    d[0] = 2;
    Lattice::new(IntMatrix::diagonal(&d)).expect("diagonal is symmetric")
}

/// Doubled `(H, E)` coordinates of `C_i`.
fn glue_doubled(t: &SingularType, component: usize) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(t.node_count() as usize + 1);
    v.push(BigInt::from(t.components()[component].degree));
    for node in t.nodes() {
        v.push(-BigInt::from(SingularType::coefficient(component, &node)));
    }
    v
}

/// Builds `M`, the overlattice of `M_1` generated by the classes `C_i`.
pub fn build_invariant_lattice(t: &SingularType) -> Result<InvariantLattice, SexticError> {
    let n = t.node_count() as usize;
    let l = t.num_components();
    let m1 = lattice_m1(n);

    // Generators in doubled coordinates: 2H, 2E_j and every C_i. C_l is
    // redundant given the others, and for l = 1 it lies in M_1 already.
    let mut gens = IntMatrix::identity(n + 1)
        .scale(&BigInt::from(2))
        .row_vecs();
    for i in 0..l {
        gens.push(glue_doubled(t, i));
    }
    let gens = IntMatrix::from_rows(gens, n + 1)?;
    let (h, _) = hermite_normal_form(&gens);
    let basis_doubled = h.select_rows(&(0..n + 1).collect::<Vec<_>>());
    debug_assert!((n + 1..h.rows()).all(|i| h.row(i).iter().all(Zero::is_zero)));

    let four = BigInt::from(4);
    let g4 = basis_doubled
        .mul(m1.gram())
        .and_then(|x| x.mul(&basis_doubled.transpose()))?;
    let mut gram = Vec::with_capacity((n + 1) * (n + 1));
    for x in g4.entries() {
        if !(x % &four).is_zero() {
            return Err(SexticError::NonIntegralGlue(t.descriptor()));
        }
        gram.push(x / &four);
    }
    let lattice = Lattice::new(IntMatrix::new(n + 1, n + 1, gram)?)?;

    let coords = |doubled: &[BigInt]| -> Result<Vec<BigInt>, SexticError> {
        linalg::row_coordinates(&basis_doubled, doubled)
            .and_then(|c| linalg::to_integral(&c))
            .ok_or_else(|| SexticError::NonIntegralGlue(t.descriptor()))
    };
    let unit = |k: usize| -> Vec<BigInt> {
        (0..n + 1)
            .map(|i| {
                if i == k {
                    BigInt::from(2)
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    };
    let class_h = coords(&unit(0))?;
    let class_e = (1..=n)
        .map(|j| coords(&unit(j)))
        .collect::<Result<Vec<_>, _>>()?;
    let class_c = (0..l)
        .map(|i| coords(&glue_doubled(t, i)))
        .collect::<Result<Vec<_>, _>>()?;

    let full = Embedding::full(lattice.clone());
    let mut m1_rows = vec![class_h.clone()];
    m1_rows.extend(class_e.iter().cloned());
    let m1_emb = Embedding::new(lattice.clone(), IntMatrix::from_rows(m1_rows, n + 1)?)?;
    let index_over_m1 = sublattice_index(&m1_emb, &full)?;

    Ok(InvariantLattice {
        singular_type: t.clone(),
        lattice,
        basis_doubled,
        class_h,
        class_e,
        class_c,
        index_over_m1,
    })
}

impl InvariantLattice {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn node_count(&self) -> usize {
        self.class_e.len()
    }

    /// `M_1 = ⟨H, E_1, …, E_n⟩` inside `M`.
    pub fn m1_embedding(&self) -> Embedding {
        let mut rows = vec![self.class_h.clone()];
        rows.extend(self.class_e.iter().cloned());
        Embedding::new(
            self.lattice.clone(),
            IntMatrix::from_rows(rows, self.rank()).expect("square"),
        )
        .expect("H and E_j are independent")
    }

    /// `Σ_i C_i - (3H - Σ_j E_j)` in `M` coordinates; zero for every valid
    /// type.
    pub fn glue_defect(&self) -> Vec<BigInt> {
        let r = self.rank();
        let mut v = vec![BigInt::zero(); r];
        for c in &self.class_c {
            for (x, y) in v.iter_mut().zip(c) {
                *x += y;
            }
        }
        for (k, x) in v.iter_mut().enumerate() {
            *x -= BigInt::from(3) * &self.class_h[k];
            for e in &self.class_e {
                *x += &e[k];
            }
        }
        v
    }

    /// Orthogonal complement of `H` in `M`, negative definite of rank `n`.
    pub fn h_perp(&self) -> Embedding {
        let h = Embedding::new(
            self.lattice.clone(),
            IntMatrix::from_rows(vec![self.class_h.clone()], self.rank()).expect("one row"),
        )
        .expect("H is nonzero");
        h.orthogonal_complement()
    }

    /// Converts `M` coordinates to rational `(H, E)` coordinates.
    pub fn to_m1_coordinates(&self, v: &[BigInt]) -> Vec<BigRational> {
        let d = self
            .basis_doubled
            .left_mul_vec(v)
            .expect("coordinate length");
        d.into_iter()
            .map(|x| BigRational::new(x, BigInt::from(2)))
            .collect()
    }

    pub fn discriminant_group(&self) -> DiscriminantGroup {
        self.lattice
            .discriminant_group()
            .expect("M has signature (1, n) and is nondegenerate")
    }
}

/// The numbers attached to a singular type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeInvariants {
    pub n: u32,
    /// `dim Σ - dim PSL(3) = (27 - n) - 8`.
    pub dim_moduli: i64,
    pub rank_m: usize,
    /// `k` with `A_M ≅ (Z/2)^k`; `None` if `A_M` is not elementary.
    pub disc_rank: Option<usize>,
    /// Set when `disc_rank` is absent.
    pub disc_diagnostic: Option<String>,
    /// Only defined for types with smooth components.
    pub baily_borel: Option<bool>,
    /// `rank Λ_T - 2` with `rank Λ_T = 22 - rank M`.
    pub period_domain_dim: i64,
    pub del_pezzo_degree: Option<u32>,
    pub branch_genus: Option<u32>,
}

pub const K3_RANK: i64 = 22;
const SEVERI_OFFSET: i64 = 27;
const PGL3_DIM: i64 = 8;

pub fn type_invariants(t: &SingularType) -> Result<TypeInvariants, SexticError> {
    let m = build_invariant_lattice(t)?;
    let n = t.node_count();
    let a = m.discriminant_group();
    let disc_rank = a.elementary_two_rank();
    let disc_diagnostic = disc_rank.is_none().then(|| {
        format!(
            "discriminant group {} is not elementary 2-abelian",
            a.describe()
        )
    });
    let del_pezzo = t.is_irreducible() && n <= 8;
    Ok(TypeInvariants {
        n,
        dim_moduli: SEVERI_OFFSET - i64::from(n) - PGL3_DIM,
        rank_m: m.rank(),
        disc_rank,
        disc_diagnostic,
        baily_borel: is_baily_borel(t).ok(),
        period_domain_dim: K3_RANK - m.rank() as i64 - 2,
        del_pezzo_degree: del_pezzo.then(|| 9 - n),
        branch_genus: del_pezzo.then(|| 10 - n),
    })
}

/// Whether the compactification of the stratum is Baily-Borel.
///
/// For unions of smooth curves the stratum closure contains a triple conic
/// exactly when every component has even degree, each degenerating to a
/// multiple of one conic. Types with nodal components are rejected.
pub fn is_baily_borel(t: &SingularType) -> Result<bool, SexticError> {
    if !t.has_smooth_components() {
        return Err(SexticError::BailyBorelUndefined(t.descriptor()));
    }
    Ok(t.components().iter().any(|c| c.degree % 2 == 1))
}

/// Outcome of enumerating the roots of `H^⊥ ⊂ M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    pub singular_type: SingularType,
    /// Number of roots found.
    pub enumerated: usize,
    /// `2n`, the count of `±E_j`.
    pub expected: usize,
    /// Roots that are not `±E_j`, in `M` coordinates.
    pub extra: Vec<Vec<BigInt>>,
    /// Indices `j` for which `E_j` or `-E_j` was not found.
    pub missing: Vec<usize>,
}

impl RootReport {
    pub fn passed(&self) -> bool {
        self.extra.is_empty() && self.missing.is_empty() && self.enumerated == self.expected
    }
}

/// Enumerates every root of `H^⊥ ⊂ M` and compares with `{±E_j}`.
pub fn verify_no_extra_roots(t: &SingularType) -> Result<RootReport, SexticError> {
    let m = build_invariant_lattice(t)?;
    let perp = m.h_perp();
    let found: Vec<Vec<BigInt>> = roots::roots(&perp.lattice())?
        .iter()
        .map(|r| perp.image_of(r))
        .collect();
    let neg = |v: &[BigInt]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let mut expected = Vec::new();
    for e in &m.class_e {
        expected.push(e.clone());
        expected.push(neg(e));
    }
    let extra = found
        .iter()
        .filter(|v| !expected.contains(v))
        .cloned()
        .collect();
    let missing = m
        .class_e
        .iter()
        .enumerate()
        .filter(|(_, e)| !found.contains(e) || !found.contains(&neg(e)))
        .map(|(j, _)| j)
        .collect();
    Ok(RootReport {
        singular_type: t.clone(),
        enumerated: found.len(),
        expected: expected.len(),
        extra,
        missing,
    })
}

/// `((E_{j1} + … + E_{jk}) / 2)²` for distinct indices, computed in
/// `M_1 ⊗ Q`.
pub fn half_sum_norm(n: usize, indices: &[usize]) -> BigRational {
    let m1 = lattice_m1(n);
    let mut v = vec![BigRational::zero(); n + 1];
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for &j in indices {
        v[j + 1] += &half;
    }
    m1.inner_rational(&v, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Signature;
    use crate::sextic::types::canonical_types;

    fn ty(s: &str) -> SingularType {
        s.parse().unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn smooth_sextic() {
        let m = build_invariant_lattice(&ty("6")).unwrap();
        assert_eq!(m.lattice.gram(), &IntMatrix::from_i64_rows(&[[2]]));
        assert_eq!(m.index_over_m1, big(1));
        // C_1 = 3H
        assert_eq!(m.class_c, vec![vec![big(3)]]);
        assert!(m.glue_defect().iter().all(Zero::is_zero));
    }

    #[test]
    fn line_plus_quintic() {
        let m = build_invariant_lattice(&ty("1,5")).unwrap();
        assert_eq!(m.rank(), 6);
        assert_eq!(m.index_over_m1, big(2));
        assert_eq!(m.discriminant_group().elementary_two_rank(), Some(4));
        assert_eq!(m.lattice.signature(), Signature::new(1, 5, 0));
    }

    #[test]
    fn three_conics() {
        let m = build_invariant_lattice(&ty("2,2,2")).unwrap();
        assert_eq!(m.rank(), 13);
        assert_eq!(m.index_over_m1, big(4));
        assert_eq!(m.discriminant_group().elementary_two_rank(), Some(9));
    }

    #[test]
    fn classes_have_expected_norms() {
        for t in canonical_types() {
            let m = build_invariant_lattice(&t).unwrap();
            assert!(m.lattice.is_even());
            assert_eq!(m.lattice.norm(&m.class_h), big(2));
            for (j, e) in m.class_e.iter().enumerate() {
                assert_eq!(m.lattice.norm(e), big(-2));
                assert!(m.lattice.inner(e, &m.class_h).is_zero());
                for f in &m.class_e[..j] {
                    assert!(m.lattice.inner(e, f).is_zero());
                }
            }
            assert!(m.glue_defect().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn invariants_rows() {
        let inv = type_invariants(&ty("3,3")).unwrap();
        assert_eq!((inv.n, inv.dim_moduli, inv.rank_m), (9, 10, 10));
        assert_eq!(inv.disc_rank, Some(8));
        assert_eq!(inv.baily_borel, Some(true));
        assert_eq!(inv.period_domain_dim, 10);

        let inv = type_invariants(&ty("2,4")).unwrap();
        assert_eq!((inv.n, inv.dim_moduli, inv.rank_m), (8, 11, 9));
        assert_eq!(inv.disc_rank, Some(7));
        assert_eq!(inv.baily_borel, Some(false));
        assert_eq!(inv.del_pezzo_degree, None);

        let inv = type_invariants(&ty("6[n=5]")).unwrap();
        assert_eq!(inv.n, 5);
        assert_eq!(inv.del_pezzo_degree, Some(4));
        assert_eq!(inv.branch_genus, Some(5));
        assert_eq!(inv.disc_rank, Some(6));
        assert_eq!(inv.baily_borel, None);
    }

    #[test]
    fn baily_borel_rule() {
        assert!(is_baily_borel(&ty("1,5")).unwrap());
        assert!(!is_baily_borel(&ty("2,2,2")).unwrap());
        assert!(!is_baily_borel(&ty("6")).unwrap());
        assert!(matches!(
            is_baily_borel(&ty("6[n=2]")),
            Err(SexticError::BailyBorelUndefined(_))
        ));
    }

    #[test]
    fn roots_small_cases() {
        let r = verify_no_extra_roots(&ty("6")).unwrap();
        assert_eq!(r.enumerated, 0);
        assert!(r.passed());
        let r = verify_no_extra_roots(&ty("1,5")).unwrap();
        assert_eq!(r.enumerated, 10);
        assert!(r.passed());
    }

    #[test]
    fn five_half_sum_is_too_short() {
        assert_eq!(
            half_sum_norm(5, &[0, 1, 2, 3, 4]),
            BigRational::new(big(-5), big(2))
        );
    }
}
