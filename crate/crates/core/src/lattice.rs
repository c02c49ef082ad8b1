//! Integral lattices given by a Gram matrix on a fixed basis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    self, determinant, hermite_normal_form, kernel_basis, row_coordinates, smith_normal_form,
    to_integral, IntMatrix, LinalgError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("lattice is degenerate (det = 0)")]
    Degenerate,
    #[error("twist factor must be nonzero")]
    ZeroTwist,
    #[error("vector is zero")]
    ZeroVector,
    #[error("vector has {got} coordinates, lattice has rank {rank}")]
    WrongLength { got: usize, rank: usize },
    #[error("basis rows are linearly dependent")]
    DependentBasis,
    #[error("embeddings live in different ambient lattices")]
    AmbientMismatch,
    #[error("sublattices span different rational subspaces")]
    SpanMismatch,
    #[error("inner lattice is not contained in outer lattice")]
    NotContained,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Inertia of a real symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize, null: usize) -> Self {
        Self {
            positive,
            negative,
            null,
        }
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;
    fn add(self, o: Signature) -> Signature {
        Signature::new(
            self.positive + o.positive,
            self.negative + o.negative,
            self.null + o.null,
        )
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.null == 0 {
            write!(f, "({}, {})", self.positive, self.negative)
        } else {
            write!(f, "({}, {}, {})", self.positive, self.negative, self.null)
        }
    }
}

/// A free abelian group of finite rank with a symmetric integral bilinear
/// form, stored as its Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: IntMatrix,
    even: bool,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("gram", &self.gram).finish()
    }
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        if !gram.is_square() {
            return Err(LinalgError::NotSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            }
            .into());
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        let even = (0..gram.rows()).all(|i| gram.get(i, i).is_even());
        Ok(Self { gram, even })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, LatticeError> {
        Self::new(IntMatrix::from_i64_rows(rows))
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.gram).expect("Gram matrix is square")
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    fn check_len(&self, v: usize) -> Result<(), LatticeError> {
        if v != self.rank() {
            return Err(LatticeError::WrongLength {
                got: v,
                rank: self.rank(),
            });
        }
        Ok(())
    }

    /// `φ(a, b)` for integer coordinate vectors.
    pub fn inner(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let ag = self.gram.left_mul_vec(a).expect("coordinate length");
        linalg::dot(&ag, b)
    }

    pub fn norm(&self, v: &[BigInt]) -> BigInt {
        self.inner(v, v)
    }

    /// `φ(a, b)` extended to rational coordinate vectors.
    pub fn inner_rational(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        let n = self.rank();
        let mut acc = BigRational::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            let mut row = BigRational::zero();
            for j in 0..n {
                let g = self.gram.get(i, j);
                if !g.is_zero() && !b[j].is_zero() {
                    row += &b[j] * BigRational::from_integer(g.clone());
                }
            }
            acc += &a[i] * row;
        }
        acc
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice {
            gram: self.gram.block_diag(&other.gram),
            even: self.even && other.even,
        }
    }

    /// The same group with form scaled by `t`.
    pub fn twist(&self, t: i64) -> Result<Lattice, LatticeError> {
        if t == 0 {
            return Err(LatticeError::ZeroTwist);
        }
        Lattice::new(self.gram.scale(&BigInt::from(t)))
    }

    /// Sylvester inertia via symmetric elimination over the rationals.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| linalg::to_rational(self.gram.row(i)))
            .collect();
        let mut sig = Signature::default();
        for k in 0..n {
            if a[k][k].is_zero() {
                let diag = (k + 1..n).find(|&i| !a[i][i].is_zero());
                let p = match diag {
                    Some(p) => p,
                    None => {
                        // All remaining diagonal entries vanish. Pick a nonzero
                        // off-diagonal a[i][j]; x_i += x_j makes a[i][i] = 2 a[i][j].
                        let Some((i, j)) = (k..n)
                            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                            .find(|&(i, j)| !a[i][j].is_zero())
                        else {
                            sig.null += n - k;
                            return sig;
                        };
                        for c in 0..n {
                            let t = a[j][c].clone();
                            a[i][c] += t;
                        }
                        for row in a.iter_mut() {
                            let t = row[j].clone();
                            row[i] += t;
                        }
                        i
                    }
                };
                a.swap(k, p);
                for row in a.iter_mut() {
                    row.swap(k, p);
                }
            }
            let pivot = a[k][k].clone();
            if pivot.is_positive() {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &pivot;
                for c in k..n {
                    let t = &f * &a[k][c];
                    a[i][c] -= t;
                }
                for row in a.iter_mut().skip(k) {
                    let t = &f * &row[k];
                    row[i] -= t;
                }
            }
        }
        sig
    }

    /// The finite group `L*/L` together with its discriminant forms.
    pub fn discriminant_group(&self) -> Result<DiscriminantGroup, LatticeError> {
        if self.determinant().is_zero() {
            return Err(LatticeError::Degenerate);
        }
        let (d, u, _) = smith_normal_form(&self.gram);
        let mut invariant_factors = Vec::new();
        let mut generators = Vec::new();
        for i in 0..d.rows() {
            let di = d.get(i, i);
            if di.is_one() {
                continue;
            }
            invariant_factors.push(di.clone());
            // u G v = D gives G^{-1} = v D^{-1} u, so row i of u over d_i is
            // a dual vector generating the i-th cyclic factor.
            generators.push(
                u.row(i)
                    .iter()
                    .map(|x| BigRational::new(x.clone(), di.clone()))
                    .collect::<Vec<_>>(),
            );
        }
        let one = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        let b_matrix = generators
            .iter()
            .map(|g| {
                generators
                    .iter()
                    .map(|h| reduce_mod(&self.inner_rational(g, h), &one))
                    .collect()
            })
            .collect();
        let q_values = self.even.then(|| {
            generators
                .iter()
                .map(|g| reduce_mod(&self.inner_rational(g, g), &two))
                .collect()
        });
        Ok(DiscriminantGroup {
            invariant_factors,
            generators,
            q_values,
            b_matrix,
            lattice: self.clone(),
        })
    }

    /// Gcd of `φ(v, w)` over all `w` in the lattice.
    pub fn divisibility(&self, v: &[BigInt]) -> Result<BigInt, LatticeError> {
        self.check_len(v.len())?;
        if v.iter().all(Zero::is_zero) {
            return Err(LatticeError::ZeroVector);
        }
        let row = self.gram.left_mul_vec(v)?;
        let g = linalg::gcd_all(&row);
        if g.is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(g)
    }

    /// Versioned text form: header, rank line, then one Gram row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{LATTICE_HEADER}\nrank {}\n", self.rank());
        s.push_str(&self.gram.to_string());
        s
    }

    pub fn from_text(text: &str) -> Result<Lattice, LatticeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, msg: &str| LatticeError::Parse {
            line,
            msg: msg.to_string(),
        };
        let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
        if header != LATTICE_HEADER {
            return Err(parse_err(
                ln,
                &format!("expected header `{LATTICE_HEADER}`"),
            ));
        }
        let (ln, rank_line) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "missing rank line"))?;
        let rank: usize = rank_line
            .strip_prefix("rank ")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| parse_err(ln, "expected `rank <n>`"))?;
        let mut data = Vec::with_capacity(rank * rank);
        for _ in 0..rank {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| parse_err(ln, "missing Gram row"))?;
            let entries: Vec<BigInt> = row
                .split_whitespace()
                .map(|t| t.parse::<BigInt>())
                .collect::<Result<_, _>>()
                .map_err(|e| parse_err(ln, &e.to_string()))?;
            if entries.len() != rank {
                return Err(parse_err(ln, &format!("expected {rank} entries")));
            }
            data.extend(entries);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing data"));
        }
        Lattice::new(IntMatrix::new(rank, rank, data)?)
    }
}

pub const LATTICE_HEADER: &str = "lattice-gram v1";

/// Representative of `r` modulo `m` in `[0, m)`.
pub fn reduce_mod(r: &BigRational, m: &BigRational) -> BigRational {
    let q = (r / m).floor();
    r - q * m
}

const E8_GRAM: &str = include_str!("../data/e8_gram.txt");

/// The hyperbolic plane `U`, Gram `[[0,1],[1,0]]`.
pub fn hyperbolic_plane() -> Lattice {
    Lattice::from_i64_rows(&[[0, 1], [1, 0]]).expect("symmetric")
}

/// `E8` in the simple-root basis; `negative = true` gives `E8(-1)`.
pub fn e8(negative: bool) -> Lattice {
    let pos = Lattice::from_text(E8_GRAM).expect("bundled E8 Gram matrix parses");
    if negative {
        pos.twist(-1).expect("nonzero twist")
    } else {
        pos
    }
}

pub fn rank_one(k: i64) -> Lattice {
    Lattice::from_i64_rows(&[[k]]).expect("1x1 is symmetric")
}

/// `U^3 ⊕ E8(-1)^2`, basis ordered `e1 f1 e2 f2 e3 f3` then the two `E8`
/// root bases.
pub fn k3_lattice() -> Lattice {
    let u = hyperbolic_plane();
    let e = e8(true);
    u.direct_sum(&u)
        .direct_sum(&u)
        .direct_sum(&e)
        .direct_sum(&e)
}

/// The finite abelian group `L*/L` with its discriminant forms.
///
/// Generators are rational coordinate vectors in the basis of the lattice
/// and depend on the Smith transform that produced them; only the
/// isomorphism class is canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantGroup {
    pub invariant_factors: Vec<BigInt>,
    pub generators: Vec<Vec<BigRational>>,
    /// `q(g) = φ(g, g)` in `[0, 2)`; present for even lattices.
    pub q_values: Option<Vec<BigRational>>,
    /// `b(g, h) = φ(g, h)` in `[0, 1)`.
    pub b_matrix: Vec<Vec<BigRational>>,
    lattice: Lattice,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Number of cyclic factors.
    pub fn length(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_elementary_two(&self) -> bool {
        let two = BigInt::from(2);
        self.invariant_factors.iter().all(|d| *d == two)
    }

    /// `k` such that the group is `(Z/2)^k`, if it is an elementary 2-group.
    pub fn elementary_two_rank(&self) -> Option<usize> {
        self.is_elementary_two().then(|| self.length())
    }

    /// Sorted `q`-values over every element of an elementary 2-group, or
    /// `None` when the lattice is odd or the group is not elementary.
    ///
    /// Capped at 20 generators.
    pub fn q_value_multiset(&self) -> Option<Vec<BigRational>> {
        if self.q_values.is_none() || !self.is_elementary_two() || self.length() > 20 {
            return None;
        }
        let k = self.length();
        let n = self.lattice.rank();
        let two = BigRational::from_integer(BigInt::from(2));
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u32..(1u32 << k) {
            let mut x = vec![BigRational::zero(); n];
            for (i, g) in self.generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (xc, gc) in x.iter_mut().zip(g) {
                        *xc += gc;
                    }
                }
            }
            out.push(reduce_mod(&self.lattice.inner_rational(&x, &x), &two));
        }
        out.sort();
        Some(out)
    }

    /// Isomorphism test for elementary 2-groups: equal invariant factors and
    /// equal multisets of `q` over all elements. Returns `None` outside that
    /// class, where the test is not decisive.
    pub fn same_form_as(&self, other: &DiscriminantGroup) -> Option<bool> {
        if self.invariant_factors != other.invariant_factors {
            return Some(false);
        }
        Some(self.q_value_multiset()? == other.q_value_multiset()?)
    }

    /// Multiset of `q` values of the negated form, for comparing `A_S` with
    /// `A_{S^⊥}` inside a unimodular lattice.
    pub fn negated_q_multiset(&self) -> Option<Vec<BigRational>> {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut v: Vec<_> = self
            .q_value_multiset()?
            .into_iter()
            .map(|q| reduce_mod(&-q, &two))
            .collect();
        v.sort();
        Some(v)
    }

    /// `(Z/2)^k` style rendering; falls back to a product of cyclic groups.
    pub fn describe(&self) -> String {
        if self.is_trivial() {
            return "0".to_string();
        }
        if let Some(k) = self.elementary_two_rank() {
            return format!("(Z/2)^{k}");
        }
        self.invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// A sublattice given by ambient coordinates of its basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    ambient: Lattice,
    basis: IntMatrix,
}

impl Embedding {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self, LatticeError> {
        if basis.cols() != ambient.rank() && basis.rows() > 0 {
            return Err(LatticeError::WrongLength {
                got: basis.cols(),
                rank: ambient.rank(),
            });
        }
        if linalg::rank(&basis) != basis.rows() {
            return Err(LatticeError::DependentBasis);
        }
        let basis = if basis.rows() == 0 {
            IntMatrix::zeros(0, ambient.rank())
        } else {
            basis
        };
        Ok(Self { ambient, basis })
    }

    /// The whole ambient lattice on its own basis.
    pub fn full(ambient: Lattice) -> Self {
        let n = ambient.rank();
        Self {
            ambient,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// The sublattice with its induced form `B G Bᵀ`.
    pub fn lattice(&self) -> Lattice {
        let g = self
            .basis
            .mul(self.ambient.gram())
            .and_then(|bg| bg.mul(&self.basis.transpose()))
            .expect("shapes agree");
        Lattice::new(g).expect("induced Gram is symmetric")
    }

    /// Primitive closure: ambient vectors with a nonzero multiple in the
    /// span of this sublattice.
    pub fn saturate(&self) -> Embedding {
        if self.rank() == 0 {
            return self.clone();
        }
        // Double kernel: vectors annihilating the annihilator of the rows.
        let ann = kernel_basis(&self.basis.transpose());
        let sat = if ann.rows() == 0 {
            IntMatrix::identity(self.ambient.rank())
        } else {
            kernel_basis(&ann.transpose())
        };
        Embedding {
            ambient: self.ambient.clone(),
            basis: sat,
        }
    }

    /// `{x : φ(x, s) = 0 for all s}`, always saturated.
    pub fn orthogonal_complement(&self) -> Embedding {
        let n = self.ambient.rank();
        if self.rank() == 0 {
            return Embedding::full(self.ambient.clone());
        }
        let gbt = self
            .ambient
            .gram()
            .mul(&self.basis.transpose())
            .expect("shapes agree");
        let k = kernel_basis(&gbt);
        Embedding {
            ambient: self.ambient.clone(),
            basis: if k.rows() == 0 {
                IntMatrix::zeros(0, n)
            } else {
                k
            },
        }
    }

    pub fn is_primitive(&self) -> bool {
        sublattice_index(self, &self.saturate())
            .map(|i| i.is_one())
            .unwrap_or(false)
    }

    /// Coordinates of an ambient vector in this sublattice's basis, if it
    /// belongs to the sublattice.
    pub fn coordinates_of(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if self.rank() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        to_integral(&row_coordinates(&self.basis, v)?)
    }

    /// Maps sublattice coordinates to ambient coordinates.
    pub fn image_of(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis.left_mul_vec(coords).expect("coordinate length")
    }

    /// The sum of two sublattices with independent spans.
    pub fn join(&self, other: &Embedding) -> Result<Embedding, LatticeError> {
        if self.ambient != other.ambient {
            return Err(LatticeError::AmbientMismatch);
        }
        Embedding::new(self.ambient.clone(), self.basis.vstack(&other.basis)?)
    }
}

/// Index `[outer : inner]` of two sublattices with the same rational span.
pub fn sublattice_index(inner: &Embedding, outer: &Embedding) -> Result<BigInt, LatticeError> {
    if inner.ambient != outer.ambient {
        return Err(LatticeError::AmbientMismatch);
    }
    if inner.rank() != outer.rank() {
        return Err(LatticeError::SpanMismatch);
    }
    if inner.rank() == 0 {
        return Ok(BigInt::one());
    }
    let mut coords = Vec::with_capacity(inner.rank());
    for i in 0..inner.rank() {
        let c =
            row_coordinates(&outer.basis, inner.basis.row(i)).ok_or(LatticeError::SpanMismatch)?;
        coords.push(to_integral(&c).ok_or(LatticeError::NotContained)?);
    }
    let m = IntMatrix::from_rows(coords, outer.rank())?;
    Ok(determinant(&m)?.abs())
}

/// Hermite-reduced copy of a sublattice basis.
pub fn reduced_basis(e: &Embedding) -> Embedding {
    let (h, _) = hermite_normal_form(&e.basis);
    let keep: Vec<usize> = (0..h.rows())
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .collect();
    Embedding {
        ambient: e.ambient.clone(),
        basis: h.select_rows(&keep),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| big(x)).collect()
    }

    fn diag_lattice(d: &[i64]) -> Lattice {
        Lattice::new(IntMatrix::diagonal(d)).unwrap()
    }

    #[test]
    fn k3_is_even_unimodular_of_signature_3_19() {
        let k3 = k3_lattice();
        assert_eq!(k3.rank(), 22);
        assert!(k3.is_even());
        assert_eq!(k3.determinant(), big(-1));
        assert!(k3.is_unimodular());
        assert_eq!(k3.signature(), Signature::new(3, 19, 0));
    }

    #[test]
    fn e8_data() {
        let e = e8(false);
        assert_eq!(e.determinant(), big(1));
        assert_eq!(e.signature(), Signature::new(8, 0, 0));
        assert_eq!(e8(true).signature(), Signature::new(0, 8, 0));
    }

    #[test]
    fn constructors() {
        let r = rank_one(2);
        assert_eq!(r.gram(), &IntMatrix::from_i64_rows(&[[2]]));
        let a = r.discriminant_group().unwrap();
        assert_eq!(a.invariant_factors, vec![big(2)]);

        let t = hyperbolic_plane().twist(3).unwrap();
        assert_eq!(t.gram(), &IntMatrix::from_i64_rows(&[[0, 3], [3, 0]]));
        assert_eq!(t.determinant(), big(-9));
        assert_eq!(hyperbolic_plane().twist(0), Err(LatticeError::ZeroTwist));
    }

    #[test]
    fn not_symmetric_rejected() {
        assert_eq!(
            Lattice::from_i64_rows(&[[0, 1], [2, 0]]),
            Err(LatticeError::NotSymmetric)
        );
    }

    #[test]
    fn signatures() {
        assert_eq!(
            diag_lattice(&[2, -2, -2, -2, -2, -2]).signature(),
            Signature::new(1, 5, 0)
        );
        assert_eq!(hyperbolic_plane().signature(), Signature::new(1, 1, 0));
        assert_eq!(
            diag_lattice(&[0, 3, 0]).signature(),
            Signature::new(1, 0, 2)
        );
        assert_eq!(
            Lattice::from_i64_rows(&[[0, 0, 1], [0, 0, 0], [1, 0, 0]])
                .unwrap()
                .signature(),
            Signature::new(1, 1, 1)
        );
    }

    #[test]
    fn discriminant_groups() {
        assert!(hyperbolic_plane()
            .discriminant_group()
            .unwrap()
            .is_trivial());

        let m1 = diag_lattice(&[2, -2, -2, -2, -2, -2]);
        let a = m1.discriminant_group().unwrap();
        assert_eq!(a.elementary_two_rank(), Some(6));
        assert_eq!(a.order(), m1.determinant().abs());

        let a = rank_one(2).discriminant_group().unwrap();
        assert_eq!(a.q_values, Some(vec![BigRational::new(big(1), big(2))]));

        assert_eq!(
            diag_lattice(&[2, 0]).discriminant_group(),
            Err(LatticeError::Degenerate)
        );
    }

    #[test]
    fn q_values_match_bilinear_diagonal() {
        let one = BigRational::one();
        for l in [
            diag_lattice(&[2, -2, -4]),
            hyperbolic_plane().twist(2).unwrap(),
            Lattice::from_i64_rows(&[[2, 1], [1, -4]]).unwrap(),
        ] {
            let a = l.discriminant_group().unwrap();
            let q = a.q_values.as_ref().unwrap();
            for (i, qi) in q.iter().enumerate() {
                assert_eq!(reduce_mod(qi, &one), a.b_matrix[i][i]);
            }
        }
    }

    #[test]
    fn saturation() {
        let u = hyperbolic_plane();
        let e = Embedding::new(u.clone(), IntMatrix::from_i64_rows(&[[2, 0]])).unwrap();
        assert!(!e.is_primitive());
        let s = e.saturate();
        assert_eq!(s.basis(), &IntMatrix::from_i64_rows(&[[1, 0]]));
        assert_eq!(sublattice_index(&e, &s).unwrap(), big(2));
        assert!(s.is_primitive());
        assert_eq!(s.saturate(), s);
    }

    #[test]
    fn complement_in_u() {
        let u = hyperbolic_plane();
        let e = Embedding::new(u, IntMatrix::from_i64_rows(&[[1, 1]])).unwrap();
        let c = e.orthogonal_complement();
        assert_eq!(c.rank(), 1);
        let row = c.basis().row(0);
        assert!(row == v(&[1, -1]).as_slice() || row == v(&[-1, 1]).as_slice());
        assert_eq!(c.lattice().gram(), &IntMatrix::from_i64_rows(&[[-2]]));
        assert!(c.is_primitive());

        let full = Embedding::full(hyperbolic_plane());
        assert_eq!(full.orthogonal_complement().rank(), 0);
    }

    #[test]
    fn complement_of_polarization_in_k3() {
        let k3 = k3_lattice();
        let mut h = vec![big(0); 22];
        h[0] = big(1);
        h[1] = big(1);
        let e = Embedding::new(k3, IntMatrix::from_rows(vec![h], 22).unwrap()).unwrap();
        let c = e.orthogonal_complement();
        let l0 = c.lattice();
        assert_eq!(l0.signature(), Signature::new(2, 19, 0));
        let a = l0.discriminant_group().unwrap();
        assert_eq!(a.invariant_factors, vec![big(2)]);
    }

    #[test]
    fn index_errors() {
        let u = hyperbolic_plane();
        let a = Embedding::new(u.clone(), IntMatrix::from_i64_rows(&[[1, 0]])).unwrap();
        let b = Embedding::new(u.clone(), IntMatrix::from_i64_rows(&[[0, 1]])).unwrap();
        assert_eq!(sublattice_index(&a, &b), Err(LatticeError::SpanMismatch));
        let half = Embedding::new(u.clone(), IntMatrix::from_i64_rows(&[[2, 0]])).unwrap();
        assert_eq!(sublattice_index(&a, &half), Err(LatticeError::NotContained));
        let full = Embedding::full(u.clone());
        let two = Embedding::new(u, IntMatrix::from_i64_rows(&[[2, 0], [0, 2]])).unwrap();
        assert_eq!(sublattice_index(&two, &full).unwrap(), big(4));
        assert_eq!(sublattice_index(&full, &full).unwrap(), big(1));
    }

    #[test]
    fn divisibility_values() {
        let u = hyperbolic_plane();
        assert_eq!(u.divisibility(&v(&[1, 0])).unwrap(), big(1));
        assert_eq!(u.divisibility(&v(&[2, 0])).unwrap(), big(2));
        assert_eq!(u.divisibility(&v(&[0, 0])), Err(LatticeError::ZeroVector));
        let m = diag_lattice(&[2, -2]);
        assert_eq!(m.divisibility(&v(&[0, 1])).unwrap(), big(2));
    }

    #[test]
    fn text_round_trip() {
        let k3 = k3_lattice();
        let text = k3.to_text();
        let back = Lattice::from_text(&text).unwrap();
        assert_eq!(back, k3);
        assert_eq!(back.to_text(), text);
        assert!(matches!(
            Lattice::from_text("lattice-gram v1\nrank 2\n1 0\n"),
            Err(LatticeError::Parse { .. })
        ));
        assert!(matches!(
            Lattice::from_text("lattice v9\n"),
            Err(LatticeError::Parse { line: 1, .. })
        ));
    }
}
