//! Short vectors and roots in negative definite lattices.
//!
//! Enumeration negates the Gram matrix, takes an exact rational `LDLᵀ`
//! decomposition of the resulting positive definite form and walks the
//! Fincke-Pohst tree from the last coordinate down. Every bound is a
//! rational comparison, so no vector is lost to rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{Lattice, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error("lattice is not negative definite (signature {0})")]
    NotNegativeDefinite(Signature),
    #[error("norm target must be negative, got {0}")]
    BadTarget(BigInt),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// `φ(v, v) = target`.
    Exact,
    /// `target ≤ φ(v, v) < 0`.
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct ShortVectorQuery {
    pub lattice: Lattice,
    pub norm_target: BigInt,
    pub mode: NormMode,
}

impl ShortVectorQuery {
    pub fn exact(lattice: Lattice, norm_target: i64) -> Self {
        Self {
            lattice,
            norm_target: BigInt::from(norm_target),
            mode: NormMode::Exact,
        }
    }

    pub fn at_least(lattice: Lattice, norm_target: i64) -> Self {
        Self {
            lattice,
            norm_target: BigInt::from(norm_target),
            mode: NormMode::AtLeast,
        }
    }
}

/// `Q = Σ_i d_i (x_i + Σ_{j>i} μ_ij x_j)²` for the positive definite form `-G`.
struct Cholesky {
    d: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

fn cholesky(neg_gram: &[Vec<BigRational>]) -> Cholesky {
    let n = neg_gram.len();
    let mut a = neg_gram.to_vec();
    let mut d = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        d[i] = a[i][i].clone();
        for j in i + 1..n {
            mu[i][j] = &a[i][j] / &d[i];
        }
        for j in i + 1..n {
            for k in j..n {
                let t = &mu[i][j] * &a[i][k];
                a[j][k] -= t;
                a[k][j] = a[j][k].clone();
            }
        }
    }
    Cholesky { d, mu }
}

/// Integers `x` with `d (x - c)² ≤ r`, in increasing order.
fn admissible_range(c: &BigRational, r: &BigRational, d: &BigRational) -> Vec<BigInt> {
    if r.is_negative() {
        return Vec::new();
    }
    let t = r / d;
    // floor(sqrt(t)) = floor(sqrt(floor(t)))
    let s = t.floor().to_integer().sqrt();
    let base = c.floor().to_integer();
    let lo: BigInt = &base - &s - BigInt::one();
    let hi: BigInt = &base + &s + BigInt::from(2);
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi {
        let diff = BigRational::from_integer(x.clone()) - c;
        if &diff * &diff <= t {
            out.push(x.clone());
        }
        x += 1;
    }
    out
}

/// All nonzero `v` satisfying the query, sorted lexicographically.
///
/// The result is closed under negation.
pub fn short_vectors(q: &ShortVectorQuery) -> Result<Vec<Vec<BigInt>>, RootsError> {
    if !q.norm_target.is_negative() {
        return Err(RootsError::BadTarget(q.norm_target.clone()));
    }
    let l = &q.lattice;
    let n = l.rank();
    let sig = l.signature();
    if sig.negative != n {
        return Err(RootsError::NotNegativeDefinite(sig));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let neg: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            l.gram()
                .row(i)
                .iter()
                .map(|x| BigRational::from_integer(-x.clone()))
                .collect()
        })
        .collect();
    let ch = cholesky(&neg);
    let bound = BigRational::from_integer(-q.norm_target.clone());

    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    enumerate_level(&ch, n - 1, &bound, &BigRational::zero(), &mut x, &mut |v| {
        let norm = l.norm(v);
        let keep = match q.mode {
            NormMode::Exact => norm == q.norm_target,
            NormMode::AtLeast => norm >= q.norm_target,
        };
        if keep && v.iter().any(|c| !c.is_zero()) {
            out.push(v.to_vec());
        }
    });
    out.sort();
    Ok(out)
}

fn enumerate_level(
    ch: &Cholesky,
    level: usize,
    bound: &BigRational,
    partial: &BigRational,
    x: &mut [BigInt],
    emit: &mut impl FnMut(&[BigInt]),
) {
    let n = x.len();
    let mut center = BigRational::zero();
    for j in level + 1..n {
        if !x[j].is_zero() {
            center -= &ch.mu[level][j] * BigRational::from_integer(x[j].clone());
        }
    }
    let remaining = bound - partial;
    for xi in admissible_range(&center, &remaining, &ch.d[level]) {
        let diff = BigRational::from_integer(xi.clone()) - &center;
        let next = partial + &ch.d[level] * &diff * &diff;
        x[level] = xi;
        if level == 0 {
            emit(x);
        } else {
            enumerate_level(ch, level - 1, bound, &next, x, emit);
        }
    }
    x[level] = BigInt::zero();
}

/// Vectors of norm `-2`.
pub fn roots(l: &Lattice) -> Result<Vec<Vec<BigInt>>, RootsError> {
    short_vectors(&ShortVectorQuery {
        lattice: l.clone(),
        norm_target: -BigInt::from(2),
        mode: NormMode::Exact,
    })
}

/// Per-coordinate bound `|x_i| ≤ floor(sqrt(N · (Q⁻¹)_ii))` on vectors of
/// `Q`-norm at most `N`, where `Q = -G`. Useful for brute-force checks.
pub fn coordinate_bounds(l: &Lattice, norm_bound: &BigInt) -> Option<Vec<BigInt>> {
    let n = l.rank();
    let mut out = Vec::with_capacity(n);
    let neg = l.gram().scale(&-BigInt::one());
    for i in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[i] = BigRational::one();
        let col = crate::linalg::solve_rational(&neg, &e).ok()??;
        let t = &col[i] * BigRational::from_integer(norm_bound.clone());
        out.push(t.floor().to_integer().sqrt());
    }
    Some(out)
}
