//! Search for primitive embeddings of `M` into the K3 lattice.
//!
//! `H` is sent to `e + f` in the first hyperbolic plane. The exceptional
//! classes are then placed one at a time, in node order, on pairwise
//! orthogonal roots of `H^⊥`. Two facts make each extension cheap to test:
//!
//! * `M` is spanned by a lower-triangular basis in `(H, E_1, …, E_n)`
//!   coordinates, so when `E_j` is placed exactly one new basis vector
//!   becomes available and must land on an integral vector. For a glue
//!   vector this pins the class of `E_j` modulo `2Λ`.
//! * `|A_M|` is a power of two, so a sublattice `S ⊂ M` spanned by an
//!   initial segment of that basis is primitive in `Λ` iff its basis stays
//!   independent in `Λ / 2Λ`.
//!
//! Unconstrained steps draw from a fixed pool of short roots; glue steps
//! enumerate small roots of the forced class directly. The first pass is
//! a plain lexicographic backtrack; after that the search restarts with
//! seeded candidate orders and growing node limits, which is still fully
//! deterministic. The search runs on `i64` coordinates and the result is
//! re-checked with exact arithmetic before it is returned.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::invariant::{build_invariant_lattice, InvariantLattice};
use super::types::SingularType;
use super::SexticError;
use crate::lattice::{e8, k3_lattice, sublattice_index, Embedding, Lattice, Signature};
use crate::linalg::{hermite_normal_form, IntMatrix};
use crate::roots;

const DIM: usize = 22;
type Vector = [i64; DIM];

/// Images of `M`'s basis in the K3 lattice, and the orthogonal complement.
#[derive(Debug, Clone)]
pub struct K3Embedding {
    pub singular_type: SingularType,
    /// Row `i` is the image of the `i`-th Hermite basis vector of `M`.
    pub m: Embedding,
    /// `Λ_T = M^⊥`.
    pub complement: Embedding,
}

/// Exact postconditions of an embedding `M ↪ Λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingCheck {
    pub gram_preserved: bool,
    pub primitive: bool,
    pub complement_signature: Signature,
    pub expected_signature: Signature,
    pub complement_disc_order: BigInt,
    pub m_disc_order: BigInt,
    /// `[Λ : M ⊕ Λ_T]`.
    pub glue_index: BigInt,
    /// `[Λ : M ⊕ Λ_T]² = |det M| · |det Λ_T|`.
    pub index_law: bool,
}

impl EmbeddingCheck {
    pub fn passed(&self) -> bool {
        self.gram_preserved
            && self.primitive
            && self.complement_signature == self.expected_signature
            && self.complement_disc_order == self.m_disc_order
            && self.index_law
    }
}

/// Verifies that `images` (rows: ambient vectors of `M`'s basis) is a
/// primitive isometric embedding and computes the complement data.
pub fn check_embedding(
    m: &InvariantLattice,
    images: &Embedding,
) -> Result<(EmbeddingCheck, Embedding), SexticError> {
    let gram_preserved = images.lattice() == m.lattice;
    let primitive = images.is_primitive();
    let complement = images.orthogonal_complement();
    let lt = complement.lattice();
    let n = m.node_count();
    let complement_signature = lt.signature();
    let expected_signature = Signature::new(2, 19 - n.min(19), 0);
    let complement_disc_order = if lt.rank() == 0 {
        BigInt::from(1)
    } else {
        lt.discriminant_group()?.order()
    };
    let m_disc_order = m.discriminant_group().order();
    let sum = images.join(&complement)?;
    let whole = Embedding::full(images.ambient().clone());
    let glue_index = sublattice_index(&sum, &whole)?;
    let index_law =
        &glue_index * &glue_index == m.lattice.determinant().abs() * lt.determinant().abs();
    Ok((
        EmbeddingCheck {
            gram_preserved,
            primitive,
            complement_signature,
            expected_signature,
            complement_disc_order,
            m_disc_order,
            glue_index,
            index_law,
        },
        complement,
    ))
}

/// Search statistics alongside the result.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub embedding: Option<K3Embedding>,
    pub nodes_visited: u64,
    /// Largest number of exceptional classes placed simultaneously.
    pub max_depth: usize,
    /// Number of restarts begun, including the first lexicographic pass.
    pub attempts: u64,
    pub elapsed: Duration,
    pub timed_out: bool,
}

/// Best-effort search for a primitive embedding of `M` into `U³ ⊕ E8(-1)²`.
///
/// Deterministic: the same type and a sufficient budget always yield the
/// same embedding. Returns `None` when the budget runs out or the candidate
/// pool is exhausted.
pub fn find_primitive_embedding(
    t: &SingularType,
    budget: Duration,
) -> Result<Option<K3Embedding>, SexticError> {
    Ok(search_embedding(t, budget)?.embedding)
}

pub fn search_embedding(t: &SingularType, budget: Duration) -> Result<SearchOutcome, SexticError> {
    let start = Instant::now();
    let m = build_invariant_lattice(t)?;
    let ambient = k3_lattice();
    let gram = gram_rows(&ambient);
    let mut search = Search::new(t, &gram, start + budget)?;
    let found = search.run();
    let elapsed = start.elapsed();
    let Some(images) = found else {
        return Ok(SearchOutcome {
            embedding: None,
            nodes_visited: search.nodes,
            max_depth: search.max_depth,
            attempts: search.attempt + 1,
            elapsed,
            timed_out: search.timed_out,
        });
    };
    let embedding = assemble(&m, &ambient, &images)?;
    Ok(SearchOutcome {
        embedding: Some(embedding),
        nodes_visited: search.nodes,
        max_depth: search.max_depth,
        attempts: search.attempt + 1,
        elapsed,
        timed_out: false,
    })
}

/// Turns images of `H, E_1, …, E_n` into an embedding of `M`'s Hermite
/// basis and re-checks it exactly.
fn assemble(
    m: &InvariantLattice,
    ambient: &Lattice,
    images: &[Vector],
) -> Result<K3Embedding, SexticError> {
    let he = IntMatrix::from_rows(
        images
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
        DIM,
    )?;
    let doubled = m.basis_doubled.mul(&he)?;
    let two = BigInt::from(2);
    let mut rows = Vec::with_capacity(doubled.rows());
    for i in 0..doubled.rows() {
        let mut row = Vec::with_capacity(DIM);
        for x in doubled.row(i) {
            if !(x % &two).is_zero() {
                return Err(SexticError::NonIntegralGlue(m.singular_type.descriptor()));
            }
            row.push(x / &two);
        }
        rows.push(row);
    }
    let emb = Embedding::new(ambient.clone(), IntMatrix::from_rows(rows, DIM)?)?;
    let (check, complement) = check_embedding(m, &emb)?;
    if !check.passed() {
        return Err(SexticError::EmbeddingCheckFailed(format!("{check:?}")));
    }
    Ok(K3Embedding {
        singular_type: m.singular_type.clone(),
        m: emb,
        complement,
    })
}

/// Rebuilds and re-verifies an embedding from stored image rows, e.g. a
/// cache entry.
pub fn embedding_from_rows(
    t: &SingularType,
    rows: &IntMatrix,
) -> Result<Option<K3Embedding>, SexticError> {
    let m = build_invariant_lattice(t)?;
    if rows.rows() != m.rank() || rows.cols() != DIM {
        return Ok(None);
    }
    let Ok(emb) = Embedding::new(k3_lattice(), rows.clone()) else {
        return Ok(None);
    };
    let (check, complement) = check_embedding(&m, &emb)?;
    Ok(check.passed().then(|| K3Embedding {
        singular_type: t.clone(),
        m: emb,
        complement,
    }))
}

fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter()
        .map(|x| x.to_i64().expect("small coordinates"))
        .collect()
}

fn parity_mask(v: &[i64]) -> u32 {
    v.iter()
        .enumerate()
        .fold(0u32, |m, (i, x)| if x & 1 == 1 { m | 1 << i } else { m })
}

/// Basis of `M` in doubled `(H, E)` coordinates with row `i` supported on
/// columns `0..=i`.
fn lower_triangular_basis(m: &InvariantLattice) -> Vec<Vec<i64>> {
    let n1 = m.rank();
    let rev = |v: &[BigInt]| v.iter().rev().cloned().collect::<Vec<_>>();
    let reversed: Vec<Vec<BigInt>> = (0..n1).map(|i| rev(m.basis_doubled.row(i))).collect();
    let (h, _) = hermite_normal_form(&IntMatrix::from_rows(reversed, n1).expect("square"));
    (0..n1).rev().map(|i| to_i64(&rev(h.row(i)))).collect()
}

/// Norm `-2` vectors of `H^⊥` of the form
/// `x(e1 - f1) + u + r` with `x` and the `U²` coordinates of `u` in
/// `{-1, 0, 1}` and `r` zero or a root of one `E8(-1)` summand.
fn candidate_pool(gram: &[Vector]) -> Vec<Vector> {
    let e8_roots: Vec<Vec<i64>> = roots::roots(&e8(true))
        .expect("E8(-1) is negative definite")
        .iter()
        .map(|r| to_i64(r))
        .collect();
    let mut pieces: Vec<Vector> = vec![[0; DIM]];
    for offset in [6usize, 14] {
        for r in &e8_roots {
            let mut v = [0; DIM];
            v[offset..offset + 8].copy_from_slice(r);
            pieces.push(v);
        }
    }
    let mut pool = Vec::new();
    let h = h_image();
    for x in -1..=1i64 {
        for a in 0..81 {
            let mut u = [0i64; 4];
            let mut c = a;
            for slot in u.iter_mut() {
                *slot = c % 3 - 1;
                c /= 3;
            }
            for p in &pieces {
                let mut v = *p;
                v[0] = x;
                v[1] = -x;
                v[2..6].copy_from_slice(&u);
                if inner(gram, &v, &v) == -2 && inner(gram, &v, &h) == 0 {
                    pool.push(v);
                }
            }
        }
    }
    pool.sort();
    pool
}

/// Parity mask of `(partial + coef · v) / 2`.
fn half_parity(partial: &Vector, coef: i64, v: &Vector) -> u32 {
    let mut m = 0u32;
    for i in 0..DIM {
        if ((partial[i] + coef * v[i]) / 2) & 1 == 1 {
            m |= 1 << i;
        }
    }
    m
}

fn gram_rows(l: &Lattice) -> Vec<Vector> {
    (0..DIM)
        .map(|i| {
            let mut r = [0; DIM];
            r.copy_from_slice(&to_i64(l.gram().row(i)));
            r
        })
        .collect()
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn h_image() -> Vector {
    let mut h = [0; DIM];
    h[0] = 1;
    h[1] = 1;
    h
}

fn apply(gram: &[Vector], v: &Vector) -> Vector {
    let mut out = [0; DIM];
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0 {
            for (o, g) in out.iter_mut().zip(gram[i].iter()) {
                *o += vi * g;
            }
        }
    }
    out
}

fn inner(gram: &[Vector], a: &Vector, b: &Vector) -> i64 {
    apply(gram, a).iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot(a: &Vector, b: &Vector) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// GF(2) row echelon set; `insert` fails on dependent vectors.
#[derive(Clone, Default)]
struct Gf2Basis {
    rows: Vec<u32>,
}

impl Gf2Basis {
    fn reduce(&self, mut v: u32) -> u32 {
        for &r in &self.rows {
            let top = 31 - r.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    fn insert(&mut self, v: u32) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }
}

/// Minimal representatives of each class of `E8(-1) / 2E8(-1)`: the zero
/// class, 120 classes of roots (2 each) and 135 classes of norm `-4` vectors
/// (16 each), keyed by coordinate parity.
fn e8_residue_classes() -> HashMap<u32, (i64, Vec<[i64; 8]>)> {
    let l = e8(true);
    let short = roots::short_vectors(&roots::ShortVectorQuery::at_least(l.clone(), -4))
        .expect("E8(-1) is negative definite");
    let mut out: HashMap<u32, (i64, Vec<[i64; 8]>)> = HashMap::new();
    out.insert(0, (0, vec![[0; 8]]));
    for v in &short {
        let norm = l.norm(v).to_i64().expect("small norm");
        let mut r = [0; 8];
        r.copy_from_slice(&to_i64(v));
        out.entry(parity_mask(&r))
            .or_insert_with(|| (norm, Vec::new()))
            .1
            .push(r);
    }
    debug_assert_eq!(out.len(), 256);
    out
}

/// Roots orthogonal to `H` in a prescribed class modulo `2Λ`, of the form
/// `w + r_a + r_b` with `w = x(e1 - f1) + u`, `|x|` and the `U²`
/// coordinates of `u` at most 2, and `r_a`, `r_b` minimal in their
/// `E8(-1)` classes. The three parts are matched separately, so a class is
/// never materialised in full.
struct ResidueRoots {
    e8_classes: HashMap<u32, (i64, Vec<[i64; 8]>)>,
    /// `w` parts keyed by their parity bits and the required norm.
    u3_parts: HashMap<(u32, i64), Vec<[i64; 6]>>,
}

impl ResidueRoots {
    fn new() -> Self {
        Self {
            e8_classes: e8_residue_classes(),
            u3_parts: HashMap::new(),
        }
    }

    /// Roots in class `mask` orthogonal to every vector `g` of `dual`
    /// (already multiplied by the Gram matrix), sorted.
    fn orthogonal_in_class(&mut self, mask: u32, dual: &[Vector]) -> Vec<Vector> {
        if mask & 1 != mask >> 1 & 1 {
            // vectors orthogonal to e1 + f1 have equal parity there
            return Vec::new();
        }
        let (na, ra) = &self.e8_classes[&(mask >> 6 & 0xff)];
        let (nb, rb) = &self.e8_classes[&(mask >> 14 & 0xff)];
        let ws = self
            .u3_parts
            .entry((mask & 0x3f, -2 - na - nb))
            .or_insert_with(|| u3_parts(mask & 0x3f, -2 - na - nb));
        let profile = |v: &[i64], offset: usize| -> Vec<i64> {
            dual.iter()
                .map(|g| v.iter().zip(&g[offset..]).map(|(a, b)| a * b).sum())
                .collect()
        };
        let mut by_profile: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, s) in rb.iter().enumerate() {
            by_profile.entry(profile(s, 14)).or_default().push(i);
        }
        let a_profiles: Vec<Vec<i64>> = ra.iter().map(|r| profile(r, 6)).collect();
        let mut out = Vec::new();
        for w in ws.iter() {
            let pw = profile(w, 0);
            for (r, pa) in ra.iter().zip(&a_profiles) {
                let key: Vec<i64> = pw.iter().zip(pa).map(|(x, y)| -x - y).collect();
                if let Some(hits) = by_profile.get(&key) {
                    for &i in hits {
                        let mut v = [0; DIM];
                        v[..6].copy_from_slice(w);
                        v[6..14].copy_from_slice(r);
                        v[14..].copy_from_slice(&rb[i]);
                        out.push(v);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

/// `w = x(e1 - f1) + u` with coordinates of the given parities and
/// `w² = norm`.
fn u3_parts(bits: u32, norm: i64) -> Vec<[i64; 6]> {
    let choices = |i: u32| -> &'static [i64] {
        if bits >> i & 1 == 0 {
            &[-2, 0, 2]
        } else {
            &[-1, 1]
        }
    };
    let mut out = Vec::new();
    for &x in choices(0) {
        for &a2 in choices(2) {
            for &b2 in choices(3) {
                for &a3 in choices(4) {
                    for &b3 in choices(5) {
                        if -2 * x * x + 2 * (a2 * b2 + a3 * b3) == norm {
                            out.push([x, -x, a2, b2, a3, b3]);
                        }
                    }
                }
            }
        }
    }
    out
}

fn order_key(v: &Vector, attempt: u64) -> u64 {
    v.iter()
        .fold(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15), |h, &x| {
            splitmix(h ^ (x as u64))
        })
}

struct Search {
    gram: Vec<Vector>,
    base_pool: Vec<Vector>,
    pool: Vec<Vector>,
    residue_roots: ResidueRoots,
    basis: Vec<Vec<i64>>,
    images: Vec<Vector>,
    /// `G · E_k` for the placed classes.
    images_g: Vec<Vector>,
    attempt: u64,
    deadline: Instant,
    nodes: u64,
    attempt_limit: u64,
    attempt_nodes: u64,
    max_depth: usize,
    timed_out: bool,
    gave_up: bool,
}

impl Search {
    fn new(t: &SingularType, gram: &[Vector], deadline: Instant) -> Result<Self, SexticError> {
        let m = build_invariant_lattice(t)?;
        let basis = lower_triangular_basis(&m);
        let mut search = Self {
            gram: gram.to_vec(),
            base_pool: candidate_pool(gram),
            pool: Vec::new(),
            residue_roots: ResidueRoots::new(),
            basis,
            images: Vec::new(),
            images_g: Vec::new(),
            attempt: 0,
            deadline,
            nodes: 0,
            attempt_limit: u64::MAX,
            attempt_nodes: 0,
            max_depth: 0,
            timed_out: false,
            gave_up: false,
        };
        search.order_pool();
        Ok(search)
    }

    /// Attempt 0 uses lexicographic order; later attempts use a seeded
    /// pseudo-random order so restarts explore different regions.
    fn order_pool(&mut self) {
        let mut pool = self.base_pool.clone();
        if self.attempt > 0 {
            let a = self.attempt;
            pool.sort_by_cached_key(|v| (order_key(v, a), *v));
        }
        self.pool = pool;
    }

    /// Restarts with node limits growing geometrically until the deadline.
    fn run(&mut self) -> Option<Vec<Vector>> {
        const FIRST_LIMIT: u64 = 20_000;
        const DOUBLING_PERIOD: u64 = 16;
        let h = h_image();
        // Row 0 of the basis is 2H.
        debug_assert_eq!(self.basis[0][0], 2);
        let mut gf2 = Gf2Basis::default();
        gf2.insert(parity_mask(&h));
        for attempt in 0u64.. {
            self.attempt = attempt;
            if attempt > 0 {
                self.order_pool();
            }
            self.attempt_limit = FIRST_LIMIT << (attempt / DOUBLING_PERIOD).min(20);
            self.attempt_nodes = 0;
            self.gave_up = false;
            self.images = vec![h];
            self.images_g = vec![apply(&self.gram, &h)];
            let domain: Vec<u32> = (0..self.pool.len() as u32).collect();
            if self.dfs(1, &domain, &gf2) {
                return Some(self.images.clone());
            }
            if self.timed_out || !self.gave_up {
                // deadline hit, or the whole tree was exhausted
                return None;
            }
        }
        None
    }

    /// `Σ_{k<j} c_k · image_k` for basis row `j`; all of its nonzero
    /// columns below `j` must already be placed.
    fn partial_image(&self, j: usize) -> [i64; DIM] {
        let row = &self.basis[j];
        let mut partial = [0i64; DIM];
        for (k, img) in self.images.iter().enumerate().take(j) {
            if row[k] != 0 {
                for (p, x) in partial.iter_mut().zip(img) {
                    *p += row[k] * x;
                }
            }
        }
        partial
    }

    /// Roots in the class forced on `E_j` by glue row `j` that are
    /// orthogonal to every placed class and keep the basis independent
    /// modulo 2.
    fn forced_candidates(&mut self, j: usize, gf2: &Gf2Basis) -> Vec<Vector> {
        let partial = self.partial_image(j);
        let coef = self.basis[j][j];
        let want = parity_mask(&partial);
        let mut list = self
            .residue_roots
            .orthogonal_in_class(want, &self.images_g[1..]);
        list.retain(|v| gf2.reduce(half_parity(&partial, coef, v)) != 0);
        list
    }

    fn dfs(&mut self, j: usize, domain: &[u32], gf2: &Gf2Basis) -> bool {
        self.max_depth = self.max_depth.max(j - 1);
        if j == self.basis.len() {
            return true;
        }
        let partial = self.partial_image(j);
        let coef = self.basis[j][j];
        let forced = coef % 2 != 0;
        let mut candidates: Vec<Vector> = Vec::new();
        if forced {
            // glue step: the class of E_j modulo 2Λ is forced
            candidates = self.forced_candidates(j, gf2);
            if self.attempt > 0 {
                let a = self.attempt;
                candidates.sort_by_cached_key(|v| (order_key(v, a), *v));
            }
        } else if parity_mask(&partial) != 0 {
            return false;
        }
        let count = if forced {
            candidates.len()
        } else {
            domain.len()
        };

        for idx in 0..count {
            let cand = if forced {
                candidates[idx]
            } else {
                self.pool[domain[idx] as usize]
            };
            self.nodes += 1;
            self.attempt_nodes += 1;
            if self.nodes.is_multiple_of(256) && Instant::now() >= self.deadline {
                self.timed_out = true;
                return false;
            }
            if self.attempt_nodes > self.attempt_limit {
                self.gave_up = true;
                return false;
            }
            let mut next_gf2 = gf2.clone();
            if !next_gf2.insert(half_parity(&partial, coef, &cand)) {
                continue;
            }
            let cg = apply(&self.gram, &cand);
            let next: Vec<u32> = domain
                .iter()
                .copied()
                .filter(|&d| dot(&cg, &self.pool[d as usize]) == 0)
                .collect();
            self.images.push(cand);
            self.images_g.push(cg);
            if self.dfs(j + 1, &next, &next_gf2) {
                return true;
            }
            self.images.pop();
            self.images_g.pop();
            if self.timed_out || self.gave_up {
                return false;
            }
        }
        false
    }
}
