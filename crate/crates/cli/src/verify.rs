//! Self-checks behind `sextic verify`.
//!
//! Each check carries a short content-named anchor, a case count and, on
//! failure, the first counterexample found.

use std::time::Duration;

use clap::ValueEnum;
use num_bigint::BigInt;
use serde::Serialize;
use sextic_lattice::lattice::{e8, k3_lattice, Signature};
use sextic_lattice::roots::roots;
use sextic_lattice::sextic::{
    build_invariant_lattice, canonical_types, lattice_m1, type_invariants, verify_no_extra_roots,
    Component, SingularType,
};

use crate::cache::{find_embedding, EmbeddingCache};
use crate::error::CliError;
use crate::report::{census, SCHEMA_VERSION};

/// The census as published: label, nodes, dim, rank, `A_M`, Baily-Borel.
pub const REFERENCE_CENSUS: [[&str; 6]; 11] = [
    ["(6)", "0", "19", "1", "(Z/2)^1", "no"],
    ["(1,5)", "5", "14", "6", "(Z/2)^4", "yes"],
    ["(2,4)", "8", "11", "9", "(Z/2)^7", "no"],
    ["(3,3)", "9", "10", "10", "(Z/2)^8", "yes"],
    ["(1,1,4)", "9", "10", "10", "(Z/2)^6", "yes"],
    ["(1,2,3)", "11", "8", "12", "(Z/2)^8", "yes"],
    ["(2,2,2)", "12", "7", "13", "(Z/2)^9", "no"],
    ["(1,1,1,3)", "12", "7", "13", "(Z/2)^7", "yes"],
    ["(1,1,2,2)", "13", "6", "14", "(Z/2)^8", "yes"],
    ["(1,1,1,1,2)", "14", "5", "15", "(Z/2)^7", "yes"],
    ["(1,1,1,1,1,1)", "15", "4", "16", "(Z/2)^6", "yes"],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Lattice,
    Roots,
    Table1,
    Embedding,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub anchor: &'static str,
    pub description: String,
    pub cases: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl Check {
    /// Runs `f` over `cases`, stopping at the first failure.
    fn over<T>(
        anchor: &'static str,
        description: impl Into<String>,
        cases: impl IntoIterator<Item = T>,
        mut f: impl FnMut(&T) -> Result<Option<String>, CliError>,
    ) -> Result<Self, CliError> {
        let mut n = 0;
        for c in cases {
            n += 1;
            if let Some(bad) = f(&c)? {
                return Ok(Self {
                    anchor,
                    description: description.into(),
                    cases: n,
                    passed: false,
                    counterexample: Some(bad),
                });
            }
        }
        Ok(Self {
            anchor,
            description: description.into(),
            cases: n,
            passed: true,
            counterexample: None,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub scope: Scope,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn render_text(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.anchor.len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            out += &format!(
                "[{mark:<4}] {:<width$}  {} ({} checked)\n",
                c.anchor, c.description, c.cases
            );
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        out += &format!("{ok}/{} checks passed\n", self.checks.len());
        if let Some(c) = self.first_failure() {
            out += &format!(
                "first counterexample ({}): {}\n",
                c.anchor,
                c.counterexample.as_deref().unwrap_or("")
            );
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

/// Irreducible types with `δ` self-nodes, `δ ∈ range`.
fn irreducible(range: std::ops::RangeInclusive<u32>) -> Vec<SingularType> {
    range
        .map(|d| SingularType::irreducible(d).expect("δ within bound"))
        .collect()
}

/// Canonical types, irreducible types with 1..=10 self-nodes, and each
/// canonical type with its first nodal-capable component maximally nodal.
fn nodal_sample() -> Vec<SingularType> {
    let mut out = canonical_types();
    out.extend(irreducible(1..=Component::max_self_nodes(6)));
    for t in canonical_types() {
        let mut comps = t.components().to_vec();
        if let Some(c) = comps
            .iter_mut()
            .find(|c| Component::max_self_nodes(c.degree) > 0)
        {
            c.self_nodes = Component::max_self_nodes(c.degree);
            out.push(SingularType::new(comps).expect("maximal self-nodes are legal"));
        }
    }
    out
}

fn k3_check() -> Check {
    let k3 = k3_lattice();
    let det = k3.determinant();
    let sig = k3.signature();
    let ok = k3.is_even()
        && (det == BigInt::from(1) || det == BigInt::from(-1))
        && sig == Signature::new(3, 19, 0);
    Check {
        anchor: "k3-lattice",
        description: "U^3 + E8(-1)^2 is even, |det| = 1, signature (3,19)".into(),
        cases: 1,
        passed: ok,
        counterexample: (!ok).then(|| format!("even={} det={det} signature={sig}", k3.is_even())),
    }
}

fn e8_check() -> Result<Check, CliError> {
    let found = roots(&e8(true))?.len();
    Ok(Check {
        anchor: "e8-roots",
        description: "E8(-1) has exactly 240 roots".into(),
        cases: 1,
        passed: found == 240,
        counterexample: (found != 240).then(|| format!("{found} roots")),
    })
}

fn index_law_check() -> Result<Check, CliError> {
    Check::over(
        "index-law",
        "[M : M_1] = 2^(l-1) and det M_1 = det M * [M : M_1]^2",
        canonical_types(),
        |t| {
            let m = build_invariant_lattice(t)?;
            let l = t.num_components() as u32;
            let det_m1 = lattice_m1(m.node_count()).determinant();
            let idx = &m.index_over_m1;
            let ok =
                *idx == BigInt::from(2).pow(l - 1) && det_m1 == m.lattice.determinant() * idx * idx;
            Ok((!ok).then(|| {
                format!(
                    "{}: index {idx}, det M {}, det M_1 {det_m1}",
                    t.label(),
                    m.lattice.determinant()
                )
            }))
        },
    )
}

fn glue_sum_check() -> Result<Check, CliError> {
    Check::over(
        "glue-sum",
        "sum of glue classes C_i = 3H - sum E_j",
        nodal_sample(),
        |t| {
            let m = build_invariant_lattice(t)?;
            let mut lhs = vec![BigInt::from(0); m.rank()];
            for c in &m.class_c {
                for (x, y) in lhs.iter_mut().zip(c) {
                    *x += y;
                }
            }
            let mut rhs: Vec<BigInt> = m.class_h.iter().map(|x| x * 3).collect();
            for e in &m.class_e {
                for (x, y) in rhs.iter_mut().zip(e) {
                    *x -= y;
                }
            }
            Ok((lhs != rhs).then(|| format!("{}: {lhs:?} != {rhs:?}", t.label())))
        },
    )
}

fn roots_check() -> Result<Check, CliError> {
    let mut types = canonical_types();
    types.extend(irreducible(0..=8));
    Check::over(
        "no-extra-roots",
        "roots of H-perp in M are exactly the 2n classes +-E_j",
        types,
        |t| {
            let r = verify_no_extra_roots(t)?;
            Ok((!r.passed()).then(|| {
                format!(
                    "{}: {} roots, expected {}, extra {:?}, missing {:?}",
                    t.label(),
                    r.enumerated,
                    r.expected,
                    r.extra,
                    r.missing
                )
            }))
        },
    )
}

fn census_check() -> Result<Check, CliError> {
    let rows = census()?;
    let cells: Vec<(usize, usize)> = (0..REFERENCE_CENSUS.len())
        .flat_map(|r| (0..6).map(move |c| (r, c)))
        .collect();
    if rows.len() != REFERENCE_CENSUS.len() {
        return Ok(Check {
            anchor: "census",
            description: "census table cells".into(),
            cases: 0,
            passed: false,
            counterexample: Some(format!(
                "{} rows, expected {}",
                rows.len(),
                REFERENCE_CENSUS.len()
            )),
        });
    }
    let computed: Vec<[String; 6]> = rows.iter().map(|r| r.cells()).collect();
    Check::over("census", "census table cells", cells, |&(r, c)| {
        let got = &computed[r][c];
        let want = REFERENCE_CENSUS[r][c];
        Ok((got != want).then(|| {
            format!(
                "row {} column {}: got {got}, expected {want}",
                REFERENCE_CENSUS[r][0],
                c + 1
            )
        }))
    })
}

fn del_pezzo_check() -> Result<Check, CliError> {
    Check::over(
        "del-pezzo",
        "irreducible types with n <= 8: del Pezzo degree 9-n, branch genus 10-n",
        irreducible(0..=8),
        |t| {
            let inv = type_invariants(t)?;
            let want = (Some(9 - inv.n), Some(10 - inv.n));
            let got = (inv.del_pezzo_degree, inv.branch_genus);
            Ok((got != want).then(|| format!("{}: got {got:?}, expected {want:?}", t.label())))
        },
    )
}

fn embedding_check(budget: Duration, cache: Option<&EmbeddingCache>) -> Result<Check, CliError> {
    Check::over(
        "embedding",
        "primitive embeddings of M for (6) with 0..4 self-nodes, with exact postconditions",
        irreducible(0..=4),
        |t| {
            // the search only returns embeddings that passed the exact check
            Ok(find_embedding(t, budget, cache)?
                .is_none()
                .then(|| format!("{}: embedding not found within budget", t.label())))
        },
    )
}

pub fn run(
    scope: Scope,
    budget: Duration,
    cache: Option<&EmbeddingCache>,
) -> Result<Summary, CliError> {
    let wants = |s: Scope| scope == Scope::All || scope == s;
    let mut checks = Vec::new();
    if wants(Scope::Lattice) {
        checks.push(k3_check());
        checks.push(e8_check()?);
        checks.push(index_law_check()?);
        checks.push(glue_sum_check()?);
    }
    if wants(Scope::Roots) {
        checks.push(roots_check()?);
    }
    if wants(Scope::Table1) {
        checks.push(census_check()?);
        checks.push(del_pezzo_check()?);
    }
    if wants(Scope::Embedding) {
        checks.push(embedding_check(budget, cache)?);
    }
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        scope,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
