//! Argument definitions and subcommand handlers.
//!
//! Handlers return the full stdout text so that output stays deterministic
//! and testable; `main` only prints it and maps errors to exit codes.

use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sextic_lattice::lattice::{e8, hyperbolic_plane, k3_lattice, Lattice};
use sextic_lattice::linalg::IntMatrix;
use sextic_lattice::roots::roots;
use sextic_lattice::sextic::{
    build_invariant_lattice, lattice_m1, type_invariants, verify_no_extra_roots, K3Embedding,
    SingularType,
};

use crate::cache::{default_cache_dir, find_embedding, EmbeddingCache, CACHE_DIR_ENV};
use crate::error::{CliError, EXIT_FAILURE};
use crate::report::{
    census, render_csv, render_json, render_markdown, render_text, ReportRow, SCHEMA_VERSION,
};
use crate::verify::{self, Scope};

#[derive(Debug, Parser)]
#[command(
    name = "sextic",
    version,
    about = "Lattice census for nodal plane sextics and their K3 double covers"
)]
pub struct Cli {
    /// Output format; table1 accepts all four, other commands text or json.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Time budget for the embedding search, e.g. `60s` or `2m`.
    #[arg(long, global = true, default_value = "60s", value_parser = humantime::parse_duration)]
    pub budget: Duration,
    /// Directory for cached embeddings.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the embedding cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Census of the eleven types whose generic curve is a union of smooth curves.
    Table1,
    /// Invariants, Gram matrix, discriminant form and root check of one type.
    TypeInfo {
        /// Type descriptor such as `1,5` or `6[n=3]`.
        descriptor: String,
        /// Also search for a primitive embedding into the K3 lattice.
        #[arg(long)]
        embedding: bool,
    },
    /// Summary and Gram matrix of a lattice.
    Lattice {
        /// `k3`, `e8`, `u`, `m:<descriptor>`, `m1:<n>` or a lattice file.
        name: String,
    },
    /// Roots of H-perp in M for a type, or of a negative definite lattice.
    Roots {
        /// Type descriptor.
        #[arg(required_unless_present = "lattice", conflicts_with = "lattice")]
        descriptor: Option<String>,
        /// Lattice name as accepted by the `lattice` command.
        #[arg(long)]
        lattice: Option<String>,
    },
    /// Run the built-in consistency checks.
    Verify {
        #[arg(value_enum, default_value_t = Scope::All)]
        scope: Scope,
    },
}

/// Rendered stdout plus exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub status: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, status: 0 }
    }
}

impl Cli {
    fn cache(&self) -> Option<EmbeddingCache> {
        (!self.no_cache)
            .then(|| EmbeddingCache::new(self.cache_dir.clone().unwrap_or_else(default_cache_dir)))
    }

    fn text_or_json(&self, command: &str) -> Result<(), CliError> {
        match self.format {
            Format::Text | Format::Json => Ok(()),
            f => Err(CliError::Usage(format!(
                "format `{}` is not supported by `{command}`; use text or json",
                f.to_possible_value()
                    .expect("no skipped variants")
                    .get_name()
            ))),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Table1 => {
            let rows = census()?;
            Ok(Output::ok(match cli.format {
                Format::Text => render_text(&rows),
                Format::Csv => render_csv(&rows),
                Format::Json => render_json(&rows),
                Format::Markdown => render_markdown(&rows),
            }))
        }
        Command::TypeInfo {
            descriptor,
            embedding,
        } => {
            cli.text_or_json("type-info")?;
            type_info(cli, descriptor, *embedding).map(Output::ok)
        }
        Command::Lattice { name } => {
            cli.text_or_json("lattice")?;
            let l = resolve_lattice(name)?;
            Ok(Output::ok(match cli.format {
                Format::Json => to_json(&lattice_json(name, &l)?),
                _ => lattice_text(name, &l)?,
            }))
        }
        Command::Roots {
            descriptor,
            lattice,
        } => {
            cli.text_or_json("roots")?;
            match (descriptor, lattice) {
                (Some(d), _) => type_roots(cli, d).map(Output::ok),
                (None, Some(name)) => lattice_roots(cli, name).map(Output::ok),
                (None, None) => Err(CliError::Usage(
                    "a descriptor or --lattice is required".into(),
                )),
            }
        }
        Command::Verify { scope } => {
            cli.text_or_json("verify")?;
            let cache = cli.cache();
            let summary = verify::run(*scope, cli.budget, cache.as_ref())?;
            let stdout = match cli.format {
                Format::Json => summary.render_json(),
                _ => summary.render_text(),
            };
            Ok(Output {
                stdout,
                status: if summary.passed { 0 } else { EXIT_FAILURE },
            })
        }
    }
}

fn parse_type(descriptor: &str) -> Result<SingularType, CliError> {
    Ok(descriptor.parse()?)
}

/// Resolves the lattice names understood by `lattice` and `roots --lattice`.
pub fn resolve_lattice(name: &str) -> Result<Lattice, CliError> {
    if let Some(d) = name.strip_prefix("m:") {
        return Ok(build_invariant_lattice(&parse_type(d)?)?.lattice);
    }
    if let Some(n) = name.strip_prefix("m1:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("`{name}`: expected m1:<number of nodes>")))?;
        return Ok(lattice_m1(n));
    }
    match name {
        "k3" => Ok(k3_lattice()),
        "e8" => Ok(e8(true)),
        "u" => Ok(hyperbolic_plane()),
        path => {
            let path = PathBuf::from(path);
            if !path.exists() {
                return Err(CliError::Usage(format!(
                    "unknown lattice `{name}`: expected k3, e8, u, m:<descriptor>, m1:<n> or a file"
                )));
            }
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Lattice::from_text(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
    }
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

/// Integers as JSON numbers when they fit in i64, strings otherwise.
fn int(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(int).collect()))
            .collect(),
    )
}

fn indent(block: &str) -> String {
    block.lines().map(|l| format!("  {l}\n")).collect()
}

fn optional<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn lattice_json(name: &str, l: &Lattice) -> Result<Value, CliError> {
    let sig = l.signature();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "rank": l.rank(),
        "signature": [sig.positive, sig.negative],
        "determinant": int(&l.determinant()),
        "even": l.is_even(),
        "discriminant_group": l.discriminant_group()?.describe(),
        "gram": matrix_json(l.gram()),
    }))
}

fn lattice_text(name: &str, l: &Lattice) -> Result<String, CliError> {
    Ok(format!(
        "lattice: {name}\nrank: {}\nsignature: {}\ndeterminant: {}\neven: {}\ndiscriminant group: {}\ngram:\n{}",
        l.rank(),
        l.signature(),
        l.determinant(),
        l.is_even(),
        l.discriminant_group()?.describe(),
        indent(&l.gram().to_string())
    ))
}

fn type_info(cli: &Cli, descriptor: &str, with_embedding: bool) -> Result<String, CliError> {
    let t = parse_type(descriptor)?;
    let row = ReportRow::for_type(&t)?;
    let inv = type_invariants(&t)?;
    let m = build_invariant_lattice(&t)?;
    let disc = m.discriminant_group();
    let q_values = disc.q_values.clone().unwrap_or_default();
    let report = verify_no_extra_roots(&t)?;
    let embedding = if with_embedding {
        Some(find_embedding(&t, cli.budget, cli.cache().as_ref())?)
    } else {
        None
    };

    if cli.format == Format::Json {
        let generators: Vec<Value> = disc
            .generators
            .iter()
            .zip(&q_values)
            .map(|(g, q)| {
                json!({
                    "coordinates": g.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "q": q.to_string(),
                })
            })
            .collect();
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "row": row,
            "period_domain_dim": inv.period_domain_dim,
            "gram_M": matrix_json(m.lattice.gram()),
            "discriminant": {
                "group": disc.describe(),
                "generators": generators,
            },
            "roots": {
                "enumerated": report.enumerated,
                "expected": report.expected,
                "passed": report.passed(),
            },
        });
        if let Some(found) = embedding {
            doc["embedding"] = match found {
                Some(e) => embedding_json(&e),
                None => json!("not found within budget"),
            };
        }
        return Ok(to_json(&doc));
    }

    let mut out = format!(
        "type: {}\nnodes: {}\ncomponents: {}\ndim: {}\nrank(M): {}\nA_M: {}\nbaily-borel: {}\nperiod domain dim: {}\ndel pezzo degree: {}\nbranch genus: {}\n",
        row.label(),
        row.n,
        t.num_components(),
        row.dim_moduli,
        row.rank_m,
        row.disc_group(),
        row.baily_borel_cell(),
        inv.period_domain_dim,
        optional(row.del_pezzo_degree),
        optional(row.branch_genus),
    );
    out += &format!("gram of M:\n{}", indent(&m.lattice.gram().to_string()));
    out += "discriminant generators:\n";
    for (i, (g, q)) in disc.generators.iter().zip(&q_values).enumerate() {
        let coords: Vec<String> = g.iter().map(ToString::to_string).collect();
        out += &format!("  g{} = ({})  q = {q}\n", i + 1, coords.join(", "));
    }
    out += &format!(
        "roots of H-perp: {} found, {} expected, {}\n",
        report.enumerated,
        report.expected,
        if report.passed() {
            "all are +-E_j"
        } else {
            "MISMATCH"
        }
    );
    match embedding {
        None => {}
        Some(None) => out += "embedding: not found within budget\n",
        Some(Some(e)) => out += &embedding_text(&e),
    }
    Ok(out)
}

fn embedding_json(e: &K3Embedding) -> Value {
    let lt = e.complement.lattice();
    let sig = lt.signature();
    json!({
        "images": matrix_json(e.m.basis()),
        "complement_signature": [sig.positive, sig.negative],
        "complement_gram": matrix_json(lt.gram()),
    })
}

fn embedding_text(e: &K3Embedding) -> String {
    let lt = e.complement.lattice();
    format!(
        "embedding (rows: images of the basis of M in U^3 + E8(-1)^2):\n{}complement signature: {}\ncomplement gram:\n{}",
        indent(&e.m.basis().to_string()),
        lt.signature(),
        indent(&lt.gram().to_string())
    )
}

fn type_roots(cli: &Cli, descriptor: &str) -> Result<String, CliError> {
    let t = parse_type(descriptor)?;
    let r = verify_no_extra_roots(&t)?;
    if cli.format == Format::Json {
        return Ok(to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "type": t.descriptor(),
            "enumerated": r.enumerated,
            "expected": r.expected,
            "extra": r.extra.iter().map(|v| v.iter().map(int).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "missing": r.missing,
            "passed": r.passed(),
        })));
    }
    let mut out = format!(
        "type: {}\nroots of H-perp: {}\nexpected (+-E_j): {}\n",
        t.label(),
        r.enumerated,
        r.expected
    );
    for v in &r.extra {
        let coords: Vec<String> = v.iter().map(ToString::to_string).collect();
        out += &format!("extra root: {}\n", coords.join(" "));
    }
    for j in &r.missing {
        out += &format!("missing: E_{}\n", j + 1);
    }
    out += if r.passed() {
        "result: ok\n"
    } else {
        "result: FAIL\n"
    };
    Ok(out)
}

fn lattice_roots(cli: &Cli, name: &str) -> Result<String, CliError> {
    let l = resolve_lattice(name)?;
    let mut found = roots(&l)?;
    found.sort();
    if cli.format == Format::Json {
        return Ok(to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "lattice": name,
            "count": found.len(),
            "roots": found.iter().map(|v| v.iter().map(int).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })));
    }
    let mut out = format!("lattice: {name}\nroots: {}\n", found.len());
    for v in &found {
        out += &v
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        out += "\n";
    }
    Ok(out)
}
