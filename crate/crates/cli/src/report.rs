//! Census rows and their renderings.

use serde::{Deserialize, Serialize};
use sextic_lattice::sextic::{canonical_types, type_invariants, SingularType};

use crate::error::CliError;

/// Version of every JSON document this tool emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Column headers of the census table.
pub const TABLE_COLUMNS: [&str; 6] = [
    "Type",
    "Number of Nodes",
    "Dim",
    "Rank(M)",
    "A_M",
    "Baily-Borel",
];

/// One census row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub type_descriptor: String,
    pub n: u32,
    pub dim_moduli: i64,
    #[serde(rename = "rank_M")]
    pub rank_m: usize,
    pub disc_rank: usize,
    pub baily_borel: Option<bool>,
    pub del_pezzo_degree: Option<u32>,
    pub branch_genus: Option<u32>,
}

impl ReportRow {
    pub fn for_type(t: &SingularType) -> Result<Self, CliError> {
        let inv = type_invariants(t)?;
        // A_M is an elementary 2-group for every nodal type; the error only
        // guards against a broken construction.
        let disc_rank = inv.disc_rank.ok_or_else(|| {
            CliError::NotElementary(inv.disc_diagnostic.clone().unwrap_or_default())
        })?;
        Ok(Self {
            type_descriptor: t.descriptor(),
            n: inv.n,
            dim_moduli: inv.dim_moduli,
            rank_m: inv.rank_m,
            disc_rank,
            baily_borel: inv.baily_borel,
            del_pezzo_degree: inv.del_pezzo_degree,
            branch_genus: inv.branch_genus,
        })
    }

    /// `(1,1,4)` style label.
    pub fn label(&self) -> String {
        format!("({})", self.type_descriptor)
    }

    pub fn disc_group(&self) -> String {
        format!("(Z/2)^{}", self.disc_rank)
    }

    pub fn baily_borel_cell(&self) -> &'static str {
        match self.baily_borel {
            Some(true) => "yes",
            Some(false) => "no",
            None => "undefined",
        }
    }

    /// The six table cells, in column order.
    pub fn cells(&self) -> [String; 6] {
        [
            self.label(),
            self.n.to_string(),
            self.dim_moduli.to_string(),
            self.rank_m.to_string(),
            self.disc_group(),
            self.baily_borel_cell().to_string(),
        ]
    }
}

/// The census rows in table order.
pub fn census() -> Result<Vec<ReportRow>, CliError> {
    canonical_types().iter().map(ReportRow::for_type).collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CensusDocument {
    pub schema_version: u32,
    pub rows: Vec<ReportRow>,
}

pub fn render_json(rows: &[ReportRow]) -> String {
    let doc = CensusDocument {
        schema_version: SCHEMA_VERSION,
        rows: rows.to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("census serializes") + "\n"
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TABLE_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

pub fn render_markdown(rows: &[ReportRow]) -> String {
    let mut out = format!("| {} |\n", TABLE_COLUMNS.join(" | "));
    out += &format!("|{}\n", "---|".repeat(TABLE_COLUMNS.len()));
    for r in rows {
        out += &format!("| {} |\n", r.cells().join(" | "));
    }
    out
}

/// Left-aligned plain-text table.
pub fn render_text(rows: &[ReportRow]) -> String {
    let body: Vec<[String; 6]> = rows.iter().map(ReportRow::cells).collect();
    let widths: Vec<usize> = (0..6)
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([TABLE_COLUMNS[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[&str]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
            + "\n"
    };
    let mut out = line(&TABLE_COLUMNS);
    for r in &body {
        out += &line(&r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_for_two_four() {
        let r = ReportRow::for_type(&"2,4".parse().unwrap()).unwrap();
        assert_eq!(r.rank_m, 9);
        assert_eq!(r.disc_group(), "(Z/2)^7");
        assert_eq!(r.baily_borel, Some(false));
        assert_eq!(r.label(), "(2,4)");
    }

    #[test]
    fn nodal_rows_leave_baily_borel_open() {
        let r = ReportRow::for_type(&"6[n=3]".parse().unwrap()).unwrap();
        assert_eq!((r.n, r.rank_m, r.dim_moduli), (3, 4, 16));
        assert_eq!(r.baily_borel_cell(), "undefined");
        assert_eq!(r.del_pezzo_degree, Some(6));
        assert_eq!(r.branch_genus, Some(7));
    }

    #[test]
    fn renderings_have_one_line_per_row() {
        let rows = census().unwrap();
        assert_eq!(render_csv(&rows).lines().count(), 12);
        assert_eq!(render_markdown(&rows).lines().count(), 13);
        assert_eq!(render_text(&rows).lines().count(), 12);
        let doc: CensusDocument = serde_json::from_str(&render_json(&rows)).unwrap();
        assert_eq!(doc.rows, rows);
        assert_eq!(doc.schema_version, SCHEMA_VERSION);
    }
}
