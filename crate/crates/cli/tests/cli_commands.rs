use std::fs;
use std::process::{Command, Output};

use sextic_cli::report::{CensusDocument, ReportRow};

fn sextic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sextic"))
        .args(args)
        .env_remove("SEXTIC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn table1_csv_has_eleven_data_rows() {
    let o = sextic(&["table1", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.records().count(), 11);
}

#[test]
fn table1_markdown_row_for_one_one_four() {
    let o = sextic(&["--format", "markdown", "table1"]);
    assert!(stdout(&o).contains("| (1,1,4) | 9 | 10 | 10 | (Z/2)^6 | yes |"));
}

#[test]
fn table1_json_round_trips_through_the_row_schema() {
    let o = sextic(&["table1", "--format", "json"]);
    let doc: CensusDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.rows.len(), 11);
    let expected = ReportRow::for_type(&"2,4".parse().unwrap()).unwrap();
    assert_eq!(doc.rows[2], expected);
    assert_eq!(serde_json::to_value(&doc.rows[0]).unwrap()["rank_M"], 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["table1", "--format", "json"][..],
        &["type-info", "1,2,3"],
        &["verify", "table1"],
    ] {
        assert_eq!(sextic(args).stdout, sextic(args).stdout, "{args:?}");
    }
}

#[test]
fn unknown_format_is_a_usage_error() {
    assert_eq!(
        sextic(&["table1", "--format", "yaml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        sextic(&["--format", "markdown", "verify"]).status.code(),
        Some(2)
    );
    assert_eq!(sextic(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn type_info_reports_invariants() {
    let o = sextic(&["type-info", "2,4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "rank(M): 9",
        "A_M: (Z/2)^7",
        "baily-borel: no",
        "roots of H-perp: 16 found, 16 expected",
    ] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
    let j: serde_json::Value = serde_json::from_str(&stdout(&sextic(&[
        "--format",
        "json",
        "type-info",
        "6[n=3]",
    ])))
    .unwrap();
    assert_eq!(j["row"]["n"], 3);
    assert_eq!(j["row"]["rank_M"], 4);
    assert_eq!(j["row"]["dim_moduli"], 16);
    assert_eq!(j["row"]["baily_borel"], serde_json::Value::Null);
}

#[test]
fn q_values_are_exact_fractions() {
    let j: serde_json::Value =
        serde_json::from_str(&stdout(&sextic(&["--format", "json", "type-info", "1,5"]))).unwrap();
    for g in j["discriminant"]["generators"].as_array().unwrap() {
        let q = g["q"].as_str().unwrap();
        assert!(
            q.chars()
                .all(|c| c.is_ascii_digit() || c == '/' || c == '-'),
            "{q}"
        );
    }
}

#[test]
fn parse_errors_name_the_violated_bound() {
    let o = sextic(&["type-info", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sum to 7"), "{}", stderr(&o));
    let o = sextic(&["type-info", "4[n=4],2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('3'), "{}", stderr(&o));
}

#[test]
fn lattice_command_accepts_names_and_files() {
    let text = stdout(&sextic(&["lattice", "k3"]));
    assert!(
        text.contains("rank: 22") && text.contains("signature: (3, 19)"),
        "{text}"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.lat");
    fs::write(&path, "not a lattice\n").unwrap();
    // a malformed file is a parse error
    assert_eq!(
        sextic(&["lattice", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    fs::write(&path, "lattice-gram v1\nrank 2\n-2 1\n1 -2\n").unwrap();
    let j: serde_json::Value = serde_json::from_str(&stdout(&sextic(&[
        "--format",
        "json",
        "lattice",
        path.to_str().unwrap(),
    ])))
    .unwrap();
    assert_eq!(j["determinant"], 3);
    assert_eq!(j["signature"], serde_json::json!([0, 2]));
}

#[test]
fn roots_of_a_type_and_of_e8() {
    let text = stdout(&sextic(&["roots", "1,1,4"]));
    assert!(
        text.contains("roots of H-perp: 18") && text.ends_with("result: ok\n"),
        "{text}"
    );
    let j: serde_json::Value = serde_json::from_str(&stdout(&sextic(&[
        "--format",
        "json",
        "roots",
        "--lattice",
        "e8",
    ])))
    .unwrap();
    assert_eq!(j["count"], 240);
    assert_eq!(sextic(&["roots", "--lattice", "k3"]).status.code(), Some(1));
}

#[test]
fn verify_scopes_pass_with_a_json_summary() {
    let o = sextic(&["--format", "json", "verify", "table1"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["passed"], true);
    assert_eq!(j["checks"][0]["anchor"], "census");
    assert_eq!(j["checks"][0]["cases"], 66);
    let text = stdout(&sextic(&["verify", "roots"]));
    assert!(
        text.contains("no-extra-roots") && text.contains("1/1 checks passed"),
        "{text}"
    );
    let text = stdout(&sextic(&["verify", "lattice"]));
    assert!(
        text.contains("k3-lattice") && text.contains("4/4 checks passed"),
        "{text}"
    );
}

#[test]
fn embedding_cache_is_written_reused_and_revalidated() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["--cache-dir", d, "type-info", "6[n=2]", "--embedding"];
    let first = sextic(&args);
    assert!(first.status.success());
    assert!(stdout(&first).contains("complement signature: (2, 17)"));
    let file = dir.path().join("6n2.v1.emb");
    assert!(file.exists());

    assert_eq!(sextic(&args).stdout, first.stdout);

    // a tampered entry is ignored and replaced
    let good = fs::read_to_string(&file).unwrap();
    fs::write(&file, good.replace("images", "imagez")).unwrap();
    assert_eq!(sextic(&args).stdout, first.stdout);
    assert_eq!(fs::read_to_string(&file).unwrap(), good);
}

#[test]
fn cache_dir_flag_overrides_the_environment() {
    let from_env = tempfile::tempdir().unwrap();
    let from_flag = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sextic"))
            .args(extra)
            .args(["type-info", "6", "--embedding"])
            .env("SEXTIC_CACHE_DIR", from_env.path())
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    assert!(from_env.path().join("6.v1.emb").exists());
    assert!(run(&["--cache-dir", from_flag.path().to_str().unwrap()])
        .status
        .success());
    assert!(from_flag.path().join("6.v1.emb").exists());

    let none = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sextic"))
        .args(["--no-cache", "type-info", "6[n=1]", "--embedding"])
        .env("SEXTIC_CACHE_DIR", none.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read_dir(none.path()).unwrap().count(), 0);
}

#[test]
fn exhausted_budget_is_reported_not_fatal() {
    let o = sextic(&[
        "--no-cache",
        "--budget",
        "1ms",
        "type-info",
        "1,1,1,1,1,1",
        "--embedding",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("embedding: not found within budget\n"));
}
