//! End-to-end tests of the command line surface: output shapes, golden
//! comparisons, exit codes, and byte-level determinism.

use std::process::{Command, Output};

fn quadclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadclass"))
        .args(args)
        .output()
        .expect("spawn quadclass")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn classmonoid_prints_breakdown_and_total() {
    let out = quadclass(&["classmonoid", "35"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("delta = 1152 = 12^2 * 8"), "{text}");
    assert!(text.contains("f' = 6: h = 2"), "{text}");
    assert!(text.contains("f' = 12: h = 4"), "{text}");
    assert!(text.ends_with("s(35) = 10\n"), "{text}");
}

#[test]
fn classmonoid_reports_total_for_90() {
    let out = quadclass(&["classmonoid", "90"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).ends_with("s(90) = 4\n"));
}

#[test]
fn classmonoid_rejects_d_3_with_domain_exit() {
    let out = quadclass(&["classmonoid", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("infinite family"));
}

#[test]
fn classmonoid_rejects_small_d() {
    let out = quadclass(&["classmonoid", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("at least 4"));
}

#[test]
fn multiplets_json_follows_the_schema() {
    let out = quadclass(&["multiplets", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    assert_eq!(value["schema_version"], "1");
    assert_eq!(value["d"].to_string(), "8");
    assert_eq!(value["delta"].to_string(), "45");
    assert_eq!(value["f"].to_string(), "3");
    let entries = value["entries"].as_array().expect("entries array");
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["degE"].to_string(), "8");
    assert_eq!(entries[0]["degEtilde"].to_string(), "16");
    assert_eq!(entries[1]["fprime"].to_string(), "3");
    assert_eq!(entries[1]["degE"].to_string(), "32");
    assert_eq!(entries[1]["degEtilde"].to_string(), "64");
    assert!(entries[1]["degenerate_with"].is_null());
    assert_eq!(value["total"].to_string(), "2");
}

#[test]
fn multiplets_json_marks_degenerate_partners() {
    let out = quadclass(&["multiplets", "47"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    let entries = value["entries"].as_array().expect("entries array");
    assert_eq!(entries[0]["degenerate_with"].to_string(), "2");
    assert_eq!(entries[1]["degenerate_with"].to_string(), "1");
    assert!(entries[2]["degenerate_with"].is_null());
}

#[test]
fn multiplets_single_entry_dimension() {
    let out = quadclass(&["multiplets", "4"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    let entries = value["entries"].as_array().expect("entries array");
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["h"].to_string(), "1");
    assert_eq!(entries[0]["degE"].to_string(), "4");
    assert_eq!(entries[0]["degEtilde"].to_string(), "8");
    assert!(entries[0]["degenerate_with"].is_null());
    assert_eq!(value["total"].to_string(), "1");
}

#[test]
fn multiplets_csv_and_md_render_the_same_rows() {
    let csv = stdout_of(&quadclass(&["multiplets", "47", "--format", "csv"]));
    assert!(csv.starts_with("d,fprime,disc,h,deg_e,deg_etilde,degenerate_with\n"));
    assert!(csv.contains("47,2,132,1,1472,1472,1\n"), "{csv}");
    let md = stdout_of(&quadclass(&["multiplets", "47", "--format", "md"]));
    assert!(md.contains("| 2 | 132 | 1 | 1472 | 1472 | 1 |"), "{md}");
    assert!(md.ends_with("total: 8\n"), "{md}");
}

#[test]
fn table_classfield_golden_passes() {
    let out = quadclass(&["table", "classfield", "--golden"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("d,fprime,h,deg_e,deg_etilde\n4,1,1,4,8\n"), "{text}");
    assert!(text.contains("15,4,2,192,192\n"));
    assert!(stderr_of(&out).contains("18 classfield rows match"));
}

#[test]
fn table_classgroup_golden_passes_and_echoes_reference_counts() {
    let out = quadclass(&["table", "classgroup", "--golden"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("d,delta0,fprimes,hs,total,sic_multiplets\n"));
    assert!(text.contains("35,8,1;2;3;4;6;12,1;1;1;1;2;4,10,10\n"), "{text}");
    assert_eq!(text.lines().count(), 88);
    assert!(stderr_of(&out).contains("87 classgroup rows match"));
}

#[test]
fn table_degeneration_bounded_golden_passes() {
    let out = quadclass(&["table", "degeneration", "--dmax", "120", "--golden"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(
        text,
        "d,delta0,fsmall,flarge,h,degree\n47,33,1,2,1,1472\n67,17,1,2,1,1452\n83,105,1,2,2,9184\n"
    );
    assert!(stderr_of(&out).contains("3 degeneration rows match"));
}

#[test]
fn table_rejects_out_of_range_dmax() {
    assert_eq!(quadclass(&["table", "classgroup", "--dmax", "2500"]).status.code(), Some(2));
    assert_eq!(quadclass(&["table", "classgroup", "--dmax", "3"]).status.code(), Some(2));
}

#[test]
fn verify_units_small_bound_passes() {
    let out = quadclass(&["verify", "units", "--dmax", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("PASS units: congruence-one unit generator equals eps_d^3"), "{text}");
    assert!(text.contains("verification passed: 2 checks"), "{text}");
}

#[test]
fn verify_all_rejects_dmax() {
    let out = quadclass(&["verify", "all", "--dmax", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("does not apply"));
}

#[test]
fn density_output_is_deterministic() {
    let first = quadclass(&["density", "--N", "20000"]);
    let second = quadclass(&["density", "--N", "20000"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    assert!(text.contains("degenerate dimensions: "), "{text}");
    assert!(text.contains("reference 1/48"), "{text}");
}

#[test]
fn multiplets_output_is_deterministic() {
    let first = quadclass(&["multiplets", "47"]);
    let second = quadclass(&["multiplets", "47"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(quadclass(&["bogus"]).status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(quadclass(&["--help"]).status.code(), Some(0));
}
