//! Command line surface over the core library: reproduce the bundled
//! tables, inspect one dimension's class monoid or multiplet report, run
//! verification suites, and scan the degeneration density.
//!
//! Exit codes: 0 on success, 1 when a verification or golden comparison
//! fails, 2 on usage or domain errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use quadclass_core::rayclass::{self, DiscData, MultipletReport};
use quadclass_core::verify::{self, SuiteReport};
use quadclass_core::{golden, Error};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "quadclass",
    version,
    about = "Exact class monoids and conjectural ray class degrees for real quadratic orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the class monoid size s(d) with its per-conductor breakdown
    Classmonoid {
        /// Dimension, at least 4
        d: u64,
    },
    /// Print one dimension's class numbers, degrees, and degenerate pairs
    Multiplets {
        /// Dimension, at least 4
        d: u64,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Regenerate one of the bundled tables as CSV on stdout
    Table {
        /// Which table to regenerate
        name: TableName,
        /// Largest dimension to include (default: the table's own range)
        #[arg(long)]
        dmax: Option<u64>,
        /// Compare against the stored reference rows and fail on mismatch
        #[arg(long)]
        golden: bool,
    },
    /// Run a verification suite and print one verdict per check
    Verify {
        /// Which suite to run
        suite: Suite,
        /// Range bound; each suite has its own default. The density suite
        /// reads it as the largest dimension scanned
        #[arg(long)]
        dmax: Option<u64>,
    },
    /// Count the dimensions whose class fields degenerate
    Density {
        /// Largest dimension scanned
        #[arg(long = "N", value_name = "M", default_value_t = 1_000_000)]
        n: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableName {
    Classgroup,
    Classfield,
    Degeneration,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Units,
    Correspondence,
    Degrees,
    Uniqueness,
    Density,
    All,
}

/// A command failure with the exit code it maps to: domain errors are the
/// caller's, verification failures are falsified invariants or reference
/// mismatches.
enum Failure {
    Domain(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Verification(err.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classmonoid { d } => cmd_classmonoid(d),
        Command::Multiplets { d, format } => cmd_multiplets(d, format),
        Command::Table { name, dmax, golden } => cmd_table(name, dmax, golden),
        Command::Verify { suite, dmax } => cmd_verify(suite, dmax),
        Command::Density { n } => cmd_density(n),
    }
}

fn check_dimension(d: u64) -> Result<(), Failure> {
    if d == 3 {
        return Err(Failure::Domain(
            "d = 3 has discriminant (d+1)(d-3) = 0: the quadratic machinery degenerates \
             and the classes form an infinite family rather than a finite monoid"
                .to_string(),
        ));
    }
    if d < 4 {
        return Err(Failure::Domain(format!("d must be at least 4; got {d}")));
    }
    Ok(())
}

fn cmd_classmonoid(d: u64) -> Result<(), Failure> {
    check_dimension(d)?;
    let data = DiscData::new(&BigInt::from(d))?;
    let rows = rayclass::classgroup_rows(d, d)?;
    let row = rows.first().expect("one row for one dimension");
    println!("d = {d}");
    println!("delta = {} = {}^2 * {}", data.delta, data.f, data.delta0);
    for (fprime, h) in &row.entries {
        println!("f' = {fprime}: h = {h}");
    }
    println!("s({d}) = {}", row.total);
    Ok(())
}

fn cmd_multiplets(d: u64, format: Format) -> Result<(), Failure> {
    check_dimension(d)?;
    let report = rayclass::multiplet_report(&BigInt::from(d))?;
    match format {
        Format::Json => println!("{}", multiplets_json(&report)),
        Format::Csv => print!("{}", multiplets_csv(&report)),
        Format::Md => print!("{}", multiplets_md(&report)),
    }
    Ok(())
}

fn json_int(value: &BigInt) -> serde_json::Value {
    let number = value
        .to_string()
        .parse::<serde_json::Number>()
        .expect("integer literal is a valid JSON number");
    serde_json::Value::Number(number)
}

fn multiplets_json(report: &MultipletReport) -> String {
    let delta = &report.f * &report.f * &report.delta0;
    let entries: Vec<serde_json::Value> = report
        .entries
        .iter()
        .map(|entry| {
            let mut object = serde_json::Map::new();
            object.insert("fprime".to_string(), json_int(&entry.fprime));
            object.insert("disc".to_string(), json_int(&entry.disc));
            object.insert("h".to_string(), json_int(&entry.h));
            object.insert("degE".to_string(), json_int(&entry.deg_e));
            object.insert("degEtilde".to_string(), json_int(&entry.deg_etilde));
            object.insert(
                "degenerate_with".to_string(),
                entry
                    .degenerate_partner
                    .as_ref()
                    .map_or(serde_json::Value::Null, json_int),
            );
            serde_json::Value::Object(object)
        })
        .collect();
    let mut root = serde_json::Map::new();
    root.insert(
        "schema_version".to_string(),
        serde_json::Value::String(SCHEMA_VERSION.to_string()),
    );
    root.insert("d".to_string(), json_int(&report.d));
    root.insert("delta".to_string(), json_int(&delta));
    root.insert("delta0".to_string(), json_int(&report.delta0));
    root.insert("f".to_string(), json_int(&report.f));
    root.insert("entries".to_string(), serde_json::Value::Array(entries));
    root.insert("total".to_string(), json_int(&report.total));
    serde_json::Value::Object(root).to_string()
}

fn multiplets_csv(report: &MultipletReport) -> String {
    let mut out = String::from("d,fprime,disc,h,deg_e,deg_etilde,degenerate_with\n");
    for entry in &report.entries {
        let partner = entry
            .degenerate_partner
            .as_ref()
            .map(BigInt::to_string)
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            report.d, entry.fprime, entry.disc, entry.h, entry.deg_e, entry.deg_etilde, partner
        ));
    }
    out
}

fn multiplets_md(report: &MultipletReport) -> String {
    let delta = &report.f * &report.f * &report.delta0;
    let mut out = format!(
        "d = {}, delta = {} = {}^2 * {}\n\n",
        report.d, delta, report.f, report.delta0
    );
    out.push_str("| f' | disc | h | deg E | deg E~ | degenerate with |\n");
    out.push_str("| --- | --- | --- | --- | --- | --- |\n");
    for entry in &report.entries {
        let partner = entry
            .degenerate_partner
            .as_ref()
            .map(BigInt::to_string)
            .unwrap_or_default();
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            entry.fprime, entry.disc, entry.h, entry.deg_e, entry.deg_etilde, partner
        ));
    }
    out.push_str(&format!("\ntotal: {}\n", report.total));
    out
}

fn cmd_table(name: TableName, dmax: Option<u64>, golden_flag: bool) -> Result<(), Failure> {
    let default = match name {
        TableName::Classgroup => golden::CLASSGROUP_DMAX,
        TableName::Classfield => golden::CLASSFIELD_DMAX,
        TableName::Degeneration => golden::DEGENERATION_DMAX,
    };
    let dmax = dmax.unwrap_or(default);
    if dmax < 4 {
        return Err(Failure::Domain(format!("--dmax must be at least 4; got {dmax}")));
    }
    if dmax > 2000 {
        return Err(Failure::Domain(format!(
            "--dmax is capped at 2000 to keep runtimes sane; got {dmax}"
        )));
    }
    match name {
        TableName::Classgroup => table_classgroup(dmax, golden_flag),
        TableName::Classfield => table_classfield(dmax, golden_flag),
        TableName::Degeneration => table_degeneration(dmax, golden_flag),
    }
}

fn join_column(values: impl Iterator<Item = BigInt>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn compare_golden<T: PartialEq + std::fmt::Debug>(
    table: &str,
    computed: &[T],
    reference: &[T],
) -> Result<(), Failure> {
    if let Some(index) = (0..computed.len().max(reference.len()))
        .find(|&i| computed.get(i) != reference.get(i))
    {
        return Err(Failure::Verification(format!(
            "{table} table diverges from the stored reference at row {index}: computed {:?}, reference {:?}",
            computed.get(index),
            reference.get(index)
        )));
    }
    eprintln!("golden: {} {table} rows match the stored reference", computed.len());
    Ok(())
}

fn golden_coverage_note(table: &str, dmax: u64, coverage: u64) {
    if dmax > coverage {
        eprintln!("golden: no stored {table} reference beyond d = {coverage}; later rows not compared");
    }
}

fn table_classgroup(dmax: u64, golden_flag: bool) -> Result<(), Failure> {
    let rows = rayclass::classgroup_rows(4, dmax)?;
    let reference = golden::golden_classgroup();
    let counts: std::collections::BTreeMap<&BigInt, &BigInt> =
        reference.iter().map(|row| (&row.d, &row.total)).collect();
    println!("d,delta0,fprimes,hs,total,sic_multiplets");
    for row in &rows {
        let echoed = counts.get(&row.d).map(|c| c.to_string()).unwrap_or_default();
        println!(
            "{},{},{},{},{},{}",
            row.d,
            row.delta0,
            join_column(row.entries.iter().map(|(f, _)| f.clone())),
            join_column(row.entries.iter().map(|(_, h)| h.clone())),
            row.total,
            echoed
        );
    }
    if golden_flag {
        let cutoff = BigInt::from(golden::CLASSGROUP_DMAX.min(dmax));
        let computed: Vec<_> = rows.iter().filter(|r| r.d <= cutoff).cloned().collect();
        let expected: Vec<_> = reference.into_iter().filter(|r| r.d <= cutoff).collect();
        compare_golden("classgroup", &computed, &expected)?;
        golden_coverage_note("classgroup", dmax, golden::CLASSGROUP_DMAX);
    }
    Ok(())
}

fn table_classfield(dmax: u64, golden_flag: bool) -> Result<(), Failure> {
    let rows = rayclass::classfield_rows(dmax)?;
    println!("d,fprime,h,deg_e,deg_etilde");
    for row in &rows {
        println!(
            "{},{},{},{},{}",
            row.d, row.fprime, row.h, row.deg_e, row.deg_etilde
        );
    }
    if golden_flag {
        let cutoff = BigInt::from(golden::CLASSFIELD_DMAX.min(dmax));
        let computed: Vec<_> = rows.iter().filter(|r| r.d <= cutoff).cloned().collect();
        let expected: Vec<_> = golden::golden_classfield()
            .into_iter()
            .filter(|r| r.d <= cutoff)
            .collect();
        compare_golden("classfield", &computed, &expected)?;
        golden_coverage_note("classfield", dmax, golden::CLASSFIELD_DMAX);
    }
    Ok(())
}

fn table_degeneration(dmax: u64, golden_flag: bool) -> Result<(), Failure> {
    let rows = rayclass::degeneration_rows(dmax)?;
    println!("d,delta0,fsmall,flarge,h,degree");
    for row in &rows {
        println!(
            "{},{},{},{},{},{}",
            row.d, row.delta0, row.fsmall, row.flarge, row.h, row.degree
        );
    }
    if golden_flag {
        let cutoff = BigInt::from(golden::DEGENERATION_DMAX.min(dmax));
        let computed: Vec<_> = rows.iter().filter(|r| r.d <= cutoff).cloned().collect();
        let expected: Vec<_> = golden::golden_degeneration()
            .into_iter()
            .filter(|r| r.d <= cutoff)
            .collect();
        compare_golden("degeneration", &computed, &expected)?;
        golden_coverage_note("degeneration", dmax, golden::DEGENERATION_DMAX);
    }
    Ok(())
}

fn cmd_verify(suite: Suite, dmax: Option<u64>) -> Result<(), Failure> {
    if matches!(suite, Suite::All) && dmax.is_some() {
        return Err(Failure::Domain(
            "--dmax does not apply to the all suite; it runs every suite at its standard bound"
                .to_string(),
        ));
    }
    if let Some(bound) = dmax {
        if bound < 4 {
            return Err(Failure::Domain(format!("--dmax must be at least 4; got {bound}")));
        }
    }
    let reports = match suite {
        Suite::Units => vec![verify::verify_units(dmax.unwrap_or(60))?],
        Suite::Correspondence => vec![verify::verify_correspondence(dmax.unwrap_or(60), 50)?],
        Suite::Degrees => vec![verify::verify_degrees(dmax.unwrap_or(500))?],
        Suite::Uniqueness => vec![verify::verify_uniqueness(dmax.unwrap_or(500))?],
        Suite::Density => vec![verify::verify_density(dmax.unwrap_or(1_000_000))?],
        Suite::All => verify::verify_all()?,
    };
    render_reports(&reports)
}

fn render_reports(reports: &[SuiteReport]) -> Result<(), Failure> {
    let mut total = 0usize;
    let mut failed: Vec<String> = Vec::new();
    for report in reports {
        for check in &report.checks {
            total += 1;
            let verdict = if check.passed { "PASS" } else { "FAIL" };
            println!("{verdict} {}: {} ({})", report.suite, check.name, check.detail);
            if !check.passed {
                failed.push(format!("{}: {}", report.suite, check.name));
            }
        }
    }
    if failed.is_empty() {
        println!("verification passed: {total} checks");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} of {total} checks failed; first: {}",
            failed.len(),
            failed[0]
        )))
    }
}

fn cmd_density(n: u64) -> Result<(), Failure> {
    if n < 4 {
        return Err(Failure::Domain(format!("--N must be at least 4; got {n}")));
    }
    let (count, ratio) = rayclass::density_scan(n)?;
    let approx = count as f64 / n as f64;
    println!("scanned 4 <= d <= {n}");
    println!("degenerate dimensions: {count}");
    println!(
        "ratio: {}/{} = {approx:.6} (reference 1/48 = {:.6})",
        ratio.numer(),
        ratio.denom(),
        1.0 / 48.0
    );
    Ok(())
}
