//! Frozen reference tables shipped with the crate, for bit-exact
//! comparison against freshly computed rows.
//!
//! The three tables cover the class group decomposition for
//! `4 <= d <= 90`, the class field degrees for `4 <= d <= 15`, and the
//! degenerate conductor pairs for `4 <= d <= 500`. They are stored as
//! CSV (list-valued cells joined by semicolons) and parsed eagerly;
//! corrupt data is a build defect and panics with the offending line.

use num_bigint::BigInt;

use crate::rayclass::{ClassFieldRow, ClassGroupRow, DegenerationRow};

const CLASSGROUP_CSV: &str = include_str!("../data/table_classgroup.csv");
const CLASSFIELD_CSV: &str = include_str!("../data/table_classfield.csv");
const DEGENERATION_CSV: &str = include_str!("../data/table_degeneration.csv");

/// The largest `d` covered by [`golden_classgroup`].
pub const CLASSGROUP_DMAX: u64 = 90;
/// The largest `d` covered by [`golden_classfield`].
pub const CLASSFIELD_DMAX: u64 = 15;
/// The largest `d` covered by [`golden_degeneration`].
pub const DEGENERATION_DMAX: u64 = 500;

fn parse_int(cell: &str, line: &str) -> BigInt {
    cell.parse()
        .unwrap_or_else(|_| panic!("bad integer {cell:?} in golden row {line:?}"))
}

fn parse_list(cell: &str, line: &str) -> Vec<BigInt> {
    cell.split(';').map(|part| parse_int(part, line)).collect()
}

fn data_lines(csv: &'static str) -> impl Iterator<Item = &'static str> {
    csv.lines().skip(1).filter(|line| !line.trim().is_empty())
}

/// The class group table for `4 <= d <= 90`: per dimension, the class
/// number of every order between the maximal one and conductor `f`, with
/// the total matching the independently tabulated count of
/// Weyl-Heisenberg SIC multiplets.
pub fn golden_classgroup() -> Vec<ClassGroupRow> {
    data_lines(CLASSGROUP_CSV)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 5, "bad golden row {line:?}");
            let fprimes = parse_list(cells[2], line);
            let hs = parse_list(cells[3], line);
            assert_eq!(fprimes.len(), hs.len(), "ragged golden row {line:?}");
            ClassGroupRow {
                d: parse_int(cells[0], line),
                delta0: parse_int(cells[1], line),
                entries: fprimes.into_iter().zip(hs).collect(),
                total: parse_int(cells[4], line),
            }
        })
        .collect()
}

/// The class field degree table for `4 <= d <= 15`: one row per
/// conductor divisor with the class number and both field degrees.
pub fn golden_classfield() -> Vec<ClassFieldRow> {
    data_lines(CLASSFIELD_CSV)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 5, "bad golden row {line:?}");
            ClassFieldRow {
                d: parse_int(cells[0], line),
                fprime: parse_int(cells[1], line),
                h: parse_int(cells[2], line),
                deg_e: parse_int(cells[3], line),
                deg_etilde: parse_int(cells[4], line),
            }
        })
        .collect()
}

/// The degeneration table for `4 <= d <= 500`: one row per degenerate
/// conductor pair, with the shared class number and field degree.
pub fn golden_degeneration() -> Vec<DegenerationRow> {
    data_lines(DEGENERATION_CSV)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 6, "bad golden row {line:?}");
            DegenerationRow {
                d: parse_int(cells[0], line),
                delta0: parse_int(cells[1], line),
                fsmall: parse_int(cells[2], line),
                flarge: parse_int(cells[3], line),
                h: parse_int(cells[4], line),
                degree: parse_int(cells[5], line),
            }
        })
        .collect()
}
