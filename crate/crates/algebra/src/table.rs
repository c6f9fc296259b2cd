//! Regeneration of the kernel-side table from its seeds, comparison with the
//! printed closed forms, and the gl4 bracket relations on both sides.

use serde::Serialize;

use crate::diffdiff::{bracket_shift, e_generator, is_diagonal_block, DiffDiffOp, TermKey};
use crate::matrix::{bracket_diff, gl4_table, DiffOp2};
use crate::shiftcoef::ShiftCoef;

/// Sixteen kernel-side operators indexed `[k-1][l-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ETable {
    pub entries: [[DiffDiffOp; 4]; 4],
}

impl ETable {
    pub fn get(&self, k: usize, l: usize) -> &DiffDiffOp {
        &self.entries[k - 1][l - 1]
    }

    /// The printed closed forms for all sixteen entries.
    pub fn printed() -> Self {
        Self { entries: std::array::from_fn(|k| std::array::from_fn(|l| e_generator(k + 1, l + 1).expect("index in range"))) }
    }
}

/// How the six off-block entries outside the seeds are rebuilt, as (target, left, right).
pub const REGENERATION: [((usize, usize), (usize, usize), (usize, usize)); 6] = [
    ((1, 3), (1, 4), (4, 3)),
    ((2, 3), (2, 1), (1, 3)),
    ((2, 4), (2, 1), (1, 4)),
    ((3, 1), (3, 2), (2, 1)),
    ((4, 1), (4, 3), (3, 1)),
    ((4, 2), (4, 3), (3, 2)),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermMismatch {
    pub term: String,
    pub printed: String,
    pub regenerated: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryDiff {
    pub entry: String,
    pub origin: String,
    pub matches: bool,
    pub mismatches: Vec<TermMismatch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regeneration {
    pub table: ETable,
    pub diff: Vec<EntryDiff>,
}

impl Regeneration {
    pub fn mismatched_entries(&self) -> Vec<&str> {
        self.diff.iter().filter(|d| !d.matches).map(|d| d.entry.as_str()).collect()
    }

    pub fn diff_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.diff).expect("plain data serializes")
    }
}

fn name(k: usize, l: usize) -> String {
    format!("E{k}{l}")
}

fn term_diff(printed: &DiffDiffOp, regenerated: &DiffDiffOp) -> Vec<TermMismatch> {
    let mut keys: Vec<TermKey> = printed.terms().map(|(k, _)| *k).chain(regenerated.terms().map(|(k, _)| *k)).collect();
    keys.sort();
    keys.dedup();
    let show = |c: Option<&ShiftCoef>| c.map_or("0".to_string(), |c| c.to_string());
    keys.into_iter()
        .filter(|k| printed.get(k) != regenerated.get(k))
        .map(|k| TermMismatch { term: k.to_string(), printed: show(printed.get(&k)), regenerated: show(regenerated.get(&k)) })
        .collect()
}

/// Seeds (both diagonal blocks, E14, E32) plus brackets; every entry is compared
/// term by term with its printed closed form.
pub fn generate_e_table() -> Regeneration {
    let printed = ETable::printed();
    let mut entries = printed.entries.clone();
    let mut origin: [[String; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| "seed".to_string()));
    for ((tk, tl), (ak, al), (bk, bl)) in REGENERATION {
        entries[tk - 1][tl - 1] = bracket_shift(&entries[ak - 1][al - 1], &entries[bk - 1][bl - 1]);
        origin[tk - 1][tl - 1] = format!("[{}, {}]", name(ak, al), name(bk, bl));
    }
    let mut diff = Vec::new();
    for k in 1..=4 {
        for l in 1..=4 {
            let mismatches = term_diff(printed.get(k, l), &entries[k - 1][l - 1]);
            let origin = if is_diagonal_block(k, l) { "seed (diagonal block)".to_string() } else { origin[k - 1][l - 1].clone() };
            diff.push(EntryDiff { entry: name(k, l), origin, matches: mismatches.is_empty(), mismatches });
        }
    }
    Regeneration { table: ETable { entries }, diff }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketFailure {
    pub left: String,
    pub right: String,
    pub remainder: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketReport {
    pub side: String,
    pub checked: usize,
    pub exact: usize,
    pub failures: Vec<BracketFailure>,
}

impl BracketReport {
    pub fn all_exact(&self) -> bool {
        self.exact == self.checked
    }
}

/// Runs `[X_ab, X_cd] - (delta_bc X_ad - delta_da X_cb)` over all 256 index pairs.
fn check_relations<O, B, Z, A, S>(side: &str, get: impl Fn(usize, usize) -> O, bracket: B, is_zero: Z, add: A, sub: S) -> BracketReport
where
    O: Clone + std::fmt::Display,
    B: Fn(&O, &O) -> O,
    Z: Fn(&O) -> bool,
    A: Fn(&O, &O) -> O,
    S: Fn(&O, &O) -> O,
{
    let mut failures = Vec::new();
    let mut checked = 0;
    for a in 1..=4 {
        for b in 1..=4 {
            for c in 1..=4 {
                for d in 1..=4 {
                    checked += 1;
                    let mut rem = bracket(&get(a, b), &get(c, d));
                    if b == c {
                        rem = sub(&rem, &get(a, d));
                    }
                    if d == a {
                        rem = add(&rem, &get(c, b));
                    }
                    if !is_zero(&rem) {
                        failures.push(BracketFailure { left: format!("{a}{b}"), right: format!("{c}{d}"), remainder: rem.to_string() });
                    }
                }
            }
        }
    }
    BracketReport { side: side.to_string(), checked, exact: checked - failures.len(), failures }
}

pub fn check_matrix_brackets() -> BracketReport {
    let table = gl4_table();
    check_relations(
        "matrix",
        |k, l| table[k - 1][l - 1].clone(),
        bracket_diff,
        DiffOp2::is_zero,
        |a: &DiffOp2, b: &DiffOp2| a + b,
        |a: &DiffOp2, b: &DiffOp2| a - b,
    )
}

pub fn check_kernel_brackets(table: &ETable) -> BracketReport {
    check_relations(
        "kernel",
        |k, l| table.get(k, l).clone(),
        bracket_shift,
        DiffDiffOp::is_zero,
        |a: &DiffDiffOp, b: &DiffDiffOp| a + b,
        |a: &DiffDiffOp, b: &DiffDiffOp| a - b,
    )
}
