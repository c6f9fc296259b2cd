//! Exact bracket relations on both sides and the printed-table diff.

use glfour_algebra::matrix::gl4_table;
use glfour_algebra::{bracket_diff, check_kernel_brackets, check_matrix_brackets, generate_e_table, BracketReport, ETable};
use serde_json::json;

use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

fn bracket_case(key: &str, r: &BracketReport) -> CaseRecord {
    CaseRecord::exact(key.to_string(), json!({"side": r.side, "checked": r.checked, "exact": r.exact}), r.checked - r.exact)
}

pub fn run() -> Result<SuiteReport> {
    let matrix = check_matrix_brackets();
    let regen = generate_e_table();
    let kernel = check_kernel_brackets(&regen.table);
    let printed = check_kernel_brackets(&ETable::printed());

    // Control: [e11, e12] compared against -e12 instead of e12.
    let t = gl4_table();
    let rem = &bracket_diff(&t[0][0], &t[0][1]) + &t[0][1];
    let control = CaseRecord::exact("control/e11-e12-wrong-sign".into(), json!({"claim": "[e11, e12] = -e12"}), usize::from(!rem.is_zero()))
        .with_role(Role::Control);

    let cases = vec![
        bracket_case("matrix-side", &matrix),
        bracket_case("kernel-side-regenerated", &kernel),
        bracket_case("kernel-side-printed", &printed).with_role(Role::Variant),
        control,
    ];
    let extra = json!({
        "matrix": {"checked": matrix.checked, "exact": matrix.exact},
        "kernel_regenerated": {"checked": kernel.checked, "exact": kernel.exact},
        "kernel_printed": {"checked": printed.checked, "exact": printed.exact},
        "mismatched_printed_entries": regen.mismatched_entries(),
        "printed_vs_regenerated": regen.diff_json(),
    });
    Ok(SuiteReport::new("commutators", cases, extra))
}
