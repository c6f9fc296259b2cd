//! The sixteen generators: kernel of T(e_kl F) against E_kl applied to K.

use glfour_algebra::matrix::gl4_table;
use glfour_algebra::{apply_diffdiff, generate_e_table, shifted_params, DiffDiffOp, ETable};
use glfour_algebra::diffdiff::is_diagonal_block;
use glfour_core::principal::PrincipalParam;
use glfour_core::quadrature::Estimate;
use rayon::prelude::*;
use serde_json::json;

use super::{families, labeled_params, param_json, sigma_groups, Family, Labeled};
use crate::config::SuiteConfig;
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

const PAIRS: [(usize, usize); 16] = {
    let mut out = [(0, 0); 16];
    let mut i = 0;
    while i < 16 {
        out[i] = (i / 4 + 1, i % 4 + 1);
        i += 1;
    }
    out
};

/// E14 with the sign of its V2^-1 part reversed.
pub fn corrupted_e14(table: &ETable) -> DiffDiffOp {
    let mut out = DiffDiffOp::zero();
    for (key, c) in table.get(1, 4).terms() {
        let c = if key.k == -1 { -c } else { c.clone() };
        out = out + DiffDiffOp::term(c, *key);
    }
    out
}

/// LHS for all sixteen generators at one point, per parameter.
fn lhs_block(fam: &Family, t: f64, s: f64, params: &[Labeled]) -> Result<Vec<[Estimate; 16]>> {
    let table = gl4_table();
    let mut out = vec![[Estimate::default(); 16]; params.len()];
    for (sigma, idx) in sigma_groups(params) {
        let ops: Vec<_> = PAIRS.iter().map(|&(k, l)| table[k - 1][l - 1].compile(sigma)).collect();
        let ps: Vec<PrincipalParam> = idx.iter().map(|&i| params[i].p).collect();
        let m = fam.kernel.moments::<16, _>(t, s, &ps, |n| std::array::from_fn(|g| ops[g].apply(&n.x, n.f, &n.grad)))?;
        for (&i, v) in idx.iter().zip(m) {
            out[i] = v;
        }
    }
    Ok(out)
}

fn prefetch(fam: &Family, t: f64, s: f64, ops: &[&DiffDiffOp], params: &[Labeled]) -> Result<()> {
    let mut all: Vec<PrincipalParam> = Vec::new();
    for l in params {
        for op in ops {
            for q in shifted_params(op, &l.p) {
                if !all.iter().any(|r| r.key() == q.key()) {
                    all.push(q);
                }
            }
        }
    }
    Ok(fam.kernel.prefetch(t, s, &all)?)
}

struct Point {
    cases: Vec<CaseRecord>,
    printed_e24_residual: f64,
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mc = &cfg.main_theorem;
    let params = labeled_params(cfg)?;
    let fams = families(cfg)?;
    let regen = generate_e_table();
    let table = &regen.table;
    let printed = ETable::printed();
    let mut ops: Vec<&DiffDiffOp> = PAIRS.iter().map(|&(k, l)| table.get(k, l)).collect();
    ops.push(printed.get(2, 4));

    let jobs: Vec<(usize, f64, f64)> =
        fams.iter().enumerate().flat_map(|(fi, fam)| fam.ts.iter().map(move |&(t, s)| (fi, t, s))).collect();
    let points = jobs
        .par_iter()
        .map(|&(fi, t, s)| -> Result<Point> {
            let fam = &fams[fi];
            let lhs = lhs_block(fam, t, s, &params)?;
            prefetch(fam, t, s, &ops, &params)?;
            let mut cases = Vec::new();
            let mut printed_e24_residual: f64 = 0.0;
            for (pi, l) in params.iter().enumerate() {
                for (g, &(k, ll)) in PAIRS.iter().enumerate() {
                    let a = lhs[pi][g];
                    let b = apply_diffdiff(table.get(k, ll), &fam.kernel, t, s, &l.p)?;
                    let tol = if is_diagonal_block(k, ll) { mc.diagonal_tolerance } else { mc.tolerance };
                    cases.push(CaseRecord::numeric(
                        format!("{}/t={t:+.3}/s={s:+.4}/{}/e{k}{ll}", fam.name, l.label),
                        json!({"f": fam.name, "t": t, "s": s, "param": param_json(&l.p), "generator": format!("e{k}{ll}")}),
                        a.value,
                        b.value,
                        a.error + b.error,
                        1.0 + a.value.norm(),
                        tol,
                    ));
                }
                let a = lhs[pi][PAIRS.iter().position(|&q| q == (2, 4)).expect("listed")];
                let b = apply_diffdiff(printed.get(2, 4), &fam.kernel, t, s, &l.p)?;
                printed_e24_residual = printed_e24_residual.max((a.value - b.value).norm() / (1.0 + a.value.norm()));
            }
            Ok(Point { cases, printed_e24_residual })
        })
        .collect::<Result<Vec<_>>>()?;

    let printed_max = points.iter().map(|p| p.printed_e24_residual).fold(0.0, f64::max);
    let mut cases: Vec<CaseRecord> = points.into_iter().flat_map(|p| p.cases).collect();

    let fam = &fams[0];
    let (t, s) = fam.ts[0];
    let l = &params[0];
    let bad = corrupted_e14(table);
    let a = lhs_block(fam, t, s, std::slice::from_ref(l))?[0][PAIRS.iter().position(|&q| q == (1, 4)).expect("listed")];
    let b = apply_diffdiff(&bad, &fam.kernel, t, s, &l.p)?;
    cases.push(
        CaseRecord::numeric(
            format!("control/{}/e14-flipped-V2", fam.name),
            json!({"f": fam.name, "t": t, "s": s, "param": param_json(&l.p), "operator": bad.to_string()}),
            a.value,
            b.value,
            a.error + b.error,
            1.0 + a.value.norm(),
            mc.tolerance,
        )
        .with_role(Role::Control),
    );

    let extra = json!({
        "table": "regenerated",
        "mismatched_printed_entries": regen.mismatched_entries(),
        "printed_e24_max_residual": printed_max,
        "printed_e24_note": "informational: the printed E24 evaluated on the same grid",
    });
    Ok(SuiteReport::new("main-theorem", cases, extra))
}
