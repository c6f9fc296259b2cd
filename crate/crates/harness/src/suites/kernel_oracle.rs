//! Direct 4-D evaluation of T(F) phi against the kernel integrated over s.

use glfour_core::principal::{fourier_direct_many, PrincipalParam};
use glfour_core::section::Section;
use rayon::prelude::*;
use serde_json::json;

use super::{families, labeled_params, param_json};
use crate::config::SuiteConfig;
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

/// The parameter the control's kernel side is evaluated at.
fn mismatched(p: &PrincipalParam) -> Result<PrincipalParam> {
    Ok(PrincipalParam::new(p.mu1 + 0.1, p.eps1, p.mu2, p.eps2, p.sigma())?)
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let tol = cfg.kernel_oracle.tolerance;
    let params = labeled_params(cfg)?;
    let plain: Vec<PrincipalParam> = params.iter().map(|l| l.p).collect();
    let sections: Vec<Section> =
        cfg.kernel_oracle.section_centers.iter().map(|&c| Section::bump(c, cfg.kernel_oracle.section_radius)).collect();
    let fams = families(cfg)?;
    let (direct, s_rule) = (cfg.direct_rule()?, cfg.s_rule()?);

    let jobs: Vec<(usize, f64)> = fams.iter().enumerate().flat_map(|(fi, _)| cfg.grid.t.iter().map(move |&t| (fi, t))).collect();
    let blocks = jobs
        .par_iter()
        .map(|&(fi, t)| -> Result<Vec<CaseRecord>> {
            let fam = &fams[fi];
            let lhs = fourier_direct_many(&fam.f, &plain, &sections, t, direct)?;
            let rhs = fam.kernel.integrate_against(t, &plain, &sections, s_rule)?;
            let mut out = Vec::new();
            for (pi, l) in params.iter().enumerate() {
                for (j, sec) in sections.iter().enumerate() {
                    let (a, b) = (lhs[pi][j], rhs[pi][j]);
                    let scale = a.value.norm().max(b.value.norm());
                    out.push(CaseRecord::numeric(
                        format!("{}/{}/t={t:+.3}/phi{j}", fam.name, l.label),
                        json!({"f": fam.name, "param": param_json(&l.p), "t": t, "section": sec}),
                        a.value,
                        b.value,
                        a.error + b.error,
                        scale,
                        tol,
                    ));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cases: Vec<CaseRecord> = blocks.into_iter().flatten().collect();

    // Control: the kernel side at a shifted mu1.
    let fam = &fams[0];
    let t = cfg.grid.t[cfg.grid.t.len() / 2];
    let (p, sec) = (params[0].p, &sections[sections.len() / 2]);
    let a = fourier_direct_many(&fam.f, &[p], std::slice::from_ref(sec), t, direct)?[0][0];
    let wrong = mismatched(&p)?;
    let b = fam.kernel.integrate_against(t, &[wrong], std::slice::from_ref(sec), s_rule)?[0][0];
    cases.push(
        CaseRecord::numeric(
            format!("control/{}/mu1-mismatch", fam.name),
            json!({"f": fam.name, "param": param_json(&p), "kernel_param": param_json(&wrong), "t": t, "section": sec}),
            a.value,
            b.value,
            a.error + b.error,
            a.value.norm().max(b.value.norm()),
            tol,
        )
        .with_role(Role::Control),
    );
    Ok(SuiteReport::new("kernel-oracle", cases, json!({"sections": sections})))
}
