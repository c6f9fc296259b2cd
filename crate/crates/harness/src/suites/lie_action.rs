//! Generators of the principal series against Richardson-extrapolated central
//! differences along one-parameter subgroups.

use glfour_core::gl2c::{apply_l_c, apply_t_c, one_parameter_subgroup_c, ComplexParam, SectionC};
use glfour_core::principal::{apply_l, apply_t, one_parameter_subgroup, Gl2Index, PrincipalParam};
use glfour_core::section::Section;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::{cjson, labeled_params, param_json};
use crate::config::SuiteConfig;
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Derivative at 0 by central differences at h, h/2, h/4 with two Richardson
/// steps; returns the finer extrapolant and its distance to the coarser one.
pub fn richardson<G, E>(g: G, h: f64) -> std::result::Result<(Complex64, f64), E>
where
    G: Fn(f64) -> std::result::Result<Complex64, E>,
{
    let d = |h: f64| Ok::<_, E>((g(h)? - g(-h)?) / (2.0 * h));
    let (d1, d2, d4) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let r1 = (d2 * 4.0 - d1) / 3.0;
    let r2 = (d4 * 4.0 - d2) / 3.0;
    Ok((r2, (r2 - r1).norm()))
}

fn section() -> Section {
    Section::bump(0.1, 1.75)
}

fn section_c() -> SectionC {
    SectionC::Gaussian { center: Complex64::new(0.2, -0.1), width: 1.3 }
}

fn real_case(p: &PrincipalParam, p_l: &PrincipalParam, ij: Gl2Index, t: f64, h: f64) -> Result<(Complex64, Complex64, f64)> {
    let phi = section();
    let (fd, err) = richardson(|tau| apply_t(p, &one_parameter_subgroup(ij, tau), &phi, t), h)?;
    Ok((fd, apply_l(p_l, ij, &phi, t), err))
}

fn complex_case(p: &ComplexParam, ij: Gl2Index, bar: bool, t: Complex64, h: f64) -> Result<(Complex64, Complex64, f64)> {
    let phi = &section_c();
    let g = |dir: Complex64| move |tau: f64| apply_t_c(p, &one_parameter_subgroup_c(ij, dir * tau), phi, t);
    let (dx, ex) = richardson(g(Complex64::new(1.0, 0.0)), h)?;
    let (dy, ey) = richardson(g(I), h)?;
    let fd = if bar { (dx + I * dy) * 0.5 } else { (dx - I * dy) * 0.5 };
    Ok((fd, apply_l_c(p, ij, bar, phi, t), 0.5 * (ex + ey)))
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let lc = &cfg.lie_action;
    let params = labeled_params(cfg)?;
    let jobs: Vec<(usize, Gl2Index, f64)> = params
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| Gl2Index::ALL.into_iter().flat_map(move |ij| lc.t.iter().map(move |&t| (pi, ij, t))))
        .collect();
    let mut cases = jobs
        .par_iter()
        .map(|&(pi, ij, t)| -> Result<CaseRecord> {
            let l = &params[pi];
            let (fd, exact, err) = real_case(&l.p, &l.p, ij, t, lc.step)?;
            Ok(CaseRecord::numeric(
                format!("real/{}/{}/t={t:+.3}", l.label, ij.name()),
                json!({"param": param_json(&l.p), "generator": ij.name(), "t": t, "step": lc.step}),
                fd,
                exact,
                err,
                1.0 + exact.norm(),
                lc.tolerance,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    if lc.complex {
        let p = cfg.complex_spot.param()?;
        let jobs: Vec<(Gl2Index, bool, f64)> = Gl2Index::ALL
            .into_iter()
            .flat_map(|ij| [false, true].into_iter().flat_map(move |bar| lc.t.iter().map(move |&t| (ij, bar, t))))
            .collect();
        let more = jobs
            .par_iter()
            .map(|&(ij, bar, t)| -> Result<CaseRecord> {
                let tc = Complex64::new(t, 0.25);
                let (fd, exact, err) = complex_case(&p, ij, bar, tc, lc.step)?;
                let name = format!("{}{}", ij.name(), if bar { "bar" } else { "" });
                Ok(CaseRecord::numeric(
                    format!("complex/{name}/t={t:+.3}{:+.3}i", tc.im),
                    json!({"param": p, "generator": name, "t": cjson(tc), "step": lc.step}),
                    fd,
                    exact,
                    err,
                    1.0 + exact.norm(),
                    lc.complex_tolerance,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        cases.extend(more);
    }

    // Control: the generator evaluated at a different mu1.
    let p = params[0].p;
    let wrong = PrincipalParam::new(p.mu1 + 0.1, p.eps1, p.mu2, p.eps2, p.sigma())?;
    let t = lc.t[lc.t.len() / 2];
    let (fd, exact, err) = real_case(&p, &wrong, Gl2Index::E11, t, lc.step)?;
    cases.push(
        CaseRecord::numeric(
            "control/real/E11/mu1-mismatch".into(),
            json!({"param": param_json(&p), "generator_param": param_json(&wrong), "generator": "E11", "t": t}),
            fd,
            exact,
            err,
            1.0 + exact.norm(),
            lc.tolerance,
        )
        .with_role(Role::Control),
    );
    Ok(SuiteReport::new("lie-action", cases, json!({"section": section(), "complex_section": format!("{:?}", section_c())})))
}
