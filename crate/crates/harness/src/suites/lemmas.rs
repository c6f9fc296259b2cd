//! The four integration-by-parts identities behind the E14 and E32 formulas,
//! each side integrated separately over the kernel domain.

use glfour_core::kernel::KernelNode;
use glfour_core::principal::PrincipalParam;
use glfour_core::quadrature::Estimate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::{families, labeled_params, param_json, Family};
use crate::config::SuiteConfig;
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

const D12F: usize = 0;
const FS: usize = 1;
const FT: usize = 2;
const F_VUW: usize = 3;
const G: usize = 4;
const VF: usize = 5;
const U_FT: usize = 6;
const W_FS: usize = 7;
const F: usize = 8;
const OUT: usize = 9;

fn integrands(n: &KernelNode) -> [Complex64; OUT] {
    let [x11, _, x21, x22] = n.x.to_array();
    let [g11, g12, g21, g22] = n.grad;
    let g = -(x11 * x21 * g11 + x11 * x22 * g12 + x21 * x21 * g21 + x21 * x22 * g22);
    [n.grad[1], n.f_s, n.f_t, n.f * n.v / (n.u * n.w), g, n.v * n.f, n.u * n.f_t, n.w * n.f_s, n.f].map(|x| Complex64::new(x, 0.0))
}

/// Integrals of every integrand against P, P/u and P/w.
struct Moments {
    p: [Estimate; OUT],
    over_u: [Estimate; OUT],
    over_w: [Estimate; OUT],
}

/// A signed sum of estimates; the scale is the largest summand.
struct Side {
    value: Complex64,
    error: f64,
    scale: f64,
}

fn side(parts: &[(Complex64, Estimate)]) -> Side {
    parts.iter().fold(Side { value: Complex64::default(), error: 0.0, scale: 0.0 }, |acc, (c, e)| {
        let v = c * e.value;
        Side { value: acc.value + v, error: acc.error + c.norm() * e.error, scale: acc.scale.max(v.norm()) }
    })
}

/// LHS and RHS of identity `which` (1..=4). `mu_rhs` replaces the parameter
/// on the right of identities 1 and 2 (the control swaps it).
fn identity(which: usize, m: &Moments, p: &PrincipalParam, mu_rhs: Option<Complex64>) -> (Side, Side) {
    let one = Complex64::new(1.0, 0.0);
    let sm1 = p.sigma() - 1.0;
    match which {
        1 => (
            side(&[(one, m.p[D12F]), (-one, m.over_u[FS])]),
            side(&[(mu_rhs.unwrap_or(p.mu2) - 1.5, m.p[F_VUW])]),
        ),
        2 => (
            side(&[(one, m.p[D12F]), (one, m.over_w[FT])]),
            side(&[(mu_rhs.unwrap_or(p.mu1) - 1.5, m.p[F_VUW])]),
        ),
        3 => (side(&[(one, m.p[G]), (sm1, m.p[VF]), (-one, m.p[U_FT])]), side(&[(p.mu2 + 0.5 + p.sigma(), m.p[VF])])),
        _ => (side(&[(one, m.p[G]), (sm1, m.p[VF]), (one, m.p[W_FS])]), side(&[(p.mu1 + 0.5 + p.sigma(), m.p[VF])])),
    }
}

fn moments(fam: &Family, t: f64, s: f64, params: &[PrincipalParam]) -> Result<Vec<Moments>> {
    let all: Vec<PrincipalParam> = params.iter().flat_map(|p| [*p, p.shifted(-1, 0), p.shifted(0, -1)]).collect();
    let m = fam.kernel.moments::<OUT, _>(t, s, &all, integrands)?;
    Ok(m.chunks(3).map(|c| Moments { p: c[0], over_u: c[1], over_w: c[2] }).collect())
}

/// The scale is the largest single integral in the identity, floored by the
/// kernel value so that identities whose terms all vanish by symmetry are not
/// judged on roundoff.
fn record(key: String, inputs: serde_json::Value, (l, r): (Side, Side), kernel: f64, tol: f64) -> CaseRecord {
    let scale = l.scale.max(r.scale).max(kernel);
    CaseRecord::numeric(key, inputs, l.value, r.value, l.error + r.error, scale, tol)
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let tol = cfg.lemmas.tolerance;
    let params = labeled_params(cfg)?;
    let plain: Vec<PrincipalParam> = params.iter().map(|l| l.p).collect();
    let fams = families(cfg)?;
    let jobs: Vec<(usize, f64, f64)> =
        fams.iter().enumerate().flat_map(|(fi, fam)| fam.ts.iter().map(move |&(t, s)| (fi, t, s))).collect();
    let blocks = jobs
        .par_iter()
        .map(|&(fi, t, s)| -> Result<Vec<CaseRecord>> {
            let fam = &fams[fi];
            let ms = moments(fam, t, s, &plain)?;
            let mut out = Vec::new();
            for (l, m) in params.iter().zip(&ms) {
                for which in 1..=4 {
                    out.push(record(
                        format!("{}/t={t:+.3}/s={s:+.4}/{}/eq{which}", fam.name, l.label),
                        json!({"f": fam.name, "t": t, "s": s, "param": param_json(&l.p), "identity": which}),
                        identity(which, m, &l.p, None),
                        m.p[F].value.norm(),
                        tol,
                    ));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cases: Vec<CaseRecord> = blocks.into_iter().flatten().collect();

    let fam = &fams[0];
    let (t, s) = fam.ts[0];
    let p = params[0].p;
    let m = &moments(fam, t, s, &[p])?[0];
    cases.push(
        record(
            format!("control/{}/eq1-mu1-for-mu2", fam.name),
            json!({"f": fam.name, "t": t, "s": s, "param": param_json(&p), "identity": 1}),
            identity(1, m, &p, Some(p.mu1)),
            m.p[F].value.norm(),
            tol,
        )
        .with_role(Role::Control),
    );
    Ok(SuiteReport::new("lemmas", cases, json!({"scale": "largest single integral in the identity, at least |K(t, s)|"})))
}
