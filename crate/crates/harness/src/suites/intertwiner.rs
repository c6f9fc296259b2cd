//! A composed with T(X) against T(X) with transposed parameters composed with A.

use glfour_core::principal::{apply_t, apply_t_fn, intertwiner_a, intertwiner_a_fn, pullback_support, PrincipalParam};
use glfour_core::quadrature::{Estimate, PanelRule};
use glfour_core::section::Section;
use glfour_core::testfn::MatrixPoint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::param_json;
use crate::config::{cx, parity_classes, SuiteConfig};
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

fn section() -> Section {
    Section::bump(0.1, 0.9)
}

/// `(A T_p(X) phi)(t)`.
pub fn lhs(p: &PrincipalParam, x: &MatrixPoint, phi: &Section, t: f64, rule: PanelRule) -> Result<Estimate> {
    let support = pullback_support(x, phi.support().expect("bump section"))?;
    // The pulled-back support excludes the pole of X, so T(X) phi is defined on it.
    let g = |s: f64| apply_t(p, x, phi, s).unwrap_or_default();
    Ok(intertwiner_a_fn(p, g, support, t, rule)?)
}

/// `(T_q(X) A phi)(t)`; `q` is the transposed parameter except in the control.
pub fn rhs(p: &PrincipalParam, q: &PrincipalParam, x: &MatrixPoint, phi: &Section, t: f64, rule: PanelRule) -> Result<Estimate> {
    let factor = apply_t_fn(q, x, |_| Complex64::new(1.0, 0.0), t)?;
    Ok(intertwiner_a(p, phi, x.mobius(t), rule)?.scale(factor))
}

struct Sample {
    x: MatrixPoint,
    t: f64,
}

fn samples(seed: u64, n: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut e = || rng.random_range(-0.15..0.15);
            let x = MatrixPoint::new(1.0 + e(), e(), e(), 1.0 + e());
            Sample { x, t: rng.random_range(-0.5..0.5) }
        })
        .collect()
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let ic = &cfg.intertwiner;
    let rule = PanelRule::new(ic.order, 1)?;
    let phi = section();
    let mu2 = cx(ic.mu2);
    let mut params = Vec::new();
    for (di, d) in ic.mu_differences.iter().enumerate() {
        for (e1, e2) in parity_classes() {
            params.push((format!("d{di}/e{e1}{e2}"), PrincipalParam::plain(mu2 + cx(*d), e1, mu2, e2)));
        }
    }
    let pts = samples(cfg.seed, ic.samples);
    let jobs: Vec<(usize, usize)> = (0..params.len()).flat_map(|pi| (0..pts.len()).map(move |k| (pi, k))).collect();
    let mut cases = jobs
        .par_iter()
        .map(|&(pi, k)| -> Result<CaseRecord> {
            let (label, p) = &params[pi];
            let Sample { x, t } = &pts[k];
            let a = lhs(p, x, &phi, *t, rule)?;
            let b = rhs(p, &p.swapped(), x, &phi, *t, rule)?;
            Ok(CaseRecord::numeric(
                format!("{label}/sample{k}"),
                json!({"param": param_json(p), "x": x.to_array(), "t": t}),
                a.value,
                b.value,
                a.error + b.error,
                a.value.norm().max(b.value.norm()),
                ic.tolerance,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let (_, p) = &params[0];
    let Sample { x, t } = &pts[0];
    let a = lhs(p, x, &phi, *t, rule)?;
    let b = rhs(p, p, x, &phi, *t, rule)?;
    cases.push(
        CaseRecord::numeric(
            "control/unswapped".into(),
            json!({"param": param_json(p), "x": x.to_array(), "t": t}),
            a.value,
            b.value,
            a.error + b.error,
            a.value.norm().max(b.value.norm()),
            ic.tolerance,
        )
        .with_role(Role::Control),
    );
    Ok(SuiteReport::new("intertwiner", cases, json!({"section": phi})))
}
