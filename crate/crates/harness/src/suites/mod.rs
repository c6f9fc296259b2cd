//! The verification suites. Each takes a validated config and returns one
//! report; cases run on the rayon pool and are collected in declaration order.

use glfour_core::kernel::KernelFn;
use glfour_core::principal::PrincipalParam;
use glfour_core::testfn::TestFunction;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{cx, parity_classes, SuiteConfig};
use crate::error::Result;

pub mod commutators;
pub mod complex_spot;
pub mod densities;
pub mod intertwiner;
pub mod kernel_oracle;
pub mod lemmas;
pub mod lie_action;
pub mod main_theorem;

pub const NAMES: [&str; 8] =
    ["kernel-oracle", "main-theorem", "lemmas", "commutators", "lie-action", "intertwiner", "densities", "complex-spot"];

pub(crate) fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub(crate) fn param_json(p: &PrincipalParam) -> Value {
    json!({
        "mu1": cjson(p.mu1),
        "eps1": p.eps1.value(),
        "mu2": cjson(p.mu2),
        "eps2": p.eps2.value(),
        "sigma": cjson(p.sigma()),
    })
}

/// A principal parameter with a stable label such as `mu1/e01/sig0`.
#[derive(Clone, Debug)]
pub(crate) struct Labeled {
    pub label: String,
    pub p: PrincipalParam,
}

pub(crate) fn labeled_params(cfg: &SuiteConfig) -> Result<Vec<Labeled>> {
    let mut out = Vec::new();
    for (si, sigma) in cfg.params.sigma.iter().enumerate() {
        for (mi, [m1, m2]) in cfg.params.mu.iter().enumerate() {
            for (e1, e2) in parity_classes() {
                let p = PrincipalParam::new(cx(*m1), e1, cx(*m2), e2, cx(*sigma))?;
                out.push(Labeled { label: format!("mu{mi}/e{e1}{e2}/sig{si}"), p });
            }
        }
    }
    Ok(out)
}

/// Named test functions with their kernel evaluators.
pub(crate) struct Family {
    pub name: String,
    pub f: TestFunction,
    pub kernel: KernelFn,
    pub ts: Vec<(f64, f64)>,
}

pub(crate) fn families(cfg: &SuiteConfig) -> Result<Vec<Family>> {
    cfg.test_functions
        .iter()
        .map(|spec| {
            let f = spec.build()?;
            let kernel = KernelFn::new(f.clone(), cfg.window, cfg.kernel_rule()?)?;
            Ok(Family { name: spec.name.clone(), f, kernel, ts: cfg.ts_grid(spec) })
        })
        .collect()
}

/// Parameters sharing one sigma, in order of first appearance.
pub(crate) fn sigma_groups(params: &[Labeled]) -> Vec<(Complex64, Vec<usize>)> {
    let mut groups: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for (i, l) in params.iter().enumerate() {
        match groups.iter_mut().find(|(s, _)| *s == l.p.sigma()) {
            Some((_, v)) => v.push(i),
            None => groups.push((l.p.sigma(), vec![i])),
        }
    }
    groups
}
