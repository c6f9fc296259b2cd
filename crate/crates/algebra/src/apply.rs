//! Numeric evaluation of kernel-side operators against a kernel family.

use glfour_core::kernel::{KernelDeriv, KernelSource};
use glfour_core::principal::PrincipalParam;
use glfour_core::quadrature::Estimate;

use crate::diffdiff::{DiffDiffOp, TermKey};
use crate::error::{AlgebraError, Result};

fn deriv_of(key: &TermKey) -> Result<KernelDeriv> {
    match (key.dt, key.ds) {
        (0, 0) => Ok(KernelDeriv::Value),
        (1, 0) => Ok(KernelDeriv::Dt),
        (0, 1) => Ok(KernelDeriv::Ds),
        _ => Err(AlgebraError::Unsupported(format!("derivative order ({}, {}) exceeds one", key.dt, key.ds))),
    }
}

/// Parameters at which `op` reads the kernel, in term order without repeats.
pub fn shifted_params(op: &DiffDiffOp, p: &PrincipalParam) -> Vec<PrincipalParam> {
    let mut out: Vec<PrincipalParam> = Vec::new();
    for (key, _) in op.terms() {
        let q = p.shifted(key.j as i32, key.k as i32);
        if !out.iter().any(|r| r.key() == q.key()) {
            out.push(q);
        }
    }
    out
}

/// `(op K)(t, s | p)`. Error bars add in absolute value.
pub fn apply_diffdiff<K: KernelSource + ?Sized>(op: &DiffDiffOp, src: &K, t: f64, s: f64, p: &PrincipalParam) -> Result<Estimate> {
    let mut acc = Estimate::default();
    for (key, c) in op.terms() {
        let coef = c.eval(t, s, p.mu1, p.mu2, p.sigma())?;
        let k = src.kernel(t, s, &p.shifted(key.j as i32, key.k as i32), deriv_of(key)?)?;
        acc = acc.add(k.scale(coef));
    }
    Ok(acc)
}
