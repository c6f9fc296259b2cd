//! Plancherel density properties: evenness, nonnegativity, limits at zero
//! and the discrete-series values.

use std::f64::consts::PI;

use glfour_core::scalars::{plancherel_density_discrete, plancherel_density_principal, DiscreteParam, Parity};
use num_complex::Complex64;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn class(eps: Parity) -> &'static str {
    if eps.is_odd() { "coth" } else { "tanh" }
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let dc = &cfg.densities;
    let tol = dc.tolerance;
    let n = dc.grid_points.max(2);
    let grid: Vec<f64> = (0..n).map(|i| -dc.grid_max + 2.0 * dc.grid_max * i as f64 / (n - 1) as f64).collect();
    let mut cases = Vec::new();
    let mut table = Vec::new();
    for eps1 in [Parity::EVEN, Parity::ODD] {
        for eps2 in [Parity::EVEN, Parity::ODD] {
            let rho = |x: f64| plancherel_density_principal(x, 0.0, eps1, eps2);
            let key = format!("e{eps1}{eps2}");
            let inputs = json!({"eps1": eps1.value(), "eps2": eps2.value(), "class": class(eps1)});
            let odd_part = grid.iter().map(|&x| (rho(x) - rho(-x)).abs()).fold(0.0, f64::max);
            cases.push(CaseRecord::numeric(format!("{key}/even"), inputs.clone(), real(odd_part), real(0.0), 0.0, 1.0, tol));
            let negative = grid.iter().map(|&x| (-rho(x)).max(0.0)).fold(0.0, f64::max);
            cases.push(CaseRecord::numeric(format!("{key}/nonnegative"), inputs.clone(), real(negative), real(0.0), 0.0, 1.0, tol));
            // Shifting both parameters leaves the density unchanged.
            let shift = grid.iter().map(|&x| (plancherel_density_principal(x + 0.7, 0.7, eps1, eps2) - rho(x)).abs()).fold(0.0, f64::max);
            cases.push(CaseRecord::numeric(format!("{key}/difference-only"), inputs.clone(), real(shift), real(0.0), 0.0, 1.0, tol));
            let limit = if eps1.is_odd() { 1.0 / (8.0 * PI.powi(4)) } else { 0.0 };
            for x in [0.0, 1e-6, -1e-6] {
                cases.push(CaseRecord::numeric(format!("{key}/limit/x={x:+e}"), inputs.clone(), real(rho(x)), real(limit), 0.0, 1.0, tol));
            }
            let values = [0.0, 0.5, 1.0, 2.0].map(|x| [x, rho(x)]);
            table.push(json!({"class": key, "values": values}));
        }
    }
    for delta in [Parity::EVEN, Parity::ODD] {
        for k in 1..=dc.discrete_max_n {
            let p = DiscreteParam::new(k, 0.0, delta)?;
            cases.push(CaseRecord::numeric(
                format!("discrete/n={k}/delta{delta}"),
                json!({"n": k, "delta": delta.value()}),
                real(plancherel_density_discrete(&p)),
                real(k as f64 / (8.0 * PI.powi(3))),
                0.0,
                1.0,
                tol,
            ));
        }
    }
    let p = DiscreteParam::new(1, 0.0, Parity::EVEN)?;
    cases.push(
        CaseRecord::numeric(
            "control/discrete/n-plus-one".into(),
            json!({"n": 1, "claim": "(n + 1)/(8 pi^3)"}),
            real(plancherel_density_discrete(&p)),
            real(2.0 / (8.0 * PI.powi(3))),
            0.0,
            1.0,
            tol,
        )
        .with_role(Role::Control),
    );
    Ok(SuiteReport::new("densities", cases, json!({"table": table})))
}
