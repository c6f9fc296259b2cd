//! GL2(C) seed identities by randomized QMC, judged in standard errors.

use glfour_core::gl2c::{SignVariant, SpotCheck, SpotIntegrals, SpotOperator};
use rayon::prelude::*;
use serde_json::json;

use super::cjson;
use crate::config::{cx, SuiteConfig};
use crate::error::Result;
use crate::report::{CaseRecord, Role, SuiteReport};

fn variant_name(v: SignVariant) -> &'static str {
    match v {
        SignVariant::Plus => "plus",
        SignVariant::Minus => "minus",
    }
}

fn record(key: String, point: usize, c: &SpotCheck, k: f64) -> CaseRecord {
    CaseRecord::error_bars(
        key,
        json!({"point": point, "operator": c.op.name(), "variant": variant_name(c.variant), "paired_se": c.paired_se}),
        c.lhs.value,
        c.rhs.value,
        c.combined_se,
        k,
    )
}

pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let sc = &cfg.complex_spot;
    let f = sc.test_function()?;
    let p = sc.param()?;
    let k = sc.error_bars;
    let integrals = sc
        .points_ts
        .par_iter()
        .enumerate()
        .map(|(i, [t, s])| -> Result<SpotIntegrals> {
            Ok(SpotIntegrals::compute(&f, &p, cx(*t), cx(*s), sc.rule(cfg.seed.wrapping_add(i as u64))?)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cases = Vec::new();
    for (i, ints) in integrals.iter().enumerate() {
        for op in SpotOperator::ALL {
            let plus = ints.check(op, SignVariant::Plus)?;
            cases.push(record(format!("point{i}/{}", op.name()), i, &plus, k));
            if matches!(op, SpotOperator::E14 | SpotOperator::E14Bar) {
                let minus = ints.check(op, SignVariant::Minus)?;
                cases.push(record(format!("point{i}/{}/minus", op.name()), i, &minus, k).with_role(Role::Variant));
            }
        }
        if i == 0 {
            let bad = ints.exchanged(SpotOperator::E32)?;
            cases.push(record(format!("control/point{i}/E32-exchanged"), i, &bad, k).with_role(Role::Control));
        }
    }
    // Which joining sign of E14 holds at every point.
    let holds = |suffix: &str| {
        cases.iter().filter(|c| c.key.ends_with(suffix) && !c.key.starts_with("control")).all(|c| c.pass)
    };
    let e14_sign = match (holds("/E14"), holds("/E14/minus")) {
        (true, false) => "plus",
        (false, true) => "minus",
        (true, true) => "both",
        (false, false) => "neither",
    };
    let extra = json!({
        "e14_sign": e14_sign,
        "points": sc.points,
        "replicates": sc.replicates,
        "param": p,
        "ts": sc.points_ts.iter().map(|[t, s]| json!([cjson(cx(*t)), cjson(cx(*s))])).collect::<Vec<_>>(),
    });
    Ok(SuiteReport::new("complex-spot", cases, extra))
}
