//! Gauss-Legendre panel rules, a graded rule for algebraic endpoint
//! singularities, and randomized Sobol integration.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalars::Parity;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Orders added for the companion estimate.
pub const COMPANION_STEP: usize = 4;

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(order)
        .or_insert_with(|| {
            let n = NonZeroUsize::new(order.max(1)).expect("order >= 1");
            Arc::new(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
        })
        .clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PanelRuleSpec")]
pub struct PanelRule {
    order: usize,
    panels: usize,
}

#[derive(Deserialize)]
struct PanelRuleSpec {
    order: usize,
    #[serde(default = "one")]
    panels: usize,
}

fn one() -> usize {
    1
}

impl TryFrom<PanelRuleSpec> for PanelRule {
    type Error = CoreError;
    fn try_from(s: PanelRuleSpec) -> Result<Self> {
        PanelRule::new(s.order, s.panels)
    }
}

impl PanelRule {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if order < 2 || panels < 1 {
            return Err(CoreError::Precondition(format!("panel rule needs order >= 2 and panels >= 1, got {order}/{panels}")));
        }
        Ok(Self { order, panels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Same panels, order raised by the companion step.
    pub fn companion(&self) -> PanelRule {
        PanelRule { order: self.order + COMPANION_STEP, panels: self.panels }
    }

    /// Composite nodes and weights on [a, b].
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let gl = gauss_legendre(self.order);
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.order * self.panels);
        for p in 0..self.panels {
            let lo = a + h * p as f64;
            let half = 0.5 * h;
            let mid = lo + half;
            out.extend(gl.iter().map(|&(x, w)| (mid + half * x, half * w)));
        }
        out
    }
}

/// Quadrature value with an a-posteriori error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Complex64, error: f64) -> Self {
        Self { value, error }
    }

    /// Combines a primary and a companion value.
    pub fn from_pair(primary: Complex64, companion: Complex64) -> Self {
        Self { value: companion, error: (primary - companion).norm() }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self { value: self.value * k, error: self.error * k.norm() }
    }

    pub fn add(self, o: Estimate) -> Self {
        Self { value: self.value + o.value, error: self.error + o.error }
    }

    /// Fails when the error estimate exceeds `tol`.
    pub fn check(self, tol: f64) -> Result<Self> {
        if self.error.is_finite() && self.error <= tol {
            Ok(self)
        } else {
            Err(CoreError::RefinementStall { error: self.error, tolerance: tol })
        }
    }
}

/// Order-independent pairwise summation.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        return xs.iter().fold(ZERO, |a, b| a + b);
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn tensor_sum<F: Fn(&[f64]) -> Complex64>(f: &F, axes: &[Vec<(f64, f64)>]) -> Complex64 {
    let d = axes.len();
    if d == 0 {
        return f(&[]);
    }
    let inner = &axes[d - 1];
    let outer_count: usize = axes[..d - 1].iter().map(|a| a.len()).product();
    let mut idx = vec![0usize; d - 1];
    let mut x = vec![0.0; d];
    let mut rows = Vec::with_capacity(outer_count);
    for _ in 0..outer_count {
        let mut w_outer = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            x[k] = axes[k][i].0;
            w_outer *= axes[k][i].1;
        }
        let mut row = ZERO;
        for &(xi, wi) in inner {
            x[d - 1] = xi;
            row += f(&x) * wi;
        }
        rows.push(row * w_outer);
        for k in (0..d - 1).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    pairwise_sum(&rows)
}

/// Tensor rule estimate on one rule only.
pub fn integrate_box_once<F: Fn(&[f64]) -> Complex64>(f: F, lo: &[f64], hi: &[f64], rule: PanelRule) -> Complex64 {
    assert_eq!(lo.len(), hi.len(), "box corners must have equal dimension");
    let axes: Vec<_> = lo.iter().zip(hi).map(|(&a, &b)| rule.nodes(a, b)).collect();
    tensor_sum(&f, &axes)
}

/// Tensor Gauss-Legendre estimate with the companion error `|Q(n) - Q(n+4)|`.
pub fn integrate_box<F: Fn(&[f64]) -> Complex64>(f: F, lo: &[f64], hi: &[f64], rule: PanelRule) -> Estimate {
    let a = integrate_box_once(&f, lo, hi, rule);
    let b = integrate_box_once(&f, lo, hi, rule.companion());
    Estimate::from_pair(a, b)
}

/// As [`integrate_box`], failing when the two orders disagree beyond `tol`.
pub fn integrate_box_to<F: Fn(&[f64]) -> Complex64>(f: F, lo: &[f64], hi: &[f64], rule: PanelRule, tol: f64) -> Result<Estimate> {
    integrate_box(f, lo, hi, rule).check(tol)
}

/// Weight `(at - s)^{exponent || parity}` of a one-dimensional singular integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularWeight {
    pub at: f64,
    pub exponent: Complex64,
    pub parity: Parity,
}

// Geometric panels on [t0, t1] graded toward t0 (or toward 0 when t0 = 0).
const GRADING_LEVELS: usize = 48;

fn side_integral<F: Fn(f64) -> Complex64>(g: &F, w: &SingularWeight, dir: f64, d0: f64, d1: f64, order: usize) -> Complex64 {
    let alpha = w.exponent.re;
    let p = 1.0 / (1.0 + alpha);
    let gamma = w.exponent.im * p;
    let t0 = d0.powf(1.0 + alpha);
    let t1 = d1.powf(1.0 + alpha);
    let gl = gauss_legendre(order);
    let sign = if dir > 0.0 { w.parity.sign_of(-1.0) } else { 1.0 };
    let phase = |tau: f64| Complex64::new(0.0, gamma * tau.ln()).exp();
    let mut parts = Vec::with_capacity(GRADING_LEVELS + 1);
    let mut panel = |lo: f64, hi: f64| {
        let half = 0.5 * (hi - lo);
        let mid = lo + half;
        let mut acc = ZERO;
        for &(x, wt) in gl.iter() {
            let tau = mid + half * x;
            acc += phase(tau) * g(w.at + dir * tau.powf(p)) * wt;
        }
        parts.push(acc * half);
    };
    let mut hi = t1;
    let mut level = 0;
    while hi > t0 && level < GRADING_LEVELS {
        let lo = (0.5 * hi).max(t0);
        panel(lo, hi);
        hi = lo;
        level += 1;
    }
    if hi > t0 {
        if t0 > 0.0 {
            panel(t0, hi);
        } else {
            // Remaining [0, hi]: g frozen at the singular point.
            let one_ig = Complex64::new(1.0, gamma);
            parts.push(g(w.at) * (one_ig * hi.ln()).exp() / one_ig);
        }
    }
    pairwise_sum(&parts) * (p * sign)
}

fn singular_once<F: Fn(f64) -> Complex64>(g: &F, w: &SingularWeight, a: f64, b: f64, order: usize) -> Complex64 {
    let mut total = ZERO;
    if a < w.at {
        let (d0, d1) = ((w.at - b).max(0.0), w.at - a);
        total += side_integral(g, w, -1.0, d0, d1, order);
    }
    if b > w.at {
        let (d0, d1) = ((a - w.at).max(0.0), b - w.at);
        total += side_integral(g, w, 1.0, d0, d1, order);
    }
    total
}

/// `int_a^b (at - s)^{exponent||parity} g(s) ds` for smooth `g`, Re exponent > -1.
pub fn integrate_singular_1d<F: Fn(f64) -> Complex64>(g: F, weight: SingularWeight, a: f64, b: f64, rule: PanelRule) -> Result<Estimate> {
    if !(weight.exponent.re > -1.0) {
        return Err(CoreError::Precondition(format!(
            "singular exponent real part {} must exceed -1",
            weight.exponent.re
        )));
    }
    if !(a < b) {
        return Ok(Estimate::default());
    }
    let p = singular_once(&g, &weight, a, b, rule.order());
    let q = singular_once(&g, &weight, a, b, rule.companion().order());
    Ok(Estimate::from_pair(p, q))
}

// Joe-Kuo direction-number rows (degree s, coefficient a, initial m) for dims 2..=8.
const JOE_KUO: [(u32, u32, &[u32]); 7] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

pub const SOBOL_MAX_DIMS: usize = JOE_KUO.len() + 1;

/// Sobol sequence over 32-bit integers in Gray-code order.
#[derive(Clone, Debug)]
pub struct Sobol {
    directions: Vec<[u32; 32]>,
}

impl Sobol {
    pub fn new(dims: usize) -> Result<Self> {
        if dims == 0 || dims > SOBOL_MAX_DIMS {
            return Err(CoreError::Precondition(format!("Sobol dimension {dims} outside 1..={SOBOL_MAX_DIMS}")));
        }
        let mut directions = Vec::with_capacity(dims);
        let mut first = [0u32; 32];
        for (k, v) in first.iter_mut().enumerate() {
            *v = 1u32 << (31 - k);
        }
        directions.push(first);
        for &(s, a, m) in JOE_KUO.iter().take(dims - 1) {
            let s = s as usize;
            let mut v = [0u32; 32];
            for k in 0..32 {
                v[k] = if k < s {
                    m[k] << (31 - k)
                } else {
                    let mut x = v[k - s] ^ (v[k - s] >> s);
                    for i in 1..s {
                        if (a >> (s - 1 - i)) & 1 == 1 {
                            x ^= v[k - i];
                        }
                    }
                    x
                };
            }
            directions.push(v);
        }
        Ok(Self { directions })
    }

    pub fn dims(&self) -> usize {
        self.directions.len()
    }

    /// Visits the first `n` integer points in Gray-code order.
    pub fn for_each<F: FnMut(&[u32])>(&self, n: usize, mut f: F) {
        let mut x = vec![0u32; self.dims()];
        for i in 0..n {
            f(&x);
            let c = (!i).trailing_zeros() as usize;
            for (xj, dj) in x.iter_mut().zip(&self.directions) {
                *xj ^= dj[c.min(31)];
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QmcRuleSpec")]
pub struct QmcRule {
    point_count: usize,
    replicates: usize,
    seed: u64,
}

#[derive(Deserialize)]
struct QmcRuleSpec {
    point_count: usize,
    replicates: usize,
    seed: u64,
}

impl TryFrom<QmcRuleSpec> for QmcRule {
    type Error = CoreError;
    fn try_from(s: QmcRuleSpec) -> Result<Self> {
        QmcRule::new(s.point_count, s.replicates, s.seed)
    }
}

impl QmcRule {
    /// `point_count` is the total over all replicates.
    pub fn new(point_count: usize, replicates: usize, seed: u64) -> Result<Self> {
        if point_count < 1 << 10 {
            return Err(CoreError::Precondition(format!("QMC needs at least 1024 points, got {point_count}")));
        }
        if replicates < 2 || point_count % replicates != 0 {
            return Err(CoreError::Precondition(format!(
                "QMC replicates must be >= 2 and divide the point count ({replicates} vs {point_count})"
            )));
        }
        Ok(Self { point_count, replicates, seed })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn per_replicate(&self) -> usize {
        self.point_count / self.replicates
    }

    fn shifts(&self, replicate: usize, dims: usize) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replicate as u64);
        (0..dims).map(|_| rng.next_u32()).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QmcEstimate {
    pub value: Complex64,
    pub std_error: f64,
}

/// Per-replicate means of a vector-valued integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct QmcReplicates {
    pub means: Vec<Vec<Complex64>>,
}

impl QmcReplicates {
    pub fn outputs(&self) -> usize {
        self.means.first().map_or(0, |m| m.len())
    }

    /// Estimate of `sum_i coeffs[i] * I_i`, with the spread taken per replicate.
    pub fn combination(&self, coeffs: &[(usize, Complex64)]) -> QmcEstimate {
        let vals: Vec<Complex64> = self
            .means
            .iter()
            .map(|m| coeffs.iter().map(|&(i, c)| m[i] * c).sum())
            .collect();
        let r = vals.len() as f64;
        let mean = pairwise_sum(&vals) / r;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (r - 1.0);
        QmcEstimate { value: mean, std_error: (var / r).sqrt() }
    }

    pub fn estimate(&self, i: usize) -> QmcEstimate {
        self.combination(&[(i, Complex64::new(1.0, 0.0))])
    }
}

/// Randomly shifted Sobol estimates of `outputs` integrals over a box.
/// `f` writes the integrand values at a point into its output slice.
pub fn qmc_replicates<F>(f: F, outputs: usize, lo: &[f64], hi: &[f64], rule: QmcRule) -> Result<QmcReplicates>
where
    F: Fn(&[f64], &mut [Complex64]) + Sync,
{
    let dims = lo.len();
    if hi.len() != dims {
        return Err(CoreError::Precondition("box corners must have equal dimension".into()));
    }
    let sobol = Sobol::new(dims)?;
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let n = rule.per_replicate();
    let means = (0..rule.replicates())
        .into_par_iter()
        .map(|r| {
            let shift = rule.shifts(r, dims);
            let mut x = vec![0.0; dims];
            let mut out = vec![ZERO; outputs];
            // Blocked partial sums keep the accumulation pairwise-stable.
            let block = 1024;
            let mut blocks: Vec<Vec<Complex64>> = Vec::with_capacity(n / block + 1);
            let mut acc = vec![ZERO; outputs];
            let mut count = 0;
            sobol.for_each(n, |p| {
                for k in 0..dims {
                    let u = ((p[k] ^ shift[k]) as f64 + 0.5) * (1.0 / 4294967296.0);
                    x[k] = lo[k] + (hi[k] - lo[k]) * u;
                }
                out.iter_mut().for_each(|o| *o = ZERO);
                f(&x, &mut out);
                for (a, o) in acc.iter_mut().zip(&out) {
                    *a += o;
                }
                count += 1;
                if count == block {
                    blocks.push(std::mem::replace(&mut acc, vec![ZERO; outputs]));
                    count = 0;
                }
            });
            if count > 0 {
                blocks.push(acc);
            }
            (0..outputs)
                .map(|i| {
                    let col: Vec<Complex64> = blocks.iter().map(|b| b[i]).collect();
                    pairwise_sum(&col) * (volume / n as f64)
                })
                .collect()
        })
        .collect();
    Ok(QmcReplicates { means })
}

pub fn qmc_integrate<F>(f: F, lo: &[f64], hi: &[f64], rule: QmcRule) -> Result<QmcEstimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    Ok(qmc_replicates(|x, out| out[0] = f(x), 1, lo, hi, rule)?.estimate(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::bump;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_and_polynomial_are_exact() {
        let r = PanelRule::new(2, 1).unwrap();
        let e = integrate_box(|_| c(1.0), &[0.0; 3], &[1.0; 3], r);
        assert!((e.value - c(1.0)).norm() < 1e-15);
        let e = integrate_box(|x| c(x[0] * x[0] * x[1] * x[1] * x[2] * x[2]), &[0.0; 3], &[1.0; 3], r);
        assert!((e.value - c(1.0 / 27.0)).norm() < 1e-15);
        let r4 = PanelRule::new(3, 2).unwrap();
        let e = integrate_box(|x| c(x.iter().product()), &[0.0; 4], &[2.0; 4], r4);
        assert!((e.value - c(16.0)).norm() < 1e-12);
    }

    #[test]
    fn rule_validation() {
        assert!(PanelRule::new(1, 1).is_err());
        assert!(PanelRule::new(4, 0).is_err());
        assert!(QmcRule::new(512, 2, 0).is_err());
        assert!(QmcRule::new(4096, 3, 0).is_err());
    }

    #[test]
    fn bump_profile_ladder() {
        let f = |x: &[f64]| c(x.iter().map(|&y| bump(y)).product());
        let mut vals = Vec::new();
        for order in [8, 16, 24, 32, 64] {
            vals.push(integrate_box_once(f, &[-1.0; 3], &[1.0; 3], PanelRule::new(order, 6).unwrap()));
        }
        let best = vals[4];
        let errs: Vec<f64> = vals.iter().map(|v| (v - best).norm() / best.norm()).collect();
        assert!(errs[2] < 1e-10, "order 24 relative error {}", errs[2]);
        assert!(errs[0] / errs[1] >= 10.0 && errs[1] / errs[3] >= 10.0);
    }

    #[test]
    fn stall_is_reported() {
        let f = |x: &[f64]| c(if x[0] > 0.3 { 1.0 } else { 0.0 });
        let r = integrate_box_to(f, &[0.0], &[1.0], PanelRule::new(4, 1).unwrap(), 1e-12);
        assert!(matches!(r, Err(CoreError::RefinementStall { .. })));
    }

    #[test]
    fn singular_examples() {
        let rule = PanelRule::new(12, 1).unwrap();
        let w = SingularWeight { at: 0.0, exponent: c(-0.5), parity: Parity::EVEN };
        let e = integrate_singular_1d(|_| c(1.0), w, 0.0, 1.0, rule).unwrap();
        assert!((e.value - c(2.0)).norm() < 1e-12, "{e:?}");
        let e = integrate_singular_1d(|s| c(1.0 - s * s), w, -1.0, 1.0, rule).unwrap();
        assert!((e.value - c(16.0 / 5.0)).norm() < 1e-12, "{e:?}");
        let w0 = SingularWeight { at: 0.3, exponent: c(0.0), parity: Parity::EVEN };
        let g = |s: f64| c((2.0 * s).sin() + s * s);
        let a = integrate_singular_1d(g, w0, -1.0, 1.5, rule).unwrap();
        let b = integrate_box(|x| g(x[0]), &[-1.0], &[1.5], PanelRule::new(24, 2).unwrap());
        assert!((a.value - b.value).norm() < 1e-12);
        let bad = SingularWeight { at: 0.0, exponent: c(-1.0), parity: Parity::EVEN };
        assert!(matches!(integrate_singular_1d(|_| c(1.0), bad, 0.0, 1.0, rule), Err(CoreError::Precondition(_))));
    }

    #[test]
    fn singular_oscillating_exponent() {
        // int_0^1 s^{-1/2 + i} ds = 1 / (1/2 + i), singular point at the right end, odd parity flips nothing there.
        let rule = PanelRule::new(16, 1).unwrap();
        let e = Complex64::new(-0.5, 1.0);
        let w = SingularWeight { at: 1.0, exponent: e, parity: Parity::ODD };
        let v = integrate_singular_1d(|_| c(1.0), w, 0.0, 1.0, rule).unwrap();
        let expect = c(1.0) / (e + 1.0);
        assert!((v.value - expect).norm() < 1e-12, "{v:?}");
        // Odd parity on the other side changes the sign.
        let w = SingularWeight { at: 0.0, exponent: e, parity: Parity::ODD };
        let v = integrate_singular_1d(|_| c(1.0), w, 0.0, 1.0, rule).unwrap();
        assert!((v.value + expect).norm() < 1e-12);
        // Singular point outside the interval.
        let w = SingularWeight { at: -0.5, exponent: c(0.5), parity: Parity::EVEN };
        let v = integrate_singular_1d(|_| c(1.0), w, 0.0, 1.0, rule).unwrap();
        let expect = (1.5f64.powf(1.5) - 0.5f64.powf(1.5)) / 1.5;
        assert!((v.value - c(expect)).norm() < 1e-12);
    }

    #[test]
    fn sobol_first_points() {
        let s = Sobol::new(3).unwrap();
        let mut pts = Vec::new();
        s.for_each(4, |p| pts.push(p.iter().map(|&x| x as f64 / 4294967296.0).collect::<Vec<_>>()));
        assert_eq!(pts[0], vec![0.0, 0.0, 0.0]);
        assert_eq!(pts[1], vec![0.5, 0.5, 0.5]);
        // Gray-code order visits the same set as the standard order.
        let mut second: Vec<_> = pts[2..].iter().map(|p| p[0]).collect();
        second.sort_by(f64::total_cmp);
        assert_eq!(second, vec![0.25, 0.75]);
    }

    #[test]
    fn sobol_projections_are_stratified() {
        let s = Sobol::new(SOBOL_MAX_DIMS).unwrap();
        let n = 1 << 10;
        let mut counts = vec![[0usize; 16]; SOBOL_MAX_DIMS];
        s.for_each(n, |p| {
            for (k, &x) in p.iter().enumerate() {
                counts[k][(x >> 28) as usize] += 1;
            }
        });
        for c in counts {
            assert!(c.iter().all(|&k| k == n / 16));
        }
        // Two-dimensional projections of the first 2^10 points form a (0, 10, 2)-like net in 32x32 cells for dims 1,2.
        let mut cells = vec![0usize; 1024];
        s.for_each(n, |p| cells[((p[0] >> 27) * 32 + (p[1] >> 27)) as usize] += 1);
        assert!(cells.iter().all(|&k| k == 1));
    }

    #[test]
    fn qmc_constant_is_volume() {
        let rule = QmcRule::new(1 << 12, 4, 3).unwrap();
        let lo = [0.0, -1.0, 0.0, 2.0, 0.0, 0.0];
        let hi = [1.0, 1.0, 0.5, 3.0, 2.0, 1.0];
        let e = qmc_integrate(|_| c(1.0), &lo, &hi, rule).unwrap();
        assert!((e.value - c(2.0)).norm() < 1e-13);
        assert!(e.std_error < 1e-13);
    }

    #[test]
    fn qmc_separable_bump_matches_tensor_oracle() {
        let one_d = integrate_box(|x| c(bump(x[0])), &[-1.0], &[1.0], PanelRule::new(48, 1).unwrap()).value.re;
        let rule = QmcRule::new(1 << 16, 16, 11).unwrap();
        let f = |x: &[f64]| c(x.iter().map(|&y| bump(y)).product());
        let e = qmc_integrate(f, &[-1.0; 6], &[1.0; 6], rule).unwrap();
        let expect = one_d.powi(6);
        assert!((e.value.re - expect).abs() <= 3.0 * e.std_error, "{e:?} vs {expect}");
        assert!(e.std_error < 0.02 * expect);
    }

    #[test]
    fn qmc_sine_vanishes_with_honest_error_bars() {
        let f = |x: &[f64]| c((2.0 * PI * x.iter().sum::<f64>()).sin());
        let mut inside = 0;
        for seed in 0..40 {
            let rule = QmcRule::new(1 << 12, 32, seed).unwrap();
            let e = qmc_integrate(f, &[0.0; 6], &[1.0; 6], rule).unwrap();
            if e.value.norm() <= 3.0 * e.std_error + 1e-15 {
                inside += 1;
            }
        }
        assert!(inside >= 38, "{inside}/40 within three standard errors");
    }

    #[test]
    fn qmc_is_deterministic_per_seed() {
        let f = |x: &[f64]| c(x[0] * x[1] + x[5]);
        let rule = QmcRule::new(1 << 11, 4, 99).unwrap();
        let a = qmc_integrate(f, &[0.0; 6], &[1.0; 6], rule).unwrap();
        let b = qmc_integrate(f, &[0.0; 6], &[1.0; 6], rule).unwrap();
        assert_eq!(a, b);
        let c2 = qmc_integrate(f, &[0.0; 6], &[1.0; 6], rule.with_seed(100)).unwrap();
        assert_ne!(a.value, c2.value);
    }

    proptest! {
        #[test]
        fn integrate_box_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, k in 0.5..4.0f64) {
            let r = PanelRule::new(6, 2).unwrap();
            let f = |x: &[f64]| c((k * x[0]).sin() * x[1] + x[2]);
            let g = |x: &[f64]| c((x[0] * x[1] * x[2]).exp());
            let lo = [0.0; 3];
            let hi = [1.0, 2.0, 0.5];
            let lhs = integrate_box_once(|x| f(x) * a + g(x) * b, &lo, &hi, r);
            let rhs = integrate_box_once(f, &lo, &hi, r) * a + integrate_box_once(g, &lo, &hi, r) * b;
            prop_assert!((lhs - rhs).norm() <= 1e-13 * (a.abs() * 4.0 + b.abs() * 4.0));
        }
    }
}
