//! The two-point kernel K(t,s|mu) of T(F), its t/s derivatives and
//! parameter-shifted variants.
//!
//! The (u,v,w) integral is evaluated in matrix coordinates (x11, x21, x22),
//! which have unit Jacobian to (u,v,w) for fixed (t,s); x12 is fixed by
//! x12 = s x11 + s t x21 - t x22. For every (t,s) the innermost variable is the
//! one with the largest coefficient in that constraint, and its range is the
//! exact intersection of its box side with the preimage of the x12 side. The
//! domain therefore always contains the whole support of F(X(u,v,w)), so
//! t and s derivatives pass under the integral without boundary terms.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::principal::{group_by_mu, PrincipalParam};
use crate::quadrature::{gauss_legendre, Estimate, PanelRule};
use crate::section::Section;
use crate::testfn::{certify_window, BumpTerm, MatrixPoint, TestFunction, WindowCertificate};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature node of the kernel integral at a fixed (t, s).
#[derive(Clone, Copy, Debug)]
pub struct KernelNode {
    pub weight: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub x: MatrixPoint,
    pub f: f64,
    /// Partials d11, d12, d21, d22 of F at `x`.
    pub grad: [f64; 4],
    /// dF(X(u,v,w;t,s))/dt and /ds.
    pub f_t: f64,
    pub f_s: f64,
    ln_u: f64,
    ln_w: f64,
}

/// Which kernel quantity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelDeriv {
    Value,
    Dt,
    Ds,
}

/// Anything that can produce kernel values at shifted parameters.
pub trait KernelSource {
    fn kernel(&self, t: f64, s: f64, p: &PrincipalParam, deriv: KernelDeriv) -> Result<Estimate>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelTriple {
    pub k: Estimate,
    pub dt: Estimate,
    pub ds: Estimate,
}

impl KernelTriple {
    pub fn get(&self, d: KernelDeriv) -> Estimate {
        match d {
            KernelDeriv::Value => self.k,
            KernelDeriv::Dt => self.dt,
            KernelDeriv::Ds => self.ds,
        }
    }
}

type NodeKey = (u64, u64, usize);
type ValueKey = (u64, u64, [u64; 6]);

const NODE_CACHE: usize = 4;

/// Kernel family of one test function on the certified window |t|,|s| <= window.
pub struct KernelFn {
    f: TestFunction,
    window: f64,
    rule: PanelRule,
    certificate: WindowCertificate,
    nodes: Mutex<VecDeque<(NodeKey, Arc<Vec<KernelNode>>)>>,
    values: Mutex<HashMap<ValueKey, KernelTriple>>,
}

fn constraint_coefs(t: f64, s: f64) -> [f64; 3] {
    // x12 = s x11 + s t x21 - t x22
    [s, s * t, -t]
}

fn term_nodes(term: &BumpTerm, t: f64, s: f64, order: usize, out: &mut Vec<KernelNode>) {
    let r = term.bbox.ranges();
    let free = [r[0], r[2], r[3]];
    let coefs = constraint_coefs(t, s);
    let gl = gauss_legendre(order);
    let map = |iv: Interval| -> Vec<(f64, f64)> {
        let half = 0.5 * iv.width();
        gl.iter().map(|&(x, w)| (iv.lo + half * (1.0 + x), half * w)).collect()
    };
    let mut push = |x11: f64, x21: f64, x22: f64, weight: f64| {
        let x12 = s * x11 + s * t * x21 - t * x22;
        let x = MatrixPoint::new(x11, x12, x21, x22);
        let jet = term.jet(&x);
        if jet.value == 0.0 && jet.grad.iter().all(|g| *g == 0.0) {
            return;
        }
        let u = x11 + t * x21;
        let w = x22 - s * x21;
        let g = jet.grad;
        out.push(KernelNode {
            weight,
            u,
            v: x21,
            w,
            x,
            f: jet.value,
            grad: g,
            f_t: -x21 * g[0] - x22 * g[1],
            f_s: x11 * g[1] + x21 * g[3],
            ln_u: u.abs().ln(),
            ln_w: w.abs().ln(),
        });
    };
    let (inner, &c) = coefs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("three coefficients");
    if c.abs() < 1e-14 {
        // t = s = 0: x12 is identically zero.
        for &(x11, w1) in &map(free[0]) {
            for &(x21, w2) in &map(free[1]) {
                for &(x22, w3) in &map(free[2]) {
                    push(x11, x21, x22, w1 * w2 * w3);
                }
            }
        }
        return;
    }
    let outer: Vec<usize> = (0..3).filter(|&i| i != inner).collect();
    let (oa, ob) = (outer[0], outer[1]);
    let na = map(free[oa]);
    let nb = map(free[ob]);
    let mut xs = [0.0; 3];
    for &(a, wa) in &na {
        for &(b, wb) in &nb {
            let rest = coefs[oa] * a + coefs[ob] * b;
            let y = Interval::new((r[1].lo - rest) / c, (r[1].hi - rest) / c);
            let Some(y) = y.intersect(&free[inner]) else { continue };
            if y.width() <= 0.0 {
                continue;
            }
            xs[oa] = a;
            xs[ob] = b;
            for &(yv, wy) in &map(y) {
                xs[inner] = yv;
                push(xs[0], xs[1], xs[2], wa * wb * wy);
            }
        }
    }
}

/// Quadrature nodes of the kernel integral at (t, s) for one order.
pub fn kernel_nodes(f: &TestFunction, t: f64, s: f64, order: usize) -> Vec<KernelNode> {
    let mut out = Vec::new();
    for term in f.terms() {
        let start = out.len();
        term_nodes(term, t, s, order, &mut out);
        // Amplitude is already inside the jet; nothing else to scale.
        debug_assert!(out[start..].iter().all(|n| n.weight > 0.0));
    }
    out
}

/// Weighted sums `sum_n weight * P_p(n) * g(n)` for each parameter p.
fn accumulate<const N: usize, G>(nodes: &[KernelNode], params: &[PrincipalParam], g: &G) -> Vec<[Complex64; N]>
where
    G: Fn(&KernelNode) -> [Complex64; N],
{
    let (uniq, which) = group_by_mu(params);
    let mut acc = vec![[ZERO; N]; params.len()];
    let mut base = vec![ZERO; uniq.len()];
    for node in nodes {
        let gv = g(node);
        for (m, &(mu1, mu2)) in uniq.iter().enumerate() {
            base[m] = ((mu1 - 1.5) * node.ln_u + (mu2 - 1.5) * node.ln_w).exp() * node.weight;
        }
        for (pi, p) in params.iter().enumerate() {
            let sign = p.eps1.sign_of(node.u) * p.eps2.sign_of(node.w);
            let b = base[which[pi]] * sign;
            for k in 0..N {
                acc[pi][k] += b * gv[k];
            }
        }
    }
    acc
}

impl KernelFn {
    pub fn new(f: TestFunction, window: f64, rule: PanelRule) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(CoreError::Precondition(format!("window must be positive, got {window}")));
        }
        let certificate = certify_window(&f, Interval::new(-window, window))?;
        Ok(Self {
            f,
            window,
            rule,
            certificate,
            nodes: Mutex::new(VecDeque::new()),
            values: Mutex::new(HashMap::new()),
        })
    }

    pub fn test_function(&self) -> &TestFunction {
        &self.f
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn rule(&self) -> PanelRule {
        self.rule
    }

    pub fn certificate(&self) -> &WindowCertificate {
        &self.certificate
    }

    fn check_window(&self, t: f64, s: f64) -> Result<()> {
        if t.abs() <= self.window && s.abs() <= self.window {
            Ok(())
        } else {
            Err(CoreError::OutsideWindow { t, s, window: self.window })
        }
    }

    fn nodes(&self, t: f64, s: f64, order: usize) -> Arc<Vec<KernelNode>> {
        let key = (t.to_bits(), s.to_bits(), order);
        {
            let cache = self.nodes.lock().unwrap_or_else(|e| e.into_inner());
            if let Some((_, n)) = cache.iter().find(|(k, _)| *k == key) {
                return n.clone();
            }
        }
        let built = Arc::new(kernel_nodes(&self.f, t, s, order));
        let mut cache = self.nodes.lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() >= NODE_CACHE {
            cache.pop_front();
        }
        cache.push_back((key, built.clone()));
        built
    }

    /// `int g(node) P_p du dv dw` for every parameter, at the rule order and its companion.
    pub fn moments<const N: usize, G>(&self, t: f64, s: f64, params: &[PrincipalParam], g: G) -> Result<Vec<[Estimate; N]>>
    where
        G: Fn(&KernelNode) -> [Complex64; N],
    {
        self.check_window(t, s)?;
        let a = accumulate(&self.nodes(t, s, self.rule.order()), params, &g);
        let b = accumulate(&self.nodes(t, s, self.rule.companion().order()), params, &g);
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| std::array::from_fn(|k| Estimate::from_pair(x[k], y[k])))
            .collect())
    }

    /// Single-order moments without touching the node cache.
    pub fn moments_at_order<const N: usize, G>(&self, t: f64, s: f64, params: &[PrincipalParam], order: usize, g: G) -> Result<Vec<[Complex64; N]>>
    where
        G: Fn(&KernelNode) -> [Complex64; N],
    {
        self.check_window(t, s)?;
        Ok(accumulate(&kernel_nodes(&self.f, t, s, order), params, &g))
    }

    /// Computes and caches K, dK/dt and dK/ds for every listed parameter.
    pub fn prefetch(&self, t: f64, s: f64, params: &[PrincipalParam]) -> Result<()> {
        let missing: Vec<PrincipalParam> = {
            let values = self.values.lock().unwrap_or_else(|e| e.into_inner());
            let mut seen = Vec::new();
            for p in params {
                let key = (t.to_bits(), s.to_bits(), p.key());
                if !values.contains_key(&key) && !seen.iter().any(|q: &PrincipalParam| q.key() == p.key()) {
                    seen.push(*p);
                }
            }
            seen
        };
        if missing.is_empty() {
            return Ok(());
        }
        let r = self.moments(t, s, &missing, |n| {
            [Complex64::new(n.f, 0.0), Complex64::new(n.f_t, 0.0), Complex64::new(n.f_s, 0.0)]
        })?;
        let mut values = self.values.lock().unwrap_or_else(|e| e.into_inner());
        for (p, [k, dt, ds]) in missing.iter().zip(r) {
            values.insert((t.to_bits(), s.to_bits(), p.key()), KernelTriple { k, dt, ds });
        }
        Ok(())
    }

    pub fn triple(&self, t: f64, s: f64, p: &PrincipalParam) -> Result<KernelTriple> {
        let key = (t.to_bits(), s.to_bits(), p.key());
        if let Some(v) = self.values.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        self.prefetch(t, s, std::slice::from_ref(p))?;
        Ok(self.values.lock().unwrap_or_else(|e| e.into_inner())[&key])
    }

    pub fn clear_values(&self) {
        self.values.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }

    pub fn kernel_k(&self, t: f64, s: f64, p: &PrincipalParam) -> Result<Estimate> {
        Ok(self.triple(t, s, p)?.k)
    }

    pub fn kernel_k_dt(&self, t: f64, s: f64, p: &PrincipalParam) -> Result<Estimate> {
        Ok(self.triple(t, s, p)?.dt)
    }

    pub fn kernel_k_ds(&self, t: f64, s: f64, p: &PrincipalParam) -> Result<Estimate> {
        Ok(self.triple(t, s, p)?.ds)
    }

    /// K at (mu_which + dir, eps_which + 1), other parameters fixed.
    pub fn kernel_shifted(&self, t: f64, s: f64, p: &PrincipalParam, which: u8, dir: i32) -> Result<Estimate> {
        let q = match which {
            1 => p.shifted(dir, 0),
            2 => p.shifted(0, dir),
            _ => return Err(CoreError::Domain(format!("shift index must be 1 or 2, got {which}"))),
        };
        self.kernel_k(t, s, &q)
    }

    /// Exact range of s for which K(t, s) can be nonzero.
    pub fn s_support(&self, t: f64) -> Option<Interval> {
        self.f
            .terms()
            .iter()
            .filter_map(|term| {
                let [x11, x12, x21, x22] = term.bbox.ranges();
                (x12 + x22 * t).div(&(x11 + x21 * t))
            })
            .reduce(|a, b| a.hull(&b))
    }

    /// `int K(t,s) phi_j(s) ds` for each parameter and section, indexed `[param][section]`.
    /// The s-rule runs on the support of K(t, .) clipped to the window; the companion
    /// estimate raises both the s order and the kernel order.
    pub fn integrate_against(&self, t: f64, params: &[PrincipalParam], sections: &[Section], s_rule: PanelRule) -> Result<Vec<Vec<Estimate>>> {
        let zero = vec![vec![Estimate::default(); sections.len()]; params.len()];
        let Some(sup) = self.s_support(t) else { return Ok(zero) };
        let Some(sup) = sup.intersect(&Interval::new(-self.window, self.window)) else { return Ok(zero) };
        let once = |s_rule: PanelRule, order: usize| -> Result<Vec<Vec<Complex64>>> {
            let mut acc = vec![vec![ZERO; sections.len()]; params.len()];
            for (s, ws) in s_rule.nodes(sup.lo, sup.hi) {
                let k = self.moments_at_order(t, s, params, order, |n| [Complex64::new(n.f, 0.0)])?;
                for (pi, kv) in k.iter().enumerate() {
                    for (j, sec) in sections.iter().enumerate() {
                        acc[pi][j] += kv[0] * (ws * sec.eval(s));
                    }
                }
            }
            Ok(acc)
        };
        let a = once(s_rule, self.rule.order())?;
        let b = once(s_rule.companion(), self.rule.companion().order())?;
        Ok(a.iter()
            .zip(&b)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| Estimate::from_pair(x, y)).collect())
            .collect())
    }
}

impl KernelSource for KernelFn {
    fn kernel(&self, t: f64, s: f64, p: &PrincipalParam, deriv: KernelDeriv) -> Result<Estimate> {
        Ok(self.triple(t, s, p)?.get(deriv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_box;
    use crate::scalars::{power_r, Parity, SignedExponent};
    use crate::testfn::BumpBox;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn id_fn() -> TestFunction {
        TestFunction::bump(BumpBox::new(MatrixPoint::identity(), [0.2; 4]).unwrap())
    }

    fn flip_fn() -> TestFunction {
        TestFunction::bump(BumpBox::new(MatrixPoint::diag(-1.0, 1.0), [0.2; 4]).unwrap())
    }

    fn param(e1: i64, e2: i64) -> PrincipalParam {
        PrincipalParam::plain(c(0.3, 0.7), Parity::new(e1), c(-0.2, -0.1), Parity::new(e2))
    }

    #[test]
    fn zero_function_gives_zero() {
        let k = KernelFn::new(TestFunction::zero(), 2.0, PanelRule::new(16, 1).unwrap()).unwrap();
        let t = k.triple(0.3, 0.2, &param(1, 0)).unwrap();
        assert_eq!(t.k.value, ZERO);
        assert_eq!(t.dt.value, ZERO);
    }

    #[test]
    fn window_is_enforced() {
        let k = KernelFn::new(id_fn(), 2.0, PanelRule::new(8, 1).unwrap()).unwrap();
        assert!(matches!(k.kernel_k(2.5, 0.0, &param(0, 0)), Err(CoreError::OutsideWindow { .. })));
        assert!(matches!(KernelFn::new(id_fn(), 10.0, PanelRule::new(8, 1).unwrap()), Err(CoreError::Certification(_))));
    }

    /// Plain tensor rule over a generous (u,v,w) hull with the literal integrand.
    fn hull_reference(f: &TestFunction, t: f64, s: f64, p: &PrincipalParam, order: usize) -> Complex64 {
        let b = f.terms()[0].bbox;
        let [x11, _, x21, x22] = b.ranges();
        let u = x11 + x21 * t;
        let w = x22 - x21 * s;
        let lo = [u.lo, x21.lo, w.lo];
        let hi = [u.hi, x21.hi, w.hi];
        integrate_box(
            |y| {
                let (u, v, w) = (y[0], y[1], y[2]);
                let x = MatrixPoint::new(u - t * v, s * u - s * t * v - t * w, v, s * v + w);
                let fx = crate::testfn::eval_f(f, &x);
                if fx == 0.0 {
                    return ZERO;
                }
                power_r(u, SignedExponent::new(p.mu1 - 1.5, p.eps1)).unwrap()
                    * power_r(w, SignedExponent::new(p.mu2 - 1.5, p.eps2)).unwrap()
                    * fx
            },
            &lo,
            &hi,
            PanelRule::new(order, 6).unwrap(),
        )
        .value
    }

    #[test]
    fn matches_literal_uvw_integral() {
        for (f, t, s) in [(id_fn(), 0.3, 0.25), (flip_fn(), -0.6, 0.55), (id_fn(), 0.0, 0.1), (id_fn(), 0.0, 0.0)] {
            let k = KernelFn::new(f.clone(), 2.0, PanelRule::new(48, 1).unwrap()).unwrap();
            for p in [param(0, 0), param(1, 0), param(0, 1), param(1, 1)] {
                let v = k.kernel_k(t, s, &p).unwrap();
                let r = hull_reference(&f, t, s, &p, 40);
                assert!((v.value - r).norm() <= 1e-7 * r.norm(), "{t} {s} {p}: {} vs {}", v.value, r);
                assert!(v.error <= 1e-8 * v.value.norm().max(1e-12), "{v:?}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = KernelFn::new(id_fn(), 2.0, PanelRule::new(48, 1).unwrap()).unwrap();
        let p = param(1, 1);
        let (t, s) = (0.3, 0.35);
        let dt = k.kernel_k_dt(t, s, &p).unwrap().value;
        let ds = k.kernel_k_ds(t, s, &p).unwrap().value;
        let fd = |h: f64, along_t: bool| {
            let (a, b) = if along_t { ((t + h, s), (t - h, s)) } else { ((t, s + h), (t, s - h)) };
            (k.kernel_k(a.0, a.1, &p).unwrap().value - k.kernel_k(b.0, b.1, &p).unwrap().value) / (2.0 * h)
        };
        for (exact, along) in [(dt, true), (ds, false)] {
            let e1 = (fd(2e-3, along) - exact).norm();
            let e2 = (fd(1e-3, along) - exact).norm();
            assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "ratio {}", e1 / e2);
            let rich = (fd(1e-3, along) * 4.0 - fd(2e-3, along)) / 3.0;
            assert!((rich - exact).norm() < 1e-7 * exact.norm());
        }
    }

    #[test]
    fn shifts_insert_u_and_inverse_w() {
        let k = KernelFn::new(flip_fn(), 2.0, PanelRule::new(32, 1).unwrap()).unwrap();
        let (t, s) = (0.2, -0.1);
        let p = param(0, 1);
        let up = k.kernel_shifted(t, s, &p, 1, 1).unwrap().value;
        let direct = k.moments(t, s, &[p], |n| [Complex64::new(n.u * n.f, 0.0)]).unwrap()[0][0].value;
        assert!((up - direct).norm() <= 1e-13 * direct.norm());
        let down = k.kernel_shifted(t, s, &p, 2, -1).unwrap().value;
        let direct = k.moments(t, s, &[p], |n| [Complex64::new(n.f / n.w, 0.0)]).unwrap()[0][0].value;
        assert!((down - direct).norm() <= 1e-13 * direct.norm());
        let back = k.kernel_shifted(t, s, &p.shifted(1, 0), 1, -1).unwrap().value;
        assert!((back - k.kernel_k(t, s, &p).unwrap().value).norm() <= 1e-12 * back.norm());
    }

    #[test]
    fn conjugation_symmetry() {
        let k = KernelFn::new(id_fn(), 2.0, PanelRule::new(24, 1).unwrap()).unwrap();
        let p = param(1, 0);
        let a = k.kernel_k(0.4, 0.5, &p).unwrap().value;
        let b = k.kernel_k(0.4, 0.5, &p.conj()).unwrap().value;
        assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn holomorphic_in_mu() {
        let k = KernelFn::new(flip_fn(), 2.0, PanelRule::new(24, 1).unwrap()).unwrap();
        let p = param(1, 0);
        let (t, s) = (0.1, -0.2);
        let h = 1e-4;
        let ev = |d1: Complex64, d2: Complex64| {
            let q = PrincipalParam::plain(p.mu1 + d1, p.eps1, p.mu2 + d2, p.eps2);
            k.moments(t, s, &[q], |n| [Complex64::new(n.f, 0.0)]).unwrap()[0][0].value
        };
        let z = ZERO;
        for which in 0..2 {
            let e = |d: Complex64| if which == 0 { ev(d, z) } else { ev(z, d) };
            let dx = (e(c(h, 0.0)) - e(c(-h, 0.0))) / (2.0 * h);
            let dy = (e(c(0.0, h)) - e(c(0.0, -h))) / (2.0 * h);
            let dbar = (dx + c(0.0, 1.0) * dy) * 0.5;
            assert!(dbar.norm() < 1e-8 * dx.norm().max(1.0), "{dbar}");
        }
    }

    #[test]
    fn s_support_is_exact_for_identity_box() {
        let k = KernelFn::new(id_fn(), 2.0, PanelRule::new(8, 1).unwrap()).unwrap();
        let sup = k.s_support(0.0).unwrap();
        assert!((sup.lo + 0.25).abs() < 1e-12 && (sup.hi - 0.25).abs() < 1e-12);
    }
}
