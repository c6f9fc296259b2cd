//! GL2(C): bi-power principal series, the doubled Lie action, six-dimensional
//! kernels by randomized QMC, and spot checks of the four seed operators.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::quadrature::{qmc_replicates, QmcEstimate, QmcReplicates, QmcRule};
use crate::scalars::{bi_power_ln, integer_difference, power_c, BiExponent};
use crate::testfn::{bump, bump_deriv};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// (mu1, mu1'; mu2, mu2') with integer differences, plus (sigma, sigma').
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexParam {
    pub mu1: Complex64,
    k1: i64,
    pub mu2: Complex64,
    k2: i64,
    sigma: Complex64,
    sigmap: Complex64,
}

/// Unit shift of one of the four exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftC {
    V1,
    V1p,
    V2,
    V2p,
}

impl ComplexParam {
    pub fn new(mu1: Complex64, mu1p: Complex64, mu2: Complex64, mu2p: Complex64, sigma: Complex64, sigmap: Complex64) -> Result<Self> {
        if sigma.re != 0.0 || sigmap.re != 0.0 {
            return Err(CoreError::Domain(format!("sigma, sigma' must be imaginary, got {sigma}, {sigmap}")));
        }
        Ok(Self {
            mu1,
            k1: integer_difference(mu1, mu1p)?,
            mu2,
            k2: integer_difference(mu2, mu2p)?,
            sigma,
            sigmap,
        })
    }

    pub fn mu1p(&self) -> Complex64 {
        self.mu1 + self.k1 as f64
    }

    pub fn mu2p(&self) -> Complex64 {
        self.mu2 + self.k2 as f64
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn sigmap(&self) -> Complex64 {
        self.sigmap
    }

    pub fn is_tempered(&self) -> bool {
        (self.mu1 + self.mu1p()).re.abs() < 1e-12 && (self.mu2 + self.mu2p()).re.abs() < 1e-12
    }

    /// (mu1 - mu2)(mu1' - mu2'), the Plancherel density factor up to a constant.
    pub fn plancherel_factor(&self) -> Complex64 {
        (self.mu1 - self.mu2) * (self.mu1p() - self.mu2p())
    }

    pub fn shifted(&self, which: ShiftC, dir: i64) -> Self {
        let mut q = *self;
        let d = dir as f64;
        match which {
            ShiftC::V1 => {
                q.mu1 += d;
                q.k1 -= dir;
            }
            ShiftC::V1p => q.k1 += dir,
            ShiftC::V2 => {
                q.mu2 += d;
                q.k2 -= dir;
            }
            ShiftC::V2p => q.k2 += dir,
        }
        q
    }

    /// conj of every exponent with the primed and unprimed roles exchanged.
    pub fn conj_swapped(&self) -> Self {
        Self {
            mu1: self.mu1p().conj(),
            k1: -self.k1,
            mu2: self.mu2p().conj(),
            k2: -self.k2,
            sigma: self.sigmap.conj(),
            sigmap: self.sigma.conj(),
        }
    }

    pub fn conj(&self) -> Self {
        Self { mu1: self.mu1.conj(), mu2: self.mu2.conj(), sigma: self.sigma.conj(), sigmap: self.sigmap.conj(), ..*self }
    }

    pub fn cocycle_exponent(&self) -> BiExponent {
        BiExponent::from_shift(self.mu1 - self.mu2 - 1.0, self.k1 - self.k2)
    }

    pub fn det_exponent(&self) -> BiExponent {
        BiExponent::from_shift(self.mu2 + 0.5, self.k2)
    }

    pub fn u_exponent(&self) -> BiExponent {
        BiExponent::from_shift(self.mu1 - 1.5, self.k1)
    }

    pub fn w_exponent(&self) -> BiExponent {
        BiExponent::from_shift(self.mu2 - 1.5, self.k2)
    }
}

impl fmt::Display for ComplexParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.mu1, self.mu1p(), self.mu2, self.mu2p())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    /// Entries x11, x12, x21, x22.
    pub x: [Complex64; 4],
}

impl ComplexMatrix {
    pub fn new(x11: Complex64, x12: Complex64, x21: Complex64, x22: Complex64) -> Self {
        Self { x: [x11, x12, x21, x22] }
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn det(&self) -> Complex64 {
        self.x[0] * self.x[3] - self.x[1] * self.x[2]
    }

    pub fn mul(&self, o: &ComplexMatrix) -> ComplexMatrix {
        let [a, b, c, d] = self.x;
        let [e, f, g, h] = o.x;
        ComplexMatrix::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn mobius(&self, t: Complex64) -> Complex64 {
        (self.x[1] + t * self.x[3]) / (self.x[0] + t * self.x[2])
    }
}

/// Index of a complex gl2 generator.
pub use crate::principal::Gl2Index;

/// exp(tau E_ij) for complex tau.
pub fn one_parameter_subgroup_c(ij: Gl2Index, tau: Complex64) -> ComplexMatrix {
    match ij {
        Gl2Index::E11 => ComplexMatrix::new(tau.exp(), ZERO, ZERO, ONE),
        Gl2Index::E12 => ComplexMatrix::new(ONE, tau, ZERO, ONE),
        Gl2Index::E21 => ComplexMatrix::new(ONE, ZERO, tau, ONE),
        Gl2Index::E22 => ComplexMatrix::new(ONE, ZERO, ZERO, tau.exp()),
    }
}

/// Scalar function on C with Wirtinger derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionC {
    /// `sum c t^a tbar^b` over `(a, b, c)`.
    Polynomial { terms: Vec<(u32, u32, Complex64)> },
    /// `exp(-|t - center|^2 / width^2)`.
    Gaussian { center: Complex64, width: f64 },
}

impl SectionC {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        match self {
            SectionC::Polynomial { terms } => terms.iter().map(|&(a, b, c)| c * t.powu(a) * t.conj().powu(b)).sum(),
            SectionC::Gaussian { center, width } => Complex64::new((-(t - center).norm_sqr() / (width * width)).exp(), 0.0),
        }
    }

    /// d/dt.
    pub fn d_t(&self, t: Complex64) -> Complex64 {
        match self {
            SectionC::Polynomial { terms } => terms
                .iter()
                .filter(|(a, _, _)| *a > 0)
                .map(|&(a, b, c)| c * a as f64 * t.powu(a - 1) * t.conj().powu(b))
                .sum(),
            SectionC::Gaussian { center, width } => -(t - center).conj() / (width * width) * self.eval(t),
        }
    }

    /// d/d tbar.
    pub fn d_tbar(&self, t: Complex64) -> Complex64 {
        match self {
            SectionC::Polynomial { terms } => terms
                .iter()
                .filter(|(_, b, _)| *b > 0)
                .map(|&(a, b, c)| c * b as f64 * t.powu(a) * t.conj().powu(b - 1))
                .sum(),
            SectionC::Gaussian { center, width } => -(t - center) / (width * width) * self.eval(t),
        }
    }
}

pub fn apply_t_c_fn<P: Fn(Complex64) -> Complex64>(p: &ComplexParam, x: &ComplexMatrix, phi: P, t: Complex64) -> Result<Complex64> {
    let u = x.x[0] + t * x.x[2];
    if u == ZERO {
        return Err(CoreError::Pole(format!("x11 + t x21 = 0 at t = {t}")));
    }
    let det = x.det();
    if det == ZERO {
        return Err(CoreError::Domain("T(X) needs an invertible X".into()));
    }
    let s = (x.x[1] + t * x.x[3]) / u;
    Ok(phi(s) * power_c(u, p.cocycle_exponent())? * power_c(det, p.det_exponent())?)
}

pub fn apply_t_c(p: &ComplexParam, x: &ComplexMatrix, phi: &SectionC, t: Complex64) -> Result<Complex64> {
    apply_t_c_fn(p, x, |s| phi.eval(s), t)
}

/// L_ij (holomorphic, `bar = false`) or its antiholomorphic copy.
pub fn apply_l_c(p: &ComplexParam, ij: Gl2Index, bar: bool, phi: &SectionC, t: Complex64) -> Complex64 {
    let (tt, d, m1, m2) = if bar {
        (t.conj(), phi.d_tbar(t), p.mu1p(), p.mu2p())
    } else {
        (t, phi.d_t(t), p.mu1, p.mu2)
    };
    let f = phi.eval(t);
    match ij {
        Gl2Index::E11 => -tt * d + (m1 - 0.5) * f,
        Gl2Index::E12 => d,
        Gl2Index::E21 => -tt * tt * d + tt * (m1 - m2 - 1.0) * f,
        Gl2Index::E22 => tt * d + (m2 + 0.5) * f,
    }
}

/// Product of eight 1-D bumps over the real and imaginary parts of the entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexTestFunction {
    center: [Complex64; 4],
    /// Radii of (Re, Im) per entry.
    radii: [[f64; 2]; 4],
}

/// Value with holomorphic and antiholomorphic Wirtinger partials.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JetC {
    pub value: f64,
    pub d: [Complex64; 4],
    pub dbar: [Complex64; 4],
}

impl ComplexTestFunction {
    pub fn new(center: [Complex64; 4], radii: [[f64; 2]; 4]) -> Result<Self> {
        if radii.iter().flatten().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(CoreError::Domain("complex box radii must be positive".into()));
        }
        let f = Self { center, radii };
        let (re, im) = f.det_range();
        if re.contains_zero() && im.contains_zero() {
            return Err(CoreError::Certification(format!(
                "complex box may meet det = 0 (Re det in [{}, {}], Im det in [{}, {}])",
                re.lo, re.hi, im.lo, im.hi
            )));
        }
        Ok(f)
    }

    pub fn center(&self) -> [Complex64; 4] {
        self.center
    }

    /// Real and imaginary ranges per entry.
    pub fn ranges(&self) -> [(Interval, Interval); 4] {
        std::array::from_fn(|i| {
            (
                Interval::centered(self.center[i].re, self.radii[i][0]),
                Interval::centered(self.center[i].im, self.radii[i][1]),
            )
        })
    }

    fn det_range(&self) -> (Interval, Interval) {
        let r = self.ranges();
        let (a, b) = cmul(r[0], r[3]);
        let (c, d) = cmul(r[1], r[2]);
        (a - c, b - d)
    }

    /// Lower bound of |x11 + t x21| over the support and |Re t|, |Im t| <= t_max.
    pub fn certify_window(&self, t_max: f64) -> Result<f64> {
        let r = self.ranges();
        let t = (Interval::new(-t_max, t_max), Interval::new(-t_max, t_max));
        let (pr, pi) = cmul(t, r[2]);
        let ure = r[0].0 + pr;
        let uim = r[0].1 + pi;
        let bound = ure.abs_min().max(uim.abs_min());
        if bound == 0.0 {
            return Err(CoreError::Certification(format!("x11 + t x21 can vanish for |Re t|, |Im t| <= {t_max}")));
        }
        Ok(bound)
    }

    pub fn jet(&self, x: &[Complex64; 4]) -> JetC {
        let mut b = [[0.0; 2]; 4];
        let mut db = [[0.0; 2]; 4];
        for i in 0..4 {
            let parts = [x[i].re - self.center[i].re, x[i].im - self.center[i].im];
            for k in 0..2 {
                let y = parts[k] / self.radii[i][k];
                if y.abs() >= 1.0 {
                    return JetC::default();
                }
                b[i][k] = bump(y);
                db[i][k] = bump_deriv(y) / self.radii[i][k];
            }
        }
        let all: f64 = b.iter().map(|p| p[0] * p[1]).product();
        let mut d = [ZERO; 4];
        let mut dbar = [ZERO; 4];
        for i in 0..4 {
            let others: f64 = (0..4).filter(|&j| j != i).map(|j| b[j][0] * b[j][1]).product();
            let dre = db[i][0] * b[i][1] * others;
            let dim = b[i][0] * db[i][1] * others;
            d[i] = Complex64::new(0.5 * dre, -0.5 * dim);
            dbar[i] = Complex64::new(0.5 * dre, 0.5 * dim);
        }
        JetC { value: all, d, dbar }
    }

    pub fn eval(&self, x: &[Complex64; 4]) -> f64 {
        self.jet(x).value
    }
}

fn cmul(a: (Interval, Interval), b: (Interval, Interval)) -> (Interval, Interval) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Evaluation point of the complex kernel integral.
#[derive(Clone, Copy, Debug)]
pub struct ComplexNode {
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub x: [Complex64; 4],
    pub jet: JetC,
    ln_u2: f64,
    ln_w2: f64,
}

impl ComplexNode {
    /// Kernel weight u^{..} w^{..} at parameter `p`.
    pub fn weight(&self, p: &ComplexParam) -> Complex64 {
        bi_power_ln(self.u, self.ln_u2, p.u_exponent()) * bi_power_ln(self.w, self.ln_w2, p.w_exponent())
    }

    /// dF/dt along the kernel chart (holomorphic Wirtinger).
    pub fn f_t(&self) -> Complex64 {
        -self.x[2] * self.jet.d[0] - self.x[3] * self.jet.d[1]
    }

    pub fn f_s(&self) -> Complex64 {
        self.x[0] * self.jet.d[1] + self.x[2] * self.jet.d[3]
    }

    pub fn f_tbar(&self) -> Complex64 {
        -self.x[2].conj() * self.jet.dbar[0] - self.x[3].conj() * self.jet.dbar[1]
    }

    pub fn f_sbar(&self) -> Complex64 {
        self.x[0].conj() * self.jet.dbar[1] + self.x[2].conj() * self.jet.dbar[3]
    }
}

/// QMC moments `int g(node) du dv dw` over the six real coordinates of (x11, x21, x22).
pub fn complex_moments<G>(f: &ComplexTestFunction, t: Complex64, s: Complex64, outputs: usize, rule: QmcRule, g: G) -> Result<QmcReplicates>
where
    G: Fn(&ComplexNode, &mut [Complex64]) + Sync,
{
    let r = f.ranges();
    let lo = [r[0].0.lo, r[0].1.lo, r[2].0.lo, r[2].1.lo, r[3].0.lo, r[3].1.lo];
    let hi = [r[0].0.hi, r[0].1.hi, r[2].0.hi, r[2].1.hi, r[3].0.hi, r[3].1.hi];
    qmc_replicates(
        |y, out| {
            let x11 = Complex64::new(y[0], y[1]);
            let x21 = Complex64::new(y[2], y[3]);
            let x22 = Complex64::new(y[4], y[5]);
            let x12 = s * x11 + s * t * x21 - t * x22;
            let x = [x11, x12, x21, x22];
            let jet = f.jet(&x);
            if jet.value == 0.0 {
                return;
            }
            let u = x11 + t * x21;
            let w = x22 - s * x21;
            let node = ComplexNode { u, v: x21, w, x, jet, ln_u2: u.norm_sqr().ln(), ln_w2: w.norm_sqr().ln() };
            g(&node, out);
        },
        outputs,
        &lo,
        &hi,
        rule,
    )
}

pub fn kernel_k_c(f: &ComplexTestFunction, p: &ComplexParam, t: Complex64, s: Complex64, rule: QmcRule) -> Result<QmcEstimate> {
    Ok(complex_moments(f, t, s, 1, rule, |n, out| out[0] = n.weight(p) * n.jet.value)?.estimate(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpotOperator {
    E14,
    E14Bar,
    E32,
    E32Bar,
}

impl SpotOperator {
    pub const ALL: [SpotOperator; 4] = [SpotOperator::E14, SpotOperator::E14Bar, SpotOperator::E32, SpotOperator::E32Bar];

    pub fn name(&self) -> &'static str {
        match self {
            SpotOperator::E14 => "E14",
            SpotOperator::E14Bar => "E14bar",
            SpotOperator::E32 => "E32",
            SpotOperator::E32Bar => "E32bar",
        }
    }
}

/// Sign joining the two summands of a seed operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignVariant {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpotCheck {
    pub op: SpotOperator,
    pub variant: SignVariant,
    pub lhs: QmcEstimate,
    pub rhs: QmcEstimate,
    /// |LHS - RHS|.
    pub residual: f64,
    /// sqrt(se_lhs^2 + se_rhs^2).
    pub combined_se: f64,
    /// Standard error of the paired difference.
    pub paired_se: f64,
}

impl SpotCheck {
    pub fn within(&self, k: f64) -> bool {
        self.residual <= k * self.combined_se
    }
}

// Output slots of the spot-check integrands.
const L14: usize = 0;
const A14: usize = 1;
const B14: usize = 2;
const L14B: usize = 3;
const A14B: usize = 4;
const B14B: usize = 5;
const L32: usize = 6;
const A32: usize = 7;
const B32: usize = 8;
const L32B: usize = 9;
const A32B: usize = 10;
const B32B: usize = 11;
const SLOTS: usize = 12;

fn spot_integrands(p: &ComplexParam, n: &ComplexNode, out: &mut [Complex64]) {
    let f = n.jet.value;
    let [x11, _x12, x21, x22] = n.x;
    let (d, db) = (n.jet.d, n.jet.dbar);
    let det = n.u * n.w;
    let base = n.weight(p);
    let sm1 = p.sigma - 1.0;
    let sm1p = p.sigmap - 1.0;
    out[L14] = (d[1] - sm1 * x21 / det * f) * base;
    out[L14B] = (db[1] - sm1p * x21.conj() / det.conj() * f) * base;
    let e32 = -(x11 * x21 * d[0] + x11 * x22 * d[1] + x21 * x21 * d[2] + x21 * x22 * d[3]) + sm1 * x21 * f;
    let e32b = -(x11.conj() * x21.conj() * db[0]
        + x11.conj() * x22.conj() * db[1]
        + x21.conj() * x21.conj() * db[2]
        + x21.conj() * x22.conj() * db[3])
        + sm1p * x21.conj() * f;
    out[L32] = e32 * base;
    out[L32B] = e32b * base;
    let shifted = |which, dir| n.weight(&p.shifted(which, dir));
    out[A14] = n.f_s() * shifted(ShiftC::V1, -1);
    out[B14] = n.f_t() * shifted(ShiftC::V2, -1);
    out[A14B] = n.f_sbar() * shifted(ShiftC::V1p, -1);
    out[B14B] = n.f_tbar() * shifted(ShiftC::V2p, -1);
    out[A32] = n.f_t() * shifted(ShiftC::V1, 1);
    out[B32] = n.f_s() * shifted(ShiftC::V2, 1);
    out[A32B] = n.f_tbar() * shifted(ShiftC::V1p, 1);
    out[B32B] = n.f_sbar() * shifted(ShiftC::V2p, 1);
}

fn spot_coefficients(p: &ComplexParam, op: SpotOperator) -> Result<(Complex64, Complex64, [usize; 3])> {
    let (m1, m2, sg) = match op {
        SpotOperator::E14 | SpotOperator::E32 => (p.mu1, p.mu2, p.sigma),
        SpotOperator::E14Bar | SpotOperator::E32Bar => (p.mu1p(), p.mu2p(), p.sigmap),
    };
    let den = m1 - m2;
    if den.norm() < 1e-12 {
        return Err(CoreError::Pole(format!("{} has a pole at mu1 = mu2", op.name())));
    }
    Ok(match op {
        SpotOperator::E14 => ((m1 - 0.5 - sg) / den, (m2 - 0.5 - sg) / den, [L14, A14, B14]),
        SpotOperator::E14Bar => ((m1 - 0.5 - sg) / den, (m2 - 0.5 - sg) / den, [L14B, A14B, B14B]),
        SpotOperator::E32 => ((m1 + 0.5 + sg) / den, (m2 + 0.5 + sg) / den, [L32, A32, B32]),
        SpotOperator::E32Bar => ((m1 + 0.5 + sg) / den, (m2 + 0.5 + sg) / den, [L32B, A32B, B32B]),
    })
}

/// The twelve integrals behind the four seed identities, from one QMC pass.
#[derive(Clone, Debug)]
pub struct SpotIntegrals {
    p: ComplexParam,
    reps: QmcReplicates,
}

impl SpotIntegrals {
    pub fn compute(f: &ComplexTestFunction, p: &ComplexParam, t: Complex64, s: Complex64, rule: QmcRule) -> Result<Self> {
        for op in SpotOperator::ALL {
            spot_coefficients(p, op)?;
        }
        let reps = complex_moments(f, t, s, SLOTS, rule, |n, out| spot_integrands(p, n, out))?;
        Ok(Self { p: *p, reps })
    }

    pub fn check(&self, op: SpotOperator, variant: SignVariant) -> Result<SpotCheck> {
        let (c1, c2, slots) = spot_coefficients(&self.p, op)?;
        let c2 = if variant == SignVariant::Plus { c2 } else { -c2 };
        Ok(self.compare(op, variant, c1, c2, slots))
    }

    /// The plus-sign identity with its two coefficients exchanged. Never holds
    /// unless both shifted integrals agree; used as a negative control.
    pub fn exchanged(&self, op: SpotOperator) -> Result<SpotCheck> {
        let (c1, c2, slots) = spot_coefficients(&self.p, op)?;
        Ok(self.compare(op, SignVariant::Plus, c2, c1, slots))
    }

    fn compare(&self, op: SpotOperator, variant: SignVariant, c1: Complex64, c2: Complex64, [l, a, b]: [usize; 3]) -> SpotCheck {
        let lhs = self.reps.estimate(l);
        let rhs = self.reps.combination(&[(a, c1), (b, c2)]);
        let diff = self.reps.combination(&[(l, ONE), (a, -c1), (b, -c2)]);
        SpotCheck {
            op,
            variant,
            lhs,
            rhs,
            residual: (lhs.value - rhs.value).norm(),
            combined_se: (lhs.std_error.powi(2) + rhs.std_error.powi(2)).sqrt(),
            paired_se: diff.std_error,
        }
    }
}

/// Every seed identity from one QMC pass. Each E14 operator is evaluated with
/// both sign variants, each E32 operator with the plus sign.
pub fn e_c_spotcheck_all(f: &ComplexTestFunction, p: &ComplexParam, t: Complex64, s: Complex64, rule: QmcRule) -> Result<Vec<SpotCheck>> {
    let ints = SpotIntegrals::compute(f, p, t, s, rule)?;
    let mut out = Vec::new();
    for op in SpotOperator::ALL {
        let variants: &[SignVariant] = match op {
            SpotOperator::E14 | SpotOperator::E14Bar => &[SignVariant::Plus, SignVariant::Minus],
            _ => &[SignVariant::Plus],
        };
        for &v in variants {
            out.push(ints.check(op, v)?);
        }
    }
    Ok(out)
}

pub fn e_c_spotcheck(
    which: SpotOperator,
    variant: SignVariant,
    f: &ComplexTestFunction,
    p: &ComplexParam,
    t: Complex64,
    s: Complex64,
    rule: QmcRule,
) -> Result<SpotCheck> {
    SpotIntegrals::compute(f, p, t, s, rule)?.check(which, variant)
}
