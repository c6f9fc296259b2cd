//! Principal series of GL2(R): the operators T(X), the Lie action, the direct
//! Fourier transform and the intertwining operator A.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::interval::Interval;
use crate::quadrature::{integrate_singular_1d, Estimate, PanelRule, SingularWeight};
use crate::scalars::{
    plancherel_density_discrete, plancherel_density_principal, power_r, DiscreteParam, Parity, SignedExponent,
};
use crate::section::Section;
use crate::testfn::{certify_box, MatrixPoint, TestFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral point (mu1, eps1; mu2, eps2) with the overalgebra parameter sigma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamSpec")]
pub struct PrincipalParam {
    pub mu1: Complex64,
    pub eps1: Parity,
    pub mu2: Complex64,
    pub eps2: Parity,
    sigma: Complex64,
}

#[derive(Deserialize)]
struct ParamSpec {
    mu1: Complex64,
    eps1: Parity,
    mu2: Complex64,
    eps2: Parity,
    #[serde(default)]
    sigma: Complex64,
}

impl TryFrom<ParamSpec> for PrincipalParam {
    type Error = CoreError;
    fn try_from(s: ParamSpec) -> Result<Self> {
        PrincipalParam::new(s.mu1, s.eps1, s.mu2, s.eps2, s.sigma)
    }
}

impl PrincipalParam {
    pub fn new(mu1: Complex64, eps1: Parity, mu2: Complex64, eps2: Parity, sigma: Complex64) -> Result<Self> {
        if sigma.re != 0.0 {
            return Err(CoreError::Domain(format!("sigma must be purely imaginary, got {sigma}")));
        }
        Ok(Self { mu1, eps1, mu2, eps2, sigma })
    }

    /// Parameter without overalgebra context (sigma = 0).
    pub fn plain(mu1: Complex64, eps1: Parity, mu2: Complex64, eps2: Parity) -> Self {
        Self { mu1, eps1, mu2, eps2, sigma: ZERO }
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn with_sigma(self, sigma: Complex64) -> Result<Self> {
        Self::new(self.mu1, self.eps1, self.mu2, self.eps2, sigma)
    }

    /// mu1 -> mu1 + j, mu2 -> mu2 + k; each unit shift flips the matching parity.
    pub fn shifted(&self, j: i32, k: i32) -> Self {
        Self {
            mu1: self.mu1 + j as f64,
            eps1: self.eps1 + Parity::new(j as i64),
            mu2: self.mu2 + k as f64,
            eps2: self.eps2 + Parity::new(k as i64),
            sigma: self.sigma,
        }
    }

    /// (mu2, eps2; mu1, eps1).
    pub fn swapped(&self) -> Self {
        Self { mu1: self.mu2, eps1: self.eps2, mu2: self.mu1, eps2: self.eps1, sigma: self.sigma }
    }

    pub fn conj(&self) -> Self {
        Self { mu1: self.mu1.conj(), mu2: self.mu2.conj(), sigma: self.sigma.conj(), ..*self }
    }

    /// Exponent of the cocycle factor (x11 + t x21).
    pub fn cocycle_exponent(&self) -> SignedExponent {
        SignedExponent::new(self.mu1 - self.mu2 - 1.0, self.eps1 - self.eps2)
    }

    pub fn det_exponent(&self) -> SignedExponent {
        SignedExponent::new(self.mu2 + 0.5, self.eps2)
    }

    /// Hashable identity of (mu1, eps1, mu2, eps2); sigma is not part of it.
    pub fn key(&self) -> [u64; 6] {
        [
            self.mu1.re.to_bits(),
            self.mu1.im.to_bits(),
            self.mu2.re.to_bits(),
            self.mu2.im.to_bits(),
            self.eps1.value() as u64,
            self.eps2.value() as u64,
        ]
    }
}

impl fmt::Display for PrincipalParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {}; sigma {})", self.mu1, self.eps1, self.mu2, self.eps2, self.sigma)
    }
}

/// Point of the tempered spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TemperedParam {
    Principal { s1: f64, s2: f64, eps1: Parity, eps2: Parity },
    Discrete(DiscreteParam),
}

impl TemperedParam {
    pub fn principal(s1: f64, s2: f64, eps1: Parity, eps2: Parity) -> Result<Self> {
        if s1 < s2 {
            return Err(CoreError::Domain(format!("tempered principal parameter needs s1 >= s2, got {s1} < {s2}")));
        }
        Ok(TemperedParam::Principal { s1, s2, eps1, eps2 })
    }

    /// mu = (i s1, i s2) for the principal branch.
    pub fn as_principal_param(&self) -> Option<PrincipalParam> {
        match *self {
            TemperedParam::Principal { s1, s2, eps1, eps2 } => {
                Some(PrincipalParam::plain(Complex64::new(0.0, s1), eps1, Complex64::new(0.0, s2), eps2))
            }
            TemperedParam::Discrete(_) => None,
        }
    }

    pub fn density(&self) -> f64 {
        match self {
            TemperedParam::Principal { s1, s2, eps1, eps2 } => plancherel_density_principal(*s1, *s2, *eps1, *eps2),
            TemperedParam::Discrete(d) => plancherel_density_discrete(d),
        }
    }
}

/// Index of a gl2 generator E_ij.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gl2Index {
    E11,
    E12,
    E21,
    E22,
}

impl Gl2Index {
    pub const ALL: [Gl2Index; 4] = [Gl2Index::E11, Gl2Index::E12, Gl2Index::E21, Gl2Index::E22];

    pub fn from_pair(i: usize, j: usize) -> Result<Self> {
        match (i, j) {
            (1, 1) => Ok(Gl2Index::E11),
            (1, 2) => Ok(Gl2Index::E12),
            (2, 1) => Ok(Gl2Index::E21),
            (2, 2) => Ok(Gl2Index::E22),
            _ => Err(CoreError::Domain(format!("gl2 index ({i},{j}) out of range"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gl2Index::E11 => "L11",
            Gl2Index::E12 => "L12",
            Gl2Index::E21 => "L21",
            Gl2Index::E22 => "L22",
        }
    }
}

/// exp(tau E_ij) as a real matrix.
pub fn one_parameter_subgroup(ij: Gl2Index, tau: f64) -> MatrixPoint {
    match ij {
        Gl2Index::E11 => MatrixPoint::diag(tau.exp(), 1.0),
        Gl2Index::E12 => MatrixPoint::new(1.0, tau, 0.0, 1.0),
        Gl2Index::E21 => MatrixPoint::new(1.0, 0.0, tau, 1.0),
        Gl2Index::E22 => MatrixPoint::diag(1.0, tau.exp()),
    }
}

/// T(X) applied to an arbitrary scalar function, evaluated at t.
pub fn apply_t_fn<P: Fn(f64) -> Complex64>(p: &PrincipalParam, x: &MatrixPoint, phi: P, t: f64) -> Result<Complex64> {
    let u = x.x11 + t * x.x21;
    if u == 0.0 {
        return Err(CoreError::Pole(format!("x11 + t x21 = 0 at t = {t}")));
    }
    let det = x.det();
    if det == 0.0 {
        return Err(CoreError::Domain("T(X) needs an invertible X".into()));
    }
    let s = (x.x12 + t * x.x22) / u;
    Ok(phi(s) * power_r(u, p.cocycle_exponent())? * power_r(det, p.det_exponent())?)
}

pub fn apply_t(p: &PrincipalParam, x: &MatrixPoint, phi: &Section, t: f64) -> Result<Complex64> {
    apply_t_fn(p, x, |s| Complex64::new(phi.eval(s), 0.0), t)
}

/// L_ij acting on a function with value `phi` and derivative `dphi` at t.
pub fn apply_l_values(p: &PrincipalParam, ij: Gl2Index, t: f64, phi: Complex64, dphi: Complex64) -> Complex64 {
    match ij {
        Gl2Index::E11 => -dphi * t + phi * (p.mu1 - 0.5),
        Gl2Index::E12 => dphi,
        Gl2Index::E21 => -dphi * (t * t) + phi * t * (p.mu1 - p.mu2 - 1.0),
        Gl2Index::E22 => dphi * t + phi * (p.mu2 + 0.5),
    }
}

pub fn apply_l(p: &PrincipalParam, ij: Gl2Index, phi: &Section, t: f64) -> Complex64 {
    apply_l_values(p, ij, t, Complex64::new(phi.eval(t), 0.0), Complex64::new(phi.deriv(t), 0.0))
}

/// Unique (mu1, mu2) pairs with, for each parameter, the index of its pair.
pub(crate) fn group_by_mu(params: &[PrincipalParam]) -> (Vec<(Complex64, Complex64)>, Vec<usize>) {
    let mut uniq: Vec<(Complex64, Complex64)> = Vec::new();
    let idx = params
        .iter()
        .map(|p| match uniq.iter().position(|&(a, b)| a == p.mu1 && b == p.mu2) {
            Some(i) => i,
            None => {
                uniq.push((p.mu1, p.mu2));
                uniq.len() - 1
            }
        })
        .collect();
    (uniq, idx)
}

fn fourier_direct_once(
    f: &TestFunction,
    params: &[PrincipalParam],
    sections: &[Section],
    t: f64,
    rule: PanelRule,
) -> Vec<Vec<Complex64>> {
    let (uniq, which) = group_by_mu(params);
    let ns = sections.len();
    let mut total = vec![vec![ZERO; ns]; params.len()];
    let mut powers = vec![ZERO; uniq.len()];
    let mut phis = vec![0.0; ns];
    for term in f.terms() {
        let r = term.bbox.ranges();
        let c = term.bbox.center().to_array();
        let rad = term.bbox.radii();
        let axes: Vec<Vec<(f64, f64)>> = (0..4)
            .map(|i| {
                rule.nodes(r[i].lo, r[i].hi)
                    .into_iter()
                    .map(|(x, w)| (x, w * crate::testfn::bump((x - c[i]) / rad[i])))
                    .collect()
            })
            .collect();
        // Nested accumulators, one level per matrix entry.
        let mut acc1 = vec![ZERO; params.len() * ns];
        for &(x11, w11) in &axes[0] {
            let mut acc2 = vec![ZERO; params.len() * ns];
            for &(x21, w21) in &axes[2] {
                let u = x11 + t * x21;
                let ln_u = u.abs().ln();
                let mut acc3 = vec![ZERO; params.len() * ns];
                for &(x12, w12) in &axes[1] {
                    let mut acc4 = vec![ZERO; params.len() * ns];
                    for &(x22, w22) in &axes[3] {
                        let det = x11 * x22 - x12 * x21;
                        let ln_det = det.abs().ln();
                        let s = (x12 + t * x22) / u;
                        for (k, sec) in sections.iter().enumerate() {
                            phis[k] = sec.eval(s);
                        }
                        for (m, &(mu1, mu2)) in uniq.iter().enumerate() {
                            // cocycle * det^{1/2+mu2} * det^{-2}
                            powers[m] = ((mu1 - mu2 - 1.0) * ln_u + (mu2 - 1.5) * ln_det).exp();
                        }
                        for (pi, p) in params.iter().enumerate() {
                            let sign = p.cocycle_exponent().eps.sign_of(u) * p.eps2.sign_of(det);
                            let v = powers[which[pi]] * (w22 * sign);
                            for k in 0..ns {
                                acc4[pi * ns + k] += v * phis[k];
                            }
                        }
                    }
                    for (a, b) in acc3.iter_mut().zip(&acc4) {
                        *a += b * w12;
                    }
                }
                for (a, b) in acc2.iter_mut().zip(&acc3) {
                    *a += b * w21;
                }
            }
            for (a, b) in acc1.iter_mut().zip(&acc2) {
                *a += b * w11;
            }
        }
        for pi in 0..params.len() {
            for k in 0..ns {
                total[pi][k] += acc1[pi * ns + k] * term.amplitude;
            }
        }
    }
    total
}

/// Direct 4-D evaluation of `(T(F) phi)(t)` for several parameters and sections at once.
/// Result is indexed `[param][section]`.
pub fn fourier_direct_many(
    f: &TestFunction,
    params: &[PrincipalParam],
    sections: &[Section],
    t: f64,
    rule: PanelRule,
) -> Result<Vec<Vec<Estimate>>> {
    for term in f.terms() {
        certify_box(&term.bbox, Interval::point(t))?;
    }
    let a = fourier_direct_once(f, params, sections, t, rule);
    let b = fourier_direct_once(f, params, sections, t, rule.companion());
    Ok(a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| Estimate::from_pair(x, y)).collect())
        .collect())
}

pub fn fourier_direct(f: &TestFunction, p: &PrincipalParam, phi: &Section, t: f64, rule: PanelRule) -> Result<Estimate> {
    Ok(fourier_direct_many(f, std::slice::from_ref(p), std::slice::from_ref(phi), t, rule)?[0][0])
}

fn intertwiner_weight(p: &PrincipalParam, t: f64) -> Result<SingularWeight> {
    let d = p.mu1 - p.mu2;
    if !(d.re < 0.0) {
        return Err(CoreError::Precondition(format!(
            "intertwiner integral needs Re(mu1 - mu2) < 0, got {}",
            d.re
        )));
    }
    Ok(SingularWeight { at: t, exponent: -d - 1.0, parity: p.eps1 - p.eps2 })
}

/// `(A g)(t)` for a function `g` supported in `support`.
pub fn intertwiner_a_fn<G: Fn(f64) -> Complex64>(p: &PrincipalParam, g: G, support: (f64, f64), t: f64, rule: PanelRule) -> Result<Estimate> {
    let w = intertwiner_weight(p, t)?;
    integrate_singular_1d(g, w, support.0, support.1, rule)
}

pub fn intertwiner_a(p: &PrincipalParam, f: &Section, t: f64, rule: PanelRule) -> Result<Estimate> {
    let w = intertwiner_weight(p, t)?;
    if f.is_zero() {
        return Ok(Estimate::default());
    }
    let (a, b) = f
        .support()
        .ok_or_else(|| CoreError::Precondition("intertwiner needs a compactly supported section".into()))?;
    integrate_singular_1d(|s| Complex64::new(f.eval(s), 0.0), w, a, b, rule)
}

/// Support of `s -> phi(X.s)` given the support of phi, when X has no pole there.
pub fn pullback_support(x: &MatrixPoint, support: (f64, f64)) -> Result<(f64, f64)> {
    let inv = x.inverse()?;
    let (a, b) = (inv.mobius(support.0), inv.mobius(support.1));
    let (lo, hi) = (a.min(b), a.max(b));
    if x.x21 != 0.0 {
        let pole = -x.x11 / x.x21;
        if lo <= pole && pole <= hi {
            return Err(CoreError::Pole(format!("X has a pole at s = {pole} inside the pulled-back support")));
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CoreError::Pole("pulled-back support is unbounded".into()));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::BumpBox;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn param() -> PrincipalParam {
        PrincipalParam::plain(c(0.3, 0.7), Parity::ODD, c(-0.2, -0.1), Parity::EVEN)
    }

    #[test]
    fn sigma_must_be_imaginary() {
        assert!(PrincipalParam::new(c(0.0, 0.0), Parity::EVEN, c(1.0, 0.0), Parity::EVEN, c(0.1, 0.0)).is_err());
        assert!(param().with_sigma(c(0.0, 0.4)).is_ok());
    }

    #[test]
    fn t_examples() {
        let phi = Section::Polynomial { coeffs: vec![0.3, -1.0, 0.5] };
        let v = apply_t(&param(), &MatrixPoint::identity(), &phi, 0.7).unwrap();
        assert!((v - c(phi.eval(0.7), 0.0)).norm() < 1e-15);
        // Scalar matrices act by a^{mu1 + mu2} sgn(a)^{eps1 + eps2}, trivial at mu = (1/2, -1/2).
        let p = PrincipalParam::plain(c(0.5, 0.0), Parity::ODD, c(-0.5, 0.0), Parity::ODD);
        let v = apply_t(&p, &MatrixPoint::diag(-1.7, -1.7), &phi, 0.7).unwrap();
        assert!((v - c(phi.eval(0.7), 0.0)).norm() < 1e-14);
        assert!(matches!(apply_t(&p, &MatrixPoint::new(1.0, 0.0, 1.0, 2.0), &phi, -1.0), Err(CoreError::Pole(_))));
    }

    #[test]
    fn group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = |s: f64| c((0.7 * s).sin() + s * s, 0.3 * s);
        for eps in 0..4 {
            let p = PrincipalParam::plain(c(0.3, 0.7), Parity::new(eps & 1), c(-0.2, -0.1), Parity::new(eps >> 1));
            for _ in 0..20 {
                let mut m = || MatrixPoint::from_array(std::array::from_fn(|i| {
                    let base = if i == 0 || i == 3 { 1.0 } else { 0.0 };
                    base + rng.random_range(-0.3..0.3)
                }));
                let x = m();
                let y = m();
                let t = rng.random_range(-1.0..1.0);
                let inner = |s: f64| apply_t_fn(&p, &y, phi, s).unwrap();
                let lhs = apply_t_fn(&p, &x, inner, t).unwrap();
                let rhs = apply_t_fn(&p, &x.mul(&y), phi, t).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
            }
        }
    }

    #[test]
    fn l_examples() {
        let p = param();
        let sq = Section::Polynomial { coeffs: vec![0.0, 0.0, 1.0] };
        assert_eq!(apply_l(&p, Gl2Index::E12, &sq, 3.0), c(6.0, 0.0));
        let one = Section::Polynomial { coeffs: vec![1.0] };
        assert_eq!(apply_l(&p, Gl2Index::E11, &one, 0.4), p.mu1 - 0.5);
    }

    #[test]
    fn lie_action_matches_subgroup_derivative() {
        let phi = Section::bump(0.1, 1.5);
        let t = 0.35;
        for ij in Gl2Index::ALL {
            let p = param();
            let f = |tau: f64| apply_t(&p, &one_parameter_subgroup(ij, tau), &phi, t).unwrap();
            let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
            let exact = apply_l(&p, ij, &phi, t);
            let e1 = (d(1e-3) - exact).norm();
            let e2 = (d(5e-4) - exact).norm();
            assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{ij:?}: {e1} {e2}");
            let rich = (d(5e-4) * 4.0 - d(1e-3)) / 3.0;
            assert!((rich - exact).norm() < 1e-9);
        }
    }

    #[test]
    fn fourier_direct_examples() {
        let rule = PanelRule::new(12, 1).unwrap();
        let phi = Section::bump(0.0, 1.8);
        let z = fourier_direct(&TestFunction::zero(), &param(), &phi, 0.2, rule).unwrap();
        assert_eq!(z.value, ZERO);
        let f1 = TestFunction::bump(BumpBox::new(MatrixPoint::identity(), [0.2; 4]).unwrap());
        let f2 = TestFunction::bump(BumpBox::new(MatrixPoint::diag(-1.0, 1.0), [0.2; 4]).unwrap());
        let (a, b) = (1.5, -0.7);
        let comb = TestFunction::combine(a, &f1, b, &f2);
        let p = param();
        let l = fourier_direct(&comb, &p, &phi, 0.2, rule).unwrap().value;
        let r = fourier_direct(&f1, &p, &phi, 0.2, rule).unwrap().value * a
            + fourier_direct(&f2, &p, &phi, 0.2, rule).unwrap().value * b;
        assert!((l - r).norm() <= 1e-12 * r.norm().max(1e-300));
    }

    #[test]
    fn fourier_direct_matches_generic_quadrature() {
        let rule = PanelRule::new(10, 1).unwrap();
        let phi = Section::bump(0.1, 1.7);
        let f = TestFunction::bump(BumpBox::new(MatrixPoint::diag(-1.0, 1.0), [0.2; 4]).unwrap());
        let p = PrincipalParam::plain(c(0.0, 1.0), Parity::ODD, c(0.0, -1.0), Parity::ODD);
        let t = -0.4;
        let fast = fourier_direct_many(&f, &[p], &[phi.clone()], t, rule).unwrap()[0][0];
        let r = f.terms()[0].bbox.ranges();
        let lo: Vec<f64> = r.iter().map(|i| i.lo).collect();
        let hi: Vec<f64> = r.iter().map(|i| i.hi).collect();
        let slow = crate::quadrature::integrate_box(
            |x| {
                let m = MatrixPoint::from_array([x[0], x[1], x[2], x[3]]);
                apply_t(&p, &m, &phi, t).unwrap() * crate::testfn::eval_f(&f, &m) * crate::testfn::haar_weight(&m).unwrap()
            },
            &lo,
            &hi,
            rule,
        );
        assert!((fast.value - slow.value).norm() <= 1e-13 * slow.value.norm());
    }

    #[test]
    fn intertwiner_examples() {
        let rule = PanelRule::new(16, 1).unwrap();
        let p = PrincipalParam::plain(c(-0.25, 0.0), Parity::ODD, c(0.25, 0.0), Parity::EVEN);
        assert_eq!(intertwiner_a(&p, &Section::Zero, 0.3, rule).unwrap().value, ZERO);
        let even = Section::bump(0.3, 0.8);
        let v = intertwiner_a(&p, &even, 0.3, rule).unwrap();
        assert!(v.value.norm() < 1e-10, "{v:?}");
        let bad = PrincipalParam::plain(c(0.25, 0.0), Parity::ODD, c(0.0, 0.0), Parity::EVEN);
        assert!(matches!(intertwiner_a(&bad, &even, 0.3, rule), Err(CoreError::Precondition(_))));
    }

    #[test]
    fn tempered_params() {
        assert!(TemperedParam::principal(0.0, 1.0, Parity::EVEN, Parity::EVEN).is_err());
        let t = TemperedParam::principal(1.0, -1.0, Parity::EVEN, Parity::ODD).unwrap();
        let p = t.as_principal_param().unwrap();
        assert_eq!(p.mu1, c(0.0, 1.0));
        assert!((t.density() - 0.00401641289638358285506040520324).abs() < 1e-17);
    }

    #[test]
    fn pullback_support_contains_preimage() {
        let x = MatrixPoint::new(1.1, 0.1, -0.05, 0.95);
        let (lo, hi) = pullback_support(&x, (-0.5, 0.7)).unwrap();
        assert!((x.mobius(lo) - (-0.5)).abs() < 1e-12 || (x.mobius(lo) - 0.7).abs() < 1e-12);
        assert!(lo < hi);
    }
}
