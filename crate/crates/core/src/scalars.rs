//! Signed powers on the real line, bi-powers on the complex plane and the
//! Plancherel density factors.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Element of Z/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Parity(u8);

impl Parity {
    pub const EVEN: Parity = Parity(0);
    pub const ODD: Parity = Parity(1);

    pub fn new(v: i64) -> Self {
        Parity(v.rem_euclid(2) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 == 1
    }

    /// sgn(x)^self for a nonzero x.
    pub fn sign_of(self, x: f64) -> f64 {
        if self.is_odd() && x < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 | 1 => Ok(Parity(v)),
            _ => Err(format!("parity must be 0 or 1, got {v}")),
        }
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        p.0
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity(self.0 ^ rhs.0)
    }
}

impl Sub for Parity {
    type Output = Parity;
    fn sub(self, rhs: Parity) -> Parity {
        self + rhs
    }
}

impl Neg for Parity {
    type Output = Parity;
    fn neg(self) -> Parity {
        self
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent `mu || eps` of the signed power `|x|^mu sgn(x)^eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedExponent {
    pub mu: Complex64,
    pub eps: Parity,
}

impl SignedExponent {
    pub fn new(mu: Complex64, eps: Parity) -> Self {
        Self { mu, eps }
    }
}

impl Add for SignedExponent {
    type Output = SignedExponent;
    fn add(self, rhs: SignedExponent) -> SignedExponent {
        SignedExponent::new(self.mu + rhs.mu, self.eps + rhs.eps)
    }
}

/// `x^{mu||eps}` for real nonzero `x`.
pub fn power_r(x: f64, e: SignedExponent) -> Result<Complex64> {
    if x == 0.0 || !x.is_finite() {
        return Err(CoreError::Domain(format!("signed power of x = {x}")));
    }
    Ok(signed_power_ln(x.abs().ln(), x < 0.0, e))
}

/// Signed power from a precomputed `ln|x|` and the sign of `x`.
#[inline]
pub fn signed_power_ln(ln_abs: f64, negative: bool, e: SignedExponent) -> Complex64 {
    let v = (e.mu * ln_abs).exp();
    if negative && e.eps.is_odd() {
        -v
    } else {
        v
    }
}

/// Exponent pair of the bi-power `z^{nu||nu'} = |z|^{2 nu} conj(z)^{nu' - nu}`.
/// The integer difference is stored exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiExponent {
    nu: Complex64,
    shift: i64,
}

/// Tolerance for recognising a floating-point difference as an integer.
const INTEGRALITY_TOL: f64 = 1e-9;

pub(crate) fn integer_difference(a: Complex64, b: Complex64) -> Result<i64> {
    let d = b - a;
    let k = d.re.round();
    if (d.re - k).abs() > INTEGRALITY_TOL || d.im.abs() > INTEGRALITY_TOL || k.abs() > 1e6 {
        return Err(CoreError::NonIntegral { re: d.re, im: d.im });
    }
    Ok(k as i64)
}

impl BiExponent {
    pub fn new(nu: Complex64, nu_p: Complex64) -> Result<Self> {
        Ok(Self { nu, shift: integer_difference(nu, nu_p)? })
    }

    pub fn from_shift(nu: Complex64, shift: i64) -> Self {
        Self { nu, shift }
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    pub fn nu_p(&self) -> Complex64 {
        self.nu + self.shift as f64
    }

    /// `nu' - nu`.
    pub fn shift(&self) -> i64 {
        self.shift
    }
}

impl Add for BiExponent {
    type Output = BiExponent;
    fn add(self, rhs: BiExponent) -> BiExponent {
        BiExponent { nu: self.nu + rhs.nu, shift: self.shift + rhs.shift }
    }
}

/// `z^{nu||nu'}` for complex nonzero `z`.
pub fn power_c(z: Complex64, e: BiExponent) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) || !z.is_finite() {
        return Err(CoreError::Domain(format!("bi-power of z = {z}")));
    }
    Ok(bi_power_ln(z, (z.norm_sqr()).ln(), e))
}

/// Bi-power with `ln|z|^2` supplied by the caller.
#[inline]
pub fn bi_power_ln(z: Complex64, ln_norm_sqr: f64, e: BiExponent) -> Complex64 {
    (e.nu * ln_norm_sqr).exp() * int_power(z.conj(), e.shift)
}

/// Integer power by repeated squaring; negative exponents invert first.
pub fn int_power(z: Complex64, k: i64) -> Complex64 {
    let (mut base, mut n) = if k < 0 { (z.inv(), k.unsigned_abs()) } else { (z, k as u64) };
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Discrete-series label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteParam {
    n: u32,
    pub s: f64,
    pub delta: Parity,
}

impl DiscreteParam {
    pub fn new(n: u32, s: f64, delta: Parity) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::Domain("discrete series index must be >= 1".into()));
        }
        Ok(Self { n, s, delta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Principal-series Plancherel density. Only `eps1` selects the branch.
pub fn plancherel_density_principal(s1: f64, s2: f64, eps1: Parity, _eps2: Parity) -> f64 {
    let x = s1 - s2;
    let scale = 1.0 / (16.0 * PI.powi(3));
    let h = PI * x / 2.0;
    if eps1.is_odd() {
        // x coth(pi x / 2) = (2/pi) h coth h; h coth h = 1 + h^2/3 - h^4/45 + 2h^6/945.
        let hcoth = if x.abs() < 1e-4 {
            let h2 = h * h;
            1.0 + h2 / 3.0 - h2 * h2 / 45.0
        } else {
            h / h.tanh()
        };
        scale * 2.0 / PI * hcoth
    } else {
        scale * x * h.tanh()
    }
}

pub fn plancherel_density_discrete(p: &DiscreteParam) -> f64 {
    p.n as f64 / (8.0 * PI.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_r_examples() {
        let v = power_r(-2.0, SignedExponent::new(c(3.0, 0.0), Parity::ODD)).unwrap();
        assert_relative_eq!(v.re, -8.0, epsilon = 1e-14);
        assert_eq!(power_r(-1.0, SignedExponent::new(c(0.0, 0.0), Parity::EVEN)).unwrap(), c(1.0, 0.0));
        let v = power_r(0.5, SignedExponent::new(c(0.0, 1.0), Parity::EVEN)).unwrap();
        let expect = (c(0.0, -1.0) * 2f64.ln()).exp();
        assert!((v - expect).norm() < 1e-15);
        assert!(matches!(power_r(0.0, SignedExponent::new(c(1.0, 0.0), Parity::EVEN)), Err(CoreError::Domain(_))));
    }

    #[test]
    fn power_c_examples() {
        let i = c(0.0, 1.0);
        let e = BiExponent::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((power_c(i, e).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        let e = BiExponent::new(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!((power_c(c(2.0, 0.0), e).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        let e = BiExponent::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((power_c(c(-1.0, 0.0), e).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(power_c(c(0.0, 0.0), e).is_err());
        assert!(matches!(BiExponent::new(c(0.2, 0.0), c(0.7, 0.0)), Err(CoreError::NonIntegral { .. })));
        assert!(BiExponent::new(c(0.2, 0.4), c(-0.8, 0.4)).unwrap().shift() == -1);
    }

    #[test]
    fn density_examples() {
        assert_eq!(plancherel_density_principal(0.7, 0.7, Parity::EVEN, Parity::ODD), 0.0);
        let lim = 0.00128324778183554189864409790839;
        assert_relative_eq!(plancherel_density_principal(0.3, 0.3, Parity::ODD, Parity::EVEN), lim, max_relative = 1e-14);
        assert_relative_eq!(
            plancherel_density_principal(1.0, -1.0, Parity::EVEN, Parity::EVEN),
            0.00401641289638358285506040520324,
            max_relative = 1e-14
        );
        let d1 = plancherel_density_discrete(&DiscreteParam::new(1, 0.0, Parity::EVEN).unwrap());
        let d2 = plancherel_density_discrete(&DiscreteParam::new(2, 0.0, Parity::EVEN).unwrap());
        let d3 = plancherel_density_discrete(&DiscreteParam::new(3, 0.0, Parity::EVEN).unwrap());
        assert_eq!(d2, 2.0 * d1);
        assert_relative_eq!(d3, 0.0120943254124498084441582697582, max_relative = 1e-15);
        assert!(DiscreteParam::new(0, 0.0, Parity::EVEN).is_err());
    }

    #[test]
    fn density_table_values() {
        // x, tanh class, coth class
        let rows = [
            (0.5, 0.000660949040853132442497141111242, 0.00153685477393891076813779391036),
            (1.0, 0.00184872313339140216154640126779, 0.0021978038147920432106349350216),
            (2.0, 0.00401641289638358285506040520324, 0.00404652694818344537218133628939),
        ];
        for (x, th, ct) in rows {
            assert_relative_eq!(plancherel_density_principal(x, 0.0, Parity::EVEN, Parity::EVEN), th, max_relative = 1e-14);
            assert_relative_eq!(plancherel_density_principal(x, 0.0, Parity::ODD, Parity::EVEN), ct, max_relative = 1e-14);
        }
    }

    #[test]
    fn coth_taylor_branch_is_continuous() {
        let x = 0.99e-4;
        let h = PI * x / 2.0;
        let direct = 1.0 / (16.0 * PI.powi(3)) * x / h.tanh();
        let taylor = plancherel_density_principal(x, 0.0, Parity::ODD, Parity::EVEN);
        assert!((direct - taylor).abs() < 1e-15 * direct);
    }

    #[test]
    fn mu_derivative_is_log_times_power() {
        let x = -1.7;
        let mu = c(0.3, -0.4);
        let f = |m: Complex64| power_r(x, SignedExponent::new(m, Parity::ODD)).unwrap();
        let exact = f(mu) * x.abs().ln();
        let mut prev = f64::INFINITY;
        for k in 0..4 {
            let h = 1e-2 / 2f64.powi(k);
            let fd = (f(mu + h) - f(mu - h)) / (2.0 * h);
            let err = (fd - exact).norm();
            assert!(err < prev);
            if k > 0 {
                assert!(prev / err > 3.5);
            }
            prev = err;
        }
    }

    proptest! {
        #[test]
        fn power_r_multiplicative(x in prop_oneof![-5.0..-0.01f64, 0.01..5.0f64],
                                  a in -2.0..2.0f64, b in -2.0..2.0f64, c1 in -2.0..2.0f64, d in -2.0..2.0f64,
                                  e1 in 0u8..2, e2 in 0u8..2) {
            let p = SignedExponent::new(c(a, b), Parity::new(e1 as i64));
            let q = SignedExponent::new(c(c1, d), Parity::new(e2 as i64));
            let lhs = power_r(x, p).unwrap() * power_r(x, q).unwrap();
            let rhs = power_r(x, p + q).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm().max(1e-300) * 4.0);
        }

        #[test]
        fn shift_consistency(x in prop_oneof![-5.0..-0.01f64, 0.01..5.0f64],
                             a in -2.0..2.0f64, b in -2.0..2.0f64, e in 0u8..2) {
            let eps = Parity::new(e as i64);
            let lhs = power_r(x, SignedExponent::new(c(a - 1.0, b), eps + Parity::ODD)).unwrap() * x;
            let rhs = power_r(x, SignedExponent::new(c(a, b), eps)).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm() * 4.0);
        }

        #[test]
        fn power_c_modulus(re in -3.0..3.0f64, im in -3.0..3.0f64, nu in -2.0..2.0f64, nui in -2.0..2.0f64, k in -4i64..5) {
            prop_assume!(re.abs() + im.abs() > 1e-2);
            let z = c(re, im);
            let v = power_c(z, BiExponent::from_shift(c(nu, nui), k)).unwrap();
            let expect = z.norm().powf(2.0 * nu + k as f64);
            prop_assert!((v.norm() - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn density_even_and_nonnegative(s1 in -10.0..10.0f64, s2 in -10.0..10.0f64, e1 in 0u8..2, e2 in 0u8..2) {
            let (p, q) = (Parity::new(e1 as i64), Parity::new(e2 as i64));
            let a = plancherel_density_principal(s1, s2, p, q);
            let b = plancherel_density_principal(s2, s1, p, q);
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() <= 1e-15 * a.max(1e-300));
        }
    }
}
