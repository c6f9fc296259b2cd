//! Coefficients of kernel-side operators: polynomials in (t, s, mu1, mu2, sigma)
//! over a product of integer translates of (mu1 - mu2).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{AlgebraError, Result};
use crate::poly::{rat, Poly};

pub type KPoly = Poly<5>;

pub const T: usize = 0;
pub const S: usize = 1;
pub const MU1: usize = 2;
pub const MU2: usize = 3;
pub const SIG: usize = 4;

const NAMES: [&str; 5] = ["t", "s", "mu1", "mu2", "sigma"];

/// `mu1 - mu2 + m`.
pub fn gap(m: i64) -> KPoly {
    &(&KPoly::var(MU1) - &KPoly::var(MU2)) + &KPoly::int(m)
}

/// `num / prod_m (mu1 - mu2 + m)^{e_m}` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ShiftCoef {
    num: KPoly,
    den: BTreeMap<i64, u32>,
}

impl ShiftCoef {
    pub fn poly(num: KPoly) -> Self {
        Self { num, den: BTreeMap::new() }
    }

    pub fn new(num: KPoly, den: BTreeMap<i64, u32>) -> Self {
        let mut c = Self { num, den };
        c.canonicalize();
        c
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::poly(KPoly::one())
    }

    pub fn int(k: i64) -> Self {
        Self::poly(KPoly::int(k))
    }

    pub fn var(i: usize) -> Self {
        Self::poly(KPoly::var(i))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::poly(KPoly::constant(rat(n, d)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &KPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<i64, u32> {
        &self.den
    }

    /// Divides by `(mu1 - mu2 + m)`.
    pub fn over_gap(&self, m: i64) -> Self {
        let mut den = self.den.clone();
        *den.entry(m).or_insert(0) += 1;
        Self::new(self.num.clone(), den)
    }

    fn canonicalize(&mut self) {
        self.den.retain(|_, e| *e > 0);
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let keys: Vec<i64> = self.den.keys().copied().collect();
        for m in keys {
            let g = gap(m);
            let e = self.den.get_mut(&m).expect("present");
            while *e > 0 {
                match self.num.div_exact(&g) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
    }

    fn lifted(&self, den: &BTreeMap<i64, u32>) -> KPoly {
        den.iter().fold(self.num.clone(), |acc, (&m, &e)| {
            let have = self.den.get(&m).copied().unwrap_or(0);
            &acc * &gap(m).pow(e - have)
        })
    }

    /// mu1 -> mu1 + j, mu2 -> mu2 + k.
    pub fn shifted(&self, j: i64, k: i64) -> Self {
        let num = self.num.translate(MU1, &rat(j, 1)).translate(MU2, &rat(k, 1));
        let den = self.den.iter().map(|(&m, &e)| (m + j - k, e)).collect();
        Self { num, den }
    }

    /// d/dt or d/ds (the denominator is independent of both).
    pub fn deriv(&self, var: usize) -> Self {
        debug_assert!(var == T || var == S);
        Self::new(self.num.deriv(var), self.den.clone())
    }

    pub fn eval(&self, t: f64, s: f64, mu1: Complex64, mu2: Complex64, sigma: Complex64) -> Result<Complex64> {
        let mut den = Complex64::new(1.0, 0.0);
        for (&m, &e) in &self.den {
            let g = mu1 - mu2 + m as f64;
            if g.norm() < 1e-12 {
                return Err(AlgebraError::Pole(format!("mu1 - mu2 + {m} = 0 at mu1 = {mu1}, mu2 = {mu2}")));
            }
            den *= g.powu(e);
        }
        let c = |v: f64| Complex64::new(v, 0.0);
        Ok(self.num.eval(&[c(t), c(s), mu1, mu2, sigma]) / den)
    }
}

impl fmt::Display for ShiftCoef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.render(&NAMES);
        if self.den.is_empty() {
            return write!(f, "{num}");
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(&m, &e)| {
                let base = match m {
                    0 => "(mu1 - mu2)".to_string(),
                    m if m > 0 => format!("(mu1 - mu2 + {m})"),
                    m => format!("(mu1 - mu2 - {})", -m),
                };
                if e == 1 { base } else { format!("{base}^{e}") }
            })
            .collect();
        write!(f, "({num})/{}", den.join("*"))
    }
}

impl Add for &ShiftCoef {
    type Output = ShiftCoef;
    fn add(self, o: &ShiftCoef) -> ShiftCoef {
        let mut den = self.den.clone();
        for (&m, &e) in &o.den {
            let slot = den.entry(m).or_insert(0);
            *slot = (*slot).max(e);
        }
        ShiftCoef::new(&self.lifted(&den) + &o.lifted(&den), den)
    }
}

impl Neg for &ShiftCoef {
    type Output = ShiftCoef;
    fn neg(self) -> ShiftCoef {
        ShiftCoef { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &ShiftCoef {
    type Output = ShiftCoef;
    fn sub(self, o: &ShiftCoef) -> ShiftCoef {
        self + &(-o)
    }
}

impl Mul for &ShiftCoef {
    type Output = ShiftCoef;
    fn mul(self, o: &ShiftCoef) -> ShiftCoef {
        let mut den = self.den.clone();
        for (&m, &e) in &o.den {
            *den.entry(m).or_insert(0) += e;
        }
        ShiftCoef::new(&self.num * &o.num, den)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for ShiftCoef {
            type Output = ShiftCoef;
            fn $f(self, o: ShiftCoef) -> ShiftCoef {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ShiftCoef {
    type Output = ShiftCoef;
    fn neg(self) -> ShiftCoef {
        -&self
    }
}

impl From<BigRational> for ShiftCoef {
    fn from(c: BigRational) -> Self {
        Self::poly(KPoly::constant(c))
    }
}
