//! First-order differential operators on functions of a 2x2 matrix, with
//! coefficients in Q[x11, x12, x21, x22, sigma][1/det].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use glfour_core::testfn::MatrixPoint;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{AlgebraError, Result};
use crate::poly::Poly;

pub type Poly5 = Poly<5>;

/// Variable slots of the matrix-side ring.
pub const X11: usize = 0;
pub const X12: usize = 1;
pub const X21: usize = 2;
pub const X22: usize = 3;
pub const SIGMA: usize = 4;

const NAMES: [&str; 5] = ["x11", "x12", "x21", "x22", "sigma"];

pub fn det_poly() -> Poly5 {
    &(&Poly5::var(X11) * &Poly5::var(X22)) - &(&Poly5::var(X12) * &Poly5::var(X21))
}

/// `num / det^k`, with no factor of det left in `num` when k > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalCoef4 {
    num: Poly5,
    det_pow: u32,
}

impl RationalCoef4 {
    pub fn new(num: Poly5, det_pow: u32) -> Self {
        let mut c = Self { num, det_pow };
        c.canonicalize();
        c
    }

    pub fn poly(num: Poly5) -> Self {
        Self { num, det_pow: 0 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn numerator(&self) -> &Poly5 {
        &self.num
    }

    pub fn det_pow(&self) -> u32 {
        self.det_pow
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.det_pow = 0;
            return;
        }
        let det = det_poly();
        while self.det_pow > 0 {
            match self.num.div_exact(&det) {
                Some(q) => {
                    self.num = q;
                    self.det_pow -= 1;
                }
                None => break,
            }
        }
    }

    fn lifted(&self, k: u32) -> Poly5 {
        &self.num * &det_poly().pow(k - self.det_pow)
    }

    /// Partial derivative in one of the four matrix entries.
    pub fn deriv(&self, i: usize) -> Self {
        if self.det_pow == 0 {
            return Self::poly(self.num.deriv(i));
        }
        let det = det_poly();
        let k = BigRational::from_integer(self.det_pow.into());
        let num = &(&self.num.deriv(i) * &det) - &(&self.num * &det.deriv(i)).scale(&k);
        Self::new(num, self.det_pow + 1)
    }

    pub fn eval(&self, x: &MatrixPoint, sigma: Complex64) -> Complex64 {
        let c = |v: f64| Complex64::new(v, 0.0);
        let v = self.num.eval(&[c(x.x11), c(x.x12), c(x.x21), c(x.x22), sigma]);
        v / x.det().powi(self.det_pow as i32)
    }
}

impl fmt::Display for RationalCoef4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.det_pow {
            0 => write!(f, "{}", self.num.render(&NAMES)),
            1 => write!(f, "({})/det", self.num.render(&NAMES)),
            k => write!(f, "({})/det^{k}", self.num.render(&NAMES)),
        }
    }
}

impl Add for &RationalCoef4 {
    type Output = RationalCoef4;
    fn add(self, o: &RationalCoef4) -> RationalCoef4 {
        let k = self.det_pow.max(o.det_pow);
        RationalCoef4::new(&self.lifted(k) + &o.lifted(k), k)
    }
}

impl Neg for &RationalCoef4 {
    type Output = RationalCoef4;
    fn neg(self) -> RationalCoef4 {
        RationalCoef4 { num: -&self.num, det_pow: self.det_pow }
    }
}

impl Sub for &RationalCoef4 {
    type Output = RationalCoef4;
    fn sub(self, o: &RationalCoef4) -> RationalCoef4 {
        self + &(-o)
    }
}

impl Mul for &RationalCoef4 {
    type Output = RationalCoef4;
    fn mul(self, o: &RationalCoef4) -> RationalCoef4 {
        RationalCoef4::new(&self.num * &o.num, self.det_pow + o.det_pow)
    }
}

/// Slots of a [`DiffOp2`]: the four partials, then the order-zero term.
pub const D11: usize = 0;
pub const D12: usize = 1;
pub const D21: usize = 2;
pub const D22: usize = 3;
pub const ORDER0: usize = 4;

/// `sum_i a_i d/dx_i + a_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffOp2 {
    pub coef: [RationalCoef4; 5],
}

impl DiffOp2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(RationalCoef4::is_zero)
    }

    /// The first-order part applied to a coefficient.
    pub fn act(&self, c: &RationalCoef4) -> RationalCoef4 {
        (0..4).fold(RationalCoef4::zero(), |acc, i| &acc + &(&self.coef[i] * &c.deriv(i)))
    }

    pub fn scale(&self, k: &RationalCoef4) -> Self {
        Self { coef: std::array::from_fn(|i| k * &self.coef[i]) }
    }

    /// Numeric value of the operator applied to a function with value `f` and partials `grad`.
    pub fn apply(&self, x: &MatrixPoint, sigma: Complex64, f: f64, grad: &[f64; 4]) -> Complex64 {
        let mut acc = self.coef[ORDER0].eval(x, sigma) * f;
        for i in 0..4 {
            if !self.coef[i].is_zero() {
                acc += self.coef[i].eval(x, sigma) * grad[i];
            }
        }
        acc
    }

    pub fn compile(&self, sigma: Complex64) -> CompiledDiffOp2 {
        CompiledDiffOp2 {
            sigma,
            coef: std::array::from_fn(|i| (self.coef[i].num.to_f64_terms(), self.coef[i].det_pow)),
        }
    }
}

impl fmt::Display for DiffOp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = ["d11", "d12", "d21", "d22", ""];
        let parts: Vec<String> = (0..5)
            .filter(|&i| !self.coef[i].is_zero())
            .map(|i| if i == ORDER0 { format!("[{}]", self.coef[i]) } else { format!("[{}]*{}", self.coef[i], labels[i]) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Add for &DiffOp2 {
    type Output = DiffOp2;
    fn add(self, o: &DiffOp2) -> DiffOp2 {
        DiffOp2 { coef: std::array::from_fn(|i| &self.coef[i] + &o.coef[i]) }
    }
}

impl Sub for &DiffOp2 {
    type Output = DiffOp2;
    fn sub(self, o: &DiffOp2) -> DiffOp2 {
        DiffOp2 { coef: std::array::from_fn(|i| &self.coef[i] - &o.coef[i]) }
    }
}

impl Neg for &DiffOp2 {
    type Output = DiffOp2;
    fn neg(self) -> DiffOp2 {
        DiffOp2 { coef: std::array::from_fn(|i| -&self.coef[i]) }
    }
}

/// Float form of a [`DiffOp2`] at fixed sigma, for use inside quadrature loops.
#[derive(Clone, Debug)]
pub struct CompiledDiffOp2 {
    sigma: Complex64,
    coef: [(Vec<([u32; 5], f64)>, u32); 5],
}

impl CompiledDiffOp2 {
    pub fn apply(&self, x: &MatrixPoint, f: f64, grad: &[f64; 4]) -> Complex64 {
        let vals = [x.x11, x.x12, x.x21, x.x22];
        let det = x.det();
        let eval = |(terms, k): &(Vec<([u32; 5], f64)>, u32)| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, c) in terms {
                let mut v = *c;
                for i in 0..4 {
                    v *= vals[i].powi(m[i] as i32);
                }
                acc += Complex64::new(v, 0.0) * self.sigma.powu(m[SIGMA]);
            }
            acc / det.powi(*k as i32)
        };
        let mut acc = eval(&self.coef[ORDER0]) * f;
        for i in 0..4 {
            if !self.coef[i].0.is_empty() {
                acc += eval(&self.coef[i]) * grad[i];
            }
        }
        acc
    }
}

/// `[A, B] = AB - BA`, again first order.
pub fn bracket_diff(a: &DiffOp2, b: &DiffOp2) -> DiffOp2 {
    DiffOp2 { coef: std::array::from_fn(|i| &a.act(&b.coef[i]) - &b.act(&a.coef[i])) }
}

fn x(i: usize) -> Poly5 {
    Poly5::var(i)
}

fn sigma_m1() -> Poly5 {
    &x(SIGMA) - &Poly5::one()
}

fn simple(first: &[(usize, Poly5)], order0: RationalCoef4) -> DiffOp2 {
    let mut d = DiffOp2::zero();
    for (slot, p) in first {
        d.coef[*slot] = RationalCoef4::poly(p.clone());
    }
    d.coef[ORDER0] = order0;
    d
}

/// `-(p11 d11 + p12 d12 + p21 d21 + p22 d22) + (sigma - 1) x_zero`, each p a product of two entries.
fn quadratic(pairs: [(usize, usize); 4], zero: usize) -> DiffOp2 {
    let first: Vec<(usize, Poly5)> = pairs.iter().enumerate().map(|(slot, &(a, b))| (slot, -(&x(a) * &x(b)))).collect();
    simple(&first, RationalCoef4::poly(&sigma_m1() * &x(zero)))
}

/// The gl4 generator e_kl (indices 1..=4) acting on functions of X, sigma symbolic.
pub fn gl4_generator(k: usize, l: usize) -> Result<DiffOp2> {
    let neg = |p: Poly5| -p;
    let z = RationalCoef4::zero;
    let over_det = |p: Poly5| RationalCoef4::new(&sigma_m1() * &p, 1);
    let e = match (k, l) {
        (1, 1) => simple(&[(D11, neg(x(X11))), (D12, neg(x(X12)))], z()),
        (1, 2) => simple(&[(D11, neg(x(X21))), (D12, neg(x(X22)))], z()),
        (2, 1) => simple(&[(D21, neg(x(X11))), (D22, neg(x(X12)))], z()),
        (2, 2) => simple(&[(D21, neg(x(X21))), (D22, neg(x(X22)))], z()),
        (3, 3) => simple(&[(D11, x(X11)), (D21, x(X21))], z()),
        (3, 4) => simple(&[(D12, x(X11)), (D22, x(X21))], z()),
        (4, 3) => simple(&[(D11, x(X12)), (D21, x(X22))], z()),
        (4, 4) => simple(&[(D12, x(X12)), (D22, x(X22))], z()),
        (1, 3) => simple(&[(D11, Poly5::one())], over_det(x(X22))),
        (1, 4) => simple(&[(D12, Poly5::one())], over_det(neg(x(X21)))),
        (2, 3) => simple(&[(D21, Poly5::one())], over_det(neg(x(X12)))),
        (2, 4) => simple(&[(D22, Poly5::one())], over_det(x(X11))),
        (3, 1) => quadratic([(X11, X11), (X11, X12), (X11, X21), (X12, X21)], X11),
        (3, 2) => quadratic([(X11, X21), (X11, X22), (X21, X21), (X21, X22)], X21),
        (4, 1) => quadratic([(X11, X12), (X12, X12), (X11, X22), (X12, X22)], X12),
        (4, 2) => quadratic([(X12, X21), (X12, X22), (X21, X22), (X22, X22)], X22),
        _ => return Err(AlgebraError::Index(format!("gl4 index ({k}, {l}) outside 1..=4"))),
    };
    Ok(e)
}

/// All sixteen generators, indexed `[k-1][l-1]`.
pub fn gl4_table() -> [[DiffOp2; 4]; 4] {
    std::array::from_fn(|k| std::array::from_fn(|l| gl4_generator(k + 1, l + 1).expect("index in range")))
}
