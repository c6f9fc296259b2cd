//! Differential-difference operators on kernel families K(t, s | mu1, mu2).
//!
//! A term is `c(t, s, mu1, mu2, sigma) d_t^a d_s^b V1^j V2^k`, coefficient on the
//! left. Shifts commute with t, s and their derivatives, and move past a
//! coefficient by `V1^j V2^k c(mu1, mu2) = c(mu1 + j, mu2 + k) V1^j V2^k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::shiftcoef::{ShiftCoef, MU1, MU2, S, SIG, T};

/// Derivative orders and shift exponents of one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermKey {
    pub dt: u32,
    pub ds: u32,
    pub j: i64,
    pub k: i64,
}

impl TermKey {
    pub const IDENTITY: TermKey = TermKey { dt: 0, ds: 0, j: 0, k: 0 };
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("d_t", self.dt as i64), ("d_s", self.ds as i64)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        for (name, e) in [("V1", self.j), ("V2", self.k)] {
            if e != 0 {
                parts.push(format!("{name}^{e}"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffDiffOp {
    terms: BTreeMap<TermKey, ShiftCoef>,
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl DiffDiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: ShiftCoef, key: TermKey) -> Self {
        let mut op = Self::zero();
        op.add_term(key, c);
        op
    }

    /// Multiplication by a coefficient.
    pub fn coef(c: ShiftCoef) -> Self {
        Self::term(c, TermKey::IDENTITY)
    }

    pub fn d_t() -> Self {
        Self::term(ShiftCoef::one(), TermKey { dt: 1, ..TermKey::IDENTITY })
    }

    pub fn d_s() -> Self {
        Self::term(ShiftCoef::one(), TermKey { ds: 1, ..TermKey::IDENTITY })
    }

    pub fn shift(j: i64, k: i64) -> Self {
        Self::term(ShiftCoef::one(), TermKey { j, k, ..TermKey::IDENTITY })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &ShiftCoef)> {
        self.terms.iter()
    }

    pub fn get(&self, key: &TermKey) -> Option<&ShiftCoef> {
        self.terms.get(key)
    }

    fn add_term(&mut self, key: TermKey, c: ShiftCoef) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    /// Left multiplication by a coefficient.
    pub fn scale(&self, c: &ShiftCoef) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, c * v);
        }
        out
    }

    pub fn compose(&self, o: &DiffDiffOp) -> DiffDiffOp {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                // c_a d^(a1,b1) V^(ja,ka) c_b ... = c_a d^(a1,b1) c_b(mu + shift) V^(ja,ka) ...
                let cb = cb.shifted(ka.j, ka.k);
                for i in 0..=ka.dt {
                    for l in 0..=ka.ds {
                        let mut d = cb.clone();
                        for _ in 0..i {
                            d = d.deriv(T);
                        }
                        for _ in 0..l {
                            d = d.deriv(S);
                        }
                        if d.is_zero() {
                            continue;
                        }
                        let mult = ShiftCoef::int(binom(ka.dt, i) * binom(ka.ds, l));
                        let key = TermKey { dt: ka.dt - i + kb.dt, ds: ka.ds - l + kb.ds, j: ka.j + kb.j, k: ka.k + kb.k };
                        out.add_term(key, &(ca * &d) * &mult);
                    }
                }
            }
        }
        out
    }

    /// Highest total derivative order over the terms.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.dt + k.ds).max().unwrap_or(0)
    }
}

impl fmt::Display for DiffDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("[{c}]*{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &DiffDiffOp {
    type Output = DiffDiffOp;
    fn add(self, o: &DiffDiffOp) -> DiffDiffOp {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Neg for &DiffDiffOp {
    type Output = DiffDiffOp;
    fn neg(self) -> DiffDiffOp {
        DiffDiffOp { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Sub for &DiffDiffOp {
    type Output = DiffDiffOp;
    fn sub(self, o: &DiffDiffOp) -> DiffDiffOp {
        self + &(-o)
    }
}

impl Mul for &DiffDiffOp {
    type Output = DiffDiffOp;
    fn mul(self, o: &DiffDiffOp) -> DiffDiffOp {
        self.compose(o)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for DiffDiffOp {
            type Output = DiffDiffOp;
            fn $f(self, o: DiffDiffOp) -> DiffDiffOp {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for DiffDiffOp {
    type Output = DiffDiffOp;
    fn neg(self) -> DiffDiffOp {
        -&self
    }
}

/// `AB - BA`.
pub fn bracket_shift(a: &DiffDiffOp, b: &DiffDiffOp) -> DiffDiffOp {
    &a.compose(b) - &b.compose(a)
}

fn c(x: ShiftCoef) -> DiffDiffOp {
    DiffDiffOp::coef(x)
}

fn half() -> ShiftCoef {
    ShiftCoef::rational(1, 2)
}

fn v(i: usize) -> ShiftCoef {
    ShiftCoef::var(i)
}

/// The operator E_kl (indices 1..=4) as printed in the formula table, sigma symbolic.
/// Entries outside the two diagonal blocks are the printed closed forms, which
/// [`crate::table::generate_e_table`] cross-checks against their bracket derivations.
pub fn e_generator(k: usize, l: usize) -> Result<DiffDiffOp> {
    let (t, s, m1, m2, sg) = (v(T), v(S), v(MU1), v(MU2), v(SIG));
    let g = &m1 - &m2;
    let dt = DiffDiffOp::d_t;
    let ds = DiffDiffOp::d_s;
    let sh = DiffDiffOp::shift;
    let one = ShiftCoef::one;
    // (a)/(mu1 - mu2) as an operator coefficient.
    let frac = |a: ShiftCoef| c(a.over_gap(0));
    // Recurring numerators.
    let lo1 = &(&half() - &m1) + &sg;
    let lo2 = &(&half() - &m2) + &sg;
    let up1 = &(&half() + &m1) + &sg;
    let up2 = &(&half() + &m2) + &sg;
    let minus1 = &(&half() + &sg) - &m1;
    let minus2 = &(&half() + &sg) - &m2;
    let op = match (k, l) {
        (1, 1) => -(c(t.clone()) * dt()) - c(&half() - &m1),
        (1, 2) => dt(),
        (2, 1) => -(c(&t * &t) * dt()) + c(&(&(&m1 - &m2) - &one()) * &t),
        (2, 2) => c(t.clone()) * dt() + c(&half() + &m2),
        (3, 3) => -(c(s.clone()) * ds()) - c(&half() + &m1),
        (3, 4) => ds(),
        (4, 3) => -(c(&s * &s) * ds()) + c(&(&(&m2 - &m1) - &one()) * &s),
        (4, 4) => c(s.clone()) * ds() + c(&half() - &m2),
        (1, 3) => frac(lo2) * c(s.clone()) * dt() * sh(0, -1) + frac(lo1) * (c(g.clone()) + c(s.clone()) * ds()) * sh(-1, 0),
        (1, 4) => -(frac(minus1) * ds() * sh(-1, 0)) - frac(minus2) * dt() * sh(0, -1),
        (2, 3) => {
            frac(lo2) * c(s.clone()) * (c(-&g) + c(t.clone()) * dt()) * sh(0, -1)
                + frac(lo1) * c(t.clone()) * (c(g.clone()) + c(s.clone()) * ds()) * sh(-1, 0)
        }
        (2, 4) => {
            -(frac(minus1) * c(t.clone()) * ds() * sh(-1, 0))
                + frac(&(&half() + &m2) - &sg) * (c(g.clone()) + c(t.clone()) * ds()) * sh(0, -1)
        }
        (3, 1) => frac(up1.clone()) * (c(g.clone()) - c(t.clone()) * dt()) * sh(1, 0) - frac(up2.clone()) * c(t.clone()) * ds() * sh(0, 1),
        (3, 2) => frac(up1) * dt() * sh(1, 0) + frac(up2) * ds() * sh(0, 1),
        (4, 1) => {
            frac(up1.clone()) * c(s.clone()) * (c(g.clone()) - c(t.clone()) * dt()) * sh(1, 0)
                - frac(up2.clone()) * c(t.clone()) * (c(g.clone()) + c(s.clone()) * ds()) * sh(0, 1)
        }
        (4, 2) => frac(up1.clone()) * c(s.clone()) * dt() * sh(1, 0) + frac(up2.clone()) * (c(g.clone()) + c(s.clone()) * ds()) * sh(0, 1),
        _ => return Err(AlgebraError::Index(format!("gl4 index ({k}, {l}) outside 1..=4"))),
    };
    Ok(op)
}

/// True for the generators of the two gl2 blocks, which carry no shifts.
pub fn is_diagonal_block(k: usize, l: usize) -> bool {
    (k <= 2) == (l <= 2)
}
