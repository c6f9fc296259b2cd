//! Sparse multivariate polynomials over the rationals, lex-ordered with
//! variable 0 most significant.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Monomial<const N: usize> = [u32; N];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly<const N: usize> {
    terms: BTreeMap<Monomial<N>, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; N];
        m[i] = 1;
        Self::monomial(m, BigRational::one())
    }

    pub fn monomial(m: Monomial<N>, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<N>, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial<N>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut m2 = *m;
                m2[i] -= 1;
                out.add_term(m2, c * BigRational::from_integer(m[i].into()));
            }
        }
        out
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// x_i -> x_i + c.
    pub fn translate(&self, i: usize, c: &BigRational) -> Self {
        if c.is_zero() || self.degree(i) == 0 {
            return self.clone();
        }
        let mut out = Self::zero();
        for (m, coef) in &self.terms {
            let n = m[i];
            let mut binom = BigInt::one();
            let mut cpow = BigRational::one();
            // sum_k C(n,k) x^{n-k} c^k
            for k in 0..=n {
                let mut m2 = *m;
                m2[i] = n - k;
                out.add_term(m2, coef * BigRational::from_integer(binom.clone()) * &cpow);
                binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
                cpow *= c;
            }
        }
        out
    }

    fn leading(&self) -> Option<(&Monomial<N>, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (ld, lc) = d.leading()?;
        let (ld, lc) = (*ld, lc.clone());
        let mut p = self.clone();
        let mut q = Self::zero();
        while let Some((m, c)) = p.leading() {
            if !(0..N).all(|i| m[i] >= ld[i]) {
                return None;
            }
            let mut qm = [0; N];
            for i in 0..N {
                qm[i] = m[i] - ld[i];
            }
            let qc = c / &lc;
            let t = Self::monomial(qm, qc.clone());
            q.add_term(qm, qc);
            p = &p - &(&t * d);
        }
        Some(q)
    }

    pub fn eval(&self, x: &[Complex64; N]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for i in 0..N {
                    if m[i] > 0 {
                        v *= x[i].powu(m[i]);
                    }
                }
                v
            })
            .sum()
    }

    /// Float copy of the coefficients for fast repeated evaluation.
    pub fn to_f64_terms(&self) -> Vec<(Monomial<N>, f64)> {
        self.terms.iter().map(|(m, c)| (*m, c.to_f64().unwrap_or(f64::NAN))).collect()
    }

    /// Human-readable form with the given variable names, highest terms first.
    pub fn render(&self, names: &[&str; N]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = (0..N)
                .filter(|&i| m[i] > 0)
                .map(|i| if m[i] == 1 { names[i].to_string() } else { format!("{}^{}", names[i], m[i]) })
                .collect();
            if vars.is_empty() {
                let _ = write!(out, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(out, "{a}*");
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;
    fn add(self, o: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;
    fn sub(self, o: &Poly<N>) -> Poly<N> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;
    fn mul(self, o: &Poly<N>) -> Poly<N> {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut m = [0; N];
                for i in 0..N {
                    m[i] = a[i] + b[i];
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<const N: usize> $tr for Poly<N> {
            type Output = Poly<N>;
            fn $f(self, o: Poly<N>) -> Poly<N> {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<const N: usize> Neg for Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = Poly<3>;

    fn x() -> P {
        P::var(0)
    }
    fn y() -> P {
        P::var(1)
    }

    #[test]
    fn division_exact_and_inexact() {
        let d = &x() - &y();
        let p = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(p.div_exact(&d).unwrap(), &x() + &y());
        assert!((&x() + &y()).div_exact(&d).is_none());
        assert_eq!(P::zero().div_exact(&d).unwrap(), P::zero());
    }

    #[test]
    fn translate_matches_substitution() {
        let p = &(&x().pow(3) * &y()) + &P::int(2);
        let q = p.translate(0, &rat(-1, 2));
        let xs = [Complex64::new(0.7, 0.1), Complex64::new(-0.4, 0.0), Complex64::new(0.0, 0.0)];
        let shifted = [xs[0] - 0.5, xs[1], xs[2]];
        assert!((q.eval(&xs) - p.eval(&shifted)).norm() < 1e-14);
    }

    #[test]
    fn render_is_readable() {
        let p = &(&x().scale(&rat(-1, 2)) * &y()) + &P::int(3);
        assert_eq!(p.render(&["a", "b", "c"]), "-1/2*a*b + 3");
    }

    fn small_poly() -> impl Strategy<Value = P> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -5i64..6), 0..5).prop_map(|ts| {
            ts.into_iter().fold(P::zero(), |acc, ((a, b, c), k)| &acc + &P::monomial([a, b, c], rat(k, 1)))
        })
    }

    proptest! {
        #[test]
        fn product_rule(a in small_poly(), b in small_poly()) {
            let lhs = (&a * &b).deriv(1);
            let rhs = &(&a.deriv(1) * &b) + &(&a * &b.deriv(1));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn division_inverts_multiplication(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }
    }
}
