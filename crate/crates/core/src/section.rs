//! Scalar sections phi on the real line used as inputs to T and A.

use serde::{Deserialize, Serialize};

use crate::testfn::{bump, bump_deriv};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Section {
    Zero,
    /// `amplitude * b((t - center)/radius)`.
    Bump { center: f64, radius: f64, amplitude: f64 },
    /// `sum_k coeffs[k] t^k`; no compact support.
    Polynomial { coeffs: Vec<f64> },
}

impl Section {
    pub fn bump(center: f64, radius: f64) -> Self {
        Section::Bump { center, radius, amplitude: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Section::Zero => 0.0,
            Section::Bump { center, radius, amplitude } => amplitude * bump((t - center) / radius),
            Section::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            Section::Zero => 0.0,
            Section::Bump { center, radius, amplitude } => amplitude * bump_deriv((t - center) / radius) / radius,
            Section::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c),
        }
    }

    /// Closed support interval; `None` for the zero section and for polynomials.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Section::Bump { center, radius, .. } => Some((center - radius, center + radius)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Section::Zero => true,
            Section::Bump { amplitude, .. } => *amplitude == 0.0,
            Section::Polynomial { coeffs } => coeffs.iter().all(|c| *c == 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_derivative() {
        let p = Section::Polynomial { coeffs: vec![1.0, -2.0, 0.0, 3.0] };
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.deriv(2.0), -2.0 + 36.0);
        assert_eq!(Section::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }.deriv(3.0), 6.0);
    }

    #[test]
    fn bump_derivative_matches_difference() {
        let s = Section::Bump { center: 0.2, radius: 0.7, amplitude: 1.5 };
        let t = 0.45;
        let h = 1e-5;
        let fd = (s.eval(t + h) - s.eval(t - h)) / (2.0 * h);
        assert!((fd - s.deriv(t)).abs() < 1e-8);
        assert_eq!(s.eval(1.0), 0.0);
        assert_eq!(s.support(), Some((0.2 - 0.7, 0.2 + 0.7)));
    }
}
