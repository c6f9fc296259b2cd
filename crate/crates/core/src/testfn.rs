//! Compactly supported product-bump test functions on GL2(R).

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPoint {
    pub x11: f64,
    pub x12: f64,
    pub x21: f64,
    pub x22: f64,
}

impl MatrixPoint {
    pub const fn new(x11: f64, x12: f64, x21: f64, x22: f64) -> Self {
        Self { x11, x12, x21, x22 }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Self::new(a, 0.0, 0.0, d)
    }

    /// Entries in the order x11, x12, x21, x22.
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x11, self.x12, self.x21, self.x22]
    }

    pub fn det(&self) -> f64 {
        self.x11 * self.x22 - self.x12 * self.x21
    }

    pub fn mul(&self, o: &MatrixPoint) -> MatrixPoint {
        MatrixPoint::new(
            self.x11 * o.x11 + self.x12 * o.x21,
            self.x11 * o.x12 + self.x12 * o.x22,
            self.x21 * o.x11 + self.x22 * o.x21,
            self.x21 * o.x12 + self.x22 * o.x22,
        )
    }

    pub fn inverse(&self) -> Result<MatrixPoint> {
        let d = self.det();
        if d == 0.0 {
            return Err(CoreError::Domain("singular matrix".into()));
        }
        Ok(MatrixPoint::new(self.x22 / d, -self.x12 / d, -self.x21 / d, self.x11 / d))
    }

    /// Fractional-linear action t -> (x12 + t x22) / (x11 + t x21).
    pub fn mobius(&self, t: f64) -> f64 {
        (self.x12 + t * self.x22) / (self.x11 + t * self.x21)
    }
}

/// 1-D bump `exp(-1/(1-x^2))` on (-1,1).
#[inline]
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

#[inline]
pub fn bump_deriv(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - x * x;
        bump(x) * (-2.0 * x / (q * q))
    }
}

/// Axis-aligned box in matrix space whose closure avoids det = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BumpBoxSpec")]
pub struct BumpBox {
    center: MatrixPoint,
    radii: [f64; 4],
}

#[derive(Deserialize)]
struct BumpBoxSpec {
    center: MatrixPoint,
    radii: [f64; 4],
}

impl TryFrom<BumpBoxSpec> for BumpBox {
    type Error = CoreError;
    fn try_from(s: BumpBoxSpec) -> Result<Self> {
        BumpBox::new(s.center, s.radii)
    }
}

impl BumpBox {
    pub fn new(center: MatrixPoint, radii: [f64; 4]) -> Result<Self> {
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(CoreError::Domain(format!("box radii must be positive, got {radii:?}")));
        }
        let b = Self { center, radii };
        let det = b.det_range();
        if det.contains_zero() {
            return Err(CoreError::Certification(format!(
                "box around {center:?} with radii {radii:?} meets det = 0 (det in [{}, {}])",
                det.lo, det.hi
            )));
        }
        Ok(b)
    }

    pub fn center(&self) -> MatrixPoint {
        self.center
    }

    pub fn radii(&self) -> [f64; 4] {
        self.radii
    }

    /// Entry ranges in the order x11, x12, x21, x22.
    pub fn ranges(&self) -> [Interval; 4] {
        let c = self.center.to_array();
        std::array::from_fn(|i| Interval::centered(c[i], self.radii[i]))
    }

    pub fn det_range(&self) -> Interval {
        let [a, b, c, d] = self.ranges();
        a * d - b * c
    }

    pub fn contains(&self, x: &MatrixPoint) -> bool {
        let c = self.center.to_array();
        x.to_array().iter().zip(c).zip(self.radii).all(|((xi, ci), ri)| (xi - ci).abs() <= ri)
    }
}

/// Value and entrywise gradient of a test function at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    /// Partials in the order d11, d12, d21, d22.
    pub grad: [f64; 4],
}

/// One weighted product bump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpTerm {
    pub amplitude: f64,
    #[serde(rename = "box")]
    pub bbox: BumpBox,
}

impl BumpTerm {
    pub fn jet(&self, x: &MatrixPoint) -> Jet {
        let c = self.bbox.center.to_array();
        let r = self.bbox.radii;
        let xs = x.to_array();
        let mut b = [0.0; 4];
        let mut db = [0.0; 4];
        for i in 0..4 {
            let y = (xs[i] - c[i]) / r[i];
            if y.abs() >= 1.0 {
                return Jet::default();
            }
            b[i] = bump(y);
            db[i] = bump_deriv(y) / r[i];
        }
        let value = self.amplitude * b[0] * b[1] * b[2] * b[3];
        let grad = [
            self.amplitude * db[0] * b[1] * b[2] * b[3],
            self.amplitude * b[0] * db[1] * b[2] * b[3],
            self.amplitude * b[0] * b[1] * db[2] * b[3],
            self.amplitude * b[0] * b[1] * b[2] * db[3],
        ];
        Jet { value, grad }
    }
}

/// Finite linear combination of product bumps. The empty sum is `F = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    terms: Vec<BumpTerm>,
}

impl TestFunction {
    pub fn bump(bbox: BumpBox) -> Self {
        Self { terms: vec![BumpTerm { amplitude: 1.0, bbox }] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<BumpTerm>) -> Self {
        Self { terms }
    }

    /// `a F + b G`.
    pub fn combine(a: f64, f: &TestFunction, b: f64, g: &TestFunction) -> Self {
        let scaled = |k: f64, h: &TestFunction| {
            h.terms.iter().map(move |t| BumpTerm { amplitude: k * t.amplitude, bbox: t.bbox }).collect::<Vec<_>>()
        };
        let mut terms = scaled(a, f);
        terms.extend(scaled(b, g));
        Self { terms }
    }

    pub fn terms(&self) -> &[BumpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    pub fn jet(&self, x: &MatrixPoint) -> Jet {
        let mut out = Jet::default();
        for t in &self.terms {
            let j = t.jet(x);
            out.value += j.value;
            for i in 0..4 {
                out.grad[i] += j.grad[i];
            }
        }
        out
    }
}

pub fn eval_f(f: &TestFunction, x: &MatrixPoint) -> f64 {
    f.jet(x).value
}

pub fn eval_partials(f: &TestFunction, x: &MatrixPoint) -> [f64; 4] {
    f.jet(x).grad
}

pub fn haar_weight(x: &MatrixPoint) -> Result<f64> {
    let d = x.det();
    if d == 0.0 {
        return Err(CoreError::Domain("Haar weight at a singular matrix".into()));
    }
    Ok(1.0 / (d * d))
}

/// Certified ranges of u = x11 + t x21, w = det/u and det over one box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxCertificate {
    pub u: Interval,
    pub w: Interval,
    pub det: Interval,
    pub u_negative: bool,
    pub w_negative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCertificate {
    pub t_range: Interval,
    pub boxes: Vec<BoxCertificate>,
}

pub fn certify_box(b: &BumpBox, t_range: Interval) -> Result<BoxCertificate> {
    let [x11, _, x21, _] = b.ranges();
    let u = x11 + t_range * x21;
    if u.contains_zero() {
        return Err(CoreError::Certification(format!(
            "u = x11 + t x21 can vanish: u in [{}, {}] for t in [{}, {}]",
            u.lo, u.hi, t_range.lo, t_range.hi
        )));
    }
    let det = b.det_range();
    let w = det.div(&u).expect("u is sign-definite");
    Ok(BoxCertificate { u, w, det, u_negative: u.hi < 0.0, w_negative: w.hi < 0.0 })
}

pub fn certify_window(f: &TestFunction, t_range: Interval) -> Result<WindowCertificate> {
    if !(t_range.lo.is_finite() && t_range.hi.is_finite()) {
        return Err(CoreError::Precondition("t range must be bounded".into()));
    }
    let boxes = f.terms.iter().map(|t| certify_box(&t.bbox, t_range)).collect::<Result<Vec<_>>>()?;
    Ok(WindowCertificate { t_range, boxes })
}
