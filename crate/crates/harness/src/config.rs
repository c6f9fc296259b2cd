//! Suite configuration: a TOML file with one section per suite. The checked-in
//! default is compiled in so every suite runs with no arguments.

use std::path::Path;

use glfour_core::gl2c::{ComplexParam, ComplexTestFunction};
use glfour_core::principal::PrincipalParam;
use glfour_core::quadrature::{PanelRule, QmcRule};
use glfour_core::scalars::Parity;
use glfour_core::testfn::{certify_window, BumpBox, BumpTerm, MatrixPoint, TestFunction};
use glfour_core::interval::Interval;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DEFAULT_TOML: &str = include_str!("../config/default.toml");

/// `[re, im]`.
pub type C2 = [f64; 2];

pub fn cx(v: C2) -> Complex64 {
    Complex64::new(v[0], v[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    pub name: String,
    /// x11, x12, x21, x22.
    pub center: [f64; 4],
    pub radii: [f64; 4],
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

fn unit_amplitude() -> f64 {
    1.0
}

impl TestFunctionSpec {
    pub fn build(&self) -> Result<TestFunction> {
        let [a, b, c, d] = self.center;
        let bbox = BumpBox::new(MatrixPoint::new(a, b, c, d), self.radii)?;
        Ok(TestFunction::from_terms(vec![BumpTerm { amplitude: self.amplitude, bbox }]))
    }

    /// Where K(t, .) concentrates: the centre acting on t.
    pub fn s_center(&self, t: f64) -> f64 {
        let [a, b, c, d] = self.center;
        MatrixPoint::new(a, b, c, d).mobius(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    /// (mu1, mu2) pairs; each is combined with all four parity classes.
    pub mu: Vec<[C2; 2]>,
    pub sigma: Vec<C2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t: Vec<f64>,
    pub s_offsets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub kernel_order: usize,
    pub direct_order: usize,
    pub s_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelOracleConfig {
    pub enabled: bool,
    pub tolerance: f64,
    pub section_centers: Vec<f64>,
    pub section_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MainTheoremConfig {
    pub enabled: bool,
    pub tolerance: f64,
    pub diagonal_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub enabled: bool,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagConfig {
    pub enabled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieActionConfig {
    pub enabled: bool,
    pub tolerance: f64,
    pub complex_tolerance: f64,
    pub complex: bool,
    pub t: Vec<f64>,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntertwinerConfig {
    pub enabled: bool,
    pub tolerance: f64,
    /// Values of mu1 - mu2; Re must be negative.
    pub mu_differences: Vec<C2>,
    pub mu2: C2,
    /// Random (X, t) points per parameter.
    pub samples: usize,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitiesConfig {
    pub enabled: bool,
    pub tolerance: f64,
    pub grid_points: usize,
    pub grid_max: f64,
    pub discrete_max_n: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpotConfig {
    pub enabled: bool,
    pub points: usize,
    pub replicates: usize,
    pub error_bars: f64,
    pub center: [C2; 4],
    pub radii: [C2; 4],
    pub mu1: C2,
    pub mu1p: C2,
    pub mu2: C2,
    pub mu2p: C2,
    pub sigma: C2,
    pub sigmap: C2,
    /// (t, s) pairs.
    pub points_ts: Vec<[C2; 2]>,
}

impl ComplexSpotConfig {
    pub fn test_function(&self) -> Result<ComplexTestFunction> {
        Ok(ComplexTestFunction::new(self.center.map(cx), self.radii)?)
    }

    pub fn param(&self) -> Result<ComplexParam> {
        Ok(ComplexParam::new(cx(self.mu1), cx(self.mu1p), cx(self.mu2), cx(self.mu2p), cx(self.sigma), cx(self.sigmap))?)
    }

    pub fn rule(&self, seed: u64) -> Result<QmcRule> {
        Ok(QmcRule::new(self.points, self.replicates, seed)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub window: f64,
    pub test_functions: Vec<TestFunctionSpec>,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub quadrature: QuadratureConfig,
    pub kernel_oracle: KernelOracleConfig,
    pub main_theorem: MainTheoremConfig,
    pub lemmas: ToleranceConfig,
    pub commutators: FlagConfig,
    pub lie_action: LieActionConfig,
    pub intertwiner: IntertwinerConfig,
    pub densities: DensitiesConfig,
    pub complex_spot: ComplexSpotConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TOML).expect("checked-in default config is valid")
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Every principal parameter: mu pairs x parity classes x sigma values.
    pub fn principal_params(&self) -> Result<Vec<PrincipalParam>> {
        let mut out = Vec::new();
        for sigma in &self.params.sigma {
            for [m1, m2] in &self.params.mu {
                for (e1, e2) in parity_classes() {
                    out.push(PrincipalParam::new(cx(*m1), e1, cx(*m2), e2, cx(*sigma))?);
                }
            }
        }
        Ok(out)
    }

    pub fn kernel_rule(&self) -> Result<PanelRule> {
        Ok(PanelRule::new(self.quadrature.kernel_order, 1)?)
    }

    pub fn direct_rule(&self) -> Result<PanelRule> {
        Ok(PanelRule::new(self.quadrature.direct_order, 1)?)
    }

    pub fn s_rule(&self) -> Result<PanelRule> {
        Ok(PanelRule::new(self.quadrature.s_order, 1)?)
    }

    /// (t, s) sample points for one test function.
    pub fn ts_grid(&self, f: &TestFunctionSpec) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &t in &self.grid.t {
            let s0 = f.s_center(t);
            for &d in &self.grid.s_offsets {
                out.push((t, s0 + d));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.window > 0.0) {
            return bad(format!("window must be positive, got {}", self.window));
        }
        if self.test_functions.is_empty() {
            return bad("at least one test function is required".into());
        }
        for [m1, m2] in &self.params.mu {
            if (cx(*m1) - cx(*m2)).norm() < 1e-12 {
                return bad(format!("mu sample {m1:?} has mu1 = mu2"));
            }
        }
        for s in &self.params.sigma {
            if s[0] != 0.0 {
                return bad(format!("sigma must be imaginary, got {s:?}"));
            }
        }
        for spec in &self.test_functions {
            let f = spec.build()?;
            certify_window(&f, Interval::new(-self.window, self.window))?;
            for (t, s) in self.ts_grid(spec) {
                if t.abs() > self.window || s.abs() > self.window {
                    return bad(format!("grid point (t, s) = ({t}, {s}) for '{}' is outside the window {}", spec.name, self.window));
                }
            }
        }
        for d in &self.intertwiner.mu_differences {
            if !(d[0] < 0.0) {
                return bad(format!("intertwiner mu1 - mu2 = {d:?} needs a negative real part"));
            }
        }
        if self.complex_spot.enabled || !self.complex_spot.points_ts.is_empty() {
            let f = self.complex_spot.test_function()?;
            let reach = self.complex_spot.points_ts.iter().flat_map(|[t, _]| [t[0].abs(), t[1].abs()]).fold(0.0, f64::max);
            f.certify_window(reach)?;
            self.complex_spot.param()?;
        }
        Ok(())
    }

    /// Reduced grids for quick runs.
    pub fn fast(mut self) -> Self {
        let thin = |v: &mut Vec<f64>| {
            if v.len() > 2 {
                let n = v.len();
                *v = vec![v[0], v[n / 2], v[n - 1]];
            }
        };
        thin(&mut self.grid.t);
        thin(&mut self.grid.s_offsets);
        thin(&mut self.kernel_oracle.section_centers);
        thin(&mut self.lie_action.t);
        self.params.mu.truncate(2);
        self.intertwiner.samples = self.intertwiner.samples.min(2);
        self.complex_spot.points = self.complex_spot.points.min(1 << 16);
        self.complex_spot.points_ts.truncate(1);
        self
    }
}

pub fn parity_classes() -> [(Parity, Parity); 4] {
    [(Parity::EVEN, Parity::EVEN), (Parity::EVEN, Parity::ODD), (Parity::ODD, Parity::EVEN), (Parity::ODD, Parity::ODD)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parses_and_validates() {
        let cfg = SuiteConfig::default();
        assert_eq!(cfg.test_functions.len(), 2);
        assert_eq!(cfg.principal_params().unwrap().len(), 12);
        assert_eq!(cfg.ts_grid(&cfg.test_functions[1])[0], (-0.6, 0.6 - 0.2));
    }

    #[test]
    fn rejects_bad_input() {
        let text = DEFAULT_TOML.replace("[[0.0, 1.0], [0.0, -1.0]]", "[[0.5, 0.0], [0.5, 0.0]]");
        assert!(matches!(SuiteConfig::from_toml(&text), Err(HarnessError::Config(_))));
        let text = DEFAULT_TOML.replace("window = 2.0", "window = 0.5");
        assert!(SuiteConfig::from_toml(&text).is_err());
        let text = DEFAULT_TOML.replace("seed = 20240917", "seed = 1\nbogus = 3");
        assert!(SuiteConfig::from_toml(&text).is_err());
        let text = DEFAULT_TOML.replace("window = 2.0", "window = 10.0");
        assert!(matches!(SuiteConfig::from_toml(&text), Err(HarnessError::Core(_))));
    }

    #[test]
    fn fast_is_smaller() {
        let cfg = SuiteConfig::default().fast();
        assert_eq!(cfg.grid.t, vec![-0.6, 0.0, 0.6]);
        assert_eq!(cfg.params.mu.len(), 2);
    }
}
