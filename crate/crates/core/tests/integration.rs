use glfour_core::gl2c::{e_c_spotcheck_all, ComplexParam, ComplexTestFunction, SignVariant, SpotIntegrals, SpotOperator};
use glfour_core::kernel::KernelFn;
use glfour_core::principal::{apply_t, apply_t_fn, fourier_direct, intertwiner_a, intertwiner_a_fn, PrincipalParam};
use glfour_core::quadrature::{PanelRule, QmcRule};
use glfour_core::scalars::{plancherel_density_discrete, plancherel_density_principal, DiscreteParam, Parity};
use glfour_core::section::Section;
use glfour_core::testfn::{BumpBox, MatrixPoint, TestFunction};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn near_identity_bump() -> TestFunction {
    TestFunction::bump(BumpBox::new(MatrixPoint::new(1.0, 0.0, 0.0, 1.0), [0.2; 4]).unwrap())
}

#[test]
fn kernel_matches_direct_integral_at_low_order() {
    let f = near_identity_bump();
    let p = PrincipalParam::plain(c(0.3, 0.7), Parity::ODD, c(-0.2, -0.1), Parity::EVEN);
    let kernel = KernelFn::new(f.clone(), 2.0, PanelRule::new(24, 1).unwrap()).unwrap();
    let phi = Section::bump(0.05, 1.75);
    for t in [-0.4, 0.0, 0.35] {
        let direct = fourier_direct(&f, &p, &phi, t, PanelRule::new(24, 1).unwrap()).unwrap();
        let via_kernel = kernel.integrate_against(t, &[p], std::slice::from_ref(&phi), PanelRule::new(32, 1).unwrap()).unwrap()[0][0];
        let scale = direct.value.norm();
        assert!(scale > 1e-6);
        assert!((direct.value - via_kernel.value).norm() <= 1e-4 * scale, "t = {t}: {} vs {}", direct.value, via_kernel.value);
    }
}

#[test]
fn action_is_a_homomorphism() {
    let p = PrincipalParam::plain(c(0.2, 0.4), Parity::ODD, c(-0.1, 0.3), Parity::ODD);
    let x = MatrixPoint::new(1.1, 0.2, -0.1, 0.9);
    let y = MatrixPoint::new(0.8, -0.3, 0.15, 1.2);
    let phi = |s: f64| c((-s * s).exp(), s);
    for t in [-0.5, 0.1, 0.7] {
        let nested = apply_t_fn(&p, &x, |s| apply_t_fn(&p, &y, phi, s).unwrap(), t).unwrap();
        let direct = apply_t_fn(&p, &x.mul(&y), phi, t).unwrap();
        assert!((nested - direct).norm() <= 1e-12 * direct.norm().max(1.0), "t = {t}");
    }
}

#[test]
fn identity_acts_trivially() {
    let p = PrincipalParam::plain(c(0.5, 0.1), Parity::ODD, c(0.0, -0.6), Parity::EVEN);
    let phi = Section::bump(0.1, 0.9);
    for t in [-0.7, 0.0, 0.4] {
        let v = apply_t(&p, &MatrixPoint::new(1.0, 0.0, 0.0, 1.0), &phi, t).unwrap();
        assert!((v - c(phi.eval(t), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn intertwiner_commutes_with_identity_and_translations() {
    let rule = PanelRule::new(32, 1).unwrap();
    let phi = Section::bump(0.1, 0.9);
    let support = phi.support().unwrap();
    for (e1, e2) in [(Parity::EVEN, Parity::EVEN), (Parity::ODD, Parity::EVEN)] {
        let p = PrincipalParam::plain(c(-0.4, 0.2), e1, c(0.1, 0.2), e2);
        for t in [-0.3, 0.25] {
            let a = intertwiner_a(&p, &phi, t, rule).unwrap();
            let id = intertwiner_a_fn(&p, |s| c(phi.eval(s), 0.0), support, t, rule).unwrap();
            assert!((a.value - id.value).norm() <= 1e-12 * a.value.norm().max(1e-300));
            // Translation by b: the integral is a convolution in s - t.
            let b = 0.15;
            let shifted = intertwiner_a_fn(&p, |s| c(phi.eval(s + b), 0.0), (support.0 - b, support.1 - b), t, rule).unwrap();
            let moved = intertwiner_a(&p, &phi, t + b, rule).unwrap();
            assert!((shifted.value - moved.value).norm() <= 1e-8 * moved.value.norm(), "t = {t}");
        }
    }
}

#[test]
fn density_limits_and_discrete_values() {
    use std::f64::consts::PI;
    for eps2 in [Parity::EVEN, Parity::ODD] {
        assert_eq!(plancherel_density_principal(0.0, 0.0, Parity::EVEN, eps2), 0.0);
        let coth = plancherel_density_principal(1e-7, 0.0, Parity::ODD, eps2);
        assert!((coth - 1.0 / (8.0 * PI.powi(4))).abs() < 1e-12);
        for x in [0.3, 1.7, 4.0] {
            for eps1 in [Parity::EVEN, Parity::ODD] {
                let r = plancherel_density_principal(x, 0.0, eps1, eps2);
                assert!(r >= 0.0);
                assert!((r - plancherel_density_principal(-x, 0.0, eps1, eps2)).abs() < 1e-15);
            }
        }
    }
    for n in 1..=4 {
        let d = plancherel_density_discrete(&DiscreteParam::new(n, 0.0, Parity::ODD).unwrap());
        assert!((d - n as f64 / (8.0 * PI.powi(3))).abs() < 1e-15);
    }
}

fn spot_setup() -> (ComplexTestFunction, ComplexParam) {
    let one = c(1.0, 0.0);
    let f = ComplexTestFunction::new([one, c(0.0, 0.0), c(0.0, 0.0), one], [[0.2, 0.2]; 4]).unwrap();
    let p = ComplexParam::new(c(0.3, 0.5), c(1.3, 0.5), c(-0.2, -0.4), c(-1.2, -0.4), c(0.0, 0.3), c(0.0, -0.2)).unwrap();
    (f, p)
}

#[test]
fn complex_spot_checks_hold_at_small_point_counts() {
    let (f, p) = spot_setup();
    let (t, s) = (c(0.2, 0.1), c(0.25, 0.05));
    let rule = QmcRule::new(1 << 14, 8, 5).unwrap();
    let all = e_c_spotcheck_all(&f, &p, t, s, rule).unwrap();
    assert!(!all.is_empty());
    let spot = SpotIntegrals::compute(&f, &p, t, s, rule).unwrap();
    for op in SpotOperator::ALL {
        let chk = spot.check(op, SignVariant::Plus).unwrap();
        assert!(chk.within(4.0), "{}: residual {} vs se {}", op.name(), chk.residual, chk.combined_se);
    }
    // Same seed, same numbers.
    let again = SpotIntegrals::compute(&f, &p, t, s, rule).unwrap();
    assert_eq!(spot.check(SpotOperator::E32, SignVariant::Plus).unwrap(), again.check(SpotOperator::E32, SignVariant::Plus).unwrap());
}
