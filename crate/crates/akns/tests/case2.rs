use akns::families::case2_bundle;
use akns::reduction::{case2_branches, Case2Mode, Case2Reduction, Formulary, ReductionError};
use akns::specfun::EllipticModulus;
use akns::verify::{full_residual_auto, Grid, ResidualReport, ScalarMode};

const M: f64 = 0.5;

fn branches(lambda: f64, form: Formulary) -> Vec<akns::reduction::Case2Params> {
    case2_branches(1.0, 1.0, lambda, EllipticModulus::new(M).unwrap(), 1.5, form, 0.0).unwrap()
}

fn report(p: akns::reduction::Case2Params) -> Result<ResidualReport, String> {
    let red = Case2Reduction::new(p, (0.0, 0.0), 1e-12).map_err(|e| e.to_string())?;
    let g = Grid::new((-8.0, 8.0), 81, (-1.5, 1.5), 7);
    full_residual_auto(&case2_bundle(red), &g, 1e-6, ScalarMode::Auto).map_err(|e| e.to_string())
}

#[test]
fn corrected_branches_pass() {
    for p in branches(0.1, Formulary::Lax) {
        let br = p.branch;
        let r = report(p).unwrap();
        assert!(r.pass, "branch {br:?}: {:e}", r.max_rel());
        assert!(r.masked < r.points / 20);
    }
}

#[test]
fn printed_branches_fail_for_nonzero_lambda() {
    for p in branches(0.1, Formulary::Printed) {
        if let Ok(r) = report(p) {
            assert!(!r.pass);
        }
    }
}

#[test]
fn elliptic_instance() {
    // 8λ² + 8λm + m² − 1 = 0 pins k₂ = 0 on the first branch
    let lambda = (-2.0 * M + (2.0 * (1.0 + M * M)).sqrt()) / 4.0;
    let all = branches(lambda, Formulary::Lax);
    let p = all[0].clone();
    assert!(p.is_elliptic(), "k2 = {:e}", p.k2);
    assert!(!all[1].is_elliptic());
    let r = report(p).unwrap();
    assert!(r.pass, "{:e}", r.max_rel());
}

#[test]
fn zero_free_parameter() {
    let e = case2_branches(1.0, 1.0, 0.1, EllipticModulus::new(M).unwrap(), 0.0, Formulary::Lax, 0.0);
    assert_eq!(e.unwrap_err(), ReductionError::ZeroFreeParameter);
}

#[test]
fn numeric_mode_agrees_with_closed_form() {
    // a branch without poles, so the ODE can be integrated straight through
    let mut p = branches(0.1, Formulary::Lax)[1].clone();
    let closed = Case2Reduction::new(p.clone(), (0.0, 0.0), 1e-12).unwrap();
    p.mode = Case2Mode::NumericOde;
    let numeric = Case2Reduction::new(p, (-6.0, 6.0), 1e-12).unwrap();
    for i in 0..=60 {
        let s = -6.0 + 0.2 * i as f64;
        let (a, b) = (closed.profiles(s).unwrap(), numeric.profiles(s).unwrap());
        assert!((a.f.value() - b.f.value()).abs() < 1e-8 * a.f.value().abs().max(1.0), "ς = {s}");
        assert!((a.f1.value() - b.f1.value()).abs() < 1e-7 * a.f1.value().abs().max(1.0), "ς = {s}");
    }
}
