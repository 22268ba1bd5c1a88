use ahnls::brackets::*;
use ahnls::dirac::{Field, Potential};
use ahnls::weyl::{weyl_function, AsymptoticTarget, CoverPoint, WeylOptions};
use ahnls::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bump() -> Potential {
    Potential::compact_bump(c(1.0, 0.0), 0.0, 2.0).unwrap()
}

fn x_at(p: &Potential, y: f64, q: &CoverPoint) -> Complex64 {
    weyl_function(p, y, q, &WeylOptions::riccati_only(1e-12)).unwrap().value.finite().unwrap()
}

#[test]
fn quadrature_bracket_matches_closed_form() {
    let p = Potential::gaussian(c(0.8, 0.4), 0.0, 1.0).unwrap();
    let opts = BracketOptions::default();
    let pairs = [
        (CoverPoint::minus(c(0.3, -0.8)).unwrap(), CoverPoint::minus(c(-0.5, -1.3)).unwrap()),
        (CoverPoint::plus(c(0.3, -0.8)).unwrap(), CoverPoint::plus(c(-0.5, -1.3)).unwrap()),
    ];
    for (q, pt) in pairs {
        let s = classical_bracket_weyl(&p, 0.2, &q, &pt, &opts).unwrap();
        let pred = ah_predicted(&q, &pt, x_at(&p, 0.2, &q), x_at(&p, 0.2, &pt)).unwrap();
        let err = (s.value - pred).norm();
        assert!(err <= 1e-6 * pred.norm().max(1.0), "{}: {err:e}", s.case.name());
    }
}

#[test]
fn mixed_components_commute() {
    let p = bump();
    let q = CoverPoint::minus(c(0.2, -0.7)).unwrap();
    let pt = CoverPoint::minus(c(-0.4, 0.9)).unwrap();
    let s = classical_bracket_weyl(&p, 0.5, &q, &pt, &BracketOptions::default()).unwrap();
    assert_eq!(s.case, BracketCase::RL);
    assert!(s.value.norm() <= 1e-8);
}

#[test]
fn closed_form_gradient_matches_finite_differences() {
    let p = bump();
    let q = CoverPoint::minus(c(0.3, -1.0)).unwrap();
    let opts = BracketOptions::default();
    let fd = fd_gradient_richardson(&p, -0.5, &q, 0.4, 0.3, 1e-3, &opts.weyl).unwrap();
    let an = mollified_gradient(&p, -0.5, &q, 0.4, 0.3, &opts).unwrap();
    let scale = an.0.norm().max(an.1.norm());
    assert!((fd.0 - an.0).norm() <= 1e-5 * scale && (fd.1 - an.1).norm() <= 1e-5 * scale);
    // R gradients vanish to the left of the base point
    let left = mollified_gradient(&p, 0.5, &q, -0.5, 0.3, &opts).unwrap();
    assert_eq!((left.0.norm(), left.1.norm()), (0.0, 0.0));
}

#[test]
fn exact_shift_relation() {
    let p = bump();
    let opts = BracketOptions::default();
    let pt = CoverPoint::minus(c(0.2, -0.9)).unwrap();
    for tau in [5.0, 20.0] {
        let q = CoverPoint::plus(c(0.0, tau)).unwrap();
        let r = exact_shift_residual(&p, 0.25, -0.25, &q, &pt, &opts).unwrap();
        assert!(r.norm() <= 1e-6, "τ = {tau}: {:e}", r.norm());
    }
}

#[test]
fn shift_residual_decays_toward_minus_infinity() {
    let p = bump();
    let opts = BracketOptions::default();
    let pt = CoverPoint::minus(c(0.2, -0.9)).unwrap();
    let r: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&t| {
            shift_residual_at(&p, 0.25, -0.25, &CoverPoint::minus(c(0.0, -t)).unwrap(), &pt, &opts).unwrap().norm()
        })
        .collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn reality_relation() {
    let p = Potential::gaussian(c(0.6, -0.3), 0.0, 1.0).unwrap();
    let q = CoverPoint::minus(c(0.4, -0.8)).unwrap();
    let pt = CoverPoint::minus(c(-0.6, -1.1)).unwrap();
    let r = reality_relation_residual(&p, 0.1, &q, &pt, &BracketOptions::default()).unwrap();
    assert!(r.norm() <= 1e-8, "{:e}", r.norm());
}

#[test]
fn skew_product_identity_holds() {
    let p = bump();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let f0 = [[one, zero], [c(0.3, 0.1), one]];
    let g0 = [[c(0.5, -0.2), one], [one, zero]];
    let (lhs, rhs) = skew_product_identity(&p, -1.0, 1.5, c(0.3, 0.5), c(-0.7, 0.2), f0, g0, 1e-12).unwrap();
    assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
}

#[test]
fn delta_probe_converges() {
    let p = bump();
    let f = TestFunction::new(0.0, 0.5, c(1.0, 0.0)).unwrap();
    let target = c(0.0, 1.0) * f.eval(0.0);
    let opts = BracketOptions::default();
    let e25 = (delta_limit_probe(&p, 0.0, &f, 25.0, &opts).unwrap() - target).norm();
    let e100 = (delta_limit_probe(&p, 0.0, &f, 100.0, &opts).unwrap() - target).norm();
    assert!(e100 < e25 / 3.0, "{e25:e} {e100:e}");
    let mirrored = delta_limit_probe_mirrored(&p, 0.0, &f, 100.0, &opts).unwrap();
    assert!((mirrored - target).norm() < 2.0 * e25);
}

#[test]
fn fields_recovered_at_large_tau() {
    let p = bump();
    let psi = p.value(0.0);
    let (a, b) = recover_fields(&p, 0.0, 80.0, &WeylOptions::riccati_only(1e-12)).unwrap();
    assert!((a - psi).norm() < 1e-3 && (b - psi.conj()).norm() < 1e-3);
    let e = ahnls::weyl::asymptotic_residual(
        &p,
        0.0,
        80.0,
        AsymptoticTarget::PMinusOrder1,
        &WeylOptions::riccati_only(1e-12),
    )
    .unwrap();
    assert!(e.norm() < 1e-3);
}
