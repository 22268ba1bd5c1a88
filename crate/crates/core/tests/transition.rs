use ahnls::dirac::*;
use ahnls::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn constant_potential_matches_closed_form() {
    let psi = c(0.7, -0.4);
    let p = Potential::constant(psi);
    for lambda in [c(0.3, 0.8), c(-1.2, -0.5), c(2.0, 0.1)] {
        let m = transition_matrix(&p, 1.7, -0.6, lambda, 1e-11).unwrap();
        let o = constant_potential_oracle(psi, 1.7, -0.6, lambda);
        let diff = Matrix2 { m: [[m.m11() - o.m11(), m.m12() - o.m12()], [m.m21() - o.m21(), m.m22() - o.m22()]] };
        assert!(diff.max_norm() <= 1e-9 * o.m.max_norm().max(1.0), "{lambda}: {:e}", diff.max_norm());
    }
}

#[test]
fn unit_determinant_and_composition() {
    let p = Potential::gaussian(c(1.0, 0.3), 0.0, 0.8).unwrap();
    let lambda = c(0.4, 0.9);
    let full = transition_matrix(&p, 2.0, -1.5, lambda, 1e-11).unwrap();
    let a = transition_matrix(&p, 0.3, -1.5, lambda, 1e-11).unwrap();
    let b = transition_matrix(&p, 2.0, 0.3, lambda, 1e-11).unwrap();
    assert!((full.det() - 1.0).norm() <= 10.0 * full.estimated_error.max(1e-12));
    let prod = b.m * a.m;
    let gap = (prod.m[0][0] - full.m11()).norm().max((prod.m[1][0] - full.m21()).norm());
    assert!(gap <= 10.0 * (a.estimated_error + b.estimated_error + full.estimated_error), "{gap:e}");
}

#[test]
fn conjugation_symmetry() {
    // M(λ̄)* = σ₁ M(λ) σ₁ for the Zakharov–Shabat system
    let p = Potential::compact_bump(c(-0.5, 1.0), 0.0, 1.5).unwrap();
    let lambda = c(0.8, -0.6);
    let m = transition_matrix(&p, 1.2, -1.2, lambda, 1e-11).unwrap();
    let mc = transition_matrix(&p, 1.2, -1.2, lambda.conj(), 1e-11).unwrap();
    let budget = 10.0 * (m.estimated_error + mc.estimated_error);
    assert!((mc.m11().conj() - m.m22()).norm() <= budget);
    assert!((mc.m12().conj() - m.m21()).norm() <= budget);
}

#[test]
fn zero_potential_is_free() {
    let lambda = c(1.1, 0.4);
    let m = transition_matrix(&Potential::zero(), 0.9, -2.0, lambda, 1e-12).unwrap();
    let f = free_transition(0.9, -2.0, lambda);
    assert!((m.m11() - f.m[0][0]).norm() < 1e-10 && (m.m22() - f.m[1][1]).norm() < 1e-10);
    assert!(m.m12().norm() < 1e-14 && m.m21().norm() < 1e-14);
}
