//! The auxiliary linear problem `f' = V(x, λ) f` with
//! `V = [[-iλ/2, ψ̄], [ψ, iλ/2]]`, and its transition matrices.

mod matrix;
mod potential;

pub use matrix::{skew_pairing, Matrix2};
pub use potential::{eval_potential, CubicSpline, Field, Potential, PotentialKind, DEFAULT_TAIL_BOUND};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem, Solution, State, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn coefficient_matrix<P: Field + ?Sized>(p: &P, x: f64, lambda: Complex64) -> Matrix2 {
    let psi = p.value(x);
    let d = -I * lambda * 0.5;
    Matrix2::new(d, psi.conj(), psi, -d)
}

/// Fundamental solution `M(x, y, λ)` with `M(y, y, λ) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    pub m: Matrix2,
    pub from_x: f64,
    pub to_x: f64,
    pub lambda: Complex64,
    /// Error budget for the entries and for bilinear combinations of them
    /// (determinant, products): accumulated relative step error times `max(1, ‖M‖)²`.
    pub estimated_error: f64,
}

impl TransitionMatrix {
    pub fn m11(&self) -> Complex64 {
        self.m.m[0][0]
    }
    pub fn m12(&self) -> Complex64 {
        self.m.m[0][1]
    }
    pub fn m21(&self) -> Complex64 {
        self.m.m[1][0]
    }
    pub fn m22(&self) -> Complex64 {
        self.m.m[1][1]
    }

    pub fn column(&self, j: usize) -> [Complex64; 2] {
        self.m.column(j)
    }

    pub fn det(&self) -> Complex64 {
        self.m.det()
    }
}

pub(crate) struct LinearSystem<'a, P: Field + ?Sized> {
    pub p: &'a P,
    pub lambda: Complex64,
}

impl<P: Field + ?Sized> OdeSystem<4> for LinearSystem<'_, P> {
    // columns stacked: [m11, m21, m12, m22]
    fn rhs(&self, x: f64, u: &State<4>) -> State<4> {
        let psi = self.p.value(x);
        let d = -I * self.lambda * 0.5;
        let pb = psi.conj();
        [d * u[0] + pb * u[1], psi * u[0] - d * u[1], d * u[2] + pb * u[3], psi * u[2] - d * u[3]]
    }

    fn error_scale(&self, u: &State<4>) -> f64 {
        u.iter().fold(1.0_f64, |a, z| a.max(z.norm()))
    }
}

pub(crate) fn to_state(m: &Matrix2) -> State<4> {
    [m.m[0][0], m.m[1][0], m.m[0][1], m.m[1][1]]
}

pub(crate) fn from_state(u: &State<4>) -> Matrix2 {
    Matrix2::new(u[0], u[2], u[1], u[3])
}

pub(crate) fn step_cap<P: Field + ?Sized>(p: &P) -> f64 {
    (0.5 * p.feature_scale()).min(f64::MAX)
}

/// Local tolerance handed to the step controller for a requested accuracy.
pub(crate) fn local_tolerance(tol: f64) -> f64 {
    0.1 * tol
}

/// Splits `[a, b]` (either orientation) at the field's breakpoints.
pub(crate) fn segments<P: Field + ?Sized>(p: &P, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = (a.min(b), a.max(b));
    let mut cuts: Vec<f64> = p.breakpoints().into_iter().filter(|c| *c > lo && *c < hi).collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    if b < a {
        cuts.reverse();
    }
    let mut pts = vec![a];
    pts.extend(cuts);
    pts.push(b);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn finish(m: Matrix2, x: f64, y: f64, lambda: Complex64, rel_err: f64, steps: usize) -> TransitionMatrix {
    let scale = m.max_norm().max(1.0);
    let estimated_error = 2.0 * (rel_err + 4.0 * f64::EPSILON * (steps as f64 + 1.0)) * scale * scale;
    TransitionMatrix { m, from_x: y, to_x: x, lambda, estimated_error }
}

/// `M(x, y, λ)` by adaptive Dormand–Prince integration from `y` to `x`.
pub fn transition_matrix<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<TransitionMatrix> {
    Ok(transition_path(p, x, y, lambda, tol)?.end())
}

/// Transition matrix with dense output for every intermediate `s` between `y` and `x`.
#[derive(Debug, Clone)]
pub struct TransitionPath {
    pub base: f64,
    pub lambda: Complex64,
    pieces: Vec<Solution<4>>,
    end: TransitionMatrix,
}

pub fn transition_path<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<TransitionPath> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument("endpoints must be finite".into()));
    }
    let mut sys = LinearSystem { p, lambda };
    let mut opts = Tolerance::new(local_tolerance(tol));
    opts.h_max = step_cap(p);
    let mut u = to_state(&Matrix2::IDENTITY);
    let mut pieces = Vec::new();
    let mut rel = 0.0;
    let mut steps = 0;
    for (a, b) in segments(p, y, x) {
        let sol = ode::integrate(&mut sys, a, b, u, &opts)?;
        u = sol.u_end;
        rel += sol.rel_error_sum;
        steps += sol.steps.len();
        pieces.push(sol);
    }
    let m = from_state(&u);
    if !m.is_finite() {
        return Err(Error::IntegrationFailure { x, reason: "transition matrix overflowed".into() });
    }
    Ok(TransitionPath { base: y, lambda, pieces, end: finish(m, x, y, lambda, rel, steps) })
}

impl TransitionPath {
    pub fn end(&self) -> TransitionMatrix {
        self.end
    }

    /// `M(s, base, λ)` for `s` between the base point and the far end.
    pub fn at(&self, s: f64) -> Option<Matrix2> {
        if s == self.base {
            return Some(Matrix2::IDENTITY);
        }
        self.pieces.iter().find_map(|sol| sol.eval(s)).map(|(u, _)| from_state(&u))
    }
}

fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        1.0 + z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sinh() / z
    }
}

/// Closed form `cosh(μΔ) I + sinh(μΔ)/μ V` for `ψ ≡ c`, `μ² = |c|² - λ²/4`.
pub fn constant_potential_oracle(c: Complex64, x: f64, y: f64, lambda: Complex64) -> TransitionMatrix {
    let delta = x - y;
    let mu = (c.norm_sqr() - lambda * lambda / 4.0).sqrt();
    let v = coefficient_matrix(&Potential::constant(c), 0.0, lambda);
    let z = mu * delta;
    let m = Matrix2::IDENTITY.scale(z.cosh()) + v.scale(sinhc(z) * delta);
    let m = if delta == 0.0 { Matrix2::IDENTITY } else { m };
    let scale = m.max_norm().max(1.0);
    TransitionMatrix { m, from_x: y, to_x: x, lambda, estimated_error: 8.0 * f64::EPSILON * scale * scale }
}

/// Free transition matrix `diag(e^{-iλ(x-y)/2}, e^{iλ(x-y)/2})`.
pub fn free_transition(x: f64, y: f64, lambda: Complex64) -> Matrix2 {
    let phase = -I * lambda * 0.5 * (x - y);
    Matrix2::diag(phase.exp(), (-phase).exp())
}
