//! Functional gradients of Weyl functions, the classical bracket
//! `{A, B} = 2i ∫ (δA/δψ̄ δB/δψ - δA/δψ δB/δψ̄) dx` evaluated on them by
//! quadrature, its Atiyah–Hitchin prediction, and the large-`λ` limits that
//! recover the field variables.

mod probe;

pub use probe::{delta_limit_probe, delta_limit_probe_mirrored, recover_fields, skew_product_identity, TestFunction};

use std::cell::Cell;

use num_complex::Complex64;

use crate::ahcore;
use crate::dirac::Field;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::weyl::{Component, CoverPoint, SphereValue, WeylOptions, WeylTrajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `δX(z, Q)/δψ(y)` and `δX(z, Q)/δψ̄(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientPair {
    pub d_psi: Complex64,
    pub d_psibar: Complex64,
    pub base: f64,
    pub eval: f64,
    pub point: CoverPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BracketCase {
    RR,
    LL,
    RL,
}

impl BracketCase {
    pub fn of(q: &CoverPoint, p: &CoverPoint) -> Self {
        match (q.classify(), p.classify()) {
            (Component::R, Component::R) => BracketCase::RR,
            (Component::L, Component::L) => BracketCase::LL,
            _ => BracketCase::RL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BracketCase::RR => "RR",
            BracketCase::LL => "LL",
            BracketCase::RL => "RL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketSample {
    pub value: Complex64,
    pub quadrature_error: f64,
    /// Tail beyond the truncation point plus the propagated Weyl-function error.
    pub truncation_error: f64,
    pub case: BracketCase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketOptions {
    pub weyl: WeylOptions,
    pub quad: QuadOptions,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            weyl: WeylOptions::riccati_only(1e-12),
            quad: QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 4000 },
        }
    }
}

/// Gradient of `X(base, Q)` as a function of the perturbation point.
#[derive(Debug, Clone)]
pub struct WeylGradient {
    traj: WeylTrajectory,
    base: f64,
}

impl WeylGradient {
    pub fn new<P: Field + ?Sized>(p: &P, base: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<Self> {
        Self::reaching(p, base, q, opts, base)
    }

    pub fn reaching<P: Field + ?Sized>(
        p: &P,
        base: f64,
        q: &CoverPoint,
        opts: &WeylOptions,
        reach: f64,
    ) -> Result<Self> {
        let traj = WeylTrajectory::reaching(p, base, q, opts, reach)?;
        if traj.value().is_pole() {
            return Err(Error::NotNormalizable);
        }
        Ok(Self { traj, base })
    }

    pub fn point(&self) -> CoverPoint {
        self.traj.point()
    }

    pub fn value(&self) -> SphereValue {
        self.traj.value()
    }

    pub fn trajectory(&self) -> &WeylTrajectory {
        &self.traj
    }

    /// Interval on which the gradient can be nonzero, cut at the truncation point.
    pub fn supported(&self) -> (f64, f64) {
        self.traj.domain()
    }

    /// `(δX/δψ(y), δX/δψ̄(y))`
    pub fn at(&self, y: f64) -> Result<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        let sign = match self.point().classify() {
            Component::R if y < self.base => return Ok((zero, zero)),
            Component::L if y > self.base => return Ok((zero, zero)),
            Component::R => -1.0,
            Component::L => 1.0,
        };
        let e = self.traj.solution(y, self.base)?;
        Ok((sign * e[0] * e[0], -sign * e[1] * e[1]))
    }
}

pub fn weyl_gradients<P: Field + ?Sized>(
    p: &P,
    z: f64,
    q: &CoverPoint,
    y: f64,
    opts: &WeylOptions,
) -> Result<GradientPair> {
    let g = WeylGradient::reaching(p, z, q, opts, y)?;
    let (d_psi, d_psibar) = g.at(y)?;
    Ok(GradientPair { d_psi, d_psibar, base: z, eval: y, point: *q })
}

/// `2i ∫ (δA/δψ̄ δB/δψ - δA/δψ δB/δψ̄) dξ` over the common support of two gradients.
pub fn gradient_bracket<P: Field + ?Sized>(
    p: &P,
    a: &WeylGradient,
    b: &WeylGradient,
    quad_opts: &QuadOptions,
) -> Result<(Complex64, f64, f64)> {
    let (alo, ahi) = a.supported();
    let (blo, bhi) = b.supported();
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    if lo >= hi {
        return Ok((Complex64::new(0.0, 0.0), 0.0, 0.0));
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |xi: f64| -> Complex64 {
        match (a.at(xi), b.at(xi)) {
            (Ok((a_psi, a_psibar)), Ok((b_psi, b_psibar))) => 2.0 * I * (a_psibar * b_psi - a_psi * b_psibar),
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let r = quad::integrate(integrand, lo, hi, &p.breakpoints(), quad_opts)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let l1 = quad::integrate(
        |xi| Complex64::new(integrand(xi).norm(), 0.0),
        lo,
        hi,
        &p.breakpoints(),
        &QuadOptions { abs_tol: 1e-300, rel_tol: 1e-3, max_intervals: 200 },
    )
    .map(|q| q.value.re)
    .unwrap_or(r.value.norm());
    // tail past the truncation point: exponential decay at the combined rate
    let rate = a.point().lambda().im.abs() + b.point().lambda().im.abs();
    let a_far = a.point().classify() == Component::R;
    let b_far = b.point().classify() == Component::R;
    let tail = if a_far && b_far {
        integrand(hi).norm() / rate
    } else if !a_far && !b_far {
        integrand(lo).norm() / rate
    } else {
        0.0
    };
    let propagated = 4.0 * (a.traj.error_estimate() + b.traj.error_estimate()) * l1;
    Ok((r.value, r.error, tail + propagated))
}

/// `{X(y, Q), X(y, P)}` from the classical bracket by quadrature.
pub fn classical_bracket_weyl<P: Field + ?Sized>(
    p: &P,
    y: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
) -> Result<BracketSample> {
    cross_bracket(p, y, y, q, pt, opts)
}

/// `{X(y, Q), X(x, P)}` with the two gradients based at different points.
pub fn cross_bracket<P: Field + ?Sized>(
    p: &P,
    y: f64,
    x: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
) -> Result<BracketSample> {
    let case = BracketCase::of(q, pt);
    if case == BracketCase::RL && y == x {
        return Ok(BracketSample {
            value: Complex64::new(0.0, 0.0),
            quadrature_error: 0.0,
            truncation_error: 0.0,
            case,
        });
    }
    let a = WeylGradient::new(p, y, q, &opts.weyl)?;
    let b = WeylGradient::new(p, x, pt, &opts.weyl)?;
    let (value, quadrature_error, truncation_error) = gradient_bracket(p, &a, &b, &opts.quad)?;
    Ok(BracketSample { value, quadrature_error, truncation_error, case })
}

/// Atiyah–Hitchin value: `±2 (X_Q - X_P)² / (λ_Q - λ_P)` on matching components, 0 otherwise.
pub fn ah_predicted(q: &CoverPoint, p: &CoverPoint, xq: Complex64, xp: Complex64) -> Result<Complex64> {
    let sign = match BracketCase::of(q, p) {
        BracketCase::RR => 2.0,
        BracketCase::LL => -2.0,
        BracketCase::RL => return Ok(Complex64::new(0.0, 0.0)),
    };
    if q.lambda() == p.lambda() {
        return Err(Error::CoincidentPoints);
    }
    Ok(sign * ahcore::ah_bracket(xq, xp, q.lambda(), p.lambda()))
}

/// `{X(y, Q), X(x, P)} - e^{-iλ(Q)(x - y)} {X(x, Q), X(x, P)}`, divided by the
/// modulus of the second term, with `Q = (iτ, +)`.
pub fn shift_asymptotics_residual<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    pt: &CoverPoint,
    tau: f64,
    opts: &BracketOptions,
) -> Result<Complex64> {
    let q = CoverPoint::plus(Complex64::new(0.0, tau))?;
    shift_residual_at(p, x, y, &q, pt, opts)
}

/// Same as [`shift_asymptotics_residual`] for an arbitrary shifted point `Q`.
pub fn shift_residual_at<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
) -> Result<Complex64> {
    shift_residual(p, x, y, q, pt, opts, |_| Ok((-I * q.lambda() * (x - y)).exp()))
}

/// `{X(y, Q), X(x, P)} - e₁(x, y, Q)² {X(x, Q), X(x, P)}`, normalized like
/// [`shift_residual_at`]. Holds for every `Q ∈ Γ_R` and `y ≤ x`.
pub fn exact_shift_residual<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
) -> Result<Complex64> {
    if q.classify() != Component::R {
        return Err(Error::InvalidArgument(format!("shifted point {q} is not on the right component")));
    }
    shift_residual(p, x, y, q, pt, opts, |g| {
        let e1 = g.trajectory().solution(x, y)?[0];
        Ok(e1 * e1)
    })
}

fn shift_residual<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
    factor: impl Fn(&WeylGradient) -> Result<Complex64>,
) -> Result<Complex64> {
    if x < y {
        return Err(Error::InvalidArgument(format!("shift needs x ≥ y, got x = {x}, y = {y}")));
    }
    if x == y || p.constant_value() == Some(Complex64::new(0.0, 0.0)) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // the shifted bracket carries a factor of order e^{-τ(x - y)}: keep the quadrature relative
    let relative = QuadOptions { abs_tol: f64::MIN_POSITIVE, ..opts.quad };
    let q_at_x = WeylGradient::new(p, x, q, &opts.weyl)?;
    let q_at_y = WeylGradient::reaching(p, y, q, &opts.weyl, q_at_x.trajectory().far_end())?;
    let p_at_x = WeylGradient::new(p, x, pt, &opts.weyl)?;
    let shifted = gradient_bracket(p, &q_at_y, &p_at_x, &relative)?.0;
    let same = gradient_bracket(p, &q_at_x, &p_at_x, &relative)?.0;
    let predicted = factor(&q_at_y)? * same;
    let diff = shifted - predicted;
    if predicted.norm() == 0.0 {
        return Ok(diff);
    }
    Ok(diff / predicted.norm())
}

/// `{X(εQ), X(εP)} - conj({X(Q), X(P)}) / conj(X_Q² X_P²)` at base point `y`,
/// with both brackets evaluated by quadrature.
pub fn reality_relation_residual<P: Field + ?Sized>(
    p: &P,
    y: f64,
    q: &CoverPoint,
    pt: &CoverPoint,
    opts: &BracketOptions,
) -> Result<Complex64> {
    let direct = classical_bracket_weyl(p, y, q, pt, opts)?;
    let mirrored = classical_bracket_weyl(p, y, &q.involute(), &pt.involute(), opts)?;
    let xq = weyl_value(p, y, q, &opts.weyl)?;
    let xp = weyl_value(p, y, pt, &opts.weyl)?;
    let (n1, d1) = xq.homogeneous();
    let (n2, d2) = xp.homogeneous();
    if n1.norm() == 0.0 || n2.norm() == 0.0 {
        if direct.value.norm() == 0.0 && mirrored.value.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::PoleEvaluation("Weyl value vanishes".into()));
    }
    // conj(B) / conj(X_Q² X_P²) with X = n/d
    let factor = (d1 * d1 * d2 * d2 / (n1 * n1 * n2 * n2)).conj();
    Ok(mirrored.value - direct.value.conj() * factor)
}

fn weyl_value<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<SphereValue> {
    Ok(WeylTrajectory::new(p, y, q, opts)?.value())
}

/// Smooth bump `φ(x) = N exp(-1/(1 - t²))`, `t = (x - center)/radius`, with unit integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    pub center: f64,
    pub radius: f64,
    norm: f64,
}

impl Mollifier {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("mollifier needs a positive radius, got {radius}")));
        }
        let unit = quad::integrate(
            |t| Complex64::new(Self::shape(t), 0.0),
            -1.0,
            1.0,
            &[0.0],
            &QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_intervals: 1000 },
        )?;
        Ok(Self { center, radius, norm: 1.0 / (unit.value.re * radius) })
    }

    fn shape(t: f64) -> f64 {
        if t.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t * t)).exp()
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.norm * Self::shape((x - self.center) / self.radius)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.radius;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t * t;
        self.eval(x) * (-2.0 * t / (s * s)) / self.radius
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

/// `ψ + ε φ`
pub struct Perturbed<'a, P: Field + ?Sized> {
    pub base: &'a P,
    pub eps: Complex64,
    pub bump: Mollifier,
}

impl<P: Field + ?Sized> Field for Perturbed<'_, P> {
    fn value(&self, x: f64) -> Complex64 {
        self.base.value(x) + self.eps * self.bump.eval(x)
    }

    fn derivative(&self, x: f64) -> Complex64 {
        self.base.derivative(x) + self.eps * self.bump.derivative(x)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        let (blo, bhi) = self.bump.support();
        if lo >= hi {
            (blo, bhi)
        } else {
            (lo.min(blo), hi.max(bhi))
        }
    }

    fn tail_bound(&self) -> f64 {
        self.base.tail_bound()
    }

    fn feature_scale(&self) -> f64 {
        self.base.feature_scale().min(self.bump.radius)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.base.breakpoints();
        let (lo, hi) = self.bump.support();
        b.extend([lo, self.bump.center, hi]);
        b
    }
}

fn perturbed_value<P: Field + ?Sized>(
    p: &P,
    z: f64,
    q: &CoverPoint,
    bump: Mollifier,
    eps: Complex64,
    opts: &WeylOptions,
) -> Result<Complex64> {
    let field = Perturbed { base: p, eps, bump };
    WeylTrajectory::new(&field, z, q, opts)?.value().finite().ok_or(Error::NotNormalizable)
}

/// Central differences of `X(z, Q)` along `ψ → ψ ± hφ` and `ψ → ψ ± ihφ`,
/// returned as `(∫ φ δX/δψ, ∫ φ δX/δψ̄)`.
pub fn fd_gradient_oracle<P: Field + ?Sized>(
    p: &P,
    z: f64,
    q: &CoverPoint,
    bump_center: f64,
    bump_width: f64,
    h: f64,
    opts: &WeylOptions,
) -> Result<(Complex64, Complex64)> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidArgument(format!("step h = {h} outside [1e-6, 1e-2]")));
    }
    let bump = Mollifier::new(bump_center, bump_width)?;
    let dir = |eps: Complex64| -> Result<Complex64> {
        let plus = perturbed_value(p, z, q, bump, eps, opts)?;
        let minus = perturbed_value(p, z, q, bump, -eps, opts)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let d_re = dir(Complex64::new(h, 0.0))?;
    let d_im = dir(Complex64::new(0.0, h))?;
    Ok((0.5 * (d_re - I * d_im), 0.5 * (d_re + I * d_im)))
}

/// Richardson combination of the oracle at `h` and `h/2`.
pub fn fd_gradient_richardson<P: Field + ?Sized>(
    p: &P,
    z: f64,
    q: &CoverPoint,
    bump_center: f64,
    bump_width: f64,
    h: f64,
    opts: &WeylOptions,
) -> Result<(Complex64, Complex64)> {
    let coarse = fd_gradient_oracle(p, z, q, bump_center, bump_width, h, opts)?;
    let fine = fd_gradient_oracle(p, z, q, bump_center, bump_width, 0.5 * h, opts)?;
    Ok(((4.0 * fine.0 - coarse.0) / 3.0, (4.0 * fine.1 - coarse.1) / 3.0))
}

/// `(∫ φ δX/δψ, ∫ φ δX/δψ̄)` from the closed-form gradient.
pub fn mollified_gradient<P: Field + ?Sized>(
    p: &P,
    z: f64,
    q: &CoverPoint,
    bump_center: f64,
    bump_width: f64,
    opts: &BracketOptions,
) -> Result<(Complex64, Complex64)> {
    let bump = Mollifier::new(bump_center, bump_width)?;
    let (lo, hi) = bump.support();
    let g = WeylGradient::reaching(p, z, q, &opts.weyl, if q.classify() == Component::R { hi } else { lo })?;
    let (slo, shi) = g.supported();
    let (a, b) = (lo.max(slo), hi.min(shi));
    if a >= b {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let mut breaks = p.breakpoints();
    breaks.extend([bump.center, z]);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let component = |k: usize| {
        let failure = &failure;
        let g = &g;
        move |y: f64| match g.at(y) {
            Ok(pair) => bump.eval(y) * if k == 0 { pair.0 } else { pair.1 },
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let d_psi = quad::integrate(component(0), a, b, &breaks, &opts.quad)?.value;
    let d_psibar = quad::integrate(component(1), a, b, &breaks, &opts.quad)?.value;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((d_psi, d_psibar))
}
