//! Weyl functions `X(y, Q)` on the spectral cover and the Weyl solutions
//! `e(x, y, Q) = M⁽¹⁾(x, y, λ) + X(y, Q) M⁽²⁾(x, y, λ)`.

mod cover;

pub use cover::{classify, involute, Component, CoverPoint, Sheet, SphereValue, CUT_FLOOR};

use num_complex::Complex64;

use crate::dirac::{self, Field, LinearSystem, Matrix2};
use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem, Solution, State, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeylMethod {
    /// Riccati equation integrated from the far truncation point back to `y`.
    RiccatiBackward,
    /// Limit of the transition-matrix ratio with `f1 = f2` imposed at the far end.
    BoundaryRatioLimit,
    /// Closed form for a constant potential.
    ConstantOracle,
}

impl WeylMethod {
    pub fn name(&self) -> &'static str {
        match self {
            WeylMethod::RiccatiBackward => "riccati",
            WeylMethod::BoundaryRatioLimit => "boundary-ratio",
            WeylMethod::ConstantOracle => "constant-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylValue {
    pub value: SphereValue,
    pub method: WeylMethod,
    /// Distance from `y` to the truncation point.
    pub truncation_radius: f64,
    /// Error bound in the chart the value is stored in.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylOptions {
    pub tol: f64,
    pub max_radius: f64,
    pub method: WeylMethod,
    /// Also run the boundary-ratio method and fold the discrepancy into the error estimate.
    pub cross_check: bool,
}

impl Default for WeylOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_radius: 200.0, method: WeylMethod::RiccatiBackward, cross_check: true }
    }
}

impl WeylOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn riccati_only(tol: f64) -> Self {
        Self { tol, cross_check: false, ..Self::default() }
    }

    pub fn method(mut self, method: WeylMethod) -> Self {
        self.method = method;
        self
    }
}

/// Riccati equation for `X` augmented with the log-amplitude of the Weyl
/// solution. In the direct chart the state is `(X, log e1)`; in the reciprocal
/// chart it is `(1/X, log e2)`.
struct RiccatiSystem<'a, P: Field + ?Sized> {
    p: &'a P,
    lambda: Complex64,
    reciprocal: bool,
}

impl<P: Field + ?Sized> OdeSystem<2> for RiccatiSystem<'_, P> {
    fn rhs(&self, x: f64, u: &State<2>) -> State<2> {
        let psi = self.p.value(x);
        let w = u[0];
        let il = I * self.lambda;
        if self.reciprocal {
            [-il * w + psi.conj() - psi * w * w, 0.5 * il + psi * w]
        } else {
            [il * w + psi - psi.conj() * w * w, -0.5 * il + psi.conj() * w]
        }
    }

    fn after_step(&mut self, _x: f64, u: &mut State<2>) -> bool {
        if u[0].norm() > 1.0 {
            u[1] += u[0].ln();
            u[0] = 1.0 / u[0];
            self.reciprocal = !self.reciprocal;
            true
        } else {
            false
        }
    }

    fn mode(&self) -> u8 {
        self.reciprocal as u8
    }
}

/// Far truncation point for the Weyl solution of `component` based at `y`.
fn truncation_point<P: Field + ?Sized>(
    p: &P,
    y: f64,
    lambda: Complex64,
    component: Component,
    tol: f64,
    max_radius: f64,
) -> Result<f64> {
    let im = lambda.im.abs();
    let len = (1.0 / tol).ln().max(1.0) / im;
    let (lo, hi) = p.support();
    let far = match component {
        Component::R => {
            let b = y + len;
            if hi.is_finite() {
                b.max(hi)
            } else {
                b
            }
        }
        Component::L => {
            let a = y - len;
            if lo.is_finite() {
                a.min(lo)
            } else {
                a
            }
        }
    };
    if (far - y).abs() > max_radius {
        return Err(Error::TruncationFailure { radius: max_radius });
    }
    Ok(far)
}

fn truncation_bound<P: Field + ?Sized>(p: &P, lambda: Complex64, radius: f64) -> f64 {
    let im = lambda.im.abs();
    let (lo, hi) = p.support();
    if lo.is_finite() && hi.is_finite() {
        p.tail_bound() / im
    } else {
        (-im * radius).exp()
    }
}

/// Riccati solution on the whole truncated half-line, with dense output.
#[derive(Debug, Clone)]
pub struct WeylTrajectory {
    point: CoverPoint,
    far: f64,
    base: f64,
    pieces: Vec<Solution<2>>,
    value: SphereValue,
    integration_error: f64,
    truncation_error: f64,
}

impl WeylTrajectory {
    pub fn new<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<Self> {
        Self::reaching(p, y, q, opts, y)
    }

    /// Like [`WeylTrajectory::new`], with the far end pushed past `reach` if needed.
    pub fn reaching<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions, reach: f64) -> Result<Self> {
        if !y.is_finite() || !reach.is_finite() {
            return Err(Error::InvalidArgument("base point must be finite".into()));
        }
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
        }
        let lambda = q.lambda();
        let component = q.classify();
        let mut far = truncation_point(p, y, lambda, component, opts.tol, opts.max_radius)?;
        far = match component {
            Component::R => far.max(reach),
            Component::L => far.min(reach),
        };
        let mut sys = RiccatiSystem { p, lambda, reciprocal: q.sheet() == Sheet::Plus };
        let mut tolerance = Tolerance::new(dirac::local_tolerance(opts.tol));
        tolerance.h_max = dirac::step_cap(p);
        let mut u: State<2> = [Complex64::new(0.0, 0.0); 2];
        let mut pieces = Vec::new();
        let mut err = 0.0;
        for (a, b) in dirac::segments(p, far, y) {
            let sol = ode::integrate(&mut sys, a, b, u, &tolerance)?;
            u = sol.u_end;
            err += sol.abs_error_sum;
            pieces.push(sol);
        }
        if !(u[0].re.is_finite() && u[0].im.is_finite()) {
            return Err(Error::IntegrationFailure { x: y, reason: "Riccati solution is not finite".into() });
        }
        let value = SphereValue::from_chart(u[0], sys.reciprocal);
        Ok(Self {
            point: *q,
            far,
            base: y,
            pieces,
            value,
            integration_error: err + 4.0 * f64::EPSILON,
            truncation_error: truncation_bound(p, lambda, (far - y).abs()),
        })
    }

    pub fn point(&self) -> CoverPoint {
        self.point
    }

    /// The interval covered, ordered.
    pub fn domain(&self) -> (f64, f64) {
        (self.base.min(self.far), self.base.max(self.far))
    }

    pub fn far_end(&self) -> f64 {
        self.far
    }

    pub fn value(&self) -> SphereValue {
        self.value
    }

    pub fn error_estimate(&self) -> f64 {
        self.integration_error + self.truncation_error
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    fn state(&self, s: f64) -> Option<(State<2>, bool)> {
        self.pieces.iter().find_map(|sol| sol.eval(s)).map(|(u, m)| (u, m == 1))
    }

    /// `X(s, Q)` for `s` in the covered interval.
    pub fn value_at(&self, s: f64) -> Option<SphereValue> {
        if s == self.base {
            return Some(self.value);
        }
        self.state(s).map(|(u, recip)| SphereValue::from_chart(u[0], recip))
    }

    /// Weyl solution at `x` normalized so that its first component is 1 at `base`.
    pub fn solution(&self, x: f64, base: f64) -> Result<[Complex64; 2]> {
        let (ux, rx) = self.state(x).ok_or_else(|| outside(x, self.domain()))?;
        let (ub, rb) = self.state(base).ok_or_else(|| outside(base, self.domain()))?;
        let vx = if rx { [ux[0], Complex64::new(1.0, 0.0)] } else { [Complex64::new(1.0, 0.0), ux[0]] };
        let e1b = if rb { ub[0] } else { Complex64::new(1.0, 0.0) };
        if e1b.norm() == 0.0 {
            return Err(Error::NotNormalizable);
        }
        let scale = (ux[1] - ub[1]).exp() / e1b;
        if x == base {
            // exact normalization at the base point
            let w = if rx { 1.0 / ux[0] } else { ux[0] };
            return Ok([Complex64::new(1.0, 0.0), w]);
        }
        Ok([vx[0] * scale, vx[1] * scale])
    }
}

fn outside(x: f64, (lo, hi): (f64, f64)) -> Error {
    Error::InvalidArgument(format!("{x} lies outside the computed interval [{lo}, {hi}]"))
}

/// `X` from the boundary condition `f1 = f2` imposed at the far end, pushed
/// outwards chunk by chunk until the value settles.
pub fn boundary_ratio<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<WeylValue> {
    let lambda = q.lambda();
    let component = q.classify();
    let im = lambda.im.abs();
    let dir = if component == Component::R { 1.0 } else { -1.0 };
    let (lo, hi) = p.support();
    let edge = match component {
        Component::R if hi.is_finite() => y.max(hi),
        Component::L if lo.is_finite() => y.min(lo),
        _ => y,
    };
    if (edge - y).abs() > opts.max_radius {
        return Err(Error::TruncationFailure { radius: opts.max_radius });
    }
    let chunk = 2.0 / im;
    let mut sys = LinearSystem { p, lambda };
    let mut tolerance = Tolerance::new(dirac::local_tolerance(opts.tol));
    tolerance.h_max = dirac::step_cap(p);
    let mut m = Matrix2::IDENTITY;
    let mut rel_err = 0.0;
    let mut advance = |m: &mut Matrix2, from: f64, to: f64, rel_err: &mut f64| -> Result<()> {
        let mut u = dirac::to_state(m);
        for (a, b) in dirac::segments(p, from, to) {
            let sol = ode::integrate(&mut sys, a, b, u, &tolerance)?;
            u = sol.u_end;
            *rel_err += sol.rel_error_sum;
        }
        let next = dirac::from_state(&u);
        let n = next.max_norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::IntegrationFailure { x: to, reason: "transition matrix degenerated".into() });
        }
        *m = next.scale(Complex64::new(1.0 / n, 0.0));
        Ok(())
    };
    let ratio = |m: &Matrix2| SphereValue::from_ratio(m.m[0][0] - m.m[1][0], m.m[1][1] - m.m[0][1]);

    advance(&mut m, y, edge, &mut rel_err)?;
    let mut x = edge;
    let mut prev = ratio(&m);
    loop {
        let next = x + dir * chunk;
        if (next - y).abs() > opts.max_radius {
            return Err(Error::TruncationFailure { radius: opts.max_radius });
        }
        advance(&mut m, x, next, &mut rel_err)?;
        x = next;
        let val = ratio(&m);
        let change = val.chordal_distance(&prev);
        prev = val;
        if change <= opts.tol {
            return Ok(WeylValue {
                value: val,
                method: WeylMethod::BoundaryRatioLimit,
                truncation_radius: (x - y).abs(),
                error_estimate: change + rel_err + 4.0 * f64::EPSILON,
            });
        }
    }
}

/// Closed-form `X` for `ψ ≡ c`: the eigenvector of the constant coefficient
/// matrix whose eigenvalue decays on the relevant half-line.
pub fn constant_weyl(c: Complex64, q: &CoverPoint) -> SphereValue {
    let lambda = q.lambda();
    if c.norm() == 0.0 {
        return match q.sheet() {
            Sheet::Plus => SphereValue::INFINITY,
            Sheet::Minus => SphereValue::ZERO,
        };
    }
    let root = (c.norm_sqr() - lambda * lambda / 4.0).sqrt();
    let mu = match q.classify() {
        Component::R => -root,
        Component::L => root,
    };
    // X = c / (μ - iλ/2) = (μ + iλ/2) / c̄
    let (n1, d1) = (c, mu - 0.5 * I * lambda);
    let (n2, d2) = (mu + 0.5 * I * lambda, c.conj());
    if n1.norm().max(d1.norm()) >= n2.norm().max(d2.norm()) {
        SphereValue::from_ratio(n1, d1)
    } else {
        SphereValue::from_ratio(n2, d2)
    }
}

/// `X(y, Q)`.
pub fn weyl_function<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<WeylValue> {
    if !y.is_finite() {
        return Err(Error::InvalidArgument("base point must be finite".into()));
    }
    match opts.method {
        WeylMethod::ConstantOracle => {
            let c = p
                .constant_value()
                .ok_or_else(|| Error::InvalidArgument("constant oracle needs a constant potential".into()))?;
            Ok(WeylValue {
                value: constant_weyl(c, q),
                method: WeylMethod::ConstantOracle,
                truncation_radius: 0.0,
                error_estimate: 8.0 * f64::EPSILON,
            })
        }
        WeylMethod::BoundaryRatioLimit => boundary_ratio(p, y, q, opts),
        WeylMethod::RiccatiBackward => {
            let traj = WeylTrajectory::new(p, y, q, opts)?;
            let mut out = WeylValue {
                value: traj.value(),
                method: WeylMethod::RiccatiBackward,
                truncation_radius: (traj.far_end() - y).abs(),
                error_estimate: traj.error_estimate(),
            };
            if opts.cross_check {
                let other = boundary_ratio(p, y, q, opts)?;
                out.error_estimate = out.error_estimate.max(out.value.chordal_distance(&other.value));
            }
            Ok(out)
        }
    }
}

/// `e(x, y, Q)`, computed from the Riccati trajectory and its log-amplitude.
pub fn weyl_solution<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    q: &CoverPoint,
    opts: &WeylOptions,
) -> Result<[Complex64; 2]> {
    check_side(x, y, q)?;
    let traj = WeylTrajectory::reaching(p, y, q, opts, x)?;
    if traj.value().is_pole() {
        return Err(Error::NotNormalizable);
    }
    traj.solution(x, y)
}

/// `M⁽¹⁾(x, y, λ) + X(y, Q) M⁽²⁾(x, y, λ)` with the transition matrix integrated directly.
pub fn weyl_solution_via_transition<P: Field + ?Sized>(
    p: &P,
    x: f64,
    y: f64,
    q: &CoverPoint,
    opts: &WeylOptions,
) -> Result<[Complex64; 2]> {
    check_side(x, y, q)?;
    let xv = weyl_function(p, y, q, opts)?.value.finite().ok_or(Error::NotNormalizable)?;
    let m = dirac::transition_matrix(p, x, y, q.lambda(), opts.tol)?;
    Ok([m.m11() + xv * m.m12(), m.m21() + xv * m.m22()])
}

fn check_side(x: f64, y: f64, q: &CoverPoint) -> Result<()> {
    let ok = match q.classify() {
        Component::R => x >= y,
        Component::L => x <= y,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("x = {x} is on the growing side of y = {y} for {q}")))
    }
}

/// Half-line of the α-normalized Weyl function: `Plus` pairs with `Γ_R`, `Minus` with `Γ_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn component(self) -> Component {
        match self {
            Side::Plus => Component::R,
            Side::Minus => Component::L,
        }
    }
}

/// Inverts `X = (i + X_α)/(i - X_α) · e^{-2iα}`.
pub fn alpha_from_x(x: SphereValue, alpha: f64) -> Result<Complex64> {
    let (n, d) = x.homogeneous();
    let nw = n * Complex64::from_polar(1.0, 2.0 * alpha);
    let den = nw + d;
    if den.norm() <= 1e-15 * (nw.norm() + d.norm()) {
        return Err(Error::PoleEvaluation(format!("X = -e^(-2iα) at α = {alpha}")));
    }
    Ok(I * (nw - d) / den)
}

/// `X = (i + X_α)/(i - X_α) · e^{-2iα}`
pub fn x_from_alpha(xa: Complex64, alpha: f64) -> SphereValue {
    SphereValue::from_ratio((I + xa) * Complex64::from_polar(1.0, -2.0 * alpha), I - xa)
}

/// `X_α` from the components of any solution proportional to the Weyl solution at `y`.
pub fn alpha_from_solution(e: [Complex64; 2], alpha: f64) -> Result<Complex64> {
    let a = e[0] * Complex64::from_polar(1.0, -alpha);
    let b = e[1] * Complex64::from_polar(1.0, alpha);
    let den = I * (a + b);
    if den.norm() <= 1e-15 * (a.norm() + b.norm()) {
        return Err(Error::PoleEvaluation(format!("degenerate solution at α = {alpha}")));
    }
    Ok((a - b) / den)
}

/// `X_α` from `X_β`.
pub fn rotate_alpha(x_beta: Complex64, alpha: f64, beta: f64) -> Result<Complex64> {
    let (s, c) = (alpha - beta).sin_cos();
    let den = x_beta * s + c;
    if den.norm() == 0.0 {
        return Err(Error::PoleEvaluation(format!("rotation by {} hits the pole", alpha - beta)));
    }
    Ok((x_beta * c - s) / den)
}

pub fn weyl_alpha<P: Field + ?Sized>(
    p: &P,
    y: f64,
    lambda: Complex64,
    alpha: f64,
    side: Side,
    opts: &WeylOptions,
) -> Result<Complex64> {
    let q = CoverPoint::on_component(lambda, side.component())?;
    alpha_from_x(weyl_function(p, y, &q, opts)?.value, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymptoticTarget {
    /// `X(-i ψ̄)/λ - 1` at `(iτ, +)`
    PPlusOrderMinus1,
    /// `X - a₋₁λ - a₀` at `(iτ, +)`, `a₋₁ = i/ψ̄`, `a₀ = ψ̄'/ψ̄²`
    PPlusOrder0,
    /// `λX - iψ` at `(-iτ, -)`
    PMinusOrder1,
    /// `λ²X - iψλ - ψ'` at `(-iτ, -)`
    PMinusOrder2,
}

/// Residual of the truncated large-`λ` expansion of `X(y, Q)` along the imaginary axis.
pub fn asymptotic_residual<P: Field + ?Sized>(
    p: &P,
    y: f64,
    tau: f64,
    target: AsymptoticTarget,
    opts: &WeylOptions,
) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("τ must be positive, got {tau}")));
    }
    let psi = p.value(y);
    let dpsi = p.derivative(y);
    match target {
        AsymptoticTarget::PMinusOrder1 | AsymptoticTarget::PMinusOrder2 => {
            let lambda = Complex64::new(0.0, -tau);
            let q = CoverPoint::minus(lambda)?;
            let x = weyl_function(p, y, &q, opts)?.value.finite().ok_or(Error::NotNormalizable)?;
            Ok(match target {
                AsymptoticTarget::PMinusOrder1 => lambda * x - I * psi,
                _ => lambda * lambda * x - I * psi * lambda - dpsi,
            })
        }
        AsymptoticTarget::PPlusOrderMinus1 | AsymptoticTarget::PPlusOrder0 => {
            if psi.norm() == 0.0 {
                return Err(Error::DegenerateExpansionPoint);
            }
            let lambda = Complex64::new(0.0, tau);
            let q = CoverPoint::plus(lambda)?;
            let v = weyl_function(p, y, &q, opts)?.value;
            let pb = psi.conj();
            match target {
                AsymptoticTarget::PPlusOrderMinus1 => match v.reciprocal() {
                    Some(yv) => Ok(-I * pb / (lambda * yv) - 1.0),
                    None => Ok(Complex64::new(-1.0, 0.0)),
                },
                _ => {
                    let x = v.finite().ok_or_else(|| Error::PoleEvaluation("X is infinite".into()))?;
                    Ok(x - I / pb * lambda - dpsi.conj() / (pb * pb))
                }
            }
        }
    }
}
