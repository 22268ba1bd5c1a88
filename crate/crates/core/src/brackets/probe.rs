use num_complex::Complex64;

use super::{ah_predicted, BracketOptions};
use crate::dirac::{self, skew_pairing, Field};
use crate::error::{Error, Result};
use crate::quad;
use crate::weyl::{CoverPoint, SphereValue, WeylOptions, WeylTrajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gaussian of the given width cut at eight widths, shifted and rescaled so
/// that it is continuous and takes the value `peak` at its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    pub peak: Complex64,
}

impl TestFunction {
    const CUT: f64 = 8.0;

    pub fn new(center: f64, width: f64, peak: Complex64) -> Result<Self> {
        if !(width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("test function needs a positive width, got {width}")));
        }
        Ok(Self { center, width, peak })
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let t = (y - self.center) / self.width;
        if t.abs() >= Self::CUT {
            return Complex64::new(0.0, 0.0);
        }
        let floor = (-0.5 * Self::CUT * Self::CUT).exp();
        self.peak * (((-0.5 * t * t).exp() - floor) / (1.0 - floor))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - Self::CUT * self.width, self.center + Self::CUT * self.width)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { peak: self.peak * s, ..*self }
    }
}

fn weyl_sphere<P: Field + ?Sized>(p: &P, y: f64, q: &CoverPoint, opts: &WeylOptions) -> Result<SphereValue> {
    Ok(WeylTrajectory::new(p, y, q, opts)?.value())
}

/// `(-iλ X(y, (-iτ, -)), iλ / X(y, (iτ, +)))`, approximating `(ψ(y), ψ̄(y))`.
pub fn recover_fields<P: Field + ?Sized>(
    p: &P,
    y: f64,
    tau: f64,
    opts: &WeylOptions,
) -> Result<(Complex64, Complex64)> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("τ must be positive, got {tau}")));
    }
    let lm = Complex64::new(0.0, -tau);
    let lp = Complex64::new(0.0, tau);
    let xm = weyl_sphere(p, y, &CoverPoint::minus(lm)?, opts)?.finite().ok_or(Error::NotNormalizable)?;
    let yp = weyl_sphere(p, y, &CoverPoint::plus(lp)?, opts)?
        .reciprocal()
        .ok_or_else(|| Error::PoleEvaluation("X vanishes at the (iτ, +) probe".into()))?;
    Ok((-I * lm * xm, I * lp * yp))
}

/// `-(λ_Q λ_P / X_Q²) · {X_Q, X_P}_AH · ∫ f(y) e^{∓iλ_P (z - y)} dy` over one side of `z`.
fn half_probe<P: Field + ?Sized>(
    p: &P,
    z: f64,
    f: &TestFunction,
    q: CoverPoint,
    pt: CoverPoint,
    left: bool,
    opts: &BracketOptions,
) -> Result<Complex64> {
    let tau = q.lambda().im.abs();
    let xq = weyl_sphere(p, z, &q, &opts.weyl)?;
    let xp = weyl_sphere(p, z, &pt, &opts.weyl)?.finite().ok_or(Error::NotNormalizable)?;
    let yq = xq.reciprocal().ok_or_else(|| Error::PoleEvaluation("X vanishes at the probe point".into()))?;
    // -(λ_Q λ_P / X_Q²) (±2)(X_Q - X_P)²/(λ_Q - λ_P) = ∓2 λ_Q λ_P (1 - X_P/X_Q)² / (λ_Q - λ_P)
    let unit = ah_predicted(&q, &pt, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))?;
    let ratio = 1.0 - xp * yq;
    let prefactor = -q.lambda() * pt.lambda() * unit * ratio * ratio;

    let (flo, fhi) = f.support();
    let (a, b) = if left { (flo, fhi.min(z)) } else { (flo.max(z), fhi) };
    if a >= b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kernel = |y: f64| f.eval(y) * (-tau * (z - y).abs()).exp();
    let integral = quad::integrate(kernel, a, b, &[f.center, z], &opts.quad)?.value;
    Ok(prefactor * integral)
}

/// Finite-`τ` approximant of `∫_{y ≤ z} f(y) {ψ̄(z), ψ(y)} dy`, expected to approach `i f(z)`.
pub fn delta_limit_probe<P: Field + ?Sized>(
    p: &P,
    z: f64,
    f: &TestFunction,
    tau: f64,
    opts: &BracketOptions,
) -> Result<Complex64> {
    let q = CoverPoint::plus(Complex64::new(0.0, tau))?;
    half_probe(p, z, f, q, q.involute(), true, opts)
}

/// The `y ≥ z` half, built from the left component with `Q = (-iτ, +)` and `P = εQ`.
pub fn delta_limit_probe_mirrored<P: Field + ?Sized>(
    p: &P,
    z: f64,
    f: &TestFunction,
    tau: f64,
    opts: &BracketOptions,
) -> Result<Complex64> {
    let q = CoverPoint::plus(Complex64::new(0.0, -tau))?;
    half_probe(p, z, f, q, q.involute(), false, opts)
}

/// Both sides of
/// `f₁♥ f₁♠ g₂♠ g₂♥ - f₂♠ f₂♥ g₁♥ g₁♠ = d/dx[(f♥ᵀ J g♥)(f♠ᵀ J g♠)] / (i(μ - λ))`
/// integrated over `[x0, x1]`, for solutions at `λ` (f) and `μ` (g) with the
/// given values at `x0`. Returns `(∫ left side, boundary difference)`.
pub fn skew_product_identity<P: Field + ?Sized>(
    p: &P,
    x0: f64,
    x1: f64,
    lambda: Complex64,
    mu: Complex64,
    f0: [[Complex64; 2]; 2],
    g0: [[Complex64; 2]; 2],
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if lambda == mu {
        return Err(Error::CoincidentPoints);
    }
    let mf = dirac::transition_path(p, x1, x0, lambda, tol)?;
    let mg = dirac::transition_path(p, x1, x0, mu, tol)?;
    let at = |x: f64| -> Option<[[Complex64; 2]; 4]> {
        let a = mf.at(x)?;
        let b = mg.at(x)?;
        Some([a.apply(f0[0]), a.apply(f0[1]), b.apply(g0[0]), b.apply(g0[1])])
    };
    let integrand = |x: f64| match at(x) {
        Some([fh, fs, gh, gs]) => fh[0] * fs[0] * gs[1] * gh[1] - fs[1] * fh[1] * gh[0] * gs[0],
        None => Complex64::new(f64::NAN, f64::NAN),
    };
    let lhs = quad::integrate(integrand, x0, x1, &p.breakpoints(), &super::BracketOptions::default().quad)?.value;
    if !(lhs.re.is_finite() && lhs.im.is_finite()) {
        return Err(Error::QuadratureFailure("integrand left the computed interval".into()));
    }
    let w = |x: f64| -> Result<Complex64> {
        let [fh, fs, gh, gs] = at(x).ok_or_else(|| Error::InvalidArgument(format!("{x} outside the path")))?;
        Ok(skew_pairing(fh, gh) * skew_pairing(fs, gs))
    };
    let rhs = (w(x1)? - w(x0)?) / (I * (mu - lambda));
    Ok((lhs, rhs))
}
