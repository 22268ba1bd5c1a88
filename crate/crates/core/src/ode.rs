//! Dormand–Prince 5(4) integration of small complex systems with dense output.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub type State<const N: usize> = [Complex64; N];

/// A right-hand side with an optional discrete mode (chart) that may be
/// switched between accepted steps.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, x: f64, u: &State<N>) -> State<N>;

    /// Magnitude used to scale the local error test.
    fn error_scale(&self, _u: &State<N>) -> f64 {
        1.0
    }

    /// Called after each accepted step; may rewrite the state and switch mode.
    fn after_step(&mut self, _x: f64, _u: &mut State<N>) -> bool {
        false
    }

    fn mode(&self) -> u8 {
        0
    }
}

/// Fourth-order continuous extension of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub x0: f64,
    pub h: f64,
    pub mode: u8,
    r: [State<N>; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn lo(&self) -> f64 {
        self.x0.min(self.x1())
    }

    pub fn hi(&self) -> f64 {
        self.x0.max(self.x1())
    }

    pub fn eval(&self, x: f64) -> State<N> {
        let theta = if self.h == 0.0 { 0.0 } else { (x - self.x0) / self.h };
        let t1 = 1.0 - theta;
        let mut out = [Complex64::new(0.0, 0.0); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.r[0][i]
                + theta * (self.r[1][i] + t1 * (self.r[2][i] + theta * (self.r[3][i] + t1 * self.r[4][i])));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Tolerance {
    /// Local error tolerance relative to `error_scale`.
    pub tol: f64,
    pub max_steps: usize,
    /// Initial step size; `None` picks one from the right-hand side.
    pub h0: Option<f64>,
    /// Largest step allowed.
    pub h_max: f64,
}

impl Tolerance {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_steps: 2_000_000, h0: None, h_max: f64::INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub x_end: f64,
    pub u_end: State<N>,
    pub steps: Vec<DenseStep<N>>,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub abs_error_sum: f64,
    /// Same, with each local error divided by the error scale of its step.
    pub rel_error_sum: f64,
    pub rejected: usize,
}

fn max_norm<const N: usize>(u: &State<N>) -> f64 {
    u.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

fn axpy<const N: usize>(u: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *u;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += *c * k[i];
        }
        *o += h * acc;
    }
    out
}

struct Attempt<const N: usize> {
    u_new: State<N>,
    k7: State<N>,
    err: State<N>,
    dense: [State<N>; 5],
}

fn attempt<const N: usize, S: OdeSystem<N>>(sys: &S, x: f64, u: &State<N>, k1: &State<N>, h: f64) -> Attempt<N> {
    let k2 = sys.rhs(x + C2 * h, &axpy(u, h, &[(A21, k1)]));
    let k3 = sys.rhs(x + C3 * h, &axpy(u, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(x + C4 * h, &axpy(u, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(x + C5 * h, &axpy(u, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(x + h, &axpy(u, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let u_new = axpy(u, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = sys.rhs(x + h, &u_new);

    let zero = [Complex64::new(0.0, 0.0); N];
    let err = axpy(&zero, h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);

    let mut r1 = zero;
    let mut r2 = zero;
    let mut r3 = zero;
    for i in 0..N {
        let diff = u_new[i] - u[i];
        let bspl = h * k1[i] - diff;
        r1[i] = diff;
        r2[i] = bspl;
        r3[i] = diff - h * k7[i] - bspl;
    }
    let r4 = axpy(&zero, h, &[(D1, k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
    Attempt { u_new, k7, err, dense: [*u, r1, r2, r3, r4] }
}

/// Integrates `sys` from `x0` to `x1` (either direction), recording every
/// accepted step for dense evaluation.
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    x0: f64,
    x1: f64,
    u0: State<N>,
    opts: &Tolerance,
) -> Result<Solution<N>> {
    let span = x1 - x0;
    let mut sol =
        Solution { x_end: x0, u_end: u0, steps: Vec::new(), abs_error_sum: 0.0, rel_error_sum: 0.0, rejected: 0 };
    if span == 0.0 {
        return Ok(sol);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let dir = span.signum();
    let mut x = x0;
    let mut u = u0;
    let mut k1 = sys.rhs(x, &u);

    let mut h = match opts.h0 {
        Some(h) => h.abs(),
        None => {
            let d0 = max_norm(&u).max(1e-5);
            let d1 = max_norm(&k1).max(1e-5);
            0.01 * (d0 / d1) * opts.tol.powf(0.2)
        }
    }
    .min(span.abs())
    .min(opts.h_max);

    let h_floor = 1e-14 * (1.0 + x0.abs().max(x1.abs()));
    let mut accepted = 0usize;

    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 0.0 {
            break;
        }
        if accepted + sol.rejected > opts.max_steps {
            return Err(Error::IntegrationFailure { x, reason: format!("exceeded {} steps", opts.max_steps) });
        }
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h } * dir;

        let att = attempt(sys, x, &u, &k1, hs);
        let scale = sys.error_scale(&u).max(sys.error_scale(&att.u_new));
        let err_abs = max_norm(&att.err);
        let err_norm = err_abs / (opts.tol * scale);
        if !err_norm.is_finite() {
            h *= 0.1;
            sol.rejected += 1;
            if h < h_floor {
                return Err(Error::IntegrationFailure { x, reason: "non-finite step".into() });
            }
            continue;
        }

        let fac = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
        if err_norm <= 1.0 {
            sol.steps.push(DenseStep { x0: x, h: hs, mode: sys.mode(), r: att.dense });
            sol.abs_error_sum += err_abs;
            sol.rel_error_sum += err_abs / scale;
            x = if last { x1 } else { x + hs };
            u = att.u_new;
            k1 = att.k7;
            if sys.after_step(x, &mut u) {
                k1 = sys.rhs(x, &u);
            }
            accepted += 1;
            h = (h * fac).min(opts.h_max);
        } else {
            sol.rejected += 1;
            h *= fac.min(1.0);
            if h < h_floor {
                return Err(Error::IntegrationFailure {
                    x,
                    reason: format!("step size underflow (h = {h:e}, error ratio {err_norm:e})"),
                });
            }
        }
    }
    sol.x_end = x;
    sol.u_end = u;
    Ok(sol)
}

impl<const N: usize> Solution<N> {
    /// Index of the recorded step covering `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if self.steps.is_empty() {
            return None;
        }
        let forward = self.steps[0].h > 0.0;
        // steps are ordered along the direction of integration
        let idx = if forward {
            self.steps.partition_point(|s| s.x1() < x)
        } else {
            self.steps.partition_point(|s| s.x1() > x)
        };
        let i = idx.min(self.steps.len() - 1);
        let s = &self.steps[i];
        let slack = 1e-12 * (1.0 + x.abs());
        if x >= s.lo() - slack && x <= s.hi() + slack {
            Some(i)
        } else {
            None
        }
    }

    pub fn eval(&self, x: f64) -> Option<(State<N>, u8)> {
        self.locate(x).map(|i| (self.steps[i].eval(x), self.steps[i].mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation {
        omega: Complex64,
    }

    impl OdeSystem<1> for Rotation {
        fn rhs(&self, _x: f64, u: &State<1>) -> State<1> {
            [self.omega * u[0]]
        }
    }

    #[test]
    fn exponential_and_dense_output() {
        let omega = Complex64::new(-0.3, 2.0);
        let mut sys = Rotation { omega };
        let one = Complex64::new(1.0, 0.0);
        let sol = integrate(&mut sys, 0.0, 5.0, [one], &Tolerance::new(1e-12)).unwrap();
        assert_eq!(sol.x_end, 5.0);
        let exact = (omega * 5.0).exp();
        assert!((sol.u_end[0] - exact).norm() < 1e-10);
        for x in [0.0, 0.123, 1.7, 3.33333, 4.9999, 5.0] {
            let (v, _) = sol.eval(x).unwrap();
            assert!((v[0] - (omega * x).exp()).norm() < 1e-10, "dense at {x}");
        }
        assert!(sol.eval(5.5).is_none());
    }

    #[test]
    fn backward_direction() {
        let omega = Complex64::new(0.5, -1.0);
        let mut sys = Rotation { omega };
        let one = Complex64::new(1.0, 0.0);
        let sol = integrate(&mut sys, 2.0, -3.0, [one], &Tolerance::new(1e-12)).unwrap();
        assert!((sol.u_end[0] - (omega * -5.0).exp()).norm() < 1e-10);
        let (v, _) = sol.eval(0.25).unwrap();
        assert!((v[0] - (omega * -1.75).exp()).norm() < 1e-10);
    }

    #[test]
    fn zero_span_is_identity() {
        let mut sys = Rotation { omega: Complex64::new(1.0, 0.0) };
        let u0 = [Complex64::new(2.0, 3.0)];
        let sol = integrate(&mut sys, 1.0, 1.0, u0, &Tolerance::new(1e-9)).unwrap();
        assert_eq!(sol.u_end, u0);
        assert!(sol.steps.is_empty());
    }
}
