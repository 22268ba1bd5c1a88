//! Globally adaptive Gauss–Kronrod (10/21) quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    // floor the estimate at rounding level
    let error = error.max(50.0 * f64::EPSILON * value.norm());
    Piece { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, splitting first at the supplied breakpoints.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > lo && c < hi).collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut evaluations = 0usize;
    let mut pieces: Vec<Piece> = edges
        .windows(2)
        .map(|w| {
            evaluations += 21;
            gk21(&mut f, w[0], w[1])
        })
        .collect();

    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult { value: sign * total, error: err, evaluations });
        }
        if pieces.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "{} subintervals, error {err:e} above target {target:e}",
                pieces.len()
            )));
        }
        let (worst, _) =
            pieces.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure(format!("interval [{}, {}] cannot be bisected", p.a, p.b)));
        }
        evaluations += 42;
        pieces.push(gk21(&mut f, p.a, mid));
        pieces.push(gk21(&mut f, mid, p.b));
        // keep reduction order deterministic
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| Complex64::new(x * x * x, -x), 0.0, 2.0, &[], &QuadOptions::default()).unwrap();
        assert!((r.value - Complex64::new(4.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn oscillatory_exponential() {
        let k = Complex64::new(-1.5, 7.0);
        let r = integrate(|x| (k * x).exp(), 0.0, 10.0, &[], &QuadOptions::default()).unwrap();
        let exact = ((k * 10.0).exp() - 1.0) / k;
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| Complex64::new(x.sin(), x.cos());
        let a = integrate(f, 0.0, 3.0, &[1.0], &QuadOptions::default()).unwrap();
        let b = integrate(f, 3.0, 0.0, &[1.0], &QuadOptions::default()).unwrap();
        assert_eq!(a.value, -b.value);
    }

    #[test]
    fn kink_with_breakpoint() {
        let r = integrate(|x| Complex64::new(x.abs(), 0.0), -1.0, 2.0, &[0.0], &QuadOptions::default()).unwrap();
        assert!((r.value.re - 2.5).abs() < 1e-14);
    }
}
