//! The Atiyah–Hitchin bracket on rational maps.
//!
//! A degree-`N` map with `X(∞) = 0` is stored through its canonical
//! coordinates: the simple poles `λ_k` and the numerator values `q(λ_k)`.
//! Internally the map is kept in partial-fraction form
//! `X(λ) = Σ c_k / (λ - λ_k)` with `c_k = -q(λ_k) / p'(λ_k)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum distance between distinct poles and between an evaluation point and a pole.
pub const POLE_SEPARATION_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    poles: Vec<Complex64>,
    values: Vec<Complex64>,
    /// `p'(λ_k) = Π_{j≠k} (λ_k - λ_j)`
    dp: Vec<Complex64>,
    residues: Vec<Complex64>,
}

impl RationalMap {
    pub fn new(poles: Vec<Complex64>, numerator_values: Vec<Complex64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidArgument("a rational map needs at least one pole".into()));
        }
        if poles.len() != numerator_values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} poles but {} numerator values",
                poles.len(),
                numerator_values.len()
            )));
        }
        for (i, a) in poles.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("pole {i} is not finite")));
            }
            for (j, b) in poles.iter().enumerate().skip(i + 1) {
                if (a - b).norm() <= POLE_SEPARATION_FLOOR {
                    return Err(Error::DegeneratePoles(i, j));
                }
            }
        }
        if let Some(k) = numerator_values.iter().position(|q| q.norm() == 0.0) {
            return Err(Error::ZeroResidueValue(k));
        }

        let dp: Vec<Complex64> = poles
            .iter()
            .enumerate()
            .map(|(k, lk)| {
                poles
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .fold(Complex64::new(1.0, 0.0), |acc, (_, lj)| acc * (lk - lj))
            })
            .collect();
        let residues = numerator_values.iter().zip(&dp).map(|(q, d)| -q / d).collect();
        Ok(Self { poles, values: numerator_values, dp, residues })
    }

    pub fn degree(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn numerator_values(&self) -> &[Complex64] {
        &self.values
    }

    /// Partial-fraction coefficients `c_k`.
    pub fn residues(&self) -> &[Complex64] {
        &self.residues
    }

    fn check_regular(&self, lambda: Complex64) -> Result<()> {
        match self.poles.iter().position(|p| (lambda - p).norm() <= POLE_SEPARATION_FLOOR) {
            Some(k) => Err(Error::PoleEvaluation(format!("λ = {lambda} coincides with pole {k}"))),
            None => Ok(()),
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        self.check_regular(lambda)?;
        Ok(self.poles.iter().zip(&self.residues).map(|(p, c)| c / (lambda - p)).sum())
    }

    /// Lagrange interpolant of degree `N - 1` through `(λ_k, q(λ_k))`.
    pub fn numerator(&self, lambda: Complex64) -> Complex64 {
        (0..self.degree())
            .map(|k| {
                let basis = (0..self.degree()).filter(|&j| j != k).fold(Complex64::new(1.0, 0.0), |acc, j| {
                    acc * (lambda - self.poles[j]) / (self.poles[k] - self.poles[j])
                });
                self.values[k] * basis
            })
            .sum()
    }

    /// Monic denominator `p(λ) = Π (λ - λ_k)`.
    pub fn denominator(&self, lambda: Complex64) -> Complex64 {
        self.poles.iter().map(|p| lambda - p).product()
    }

    /// Closed-form partial derivatives of `X(λ)` with respect to the canonical
    /// coordinates, returned as `(∂X/∂q_k, ∂X/∂λ_k)` for each `k`.
    pub fn coordinate_partials(&self, lambda: Complex64) -> Result<Vec<(Complex64, Complex64)>> {
        self.check_regular(lambda)?;
        let n = self.degree();
        let out = (0..n)
            .map(|k| {
                let lk = self.poles[k];
                let ck = self.residues[k];
                let d = lambda - lk;
                let d_q = -1.0 / (self.dp[k] * d);

                let s_k: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (lk - self.poles[j])).sum();
                let mut d_l = ck / (d * d) - ck * s_k / d;
                for j in (0..n).filter(|&j| j != k) {
                    let lj = self.poles[j];
                    d_l += self.residues[j] / ((lj - lk) * (lambda - lj));
                }
                (d_q, d_l)
            })
            .collect();
        Ok(out)
    }
}

/// The closed Atiyah–Hitchin formula `(x_λ - x_μ)² / (λ - μ)`.
///
/// Coincident points return exactly zero.
pub fn ah_bracket(x_at_lambda: Complex64, x_at_mu: Complex64, lambda: Complex64, mu: Complex64) -> Complex64 {
    if lambda == mu {
        return Complex64::new(0.0, 0.0);
    }
    let d = x_at_lambda - x_at_mu;
    d * d / (lambda - mu)
}

/// `{X(λ), X(μ)}` by the chain rule over the canonical brackets
/// `{q(λ_n), λ_k} = δ_nk q(λ_n)`.
pub fn canonical_bracket(map: &RationalMap, lambda: Complex64, mu: Complex64) -> Result<Complex64> {
    let dl = map.coordinate_partials(lambda)?;
    let dm = map.coordinate_partials(mu)?;
    Ok(map
        .numerator_values()
        .iter()
        .zip(dl.iter().zip(&dm))
        .map(|(q, ((lq, ll), (mq, ml)))| q * (lq * ml - ll * mq))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusCoeffs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusCoeffs {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(Error::InvalidArgument("Möbius coefficients have ad - bc = 0".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, x: Complex64) -> Result<Complex64> {
        let den = self.c * x + self.d;
        if den.norm() == 0.0 {
            return Err(Error::PoleEvaluation(format!("cx + d = 0 at x = {x}")));
        }
        Ok((self.a * x + self.b) / den)
    }

    /// `d/dx (ax + b)/(cx + d) = (ad - bc)/(cx + d)²`
    pub fn derivative(&self, x: Complex64) -> Result<Complex64> {
        let den = self.c * x + self.d;
        if den.norm() == 0.0 {
            return Err(Error::PoleEvaluation(format!("cx + d = 0 at x = {x}")));
        }
        Ok(self.determinant() / (den * den))
    }
}

pub fn mobius_apply(x: Complex64, m: &MobiusCoeffs) -> Result<Complex64> {
    m.apply(x)
}

/// Bracket of Möbius-transformed observables from linearity and the Leibniz
/// rule: `{f(x_λ), f(x_μ)} = f'(x_λ) f'(x_μ) {x_λ, x_μ}`.
pub fn mobius_bracket_by_leibniz(
    x_at_lambda: Complex64,
    x_at_mu: Complex64,
    lambda: Complex64,
    mu: Complex64,
    m: &MobiusCoeffs,
) -> Result<Complex64> {
    Ok(m.derivative(x_at_lambda)? * m.derivative(x_at_mu)? * ah_bracket(x_at_lambda, x_at_mu, lambda, mu))
}

/// Cyclic sum `{x1,{x2,x3}} + {x2,{x3,x1}} + {x3,{x1,x2}}`, with the outer
/// brackets expanded through the partial derivatives of the inner closed formula.
pub fn jacobi_cyclic_sum(
    x1: Complex64,
    x2: Complex64,
    x3: Complex64,
    lambda: Complex64,
    mu: Complex64,
    nu: Complex64,
) -> Result<Complex64> {
    if lambda == mu || mu == nu || nu == lambda {
        return Err(Error::CoincidentPoints);
    }
    let pts = [(x1, lambda), (x2, mu), (x3, nu)];
    let outer = |i: usize, j: usize, k: usize| {
        let (xi, li) = pts[i];
        let (xj, lj) = pts[j];
        let (xk, lk) = pts[k];
        // B = (xj - xk)² / (lj - lk)
        let db_dxj = 2.0 * (xj - xk) / (lj - lk);
        let db_dxk = -db_dxj;
        db_dxj * ah_bracket(xi, xj, li, lj) + db_dxk * ah_bracket(xi, xk, li, lk)
    };
    Ok(outer(0, 1, 2) + outer(1, 2, 0) + outer(2, 0, 1))
}

/// Largest magnitude among the individual terms of the cyclic sum, used to
/// scale the Jacobi residual.
pub fn jacobi_scale(
    x1: Complex64,
    x2: Complex64,
    x3: Complex64,
    lambda: Complex64,
    mu: Complex64,
    nu: Complex64,
) -> f64 {
    let pts = [(x1, lambda), (x2, mu), (x3, nu)];
    let mut scale: f64 = 0.0;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let (xi, li) = pts[i];
        let (xj, lj) = pts[j];
        let (xk, lk) = pts[k];
        let db = 2.0 * (xj - xk) / (lj - lk);
        scale = scale.max((db * ah_bracket(xi, xj, li, lj)).norm()).max((db * ah_bracket(xi, xk, li, lk)).norm());
    }
    scale
}

/// Circle contour used for the Cauchy compatibility check.
#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

/// Trapezoid rule for `(1/2πi) ∮ g(ζ)/(ζ - λ) dζ` on a circle with `nodes` points.
pub fn cauchy_trapezoid<G>(g: G, lambda: Complex64, contour: Circle, nodes: usize) -> Complex64
where
    G: Fn(Complex64) -> Complex64,
{
    let n = nodes.max(1);
    let sum: Complex64 = (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            let w = Complex64::from_polar(contour.radius, theta);
            let zeta = contour.center + w;
            g(zeta) * w / (zeta - lambda)
        })
        .sum();
    sum / n as f64
}

/// Reproduces `{X(λ), X(μ)}` from the values of `{X(ζ), X(μ)}` on a circle.
pub fn cauchy_bracket<F>(x: F, lambda: Complex64, mu: Complex64, contour: Circle, nodes: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let x_mu = x(mu);
    cauchy_trapezoid(|zeta| ah_bracket(x(zeta), x_mu, zeta, mu), lambda, contour, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    #[test]
    fn single_pole_map_is_reciprocal() {
        let m = RationalMap::new(vec![r(0.0)], vec![r(-1.0)]).unwrap();
        assert_eq!(m.eval(r(2.0)).unwrap(), r(0.5));
        assert!(m.eval(r(1e8)).unwrap().norm() <= 1e-7);
    }

    #[test]
    fn duplicate_poles_rejected() {
        let e = RationalMap::new(vec![r(0.0), r(0.0)], vec![r(1.0), r(1.0)]).unwrap_err();
        assert_eq!(e, Error::DegeneratePoles(0, 1));
        let e = RationalMap::new(vec![r(0.0), r(0.5e-8)], vec![r(1.0), r(1.0)]).unwrap_err();
        assert_eq!(e, Error::DegeneratePoles(0, 1));
    }

    #[test]
    fn zero_value_rejected() {
        let e = RationalMap::new(vec![r(0.0), r(1.0)], vec![r(1.0), r(0.0)]).unwrap_err();
        assert_eq!(e, Error::ZeroResidueValue(1));
    }

    #[test]
    fn two_pole_map_matches_polynomial_division() {
        // q ≡ 2 through (1, 2), (-1, 2); X = -2/(λ² - 1)
        let m = RationalMap::new(vec![r(1.0), r(-1.0)], vec![r(2.0), r(2.0)]).unwrap();
        assert_eq!(m.residues(), &[r(-1.0), r(1.0)]);
        for lam in [r(3.0), c(0.3, 0.7), c(-2.0, 5.0)] {
            let direct = -m.numerator(lam) / m.denominator(lam);
            let brute = -2.0 / (lam * lam - 1.0);
            assert!((direct - brute).norm() < 1e-15);
            assert!((m.eval(lam).unwrap() - brute).norm() < 1e-15);
        }
        assert!((m.eval(r(3.0)).unwrap() - r(-0.25)).norm() < 1e-16);
        assert!((m.numerator(c(7.0, -3.0)) - r(2.0)).norm() < 1e-13);
    }

    #[test]
    fn evaluation_at_pole_fails() {
        let m = RationalMap::new(vec![r(1.0), r(-1.0)], vec![r(2.0), r(2.0)]).unwrap();
        assert!(matches!(m.eval(r(1.0)), Err(Error::PoleEvaluation(_))));
    }

    #[test]
    fn closed_formula_examples() {
        let v = ah_bracket(r(0.5), r(1.0 / 3.0), r(2.0), r(3.0));
        assert!((v - r(-1.0 / 36.0)).norm() < 1e-17);
        assert_eq!(ah_bracket(c(1.0, 2.0), c(1.0, 2.0), r(2.0), r(5.0)), r(0.0));
        assert_eq!(ah_bracket(r(1.0), r(2.0), c(1.0, 1.0), c(1.0, 1.0)), r(0.0));
    }

    #[test]
    fn canonical_bracket_single_pole_hand_chain_rule() {
        // q²(λ-μ)/((λ-λ1)²(μ-λ1)²) with q = -1, λ1 = 0
        let m = RationalMap::new(vec![r(0.0)], vec![r(-1.0)]).unwrap();
        let v = canonical_bracket(&m, r(2.0), r(3.0)).unwrap();
        let hand = (2.0 - 3.0) / (4.0 * 9.0);
        assert!((v - r(hand)).norm() < 1e-16);
        assert!((v - r(-1.0 / 36.0)).norm() < 1e-16);
        let swapped = canonical_bracket(&m, r(3.0), r(2.0)).unwrap();
        assert_eq!(swapped, -v);
    }

    #[test]
    fn coordinate_partials_match_finite_differences() {
        let poles = vec![c(0.3, -0.2), c(-1.1, 0.4), c(0.9, 1.3)];
        let vals = vec![c(1.0, 0.5), c(-0.7, 0.2), c(0.4, -1.2)];
        let m = RationalMap::new(poles.clone(), vals.clone()).unwrap();
        let lam = c(2.1, -0.6);
        let parts = m.coordinate_partials(lam).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut pp = poles.clone();
            let mut pm = poles.clone();
            pp[k] += h;
            pm[k] -= h;
            let fd_l = (RationalMap::new(pp, vals.clone()).unwrap().eval(lam).unwrap()
                - RationalMap::new(pm, vals.clone()).unwrap().eval(lam).unwrap())
                / (2.0 * h);
            let mut vp = vals.clone();
            let mut vm = vals.clone();
            vp[k] += h;
            vm[k] -= h;
            let fd_q = (RationalMap::new(poles.clone(), vp).unwrap().eval(lam).unwrap()
                - RationalMap::new(poles.clone(), vm).unwrap().eval(lam).unwrap())
                / (2.0 * h);
            assert!((parts[k].0 - fd_q).norm() < 1e-8, "q partial {k}");
            assert!((parts[k].1 - fd_l).norm() < 1e-8, "λ partial {k}");
        }
    }

    #[test]
    fn mobius_examples() {
        let id = MobiusCoeffs::new(r(1.0), r(0.0), r(0.0), r(1.0)).unwrap();
        assert_eq!(mobius_apply(c(0.3, 0.4), &id).unwrap(), c(0.3, 0.4));
        let inv = MobiusCoeffs::new(r(0.0), r(1.0), r(1.0), r(0.0)).unwrap();
        assert_eq!(mobius_apply(r(0.5), &inv).unwrap(), r(2.0));
        assert!(matches!(mobius_apply(r(0.0), &inv), Err(Error::PoleEvaluation(_))));
        assert!(MobiusCoeffs::new(r(1.0), r(2.0), r(2.0), r(4.0)).is_err());
    }

    #[test]
    fn mobius_inversion_instance() {
        // X = 1/λ at (2, 3): 1/X takes the values (2, 3)
        let inv = MobiusCoeffs::new(r(0.0), r(1.0), r(1.0), r(0.0)).unwrap();
        let (xl, xm) = (r(0.5), r(1.0 / 3.0));
        let transformed = ah_bracket(inv.apply(xl).unwrap(), inv.apply(xm).unwrap(), r(2.0), r(3.0));
        assert!((transformed - r(-1.0)).norm() < 1e-15);
        let leibniz = ah_bracket(xl, xm, r(2.0), r(3.0)) / (xl * xl * xm * xm);
        assert!((leibniz - r(-1.0)).norm() < 1e-14);
        let via = mobius_bracket_by_leibniz(xl, xm, r(2.0), r(3.0), &inv).unwrap();
        assert!((via - r(-1.0)).norm() < 1e-14);
    }

    #[test]
    fn jacobi_examples() {
        let x = |l: f64| r(1.0 / l);
        let s = jacobi_cyclic_sum(x(2.0), x(3.0), x(4.0), r(2.0), r(3.0), r(4.0)).unwrap();
        assert!(s.norm() < 1e-12);
        let s = jacobi_cyclic_sum(r(1.5), r(1.5), r(1.5), r(1.0), r(2.0), r(3.0)).unwrap();
        assert_eq!(s, r(0.0));
        assert_eq!(jacobi_cyclic_sum(r(1.0), r(2.0), r(3.0), r(1.0), r(1.0), r(3.0)), Err(Error::CoincidentPoints));
    }

    #[test]
    fn cauchy_reproduces_bracket_inside_circle() {
        let m = RationalMap::new(vec![r(4.0), c(0.0, -5.0)], vec![r(1.0), c(2.0, 1.0)]).unwrap();
        let x = |z: Complex64| m.eval(z).unwrap();
        let lam = c(0.3, 0.2);
        let mu = c(-0.4, 0.5);
        let contour = Circle { center: r(0.0), radius: 1.5 };
        let via = cauchy_bracket(x, lam, mu, contour, 256);
        let direct = ah_bracket(x(lam), x(mu), lam, mu);
        assert!((via - direct).norm() < 1e-10);
    }
}
