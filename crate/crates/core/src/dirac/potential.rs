use num_complex::Complex64;

use crate::error::{Error, Result};

/// A continuous complex field `ψ(x)` on the line, as seen by the integrators.
pub trait Field: Sync {
    fn value(&self, x: f64) -> Complex64;

    fn derivative(&self, x: f64) -> Complex64;

    /// Interval outside of which `|ψ| ≤ tail_bound()`. Endpoints may be infinite.
    fn support(&self) -> (f64, f64);

    fn tail_bound(&self) -> f64;

    /// Shortest length over which `ψ` changes appreciably; caps integrator steps.
    fn feature_scale(&self) -> f64;

    /// Points where the field or its low derivatives are not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        [lo, hi].into_iter().filter(|x| x.is_finite()).collect()
    }

    /// `Some(c)` when `ψ ≡ c` on the whole line.
    fn constant_value(&self) -> Option<Complex64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    /// second derivatives at the nodes (natural end conditions)
    curvature: Vec<Complex64>,
}

impl CubicSpline {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() < 4 {
            return Err(Error::InvalidPotential(format!("tabulated grid needs at least 4 points, got {}", grid.len())));
        }
        if grid.len() != values.len() {
            return Err(Error::InvalidPotential("grid and values differ in length".into()));
        }
        if grid.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidPotential("tabulated data must be finite".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPotential("tabulated grid must be strictly increasing".into()));
        }

        let n = grid.len();
        let mut curvature = vec![Complex64::new(0.0, 0.0); n];
        // Thomas algorithm on the interior equations
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![Complex64::new(0.0, 0.0); m];
        for i in 1..n - 1 {
            let h0 = grid[i] - grid[i - 1];
            let h1 = grid[i + 1] - grid[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
        }
        for i in 1..m {
            let lower = grid[i + 1] - grid[i];
            let w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            let prev = rhs[i - 1];
            rhs[i] -= w * prev;
        }
        for i in (0..m).rev() {
            let next = if i + 1 < m { curvature[i + 2] } else { Complex64::new(0.0, 0.0) };
            curvature[i + 1] = (rhs[i] - upper[i] * next) / diag[i];
        }
        Ok(Self { grid, values, curvature })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn segment(&self, x: f64) -> Option<usize> {
        let n = self.grid.len();
        if x < self.grid[0] || x > self.grid[n - 1] {
            return None;
        }
        Some(self.grid.partition_point(|g| *g <= x).clamp(1, n - 1) - 1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let Some(i) = self.segment(x) else {
            return Complex64::new(0.0, 0.0);
        };
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.curvature[i] + (b * b * b - b) * self.curvature[i + 1]) * (h * h / 6.0)
    }

    pub fn eval_derivative(&self, x: f64) -> Complex64 {
        let Some(i) = self.segment(x) else {
            return Complex64::new(0.0, 0.0);
        };
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        (self.values[i + 1] - self.values[i]) / h
            + (-(3.0 * a * a - 1.0) * self.curvature[i] + (3.0 * b * b - 1.0) * self.curvature[i + 1]) * (h / 6.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    Constant(Complex64),
    /// `A exp(-(x - c)² / (2 w²))`
    GaussianBump {
        amplitude: Complex64,
        center: f64,
        width: f64,
    },
    /// `A exp(1 - 1/(1 - t²))`, `t = (x - c)/r`, and zero for `|t| ≥ 1`
    CompactBump {
        amplitude: Complex64,
        center: f64,
        radius: f64,
    },
    Tabulated(CubicSpline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    support: (f64, f64),
    tail_bound: f64,
}

/// Default tail bound for kinds whose decay is not exact.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-15;

impl Potential {
    pub fn zero() -> Self {
        Self { kind: PotentialKind::Zero, support: (0.0, 0.0), tail_bound: 0.0 }
    }

    pub fn constant(c: Complex64) -> Self {
        if c.norm() == 0.0 {
            return Self::zero();
        }
        Self { kind: PotentialKind::Constant(c), support: (f64::NEG_INFINITY, f64::INFINITY), tail_bound: 0.0 }
    }

    pub fn gaussian(amplitude: Complex64, center: f64, width: f64) -> Result<Self> {
        Self::gaussian_with_tail(amplitude, center, width, DEFAULT_TAIL_BOUND)
    }

    pub fn gaussian_with_tail(amplitude: Complex64, center: f64, width: f64, tail_bound: f64) -> Result<Self> {
        if !(width > 0.0) || !center.is_finite() || !width.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "gaussian needs a finite center and positive width, got {center}, {width}"
            )));
        }
        if !(tail_bound > 0.0) {
            return Err(Error::InvalidPotential("gaussian tail bound must be positive".into()));
        }
        let a = amplitude.norm();
        let half = if a > tail_bound { width * (2.0 * (a / tail_bound).ln()).sqrt() } else { 0.0 };
        Ok(Self {
            kind: PotentialKind::GaussianBump { amplitude, center, width },
            support: (center - half, center + half),
            tail_bound,
        })
    }

    pub fn compact_bump(amplitude: Complex64, center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() || !radius.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "bump needs a finite center and positive radius, got {center}, {radius}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::CompactBump { amplitude, center, radius },
            support: (center - radius, center + radius),
            tail_bound: 0.0,
        })
    }

    /// Cubic spline through `(grid, values)`, extended by zero outside the grid.
    pub fn tabulated(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let spline = CubicSpline::new(grid, values)?;
        let support = (spline.grid[0], *spline.grid.last().expect("non-empty grid"));
        Ok(Self { kind: PotentialKind::Tabulated(spline), support, tail_bound: 0.0 })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Sup of `|ψ|`.
    pub fn amplitude(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Constant(c) => c.norm(),
            PotentialKind::GaussianBump { amplitude, .. } | PotentialKind::CompactBump { amplitude, .. } => {
                amplitude.norm()
            }
            PotentialKind::Tabulated(s) => {
                let n = s.grid.len();
                let mut m: f64 = 0.0;
                for i in 0..n - 1 {
                    for k in 0..=8 {
                        let x = s.grid[i] + (s.grid[i + 1] - s.grid[i]) * k as f64 / 8.0;
                        m = m.max(s.eval(x).norm());
                    }
                }
                m
            }
        }
    }

    /// Samples `|ψ|` outside the effective support and checks it against the tail bound.
    pub fn verify_tail(&self, samples: usize) -> bool {
        let (lo, hi) = self.support;
        if !lo.is_finite() || !hi.is_finite() {
            return true;
        }
        let span = (hi - lo).max(1.0);
        (0..samples).all(|k| {
            let d = span * (k as f64 + 0.5) / samples as f64 * 4.0;
            self.value(lo - d).norm() <= self.tail_bound && self.value(hi + d).norm() <= self.tail_bound
        })
    }
}

impl Field for Potential {
    fn value(&self, x: f64) -> Complex64 {
        match &self.kind {
            PotentialKind::Zero => Complex64::new(0.0, 0.0),
            PotentialKind::Constant(c) => *c,
            PotentialKind::GaussianBump { amplitude, center, width } => {
                let t = (x - center) / width;
                amplitude * (-0.5 * t * t).exp()
            }
            PotentialKind::CompactBump { amplitude, center, radius } => {
                let t = (x - center) / radius;
                if t.abs() >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            PotentialKind::Tabulated(s) => s.eval(x),
        }
    }

    fn derivative(&self, x: f64) -> Complex64 {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) => Complex64::new(0.0, 0.0),
            PotentialKind::GaussianBump { width, center, .. } => {
                let t = (x - center) / width;
                self.value(x) * (-t / width)
            }
            PotentialKind::CompactBump { center, radius, .. } => {
                let t = (x - center) / radius;
                if t.abs() >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let s = 1.0 - t * t;
                    self.value(x) * (-2.0 * t / (s * s) / radius)
                }
            }
            PotentialKind::Tabulated(s) => s.eval_derivative(x),
        }
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    fn feature_scale(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) => f64::INFINITY,
            PotentialKind::GaussianBump { width, .. } => *width,
            PotentialKind::CompactBump { radius, .. } => *radius,
            PotentialKind::Tabulated(s) => s.grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Tabulated(s) => s.grid.clone(),
            PotentialKind::CompactBump { center, .. } => vec![self.support.0, *center, self.support.1],
            _ => {
                let (lo, hi) = self.support;
                [lo, hi].into_iter().filter(|x| x.is_finite()).collect()
            }
        }
    }

    fn constant_value(&self) -> Option<Complex64> {
        match &self.kind {
            PotentialKind::Zero => Some(Complex64::new(0.0, 0.0)),
            PotentialKind::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

pub fn eval_potential<P: Field + ?Sized>(p: &P, x: f64) -> Complex64 {
    p.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_kinds() {
        assert_eq!(eval_potential(&Potential::zero(), 3.7), c(0.0, 0.0));
        assert_eq!(eval_potential(&Potential::constant(c(1.0, 0.0)), 5.0), c(1.0, 0.0));
        let g = Potential::gaussian(c(1.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(eval_potential(&g, 0.0), c(1.0, 0.0));
        assert!(g.verify_tail(200));
        let b = Potential::compact_bump(c(0.0, 2.0), 1.0, 0.5).unwrap();
        assert_eq!(b.value(1.0), c(0.0, 2.0));
        assert_eq!(b.value(1.5), c(0.0, 0.0));
        assert_eq!(b.value(0.2), c(0.0, 0.0));
        assert!(b.value(1.49).norm() > 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let pots = [
            Potential::gaussian(c(0.7, -0.4), 0.3, 0.8).unwrap(),
            Potential::compact_bump(c(1.0, 0.5), 0.0, 2.0).unwrap(),
            Potential::tabulated(
                vec![-2.0, -1.0, -0.2, 0.5, 1.0, 2.5],
                vec![c(0.0, 0.0), c(0.5, 0.1), c(1.0, -0.3), c(0.6, 0.2), c(0.2, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
        ];
        let h = 1e-6;
        for p in &pots {
            for x in [-1.3, -0.1, 0.4, 0.9, 1.7] {
                let fd = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
                assert!((fd - p.derivative(x)).norm() < 1e-7, "{:?} at {x}", p.kind());
            }
        }
    }

    #[test]
    fn spline_interpolates_and_vanishes_outside() {
        let grid = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let vals: Vec<Complex64> = grid.iter().map(|x| c(x * (4.0 - x), 0.5 * x)).collect();
        let p = Potential::tabulated(grid.clone(), vals.clone()).unwrap();
        for (x, v) in grid.iter().zip(&vals) {
            assert!((p.value(*x) - v).norm() < 1e-14);
        }
        assert_eq!(p.value(-0.01), c(0.0, 0.0));
        assert_eq!(p.value(4.01), c(0.0, 0.0));
        // linear data is reproduced exactly by the natural spline
        let lin = Potential::tabulated(grid.clone(), grid.iter().map(|x| c(2.0 * x, -x)).collect()).unwrap();
        assert!((lin.value(2.3) - c(4.6, -2.3)).norm() < 1e-14);
    }

    #[test]
    fn tabulated_validation() {
        assert!(Potential::tabulated(vec![0.0, 1.0, 2.0], vec![c(0.0, 0.0); 3]).is_err());
        assert!(Potential::tabulated(vec![0.0, 1.0, 1.0, 2.0], vec![c(0.0, 0.0); 4]).is_err());
        assert!(Potential::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![c(0.0, 0.0); 3]).is_err());
    }
}
