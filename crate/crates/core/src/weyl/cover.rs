use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points closer than this to the real axis are rejected.
pub const CUT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn flip(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sheet::Plus => '+',
            Sheet::Minus => '-',
        }
    }
}

/// Which half-line the Weyl solution is square integrable on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    R,
    L,
}

/// A point `(λ, sheet)` of the two-sheeted spectral cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverPoint {
    lambda: Complex64,
    sheet: Sheet,
}

impl CoverPoint {
    pub fn new(lambda: Complex64, sheet: Sheet) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("spectral parameter must be finite, got {lambda}")));
        }
        if lambda.im.abs() < CUT_FLOOR {
            return Err(Error::TooCloseToCut { im: lambda.im, floor: CUT_FLOOR });
        }
        Ok(Self { lambda, sheet })
    }

    pub fn plus(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, Sheet::Plus)
    }

    pub fn minus(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, Sheet::Minus)
    }

    /// The point on `component` lying over `lambda`.
    pub fn on_component(lambda: Complex64, component: Component) -> Result<Self> {
        let upper = lambda.im > 0.0;
        let sheet = match (component, upper) {
            (Component::R, true) | (Component::L, false) => Sheet::Plus,
            _ => Sheet::Minus,
        };
        Self::new(lambda, sheet)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn sheet(&self) -> Sheet {
        self.sheet
    }

    pub fn classify(&self) -> Component {
        classify(self)
    }

    pub fn involute(&self) -> Self {
        involute(self)
    }
}

impl fmt::Display for CoverPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lambda, self.sheet.symbol())
    }
}

pub fn classify(q: &CoverPoint) -> Component {
    match (q.sheet, q.lambda.im > 0.0) {
        (Sheet::Plus, true) | (Sheet::Minus, false) => Component::R,
        _ => Component::L,
    }
}

/// `(λ, ±) → (λ̄, ∓)`
pub fn involute(q: &CoverPoint) -> CoverPoint {
    CoverPoint { lambda: q.lambda.conj(), sheet: q.sheet.flip() }
}

/// A point of the Riemann sphere, stored in whichever chart keeps the
/// stored number inside the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereValue {
    /// `X` itself, `|X| ≤ 1`.
    Finite(Complex64),
    /// `1/X`, with `0` standing for `X = ∞`.
    Reciprocal(Complex64),
}

impl SphereValue {
    pub const INFINITY: Self = SphereValue::Reciprocal(Complex64::new(0.0, 0.0));
    pub const ZERO: Self = SphereValue::Finite(Complex64::new(0.0, 0.0));

    pub fn from_value(x: Complex64) -> Self {
        if x.norm() <= 1.0 {
            SphereValue::Finite(x)
        } else {
            SphereValue::Reciprocal(1.0 / x)
        }
    }

    /// The point `num / den`; `(0, 0)` maps to zero.
    pub fn from_ratio(num: Complex64, den: Complex64) -> Self {
        if num.norm() <= den.norm() {
            SphereValue::Finite(if den.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { num / den })
        } else {
            SphereValue::Reciprocal(den / num)
        }
    }

    /// Builds a value from a chart coordinate, renormalizing the chart.
    pub fn from_chart(w: Complex64, reciprocal: bool) -> Self {
        if reciprocal {
            Self::from_ratio(Complex64::new(1.0, 0.0), w)
        } else {
            Self::from_ratio(w, Complex64::new(1.0, 0.0))
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, SphereValue::Reciprocal(w) if w.norm() == 0.0)
    }

    /// `X`, or `None` at the pole.
    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SphereValue::Finite(x) => Some(x),
            SphereValue::Reciprocal(w) if w.norm() == 0.0 => None,
            SphereValue::Reciprocal(w) => Some(1.0 / w),
        }
    }

    /// `1/X`, or `None` when `X = 0`.
    pub fn reciprocal(&self) -> Option<Complex64> {
        match *self {
            SphereValue::Reciprocal(w) => Some(w),
            SphereValue::Finite(x) if x.norm() == 0.0 => None,
            SphereValue::Finite(x) => Some(1.0 / x),
        }
    }

    /// `|X|`, infinite at the pole.
    pub fn modulus(&self) -> f64 {
        match *self {
            SphereValue::Finite(x) => x.norm(),
            SphereValue::Reciprocal(w) => 1.0 / w.norm(),
        }
    }

    /// Homogeneous coordinates `(num, den)` with `max(|num|, |den|) = 1`.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            SphereValue::Finite(x) => (x, one),
            SphereValue::Reciprocal(w) => (one, w),
        }
    }

    /// `1/conj(X)`
    pub fn inverse_conj(&self) -> Self {
        match *self {
            SphereValue::Finite(x) => SphereValue::Reciprocal(x.conj()),
            SphereValue::Reciprocal(w) => SphereValue::Finite(w.conj()),
        }
    }

    /// Chordal distance on the Riemann sphere (at most 1).
    pub fn chordal_distance(&self, other: &SphereValue) -> f64 {
        let (a, b) = self.homogeneous();
        let (c, d) = other.homogeneous();
        let cross = (a * d - b * c).norm();
        cross / ((a.norm_sqr() + b.norm_sqr()).sqrt() * (c.norm_sqr() + d.norm_sqr()).sqrt())
    }
}

impl fmt::Display for SphereValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(x) => write!(f, "{x}"),
            None => write!(f, "∞"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classification_examples() {
        assert_eq!(CoverPoint::plus(c(0.0, 1.0)).unwrap().classify(), Component::R);
        assert_eq!(CoverPoint::minus(c(0.0, 1.0)).unwrap().classify(), Component::L);
        assert_eq!(CoverPoint::minus(c(0.0, -2.0)).unwrap().classify(), Component::R);
        assert_eq!(CoverPoint::plus(c(0.3, -2.0)).unwrap().classify(), Component::L);
    }

    #[test]
    fn involution_example() {
        let q = CoverPoint::plus(c(0.0, 1.0)).unwrap();
        assert_eq!(q.involute(), CoverPoint::minus(c(0.0, -1.0)).unwrap());
        assert_eq!(q.involute().involute(), q);
    }

    #[test]
    fn cut_floor() {
        assert!(matches!(CoverPoint::plus(c(1.0, 1e-7)), Err(Error::TooCloseToCut { .. })));
        assert!(CoverPoint::plus(c(1.0, -1e-6)).is_ok());
    }

    #[test]
    fn on_component_roundtrip() {
        for lam in [c(0.5, 1.0), c(-1.0, -0.3)] {
            for comp in [Component::R, Component::L] {
                assert_eq!(CoverPoint::on_component(lam, comp).unwrap().classify(), comp);
            }
        }
    }

    #[test]
    fn sphere_charts() {
        let big = SphereValue::from_value(c(3.0, 4.0));
        assert!(matches!(big, SphereValue::Reciprocal(_)));
        assert!((big.finite().unwrap() - c(3.0, 4.0)).norm() < 1e-15);
        assert!(SphereValue::INFINITY.is_pole());
        assert_eq!(SphereValue::INFINITY.finite(), None);
        assert_eq!(SphereValue::ZERO.reciprocal(), None);
        assert_eq!(SphereValue::INFINITY.chordal_distance(&SphereValue::ZERO), 1.0);
        assert_eq!(big.chordal_distance(&big), 0.0);
        let x = c(0.2, -0.7);
        let y = SphereValue::from_value(x).inverse_conj();
        assert!((y.finite().unwrap() * x.conj() - 1.0).norm() < 1e-15);
    }
}
