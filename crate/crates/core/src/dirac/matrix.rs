use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m: [[m11, m12], [m21, m22]] }
    }

    pub const IDENTITY: Self = Self::new(ONE, ZERO, ZERO, ONE);
    pub const SIGMA1: Self = Self::new(ZERO, ONE, ONE, ZERO);
    pub const SIGMA2: Self = Self::new(ZERO, Complex64::new(0.0, -1.0), I, ZERO);
    pub const SIGMA3: Self = Self::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));
    /// Antisymmetric form with `fᵀ J g = f1 g2 - f2 g1`.
    pub const J: Self = Self::new(ZERO, ONE, Complex64::new(-1.0, 0.0), ZERO);

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.m[0][0].conj(), self.m[0][1].conj(), self.m[1][0].conj(), self.m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    pub fn column(&self, j: usize) -> [Complex64; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, o: Matrix2) -> Matrix2 {
        let a = &self.m;
        let b = &o.m;
        Matrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;

    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;

    fn sub(self, o: Matrix2) -> Matrix2 {
        self + o.scale(Complex64::new(-1.0, 0.0))
    }
}

/// `fᵀ J g`
pub fn skew_pairing(f: [Complex64; 2], g: [Complex64; 2]) -> Complex64 {
    f[0] * g[1] - f[1] * g[0]
}
