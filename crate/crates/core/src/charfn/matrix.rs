use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Complex 2x2 matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub const fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
            Complex64::new(d, 0.0),
        )
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    /// Single one at position (1,1).
    pub const fn e11() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 0.0)
    }

    /// Single one at position (2,1).
    pub const fn e21() -> Self {
        Mat2::real(0.0, 0.0, 1.0, 0.0)
    }

    /// Entry in 1-based (row, column) notation.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.m[row - 1][col - 1]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Mat2::new(
            self.m[0][0] * z,
            self.m[0][1] * z,
            self.m[1][0] * z,
            self.m[1][1] * z,
        )
    }

    /// `diag(a, d) * self`.
    pub fn scale_rows(&self, a: Complex64, d: Complex64) -> Self {
        Mat2::new(
            self.m[0][0] * a,
            self.m[0][1] * a,
            self.m[1][0] * d,
            self.m[1][1] * d,
        )
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.m.iter().flat_map(|row| row.iter().copied())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        // sigma_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4 |det M|^2)) / 2
        let f2: f64 = self.entries().map(|z| z.norm_sqr()).sum();
        let d = self.det().norm();
        let disc = (f2 * f2 - 4.0 * d * d).max(0.0);
        (0.5 * (f2 + disc.sqrt())).sqrt()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[inline]
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;

    fn mul(self, z: Complex64) -> Mat2 {
        self.scale(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_norm_matches_known_values() {
        assert_eq!(Mat2::zero().spectral_norm(), 0.0);
        assert!((Mat2::identity().spectral_norm() - 1.0).abs() < 1e-15);
        assert!((Mat2::diag(c(3.0, 0.0), c(0.0, -5.0)).spectral_norm() - 5.0).abs() < 1e-14);
        // rank one: outer product u v^T has norm |u| |v|
        let m = Mat2::real(1.0, 2.0, 2.0, 4.0);
        assert!((m.spectral_norm() - 5.0).abs() < 1e-14);
        assert!((Mat2::e21().spectral_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_against_power_iteration() {
        let m = Mat2::new(c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1), c(1.1, 1.9));
        // power iteration on M^* M
        let mh = Mat2::new(
            m.m[0][0].conj(),
            m.m[1][0].conj(),
            m.m[0][1].conj(),
            m.m[1][1].conj(),
        );
        let h = mh * m;
        let mut v = [c(1.0, 0.0), c(0.3, 0.2)];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w = h.apply(v);
            lambda = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            v = [w[0] / lambda, w[1] / lambda];
        }
        assert!((m.spectral_norm() - lambda.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn products_and_structure() {
        let a = Mat2::real(1.0, 1.0, 1.0, 0.0);
        let a2 = a * a;
        assert_eq!(a2, Mat2::real(2.0, 1.0, 1.0, 1.0));
        assert_eq!(Mat2::e21() * Mat2::e21(), Mat2::zero());
        assert_eq!(Mat2::e11() * Mat2::e11(), Mat2::e11());
        assert_eq!(a.det(), c(-1.0, 0.0));
        let d = Mat2::diag(c(2.0, 0.0), c(3.0, 0.0));
        assert_eq!(a.scale_rows(c(2.0, 0.0), c(3.0, 0.0)), d * a);
        assert_eq!(a.at(2, 1), c(1.0, 0.0));
    }
}
