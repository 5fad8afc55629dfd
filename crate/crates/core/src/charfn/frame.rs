use num_complex::Complex64;
use serde::Serialize;

use super::matrix::Mat2;

/// Eigen-structure of the Fibonacci matrix `A = [[1,1],[1,0]]` and the
/// fixed matrices of the paired-block factorization.
///
/// `P = [[alpha, alpha_bar],[1, 1]]` diagonalizes `A`, `D = diag(alpha, alpha_bar)`,
/// `S = P^{-1} E21 P`, `U = D^{-1} S` and `V = D^{-2} S D`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenFrame {
    pub alpha: f64,
    pub alpha_bar: f64,
    pub sqrt5: f64,
    pub a: Mat2,
    pub p: Mat2,
    pub p_inv: Mat2,
    pub d: Mat2,
    pub s: Mat2,
    pub u: Mat2,
    pub v: Mat2,
    pub e11: Mat2,
    pub e21: Mat2,
}

/// One named check of the frame with its worst deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameCheck {
    pub name: &'static str,
    pub deviation: f64,
}

pub const CHECK_DIAGONALIZES: &str = "P_inv·A·P = D";

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Default for GoldenFrame {
    fn default() -> Self {
        Self::new()
    }
}

impl GoldenFrame {
    pub fn new() -> Self {
        let sqrt5 = 5f64.sqrt();
        let alpha = 0.5 * (1.0 + sqrt5);
        let alpha_bar = 0.5 * (1.0 - sqrt5);
        let a = Mat2::real(1.0, 1.0, 1.0, 0.0);
        let p = Mat2::real(alpha, alpha_bar, 1.0, 1.0);
        let p_inv = Mat2::real(1.0, -alpha_bar, -1.0, alpha).scale(re(1.0 / sqrt5));
        let d = Mat2::diag(re(alpha), re(alpha_bar));
        let s = Mat2::real(1.0, -alpha_bar * alpha_bar, alpha * alpha, -1.0).scale(re(1.0 / sqrt5));
        let d_inv = Mat2::diag(re(1.0 / alpha), re(1.0 / alpha_bar));
        let u = d_inv * s;
        let v = d_inv * d_inv * s * d;
        GoldenFrame {
            alpha,
            alpha_bar,
            sqrt5,
            a,
            p,
            p_inv,
            d,
            s,
            u,
            v,
            e11: Mat2::e11(),
            e21: Mat2::e21(),
        }
    }

    /// A frame whose `P^{-1}` is wrong, used as a negative control for the
    /// verification battery.
    #[doc(hidden)]
    pub fn corrupted() -> Self {
        let mut f = Self::new();
        f.p_inv.m[0][1] += re(1e-6);
        f
    }

    /// `P^{-1} M P`.
    pub fn conjugate(&self, m: &Mat2) -> Mat2 {
        self.p_inv * *m * self.p
    }

    /// `P M P^{-1}`.
    pub fn unconjugate(&self, m: &Mat2) -> Mat2 {
        self.p * *m * self.p_inv
    }

    /// `D^{-2} M`, i.e. rows scaled by `alpha^-2` and `alpha_bar^-2`.
    pub fn d_inv_sq_times(&self, m: &Mat2) -> Mat2 {
        m.scale_rows(
            re(1.0 / (self.alpha * self.alpha)),
            re(1.0 / (self.alpha_bar * self.alpha_bar)),
        )
    }

    /// `D^2`.
    pub fn d_sq(&self) -> Mat2 {
        self.d * self.d
    }

    /// Adapted norm `||P^{-1} M P||_2`.
    pub fn adapted_norm(&self, m: &Mat2) -> f64 {
        self.conjugate(m).spectral_norm()
    }

    /// Structural checks of the frame, worst deviation per identity.
    pub fn checks(&self) -> Vec<FrameCheck> {
        let (alpha, alpha_bar, sqrt5) = (self.alpha, self.alpha_bar, self.sqrt5);
        let mut out = vec![
            FrameCheck {
                name: CHECK_DIAGONALIZES,
                deviation: self.conjugate(&self.a).max_abs_diff(&self.d),
            },
            FrameCheck {
                name: "det P = sqrt5",
                deviation: (self.p.det() - re(sqrt5)).norm(),
            },
            FrameCheck {
                name: "P_inv·P = I",
                deviation: (self.p_inv * self.p).max_abs_diff(&Mat2::identity()),
            },
            FrameCheck {
                name: "alpha·alpha_bar = -1",
                deviation: (alpha * alpha_bar + 1.0).abs(),
            },
            FrameCheck {
                name: "alpha^2 = alpha + 1",
                deviation: (alpha * alpha - alpha - 1.0).abs(),
            },
            FrameCheck {
                name: "S = P_inv·E21·P",
                deviation: self.conjugate(&self.e21).max_abs_diff(&self.s),
            },
            FrameCheck {
                name: "(D·S)11 = alpha/sqrt5",
                deviation: ((self.d * self.s).at(1, 1) - re(alpha / sqrt5)).norm(),
            },
            FrameCheck {
                name: "(S·D)11 = alpha/sqrt5",
                deviation: ((self.s * self.d).at(1, 1) - re(alpha / sqrt5)).norm(),
            },
            FrameCheck {
                name: "U11 = 1/(alpha·sqrt5)",
                deviation: (self.u.at(1, 1) - re(1.0 / (alpha * sqrt5))).norm(),
            },
            FrameCheck {
                name: "V11 = 1/(alpha·sqrt5)",
                deviation: (self.v.at(1, 1) - re(1.0 / (alpha * sqrt5))).norm(),
            },
        ];
        out.push(FrameCheck {
            name: "||A||_A = alpha",
            deviation: (self.adapted_norm(&self.a) - alpha).abs(),
        });
        out.push(FrameCheck {
            name: "||A^2||_A = alpha^2",
            deviation: (self.adapted_norm(&(self.a * self.a)) - alpha * alpha).abs(),
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_identities_hold() {
        let f = GoldenFrame::new();
        for c in f.checks() {
            assert!(c.deviation < 1e-14, "{}: {}", c.name, c.deviation);
        }
        assert!((f.alpha * f.alpha_bar + 1.0).abs() < 1e-15);
    }

    #[test]
    fn adapted_norm_examples() {
        let f = GoldenFrame::new();
        assert!((f.adapted_norm(&f.a) - f.alpha).abs() < 1e-13);
        assert!((f.adapted_norm(&(f.a * f.a)) - f.alpha * f.alpha).abs() < 1e-13);
        assert_eq!(f.adapted_norm(&Mat2::zero()), 0.0);
    }

    #[test]
    fn u_and_v_from_their_definitions() {
        // U = D^-2 (D S), V = D^-2 (S D)
        let f = GoldenFrame::new();
        let u = f.d_inv_sq_times(&(f.d * f.s));
        let v = f.d_inv_sq_times(&(f.s * f.d));
        assert!(u.max_abs_diff(&f.u) < 1e-15);
        assert!(v.max_abs_diff(&f.v) < 1e-15);
    }

    #[test]
    fn corrupted_frame_fails_diagonalization() {
        let f = GoldenFrame::corrupted();
        let c = f.checks().into_iter().find(|c| c.name == CHECK_DIAGONALIZES).unwrap();
        assert!(c.deviation > 1e-8);
    }
}
