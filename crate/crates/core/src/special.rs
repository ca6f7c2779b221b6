//! Riccati–Bessel functions `s_l(ρ) = ρ j_l(ρ)` and `c_l(ρ) = −ρ y_l(ρ)`.
//!
//! The sign of `c_l` is chosen so that, for large ρ,
//!
//! ```text
//! s_l(ρ) → sin(ρ − lπ/2),    c_l(ρ) → cos(ρ − lπ/2)
//! ```
//!
//! and the Wronskian is `s_l c_l' − s_l' c_l = −1`.
//!
//! `c_l` is always generated by upward recursion, which is stable for the
//! irregular solution. `s_l` uses upward recursion only when `ρ > l`; below
//! that the regular solution is obtained from a normalised downward (Miller)
//! recursion.

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Values and first derivatives of `s_l` and `c_l` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiPair<T> {
    pub l: u32,
    pub rho: T,
    pub s: T,
    pub c: T,
    pub s_prime: T,
    pub c_prime: T,
}

impl<T: Real> RiccatiPair<T> {
    /// `s c' − s' c`; equals −1 analytically.
    pub fn wronskian(&self) -> T {
        self.s * self.c_prime - self.s_prime * self.c
    }
}

/// Evaluates `s_l(ρ)`, `c_l(ρ)` and their ρ-derivatives.
pub fn riccati<T: Real>(l: u32, rho: T) -> Result<RiccatiPair<T>> {
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(Error::Domain {
            what: "riccati argument",
            value: rho.as_f64(),
        });
    }
    let (sin, cos) = rho.sin_cos();
    if l == 0 {
        return Ok(RiccatiPair {
            l,
            rho,
            s: sin,
            c: cos,
            s_prime: cos,
            c_prime: -sin,
        });
    }

    let (c_prev, c_l) = irregular_upward(l, rho, sin, cos);
    if !c_l.is_finite() || !c_prev.is_finite() {
        return Err(Error::Overflow {
            what: "c_l",
            l,
            rho: rho.as_f64(),
        });
    }

    let (s_prev, s_l) = if rho > T::from_u32(l).unwrap() {
        regular_upward(l, rho, sin, cos)
    } else {
        regular_miller(l, rho, sin, cos)
    };

    let lf = T::from_u32(l).unwrap();
    Ok(RiccatiPair {
        l,
        rho,
        s: s_l,
        c: c_l,
        s_prime: s_prev - lf * s_l / rho,
        c_prime: c_prev - lf * c_l / rho,
    })
}

/// Returns `(c_{l-1}, c_l)` for `l ≥ 1`.
fn irregular_upward<T: Real>(l: u32, rho: T, sin: T, cos: T) -> (T, T) {
    let mut prev = cos;
    let mut cur = cos / rho + sin;
    for n in 1..l {
        let next = T::from_u32(2 * n + 1).unwrap() / rho * cur - prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            break;
        }
    }
    (prev, cur)
}

/// Returns `(s_{l-1}, s_l)` for `l ≥ 1` and `ρ > l`.
fn regular_upward<T: Real>(l: u32, rho: T, sin: T, cos: T) -> (T, T) {
    let mut prev = sin;
    let mut cur = sin / rho - cos;
    for n in 1..l {
        let next = T::from_u32(2 * n + 1).unwrap() / rho * cur - prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Returns `(s_{l-1}, s_l)` for `l ≥ 1` from a downward recursion normalised
/// against the closed form of `s_0` (or `s_1` near zeros of `sin ρ`).
fn regular_miller<T: Real>(l: u32, rho: T, sin: T, cos: T) -> (T, T) {
    let start = l + 30 + rho.ceil().to_u32().unwrap_or(0);
    let big = T::max_value().sqrt();

    let mut upper = T::zero(); // x_{n+1}
    let mut cur = T::min_positive_value().sqrt(); // x_n, arbitrary seed
    let mut keep_l = T::zero();
    let mut keep_lm1 = T::zero();
    let mut x1 = T::zero();

    let mut n = start;
    while n > 0 {
        // x_{n-1} = (2n+1)/ρ x_n − x_{n+1}
        let lower = T::from_u32(2 * n + 1).unwrap() / rho * cur - upper;
        upper = cur;
        cur = lower;
        n -= 1;
        if n == l {
            keep_l = cur;
        }
        if n + 1 == l {
            keep_lm1 = cur;
        }
        if n == 1 {
            x1 = cur;
        }
        if cur.abs() > big {
            let scale = T::one() / big;
            cur = cur * scale;
            upper = upper * scale;
            keep_l = keep_l * scale;
            keep_lm1 = keep_lm1 * scale;
            x1 = x1 * scale;
        }
    }
    // `cur` now holds the unnormalised x_0.
    let norm = if sin.abs() >= c(0.1) || rho < T::one() {
        sin / cur
    } else {
        (sin / rho - cos) / x1
    };
    (keep_lm1 * norm, keep_l * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn l0_closed_form_at_half_pi() {
        let p = riccati(0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(p.s, 1.0, epsilon = 1e-15);
        assert!(p.c.abs() < 1e-15);
    }

    #[test]
    fn l1_closed_form() {
        let p = riccati(1, 1.0_f64).unwrap();
        let expected = 1.0_f64.sin() - 1.0_f64.cos();
        assert_relative_eq!(p.s, expected, max_relative = 1e-14);
        assert_relative_eq!(p.s, 0.301168678939757, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(matches!(riccati(2, 0.0_f64), Err(Error::Domain { .. })));
        assert!(matches!(riccati(2, -1.0_f64), Err(Error::Domain { .. })));
        assert!(matches!(riccati(0, f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn reports_overflow_instead_of_saturating() {
        let err = riccati(200, 1e-3_f64).unwrap_err();
        assert!(matches!(err, Error::Overflow { l: 200, .. }));
    }

    #[test]
    fn single_precision_wronskian() {
        for &(l, rho) in &[(0u32, 0.5f32), (3, 2.0), (5, 10.0)] {
            let p = riccati(l, rho).unwrap();
            assert!((p.wronskian() + 1.0).abs() < 1e-4, "l={l} rho={rho}");
        }
    }

    #[test]
    fn miller_normalisation_near_zero_of_sine() {
        // ρ ≈ 2π with l > ρ exercises the s_1 normalisation branch.
        let rho = 2.0 * std::f64::consts::PI + 1e-9;
        let p = riccati(8, rho).unwrap();
        assert_relative_eq!(p.wronskian(), -1.0, max_relative = 1e-12);
    }
}
