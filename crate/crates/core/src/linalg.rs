//! Minimal 2×2 matrix arithmetic.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn from_rows(m: [[T; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn from_columns(a: [T; 2], b: [T; 2]) -> Self {
        Self {
            m: [[a[0], b[0]], [a[1], b[1]]],
        }
    }

    pub fn identity() -> Self {
        Self {
            m: [[T::one(), T::zero()], [T::zero(), T::one()]],
        }
    }

    pub fn zero() -> Self {
        Self {
            m: [[T::zero(); 2]; 2],
        }
    }

    pub fn column(&self, j: usize) -> [T; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse, or `None` when the determinant is zero relative to the
    /// entries.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        let scale = self.max_abs();
        if !d.is_finite() || scale == T::zero() || d.abs() <= T::epsilon() * scale * scale {
            return None;
        }
        let [[a, b], [cc, dd]] = self.m;
        Some(Self {
            m: [[dd / d, -b / d], [-cc / d, a / d]],
        })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut m = [[T::zero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        Self { m }
    }

    pub fn mul_vec(&self, v: [T; 2]) -> [T; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.m;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = m[i][j] + o.m[i][j];
            }
        }
        Self { m }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        Self { m }
    }

    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |a, x| a.max(x.abs()))
    }
}
