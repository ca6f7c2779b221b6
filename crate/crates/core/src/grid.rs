//! Piecewise-uniform radial mesh.
//!
//! Steps are `h` up to 1.2, `2h` up to 4.8, `4h` up to 40.8 and optionally
//! `8h` beyond. Every point is stored as an integer number of base steps so
//! region boundaries are hit exactly.

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Default inner cutoff for inward integrations.
pub const DEFAULT_R_MIN: f64 = 1e-4;

/// Standard region ends and step multiples.
pub const STANDARD_REGIONS: [(f64, u64); 4] = [(1.2, 1), (4.8, 2), (40.8, 4), (184.8, 8)];

/// Radius at which exchange integrals are truncated and `D(r)` is read off.
pub const R_CUT: f64 = 40.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub end: T,
    pub multiple: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    h: T,
    r_min: T,
    regions: Vec<Region<T>>,
    /// Point positions in units of `h`.
    units: Vec<u64>,
    points: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    /// Builds a grid from region `(end, step multiple)` pairs.
    pub fn new(h: T, r_min: T, regions: &[(T, u64)]) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("base step must be positive, got {h}")));
        }
        if !(r_min > T::zero()) || r_min >= h {
            return Err(Error::InvalidGrid(format!(
                "r_min must lie in (0, h), got {r_min}"
            )));
        }
        if regions.is_empty() {
            return Err(Error::InvalidGrid("no regions".into()));
        }
        let mut units = Vec::new();
        let mut start: u64 = 0;
        let mut out_regions = Vec::with_capacity(regions.len());
        for &(end, multiple) in regions {
            if multiple == 0 {
                return Err(Error::InvalidGrid("step multiple must be ≥ 1".into()));
            }
            let end_units_f = (end / h).as_f64();
            let end_units = end_units_f.round();
            if !end_units.is_finite() || (end_units_f - end_units).abs() > 1e-6 {
                return Err(Error::InvalidGrid(format!(
                    "region end {end} is not a multiple of h = {h}"
                )));
            }
            let end_units = end_units as u64;
            if end_units <= start {
                return Err(Error::InvalidGrid(format!(
                    "region ends must increase (end {end})"
                )));
            }
            if (end_units - start) % multiple != 0 {
                return Err(Error::InvalidGrid(format!(
                    "region ending at {end} is not a multiple of its step {multiple}h"
                )));
            }
            let mut u = start + multiple;
            while u <= end_units {
                units.push(u);
                u += multiple;
            }
            start = end_units;
            out_regions.push(Region { end, multiple });
        }
        let points = units.iter().map(|&u| h * T::from_u64(u).unwrap()).collect();
        Ok(Self {
            h,
            r_min,
            regions: out_regions,
            units,
            points,
        })
    }

    /// Standard mesh ending at 40.8.
    pub fn standard(h: T) -> Result<Self> {
        Self::with_end(h, c(R_CUT))
    }

    /// Standard mesh continued with `8h` steps to 184.8.
    pub fn with_continuation(h: T) -> Result<Self> {
        Self::with_end(h, c(184.8))
    }

    /// Standard mesh truncated or extended (with `8h` steps) to `r_max`.
    /// `r_max` must itself land on a mesh point.
    pub fn with_end(h: T, r_max: T) -> Result<Self> {
        let mut regions: Vec<(T, u64)> = Vec::new();
        for &(end, m) in STANDARD_REGIONS.iter() {
            let end: T = c(end);
            if r_max <= end {
                regions.push((r_max, m));
                break;
            }
            regions.push((end, m));
        }
        let last: T = c(STANDARD_REGIONS[STANDARD_REGIONS.len() - 1].0);
        if r_max > last {
            regions.push((r_max, 8));
        }
        Self::new(h, c(DEFAULT_R_MIN), &regions)
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn r_min(&self) -> T {
        self.r_min
    }

    pub fn regions(&self) -> &[Region<T>] {
        &self.regions
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn r_max(&self) -> T {
        *self.points.last().expect("grid has points")
    }

    /// Step multiple (in units of `h`) leading into point `i`.
    pub fn multiple_before(&self, i: usize) -> u64 {
        if i == 0 {
            self.units[0]
        } else {
            self.units[i] - self.units[i - 1]
        }
    }

    pub fn units(&self) -> &[u64] {
        &self.units
    }

    /// Index of the point closest to `r`, if it lies within `h/1000` of it.
    pub fn index_of(&self, r: T) -> Option<usize> {
        let i = match self
            .points
            .binary_search_by(|p| p.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => {
                let lo = i.saturating_sub(1);
                let hi = i.min(self.points.len() - 1);
                if (self.points[lo] - r).abs() <= (self.points[hi] - r).abs() {
                    lo
                } else {
                    hi
                }
            }
        };
        if (self.points[i] - r).abs() <= self.h * c(1e-3) {
            Some(i)
        } else {
            None
        }
    }

    /// Index of the last point not exceeding `r`.
    pub fn last_index_at_or_below(&self, r: T) -> Option<usize> {
        let n = self.points.partition_point(|&p| p <= r + self.h * c(1e-9));
        n.checked_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_counts() {
        let g = RadialGrid::standard(0.006_f64).unwrap();
        assert_eq!(g.len(), 200 + 300 + 1500);
        assert!((g.r_max() - 40.8).abs() < 1e-12);
        let g = RadialGrid::with_continuation(0.006_f64).unwrap();
        assert_eq!(g.len(), 2000 + 3000);
    }

    #[test]
    fn boundaries_are_points() {
        for h in [0.004_f64, 0.0048, 0.006, 0.0075, 0.008] {
            let g = RadialGrid::with_continuation(h).unwrap();
            for b in [1.2, 4.8, 40.8, 184.8] {
                assert!(g.index_of(b).is_some(), "h={h} b={b}");
            }
            assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn step_doubles_at_boundaries() {
        let g = RadialGrid::standard(0.006_f64).unwrap();
        let i = g.index_of(1.2).unwrap();
        assert_eq!(g.multiple_before(i), 1);
        assert_eq!(g.multiple_before(i + 1), 2);
    }

    #[test]
    fn rejects_incommensurate_step() {
        assert!(RadialGrid::standard(0.0072_f64).is_err());
        assert!(RadialGrid::standard(-0.1_f64).is_err());
    }

    #[test]
    fn rejects_bad_r_min() {
        assert!(RadialGrid::new(0.006_f64, 0.0, &[(1.2, 1)]).is_err());
        assert!(RadialGrid::new(0.006_f64, 0.01, &[(1.2, 1)]).is_err());
    }

    #[test]
    fn truncated_grid() {
        let g = RadialGrid::with_end(0.006_f64, 4.8).unwrap();
        assert!((g.r_max() - 4.8).abs() < 1e-12);
        assert_eq!(g.regions().len(), 2);
    }
}
