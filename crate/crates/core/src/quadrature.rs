//! Composite Newton–Cotes rules on piecewise-uniform samples.

use crate::scalar::{c, Real};

/// Integrates samples `(x_i, y_i)` with `x` increasing.
///
/// The abscissae are split into maximal runs of equal spacing; each run is
/// integrated with Simpson's rule, using the 3/8 rule for the last three
/// intervals when a run has an odd number of intervals, and the trapezoid
/// rule for a single interval.
pub fn simpson<T: Real>(x: &[T], y: &[T]) -> T {
    assert_eq!(x.len(), y.len(), "abscissa and ordinate lengths differ");
    let n = x.len();
    if n < 2 {
        return T::zero();
    }
    let mut total = T::zero();
    let mut start = 0;
    while start < n - 1 {
        let h = x[start + 1] - x[start];
        let mut end = start + 1;
        while end + 1 < n {
            let next = x[end + 1] - x[end];
            if (next - h).abs() > h.abs() * c(1e-6) {
                break;
            }
            end += 1;
        }
        total = total + uniform_run(&y[start..=end], h);
        start = end;
    }
    total
}

fn uniform_run<T: Real>(y: &[T], h: T) -> T {
    let intervals = y.len() - 1;
    match intervals {
        0 => T::zero(),
        1 => h * (y[0] + y[1]) * c(0.5),
        2 => h / c(3.0) * (y[0] + c::<T>(4.0) * y[1] + y[2]),
        _ => {
            let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
            let mut acc = y[0] + y[simpson_end];
            for (i, &v) in y.iter().enumerate().take(simpson_end).skip(1) {
                acc = acc + v * if i % 2 == 1 { c(4.0) } else { c(2.0) };
            }
            let mut total = acc * h / c(3.0);
            if simpson_end < intervals {
                let t = &y[simpson_end..];
                total = total
                    + h * c(3.0 / 8.0) * (t[0] + c::<T>(3.0) * t[1] + c::<T>(3.0) * t[2] + t[3]);
            }
            total
        }
    }
}
