//! Integrators for `g'' + V(r) g = W(r)`.
//!
//! [`propagate`] is an explicit Dormand–Prince 5(4) stepper over a fixed
//! state array, with an adaptive and a fixed-step mode. Output is produced
//! by landing exactly on each requested radius. [`integrate_pair`] wraps it
//! for the 2×2 coupled system with derivatives carried as state, plus a
//! running overlap integral. [`numerov`] and [`numerov_coupled`] are the
//! three-point baselines on the piecewise mesh.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::linalg::Mat2;
use crate::potentials::CoupledSystem;
use crate::scalar::{c, Real};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode<T> {
    Adaptive,
    /// Constant step no larger than the given value between output points.
    Fixed(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub min_step: T,
    pub max_steps: usize,
    pub mode: StepMode<T>,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self {
            rtol: c(1e-12),
            atol: c(1e-300_f64.max(T::min_positive_value().as_f64())),
            min_step: c(1e-14),
            max_steps: 2_000_000,
            mode: StepMode::Adaptive,
        }
    }
}

impl<T: Real> IntegratorOptions<T> {
    pub fn fixed(step: T) -> Self {
        Self {
            mode: StepMode::Fixed(step),
            ..Self::default()
        }
    }
}

#[inline]
fn axpy<T: Real, const N: usize>(y: &[T; N], terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (a, k) in terms {
        for i in 0..N {
            out[i] = out[i] + *a * k[i];
        }
    }
    out
}

/// Integrates `y' = f(r, y)` from `r0` and returns the state at each target.
///
/// Targets must be monotone and all on the same side of `r0`. A target equal
/// to `r0` returns `y0` unchanged.
pub fn propagate<T, const N: usize, F>(
    mut f: F,
    r0: T,
    y0: [T; N],
    targets: &[T],
    opts: &IntegratorOptions<T>,
) -> Result<Vec<[T; N]>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let mut out = Vec::with_capacity(targets.len());
    let Some(&last) = targets.last() else {
        return Ok(out);
    };
    let dir = if last >= r0 { T::one() } else { -T::one() };
    let mut r = r0;
    let mut y = y0;
    let mut k1 = f(r, &y)?;
    let mut steps = 0usize;

    // initial step guess from the local scale of the solution
    let ynorm = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let fnorm = k1.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let mut step = if fnorm > T::zero() && ynorm > T::zero() {
        (c::<T>(1e-3) * ynorm / fnorm).min(c(1e-2))
    } else {
        c(1e-3)
    };

    for &t in targets {
        if (t - r) * dir < T::zero() {
            return Err(Error::Domain {
                what: "non-monotone integration target",
                value: t.as_f64(),
            });
        }
        match opts.mode {
            StepMode::Fixed(hmax) => {
                let span = (t - r).abs();
                if span > T::zero() {
                    let n = (span / hmax - c(1e-9)).ceil().max(T::one());
                    let hs = dir * span / n;
                    let n = n.to_usize().unwrap_or(1);
                    for j in 0..n {
                        let (y5, k7, _) = dp_step(&mut f, r, &y, &k1, hs)?;
                        r = if j + 1 == n { t } else { r + hs };
                        y = y5;
                        k1 = if j + 1 == n { f(r, &y)? } else { k7 };
                        steps += 1;
                    }
                }
            }
            StepMode::Adaptive => {
                while (t - r) * dir > T::zero() {
                    let remaining = (t - r).abs();
                    let clipped = remaining <= step * c(1.0 + 1e-10);
                    let hs = if clipped { remaining } else { step };
                    let (y5, k7, err_vec) = dp_step(&mut f, r, &y, &k1, dir * hs)?;
                    let ymax = y5.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                    let floor = c::<T>(1e-3) * ymax;
                    let mut err = T::zero();
                    for i in 0..N {
                        let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs()).max(floor);
                        err = err.max(err_vec[i].abs() / sc);
                    }
                    steps += 1;
                    if steps > opts.max_steps {
                        return Err(Error::StepBudget {
                            r: r.as_f64(),
                            max_steps: opts.max_steps,
                        });
                    }
                    if !err.is_finite() {
                        return Err(Error::Singularity { r: r.as_f64() });
                    }
                    let factor = if err > T::zero() {
                        (c::<T>(0.9) * err.powf(c(-0.2))).max(c(0.2)).min(c(5.0))
                    } else {
                        c(5.0)
                    };
                    if err <= T::one() {
                        r = if clipped { t } else { r + dir * hs };
                        y = y5;
                        k1 = k7;
                        let proposal = hs * factor;
                        step = if clipped { step.max(proposal) } else { proposal };
                    } else {
                        step = hs * factor.min(c(0.9));
                        if step < opts.min_step {
                            return Err(Error::StepSize {
                                r: r.as_f64(),
                                step: step.as_f64(),
                            });
                        }
                    }
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[allow(clippy::type_complexity)]
fn dp_step<T, const N: usize, F>(
    f: &mut F,
    r: T,
    y: &[T; N],
    k1: &[T; N],
    h: T,
) -> Result<([T; N], [T; N], [T; N])>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let k2 = f(r + h * c(C2), &axpy(y, &[(h * c(A21), k1)]))?;
    let k3 = f(r + h * c(C3), &axpy(y, &[(h * c(A31), k1), (h * c(A32), &k2)]))?;
    let k4 = f(
        r + h * c(C4),
        &axpy(y, &[(h * c(A41), k1), (h * c(A42), &k2), (h * c(A43), &k3)]),
    )?;
    let k5 = f(
        r + h * c(C5),
        &axpy(
            y,
            &[(h * c(A51), k1), (h * c(A52), &k2), (h * c(A53), &k3), (h * c(A54), &k4)],
        ),
    )?;
    let k6 = f(
        r + h,
        &axpy(
            y,
            &[
                (h * c(A61), k1),
                (h * c(A62), &k2),
                (h * c(A63), &k3),
                (h * c(A64), &k4),
                (h * c(A65), &k5),
            ],
        ),
    )?;
    let y5 = axpy(
        y,
        &[
            (h * c(B1), k1),
            (h * c(B3), &k3),
            (h * c(B4), &k4),
            (h * c(B5), &k5),
            (h * c(B6), &k6),
        ],
    );
    let k7 = f(r + h, &y5)?;
    let zero = [T::zero(); N];
    let err = axpy(
        &zero,
        &[
            (h * c(E1), k1),
            (h * c(E3), &k3),
            (h * c(E4), &k4),
            (h * c(E5), &k5),
            (h * c(E6), &k6),
            (h * c(E7), &k7),
        ],
    );
    Ok((y5, k7, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Outward,
    Inward,
}

/// Values `(g1, g1', g2, g2')` of one solution at a set of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSolution<T> {
    pub direction: Direction,
    pub r0: T,
    pub r: Vec<T>,
    pub y: Vec<[T; 4]>,
    /// Running `∫_{r0}^{r} w(s) g1(s) ds` with the system's overlap weight.
    pub overlap: Vec<T>,
}

impl<T: Real> SampledSolution<T> {
    pub fn g1(&self, i: usize) -> T {
        self.y[i][0]
    }
    pub fn g2(&self, i: usize) -> T {
        self.y[i][2]
    }
}

fn pair_rhs<T: Real, S: CoupledSystem<T> + ?Sized>(
    sys: &S,
    inhomogeneous: bool,
    r: T,
    y: &[T; 5],
) -> Result<[T; 5]> {
    let co = sys.at(r);
    if !co.is_finite() {
        return Err(Error::Singularity { r: r.as_f64() });
    }
    let (w1, w2) = if inhomogeneous {
        (co.w[0], co.w[1])
    } else {
        (T::zero(), T::zero())
    };
    Ok([
        y[1],
        w1 - co.v[0][0] * y[0] - co.v[0][1] * y[2],
        y[3],
        w2 - co.v[1][0] * y[0] - co.v[1][1] * y[2],
        sys.overlap_weight(r) * y[0],
    ])
}

/// Integrates the coupled pair from `(g1, g1', g2, g2')` at `r0` to each of
/// `targets` (monotone, one side of `r0`).
pub fn integrate_pair_at<T: Real, S: CoupledSystem<T> + ?Sized>(
    sys: &S,
    inhomogeneous: bool,
    y0: [T; 4],
    r0: T,
    targets: &[T],
    opts: &IntegratorOptions<T>,
) -> Result<SampledSolution<T>> {
    let direction = match targets.last() {
        Some(&t) if t < r0 => Direction::Inward,
        _ => Direction::Outward,
    };
    let start = [y0[0], y0[1], y0[2], y0[3], T::zero()];
    let states = propagate(
        |r, y: &[T; 5]| pair_rhs(sys, inhomogeneous, r, y),
        r0,
        start,
        targets,
        opts,
    )?;
    let mut y = Vec::with_capacity(states.len());
    let mut overlap = Vec::with_capacity(states.len());
    for s in states {
        y.push([s[0], s[1], s[2], s[3]]);
        overlap.push(s[4]);
    }
    Ok(SampledSolution {
        direction,
        r0,
        r: targets.to_vec(),
        y,
        overlap,
    })
}

/// Integrates over the grid points on one side of `r0`: outward to all
/// points `≥ r0`, or inward to all points `≤ r0` followed by `r_min`.
pub fn integrate_pair<T: Real, S: CoupledSystem<T> + ?Sized>(
    sys: &S,
    inhomogeneous: bool,
    y0: [T; 4],
    r0: T,
    grid: &RadialGrid<T>,
    direction: Direction,
    opts: &IntegratorOptions<T>,
) -> Result<SampledSolution<T>> {
    if !(r0 >= grid.r_min() && r0 <= grid.r_max()) {
        return Err(Error::Domain {
            what: "start radius outside the grid",
            value: r0.as_f64(),
        });
    }
    let targets: Vec<T> = match direction {
        Direction::Outward => grid.points().iter().copied().filter(|&p| p >= r0).collect(),
        Direction::Inward => {
            let mut t: Vec<T> = grid
                .points()
                .iter()
                .rev()
                .copied()
                .filter(|&p| p <= r0)
                .collect();
            t.push(grid.r_min());
            t
        }
    };
    integrate_pair_at(sys, inhomogeneous, y0, r0, &targets, opts)
}

/// Values and derivatives from a Numerov run.
#[derive(Debug, Clone, PartialEq)]
pub struct NumerovSolution<T> {
    pub r: Vec<T>,
    pub y: Vec<T>,
    /// Finite-difference derivative; `None` at the two ends.
    pub dy: Vec<Option<T>>,
}

/// Locates the sample at `r_i − s` for a step `s` leaving point `i`,
/// which is either the previous point or, after a step doubling, the one
/// before it.
fn back_index(units: &[u64], i: usize, step_units: u64) -> Option<usize> {
    let target = units[i].checked_sub(step_units)?;
    if i >= 1 && units[i - 1] == target {
        Some(i - 1)
    } else if i >= 2 && units[i - 2] == target {
        Some(i - 2)
    } else {
        None
    }
}

/// Three-point Numerov propagation of `y'' + v(r) y = w(r)` over the mesh
/// `units·h`, started from the first two values.
///
/// `units` are integer multiples of `h`; consecutive spacings may only stay
/// equal or double.
pub fn numerov<T, V, W>(
    v: V,
    w: W,
    h: T,
    units: &[u64],
    y_first: [T; 2],
) -> Result<NumerovSolution<T>>
where
    T: Real,
    V: Fn(T) -> T,
    W: Fn(T) -> T,
{
    let n = units.len();
    if n < 2 {
        return Err(Error::InvalidGrid("Numerov needs at least two points".into()));
    }
    let r: Vec<T> = units.iter().map(|&u| h * T::from_u64(u).unwrap()).collect();
    let vv: Vec<T> = r.iter().map(|&x| v(x)).collect();
    let ww: Vec<T> = r.iter().map(|&x| w(x)).collect();
    for (i, (&a, &b)) in vv.iter().zip(ww.iter()).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Singularity { r: r[i].as_f64() });
        }
    }
    let twelfth = c::<T>(1.0 / 12.0);
    let mut y = vec![T::zero(); n];
    y[0] = y_first[0];
    y[1] = y_first[1];
    for i in 1..n - 1 {
        let su = units[i + 1] - units[i];
        let j = back_index(units, i, su).ok_or_else(|| {
            Error::InvalidGrid(format!("no back point for step at r = {}", r[i]))
        })?;
        let s = h * T::from_u64(su).unwrap();
        let f = s * s * twelfth;
        let rhs = c::<T>(2.0) * (T::one() - c::<T>(5.0) * f * vv[i]) * y[i]
            - (T::one() + f * vv[j]) * y[j]
            + f * (ww[i + 1] + c::<T>(10.0) * ww[i] + ww[j]);
        y[i + 1] = rhs / (T::one() + f * vv[i + 1]);
        if !y[i + 1].is_finite() {
            return Err(Error::Singularity { r: r[i + 1].as_f64() });
        }
    }
    let ypp: Vec<T> = (0..n).map(|i| ww[i] - vv[i] * y[i]).collect();
    let mut dy = vec![None; n];
    for i in 1..n - 1 {
        let su = units[i + 1] - units[i];
        if let Some(j) = back_index(units, i, su) {
            let s = h * T::from_u64(su).unwrap();
            dy[i] = Some(
                (y[i + 1] - y[j]) / (c::<T>(2.0) * s) - s * twelfth * (ypp[i + 1] - ypp[j]),
            );
        }
    }
    Ok(NumerovSolution { r, y, dy })
}

/// Coupled Numerov solution: two components with derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NumerovPair<T> {
    pub r: Vec<T>,
    pub y: Vec<[T; 2]>,
    pub dy: Vec<Option<[T; 2]>>,
}

/// Matrix Numerov for `Y'' + V(r) Y = W(r)` with two components.
pub fn numerov_coupled<T, S>(
    sys: &S,
    inhomogeneous: bool,
    h: T,
    units: &[u64],
    y_first: [[T; 2]; 2],
) -> Result<NumerovPair<T>>
where
    T: Real,
    S: CoupledSystem<T> + ?Sized,
{
    let n = units.len();
    if n < 2 {
        return Err(Error::InvalidGrid("Numerov needs at least two points".into()));
    }
    let r: Vec<T> = units.iter().map(|&u| h * T::from_u64(u).unwrap()).collect();
    let mut vm = Vec::with_capacity(n);
    let mut wv = Vec::with_capacity(n);
    for &x in &r {
        let co = sys.at(x);
        if !co.is_finite() {
            return Err(Error::Singularity { r: x.as_f64() });
        }
        vm.push(Mat2::from_rows(co.v));
        wv.push(if inhomogeneous { co.w } else { [T::zero(); 2] });
    }
    let id = Mat2::identity();
    let twelfth = c::<T>(1.0 / 12.0);
    let mut y = vec![[T::zero(); 2]; n];
    y[0] = y_first[0];
    y[1] = y_first[1];
    for i in 1..n - 1 {
        let su = units[i + 1] - units[i];
        let j = back_index(units, i, su).ok_or_else(|| {
            Error::InvalidGrid(format!("no back point for step at r = {}", r[i]))
        })?;
        let s = h * T::from_u64(su).unwrap();
        let f = s * s * twelfth;
        let a_i = id.sub(&vm[i].scale(c::<T>(5.0) * f)).scale(c(2.0));
        let a_j = id.add(&vm[j].scale(f));
        let mut rhs = a_i.mul_vec(y[i]);
        let back = a_j.mul_vec(y[j]);
        for q in 0..2 {
            rhs[q] = rhs[q] - back[q] + f * (wv[i + 1][q] + c::<T>(10.0) * wv[i][q] + wv[j][q]);
        }
        let lhs = id.add(&vm[i + 1].scale(f));
        let inv = lhs
            .inverse()
            .ok_or(Error::Singularity { r: r[i + 1].as_f64() })?;
        y[i + 1] = inv.mul_vec(rhs);
        if !(y[i + 1][0].is_finite() && y[i + 1][1].is_finite()) {
            return Err(Error::Singularity { r: r[i + 1].as_f64() });
        }
    }
    let ypp: Vec<[T; 2]> = (0..n)
        .map(|i| {
            let vy = vm[i].mul_vec(y[i]);
            [wv[i][0] - vy[0], wv[i][1] - vy[1]]
        })
        .collect();
    let mut dy = vec![None; n];
    for i in 1..n - 1 {
        let su = units[i + 1] - units[i];
        if let Some(j) = back_index(units, i, su) {
            let s = h * T::from_u64(su).unwrap();
            let mut d = [T::zero(); 2];
            for q in 0..2 {
                d[q] = (y[i + 1][q] - y[j][q]) / (c::<T>(2.0) * s)
                    - s * twelfth * (ypp[i + 1][q] - ypp[j][q]);
            }
            dy[i] = Some(d);
        }
    }
    Ok(NumerovPair { r, y, dy })
}
