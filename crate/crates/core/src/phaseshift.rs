//! Phase-shift extraction from `f` and `f'` at a single radius.
//!
//! For `f → A[s_l(kr) cos δ + c_l(kr) sin δ]` the function
//!
//! ```text
//! Q(r) = −{[f' − (l+1)f/r] s_l(kr) + k f s_{l+1}(kr)}
//!       / {[f' − (l+1)f/r] c_l(kr) + k f c_{l+1}(kr)}
//! ```
//!
//! equals `tan δ` wherever the potential has died away. The leading minus
//! sign goes with `c_l → +cos(kr − lπ/2)`.
//!
//! The polarization potential falls off only like `r⁻⁴`, so the local phase
//! keeps drifting well past the end of the mesh. [`far_field`] continues the
//! single-channel equation outward, doubling the matching radius until the
//! local phase is flat over the trailing window.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{propagate, IntegratorOptions};
use crate::potentials::ChannelSpec;
use crate::scalar::{c, Real};
use crate::special::riccati;

/// Numerator and denominator of `Q` (so that `Q = num / den`).
fn q_parts<T: Real>(f: T, fp: T, r: T, channel: &ChannelSpec<T>) -> Result<(T, T)> {
    let k = channel.k;
    let rho = k * r;
    let lo = riccati(channel.l, rho)?;
    let hi = riccati(channel.l + 1, rho)?;
    let l1 = T::from_u32(channel.l + 1).unwrap();
    let d = fp - l1 * f / r;
    let num = -(d * lo.s + k * f * hi.s);
    let den = d * lo.c + k * f * hi.c;
    Ok((num, den))
}

/// `Q(r)`, the local value of `tan δ`.
pub fn q_function<T: Real>(f: T, fp: T, r: T, channel: &ChannelSpec<T>) -> Result<T> {
    let (num, den) = q_parts(f, fp, r, channel)?;
    if den == T::zero() || !(num / den).is_finite() {
        return Err(Error::ZeroDenominator { r: r.as_f64() });
    }
    Ok(num / den)
}

/// `arctan Q(r)` reduced to `(−π/2, π/2]`, defined even where `Q` is not.
pub fn local_phase<T: Real>(f: T, fp: T, r: T, channel: &ChannelSpec<T>) -> Result<T> {
    let (num, den) = q_parts(f, fp, r, channel)?;
    Ok(wrap_half_pi(num.atan2(den)))
}

/// Reduces an angle to `(−π/2, π/2]`.
pub fn wrap_half_pi<T: Real>(x: T) -> T {
    let pi = T::PI();
    let half = pi / c(2.0);
    let mut y = x - (x / pi).round() * pi;
    if y <= -half {
        y = y + pi;
    } else if y > half {
        y = y - pi;
    }
    y
}

/// Spread (max − min) of angles defined modulo π, after unwrapping each
/// value to within π/2 of the first.
pub fn angular_spread<T: Real>(angles: &[T]) -> T {
    let Some(&first) = angles.first() else {
        return T::zero();
    };
    let mut lo = T::zero();
    let mut hi = T::zero();
    for &a in angles {
        let d = wrap_half_pi(a - first);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    hi - lo
}

/// Relative spread `(max − min)/max|x|` of a plain sequence.
pub fn relative_spread<T: Real>(xs: &[T]) -> T {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut scale = T::zero();
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
        scale = scale.max(x.abs());
    }
    if xs.is_empty() || scale == T::zero() {
        T::zero()
    } else {
        (hi - lo) / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldOptions<T> {
    /// First matching radius tried.
    pub start: T,
    /// Largest matching radius before giving up.
    pub cap: T,
    /// Spacing of the trailing window.
    pub spacing: T,
    /// Number of points in the trailing window.
    pub window: usize,
    /// Tolerance on the spread of `arctan Q` over the window (radians).
    pub tol: T,
    pub integrator: IntegratorOptions<T>,
}

/// Window spacing used by default. Fixed rather than tied to the mesh step so
/// that runs at different step lengths stop at the same matching radius.
pub const FAR_FIELD_SPACING: f64 = 0.048;

impl<T: Real> Default for FarFieldOptions<T> {
    /// Window of 100 points spaced [`FAR_FIELD_SPACING`], starting at 184.8
    /// and capped at 6000.
    fn default() -> Self {
        Self {
            start: c(184.8),
            cap: c(6000.0),
            spacing: c(FAR_FIELD_SPACING),
            window: 100,
            tol: c(1e-8),
            integrator: IntegratorOptions {
                rtol: c(1e-13),
                ..IntegratorOptions::default()
            },
        }
    }
}

/// Trailing-window samples of the continued free-electron function.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField<T> {
    pub r: Vec<T>,
    pub f: Vec<T>,
    pub fp: Vec<T>,
    /// Local phase `arctan Q` at each window point.
    pub phase: Vec<T>,
    pub spread: T,
    pub converged: bool,
}

impl<T: Real> FarField<T> {
    pub fn r_end(&self) -> T {
        *self.r.last().expect("window is non-empty")
    }
}

/// Continues `f'' + v(r) f = 0` from `(f, f')` at `r_start`, doubling the
/// matching radius until the local phase is flat over the trailing window.
pub fn far_field<T, V>(
    v: V,
    channel: &ChannelSpec<T>,
    r_start: T,
    y_start: [T; 2],
    opts: &FarFieldOptions<T>,
) -> Result<FarField<T>>
where
    T: Real,
    V: Fn(T) -> T,
{
    if opts.window < 2 {
        return Err(Error::Domain {
            what: "far-field window length",
            value: opts.window as f64,
        });
    }
    let span = opts.spacing * T::from_usize(opts.window - 1).unwrap();
    let mut r_cur = r_start;
    let mut y = y_start;
    let mut r_end = opts.start.max(r_start + span);
    loop {
        let first = r_end - span;
        let targets: Vec<T> = (0..opts.window)
            .map(|i| first + opts.spacing * T::from_usize(i).unwrap())
            .filter(|&t| t >= r_cur)
            .collect();
        let states = propagate(
            |r, s: &[T; 2]| {
                let vr = v(r);
                if !vr.is_finite() {
                    return Err(Error::Singularity { r: r.as_f64() });
                }
                Ok([s[1], -vr * s[0]])
            },
            r_cur,
            y,
            &targets,
            &opts.integrator,
        )?;
        let mut phase = Vec::with_capacity(states.len());
        for (t, s) in targets.iter().zip(states.iter()) {
            phase.push(local_phase(s[0], s[1], *t, channel)?);
        }
        let spread = angular_spread(&phase);
        let converged = spread < opts.tol;
        let next = r_end * c(2.0);
        if converged || next > opts.cap {
            return Ok(FarField {
                r: targets,
                f: states.iter().map(|s| s[0]).collect(),
                fp: states.iter().map(|s| s[1]).collect(),
                phase,
                spread,
                converged,
            });
        }
        r_cur = *targets.last().unwrap();
        y = *states.last().unwrap();
        r_end = next;
    }
}

/// Prüfer angle `Nπ + arccot(f'/(k f))` at the last sample, where `N` is the
/// number of sign changes of `f` over samples with `r ≥ r_from`.
fn prufer_angle<T: Real>(r: &[T], f: &[T], fp_end: T, k: T, r_from: T) -> T {
    let mut nodes = 0u32;
    let mut prev: Option<T> = None;
    for (&ri, &fi) in r.iter().zip(f.iter()) {
        if ri < r_from || fi == T::zero() {
            continue;
        }
        if let Some(p) = prev {
            if (p > T::zero()) != (fi > T::zero()) {
                nodes += 1;
            }
        }
        prev = Some(fi);
    }
    let f_end = *f.last().unwrap();
    let psi = T::FRAC_PI_2() - (fp_end / (k * f_end)).atan();
    T::from_u32(nodes).unwrap() * T::PI() + psi
}

/// Radius below which sign changes of `f` are ignored when counting nodes.
pub const NODE_COUNT_FROM: f64 = 0.1;

/// Branch-resolved phase at the last sample.
///
/// Counts the nodes of `f` and of the free solution `s_l(kr)` on the same
/// samples; the difference of their Prüfer angles fixes the multiple of π to
/// add to `principal`.
pub fn resolve_branch<T: Real>(
    r: &[T],
    f: &[T],
    fp_end: T,
    channel: &ChannelSpec<T>,
    principal: T,
) -> Result<(T, i64)> {
    if r.is_empty() || r.len() != f.len() {
        return Err(Error::Domain {
            what: "branch samples",
            value: r.len() as f64,
        });
    }
    let k = channel.k;
    let r_end = *r.last().unwrap();
    if *f.last().unwrap() == T::zero() {
        return Err(Error::AmbiguousBranch { r: r_end.as_f64() });
    }
    let r_from: T = c(NODE_COUNT_FROM);
    let theta_f = prufer_angle(r, f, fp_end, k, r_from);
    let mut free = Vec::with_capacity(r.len());
    for &ri in r {
        free.push(if ri < r_from { T::zero() } else { riccati(channel.l, k * ri)?.s });
    }
    let end = riccati(channel.l, k * r_end)?;
    if end.s == T::zero() {
        return Err(Error::AmbiguousBranch { r: r_end.as_f64() });
    }
    let theta_0 = prufer_angle(r, &free, k * end.s_prime, k, r_from);
    let x = (theta_f - theta_0 - principal) / T::PI();
    let n = x.round();
    if (x - n).abs() > c(0.25) {
        return Err(Error::AmbiguousBranch { r: r_end.as_f64() });
    }
    let n_int = n.to_i64().unwrap_or(0);
    Ok((principal + n * T::PI(), n_int))
}

/// Factor that brings `f` to `√(2/π)[s_l cos δ + c_l sin δ]`, using the
/// value and slope at one radius in the asymptotic zone.
pub fn normalization_factor<T: Real>(
    f: T,
    fp: T,
    r: T,
    channel: &ChannelSpec<T>,
    delta: T,
) -> Result<T> {
    let k = channel.k;
    let p = riccati(channel.l, k * r)?;
    let a = p.c * fp / k - f * p.c_prime;
    let b = p.s_prime * f - p.s * fp / k;
    let amplitude = a * delta.cos() + b * delta.sin();
    if amplitude == T::zero() || !amplitude.is_finite() {
        return Err(Error::ZeroDenominator { r: r.as_f64() });
    }
    Ok(c::<T>((2.0 / PI).sqrt()) / amplitude)
}

/// Result of a phase-shift calculation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftResult<T> {
    pub channel: ChannelSpec<T>,
    pub tan_delta: T,
    /// Branch-resolved phase shift in radians.
    pub delta: T,
    pub branch_n: i64,
    /// Factor applied to the raw solution to reach amplitude `√(2/π)`.
    pub a_norm: T,
    /// `(r, Q(r))` over the matching window.
    pub q_trace: Vec<(T, T)>,
    pub converged: bool,
    /// Spread of `arctan Q` over the window (radians).
    pub spread: T,
    pub r_match: T,
}

/// Phase extraction from a sampled solution plus its far-field
/// continuation.
///
/// `r`, `f`, `fp` are outward samples up to the mesh end; the principal
/// branch there is resolved by node counting and then followed continuously
/// to the far-field matching radius.
pub fn extract_phase<T, V>(
    r: &[T],
    f: &[T],
    fp: &[T],
    v: V,
    channel: &ChannelSpec<T>,
    opts: &FarFieldOptions<T>,
) -> Result<PhaseShiftResult<T>>
where
    T: Real,
    V: Fn(T) -> T,
{
    let n = r.len();
    if n == 0 || f.len() != n || fp.len() != n {
        return Err(Error::Domain {
            what: "sample count",
            value: n as f64,
        });
    }
    let r_mesh = r[n - 1];
    let near = local_phase(f[n - 1], fp[n - 1], r_mesh, channel)?;
    let (delta_mesh, _) = resolve_branch(r, f, fp[n - 1], channel, near)?;

    let far = far_field(&v, channel, r_mesh, [f[n - 1], fp[n - 1]], opts)?;
    let principal = *far.phase.last().unwrap();
    let delta = delta_mesh + wrap_half_pi(principal - near);
    let branch_n = ((delta - principal) / T::PI()).round().to_i64().unwrap_or(0);
    let r_match = far.r_end();
    let f_end = *far.f.last().unwrap();
    let fp_end = *far.fp.last().unwrap();
    let a_norm = normalization_factor(f_end, fp_end, r_match, channel, delta)?;
    let q_trace = far
        .r
        .iter()
        .zip(far.phase.iter())
        .map(|(&ri, &p)| (ri, p.tan()))
        .collect();
    Ok(PhaseShiftResult {
        channel: *channel,
        tan_delta: principal.tan(),
        delta,
        branch_n,
        a_norm,
        q_trace,
        converged: far.converged,
        spread: far.spread,
        r_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_wave_has_zero_q() {
        let ch = ChannelSpec::new(0.7_f64, 2, 0).unwrap();
        for r in [5.0, 12.0, 33.0] {
            let p = riccati(2, 0.7 * r).unwrap();
            let q = q_function(p.s, 0.7 * p.s_prime, r, &ch).unwrap();
            assert!(q.abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_wave_recovers_tan_delta() {
        let k = 0.4;
        let delta = 0.8_f64;
        let ch = ChannelSpec::new(k, 3, 1).unwrap();
        let r = 27.0;
        let p = riccati(3, k * r).unwrap();
        let f = p.s * delta.cos() + p.c * delta.sin();
        let fp = k * (p.s_prime * delta.cos() + p.c_prime * delta.sin());
        let q = q_function(f, fp, r, &ch).unwrap();
        assert!((q - delta.tan()).abs() < 1e-12);
    }

    #[test]
    fn irregular_wave_is_half_pi() {
        let k = 0.5_f64;
        let ch = ChannelSpec::new(k, 1, 0).unwrap();
        let r = 20.0;
        let p = riccati(1, k * r).unwrap();
        let ph = local_phase(p.c, k * p.c_prime, r, &ch).unwrap();
        assert!((ph.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(q_function(p.c, k * p.c_prime, r, &ch)
            .map(|q| q.abs() > 1e12)
            .unwrap_or(true));
    }

    #[test]
    fn wrap_and_spread() {
        assert!((wrap_half_pi(3.0_f64) - (3.0 - PI)).abs() < 1e-15);
        let s = angular_spread(&[PI / 2.0 - 1e-3, -PI / 2.0 + 1e-3]);
        assert!((s - 2e-3).abs() < 1e-12);
    }

    #[test]
    fn zero_potential_branch_is_zero() {
        let k = 0.3;
        let ch = ChannelSpec::new(k, 0, 0).unwrap();
        let r: Vec<f64> = (1..=400).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = r.iter().map(|x| (k * x).sin()).collect();
        let fp_end = k * (k * 40.0_f64).cos();
        let (d, n) = resolve_branch(&r, &f, fp_end, &ch, 0.0).unwrap();
        assert_eq!(n, 0);
        assert_eq!(d, 0.0);
    }
}
