//! Comparison solvers.
//!
//! * [`solve_mcdmm`]: outward matrix Numerov for the coupled F/G system
//!   from an `r^{l+1}` series start, Simpson overlaps for `A(k)`, and a
//!   phase read off from values of `f` at two radii.
//! * [`solve_local_exchange`]: single-channel Numerov with a local
//!   exchange potential (or none), phase from `Q`.
//!
//! Both hand over to the adaptive single-channel propagator before
//! matching: McDMM at 40.8, where the exchange coupling has died out, and
//! the local solvers at 4.8.

use std::fmt;
use std::str::FromStr;

use crate::canonical::{CanonicalOptions, CanonicalSolver};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, R_CUT};
use crate::ode::{numerov, numerov_coupled, propagate, IntegratorOptions};
use crate::phaseshift::{
    angular_spread, extract_phase, far_field, local_phase, normalization_factor, resolve_branch,
    wrap_half_pi, FarFieldOptions, PhaseShiftResult,
};
use crate::potentials::{ChannelSpec, CoupledCoefficients, ExchangeModel, LocalChannel};
use crate::quadrature::simpson;
use crate::scalar::{c, Real};
use crate::special::riccati;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverId {
    /// Canonical functions with exact exchange.
    Kftee,
    /// Coupled Numerov with exact exchange.
    Mcdmm,
    /// Furness–McCarthy local exchange.
    Fmcc,
    /// Bransden–Noble local exchange.
    Bn,
}

impl SolverId {
    pub const ALL: [SolverId; 4] = [SolverId::Kftee, SolverId::Mcdmm, SolverId::Fmcc, SolverId::Bn];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Kftee => "kftee",
            SolverId::Mcdmm => "mcdmm",
            SolverId::Fmcc => "fmcc",
            SolverId::Bn => "bn",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kftee" => Ok(SolverId::Kftee),
            "mcdmm" => Ok(SolverId::Mcdmm),
            "fmcc" | "fmccle" => Ok(SolverId::Fmcc),
            "bn" | "bnle" => Ok(SolverId::Bn),
            other => Err(format!("unknown solver '{other}' (expected kftee, mcdmm, fmcc, bn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOptions<T> {
    /// McDMM Numerov runs up to this radius, then the adaptive propagator
    /// takes over. It must lie beyond the reach of the exchange coupling.
    pub changeover: T,
    /// Same for the single-channel local-exchange solvers.
    pub local_changeover: T,
    /// Number of two-point matchings used to judge McDMM stability.
    pub pair_count: usize,
    /// Largest spread (radians) of the two-point phases accepted as stable.
    pub pair_tol: T,
    /// Keep the exchange coupling in the McDMM system.
    pub exchange: bool,
    pub far: Option<FarFieldOptions<T>>,
}

impl<T: Real> Default for BaselineOptions<T> {
    fn default() -> Self {
        Self {
            changeover: c(R_CUT),
            local_changeover: c(4.8),
            pair_count: 10,
            pair_tol: c(1e-6),
            exchange: true,
            far: None,
        }
    }
}

/// Mesh units `1, 2, ...` up to the changeover radius.
fn numerov_units<T: Real>(grid: &RadialGrid<T>, changeover: T) -> Result<Vec<u64>> {
    let limit = changeover + grid.h() * c(1e-9);
    let units: Vec<u64> = grid
        .units()
        .iter()
        .zip(grid.points())
        .take_while(|(_, &p)| p <= limit)
        .map(|(&u, _)| u)
        .collect();
    if units.len() < 4 || units[0] != 1 || units[1] != 2 {
        return Err(Error::InvalidGrid(
            "Numerov baseline needs a mesh starting at h, 2h".into(),
        ));
    }
    Ok(units)
}

fn far_options<T: Real>(opts: &BaselineOptions<T>) -> FarFieldOptions<T> {
    opts.far.unwrap_or_default()
}

/// `Simpson ∫_0^{r_n} R_10 g` on the mesh with `g(0) = 0`.
fn mesh_overlap<T: Real>(cc: &CoupledCoefficients<T>, r: &[T], g: &[T]) -> T {
    let mut x = Vec::with_capacity(r.len() + 1);
    let mut y = Vec::with_capacity(r.len() + 1);
    x.push(T::zero());
    y.push(T::zero());
    for (&ri, &gi) in r.iter().zip(g) {
        x.push(ri);
        y.push(cc.target.orbital(ri) * gi);
    }
    simpson(&x, &y)
}

/// Coupled Numerov baseline with exact exchange.
pub fn solve_mcdmm<T: Real>(
    channel: &ChannelSpec<T>,
    grid: &RadialGrid<T>,
    opts: &BaselineOptions<T>,
) -> Result<PhaseShiftResult<T>> {
    let mut cc = CoupledCoefficients::new(*channel)?;
    if !opts.exchange {
        cc = cc.without_exchange();
    }
    let units = numerov_units(grid, opts.changeover)?;
    let h = grid.h();
    let l = channel.l;
    // F starts on its three-term series, G on the bare power
    let (fa1, fa2) = frobenius_start(&|r: T| cc.v11(r), l);
    let start = |r: T| r.powi(l as i32 + 1) * (T::one() + fa1 * r + fa2 * r * r);
    let p1 = start(h);
    let p2 = start(h * c(2.0));
    let g1 = h.powi(l as i32 + 1);
    let g2 = (h * c(2.0)).powi(l as i32 + 1);
    let z = T::zero();
    let y1 = numerov_coupled(&cc, false, h, &units, [[p1, z], [p2, z]])?;
    let y2 = numerov_coupled(&cc, false, h, &units, [[z, g1], [z, g2]])?;
    let ys = numerov_coupled(&cc, true, h, &units, [[z, z], [z, z]])?;
    let n = units.len();
    let r = &y1.r;

    let (a1, a2) = if l == 0 && cc.has_exchange() {
        let f_of = |s: &crate::ode::NumerovPair<T>| s.y.iter().map(|v| v[0]).collect::<Vec<T>>();
        let i1 = mesh_overlap(&cc, r, &f_of(&y1));
        let i2 = mesh_overlap(&cc, r, &f_of(&y2));
        let j = mesh_overlap(&cc, r, &f_of(&ys));
        let kk = cc.exchange_factor();
        let den = T::one() - kk * j;
        if den.abs() < c(1e-10) {
            return Err(Error::Resonance {
                denominator: den.as_f64(),
            });
        }
        (kk * i1 / den, kk * i2 / den)
    } else {
        (T::zero(), T::zero())
    };

    // growth coefficient of G from its values at the last two mesh points
    let (ra, rb) = (r[n - 2], r[n - 1]);
    let lf = l as i32;
    let growth = |s: &crate::ode::NumerovPair<T>| {
        (s.y[n - 1][1] * rb.powi(lf) - s.y[n - 2][1] * ra.powi(lf))
            / (rb.powi(2 * lf + 1) - ra.powi(2 * lf + 1))
    };
    let (b1, b2, bs) = (growth(&y1), growth(&y2), growth(&ys));
    let den = b2 + a2 * bs;
    if den == T::zero() {
        return Err(Error::ZeroDenominator { r: rb.as_f64() });
    }
    let d = -(b1 + a1 * bs) / den;
    let a = a1 + d * a2;

    let handoff = n - 2;
    let mut f = Vec::with_capacity(handoff + 1);
    for i in 0..=handoff {
        f.push(y1.y[i][0] + d * y2.y[i][0] + a * ys.y[i][0]);
    }
    let derivative = |s: &crate::ode::NumerovPair<T>| s.dy[handoff].map(|v| v[0]);
    let fp_h = match (derivative(&y1), derivative(&y2), derivative(&ys)) {
        (Some(p), Some(q), Some(s)) => p + d * q + a * s,
        _ => return Err(Error::InvalidGrid("no derivative at changeover".into())),
    };
    let r_h = r[handoff];
    let v = |x: T| cc.v11(x);
    let far_opts = far_options(opts);
    let far = far_field(v, channel, r_h, [f[handoff], fp_h], &far_opts)?;

    // two-point matching a quarter wavelength apart, beyond the window
    let k = channel.k;
    let sep = T::FRAC_PI_2() / k;
    let base = far.r_end();
    let stride = far_opts.spacing * c(10.0);
    let mut targets = Vec::with_capacity(2 * opts.pair_count);
    for j in 0..opts.pair_count.max(1) {
        let ra = base + stride * T::from_usize(j + 1).unwrap();
        targets.push(ra);
        targets.push(ra + sep);
    }
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&x, &y| targets[x].partial_cmp(&targets[y]).unwrap());
    let sorted: Vec<T> = order.iter().map(|&i| targets[i]).collect();
    let states = propagate(
        |x, s: &[T; 2]| Ok([s[1], -cc.v11(x) * s[0]]),
        base,
        [*far.f.last().unwrap(), *far.fp.last().unwrap()],
        &sorted,
        &far_opts.integrator,
    )?;
    let mut value = vec![T::zero(); targets.len()];
    for (pos, &i) in order.iter().enumerate() {
        value[i] = states[pos][0];
    }
    let mut phases = Vec::with_capacity(opts.pair_count);
    let mut q_trace = Vec::with_capacity(opts.pair_count);
    for j in 0..opts.pair_count.max(1) {
        let (xa, xb) = (targets[2 * j], targets[2 * j + 1]);
        let (fa, fb) = (value[2 * j], value[2 * j + 1]);
        let pa = riccati(l, k * xa)?;
        let pb = riccati(l, k * xb)?;
        let num = fa * pb.s - fb * pa.s;
        let den = fb * pa.c - fa * pb.c;
        let ph = wrap_half_pi(num.atan2(den));
        q_trace.push((xa, ph.tan()));
        phases.push(ph);
    }
    let pair_spread = angular_spread(&phases);
    let principal = phases[0];

    let near = local_phase(f[handoff], fp_h, r_h, channel)?;
    let (delta_mesh, _) = resolve_branch(&r[..=handoff], &f, fp_h, channel, near)?;
    let far_principal = *far.phase.last().unwrap();
    let delta_far = delta_mesh + wrap_half_pi(far_principal - near);
    let delta = delta_far + wrap_half_pi(principal - far_principal);
    let branch_n = ((delta - principal) / T::PI()).round().to_i64().unwrap_or(0);
    let a_norm = normalization_factor(
        *far.f.last().unwrap(),
        *far.fp.last().unwrap(),
        base,
        channel,
        delta,
    )?;
    let spread = pair_spread.max(far.spread);
    Ok(PhaseShiftResult {
        channel: *channel,
        tan_delta: principal.tan(),
        delta,
        branch_n,
        a_norm,
        q_trace,
        converged: far.converged && pair_spread <= opts.pair_tol,
        spread,
        r_match: targets[1],
    })
}

/// Coefficients of `r^{l+1}(1 + a₁r + a₂r²)` for `y'' + v y = 0`, with the
/// `q/r + p` part of `v` estimated from two tiny radii.
fn frobenius_start<T: Real, V: Fn(T) -> T>(v: &V, l: u32) -> (T, T) {
    let lf = T::from_u32(l).unwrap();
    let cent = |r: T| lf * (lf + T::one()) / (r * r);
    let (x1, x2): (T, T) = (c(1e-6), c(2e-6));
    let w1 = x1 * (v(x1) + cent(x1));
    let w2 = x2 * (v(x2) + cent(x2));
    let q = c::<T>(2.0) * w1 - w2;
    let p = (w2 - w1) / (x2 - x1);
    let m_term = |m: T| m * (m + c::<T>(2.0) * lf + T::one());
    let a1 = -q / m_term(T::one());
    let a2 = -(q * a1 + p) / m_term(c(2.0));
    (a1, a2)
}

/// Radius at which the three-term series is evaluated for the local solvers.
const SERIES_RADIUS: f64 = 1e-5;

/// Values at `h` and `2h` of the regular solution, from the series at
/// [`SERIES_RADIUS`] carried outward by the adaptive integrator.
fn series_start<T: Real, V: Fn(T) -> T>(v: &V, l: u32, h: T) -> Result<[T; 2]> {
    let (a1, a2) = frobenius_start(v, l);
    let x0: T = c(SERIES_RADIUS);
    let p = l as i32 + 1;
    let value = x0.powi(p) * (T::one() + a1 * x0 + a2 * x0 * x0);
    let slope = x0.powi(p - 1)
        * (T::from_i32(p).unwrap()
            + T::from_i32(p + 1).unwrap() * a1 * x0
            + T::from_i32(p + 2).unwrap() * a2 * x0 * x0);
    let states = propagate(
        |x, y: &[T; 2]| Ok([y[1], -v(x) * y[0]]),
        x0,
        [value, slope],
        &[h, h * c(2.0)],
        &IntegratorOptions::default(),
    )?;
    Ok([states[0][0], states[1][0]])
}

/// Single-channel Numerov with local exchange (`None` for no exchange).
pub fn solve_local_exchange<T: Real>(
    channel: &ChannelSpec<T>,
    model: Option<ExchangeModel>,
    grid: &RadialGrid<T>,
    opts: &BaselineOptions<T>,
) -> Result<PhaseShiftResult<T>> {
    let lc = LocalChannel::new(*channel, model)?;
    let v = |r: T| lc.v(r);
    let units = numerov_units(grid, opts.local_changeover)?;
    let h = grid.h();
    let l = channel.l;
    let first = series_start(&v, l, h)?;
    let sol = numerov(v, |_| T::zero(), h, &units, first)?;
    let n = units.len();
    let handoff = n - 2;
    let r = &sol.r[..=handoff];
    let f = &sol.y[..=handoff];
    let fp: Vec<T> = sol.dy[..=handoff]
        .iter()
        .map(|d| d.unwrap_or(T::zero()))
        .collect();
    extract_phase(r, f, &fp, v, channel, &far_options(opts))
}

/// Runs one solver on one channel.
pub fn run_solver<T: Real>(
    id: SolverId,
    channel: &ChannelSpec<T>,
    grid: &RadialGrid<T>,
    canonical: &CanonicalOptions<T>,
    baseline: &BaselineOptions<T>,
) -> Result<PhaseShiftResult<T>> {
    match id {
        SolverId::Kftee => {
            CanonicalSolver::new(grid.clone(), canonical.clone())
                .solve(channel)
                .map(|o| o.phase)
        }
        SolverId::Mcdmm => solve_mcdmm(channel, grid, baseline),
        SolverId::Fmcc => {
            solve_local_exchange(channel, Some(ExchangeModel::FurnessMcCarthy), grid, baseline)
        }
        SolverId::Bn => {
            solve_local_exchange(channel, Some(ExchangeModel::BransdenNoble), grid, baseline)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<T> {
    pub channel: ChannelSpec<T>,
    pub solver: SolverId,
    pub steps: Vec<T>,
    pub deltas: Vec<T>,
    /// `max δ − min δ`.
    pub spread: T,
    /// Significant figures of the mean that the spread leaves intact.
    pub stable_digits: u32,
    /// Whether every run reported convergence.
    pub all_converged: bool,
}

/// `⌊log10(|mean δ| / spread)⌋`, capped at 16 for a zero spread.
pub fn stable_digits<T: Real>(deltas: &[T], spread: T) -> u32 {
    if deltas.is_empty() {
        return 0;
    }
    let mean = deltas.iter().copied().sum::<T>() / T::from_usize(deltas.len()).unwrap();
    if spread == T::zero() {
        return 16;
    }
    let x = (mean.abs() / spread).log10().floor();
    x.max(T::zero()).min(c(16.0)).to_u32().unwrap_or(0)
}

/// Phase shift of `channel` for each base step in `steps`, on the standard
/// mesh ending at `r_max`.
pub fn steplength_sensitivity<T: Real>(
    channel: &ChannelSpec<T>,
    solver: SolverId,
    steps: &[T],
    r_max: T,
    canonical: &CanonicalOptions<T>,
    baseline: &BaselineOptions<T>,
) -> Result<SensitivityReport<T>> {
    let mut deltas = Vec::with_capacity(steps.len());
    let mut all_converged = true;
    for &h in steps {
        let grid = RadialGrid::with_end(h, r_max)?;
        let res = run_solver(solver, channel, &grid, canonical, baseline)?;
        all_converged &= res.converged;
        deltas.push(res.delta);
    }
    let lo = deltas.iter().copied().fold(T::infinity(), T::min);
    let hi = deltas.iter().copied().fold(T::neg_infinity(), T::max);
    let spread = if deltas.is_empty() { T::zero() } else { hi - lo };
    Ok(SensitivityReport {
        channel: *channel,
        solver,
        steps: steps.to_vec(),
        stable_digits: stable_digits(&deltas, spread),
        deltas,
        spread,
        all_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_ids_round_trip() {
        for id in SolverId::ALL {
            assert_eq!(id.as_str().parse::<SolverId>().unwrap(), id);
        }
        assert!("numerov".parse::<SolverId>().is_err());
    }

    #[test]
    fn digits_from_spread() {
        assert_eq!(stable_digits(&[1.0_f64, 1.0], 0.0), 16);
        assert_eq!(stable_digits(&[2.5_f64, 2.5001], 1e-4), 4);
    }
}
