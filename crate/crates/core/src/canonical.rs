//! Canonical-function solution of the coupled F/G system.
//!
//! Starting at an arbitrary radius `r0`, the homogeneous system is solved
//! for two matrix solutions with Kronecker initial data,
//!
//! ```text
//! α(r0) = I, α'(r0) = 0,     β(r0) = 0, β'(r0) = I,
//! ```
//!
//! and the inhomogeneous system for `σ` with `σ(r0) = σ'(r0) = 0`, both
//! inward and outward. Regularity at the origin fixes `Λ` and `λ` in
//!
//! ```text
//! φ = α + βΛ,    γ = βλ + σ,
//! ```
//!
//! the exchange constant follows from overlaps of `φ` and `γ` with the 1s
//! orbital, and the ratio `D = f2(r0)/f1(r0)` from the requirement that
//! `G` does not grow at large `r`.

use crate::error::{EpsilonStep, Error, Result};
use crate::grid::{RadialGrid, R_CUT};
use crate::linalg::Mat2;
use crate::ode::{integrate_pair_at, IntegratorOptions};
use crate::phaseshift::{extract_phase, relative_spread, FarFieldOptions, PhaseShiftResult};
use crate::potentials::{ChannelSpec, CoupledCoefficients};
use crate::scalar::{c, Real};

/// Radii at which the origin limit is evaluated.
pub const DEFAULT_EPSILONS: [f64; 7] = [1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4];

/// How regularity at the origin is imposed at each `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginCondition {
    /// `φ'(ε) = L(ε) φ(ε)` with `L` the logarithmic derivative of the
    /// regular Frobenius solution `r^{l+1}(1 + c₁r)` of each diagonal
    /// equation. Converges like `ε^{2l+3}`.
    RegularLogDerivative,
    /// `φ(ε) = 0`, i.e. `Λ(ε) = −β(ε)⁻¹α(ε)`. Converges only like `ε` for
    /// an s wave.
    Vanishing,
}

/// How the growing part of `G` is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCondition {
    /// Project out the `r^{l+1}` coefficient of `G` beyond the charge cloud.
    NoGrowth,
    /// Require `f2(r) = 0` at each radius (ratio of the values themselves).
    VanishingValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalOptions<T> {
    pub r0: T,
    pub epsilons: Vec<T>,
    pub origin: OriginCondition,
    /// Accepted max-norm change between the last two `ε` estimates,
    /// relative to `max(1, |Λ|)`.
    pub origin_tol: T,
    pub growth: GrowthCondition,
    /// Radius where overlaps are truncated and `D` is read off.
    pub r_cut: T,
    /// Trailing window (points) ending at `r_cut` for the `D` plateau.
    pub d_window: usize,
    pub d_tol: T,
    pub exchange: bool,
    pub integrator: IntegratorOptions<T>,
    /// Far-field continuation; `None` uses the defaults.
    pub far: Option<FarFieldOptions<T>>,
}

impl<T: Real> Default for CanonicalOptions<T> {
    fn default() -> Self {
        Self {
            r0: T::one(),
            epsilons: DEFAULT_EPSILONS.iter().map(|&e| c(e)).collect(),
            origin: OriginCondition::RegularLogDerivative,
            origin_tol: c(1e-9),
            growth: GrowthCondition::NoGrowth,
            r_cut: c(R_CUT),
            d_window: 50,
            d_tol: c(1e-8),
            exchange: true,
            integrator: IntegratorOptions::default(),
            far: None,
        }
    }
}

/// One canonical solution sampled on the basis radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Column<T> {
    /// `(g1, g1', g2, g2')`.
    pub y: Vec<[T; 4]>,
    /// `∫_{r0}^{r} R_10 g1`.
    pub overlap: Vec<T>,
}

impl<T: Real> Column<T> {
    fn combine(parts: &[(T, &Column<T>)]) -> Column<T> {
        let n = parts[0].1.y.len();
        let mut y = vec![[T::zero(); 4]; n];
        let mut overlap = vec![T::zero(); n];
        for (a, col) in parts {
            for i in 0..n {
                for q in 0..4 {
                    y[i][q] = y[i][q] + *a * col.y[i][q];
                }
                overlap[i] = overlap[i] + *a * col.overlap[i];
            }
        }
        Column { y, overlap }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBasis<T> {
    pub channel: ChannelSpec<T>,
    pub coefficients: CoupledCoefficients<T>,
    pub r0: T,
    /// Ascending sample radii: inward points, `r0`, then outward mesh points.
    pub r: Vec<T>,
    /// Index of `r0` in `r`.
    pub i0: usize,
    pub alpha: [Column<T>; 2],
    pub beta: [Column<T>; 2],
    pub sigma: Column<T>,
}

impl<T: Real> CanonicalBasis<T> {
    /// Index of the sample equal to `r` (relative tolerance 1e−9).
    pub fn index_of(&self, r: T) -> Option<usize> {
        let tol = r.abs() * c(1e-9);
        let i = self.r.partition_point(|&x| x < r - tol);
        (i < self.r.len() && (self.r[i] - r).abs() <= tol).then_some(i)
    }

    /// `(M, M')` with `M_ij = g_i` of column `j`.
    fn matrices(cols: &[Column<T>; 2], i: usize) -> (Mat2<T>, Mat2<T>) {
        let a = cols[0].y[i];
        let b = cols[1].y[i];
        (
            Mat2::from_rows([[a[0], b[0]], [a[2], b[2]]]),
            Mat2::from_rows([[a[1], b[1]], [a[3], b[3]]]),
        )
    }
}

fn merge_descending<T: Real>(mut xs: Vec<T>) -> Vec<T> {
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() <= b.abs() * c(1e-9));
    xs
}

/// Integrates the five canonical solutions inward and outward from `r0`.
pub fn build_basis<T: Real>(
    coefficients: &CoupledCoefficients<T>,
    grid: &RadialGrid<T>,
    r0: T,
    epsilons: &[T],
    opts: &IntegratorOptions<T>,
) -> Result<CanonicalBasis<T>> {
    let eps_max = epsilons.iter().fold(grid.r_min(), |m, &e| m.max(e));
    if !(r0 > eps_max && r0 < grid.r_max()) {
        return Err(Error::Domain {
            what: "canonical start radius",
            value: r0.as_f64(),
        });
    }
    let tol = grid.h() * c(1e-9);
    let mut inner: Vec<T> = grid
        .points()
        .iter()
        .copied()
        .filter(|&p| p < r0 - tol)
        .collect();
    inner.extend(epsilons.iter().copied());
    inner.push(grid.r_min());
    let inner = merge_descending(inner);
    let outer: Vec<T> = grid
        .points()
        .iter()
        .copied()
        .filter(|&p| p > r0 + tol)
        .collect();

    let z = T::zero();
    let o = T::one();
    let starts: [([T; 4], bool); 5] = [
        ([o, z, z, z], false),
        ([z, z, o, z], false),
        ([z, o, z, z], false),
        ([z, z, z, o], false),
        ([z, z, z, z], true),
    ];
    let mut columns = Vec::with_capacity(5);
    for (y0, inhomogeneous) in starts {
        let inward = integrate_pair_at(coefficients, inhomogeneous, y0, r0, &inner, opts)?;
        let outward = integrate_pair_at(coefficients, inhomogeneous, y0, r0, &outer, opts)?;
        let n = inner.len() + 1 + outer.len();
        let mut y = Vec::with_capacity(n);
        let mut overlap = Vec::with_capacity(n);
        for i in (0..inner.len()).rev() {
            y.push(inward.y[i]);
            overlap.push(inward.overlap[i]);
        }
        y.push(y0);
        overlap.push(T::zero());
        y.extend(outward.y.iter().copied());
        overlap.extend(outward.overlap.iter().copied());
        columns.push(Column { y, overlap });
    }
    let mut r: Vec<T> = inner.iter().rev().copied().collect();
    let i0 = r.len();
    r.push(r0);
    r.extend(outer.iter().copied());

    let mut it = columns.into_iter();
    let a0 = it.next().unwrap();
    let a1 = it.next().unwrap();
    let b0 = it.next().unwrap();
    let b1 = it.next().unwrap();
    let s = it.next().unwrap();
    Ok(CanonicalBasis {
        channel: coefficients.channel,
        coefficients: *coefficients,
        r0,
        r,
        i0,
        alpha: [a0, a1],
        beta: [b0, b1],
        sigma: s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OriginLimits<T> {
    pub lambda: Mat2<T>,
    pub lambda_vec: [T; 2],
    pub epsilon_trace: Vec<EpsilonStep>,
}

/// Logarithmic derivative of the regular solution of equation `i` at `ε`.
fn regular_log_derivative<T: Real>(cc: &CoupledCoefficients<T>, i: usize, eps: T) -> T {
    let l = T::from_u32(cc.channel.l).unwrap();
    let cent = l * (l + T::one()) / (eps * eps);
    let vii = if i == 0 { cc.v11(eps) } else { cc.v22(eps) };
    let q = eps * (vii + cent);
    let c1 = -q / (c::<T>(2.0) * (l + T::one()));
    (l + T::one()) / eps + c1 / (T::one() + c1 * eps)
}

/// Evaluates `Λ(ε)`, `λ(ε)` on the sequence and accepts the last estimate
/// once consecutive estimates agree.
pub fn origin_limits<T: Real>(
    basis: &CanonicalBasis<T>,
    epsilons: &[T],
    condition: OriginCondition,
    tol: T,
) -> Result<OriginLimits<T>> {
    let mut trace = Vec::with_capacity(epsilons.len());
    let mut prev: Option<(Mat2<T>, [T; 2])> = None;
    let mut last_change = T::infinity();
    for &eps in epsilons {
        let i = basis.index_of(eps).ok_or(Error::Domain {
            what: "epsilon not sampled by the basis",
            value: eps.as_f64(),
        })?;
        let (a, ap) = CanonicalBasis::matrices(&basis.alpha, i);
        let (b, bp) = CanonicalBasis::matrices(&basis.beta, i);
        let s = basis.sigma.y[i];
        let (sv, sp) = ([s[0], s[2]], [s[1], s[3]]);
        let (m, rhs_a, rhs_s) = match condition {
            OriginCondition::Vanishing => (b, a, sv),
            OriginCondition::RegularLogDerivative => {
                let l = [
                    regular_log_derivative(&basis.coefficients, 0, eps),
                    regular_log_derivative(&basis.coefficients, 1, eps),
                ];
                let mut m = bp;
                let mut ra = ap;
                let mut rs = sp;
                for row in 0..2 {
                    for col in 0..2 {
                        m.m[row][col] = m.m[row][col] - l[row] * b.m[row][col];
                        ra.m[row][col] = ra.m[row][col] - l[row] * a.m[row][col];
                    }
                    rs[row] = rs[row] - l[row] * sv[row];
                }
                (m, ra, rs)
            }
        };
        let inv = m.inverse().ok_or(Error::SingularBeta {
            epsilon: eps.as_f64(),
        })?;
        let lam = inv.mul(&rhs_a).scale(-T::one());
        let lv = inv.mul_vec(rhs_s);
        let lv = [-lv[0], -lv[1]];
        let change = match prev {
            Some((pl, pv)) => {
                let d = lam
                    .sub(&pl)
                    .max_abs()
                    .max((lv[0] - pv[0]).abs())
                    .max((lv[1] - pv[1]).abs());
                let scale = T::one()
                    .max(lam.max_abs())
                    .max(lv[0].abs())
                    .max(lv[1].abs());
                d / scale
            }
            None => T::infinity(),
        };
        last_change = change;
        trace.push(EpsilonStep {
            epsilon: eps.as_f64(),
            matrix: [
                lam.m[0][0].as_f64(),
                lam.m[0][1].as_f64(),
                lam.m[1][0].as_f64(),
                lam.m[1][1].as_f64(),
            ],
            vector: [lv[0].as_f64(), lv[1].as_f64()],
            change: change.as_f64(),
        });
        prev = Some((lam, lv));
    }
    match prev {
        Some((lambda, lambda_vec)) if last_change <= tol => Ok(OriginLimits {
            lambda,
            lambda_vec,
            epsilon_trace: trace,
        }),
        _ => Err(Error::NoConvergence {
            trace,
            last_change: last_change.as_f64(),
        }),
    }
}

/// `φ` columns and `γ` sampled on the basis radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularBasis<T> {
    pub phi: [Column<T>; 2],
    pub gamma: Column<T>,
}

pub fn regular_basis<T: Real>(basis: &CanonicalBasis<T>, limits: &OriginLimits<T>) -> RegularBasis<T> {
    let lam = limits.lambda.m;
    let phi0 = Column::combine(&[
        (T::one(), &basis.alpha[0]),
        (lam[0][0], &basis.beta[0]),
        (lam[1][0], &basis.beta[1]),
    ]);
    let phi1 = Column::combine(&[
        (T::one(), &basis.alpha[1]),
        (lam[0][1], &basis.beta[0]),
        (lam[1][1], &basis.beta[1]),
    ]);
    let gamma = Column::combine(&[
        (limits.lambda_vec[0], &basis.beta[0]),
        (limits.lambda_vec[1], &basis.beta[1]),
        (T::one(), &basis.sigma),
    ]);
    RegularBasis {
        phi: [phi0, phi1],
        gamma,
    }
}

/// Overlaps `I1`, `I2`, `J` and the coefficients `A1`, `A2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeConstant<T> {
    pub i1: T,
    pub i2: T,
    pub j: T,
    pub a1: T,
    pub a2: T,
}

/// `A1 = K I1/(1 − K J)`, `A2 = K I2/(1 − K J)` with `K = k² − E_10`;
/// both vanish for `l > 0` or without exchange.
pub fn exchange_constant<T: Real>(
    basis: &CanonicalBasis<T>,
    regular: &RegularBasis<T>,
    i_cut: usize,
) -> Result<ExchangeConstant<T>> {
    let lo = 0;
    let integral = |col: &Column<T>| col.overlap[i_cut] - col.overlap[lo];
    let i1 = integral(&regular.phi[0]);
    let i2 = integral(&regular.phi[1]);
    let j = integral(&regular.gamma);
    if basis.channel.l != 0 || !basis.coefficients.has_exchange() {
        return Ok(ExchangeConstant {
            i1,
            i2,
            j,
            a1: T::zero(),
            a2: T::zero(),
        });
    }
    let kk = basis.coefficients.exchange_factor();
    let den = T::one() - kk * j;
    if den.abs() < c(1e-10) {
        return Err(Error::Resonance {
            denominator: den.as_f64(),
        });
    }
    Ok(ExchangeConstant {
        i1,
        i2,
        j,
        a1: kk * i1 / den,
        a2: kk * i2 / den,
    })
}

/// Growing-mode coefficient of `G` beyond the charge cloud:
/// `G = a r^{−l} + b r^{l+1}` gives `b = (rG' + lG)/((2l+1) r^{l+1})`.
fn growth_coefficient<T: Real>(l: u32, r: T, g: T, gp: T) -> T {
    let lf = T::from_u32(l).unwrap();
    (r * gp + lf * g) / ((c::<T>(2.0) * lf + T::one()) * r.powi(l as i32 + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRatio<T> {
    pub d_inf: T,
    /// `(r, D(r))` over the plateau window.
    pub trace: Vec<(T, T)>,
    pub spread: T,
}

/// `D(r) = −[g21 + A1 γ2]/[g22 + A2 γ2]` over the trailing window ending
/// at `i_cut`, where `g` is the growth coefficient (or the value itself).
pub fn asymptotic_ratio<T: Real>(
    basis: &CanonicalBasis<T>,
    regular: &RegularBasis<T>,
    ex: &ExchangeConstant<T>,
    i_cut: usize,
    window: usize,
    tol: T,
    growth: GrowthCondition,
) -> Result<AsymptoticRatio<T>> {
    let l = basis.channel.l;
    let start = i_cut.saturating_sub(window.saturating_sub(1)).max(basis.i0 + 1);
    let mut trace = Vec::new();
    for i in start..=i_cut {
        let r = basis.r[i];
        let measure = |col: &Column<T>| {
            let y = col.y[i];
            match growth {
                GrowthCondition::NoGrowth => growth_coefficient(l, r, y[2], y[3]),
                GrowthCondition::VanishingValue => y[2],
            }
        };
        let p1 = measure(&regular.phi[0]);
        let p2 = measure(&regular.phi[1]);
        let g = measure(&regular.gamma);
        let den = p2 + ex.a2 * g;
        if den == T::zero() {
            return Err(Error::ZeroDenominator { r: r.as_f64() });
        }
        trace.push((r, -(p1 + ex.a1 * g) / den));
    }
    let values: Vec<T> = trace.iter().map(|&(_, d)| d).collect();
    let spread = relative_spread(&values);
    let d_inf = *values.last().ok_or(Error::NoPlateau {
        what: "D(r)",
        spread: f64::NAN,
        r_end: basis.r[i_cut].as_f64(),
    })?;
    if !(spread < tol) {
        return Err(Error::NoPlateau {
            what: "D(r)",
            spread: spread.as_f64(),
            r_end: basis.r[i_cut].as_f64(),
        });
    }
    Ok(AsymptoticRatio {
        d_inf,
        trace,
        spread,
    })
}

/// The assembled pair `(f1, f1', f2, f2')` on the basis radii.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSolution<T> {
    pub channel: ChannelSpec<T>,
    pub r: Vec<T>,
    pub y: Vec<[T; 4]>,
    pub r0: T,
    /// `f1(r0)`.
    pub scale: T,
    pub a1: T,
    pub a2: T,
    pub d_inf: T,
    /// Exchange constant `A(k)` of the scaled solution.
    pub a_k: T,
    pub limits: OriginLimits<T>,
    pub exchange: ExchangeConstant<T>,
    pub ratio: AsymptoticRatio<T>,
    /// Index of the overlap cut-off radius in `r`.
    pub i_cut: usize,
}

impl<T: Real> PhysicalSolution<T> {
    pub fn f1(&self) -> Vec<T> {
        self.y.iter().map(|s| s[0]).collect()
    }
    pub fn f1_prime(&self) -> Vec<T> {
        self.y.iter().map(|s| s[1]).collect()
    }
    pub fn f2(&self) -> Vec<T> {
        self.y.iter().map(|s| s[2]).collect()
    }

    /// Multiplies the whole solution (and `A(k)`) by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for s in out.y.iter_mut() {
            for v in s.iter_mut() {
                *v = *v * factor;
            }
        }
        out.scale = out.scale * factor;
        out.a_k = out.a_k * factor;
        out
    }
}

/// `f = scale·{[φ_1 + A1 γ] + D[φ_2 + A2 γ]}` for both rows.
pub fn assemble_f1<T: Real>(
    basis: &CanonicalBasis<T>,
    regular: &RegularBasis<T>,
    limits: OriginLimits<T>,
    exchange: ExchangeConstant<T>,
    ratio: AsymptoticRatio<T>,
    scale: T,
    i_cut: usize,
) -> PhysicalSolution<T> {
    let d = ratio.d_inf;
    let col = Column::combine(&[
        (scale, &regular.phi[0]),
        (scale * d, &regular.phi[1]),
        (scale * (exchange.a1 + d * exchange.a2), &regular.gamma),
    ]);
    PhysicalSolution {
        channel: basis.channel,
        r: basis.r.clone(),
        y: col.y,
        r0: basis.r0,
        scale,
        a1: exchange.a1,
        a2: exchange.a2,
        d_inf: d,
        a_k: scale * (exchange.a1 + d * exchange.a2),
        limits,
        exchange,
        ratio,
        i_cut,
    }
}

/// Runs the full canonical pipeline for one channel and grid.
pub fn solve_physical<T: Real>(
    channel: &ChannelSpec<T>,
    grid: &RadialGrid<T>,
    opts: &CanonicalOptions<T>,
) -> Result<PhysicalSolution<T>> {
    let mut cc = CoupledCoefficients::new(*channel)?;
    if !opts.exchange {
        cc = cc.without_exchange();
    }
    let basis = build_basis(&cc, grid, opts.r0, &opts.epsilons, &opts.integrator)?;
    let limits = origin_limits(&basis, &opts.epsilons, opts.origin, opts.origin_tol)?;
    let regular = regular_basis(&basis, &limits);
    let r_cut = opts.r_cut.min(grid.r_max());
    let i_cut = basis
        .r
        .partition_point(|&x| x <= r_cut + grid.h() * c(1e-9))
        .saturating_sub(1);
    let ex = exchange_constant(&basis, &regular, i_cut)?;
    let ratio = asymptotic_ratio(
        &basis,
        &regular,
        &ex,
        i_cut,
        opts.d_window,
        opts.d_tol,
        opts.growth,
    )?;
    Ok(assemble_f1(&basis, &regular, limits, ex, ratio, T::one(), i_cut))
}

/// Solution plus phase shift.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalOutput<T> {
    pub solution: PhysicalSolution<T>,
    pub phase: PhaseShiftResult<T>,
}

/// The canonical-function solver.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSolver<T> {
    pub grid: RadialGrid<T>,
    pub options: CanonicalOptions<T>,
}

impl<T: Real> CanonicalSolver<T> {
    pub fn new(grid: RadialGrid<T>, options: CanonicalOptions<T>) -> Self {
        Self { grid, options }
    }

    /// Standard mesh with base step `h` and default options.
    pub fn with_step(h: T) -> Result<Self> {
        Ok(Self::new(RadialGrid::standard(h)?, CanonicalOptions::default()))
    }

    pub fn far_options(&self) -> FarFieldOptions<T> {
        self.options.far.unwrap_or_default()
    }

    pub fn solve(&self, channel: &ChannelSpec<T>) -> Result<CanonicalOutput<T>> {
        let solution = solve_physical(channel, &self.grid, &self.options)?;
        let phase = self.phase_of(&solution)?;
        Ok(CanonicalOutput { solution, phase })
    }

    /// Phase shift of an assembled solution.
    pub fn phase_of(&self, solution: &PhysicalSolution<T>) -> Result<PhaseShiftResult<T>> {
        let mut cc = CoupledCoefficients::new(solution.channel)?;
        if !self.options.exchange {
            cc = cc.without_exchange();
        }
        let f = solution.f1();
        let fp = solution.f1_prime();
        extract_phase(
            &solution.r,
            &f,
            &fp,
            |r| cc.v11(r),
            &solution.channel,
            &self.far_options(),
        )
    }
}

/// Rescales a solution to the `√(2/π)` asymptotic amplitude.
pub fn normalize<T: Real>(solution: &PhysicalSolution<T>, result: &PhaseShiftResult<T>) -> PhysicalSolution<T> {
    solution.scaled(result.a_norm)
}
