//! Target orbital, direct potentials, local exchange models and the
//! coefficient functions of the coupled F/G system.
//!
//! Everything is in Rydberg energy units and Bohr lengths. The radial
//! equation for the free electron reads
//!
//! ```text
//! F'' + [k² − U_st − U_pol − l(l+1)/r²] F + (exchange) = 0
//! ```
//!
//! where `U_st` and `U_pol` are the physical (attractive, negative)
//! potentials returned by [`static_potential`] and
//! [`polarization_potential`].

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Hydrogenic 1s target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState<T> {
    pub z: T,
    /// 1s energy in Rydberg, `−Z²`.
    pub e10: T,
}

impl<T: Real> TargetState<T> {
    pub fn hydrogen() -> Self {
        Self {
            z: T::one(),
            e10: -T::one(),
        }
    }

    /// `R_10(r) = 2 Z^{3/2} r e^{−Zr}`.
    pub fn orbital(&self, r: T) -> T {
        c::<T>(2.0) * self.z.powf(c(1.5)) * r * (-self.z * r).exp()
    }
}

/// Total two-electron spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Singlet,
    Triplet,
}

impl Spin {
    pub fn from_index(s: u8) -> Result<Self> {
        match s {
            0 => Ok(Spin::Singlet),
            1 => Ok(Spin::Triplet),
            _ => Err(Error::InvalidChannel(format!("spin must be 0 or 1, got {s}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Spin::Singlet => 0,
            Spin::Triplet => 1,
        }
    }

    /// `(−1)^S`.
    pub fn parity<T: Real>(self) -> T {
        match self {
            Spin::Singlet => T::one(),
            Spin::Triplet => -T::one(),
        }
    }
}

/// One scattering channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec<T> {
    pub k: T,
    pub l: u32,
    pub spin: Spin,
    pub z: T,
}

impl<T: Real> ChannelSpec<T> {
    /// Hydrogen (Z = 1) channel; `spin` is 0 or 1.
    pub fn new(k: T, l: u32, spin: u8) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::InvalidChannel(format!("k must be positive, got {k}")));
        }
        Ok(Self {
            k,
            l,
            spin: Spin::from_index(spin)?,
            z: T::one(),
        })
    }

    pub fn energy(&self) -> T {
        self.k * self.k
    }

    pub(crate) fn require_hydrogen(&self) -> Result<()> {
        if self.z != T::one() {
            return Err(Error::InvalidChannel(format!(
                "only Z = 1 is supported, got Z = {}",
                self.z
            )));
        }
        Ok(())
    }
}

fn check_radius<T: Real>(r: T, what: &'static str) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: r.as_f64(),
        })
    }
}

/// Static potential of the hydrogen ground state, `−2(1 + 1/r)e^{−2r}`.
pub fn static_potential<T: Real>(r: T) -> Result<T> {
    check_radius(r, "static potential radius")?;
    Ok(static_unchecked(r))
}

#[inline]
fn static_unchecked<T: Real>(r: T) -> T {
    -c::<T>(2.0) * (T::one() + r.recip()) * (-c::<T>(2.0) * r).exp()
}

/// Radius below which the polarization bracket is summed as a power series.
pub const POLARIZATION_SWITCH: f64 = 1.0;

const POL_POLY: [f64; 6] = [
    1.0,
    2.0,
    2.0,
    4.0 / 3.0,
    2.0 / 3.0,
    4.0 / 27.0,
];

const POL_SERIES_TERMS: usize = 24;

/// Coefficients of `e^{2r} − P(r)` from `r⁵` upward. All are positive, so
/// the bracket `e^{−2r}(e^{2r} − P)` is summed without cancellation.
fn polarization_series() -> [f64; POL_SERIES_TERMS] {
    let mut out = [0.0; POL_SERIES_TERMS];
    out[0] = 16.0 / 135.0;
    let mut term = 4.0 / 15.0;
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        term *= 2.0 / (i + 5) as f64;
        *slot = term;
    }
    out
}

/// Callaway–Temkin polarization potential
/// `−9/(2r⁴)·[1 − e^{−2r}(1 + 2r + 2r² + 4r³/3 + 2r⁴/3 + 4r⁵/27)]`.
pub fn polarization_potential<T: Real>(r: T) -> Result<T> {
    check_radius(r, "polarization potential radius")?;
    Ok(polarization_unchecked(r))
}

fn polarization_unchecked<T: Real>(r: T) -> T {
    let pref = -c::<T>(4.5);
    if r < c(POLARIZATION_SWITCH) {
        // bracket = e^{−2r} r⁵ Σ b_n r^{n−5}
        let coeffs = polarization_series();
        let mut acc = T::zero();
        for &b in coeffs.iter().rev() {
            acc = acc * r + c(b);
        }
        pref * r * acc * (-c::<T>(2.0) * r).exp()
    } else {
        let mut poly = T::zero();
        for &p in POL_POLY.iter().rev() {
            poly = poly * r + c(p);
        }
        let bracket = T::one() - (-c::<T>(2.0) * r).exp() * poly;
        let r2 = r * r;
        pref * bracket / (r2 * r2)
    }
}

/// Direct (static + polarization) potential.
fn direct_unchecked<T: Real>(r: T) -> T {
    static_unchecked(r) + polarization_unchecked(r)
}

/// Local equivalent-exchange model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExchangeModel {
    /// Furness–McCarthy: local kinetic energy includes the direct potential.
    FurnessMcCarthy,
    /// Bransden–Noble style: local kinetic energy is the free value `k²`.
    BransdenNoble,
}

/// Local exchange potential `U_ex(r)` in Rydberg, entering the radial
/// equation like `U_st`.
///
/// The magnitude is `½[√(T² + 32ρ̃) − T]` with `ρ̃ = Z³e^{−2Zr}` and `T` the
/// model's local kinetic energy. The singlet branch is repulsive, the
/// triplet branch attractive.
pub fn local_exchange<T: Real>(r: T, channel: &ChannelSpec<T>, model: ExchangeModel) -> Result<T> {
    check_radius(r, "local exchange radius")?;
    Ok(local_exchange_unchecked(r, channel, model))
}

fn local_exchange_unchecked<T: Real>(r: T, channel: &ChannelSpec<T>, model: ExchangeModel) -> T {
    let z = channel.z;
    let density = z * z * z * (-c::<T>(2.0) * z * r).exp();
    let kinetic = match model {
        ExchangeModel::FurnessMcCarthy => channel.energy() - direct_unchecked(r),
        ExchangeModel::BransdenNoble => channel.energy(),
    };
    let disc = (kinetic * kinetic + c::<T>(32.0) * density).sqrt();
    // ½(√(T²+32ρ̃) − T) without cancellation for T > 0
    let magnitude = if kinetic >= T::zero() {
        c::<T>(16.0) * density / (disc + kinetic)
    } else {
        c::<T>(0.5) * (disc - kinetic)
    };
    channel.spin.parity::<T>() * magnitude
}

/// Coefficient values of `g'' + V g = W` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    /// Row-major `[[V11, V12], [V21, V22]]`.
    pub v: [[T; 2]; 2],
    pub w: [T; 2],
}

impl<T: Real> Coefficients<T> {
    pub fn is_finite(&self) -> bool {
        self.v.iter().flatten().all(|x| x.is_finite()) && self.w.iter().all(|x| x.is_finite())
    }
}

/// A linear 2×2 second-order system `g'' + V(r) g = W(r)`.
pub trait CoupledSystem<T: Real>: Sync {
    fn at(&self, r: T) -> Coefficients<T>;

    /// Weight `w(r)` of the running overlap `∫ w g₁ dr` carried with the
    /// solution. Zero unless the system needs it.
    fn overlap_weight(&self, _r: T) -> T {
        T::zero()
    }
}

/// Closure-backed system, convenient for tests and manufactured problems.
pub struct FnSystem<F>(pub F);

impl<T: Real, F: Fn(T) -> Coefficients<T> + Sync> CoupledSystem<T> for FnSystem<F> {
    fn at(&self, r: T) -> Coefficients<T> {
        (self.0)(r)
    }
}

/// Coefficients of the coupled F/G system for one hydrogen channel.
///
/// ```text
/// V11 = k² − U_st − U_pol − l(l+1)/r²
/// V12 = (−1)^{S+1} R_10 · 2/((2l+1) r)
/// V21 = (2l+1) R_10 / r
/// V22 = −l(l+1)/r²
/// W1  = (−1)^{S+1} R_10,   W2 = 0
/// ```
///
/// With this sign of `V12` the product `V12·V21` equals
/// `(−1)^{S+1}·2R_10²/r²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledCoefficients<T> {
    pub channel: ChannelSpec<T>,
    pub target: TargetState<T>,
    exchange: bool,
}

impl<T: Real> CoupledCoefficients<T> {
    pub fn new(channel: ChannelSpec<T>) -> Result<Self> {
        channel.require_hydrogen()?;
        Ok(Self {
            channel,
            target: TargetState::hydrogen(),
            exchange: true,
        })
    }

    /// Same channel with `V12 = V21 = W1 = 0`.
    pub fn without_exchange(mut self) -> Self {
        self.exchange = false;
        self
    }

    pub fn has_exchange(&self) -> bool {
        self.exchange
    }

    fn centrifugal(&self, r: T) -> T {
        let l = T::from_u32(self.channel.l).unwrap();
        l * (l + T::one()) / (r * r)
    }

    /// `V11` alone; also the single-channel potential beyond the charge cloud.
    pub fn v11(&self, r: T) -> T {
        self.channel.energy() - direct_unchecked(r) - self.centrifugal(r)
    }

    pub fn v12(&self, r: T) -> T {
        if !self.exchange {
            return T::zero();
        }
        let two_l1 = T::from_u32(2 * self.channel.l + 1).unwrap();
        -self.channel.spin.parity::<T>() * self.target.orbital(r) * c::<T>(2.0) / (r * two_l1)
    }

    pub fn v21(&self, r: T) -> T {
        if !self.exchange {
            return T::zero();
        }
        let two_l1 = T::from_u32(2 * self.channel.l + 1).unwrap();
        two_l1 * self.target.orbital(r) / r
    }

    pub fn v22(&self, r: T) -> T {
        -self.centrifugal(r)
    }

    pub fn w1(&self, r: T) -> T {
        if !self.exchange {
            return T::zero();
        }
        -self.channel.spin.parity::<T>() * self.target.orbital(r)
    }

    pub fn w2(&self, _r: T) -> T {
        T::zero()
    }

    /// `k² − E_10`, the factor multiplying the overlap in `A(k)`.
    pub fn exchange_factor(&self) -> T {
        self.channel.energy() - self.target.e10
    }
}

impl<T: Real> CoupledSystem<T> for CoupledCoefficients<T> {
    fn at(&self, r: T) -> Coefficients<T> {
        Coefficients {
            v: [[self.v11(r), self.v12(r)], [self.v21(r), self.v22(r)]],
            w: [self.w1(r), self.w2(r)],
        }
    }

    fn overlap_weight(&self, r: T) -> T {
        self.target.orbital(r)
    }
}

/// Single-channel potential `k² − U_st − U_pol − U_ex − l(l+1)/r²` of a
/// local exchange model (or no exchange at all).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalChannel<T> {
    pub channel: ChannelSpec<T>,
    pub model: Option<ExchangeModel>,
}

impl<T: Real> LocalChannel<T> {
    pub fn new(channel: ChannelSpec<T>, model: Option<ExchangeModel>) -> Result<Self> {
        channel.require_hydrogen()?;
        Ok(Self { channel, model })
    }

    pub fn v(&self, r: T) -> T {
        let l = T::from_u32(self.channel.l).unwrap();
        let ex = match self.model {
            Some(m) => local_exchange_unchecked(r, &self.channel, m),
            None => T::zero(),
        };
        self.channel.energy() - direct_unchecked(r) - ex - l * (l + T::one()) / (r * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn static_at_one_bohr() {
        let v = static_potential(1.0_f64).unwrap();
        assert_relative_eq!(v, -4.0 * (-2.0_f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(v, -0.541341, epsilon = 1e-6);
    }

    #[test]
    fn static_decays_exponentially() {
        assert!(static_potential(40.0_f64).unwrap().abs() < 1e-30);
    }

    #[test]
    fn domain_errors() {
        assert!(static_potential(0.0_f64).is_err());
        assert!(polarization_potential(-1.0_f64).is_err());
        let ch = ChannelSpec::new(0.5_f64, 0, 0).unwrap();
        assert!(local_exchange(0.0, &ch, ExchangeModel::BransdenNoble).is_err());
    }

    #[test]
    fn polarization_reference_values() {
        // 40-digit evaluations of the closed form
        let cases = [
            (1e-4, -0.000053326667047607936508),
            (0.05, -0.02504692487269770514),
            (0.2, -0.082870851337228486632),
            (1.0, -0.14671505588895841074),
            (3.0, -0.034761578962409993229),
            (10.0, -0.00044997863384108187929),
        ];
        for (r, want) in cases {
            let got = polarization_potential(r).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn polarization_branches_agree_at_switch() {
        let r = POLARIZATION_SWITCH;
        let coeffs = polarization_series();
        let mut series = 0.0;
        for &b in coeffs.iter().rev() {
            series = series * r + b;
        }
        series *= -4.5 * r * (-2.0 * r).exp();
        let mut poly = 0.0;
        for &p in POL_POLY.iter().rev() {
            poly = poly * r + p;
        }
        let direct = -4.5 * (1.0 - (-2.0 * r).exp() * poly) / r.powi(4);
        assert!((series - direct).abs() < 1e-14, "{series} vs {direct}");
    }

    #[test]
    fn polarization_far_tail() {
        for r in [25.5_f64, 30.0, 60.0] {
            let v = polarization_potential(r).unwrap();
            assert!((v + 4.5 / r.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn local_exchange_golden_values() {
        let ch = ChannelSpec::new(0.5_f64, 0, 0).unwrap();
        let fm = local_exchange(1.0, &ch, ExchangeModel::FurnessMcCarthy).unwrap();
        let bn = local_exchange(1.0, &ch, ExchangeModel::BransdenNoble).unwrap();
        assert_relative_eq!(fm, 0.67231743575534723237, max_relative = 1e-13);
        assert_relative_eq!(bn, 0.92300155815385195216, max_relative = 1e-13);
        let trip = ChannelSpec::new(0.5_f64, 0, 1).unwrap();
        let fm_t = local_exchange(1.0, &trip, ExchangeModel::FurnessMcCarthy).unwrap();
        assert_relative_eq!(fm_t, -fm, max_relative = 1e-15);
    }

    #[test]
    fn coefficient_spin_placement() {
        let s0 = CoupledCoefficients::new(ChannelSpec::new(0.5_f64, 1, 0).unwrap()).unwrap();
        let s1 = CoupledCoefficients::new(ChannelSpec::new(0.5_f64, 1, 1).unwrap()).unwrap();
        let r = 1.3;
        assert_relative_eq!(s0.v12(r), -s1.v12(r));
        assert_eq!(s0.v21(r), s1.v21(r));
        assert_relative_eq!(s0.w1(r), -s1.w1(r));
        assert_eq!(s0.w2(r), 0.0);
    }

    #[test]
    fn s_wave_has_no_g_centrifugal_term() {
        let cc = CoupledCoefficients::new(ChannelSpec::new(0.7_f64, 0, 1).unwrap()).unwrap();
        for r in [1e-3, 0.5, 10.0] {
            assert_eq!(cc.v22(r), 0.0);
        }
    }

    #[test]
    fn v11_tends_to_energy() {
        let cc = CoupledCoefficients::new(ChannelSpec::new(0.7_f64, 2, 0).unwrap()).unwrap();
        assert!((cc.v11(1e4) - 0.49).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_channels() {
        assert!(ChannelSpec::new(0.0_f64, 0, 0).is_err());
        assert!(ChannelSpec::new(0.5_f64, 0, 2).is_err());
        let mut ch = ChannelSpec::new(0.5_f64, 0, 0).unwrap();
        ch.z = 2.0;
        assert!(CoupledCoefficients::new(ch).is_err());
    }
}
