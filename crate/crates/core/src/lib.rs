//! Continuum wavefunctions and phase shifts for electron–hydrogen
//! scattering with exact non-local exchange, computed with canonical
//! functions, plus Numerov and local-exchange baselines.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.
//!
//! ```no_run
//! use cfwave::{ChannelSpec, CanonicalSolver};
//!
//! let solver = CanonicalSolver::with_step(0.006).unwrap();
//! let channel = ChannelSpec::new(0.5, 1, 1).unwrap();
//! let out = solver.solve(&channel).unwrap();
//! println!("delta = {:.6}", out.phase.delta);
//! ```

pub mod baselines;
pub mod canonical;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod ode;
pub mod phaseshift;
pub mod potentials;
pub mod quadrature;
pub mod reference;
pub mod scalar;
pub mod special;

pub use baselines::{
    solve_local_exchange, solve_mcdmm, steplength_sensitivity, BaselineOptions, SensitivityReport,
    SolverId,
};
pub use canonical::{CanonicalOptions, GrowthCondition, OriginCondition};
pub use error::{EpsilonStep, Error, Result};
pub use potentials::{ExchangeModel, Spin};
pub use scalar::Real;

pub type ChannelSpec = potentials::ChannelSpec<f64>;
pub type RadialGrid = grid::RadialGrid<f64>;
pub type CoupledCoefficients = potentials::CoupledCoefficients<f64>;
pub type RiccatiPair = special::RiccatiPair<f64>;
pub type CanonicalBasis = canonical::CanonicalBasis<f64>;
pub type OriginLimits = canonical::OriginLimits<f64>;
pub type PhysicalSolution = canonical::PhysicalSolution<f64>;
pub type PhaseShiftResult = phaseshift::PhaseShiftResult<f64>;
pub type CanonicalSolver = canonical::CanonicalSolver<f64>;
pub type CanonicalOutput = canonical::CanonicalOutput<f64>;
pub type SampledSolution = ode::SampledSolution<f64>;
