//! Grand-canonical simulation of the Asakura–Oosawa Gibbs point process:
//! hardcore spheres with random radii plus a depletion (area) interaction.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: marked points, configurations with a grid index, windows,
//!   mark laws and counting functionals;
//! * [`geometry`]: ball volumes, lenses, k-wise intersections and unions of
//!   balls, exact in one and two dimensions and by seeded quadrature otherwise;
//! * [`hamiltonian`]: hardcore veto, area energy under free, periodic and
//!   fixed boundary conditions, k-body expansion and incremental deltas;
//! * [`sampling`]: marked Poisson sampling and a birth/death/translate/resize
//!   Metropolis–Hastings chain targeting the finite-volume Gibbs measure;
//! * [`estimators`]: pressure, energy density, Palm identities, temperedness
//!   statistics and related diagnostics.
//!
//! Kernels are generic over [`Scalar`] (`f32` or `f64`); the statistical
//! estimators work in `f64`. The aliases below fix the scalar to `f64`.

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod hamiltonian;
pub mod model;
pub mod sampling;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type MarkedPoint = model::MarkedPoint<f64>;
pub type Configuration = model::Configuration<f64>;
pub type Window = model::Window<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type MarkLaw = model::MarkLaw<f64>;
pub type Estimate = model::Estimate<f64>;
pub type Ball = geometry::Ball<f64>;
pub type QuadratureSpec = geometry::QuadratureSpec<f64>;
pub type BoundaryCondition = hamiltonian::BoundaryCondition<f64>;
pub type EnergyModel = hamiltonian::EnergyModel<f64>;
pub type EnergyValue = hamiltonian::EnergyValue<f64>;
pub type GibbsSampler = sampling::GibbsSampler<f64>;

pub type ConfigurationF32 = model::Configuration<f32>;
pub type WindowF32 = model::Window<f32>;
pub type ModelParamsF32 = model::ModelParams<f32>;
pub type EnergyModelF32 = hamiltonian::EnergyModel<f32>;
