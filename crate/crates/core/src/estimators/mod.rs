//! Finite-volume estimators: pressure, energy density, temperedness tails,
//! Poisson relative entropy and the energy discontinuity example.

mod discontinuity;
mod entropy;
mod palm;
mod pressure;
mod sector;
mod tempered;

pub use discontinuity::{discontinuity_demo, DiscontinuityRow};
pub use entropy::{poisson_relative_entropy, relative_entropy_mc};
pub use palm::{
    box_overlap_weight, energy_density_curve, finite_palm_summand, palm_density, palm_energy_identity_check,
    DensityOptions, DensityRow, PalmCheck,
};
pub use pressure::{
    energy_integral, mean_energy, partition_direct, pressure_bc_comparison, pressure_thermo_integration, sampled_boundary,
    BcComparisonOptions, BcComparisonRow, IntegrationOptions, PressureEstimate, PressureMethod,
};
pub use tempered::{adaptive_simpson, integrated_tail, temperedness_tail_stats, TailRow};
pub use sector::{sector_count_law, sector_partition, sector_weights};
