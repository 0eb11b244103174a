//! Sampling of the marked Poisson reference process and of the
//! finite-volume Gibbs measures by Metropolis–Hastings.

mod dlr;
mod fkg;
mod mcmc;
mod poisson;
mod seeds;

pub use dlr::{dlr_consistency_check, DlrOptions, DlrReport, DlrStat};
pub use fkg::{
    fkg_temperedness_check, tempered_band_probability, tempered_band_exponent, tempered_band_probability_with, FkgReport,
    FkgRow,
};
pub use mcmc::{AcceptanceStats, ChainState, GibbsSampler, MoveMix, Schedule};
pub use poisson::{nonempty_poisson_count, poisson_count, sample_marked_count, sample_marked_poisson, sample_poisson, uniform_in};
pub use seeds::{derive_seed, rng_for, splitmix64};
