//! Hardcore veto, area energy under free, periodic and fixed boundary
//! conditions, incremental deltas for local moves, the k-body expansion and
//! the x-wise weighted decomposition of the area energy.

mod boundary;
mod energy;
mod expansion;

pub use boundary::BoundaryCondition;
pub use energy::{EnergyModel, EnergyValue};
pub use expansion::{
    kbody_expansion, xwise_neighbours, xwise_palm_summand, xwise_summand, KBODY_MAX_POINTS,
};
