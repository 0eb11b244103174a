//! Domain types: marked points, configurations, windows, parameters, mark
//! laws and counting functionals.

mod configuration;
mod counting;
mod estimate;
mod marks;
mod params;
mod periodic;
mod point;
mod tempered;
mod window;

pub use configuration::Configuration;
pub use counting::{concatenate, count, restrict, restrict_complement, shift, shift_window, Weight};
pub use estimate::Estimate;
pub use marks::{MarkKind, MarkLaw};
pub use params::ModelParams;
pub use periodic::{periodize, shifts_meeting, translate, PeriodicView};
pub use point::{add, dist, norm2, position, sub, MarkedPoint, Position};
pub use tempered::TemperedEnvelope;
pub use window::Window;
