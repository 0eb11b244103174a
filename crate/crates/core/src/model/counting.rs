use std::ops::RangeBounds;

use super::configuration::Configuration;
use super::point::{add, sub, MarkedPoint, Position};
use super::window::Window;
use crate::Scalar;

/// Weight applied per point by [`count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    /// `ψ(R) = 1 + R^d`.
    Psi,
}

/// `N^f_{Λ,A}(ω)`: weighted count of points in `window × marks`.
pub fn count<S: Scalar>(
    config: &Configuration<S>,
    window: &Window<S>,
    marks: impl RangeBounds<S>,
    weight: Weight,
) -> S {
    let d = config.dim() as i32;
    config
        .iter()
        .filter(|p| window.contains(&p.x) && marks.contains(&p.radius))
        .map(|p| match weight {
            Weight::One => S::one(),
            Weight::Psi => S::one() + p.radius.powi(d),
        })
        .sum()
}

/// `ω_Λ`.
pub fn restrict<S: Scalar>(config: &Configuration<S>, window: &Window<S>) -> Configuration<S> {
    select(config, |p| window.contains(&p.x))
}

/// `ω_{Λ^c}`.
pub fn restrict_complement<S: Scalar>(
    config: &Configuration<S>,
    window: &Window<S>,
) -> Configuration<S> {
    select(config, |p| !window.contains(&p.x))
}

fn select<S: Scalar>(
    config: &Configuration<S>,
    keep: impl Fn(&MarkedPoint<S>) -> bool,
) -> Configuration<S> {
    let mut out = Configuration::with_cell(config.dim(), config.base_cell());
    for p in config.iter().filter(|p| keep(p)) {
        out.insert(*p).expect("subset of a simple configuration is simple");
    }
    out
}

/// `ω_Λ ζ_{Λ^c}`.
pub fn concatenate<S: Scalar>(
    inner: &Configuration<S>,
    window: &Window<S>,
    outer: &Configuration<S>,
) -> Configuration<S> {
    let mut out = restrict(inner, window);
    for p in outer.iter().filter(|p| !window.contains(&p.x)) {
        out.insert(*p).expect("disjoint domains keep the union simple");
    }
    out
}

/// `θ_x ω`: every position translated by `-x`.
pub fn shift<S: Scalar>(config: &Configuration<S>, x: &Position<S>) -> Configuration<S> {
    let mut out = Configuration::with_cell(config.dim(), config.base_cell());
    for p in config.iter() {
        let _ = out.insert(MarkedPoint::at(sub(&p.x, x), p.radius));
    }
    out
}

/// Translate of a window, `Λ + x`.
pub fn shift_window<S: Scalar>(window: &Window<S>, x: &Position<S>) -> Window<S> {
    Window::new(
        window.dim(),
        add(&window.center(), x),
        window.side(),
        window.is_torus(),
    )
    .expect("translation keeps a valid window")
}
