use crate::error::{Error, Result};
use crate::model::{restrict_complement, Configuration, ModelParams, TemperedEnvelope, Window};
use crate::Scalar;

/// Boundary condition of a conditional energy.
#[derive(Debug, Clone)]
pub enum BoundaryCondition<S> {
    /// Empty exterior.
    Free,
    /// Torus identification of the window.
    Periodic,
    /// Exterior configuration `ζ_{Λ^c}`.
    Fixed(Configuration<S>),
}

impl<S: Scalar> PartialEq for BoundaryCondition<S> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Free, Self::Free) | (Self::Periodic, Self::Periodic) => true,
            (Self::Fixed(a), Self::Fixed(b)) => a == b,
            _ => false,
        }
    }
}

impl<S: Scalar> BoundaryCondition<S> {
    /// Loads an exterior configuration: keeps the points of `ζ` outside the
    /// window that can interact with some point inside it, and rejects `ζ`
    /// if a kept point breaks the growth bound `R <= g(n)` at its scale.
    pub fn fixed(zeta: &Configuration<S>, window: &Window<S>, params: &ModelParams<S>) -> Result<Self> {
        let window = window.euclidean();
        let reach = params.mark_law.sup() + S::of(2.0) * params.r;
        let outside = restrict_complement(zeta, &window);
        let mut kept = Configuration::with_cell(zeta.dim(), outside.base_cell());
        for p in outside.iter() {
            if window.distance_to(&p.x) <= p.radius + reach {
                kept.insert(*p)?;
            }
        }
        let envelope =
            TemperedEnvelope::with_default_gamma(params.d, params.mark_law.delta.f64())?;
        let origin = Window::new(params.d, window.center(), S::one(), false)?;
        let k = window.side().f64().ceil() as usize;
        if let Some((i, scale, bound)) = envelope.first_violation(&kept, &origin, k) {
            return Err(Error::NotTempered {
                radius: kept.points()[i].radius.f64(),
                scale: scale as f64,
                bound,
            });
        }
        Ok(BoundaryCondition::Fixed(kept))
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Free => "free",
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Fixed(_) => "fixed",
        }
    }

    pub fn outer(&self) -> Option<&Configuration<S>> {
        match self {
            BoundaryCondition::Fixed(z) => Some(z),
            _ => None,
        }
    }
}
