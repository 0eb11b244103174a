use super::marks::MarkLaw;
use super::point::check_dim;
use crate::error::{invalid, Result};
use crate::Scalar;

/// Activity, inverse temperature, polymer radius, dimension and mark law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<S> {
    pub d: usize,
    pub z: S,
    pub beta: S,
    pub r: S,
    pub mark_law: MarkLaw<S>,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(d: usize, z: S, beta: S, r: S, mark_law: MarkLaw<S>) -> Result<Self> {
        let p = Self {
            d,
            z,
            beta,
            r,
            mark_law,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.d)?;
        let pos = |v: S| v.is_finite() && v > S::zero();
        if !pos(self.z) {
            return Err(invalid("z", "activity must be positive"));
        }
        if !pos(self.beta) {
            return Err(invalid("beta", "inverse temperature must be positive"));
        }
        if !pos(self.r) {
            return Err(invalid("r", "polymer radius must be positive"));
        }
        Ok(())
    }

    pub fn with_beta(mut self, beta: S) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_z(mut self, z: S) -> Self {
        self.z = z;
        self
    }

    /// Largest enlarged radius any point can carry.
    pub fn reach(&self) -> S {
        self.mark_law.sup() + self.r
    }
}
