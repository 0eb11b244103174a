use rand::Rng;

use crate::error::{invalid, Result};
use crate::Scalar;

/// Family of the radius distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkKind<S> {
    Dirac { r0: S },
    Uniform { a: S, b: S },
    /// Weibull law with survival `exp(-(t/scale)^shape)` conditioned on
    /// `R <= cutoff`.
    TruncatedWeibull { scale: S, shape: S, cutoff: S },
}

/// Radius law `ℛ` together with the exponent `δ > 0` for which
/// `∫ exp(r^{d+δ}) ℛ(dr) < ∞` is asserted. All supported laws have bounded
/// support, so any positive `δ` is admissible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkLaw<S> {
    pub kind: MarkKind<S>,
    pub delta: S,
}

impl<S: Scalar> MarkLaw<S> {
    pub fn new(kind: MarkKind<S>, delta: S) -> Result<Self> {
        if !(delta.is_finite() && delta > S::zero()) {
            return Err(invalid("delta", "must be positive"));
        }
        let ok = |v: S| v.is_finite() && v >= S::zero();
        match kind {
            MarkKind::Dirac { r0 } => {
                if !ok(r0) {
                    return Err(invalid("r0", "radius must be finite and >= 0"));
                }
            }
            MarkKind::Uniform { a, b } => {
                if !(ok(a) && ok(b) && a <= b) {
                    return Err(invalid("uniform", "need 0 <= a <= b < inf"));
                }
            }
            MarkKind::TruncatedWeibull {
                scale,
                shape,
                cutoff,
            } => {
                if !(scale > S::zero() && scale.is_finite()) {
                    return Err(invalid("scale", "must be positive"));
                }
                if !(shape > S::zero() && shape.is_finite()) {
                    return Err(invalid("shape", "must be positive"));
                }
                if !(cutoff > S::zero() && cutoff.is_finite()) {
                    return Err(invalid("cutoff", "must be positive"));
                }
            }
        }
        Ok(Self { kind, delta })
    }

    pub fn dirac(r0: S) -> Result<Self> {
        Self::new(MarkKind::Dirac { r0 }, S::one())
    }

    pub fn uniform(a: S, b: S) -> Result<Self> {
        Self::new(MarkKind::Uniform { a, b }, S::one())
    }

    pub fn truncated_weibull(scale: S, shape: S, cutoff: S) -> Result<Self> {
        Self::new(
            MarkKind::TruncatedWeibull {
                scale,
                shape,
                cutoff,
            },
            S::one(),
        )
    }

    pub fn with_delta(self, delta: S) -> Result<Self> {
        Self::new(self.kind, delta)
    }

    fn weibull_mass(scale: S, shape: S, cutoff: S) -> S {
        // 1 - exp(-(c/λ)^k)
        -(-(cutoff / scale).powf(shape)).exp_m1()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        match self.kind {
            MarkKind::Dirac { r0 } => r0,
            MarkKind::Uniform { a, b } => {
                let u = S::of(rng.random::<f64>());
                a + (b - a) * u
            }
            MarkKind::TruncatedWeibull {
                scale,
                shape,
                cutoff,
            } => {
                let u = S::of(rng.random::<f64>());
                let mass = Self::weibull_mass(scale, shape, cutoff);
                let t = scale * (-(-(u * mass)).ln_1p()).powf(shape.recip());
                t.min(cutoff)
            }
        }
    }

    /// `ℛ(R > t)`.
    pub fn tail(&self, t: S) -> S {
        match self.kind {
            MarkKind::Dirac { r0 } => {
                if t < r0 {
                    S::one()
                } else {
                    S::zero()
                }
            }
            MarkKind::Uniform { a, b } => {
                if t < a {
                    S::one()
                } else if t >= b {
                    S::zero()
                } else {
                    (b - t) / (b - a)
                }
            }
            MarkKind::TruncatedWeibull {
                scale,
                shape,
                cutoff,
            } => {
                if t <= S::zero() {
                    S::one()
                } else if t >= cutoff {
                    S::zero()
                } else {
                    let at = (-(t / scale).powf(shape)).exp();
                    let ac = (-(cutoff / scale).powf(shape)).exp();
                    (at - ac) / Self::weibull_mass(scale, shape, cutoff)
                }
            }
        }
    }

    /// Lebesgue density, when the law has one.
    pub fn density(&self, t: S) -> Option<S> {
        match self.kind {
            MarkKind::Dirac { .. } => None,
            MarkKind::Uniform { a, b } => {
                if a == b {
                    None
                } else if t >= a && t <= b {
                    Some((b - a).recip())
                } else {
                    Some(S::zero())
                }
            }
            MarkKind::TruncatedWeibull {
                scale,
                shape,
                cutoff,
            } => {
                if t < S::zero() || t > cutoff {
                    return Some(S::zero());
                }
                let u = t / scale;
                let f = shape / scale * u.powf(shape - S::one()) * (-u.powf(shape)).exp();
                Some(f / Self::weibull_mass(scale, shape, cutoff))
            }
        }
    }

    /// Essential supremum of the radius.
    pub fn sup(&self) -> S {
        match self.kind {
            MarkKind::Dirac { r0 } => r0,
            MarkKind::Uniform { b, .. } => b,
            MarkKind::TruncatedWeibull { cutoff, .. } => cutoff,
        }
    }

    /// Essential infimum of the radius.
    pub fn inf(&self) -> S {
        match self.kind {
            MarkKind::Dirac { r0 } => r0,
            MarkKind::Uniform { a, .. } => a,
            MarkKind::TruncatedWeibull { .. } => S::zero(),
        }
    }
}
