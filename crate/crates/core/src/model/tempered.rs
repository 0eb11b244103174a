use super::configuration::Configuration;
use super::window::Window;
use crate::error::{invalid, Result};
use crate::Scalar;

/// Growth bound `g(n) = n^{1-ε}` with `ε = (1 - γd/δ)·δ/(d+δ)` for some
/// `γ ∈ (0, δ/d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedEnvelope {
    pub d: usize,
    pub delta: f64,
    pub gamma: f64,
}

impl TemperedEnvelope {
    pub fn new(d: usize, delta: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("delta", "must be positive"));
        }
        if !(gamma > 0.0 && gamma < delta / d as f64) {
            return Err(invalid("gamma", format!("must lie in (0, {})", delta / d as f64)));
        }
        Ok(Self { d, delta, gamma })
    }

    /// Envelope with the default `γ = δ/(2d)`.
    pub fn with_default_gamma(d: usize, delta: f64) -> Result<Self> {
        Self::new(d, delta, delta / (2.0 * d as f64))
    }

    pub fn epsilon(&self) -> f64 {
        let d = self.d as f64;
        (1.0 - self.gamma * d / self.delta) * self.delta / (d + self.delta)
    }

    pub fn g(&self, n: f64) -> f64 {
        n.powf(1.0 - self.epsilon())
    }

    /// `|Λ_n|^{1+γ}` decay exponent reference.
    pub fn decay_reference(&self, n: f64) -> f64 {
        (-(n.powi(self.d as i32)).powf(1.0 + self.gamma)).exp()
    }

    /// First point violating `R_x <= g(n)` for some integer `n >= k` with
    /// `x ∈ center + Λ_n`; returns `(index, scale, bound)`.
    pub fn first_violation<S: Scalar>(
        &self,
        config: &Configuration<S>,
        origin: &Window<S>,
        k: usize,
    ) -> Option<(usize, usize, f64)> {
        config.iter().enumerate().find_map(|(i, p)| {
            let m = origin.scale_of(&p.x).max(k.max(1));
            let bound = self.g(m as f64);
            (p.radius.f64() > bound).then_some((i, m, bound))
        })
    }

    /// Membership in `Ω*_K` (restricted to the given finite configuration).
    pub fn is_tempered_from<S: Scalar>(
        &self,
        config: &Configuration<S>,
        origin: &Window<S>,
        k: usize,
    ) -> bool {
        self.first_violation(config, origin, k).is_none()
    }

    /// Membership in `Ω*_{N,M}`: for every integer `n ∈ [N, M]` every point of
    /// `ω_{Λ_n}` has `R <= g(n)`.
    pub fn in_window_band<S: Scalar>(
        &self,
        config: &Configuration<S>,
        origin: &Window<S>,
        n_lo: usize,
        n_hi: usize,
    ) -> bool {
        config.iter().all(|p| {
            let m = origin.scale_of(&p.x).max(n_lo.max(1));
            m > n_hi || p.radius.f64() <= self.g(m as f64)
        })
    }
}
