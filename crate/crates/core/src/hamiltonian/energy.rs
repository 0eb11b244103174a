use rand::Rng;

use super::boundary::BoundaryCondition;
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, exact_union_minus, union_volume, Ball, Metric, QuadratureSpec};
use crate::model::{Configuration, Estimate, MarkedPoint, ModelParams, PeriodicView, Window};
use crate::Scalar;

/// Value of a conditional energy `H = H^hc + H^ar`; the hardcore term is a
/// veto rather than a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyValue<S> {
    pub finite: bool,
    pub area_term: S,
    pub quad_stderr: S,
}

impl<S: Scalar> EnergyValue<S> {
    pub fn infinite() -> Self {
        Self {
            finite: false,
            area_term: S::infinity(),
            quad_stderr: S::zero(),
        }
    }

    pub fn from_estimate(e: Estimate<S>) -> Self {
        Self {
            finite: true,
            area_term: e.value,
            quad_stderr: e.stderr,
        }
    }

    pub fn estimate(&self) -> Option<Estimate<S>> {
        self.finite
            .then(|| Estimate::new(self.area_term, self.quad_stderr, 1))
    }

    /// `exp(-β H)`, zero under the hardcore veto.
    pub fn boltzmann(&self, beta: S) -> S {
        if self.finite {
            (-beta * self.area_term).exp()
        } else {
            S::zero()
        }
    }
}

/// Energy functional of one window under one boundary condition.
///
/// Areas are computed exactly in one and two dimensions; three dimensions
/// (or `force_quadrature`) use the seeded quadrature in `quad`.
#[derive(Debug, Clone)]
pub struct EnergyModel<S> {
    d: usize,
    r: S,
    window: Window<S>,
    bc: BoundaryCondition<S>,
    quad: QuadratureSpec<S>,
    force_quadrature: bool,
}

impl<S: Scalar> EnergyModel<S> {
    pub fn new(params: &ModelParams<S>, window: &Window<S>, bc: BoundaryCondition<S>) -> Result<Self> {
        params.validate()?;
        if window.dim() != params.d {
            return Err(Error::UnsupportedDimension(window.dim()));
        }
        let window = window.with_torus(matches!(bc, BoundaryCondition::Periodic));
        Ok(Self {
            d: params.d,
            r: params.r,
            window,
            bc,
            quad: QuadratureSpec::default(),
            force_quadrature: false,
        })
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec<S>) -> Self {
        self.quad = quad;
        self
    }

    /// Use quadrature even where an exact evaluation exists.
    pub fn force_quadrature(mut self, on: bool) -> Self {
        self.force_quadrature = on;
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> S {
        self.r
    }

    pub fn window(&self) -> &Window<S> {
        &self.window
    }

    pub fn bc(&self) -> &BoundaryCondition<S> {
        &self.bc
    }

    pub fn quadrature(&self) -> &QuadratureSpec<S> {
        &self.quad
    }

    pub fn metric(&self) -> Metric<S> {
        match self.bc {
            BoundaryCondition::Periodic => Metric::Torus(self.window),
            _ => Metric::Euclidean,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.d <= 2 && !self.force_quadrature
    }

    fn enlarged(&self, p: &MarkedPoint<S>) -> Ball<S> {
        Ball::new(p.x, p.radius + self.r)
    }

    fn is_periodic(&self) -> bool {
        matches!(self.bc, BoundaryCondition::Periodic)
    }

    /// Indices of configuration points within `s` of `x` (any translate on
    /// the torus), without repetition.
    fn neighbours(&self, config: &Configuration<S>, x: &crate::model::Position<S>, s: S) -> Vec<usize> {
        if self.is_periodic() {
            let mut v: Vec<usize> = PeriodicView::trusted(config, &self.window)
                .images_near(x, s)
                .into_iter()
                .map(|(i, _)| i)
                .collect();
            v.dedup();
            v
        } else {
            config.within(x, s)
        }
    }

    fn overlaps(&self, a: &MarkedPoint<S>, b: &MarkedPoint<S>) -> bool {
        self.window.distance(&a.x, &b.x) <= a.radius + b.radius
    }

    /// Whether `p` overlaps a point of `config` (other than `skip`) or of
    /// the boundary configuration. On the torus a point also overlaps its
    /// own translates when its diameter reaches the side.
    pub fn point_conflicts(&self, config: &Configuration<S>, p: &MarkedPoint<S>, skip: Option<usize>) -> bool {
        if self.is_periodic() && S::of(2.0) * p.radius >= self.window.side() {
            return true;
        }
        let s = p.radius + config.r_max();
        let hit = self
            .neighbours(config, &p.x, s)
            .into_iter()
            .filter(|&i| Some(i) != skip)
            .any(|i| self.overlaps(p, &config.points()[i]));
        if hit {
            return true;
        }
        match &self.bc {
            BoundaryCondition::Fixed(z) => z
                .within(&p.x, p.radius + z.r_max())
                .into_iter()
                .any(|i| self.overlaps(p, &z.points()[i])),
            _ => false,
        }
    }

    /// Hardcore indicator over pairs with at least one member in the window.
    pub fn hardcore_violated(&self, config: &Configuration<S>) -> bool {
        config
            .points()
            .iter()
            .enumerate()
            .any(|(i, p)| self.point_conflicts_later(config, p, i))
    }

    fn point_conflicts_later(&self, config: &Configuration<S>, p: &MarkedPoint<S>, i: usize) -> bool {
        if self.is_periodic() && S::of(2.0) * p.radius >= self.window.side() {
            return true;
        }
        let s = p.radius + config.r_max();
        if self
            .neighbours(config, &p.x, s)
            .into_iter()
            .any(|j| j > i && self.overlaps(p, &config.points()[j]))
        {
            return true;
        }
        match &self.bc {
            BoundaryCondition::Fixed(z) => z
                .within(&p.x, p.radius + z.r_max())
                .into_iter()
                .any(|j| self.overlaps(p, &z.points()[j])),
            _ => false,
        }
    }

    /// Enlarged boundary balls that may meet `B(x, reach)`.
    fn boundary_balls_near(&self, x: &crate::model::Position<S>, reach: S) -> Vec<Ball<S>> {
        match &self.bc {
            BoundaryCondition::Fixed(z) => z
                .within(x, reach + z.r_max() + self.r)
                .into_iter()
                .map(|i| self.enlarged(&z.points()[i]))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn all_boundary_balls(&self) -> Vec<Ball<S>> {
        match &self.bc {
            BoundaryCondition::Fixed(z) => z.iter().map(|p| self.enlarged(p)).collect(),
            _ => Vec::new(),
        }
    }

    fn measure<R: Rng + ?Sized>(&self, balls: &[Ball<S>], minus: &[Ball<S>], rng: &mut R) -> Estimate<S> {
        let metric = self.metric();
        if self.is_exact() {
            if let Some(v) = exact_union_minus(self.d, balls, minus, &metric) {
                return Estimate::exact(v);
            }
        }
        union_volume(self.d, balls, minus, &self.quad, &metric, rng)
    }

    /// `H^ar_{Λ,ζ}(ω)` for `ω` inside the window.
    pub fn area_energy<R: Rng + ?Sized>(&self, config: &Configuration<S>, rng: &mut R) -> Estimate<S> {
        if config.is_empty() {
            return Estimate::exact(S::zero());
        }
        let balls: Vec<Ball<S>> = config.iter().map(|p| self.enlarged(p)).collect();
        self.measure(&balls, &self.all_boundary_balls(), rng)
    }

    /// `H_{Λ,ζ}(ω)`; `β` is not applied.
    pub fn conditional_energy<R: Rng + ?Sized>(&self, config: &Configuration<S>, rng: &mut R) -> EnergyValue<S> {
        if self.hardcore_violated(config) {
            return EnergyValue::infinite();
        }
        EnergyValue::from_estimate(self.area_energy(config, rng))
    }

    /// `|B(x, R+r) \ (enlarged balls of config except skip ∪ boundary)|`.
    fn exclusive_volume<R: Rng + ?Sized>(
        &self,
        config: &Configuration<S>,
        p: &MarkedPoint<S>,
        skip: Option<usize>,
        rng: &mut R,
    ) -> Estimate<S> {
        let ball = self.enlarged(p);
        let reach = ball.radius + config.r_max() + self.r;
        let mut minus: Vec<Ball<S>> = self
            .neighbours(config, &p.x, reach)
            .into_iter()
            .filter(|&i| Some(i) != skip)
            .map(|i| self.enlarged(&config.points()[i]))
            .collect();
        minus.extend(self.boundary_balls_near(&p.x, ball.radius));
        self.measure(&[ball], &minus, rng)
    }

    /// Change of energy when `p` is added.
    pub fn delta_insert<R: Rng + ?Sized>(
        &self,
        config: &Configuration<S>,
        p: &MarkedPoint<S>,
        rng: &mut R,
    ) -> EnergyValue<S> {
        if self.point_conflicts(config, p, None) {
            return EnergyValue::infinite();
        }
        EnergyValue::from_estimate(self.exclusive_volume(config, p, None, rng))
    }

    /// Change of energy (`<= 0`) when point `idx` is removed.
    pub fn delta_delete<R: Rng + ?Sized>(
        &self,
        config: &Configuration<S>,
        idx: usize,
        rng: &mut R,
    ) -> Result<Estimate<S>> {
        let p = *config.get(idx).ok_or(Error::MissingPoint(idx))?;
        Ok(self.exclusive_volume(config, &p, Some(idx), rng).scale(-S::one()))
    }

    /// Change of energy when point `idx` is replaced by `p`; `None` when the
    /// new point violates the hardcore constraint.
    pub fn delta_replace<R: Rng + ?Sized>(
        &self,
        config: &Configuration<S>,
        idx: usize,
        p: &MarkedPoint<S>,
        rng: &mut R,
    ) -> Result<Option<Estimate<S>>> {
        let old = *config.get(idx).ok_or(Error::MissingPoint(idx))?;
        if self.point_conflicts(config, p, Some(idx)) {
            return Ok(None);
        }
        let gain = self.exclusive_volume(config, p, Some(idx), rng);
        let loss = self.exclusive_volume(config, &old, Some(idx), rng);
        Ok(Some(gain.sub(loss)))
    }

    /// `v_d Σ R^d` and `v_d Σ (R + r)^d`.
    pub fn sandwich_bounds(&self, config: &Configuration<S>) -> (S, S) {
        let lo = config
            .iter()
            .map(|p| ball_volume(self.d, p.radius).unwrap_or(S::zero()))
            .sum();
        let hi = config
            .iter()
            .map(|p| ball_volume(self.d, p.radius + self.r).unwrap_or(S::zero()))
            .sum();
        (lo, hi)
    }
}
