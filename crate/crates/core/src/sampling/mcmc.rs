use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poisson::uniform_in;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{BoundaryCondition, EnergyModel, EnergyValue};
use crate::model::{Configuration, MarkedPoint, ModelParams, Window};
use crate::Scalar;

/// Proposal probabilities of the four move types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveMix {
    pub p_birth: f64,
    pub p_death: f64,
    pub p_translate: f64,
    pub p_resize: f64,
}

impl Default for MoveMix {
    fn default() -> Self {
        Self {
            p_birth: 0.35,
            p_death: 0.35,
            p_translate: 0.2,
            p_resize: 0.1,
        }
    }
}

impl MoveMix {
    pub fn new(p_birth: f64, p_death: f64, p_translate: f64, p_resize: f64) -> Result<Self> {
        let m = Self {
            p_birth,
            p_death,
            p_translate,
            p_resize,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_birth, self.p_death, self.p_translate, self.p_resize];
        if ps.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(invalid("move_mix", "probabilities must be nonnegative"));
        }
        if (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("move_mix", "probabilities must sum to 1"));
        }
        if self.p_birth != self.p_death || self.p_birth == 0.0 {
            return Err(invalid("move_mix", "need p_birth = p_death > 0"));
        }
        Ok(())
    }

    fn pick(&self, u: f64) -> Move {
        if u < self.p_birth {
            Move::Birth
        } else if u < self.p_birth + self.p_death {
            Move::Death
        } else if u < self.p_birth + self.p_death + self.p_translate {
            Move::Translate
        } else {
            Move::Resize
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Birth = 0,
    Death = 1,
    Translate = 2,
    Resize = 3,
}

/// Proposal and acceptance counters per move type
/// (birth, death, translate, resize).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptanceStats {
    pub proposed: [u64; 4],
    pub accepted: [u64; 4],
    pub audits: u64,
    pub audit_failures: u64,
}

impl AcceptanceStats {
    pub fn rate(&self, kind: usize) -> f64 {
        if self.proposed[kind] == 0 {
            0.0
        } else {
            self.accepted[kind] as f64 / self.proposed[kind] as f64
        }
    }
}

/// Current chain state with its cached energy.
#[derive(Debug, Clone)]
pub struct ChainState<S> {
    pub config: Configuration<S>,
    pub energy: EnergyValue<S>,
    pub sweep_count: u64,
    pub rng_seed: u64,
    pub acceptance_stats: AcceptanceStats,
}

/// Schedule of a run: burn-in and thinning in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub burn_in: u64,
    pub thin: u64,
    pub snapshots: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thin: 10,
            snapshots: 1000,
        }
    }
}

/// Metropolis–Hastings sampler for `G_{Λ,z,β,ζ}` with birth, death,
/// translation and radius-resampling moves. One sweep is a fixed number of
/// proposals, `max(⌈z|Λ|⌉, 1)` unless set; snapshots are taken at sweep
/// ends, so the length must not depend on the current state.
#[derive(Debug, Clone)]
pub struct GibbsSampler<S> {
    params: ModelParams<S>,
    model: EnergyModel<S>,
    mix: MoveMix,
    step: S,
    audit_every: u64,
    sweep_length: usize,
    budget: f64,
    rng: ChaCha8Rng,
    state: ChainState<S>,
}

impl<S: Scalar> GibbsSampler<S> {
    /// A chain started from the empty configuration.
    pub fn new(
        params: &ModelParams<S>,
        window: &Window<S>,
        bc: BoundaryCondition<S>,
        mix: MoveMix,
        seed: u64,
    ) -> Result<Self> {
        let model = EnergyModel::new(params, window, bc)?;
        Self::from_model(params, model, mix, seed)
    }

    pub fn from_model(params: &ModelParams<S>, model: EnergyModel<S>, mix: MoveMix, seed: u64) -> Result<Self> {
        mix.validate()?;
        let side = model.window().side();
        let step = (params.mark_law.sup() + params.r)
            .max(S::of(0.25))
            .min(side / S::of(4.0));
        let d = params.d;
        Ok(Self {
            params: *params,
            mix,
            step,
            audit_every: 100,
            sweep_length: ((params.z * model.window().volume()).f64().ceil() as usize).max(1),
            budget: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: ChainState {
                config: Configuration::with_cell(d, side / S::of(64.0)),
                energy: EnergyValue::from_estimate(crate::model::Estimate::exact(S::zero())),
                sweep_count: 0,
                rng_seed: seed,
                acceptance_stats: AcceptanceStats::default(),
            },
            model,
        })
    }

    /// Restarts from `config`, which must lie in the window and respect the
    /// hardcore constraint.
    pub fn with_initial(mut self, config: Configuration<S>) -> Result<Self> {
        if let Some(i) = config.iter().position(|p| !self.model.window().contains(&p.x)) {
            return Err(Error::OutsideWindow { index: i });
        }
        let energy = self.model.conditional_energy(&config, &mut self.rng);
        if !energy.finite {
            return Err(invalid("initial", "configuration violates the hardcore constraint"));
        }
        self.state.config = config;
        self.state.energy = energy;
        self.budget = energy.quad_stderr.f64();
        Ok(self)
    }

    /// Half-width of the uniform translation step.
    pub fn with_step(mut self, step: S) -> Self {
        self.step = step;
        self
    }

    /// Proposals per sweep.
    pub fn with_sweep_length(mut self, proposals: usize) -> Self {
        self.sweep_length = proposals.max(1);
        self
    }

    /// Energy audit period in sweeps (0 disables).
    pub fn with_audit_every(mut self, sweeps: u64) -> Self {
        self.audit_every = sweeps;
        self
    }

    pub fn state(&self) -> &ChainState<S> {
        &self.state
    }

    pub fn config(&self) -> &Configuration<S> {
        &self.state.config
    }

    pub fn model(&self) -> &EnergyModel<S> {
        &self.model
    }

    pub fn params(&self) -> &ModelParams<S> {
        &self.params
    }

    fn accept(&mut self, log_ratio: f64) -> bool {
        if log_ratio >= 0.0 {
            return true;
        }
        let u: f64 = self.rng.random();
        u < log_ratio.exp()
    }

    fn apply_delta(&mut self, value: S, stderr: S) {
        self.state.energy.area_term += value;
        self.state.energy.quad_stderr = self.state.energy.quad_stderr.hypot(stderr);
        self.budget += stderr.f64();
    }

    /// One Metropolis–Hastings proposal.
    pub fn step(&mut self) {
        let mv = self.mix.pick(self.rng.random());
        let kind = mv as usize;
        self.state.acceptance_stats.proposed[kind] += 1;
        let accepted = match mv {
            Move::Birth => self.birth(),
            Move::Death => self.death(),
            Move::Translate => self.translate(),
            Move::Resize => self.resize(),
        };
        if accepted {
            self.state.acceptance_stats.accepted[kind] += 1;
        }
    }

    fn log_activity_volume(&self) -> f64 {
        (self.params.z * self.model.window().volume()).f64().ln()
    }

    fn birth(&mut self) -> bool {
        let x = uniform_in(self.model.window(), &mut self.rng);
        let radius = self.params.mark_law.sample(&mut self.rng);
        let p = MarkedPoint::at(x, radius);
        let delta = self.model.delta_insert(&self.state.config, &p, &mut self.rng);
        if !delta.finite {
            return false;
        }
        let n = self.state.config.len() as f64;
        let log_ratio = self.log_activity_volume() - (n + 1.0).ln()
            - (self.params.beta * delta.area_term).f64();
        if !self.accept(log_ratio) || self.state.config.insert(p).is_err() {
            return false;
        }
        self.apply_delta(delta.area_term, delta.quad_stderr);
        true
    }

    fn death(&mut self) -> bool {
        let n = self.state.config.len();
        if n == 0 {
            return false;
        }
        let idx = self.rng.random_range(0..n);
        let Ok(delta) = self.model.delta_delete(&self.state.config, idx, &mut self.rng) else {
            return false;
        };
        let log_ratio =
            (n as f64).ln() - self.log_activity_volume() - (self.params.beta * delta.value).f64();
        if !self.accept(log_ratio) {
            return false;
        }
        self.state.config.remove(idx).expect("index drawn from range");
        self.apply_delta(delta.value, delta.stderr);
        true
    }

    fn try_replace(&mut self, idx: usize, p: MarkedPoint<S>) -> bool {
        let Ok(Some(delta)) = self.model.delta_replace(&self.state.config, idx, &p, &mut self.rng) else {
            return false;
        };
        let log_ratio = -(self.params.beta * delta.value).f64();
        if !self.accept(log_ratio) || self.state.config.replace(idx, p).is_err() {
            return false;
        }
        self.apply_delta(delta.value, delta.stderr);
        true
    }

    fn translate(&mut self) -> bool {
        let n = self.state.config.len();
        if n == 0 {
            return false;
        }
        let idx = self.rng.random_range(0..n);
        let old = self.state.config.points()[idx];
        let mut x = old.x;
        for xi in x.iter_mut().take(self.params.d) {
            let u: f64 = self.rng.random();
            *xi += self.step * S::of(2.0 * u - 1.0);
        }
        let window = *self.model.window();
        if window.is_torus() {
            x = window.wrap(&x);
        } else if !window.contains(&x) {
            return false;
        }
        self.try_replace(idx, MarkedPoint::at(x, old.radius))
    }

    fn resize(&mut self) -> bool {
        let n = self.state.config.len();
        if n == 0 {
            return false;
        }
        let idx = self.rng.random_range(0..n);
        let old = self.state.config.points()[idx];
        let radius = self.params.mark_law.sample(&mut self.rng);
        self.try_replace(idx, MarkedPoint::at(old.x, radius))
    }

    /// One sweep of proposals, followed by an energy audit when due.
    pub fn sweep(&mut self) {
        for _ in 0..self.sweep_length {
            self.step();
        }
        self.state.sweep_count += 1;
        if self.audit_every > 0 && self.state.sweep_count % self.audit_every == 0 {
            self.audit();
        }
    }

    pub fn sweeps(&mut self, count: u64) {
        for _ in 0..count {
            self.sweep();
        }
    }

    /// Recomputes the energy, compares it with the cached value and resets
    /// the cache. Returns the absolute drift.
    pub fn audit(&mut self) -> f64 {
        let fresh = self.model.conditional_energy(&self.state.config, &mut self.rng);
        let stats = &mut self.state.acceptance_stats;
        stats.audits += 1;
        let drift = if fresh.finite {
            (fresh.area_term - self.state.energy.area_term).abs().f64()
        } else {
            f64::INFINITY
        };
        let scale = 1.0 + fresh.area_term.f64().abs();
        let allowed = 4.0 * (self.budget + fresh.quad_stderr.f64()) + 1e-8 * scale;
        if !(drift <= allowed) {
            stats.audit_failures += 1;
            log::warn!("cached energy drifted by {drift:e} (allowed {allowed:e})");
        }
        self.state.energy = fresh;
        self.budget = fresh.quad_stderr.f64();
        drift
    }

    /// Runs the burn-in, then calls `f` on every `thin`-th sweep until
    /// `snapshots` states have been emitted.
    pub fn run(&mut self, schedule: &Schedule, mut f: impl FnMut(&ChainState<S>)) {
        self.sweeps(schedule.burn_in);
        for _ in 0..schedule.snapshots {
            self.sweeps(schedule.thin.max(1));
            f(&self.state);
        }
    }

    /// Collected snapshot configurations of [`run`](Self::run).
    pub fn snapshots(&mut self, schedule: &Schedule) -> Vec<Configuration<S>> {
        let mut out = Vec::with_capacity(schedule.snapshots);
        self.run(schedule, |s| out.push(s.config.clone()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MarkLaw;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson as PoissonPmf};

    fn params(d: usize, z: f64, beta: f64, r: f64, law: MarkLaw<f64>) -> ModelParams<f64> {
        ModelParams::new(d, z, beta, r, law).unwrap()
    }

    #[test]
    fn mix_validation() {
        assert!(MoveMix::default().validate().is_ok());
        assert!(MoveMix::new(0.3, 0.4, 0.2, 0.1).is_err());
        assert!(MoveMix::new(0.5, 0.5, 0.1, -0.1).is_err());
        assert!(MoveMix::new(0.5, 0.5, 0.0, 0.0).is_ok());
    }

    #[test]
    fn same_seed_same_stream() {
        let p = params(2, 0.5, 1.0, 0.2, MarkLaw::uniform(0.1, 0.4).unwrap());
        let w = Window::lambda(2, 4.0).unwrap();
        let run = |seed| {
            let mut s = GibbsSampler::new(&p, &w, BoundaryCondition::Free, MoveMix::default(), seed).unwrap();
            s.snapshots(&Schedule { burn_in: 20, thin: 2, snapshots: 10 })
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn never_violates_and_cache_tracks() {
        let w = Window::lambda(2, 5.0).unwrap();
        for bc in [BoundaryCondition::Free, BoundaryCondition::Periodic] {
            let p = params(2, 1.5, 0.5, 0.3, MarkLaw::uniform(0.2, 0.6).unwrap());
            let mut s = GibbsSampler::new(&p, &w, bc, MoveMix::default(), 11)
                .unwrap()
                .with_audit_every(10);
            let mut seen = 0;
            s.run(&Schedule { burn_in: 50, thin: 5, snapshots: 40 }, |st| {
                seen += st.config.len();
                assert!(!s_model_violates(&st.config, &w, &p));
            });
            assert!(seen > 0);
            let stats = s.state().acceptance_stats;
            assert!(stats.audits > 0);
            assert_eq!(stats.audit_failures, 0);
            assert!(s.audit() < 1e-8);
        }
    }

    fn s_model_violates(c: &Configuration<f64>, w: &Window<f64>, p: &ModelParams<f64>) -> bool {
        EnergyModel::new(p, w, BoundaryCondition::Free).unwrap().hardcore_violated(c)
    }

    #[test]
    fn vanishing_interaction_gives_poisson_counts() {
        // Radius-0 marks and a tiny polymer radius: G is Poisson(z|Λ|).
        let p = params(2, 0.5, 1.0, 1e-4, MarkLaw::dirac(0.0).unwrap());
        let w = Window::lambda(2, 2.0).unwrap();
        let mut s = GibbsSampler::new(&p, &w, BoundaryCondition::Free, MoveMix::default(), 3).unwrap();
        let mut counts = vec![0usize; 12];
        let n_snap = 4000;
        s.run(&Schedule { burn_in: 100, thin: 5, snapshots: n_snap }, |st| {
            counts[st.config.len().min(11)] += 1;
        });
        let pmf = PoissonPmf::new(2.0).unwrap();
        let mut expected: Vec<f64> = (0..11).map(|k| pmf.pmf(k) * n_snap as f64).collect();
        expected.push(n_snap as f64 - expected.iter().sum::<f64>());
        // Merge the tail so that every bin expects at least 5.
        let (mut obs, mut exp) = (Vec::new(), Vec::new());
        let (mut o, mut e) = (0.0, 0.0);
        for k in 0..12 {
            o += counts[k] as f64;
            e += expected[k];
            if e >= 5.0 && expected[k + 1..].iter().sum::<f64>() >= 5.0 {
                obs.push(o);
                exp.push(e);
                o = 0.0;
                e = 0.0;
            }
        }
        *obs.last_mut().unwrap() += o;
        *exp.last_mut().unwrap() += e;
        let chi2: f64 = obs.iter().zip(&exp).map(|(o, e)| (o - e).powi(2) / e).sum();
        let pval = 1.0 - ChiSquared::new((obs.len() - 1) as f64).unwrap().cdf(chi2);
        assert!(pval > 0.001, "chi2 {chi2} p {pval} {counts:?}");
    }

    #[test]
    fn heavy_penalty_keeps_chain_sparse() {
        let p = params(2, 1.0, 50.0, 1.0, MarkLaw::dirac(0.3).unwrap());
        let w = Window::lambda(2, 3.0).unwrap();
        let mut s = GibbsSampler::new(&p, &w, BoundaryCondition::Free, MoveMix::default(), 4).unwrap();
        let mut empty = 0;
        s.run(&Schedule { burn_in: 50, thin: 1, snapshots: 500 }, |st| {
            if st.config.is_empty() {
                empty += 1;
            }
        });
        assert!(empty > 400, "{empty}");
    }

    #[test]
    fn rejects_bad_initial_state() {
        let p = params(1, 1.0, 1.0, 0.1, MarkLaw::dirac(0.5).unwrap());
        let w = Window::lambda(1, 4.0).unwrap();
        let s = GibbsSampler::new(&p, &w, BoundaryCondition::Free, MoveMix::default(), 1).unwrap();
        let c = Configuration::from_points(1, [MarkedPoint::at([0.0; 3], 0.5), MarkedPoint::at([0.9, 0.0, 0.0], 0.5)]).unwrap();
        assert!(s.clone().with_initial(c).is_err());
        let c = Configuration::from_points(1, [MarkedPoint::at([3.0, 0.0, 0.0], 0.5)]).unwrap();
        assert!(matches!(s.with_initial(c), Err(Error::OutsideWindow { .. })));
    }
}
