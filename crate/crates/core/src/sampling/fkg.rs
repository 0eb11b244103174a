use super::mcmc::{GibbsSampler, MoveMix, Schedule};
use super::poisson::sample_poisson;
use super::seeds::{derive_seed, rng_for};
use crate::error::{invalid, Result};
use crate::hamiltonian::BoundaryCondition;
use crate::model::{Estimate, MarkLaw, ModelParams, TemperedEnvelope, Window};
use crate::Scalar;

/// `π^z(Ω*_{N,M})`: probability that every point of the marked Poisson
/// process in `Λ_n` has `R <= g(n)` for all integers `n ∈ [N, M]`, i.e.
/// `exp(−z|Λ_N| P(R > g(N)) − z Σ_{n=N+1}^{M} (n^d − (n−1)^d) P(R > g(n)))`.
pub fn tempered_band_probability<S: Scalar>(
    z: f64,
    law: &MarkLaw<S>,
    envelope: &TemperedEnvelope,
    n_lo: usize,
    n_hi: usize,
) -> f64 {
    tempered_band_probability_with(z, envelope, n_lo, n_hi, |t| law.tail(S::of(t)).f64())
}

/// [`tempered_band_probability`] with an arbitrary tail function.
pub fn tempered_band_probability_with(
    z: f64,
    envelope: &TemperedEnvelope,
    n_lo: usize,
    n_hi: usize,
    tail: impl Fn(f64) -> f64,
) -> f64 {
    (-tempered_band_exponent(z, envelope, n_lo, n_hi, tail)).exp()
}

/// `−ln π^z(Ω*_{N,M})`; keeps full relative precision when the violation
/// probability `1 − exp(−exponent)` is tiny.
pub fn tempered_band_exponent(
    z: f64,
    envelope: &TemperedEnvelope,
    n_lo: usize,
    n_hi: usize,
    tail: impl Fn(f64) -> f64,
) -> f64 {
    let d = envelope.d as i32;
    let n_lo = n_lo.max(1);
    let nf = n_lo as f64;
    let mut exponent = nf.powi(d) * tail(envelope.g(nf));
    for n in n_lo + 1..=n_hi {
        let m = n as f64;
        exponent += (m.powi(d) - (m - 1.0).powi(d)) * tail(envelope.g(m));
    }
    z * exponent
}

#[derive(Debug, Clone, PartialEq)]
pub struct FkgRow {
    pub k: usize,
    /// `G_{Λ,z,β,ζ}((Ω_Λ)*_K)` from chain snapshots.
    pub gibbs: Estimate<f64>,
    /// `π^z` of the same event from independent Poisson samples.
    pub poisson: Estimate<f64>,
    /// Closed form of the Poisson probability.
    pub analytic: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FkgReport {
    pub rows: Vec<FkgRow>,
}

impl FkgReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks `G_{Λ,z,β,ζ}((Ω_Λ)*_K) >= π^z((Ω_Λ)*_K)` for each `K` in `k_grid`
/// on `Λ_n` (integer side `n`), up to three combined standard errors.
#[allow(clippy::too_many_arguments)]
pub fn fkg_temperedness_check<S: Scalar>(
    params: &ModelParams<S>,
    window: &Window<S>,
    bc: BoundaryCondition<S>,
    k_grid: &[usize],
    n_samples: usize,
    seed: u64,
    schedule: &Schedule,
    envelope: &TemperedEnvelope,
) -> Result<FkgReport> {
    let side = window.side().f64();
    if side.fract() != 0.0 || side < 1.0 {
        return Err(invalid("window", "side must be a positive integer"));
    }
    let n = side as usize;
    let origin = Window::new(params.d, window.center(), S::one(), false)?;
    let schedule = Schedule {
        snapshots: n_samples,
        ..*schedule
    };
    let mut chain = GibbsSampler::new(params, window, bc, MoveMix::default(), derive_seed(seed, "fkg-chain", 0))?;
    let snaps = chain.snapshots(&schedule);
    let mut rng = rng_for(seed, "fkg-poisson", 0);
    let plain = window.euclidean();
    let poisson: Vec<_> = (0..n_samples).map(|_| sample_poisson(params, &plain, &mut rng)).collect();
    let rows = k_grid
        .iter()
        .map(|&k| {
            let hit = |c: &crate::model::Configuration<S>| {
                if envelope.in_window_band(c, &origin, k, n) { 1.0 } else { 0.0 }
            };
            let g: Vec<f64> = snaps.iter().map(hit).collect();
            let p: Vec<f64> = poisson.iter().map(hit).collect();
            let gibbs = Estimate::from_series(&g);
            let poisson = Estimate::from_samples(&p);
            let slack = 3.0 * gibbs.stderr.hypot(poisson.stderr);
            FkgRow {
                k,
                gibbs,
                poisson,
                analytic: tempered_band_probability(params.z.f64(), &params.mark_law, envelope, k, n),
                holds: gibbs.value >= poisson.value - slack,
            }
        })
        .collect();
    Ok(FkgReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_probability_single_scale() {
        let env = TemperedEnvelope::with_default_gamma(2, 1.0).unwrap();
        let law = MarkLaw::uniform(0.0, 5.0).unwrap();
        let p = tempered_band_probability(0.3, &law, &env, 2, 2);
        let expect = (-0.3 * 4.0 * law.tail(env.g(2.0))).exp();
        assert!((p - expect).abs() < 1e-15);
        let wider = tempered_band_probability(0.3, &law, &env, 2, 4);
        assert!(wider <= p);
    }

    #[test]
    fn requires_integer_side() {
        let params = ModelParams::new(1, 0.5, 1.0, 0.1, MarkLaw::dirac(0.3).unwrap()).unwrap();
        let env = TemperedEnvelope::with_default_gamma(1, 1.0).unwrap();
        let w = Window::lambda(1, 2.5).unwrap();
        let r = fkg_temperedness_check(&params, &w, BoundaryCondition::Free, &[1], 10, 1, &Schedule::default(), &env);
        assert!(r.is_err());
    }

    #[test]
    fn gibbs_dominates_poisson_temperedness() {
        let params = ModelParams::new(1, 1.0, 1.0, 0.2, MarkLaw::truncated_weibull(0.8, 1.0, 6.0).unwrap()).unwrap();
        let env = TemperedEnvelope::with_default_gamma(1, 1.0).unwrap();
        let w = Window::lambda(1, 6.0).unwrap();
        let schedule = Schedule { burn_in: 200, thin: 2, snapshots: 0 };
        let report = fkg_temperedness_check(&params, &w, BoundaryCondition::Free, &[1, 2, 4], 3000, 5, &schedule, &env).unwrap();
        for row in &report.rows {
            assert!(row.poisson.agrees_with(row.analytic, 4.0, 1e-9), "{row:?}");
        }
        assert!(report.all_hold(), "{report:?}");
    }
}
