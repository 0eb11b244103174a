use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::QuadratureSpec;
use crate::hamiltonian::{BoundaryCondition, EnergyModel};
use crate::model::{restrict_complement, Estimate, ModelParams, Window};
use crate::sampling::{derive_seed, nonempty_poisson_count, rng_for, sample_marked_count, GibbsSampler, MoveMix, Schedule};

/// How a pressure value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    Direct,
    ThermoIntegration,
}

impl PressureMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PressureMethod::Direct => "direct",
            PressureMethod::ThermoIntegration => "thermo_integration",
        }
    }
}

/// `log Z / |Λ|` at finite window scale `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureEstimate {
    pub n: f64,
    pub bc: &'static str,
    pub log_z_over_volume: Estimate<f64>,
    /// `Z` itself, for the direct method.
    pub partition: Option<Estimate<f64>>,
    pub method: PressureMethod,
}

/// `Z = E[exp(−βH)]` under the marked Poisson process, with the empty
/// configuration handled exactly and the rest averaged over draws
/// conditioned on `N >= 1`; delta-method standard error for `log Z / |Λ|`.
/// Draws come from a single stream determined by `seed`, so different
/// boundary conditions with the same seed share their Poisson samples.
pub fn partition_direct(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    n_samples: usize,
    seed: u64,
    quad: &QuadratureSpec<f64>,
) -> Result<PressureEstimate> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be positive"));
    }
    let volume = window.volume();
    if params.z * volume > 50.0 {
        log::warn!("z|Λ| = {} is large; the direct estimator degrades", params.z * volume);
    }
    let z = direct_weights(params, window, bc, n_samples, seed, quad)?.partition();
    if z.value <= 0.0 {
        // Rule of three: Z < 3/n at 95% confidence.
        return Err(Error::AllZero(n_samples, (3.0 / n_samples as f64).ln() / volume));
    }
    Ok(PressureEstimate {
        n: window.side(),
        bc: bc.name(),
        log_z_over_volume: Estimate::new(z.value.ln() / volume, z.stderr / (z.value * volume), n_samples),
        partition: Some(z),
        method: PressureMethod::Direct,
    })
}

/// Draws for the direct estimator, stratified on the point count: the
/// empty configuration has weight one and probability `empty = e^{−z|Λ|}`,
/// and `weights` are `exp(−βH)` of draws conditioned on `N >= 1`. Then
/// `Z = empty + (1 − empty)·E[weight]`, which lies in `[e^{−z|Λ|}, 1]` for
/// every sample.
struct DirectWeights {
    empty: f64,
    weights: Vec<f64>,
}

impl DirectWeights {
    fn partition(&self) -> Estimate<f64> {
        let m = Estimate::from_samples(&self.weights);
        let rest = 1.0 - self.empty;
        Estimate::new(self.empty + rest * m.value, rest * m.stderr, self.weights.len())
    }

    /// `ln Z_self − ln Z_other` for paired draws, with a delta-method
    /// standard error that keeps their covariance.
    fn log_ratio(&self, other: &Self) -> Result<Estimate<f64>> {
        let n = self.weights.len().min(other.weights.len());
        let (za, zb) = (self.partition().value, other.partition().value);
        if !(za > 0.0 && zb > 0.0) {
            return Err(Error::AllZero(n, (3.0 / n as f64).ln()));
        }
        let (ra, rb) = (1.0 - self.empty, 1.0 - other.empty);
        let d: Vec<f64> = self.weights.iter().zip(&other.weights).map(|(x, y)| ra * x / za - rb * y / zb).collect();
        Ok(Estimate::new(za.ln() - zb.ln(), Estimate::from_samples(&d).stderr, n))
    }
}

/// Draws for the direct estimator. They depend only on `seed`, so calls
/// with different boundary conditions and the same seed are paired.
fn direct_weights(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    n_samples: usize,
    seed: u64,
    quad: &QuadratureSpec<f64>,
) -> Result<DirectWeights> {
    let model = EnergyModel::new(params, window, bc.clone())?.with_quadrature(*quad);
    let plain = window.euclidean();
    let mean = params.z * plain.volume();
    let mut rng = rng_for(seed, "direct-poisson", 0);
    let mut qrng = rng_for(seed, "direct-quad", 0);
    let weights = (0..n_samples)
        .map(|_| {
            let n = nonempty_poisson_count(mean, &mut rng);
            let c = sample_marked_count(n, &params.mark_law, &plain, &mut rng);
            model.conditional_energy(&c, &mut qrng).boltzmann(params.beta)
        })
        .collect();
    Ok(DirectWeights {
        empty: (-mean).exp(),
        weights,
    })
}

/// Options of the thermodynamic-integration estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub schedule: Schedule,
    pub mix: MoveMix,
    /// Poisson draws for the `β_0` endpoint.
    pub direct_samples: usize,
    pub quad: QuadratureSpec<f64>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            schedule: Schedule {
                burn_in: 200,
                thin: 2,
                snapshots: 1000,
            },
            mix: MoveMix::default(),
            direct_samples: 20_000,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Mean area energy under `G_{Λ,z,β,ζ}` over independent chains.
pub fn mean_energy(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    chains: usize,
    seed: u64,
    options: &IntegrationOptions,
) -> Result<Estimate<f64>> {
    let per_chain: Vec<Result<Estimate<f64>>> = (0..chains.max(1))
        .into_par_iter()
        .map(|c| {
            let model = EnergyModel::new(params, window, bc.clone())?.with_quadrature(options.quad);
            let mut chain = GibbsSampler::from_model(params, model, options.mix, derive_seed(seed, "energy-chain", c as u64))?;
            let mut h = Vec::with_capacity(options.schedule.snapshots);
            chain.run(&options.schedule, |s| h.push(s.energy.area_term));
            Ok(Estimate::from_series(&h))
        })
        .collect();
    let per_chain = per_chain.into_iter().collect::<Result<Vec<_>>>()?;
    let k = per_chain.len() as f64;
    let value = per_chain.iter().map(|e| e.value).sum::<f64>() / k;
    let stderr = per_chain.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k;
    let n = per_chain.iter().map(|e| e.n_samples).sum();
    Ok(Estimate::new(value, stderr, n))
}

fn check_grid(beta_grid: &[f64]) -> Result<f64> {
    let Some(&beta0) = beta_grid.first() else {
        return Err(invalid("beta_grid", "must not be empty"));
    };
    if !(beta0 > 0.0) || beta_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("beta_grid", "must be positive and strictly ascending"));
    }
    Ok(beta0)
}

/// `∫ E_β[H] dβ` over `beta_grid` by the trapezoid rule, from independent
/// chains at each grid point.
pub fn energy_integral(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    beta_grid: &[f64],
    chains: usize,
    seed: u64,
    options: &IntegrationOptions,
) -> Result<Estimate<f64>> {
    check_grid(beta_grid)?;
    if beta_grid.len() == 1 {
        return Ok(Estimate::exact(0.0));
    }
    let means: Vec<Result<Estimate<f64>>> = beta_grid
        .par_iter()
        .enumerate()
        .map(|(i, &b)| mean_energy(&params.with_beta(b), window, bc, chains, derive_seed(seed, "ti-beta", i as u64), options))
        .collect();
    let means = means.into_iter().collect::<Result<Vec<_>>>()?;
    let k = beta_grid.len();
    let mut area = 0.0;
    let mut var = 0.0;
    for i in 0..k {
        let left = if i > 0 { beta_grid[i] - beta_grid[i - 1] } else { 0.0 };
        let right = if i + 1 < k { beta_grid[i + 1] - beta_grid[i] } else { 0.0 };
        let w = 0.5 * (left + right);
        area += w * means[i].value;
        var += (w * means[i].stderr).powi(2);
    }
    Ok(Estimate::new(area, var.sqrt(), means.iter().map(|m| m.n_samples).sum()))
}

/// `log Z(β_K) = log Z(β_0) − ∫_{β_0}^{β_K} E_β[H] dβ` by the trapezoid rule
/// on `beta_grid`, with `log Z(β_0)` from [`partition_direct`]. The result
/// refers to the last grid point.
pub fn pressure_thermo_integration(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    beta_grid: &[f64],
    chains: usize,
    seed: u64,
    options: &IntegrationOptions,
) -> Result<PressureEstimate> {
    let beta0 = check_grid(beta_grid)?;
    let volume = window.volume();
    let start = partition_direct(
        &params.with_beta(beta0),
        window,
        bc,
        options.direct_samples,
        seed,
        &options.quad,
    )?;
    let area = energy_integral(params, window, bc, beta_grid, chains, seed, options)?;
    let log_z = start.log_z_over_volume.scale(volume).sub(area);
    Ok(PressureEstimate {
        n: window.side(),
        bc: bc.name(),
        log_z_over_volume: log_z.scale(1.0 / volume),
        partition: None,
        method: PressureMethod::ThermoIntegration,
    })
}

/// One row of [`pressure_bc_comparison`].
#[derive(Debug, Clone, PartialEq)]
pub struct BcComparisonRow {
    pub n: f64,
    pub periodic: PressureEstimate,
    pub free: PressureEstimate,
    pub fixed: PressureEstimate,
    /// `periodic − free`.
    pub gap_periodic_free: Estimate<f64>,
    /// `fixed − free`.
    pub gap_fixed_free: Estimate<f64>,
}

/// Settings of [`pressure_bc_comparison`].
#[derive(Debug, Clone, PartialEq)]
pub struct BcComparisonOptions {
    pub beta_grid: Vec<f64>,
    pub chains: usize,
    pub integration: IntegrationOptions,
    /// Width of the frame around `Λ_n` from which the fixed boundary
    /// configuration is taken.
    pub frame: f64,
    /// Sweeps of the periodic chain that produces the boundary configuration.
    pub boundary_sweeps: u64,
}

impl BcComparisonOptions {
    /// Uniform grid of `steps` intervals from `β_0 = 10^{-3}` to `beta`.
    pub fn with_uniform_grid(beta: f64, steps: usize) -> Self {
        let beta0 = 1e-3;
        let grid = (0..=steps)
            .map(|i| beta0 + (beta - beta0) * i as f64 / steps.max(1) as f64)
            .collect();
        Self {
            beta_grid: grid,
            chains: 4,
            integration: IntegrationOptions::default(),
            frame: 2.0,
            boundary_sweeps: 2000,
        }
    }
}

/// Boundary configuration for `Λ_n`: the exterior part of a snapshot of a
/// periodic chain on a larger torus.
pub fn sampled_boundary(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    frame: f64,
    sweeps: u64,
    seed: u64,
) -> Result<BoundaryCondition<f64>> {
    let big = Window::new(params.d, window.center(), window.side() + 2.0 * frame, true)?;
    let mut chain = GibbsSampler::new(params, &big, BoundaryCondition::Periodic, MoveMix::default(), seed)?;
    chain.sweeps(sweeps);
    let outside = restrict_complement(chain.config(), &window.euclidean());
    BoundaryCondition::fixed(&outside, window, params)
}

/// Pressure under periodic, free and fixed boundary conditions for each
/// window scale, by thermodynamic integration. The `β_0` endpoint uses the
/// same Poisson draws for all three, and the gaps use the paired log-ratio of
/// those draws; the energy integrals come from independent chains.
pub fn pressure_bc_comparison(
    params: &ModelParams<f64>,
    n_list: &[f64],
    seed: u64,
    options: &BcComparisonOptions,
) -> Result<Vec<BcComparisonRow>> {
    if n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("n_list", "must be strictly ascending"));
    }
    let beta0 = check_grid(&options.beta_grid)?;
    let start = params.with_beta(beta0);
    let ti = &options.integration;
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let window = Window::lambda(params.d, n)?;
            let volume = window.volume();
            let s = derive_seed(seed, "bc-comparison", i as u64);
            let fixed_bc = sampled_boundary(params, &window, options.frame, options.boundary_sweeps, derive_seed(s, "boundary", 0))?;
            let end_seed = derive_seed(s, "endpoint", 0);
            let run = |bc: &BoundaryCondition<f64>| -> Result<(DirectWeights, Estimate<f64>, PressureEstimate)> {
                let w = direct_weights(&start, &window, bc, ti.direct_samples, end_seed, &ti.quad)?;
                let area = energy_integral(params, &window, bc, &options.beta_grid, options.chains, derive_seed(s, bc.name(), 0), ti)?;
                let z = w.partition();
                if z.value <= 0.0 {
                    return Err(Error::AllZero(z.n_samples, (3.0 / z.n_samples as f64).ln() / volume));
                }
                let log_z = Estimate::new(z.value.ln(), z.stderr / z.value, z.n_samples).sub(area);
                let estimate = PressureEstimate {
                    n,
                    bc: bc.name(),
                    log_z_over_volume: log_z.scale(1.0 / volume),
                    partition: None,
                    method: PressureMethod::ThermoIntegration,
                };
                Ok((w, area, estimate))
            };
            let (w_per, a_per, periodic) = run(&BoundaryCondition::Periodic)?;
            let (w_free, a_free, free) = run(&BoundaryCondition::Free)?;
            let (w_fix, a_fix, fixed) = run(&fixed_bc)?;
            let gap = |w: &DirectWeights, a: Estimate<f64>| -> Result<Estimate<f64>> {
                Ok(w.log_ratio(&w_free)?.sub(a.sub(a_free)).scale(1.0 / volume))
            };
            Ok(BcComparisonRow {
                n,
                gap_periodic_free: gap(&w_per, a_per)?,
                gap_fixed_free: gap(&w_fix, a_fix)?,
                periodic,
                free,
                fixed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{sector_partition, sector_weights};
    use crate::model::MarkLaw;

    fn dirac_1d(z: f64, beta: f64) -> ModelParams<f64> {
        ModelParams::new(1, z, beta, 0.2, MarkLaw::dirac(0.5).unwrap()).unwrap()
    }

    #[test]
    fn vanishing_activity_gives_unit_partition() {
        let p = ModelParams::new(2, 1e-9, 1.0, 0.1, MarkLaw::dirac(0.4).unwrap()).unwrap();
        let w = Window::lambda(2, 3.0).unwrap();
        let e = partition_direct(&p, &w, &BoundaryCondition::Free, 100, 1, &QuadratureSpec::default()).unwrap();
        assert!(e.log_z_over_volume.value.abs() < 1e-8);
    }

    #[test]
    fn dense_strong_coupling_stays_above_empty_weight() {
        // z|Λ| = 10.8: the empty configuration is rare among plain Poisson draws.
        let p = ModelParams::new(2, 1.2, 3.0, 0.2, MarkLaw::uniform(0.1, 0.5).unwrap()).unwrap();
        let w = Window::lambda(2, 3.0).unwrap();
        for seed in 0..5 {
            let e = partition_direct(&p, &w, &BoundaryCondition::Free, 500, seed, &QuadratureSpec::default()).unwrap();
            let z = e.partition.unwrap();
            assert!(z.value >= (-1.2f64 * 9.0).exp() && z.value <= 1.0, "{z:?}");
        }
    }

    #[test]
    fn estimates_respect_partition_bounds() {
        let w = Window::lambda(2, 3.0).unwrap();
        for (i, z) in [0.1, 0.5, 1.0].into_iter().enumerate() {
            let p = ModelParams::new(2, z, 1.0, 0.1, MarkLaw::uniform(0.1, 0.4).unwrap()).unwrap();
            for bc in [BoundaryCondition::Free, BoundaryCondition::Periodic] {
                let e = partition_direct(&p, &w, &bc, 2000, i as u64, &QuadratureSpec::default()).unwrap();
                let v = e.log_z_over_volume.value;
                assert!(v <= 0.0 && v >= -z, "{e:?}");
            }
        }
    }

    #[test]
    fn hardcore_sectors_match_closed_form() {
        // With β ≈ 0 only the hardcore veto acts; N ordered points in [0, L]
        // with gaps above a fill volume (L − (N−1)a)^N.
        let (z, l, a) = (1.0 / 3.0, 3.0, 1.0);
        let p = dirac_1d(z, 1e-12);
        let w = Window::lambda(1, l).unwrap();
        let sectors = sector_weights(&p, &w, &BoundaryCondition::Free, 4, 200_000, 7).unwrap();
        let mut fact = 1.0;
        for (n, s) in sectors.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let free: f64 = (l - (n as f64 - 1.0).max(0.0) * a).max(0.0);
            let exact = z.powi(n as i32) * free.powi(n as i32) / fact;
            assert!(s.agrees_with(exact, 4.0, 1e-12), "N={n}: {s:?} vs {exact}");
        }
        assert_eq!(sectors[4].value, 0.0);
    }

    #[test]
    fn direct_partition_matches_sector_oracle() {
        let p = dirac_1d(1.0 / 3.0, 0.7);
        let w = Window::lambda(1, 3.0).unwrap();
        let oracle = sector_partition(&sector_weights(&p, &w, &BoundaryCondition::Free, 3, 200_000, 8).unwrap(), 1.0);
        let e = partition_direct(&p, &w, &BoundaryCondition::Free, 50_000, 9, &QuadratureSpec::default()).unwrap();
        let z = e.partition.unwrap();
        assert!(z.z_score(&oracle).abs() < 3.0, "{z:?} vs {oracle:?}");
    }

    #[test]
    fn thermodynamic_integration_matches_direct() {
        let p = ModelParams::new(2, 0.4, 1.0, 0.1, MarkLaw::dirac(0.3).unwrap()).unwrap();
        let w = Window::lambda(2, 3.0).unwrap();
        let grid: Vec<f64> = (0..=16).map(|i| 1e-3 + (1.0 - 1e-3) * i as f64 / 16.0).collect();
        let opts = IntegrationOptions::default();
        let ti = pressure_thermo_integration(&p, &w, &BoundaryCondition::Free, &grid, 2, 10, &opts).unwrap();
        let direct = partition_direct(&p, &w, &BoundaryCondition::Free, 20_000, 11, &QuadratureSpec::default()).unwrap();
        let z = ti.log_z_over_volume.z_score(&direct.log_z_over_volume);
        assert!(z.abs() < 3.0, "{ti:?} vs {direct:?}");
    }

    #[test]
    fn single_point_grid_is_direct_estimate() {
        let p = dirac_1d(0.3, 1.0);
        let w = Window::lambda(1, 3.0).unwrap();
        let opts = IntegrationOptions::default();
        let ti = pressure_thermo_integration(&p, &w, &BoundaryCondition::Free, &[0.5], 2, 3, &opts).unwrap();
        let d = partition_direct(&p.with_beta(0.5), &w, &BoundaryCondition::Free, opts.direct_samples, 3, &opts.quad).unwrap();
        assert_eq!(ti.log_z_over_volume.value, d.log_z_over_volume.value);
    }

    #[test]
    fn grids_must_ascend() {
        let p = dirac_1d(0.3, 1.0);
        let w = Window::lambda(1, 3.0).unwrap();
        let opts = IntegrationOptions::default();
        assert!(pressure_thermo_integration(&p, &w, &BoundaryCondition::Free, &[0.5, 0.2], 1, 3, &opts).is_err());
        assert!(pressure_thermo_integration(&p, &w, &BoundaryCondition::Free, &[], 1, 3, &opts).is_err());
    }

    #[test]
    fn pressure_decreases_in_beta() {
        let p = dirac_1d(0.5, 1.0);
        let w = Window::lambda(1, 3.0).unwrap();
        let q = QuadratureSpec::default();
        let values: Vec<f64> = [0.1, 0.5, 1.0, 2.0]
            .iter()
            .map(|&b| partition_direct(&p.with_beta(b), &w, &BoundaryCondition::Free, 5000, 4, &q).unwrap().log_z_over_volume.value)
            .collect();
        assert!(values.windows(2).all(|v| v[1] <= v[0]), "{values:?}");
    }

    #[test]
    fn empty_boundary_equals_free() {
        let p = dirac_1d(0.5, 1.0);
        let w = Window::lambda(1, 3.0).unwrap();
        let q = QuadratureSpec::default();
        let empty = BoundaryCondition::fixed(&crate::model::Configuration::new(1), &w, &p).unwrap();
        let a = partition_direct(&p, &w, &BoundaryCondition::Free, 1000, 5, &q).unwrap();
        let b = partition_direct(&p, &w, &empty, 1000, 5, &q).unwrap();
        assert_eq!(a.log_z_over_volume, b.log_z_over_volume);
    }

    #[test]
    fn comparison_rows_are_bounded() {
        let p = ModelParams::new(2, 0.2, 1.0, 0.1, MarkLaw::dirac(0.4).unwrap()).unwrap();
        let mut opts = BcComparisonOptions::with_uniform_grid(1.0, 4);
        opts.chains = 2;
        opts.boundary_sweeps = 100;
        opts.integration.schedule = Schedule { burn_in: 50, thin: 1, snapshots: 100 };
        opts.integration.direct_samples = 2000;
        let rows = pressure_bc_comparison(&p, &[3.0, 4.0], 1, &opts).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            for e in [&r.periodic, &r.free, &r.fixed] {
                let v = e.log_z_over_volume.value;
                assert!(v <= 0.0 && v >= -0.2 - 4.0 * e.log_z_over_volume.stderr, "{e:?}");
            }
        }
    }
}
