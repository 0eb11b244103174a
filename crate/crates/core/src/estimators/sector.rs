use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::hamiltonian::{BoundaryCondition, EnergyModel};
use crate::model::{Configuration, Estimate, MarkedPoint, ModelParams, Window};
use crate::sampling::{derive_seed, rng_for, uniform_in};

const CHUNK: usize = 4096;

/// Sector weights `w_N = z^N/N! ∫_{(Λ×ℝ_+)^N} exp(−βH) dx ℛ^N(dR)` for
/// `N = 0..=n_max`, each by Monte Carlo over uniform positions and
/// independent marks: `w_N = (z|Λ|)^N/N! · E[exp(−βH)]`. Then
/// `Z = exp(−z|Λ|) Σ_N w_N` when higher sectors vanish, and the law of the
/// point count is `w_N / Σ w`.
pub fn sector_weights(
    params: &ModelParams<f64>,
    window: &Window<f64>,
    bc: &BoundaryCondition<f64>,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Estimate<f64>>> {
    if samples < 2 {
        return Err(invalid("samples", "need at least two samples per sector"));
    }
    let model = EnergyModel::new(params, window, bc.clone())?;
    let plain = window.euclidean();
    let zv = params.z * window.volume();
    let mut out = vec![Estimate::exact(model.conditional_energy(&Configuration::new(params.d), &mut rng_for(seed, "sector-empty", 0)).boltzmann(params.beta))];
    let mut prefactor = 1.0;
    for n in 1..=n_max {
        prefactor *= zv / n as f64;
        let tag = derive_seed(seed, "sector", n as u64);
        let chunks = samples.div_ceil(CHUNK);
        let values: Vec<f64> = (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = rng_for(tag, "chunk", c as u64);
                let len = CHUNK.min(samples - c * CHUNK);
                let model = &model;
                let plain = &plain;
                (0..len)
                    .map(move |_| {
                        let points = (0..n).map(|_| MarkedPoint::at(uniform_in(plain, &mut rng), params.mark_law.sample(&mut rng)));
                        match Configuration::from_points(params.d, points) {
                            Ok(cfg) => model.conditional_energy(&cfg, &mut rng).boltzmann(params.beta),
                            // Coincident positions have probability zero.
                            Err(_) => 0.0,
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        out.push(Estimate::from_samples(&values).scale(prefactor));
    }
    Ok(out)
}

/// `Z ≈ exp(−z|Λ|) Σ_N w_N`.
pub fn sector_partition(weights: &[Estimate<f64>], z_volume: f64) -> Estimate<f64> {
    weights
        .iter()
        .fold(Estimate::exact(0.0), |acc, w| acc.add(*w))
        .scale((-z_volume).exp())
}

/// Point-count law `w_N / Σ_M w_M` (point values only).
pub fn sector_count_law(weights: &[Estimate<f64>]) -> Vec<f64> {
    let total: f64 = weights.iter().map(|w| w.value).sum();
    weights.iter().map(|w| w.value / total).collect()
}
