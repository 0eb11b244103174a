use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{ball_volume, integrate_box, Ball, BallSet, QuadratureSpec};
use crate::hamiltonian::{xwise_neighbours, xwise_palm_summand, BoundaryCondition, EnergyModel};
use crate::model::{dist, sub, Configuration, Estimate, ModelParams, PeriodicView, Position, Window};
use crate::sampling::{derive_seed, rng_for, GibbsSampler, MoveMix, Schedule};

/// Outcome of [`palm_energy_identity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PalmCheck {
    /// Periodic energy `H_{Λ_n,per}(ω)`; infinite under the hardcore veto.
    pub lhs: Estimate<f64>,
    /// Sum of x-wise summands over the periodized configuration.
    pub rhs: Estimate<f64>,
    pub z_score: f64,
    pub passes: bool,
}

/// Checks `H_{Λ_n,per}(ω) = Σ_{x∈ω} f_H(R_x, θ_x ω^{(n)})`, i.e.
/// `|Λ_n| H(R_{n,ω})`, at three combined standard errors.
pub fn palm_energy_identity_check<R: Rng + ?Sized>(
    config: &Configuration<f64>,
    window: &Window<f64>,
    params: &ModelParams<f64>,
    quad: &QuadratureSpec<f64>,
    rng: &mut R,
) -> Result<PalmCheck> {
    let torus = window.with_torus(true);
    PeriodicView::new(config, &torus)?;
    let model = EnergyModel::new(params, &torus, BoundaryCondition::Periodic)?.with_quadrature(*quad);
    let h = model.conditional_energy(config, rng);
    if !h.finite {
        let inf = Estimate::exact(f64::INFINITY);
        return Ok(PalmCheck {
            lhs: inf,
            rhs: inf,
            z_score: 0.0,
            passes: true,
        });
    }
    let lhs = Estimate::new(h.area_term, h.quad_stderr, 1);
    let mut rhs = Estimate::exact(0.0);
    for i in 0..config.len() {
        rhs = rhs.add(xwise_palm_summand(config, i, params.r, Some(&torus), quad, rng)?);
    }
    let z = lhs.z_score(&rhs);
    let passes = (lhs.value - rhs.value).abs()
        <= 3.0 * lhs.stderr.hypot(rhs.stderr) + 1e-9 * (1.0 + lhs.value.abs());
    Ok(PalmCheck {
        lhs,
        rhs,
        z_score: z,
        passes,
    })
}

/// `|Λ_n ∩ ⋂_i (Λ_n − u_i)| / |Λ_n|` for displacements `u_i`, as a product
/// of one-dimensional overlaps.
pub fn box_overlap_weight(d: usize, n: f64, shifts: &[Position<f64>]) -> f64 {
    (0..d)
        .map(|k| {
            let hi = shifts.iter().map(|u| u[k]).fold(0.0, f64::max);
            let lo = shifts.iter().map(|u| u[k]).fold(0.0, f64::min);
            ((n - (hi - lo)) / n).max(0.0)
        })
        .product()
}

/// `Σ_{S ⊆ covering} (−1)^{|S|} w(S) / (|S| + 1)` with `w(∅) = 1`.
fn subset_weight(d: usize, n: f64, covering: &[Position<f64>]) -> f64 {
    let m = covering.len();
    let mut total = 0.0;
    let mut chosen: Vec<Position<f64>> = Vec::with_capacity(m);
    for mask in 0u32..(1u32 << m) {
        chosen.clear();
        for (j, u) in covering.iter().enumerate() {
            if mask & (1 << j) != 0 {
                chosen.push(*u);
            }
        }
        let k = chosen.len();
        let w = if k == 0 { 1.0 } else { box_overlap_weight(d, n, &chosen) };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * w / (k as f64 + 1.0);
    }
    total
}

/// `f_{H,n}(R_o, θ_x ω)`: the x-wise summand with each k-wise term weighted
/// by the box overlap of the displaced windows. `others` are the enlarged
/// balls of the other points (positions absolute), `own` the enlarged ball
/// of the origin point. Exact in one dimension.
pub fn finite_palm_summand<R: Rng + ?Sized>(
    d: usize,
    n: f64,
    own: &Ball<f64>,
    others: &[Ball<f64>],
    quad: &QuadratureSpec<f64>,
    rng: &mut R,
) -> Result<Estimate<f64>> {
    let near: Vec<Ball<f64>> = others
        .iter()
        .filter(|b| dist(&b.center, &own.center) < b.radius + own.radius)
        .copied()
        .collect();
    if near.is_empty() {
        return Ok(Estimate::exact(ball_volume(d, own.radius)?));
    }
    let shifts: Vec<Position<f64>> = near.iter().map(|b| sub(&b.center, &own.center)).collect();
    let integrand = |z: &Position<f64>| -> f64 {
        let covering: Vec<Position<f64>> = near
            .iter()
            .zip(&shifts)
            .filter(|(b, _)| b.contains(z))
            .map(|(_, u)| *u)
            .collect();
        subset_weight(d, n, &covering)
    };
    if d == 1 {
        let (a, b) = (own.center[0] - own.radius, own.center[0] + own.radius);
        let mut cuts = vec![a, b];
        for nb in &near {
            for e in [nb.center[0] - nb.radius, nb.center[0] + nb.radius] {
                if e > a && e < b {
                    cuts.push(e);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                let mid = [(w[0] + w[1]) / 2.0, 0.0, 0.0];
                total += (w[1] - w[0]) * integrand(&mid);
            }
        }
        return Ok(Estimate::exact(total));
    }
    let set = BallSet::new(d, near.clone());
    let mut lo = own.center;
    let mut hi = own.center;
    for k in 0..d {
        lo[k] -= own.radius;
        hi[k] += own.radius;
    }
    Ok(integrate_box(d, &lo, &hi, quad, rng, |z| {
        if !own.contains(z) {
            0.0
        } else if !set.any_containing(z) {
            1.0
        } else {
            integrand(z)
        }
    }))
}

/// Per-volume Palm estimator `|Λ_n|^{-1} Σ_{x∈ω} f_{H,n}(R_x, θ_x ω')` where
/// `ω'` is the periodization of `ω` when `periodic`, else `ω` itself.
pub fn palm_density<R: Rng + ?Sized>(
    config: &Configuration<f64>,
    window: &Window<f64>,
    r: f64,
    periodic: bool,
    quad: &QuadratureSpec<f64>,
    rng: &mut R,
) -> Result<Estimate<f64>> {
    let d = config.dim();
    let n = window.side();
    let torus = window.with_torus(true);
    let mut total = Estimate::exact(0.0);
    for i in 0..config.len() {
        let (own, others) = xwise_neighbours(config, i, r, periodic.then_some(&torus))?;
        total = total.add(finite_palm_summand(d, n, &own, &others, quad, rng)?);
    }
    Ok(total.scale(1.0 / window.volume()))
}

/// One row of [`energy_density_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub n: f64,
    pub bc: &'static str,
    /// Mean of `H_{Λ_n,∅}(ω)/|Λ_n|` over snapshots.
    pub direct: Estimate<f64>,
    /// Mean of the `f_{H,n}` Palm estimator over the same snapshots.
    pub palm: Estimate<f64>,
    pub z_score: f64,
    pub mean_count: f64,
}

/// Options of [`energy_density_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    pub schedule: Schedule,
    pub mix: MoveMix,
    pub quad: QuadratureSpec<f64>,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            schedule: Schedule {
                burn_in: 200,
                thin: 5,
                snapshots: 200,
            },
            mix: MoveMix::default(),
            quad: QuadratureSpec::default().with_target(1e-2),
        }
    }
}

/// Energy density `P[H_{Λ_n,∅}]/|Λ_n|` of chain snapshots on `Λ_n` for each
/// `n`, by direct evaluation and by the finite-volume Palm representation.
/// Under periodic boundary conditions the snapshot law is stationary after
/// periodization and both estimate the same quantity.
pub fn energy_density_curve(
    params: &ModelParams<f64>,
    bc: &BoundaryCondition<f64>,
    n_list: &[f64],
    chains: usize,
    seed: u64,
    options: &DensityOptions,
) -> Result<Vec<DensityRow>> {
    let periodic = matches!(bc, BoundaryCondition::Periodic);
    n_list
        .iter()
        .enumerate()
        .map(|(ni, &n)| {
            let window = Window::lambda(params.d, n)?;
            let results: Vec<Result<(Vec<f64>, Vec<Estimate<f64>>, f64)>> = (0..chains.max(1))
                .into_par_iter()
                .map(|c| {
                    let tag = derive_seed(seed, "density", ni as u64);
                    let mut chain = GibbsSampler::new(params, &window, bc.clone(), options.mix, derive_seed(tag, "chain", c as u64))?;
                    let snaps = chain.snapshots(&options.schedule);
                    let free = EnergyModel::new(params, &window, BoundaryCondition::Free)?.with_quadrature(options.quad);
                    let mut rng = rng_for(tag, "quad", c as u64);
                    let mut direct = Vec::with_capacity(snaps.len());
                    let mut palm = Vec::with_capacity(snaps.len());
                    let mut count = 0.0;
                    for s in &snaps {
                        direct.push(free.area_energy(s, &mut rng).value / window.volume());
                        palm.push(palm_density(s, &window, params.r, periodic, &options.quad, &mut rng)?);
                        count += s.len() as f64;
                    }
                    Ok((direct, palm, count / snaps.len().max(1) as f64))
                })
                .collect();
            let results = results.into_iter().collect::<Result<Vec<_>>>()?;
            let mut direct_means = Vec::new();
            let mut palm_means = Vec::new();
            let mut mean_count = 0.0;
            for (direct, palm, count) in &results {
                direct_means.push(Estimate::from_series(direct));
                let values: Vec<f64> = palm.iter().map(|e| e.value).collect();
                let mut est = Estimate::from_series(&values);
                // Add the quadrature error of the mean.
                let q = palm.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / palm.len().max(1) as f64;
                est.stderr = est.stderr.hypot(q);
                palm_means.push(est);
                mean_count += count / results.len() as f64;
            }
            let pool = |v: &[Estimate<f64>]| {
                let k = v.len() as f64;
                Estimate::new(
                    v.iter().map(|e| e.value).sum::<f64>() / k,
                    v.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k,
                    v.iter().map(|e| e.n_samples).sum(),
                )
            };
            let direct = pool(&direct_means);
            let palm = pool(&palm_means);
            Ok(DensityRow {
                n,
                bc: bc.name(),
                z_score: direct.z_score(&palm),
                direct,
                palm,
                mean_count,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::QuadratureScheme;
    use crate::model::{MarkLaw, MarkedPoint};
    use crate::sampling::rng_for;
    use rand::Rng;

    fn params(d: usize) -> ModelParams<f64> {
        ModelParams::new(d, 0.5, 1.0, 0.3, MarkLaw::uniform(0.2, 0.6).unwrap()).unwrap()
    }

    /// Hardcore-respecting torus configuration by sequential rejection.
    fn torus_config(d: usize, n: f64, k: usize, rng: &mut impl Rng) -> Configuration<f64> {
        let p = params(d);
        let torus = Window::lambda(d, n).unwrap().with_torus(true);
        let model = EnergyModel::new(&p, &torus, BoundaryCondition::Periodic).unwrap();
        let mut c = Configuration::new(d);
        let mut tries = 0;
        while c.len() < k && tries < 10_000 {
            tries += 1;
            let mut x = [0.0; 3];
            for xi in x.iter_mut().take(d) {
                *xi = rng.random_range(-n / 2.0..n / 2.0);
            }
            let q = MarkedPoint::at(x, p.mark_law.sample(rng));
            if !model.point_conflicts(&c, &q, None) {
                c.insert(q).unwrap();
            }
        }
        c
    }

    fn quad() -> QuadratureSpec<f64> {
        QuadratureSpec {
            points_per_unit_volume: 4096.0,
            scheme: QuadratureScheme::Stratified,
            target_rel_error: 2e-3,
            min_points: 256,
            max_points: 1 << 18,
        }
    }

    #[test]
    fn identity_on_empty_and_single_point() {
        let mut rng = rng_for(1, "palm", 0);
        let w = Window::lambda(2, 5.0).unwrap();
        let p = params(2);
        let empty = palm_energy_identity_check(&Configuration::new(2), &w, &p, &quad(), &mut rng).unwrap();
        assert_eq!(empty.lhs.value, 0.0);
        assert_eq!(empty.rhs.value, 0.0);
        let one = Configuration::from_points(2, [MarkedPoint::at([0.3, -1.0, 0.0], 0.5)]).unwrap();
        let check = palm_energy_identity_check(&one, &w, &p, &quad(), &mut rng).unwrap();
        let v = std::f64::consts::PI * 0.8 * 0.8;
        assert!((check.lhs.value - v).abs() < 1e-9 && (check.rhs.value - v).abs() < 1e-9);
    }

    #[test]
    fn identity_on_random_torus_configurations() {
        let mut rng = rng_for(2, "palm", 0);
        for d in [1, 2] {
            for _ in 0..10 {
                let w = Window::lambda(d, 4.0).unwrap();
                let c = torus_config(d, 4.0, 5, &mut rng);
                let check = palm_energy_identity_check(&c, &w, &params(d), &quad(), &mut rng).unwrap();
                assert!(check.passes, "d={d}: {check:?}");
            }
        }
    }

    #[test]
    fn box_weight_is_product_of_overlaps() {
        let w = box_overlap_weight(2, 4.0, &[[1.0, 0.0, 0.0], [0.0, -2.0, 0.0]]);
        assert!((w - 0.75 * 0.5).abs() < 1e-15);
        assert_eq!(box_overlap_weight(1, 2.0, &[[3.0, 0.0, 0.0]]), 0.0);
    }

    #[test]
    fn large_window_recovers_plain_summand() {
        let mut rng = rng_for(3, "palm", 0);
        let own = Ball::new([0.0; 3], 1.0);
        let others = [Ball::new([1.2, 0.0, 0.0], 0.7), Ball::new([-0.5, 0.0, 0.0], 0.4)];
        let plain = crate::hamiltonian::xwise_summand(1, &own, &others, &quad(), &mut rng).unwrap();
        let big = finite_palm_summand(1, 1e9, &own, &others, &quad(), &mut rng).unwrap();
        assert!((plain.value - big.value).abs() < 1e-6);
    }

    #[test]
    fn palm_density_equals_shift_average_of_free_energy() {
        // For a fixed torus configuration, the uniformly shifted periodization
        // restricted to the window has mean free energy equal to the Palm form.
        let mut rng = rng_for(4, "palm", 0);
        let n = 5.0;
        let w = Window::lambda(1, n).unwrap();
        let torus = w.with_torus(true);
        let p = params(1);
        let c = torus_config(1, n, 4, &mut rng);
        let palm = palm_density(&c, &w, p.r, true, &quad(), &mut rng).unwrap();
        let free = EnergyModel::new(&p, &w, BoundaryCondition::Free).unwrap();
        let m = 20_000;
        let samples: Vec<f64> = (0..m)
            .map(|_| {
                let y = rng.random_range(-n / 2.0..n / 2.0);
                let pts = c.iter().map(|q| MarkedPoint::at(torus.wrap(&[q.x[0] - y, 0.0, 0.0]), q.radius));
                let shifted = Configuration::from_points(1, pts).unwrap();
                free.area_energy(&shifted, &mut rng).value / n
            })
            .collect();
        let direct = Estimate::from_samples(&samples);
        assert!(direct.agrees_with(palm.value, 4.0, 1e-9), "{direct:?} vs {palm:?}");
    }

    #[test]
    fn density_curve_estimators_agree_on_periodic_chains() {
        let p = ModelParams::new(1, 0.6, 1.0, 0.2, MarkLaw::uniform(0.1, 0.4).unwrap()).unwrap();
        let rows = energy_density_curve(&p, &BoundaryCondition::Periodic, &[4.0, 8.0], 2, 5, &DensityOptions::default()).unwrap();
        for r in &rows {
            assert!(r.z_score.abs() < 4.0, "{r:?}");
            assert!(r.direct.value > 0.0);
        }
    }
}
