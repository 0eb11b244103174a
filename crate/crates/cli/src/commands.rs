//! Subcommands. Each writes a CSV table and a run manifest into the output
//! directory and reports whether its assertions held.

use std::path::{Path, PathBuf};

use ao_gibbs::estimators::{
    discontinuity_demo, energy_density_curve, palm_energy_identity_check, partition_direct,
    pressure_thermo_integration, sampled_boundary, BcComparisonOptions, DensityOptions, IntegrationOptions,
};
use ao_gibbs::hamiltonian::BoundaryCondition;
use ao_gibbs::model::{Estimate, Window};
use ao_gibbs::sampling::{derive_seed, rng_for, GibbsSampler};
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{random_hardcore, Check, Sizes, Suite};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::snapshot::{load_snapshot, save_snapshot, Snapshot};
use crate::spec::{BcSpec, ExperimentSpec};
use crate::table::{self, Row};

/// Resolved inputs shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Context {
    pub spec: ExperimentSpec,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

impl Context {
    /// `seed` and `out` override the spec's seed list and output directory.
    pub fn new(spec: ExperimentSpec, seed: Option<u64>, out: Option<PathBuf>) -> Self {
        let seeds = seed.map(|s| vec![s]).unwrap_or_else(|| spec.seeds.clone());
        let out = out.unwrap_or_else(|| spec.outputs.clone());
        Self { spec, seeds, out }
    }

    fn prepare(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))
    }

    fn boundary(&self, window: &Window<f64>) -> Result<BoundaryCondition<f64>, CliError> {
        Ok(match &self.spec.bc {
            BcSpec::Free => BoundaryCondition::Free,
            BcSpec::Periodic => BoundaryCondition::Periodic,
            BcSpec::Fixed { path } => {
                let snap = load_snapshot(path)?;
                BoundaryCondition::fixed(&snap.config, window, &self.spec.params()?)?
            }
        })
    }
}

/// Result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

fn write_table(ctx: &Context, manifest: &mut RunManifest, name: &str, rows: &[Row]) -> Result<PathBuf, CliError> {
    let path = ctx.out.join(name);
    table::write(&path, rows, &ctx.spec.hash())?;
    manifest.outputs.push(path.clone());
    Ok(path)
}

fn finish(ctx: &Context, manifest: RunManifest, passed: bool) -> Result<Outcome, CliError> {
    let mut files = manifest.outputs.clone();
    files.push(manifest.finish(&ctx.out)?);
    Ok(Outcome { passed, files })
}

/// Runs the Gibbs sampler; reports means of N, ΣR^d and the area energy per
/// chain, acceptance rates, and saves each chain's final configuration.
pub fn sample(ctx: &Context) -> Result<Outcome, CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let params = spec.params()?;
    let window = spec.window()?;
    let bc = ctx.boundary(&window)?;
    let mix = spec.mix()?;
    let schedule = spec.schedule();
    let mut manifest = RunManifest::start(&spec.hash(), "sample");
    let mut rows = Vec::new();
    for &seed in &ctx.seeds {
        let chains: Vec<u64> = (0..spec.sampler.chains as u64).map(|c| derive_seed(seed, "chain", c)).collect();
        for (c, &s) in chains.iter().enumerate() {
            manifest.seed(seed, format!("chain{c}"), s);
        }
        let results: Vec<Result<_, CliError>> = chains
            .par_iter()
            .map(|&s| {
                let mut chain = GibbsSampler::new(&params, &window, bc.clone(), mix, s)?;
                let (mut counts, mut moments, mut energies) = (Vec::new(), Vec::new(), Vec::new());
                chain.run(&schedule, |state| {
                    counts.push(state.config.len() as f64);
                    moments.push(state.config.radius_moment());
                    energies.push(state.energy.area_term);
                });
                Ok((counts, moments, energies, chain.state().clone()))
            })
            .collect();
        for (c, result) in results.into_iter().enumerate() {
            let (counts, moments, energies, state) = result?;
            let bc_name = bc.name();
            let label = |q: &str| format!("chain{c}_{q}");
            rows.push(Row::new(seed, window.side(), bc_name, &label("mean_count"), Estimate::from_series(&counts)));
            rows.push(Row::new(seed, window.side(), bc_name, &label("mean_radius_moment"), Estimate::from_series(&moments)));
            rows.push(Row::new(seed, window.side(), bc_name, &label("mean_area_energy"), Estimate::from_series(&energies)));
            for (k, kind) in ["birth", "death", "translate", "resize"].iter().enumerate() {
                let stats = &state.acceptance_stats;
                rows.push(Row::new(
                    seed,
                    window.side(),
                    bc_name,
                    &label(&format!("acceptance_{kind}")),
                    Estimate::new(stats.rate(k), 0.0, stats.proposed[k] as usize),
                ));
            }
            let path = ctx.out.join(format!("final_seed{seed}_chain{c}.txt"));
            save_snapshot(
                &path,
                &Snapshot {
                    n: window.side(),
                    config: state.config.clone(),
                },
            )?;
            manifest.outputs.push(path);
        }
    }
    write_table(ctx, &mut manifest, "sample.csv", &rows)?;
    finish(ctx, manifest, true)
}

/// `log Z/|Λ_n|` under free, periodic and fixed boundary conditions, by
/// thermodynamic integration and, for small `z|Λ|`, directly.
pub fn pressure(ctx: &Context) -> Result<Outcome, CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let params = spec.params()?;
    let run = &spec.run;
    let mut grid_options = BcComparisonOptions::with_uniform_grid(params.beta, run.beta_steps);
    grid_options.chains = spec.sampler.chains;
    let options = IntegrationOptions {
        schedule: spec.schedule(),
        mix: spec.mix()?,
        direct_samples: run.direct_samples,
        quad: spec.quad(),
    };
    let mut manifest = RunManifest::start(&spec.hash(), "pressure");
    let mut rows = Vec::new();
    for &seed in &ctx.seeds {
        for (i, &n) in run.n_list.iter().enumerate() {
            let window = Window::lambda(params.d, n)?;
            let fixed = match &spec.bc {
                BcSpec::Fixed { .. } => ctx.boundary(&window)?,
                _ => {
                    let s = derive_seed(seed, "boundary", i as u64);
                    manifest.seed(seed, format!("boundary_n{n}"), s);
                    sampled_boundary(&params, &window, grid_options.frame, grid_options.boundary_sweeps, s)?
                }
            };
            for (j, bc) in [BoundaryCondition::Free, BoundaryCondition::Periodic, fixed].iter().enumerate() {
                let s = derive_seed(seed, "pressure", (i * 3 + j) as u64);
                manifest.seed(seed, format!("pressure_n{n}_{}", bc.name()), s);
                if params.z * window.volume() <= run.direct_max_activity {
                    match partition_direct(&params, &window, bc, run.direct_samples, s, &options.quad) {
                        Ok(e) => rows.push(Row::new(seed, n, bc.name(), "pressure_direct", e.log_z_over_volume)),
                        Err(ao_gibbs::Error::AllZero(..)) => {
                            log::warn!("direct estimator: every weight vanished at n = {n}, bc = {}", bc.name())
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                let ti = pressure_thermo_integration(&params, &window, bc, &grid_options.beta_grid, spec.sampler.chains, s, &options)?;
                rows.push(Row::new(seed, n, bc.name(), "pressure_thermo_integration", ti.log_z_over_volume));
            }
        }
    }
    write_table(ctx, &mut manifest, "pressure.csv", &rows)?;
    finish(ctx, manifest, true)
}

/// Energy density by direct evaluation and by the Palm representation.
pub fn energy_density(ctx: &Context) -> Result<Outcome, CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let params = spec.params()?;
    let bc = ctx.boundary(&spec.window()?)?;
    let options = DensityOptions {
        schedule: spec.schedule(),
        mix: spec.mix()?,
        quad: spec.quad(),
    };
    let mut manifest = RunManifest::start(&spec.hash(), "energy-density");
    let mut rows = Vec::new();
    for &seed in &ctx.seeds {
        let s = derive_seed(seed, "energy-density", 0);
        manifest.seed(seed, "energy-density", s);
        for r in energy_density_curve(&params, &bc, &spec.run.n_list, spec.sampler.chains, s, &options)? {
            rows.push(Row::new(seed, r.n, r.bc, "energy_density_direct", r.direct));
            rows.push(Row::new(seed, r.n, r.bc, "energy_density_palm", r.palm));
            rows.push(Row::exact(seed, r.n, r.bc, "palm_direct_z", r.z_score));
            rows.push(Row::exact(seed, r.n, r.bc, "mean_count", r.mean_count));
        }
    }
    write_table(ctx, &mut manifest, "energy_density.csv", &rows)?;
    finish(ctx, manifest, true)
}

/// Periodic energy vs the sum of x-wise summands on random torus
/// configurations; fails if any configuration misses at 3σ.
pub fn palm_check(ctx: &Context) -> Result<Outcome, CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let params = spec.params()?;
    let window = spec.window()?.with_torus(true);
    let quad = spec.quad();
    let mut manifest = RunManifest::start(&spec.hash(), "palm-check");
    let mut rows = Vec::new();
    let mut passed = true;
    for &seed in &ctx.seeds {
        let mut rng = rng_for(seed, "palm-check", 0);
        manifest.seed(seed, "palm-check", derive_seed(seed, "palm-check", 0));
        for i in 0..spec.run.palm_configs {
            let c = random_hardcore(params.d, window.side(), spec.run.palm_points, &params.mark_law, true, &mut rng);
            let check = palm_energy_identity_check(&c, &window, &params, &quad, &mut rng)?;
            passed &= check.passes;
            rows.push(Row::new(seed, window.side(), "periodic", &format!("config{i}_energy"), check.lhs));
            rows.push(Row::new(seed, window.side(), "periodic", &format!("config{i}_palm_sum"), check.rhs));
            rows.push(Row::exact(seed, window.side(), "periodic", &format!("config{i}_z"), check.z_score));
        }
    }
    write_table(ctx, &mut manifest, "palm_check.csv", &rows)?;
    finish(ctx, manifest, passed)
}

/// Good and bad lattice configurations across window scales.
pub fn discontinuity(ctx: &Context) -> Result<Outcome, CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let params = spec.params()?;
    let mut manifest = RunManifest::start(&spec.hash(), "discontinuity");
    let mut rows = Vec::new();
    let demo = discontinuity_demo(params.d, spec.run.discontinuity_s, params.r, &spec.run.n_list, 8)?;
    for &seed in &ctx.seeds {
        for r in &demo {
            rows.push(Row::exact(seed, r.n, "free", "good_points", r.good_points));
            rows.push(Row::exact(seed, r.n, "free", "good_energy_density", r.good_density));
            rows.push(Row::exact(seed, r.n, "free", "good_density_limit", r.good_limit));
            rows.push(Row::exact(seed, r.n, "free", "bad_points", r.bad_points as f64));
            rows.push(Row::exact(seed, r.n, "free", "bad_hardcore_violated", if r.bad_hardcore { 1.0 } else { 0.0 }));
            rows.push(Row::exact(seed, r.n, "free", "bad_energy", r.bad_energy));
        }
    }
    write_table(ctx, &mut manifest, "discontinuity.csv", &rows)?;
    finish(ctx, manifest, true)
}

/// Machine-readable verification report. It carries no timestamps, so equal
/// inputs give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub scale: f64,
    pub spec_sha256: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn report_path(out: &Path, suite: Suite) -> PathBuf {
    out.join(format!("verify_{}.json", suite.name()))
}

/// Runs a property suite with the first seed.
pub fn verify(ctx: &Context, suite: Suite) -> Result<(Outcome, VerifyReport), CliError> {
    ctx.prepare()?;
    let spec = &ctx.spec;
    let seed = ctx.seeds[0];
    let mut manifest = RunManifest::start(&spec.hash(), &format!("verify {}", suite.name()));
    manifest.seed(seed, suite.name(), seed);
    let checks = suite.run(seed, Sizes::scaled(spec.run.verify_scale));
    let report = VerifyReport {
        suite: suite.name().into(),
        seed,
        scale: spec.run.verify_scale,
        spec_sha256: spec.hash(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    let path = report_path(&ctx.out, suite);
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    manifest.outputs.push(path);
    let outcome = finish(ctx, manifest, report.passed)?;
    Ok((outcome, report))
}
