use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mcmc::{GibbsSampler, MoveMix, Schedule};
use super::seeds::derive_seed;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{BoundaryCondition, EnergyModel};
use crate::model::{restrict, Configuration, Estimate, ModelParams, Window};
use crate::Scalar;

/// One compared statistic of the DLR check.
#[derive(Debug, Clone, PartialEq)]
pub struct DlrStat {
    pub name: &'static str,
    pub direct: Estimate<f64>,
    pub two_stage: Estimate<f64>,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlrReport {
    pub n_samples: usize,
    pub stats: Vec<DlrStat>,
}

impl DlrReport {
    pub fn max_abs_z(&self) -> f64 {
        self.stats.iter().map(|s| s.z_score.abs()).fold(0.0, f64::max)
    }
}

/// Options of [`dlr_consistency_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlrOptions {
    pub schedule: Schedule,
    /// Sweeps of the inner chain on the sub-window per two-stage sample.
    pub inner_sweeps: u64,
    pub mix: MoveMix,
}

impl Default for DlrOptions {
    fn default() -> Self {
        Self {
            schedule: Schedule {
                burn_in: 200,
                thin: 2,
                snapshots: 0,
            },
            inner_sweeps: 4,
            mix: MoveMix::default(),
        }
    }
}

fn inside<S: Scalar>(inner: &Window<S>, outer: &Window<S>) -> bool {
    (0..outer.dim()).all(|i| inner.lo(i) >= outer.lo(i) && inner.hi(i) <= outer.hi(i))
}

/// Exterior of the sub-window as seen from inside it: the rest of the
/// window plus the boundary configuration.
fn exterior<S: Scalar>(
    config: &Configuration<S>,
    sub: &Window<S>,
    outer: Option<&Configuration<S>>,
) -> Configuration<S> {
    let mut out = Configuration::with_cell(config.dim(), config.base_cell());
    for p in config.iter().filter(|p| !sub.contains(&p.x)) {
        let _ = out.insert(*p);
    }
    if let Some(z) = outer {
        for p in z.iter() {
            let _ = out.insert(*p);
        }
    }
    out
}

struct Stats {
    n: Vec<f64>,
    moment: Vec<f64>,
    energy: Vec<f64>,
}

impl Stats {
    fn new() -> Self {
        Self {
            n: Vec::new(),
            moment: Vec::new(),
            energy: Vec::new(),
        }
    }

    fn push<S: Scalar>(
        &mut self,
        params: &ModelParams<S>,
        sub: &Window<S>,
        inner: &Configuration<S>,
        ext: Configuration<S>,
    ) -> Result<()> {
        let model = EnergyModel::new(params, sub, BoundaryCondition::Fixed(ext))?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = model.conditional_energy(inner, &mut rng);
        self.n.push(inner.len() as f64);
        self.moment.push(inner.radius_moment().f64());
        self.energy.push(h.area_term.f64());
        Ok(())
    }
}

/// Compares `ω_Δ` drawn from `G_{Λ,z,β,ζ}` with the two-stage law: draw
/// `ζ'` from `G_{Λ,z,β,ζ}` and resample `Δ` from `G_{Δ,z,β,ζ'_{Δ^c}}`.
/// The inner chain starts from `ζ'_Δ`, which already has the target
/// conditional law, so a few sweeps suffice. Compared statistics: `N_Δ`,
/// `Σ_Δ R^d` and the conditional energy of `Δ`; z-scores use batch means.
pub fn dlr_consistency_check<S: Scalar>(
    params: &ModelParams<S>,
    window: &Window<S>,
    sub: &Window<S>,
    bc: BoundaryCondition<S>,
    n_samples: usize,
    seed: u64,
    options: &DlrOptions,
) -> Result<DlrReport> {
    if matches!(bc, BoundaryCondition::Periodic) {
        return Err(Error::Unsupported(
            "the DLR check compares free or fixed boundary conditions".into(),
        ));
    }
    let window = window.euclidean();
    let sub = sub.euclidean();
    if !inside(&sub, &window) {
        return Err(invalid("sub_window", "must lie inside the window"));
    }
    let outer = bc.outer().cloned();
    let schedule = Schedule {
        snapshots: n_samples,
        ..options.schedule
    };

    let mut direct = Stats::new();
    let mut chain = GibbsSampler::new(params, &window, bc.clone(), options.mix, derive_seed(seed, "dlr-direct", 0))?;
    for omega in chain.snapshots(&schedule) {
        let inner = restrict(&omega, &sub);
        direct.push(params, &sub, &inner, exterior(&omega, &sub, outer.as_ref()))?;
    }

    let mut staged = Stats::new();
    let mut chain = GibbsSampler::new(params, &window, bc, options.mix, derive_seed(seed, "dlr-outer", 0))?;
    for (i, zeta) in chain.snapshots(&schedule).into_iter().enumerate() {
        let ext = exterior(&zeta, &sub, outer.as_ref());
        let start = restrict(&zeta, &sub);
        let model = EnergyModel::new(params, &sub, BoundaryCondition::Fixed(ext.clone()))?;
        let mut inner = GibbsSampler::from_model(params, model, options.mix, derive_seed(seed, "dlr-inner", i as u64))?
            .with_audit_every(0)
            .with_initial(start)?;
        inner.sweeps(options.inner_sweeps);
        staged.push(params, &sub, inner.config(), ext)?;
    }

    let compare = |name, a: &[f64], b: &[f64]| {
        let (ea, eb) = (Estimate::from_series(a), Estimate::from_series(b));
        DlrStat {
            name,
            direct: ea,
            two_stage: eb,
            z_score: ea.z_score(&eb),
        }
    };
    Ok(DlrReport {
        n_samples,
        stats: vec![
            compare("count", &direct.n, &staged.n),
            compare("radius_moment", &direct.moment, &staged.moment),
            compare("energy", &direct.energy, &staged.energy),
        ],
    })
}
