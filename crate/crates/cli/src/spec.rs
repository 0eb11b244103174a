//! Experiment specification files (TOML).

use std::path::{Path, PathBuf};

use ao_gibbs::geometry::{QuadratureScheme, QuadratureSpec};
use ao_gibbs::model::{MarkKind, MarkLaw, ModelParams, TemperedEnvelope, Window};
use ao_gibbs::sampling::{MoveMix, Schedule};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub bc: BcSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub quadrature: QuadSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            window: WindowSpec::default(),
            bc: BcSpec::default(),
            sampler: SamplerSpec::default(),
            quadrature: QuadSpec::default(),
            run: RunSpec::default(),
            seeds: default_seeds(),
            outputs: default_outputs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub d: usize,
    pub z: f64,
    pub beta: f64,
    pub r: f64,
    #[serde(default)]
    pub marks: MarkSpec,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            d: 2,
            z: 0.2,
            beta: 1.0,
            r: 0.1,
            marks: MarkSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarkSpec {
    Dirac {
        r0: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Uniform {
        a: f64,
        b: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Weibull {
        scale: f64,
        shape: f64,
        cutoff: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

fn default_delta() -> f64 {
    1.0
}

impl Default for MarkSpec {
    fn default() -> Self {
        MarkSpec::Dirac { r0: 0.4, delta: 1.0 }
    }
}

impl MarkSpec {
    pub fn law(&self) -> ao_gibbs::Result<MarkLaw<f64>> {
        let (kind, delta) = match *self {
            MarkSpec::Dirac { r0, delta } => (MarkKind::Dirac { r0 }, delta),
            MarkSpec::Uniform { a, b, delta } => (MarkKind::Uniform { a, b }, delta),
            MarkSpec::Weibull { scale, shape, cutoff, delta } => (MarkKind::TruncatedWeibull { scale, shape, cutoff }, delta),
        };
        MarkLaw::new(kind, delta)
    }

    pub fn delta(&self) -> f64 {
        match *self {
            MarkSpec::Dirac { delta, .. } | MarkSpec::Uniform { delta, .. } | MarkSpec::Weibull { delta, .. } => delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    /// Side of `Λ_n`.
    pub n: f64,
    #[serde(default)]
    pub torus: bool,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { n: 4.0, torus: false }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BcSpec {
    #[default]
    Free,
    Periodic,
    Fixed { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub burn_in: u64,
    pub thin: u64,
    pub snapshots: usize,
    pub chains: usize,
    pub p_birth: f64,
    pub p_death: f64,
    pub p_translate: f64,
    pub p_resize: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        let mix = MoveMix::default();
        let s = Schedule::default();
        Self {
            burn_in: s.burn_in,
            thin: s.thin,
            snapshots: s.snapshots,
            chains: 2,
            p_birth: mix.p_birth,
            p_death: mix.p_death,
            p_translate: mix.p_translate,
            p_resize: mix.p_resize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub points_per_unit_volume: f64,
    #[serde(default)]
    pub scheme: SchemeSpec,
    pub target_rel_error: f64,
    pub min_points: usize,
    pub max_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeSpec {
    #[default]
    Stratified,
    LatticeShift,
}

impl Default for QuadSpec {
    fn default() -> Self {
        let q = QuadratureSpec::<f64>::default();
        Self {
            points_per_unit_volume: q.points_per_unit_volume,
            scheme: SchemeSpec::Stratified,
            target_rel_error: q.target_rel_error,
            min_points: q.min_points,
            max_points: q.max_points,
        }
    }
}

/// Parameters of the individual subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Window scales for pressure and energy-density runs.
    pub n_list: Vec<f64>,
    /// Intervals of the uniform β grid for thermodynamic integration.
    pub beta_steps: usize,
    pub direct_samples: usize,
    /// Largest `z|Λ|` for which the direct pressure estimator is also run.
    pub direct_max_activity: f64,
    pub palm_configs: usize,
    pub palm_points: usize,
    pub discontinuity_s: f64,
    /// Sample-size multiplier for `verify`.
    pub verify_scale: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            n_list: vec![4.0, 6.0, 8.0],
            beta_steps: 10,
            direct_samples: 20_000,
            direct_max_activity: 50.0,
            palm_configs: 20,
            palm_points: 5,
            discontinuity_s: 1.0,
            verify_scale: 1.0,
        }
    }
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: Self = toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Spec(m) => CliError::Spec(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, e: ao_gibbs::Error| CliError::Spec(format!("{name}: {e}"));
        self.params().map_err(|e| field("model", e))?;
        self.window().map_err(|e| field("window", e))?;
        self.mix().map_err(|e| field("sampler", e))?;
        self.envelope().map_err(|e| field("model.marks.delta", e))?;
        if self.seeds.is_empty() {
            return Err(CliError::Spec("seeds: must list at least one seed".into()));
        }
        if self.sampler.chains == 0 || self.sampler.snapshots == 0 || self.sampler.thin == 0 {
            return Err(CliError::Spec("sampler: chains, snapshots and thin must be positive".into()));
        }
        let q = &self.quadrature;
        if !(q.points_per_unit_volume > 0.0 && q.target_rel_error > 0.0 && q.min_points > 0 && q.max_points >= q.min_points) {
            return Err(CliError::Spec("quadrature: need positive density and target, 0 < min_points <= max_points".into()));
        }
        let run = &self.run;
        if run.n_list.is_empty() || run.n_list.iter().any(|n| !(*n > 0.0)) || run.n_list.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Spec("run.n_list: must be positive and strictly ascending".into()));
        }
        if run.beta_steps == 0 || run.direct_samples == 0 || !(run.verify_scale > 0.0) || !(run.discontinuity_s > 0.0) {
            return Err(CliError::Spec("run: beta_steps, direct_samples, verify_scale and discontinuity_s must be positive".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> ao_gibbs::Result<ModelParams<f64>> {
        let m = &self.model;
        ModelParams::new(m.d, m.z, m.beta, m.r, m.marks.law()?)
    }

    pub fn window(&self) -> ao_gibbs::Result<Window<f64>> {
        Ok(Window::lambda(self.model.d, self.window.n)?.with_torus(self.window.torus))
    }

    pub fn mix(&self) -> ao_gibbs::Result<MoveMix> {
        let s = &self.sampler;
        MoveMix::new(s.p_birth, s.p_death, s.p_translate, s.p_resize)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            burn_in: self.sampler.burn_in,
            thin: self.sampler.thin,
            snapshots: self.sampler.snapshots,
        }
    }

    pub fn quad(&self) -> QuadratureSpec<f64> {
        let q = &self.quadrature;
        QuadratureSpec {
            points_per_unit_volume: q.points_per_unit_volume,
            scheme: match q.scheme {
                SchemeSpec::Stratified => QuadratureScheme::Stratified,
                SchemeSpec::LatticeShift => QuadratureScheme::LatticeShift { replicates: 8 },
            },
            target_rel_error: q.target_rel_error,
            min_points: q.min_points,
            max_points: q.max_points,
        }
    }

    pub fn envelope(&self) -> ao_gibbs::Result<TemperedEnvelope> {
        TemperedEnvelope::with_default_gamma(self.model.d, self.model.marks.delta())
    }

    /// Canonical JSON: object keys sorted, no whitespace.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("spec serializes");
        serde_json::to_string(&value).expect("json value serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_uses_defaults() {
        let spec = ExperimentSpec::parse("").unwrap();
        assert_eq!(spec, ExperimentSpec::default());
    }

    #[test]
    fn hash_ignores_field_order() {
        let a = ExperimentSpec::parse("seeds = [3]\n[model]\nd = 1\nz = 0.5\nbeta = 1.0\nr = 0.2\n").unwrap();
        let b = ExperimentSpec::parse("[model]\nr = 0.2\nbeta = 1.0\nz = 0.5\nd = 1\n[window]\nn = 4.0\n").unwrap();
        let b = ExperimentSpec { seeds: vec![3], ..b };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), ExperimentSpec::default().hash());
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let err = ExperimentSpec::parse("[model]\nd = 2\nz = \"high\"\nbeta = 1.0\nr = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains('z'), "{msg}");
        let err = ExperimentSpec::parse("[modle]\n").unwrap_err().to_string();
        assert!(err.contains("modle"), "{err}");
    }

    #[test]
    fn domain_errors_are_spec_errors() {
        let err = ExperimentSpec::parse("[model]\nd = 2\nz = -1.0\nbeta = 1.0\nr = 0.1\n").unwrap_err();
        assert!(matches!(err, CliError::Spec(_)));
        assert!(ExperimentSpec::parse("seeds = []").is_err());
        assert!(ExperimentSpec::parse("[bc]\nkind = \"fixed\"\npath = \"z.txt\"\n").is_ok());
    }
}
