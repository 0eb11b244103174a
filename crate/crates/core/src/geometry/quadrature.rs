use rand::Rng;

use crate::model::{Estimate, Position};
use crate::Scalar;

/// How sample points are laid out over a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Two jittered points per cell of a regular grid; the variance is
    /// estimated from the within-cell differences.
    Stratified,
    /// Independent random shifts of a regular lattice; the spread of the
    /// replicate means gives the standard error.
    LatticeShift { replicates: usize },
}

/// Settings for randomized quadrature. The point density is doubled until
/// the relative standard error falls below `target_rel_error` or
/// `max_points` is reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<S> {
    pub points_per_unit_volume: S,
    pub scheme: QuadratureScheme,
    pub target_rel_error: S,
    pub min_points: usize,
    pub max_points: usize,
}

impl<S: Scalar> Default for QuadratureSpec<S> {
    fn default() -> Self {
        Self {
            points_per_unit_volume: S::of(4096.0),
            scheme: QuadratureScheme::Stratified,
            target_rel_error: S::of(1e-3),
            min_points: 256,
            max_points: 1 << 20,
        }
    }
}

impl<S: Scalar> QuadratureSpec<S> {
    /// Fixed budget: no adaptive doubling beyond `points`.
    pub fn fixed(points: usize) -> Self {
        Self {
            points_per_unit_volume: S::zero(),
            scheme: QuadratureScheme::Stratified,
            target_rel_error: S::infinity(),
            min_points: points,
            max_points: points,
        }
    }

    pub fn with_target(mut self, target_rel_error: S) -> Self {
        self.target_rel_error = target_rel_error;
        self
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points.max(self.min_points);
        self
    }
}

fn cells_per_axis(points: usize, d: usize) -> usize {
    ((points as f64).powf(1.0 / d as f64).ceil() as usize).max(1)
}

/// One stratified pass with about `points` evaluations.
fn stratified_pass<S, R, F>(
    d: usize,
    lo: &Position<S>,
    width: &[f64; 3],
    points: usize,
    rng: &mut R,
    f: &mut F,
) -> Estimate<S>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: FnMut(&Position<S>) -> S,
{
    let m = cells_per_axis(points.div_ceil(2), d);
    let n_cells = m.pow(d as u32);
    let step: Vec<f64> = (0..d).map(|i| width[i] / m as f64).collect();
    let cell_vol: f64 = step.iter().product();
    let mut sum = 0.0;
    let mut var = 0.0;
    let mut idx = [0usize; 3];
    let mut z = *lo;
    for c in 0..n_cells {
        let mut rem = c;
        for slot in idx.iter_mut().take(d) {
            *slot = rem % m;
            rem /= m;
        }
        let mut pair = [0.0f64; 2];
        for v in pair.iter_mut() {
            for i in 0..d {
                let u: f64 = rng.random();
                z[i] = lo[i] + S::of((idx[i] as f64 + u) * step[i]);
            }
            *v = f(&z).f64();
        }
        sum += 0.5 * (pair[0] + pair[1]);
        var += 0.25 * (pair[0] - pair[1]).powi(2);
    }
    Estimate::new(
        S::of(sum * cell_vol),
        S::of(var.sqrt() * cell_vol),
        2 * n_cells,
    )
}

fn lattice_pass<S, R, F>(
    d: usize,
    lo: &Position<S>,
    width: &[f64; 3],
    points: usize,
    replicates: usize,
    rng: &mut R,
    f: &mut F,
) -> Estimate<S>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: FnMut(&Position<S>) -> S,
{
    let replicates = replicates.max(2);
    let m = cells_per_axis(points.div_ceil(replicates), d);
    let n = m.pow(d as u32);
    let vol: f64 = width[..d].iter().product();
    let mut means = Vec::with_capacity(replicates);
    let mut z = *lo;
    for _ in 0..replicates {
        let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let mut acc = 0.0;
        for c in 0..n {
            let mut rem = c;
            for i in 0..d {
                let k = rem % m;
                rem /= m;
                z[i] = lo[i] + S::of((k as f64 + shift[i]) / m as f64 * width[i]);
            }
            acc += f(&z).f64();
        }
        means.push(acc / n as f64 * vol);
    }
    let est = Estimate::from_samples(&means);
    Estimate::new(S::of(est.value), S::of(est.stderr), n * replicates)
}

/// `∫_{[lo,hi]} f` by randomized quadrature with adaptive refinement.
pub fn integrate_box<S, R, F>(
    d: usize,
    lo: &Position<S>,
    hi: &Position<S>,
    spec: &QuadratureSpec<S>,
    rng: &mut R,
    mut f: F,
) -> Estimate<S>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: FnMut(&Position<S>) -> S,
{
    let mut width = [0.0f64; 3];
    for i in 0..d {
        width[i] = (hi[i] - lo[i]).f64().max(0.0);
    }
    let vol: f64 = width[..d].iter().product();
    if vol <= 0.0 {
        return Estimate::exact(S::zero());
    }
    let target = spec.target_rel_error.f64();
    let mut points = ((spec.points_per_unit_volume.f64() * vol).ceil() as usize)
        .max(spec.min_points)
        .min(spec.max_points.max(spec.min_points));
    loop {
        let est = match spec.scheme {
            QuadratureScheme::Stratified => stratified_pass(d, lo, &width, points, rng, &mut f),
            QuadratureScheme::LatticeShift { replicates } => {
                lattice_pass(d, lo, &width, points, replicates, rng, &mut f)
            }
        };
        let (v, se) = (est.value.f64().abs(), est.stderr.f64());
        let floor = 1e-3 * target * vol;
        if se <= target * v || se <= floor || points >= spec.max_points {
            return est;
        }
        points = (points * 2).min(spec.max_points);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integrates_polynomial_within_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = QuadratureSpec::<f64>::default();
        let e = integrate_box(2, &[0.0, 0.0, 0.0], &[1.0, 2.0, 0.0], &spec, &mut rng, |z| z[0] * z[1]);
        assert!((e.value - 1.0).abs() <= 4.0 * e.stderr + 1e-9, "{e:?}");
        assert!(e.stderr > 0.0 && e.stderr < 1e-2);
    }

    #[test]
    fn lattice_shift_scheme() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = QuadratureSpec::<f64> {
            scheme: QuadratureScheme::LatticeShift { replicates: 16 },
            ..Default::default()
        };
        let e = integrate_box(3, &[-1.0; 3], &[1.0; 3], &spec, &mut rng, |z| {
            if z[0] * z[0] + z[1] * z[1] + z[2] * z[2] <= 1.0 { 1.0 } else { 0.0 }
        });
        let want = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((e.value - want).abs() <= 4.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn deterministic_for_seed() {
        let spec = QuadratureSpec::<f64>::default();
        let run = |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            integrate_box(2, &[0.0; 3], &[1.0; 3], &spec, &mut rng, |z| (z[0] + z[1]).sin())
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn empty_box_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = integrate_box(2, &[0.0; 3], &[0.0, 1.0, 0.0], &QuadratureSpec::default(), &mut rng, |_| 1.0f64);
        assert_eq!(e.value, 0.0);
    }
}
