use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::model::{Configuration, MarkLaw, MarkedPoint, ModelParams, Window};
use crate::Scalar;

/// A `Poisson(mean)` count; zero for a nonpositive mean.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

/// A `Poisson(mean)` count conditioned on being at least one.
pub fn nonempty_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean > 1.0 {
        // Rejection accepts with probability 1 − e^{−mean} > 0.63.
        loop {
            let n = poisson_count(mean, rng);
            if n > 0 {
                return n;
            }
        }
    }
    // Inversion: P(K = 1 | K >= 1) = mean/(e^mean − 1), then the Poisson recursion.
    let u: f64 = rng.random();
    let mut p = if mean > 0.0 { mean / mean.exp_m1() } else { 1.0 };
    let mut cdf = p;
    let mut k = 1usize;
    while u >= cdf && p > 0.0 {
        p *= mean / (k + 1) as f64;
        cdf += p;
        k += 1;
    }
    k
}

/// A uniform position in the half-open window.
pub fn uniform_in<S: Scalar, R: Rng + ?Sized>(window: &Window<S>, rng: &mut R) -> [S; 3] {
    let mut x = [S::zero(); 3];
    for (i, xi) in x.iter_mut().enumerate().take(window.dim()) {
        let u: f64 = rng.random();
        *xi = window.lo(i) + S::of(u) * window.side();
        if *xi >= window.hi(i) {
            *xi = window.lo(i);
        }
    }
    x
}

/// Marked Poisson process on `window` with intensity `z dx ⊗ law`.
pub fn sample_marked_poisson<S: Scalar, R: Rng + ?Sized>(
    z: S,
    law: &MarkLaw<S>,
    window: &Window<S>,
    rng: &mut R,
) -> Configuration<S> {
    let n = poisson_count((z * window.volume()).f64(), rng);
    sample_marked_count(n, law, window, rng)
}

/// `n` independent uniform positions in `window` with marks from `law`.
pub fn sample_marked_count<S: Scalar, R: Rng + ?Sized>(
    n: usize,
    law: &MarkLaw<S>,
    window: &Window<S>,
    rng: &mut R,
) -> Configuration<S> {
    let d = window.dim();
    let mut config = Configuration::with_cell(d, window.side() / S::of(64.0));
    while config.len() < n {
        let x = uniform_in(window, rng);
        let radius = law.sample(rng);
        // Coincident positions have probability zero; redraw if one occurs.
        let _ = config.insert(MarkedPoint::at(x, radius));
    }
    config
}

/// `sample_poisson(params, window)`: the reference process `π^z_Λ`.
pub fn sample_poisson<S: Scalar, R: Rng + ?Sized>(
    params: &ModelParams<S>,
    window: &Window<S>,
    rng: &mut R,
) -> Configuration<S> {
    sample_marked_poisson(params.z, &params.mark_law, window, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MarkKind, MarkLaw};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nonempty_count_matches_truncated_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mean in [0.05, 0.7, 1.0, 3.0] {
            let n = 200_000;
            let draws: Vec<usize> = (0..n).map(|_| nonempty_poisson_count(mean, &mut rng)).collect();
            assert!(draws.iter().all(|&k| k >= 1));
            let m = draws.iter().sum::<usize>() as f64 / n as f64;
            // E[K | K >= 1] = mean/(1 − e^{−mean}).
            let exact = mean / -(-mean).exp_m1();
            let var = exact * (1.0 + mean) - exact * exact;
            assert!((m - exact).abs() < 4.0 * (var / n as f64).sqrt(), "mean {mean}: {m} vs {exact}");
            let ones = draws.iter().filter(|&&k| k == 1).count() as f64 / n as f64;
            let p1 = mean / mean.exp_m1();
            assert!((ones - p1).abs() < 4.0 * (p1 * (1.0 - p1) / n as f64).sqrt());
        }
    }

    #[test]
    fn count_mean_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ModelParams::new(2, 0.3, 1.0, 0.1, MarkLaw::dirac(0.2).unwrap()).unwrap();
        let w = Window::lambda(2, 4.0).unwrap();
        let counts: Vec<f64> = (0..10_000)
            .map(|_| sample_poisson(&p, &w, &mut rng).len() as f64)
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let lam = 4.8;
        assert!((mean - lam).abs() <= 3.0 * (lam / n).sqrt(), "{mean}");
        // Var of the sample variance of a Poisson: ≈ (λ + 2λ²)/n.
        assert!((var - lam).abs() <= 4.0 * ((lam + 2.0 * lam * lam) / n).sqrt(), "{var}");
    }

    #[test]
    fn positions_and_marks() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let law = MarkLaw::new(MarkKind::Dirac { r0: 0.7 }, 1.0).unwrap();
        let w = Window::new(3, [1.0, -2.0, 0.5], 3.0, false).unwrap();
        let c = sample_marked_poisson(2.0, &law, &w, &mut rng);
        assert!(!c.is_empty());
        assert!(c.iter().all(|p| w.contains(&p.x) && p.radius == 0.7));
    }

    #[test]
    fn deterministic() {
        let p = ModelParams::new(1, 2.0, 1.0, 0.1, MarkLaw::uniform(0.0, 1.0).unwrap()).unwrap();
        let w = Window::lambda(1, 5.0).unwrap();
        let a = sample_poisson(&p, &w, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_poisson(&p, &w, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_activity_is_mostly_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModelParams::new(2, 1e-9, 1.0, 0.1, MarkLaw::dirac(0.2).unwrap()).unwrap();
        let w = Window::lambda(2, 2.0).unwrap();
        assert!((0..1000).all(|_| sample_poisson(&p, &w, &mut rng).is_empty()));
    }
}
