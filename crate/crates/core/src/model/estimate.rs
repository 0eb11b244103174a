use crate::Scalar;

/// A Monte Carlo or quadrature value with its 1σ standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<S> {
    pub value: S,
    pub stderr: S,
    pub n_samples: usize,
}

impl<S: Scalar> Estimate<S> {
    pub fn new(value: S, stderr: S, n_samples: usize) -> Self {
        debug_assert!(stderr >= S::zero() || stderr.is_nan());
        Self {
            value,
            stderr,
            n_samples: n_samples.max(1),
        }
    }

    /// A value known without error.
    pub fn exact(value: S) -> Self {
        Self::new(value, S::zero(), 1)
    }

    /// Sample mean with the standard error of the mean.
    pub fn from_samples(xs: &[S]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self::new(S::nan(), S::nan(), 1);
        }
        let nf = S::of_usize(n);
        let mean = xs.iter().copied().sum::<S>() / nf;
        if n == 1 {
            return Self::new(mean, S::zero(), 1);
        }
        let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>() / (nf - S::one());
        Self::new(mean, (var / nf).sqrt(), n)
    }

    /// Mean of a correlated series with a batch-means standard error
    /// (`⌊√n⌋` batches); plain standard error for short series.
    pub fn from_series(xs: &[S]) -> Self {
        let n = xs.len();
        if n < 16 {
            return Self::from_samples(xs);
        }
        let b = (n as f64).sqrt().floor() as usize;
        let size = n / b;
        let means: Vec<S> = (0..b)
            .map(|i| xs[i * size..(i + 1) * size].iter().copied().sum::<S>() / S::of_usize(size))
            .collect();
        let batch = Self::from_samples(&means);
        let mean = xs.iter().copied().sum::<S>() / S::of_usize(n);
        Self::new(mean, batch.stderr, n)
    }

    /// Sum of independent estimates.
    pub fn add(self, other: Self) -> Self {
        Self::new(
            self.value + other.value,
            self.stderr.hypot(other.stderr),
            self.n_samples + other.n_samples,
        )
    }

    /// Difference of independent estimates.
    pub fn sub(self, other: Self) -> Self {
        Self::new(
            self.value - other.value,
            self.stderr.hypot(other.stderr),
            self.n_samples + other.n_samples,
        )
    }

    pub fn scale(self, k: S) -> Self {
        Self::new(self.value * k, self.stderr * k.abs(), self.n_samples)
    }

    /// `(self - other) / combined stderr`; zero when both are exact and equal.
    pub fn z_score(&self, other: &Self) -> S {
        let diff = self.value - other.value;
        let se = self.stderr.hypot(other.stderr);
        if se > S::zero() {
            diff / se
        } else if diff == S::zero() {
            S::zero()
        } else {
            diff.signum() * S::infinity()
        }
    }

    /// Whether `target` lies within `k` standard errors (plus `abs_tol`).
    pub fn agrees_with(&self, target: S, k: S, abs_tol: S) -> bool {
        (self.value - target).abs() <= k * self.stderr + abs_tol
    }
}

impl<S: Scalar> std::iter::Sum for Estimate<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Estimate::exact(S::zero()), Estimate::add)
    }
}
