use rand::Rng;

use crate::error::{invalid, Result};
use crate::model::Estimate;
use crate::sampling::poisson_count;

fn check_activities(z_p: f64, z_q: f64, volume: f64) -> Result<()> {
    for (name, v) in [("z_p", z_p), ("z_q", z_q)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, format!("{v} must be positive and finite")));
        }
    }
    if !(volume >= 0.0 && volume.is_finite()) {
        return Err(invalid("volume", format!("{volume} must be nonnegative and finite")));
    }
    Ok(())
}

/// `I(π^{z_p}_Λ | π^{z_q}_Λ) = |Λ|(z_q − z_p + z_p ln(z_p/z_q))`.
pub fn poisson_relative_entropy(z_p: f64, z_q: f64, volume: f64) -> Result<f64> {
    check_activities(z_p, z_q, volume)?;
    if z_p == z_q {
        return Ok(0.0);
    }
    let t = z_q / z_p;
    // z_p (t − 1 − ln t), written to stay accurate near the diagonal.
    let u = t - 1.0;
    Ok(volume * z_p * (u - u.ln_1p()))
}

/// Monte Carlo estimate of `E_{π^{z_p}}[ln dπ^{z_p}/dπ^{z_q}]`. The density
/// ratio depends on the configuration only through its point count:
/// `N ln(z_p/z_q) − (z_p − z_q)|Λ|`.
pub fn relative_entropy_mc<R: Rng + ?Sized>(
    z_p: f64,
    z_q: f64,
    volume: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate<f64>> {
    check_activities(z_p, z_q, volume)?;
    if n_samples < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    let log_ratio = (z_p / z_q).ln();
    let shift = (z_p - z_q) * volume;
    let xs: Vec<f64> = (0..n_samples)
        .map(|_| poisson_count(z_p * volume, rng) as f64 * log_ratio - shift)
        .collect();
    Ok(Estimate::from_samples(&xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_for;
    use proptest::prelude::*;

    #[test]
    fn vanishes_on_the_diagonal() {
        assert_eq!(poisson_relative_entropy(0.7, 0.7, 25.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_activity() {
        assert!(poisson_relative_entropy(0.0, 1.0, 1.0).is_err());
        assert!(poisson_relative_entropy(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn matches_textbook_value() {
        // |Λ|(z_q − z_p + z_p ln(z_p/z_q)) with z_p = 2, z_q = 1, |Λ| = 3.
        let v = poisson_relative_entropy(2.0, 1.0, 3.0).unwrap();
        assert!((v - 3.0 * (1.0 - 2.0 + 2.0 * 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_oracle_agrees() {
        let mut rng = rng_for(11, "entropy", 0);
        for (zp, zq) in [(0.5, 1.5), (2.0, 0.3), (1.0, 1.1)] {
            let exact = poisson_relative_entropy(zp, zq, 10.0).unwrap();
            let mc = relative_entropy_mc(zp, zq, 10.0, 20_000, &mut rng).unwrap();
            assert!(mc.agrees_with(exact, 3.0, 1e-12), "{mc:?} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn nonnegative_and_continuous(zp in 0.01f64..10.0, zq in 0.01f64..10.0, v in 0.0f64..100.0) {
            let e = poisson_relative_entropy(zp, zq, v).unwrap();
            prop_assert!(e >= 0.0);
            let near = poisson_relative_entropy(zp * (1.0 + 1e-9), zq, v).unwrap();
            prop_assert!((near - e).abs() <= 1e-6 * (1.0 + e));
        }

        #[test]
        fn zero_only_on_diagonal(zp in 0.01f64..10.0, ratio in 1.001f64..5.0) {
            prop_assert!(poisson_relative_entropy(zp, zp * ratio, 1.0).unwrap() > 0.0);
            prop_assert!(poisson_relative_entropy(zp * ratio, zp, 1.0).unwrap() > 0.0);
        }
    }
}
