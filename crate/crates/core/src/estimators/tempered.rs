use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::model::{Estimate, MarkLaw, ModelParams, TemperedEnvelope, Window};
use crate::sampling::{derive_seed, rng_for, sample_poisson, tempered_band_exponent};

/// One row of [`temperedness_tail_stats`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub n_lo: usize,
    pub n_hi: usize,
    /// Empirical frequency of `(Ω*_{N,M})^c` under the marked Poisson law.
    pub empirical: Estimate<f64>,
    /// `1 − π^z(Ω*_{N,M})` from the product formula with the closed-form tail.
    pub analytic: f64,
    /// The same formula with the tail obtained by integrating the mark density.
    pub integrated: Option<f64>,
    /// `exp(−|Λ_N|^{1+γ})`, the reference decay.
    pub decay_reference: f64,
    pub holds: bool,
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `P(R > t)` by integrating the mark density over `[t, sup]`; `None` for
/// laws without a density.
pub fn integrated_tail(law: &MarkLaw<f64>, t: f64) -> Option<f64> {
    law.density(0.5 * (law.inf() + law.sup()))?;
    let lo = t.max(law.inf());
    let hi = law.sup();
    if lo >= hi {
        return Some(0.0);
    }
    let f = |s: f64| law.density(s).unwrap_or(0.0);
    // A rough pass sets the scale; the second pass is accurate relative to it,
    // which matters for far tails many orders below one.
    let rough = adaptive_simpson(&f, lo, hi, 1e-14);
    if rough <= 0.0 {
        return Some(0.0);
    }
    Some(adaptive_simpson(&f, lo, hi, 1e-11 * rough))
}

/// Empirical and analytic probabilities that a marked Poisson sample in
/// `Λ_M` leaves `Ω*_{N,M}`, for each `(N, M)` in `bands`.
pub fn temperedness_tail_stats(
    params: &ModelParams<f64>,
    bands: &[(usize, usize)],
    envelope: &TemperedEnvelope,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<TailRow>> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be positive"));
    }
    let origin = Window::new(params.d, [0.0; 3], 1.0, false)?;
    bands
        .iter()
        .enumerate()
        .map(|(bi, &(n_lo, n_hi))| {
            if n_lo == 0 || n_hi < n_lo {
                return Err(invalid("bands", format!("need 1 <= N <= M, got ({n_lo}, {n_hi})")));
            }
            let window = Window::lambda(params.d, n_hi as f64)?;
            let tag = derive_seed(seed, "tail-band", bi as u64);
            let hits: Vec<f64> = (0..n_samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(tag, "poisson", i as u64);
                    let c = sample_poisson(params, &window, &mut rng);
                    if envelope.in_window_band(&c, &origin, n_lo, n_hi) { 0.0 } else { 1.0 }
                })
                .collect();
            let empirical = Estimate::from_samples(&hits);
            let law = &params.mark_law;
            let analytic = -(-tempered_band_exponent(params.z, envelope, n_lo, n_hi, |t| law.tail(t))).exp_m1();
            let integrated = integrated_tail(law, 1.0).map(|_| {
                let e = tempered_band_exponent(params.z, envelope, n_lo, n_hi, |t| integrated_tail(law, t).unwrap_or(0.0));
                -(-e).exp_m1()
            });
            // Binomial spread of the frequency under the analytic probability.
            let spread = (analytic * (1.0 - analytic) / n_samples as f64).sqrt();
            let slack = 3.0 * empirical.stderr.max(spread);
            Ok(TailRow {
                n_lo,
                n_hi,
                holds: empirical.value <= analytic + slack + 1e-12,
                empirical,
                analytic,
                integrated,
                decay_reference: envelope.decay_reference(n_lo as f64),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weibull(z: f64) -> ModelParams<f64> {
        ModelParams::new(1, z, 1.0, 0.1, MarkLaw::truncated_weibull(1.0, 0.8, 20.0).unwrap()).unwrap()
    }

    #[test]
    fn simpson_integrates_polynomials() {
        let v = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrated_tail_matches_closed_form() {
        let law = MarkLaw::truncated_weibull(1.0, 0.8, 20.0).unwrap();
        for t in [0.5, 1.0, 2.7, 10.0, 19.9] {
            let a = law.tail(t);
            let b = integrated_tail(&law, t).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{t}: {a} vs {b}");
        }
        let steep = MarkLaw::truncated_weibull(0.5, 1.5, 10.0).unwrap();
        for t in [1.8, 4.0, 5.7] {
            let a = steep.tail(t);
            let b = integrated_tail(&steep, t).unwrap();
            assert!((a - b).abs() <= 1e-8 * a, "{t}: {a} vs {b}");
        }
        let u = MarkLaw::uniform(0.5, 3.0).unwrap();
        assert!((integrated_tail(&u, 1.0).unwrap() - 0.8).abs() < 1e-12);
        assert!(integrated_tail(&MarkLaw::dirac(1.0).unwrap(), 0.5).is_none());
    }

    #[test]
    fn dirac_below_envelope_never_violates() {
        let params = ModelParams::new(2, 1.0, 1.0, 0.1, MarkLaw::dirac(0.5).unwrap()).unwrap();
        let env = TemperedEnvelope::with_default_gamma(2, 1.0).unwrap();
        let rows = temperedness_tail_stats(&params, &[(2, 3)], &env, 200, 3).unwrap();
        assert_eq!(rows[0].analytic, 0.0);
        assert_eq!(rows[0].empirical.value, 0.0);
        assert!(rows[0].holds);
    }

    #[test]
    fn single_scale_band_has_closed_form() {
        let params = weibull(0.5);
        let env = TemperedEnvelope::with_default_gamma(1, 1.0).unwrap();
        let n = 3usize;
        let rows = temperedness_tail_stats(&params, &[(n, n)], &env, 10, 1).unwrap();
        let expect = 1.0 - (-0.5 * n as f64 * params.mark_law.tail(env.g(n as f64))).exp();
        assert!((rows[0].analytic - expect).abs() < 1e-14);
    }

    #[test]
    fn empirical_tail_respects_formula_and_decreases() {
        let params = weibull(1.0);
        let env = TemperedEnvelope::with_default_gamma(1, 1.0).unwrap();
        let rows = temperedness_tail_stats(&params, &[(2, 8), (4, 8), (8, 8)], &env, 4000, 9).unwrap();
        for r in &rows {
            assert!(r.holds, "{r:?}");
            let rel = (r.integrated.unwrap() - r.analytic).abs() / r.analytic;
            assert!(rel < 1e-6, "{rel}");
        }
        assert!(rows[0].analytic >= rows[1].analytic && rows[1].analytic >= rows[2].analytic);
        assert!(rows[0].empirical.value >= rows[2].empirical.value);
    }
}
