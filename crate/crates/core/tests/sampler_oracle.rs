use ao_gibbs::estimators::{sector_count_law, sector_weights};
use ao_gibbs::hamiltonian::BoundaryCondition;
use ao_gibbs::model::{MarkLaw, ModelParams, Window};
use ao_gibbs::sampling::{GibbsSampler, MoveMix, Schedule};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Chi-square p-value of observed counts against `law` (sums to one).
/// Trailing bins are pooled until every expected count reaches five.
fn chi_square_p(counts: &[usize], law: &[f64]) -> f64 {
    let total = counts.iter().sum::<usize>() as f64;
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(law) {
        o += c as f64;
        e += p * total;
        if e >= 5.0 {
            observed.push(o);
            expected.push(e);
            (o, e) = (0.0, 0.0);
        }
    }
    if let (Some(lo), Some(le)) = (observed.last_mut(), expected.last_mut()) {
        *lo += o;
        *le += e;
    }
    let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((expected.len() - 1) as f64).unwrap().cdf(stat)
}

fn check(params: &ModelParams<f64>, window: &Window<f64>, seed: u64) {
    let weights = sector_weights(params, window, &BoundaryCondition::Free, 3, 400_000, seed).unwrap();
    let law = sector_count_law(&weights);
    let mut chain = GibbsSampler::new(params, window, BoundaryCondition::Free, MoveMix::default(), seed).unwrap();
    let schedule = Schedule { burn_in: 500, thin: 50, snapshots: 10_000 };
    let mut counts = vec![0usize; 4];
    for s in chain.snapshots(&schedule) {
        assert!(s.len() <= 3, "sector above the geometric maximum");
        counts[s.len()] += 1;
    }
    let p = chi_square_p(&counts, &law);
    assert!(p > 0.01, "counts {counts:?} vs law {law:?}: p = {p}");
}

#[test]
fn one_dimensional_count_law_matches_sectors() {
    // Radius 0.5 hard cores fit at most three centres in a side-3 window.
    let params = ModelParams::new(1, 1.0 / 3.0, 1.0, 0.2, MarkLaw::dirac(0.5).unwrap()).unwrap();
    check(&params, &Window::lambda(1, 3.0).unwrap(), 21);
}

#[test]
fn two_dimensional_count_law_matches_sectors() {
    // Hard-core diameter equal to the side rules out four centres.
    let params = ModelParams::new(2, 1.0, 1.0, 0.2, MarkLaw::dirac(0.5).unwrap()).unwrap();
    check(&params, &Window::lambda(2, 1.0).unwrap().euclidean(), 22);
}
