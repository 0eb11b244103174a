//! Property checks shared by `verify` and the acceptance suite. Each check
//! runs with its own fixed model parameters and reports pass/fail plus the
//! worst standardized deviation it saw.

use std::collections::BTreeMap;

use ao_gibbs::estimators::{
    energy_density_curve, palm_energy_identity_check, partition_direct, poisson_relative_entropy,
    pressure_bc_comparison, pressure_thermo_integration, relative_entropy_mc, sector_count_law, sector_weights,
    temperedness_tail_stats, BcComparisonOptions, DensityOptions, IntegrationOptions,
};
use ao_gibbs::geometry::{
    ball_volume, critical_ratio, exact_union_minus, k_intersection_volume, union_volume, Ball, Metric, QuadratureSpec,
};
use ao_gibbs::hamiltonian::{kbody_expansion, xwise_palm_summand, BoundaryCondition, EnergyModel};
use ao_gibbs::model::{Configuration, MarkLaw, MarkedPoint, ModelParams, TemperedEnvelope, Window};
use ao_gibbs::sampling::{
    derive_seed, dlr_consistency_check, fkg_temperedness_check, rng_for, DlrOptions, GibbsSampler, MoveMix, Schedule,
};
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// Number of cases examined.
    pub cases: usize,
    pub failures: usize,
    /// Largest |z| (or analogous standardized deviation) over the cases.
    pub worst_z: f64,
    pub metrics: BTreeMap<String, f64>,
    pub detail: String,
}

impl Check {
    fn new(id: &str, name: &str) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            passed: true,
            cases: 0,
            failures: 0,
            worst_z: 0.0,
            metrics: BTreeMap::new(),
            detail: String::new(),
        }
    }

    /// Records one case; `z` is its standardized deviation when meaningful.
    fn case(&mut self, ok: bool, z: f64) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.passed = false;
        }
        if z.is_finite() {
            self.worst_z = self.worst_z.max(z.abs());
        }
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.into(), v);
    }

    fn error(id: &str, name: &str, e: impl std::fmt::Display) -> Self {
        let mut c = Self::new(id, name);
        c.passed = false;
        c.detail = format!("error: {e}");
        c
    }
}

/// Sample sizes; [`Sizes::full`] matches the acceptance criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sizes {
    pub scale: f64,
}

impl Sizes {
    pub fn full() -> Self {
        Self { scale: 1.0 }
    }

    pub fn scaled(scale: f64) -> Self {
        Self { scale }
    }

    fn n(&self, base: usize) -> usize {
        ((base as f64 * self.scale).round() as usize).max(1)
    }
}

fn dist(z: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        z / sigma
    } else if z == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn within(diff: f64, sigma: f64, k: f64, scale: f64) -> bool {
    diff.abs() <= k * sigma + 1e-9 * (1.0 + scale.abs())
}

/// Hardcore-respecting configuration by sequential rejection in a cube of
/// side `side` (or on the torus when `torus`).
pub fn random_hardcore(
    d: usize,
    side: f64,
    k: usize,
    law: &MarkLaw<f64>,
    torus: bool,
    rng: &mut impl Rng,
) -> Configuration<f64> {
    let params = ModelParams::new(d, 1.0, 1.0, 1e-3, *law).expect("valid params");
    let window = Window::lambda(d, side).expect("valid window").with_torus(torus);
    let bc = if torus { BoundaryCondition::Periodic } else { BoundaryCondition::Free };
    let model = EnergyModel::new(&params, &window, bc).expect("valid model");
    let mut c = Configuration::new(d);
    let mut tries = 0;
    while c.len() < k && tries < 200 * k.max(1) {
        tries += 1;
        let mut x = [0.0; 3];
        for xi in x.iter_mut().take(d) {
            *xi = rng.random_range(-side / 2.0..side / 2.0);
        }
        let p = MarkedPoint::at(x, law.sample(rng));
        if !model.point_conflicts(&c, &p, None) {
            let _ = c.insert(p);
        }
    }
    c
}

fn enlarged(c: &Configuration<f64>, r: f64) -> Vec<Ball<f64>> {
    c.iter().map(|p| Ball::new(p.x, p.radius + r)).collect()
}

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default().with_target(5e-3)
}

/// Union volume vs the signed k-body expansion.
pub fn inclusion_exclusion(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("1", "inclusion-exclusion identity");
    let mut rng = rng_for(seed, "check-inclusion-exclusion", 0);
    let law = MarkLaw::uniform(0.3, 0.8).unwrap();
    let r = 0.5;
    let mut with_triples = 0;
    for _ in 0..sizes.n(100) {
        let k = rng.random_range(2..=6);
        let c = random_hardcore(2, 3.0, k, &law, false, &mut rng);
        let balls = enlarged(&c, r);
        let u = union_volume(2, &balls, &[], &quad(), &Metric::Euclidean, &mut rng);
        let terms = match kbody_expansion(&c, r, c.len(), &quad(), &Metric::Euclidean, &mut rng) {
            Ok(t) => t,
            Err(e) => return Check::error("1", &check.name, e),
        };
        if terms.iter().any(|(k, v)| *k >= 3 && v.value != 0.0) {
            with_triples += 1;
        }
        let total = terms.iter().fold(ao_gibbs::model::Estimate::exact(0.0), |a, (_, v)| a.add(*v));
        let sigma = u.stderr.hypot(total.stderr);
        let diff = u.value - total.value;
        check.case(within(diff, sigma, 3.0, u.value), dist(diff, sigma));
    }
    check.metric("configs_with_3body_terms", with_triples as f64);
    check
}

/// k >= 4 intersections vanish below the critical ratio; the square example
/// above it has a positive fourfold intersection.
pub fn three_body_truncation(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("2", "three-body truncation");
    let mut rng = rng_for(seed, "check-truncation", 0);
    let mut four_cliques = 0.0;
    for d in [2usize, 3] {
        let rho = critical_ratio(d).unwrap();
        let r_min = 0.5;
        let law = MarkLaw::uniform(r_min, 1.0).unwrap();
        let r = rho * r_min;
        let side = if d == 2 { 4.0 } else { 3.5 };
        for _ in 0..sizes.n(50) {
            let c = random_hardcore(d, side, 10, &law, false, &mut rng);
            match kbody_expansion(&c, r, 4, &quad(), &Metric::Euclidean, &mut rng) {
                Ok(terms) => {
                    let (_, four) = terms[3];
                    if four.n_samples > 0 && four.value != 0.0 {
                        four_cliques += 1.0;
                    }
                    check.case(within(four.value, four.stderr, 3.0, 0.0), dist(four.value, four.stderr));
                }
                Err(e) => return Check::error("2", &check.name, e),
            }
        }
    }
    // Square of side 2 with unit radii and r = 0.55 > ρ_c(2).
    let balls: Vec<Ball<f64>> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(x, y)| Ball::new([x, y, 0.0], 1.55))
        .collect();
    let mut spec = quad();
    spec.target_rel_error = 1e-3;
    match k_intersection_volume(2, &balls, &spec, &Metric::Euclidean, &mut rng) {
        Ok(v) => {
            let z = dist(v.value, v.stderr);
            check.metric("square_fourfold_volume", v.value);
            check.metric("square_fourfold_z", z);
            let ok = v.value > 0.0 && z >= 5.0;
            check.cases += 1;
            if !ok {
                check.failures += 1;
                check.passed = false;
            }
        }
        Err(e) => return Check::error("2", &check.name, e),
    }
    check.metric("nonzero_fourfold_random", four_cliques);
    check
}

/// `v_d Σ R^d <= H^ar <= v_d Σ (R + r)^d`.
pub fn energy_sandwich(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("3", "energy sandwich");
    let mut rng = rng_for(seed, "check-sandwich", 0);
    let law = MarkLaw::uniform(0.1, 0.8).unwrap();
    for i in 0..sizes.n(1000) {
        let d = 1 + i % 3;
        let r = rng.random_range(0.05..1.0);
        let params = ModelParams::new(d, 1.0, 1.0, r, law).unwrap();
        let window = Window::lambda(d, 4.0).unwrap();
        let model = EnergyModel::new(&params, &window, BoundaryCondition::Free).unwrap().with_quadrature(quad());
        let k = rng.random_range(0..=8);
        let c = random_hardcore(d, 4.0, k, &law, false, &mut rng);
        let h = model.conditional_energy(&c, &mut rng);
        let (lo, hi) = model.sandwich_bounds(&c);
        let s = h.quad_stderr;
        let ok = h.finite && within((lo - h.area_term).max(0.0), s, 3.0, hi) && within((h.area_term - hi).max(0.0), s, 3.0, hi);
        let z = dist((lo - h.area_term).max(h.area_term - hi).max(0.0), s);
        check.case(ok, z);
    }
    check
}

/// Σ_x summand = H^ar and the single-term bound, in the regime r <= R_min.
pub fn xwise_identity(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("4", "x-wise identity and single-term bound");
    let mut rng = rng_for(seed, "check-xwise", 0);
    let law = MarkLaw::uniform(0.4, 0.8).unwrap();
    let r = 0.3;
    let mut bound_failures = 0;
    for i in 0..sizes.n(100) {
        let d = 1 + i % 2;
        let k = rng.random_range(1..=8);
        let c = random_hardcore(d, 4.0, k, &law, false, &mut rng);
        let h = exact_union_minus(d, &enlarged(&c, r), &[], &Metric::Euclidean).unwrap();
        let mut total = ao_gibbs::model::Estimate::exact(0.0);
        let mut ok = true;
        for (idx, p) in c.iter().enumerate() {
            let s = xwise_palm_summand(&c, idx, r, None, &quad(), &mut rng).unwrap();
            total = total.add(s);
            let phi1 = ball_volume(d, p.radius + r).unwrap();
            let shell = phi1 - ball_volume(d, p.radius).unwrap();
            if (s.value - phi1).abs() > shell + 3.0 * s.stderr + 1e-12 {
                ok = false;
                bound_failures += 1;
            }
        }
        let diff = total.value - h;
        ok &= within(diff, total.stderr, 3.0, h);
        check.case(ok, dist(diff, total.stderr));
    }
    check.metric("single_term_bound_failures", bound_failures as f64);
    check
}

/// Conditional energy never decreases when a point is added.
pub fn insertion_monotonicity(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("5", "monotonicity under insertion");
    let mut rng = rng_for(seed, "check-monotone", 0);
    let law = MarkLaw::uniform(0.1, 0.6).unwrap();
    let mut vetoed = 0;
    for i in 0..sizes.n(1000) {
        let d = 1 + i % 3;
        let params = ModelParams::new(d, 1.0, 1.0, 0.25, law).unwrap();
        let window = Window::lambda(d, 4.0).unwrap();
        let model = EnergyModel::new(&params, &window, BoundaryCondition::Free).unwrap().with_quadrature(quad());
        let k = rng.random_range(0..=6);
        let c = random_hardcore(d, 4.0, k, &law, false, &mut rng);
        let mut x = [0.0; 3];
        for xi in x.iter_mut().take(d) {
            *xi = rng.random_range(-2.0..2.0);
        }
        let mut more = c.clone();
        if more.insert(MarkedPoint::at(x, law.sample(&mut rng))).is_err() {
            continue;
        }
        let before = model.conditional_energy(&c, &mut rng);
        let after = model.conditional_energy(&more, &mut rng);
        if !after.finite {
            vetoed += 1;
            check.case(true, 0.0);
            continue;
        }
        let drop = before.area_term - after.area_term;
        let sigma = before.quad_stderr.hypot(after.quad_stderr);
        check.case(drop <= 3.0 * sigma + 1e-9 * (1.0 + before.area_term), dist(drop.max(0.0), sigma));
    }
    check.metric("vetoed_insertions", vetoed as f64);
    check
}

/// Every direct partition-function estimate lies in `[e^{−z|Λ|}, 1]`.
pub fn partition_bounds(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("6", "partition-function bounds");
    let mut i = 0u64;
    for d in [1usize, 2] {
        for z in [0.2, 0.6, 1.2] {
            for beta in [0.5, 1.0, 3.0] {
                for bc in [BoundaryCondition::Free, BoundaryCondition::Periodic] {
                    i += 1;
                    let params = ModelParams::new(d, z, beta, 0.2, MarkLaw::uniform(0.1, 0.5).unwrap()).unwrap();
                    let window = Window::lambda(d, 3.0).unwrap();
                    let e = match partition_direct(&params, &window, &bc, sizes.n(4000), derive_seed(seed, "check-bounds", i), &quad()) {
                        Ok(e) => e,
                        Err(e) => return Check::error("6", &check.name, e),
                    };
                    let zz = e.partition.unwrap();
                    let lo = (-z * window.volume()).exp();
                    let inside = zz.value >= lo && zz.value <= 1.0;
                    let meets = zz.value + 3.0 * zz.stderr >= lo && zz.value - 3.0 * zz.stderr <= 1.0;
                    if !(inside && meets) {
                        check.detail += &format!(
                            "d={d} z={z} beta={beta} bc={}: Z = {:e} ± {:e} vs lower {:e}; ",
                            bc.name(),
                            zz.value,
                            zz.stderr,
                            lo
                        );
                    }
                    check.case(inside && meets, 0.0);
                }
            }
        }
    }
    check
}

fn chi_square_p(counts: &[usize], law: &[f64]) -> f64 {
    // Trailing bins are pooled until every expected count reaches five.
    let total = counts.iter().sum::<usize>() as f64;
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(law) {
        if p == 0.0 && c > 0 {
            return 0.0;
        }
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
    if expected.len() < 2 {
        return 1.0;
    }
    let stat: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((expected.len() - 1) as f64).unwrap().cdf(stat)
}

/// Law of N from the chain against the sector-integration oracle.
pub fn sampler_sector_oracle(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("7", "sampler vs sector oracle");
    // Hard cores exclude sectors beyond N = 3 in both windows.
    let cases = [
        (ModelParams::new(1, 1.0 / 3.0, 1.0, 0.2, MarkLaw::dirac(0.5).unwrap()).unwrap(), 3.0),
        (ModelParams::new(2, 1.0, 1.0, 0.2, MarkLaw::dirac(0.5).unwrap()).unwrap(), 1.0),
    ];
    for (i, (params, side)) in cases.iter().enumerate() {
        let window = Window::lambda(params.d, *side).unwrap();
        let s = derive_seed(seed, "check-sector", i as u64);
        let weights = match sector_weights(params, &window, &BoundaryCondition::Free, 3, sizes.n(400_000), s) {
            Ok(w) => w,
            Err(e) => return Check::error("7", &check.name, e),
        };
        let law = sector_count_law(&weights);
        let mut chain = GibbsSampler::new(params, &window, BoundaryCondition::Free, MoveMix::default(), s).unwrap();
        let schedule = Schedule {
            burn_in: 500,
            // About ten integrated autocorrelation times of N.
            thin: 50,
            snapshots: sizes.n(10_000),
        };
        let mut counts = vec![0usize; 4];
        let mut overflow = false;
        for c in chain.snapshots(&schedule) {
            match counts.get_mut(c.len()) {
                Some(slot) => *slot += 1,
                None => overflow = true,
            }
        }
        let p = if overflow { 0.0 } else { chi_square_p(&counts, &law) };
        check.metric(&format!("p_value_d{}", params.d), p);
        check.case(p > 0.01, 0.0);
    }
    check
}

/// Direct vs two-stage law of the sub-window.
pub fn dlr(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("8", "DLR consistency");
    let params = ModelParams::new(2, 0.5, 1.0, 0.1, MarkLaw::uniform(0.1, 0.4).unwrap()).unwrap();
    let window = Window::lambda(2, 4.0).unwrap();
    let sub = Window::lambda(2, 2.0).unwrap();
    let boundary = ao_gibbs::estimators::sampled_boundary(&params, &window, 1.5, 500, derive_seed(seed, "check-dlr-boundary", 0));
    let fixed = match boundary {
        Ok(b) => b,
        Err(e) => return Check::error("8", &check.name, e),
    };
    for (i, bc) in [BoundaryCondition::Free, fixed].into_iter().enumerate() {
        let name = bc.name();
        match dlr_consistency_check(&params, &window, &sub, bc, sizes.n(10_000), derive_seed(seed, "check-dlr", i as u64), &DlrOptions::default()) {
            Ok(report) => {
                for s in &report.stats {
                    check.metric(&format!("z_{name}_{}", s.name), s.z_score);
                    check.case(s.z_score.abs() <= 4.0, s.z_score);
                }
            }
            Err(e) => return Check::error("8", &check.name, e),
        }
    }
    check
}

/// Gibbs temperedness probabilities dominate the Poisson ones.
pub fn fkg(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("9", "FKG temperedness inequality");
    let params = ModelParams::new(1, 1.0, 1.0, 0.2, MarkLaw::truncated_weibull(0.8, 1.0, 6.0).unwrap()).unwrap();
    let envelope = TemperedEnvelope::with_default_gamma(1, 1.0).unwrap();
    let window = Window::lambda(1, 6.0).unwrap();
    let schedule = Schedule { burn_in: 200, thin: 2, snapshots: 0 };
    match fkg_temperedness_check(&params, &window, BoundaryCondition::Free, &[1, 2, 3, 4, 6], sizes.n(5000), derive_seed(seed, "check-fkg", 0), &schedule, &envelope) {
        Ok(report) => {
            for row in &report.rows {
                let sigma = row.gibbs.stderr.hypot(row.poisson.stderr);
                check.metric(&format!("gibbs_k{}", row.k), row.gibbs.value);
                check.metric(&format!("poisson_k{}", row.k), row.poisson.value);
                check.case(row.holds, dist((row.poisson.value - row.gibbs.value).max(0.0), sigma));
            }
        }
        Err(e) => return Check::error("9", &check.name, e),
    }
    check
}

/// Poisson violation frequency vs the analytic product formula.
pub fn poisson_tail(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("10", "Poisson temperedness tail");
    let params = ModelParams::new(2, 0.5, 1.0, 0.1, MarkLaw::truncated_weibull(0.5, 1.5, 10.0).unwrap()).unwrap();
    let envelope = TemperedEnvelope::with_default_gamma(2, 1.0).unwrap();
    let bands = [(2, 8), (4, 8), (8, 8)];
    match temperedness_tail_stats(&params, &bands, &envelope, sizes.n(10_000), derive_seed(seed, "check-tail", 0)) {
        Ok(rows) => {
            for row in &rows {
                let rel = match row.integrated {
                    Some(v) if row.analytic > 0.0 => (v - row.analytic).abs() / row.analytic,
                    Some(v) => v.abs(),
                    None => f64::INFINITY,
                };
                check.metric(&format!("empirical_n{}", row.n_lo), row.empirical.value);
                check.metric(&format!("analytic_n{}", row.n_lo), row.analytic);
                check.metric(&format!("tail_rel_error_n{}", row.n_lo), rel);
                check.metric(&format!("decay_reference_n{}", row.n_lo), row.decay_reference);
                let excess = (row.empirical.value - row.analytic).max(0.0);
                check.case(row.holds && rel <= 1e-6, dist(excess, row.empirical.stderr));
            }
        }
        Err(e) => return Check::error("10", &check.name, e),
    }
    check
}

/// Periodic energy equals the sum of x-wise summands on the torus.
pub fn stationary_field(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("11", "stationary empirical field identity");
    let mut rng = rng_for(seed, "check-stationary", 0);
    let law = MarkLaw::uniform(0.2, 0.6).unwrap();
    for i in 0..sizes.n(100) {
        let d = 1 + i % 2;
        let params = ModelParams::new(d, 1.0, 1.0, 0.3, law).unwrap();
        let window = Window::lambda(d, 4.0).unwrap();
        let k = rng.random_range(1..=6);
        let c = random_hardcore(d, 4.0, k, &law, true, &mut rng);
        match palm_energy_identity_check(&c, &window, &params, &quad(), &mut rng) {
            Ok(r) => check.case(r.passes, r.z_score),
            Err(e) => return Check::error("11", &check.name, e),
        }
    }
    check
}

/// Settings of the boundary-condition pressure comparison; fixed in advance
/// from the runtime budget, not tuned to the outcome.
pub fn pressure_options() -> BcComparisonOptions {
    let mut o = BcComparisonOptions::with_uniform_grid(1.0, 20);
    o.chains = 4;
    o.integration.direct_samples = 200_000;
    o.integration.schedule = Schedule { burn_in: 500, thin: 2, snapshots: 2000 };
    o
}

/// Periodic, free and fixed pressures for d = 2, z = 0.2, β = 1,
/// Dirac(0.4), r = 0.1 at n = 4, 8, 12.
pub fn pressure_boundary_conditions(seed: u64, options: &BcComparisonOptions) -> Check {
    let mut check = Check::new("12", "pressure boundary-condition agreement");
    let params = ModelParams::new(2, 0.2, 1.0, 0.1, MarkLaw::dirac(0.4).unwrap()).unwrap();
    let rows = match pressure_bc_comparison(&params, &[4.0, 8.0, 12.0], derive_seed(seed, "check-pressure", 0), options) {
        Ok(r) => r,
        Err(e) => return Check::error("12", &check.name, e),
    };
    for r in &rows {
        let n = r.n as usize;
        check.metric(&format!("gap_periodic_free_n{n}"), r.gap_periodic_free.value);
        check.metric(&format!("gap_periodic_free_sigma_n{n}"), r.gap_periodic_free.stderr);
        check.metric(&format!("gap_fixed_free_n{n}"), r.gap_fixed_free.value);
        check.metric(&format!("gap_fixed_free_sigma_n{n}"), r.gap_fixed_free.stderr);
        check.metric(&format!("pressure_free_n{n}"), r.free.log_z_over_volume.value);
    }
    let last = rows.last().unwrap();
    let g = last.gap_periodic_free;
    check.case(within(g.value, g.stderr, 3.0, 0.0), dist(g.value, g.stderr));
    let mut notes = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (w[0].gap_periodic_free, w[1].gap_periodic_free);
        let ok = b.value.abs() <= a.value.abs() + a.stderr.hypot(b.stderr);
        if !ok {
            notes.push(format!("|gap| grows from n={} to n={}", w[0].n, w[1].n));
        }
        check.case(ok, 0.0);
    }
    let f = last.gap_fixed_free;
    check.case(within(f.value, f.stderr, 3.0, 0.0), dist(f.value, f.stderr));
    check.detail = notes.join("; ");
    check
}

/// Direct and thermodynamic-integration pressures agree on small systems.
pub fn cross_method(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("13", "cross-method pressure");
    let cases = [
        (ModelParams::new(1, 0.5, 1.0, 0.2, MarkLaw::dirac(0.3).unwrap()).unwrap(), 3.0),
        (ModelParams::new(2, 0.4, 1.0, 0.1, MarkLaw::dirac(0.3).unwrap()).unwrap(), 3.0),
        (ModelParams::new(2, 0.2, 1.0, 0.1, MarkLaw::dirac(0.4).unwrap()).unwrap(), 4.0),
    ];
    let grid: Vec<f64> = (0..=20).map(|i| 1e-3 + (1.0 - 1e-3) * i as f64 / 20.0).collect();
    let options = IntegrationOptions {
        direct_samples: sizes.n(50_000),
        schedule: Schedule { burn_in: 300, thin: 2, snapshots: sizes.n(2000) },
        ..IntegrationOptions::default()
    };
    let mut i = 0u64;
    for (params, side) in &cases {
        let window = Window::lambda(params.d, *side).unwrap();
        for bc in [BoundaryCondition::Free, BoundaryCondition::Periodic] {
            i += 1;
            let direct = partition_direct(params, &window, &bc, sizes.n(100_000), derive_seed(seed, "check-cross-direct", i), &quad());
            let ti = pressure_thermo_integration(params, &window, &bc, &grid, 2, derive_seed(seed, "check-cross-ti", i), &options);
            match (direct, ti) {
                (Ok(a), Ok(b)) => {
                    let z = a.log_z_over_volume.z_score(&b.log_z_over_volume);
                    check.metric(&format!("z_case{i}"), z);
                    check.case(z.abs() <= 3.0, z);
                }
                (Err(e), _) | (_, Err(e)) => return Check::error("13", &check.name, e),
            }
        }
    }
    check
}

/// Monte Carlo density-ratio estimate vs the closed-form relative entropy.
pub fn relative_entropy(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("14", "Poisson relative entropy");
    let mut rng = rng_for(seed, "check-entropy", 0);
    let volume = 10.0;
    for i in 0..5 {
        let zp = rng.random_range(0.1..3.0);
        let zq = rng.random_range(0.1..3.0);
        let exact = poisson_relative_entropy(zp, zq, volume).unwrap();
        let mc = relative_entropy_mc(zp, zq, volume, sizes.n(20_000), &mut rng).unwrap();
        let z = dist(mc.value - exact, mc.stderr);
        check.metric(&format!("pair{i}_exact"), exact);
        check.metric(&format!("pair{i}_z"), z);
        check.case(z.abs() <= 3.0, z);
    }
    check
}

/// Palm and direct energy densities agree on periodic chains.
pub fn density_curve(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("palm-density", "Palm vs direct energy density");
    let params = ModelParams::new(2, 0.3, 1.0, 0.1, MarkLaw::uniform(0.2, 0.4).unwrap()).unwrap();
    let options = DensityOptions {
        schedule: Schedule { burn_in: 200, thin: 5, snapshots: sizes.n(200) },
        ..DensityOptions::default()
    };
    match energy_density_curve(&params, &BoundaryCondition::Periodic, &[3.0, 5.0], 2, derive_seed(seed, "check-density", 0), &options) {
        Ok(rows) => {
            for r in &rows {
                check.metric(&format!("direct_n{}", r.n), r.direct.value);
                check.metric(&format!("palm_n{}", r.n), r.palm.value);
                check.case(r.z_score.abs() <= 3.0, r.z_score);
            }
        }
        Err(e) => return Check::error("palm-density", &check.name, e),
    }
    check
}

/// Exact union areas against quadrature.
pub fn quadrature_vs_exact(seed: u64, sizes: Sizes) -> Check {
    let mut check = Check::new("geometry-quadrature", "exact area vs quadrature");
    let mut rng = rng_for(seed, "check-quadrature", 0);
    let law = MarkLaw::uniform(0.2, 0.9).unwrap();
    for i in 0..sizes.n(40) {
        let torus = i % 2 == 1;
        let c = random_hardcore(2, 4.0, 6, &law, torus, &mut rng);
        let balls = enlarged(&c, 0.4);
        let metric = if torus {
            Metric::Torus(Window::lambda(2, 4.0).unwrap().with_torus(true))
        } else {
            Metric::Euclidean
        };
        let exact = exact_union_minus(2, &balls, &[], &metric).unwrap();
        let est = union_volume(2, &balls, &[], &quad(), &metric, &mut rng);
        let diff = est.value - exact;
        check.case(within(diff, est.stderr, 4.0, exact), dist(diff, est.stderr));
    }
    check
}

/// Named verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Energy,
    Geometry,
    Palm,
    Temperedness,
    Dlr,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Energy => "energy",
            Suite::Geometry => "geometry",
            Suite::Palm => "palm",
            Suite::Temperedness => "temperedness",
            Suite::Dlr => "dlr",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "energy" => Suite::Energy,
            "geometry" => Suite::Geometry,
            "palm" => Suite::Palm,
            "temperedness" => Suite::Temperedness,
            "dlr" => Suite::Dlr,
            "all" => Suite::All,
            _ => return None,
        })
    }

    /// Runs the suite's checks in a fixed order.
    pub fn run(&self, seed: u64, sizes: Sizes) -> Vec<Check> {
        type F = fn(u64, Sizes) -> Check;
        let geometry: &[F] = &[inclusion_exclusion, three_body_truncation, quadrature_vs_exact];
        let energy: &[F] = &[energy_sandwich, insertion_monotonicity, partition_bounds, cross_method, relative_entropy];
        let palm: &[F] = &[xwise_identity, stationary_field, density_curve];
        let tempered: &[F] = &[fkg, poisson_tail];
        let dlr_suite: &[F] = &[sampler_sector_oracle, dlr];
        let parts: Vec<&[F]> = match self {
            Suite::Geometry => vec![geometry],
            Suite::Energy => vec![energy],
            Suite::Palm => vec![palm],
            Suite::Temperedness => vec![tempered],
            Suite::Dlr => vec![dlr_suite],
            Suite::All => vec![geometry, energy, palm, tempered, dlr_suite],
        };
        parts.into_iter().flatten().map(|f| f(seed, sizes)).collect()
    }
}
