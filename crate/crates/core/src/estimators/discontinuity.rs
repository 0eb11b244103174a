use crate::error::{invalid, Result};
use crate::geometry::unit_ball_volume;
use crate::hamiltonian::{BoundaryCondition, EnergyModel};
use crate::model::{Configuration, MarkLaw, MarkedPoint, ModelParams, Window};
use crate::sampling::rng_for;

/// One row of [`discontinuity_demo`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityRow {
    pub n: f64,
    /// Points of the good lattice in `Λ_n`, averaged over the shift grid.
    pub good_points: f64,
    /// Shift-averaged `H_{Λ_n,∅}/|Λ_n|` of the good lattice.
    pub good_density: f64,
    /// Infinite-volume value `v_d S^d / (2S)^d`.
    pub good_limit: f64,
    pub bad_points: usize,
    pub bad_hardcore: bool,
    pub bad_energy: f64,
}

/// Points `c + y` for `c ∈ spacing·Z^d` inside `window`.
fn lattice_in(window: &Window<f64>, spacing: f64, shift: &[f64; 3], radius: f64) -> Result<Configuration<f64>> {
    let d = window.dim();
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|k| {
            let lo = ((window.lo(k) - shift[k]) / spacing).ceil() as i64;
            let hi = ((window.hi(k) - shift[k]) / spacing).ceil() as i64 - 1;
            (lo, hi)
        })
        .collect();
    let mut points = Vec::new();
    let mut idx = vec![0i64; d];
    let total: i64 = ranges.iter().map(|(lo, hi)| (hi - lo + 1).max(0)).product();
    for flat in 0..total {
        let mut rest = flat;
        for k in 0..d {
            let len = ranges[k].1 - ranges[k].0 + 1;
            idx[k] = ranges[k].0 + rest % len;
            rest /= len;
        }
        let mut x = [0.0; 3];
        for k in 0..d {
            x[k] = idx[k] as f64 * spacing + shift[k];
        }
        if window.contains(&x) {
            points.push(MarkedPoint::at(x, radius));
        }
    }
    Configuration::from_points(d, points)
}

/// Contrasts the good lattice (radius `S − r` on `2S·Z^d`, so the enlarged
/// balls of radius `S` are tangent) with the overlapping lattice of radius
/// `2n` on `2n·Z^d`. The good energy density stays finite and plateaus; the
/// bad configuration triggers the hardcore veto at every `n`. The bad lattice
/// is evaluated on a window of side `4n`, which holds at least two points.
/// `shifts_per_axis` midpoint shifts in `[−S, S)^d` average the good density.
pub fn discontinuity_demo(d: usize, s: f64, r: f64, n_list: &[f64], shifts_per_axis: usize) -> Result<Vec<DiscontinuityRow>> {
    if !(r >= 0.0 && s >= r && s > 0.0) {
        return Err(invalid("S", format!("need S >= r >= 0 and S > 0, got S = {s}, r = {r}")));
    }
    let m = shifts_per_axis.max(1);
    let good_params = ModelParams::new(d, 1.0, 1.0, r, MarkLaw::dirac(s - r)?)?;
    let mut rng = rng_for(0, "discontinuity", 0);
    let good_limit = unit_ball_volume::<f64>(d)? * s.powi(d as i32) / (2.0 * s).powi(d as i32);
    n_list
        .iter()
        .map(|&n| {
            let window = Window::lambda(d, n)?;
            let model = EnergyModel::new(&good_params, &window, BoundaryCondition::Free)?;
            let shift_count = m.pow(d as u32);
            let mut density = 0.0;
            let mut points = 0.0;
            for flat in 0..shift_count {
                let mut y = [0.0; 3];
                let mut rest = flat;
                for yk in y.iter_mut().take(d) {
                    *yk = -s + 2.0 * s * ((rest % m) as f64 + 0.5) / m as f64;
                    rest /= m;
                }
                let good = lattice_in(&window, 2.0 * s, &y, s - r)?;
                let e = model.conditional_energy(&good, &mut rng);
                density += e.area_term / window.volume();
                points += good.len() as f64;
            }
            let bad_window = Window::lambda(d, 4.0 * n)?;
            let bad_params = ModelParams::new(d, 1.0, 1.0, r, MarkLaw::dirac(2.0 * n)?)?;
            let bad = lattice_in(&bad_window, 2.0 * n, &[0.0; 3], 2.0 * n)?;
            let bad_model = EnergyModel::new(&bad_params, &bad_window, BoundaryCondition::Free)?;
            let bad_value = bad_model.conditional_energy(&bad, &mut rng);
            Ok(DiscontinuityRow {
                n,
                good_points: points / shift_count as f64,
                good_density: density / shift_count as f64,
                good_limit,
                bad_points: bad.len(),
                bad_hardcore: bad_model.hardcore_violated(&bad),
                bad_energy: if bad_value.finite { bad_value.area_term } else { f64::INFINITY },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_good_lattice_has_unit_density() {
        // Radius 0.75 on 2Z with r = 0.25: tangent enlarged intervals cover the line.
        let rows = discontinuity_demo(1, 1.0, 0.25, &[4.0, 8.0, 16.0], 4).unwrap();
        for r in &rows {
            assert!((r.good_density - 1.0).abs() < 1e-12, "{r:?}");
            assert_eq!(r.good_limit, 1.0);
            assert!(r.bad_hardcore);
            assert!(r.bad_energy.is_infinite());
            assert!(r.bad_points >= 2);
        }
    }

    #[test]
    fn two_dimensional_density_approaches_disk_fraction() {
        let rows = discontinuity_demo(2, 1.0, 0.2, &[4.0, 8.0], 4).unwrap();
        let limit = std::f64::consts::PI / 4.0;
        for r in &rows {
            assert!((r.good_limit - limit).abs() < 1e-12);
            assert!(r.good_density.is_finite());
            assert!((r.good_density - limit).abs() < 0.05, "{r:?}");
            assert!(r.bad_hardcore);
        }
    }

    #[test]
    fn rejects_s_below_r() {
        assert!(discontinuity_demo(1, 0.1, 0.2, &[4.0], 1).is_err());
    }
}
