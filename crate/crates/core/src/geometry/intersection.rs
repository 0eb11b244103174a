use rand::Rng;

use super::ball::{ball_volume, pair_intersection_volume, Ball, Metric};
use super::quadrature::{integrate_box, QuadratureSpec};
use super::union::in_all;
use crate::error::{invalid, Error, Result};
use crate::model::{add, Estimate};
use crate::Scalar;

/// Largest `r/R_min` for which k-wise intersections with `k >= 4` vanish
/// under the hardcore constraint: `√2 − 1` in the plane, `√(3/2) − 1` in
/// space.
pub fn critical_ratio(d: usize) -> Result<f64> {
    match d {
        2 => Ok(std::f64::consts::SQRT_2 - 1.0),
        3 => Ok(1.5f64.sqrt() - 1.0),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Unsigned `|B_1 ∩ … ∩ B_k|`.
///
/// Empty intersections are detected exactly from pairwise distances. Under
/// the torus metric each ball is replaced by its minimum image relative to
/// the first, which is exact when the radii are below a quarter of the side.
pub fn k_intersection_volume<S, R>(
    d: usize,
    balls: &[Ball<S>],
    quad: &QuadratureSpec<S>,
    metric: &Metric<S>,
    rng: &mut R,
) -> Result<Estimate<S>>
where
    S: Scalar,
    R: Rng + ?Sized,
{
    match balls {
        [] => return Err(invalid("balls", "need at least one ball")),
        [b] => return Ok(Estimate::exact(ball_volume(d, b.radius)?)),
        [a, b] => return Ok(Estimate::exact(pair_intersection_volume(d, a, b, metric))),
        _ => {}
    }
    let local: Vec<Ball<S>> = match metric {
        Metric::Euclidean => balls.to_vec(),
        Metric::Torus(w) => {
            let w = w.with_torus(true);
            let o = balls[0].center;
            balls
                .iter()
                .map(|b| Ball::new(add(&o, &w.displacement(&o, &b.center)), b.radius))
                .collect()
        }
    };
    for (i, a) in local.iter().enumerate() {
        for b in &local[i + 1..] {
            let t = Metric::Euclidean.distance(&a.center, &b.center);
            if t >= a.radius + b.radius {
                return Ok(Estimate::exact(S::zero()));
            }
        }
    }
    let mut lo = local[0].center;
    let mut hi = local[0].center;
    for i in 0..d {
        lo[i] = local.iter().map(|b| b.center[i] - b.radius).fold(S::neg_infinity(), S::max);
        hi[i] = local.iter().map(|b| b.center[i] + b.radius).fold(S::infinity(), S::min);
        if hi[i] <= lo[i] {
            return Ok(Estimate::exact(S::zero()));
        }
    }
    if d == 1 {
        return Ok(Estimate::exact(hi[0] - lo[0]));
    }
    Ok(integrate_box(d, &lo, &hi, quad, rng, |z| {
        if in_all(&local, z) {
            S::one()
        } else {
            S::zero()
        }
    }))
}
