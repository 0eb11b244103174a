use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, integrate_box, k_intersection_volume, Ball, BallSet, Metric,
    QuadratureSpec,
};
use crate::model::{Configuration, Estimate, PeriodicView, Window};
use crate::Scalar;

/// Largest configuration accepted by [`kbody_expansion`].
pub const KBODY_MAX_POINTS: usize = 10;

fn enlarged<S: Scalar>(config: &Configuration<S>, r: S) -> Vec<Ball<S>> {
    config.iter().map(|p| Ball::new(p.x, p.radius + r)).collect()
}

/// Signed totals `Σ φ_k` over all k-subsets for `k = 1..=k_max`, where
/// `φ_k = (−1)^{k−1} |⋂ enlarged balls|`. Only cliques of the overlap graph
/// are visited; other subsets have empty intersection.
pub fn kbody_expansion<S, R>(
    config: &Configuration<S>,
    r: S,
    k_max: usize,
    quad: &QuadratureSpec<S>,
    metric: &Metric<S>,
    rng: &mut R,
) -> Result<Vec<(usize, Estimate<S>)>>
where
    S: Scalar,
    R: Rng + ?Sized,
{
    let n = config.len();
    if n > KBODY_MAX_POINTS {
        return Err(Error::TooManyPoints(n, KBODY_MAX_POINTS));
    }
    let d = config.dim();
    let balls = enlarged(config, r);
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    i != j
                        && metric.distance(&balls[i].center, &balls[j].center)
                            < balls[i].radius + balls[j].radius
                })
                .collect()
        })
        .collect();
    let mut totals: Vec<Estimate<S>> = vec![Estimate::exact(S::zero()); k_max];
    let mut stack: Vec<usize> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn walk<S: Scalar, R: Rng + ?Sized>(
        start: usize,
        stack: &mut Vec<usize>,
        adj: &[Vec<bool>],
        balls: &[Ball<S>],
        totals: &mut [Estimate<S>],
        d: usize,
        quad: &QuadratureSpec<S>,
        metric: &Metric<S>,
        rng: &mut R,
    ) -> Result<()> {
        for i in start..balls.len() {
            if !stack.iter().all(|&j| adj[i][j]) {
                continue;
            }
            stack.push(i);
            let k = stack.len();
            let subset: Vec<Ball<S>> = stack.iter().map(|&j| balls[j]).collect();
            let v = k_intersection_volume(d, &subset, quad, metric, rng)?;
            let sign = if k % 2 == 1 { S::one() } else { -S::one() };
            totals[k - 1] = totals[k - 1].add(v.scale(sign));
            if k < totals.len() && v.value > S::zero() {
                walk(i + 1, stack, adj, balls, totals, d, quad, metric, rng)?;
            }
            stack.pop();
        }
        Ok(())
    }
    if k_max > 0 {
        walk(0, &mut stack, &adj, &balls, &mut totals, d, quad, metric, rng)?;
    }
    Ok(totals
        .into_iter()
        .enumerate()
        .map(|(i, e)| (i + 1, e))
        .collect())
}

/// `|B_x| − ∫_{B_x} (#others covering z) / (#all covering z) dz` for the
/// ball `own` among the balls `others`. Exact in one dimension.
pub fn xwise_summand<S, R>(
    d: usize,
    own: &Ball<S>,
    others: &[Ball<S>],
    quad: &QuadratureSpec<S>,
    rng: &mut R,
) -> Result<Estimate<S>>
where
    S: Scalar,
    R: Rng + ?Sized,
{
    let full = ball_volume(d, own.radius)?;
    let near: Vec<Ball<S>> = others
        .iter()
        .filter(|b| Metric::Euclidean.distance(&own.center, &b.center) < own.radius + b.radius)
        .copied()
        .collect();
    if near.is_empty() {
        return Ok(Estimate::exact(full));
    }
    if d == 1 {
        let (a, b) = (own.center[0] - own.radius, own.center[0] + own.radius);
        let mut cuts = vec![a, b];
        for n in &near {
            for e in [n.center[0] - n.radius, n.center[0] + n.radius] {
                if e > a && e < b {
                    cuts.push(e);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut shared = S::zero();
        for w in cuts.windows(2) {
            let (l, h) = (w[0], w[1]);
            if h <= l {
                continue;
            }
            let mid = (l + h) * S::of(0.5);
            let c = near
                .iter()
                .filter(|n| (mid - n.center[0]).abs() < n.radius)
                .count();
            shared += (h - l) * S::of_usize(c) / S::of_usize(c + 1);
        }
        return Ok(Estimate::exact(full - shared));
    }
    let set = BallSet::new(d, near);
    let mut lo = own.center;
    let mut hi = own.center;
    for i in 0..d {
        lo[i] -= own.radius;
        hi[i] += own.radius;
    }
    let shared = integrate_box(d, &lo, &hi, quad, rng, |z| {
        if !own.contains(z) {
            return S::zero();
        }
        let c = set.count_containing(z);
        S::of_usize(c) / S::of_usize(c + 1)
    });
    Ok(Estimate::new(full - shared.value, shared.stderr, shared.n_samples))
}

/// Enlarged neighbours of point `idx` for the x-wise summand: every other
/// point of a finite configuration, or every translate (including the
/// point's own) of the periodized configuration.
pub fn xwise_neighbours<S: Scalar>(
    config: &Configuration<S>,
    idx: usize,
    r: S,
    torus: Option<&Window<S>>,
) -> Result<(Ball<S>, Vec<Ball<S>>)> {
    let p = *config.get(idx).ok_or(Error::MissingPoint(idx))?;
    let own = Ball::new(p.x, p.radius + r);
    let reach = own.radius + config.r_max() + r;
    let others = match torus {
        None => config
            .within(&p.x, reach)
            .into_iter()
            .filter(|&j| j != idx)
            .map(|j| Ball::new(config.points()[j].x, config.points()[j].radius + r))
            .collect(),
        Some(w) => PeriodicView::new(config, w)?
            .images_near(&p.x, reach)
            .into_iter()
            .filter(|(j, y)| !(*j == idx && *y == p.x))
            .map(|(j, y)| Ball::new(y, config.points()[j].radius + r))
            .collect(),
    };
    Ok((own, others))
}

/// x-wise summand of point `idx`; see [`xwise_summand`].
pub fn xwise_palm_summand<S, R>(
    config: &Configuration<S>,
    idx: usize,
    r: S,
    torus: Option<&Window<S>>,
    quad: &QuadratureSpec<S>,
    rng: &mut R,
) -> Result<Estimate<S>>
where
    S: Scalar,
    R: Rng + ?Sized,
{
    let (own, others) = xwise_neighbours(config, idx, r, torus)?;
    xwise_summand(config.dim(), &own, &others, quad, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::exact_union_minus;
    use crate::model::MarkedPoint;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(d: usize, pts: &[([f64; 2], f64)]) -> Configuration<f64> {
        Configuration::from_points(d, pts.iter().map(|(x, r)| MarkedPoint::at([x[0], x[1], 0.0], *r))).unwrap()
    }

    fn union(c: &Configuration<f64>, r: f64, metric: &Metric<f64>) -> f64 {
        exact_union_minus(c.dim(), &enlarged(c, r), &[], metric).unwrap()
    }

    #[test]
    fn single_ball_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = cfg(2, &[([0.0, 0.0], 1.0)]);
        let e = kbody_expansion(&c, 0.5, 4, &QuadratureSpec::default(), &Metric::Euclidean, &mut rng).unwrap();
        assert_relative_eq!(e[0].1.value, std::f64::consts::PI * 2.25);
        assert!(e[1..].iter().all(|(_, v)| v.value == 0.0));
    }

    #[test]
    fn expansion_sums_to_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = cfg(2, &[([0.0, 0.0], 0.6), ([1.4, 0.2], 0.6), ([0.6, 1.3], 0.6), ([2.2, 1.4], 0.5)]);
        let r = 0.5;
        let e = kbody_expansion(&c, r, 4, &QuadratureSpec::default(), &Metric::Euclidean, &mut rng).unwrap();
        let total: Estimate<f64> = e.iter().map(|(_, v)| *v).sum();
        let u = union(&c, r, &Metric::Euclidean);
        assert!((total.value - u).abs() <= 4.0 * total.stderr + 1e-9, "{total:?} {u}");
        assert!(e[2].1.value > 0.0);
    }

    #[test]
    fn too_many_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<([f64; 2], f64)> = (0..11).map(|i| ([i as f64 * 3.0, 0.0], 0.5)).collect();
        let c = cfg(2, &pts);
        assert!(matches!(
            kbody_expansion(&c, 0.1, 3, &QuadratureSpec::default(), &Metric::Euclidean, &mut rng),
            Err(Error::TooManyPoints(11, 10))
        ));
    }

    #[test]
    fn xwise_line_sums_to_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = cfg(1, &[([0.0, 0.0], 0.5), ([1.3, 0.0], 0.4), ([2.1, 0.0], 0.3), ([4.0, 0.0], 0.2)]);
        let r = 0.6;
        let mut total = 0.0;
        for i in 0..c.len() {
            let s = xwise_palm_summand(&c, i, r, None, &QuadratureSpec::default(), &mut rng).unwrap();
            assert_eq!(s.stderr, 0.0);
            total += s.value;
        }
        assert_relative_eq!(total, union(&c, r, &Metric::Euclidean), epsilon = 1e-12);
    }

    #[test]
    fn xwise_plane_torus_sums_to_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = Window::lambda(2, 4.0).unwrap().with_torus(true);
        let c = cfg(2, &[([-1.8, -1.7], 0.4), ([1.6, 1.8], 0.5), ([0.0, 0.1], 0.6), ([0.9, -0.6], 0.3)]);
        let r = 0.4;
        let parts: Vec<Estimate<f64>> = (0..c.len())
            .map(|i| xwise_palm_summand(&c, i, r, Some(&w), &QuadratureSpec::default(), &mut rng).unwrap())
            .collect();
        let total: Estimate<f64> = parts.iter().copied().sum();
        let u = union(&c, r, &Metric::Torus(w));
        assert!((total.value - u).abs() <= 4.0 * total.stderr, "{total:?} {u}");
    }

    #[test]
    fn isolated_point_is_its_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = cfg(2, &[([0.0, 0.0], 0.5), ([5.0, 0.0], 0.5)]);
        let s = xwise_palm_summand(&c, 0, 0.5, None, &QuadratureSpec::default(), &mut rng).unwrap();
        assert_eq!(s.value, std::f64::consts::PI);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn single_term_bound_fails_for_wide_polymers() {
        // A unit ball flanked by eleven radius-0 points on each side with r = 10:
        // the other enlarged balls cover B(0, 11) almost 12-fold, so the
        // summand drops below φ_1 by more than |B(0, 11) \ B(0, 1)| = 20.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pts = vec![([0.0, 0.0], 1.0)];
        for k in 1..=11 {
            let off = 1.0 + 1e-3 * k as f64;
            pts.push(([off, 0.0], 0.0));
            pts.push(([-off, 0.0], 0.0));
        }
        let c = cfg(1, &pts);
        let s = xwise_palm_summand(&c, 0, 10.0, None, &QuadratureSpec::default(), &mut rng).unwrap();
        assert!(22.0 - s.value > 20.0, "{s:?}");
    }
}
