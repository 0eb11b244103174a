use std::collections::HashMap;

use rand::Rng;

use super::ball::{Ball, Metric};
use super::exact::{disk_union_area, interval_union_length, Disk, Rect};
use super::quadrature::{integrate_box, QuadratureSpec};
use crate::model::{norm2, shifts_meeting, sub, translate, Estimate, Position, Window};
use crate::Scalar;

/// Balls with a uniform-grid index for membership queries.
#[derive(Debug, Clone)]
pub struct BallSet<S> {
    d: usize,
    balls: Vec<Ball<S>>,
    cell: S,
    grid: HashMap<[i64; 3], Vec<usize>>,
}

impl<S: Scalar> BallSet<S> {
    pub fn new(d: usize, balls: Vec<Ball<S>>) -> Self {
        let r_max = balls.iter().map(|b| b.radius).fold(S::zero(), S::max);
        let cell = if r_max > S::zero() { r_max } else { S::one() };
        let mut set = Self {
            d,
            balls,
            cell,
            grid: HashMap::new(),
        };
        for i in 0..set.balls.len() {
            let k = set.key(&set.balls[i].center);
            set.grid.entry(k).or_default().push(i);
        }
        set
    }

    fn key(&self, x: &Position<S>) -> [i64; 3] {
        let mut k = [0i64; 3];
        for i in 0..self.d {
            k[i] = (x[i] / self.cell).floor().f64() as i64;
        }
        k
    }

    pub fn balls(&self) -> &[Ball<S>] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    fn visit(&self, z: &Position<S>, mut f: impl FnMut(usize)) {
        let c = self.key(z);
        let span = |i: usize| if i < self.d { -1..=1 } else { 0..=0 };
        for a in span(0) {
            for b in span(1) {
                for e in span(2) {
                    if let Some(v) = self.grid.get(&[c[0] + a, c[1] + b, c[2] + e]) {
                        for &i in v {
                            if self.balls[i].contains(z) {
                                f(i);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Lowest index of a ball containing `z`.
    pub fn first_containing(&self, z: &Position<S>) -> Option<usize> {
        let mut best: Option<usize> = None;
        self.visit(z, |i| best = Some(best.map_or(i, |b| b.min(i))));
        best
    }

    pub fn count_containing(&self, z: &Position<S>) -> usize {
        let mut n = 0;
        self.visit(z, |_| n += 1);
        n
    }

    pub fn any_containing(&self, z: &Position<S>) -> bool {
        self.count_containing(z) > 0
    }
}

/// Translates of the balls that meet the closed window.
pub fn torus_images<S: Scalar>(window: &Window<S>, balls: &[Ball<S>]) -> Vec<Ball<S>> {
    let plain = window.euclidean();
    let side = window.side();
    let mut out = Vec::new();
    for b in balls {
        for k in shifts_meeting(window, &b.center, b.radius) {
            let c = translate(&b.center, &k, side);
            if plain.meets_ball(&c, b.radius) {
                out.push(Ball::new(c, b.radius));
            }
        }
    }
    out
}

fn bbox<S: Scalar>(d: usize, b: &Ball<S>) -> (Position<S>, Position<S>) {
    let mut lo = b.center;
    let mut hi = b.center;
    for i in 0..d {
        lo[i] -= b.radius;
        hi[i] += b.radius;
    }
    (lo, hi)
}

fn hull<S: Scalar>(d: usize, balls: &[Ball<S>]) -> Option<(Position<S>, Position<S>)> {
    let mut it = balls.iter().filter(|b| b.radius > S::zero());
    let first = it.next()?;
    let (mut lo, mut hi) = bbox(d, first);
    for b in it {
        let (l, h) = bbox(d, b);
        for i in 0..d {
            lo[i] = lo[i].min(l[i]);
            hi[i] = hi[i].max(h[i]);
        }
    }
    Some((lo, hi))
}

fn ball_meets_box<S: Scalar>(d: usize, b: &Ball<S>, lo: &Position<S>, hi: &Position<S>) -> bool {
    let mut acc = S::zero();
    for i in 0..d {
        let e = (lo[i] - b.center[i]).max(b.center[i] - hi[i]).max(S::zero());
        acc += e * e;
    }
    acc < b.radius * b.radius
}

/// Reduces the torus case to a Euclidean one: all translates meeting the
/// window, clipped to the window.
fn unfold<S: Scalar>(
    balls: &[Ball<S>],
    minus: &[Ball<S>],
    metric: &Metric<S>,
) -> (Vec<Ball<S>>, Vec<Ball<S>>, Option<Window<S>>) {
    match metric {
        Metric::Euclidean => (balls.to_vec(), minus.to_vec(), None),
        Metric::Torus(w) => (torus_images(w, balls), torus_images(w, minus), Some(*w)),
    }
}

/// Clipping box: the hull of `balls`, intersected with the window if any.
fn clip_box<S: Scalar>(
    d: usize,
    balls: &[Ball<S>],
    window: Option<&Window<S>>,
) -> Option<(Position<S>, Position<S>)> {
    let (mut lo, mut hi) = hull(d, balls)?;
    if let Some(w) = window {
        for i in 0..d {
            lo[i] = lo[i].max(w.lo(i));
            hi[i] = hi[i].min(w.hi(i));
            if hi[i] <= lo[i] {
                return None;
            }
        }
    }
    Some((lo, hi))
}

/// `|(⋃ balls) \ (⋃ minus)|` computed exactly for `d <= 2`. Returns `None`
/// for `d = 3`.
pub fn exact_union_minus<S: Scalar>(
    d: usize,
    balls: &[Ball<S>],
    minus: &[Ball<S>],
    metric: &Metric<S>,
) -> Option<S> {
    if d > 2 {
        return None;
    }
    let (bs, ms, window) = unfold(balls, minus, metric);
    let Some((lo, hi)) = clip_box(d, &bs, window.as_ref()) else {
        return Some(S::zero());
    };
    let ms: Vec<Ball<S>> = ms
        .into_iter()
        .filter(|m| ball_meets_box(d, m, &lo, &hi))
        .collect();
    let value = if d == 1 {
        let iv = |v: &[Ball<S>]| -> Vec<(S, S)> {
            v.iter()
                .map(|b| (b.center[0] - b.radius, b.center[0] + b.radius))
                .collect()
        };
        let clip = Some((lo[0], hi[0]));
        let mut all = iv(&bs);
        all.extend(iv(&ms));
        interval_union_length(&all, clip) - interval_union_length(&iv(&ms), clip)
    } else {
        let rect = Rect {
            x0: lo[0],
            y0: lo[1],
            x1: hi[0],
            y1: hi[1],
        };
        let disks = |v: &[Ball<S>]| -> Vec<Disk<S>> {
            v.iter()
                .map(|b| Disk {
                    cx: b.center[0],
                    cy: b.center[1],
                    r: b.radius,
                })
                .collect()
        };
        let mut all = disks(&bs);
        let m = disks(&ms);
        all.extend_from_slice(&m);
        // Without a window or removed balls the hull clip is a no-op.
        let clip = (window.is_some() || !m.is_empty()).then_some(rect);
        let minus_area = if m.is_empty() {
            S::zero()
        } else {
            disk_union_area(&m, clip)
        };
        disk_union_area(&all, clip) - minus_area
    };
    Some(value.max(S::zero()))
}

/// `|(⋃ balls) \ (⋃ minus)|` by stratified quadrature over the bounding box
/// of each ball; a sample point counts for the lowest-index ball containing
/// it. One dimension is evaluated exactly.
pub fn union_volume<S, R>(
    d: usize,
    balls: &[Ball<S>],
    minus: &[Ball<S>],
    quad: &QuadratureSpec<S>,
    metric: &Metric<S>,
    rng: &mut R,
) -> Estimate<S>
where
    S: Scalar,
    R: Rng + ?Sized,
{
    if d == 1 {
        return Estimate::exact(exact_union_minus(d, balls, minus, metric).unwrap_or(S::zero()));
    }
    let (bs, ms, window) = unfold(balls, minus, metric);
    let bset = BallSet::new(d, bs);
    let mset = BallSet::new(d, ms);
    let mut total = Estimate::exact(S::zero());
    for (i, b) in bset.balls().iter().enumerate() {
        if b.radius <= S::zero() {
            continue;
        }
        let (mut lo, mut hi) = bbox(d, b);
        if let Some(w) = &window {
            for k in 0..d {
                lo[k] = lo[k].max(w.lo(k));
                hi[k] = hi[k].min(w.hi(k));
            }
        }
        let part = integrate_box(d, &lo, &hi, quad, rng, |z| {
            if bset.first_containing(z) == Some(i) && !mset.any_containing(z) {
                S::one()
            } else {
                S::zero()
            }
        });
        total = total.add(part);
    }
    total.n_samples = total.n_samples.max(1);
    total
}

/// Whether `z` lies in every ball.
pub(crate) fn in_all<S: Scalar>(balls: &[Ball<S>], z: &Position<S>) -> bool {
    balls
        .iter()
        .all(|b| norm2(&sub(z, &b.center)) <= b.radius * b.radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ball_volume, lens_volume};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b(x: f64, y: f64, r: f64) -> Ball<f64> {
        Ball::new([x, y, 0.0], r)
    }

    fn within(e: &Estimate<f64>, want: f64) -> bool {
        (e.value - want).abs() <= 4.0 * e.stderr + 1e-9
    }

    #[test]
    fn single_ball_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = QuadratureSpec::default();
        for d in 2..=3 {
            let e = union_volume(d, &[Ball::new([0.3; 3], 1.2)], &[], &q, &Metric::Euclidean, &mut rng);
            let want = ball_volume(d, 1.2).unwrap();
            assert!(within(&e, want), "{d} {e:?}");
            assert!(e.stderr <= 2e-3 * want);
        }
    }

    #[test]
    fn set_minus_itself_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bs = [b(0.0, 0.0, 1.0), b(1.0, 0.5, 0.7)];
        let e = union_volume(2, &bs, &bs, &QuadratureSpec::default(), &Metric::Euclidean, &mut rng);
        assert_eq!(e.value, 0.0);
        assert_eq!(exact_union_minus(2, &bs, &bs, &Metric::Euclidean), Some(0.0));
    }

    #[test]
    fn exact_matches_quadrature_with_minus() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bs = [b(0.0, 0.0, 1.0), b(1.2, 0.3, 0.8), b(0.5, 1.0, 0.9)];
        let ms = [b(-0.8, -0.2, 0.6), b(1.6, 1.2, 0.9)];
        let q = QuadratureSpec::default().with_target(2e-4);
        let e = union_volume(2, &bs, &ms, &q, &Metric::Euclidean, &mut rng);
        let x = exact_union_minus(2, &bs, &ms, &Metric::Euclidean).unwrap();
        assert!(within(&e, x), "{e:?} vs {x}");
    }

    #[test]
    fn torus_union_exact_and_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = Window::lambda(2, 4.0).unwrap().with_torus(true);
        let bs = [b(-1.8, -1.8, 0.6), b(1.7, 1.9, 0.5), b(0.0, 0.0, 0.7)];
        let m = Metric::Torus(w);
        let x = exact_union_minus(2, &bs, &[], &m).unwrap();
        // The two corner balls meet across the corner: torus distance √(0.5² + 0.3²).
        let t = (0.5f64 * 0.5 + 0.3 * 0.3).sqrt();
        let want = [0.6, 0.5, 0.7]
            .iter()
            .map(|&r| ball_volume(2, r).unwrap())
            .sum::<f64>()
            - lens_volume(2, 0.6, 0.5, t);
        approx::assert_relative_eq!(x, want, epsilon = 1e-10);
        let e = union_volume(2, &bs, &[], &QuadratureSpec::default(), &m, &mut rng);
        assert!(within(&e, want), "{e:?}");
    }

    #[test]
    fn one_dimension_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bs = [Ball::new([0.0; 3], 1.0), Ball::new([1.5, 0.0, 0.0], 1.0)];
        let ms = [Ball::new([3.0, 0.0, 0.0], 1.0)];
        let e = union_volume(1, &bs, &ms, &QuadratureSpec::default(), &Metric::Euclidean, &mut rng);
        assert_eq!(e.stderr, 0.0);
        approx::assert_relative_eq!(e.value, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn far_balls_add() {
        let bs = [b(0.0, 0.0, 1.0), b(10.0, 0.0, 2.0)];
        let x = exact_union_minus(2, &bs, &[], &Metric::Euclidean).unwrap();
        approx::assert_relative_eq!(x, 5.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn ballset_queries() {
        let s = BallSet::new(2, vec![b(0.0, 0.0, 1.0), b(0.5, 0.0, 1.0), b(5.0, 5.0, 0.2)]);
        assert_eq!(s.first_containing(&[0.4, 0.0, 0.0]), Some(0));
        assert_eq!(s.count_containing(&[0.4, 0.0, 0.0]), 2);
        assert_eq!(s.first_containing(&[1.4, 0.0, 0.0]), Some(1));
        assert!(!s.any_containing(&[3.0, 3.0, 0.0]));
    }
}
