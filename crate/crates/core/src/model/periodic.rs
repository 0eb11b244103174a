use super::configuration::Configuration;
use super::point::{norm2, sub, MarkedPoint, Position};
use super::window::Window;
use crate::error::{Error, Result};
use crate::Scalar;

/// Lattice shifts `k` (in units of the window side) for which the translate
/// `box + k·side` meets the ball `B(x, s)`.
pub fn shifts_meeting<S: Scalar>(window: &Window<S>, x: &Position<S>, s: S) -> Vec<[i64; 3]> {
    let d = window.dim();
    let side = window.side();
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for i in 0..d {
        lo[i] = ((x[i] - s - window.hi(i)) / side).floor().f64() as i64;
        hi[i] = ((x[i] + s - window.lo(i)) / side).ceil().f64() as i64;
    }
    let mut out = Vec::new();
    let r1 = if d > 1 { lo[1]..=hi[1] } else { 0..=0 };
    let r2 = if d > 2 { lo[2]..=hi[2] } else { 0..=0 };
    for a in lo[0]..=hi[0] {
        for b in r1.clone() {
            for c in r2.clone() {
                out.push([a, b, c]);
            }
        }
    }
    out
}

#[inline]
pub fn translate<S: Scalar>(x: &Position<S>, k: &[i64; 3], side: S) -> Position<S> {
    [
        x[0] + S::of(k[0] as f64) * side,
        x[1] + S::of(k[1] as f64) * side,
        x[2] + S::of(k[2] as f64) * side,
    ]
}

/// A configuration inside a window viewed as the periodic tiling
/// `ω + side·ℤ^d`; neighbor queries return every translate in range.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicView<'a, S> {
    config: &'a Configuration<S>,
    window: Window<S>,
}

impl<'a, S: Scalar> PeriodicView<'a, S> {
    pub fn new(config: &'a Configuration<S>, window: &Window<S>) -> Result<Self> {
        let window = window.with_torus(true);
        if let Some(i) = config.iter().position(|p| !window.contains(&p.x)) {
            return Err(Error::OutsideWindow { index: i });
        }
        Ok(Self { config, window })
    }

    /// View without the window-membership check.
    pub(crate) fn trusted(config: &'a Configuration<S>, window: &Window<S>) -> Self {
        Self {
            config,
            window: window.with_torus(true),
        }
    }

    pub fn config(&self) -> &'a Configuration<S> {
        self.config
    }

    pub fn window(&self) -> &Window<S> {
        &self.window
    }

    /// Every translate `(index, position)` of a stored point within Euclidean
    /// distance `s` of `x`. `x` need not lie in the window.
    pub fn images_near(&self, x: &Position<S>, s: S) -> Vec<(usize, Position<S>)> {
        let side = self.window.side();
        let s2 = s * s;
        let mut out = Vec::new();
        for k in shifts_meeting(&self.window, x, s) {
            // Points y with y + k·side near x are the points near x - k·side.
            let neg = [-k[0], -k[1], -k[2]];
            let q = translate(x, &neg, side);
            for i in self.config.candidates_within(&q, s) {
                let img = translate(&self.config.points()[i].x, &k, side);
                if norm2(&sub(&img, x)) <= s2 {
                    out.push((i, img));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
        out
    }

    /// The tiling restricted to translates whose ball of radius
    /// `radius + extra` meets the window.
    pub fn materialize(&self, extra: S) -> Vec<MarkedPoint<S>> {
        let side = self.window.side();
        let mut out = Vec::new();
        for p in self.config.iter() {
            for k in shifts_meeting(&self.window, &p.x, p.radius + extra) {
                let img = translate(&p.x, &k, side);
                if self.window.euclidean().meets_ball(&img, p.radius + extra) {
                    out.push(MarkedPoint::at(img, p.radius));
                }
            }
        }
        out
    }

    pub fn torus_distance(&self, a: &Position<S>, b: &Position<S>) -> S {
        self.window.distance(a, b)
    }
}

/// `periodize(ω, Λ_n)`.
pub fn periodize<'a, S: Scalar>(
    config: &'a Configuration<S>,
    window: &Window<S>,
) -> Result<PeriodicView<'a, S>> {
    PeriodicView::new(config, window)
}
