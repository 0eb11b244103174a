use super::point::{check_dim, Position};
use crate::error::{invalid, Result};
use crate::Scalar;

/// Axis-aligned half-open cube `center + [-side/2, side/2)^d`, optionally
/// identified with a torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<S> {
    d: usize,
    center: Position<S>,
    side: S,
    torus: bool,
}

impl<S: Scalar> Window<S> {
    pub fn new(d: usize, center: Position<S>, side: S, torus: bool) -> Result<Self> {
        check_dim(d)?;
        if !(side.is_finite() && side > S::zero()) {
            return Err(invalid("side", format!("{side} must be positive and finite")));
        }
        let mut c = [S::zero(); 3];
        c[..d].copy_from_slice(&center[..d]);
        Ok(Self {
            d,
            center: c,
            side,
            torus,
        })
    }

    /// `Λ_n = [-n/2, n/2)^d`.
    pub fn lambda(d: usize, n: S) -> Result<Self> {
        Self::new(d, [S::zero(); 3], n, false)
    }

    pub fn with_torus(mut self, torus: bool) -> Self {
        self.torus = torus;
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn center(&self) -> Position<S> {
        self.center
    }

    pub fn side(&self) -> S {
        self.side
    }

    pub fn is_torus(&self) -> bool {
        self.torus
    }

    pub fn volume(&self) -> S {
        self.side.powi(self.d as i32)
    }

    #[inline]
    pub fn lo(&self, i: usize) -> S {
        self.center[i] - self.side * S::of(0.5)
    }

    #[inline]
    pub fn hi(&self, i: usize) -> S {
        self.center[i] + self.side * S::of(0.5)
    }

    #[inline]
    pub fn contains(&self, x: &Position<S>) -> bool {
        (0..self.d).all(|i| x[i] >= self.lo(i) && x[i] < self.hi(i))
    }

    /// `b - a`, reduced to the minimum image when the window is a torus.
    #[inline]
    pub fn displacement(&self, a: &Position<S>, b: &Position<S>) -> Position<S> {
        let mut v = [S::zero(); 3];
        for i in 0..self.d {
            let mut dx = b[i] - a[i];
            if self.torus {
                dx = dx - self.side * (dx / self.side).round();
            }
            v[i] = dx;
        }
        v
    }

    #[inline]
    pub fn distance(&self, a: &Position<S>, b: &Position<S>) -> S {
        super::point::norm2(&self.displacement(a, b)).sqrt()
    }

    /// Maps a position into the window by periodic identification.
    pub fn wrap(&self, x: &Position<S>) -> Position<S> {
        let mut y = *x;
        for i in 0..self.d {
            let lo = self.lo(i);
            let mut t = (x[i] - lo) % self.side;
            if t < S::zero() {
                t += self.side;
            }
            let mut v = lo + t;
            // Rounding can land exactly on the open upper face.
            if v >= self.hi(i) {
                v = lo;
            }
            y[i] = v;
        }
        y
    }

    /// Euclidean distance from `x` to the closed box (0 inside).
    pub fn distance_to(&self, x: &Position<S>) -> S {
        let mut acc = S::zero();
        for i in 0..self.d {
            let excess = (self.lo(i) - x[i]).max(x[i] - self.hi(i)).max(S::zero());
            acc += excess * excess;
        }
        acc.sqrt()
    }

    /// Whether the closed ball `B(x, radius)` meets the closed box.
    pub fn meets_ball(&self, x: &Position<S>, radius: S) -> bool {
        self.distance_to(x) <= radius
    }

    /// The same box without torus identification.
    pub fn euclidean(&self) -> Self {
        self.with_torus(false)
    }

    /// Smallest integer `m >= 1` with `x ∈ center + Λ_m`.
    pub fn scale_of(&self, x: &Position<S>) -> usize {
        let mut m = 1usize;
        for i in 0..self.d {
            let u = (x[i] - self.center[i]).f64();
            // x ∈ [-m/2, m/2)  <=>  m >= -2u and m > 2u
            let a = (-2.0 * u).ceil();
            let b = (2.0 * u).floor() + 1.0;
            let need = a.max(b).max(1.0);
            m = m.max(need as usize);
        }
        m
    }
}
