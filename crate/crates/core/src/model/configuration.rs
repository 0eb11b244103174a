use std::collections::HashMap;

use super::point::{check_dim, norm2, sub, MarkedPoint, Position};
use crate::error::{Error, Result};
use crate::Scalar;

type CellKey = [i64; 3];

/// Uniform grid over point positions.
#[derive(Debug, Clone)]
struct Grid<S> {
    cell: S,
    cells: HashMap<CellKey, Vec<usize>>,
}

impl<S: Scalar> Grid<S> {
    fn new(cell: S) -> Self {
        Self {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, d: usize, x: &Position<S>) -> CellKey {
        let mut k = [0i64; 3];
        for i in 0..d {
            k[i] = (x[i] / self.cell).floor().f64() as i64;
        }
        k
    }

    fn insert(&mut self, d: usize, x: &Position<S>, idx: usize) {
        let k = self.key(d, x);
        self.cells.entry(k).or_default().push(idx);
    }

    fn remove(&mut self, d: usize, x: &Position<S>, idx: usize) {
        let k = self.key(d, x);
        if let Some(v) = self.cells.get_mut(&k) {
            if let Some(pos) = v.iter().position(|&i| i == idx) {
                v.swap_remove(pos);
            }
            if v.is_empty() {
                self.cells.remove(&k);
            }
        }
    }

    fn relabel(&mut self, d: usize, x: &Position<S>, from: usize, to: usize) {
        let k = self.key(d, x);
        if let Some(v) = self.cells.get_mut(&k) {
            for i in v.iter_mut() {
                if *i == from {
                    *i = to;
                }
            }
        }
    }
}

/// Finite simple set of marked points with a uniform-grid index and running
/// maximum radius.
#[derive(Debug, Clone)]
pub struct Configuration<S> {
    d: usize,
    points: Vec<MarkedPoint<S>>,
    r_max: S,
    base_cell: S,
    grid: Grid<S>,
}

impl<S: Scalar> PartialEq for Configuration<S> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.points == other.points
    }
}

impl<S: Scalar> Configuration<S> {
    /// Empty configuration with a unit base cell.
    pub fn new(d: usize) -> Self {
        Self::with_cell(d, S::one())
    }

    /// Empty configuration whose grid cell is at least `base_cell`. The cell
    /// grows with the largest radius inserted so that hardcore queries stay
    /// local.
    pub fn with_cell(d: usize, base_cell: S) -> Self {
        check_dim(d).expect("dimension must be 1, 2 or 3");
        let base_cell = if base_cell > S::zero() && base_cell.is_finite() {
            base_cell
        } else {
            S::one()
        };
        Self {
            d,
            points: Vec::new(),
            r_max: S::zero(),
            base_cell,
            grid: Grid::new(base_cell),
        }
    }

    pub fn from_points(d: usize, points: impl IntoIterator<Item = MarkedPoint<S>>) -> Result<Self> {
        check_dim(d)?;
        let mut c = Self::new(d);
        for p in points {
            c.insert(p)?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[MarkedPoint<S>] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MarkedPoint<S>> {
        self.points.iter()
    }

    pub fn get(&self, idx: usize) -> Option<&MarkedPoint<S>> {
        self.points.get(idx)
    }

    pub fn r_max(&self) -> S {
        self.r_max
    }

    pub fn base_cell(&self) -> S {
        self.base_cell
    }

    fn target_cell(&self) -> S {
        self.base_cell.max(S::of(2.0) * self.r_max)
    }

    fn rebuild(&mut self) {
        let mut grid = Grid::new(self.target_cell());
        for (i, p) in self.points.iter().enumerate() {
            grid.insert(self.d, &p.x, i);
        }
        self.grid = grid;
    }

    /// Index of a point at exactly this position, if any.
    pub fn find(&self, x: &Position<S>) -> Option<usize> {
        let k = self.grid.key(self.d, x);
        self.grid
            .cells
            .get(&k)?
            .iter()
            .copied()
            .find(|&i| self.points[i].x == *x)
    }

    /// Inserts a point; rejects a second point at an occupied position.
    pub fn insert(&mut self, p: MarkedPoint<S>) -> Result<usize> {
        if let Some(i) = self.find(&p.x) {
            return Err(Error::DuplicatePosition(i));
        }
        let idx = self.points.len();
        self.points.push(p);
        if p.radius > self.r_max {
            self.r_max = p.radius;
            if self.target_cell() > self.grid.cell * S::of(1.5) {
                self.rebuild();
                return Ok(idx);
            }
        }
        self.grid.insert(self.d, &p.x, idx);
        Ok(idx)
    }

    /// Removes point `idx`; the last point takes its index.
    pub fn remove(&mut self, idx: usize) -> Result<MarkedPoint<S>> {
        if idx >= self.points.len() {
            return Err(Error::MissingPoint(idx));
        }
        let last = self.points.len() - 1;
        let p = self.points[idx];
        self.grid.remove(self.d, &p.x, idx);
        if idx != last {
            let moved = self.points[last].x;
            self.grid.relabel(self.d, &moved, last, idx);
        }
        self.points.swap_remove(idx);
        if p.radius >= self.r_max {
            self.r_max = self
                .points
                .iter()
                .map(|q| q.radius)
                .fold(S::zero(), S::max);
        }
        Ok(p)
    }

    /// Replaces point `idx` in place (translation or resize).
    pub fn replace(&mut self, idx: usize, p: MarkedPoint<S>) -> Result<MarkedPoint<S>> {
        if idx >= self.points.len() {
            return Err(Error::MissingPoint(idx));
        }
        if let Some(j) = self.find(&p.x) {
            if j != idx {
                return Err(Error::DuplicatePosition(j));
            }
        }
        let old = self.points[idx];
        self.grid.remove(self.d, &old.x, idx);
        self.points[idx] = p;
        if p.radius > self.r_max {
            self.r_max = p.radius;
        } else if old.radius >= self.r_max && p.radius < old.radius {
            self.r_max = self
                .points
                .iter()
                .map(|q| q.radius)
                .fold(S::zero(), S::max);
        }
        if self.target_cell() > self.grid.cell * S::of(1.5) {
            self.rebuild();
        } else {
            self.grid.insert(self.d, &p.x, idx);
        }
        Ok(old)
    }

    /// Indices of a superset of the points within Euclidean distance `s` of
    /// `x`.
    pub fn candidates_within(&self, x: &Position<S>, s: S) -> Vec<usize> {
        let d = self.d;
        let cell = self.grid.cell;
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        let mut n_cells: f64 = 1.0;
        for i in 0..d {
            lo[i] = ((x[i] - s) / cell).floor().f64() as i64;
            hi[i] = ((x[i] + s) / cell).floor().f64() as i64;
            n_cells *= (hi[i] - lo[i] + 1) as f64;
        }
        if n_cells > (self.grid.cells.len() as f64) * 2.0 + 8.0 {
            // Scanning occupied cells is cheaper than enumerating the box.
            let mut out = Vec::new();
            for (k, v) in &self.grid.cells {
                if (0..d).all(|i| k[i] >= lo[i] && k[i] <= hi[i]) {
                    out.extend_from_slice(v);
                }
            }
            return out;
        }
        let mut out = Vec::new();
        let mut k = [0i64; 3];
        let (r1, r2) = (
            if d > 1 { lo[1]..=hi[1] } else { 0..=0 },
            if d > 2 { lo[2]..=hi[2] } else { 0..=0 },
        );
        for k0 in lo[0]..=hi[0] {
            k[0] = k0;
            for k1 in r1.clone() {
                k[1] = k1;
                for k2 in r2.clone() {
                    k[2] = k2;
                    if let Some(v) = self.grid.cells.get(&k) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out
    }

    /// Indices of exactly the points within Euclidean distance `s` of `x`.
    pub fn within(&self, x: &Position<S>, s: S) -> Vec<usize> {
        let s2 = s * s;
        let mut v: Vec<usize> = self
            .candidates_within(x, s)
            .into_iter()
            .filter(|&i| norm2(&sub(&self.points[i].x, x)) <= s2)
            .collect();
        v.sort_unstable();
        v
    }

    /// Sum of `radius^d` over all points.
    pub fn radius_moment(&self) -> S {
        self.points.iter().map(|p| p.radius.powi(self.d as i32)).sum()
    }
}

impl<'a, S> IntoIterator for &'a Configuration<S> {
    type Item = &'a MarkedPoint<S>;
    type IntoIter = std::slice::Iter<'a, MarkedPoint<S>>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
