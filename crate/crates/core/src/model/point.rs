use crate::error::{invalid, Error, Result};
use crate::Scalar;

/// Coordinates in up to three dimensions; unused trailing entries are zero.
pub type Position<S> = [S; 3];

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

#[inline]
pub fn sub<S: Scalar>(a: &Position<S>, b: &Position<S>) -> Position<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add<S: Scalar>(a: &Position<S>, b: &Position<S>) -> Position<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn norm2<S: Scalar>(v: &Position<S>) -> S {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

#[inline]
pub fn dist<S: Scalar>(a: &Position<S>, b: &Position<S>) -> S {
    norm2(&sub(a, b)).sqrt()
}

/// Builds a padded position from a slice of `d` coordinates.
pub fn position<S: Scalar>(coords: &[S]) -> Position<S> {
    let mut p = [S::zero(); 3];
    for (slot, c) in p.iter_mut().zip(coords) {
        *slot = *c;
    }
    p
}

/// A sphere center together with its radius mark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint<S> {
    pub x: Position<S>,
    pub radius: S,
}

impl<S: Scalar> MarkedPoint<S> {
    /// Validated constructor: exactly `d` finite coordinates and a finite,
    /// nonnegative radius.
    pub fn new(d: usize, coords: &[S], radius: S) -> Result<Self> {
        check_dim(d)?;
        if coords.len() != d {
            return Err(invalid(
                "coords",
                format!("expected {d} coordinates, got {}", coords.len()),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coords", "non-finite coordinate"));
        }
        if !(radius.is_finite() && radius >= S::zero()) {
            return Err(invalid("radius", format!("{radius} is not a finite nonnegative mark")));
        }
        Ok(Self {
            x: position(coords),
            radius,
        })
    }

    /// Unchecked constructor from a padded position.
    #[inline]
    pub fn at(x: Position<S>, radius: S) -> Self {
        Self { x, radius }
    }

    pub fn coords(&self, d: usize) -> &[S] {
        &self.x[..d]
    }
}
