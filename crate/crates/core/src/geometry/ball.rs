use crate::error::{invalid, Error, Result};
use crate::model::{norm2, shifts_meeting, sub, translate, Position, Window};
use crate::Scalar;

/// Closed ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball<S> {
    pub center: Position<S>,
    pub radius: S,
}

impl<S: Scalar> Ball<S> {
    pub fn new(center: Position<S>, radius: S) -> Self {
        debug_assert!(radius >= S::zero());
        Self { center, radius }
    }

    #[inline]
    pub fn contains(&self, z: &Position<S>) -> bool {
        norm2(&sub(z, &self.center)) <= self.radius * self.radius
    }
}

/// Distance convention for intersection and union computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric<S> {
    Euclidean,
    /// Periodic identification of the given window.
    Torus(Window<S>),
}

impl<S: Scalar> Metric<S> {
    pub fn distance(&self, a: &Position<S>, b: &Position<S>) -> S {
        match self {
            Metric::Euclidean => norm2(&sub(a, b)).sqrt(),
            Metric::Torus(w) => w.with_torus(true).distance(a, b),
        }
    }
}

/// Volume of the unit ball: `v_1 = 2`, `v_2 = π`, `v_3 = 4π/3`.
pub fn unit_ball_volume<S: Scalar>(d: usize) -> Result<S> {
    match d {
        1 => Ok(S::of(2.0)),
        2 => Ok(S::PI()),
        3 => Ok(S::of(4.0) / S::of(3.0) * S::PI()),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// `v_d · radius^d`.
pub fn ball_volume<S: Scalar>(d: usize, radius: S) -> Result<S> {
    if !(radius >= S::zero()) {
        return Err(invalid("radius", format!("{radius} is negative")));
    }
    Ok(unit_ball_volume::<S>(d)? * radius.powi(d as i32))
}

/// Closed-form `|B(0, a) ∩ B(t e_1, b)|`.
pub fn lens_volume<S: Scalar>(d: usize, a: S, b: S, t: S) -> S {
    let zero = S::zero();
    if t >= a + b {
        return zero;
    }
    let small = a.min(b);
    if t <= (a - b).abs() {
        return unit_ball_volume::<S>(d).unwrap_or(zero) * small.powi(d as i32);
    }
    match d {
        1 => (a.min(t + b) - (-a).max(t - b)).max(zero),
        2 => {
            let two = S::of(2.0);
            let ca = ((t * t + a * a - b * b) / (two * t * a)).max(-S::one()).min(S::one());
            let cb = ((t * t + b * b - a * a) / (two * t * b)).max(-S::one()).min(S::one());
            let k = ((-t + a + b) * (t + a - b) * (t - a + b) * (t + a + b)).max(zero);
            a * a * ca.acos() + b * b * cb.acos() - k.sqrt() / two
        }
        3 => {
            let s = a + b - t;
            S::PI() * s * s * (t * t + S::of(2.0) * t * (a + b) - S::of(3.0) * (a - b) * (a - b))
                / (S::of(12.0) * t)
        }
        _ => zero,
    }
}

/// `|B_1 ∩ B_2|` in closed form. Under the torus metric the lens volumes of
/// all translates are summed, which is exact as long as neither radius
/// exceeds half the window side.
pub fn pair_intersection_volume<S: Scalar>(
    d: usize,
    b1: &Ball<S>,
    b2: &Ball<S>,
    metric: &Metric<S>,
) -> S {
    match metric {
        Metric::Euclidean => {
            let t = norm2(&sub(&b1.center, &b2.center)).sqrt();
            lens_volume(d, b1.radius, b2.radius, t)
        }
        Metric::Torus(w) => {
            let reach = b1.radius + b2.radius;
            let side = w.side();
            // Translates of b2's center within reach of b1's center.
            let mut acc = S::zero();
            let rel = sub(&b2.center, &b1.center);
            let probe = Window::new(d, [S::zero(); 3], side, true).expect("valid window");
            for k in shifts_meeting(&probe, &[S::zero(); 3], reach) {
                let img = translate(&probe.wrap(&rel), &k, side);
                let t = norm2(&img).sqrt();
                if t < reach {
                    acc += lens_volume(d, b1.radius, b2.radius, t);
                }
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(ball_volume(2, 1.5).unwrap(), 7.068583470577035, epsilon = 1e-12);
        assert_eq!(ball_volume(3, 0.0).unwrap(), 0.0);
        assert_eq!(ball_volume(1, 2.0).unwrap(), 4.0);
        assert!(ball_volume(2, -1.0).is_err());
        assert!(ball_volume(4, 1.0).is_err());
    }

    #[test]
    fn lens_limits() {
        for d in 1..=3 {
            assert_eq!(lens_volume(d, 1.0, 1.0, 2.0), 0.0);
            assert_relative_eq!(lens_volume(d, 1.0, 1.0, 0.0), ball_volume(d, 1.0).unwrap());
            assert_relative_eq!(lens_volume(d, 2.0, 0.5, 1.0), ball_volume(d, 0.5).unwrap());
            assert_relative_eq!(lens_volume(d, 1.0, 0.7, 1.2), lens_volume(d, 0.7, 1.0, 1.2), epsilon = 1e-12);
        }
    }

    #[test]
    fn lens_plane_value() {
        // 2·2.25·acos(2/3) − √20/2
        let want = 4.5 * (2.0f64 / 3.0).acos() - 20f64.sqrt() / 2.0;
        assert_relative_eq!(lens_volume(2, 1.5, 1.5, 2.0), want, epsilon = 1e-12);
        assert_relative_eq!(want, 1.5487, epsilon = 1e-4);
    }

    #[test]
    fn lens_space_equal_caps() {
        // Two caps of height h = a - t/2: 2·πh²(3a − h)/3.
        let (a, t) = (1.0f64, 1.2);
        let h = a - t / 2.0;
        let want = 2.0 * std::f64::consts::PI * h * h * (3.0 * a - h) / 3.0;
        assert_relative_eq!(lens_volume(3, a, a, t), want, epsilon = 1e-12);
    }

    #[test]
    fn torus_pair_sums_translates() {
        let w = Window::lambda(1, 4.0).unwrap().with_torus(true);
        let a = Ball::new([-1.8, 0.0, 0.0], 0.5);
        let b = Ball::new([1.8, 0.0, 0.0], 0.5);
        // Torus distance 0.4: overlap 0.6.
        assert_relative_eq!(pair_intersection_volume(1, &a, &b, &Metric::Torus(w)), 0.6, epsilon = 1e-12);
        assert_eq!(pair_intersection_volume(1, &a, &b, &Metric::Euclidean), 0.0);
    }
}
