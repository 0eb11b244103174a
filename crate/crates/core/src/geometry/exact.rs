//! Exact union measures in one and two dimensions.
//!
//! One dimension uses interval merging. Two dimensions integrate
//! `½∮(x dy − y dx)` over the boundary of the union, which consists of the
//! uncovered arcs of each circle and, when a clipping rectangle is given,
//! the pieces of the rectangle's edges lying inside the union.

use std::f64::consts::TAU;

use crate::Scalar;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<S> {
    pub x0: S,
    pub y0: S,
    pub x1: S,
    pub y1: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<S> {
    pub cx: S,
    pub cy: S,
    pub r: S,
}

/// Sorts and merges intervals in place, returning the merged list.
pub fn merge_intervals<S: Scalar>(mut iv: Vec<(S, S)>) -> Vec<(S, S)> {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(S, S)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Length of `⋃ [a_i, b_i]`, optionally clipped to `[lo, hi]`.
pub fn interval_union_length<S: Scalar>(iv: &[(S, S)], clip: Option<(S, S)>) -> S {
    let clipped: Vec<(S, S)> = iv
        .iter()
        .map(|&(a, b)| match clip {
            Some((lo, hi)) => (a.max(lo), b.min(hi)),
            None => (a, b),
        })
        .collect();
    merge_intervals(clipped)
        .into_iter()
        .map(|(a, b)| b - a)
        .sum()
}

/// Lines closer to tangency than this (relative to the radius) are treated as
/// missing the circle. The neglected cap has relative area below 1e-17, and
/// treating arc exclusion and chord inclusion alike avoids the O(sqrt(eps))
/// mismatch of a nearly tangent cut.
const TANGENT: f64 = 1.0 - 1e-12;

/// Pushes the angular interval `[a, b]` (b - a <= 2π) normalised to `[0, 2π)`.
fn push_arc(out: &mut Vec<(f64, f64)>, a: f64, b: f64) {
    if b - a >= TAU {
        out.push((0.0, TAU));
        return;
    }
    let a0 = a.rem_euclid(TAU);
    let b0 = a0 + (b - a);
    if b0 <= TAU {
        out.push((a0, b0));
    } else {
        out.push((a0, TAU));
        out.push((0.0, b0 - TAU));
    }
}

/// Angular interval where the circle lies beyond a line at signed distance
/// `s` from its center in direction `phi`.
fn beyond_line(out: &mut Vec<(f64, f64)>, phi: f64, s: f64, r: f64) -> bool {
    let t = s / r;
    if t >= TANGENT {
        return false;
    }
    if t <= -1.0 {
        out.push((0.0, TAU));
        return true;
    }
    let w = t.acos();
    push_arc(out, phi - w, phi + w);
    false
}

/// Area of `(⋃ disks) ∩ clip` (or of the plain union when `clip` is `None`).
pub fn disk_union_area<S: Scalar>(disks: &[Disk<S>], clip: Option<Rect<S>>) -> S {
    // Work in f64 relative to a local origin to limit cancellation.
    let (ox, oy) = match clip {
        Some(c) => (
            0.5 * (c.x0.f64() + c.x1.f64()),
            0.5 * (c.y0.f64() + c.y1.f64()),
        ),
        None if !disks.is_empty() => {
            let n = disks.len() as f64;
            (
                disks.iter().map(|d| d.cx.f64()).sum::<f64>() / n,
                disks.iter().map(|d| d.cy.f64()).sum::<f64>() / n,
            )
        }
        None => (0.0, 0.0),
    };
    let rect = clip.map(|c| {
        (
            c.x0.f64() - ox,
            c.y0.f64() - oy,
            c.x1.f64() - ox,
            c.y1.f64() - oy,
        )
    });
    let mut ds: Vec<(f64, f64, f64)> = Vec::with_capacity(disks.len());
    for d in disks {
        let (cx, cy, r) = (d.cx.f64() - ox, d.cy.f64() - oy, d.r.f64());
        if r <= 0.0 {
            continue;
        }
        if let Some((x0, y0, x1, y1)) = rect {
            let dx = (x0 - cx).max(cx - x1).max(0.0);
            let dy = (y0 - cy).max(cy - y1).max(0.0);
            if dx * dx + dy * dy >= r * r {
                continue;
            }
        }
        if ds.iter().any(|&(a, b, c)| a == cx && b == cy && c == r) {
            continue;
        }
        ds.push((cx, cy, r));
    }
    if let Some((x0, y0, x1, y1)) = rect {
        if x1 <= x0 || y1 <= y0 {
            return S::zero();
        }
    }

    let mut area = 0.0;
    let mut excluded: Vec<(f64, f64)> = Vec::new();
    for (i, &(cx, cy, r)) in ds.iter().enumerate() {
        excluded.clear();
        let mut hidden = false;
        for (j, &(qx, qy, q)) in ds.iter().enumerate() {
            if i == j {
                continue;
            }
            let (dx, dy) = (qx - cx, qy - cy);
            let t = (dx * dx + dy * dy).sqrt();
            if t >= r + q {
                continue;
            }
            if t + r <= q {
                hidden = true;
                break;
            }
            if t + q <= r {
                continue;
            }
            let alpha = dy.atan2(dx);
            let c = ((r * r + t * t - q * q) / (2.0 * r * t)).clamp(-1.0, 1.0);
            let beta = c.acos();
            push_arc(&mut excluded, alpha - beta, alpha + beta);
        }
        if hidden {
            continue;
        }
        if let Some((x0, y0, x1, y1)) = rect {
            let sides = [
                (std::f64::consts::PI, cx - x0),
                (0.0, x1 - cx),
                (-std::f64::consts::FRAC_PI_2, cy - y0),
                (std::f64::consts::FRAC_PI_2, y1 - cy),
            ];
            if sides
                .iter()
                .any(|&(phi, s)| beyond_line(&mut excluded, phi, s, r))
            {
                continue;
            }
        }
        let merged = merge_intervals(std::mem::take(&mut excluded));
        let mut prev = 0.0;
        let mut arc = |a: f64, b: f64| {
            if b > a {
                area += 0.5
                    * (r * r * (b - a) + r * (cx * (b.sin() - a.sin()) - cy * (b.cos() - a.cos())));
            }
        };
        for &(a, b) in &merged {
            arc(prev, a);
            prev = prev.max(b);
        }
        arc(prev, TAU);
        excluded = merged;
    }

    if let Some((x0, y0, x1, y1)) = rect {
        // Edge pieces inside the union, traversed counter-clockwise.
        let chords = |horizontal: bool, level: f64, lo: f64, hi: f64| -> Vec<(f64, f64)> {
            let iv = ds
                .iter()
                .filter_map(|&(cx, cy, r)| {
                    let (c_along, c_across) = if horizontal { (cx, cy) } else { (cy, cx) };
                    let h = level - c_across;
                    (h.abs() < TANGENT * r).then(|| {
                        let half = (r * r - h * h).sqrt();
                        ((c_along - half).max(lo), (c_along + half).min(hi))
                    })
                })
                .collect();
            merge_intervals(iv)
        };
        for (a, b) in chords(true, y0, x0, x1) {
            area += 0.5 * y0 * (a - b);
        }
        for (a, b) in chords(false, x1, y0, y1) {
            area += 0.5 * x1 * (b - a);
        }
        for (a, b) in chords(true, y1, x0, x1) {
            area += 0.5 * y1 * (b - a);
        }
        for (a, b) in chords(false, x0, y0, y1) {
            area += 0.5 * x0 * (a - b);
        }
    }
    S::of(area.max(0.0))
}
