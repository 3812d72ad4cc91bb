//! Finite coverings of the unit sphere in `R^m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::norm2;

/// Refuse grids larger than this many points.
pub const MAX_POINTS: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereGrid {
    m: usize,
    resolution: f64,
    covering_radius: f64,
    points: Vec<Vec<f64>>,
}

impl SphereGrid {
    /// Grid whose points are spaced at most `resolution` apart, so that every
    /// unit vector lies within Euclidean distance `resolution / 2` of a point.
    ///
    /// * `m = 1`: the two signs, covering radius 0.
    /// * `m = 2`: `4·2^r` equally spaced angles (axes and diagonals included).
    /// * `m >= 3`: radial projection of a uniform grid on the faces of the
    ///   cube `[-1, 1]^m`. Projection onto the ball is 1-Lipschitz, so the
    ///   face grid's covering radius bounds the sphere's.
    pub fn new(m: usize, resolution: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("sphere dimension must be positive".into()));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::Precondition(format!(
                "resolution must be positive and finite, got {resolution}"
            )));
        }
        match m {
            1 => Ok(SphereGrid {
                m,
                resolution,
                covering_radius: 0.0,
                points: vec![vec![1.0], vec![-1.0]],
            }),
            2 => Self::circle(resolution),
            _ => Self::cube(m, resolution),
        }
    }

    fn circle(resolution: f64) -> Result<Self> {
        let mut n = 4usize;
        while std::f64::consts::TAU / n as f64 > resolution {
            n *= 2;
            if n > MAX_POINTS {
                return Err(Error::Precondition(format!("resolution {resolution} too fine")));
            }
        }
        let step = std::f64::consts::TAU / n as f64;
        let points = (0..n)
            .map(|i| {
                // Exact axes and diagonals.
                match (8 * i) % n {
                    0 => {
                        let octant = 8 * i / n;
                        let d = std::f64::consts::FRAC_1_SQRT_2;
                        match octant {
                            0 => vec![1.0, 0.0],
                            1 => vec![d, d],
                            2 => vec![0.0, 1.0],
                            3 => vec![-d, d],
                            4 => vec![-1.0, 0.0],
                            5 => vec![-d, -d],
                            6 => vec![0.0, -1.0],
                            _ => vec![d, -d],
                        }
                    }
                    _ => {
                        let a = step * i as f64;
                        vec![a.cos(), a.sin()]
                    }
                }
            })
            .collect();
        // Chord to the nearest grid angle is at most 2 sin(step / 4).
        let covering_radius = 2.0 * (step / 4.0).sin();
        Ok(SphereGrid {
            m: 2,
            resolution,
            covering_radius,
            points,
        })
    }

    fn cube(m: usize, resolution: f64) -> Result<Self> {
        let root = ((m - 1) as f64).sqrt();
        // Face spacing s gives face covering radius root·s/2 <= resolution/2.
        let per_axis = (2.0 * root / resolution).ceil() as usize + 1;
        let total = (per_axis as f64).powi(m as i32 - 1) * 2.0 * m as f64;
        if total > MAX_POINTS as f64 {
            return Err(Error::Precondition(format!(
                "sphere grid for m={m} at resolution {resolution} needs about {total:.0} points"
            )));
        }
        let ticks: Vec<f64> = (0..per_axis)
            .map(|i| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64)
            .collect();
        let spacing = 2.0 / (per_axis - 1) as f64;
        let mut points = Vec::new();
        let mut idx = vec![0usize; m - 1];
        for axis in 0..m {
            for sign in [1.0, -1.0] {
                idx.iter_mut().for_each(|x| *x = 0);
                loop {
                    let mut x = Vec::with_capacity(m);
                    let mut it = idx.iter();
                    let mut owned = true;
                    for c in 0..m {
                        if c == axis {
                            x.push(sign);
                        } else {
                            let t = ticks[*it.next().expect("index per free axis")];
                            // Points on a shared edge belong to the lowest axis.
                            if c < axis && t.abs() == 1.0 {
                                owned = false;
                            }
                            x.push(t);
                        }
                    }
                    if owned {
                        let n = norm2(&x);
                        points.push(x.into_iter().map(|v| v / n).collect());
                    }
                    if !advance(&mut idx, per_axis) {
                        break;
                    }
                }
            }
        }
        Ok(SphereGrid {
            m,
            resolution,
            covering_radius: root * spacing / 2.0,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Proven bound on the distance from any unit vector to its nearest
    /// grid point. Never exceeds `resolution / 2`.
    pub fn covering_radius(&self) -> f64 {
        self.covering_radius
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` (any unit vector) to the nearest grid point.
    pub fn nearest_distance(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| crate::game::dist2(p, x))
            .fold(f64::INFINITY, f64::min)
    }
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
