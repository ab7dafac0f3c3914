//! Seeded random points and polynomials.
//!
//! Every random stream is derived from a base seed and a counter, so trials
//! that run in parallel draw the same numbers regardless of scheduling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bipoly::{BiPoly, Point2};
use crate::kernel::PointSet;

/// Default sampling radius per coordinate.
pub const SAMPLE_RADIUS: f64 = 0.98;

/// Independent generator for sub-task `index` of a run seeded with `seed`.
pub fn sub_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point of the disk `|z| ≤ radius`.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

pub fn bidisk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point2 {
    let radius = radius.min(1.0 - 1e-12);
    Point2::new(disk_point(rng, radius), disk_point(rng, radius)).expect("radius below 1")
}

/// `size` distinct uniform points of the polydisk of the given radius.
pub fn point_set<R: Rng + ?Sized>(rng: &mut R, size: usize, radius: f64) -> PointSet {
    let mut points: Vec<Point2> = Vec::with_capacity(size);
    while points.len() < size {
        let p = bidisk_point(rng, radius);
        if points.iter().all(|q| q.distance(&p) > 1e-9) {
            points.push(p);
        }
    }
    PointSet::new(points).expect("points are distinct and interior")
}

/// Random polynomial with Gaussian-integer coefficients in `[-r, r]² ` on the
/// box `{0..deg}²`, keeping each monomial with probability `density`.
pub fn gaussian_integer_poly<R: Rng + ?Sized>(rng: &mut R, deg: u32, r: i32, density: f64) -> BiPoly {
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=deg {
            if rng.random::<f64>() < density {
                let re = rng.random_range(-r..=r) as f64;
                let im = rng.random_range(-r..=r) as f64;
                terms.push((i, j, Complex64::new(re, im)));
            }
        }
    }
    BiPoly::from_terms(terms)
}

/// Random polynomial with standard-normal-ish complex coefficients on the
/// box `{0..deg}²`.
pub fn float_poly<R: Rng + ?Sized>(rng: &mut R, deg: u32) -> BiPoly {
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=deg {
            let re = rng.random::<f64>() * 2.0 - 1.0;
            let im = rng.random::<f64>() * 2.0 - 1.0;
            terms.push((i, j, Complex64::new(re, im)));
        }
    }
    BiPoly::from_terms(terms)
}
