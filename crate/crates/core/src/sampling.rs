//! Random generic query points.

use num_bigint::BigInt;
use rand::Rng;

use crate::geometry::{DepthOracle, PointConfig};
use crate::scalar::Rational;

const GRID_BITS: u32 = 24;

/// Axis-aligned bounding box of the configuration.
pub fn bounding_box(config: &PointConfig) -> (Vec<Rational>, Vec<Rational>) {
    let d = config.dim();
    let mut lo = config.point(0).to_vec();
    let mut hi = lo.clone();
    for p in config.points() {
        for j in 0..d {
            if p[j] < lo[j] {
                lo[j] = p[j].clone();
            }
            if p[j] > hi[j] {
                hi[j] = p[j].clone();
            }
        }
    }
    (lo, hi)
}

/// Uniform random point of the box on a dyadic grid of `2^24` steps per axis.
pub fn random_point_in_box<R: Rng + ?Sized>(
    rng: &mut R,
    lo: &[Rational],
    hi: &[Rational],
) -> Vec<Rational> {
    let steps = BigInt::from(1u64 << GRID_BITS);
    lo.iter()
        .zip(hi)
        .map(|(l, h)| {
            let m: u64 = rng.random_range(0..(1u64 << GRID_BITS));
            l + (h - l) * Rational::new(BigInt::from(m), steps.clone())
        })
        .collect()
}

/// Up to `count` random points of the interior of `ch_k(A)` avoiding every
/// hyperplane spanned by configuration points, by rejection from the
/// bounding box. Fewer points are returned when `max_attempts` runs out,
/// which happens when `ch_k(A)` is empty or very thin.
pub fn sample_chk<R: Rng + ?Sized>(
    config: &PointConfig,
    oracle: &DepthOracle,
    k: usize,
    count: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Vec<Vec<Rational>> {
    let (lo, hi) = bounding_box(config);
    let mut out = Vec::with_capacity(count);
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let x = random_point_in_box(rng, &lo, &hi);
        if let Ok(depth) = oracle.depth(config, &x) {
            if depth > k {
                out.push(x);
            }
        }
    }
    out
}

/// Random generic points of the bounding box, inside or outside the hull.
pub fn sample_generic<R: Rng + ?Sized>(
    config: &PointConfig,
    oracle: &DepthOracle,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<Rational>> {
    let (lo, hi) = bounding_box(config);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_point_in_box(rng, &lo, &hi);
        if oracle.check_generic(config, &x).is_ok() {
            out.push(x);
        }
    }
    out
}
