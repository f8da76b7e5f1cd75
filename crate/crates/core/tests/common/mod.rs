//! Independent reference computations and random inputs shared by the
//! integration tests. Nothing here calls into the geometry or spline code of
//! the library except to build its input types.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use zonotile::{PointConfig, Rational};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Determinant by the Leibniz permutation expansion.
pub fn leibniz_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    permute(&mut perm, 0, &mut |p| {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let mut term = Rational::one();
        for (r, &c) in p.iter().enumerate() {
            term *= &m[r][c];
        }
        if inversions % 2 == 1 {
            term = -term;
        }
        total += term;
    });
    total
}

fn permute(p: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == p.len() {
        f(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, f);
        p.swap(i, j);
    }
}

/// `det((a_i, 1)_{i ∈ subset})` by Leibniz.
pub fn affine_det(config: &PointConfig, subset: &[usize]) -> Rational {
    let rows: Vec<Vec<Rational>> = subset
        .iter()
        .map(|&i| {
            let mut r = config.point(i).to_vec();
            r.push(Rational::one());
            r
        })
        .collect();
    leibniz_det(&rows)
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Number of `(d+1)`-subsets with nonzero affine determinant.
pub fn count_bases(config: &PointConfig) -> usize {
    subsets(config.len(), config.dim() + 1)
        .iter()
        .filter(|s| !affine_det(config, s).is_zero())
        .count()
}

/// B-spline `N_{i,deg}(x)` on the knot vector `t` by the Cox–de Boor
/// recurrence with half-open intervals `[t_j, t_{j+1})`.
pub fn cox_de_boor(t: &[f64], i: usize, deg: usize, x: f64) -> f64 {
    if deg == 0 {
        return if t[i] <= x && x < t[i + 1] { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let left = t[i + deg] - t[i];
    if left > 0.0 {
        v += (x - t[i]) / left * cox_de_boor(t, i, deg - 1, x);
    }
    let right = t[i + deg + 1] - t[i + 1];
    if right > 0.0 {
        v += (t[i + deg + 1] - x) / right * cox_de_boor(t, i + 1, deg - 1, x);
    }
    v
}

/// The simplex spline of degree `deg` on the knots `t_i..=t_{i+deg+1}` under
/// unit-integral normalization.
pub fn normalized_bspline(t: &[f64], i: usize, deg: usize, x: f64) -> f64 {
    (deg + 1) as f64 / (t[i + deg + 1] - t[i]) * cox_de_boor(t, i, deg, x)
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

pub fn bernstein(deg: usize, j: usize, x: f64) -> f64 {
    binom(deg, j) * x.powi(j as i32) * (1.0 - x).powi((deg - j) as i32)
}

fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Convex hull of planar points (monotone chain), counter-clockwise.
pub fn hull_2d(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Vec<Rational>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Rational>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Area of the hull of planar points by the shoelace formula, or length of a
/// 1D hull.
pub fn hull_measure(config: &PointConfig) -> Rational {
    match config.dim() {
        1 => {
            let xs: Vec<&Rational> = config.points().iter().map(|p| &p[0]).collect();
            let lo = xs.iter().min().unwrap();
            let hi = xs.iter().max().unwrap();
            (*hi).clone() - (*lo).clone()
        }
        2 => {
            let h = hull_2d(config.points());
            let mut twice = Rational::zero();
            for i in 0..h.len() {
                let (a, b) = (&h[i], &h[(i + 1) % h.len()]);
                twice += &a[0] * &b[1] - &b[0] * &a[1];
            }
            twice.abs() / q(2)
        }
        d => panic!("no hull oracle for dimension {d}"),
    }
}

/// Closed hull membership in the plane (or on the line) by direct
/// half-plane tests against the monotone-chain hull.
pub fn in_hull_oracle(config: &PointConfig, subset: &[usize], x: &[Rational]) -> bool {
    let pts: Vec<Vec<Rational>> = subset.iter().map(|&i| config.point(i).to_vec()).collect();
    match config.dim() {
        1 => {
            let lo = pts.iter().map(|p| &p[0]).min().unwrap();
            let hi = pts.iter().map(|p| &p[0]).max().unwrap();
            lo <= &x[0] && &x[0] <= hi
        }
        2 => {
            let h = hull_2d(&pts);
            match h.len() {
                1 => h[0] == x,
                2 => {
                    cross(&h[0], &h[1], x).is_zero()
                        && (0..2).all(|j| {
                            let (a, b) = (&h[0][j], &h[1][j]);
                            a.min(b) <= &x[j] && &x[j] <= a.max(b)
                        })
                }
                _ => (0..h.len()).all(|i| !cross(&h[i], &h[(i + 1) % h.len()], x).is_negative()),
            }
        }
        d => panic!("no hull oracle for dimension {d}"),
    }
}

/// Random integer configuration in `[0, range)^d` with some repeated points
/// and, in the plane, some collinear triples. Retries until the points span.
pub fn random_config<R: Rng>(
    rng: &mut R,
    d: usize,
    n: usize,
    range: i64,
    degenerate: bool,
) -> PointConfig {
    loop {
        let mut pts: Vec<Vec<i64>> = Vec::with_capacity(n);
        while pts.len() < n {
            let roll = rng.random_range(0..10);
            if degenerate && roll < 2 && !pts.is_empty() {
                let p = pts[rng.random_range(0..pts.len())].clone();
                pts.push(p);
            } else if degenerate && roll < 4 && d == 2 && pts.len() >= 2 {
                // a point on the line through two earlier points
                let a = pts[rng.random_range(0..pts.len())].clone();
                let b = pts[rng.random_range(0..pts.len())].clone();
                let t = rng.random_range(-1..=2);
                pts.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            } else {
                pts.push((0..d).map(|_| rng.random_range(0..range)).collect());
            }
        }
        let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
        if let Ok(c) = PointConfig::from_integers(d, &refs) {
            return c;
        }
    }
}

/// Random dyadic point in the box `[lo, hi]^d` on a `2^20` grid.
pub fn random_point<R: Rng>(rng: &mut R, d: usize, lo: i64, hi: i64) -> Vec<Rational> {
    let steps: i64 = 1 << 20;
    (0..d)
        .map(|_| {
            let m = rng.random_range(0..=steps);
            q(lo) + q(hi - lo) * Rational::new(BigInt::from(m), BigInt::from(steps))
        })
        .collect()
}

/// Exponent vectors of all monomials of total degree at most `k` in `d`
/// variables.
pub fn monomials(d: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(d, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, k as u32, &mut Vec::new(), &mut out);
    out
}

pub fn monomial_value(e: &[u32], x: &[f64]) -> f64 {
    e.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product()
}
