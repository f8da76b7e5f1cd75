//! Simplex splines evaluated by the degree-lowering recurrence.
//!
//! `M(x | X)` for a knot set `X` of `k + d + 1` configuration indices is
//! `d! / det⁺(X)` on the simplex `ch(a_X)` when `k = 0`, and for `k ≥ 1`
//!
//! ```text
//! M(x | X) = (k + d) / k · Σ_{b ∈ B} λ_b(x) M(x | X ∖ b)
//! ```
//!
//! for any affine basis `B ⊆ X`, where `λ(x)` are the barycentric
//! coordinates of `x` with respect to `B`. Knot sets of affine rank below
//! `d + 1` give the zero function.
//!
//! Points on simplex boundaries are assigned by a fixed infinitesimal shift
//! `x + ε e_1 + … + ε^d e_d`, so the degree-0 indicators of a triangulation
//! sum to one everywhere inside it and every spline is evaluated as its
//! limit along that direction.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{det_plus, det_sub, locate_perturbed, PointConfig, Replacement};
use crate::linalg::float_solve;
use crate::polar::{blossom, Polynomial};
use crate::scalar::{factorial, to_reals, Rational, Real};
use crate::tiling::ZonotopalTiling;

/// A query point held both exactly (for location decisions) and as floats
/// (for barycentric weights).
#[derive(Clone, Debug, PartialEq)]
pub struct Query<T> {
    pub exact: Vec<Rational>,
    pub real: Vec<T>,
}

impl<T: Real> Query<T> {
    pub fn new(exact: Vec<Rational>) -> Self {
        let real = to_reals(&exact);
        Self { exact, real }
    }

    pub fn dim(&self) -> usize {
        self.exact.len()
    }
}

/// Result of one spline evaluation. `on_boundary` is set when some degree-0
/// leaf had `x` on the boundary of its simplex, so the value is a one-sided
/// limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub on_boundary: bool,
}

/// Evaluates simplex splines over one configuration.
#[derive(Clone, Debug)]
pub struct SplineEvaluator<'a, T> {
    config: &'a PointConfig,
    points: Vec<Vec<T>>,
}

impl<'a, T: Real> SplineEvaluator<'a, T> {
    pub fn new(config: &'a PointConfig) -> Self {
        let points = (0..config.len()).map(|i| config.real_point(i)).collect();
        Self { config, points }
    }

    pub fn config(&self) -> &PointConfig {
        self.config
    }

    fn check_point(&self, x: &Query<T>) -> Result<()> {
        if x.dim() != self.config.dim() {
            return Err(Error::PointDimension {
                expected: self.config.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    fn check_knots(&self, knots: &[usize]) -> Result<()> {
        if let Some(&i) = knots.iter().find(|&&i| i >= self.config.len()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.config.len(),
            });
        }
        if knots.len() < self.config.dim() + 1 {
            return Err(Error::WrongCardinality {
                expected: self.config.dim() + 1,
                found: knots.len(),
            });
        }
        Ok(())
    }

    /// `M(x | knots)`.
    pub fn eval(&self, knots: &[usize], x: &Query<T>) -> Result<T> {
        Ok(self.eval_with_basis(knots, x, None)?.value)
    }

    /// `M(x | knots)`, optionally forcing the basis used at the top level of
    /// the recurrence.
    pub fn eval_with_basis(
        &self,
        knots: &[usize],
        x: &Query<T>,
        basis: Option<&[usize]>,
    ) -> Result<Evaluation<T>> {
        self.check_point(x)?;
        self.check_knots(knots)?;
        let mut call = Call::new(self, x);
        let key = sorted(knots);
        let value = match basis {
            Some(b) => {
                let b = sorted(b);
                if let Some(&i) = b.iter().find(|i| key.binary_search(i).is_err()) {
                    return Err(Error::NotInBasis {
                        index: i,
                        basis: key,
                    });
                }
                let dp = det_plus(self.config, &b)?;
                if dp.is_degenerate() {
                    return Err(Error::NotABasis(b));
                }
                call.recurse_with(&key, &b)
            }
            None => call.value(&key),
        };
        Ok(Evaluation {
            value,
            on_boundary: call.on_boundary,
        })
    }

    /// Values of several splines at one point, sharing the sub-spline memo.
    pub fn eval_many(&self, knot_sets: &[Vec<usize>], x: &Query<T>) -> Result<Vec<T>> {
        self.check_point(x)?;
        for k in knot_sets {
            self.check_knots(k)?;
        }
        let mut call = Call::new(self, x);
        Ok(knot_sets.iter().map(|k| call.value(&sorted(k))).collect())
    }

    /// Both sides of the knot insertion identity
    /// `det⁺(B) M(x | X∖c) = Σ_{b ∈ B} detˢ(B; b→c) M(x | X∖b)`.
    pub fn knot_insertion(
        &self,
        knots: &[usize],
        basis: &[usize],
        c: usize,
        x: &Query<T>,
    ) -> Result<(T, T)> {
        self.check_point(x)?;
        if basis.contains(&c) {
            return Err(Error::InBasis {
                index: c,
                basis: basis.to_vec(),
            });
        }
        let key = sorted(knots);
        for &i in basis.iter().chain([&c]) {
            if key.binary_search(&i).is_err() {
                return Err(Error::NotInBasis {
                    index: i,
                    basis: key.clone(),
                });
            }
        }
        let dp = det_plus(self.config, basis)?;
        if dp.is_degenerate() {
            return Ok((T::zero(), T::zero()));
        }
        let mut call = Call::new(self, x);
        let lhs = T::from_rational(&dp.value) * call.value(&without(&key, c));
        let mut rhs = T::zero();
        for &b in &dp.ordered {
            let coef = det_sub(self.config, &dp.ordered, b, Replacement::Index(c))?;
            if coef.is_zero() {
                continue;
            }
            rhs = rhs + T::from_rational(&coef) * call.value(&without(&key, b));
        }
        Ok((lhs, rhs))
    }

    /// Barycentric coordinates of the float point `x` in the positively
    /// ordered basis, in that order.
    pub fn barycentric(&self, ordered: &[usize], x: &[T]) -> Option<Vec<T>> {
        let d = self.config.dim();
        let m: Vec<Vec<T>> = (0..=d)
            .map(|r| {
                ordered
                    .iter()
                    .map(|&b| if r < d { self.points[b][r] } else { T::one() })
                    .collect()
            })
            .collect();
        let mut rhs = x.to_vec();
        rhs.push(T::one());
        float_solve(m, rhs)
    }

    /// Affine basis inside `knots` chosen by greedy pivoting on the lifted
    /// vectors `(a_i, 1)`: each step takes the vector with the largest
    /// component orthogonal to those already chosen. Falls back to an
    /// exhaustive exact search if rounding picks a degenerate set; `None`
    /// when the knots do not span.
    pub fn pick_basis(&self, knots: &[usize]) -> Option<Vec<usize>> {
        let d = self.config.dim();
        let mut residual: Vec<(usize, Vec<T>)> = knots
            .iter()
            .map(|&i| {
                let mut v = self.points[i].clone();
                v.push(T::one());
                (i, v)
            })
            .collect();
        let mut chosen = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            let (pos, norm) = residual
                .iter()
                .enumerate()
                .map(|(p, (_, v))| (p, v.iter().fold(T::zero(), |a, &c| a + c * c)))
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite coordinates"))?;
            if norm <= T::zero() {
                break;
            }
            let (idx, pivot) = residual.swap_remove(pos);
            let scale = norm.sqrt();
            let unit: Vec<T> = pivot.iter().map(|&c| c / scale).collect();
            for (_, v) in residual.iter_mut() {
                let dot = v.iter().zip(&unit).fold(T::zero(), |a, (&p, &q)| a + p * q);
                for (c, &u) in v.iter_mut().zip(&unit) {
                    *c = *c - dot * u;
                }
            }
            chosen.push(idx);
        }
        if chosen.len() == d + 1 {
            chosen.sort_unstable();
            if !det_plus(self.config, &chosen).ok()?.is_degenerate() {
                return Some(chosen);
            }
        }
        knots
            .iter()
            .copied()
            .combinations(d + 1)
            .find(|b| !det_plus(self.config, b).map_or(true, |dp| dp.is_degenerate()))
    }
}

/// `k!/(k+d)! · Σ_{(I,B) ∈ P^(k)} Q(a_I) det⁺(B) M(x | I ⊔ B)` with `Q` the
/// polar form of `poly` of arity `k`. Equals `poly(x)` on `ch_k(A)` when
/// the degree of `poly` is at most `k`.
pub fn reproduce<T: Real>(
    ev: &SplineEvaluator<'_, T>,
    tiling: &ZonotopalTiling,
    k: usize,
    poly: &Polynomial<T>,
    x: &Query<T>,
) -> Result<T> {
    if k > tiling.built_order() {
        return Err(Error::MissingOrder {
            requested: k,
            built: tiling.built_order(),
        });
    }
    let polar = blossom(poly, k)?;
    let config = ev.config();
    let d = config.dim();
    let mut knot_sets = Vec::new();
    let mut weights = Vec::new();
    for (_, tile) in tiling.order_tiles(k) {
        let knots = tile.knots();
        if !in_bounding_box(config, &knots, &x.exact) {
            continue;
        }
        let args: Vec<&[T]> = tile
            .shift()
            .iter()
            .map(|&i| ev.points[i].as_slice())
            .collect();
        weights.push(polar.eval(&args)? * T::from_rational(&tile.volume(config)));
        knot_sets.push(knots);
    }
    let values = ev.eval_many(&knot_sets, x)?;
    let sum = weights
        .iter()
        .zip(&values)
        .fold(T::zero(), |acc, (&w, &m)| acc + w * m);
    let scale = (k + 1..=k + d).fold(T::one(), |a, i| a * T::from_usize_lossy(i));
    Ok(sum / scale)
}

/// Exact test of `x` against the bounding box of the indexed points.
pub fn in_bounding_box(config: &PointConfig, knots: &[usize], x: &[Rational]) -> bool {
    (0..config.dim()).all(|j| {
        let mut coords = knots.iter().map(|&i| &config.point(i)[j]);
        let first = coords.next().expect("non-empty knot set");
        let (lo, hi) = coords.fold((first, first), |(lo, hi), c| (lo.min(c), hi.max(c)));
        lo <= &x[j] && &x[j] <= hi
    })
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn without(v: &[usize], i: usize) -> Vec<usize> {
    v.iter().copied().filter(|&j| j != i).collect()
}

/// State of one evaluation: memoized sub-spline values at a fixed point.
struct Call<'e, 'a, T> {
    ev: &'e SplineEvaluator<'a, T>,
    x: &'e Query<T>,
    memo: HashMap<Vec<usize>, T>,
    on_boundary: bool,
}

impl<'e, 'a, T: Real> Call<'e, 'a, T> {
    fn new(ev: &'e SplineEvaluator<'a, T>, x: &'e Query<T>) -> Self {
        Self {
            ev,
            x,
            memo: HashMap::new(),
            on_boundary: false,
        }
    }

    fn value(&mut self, knots: &[usize]) -> T {
        if let Some(&v) = self.memo.get(knots) {
            return v;
        }
        let v = match self.ev.pick_basis(knots) {
            None => T::zero(),
            Some(b) => self.recurse_with(knots, &b),
        };
        self.memo.insert(knots.to_vec(), v);
        v
    }

    fn recurse_with(&mut self, knots: &[usize], basis: &[usize]) -> T {
        let d = self.ev.config.dim();
        let dp = det_plus(self.ev.config, basis).expect("basis of size d + 1");
        if knots.len() == d + 1 {
            let (inside, boundary) = locate_perturbed(self.ev.config, &dp.ordered, &self.x.exact);
            self.on_boundary |= boundary;
            if !inside {
                return T::zero();
            }
            let scale = Rational::from_integer(factorial(d).into()) / &dp.value;
            return T::from_rational(&scale);
        }
        let Some(lambda) = self.ev.barycentric(&dp.ordered, &self.x.real) else {
            return T::zero();
        };
        let k = knots.len() - d - 1;
        let mut acc = T::zero();
        for (&b, &l) in dp.ordered.iter().zip(&lambda) {
            let sub = without(knots, b);
            acc = acc + l * self.value(&sub);
        }
        acc * T::from_usize_lossy(k + d) / T::from_usize_lossy(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, rational_from_i64 as q};

    fn line(xs: &[i64]) -> PointConfig {
        let pts: Vec<Vec<i64>> = xs.iter().map(|&x| vec![x]).collect();
        let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
        PointConfig::from_integers(1, &refs).unwrap()
    }

    fn at(s: &str) -> Query<f64> {
        Query::new(vec![parse_rational(s).unwrap()])
    }

    #[test]
    fn degree_zero_indicator() {
        let c = line(&[0, 1, 2]);
        let ev = SplineEvaluator::<f64>::new(&c);
        assert_eq!(ev.eval(&[0, 1], &at("0.5")).unwrap(), 1.0);
        assert_eq!(ev.eval(&[0, 2], &at("0.5")).unwrap(), 0.5);
        assert_eq!(ev.eval(&[0, 1], &at("1.5")).unwrap(), 0.0);
        // Shared endpoint: the right-hand interval wins.
        let left = ev.eval_with_basis(&[0, 1], &at("1"), None).unwrap();
        let right = ev.eval_with_basis(&[1, 2], &at("1"), None).unwrap();
        assert_eq!((left.value, right.value), (0.0, 1.0));
        assert!(left.on_boundary && right.on_boundary);
    }

    #[test]
    fn hat_function() {
        let c = line(&[0, 1, 2]);
        let ev = SplineEvaluator::<f64>::new(&c);
        assert!((ev.eval(&[0, 1, 2], &at("1")).unwrap() - 1.0).abs() < 1e-15);
        assert!((ev.eval(&[0, 1, 2], &at("0.5")).unwrap() - 0.5).abs() < 1e-15);
        assert!((ev.eval(&[0, 1, 2], &at("1.5")).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(ev.eval(&[0, 1, 2], &at("3")).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_knots_vanish() {
        let c = line(&[0, 0, 0, 1]);
        let ev = SplineEvaluator::<f64>::new(&c);
        assert_eq!(ev.eval(&[0, 1, 2], &at("0")).unwrap(), 0.0);
        let p =
            PointConfig::from_integers(2, &[&[0, 0], &[1, 1], &[2, 2], &[3, 3], &[0, 1]]).unwrap();
        let ev = SplineEvaluator::<f64>::new(&p);
        let x = Query::new(vec![q(1), q(1)]);
        assert_eq!(ev.eval(&[0, 1, 2, 3], &x).unwrap(), 0.0);
    }

    #[test]
    fn basis_choice_does_not_matter() {
        let c = line(&[0, 1, 3, 4]);
        let ev = SplineEvaluator::<f64>::new(&c);
        let x = at("2.2");
        let auto = ev.eval(&[0, 1, 2, 3], &x).unwrap();
        for b in [[0, 1], [0, 3], [1, 2], [2, 3]] {
            let v = ev
                .eval_with_basis(&[0, 1, 2, 3], &x, Some(&b))
                .unwrap()
                .value;
            assert!((v - auto).abs() <= 1e-12 * auto.abs().max(1.0));
        }
    }

    #[test]
    fn knot_insertion_small() {
        let c = line(&[0, 1, 2]);
        let ev = SplineEvaluator::<f64>::new(&c);
        let (l, r) = ev
            .knot_insertion(&[0, 1, 2], &[0, 2], 1, &at("0.5"))
            .unwrap();
        assert!((l - r).abs() < 1e-12);
        let (l, r) = ev.knot_insertion(&[0, 1, 2], &[0, 2], 1, &at("7")).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        assert!(ev.knot_insertion(&[0, 1, 2], &[0, 2], 0, &at("1")).is_err());
    }

    #[test]
    fn reproduces_constant_on_three_points() {
        use crate::construction::brute_force_regular_tiling;
        use crate::geometry::HeightFunction;
        let c = line(&[0, 1, 2]);
        let t = brute_force_regular_tiling(&c, &HeightFunction::squared_norm(&c)).unwrap();
        let ev = SplineEvaluator::<f64>::new(&c);
        let one = Polynomial::parse("1", 1).unwrap();
        assert!((reproduce(&ev, &t, 1, &one, &at("1")).unwrap() - 1.0).abs() < 1e-15);
        for s in ["0.25", "1.5", "1.9"] {
            assert!((reproduce(&ev, &t, 0, &one, &at(s)).unwrap() - 1.0).abs() < 1e-15);
        }
        let sq = Polynomial::parse("x0^2", 1).unwrap();
        assert!(reproduce(&ev, &t, 1, &sq, &at("1")).is_err());
    }

    #[test]
    fn single_precision_works() {
        let c = line(&[0, 1, 2]);
        let ev = SplineEvaluator::<f32>::new(&c);
        let v = ev.eval(&[0, 1, 2], &Query::new(vec![q(1)])).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }
}
