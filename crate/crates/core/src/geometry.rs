//! Exact geometry over point configurations: orientation determinants,
//! lifted (weighted Delaunay) predicates, height-function genericity and
//! convex-hull membership.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{bareiss_det, det_exact, integer_row, rank, solve_columns, Sign};
use crate::scalar::{Rational, Real};

/// Retry budget used by [`random_generic_height`].
pub const DEFAULT_HEIGHT_RETRIES: usize = 64;

/// `n` points in `R^d` with exact coordinates. Repeated points and affinely
/// dependent subsets are allowed, but the points must affinely span `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    dim: usize,
    points: Vec<Vec<Rational>>,
    // Projective lifts (a_i, 1) scaled to integers; only signs are read.
    int_rows: Vec<Vec<BigInt>>,
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        if points.len() < dim + 1 {
            return Err(Error::TooFewPoints {
                n: points.len(),
                dim,
            });
        }
        let rows: Vec<Vec<Rational>> = points.iter().map(|p| projective(p)).collect();
        if rank(&rows) < dim + 1 {
            return Err(Error::NotSpanning { dim });
        }
        let int_rows = rows.iter().map(|r| integer_row(r)).collect();
        Ok(Self {
            dim,
            points,
            int_rows,
        })
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_integers(dim: usize, points: &[&[i64]]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&v| Rational::from_integer(v.into()))
                    .collect()
            })
            .collect();
        Self::new(dim, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Rational] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    /// Highest order a tile of this configuration can have, `n - d - 1`.
    pub fn max_order(&self) -> usize {
        self.len() - self.dim - 1
    }

    pub fn real_point<T: Real>(&self, i: usize) -> Vec<T> {
        self.points[i].iter().map(T::from_rational).collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.len(),
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn int_row(&self, i: usize) -> &[BigInt] {
        &self.int_rows[i]
    }
}

pub(crate) fn projective(p: &[Rational]) -> Vec<Rational> {
    let mut row = p.to_vec();
    row.push(Rational::one());
    row
}

/// One height per point index; repeated points may carry distinct heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    values: Vec<Rational>,
}

impl HeightFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn for_config(config: &PointConfig, values: Vec<Rational>) -> Result<Self> {
        if values.len() != config.len() {
            return Err(Error::HeightLength {
                expected: config.len(),
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    /// The paraboloid lift `|a|^2`, which yields the classical Delaunay
    /// triangulation for points in general position.
    pub fn squared_norm(config: &PointConfig) -> Self {
        let values = config
            .points()
            .iter()
            .map(|p| p.iter().map(|c| c * c).fold(Rational::zero(), |a, b| a + b))
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }
}

/// A basis ordered so that its orientation determinant is positive, or a
/// degenerate index set with value zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetPlus {
    pub ordered: Vec<usize>,
    pub value: Rational,
}

impl DetPlus {
    pub fn is_degenerate(&self) -> bool {
        self.value.is_zero()
    }
}

/// Row ordering of `basis` making `det((a_b, 1))` positive, together with
/// that determinant. A zero value flags an affinely dependent set.
pub fn det_plus(config: &PointConfig, basis: &[usize]) -> Result<DetPlus> {
    let d = config.dim();
    if basis.len() != d + 1 {
        return Err(Error::WrongCardinality {
            expected: d + 1,
            found: basis.len(),
        });
    }
    for &b in basis {
        config.check_index(b)?;
    }
    let rows = basis.iter().map(|&b| projective(config.point(b))).collect();
    let value = det_exact(rows);
    let mut ordered = basis.to_vec();
    if value.is_negative() {
        ordered.swap(0, 1);
        return Ok(DetPlus {
            ordered,
            value: -value,
        });
    }
    Ok(DetPlus { ordered, value })
}

/// What replaces a row in [`det_sub`].
#[derive(Clone, Copy, Debug)]
pub enum Replacement<'a> {
    Index(usize),
    Point(&'a [Rational]),
}

/// Determinant of the ordered basis with the row of `j` replaced by another
/// configuration point or by an arbitrary point. The sign is meaningful.
pub fn det_sub(
    config: &PointConfig,
    ordered: &[usize],
    j: usize,
    replacement: Replacement<'_>,
) -> Result<Rational> {
    let pos = ordered
        .iter()
        .position(|&b| b == j)
        .ok_or_else(|| Error::NotInBasis {
            index: j,
            basis: ordered.to_vec(),
        })?;
    let replaced = match replacement {
        Replacement::Index(k) => {
            config.check_index(k)?;
            projective(config.point(k))
        }
        Replacement::Point(x) => {
            if x.len() != config.dim() {
                return Err(Error::PointDimension {
                    expected: config.dim(),
                    found: x.len(),
                });
            }
            projective(x)
        }
    };
    let rows = ordered
        .iter()
        .enumerate()
        .map(|(r, &b)| {
            if r == pos {
                replaced.clone()
            } else {
                projective(config.point(b))
            }
        })
        .collect();
    Ok(det_exact(rows))
}

fn lifted_int_row(config: &PointConfig, h: &HeightFunction, i: usize) -> Vec<BigInt> {
    let mut row = config.point(i).to_vec();
    row.push(h.get(i).clone());
    row.push(Rational::one());
    integer_row(&row)
}

/// Exact sign of `det((a_b, h_b, 1)_{b ∈ B}, (a_i, h_i, 1))` with the rows of
/// `B` in the given order.
pub fn lifted_det_sign(
    config: &PointConfig,
    h: &HeightFunction,
    ordered: &[usize],
    i: usize,
) -> Sign {
    let rows = ordered
        .iter()
        .chain(std::iter::once(&i))
        .map(|&b| lifted_int_row(config, h, b))
        .collect();
    Sign::of(&bareiss_det(rows))
}

/// Precomputed integer rows of the lifted cloud, for callers issuing many
/// lifted predicates against the same height function.
#[derive(Clone, Debug)]
pub struct LiftedCloud {
    rows: Vec<Vec<BigInt>>,
}

impl LiftedCloud {
    pub fn new(config: &PointConfig, h: &HeightFunction) -> Self {
        let rows = (0..config.len())
            .map(|i| lifted_int_row(config, h, i))
            .collect();
        Self { rows }
    }

    /// Same value as [`lifted_det_sign`] for `ordered ++ [i]`; any number of
    /// trailing indices may be passed as long as the total is `d + 2`.
    pub fn sign(&self, indices: impl IntoIterator<Item = usize>) -> Sign {
        let rows = indices.into_iter().map(|i| self.rows[i].clone()).collect();
        Sign::of(&bareiss_det(rows))
    }
}

/// First `(d+2)`-subset of the lifted cloud that is affinely dependent
/// without lying on a vertical hyperplane, if any.
pub fn find_nongeneric_subset(config: &PointConfig, h: &HeightFunction) -> Option<Vec<usize>> {
    if h.len() != config.len() {
        return Some(Vec::new());
    }
    let d = config.dim();
    let cloud = LiftedCloud::new(config, h);
    (0..config.len()).combinations(d + 2).find(|subset| {
        if cloud.sign(subset.iter().copied()) != Sign::Zero {
            return false;
        }
        // Vertical iff the projected points lie on a common hyperplane of R^d.
        let projected: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&i| projective(config.point(i)))
            .collect();
        rank(&projected) > d
    })
}

pub fn validate_generic_height(config: &PointConfig, h: &HeightFunction) -> bool {
    find_nongeneric_subset(config, h).is_none()
}

/// Heights with numerators drawn from `[1, 2^31)` over the denominator
/// `2^16`, redrawn until generic. Deterministic in `seed`.
pub fn random_generic_height(config: &PointConfig, seed: u64) -> Result<HeightFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_generic_height_with(config, &mut rng, DEFAULT_HEIGHT_RETRIES)
}

pub fn random_generic_height_with<R: Rng + ?Sized>(
    config: &PointConfig,
    rng: &mut R,
    budget: usize,
) -> Result<HeightFunction> {
    let denom = BigInt::from(1u64 << 16);
    for _ in 0..budget {
        let values = (0..config.len())
            .map(|_| {
                let numer: u64 = rng.random_range(1..(1u64 << 31));
                Rational::new(BigInt::from(numer), denom.clone())
            })
            .collect();
        let h = HeightFunction::new(values);
        if validate_generic_height(config, &h) {
            return Ok(h);
        }
    }
    Err(Error::HeightRetriesExhausted { attempts: budget })
}

pub fn is_affine_basis(config: &PointConfig, set: &[usize]) -> Result<bool> {
    Ok(!det_plus(config, set)?.is_degenerate())
}

/// All sorted `(d+1)`-subsets of `ground` that are affine bases.
pub fn affine_bases(config: &PointConfig, ground: &[usize]) -> Vec<Vec<usize>> {
    let d = config.dim();
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground
        .into_iter()
        .combinations(d + 1)
        .filter(|b| {
            let rows = b.iter().map(|&i| config.int_row(i).to_vec()).collect();
            !bareiss_det(rows).is_zero()
        })
        .collect()
}

/// Rank of the projective lifts `(a_i, 1)`: affine dimension plus one.
pub fn lifted_rank(config: &PointConfig, indices: &[usize]) -> usize {
    let rows: Vec<Vec<Rational>> = indices
        .iter()
        .map(|&i| projective(config.point(i)))
        .collect();
    rank(&rows)
}

/// Sign of `det((a_c, 1)_{c ∈ C}, (a_i, 1))` for `|C| = d`.
pub fn side_of_index(config: &PointConfig, cell: &[usize], i: usize) -> Sign {
    let rows = cell
        .iter()
        .chain(std::iter::once(&i))
        .map(|&c| config.int_row(c).to_vec())
        .collect();
    Sign::of(&bareiss_det(rows))
}

/// Exact value of `det((a_c, 1)_{c ∈ C}, (a_i, 1))`.
pub fn side_value(config: &PointConfig, cell: &[usize], i: usize) -> Rational {
    let rows = cell
        .iter()
        .chain(std::iter::once(&i))
        .map(|&c| projective(config.point(c)))
        .collect();
    det_exact(rows)
}

/// Sign of `det((a_c, 1)_{c ∈ C}, (x, 1))`.
pub fn side_of_point(config: &PointConfig, cell: &[usize], x: &[Rational]) -> Sign {
    let mut rows: Vec<Vec<BigInt>> = cell.iter().map(|&c| config.int_row(c).to_vec()).collect();
    rows.push(integer_row(&projective(x)));
    Sign::of(&bareiss_det(rows))
}

/// Sign of `det((a_c, 1)_{c ∈ C}, (x + ε e_1 + … + ε^d e_d, 1))` for all
/// small `ε > 0`. Nonzero whenever the cell is affinely independent.
pub fn side_of_point_perturbed(config: &PointConfig, cell: &[usize], x: &[Rational]) -> Sign {
    let s = side_of_point(config, cell, x);
    if s != Sign::Zero {
        return s;
    }
    let d = config.dim();
    let mut rows: Vec<Vec<BigInt>> = cell.iter().map(|&c| config.int_row(c).to_vec()).collect();
    for j in 0..d {
        let mut e = vec![BigInt::zero(); d + 1];
        e[j] = BigInt::one();
        rows.push(e);
        let s = Sign::of(&bareiss_det(rows.clone()));
        rows.pop();
        if s != Sign::Zero {
            return s;
        }
    }
    Sign::Zero
}

/// Where a point sits relative to a closed simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

impl Location {
    pub fn is_inside(self) -> bool {
        self != Location::Outside
    }
}

/// Location of `x` relative to the simplex of a positively ordered basis.
pub fn locate_in_simplex(config: &PointConfig, ordered: &[usize], x: &[Rational]) -> Location {
    let x_row = integer_row(&projective(x));
    let mut on_boundary = false;
    for pos in 0..ordered.len() {
        let rows = ordered
            .iter()
            .enumerate()
            .map(|(r, &b)| {
                if r == pos {
                    x_row.clone()
                } else {
                    config.int_row(b).to_vec()
                }
            })
            .collect();
        match Sign::of(&bareiss_det(rows)) {
            Sign::Negative => return Location::Outside,
            Sign::Zero => on_boundary = true,
            Sign::Positive => {}
        }
    }
    if on_boundary {
        Location::Boundary
    } else {
        Location::Interior
    }
}

/// Membership of `x + ε e_1 + ε² e_2 + … + ε^d e_d` in the simplex for all
/// small `ε > 0`, decided exactly. Every point of a triangulated region lies
/// in exactly one of its simplices under this rule. The second value reports
/// whether `x` itself lies on the boundary.
pub fn locate_perturbed(config: &PointConfig, ordered: &[usize], x: &[Rational]) -> (bool, bool) {
    let d = config.dim();
    let x_row = integer_row(&projective(x));
    let det_with = |pos: usize, row: &[BigInt]| {
        let rows = ordered
            .iter()
            .enumerate()
            .map(|(r, &b)| {
                if r == pos {
                    row.to_vec()
                } else {
                    config.int_row(b).to_vec()
                }
            })
            .collect();
        Sign::of(&bareiss_det(rows))
    };
    let mut on_boundary = false;
    for pos in 0..ordered.len() {
        let mut s = det_with(pos, &x_row);
        if s == Sign::Zero {
            on_boundary = true;
            for j in 0..d {
                let mut e = vec![BigInt::zero(); d + 1];
                e[j] = BigInt::one();
                s = det_with(pos, &e);
                if s != Sign::Zero {
                    break;
                }
            }
        }
        if s == Sign::Negative {
            return (false, on_boundary);
        }
    }
    (true, on_boundary)
}

/// Closed convex-hull membership of `x` in the hull of the indexed points,
/// decided exactly: `x` is in the hull iff it is a convex combination of an
/// affinely independent subset spanning the hull's affine dimension.
pub fn in_convex_hull(config: &PointConfig, indices: &[usize], x: &[Rational]) -> bool {
    if indices.is_empty() {
        return false;
    }
    let d = config.dim();
    let r = lifted_rank(config, indices);
    let mut distinct = indices.to_vec();
    distinct.sort_unstable();
    distinct.dedup_by(|a, b| config.point(*a) == config.point(*b));
    if r == d + 1 {
        return distinct.iter().copied().combinations(d + 1).any(|b| {
            let dp = det_plus(config, &b).expect("cardinality d + 1");
            !dp.is_degenerate() && locate_in_simplex(config, &dp.ordered, x).is_inside()
        });
    }
    let rhs = projective(x);
    distinct.iter().copied().combinations(r).any(|t| {
        let cols: Vec<Vec<Rational>> = t.iter().map(|&i| projective(config.point(i))).collect();
        if rank(&cols) < r {
            return false;
        }
        solve_columns(&cols, &rhs).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
    })
}

/// Positively ordered bases of a triangulation of the hull of `indices`,
/// built by placing the points in lexicographic order.
pub fn placing_triangulation(config: &PointConfig, indices: &[usize]) -> Vec<Vec<usize>> {
    let d = config.dim();
    let mut order = indices.to_vec();
    order.sort_by(|&a, &b| config.point(a).cmp(config.point(b)).then(a.cmp(&b)));

    let mut seed: Vec<usize> = Vec::with_capacity(d + 1);
    for &p in &order {
        let mut trial = seed.clone();
        trial.push(p);
        if lifted_rank(config, &trial) == trial.len() {
            seed = trial;
            if seed.len() == d + 1 {
                break;
            }
        }
    }
    if seed.len() < d + 1 {
        return Vec::new();
    }

    let mut simplices: Vec<Vec<usize>> = Vec::new();
    // facet (sorted) -> opposite vertices of the simplices containing it
    let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let add_simplex = |simplex: Vec<usize>,
                       simplices: &mut Vec<Vec<usize>>,
                       facets: &mut HashMap<Vec<usize>, Vec<usize>>| {
        for (k, &v) in simplex.iter().enumerate() {
            let mut f: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &u)| u)
                .collect();
            f.sort_unstable();
            facets.entry(f).or_default().push(v);
        }
        let dp = det_plus(config, &simplex).expect("cardinality d + 1");
        simplices.push(dp.ordered);
    };
    add_simplex(seed.clone(), &mut simplices, &mut facets);

    for &p in &order {
        if seed.contains(&p) {
            continue;
        }
        let visible: Vec<Vec<usize>> = facets
            .iter()
            .filter(|(_, opp)| opp.len() == 1)
            .filter(|(f, opp)| {
                let sp = side_of_index(config, f, p);
                let sv = side_of_index(config, f, opp[0]);
                sp != Sign::Zero && sp == sv.negate()
            })
            .map(|(f, _)| f.clone())
            .collect();
        for f in visible {
            let mut simplex = f.clone();
            simplex.push(p);
            add_simplex(simplex, &mut simplices, &mut facets);
        }
    }
    simplices
}

/// `d! · vol(ch(A_indices))`, computed from an independent placing
/// triangulation.
pub fn normalized_hull_volume(config: &PointConfig, indices: &[usize]) -> Rational {
    placing_triangulation(config, indices)
        .iter()
        .map(|b| det_plus(config, b).expect("cardinality d + 1").value)
        .fold(Rational::zero(), |a, b| a + b)
}

/// Halfspace-depth oracle over all hyperplanes spanned by `d` affinely
/// independent configuration points. For a generic point `x`,
/// `x ∈ ch_k(A)` iff every such hyperplane has at least `k + 1` points
/// strictly on the side of `x`.
#[derive(Clone, Debug)]
pub struct DepthOracle {
    cells: Vec<Vec<usize>>,
    sides: Vec<Vec<Sign>>,
}

impl DepthOracle {
    pub fn new(config: &PointConfig) -> Self {
        let d = config.dim();
        let n = config.len();
        let mut cells = Vec::new();
        let mut sides = Vec::new();
        for cell in (0..n).combinations(d) {
            if lifted_rank(config, &cell) < d {
                continue;
            }
            let s: Vec<Sign> = (0..n).map(|i| side_of_index(config, &cell, i)).collect();
            cells.push(cell);
            sides.push(s);
        }
        Self { cells, sides }
    }

    /// Depth of a generic point; `Err(cell)` names a hyperplane through `x`.
    pub fn depth(&self, config: &PointConfig, x: &[Rational]) -> Result<usize, Vec<usize>> {
        let mut best = usize::MAX;
        for (cell, sides) in self.cells.iter().zip(&self.sides) {
            let s = side_of_point(config, cell, x);
            if s == Sign::Zero {
                return Err(cell.clone());
            }
            let count = sides.iter().filter(|&&t| t == s).count();
            best = best.min(count);
        }
        Ok(best)
    }

    /// `Ok(())` iff `x` avoids every hyperplane spanned by configuration points.
    pub fn check_generic(&self, config: &PointConfig, x: &[Rational]) -> Result<()> {
        for cell in &self.cells {
            if side_of_point(config, cell, x) == Sign::Zero {
                return Err(Error::NonGenericPoint {
                    facet: cell.clone(),
                });
            }
        }
        Ok(())
    }

    /// Membership of a generic point in `ch_k(A)`.
    pub fn in_chk(&self, config: &PointConfig, x: &[Rational], k: usize) -> Result<bool> {
        self.depth(config, x)
            .map(|depth| depth > k)
            .map_err(|facet| Error::NonGenericPoint { facet })
    }
}
