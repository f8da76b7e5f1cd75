//! Construction of regular fine zonotopal tilings from a generic height
//! function: a global brute-force constructor and the incremental
//! link-region algorithm built on weighted Delaunay triangulations.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::{
    affine_bases, det_plus, find_nongeneric_subset, in_convex_hull, lifted_det_sign,
    HeightFunction, LiftedCloud, PointConfig,
};
use crate::linalg::Sign;
use crate::tiling::{Tile, ZonotopalTiling};

/// Lifted signs `sign det((a_b, h_b, 1)_{b ∈ B}, (a_i, h_i, 1))` for the
/// positively ordered bases of a configuration, filled one basis at a time.
struct SignTable {
    cloud: LiftedCloud,
    n: usize,
    bases: Vec<Vec<usize>>,
    ordered: Vec<Vec<usize>>,
    rows: Vec<Option<Vec<Sign>>>,
}

impl SignTable {
    fn new(config: &PointConfig, h: &HeightFunction) -> Self {
        let n = config.len();
        let bases = affine_bases(config, &(0..n).collect::<Vec<_>>());
        let ordered = bases
            .iter()
            .map(|b| det_plus(config, b).expect("basis size").ordered)
            .collect();
        let rows = vec![None; bases.len()];
        Self {
            cloud: LiftedCloud::new(config, h),
            n,
            bases,
            ordered,
            rows,
        }
    }

    fn row(&mut self, id: usize) -> Result<&[Sign]> {
        if self.rows[id].is_none() {
            let ordered = &self.ordered[id];
            let mut row = Vec::with_capacity(self.n);
            for i in 0..self.n {
                if ordered.contains(&i) {
                    row.push(Sign::Zero);
                    continue;
                }
                let s = self.cloud.sign(ordered.iter().copied().chain([i]));
                if s == Sign::Zero {
                    let mut subset = ordered.clone();
                    subset.push(i);
                    subset.sort_unstable();
                    return Err(Error::NonGenericHeight { subset });
                }
                row.push(s);
            }
            self.rows[id] = Some(row);
        }
        Ok(self.rows[id].as_deref().expect("filled above"))
    }
}

fn check_heights(config: &PointConfig, h: &HeightFunction) -> Result<()> {
    if h.len() != config.len() {
        return Err(Error::HeightLength {
            expected: config.len(),
            found: h.len(),
        });
    }
    Ok(())
}

/// Simplices of the link region `R(Q)`: the bases of the order-`|Q|` tiles
/// whose shift set is exactly `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkRegion {
    pub q: Vec<usize>,
    /// Positively ordered bases.
    pub simplices: Vec<Vec<usize>>,
}

impl LinkRegion {
    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Height-dependent machinery shared by the weighted Delaunay and link-region
/// queries of one construction.
pub struct Constructor<'a> {
    config: &'a PointConfig,
    table: SignTable,
}

impl<'a> Constructor<'a> {
    pub fn new(config: &'a PointConfig, h: &HeightFunction) -> Result<Self> {
        check_heights(config, h)?;
        Ok(Self {
            config,
            table: SignTable::new(config, h),
        })
    }

    pub fn config(&self) -> &PointConfig {
        self.config
    }

    /// Weighted Delaunay triangulation of the points in `active`: every basis
    /// `B ⊆ active` whose lifted facet lies below all other active lifts.
    /// Returns positively ordered bases; empty when `active` does not span.
    pub fn weighted_delaunay(&mut self, active: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut mask = vec![false; self.config.len()];
        for &i in active {
            mask[i] = true;
        }
        let mut out = Vec::new();
        for id in 0..self.table.bases.len() {
            if !self.table.bases[id].iter().all(|&b| mask[b]) {
                continue;
            }
            let row = self.table.row(id)?;
            let empty = row
                .iter()
                .enumerate()
                .all(|(i, &s)| !mask[i] || s != Sign::Positive);
            if empty {
                out.push(self.table.ordered[id].clone());
            }
        }
        Ok(out)
    }

    /// Simplices of the weighted Delaunay triangulation of `[n] ∖ Q` whose
    /// lifted facets lie below every lifted point of `Q`.
    pub fn link_region(&mut self, q: &[usize]) -> Result<LinkRegion> {
        let mut in_q = vec![false; self.config.len()];
        for &i in q {
            in_q[i] = true;
        }
        let mut simplices = Vec::new();
        for id in 0..self.table.bases.len() {
            if self.table.bases[id].iter().any(|&b| in_q[b]) {
                continue;
            }
            let row = self.table.row(id)?;
            // Check Q first: it rejects most bases after one comparison.
            if !q.iter().all(|&i| row[i] == Sign::Positive) {
                continue;
            }
            let delaunay = row
                .iter()
                .enumerate()
                .all(|(i, &s)| in_q[i] || s != Sign::Positive);
            if delaunay {
                simplices.push(self.table.ordered[id].clone());
            }
        }
        let mut q = q.to_vec();
        q.sort_unstable();
        Ok(LinkRegion { q, simplices })
    }
}

/// Weighted Delaunay triangulation of `active` under `h`.
pub fn weighted_delaunay(
    config: &PointConfig,
    active: &[usize],
    h: &HeightFunction,
) -> Result<Vec<Vec<usize>>> {
    Constructor::new(config, h)?.weighted_delaunay(active)
}

/// Progress of the incremental construction: the next order to emit, the
/// shift sets of that order still to be examined, and the tiles so far.
#[derive(Clone, Debug, Default)]
pub struct ConstructionState {
    pub order: usize,
    pub frontier: Vec<Vec<usize>>,
    pub tiles: Vec<Tile>,
}

impl ConstructionState {
    pub fn new() -> Self {
        Self {
            order: 0,
            frontier: vec![Vec::new()],
            tiles: Vec::new(),
        }
    }

    /// Emits every tile of the current order and advances the frontier to
    /// the candidate shift sets `I ⊔ {b}` of the next order.
    pub fn step(&mut self, ctor: &mut Constructor<'_>) -> Result<()> {
        let mut next: BTreeSet<Vec<usize>> = BTreeSet::new();
        for q in std::mem::take(&mut self.frontier) {
            let region = ctor.link_region(&q)?;
            for basis in region.simplices {
                for &b in &basis {
                    let mut up = q.clone();
                    up.push(b);
                    up.sort_unstable();
                    next.insert(up);
                }
                self.tiles.push(Tile::new(ctor.config(), q.clone(), basis)?);
            }
        }
        self.frontier = next.into_iter().collect();
        self.order += 1;
        Ok(())
    }
}

/// Incremental construction of the tiles of orders `0..=k_max`.
pub fn incremental_build(
    config: &PointConfig,
    h: &HeightFunction,
    k_max: usize,
) -> Result<ZonotopalTiling> {
    if k_max > config.max_order() {
        return Err(Error::OrderOutOfRange {
            k: k_max,
            max: config.max_order(),
        });
    }
    check_heights(config, h)?;
    if let Some(subset) = find_nongeneric_subset(config, h) {
        return Err(Error::NonGenericHeight { subset });
    }
    let mut ctor = Constructor::new(config, h)?;
    let mut state = ConstructionState::new();
    while state.order <= k_max && !state.frontier.is_empty() {
        state.step(&mut ctor)?;
    }
    ZonotopalTiling::new(
        config.clone(),
        (0..config.len()).collect(),
        state.tiles,
        k_max,
        Some(h.clone()),
    )
}

/// Global construction: every affine basis `B` yields the tile `(I, B)` with
/// `I` the points whose lifts lie above the lifted facet of `B`.
pub fn brute_force_regular_tiling(
    config: &PointConfig,
    h: &HeightFunction,
) -> Result<ZonotopalTiling> {
    check_heights(config, h)?;
    if let Some(subset) = find_nongeneric_subset(config, h) {
        return Err(Error::NonGenericHeight { subset });
    }
    let n = config.len();
    let mut tiles = Vec::new();
    for basis in affine_bases(config, &(0..n).collect::<Vec<_>>()) {
        let ordered = det_plus(config, &basis)?.ordered;
        let mut shift = Vec::new();
        for i in (0..n).filter(|i| !basis.contains(i)) {
            match lifted_det_sign(config, h, &ordered, i) {
                Sign::Positive => shift.push(i),
                Sign::Negative => {}
                Sign::Zero => {
                    let mut subset = basis.clone();
                    subset.push(i);
                    subset.sort_unstable();
                    return Err(Error::NonGenericHeight { subset });
                }
            }
        }
        tiles.push(Tile::new(config, shift, basis)?);
    }
    ZonotopalTiling::new(
        config.clone(),
        (0..n).collect(),
        tiles,
        config.max_order(),
        Some(h.clone()),
    )
}

/// Membership of `x` in `ch_k(A)`, the intersection of the hulls of all
/// `(n-k)`-point subconfigurations, decided exactly from the definition.
pub fn chk_membership(config: &PointConfig, k: usize, x: &[crate::Rational]) -> Result<bool> {
    if k > config.max_order() {
        return Err(Error::OrderOutOfRange {
            k,
            max: config.max_order(),
        });
    }
    let n = config.len();
    // Subsets with the same multiset of points have the same hull.
    let mut seen: HashMap<Vec<&[crate::Rational]>, bool> = HashMap::new();
    for s in (0..n).combinations(n - k) {
        let mut key: Vec<&[crate::Rational]> = s.iter().map(|&i| config.point(i)).collect();
        key.sort();
        let inside = *seen
            .entry(key)
            .or_insert_with(|| in_convex_hull(config, &s, x));
        if !inside {
            return Ok(false);
        }
    }
    Ok(true)
}
