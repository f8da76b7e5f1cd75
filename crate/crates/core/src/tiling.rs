//! Tiles, facets and fine zonotopal tilings.
//!
//! A tile `(I, B)` is the parallelepiped spanned by the lifted vectors
//! `(a_b, 1)`, `b ∈ B`, shifted by `Σ_{i ∈ I} (a_i, 1)`. Its order `|I|` is the
//! degree of the associated simplex spline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use petgraph::graph::{NodeIndex, UnGraph};

use crate::error::{Error, Result};
use crate::geometry::{
    det_plus, locate_in_simplex, side_of_index, HeightFunction, Location, PointConfig,
};
use crate::linalg::Sign;
use crate::scalar::Rational;

/// A tile `(I, B)`. Both index sets are stored sorted; the row ordering with
/// positive determinant is recovered from `swapped`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tile {
    shift: Vec<usize>,
    basis: Vec<usize>,
    swapped: bool,
}

impl Tile {
    /// Builds a tile, checking that `basis` is an affine basis disjoint from
    /// `shift`.
    pub fn new(config: &PointConfig, shift: Vec<usize>, basis: Vec<usize>) -> Result<Self> {
        let mut shift = shift;
        let mut basis = basis;
        shift.sort_unstable();
        shift.dedup();
        basis.sort_unstable();
        let dp = det_plus(config, &basis)?;
        if dp.is_degenerate() {
            return Err(Error::NotABasis(basis));
        }
        if let Some(&i) = shift.iter().find(|i| basis.binary_search(i).is_ok()) {
            return Err(Error::InBasis { index: i, basis });
        }
        if let Some(&i) = shift.iter().find(|&&i| i >= config.len()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: config.len(),
            });
        }
        let swapped = dp.ordered != basis;
        Ok(Self {
            shift,
            basis,
            swapped,
        })
    }

    pub fn shift(&self) -> &[usize] {
        &self.shift
    }

    /// Basis indices in increasing order.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Basis ordered so that `det((a_b, 1))` is positive.
    pub fn ordered_basis(&self) -> Vec<usize> {
        let mut b = self.basis.clone();
        if self.swapped {
            b.swap(0, 1);
        }
        b
    }

    pub fn order(&self) -> usize {
        self.shift.len()
    }

    /// The knot multiset `I ⊔ B` of the associated spline, sorted.
    pub fn knots(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.shift.iter().chain(&self.basis).copied().collect();
        k.sort_unstable();
        k
    }

    /// `det⁺(B)`, the normalized volume of the tile.
    pub fn volume(&self, config: &PointConfig) -> Rational {
        det_plus(config, &self.basis)
            .expect("tile bases have d + 1 elements")
            .value
    }

    /// Location of `x` relative to the simplex `ch(a_B)`.
    pub fn locate(&self, config: &PointConfig, x: &[Rational]) -> Location {
        locate_in_simplex(config, &self.ordered_basis(), x)
    }

    /// Canonical key `(I, B)`.
    pub fn key(&self) -> (Vec<usize>, Vec<usize>) {
        (self.shift.clone(), self.basis.clone())
    }
}

impl Ord for Tile {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.shift.len(), &self.shift, &self.basis).cmp(&(
            other.shift.len(),
            &other.shift,
            &other.basis,
        ))
    }
}

impl PartialOrd for Tile {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A facet `(J, C)` with `|C| = d`, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub shift: Vec<usize>,
    pub cell: Vec<usize>,
}

/// The `2(d+1)` facets of a tile: for every `b ∈ B`, `(I, B∖b)` and
/// `(I ⊔ b, B∖b)`.
pub fn facets_of(tile: &Tile) -> Vec<Facet> {
    let mut out = Vec::with_capacity(2 * tile.basis.len());
    for &b in &tile.basis {
        let cell: Vec<usize> = tile.basis.iter().copied().filter(|&c| c != b).collect();
        out.push(Facet {
            shift: tile.shift.clone(),
            cell: cell.clone(),
        });
        let mut up = tile.shift.clone();
        up.push(b);
        up.sort_unstable();
        out.push(Facet { shift: up, cell });
    }
    out
}

fn only_difference(a: &[usize], b: &[usize]) -> Option<usize> {
    let mut diff = a.iter().filter(|x| b.binary_search(x).is_err());
    let first = *diff.next()?;
    diff.next().is_none().then_some(first)
}

fn with(set: &[usize], extra: usize) -> Vec<usize> {
    let mut s = set.to_vec();
    s.push(extra);
    s.sort_unstable();
    s
}

/// The common facet of two tiles, if they share one.
pub fn shared_facet(t: &Tile, u: &Tile) -> Option<Facet> {
    let b = only_difference(&t.basis, &u.basis)?;
    let b2 = only_difference(&u.basis, &t.basis)?;
    let related = t.shift == u.shift
        || t.shift == with(&u.shift, b2)
        || u.shift == with(&t.shift, b)
        || with(&t.shift, b) == with(&u.shift, b2);
    if !related {
        return None;
    }
    let cell = t.basis.iter().copied().filter(|&c| c != b).collect();
    let mut shift: Vec<usize> = t.shift.iter().chain(&u.shift).copied().collect();
    shift.sort_unstable();
    shift.dedup();
    Some(Facet { shift, cell })
}

/// The element of `B` not in the facet cell.
fn missing(tile: &Tile, facet: &Facet) -> usize {
    only_difference(&tile.basis, &facet.cell).expect("facet cell is B minus one element")
}

/// Evidence that a facet lies on the boundary of the zonotope: every shift
/// point is on the closed side `orientation` of `aff(C)`, every point outside
/// `I ⊔ B` on the opposite closed side, and the free basis point strictly on
/// the side selected by whether it belongs to `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCertificate {
    pub free: usize,
    pub orientation: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetClass {
    Shared {
        other: usize,
        separated: bool,
    },
    Boundary(BoundaryCertificate),
    /// Not shared among the built tiles and not on the boundary; the missing
    /// neighbour has an order above the built range.
    BeyondBuilt,
}

/// Checks the boundary condition of a facet of `tile` directly from point
/// positions.
pub fn boundary_certificate(
    config: &PointConfig,
    ground: &[usize],
    tile: &Tile,
    facet: &Facet,
) -> Option<BoundaryCertificate> {
    let b = missing(tile, facet);
    let sb = side_of_index(config, &facet.cell, b);
    if sb == Sign::Zero {
        return None;
    }
    let orientation = if facet.shift.binary_search(&b).is_ok() {
        sb
    } else {
        sb.negate()
    };
    let ok = ground.iter().all(|&i| {
        if tile.basis.binary_search(&i).is_ok() {
            return true;
        }
        let s = side_of_index(config, &facet.cell, i).times(orientation);
        if tile.shift.binary_search(&i).is_ok() {
            s != Sign::Negative
        } else {
            s != Sign::Positive
        }
    });
    ok.then_some(BoundaryCertificate {
        free: b,
        orientation,
    })
}

/// A fine zonotopal tiling of the sub-configuration indexed by `ground`,
/// complete in the orders `0..=built_order`.
#[derive(Clone, Debug)]
pub struct ZonotopalTiling {
    config: PointConfig,
    heights: Option<HeightFunction>,
    ground: Vec<usize>,
    built_order: usize,
    tiles: Vec<Tile>,
    by_basis: HashMap<Vec<usize>, usize>,
}

impl ZonotopalTiling {
    /// Assembles a tiling; tiles are put into canonical order. Duplicate bases
    /// are rejected.
    pub fn new(
        config: PointConfig,
        ground: Vec<usize>,
        mut tiles: Vec<Tile>,
        built_order: usize,
        heights: Option<HeightFunction>,
    ) -> Result<Self> {
        tiles.sort();
        let mut by_basis = HashMap::with_capacity(tiles.len());
        for (id, t) in tiles.iter().enumerate() {
            if by_basis.insert(t.basis.clone(), id).is_some() {
                return Err(Error::Corrupt(format!(
                    "basis {:?} appears in more than one tile",
                    t.basis
                )));
            }
        }
        let mut ground = ground;
        ground.sort_unstable();
        Ok(Self {
            config,
            heights,
            ground,
            built_order,
            tiles,
            by_basis,
        })
    }

    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    /// The tiles of orders `0..=k` as a tiling built to order `k`.
    pub fn truncated(&self, k: usize) -> ZonotopalTiling {
        let tiles = self
            .tiles
            .iter()
            .filter(|t| t.order() <= k)
            .cloned()
            .collect();
        ZonotopalTiling::new(
            self.config.clone(),
            self.ground.clone(),
            tiles,
            k.min(self.built_order),
            self.heights.clone(),
        )
        .expect("subset of a valid tiling")
    }

    pub fn heights(&self) -> Option<&HeightFunction> {
        self.heights.as_ref()
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn built_order(&self) -> usize {
        self.built_order
    }

    /// Highest order any tile of the ground configuration can have.
    pub fn full_order(&self) -> usize {
        self.ground.len().saturating_sub(self.config.dim() + 1)
    }

    pub fn is_complete(&self) -> bool {
        self.built_order >= self.full_order()
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, id: usize) -> &Tile {
        &self.tiles[id]
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Canonical id of a tile, looked up by its basis.
    pub fn id_of(&self, tile: &Tile) -> Option<usize> {
        self.by_basis
            .get(&tile.basis)
            .copied()
            .filter(|&id| self.tiles[id] == *tile)
    }

    pub fn id_of_basis(&self, basis: &[usize]) -> Option<usize> {
        let mut b = basis.to_vec();
        b.sort_unstable();
        self.by_basis.get(&b).copied()
    }

    /// Tiles of order `k` with their ids (the set `P^(k)`).
    pub fn order_tiles(&self, k: usize) -> impl Iterator<Item = (usize, &Tile)> {
        self.tiles
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.order() == k)
    }

    pub fn counts_by_order(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.tiles {
            *counts.entry(t.order()).or_insert(0) += 1;
        }
        counts
    }

    /// Owners of every facet of every tile, keyed by facet.
    pub fn facet_table(&self) -> HashMap<Facet, Vec<usize>> {
        let mut table: HashMap<Facet, Vec<usize>> = HashMap::new();
        for (id, t) in self.tiles.iter().enumerate() {
            for f in facets_of(t) {
                table.entry(f).or_default().push(id);
            }
        }
        table
    }

    /// Classifies a facet of tile `owner` as shared, on the zonotope
    /// boundary, or pointing beyond the built orders.
    pub fn classify_facet(&self, owner: usize, facet: &Facet) -> Result<FacetClass> {
        let tile = &self.tiles[owner];
        if side_of_index(&self.config, &facet.cell, missing(tile, facet)) == Sign::Zero {
            return Err(Error::Corrupt(format!(
                "facet cell {:?} is not a hyperplane through the free point",
                facet.cell
            )));
        }
        let others: Vec<usize> = self
            .tiles
            .iter()
            .enumerate()
            .filter(|&(id, u)| id != owner && shared_facet(tile, u).as_ref() == Some(facet))
            .map(|(id, _)| id)
            .collect();
        let certificate = boundary_certificate(&self.config, &self.ground, tile, facet);
        match (others.as_slice(), certificate) {
            ([other], None) => {
                let u = &self.tiles[*other];
                let b = missing(tile, facet);
                let b2 = missing(u, facet);
                let sb = side_of_index(&self.config, &facet.cell, b);
                let sb2 = side_of_index(&self.config, &facet.cell, b2);
                let separated = sb.times(sb2) == Sign::Negative;
                if separated != (tile.order() == u.order()) {
                    return Err(Error::Corrupt(format!(
                        "tiles {owner} and {other} violate the separation rule on {facet:?}"
                    )));
                }
                Ok(FacetClass::Shared {
                    other: *other,
                    separated,
                })
            }
            ([], Some(cert)) => Ok(FacetClass::Boundary(cert)),
            ([], None) if facet.shift.len() > self.built_order => Ok(FacetClass::BeyondBuilt),
            _ => Err(Error::Corrupt(format!(
                "facet {facet:?} of tile {owner} is neither uniquely shared nor on the boundary"
            ))),
        }
    }

    /// The tiling induced on `ground ∖ Q`: tiles whose basis avoids `Q`, with
    /// `Q` removed from their shift sets.
    pub fn induced(&self, q: &[usize]) -> ZonotopalTiling {
        let outside = |i: &usize| !q.contains(i);
        let tiles: Vec<Tile> = self
            .tiles
            .iter()
            .filter(|t| t.basis.iter().all(outside))
            .map(|t| Tile {
                shift: t.shift.iter().copied().filter(outside).collect(),
                basis: t.basis.clone(),
                swapped: t.swapped,
            })
            .collect();
        let ground: Vec<usize> = self.ground.iter().copied().filter(outside).collect();
        let removed = self.ground.len() - ground.len();
        let full = ground.len().saturating_sub(self.config.dim() + 1);
        let built = if self.is_complete() {
            full
        } else {
            self.built_order.saturating_sub(removed).min(full)
        };
        ZonotopalTiling::new(
            self.config.clone(),
            ground,
            tiles,
            built,
            self.heights.clone(),
        )
        .expect("restriction keeps bases distinct")
    }

    /// Adjacency graph of the tiling: one edge per shared facet.
    pub fn adjacency(&self) -> Result<AdjacencyGraph> {
        let mut graph = UnGraph::with_capacity(self.tiles.len(), self.tiles.len() * 2);
        for id in 0..self.tiles.len() {
            graph.add_node(id);
        }
        let mut shared: Vec<(Facet, Vec<usize>)> = self
            .facet_table()
            .into_iter()
            .filter(|(_, owners)| owners.len() > 1)
            .collect();
        shared.sort();
        for (facet, owners) in shared {
            if owners.len() > 2 {
                return Err(Error::Corrupt(format!(
                    "facet {facet:?} is owned by tiles {owners:?}"
                )));
            }
            graph.add_edge(NodeIndex::new(owners[0]), NodeIndex::new(owners[1]), facet);
        }
        Ok(AdjacencyGraph { graph })
    }
}

/// Undirected graph on tile ids with one edge per shared facet.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    graph: UnGraph<usize, Facet>,
}

impl AdjacencyGraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edges as `(tile, tile, facet)` with the smaller id first.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Facet)> {
        self.graph.edge_indices().map(move |e| {
            let (a, b) = self.graph.edge_endpoints(e).expect("edge exists");
            let (a, b) = (a.index().min(b.index()), a.index().max(b.index()));
            (a, b, &self.graph[e])
        })
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.neighbors(NodeIndex::new(id)).map(|n| n.index())
    }

    pub fn is_connected(&self) -> bool {
        petgraph::algo::connected_components(&self.graph) <= 1
    }

    pub fn graph(&self) -> &UnGraph<usize, Facet> {
        &self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[i64]) -> PointConfig {
        let pts: Vec<Vec<i64>> = xs.iter().map(|&x| vec![x]).collect();
        let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
        PointConfig::from_integers(1, &refs).unwrap()
    }

    // Tiling of 0,1,2 under the parabolic lift, hand-derived.
    fn three() -> ZonotopalTiling {
        let c = line(&[0, 1, 2]);
        let tiles = vec![
            Tile::new(&c, vec![], vec![0, 1]).unwrap(),
            Tile::new(&c, vec![], vec![1, 2]).unwrap(),
            Tile::new(&c, vec![1], vec![0, 2]).unwrap(),
        ];
        ZonotopalTiling::new(c, vec![0, 1, 2], tiles, 1, None).unwrap()
    }

    fn facet(shift: &[usize], cell: &[usize]) -> Facet {
        Facet {
            shift: shift.to_vec(),
            cell: cell.to_vec(),
        }
    }

    #[test]
    fn facets_by_definition() {
        let c = line(&[0, 1, 2]);
        let t = Tile::new(&c, vec![], vec![0, 1]).unwrap();
        let fs = facets_of(&t);
        assert_eq!(
            fs,
            vec![
                facet(&[], &[1]),
                facet(&[0], &[1]),
                facet(&[], &[0]),
                facet(&[1], &[0])
            ]
        );
        let p = PointConfig::from_integers(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let t = Tile::new(&p, vec![3], vec![0, 1, 2]).unwrap();
        let fs = facets_of(&t);
        assert_eq!(fs.len(), 6);
        assert!(fs.contains(&facet(&[3], &[0, 1])));
        assert!(fs.contains(&facet(&[2, 3], &[0, 1])));
    }

    #[test]
    fn ordered_basis_is_positive() {
        let c = line(&[0, 1, 2]);
        let t = Tile::new(&c, vec![], vec![0, 1]).unwrap();
        let dp = det_plus(&c, &t.ordered_basis()).unwrap();
        assert_eq!(dp.ordered, t.ordered_basis());
        assert!(Tile::new(&c, vec![0], vec![0, 1]).is_err());
    }

    #[test]
    fn shared_facet_cases() {
        let t = three();
        let (a, b, c) = (t.tile(0), t.tile(1), t.tile(2));
        assert_eq!(shared_facet(a, b), Some(facet(&[], &[1])));
        assert_eq!(shared_facet(a, c), Some(facet(&[1], &[0])));
        assert_eq!(shared_facet(b, c), Some(facet(&[1], &[2])));

        let cfg = line(&[0, 1, 2, 3, 4, 5]);
        let u = Tile::new(&cfg, vec![2, 3], vec![0, 1]).unwrap();
        let v = Tile::new(&cfg, vec![4, 5], vec![0, 1]).unwrap();
        assert_eq!(shared_facet(&u, &v), None);
    }

    #[test]
    fn adjacency_of_three_tiles() {
        // The hexagon Z(V) is cut into three parallelograms meeting at v_1;
        // every pair shares an edge.
        let t = three();
        let g = t.adjacency().unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_connected());
        assert!((0..3).all(|i| g.neighbors(i).count() == 2));
    }

    #[test]
    fn single_tile_has_no_edges() {
        let c = line(&[0, 1]);
        let t = ZonotopalTiling::new(
            c.clone(),
            vec![0, 1],
            vec![Tile::new(&c, vec![], vec![0, 1]).unwrap()],
            0,
            None,
        )
        .unwrap();
        assert_eq!(t.adjacency().unwrap().edge_count(), 0);
    }

    #[test]
    fn induced_examples() {
        let t = three();
        let same = t.induced(&[]);
        assert_eq!(same.tiles(), t.tiles());
        let r = t.induced(&[1]);
        assert_eq!(r.len(), 1);
        assert_eq!(r.tile(0).shift(), &[] as &[usize]);
        assert_eq!(r.tile(0).basis(), &[0, 2]);
    }

    #[test]
    fn classify_examples() {
        let t = three();
        let id = |s: &[usize], b: &[usize]| {
            t.tiles()
                .iter()
                .position(|x| x.shift() == s && x.basis() == b)
                .unwrap()
        };
        let a = id(&[], &[0, 1]);
        let b = id(&[], &[1, 2]);
        let c = id(&[1], &[0, 2]);
        assert_eq!(
            t.classify_facet(a, &facet(&[], &[1])).unwrap(),
            FacetClass::Shared {
                other: b,
                separated: true
            }
        );
        assert!(matches!(
            t.classify_facet(c, &facet(&[0, 1], &[2])).unwrap(),
            FacetClass::Boundary(_)
        ));
        assert_eq!(
            t.classify_facet(a, &facet(&[1], &[0])).unwrap(),
            FacetClass::Shared {
                other: c,
                separated: false
            }
        );
    }
}
