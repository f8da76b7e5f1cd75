//! Point queries on a tiling: the orientation of the adjacency graph induced
//! by a query point, location of the order-0 simplex containing it, and the
//! traversal that finds every tile whose spline is supported on it.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{ToPrimitive, Zero};
use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::geometry::{in_convex_hull, side_of_point, side_value, LiftedCloud, Location};
use crate::linalg::Sign;
use crate::scalar::Rational;
use crate::spline::in_bounding_box;
use crate::tiling::{AdjacencyGraph, Facet, Tile, ZonotopalTiling};

/// Below this many order-0 tiles point location scans linearly.
pub const LINEAR_SCAN_LIMIT: usize = 1000;

fn free_index(tile: &Tile, cell: &[usize]) -> usize {
    *tile
        .basis()
        .iter()
        .find(|i| !cell.contains(i))
        .expect("facet cell misses one basis element")
}

/// `sign ⟨N_C, z_u − z_t⟩` for the tiles `t`, `u` sharing a facet with cell
/// `C`, where `⟨N_C, (y, 1)⟩ = det((a_c, 1)_{c ∈ C}, (y, 1))`. Uses the lifted
/// signs of the height function.
pub fn facet_step_sign_lifted(
    cloud: &LiftedCloud,
    config: &crate::geometry::PointConfig,
    t: &Tile,
    u: &Tile,
    cell: &[usize],
) -> Sign {
    let b = free_index(t, cell);
    let b2 = free_index(u, cell);
    let s_bb = cloud.sign(cell.iter().copied().chain([b, b2]));
    let s_b = crate::geometry::side_of_index(config, cell, b);
    let s_b2 = crate::geometry::side_of_index(config, cell, b2);
    // the product is sign ⟨N, z_t − z_u⟩
    s_bb.times(s_b).times(s_b2).negate()
}

/// Same quantity from the representative points
/// `z = Σ_{i ∈ I} v_i + ½ Σ_{b ∈ B} v_b` of the two tiles.
pub fn facet_step_sign_geometric(
    config: &crate::geometry::PointConfig,
    t: &Tile,
    u: &Tile,
    cell: &[usize],
) -> Sign {
    let two = Rational::from_integer(2.into());
    let mut acc = Rational::zero();
    for &i in u.shift() {
        acc += side_value(config, cell, i);
    }
    for &i in t.shift() {
        acc -= side_value(config, cell, i);
    }
    acc += side_value(config, cell, free_index(u, cell)) / &two;
    acc -= side_value(config, cell, free_index(t, cell)) / &two;
    Sign::of(&acc)
}

/// Direction of an adjacency edge under a query point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// From the first tile to the second.
    Forward,
    Backward,
}

/// Adjacency graph of a tiling together with the point-independent part of
/// the edge orientations.
#[derive(Clone, Debug)]
pub struct Orienter<'t> {
    tiling: &'t ZonotopalTiling,
    graph: AdjacencyGraph,
    /// Per edge `(a, b, C)`: `sign ⟨N_C, z_b − z_a⟩`.
    steps: Vec<(usize, usize, Facet, Sign)>,
    /// Edge indices incident to each tile.
    incident: Vec<Vec<usize>>,
}

impl<'t> Orienter<'t> {
    pub fn new(tiling: &'t ZonotopalTiling) -> Result<Self> {
        let graph = tiling.adjacency()?;
        let config = tiling.config();
        let cloud = tiling.heights().map(|h| LiftedCloud::new(config, h));
        let mut steps = Vec::with_capacity(graph.edge_count());
        let mut incident = vec![Vec::new(); tiling.len()];
        for (a, b, facet) in graph.edges() {
            let (ta, tb) = (tiling.tile(a), tiling.tile(b));
            let s = match &cloud {
                Some(cloud) => facet_step_sign_lifted(cloud, config, ta, tb, &facet.cell),
                None => facet_step_sign_geometric(config, ta, tb, &facet.cell),
            };
            incident[a].push(steps.len());
            incident[b].push(steps.len());
            steps.push((a, b, facet.clone(), s));
        }
        Ok(Self {
            tiling,
            graph,
            steps,
            incident,
        })
    }

    pub fn tiling(&self) -> &ZonotopalTiling {
        self.tiling
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        &self.graph
    }

    /// Edges as `(a, b, facet)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Facet)> {
        self.steps.iter().map(|(a, b, f, _)| (*a, *b, f))
    }

    fn direct(&self, edge: usize, x: &[Rational]) -> Result<(usize, usize)> {
        let (a, b, facet, step) = &self.steps[edge];
        let side = side_of_point(self.tiling.config(), &facet.cell, x);
        if side == Sign::Zero {
            return Err(Error::NonGenericPoint {
                facet: facet.cell.clone(),
            });
        }
        Ok(if side == *step { (*a, *b) } else { (*b, *a) })
    }

    /// Direction of the edge between tiles `t` and `u` under `x`, or `None`
    /// when they are not adjacent.
    pub fn edge_direction(&self, t: usize, u: usize, x: &[Rational]) -> Result<Option<Direction>> {
        let Some(&edge) = self.incident[t].iter().find(|&&e| {
            let (a, b, _, _) = &self.steps[e];
            (*a == t && *b == u) || (*a == u && *b == t)
        }) else {
            return Ok(None);
        };
        let (from, _) = self.direct(edge, x)?;
        Ok(Some(if from == t {
            Direction::Forward
        } else {
            Direction::Backward
        }))
    }

    /// The whole graph oriented by `x`, topologically sorted.
    pub fn orient(&self, x: &[Rational]) -> Result<OrientedGraph> {
        let mut dag = DiGraph::with_capacity(self.tiling.len(), self.steps.len());
        for id in 0..self.tiling.len() {
            dag.add_node(id);
        }
        for e in 0..self.steps.len() {
            let (from, to) = self.direct(e, x)?;
            dag.add_edge(NodeIndex::new(from), NodeIndex::new(to), ());
        }
        let order = toposort(&dag, None)
            .map_err(|cycle| Error::Cycle {
                tile: cycle.node_id().index(),
            })?
            .into_iter()
            .map(|n| n.index())
            .collect();
        Ok(OrientedGraph { dag, order })
    }

    /// Every tile of order at most `k_max` whose spline is supported on `x`,
    /// found by walking oriented edges from the order-0 tile containing `x`
    /// through supported tiles only. Sorted by tile id.
    pub fn supported_tiles(
        &self,
        locator: &PointLocator,
        x: &[Rational],
        k_max: usize,
    ) -> Result<Vec<usize>> {
        let Some(root) = locator.locate(self.tiling, x)? else {
            return Ok(Vec::new());
        };
        let config = self.tiling.config();
        let mut seen = BTreeSet::from([root.tile]);
        let mut found = vec![root.tile];
        let mut queue = VecDeque::from([root.tile]);
        while let Some(t) = queue.pop_front() {
            for &e in &self.incident[t] {
                let (from, to) = self.direct(e, x)?;
                if from != t || seen.contains(&to) {
                    continue;
                }
                let tile = self.tiling.tile(to);
                if tile.order() > k_max {
                    continue;
                }
                seen.insert(to);
                let knots = tile.knots();
                if in_bounding_box(config, &knots, x) && in_convex_hull(config, &knots, x) {
                    found.push(to);
                    queue.push_back(to);
                }
            }
        }
        found.sort_unstable();
        Ok(found)
    }
}

/// `(G, o_x)`: the adjacency graph with edges directed by a query point.
#[derive(Clone, Debug)]
pub struct OrientedGraph {
    pub dag: DiGraph<usize, ()>,
    /// Tile ids in a topological order.
    pub order: Vec<usize>,
}

impl OrientedGraph {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dag
            .edge_indices()
            .map(move |e| self.dag.edge_endpoints(e).expect("edge exists"))
            .map(|(a, b)| (self.dag[a], self.dag[b]))
    }
}

/// Result of point location: the order-0 tile containing the point, and
/// whether the point sits on its boundary (ties go to the lowest id).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub tile: usize,
    pub on_boundary: bool,
}

#[derive(Clone, Debug)]
struct BvhNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    kind: BvhKind,
}

#[derive(Clone, Debug)]
enum BvhKind {
    Leaf(Vec<usize>),
    Split(Box<BvhNode>, Box<BvhNode>),
}

/// Point location over the order-0 simplices: a linear scan for small
/// tilings, an axis-aligned bounding-volume hierarchy otherwise. Boxes are
/// rounded to floats monotonically, so they never exclude a point they
/// contain exactly; the final test is exact.
#[derive(Clone, Debug)]
pub struct PointLocator {
    tiles: Vec<usize>,
    root: Option<BvhNode>,
}

const LEAF_SIZE: usize = 8;

impl PointLocator {
    pub fn new(tiling: &ZonotopalTiling) -> Self {
        Self::with_limit(tiling, LINEAR_SCAN_LIMIT)
    }

    /// Uses the hierarchy when there are more than `limit` order-0 tiles.
    pub fn with_limit(tiling: &ZonotopalTiling, limit: usize) -> Self {
        let tiles: Vec<usize> = tiling.order_tiles(0).map(|(id, _)| id).collect();
        let root = (tiles.len() > limit).then(|| {
            let boxes: Vec<(usize, Vec<f64>, Vec<f64>)> = tiles
                .iter()
                .map(|&id| {
                    let (lo, hi) = tile_box(tiling, id);
                    (id, lo, hi)
                })
                .collect();
            build_bvh(boxes)
        });
        Self { tiles, root }
    }

    pub fn uses_hierarchy(&self) -> bool {
        self.root.is_some()
    }

    fn candidates(&self, x: &[f64]) -> Vec<usize> {
        match &self.root {
            None => self.tiles.clone(),
            Some(root) => {
                let mut out = Vec::new();
                let mut stack = vec![root];
                while let Some(node) = stack.pop() {
                    let inside = x
                        .iter()
                        .zip(node.lo.iter().zip(&node.hi))
                        .all(|(v, (l, h))| l <= v && v <= h);
                    if !inside {
                        continue;
                    }
                    match &node.kind {
                        BvhKind::Leaf(ids) => out.extend(ids),
                        BvhKind::Split(a, b) => {
                            stack.push(a);
                            stack.push(b);
                        }
                    }
                }
                out.sort_unstable();
                out
            }
        }
    }

    /// The order-0 tile whose closed simplex contains `x`; `None` outside
    /// the hull.
    pub fn locate(&self, tiling: &ZonotopalTiling, x: &[Rational]) -> Result<Option<Located>> {
        let d = tiling.config().dim();
        if x.len() != d {
            return Err(Error::PointDimension {
                expected: d,
                found: x.len(),
            });
        }
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        let mut best: Option<Located> = None;
        for id in self.candidates(&xf) {
            match tiling.tile(id).locate(tiling.config(), x) {
                Location::Outside => {}
                Location::Interior => {
                    return Ok(Some(Located {
                        tile: id,
                        on_boundary: false,
                    }))
                }
                Location::Boundary => {
                    if best.is_none_or(|b| id < b.tile) {
                        best = Some(Located {
                            tile: id,
                            on_boundary: true,
                        });
                    }
                }
            }
        }
        Ok(best)
    }
}

fn tile_box(tiling: &ZonotopalTiling, id: usize) -> (Vec<f64>, Vec<f64>) {
    let config = tiling.config();
    let d = config.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for &b in tiling.tile(id).basis() {
        for j in 0..d {
            let v = config.point(b)[j].to_f64().unwrap_or(f64::NAN);
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    (lo, hi)
}

fn build_bvh(mut items: Vec<(usize, Vec<f64>, Vec<f64>)>) -> BvhNode {
    let d = items[0].1.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for (_, l, h) in &items {
        for j in 0..d {
            lo[j] = lo[j].min(l[j]);
            hi[j] = hi[j].max(h[j]);
        }
    }
    if items.len() <= LEAF_SIZE {
        let ids = items.into_iter().map(|(id, _, _)| id).collect();
        return BvhNode {
            lo,
            hi,
            kind: BvhKind::Leaf(ids),
        };
    }
    let axis = (0..d)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .expect("positive dimension");
    items.sort_by(|a, b| (a.1[axis] + a.2[axis]).total_cmp(&(b.1[axis] + b.2[axis])));
    let right = items.split_off(items.len() / 2);
    BvhNode {
        lo,
        hi,
        kind: BvhKind::Split(Box::new(build_bvh(items)), Box::new(build_bvh(right))),
    }
}

/// Tiles of order at most `k_max` whose knot hull contains `x`, by scanning
/// every tile.
pub fn brute_force_support(tiling: &ZonotopalTiling, x: &[Rational], k_max: usize) -> Vec<usize> {
    let config = tiling.config();
    tiling
        .tiles()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.order() <= k_max && in_convex_hull(config, &t.knots(), x))
        .map(|(id, _)| id)
        .collect()
}
