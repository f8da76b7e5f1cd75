//! Evaluation graph: all order-`k` splines of a tiling at one point, with
//! every sub-spline computed once.
//!
//! A node is a tile `(I, B)`, viewed as the top tile of the tiling induced on
//! its knots `X = I ⊔ B`. Its value is `(k + d)/k · Σ_b λ_b M̄_b` with
//! `M̄_b = M(x | X ∖ b)`. For each `b` the facet cell `C = B ∖ b` has at most
//! two neighbors inside the induced tiling:
//!
//! * below, `(I ∖ b', C ∪ b')`, whose knots are `X ∖ b`; its value is `M̄_b`;
//! * beside, `(I ∖ b' ∪ b, C ∪ b')` with the same knots `X`; `M̄_b` follows
//!   from that tile's own sub-splines by knot insertion, and is used only
//!   when the edge points into the node under `x`. Otherwise `M̄_b = 0`.
//!
//! Neighbor shift sets come from lifted sign tests over `X`.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::geometry::{
    det_plus, det_sub, locate_perturbed, side_of_point_perturbed, HeightFunction, LiftedCloud,
    PointConfig, Replacement,
};
use crate::linalg::Sign;
use crate::query::facet_step_sign_lifted;
use crate::scalar::{factorial, Rational, Real};
use crate::spline::{in_bounding_box, Query, SplineEvaluator};
use crate::tiling::{Tile, ZonotopalTiling};

/// How a sub-spline of a node is obtained from a neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeRule {
    /// The neighbor one order below is the sub-spline.
    Recurrence,
    /// Knot insertion from the sub-splines of a same-order neighbor.
    Insertion,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Zero,
    Recurrence(usize),
    Insertion {
        node: usize,
        cell: Vec<usize>,
        /// `sign ⟨N_C, z_node − z_neighbor⟩`; the edge points into the node
        /// when the query point lies on this side of the cell.
        toward: Sign,
        /// Coefficients `detˢ(B'; β → b) / det⁺(B')` over the neighbor's
        /// ordered basis.
        coefficients: Vec<Rational>,
    },
}

#[derive(Clone, Debug)]
pub struct EvalNode {
    pub tile: Tile,
    pub ordered: Vec<usize>,
    /// One source per element of `ordered`; empty at order 0.
    pub sources: Vec<Source>,
}

#[derive(Clone, Debug)]
pub struct EvalGraph {
    order: usize,
    nodes: Vec<EvalNode>,
    index: HashMap<(Vec<usize>, Vec<usize>), usize>,
    /// `(tile id in the tiling, node)` for every order-`k` tile.
    roots: Vec<(usize, usize)>,
}

/// Shift set of the tile with basis `basis` in the tiling induced on `knots`.
fn induced_shift(
    config: &PointConfig,
    cloud: &LiftedCloud,
    knots: &[usize],
    basis: &[usize],
) -> Result<Vec<usize>> {
    let ordered = det_plus(config, basis)?.ordered;
    let mut shift = Vec::new();
    for &i in knots.iter().filter(|i| !basis.contains(i)) {
        match cloud.sign(ordered.iter().copied().chain([i])) {
            Sign::Positive => shift.push(i),
            Sign::Negative => {}
            Sign::Zero => {
                let mut subset = basis.to_vec();
                subset.push(i);
                subset.sort_unstable();
                return Err(Error::NonGenericHeight { subset });
            }
        }
    }
    Ok(shift)
}

fn minus(v: &[usize], i: usize) -> Vec<usize> {
    v.iter().copied().filter(|&j| j != i).collect()
}

fn plus(v: &[usize], i: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    if let Err(p) = out.binary_search(&i) {
        out.insert(p, i);
    }
    out
}

struct Builder<'a> {
    config: &'a PointConfig,
    cloud: LiftedCloud,
    nodes: Vec<EvalNode>,
    index: HashMap<(Vec<usize>, Vec<usize>), usize>,
    queue: VecDeque<usize>,
}

impl Builder<'_> {
    fn node(&mut self, shift: Vec<usize>, basis: Vec<usize>) -> Result<usize> {
        let key = (shift, basis);
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let tile = Tile::new(self.config, key.0.clone(), key.1.clone())?;
        let ordered = tile.ordered_basis();
        let id = self.nodes.len();
        self.nodes.push(EvalNode {
            tile,
            ordered,
            sources: Vec::new(),
        });
        self.index.insert(key, id);
        self.queue.push_back(id);
        Ok(id)
    }

    fn expand(&mut self, id: usize) -> Result<()> {
        let tile = self.nodes[id].tile.clone();
        let ordered = self.nodes[id].ordered.clone();
        let shift = tile.shift().to_vec();
        let knots = tile.knots();
        let mut sources = Vec::with_capacity(ordered.len());
        if shift.is_empty() {
            return Ok(());
        }
        for &b in &ordered {
            let cell = minus(tile.basis(), b);
            let mut below = None;
            let mut beside = None;
            for &b2 in &shift {
                let basis2 = plus(&cell, b2);
                if det_plus(self.config, &basis2)?.is_degenerate() {
                    continue;
                }
                let shift2 = induced_shift(self.config, &self.cloud, &knots, &basis2)?;
                if shift2 == minus(&shift, b2) {
                    below = Some((shift2, basis2));
                } else if shift2 == plus(&minus(&shift, b2), b) {
                    beside = Some((shift2, basis2));
                }
            }
            let source = if let Some((s, bs)) = below {
                Source::Recurrence(self.node(s, bs)?)
            } else if let Some((s, bs)) = beside {
                let other = Tile::new(self.config, s.clone(), bs.clone())?;
                let toward = facet_step_sign_lifted(&self.cloud, self.config, &other, &tile, &cell);
                let dp = det_plus(self.config, &bs)?;
                let coefficients = dp
                    .ordered
                    .iter()
                    .map(|&beta| {
                        det_sub(self.config, &dp.ordered, beta, Replacement::Index(b))
                            .map(|v| v / &dp.value)
                    })
                    .collect::<Result<_>>()?;
                Source::Insertion {
                    node: self.node(s, bs)?,
                    cell,
                    toward,
                    coefficients,
                }
            } else {
                Source::Zero
            };
            sources.push(source);
        }
        self.nodes[id].sources = sources;
        Ok(())
    }
}

impl EvalGraph {
    /// Graph for the order-`k` tiles of `tiling`, whose shift sets must come
    /// from the heights `h`.
    pub fn build(
        config: &PointConfig,
        h: &HeightFunction,
        tiling: &ZonotopalTiling,
        k: usize,
    ) -> Result<Self> {
        if k > tiling.built_order() {
            return Err(Error::MissingOrder {
                requested: k,
                built: tiling.built_order(),
            });
        }
        let mut builder = Builder {
            config,
            cloud: LiftedCloud::new(config, h),
            nodes: Vec::new(),
            index: HashMap::new(),
            queue: VecDeque::new(),
        };
        let mut roots = Vec::new();
        for (id, tile) in tiling.order_tiles(k) {
            let node = builder.node(tile.shift().to_vec(), tile.basis().to_vec())?;
            roots.push((id, node));
        }
        while let Some(id) = builder.queue.pop_front() {
            builder.expand(id)?;
        }
        Ok(Self {
            order: k,
            nodes: builder.nodes,
            index: builder.index,
            roots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[EvalNode] {
        &self.nodes
    }

    pub fn node_of(&self, shift: &[usize], basis: &[usize]) -> Option<usize> {
        self.index.get(&(shift.to_vec(), basis.to_vec())).copied()
    }

    pub fn roots(&self) -> &[(usize, usize)] {
        &self.roots
    }

    /// `(neighbor, node, rule)`: the node's sub-spline comes from the neighbor.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeRule)> + '_ {
        self.nodes.iter().enumerate().flat_map(|(id, n)| {
            n.sources.iter().filter_map(move |s| match s {
                Source::Zero => None,
                Source::Recurrence(from) => Some((*from, id, EdgeRule::Recurrence)),
                Source::Insertion { node, .. } => Some((*node, id, EdgeRule::Insertion)),
            })
        })
    }

    /// Values of every root spline at `x`, as `(tile id, value)`.
    pub fn eval<T: Real>(&self, config: &PointConfig, x: &Query<T>) -> Result<Vec<(usize, T)>> {
        let values = self.run(config, x)?;
        Ok(self
            .roots
            .iter()
            .map(|&(tile, node)| (tile, values[node].unwrap_or_else(T::zero)))
            .collect())
    }

    /// Value of every node the evaluation at `x` touched; untouched nodes
    /// are `None`.
    pub fn run<T: Real>(&self, config: &PointConfig, x: &Query<T>) -> Result<Vec<Option<T>>> {
        if x.dim() != config.dim() {
            return Err(Error::PointDimension {
                expected: config.dim(),
                found: x.dim(),
            });
        }
        // Active dependencies under x.
        let n = self.nodes.len();
        let mut inside = vec![None::<bool>; n];
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut stack: Vec<usize> = self.roots.iter().map(|r| r.1).collect();
        let mut dag = DiGraph::<usize, ()>::new();
        let mut handle = vec![None::<NodeIndex>; n];
        while let Some(id) = stack.pop() {
            if inside[id].is_some() {
                continue;
            }
            let node = &self.nodes[id];
            let hit = in_bounding_box(config, &node.tile.knots(), &x.exact);
            inside[id] = Some(hit);
            handle[id] = Some(dag.add_node(id));
            if !hit {
                continue;
            }
            for s in &node.sources {
                let dep = match s {
                    Source::Zero => None,
                    Source::Recurrence(from) => Some(*from),
                    Source::Insertion {
                        node, cell, toward, ..
                    } => (side_of_point_perturbed(config, cell, &x.exact) == *toward)
                        .then_some(*node),
                };
                if let Some(dep) = dep {
                    deps[id].push(dep);
                    stack.push(dep);
                }
            }
        }
        for (id, ds) in deps.iter().enumerate() {
            for &dep in ds {
                let (a, b) = (handle[dep].expect("visited"), handle[id].expect("visited"));
                dag.add_edge(a, b, ());
            }
        }
        let order = toposort(&dag, None).map_err(|c| Error::Cycle {
            tile: dag[c.node_id()],
        })?;

        let ev = SplineEvaluator::<T>::new(config);
        let d = config.dim();
        let mut value: Vec<Option<T>> = vec![None; n];
        let mut sub: Vec<Vec<T>> = vec![Vec::new(); n];
        for h in order {
            let id = dag[h];
            let node = &self.nodes[id];
            let k = node.tile.order();
            if inside[id] != Some(true) {
                value[id] = Some(T::zero());
                sub[id] = vec![T::zero(); d + 1];
                continue;
            }
            if k == 0 {
                let (hit, _) = locate_perturbed(config, &node.ordered, &x.exact);
                let v = if hit {
                    let scale =
                        Rational::from_integer(factorial(d).into()) / node.tile.volume(config);
                    T::from_rational(&scale)
                } else {
                    T::zero()
                };
                value[id] = Some(v);
                continue;
            }
            let mut mbar = Vec::with_capacity(d + 1);
            for s in &node.sources {
                let v = match s {
                    Source::Zero => T::zero(),
                    Source::Recurrence(from) => value[*from].expect("dependency evaluated"),
                    Source::Insertion {
                        node: from,
                        coefficients,
                        ..
                    } => {
                        if deps[id].contains(from) {
                            coefficients
                                .iter()
                                .zip(&sub[*from])
                                .fold(T::zero(), |a, (c, &m)| a + T::from_rational(c) * m)
                        } else {
                            T::zero()
                        }
                    }
                };
                mbar.push(v);
            }
            let v = match ev.barycentric(&node.ordered, &x.real) {
                Some(lambda) => {
                    let sum = lambda
                        .iter()
                        .zip(&mbar)
                        .fold(T::zero(), |a, (&l, &m)| a + l * m);
                    sum * T::from_usize_lossy(k + d) / T::from_usize_lossy(k)
                }
                None => T::zero(),
            };
            value[id] = Some(v);
            sub[id] = mbar;
        }
        Ok(value)
    }
}
