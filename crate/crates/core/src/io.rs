//! JSON documents for configurations and tilings, DOT and CSV exports.
//!
//! Exact numbers are stored as strings (`"3"`, `"-1/3"`, `"0.25"`) and
//! written back in lowest-terms form, so a document saved by this module
//! reloads and saves to the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evalgraph::{EdgeRule, EvalGraph};
use crate::geometry::{HeightFunction, PointConfig};
use crate::query::OrientedGraph;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::tiling::{Tile, ZonotopalTiling};

pub const TILING_FORMAT: &str = "zonotile-tiling/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub dim: usize,
    pub points: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn parse_all(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|s| parse_rational(s)).collect()
}

impl ConfigDocument {
    pub fn new(config: &PointConfig, heights: Option<&HeightFunction>, seed: Option<u64>) -> Self {
        Self {
            dim: config.dim(),
            points: config.points().iter().map(|p| strings(p)).collect(),
            heights: heights.map(|h| strings(h.values())),
            seed,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn config(&self) -> Result<PointConfig> {
        let points = self
            .points
            .iter()
            .map(|p| parse_all(p))
            .collect::<Result<Vec<_>>>()?;
        PointConfig::new(self.dim, points)
    }

    pub fn heights(&self, config: &PointConfig) -> Result<Option<HeightFunction>> {
        self.heights
            .as_ref()
            .map(|h| HeightFunction::for_config(config, parse_all(h)?))
            .transpose()
    }

    /// The same document with every number in lowest-terms form.
    pub fn canonical(&self) -> Result<Self> {
        let config = self.config()?;
        let heights = self.heights(&config)?;
        Ok(Self::new(&config, heights.as_ref(), self.seed))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// Reads a configuration and its optional heights.
pub fn load_config(path: impl AsRef<Path>) -> Result<(PointConfig, Option<HeightFunction>)> {
    let doc = ConfigDocument::load(path)?;
    let config = doc.config()?;
    let heights = doc.heights(&config)?;
    Ok((config, heights))
}

/// SHA-256 over the canonical text of the points, hex encoded.
pub fn config_hash(config: &PointConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("dim {}\n", config.dim()));
    for p in config.points() {
        hasher.update(strings(p).join(" "));
        hasher.update("\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileEntry {
    #[serde(rename = "I")]
    pub shift: Vec<usize>,
    #[serde(rename = "B")]
    pub basis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderGroup {
    pub order: usize,
    pub tiles: Vec<TileEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilingDocument {
    pub format: String,
    pub config_hash: String,
    pub config: ConfigDocument,
    pub built_order: usize,
    pub orders: Vec<OrderGroup>,
}

impl TilingDocument {
    pub fn new(tiling: &ZonotopalTiling, seed: Option<u64>) -> Self {
        let config = tiling.config();
        let mut orders: Vec<OrderGroup> = Vec::new();
        for t in tiling.tiles() {
            let entry = TileEntry {
                shift: t.shift().to_vec(),
                basis: t.basis().to_vec(),
            };
            match orders.last_mut() {
                Some(g) if g.order == t.order() => g.tiles.push(entry),
                _ => orders.push(OrderGroup {
                    order: t.order(),
                    tiles: vec![entry],
                }),
            }
        }
        Self {
            format: TILING_FORMAT.to_string(),
            config_hash: config_hash(config),
            config: ConfigDocument::new(config, tiling.heights(), seed),
            built_order: tiling.built_order(),
            orders,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Rebuilds the tiling, checking the format, the config hash and that
    /// every tile is listed under its own order.
    pub fn tiling(&self) -> Result<ZonotopalTiling> {
        if self.format != TILING_FORMAT {
            return Err(Error::Document(format!(
                "unknown format {:?}, expected {TILING_FORMAT:?}",
                self.format
            )));
        }
        let config = self.config.config()?;
        let hash = config_hash(&config);
        if hash != self.config_hash {
            return Err(Error::Document(format!(
                "config hash {} does not match the embedded points ({hash})",
                self.config_hash
            )));
        }
        let heights = self.config.heights(&config)?;
        let mut tiles = Vec::new();
        for group in &self.orders {
            for e in &group.tiles {
                if e.shift.len() != group.order {
                    return Err(Error::Document(format!(
                        "tile I={:?} B={:?} listed under order {}",
                        e.shift, e.basis, group.order
                    )));
                }
                if e.basis.len() != config.dim() + 1 {
                    return Err(Error::WrongCardinality {
                        expected: config.dim() + 1,
                        found: e.basis.len(),
                    });
                }
                if let Some(&i) = e.basis.iter().find(|&&i| i >= config.len()) {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        n: config.len(),
                    });
                }
                tiles.push(Tile::new(&config, e.shift.clone(), e.basis.clone())?);
            }
        }
        let ground = (0..config.len()).collect();
        ZonotopalTiling::new(config, ground, tiles, self.built_order, heights)
    }

    /// Checks that the document belongs to `config`.
    pub fn check_config(&self, config: &PointConfig) -> Result<()> {
        let hash = config_hash(config);
        if hash == self.config_hash {
            Ok(())
        } else {
            Err(Error::Document(format!(
                "tiling was built for config {}, not {hash}",
                self.config_hash
            )))
        }
    }
}

fn set(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn tile_label(t: &Tile) -> String {
    format!("I={} B={}", set(t.shift()), set(t.basis()))
}

fn dot_nodes(out: &mut String, tiling: &ZonotopalTiling) {
    for (id, t) in tiling.tiles().iter().enumerate() {
        let _ = writeln!(
            out,
            "  {id} [label=\"{}\", order={}];",
            tile_label(t),
            t.order()
        );
    }
}

/// The undirected adjacency graph; node ids are canonical tile ids.
pub fn adjacency_dot(tiling: &ZonotopalTiling) -> Result<String> {
    let graph = tiling.adjacency()?;
    let mut out = String::from("graph tiling {\n");
    dot_nodes(&mut out, tiling);
    let mut edges: Vec<(usize, usize)> = graph.edges().map(|(a, b, _)| (a, b)).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
    Ok(out)
}

/// The adjacency graph with edges directed by a query point.
pub fn oriented_dot(tiling: &ZonotopalTiling, oriented: &OrientedGraph) -> String {
    let mut out = String::from("digraph tiling {\n");
    dot_nodes(&mut out, tiling);
    let mut edges: Vec<(usize, usize)> = oriented.edges().collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(out, "  {a} -> {b};");
    }
    out.push_str("}\n");
    out
}

/// The evaluation graph; roots are drawn as boxes and carry their tile id.
pub fn eval_graph_dot(graph: &EvalGraph) -> String {
    let mut out = String::from("digraph evaluation {\n");
    let mut root_of = vec![None; graph.nodes().len()];
    for &(tile, node) in graph.roots() {
        root_of[node] = Some(tile);
    }
    for (id, n) in graph.nodes().iter().enumerate() {
        let label = tile_label(&n.tile);
        match root_of[id] {
            Some(tile) => {
                let _ = writeln!(out, "  {id} [label=\"{label}\", shape=box, tile={tile}];");
            }
            None => {
                let _ = writeln!(out, "  {id} [label=\"{label}\"];");
            }
        }
    }
    let mut edges: Vec<(usize, usize, EdgeRule)> = graph.edges().collect();
    edges.sort_unstable_by_key(|&(a, b, r)| (a, b, r == EdgeRule::Insertion));
    for (a, b, rule) in edges {
        let label = match rule {
            EdgeRule::Recurrence => "recurrence",
            EdgeRule::Insertion => "insertion",
        };
        let _ = writeln!(out, "  {a} -> {b} [label=\"{label}\"];");
    }
    out.push_str("}\n");
    out
}

/// CSV header for point-wise values in dimension `dim`.
pub fn csv_header(dim: usize) -> String {
    let mut cols: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
    cols.push("tile".into());
    cols.push("value".into());
    cols.join(",")
}

pub fn csv_row(x: &[Rational], tile: usize, value: f64) -> String {
    let mut cols: Vec<String> = x
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::NAN).to_string())
        .collect();
    cols.push(tile.to_string());
    cols.push(value.to_string());
    cols.join(",")
}
