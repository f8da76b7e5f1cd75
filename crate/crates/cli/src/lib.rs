//! Command implementations for the `zonotile` binary. Every command writes
//! its primary output to the given writer and diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zonotile::error::Error;
use zonotile::geometry::{
    in_convex_hull, random_generic_height, DepthOracle, HeightFunction, PointConfig,
};
use zonotile::io::{
    adjacency_dot, csv_header, csv_row, eval_graph_dot, oriented_dot, ConfigDocument,
    TilingDocument,
};
use zonotile::query::brute_force_support;
use zonotile::sampling::sample_chk;
use zonotile::scalar::{parse_rational, Rational};
use zonotile::spline::{in_bounding_box, reproduce};
use zonotile::{
    brute_force_regular_tiling, incremental_build, verify_tiling, EvalGraph, Orienter,
    PointLocator, Polynomial64, Query64, SplineEvaluator64, VerifyOptions, ZonotopalTiling,
};

#[derive(Debug, Parser)]
#[command(
    name = "zonotile",
    version,
    about = "Simplex-spline spaces from zonotopal tilings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildMode {
    Incremental,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Direct,
    Graph,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the regular tiling of a configuration and write it as JSON.
    Build {
        config: PathBuf,
        /// Integer seed for random generic heights, or a file with a
        /// `heights` array. Defaults to the heights or seed in the config,
        /// then to seed 0.
        #[arg(long)]
        height: Option<String>,
        /// Highest tile order to build; defaults to the full order.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value = "incremental")]
        mode: BuildMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the structural checks on a tiling document.
    Verify {
        tiling: PathBuf,
        /// Require the tiling to belong to this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Values of the order-k splines supported on a point.
    Eval {
        tiling: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Comma-separated coordinates, exact (`1/3`, `0.25`).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value = "direct")]
        mode: EvalMode,
    },
    /// Maximal error of polynomial reproduction at random points of ch_k.
    Reproduce {
        tiling: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Polynomial in x0, x1, ..., e.g. `3*x0*x1 - x1^2 + 1/2`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graphviz rendering of the adjacency graph or the evaluation graph.
    ExportDot {
        tiling: PathBuf,
        /// Orient the adjacency graph by this point.
        #[arg(long, allow_hyphen_values = true)]
        orient: Option<String>,
        /// Draw the evaluation graph of this order instead.
        #[arg(long, conflicts_with = "orient")]
        eval_graph: Option<usize>,
    },
    /// CSV of all order-k spline values on a grid (d = 1 or 2).
    Plot {
        tiling: PathBuf,
        #[arg(long)]
        degree: usize,
        /// `a:b:n` per axis, comma separated: n equally spaced values from a to b.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Build {
            config,
            height,
            max_degree,
            mode,
            output,
        } => {
            let text = cmd_build(&config, height.as_deref(), max_degree, mode)?;
            match output {
                Some(path) => std::fs::write(&path, &text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(true)
        }
        Command::Verify {
            tiling,
            config,
            samples,
            seed,
        } => cmd_verify(
            &tiling,
            config.as_deref(),
            &VerifyOptions { samples, seed },
            out,
        ),
        Command::Eval {
            tiling,
            degree,
            point,
            mode,
        } => {
            let tiling = load_tiling(&tiling)?;
            let x = parse_point(&point, tiling.config().dim())?;
            for (id, value) in cmd_eval(&tiling, degree, &x, mode)? {
                let t = tiling.tile(id);
                writeln!(out, "{id}\tI={:?}\tB={:?}\t{value}", t.shift(), t.basis())?;
            }
            Ok(true)
        }
        Command::Reproduce {
            tiling,
            degree,
            poly,
            samples,
            seed,
        } => {
            let tiling = load_tiling(&tiling)?;
            match cmd_reproduce(&tiling, degree, &poly, samples, seed)? {
                Some((err, used)) => writeln!(out, "max abs error {err:e} over {used} points")?,
                None => writeln!(out, "ch_{degree} is empty; nothing to sample")?,
            }
            Ok(true)
        }
        Command::ExportDot {
            tiling,
            orient,
            eval_graph,
        } => {
            let tiling = load_tiling(&tiling)?;
            let text = cmd_export_dot(&tiling, orient.as_deref(), eval_graph)?;
            out.write_all(text.as_bytes())?;
            Ok(true)
        }
        Command::Plot {
            tiling,
            degree,
            grid,
        } => {
            let tiling = load_tiling(&tiling)?;
            cmd_plot(&tiling, degree, &grid, out)?;
            Ok(true)
        }
    }
}

pub fn load_tiling(path: &Path) -> Result<ZonotopalTiling> {
    let doc = TilingDocument::load(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(doc.tiling()?)
}

pub fn parse_point(text: &str, dim: usize) -> Result<Vec<Rational>> {
    let x = text
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    ensure!(
        x.len() == dim,
        "point {text:?} has {} coordinates, expected {dim}",
        x.len()
    );
    Ok(x)
}

fn resolve_heights(
    doc: &ConfigDocument,
    config: &PointConfig,
    height: Option<&str>,
) -> Result<(HeightFunction, Option<u64>)> {
    if let Some(spec) = height {
        if let Ok(seed) = spec.parse::<u64>() {
            return Ok((random_generic_height(config, seed)?, Some(seed)));
        }
        let text =
            std::fs::read_to_string(spec).with_context(|| format!("reading heights {spec}"))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let list = value
            .get("heights")
            .unwrap_or(&value)
            .as_array()
            .context("height file must be an array or an object with a `heights` array")?;
        let values = list
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rational(s),
                other => parse_rational(&other.to_string()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((HeightFunction::for_config(config, values)?, None));
    }
    if let Some(h) = doc.heights(config)? {
        return Ok((h, None));
    }
    let seed = doc.seed.unwrap_or(0);
    Ok((random_generic_height(config, seed)?, Some(seed)))
}

/// Builds the tiling and returns its canonical document text. Tile counts per
/// order go to stderr.
pub fn cmd_build(
    config_path: &Path,
    height: Option<&str>,
    max_degree: Option<usize>,
    mode: BuildMode,
) -> Result<String> {
    let doc = ConfigDocument::load(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let config = doc.config()?;
    let (h, seed) = resolve_heights(&doc, &config, height)?;
    let k = max_degree.unwrap_or(config.max_order());
    let tiling = match mode {
        BuildMode::Incremental => incremental_build(&config, &h, k)?,
        BuildMode::Brute => {
            if k > config.max_order() {
                return Err(Error::OrderOutOfRange {
                    k,
                    max: config.max_order(),
                }
                .into());
            }
            brute_force_regular_tiling(&config, &h)?.truncated(k)
        }
    };
    for (order, count) in tiling.counts_by_order() {
        eprintln!("order {order}: {count} tiles");
    }
    Ok(TilingDocument::new(&tiling, seed).to_json())
}

pub fn cmd_verify(
    path: &Path,
    config: Option<&Path>,
    options: &VerifyOptions,
    out: &mut dyn Write,
) -> Result<bool> {
    let doc = TilingDocument::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(config) = config {
        let cfg = ConfigDocument::load(config)?.config()?;
        doc.check_config(&cfg)?;
    }
    let tiling = match doc.tiling() {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "document      FAILED {e}")?;
            return Ok(false);
        }
    };
    let report = verify_tiling(&tiling, options);
    write!(out, "{report}")?;
    Ok(report.passed())
}

/// `(tile id, value)` for every order-`k` tile whose knot hull contains `x`.
pub fn cmd_eval(
    tiling: &ZonotopalTiling,
    k: usize,
    x: &[Rational],
    mode: EvalMode,
) -> Result<Vec<(usize, f64)>> {
    if k > tiling.built_order() {
        return Err(Error::MissingOrder {
            requested: k,
            built: tiling.built_order(),
        }
        .into());
    }
    let config = tiling.config();
    let support = supported(tiling, x, k)?;
    let q = Query64::new(x.to_vec());
    match mode {
        EvalMode::Direct => {
            let ev = SplineEvaluator64::new(config);
            let knots: Vec<Vec<usize>> =
                support.iter().map(|&id| tiling.tile(id).knots()).collect();
            let values = ev.eval_many(&knots, &q)?;
            Ok(support.into_iter().zip(values).collect())
        }
        EvalMode::Graph => {
            let h = tiling
                .heights()
                .context("graph evaluation needs the heights stored in the tiling")?;
            let graph = EvalGraph::build(config, h, tiling, k)?;
            let values = graph.eval(config, &q)?;
            Ok(values
                .into_iter()
                .filter(|(id, _)| support.binary_search(id).is_ok())
                .collect())
        }
    }
}

/// Supported order-`k` tiles through the oriented traversal, falling back to
/// a scan when `x` lies on a facet hyperplane.
fn supported(tiling: &ZonotopalTiling, x: &[Rational], k: usize) -> Result<Vec<usize>> {
    let found =
        Orienter::new(tiling).and_then(|o| o.supported_tiles(&PointLocator::new(tiling), x, k));
    let all = match found {
        Ok(ids) => ids,
        Err(Error::NonGenericPoint { facet }) => {
            eprintln!("note: point lies on the hyperplane of cell {facet:?}; scanning all tiles");
            brute_force_support(tiling, x, k)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(all
        .into_iter()
        .filter(|&id| tiling.tile(id).order() == k)
        .collect())
}

/// Maximal absolute reproduction error and the number of points used, or
/// `None` when no point of `ch_k` was found.
pub fn cmd_reproduce(
    tiling: &ZonotopalTiling,
    k: usize,
    poly: &str,
    samples: usize,
    seed: u64,
) -> Result<Option<(f64, usize)>> {
    let config = tiling.config();
    let p = Polynomial64::parse(poly, config.dim())?;
    if p.degree() > k {
        return Err(Error::DegreeExceedsArity {
            degree: p.degree(),
            arity: k,
        }
        .into());
    }
    let oracle = DepthOracle::new(config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_chk(config, &oracle, k, samples, samples * 50 + 500, &mut rng);
    if points.is_empty() {
        return Ok(None);
    }
    let ev = SplineEvaluator64::new(config);
    let mut worst = 0.0f64;
    for x in &points {
        let q = Query64::new(x.clone());
        let got = reproduce(&ev, tiling, k, &p, &q)?;
        worst = worst.max((got - p.eval(&q.real)).abs());
    }
    Ok(Some((worst, points.len())))
}

pub fn cmd_export_dot(
    tiling: &ZonotopalTiling,
    orient: Option<&str>,
    eval_graph: Option<usize>,
) -> Result<String> {
    if let Some(k) = eval_graph {
        let h = tiling
            .heights()
            .context("the evaluation graph needs the heights stored in the tiling")?;
        let graph = EvalGraph::build(tiling.config(), h, tiling, k)?;
        return Ok(eval_graph_dot(&graph));
    }
    match orient {
        Some(point) => {
            let x = parse_point(point, tiling.config().dim())?;
            let oriented = Orienter::new(tiling)?.orient(&x)?;
            Ok(oriented_dot(tiling, &oriented))
        }
        None => Ok(adjacency_dot(tiling)?),
    }
}

/// Parses `a:b:n` per axis into the exact grid values of each axis.
pub fn parse_grid(spec: &str, dim: usize) -> Result<Vec<Vec<Rational>>> {
    let axes: Vec<&str> = spec.split(',').collect();
    ensure!(
        axes.len() == dim,
        "grid {spec:?} has {} axes, expected {dim}",
        axes.len()
    );
    axes.iter()
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            ensure!(
                parts.len() == 3,
                "grid axis {axis:?} is not of the form a:b:n"
            );
            let a = parse_rational(parts[0])?;
            let b = parse_rational(parts[1])?;
            let n: usize = parts[2]
                .parse()
                .with_context(|| format!("grid count in {axis:?}"))?;
            Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => {
                    let step = (&b - &a) / Rational::from_integer((n - 1).into());
                    (0..n)
                        .map(|i| &a + &step * Rational::from_integer(i.into()))
                        .collect()
                }
            })
        })
        .collect()
}

/// Writes `x0[,x1],tile,value` for every grid point and every order-`k` tile.
pub fn cmd_plot(tiling: &ZonotopalTiling, k: usize, grid: &str, out: &mut dyn Write) -> Result<()> {
    let config = tiling.config();
    let d = config.dim();
    if d > 2 {
        return Err(Error::UnsupportedDimension(d).into());
    }
    if k > tiling.built_order() {
        return Err(Error::MissingOrder {
            requested: k,
            built: tiling.built_order(),
        }
        .into());
    }
    let axes = parse_grid(grid, d)?;
    writeln!(out, "{}", csv_header(d))?;
    let points: Vec<Vec<Rational>> = match d {
        1 => axes[0].iter().map(|a| vec![a.clone()]).collect(),
        _ => axes[1]
            .iter()
            .flat_map(|y| axes[0].iter().map(move |x| vec![x.clone(), y.clone()]))
            .collect(),
    };
    let tiles: Vec<(usize, Vec<usize>)> = tiling
        .order_tiles(k)
        .map(|(id, t)| (id, t.knots()))
        .collect();
    let ev = SplineEvaluator64::new(config);
    for x in points {
        let q = Query64::new(x.clone());
        let live: Vec<usize> = (0..tiles.len())
            .filter(|&i| {
                in_bounding_box(config, &tiles[i].1, &x) && in_convex_hull(config, &tiles[i].1, &x)
            })
            .collect();
        let knots: Vec<Vec<usize>> = live.iter().map(|&i| tiles[i].1.clone()).collect();
        let values = ev.eval_many(&knots, &q)?;
        let mut value_of = vec![0.0; tiles.len()];
        for (&i, v) in live.iter().zip(values) {
            value_of[i] = v;
        }
        for (i, (id, _)) in tiles.iter().enumerate() {
            writeln!(out, "{}", csv_row(&x, *id, value_of[i]))?;
        }
    }
    Ok(())
}
