//! Structural verification of tilings against independent computations.

use std::fmt;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{
    affine_bases, det_plus, normalized_hull_volume, side_of_index, DepthOracle, LiftedCloud,
    Location,
};
use crate::linalg::Sign;
use crate::sampling::sample_chk;
use crate::scalar::{binomial, format_rational, Rational};
use crate::tiling::{boundary_certificate, Tile, ZonotopalTiling};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Sampled points per order for the cover-count check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name,
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok" } else { "FAILED" };
            writeln!(f, "{:<14} {:<6} {}", c.name, status, c.detail)?;
        }
        Ok(())
    }
}

pub fn verify_tiling(tiling: &ZonotopalTiling, options: &VerifyOptions) -> Report {
    let mut report = Report::default();
    let config = tiling.config();
    let ground = tiling.ground();
    let bases = affine_bases(config, ground);

    let foreign = tiling
        .tiles()
        .iter()
        .position(|t| t.knots().iter().any(|i| ground.binary_search(i).is_err()));
    match foreign {
        Some(id) => report.push(
            "indices",
            false,
            format!("tile {id} uses indices outside the ground set"),
        ),
        None => report.push("indices", true, "all tiles use ground indices"),
    }

    if tiling.is_complete() {
        report.push(
            "tile-count",
            tiling.len() == bases.len(),
            format!("{} tiles, {} affine bases", tiling.len(), bases.len()),
        );
    } else {
        report.push(
            "tile-count",
            true,
            format!(
                "partial tiling up to order {}; checked by the lifted-sign audit",
                tiling.built_order()
            ),
        );
    }

    let tiled: Rational = tiling
        .order_tiles(0)
        .map(|(_, t)| t.volume(config))
        .fold(Rational::zero(), |a, b| a + b);
    let hull = normalized_hull_volume(config, ground);
    report.push(
        "volume",
        tiled == hull,
        format!(
            "order-0 volume {} vs hull {} (normalized by d!)",
            format_rational(&tiled),
            format_rational(&hull)
        ),
    );

    facet_check(tiling, &mut report);
    cover_check(tiling, options, &mut report);

    if let Some(h) = tiling.heights() {
        let cloud = LiftedCloud::new(config, h);
        let mut problems = Vec::new();
        let mut expected = 0usize;
        for basis in &bases {
            let ordered = det_plus(config, basis).expect("basis size").ordered;
            let mut shift = Vec::new();
            for &i in ground.iter().filter(|i| !basis.contains(i)) {
                match cloud.sign(ordered.iter().copied().chain([i])) {
                    Sign::Positive => shift.push(i),
                    Sign::Negative => {}
                    Sign::Zero => problems.push(format!("zero lifted sign for {basis:?} and {i}")),
                }
            }
            if shift.len() > tiling.built_order() {
                continue;
            }
            expected += 1;
            match tiling.id_of_basis(basis) {
                Some(id) if tiling.tile(id).shift() == shift.as_slice() => {}
                Some(id) => problems.push(format!(
                    "tile {id} has shift {:?}, heights give {shift:?}",
                    tiling.tile(id).shift()
                )),
                None => problems.push(format!("missing tile ({shift:?}, {basis:?})")),
            }
        }
        if expected != tiling.len() {
            problems.push(format!("{} tiles, heights give {expected}", tiling.len()));
        }
        report.push(
            "lifted-signs",
            problems.is_empty(),
            if problems.is_empty() {
                "every shift set matches the lifted signs".to_string()
            } else {
                problems.join("; ")
            },
        );
    }

    report
}

fn facet_check(tiling: &ZonotopalTiling, report: &mut Report) {
    let config = tiling.config();
    let mut problems = Vec::new();
    let mut internal = 0usize;
    let mut boundary = 0usize;
    for (facet, owners) in tiling.facet_table() {
        match owners.as_slice() {
            [a, b] => {
                internal += 1;
                let (ta, tb) = (tiling.tile(*a), tiling.tile(*b));
                let free = |t: &Tile| {
                    *t.basis()
                        .iter()
                        .find(|i| !facet.cell.contains(i))
                        .expect("one free index")
                };
                let sa = side_of_index(config, &facet.cell, free(ta));
                let sb = side_of_index(config, &facet.cell, free(tb));
                let separated = sa.times(sb) == Sign::Negative;
                if separated != (ta.order() == tb.order()) {
                    problems.push(format!("tiles {a} and {b} break the separation rule"));
                }
            }
            [a] => {
                let t = tiling.tile(*a);
                if boundary_certificate(config, tiling.ground(), t, &facet).is_some() {
                    boundary += 1;
                } else if facet.shift.len() <= tiling.built_order() {
                    problems.push(format!(
                        "facet {facet:?} of tile {a} has one owner but is interior"
                    ));
                }
            }
            many => problems.push(format!("facet {facet:?} has owners {many:?}")),
        }
    }
    let detail = if problems.is_empty() {
        format!("{internal} internal facets, {boundary} boundary facets")
    } else {
        problems.truncate(5);
        problems.join("; ")
    };
    report.push("facets", problems.is_empty(), detail);
}

fn cover_check(tiling: &ZonotopalTiling, options: &VerifyOptions, report: &mut Report) {
    if tiling.ground().len() != tiling.config().len() {
        report.push("cover-counts", true, "skipped for induced tilings");
        return;
    }
    let config = tiling.config();
    let d = config.dim();
    let oracle = DepthOracle::new(config);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let top = tiling.built_order().min(tiling.full_order());
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for k in 0..=top {
        let points = sample_chk(
            config,
            &oracle,
            k,
            options.samples,
            options.samples * 20 + 200,
            &mut rng,
        );
        let expected = binomial(k + d, d) as usize;
        for x in &points {
            let count = tiling
                .order_tiles(k)
                .filter(|(_, t)| t.locate(config, x) != Location::Outside)
                .count();
            if count != expected {
                problems.push(format!(
                    "order {k}: multiplicity {count}, expected {expected}"
                ));
                break;
            }
        }
        summary.push(format!("k={k}:{}", points.len()));
    }
    let detail = if problems.is_empty() {
        format!("sampled points per order {}", summary.join(" "))
    } else {
        problems.join("; ")
    };
    report.push("cover-counts", problems.is_empty(), detail);
}
