mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zonotile::geometry::{random_generic_height, DepthOracle, Location};
use zonotile::query::{brute_force_support, Direction};
use zonotile::sampling::sample_generic;
use zonotile::{
    brute_force_regular_tiling, incremental_build, Error, HeightFunction, Orienter, PointConfig,
    PointLocator,
};

#[test]
fn orientation_flips_across_the_cell() {
    let c = PointConfig::from_integers(1, &[&[0], &[1], &[2]]).unwrap();
    let t = brute_force_regular_tiling(&c, &HeightFunction::squared_norm(&c)).unwrap();
    let o = Orienter::new(&t).unwrap();
    let a = t.id_of_basis(&[0, 1]).unwrap();
    let b = t.id_of_basis(&[1, 2]).unwrap();
    assert_eq!(
        o.edge_direction(b, a, &[qq(1, 2)]).unwrap(),
        Some(Direction::Forward)
    );
    assert_eq!(
        o.edge_direction(b, a, &[qq(3, 2)]).unwrap(),
        Some(Direction::Backward)
    );
    match o.edge_direction(a, b, &[q(1)]) {
        Err(Error::NonGenericPoint { facet }) => assert_eq!(facet, vec![1]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_tile_is_trivially_acyclic() {
    let c = PointConfig::from_integers(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap();
    let t = incremental_build(&c, &HeightFunction::squared_norm(&c), 0).unwrap();
    let g = Orienter::new(&t)
        .unwrap()
        .orient(&[qq(1, 4), qq(1, 4)])
        .unwrap();
    assert_eq!(g.order, vec![0]);
}

#[test]
fn random_orientations_are_acyclic() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for d in 1..=2 {
        for seed in 0..4 {
            let c = random_config(&mut rng, d, 7, 8, true);
            let h = random_generic_height(&c, seed).unwrap();
            let t = incremental_build(&c, &h, c.max_order()).unwrap();
            let o = Orienter::new(&t).unwrap();
            for x in sample_generic(&c, &DepthOracle::new(&c), 50, &mut rng) {
                let g = o.orient(&x).unwrap();
                assert_eq!(g.order.len(), t.len());
            }
        }
    }
}

#[test]
fn supported_tiles_match_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in 1..=2 {
        for seed in 0..4 {
            let c = random_config(&mut rng, d, 7, 8, true);
            let h = random_generic_height(&c, seed).unwrap();
            let t = incremental_build(&c, &h, c.max_order()).unwrap();
            let o = Orienter::new(&t).unwrap();
            let l = PointLocator::new(&t);
            for x in sample_generic(&c, &DepthOracle::new(&c), 40, &mut rng) {
                for k in 0..=t.built_order() {
                    let fast = o.supported_tiles(&l, &x, k).unwrap();
                    assert_eq!(fast, brute_force_support(&t, &x, k));
                    let oracle: Vec<usize> = (0..t.len())
                        .filter(|&id| {
                            let tile = t.tile(id);
                            tile.order() <= k && in_hull_oracle(&c, &tile.knots(), &x)
                        })
                        .collect();
                    assert_eq!(fast, oracle);
                }
            }
        }
    }
}

#[test]
fn located_simplex_is_the_only_cover() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let c = random_config(&mut rng, 2, 9, 10, false);
    let h = random_generic_height(&c, 0).unwrap();
    let t = incremental_build(&c, &h, 0).unwrap();
    let l = PointLocator::new(&t);
    for x in sample_generic(&c, &DepthOracle::new(&c), 60, &mut rng) {
        let covering: Vec<usize> = t
            .order_tiles(0)
            .filter(|(_, tile)| tile.locate(&c, &x) != Location::Outside)
            .map(|(id, _)| id)
            .collect();
        match l.locate(&t, &x).unwrap() {
            Some(found) => assert_eq!(covering, vec![found.tile]),
            None => assert!(covering.is_empty()),
        }
    }
}

/// Across every shared facet, the membership rule read off the lifted signs
/// matches the tiles, and the lifted and geometric step signs agree.
#[test]
fn lifted_sign_rules_hold_on_shared_facets() {
    use zonotile::geometry::{side_of_index, LiftedCloud};
    use zonotile::linalg::Sign;
    use zonotile::query::{facet_step_sign_geometric, facet_step_sign_lifted};
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for d in 1..=3 {
        for seed in 0..3 {
            let c = random_config(&mut rng, d, d + 5, 6, true);
            let h = random_generic_height(&c, seed).unwrap();
            let t = incremental_build(&c, &h, c.max_order()).unwrap();
            let cloud = LiftedCloud::new(&c, &h);
            for (a, b, f) in t.adjacency().unwrap().edges() {
                let (ta, tb) = (t.tile(a), t.tile(b));
                let free =
                    |x: &zonotile::Tile| *x.basis().iter().find(|i| !f.cell.contains(i)).unwrap();
                let (ba, bb) = (free(ta), free(tb));
                let s_ab = cloud.sign(f.cell.iter().copied().chain([ba, bb]));
                let (sa, sb) = (
                    side_of_index(&c, &f.cell, ba),
                    side_of_index(&c, &f.cell, bb),
                );
                assert_eq!(ta.shift().contains(&bb), s_ab.times(sa) == Sign::Positive);
                assert_eq!(tb.shift().contains(&ba), s_ab.times(sb) == Sign::Negative);
                assert_eq!(
                    facet_step_sign_lifted(&cloud, &c, ta, tb, &f.cell),
                    facet_step_sign_geometric(&c, ta, tb, &f.cell)
                );
            }
        }
    }
}
