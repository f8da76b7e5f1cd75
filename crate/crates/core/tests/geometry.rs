mod common;

use common::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zonotile::construction::chk_membership;
use zonotile::geometry::{
    det_plus, in_convex_hull, normalized_hull_volume, random_generic_height,
    validate_generic_height, DepthOracle,
};
use zonotile::linalg::{det_exact, Sign};
use zonotile::{PointConfig, Rational};

fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<(i64, i64)>>> {
    prop::collection::vec(prop::collection::vec((-9i64..10, 1i64..5), n), n)
}

proptest! {
    #[test]
    fn bareiss_matches_leibniz(m in (1usize..5).prop_flat_map(small_matrix)) {
        let rows: Vec<Vec<Rational>> = m
            .iter()
            .map(|r| r.iter().map(|&(p, q)| qq(p, q)).collect())
            .collect();
        prop_assert_eq!(det_exact(rows.clone()), leibniz_det(&rows));
    }

    #[test]
    fn det_plus_is_absolute_value(pts in prop::collection::vec((-6i64..7, -6i64..7), 3)) {
        let refs: Vec<[i64; 2]> = pts.iter().map(|&(a, b)| [a, b]).collect();
        let rows: Vec<&[i64]> = refs.iter().map(|r| r.as_slice()).collect();
        // a spanning fourth point keeps the configuration valid
        let mut all = rows.clone();
        all.extend([&[100i64, 0][..], &[0, 100][..], &[-100, -100][..]]);
        let c = PointConfig::from_integers(2, &all).unwrap();
        let dp = det_plus(&c, &[0, 1, 2]).unwrap();
        prop_assert_eq!(dp.value.clone(), affine_det(&c, &[0, 1, 2]).abs());
        if !dp.value.is_zero() {
            prop_assert_eq!(affine_det(&c, &dp.ordered), dp.value);
        }
    }
}

#[test]
fn hull_membership_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let c = random_config(&mut rng, 2, 6, 8, true);
        let ids: Vec<usize> = (0..c.len()).collect();
        for _ in 0..40 {
            // quarter-grid points land on edges and vertices often
            let x = vec![
                qq(rand::Rng::random_range(&mut rng, -2..34), 4),
                qq(rand::Rng::random_range(&mut rng, -2..34), 4),
            ];
            for size in [1, 2, 3, 6] {
                let sub = &ids[..size];
                assert_eq!(
                    in_convex_hull(&c, sub, &x),
                    in_hull_oracle(&c, sub, &x),
                    "{sub:?} {x:?}"
                );
            }
        }
    }
}

#[test]
fn hull_volume_matches_shoelace() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in 1..=2 {
        for _ in 0..25 {
            let c = random_config(&mut rng, d, 7, 10, true);
            let ids: Vec<usize> = (0..c.len()).collect();
            let factorial = if d == 2 { q(2) } else { q(1) };
            assert_eq!(
                normalized_hull_volume(&c, &ids),
                hull_measure(&c) * factorial
            );
        }
    }
}

#[test]
fn random_heights_are_generic() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 1..=3 {
        for seed in 0..5 {
            let c = random_config(&mut rng, d, 7, 6, true);
            let h = random_generic_height(&c, seed).unwrap();
            assert!(validate_generic_height(&c, &h));
        }
    }
}

#[test]
fn depth_oracle_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for d in 1..=2 {
        let c = random_config(&mut rng, d, 7, 9, false);
        let oracle = DepthOracle::new(&c);
        let mut checked = 0;
        while checked < 60 {
            let x = random_point(&mut rng, d, 0, 9);
            let Ok(depth) = oracle.depth(&c, &x) else {
                continue;
            };
            for k in 0..=c.max_order() {
                assert_eq!(
                    depth > k,
                    chk_membership(&c, k, &x).unwrap(),
                    "d={d} k={k} {x:?}"
                );
            }
            checked += 1;
        }
    }
}

#[test]
fn point_on_spanned_hyperplane_is_reported() {
    let c = PointConfig::from_integers(2, &[&[0, 0], &[4, 0], &[0, 4]]).unwrap();
    let oracle = DepthOracle::new(&c);
    assert!(oracle.check_generic(&c, &[q(2), q(0)]).is_err());
    assert!(oracle.check_generic(&c, &[q(1), q(1)]).is_ok());
    assert_eq!(Sign::of(&q(-3)), Sign::Negative);
}
