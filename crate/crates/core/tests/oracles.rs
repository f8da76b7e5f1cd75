mod common;

use common::*;
use zonotile::PointConfig;

#[test]
fn oracles_self_check() {
    let m = vec![
        vec![q(2), q(0), q(1)],
        vec![q(1), q(3), q(2)],
        vec![q(1), q(1), q(1)],
    ];
    // 2(3-2) - 0 + 1(1-3)
    assert_eq!(leibniz_det(&m), q(0));
    let t = [0.0, 1.0, 2.0, 3.0];
    assert_eq!(cox_de_boor(&t, 0, 1, 1.0), 1.0);
    assert!((normalized_bspline(&t, 0, 2, 1.5) - 0.75 * 3.0 / 3.0).abs() < 1e-15);
    assert!((bernstein(3, 1, 0.5) - 0.375).abs() < 1e-15);
    let c = PointConfig::from_integers(2, &[&[0, 0], &[2, 0], &[0, 2], &[1, 1]]).unwrap();
    assert_eq!(hull_measure(&c), q(2));
    assert!(in_hull_oracle(&c, &[0, 1, 2], &[qq(1, 2), qq(1, 2)]));
    assert!(!in_hull_oracle(&c, &[0, 1, 2], &[qq(3, 2), q(1)]));
    assert_eq!(monomials(2, 2).len(), 6);
}
