mod common;

use vmk2::model::Item;
use vmk2::Vmk2Instance;

fn inst(items: &[(f64, f64, f64)], m: usize) -> Vmk2Instance {
    Vmk2Instance::new(
        items.iter().enumerate().map(|(k, &(a, b, p))| Item::new(format!("x{k}"), a, b, p)).collect(),
        m,
    )
    .unwrap()
}

#[test]
fn enumeration_oracle_on_hand_cases() {
    let three = inst(&[(0.6, 0.6, 1.0), (0.6, 0.6, 1.0), (0.6, 0.6, 1.0)], 2);
    assert_eq!(common::naive_opt(&three), 2.0);
    let pairs = inst(&[(0.5, 0.4, 1.0), (0.5, 0.4, 1.0), (0.5, 0.4, 1.0)], 1);
    assert_eq!(common::naive_opt(&pairs), 2.0);
    assert_eq!(common::naive_opt(&pairs.with_bins(2).unwrap()), 3.0);
    // complementary shapes share a bin
    let shapes = inst(&[(0.9, 0.1, 1.0), (0.1, 0.9, 1.0), (0.9, 0.1, 1.0)], 1);
    assert_eq!(common::naive_opt(&shapes), 2.0);
    assert_eq!(common::naive_max_configuration(&shapes), 2.0);
}

#[test]
fn suite_shape() {
    let suite = common::exact_suite();
    assert_eq!(suite.len(), 50);
    assert!(suite.iter().all(|i| (6..=12).contains(&i.len()) && (1..=3).contains(&i.m())));
    assert!(suite.iter().any(|i| i.len() == 12));
}
