mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use ragft::harness::complexity_proxy;
use ragft::hierarchy::{build_partial_tree, build_tree, BlockSchedule, PartitionTree};
use ragft::io::VoxelizedCloud;
use ragft::Error;

#[test]
fn nine_leaf_tree() {
    let cloud = common::nine_leaf_cloud();
    let tree = build_tree(&cloud, &BlockSchedule::new(vec![2, 2]).unwrap()).unwrap();
    assert_eq!(tree.block_levels(), 2);
    assert_eq!(tree.root_count(), 1);
    assert_eq!(tree.level(1).coords, vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]]);
    let sizes: Vec<usize> = (0..3).map(|i| tree.children(1, i).len()).collect();
    assert_eq!(sizes, vec![3, 4, 2]);
    assert_eq!(tree.level(1).weights, vec![3.0, 4.0, 2.0]);
    assert_eq!(tree.level(0).counts, vec![9]);
    assert_eq!(complexity_proxy(&tree).total, 126);
}

/// Check every level against a set computation on the leaves.
fn check_cover(cloud: &VoxelizedCloud, tree: &PartitionTree) {
    assert_eq!(tree.leaves().coords, cloud.coords);
    for l in 0..tree.block_levels() {
        let level = tree.level(l);
        let shift = level.bits / 3;
        let expected: BTreeSet<[u32; 3]> = cloud.coords.iter().map(|c| c.map(|v| v >> shift)).collect();
        let got: BTreeSet<[u32; 3]> = level.coords.iter().copied().collect();
        assert_eq!(got.len(), level.len(), "duplicate nodes at level {l}");
        assert_eq!(got, expected, "level {l}");

        let finer = tree.level(l + 1);
        let step = (level.bits - finer.bits) / 3;
        let mut covered = 0;
        for (i, &node) in level.coords.iter().enumerate() {
            let kids: Vec<usize> = (0..finer.len())
                .filter(|&k| finer.coords[k].map(|v| v >> step) == node)
                .collect();
            let run = tree.children(l, i);
            assert_eq!(
                kids,
                run.clone().collect::<Vec<_>>(),
                "children of node {i} at level {l}"
            );
            covered += run.len();

            let q: f64 = cloud
                .coords
                .iter()
                .zip(&cloud.weights)
                .filter(|(c, _)| c.map(|v| v >> shift) == node)
                .map(|(_, w)| w)
                .sum();
            assert!((level.weights[i] - q).abs() < 1e-9);
        }
        assert_eq!(covered, finer.len());
    }
}

#[test]
fn random_tree_invariants() {
    let cloud = common::random_cloud(4, 200, 3, true);
    for sizes in [vec![2, 2, 2, 2], vec![4, 4], vec![2, 8], vec![16]] {
        let tree = build_tree(&cloud, &BlockSchedule::new(sizes).unwrap()).unwrap();
        check_cover(&cloud, &tree);
        assert_eq!(tree.root_count(), 1);
    }
}

#[test]
fn partial_tree_keeps_several_roots() {
    let cloud = common::random_cloud(5, 300, 4, false);
    let tree = build_partial_tree(&cloud, &BlockSchedule::new(vec![4]).unwrap()).unwrap();
    check_cover(&cloud, &tree);
    assert!(tree.root_count() > 1);
}

#[test]
fn bad_schedules() {
    assert!(matches!(BlockSchedule::new(vec![3]), Err(Error::InvalidSchedule(_))));
    assert!(matches!(BlockSchedule::new(vec![]), Err(Error::InvalidSchedule(_))));
    let cloud = common::random_cloud(4, 20, 1, false);
    assert!(matches!(
        build_tree(&cloud, &BlockSchedule::new(vec![2, 2]).unwrap()),
        Err(Error::InvalidSchedule(_))
    ));
    let tree = build_tree(&cloud, &BlockSchedule::dyadic(4).unwrap()).unwrap();
    assert!(matches!(tree.level_blocks(4), Err(Error::LevelOutOfRange { .. })));
}

#[test]
fn leaf_first_shorthand() {
    let s = BlockSchedule::from_leaf_sizes(10, &[16]).unwrap();
    assert_eq!(s.sizes(), &[2, 2, 2, 2, 2, 2, 16]);
    let s = BlockSchedule::from_leaf_sizes(10, &[4, 8]).unwrap();
    assert_eq!(s.sizes(), &[2, 2, 2, 2, 2, 8, 4]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_is_conserved(n in 1usize..150, seed in 0u64..1000, sizes in prop::sample::select(vec![
        vec![2u32, 2, 2, 2, 2], vec![4, 8], vec![8, 4], vec![2, 16], vec![32],
    ])) {
        let cloud = common::random_cloud(5, n, seed, true);
        let tree = build_tree(&cloud, &BlockSchedule::new(sizes).unwrap()).unwrap();
        let total: f64 = cloud.weights.iter().sum();
        for level in tree.levels() {
            let s: f64 = level.weights.iter().sum();
            prop_assert!((s - total).abs() < 1e-9 * total);
            prop_assert_eq!(level.counts.iter().sum::<usize>(), cloud.len());
        }
    }
}
