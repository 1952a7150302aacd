//! Build partition trees for a few schedules and print their level sizes.

use ragft::hierarchy::{build_separable_tree, build_tree, BlockSchedule};
use ragft::synthetic;

fn main() -> ragft::Result<()> {
    let cloud = synthetic::blob_cloud(9, 50.0, 0.0, 1)?;
    println!("{} voxels at depth {}", cloud.len(), cloud.depth);

    for leaf in [vec![2], vec![4], vec![8], vec![16], vec![4, 8]] {
        let schedule = BlockSchedule::from_leaf_sizes(cloud.depth, &leaf)?;
        let tree = build_tree(&cloud, &schedule)?;
        let nodes: Vec<usize> = tree.levels().iter().map(|l| l.len()).collect();
        let widest = (0..tree.block_levels())
            .map(|l| tree.max_block_size(l))
            .max()
            .unwrap_or(1);
        println!(
            "sizes {:?}: nodes per level {nodes:?}, largest block {widest}",
            schedule.sizes()
        );
    }

    let sep = build_separable_tree(&cloud)?;
    println!("separable tree: {} binary levels", sep.block_levels());
    Ok(())
}
