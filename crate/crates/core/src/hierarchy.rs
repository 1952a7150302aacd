//! Nested octree-style partitions of a voxelized cloud.
//!
//! Level `L` holds the leaves (the cloud's voxels) and level `0` the
//! coarsest nodes. Going from level `l + 1` to level `l` drops a fixed number
//! of low Morton bits, so for a Morton-sorted cloud every parent's children
//! form a contiguous run and each level is built with one linear scan.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::io::VoxelizedCloud;
use crate::morton;

/// Block edge lengths `[b_1, .., b_L]`, root side first, leaf side last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSchedule {
    sizes: Vec<u32>,
}

impl BlockSchedule {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSchedule("schedule needs at least one level".into()));
        }
        if let Some(b) = sizes.iter().find(|b| **b < 2 || !b.is_power_of_two()) {
            return Err(Error::InvalidSchedule(format!(
                "block size {b} is not a power of two >= 2"
            )));
        }
        Ok(Self { sizes })
    }

    /// All-2 schedule reaching the root from depth `depth`.
    pub fn dyadic(depth: u32) -> Result<Self> {
        Self::new(vec![2; depth as usize])
    }

    /// Schedule with the given sizes at the leaf end (leaf first) and 2 elsewhere.
    ///
    /// `from_leaf_sizes(10, &[16])` is `[2, 2, 2, 2, 2, 2, 16]`.
    pub fn from_leaf_sizes(depth: u32, leaf_first: &[u32]) -> Result<Self> {
        let mut sizes: Vec<u32> = leaf_first.iter().rev().copied().collect();
        let used: u32 = sizes.iter().map(|b| b.trailing_zeros()).sum();
        if sizes.iter().any(|b| !b.is_power_of_two()) || used > depth {
            return Err(Error::InvalidSchedule(format!(
                "sizes {leaf_first:?} do not fit depth {depth}"
            )));
        }
        let mut full = vec![2; (depth - used) as usize];
        full.append(&mut sizes);
        Self::new(full)
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Number of block levels `L`.
    pub fn levels(&self) -> usize {
        self.sizes.len()
    }

    /// `log2` of the product of the sizes.
    pub fn total_bits(&self) -> u32 {
        self.sizes.iter().map(|b| b.trailing_zeros()).sum()
    }

    pub fn leaf_size(&self) -> u32 {
        *self.sizes.last().expect("schedule is nonempty")
    }

    /// Keep only the `levels` finest levels (early termination before the root).
    pub fn truncated(&self, levels: usize) -> Result<Self> {
        if levels == 0 || levels > self.sizes.len() {
            return Err(Error::InvalidSchedule(format!(
                "cannot keep {levels} of {} levels",
                self.sizes.len()
            )));
        }
        Self::new(self.sizes[self.sizes.len() - levels..].to_vec())
    }

    pub fn validate_for_depth(&self, depth: u32) -> Result<()> {
        if self.total_bits() != depth {
            return Err(Error::InvalidSchedule(format!(
                "product of block sizes is 2^{} but the cloud depth is {depth}",
                self.total_bits()
            )));
        }
        Ok(())
    }
}

/// One level of a [`PartitionTree`].
#[derive(Clone, Debug)]
pub struct Level {
    /// Low Morton bits dropped relative to the leaves.
    pub bits: u32,
    /// Node coordinates on this level's own integer grid.
    pub coords: Vec<[u32; 3]>,
    /// Sum of leaf weights below each node (`q`).
    pub weights: Vec<f64>,
    /// Number of leaves below each node (`n`).
    pub counts: Vec<usize>,
    /// Offsets of each node's children run in the next finer level
    /// (`M + 1` entries); empty on the leaf level.
    pub child_offsets: Vec<usize>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// A parent node together with the run of its children one level down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub parent: usize,
    pub children: Range<usize>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PartitionTree {
    depth: u32,
    levels: Vec<Level>,
}

/// Bits dropped from one axis after dropping `bits` low Morton bits.
#[inline]
fn axis_bits(bits: u32, axis: u32) -> u32 {
    (bits + 2 - axis) / 3
}

impl PartitionTree {
    /// Number of block levels `L` (the tree has `L + 1` node levels).
    pub fn block_levels(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Node level `l` in `0..=L`.
    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn leaves(&self) -> &Level {
        self.levels.last().expect("tree has a leaf level")
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Number of top-level nodes; 1 when the tree runs to a single root.
    pub fn root_count(&self) -> usize {
        self.levels[0].len()
    }

    pub fn children(&self, l: usize, node: usize) -> Range<usize> {
        let off = &self.levels[l].child_offsets;
        off[node]..off[node + 1]
    }

    /// Blocks of level `l` in Morton order of their parents.
    pub fn level_blocks(&self, l: usize) -> Result<Vec<Block>> {
        if l >= self.block_levels() {
            return Err(Error::LevelOutOfRange {
                level: l,
                levels: self.block_levels(),
            });
        }
        Ok(self.blocks_unchecked(l).collect())
    }

    pub(crate) fn blocks_unchecked(&self, l: usize) -> impl Iterator<Item = Block> + '_ {
        self.levels[l]
            .child_offsets
            .windows(2)
            .enumerate()
            .map(|(parent, w)| Block {
                parent,
                children: w[0]..w[1],
            })
    }

    /// Per-axis edge length of a level's grid cell, in leaf voxels.
    pub fn cell_size(&self, l: usize) -> [u32; 3] {
        let bits = self.levels[l].bits;
        [0, 1, 2].map(|a| 1 << axis_bits(bits, a))
    }

    /// Largest block (children count) per level.
    pub fn max_block_size(&self, l: usize) -> usize {
        self.blocks_unchecked(l).map(|b| b.len()).max().unwrap_or(0)
    }

    /// Tree whose levels drop the given numbers of Morton bits, leaf side last.
    fn from_bit_steps(cloud: &VoxelizedCloud, steps: &[u32]) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let codes: Vec<u64> = cloud.coords.iter().map(|&c| morton::encode(c)).collect();
        if codes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "cloud coordinates must be unique and Morton sorted".into(),
            ));
        }

        let leaf = Level {
            bits: 0,
            coords: cloud.coords.clone(),
            weights: cloud.weights.clone(),
            counts: vec![1; cloud.len()],
            child_offsets: Vec::new(),
        };
        let mut levels = vec![leaf];
        let mut level_codes = codes;
        let mut bits = 0;
        for &step in steps.iter().rev() {
            bits += step;
            let child = levels.last().expect("at least the leaf level");
            let mut parent = Level {
                bits,
                coords: Vec::new(),
                weights: Vec::new(),
                counts: Vec::new(),
                child_offsets: vec![0],
            };
            let mut parent_codes = Vec::new();
            for (k, &code) in level_codes.iter().enumerate() {
                let pc = code >> step;
                if parent_codes.last() != Some(&pc) {
                    if k > 0 {
                        parent.child_offsets.push(k);
                    }
                    parent_codes.push(pc);
                    parent.coords.push(
                        [0, 1, 2]
                            .map(|a| child.coords[k][a as usize] >> (axis_bits(bits, a) - axis_bits(bits - step, a))),
                    );
                    parent.weights.push(0.0);
                    parent.counts.push(0);
                }
                let p = parent_codes.len() - 1;
                parent.weights[p] += child.weights[k];
                parent.counts[p] += child.counts[k];
            }
            parent.child_offsets.push(level_codes.len());
            levels.push(parent);
            level_codes = parent_codes;
        }
        levels.reverse();
        Ok(Self {
            depth: cloud.depth,
            levels,
        })
    }
}

/// Build the full partition; the schedule must reach the root (`prod b = 2^J`).
pub fn build_tree(cloud: &VoxelizedCloud, schedule: &BlockSchedule) -> Result<PartitionTree> {
    schedule.validate_for_depth(cloud.depth)?;
    build_partial_tree(cloud, schedule)
}

/// Build a partition that may stop before the root, leaving several top nodes.
pub fn build_partial_tree(cloud: &VoxelizedCloud, schedule: &BlockSchedule) -> Result<PartitionTree> {
    if schedule.total_bits() > cloud.depth {
        return Err(Error::InvalidSchedule(format!(
            "schedule spans 2^{} but the cloud depth is {}",
            schedule.total_bits(),
            cloud.depth
        )));
    }
    let steps: Vec<u32> = schedule.sizes().iter().map(|b| 3 * b.trailing_zeros()).collect();
    PartitionTree::from_bit_steps(cloud, &steps)
}

/// Binary tree that merges x-neighbours, then y, then z, at every dyadic
/// level: the partition traversed by separable RAHT.
pub fn build_separable_tree(cloud: &VoxelizedCloud) -> Result<PartitionTree> {
    let steps = vec![1; 3 * cloud.depth as usize];
    PartitionTree::from_bit_steps(cloud, &steps)
}
