//! Multilevel transforms built from block transforms over a partition tree.
//!
//! All three backends share one engine: for each level from the leaves up,
//! every block gathers its children's current DC values, applies its block
//! transform, emits the AC outputs and promotes the DC to the parent. They
//! differ only in the tree and in how block transforms are obtained:
//!
//! * RA-GFT: octree schedule, Q-normalized Laplacian eigenbasis per block.
//! * RAHT: binary x/y/z tree, closed-form two-point butterflies.
//! * block-GFT: one leaf-level octree step, DCs are not promoted further.
//!
//! Coefficients come out in canonical order: top-level DCs, then the ACs of
//! level 0, 1, .., L-1; within a level blocks follow parent Morton order and
//! each block's ACs follow ascending eigenvalue.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hierarchy::{build_partial_tree, build_separable_tree, build_tree, BlockSchedule, PartitionTree};
use crate::io::VoxelizedCloud;
use crate::spectral::{block_transform, build_block_graph, BlockTransform};

/// Graph construction parameters shared by all spectral blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConfig {
    /// Edge distance threshold on the children's integer grid.
    pub threshold: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { threshold: 3f64.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    RaGft(BlockSchedule),
    Raht,
    BlockGft(u32),
}

impl Backend {
    pub fn tag(&self) -> u8 {
        match self {
            Self::RaGft(_) => 0,
            Self::Raht => 1,
            Self::BlockGft(_) => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RaGft(_) => "ragft",
            Self::Raht => "raht",
            Self::BlockGft(_) => "blockgft",
        }
    }

    /// Block sizes, root side first; empty for RAHT.
    pub fn schedule_sizes(&self) -> Vec<u32> {
        match self {
            Self::RaGft(s) => s.sizes().to_vec(),
            Self::Raht => Vec::new(),
            Self::BlockGft(b) => vec![*b],
        }
    }
}

/// The partition tree a backend traverses.
pub fn tree_for_backend(cloud: &VoxelizedCloud, backend: &Backend) -> Result<PartitionTree> {
    match backend {
        Backend::RaGft(schedule) => build_tree(cloud, schedule),
        Backend::Raht => build_separable_tree(cloud),
        Backend::BlockGft(b) => build_partial_tree(cloud, &BlockSchedule::new(vec![*b])?),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffKind {
    Dc,
    Ac,
}

/// Where a coefficient came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffMeta {
    /// Block level that produced it (top-level DCs report 0).
    pub level: usize,
    /// Parent node index within the level (top-level DCs: node index).
    pub block: usize,
    /// Position within the block output; 0 is the DC.
    pub index: usize,
    /// Weight `q` of the node whose subband this is.
    pub weight: f64,
    pub kind: CoeffKind,
}

/// Transform coefficients of all three channels in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub values: Vec<[f64; 3]>,
    pub meta: Vec<CoeffMeta>,
}

impl CoefficientSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn channel(&self, ch: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[ch]).collect()
    }

    pub fn dc_count(&self) -> usize {
        self.meta.iter().filter(|m| m.kind == CoeffKind::Dc).count()
    }
}

/// A partition tree together with every block transform it needs.
///
/// Depends on geometry only, so the encoder and decoder build identical plans.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    tree: PartitionTree,
    /// `blocks[l][i]` transforms the children of node `i` at level `l`.
    blocks: Vec<Vec<BlockTransform>>,
    bridges: usize,
}

impl TransformPlan {
    /// Spectral block transforms for every block of `tree`.
    pub fn spectral(tree: PartitionTree, config: &SpectralConfig) -> Result<Self> {
        let mut blocks = Vec::with_capacity(tree.block_levels());
        let mut bridges = 0;
        for l in 0..tree.block_levels() {
            let child = tree.level(l + 1);
            let built: Vec<(BlockTransform, usize)> = tree
                .blocks_unchecked(l)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|b| {
                    let g = build_block_graph(
                        &child.coords[b.children.clone()],
                        &child.weights[b.children.clone()],
                        config.threshold,
                    );
                    let t = block_transform(&g).map_err(|e| match e {
                        Error::Eigensolver { .. } => Error::Eigensolver {
                            level: l,
                            block: b.parent,
                        },
                        other => other,
                    })?;
                    Ok((t, g.bridges))
                })
                .collect::<Result<_>>()?;
            bridges += built.iter().map(|(_, n)| n).sum::<usize>();
            blocks.push(built.into_iter().map(|(t, _)| t).collect());
        }
        Ok(Self { tree, blocks, bridges })
    }

    /// Closed-form butterflies on a binary tree (every block has 1 or 2 children).
    pub fn butterflies(tree: PartitionTree) -> Result<Self> {
        let mut blocks = Vec::with_capacity(tree.block_levels());
        for l in 0..tree.block_levels() {
            let w = &tree.level(l + 1).weights;
            let level = tree
                .blocks_unchecked(l)
                .map(|b| match b.len() {
                    1 => Ok(BlockTransform::identity(1)),
                    2 => Ok(BlockTransform::butterfly(w[b.children.start], w[b.children.start + 1])),
                    n => Err(Error::InvalidArgument(format!("butterfly block with {n} children"))),
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(level);
        }
        Ok(Self {
            tree,
            blocks,
            bridges: 0,
        })
    }

    pub fn for_backend(cloud: &VoxelizedCloud, backend: &Backend, config: &SpectralConfig) -> Result<Self> {
        let tree = tree_for_backend(cloud, backend)?;
        match backend {
            Backend::Raht => Self::butterflies(tree),
            _ => Self::spectral(tree, config),
        }
    }

    pub fn tree(&self) -> &PartitionTree {
        &self.tree
    }

    pub fn block(&self, level: usize, parent: usize) -> &BlockTransform {
        &self.blocks[level][parent]
    }

    /// Bridge edges added to connect otherwise disconnected block graphs.
    pub fn bridge_edges(&self) -> usize {
        self.bridges
    }

    pub fn len(&self) -> usize {
        self.tree.leaf_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Metadata for each coefficient position, derived from geometry alone.
    pub fn canonical_meta(&self) -> Vec<CoeffMeta> {
        let tree = &self.tree;
        let mut meta = Vec::with_capacity(tree.leaf_count());
        let top = tree.level(0);
        for (i, &weight) in top.weights.iter().enumerate() {
            meta.push(CoeffMeta {
                level: 0,
                block: i,
                index: 0,
                weight,
                kind: CoeffKind::Dc,
            });
        }
        for l in 0..tree.block_levels() {
            let weights = &tree.level(l).weights;
            for b in tree.blocks_unchecked(l) {
                for index in 1..b.len() {
                    meta.push(CoeffMeta {
                        level: l,
                        block: b.parent,
                        index,
                        weight: weights[b.parent],
                        kind: CoeffKind::Ac,
                    });
                }
            }
        }
        meta
    }

    pub fn forward(&self, attributes: &[[f64; 3]]) -> Result<CoefficientSet> {
        let tree = &self.tree;
        if attributes.len() != tree.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: tree.leaf_count(),
                found: attributes.len(),
            });
        }
        let mut current = attributes.to_vec();
        let mut acs: Vec<Vec<[f64; 3]>> = vec![Vec::new(); tree.block_levels()];
        for l in (0..tree.block_levels()).rev() {
            let transforms = &self.blocks[l];
            let outputs: Vec<Vec<[f64; 3]>> = tree
                .blocks_unchecked(l)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|b| apply_forward(&transforms[b.parent], &current[b.children]))
                .collect();
            let mut next = Vec::with_capacity(outputs.len());
            let level_acs = &mut acs[l];
            for out in outputs {
                next.push(out[0]);
                level_acs.extend_from_slice(&out[1..]);
            }
            current = next;
        }
        let mut values = current;
        for level in acs {
            values.extend(level);
        }
        Ok(CoefficientSet {
            values,
            meta: self.canonical_meta(),
        })
    }

    /// Inverse from coefficient values in canonical order.
    pub fn inverse(&self, values: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
        let tree = &self.tree;
        if values.len() != tree.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: tree.leaf_count(),
                found: values.len(),
            });
        }
        let roots = tree.root_count();
        let mut current = values[..roots].to_vec();
        let mut offset = roots;
        for l in 0..tree.block_levels() {
            let transforms = &self.blocks[l];
            let blocks: Vec<_> = tree.blocks_unchecked(l).collect();
            let mut starts = Vec::with_capacity(blocks.len());
            for b in &blocks {
                starts.push(offset);
                offset += b.len() - 1;
            }
            let outputs: Vec<Vec<[f64; 3]>> = blocks
                .into_par_iter()
                .zip(starts)
                .map(|(b, start)| {
                    let n = b.len();
                    let mut input = Vec::with_capacity(n);
                    input.push(current[b.parent]);
                    input.extend_from_slice(&values[start..start + n - 1]);
                    apply_inverse(&transforms[b.parent], &input)
                })
                .collect();
            current = outputs.into_iter().flatten().collect();
        }
        Ok(current)
    }
}

fn apply_forward(t: &BlockTransform, input: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let n = input.len();
    let mut out = vec![[0.0; 3]; n];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for ch in 0..3 {
        for (xi, v) in x.iter_mut().zip(input) {
            *xi = v[ch];
        }
        t.forward_into(&x, &mut y);
        for (o, yi) in out.iter_mut().zip(&y) {
            o[ch] = *yi;
        }
    }
    out
}

fn apply_inverse(t: &BlockTransform, input: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let n = input.len();
    let mut out = vec![[0.0; 3]; n];
    let mut y = vec![0.0; n];
    let mut x = vec![0.0; n];
    for ch in 0..3 {
        for (yi, v) in y.iter_mut().zip(input) {
            *yi = v[ch];
        }
        t.inverse_into(&y, &mut x);
        for (o, xi) in out.iter_mut().zip(&x) {
            o[ch] = *xi;
        }
    }
    out
}

pub fn ragft_forward(cloud: &VoxelizedCloud, tree: &PartitionTree, config: &SpectralConfig) -> Result<CoefficientSet> {
    TransformPlan::spectral(tree.clone(), config)?.forward(&cloud.attributes)
}

pub fn ragft_inverse(coeffs: &CoefficientSet, tree: &PartitionTree, config: &SpectralConfig) -> Result<Vec<[f64; 3]>> {
    TransformPlan::spectral(tree.clone(), config)?.inverse(&coeffs.values)
}

pub fn raht_forward(cloud: &VoxelizedCloud) -> Result<CoefficientSet> {
    TransformPlan::butterflies(build_separable_tree(cloud)?)?.forward(&cloud.attributes)
}

/// `geometry` supplies coordinates and weights; its attributes are ignored.
pub fn raht_inverse(coeffs: &CoefficientSet, geometry: &VoxelizedCloud) -> Result<Vec<[f64; 3]>> {
    TransformPlan::butterflies(build_separable_tree(geometry)?)?.inverse(&coeffs.values)
}

pub fn blockgft_forward(cloud: &VoxelizedCloud, block: u32, config: &SpectralConfig) -> Result<CoefficientSet> {
    TransformPlan::for_backend(cloud, &Backend::BlockGft(block), config)?.forward(&cloud.attributes)
}

pub fn blockgft_inverse(
    coeffs: &CoefficientSet,
    geometry: &VoxelizedCloud,
    block: u32,
    config: &SpectralConfig,
) -> Result<Vec<[f64; 3]>> {
    TransformPlan::for_backend(geometry, &Backend::BlockGft(block), config)?.inverse(&coeffs.values)
}
