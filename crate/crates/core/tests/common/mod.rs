#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ragft::io::VoxelizedCloud;
use ragft::transforms::{CoeffKind, CoefficientSet, TransformPlan};

/// The nine-leaf, three-parent tree: groups of 3, 4 and 2 leaves under one root
/// when built with schedule `[2, 2]` at depth 2.
pub fn nine_leaf_cloud() -> VoxelizedCloud {
    let coords = vec![
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [2, 0, 0],
        [3, 0, 0],
        [2, 1, 0],
        [3, 1, 0],
        [0, 2, 0],
        [1, 2, 0],
    ];
    VoxelizedCloud::from_parts(2, coords, vec![[1.0; 3]; 9], vec![1.0; 9]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random cloud with real-valued attributes and optional random weights.
pub fn random_cloud(depth: u32, n: usize, seed: u64, random_weights: bool) -> VoxelizedCloud {
    let base = ragft::synthetic::random_cloud(depth, n, seed).unwrap();
    let mut r = rng(seed ^ 0x5eed);
    let attributes = (0..base.len())
        .map(|_| {
            [
                r.random_range(-100.0..100.0),
                r.random_range(0.0..255.0),
                r.random_range(-1.0..1.0),
            ]
        })
        .collect();
    let weights = (0..base.len())
        .map(|_| if random_weights { r.random_range(0.5..4.0) } else { 1.0 })
        .collect();
    VoxelizedCloud::from_parts(depth, base.coords, attributes, weights).unwrap()
}

/// Dense `N x N` transform assembled level by level as a product of
/// block-diagonal, permuted per-level matrices, plus the slot (row of the
/// dense output) holding each canonical coefficient.
///
/// Every node owns the slot of its first descendant leaf. A block reads its
/// children's slots, writes its DC into the first child's slot (which is the
/// parent's slot) and its ACs into the remaining children's slots.
pub fn explicit_transform(plan: &TransformPlan) -> (DMatrix<f64>, Vec<usize>) {
    let tree = plan.tree();
    let n = tree.leaf_count();
    let levels = tree.block_levels();

    let mut first_leaf: Vec<Vec<usize>> = vec![Vec::new(); levels + 1];
    first_leaf[levels] = (0..n).collect();
    for l in (0..levels).rev() {
        first_leaf[l] = (0..tree.level(l).len())
            .map(|i| first_leaf[l + 1][tree.children(l, i).start])
            .collect();
    }

    let mut total = DMatrix::<f64>::identity(n, n);
    for l in 0..levels {
        let mut t = DMatrix::<f64>::identity(n, n);
        for i in 0..tree.level(l).len() {
            let kids = tree.children(l, i);
            let slots: Vec<usize> = kids.clone().map(|c| first_leaf[l + 1][c]).collect();
            let basis = plan.block(l, i);
            for (k, &sk) in slots.iter().enumerate() {
                for (j, &sj) in slots.iter().enumerate() {
                    t[(sk, sj)] = basis.row(k)[j];
                }
            }
        }
        // T = T_0 T_1 ... T_{L-1}
        total *= t;
    }

    let mut slots = first_leaf[0].clone();
    for l in 0..levels {
        for i in 0..tree.level(l).len() {
            let kids = tree.children(l, i);
            for k in 1..kids.len() {
                slots.push(first_leaf[l + 1][kids.start + k]);
            }
        }
    }
    (total, slots)
}

/// Apply the dense oracle to one channel and return coefficients in canonical order.
pub fn dense_forward(t: &DMatrix<f64>, slots: &[usize], signal: &[f64]) -> Vec<f64> {
    let out = t * DVector::from_column_slice(signal);
    slots.iter().map(|&s| out[s]).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn channel(values: &[[f64; 3]], ch: usize) -> Vec<f64> {
    values.iter().map(|v| v[ch]).collect()
}

pub fn ac_values(c: &CoefficientSet, ch: usize) -> Vec<f64> {
    c.values
        .iter()
        .zip(&c.meta)
        .filter(|(_, m)| m.kind == CoeffKind::Ac)
        .map(|(v, _)| v[ch])
        .collect()
}

/// `max |Phi^T Phi - I|` over one block.
pub fn orthonormality_error(t: &ragft::spectral::BlockTransform) -> f64 {
    let b = t.basis_matrix();
    let g = &b * b.transpose();
    let n = t.len();
    (g - DMatrix::<f64>::identity(n, n)).abs().max()
}

/// Fixed 50-point cloud behind the golden bitstream (YUV attributes).
pub fn golden_cloud() -> VoxelizedCloud {
    let coords: Vec<[u32; 3]> = (0..50u64).map(|i| ragft::morton::decode((i * 97) % 4096)).collect();
    let rgb: Vec<[u8; 3]> = (0..50u32)
        .map(|i| {
            [
                (i * 53 % 256) as u8,
                ((i * 91 + 7) % 256) as u8,
                ((i * 29 + 100) % 256) as u8,
            ]
        })
        .collect();
    VoxelizedCloud::from_parts(4, coords, ragft::io::rgb_to_yuv(&rgb), vec![1.0; 50]).unwrap()
}

pub fn golden_backend() -> ragft::transforms::Backend {
    ragft::transforms::Backend::RaGft(ragft::hierarchy::BlockSchedule::from_leaf_sizes(4, &[4]).unwrap())
}

pub const GOLDEN_STEP: f64 = 10.0;

pub fn golden_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden_50_step10.bin")
}

/// Encode the golden cloud; with `RAGFT_BLESS=1` also rewrite the fixture.
pub fn golden_check() -> Result<(), String> {
    let stream = ragft::coding::encode(&golden_cloud(), &golden_backend(), GOLDEN_STEP, &Default::default())
        .map_err(|e| e.to_string())?
        .to_bytes();
    let path = golden_path();
    if std::env::var_os("RAGFT_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, &stream).map_err(|e| e.to_string())?;
    }
    let frozen = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if frozen == stream {
        Ok(())
    } else {
        Err(format!(
            "stream differs from fixture ({} vs {} bytes)",
            stream.len(),
            frozen.len()
        ))
    }
}
