//! Deterministic synthetic clouds for tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::io::VoxelizedCloud;

/// `n` distinct random voxels at `depth` with random RGB attributes.
pub fn random_cloud(depth: u32, n: usize, seed: u64) -> Result<VoxelizedCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 1u32 << depth;
    let capacity = (side as usize).pow(3);
    let n = n.min(capacity);
    let mut seen = std::collections::HashSet::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    while coords.len() < n {
        let c = [
            rng.random_range(0..side),
            rng.random_range(0..side),
            rng.random_range(0..side),
        ];
        if seen.insert(c) {
            coords.push(c);
        }
    }
    let attributes = (0..n)
        .map(|_| [0; 3].map(|_: u8| f64::from(rng.random_range(0..=255u8))))
        .collect();
    VoxelizedCloud::from_parts(depth, coords, attributes, vec![1.0; n])
}

/// Closed, gently deformed spherical shell of radius `radius` voxels centred
/// in a `2^depth` grid, one voxel thick.
///
/// Colors are smooth functions of position plus uniform noise of amplitude
/// `noise`, rounded to 8 bits. About `4 pi radius^2` points.
pub fn blob_cloud(depth: u32, radius: f64, noise: f64, seed: u64) -> Result<VoxelizedCloud> {
    let side = f64::from(1u32 << depth);
    let center = side / 2.0;
    let r_max = radius * 1.15;
    assert!(r_max < center, "blob does not fit the grid");
    let n_theta = (2.0 * std::f64::consts::PI * r_max * 3.0).ceil() as usize;
    let n_phi = (std::f64::consts::PI * r_max * 3.0).ceil() as usize;

    let mut coords = Vec::new();
    for i in 0..n_phi {
        let phi = std::f64::consts::PI * (i as f64 + 0.5) / n_phi as f64;
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            let r = radius * (1.0 + 0.15 * (3.0 * theta).sin() * (2.0 * phi).cos());
            let p = [
                center + r * phi.sin() * theta.cos(),
                center + r * phi.sin() * theta.sin(),
                center + r * phi.cos(),
            ];
            coords.push(p.map(|v| v.floor() as u32));
        }
    }
    coords.sort_unstable();
    coords.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attributes: Vec<[f64; 3]> = coords
        .iter()
        .map(|c| {
            let [x, y, z] = c.map(|v| (f64::from(v) - center) / radius);
            let base = [
                128.0 + 90.0 * (2.1 * x + 0.7 * z).sin(),
                128.0 + 80.0 * (1.7 * y - 1.3 * x).cos(),
                128.0 + 70.0 * (2.5 * z + 0.9 * y).sin(),
            ];
            base.map(|v| {
                let jitter = if noise > 0.0 {
                    rng.random_range(-noise..=noise)
                } else {
                    0.0
                };
                (v + jitter).round().clamp(0.0, 255.0)
            })
        })
        .collect();
    let n = coords.len();
    VoxelizedCloud::from_parts(depth, coords, attributes, vec![1.0; n])
}

/// Same geometry as `cloud`, every point colored `rgb`.
pub fn constant_colors(cloud: &VoxelizedCloud, rgb: [f64; 3]) -> VoxelizedCloud {
    VoxelizedCloud {
        attributes: vec![rgb; cloud.len()],
        ..cloud.clone()
    }
}
