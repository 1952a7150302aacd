//! Rate-distortion curves of RAHT and RA-GFT on a synthetic smooth cloud.
//!
//! ```bash
//! cargo run --release -p ragft --example rd_sweep -- [radius] [out.csv]
//! ```

use std::time::Instant;

use ragft::harness::{self, psnr_at_rate};
use ragft::hierarchy::BlockSchedule;
use ragft::synthetic;
use ragft::transforms::{Backend, SpectralConfig};

fn main() -> ragft::Result<()> {
    let mut args = std::env::args().skip(1);
    let radius: f64 = args.next().map(|r| r.parse().expect("radius")).unwrap_or(64.0);
    let out = args.next();

    let depth = 10;
    let cloud = synthetic::blob_cloud(depth, radius, 4.0, 1)?.to_yuv();
    println!("{} points", cloud.len());

    let steps = [64.0, 32.0, 16.0, 8.0, 4.0];
    let config = SpectralConfig::default();
    let mut all = Vec::new();
    let backends = [
        Backend::Raht,
        Backend::RaGft(BlockSchedule::from_leaf_sizes(depth, &[2])?),
        Backend::RaGft(BlockSchedule::from_leaf_sizes(depth, &[16])?),
        Backend::BlockGft(16),
    ];
    for backend in &backends {
        let t = Instant::now();
        let curve = harness::rd_sweep(std::slice::from_ref(&cloud), backend, &steps, &config)?;
        println!(
            "{} {} ({:.1?})",
            backend.name(),
            harness::schedule_label(backend),
            t.elapsed()
        );
        for p in &curve {
            println!("  step {:>5}: {:.4} bpv  {:.3} dB", p.step, p.rate_bpv, p.psnr_y);
        }
        all.push(curve);
    }

    let raht = &all[0];
    for (backend, curve) in backends.iter().zip(&all).skip(1) {
        let gains: Vec<String> = raht
            .iter()
            .map(|p| format!("{:+.2}", psnr_at_rate(curve, p.rate_bpv).unwrap_or(f64::NAN) - p.psnr_y))
            .collect();
        println!(
            "{} {} gain over RAHT at RAHT rates: {}",
            backend.name(),
            harness::schedule_label(backend),
            gains.join(" ")
        );
    }

    if let Some(path) = out {
        let rows: Vec<_> = all.into_iter().flatten().collect();
        harness::write_csv(&rows, std::fs::File::create(path)?)?;
    }
    Ok(())
}
