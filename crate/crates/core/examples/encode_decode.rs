//! Encode a PLY's colors, write the stream, decode it against the geometry.
//!
//! ```bash
//! cargo run --release -p ragft --example encode_decode -- [input.ply] [step]
//! ```

use ragft::coding::{self, Bitstream};
use ragft::hierarchy::BlockSchedule;
use ragft::transforms::{Backend, SpectralConfig};
use ragft::{harness, io, synthetic};

fn main() -> ragft::Result<()> {
    let mut args = std::env::args().skip(1);
    let depth = 10;
    let cloud = match args.next() {
        Some(path) => io::voxelize(&io::read_ply(path)?, depth)?,
        None => synthetic::blob_cloud(depth, 48.0, 3.0, 1)?,
    }
    .to_yuv();
    let step: f64 = args.next().map(|s| s.parse().expect("step")).unwrap_or(8.0);

    let backend = Backend::RaGft(BlockSchedule::from_leaf_sizes(depth, &[8])?);
    let stream = coding::encode(&cloud, &backend, step, &SpectralConfig::default())?;
    let path = std::env::temp_dir().join("ragft_example.bin");
    std::fs::write(&path, stream.to_bytes())?;

    let read = Bitstream::from_bytes(&std::fs::read(&path)?)?;
    let decoded = coding::decode(&read, &cloud)?;
    let y = |v: &[[f64; 3]]| v.iter().map(|c| c[0]).collect::<Vec<_>>();
    let psnr = harness::psnr_y(&[y(&cloud.attributes)], &[y(&decoded)])?;
    println!(
        "{} points, step {step}: {} bytes ({:.3} bpv), PSNR-Y {psnr:.2} dB",
        cloud.len(),
        read.byte_len(),
        read.bits() as f64 / cloud.len() as f64
    );

    let rgb = cloud.with_attributes(decoded)?.to_rgb().to_raw();
    io::write_ply(
        &rgb,
        std::env::temp_dir().join("ragft_example.ply"),
        io::PlyFormat::BinaryLittleEndian,
    )?;
    Ok(())
}
