//! Write a cloud as ASCII and binary PLY, read both back and voxelize.
//!
//! ```bash
//! cargo run -p ragft --example ply_roundtrip -- [input.ply]
//! ```

use ragft::io::{self, PlyFormat, RawCloud};
use ragft::synthetic;

fn main() -> ragft::Result<()> {
    let raw = match std::env::args().nth(1) {
        Some(path) => io::read_ply(path)?,
        None => synthetic::blob_cloud(8, 40.0, 3.0, 1)?.to_raw(),
    };
    let dir = std::env::temp_dir();
    for (name, format) in [("ascii", PlyFormat::Ascii), ("binary", PlyFormat::BinaryLittleEndian)] {
        let path = dir.join(format!("ragft_roundtrip_{name}.ply"));
        io::write_ply(&raw, &path, format)?;
        let back: RawCloud = io::read_ply(&path)?;
        println!(
            "{name:>6}: {} points, {} bytes, identical: {}",
            back.len(),
            std::fs::metadata(&path)?.len(),
            back == raw
        );
    }

    for depth in [6, 8, 10] {
        let v = io::voxelize(&raw, depth)?;
        println!("depth {depth:>2}: {} voxels ({} merged)", v.len(), raw.len() - v.len());
    }
    Ok(())
}
