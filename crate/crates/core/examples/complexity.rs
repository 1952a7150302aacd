//! Cubic block-size complexity proxy for several schedules.

use ragft::harness::complexity_proxy;
use ragft::hierarchy::BlockSchedule;
use ragft::synthetic;
use ragft::transforms::{tree_for_backend, Backend};

fn main() -> ragft::Result<()> {
    let radius: f64 = std::env::args()
        .nth(1)
        .map(|r| r.parse().expect("radius"))
        .unwrap_or(73.0);
    let cloud = synthetic::blob_cloud(10, radius, 0.0, 1)?;
    println!("{} points", cloud.len());
    let mut backends: Vec<Backend> = [2, 4, 8, 16]
        .into_iter()
        .map(|b| BlockSchedule::from_leaf_sizes(10, &[b]).map(Backend::RaGft))
        .collect::<ragft::Result<_>>()?;
    backends.extend([Backend::BlockGft(8), Backend::BlockGft(16), Backend::Raht]);
    for backend in &backends {
        let report = complexity_proxy(&tree_for_backend(&cloud, backend)?);
        println!(
            "{:>8} {:<22} K/N = {:>10.2}",
            backend.name(),
            ragft::harness::schedule_label(backend),
            report.per_point()
        );
    }
    Ok(())
}
