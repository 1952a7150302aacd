//! Forward and inverse multilevel transforms, with energy compaction stats.

use ragft::hierarchy::BlockSchedule;
use ragft::synthetic;
use ragft::transforms::{Backend, CoeffKind, SpectralConfig, TransformPlan};

fn main() -> ragft::Result<()> {
    let cloud = synthetic::blob_cloud(9, 50.0, 2.0, 1)?.to_yuv();
    let energy: f64 = cloud.attributes.iter().map(|v| v[0] * v[0]).sum();
    let backends = [
        Backend::Raht,
        Backend::RaGft(BlockSchedule::dyadic(9)?),
        Backend::RaGft(BlockSchedule::from_leaf_sizes(9, &[8])?),
        Backend::BlockGft(8),
    ];
    for backend in &backends {
        let plan = TransformPlan::for_backend(&cloud, backend, &SpectralConfig::default())?;
        let coeffs = plan.forward(&cloud.attributes)?;
        let back = plan.inverse(&coeffs.values)?;
        let err = back
            .iter()
            .zip(&cloud.attributes)
            .map(|(a, b)| (a[0] - b[0]).abs())
            .fold(0.0, f64::max);
        let ac: f64 = coeffs
            .values
            .iter()
            .zip(&coeffs.meta)
            .filter(|(_, m)| m.kind == CoeffKind::Ac)
            .map(|(v, _)| v[0] * v[0])
            .sum();
        println!(
            "{:>8} {:<22} DCs {:>5}  AC energy {:.3e} of {:.3e}  roundtrip error {err:.1e}",
            backend.name(),
            ragft::harness::schedule_label(backend),
            coeffs.dc_count(),
            ac,
            energy
        );
    }
    Ok(())
}
