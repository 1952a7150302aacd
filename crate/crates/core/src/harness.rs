//! Evaluation: PSNR-Y, bits per voxel, the cubic complexity proxy and
//! rate-distortion sweeps with CSV output.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{decode_with_plan, encode_with_plan};
use crate::error::{Error, Result};
use crate::hierarchy::PartitionTree;
use crate::io::VoxelizedCloud;
use crate::transforms::{Backend, SpectralConfig, TransformPlan};

/// Column order of [`write_csv`]; bump [`CSV_SCHEMA`] when it changes.
pub const CSV_COLUMNS: [&str; 8] = [
    "schema", "backend", "schedule", "step", "bits", "points", "rate_bpv", "psnr_y",
];
pub const CSV_SCHEMA: u32 = 1;

/// PSNR of the Y channel averaged over frames.
///
/// Returns `f64::INFINITY` for lossless reconstruction.
pub fn psnr_y(originals: &[Vec<f64>], decoded: &[Vec<f64>]) -> Result<f64> {
    if originals.len() != decoded.len() || originals.is_empty() {
        return Err(Error::LengthMismatch {
            expected: originals.len(),
            found: decoded.len(),
        });
    }
    let mut acc = 0.0;
    for (y, yhat) in originals.iter().zip(decoded) {
        if y.len() != yhat.len() || y.is_empty() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                found: yhat.len(),
            });
        }
        let sse: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
        acc += sse / (255.0 * 255.0 * y.len() as f64);
    }
    let mse = acc / originals.len() as f64;
    Ok(if mse == 0.0 { f64::INFINITY } else { -10.0 * mse.log10() })
}

/// Total bits over total points.
pub fn rate_bpv(bits: &[usize], counts: &[usize]) -> Result<f64> {
    let points: usize = counts.iter().sum();
    if bits.is_empty() || points == 0 {
        return Err(Error::InvalidArgument("rate needs at least one nonempty frame".into()));
    }
    Ok(bits.iter().sum::<usize>() as f64 / points as f64)
}

/// Sum of cubed block sizes of one tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub points: usize,
    /// `K`, summed over all block levels.
    pub total: u128,
    /// Contribution of each block level, root side first.
    pub per_level: Vec<u128>,
}

impl ComplexityReport {
    /// `K / N` for this tree alone.
    pub fn per_point(&self) -> f64 {
        self.total as f64 / self.points as f64
    }

    /// `sum K / sum N` over several clouds.
    pub fn aggregate(reports: &[ComplexityReport]) -> f64 {
        let k: u128 = reports.iter().map(|r| r.total).sum();
        let n: usize = reports.iter().map(|r| r.points).sum();
        k as f64 / n as f64
    }
}

pub fn complexity_proxy(tree: &PartitionTree) -> ComplexityReport {
    let per_level: Vec<u128> = (0..tree.block_levels())
        .map(|l| {
            tree.level(l)
                .child_offsets
                .windows(2)
                .map(|w| (w[1] - w[0]) as u128)
                .map(|n| n * n * n)
                .sum()
        })
        .collect();
    ComplexityReport {
        points: tree.leaf_count(),
        total: per_level.iter().sum(),
        per_level,
    }
}

/// One point of a rate-distortion curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdPoint {
    pub schema: u32,
    pub backend: String,
    pub schedule: String,
    pub step: f64,
    pub bits: usize,
    pub points: usize,
    pub rate_bpv: f64,
    pub psnr_y: f64,
}

pub fn schedule_label(backend: &Backend) -> String {
    match backend {
        Backend::Raht => "2x2x2-separable".into(),
        other => other
            .schedule_sizes()
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("-"),
    }
}

/// Encode and decode every frame at every step.
///
/// Frames carry YUV attributes. Transform plans are built once per frame and
/// shared by the encoder and decoder at every step.
pub fn rd_sweep(
    frames: &[VoxelizedCloud],
    backend: &Backend,
    steps: &[f64],
    config: &SpectralConfig,
) -> Result<Vec<RdPoint>> {
    if frames.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let plans: Vec<TransformPlan> = frames
        .par_iter()
        .map(|f| TransformPlan::for_backend(f, backend, config))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(steps.len());
    for &step in steps {
        let per_frame: Vec<(usize, Vec<f64>)> = frames
            .par_iter()
            .zip(&plans)
            .map(|(frame, plan)| {
                let stream = encode_with_plan(plan, &frame.attributes, backend, frame.depth, step, config)?;
                let decoded = decode_with_plan(&stream, plan)?;
                Ok((stream.bits(), decoded.iter().map(|v| v[0]).collect()))
            })
            .collect::<Result<_>>()?;
        let bits: Vec<usize> = per_frame.iter().map(|(b, _)| *b).collect();
        let counts: Vec<usize> = frames.iter().map(VoxelizedCloud::len).collect();
        let originals: Vec<Vec<f64>> = frames
            .iter()
            .map(|f| f.attributes.iter().map(|v| v[0]).collect())
            .collect();
        let decoded: Vec<Vec<f64>> = per_frame.into_iter().map(|(_, y)| y).collect();
        points.push(RdPoint {
            schema: CSV_SCHEMA,
            backend: backend.name().into(),
            schedule: schedule_label(backend),
            step,
            bits: bits.iter().sum(),
            points: counts.iter().sum(),
            rate_bpv: rate_bpv(&bits, &counts)?,
            psnr_y: psnr_y(&originals, &decoded)?,
        });
    }
    Ok(points)
}

pub fn write_csv<W: Write>(points: &[RdPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// PSNR of `curve` at `rate`, by linear interpolation in rate (extrapolating
/// from the end segments). `curve` needs at least two points.
pub fn psnr_at_rate(curve: &[RdPoint], rate: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.rate_bpv, p.psnr_y)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 2 {
        return None;
    }
    let seg = pts.windows(2).position(|w| rate <= w[1].0).unwrap_or(pts.len() - 2);
    let (r0, p0) = pts[seg];
    let (r1, p1) = pts[seg + 1];
    Some(p0 + (p1 - p0) * (rate - r0) / (r1 - r0))
}
