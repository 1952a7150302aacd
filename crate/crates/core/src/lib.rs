//! Point cloud color compression with the region adaptive graph Fourier
//! transform (RA-GFT), plus RAHT and block-GFT baselines.
//!
//! ```text
//! PLY -> voxelize -> RGB->YUV -> partition tree -> block transforms
//!     -> uniform quantization -> RLGR -> bitstream
//! ```
//!
//! Geometry is assumed to reach the decoder losslessly by other means; only
//! attributes are coded. Every backend is an orthonormal transform, so
//! squared error in the coefficient domain equals squared error in the
//! attribute domain.
//!
//! ```no_run
//! use ragft::{coding, hierarchy::BlockSchedule, io, transforms::{Backend, SpectralConfig}};
//!
//! let raw = io::read_ply("frame.ply")?;
//! let cloud = io::voxelize(&raw, 10)?.to_yuv();
//! let backend = Backend::RaGft(BlockSchedule::from_leaf_sizes(10, &[16])?);
//! let stream = coding::encode(&cloud, &backend, 8.0, &SpectralConfig::default())?;
//! let yuv = coding::decode(&stream, &cloud)?;
//! # Ok::<(), ragft::Error>(())
//! ```

pub mod coding;
pub mod error;
pub mod harness;
pub mod hierarchy;
pub mod io;
pub mod morton;
pub mod spectral;
pub mod synthetic;
pub mod transforms;

pub use error::{Error, Result};
