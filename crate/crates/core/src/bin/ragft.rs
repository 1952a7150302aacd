use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ragft::coding::{self, Bitstream};
use ragft::harness::{self, ComplexityReport};
use ragft::hierarchy::BlockSchedule;
use ragft::io::{self, PlyFormat, RawCloud, VoxelizedCloud};
use ragft::transforms::{self, Backend, SpectralConfig, TransformPlan};
use ragft::Error;

#[derive(Parser)]
#[command(name = "ragft", version, about = "Point cloud color codec (RA-GFT, RAHT, block-GFT)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Ragft,
    Raht,
    Blockgft,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ascii,
    Binary,
}

#[derive(clap::Args)]
struct TransformArgs {
    #[arg(long, value_enum, default_value = "ragft")]
    backend: BackendArg,
    /// Block sizes from the leaf level upward (b_L,b_{L-1},..); omitted levels are 2.
    /// For blockgft the first value is the block size.
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<u32>,
    /// Edge distance threshold on the children's grid.
    #[arg(long, default_value_t = 3f64.sqrt())]
    threshold: f64,
    #[arg(long, default_value_t = 10)]
    depth: u32,
}

impl TransformArgs {
    fn backend(&self) -> ragft::Result<Backend> {
        Ok(match self.backend {
            BackendArg::Ragft => {
                let leaf = if self.blocks.is_empty() {
                    vec![2]
                } else {
                    self.blocks.clone()
                };
                Backend::RaGft(BlockSchedule::from_leaf_sizes(self.depth, &leaf)?)
            }
            BackendArg::Raht => Backend::Raht,
            BackendArg::Blockgft => Backend::BlockGft(self.blocks.first().copied().unwrap_or(8)),
        })
    }

    fn config(&self) -> SpectralConfig {
        SpectralConfig {
            threshold: self.threshold,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Voxelize a PLY onto a 2^depth grid.
    Voxelize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
    },
    /// Compress the colors of a PLY.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct colors from a stream and a geometry PLY.
    Decode {
        #[arg(long)]
        input: PathBuf,
        /// PLY supplying coordinates; its colors, if any, are ignored.
        #[arg(long)]
        geometry: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
    },
    /// Rate-distortion sweep over one or more frames, written as CSV.
    Sweep {
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(long, value_delimiter = ',', default_value = "64,32,16,8,4")]
        steps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cubic block-size complexity proxy over one or more frames.
    Complexity {
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        transform: TransformArgs,
    },
}

fn load(path: &PathBuf, depth: u32) -> ragft::Result<VoxelizedCloud> {
    Ok(io::voxelize(&io::read_ply(path)?, depth)?.to_yuv())
}

fn ply_format(f: FormatArg) -> PlyFormat {
    match f {
        FormatArg::Ascii => PlyFormat::Ascii,
        FormatArg::Binary => PlyFormat::BinaryLittleEndian,
    }
}

fn run(cli: Cli) -> ragft::Result<()> {
    match cli.command {
        Command::Voxelize {
            input,
            depth,
            out,
            format,
        } => {
            let v = io::voxelize(&io::read_ply(&input)?, depth)?;
            io::write_ply(&v.to_raw(), &out, ply_format(format))?;
            eprintln!("{} voxels at depth {depth}", v.len());
        }
        Command::Encode {
            input,
            transform,
            step,
            out,
        } => {
            let cloud = load(&input, transform.depth)?;
            let (backend, config) = (transform.backend()?, transform.config());
            let plan = TransformPlan::for_backend(&cloud, &backend, &config)?;
            let stream = coding::encode_with_plan(&plan, &cloud.attributes, &backend, cloud.depth, step, &config)?;
            fs::write(&out, stream.to_bytes())?;
            eprintln!(
                "{} points, {} bytes, {:.4} bpv, {} bridge edges",
                cloud.len(),
                stream.byte_len(),
                stream.bits() as f64 / cloud.len() as f64,
                plan.bridge_edges()
            );
        }
        Command::Decode {
            input,
            geometry,
            out,
            format,
        } => {
            let stream = Bitstream::from_bytes(&fs::read(&input)?)?;
            let positions = io::read_ply_positions(&geometry)?;
            let n = positions.len();
            let raw = RawCloud::new(positions, vec![[0; 3]; n])?;
            let geom = io::voxelize(&raw, stream.header.depth)?;
            let yuv = coding::decode(&stream, &geom)?;
            let decoded = geom.with_attributes(yuv)?.to_rgb();
            io::write_ply(&decoded.to_raw(), &out, ply_format(format))?;
        }
        Command::Sweep {
            input,
            transform,
            steps,
            out,
        } => {
            let frames = input
                .iter()
                .map(|p| load(p, transform.depth))
                .collect::<ragft::Result<Vec<_>>>()?;
            let points = harness::rd_sweep(&frames, &transform.backend()?, &steps, &transform.config())?;
            match out {
                Some(path) => harness::write_csv(&points, fs::File::create(path)?)?,
                None => harness::write_csv(&points, std::io::stdout().lock())?,
            }
        }
        Command::Complexity { input, transform } => {
            let backend = transform.backend()?;
            let mut reports = Vec::new();
            for path in &input {
                let cloud = load(path, transform.depth)?;
                let tree = transforms::tree_for_backend(&cloud, &backend)?;
                let report = harness::complexity_proxy(&tree);
                println!(
                    "{}\tN={}\tK={}\tK/N={:.4}\tper_level={:?}",
                    path.display(),
                    report.points,
                    report.total,
                    report.per_point(),
                    report.per_level
                );
                reports.push(report);
            }
            println!(
                "C={:.6e}\t({} {} over {} clouds)",
                ComplexityReport::aggregate(&reports),
                backend.name(),
                harness::schedule_label(&backend),
                reports.len()
            );
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Io(_) => (2, "io"),
        Error::MalformedHeader(_)
        | Error::MissingColor(_)
        | Error::MissingPosition(_)
        | Error::UnsupportedFormat(_)
        | Error::CountMismatch { .. }
        | Error::BadValue { .. }
        | Error::EmptyCloud => (3, "input"),
        Error::InvalidSchedule(_) | Error::InvalidArgument(_) | Error::LevelOutOfRange { .. } => (4, "argument"),
        Error::Header(_) | Error::Truncated => (5, "bitstream"),
        _ => (1, "codec"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, category) = exit_code(&e);
            eprintln!("error[{category}]: {e}");
            ExitCode::from(code)
        }
    }
}
