mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stegkit_core::mesh::Vec3;

use report::Session;

/// Steganography and forensics toolkit for 3D-printing design files.
#[derive(Debug, Parser)]
#[command(name = "dm-stegkit", version)]
struct Cli {
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct MessageArgs {
    /// Payload given inline as UTF-8 text.
    #[arg(
        long,
        conflicts_with = "message_file",
        required_unless_present = "message_file"
    )]
    message: Option<String>,
    /// Payload read from a file, as raw bytes.
    #[arg(long)]
    message_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// First green slot used by the channel.
    #[arg(long, default_value_t = 0)]
    start_slot: usize,
    /// Binary digits written into each green value (1-9).
    #[arg(long, default_value_t = 6)]
    digits: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summarize an STL file.
    StlInfo { input: PathBuf },
    /// Hide a framed message in the 80-byte header of a binary STL.
    HeaderEmbed {
        input: PathBuf,
        #[command(flatten)]
        message: MessageArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover a message from an STL header.
    HeaderExtract { input: PathBuf },
    /// Compare extruded filament with the file's metadata claim.
    GcodeAudit {
        input: PathBuf,
        /// Relative deviation above which the verdict is "mismatch".
        #[arg(long, default_value_t = stegkit_core::gcode::DEFAULT_MISMATCH_THRESHOLD)]
        threshold: f64,
    },
    /// Write a framed message into VRML green color digits.
    VrmlEmbed {
        input: PathBuf,
        #[command(flatten)]
        message: MessageArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover a message from VRML green color digits.
    VrmlExtract {
        input: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Encode text as Morse sketch segments (JSON).
    MorseEncode {
        /// Uppercase letters, digits and spaces.
        #[arg(long)]
        text: String,
        /// Length of a dot, mm.
        #[arg(long, default_value_t = 1.0)]
        unit: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode Morse sketch segments (JSON).
    MorseDecode {
        input: PathBuf,
        /// Dot length, mm. Estimated from the segments when omitted.
        #[arg(long)]
        unit: Option<f64>,
    },
    /// Turn a PBM bit grid into a depth-jittered sphere cloud.
    Qr3dEmbed {
        #[arg(long)]
        grid: PathBuf,
        /// Viewing direction as x,y,z; normalized before use.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        dir: Vec3,
        /// Module pitch, mm.
        #[arg(long)]
        pitch: f64,
        /// Sphere radius, mm. Defaults to 0.35 pitch.
        #[arg(long)]
        radius: Option<f64>,
        /// Depth jitter half-range, mm. Defaults to 5 pitch.
        #[arg(long)]
        jitter: Option<f64>,
        /// Overrides DM_STEGKIT_SEED and the built-in seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Sphere centers as XYZ.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the spheres as a binary STL mesh.
        #[arg(long)]
        stl: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        subdivisions: u32,
    },
    /// Project a sphere cloud along a direction onto a bit grid.
    Qr3dProject {
        input: PathBuf,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        dir: Vec3,
        #[arg(long)]
        pitch: f64,
        /// Recovered grid as PBM.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for the direction that reveals a hidden grid.
    Qr3dSearch {
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        coarse_step: f64,
        #[arg(long, default_value_t = 0.05)]
        refine_to: f64,
        /// Recovered grid as PBM.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rebuild a solid from a layered XYZ point cloud.
    Recon {
        input: PathBuf,
        /// Layer grouping tolerance, mm. Defaults to half the median gap.
        #[arg(long)]
        z_tol: Option<f64>,
        /// Points per resampled outline.
        #[arg(long, default_value_t = stegkit_core::recon::DEFAULT_RESAMPLE)]
        resample: usize,
        /// Reconstructed mesh as binary STL.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank print orientations by slice fragmentation.
    OrientScan {
        input: PathBuf,
        #[arg(long, default_value_t = 15.0)]
        step: f64,
        #[arg(long, default_value_t = 0.2)]
        layer_height: f64,
        /// Number of ranked candidates included in the report.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::StlInfo { .. } => "stl-info",
            Command::HeaderEmbed { .. } => "header-embed",
            Command::HeaderExtract { .. } => "header-extract",
            Command::GcodeAudit { .. } => "gcode-audit",
            Command::VrmlEmbed { .. } => "vrml-embed",
            Command::VrmlExtract { .. } => "vrml-extract",
            Command::MorseEncode { .. } => "morse-encode",
            Command::MorseDecode { .. } => "morse-decode",
            Command::Qr3dEmbed { .. } => "qr3d-embed",
            Command::Qr3dProject { .. } => "qr3d-project",
            Command::Qr3dSearch { .. } => "qr3d-search",
            Command::Recon { .. } => "recon",
            Command::OrientScan { .. } => "orient-scan",
        }
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if x.is_finite() && y.is_finite() && z.is_finite() => {
            let v = Vec3::new(x, y, z);
            if v.norm() > 0.0 {
                Ok(v.normalized())
            } else {
                Err("direction must be nonzero".to_string())
            }
        }
        _ => Err("expected three finite numbers x,y,z".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut session = Session::new(cli.command.name());
    let outcome = commands::run(&cli.command, &mut session);
    let (json, code) = session.finish(outcome, cli.pretty);
    // a closed pipe is the reader's choice, not a failure worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{json}");
    ExitCode::from(code)
}
