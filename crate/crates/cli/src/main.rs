use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Vocal-tract resonances by 3D Helmholtz FEM, 1D Webster eigenanalysis,
/// time-domain synthesis and LPC, side by side.
#[derive(Parser, Debug)]
#[command(name = "vtres", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every available method on each vowel of a config file and print the F1/F2 table
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Process vowels one at a time instead of in parallel
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Summarize a tagged tetrahedral mesh
    MeshInfo {
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Write an analytic area function
    MakeTube {
        #[arg(long, value_enum, default_value_t = Shape::Cylinder)]
        shape: Shape,
        /// Tract length (m)
        #[arg(long, default_value_t = 0.175)]
        length: f64,
        /// Reference cross-sectional area (m²)
        #[arg(long, default_value_t = 3e-4)]
        area: f64,
        #[arg(long, default_value_t = 20)]
        segments: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Write a tetrahedral mesh of a circular cylinder along x
    MakeCylinderMesh {
        #[arg(long, default_value_t = 0.175)]
        length: f64,
        #[arg(long, default_value_t = 0.01)]
        radius: f64,
        /// Target edge length (m)
        #[arg(long, default_value_t = 0.005)]
        h: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Helmholtz resonances of a mesh
    Helmholtz {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(short, default_value_t = 4)]
        k: usize,
        #[command(flatten)]
        acoustics: Acoustics,
        #[command(flatten)]
        out: Output,
    },
    /// Webster resonances of an area function
    WebsterEigen {
        #[arg(long)]
        area: PathBuf,
        #[arg(short, default_value_t = 4)]
        k: usize,
        #[command(flatten)]
        acoustics: Acoustics,
        #[command(flatten)]
        out: Output,
    },
    /// Stretch an area function until its Webster resonances match a reference set
    WebsterScale {
        #[arg(long)]
        area: PathBuf,
        /// Resonance CSV as written by `helmholtz`
        #[arg(long = "ref-resonances", alias = "reference", value_name = "CSV")]
        reference: PathBuf,
        /// Number of modes to match
        #[arg(long, default_value_t = 3)]
        modes: usize,
        #[command(flatten)]
        acoustics: Acoustics,
        #[command(flatten)]
        out: Output,
    },
    /// Synthesize a vowel with the two-mass glottis and write a 16-bit WAV
    Synth {
        #[arg(long)]
        area: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[arg(long, default_value_t = 44100)]
        fs: u32,
        #[arg(long, value_enum, default_value_t = Walls::Rigid)]
        walls: Walls,
        #[arg(long, default_value_t = 20)]
        segments: usize,
        #[arg(long, default_value_t = 350.0)]
        c: f64,
        /// Subglottal pressure (Pa)
        #[arg(long, default_value_t = 800.0)]
        p_sub: f64,
        /// Turn off wall losses and viscous diffusion
        #[arg(long)]
        lossless: bool,
        /// Do not feed the tract inlet pressure back into the glottis
        #[arg(long)]
        no_feedback: bool,
        /// Record lip volume velocity instead of its time derivative
        #[arg(long)]
        raw_flow: bool,
        #[command(flatten)]
        out: Output,
    },
    /// LPC formants of a 16-bit mono WAV file
    Formants {
        #[arg(long)]
        wav: PathBuf,
        #[arg(short, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Acoustics {
    /// Speed of sound (m/s)
    #[arg(long, default_value_t = 350.0)]
    c: f64,
    /// Wall dissipation coefficient
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Glottal boundary admittance
    #[arg(long, default_value_t = vtres_core::helmholtz3d::DEFAULT_GLOTTIS_ADMITTANCE)]
    glottis_admittance: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableFormat {
    Csv,
    Tsv,
    Pretty,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Shape {
    Cylinder,
    CosineHorn,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Walls {
    Rigid,
    Vibrating,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("vtres: {e}");
            e.exit_code()
        }
    }
}
