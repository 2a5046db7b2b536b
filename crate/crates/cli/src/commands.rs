use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use vtres_core::formant::formants_from_wave;
use vtres_core::geometry::{make_cylinder_mesh, make_tube, BoundaryTag, TubeShape};
use vtres_core::glottis::TwoMassParams;
use vtres_core::harness::{self, CompareConfig, Execution, Format};
use vtres_core::helmholtz3d::{self, HelmholtzParams};
use vtres_core::resonance::ResonanceError;
use vtres_core::synth_td::{self, OutputSignal, Source, TubeParams, WallModel};
use vtres_core::webster1d::{scale_to_reference, webster_resonances, LengthScaling, WebsterParams};
use vtres_core::{wav, AreaFunction, Error, GeometryError, ResonanceSet, TetMesh};

use crate::{Acoustics, Command, Output, Shape, TableFormat, Walls};

/// Exit status 2: bad input; 3: a computation failed.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Solver(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let input = matches!(
            &e,
            Error::Geometry(_)
                | Error::Config(_)
                | Error::Wav(_)
                | Error::Io { .. }
                | Error::Resonance(ResonanceError::Parse { .. })
        );
        if input {
            CliError::Input(e.to_string())
        } else {
            CliError::Solver(e.to_string())
        }
    }
}

macro_rules! impl_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
impl_from!(
    GeometryError,
    vtres_core::harness::ConfigError,
    wav::WavError,
    ResonanceError,
    vtres_core::FormantError,
    synth_td::SynthError
);

type CliResult = Result<ExitCode, CliError>;

fn write_out(out: &Output, bytes: &[u8]) -> Result<(), CliError> {
    let res = match &out.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| format!("stdout: {e}")),
    };
    res.map_err(CliError::Input)
}

fn load_area(path: &Path) -> Result<AreaFunction, CliError> {
    Ok(AreaFunction::load(path)?)
}

fn helmholtz_params(a: &Acoustics) -> HelmholtzParams {
    HelmholtzParams {
        c: a.c,
        alpha: a.alpha,
        glottis_admittance: a.glottis_admittance,
    }
}

fn webster_params(a: &Acoustics) -> WebsterParams {
    WebsterParams {
        c: a.c,
        alpha: a.alpha,
        glottis_admittance: a.glottis_admittance,
        ..Default::default()
    }
}

pub fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Compare {
            config,
            format,
            sequential,
            out,
        } => {
            let cfg = CompareConfig::load(&config)?;
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let table = harness::compare_with(&cfg, exec)?;
            for note in &table.omissions {
                eprintln!("note: {note}");
            }
            for f in &table.failures {
                eprintln!("error: {} {}: {}", f.vowel, f.method.label(), f.message);
            }
            let format = match format {
                TableFormat::Csv => Format::Csv,
                TableFormat::Tsv => Format::Tsv,
                TableFormat::Pretty => Format::Pretty,
            };
            write_out(&out, harness::emit(&table, format).as_bytes())?;
            Ok(if table.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::MeshInfo { mesh, out } => {
            let m = TetMesh::load(&mesh)?;
            let mut text = format!(
                "vertices {}\ntetrahedra {}\nvolume_m3 {:.6e}\n",
                m.vertices().len(),
                m.tets().len(),
                m.volume()
            );
            for tag in [BoundaryTag::Mouth, BoundaryTag::Wall, BoundaryTag::Glottis] {
                text += &format!(
                    "tag {} {:?} faces {} area_m2 {:.6e}\n",
                    tag.code(),
                    tag,
                    m.tag_count(tag),
                    m.tag_area(tag)
                );
            }
            write_out(&out, text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MakeTube {
            shape,
            length,
            area,
            segments,
            out,
        } => {
            let shape = match shape {
                Shape::Cylinder => TubeShape::Cylinder,
                Shape::CosineHorn => TubeShape::CosineHorn,
            };
            let af = make_tube(shape, length, area, segments)?;
            write_out(&out, af.to_text().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MakeCylinderMesh {
            length,
            radius,
            h,
            out,
        } => {
            let m = make_cylinder_mesh(length, radius, h)?;
            write_out(&out, m.to_text().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Helmholtz {
            mesh,
            k,
            acoustics,
            out,
        } => {
            let m = TetMesh::load(&mesh)?;
            let rs = helmholtz3d::resonances(&m, &helmholtz_params(&acoustics), k)?;
            write_out(&out, rs.to_csv().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::WebsterEigen {
            area,
            k,
            acoustics,
            out,
        } => {
            let af = load_area(&area)?;
            let rs = webster_resonances(&af, &webster_params(&acoustics), k)?;
            write_out(&out, rs.to_csv().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::WebsterScale {
            area,
            reference,
            modes,
            acoustics,
            out,
        } => {
            let af = load_area(&area)?;
            let text = std::fs::read_to_string(&reference)
                .map_err(|e| CliError::Input(format!("{}: {e}", reference.display())))?;
            let href = ResonanceSet::parse_csv(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", reference.display())))?;
            let opts = LengthScaling {
                modes,
                ..Default::default()
            };
            let (gamma, scaled) =
                scale_to_reference(&af, &href, &webster_params(&acoustics), &opts)?;
            let text = format!("# gamma = {gamma:.9}\n{}", scaled.to_csv());
            write_out(&out, text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth {
            area,
            duration,
            fs,
            walls,
            segments,
            c,
            p_sub,
            lossless,
            no_feedback,
            raw_flow,
            out,
        } => {
            let af = load_area(&area)?;
            let base = if lossless {
                TubeParams::lossless()
            } else {
                TubeParams::default()
            };
            let params = TubeParams {
                c,
                fs: fs as f64,
                n_segments: segments,
                walls: match walls {
                    Walls::Rigid => WallModel::Rigid,
                    Walls::Vibrating => WallModel::SOFT_TISSUE,
                },
                output: if raw_flow {
                    OutputSignal::LipFlow
                } else {
                    OutputSignal::LipFlowDerivative
                },
                ..base
            };
            params
                .validate()
                .map_err(|e| CliError::Input(e.to_string()))?;
            let glottis = TwoMassParams {
                p_sub,
                ..Default::default()
            };
            glottis
                .validate()
                .map_err(|e| CliError::Input(e.to_string()))?;
            if duration.is_nan() || duration <= 0.0 {
                return Err(CliError::Input(format!(
                    "duration must be positive, got {duration}"
                )));
            }
            let w = synth_td::simulate(
                &af,
                &Source::TwoMass {
                    params: glottis,
                    feedback: !no_feedback,
                },
                &params,
                duration,
            )?;
            write_out(&out, &wav::encode_wav(&w)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Formants { wav: path, n, out } => {
            let w = wav::read_wav(&path)?;
            let est = formants_from_wave(&w, n)?;
            let mut text = String::from("formant,frequency_Hz,bandwidth_Hz\n");
            for (i, (f, b)) in est.frequencies.iter().zip(&est.bandwidths).enumerate() {
                text += &format!("F{},{f:.1},{b:.1}\n", i + 1);
            }
            write_out(&out, text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
