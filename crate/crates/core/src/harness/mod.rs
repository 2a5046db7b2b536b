//! Per-vowel comparison of all methods, driven by a config file.

mod config;
mod table;

pub use config::{CompareConfig, ConfigError, GlobalParams, VowelEntry, WallChoice};
pub use table::{emit, Failure, FormantTable, Format, Row};

use rayon::prelude::*;

use crate::formant::{average_formants, formants_from_wave};
use crate::geometry::{AreaFunction, TetMesh};
use crate::resonance::{first_two, Method};
use crate::synth_td::{simulate, Source};
use crate::webster1d::{scale_to_reference, webster_resonances, LengthScaling};
use crate::{helmholtz3d, wav, Error, Waveform};

/// All inputs of one vowel, loaded and validated.
#[derive(Debug, Clone)]
pub struct LoadedVowel {
    pub label: String,
    pub area: AreaFunction,
    pub mesh: Option<TetMesh>,
    pub audio: Vec<Waveform>,
}

/// Loads every file referenced by `cfg`; the first failure aborts with its path.
pub fn load_inputs(cfg: &CompareConfig) -> Result<Vec<LoadedVowel>, ConfigError> {
    let load_err = |path: &std::path::Path, e: &dyn std::fmt::Display| ConfigError::Load {
        path: path.to_path_buf(),
        msg: e.to_string(),
    };
    cfg.vowels
        .iter()
        .map(|v| {
            let area = AreaFunction::load(&v.area).map_err(|e| load_err(&v.area, &e))?;
            let mesh = v
                .mesh
                .as_ref()
                .map(|p| TetMesh::load(p).map_err(|e| load_err(p, &e)))
                .transpose()?;
            let audio = v
                .audio
                .iter()
                .map(|p| wav::read_wav(p).map_err(|e| load_err(p, &e)))
                .collect::<Result<_, _>>()?;
            Ok(LoadedVowel {
                label: v.label.clone(),
                area,
                mesh,
                audio,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

/// Loads the inputs and runs every available method on every vowel, with
/// vowels in parallel.
pub fn compare(cfg: &CompareConfig) -> Result<FormantTable, ConfigError> {
    compare_with(cfg, Execution::Parallel)
}

pub fn compare_with(cfg: &CompareConfig, exec: Execution) -> Result<FormantTable, ConfigError> {
    let inputs = load_inputs(cfg)?;
    let parts: Vec<FormantTable> = match exec {
        Execution::Sequential => inputs.iter().map(|v| compare_vowel(cfg, v)).collect(),
        Execution::Parallel => inputs.par_iter().map(|v| compare_vowel(cfg, v)).collect(),
    };
    let mut table = FormantTable::default();
    for p in parts {
        table.rows.extend(p.rows);
        table.failures.extend(p.failures);
        table.omissions.extend(p.omissions);
    }
    Ok(table)
}

/// Rows for one vowel. Failures of individual methods are recorded, not raised.
pub fn compare_vowel(cfg: &CompareConfig, v: &LoadedVowel) -> FormantTable {
    let mut out = FormantTable::default();
    let k = cfg.global.scale_modes.max(2);
    let record =
        |out: &mut FormantTable, method: Method, result: Result<(f64, f64), Error>| match result {
            Ok((f1, f2)) => out.rows.push(Row {
                vowel: v.label.clone(),
                method,
                f1,
                f2,
            }),
            Err(e) => out.failures.push(Failure {
                vowel: v.label.clone(),
                method,
                message: e.to_string(),
            }),
        };

    let wp = cfg.webster_params();
    record(
        &mut out,
        Method::WebsterResonance,
        webster_resonances(&v.area, &wp, k).and_then(|w| Ok(first_two(&w)?)),
    );

    match &v.mesh {
        Some(mesh) => match helmholtz3d::resonances(mesh, &cfg.helmholtz_params(), k) {
            Ok(h) => {
                record(
                    &mut out,
                    Method::HelmholtzResonance,
                    first_two(&h).map_err(Error::from),
                );
                let opts = LengthScaling {
                    modes: cfg.global.scale_modes,
                    ..Default::default()
                };
                record(
                    &mut out,
                    Method::ScaledWebsterResonance,
                    scale_to_reference(&v.area, &h, &wp, &opts)
                        .and_then(|(_, s)| Ok(first_two(&s)?)),
                );
            }
            Err(e) => {
                let msg = e.to_string();
                record(&mut out, Method::HelmholtzResonance, Err(e));
                out.failures.push(Failure {
                    vowel: v.label.clone(),
                    method: Method::ScaledWebsterResonance,
                    message: format!("needs H_R: {msg}"),
                });
            }
        },
        None => out
            .omissions
            .push(format!("{}: H_R and S_R skipped (no mesh)", v.label)),
    }

    let source = Source::TwoMass {
        params: cfg.glottis,
        feedback: cfg.global.feedback,
    };
    let wf = simulate(&v.area, &source, &cfg.tube_params(), cfg.global.duration)
        .map_err(Error::from)
        .and_then(|w| Ok(formants_from_wave(&w.skip(cfg.global.settle), 2)?))
        .map(|e| (e.frequencies[0], e.frequencies[1]));
    record(&mut out, Method::WebsterFormant, wf);

    if v.audio.is_empty() {
        out.omissions
            .push(format!("{}: A_F skipped (no audio)", v.label));
    } else {
        let af = v
            .audio
            .iter()
            .map(|w| formants_from_wave(w, 2))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|e| average_formants(&e))
            .map(|e| (e.frequencies[0], e.frequencies[1]))
            .map_err(Error::from);
        record(&mut out, Method::AudioFormant, af);
    }
    out
}
