//! Vocal-tract resonance analysis.
//!
//! Four ways of getting at the low resonances of a vocal-tract geometry:
//!
//! * [`helmholtz3d`]: P1 finite elements for the Helmholtz resonance problem
//!   on a tagged tetrahedral mesh of the air column (H_R).
//! * [`webster1d`]: the same boundary value problem reduced to an area
//!   function, solved as a 1D eigenproblem (W_R), plus the centreline length
//!   scaling that matches it to a 3D result (S_R).
//! * [`synth_td`]: time-domain 1D wave propagation with wall losses, a
//!   vibrating-wall option and a [`glottis`] two-mass source. Formants of the
//!   synthesized sound are W_F.
//! * [`formant`]: LPC formant tracking of recorded or synthesized audio (A_F).
//!
//! [`harness`] runs all of them per vowel and tabulates F1/F2.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod formant;
pub mod geometry;
pub mod glottis;
pub mod harness;
pub mod helmholtz3d;
pub mod numlin;
pub mod resonance;
pub mod synth_td;
pub mod wav;
pub mod webster1d;

use std::path::PathBuf;

pub use formant::{FormantError, FormantEstimate, Waveform};
pub use geometry::{AreaFunction, BoundaryTag, GeometryError, TetMesh};
pub use numlin::{EigenPair, LinalgError, SparseMatrix};
pub use resonance::{Method, Mode, ResonanceSet};

/// Top-level error for operations that cross module boundaries.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Formant(#[from] FormantError),
    #[error(transparent)]
    Glottis(#[from] glottis::GlottisError),
    #[error(transparent)]
    Synth(#[from] synth_td::SynthError),
    #[error(transparent)]
    Wav(#[from] wav::WavError),
    #[error(transparent)]
    Config(#[from] harness::ConfigError),
    #[error(transparent)]
    Resonance(#[from] resonance::ResonanceError),
    #[error("no length scale in [{lo}, {hi}] matches the reference resonances")]
    NoScaleRoot { lo: f64, hi: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
