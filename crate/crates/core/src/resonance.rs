//! Resonance sets shared by the eigen solvers and the comparison table.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::numlin::EigenPair;

/// Modes whose frequency is below this are treated as numerical or
/// overdamped artefacts and dropped.
pub const SPURIOUS_CUTOFF_HZ: f64 = 20.0;

/// Source of a pair of F1/F2 values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Helmholtz resonances from the 3D FEM eigenproblem.
    HelmholtzResonance,
    /// Webster resonances from the 1D eigenproblem.
    WebsterResonance,
    /// Webster resonances after centreline length scaling.
    ScaledWebsterResonance,
    /// Formants of time-domain Webster synthesis.
    WebsterFormant,
    /// Formants of recorded audio.
    AudioFormant,
}

impl Method {
    /// Table order.
    pub const ALL: [Method; 5] = [
        Method::HelmholtzResonance,
        Method::WebsterResonance,
        Method::ScaledWebsterResonance,
        Method::WebsterFormant,
        Method::AudioFormant,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::HelmholtzResonance => "H_R",
            Method::WebsterResonance => "W_R",
            Method::ScaledWebsterResonance => "S_R",
            Method::WebsterFormant => "W_F",
            Method::AudioFormant => "A_F",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = ResonanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| ResonanceError::Parse {
                line: 0,
                msg: format!("unknown method {s:?}"),
            })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResonanceError {
    #[error("need at least {needed} modes, have {available}")]
    TooFewModes { needed: usize, available: usize },
    #[error("resonance csv line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Eigenvalue (1/s).
    pub lambda: Complex64,
    /// Resonance frequency `Im λ / 2π` (Hz).
    pub freq: f64,
}

impl Mode {
    pub fn from_lambda(lambda: Complex64) -> Self {
        Self {
            lambda,
            freq: lambda.im / (2.0 * std::f64::consts::PI),
        }
    }
}

/// Resonances sorted by ascending positive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSet {
    pub method: Method,
    pub modes: Vec<Mode>,
    /// Where the set came from (input file, parameters).
    pub source: String,
}

impl ResonanceSet {
    /// Keeps modes above [`SPURIOUS_CUTOFF_HZ`], sorted by frequency.
    pub fn from_modes(
        method: Method,
        modes: impl IntoIterator<Item = Mode>,
        source: impl Into<String>,
    ) -> Self {
        let mut modes: Vec<Mode> = modes
            .into_iter()
            .filter(|m| m.freq >= SPURIOUS_CUTOFF_HZ)
            .collect();
        modes.sort_by(|a, b| a.freq.total_cmp(&b.freq));
        Self {
            method,
            modes,
            source: source.into(),
        }
    }

    /// Physical modes among eigenpairs, truncated to the `k` lowest.
    pub fn from_eigenpairs(
        method: Method,
        pairs: &[EigenPair],
        k: usize,
        source: impl Into<String>,
    ) -> Self {
        let mut set = Self::from_modes(
            method,
            pairs.iter().map(|p| Mode::from_lambda(p.lambda)),
            source,
        );
        set.modes.truncate(k);
        set
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.freq).collect()
    }

    pub fn relabeled(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// CSV with header `method,mode,re_lambda,im_lambda,f_Hz`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mode,re_lambda,im_lambda,f_Hz\n");
        for (i, m) in self.modes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4}",
                self.method,
                i + 1,
                m.lambda.re,
                m.lambda.im,
                m.freq
            );
        }
        out
    }

    /// Reads the format written by [`ResonanceSet::to_csv`]. Frequencies are
    /// recomputed from `λ`.
    pub fn parse_csv(text: &str) -> Result<Self, ResonanceError> {
        let mut method = None;
        let mut modes = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("method,") {
                continue;
            }
            let err = |msg: String| ResonanceError::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(err(format!("expected 5 fields, got {}", fields.len())));
            }
            let m: Method = fields[0]
                .parse()
                .map_err(|_| err(format!("unknown method {:?}", fields[0])))?;
            if *method.get_or_insert(m) != m {
                return Err(err("mixed methods in one file".into()));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("not a number: {s:?}")))
            };
            modes.push(Mode::from_lambda(Complex64::new(
                num(fields[2])?,
                num(fields[3])?,
            )));
        }
        let method = method.ok_or(ResonanceError::Parse {
            line: 0,
            msg: "no modes".into(),
        })?;
        Ok(Self::from_modes(method, modes, "csv"))
    }
}

/// The two lowest resonance frequencies.
pub fn first_two(rs: &ResonanceSet) -> Result<(f64, f64), ResonanceError> {
    match rs.modes[..] {
        [a, b, ..] => Ok((a.freq, b.freq)),
        _ => Err(ResonanceError::TooFewModes {
            needed: 2,
            available: rs.modes.len(),
        }),
    }
}
