//! Formant estimation by linear prediction.
//!
//! The pipeline is the textbook one: pre-emphasis, Hamming-windowed frames,
//! autocorrelation LPC, polynomial roots, a bandwidth/frequency gate, and a
//! per-formant median over voiced frames.

mod lpc;
mod roots;

pub use lpc::{autocorrelation, levinson, lpc};
pub use roots::polynomial_roots;

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormantError {
    #[error("frame has no energy")]
    Degenerate,
    #[error("LPC order {order} needs order >= 2 and a frame longer than twice the order (frame has {frame} samples)")]
    Order { order: usize, frame: usize },
    #[error("signal is {duration:.3} s long, need at least {min:.3} s")]
    TooShort { duration: f64, min: f64 },
    #[error("found only {found} formants, {requested} requested")]
    TooFewFormants { requested: usize, found: usize },
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
    #[error("cannot average an empty list of estimates")]
    EmptyAverage,
    #[error("estimates have different formant counts ({0} vs {1})")]
    MismatchedCounts(usize, usize),
    #[error("root finding failed on an LPC polynomial")]
    RootFinding,
}

/// Mono signal with a sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    fs: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self, FormantError> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(FormantError::InvalidWaveform(format!("sample rate {fs}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(FormantError::InvalidWaveform(format!(
                "sample {i} is not finite"
            )));
        }
        Ok(Self { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * gain).collect(),
            fs: self.fs,
        }
    }

    /// Drops the first `seconds` of the signal.
    pub fn skip(&self, seconds: f64) -> Self {
        let n = ((seconds * self.fs).round() as usize).min(self.samples.len());
        Self {
            samples: self.samples[n..].to_vec(),
            fs: self.fs,
        }
    }
}

/// Formant frequencies and bandwidths, lowest first.
#[derive(Debug, Clone, PartialEq)]
pub struct FormantEstimate {
    pub frequencies: Vec<f64>,
    pub bandwidths: Vec<f64>,
}

impl FormantEstimate {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Analysis settings. Defaults follow common practice for vowel formants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub pre_emphasis: f64,
    pub frame_seconds: f64,
    pub hop_seconds: f64,
    /// LPC order; `None` means `2 + fs/1000` rounded.
    pub order: Option<usize>,
    pub max_bandwidth: f64,
    pub min_frequency: f64,
    /// Frames whose RMS is below this fraction of the loudest frame are skipped.
    pub voicing_gate: f64,
    pub min_duration: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            pre_emphasis: 0.97,
            frame_seconds: 0.025,
            hop_seconds: 0.010,
            order: None,
            max_bandwidth: 400.0,
            min_frequency: 90.0,
            voicing_gate: 0.01,
            min_duration: 0.1,
        }
    }
}

impl AnalysisParams {
    pub fn order_for(&self, fs: f64) -> usize {
        self.order
            .unwrap_or_else(|| (2.0 + fs / 1000.0).round() as usize)
    }
}

/// Candidate formants `(frequency, bandwidth)` of one LPC polynomial, sorted by frequency.
pub fn lpc_formants(
    a: &[f64],
    fs: f64,
    params: &AnalysisParams,
) -> Result<Vec<(f64, f64)>, FormantError> {
    let mut poly = Vec::with_capacity(a.len() + 1);
    poly.push(1.0);
    poly.extend_from_slice(a);
    let roots = polynomial_roots(&poly).ok_or(FormantError::RootFinding)?;
    let mut out: Vec<(f64, f64)> = roots
        .into_iter()
        .filter(|z| z.im > 0.0)
        .map(|z| (z.arg() * fs / (2.0 * PI), -z.norm().ln() * fs / PI))
        .filter(|&(f, bw)| bw < params.max_bandwidth && f > params.min_frequency)
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(out)
}

/// Per-frame formant candidates of every voiced frame.
pub fn frame_formants(
    w: &Waveform,
    params: &AnalysisParams,
) -> Result<Vec<Vec<(f64, f64)>>, FormantError> {
    if w.duration() < params.min_duration {
        return Err(FormantError::TooShort {
            duration: w.duration(),
            min: params.min_duration,
        });
    }
    let fs = w.fs();
    let x = w.samples();
    let mut emph = Vec::with_capacity(x.len());
    emph.push(x[0]);
    emph.extend(x.windows(2).map(|p| p[1] - params.pre_emphasis * p[0]));

    let frame = ((params.frame_seconds * fs).round() as usize).max(1);
    let hop = ((params.hop_seconds * fs).round() as usize).max(1);
    let order = params.order_for(fs);
    let window: Vec<f64> = (0..frame)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (frame - 1).max(1) as f64).cos())
        .collect();

    let starts: Vec<usize> = (0..)
        .map(|k| k * hop)
        .take_while(|s| s + frame <= x.len())
        .collect();
    let rms: Vec<f64> = starts
        .iter()
        .map(|&s| (x[s..s + frame].iter().map(|v| v * v).sum::<f64>() / frame as f64).sqrt())
        .collect();
    let peak = rms.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(FormantError::Degenerate);
    }

    let mut out = Vec::new();
    for (&s, &level) in starts.iter().zip(&rms) {
        if level < params.voicing_gate * peak {
            continue;
        }
        let buf: Vec<f64> = emph[s..s + frame]
            .iter()
            .zip(&window)
            .map(|(v, h)| v * h)
            .collect();
        let (a, _) = match lpc(&buf, order) {
            Ok(fit) => fit,
            Err(FormantError::Degenerate) => continue,
            Err(e) => return Err(e),
        };
        out.push(lpc_formants(&a, fs, params)?);
    }
    Ok(out)
}

/// First `n` formants of `w` with the default analysis settings.
pub fn formants_from_wave(w: &Waveform, n: usize) -> Result<FormantEstimate, FormantError> {
    formants_with(w, n, &AnalysisParams::default())
}

pub fn formants_with(
    w: &Waveform,
    n: usize,
    params: &AnalysisParams,
) -> Result<FormantEstimate, FormantError> {
    let frames = frame_formants(w, params)?;
    let usable: Vec<&Vec<(f64, f64)>> = frames.iter().filter(|f| f.len() >= n).collect();
    if usable.is_empty() || n == 0 {
        let found = frames.iter().map(Vec::len).max().unwrap_or(0);
        return Err(FormantError::TooFewFormants {
            requested: n,
            found,
        });
    }
    let mut est = FormantEstimate {
        frequencies: Vec::with_capacity(n),
        bandwidths: Vec::with_capacity(n),
    };
    for i in 0..n {
        est.frequencies
            .push(median(usable.iter().map(|f| f[i].0).collect()));
        est.bandwidths
            .push(median(usable.iter().map(|f| f[i].1).collect()));
    }
    Ok(est)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Mean per formant index.
pub fn average_formants(estimates: &[FormantEstimate]) -> Result<FormantEstimate, FormantError> {
    let first = estimates.first().ok_or(FormantError::EmptyAverage)?;
    let n = first.len();
    if let Some(bad) = estimates.iter().find(|e| e.len() != n) {
        return Err(FormantError::MismatchedCounts(n, bad.len()));
    }
    let k = estimates.len() as f64;
    let mean = |pick: fn(&FormantEstimate) -> &Vec<f64>, i: usize| {
        // identical inputs must round-trip exactly
        if estimates.iter().all(|e| pick(e)[i] == pick(first)[i]) {
            pick(first)[i]
        } else {
            estimates.iter().map(|e| pick(e)[i]).sum::<f64>() / k
        }
    };
    Ok(FormantEstimate {
        frequencies: (0..n).map(|i| mean(|e| &e.frequencies, i)).collect(),
        bandwidths: (0..n).map(|i| mean(|e| &e.bandwidths, i)).collect(),
    })
}
