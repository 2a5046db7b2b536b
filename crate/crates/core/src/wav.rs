//! 16-bit PCM mono WAV reading and writing.

use std::path::{Path, PathBuf};

use crate::formant::Waveform;

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error("{path}: {source}")]
    Hound { path: PathBuf, source: hound::Error },
    #[error("{path}: expected 16-bit PCM mono, found {channels} channel(s), {bits}-bit {format}")]
    Format {
        path: PathBuf,
        channels: u16,
        bits: u16,
        format: &'static str,
    },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
}

/// Peak level written by [`write_wav`]: −3 dBFS.
pub const PEAK_DBFS: f64 = -3.0;

/// Reads a 16-bit PCM mono file, scaling samples to [−1, 1).
pub fn read_wav(path: &Path) -> Result<Waveform, WavError> {
    let hound_err = |source| WavError::Hound {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = hound::WavReader::open(path).map_err(hound_err)?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(WavError::Format {
            path: path.to_path_buf(),
            channels: spec.channels,
            bits: spec.bits_per_sample,
            format: match spec.sample_format {
                hound::SampleFormat::Int => "integer",
                hound::SampleFormat::Float => "float",
            },
        });
    }
    let samples = reader
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(hound_err)?;
    Waveform::new(samples, spec.sample_rate as f64).map_err(|e| WavError::Invalid {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Quantizes `w` to 16-bit PCM with its peak at −3 dBFS. A silent signal is
/// written as zeros.
pub fn to_pcm16(w: &Waveform) -> Vec<i16> {
    let peak = w.peak();
    let target = 10f64.powf(PEAK_DBFS / 20.0) * 32767.0;
    let gain = if peak > 0.0 { target / peak } else { 0.0 };
    w.samples()
        .iter()
        .map(|x| (x * gain).round() as i16)
        .collect()
}

fn spec_for(path: &Path, w: &Waveform) -> Result<hound::WavSpec, WavError> {
    let rate = w.fs().round();
    if !(1.0..=u32::MAX as f64).contains(&rate) || rate != w.fs() {
        return Err(WavError::Invalid {
            path: path.to_path_buf(),
            msg: format!("sample rate {} is not a whole number of Hz", w.fs()),
        });
    }
    Ok(hound::WavSpec {
        channels: 1,
        sample_rate: rate as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    })
}

fn write_to<W: std::io::Write + std::io::Seek>(
    sink: W,
    path: &Path,
    w: &Waveform,
) -> Result<(), WavError> {
    let hound_err = |source| WavError::Hound {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = hound::WavWriter::new(sink, spec_for(path, w)?).map_err(hound_err)?;
    for s in to_pcm16(w) {
        writer.write_sample(s).map_err(hound_err)?;
    }
    writer.finalize().map_err(hound_err)
}

pub fn write_wav(path: &Path, w: &Waveform) -> Result<(), WavError> {
    let file = std::fs::File::create(path).map_err(|e| WavError::Hound {
        path: path.to_path_buf(),
        source: hound::Error::IoError(e),
    })?;
    write_to(std::io::BufWriter::new(file), path, w)
}

/// The bytes [`write_wav`] would write.
pub fn encode_wav(w: &Waveform) -> Result<Vec<u8>, WavError> {
    let mut buf = std::io::Cursor::new(Vec::new());
    write_to(&mut buf, Path::new("<memory>"), w)?;
    Ok(buf.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_normalizes_peak() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let w = Waveform::new(
            (0..800).map(|i| (i as f64 * 0.1).sin() * 5.0).collect(),
            8000.0,
        )
        .unwrap();
        write_wav(&path, &w).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.fs(), 8000.0);
        assert_eq!(back.len(), 800);
        let peak_db = 20.0 * back.peak().log10();
        assert!((peak_db - PEAK_DBFS).abs() < 0.01, "{peak_db}");
        let scale = back.peak() / w.peak();
        for (a, b) in w.samples().iter().zip(back.samples()) {
            assert!((a * scale - b).abs() < 1.0 / 32768.0);
        }
    }

    #[test]
    fn encoded_bytes_match_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let w = Waveform::new(vec![0.1, -0.2, 0.3], 16000.0).unwrap();
        write_wav(&path, &w).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), encode_wav(&w).unwrap());
        assert!(encode_wav(&Waveform::new(vec![0.0], 8000.5).unwrap()).is_err());
    }

    #[test]
    fn silence_stays_silent() {
        let w = Waveform::new(vec![0.0; 10], 8000.0).unwrap();
        assert!(to_pcm16(&w).iter().all(|&s| s == 0));
    }

    #[test]
    fn rejects_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut wr = hound::WavWriter::create(&path, spec).unwrap();
        wr.write_sample(0i16).unwrap();
        wr.write_sample(0i16).unwrap();
        wr.finalize().unwrap();
        assert!(matches!(
            read_wav(&path),
            Err(WavError::Format { channels: 2, .. })
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            read_wav(Path::new("/nonexistent/x.wav")),
            Err(WavError::Hound { .. })
        ));
    }
}
