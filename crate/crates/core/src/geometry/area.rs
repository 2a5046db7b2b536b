use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, strip_comment, write_file, GeometryError};

/// One sample of an area function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSample {
    /// Arc length from the glottis (m).
    pub s: f64,
    /// Cross-sectional area (m²).
    pub area: f64,
    /// Cross-section circumference (m).
    pub circumference: f64,
    /// Dimensionless sound speed correction.
    pub sigma: f64,
}

impl AreaSample {
    /// A sample of a circular straight section.
    pub fn circular(s: f64, area: f64) -> Self {
        Self {
            s,
            area,
            circumference: circular_circumference(area),
            sigma: 1.0,
        }
    }
}

pub(crate) fn circular_circumference(area: f64) -> f64 {
    2.0 * (PI * area).sqrt()
}

/// Cross-sectional description of a tract along its centreline, glottis at
/// `s = 0`, lips at `s = L`.
///
/// Always holds at least two samples with strictly increasing `s` starting at
/// zero and positive area, circumference and correction factor.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaFunction {
    samples: Vec<AreaSample>,
}

impl AreaFunction {
    pub fn new(samples: Vec<AreaSample>) -> Result<Self, GeometryError> {
        if samples.len() < 2 {
            return Err(GeometryError::InvalidArea(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if samples[0].s != 0.0 {
            return Err(GeometryError::InvalidArea(format!(
                "first sample must be at s = 0, got {}",
                samples[0].s
            )));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].s > w[0].s) {
                return Err(GeometryError::InvalidArea(format!(
                    "s is not strictly increasing at sample {}",
                    i + 1
                )));
            }
        }
        for (i, x) in samples.iter().enumerate() {
            if !x.s.is_finite() {
                return Err(GeometryError::InvalidArea(format!(
                    "non-finite s at sample {i}"
                )));
            }
            for (name, v) in [
                ("area", x.area),
                ("circumference", x.circumference),
                ("sigma", x.sigma),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(GeometryError::InvalidArea(format!(
                        "{name} must be positive, got {v} at sample {i}"
                    )));
                }
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[AreaSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total tract length `L`.
    pub fn length(&self) -> f64 {
        self.samples[self.samples.len() - 1].s
    }

    /// Piecewise-linear interpolation of all fields at arc length `s`
    /// (clamped to `[0, L]`).
    pub fn at(&self, s: f64) -> AreaSample {
        let last = self.samples.len() - 1;
        if s <= 0.0 {
            return self.samples[0];
        }
        if s >= self.samples[last].s {
            return self.samples[last];
        }
        let j = self.samples.partition_point(|x| x.s <= s);
        let (a, b) = (&self.samples[j - 1], &self.samples[j]);
        let t = (s - a.s) / (b.s - a.s);
        let lerp = |x: f64, y: f64| x + t * (y - x);
        AreaSample {
            s,
            area: lerp(a.area, b.area),
            circumference: lerp(a.circumference, b.circumference),
            sigma: lerp(a.sigma, b.sigma),
        }
    }

    /// Resamples onto `n + 1` uniformly spaced points.
    pub fn resampled(&self, n: usize) -> Self {
        let l = self.length();
        let mut samples: Vec<AreaSample> =
            (0..=n).map(|i| self.at(l * i as f64 / n as f64)).collect();
        samples[n].s = l;
        Self { samples }
    }

    /// Mean area of each of `n` equal-length sections, by exact integration
    /// of the piecewise-linear profile.
    pub fn section_areas(&self, n: usize) -> Vec<f64> {
        let l = self.length();
        (0..n)
            .map(|i| {
                let (a, b) = (l * i as f64 / n as f64, l * (i + 1) as f64 / n as f64);
                self.integrate_area(a, b) / (b - a)
            })
            .collect()
    }

    fn integrate_area(&self, a: f64, b: f64) -> f64 {
        // breakpoints inside (a, b) plus the ends; trapezoid is exact per piece
        let mut pts = vec![a];
        pts.extend(self.samples.iter().map(|x| x.s).filter(|&s| s > a && s < b));
        pts.push(b);
        pts.windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.at(w[0]).area + self.at(w[1]).area))
            .sum()
    }

    /// The same profile stretched along its axis by `factor` (areas,
    /// circumferences and corrections unchanged).
    pub fn length_scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(GeometryError::InvalidDimensions(format!(
                "scale factor {factor}"
            )));
        }
        Self::new(
            self.samples
                .iter()
                .map(|x| AreaSample {
                    s: x.s * factor,
                    ..*x
                })
                .collect(),
        )
    }

    /// Replaces the correction factor at every sample.
    pub fn with_uniform_sigma(&self, sigma: f64) -> Result<Self, GeometryError> {
        Self::new(
            self.samples
                .iter()
                .map(|x| AreaSample { sigma, ..*x })
                .collect(),
        )
    }

    /// Parses the `s A [W [Sigma]]` text format. Missing `W` assumes a circular
    /// cross-section, missing `Sigma` is 1.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let fields = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| GeometryError::Parse {
                        line: idx + 1,
                        msg: format!("not a number: {f:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let sample = match fields[..] {
                [s, area] => AreaSample::circular(s, area),
                [s, area, circumference] => AreaSample {
                    s,
                    area,
                    circumference,
                    sigma: 1.0,
                },
                [s, area, circumference, sigma] => AreaSample {
                    s,
                    area,
                    circumference,
                    sigma,
                },
                _ => {
                    return Err(GeometryError::Parse {
                        line: idx + 1,
                        msg: format!("expected 2 to 4 columns, got {}", fields.len()),
                    })
                }
            };
            samples.push(sample);
        }
        Self::new(samples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError> {
        Self::parse(&read_file(path.as_ref())?)
    }

    /// Four-column text form; floats are written in shortest round-trip
    /// notation so `parse(to_text(x)) == x`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# s A W Sigma\n");
        for x in &self.samples {
            let _ = writeln!(out, "{} {} {} {}", x.s, x.area, x.circumference, x.sigma);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GeometryError> {
        write_file(path.as_ref(), &self.to_text())
    }
}
