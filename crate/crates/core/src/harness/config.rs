//! Comparison config files.
//!
//! A flat, line-oriented format:
//!
//! ```text
//! # comments start with '#' or ';'
//! [global]
//! c = 350
//! alpha = 0
//!
//! [glottis]
//! p_sub = 800
//!
//! [walls]
//! stiffness = 845000
//!
//! [vowel /a/]
//! area = a.area
//! mesh = a.mesh                  # optional
//! audio = a1.wav, a2.wav         # optional, averaged
//! ```
//!
//! `c` and `alpha` are required so every run records the values it used.
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use crate::glottis::TwoMassParams;
use crate::synth_td::WallModel;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {msg}")]
    Load { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallChoice {
    Rigid,
    Vibrating,
}

/// Run-wide settings.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalParams {
    pub c: f64,
    pub alpha: f64,
    pub glottis_admittance: f64,
    /// Synthesis sample rate (Hz).
    pub fs: f64,
    /// Synthesis length (s).
    pub duration: f64,
    /// Synthesis onset discarded before formant analysis (s).
    pub settle: f64,
    pub segments: usize,
    pub d0: f64,
    pub diffusion0: f64,
    pub walls: WallChoice,
    pub feedback: bool,
    /// Modes used by the length scaling.
    pub scale_modes: usize,
}

impl Default for GlobalParams {
    fn default() -> Self {
        Self {
            c: 350.0,
            alpha: 0.0,
            glottis_admittance: crate::helmholtz3d::DEFAULT_GLOTTIS_ADMITTANCE,
            fs: 44100.0,
            duration: 0.5,
            settle: 0.1,
            segments: 20,
            d0: 1.6,
            diffusion0: 0.002,
            walls: WallChoice::Rigid,
            feedback: true,
            scale_modes: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VowelEntry {
    pub label: String,
    pub area: PathBuf,
    pub mesh: Option<PathBuf>,
    pub audio: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub global: GlobalParams,
    pub glottis: TwoMassParams,
    /// Mass, damping, stiffness of the vibrating walls.
    pub wall_model: WallModel,
    pub vowels: Vec<VowelEntry>,
}

enum Section {
    None,
    Global,
    Glottis,
    Walls,
    Vowel(usize),
}

impl CompareConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut global = GlobalParams::default();
        let mut glottis = TwoMassParams::default();
        let (mut mass, mut damping, mut stiffness) = match WallModel::SOFT_TISSUE {
            WallModel::Vibrating {
                mass,
                damping,
                stiffness,
            } => (mass, damping, stiffness),
            WallModel::Rigid => unreachable!(),
        };
        let mut vowels: Vec<VowelEntry> = Vec::new();
        let mut section = Section::None;
        let (mut have_c, mut have_alpha) = (false, false);

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.find(['#', ';']).map_or(raw, |i| &raw[..i]).trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |msg: String| ConfigError::Syntax { line, msg };
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| syntax("unterminated section header".into()))?
                    .trim();
                section = match name {
                    "global" => Section::Global,
                    "glottis" => Section::Glottis,
                    "walls" => Section::Walls,
                    _ => match name.strip_prefix("vowel") {
                        Some(label)
                            if label.starts_with(char::is_whitespace)
                                && !label.trim().is_empty() =>
                        {
                            let label = label.trim().to_string();
                            if vowels.iter().any(|v| v.label == label) {
                                return Err(syntax(format!("duplicate vowel {label}")));
                            }
                            vowels.push(VowelEntry {
                                label,
                                area: PathBuf::new(),
                                mesh: None,
                                audio: Vec::new(),
                            });
                            Section::Vowel(vowels.len() - 1)
                        }
                        _ => return Err(syntax(format!("unknown section [{name}]"))),
                    },
                };
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key = value, got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || -> Result<f64, ConfigError> {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| syntax(format!("{key}: '{value}' is not a finite number")))
            };
            let unknown = || syntax(format!("unknown key '{key}'"));
            match section {
                Section::None => return Err(syntax(format!("'{key}' appears before any section"))),
                Section::Global => match key {
                    "c" => {
                        global.c = num()?;
                        have_c = true;
                    }
                    "alpha" => {
                        global.alpha = num()?;
                        have_alpha = true;
                    }
                    "glottis_admittance" => global.glottis_admittance = num()?,
                    "fs" => global.fs = num()?,
                    "duration" => global.duration = num()?,
                    "settle" => global.settle = num()?,
                    "d0" => global.d0 = num()?,
                    "diffusion0" => global.diffusion0 = num()?,
                    "segments" => {
                        global.segments = value
                            .parse()
                            .map_err(|_| syntax(format!("segments: '{value}' is not a count")))?
                    }
                    "scale_modes" => {
                        global.scale_modes = value
                            .parse()
                            .map_err(|_| syntax(format!("scale_modes: '{value}' is not a count")))?
                    }
                    "walls" => {
                        global.walls = match value {
                            "rigid" => WallChoice::Rigid,
                            "vibrating" => WallChoice::Vibrating,
                            _ => {
                                return Err(syntax(format!(
                                    "walls must be rigid or vibrating, got '{value}'"
                                )))
                            }
                        }
                    }
                    "feedback" => {
                        global.feedback = value.parse().map_err(|_| {
                            syntax(format!("feedback must be true or false, got '{value}'"))
                        })?
                    }
                    _ => return Err(unknown()),
                },
                Section::Glottis => {
                    let g = &mut glottis;
                    let slot = match key {
                        "m1" => &mut g.m1,
                        "m2" => &mut g.m2,
                        "k1" => &mut g.k1,
                        "k2" => &mut g.k2,
                        "kc" => &mut g.kc,
                        "zeta1" => &mut g.zeta1,
                        "zeta2" => &mut g.zeta2,
                        "contact_damping" => &mut g.contact_damping,
                        "contact_stiffness" => &mut g.contact_stiffness,
                        "rest_area1" => &mut g.rest_area1,
                        "rest_area2" => &mut g.rest_area2,
                        "length" => &mut g.length,
                        "thickness1" => &mut g.thickness1,
                        "thickness2" => &mut g.thickness2,
                        "p_sub" => &mut g.p_sub,
                        "rho" => &mut g.rho,
                        _ => return Err(unknown()),
                    };
                    *slot = num()?;
                }
                Section::Walls => match key {
                    "mass" => mass = num()?,
                    "damping" => damping = num()?,
                    "stiffness" => stiffness = num()?,
                    _ => return Err(unknown()),
                },
                Section::Vowel(i) => {
                    let v = &mut vowels[i];
                    let path = |s: &str| base.join(s.trim());
                    match key {
                        "area" => v.area = path(value),
                        "mesh" => v.mesh = Some(path(value)),
                        "audio" => {
                            v.audio = value
                                .split(',')
                                .filter(|s| !s.trim().is_empty())
                                .map(path)
                                .collect();
                        }
                        _ => return Err(unknown()),
                    }
                }
            }
        }

        if !have_c || !have_alpha {
            return Err(ConfigError::Invalid(
                "[global] must set both c and alpha".into(),
            ));
        }
        if let Some(v) = vowels.iter().find(|v| v.area.as_os_str().is_empty()) {
            return Err(ConfigError::Invalid(format!(
                "vowel {} has no area function",
                v.label
            )));
        }
        let cfg = Self {
            global,
            glottis,
            wall_model: WallModel::Vibrating {
                mass,
                damping,
                stiffness,
            },
            vowels,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.global;
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(g.c > 0.0) || g.alpha < 0.0 || g.glottis_admittance < 0.0 {
            return bad(format!(
                "need c > 0, alpha >= 0, glottis_admittance >= 0 (got {}, {}, {})",
                g.c, g.alpha, g.glottis_admittance
            ));
        }
        if !(g.duration > g.settle && g.settle >= 0.0) {
            return bad(format!(
                "need 0 <= settle < duration (got {}, {})",
                g.settle, g.duration
            ));
        }
        if g.scale_modes == 0 {
            return bad("scale_modes must be positive".into());
        }
        self.tube_params()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.glottis
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn helmholtz_params(&self) -> crate::helmholtz3d::HelmholtzParams {
        crate::helmholtz3d::HelmholtzParams {
            c: self.global.c,
            alpha: self.global.alpha,
            glottis_admittance: self.global.glottis_admittance,
        }
    }

    pub fn webster_params(&self) -> crate::webster1d::WebsterParams {
        crate::webster1d::WebsterParams {
            c: self.global.c,
            alpha: self.global.alpha,
            glottis_admittance: self.global.glottis_admittance,
            ..Default::default()
        }
    }

    pub fn tube_params(&self) -> crate::synth_td::TubeParams {
        let g = &self.global;
        crate::synth_td::TubeParams {
            c: g.c,
            rho: self.glottis.rho,
            d0: g.d0,
            diffusion0: g.diffusion0,
            n_segments: g.segments,
            fs: g.fs,
            walls: match g.walls {
                WallChoice::Rigid => WallModel::Rigid,
                WallChoice::Vibrating => self.wall_model,
            },
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
[global]
c = 343   ; speed of sound
alpha = 0.0001
walls = vibrating

[glottis]
p_sub = 600

[walls]
stiffness = 1e6

[vowel /a/]
area = a.area
mesh = meshes/a.mesh
audio = a1.wav, a2.wav,

[vowel /i/]
area = /abs/i.area
";

    #[test]
    fn parses_sample() {
        let cfg = CompareConfig::parse(SAMPLE, Path::new("/base")).unwrap();
        assert_eq!(cfg.global.c, 343.0);
        assert_eq!(cfg.global.walls, WallChoice::Vibrating);
        assert_eq!(cfg.glottis.p_sub, 600.0);
        assert!(
            matches!(cfg.wall_model, WallModel::Vibrating { stiffness, .. } if stiffness == 1e6)
        );
        assert_eq!(cfg.vowels.len(), 2);
        let a = &cfg.vowels[0];
        assert_eq!(a.label, "/a/");
        assert_eq!(a.mesh.as_deref(), Some(Path::new("/base/meshes/a.mesh")));
        assert_eq!(
            a.audio,
            vec![PathBuf::from("/base/a1.wav"), PathBuf::from("/base/a2.wav")]
        );
        assert_eq!(cfg.vowels[1].area, PathBuf::from("/abs/i.area"));
        assert!(matches!(
            cfg.tube_params().walls,
            WallModel::Vibrating { .. }
        ));
    }

    fn err(text: &str) -> ConfigError {
        CompareConfig::parse(text, Path::new("")).unwrap_err()
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            err("[global]\nc = 350\n"),
            ConfigError::Invalid(_)
        ));
        assert!(matches!(
            err("[global\n"),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            err("[global]\nc 350\n"),
            ConfigError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            err("[global]\nc = fast\n"),
            ConfigError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            err("[global]\nspeed = 1\n"),
            ConfigError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            err("c = 350\n"),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(err("[nasal]\n"), ConfigError::Syntax { .. }));
        assert!(matches!(err("[vowel]\n"), ConfigError::Syntax { .. }));
        let dup = "[global]\nc=1\nalpha=0\n[vowel /a/]\narea=x\n[vowel /a/]\narea=y\n";
        assert!(matches!(err(dup), ConfigError::Syntax { line: 6, .. }));
        assert!(matches!(
            err("[global]\nc=1\nalpha=0\n[vowel /a/]\nmesh=x\n"),
            ConfigError::Invalid(_)
        ));
        assert!(matches!(
            err("[global]\nc=1\nalpha=0\nsettle=1\nduration=0.5\n"),
            ConfigError::Invalid(_)
        ));
    }

    #[test]
    fn empty_vowel_list_is_allowed() {
        let cfg = CompareConfig::parse("[global]\nc=350\nalpha=0\n", Path::new("")).unwrap();
        assert!(cfg.vowels.is_empty());
    }
}
