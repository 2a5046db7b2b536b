//! Time-domain 1D tube acoustics with wall losses, optional yielding walls
//! and a glottal source.
//!
//! State variables follow the scaled convention `u = A·v/c` (volume velocity
//! over c) and `p = ρ/ρ0 − 1`:
//!
//! ```text
//! (1/A) ∂u/∂t + c ∂p/∂x = −d(A)u + D(A)∂²u/∂x²,   d = d0 A^(−3/2), D = D0 A^(−3/2)
//! A ∂p/∂t + c ∂u/∂x = −W ∂y/∂t
//! m ÿ + b ẏ + k y = ρ0c² p                         (per unit wall area)
//! u(0,t) = u_g(t)/c,  p(L,t) = 0
//! ```
//!
//! Staggered grid: `p` on the `N+1` section boundaries (half cells at both
//! ends), `u` on the `N` section midpoints. Leapfrog in time, with the loss
//! and diffusion terms implicit (one tridiagonal solve per step) and the wall
//! oscillators implicit in their own damping and stiffness. The step is
//! subdivided as needed to stay inside the leapfrog stability limit at the
//! requested output rate.

use crate::formant::Waveform;
use crate::geometry::AreaFunction;
use crate::glottis::{self, GlottalState, GlottisError, TwoMassParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("simulation became unstable at step {step} (t = {time:.6} s)")]
    Unstable { step: usize, time: f64 },
    #[error("invalid tube parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Glottis(#[from] GlottisError),
}

/// Wall mechanics per unit area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallModel {
    Rigid,
    Vibrating {
        /// kg/m²
        mass: f64,
        /// kg/(m²·s)
        damping: f64,
        /// N/m³
        stiffness: f64,
    },
}

impl WallModel {
    /// Soft-tissue wall values commonly used for the vocal tract (not fitted
    /// to any speaker).
    pub const SOFT_TISSUE: WallModel = WallModel::Vibrating {
        mass: 21.0,
        damping: 8000.0,
        stiffness: 845_000.0,
    };
}

/// What the returned waveform records at the lips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSignal {
    /// Time derivative of the lip volume velocity (radiated pressure proxy).
    LipFlowDerivative,
    /// Lip volume velocity (m³/s).
    LipFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipCondition {
    /// `p(L) = 0`.
    Open,
    /// No flow through the lips. Used to check energy conservation.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeParams {
    pub c: f64,
    pub rho: f64,
    /// Wall loss coefficient `d0` (m/s).
    pub d0: f64,
    /// Viscous diffusion coefficient `D0` (m³/s).
    pub diffusion0: f64,
    pub n_segments: usize,
    /// Output sample rate (Hz).
    pub fs: f64,
    pub walls: WallModel,
    pub output: OutputSignal,
    pub lips: LipCondition,
}

impl Default for TubeParams {
    fn default() -> Self {
        Self {
            c: 350.0,
            rho: 1.2,
            d0: 1.6,
            diffusion0: 0.002,
            n_segments: 20,
            fs: 44100.0,
            walls: WallModel::Rigid,
            output: OutputSignal::LipFlowDerivative,
            lips: LipCondition::Open,
        }
    }
}

impl TubeParams {
    /// Rigid, lossless walls.
    pub fn lossless() -> Self {
        Self {
            d0: 0.0,
            diffusion0: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: String| Err(SynthError::Params(m));
        if !(self.c > 0.0 && self.rho > 0.0) {
            return fail(format!(
                "c and rho must be positive ({}, {})",
                self.c, self.rho
            ));
        }
        if !(self.d0 >= 0.0 && self.diffusion0 >= 0.0) {
            return fail(format!(
                "loss coefficients must be non-negative ({}, {})",
                self.d0, self.diffusion0
            ));
        }
        if self.n_segments < 2 {
            return fail(format!("need at least 2 segments, got {}", self.n_segments));
        }
        if !(self.fs >= 8000.0) || !self.fs.is_finite() {
            return fail(format!(
                "sample rate must be at least 8000 Hz, got {}",
                self.fs
            ));
        }
        if let WallModel::Vibrating {
            mass,
            damping,
            stiffness,
        } = self.walls
        {
            if !(mass > 0.0 && damping >= 0.0 && stiffness >= 0.0) {
                return fail(format!("invalid wall model {:?}", self.walls));
            }
        }
        Ok(())
    }
}

/// Glottal excitation.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Volume velocity (m³/s) per output sample, zero after the end.
    Prescribed(Vec<f64>),
    /// Two-mass folds. With `feedback` the tract inlet pressure loads the
    /// folds, otherwise they see zero supraglottal pressure.
    TwoMass {
        params: TwoMassParams,
        feedback: bool,
    },
}

impl Source {
    /// Unit-area impulse: `1/dt` m³/s in the first output sample.
    pub fn impulse(fs: f64) -> Self {
        Source::Prescribed(vec![fs])
    }
}

/// Tube state and stepping.
#[derive(Debug, Clone)]
pub struct TubeSim {
    params: TubeParams,
    dx: f64,
    dt: f64,
    substeps: usize,
    /// Areas at u points (section means) and p points.
    area_u: Vec<f64>,
    area_p: Vec<f64>,
    /// Cell widths of p points (Δx, Δx/2 at the ends).
    width_p: Vec<f64>,
    circ_p: Vec<f64>,
    loss_a: Vec<f64>,
    loss_b: Vec<f64>,
    u: Vec<f64>,
    u_prev: Vec<f64>,
    p: Vec<f64>,
    p_prev: Vec<f64>,
    wall_y: Vec<f64>,
    wall_v: Vec<f64>,
    steps: usize,
    // tridiagonal scratch
    scratch_c: Vec<f64>,
    scratch_d: Vec<f64>,
}

impl TubeSim {
    pub fn new(af: &AreaFunction, params: &TubeParams) -> Result<Self, SynthError> {
        params.validate()?;
        let n = params.n_segments;
        let l = af.length();
        let dx = l / n as f64;
        let area_u = af.section_areas(n);
        let area_p: Vec<f64> = (0..=n)
            .map(|j| match j {
                0 => area_u[0],
                j if j == n => area_u[n - 1],
                j => 0.5 * (area_u[j - 1] + area_u[j]),
            })
            .collect();
        let width_p: Vec<f64> = (0..=n)
            .map(|j| if j == 0 || j == n { 0.5 * dx } else { dx })
            .collect();
        let circ_p = (0..=n)
            .map(|j| af.at(j as f64 * dx).circumference)
            .collect();
        let loss_a = area_u.iter().map(|a| params.d0 / a.sqrt()).collect();
        let loss_b = area_u
            .iter()
            .map(|a| params.diffusion0 / a.sqrt())
            .collect();

        // Gershgorin bound on the squared angular frequencies of the
        // lossless semi-discrete system.
        let c2 = params.c * params.c;
        let omega2 = (0..=n)
            .map(|j| {
                let mut s = 0.0;
                if j > 0 {
                    s += area_u[j - 1];
                }
                if j < n {
                    s += area_u[j];
                }
                2.0 * c2 * s / (dx * area_p[j] * width_p[j])
            })
            .fold(0.0, f64::max);
        let dt_max = 0.9 * 2.0 / omega2.sqrt();
        let dt_out = 1.0 / params.fs;
        let substeps = ((dt_out / dt_max).ceil() as usize).max(1);
        Ok(Self {
            params: *params,
            dx,
            dt: dt_out / substeps as f64,
            substeps,
            area_u,
            area_p,
            width_p,
            circ_p,
            loss_a,
            loss_b,
            u: vec![0.0; n],
            u_prev: vec![0.0; n],
            p: vec![0.0; n + 1],
            p_prev: vec![0.0; n + 1],
            wall_y: vec![0.0; n + 1],
            wall_v: vec![0.0; n + 1],
            steps: 0,
            scratch_c: vec![0.0; n],
            scratch_d: vec![0.0; n],
        })
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn pressure(&self) -> &[f64] {
        &self.p
    }

    pub fn flow(&self) -> &[f64] {
        &self.u
    }

    pub fn wall_displacement(&self) -> &[f64] {
        &self.wall_y
    }

    /// Inlet pressure in Pa.
    pub fn inlet_pressure(&self) -> f64 {
        self.params.rho * self.params.c * self.params.c * self.p[0]
    }

    /// Lip volume velocity in m³/s.
    pub fn lip_flow(&self) -> f64 {
        self.params.c * self.u[self.u.len() - 1]
    }

    /// Discrete acoustic energy `Σ w A p⁺p⁻ + Σ Δx u²/A`, the quantity leapfrog
    /// conserves for a lossless closed tube (`p⁺`, `p⁻` are the pressures
    /// either side of the current `u`).
    pub fn energy(&self) -> f64 {
        let ep: f64 = (0..self.p.len())
            .map(|j| self.width_p[j] * self.area_p[j] * self.p[j] * self.p_prev[j])
            .sum();
        let eu: f64 = (0..self.u.len())
            .map(|j| self.dx * self.u[j] * self.u[j] / self.area_u[j])
            .sum();
        ep + eu
    }

    /// One internal time step with scaled glottal inflow `u_g` (= U_g/c).
    pub fn step(&mut self, u_g: f64) -> Result<(), SynthError> {
        let n = self.u.len();
        let (c, dt, dx) = (self.params.c, self.dt, self.dx);

        // u: explicit pressure gradient, implicit loss and diffusion
        std::mem::swap(&mut self.u, &mut self.u_prev);
        let diffusive = self.params.diffusion0 > 0.0;
        let r = dt / (dx * dx);
        let (cc, dd) = (&mut self.scratch_c, &mut self.scratch_d);
        let mut prev_c = 0.0;
        let mut prev_d = 0.0;
        for j in 0..n {
            let rhs = self.u_prev[j] - dt * c * self.area_u[j] * (self.p[j + 1] - self.p[j]) / dx;
            let b = if diffusive { r * self.loss_b[j] } else { 0.0 };
            // row: lower·u[j-1] + diag·u[j] + upper·u[j+1] = rhs
            let (mut lower, mut diag, mut upper, mut rhs) =
                (-b, 1.0 + dt * self.loss_a[j] + 2.0 * b, -b, rhs);
            if j == 0 {
                // ghost mirrored through u_g at x = 0
                diag += b;
                rhs += 2.0 * b * u_g;
                lower = 0.0;
            }
            if j == n - 1 {
                // zero gradient at the lips
                diag -= b;
                upper = 0.0;
            }
            let denom = diag - lower * prev_c;
            cc[j] = upper / denom;
            dd[j] = (rhs - lower * prev_d) / denom;
            prev_c = cc[j];
            prev_d = dd[j];
        }
        self.u[n - 1] = dd[n - 1];
        for j in (0..n - 1).rev() {
            self.u[j] = dd[j] - cc[j] * self.u[j + 1];
        }

        // walls: implicit in their own damping and stiffness, driven by p^n
        if let WallModel::Vibrating {
            mass,
            damping,
            stiffness,
        } = self.params.walls
        {
            let load = self.params.rho * c * c;
            let denom = 1.0 + dt * damping / mass + dt * dt * stiffness / mass;
            for j in 0..=n {
                let v = (self.wall_v[j]
                    + dt * (load * self.p[j] - stiffness * self.wall_y[j]) / mass)
                    / denom;
                self.wall_v[j] = v;
                self.wall_y[j] += dt * v;
            }
        }

        // p: continuity with the new u
        let last = match self.params.lips {
            LipCondition::Open => n - 1,
            LipCondition::Closed => n,
        };
        let vibrating = matches!(self.params.walls, WallModel::Vibrating { .. });
        self.p_prev.copy_from_slice(&self.p);
        for j in 0..=last {
            let inflow = if j == 0 { u_g } else { self.u[j - 1] };
            let outflow = if j < n { self.u[j] } else { 0.0 };
            let mut dp = -c * (outflow - inflow);
            if vibrating {
                dp -= self.width_p[j] * self.circ_p[j] * self.wall_v[j];
            }
            self.p[j] += dt * dp / (self.area_p[j] * self.width_p[j]);
        }
        if self.params.lips == LipCondition::Open {
            self.p[n] = 0.0;
        }

        self.steps += 1;
        if !self.u[n - 1].is_finite() || !self.p[0].is_finite() {
            return Err(SynthError::Unstable {
                step: self.steps,
                time: self.steps as f64 * dt,
            });
        }
        Ok(())
    }
}

/// Simulates `duration` seconds and returns the lip signal at `params.fs`.
pub fn simulate(
    af: &AreaFunction,
    source: &Source,
    params: &TubeParams,
    duration: f64,
) -> Result<Waveform, SynthError> {
    if !(duration > 0.0) {
        return Err(SynthError::Params(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let mut sim = TubeSim::new(af, params)?;
    let n_out = (duration * params.fs).round() as usize;
    let c = params.c;
    let mut glottal = GlottalState::initial();
    if let Source::TwoMass { params: gp, .. } = source {
        gp.validate()?;
    }
    let mut out = Vec::with_capacity(n_out);
    let mut last_flow = 0.0;
    for k in 0..n_out {
        for _ in 0..sim.substeps {
            let u_g = match source {
                Source::Prescribed(series) => series.get(k).copied().unwrap_or(0.0),
                Source::TwoMass {
                    params: gp,
                    feedback,
                } => {
                    let p_in = if *feedback { sim.inlet_pressure() } else { 0.0 };
                    let (next, flow) = glottis::step(&glottal, p_in, gp, sim.dt)?;
                    glottal = next;
                    flow
                }
            };
            sim.step(u_g / c)?;
        }
        let flow = sim.lip_flow();
        out.push(match params.output {
            OutputSignal::LipFlow => flow,
            OutputSignal::LipFlowDerivative => (flow - last_flow) * params.fs,
        });
        last_flow = flow;
    }
    Ok(Waveform::new(out, params.fs).expect("finite samples at a valid rate"))
}

/// Settings for [`formant_shift_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftExperiment {
    pub source: Source,
    pub duration: f64,
    /// Onset discarded before formant analysis.
    pub settle: f64,
    /// Wall model used for the vibrating run.
    pub walls: WallModel,
}

impl Default for ShiftExperiment {
    fn default() -> Self {
        Self {
            source: Source::TwoMass {
                params: TwoMassParams::default(),
                feedback: true,
            },
            duration: 0.5,
            settle: 0.1,
            walls: WallModel::SOFT_TISSUE,
        }
    }
}

/// F1 of the synthesized vowel with rigid walls and with vibrating walls.
///
/// `params.walls` selects the vibrating model when it is `Vibrating`;
/// otherwise [`WallModel::SOFT_TISSUE`] is used.
pub fn formant_shift_experiment(
    af: &AreaFunction,
    params: &TubeParams,
) -> crate::Result<(f64, f64)> {
    let mut exp = ShiftExperiment::default();
    if matches!(params.walls, WallModel::Vibrating { .. }) {
        exp.walls = params.walls;
    }
    run_shift_experiment(af, params, &exp)
}

pub fn run_shift_experiment(
    af: &AreaFunction,
    params: &TubeParams,
    exp: &ShiftExperiment,
) -> crate::Result<(f64, f64)> {
    let f1 = |walls| -> crate::Result<f64> {
        let w = simulate(
            af,
            &exp.source,
            &TubeParams { walls, ..*params },
            exp.duration,
        )?;
        Ok(crate::formant::formants_from_wave(&w.skip(exp.settle), 1)?.frequencies[0])
    };
    Ok((f1(WallModel::Rigid)?, f1(exp.walls)?))
}
