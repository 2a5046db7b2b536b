//! Two-mass vocal fold source.
//!
//! Each fold is a lower mass `m1` and an upper mass `m2` on springs, coupled
//! by `kc`, with a stiffer contact spring and extra damping once a section
//! closes. The lower mass is driven by a Bernoulli pressure that depends on
//! the narrowest section; flow separates at the narrowest point, so the upper
//! section sees the supraglottal (tract inlet) pressure.
//!
//! The default parameters are the classic two-mass values for a male voice.
//! They are configuration, not measured data.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GlottisError {
    #[error("glottal state became non-finite (reduce the time step)")]
    NonFinite,
    #[error("time step {0} s outside (0, 1/8000]")]
    TimeStep(f64),
    #[error("invalid two-mass parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMassParams {
    /// Lower and upper masses (kg).
    pub m1: f64,
    pub m2: f64,
    /// Spring stiffnesses (N/m).
    pub k1: f64,
    pub k2: f64,
    pub kc: f64,
    /// Damping ratios while open.
    pub zeta1: f64,
    pub zeta2: f64,
    /// Added to the damping ratio of a closed section.
    pub contact_damping: f64,
    /// Contact spring stiffness as a multiple of `k1`/`k2`.
    pub contact_stiffness: f64,
    /// Rest areas of the two sections (m²).
    pub rest_area1: f64,
    pub rest_area2: f64,
    /// Fold length (m).
    pub length: f64,
    /// Thicknesses of the two masses (m).
    pub thickness1: f64,
    pub thickness2: f64,
    /// Subglottal pressure (Pa).
    pub p_sub: f64,
    /// Air density (kg/m³).
    pub rho: f64,
}

impl Default for TwoMassParams {
    fn default() -> Self {
        Self {
            m1: 0.125e-3,
            m2: 0.025e-3,
            k1: 80.0,
            k2: 8.0,
            kc: 25.0,
            zeta1: 0.1,
            zeta2: 0.6,
            contact_damping: 1.0,
            contact_stiffness: 3.0,
            rest_area1: 0.05e-4,
            rest_area2: 0.05e-4,
            length: 1.4e-2,
            thickness1: 0.25e-2,
            thickness2: 0.05e-2,
            p_sub: 800.0,
            rho: 1.2,
        }
    }
}

impl TwoMassParams {
    pub fn validate(&self) -> Result<(), GlottisError> {
        let positive = [
            ("m1", self.m1),
            ("m2", self.m2),
            ("k1", self.k1),
            ("k2", self.k2),
            ("kc", self.kc),
            ("length", self.length),
            ("thickness1", self.thickness1),
            ("thickness2", self.thickness2),
            ("rho", self.rho),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(GlottisError::Params(format!(
                "{name} must be positive, got {v}"
            )));
        }
        let non_negative = [
            ("zeta1", self.zeta1),
            ("zeta2", self.zeta2),
            ("contact_damping", self.contact_damping),
            ("contact_stiffness", self.contact_stiffness),
            ("rest_area1", self.rest_area1),
            ("rest_area2", self.rest_area2),
            ("p_sub", self.p_sub),
        ];
        if let Some((name, v)) = non_negative
            .iter()
            .find(|(_, v)| !(*v >= 0.0 && v.is_finite()))
        {
            return Err(GlottisError::Params(format!(
                "{name} must be non-negative, got {v}"
            )));
        }
        Ok(())
    }

    fn areas(&self, x1: f64, x2: f64) -> (f64, f64) {
        (
            self.rest_area1 + 2.0 * self.length * x1,
            self.rest_area2 + 2.0 * self.length * x2,
        )
    }

    /// Quasi-steady Bernoulli flow through the narrowest open section (m³/s).
    pub fn flow(&self, area1: f64, area2: f64, p_inlet: f64) -> f64 {
        let a_min = area1.min(area2);
        let dp = self.p_sub - p_inlet;
        if a_min <= 0.0 || dp <= 0.0 {
            return 0.0;
        }
        a_min * (2.0 * dp / self.rho).sqrt()
    }
}

/// Displacements (m, positive opens the glottis), velocities and the flow
/// at the end of the last step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GlottalState {
    pub x1: f64,
    pub v1: f64,
    pub x2: f64,
    pub v2: f64,
    /// Glottal volume velocity (m³/s).
    pub flow: f64,
}

impl GlottalState {
    /// Starting state with the lower mass slightly displaced, which lets
    /// self-oscillation build up when the subglottal pressure is above
    /// threshold.
    pub fn initial() -> Self {
        Self {
            x1: 1e-4,
            ..Default::default()
        }
    }

    pub fn areas(&self, params: &TwoMassParams) -> (f64, f64) {
        params.areas(self.x1, self.x2)
    }
}

const SUBSTEPS: usize = 4;

fn derivative(p: &TwoMassParams, y: [f64; 4], p_inlet: f64) -> [f64; 4] {
    let [x1, v1, x2, v2] = y;
    let (a1, a2) = p.areas(x1, x2);
    let a_min = a1.min(a2);
    let dp = p.p_sub - p_inlet;
    let p1 = if a1 <= 0.0 {
        0.0
    } else if a_min <= 0.0 {
        p.p_sub
    } else {
        p_inlet + dp * (1.0 - (a_min / a1).powi(2))
    };
    let p2 = if a2 > 0.0 { p_inlet } else { 0.0 };

    let section = |m: f64, k: f64, zeta: f64, area: f64, x: f64, v: f64| {
        let closed = area <= 0.0;
        let zeta = if closed {
            zeta + p.contact_damping
        } else {
            zeta
        };
        let contact = if closed {
            p.contact_stiffness * k * area / (2.0 * p.length)
        } else {
            0.0
        };
        -(2.0 * zeta * (k * m).sqrt() * v + k * x + contact)
    };
    let f1 =
        p.length * p.thickness1 * p1 + section(p.m1, p.k1, p.zeta1, a1, x1, v1) - p.kc * (x1 - x2);
    let f2 =
        p.length * p.thickness2 * p2 + section(p.m2, p.k2, p.zeta2, a2, x2, v2) - p.kc * (x2 - x1);
    [v1, f1 / p.m1, v2, f2 / p.m2]
}

/// Advances the folds by `dt` with the inlet pressure `p_inlet` (Pa) held
/// fixed, using classical Runge–Kutta on four substeps. Returns the new state
/// and its glottal flow.
pub fn step(
    state: &GlottalState,
    p_inlet: f64,
    params: &TwoMassParams,
    dt: f64,
) -> Result<(GlottalState, f64), GlottisError> {
    if !(dt > 0.0 && dt <= 1.0 / 8000.0) {
        return Err(GlottisError::TimeStep(dt));
    }
    let h = dt / SUBSTEPS as f64;
    let mut y = [state.x1, state.v1, state.x2, state.v2];
    let axpy =
        |y: [f64; 4], a: f64, k: [f64; 4]| std::array::from_fn::<f64, 4, _>(|i| y[i] + a * k[i]);
    for _ in 0..SUBSTEPS {
        let k1 = derivative(params, y, p_inlet);
        let k2 = derivative(params, axpy(y, 0.5 * h, k1), p_inlet);
        let k3 = derivative(params, axpy(y, 0.5 * h, k2), p_inlet);
        let k4 = derivative(params, axpy(y, h, k3), p_inlet);
        y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(GlottisError::NonFinite);
    }
    let (a1, a2) = params.areas(y[0], y[2]);
    let flow = params.flow(a1, a2, p_inlet);
    Ok((
        GlottalState {
            x1: y[0],
            v1: y[1],
            x2: y[2],
            v2: y[3],
            flow,
        },
        flow,
    ))
}

/// Runs the folds on their own (no tract load) and returns the flow series.
pub fn simulate_unloaded(
    params: &TwoMassParams,
    fs: f64,
    duration: f64,
) -> Result<Vec<f64>, GlottisError> {
    params.validate()?;
    let n = (duration * fs).round() as usize;
    let mut state = GlottalState::initial();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (next, u) = step(&state, 0.0, params, 1.0 / fs)?;
        state = next;
        out.push(u);
    }
    Ok(out)
}
