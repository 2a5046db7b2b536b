//! Webster resonances of an area function, and centreline length scaling
//! against a reference resonance set.
//!
//! Weak form on `[0, L]` (multiplying the horn equation by `c²AΨ`):
//!
//! ```text
//! λ² ∫ (A/Σ²) ΦΨ + λ [2πc²α ∫ WΦΨ + (c g A(0)/Σ(0)) Φ(0)Ψ(0)] + c² ∫ A Φ'Ψ' = 0
//! ```
//!
//! with `Φ(L) = 0`. Σ acts only as an effective sound speed correction `cΣ`,
//! including in the glottis boundary term, so a uniform Σ scales every
//! eigenvalue exactly when `α = 0`.

use std::f64::consts::PI;

use crate::geometry::{AreaFunction, GeometryError};
use crate::helmholtz3d::{DEFAULT_GLOTTIS_ADMITTANCE, DEFAULT_SOUND_SPEED};
use crate::numlin::{qep_solve, QepOptions, SparseMatrix, TripletBuilder};
use crate::resonance::{Method, ResonanceError, ResonanceSet};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WebsterParams {
    /// Sound speed (m/s).
    pub c: f64,
    /// Wall dissipation coefficient, same meaning as in the 3D problem.
    pub alpha: f64,
    /// Glottis admittance relative to a plane wave.
    pub glottis_admittance: f64,
    /// The area function is resampled to at least this many elements.
    pub min_elements: usize,
}

impl Default for WebsterParams {
    fn default() -> Self {
        Self {
            c: DEFAULT_SOUND_SPEED,
            alpha: 0.0,
            glottis_admittance: DEFAULT_GLOTTIS_ADMITTANCE,
            min_elements: 200,
        }
    }
}

impl WebsterParams {
    fn validate(&self) -> Result<(), GeometryError> {
        if !(self.c > 0.0)
            || !(self.alpha >= 0.0)
            || !(self.glottis_admittance >= 0.0)
            || self.min_elements < 1
        {
            return Err(GeometryError::InvalidDimensions(format!(
                "invalid Webster parameters {self:?}"
            )));
        }
        Ok(())
    }
}

/// Mass, damping and stiffness over nodes `0..N` (node `N` at the lips is
/// eliminated).
pub fn assemble(
    af: &AreaFunction,
    params: &WebsterParams,
) -> Result<[SparseMatrix; 3], GeometryError> {
    params.validate()?;
    let n_el = params.min_elements.max(af.len() - 1);
    let l = af.length();
    let h = l / n_el as f64;
    let c2 = params.c * params.c;
    let n = n_el; // free nodes 0..n_el-1
    let mut m = TripletBuilder::with_capacity(n, 4 * n);
    let mut d = TripletBuilder::with_capacity(n, 4 * n + 1);
    let mut k = TripletBuilder::with_capacity(n, 4 * n);
    for e in 0..n_el {
        let mid = af.at((e as f64 + 0.5) * h);
        let mass = mid.area / (mid.sigma * mid.sigma);
        let damp = 2.0 * PI * params.alpha * c2 * mid.circumference;
        let stiff = c2 * mid.area / h;
        for (a, na) in [(0usize, e), (1, e + 1)] {
            for (b, nb) in [(0usize, e), (1, e + 1)] {
                if na >= n || nb >= n {
                    continue;
                }
                let consistent = if a == b { h / 3.0 } else { h / 6.0 };
                m.add(na, nb, mass * consistent);
                if damp != 0.0 {
                    d.add(na, nb, damp * consistent);
                }
                k.add(na, nb, if a == b { stiff } else { -stiff });
            }
        }
    }
    let g0 = af.samples()[0];
    let robin = params.c * params.glottis_admittance * g0.area / g0.sigma;
    if robin != 0.0 {
        d.add(0, 0, robin);
    }
    Ok([m.build(), d.build(), k.build()])
}

/// The `k` lowest Webster resonances (W_R).
pub fn webster_resonances(
    af: &AreaFunction,
    params: &WebsterParams,
    k: usize,
) -> Result<ResonanceSet, Error> {
    let [m, c, stiff] = assemble(af, params)?;
    let nev = (2 * k + 2).min(2 * m.dim());
    let pairs = qep_solve(&m, &c, &stiff, nev, &QepOptions::default())?;
    Ok(ResonanceSet::from_eigenpairs(
        Method::WebsterResonance,
        &pairs,
        k,
        format!(
            "area function (L={} m), c={}, alpha={}, g={}",
            af.length(),
            params.c,
            params.alpha,
            params.glottis_admittance
        ),
    ))
}

/// Settings for [`scale_to_reference`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthScaling {
    /// Number of lowest modes whose mean relative difference is zeroed.
    pub modes: usize,
    pub bracket: (f64, f64),
    /// Absolute tolerance on the scale factor.
    pub tol: f64,
}

impl Default for LengthScaling {
    fn default() -> Self {
        Self {
            modes: 3,
            bracket: (0.5, 2.0),
            tol: 1e-6,
        }
    }
}

/// Mean of `(w_k − h_k)/h_k` over the first `modes` entries.
pub fn mean_relative_difference(
    w: &ResonanceSet,
    href: &ResonanceSet,
    modes: usize,
) -> Result<f64, ResonanceError> {
    for set in [w, href] {
        if set.modes.len() < modes {
            return Err(ResonanceError::TooFewModes {
                needed: modes,
                available: set.modes.len(),
            });
        }
    }
    Ok(w.modes
        .iter()
        .zip(&href.modes)
        .take(modes)
        .map(|(a, b)| (a.freq - b.freq) / b.freq)
        .sum::<f64>()
        / modes as f64)
}

/// [`scale_to_reference`] with three modes on `[0.5, 2]`.
pub fn scale_to_helmholtz(
    af: &AreaFunction,
    href: &ResonanceSet,
    params: &WebsterParams,
) -> Result<(f64, ResonanceSet), Error> {
    scale_to_reference(af, href, params, &LengthScaling::default())
}

/// Finds the centreline stretch `γ` for which the lowest Webster resonances
/// of the stretched tract match `href` on average, by bisection. Returns `γ`
/// and the stretched tract's resonances labelled S_R.
pub fn scale_to_reference(
    af: &AreaFunction,
    href: &ResonanceSet,
    params: &WebsterParams,
    opts: &LengthScaling,
) -> Result<(f64, ResonanceSet), Error> {
    if href.modes.len() < opts.modes {
        return Err(ResonanceError::TooFewModes {
            needed: opts.modes,
            available: href.modes.len(),
        }
        .into());
    }
    let eval = |gamma: f64| -> Result<(f64, ResonanceSet), Error> {
        let w = webster_resonances(&af.length_scaled(gamma)?, params, opts.modes)?;
        Ok((mean_relative_difference(&w, href, opts.modes)?, w))
    };
    let (mut lo, mut hi) = opts.bracket;
    let (f_lo, w_lo) = eval(lo)?;
    let (f_hi, w_hi) = eval(hi)?;
    if f_lo == 0.0 {
        return Ok((lo, w_lo.relabeled(Method::ScaledWebsterResonance)));
    }
    if f_hi == 0.0 {
        return Ok((hi, w_hi.relabeled(Method::ScaledWebsterResonance)));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoScaleRoot { lo, hi });
    }
    let lo_sign = f_lo.signum();
    while hi - lo > opts.tol * 0.1 {
        let mid = 0.5 * (lo + hi);
        let (f, _) = eval(mid)?;
        if f == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let (_, w) = eval(gamma)?;
    let mut scaled = w.relabeled(Method::ScaledWebsterResonance);
    scaled.source = format!("{} scaled by {gamma}", scaled.source);
    Ok((gamma, scaled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_tube, TubeShape};

    fn tube() -> AreaFunction {
        make_tube(TubeShape::Cylinder, 0.175, 3e-4, 20).unwrap()
    }

    #[test]
    fn uniform_tube_is_quarter_wave() {
        let rs = webster_resonances(&tube(), &WebsterParams::default(), 4).unwrap();
        assert_eq!(rs.method, Method::WebsterResonance);
        for (i, m) in rs.modes.iter().take(3).enumerate() {
            let want = (2 * i + 1) as f64 * 500.0;
            assert!(
                (m.freq / want - 1.0).abs() < 0.01,
                "mode {i}: {} vs {want}",
                m.freq
            );
            assert!(m.lambda.re < 0.0);
        }
    }

    #[test]
    fn uniform_sigma_scales_frequencies() {
        let p = WebsterParams::default();
        let base = webster_resonances(&tube(), &p, 3).unwrap();
        let slow = webster_resonances(&tube().with_uniform_sigma(0.9).unwrap(), &p, 3).unwrap();
        for (a, b) in base.modes.iter().zip(&slow.modes) {
            assert!(
                (b.freq / (0.9 * a.freq) - 1.0).abs() < 1e-6,
                "{} vs {}",
                b.freq,
                a.freq
            );
        }
    }

    #[test]
    fn glottis_damping_is_a_single_entry() {
        let [_, c, _] = assemble(&tube(), &WebsterParams::default()).unwrap();
        assert_eq!(c.support(), vec![0]);
        let [_, c, _] = assemble(
            &tube(),
            &WebsterParams {
                glottis_admittance: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.nnz(), 0);
    }

    #[test]
    fn fixed_point_scale_is_one() {
        let p = WebsterParams::default();
        let w = webster_resonances(&tube(), &p, 3).unwrap();
        let (gamma, s) = scale_to_helmholtz(&tube(), &w, &p).unwrap();
        assert!((gamma - 1.0).abs() <= 1e-6, "gamma = {gamma}");
        assert_eq!(s.method, Method::ScaledWebsterResonance);
    }

    #[test]
    fn doubled_length_reference() {
        let p = WebsterParams::default();
        let long = make_tube(TubeShape::Cylinder, 0.35, 3e-4, 20).unwrap();
        let href = webster_resonances(&long, &p, 3).unwrap();
        let (gamma, s) = scale_to_helmholtz(&tube(), &href, &p).unwrap();
        assert!((gamma / 2.0 - 1.0).abs() < 0.01, "gamma = {gamma}");
        assert!(mean_relative_difference(&s, &href, 3).unwrap().abs() < 1e-4);
    }

    #[test]
    fn scaling_needs_three_reference_modes() {
        let p = WebsterParams::default();
        let href = webster_resonances(&tube(), &p, 2).unwrap();
        assert!(matches!(
            scale_to_helmholtz(&tube(), &href, &p),
            Err(Error::Resonance(ResonanceError::TooFewModes {
                needed: 3,
                available: 2
            }))
        ));
    }

    #[test]
    fn out_of_bracket_reference() {
        let p = WebsterParams::default();
        let far = make_tube(TubeShape::Cylinder, 0.175 * 3.0, 3e-4, 20).unwrap();
        let href = webster_resonances(&far, &p, 3).unwrap();
        assert!(matches!(
            scale_to_helmholtz(&tube(), &href, &p),
            Err(Error::NoScaleRoot { .. })
        ));
    }
}
