use super::FormantError;

/// Biased autocorrelation `r[k] = Σ x[n]x[n+k]` for `k = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| x.iter().zip(&x[k.min(x.len())..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// Levinson–Durbin recursion on an autocorrelation sequence.
///
/// Returns the predictor coefficients `a[1..=p]` of `A(z) = 1 + Σ a_k z^-k`
/// and the final prediction error (same units as `r`). Reflection
/// coefficients stay inside the unit disk, so `A(z)` is minimum phase.
pub fn levinson(r: &[f64], order: usize) -> Result<(Vec<f64>, f64), FormantError> {
    if r.len() <= order {
        return Err(FormantError::Order {
            order,
            frame: r.len(),
        });
    }
    if !(r[0] > 0.0) || !r[0].is_finite() {
        return Err(FormantError::Degenerate);
    }
    let mut a = vec![0.0; order];
    let mut tmp = vec![0.0; order];
    let mut err = r[0];
    for i in 0..order {
        let acc = r[i + 1] + (0..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        if !(k.abs() < 1.0) {
            // Perfectly predictable (or numerically singular) beyond this
            // point; the remaining coefficients stay zero.
            break;
        }
        tmp[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = tmp[j] + k * tmp[i - 1 - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
    }
    Ok((a, err))
}

/// Autocorrelation-method linear prediction of `frame`.
///
/// Returns `(a[1..=order], residual_energy)`. The prediction gain of the fit
/// is `Σx² / residual_energy`.
pub fn lpc(frame: &[f64], order: usize) -> Result<(Vec<f64>, f64), FormantError> {
    if order < 2 || frame.len() <= 2 * order {
        return Err(FormantError::Order {
            order,
            frame: frame.len(),
        });
    }
    let r = autocorrelation(frame, order);
    levinson(&r, order)
}
