use num_complex::Complex64;

/// All roots of `c[0] z^n + c[1] z^(n-1) + … + c[n]` by Aberth–Ehrlich
/// simultaneous iteration. Returns `None` if `c[0] == 0` or the iteration
/// does not settle.
pub fn polynomial_roots(c: &[f64]) -> Option<Vec<Complex64>> {
    let n = c.len().checked_sub(1)?;
    if c[0] == 0.0 {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let monic: Vec<f64> = c.iter().map(|v| v / c[0]).collect();
    let radius = monic[1..]
        .iter()
        .enumerate()
        .map(|(k, a)| a.abs().powf(1.0 / (k + 1) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            worst = worst.max(step.norm() / z[i].norm().max(1e-300));
        }
        if worst < 1e-14 {
            return Some(z);
        }
    }
    // Accept if the residuals are at rounding level even if the last steps
    // still jitter.
    let ok = z.iter().all(|&zi| {
        let (p, _) = horner(&monic, zi);
        let scale: f64 = monic
            .iter()
            .enumerate()
            .map(|(k, a)| a.abs() * zi.norm().powi((n - k) as i32))
            .sum();
        p.norm() <= 1e-10 * scale
    });
    ok.then_some(z)
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(c[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in &c[1..] {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut r: Vec<Complex64>) -> Vec<Complex64> {
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        r
    }

    #[test]
    fn quadratic() {
        let r = sorted(polynomial_roots(&[1.0, -3.0, 2.0]).unwrap());
        assert!((r[0] - 1.0).norm() < 1e-12 && (r[1] - 2.0).norm() < 1e-12);
    }

    #[test]
    fn complex_pair() {
        let r = sorted(polynomial_roots(&[1.0, 0.0, 1.0]).unwrap());
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let mut c = vec![0.0; 13];
        c[0] = 1.0;
        c[12] = -1.0;
        let r = polynomial_roots(&c).unwrap();
        assert_eq!(r.len(), 12);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(12) - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn leading_zero_rejected() {
        assert!(polynomial_roots(&[0.0, 1.0]).is_none());
        assert_eq!(polynomial_roots(&[2.0]).unwrap().len(), 0);
    }
}
