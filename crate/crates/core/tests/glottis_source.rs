use rustfft::{num_complex::Complex, FftPlanner};
use vtres_core::glottis::{self, simulate_unloaded, GlottalState, TwoMassParams};

/// Frequency of the strongest spectral line between 50 and 500 Hz, with
/// parabolic interpolation between bins.
fn dominant_frequency(x: &[f64], fs: f64) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let n = x.len().next_power_of_two() * 4;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin = fs / n as f64;
    let lo = (50.0 / bin) as usize;
    let hi = (500.0 / bin) as usize;
    let k = (lo..hi)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap();
    let (a, b, c) = (buf[k - 1].norm(), buf[k].norm(), buf[k + 1].norm());
    (k as f64 + 0.5 * (a - c) / (a - 2.0 * b + c)) * bin
}

#[test]
fn phonation_pitch_is_in_the_speech_range() {
    let fs = 44100.0;
    let flow = simulate_unloaded(&TwoMassParams::default(), fs, 1.0).unwrap();
    let tail = &flow[(0.3 * fs) as usize..];
    let f0 = dominant_frequency(tail, fs);
    assert!((80.0..=200.0).contains(&f0), "f0 = {f0}");
    // zero crossings of the AC part agree with the spectral estimate
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let ups = tail
        .windows(2)
        .filter(|w| w[0] < mean && w[1] >= mean)
        .count() as f64;
    let f_zc = ups / (tail.len() as f64 / fs);
    assert!((f_zc / f0 - 1.0).abs() < 0.05, "{f_zc} vs {f0}");
}

#[test]
fn pitch_does_not_depend_on_sample_rate() {
    let f = |fs: f64| {
        let flow = simulate_unloaded(&TwoMassParams::default(), fs, 1.0).unwrap();
        dominant_frequency(&flow[(0.3 * fs) as usize..], fs)
    };
    let (a, b) = (f(16000.0), f(44100.0));
    assert!((a / b - 1.0).abs() < 0.02, "{a} vs {b}");
}

#[test]
fn no_lung_pressure_means_silence() {
    let params = TwoMassParams {
        p_sub: 0.0,
        ..Default::default()
    };
    let dt = 1.0 / 44100.0;
    let mut state = GlottalState::initial();
    let start = state.x1.abs();
    for _ in 0..44100 {
        let (next, flow) = glottis::step(&state, 0.0, &params, dt).unwrap();
        assert_eq!(flow, 0.0);
        state = next;
    }
    assert!(
        state.x1.abs() < 1e-3 * start && state.x2.abs() < 1e-3 * start,
        "{state:?}"
    );
}

#[test]
fn more_lung_pressure_more_flow() {
    let rms = |p_sub: f64| {
        let flow = simulate_unloaded(
            &TwoMassParams {
                p_sub,
                ..Default::default()
            },
            16000.0,
            0.6,
        )
        .unwrap();
        let tail = &flow[3200..];
        (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt()
    };
    assert!(rms(1200.0) > rms(800.0));
}
