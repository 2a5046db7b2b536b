use proptest::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use vtres_core::formant::formants_from_wave;
use vtres_core::geometry::{make_tube, AreaFunction, AreaSample, TubeShape};
use vtres_core::glottis::TwoMassParams;
use vtres_core::synth_td::*;
use vtres_core::webster1d::{webster_resonances, WebsterParams};

fn uniform() -> AreaFunction {
    make_tube(TubeShape::Cylinder, 0.175, 3e-4, 20).unwrap()
}

fn horn() -> AreaFunction {
    make_tube(TubeShape::CosineHorn, 0.175, 3e-4, 20).unwrap()
}

fn rigid_w_r(af: &AreaFunction, k: usize) -> Vec<f64> {
    webster_resonances(
        af,
        &WebsterParams {
            alpha: 0.0,
            glottis_admittance: 0.0,
            ..Default::default()
        },
        k,
    )
    .unwrap()
    .frequencies()
}

/// Frequencies of the lowest `k` spectral peaks that reach 5% of the maximum.
fn spectral_peaks(x: &[f64], fs: f64, k: usize) -> Vec<f64> {
    let n = x.len().next_power_of_two() * 2;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm()).collect();
    let max = mag.iter().cloned().fold(0.0, f64::max);
    let bin = fs / n as f64;
    (2..mag.len() - 1)
        .filter(|&i| mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > 0.05 * max)
        .map(|i| i as f64 * bin)
        .take(k)
        .collect()
}

fn glottal() -> Source {
    Source::TwoMass {
        params: TwoMassParams::default(),
        feedback: true,
    }
}

fn f1_f2(af: &AreaFunction, params: &TubeParams) -> (f64, f64) {
    let w = simulate(af, &glottal(), params, 0.5).unwrap().skip(0.1);
    let e = formants_from_wave(&w, 2).unwrap();
    (e.frequencies[0], e.frequencies[1])
}

#[test]
fn lossless_impulse_response_peaks_at_webster_modes() {
    let fs = 44100.0;
    let w = simulate(
        &uniform(),
        &Source::impulse(fs),
        &TubeParams::lossless(),
        0.5,
    )
    .unwrap();
    let peaks = spectral_peaks(w.samples(), fs, 2);
    for (p, r) in peaks.iter().zip(rigid_w_r(&uniform(), 2)) {
        assert!((p / r - 1.0).abs() < 0.03, "peak {p} vs W_R {r}");
    }
}

#[test]
fn lossy_impulse_response_formants_match_webster() {
    for af in [uniform(), horn()] {
        let w = simulate(&af, &Source::impulse(44100.0), &TubeParams::default(), 0.5).unwrap();
        let est = formants_from_wave(&w, 2).unwrap();
        for (f, r) in est.frequencies.iter().zip(rigid_w_r(&af, 2)) {
            assert!((f / r - 1.0).abs() < 0.03, "{f} vs {r}");
        }
    }
}

#[test]
fn default_loss_coefficients_dissipate() {
    let src = glottal();
    for af in [uniform(), horn()] {
        let lossy = simulate(&af, &src, &TubeParams::default(), 0.3).unwrap();
        let lossless = simulate(&af, &src, &TubeParams::lossless(), 0.3).unwrap();
        assert!(lossy.energy() < lossless.energy());
    }
}

#[test]
fn yielding_walls_raise_f1() {
    for af in [uniform(), horn()] {
        let (rigid, vibrating) = formant_shift_experiment(&af, &TubeParams::default()).unwrap();
        assert!(rigid < vibrating, "{rigid} vs {vibrating}");
    }
}

#[test]
fn very_stiff_walls_behave_rigidly() {
    for af in [uniform(), horn()] {
        let stiff = TubeParams {
            walls: WallModel::Vibrating {
                mass: 21.0,
                damping: 8000.0,
                stiffness: 1e12,
            },
            ..Default::default()
        };
        let (rigid, vibrating) = formant_shift_experiment(&af, &stiff).unwrap();
        assert!(
            (rigid - vibrating).abs() < 0.01 * rigid,
            "{rigid} vs {vibrating}"
        );
    }
}

fn impulse_f1_f2(af: &AreaFunction, params: &TubeParams) -> (f64, f64) {
    let w = simulate(af, &Source::impulse(params.fs), params, 0.5).unwrap();
    let e = formants_from_wave(&w, 2).unwrap();
    (e.frequencies[0], e.frequencies[1])
}

// Uses the impulse response: with a voiced source LPC pulls F1 toward the
// nearest voice harmonic, which says nothing about time-step convergence.
#[test]
fn doubling_the_sample_rate_barely_moves_formants() {
    let (a1, a2) = impulse_f1_f2(
        &horn(),
        &TubeParams {
            fs: 22050.0,
            ..Default::default()
        },
    );
    let (b1, b2) = impulse_f1_f2(
        &horn(),
        &TubeParams {
            fs: 44100.0,
            ..Default::default()
        },
    );
    assert!((a1 / b1 - 1.0).abs() < 0.01, "F1 {a1} vs {b1}");
    assert!((a2 / b2 - 1.0).abs() < 0.01, "F2 {a2} vs {b2}");
}

#[test]
fn forty_segments_agree_with_twenty() {
    for measure in [f1_f2, impulse_f1_f2] {
        let (a1, a2) = measure(
            &horn(),
            &TubeParams {
                n_segments: 20,
                ..Default::default()
            },
        );
        let (b1, b2) = measure(
            &horn(),
            &TubeParams {
                n_segments: 40,
                ..Default::default()
            },
        );
        assert!((a1 / b1 - 1.0).abs() < 0.03, "F1 {a1} vs {b1}");
        assert!((a2 / b2 - 1.0).abs() < 0.03, "F2 {a2} vs {b2}");
    }
}

#[test]
fn feedback_toggle_changes_the_output() {
    let with = simulate(&horn(), &glottal(), &TubeParams::default(), 0.1).unwrap();
    let without = simulate(
        &horn(),
        &Source::TwoMass {
            params: TwoMassParams::default(),
            feedback: false,
        },
        &TubeParams::default(),
        0.1,
    )
    .unwrap();
    assert_ne!(with, without);
}

#[test]
fn raw_flow_output_is_the_running_sum_of_the_derivative() {
    let d = simulate(&horn(), &glottal(), &TubeParams::default(), 0.05).unwrap();
    let u = simulate(
        &horn(),
        &glottal(),
        &TubeParams {
            output: OutputSignal::LipFlow,
            ..Default::default()
        },
        0.05,
    )
    .unwrap();
    let mut acc = 0.0;
    for (dv, uv) in d.samples().iter().zip(u.samples()) {
        acc += dv / 44100.0;
        assert!((acc - uv).abs() < 1e-12 + 1e-9 * uv.abs());
    }
}

fn arbitrary_tract() -> impl Strategy<Value = AreaFunction> {
    proptest::collection::vec(1e-4f64..8e-4, 4..10).prop_map(|areas| {
        let n = areas.len() - 1;
        AreaFunction::new(
            areas
                .iter()
                .enumerate()
                .map(|(i, &a)| AreaSample::circular(0.17 * i as f64 / n as f64, a))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn closed_lossless_tube_keeps_its_energy(af in arbitrary_tract(), segments in 4usize..40) {
        let params = TubeParams { lips: LipCondition::Closed, n_segments: segments, ..TubeParams::lossless() };
        let mut sim = TubeSim::new(&af, &params).unwrap();
        for i in 0..10 {
            sim.step(if i < 3 { 1e-4 } else { 0.0 }).unwrap();
        }
        let e0 = sim.energy();
        let steps = (params.fs as usize) * sim.substeps();
        let mut worst: f64 = 0.0;
        for _ in 0..steps {
            sim.step(0.0).unwrap();
            worst = worst.max((sim.energy() / e0 - 1.0).abs());
        }
        prop_assert!(worst < 1e-3, "drift {}", worst);
    }

    #[test]
    fn linear_in_a_prescribed_source(gain in 0.1f64..10.0) {
        let src: Vec<f64> = (0..200).map(|i| ((i as f64) * 0.3).sin() * 1e-4).collect();
        let scaled: Vec<f64> = src.iter().map(|v| v * gain).collect();
        let a = simulate(&horn(), &Source::Prescribed(src), &TubeParams::default(), 0.02).unwrap();
        let b = simulate(&horn(), &Source::Prescribed(scaled), &TubeParams::default(), 0.02).unwrap();
        let peak = a.peak();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x * gain - y).abs() <= 1e-9 * peak * gain);
        }
    }
}
