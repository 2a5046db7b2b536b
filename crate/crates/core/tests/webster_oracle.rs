use proptest::prelude::*;
use vtres_core::geometry::{make_tube, AreaFunction, AreaSample, TubeShape};
use vtres_core::webster1d::{webster_resonances, WebsterParams};

fn lossless() -> WebsterParams {
    WebsterParams {
        c: 350.0,
        alpha: 0.0,
        glottis_admittance: 0.0,
        ..Default::default()
    }
}

/// p(L) of the solution of (A p')' + (ω/c)² A p = 0 with p(0)=1, p'(0)=0,
/// integrated with RK4 on the state (p, A p').
fn shoot(af: &AreaFunction, omega: f64, c: f64, steps: usize) -> f64 {
    let l = af.length();
    let h = l / steps as f64;
    let kk = (omega / c).powi(2);
    let f = |s: f64, y: [f64; 2]| {
        let a = af.at(s).area;
        [y[1] / a, -kk * a * y[0]]
    };
    let mut y = [1.0, 0.0];
    for i in 0..steps {
        let s = i as f64 * h;
        let k1 = f(s, y);
        let k2 = f(
            s + h / 2.0,
            [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
        );
        let k3 = f(
            s + h / 2.0,
            [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
        );
        let k4 = f(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y[0]
}

/// Frequencies (Hz) where the shooting residual changes sign, refined by bisection.
fn shooting_resonances(af: &AreaFunction, c: f64, k: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let df = 5.0;
    let mut f = 20.0;
    let mut prev = shoot(af, 2.0 * std::f64::consts::PI * f, c, 4000);
    while out.len() < k {
        let g = shoot(af, 2.0 * std::f64::consts::PI * (f + df), c, 4000);
        if prev.signum() != g.signum() {
            let (mut lo, mut hi, mut plo) = (f, f + df, prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let pm = shoot(af, 2.0 * std::f64::consts::PI * mid, c, 4000);
                if pm.signum() == plo.signum() {
                    lo = mid;
                    plo = pm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        f += df;
        prev = g;
    }
    out
}

#[test]
fn cosine_horn_matches_shooting_oracle() {
    let af = make_tube(TubeShape::CosineHorn, 0.175, 3e-4, 200).unwrap();
    let oracle = shooting_resonances(&af, 350.0, 3);
    let got = webster_resonances(&af, &lossless(), 3)
        .unwrap()
        .frequencies();
    for (g, o) in got.iter().zip(&oracle) {
        assert!((g / o - 1.0).abs() < 1e-3, "FEM {g} vs shooting {o}");
    }
}

#[test]
fn refinement_changes_f1_little() {
    let af = make_tube(TubeShape::Cylinder, 0.175, 3e-4, 10).unwrap();
    let coarse = webster_resonances(
        &af,
        &WebsterParams {
            min_elements: 200,
            ..lossless()
        },
        1,
    )
    .unwrap()
    .modes[0]
        .freq;
    let fine = webster_resonances(
        &af,
        &WebsterParams {
            min_elements: 400,
            ..lossless()
        },
        1,
    )
    .unwrap()
    .modes[0]
        .freq;
    assert!((coarse / fine - 1.0).abs() < 2e-3);
}

#[test]
fn alpha_increases_damping_of_every_mode() {
    let af = make_tube(TubeShape::CosineHorn, 0.175, 3e-4, 40).unwrap();
    let mut last: Option<Vec<f64>> = None;
    for alpha in [0.0, 1e-5, 1e-4, 5e-4] {
        let re: Vec<f64> = webster_resonances(
            &af,
            &WebsterParams {
                alpha,
                ..Default::default()
            },
            3,
        )
        .unwrap()
        .modes
        .iter()
        .map(|m| m.lambda.re)
        .collect();
        if let Some(prev) = &last {
            for (a, b) in re.iter().zip(prev) {
                assert!(a < b, "alpha {alpha}: {re:?} vs {prev:?}");
            }
        }
        last = Some(re);
    }
}

fn arbitrary_tract() -> impl Strategy<Value = AreaFunction> {
    proptest::collection::vec(1e-4f64..6e-4, 5..12).prop_map(|areas| {
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
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stretching_lowers_frequencies_proportionally(af in arbitrary_tract(), gamma in 0.7f64..1.4) {
        let a = webster_resonances(&af, &lossless(), 2).unwrap();
        let b = webster_resonances(&af.length_scaled(gamma).unwrap(), &lossless(), 2).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes) {
            prop_assert!((y.freq * gamma / x.freq - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn modes_are_sorted_and_above_cutoff(af in arbitrary_tract()) {
        let f = webster_resonances(&af, &WebsterParams::default(), 3).unwrap().frequencies();
        prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(f[0] >= 20.0);
    }
}
