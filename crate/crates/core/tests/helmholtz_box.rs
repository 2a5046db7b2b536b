use num_complex::Complex64;
use vtres_core::geometry::{make_box_mesh, BoundaryTag};
use vtres_core::helmholtz3d::{self, assemble, quarter_wave, HelmholtzParams};
use vtres_core::numlin::QepOptions;

fn rigid() -> HelmholtzParams {
    HelmholtzParams {
        c: 350.0,
        alpha: 0.0,
        glottis_admittance: 0.0,
    }
}

fn f1_box(nx: usize) -> f64 {
    let mesh = make_box_mesh([0.17, 0.03, 0.03], [nx, 2, 2]).unwrap();
    helmholtz3d::resonances(&mesh, &rigid(), 1).unwrap().modes[0].freq
}

#[test]
fn refinement_converges_from_above() {
    let exact = quarter_wave(350.0, 0.17, 1);
    let f: Vec<f64> = [10, 20, 40].iter().map(|&n| f1_box(n)).collect();
    // P1 elements with consistent mass overestimate; the error drops ~4x per halving
    for w in f.windows(2) {
        assert!(w[1] < w[0] && w[1] > exact, "{f:?}");
    }
    let ratio = (f[1] - exact) / (f[2] - exact);
    assert!((3.0..5.0).contains(&ratio), "convergence ratio {ratio}");
}

#[test]
fn frequencies_scale_inversely_with_size() {
    let mesh = make_box_mesh([0.17, 0.03, 0.03], [20, 2, 2]).unwrap();
    let a = helmholtz3d::resonances(&mesh, &rigid(), 2).unwrap();
    let b = helmholtz3d::resonances(&mesh.scaled(2.0), &rigid(), 2).unwrap();
    for (x, y) in a.modes.iter().zip(&b.modes) {
        assert!(
            (x.freq / y.freq - 2.0).abs() < 1e-6,
            "{} vs {}",
            x.freq,
            y.freq
        );
    }
}

#[test]
fn mode_shapes_vanish_on_the_mouth() {
    let mesh = make_box_mesh([0.17, 0.03, 0.03], [12, 2, 2]).unwrap();
    let sol = helmholtz3d::solve(&mesh, &rigid(), 2, &QepOptions::default()).unwrap();
    let mouth: Vec<usize> = mesh
        .boundary()
        .iter()
        .filter(|f| f.tag == BoundaryTag::Mouth)
        .flat_map(|f| f.tri)
        .collect();
    for shape in &sol.shapes {
        assert_eq!(shape.len(), mesh.vertices().len());
        let max = shape.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max > 0.0);
        assert!(mouth.iter().all(|&v| shape[v] == Complex64::new(0.0, 0.0)));
    }
}

#[test]
fn wall_dissipation_damps_every_mode() {
    let mesh = make_box_mesh([0.17, 0.03, 0.03], [12, 2, 2]).unwrap();
    let base = helmholtz3d::resonances(&mesh, &rigid(), 3).unwrap();
    let lossy = helmholtz3d::resonances(
        &mesh,
        &HelmholtzParams {
            alpha: 1e-4,
            ..rigid()
        },
        3,
    )
    .unwrap();
    for (a, b) in base.modes.iter().zip(&lossy.modes) {
        assert!(
            a.lambda.re.abs() < 1e-6 * a.lambda.im,
            "rigid walls should be lossless: {}",
            a.lambda
        );
        assert!(b.lambda.re < a.lambda.re, "{} vs {}", b.lambda, a.lambda);
    }
}

#[test]
fn glottal_admittance_only_adds_damping_at_the_inlet() {
    let mesh = make_box_mesh([0.17, 0.03, 0.03], [6, 2, 2]).unwrap();
    let asm = assemble(
        &mesh,
        &HelmholtzParams {
            glottis_admittance: 0.05,
            ..rigid()
        },
    )
    .unwrap();
    let glottis_area = mesh.tag_area(BoundaryTag::Glottis);
    assert!((asm.damping.sum().re - 350.0 * 0.05 * glottis_area).abs() < 1e-12);
}
