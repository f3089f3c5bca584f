//! Development probes for the headline discrete facts; the acceptance
//! suite re-runs these at full size.

use heatsym_core::exact::KernelSolution;
use heatsym_core::meshes::{log_time_meth22, log_time_meth32, uniform_time, Layer};
use heatsym_core::model::{HeatModel, KFamily, QFamily};
use heatsym_core::schemes::{
    layer_pair_stencils, residual_with_scale, step, SchemeId, SchemeParams,
};
use heatsym_core::transforms::{transform_solution, TransformId};

fn kernel_layer(k: &KernelSolution, x0: &[f64], t: f64) -> Layer {
    let x = k.mesh_at(x0, t);
    let u: Vec<f64> = x.iter().map(|&xx| k.value(t, xx).unwrap()).collect();
    Layer::new(t, x, u).unwrap()
}

#[test]
fn sh54e_reproduces_kernel_exactly() {
    let k = KernelSolution::new(1.0, 1.0, 0.0).unwrap();
    let x0: Vec<f64> = (0..101).map(|i| -10.0 + 0.2 * i as f64).collect();
    let mut layer = kernel_layer(&k, &x0, 0.0);
    let kb = k;
    let params = SchemeParams::new(HeatModel::new(KFamily::Linear, QFamily::Zero))
        .boundary_values(move |t, x| kb.value(t, x).unwrap());
    let tau = 0.05;
    let mut worst_err = 0.0f64;
    let mut worst_res = 0.0f64;
    for n in 0..100 {
        let result = step(SchemeId::SH54E, &params, &layer, tau).unwrap();
        worst_res = worst_res.max(result.diagnostics.max_residual);
        layer = result.layer;
        let t = (n + 1) as f64 * tau;
        assert!((layer.t - t).abs() < 1e-12);
        for (i, (&x, &u)) in layer.x.iter().zip(&layer.u).enumerate() {
            let exact = k.value(t, x).unwrap();
            worst_err = worst_err.max((u - exact).abs());
            // the mesh itself must stay the dilation of the initial nodes
            let mesh_exact = x0[i] * (t + 1.0);
            worst_err = worst_err.max((x - mesh_exact).abs() * 1e-3);
        }
    }
    println!("kernel max error {worst_err:e}, max residual {worst_res:e}");
    assert!(worst_err < 1e-9, "max nodewise error {worst_err:e}");
    assert!(worst_res < 1e-10, "max residual {worst_res:e}");
}

fn run_scheme(
    id: SchemeId,
    params: &SchemeParams,
    layer0: Layer,
    times: &[f64],
) -> Vec<Layer> {
    let mut layers = vec![layer0];
    for w in times.windows(2) {
        let tau = w[1] - w[0];
        let next = step(id, params, layers.last().unwrap(), tau).unwrap();
        layers.push(next.layer);
    }
    layers
}

fn max_target_residual(id: SchemeId, params: &SchemeParams, layers: &[Layer]) -> f64 {
    let mut worst = 0.0f64;
    for w in layers.windows(2) {
        for s in layer_pair_stencils(&w[0], &w[1]).unwrap() {
            let (f, scale) = residual_with_scale(id, params, &s).unwrap();
            worst = worst.max(f.abs() / scale);
        }
    }
    worst
}

#[test]
fn ch22_carries_sh22_onto_sh21() {
    for &delta in &[1.0, -1.0] {
        let model = HeatModel::new(KFamily::Exponential, QFamily::Constant).delta(delta);
        let params = SchemeParams::new(model);
        let mesh = log_time_meth22(delta, 1.0, 50).unwrap();
        let x: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        // keep e^u small enough for the explicit step at the mesh's widest spacing
        let u: Vec<f64> = x.iter().map(|&xx| -2.4 + 0.2 * (1.3 * xx).sin()).collect();
        let layer0 = Layer::new(0.0, x, u).unwrap();
        let layers = run_scheme(SchemeId::SH22, &params, layer0, &mesh.times);
        let image = transform_solution(TransformId::Ch22 { delta }, &layers).unwrap();
        // image times must be uniform
        let tau0 = image[1].t - image[0].t;
        for w in image.windows(2) {
            assert!(((w[1].t - w[0].t) - tau0).abs() < 1e-12 * tau0);
        }
        let target = SchemeParams::new(HeatModel::new(KFamily::Exponential, QFamily::Zero));
        let worst = max_target_residual(SchemeId::SH21, &target, &image);
        println!("delta={delta}: worst SH21 residual of image {worst:e}");
        assert!(worst < 1e-10, "delta={delta}: {worst:e}");
    }
}

#[test]
fn ch32_carries_sh32_onto_sh31() {
    for &sigma in &[1.0, 2.0] {
        let delta = 1.0;
        let model = HeatModel::new(KFamily::Power, QFamily::LinearSource)
            .sigma(sigma)
            .delta(delta);
        let params = SchemeParams::new(model);
        let mesh = log_time_meth32(delta, sigma, 0.5, 60).unwrap();
        let x: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        let u: Vec<f64> = x.iter().map(|&xx| 0.7 + 0.1 * (1.3 * xx).sin()).collect();
        let layer0 = Layer::new(0.0, x, u).unwrap();
        let layers = run_scheme(SchemeId::SH32, &params, layer0, &mesh.times);
        let image =
            transform_solution(TransformId::Ch32 { delta, sigma }, &layers).unwrap();
        let target = SchemeParams::new(HeatModel::new(KFamily::Power, QFamily::Zero).sigma(sigma));
        let worst = max_target_residual(SchemeId::SH31, &target, &image);
        println!("sigma={sigma}: worst SH31 residual of image {worst:e}");
        assert!(worst < 1e-10, "sigma={sigma}: {worst:e}");
    }
}

#[test]
fn ch44a_carries_sh45a_onto_sh42() {
    let delta = 1.0;
    let model = HeatModel::new(KFamily::PowerMinus43, QFamily::MixedCritical)
        .delta(delta)
        .sign(1.0);
    let params = SchemeParams::new(model);
    let mesh = log_time_meth32(delta, -4.0 / 3.0, 0.3, 30).unwrap();
    let x: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let u: Vec<f64> = x.iter().map(|&xx| 1.2 + 0.2 * (1.1 * xx).sin()).collect();
    let layer0 = Layer::new(0.0, x, u).unwrap();
    let layers = run_scheme(SchemeId::SH45A, &params, layer0, &mesh.times);
    let image = transform_solution(TransformId::Ch44A, &layers).unwrap();
    let target = SchemeParams::new(
        HeatModel::new(KFamily::PowerMinus43, QFamily::LinearSource).delta(delta),
    );
    let worst = max_target_residual(SchemeId::SH42, &target, &image);
    println!("worst SH42 residual of CH44A image {worst:e}");
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn uniform_time_is_strictly_increasing() {
    let m = uniform_time(1.0, 10).unwrap();
    assert_eq!(m.times.len(), 11);
}
