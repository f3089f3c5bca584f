//! Discrete conservation-law checkers for the mass-coordinate scheme and
//! generic conserved totals.
//!
//! The conservative scheme in the Lagrangian coordinate keeps two exact
//! discrete laws: the total mass `Σ h_s` never changes (the s-grid is
//! immutable), and the change of the first moment `Σ (x_i + x_{i+1})/2 h_s`
//! telescopes to boundary fluxes of the conserved power `u^{σ+1}`.  The
//! checkers recompute both sides independently of the stepper.

use crate::error::{Error, Result};
use crate::meshes::Layer;
use crate::schemes::SchemeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservationLaw {
    TotalMass,
    FirstMoment,
    TotalHeatOrthogonal,
}

/// Per-step drift of one conserved quantity across a run.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub law: ConservationLaw,
    pub per_step_defect: Vec<f64>,
    pub max_defect: f64,
}

impl ConservationReport {
    pub fn new(law: ConservationLaw, per_step_defect: Vec<f64>) -> Self {
        let max_defect = per_step_defect.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        ConservationReport {
            law,
            per_step_defect,
            max_defect,
        }
    }
}

/// Total mass `Σ h_s = s_N - s_0` of a mass layer.
pub fn total_mass(layer: &Layer) -> Result<f64> {
    let s = layer
        .s
        .as_ref()
        .ok_or_else(|| Error::MissingMassGrid("total_mass needs mass coordinates".into()))?;
    if s.len() < 2 {
        return Ok(0.0);
    }
    Ok(s[s.len() - 1] - s[0])
}

/// Ghost values of `v` one node beyond each end, by linear extrapolation —
/// the same rule the stepper uses, under which Dirichlet pinning satisfies
/// the scheme at the boundary nodes.
fn ghosts(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    (2.0 * v[0] - v[1], 2.0 * v[n - 1] - v[n - 2])
}

/// Defect of the printed first-moment balance between two consecutive
/// states of the conservative mass scheme,
///
/// ```text
/// Σ (x̂_i+x̂_{i+1})/2 h_s - Σ (x_i+x_{i+1})/2 h_s  =  -(τ/(σ+1)) [ α G + (1-α) Ĝ ] ,
/// ```
///
/// where `G` collects the two outermost interval fluxes
/// `(g_N + g_{N-1})/2 - (g_0 + g_{-1})/2` of `g_i = (v_i + v_{i+1})/2`,
/// `v = u^{σ+1}`, with ghost values per the stepper's rule.  The left side
/// is summed directly; the right side touches boundary data only, so a
/// vanishing defect certifies that every interior flux cancelled.
pub fn first_moment_defect(prev: &Layer, next: &Layer, params: &SchemeParams) -> Result<f64> {
    let s_prev = prev
        .s
        .as_ref()
        .ok_or_else(|| Error::MissingMassGrid("first_moment_defect needs mass layers".into()))?;
    let s_next = next
        .s
        .as_ref()
        .ok_or_else(|| Error::MissingMassGrid("first_moment_defect needs mass layers".into()))?;
    let n = prev.len();
    if next.len() != n {
        return Err(Error::LayerMismatch(format!("{} vs {} nodes", n, next.len())));
    }
    if s_prev
        .iter()
        .zip(s_next)
        .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::LayerMismatch("mass grids differ between layers".into()));
    }
    let hs = s_prev[1] - s_prev[0];
    if s_prev
        .windows(2)
        .any(|w| (w[1] - w[0] - hs).abs() > 1e-9 * hs)
    {
        return Err(Error::LayerMismatch("mass grid is not uniform".into()));
    }
    let tau = next.t - prev.t;
    let sigma = params.model.sigma_checked()?;
    let p = sigma + 1.0;
    let alpha = params.weight_alpha;

    let moment = |layer: &Layer| -> f64 {
        layer
            .x
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]) * hs)
            .sum::<f64>()
    };
    let lhs = moment(next) - moment(prev);

    let flux = |layer: &Layer| -> f64 {
        let v: Vec<f64> = layer.u.iter().map(|&u| u.powf(p)).collect();
        let (vl, vr) = ghosts(&v);
        let g_top = 0.5 * (v[n - 1] + vr) + 0.5 * (v[n - 2] + v[n - 1]);
        let g_bot = 0.5 * (v[0] + v[1]) + 0.5 * (vl + v[0]);
        0.5 * (g_top - g_bot)
    };
    let rhs = -tau / p * (alpha * flux(prev) + (1.0 - alpha) * flux(next));
    Ok((lhs - rhs).abs())
}

/// Trapezoidal total `∫ u dx` over an orthogonal layer.
pub fn total_heat_orthogonal(layer: &Layer) -> f64 {
    layer
        .x
        .windows(2)
        .zip(layer.u.windows(2))
        .map(|(xs, us)| 0.5 * (us[0] + us[1]) * (xs[1] - xs[0]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshes::Layer;

    fn mass_layer(t: f64, n: usize, hs: f64, u: f64) -> Layer {
        let x: Vec<f64> = (0..n).map(|i| i as f64 * hs / u).collect();
        let uv = vec![u; n];
        let s: Vec<f64> = (0..n).map(|i| i as f64 * hs).collect();
        Layer::new(t, x, uv).unwrap().with_mass(s, None).unwrap()
    }

    #[test]
    fn total_mass_counts_intervals() {
        let layer = mass_layer(0.0, 11, 0.1, 1.0);
        assert!((total_mass(&layer).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn total_mass_requires_mass_grid() {
        let layer = Layer::new(0.0, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(total_mass(&layer), Err(Error::MissingMassGrid(_))));
    }

    #[test]
    fn constant_state_has_zero_moment_defect() {
        use crate::model::{HeatModel, KFamily, QFamily};
        let params = SchemeParams::new(HeatModel::new(KFamily::Power, QFamily::Zero).sigma(1.0));
        let a = mass_layer(0.0, 8, 0.2, 1.5);
        let mut b = mass_layer(0.1, 8, 0.2, 1.5);
        b.t = 0.1;
        let d = first_moment_defect(&a, &b, &params).unwrap();
        assert!(d < 1e-14, "defect {d:e}");
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        use crate::model::{HeatModel, KFamily, QFamily};
        let params = SchemeParams::new(HeatModel::new(KFamily::Power, QFamily::Zero).sigma(1.0));
        let a = mass_layer(0.0, 8, 0.2, 1.5);
        let b = mass_layer(0.1, 8, 0.25, 1.5);
        assert!(matches!(
            first_moment_defect(&a, &b, &params),
            Err(Error::LayerMismatch(_))
        ));
    }

    #[test]
    fn trapezoid_total_on_unit_data() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let layer = Layer::new(0.0, x, vec![1.0; 11]).unwrap();
        assert!((total_heat_orthogonal(&layer) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_total_is_linear() {
        let x: Vec<f64> = (0..9).map(|i| i as f64 * 0.125).collect();
        let u: Vec<f64> = x.iter().map(|&v| (2.1 * v).sin() + 1.5).collect();
        let v: Vec<f64> = x.iter().map(|&v| (1.3 * v).cos() + 2.0).collect();
        let (a, b) = (0.7, -0.4);
        let combo: Vec<f64> = u.iter().zip(&v).map(|(&p, &q)| a * p + b * q).collect();
        let lu = Layer::new(0.0, x.clone(), u).unwrap();
        let lv = Layer::new(0.0, x.clone(), v).unwrap();
        let lc = Layer::new(0.0, x, combo).unwrap();
        let direct = total_heat_orthogonal(&lc);
        let linear = a * total_heat_orthogonal(&lu) + b * total_heat_orthogonal(&lv);
        assert!((direct - linear).abs() < 1e-14);
    }
}
