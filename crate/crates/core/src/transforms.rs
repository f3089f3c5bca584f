//! Point changes of variables linking the classification cases.
//!
//! Each transform acts on `(t, x, u)` triples, on whole layers, and on
//! discrete solutions; all of them have closed-form inverses.  Applied to
//! a discrete solution of its source scheme on the matching invariant
//! mesh, a transform produces a discrete solution of the target scheme —
//! nodewise, not just in the limit.

use crate::error::{Error, Result};
use crate::meshes::Layer;
use crate::model::SQRT3;

/// The available changes of variables, with their case parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformId {
    /// `ū = u - δt`, `t̄ = δ(e^{δt} - 1)` — strips a constant source from
    /// the exponential-coefficient equation.
    Ch22 { delta: f64 },
    /// `ū = u e^{-δt}`, `t̄ = (δ/σ)(e^{δσt} - 1)` — strips a linear source
    /// from the power-coefficient equation.
    Ch32 { delta: f64, sigma: f64 },
    /// `ū = u cosh³(x/√3)`, `x̄ = √3 tanh(x/√3)` — the `+u^{-1/3}` source.
    Ch44A,
    /// `ū = u cos³(x/√3)`, `x̄ = √3 tan(x/√3)` — the `-u^{-1/3}` source;
    /// valid on the strip `|x| < √3 π/2`.
    Ch44B,
    /// `ū = u e^{-δt}` — strips a linear source from the linear equation.
    Ch55 { delta: f64 },
    /// `ū = u - δt` — strips a constant source from the linear equation.
    Ch56 { delta: f64 },
}

impl TransformId {
    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.to_ascii_uppercase();
        let (name, delta) = match norm.strip_suffix(":-1") {
            Some(n) => (n.to_string(), -1.0),
            None => (norm.clone(), 1.0),
        };
        Ok(match name.as_str() {
            "CH22" => TransformId::Ch22 { delta },
            "CH32" => TransformId::Ch32 { delta, sigma: 1.0 },
            "CH44A" => TransformId::Ch44A,
            "CH44B" => TransformId::Ch44B,
            "CH55" => TransformId::Ch55 { delta },
            "CH56" => TransformId::Ch56 { delta },
            other => return Err(Error::Parse(format!("unknown transform `{other}`"))),
        })
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        match self {
            TransformId::Ch32 { delta, .. } => TransformId::Ch32 { delta, sigma },
            other => other,
        }
    }

    fn check(&self) -> Result<()> {
        let delta = match self {
            TransformId::Ch22 { delta }
            | TransformId::Ch32 { delta, .. }
            | TransformId::Ch55 { delta }
            | TransformId::Ch56 { delta } => Some(*delta),
            _ => None,
        };
        if let Some(d) = delta {
            if d != 1.0 && d != -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "transform delta must be ±1, got {d}"
                )));
            }
        }
        if let TransformId::Ch32 { sigma, .. } = self {
            if *sigma == 0.0 {
                return Err(Error::InvalidParameter("ch32 needs sigma != 0".into()));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for TransformId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransformId::Ch22 { delta } => write!(f, "CH22(δ={delta})"),
            TransformId::Ch32 { delta, sigma } => write!(f, "CH32(δ={delta}, σ={sigma})"),
            TransformId::Ch44A => write!(f, "CH44A"),
            TransformId::Ch44B => write!(f, "CH44B"),
            TransformId::Ch55 { delta } => write!(f, "CH55(δ={delta})"),
            TransformId::Ch56 { delta } => write!(f, "CH56(δ={delta})"),
        }
    }
}

/// Forward map of one `(t, x, u)` triple.
pub fn apply(tr: TransformId, t: f64, x: f64, u: f64) -> Result<(f64, f64, f64)> {
    tr.check()?;
    Ok(match tr {
        TransformId::Ch22 { delta } => (delta * ((delta * t).exp() - 1.0), x, u - delta * t),
        TransformId::Ch32 { delta, sigma } => (
            delta / sigma * ((delta * sigma * t).exp() - 1.0),
            x,
            u * (-delta * t).exp(),
        ),
        TransformId::Ch44A => {
            let w = x / SQRT3;
            (t, SQRT3 * w.tanh(), u * w.cosh().powi(3))
        }
        TransformId::Ch44B => {
            let w = x / SQRT3;
            if w.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::DomainError(format!(
                    "ch44b needs |x| < √3·π/2, got x={x}"
                )));
            }
            (t, SQRT3 * w.tan(), u * w.cos().powi(3))
        }
        TransformId::Ch55 { delta } => (t, x, u * (-delta * t).exp()),
        TransformId::Ch56 { delta } => (t, x, u - delta * t),
    })
}

/// Inverse map; `apply` followed by `apply_inverse` is the identity to
/// rounding.
pub fn apply_inverse(tr: TransformId, t: f64, x: f64, u: f64) -> Result<(f64, f64, f64)> {
    tr.check()?;
    Ok(match tr {
        TransformId::Ch22 { delta } => {
            let arg = 1.0 + delta * t;
            if arg <= 0.0 {
                return Err(Error::DomainError(format!(
                    "ch22 inverse needs 1 + δ t̄ > 0, got {arg}"
                )));
            }
            let t0 = delta * arg.ln();
            (t0, x, u + delta * t0)
        }
        TransformId::Ch32 { delta, sigma } => {
            let arg = 1.0 + delta * sigma * t;
            if arg <= 0.0 {
                return Err(Error::DomainError(format!(
                    "ch32 inverse needs 1 + δσ t̄ > 0, got {arg}"
                )));
            }
            let t0 = arg.ln() / (delta * sigma);
            (t0, x, u * (delta * t0).exp())
        }
        TransformId::Ch44A => {
            let w = x / SQRT3;
            if w.abs() >= 1.0 {
                return Err(Error::DomainError(format!(
                    "ch44a inverse needs |x̄| < √3, got x̄={x}"
                )));
            }
            let x0 = SQRT3 * w.atanh();
            (t, x0, u * (1.0 - w * w).powf(1.5))
        }
        TransformId::Ch44B => {
            let w = x / SQRT3;
            let x0 = SQRT3 * w.atan();
            (t, x0, u * (1.0 + w * w).powf(1.5))
        }
        TransformId::Ch55 { delta } => (t, x, u * (delta * t).exp()),
        TransformId::Ch56 { delta } => (t, x, u + delta * t),
    })
}

/// Transform a whole discrete solution, layer by layer, node by node.
///
/// Time maps (CH22/CH32) send the invariant log-spaced grids to uniform
/// ones; space maps (CH44A/B) bend the node positions while keeping both
/// time layers intact.
pub fn transform_solution(tr: TransformId, layers: &[Layer]) -> Result<Vec<Layer>> {
    layers.iter().map(|l| transform_layer(tr, l)).collect()
}

pub fn transform_layer(tr: TransformId, layer: &Layer) -> Result<Layer> {
    let mut x_new = Vec::with_capacity(layer.len());
    let mut u_new = Vec::with_capacity(layer.len());
    let mut t_new = layer.t;
    for i in 0..layer.len() {
        let (tt, xx, uu) = apply(tr, layer.t, layer.x[i], layer.u[i])?;
        t_new = tt;
        x_new.push(xx);
        u_new.push(uu);
    }
    let mut out = Layer::new(t_new, x_new, u_new)?;
    out.s = layer.s.clone();
    out.rho = layer.rho.clone();
    out.validate()?;
    Ok(out)
}

pub fn inverse_solution(tr: TransformId, layers: &[Layer]) -> Result<Vec<Layer>> {
    layers
        .iter()
        .map(|layer| {
            let mut x_new = Vec::with_capacity(layer.len());
            let mut u_new = Vec::with_capacity(layer.len());
            let mut t_new = layer.t;
            for i in 0..layer.len() {
                let (tt, xx, uu) = apply_inverse(tr, layer.t, layer.x[i], layer.u[i])?;
                t_new = tt;
                x_new.push(xx);
                u_new.push(uu);
            }
            Layer::new(t_new, x_new, u_new)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ch22_fixed_point_and_shift() {
        // t = 0 is a fixed point
        let (t, x, u) = apply(TransformId::Ch22 { delta: 1.0 }, 0.0, 2.0, 3.0).unwrap();
        assert_eq!((t, x, u), (0.0, 2.0, 3.0));
        // t = ln 2 lands on t̄ = 1 with ū = u - ln 2
        let (t, _, u) = apply(TransformId::Ch22 { delta: 1.0 }, 2.0f64.ln(), 2.0, 3.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!((u - (3.0 - 2.0f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn ch44a_origin_is_fixed() {
        let (_, x, u) = apply(TransformId::Ch44A, 0.3, 0.0, 5.0).unwrap();
        assert_eq!((x, u), (0.0, 5.0));
    }

    #[test]
    fn ch32_inverse_time_is_logarithmic() {
        // δ=1, σ=2: t = ln(1 + 2 t̄)/2
        let tr = TransformId::Ch32 {
            delta: 1.0,
            sigma: 2.0,
        };
        let (t, _, _) = apply_inverse(tr, 0.8, 0.0, 1.0).unwrap();
        assert!((t - 0.5 * (1.0f64 + 2.0 * 0.8).ln()).abs() < 1e-15);
    }

    #[test]
    fn ch56_negative_delta_round_trip() {
        let tr = TransformId::Ch56 { delta: -1.0 };
        let (_, _, u) = apply_inverse(tr, 3.0, 0.0, 0.0).unwrap();
        assert_eq!(u, -3.0);
        let (_, _, u) = apply(tr, 3.0, 0.0, u).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn ch44b_rejects_points_outside_the_strip() {
        let x_bad = SQRT3 * std::f64::consts::FRAC_PI_2;
        assert!(matches!(
            apply(TransformId::Ch44B, 0.0, x_bad, 1.0),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn delta_zero_is_rejected() {
        assert!(matches!(
            apply(TransformId::Ch56 { delta: 0.0 }, 0.0, 0.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn random_round_trips() {
        use rand::Rng;
        let mut rng = rand::thread_rng();
        let transforms = [
            TransformId::Ch22 { delta: 1.0 },
            TransformId::Ch22 { delta: -1.0 },
            TransformId::Ch32 {
                delta: 1.0,
                sigma: 2.0,
            },
            TransformId::Ch32 {
                delta: -1.0,
                sigma: -4.0 / 3.0,
            },
            TransformId::Ch44A,
            TransformId::Ch44B,
            TransformId::Ch55 { delta: 1.0 },
            TransformId::Ch56 { delta: -1.0 },
        ];
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let tr = transforms[rng.gen_range(0..transforms.len())];
            let t = rng.gen_range(0.0..1.5);
            let x = rng.gen_range(-1.2..1.2);
            let u = rng.gen_range(0.1..3.0);
            let (t1, x1, u1) = apply(tr, t, x, u).unwrap();
            let (t2, x2, u2) = apply_inverse(tr, t1, x1, u1).unwrap();
            let scale = t.abs().max(x.abs()).max(u.abs()).max(1.0);
            worst = worst
                .max((t2 - t).abs() / scale)
                .max((x2 - x).abs() / scale)
                .max((u2 - u).abs() / scale);
        }
        assert!(worst < 1e-13, "round-trip deviation {worst:e}");
    }
}
