//! Six-point difference stencils.
//!
//! Every scheme in this crate is written on a stencil with three points on
//! each of two time layers.  Orthogonal meshes keep the upper nodes above
//! the lower ones; moving meshes let the whole upper triple drift by `dx`.
//!
//! Node order used throughout: `[minus, center, plus]` on the lower layer,
//! then `[hat_minus, hat_center, hat_plus]` on the upper layer.

use crate::error::{Error, Result};

/// Relative time-agreement tolerance for nodes of one flat layer.
pub const LAYER_SKEW_TOL: f64 = 1e-9;

/// One space-time-value point `(t, x, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

impl Point {
    pub fn new(t: f64, x: f64, u: f64) -> Self {
        Point { t, x, u }
    }
}

/// The six-point neighborhood with steps `tau`, `h±`, `ĥ±` and drift `dx`.
///
/// For orthogonal stencils `dx = 0` and the upper steps equal the lower
/// ones.  For moving stencils the upper-layer nodes sit at
/// `x + dx - ĥ⁻`, `x + dx`, `x + dx + ĥ⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub t: f64,
    /// Time step, `t̂ - t`; strictly positive.
    pub tau: f64,
    /// Lower-layer center node.
    pub x: f64,
    pub h_plus: f64,
    pub h_minus: f64,
    pub h_plus_hat: f64,
    pub h_minus_hat: f64,
    /// Drift of the center node, `x̂ - x`; zero on orthogonal meshes.
    pub dx: f64,
    pub u: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub u_hat: f64,
    pub u_hat_plus: f64,
    pub u_hat_minus: f64,
}

impl Stencil {
    /// Orthogonal stencil, uniform in space.
    #[allow(clippy::too_many_arguments)]
    pub fn orthogonal_uniform(
        t: f64,
        tau: f64,
        x: f64,
        h: f64,
        u: [f64; 3],
        u_hat: [f64; 3],
    ) -> Self {
        Stencil {
            t,
            tau,
            x,
            h_plus: h,
            h_minus: h,
            h_plus_hat: h,
            h_minus_hat: h,
            dx: 0.0,
            u_minus: u[0],
            u: u[1],
            u_plus: u[2],
            u_hat_minus: u_hat[0],
            u_hat: u_hat[1],
            u_hat_plus: u_hat[2],
        }
    }

    /// Orthogonal stencil with independent left/right steps (static in time).
    #[allow(clippy::too_many_arguments)]
    pub fn orthogonal(
        t: f64,
        tau: f64,
        x: f64,
        h_plus: f64,
        h_minus: f64,
        u: [f64; 3],
        u_hat: [f64; 3],
    ) -> Self {
        Stencil {
            t,
            tau,
            x,
            h_plus,
            h_minus,
            h_plus_hat: h_plus,
            h_minus_hat: h_minus,
            dx: 0.0,
            u_minus: u[0],
            u: u[1],
            u_plus: u[2],
            u_hat_minus: u_hat[0],
            u_hat: u_hat[1],
            u_hat_plus: u_hat[2],
        }
    }

    /// The six nodes in `[minus, center, plus, hat_minus, hat, hat_plus]`
    /// order.
    pub fn nodes(&self) -> [Point; 6] {
        let t_hat = self.t + self.tau;
        let x_hat = self.x + self.dx;
        [
            Point::new(self.t, self.x - self.h_minus, self.u_minus),
            Point::new(self.t, self.x, self.u),
            Point::new(self.t, self.x + self.h_plus, self.u_plus),
            Point::new(t_hat, x_hat - self.h_minus_hat, self.u_hat_minus),
            Point::new(t_hat, x_hat, self.u_hat),
            Point::new(t_hat, x_hat + self.h_plus_hat, self.u_hat_plus),
        ]
    }

    /// Rebuild a stencil from six nodes, recomputing steps and drift.
    ///
    /// Fails with `LayerSkew` when nodes of one layer disagree in time by
    /// more than [`LAYER_SKEW_TOL`] relative, and with a domain error when
    /// a step or the time increment is not positive.
    pub fn from_nodes(n: [Point; 6]) -> Result<Self> {
        let t = n[1].t;
        let t_hat = n[4].t;
        let scale = t.abs().max(t_hat.abs()).max(1.0);
        let skew = (n[0].t - t)
            .abs()
            .max((n[2].t - t).abs())
            .max((n[3].t - t_hat).abs())
            .max((n[5].t - t_hat).abs());
        if skew > LAYER_SKEW_TOL * scale {
            return Err(Error::LayerSkew { skew: skew / scale });
        }
        let tau = t_hat - t;
        let h_minus = n[1].x - n[0].x;
        let h_plus = n[2].x - n[1].x;
        let h_minus_hat = n[4].x - n[3].x;
        let h_plus_hat = n[5].x - n[4].x;
        if tau <= 0.0 || h_minus <= 0.0 || h_plus <= 0.0 || h_minus_hat <= 0.0 || h_plus_hat <= 0.0
        {
            return Err(Error::DomainError(format!(
                "nonpositive stencil step: tau={tau:e} h+={h_plus:e} h-={h_minus:e} \
                 ĥ+={h_plus_hat:e} ĥ-={h_minus_hat:e}"
            )));
        }
        Ok(Stencil {
            t,
            tau,
            x: n[1].x,
            h_plus,
            h_minus,
            h_plus_hat,
            h_minus_hat,
            dx: n[4].x - n[1].x,
            u_minus: n[0].u,
            u: n[1].u,
            u_plus: n[2].u,
            u_hat_minus: n[3].u,
            u_hat: n[4].u,
            u_hat_plus: n[5].u,
        })
    }

    pub fn u_values(&self) -> [f64; 6] {
        [
            self.u_minus,
            self.u,
            self.u_plus,
            self.u_hat_minus,
            self.u_hat,
            self.u_hat_plus,
        ]
    }

    /// All six values strictly positive (admissibility for power laws and
    /// logarithms).
    pub fn all_u_positive(&self) -> bool {
        self.u_values().iter().all(|&v| v > 0.0)
    }
}

/// Stencil for schemes written in the Lagrangian mass coordinate `s`.
///
/// The grid itself is orthogonal in `(t, s)`; the physical positions `x`
/// and (for the stopped linear model) the densities `rho` ride along as
/// dependent variables.  `rho[i]` is associated with the interval to the
/// right of node `i` on its layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassStencil {
    pub t: f64,
    pub tau: f64,
    /// Center mass coordinate.
    pub s: f64,
    pub hs_plus: f64,
    pub hs_minus: f64,
    /// Physical positions, `[minus, center, plus, hat_minus, hat, hat_plus]`.
    pub x: [f64; 6],
    /// Values, same order.
    pub u: [f64; 6],
    /// Densities, same order; `None` for the power-law potential scheme.
    pub rho: Option<[f64; 6]>,
}

impl MassStencil {
    /// Physical drift of the center node, `x̂ - x`.
    pub fn dx_phys(&self) -> f64 {
        self.x[4] - self.x[1]
    }

    /// Lower-layer physical steps `(h_x⁻, h_x⁺)`.
    pub fn hx(&self) -> (f64, f64) {
        (self.x[1] - self.x[0], self.x[2] - self.x[1])
    }

    /// Upper-layer physical steps `(ĥ_x⁻, ĥ_x⁺)`.
    pub fn hx_hat(&self) -> (f64, f64) {
        (self.x[4] - self.x[3], self.x[5] - self.x[4])
    }

    pub fn rho_or_err(&self) -> Result<[f64; 6]> {
        self.rho
            .ok_or_else(|| Error::MissingMassGrid("stencil carries no densities".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_round_trip() {
        let s = Stencil {
            t: 0.5,
            tau: 0.1,
            x: 1.0,
            h_plus: 0.3,
            h_minus: 0.2,
            h_plus_hat: 0.25,
            h_minus_hat: 0.35,
            dx: 0.05,
            u: 2.0,
            u_plus: 2.1,
            u_minus: 1.9,
            u_hat: 2.05,
            u_hat_plus: 2.15,
            u_hat_minus: 1.95,
        };
        let back = Stencil::from_nodes(s.nodes()).unwrap();
        assert!((back.dx - s.dx).abs() < 1e-15);
        assert!((back.h_plus_hat - s.h_plus_hat).abs() < 1e-15);
        assert_eq!(back.u_values(), s.u_values());
    }

    #[test]
    fn skewed_layer_is_rejected() {
        let s = Stencil::orthogonal_uniform(0.0, 0.1, 0.0, 0.5, [1.0; 3], [1.0; 3]);
        let mut nodes = s.nodes();
        nodes[5].t += 1e-3;
        assert!(matches!(
            Stencil::from_nodes(nodes),
            Err(Error::LayerSkew { .. })
        ));
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        let s = Stencil::orthogonal_uniform(0.0, 0.1, 0.0, 0.5, [1.0; 3], [1.0; 3]);
        let mut nodes = s.nodes();
        nodes[2].x = nodes[1].x; // h+ = 0
        assert!(matches!(
            Stencil::from_nodes(nodes),
            Err(Error::DomainError(_))
        ));
    }
}
