//! Numerical Lie machinery.
//!
//! A point symmetry is handled through its infinitesimal generator
//!
//! ```text
//! X = ξ^t(t,x,u) ∂/∂t + ξ^x(t,x,u) ∂/∂x + η(t,x,u) ∂/∂u .
//! ```
//!
//! Everything here is numeric: one-parameter flows are obtained by
//! integrating the Lie equations `dt̄/dε = ξ^t`, `dx̄/dε = ξ^x`,
//! `dū/dε = η` with an adaptive integrator, stencils are transported node
//! by node, and invariance of a scheme is *measured* (as a residual defect
//! after the flow) rather than proved.  Closed-form flows appear only in
//! tests, as oracles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::schemes::{self, SchemeId, SchemeParams};
use crate::stencil::{MassStencil, Point, Stencil};

/// Coordinates larger than this abort a flow with `FlowBlowup`.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Relative per-step tolerance of the flow integrator.
const FLOW_TOL: f64 = 1e-14;

/// Defect threshold for the four mesh-geometry conditions.
pub const MESH_CONDITION_TOL: f64 = 1e-8;

pub type Coef = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Lie point operator with coefficients `ξ^t, ξ^x, η` as functions of
/// `(t, x, u)`.
#[derive(Clone)]
pub struct SymmetryGenerator {
    pub label: String,
    xi_t: Coef,
    xi_x: Coef,
    eta: Coef,
}

impl std::fmt::Debug for SymmetryGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SymmetryGenerator({})", self.label)
    }
}

impl SymmetryGenerator {
    pub fn new(
        label: impl Into<String>,
        xi_t: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        xi_x: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        eta: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SymmetryGenerator {
            label: label.into(),
            xi_t: Arc::new(xi_t),
            xi_x: Arc::new(xi_x),
            eta: Arc::new(eta),
        }
    }

    /// `X₁ = ∂/∂t`.
    pub fn time_translation() -> Self {
        Self::new("d/dt", |_, _, _| 1.0, |_, _, _| 0.0, |_, _, _| 0.0)
    }

    /// `X₂ = ∂/∂x`.
    pub fn space_translation() -> Self {
        Self::new("d/dx", |_, _, _| 0.0, |_, _, _| 1.0, |_, _, _| 0.0)
    }

    pub fn xi_t(&self, p: Point) -> f64 {
        (self.xi_t)(p.t, p.x, p.u)
    }

    pub fn xi_x(&self, p: Point) -> f64 {
        (self.xi_x)(p.t, p.x, p.u)
    }

    pub fn eta(&self, p: Point) -> f64 {
        (self.eta)(p.t, p.x, p.u)
    }
}

// ---------------------------------------------------------------------------
// Flow integration
// ---------------------------------------------------------------------------

/// One adaptive pass of the classical RK4 scheme with step doubling and
/// local extrapolation; integrates `dy/de = rhs(y)` from `e = 0` to
/// `e = eps`.
fn flow_ode(
    rhs: &dyn Fn(&[f64], &mut [f64]),
    y0: &[f64],
    eps: f64,
    label: &str,
) -> Result<Vec<f64>> {
    let n = y0.len();
    let mut y = y0.to_vec();
    if eps == 0.0 {
        return Ok(y);
    }
    let blowup = |eps_now: f64| Error::FlowBlowup {
        label: label.to_string(),
        eps: eps_now,
    };

    let rk4_step = |y: &[f64], h: f64| -> Vec<f64> {
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        rhs(y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs(&tmp, &mut k4);
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    };

    let dir = eps.signum();
    let mut remaining = eps.abs();
    let mut h = remaining.min(0.1);
    let mut steps = 0usize;
    while remaining > 0.0 {
        steps += 1;
        if steps > 100_000 {
            return Err(blowup(eps));
        }
        let h_try = h.min(remaining);
        let full = rk4_step(&y, dir * h_try);
        let half = rk4_step(&y, dir * h_try * 0.5);
        let half2 = rk4_step(&half, dir * h_try * 0.5);
        let mut err = 0.0f64;
        for i in 0..n {
            let scale = y[i].abs().max(half2[i].abs()).max(1.0);
            err = err.max((full[i] - half2[i]).abs() / scale);
        }
        if err <= 15.0 * FLOW_TOL || h_try < 1e-10 {
            for i in 0..n {
                // Richardson extrapolation of the doubled step.
                y[i] = half2[i] + (half2[i] - full[i]) / 15.0;
                if !y[i].is_finite() || y[i].abs() > OVERFLOW_GUARD {
                    return Err(blowup(eps));
                }
            }
            remaining -= h_try;
            if err > 0.0 {
                h = (h_try * 0.9 * (15.0 * FLOW_TOL / err).powf(0.2)).min(4.0 * h_try);
            } else {
                h = 4.0 * h_try;
            }
        } else {
            h = (h_try * 0.9 * (15.0 * FLOW_TOL / err).powf(0.25)).max(1e-11);
        }
    }
    Ok(y)
}

/// Image of the point `p` under the one-parameter flow of `gen` at group
/// parameter `eps`.
pub fn flow_point(gen: &SymmetryGenerator, eps: f64, p: Point) -> Result<Point> {
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let q = Point::new(y[0], y[1], y[2]);
        dy[0] = gen.xi_t(q);
        dy[1] = gen.xi_x(q);
        dy[2] = gen.eta(q);
    };
    let out = flow_ode(&rhs, &[p.t, p.x, p.u], eps, &gen.label)?;
    Ok(Point::new(out[0], out[1], out[2]))
}

/// Transport a whole stencil: every node is flowed independently and the
/// steps, time increment and drift are recomputed from the images.
///
/// Fails with `LayerSkew` when the flowed upper or lower nodes no longer
/// share one time value — the signature of a generator without flat-layer
/// invariance applied to a flat-layer stencil.
pub fn flow_stencil(gen: &SymmetryGenerator, eps: f64, s: &Stencil) -> Result<Stencil> {
    let mut nodes = s.nodes();
    for node in &mut nodes {
        *node = flow_point(gen, eps, *node)?;
    }
    Stencil::from_nodes(nodes)
}

// ---------------------------------------------------------------------------
// Mesh-geometry invariance conditions
// ---------------------------------------------------------------------------

/// Outcome of checking the four discrete mesh conditions for one generator.
///
/// `uniform_t`/`uniform_x` are the second-difference conditions on `ξ^t`
/// and `ξ^x` along the grid directions, `orthogonal` is the cross condition
/// `D₊ₕ(ξ^t) = -D₊τ(ξ^x)`, and `flat_layers` is the mixed-difference
/// criterion `D₊ₕ D₊τ (ξ^t) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConditionReport {
    pub uniform_t: bool,
    pub uniform_x: bool,
    pub orthogonal: bool,
    pub flat_layers: bool,
    /// Largest sampled defect of each condition, same order as the flags.
    pub max_defects: [f64; 4],
}

/// Evaluate the four mesh conditions by finite differencing the generator
/// coefficients across the nodes of the sample stencils.
///
/// Samples are treated as orthogonal geometry (the conditions ask whether
/// the generator *keeps* such a mesh).  None of the catalogued generators
/// have `ξ^t` or `ξ^x` depending on `u`, so the value attached to a ghost
/// node simply reuses the nearest stencil value.
pub fn check_mesh_conditions(gen: &SymmetryGenerator, samples: &[Stencil]) -> MeshConditionReport {
    assert!(!samples.is_empty(), "need at least one sample stencil");
    let mut d = [0.0f64; 4];
    for s in samples {
        let t = s.t;
        let tau = s.tau;
        let x = s.x;
        let (hp, hm) = (s.h_plus, s.h_minus);
        let p = |t, x, u| Point::new(t, x, u);

        // (ct): second difference of ξ^t in the time direction.
        let ct = (gen.xi_t(p(t + tau, x, s.u_hat)) - 2.0 * gen.xi_t(p(t, x, s.u))
            + gen.xi_t(p(t - tau, x, s.u)))
            / (tau * tau);
        // (ch): second difference of ξ^x in the space direction.
        let ch = 2.0 / (hp + hm)
            * ((gen.xi_x(p(t, x + hp, s.u_plus)) - gen.xi_x(p(t, x, s.u))) / hp
                - (gen.xi_x(p(t, x, s.u)) - gen.xi_x(p(t, x - hm, s.u_minus))) / hm);
        // (cht): D₊ₕ(ξ^t) + D₊τ(ξ^x).
        let cht = (gen.xi_t(p(t, x + hp, s.u_plus)) - gen.xi_t(p(t, x, s.u))) / hp
            + (gen.xi_x(p(t + tau, x, s.u_hat)) - gen.xi_x(p(t, x, s.u))) / tau;
        // (cht2): mixed difference of ξ^t.
        let cht2 = (gen.xi_t(p(t + tau, x + hp, s.u_hat_plus)) - gen.xi_t(p(t, x + hp, s.u_plus))
            - gen.xi_t(p(t + tau, x, s.u_hat))
            + gen.xi_t(p(t, x, s.u)))
            / (tau * hp);

        d[0] = d[0].max(ct.abs());
        d[1] = d[1].max(ch.abs());
        d[2] = d[2].max(cht.abs());
        d[3] = d[3].max(cht2.abs());
    }
    MeshConditionReport {
        uniform_t: d[0] < MESH_CONDITION_TOL,
        uniform_x: d[1] < MESH_CONDITION_TOL,
        orthogonal: d[2] < MESH_CONDITION_TOL,
        flat_layers: d[3] < MESH_CONDITION_TOL,
        max_defects: d,
    }
}

// ---------------------------------------------------------------------------
// Invariance audits
// ---------------------------------------------------------------------------

fn admissibility(id: SchemeId, s: &Stencil) -> Result<()> {
    let positive_steps = s.tau > 0.0
        && s.h_plus > 0.0
        && s.h_minus > 0.0
        && s.h_plus_hat > 0.0
        && s.h_minus_hat > 0.0;
    if !positive_steps {
        return Err(Error::InadmissibleImage {
            scheme: format!("{id:?}"),
            reason: "nonpositive step after flow".into(),
        });
    }
    if id.requires_positive_u() && !s.all_u_positive() {
        return Err(Error::InadmissibleImage {
            scheme: format!("{id:?}"),
            reason: "nonpositive u after flow".into(),
        });
    }
    Ok(())
}

/// Residual defect of a scheme after flowing an exactly-solving stencil.
///
/// The stencil must satisfy the scheme to machine precision; the returned
/// value is `|F(flow(s))|` in the scale-free normalization (residual
/// divided by the largest additive term), so tolerances carry across
/// schemes of wildly different magnitude.
pub fn invariance_defect(
    id: SchemeId,
    params: &SchemeParams,
    gen: &SymmetryGenerator,
    s: &Stencil,
    eps: f64,
) -> Result<f64> {
    let (f0, scale0) = schemes::residual_with_scale(id, params, s)?;
    debug_assert!(
        f0.abs() / scale0.max(1e-300) < 1e-10,
        "audit stencil does not solve {id:?}: |F| = {:e}",
        f0.abs() / scale0
    );
    let moved = flow_stencil(gen, eps, s)?;
    admissibility(id, &moved)?;
    let (f, scale) = schemes::residual_with_scale(id, params, &moved)?;
    Ok(f.abs() / scale.max(1e-300))
}

/// Same audit for the mesh equation of a moving scheme.
pub fn mesh_invariance_defect(
    id: SchemeId,
    params: &SchemeParams,
    gen: &SymmetryGenerator,
    s: &Stencil,
    eps: f64,
) -> Result<f64> {
    let moved = flow_stencil(gen, eps, s)?;
    admissibility(id, &moved)?;
    let (f, scale) = schemes::mesh_residual_with_scale(id, params, &moved)?;
    Ok(f.abs() / scale.max(1e-300))
}

/// `|d/dε expr(flow(gen, ε, s))|` at `ε = 0`, by central differencing with
/// one Richardson sweep.  A genuine difference invariant of the generator
/// stays below 1e-7 on unit-scaled stencils.
pub fn invariant_directional_defect(
    expr: &dyn Fn(&Stencil) -> f64,
    gen: &SymmetryGenerator,
    s: &Stencil,
) -> Result<f64> {
    let diff = |e: f64| -> Result<f64> {
        let plus = expr(&flow_stencil(gen, e, s)?);
        let minus = expr(&flow_stencil(gen, -e, s)?);
        Ok((plus - minus) / (2.0 * e))
    };
    let e = 1e-3;
    let d1 = diff(e)?;
    let d2 = diff(e / 2.0)?;
    Ok(((4.0 * d2 - d1) / 3.0).abs())
}

// ---------------------------------------------------------------------------
// Mass-coordinate generators (extended space (t, s, x, u, rho))
// ---------------------------------------------------------------------------

pub type MassCoef = Arc<dyn Fn(MassPoint) -> f64 + Send + Sync>;

/// A point of the extended space the Lagrangian schemes live in.
#[derive(Debug, Clone, Copy)]
pub struct MassPoint {
    pub t: f64,
    pub s: f64,
    pub x: f64,
    pub u: f64,
    pub rho: f64,
}

/// Generator acting on the extended mass-coordinate space.
///
/// `StarH` is the difference analog of the grid-reparametrization family
/// `f(s) ∂/∂s + ρ D₊ₛ(f) ∂/∂ρ`; its density coefficient couples the two
/// nodes of an s-interval, so mass stencils are flowed jointly.
#[derive(Clone)]
pub enum MassGenerator {
    Pointwise {
        label: String,
        xi_t: MassCoef,
        xi_s: MassCoef,
        xi_x: MassCoef,
        eta: MassCoef,
        eta_rho: MassCoef,
    },
    StarH {
        label: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for MassGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MassGenerator({})", self.label())
    }
}

impl MassGenerator {
    pub fn pointwise(
        label: impl Into<String>,
        xi_t: impl Fn(MassPoint) -> f64 + Send + Sync + 'static,
        xi_s: impl Fn(MassPoint) -> f64 + Send + Sync + 'static,
        xi_x: impl Fn(MassPoint) -> f64 + Send + Sync + 'static,
        eta: impl Fn(MassPoint) -> f64 + Send + Sync + 'static,
        eta_rho: impl Fn(MassPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MassGenerator::Pointwise {
            label: label.into(),
            xi_t: Arc::new(xi_t),
            xi_s: Arc::new(xi_s),
            xi_x: Arc::new(xi_x),
            eta: Arc::new(eta),
            eta_rho: Arc::new(eta_rho),
        }
    }

    pub fn star_h(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MassGenerator::StarH {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            MassGenerator::Pointwise { label, .. } => label,
            MassGenerator::StarH { label, .. } => label,
        }
    }
}

/// Joint flow of a mass stencil.
///
/// State layout: `[t, t̂, s₋, s, s₊, x(6), u(6), ρ(6)]`; the three mass
/// nodes are shared by both layers (the s-grid is static in time), and
/// `ρ[i]` rides on the s-interval to the right of its node.  `ρ₊` has no
/// in-stencil right neighbor; its interval is continued with the step
/// `h_s⁺`, which is immaterial for interval-ratio invariants because the
/// upper and lower densities of one interval always share the factor.
pub fn flow_mass_stencil(gen: &MassGenerator, eps: f64, ms: &MassStencil) -> Result<MassStencil> {
    let rho0 = ms.rho.unwrap_or([1.0; 6]);
    let mut y0 = Vec::with_capacity(23);
    y0.push(ms.t);
    y0.push(ms.t + ms.tau);
    y0.push(ms.s - ms.hs_minus);
    y0.push(ms.s);
    y0.push(ms.s + ms.hs_plus);
    y0.extend_from_slice(&ms.x);
    y0.extend_from_slice(&ms.u);
    y0.extend_from_slice(&rho0);

    // node i -> index of its s coordinate and its layer time
    let s_of = [0usize, 1, 2, 0, 1, 2];
    let t_of = |y: &[f64], i: usize| if i < 3 { y[0] } else { y[1] };

    let rhs = |y: &[f64], dy: &mut [f64]| {
        for v in dy.iter_mut() {
            *v = 0.0;
        }
        match gen {
            MassGenerator::Pointwise {
                xi_t,
                xi_s,
                xi_x,
                eta,
                eta_rho,
                ..
            } => {
                // s nodes: ξ^s depends on s only for every catalogued
                // operator; evaluate with the lower-layer center data.
                for j in 0..3 {
                    let p = MassPoint {
                        t: y[0],
                        s: y[2 + j],
                        x: y[5 + j],
                        u: y[11 + j],
                        rho: y[17 + j],
                    };
                    dy[2 + j] = xi_s(p);
                }
                for i in 0..6 {
                    let p = MassPoint {
                        t: t_of(y, i),
                        s: y[2 + s_of[i]],
                        x: y[5 + i],
                        u: y[11 + i],
                        rho: y[17 + i],
                    };
                    dy[5 + i] = xi_x(p);
                    dy[11 + i] = eta(p);
                    dy[17 + i] = eta_rho(p);
                    if i == 1 {
                        dy[0] = xi_t(p);
                    }
                    if i == 4 {
                        dy[1] = xi_t(p);
                    }
                }
            }
            MassGenerator::StarH { f, .. } => {
                for j in 0..3 {
                    dy[2 + j] = f(y[2 + j]);
                }
                // density factor per s-interval: D₊ₛ(f) on that interval
                let d_int = |a: f64, b: f64| (f(b) - f(a)) / (b - a);
                let g_minus = d_int(y[2], y[3]);
                let g_center = d_int(y[3], y[4]);
                // continuation interval for rho_plus
                let hs = y[4] - y[3];
                let g_plus = d_int(y[4], y[4] + hs);
                let g = [g_minus, g_center, g_plus, g_minus, g_center, g_plus];
                for i in 0..6 {
                    dy[17 + i] = y[17 + i] * g[i];
                }
            }
        }
    };

    let out = flow_ode(&rhs, &y0, eps, gen.label())?;
    let t = out[0];
    let t_hat = out[1];
    if (t_hat - t) <= 0.0 {
        return Err(Error::DomainError("flow reversed the time step".into()));
    }
    let skew_scale = t.abs().max(t_hat.abs()).max(1.0);
    let _ = skew_scale; // layers are flat by construction (one t per layer)
    let hs_minus = out[3] - out[2];
    let hs_plus = out[4] - out[3];
    if hs_minus <= 0.0 || hs_plus <= 0.0 {
        return Err(Error::DomainError("flow collapsed an s-interval".into()));
    }
    let mut x = [0.0; 6];
    let mut u = [0.0; 6];
    let mut rho = [0.0; 6];
    x.copy_from_slice(&out[5..11]);
    u.copy_from_slice(&out[11..17]);
    rho.copy_from_slice(&out[17..23]);
    Ok(MassStencil {
        t,
        tau: t_hat - t,
        s: out[3],
        hs_plus,
        hs_minus,
        x,
        u,
        rho: ms.rho.map(|_| rho),
    })
}

/// Residual defect of a mass-coordinate scheme after a joint flow.
pub fn mass_invariance_defect(
    id: SchemeId,
    params: &SchemeParams,
    gen: &MassGenerator,
    ms: &MassStencil,
    eps: f64,
) -> Result<f64> {
    let moved = flow_mass_stencil(gen, eps, ms)?;
    if moved.u.iter().any(|&v| v <= 0.0) {
        return Err(Error::InadmissibleImage {
            scheme: format!("{id:?}"),
            reason: "nonpositive u after flow".into(),
        });
    }
    let (f, scale) = schemes::mass_residual_with_scale(id, params, &moved)?;
    Ok(f.abs() / scale.max(1e-300))
}

/// Mesh-equation defect of a mass-coordinate scheme after a joint flow.
pub fn mass_mesh_invariance_defect(
    id: SchemeId,
    params: &SchemeParams,
    gen: &MassGenerator,
    ms: &MassStencil,
    eps: f64,
) -> Result<f64> {
    let moved = flow_mass_stencil(gen, eps, ms)?;
    let (f, scale) = schemes::mass_mesh_residual_with_scale(id, params, &moved)?;
    Ok(f.abs() / scale.max(1e-300))
}

/// Directional defect of an expression of a mass stencil.
pub fn mass_directional_defect(
    expr: &dyn Fn(&MassStencil) -> f64,
    gen: &MassGenerator,
    ms: &MassStencil,
) -> Result<f64> {
    let diff = |e: f64| -> Result<f64> {
        let plus = expr(&flow_mass_stencil(gen, e, ms)?);
        let minus = expr(&flow_mass_stencil(gen, -e, ms)?);
        Ok((plus - minus) / (2.0 * e))
    };
    let e = 1e-3;
    let d1 = diff(e)?;
    let d2 = diff(e / 2.0)?;
    Ok(((4.0 * d2 - d1) / 3.0).abs())
}

/// Relative time disagreement of a set of flowed points that should form
/// one flat layer; compared against [`LAYER_SKEW_TOL`] by `from_nodes`.
pub fn layer_skew(points: &[Point]) -> f64 {
    let t0 = points[0].t;
    let scale = points.iter().map(|p| p.t.abs()).fold(1.0f64, f64::max);
    points
        .iter()
        .map(|p| (p.t - t0).abs() / scale)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaling_x4_op54() -> SymmetryGenerator {
        SymmetryGenerator::new("2t d/dt + x d/dx", |t, _, _| 2.0 * t, |_, x, _| x, |_, _, _| 0.0)
    }

    fn galilean_x3_op54() -> SymmetryGenerator {
        SymmetryGenerator::new(
            "2t d/dx - xu d/du",
            |_, _, _| 0.0,
            |t, _, _| 2.0 * t,
            |_, x, u| -x * u,
        )
    }

    #[test]
    fn identity_at_zero_parameter() {
        let gen = scaling_x4_op54();
        let p = Point::new(1.0, 2.0, 3.0);
        let q = flow_point(&gen, 0.0, p).unwrap();
        assert_eq!((q.t, q.x, q.u), (1.0, 2.0, 3.0));
    }

    #[test]
    fn scaling_flow_matches_exponential_oracle() {
        // Closed form: t -> e^{2ε} t, x -> e^{ε} x, u unchanged.
        let gen = scaling_x4_op54();
        let q = flow_point(&gen, 0.5, Point::new(1.0, 2.0, 5.0)).unwrap();
        assert!((q.t - 1.0f64.exp()).abs() < 1e-12, "t = {}", q.t);
        assert!((q.x - 2.0 * 0.5f64.exp()).abs() < 1e-12, "x = {}", q.x);
        assert!((q.u - 5.0).abs() < 1e-13);
    }

    #[test]
    fn galilean_flow_matches_analytic_oracle() {
        // Lie equations give x̄ = x + 2tε, ū = u exp(-xε - tε²).
        let gen = galilean_x3_op54();
        let q = flow_point(&gen, 1.0, Point::new(1.0, 0.0, 1.0)).unwrap();
        assert!((q.t - 1.0).abs() < 1e-14);
        assert!((q.x - 2.0).abs() < 1e-12);
        assert!((q.u - (-1.0f64).exp()).abs() < 1e-12, "u = {}", q.u);
    }

    #[test]
    fn projective_flow_matches_closed_form() {
        // X₅ = 4t² ∂t + 4tx ∂x - (x²+2t)u ∂u has the closed-form flow
        // t̄ = t/(1-4tε), x̄ = x/(1-4tε), ū = u √(1-4tε) exp(-εx²/(1-4tε)).
        let gen = SymmetryGenerator::new(
            "X5",
            |t, _, _| 4.0 * t * t,
            |t, x, _| 4.0 * t * x,
            |t, x, u| -(x * x + 2.0 * t) * u,
        );
        let (t, x, u, e) = (0.3, 0.7, 1.3, 0.4);
        let q = flow_point(&gen, e, Point::new(t, x, u)).unwrap();
        let m = 1.0 - 4.0 * t * e;
        assert!((q.t - t / m).abs() < 1e-11);
        assert!((q.x - x / m).abs() < 1e-11);
        let u_exact = u * m.sqrt() * (-e * x * x / m).exp();
        assert!((q.u - u_exact).abs() < 1e-11, "u = {} vs {}", q.u, u_exact);
    }

    #[test]
    fn group_property_and_inverse() {
        let gen = galilean_x3_op54();
        let p = Point::new(0.8, -0.3, 2.0);
        let (a, b) = (0.35, -0.6);
        let through = flow_point(&gen, b, flow_point(&gen, a, p).unwrap()).unwrap();
        let direct = flow_point(&gen, a + b, p).unwrap();
        assert!((through.t - direct.t).abs() < 1e-10);
        assert!((through.x - direct.x).abs() < 1e-10);
        assert!((through.u - direct.u).abs() < 1e-10);

        let back = flow_point(&gen, -a, flow_point(&gen, a, p).unwrap()).unwrap();
        assert!((back.x - p.x).abs() < 1e-10 && (back.u - p.u).abs() < 1e-10);
    }

    #[test]
    fn stencil_translation_is_exact() {
        let gen = SymmetryGenerator::space_translation();
        let s = Stencil::orthogonal_uniform(0.5, 0.1, 1.0, 0.3, [1.0, 2.0, 3.0], [1.5, 2.5, 3.5]);
        let moved = flow_stencil(&gen, 7.0, &s).unwrap();
        assert!((moved.x - 8.0).abs() < 1e-12);
        assert!((moved.h_plus - 0.3).abs() < 1e-12);
        assert_eq!(moved.u_values(), s.u_values());
    }

    #[test]
    fn scaling_stencil_scales_steps() {
        // X₄ of the linear source-free case at ε = ln 2 / 2 doubles τ and
        // stretches h by √2.
        let gen = scaling_x4_op54();
        let s = Stencil::orthogonal_uniform(1.0, 0.2, 0.5, 0.4, [1.0; 3], [1.0; 3]);
        let eps = 0.5 * 2.0f64.ln();
        let moved = flow_stencil(&gen, eps, &s).unwrap();
        assert!((moved.tau - 0.4).abs() < 1e-12, "tau = {}", moved.tau);
        assert!(
            (moved.h_plus - 0.4 * 2.0f64.sqrt()).abs() < 1e-12,
            "h = {}",
            moved.h_plus
        );
    }

    #[test]
    fn galilean_keeps_layers_flat_but_drifts() {
        // X₃ of the log-source case: flat layers survive, orthogonality
        // does not.
        let delta = 1.0;
        let gen = SymmetryGenerator::new(
            "X3 op53",
            |_, _, _| 0.0,
            move |t, _, _| 2.0 * (delta * t).exp(),
            move |t, x, u| -delta * (delta * t).exp() * x * u,
        );
        let s = Stencil::orthogonal_uniform(0.4, 0.2, 0.0, 0.3, [1.0, 1.1, 1.2], [1.0, 1.1, 1.2]);
        let moved = flow_stencil(&gen, 0.3, &s).expect("flat layers must survive");
        assert!(moved.dx.abs() > 1e-3, "dx = {}", moved.dx);
    }

    #[test]
    fn mesh_conditions_for_translations() {
        let samples = vec![
            Stencil::orthogonal_uniform(0.5, 0.2, 0.3, 0.4, [1.0, 1.2, 1.4], [1.1, 1.3, 1.5]),
            Stencil::orthogonal(1.1, 0.3, -0.2, 0.5, 0.25, [0.8, 1.0, 1.2], [0.9, 1.1, 1.3]),
        ];
        let r = check_mesh_conditions(&SymmetryGenerator::time_translation(), &samples);
        assert!(r.uniform_t && r.uniform_x && r.orthogonal && r.flat_layers);
    }

    #[test]
    fn mesh_conditions_detect_broken_space_uniformity() {
        // X₅ = x² ∂x - 3xu ∂u: space uniformity lost, orthogonality kept.
        let gen = SymmetryGenerator::new(
            "x^2 d/dx - 3xu d/du",
            |_, _, _| 0.0,
            |_, x, _| x * x,
            |_, x, u| -3.0 * x * u,
        );
        let samples = vec![Stencil::orthogonal_uniform(
            0.5,
            0.2,
            0.3,
            0.4,
            [1.0, 1.2, 1.4],
            [1.1, 1.3, 1.5],
        )];
        let r = check_mesh_conditions(&gen, &samples);
        assert!(!r.uniform_x);
        assert!(r.orthogonal && r.flat_layers && r.uniform_t);
    }

    #[test]
    fn mesh_conditions_detect_broken_orthogonality() {
        // X₃ of the log-source case keeps flat layers only.
        let gen = SymmetryGenerator::new(
            "X3 op53",
            |_, _, _| 0.0,
            |t, _, _| 2.0 * t.exp(),
            |t, x, u| -t.exp() * x * u,
        );
        let samples = vec![Stencil::orthogonal_uniform(
            0.5,
            0.2,
            0.3,
            0.4,
            [1.0, 1.2, 1.4],
            [1.1, 1.3, 1.5],
        )];
        let r = check_mesh_conditions(&gen, &samples);
        assert!(!r.orthogonal);
        assert!(r.flat_layers && r.uniform_x);
    }
}
