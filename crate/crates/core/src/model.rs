//! Group classification of `u_t = (K(u) u_x)_x + Q(u)`.
//!
//! For each special pair (K, Q) that enlarges the admitted symmetry group,
//! [`lookup`] returns the generators (transcribed as closed-form
//! coefficient functions), the invariant mesh classes, the applicable
//! scheme ids, and the point-transform links to equivalent cases.
//!
//! Cases are addressable by canonical string keys such as `K=u^s,Q=0` or
//! `K=u^-4/3,Q=d*u`; see [`HeatModel::from_key`].

use crate::error::{Error, Result};
use crate::schemes::SchemeId;
use crate::symmetry::{MassGenerator, SymmetryGenerator};
use crate::transforms::TransformId;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KFamily {
    /// K(u) arbitrary.
    Arbitrary,
    /// K = e^u.
    Exponential,
    /// K = u^σ, σ ∉ {0, -4/3}.
    Power,
    /// K = u^{-4/3} (its own family: extra symmetries).
    PowerMinus43,
    /// K = 1.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QFamily {
    /// Q(u) arbitrary.
    Arbitrary,
    /// Q = 0.
    Zero,
    /// Q = δ.
    Constant,
    /// Q = ±e^{αu}, α ≠ 0.
    ExpSource,
    /// Q = ±u^n.
    PowerSource,
    /// Q = δ u ln u.
    LogSource,
    /// Q = δ u.
    LinearSource,
    /// Q = ±e^u + δ.
    MixedExpConst,
    /// Q = ±u^{σ+1} + δu.
    MixedPowerLinear,
    /// Q = ±u^{-1/3} + δu (only with K = u^{-4/3}).
    MixedCritical,
}

/// A classification case with its parameters.
///
/// Fields a case does not use stay `None` and are ignored; `sign` is the ±
/// in front of the leading source term, `alpha` is the free exponent of
/// the exponential source, `delta` the ±1 of the secondary/linear source
/// terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatModel {
    pub k_family: KFamily,
    pub q_family: QFamily,
    pub sigma: Option<f64>,
    pub n: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub sign: Option<f64>,
}

impl HeatModel {
    pub fn new(k_family: KFamily, q_family: QFamily) -> Self {
        HeatModel {
            k_family,
            q_family,
            sigma: None,
            n: None,
            delta: None,
            alpha: None,
            sign: None,
        }
    }

    pub fn sigma(mut self, v: f64) -> Self {
        self.sigma = Some(v);
        self
    }
    pub fn n(mut self, v: f64) -> Self {
        self.n = Some(v);
        self
    }
    pub fn delta(mut self, v: f64) -> Self {
        self.delta = Some(v);
        self
    }
    pub fn alpha(mut self, v: f64) -> Self {
        self.alpha = Some(v);
        self
    }
    pub fn sign(mut self, v: f64) -> Self {
        self.sign = Some(v);
        self
    }

    /// Effective diffusion exponent: σ for the power family, -4/3 for its
    /// special case.
    pub fn sigma_eff(&self) -> Option<f64> {
        match self.k_family {
            KFamily::Power => self.sigma,
            KFamily::PowerMinus43 => Some(-4.0 / 3.0),
            _ => None,
        }
    }

    fn need(&self, field: Option<f64>, name: &str) -> Result<f64> {
        field.ok_or_else(|| Error::InvalidParameter(format!("{name} required for {}", self.key())))
    }

    pub fn delta_checked(&self) -> Result<f64> {
        let d = self.need(self.delta, "delta")?;
        if d == 1.0 || d == -1.0 {
            Ok(d)
        } else {
            Err(Error::InvalidParameter(format!("delta must be ±1, got {d}")))
        }
    }

    pub fn sign_checked(&self) -> Result<f64> {
        let s = self.need(self.sign, "sign")?;
        if s == 1.0 || s == -1.0 {
            Ok(s)
        } else {
            Err(Error::InvalidParameter(format!("sign must be ±1, got {s}")))
        }
    }

    pub fn sigma_checked(&self) -> Result<f64> {
        match self.k_family {
            KFamily::PowerMinus43 => Ok(-4.0 / 3.0),
            _ => self.need(self.sigma, "sigma"),
        }
    }

    pub fn n_checked(&self) -> Result<f64> {
        self.need(self.n, "n")
    }

    pub fn alpha_checked(&self) -> Result<f64> {
        self.need(self.alpha, "alpha")
    }

    /// Canonical key of the case, e.g. `K=u^s,Q=+u^n`.
    pub fn key(&self) -> String {
        let sign = |v: Option<f64>| if v == Some(-1.0) { "-" } else { "+" };
        let k = match self.k_family {
            KFamily::Arbitrary => "K=K(u)",
            KFamily::Exponential => "K=e^u",
            KFamily::Power => "K=u^s",
            KFamily::PowerMinus43 => "K=u^-4/3",
            KFamily::Linear => "K=1",
        };
        let q = match self.q_family {
            QFamily::Arbitrary => "Q=Q(u)".to_string(),
            QFamily::Zero => "Q=0".to_string(),
            QFamily::Constant => "Q=d".to_string(),
            QFamily::ExpSource => format!("Q={}e^{{au}}", sign(self.sign)),
            QFamily::PowerSource => match self.k_family {
                KFamily::PowerMinus43 if self.n == Some(-1.0 / 3.0) => {
                    format!("Q={}u^-1/3", sign(self.sign))
                }
                _ => format!("Q={}u^n", sign(self.sign)),
            },
            QFamily::LogSource => "Q=d*u*ln(u)".to_string(),
            QFamily::LinearSource => "Q=d*u".to_string(),
            QFamily::MixedExpConst => format!("Q={}e^u+d", sign(self.sign)),
            QFamily::MixedPowerLinear => format!("Q={}u^{{s+1}}+d*u", sign(self.sign)),
            QFamily::MixedCritical => format!("Q={}u^-1/3+d*u", sign(self.sign)),
        };
        format!("{k},{q}")
    }

    /// Parse a canonical key.  Parameters that the key cannot carry
    /// (σ, n, α, δ) default to `sigma=1`, `n=2`, `alpha=1`, `delta=+1` and
    /// can be overridden afterwards with the builder methods.
    pub fn from_key(key: &str) -> Result<Self> {
        let norm: String = key.chars().filter(|c| !c.is_whitespace()).collect();
        let (k_part, q_part) = norm
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("model key `{key}` lacks a comma")))?;
        let k_family = match k_part {
            "K=K(u)" => KFamily::Arbitrary,
            "K=e^u" => KFamily::Exponential,
            "K=u^s" => KFamily::Power,
            "K=u^-4/3" => KFamily::PowerMinus43,
            "K=1" => KFamily::Linear,
            other => return Err(Error::Parse(format!("unknown K part `{other}`"))),
        };
        let q = q_part
            .strip_prefix("Q=")
            .ok_or_else(|| Error::Parse(format!("malformed Q part in `{key}`")))?;
        let (sign, q_body) = match q.chars().next() {
            Some('+') => (1.0, &q[1..]),
            Some('-') if q != "-4/3" => (-1.0, &q[1..]),
            _ => (1.0, q),
        };
        let mut m = HeatModel::new(k_family, QFamily::Zero);
        match q_body {
            "Q(u)" => m.q_family = QFamily::Arbitrary,
            "0" => m.q_family = QFamily::Zero,
            "d" => {
                m.q_family = QFamily::Constant;
                m.delta = Some(1.0);
            }
            "e^{au}" | "e^{a*u}" => {
                m.q_family = QFamily::ExpSource;
                m.sign = Some(sign);
                m.alpha = Some(1.0);
            }
            "u^n" => {
                m.q_family = QFamily::PowerSource;
                m.sign = Some(sign);
                m.n = Some(2.0);
            }
            "u^-1/3" => {
                m.q_family = QFamily::PowerSource;
                m.sign = Some(sign);
                m.n = Some(-1.0 / 3.0);
            }
            "d*u*ln(u)" => {
                m.q_family = QFamily::LogSource;
                m.delta = Some(1.0);
            }
            "d*u" => {
                m.q_family = QFamily::LinearSource;
                m.delta = Some(1.0);
            }
            "e^u+d" => {
                m.q_family = QFamily::MixedExpConst;
                m.sign = Some(sign);
                m.delta = Some(1.0);
            }
            "u^{s+1}+d*u" => {
                m.q_family = QFamily::MixedPowerLinear;
                m.sign = Some(sign);
                m.delta = Some(1.0);
            }
            "u^-1/3+d*u" => {
                m.q_family = QFamily::MixedCritical;
                m.sign = Some(sign);
                m.delta = Some(1.0);
            }
            other => return Err(Error::Parse(format!("unknown Q part `{other}`"))),
        }
        if matches!(m.k_family, KFamily::Power) {
            m.sigma = Some(1.0);
        }
        Ok(m)
    }
}

/// Invariant mesh classes occurring in the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshClass {
    OrthogonalUniform,
    OrthogonalUniformLogTime,
    OrthogonalNonuniformSpace,
    MovingFlatLayers,
    MassCoordinate,
}

/// Which generators of the entry a scheme is invariant under.
#[derive(Debug, Clone, PartialEq)]
pub enum Admitted {
    /// Every generator of the entry.
    All,
    /// Only the listed indices into `generators` (e.g. the simplest
    /// orthogonal approximation of the linear equation keeps four of six).
    Subset(Vec<usize>),
    /// The scheme lives in the mass-coordinate space and is audited
    /// against `mass_generators`.
    MassOps,
    /// Mass-coordinate scheme invariant only under the listed indices
    /// into `mass_generators` (the uniform-grid simplification drops the
    /// reparametrizations that bend the s-grid).
    MassSubset(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct SchemeBinding {
    pub id: SchemeId,
    pub mesh_class: MeshClass,
    pub admitted: Admitted,
}

/// Full classification entry for one (K, Q) case.
#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub model: HeatModel,
    pub generators: Vec<SymmetryGenerator>,
    /// Generators of the associated mass-coordinate system, when one
    /// exists for the case.
    pub mass_generators: Vec<MassGenerator>,
    pub mesh_classes: Vec<MeshClass>,
    pub schemes: Vec<SchemeBinding>,
    pub transforms: Vec<(TransformId, HeatModel)>,
}

impl ModelEntry {
    pub fn scheme_ids(&self) -> Vec<SchemeId> {
        self.schemes.iter().map(|b| b.id).collect()
    }

    /// Generators a given scheme of this entry must be invariant under.
    pub fn admitted_generators(&self, id: SchemeId) -> Vec<&SymmetryGenerator> {
        match self.schemes.iter().find(|b| b.id == id).map(|b| &b.admitted) {
            Some(Admitted::All) => self.generators.iter().collect(),
            Some(Admitted::Subset(ix)) => ix.iter().map(|&i| &self.generators[i]).collect(),
            _ => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Generator sets
// ---------------------------------------------------------------------------

fn x1() -> SymmetryGenerator {
    SymmetryGenerator::time_translation()
}

fn x2() -> SymmetryGenerator {
    SymmetryGenerator::space_translation()
}

/// `2t ∂t + x ∂x` — the scale shared by several source-free cases.
fn parabolic_scaling() -> SymmetryGenerator {
    SymmetryGenerator::new("2t∂t + x∂x", |t, _, _| 2.0 * t, |_, x, _| x, |_, _, _| 0.0)
}

fn op12() -> Vec<SymmetryGenerator> {
    vec![x1(), x2(), parabolic_scaling()]
}

fn op21() -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        parabolic_scaling(),
        SymmetryGenerator::new("t∂t - ∂u", |t, _, _| t, |_, _, _| 0.0, |_, _, _| -1.0),
    ]
}

fn op22(delta: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "e^{-δt}∂t + δe^{-δt}∂u",
            move |t, _, _| (-delta * t).exp(),
            |_, _, _| 0.0,
            move |t, _, _| delta * (-delta * t).exp(),
        ),
        SymmetryGenerator::new("x∂x + 2∂u", |_, _, _| 0.0, |_, x, _| x, |_, _, _| 2.0),
    ]
}

fn op23(alpha: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2αt∂t + (α-1)x∂x - 2∂u",
            move |t, _, _| 2.0 * alpha * t,
            move |_, x, _| (alpha - 1.0) * x,
            |_, _, _| -2.0,
        ),
    ]
}

fn op24(delta: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "e^{-δt}∂t + δe^{-δt}∂u",
            move |t, _, _| (-delta * t).exp(),
            |_, _, _| 0.0,
            move |t, _, _| delta * (-delta * t).exp(),
        ),
    ]
}

fn power_scaling(sigma: f64) -> SymmetryGenerator {
    SymmetryGenerator::new(
        "σx∂x + 2u∂u",
        |_, _, _| 0.0,
        move |_, x, _| sigma * x,
        |_, _, u| 2.0 * u,
    )
}

fn op31(sigma: f64) -> Vec<SymmetryGenerator> {
    vec![x1(), x2(), parabolic_scaling(), power_scaling(sigma)]
}

fn exp_time_scaling(delta: f64, sigma: f64) -> SymmetryGenerator {
    SymmetryGenerator::new(
        "e^{-δσt}∂t + δe^{-δσt}u∂u",
        move |t, _, _| (-delta * sigma * t).exp(),
        |_, _, _| 0.0,
        move |t, _, u| delta * (-delta * sigma * t).exp() * u,
    )
}

fn op32(sigma: f64, delta: f64) -> Vec<SymmetryGenerator> {
    vec![x1(), x2(), power_scaling(sigma), exp_time_scaling(delta, sigma)]
}

fn op33(sigma: f64, n: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2(n-1)t∂t + (n-σ-1)x∂x - 2u∂u",
            move |t, _, _| 2.0 * (n - 1.0) * t,
            move |_, x, _| (n - sigma - 1.0) * x,
            |_, _, u| -2.0 * u,
        ),
    ]
}

fn op34(sigma: f64, delta: f64) -> Vec<SymmetryGenerator> {
    vec![x1(), x2(), exp_time_scaling(delta, sigma)]
}

fn projective_x(weight: f64) -> SymmetryGenerator {
    SymmetryGenerator::new(
        "x²∂x - 3xu∂u",
        |_, _, _| 0.0,
        |_, x, _| x * x,
        move |_, x, u| weight * x * u,
    )
}

fn op41() -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        parabolic_scaling(),
        SymmetryGenerator::new("2x∂x - 3u∂u", |_, _, _| 0.0, |_, x, _| 2.0 * x, |_, _, u| {
            -3.0 * u
        }),
        projective_x(-3.0),
    ]
}

fn op42(delta: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new("2x∂x - 3u∂u", |_, _, _| 0.0, |_, x, _| 2.0 * x, |_, _, u| {
            -3.0 * u
        }),
        SymmetryGenerator::new(
            "e^{4δt/3}∂t + δe^{4δt/3}u∂u",
            move |t, _, _| (4.0 * delta * t / 3.0).exp(),
            |_, _, _| 0.0,
            move |t, _, u| delta * (4.0 * delta * t / 3.0).exp() * u,
        ),
        projective_x(-3.0),
    ]
}

/// Scaling admitted by `u_t = (u^{-4/3} u_x)_x ± u^{-1/3}`.
///
/// This is the σ = -4/3, n = -1/3 member of the power-source scaling
/// family, normalized to u-weight 2: `(8/3) t∂t + 2u∂u`.
fn critical_scaling() -> SymmetryGenerator {
    SymmetryGenerator::new(
        "(8/3)t∂t + 2u∂u",
        |t, _, _| 8.0 / 3.0 * t,
        |_, _, _| 0.0,
        |_, _, u| 2.0 * u,
    )
}

/// The non-translational space pair of the critical-source cases.
///
/// For the `+u^{-1/3}` branch these are the printed hyperbolic operators;
/// for the `-u^{-1/3}` branch the printed complex pair is replaced by its
/// real trigonometric combinations.
fn critical_space_pair(source_sign: f64) -> [SymmetryGenerator; 2] {
    if source_sign > 0.0 {
        [
            SymmetryGenerator::new(
                "e^{2x/√3}∂x - √3e^{2x/√3}u∂u",
                |_, _, _| 0.0,
                |_, x, _| (2.0 * x / SQRT3).exp(),
                |_, x, u| -SQRT3 * (2.0 * x / SQRT3).exp() * u,
            ),
            SymmetryGenerator::new(
                "e^{-2x/√3}∂x + √3e^{-2x/√3}u∂u",
                |_, _, _| 0.0,
                |_, x, _| (-2.0 * x / SQRT3).exp(),
                |_, x, u| SQRT3 * (-2.0 * x / SQRT3).exp() * u,
            ),
        ]
    } else {
        [
            SymmetryGenerator::new(
                "cos(2x/√3)∂x + √3sin(2x/√3)u∂u",
                |_, _, _| 0.0,
                |_, x, _| (2.0 * x / SQRT3).cos(),
                |_, x, u| SQRT3 * (2.0 * x / SQRT3).sin() * u,
            ),
            SymmetryGenerator::new(
                "sin(2x/√3)∂x - √3cos(2x/√3)u∂u",
                |_, _, _| 0.0,
                |_, x, _| (2.0 * x / SQRT3).sin(),
                |_, x, u| -SQRT3 * (2.0 * x / SQRT3).cos() * u,
            ),
        ]
    }
}

fn op44(source_sign: f64) -> Vec<SymmetryGenerator> {
    let [x4, x5] = critical_space_pair(source_sign);
    vec![x1(), x2(), critical_scaling(), x4, x5]
}

fn op45(source_sign: f64, delta: f64) -> Vec<SymmetryGenerator> {
    let [x4, x5] = critical_space_pair(source_sign);
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "e^{4δt/3}∂t + δe^{4δt/3}u∂u",
            move |t, _, _| (4.0 * delta * t / 3.0).exp(),
            |_, _, _| 0.0,
            move |t, _, u| delta * (4.0 * delta * t / 3.0).exp() * u,
        ),
        x4,
        x5,
    ]
}

fn op51() -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2t∂t + x∂x - 2∂u",
            |t, _, _| 2.0 * t,
            |_, x, _| x,
            |_, _, _| -2.0,
        ),
    ]
}

fn op52(n: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2(n-1)t∂t + (n-1)x∂x - 2u∂u",
            move |t, _, _| 2.0 * (n - 1.0) * t,
            move |_, x, _| (n - 1.0) * x,
            |_, _, u| -2.0 * u,
        ),
    ]
}

fn op53(delta: f64) -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2e^{δt}∂x - δe^{δt}xu∂u",
            |_, _, _| 0.0,
            move |t, _, _| 2.0 * (delta * t).exp(),
            move |t, x, u| -delta * (delta * t).exp() * x * u,
        ),
        SymmetryGenerator::new("e^{δt}u∂u", |_, _, _| 0.0, |_, _, _| 0.0, move |t, _, u| {
            (delta * t).exp() * u
        }),
    ]
}

pub fn op54() -> Vec<SymmetryGenerator> {
    vec![
        x1(),
        x2(),
        SymmetryGenerator::new(
            "2t∂x - xu∂u",
            |_, _, _| 0.0,
            |t, _, _| 2.0 * t,
            |_, x, u| -x * u,
        ),
        parabolic_scaling(),
        SymmetryGenerator::new(
            "4t²∂t + 4tx∂x - (x²+2t)u∂u",
            |t, _, _| 4.0 * t * t,
            |t, x, _| 4.0 * t * x,
            |t, x, u| -(x * x + 2.0 * t) * u,
        ),
        SymmetryGenerator::new("u∂u", |_, _, _| 0.0, |_, _, _| 0.0, |_, _, u| u),
    ]
}

/// Operators of the power-law diffusion written in the mass coordinate
/// (potential form): the space of the scheme is `(t, s)` with `x` riding
/// along as a discrete potential.
fn op31n(sigma: f64) -> Vec<MassGenerator> {
    vec![
        MassGenerator::pointwise("∂t", |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0),
        MassGenerator::pointwise("∂x", |_| 0.0, |_| 0.0, |_| 1.0, |_| 0.0, |_| 0.0),
        MassGenerator::pointwise("∂s", |_| 0.0, |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0),
        MassGenerator::pointwise(
            "2t∂t + s∂s + x∂x",
            |p| 2.0 * p.t,
            |p| p.s,
            |p| p.x,
            |_| 0.0,
            |_| 0.0,
        ),
        MassGenerator::pointwise(
            "(σ+2)s∂s + σx∂x + 2u∂u",
            |_| 0.0,
            move |p| (sigma + 2.0) * p.s,
            move |p| sigma * p.x,
            |p| 2.0 * p.u,
            |_| 0.0,
        ),
    ]
}

/// Operators of the stopped (mass-coordinate) linear heat system,
/// including three concrete members of the grid-reparametrization family.
pub fn ts4() -> Vec<MassGenerator> {
    vec![
        MassGenerator::pointwise("∂t", |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0),
        MassGenerator::pointwise("∂x", |_| 0.0, |_| 0.0, |_| 1.0, |_| 0.0, |_| 0.0),
        MassGenerator::pointwise(
            "2t∂x - xu∂u",
            |_| 0.0,
            |_| 0.0,
            |p| 2.0 * p.t,
            |p| -p.x * p.u,
            |_| 0.0,
        ),
        MassGenerator::pointwise(
            "2t∂t + x∂x + s∂s",
            |p| 2.0 * p.t,
            |p| p.s,
            |p| p.x,
            |_| 0.0,
            |_| 0.0,
        ),
        MassGenerator::pointwise(
            "4t²∂t + 4tx∂x - (x²+2t)u∂u - 4tρ∂ρ",
            |p| 4.0 * p.t * p.t,
            |_| 0.0,
            |p| 4.0 * p.t * p.x,
            |p| -(p.x * p.x + 2.0 * p.t) * p.u,
            |p| -4.0 * p.t * p.rho,
        ),
        MassGenerator::pointwise("u∂u", |_| 0.0, |_| 0.0, |_| 0.0, |p| p.u, |_| 0.0),
        MassGenerator::star_h("X*(f=1)", |_| 1.0),
        MassGenerator::star_h("X*(f=s)", |s| s),
        MassGenerator::star_h("X*(f=s²)", |s| s * s),
    ]
}

// ---------------------------------------------------------------------------
// Lookup
// ---------------------------------------------------------------------------

use Admitted::{All, MassOps};
use MeshClass::*;

fn bind(id: SchemeId, mesh_class: MeshClass) -> SchemeBinding {
    SchemeBinding {
        id,
        mesh_class,
        admitted: All,
    }
}

/// Resolve a model to its classification entry.
///
/// Returns `UnknownCase` when the (K, Q) pair is not in the
/// classification, or when parameters push the model out of its family
/// (σ ∈ {0, -4/3} under the generic power family).
pub fn lookup(model: &HeatModel) -> Result<ModelEntry> {
    use KFamily as K;
    use QFamily as Q;

    let unknown = || Error::UnknownCase(model.key());

    let entry = match (model.k_family, model.q_family) {
        (K::Arbitrary, Q::Arbitrary) => ModelEntry {
            model: *model,
            generators: vec![x1(), x2()],
            mass_generators: vec![],
            mesh_classes: vec![OrthogonalUniform],
            schemes: vec![bind(SchemeId::SH11, OrthogonalUniform)],
            transforms: vec![],
        },
        (K::Arbitrary, Q::Zero) => ModelEntry {
            model: *model,
            generators: op12(),
            mass_generators: vec![],
            mesh_classes: vec![OrthogonalUniform],
            schemes: vec![bind(SchemeId::SH12, OrthogonalUniform)],
            transforms: vec![],
        },
        (K::Exponential, Q::Zero) => ModelEntry {
            model: *model,
            generators: op21(),
            mass_generators: vec![],
            mesh_classes: vec![OrthogonalUniform],
            schemes: vec![bind(SchemeId::SH21, OrthogonalUniform)],
            transforms: vec![],
        },
        (K::Exponential, Q::Constant) => {
            let delta = model.delta_checked()?;
            ModelEntry {
                model: *model,
                generators: op22(delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniformLogTime],
                schemes: vec![bind(SchemeId::SH22, OrthogonalUniformLogTime)],
                transforms: vec![(
                    TransformId::Ch22 { delta },
                    HeatModel::new(K::Exponential, Q::Zero),
                )],
            }
        }
        (K::Exponential, Q::ExpSource) => {
            let alpha = model.alpha_checked()?;
            if alpha == 0.0 {
                return Err(Error::InvalidParameter("exp-source needs alpha != 0".into()));
            }
            model.sign_checked()?;
            ModelEntry {
                model: *model,
                generators: op23(alpha),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![bind(SchemeId::SH23, OrthogonalUniform)],
                transforms: vec![],
            }
        }
        (K::Exponential, Q::MixedExpConst) => {
            let delta = model.delta_checked()?;
            let sign = model.sign_checked()?;
            ModelEntry {
                model: *model,
                generators: op24(delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniformLogTime],
                schemes: vec![bind(SchemeId::SH24, OrthogonalUniformLogTime)],
                transforms: vec![(
                    TransformId::Ch22 { delta },
                    HeatModel::new(K::Exponential, Q::ExpSource)
                        .alpha(1.0)
                        .sign(sign),
                )],
            }
        }
        (K::Power, Q::Zero) => {
            let sigma = model.sigma_checked()?;
            if sigma == 0.0 || (sigma + 4.0 / 3.0).abs() < 1e-12 {
                return Err(unknown());
            }
            ModelEntry {
                model: *model,
                generators: op31(sigma),
                mass_generators: op31n(sigma),
                mesh_classes: vec![OrthogonalUniform, MovingFlatLayers, MassCoordinate],
                schemes: vec![
                    bind(SchemeId::SH31, OrthogonalUniform),
                    bind(SchemeId::SH31A, MovingFlatLayers),
                    SchemeBinding {
                        id: SchemeId::SH31N,
                        mesh_class: MassCoordinate,
                        admitted: MassOps,
                    },
                ],
                transforms: vec![],
            }
        }
        (K::Power, Q::LinearSource) => {
            let sigma = model.sigma_checked()?;
            let delta = model.delta_checked()?;
            if sigma == 0.0 || (sigma + 4.0 / 3.0).abs() < 1e-12 {
                return Err(unknown());
            }
            ModelEntry {
                model: *model,
                generators: op32(sigma, delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniformLogTime],
                schemes: vec![bind(SchemeId::SH32, OrthogonalUniformLogTime)],
                transforms: vec![(
                    TransformId::Ch32 { delta, sigma },
                    HeatModel::new(K::Power, Q::Zero).sigma(sigma),
                )],
            }
        }
        (K::Power, Q::PowerSource) => {
            let sigma = model.sigma_checked()?;
            let n = model.n_checked()?;
            model.sign_checked()?;
            if sigma == 0.0 || (sigma + 4.0 / 3.0).abs() < 1e-12 {
                return Err(unknown());
            }
            ModelEntry {
                model: *model,
                generators: op33(sigma, n),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![bind(SchemeId::SH33, OrthogonalUniform)],
                transforms: vec![],
            }
        }
        (K::Power, Q::MixedPowerLinear) => {
            let sigma = model.sigma_checked()?;
            let delta = model.delta_checked()?;
            let sign = model.sign_checked()?;
            if sigma == 0.0 || (sigma + 4.0 / 3.0).abs() < 1e-12 {
                return Err(unknown());
            }
            ModelEntry {
                model: *model,
                generators: op34(sigma, delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniformLogTime],
                schemes: vec![bind(SchemeId::SH34, OrthogonalUniformLogTime)],
                transforms: vec![(
                    TransformId::Ch32 { delta, sigma },
                    HeatModel::new(K::Power, Q::PowerSource)
                        .sigma(sigma)
                        .n(sigma + 1.0)
                        .sign(sign),
                )],
            }
        }
        (K::PowerMinus43, Q::Zero) => ModelEntry {
            model: *model,
            generators: op41(),
            mass_generators: vec![],
            mesh_classes: vec![OrthogonalNonuniformSpace],
            schemes: vec![bind(SchemeId::SH41, OrthogonalNonuniformSpace)],
            transforms: vec![],
        },
        (K::PowerMinus43, Q::LinearSource) => {
            let delta = model.delta_checked()?;
            ModelEntry {
                model: *model,
                generators: op42(delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalNonuniformSpace, OrthogonalUniformLogTime],
                schemes: vec![bind(SchemeId::SH42, OrthogonalNonuniformSpace)],
                transforms: vec![(
                    TransformId::Ch32 {
                        delta,
                        sigma: -4.0 / 3.0,
                    },
                    HeatModel::new(K::PowerMinus43, Q::Zero),
                )],
            }
        }
        (K::PowerMinus43, Q::PowerSource) => {
            let n = model.n_checked()?;
            let sign = model.sign_checked()?;
            if (n + 1.0 / 3.0).abs() < 1e-12 {
                // the critical exponent: five-dimensional algebra
                let tr = if sign > 0.0 {
                    TransformId::Ch44A
                } else {
                    TransformId::Ch44B
                };
                let id = if sign > 0.0 {
                    SchemeId::SH44A
                } else {
                    SchemeId::SH44B
                };
                ModelEntry {
                    model: *model,
                    generators: op44(sign),
                    mass_generators: vec![],
                    mesh_classes: vec![OrthogonalNonuniformSpace],
                    schemes: vec![bind(id, OrthogonalNonuniformSpace)],
                    transforms: vec![(tr, HeatModel::new(K::PowerMinus43, Q::Zero))],
                }
            } else {
                // no group extension beyond the generic power case
                ModelEntry {
                    model: *model,
                    generators: op33(-4.0 / 3.0, n),
                    mass_generators: vec![],
                    mesh_classes: vec![OrthogonalUniform],
                    schemes: vec![bind(SchemeId::SH33, OrthogonalUniform)],
                    transforms: vec![],
                }
            }
        }
        (K::PowerMinus43, Q::MixedCritical) => {
            let delta = model.delta_checked()?;
            let sign = model.sign_checked()?;
            let (tr, id) = if sign > 0.0 {
                (TransformId::Ch44A, SchemeId::SH45A)
            } else {
                (TransformId::Ch44B, SchemeId::SH45B)
            };
            ModelEntry {
                model: *model,
                generators: op45(sign, delta),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalNonuniformSpace, OrthogonalUniformLogTime],
                schemes: vec![bind(id, OrthogonalNonuniformSpace)],
                transforms: vec![
                    (tr, HeatModel::new(K::PowerMinus43, Q::LinearSource).delta(delta)),
                    (
                        TransformId::Ch32 {
                            delta,
                            sigma: -4.0 / 3.0,
                        },
                        HeatModel::new(K::PowerMinus43, Q::PowerSource)
                            .n(-1.0 / 3.0)
                            .sign(sign),
                    ),
                ],
            }
        }
        (K::Linear, Q::ExpSource) => {
            // Q = ±e^u: the printed case has unit exponent.
            model.sign_checked()?;
            ModelEntry {
                model: *model,
                generators: op51(),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![bind(SchemeId::SH51, OrthogonalUniform)],
                transforms: vec![],
            }
        }
        (K::Linear, Q::PowerSource) => {
            let n = model.n_checked()?;
            model.sign_checked()?;
            ModelEntry {
                model: *model,
                generators: op52(n),
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![bind(SchemeId::SH52, OrthogonalUniform)],
                transforms: vec![],
            }
        }
        (K::Linear, Q::LogSource) => {
            let delta = model.delta_checked()?;
            ModelEntry {
                model: *model,
                generators: op53(delta),
                mass_generators: vec![],
                mesh_classes: vec![MovingFlatLayers],
                schemes: vec![bind(SchemeId::SH53, MovingFlatLayers)],
                transforms: vec![],
            }
        }
        (K::Linear, Q::Zero) => ModelEntry {
            model: *model,
            generators: op54(),
            mass_generators: ts4(),
            mesh_classes: vec![MovingFlatLayers, OrthogonalUniform, MassCoordinate],
            schemes: vec![
                bind(SchemeId::SH54E, MovingFlatLayers),
                bind(SchemeId::SH54I, MovingFlatLayers),
                SchemeBinding {
                    id: SchemeId::EQ55A,
                    mesh_class: OrthogonalUniform,
                    // invariant under X₁, X₂, X₄, X₆ only
                    admitted: Admitted::Subset(vec![0, 1, 3, 5]),
                },
                SchemeBinding {
                    id: SchemeId::TS5G,
                    mesh_class: MassCoordinate,
                    admitted: MassOps,
                },
                SchemeBinding {
                    id: SchemeId::TS5U,
                    mesh_class: MassCoordinate,
                    // every operator except the s-grid-bending member of
                    // the reparametrization family
                    admitted: Admitted::MassSubset(vec![0, 1, 2, 3, 4, 5, 6, 7]),
                },
            ],
            transforms: vec![],
        },
        (K::Linear, Q::LinearSource) => {
            let delta = model.delta_checked()?;
            ModelEntry {
                model: *model,
                generators: vec![
                    x1(),
                    x2(),
                    SymmetryGenerator::new("u∂u", |_, _, _| 0.0, |_, _, _| 0.0, |_, _, u| u),
                ],
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![bind(SchemeId::SH52, OrthogonalUniform)],
                transforms: vec![(
                    TransformId::Ch55 { delta },
                    HeatModel::new(K::Linear, Q::Zero),
                )],
            }
        }
        (K::Linear, Q::Constant) => {
            let delta = model.delta_checked()?;
            ModelEntry {
                model: *model,
                generators: vec![
                    x1(),
                    x2(),
                    SymmetryGenerator::new("∂u", |_, _, _| 0.0, |_, _, _| 0.0, |_, _, _| 1.0),
                ],
                mass_generators: vec![],
                mesh_classes: vec![OrthogonalUniform],
                schemes: vec![],
                transforms: vec![(
                    TransformId::Ch56 { delta },
                    HeatModel::new(K::Linear, Q::Zero),
                )],
            }
        }
        _ => return Err(unknown()),
    };
    Ok(entry)
}

/// Every classification case, one representative each (δ = +1, sign = +1,
/// σ = 1 where free, n = 2, α = 1).
pub fn list_models() -> Vec<HeatModel> {
    use KFamily as K;
    use QFamily as Q;
    vec![
        HeatModel::new(K::Arbitrary, Q::Arbitrary),
        HeatModel::new(K::Arbitrary, Q::Zero),
        HeatModel::new(K::Exponential, Q::Zero),
        HeatModel::new(K::Exponential, Q::Constant).delta(1.0),
        HeatModel::new(K::Exponential, Q::ExpSource).alpha(1.0).sign(1.0),
        HeatModel::new(K::Exponential, Q::MixedExpConst).delta(1.0).sign(1.0),
        HeatModel::new(K::Power, Q::Zero).sigma(1.0),
        HeatModel::new(K::Power, Q::LinearSource).sigma(1.0).delta(1.0),
        HeatModel::new(K::Power, Q::PowerSource).sigma(1.0).n(2.0).sign(1.0),
        HeatModel::new(K::Power, Q::MixedPowerLinear)
            .sigma(1.0)
            .delta(1.0)
            .sign(1.0),
        HeatModel::new(K::PowerMinus43, Q::Zero),
        HeatModel::new(K::PowerMinus43, Q::LinearSource).delta(1.0),
        HeatModel::new(K::PowerMinus43, Q::PowerSource).n(2.0).sign(1.0),
        HeatModel::new(K::PowerMinus43, Q::PowerSource)
            .n(-1.0 / 3.0)
            .sign(1.0),
        HeatModel::new(K::PowerMinus43, Q::MixedCritical).delta(1.0).sign(1.0),
        HeatModel::new(K::Linear, Q::ExpSource).sign(1.0),
        HeatModel::new(K::Linear, Q::PowerSource).n(2.0).sign(1.0),
        HeatModel::new(K::Linear, Q::LogSource).delta(1.0),
        HeatModel::new(K::Linear, Q::Zero),
        HeatModel::new(K::Linear, Q::LinearSource).delta(1.0),
        HeatModel::new(K::Linear, Q::Constant).delta(1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_case_has_two_translations() {
        let e = lookup(&HeatModel::new(KFamily::Arbitrary, QFamily::Arbitrary)).unwrap();
        assert_eq!(e.generators.len(), 2);
        assert_eq!(e.mesh_classes, vec![MeshClass::OrthogonalUniform]);
        assert_eq!(e.scheme_ids(), vec![SchemeId::SH11]);
    }

    #[test]
    fn power_source_free_case() {
        let e = lookup(&HeatModel::new(KFamily::Power, QFamily::Zero).sigma(2.0)).unwrap();
        assert_eq!(e.generators.len(), 4);
        assert!(e.mesh_classes.contains(&MeshClass::OrthogonalUniform));
        assert!(e.mesh_classes.contains(&MeshClass::MassCoordinate));
        assert_eq!(
            e.scheme_ids(),
            vec![SchemeId::SH31, SchemeId::SH31A, SchemeId::SH31N]
        );
    }

    #[test]
    fn log_source_case() {
        let e = lookup(&HeatModel::new(KFamily::Linear, QFamily::LogSource).delta(1.0)).unwrap();
        assert_eq!(e.generators.len(), 4);
        assert_eq!(e.mesh_classes, vec![MeshClass::MovingFlatLayers]);
        assert_eq!(e.scheme_ids(), vec![SchemeId::SH53]);
    }

    #[test]
    fn power_family_rejects_its_special_exponent() {
        let r = lookup(&HeatModel::new(KFamily::Power, QFamily::Zero).sigma(-4.0 / 3.0));
        assert!(matches!(r, Err(Error::UnknownCase(_))));
        let r = lookup(&HeatModel::new(KFamily::Power, QFamily::Zero).sigma(0.0));
        assert!(matches!(r, Err(Error::UnknownCase(_))));
    }

    #[test]
    fn unknown_combination_is_rejected() {
        let r = lookup(&HeatModel::new(KFamily::Exponential, QFamily::LogSource).delta(1.0));
        assert!(matches!(r, Err(Error::UnknownCase(_))));
    }

    #[test]
    fn list_is_exhaustive_and_unique() {
        let all = list_models();
        assert_eq!(all.len(), 21);
        // membership: the exponential-source case appears exactly once
        let count = all
            .iter()
            .filter(|m| {
                m.k_family == KFamily::Exponential && m.q_family == QFamily::ExpSource
            })
            .count();
        assert_eq!(count, 1);
        // no two keys equal
        let mut keys: Vec<String> = all.iter().map(|m| m.key()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), all.len());
        // every listed model resolves
        for m in &all {
            lookup(m).unwrap_or_else(|e| panic!("{}: {e}", m.key()));
        }
    }

    #[test]
    fn keys_round_trip() {
        for m in list_models() {
            let key = m.key();
            let back = HeatModel::from_key(&key).unwrap_or_else(|e| panic!("{key}: {e}"));
            assert_eq!(back.k_family, m.k_family, "{key}");
            assert_eq!(back.q_family, m.q_family, "{key}");
            if m.k_family == KFamily::PowerMinus43 && m.q_family == QFamily::PowerSource {
                // the key distinguishes the critical exponent
                assert_eq!(back.n.is_some(), true);
            }
        }
        // sign survives the round trip
        let m = HeatModel::new(KFamily::Linear, QFamily::PowerSource)
            .n(3.0)
            .sign(-1.0);
        let back = HeatModel::from_key(&m.key()).unwrap();
        assert_eq!(back.sign, Some(-1.0));
    }

    #[test]
    fn every_entry_contains_both_translations() {
        for m in list_models() {
            let e = lookup(&m).unwrap();
            assert!(e.generators.len() >= 2, "{}", m.key());
        }
    }
}
