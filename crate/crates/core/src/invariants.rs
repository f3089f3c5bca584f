//! The difference-invariant lists of the classification, transcribed as
//! stencil expressions.
//!
//! Every scheme in this crate is assembled from these invariants; the test
//! suite checks each expression against every generator of its case by
//! measuring the directional derivative along the flow (it must vanish on
//! arbitrary stencils of the right geometry, not only on solutions).
//!
//! Where a list divides by `√(e^{δστ} - 1)` and `δσ < 0` makes the
//! argument negative, the absolute value is used; flows never move `τ`
//! through zero, so the sign is constant along every orbit and invariance
//! is unaffected.

use std::sync::Arc;

use crate::model::{HeatModel, KFamily, QFamily, SQRT3};
use crate::schemes::StencilKind;
use crate::stencil::{MassStencil, Stencil};

pub type PlaneExpr = Arc<dyn Fn(&Stencil) -> f64 + Send + Sync>;
pub type MassExpr = Arc<dyn Fn(&MassStencil) -> f64 + Send + Sync>;

/// One printed invariant list together with the case it belongs to and
/// the stencil geometry it lives on.
pub struct PlaneInvariantList {
    pub case: HeatModel,
    pub kind: StencilKind,
    pub exprs: Vec<(String, PlaneExpr)>,
}

/// Invariant list of a mass-coordinate system.
pub struct MassInvariantList {
    pub case: HeatModel,
    /// Whether the expressions read densities.
    pub needs_rho: bool,
    /// Invariant under the full operator set of the case.
    pub exprs: Vec<(String, MassExpr)>,
    /// The density ratios: invariant under every operator except the
    /// projective one.  Under the projective flow both densities of an
    /// interval pick up the same time-dependent factor as the interval
    /// widths, so only their combinations entering the model (for example
    /// the transport equation `ρ̂ ĥ_x⁺ = ρ h_x⁺`) stay invariant; the
    /// standalone ratios do not.
    pub exprs_no_projective: Vec<(String, MassExpr)>,
}

fn e(label: &str, f: impl Fn(&Stencil) -> f64 + Send + Sync + 'static) -> (String, PlaneExpr) {
    (label.to_string(), Arc::new(f))
}

fn em(label: &str, f: impl Fn(&MassStencil) -> f64 + Send + Sync + 'static) -> (String, MassExpr) {
    (label.to_string(), Arc::new(f))
}

fn shifts() -> Vec<(String, PlaneExpr)> {
    vec![
        e("û-u", |s| s.u_hat - s.u),
        e("u₊-u", |s| s.u_plus - s.u),
        e("u-u₋", |s| s.u - s.u_minus),
        e("û₊-û", |s| s.u_hat_plus - s.u_hat),
        e("û-û₋", |s| s.u_hat - s.u_hat_minus),
    ]
}

fn ratios() -> Vec<(String, PlaneExpr)> {
    vec![
        e("û/u", |s| s.u_hat / s.u),
        e("u₊/u", |s| s.u_plus / s.u),
        e("u₋/u", |s| s.u_minus / s.u),
        e("û₊/û", |s| s.u_hat_plus / s.u_hat),
        e("û₋/û", |s| s.u_hat_minus / s.u_hat),
    ]
}

/// All printed plane-stencil invariant lists, instantiated with the given
/// case parameters where the list depends on them.
pub fn plane_invariant_lists() -> Vec<PlaneInvariantList> {
    use KFamily as K;
    use QFamily as Q;
    let mut out = Vec::new();

    // arbitrary (K, Q): the full coordinate set of the uniform stencil
    let mut exprs = vec![
        e("τ", |s| s.tau),
        e("h", |s| s.h_plus),
        e("u", |s| s.u),
        e("u₊", |s| s.u_plus),
        e("u₋", |s| s.u_minus),
        e("û", |s| s.u_hat),
        e("û₋", |s| s.u_hat_minus),
        e("û₊", |s| s.u_hat_plus),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::Arbitrary, Q::Arbitrary),
        kind: StencilKind::OrthogonalUniform,
        exprs,
    });

    // arbitrary K, no source
    exprs = vec![
        e("h²/τ", |s| s.h_plus * s.h_plus / s.tau),
        e("u", |s| s.u),
        e("u₊", |s| s.u_plus),
        e("u₋", |s| s.u_minus),
        e("û", |s| s.u_hat),
        e("û₋", |s| s.u_hat_minus),
        e("û₊", |s| s.u_hat_plus),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::Arbitrary, Q::Zero),
        kind: StencilKind::OrthogonalUniform,
        exprs,
    });

    // exponential coefficient, no source
    exprs = vec![e("e^u τ/h²", |s| {
        s.u.exp() * s.tau / (s.h_plus * s.h_plus)
    })];
    exprs.extend(shifts());
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::Exponential, Q::Zero),
        kind: StencilKind::OrthogonalUniform,
        exprs,
    });

    // exponential coefficient, constant source
    for delta in [1.0, -1.0] {
        let mut exprs = vec![
            e("e^u(e^{δτ}-1)/h²", move |s| {
                s.u.exp() * ((delta * s.tau).exp() - 1.0) / (s.h_plus * s.h_plus)
            }),
            e("û-u-δτ", move |s| s.u_hat - s.u - delta * s.tau),
        ];
        exprs.extend(shifts().into_iter().skip(1));
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Exponential, Q::Constant).delta(delta),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // exponential coefficient, exponential source (α = 2 keeps the mixed
    // power of the first invariant nontrivial)
    for alpha in [1.0, 2.0] {
        let mut exprs = vec![
            e("τ^{(α-1)/2α}/h", move |s| {
                s.tau.powf((alpha - 1.0) / (2.0 * alpha)) / s.h_plus
            }),
            e("e^{αu}τ", move |s| (alpha * s.u).exp() * s.tau),
        ];
        exprs.extend(shifts());
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Exponential, Q::ExpSource).alpha(alpha).sign(1.0),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // exponential coefficient, mixed source
    for delta in [1.0, -1.0] {
        let mut exprs = vec![
            e("e^u(e^{δτ}-1)", move |s| s.u.exp() * ((delta * s.tau).exp() - 1.0)),
            e("h", |s| s.h_plus),
            e("û-u-δτ", move |s| s.u_hat - s.u - delta * s.tau),
        ];
        exprs.extend(shifts().into_iter().skip(1));
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Exponential, Q::MixedExpConst).delta(delta).sign(1.0),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // power coefficient, no source: orthogonal list and moving list
    for sigma in [1.0, 2.0, -0.5] {
        let mut exprs = vec![e("u^σ τ/h²", move |s| {
            s.u.powf(sigma) * s.tau / (s.h_plus * s.h_plus)
        })];
        exprs.extend(ratios());
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Power, Q::Zero).sigma(sigma),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });

        let mut exprs = vec![e("u^σ τ/h⁺²", move |s| {
            s.u.powf(sigma) * s.tau / (s.h_plus * s.h_plus)
        })];
        exprs.extend(ratios());
        exprs.push(e("h⁻/h⁺", |s| s.h_minus / s.h_plus));
        exprs.push(e("ĥ⁻/h⁺", |s| s.h_minus_hat / s.h_plus));
        exprs.push(e("ĥ⁺/h⁺", |s| s.h_plus_hat / s.h_plus));
        exprs.push(e("Δx/h⁺", |s| s.dx / s.h_plus));
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Power, Q::Zero).sigma(sigma),
            kind: StencilKind::Moving,
            exprs,
        });
    }

    // power coefficient, linear source
    for (sigma, delta) in [(1.0, 1.0), (2.0, -1.0)] {
        let mut exprs = vec![
            e("u^σ(e^{δστ}-1)/h²", move |s| {
                s.u.powf(sigma) * ((delta * sigma * s.tau).exp() - 1.0) / (s.h_plus * s.h_plus)
            }),
            e("δln(û/u)-τ", move |s| delta * (s.u_hat / s.u).ln() - s.tau),
        ];
        exprs.extend(ratios().into_iter().skip(1));
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Power, Q::LinearSource).sigma(sigma).delta(delta),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // power coefficient, power source (n = 3 keeps the τ-exponent
    // nontrivial)
    for (sigma, n) in [(1.0, 3.0), (2.0, 2.0)] {
        let mut exprs = vec![
            e("τ^{(n-σ-1)/2(n-1)}/h", move |s| {
                s.tau.powf((n - sigma - 1.0) / (2.0 * (n - 1.0))) / s.h_plus
            }),
            e("τu^{n-1}", move |s| s.tau * s.u.powf(n - 1.0)),
        ];
        exprs.extend(ratios());
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Power, Q::PowerSource).sigma(sigma).n(n).sign(1.0),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // power coefficient, mixed source
    for (sigma, delta) in [(1.0, 1.0), (2.0, -1.0)] {
        let mut exprs = vec![
            e("u^σ(e^{δστ}-1)", move |s| {
                s.u.powf(sigma) * ((delta * sigma * s.tau).exp() - 1.0)
            }),
            e("h", |s| s.h_plus),
            e("δln(û/u)-τ", move |s| delta * (s.u_hat / s.u).ln() - s.tau),
        ];
        exprs.extend(ratios().into_iter().skip(1));
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Power, Q::MixedPowerLinear)
                .sigma(sigma)
                .delta(delta)
                .sign(1.0),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // -4/3 power, no source
    let third = 1.0 / 3.0;
    exprs = vec![
        e("û/u", |s| s.u_hat / s.u),
        e("û₊/u₊", |s| s.u_hat_plus / s.u_plus),
        e("û₋/u₋", |s| s.u_hat_minus / s.u_minus),
        e("u₊^⅓u^⅓h⁺/√τ", move |s| {
            s.u_plus.powf(third) * s.u.powf(third) * s.h_plus / s.tau.sqrt()
        }),
        e("u₋^⅓u^⅓h⁻/√τ", move |s| {
            s.u_minus.powf(third) * s.u.powf(third) * s.h_minus / s.tau.sqrt()
        }),
        e("u^⅔(h⁺h⁻/(h⁺+h⁻))/√τ", move |s| {
            s.u.powf(2.0 * third) / s.tau.sqrt() * (s.h_plus * s.h_minus / (s.h_plus + s.h_minus))
        }),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::PowerMinus43, Q::Zero),
        kind: StencilKind::OrthogonalNonuniform,
        exprs,
    });

    // -4/3 power, linear source
    for delta in [1.0, -1.0] {
        let g = move |tau: f64| ((delta * (-4.0 / 3.0) * tau).exp() - 1.0).abs();
        let mut exprs = vec![
            e("δln(û/u)-τ", move |s| delta * (s.u_hat / s.u).ln() - s.tau),
            e("u^⅔(h⁺h⁻/(h⁺+h⁻))/√|e^{δστ}-1|", move |s| {
                s.u.powf(2.0 * third) * (s.h_plus * s.h_minus / (s.h_plus + s.h_minus))
                    / g(s.tau).sqrt()
            }),
            e("u₊^⅓u^⅓h⁺/√|e^{δστ}-1|", move |s| {
                s.u_plus.powf(third) * s.u.powf(third) * s.h_plus / g(s.tau).sqrt()
            }),
            e("u₋^⅓u^⅓h⁻/√|e^{δστ}-1|", move |s| {
                s.u_minus.powf(third) * s.u.powf(third) * s.h_minus / g(s.tau).sqrt()
            }),
            e("û₊^⅓û^⅓h⁺/√|e^{δστ}-1|", move |s| {
                s.u_hat_plus.powf(third) * s.u_hat.powf(third) * s.h_plus / g(s.tau).sqrt()
            }),
            e("û₋^⅓û^⅓h⁻/√|e^{δστ}-1|", move |s| {
                s.u_hat_minus.powf(third) * s.u_hat.powf(third) * s.h_minus / g(s.tau).sqrt()
            }),
        ];
        exprs.shrink_to_fit();
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::PowerMinus43, Q::LinearSource).delta(delta),
            kind: StencilKind::OrthogonalNonuniform,
            exprs,
        });
    }

    // -4/3 power, critical source, hyperbolic branch
    exprs = vec![
        e("û/u", |s| s.u_hat / s.u),
        e("û₊/u₊", |s| s.u_hat_plus / s.u_plus),
        e("û₋/u₋", |s| s.u_hat_minus / s.u_minus),
        e("√τ u^{-⅔}(coth⁺+coth⁻)", move |s| {
            s.tau.sqrt()
                * s.u.powf(-2.0 * third)
                * (1.0 / (s.h_plus / SQRT3).tanh() + 1.0 / (s.h_minus / SQRT3).tanh())
        }),
        e("u^⅓u₊^⅓sinh⁺/√τ", move |s| {
            s.u.powf(third) * s.u_plus.powf(third) * (s.h_plus / SQRT3).sinh() / s.tau.sqrt()
        }),
        e("u^⅓u₋^⅓sinh⁻/√τ", move |s| {
            s.u.powf(third) * s.u_minus.powf(third) * (s.h_minus / SQRT3).sinh() / s.tau.sqrt()
        }),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::PowerMinus43, Q::PowerSource).n(-third).sign(1.0),
        kind: StencilKind::OrthogonalNonuniform,
        exprs,
    });

    // -4/3 power, critical source, trigonometric branch
    exprs = vec![
        e("û/u", |s| s.u_hat / s.u),
        e("û₊/u₊", |s| s.u_hat_plus / s.u_plus),
        e("û₋/u₋", |s| s.u_hat_minus / s.u_minus),
        e("√τ u^{-⅔}(cot⁺+cot⁻)", move |s| {
            s.tau.sqrt()
                * s.u.powf(-2.0 * third)
                * (1.0 / (s.h_plus / SQRT3).tan() + 1.0 / (s.h_minus / SQRT3).tan())
        }),
        e("u^⅓u₊^⅓sin⁺/√τ", move |s| {
            s.u.powf(third) * s.u_plus.powf(third) * (s.h_plus / SQRT3).sin() / s.tau.sqrt()
        }),
        e("u^⅓u₋^⅓sin⁻/√τ", move |s| {
            s.u.powf(third) * s.u_minus.powf(third) * (s.h_minus / SQRT3).sin() / s.tau.sqrt()
        }),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::PowerMinus43, Q::PowerSource).n(-third).sign(-1.0),
        kind: StencilKind::OrthogonalNonuniform,
        exprs,
    });

    // -4/3 power, critical + linear source, both branches
    for sign in [1.0, -1.0] {
        let delta = 1.0;
        let g = move |tau: f64| ((delta * (-4.0 / 3.0) * tau).exp() - 1.0).abs();
        let hyp = sign > 0.0;
        let sh = move |a: f64| if hyp { a.sinh() } else { a.sin() };
        let ch = move |a: f64| if hyp { 1.0 / a.tanh() } else { 1.0 / a.tan() };
        let exprs = vec![
            e("δln(û/u)-τ", move |s| delta * (s.u_hat / s.u).ln() - s.tau),
            e("√|e^{δστ}-1| u^{-⅔}(coth⁺+coth⁻)", move |s| {
                g(s.tau).sqrt()
                    * s.u.powf(-2.0 * third)
                    * (ch(s.h_plus / SQRT3) + ch(s.h_minus / SQRT3))
            }),
            e("u^⅓u₊^⅓sinh⁺/√|e^{δστ}-1|", move |s| {
                s.u.powf(third) * s.u_plus.powf(third) * sh(s.h_plus / SQRT3) / g(s.tau).sqrt()
            }),
            e("u^⅓u₋^⅓sinh⁻/√|e^{δστ}-1|", move |s| {
                s.u.powf(third) * s.u_minus.powf(third) * sh(s.h_minus / SQRT3) / g(s.tau).sqrt()
            }),
            e("û^⅓û₊^⅓sinh⁺/√|e^{δστ}-1|", move |s| {
                s.u_hat.powf(third) * s.u_hat_plus.powf(third) * sh(s.h_plus / SQRT3)
                    / g(s.tau).sqrt()
            }),
            e("û^⅓û₋^⅓sinh⁻/√|e^{δστ}-1|", move |s| {
                s.u_hat.powf(third) * s.u_hat_minus.powf(third) * sh(s.h_minus / SQRT3)
                    / g(s.tau).sqrt()
            }),
        ];
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::PowerMinus43, Q::MixedCritical)
                .delta(delta)
                .sign(sign),
            kind: StencilKind::OrthogonalNonuniform,
            exprs,
        });
    }

    // linear coefficient, exponential source
    exprs = vec![
        e("h²/τ", |s| s.h_plus * s.h_plus / s.tau),
        e("τe^u", |s| s.tau * s.u.exp()),
    ];
    exprs.extend(shifts());
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::Linear, Q::ExpSource).sign(1.0),
        kind: StencilKind::OrthogonalUniform,
        exprs,
    });

    // linear coefficient, power source
    for n in [2.0, 3.0] {
        let mut exprs = vec![
            e("h²/τ", |s| s.h_plus * s.h_plus / s.tau),
            e("τu^{n-1}", move |s| s.tau * s.u.powf(n - 1.0)),
        ];
        exprs.extend(ratios());
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Linear, Q::PowerSource).n(n).sign(1.0),
            kind: StencilKind::OrthogonalUniform,
            exprs,
        });
    }

    // linear coefficient, logarithmic source: the moving-stencil list
    for delta in [1.0, -1.0] {
        let lx = |s: &Stencil| (s.u_plus.ln() - s.u.ln()) / s.h_plus;
        let lxb = |s: &Stencil| (s.u.ln() - s.u_minus.ln()) / s.h_minus;
        let lx_hat = |s: &Stencil| (s.u_hat_plus.ln() - s.u_hat.ln()) / s.h_plus_hat;
        let lxb_hat = |s: &Stencil| (s.u_hat.ln() - s.u_hat_minus.ln()) / s.h_minus_hat;
        let exprs = vec![
            e("τ", |s| s.tau),
            e("h⁺", |s| s.h_plus),
            e("h⁻", |s| s.h_minus),
            e("ĥ⁺", |s| s.h_plus_hat),
            e("ĥ⁻", |s| s.h_minus_hat),
            e("(lnu)_x-(lnu)_x̄", move |s| lx(s) - lxb(s)),
            e("(lnû)_x-(lnû)_x̄", move |s| lx_hat(s) - lxb_hat(s)),
            e("I₈", move |s| {
                let hsum = s.h_plus + s.h_minus;
                delta * s.dx
                    + 2.0 * ((delta * s.tau).exp() - 1.0)
                        * (s.h_minus / hsum * lx(s) + s.h_plus / hsum * lxb(s))
            }),
            e("I₉", move |s| {
                let hsum = s.h_plus_hat + s.h_minus_hat;
                delta * s.dx
                    + 2.0 * (1.0 - (-delta * s.tau).exp())
                        * (s.h_minus_hat / hsum * lx_hat(s) + s.h_plus_hat / hsum * lxb_hat(s))
            }),
            e("I₁₀", move |s| {
                delta * s.dx * s.dx
                    + 4.0 * (1.0 - (-delta * s.tau).exp())
                        * (s.u_hat.ln() - (delta * s.tau).exp() * s.u.ln())
            }),
        ];
        out.push(PlaneInvariantList {
            case: HeatModel::new(K::Linear, Q::LogSource).delta(delta),
            kind: StencilKind::Moving,
            exprs,
        });
    }

    // linear coefficient, no source: the moving-stencil list
    exprs = vec![
        e("h⁺/h⁻", |s| s.h_plus / s.h_minus),
        e("ĥ⁺/ĥ⁻", |s| s.h_plus_hat / s.h_minus_hat),
        e("ĥ⁺h⁺/τ", |s| s.h_plus_hat * s.h_plus / s.tau),
        e("I₄", |s| {
            s.tau.sqrt() / s.h_plus * (s.u_hat / s.u) * (0.25 * s.dx * s.dx / s.tau).exp()
        }),
        e("I₅", |s| {
            0.25 * s.h_plus * s.h_plus / s.tau
                - s.h_plus * s.h_plus / (s.h_plus + s.h_minus)
                    * ((s.u_plus / s.u).ln() / s.h_plus + (s.u_minus / s.u).ln() / s.h_minus)
        }),
        e("I₆", |s| {
            0.25 * s.h_plus_hat * s.h_plus_hat / s.tau
                + s.h_plus_hat * s.h_plus_hat / (s.h_plus_hat + s.h_minus_hat)
                    * ((s.u_hat_plus / s.u_hat).ln() / s.h_plus_hat
                        + (s.u_hat_minus / s.u_hat).ln() / s.h_minus_hat)
        }),
        e("I₇", |s| {
            s.dx * s.h_plus / s.tau
                + 2.0 * s.h_plus / (s.h_plus + s.h_minus)
                    * ((s.h_minus / s.h_plus) * (s.u_plus / s.u).ln()
                        - (s.h_plus / s.h_minus) * (s.u_minus / s.u).ln())
        }),
        e("I₈", |s| {
            s.dx * s.h_plus_hat / s.tau
                + 2.0 * s.h_plus_hat / (s.h_plus_hat + s.h_minus_hat)
                    * ((s.h_minus_hat / s.h_plus_hat) * (s.u_hat_plus / s.u_hat).ln()
                        - (s.h_plus_hat / s.h_minus_hat) * (s.u_hat_minus / s.u_hat).ln())
        }),
    ];
    out.push(PlaneInvariantList {
        case: HeatModel::new(K::Linear, Q::Zero),
        kind: StencilKind::Moving,
        exprs,
    });

    out
}

/// Invariant lists of the two mass-coordinate systems: the power-law
/// potential form and the stopped linear model.
pub fn mass_invariant_lists() -> Vec<MassInvariantList> {
    use KFamily as K;
    use QFamily as Q;
    let mut out = Vec::new();

    for sigma in [1.0, 2.0] {
        let exprs = vec![
            em("u^σ τ/h_x⁺²", move |m| {
                let (_, hxp) = m.hx();
                m.u[1].powf(sigma) * m.tau / (hxp * hxp)
            }),
            em("û/u", |m| m.u[4] / m.u[1]),
            em("u₊/u", |m| m.u[2] / m.u[1]),
            em("u₋/u", |m| m.u[0] / m.u[1]),
            em("û₊/û", |m| m.u[5] / m.u[4]),
            em("û₋/û", |m| m.u[3] / m.u[4]),
            em("h_x⁻/h_x⁺", |m| {
                let (hxm, hxp) = m.hx();
                hxm / hxp
            }),
            em("ĥ_x⁻/h_x⁺", |m| {
                let (hxm_hat, _) = m.hx_hat();
                let (_, hxp) = m.hx();
                hxm_hat / hxp
            }),
            em("ĥ_x⁺/h_x⁺", |m| {
                let (_, hxp_hat) = m.hx_hat();
                let (_, hxp) = m.hx();
                hxp_hat / hxp
            }),
            em("Δx/h_x⁺", |m| {
                let (_, hxp) = m.hx();
                m.dx_phys() / hxp
            }),
            em("h_s/h_x⁺", |m| {
                let (_, hxp) = m.hx();
                m.hs_plus / hxp
            }),
        ];
        out.push(MassInvariantList {
            case: HeatModel::new(K::Power, Q::Zero).sigma(sigma),
            needs_rho: false,
            exprs,
            exprs_no_projective: vec![],
        });
    }

    // stopped linear model: thirteen invariants with densities
    let lnr = |a: f64, b: f64| (a / b).ln();
    let exprs = vec![
        em("h_x⁺/h_x⁻", |m| {
            let (hxm, hxp) = m.hx();
            hxp / hxm
        }),
        em("ĥ_x⁺/ĥ_x⁻", |m| {
            let (hxm, hxp) = m.hx_hat();
            hxp / hxm
        }),
        em("h_x⁺ĥ_x⁺/τ", |m| {
            let (_, hxp) = m.hx();
            let (_, hxp_hat) = m.hx_hat();
            hxp * hxp_hat / m.tau
        }),
        em("I₄", |m| {
            let (_, hxp) = m.hx();
            let dx = m.dx_phys();
            m.tau.sqrt() / hxp * (m.u[4] / m.u[1]) * (0.25 * dx * dx / m.tau).exp()
        }),
        em("I₅", move |m| {
            let (hxm, hxp) = m.hx();
            0.25 * hxp * hxp / m.tau
                - hxp * hxp / (hxp + hxm)
                    * (lnr(m.u[2], m.u[1]) / hxp + lnr(m.u[0], m.u[1]) / hxm)
        }),
        em("I₆", move |m| {
            let (hxm, hxp) = m.hx_hat();
            0.25 * hxp * hxp / m.tau
                + hxp * hxp / (hxp + hxm)
                    * (lnr(m.u[5], m.u[4]) / hxp + lnr(m.u[3], m.u[4]) / hxm)
        }),
        em("I₇", move |m| {
            let (hxm, hxp) = m.hx();
            let dx = m.dx_phys();
            dx * hxp / m.tau
                + 2.0 * hxp / (hxp + hxm)
                    * ((hxm / hxp) * lnr(m.u[2], m.u[1]) - (hxp / hxm) * lnr(m.u[0], m.u[1]))
        }),
        em("I₈", move |m| {
            let (hxm, hxp) = m.hx_hat();
            let dx = m.dx_phys();
            dx * hxp / m.tau
                + 2.0 * hxp / (hxp + hxm)
                    * ((hxm / hxp) * lnr(m.u[5], m.u[4]) - (hxp / hxm) * lnr(m.u[3], m.u[4]))
        }),
        em("h_s⁺/(ρh_x⁺)", |m| {
            let r = m.rho.unwrap();
            let (_, hxp) = m.hx();
            m.hs_plus / (r[1] * hxp)
        }),
        em("h_s⁻/(ρ₋h_x⁻)", |m| {
            let r = m.rho.unwrap();
            let (hxm, _) = m.hx();
            m.hs_minus / (r[0] * hxm)
        }),
    ];
    let exprs_no_projective = vec![
        em("ρ̂₋/ρ₋", |m| {
            let r = m.rho.unwrap();
            r[3] / r[0]
        }),
        em("ρ̂/ρ", |m| {
            let r = m.rho.unwrap();
            r[4] / r[1]
        }),
        em("ρ̂₊/ρ₊", |m| {
            let r = m.rho.unwrap();
            r[5] / r[2]
        }),
    ];
    out.push(MassInvariantList {
        case: HeatModel::new(K::Linear, Q::Zero),
        needs_rho: true,
        exprs,
        exprs_no_projective,
    });

    out
}

// ---------------------------------------------------------------------------
// Generic random stencils for directional-defect checks (invariance of an
// expression must hold everywhere, not only on solutions)
// ---------------------------------------------------------------------------

use rand::Rng;

pub fn random_stencil(kind: StencilKind, rng: &mut impl Rng) -> Stencil {
    let t = rng.gen_range(0.3..1.2);
    let x = rng.gen_range(-0.8..0.8);
    let tau = rng.gen_range(0.05..0.25);
    let hp = rng.gen_range(0.25..0.5);
    let u: Vec<f64> = (0..6).map(|_| rng.gen_range(0.6..1.8)).collect();
    let (hm, hp_hat, hm_hat, dx) = match kind {
        StencilKind::OrthogonalUniform => (hp, hp, hp, 0.0),
        StencilKind::OrthogonalNonuniform => {
            let hm = rng.gen_range(0.25..0.5);
            (hm, hp, hm, 0.0)
        }
        _ => (
            rng.gen_range(0.25..0.5),
            hp * rng.gen_range(0.85..1.15),
            rng.gen_range(0.25..0.5),
            rng.gen_range(-0.1..0.1),
        ),
    };
    Stencil {
        t,
        tau,
        x,
        h_plus: hp,
        h_minus: hm,
        h_plus_hat: hp_hat,
        h_minus_hat: hm_hat,
        dx,
        u_minus: u[0],
        u: u[1],
        u_plus: u[2],
        u_hat_minus: u[3],
        u_hat: u[4],
        u_hat_plus: u[5],
    }
}

pub fn random_mass_stencil(needs_rho: bool, rng: &mut impl Rng) -> MassStencil {
    let t = rng.gen_range(0.3..1.2);
    let s0 = rng.gen_range(-0.5..0.5);
    let tau = rng.gen_range(0.05..0.25);
    let hs_plus = rng.gen_range(0.25..0.45);
    let hs_minus = rng.gen_range(0.25..0.45);
    let u: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.6..1.8));
    let x_c = rng.gen_range(-0.5..0.5);
    let hxm = rng.gen_range(0.25..0.5);
    let hxp = rng.gen_range(0.25..0.5);
    let hxm_hat = rng.gen_range(0.25..0.5);
    let hxp_hat = rng.gen_range(0.25..0.5);
    let dx = rng.gen_range(-0.1..0.1);
    let rho = if needs_rho {
        // densities compatible with x_s = 1/ρ on their intervals, with the
        // upper layer linked through the transport relation
        let rm = hs_minus / hxm;
        let r = hs_plus / hxp;
        let rp = r * rng.gen_range(0.8..1.2);
        let rm_hat = rm * hxm / hxm_hat;
        let r_hat = r * hxp / hxp_hat;
        let rp_hat = rp * rng.gen_range(0.8..1.2);
        Some([rm, r, rp, rm_hat, r_hat, rp_hat])
    } else {
        None
    };
    MassStencil {
        t,
        tau,
        s: s0,
        hs_plus,
        hs_minus,
        x: [
            x_c - hxm,
            x_c,
            x_c + hxp,
            x_c + dx - hxm_hat,
            x_c + dx,
            x_c + dx + hxp_hat,
        ],
        u,
        rho,
    }
}
