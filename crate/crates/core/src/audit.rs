//! Batch symmetry audit: for every (scheme, generator) pair of a catalog
//! entry, flow randomized exactly-solving stencils and record the worst
//! normalized residual defect.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Admitted, ModelEntry};
use crate::schemes::{self, SchemeId, SchemeParams};
use crate::symmetry::{self, MassGenerator, SymmetryGenerator};

/// Audit threshold: a pair passes when its worst defect stays below this.
pub const AUDIT_TOL: f64 = 1e-8;

/// Scheme parameters with stock coefficient functions attached for the
/// arbitrary-(K, Q) cases: `K(u) = 1 + u²`, `Q(u) = u/(1 + u²)` — smooth
/// and total on (0, ∞).
pub fn params_for(model: crate::model::HeatModel) -> SchemeParams {
    use crate::model::{KFamily, QFamily};
    let mut params = SchemeParams::new(model);
    if model.k_family == KFamily::Arbitrary {
        params = params.k_fn(|u| 1.0 + u * u);
        if model.q_family == QFamily::Arbitrary {
            params = params.q_fn(|u| u / (1.0 + u * u));
        }
    }
    params
}

/// Group parameters the audit flows through by default.
pub const DEFAULT_EPS: [f64; 4] = [0.05, -0.05, 0.2, -0.2];

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub scheme: SchemeId,
    pub generator: String,
    pub trials: usize,
    pub max_defect: f64,
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        self.max_defect < AUDIT_TOL
    }
}

/// Worst defect of one plane (scheme, generator) pair over `trials`
/// random stencils and all `eps` values; both the scheme residual and,
/// where one exists, the mesh residual are measured.
///
/// Exponential-in-time flows can escape to infinity at finite group
/// parameter from some stencils; a (stencil, ε) sample whose group element
/// does not exist is skipped, and the audit demands that at least half of
/// all samples evaluate.
pub fn audit_pair(
    id: SchemeId,
    params: &SchemeParams,
    gen: &SymmetryGenerator,
    trials: usize,
    eps: &[f64],
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0usize;
    let mut attempts = 0usize;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > trials * 20 {
            return Err(crate::error::Error::StabilityBreach(format!(
                "{id}: could not draw {trials} admissible audit stencils"
            )));
        }
        let s = match schemes::sample_admissible_stencil(id, params, &mut rng) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for &e in eps {
            match symmetry::invariance_defect(id, params, gen, &s, e) {
                Ok(d) => {
                    worst = worst.max(d);
                    evaluated += 1;
                }
                Err(Error::FlowBlowup { .. }) | Err(Error::InadmissibleImage { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
            if id.has_mesh_equation() {
                worst = worst.max(symmetry::mesh_invariance_defect(id, params, gen, &s, e)?);
            }
        }
        done += 1;
    }
    if evaluated < skipped {
        return Err(crate::error::Error::StabilityBreach(format!(
            "{id} vs {}: too few evaluable flow samples ({evaluated} of {})",
            gen.label,
            evaluated + skipped
        )));
    }
    Ok(worst)
}

/// Worst defect of one mass-coordinate (scheme, generator) pair.
pub fn audit_mass_pair(
    id: SchemeId,
    params: &SchemeParams,
    gen: &MassGenerator,
    trials: usize,
    eps: &[f64],
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0usize;
    let mut attempts = 0usize;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > trials * 20 {
            return Err(crate::error::Error::StabilityBreach(format!(
                "{id}: could not draw {trials} admissible audit stencils"
            )));
        }
        let ms = match schemes::sample_admissible_mass_stencil(id, params, &mut rng) {
            Ok(ms) => ms,
            Err(_) => continue,
        };
        for &e in eps {
            match symmetry::mass_invariance_defect(id, params, gen, &ms, e) {
                Ok(d) => {
                    worst = worst.max(d);
                    evaluated += 1;
                }
                Err(Error::FlowBlowup { .. }) | Err(Error::InadmissibleImage { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
            worst = worst.max(symmetry::mass_mesh_invariance_defect(id, params, gen, &ms, e)?);
            if matches!(id, SchemeId::TS5G | SchemeId::TS5U) {
                // density-transport equation ρ̂ ĥ_x⁺ = ρ h_x⁺
                let moved = symmetry::flow_mass_stencil(gen, e, &ms)?;
                let d = schemes::ts5_density_residual(&moved)?;
                let rho = moved.rho_or_err()?;
                let scale = (rho[4] * moved.hx_hat().1)
                    .abs()
                    .max((rho[1] * moved.hx().1).abs());
                worst = worst.max(d.abs() / scale.max(f64::MIN_POSITIVE));
            }
        }
        done += 1;
    }
    if evaluated < skipped {
        return Err(crate::error::Error::StabilityBreach(format!(
            "{id} vs {}: too few evaluable flow samples ({evaluated} of {})",
            gen.label(),
            evaluated + skipped
        )));
    }
    Ok(worst)
}

/// Audit every scheme of an entry against its admitted generators.
pub fn audit_entry(
    entry: &ModelEntry,
    params: &SchemeParams,
    trials: usize,
    eps: &[f64],
    seed: u64,
) -> Result<Vec<AuditOutcome>> {
    let mut out = Vec::new();
    for binding in &entry.schemes {
        match &binding.admitted {
            Admitted::MassOps | Admitted::MassSubset(_) => {
                let picked: Vec<&MassGenerator> = match &binding.admitted {
                    Admitted::MassSubset(ix) => {
                        ix.iter().map(|&i| &entry.mass_generators[i]).collect()
                    }
                    _ => entry.mass_generators.iter().collect(),
                };
                for (k, gen) in picked.into_iter().enumerate() {
                    let d = audit_mass_pair(
                        binding.id,
                        params,
                        gen,
                        trials,
                        eps,
                        seed ^ (k as u64) << 8,
                    )?;
                    out.push(AuditOutcome {
                        scheme: binding.id,
                        generator: gen.label().to_string(),
                        trials,
                        max_defect: d,
                    });
                }
            }
            _ => {
                for (k, gen) in entry.admitted_generators(binding.id).iter().enumerate() {
                    let d =
                        audit_pair(binding.id, params, gen, trials, eps, seed ^ (k as u64) << 8)?;
                    out.push(AuditOutcome {
                        scheme: binding.id,
                        generator: gen.label.clone(),
                        trials,
                        max_defect: d,
                    });
                }
            }
        }
    }
    Ok(out)
}
