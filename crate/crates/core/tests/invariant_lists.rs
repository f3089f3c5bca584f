//! Every printed difference invariant, checked against every generator of
//! its case: the directional derivative along the flow must vanish on
//! arbitrary stencils of the right geometry.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use heatsym_core::invariants::{
    mass_invariant_lists, plane_invariant_lists, random_mass_stencil, random_stencil,
};
use heatsym_core::model::lookup;
use heatsym_core::symmetry::{invariant_directional_defect, mass_directional_defect};

pub const DIRECTIONAL_TOL: f64 = 1e-7;

/// Returns (pairs checked, failures) over the whole plane catalog.
pub fn check_plane_lists(samples: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = 0usize;
    let mut failures = Vec::new();
    for list in plane_invariant_lists() {
        let entry = lookup(&list.case).unwrap_or_else(|e| panic!("{}: {e}", list.case.key()));
        for (label, expr) in &list.exprs {
            for gen in &entry.generators {
                pairs += 1;
                let mut worst = 0.0f64;
                for _ in 0..samples {
                    let s = random_stencil(list.kind, &mut rng);
                    let d = invariant_directional_defect(&**expr, gen, &s)
                        .unwrap_or_else(|e| panic!("{label} vs {}: {e}", gen.label));
                    worst = worst.max(d);
                }
                if worst > DIRECTIONAL_TOL {
                    failures.push(format!(
                        "{} [{}] vs {}: {worst:e}",
                        list.case.key(),
                        label,
                        gen.label
                    ));
                }
            }
        }
    }
    (pairs, failures)
}

pub fn check_mass_lists(samples: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = 0usize;
    let mut failures = Vec::new();
    for list in mass_invariant_lists() {
        let entry = lookup(&list.case).unwrap();
        for (label, expr) in &list.exprs {
            for gen in &entry.mass_generators {
                pairs += 1;
                let mut worst = 0.0f64;
                for _ in 0..samples {
                    let ms = random_mass_stencil(list.needs_rho, &mut rng);
                    let d = mass_directional_defect(&**expr, gen, &ms)
                        .unwrap_or_else(|e| panic!("{label} vs {}: {e}", gen.label()));
                    worst = worst.max(d);
                }
                if worst > DIRECTIONAL_TOL {
                    failures.push(format!(
                        "{} [{}] vs {}: {worst:e}",
                        list.case.key(),
                        label,
                        gen.label()
                    ));
                }
            }
        }
        // the density ratios skip the projective operator
        for (label, expr) in &list.exprs_no_projective {
            for gen in entry
                .mass_generators
                .iter()
                .filter(|g| !g.label().contains("4t²"))
            {
                pairs += 1;
                let mut worst = 0.0f64;
                for _ in 0..samples {
                    let ms = random_mass_stencil(true, &mut rng);
                    let d = mass_directional_defect(&**expr, gen, &ms).unwrap();
                    worst = worst.max(d);
                }
                if worst > DIRECTIONAL_TOL {
                    failures.push(format!(
                        "{} [{}] vs {}: {worst:e}",
                        list.case.key(),
                        label,
                        gen.label()
                    ));
                }
            }
        }
    }
    (pairs, failures)
}

#[test]
fn printed_invariant_lists_pass_every_generator() {
    let (plane_pairs, plane_failures) = check_plane_lists(4, 7);
    let (mass_pairs, mass_failures) = check_mass_lists(4, 11);
    println!("checked {plane_pairs} plane pairs, {mass_pairs} mass pairs");
    let all: Vec<String> = plane_failures.into_iter().chain(mass_failures).collect();
    assert!(all.is_empty(), "directional-defect failures:\n{}", all.join("\n"));
    assert!(plane_pairs + mass_pairs >= 80);
}
