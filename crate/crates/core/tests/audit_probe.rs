//! Quick full-catalog audit smoke: every (scheme, generator) pair of the
//! classification at a reduced trial count, printing any failures.

use heatsym_core::audit::{audit_entry, params_for, DEFAULT_EPS};
use heatsym_core::model::{list_models, lookup};

#[test]
fn catalog_audit_smoke() {
    let mut failures = Vec::new();
    for model in list_models() {
        let entry = lookup(&model).unwrap();
        if entry.schemes.is_empty() {
            continue;
        }
        let params = params_for(model);
        let outcomes = audit_entry(&entry, &params, 8, &DEFAULT_EPS, 42)
            .unwrap_or_else(|e| panic!("{}: {e}", model.key()));
        for o in outcomes {
            if !o.passed() {
                failures.push(format!(
                    "{} / {} vs {}: {:e}",
                    model.key(),
                    o.scheme,
                    o.generator,
                    o.max_defect
                ));
            }
        }
    }
    assert!(failures.is_empty(), "audit failures:\n{}", failures.join("\n"));
}
