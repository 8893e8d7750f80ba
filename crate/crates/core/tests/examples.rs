//! Every example runs to completion.

#[path = "../examples/bond_clusters.rs"]
mod bond_clusters;

#[path = "../examples/command_line.rs"]
mod command_line;

#[path = "../examples/correlation_bound.rs"]
mod correlation_bound;

#[path = "../examples/decomposition.rs"]
mod decomposition;

#[path = "../examples/density_identity.rs"]
mod density_identity;

#[path = "../examples/good_configuration.rs"]
mod good_configuration;

#[path = "../examples/sample_widom_rowlinson.rs"]
mod sample_widom_rowlinson;

#[path = "../examples/symmetry_criterion.rs"]
mod symmetry_criterion;

#[path = "../examples/taper_profile.rs"]
mod taper_profile;

#[path = "../examples/transform_round_trip.rs"]
mod transform_round_trip;

#[path = "../examples/translation_invariance.rs"]
mod translation_invariance;

#[test]
fn bond_clusters_runs() {
    bond_clusters::run().unwrap();
}

#[test]
fn command_line_runs() {
    command_line::run().unwrap();
}

#[test]
fn correlation_bound_runs() {
    correlation_bound::run().unwrap();
}

#[test]
fn decomposition_runs() {
    decomposition::run().unwrap();
}

#[test]
fn density_identity_runs() {
    density_identity::run().unwrap();
}

#[test]
fn good_configuration_runs() {
    good_configuration::run().unwrap();
}

#[test]
fn sample_widom_rowlinson_runs() {
    sample_widom_rowlinson::run().unwrap();
}

#[test]
fn symmetry_criterion_runs() {
    symmetry_criterion::run().unwrap();
}

#[test]
fn taper_profile_runs() {
    taper_profile::run().unwrap();
}

#[test]
fn transform_round_trip_runs() {
    transform_round_trip::run().unwrap();
}

#[test]
fn translation_invariance_runs() {
    translation_invariance::run().unwrap();
}
