//! Every cargo example runs to completion.

mod classify_region {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/classify_region.rs"
    ));
}

#[test]
fn classify_region_runs() {
    classify_region::run().expect("classify_region example runs");
}

mod quadrature_oracles {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/quadrature_oracles.rs"
    ));
}

#[test]
fn quadrature_oracles_runs() {
    quadrature_oracles::run().expect("quadrature_oracles example runs");
}

mod trial_domains {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/trial_domains.rs"
    ));
}

#[test]
fn trial_domains_runs() {
    trial_domains::run().expect("trial_domains example runs");
}

mod half_sphere_spectrum {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/half_sphere_spectrum.rs"
    ));
}

#[test]
fn half_sphere_spectrum_runs() {
    half_sphere_spectrum::run().expect("half_sphere_spectrum example runs");
}

mod stereographic_density {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/stereographic_density.rs"
    ));
}

#[test]
fn stereographic_density_runs() {
    stereographic_density::run().expect("stereographic_density example runs");
}

mod ratio_decay_sweep {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/ratio_decay_sweep.rs"
    ));
}

#[test]
fn ratio_decay_sweep_runs() {
    ratio_decay_sweep::run().expect("ratio_decay_sweep example runs");
}

mod radial_counterexample {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/radial_counterexample.rs"
    ));
}

#[test]
fn radial_counterexample_runs() {
    radial_counterexample::run().expect("radial_counterexample example runs");
}

mod vanishing_perimeter {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/vanishing_perimeter.rs"
    ));
}

#[test]
fn vanishing_perimeter_runs() {
    vanishing_perimeter::run().expect("vanishing_perimeter example runs");
}

mod acceptance_report {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/acceptance_report.rs"
    ));
}

#[test]
fn acceptance_report_runs() {
    acceptance_report::run().expect("acceptance_report example runs");
}

mod run_config {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/run_config.rs"
    ));
}

#[test]
fn run_config_runs() {
    run_config::run().expect("run_config example runs");
}
