// Run a subset of the acceptance battery and print the report.
//
// `cargo run --release --example acceptance_report -- eigen stereo`

use wisolab::verify::{run as run_battery, Selector, VerifyOptions};

pub fn run_with(selectors: &[String]) -> Result<bool, Box<dyn std::error::Error>> {
    let only = selectors
        .iter()
        .map(|s| s.parse::<Selector>())
        .collect::<Result<Vec<_>, _>>()?;
    let report = run_battery(&VerifyOptions {
        only,
        mc_samples: 1_000_000,
        ..Default::default()
    });
    for c in &report.criteria {
        println!("{c}");
    }
    Ok(report.all_passed())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(&["classify".into(), "stereo".into()])?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return run();
    }
    run_with(&args)?;
    Ok(())
}
