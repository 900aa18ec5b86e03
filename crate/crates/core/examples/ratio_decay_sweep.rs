// The isoperimetric ratio along balls moving away from the origin, with a
// log-log fit of the tail against the predicted exponent.

use wisolab::params::WeightParams;
use wisolab::sweeps::{log_spaced, run_sweep, Family, DEFAULT_TAIL_FRACTION};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let grid = log_spaced(10.0, 1e3, 12);
    for (p, family) in [
        (WeightParams::new(2, 0.0, 0.0, -0.5), Family::UpAxis),
        (WeightParams::new(2, 0.0, 1.0, -0.5), Family::OnWall),
    ] {
        let res = run_sweep(&p, family, &grid, DEFAULT_TAIL_FRACTION)?;
        println!("{family} {p:?}");
        for r in &res.rows {
            println!("  t {:>10.4} ratio {:.10}", r.t, r.ratio);
        }
        println!(
            "  fitted slope {:.6} +- {:.1e}, predicted {:.6}",
            res.fitted_slope, res.slope_stderr, res.predicted_slope
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
