// Power-law densities on R^N: balls of fixed measure sent to infinity have
// perimeter tending to zero.

use wisolab::sweeps::{log_spaced, vanishing_family, PowerLawPair};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let w = PowerLawPair {
        f_exp: 1.0,
        beta: 1.0,
        c1: 1.0,
        c2: 1.0,
        dim: 2,
    };
    let table = vanishing_family(&w, 1.0, &log_spaced(1e2, 1e4, 12))?;
    for r in &table.rows {
        println!(
            "t {:>10.3} R_t {:>10.5} P_f {:.10} t-R_t {:.4}",
            r.t,
            r.r_t,
            r.p_f,
            r.t - r.r_t
        );
    }
    println!(
        "tail slope {:.6}, decay factor {:.6}, t - R_t increasing {}",
        table.tail_slope,
        table.decay_factor(),
        table.gap_increasing
    );

    // the boundary case beta = N
    let edge = PowerLawPair {
        f_exp: 1.5,
        beta: 2.0,
        c1: 1.0,
        c2: 1.0,
        dim: 2,
    };
    let t = vanishing_family(&edge, 1.0, &log_spaced(10.0, 1e3, 8))?;
    println!(
        "beta = N: observed delta {:.6}, tail slope {:.6}",
        t.delta_observed, t.tail_slope
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
