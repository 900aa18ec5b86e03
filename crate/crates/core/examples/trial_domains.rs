// Weighted measure, perimeter and ratio of the trial domains, and the
// divergence identity when k = l + 1.

use wisolab::geometry::{c_rad, divergence_check, evaluate, mc_measure, TrialDomain};
use wisolab::params::WeightParams;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let p = WeightParams::new(3, 0.0, 0.0, -0.5);
    println!("C_rad = {:.12}", c_rad(&p)?);
    for d in [
        TrialDomain::HalfBall { radius: 2.0 },
        TrialDomain::up_axis(5.0),
        TrialDomain::on_wall(5.0),
    ] {
        let r = evaluate(&p, &d)?;
        println!(
            "{d:?}: measure {:.10} perimeter {:.10} ratio {:.10}",
            r.measure.value, r.perimeter.value, r.ratio
        );
    }

    let d = TrialDomain::OnWallBall {
        t: 1.5,
        radius: 1.0,
    };
    let q = evaluate(&p, &d)?.measure.value;
    let mc = mc_measure(&p, &d, 2_000_000, 7)?;
    println!(
        "on-wall measure {q:.8}, Monte Carlo {:.8} ({:.2} sigma)",
        mc.value(),
        mc.sigmas_from(q)
    );

    let p = WeightParams::new(2, 1.0, 0.0, -0.5);
    let ball = divergence_check(&p, &TrialDomain::DoubledHalfBall { radius: 1.0 })?;
    let ell = divergence_check(
        &p,
        &TrialDomain::DoubledHalfEllipsoid {
            semiaxes: vec![1.0, 2.0],
        },
    )?;
    println!(
        "ball:      lhs {:.12} mid {:.12} rhs {:.12}",
        ball.lhs, ball.mid, ball.rhs
    );
    println!(
        "ellipsoid: lhs {:.12} mid {:.12} rhs {:.12} margin {:.4}",
        ell.lhs,
        ell.mid,
        ell.rhs,
        ell.strict_margin()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
