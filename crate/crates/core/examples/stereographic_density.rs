// The upper half-sphere seen through stereographic projection from the
// south pole: round trips, the weighted density on the disk, the gradient
// pullback and the bound constants.

use wisolab::geometry::sigma_alpha;
use wisolab::stereographic::{
    bound_constants_probe, from_disk, gradient_pullback_check, sigma_alpha_density,
    sigma_alpha_stereographic, to_disk, DiskPoint,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let y = DiskPoint::new(vec![0.3, -0.4])?;
    let z = from_disk(&y);
    println!("y {:?} -> zeta {:?} -> y {:?}", y.y, z.zeta, to_disk(&z).y);
    println!(
        "density at y for N=3, alpha=-0.5: {:.12}",
        sigma_alpha_density(&y, 3, -0.5)?
    );

    for (n, alpha) in [(2, -0.5), (3, -0.5), (4, 1.0)] {
        println!(
            "sigma N={n} alpha={alpha}: disk {:.14} sphere {:.14}",
            sigma_alpha_stereographic(n, alpha)?,
            sigma_alpha(n, alpha)?
        );
    }

    let check = gradient_pullback_check(|y| y[0] * y[1] + y[0], &y)?;
    println!(
        "pullback |grad_S u| {:.10} vs |grad u| (|y|^2+1)/2 {:.10}",
        check.lhs, check.rhs
    );

    let env = bound_constants_probe(3, -0.5, 2000)?;
    println!(
        "C1 in [{:.6}, {:.6}], C2 in [{:.6}, {:.6}]",
        env.c1_low, env.c1_high, env.c2_low, env.c2_high
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
