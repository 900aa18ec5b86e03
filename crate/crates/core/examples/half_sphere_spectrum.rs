// Weighted eigenvalues on the upper half-sphere: the first Neumann
// eigenvalue, the Dirichlet problem on caps and the nodal-angle check.

use std::f64::consts::FRAC_PI_2;

use wisolab::params::WeightParams;
use wisolab::spectral::{
    lambda1_dirichlet, mu1_report, nodal_angle_crosscheck, solve_branch, stability_margin,
    SLProblem, DEFAULT_TOL,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for (n, alpha) in [(2, -0.5), (3, -0.9), (4, 0.0)] {
        let r = mu1_report(n, alpha, DEFAULT_TOL)?;
        println!(
            "N={n} alpha={alpha}: mu1 {:.12} (N+alpha-1 = {}), mu0 {:.12}, m=1 branch {:.12}",
            r.mu1,
            n as f64 + alpha - 1.0,
            r.mu0,
            r.mu_m1
        );
        let cap = lambda1_dirichlet(n, alpha, FRAC_PI_2, DEFAULT_TOL)?;
        println!(
            "  Dirichlet on the half-sphere {cap:.12} ((N-1)(1-alpha) = {})",
            (n as f64 - 1.0) * (1.0 - alpha)
        );
        if alpha < 0.0 {
            let c = nodal_angle_crosscheck(n, alpha, DEFAULT_TOL)?;
            println!(
                "  nodal angle {:.10}, lambda1 there {:.12}",
                c.theta_hat, c.lambda1_at_theta_hat
            );
        }
    }

    // the classical case: spherical harmonics of degree 1..3 on S^2
    let pairs = solve_branch(&SLProblem::neumann(3, 0.0, 0), 4, DEFAULT_TOL)?;
    let mus: Vec<String> = pairs.iter().map(|p| format!("{:.10}", p.mu)).collect();
    println!("radial branch, N=3, alpha=0: {}", mus.join(", "));

    let p = WeightParams::new(3, 1.0, 0.0, -0.5);
    println!(
        "stability margin at {p:?}: {:.12}",
        stability_margin(&p, DEFAULT_TOL)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
