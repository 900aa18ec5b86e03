// The quadrature layer against closed forms: Gauss-Jacobi with endpoint
// singularities, adaptive Gauss-Kronrod, log-gamma and seeded Monte Carlo.

use std::f64::consts::PI;

use wisolab::quadrature::{adaptive_integrate, beta, jacobi_on, mc_integrate, BoxDomain};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // ∫_0^1 x^{-1/2} (1-x)^{-3/4} dx = B(1/2, 1/4)
    let rule = jacobi_on(20, 0.0, 1.0, -0.5, -0.75)?;
    let q = rule.integrate(|_| 1.0);
    println!("jacobi   {q:.15}  beta {:.15}", beta(0.5, 0.25)?);

    let est = adaptive_integrate(|x| (x * x).cos(), (0.0, 10.0), 1e-12)?;
    println!(
        "adaptive {:.15} (error estimate {:.1e}, {} evaluations)",
        est.value, est.error_estimate, est.evaluations
    );

    // unit disk area, reproducible for a fixed seed whatever the thread count
    let disk = |x: &[f64]| x[0] * x[0] + x[1] * x[1] < 1.0;
    let mc = mc_integrate(
        disk,
        |_| 1.0,
        &BoxDomain::new(vec![-1.0; 2], vec![1.0; 2]),
        1_000_000,
        42,
    )?;
    println!(
        "monte carlo {:.6} +- {:.6} (pi = {PI:.6})",
        mc.value(),
        mc.std_error()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
