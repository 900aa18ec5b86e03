// A log-convex radial density that decreases near the origin: for small
// measures an off-centre ball touching |x| = R0 has less perimeter than the
// centred ball.

use wisolab::sweeps::{find_d0, lemma51_construct, offcenter_monte_carlo, RadialWeight};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let h = RadialWeight::shifted_gaussian();
    let d0 = find_d0(&h, 1.0, 2)?;
    let c = &d0.certificate;
    println!("d0 = {:.10}", d0.d0);
    println!(
        "  R <= R0 - 2 rho:        {:.8} <= {:.8}",
        c.radii_fit.0, c.radii_fit.1
    );
    println!(
        "  h(R0-2d)^N < h(R)h(R0): {:.8} <  {:.8}",
        c.density_bound.0, c.density_bound.1
    );

    let rec = lemma51_construct(&h, 2, 1.0, 0.5 * d0.d0)?;
    println!("d = {:.8}: R {:.8}, rho {:.8}", rec.d, rec.r_d, rec.rho_d);
    println!(
        "P_offcenter {:.10} < P_centered {:.10} (margin {:.4})",
        rec.p_offcenter,
        rec.p_centered,
        rec.relative_margin()
    );
    for s in &rec.chain {
        println!(
            "  {:<45} {:.10} vs {:.10} strict {}",
            s.label, s.lhs, s.rhs, s.strict
        );
    }
    println!(
        "rho < (h(R)/h(R0))^(1/N) R: {:.10} vs {:.10} holds {}",
        rec.radius_bound.0,
        rec.radius_bound.1,
        rec.radius_bound_holds()
    );

    let mc = offcenter_monte_carlo(&h, 2, rec.y_d, rec.rho_d, 1_000_000, 1)?;
    println!(
        "Monte Carlo: measure {:.2} sigma, perimeter {:.2} sigma",
        mc.measure.sigmas_from(rec.d),
        mc.perimeter.sigmas_from(rec.p_offcenter)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
