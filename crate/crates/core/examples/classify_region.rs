// Classify a few parameter points and show the conditions behind each tag.

use wisolab::params::{classify, sweep_grid, GridSpec, WeightParams};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for p in [
        WeightParams::new(2, 0.0, 0.0, -0.5),
        WeightParams::new(3, 2.0, 0.0, 0.5),
        WeightParams::new(3, 0.0, 1.0, 0.0),
        WeightParams::new(2, 0.0, 0.0, -1.5),
    ] {
        let c = classify(&p);
        println!("{p:?} -> {}", c.tag);
        if let Some(w) = c.witness {
            println!(
                "  cond_1_1 {} cond_1_2 {} cond_1_3 {} nec1 {} nec2 {}",
                w.cond_1_1.holds, w.cond_1_2.holds, w.cond_1_3.holds, w.nec1.holds, w.nec2.holds
            );
        }
    }

    // a small phase diagram in (k, alpha) for N = 3
    let grid = GridSpec {
        dims: vec![3],
        k: vec![0.0, 0.5, 1.0],
        l: vec![0.0],
        alpha: vec![-0.5, 0.0, 0.5],
    };
    for (p, c) in sweep_grid(&grid) {
        println!("k={:<4} alpha={:<5} {}", p.k, p.alpha, c.tag);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
