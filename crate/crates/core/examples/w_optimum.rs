//! Prints the Svetlichny optimum for the W state and the GHZ reference.

use tribell::{make_ghz, make_w, optimize, Functional, GhzBasis, OptimizationConfig};

fn main() {
    let config = OptimizationConfig::default();
    for (name, rho) in [
        ("W", make_w().to_density()),
        ("GHZ-RL", make_ghz(GhzBasis::CircularRl).to_density()),
    ] {
        let r = optimize(&rho, Functional::Svetlichny, &config).expect("default config is valid");
        println!("{name}: |S_V| = {:.6} after {} evaluations", r.best_value, r.evaluations);
        for (party, pair) in ["a", "b", "c"].iter().zip(&r.best_settings) {
            println!("  {party}: phi = {:8.3}°, phi' = {:8.3}°", pair.phi.degrees(), pair.phi_prime.degrees());
        }
    }
}
