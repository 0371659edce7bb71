//! The function `A(x)` of the four-point correlator, its crossing relations
//! and the full self-check suite.

use bls::identities::{run_identities, IdentityOptions};
use bls::special::{a_function, mu_constant, CrossRatio};
use bls::Complex64;

fn main() -> bls::Result<()> {
    println!("mu = {:.17}", mu_constant());
    for x in [Complex64::new(0.3, 0.2), Complex64::new(-2.0, 1.0), Complex64::new(0.5, 0.0)] {
        let a = a_function(CrossRatio::new(x)?)?;
        let swapped = a_function(CrossRatio::new(1.0 - x)?)?;
        let inverted = a_function(CrossRatio::new(1.0 / x)?)?;
        println!(
            "x = {x}: A(x) = {a:.15}, A(1-x) - A(x) = {:.1e}, A(1/x) - A(x) - log|x| = {:.1e}",
            swapped - a,
            inverted - a - x.norm().ln()
        );
    }

    for check in run_identities(&IdentityOptions::default())? {
        println!(
            "{:<45} max deviation {:.2e} (tol {:.0e}, {} samples) {}",
            check.name,
            check.max_deviation,
            check.tolerance,
            check.samples,
            if check.passed { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
