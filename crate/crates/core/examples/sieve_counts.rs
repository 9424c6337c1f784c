//! Square-free values of `3x^2 + 4p^{2n+1}`: local densities, exact counts
//! by brute force and by Mobius inversion, and the Euler product.
//!
//! cargo run --release --example sieve_counts

use cmpadic::sieve::{
    count_n, euler_product_c, minimal_admissible_x, rho, CountMethod, SieveConfig,
};

fn main() -> cmpadic::Result<()> {
    let cfg = SieveConfig::new(5, 1)?;
    println!("f(x) = 3x^2 + {}", cfg.constant());
    for m in [4u64, 9, 25, 49, 121, 125] {
        println!("rho({m}) = {}", rho(m, &cfg));
    }
    let y = 1_000_000;
    let brute = count_n(y, &cfg, CountMethod::Brute)?;
    let mobius = count_n(y, &cfg, CountMethod::Mobius)?;
    println!("N({y}): brute {brute}, Mobius {mobius}");
    let c = euler_product_c(&cfg, 100_000)?;
    println!(
        "c in [{:.9}, {:.9}], > 1/7: {}",
        c.lower, c.upper, c.exceeds_one_seventh
    );
    for n in 1..=3 {
        let a = minimal_admissible_x(&SieveConfig::new(5, n)?)?;
        println!("n={n}: x={} d={} = {:?}", a.x, a.f, a.factorization);
    }
    Ok(())
}
