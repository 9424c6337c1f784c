//! Valuations of `gamma^D - 1` and simultaneous conjugation of integral
//! matrices into primitive integral ones.
//!
//! cargo run --example galois_conjugator

use cmpadic::galois_matrix::{
    construct_conjugator, log_order_predicate, min_k0, random_matrix, MatrixGL2,
};
use cmpadic::padic::{PadicNumber, UnramifiedRing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cmpadic::Result<()> {
    for (p, gamma, d) in [(5u64, 26i64, 10u64), (3, 10, 9), (2, 3, 4), (2, 5, 6)] {
        let g = PadicNumber::from_i64(&UnramifiedRing::get(p, 1), gamma, 40);
        let r = log_order_predicate(&g, d)?;
        println!(
            "p={p} gamma={gamma} D={d}: ord(gamma^D - 1) = {:?}, bound {:?} ({:?}) holds={}",
            r.lhs, r.rhs, r.relation, r.holds
        );
    }

    let p = 3;
    let d = 6;
    let k0 = min_k0(p, d);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mats: Vec<MatrixGL2> = (0..2).map(|_| random_matrix(&mut rng, p, 30)).collect();
    mats.push(MatrixGL2::from_i64(p, [[1, 9], [0, 1]], 30)?);
    let c = construct_conjugator(&mats, k0, d)?;
    println!(
        "k0={k0} k_i={:?} k={} case={:?} e={} alpha={} beta={}",
        c.k_i, c.k, c.case, c.e, c.alpha, c.beta
    );
    println!(
        "integral={} primitive={} scalar ord={} in [k0, 3 D k0]: {}",
        c.all_integral(),
        c.some_primitive(),
        c.scalar_ord,
        c.scalar_bounds_hold()
    );
    Ok(())
}
