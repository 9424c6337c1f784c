//! The order `O` in the quaternion algebra ramified at `p` and infinity, and
//! the endomorphism `phi` with `phi^2 - phi + (1 + d)/4 = 0`.
//!
//! cargo run --example quaternion_phi

use cmpadic::quaternion::{
    construct_phi, gram_matrix, order_basis, order_contains, reduced_norm, reduced_trace,
    QuaternionElement,
};

fn main() -> cmpadic::Result<()> {
    let p = 5;
    let basis = order_basis(p);
    for (i, b) in basis.iter().enumerate() {
        println!(
            "b{} = {b}  trace {}  norm {}",
            i + 1,
            reduced_trace(b),
            reduced_norm(b)
        );
    }
    println!("Gram determinant: {}", gram_matrix(p)?.det);
    let prod = &basis[1] * &basis[3];
    println!("b2 b4 = {prod}, in O: {}", order_contains(&prod));
    let half = QuaternionElement::u(p).scale(&num_rational::BigRational::new(1.into(), 2.into()));
    println!("u/2 in O: {}", order_contains(&half));

    // n = 1, x = 1: d = 3 + 4 * 5^3 = 503
    let c = construct_phi(1, 1, p)?;
    println!("phi = {}", c.phi);
    println!("d = {}, summary: {:?}", c.d, c.summary());
    Ok(())
}
