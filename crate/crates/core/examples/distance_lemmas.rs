//! `p`-adic distance to the zero set of an ideal, the sampled upper bound,
//! and bounded ideal membership.
//!
//! cargo run --example distance_lemmas

use cmpadic::modular::distance::integer_point;
use cmpadic::modular::mpoly::rational;
use cmpadic::modular::{
    check_union_product_distances, distance_ord, distance_prime_upper_ord,
    ideal_membership_bounded, IdealPresentation, LemmaMode, MPoly,
};

fn main() -> cmpadic::Result<()> {
    let p = 3;
    // Z = {(1, 2)}, Z' = {X1 = 10}
    let x1 = MPoly::var(2, 0);
    let x2 = MPoly::var(2, 1);
    let c = |k: i64| MPoly::constant(2, rational(k, 1));
    let z = IdealPresentation::new(p, 2, vec![x1.sub(&c(1)), x2.sub(&c(2))])?;
    let zp = IdealPresentation::new(p, 2, vec![x1.sub(&c(10))])?;

    let x = integer_point(p, &[28, 2 + 81], 20);
    println!("ord dist(x, Z)  = {}", distance_ord(&x, &z)?);
    println!("ord dist(x, Z') = {}", distance_ord(&x, &zp)?);
    let samples = vec![integer_point(p, &[1, 2], 20)];
    println!(
        "ord dist'(x, Z) = {}",
        distance_prime_upper_ord(&x, &samples)?
    );

    let u = check_union_product_distances(&x, &z, &zp, &LemmaMode::Union)?;
    println!(
        "union: {:?} {:?} -> {:?}, holds {}",
        u.ord_z, u.ord_z_prime, u.ord_combined, u.holds
    );
    let y = integer_point(p, &[19], 20);
    let w = IdealPresentation::new(
        p,
        1,
        vec![MPoly::var(1, 0).sub(&MPoly::constant(1, rational(1, 1)))],
    )?;
    let q = check_union_product_distances(&x, &z, &w, &LemmaMode::Product { y })?;
    println!(
        "product: {:?} {:?} -> {:?}, holds {}",
        q.ord_z, q.ord_z_prime, q.ord_combined, q.holds
    );

    // 9 X1 X2 - 9 X1 = 9 X1 (X2 - 2) + 9 X1 in the ideal (X2 - 2, X1)
    let f = x1.mul(&x2).sub(&x1).scale(&rational(9, 1));
    let ideal = IdealPresentation::new(p, 2, vec![x2.sub(&c(2)), x1.clone()])?;
    let m = ideal_membership_bounded(&f, &ideal, 2)?;
    for (i, a) in m.coefficients.iter().enumerate() {
        println!("a_{} = {a}", i + 1);
    }
    println!("c = {} = 3^-{}", m.c, m.c_ord);
    Ok(())
}
