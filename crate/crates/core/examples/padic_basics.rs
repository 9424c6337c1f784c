//! Arithmetic in `Z_p` and its unramified extensions: valuations, the
//! logarithm, Teichmuller lifts and roots of integer polynomials.
//!
//! cargo run --example padic_basics

use cmpadic::padic::{
    padic_log, roots_in_unramified, teichmuller, IntegerPolynomial, PadicNumber, UnramifiedRing,
};

fn main() -> cmpadic::Result<()> {
    let q5 = UnramifiedRing::get(5, 1);
    let a = PadicNumber::from_i64(&q5, 1 + 5 * 7, 12);
    let b = PadicNumber::from_i64(&q5, 50, 12);
    println!("a = {a}, ord a = {}", a.ord()?);
    println!("b = {b}, ord b = {}", b.ord()?);
    println!("a * b = {}", &a * &b);
    println!(
        "log(a) = {}, ord = {}",
        padic_log(&a)?,
        padic_log(&a)?.ord()?
    );

    // Teichmuller lift of a generator of F_25
    let q25 = UnramifiedRing::get(5, 2);
    let field = q25.residue_field().clone();
    let g = field.generator();
    let w = teichmuller(&q25, &g, 10);
    println!(
        "omega(g)^24 - 1 = {}",
        &w.pow(24) - &PadicNumber::one(&q25, 10)
    );

    // X^2 + 1 splits over Z_5, X^2 + 2 needs Z_25
    for coeffs in [[1i64, 0, 1], [2, 0, 1]] {
        let f = IntegerPolynomial::from_i64(&coeffs);
        for r in roots_in_unramified(&f, 5, 2, 10)? {
            println!("root of {f}: {r} (residue degree {})", r.residue_degree());
        }
    }
    Ok(())
}
