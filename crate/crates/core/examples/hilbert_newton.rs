//! Hilbert class polynomials, their Newton polygons, and singular moduli
//! at a prime of ordinary reduction.
//!
//! cargo run --release --example hilbert_newton

use cmpadic::cm::{class_group, hilbert_class_poly, singular_moduli_at, Discriminant};
use cmpadic::padic::NewtonPolygon;

fn main() -> cmpadic::Result<()> {
    for d in [-11i64, -23, -71] {
        let disc = Discriminant::new(d)?;
        let h = hilbert_class_poly(&disc)?;
        println!("h({d}) = {}", class_group(&disc).class_number());
        if h.degree() <= 3 {
            println!("  H = {}", h.poly());
        }
        println!(
            "  Newton polygon at 2: {}",
            NewtonPolygon::of_integer(h.poly(), 2)
        );
    }

    // d = 3 + 4 * 5^3 = 503: a root of H_{-503} is 5-adically close to 0
    let disc = Discriminant::new(-503)?;
    let h = hilbert_class_poly(&disc)?;
    let np = NewtonPolygon::of_integer(h.poly(), 5);
    let vals: Vec<String> = np.root_valuations().iter().map(|v| v.to_string()).collect();
    println!(
        "H_-503 has degree {}; root valuations at 5: {}",
        h.degree(),
        vals.join(" ")
    );
    if let Some(v) = np.max_root_valuation() {
        println!("  largest: {v}");
    }

    let rec = singular_moduli_at(&Discriminant::new(-11)?, 5, 10, 4)?;
    println!("-11 at 5: {:?} reduction", rec.reduction);
    for r in rec.roots.unwrap_or_default() {
        println!("  j = {r}");
    }
    Ok(())
}
