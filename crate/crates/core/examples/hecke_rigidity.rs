//! Hecke images of a point, and `ord_p Phi_N` at pairs of ordinary CM
//! points against the rigidity threshold.
//!
//! cargo run --release --example hecke_rigidity

use cmpadic::cm::{hilbert_class_poly, Discriminant};
use cmpadic::modular::{
    hecke_image_point, pair_product_mod_p, rigidity_threshold_check, CmPoint, HeckeLevel,
};
use cmpadic::padic::roots_in_unramified;
use num_rational::BigRational;

fn points(d: i64, p: u64) -> cmpadic::Result<Vec<CmPoint>> {
    let disc = Discriminant::new(d)?;
    let h = hilbert_class_poly(&disc)?;
    Ok(roots_in_unramified(h.poly(), p, 4, 20)?
        .into_iter()
        .enumerate()
        .map(|(index, value)| CmPoint {
            discriminant: disc,
            index,
            value,
        })
        .collect())
}

fn main() -> cmpadic::Result<()> {
    // 2-isogenous partners of j = 1728 over Q_7 and its extensions
    let level = HeckeLevel::new(vec![2])?;
    let img = hecke_image_point(&[BigRational::from_integer(1728.into())], &level, 7, 12, 3)?;
    for y in img {
        println!("T_2(1728) contains {}", y[0]);
    }

    let p = 5;
    let a = points(-11, p)?;
    let b = points(-19, p)?;
    for n in [1, 2, 3] {
        let r = rigidity_threshold_check(&a[0], &b[0], n, p)?;
        println!(
            "N={n}: ord Phi_N(j(-11), j(-19)) = {:?}, threshold {}, pass {}",
            r.valuation, r.threshold, r.pass
        );
    }
    let h1 = hilbert_class_poly(&Discriminant::new(-71)?)?;
    let h2 = hilbert_class_poly(&Discriminant::new(-79)?)?;
    println!(
        "prod Phi_2 over roots of H_-71 x H_-79 mod 5 = {}",
        pair_product_mod_p(2, h1.poly(), h2.poly(), p)?
    );
    Ok(())
}
