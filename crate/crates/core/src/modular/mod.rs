//! Modular polynomials, Hecke images of points, `p`-adic distances to
//! algebraic sets and the rigidity check for CM points.

pub mod distance;
pub mod hecke;
pub mod mpoly;
pub mod phi;
pub mod rigidity;

pub use distance::{
    check_union_product_distances, distance, distance_ord, distance_prime_upper,
    distance_prime_upper_ord, ideal_membership_bounded, IdealPresentation, LemmaCheck, LemmaMode,
    Membership,
};
pub use hecke::{hecke_image_point, HeckeLevel};
pub use mpoly::{gauss_norm, MPoly};
pub use phi::{modular_poly, ModularPolynomial, SUPPORTED_LEVELS};
pub use rigidity::{
    pair_product_mod_p, partner_resultant_mod_p, partner_resultant_stripped, reduce_mod_p,
    resultant_mod_p, rigidity_threshold, rigidity_threshold_check, CmPoint, RigidityReport,
};

use crate::arith::factor;

/// `Psi(N) = N prod_{l | N} (1 + 1/l)`, the degree of `Phi_N` in each variable.
pub fn psi(n: u64) -> u64 {
    assert!(n >= 1, "psi needs N >= 1");
    factor(n).iter().fold(n, |acc, &(l, _)| acc / l * (l + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_values() {
        assert_eq!(psi(1), 1);
        assert_eq!(psi(2), 3);
        assert_eq!(psi(6), 12);
        for l in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..=4u32 {
                assert_eq!(psi(l.pow(k)), l.pow(k - 1) * (l + 1));
            }
        }
    }
}
