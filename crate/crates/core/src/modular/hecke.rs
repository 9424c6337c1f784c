//! Hecke images of rational points of `Y(1)^n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{modular_poly, psi};
use crate::error::{Error, Result};
use crate::padic::number::rational_ord;
use crate::padic::{
    roots_in_unramified, IntegerPolynomial, PadicNumber, UnramifiedRing, Valuation,
};

/// A level `N = (N_1, ..., N_n)` with every `N_i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeckeLevel(Vec<u32>);

impl HeckeLevel {
    pub fn new(levels: Vec<u32>) -> Result<HeckeLevel> {
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::Domain(format!("bad Hecke level {levels:?}")));
        }
        Ok(HeckeLevel(levels))
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }
}

/// `Phi_N(x, Y)` for `x = a/b`, scaled by `b^{Psi(N)}` to integer coefficients.
fn specialized(level: u32, x: &BigRational) -> Result<IntegerPolynomial> {
    let phi = modular_poly(level)?;
    let m = phi.degree();
    let (a, b) = (x.numer(), x.denom());
    let mut bpow = vec![BigInt::one()];
    let mut apow = vec![BigInt::one()];
    for k in 1..=m {
        bpow.push(&bpow[k - 1] * b);
        apow.push(&apow[k - 1] * a);
    }
    let coeffs = (0..=m)
        .map(|j| {
            (0..=m).fold(BigInt::zero(), |acc, i| {
                acc + phi.coeff(i, j) * &apow[i] * &bpow[m - i]
            })
        })
        .collect();
    Ok(IntegerPolynomial::new(coeffs))
}

/// All points `y` with `Phi_{N_i}(x_i, y_i) = 0` for every `i` whose
/// coordinates lie in unramified extensions of degree `<= f_max`.
///
/// Repeated solutions (e.g. the three `2`-isogenies from `j = 0` all land
/// on `54000`) are listed once per coordinate.
pub fn hecke_image_point(
    x: &[BigRational],
    level: &HeckeLevel,
    p: u64,
    precision: u32,
    f_max: usize,
) -> Result<Vec<Vec<PadicNumber>>> {
    if x.len() != level.0.len() {
        return Err(Error::Precondition(
            "point and level have different lengths".into(),
        ));
    }
    let mut per_coord: Vec<Vec<PadicNumber>> = Vec::new();
    for (xi, &n) in x.iter().zip(&level.0) {
        if !xi.is_zero() && rational_ord(xi, p) < Valuation::Finite(0) {
            return Err(Error::Domain(format!(
                "coordinate {xi} is not {p}-integral"
            )));
        }
        let ys = if n == 1 {
            vec![PadicNumber::from_rational(
                &UnramifiedRing::get(p, 1),
                xi,
                precision,
            )]
        } else {
            roots_in_unramified(&specialized(n, xi)?, p, f_max, precision)?
        };
        debug_assert!(ys.len() as u64 <= psi(n as u64));
        per_coord.push(ys);
    }
    let mut out: Vec<Vec<PadicNumber>> = vec![Vec::new()];
    for ys in per_coord {
        out = out
            .into_iter()
            .flat_map(|pt| {
                ys.iter().map(move |y| {
                    let mut q = pt.clone();
                    q.push(y.clone());
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::{hilbert_class_poly, Discriminant};

    #[test]
    fn level_one_is_identity() {
        let x = vec![BigRational::from_integer(7.into())];
        let pts = hecke_image_point(&x, &HeckeLevel::new(vec![1]).unwrap(), 5, 10, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(
            pts[0][0].to_rational().unwrap(),
            BigRational::from_integer(7.into())
        );
    }

    #[test]
    fn two_isogenies_from_j_zero() {
        let x = vec![BigRational::zero()];
        let pts = hecke_image_point(&x, &HeckeLevel::new(vec![2]).unwrap(), 13, 12, 2).unwrap();
        assert!(!pts.is_empty() && pts.len() <= 3);
        let h12 = hilbert_class_poly(&Discriminant::new(-12).unwrap()).unwrap();
        let h3 = hilbert_class_poly(&Discriminant::new(-3).unwrap()).unwrap();
        for pt in &pts {
            let y = &pt[0];
            let v12 = h12.poly().eval_padic(y, 12);
            let v3 = h3.poly().eval_padic(y, 12);
            assert!(v12.is_zero_at_precision() || v3.is_zero_at_precision());
        }
    }

    #[test]
    fn count_bounded_by_psi() {
        for (n, x) in [(2u32, 1i64), (3, 1728), (5, 8000), (7, -3375)] {
            let pts = hecke_image_point(
                &[BigRational::from_integer(x.into())],
                &HeckeLevel::new(vec![n]).unwrap(),
                11,
                8,
                4,
            )
            .unwrap();
            assert!(pts.len() as u64 <= psi(n as u64), "N = {n}");
        }
    }
}
