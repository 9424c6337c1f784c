//! Singular moduli viewed `p`-adically.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::forms::Discriminant;
use super::hilbert::{hilbert_class_poly, HilbertClassPolynomial};
use crate::error::{Error, Result};
use crate::padic::{roots_in_unramified, NewtonPolygon, PadicNumber, Slope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionType {
    Ordinary,
    Supersingular,
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionType::Ordinary => write!(f, "ordinary"),
            ReductionType::Supersingular => write!(f, "supersingular"),
        }
    }
}

/// Ordinary iff `p` splits in the CM field.
pub fn reduction_type(d: &Discriminant, p: u64) -> Result<ReductionType> {
    if d.conductor().is_multiple_of(p) {
        return Err(Error::Precondition(format!(
            "{p} divides the conductor {} of {}",
            d.conductor(),
            d.value()
        )));
    }
    Ok(if d.kronecker(p) == 1 {
        ReductionType::Ordinary
    } else {
        ReductionType::Supersingular
    })
}

#[derive(Clone, Debug)]
pub struct SingularModulusRecord {
    pub discriminant: Discriminant,
    pub p: u64,
    pub class_number: usize,
    pub reduction: ReductionType,
    /// Finite root valuations with multiplicity, ascending.
    pub valuations: Vec<Slope>,
    /// Number of roots equal to `0`.
    pub zero_roots: usize,
    /// All roots, when ordinary and every root has residue degree `<= f_max`.
    pub roots: Option<Vec<PadicNumber>>,
    pub hilbert: Arc<HilbertClassPolynomial>,
}

pub fn singular_moduli_at(
    d: &Discriminant,
    p: u64,
    precision: u32,
    f_max: usize,
) -> Result<SingularModulusRecord> {
    let reduction = reduction_type(d, p)?;
    let hilbert = hilbert_class_poly(d)?;
    let np = NewtonPolygon::of_integer(hilbert.poly(), p);
    let roots = if reduction == ReductionType::Ordinary {
        let rs = roots_in_unramified(hilbert.poly(), p, f_max, precision)?;
        (rs.len() == hilbert.degree()).then_some(rs)
    } else {
        None
    };
    Ok(SingularModulusRecord {
        discriminant: *d,
        p,
        class_number: hilbert.degree(),
        reduction,
        valuations: np.root_valuations(),
        zero_roots: np.zero_roots(),
        roots,
        hilbert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn reduction_types() {
        assert_eq!(
            reduction_type(&disc(-3), 5).unwrap(),
            ReductionType::Supersingular
        );
        assert_eq!(
            reduction_type(&disc(-11), 3).unwrap(),
            ReductionType::Ordinary
        );
        assert_eq!(
            reduction_type(&disc(-4), 2).unwrap(),
            ReductionType::Supersingular
        );
        assert!(reduction_type(&disc(-12), 2).is_err());
    }

    #[test]
    fn records() {
        let r = singular_moduli_at(&disc(-11), 2, 10, 2).unwrap();
        assert_eq!(r.valuations, vec![Slope::from_integer(15)]);
        let r = singular_moduli_at(&disc(-3), 5, 10, 2).unwrap();
        assert!(r.valuations.is_empty());
        assert_eq!(r.zero_roots, 1);
        let r = singular_moduli_at(&disc(-23), 2, 10, 3).unwrap();
        assert_eq!(r.valuations.len(), 3);
        let sum: Slope = r.valuations.iter().sum();
        // the constant term is odd
        assert_eq!(sum, Slope::from_integer(0));
    }

    #[test]
    fn ordinary_roots_are_found() {
        // -23 at p = 3: 3 splits; Frobenius has order 3 in the class group
        let r = singular_moduli_at(&disc(-23), 3, 12, 3).unwrap();
        assert_eq!(r.reduction, ReductionType::Ordinary);
        assert_eq!(r.roots.as_ref().unwrap().len(), 3);
    }
}
