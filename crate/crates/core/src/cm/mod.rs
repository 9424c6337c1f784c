//! Complex multiplication: discriminants, class groups, the `j`-function,
//! Hilbert class polynomials and singular moduli at `p`.

pub mod bigfloat;
pub mod forms;
pub mod hilbert;
pub mod jfunc;
pub mod singular;

pub use crate::arith::{kronecker, omega};
pub use forms::{
    class_group, reduced_forms, representation_count, ClassGroup, Discriminant, QuadraticForm,
};
pub use hilbert::{
    hilbert_class_poly, hilbert_class_poly_with, HilbertClassPolynomial, HilbertOptions,
};
pub use singular::{reduction_type, singular_moduli_at, ReductionType, SingularModulusRecord};
