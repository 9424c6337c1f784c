//! Truncated arithmetic in `Z_p`, `Q_p` and their unramified extensions.

pub mod galois;
pub mod gf;
pub mod log;
pub mod newton;
pub mod number;
pub mod poly;
pub mod ring;
pub mod roots;

pub use galois::{approximation_exponent, frobenius, teichmuller, ApproximationExponent};
pub use log::padic_log;
pub use newton::{NewtonPolygon, Segment, Slope};
pub use number::{PadicNumber, Valuation};
pub use poly::{IntegerPolynomial, PadicPolynomial};
pub use ring::UnramifiedRing;
pub use roots::{embed, hensel_lift, roots_in_unramified};
