use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use super::number::Valuation;
use super::poly::{IntegerPolynomial, PadicPolynomial};
use crate::arith::ord_p_big;
use crate::error::{Error, Result};

pub type Slope = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Slope,
    pub length: usize,
}

/// Lower convex hull of `(i, ord_p(c_i))`.
///
/// Root valuations in `C_p` are the negated slopes, each with multiplicity
/// equal to the horizontal length. Roots at zero (vanishing low
/// coefficients) are counted separately in `zero_roots`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    segments: Vec<Segment>,
    zero_roots: usize,
    /// Vertices `(i, ord_p(c_i))` of the hull, left to right.
    vertices: Vec<(usize, i64)>,
}

impl NewtonPolygon {
    /// Builds the polygon from the known points; `points` must be sorted by
    /// abscissa and contain at least one entry.
    fn from_points(points: &[(usize, i64)]) -> NewtonPolygon {
        let zero_roots = points[0].0;
        let mut hull: Vec<(usize, i64)> = Vec::new();
        for &pt in points {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // drop the middle point unless it lies strictly below the chord
                let lhs = (y2 - y1) as i128 * (pt.0 - x1) as i128;
                let rhs = (pt.1 - y1) as i128 * (x2 - x1) as i128;
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let segments = hull
            .windows(2)
            .map(|w| Segment {
                slope: Slope::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64),
                length: w[1].0 - w[0].0,
            })
            .collect();
        NewtonPolygon {
            segments,
            zero_roots,
            vertices: hull,
        }
    }

    pub fn of_integer(f: &IntegerPolynomial, p: u64) -> NewtonPolygon {
        assert!(!f.is_zero(), "Newton polygon of the zero polynomial");
        let points: Vec<(usize, i64)> = f
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(i, c)| ord_p_big(c, p).map(|v| (i, v as i64)))
            .collect();
        Self::from_points(&points)
    }

    /// Polygon of a `p`-adic polynomial. Approximate-zero coefficients must
    /// lie strictly above the hull of the known points, otherwise the
    /// valuations are not determined.
    pub fn of_padic(f: &PadicPolynomial) -> Result<NewtonPolygon> {
        let mut known = Vec::new();
        let mut bounds = Vec::new();
        for (i, c) in f.coeffs().iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            match c.ord() {
                Ok(Valuation::Finite(v)) => known.push((i, v)),
                Ok(Valuation::Infinite) => {}
                Err(_) => bounds.push((i, c.ord_lower_bound().finite().unwrap())),
            }
        }
        if known.is_empty() {
            return Err(Error::PrecisionExhausted(
                "no coefficient is known to be nonzero".into(),
            ));
        }
        if f.coeffs().last().is_some_and(|c| c.is_zero_at_precision()) {
            return Err(Error::PrecisionExhausted(
                "leading coefficient is zero at working precision".into(),
            ));
        }
        let poly = Self::from_points(&known);
        for (i, lb) in bounds {
            if i < poly.zero_roots {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient {i} undetermined below the lowest known term"
                )));
            }
            if Slope::from_integer(lb) <= poly.height_at(i) {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient {i} is zero only modulo p^{lb}, on or below the hull"
                )));
            }
        }
        Ok(poly)
    }

    /// Height of the hull over abscissa `x` (inside its horizontal range).
    pub fn height_at(&self, x: usize) -> Slope {
        let v = &self.vertices;
        for w in v.windows(2) {
            if x >= w[0].0 && x <= w[1].0 {
                let t = Slope::new((x - w[0].0) as i64, (w[1].0 - w[0].0) as i64);
                return Slope::from_integer(w[0].1) + t * Slope::from_integer(w[1].1 - w[0].1);
            }
        }
        Slope::from_integer(v.last().map_or(0, |&(_, y)| y))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn zero_roots(&self) -> usize {
        self.zero_roots
    }

    pub fn vertices(&self) -> &[(usize, i64)] {
        &self.vertices
    }

    /// Valuations of the nonzero roots, ascending, with multiplicity.
    pub fn root_valuations(&self) -> Vec<Slope> {
        let mut out: Vec<Slope> = self
            .segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(-s.slope, s.length))
            .collect();
        out.sort();
        out
    }

    pub fn max_root_valuation(&self) -> Option<Slope> {
        self.segments.first().map(|s| -s.slope)
    }

    /// Sum of all nonzero-root valuations: `ord(c_low) - ord(c_lead)`.
    pub fn valuation_sum(&self) -> Slope {
        self.segments.iter().fold(Slope::zero(), |acc, s| {
            acc - s.slope * Slope::from_integer(s.length as i64)
        })
    }

    pub fn nonzero_root_count(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| format!("slope {} x{}", s.slope, s.length))
            .collect();
        write!(f, "[{}]", parts.join(", "))?;
        if self.zero_roots > 0 {
            write!(f, " + {} root(s) at 0", self.zero_roots)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn basic_polygons() {
        // X - 5
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[-5, 1]), 5);
        assert_eq!(np.root_valuations(), vec![Slope::from_integer(1)]);
        // X^2 - 5: ramified slope
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[-5, 0, 1]), 5);
        assert_eq!(np.root_valuations(), vec![Slope::new(1, 2); 2]);
        // X + 32768 at 2
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[32768, 1]), 2);
        assert_eq!(np.root_valuations(), vec![Slope::from_integer(15)]);
    }

    #[test]
    fn zero_roots_are_separate() {
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[0, 0, 3, 1]), 3);
        assert_eq!(np.zero_roots(), 2);
        assert_eq!(np.nonzero_root_count(), 1);
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[0, 1]), 5);
        assert_eq!(np.zero_roots(), 1);
        assert!(np.root_valuations().is_empty());
    }

    #[test]
    fn collinear_points_merge() {
        // (X - 2)(X - 4)(X - 8) at p = 2: valuations 1, 2, 3
        let f = IntegerPolynomial::from_roots(&[BigInt::from(2), BigInt::from(4), BigInt::from(8)]);
        let np = NewtonPolygon::of_integer(&f, 2);
        assert_eq!(
            np.root_valuations(),
            vec![
                Slope::from_integer(1),
                Slope::from_integer(2),
                Slope::from_integer(3)
            ]
        );
        // X^3 - 8: one slope of length 3
        let np = NewtonPolygon::of_integer(&IntegerPolynomial::from_i64(&[-8, 0, 0, 1]), 2);
        assert_eq!(np.segments().len(), 1);
        assert_eq!(np.segments()[0].length, 3);
    }
}
