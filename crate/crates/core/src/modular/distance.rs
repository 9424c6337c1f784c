//! `p`-adic distance from a point to the zero set of an ideal.
//!
//! The distance is measured on a chosen generator set: `max_i |f_i(x)|_p`.
//! [`ideal_membership_bounded`] reports the constant `c` that compares it
//! with the supremum over all integral members of the ideal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::mpoly::{common_ring, MPoly, Monomial};
use crate::error::{Error, Result};
use crate::padic::number::rational_ord;
use crate::padic::{PadicNumber, Valuation};

/// Generators of an ideal, all with `p`-integral coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation {
    p: u64,
    nvars: usize,
    gens: Vec<MPoly>,
}

impl IdealPresentation {
    pub fn new(p: u64, nvars: usize, gens: Vec<MPoly>) -> Result<IdealPresentation> {
        for g in &gens {
            if g.nvars() != nvars {
                return Err(Error::Precondition(format!(
                    "generator {g} has {} variables, expected {nvars}",
                    g.nvars()
                )));
            }
            if g.gauss_ord(p).is_some_and(|v| v < 0) {
                return Err(Error::Domain(format!("generator {g} is not {p}-integral")));
            }
        }
        Ok(IdealPresentation { p, nvars, gens })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[MPoly] {
        &self.gens
    }

    /// Generators `f g` for `f` in `self`, `g` in `other`: they generate
    /// `I(Z) I(Z')`, which cuts out `Z ∪ Z'`.
    pub fn product(&self, other: &IdealPresentation) -> Result<IdealPresentation> {
        let gens = self
            .gens
            .iter()
            .flat_map(|f| other.gens.iter().map(move |g| f.mul(g)))
            .collect();
        IdealPresentation::new(self.p, self.nvars, gens)
    }

    /// Generators of `Z x Z'` in `n + n'` variables.
    pub fn cartesian(&self, other: &IdealPresentation) -> Result<IdealPresentation> {
        let total = self.nvars + other.nvars;
        let gens = self
            .gens
            .iter()
            .map(|f| f.lift(total, 0))
            .chain(other.gens.iter().map(|g| g.lift(total, self.nvars)))
            .collect();
        IdealPresentation::new(self.p, total, gens)
    }
}

fn working_precision(x: &[PadicNumber]) -> u32 {
    x.iter().filter_map(|c| c.precision()).max().unwrap_or(32) + 8
}

/// `min_f ord_p f(x)` over the generators: the distance is `p^{-ord}`, and
/// `Infinite` means every generator vanishes exactly at `x`.
pub fn distance_ord(x: &[PadicNumber], ideal: &IdealPresentation) -> Result<Valuation> {
    if x.len() != ideal.nvars {
        return Err(Error::Precondition(
            "point and ideal have different dimensions".into(),
        ));
    }
    common_ring(x)?;
    if let Some(c) = x
        .iter()
        .find(|c| c.ord_lower_bound() < Valuation::Finite(0))
    {
        return Err(Error::Domain(format!(
            "coordinate of valuation {} is not integral",
            c.ord_lower_bound()
        )));
    }
    let prec = working_precision(x);
    let mut best = Valuation::Infinite;
    for f in &ideal.gens {
        let v = f.eval_padic(x, prec)?;
        if v.is_zero_at_precision() && !v.is_exact_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "{f} vanishes to working precision at x"
            )));
        }
        best = best.min(v.ord()?);
    }
    Ok(best)
}

fn size(p: u64, v: Valuation) -> f64 {
    match v {
        Valuation::Infinite => 0.0,
        Valuation::Finite(v) => (p as f64).powi(-v as i32),
    }
}

/// `max_f |f(x)|_p` over the generators; `0` iff every generator vanishes
/// exactly at `x`.
pub fn distance(x: &[PadicNumber], ideal: &IdealPresentation) -> Result<f64> {
    Ok(size(ideal.p, distance_ord(x, ideal)?))
}

/// `max_k min_i ord_p(x_i - y_{k,i})`, the valuation form of
/// [`distance_prime_upper`].
pub fn distance_prime_upper_ord(
    x: &[PadicNumber],
    samples: &[Vec<PadicNumber>],
) -> Result<Valuation> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if x.is_empty() {
        return Err(Error::Precondition("empty point".into()));
    }
    let mut best = Valuation::Finite(i64::MIN);
    for y in samples {
        if y.len() != x.len() {
            return Err(Error::Precondition(
                "sample point has the wrong dimension".into(),
            ));
        }
        // an approximate zero is still bounded by its known divisibility
        let worst = x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).ord_lower_bound())
            .min()
            .expect("nonempty");
        best = best.max(worst);
    }
    Ok(best)
}

/// `min_k max_i |x_i - y_{k,i}|_p`: an upper bound for the distance to
/// the set containing the sample points.
pub fn distance_prime_upper(x: &[PadicNumber], samples: &[Vec<PadicNumber>]) -> Result<f64> {
    let v = distance_prime_upper_ord(x, samples)?;
    Ok(size(x[0].p(), v))
}

/// A certified representation `f = sum a_i f_i` with
/// `max |a_i|_p <= c |f|_p`.
#[derive(Clone, Debug)]
pub struct Membership {
    pub coefficients: Vec<MPoly>,
    /// `c` as a power of `p`: `c = p^{-c_ord}`.
    pub c_ord: i64,
    pub c: f64,
}

fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == nvars {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, deg, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| (m.iter().sum::<u32>(), m.clone()));
    out
}

/// Solves `f = sum a_i f_i` with `deg(a_i f_i) <= cap` by row reduction of
/// `[A | I]`; `c` is the largest `p`-adic size of an entry of the
/// transformation rows that produce the solution.
pub fn ideal_membership_bounded(
    f: &MPoly,
    ideal: &IdealPresentation,
    cap: u32,
) -> Result<Membership> {
    let p = ideal.p;
    let n = ideal.nvars;
    if f.nvars() != n {
        return Err(Error::Precondition(
            "polynomial and ideal have different variable counts".into(),
        ));
    }
    if f.total_degree().is_some_and(|d| d > cap) {
        return Err(Error::NotInIdealAtCap { cap });
    }
    let rows = monomials_up_to(n, cap);
    let row_of = |m: &Monomial| {
        rows.binary_search_by_key(&(m.iter().sum::<u32>(), m.clone()), |r| {
            (r.iter().sum::<u32>(), r.clone())
        })
        .ok()
    };
    // unknowns: (generator, multiplier monomial)
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    let mut columns: Vec<MPoly> = Vec::new();
    for (i, g) in ideal.gens.iter().enumerate() {
        let Some(dg) = g.total_degree() else { continue };
        if dg > cap {
            continue;
        }
        for m in monomials_up_to(n, cap - dg) {
            columns.push(g.mul_monomial(&m));
            unknowns.push((i, m));
        }
    }
    let nr = rows.len();
    let nc = columns.len();
    // [A | I | b]
    let mut mat: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); nc + nr + 1]; nr];
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            mat[row_of(m).expect("within cap")][j] = c.clone();
        }
    }
    for (r, row) in mat.iter_mut().enumerate() {
        row[nc + r] = BigRational::one();
    }
    for (m, c) in f.terms() {
        mat[row_of(m).expect("within cap")][nc + nr] = c.clone();
    }
    let pivots = rref(&mut mat, nc);
    for row in mat.iter().skip(pivots.len()) {
        if !row[nc + nr].is_zero() {
            return Err(Error::NotInIdealAtCap { cap });
        }
    }
    let mut solution = vec![BigRational::zero(); nc];
    let mut c_ord = i64::MAX;
    for (r, &pc) in pivots.iter().enumerate() {
        solution[pc] = mat[r][nc + nr].clone();
        for t in &mat[r][nc..nc + nr] {
            if let Valuation::Finite(v) = rational_ord(t, p) {
                c_ord = c_ord.min(v);
            }
        }
    }
    if c_ord == i64::MAX {
        c_ord = 0;
    }
    let mut coefficients = vec![MPoly::zero(n); ideal.gens.len()];
    for ((i, m), a) in unknowns.into_iter().zip(solution) {
        if !a.is_zero() {
            coefficients[i] =
                std::mem::replace(&mut coefficients[i], MPoly::zero(n)).with_term(m, a);
        }
    }
    Ok(Membership {
        coefficients,
        c_ord,
        c: (p as f64).powi(-c_ord as i32),
    })
}

/// Reduced row echelon form on the first `ncols` columns (row operations
/// act on the whole row). Returns the pivot columns in row order.
fn rref(mat: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..mat.len()).find(|&k| !mat[k][c].is_zero()) else {
            continue;
        };
        mat.swap(r, k);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = mat[r].clone();
        for (k, row) in mat.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    pivots
}

/// Which part of the comparison lemma to check.
#[derive(Clone, Debug)]
pub enum LemmaMode {
    /// `d(x,Z) d(x,Z') <= d(x, Z ∪ Z') <= min(d(x,Z), d(x,Z'))`.
    Union,
    /// `max(d(x,Z), d(y,Z')) <= d((x,y), Z x Z') <= c max(...)` at the point `(x, y)`.
    Product { y: Vec<PadicNumber> },
}

/// Distances as valuations (`None` is `+infinity`, distance `0`) plus
/// their real values. `holds` is decided on the valuations.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheck {
    pub holds: bool,
    pub ord_z: Option<i64>,
    pub ord_z_prime: Option<i64>,
    pub ord_combined: Option<i64>,
    pub dist_z: f64,
    pub dist_z_prime: f64,
    pub combined: f64,
    pub lower: f64,
    pub upper: f64,
    pub c: f64,
}

fn add_ord(a: Valuation, b: Valuation) -> Valuation {
    match (a, b) {
        (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
        _ => Valuation::Infinite,
    }
}

pub fn check_union_product_distances(
    x: &[PadicNumber],
    iz: &IdealPresentation,
    izp: &IdealPresentation,
    mode: &LemmaMode,
) -> Result<LemmaCheck> {
    let p = iz.p;
    let (vz, vzp, vc, holds) = match mode {
        LemmaMode::Union => {
            if iz.nvars != izp.nvars {
                return Err(Error::Precondition(
                    "union needs equal variable counts".into(),
                ));
            }
            let vz = distance_ord(x, iz)?;
            let vzp = distance_ord(x, izp)?;
            let vc = distance_ord(x, &iz.product(izp)?)?;
            // d(Z) d(Z') <= d(Z u Z') <= min(d(Z), d(Z'))
            let holds = vc <= add_ord(vz, vzp) && vc >= vz.max(vzp);
            (vz, vzp, vc, holds)
        }
        LemmaMode::Product { y } => {
            let vz = distance_ord(x, iz)?;
            let vzp = distance_ord(y, izp)?;
            let mut xy = x.to_vec();
            xy.extend(y.iter().cloned());
            common_ring(&xy)?;
            let vc = distance_ord(&xy, &iz.cartesian(izp)?)?;
            (vz, vzp, vc, vc == vz.min(vzp))
        }
    };
    let (dz, dzp) = (size(p, vz), size(p, vzp));
    let (lower, upper) = match mode {
        LemmaMode::Union => (dz * dzp, dz.min(dzp)),
        LemmaMode::Product { .. } => (dz.max(dzp), dz.max(dzp)),
    };
    Ok(LemmaCheck {
        holds,
        ord_z: vz.finite(),
        ord_z_prime: vzp.finite(),
        ord_combined: vc.finite(),
        dist_z: dz,
        dist_z_prime: dzp,
        combined: size(p, vc),
        lower,
        upper,
        c: 1.0,
    })
}

/// The point `(a_1, ..., a_n)` of `Q_p^n` from integers.
pub fn integer_point(p: u64, coords: &[i64], prec: u32) -> Vec<PadicNumber> {
    let ring = crate::padic::UnramifiedRing::get(p, 1);
    coords
        .iter()
        .map(|&c| {
            if c == 0 {
                PadicNumber::zero(&ring)
            } else {
                PadicNumber::from_integer(&ring, &BigInt::from(c), prec)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::mpoly::rational;

    fn ideal(p: u64, nvars: usize, gens: Vec<MPoly>) -> IdealPresentation {
        IdealPresentation::new(p, nvars, gens).unwrap()
    }

    #[test]
    fn distance_examples() {
        let p = 5;
        let i = ideal(p, 1, vec![MPoly::var(1, 0)]);
        let x = integer_point(p, &[25], 20);
        assert!((distance(&x, &i).unwrap() - 0.04).abs() < 1e-15);
        assert_eq!(distance(&integer_point(p, &[0], 20), &i).unwrap(), 0.0);
        let samples = vec![integer_point(p, &[0], 20)];
        let x3 = integer_point(p, &[125], 20);
        assert!((distance_prime_upper(&x3, &samples).unwrap() - 0.008).abs() < 1e-15);
        assert_eq!(
            distance_prime_upper(&x3, &[]).unwrap_err(),
            Error::EmptySample
        );
    }

    #[test]
    fn non_integral_generator_rejected() {
        let f = MPoly::var(1, 0).scale(&rational(1, 5));
        assert!(IdealPresentation::new(5, 1, vec![f]).is_err());
    }

    #[test]
    fn membership_round_trip() {
        let p = 3;
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f1 = x.mul(&x).sub(&y);
        let f2 = x.mul(&y).add(&MPoly::one(2));
        let i = ideal(p, 2, vec![f1.clone(), f2.clone()]);
        let f = x.mul(&f1).add(&f2.scale(&rational(3, 1)));
        let m = ideal_membership_bounded(&f, &i, 3).unwrap();
        let back = m.coefficients[0].mul(&f1).add(&m.coefficients[1].mul(&f2));
        assert_eq!(back, f);
        let amax = m
            .coefficients
            .iter()
            .map(|a| a.gauss_norm(p))
            .fold(0.0, f64::max);
        assert!(amax <= m.c * f.gauss_norm(p) * (1.0 + 1e-12));
    }

    #[test]
    fn one_is_not_in_x_y() {
        let i = ideal(5, 2, vec![MPoly::var(2, 0), MPoly::var(2, 1)]);
        for cap in 0..4 {
            assert_eq!(
                ideal_membership_bounded(&MPoly::one(2), &i, cap).unwrap_err(),
                Error::NotInIdealAtCap { cap }
            );
        }
    }

    #[test]
    fn union_of_two_points() {
        let p = 5;
        let z = ideal(p, 1, vec![MPoly::var(1, 0)]);
        let zp = ideal(p, 1, vec![MPoly::univariate(&[-1, 1])]);
        let x = integer_point(p, &[25], 20);
        let r = check_union_product_distances(&x, &z, &zp, &LemmaMode::Union).unwrap();
        assert!(r.holds);
        assert!((r.combined - 0.04).abs() < 1e-15);
        let y = integer_point(p, &[6], 20);
        let r = check_union_product_distances(&x, &z, &zp, &LemmaMode::Product { y }).unwrap();
        assert!(r.holds);
        assert!((r.combined - 0.2).abs() < 1e-15);
    }
}
