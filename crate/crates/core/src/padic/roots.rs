//! Hensel lifting and root search in unramified rings.
//!
//! Integral roots are found by a digit search: the residue roots of the
//! current polynomial are computed in `F_{p^F}`; simple ones are lifted by
//! Newton iteration, multiple ones are refined through
//! `h(T) = g(r + pT) / p^v` until the cluster separates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use super::gf::{self, Fq, FqPoly};
use super::newton::NewtonPolygon;
use super::number::{PadicNumber, Valuation};
use super::poly::{IntegerPolynomial, PadicPolynomial};
use super::ring::{Coords, UnramifiedRing};
use crate::error::{Error, Result};

/// Lifts an approximate root `a0` until `f(r) = 0` modulo `p^target`.
///
/// Needs `ord f(a0) > 2 ord f'(a0)`. The returned root is reported to the
/// absolute precision that the lifting certifies, `target - ord f'(a0)`.
pub fn hensel_lift(f: &PadicPolynomial, a0: &PadicNumber, target: u32) -> Result<PadicNumber> {
    let ring = a0.ring().clone();
    let df = f.derivative();
    let fa = f.eval(a0);
    if fa.is_exact_zero() {
        return Ok(a0.clone());
    }
    let vd = match df.eval(a0).ord() {
        Ok(Valuation::Finite(v)) => v,
        _ => {
            return Err(Error::NonSmoothPoint(
                "derivative vanishes at the starting point".into(),
            ))
        }
    };
    let vf = fa.ord_lower_bound().finite().unwrap_or(i64::MAX);
    if vf <= 2 * vd {
        return Err(Error::NonSmoothPoint(format!(
            "ord f(a0) = {vf} is not above 2 ord f'(a0) = {}",
            2 * vd
        )));
    }
    if vf >= target as i64 {
        return Ok(a0.clone());
    }
    if a0.ord_lower_bound() < Valuation::Finite(0) {
        return Err(Error::Domain("starting point is not integral".into()));
    }
    let work = target + vd as u32 + 1;
    let pad = |x: &PadicNumber| -> Result<PadicNumber> {
        let a = x
            .absolute_precision()
            .map_or(work as i64, |a| a.min(work as i64))
            .max(0) as u32;
        let c = x.integral_coords(a)?;
        Ok(PadicNumber::from_coords(&ring, &c, work))
    };
    let mut x = pad(a0)?;
    for _ in 0..96 {
        let fx = f.eval(&x);
        if fx.is_exact_zero() || fx.ord_lower_bound() >= Valuation::Finite(target as i64) {
            let certified = target - vd as u32;
            let c = x.integral_coords(certified)?;
            return Ok(PadicNumber::from_coords(&ring, &c, certified));
        }
        if fx.is_zero_at_precision() {
            break;
        }
        let step = fx.div(&df.eval(&x))?;
        x = pad(&(&x - &step))?;
    }
    Err(Error::PrecisionExhausted(format!(
        "coefficients too imprecise to reach p^{target}"
    )))
}

/// Polynomial over `W_F` with coordinates reduced modulo `p^abs`.
struct CoordPoly {
    coeffs: Vec<Coords>,
    abs: u32,
}

fn eval_coords(ring: &UnramifiedRing, g: &[Coords], x: &[BigInt], pa: &BigInt) -> Coords {
    let mut acc = ring.zero_coords();
    for c in g.iter().rev() {
        acc = ring.add(&ring.mul(&acc, x, pa), c, pa);
    }
    acc
}

fn derivative_coords(ring: &UnramifiedRing, g: &[Coords], pa: &BigInt) -> Vec<Coords> {
    g.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| ring.scale(c, &BigInt::from(i), pa))
        .collect()
}

/// Newton iteration from a simple residue root up to `p^abs`.
fn newton_coords(ring: &UnramifiedRing, g: &[Coords], start: Coords, abs: u32) -> Coords {
    let mut x = start;
    let mut prec = 1u32;
    while prec < abs {
        prec = (2 * prec).min(abs);
        let pa = ring.pow_p(prec);
        let gx = eval_coords(ring, g, &x, &pa);
        let dg = eval_coords(ring, &derivative_coords(ring, g, &pa), &x, &pa);
        let inv = ring.inv_unit(&dg, prec).expect("simple residue root");
        x = ring.sub(&x, &ring.mul(&gx, &inv, &pa), &pa);
    }
    ring.reduce(&x, &ring.pow_p(abs))
}

fn residue_poly(ring: &UnramifiedRing, g: &[Coords]) -> FqPoly {
    gf::poly_trim(
        ring.residue_field(),
        g.iter().map(|c| ring.to_residue(c)).collect(),
    )
}

/// `g(r + pT)` modulo `p^abs`, by Horner's rule in `T`.
fn taylor_shift(ring: &UnramifiedRing, g: &[Coords], r: &[BigInt], pa: &BigInt) -> Vec<Coords> {
    let p = BigInt::from(ring.p());
    let mut acc: Vec<Coords> = Vec::new();
    for c in g.iter().rev() {
        // acc * (r + pT) + c
        let mut next = vec![ring.zero_coords(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i] = ring.add(&next[i], &ring.mul(a, r, pa), pa);
            next[i + 1] = ring.add(&next[i + 1], &ring.scale(a, &p, pa), pa);
        }
        next[0] = ring.add(&next[0], c, pa);
        acc = next;
    }
    acc
}

/// Integral roots in `W_F`, each with the absolute precision it is known to.
fn integral_roots(ring: &UnramifiedRing, g: CoordPoly) -> Result<Vec<(Coords, u32)>> {
    let mut out = Vec::new();
    search(ring, g, ring.zero_coords(), 0, &mut out)?;
    Ok(out)
}

fn search(
    ring: &UnramifiedRing,
    g: CoordPoly,
    prefix: Coords,
    depth: u32,
    out: &mut Vec<(Coords, u32)>,
) -> Result<()> {
    let field = ring.residue_field();
    let gbar = residue_poly(ring, &g.coeffs);
    if gf::poly_degree(&gbar).unwrap_or(0) == 0 {
        return Ok(());
    }
    let dbar = gf::poly_derivative(field, &gbar);
    let pd = ring.pow_p(depth);
    for rho in gf::poly_roots(field, &gbar) {
        let lift = ring.from_residue(&rho);
        let simple = !field.is_zero(&gf::poly_eval(field, &dbar, &rho));
        if simple {
            let z = newton_coords(ring, &g.coeffs, lift, g.abs);
            let abs = depth + g.abs;
            let root = ring.add(
                &prefix,
                &ring.scale(&z, &pd, &ring.pow_p(abs)),
                &ring.pow_p(abs),
            );
            out.push((root, abs));
            continue;
        }
        let pa = ring.pow_p(g.abs);
        let shifted = taylor_shift(ring, &g.coeffs, &lift, &pa);
        let v = shifted
            .iter()
            .filter_map(|c| ring.coords_valuation(c))
            .min();
        let v = match v {
            Some(v) if (v as u32) < g.abs => v as u32,
            _ => {
                return Err(Error::PrecisionExhausted(format!(
                    "root cluster unresolved at p^{}",
                    depth + g.abs
                )))
            }
        };
        let coeffs = shifted
            .iter()
            .map(|c| ring.div_exact_p_power(&ring.reduce(c, &pa), v))
            .collect();
        let next_prefix = ring.add(
            &prefix,
            &ring.scale(&lift, &pd, &ring.pow_p(depth + 1)),
            &ring.pow_p(depth + 1),
        );
        search(
            ring,
            CoordPoly {
                coeffs,
                abs: g.abs - v,
            },
            next_prefix,
            depth + 1,
            out,
        )?;
    }
    Ok(())
}

fn integer_coord_poly(ring: &UnramifiedRing, f: &IntegerPolynomial, abs: u32) -> CoordPoly {
    let pa = ring.pow_p(abs);
    // strip the common p-power so the reduction is nonzero
    let v = f
        .coeffs()
        .iter()
        .filter_map(|c| crate::arith::ord_p_big(c, ring.p()))
        .min()
        .unwrap_or(0) as u32;
    let pv = ring.pow_p(v);
    CoordPoly {
        coeffs: f
            .coeffs()
            .iter()
            .map(|c| ring.scalar_coords(&(c / &pv), &pa))
            .collect(),
        abs,
    }
}

/// Frobenius applied `k` times to coordinates known modulo `p^a`.
fn frobenius_power(ring: &UnramifiedRing, x: &[BigInt], k: usize, a: u32) -> Coords {
    let mut y = x.to_vec();
    for _ in 0..k {
        y = ring.frobenius(&y, a);
    }
    y
}

/// Roots found in `W_F` whose Galois orbit has exact length `F`.
fn exact_degree_roots(
    f: &IntegerPolynomial,
    p: u64,
    degree: usize,
    abs: u32,
) -> Result<Vec<(Coords, u32)>> {
    let ring = UnramifiedRing::get(p, degree);
    let roots = integral_roots(&ring, integer_coord_poly(&ring, f, abs))?;
    Ok(roots
        .into_iter()
        .filter(|(x, a)| {
            let pa = ring.pow_p(*a);
            (1..degree).filter(|d| degree.is_multiple_of(*d)).all(|d| {
                !ring.is_zero_mod(&ring.sub(&frobenius_power(&ring, x, d, *a), x, &pa), &pa)
            })
        })
        .collect())
}

/// All roots of `f` in unramified extensions of residue degree at most
/// `f_max`, each returned once in the ring of its exact residue degree
/// with (at least) `precision` significant digits.
///
/// Repeated roots are reported once: the search runs on the squarefree
/// part. Roots of negative valuation come from the reversed polynomial.
pub fn roots_in_unramified(
    f: &IntegerPolynomial,
    p: u64,
    f_max: usize,
    precision: u32,
) -> Result<Vec<PadicNumber>> {
    if f.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    let mut g = f.squarefree_part();
    let mut out = Vec::new();
    if g.coeff(0).is_zero() {
        out.push(PadicNumber::zero(&UnramifiedRing::get(p, 1)));
        g = g.div_exact(&IntegerPolynomial::from_i64(&[0, 1])).unwrap();
    }
    if g.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let np = NewtonPolygon::of_integer(&g, p);
    let vals = np.root_valuations();
    let vmax = vals.last().map_or(0, |v| v.ceil().to_integer().max(0)) as u32;
    let has_negative = vals.first().is_some_and(|v| *v < 0.into());
    let vneg = vals.first().map_or(0, |v| (-v.floor().to_integer()).max(0)) as u32;

    let mut abs = precision + vmax.max(vneg) + 8;
    let cap = 8 * (precision + vmax.max(vneg)) + 256;
    loop {
        match collect_roots(&g, p, f_max, precision, abs, has_negative) {
            Ok(mut roots) => {
                out.append(&mut roots);
                return Ok(out);
            }
            Err(e) => {
                if abs >= cap {
                    return Err(e);
                }
                abs = (2 * abs).min(cap);
            }
        }
    }
}

fn collect_roots(
    g: &IntegerPolynomial,
    p: u64,
    f_max: usize,
    precision: u32,
    abs: u32,
    has_negative: bool,
) -> Result<Vec<PadicNumber>> {
    let mut out = Vec::new();
    let rev = has_negative.then(|| {
        let mut c = g.coeffs().to_vec();
        c.reverse();
        IntegerPolynomial::new(c)
    });
    for degree in 1..=f_max {
        let ring = UnramifiedRing::get(p, degree);
        for (x, a) in exact_degree_roots(g, p, degree, abs)? {
            let r = PadicNumber::from_coords(&ring, &x, a);
            if r.precision().unwrap_or(0) < precision {
                return Err(Error::PrecisionExhausted(format!(
                    "root known to only {} digits",
                    r.precision().unwrap_or(0)
                )));
            }
            out.push(r.with_precision(precision));
        }
        if let Some(rev) = &rev {
            for (x, a) in exact_degree_roots(rev, p, degree, abs)? {
                let s = PadicNumber::from_coords(&ring, &x, a);
                // unit roots of the reversal are already covered
                if s.ord_lower_bound() <= Valuation::Finite(0) {
                    continue;
                }
                if s.precision().unwrap_or(0) < precision {
                    return Err(Error::PrecisionExhausted(
                        "reciprocal root too imprecise".into(),
                    ));
                }
                out.push(s.try_inv()?.with_precision(precision));
            }
        }
    }
    Ok(out)
}

/// Images of `1, t, ..., t^{F-1}` of `W_F` inside `W_L` modulo `p^a`
/// (`F | L`), matching the residue-field registry embedding.
pub fn embedding_basis(src: &UnramifiedRing, dst: &UnramifiedRing, a: u32) -> Result<Vec<Coords>> {
    type Key = (u64, usize, usize, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Vec<Coords>>>> = OnceLock::new();
    let key = (src.p(), src.degree(), dst.degree(), a);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&key) {
        return Ok(b.clone());
    }
    if src.p() != dst.p() || !dst.degree().is_multiple_of(src.degree()) {
        return Err(Error::Precondition(format!(
            "no embedding of degree {} into degree {}",
            src.degree(),
            dst.degree()
        )));
    }
    let pa = dst.pow_p(a);
    let basis = if src.degree() == 1 {
        vec![dst.one_coords()]
    } else {
        let g0: Fq = gf::generator_image(src.residue_field(), dst.residue_field()).unwrap();
        let m: Vec<Coords> = src
            .modulus()
            .iter()
            .map(|c| dst.scalar_coords(c, &pa))
            .collect();
        let g = newton_coords(dst, &m, dst.from_residue(&g0), a);
        let mut out = vec![dst.one_coords()];
        for i in 1..src.degree() {
            out.push(dst.mul(&out[i - 1], &g, &pa));
        }
        out
    };
    cache.lock().unwrap().insert(key, basis.clone());
    Ok(basis)
}

/// The value of `x` inside `W_L`, `L` a multiple of its residue degree.
pub fn embed(x: &PadicNumber, target: &Arc<UnramifiedRing>) -> Result<PadicNumber> {
    if x.residue_degree() == target.degree() {
        return Ok(x.clone());
    }
    let a = x.precision().unwrap_or(1).max(1);
    let basis = embedding_basis(x.ring(), target, a)?;
    Ok(x.embed_with(target, &basis, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::number::Valuation;

    fn poly(c: &[i64]) -> IntegerPolynomial {
        IntegerPolynomial::from_i64(c)
    }

    #[test]
    fn hensel_on_d503() {
        // -503 is not a square mod 5: the roots live in W_2
        let w = UnramifiedRing::get(5, 2);
        let field = w.residue_field().clone();
        let fbar: Vec<Fq> = [126i64, -1, 1].iter().map(|&c| field.from_i64(c)).collect();
        let rho = gf::poly_roots(&field, &fbar);
        assert_eq!(rho.len(), 2);
        let f = poly(&[126, -1, 1]).to_padic(&w, 20);
        let a0 = PadicNumber::from_coords(&w, &w.from_residue(&rho[0]), 1);
        let r = hensel_lift(&f, &a0, 10).unwrap();
        assert!(f.eval(&r).ord_lower_bound() >= Valuation::Finite(10));
        // oracle: digit-by-digit brute force of the roots modulo 5^10
        let pa = w.pow_p(10);
        let g: Vec<Coords> = [126i64, -1, 1]
            .iter()
            .map(|&c| w.scalar_coords(&BigInt::from(c), &pa))
            .collect();
        let mut sols = vec![w.zero_coords()];
        for k in 0..10u32 {
            let pk = w.pow_p(k);
            let pk1 = w.pow_p(k + 1);
            let mut next = Vec::new();
            for s in &sols {
                for d in field.elements() {
                    let cand = w.add(s, &w.scale(&w.from_residue(&d), &pk, &pk1), &pk1);
                    if w.is_zero_mod(&eval_coords(&w, &g, &cand, &pk1), &pk1) {
                        next.push(cand);
                    }
                }
            }
            sols = next;
        }
        assert_eq!(sols.len(), 2);
        let got = r.integral_coords(10).unwrap();
        assert!(sols.contains(&got));
    }

    #[test]
    fn hensel_exact_and_singular() {
        let z7 = UnramifiedRing::get(7, 1);
        let f = poly(&[-7, 1]).to_padic(&z7, 20);
        let a0 = PadicNumber::from_i64(&z7, 7, 20);
        assert_eq!(hensel_lift(&f, &a0, 10).unwrap(), a0);
        let z5 = UnramifiedRing::get(5, 1);
        let g = poly(&[-5, 0, 1]).to_padic(&z5, 20);
        let e = hensel_lift(&g, &PadicNumber::zero(&z5), 10).unwrap_err();
        assert!(matches!(e, Error::NonSmoothPoint(_)));
    }

    #[test]
    fn simple_root_sets() {
        let f = poly(&[5, -6, 1]); // (X - 1)(X - 5)
        let roots = roots_in_unramified(&f, 5, 1, 10).unwrap();
        let mut vals: Vec<_> = roots.iter().map(|r| r.ord().unwrap()).collect();
        vals.sort();
        assert_eq!(vals, vec![Valuation::Finite(0), Valuation::Finite(1)]);
        let h11 = poly(&[32768, 1]);
        let roots = roots_in_unramified(&h11, 2, 1, 8).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].ord().unwrap(), Valuation::Finite(15));
    }

    #[test]
    fn cube_roots_of_unity_over_q5() {
        let f = poly(&[1, 1, 1]);
        let roots = roots_in_unramified(&f, 5, 2, 12).unwrap();
        assert_eq!(roots.len(), 2);
        let fp = f.to_padic(&UnramifiedRing::get(5, 2), 30);
        for r in &roots {
            assert_eq!(r.residue_degree(), 2);
            assert!(fp.eval(r).ord_lower_bound() >= Valuation::Finite(12));
        }
        // brute force over F_25
        let field = gf::ResidueField::get(5, 2);
        let brute = field
            .elements()
            .filter(|x| {
                let x2 = field.mul(x, x);
                field.is_zero(&field.add(&field.add(&x2, x), &field.one()))
            })
            .count();
        assert_eq!(brute, 2);
    }

    #[test]
    fn clustered_roots_separate() {
        // (X - 1)(X - 1 - 5^4)(X + 3)
        let a = BigInt::from(1);
        let b = BigInt::from(1 + 625);
        let f = IntegerPolynomial::from_roots(&[a.clone(), b.clone(), BigInt::from(-3)]);
        let roots = roots_in_unramified(&f, 5, 1, 10).unwrap();
        assert_eq!(roots.len(), 3);
        let m = BigInt::from(5i64.pow(10));
        let mut got: Vec<BigInt> = roots
            .iter()
            .map(|r| ((r.to_rational().unwrap().to_integer() % &m) + &m) % &m)
            .collect();
        got.sort();
        let mut want = vec![a, b, (BigInt::from(-3) + &m) % &m];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn negative_valuation_roots() {
        // 5X - 1 has the root 1/5
        let roots = roots_in_unramified(&poly(&[-1, 5]), 5, 1, 6).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].ord().unwrap(), Valuation::Finite(-1));
    }

    #[test]
    fn embedding_preserves_roots() {
        let f = poly(&[1, 1, 1]);
        let roots = roots_in_unramified(&f, 5, 2, 10).unwrap();
        let w4 = UnramifiedRing::get(5, 4);
        let fp = f.to_padic(&w4, 20);
        for r in &roots {
            let e = embed(r, &w4).unwrap();
            assert!(fp.eval(&e).ord_lower_bound() >= Valuation::Finite(10));
        }
    }
}
